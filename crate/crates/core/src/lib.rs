//! Constructive universal approximation with a superactivation function.
//!
//! The crate builds an explicit smooth activation `σ` whose shifted and
//! rescaled copies `σ(w·x − θ)` approximate any continuous univariate function
//! with a *single* neuron, then uses it to assemble shallow networks over
//! arbitrary input spaces (feature maps), linear functionals on function
//! spaces, and Kolmogorov-style superpositions.
//!
//! Everything here needs only `alloc`. Enable `std` for `std::error::Error`
//! impls and `parallel` for rayon-backed grid evaluation.

#![cfg_attr(not(feature = "std"), no_std)]

extern crate alloc;

pub mod chebyshev;
pub mod contfrac;
pub mod enumeration;
mod error;
pub mod kst;
pub mod lcs;
pub mod linalg;
pub mod neuron;
mod par;
pub mod poly;
pub mod rational;
pub mod sigma;
pub mod tfnn;

pub use enumeration::{nat_to_poly, nat_to_rational, pair, poly_to_nat, rational_to_nat, unpair, EnumIndex};
pub use error::{Error, Result};
pub use neuron::{neuron_lookup, ErrorCertificate, Neuron, NeuronParams, TargetFn1D};
pub use poly::RationalPoly;
pub use rational::ExactRational;
pub use sigma::{SigmaConfig, SigmaMode, Superactivation};
