//! Built-in targets, point sets, and CSV ingestion.

use std::path::Path;
use std::sync::Arc;

use crate::CliError;

pub type Fn1 = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// Univariate targets for `neuron fit`, as functions of `x`.
pub fn named_1d(name: &str) -> Result<Fn1, CliError> {
    let f: Fn1 = match name {
        "sin" => Arc::new(f64::sin),
        "cos" => Arc::new(f64::cos),
        "exp" => Arc::new(f64::exp),
        "abs" => Arc::new(|x: f64| (x - 0.5).abs()),
        "runge" => Arc::new(|x: f64| 1.0 / (1.0 + 25.0 * x * x)),
        "square" => Arc::new(|x: f64| x * x),
        other => {
            return Err(CliError::Config(format!(
                "unknown target `{other}` (expected sin, cos, exp, abs, runge, square)"
            )))
        }
    };
    Ok(f)
}

/// A numeric table with a header row.
#[derive(Clone, Debug, PartialEq)]
pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

pub fn read_table(path: &Path) -> Result<Table, CliError> {
    let err = |e: &dyn std::fmt::Display| CliError::Config(format!("{}: {e}", path.display()));
    let mut reader = csv::ReaderBuilder::new().has_headers(true).trim(csv::Trim::All).from_path(path).map_err(|e| err(&e))?;
    let header: Vec<String> = reader.headers().map_err(|e| err(&e))?.iter().map(String::from).collect();
    let mut rows = Vec::new();
    for (i, record) in reader.records().enumerate() {
        let record = record.map_err(|e| err(&e))?;
        let row = record
            .iter()
            .map(|field| field.parse::<f64>().ok().filter(|v| v.is_finite()))
            .collect::<Option<Vec<f64>>>()
            .ok_or_else(|| err(&format!("row {} is not all finite numbers", i + 1)))?;
        if row.len() != header.len() {
            return Err(err(&format!("row {} has {} fields, header has {}", i + 1, row.len(), header.len())));
        }
        rows.push(row);
    }
    if rows.is_empty() {
        return Err(err(&"no data rows"));
    }
    Ok(Table { header, rows })
}

/// Piecewise-linear interpolation through `(x, value)` knots.
#[derive(Clone, Debug, PartialEq)]
pub struct PiecewiseLinear {
    xs: Vec<f64>,
    ys: Vec<f64>,
}

impl PiecewiseLinear {
    pub fn new(mut knots: Vec<(f64, f64)>) -> Result<Self, CliError> {
        if knots.len() < 2 {
            return Err(CliError::Config("need at least two knots".into()));
        }
        knots.sort_by(|a, b| a.0.total_cmp(&b.0));
        if knots.windows(2).any(|w| w[0].0 == w[1].0) {
            return Err(CliError::Config("duplicate x in table".into()));
        }
        let (xs, ys) = knots.into_iter().unzip();
        Ok(PiecewiseLinear { xs, ys })
    }

    pub fn from_table(table: &Table) -> Result<Self, CliError> {
        if table.header.len() != 2 {
            return Err(CliError::Config(format!("expected columns x,value, got {}", table.header.join(","))));
        }
        Self::new(table.rows.iter().map(|r| (r[0], r[1])).collect())
    }

    pub fn range(&self) -> (f64, f64) {
        (self.xs[0], self.xs[self.xs.len() - 1])
    }

    /// Constant beyond the end knots.
    pub fn eval(&self, x: f64) -> f64 {
        let n = self.xs.len();
        if x <= self.xs[0] {
            return self.ys[0];
        }
        if x >= self.xs[n - 1] {
            return self.ys[n - 1];
        }
        let i = self.xs.partition_point(|&k| k <= x) - 1;
        let t = (x - self.xs[i]) / (self.xs[i + 1] - self.xs[i]);
        self.ys[i] + t * (self.ys[i + 1] - self.ys[i])
    }
}

/// The first `n` points of the Halton sequence, scaled to `[lo, hi]^d`.
pub fn halton(d: usize, n: usize, lo: f64, hi: f64) -> Vec<Vec<f64>> {
    let primes = first_primes(d);
    (1..=n as u64)
        .map(|i| {
            primes
                .iter()
                .map(|&p| {
                    let (mut k, mut f, mut r) = (i, 1.0, 0.0);
                    while k > 0 {
                        f /= p as f64;
                        r += f * (k % p) as f64;
                        k /= p;
                    }
                    lo + (hi - lo) * r
                })
                .collect()
        })
        .collect()
}

fn first_primes(n: usize) -> Vec<u64> {
    let mut out = Vec::with_capacity(n);
    let mut k = 2u64;
    while out.len() < n {
        if out.iter().all(|&p| k % p != 0) {
            out.push(k);
        }
        k += 1;
    }
    out
}

/// Targets on points of a Euclidean space or the unit cube.
pub fn named_nd(name: &str) -> Result<fn(&[f64]) -> f64, CliError> {
    fn max(x: &[f64]) -> f64 {
        x.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }
    fn norm2(x: &[f64]) -> f64 {
        x.iter().map(|v| v * v).sum()
    }
    fn mean(x: &[f64]) -> f64 {
        x.iter().sum::<f64>() / x.len() as f64
    }
    fn product(x: &[f64]) -> f64 {
        x.iter().product()
    }
    fn sin_sum(x: &[f64]) -> f64 {
        (std::f64::consts::PI * mean(x)).sin()
    }
    match name {
        "max" => Ok(max),
        "norm2" => Ok(norm2),
        "mean" => Ok(mean),
        "product" => Ok(product),
        "sin-sum" => Ok(sin_sum),
        other => Err(CliError::Config(format!(
            "unknown target `{other}` (expected max, norm2, mean, product, sin-sum)"
        ))),
    }
}

/// Splits a table into points (all but the last column) and values.
pub fn points_and_values(table: &Table, dim: usize) -> Result<(Vec<Vec<f64>>, Vec<f64>), CliError> {
    if table.header.len() != dim + 1 {
        return Err(CliError::Config(format!(
            "expected {} coordinate columns plus a value column, got {} columns",
            dim,
            table.header.len()
        )));
    }
    Ok(table.rows.iter().map(|r| (r[..dim].to_vec(), r[dim])).unzip())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn interpolation_hits_knots_and_midpoints() {
        let p = PiecewiseLinear::new(vec![(1.0, 3.0), (0.0, 1.0), (2.0, -1.0)]).unwrap();
        assert_eq!(p.eval(0.0), 1.0);
        assert_eq!(p.eval(0.5), 2.0);
        assert_eq!(p.eval(1.5), 1.0);
        assert_eq!(p.eval(9.0), -1.0);
        assert_eq!(p.range(), (0.0, 2.0));
        assert!(PiecewiseLinear::new(vec![(0.0, 1.0), (0.0, 2.0)]).is_err());
    }

    #[test]
    fn halton_starts_at_known_points() {
        let h = halton(2, 3, 0.0, 1.0);
        assert_eq!(h[0], vec![0.5, 1.0 / 3.0]);
        assert_eq!(h[1], vec![0.25, 2.0 / 3.0]);
        assert_eq!(first_primes(5), vec![2, 3, 5, 7, 11]);
    }
}
