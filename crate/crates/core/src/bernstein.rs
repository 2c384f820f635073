//! Bernstein-polynomial stochastic baseline.
//!
//! The polynomial is fitted by least squares on `[lo, hi]` mapped to `[0, 1]`.
//! Its coefficients are mapped affinely into `[0, 1]` so each one can drive a
//! unipolar stream; the inverse map is applied to the simulated output.

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

const FIT_POINTS: usize = 2001;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BernsteinConfig {
    pub degree: usize,
    /// Mapped coefficients `b_0 ..= b_degree`, each in `[0, 1]`.
    pub coefficients: Vec<f64>,
    pub bsl: usize,
    pub domain: (f64, f64),
    /// Output value represented by a coefficient of 0.
    pub range_lo: f64,
    /// Output value represented by a coefficient of 1.
    pub range_hi: f64,
}

fn binomial(n: usize, k: usize) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

/// Basis values `B_{i,n}(u)` for `i = 0..=n`.
pub fn basis(n: usize, u: f64) -> Vec<f64> {
    (0..=n)
        .map(|i| binomial(n, i) * u.powi(i as i32) * (1.0 - u).powi((n - i) as i32))
        .collect()
}

pub fn fit_bernstein(
    f: impl Fn(f64) -> f64,
    degree: usize,
    domain: (f64, f64),
    bsl: usize,
) -> Result<BernsteinConfig> {
    if degree == 0 {
        return Err(Error::Config("Bernstein degree must be at least 1".into()));
    }
    if bsl == 0 {
        return Err(Error::ZeroLength);
    }
    let (lo, hi) = domain;
    if !(lo.is_finite() && hi.is_finite() && lo < hi) {
        return Err(Error::Config(format!("bad interval [{lo}, {hi}]")));
    }
    let us: Vec<f64> = (0..FIT_POINTS)
        .map(|j| j as f64 / (FIT_POINTS - 1) as f64)
        .collect();
    let a = DMatrix::from_fn(FIT_POINTS, degree + 1, |r, c| basis(degree, us[r])[c]);
    let y = DVector::from_iterator(FIT_POINTS, us.iter().map(|&u| f(lo + u * (hi - lo))));
    let c = a
        .svd(true, true)
        .solve(&y, 1e-12)
        .map_err(|e| Error::Config(format!("least-squares fit failed: {e}")))?;
    let range_lo = c.iter().copied().fold(0.0, f64::min);
    let range_hi = c.iter().copied().fold(1.0, f64::max);
    let span = range_hi - range_lo;
    Ok(BernsteinConfig {
        degree,
        coefficients: c.iter().map(|&v| ((v - range_lo) / span).clamp(0.0, 1.0)).collect(),
        bsl,
        domain,
        range_lo,
        range_hi,
    })
}

impl BernsteinConfig {
    fn unit(&self, x: f64) -> f64 {
        let (lo, hi) = self.domain;
        ((x - lo) / (hi - lo)).clamp(0.0, 1.0)
    }

    fn unmap(&self, p: f64) -> f64 {
        self.range_lo + (self.range_hi - self.range_lo) * p
    }

    /// Polynomial value at `x`, the quantity the stochastic circuit estimates.
    pub fn analytic(&self, x: f64) -> f64 {
        let b = basis(self.degree, self.unit(x));
        self.unmap(b.iter().zip(&self.coefficients).map(|(w, c)| w * c).sum())
    }

    /// Output-ones probability of the circuit at `x`.
    pub fn probability(&self, x: f64) -> f64 {
        let b = basis(self.degree, self.unit(x));
        b.iter().zip(&self.coefficients).map(|(w, c)| w * c).sum()
    }

    /// Bit-serial simulation over `bsl` clocks with independent Bernoulli
    /// sources: `degree` copies of `x` whose ones-count selects a coefficient
    /// stream.
    pub fn simulate(&self, x: f64, seed: u64) -> f64 {
        let u = self.unit(x);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut ones = 0usize;
        for _ in 0..self.bsl {
            let count = (0..self.degree).filter(|_| rng.random::<f64>() < u).count();
            if rng.random::<f64>() < self.coefficients[count] {
                ones += 1;
            }
        }
        self.unmap(ones as f64 / self.bsl as f64)
    }
}
