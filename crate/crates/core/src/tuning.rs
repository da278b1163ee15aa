//! Cost model for choosing the number of levels, the replication
//! predictor and the selectivity estimate.
//!
//! Expected results per query: `|Q| = n (λs + λq) / Λ`. At `m` levels the
//! two boundary bottom partitions hold about `2n / 2^m` intervals that need
//! comparisons, so the modelled cost is
//!
//! ```text
//! C(m) = β_cmp · n / 2^m + β_acc · max(0, |Q| - 2n / 2^m)
//! ```
//!
//! and `m_opt` is the smallest `m` whose cost is within a tolerance of
//! `C(m')`, where `m'` is the raw domain bit width.

use std::hint::black_box;
use std::time::Instant;

use crate::domain::{Interval, MAX_LEVELS};
use crate::error::{Error, Result};

/// Default convergence tolerance for [`estimate_m_opt`].
pub const DEFAULT_TOLERANCE: f64 = 0.03;

/// Summary statistics of a dataset and its query workload.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DatasetStats {
    pub n: u64,
    /// Mean interval length in raw units.
    pub lambda_s: f64,
    /// Mean query extent in raw units.
    pub lambda_q: f64,
    /// Domain span in raw units.
    pub domain: f64,
    /// Raw domain bit width.
    pub m_prime: u32,
}

impl DatasetStats {
    /// Measures `n`, `λs` and `Λ` from data; `m'` is the bit width of the span.
    pub fn from_intervals(intervals: &[Interval], lambda_q: f64) -> Self {
        let n = intervals.len() as u64;
        let (lo, hi) = intervals
            .iter()
            .fold((u64::MAX, 0), |(lo, hi), s| (lo.min(s.st), hi.max(s.end)));
        let domain = if n == 0 { 0.0 } else { (hi - lo) as f64 + 1.0 };
        let lambda_s = if n == 0 { 0.0 } else { intervals.iter().map(|s| s.len() as f64).sum::<f64>() / n as f64 };
        DatasetStats { n, lambda_s, lambda_q, domain, m_prime: bit_width(domain) }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: &str| Err(Error::InvalidParameter(msg.into()));
        if !(self.domain > 0.0) {
            return bad("domain span must be positive");
        }
        if !(self.lambda_s >= 0.0 && self.lambda_q >= 0.0) {
            return bad("mean lengths must be non-negative");
        }
        if self.lambda_s > self.domain || self.lambda_q > self.domain {
            return bad("mean lengths cannot exceed the domain span");
        }
        if self.m_prime == 0 || self.m_prime > 64 {
            return bad("raw bit width must be in 1..=64");
        }
        Ok(())
    }
}

/// Bits needed to address `span` distinct values.
pub fn bit_width(span: f64) -> u32 {
    if span <= 1.0 {
        1
    } else {
        (span - 1.0).log2().floor() as u32 + 1
    }
}

/// Machine-dependent unit costs, in seconds per element.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CostCoefficients {
    /// One endpoint comparison.
    pub beta_cmp: f64,
    /// One comparison-free result access.
    pub beta_acc: f64,
}

impl CostCoefficients {
    pub fn new(beta_cmp: f64, beta_acc: f64) -> Result<Self> {
        if !(beta_cmp > 0.0 && beta_acc > 0.0) || !beta_cmp.is_finite() || !beta_acc.is_finite() {
            return Err(Error::InvalidParameter(format!("cost coefficients must be positive, got {beta_cmp}, {beta_acc}")));
        }
        Ok(CostCoefficients { beta_cmp, beta_acc })
    }
}

/// Expected results per query.
pub fn estimate_result_size(stats: &DatasetStats) -> Result<f64> {
    if !(stats.domain > 0.0) {
        return Err(Error::InvalidParameter("domain span must be positive".into()));
    }
    Ok(stats.n as f64 * (stats.lambda_s + stats.lambda_q) / stats.domain)
}

/// Modelled seconds per query at `m` levels.
pub fn estimate_query_cost(stats: &DatasetStats, coeffs: &CostCoefficients, m: u32) -> Result<f64> {
    if m == 0 {
        return Err(Error::InvalidLevels(m));
    }
    let results = estimate_result_size(stats)?;
    let boundary = stats.n as f64 / 2f64.powi(m as i32);
    let c_cmp = coeffs.beta_cmp * boundary;
    let c_acc = coeffs.beta_acc * (results - 2.0 * boundary).max(0.0);
    Ok(c_cmp + c_acc)
}

/// Smallest `m` in `1..=m'` whose modelled cost is within `tolerance` of
/// the cost at `m'`. The result is capped at the largest supported level count.
pub fn estimate_m_opt(stats: &DatasetStats, coeffs: &CostCoefficients, tolerance: f64) -> Result<u32> {
    if !(tolerance > 0.0) {
        return Err(Error::InvalidParameter(format!("tolerance {tolerance} must be positive")));
    }
    stats.validate()?;
    let floor = estimate_query_cost(stats, coeffs, stats.m_prime)?;
    for m in 1..stats.m_prime {
        if estimate_query_cost(stats, coeffs, m)? <= (1.0 + tolerance) * floor {
            return Ok(m.min(MAX_LEVELS));
        }
    }
    Ok(stats.m_prime.min(MAX_LEVELS))
}

/// Expected partitions per interval at `m` levels for mean length `lambda`
/// over a domain of `m_prime` bits: `log2(λ · 2^(m - m') + 1)`, at least 1.
/// A zero length counts as one raw unit.
pub fn predict_replication(lambda: f64, m_prime: u32, m: u32) -> f64 {
    let lambda = lambda.max(1.0);
    let k = (lambda * 2f64.powi(m as i32 - m_prime as i32) + 1.0).log2();
    k.max(1.0)
}

/// Times a comparison loop and an id-append loop over `sample_size`
/// elements and returns the per-element costs. Both loops push ids one at
/// a time into the same output buffer, as a query sink does; the comparison
/// loop filters unsorted endpoints against a threshold that half of them
/// pass. Single-threaded.
pub fn calibrate_betas(sample_size: usize) -> Result<CostCoefficients> {
    if sample_size == 0 {
        return Err(Error::InvalidParameter("calibration sample size must be positive".into()));
    }
    use rand::{Rng, SeedableRng};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(0x5eed);
    let ends: Vec<u64> = (0..sample_size).map(|_| rng.random()).collect();
    let ids: Vec<u32> = (0..sample_size as u32).collect();
    let mut out: Vec<u32> = Vec::with_capacity(sample_size);
    let rounds = (16_000_000 / sample_size).clamp(5, 4000);

    let cmp = |out: &mut Vec<u32>| {
        let q = black_box(u64::MAX / 2);
        for (&e, &id) in ends.iter().zip(&ids) {
            if q <= e {
                out.push(black_box(id));
            }
        }
    };
    let acc = |out: &mut Vec<u32>| {
        for &id in &ids {
            out.push(black_box(id));
        }
    };
    // Alternate the two loops so both see the same machine state.
    let (mut t_cmp, mut t_acc) = (f64::INFINITY, f64::INFINITY);
    for _ in 0..rounds {
        for (f, best) in [(&cmp as &dyn Fn(&mut Vec<u32>), &mut t_cmp), (&acc, &mut t_acc)] {
            out.clear();
            let t = Instant::now();
            f(&mut out);
            *best = best.min(t.elapsed().as_secs_f64());
            black_box(&out);
        }
    }
    let per = |t: f64| (t / sample_size as f64).max(1e-12);
    CostCoefficients::new(per(t_cmp), per(t_acc))
}
