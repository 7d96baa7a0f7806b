//! Scalar signal-condition measures: approximate entropy, the kurtosis
//! index, the SIMI health indicator, Pearson correlation and mode energy.
//!
//! SIMI (approximate entropy over kurtosis index) is small when a signal is
//! both regular and impulsive, which is exactly the signature of a
//! fault-excited mode; it drives both decomposition-parameter tuning and
//! mode selection.

use crate::error::{CoreError, Result};
use crate::signal::Signal;

/// Settings for approximate entropy.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct IndicatorConfig {
    /// Pattern length (embedding dimension) m.
    pub embedding: usize,
    /// Similarity tolerance as a multiple of the sample standard deviation.
    pub tolerance_factor: f64,
}

impl Default for IndicatorConfig {
    fn default() -> Self {
        // the classic Pincus settings
        Self {
            embedding: 2,
            tolerance_factor: 0.2,
        }
    }
}

impl IndicatorConfig {
    pub fn validate(&self) -> Result<()> {
        if self.embedding < 1 {
            return Err(CoreError::InvalidConfig("embedding must be >= 1".into()));
        }
        if self.tolerance_factor.is_nan() || self.tolerance_factor <= 0.0 {
            return Err(CoreError::InvalidConfig(
                "tolerance_factor must be positive".into(),
            ));
        }
        Ok(())
    }
}

/// Mean ln of the per-window match frequency at pattern length `k`.
///
/// Self-matches are included, so every count is at least one and the log is
/// always defined. Candidate pairs are pruned through a grid over the first
/// two window coordinates (cell width r); a matching pair always lands in
/// adjacent cells, so the counts equal the plain double loop exactly.
fn phi(xs: &[f64], k: usize, r: f64) -> f64 {
    let windows = xs.len() - k + 1;
    let mut counts = vec![1u64; windows]; // self-match
    let two_d = k >= 2;
    let cell = |i: usize| -> (i64, i64) {
        let a = (xs[i] / r).floor() as i64;
        let b = if two_d {
            (xs[i + 1] / r).floor() as i64
        } else {
            0
        };
        (a, b)
    };
    let mut grid: std::collections::HashMap<(i64, i64), Vec<u32>> =
        std::collections::HashMap::new();
    for i in 0..windows {
        grid.entry(cell(i)).or_default().push(i as u32);
    }
    let db = if two_d { 1i64 } else { 0 };
    for i in 0..windows {
        let (ca, cb) = cell(i);
        for da in -1..=1i64 {
            for off_b in -db..=db {
                let Some(bucket) = grid.get(&(ca + da, cb + off_b)) else {
                    continue;
                };
                'pair: for &j in bucket {
                    let j = j as usize;
                    if j <= i {
                        continue;
                    }
                    for t in 0..k {
                        if (xs[i + t] - xs[j + t]).abs() > r {
                            continue 'pair;
                        }
                    }
                    counts[i] += 1;
                    counts[j] += 1;
                }
            }
        }
    }
    counts
        .iter()
        .map(|&c| (c as f64 / windows as f64).ln())
        .sum::<f64>()
        / windows as f64
}

/// Approximate entropy: the likelihood that patterns close at length m stay
/// close at length m+1, with Chebyshev window distance, self-matches
/// included and natural logarithms.
///
/// The tolerance is `tolerance_factor` times the (population) standard
/// deviation of the samples, so the statistic is invariant under positive
/// rescaling of the signal. A constant signal yields exactly zero.
pub fn approx_entropy(x: &Signal, cfg: &IndicatorConfig) -> Result<f64> {
    cfg.validate()?;
    let xs = x.samples();
    let n = xs.len();
    let m = cfg.embedding;
    if n < m + 2 {
        return Err(CoreError::SignalTooShort {
            needed: m + 2,
            got: n,
        });
    }
    let mean = xs.iter().sum::<f64>() / n as f64;
    let var = xs.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / n as f64;
    let r = cfg.tolerance_factor * var.sqrt();
    if r == 0.0 {
        // zero deviation means a constant signal: every window matches every
        // other at both lengths, so both averages vanish
        return Ok(0.0);
    }
    Ok(phi(xs, m, r) - phi(xs, m + 1, r))
}

/// Kurtosis index: fourth-moment ratio `mean(x^4) / mean(x^2)^2` without
/// mean subtraction. High for impulsive signals; exactly 1 for any nonzero
/// constant, 1.5 for a sine, 3 for Gaussian noise.
pub fn kurtosis_index(x: &Signal) -> Result<f64> {
    let xs = x.samples();
    if xs.iter().all(|&v| v == 0.0) {
        return Err(CoreError::DegenerateSignal(
            "kurtosis index of an all-zero signal".into(),
        ));
    }
    let n = xs.len() as f64;
    let m2 = xs.iter().map(|v| v * v).sum::<f64>() / n;
    let m4 = xs.iter().map(|v| v * v * v * v).sum::<f64>() / n;
    Ok(m4 / (m2 * m2))
}

/// The SIMI health indicator: approximate entropy divided by the kurtosis
/// index. Smaller values indicate better combined sparsity and impulsiveness.
pub fn simi(x: &Signal, cfg: &IndicatorConfig) -> Result<f64> {
    let ki = kurtosis_index(x)?;
    let apen = approx_entropy(x, cfg)?;
    Ok(apen / ki)
}

/// Standard Pearson correlation of two equal-length sample sequences.
pub fn pearson_cc(a: &Signal, b: &Signal) -> Result<f64> {
    let (xa, xb) = (a.samples(), b.samples());
    if xa.len() != xb.len() {
        return Err(CoreError::InvalidArgument(format!(
            "length mismatch: {} vs {}",
            xa.len(),
            xb.len()
        )));
    }
    if xa.len() < 2 {
        return Err(CoreError::SignalTooShort {
            needed: 2,
            got: xa.len(),
        });
    }
    let n = xa.len() as f64;
    let (ma, mb) = (xa.iter().sum::<f64>() / n, xb.iter().sum::<f64>() / n);
    let (mut cov, mut va, mut vb) = (0.0, 0.0, 0.0);
    for (&u, &v) in xa.iter().zip(xb.iter()) {
        let (du, dv) = (u - ma, v - mb);
        cov += du * dv;
        va += du * du;
        vb += dv * dv;
    }
    if va == 0.0 || vb == 0.0 {
        return Err(CoreError::DegenerateSignal(
            "correlation of a constant signal".into(),
        ));
    }
    Ok(cov / (va.sqrt() * vb.sqrt()))
}

/// L2 mode energy `sum(x^2)`.
pub fn mode_energy(x: &Signal) -> f64 {
    x.samples().iter().map(|v| v * v).sum()
}
