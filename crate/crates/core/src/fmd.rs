//! Feature mode decomposition: a Hann-windowed FIR filter bank is driven
//! toward impulsive, periodic components by correlated-kurtosis
//! deconvolution, then reduced to the requested mode count by merging the
//! most correlated pair and keeping the member with the higher correlated
//! kurtosis.
//!
//! The per-filter update is the fixed-point step of first-shift correlated
//! kurtosis deconvolution. The originating method names the update but does
//! not print its equations; this reconstruction follows the established
//! deconvolution convention (solve the input-autocorrelation normal
//! equations against the kurtosis gradient weights and renormalize).

use crate::error::{CoreError, Result};
use crate::indicators::pearson_cc;
use crate::signal::{autocorr, convolve_valid, estimate_period, hann_window, FirFilter, Signal};

/// Default relative ridge added to the normal equations, scaled by
/// `trace(A)/L`.
pub const DEFAULT_RIDGE: f64 = 1e-8;

/// Default number of initial filters; raised to the mode count when the
/// requested count exceeds it.
pub const DEFAULT_INIT_FILTERS: usize = 7;

/// Default update sweeps per reduction cycle.
pub const DEFAULT_MAX_ITER: usize = 20;

/// Decomposition settings.
#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct FmdConfig {
    /// Number of modes to return (K), in [3, 8].
    pub mode_count: usize,
    /// Filter length (L) in taps, in [20, 50].
    pub filter_len: usize,
    /// Initial filter bank size (M), in [max(5, K), 10].
    pub init_filters: usize,
    /// Update sweeps per reduction cycle.
    pub max_iter: usize,
    /// Relative ridge regularizer; the solve adds `ridge * trace(A)/L` to
    /// the diagonal of the normal equations.
    pub ridge: f64,
    /// Smallest lag considered when estimating a mode period.
    pub min_period_lag: usize,
    /// Enforce the standard parameter domains (K in [3,8], L in [20,50],
    /// M in [max(5,K), 10]). Off, only structural requirements are checked;
    /// meant for explicit out-of-domain experiments.
    #[serde(default = "default_true")]
    pub enforce_domain: bool,
}

fn default_true() -> bool {
    true
}

impl FmdConfig {
    /// Config with the given mode count and filter length and default
    /// everything else (M = max(7, K), 20 sweeps, relative ridge 1e-8,
    /// minimum period lag = L).
    pub fn new(mode_count: usize, filter_len: usize) -> Self {
        Self {
            mode_count,
            filter_len,
            init_filters: DEFAULT_INIT_FILTERS.max(mode_count),
            max_iter: DEFAULT_MAX_ITER,
            ridge: DEFAULT_RIDGE,
            min_period_lag: filter_len,
            enforce_domain: true,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.enforce_domain {
            if !(3..=8).contains(&self.mode_count) {
                return Err(CoreError::InvalidConfig(format!(
                    "mode_count must lie in [3, 8], got {}",
                    self.mode_count
                )));
            }
            if !(20..=50).contains(&self.filter_len) {
                return Err(CoreError::InvalidConfig(format!(
                    "filter_len must lie in [20, 50], got {}",
                    self.filter_len
                )));
            }
            let m_lo = self.mode_count.max(5);
            if !(m_lo..=10).contains(&self.init_filters) {
                return Err(CoreError::InvalidConfig(format!(
                    "init_filters must lie in [{m_lo}, 10], got {}",
                    self.init_filters
                )));
            }
        }
        if self.mode_count < 1 || self.filter_len < 2 {
            return Err(CoreError::InvalidConfig(
                "mode_count and filter_len must be positive (filter_len >= 2)".into(),
            ));
        }
        if self.init_filters < self.mode_count {
            return Err(CoreError::InvalidConfig(format!(
                "init_filters {} below mode_count {}",
                self.init_filters, self.mode_count
            )));
        }
        if self.max_iter < 1 {
            return Err(CoreError::InvalidConfig("max_iter must be >= 1".into()));
        }
        if self.ridge.is_nan() || self.ridge <= 0.0 {
            return Err(CoreError::InvalidConfig("ridge must be positive".into()));
        }
        if self.min_period_lag < 1 {
            return Err(CoreError::InvalidConfig(
                "min_period_lag must be >= 1".into(),
            ));
        }
        Ok(())
    }
}

/// One decomposed mode: the filtered samples, the generating filter, the
/// estimated fault period and the correlated kurtosis at that period.
#[derive(Debug, Clone)]
pub struct Mode {
    pub samples: Signal,
    pub filter: FirFilter,
    pub period: usize,
    pub ck: f64,
}

/// A merge decision: the surviving and dropped filter (by initial bank
/// index) and the correlation that triggered the merge.
#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct MergeEvent {
    pub kept: usize,
    pub dropped: usize,
    pub cc: f64,
}

/// Log entry for one reduction cycle: the sweeps run, the live filters (by
/// initial bank index), their correlated kurtosis after the sweeps, and the
/// merge performed (absent on the final cycle).
#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct CycleRecord {
    pub sweeps: usize,
    pub filter_ids: Vec<usize>,
    pub ck: Vec<f64>,
    pub merge: Option<MergeEvent>,
}

/// Result of a full decomposition: exactly K modes plus the cycle log.
#[derive(Debug, Clone)]
pub struct DecompositionResult {
    pub modes: Vec<Mode>,
    pub cycles: Vec<CycleRecord>,
}

/// Build the initial bank of `m` Hann-windowed band-pass filters of `l`
/// taps splitting `[0, sample_rate/2]` uniformly.
///
/// Band m spans `[m fs/(2M), (m+1) fs/(2M)]`; the taps are the difference
/// of sinc kernels at the band edges, windowed and scaled to unit L2 norm.
/// The design insets each cutoff by a tiny fraction of the band width so
/// the extreme bands keep a band-pass character instead of degenerating
/// into an all-pass tap pattern.
pub fn init_filter_bank(m: usize, l: usize, sample_rate: f64) -> Result<Vec<FirFilter>> {
    if m < 1 {
        return Err(CoreError::InvalidArgument(
            "need at least one filter".into(),
        ));
    }
    if sample_rate.is_nan() || sample_rate <= 0.0 {
        return Err(CoreError::InvalidArgument(
            "sample_rate must be positive".into(),
        ));
    }
    let window = hann_window(l)?; // also rejects l < 2
    let alpha = (l - 1) as f64 / 2.0;
    let band_width = 0.5 / m as f64; // in cycles per sample
    let inset = band_width * 1e-4;

    // sin(pi x)/(pi x), continuous at zero
    let sinc = |x: f64| {
        if x == 0.0 {
            1.0
        } else {
            (std::f64::consts::PI * x).sin() / (std::f64::consts::PI * x)
        }
    };

    let mut bank = Vec::with_capacity(m);
    for band in 0..m {
        let f_lo = band as f64 * band_width + inset;
        let f_hi = (band + 1) as f64 * band_width - inset;
        let taps: Vec<f64> = window
            .iter()
            .enumerate()
            .map(|(k, w)| {
                let x = k as f64 - alpha;
                w * (2.0 * f_hi * sinc(2.0 * f_hi * x) - 2.0 * f_lo * sinc(2.0 * f_lo * x))
            })
            .collect();
        let edges = (
            band as f64 * band_width * sample_rate,
            (band + 1) as f64 * band_width * sample_rate,
        );
        bank.push(FirFilter::with_band(taps, Some(edges))?.unit_norm());
    }
    Ok(bank)
}

/// Correlated kurtosis of `x` at period `t` with the given shift order:
/// `CK_M(T) = sum_{n >= MT} (prod_{m=0..M} x[n - mT])^2 / (sum x^2)^{M+1}`.
///
/// Rewards impulses repeating at exactly the period; an impulse train
/// evaluated at a misaligned period scores zero.
pub fn correlated_kurtosis(x: &Signal, t: usize, shift_order: usize) -> Result<f64> {
    if t < 1 {
        return Err(CoreError::InvalidArgument("period must be >= 1".into()));
    }
    if shift_order < 1 {
        return Err(CoreError::InvalidArgument(
            "shift_order must be >= 1".into(),
        ));
    }
    let xs = x.samples();
    let n = xs.len();
    if n <= shift_order * t {
        return Err(CoreError::SignalTooShort {
            needed: shift_order * t + 1,
            got: n,
        });
    }
    let energy: f64 = xs.iter().map(|v| v * v).sum();
    if energy == 0.0 {
        return Err(CoreError::DegenerateSignal(
            "correlated kurtosis of an all-zero signal".into(),
        ));
    }
    let mut num = 0.0;
    for i in (shift_order * t)..n {
        let mut prod = xs[i];
        for m in 1..=shift_order {
            prod *= xs[i - m * t];
        }
        num += prod * prod;
    }
    Ok(num / energy.powi(shift_order as i32 + 1))
}

/// Normal-equation matrix `A[i][j] = sum_{m=L-1-i}^{N-1-i} x[m] x[m+i-j]`
/// (i >= j), assembled diagonal by diagonal: one vectorized dot product per
/// lag, then O(1) sliding-window updates along the diagonal. O(NL + L^2).
fn input_normal_matrix(xs: &[f64], l: usize) -> Vec<Vec<f64>> {
    let n = xs.len();
    let nu = n - l + 1;
    let dot = |a: &[f64], b: &[f64]| a.iter().zip(b).map(|(x, y)| x * y).sum::<f64>();
    let mut a = vec![vec![0.0; l]; l];
    for d in 0..l {
        // head of the diagonal: (i, j) = (d, 0)
        let mut v = dot(&xs[l - 1 - d..l - 1 - d + nu], &xs[l - 1..l - 1 + nu]);
        a[d][0] = v;
        a[0][d] = v;
        for j in 1..(l - d) {
            let i = d + j;
            // window slides one sample toward the front
            v += xs[l - 1 - i] * xs[l - 1 - i + d] - xs[n - i] * xs[n - i + d];
            a[i][j] = v;
            a[j][i] = v;
        }
    }
    a
}

/// One correlated-kurtosis deconvolution update of the filter at period
/// `t`: form the gradient weights from the current mode, solve the
/// ridge-regularized input normal equations and renormalize.
///
/// `ridge` is relative; the diagonal loading is `ridge * trace(A)/L`. A
/// vanishing right-hand side (the update has no direction, e.g. a zero-DC
/// filter driven by a constant input) returns the input filter unchanged.
pub fn mckd_update_step(x: &Signal, f: &FirFilter, t: usize, ridge: f64) -> Result<FirFilter> {
    if t < 1 {
        return Err(CoreError::InvalidArgument("period must be >= 1".into()));
    }
    if ridge.is_nan() || ridge <= 0.0 {
        return Err(CoreError::InvalidArgument("ridge must be positive".into()));
    }
    let l = f.len();
    let xs = x.samples();
    let n = xs.len();
    if n < l + t {
        return Err(CoreError::SignalTooShort {
            needed: l + t,
            got: n,
        });
    }

    let f = f.unit_norm();
    let u = convolve_valid(x, &f)?;
    let us = u.samples();
    let nu = us.len();

    // gradient weights, zero where the delayed index underflows
    let mut alpha0 = vec![0.0; nu];
    let mut alpha1 = vec![0.0; nu];
    for i in t..nu {
        alpha0[i] = us[i] * us[i - t] * us[i - t];
        alpha1[i] = us[i] * us[i] * us[i - t];
    }

    let a = input_normal_matrix(xs, l);

    // b = X0 alpha0 + XT alpha1, assembled from slice dot products
    let dot = |a: &[f64], b: &[f64]| a.iter().zip(b).map(|(x, y)| x * y).sum::<f64>();
    let mut b = vec![0.0; l];
    for (lag, bl) in b.iter_mut().enumerate() {
        let off = l - 1 - lag;
        let mut acc = dot(&xs[off..off + nu], &alpha0);
        // the delayed copy only overlaps where i + off >= t
        let start = t.saturating_sub(off);
        if start < nu {
            acc += dot(&xs[start + off - t..nu + off - t], &alpha1[start..nu]);
        }
        *bl = acc;
    }

    let trace: f64 = (0..l).map(|i| a[i][i]).sum();
    let mut loading = ridge * trace / l as f64;
    if loading <= 0.0 {
        loading = ridge;
    }

    // Cholesky with escalating ridge if rounding spoils definiteness
    for attempt in 0..4 {
        let boost = 10f64.powi(attempt);
        if let Some(sol) = cholesky_solve(&a, &b, loading * boost) {
            let norm = sol.iter().map(|v| v * v).sum::<f64>().sqrt();
            if norm == 0.0 || !norm.is_finite() {
                return Ok(f.clone());
            }
            let taps: Vec<f64> = sol.iter().map(|v| v / norm).collect();
            return FirFilter::new(taps).map(|nf| nf.unit_norm());
        }
    }
    Err(CoreError::NumericalFailure(
        "normal-equation solve failed despite ridge escalation".into(),
    ))
}

/// Solve (A + loading I) x = b for symmetric A via Cholesky. Returns None
/// if the loaded matrix is not numerically positive definite.
fn cholesky_solve(a: &[Vec<f64>], b: &[f64], loading: f64) -> Option<Vec<f64>> {
    let l = a.len();
    let mut chol = vec![vec![0.0; l]; l];
    for i in 0..l {
        for j in 0..=i {
            let mut sum = a[i][j];
            if i == j {
                sum += loading;
            }
            for k in 0..j {
                sum -= chol[i][k] * chol[j][k];
            }
            if i == j {
                if sum.is_nan() || sum <= 0.0 || !sum.is_finite() {
                    return None;
                }
                chol[i][j] = sum.sqrt();
            } else {
                chol[i][j] = sum / chol[j][j];
            }
        }
    }
    // forward then back substitution
    let mut y = vec![0.0; l];
    for i in 0..l {
        let mut sum = b[i];
        for k in 0..i {
            sum -= chol[i][k] * y[k];
        }
        y[i] = sum / chol[i][i];
    }
    let mut x = vec![0.0; l];
    for i in (0..l).rev() {
        let mut sum = y[i];
        for k in (i + 1)..l {
            sum -= chol[k][i] * x[k];
        }
        x[i] = sum / chol[i][i];
    }
    if x.iter().all(|v| v.is_finite()) {
        Some(x)
    } else {
        None
    }
}

/// Period of a mode: first-zero-crossing-then-maximum of its normalized
/// autocorrelation, falling back to the plain autocorrelation maximum at
/// lags >= `min_lag` when no crossing exists (noise-only modes).
fn mode_period(u: &Signal, min_lag: usize) -> Result<usize> {
    let r = autocorr(u)?;
    match estimate_period(&r, min_lag) {
        Ok(t) => Ok(t),
        Err(CoreError::NoPeriodicity) => {
            let mut best = min_lag;
            for tau in min_lag..r.len() {
                if r[tau] > r[best] {
                    best = tau;
                }
            }
            Ok(best)
        }
        Err(e) => Err(e),
    }
}

/// Absolute Pearson correlation between two mode outputs; a constant mode
/// carries no correlation and pairs with everything at zero.
fn merge_correlation(a: &Signal, b: &Signal) -> Result<f64> {
    match pearson_cc(a, b) {
        Ok(cc) => Ok(cc.abs()),
        Err(CoreError::DegenerateSignal(_)) => Ok(0.0),
        Err(e) => Err(e),
    }
}

/// Decompose a signal into exactly `cfg.mode_count` modes.
///
/// Each reduction cycle runs `max_iter` sweeps (per live filter: filter the
/// signal, estimate the period from the autocorrelation, apply one
/// deconvolution update), then drops one member of the most correlated mode
/// pair — the one with the smaller correlated kurtosis at its own period —
/// until the bank has shrunk to the requested count. Deterministic: no
/// randomness anywhere.
pub fn fmd_decompose(x: &Signal, cfg: &FmdConfig) -> Result<DecompositionResult> {
    cfg.validate()?;
    let l = cfg.filter_len;
    if x.len() < 4 * l {
        return Err(CoreError::SignalTooShort {
            needed: 4 * l,
            got: x.len(),
        });
    }
    if cfg.min_period_lag >= x.len() - l {
        return Err(CoreError::InvalidConfig(format!(
            "min_period_lag {} leaves no searchable lags for modes of length {}",
            cfg.min_period_lag,
            x.len() - l + 1
        )));
    }

    let bank = init_filter_bank(cfg.init_filters, l, x.sample_rate())?;
    let mut live: Vec<(usize, FirFilter)> = bank.into_iter().enumerate().collect();
    let mut cycles = Vec::new();

    loop {
        for _ in 0..cfg.max_iter {
            for (_, filter) in live.iter_mut() {
                let u = convolve_valid(x, filter)?;
                let t = mode_period(&u, cfg.min_period_lag)?;
                *filter = mckd_update_step(x, filter, t, cfg.ridge)?;
            }
        }

        // final state of this cycle
        let mut states = Vec::with_capacity(live.len());
        for (id, filter) in live.iter() {
            let u = convolve_valid(x, filter)?;
            let t = mode_period(&u, cfg.min_period_lag)?;
            let ck = correlated_kurtosis(&u, t, 1)?;
            states.push((*id, u, t, ck));
        }

        let mut record = CycleRecord {
            sweeps: cfg.max_iter,
            filter_ids: states.iter().map(|s| s.0).collect(),
            ck: states.iter().map(|s| s.3).collect(),
            merge: None,
        };

        if live.len() == cfg.mode_count {
            cycles.push(record);
            let modes = states
                .into_iter()
                .zip(live)
                .map(|((_, u, t, ck), (_, filter))| Mode {
                    samples: u,
                    filter,
                    period: t,
                    ck,
                })
                .collect();
            return Ok(DecompositionResult { modes, cycles });
        }

        // most redundant pair by |CC| of mode outputs
        let (mut best_i, mut best_j, mut best_cc) = (0, 1, -1.0);
        for i in 0..states.len() {
            for j in (i + 1)..states.len() {
                let cc = merge_correlation(&states[i].1, &states[j].1)?;
                if cc > best_cc {
                    (best_i, best_j, best_cc) = (i, j, cc);
                }
            }
        }
        let drop_pos = if states[best_i].3 >= states[best_j].3 {
            best_j
        } else {
            best_i
        };
        let keep_pos = if drop_pos == best_i { best_j } else { best_i };
        record.merge = Some(MergeEvent {
            kept: states[keep_pos].0,
            dropped: states[drop_pos].0,
            cc: best_cc,
        });
        cycles.push(record);
        live.remove(drop_pos);
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn impulse_train(n: usize, period: usize, offset: usize) -> Vec<f64> {
        let mut x = vec![0.0; n];
        let mut k = offset;
        while k < n {
            x[k] = 1.0;
            k += period;
        }
        x
    }

    fn sig(samples: Vec<f64>, fs: f64) -> Signal {
        Signal::new(samples, fs).unwrap()
    }

    // ---- init_filter_bank ----------------------------------------------------

    #[test]
    fn single_band_filter_is_bandpass_not_allpass() {
        let fs = 19_200.0;
        let bank = init_filter_bank(1, 21, fs).unwrap();
        let f = &bank[0];
        let mid = f.response_magnitude(fs / 4.0, fs);
        let dc = f.response_magnitude(0.0, fs);
        let nyq = f.response_magnitude(fs / 2.0, fs);
        assert!(mid > dc, "mid {mid} vs dc {dc}");
        assert!(mid > nyq, "mid {mid} vs nyquist {nyq}");
    }

    #[test]
    fn two_band_edges_partition_uniformly() {
        let fs = 19_200.0;
        let bank = init_filter_bank(2, 21, fs).unwrap();
        assert_eq!(bank[0].band(), Some((0.0, fs / 4.0)));
        assert_eq!(bank[1].band(), Some((fs / 4.0, fs / 2.0)));
    }

    #[test]
    fn band_three_of_seven_peaks_inside_its_band() {
        let fs = 19_200.0;
        let bank = init_filter_bank(7, 30, fs).unwrap();
        let f = &bank[3];
        let mut best = (0.0, 0.0);
        let mut freq = 0.0;
        while freq <= fs / 2.0 {
            let m = f.response_magnitude(freq, fs);
            if m > best.1 {
                best = (freq, m);
            }
            freq += 1.0;
        }
        assert!(
            best.0 >= 4114.3 && best.0 <= 5485.7,
            "argmax at {} Hz",
            best.0
        );
    }

    #[test]
    fn bank_filters_are_unit_norm() {
        for f in init_filter_bank(5, 20, 8000.0).unwrap() {
            assert!((f.l2_norm() - 1.0).abs() < 1e-12);
        }
    }

    // ---- correlated_kurtosis ----------------------------------------------------

    #[test]
    fn ck_closed_form_on_impulse_train() {
        // 20 impulses spaced exactly T: each aligned product contributes 1,
        // the denominator is J^2
        let t = 37;
        let x = impulse_train(20 * t, t, 2);
        assert_eq!(x.iter().filter(|&&v| v != 0.0).count(), 20);
        let ck = correlated_kurtosis(&sig(x.clone(), 1000.0), t, 1).unwrap();
        assert!((ck - 19.0 / 400.0).abs() < 1e-12, "ck = {ck}");
        // misaligned period: no products survive
        let ck_off = correlated_kurtosis(&sig(x, 1000.0), t + 3, 1).unwrap();
        assert_eq!(ck_off, 0.0);
    }

    #[test]
    fn ck_constant_signal_closed_form() {
        let n = 500;
        let t = 40;
        let ck = correlated_kurtosis(&sig(vec![2.0; n], 1000.0), t, 1).unwrap();
        let expect = (n - t) as f64 / (n as f64 * n as f64);
        assert!((ck - expect).abs() < 1e-15, "{ck} vs {expect}");
    }

    #[test]
    fn ck_rejects_degenerate_inputs() {
        assert!(matches!(
            correlated_kurtosis(&sig(vec![0.0; 100], 1.0), 10, 1),
            Err(CoreError::DegenerateSignal(_))
        ));
        assert!(matches!(
            correlated_kurtosis(&sig(vec![1.0; 10], 1.0), 10, 1),
            Err(CoreError::SignalTooShort { .. })
        ));
        assert!(correlated_kurtosis(&sig(vec![1.0; 10], 1.0), 0, 1).is_err());
    }

    #[test]
    fn ck_higher_shift_orders() {
        let t = 25;
        let x = impulse_train(20 * t, t, 1);
        let j = 20.0f64;
        // shift order 2: products need three aligned impulses
        let ck2 = correlated_kurtosis(&sig(x, 1000.0), t, 2).unwrap();
        assert!((ck2 - (j - 2.0) / j.powi(3)).abs() < 1e-12);
    }

    // ---- mckd_update_step ----------------------------------------------------

    #[test]
    fn normal_matrix_matches_direct_summation() {
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        let xs: Vec<f64> = (0..300).map(|_| rng.random_range(-1.0..1.0)).collect();
        let l = 12;
        let a = input_normal_matrix(&xs, l);
        let n = xs.len();
        for i in 0..l {
            for j in 0..l {
                let (p, q) = (l - 1 - i, l - 1 - j);
                let direct: f64 = (0..=(n - l)).map(|m| xs[m + p] * xs[m + q]).sum();
                assert!(
                    (a[i][j] - direct).abs() < 1e-9 * direct.abs().max(1.0),
                    "A[{i}][{j}] = {} vs {direct}",
                    a[i][j]
                );
            }
        }
    }

    #[test]
    fn delta_filter_is_a_fixed_point_on_periodic_impulses() {
        let t = 40;
        let l = 21;
        let x = sig(impulse_train(2000, t, 0), 1000.0);
        let mut taps = vec![0.0; l];
        taps[l / 2] = 1.0;
        let delta = FirFilter::new(taps.clone()).unwrap();
        let updated = mckd_update_step(&x, &delta, t, DEFAULT_RIDGE).unwrap();
        let dot: f64 = updated
            .taps()
            .iter()
            .zip(taps.iter())
            .map(|(a, b)| a * b)
            .sum();
        let angle = dot.abs().min(1.0).acos();
        assert!(angle < 0.1, "angle from delta: {angle} rad");
        assert!((updated.l2_norm() - 1.0).abs() < 1e-9);
    }

    #[test]
    fn constant_input_is_regularized_not_fatal() {
        let x = sig(vec![1.0; 400], 1000.0);
        let taps = hann_window(21).unwrap();
        let f = FirFilter::new(taps).unwrap().unit_norm();
        let updated = mckd_update_step(&x, &f, 17, DEFAULT_RIDGE).unwrap();
        assert!((updated.l2_norm() - 1.0).abs() < 1e-9);
        assert!(updated.taps().iter().all(|v| v.is_finite()));
    }

    #[test]
    fn update_step_increases_ck_on_noisy_impulse_train() {
        let t = 50;
        let l = 20;
        let n = 3000;
        let mut ascents = 0;
        for seed in 0..50u64 {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let mut x = impulse_train(n, t, 3);
            // SNR 0 dB against the impulse train: power 1/T per sample
            let noise_std = (1.0 / t as f64).sqrt();
            for v in x.iter_mut() {
                let z: f64 = rng.sample(rand_distr::StandardNormal);
                *v += noise_std * z;
            }
            let x = sig(x, 1000.0);
            let taps: Vec<f64> = (0..l).map(|_| rng.random_range(-1.0..1.0)).collect();
            let f0 = FirFilter::new(taps).unwrap().unit_norm();
            let before = correlated_kurtosis(&convolve_valid(&x, &f0).unwrap(), t, 1).unwrap();
            let f1 = mckd_update_step(&x, &f0, t, DEFAULT_RIDGE).unwrap();
            let after = correlated_kurtosis(&convolve_valid(&x, &f1).unwrap(), t, 1).unwrap();
            if after >= before {
                ascents += 1;
            }
        }
        assert!(ascents >= 45, "CK ascended in only {ascents}/50 seeds");
    }

    // ---- fmd_decompose ----------------------------------------------------

    fn fault_mixture(seed: u64) -> Signal {
        // spec scenario: 4.45 Hz impulse train ringing at 3 kHz + strong
        // 50 Hz sine + noise at 19.2 kHz
        let fs = 19_200.0;
        let n = 48_000;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut x = vec![0.0f64; n];
        let period = fs / 4.45;
        let mut t0 = period / 2.0;
        while t0 < n as f64 {
            let start = t0.ceil() as usize;
            for k in start..(start + 600).min(n) {
                let dt = (k as f64 - t0) / fs;
                x[k] +=
                    4.0 * (-800.0 * dt).exp() * (2.0 * std::f64::consts::PI * 3000.0 * dt).sin();
            }
            t0 += period;
        }
        for (k, v) in x.iter_mut().enumerate() {
            *v += 2.0 * (2.0 * std::f64::consts::PI * 50.0 * k as f64 / fs).sin();
            let z: f64 = rng.sample(rand_distr::StandardNormal);
            *v += 0.3 * z;
        }
        Signal::new(x, fs).unwrap()
    }

    #[test]
    fn recovers_fault_period_from_mixture() {
        let x = fault_mixture(1);
        let cfg = FmdConfig {
            init_filters: 5,
            ..FmdConfig::new(3, 30)
        };
        let result = fmd_decompose(&x, &cfg).unwrap();
        assert_eq!(result.modes.len(), 3);
        let target = (19_200.0 / 4.45_f64).round() as i64; // 4315
        let found = result
            .modes
            .iter()
            .any(|m| (m.period as i64 - target).abs() <= 2);
        let periods: Vec<usize> = result.modes.iter().map(|m| m.period).collect();
        assert!(found, "no mode near period {target}, got {periods:?}");
    }

    #[test]
    fn m_equal_k_skips_reduction() {
        let x = fault_mixture(2);
        let cfg = FmdConfig {
            init_filters: 5,
            max_iter: 3,
            ..FmdConfig::new(5, 20)
        };
        let result = fmd_decompose(&x, &cfg).unwrap();
        assert_eq!(result.modes.len(), 5);
        assert_eq!(result.cycles.len(), 1);
        assert!(result.cycles[0].merge.is_none());
    }

    #[test]
    fn k_above_m_is_invalid() {
        let x = fault_mixture(3);
        let cfg = FmdConfig {
            init_filters: 5,
            ..FmdConfig::new(6, 20)
        };
        assert!(matches!(
            fmd_decompose(&x, &cfg),
            Err(CoreError::InvalidConfig(_))
        ));
    }

    #[test]
    fn reduction_runs_expected_number_of_cycles() {
        let x = fault_mixture(4);
        let cfg = FmdConfig {
            init_filters: 6,
            max_iter: 2,
            ..FmdConfig::new(3, 20)
        };
        let result = fmd_decompose(&x, &cfg).unwrap();
        // (M - K + 1) cycles of max_iter sweeps each
        assert_eq!(result.cycles.len(), 4);
        assert!(result.cycles[..3].iter().all(|c| c.merge.is_some()));
        assert!(result.cycles[3].merge.is_none());
    }

    #[test]
    fn modes_satisfy_structural_invariants() {
        let x = fault_mixture(5);
        let cfg = FmdConfig {
            init_filters: 5,
            max_iter: 5,
            ..FmdConfig::new(3, 25)
        };
        let result = fmd_decompose(&x, &cfg).unwrap();
        for mode in &result.modes {
            assert!((mode.filter.l2_norm() - 1.0).abs() < 1e-9);
            assert_eq!(mode.samples.len(), x.len() - 25 + 1);
            assert!(mode.period >= 1);
            assert!(mode.ck >= 0.0);
            let recomputed = correlated_kurtosis(&mode.samples, mode.period, 1).unwrap();
            assert_eq!(mode.ck, recomputed);
        }
    }

    #[test]
    fn decomposition_is_deterministic() {
        let x = fault_mixture(6);
        let cfg = FmdConfig {
            init_filters: 5,
            max_iter: 3,
            ..FmdConfig::new(3, 20)
        };
        let a = fmd_decompose(&x, &cfg).unwrap();
        let b = fmd_decompose(&x, &cfg).unwrap();
        for (ma, mb) in a.modes.iter().zip(b.modes.iter()) {
            assert_eq!(ma.samples.samples(), mb.samples.samples());
            assert_eq!(ma.filter.taps(), mb.filter.taps());
            assert_eq!(ma.period, mb.period);
            assert_eq!(ma.ck, mb.ck);
        }
    }

    #[test]
    fn survivors_are_less_correlated_than_any_merged_pair() {
        // two well-separated sources: a low tone and a high ring train;
        // mode count 2 (below the standard domain, so domain checks off)
        let fs = 8000.0;
        let n = 16_000;
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        let mut x = vec![0.0f64; n];
        for (k, v) in x.iter_mut().enumerate() {
            *v += 1.5 * (2.0 * std::f64::consts::PI * 120.0 * k as f64 / fs).sin();
            let z: f64 = rng.sample(rand_distr::StandardNormal);
            *v += 0.2 * z;
        }
        let mut t0 = 400.0;
        while t0 < n as f64 {
            let start = t0 as usize;
            for k in start..(start + 200).min(n) {
                let dt = (k as f64 - t0) / fs;
                x[k] +=
                    3.0 * (-600.0 * dt).exp() * (2.0 * std::f64::consts::PI * 3100.0 * dt).sin();
            }
            t0 += 800.0;
        }
        let x = Signal::new(x, fs).unwrap();
        let cfg = FmdConfig {
            enforce_domain: false,
            init_filters: 5,
            max_iter: 5,
            ..FmdConfig::new(2, 30)
        };
        let result = fmd_decompose(&x, &cfg).unwrap();
        assert_eq!(result.modes.len(), 2);
        let surviving_cc = pearson_cc(&result.modes[0].samples, &result.modes[1].samples)
            .unwrap()
            .abs();
        let merged_ccs: Vec<f64> = result
            .cycles
            .iter()
            .filter_map(|c| c.merge.as_ref().map(|m| m.cc))
            .collect();
        assert_eq!(merged_ccs.len(), 3);
        let min_merged = merged_ccs.iter().fold(f64::INFINITY, |a, &b| a.min(b));
        assert!(
            surviving_cc < min_merged,
            "survivors |CC|={surviving_cc:.4} not below merged pairs {merged_ccs:?}"
        );
    }

    #[test]
    fn rejects_short_signals() {
        let x = sig(vec![1.0; 50], 1000.0);
        assert!(matches!(
            fmd_decompose(&x, &FmdConfig::new(3, 20)),
            Err(CoreError::SignalTooShort { .. })
        ));
    }

    #[test]
    fn config_bounds_are_enforced() {
        assert!(FmdConfig::new(2, 30).validate().is_err());
        assert!(FmdConfig::new(9, 30).validate().is_err());
        assert!(FmdConfig::new(5, 19).validate().is_err());
        assert!(FmdConfig::new(5, 51).validate().is_err());
        assert!(FmdConfig {
            init_filters: 11,
            ..FmdConfig::new(5, 30)
        }
        .validate()
        .is_err());
        assert!(FmdConfig {
            init_filters: 4,
            ..FmdConfig::new(3, 30)
        }
        .validate()
        .is_err());
        assert!(FmdConfig {
            ridge: 0.0,
            ..FmdConfig::new(5, 30)
        }
        .validate()
        .is_err());
        assert!(FmdConfig::new(5, 30).validate().is_ok());
    }

    #[test]
    fn relaxed_config_skips_domain_but_not_structure() {
        let out_of_domain = FmdConfig {
            enforce_domain: false,
            init_filters: 4,
            max_iter: 2,
            ..FmdConfig::new(4, 19)
        };
        assert!(out_of_domain.validate().is_ok());
        // mode count above bank size stays invalid
        assert!(FmdConfig {
            enforce_domain: false,
            init_filters: 3,
            ..FmdConfig::new(4, 30)
        }
        .validate()
        .is_err());
    }
}
