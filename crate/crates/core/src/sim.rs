//! Synthetic vibration data: bearing-fault records (exponentially damped
//! resonance rings at the fault repetition rate, plus shaft tone and noise)
//! and fractional Gaussian noise via circulant embedding.
//!
//! Both generators are deterministic given their seed.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rustfft::num_complex::Complex;

use crate::error::{CoreError, Result};
use crate::fft::fft_in_place;
use crate::signal::Signal;

/// Configuration of the bearing-fault simulator.
///
/// The model is the standard localized-defect signature: every time a
/// rolling element strikes the defect (repetition rate `fault_freq`, with
/// optional slip jitter on each gap), the structure rings at
/// `resonance_freq` and decays exponentially at `damping`. A shaft tone and
/// white Gaussian noise are superposed.
#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct BearingSimConfig {
    /// Sample rate in Hz.
    pub sample_rate: f64,
    /// Record length in seconds.
    pub duration: f64,
    /// Impulse repetition rate in Hz (e.g. a ball-pass frequency).
    pub fault_freq: f64,
    /// Structural ring frequency in Hz.
    pub resonance_freq: f64,
    /// Exponential decay rate of each ring, 1/s.
    pub damping: f64,
    /// Random perturbation of each inter-impulse gap, fraction in [0, 0.05].
    pub slip_jitter: f64,
    /// Peak amplitude of each impulse ring.
    pub impulse_amplitude: f64,
    /// Shaft rotation frequency in Hz.
    pub shaft_freq: f64,
    /// Amplitude of the shaft tone.
    pub shaft_amplitude: f64,
    /// Standard deviation of the additive white Gaussian noise.
    pub noise_std: f64,
    /// RNG seed.
    pub seed: u64,
}

impl Default for BearingSimConfig {
    fn default() -> Self {
        // frequencies anchored to a 19.2 kHz outer-race fault scenario
        Self {
            sample_rate: 19_200.0,
            duration: 2.5,
            fault_freq: 12.34,
            resonance_freq: 3000.0,
            damping: 800.0,
            slip_jitter: 0.01,
            impulse_amplitude: 3.0,
            shaft_freq: 25.0,
            shaft_amplitude: 1.0,
            noise_std: 0.5,
            seed: 0,
        }
    }
}

impl BearingSimConfig {
    pub fn validate(&self) -> Result<()> {
        if self.sample_rate.is_nan() || self.sample_rate <= 0.0 || !self.sample_rate.is_finite() {
            return Err(CoreError::InvalidConfig(
                "sample_rate must be positive".into(),
            ));
        }
        if self.fault_freq.is_nan() || self.fault_freq <= 0.0 {
            return Err(CoreError::InvalidConfig(
                "fault_freq must be positive".into(),
            ));
        }
        if !(self.fault_freq < self.resonance_freq && self.resonance_freq < self.sample_rate / 2.0)
        {
            return Err(CoreError::InvalidConfig(format!(
                "need fault_freq < resonance_freq < sample_rate/2, got {} / {} / {}",
                self.fault_freq,
                self.resonance_freq,
                self.sample_rate / 2.0
            )));
        }
        if self.duration * self.sample_rate < 1000.0 {
            return Err(CoreError::InvalidConfig(format!(
                "duration * sample_rate must be >= 1000 samples, got {}",
                self.duration * self.sample_rate
            )));
        }
        if !(0.0..=0.05).contains(&self.slip_jitter) {
            return Err(CoreError::InvalidConfig(
                "slip_jitter must lie in [0, 0.05]".into(),
            ));
        }
        if self.damping <= 0.0 {
            return Err(CoreError::InvalidConfig("damping must be positive".into()));
        }
        if self.noise_std < 0.0 || self.impulse_amplitude < 0.0 || self.shaft_amplitude < 0.0 {
            return Err(CoreError::InvalidConfig(
                "amplitudes and noise_std must be non-negative".into(),
            ));
        }
        Ok(())
    }

    fn n_samples(&self) -> usize {
        (self.duration * self.sample_rate).round() as usize
    }
}

/// Generate a synthetic bearing vibration record.
///
/// Impulse onsets follow `t_{j+1} = t_j + (1/fault_freq) (1 + slip_jitter u_j)`
/// with `u_j` uniform in [-1, 1]; jitter perturbs gaps, not absolute times,
/// so slip never accumulates beyond one gap.
pub fn simulate_bearing(cfg: &BearingSimConfig) -> Result<Signal> {
    cfg.validate()?;
    let n = cfg.n_samples();
    let fs = cfg.sample_rate;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);

    // impulse onset times are drawn first so that the impulse pattern for a
    // given seed does not depend on the noise settings
    let mut onsets = Vec::new();
    let mean_gap = 1.0 / cfg.fault_freq;
    let mut t = mean_gap; // first strike one nominal gap in
    let end = cfg.duration;
    while t < end {
        onsets.push(t);
        let u: f64 = rng.random_range(-1.0..=1.0);
        t += mean_gap * (1.0 + cfg.slip_jitter * u);
    }

    let mut samples = vec![0.0f64; n];

    // damped resonance ring for each strike; truncate the tail once the
    // envelope has decayed below 1e-12 of the impulse amplitude
    let tail = ((12.0 * std::f64::consts::LN_10) / cfg.damping * fs).ceil() as usize;
    let omega = 2.0 * std::f64::consts::PI * cfg.resonance_freq;
    if cfg.impulse_amplitude > 0.0 {
        for &t0 in &onsets {
            let start = (t0 * fs).ceil() as usize;
            let stop = (start + tail).min(n);
            for (k, s) in samples[start..stop].iter_mut().enumerate() {
                let dt = (start + k) as f64 / fs - t0;
                *s += cfg.impulse_amplitude * (-cfg.damping * dt).exp() * (omega * dt).sin();
            }
        }
    }

    if cfg.shaft_amplitude > 0.0 {
        let w = 2.0 * std::f64::consts::PI * cfg.shaft_freq;
        for (k, s) in samples.iter_mut().enumerate() {
            *s += cfg.shaft_amplitude * (w * k as f64 / fs).sin();
        }
    }

    for s in samples.iter_mut() {
        let z: f64 = rng.sample(StandardNormal);
        *s += cfg.noise_std * z;
    }

    Signal::new(samples, fs)
}

/// Noise level that realizes a requested signal-to-noise ratio in dB against
/// the clean (noise-free) version of `cfg`.
pub fn noise_std_for_snr_db(cfg: &BearingSimConfig, snr_db: f64) -> Result<f64> {
    let mut clean = cfg.clone();
    clean.noise_std = 0.0;
    let signal = simulate_bearing(&clean)?;
    let n = signal.len() as f64;
    let rms = (signal.samples().iter().map(|v| v * v).sum::<f64>() / n).sqrt();
    if rms == 0.0 {
        return Err(CoreError::DegenerateSignal(
            "clean signal is identically zero, SNR undefined".into(),
        ));
    }
    Ok(rms / 10f64.powf(snr_db / 20.0))
}

/// Generate fractional Gaussian noise with Hurst exponent `hurst` and scale
/// `sigma` by circulant embedding of the exact autocovariance
/// `gamma(k) = (sigma^2 / 2) (|k+1|^{2H} - 2|k|^{2H} + |k-1|^{2H})`.
///
/// The embedding is exact (the output has the requested covariance), costs
/// O(n log n), and is deterministic given the seed.
pub fn simulate_fgn(n: usize, hurst: f64, sigma: f64, seed: u64) -> Result<Signal> {
    if n < 2 {
        return Err(CoreError::InvalidArgument(format!(
            "fgn needs n >= 2, got {n}"
        )));
    }
    if !(hurst > 0.0 && hurst < 1.0) {
        return Err(CoreError::InvalidArgument(format!(
            "hurst must lie in (0, 1), got {hurst}"
        )));
    }
    if sigma < 0.0 {
        return Err(CoreError::InvalidArgument("sigma must be >= 0".into()));
    }

    let gamma = |k: f64| -> f64 {
        0.5 * ((k + 1.0).abs().powf(2.0 * hurst) - 2.0 * k.abs().powf(2.0 * hurst)
            + (k - 1.0).abs().powf(2.0 * hurst))
    };

    // first row of the circulant matrix: gamma(0..n-1) then the mirror
    let m = 2 * (n - 1).max(1);
    let mut row = vec![Complex::new(0.0, 0.0); m];
    for (k, r) in row.iter_mut().take(n).enumerate() {
        r.re = gamma(k as f64);
    }
    for k in 1..(n - 1) {
        row[m - k].re = row[k].re;
    }
    fft_in_place(&mut row);

    let mut eigen = Vec::with_capacity(m);
    for c in &row {
        // eigenvalues of a symmetric circulant are real; tolerate rounding
        if c.re < -1e-9 {
            return Err(CoreError::NumericalFailure(format!(
                "circulant embedding not nonnegative definite (eigenvalue {:.3e}); \
                 increase n",
                c.re
            )));
        }
        eigen.push(c.re.max(0.0));
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut w = vec![Complex::new(0.0, 0.0); m];
    for k in 0..m {
        let scale = (eigen[k] / m as f64).sqrt();
        if k == 0 || k == m / 2 {
            let z: f64 = rng.sample(StandardNormal);
            w[k] = Complex::new(scale * z, 0.0);
        } else if k < m / 2 {
            let zr: f64 = rng.sample(StandardNormal);
            let zi: f64 = rng.sample(StandardNormal);
            w[k] = Complex::new(scale * zr / 2f64.sqrt(), scale * zi / 2f64.sqrt());
        } else {
            w[k] = w[m - k].conj();
        }
    }
    fft_in_place(&mut w);

    let samples: Vec<f64> = w.iter().take(n).map(|c| sigma * c.re).collect();
    // sigma = 0 must produce an exactly zero (still valid) signal
    Signal::new(samples, 1.0)
}
