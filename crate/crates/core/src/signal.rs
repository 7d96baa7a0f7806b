//! Foundational signal types and numerics: windows, FIR convolution,
//! autocorrelation, period estimation, envelope spectra and min-max
//! normalization.
//!
//! Everything here is a pure function of its inputs; no shared mutable
//! state, safe to call concurrently.

use rustfft::num_complex::Complex;

use crate::error::{CoreError, Result};
use crate::fft::{fft_in_place, ifft_in_place};

/// A uniformly sampled real-valued vibration record.
///
/// Invariants enforced at construction: non-empty, every sample finite,
/// strictly positive sample rate.
#[derive(Debug, Clone, PartialEq)]
pub struct Signal {
    samples: Vec<f64>,
    sample_rate: f64,
}

impl Signal {
    pub fn new(samples: Vec<f64>, sample_rate: f64) -> Result<Self> {
        if samples.is_empty() {
            return Err(CoreError::InvalidArgument(
                "signal must be non-empty".into(),
            ));
        }
        if !samples.iter().all(|v| v.is_finite()) {
            return Err(CoreError::InvalidArgument(
                "signal contains non-finite samples".into(),
            ));
        }
        if sample_rate.is_nan() || sample_rate <= 0.0 || !sample_rate.is_finite() {
            return Err(CoreError::InvalidArgument(format!(
                "sample rate must be positive and finite, got {sample_rate}"
            )));
        }
        Ok(Self {
            samples,
            sample_rate,
        })
    }

    pub fn samples(&self) -> &[f64] {
        &self.samples
    }

    pub fn sample_rate(&self) -> f64 {
        self.sample_rate
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        false // non-empty by construction
    }

    pub fn into_samples(self) -> Vec<f64> {
        self.samples
    }

    pub fn duration(&self) -> f64 {
        self.samples.len() as f64 / self.sample_rate
    }
}

/// A finite impulse response filter: L taps plus optional pass-band
/// metadata in Hz.
///
/// Invariants: at least two taps, all finite, not all zero.
#[derive(Debug, Clone, PartialEq)]
pub struct FirFilter {
    taps: Vec<f64>,
    band: Option<(f64, f64)>,
}

impl FirFilter {
    pub fn new(taps: Vec<f64>) -> Result<Self> {
        Self::with_band(taps, None)
    }

    pub fn with_band(taps: Vec<f64>, band: Option<(f64, f64)>) -> Result<Self> {
        if taps.len() < 2 {
            return Err(CoreError::InvalidArgument(format!(
                "filter needs at least 2 taps, got {}",
                taps.len()
            )));
        }
        if !taps.iter().all(|v| v.is_finite()) {
            return Err(CoreError::InvalidArgument(
                "filter taps must be finite".into(),
            ));
        }
        if taps.iter().all(|&v| v == 0.0) {
            return Err(CoreError::InvalidArgument(
                "filter taps must not all be zero".into(),
            ));
        }
        Ok(Self { taps, band })
    }

    pub fn taps(&self) -> &[f64] {
        &self.taps
    }

    pub fn band(&self) -> Option<(f64, f64)> {
        self.band
    }

    pub fn len(&self) -> usize {
        self.taps.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Euclidean norm of the tap vector. Non-zero by the type invariant.
    pub fn l2_norm(&self) -> f64 {
        self.taps.iter().map(|t| t * t).sum::<f64>().sqrt()
    }

    /// Same filter scaled to unit L2 norm.
    pub fn unit_norm(&self) -> FirFilter {
        let norm = self.l2_norm();
        FirFilter {
            taps: self.taps.iter().map(|t| t / norm).collect(),
            band: self.band,
        }
    }

    /// Magnitude of the discrete-time frequency response at `freq_hz`.
    pub fn response_magnitude(&self, freq_hz: f64, sample_rate: f64) -> f64 {
        let omega = 2.0 * std::f64::consts::PI * freq_hz / sample_rate;
        let (mut re, mut im) = (0.0, 0.0);
        for (k, &t) in self.taps.iter().enumerate() {
            re += t * (omega * k as f64).cos();
            im -= t * (omega * k as f64).sin();
        }
        (re * re + im * im).sqrt()
    }
}

/// A single-sided magnitude spectrum.
#[derive(Debug, Clone, PartialEq)]
pub struct Spectrum {
    frequencies: Vec<f64>,
    magnitudes: Vec<f64>,
}

impl Spectrum {
    pub fn new(frequencies: Vec<f64>, magnitudes: Vec<f64>) -> Result<Self> {
        if frequencies.len() != magnitudes.len() {
            return Err(CoreError::InvalidArgument(format!(
                "frequency/magnitude length mismatch: {} vs {}",
                frequencies.len(),
                magnitudes.len()
            )));
        }
        if !frequencies.windows(2).all(|w| w[0] < w[1]) {
            return Err(CoreError::InvalidArgument(
                "frequencies must be strictly increasing".into(),
            ));
        }
        if !magnitudes.iter().all(|&m| m.is_finite() && m >= 0.0) {
            return Err(CoreError::InvalidArgument(
                "magnitudes must be finite and non-negative".into(),
            ));
        }
        Ok(Self {
            frequencies,
            magnitudes,
        })
    }

    pub fn frequencies(&self) -> &[f64] {
        &self.frequencies
    }

    pub fn magnitudes(&self) -> &[f64] {
        &self.magnitudes
    }

    /// Frequency and magnitude of the largest spectral line.
    pub fn peak(&self) -> (f64, f64) {
        let mut best = 0;
        for (k, &m) in self.magnitudes.iter().enumerate() {
            if m > self.magnitudes[best] {
                best = k;
            }
        }
        (self.frequencies[best], self.magnitudes[best])
    }
}

/// Hann window of length `n`: `w[k] = 0.5 (1 - cos(2 pi k / (n - 1)))`.
///
/// Built by mirroring the first half so `w[k] == w[n-1-k]` holds exactly.
pub fn hann_window(n: usize) -> Result<Vec<f64>> {
    if n < 2 {
        return Err(CoreError::InvalidArgument(format!(
            "hann window needs n >= 2, got {n}"
        )));
    }
    let mut w = vec![0.0; n];
    let denom = (n - 1) as f64;
    for k in 0..=(n - 1) / 2 {
        let v = 0.5 * (1.0 - (2.0 * std::f64::consts::PI * k as f64 / denom).cos());
        w[k] = v;
        w[n - 1 - k] = v;
    }
    Ok(w)
}

/// Valid-mode FIR convolution: output `y[n] = sum_l f[l] x[n + L - 1 - l]`
/// of length `N - L + 1`. Only fully overlapped outputs are produced, so
/// edge transients never enter downstream statistics.
pub fn convolve_valid(x: &Signal, f: &FirFilter) -> Result<Signal> {
    let xs = x.samples();
    let taps = f.taps();
    let (n, l) = (xs.len(), taps.len());
    if n < l {
        return Err(CoreError::SignalTooShort { needed: l, got: n });
    }
    let mut y = vec![0.0; n - l + 1];
    for (out, window) in y.iter_mut().zip(xs.windows(l)) {
        let mut acc = 0.0;
        // taps reversed against the window: f[l] pairs with x[n + L-1-l]
        for (t, v) in taps.iter().rev().zip(window.iter()) {
            acc += t * v;
        }
        *out = acc;
    }
    Signal::new(y, x.sample_rate())
}

/// Biased autocorrelation `R(tau) = sum_n x[n] x[n+tau]`, normalized so
/// `R(0) = 1`. Computed via FFT; matches the direct summation to floating
/// point accuracy.
pub fn autocorr(x: &Signal) -> Result<Vec<f64>> {
    let xs = x.samples();
    let n = xs.len();
    if n < 2 {
        return Err(CoreError::SignalTooShort { needed: 2, got: n });
    }
    if xs.iter().all(|&v| v == 0.0) {
        return Err(CoreError::DegenerateSignal(
            "autocorrelation of an all-zero signal".into(),
        ));
    }
    let m = (2 * n).next_power_of_two();
    let mut buf = vec![Complex::new(0.0, 0.0); m];
    for (b, &v) in buf.iter_mut().zip(xs.iter()) {
        b.re = v;
    }
    fft_in_place(&mut buf);
    for c in buf.iter_mut() {
        *c = Complex::new(c.norm_sqr(), 0.0);
    }
    ifft_in_place(&mut buf);
    // The inverse is unnormalized; dividing by R(0) cancels the factor.
    let r0 = buf[0].re;
    Ok(buf[..n].iter().map(|c| c.re / r0).collect())
}

/// Estimate the dominant period of a normalized autocorrelation sequence:
/// find the first zero crossing at lag `z >= min_lag`, then return the lag
/// of the maximum of `R` beyond `z`.
///
/// Zero crossing means the first integer lag where `R` changes sign or is
/// exactly zero; no interpolation, periods are consumed as integer sample
/// counts.
pub fn estimate_period(r: &[f64], min_lag: usize) -> Result<usize> {
    if min_lag < 1 {
        return Err(CoreError::InvalidArgument("min_lag must be >= 1".into()));
    }
    if r.len() <= min_lag {
        return Err(CoreError::SignalTooShort {
            needed: min_lag + 1,
            got: r.len(),
        });
    }
    let mut crossing = None;
    for tau in min_lag..r.len() {
        if r[tau] == 0.0 || r[tau - 1] * r[tau] < 0.0 {
            crossing = Some(tau);
            break;
        }
    }
    let z = crossing.ok_or(CoreError::NoPeriodicity)?;
    if z + 1 >= r.len() {
        // crossing sits at the end of the sequence, nothing to search
        return Err(CoreError::NoPeriodicity);
    }
    let mut best = z + 1;
    for tau in (z + 1)..r.len() {
        if r[tau] > r[best] {
            best = tau;
        }
    }
    Ok(best)
}

/// Envelope spectrum: magnitude spectrum of the signal's amplitude envelope.
///
/// The analytic signal comes from the DFT (negative frequencies zeroed,
/// positive doubled), the envelope is its magnitude, and the envelope mean
/// is removed before the final transform so the DC line never masks fault
/// lines. Frequency resolution is `sample_rate / N`.
pub fn envelope_spectrum(x: &Signal) -> Result<Spectrum> {
    let xs = x.samples();
    let n = xs.len();
    if n < 16 {
        return Err(CoreError::SignalTooShort { needed: 16, got: n });
    }

    // analytic signal
    let mut buf: Vec<Complex<f64>> = xs.iter().map(|&v| Complex::new(v, 0.0)).collect();
    fft_in_place(&mut buf);
    let half = n / 2;
    for (k, c) in buf.iter_mut().enumerate() {
        if k == 0 || (n % 2 == 0 && k == half) {
            // DC and Nyquist stay as they are
        } else if k < (n + 1) / 2 {
            *c *= 2.0;
        } else {
            *c = Complex::new(0.0, 0.0);
        }
    }
    ifft_in_place(&mut buf);
    let scale = 1.0 / n as f64;
    let mut envelope: Vec<f64> = buf.iter().map(|c| (*c * scale).norm()).collect();

    let mean = envelope.iter().sum::<f64>() / n as f64;
    for e in envelope.iter_mut() {
        *e -= mean;
    }

    // single-sided magnitude spectrum of the centered envelope
    let mut ebuf: Vec<Complex<f64>> = envelope.iter().map(|&v| Complex::new(v, 0.0)).collect();
    fft_in_place(&mut ebuf);
    let bins = half + 1;
    let df = x.sample_rate() / n as f64;
    let mut frequencies = Vec::with_capacity(bins);
    let mut magnitudes = Vec::with_capacity(bins);
    for (k, c) in ebuf.iter().take(bins).enumerate() {
        let amp = if k == 0 {
            c.norm() / n as f64
        } else {
            2.0 * c.norm() / n as f64
        };
        frequencies.push(k as f64 * df);
        magnitudes.push(amp);
    }
    Spectrum::new(frequencies, magnitudes)
}

/// Min-max normalization `(value - lo) / (hi - lo)`.
///
/// Inputs outside `[lo, hi]` are allowed and map outside `[0, 1]`; callers
/// that need a bounded result clamp afterwards.
pub fn minmax_normalize(value: f64, lo: f64, hi: f64) -> Result<f64> {
    if hi.is_nan() || lo.is_nan() || hi <= lo {
        return Err(CoreError::DegenerateRange(format!(
            "normalization range [{lo}, {hi}] has no width"
        )));
    }
    Ok((value - lo) / (hi - lo))
}
