use std::f64::consts::PI;

use rustfft::num_complex::Complex;
use rustfft::FftPlanner;

use crate::error::{Error, Result};

/// One-sided amplitude spectrum of a mean-removed series.
///
/// Interior bins carry `sqrt(2)|X_k|/n`, so the squared amplitudes sum to
/// the mean-square of the series.
#[derive(Clone, Debug, PartialEq)]
pub struct Spectrum {
    /// Cyclic frequencies `k / (n dt)` in 1/s.
    pub freqs: Vec<f64>,
    pub amps: Vec<f64>,
}

impl Spectrum {
    pub fn power(&self) -> f64 {
        self.amps.iter().map(|a| a * a).sum()
    }

    /// Frequency of the largest bin refined by a parabola through it and its
    /// neighbours. `None` for an all-zero spectrum.
    pub fn dominant_frequency(&self) -> Option<f64> {
        let (k, &peak) = self.amps.iter().enumerate().skip(1).max_by(|a, b| a.1.total_cmp(b.1))?;
        if peak == 0.0 {
            return None;
        }
        let df = self.freqs.get(1).copied().unwrap_or(0.0);
        if k + 1 >= self.amps.len() {
            return Some(self.freqs[k]);
        }
        let (l, r) = (self.amps[k - 1], self.amps[k + 1]);
        let denom = l - 2.0 * peak + r;
        let shift = if denom < 0.0 { 0.5 * (l - r) / denom } else { 0.0 };
        Some(self.freqs[k] + shift.clamp(-0.5, 0.5) * df)
    }
}

/// Taper applied to a mean-removed series before the transform.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Window {
    #[default]
    Rectangular,
    /// `sin^2(pi k / n)`, scaled so a bin-centred sine keeps its amplitude.
    Hann,
}

pub fn dft(values: &[f64], dt: f64) -> Result<Spectrum> {
    dft_windowed(values, dt, Window::Rectangular)
}

pub fn dft_windowed(values: &[f64], dt: f64, window: Window) -> Result<Spectrum> {
    let n = values.len();
    if n < 2 {
        return Err(Error::invalid(format!("spectrum needs at least 2 samples, got {n}")));
    }
    if !(dt > 0.0) {
        return Err(Error::invalid(format!("sampling interval must be positive, got {dt}")));
    }
    let mean = values.iter().sum::<f64>() / n as f64;
    let taper = |k: usize| match window {
        Window::Rectangular => 1.0,
        Window::Hann => 2.0 * (PI * k as f64 / n as f64).sin().powi(2),
    };
    let mut buf: Vec<Complex<f64>> =
        values.iter().enumerate().map(|(k, v)| Complex::new((v - mean) * taper(k), 0.0)).collect();
    FftPlanner::new().plan_fft_forward(n).process(&mut buf);
    let half = n / 2;
    let nf = n as f64;
    let amps = (0..=half)
        .map(|k| {
            let m = buf[k].norm() / nf;
            if k == 0 {
                0.0
            } else if 2 * k == n {
                m
            } else {
                std::f64::consts::SQRT_2 * m
            }
        })
        .collect();
    let freqs = (0..=half).map(|k| k as f64 / (nf * dt)).collect();
    Ok(Spectrum { freqs, amps })
}

/// Buoyancy frequency and the stratification parameter of the
/// dispersion relation `omega^2 = N^2 kx^2 / (k^2 + sigma)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DispersionParams {
    pub n: f64,
    pub sigma: f64,
}

impl DispersionParams {
    pub fn new(n: f64, sigma: f64) -> Result<Self> {
        if !(n > 0.0) || !(sigma >= 0.0) {
            return Err(Error::invalid(format!("need N > 0 and sigma >= 0, got N = {n}, sigma = {sigma}")));
        }
        Ok(DispersionParams { n, sigma })
    }

    pub fn boussinesq(n: f64) -> Result<Self> {
        Self::new(n, 0.0)
    }

    /// Anelastic with density `exp(K z)`: `sigma = K^2 / 4`.
    pub fn anelastic_exp(n: f64, k: f64) -> Result<Self> {
        Self::new(n, 0.25 * k * k)
    }

    /// Pseudo-incompressible with density `exp(K z)` and `theta'/theta = 1`:
    /// `sigma = (1 + K/2)^2`.
    pub fn pseudo_incompressible_exp(n: f64, k: f64) -> Result<Self> {
        Self::new(n, (1.0 + 0.5 * k).powi(2))
    }

    /// Angular frequency of a wave with the given wavenumbers.
    pub fn omega(&self, kx: f64, kz: f64) -> f64 {
        self.n * kx.abs() / (kx * kx + kz * kz + self.sigma).sqrt()
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct DispersionCheck {
    pub pass: bool,
    /// Share of power at angular frequencies up to `(1 + margin) N`, per spectrum.
    pub fractions: Vec<f64>,
    pub min_fraction: f64,
}

/// Passes when every spectrum holds at least `threshold` of its power at
/// angular frequency `2 pi f <= (1 + margin) N`. Empty spectra count as 1.
pub fn dispersion_bound_check(
    spectra: &[Spectrum],
    params: &DispersionParams,
    threshold: f64,
    margin: f64,
) -> DispersionCheck {
    let limit = (1.0 + margin) * params.n;
    let fractions: Vec<f64> = spectra
        .iter()
        .map(|s| {
            let total = s.power();
            if total == 0.0 {
                return 1.0;
            }
            let below: f64 =
                s.freqs.iter().zip(&s.amps).filter(|(f, _)| 2.0 * PI * **f <= limit).map(|(_, a)| a * a).sum();
            below / total
        })
        .collect();
    let min_fraction = fractions.iter().copied().fold(f64::INFINITY, f64::min);
    DispersionCheck { pass: !spectra.is_empty() && min_fraction >= threshold, fractions, min_fraction }
}
