//! Spectral wave-packet check of the stationary-phase phase time.
//!
//! A Gaussian spectrum is multiplied by the exact transfer function F(ω) and
//! summed back into the time domain. Since F is exact, the delay between the
//! incident and transmitted envelope peaks differs from τ(f_center) only by
//! the stationary-phase approximation error.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::dispersion::DispersionModel;
use crate::error::{invalid, Error, Result};
use crate::exec::Exec;
use crate::phasetime::{transmission_sweep, FrequencyGrid};

/// Incident envelope level required at the edges of the time window.
const EDGE_LEVEL: f64 = 1e-6;

/// Gaussian narrowband packet and the grids it is synthesised on.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PacketSpec {
    f_center: f64,
    sigma_f: f64,
    grid: FrequencyGrid,
    time_window: f64,
    time_points: usize,
    amplitude: f64,
}

impl PacketSpec {
    pub fn new(
        f_center: f64,
        sigma_f: f64,
        grid: FrequencyGrid,
        time_window: f64,
        time_points: usize,
    ) -> Result<Self> {
        if !(sigma_f > 0.0) || !(f_center > 0.0) {
            return Err(invalid(
                "sigma_f",
                "centre frequency and width must be positive",
            ));
        }
        if grid.f_min() > f_center - 5.0 * sigma_f || grid.f_max() < f_center + 5.0 * sigma_f {
            return Err(invalid(
                "grid",
                "spectral grid must cover f_center ± 5 sigma_f",
            ));
        }
        let sigma_t = 1.0 / (2.0 * PI * sigma_f);
        let half = 0.5 * time_window;
        if !((-half * half / (2.0 * sigma_t * sigma_t)).exp() < EDGE_LEVEL) {
            return Err(invalid(
                "time_window",
                format!("envelope must decay below {EDGE_LEVEL:e} at ±{half:e} s"),
            ));
        }
        if time_points < 3 {
            return Err(invalid("time_points", "need at least 3"));
        }
        Ok(Self {
            f_center,
            sigma_f,
            grid,
            time_window,
            time_points,
            amplitude: 1.0,
        })
    }

    /// Spectral grid over ±8σ_f (2001 nodes), time window ±8σ_t (4001 samples).
    pub fn centered(f_center: f64, sigma_f: f64) -> Result<Self> {
        if !(sigma_f > 0.0) {
            return Err(invalid("sigma_f", "must be positive"));
        }
        let grid = FrequencyGrid::new(f_center - 8.0 * sigma_f, f_center + 8.0 * sigma_f, 2001)?;
        let sigma_t = 1.0 / (2.0 * PI * sigma_f);
        Self::new(f_center, sigma_f, grid, 16.0 * sigma_t, 4001)
    }

    /// Same packet with the spectrum scaled by `amplitude`.
    pub fn with_amplitude(mut self, amplitude: f64) -> Result<Self> {
        if !(amplitude > 0.0) || !amplitude.is_finite() {
            return Err(invalid("amplitude", "must be positive"));
        }
        self.amplitude = amplitude;
        Ok(self)
    }

    pub fn f_center(&self) -> f64 {
        self.f_center
    }

    pub fn sigma_f(&self) -> f64 {
        self.sigma_f
    }

    pub fn grid(&self) -> &FrequencyGrid {
        &self.grid
    }

    pub fn times(&self) -> Vec<f64> {
        let n = self.time_points - 1;
        let half = 0.5 * self.time_window;
        (0..=n)
            .map(|j| -half + self.time_window * (j as f64 / n as f64))
            .collect()
    }

    fn spectrum(&self) -> Vec<f64> {
        let df = self.grid.step();
        (0..self.grid.points())
            .map(|i| {
                let x = (self.grid.frequency(i) - self.f_center) / self.sigma_f;
                self.amplitude * (-0.5 * x * x).exp() * df
            })
            .collect()
    }
}

/// Envelope samples with the refined peak location.
#[derive(Debug, Clone, PartialEq)]
pub struct TimeTrace {
    pub t: Vec<f64>,
    pub envelope: Vec<f64>,
    pub peak_time: f64,
}

impl TimeTrace {
    pub fn new(t: Vec<f64>, envelope: Vec<f64>) -> Result<Self> {
        if t.len() != envelope.len() || t.len() < 3 {
            return Err(invalid(
                "envelope",
                "need matching time and envelope vectors of length >= 3",
            ));
        }
        let peak_time = refine_peak(&t, &envelope)?;
        Ok(Self {
            t,
            envelope,
            peak_time,
        })
    }

    /// ∫ |envelope|² dt by the trapezoidal rule.
    pub fn energy(&self) -> f64 {
        self.t
            .windows(2)
            .zip(self.envelope.windows(2))
            .map(|(t, e)| 0.5 * (t[1] - t[0]) * (e[0] * e[0] + e[1] * e[1]))
            .sum()
    }
}

/// Discrete maximum refined by a parabola through it and its two neighbours.
fn refine_peak(t: &[f64], env: &[f64]) -> Result<f64> {
    let (imax, &ymax) = env
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.total_cmp(b.1))
        .expect("non-empty");
    let rivals: Vec<f64> = (1..env.len() - 1)
        .filter(|&j| j.abs_diff(imax) > 1)
        .filter(|&j| env[j] >= env[j - 1] && env[j] >= env[j + 1])
        .filter(|&j| env[j] >= (1.0 - 1e-9) * ymax)
        .map(|j| t[j])
        .collect();
    if imax == 0 || imax + 1 == env.len() || !rivals.is_empty() {
        let mut candidates = vec![t[imax]];
        candidates.extend(rivals);
        return Err(Error::IllPosedPeak { candidates });
    }
    let (y0, y1, y2) = (env[imax - 1], env[imax], env[imax + 1]);
    let curvature = y0 - 2.0 * y1 + y2;
    if !(curvature < 0.0) {
        return Err(Error::IllPosedPeak {
            candidates: vec![t[imax - 1], t[imax], t[imax + 1]],
        });
    }
    let shift = 0.5 * (y0 - y2) / curvature;
    let dt = if shift >= 0.0 {
        t[imax + 1] - t[imax]
    } else {
        t[imax] - t[imax - 1]
    };
    Ok(t[imax] + shift * dt)
}

/// Builds the incident envelope (x = 0) and the transmitted envelope
/// (x = a, phase referenced there) for a well of width `a`.
pub fn synthesize_and_transmit(
    spec: &PacketSpec,
    model: &DispersionModel,
    a: f64,
    exec: Exec,
) -> Result<(TimeTrace, TimeTrace)> {
    let cutoff_hz = model.cutoff_omega() / (2.0 * PI);
    let lowest = spec.grid.f_min().min(spec.f_center - 5.0 * spec.sigma_f);
    if !(lowest > cutoff_hz) {
        return Err(Error::SpectrumBelowCutoff {
            lowest_hz: lowest,
            cutoff_hz,
        });
    }
    let weights = spec.spectrum();
    let transfer: Vec<Complex64> = transmission_sweep(model, &spec.grid, a, exec)?
        .into_iter()
        .map(|r| r.f)
        .collect();
    check_resolvable(spec, &transfer)?;
    let offsets: Vec<f64> = spec
        .grid
        .frequencies()
        .into_iter()
        .map(|f| f - spec.f_center)
        .collect();
    let t = spec.times();

    // baseband sum; dropping the carrier leaves the envelope magnitude unchanged
    let pairs = exec.map(t.len(), |j| {
        let mut inc = Complex64::new(0.0, 0.0);
        let mut out = Complex64::new(0.0, 0.0);
        for ((&w, &df), &tf) in weights.iter().zip(&offsets).zip(&transfer) {
            let (s, c) = (-2.0 * PI * df * t[j]).sin_cos();
            let phasor = Complex64::new(w * c, w * s);
            inc += phasor;
            out += phasor * tf;
        }
        (inc.norm(), out.norm())
    });
    let (inc, out): (Vec<f64>, Vec<f64>) = pairs.into_iter().unzip();
    Ok((TimeTrace::new(t.clone(), inc)?, TimeTrace::new(t, out)?))
}

/// Rejects transfer functions the grids cannot represent: a phase step above
/// π/2 between spectral nodes inside ±5σ, or a group delay that pushes the
/// transmitted packet out of the time window.
fn check_resolvable(spec: &PacketSpec, transfer: &[Complex64]) -> Result<()> {
    let df = spec.grid.step();
    let lo = spec.f_center - 5.0 * spec.sigma_f;
    let hi = spec.f_center + 5.0 * spec.sigma_f;
    let mut worst = 0.0f64;
    for i in 0..transfer.len() - 1 {
        let f = spec.grid.frequency(i);
        if f >= lo && f <= hi {
            worst = worst.max((transfer[i + 1] / transfer[i]).arg().abs());
        }
    }
    if worst > 0.5 * PI {
        return Err(invalid(
            "grid",
            format!("transfer phase jumps {worst:.3} rad between spectral nodes; refine the grid"),
        ));
    }
    let ic = ((spec.f_center - spec.grid.f_min()) / df).round() as usize;
    let ic = ic.clamp(1, transfer.len() - 2);
    let delay = (transfer[ic + 1] / transfer[ic - 1]).arg() / (2.0 * PI * 2.0 * df);
    let sigma_t = 1.0 / (2.0 * PI * spec.sigma_f);
    if delay.abs() + 5.0 * sigma_t > 0.5 * spec.time_window {
        return Err(invalid(
            "time_window",
            format!(
                "expected delay {delay:.3e} s leaves the ±{:.3e} s window",
                0.5 * spec.time_window
            ),
        ));
    }
    Ok(())
}

/// Transmitted minus incident peak time.
pub fn peak_delay(incident: &TimeTrace, transmitted: &TimeTrace) -> Result<f64> {
    let same = incident.t.len() == transmitted.t.len()
        && incident
            .t
            .iter()
            .zip(&transmitted.t)
            .all(|(a, b)| a.to_bits() == b.to_bits());
    if !same {
        return Err(Error::AxisMismatch(
            "traces use different time grids".into(),
        ));
    }
    Ok(transmitted.peak_time - incident.peak_time)
}

/// Σ|F|²|S|² / Σ|S|² over the packet's spectral grid.
pub fn spectral_energy_ratio(spec: &PacketSpec, model: &DispersionModel, a: f64) -> Result<f64> {
    let weights = spec.spectrum();
    let sweep = transmission_sweep(model, &spec.grid, a, Exec::Sequential)?;
    let num: f64 = weights
        .iter()
        .zip(&sweep)
        .map(|(w, r)| w * w * r.magnitude_sq)
        .sum();
    let den: f64 = weights.iter().map(|w| w * w).sum();
    Ok(num / den)
}
