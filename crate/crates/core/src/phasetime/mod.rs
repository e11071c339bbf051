//! Phase time τ = dφ/dω of the transmitted wave: the closed form for the
//! waveguide well, the numerical derivative of the unwrapped transmission
//! phase (both dispersion models), negative-region lattices and the
//! limit/condition scans built on them.

mod derivative;
mod limits;
mod regions;
mod unwrap;

use std::f64::consts::PI;

pub use derivative::{derivative, Stencil};
pub use limits::{
    default_energy_grid, default_width_grid, highfreq_limit_check, highfreq_limit_check_at,
    negative_condition_scan, ConditionReport, EnergyRow, HighFreqReport, HighFreqSample,
};
pub use regions::{region_map, RegionMap, SIGN_THRESHOLD_S};
pub use unwrap::unwrap_phase;

use crate::dispersion::{DispersionModel, PhysicalConstants, Waveguide};
use crate::error::{invalid, Error, Result};
use crate::exec::Exec;
use crate::scattering::{TransmissionResult, WellScatterer};

/// Uniform frequency axis in Hz.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FrequencyGrid {
    f_min: f64,
    f_max: f64,
    points: usize,
}

impl FrequencyGrid {
    pub fn new(f_min: f64, f_max: f64, points: usize) -> Result<Self> {
        if !(f_min > 0.0) || !f_max.is_finite() || !(f_max > f_min) {
            return Err(invalid(
                "frequency range",
                format!("need 0 < f_min < f_max, got [{f_min}, {f_max}]"),
            ));
        }
        if points < 3 {
            return Err(invalid("points", format!("need at least 3, got {points}")));
        }
        Ok(Self {
            f_min,
            f_max,
            points,
        })
    }

    pub fn f_min(&self) -> f64 {
        self.f_min
    }

    pub fn f_max(&self) -> f64 {
        self.f_max
    }

    pub fn points(&self) -> usize {
        self.points
    }

    pub fn step(&self) -> f64 {
        (self.f_max - self.f_min) / (self.points - 1) as f64
    }

    /// Node `i`. Computed from `i / (points - 1)` so refined grids reproduce
    /// the coarse nodes bit for bit.
    pub fn frequency(&self, i: usize) -> f64 {
        if i + 1 == self.points {
            return self.f_max;
        }
        let t = i as f64 / (self.points - 1) as f64;
        self.f_min + (self.f_max - self.f_min) * t
    }

    pub fn frequencies(&self) -> Vec<f64> {
        (0..self.points).map(|i| self.frequency(i)).collect()
    }

    /// Grid with every interval halved (node `i` becomes node `2i`).
    pub fn refined(&self) -> Self {
        Self {
            points: 2 * self.points - 1,
            ..*self
        }
    }

    /// Fails if the lowest node does not lie above `cutoff_hz`.
    pub fn check_above(&self, cutoff_hz: f64) -> Result<()> {
        if self.f_min > cutoff_hz {
            Ok(())
        } else {
            Err(Error::Evanescent {
                omega: 2.0 * PI * self.f_min,
                cutoff: 2.0 * PI * cutoff_hz,
            })
        }
    }
}

/// Provenance of a phase-time curve.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    Analytic,
    Numeric,
    Measured,
}

/// τ(f) together with the unwrapped phase it was derived from.
#[derive(Debug, Clone, PartialEq)]
pub struct PhaseTimeProfile {
    pub frequencies: Vec<f64>,
    pub phase_unwrapped: Vec<f64>,
    pub tau: Vec<f64>,
    pub method: Method,
}

impl PhaseTimeProfile {
    pub(crate) fn from_phase(
        frequencies: Vec<f64>,
        phase_principal: &[f64],
        stencil: Stencil,
        method: Method,
    ) -> Result<Self> {
        let phase_unwrapped = unwrap_phase(phase_principal)?;
        let dphi_df = derivative(&frequencies, &phase_unwrapped, stencil)?;
        let tau = dphi_df.into_iter().map(|d| d / (2.0 * PI)).collect();
        Ok(Self {
            frequencies,
            phase_unwrapped,
            tau,
            method,
        })
    }

    pub fn len(&self) -> usize {
        self.frequencies.len()
    }

    pub fn is_empty(&self) -> bool {
        self.frequencies.is_empty()
    }

    pub fn min_tau(&self) -> f64 {
        self.tau.iter().copied().fold(f64::INFINITY, f64::min)
    }

    /// Any node with τ below the sign threshold.
    pub fn has_negative(&self) -> bool {
        self.tau.iter().any(|&t| t < -SIGN_THRESHOLD_S)
    }

    /// Highest frequency at which τ is negative.
    pub fn negative_upper_edge(&self) -> Option<f64> {
        self.frequencies
            .iter()
            .zip(&self.tau)
            .rev()
            .find(|(_, &t)| t < -SIGN_THRESHOLD_S)
            .map(|(&f, _)| f)
    }
}

/// Scatterer at angular frequency `omega` for a well of width `a`.
pub fn scatterer_at(model: &DispersionModel, omega: f64, a: f64) -> Result<WellScatterer> {
    let (k, kprime) = model.wavenumbers(omega)?;
    WellScatterer::new(k, kprime, a)
}

/// sin(2x)/x with its x → 0 limit.
fn sin2x_over_x(x: f64) -> f64 {
    if x == 0.0 {
        2.0
    } else {
        (2.0 * x).sin() / x
    }
}

/// Closed-form phase time of a dielectric well in a waveguide:
///
/// ```text
/// τ = aω/(c²k) · [2n²k²(k'²+k²) − (k'²−k²) k0'² sin(2k'a)/(k'a)]
///               / [4k²k'² + (k'²−k²)² sin²(k'a)],   k0'² = k'² − n²k²
/// ```
pub fn phase_time_analytic(model: &Waveguide, f: f64, a: f64) -> Result<f64> {
    if !(a >= 0.0) {
        return Err(invalid("a", format!("must be >= 0, got {a}")));
    }
    let omega = 2.0 * PI * f;
    let (k, kp) = crate::dispersion::em_wavenumbers(model, omega)?;
    let c = PhysicalConstants::SI.c;
    let n2 = model.n() * model.n();
    let (k2, kp2) = (k * k, kp * kp);
    let k0_sq = kp2 - n2 * k2;
    let kpa = kp * a;
    let numerator = 2.0 * n2 * k2 * (kp2 + k2) - (kp2 - k2) * k0_sq * sin2x_over_x(kpa);
    let s = kpa.sin();
    let denominator = 4.0 * k2 * kp2 + (kp2 - k2).powi(2) * s * s;
    Ok(a * omega / (c * c * k) * numerator / denominator)
}

/// Analytic profile over a grid; phase from arg F, τ from the closed form.
pub fn phase_time_analytic_profile(
    model: &Waveguide,
    grid: &FrequencyGrid,
    a: f64,
) -> Result<PhaseTimeProfile> {
    let dm = DispersionModel::Waveguide(model.clone());
    let sweep = transmission_sweep(&dm, grid, a, Exec::Sequential)?;
    let principal: Vec<f64> = sweep.iter().map(|t| t.phase_principal).collect();
    let phase_unwrapped = unwrap_phase(&principal)?;
    let frequencies = grid.frequencies();
    let tau = frequencies
        .iter()
        .map(|&f| phase_time_analytic(model, f, a))
        .collect::<Result<_>>()?;
    Ok(PhaseTimeProfile {
        frequencies,
        phase_unwrapped,
        tau,
        method: Method::Analytic,
    })
}

/// Transmission results at every grid node.
pub fn transmission_sweep(
    model: &DispersionModel,
    grid: &FrequencyGrid,
    a: f64,
    exec: Exec,
) -> Result<Vec<TransmissionResult>> {
    exec.try_map(grid.points(), |i| {
        let s = scatterer_at(model, 2.0 * PI * grid.frequency(i), a)?;
        Ok(TransmissionResult::of(&s))
    })
}

/// τ from the numerical derivative of the unwrapped arg F; works for both
/// dispersion models.
pub fn phase_time_numeric(
    model: &DispersionModel,
    grid: &FrequencyGrid,
    a: f64,
    stencil: Stencil,
) -> Result<PhaseTimeProfile> {
    grid.check_above(model.cutoff_omega() / (2.0 * PI))?;
    let principal = transmission_sweep(model, grid, a, Exec::Sequential)?
        .iter()
        .map(|t| t.phase_principal)
        .collect::<Vec<_>>();
    PhaseTimeProfile::from_phase(grid.frequencies(), &principal, stencil, Method::Numeric)
}

/// [`phase_time_numeric`] with one retry on a twice-as-dense grid when the
/// unwrap is ambiguous; the result is reported on the requested nodes.
pub fn phase_time_numeric_adaptive(
    model: &DispersionModel,
    grid: &FrequencyGrid,
    a: f64,
    stencil: Stencil,
) -> Result<PhaseTimeProfile> {
    match phase_time_numeric(model, grid, a, stencil) {
        Err(Error::UnwrapAmbiguity { .. }) => {
            let fine = phase_time_numeric(model, &grid.refined(), a, stencil)?;
            let pick = |v: &[f64]| v.iter().step_by(2).copied().collect::<Vec<_>>();
            Ok(PhaseTimeProfile {
                frequencies: grid.frequencies(),
                phase_unwrapped: pick(&fine.phase_unwrapped),
                tau: pick(&fine.tau),
                method: Method::Numeric,
            })
        }
        other => other,
    }
}
