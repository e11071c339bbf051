use std::f64::consts::PI;

use crate::dispersion::{
    em_wavenumbers, qm_wavenumbers, DispersionModel, PhysicalConstants, QuantumWellSpec, Region,
    Waveguide,
};
use crate::error::{invalid, Result};
use crate::exec::Exec;

use super::{phase_time_analytic, phase_time_numeric, FrequencyGrid, Stencil, SIGN_THRESHOLD_S};

/// One rung of the high-frequency ladder.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HighFreqSample {
    pub f: f64,
    pub tau: f64,
    /// (a/τ)·(ω/k): group velocity across the well times outer phase velocity.
    pub closed_form_product: f64,
    /// v_gr·v_ph inside the filled section from the dispersion relation alone.
    pub well_identity_product: f64,
    /// closed_form_product / (c/n)² − 1.
    pub rel_dev: f64,
}

/// Behaviour of the closed-form phase time as f → ∞.
///
/// With a frequency-independent index the (k'²−k²)² term of the denominator
/// grows like k²k'², so (a/τ)(ω/k)/(c/n)² oscillates inside
/// `asymptotic_band` instead of settling at 1; the band collapses to {1}
/// for n = 1.
#[derive(Debug, Clone, PartialEq)]
pub struct HighFreqReport {
    pub target: f64,
    pub samples: Vec<HighFreqSample>,
    pub asymptotic_band: (f64, f64),
}

impl HighFreqReport {
    /// Largest |rel_dev| over the rungs at or above `f_min`.
    pub fn max_rel_dev_above(&self, f_min: f64) -> f64 {
        self.samples
            .iter()
            .filter(|s| s.f >= f_min)
            .map(|s| s.rel_dev.abs())
            .fold(0.0, f64::max)
    }

    /// Whether the closed-form product reached the (c/n)² target to `tol`.
    pub fn converged(&self, tol: f64) -> bool {
        self.samples.last().is_some_and(|s| s.rel_dev.abs() <= tol)
    }

    /// Whether a rung's ratio to (c/n)² lies in the band, widened by `slack`.
    pub fn within_band(&self, sample: &HighFreqSample, slack: f64) -> bool {
        let ratio = 1.0 + sample.rel_dev;
        ratio >= self.asymptotic_band.0 - slack && ratio <= self.asymptotic_band.1 + slack
    }
}

/// Ladder f0·10^(j/2), j = 1..=8.
pub fn highfreq_limit_check(model: &Waveguide, a: f64) -> Result<HighFreqReport> {
    let f0 = model.cutoffs().f0();
    let freqs: Vec<f64> = (1..=8).map(|j| f0 * 10f64.powf(j as f64 / 2.0)).collect();
    highfreq_limit_check_at(model, a, &freqs)
}

pub fn highfreq_limit_check_at(model: &Waveguide, a: f64, freqs: &[f64]) -> Result<HighFreqReport> {
    if !(a > 0.0) {
        return Err(invalid("a", format!("must be positive, got {a}")));
    }
    let c = PhysicalConstants::SI.c;
    let n = model.n();
    let n2 = n * n;
    let target = (c / n) * (c / n);
    let dm = DispersionModel::Waveguide(model.clone());
    let samples = freqs
        .iter()
        .map(|&f| {
            let omega = 2.0 * PI * f;
            let (k, _) = em_wavenumbers(model, omega)?;
            let tau = phase_time_analytic(model, f, a)?;
            let closed_form_product = (a / tau) * (omega / k);
            let (vp, vg) = dm.velocities(omega, Region::Well)?;
            Ok(HighFreqSample {
                f,
                tau,
                closed_form_product,
                well_identity_product: vp * vg,
                rel_dev: closed_form_product / target - 1.0,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(HighFreqReport {
        target,
        samples,
        asymptotic_band: (2.0 * n2 / (n2 + 1.0), (n2 + 1.0) / 2.0),
    })
}

/// Per-energy outcome of the negative phase-time scan.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EnergyRow {
    pub energy: f64,
    /// (E − E0)/V0.
    pub depth_fraction: f64,
    pub min_tau: f64,
    pub min_tau_width: f64,
    pub negative_widths: usize,
}

impl EnergyRow {
    pub fn has_negative(&self) -> bool {
        self.negative_widths > 0
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConditionReport {
    pub rows: Vec<EnergyRow>,
}

impl ConditionReport {
    /// Highest depth fraction with some negative width.
    pub fn max_negative_fraction(&self) -> Option<f64> {
        self.rows
            .iter()
            .filter(|r| r.has_negative())
            .map(|r| r.depth_fraction)
            .reduce(f64::max)
    }

    /// Lowest depth fraction with no negative width.
    pub fn min_clean_fraction(&self) -> Option<f64> {
        self.rows
            .iter()
            .filter(|r| !r.has_negative())
            .map(|r| r.depth_fraction)
            .reduce(f64::min)
    }

    pub fn negative_energies(&self) -> impl Iterator<Item = &EnergyRow> {
        self.rows.iter().filter(|r| r.has_negative())
    }
}

/// `count` energies strictly inside (E0, E0 + V0), evenly spaced.
pub fn default_energy_grid(spec: &QuantumWellSpec, count: usize) -> Vec<f64> {
    (1..=count)
        .map(|i| spec.baseline_e0() + spec.depth_v0() * i as f64 / (count + 1) as f64)
        .collect()
}

/// `count` widths up to three well wavelengths at E − E0 = V0.
pub fn default_width_grid(spec: &QuantumWellSpec, count: usize) -> Vec<f64> {
    let (_, kp) =
        qm_wavenumbers(spec, spec.baseline_e0() + spec.depth_v0()).expect("positive excess energy");
    let a_max = 3.0 * 2.0 * PI / kp;
    (1..=count)
        .map(|i| a_max * i as f64 / count as f64)
        .collect()
}

/// Relative half-width of the local energy stencil.
const LOCAL_HALF_WIDTH: f64 = 1e-3;

/// τ at one energy from a 5-node fourth-order stencil centred on it.
fn local_phase_time(
    model: &DispersionModel,
    spec: &QuantumWellSpec,
    energy: f64,
    a: f64,
) -> Result<f64> {
    let hbar = PhysicalConstants::SI.hbar;
    let half = LOCAL_HALF_WIDTH * (energy - spec.baseline_e0());
    let to_hz = |e: f64| e / (2.0 * PI * hbar);
    let grid = FrequencyGrid::new(to_hz(energy - half), to_hz(energy + half), 5)?;
    let profile = phase_time_numeric(model, &grid, a, Stencil::Fourth)?;
    Ok(profile.tau[2])
}

/// For each energy, does any width on `widths` give τ < 0?
pub fn negative_condition_scan(
    spec: &QuantumWellSpec,
    energies: &[f64],
    widths: &[f64],
    exec: Exec,
) -> Result<ConditionReport> {
    if let Some(&e) = energies.iter().find(|&&e| !(e > spec.baseline_e0())) {
        return Err(invalid("energy", format!("{e} J is not above E0")));
    }
    if let Some(&a) = widths.iter().find(|&&a| !(a >= 0.0)) {
        return Err(invalid("width", format!("{a} m is negative")));
    }
    let model = DispersionModel::from(*spec);
    let nw = widths.len();
    let taus = exec.try_map(energies.len() * nw, |idx| {
        local_phase_time(&model, spec, energies[idx / nw], widths[idx % nw])
    })?;
    let rows = energies
        .iter()
        .enumerate()
        .map(|(i, &energy)| {
            let row = &taus[i * nw..(i + 1) * nw];
            let (jmin, &min_tau) = row
                .iter()
                .enumerate()
                .min_by(|a, b| a.1.total_cmp(b.1))
                .unwrap_or((0, &f64::INFINITY));
            EnergyRow {
                energy,
                depth_fraction: (energy - spec.baseline_e0()) / spec.depth_v0(),
                min_tau,
                min_tau_width: widths.get(jmin).copied().unwrap_or(f64::NAN),
                negative_widths: row.iter().filter(|&&t| t < -SIGN_THRESHOLD_S).count(),
            }
        })
        .collect();
    Ok(ConditionReport { rows })
}
