//! Physical constants, guide geometry, media, and the two dispersion models
//! (hollow/partially filled rectangular waveguide and massive quantum
//! particle) that map an angular frequency to the outer and well wave numbers.
//!
//! All quantities are strict SI: rad/s, metres, joules.

use std::f64::consts::PI;

use crate::error::{invalid, Error, Result};

/// Fundamental constants. Immutable; use [`PhysicalConstants::SI`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhysicalConstants {
    /// Speed of light, m/s.
    pub c: f64,
    /// Reduced Planck constant, J s.
    pub hbar: f64,
    /// Electron rest mass, kg.
    pub electron_mass: f64,
}

impl PhysicalConstants {
    /// CODATA 2018 values.
    pub const SI: PhysicalConstants = PhysicalConstants {
        c: 299_792_458.0,
        hbar: 1.054_571_817e-34,
        electron_mass: 9.109_383_701_5e-31,
    };
}

impl Default for PhysicalConstants {
    fn default() -> Self {
        Self::SI
    }
}

/// Elementary charge, used only for μeV unit conversion.
pub const ELEMENTARY_CHARGE: f64 = 1.602_176_634e-19;

/// Joules per micro-electronvolt.
pub const MICRO_EV: f64 = ELEMENTARY_CHARGE * 1e-6;

/// Broad-wall width, total guide length and well (filled section) width.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GuideGeometry {
    width_b: f64,
    total_length_l: f64,
    well_width_a: f64,
}

impl GuideGeometry {
    pub fn new(width_b: f64, total_length_l: f64, well_width_a: f64) -> Result<Self> {
        if !(width_b > 0.0) || !width_b.is_finite() {
            return Err(invalid(
                "width_b",
                format!("must be positive, got {width_b}"),
            ));
        }
        if !(well_width_a >= 0.0)
            || !(well_width_a <= total_length_l)
            || !total_length_l.is_finite()
        {
            return Err(invalid(
                "well_width_a",
                format!("need 0 <= a <= l, got a = {well_width_a}, l = {total_length_l}"),
            ));
        }
        Ok(Self {
            width_b,
            total_length_l,
            well_width_a,
        })
    }

    /// X-band WR-90 guide (b = 22.86 mm, l = 250 mm) holding a well of width `a`.
    pub fn xband(well_width_a: f64) -> Result<Self> {
        Self::new(22.86e-3, 250e-3, well_width_a)
    }

    pub fn width_b(&self) -> f64 {
        self.width_b
    }

    pub fn total_length_l(&self) -> f64 {
        self.total_length_l
    }

    pub fn well_width_a(&self) -> f64 {
        self.well_width_a
    }

    /// Same guide with a different well width.
    pub fn with_well_width(&self, a: f64) -> Result<Self> {
        Self::new(self.width_b, self.total_length_l, a)
    }
}

/// Lossless dielectric filling the well section.
#[derive(Debug, Clone, PartialEq)]
pub struct Medium {
    refractive_index_n: f64,
    name: String,
}

impl Medium {
    pub fn new(name: impl Into<String>, refractive_index_n: f64) -> Result<Self> {
        if !(refractive_index_n >= 1.0) || !refractive_index_n.is_finite() {
            return Err(invalid(
                "refractive_index_n",
                format!("passive dielectric needs n >= 1, got {refractive_index_n}"),
            ));
        }
        Ok(Self {
            refractive_index_n,
            name: name.into(),
        })
    }

    pub fn teflon() -> Self {
        Self {
            refractive_index_n: 2.05f64.sqrt(),
            name: "teflon".into(),
        }
    }

    pub fn perspex() -> Self {
        Self {
            refractive_index_n: 1.6,
            name: "perspex".into(),
        }
    }

    pub fn vacuum() -> Self {
        Self {
            refractive_index_n: 1.0,
            name: "vacuum".into(),
        }
    }

    /// Looks up a built-in material by name.
    pub fn preset(name: &str) -> Option<Self> {
        match name.to_ascii_lowercase().as_str() {
            "teflon" => Some(Self::teflon()),
            "perspex" => Some(Self::perspex()),
            "vacuum" => Some(Self::vacuum()),
            _ => None,
        }
    }

    pub const PRESET_NAMES: [&'static str; 3] = ["teflon", "perspex", "vacuum"];

    pub fn n(&self) -> f64 {
        self.refractive_index_n
    }

    pub fn name(&self) -> &str {
        &self.name
    }
}

/// Quantum well: baseline E0, depth V0 and particle mass.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuantumWellSpec {
    baseline_e0: f64,
    depth_v0: f64,
    mass_m: f64,
}

impl QuantumWellSpec {
    pub fn new(baseline_e0: f64, depth_v0: f64, mass_m: f64) -> Result<Self> {
        if !(baseline_e0 >= 0.0) || !baseline_e0.is_finite() {
            return Err(invalid(
                "baseline_e0",
                format!("must be >= 0, got {baseline_e0}"),
            ));
        }
        if !(depth_v0 > 0.0) || !depth_v0.is_finite() {
            return Err(invalid("depth_v0", format!("must be > 0, got {depth_v0}")));
        }
        if !(mass_m > 0.0) || !mass_m.is_finite() {
            return Err(invalid("mass_m", format!("must be > 0, got {mass_m}")));
        }
        Ok(Self {
            baseline_e0,
            depth_v0,
            mass_m,
        })
    }

    /// Electron in a well of the given baseline and depth.
    pub fn electron(baseline_e0: f64, depth_v0: f64) -> Result<Self> {
        Self::new(baseline_e0, depth_v0, PhysicalConstants::SI.electron_mass)
    }

    pub fn baseline_e0(&self) -> f64 {
        self.baseline_e0
    }

    pub fn depth_v0(&self) -> f64 {
        self.depth_v0
    }

    pub fn mass_m(&self) -> f64 {
        self.mass_m
    }
}

/// Empty-guide and filled-guide cutoff angular frequencies.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Cutoffs {
    pub omega0: f64,
    pub omega_n: f64,
}

impl Cutoffs {
    pub fn f0(&self) -> f64 {
        self.omega0 / (2.0 * PI)
    }

    pub fn f_n(&self) -> f64 {
        self.omega_n / (2.0 * PI)
    }
}

/// ω0 = πc/b for the empty guide and ωn = ω0/n for the filled section.
pub fn cutoffs(geometry: &GuideGeometry, medium: &Medium) -> Result<Cutoffs> {
    let b = geometry.width_b();
    if !(b > 0.0) {
        return Err(invalid("width_b", "must be positive"));
    }
    let omega0 = PI * PhysicalConstants::SI.c / b;
    Ok(Cutoffs {
        omega0,
        omega_n: omega0 / medium.n(),
    })
}

/// Partially dielectric-filled rectangular guide.
#[derive(Debug, Clone, PartialEq)]
pub struct Waveguide {
    pub geometry: GuideGeometry,
    pub medium: Medium,
}

impl Waveguide {
    pub fn new(geometry: GuideGeometry, medium: Medium) -> Self {
        Self { geometry, medium }
    }

    pub fn cutoffs(&self) -> Cutoffs {
        // geometry and medium are validated on construction
        cutoffs(&self.geometry, &self.medium).expect("validated geometry")
    }

    pub fn n(&self) -> f64 {
        self.medium.n()
    }

    /// Outer (empty) wave number k alone.
    pub fn outer_wavenumber(&self, omega: f64) -> Result<f64> {
        let omega0 = self.cutoffs().omega0;
        if !(omega > omega0) {
            return Err(Error::Evanescent {
                omega,
                cutoff: omega0,
            });
        }
        let c = PhysicalConstants::SI.c;
        Ok(((omega - omega0) * (omega + omega0)).sqrt() / c)
    }
}

/// Massive particle scattered by a square well.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuantumParticle {
    pub spec: QuantumWellSpec,
}

/// A rule mapping angular frequency to the wave numbers (k, k').
#[derive(Debug, Clone, PartialEq)]
pub enum DispersionModel {
    Waveguide(Waveguide),
    Particle(QuantumParticle),
}

impl From<Waveguide> for DispersionModel {
    fn from(w: Waveguide) -> Self {
        DispersionModel::Waveguide(w)
    }
}

impl From<QuantumWellSpec> for DispersionModel {
    fn from(spec: QuantumWellSpec) -> Self {
        DispersionModel::Particle(QuantumParticle { spec })
    }
}

/// Which side of the well a velocity refers to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Region {
    Outer,
    Well,
}

impl DispersionModel {
    /// Lowest angular frequency with real outer wave number.
    pub fn cutoff_omega(&self) -> f64 {
        match self {
            DispersionModel::Waveguide(w) => w.cutoffs().omega0,
            DispersionModel::Particle(p) => p.spec.baseline_e0 / PhysicalConstants::SI.hbar,
        }
    }

    /// (k, k') at angular frequency `omega`. For the particle model E = ħω.
    pub fn wavenumbers(&self, omega: f64) -> Result<(f64, f64)> {
        match self {
            DispersionModel::Waveguide(w) => em_wavenumbers(w, omega),
            DispersionModel::Particle(p) => {
                let hbar = PhysicalConstants::SI.hbar;
                qm_wavenumbers(&p.spec, hbar * omega).map_err(|e| match e {
                    Error::Evanescent { .. } => Error::Evanescent {
                        omega,
                        cutoff: self.cutoff_omega(),
                    },
                    other => other,
                })
            }
        }
    }

    /// Well width independent part of the scattering geometry, if any.
    pub fn as_waveguide(&self) -> Option<&Waveguide> {
        match self {
            DispersionModel::Waveguide(w) => Some(w),
            DispersionModel::Particle(_) => None,
        }
    }

    pub fn velocities(&self, omega: f64, region: Region) -> Result<(f64, f64)> {
        velocities(self, omega, region)
    }
}

/// k = √(ω²−ω0²)/c and k' = n√(ω²−ωn²)/c.
pub fn em_wavenumbers(model: &Waveguide, omega: f64) -> Result<(f64, f64)> {
    let Cutoffs { omega0, omega_n } = model.cutoffs();
    if !(omega > omega0) {
        return Err(Error::Evanescent {
            omega,
            cutoff: omega0,
        });
    }
    let c = PhysicalConstants::SI.c;
    // factored form keeps precision just above cutoff
    let k = ((omega - omega0) * (omega + omega0)).sqrt() / c;
    let kprime = model.n() * ((omega - omega_n) * (omega + omega_n)).sqrt() / c;
    Ok((k, kprime))
}

/// k = √(2m(E−E0))/ħ and k' = √(2m(E+V0−E0))/ħ.
pub fn qm_wavenumbers(spec: &QuantumWellSpec, energy: f64) -> Result<(f64, f64)> {
    let hbar = PhysicalConstants::SI.hbar;
    let excess = energy - spec.baseline_e0;
    if !(excess > 0.0) {
        return Err(Error::Evanescent {
            omega: energy / hbar,
            cutoff: spec.baseline_e0 / hbar,
        });
    }
    let two_m = 2.0 * spec.mass_m;
    Ok((
        (two_m * excess).sqrt() / hbar,
        (two_m * (excess + spec.depth_v0)).sqrt() / hbar,
    ))
}

/// Quantum well equivalent of a guide: E0 = ħω0, V0 = ħ(ω0 − ωn).
///
/// The particle mass defaults to the electron mass. For an empty guide
/// (n = 1) the depth is zero, which [`QuantumWellSpec`] rejects, so this
/// returns the raw energies rather than a validated spec.
pub fn energy_mapping(
    geometry: &GuideGeometry,
    medium: &Medium,
    constants: &PhysicalConstants,
) -> Result<WellEnergies> {
    let Cutoffs { omega0, omega_n } = cutoffs(geometry, medium)?;
    Ok(WellEnergies {
        baseline_e0: constants.hbar * omega0,
        depth_v0: constants.hbar * (omega0 - omega_n),
        mass_m: constants.electron_mass,
    })
}

/// Energies of the mapped well. `depth_v0` may be zero.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WellEnergies {
    pub baseline_e0: f64,
    pub depth_v0: f64,
    pub mass_m: f64,
}

impl WellEnergies {
    /// Validated spec; fails for a zero-depth (n = 1) mapping.
    pub fn to_spec(&self) -> Result<QuantumWellSpec> {
        QuantumWellSpec::new(self.baseline_e0, self.depth_v0, self.mass_m)
    }
}

/// Phase and group velocity (m/s) in the outer or well region.
pub fn velocities(model: &DispersionModel, omega: f64, region: Region) -> Result<(f64, f64)> {
    let (k, kprime) = model.wavenumbers(omega)?;
    let kr = match region {
        Region::Outer => k,
        Region::Well => kprime,
    };
    let v_phase = omega / kr;
    let v_group = match model {
        DispersionModel::Waveguide(w) => {
            let c = PhysicalConstants::SI.c;
            let n2 = match region {
                Region::Outer => 1.0,
                Region::Well => w.n() * w.n(),
            };
            c * c * kr / (n2 * omega)
        }
        DispersionModel::Particle(p) => PhysicalConstants::SI.hbar * kr / p.spec.mass_m,
    };
    Ok((v_phase, v_group))
}
