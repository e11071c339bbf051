//! Run configuration: TOML file values with command-line overrides.

use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use clap::{Args, ValueEnum};
use qwell::dispersion::{
    energy_mapping, GuideGeometry, Medium, PhysicalConstants, QuantumWellSpec,
};
use qwell::presets::{Preset, PRESET_NAMES};
use serde::Deserialize;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, ValueEnum, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    #[default]
    Em,
    Qm,
}

/// Flags shared by every subcommand.
#[derive(Debug, Clone, Default, Args)]
pub struct CommonArgs {
    /// Built-in configuration (teflon-xband, perspex-xband, vacuum-xband).
    #[arg(long)]
    pub preset: Option<String>,
    /// Refractive index of the well filling; overrides the preset medium.
    #[arg(long)]
    pub n: Option<f64>,
    /// Broad-wall width b in mm.
    #[arg(long)]
    pub guide_width_mm: Option<f64>,
    /// Total guide length l in mm.
    #[arg(long)]
    pub length_mm: Option<f64>,
    /// Well width a in mm; repeat for several wells.
    #[arg(long = "well-mm")]
    pub well_mm: Vec<f64>,
    #[arg(long)]
    pub fmin_ghz: Option<f64>,
    #[arg(long)]
    pub fmax_ghz: Option<f64>,
    /// Frequency nodes.
    #[arg(long)]
    pub points: Option<usize>,
    /// Output directory.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// TOML file with default values; flags win.
    #[arg(long)]
    pub config: Option<PathBuf>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    pub preset: Option<String>,
    pub mode: Option<Mode>,
    pub out: Option<PathBuf>,
    #[serde(default)]
    pub guide: GuideSection,
    #[serde(default)]
    pub band: BandSection,
    #[serde(default)]
    pub wells: WellsSection,
    #[serde(default)]
    pub regions: RegionsSection,
    #[serde(default)]
    pub packet: PacketSection,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GuideSection {
    pub n: Option<f64>,
    pub width_mm: Option<f64>,
    pub length_mm: Option<f64>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BandSection {
    pub fmin_ghz: Option<f64>,
    pub fmax_ghz: Option<f64>,
    pub points: Option<usize>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WellsSection {
    pub mm: Option<Vec<f64>>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RegionsSection {
    pub amax_mm: Option<f64>,
    pub a_points: Option<usize>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PacketSection {
    pub fc_ghz: Option<f64>,
    pub sigma_mhz: Option<f64>,
}

impl FileConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text =
            fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        // toml errors span several lines; keep the first for a one-line report
        toml::from_str(&text).map_err(|e| {
            let msg = e.to_string();
            let first = msg.lines().next().unwrap_or("invalid TOML").to_string();
            anyhow::anyhow!("{}: {}", path.display(), first)
        })
    }
}

/// Fully resolved parameters, SI units.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub preset_name: String,
    pub medium: Medium,
    pub width_b: f64,
    pub length_l: f64,
    /// Well widths in mm as given, for file naming.
    pub wells_mm: Vec<f64>,
    pub wells_from_flags: bool,
    pub band: (f64, f64),
    pub points: Option<usize>,
    pub out: PathBuf,
    pub mode: Mode,
    pub file: FileConfig,
}

pub fn unknown_preset(name: &str) -> anyhow::Error {
    anyhow::anyhow!(
        "unknown preset '{name}' (available: {})",
        PRESET_NAMES.join(", ")
    )
}

impl RunConfig {
    pub fn resolve(args: &CommonArgs, mode: Option<Mode>) -> Result<Self> {
        let file = match &args.config {
            Some(p) => FileConfig::load(p)?,
            None => FileConfig::default(),
        };
        let name = args
            .preset
            .clone()
            .or_else(|| file.preset.clone())
            .unwrap_or_else(|| PRESET_NAMES[0].to_string());
        let preset = Preset::by_name(&name).ok_or_else(|| unknown_preset(&name))?;

        let medium = match args.n.or(file.guide.n) {
            Some(n) => Medium::new("custom", n)?,
            None => preset.medium.clone(),
        };
        let width_b = args
            .guide_width_mm
            .or(file.guide.width_mm)
            .map_or(preset.width_b, |v| v * 1e-3);
        let length_l = args
            .length_mm
            .or(file.guide.length_mm)
            .map_or(preset.total_length_l, |v| v * 1e-3);

        let (wells_mm, wells_from_flags) = if !args.well_mm.is_empty() {
            (args.well_mm.clone(), true)
        } else if let Some(w) = &file.wells.mm {
            (w.clone(), true)
        } else {
            (preset.widths.iter().map(|a| a * 1e3).collect(), false)
        };
        for &w in &wells_mm {
            if !(w >= 0.0) || !w.is_finite() {
                bail!("well width must be a nonnegative number of mm, got {w}");
            }
            if w * 1e-3 > length_l {
                bail!(
                    "well width {w} mm exceeds the guide length {} mm",
                    length_l * 1e3
                );
            }
        }

        let fmin = args
            .fmin_ghz
            .or(file.band.fmin_ghz)
            .map_or(preset.band.0, |v| v * 1e9);
        let fmax = args
            .fmax_ghz
            .or(file.band.fmax_ghz)
            .map_or(preset.band.1, |v| v * 1e9);
        if !(fmax > fmin) || !(fmin > 0.0) {
            bail!(
                "empty frequency band: {} GHz to {} GHz",
                fmin / 1e9,
                fmax / 1e9
            );
        }
        let points = args.points.or(file.band.points);
        if let Some(p) = points {
            if p < 3 {
                bail!("need at least 3 frequency points, got {p}");
            }
        }

        Ok(Self {
            preset_name: preset.name.to_string(),
            medium,
            width_b,
            length_l,
            wells_mm,
            wells_from_flags,
            band: (fmin, fmax),
            points,
            out: args
                .out
                .clone()
                .or_else(|| file.out.clone())
                .unwrap_or_else(|| PathBuf::from(".")),
            mode: mode.or(file.mode).unwrap_or_default(),
            file,
        })
    }

    pub fn geometry(&self, a: f64) -> Result<GuideGeometry> {
        Ok(GuideGeometry::new(self.width_b, self.length_l, a)?)
    }

    pub fn quantum_spec(&self) -> Result<QuantumWellSpec> {
        let e = energy_mapping(&self.geometry(0.0)?, &self.medium, &PhysicalConstants::SI)?;
        e.to_spec()
            .context("qm mode needs a well of nonzero depth (n > 1)")
    }
}
