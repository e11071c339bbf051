//! Built-in experiment configurations: X-band guide with Teflon, Perspex or
//! no filling, each with its measured well widths and frequency band.

use crate::dispersion::{GuideGeometry, Medium, Waveguide};
use crate::error::Result;

#[derive(Debug, Clone, PartialEq)]
pub struct Preset {
    pub name: &'static str,
    pub medium: Medium,
    /// Broad-wall width b, m.
    pub width_b: f64,
    /// Total guide length l, m.
    pub total_length_l: f64,
    /// Default sweep band, Hz.
    pub band: (f64, f64),
    /// Default well widths, m.
    pub widths: Vec<f64>,
}

pub const PRESET_NAMES: [&str; 3] = ["teflon-xband", "perspex-xband", "vacuum-xband"];

const XBAND_B: f64 = 22.86e-3;
const XBAND_L: f64 = 250e-3;

impl Preset {
    pub fn by_name(name: &str) -> Option<Self> {
        let mm = |v: &[f64]| v.iter().map(|x| x * 1e-3).collect::<Vec<_>>();
        let (medium, band, widths) = match name.to_ascii_lowercase().as_str() {
            "teflon-xband" => (
                Medium::teflon(),
                (6.56e9, 6.9e9),
                mm(&[4.0, 27.0, 38.7, 47.5, 62.6, 71.1, 82.3]),
            ),
            "perspex-xband" => (Medium::perspex(), (6.6e9, 8.0e9), mm(&[6.0, 18.0, 24.0])),
            "vacuum-xband" => (Medium::vacuum(), (6.6e9, 8.0e9), mm(&[50.0, 100.0])),
            _ => return None,
        };
        Some(Self {
            name: PRESET_NAMES
                .iter()
                .find(|p| p.eq_ignore_ascii_case(name))
                .copied()
                .unwrap_or("custom"),
            medium,
            width_b: XBAND_B,
            total_length_l: XBAND_L,
            band,
            widths,
        })
    }

    pub fn all() -> Vec<Self> {
        PRESET_NAMES
            .iter()
            .filter_map(|n| Self::by_name(n))
            .collect()
    }

    pub fn geometry(&self, well_width_a: f64) -> Result<GuideGeometry> {
        GuideGeometry::new(self.width_b, self.total_length_l, well_width_a)
    }

    pub fn waveguide(&self, well_width_a: f64) -> Result<Waveguide> {
        Ok(Waveguide::new(
            self.geometry(well_width_a)?,
            self.medium.clone(),
        ))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn presets_resolve() {
        for name in PRESET_NAMES {
            let p = Preset::by_name(name).unwrap();
            assert_eq!(p.name, name);
            assert!(p.waveguide(0.0).unwrap().cutoffs().f0() < p.band.0);
        }
        assert_eq!(
            Preset::by_name("TEFLON-XBAND").unwrap().name,
            "teflon-xband"
        );
        assert!(Preset::by_name("glass").is_none());
        assert_eq!(Preset::all().len(), 3);
    }
}
