//! Two-port transmission traces: loading, reference-plane correction and
//! phase-time extraction by numerical differentiation.
//!
//! A trace of the whole guide (length `l`) carries, besides the well's own
//! transmission `F`, the empty-guide phase `k(l − a)` of the unfilled
//! sections. [`deembed`] removes it either from the dispersion relation
//! (`S21 · e^{−ik(l−a)}`) or from a measured empty-guide reference trace
//! scaled to the unfilled length.

use std::f64::consts::PI;
use std::io::{BufRead, Write};

use num_complex::Complex64;

use crate::dispersion::{GuideGeometry, Medium, Waveguide};
use crate::error::{invalid, Error, Result};
use crate::phasetime::{
    scatterer_at, unwrap_phase, FrequencyGrid, Method, PhaseTimeProfile, Stencil,
};
use crate::scattering::{principal_arg, transmission_coefficient};

/// Slack on |S21| ≤ 1 for measurement noise.
pub const PASSIVITY_TOL: f64 = 1e-6;

/// Reference magnitudes below this are treated as no signal.
const MIN_REFERENCE_MAGNITUDE: f64 = 1e-9;

pub const TRACE_CSV_HEADER: &str = "freq_hz,s21_re,s21_im";
pub const PROFILE_CSV_HEADER: &str = "freq_hz,phase_rad_unwrapped,tau_seconds";

#[derive(Debug, Clone, PartialEq)]
pub struct TraceMeta {
    pub guide_length_l: f64,
    pub well_width_a: f64,
    pub label: String,
}

/// Transmission samples on a strictly increasing frequency axis.
#[derive(Debug, Clone, PartialEq)]
pub struct SParamTrace {
    frequencies: Vec<f64>,
    s21: Vec<Complex64>,
    pub meta: TraceMeta,
}

impl SParamTrace {
    pub fn new(frequencies: Vec<f64>, s21: Vec<Complex64>, meta: TraceMeta) -> Result<Self> {
        if frequencies.len() != s21.len() {
            return Err(Error::Validation(format!(
                "{} frequencies but {} samples",
                frequencies.len(),
                s21.len()
            )));
        }
        if frequencies.len() < 3 {
            return Err(Error::Validation(format!(
                "need at least 3 samples, got {}",
                frequencies.len()
            )));
        }
        if let Some(i) = frequencies.windows(2).position(|w| !(w[1] > w[0])) {
            return Err(Error::Validation(format!(
                "frequencies not strictly increasing at sample {} ({} Hz -> {} Hz)",
                i + 1,
                frequencies[i],
                frequencies[i + 1]
            )));
        }
        if let Some(i) = s21
            .iter()
            .position(|z| !z.re.is_finite() || !z.im.is_finite() || z.norm() > 1.0 + PASSIVITY_TOL)
        {
            return Err(Error::Validation(format!(
                "sample {} has |S21| = {} (passive device needs <= 1)",
                i,
                s21[i].norm()
            )));
        }
        Ok(Self {
            frequencies,
            s21,
            meta,
        })
    }

    pub fn frequencies(&self) -> &[f64] {
        &self.frequencies
    }

    pub fn s21(&self) -> &[Complex64] {
        &self.s21
    }

    pub fn len(&self) -> usize {
        self.frequencies.len()
    }

    pub fn is_empty(&self) -> bool {
        self.frequencies.is_empty()
    }

    /// Same axis and metadata, transformed samples.
    pub fn map_samples(&self, f: impl Fn(f64, Complex64) -> Complex64) -> Result<Self> {
        let s21 = self
            .frequencies
            .iter()
            .zip(&self.s21)
            .map(|(&fr, &z)| f(fr, z))
            .collect();
        Self::new(self.frequencies.clone(), s21, self.meta.clone())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TraceFormat {
    /// `freq_hz,s21_re,s21_im` with a header line.
    Csv,
    /// Touchstone v1 two-port, `# HZ S RI R 50`.
    TouchstoneRi,
}

pub fn load_trace<R: BufRead>(
    source: R,
    format: TraceFormat,
    meta: TraceMeta,
) -> Result<SParamTrace> {
    let (f, s) = match format {
        TraceFormat::Csv => parse_csv(source)?,
        TraceFormat::TouchstoneRi => parse_touchstone(source)?,
    };
    SParamTrace::new(f, s, meta)
}

fn parse_number(field: &str, line: usize, what: &str) -> Result<f64> {
    field.trim().parse::<f64>().map_err(|_| Error::Parse {
        line,
        reason: format!("cannot parse {what} from {:?}", field.trim()),
    })
}

type Columns = (Vec<f64>, Vec<Complex64>);

fn parse_csv<R: BufRead>(source: R) -> Result<Columns> {
    let mut freqs = Vec::new();
    let mut s21 = Vec::new();
    let mut lines = source.lines().enumerate().peekable();
    match lines.next() {
        Some((_, line)) => {
            let line = line?;
            if line.trim_end_matches('\r') != TRACE_CSV_HEADER {
                return Err(Error::Parse {
                    line: 1,
                    reason: format!("expected header {TRACE_CSV_HEADER:?}"),
                });
            }
        }
        None => {
            return Err(Error::Parse {
                line: 1,
                reason: "empty input".into(),
            })
        }
    }
    while let Some((idx, line)) = lines.next() {
        let lineno = idx + 1;
        let line = line?;
        let line = line.trim_end_matches('\r');
        if line.is_empty() && lines.peek().is_none() {
            break;
        }
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != 3 {
            return Err(Error::Parse {
                line: lineno,
                reason: format!("expected 3 comma-separated fields, got {}", fields.len()),
            });
        }
        freqs.push(parse_number(fields[0], lineno, "freq_hz")?);
        s21.push(Complex64::new(
            parse_number(fields[1], lineno, "s21_re")?,
            parse_number(fields[2], lineno, "s21_im")?,
        ));
    }
    Ok((freqs, s21))
}

fn parse_touchstone<R: BufRead>(source: R) -> Result<Columns> {
    const SUPPORTED: &str =
        "only version-1 two-port files with option line `# HZ S RI R 50` are supported";
    let mut freqs = Vec::new();
    let mut s21 = Vec::new();
    let mut seen_options = false;
    for (idx, line) in source.lines().enumerate() {
        let lineno = idx + 1;
        let line = line?;
        let content = line.split('!').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        if let Some(rest) = content.strip_prefix('#') {
            let tokens: Vec<String> = rest
                .split_whitespace()
                .map(str::to_ascii_uppercase)
                .collect();
            if seen_options || tokens != ["HZ", "S", "RI", "R", "50"] {
                return Err(Error::Parse {
                    line: lineno,
                    reason: format!("unsupported option line {content:?}: {SUPPORTED}"),
                });
            }
            seen_options = true;
            continue;
        }
        if content.starts_with('[') {
            return Err(Error::Parse {
                line: lineno,
                reason: format!("version-2 keyword {content:?}: {SUPPORTED}"),
            });
        }
        if !seen_options {
            return Err(Error::Parse {
                line: lineno,
                reason: format!("data before option line: {SUPPORTED}"),
            });
        }
        let values: Vec<&str> = content.split_whitespace().collect();
        if values.len() != 9 {
            return Err(Error::Parse {
                line: lineno,
                reason: format!("expected 9 values in a two-port row, got {}", values.len()),
            });
        }
        freqs.push(parse_number(values[0], lineno, "frequency")?);
        s21.push(Complex64::new(
            parse_number(values[3], lineno, "S21 real part")?,
            parse_number(values[4], lineno, "S21 imaginary part")?,
        ));
    }
    if !seen_options {
        return Err(Error::Parse {
            line: 0,
            reason: format!("missing option line: {SUPPORTED}"),
        });
    }
    Ok((freqs, s21))
}

/// Writes a trace as CSV. `{}` formatting of f64 is the shortest string that
/// parses back to the same value, so the round trip is lossless.
pub fn save_trace_csv<W: Write>(trace: &SParamTrace, mut w: W) -> Result<()> {
    writeln!(w, "{TRACE_CSV_HEADER}")?;
    for (f, z) in trace.frequencies.iter().zip(&trace.s21) {
        writeln!(w, "{f},{},{}", z.re, z.im)?;
    }
    Ok(())
}

pub fn write_profile_csv<W: Write>(profile: &PhaseTimeProfile, mut w: W) -> Result<()> {
    writeln!(w, "{PROFILE_CSV_HEADER}")?;
    for ((f, p), t) in profile
        .frequencies
        .iter()
        .zip(&profile.phase_unwrapped)
        .zip(&profile.tau)
    {
        writeln!(w, "{f},{p},{t}")?;
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CorrectionMode {
    AnalyticK,
    ReferenceTrace,
}

/// How the unfilled-section phase is removed.
#[derive(Debug, Clone, Copy)]
pub enum Correction<'a> {
    /// Multiply by e^{−ik(l−a)} with k from the guide dispersion.
    AnalyticK,
    /// Subtract ((l−a)/l) times the unwrapped phase of an empty-guide trace.
    ReferenceTrace(&'a SParamTrace),
}

/// Transmission of the well alone, referenced to its faces.
#[derive(Debug, Clone, PartialEq)]
pub struct CorrectedTransmission {
    pub frequencies: Vec<f64>,
    pub f: Vec<Complex64>,
    pub mode: CorrectionMode,
}

fn empty_guide(geometry: &GuideGeometry) -> Waveguide {
    Waveguide::new(*geometry, Medium::vacuum())
}

pub fn deembed(
    trace: &SParamTrace,
    geometry: &GuideGeometry,
    correction: Correction<'_>,
) -> Result<CorrectedTransmission> {
    let guide = empty_guide(geometry);
    let l = geometry.total_length_l();
    let unfilled = l - geometry.well_width_a();
    let freqs = trace.frequencies.clone();
    match correction {
        Correction::AnalyticK => {
            let f = freqs
                .iter()
                .zip(&trace.s21)
                .map(|(&fr, &z)| {
                    let k = guide.outer_wavenumber(2.0 * PI * fr)?;
                    Ok(z * Complex64::from_polar(1.0, -k * unfilled))
                })
                .collect::<Result<_>>()?;
            Ok(CorrectedTransmission {
                frequencies: freqs,
                f,
                mode: CorrectionMode::AnalyticK,
            })
        }
        Correction::ReferenceTrace(reference) => {
            check_same_axis(&trace.frequencies, &reference.frequencies)?;
            if let Some(i) = reference
                .s21
                .iter()
                .position(|z| z.norm() < MIN_REFERENCE_MAGNITUDE)
            {
                return Err(Error::Validation(format!(
                    "reference magnitude {} at sample {i} is too small to carry a phase",
                    reference.s21[i].norm()
                )));
            }
            if !(l > 0.0) {
                return Err(invalid("total_length_l", "reference scaling needs l > 0"));
            }
            let ref_phase = anchored_reference_phase(reference, &guide, l)?;
            let own: Vec<f64> = trace.s21.iter().map(|&z| principal_arg(z)).collect();
            let own = unwrap_phase(&own)?;
            let scale = unfilled / l;
            let f = own
                .iter()
                .zip(&ref_phase)
                .zip(&trace.s21)
                .map(|((p, r), z)| Complex64::from_polar(z.norm(), p - scale * r))
                .collect();
            Ok(CorrectedTransmission {
                frequencies: freqs,
                f,
                mode: CorrectionMode::ReferenceTrace,
            })
        }
    }
}

/// Unwrapped reference phase shifted by the 2π multiple that puts its first
/// sample nearest k·l; the trace alone fixes the phase only modulo 2π.
fn anchored_reference_phase(
    reference: &SParamTrace,
    guide: &Waveguide,
    l: f64,
) -> Result<Vec<f64>> {
    let principal: Vec<f64> = reference.s21.iter().map(|&z| principal_arg(z)).collect();
    let mut phase = unwrap_phase(&principal)?;
    let expected = guide.outer_wavenumber(2.0 * PI * reference.frequencies[0])? * l;
    let shift = 2.0 * PI * ((expected - phase[0]) / (2.0 * PI)).round();
    phase.iter_mut().for_each(|p| *p += shift);
    Ok(phase)
}

fn check_same_axis(a: &[f64], b: &[f64]) -> Result<()> {
    if a.len() != b.len() {
        return Err(Error::AxisMismatch(format!(
            "{} vs {} samples",
            a.len(),
            b.len()
        )));
    }
    if let Some(i) = a
        .iter()
        .zip(b)
        .position(|(x, y)| (x - y).abs() > 1e-9 * x.abs().max(y.abs()))
    {
        return Err(Error::AxisMismatch(format!(
            "sample {i}: {} Hz vs {} Hz",
            a[i], b[i]
        )));
    }
    Ok(())
}

/// Options for turning a corrected transmission into a phase-time curve.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct ProcessingOptions {
    pub stencil: Stencil,
    /// Centred moving average over this many samples (odd, ≥ 1) applied to
    /// the unwrapped phase before differentiation. Off by default.
    pub smooth_window: Option<usize>,
}

/// τ = (2π)⁻¹ dφ/df of the corrected transmission.
pub fn measured_phase_time(
    ct: &CorrectedTransmission,
    options: ProcessingOptions,
) -> Result<PhaseTimeProfile> {
    if ct.frequencies.len() < 3 {
        return Err(invalid("samples", "need at least 3"));
    }
    let principal: Vec<f64> = ct.f.iter().map(|&z| principal_arg(z)).collect();
    let mut profile = PhaseTimeProfile::from_phase(
        ct.frequencies.clone(),
        &principal,
        options.stencil,
        Method::Measured,
    )?;
    if let Some(window) = options.smooth_window {
        let smoothed = moving_average(&profile.phase_unwrapped, window)?;
        let dphi_df =
            crate::phasetime::derivative(&profile.frequencies, &smoothed, options.stencil)?;
        profile.tau = dphi_df.into_iter().map(|d| d / (2.0 * PI)).collect();
        profile.phase_unwrapped = smoothed;
    }
    Ok(profile)
}

fn moving_average(x: &[f64], window: usize) -> Result<Vec<f64>> {
    if window == 0 || window.is_multiple_of(2) {
        return Err(invalid(
            "smooth_window",
            format!("must be odd and >= 1, got {window}"),
        ));
    }
    let half = window / 2;
    Ok((0..x.len())
        .map(|i| {
            // shrink symmetrically near the ends so the average stays centred
            let h = half.min(i).min(x.len() - 1 - i);
            let slice = &x[i - h..=i + h];
            slice.iter().sum::<f64>() / slice.len() as f64
        })
        .collect())
}

/// Synthetic full-guide trace: S21 = F · e^{+ik(l−a)}.
pub fn forward_model(
    geometry: &GuideGeometry,
    medium: &Medium,
    grid: &FrequencyGrid,
) -> Result<SParamTrace> {
    let model = Waveguide::new(*geometry, medium.clone()).into();
    let guide = empty_guide(geometry);
    let a = geometry.well_width_a();
    let unfilled = geometry.total_length_l() - a;
    let freqs = grid.frequencies();
    let s21 = freqs
        .iter()
        .map(|&f| {
            let omega = 2.0 * PI * f;
            let s = scatterer_at(&model, omega, a)?;
            let k = guide.outer_wavenumber(omega)?;
            Ok(transmission_coefficient(&s) * Complex64::from_polar(1.0, k * unfilled))
        })
        .collect::<Result<_>>()?;
    SParamTrace::new(
        freqs,
        s21,
        TraceMeta {
            guide_length_l: geometry.total_length_l(),
            well_width_a: a,
            label: format!("{} a={:.1}mm", medium.name(), a * 1e3),
        },
    )
}
