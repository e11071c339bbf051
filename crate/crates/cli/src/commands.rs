use std::collections::BTreeSet;
use std::f64::consts::PI;
use std::fs::File;
use std::io::{BufReader, Write};
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use clap::{Args, ValueEnum};
use qwell::dispersion::{energy_mapping, DispersionModel, PhysicalConstants, Waveguide, MICRO_EV};
use qwell::measurement::{
    deembed, load_trace, measured_phase_time, write_profile_csv, Correction, ProcessingOptions,
    SParamTrace, TraceFormat, TraceMeta,
};
use qwell::packet::{peak_delay, synthesize_and_transmit, PacketSpec, TimeTrace};
use qwell::phasetime::{
    phase_time_analytic, phase_time_numeric_adaptive, region_map, transmission_sweep,
    FrequencyGrid, Stencil,
};
use qwell::Exec;

use crate::config::{CommonArgs, Mode, RunConfig};
use crate::output::{
    num, packet_script, profile_script, regions_script, sweep_script, well_tag, write_atomic,
    write_text,
};

pub const SWEEP_HEADER: &str =
    "freq_hz,F_re,F_im,mag_sq,phase_rad_unwrapped,tau_analytic_s,tau_numeric_s";
pub const REGIONS_HEADER: &str = "a_m,f_hz,tau_s,negative_flag";
pub const TRACE_HEADER: &str = "t_seconds,envelope";
pub const PACKET_REPORT_HEADER: &str = "peak_delay_s,tau_phi_s,rel_error";

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum StencilArg {
    Second,
    Fourth,
}

impl From<StencilArg> for Stencil {
    fn from(s: StencilArg) -> Self {
        match s {
            StencilArg::Second => Stencil::Second,
            StencilArg::Fourth => Stencil::Fourth,
        }
    }
}

#[derive(Debug, Args)]
pub struct ConstantsArgs {
    #[command(flatten)]
    pub common: CommonArgs,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    #[arg(long, value_enum)]
    pub mode: Option<Mode>,
    /// Difference stencil for tau_numeric_s.
    #[arg(long, value_enum, default_value = "fourth")]
    pub stencil: StencilArg,
}

#[derive(Debug, Args)]
pub struct RegionsArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    #[arg(long, value_enum)]
    pub mode: Option<Mode>,
    /// Largest well width in mm.
    #[arg(long)]
    pub amax_mm: Option<f64>,
    /// Well-width nodes.
    #[arg(long)]
    pub a_points: Option<usize>,
}

#[derive(Debug, Args)]
pub struct PacketArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    #[arg(long, value_enum)]
    pub mode: Option<Mode>,
    /// Packet centre frequency in GHz.
    #[arg(long)]
    pub fc_ghz: Option<f64>,
    /// Gaussian spectral standard deviation in MHz.
    #[arg(long)]
    pub sigma_mhz: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum CorrectionArg {
    AnalyticK,
    Reference,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FormatArg {
    Csv,
    Touchstone,
}

#[derive(Debug, Args)]
pub struct DeembedArgs {
    /// Trace file (CSV `freq_hz,s21_re,s21_im` or Touchstone RI).
    pub input: PathBuf,
    #[command(flatten)]
    pub common: CommonArgs,
    #[arg(long, value_enum, default_value = "analytic-k")]
    pub mode: CorrectionArg,
    /// Empty-guide reference trace for `--mode reference`.
    #[arg(long = "ref")]
    pub reference: Option<PathBuf>,
    /// Odd moving-average window applied to the phase before differencing.
    #[arg(long)]
    pub smooth: Option<usize>,
    #[arg(long, value_enum, default_value = "second")]
    pub stencil: StencilArg,
    /// Input format; inferred from the extension when absent.
    #[arg(long, value_enum)]
    pub format: Option<FormatArg>,
}

fn model_for(cfg: &RunConfig, a: f64) -> Result<DispersionModel> {
    Ok(match cfg.mode {
        Mode::Em => Waveguide::new(cfg.geometry(a)?, cfg.medium.clone()).into(),
        Mode::Qm => cfg.quantum_spec()?.into(),
    })
}

fn check_band(model: &DispersionModel, f_min: f64) -> Result<()> {
    let f0 = model.cutoff_omega() / (2.0 * PI);
    if !(f_min > f0) {
        bail!(
            "band starts at {:.4} GHz, not above the cutoff f0 = {:.4} GHz",
            f_min / 1e9,
            f0 / 1e9
        );
    }
    Ok(())
}

fn unique_tags(cfg: &RunConfig) -> Result<Vec<String>> {
    let tags: Vec<String> = cfg.wells_mm.iter().map(|&w| well_tag(w)).collect();
    if tags.iter().collect::<BTreeSet<_>>().len() != tags.len() {
        bail!(
            "well widths collide in output file names: {}",
            tags.join(", ")
        );
    }
    Ok(tags)
}

pub fn constants(args: &ConstantsArgs, out: &mut dyn Write) -> Result<()> {
    let cfg = RunConfig::resolve(&args.common, None)?;
    let geom = cfg.geometry(0.0)?;
    let cut = qwell::dispersion::cutoffs(&geom, &cfg.medium)?;
    let e = energy_mapping(&geom, &cfg.medium, &PhysicalConstants::SI)?;
    let is_preset_medium = args.common.n.is_none() && cfg.file.guide.n.is_none();
    writeln!(out, "preset = {}", cfg.preset_name)?;
    writeln!(
        out,
        "medium = {}",
        if is_preset_medium {
            cfg.medium.name()
        } else {
            "custom"
        }
    )?;
    writeln!(out, "n = {:.6}", cfg.medium.n())?;
    writeln!(
        out,
        "b = {:.3} mm ({} m)",
        cfg.width_b * 1e3,
        num(cfg.width_b)
    )?;
    writeln!(
        out,
        "l = {:.3} mm ({} m)",
        cfg.length_l * 1e3,
        num(cfg.length_l)
    )?;
    writeln!(out, "f0 = {:.3} GHz ({} Hz)", cut.f0() / 1e9, num(cut.f0()))?;
    writeln!(
        out,
        "fn = {:.3} GHz ({} Hz)",
        cut.f_n() / 1e9,
        num(cut.f_n())
    )?;
    writeln!(
        out,
        "E0 = {:.2} μeV ({} J)",
        e.baseline_e0 / MICRO_EV,
        num(e.baseline_e0)
    )?;
    writeln!(
        out,
        "V0 = {:.2} μeV ({} J)",
        e.depth_v0 / MICRO_EV,
        num(e.depth_v0)
    )?;
    writeln!(out, "m = {} kg", num(e.mass_m))?;
    Ok(())
}

pub fn sweep(args: &SweepArgs, out: &mut dyn Write) -> Result<()> {
    let cfg = RunConfig::resolve(&args.common, args.mode)?;
    let grid = FrequencyGrid::new(cfg.band.0, cfg.band.1, cfg.points.unwrap_or(2001))?;
    let tags = unique_tags(&cfg)?;
    let exec = Exec::default();
    let mut files = Vec::new();
    for (&a_mm, tag) in cfg.wells_mm.iter().zip(&tags) {
        let a = a_mm * 1e-3;
        let model = model_for(&cfg, a)?;
        check_band(&model, grid.f_min())?;
        let trans = transmission_sweep(&model, &grid, a, exec)?;
        let numeric = phase_time_numeric_adaptive(&model, &grid, a, args.stencil.into())?;
        let analytic: Vec<f64> = match model.as_waveguide() {
            Some(w) => exec.try_map(grid.points(), |i| {
                phase_time_analytic(w, grid.frequency(i), a)
            })?,
            // the closed form covers the guide only
            None => vec![f64::NAN; grid.points()],
        };
        let name = format!("sweep_{tag}.csv");
        write_atomic(&cfg.out.join(&name), |w| {
            writeln!(w, "{SWEEP_HEADER}")?;
            for i in 0..grid.points() {
                let r = &trans[i];
                writeln!(
                    w,
                    "{},{},{},{},{},{},{}",
                    num(numeric.frequencies[i]),
                    num(r.f.re),
                    num(r.f.im),
                    num(r.magnitude_sq),
                    num(numeric.phase_unwrapped[i]),
                    num(analytic[i]),
                    num(numeric.tau[i])
                )?;
            }
            Ok(())
        })?;
        writeln!(out, "wrote {}", cfg.out.join(&name).display())?;
        files.push((name, format!("a = {a_mm:.2} mm")));
    }
    let script = cfg.out.join("sweep.gp");
    write_text(&script, &sweep_script(&files))?;
    writeln!(out, "wrote {}", script.display())?;
    Ok(())
}

pub fn regions(args: &RegionsArgs, out: &mut dyn Write) -> Result<()> {
    let cfg = RunConfig::resolve(&args.common, args.mode)?;
    if cfg.mode == Mode::Qm {
        bail!("regions uses the closed-form guide phase time; qm mode is not supported");
    }
    let amax = args.amax_mm.or(cfg.file.regions.amax_mm).unwrap_or(90.0) * 1e-3;
    let a_points = args.a_points.or(cfg.file.regions.a_points).unwrap_or(181);
    let f_points = cfg.points.unwrap_or(341);
    let w = Waveguide::new(cfg.geometry(0.0)?, cfg.medium.clone());
    check_band(&w.clone().into(), cfg.band.0)?;
    let map = region_map(
        &w,
        (0.0, amax),
        cfg.band,
        (a_points, f_points),
        Exec::default(),
    )?;
    let csv = cfg.out.join("regions.csv");
    write_atomic(&csv, |wr| {
        writeln!(wr, "{REGIONS_HEADER}")?;
        for (i, &a) in map.a_axis.iter().enumerate() {
            for (j, &f) in map.f_axis.iter().enumerate() {
                let flag = u8::from(map.is_negative(i, j));
                writeln!(wr, "{},{},{},{flag}", num(a), num(f), num(map.tau_at(i, j)))?;
            }
        }
        Ok(())
    })?;
    let script = cfg.out.join("regions.gp");
    write_text(&script, &regions_script("regions.csv"))?;
    writeln!(out, "wrote {}", csv.display())?;
    writeln!(out, "wrote {}", script.display())?;
    writeln!(
        out,
        "negative cells: {} of {}",
        map.negative_count(),
        map.tau.len()
    )?;
    Ok(())
}

/// τ at `f` from a five-node stencil; used where no closed form exists.
fn local_tau(model: &DispersionModel, f: f64, a: f64) -> Result<f64> {
    let half = 1e-3 * (f - model.cutoff_omega() / (2.0 * PI));
    let grid = FrequencyGrid::new(f - half, f + half, 5)?;
    Ok(phase_time_numeric_adaptive(model, &grid, a, Stencil::Fourth)?.tau[2])
}

fn write_trace(path: &Path, trace: &TimeTrace) -> Result<()> {
    write_atomic(path, |w| {
        writeln!(w, "{TRACE_HEADER}")?;
        for (t, e) in trace.t.iter().zip(&trace.envelope) {
            writeln!(w, "{},{}", num(*t), num(*e))?;
        }
        Ok(())
    })
}

pub fn packet(args: &PacketArgs, out: &mut dyn Write) -> Result<()> {
    let cfg = RunConfig::resolve(&args.common, args.mode)?;
    let fc = args
        .fc_ghz
        .or(cfg.file.packet.fc_ghz)
        .context("packet needs a centre frequency (--fc-ghz)")?
        * 1e9;
    let sigma = args.sigma_mhz.or(cfg.file.packet.sigma_mhz).unwrap_or(5.0) * 1e6;
    let spec = PacketSpec::centered(fc, sigma)?;
    let tags = unique_tags(&cfg)?;
    let mut report = String::from(PACKET_REPORT_HEADER);
    report.push('\n');
    let mut pairs = Vec::new();
    writeln!(out, "{PACKET_REPORT_HEADER}")?;
    for (&a_mm, tag) in cfg.wells_mm.iter().zip(&tags) {
        let a = a_mm * 1e-3;
        let model = model_for(&cfg, a)?;
        let (inc, trans) = synthesize_and_transmit(&spec, &model, a, Exec::default())?;
        let delay = peak_delay(&inc, &trans)?;
        let tau = match model.as_waveguide() {
            Some(w) => phase_time_analytic(w, fc, a)?,
            None => local_tau(&model, fc, a)?,
        };
        let rel = if tau == 0.0 {
            f64::NAN
        } else {
            (delay - tau) / tau
        };
        let line = format!("{},{},{}", num(delay), num(tau), num(rel));
        writeln!(out, "{line}")?;
        report.push_str(&line);
        report.push('\n');
        let (fi, ft) = (
            format!("packet_{tag}_incident.csv"),
            format!("packet_{tag}_transmitted.csv"),
        );
        write_trace(&cfg.out.join(&fi), &inc)?;
        write_trace(&cfg.out.join(&ft), &trans)?;
        pairs.push((fi, ft, format!("a = {a_mm:.2} mm")));
    }
    write_text(&cfg.out.join("packet_report.csv"), &report)?;
    write_text(&cfg.out.join("packet.gp"), &packet_script(&pairs))?;
    Ok(())
}

fn infer_format(path: &Path, given: Option<FormatArg>) -> TraceFormat {
    let fmt = given.unwrap_or_else(|| {
        let ext = path
            .extension()
            .and_then(|e| e.to_str())
            .unwrap_or("")
            .to_ascii_lowercase();
        if matches!(ext.as_str(), "s2p" | "ts" | "snp") {
            FormatArg::Touchstone
        } else {
            FormatArg::Csv
        }
    });
    match fmt {
        FormatArg::Csv => TraceFormat::Csv,
        FormatArg::Touchstone => TraceFormat::TouchstoneRi,
    }
}

fn read_trace(path: &Path, format: TraceFormat, meta: TraceMeta) -> Result<SParamTrace> {
    let file = File::open(path).with_context(|| format!("opening {}", path.display()))?;
    load_trace(BufReader::new(file), format, meta).with_context(|| path.display().to_string())
}

pub fn deembed_cmd(args: &DeembedArgs, out: &mut dyn Write) -> Result<()> {
    let cfg = RunConfig::resolve(&args.common, None)?;
    let a_mm = match (cfg.wells_from_flags, cfg.wells_mm.as_slice()) {
        (true, [a]) => *a,
        _ => bail!("deembed needs exactly one well width (--well-mm)"),
    };
    let geom = cfg.geometry(a_mm * 1e-3)?;
    let stem = args
        .input
        .file_stem()
        .and_then(|s| s.to_str())
        .unwrap_or("trace")
        .to_string();
    let meta = TraceMeta {
        guide_length_l: cfg.length_l,
        well_width_a: a_mm * 1e-3,
        label: stem.clone(),
    };
    let trace = read_trace(&args.input, infer_format(&args.input, args.format), meta)?;
    let reference;
    let correction = match args.mode {
        CorrectionArg::AnalyticK => Correction::AnalyticK,
        CorrectionArg::Reference => {
            let path = args
                .reference
                .as_ref()
                .context("--mode reference needs --ref <path>")?;
            let meta = TraceMeta {
                guide_length_l: cfg.length_l,
                well_width_a: 0.0,
                label: "reference".into(),
            };
            reference = read_trace(path, infer_format(path, args.format), meta)?;
            Correction::ReferenceTrace(&reference)
        }
    };
    let ct = deembed(&trace, &geom, correction)?;
    let opts = ProcessingOptions {
        stencil: args.stencil.into(),
        smooth_window: args.smooth,
    };
    let profile = measured_phase_time(&ct, opts)?;
    let name = format!("{stem}_profile.csv");
    let path = cfg.out.join(&name);
    write_atomic(&path, |w| Ok(write_profile_csv(&profile, w)?))?;
    let script = cfg.out.join(format!("{stem}_profile.gp"));
    write_text(
        &script,
        &profile_script(&name, &format!("{stem}_profile.png")),
    )?;
    writeln!(out, "wrote {}", path.display())?;
    writeln!(out, "wrote {}", script.display())?;
    Ok(())
}
