//! `qwell`: cutoffs, transmission sweeps, negative phase-time maps, packet
//! runs and trace de-embedding for the dielectric-well waveguide.

// `!(x > y)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

mod commands;
mod config;
mod output;

use std::io::{self, Write};
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use commands::{ConstantsArgs, DeembedArgs, PacketArgs, RegionsArgs, SweepArgs};

#[derive(Parser)]
#[command(
    name = "qwell",
    version,
    about = "Phase time of a dielectric-filled waveguide well"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Print cutoffs and the equivalent quantum-well energies.
    Constants(ConstantsArgs),
    /// Transmission and phase time over the band, one CSV per well.
    Sweep(SweepArgs),
    /// Phase-time lattice over well width and frequency.
    Regions(RegionsArgs),
    /// Gaussian packet through each well; prints the delay report.
    Packet(PacketArgs),
    /// De-embed a measured trace and extract its phase time.
    Deembed(DeembedArgs),
}

fn run(cli: Cli) -> anyhow::Result<()> {
    let stdout = io::stdout();
    let mut out = stdout.lock();
    match &cli.command {
        Command::Constants(a) => commands::constants(a, &mut out),
        Command::Sweep(a) => commands::sweep(a, &mut out),
        Command::Regions(a) => commands::regions(a, &mut out),
        Command::Packet(a) => commands::packet(a, &mut out),
        Command::Deembed(a) => commands::deembed_cmd(a, &mut out),
    }?;
    out.flush()?;
    Ok(())
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            let msg = format!("{e:#}").replace('\n', " ");
            eprintln!("error: {msg}");
            ExitCode::FAILURE
        }
    }
}
