//! Command-line front end.
//!
//! Exit codes: 0 success, 2 parse error (malformed input file), 3 the lifted
//! line passes too close to a zero (retry with a different `c`), 4 kernel
//! quadrature failed to converge, 5 invalid rate or configuration, 1 anything
//! else (I/O).

use std::fs::File;
use std::io::{BufReader, BufWriter, Write};
use std::path::PathBuf;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::approx::{main_rate_bound, BoundInputs};
use crate::error::{Error, Result};
use crate::io::read_sample_file;
use crate::kernels::{GStarCache, GStarTable};
use crate::pipeline::{reconstruct, worst_case_error, ErrorDomain, ReconstructionConfig};
use crate::signals::{self, TestSignal};

#[derive(Parser, Debug)]
#[command(name = "phaseless", version, about = "Reconstruct real bandlimited signals from magnitude-only samples")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Reconstruct a signal from a magnitude sample file (text format,
    /// header "M=<M> s=<s>" then one "k magnitude" line per sample).
    Reconstruct(ReconstructArgs),
    /// Run a preset benchmark sweep and write a CSV error table.
    Benchmark(BenchmarkArgs),
    /// Demonstrate non-uniqueness at exactly twice the Nyquist rate.
    DemoCounterexample(DemoArgs),
    /// Tabulate the averaged kernel G* and write its cache file.
    TabulateKernel(TabulateArgs),
}

#[derive(Args, Debug)]
pub struct ReconstructArgs {
    /// Input sample file.
    #[arg(long)]
    pub input: PathBuf,
    /// Declared bandwidth of the sampled signal.
    #[arg(long, default_value_t = 0.0)]
    pub b: f64,
    /// Imaginary offset of the lifted line.
    #[arg(long, default_value_t = 0.1)]
    pub c: f64,
    #[arg(long = "fine-factor", default_value_t = 8)]
    pub fine_factor: u32,
    #[arg(long = "quad-tol", default_value_t = 1e-12)]
    pub quad_tol: f64,
    /// Output path; stdout when omitted.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = OutputFormat::Json)]
    pub format: OutputFormat,
}

#[derive(Args, Debug)]
pub struct BenchmarkArgs {
    #[arg(long, value_enum)]
    pub preset: Preset,
    /// Sampling rate.
    #[arg(long, default_value_t = 1.0)]
    pub s: f64,
    #[arg(long, default_value_t = 0.1)]
    pub c: f64,
    /// Comma-separated list of M values.
    #[arg(long = "m-list", value_delimiter = ',', default_values_t = [10u32, 20, 30, 40, 50])]
    pub m_list: Vec<u32>,
    /// Seed for preset amplitudes and phases.
    #[arg(long, default_value_t = 12345)]
    pub seed: u64,
    #[arg(long = "fine-factor", default_value_t = 8)]
    pub fine_factor: u32,
    #[arg(long = "quad-tol", default_value_t = 1e-12)]
    pub quad_tol: f64,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct DemoArgs {
    #[arg(long, value_enum, default_value_t = OutputFormat::Text)]
    pub format: OutputFormat,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct TabulateArgs {
    #[arg(long = "M")]
    pub m: u32,
    #[arg(long = "quad-tol", default_value_t = 1e-12)]
    pub quad_tol: f64,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum OutputFormat {
    Text,
    Json,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum Preset {
    Bessel,
    Multitone,
    Sine,
}

impl Preset {
    fn signal(self, seed: u64) -> TestSignal {
        match self {
            Preset::Bessel => signals::bessel_j1_shifted(20.0),
            Preset::Multitone => signals::multitone_preset(seed),
            Preset::Sine => signals::sine_preset(),
        }
    }
}

pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Parse(_) => 2,
        Error::NearZeroOnLine { .. } => 3,
        Error::QuadratureNonConvergence { .. } => 4,
        Error::InvalidRate { .. } | Error::InvalidConfig(_) => 5,
        _ => 1,
    }
}

fn write_output(out: &Option<PathBuf>, content: &str) -> Result<()> {
    match out {
        Some(path) => {
            let mut w = BufWriter::new(File::create(path)?);
            w.write_all(content.as_bytes())?;
            Ok(())
        }
        None => {
            print!("{content}");
            Ok(())
        }
    }
}

pub fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Reconstruct(args) => cmd_reconstruct(args),
        Command::Benchmark(args) => cmd_benchmark(args),
        Command::DemoCounterexample(args) => cmd_demo_counterexample(args),
        Command::TabulateKernel(args) => cmd_tabulate_kernel(args),
    }
}

fn cmd_reconstruct(args: ReconstructArgs) -> Result<()> {
    let file = File::open(&args.input)?;
    let (s, mags) = read_sample_file(BufReader::new(file))?;
    let cfg = ReconstructionConfig::new(mags.m(), s, args.b, args.c)?
        .with_fine_factor(args.fine_factor)?
        .with_quad_tol(args.quad_tol)?;
    let cache = GStarCache::new();
    let result = reconstruct(&cfg, &mags, &cache)?;
    let content = match args.format {
        OutputFormat::Json => format!("{}\n", serde_json::to_string_pretty(&result).expect("serializable")),
        OutputFormat::Text => {
            let mut text = String::new();
            for (x, v) in result.grid.iter().zip(&result.values) {
                text.push_str(&format!("{:.16e} {:.16e}\n", x, v));
            }
            text
        }
    };
    write_output(&args.out, &content)
}

fn cmd_benchmark(args: BenchmarkArgs) -> Result<()> {
    let sig = args.preset.signal(args.seed);
    if args.s <= 2.0 * sig.bandwidth {
        return Err(Error::InvalidRate {
            s: args.s,
            double_b: 2.0 * sig.bandwidth,
        });
    }
    let mut m_list = args.m_list.clone();
    m_list.sort_unstable();
    let cache = GStarCache::new();
    let mut csv = String::from("M,error,predicted_rate,runtime_ms\n");
    for &m in &m_list {
        let start = Instant::now();
        let row = (|| -> Result<(f64, f64)> {
            let cfg = ReconstructionConfig::new(m, args.s, sig.bandwidth, args.c)?
                .with_fine_factor(args.fine_factor)?
                .with_quad_tol(args.quad_tol)?;
            let mags = signals::sample_magnitudes(&sig, args.s, m);
            let result = reconstruct(&cfg, &mags, &cache)?;
            let domain = ErrorDomain::benchmark_window(m);
            let (err, _eta) = worst_case_error(&result, |x| sig.eval(x), &domain)?;
            let (rate, _offset) =
                main_rate_bound(&BoundInputs::new(m, sig.bandwidth, args.s, 0.75, args.c, args.c))?;
            Ok((err, rate))
        })();
        let ms = start.elapsed().as_millis();
        match row {
            Ok((err, rate)) => csv.push_str(&format!("{m},{err:.6e},{rate:.6e},{ms}\n")),
            Err(_) => csv.push_str(&format!("{m},FAILED,,{ms}\n")),
        }
    }
    write_output(&args.out, &csv)
}

#[derive(Serialize)]
struct DemoReport {
    sampling_rate_s: f64,
    twice_bandwidth: f64,
    max_magnitude_discrepancy: f64,
    sup_function_gap: f64,
}

fn cmd_demo_counterexample(args: DemoArgs) -> Result<()> {
    let (f1, f2) = signals::counterexample_pair();
    // Magnitudes agree at every half-integer, i.e. at rate s = 2 = 2b.
    let mut discrepancy = 0.0f64;
    for k in -200i64..=200 {
        let x = k as f64 / 2.0;
        discrepancy = discrepancy.max((f1.eval(x).abs() - f2.eval(x).abs()).abs());
    }
    let mut gap = 0.0f64;
    let steps = 20_000;
    for i in 0..=steps {
        let x = -10.0 + 20.0 * i as f64 / steps as f64;
        gap = gap.max((f1.eval(x) - f2.eval(x)).abs());
    }
    let report = DemoReport {
        sampling_rate_s: 2.0,
        twice_bandwidth: 2.0 * f1.bandwidth,
        max_magnitude_discrepancy: discrepancy,
        sup_function_gap: gap,
    };
    let content = match args.format {
        OutputFormat::Json => format!("{}\n", serde_json::to_string_pretty(&report).expect("serializable")),
        OutputFormat::Text => format!(
            "counterexample pair: {} vs {}\n\
             sampled at rate s = {} (exactly 2b = {})\n\
             max | |f1| - |f2| | at half-integers in [-100, 100]: {:.3e}\n\
             sup |f1 - f2| over [-10, 10]: {:.4}\n\
             magnitudes agree while the functions differ: sampling at twice\n\
             the Nyquist rate does not determine the signal.\n",
            f1.description,
            f2.description,
            report.sampling_rate_s,
            report.twice_bandwidth,
            report.max_magnitude_discrepancy,
            report.sup_function_gap,
        ),
    };
    write_output(&args.out, &content)
}

fn cmd_tabulate_kernel(args: TabulateArgs) -> Result<()> {
    if args.m < 2 {
        return Err(Error::InvalidConfig(format!("M = {} must be at least 2", args.m)));
    }
    let table = GStarTable::build(args.m, args.quad_tol)?;
    let mut buf = Vec::new();
    table.write_to(&mut buf)?;
    let mut w = BufWriter::new(File::create(&args.out)?);
    w.write_all(&buf)?;
    Ok(())
}
