use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde_json::{json, Value};

use duality_core::atlas::{
    self, p1_measure_borders, ququart_conjectured_border, qunit_entropic_conjecture, qutrit_region,
    random_state_scan, write_curves_csv, BorderCurve, CurveKind, LargestProbabilityMeasure,
};
use duality_core::clicks::{estimate_pv, sample_particle_mode, sample_wave_mode, write_records_csv};
use duality_core::{run_suite, strength, DensityMatrix, Error, FourierFamily, Measure, SearchConfig, Suite, VerifyOptions};

#[derive(Parser)]
#[command(name = "duality", version, about = "Path knowledge and interference strength for n-path interferometers")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// P and V of one state.
    Measure {
        #[arg(long)]
        state: PathBuf,
        #[arg(long)]
        measure: String,
        #[command(flatten)]
        search: SearchArgs,
    },
    /// Border curves as CSV.
    Border {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        measure: String,
        #[arg(long, default_value_t = 101)]
        samples: usize,
        /// Also emit the inner border (three paths only).
        #[arg(long)]
        inner: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run a named check bundle and print its JSON report.
    Verify {
        #[arg(value_parser = ["qubit", "qutrit", "ququart", "qunit", "axioms"])]
        suite: String,
        /// Random trials for the axiom suite.
        #[arg(long, default_value_t = 1000)]
        trials: usize,
        #[command(flatten)]
        search: SearchArgs,
    },
    /// (P, V) of random states as CSV.
    Scan {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        measure: String,
        #[arg(long, default_value_t = 100)]
        count: usize,
        /// Pure states only.
        #[arg(long, conflicts_with = "mix")]
        pure: bool,
        /// Fraction of mixed states.
        #[arg(long, default_value_t = 0.5)]
        mix: f64,
        #[arg(long)]
        out: Option<PathBuf>,
        #[command(flatten)]
        search: SearchArgs,
    },
    /// Simulated detector clicks as CSV, or a (P, V) estimate from them.
    Simulate {
        #[arg(long)]
        state: PathBuf,
        #[arg(long, default_value_t = 10_000)]
        shots: u64,
        /// Fourier descriptor for a wave-mode run, as a file or inline JSON.
        /// Repeat for several runs; the default is the standard matrix.
        #[arg(long)]
        fourier: Vec<String>,
        /// Print the estimate for this measure instead of the records.
        #[arg(long)]
        estimate: Option<String>,
        #[arg(long, env = "DUALITY_SEED", default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Args)]
struct SearchArgs {
    #[arg(long)]
    starts: Option<usize>,
    #[arg(long, default_value_t = 24)]
    grid: usize,
    #[arg(long, default_value_t = 1e-10)]
    tol: f64,
    #[arg(long, env = "DUALITY_SEED", default_value_t = 0)]
    seed: u64,
}

impl SearchArgs {
    fn config(&self) -> SearchConfig {
        SearchConfig {
            starts: self.starts,
            grid: self.grid,
            tol: self.tol,
            seed: self.seed,
            ..SearchConfig::default()
        }
    }
}

enum Failure {
    Input(Error),
    Io(io::Error),
    Verification,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Input(e)
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure::Io(e)
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Verification) => ExitCode::from(1),
        Err(Failure::Input(e)) => {
            eprintln!("error: {}: {e}", e.name());
            ExitCode::from(2)
        }
        Err(Failure::Io(e)) => {
            eprintln!("error: Io: {e}");
            ExitCode::from(2)
        }
    }
}

fn run(command: Command) -> Result<(), Failure> {
    match command {
        Command::Measure { state, measure, search } => {
            let rho = read_state(&state)?;
            let measure: Measure = measure.parse()?;
            let p = measure.knowledge(&rho)?;
            let r = strength(&measure, &rho, &search.config())?;
            let mut out = json!({
                "p": p,
                "v": r.v,
                "argmax_fourier": r.argmax,
                "lower_bound_only": r.lower_bound_only,
            });
            print_json(&mut out)
        }
        Command::Border { n, measure, samples, inner, out } => {
            let measure: Measure = measure.parse()?;
            let curves = border_curves(n, &measure, samples, inner)?;
            let mut buf = Vec::new();
            write_curves_csv(&curves, &mut buf, true)?;
            emit(&buf, out.as_deref())
        }
        Command::Verify { suite, trials, search } => {
            let suite: Suite = suite.parse()?;
            let opts = VerifyOptions {
                search: search.config(),
                trials,
                seed: search.seed,
            };
            let report = run_suite(suite, &opts)?;
            let mut value = serde_json::to_value(&report).map_err(Error::from)?;
            print_json(&mut value)?;
            if report.passed {
                Ok(())
            } else {
                Err(Failure::Verification)
            }
        }
        Command::Scan { n, measure, count, pure, mix, out, search } => {
            let measure: Measure = measure.parse()?;
            let mix = if pure { 0.0 } else { mix };
            let points = random_state_scan(n, &measure, count, mix, search.seed, &search.config())?;
            let curve = BorderCurve {
                measure: measure.to_string(),
                n,
                kind: CurveKind::NumericScan,
                points,
            };
            let mut buf = Vec::new();
            curve.write_csv(&mut buf, true)?;
            emit(&buf, out.as_deref())
        }
        Command::Simulate { state, shots, fourier, estimate, seed, out } => {
            let rho = read_state(&state)?;
            let settings = if fourier.is_empty() {
                vec![FourierFamily::standard(vec![0.0; rho.n()])]
            } else {
                fourier.iter().map(|f| read_fourier(f)).collect::<Result<Vec<_>, _>>()?
            };
            // one seed per run so adding a run leaves the earlier ones unchanged
            let mut records = vec![sample_particle_mode(&rho, shots, seed)?];
            for (k, f) in settings.iter().enumerate() {
                records.push(sample_wave_mode(&rho, f, shots, seed.wrapping_add(1 + k as u64))?);
            }
            match estimate {
                None => {
                    let mut buf = Vec::new();
                    write_records_csv(&records, &mut buf)?;
                    emit(&buf, out.as_deref())
                }
                Some(m) => {
                    let measure: Measure = m.parse()?;
                    let bootstrap_seed = seed.wrapping_add(1 + settings.len() as u64);
                    let e = estimate_pv(&measure, &records[0], &records[1..], bootstrap_seed)?;
                    if let Some(path) = out {
                        let mut buf = Vec::new();
                        write_records_csv(&records, &mut buf)?;
                        fs::write(path, buf)?;
                    }
                    let mut value = serde_json::to_value(&e).map_err(Error::from)?;
                    print_json(&mut value)
                }
            }
        }
    }
}

fn border_curves(n: usize, measure: &Measure, samples: usize, inner: bool) -> Result<Vec<BorderCurve>, Error> {
    if samples < 2 {
        return Err(Error::BadParameter(format!("samples must be at least 2, got {samples}")));
    }
    if inner && n != 3 {
        return Err(Error::BadParameter("inner borders are traced for three paths only".into()));
    }
    match n {
        0 | 1 => Err(Error::TooFewPaths { n }),
        2 => Ok(vec![atlas::qubit_border(measure, samples)?]),
        3 if Measure::CANONICAL.contains(measure) => {
            let region = qutrit_region(measure, samples)?;
            let mut curves = vec![region.outer];
            if inner {
                curves.push(region.inner);
            }
            Ok(curves)
        }
        4 if *measure == Measure::Linear => Ok(vec![ququart_conjectured_border(samples)?.curve]),
        _ => {
            if let Some(which) = LargestProbabilityMeasure::from_measure(measure) {
                Ok(vec![p1_measure_borders(n, which, samples)?])
            } else if *measure == Measure::Entropy {
                Ok(vec![qunit_entropic_conjecture(n, samples)?.curve])
            } else {
                Err(Error::BadParameter(format!("no border is known for {measure} with n = {n}")))
            }
        }
    }
}

fn read_state(path: &Path) -> Result<DensityMatrix, Failure> {
    let text = fs::read_to_string(path)?;
    Ok(DensityMatrix::from_json(&text)?)
}

fn read_fourier(arg: &str) -> Result<FourierFamily, Failure> {
    let text = if arg.trim_start().starts_with('{') {
        arg.to_string()
    } else {
        fs::read_to_string(arg)?
    };
    Ok(FourierFamily::from_json(&text)?)
}

fn emit(bytes: &[u8], out: Option<&Path>) -> Result<(), Failure> {
    match out {
        Some(path) => fs::write(path, bytes)?,
        None => io::stdout().lock().write_all(bytes)?,
    }
    Ok(())
}

/// Rounds every float to 12 significant digits.
fn round_numbers(v: &mut Value) {
    match v {
        Value::Number(num) if num.is_f64() => {
            let x = num.as_f64().expect("f64 number");
            let r: f64 = format!("{x:.11e}").parse().expect("formatted float");
            *v = json!(r);
        }
        Value::Array(items) => items.iter_mut().for_each(round_numbers),
        Value::Object(map) => map.values_mut().for_each(round_numbers),
        _ => {}
    }
}

fn print_json(v: &mut Value) -> Result<(), Failure> {
    round_numbers(v);
    let text = serde_json::to_string_pretty(v).map_err(Error::from)?;
    let mut out = io::stdout().lock();
    writeln!(out, "{text}")?;
    Ok(())
}
