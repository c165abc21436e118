use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use virialkit::applications::{
    invert_mixture, invert_profile, rods_free_energy, unbounded_mixture_demo, GridProfile, MixtureSpec, ProfileKernel,
    RodSystem,
};
use virialkit::homogeneous::{
    bounds_csv, bounds_table, hom_inversion_selftest, virial_table, HomogeneousModel, McOptions,
};
use virialkit::inversion::GCState;
use virialkit::io::{
    bell_check, handle_request, identity_suite, resolve_state, tree_oracle_check, Mode, Request, SpeciesFile,
};
use virialkit::scalar::format_float;
use virialkit::{Error, Rational, ResidualReport};

mod fixtures;

#[derive(Parser)]
#[command(name = "virialkit", version, about = "Cluster and virial expansions over finite species spaces")]
struct Cli {
    #[command(flatten)]
    run: RunConfig,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct RunConfig {
    /// Model, profile, mixture, rod or request file, depending on the subcommand.
    #[arg(long, global = true)]
    model: Option<PathBuf>,
    /// Truncation order N.
    #[arg(long, global = true, default_value_t = 4, value_parser = clap::value_parser!(u64).range(1..))]
    order: u64,
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Worker threads; results do not depend on this.
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[arg(long, global = true, value_enum, default_value_t = NumMode::Float)]
    mode: NumMode,
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Csv)]
    format: Format,
    /// Monte Carlo samples per coefficient.
    #[arg(long, global = true, default_value_t = 1 << 20)]
    samples: u64,
}

#[derive(Copy, Clone, PartialEq, Eq, ValueEnum)]
enum NumMode {
    Rational,
    Float,
}

#[derive(Copy, Clone, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Subcommand)]
enum Command {
    /// Virial coefficients of a homogeneous model.
    Virial,
    /// Convergence radii and the constants behind them.
    Bounds {
        /// Stability constant entering the Lagrange-inversion radius.
        #[arg(long, default_value_t = 0.0)]
        b_bar: f64,
    },
    /// External potential reproducing a density profile.
    Invert,
    /// Activities of a hard-sphere mixture at given densities.
    Mixture,
    /// Free energy of thin rods with discrete orientations.
    Rods,
    /// Exact identity suite on the shipped fixtures.
    Selftest,
    /// Execute a JSON request against a species file.
    Request,
    /// Mixture whose density map has no uniformly bounded inverse.
    Demo {
        #[arg(long, default_value_t = 8)]
        k_max: usize,
        #[arg(long, default_value_t = 1.0)]
        z1: f64,
        #[arg(long, default_value_t = 0.01)]
        eps: f64,
    },
}

/// Outcome of a subcommand that ran to completion but must signal failure.
enum Failure {
    Error(Error),
    Selftest,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Error(e)
    }
}

type CmdResult = std::result::Result<String, Failure>;

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(k) = cli.run.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(k.max(1)).build_global() {
            eprintln!("error: thread pool: {e}");
            return ExitCode::from(2);
        }
    }
    let result = run(&cli);
    match result {
        Ok(text) => match emit(&cli.run, &text) {
            Ok(()) => ExitCode::SUCCESS,
            Err(e) => report(&Error::Io(e)),
        },
        Err(Failure::Selftest) => ExitCode::from(1),
        Err(Failure::Error(e)) => report(&e),
    }
}

fn report(e: &Error) -> ExitCode {
    match e {
        Error::Refused(cert) => {
            eprintln!("refused: {}", cert.summary());
            eprintln!("species,margin");
            for (i, m) in cert.margins.iter().enumerate() {
                eprintln!("{i},{}", format_float(*m));
            }
            ExitCode::from(1)
        }
        Error::Capability(_) => {
            eprintln!("error: {e}");
            ExitCode::from(3)
        }
        _ => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}

fn emit(run: &RunConfig, text: &str) -> std::io::Result<()> {
    match &run.out {
        Some(p) => std::fs::write(p, text),
        None => std::io::stdout().lock().write_all(text.as_bytes()),
    }
}

fn run(cli: &Cli) -> CmdResult {
    let run = &cli.run;
    let order = run.order as usize;
    match &cli.command {
        Command::Virial => cmd_virial(run, order),
        Command::Bounds { b_bar } => cmd_bounds(run, *b_bar),
        Command::Invert => cmd_invert(run, order),
        Command::Mixture => cmd_mixture(run, order),
        Command::Rods => cmd_rods(run, order),
        Command::Selftest => cmd_selftest(run, order),
        Command::Request => cmd_request(run),
        Command::Demo { k_max, z1, eps } => {
            let d = unbounded_mixture_demo(*k_max, *z1, *eps)?;
            Ok(match run.format {
                Format::Json => to_json(&d)?,
                Format::Csv => {
                    let mut s = String::from("k,z,rho,ratio,roundtrip_error\n");
                    for r in &d.rows {
                        s += &format!(
                            "{},{},{},{},{}\n",
                            r.k,
                            format_float(r.z),
                            format_float(r.rho),
                            format_float(r.ratio),
                            format_float(r.roundtrip_error)
                        );
                    }
                    s
                }
            })
        }
    }
}

fn model_path(run: &RunConfig) -> Result<&Path, Error> {
    run.model.as_deref().ok_or_else(|| Error::Input("--model FILE is required for this subcommand".into()))
}

fn read_json<T: serde::de::DeserializeOwned>(run: &RunConfig) -> Result<T, Error> {
    let text = std::fs::read_to_string(model_path(run)?)?;
    Ok(serde_json::from_str(&text)?)
}

fn to_json<T: serde::Serialize>(v: &T) -> Result<String, Error> {
    Ok(serde_json::to_string_pretty(v)? + "\n")
}

fn cmd_virial(run: &RunConfig, order: usize) -> CmdResult {
    let model: HomogeneousModel = read_json(run)?;
    let table = virial_table(&model, order, McOptions { samples: run.samples, seed: run.seed })?;
    Ok(match run.format {
        Format::Csv => table.to_csv(run.mode == NumMode::Rational),
        Format::Json => to_json(&table)?,
    })
}

fn cmd_bounds(run: &RunConfig, b_bar: f64) -> CmdResult {
    let model: HomogeneousModel = read_json(run)?;
    let rows = bounds_table(&model, b_bar)?;
    Ok(match run.format {
        Format::Csv => bounds_csv(&rows),
        Format::Json => to_json(&rows)?,
    })
}

#[derive(serde::Deserialize)]
struct InvertInput {
    profile: GridProfile,
    kernel: ProfileKernel,
}

fn cmd_invert(run: &RunConfig, order: usize) -> CmdResult {
    let input: InvertInput = read_json(run)?;
    let inv = invert_profile(&input.profile, &input.kernel, order)?;
    Ok(match run.format {
        Format::Json => to_json(&inv)?,
        Format::Csv => {
            let mut s = String::from("point,rho,v_ext,activity\n");
            for (i, (v, z)) in inv.v_ext.iter().zip(&inv.activity).enumerate() {
                s += &format!("{i},{},{},{}\n", format_float(input.profile.rho[i]), format_float(*v), format_float(*z));
            }
            s
        }
    })
}

fn cmd_mixture(run: &RunConfig, order: usize) -> CmdResult {
    let spec: MixtureSpec = read_json(run)?;
    let m = invert_mixture(&spec, order)?;
    Ok(match run.format {
        Format::Json => to_json(&m)?,
        Format::Csv => {
            let mut s = String::from("component,rho,z,stderr\n");
            for (k, z) in m.z.iter().enumerate() {
                s += &format!("{k},{},{},{}\n", format_float(spec.rho[k]), format_float(*z), format_float(m.stderr[k]));
            }
            s
        }
    })
}

fn cmd_rods(run: &RunConfig, order: usize) -> CmdResult {
    let rs: RodSystem = read_json(run)?;
    let fe = rods_free_energy(&rs, order)?;
    Ok(match run.format {
        Format::Json => to_json(&fe)?,
        Format::Csv => {
            let mut s = String::from("term,value,stderr\n");
            s += &format!("ideal,{},0\n", format_float(fe.ideal));
            s += &format!("orientational,{},0\n", format_float(fe.orientational));
            for t in &fe.excess {
                s += &format!("excess_{},{},{}\n", t.n, format_float(t.value), format_float(t.stderr));
            }
            s += &format!("total,{},0\n", format_float(fe.total));
            s
        }
    })
}

fn cmd_request(run: &RunConfig) -> CmdResult {
    let path = model_path(run)?;
    let req: Request = serde_json::from_str(&std::fs::read_to_string(path).map_err(Error::Io)?).map_err(Error::from)?;
    let file = resolve_state(&req, path.parent())?;
    let mode = match run.mode {
        NumMode::Rational => Mode::Rational,
        NumMode::Float => Mode::Float,
    };
    let out: Value = handle_request(&req, &file, mode)?;
    Ok(to_json(&out)?)
}

fn suite_for(
    name: &str,
    file: &SpeciesFile,
    order: usize,
    reports: &mut Vec<(String, ResidualReport)>,
) -> Result<(), Error> {
    let state = GCState::<Rational>::new(&file.potential()?, file.space()?, order)?;
    for r in identity_suite(&state, 0.0)? {
        reports.push((name.to_string(), r));
    }
    reports.push((name.to_string(), tree_oracle_check(&state, 4)?));
    Ok(())
}

fn cmd_selftest(run: &RunConfig, order: usize) -> CmdResult {
    let mut reports = Vec::new();
    for (name, text) in fixtures::SPECIES {
        suite_for(name, &SpeciesFile::from_json_str(text)?, order, &mut reports)?;
    }
    if let Some(p) = &run.model {
        suite_for(&p.display().to_string(), &SpeciesFile::load(p)?, order, &mut reports)?;
    }
    reports.push(("series".into(), bell_check(6)?));
    let rods = hom_inversion_selftest(&HomogeneousModel::hard_rods(1.0)?, 2)?;
    let passed = reports.iter().all(|(_, r)| r.passed) && rods.passed;
    let text = match run.format {
        Format::Json => to_json(&json!({
            "passed": passed,
            "identities": reports.iter().map(|(n, r)| json!({ "fixture": n, "report": r })).collect::<Vec<_>>(),
            "hard_rods": rods,
        }))?,
        Format::Csv => {
            let mut s = String::from("fixture,identity,max_residual,passed\n");
            for (n, r) in &reports {
                s += &format!("{n},{},{},{}\n", r.identity, format_float(r.max_residual), r.passed);
            }
            s += &format!("hard_rods,tonks three-route check,0,{}\n", rods.passed);
            s
        }
    };
    if passed {
        Ok(text)
    } else {
        emit(run, &text).map_err(Error::Io)?;
        Err(Failure::Selftest)
    }
}
