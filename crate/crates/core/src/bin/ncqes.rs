//! Command-line front end. Every subcommand reads an optional JSON scenario
//! file and lets inline flags override its fields.

use std::fs;
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde::de::DeserializeOwned;
use serde::Serialize;

use ncqes::check::check_report;
use ncqes::spectra::{emit, emit_splitting, run_scenario, splitting_table, Format, Output, Scenario, Solver, Tolerances};
use ncqes::{classify_family, format_potential, parse_potential, theta_expand, DeformationContext, Space, Spin};

#[derive(Parser)]
#[command(name = "ncqes", version, about = "QES radial spectra under noncommutative deformation")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Parse a potential and print its canonical form and family.
    Parse(ScenarioArgs),
    /// Split the deformed potential into absorbed, constant and perturbative parts.
    Deform(ScenarioArgs),
    /// Exact QES levels (no oracle) over the scenario grid.
    Solve(ScenarioArgs),
    /// First-order levels with the scenario's solver choice.
    Perturb(ScenarioArgs),
    /// Finite-difference levels only.
    Oracle(ScenarioArgs),
    /// Spin splitting E(down) - E(up) per (θ, n, m).
    Splitting(ScenarioArgs),
    /// Compare printed deformation and correction formulas with derived ones.
    CheckPaper(CheckArgs),
}

#[derive(Args)]
struct ScenarioArgs {
    /// JSON scenario file; inline flags override its fields.
    #[arg(long)]
    scenario: Option<PathBuf>,
    #[arg(long)]
    potential: Option<String>,
    /// real or complex
    #[arg(long, value_parser = enum_arg::<Space>)]
    space: Option<Space>,
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
    theta: Option<Vec<f64>>,
    #[arg(long, value_delimiter = ',')]
    m: Option<Vec<u32>>,
    /// up, down or none
    #[arg(long, value_delimiter = ',', value_parser = enum_arg::<Spin>)]
    spins: Option<Vec<Spin>>,
    #[arg(long, value_delimiter = ',')]
    levels: Option<Vec<usize>>,
    /// qes, oracle or both
    #[arg(long, value_parser = enum_arg::<Solver>)]
    solver: Option<Solver>,
    /// csv or json
    #[arg(long, value_parser = enum_arg::<Format>)]
    format: Option<Format>,
    #[arg(long)]
    out: Option<String>,
    /// Put b on the commutative solvability root of each (n, m).
    #[arg(long)]
    tune_b: bool,
    #[arg(long)]
    energy_tolerance: Option<f64>,
    #[arg(long)]
    b_tolerance: Option<f64>,
}

#[derive(Args)]
struct CheckArgs {
    #[arg(long, default_value = "r^2 + 2*r^-2 + 2*r^-4 + r^-6")]
    even: String,
    #[arg(long, default_value = "-3*r^-1 - r^-2 + r^-3 + r^-4")]
    inverse: String,
    #[arg(long, default_value_t = 1)]
    m: u32,
    #[arg(long, value_parser = enum_arg::<Format>, default_value = "csv")]
    format: Format,
}

fn enum_arg<T: DeserializeOwned>(s: &str) -> Result<T, String> {
    serde_json::from_value(serde_json::Value::String(s.to_string())).map_err(|e| e.to_string())
}

impl ScenarioArgs {
    fn scenario(&self) -> Result<Scenario, String> {
        let mut s = match &self.scenario {
            Some(path) => {
                let text = fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
                serde_json::from_str(&text).map_err(|e| format!("{}: {e}", path.display()))?
            }
            None => Scenario {
                potential_text: String::new(),
                space: Space::Real,
                theta_values: vec![0.0],
                m_values: vec![0],
                spins: vec![],
                levels: vec![0],
                solver: Solver::Both,
                tolerances: Tolerances::default(),
                output: Output::default(),
                tune_b: false,
            },
        };
        if let Some(p) = &self.potential {
            s.potential_text = p.clone();
        }
        if let Some(v) = self.space {
            s.space = v;
        }
        if let Some(v) = &self.theta {
            s.theta_values = v.clone();
        }
        if let Some(v) = &self.m {
            s.m_values = v.clone();
        }
        if let Some(v) = &self.spins {
            s.spins = v.clone();
        }
        if s.spins.is_empty() {
            s.spins = match s.space {
                Space::Real => vec![Spin::None],
                Space::Complex => vec![Spin::Up, Spin::Down],
            };
        }
        if let Some(v) = &self.levels {
            s.levels = v.clone();
        }
        if let Some(v) = self.solver {
            s.solver = v;
        }
        if let Some(v) = self.format {
            s.output.format = v;
        }
        if let Some(v) = &self.out {
            s.output.path = Some(v.clone());
        }
        if let Some(v) = self.energy_tolerance {
            s.tolerances.energy_relative = v;
        }
        if let Some(v) = self.b_tolerance {
            s.tolerances.b_relative = v;
        }
        s.tune_b |= self.tune_b;
        Ok(s)
    }
}

fn write_out(bytes: &[u8], path: Option<&str>) -> Result<(), String> {
    match path {
        Some(p) => fs::write(p, bytes).map_err(|e| format!("{p}: {e}")),
        None => std::io::stdout().write_all(bytes).map_err(|e| e.to_string()),
    }
}

fn json<T: Serialize>(value: &T) -> Result<Vec<u8>, String> {
    let mut v = serde_json::to_vec_pretty(value).map_err(|e| e.to_string())?;
    v.push(b'\n');
    Ok(v)
}

/// Returns whether the run was clean (no flagged lines).
fn run(cli: Cli) -> Result<bool, String> {
    match cli.command {
        Command::Parse(args) => {
            let s = args.scenario()?;
            let p = parse_potential(&s.potential_text).map_err(|e| e.to_string())?;
            let report = serde_json::json!({
                "canonical": format_potential(&p),
                "family": classify_family(&p),
                "terms": p,
            });
            write_out(&json(&report)?, s.output.path.as_deref())?;
            Ok(true)
        }
        Command::Deform(args) => {
            let s = args.scenario()?;
            let p = s.validate().map_err(|e| e.to_string())?;
            let mut rows = Vec::new();
            for &theta in &s.theta_values {
                for &m in &s.m_values {
                    for &spin in &s.spins {
                        let ctx = DeformationContext::new(theta, m, spin, s.space).map_err(|e| e.to_string())?;
                        rows.push(serde_json::json!({
                            "theta": theta,
                            "m": m,
                            "s_z": spin.s_z(),
                            "deformed": theta_expand(&p, &ctx),
                        }));
                    }
                }
            }
            write_out(&json(&rows)?, s.output.path.as_deref())?;
            Ok(true)
        }
        Command::Solve(args) => lines(args, Some(Solver::Qes), false),
        Command::Perturb(args) => lines(args, None, false),
        Command::Oracle(args) => lines(args, Some(Solver::Oracle), false),
        Command::Splitting(args) => lines(args, Some(Solver::Qes), true),
        Command::CheckPaper(args) => {
            let even = parse_potential(&args.even).map_err(|e| e.to_string())?;
            let inverse = parse_potential(&args.inverse).map_err(|e| e.to_string())?;
            let ctx = DeformationContext::commutative(args.m);
            let rows = check_report(&even, &inverse, &ctx).map_err(|e| e.to_string())?;
            let bytes = match args.format {
                Format::Json => json(&rows)?,
                Format::Csv => {
                    let mut w = csv::Writer::from_writer(Vec::new());
                    w.write_record(["location", "printed", "engine", "classification", "note"])
                        .map_err(|e| e.to_string())?;
                    for r in &rows {
                        w.write_record([
                            r.location.to_string(),
                            format!("{:.16e}", r.printed),
                            format!("{:.16e}", r.engine),
                            r.classification.to_string(),
                            r.note.clone(),
                        ])
                        .map_err(|e| e.to_string())?;
                    }
                    w.into_inner().map_err(|e| e.to_string())?
                }
            };
            write_out(&bytes, None)?;
            Ok(true)
        }
    }
}

fn lines(args: ScenarioArgs, solver: Option<Solver>, splitting: bool) -> Result<bool, String> {
    let mut s = args.scenario()?;
    if let Some(v) = solver {
        s.solver = v;
    }
    let lines = run_scenario(&s).map_err(|e| e.to_string())?;
    for l in lines.iter().filter(|l| l.error.is_some()) {
        eprintln!(
            "theta={} n={} m={} s_z={}: {}",
            l.theta,
            l.n,
            l.m,
            l.s_z,
            l.error.as_deref().unwrap_or_default()
        );
    }
    let bytes = if splitting {
        emit_splitting(&splitting_table(&lines), s.output.format)
    } else {
        emit(&lines, s.output.format)
    }
    .map_err(|e| e.to_string())?;
    write_out(&bytes, s.output.path.as_deref())?;
    Ok(!lines.iter().any(|l| l.flagged()))
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
