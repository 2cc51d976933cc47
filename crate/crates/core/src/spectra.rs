//! Scenario grids, spectral lines, splitting tables and their CSV/JSON form.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::deform::{theta_expand, DeformationContext, Space, Spin};
use crate::error::{Error, Result};
use crate::oracle::{solve_radial_numeric, RadialProblem};
use crate::perturb::{first_order_level, tune_b, LevelMethod};
use crate::potential::{parse_potential, LaurentPotential};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Solver {
    Qes,
    Oracle,
    Both,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct Tolerances {
    /// Relative distance of `b` from a solvability root.
    pub b_relative: f64,
    /// Allowed `|E_total - E_oracle| / max(1, |E|)`.
    pub energy_relative: f64,
    /// Extra allowance `c · θ_eff²` for the truncation of first-order theory.
    pub second_order: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            b_relative: 1e-9,
            energy_relative: 1e-5,
            second_order: 10.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(default)]
pub struct Output {
    pub format: Format,
    /// Standard output when absent.
    pub path: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Scenario {
    pub potential_text: String,
    pub space: Space,
    pub theta_values: Vec<f64>,
    pub m_values: Vec<u32>,
    pub spins: Vec<Spin>,
    pub levels: Vec<usize>,
    pub solver: Solver,
    #[serde(default)]
    pub tolerances: Tolerances,
    #[serde(default)]
    pub output: Output,
    /// Move `b` onto the commutative solvability root of each `(n, m)`
    /// before deforming, so one potential text serves every `m`.
    #[serde(default)]
    pub tune_b: bool,
}

impl Scenario {
    pub fn validate(&self) -> Result<LaurentPotential> {
        let p = parse_potential(&self.potential_text)?;
        if self.theta_values.is_empty() || self.m_values.is_empty() || self.spins.is_empty() || self.levels.is_empty() {
            return Err(Error::Invalid("scenario grids must be nonempty".into()));
        }
        if let Some(t) = self.theta_values.iter().find(|t| !t.is_finite()) {
            return Err(Error::Invalid(format!("theta {t} is not finite")));
        }
        let spins_ok = match self.space {
            Space::Real => self.spins.iter().all(|&s| s == Spin::None),
            Space::Complex => self.spins.iter().all(|&s| s != Spin::None),
        };
        if !spins_ok {
            return Err(Error::Invalid(
                "real space takes spins = [none]; complex space takes up and/or down".into(),
            ));
        }
        Ok(p)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectralLine {
    pub theta: f64,
    pub n: usize,
    pub m: u32,
    pub s_z: f64,
    #[serde(rename = "E_base")]
    pub e_base: Option<f64>,
    pub shift_const: Option<f64>,
    #[serde(rename = "dE_pert")]
    pub de_pert: Option<f64>,
    #[serde(rename = "E_total")]
    pub e_total: Option<f64>,
    #[serde(rename = "E_oracle")]
    pub e_oracle: Option<f64>,
    pub method: String,
    /// `pass`, `flag`, or the kind of the error that stopped this line.
    pub flag: String,
    pub error: Option<String>,
}

impl SpectralLine {
    pub fn flagged(&self) -> bool {
        self.flag != "pass"
    }
}

struct Point {
    theta: f64,
    n: usize,
    m: u32,
    spin: Spin,
}

/// Evaluates every grid point, in the order `(θ, n, m, s_z)` of the grids.
pub fn run_scenario(s: &Scenario) -> Result<Vec<SpectralLine>> {
    let p = s.validate()?;
    let mut points = Vec::new();
    for &theta in &s.theta_values {
        for &n in &s.levels {
            for &m in &s.m_values {
                for &spin in &s.spins {
                    points.push(Point { theta, n, m, spin });
                }
            }
        }
    }
    Ok(points.par_iter().map(|pt| evaluate(s, &p, pt)).collect())
}

fn evaluate(s: &Scenario, p: &LaurentPotential, pt: &Point) -> SpectralLine {
    let mut line = SpectralLine {
        theta: pt.theta,
        n: pt.n,
        m: pt.m,
        s_z: pt.spin.s_z(),
        e_base: None,
        shift_const: None,
        de_pert: None,
        e_total: None,
        e_oracle: None,
        method: String::new(),
        flag: "pass".into(),
        error: None,
    };
    if let Err(e) = fill(s, p, pt, &mut line) {
        line.flag = e.kind().into();
        line.error = Some(e.to_string());
    }
    line
}

fn fill(s: &Scenario, p: &LaurentPotential, pt: &Point, line: &mut SpectralLine) -> Result<()> {
    let ctx = DeformationContext::new(pt.theta, pt.m, pt.spin, s.space)?;
    let p = if s.tune_b {
        tune_b(p, &DeformationContext::commutative(pt.m), pt.n)?
    } else {
        p.clone()
    };
    let mut oracle_index = pt.n;
    if s.solver != Solver::Oracle {
        let lvl = first_order_level(&p, &ctx, pt.n, s.tolerances.b_relative)?;
        line.e_base = Some(lvl.e_base);
        line.shift_const = Some(lvl.shift_const);
        line.de_pert = Some(lvl.de_pert);
        line.e_total = Some(lvl.e_total);
        line.method = match lvl.method {
            LevelMethod::Qes => "qes",
            LevelMethod::QesLinearized => "qes-linearized",
        }
        .into();
        oracle_index = lvl.state.nodes();
    }
    if s.solver != Solver::Qes {
        let total = theta_expand(&p, &ctx).total();
        let prob = RadialProblem::auto(total, pt.m, oracle_index + 1)?;
        let res = solve_radial_numeric(&prob, oracle_index + 1)?;
        line.e_oracle = Some(res.eigenvalues[oracle_index]);
        line.method = if line.method.is_empty() {
            "oracle".into()
        } else {
            format!("{}+oracle", line.method)
        };
    }
    if let (Some(e), Some(o)) = (line.e_total, line.e_oracle) {
        let t = s.tolerances;
        let theta_eff = ctx.theta_eff();
        let allowed = t.energy_relative * e.abs().max(1.0) + t.second_order * theta_eff * theta_eff;
        if (e - o).abs() > allowed {
            line.flag = "flag".into();
        }
    }
    Ok(())
}

pub const CSV_COLUMNS: [&str; 10] = [
    "theta", "n", "m", "s_z", "E_base", "shift_const", "dE_pert", "E_total", "E_oracle", "flag",
];

/// 17 significant digits, enough to round-trip any `f64`.
pub fn format_float(x: f64) -> String {
    format!("{x:.16e}")
}

fn opt(x: Option<f64>) -> String {
    x.map(format_float).unwrap_or_default()
}

pub fn emit(lines: &[SpectralLine], format: Format) -> Result<Vec<u8>> {
    match format {
        Format::Json => serde_json::to_vec_pretty(lines).map_err(|e| Error::Invalid(e.to_string())),
        Format::Csv => {
            let mut w = csv::Writer::from_writer(Vec::new());
            let io = |e: csv::Error| Error::Invalid(e.to_string());
            w.write_record(CSV_COLUMNS).map_err(io)?;
            for l in lines {
                w.write_record([
                    format_float(l.theta),
                    l.n.to_string(),
                    l.m.to_string(),
                    format_float(l.s_z),
                    opt(l.e_base),
                    opt(l.shift_const),
                    opt(l.de_pert),
                    opt(l.e_total),
                    opt(l.e_oracle),
                    l.flag.clone(),
                ])
                .map_err(io)?;
            }
            w.into_inner().map_err(|e| Error::Invalid(e.to_string()))
        }
    }
}

/// Spin splitting `E(down) - E(up)` at fixed `(θ, n, m)`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SplittingRow {
    pub theta: f64,
    pub n: usize,
    pub m: u32,
    pub e_down: f64,
    pub e_up: f64,
    pub splitting: f64,
    /// Difference of the constant shifts, exactly `2aθ` for the even family.
    pub constant_part: f64,
    /// Remainder from the absorbed coefficients and the perturbation.
    pub residual_part: f64,
    /// `splitting / θ`: the effective linear-in-θ slope of the pair.
    pub slope: f64,
}

pub fn splitting_table(lines: &[SpectralLine]) -> Vec<SplittingRow> {
    let mut rows = Vec::new();
    for down in lines.iter().filter(|l| l.s_z < 0.0) {
        let Some(up) = lines
            .iter()
            .find(|l| l.s_z > 0.0 && l.theta == down.theta && l.n == down.n && l.m == down.m)
        else {
            continue;
        };
        let (Some(ed), Some(eu), Some(sd), Some(su)) = (down.e_total, up.e_total, down.shift_const, up.shift_const) else {
            continue;
        };
        let splitting = ed - eu;
        let constant_part = sd - su;
        rows.push(SplittingRow {
            theta: down.theta,
            n: down.n,
            m: down.m,
            e_down: ed,
            e_up: eu,
            splitting,
            constant_part,
            residual_part: splitting - constant_part,
            slope: if down.theta != 0.0 { splitting / down.theta } else { f64::NAN },
        });
    }
    rows
}

pub const SPLITTING_COLUMNS: [&str; 9] = [
    "theta", "n", "m", "E_down", "E_up", "splitting", "constant_part", "residual_part", "slope",
];

pub fn emit_splitting(rows: &[SplittingRow], format: Format) -> Result<Vec<u8>> {
    match format {
        Format::Json => serde_json::to_vec_pretty(rows).map_err(|e| Error::Invalid(e.to_string())),
        Format::Csv => {
            let mut w = csv::Writer::from_writer(Vec::new());
            let io = |e: csv::Error| Error::Invalid(e.to_string());
            w.write_record(SPLITTING_COLUMNS).map_err(io)?;
            for r in rows {
                w.write_record([
                    format_float(r.theta),
                    r.n.to_string(),
                    r.m.to_string(),
                    format_float(r.e_down),
                    format_float(r.e_up),
                    format_float(r.splitting),
                    format_float(r.constant_part),
                    format_float(r.residual_part),
                    format_float(r.slope),
                ])
                .map_err(io)?;
            }
            w.into_inner().map_err(|e| Error::Invalid(e.to_string()))
        }
    }
}
