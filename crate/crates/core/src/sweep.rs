//! Evaluation of configured points: single-point reports, parameter sweeps,
//! truncated-versus-full comparisons and Fock-cutoff convergence tables.

use std::fmt::{self, Write as _};

use rayon::prelude::*;

use crate::collective::{two_excitation_block, CollectiveParams};
use crate::config::{Engine, Observable, PointSpec, SweepSpec};
use crate::dark_state::{dark_conditions_double, dfs_requirements_double, DarkReport, DoubleDfsRequirements};
use crate::dynamics::{steady_state, DensityMatrix};
use crate::error::{Error, Result};
use crate::fock::FockCutoff;
use crate::model::{build_liouvillian, derive, DerivedParams, SystemParams};
use crate::observables::{g2_zero, leakage, mean_n, population, purity, ObservableSet, PopulationLabel};
use crate::truncated::{embed_truncated, truncated_steady, TruncatedParams};

/// Sentinel written instead of a number when a value is undefined.
pub const UNDEFINED: &str = "undefined";

/// Steady state of one point, always expressed in the full product space.
#[derive(Debug, Clone)]
pub struct Evaluation {
    pub params: SystemParams,
    pub cutoff: FockCutoff,
    pub cp: CollectiveParams,
    pub state: DensityMatrix,
}

impl Evaluation {
    pub fn observable(&self, obs: Observable) -> Result<Option<f64>> {
        Ok(match obs {
            Observable::G2 => g2_zero(&self.state, self.cutoff)?,
            Observable::MeanN => Some(mean_n(&self.state, self.cutoff)?),
            Observable::Purity => Some(purity(&self.state)),
            Observable::Leakage => Some(leakage(&self.state, self.cutoff)?),
            Observable::Population(l) => Some(population(&self.state, l, self.cutoff, &self.cp)?),
        })
    }
}

pub fn truncated_params(spec: &PointSpec) -> Result<TruncatedParams> {
    let mut p = TruncatedParams::from_system(&spec.system_params()?)?;
    if let Some(g) = spec.g_chi {
        p.g_chi = g;
    }
    Ok(p)
}

pub fn evaluate(spec: &PointSpec) -> Result<Evaluation> {
    spec.validate()?;
    let params = spec.system_params()?;
    let cp = CollectiveParams::from_derived(&derive(&params));
    let state = match spec.engine {
        Engine::Full => steady_state(&build_liouvillian(&params, spec.cutoff))?,
        Engine::Truncated => {
            let tp = truncated_params(spec)?;
            embed_truncated(&truncated_steady(&tp)?, &tp.cp, spec.cutoff)?
        }
    };
    Ok(Evaluation { params, cutoff: spec.cutoff, cp, state })
}

/// Steady-state observables plus the analytic dark-state diagnostics.
#[derive(Debug, Clone)]
pub struct PointReport {
    pub spec: PointSpec,
    pub params: SystemParams,
    pub derived: DerivedParams,
    pub observables: ObservableSet,
    pub leakage: f64,
    pub dark: DarkReport,
    pub dfs: std::result::Result<DoubleDfsRequirements, Error>,
}

pub fn run_point(spec: &PointSpec) -> Result<PointReport> {
    let eval = evaluate(spec)?;
    let labels: Vec<PopulationLabel> =
        ["g0", "g1", "g2", "e0", "e1", "one", "psi", "phi", "xi", "zeta"].iter().map(|s| s.parse()).collect::<Result<_>>()?;
    Ok(PointReport {
        spec: *spec,
        params: eval.params,
        derived: derive(&eval.params),
        observables: ObservableSet::compute(&eval.state, eval.cutoff, &eval.cp, &labels)?,
        leakage: leakage(&eval.state, eval.cutoff)?,
        dark: dark_conditions_double(&eval.params)?,
        dfs: dfs_requirements_double(&eval.params),
    })
}

fn fmt_opt(v: Option<f64>) -> String {
    v.map_or_else(|| UNDEFINED.to_string(), fmt_num)
}

fn fmt_num(v: f64) -> String {
    format!("{v:.16e}")
}

fn fmt_complex(z: num_complex::Complex64) -> String {
    format!("{:.6e} {:+.6e}i", z.re, z.im)
}

impl fmt::Display for PointReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let p = &self.params;
        let d = &self.derived;
        writeln!(f, "engine          {} (n_max = {})", self.spec.engine, self.spec.cutoff.n_max())?;
        writeln!(f, "parameters      gamma={} chi={} delta_c={} delta_a={}", p.gamma, p.chi, p.delta_c, p.delta_a)?;
        writeln!(f, "                omega_c={} omega_a={} |E|={} phi_d={} x_phase={}", p.omega_c, p.omega_a, p.e_mag, p.phi_d, p.x_phase)?;
        writeln!(f, "derived         u={:.6} w={:.6} G_chi={:.6} Gamma_chi={:.6}", d.u, d.w, d.g_chi, d.gamma_chi)?;
        let g_chi = self.spec.g_chi.map_or(String::new(), |g| format!(" (overridden: G_chi={g})"));
        writeln!(f, "                Omega_psi={:.6e} Omega_phi={:.6e}{g_chi}", d.omega_psi, d.omega_phi)?;
        writeln!(f, "g2(0)           {}", fmt_opt(self.observables.g2))?;
        writeln!(f, "mean_n          {}", fmt_num(self.observables.mean_n))?;
        writeln!(f, "purity          {}", fmt_num(self.observables.purity))?;
        writeln!(f, "leakage (n>2)   {}", fmt_num(self.leakage))?;
        for (label, v) in &self.observables.populations {
            writeln!(f, "pop {label:<11} {}", fmt_num(*v))?;
        }
        let dark = &self.dark;
        writeln!(f, "dark flags      equal_drives={} equal_damping={} symmetric_detuning={} pump_matched={}",
            dark.flags.equal_drives, dark.flags.equal_damping, dark.flags.symmetric_detuning, dark.flags.pump_matched)?;
        writeln!(f, "dark residuals  jump={:.3e} dark={:.3e} dfs={:.3e}", dark.jump_residual, dark.dark_residual, dark.dfs_residual)?;
        match &self.dfs {
            Ok(r) => {
                let phase = if r.phase_free { " (phase free)" } else { "" };
                writeln!(f, "E_required      {}{phase}", fmt_complex(r.required_e))?;
                write!(f, "c_phi/c_1       {}", fmt_complex(r.c_phi_over_c1))
            }
            Err(e) => write!(f, "E_required      n/a: {e}"),
        }
    }
}

/// Numeric table with a `# ` comment header, rendered as CSV.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub comments: Vec<String>,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Option<f64>>>,
}

impl Table {
    pub fn column(&self, name: &str) -> Option<Vec<Option<f64>>> {
        let i = self.columns.iter().position(|c| c == name)?;
        Some(self.rows.iter().map(|r| r[i]).collect())
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        for c in &self.comments {
            let _ = writeln!(out, "# {c}");
        }
        let _ = writeln!(out, "{}", self.columns.join(","));
        for row in &self.rows {
            let _ = writeln!(out, "{}", row.iter().map(|v| fmt_opt(*v)).collect::<Vec<_>>().join(","));
        }
        out
    }
}

/// Resolved settings of a point, one `key = value` per entry.
pub fn describe_point(spec: &PointSpec) -> Result<Vec<String>> {
    let params = spec.system_params()?;
    let mut lines: Vec<String> = toml::to_string(&params)
        .map_err(|e| Error::Config(e.to_string()))?
        .lines()
        .map(str::to_string)
        .collect();
    lines.push(format!("e_rule = {:?}", spec.e_rule).to_lowercase());
    lines.push(format!("omega_a_tracks_omega_c = {}", spec.omega_a.is_none()));
    lines.push(format!("engine = {}", spec.engine));
    lines.push(format!("n_max = {}", spec.cutoff.n_max()));
    if let Some(g) = spec.g_chi {
        lines.push(format!("g_chi = {g}"));
    }
    Ok(lines)
}

fn sweep_rows(spec: &SweepSpec) -> Result<Vec<Vec<Option<f64>>>> {
    spec.validate()?;
    spec.grid()
        .par_iter()
        .map(|&x| {
            let mut point = spec.base;
            spec.parameter.apply(&mut point, x);
            let eval = evaluate(&point)?;
            let values = spec.outputs.iter().map(|&o| eval.observable(o)).collect::<Result<Vec<_>>>()?;
            Ok(values)
        })
        .collect()
}

/// Evaluates every grid point (in parallel) and emits rows in grid order.
pub fn run_sweep(spec: &SweepSpec) -> Result<Table> {
    let values = sweep_rows(spec)?;
    let mut comments = vec![format!("sweep {} over [{}, {}] with {} points", spec.parameter.name(), spec.lo, spec.hi, spec.points)];
    comments.extend(describe_point(&spec.base)?);
    comments.push("rates and detunings in units of kappa".into());
    let mut columns = vec![spec.parameter.column()];
    columns.extend(spec.outputs.iter().map(|o| o.to_string()));
    let rows = spec.grid().into_iter().zip(values).map(|(x, v)| std::iter::once(Some(x)).chain(v).collect()).collect();
    Ok(Table { comments, columns, rows })
}

/// Several sweeps over a shared grid, side by side; columns are suffixed
/// with the curve label.
pub fn run_curves(curves: &[(String, SweepSpec)]) -> Result<Table> {
    let first = &curves.first().ok_or_else(|| Error::Config("no curves".into()))?.1;
    let mut columns = vec![first.parameter.column()];
    let mut comments = vec![format!("sweep {} over [{}, {}] with {} points", first.parameter.name(), first.lo, first.hi, first.points)];
    let mut rows: Vec<Vec<Option<f64>>> = first.grid().into_iter().map(|x| vec![Some(x)]).collect();
    for (label, spec) in curves {
        if label.contains([',', '"', '\n']) {
            return Err(Error::Config(format!("curve label `{label}` would break the CSV header")));
        }
        if (spec.parameter, spec.lo, spec.hi, spec.points) != (first.parameter, first.lo, first.hi, first.points) {
            return Err(Error::Config(format!("curve `{label}` uses a different grid")));
        }
        comments.push(format!("curve {label}: {}", describe_point(&spec.base)?.join("; ")));
        columns.extend(spec.outputs.iter().map(|o| format!("{o}[{label}]")));
        for (row, values) in rows.iter_mut().zip(sweep_rows(spec)?) {
            row.extend(values);
        }
    }
    comments.push("rates and detunings in units of kappa".into());
    Ok(Table { comments, columns, rows })
}

/// Truncated five-state steady state against the full one restricted to at
/// most two excitations.
#[derive(Debug, Clone)]
pub struct OracleReport {
    /// Frobenius distance between the two 5 × 5 product-basis blocks.
    pub distance: f64,
    /// Full-space population above two excitations.
    pub leakage: f64,
    pub truncated: DensityMatrix,
    pub full: DensityMatrix,
    pub cutoff: FockCutoff,
}

impl fmt::Display for OracleReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "n_max           {}", self.cutoff.n_max())?;
        writeln!(f, "frobenius       {}", fmt_num(self.distance))?;
        write!(f, "leakage (n>2)   {}", fmt_num(self.leakage))
    }
}

pub fn run_oracle_compare(spec: &PointSpec) -> Result<OracleReport> {
    if spec.g_chi.is_some() {
        return Err(Error::Config("oracle comparison needs the physical G_chi; remove the g_chi override".into()));
    }
    let full = evaluate(&PointSpec { engine: Engine::Full, ..*spec })?;
    let truncated = evaluate(&PointSpec { engine: Engine::Truncated, ..*spec })?;
    let block = |e: &Evaluation| two_excitation_block(e.state.matrix(), e.cutoff);
    let distance = (block(&full) - block(&truncated)).norm();
    Ok(OracleReport {
        distance,
        leakage: leakage(&full.state, full.cutoff)?,
        truncated: truncated.state,
        full: full.state,
        cutoff: spec.cutoff,
    })
}

/// Observables against the Fock cutoff, with differences to the previous row.
pub fn run_convergence(spec: &PointSpec, cutoffs: &[usize]) -> Result<Table> {
    if cutoffs.is_empty() {
        return Err(Error::Config("no cutoffs given".into()));
    }
    let outputs: Vec<Observable> =
        ["g2", "mean_n", "purity", "pop_g1"].iter().map(|s| s.parse()).collect::<Result<_>>()?;
    let values = cutoffs
        .par_iter()
        .map(|&n| {
            let point = PointSpec { engine: Engine::Full, cutoff: FockCutoff::new(n)?, ..*spec };
            let eval = evaluate(&point)?;
            outputs.iter().map(|&o| eval.observable(o)).collect::<Result<Vec<_>>>()
        })
        .collect::<Result<Vec<_>>>()?;

    let mut columns = vec!["n_max".to_string()];
    for o in &outputs {
        columns.push(o.to_string());
        columns.push(format!("diff_{o}"));
    }
    let mut rows = Vec::with_capacity(cutoffs.len());
    for (k, (&n, v)) in cutoffs.iter().zip(&values).enumerate() {
        let mut row = vec![Some(n as f64)];
        for (j, &x) in v.iter().enumerate() {
            let diff = if k == 0 { None } else { x.zip(values[k - 1][j]).map(|(a, b)| (a - b).abs()) };
            row.push(x);
            row.push(diff);
        }
        rows.push(row);
    }
    let mut comments = vec![format!("convergence in n_max over {cutoffs:?}")];
    comments.extend(describe_point(&PointSpec { engine: Engine::Full, ..*spec })?);
    Ok(Table { comments, columns, rows })
}
