//! Experiment configuration, validation and dispatch.
//!
//! A configuration is a flat JSON object. Every field is optional; missing
//! ones are filled from per-experiment defaults by
//! [`ExperimentConfig::resolve`], and the resolved object is embedded in
//! the CSV metadata line so that a file records exactly how it was made.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::basis::MomentumBasis;
use crate::bathcorr::delta_limit_report;
use crate::bessel::{tail_rule_n_cut, BesselTable};
use crate::bound::{bound_state, default_g_grid};
use crate::csv::{Cell, Table};
use crate::densmat::{purity, von_neumann_entropy, DensityMatrix};
use crate::error::Error;
use crate::floquet::{exact_two_rotor_run, BathSpec, KickedSystemParams};
use crate::kraus::{apply_quadrature, iterate, min_quadrature_points, Boundary, KrausChannel};
use crate::lindblad::{continuous_evolve, kicked_trajectory, LindbladGenerator, LindbladTrajectory, MAX_STEP_RATE};
use crate::mathieu::{default_truncation, even_coefficients, QConvention, ORDER_BUFFER};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Experiment {
    EntropySweep,
    KickedMap,
    LindbladKicked,
    LindbladContinuous,
    ExactTwoRotor,
    BathCorr,
    Mathieu,
}

impl Experiment {
    pub const ALL: [Experiment; 7] = [
        Experiment::EntropySweep,
        Experiment::KickedMap,
        Experiment::LindbladKicked,
        Experiment::LindbladContinuous,
        Experiment::ExactTwoRotor,
        Experiment::BathCorr,
        Experiment::Mathieu,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Experiment::EntropySweep => "entropy-sweep",
            Experiment::KickedMap => "kicked-map",
            Experiment::LindbladKicked => "lindblad-kicked",
            Experiment::LindbladContinuous => "lindblad-continuous",
            Experiment::ExactTwoRotor => "exact-two-rotor",
            Experiment::BathCorr => "bath-corr",
            Experiment::Mathieu => "mathieu",
        }
    }

    pub fn columns(self) -> &'static [&'static str] {
        match self {
            Experiment::EntropySweep => &["g", "E2", "S"],
            Experiment::KickedMap => &["kick", "time", "S", "trace_dev", "purity"],
            Experiment::LindbladKicked | Experiment::LindbladContinuous => {
                &["step_or_t", "S", "trace_dev", "edge_occupation"]
            }
            Experiment::ExactTwoRotor => &["kick", "S_system", "bath_trace_distance"],
            Experiment::BathCorr => &["N0", "Delta", "re", "im", "abs", "bound"],
            Experiment::Mathieu => &["order", "q", "a", "k", "A_2k"],
        }
    }

    /// Keys read by this experiment besides `experiment` and `output`.
    fn keys(self) -> &'static [&'static str] {
        match self {
            Experiment::EntropySweep => &["g_grid", "order", "q_convention"],
            Experiment::Mathieu => &["q_grid", "order", "K"],
            Experiment::KickedMap => &["g", "tau", "m_S", "M", "n_kicks", "n_cut", "method", "N_theta", "boundary"],
            Experiment::LindbladKicked => &["g", "tau", "m_S", "M", "n_kicks", "bath_rotors"],
            Experiment::LindbladContinuous => &["g", "m_S", "M", "t_final", "dt", "bath_rotors"],
            Experiment::ExactTwoRotor => &["g", "tau", "m_S", "m_B", "M_S", "M_B", "N0", "n_kicks"],
            Experiment::BathCorr => &["N0", "m_B", "delta_grid"],
        }
    }
}

impl fmt::Display for Experiment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Experiment {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Experiment::ALL
            .into_iter()
            .find(|e| e.name() == s)
            .ok_or_else(|| {
                let names: Vec<_> = Experiment::ALL.iter().map(|e| e.name()).collect();
                format!("unknown experiment '{s}' (expected one of: {})", names.join(", "))
            })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum MapMethod {
    Bessel,
    Quadrature,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BoundaryName {
    Truncate,
    Periodic,
}

/// A scalar or a list of bath cutoffs.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Cutoffs {
    One(u64),
    Many(Vec<u64>),
}

impl Cutoffs {
    pub fn values(&self) -> Vec<u64> {
        match self {
            Cutoffs::One(n) => vec![*n],
            Cutoffs::Many(v) => v.clone(),
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub experiment: Option<Experiment>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub g: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tau: Option<f64>,
    #[serde(rename = "m_S", skip_serializing_if = "Option::is_none")]
    pub m_s: Option<f64>,
    #[serde(rename = "m_B", skip_serializing_if = "Option::is_none")]
    pub m_b: Option<f64>,
    #[serde(rename = "M", skip_serializing_if = "Option::is_none")]
    pub cutoff: Option<usize>,
    #[serde(rename = "M_S", skip_serializing_if = "Option::is_none")]
    pub cutoff_s: Option<usize>,
    #[serde(rename = "M_B", skip_serializing_if = "Option::is_none")]
    pub cutoff_b: Option<usize>,
    #[serde(rename = "N0", skip_serializing_if = "Option::is_none")]
    pub n0: Option<Cutoffs>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n_kicks: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub t_final: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub dt: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub g_grid: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub q_grid: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub delta_grid: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub order: Option<u32>,
    #[serde(rename = "K", skip_serializing_if = "Option::is_none")]
    pub truncation: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n_cut: Option<usize>,
    #[serde(rename = "N_theta", skip_serializing_if = "Option::is_none")]
    pub n_theta: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub method: Option<MapMethod>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub boundary: Option<BoundaryName>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub q_convention: Option<QConvention>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub bath_rotors: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub output: Option<String>,
}

/// One failed precondition.
#[derive(Clone, Debug, PartialEq)]
pub struct Violation {
    pub parameter: String,
    pub value: String,
    pub constraint: String,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} = {}: requires {}", self.parameter, self.value, self.constraint)
    }
}

#[derive(Debug)]
pub enum RunError {
    Config(Vec<Violation>),
    Numeric(Error),
    Io(std::io::Error),
}

impl RunError {
    /// 2 for configuration problems (including an unwritable output path),
    /// 3 for numerical failures.
    pub fn exit_code(&self) -> i32 {
        match self {
            RunError::Config(_) => 2,
            RunError::Numeric(Error::Domain { .. } | Error::Shape { .. } | Error::UnsupportedSector { .. }) => 2,
            RunError::Numeric(_) => 3,
            RunError::Io(_) => 2,
        }
    }
}

impl fmt::Display for RunError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RunError::Config(vs) => {
                write!(f, "[cli] invalid configuration:")?;
                for v in vs {
                    write!(f, "\n  {v}")?;
                }
                Ok(())
            }
            RunError::Numeric(e) => write!(f, "{e}"),
            RunError::Io(e) => write!(f, "[cli] output error: {e}"),
        }
    }
}

impl std::error::Error for RunError {}

impl From<Error> for RunError {
    fn from(e: Error) -> Self {
        RunError::Numeric(e)
    }
}

fn config_error(parameter: &str, value: impl fmt::Display, constraint: impl Into<String>) -> RunError {
    RunError::Config(vec![Violation {
        parameter: parameter.into(),
        value: value.to_string(),
        constraint: constraint.into(),
    }])
}

/// Default kick count for `lindblad-kicked`: enough for the dim-33 run to
/// get within 1% of `ln 33`.
pub const DEFAULT_LINDBLAD_KICKS: usize = 12_000;

fn default_delta_grid() -> Vec<f64> {
    (0..=200).map(|i| i as f64 / 20.0).collect()
}

impl ExperimentConfig {
    /// Parses a JSON object.
    pub fn from_json(value: serde_json::Value) -> Result<Self, RunError> {
        serde_json::from_value(value).map_err(|e| config_error("config", "<json>", e.to_string()))
    }

    pub fn experiment(&self) -> Result<Experiment, RunError> {
        self.experiment
            .ok_or_else(|| config_error("experiment", "<missing>", "one of the named experiments"))
    }

    fn present_keys(&self) -> Vec<&'static str> {
        let v = serde_json::to_value(self).expect("config serializes");
        let obj = v.as_object().expect("object");
        let all = [
            "g", "tau", "m_S", "m_B", "M", "M_S", "M_B", "N0", "n_kicks", "t_final", "dt", "g_grid", "q_grid",
            "delta_grid", "order", "K", "n_cut", "N_theta", "method", "boundary", "q_convention", "bath_rotors",
        ];
        all.into_iter().filter(|k| obj.contains_key(*k)).collect()
    }

    /// Copy with every parameter the experiment reads filled in.
    pub fn resolve(&self) -> Result<Self, RunError> {
        let exp = self.experiment()?;
        let mut c = self.clone();
        match exp {
            Experiment::EntropySweep => {
                c.g_grid.get_or_insert_with(default_g_grid);
                c.order.get_or_insert(0);
                c.q_convention.get_or_insert(QConvention::PaperNumbers);
            }
            Experiment::Mathieu => {
                c.q_grid.get_or_insert_with(|| vec![1.0]);
                c.order.get_or_insert(0);
                let qmax = c.q_grid.as_ref().unwrap().iter().fold(0.0f64, |a, q| a.max(q.abs()));
                let order = c.order.unwrap();
                c.truncation
                    .get_or_insert(default_truncation(qmax).max(order as usize / 2 + ORDER_BUFFER));
            }
            Experiment::KickedMap => {
                let g = *c.g.get_or_insert(0.1414);
                c.tau.get_or_insert(1.0);
                c.m_s.get_or_insert(1.0);
                c.cutoff.get_or_insert(32);
                c.n_kicks.get_or_insert(200);
                let n_cut = *c.n_cut.get_or_insert(tail_rule_n_cut(g));
                let m = c.cutoff.unwrap();
                if *c.method.get_or_insert(MapMethod::Bessel) == MapMethod::Quadrature {
                    c.n_theta.get_or_insert(min_quadrature_points(n_cut, m));
                }
                c.boundary.get_or_insert(BoundaryName::Truncate);
            }
            Experiment::LindbladKicked => {
                c.g.get_or_insert(0.1414);
                c.tau.get_or_insert(1.0);
                c.m_s.get_or_insert(1.0);
                c.cutoff.get_or_insert(16);
                c.n_kicks.get_or_insert(DEFAULT_LINDBLAD_KICKS);
                c.bath_rotors.get_or_insert(1);
            }
            Experiment::LindbladContinuous => {
                c.g.get_or_insert(0.1414);
                c.m_s.get_or_insert(1.0);
                c.cutoff.get_or_insert(8);
                c.t_final.get_or_insert(4000.0);
                c.dt.get_or_insert(1.0);
                c.bath_rotors.get_or_insert(1);
            }
            Experiment::ExactTwoRotor => {
                c.g.get_or_insert(0.2);
                c.tau.get_or_insert(1.0);
                c.m_s.get_or_insert(1.0);
                c.m_b.get_or_insert(100.0);
                c.cutoff_s.get_or_insert(8);
                let n0 = c.n0.get_or_insert(Cutoffs::One(0)).values();
                let n0 = n0.first().copied().unwrap_or(0) as usize;
                c.cutoff_b.get_or_insert(n0 + 16);
                c.n_kicks.get_or_insert(5);
            }
            Experiment::BathCorr => {
                c.n0.get_or_insert(Cutoffs::Many(vec![100, 1000, 10_000]));
                c.m_b.get_or_insert(1.0);
                c.delta_grid.get_or_insert_with(default_delta_grid);
            }
        }
        Ok(c)
    }

    /// Every violated precondition; empty iff [`run`] would start.
    pub fn validate(&self) -> Vec<Violation> {
        let exp = match self.experiment() {
            Ok(e) => e,
            Err(RunError::Config(v)) => return v,
            Err(_) => unreachable!(),
        };
        let mut out = Vec::new();
        let mut bad = |p: &str, v: String, c: String| {
            out.push(Violation {
                parameter: p.into(),
                value: v,
                constraint: c,
            })
        };

        for key in self.present_keys() {
            if !exp.keys().contains(&key) {
                bad(key, "<set>".into(), format!("a parameter read by {exp}"));
            }
        }
        let c = match self.resolve() {
            Ok(c) => c,
            Err(RunError::Config(v)) => return v,
            Err(_) => unreachable!(),
        };

        let positive = |p: &str, v: Option<f64>, bad: &mut dyn FnMut(&str, String, String)| {
            if let Some(x) = v {
                if !(x > 0.0 && x.is_finite()) {
                    bad(p, x.to_string(), format!("{p} > 0"));
                }
            }
        };
        positive("tau", c.tau, &mut bad);
        positive("m_S", c.m_s, &mut bad);
        positive("m_B", c.m_b, &mut bad);
        positive("dt", c.dt, &mut bad);
        if let Some(g) = c.g {
            if !g.is_finite() {
                bad("g", g.to_string(), "finite g".into());
            }
        }
        if let Some(t) = c.t_final {
            if !(t >= 0.0 && t.is_finite()) {
                bad("t_final", t.to_string(), "t_final >= 0".into());
            }
        }
        for (key, m) in [("M", c.cutoff), ("M_S", c.cutoff_s)] {
            if m == Some(0) {
                bad(key, "0".into(), format!("{key} >= 1"));
            }
        }
        if let Some(order) = c.order {
            if order % 2 == 1 {
                bad("order", order.to_string(), "an even order 2n".into());
            }
        }
        if let Some(grid) = &c.g_grid {
            if grid.is_empty() {
                bad("g_grid", "[]".into(), "at least one value".into());
            }
            if let Some(g) = grid.iter().find(|g| !(**g >= 0.0 && g.is_finite())) {
                bad("g_grid", g.to_string(), "finite values g >= 0".into());
            }
        }
        if let Some(grid) = &c.q_grid {
            if grid.is_empty() || grid.iter().any(|q| !q.is_finite()) {
                bad("q_grid", format!("{grid:?}"), "non-empty finite values".into());
            }
        }
        if let Some(grid) = &c.delta_grid {
            if grid.is_empty() || grid.iter().any(|d| !d.is_finite()) {
                bad("delta_grid", format!("{grid:?}"), "non-empty finite values".into());
            }
        }
        if let (Some(k), Some(order)) = (c.truncation, c.order) {
            let need = order as usize / 2 + ORDER_BUFFER;
            if k < need {
                bad("K", k.to_string(), format!("K >= {need} for order {order}"));
            }
        }
        if let (Some(n_cut), Some(g)) = (c.n_cut, c.g) {
            let required = (g.abs() + 30.0).ceil() as usize;
            if n_cut < required {
                let deficit = 1.0 - BesselTable::new(g, n_cut).square_sum();
                bad(
                    "n_cut",
                    n_cut.to_string(),
                    format!("n_cut >= {required} (completeness deficit 1 - sum J_n^2 = {deficit:.3e})"),
                );
            }
        }
        if c.method == Some(MapMethod::Quadrature) {
            if let (Some(nt), Some(m), Some(n_cut), Some(g)) = (c.n_theta, c.cutoff, c.n_cut, c.g) {
                let need = min_quadrature_points(tail_rule_n_cut(g).max(n_cut), m);
                if nt < need {
                    bad("N_theta", nt.to_string(), format!("N_theta >= {need}"));
                }
            }
        }
        if c.bath_rotors == Some(0) {
            bad("bath_rotors", "0".into(), "bath_rotors >= 1".into());
        }
        if let (Experiment::LindbladContinuous, Some(g), Some(dt), Some(n)) = (exp, c.g, c.dt, c.bath_rotors) {
            let gamma = g * g / 2.0 * n as f64;
            if dt * gamma > MAX_STEP_RATE {
                bad("dt", dt.to_string(), format!("dt <= {MAX_STEP_RATE}/gamma = {}", MAX_STEP_RATE / gamma));
            }
        }
        if let Some(n0) = &c.n0 {
            let values = n0.values();
            match exp {
                Experiment::BathCorr => {
                    if values.is_empty() || values.contains(&0) {
                        bad("N0", format!("{values:?}"), "N0 >= 1".into());
                    }
                }
                _ => {
                    if values.len() != 1 {
                        bad("N0", format!("{values:?}"), "a single bath cutoff".into());
                    } else if let Some(mb) = c.cutoff_b {
                        if (mb as u64) < values[0] {
                            bad("M_B", mb.to_string(), format!("M_B >= N0 = {}", values[0]));
                        }
                    }
                }
            }
        }
        out
    }

    /// Resolved configuration as JSON, for CSV metadata.
    pub fn resolved_json(&self) -> Result<serde_json::Value, RunError> {
        Ok(serde_json::to_value(self.resolve()?).expect("config serializes"))
    }
}

fn lindblad_table(meta: serde_json::Value, exp: Experiment, tr: &LindbladTrajectory) -> Table {
    let mut t = Table::new(meta, exp.columns());
    for r in &tr.records {
        t.push(vec![
            r.step_or_t.into(),
            r.entropy.into(),
            r.trace_dev.into(),
            r.edge_occupation.into(),
        ]);
    }
    t
}

/// Validates, resolves and runs one experiment.
pub fn run(config: &ExperimentConfig) -> Result<Table, RunError> {
    let violations = config.validate();
    if !violations.is_empty() {
        return Err(RunError::Config(violations));
    }
    let c = config.resolve()?;
    let exp = c.experiment()?;
    let meta = c.resolved_json()?;
    let mut table = Table::new(meta, exp.columns());

    match exp {
        Experiment::EntropySweep => {
            let conv = c.q_convention.unwrap();
            for &g in c.g_grid.as_ref().unwrap() {
                let r = bound_state(g, c.order.unwrap(), conv)?;
                table.push(vec![g.into(), r.e2.into(), r.entropy.into()]);
            }
        }
        Experiment::Mathieu => {
            let order = c.order.unwrap();
            for &q in c.q_grid.as_ref().unwrap() {
                let mode = even_coefficients(q, order, c.truncation.unwrap())?;
                for (k, a2k) in mode.coefficients().iter().enumerate() {
                    table.push(vec![
                        order.into(),
                        q.into(),
                        mode.characteristic_value().into(),
                        k.into(),
                        (*a2k).into(),
                    ]);
                }
            }
        }
        Experiment::KickedMap => {
            let (g, tau, m_s, m) = (c.g.unwrap(), c.tau.unwrap(), c.m_s.unwrap(), c.cutoff.unwrap());
            let n_dim = 2.0 * PI * m_s / tau;
            let boundary = match c.boundary.unwrap() {
                BoundaryName::Truncate => Boundary::Truncate,
                BoundaryName::Periodic => Boundary::Periodic,
            };
            let channel = KrausChannel::new(g, n_dim, m, c.n_cut.unwrap())?
                .with_period(tau)
                .with_boundary(boundary);
            let rho0 = DensityMatrix::momentum_eigenstate(MomentumBasis::new(m), 0)?;
            match c.method.unwrap() {
                MapMethod::Bessel => {
                    let (rows, _) = iterate(&channel, &rho0, c.n_kicks.unwrap())?;
                    for r in rows {
                        table.push(vec![
                            r.kick.into(),
                            r.time.into(),
                            r.entropy.into(),
                            r.trace_dev.into(),
                            r.purity.into(),
                        ]);
                    }
                }
                MapMethod::Quadrature => {
                    if boundary == Boundary::Periodic {
                        return Err(config_error("boundary", "periodic", "truncate with method = quadrature"));
                    }
                    let n_theta = c.n_theta.unwrap();
                    let mut rho = rho0;
                    for k in 0..=c.n_kicks.unwrap() {
                        if k > 0 {
                            rho = apply_quadrature(g, n_dim, n_theta, &rho)?;
                        }
                        table.push(vec![
                            k.into(),
                            (k as f64 * tau).into(),
                            von_neumann_entropy(&rho)?.into(),
                            (rho.trace().re - 1.0).abs().into(),
                            purity(&rho)?.into(),
                        ]);
                    }
                }
            }
        }
        Experiment::LindbladKicked => {
            let gen = LindbladGenerator::kicked(c.cutoff.unwrap(), c.g.unwrap(), c.m_s.unwrap())?
                .with_bath_rotors(c.bath_rotors.unwrap());
            let rho0 = DensityMatrix::momentum_eigenstate(gen.basis(), 0)?;
            let tr = kicked_trajectory(&gen, c.tau.unwrap(), &rho0, c.n_kicks.unwrap())?;
            return Ok(lindblad_table(table.metadata, exp, &tr));
        }
        Experiment::LindbladContinuous => {
            let gen = LindbladGenerator::continuous(c.cutoff.unwrap(), c.g.unwrap(), c.m_s.unwrap())?
                .with_bath_rotors(c.bath_rotors.unwrap());
            let rho0 = DensityMatrix::momentum_eigenstate(gen.basis(), 0)?;
            let tr = continuous_evolve(&gen, &rho0, c.t_final.unwrap(), c.dt.unwrap())?;
            return Ok(lindblad_table(table.metadata, exp, &tr));
        }
        Experiment::ExactTwoRotor => {
            let params = KickedSystemParams::new(
                c.g.unwrap(),
                c.tau.unwrap(),
                c.m_s.unwrap(),
                c.m_b.unwrap(),
                c.cutoff_s.unwrap(),
                c.cutoff_b.unwrap(),
            )?;
            let n0 = c.n0.as_ref().unwrap().values()[0] as usize;
            let bath = if n0 == 0 { BathSpec::ground() } else { BathSpec::flat(n0) };
            let system0 = DensityMatrix::momentum_eigenstate(params.system_basis(), 0)?;
            for r in exact_two_rotor_run(params, &system0, &bath, c.n_kicks.unwrap())? {
                table.push(vec![r.kick.into(), r.system_entropy.into(), r.bath_distance.into()]);
            }
        }
        Experiment::BathCorr => {
            let report = delta_limit_report(
                &c.n0.as_ref().unwrap().values(),
                c.delta_grid.as_ref().unwrap(),
                c.m_b.unwrap(),
            )?;
            for r in report.rows {
                table.push(vec![
                    Cell::from(r.n0),
                    r.delta.into(),
                    r.value.re.into(),
                    r.value.im.into(),
                    r.value.norm().into(),
                    r.bound.into(),
                ]);
            }
        }
    }
    Ok(table)
}
