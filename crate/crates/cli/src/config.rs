//! JSON problem configuration: loading with JSON-pointer error locations,
//! normalization, saving and conversion into core types.

use std::collections::BTreeMap;
use std::fmt;
use std::path::Path;
use std::time::Duration;

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};
use stlmpc_core::linsys::{ControlSet, DisturbanceModel, LinsysError, SystemModel};
use stlmpc_core::milp::SolverConfig;
use stlmpc_core::mpc::ControllerConfig;
use stlmpc_core::stl::{parse_with, Formula, OutputMap, PredicateTable};
use stlmpc_core::Matrix;

/// A configuration problem located by a JSON pointer (`""` is the document).
#[derive(Clone, Debug, PartialEq, thiserror::Error)]
pub struct ConfigError {
    pub pointer: String,
    pub message: String,
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let at = if self.pointer.is_empty() { "/" } else { &self.pointer };
        write!(f, "config error at {at}: {}", self.message)
    }
}

fn err(pointer: impl Into<String>, message: impl Into<String>) -> ConfigError {
    ConfigError { pointer: pointer.into(), message: message.into() }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemConfig {
    #[serde(default, skip_serializing_if = "String::is_empty")]
    pub name: String,
    pub system: SystemSection,
    #[serde(default)]
    pub disturbance: DisturbanceSection,
    pub controls: ControlSection,
    pub formula: String,
    /// Predicate names, mapped to one-based output indices (`p1` is 1).
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub predicates: BTreeMap<String, usize>,
    #[serde(default)]
    pub controller: ControllerSection,
    pub simulation: SimulationSection,
    #[serde(default)]
    pub solver: SolverSection,
}

/// Matrices as row-major nested lists.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SystemSection {
    pub a: Vec<Vec<f64>>,
    pub b: Vec<Vec<f64>>,
    pub c: Vec<Vec<f64>>,
    /// Zero when omitted.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub d: Option<Vec<Vec<f64>>>,
    /// Zero when omitted.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub e: Option<Vec<f64>>,
}

/// Either `box` (`||w||_inf <= box`) or `vertices` (n rows, one column per
/// vertex). Neither means no disturbance.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DisturbanceSection {
    #[serde(rename = "box", default, skip_serializing_if = "Option::is_none")]
    pub bound: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub vertices: Option<Vec<Vec<f64>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub nominal: Option<Vec<f64>>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ControlSection {
    pub lower: Vec<f64>,
    pub upper: Vec<f64>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub inequalities: Vec<Inequality>,
}

/// `coeffs · u <= rhs`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Inequality {
    pub coeffs: Vec<f64>,
    pub rhs: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ControllerSection {
    pub prediction_horizon: usize,
    pub penalty: f64,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub control_weights: Vec<f64>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub state_weights: Vec<f64>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub reference: Vec<f64>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub softening_weights: Vec<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub zeta_max: Option<f64>,
    pub tightening: bool,
    pub d_zero_reduction: bool,
    pub robust: bool,
}

impl Default for ControllerSection {
    fn default() -> Self {
        let c = ControllerConfig::default();
        Self {
            prediction_horizon: c.prediction_horizon,
            penalty: c.penalty,
            control_weights: Vec::new(),
            state_weights: Vec::new(),
            reference: Vec::new(),
            softening_weights: Vec::new(),
            zeta_max: None,
            tightening: c.tightening,
            d_zero_reduction: c.d_zero_reduction,
            robust: c.robust,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimulationSection {
    pub steps: usize,
    pub seed: u64,
    pub initial_state: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SolverSection {
    pub feasibility_tolerance: f64,
    pub integrality_tolerance: f64,
    pub mip_gap: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub node_limit: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub time_limit_seconds: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub big_m: Option<f64>,
}

impl Default for SolverSection {
    fn default() -> Self {
        let s = SolverConfig::default();
        Self {
            feasibility_tolerance: s.feasibility_tolerance,
            integrality_tolerance: s.integrality_tolerance,
            mip_gap: s.mip_gap,
            node_limit: None,
            time_limit_seconds: None,
            big_m: None,
        }
    }
}

/// Everything needed to run the closed loop.
#[derive(Clone, Debug)]
pub struct Problem {
    pub name: String,
    /// Outputs include one row per inline predicate of the formula.
    pub model: SystemModel,
    pub disturbance: DisturbanceModel,
    pub controls: ControlSet,
    pub formula: Formula,
    pub controller: ControllerConfig,
    pub initial_state: Vec<f64>,
    pub steps: usize,
    pub seed: u64,
}

fn monotonic_clock() -> Duration {
    use std::sync::OnceLock;
    use std::time::Instant;
    static START: OnceLock<Instant> = OnceLock::new();
    START.get_or_init(Instant::now).elapsed()
}

fn pointer_from_path(path: &serde_path_to_error::Path) -> String {
    use serde_path_to_error::Segment;
    let mut out = String::new();
    for seg in path.iter() {
        out.push('/');
        match seg {
            Segment::Seq { index } => out.push_str(&index.to_string()),
            Segment::Map { key } => out.push_str(&key.replace('~', "~0").replace('/', "~1")),
            Segment::Enum { variant } => out.push_str(variant),
            Segment::Unknown => out.push('?'),
        }
    }
    out
}

impl ProblemConfig {
    pub fn from_json(text: &str) -> Result<Self, ConfigError> {
        let de = &mut serde_json::Deserializer::from_str(text);
        serde_path_to_error::deserialize(de).map_err(|e| {
            let pointer = pointer_from_path(e.path());
            let inner = e.into_inner();
            err(pointer, inner.to_string())
        })
    }

    pub fn load(path: &Path) -> anyhow::Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| anyhow::anyhow!("reading {}: {e}", path.display()))?;
        Ok(Self::from_json(&text).map_err(|e| anyhow::anyhow!("{}: {e}", path.display()))?)
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("config serializes");
        s.push('\n');
        s
    }

    pub fn save(&self, path: &Path) -> std::io::Result<()> {
        std::fs::write(path, self.to_json())
    }

    /// Validates and fills every defaulted field with its explicit value.
    pub fn normalized(&self) -> Result<Self, ConfigError> {
        let problem = self.build()?;
        let (n, m) = (problem.model.n(), problem.model.m());
        let p = self.system.c.len();
        let mut out = self.clone();
        out.system.d.get_or_insert_with(|| vec![vec![0.0; m]; p]);
        out.system.e.get_or_insert_with(|| vec![0.0; p]);
        let dist = &mut out.disturbance;
        if dist.vertices.is_none() && dist.bound.is_none() {
            dist.bound = Some(0.0);
        }
        if dist.vertices.is_some() {
            dist.nominal = Some(problem.disturbance.nominal().to_vec());
        }
        let ctl = &mut out.controller;
        if ctl.control_weights.is_empty() {
            ctl.control_weights = vec![1.0; m];
        }
        if ctl.softening_weights.is_empty() {
            ctl.softening_weights = vec![1.0; problem.model.p()];
        }
        if !ctl.state_weights.is_empty() && ctl.reference.is_empty() {
            ctl.reference = vec![0.0; n];
        }
        Ok(out)
    }

    /// Checks dimensions and converts into core types.
    pub fn build(&self) -> Result<Problem, ConfigError> {
        let sys = &self.system;
        let n = sys.a.len();
        if n == 0 {
            return Err(err("/system/a", "A must have at least one row"));
        }
        let a = matrix("/system/a", &sys.a, None)?;
        if a.cols() != n {
            return Err(err("/system/a", format!("A must be square, got {n}x{}", a.cols())));
        }
        if sys.b.len() != n {
            return Err(err("/system/b", format!("B must have {n} rows, got {}", sys.b.len())));
        }
        let b = matrix("/system/b", &sys.b, None)?;
        let m = b.cols();
        if m == 0 {
            return Err(err("/system/b", "B must have at least one column"));
        }
        let p = sys.c.len();
        if p == 0 {
            return Err(err("/system/c", "C must have at least one row"));
        }
        let c = matrix("/system/c", &sys.c, Some(n))?;
        let d = match &sys.d {
            Some(d) => {
                if d.len() != p {
                    return Err(err("/system/d", format!("D must have {p} rows, got {}", d.len())));
                }
                matrix("/system/d", d, Some(m))?
            }
            None => Matrix::zeros(p, m),
        };
        let e = match &sys.e {
            Some(e) => {
                if e.len() != p {
                    return Err(err("/system/e", format!("e must have {p} entries, got {}", e.len())));
                }
                finite("/system/e", e)?;
                e.clone()
            }
            None => vec![0.0; p],
        };

        let mut table = PredicateTable::new(p);
        for (name, index) in &self.predicates {
            let at = format!("/predicates/{}", name.replace('~', "~0").replace('/', "~1"));
            if *index == 0 || *index > p {
                return Err(err(at, format!("output index must be in 1..={p}, got {index}")));
            }
            if !is_identifier(name) {
                return Err(err(at, "predicate names must be identifiers"));
            }
            table.bind(name.clone(), index - 1);
        }
        let formula = parse_with(&self.formula, &mut table).map_err(|e| err("/formula", e.to_string()))?;
        let mut outputs = OutputMap::new(c, d, e);
        for pred in table.inline() {
            outputs
                .push_affine(pred)
                .ok_or_else(|| err("/formula", "inline predicate references a state or input that does not exist"))?;
        }
        let mut bad = None;
        formula.visit_predicates(&mut |i, _| {
            if i >= outputs.rows() && bad.is_none() {
                bad = Some(i);
            }
        });
        if let Some(i) = bad {
            return Err(err("/formula", format!("p{} refers to a missing output; the system has {p}", i + 1)));
        }
        let model = SystemModel::with_outputs(a, b, outputs).map_err(|e| linsys_err("/system", e))?;

        let disturbance = self.disturbance_model(n)?;
        let controls = self.control_set(m)?;

        let ctl = &self.controller;
        let len_check = |at: &str, v: &[f64], len: usize| {
            if v.is_empty() || v.len() == len {
                finite(at, v)
            } else {
                Err(err(at, format!("expected {len} entries, got {}", v.len())))
            }
        };
        len_check("/controller/control_weights", &ctl.control_weights, m)?;
        len_check("/controller/state_weights", &ctl.state_weights, n)?;
        len_check("/controller/reference", &ctl.reference, n)?;
        len_check("/controller/softening_weights", &ctl.softening_weights, model.p())?;
        if ctl.control_weights.iter().chain(&ctl.state_weights).any(|w| *w < 0.0) {
            return Err(err("/controller", "cost weights must be nonnegative"));
        }
        if ctl.softening_weights.iter().any(|w| *w <= 0.0) {
            return Err(err("/controller/softening_weights", "softening weights must be positive"));
        }
        if !(ctl.penalty > 0.0 && ctl.penalty.is_finite()) {
            return Err(err("/controller/penalty", "penalty must be positive"));
        }
        if ctl.zeta_max.is_some_and(|z| !(z > 0.0 && z.is_finite())) {
            return Err(err("/controller/zeta_max", "slack bound must be positive"));
        }
        let solver = self.solver_config()?;
        let controller = ControllerConfig {
            prediction_horizon: ctl.prediction_horizon,
            penalty: ctl.penalty,
            control_weights: ctl.control_weights.clone(),
            state_weights: ctl.state_weights.clone(),
            reference: ctl.reference.clone(),
            softening_weights: ctl.softening_weights.clone(),
            zeta_max: ctl.zeta_max,
            tightening: ctl.tightening,
            d_zero_reduction: ctl.d_zero_reduction,
            robust: ctl.robust,
            solver,
        };

        let sim = &self.simulation;
        if sim.initial_state.len() != n {
            return Err(err(
                "/simulation/initial_state",
                format!("expected {n} entries, got {}", sim.initial_state.len()),
            ));
        }
        finite("/simulation/initial_state", &sim.initial_state)?;
        if sim.steps == 0 {
            return Err(err("/simulation/steps", "at least one step is required"));
        }
        Ok(Problem {
            name: self.name.clone(),
            model,
            disturbance,
            controls,
            formula,
            controller,
            initial_state: sim.initial_state.clone(),
            steps: sim.steps,
            seed: sim.seed,
        })
    }

    fn disturbance_model(&self, n: usize) -> Result<DisturbanceModel, ConfigError> {
        let d = &self.disturbance;
        match (d.bound, &d.vertices) {
            (Some(_), Some(_)) => Err(err("/disturbance", "give either box or vertices, not both")),
            (Some(w0), None) => {
                if d.nominal.is_some() {
                    return Err(err("/disturbance/nominal", "a box disturbance has nominal value zero"));
                }
                DisturbanceModel::from_box(n, w0).map_err(|e| linsys_err("/disturbance/box", e))
            }
            (None, Some(rows)) => {
                if rows.len() != n {
                    return Err(err("/disturbance/vertices", format!("expected {n} rows, got {}", rows.len())));
                }
                let v = matrix("/disturbance/vertices", rows, None)?;
                if let Some(w) = &d.nominal {
                    if w.len() != n {
                        return Err(err("/disturbance/nominal", format!("expected {n} entries, got {}", w.len())));
                    }
                }
                DisturbanceModel::from_vertices(v, d.nominal.clone()).map_err(|e| {
                    let at = if matches!(e, LinsysError::NominalOutsideHull) { "/disturbance/nominal" } else { "/disturbance" };
                    linsys_err(at, e)
                })
            }
            (None, None) => {
                if d.nominal.is_some() {
                    return Err(err("/disturbance/nominal", "nominal value given without a disturbance set"));
                }
                Ok(DisturbanceModel::none(n))
            }
        }
    }

    fn control_set(&self, m: usize) -> Result<ControlSet, ConfigError> {
        let c = &self.controls;
        if c.lower.len() != m {
            return Err(err("/controls/lower", format!("expected {m} entries, got {}", c.lower.len())));
        }
        if c.upper.len() != m {
            return Err(err("/controls/upper", format!("expected {m} entries, got {}", c.upper.len())));
        }
        let mut set = ControlSet::new(c.lower.clone(), c.upper.clone()).map_err(|e| linsys_err("/controls", e))?;
        for (k, ineq) in c.inequalities.iter().enumerate() {
            let at = format!("/controls/inequalities/{k}");
            finite(&at, &ineq.coeffs)?;
            finite(&at, &[ineq.rhs])?;
            set = set.with_inequality(ineq.coeffs.clone(), ineq.rhs).map_err(|e| linsys_err(&at, e))?;
        }
        Ok(set)
    }

    fn solver_config(&self) -> Result<SolverConfig, ConfigError> {
        let s = &self.solver;
        let time_limit = match s.time_limit_seconds {
            Some(v) if !(v > 0.0 && v.is_finite()) => {
                return Err(err("/solver/time_limit_seconds", "time limit must be positive"));
            }
            Some(v) => Some(Duration::from_secs_f64(v)),
            None => None,
        };
        let cfg = SolverConfig {
            feasibility_tolerance: s.feasibility_tolerance,
            integrality_tolerance: s.integrality_tolerance,
            mip_gap: s.mip_gap,
            node_limit: s.node_limit,
            time_limit,
            clock: time_limit.map(|_| monotonic_clock as fn() -> Duration),
            big_m: s.big_m,
        };
        cfg.validate().map_err(|e| err("/solver", e.to_string()))?;
        Ok(cfg)
    }
}

fn is_identifier(name: &str) -> bool {
    let mut chars = name.chars();
    chars.next().is_some_and(|c| c.is_ascii_alphabetic() || c == '_')
        && chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

fn finite(at: &str, values: &[f64]) -> Result<(), ConfigError> {
    match values.iter().position(|v| !v.is_finite()) {
        Some(i) => Err(err(format!("{at}/{i}"), "value must be finite")),
        None => Ok(()),
    }
}

/// Row-major nested list to a matrix; every row must have `cols` entries
/// (or as many as the first row).
fn matrix(at: &str, rows: &[Vec<f64>], cols: Option<usize>) -> Result<Matrix, ConfigError> {
    let width = cols.unwrap_or_else(|| rows.first().map_or(0, Vec::len));
    for (i, r) in rows.iter().enumerate() {
        if r.len() != width {
            return Err(err(format!("{at}/{i}"), format!("row has {} entries, expected {width}", r.len())));
        }
        finite(&format!("{at}/{i}"), r)?;
    }
    Ok(Matrix::from_row_major(rows.len(), width, rows.concat()))
}

fn linsys_err(at: &str, e: LinsysError) -> ConfigError {
    err(at, e.to_string())
}

/// JSON Schema (draft 2020-12) of the configuration document.
pub fn schema() -> Value {
    let number = json!({ "type": "number" });
    let vector = json!({ "type": "array", "items": number });
    let matrix = json!({ "type": "array", "items": vector, "description": "row-major" });
    json!({
        "$schema": "https://json-schema.org/draft/2020-12/schema",
        "title": "stlmpc problem configuration",
        "type": "object",
        "additionalProperties": false,
        "required": ["system", "controls", "formula", "simulation"],
        "properties": {
            "name": { "type": "string" },
            "system": {
                "type": "object",
                "additionalProperties": false,
                "required": ["a", "b", "c"],
                "description": "x[t+1] = A x[t] + B u[t] + w[t], y[t] = C x[t] + D u[t] + e",
                "properties": {
                    "a": matrix, "b": matrix, "c": matrix,
                    "d": { "type": "array", "items": vector, "description": "row-major, zero when omitted" },
                    "e": { "type": "array", "items": number, "description": "zero when omitted" }
                }
            },
            "disturbance": {
                "type": "object",
                "additionalProperties": false,
                "description": "either a box bound or a vertex matrix (n rows, one column per vertex); none means w = 0",
                "properties": {
                    "box": { "type": "number", "minimum": 0 },
                    "vertices": matrix,
                    "nominal": vector
                }
            },
            "controls": {
                "type": "object",
                "additionalProperties": false,
                "required": ["lower", "upper"],
                "properties": {
                    "lower": vector, "upper": vector,
                    "inequalities": {
                        "type": "array",
                        "items": {
                            "type": "object",
                            "additionalProperties": false,
                            "required": ["coeffs", "rhs"],
                            "properties": { "coeffs": vector, "rhs": number }
                        }
                    }
                }
            },
            "formula": {
                "type": "string",
                "description": "STL text: pN, bound names, inline (affine >= affine), !, &, |, G[a,b], F[a,b], U[a,b], R[a,b]"
            },
            "predicates": {
                "type": "object",
                "additionalProperties": { "type": "integer", "minimum": 1 },
                "description": "name -> one-based output index"
            },
            "controller": {
                "type": "object",
                "additionalProperties": false,
                "properties": {
                    "prediction_horizon": { "type": "integer", "minimum": 0 },
                    "penalty": { "type": "number", "exclusiveMinimum": 0 },
                    "control_weights": vector,
                    "state_weights": vector,
                    "reference": vector,
                    "softening_weights": vector,
                    "zeta_max": { "type": "number", "exclusiveMinimum": 0 },
                    "tightening": { "type": "boolean" },
                    "d_zero_reduction": { "type": "boolean" },
                    "robust": { "type": "boolean" }
                }
            },
            "simulation": {
                "type": "object",
                "additionalProperties": false,
                "required": ["steps", "seed", "initial_state"],
                "properties": {
                    "steps": { "type": "integer", "minimum": 1 },
                    "seed": { "type": "integer", "minimum": 0 },
                    "initial_state": vector
                }
            },
            "solver": {
                "type": "object",
                "additionalProperties": false,
                "properties": {
                    "feasibility_tolerance": { "type": "number", "exclusiveMinimum": 0 },
                    "integrality_tolerance": { "type": "number", "exclusiveMinimum": 0 },
                    "mip_gap": { "type": "number", "minimum": 0 },
                    "node_limit": { "type": "integer", "minimum": 1 },
                    "time_limit_seconds": { "type": "number", "exclusiveMinimum": 0 },
                    "big_m": { "type": "number", "exclusiveMinimum": 0 }
                }
            }
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    const MINIMAL: &str = r#"{
        "system": { "a": [[1.0]], "b": [[1.0]], "c": [[1.0]], "e": [1.0] },
        "controls": { "lower": [-1.0], "upper": [1.0] },
        "formula": "G[0,2] p1",
        "simulation": { "steps": 3, "seed": 0, "initial_state": [0.0] }
    }"#;

    #[test]
    fn minimal_config_builds() {
        let cfg = ProblemConfig::from_json(MINIMAL).unwrap();
        let p = cfg.build().unwrap();
        assert_eq!(p.formula.horizon(), 2);
        assert!(p.disturbance.is_zero());
    }

    #[test]
    fn type_errors_carry_pointers() {
        let text = MINIMAL.replace("\"steps\": 3", "\"steps\": \"three\"");
        let e = ProblemConfig::from_json(&text).unwrap_err();
        assert_eq!(e.pointer, "/simulation/steps");
        let text = MINIMAL.replace("[[1.0]], \"b\"", "[[1.0, true]], \"b\"");
        assert_eq!(ProblemConfig::from_json(&text).unwrap_err().pointer, "/system/a/0/1");
    }

    #[test]
    fn unknown_fields_rejected() {
        let text = MINIMAL.replace("\"formula\"", "\"formla\": 1, \"formula\"");
        assert!(ProblemConfig::from_json(&text).is_err());
    }

    #[test]
    fn normalization_is_idempotent() {
        let cfg = ProblemConfig::from_json(MINIMAL).unwrap().normalized().unwrap();
        assert_eq!(cfg.system.d, Some(vec![vec![0.0]]));
        assert_eq!(cfg.controller.control_weights, vec![1.0]);
        let again = ProblemConfig::from_json(&cfg.to_json()).unwrap();
        assert_eq!(again, cfg);
        assert_eq!(again.normalized().unwrap(), cfg);
    }

    #[test]
    fn names_and_inline_predicates_resolve() {
        let text = MINIMAL
            .replace("\"G[0,2] p1\"", "\"G[0,2] high & F[0,1] (x1 <= 3)\"")
            .replace("\"controls\"", "\"predicates\": {\"high\": 1}, \"controls\"");
        let p = ProblemConfig::from_json(&text).unwrap().build().unwrap();
        assert_eq!(p.model.p(), 2);
        let y = p.model.output(&[1.0], &[0.0]);
        assert_eq!(y, vec![2.0, 2.0]);
    }

    #[test]
    fn semantic_errors_point_at_field() {
        let mut cfg = ProblemConfig::from_json(MINIMAL).unwrap();
        cfg.system.a = vec![vec![1.0, 0.0]];
        assert_eq!(cfg.build().unwrap_err().pointer, "/system/a");
        let mut cfg = ProblemConfig::from_json(MINIMAL).unwrap();
        cfg.formula = "G[0,2] p3".into();
        assert_eq!(cfg.build().unwrap_err().pointer, "/formula");
        let mut cfg = ProblemConfig::from_json(MINIMAL).unwrap();
        cfg.simulation.initial_state = vec![];
        assert_eq!(cfg.build().unwrap_err().pointer, "/simulation/initial_state");
    }
}
