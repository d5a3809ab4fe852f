//! Linear system models with bounded additive disturbances, stacked flow
//! matrices and worst-case (lower corner) prediction of secondary signals.

use alloc::vec;
use alloc::vec::Vec;

use thiserror::Error;

use crate::linalg::{dot, Matrix};
use crate::milp::{LinExpr, MilpModel, Sense, SolveStatus, SolverConfig, VarKind};
use crate::stl::OutputMap;

#[derive(Clone, Debug, PartialEq, Error)]
pub enum LinsysError {
    #[error("dimension mismatch in {what}: expected {expected}, found {found}")]
    Dimension { what: &'static str, expected: usize, found: usize },
    #[error("{0} contains non-finite entries")]
    NonFinite(&'static str),
    #[error("{0} is empty")]
    Empty(&'static str),
    #[error("control bounds are inverted at input {0}")]
    InvertedBounds(usize),
    #[error("nominal disturbance lies outside the convex hull of the disturbance vertices")]
    NominalOutsideHull,
}

fn check_dim(what: &'static str, expected: usize, found: usize) -> Result<(), LinsysError> {
    if expected != found {
        return Err(LinsysError::Dimension { what, expected, found });
    }
    Ok(())
}

fn check_finite(what: &'static str, values: &[f64]) -> Result<(), LinsysError> {
    if values.iter().all(|v| v.is_finite()) {
        Ok(())
    } else {
        Err(LinsysError::NonFinite(what))
    }
}

/// `x[t+1] = A x[t] + B u[t] + w[t]`, `y[t] = C x[t] + D u[t] + e`.
#[derive(Clone, Debug, PartialEq)]
pub struct SystemModel {
    a: Matrix,
    b: Matrix,
    outputs: OutputMap,
}

impl SystemModel {
    pub fn new(a: Matrix, b: Matrix, c: Matrix, d: Matrix, e: Vec<f64>) -> Result<Self, LinsysError> {
        check_dim("C rows vs e", e.len(), c.rows())?;
        check_dim("D rows vs e", e.len(), d.rows())?;
        Self::with_outputs(a, b, OutputMap::new(c, d, e))
    }

    pub fn with_outputs(a: Matrix, b: Matrix, outputs: OutputMap) -> Result<Self, LinsysError> {
        let n = a.rows();
        if n == 0 {
            return Err(LinsysError::Empty("A"));
        }
        check_dim("A columns", n, a.cols())?;
        check_dim("B rows", n, b.rows())?;
        check_dim("C columns", n, outputs.c.cols())?;
        check_dim("D columns", b.cols(), outputs.d.cols())?;
        check_dim("D rows", outputs.rows(), outputs.d.rows())?;
        check_dim("C rows", outputs.rows(), outputs.c.rows())?;
        check_finite("A", a.as_slice())?;
        check_finite("B", b.as_slice())?;
        check_finite("C", outputs.c.as_slice())?;
        check_finite("D", outputs.d.as_slice())?;
        check_finite("e", &outputs.e)?;
        Ok(Self { a, b, outputs })
    }

    /// Same dynamics with a different output map (e.g. after PNF conversion).
    pub fn with_output_map(&self, outputs: OutputMap) -> Result<Self, LinsysError> {
        Self::with_outputs(self.a.clone(), self.b.clone(), outputs)
    }

    pub fn a(&self) -> &Matrix {
        &self.a
    }
    pub fn b(&self) -> &Matrix {
        &self.b
    }
    pub fn c(&self) -> &Matrix {
        &self.outputs.c
    }
    pub fn d(&self) -> &Matrix {
        &self.outputs.d
    }
    pub fn e(&self) -> &[f64] {
        &self.outputs.e
    }
    pub fn outputs(&self) -> &OutputMap {
        &self.outputs
    }
    /// State dimension.
    pub fn n(&self) -> usize {
        self.a.rows()
    }
    /// Control dimension.
    pub fn m(&self) -> usize {
        self.b.cols()
    }
    /// Number of secondary signals.
    pub fn p(&self) -> usize {
        self.outputs.rows()
    }

    /// `A x + B u + w`.
    pub fn step(&self, x: &[f64], u: &[f64], w: &[f64]) -> Vec<f64> {
        assert_eq!(w.len(), self.n(), "disturbance dimension mismatch");
        let mut next = w.to_vec();
        self.a.mul_vec_add(x, &mut next);
        self.b.mul_vec_add(u, &mut next);
        next
    }

    /// `C x + D u + e`.
    pub fn output(&self, x: &[f64], u: &[f64]) -> Vec<f64> {
        self.outputs.eval(x, u)
    }

    /// Stacked outputs `y[0..=H]` obtained by iterating the dynamics, with
    /// `u` holding `H+1` controls and `w` holding `H` disturbances.
    pub fn simulate_outputs(&self, x: &[f64], u: &[Vec<f64>], w: &[Vec<f64>]) -> Vec<f64> {
        assert_eq!(u.len(), w.len() + 1, "need one more control than disturbances");
        let mut x = x.to_vec();
        let mut y = Vec::with_capacity(u.len() * self.p());
        for (k, uk) in u.iter().enumerate() {
            y.extend(self.output(&x, uk));
            if k < w.len() {
                x = self.step(&x, uk, &w[k]);
            }
        }
        y
    }

    /// Rough spectral radius of `A` from normalized repeated squaring.
    pub fn spectral_radius_estimate(&self) -> f64 {
        let mut m = self.a.clone();
        let s = m.norm_inf();
        if s == 0.0 {
            return 0.0;
        }
        m.scale(1.0 / s);
        let mut log_scale = libm::log(s);
        const SQUARINGS: i32 = 16;
        for _ in 0..SQUARINGS {
            m = m.mul(&m);
            let s = m.norm_inf();
            if s == 0.0 {
                return 0.0;
            }
            m.scale(1.0 / s);
            log_scale = 2.0 * log_scale + libm::log(s);
        }
        libm::exp(log_scale / libm::pow(2.0, SQUARINGS as f64))
    }
}

/// Polytope of admissible disturbances as a vertex matrix (one column per
/// vertex) plus the nominal disturbance used for cost prediction.
#[derive(Clone, Debug, PartialEq)]
pub struct DisturbanceModel {
    vertices: Matrix,
    nominal: Vec<f64>,
    box_bound: Option<f64>,
}

impl DisturbanceModel {
    /// `{0}`: no disturbance.
    pub fn none(n: usize) -> Self {
        Self { vertices: Matrix::zeros(n, 1), nominal: vec![0.0; n], box_bound: Some(0.0) }
    }

    /// Box `||w||_inf <= bound`, expanded to its `2^n` corners. The nominal
    /// disturbance is the centre.
    pub fn from_box(n: usize, bound: f64) -> Result<Self, LinsysError> {
        if !bound.is_finite() || bound < 0.0 {
            return Err(LinsysError::NonFinite("disturbance bound"));
        }
        if bound == 0.0 {
            return Ok(Self::none(n));
        }
        let count = 1usize << n;
        let mut vertices = Matrix::zeros(n, count);
        for k in 0..count {
            for i in 0..n {
                vertices[(i, k)] = if (k >> i) & 1 == 1 { bound } else { -bound };
            }
        }
        Ok(Self { vertices, nominal: vec![0.0; n], box_bound: Some(bound) })
    }

    /// General polytope given by its vertices (columns of `vertices`). The
    /// nominal disturbance defaults to the vertex centroid and must lie in
    /// the convex hull.
    pub fn from_vertices(vertices: Matrix, nominal: Option<Vec<f64>>) -> Result<Self, LinsysError> {
        if vertices.is_empty() {
            return Err(LinsysError::Empty("disturbance vertex set"));
        }
        check_finite("disturbance vertices", vertices.as_slice())?;
        let n = vertices.rows();
        let nominal = match nominal {
            Some(w) => {
                check_dim("nominal disturbance", n, w.len())?;
                check_finite("nominal disturbance", &w)?;
                if !in_convex_hull(&vertices, &w) {
                    return Err(LinsysError::NominalOutsideHull);
                }
                w
            }
            None => {
                let v = vertices.cols() as f64;
                (0..n).map(|i| vertices.row(i).iter().sum::<f64>() / v).collect()
            }
        };
        Ok(Self { vertices, nominal, box_bound: None })
    }

    pub fn vertices(&self) -> &Matrix {
        &self.vertices
    }
    pub fn nominal(&self) -> &[f64] {
        &self.nominal
    }
    pub fn n(&self) -> usize {
        self.vertices.rows()
    }
    /// `Some(w0)` when the set is the box `||w||_inf <= w0`.
    pub fn box_bound(&self) -> Option<f64> {
        self.box_bound
    }
    pub fn is_zero(&self) -> bool {
        self.vertices.is_zero()
    }
}

/// Feasibility of `W lambda = point`, `lambda >= 0`, `sum lambda = 1`.
fn in_convex_hull(vertices: &Matrix, point: &[f64]) -> bool {
    let mut model = MilpModel::new();
    let lambda: Vec<_> = (0..vertices.cols())
        .map(|j| model.add_var(alloc::format!("lambda{j}"), VarKind::Continuous, 0.0, 1.0))
        .collect();
    for (i, target) in point.iter().enumerate() {
        let expr = LinExpr::from_terms(lambda.iter().zip(vertices.row(i)).map(|(v, c)| (*v, *c)));
        model.add_constraint(expr, Sense::Eq, *target);
    }
    model.add_constraint(LinExpr::from_terms(lambda.iter().map(|v| (*v, 1.0))), Sense::Eq, 1.0);
    let cfg = SolverConfig { feasibility_tolerance: 1e-7, ..SolverConfig::default() };
    matches!(crate::milp::solve(&model, &cfg), Ok(r) if r.status == SolveStatus::Optimal)
}

/// Admissible controls: a box plus optional rows `F u <= g`.
#[derive(Clone, Debug, PartialEq)]
pub struct ControlSet {
    pub lower: Vec<f64>,
    pub upper: Vec<f64>,
    pub inequalities: Vec<(Vec<f64>, f64)>,
}

impl ControlSet {
    pub fn new(lower: Vec<f64>, upper: Vec<f64>) -> Result<Self, LinsysError> {
        check_dim("control upper bound", lower.len(), upper.len())?;
        if let Some(i) = lower.iter().zip(&upper).position(|(l, u)| l > u || l.is_nan() || u.is_nan()) {
            return Err(LinsysError::InvertedBounds(i));
        }
        Ok(Self { lower, upper, inequalities: Vec::new() })
    }

    /// `|u_i| <= bound` for every input.
    pub fn symmetric(m: usize, bound: f64) -> Self {
        Self { lower: vec![-bound; m], upper: vec![bound; m], inequalities: Vec::new() }
    }

    pub fn with_inequality(mut self, coeffs: Vec<f64>, rhs: f64) -> Result<Self, LinsysError> {
        check_dim("control inequality", self.lower.len(), coeffs.len())?;
        self.inequalities.push((coeffs, rhs));
        Ok(self)
    }

    pub fn contains(&self, u: &[f64], tol: f64) -> bool {
        u.iter().zip(&self.lower).zip(&self.upper).all(|((v, l), h)| *v >= l - tol && *v <= h + tol)
            && self.inequalities.iter().all(|(f, g)| dot(f, u) <= g + tol)
    }
}

/// Stacked maps `y^H = Phi0 x + Phi1 u^H + Phi2 w^H + 1 ⊗ e`.
#[derive(Clone, Debug, PartialEq)]
pub struct FlowMatrices {
    pub horizon: usize,
    /// `(H+1)p x n`, block `k` is `C A^k`.
    pub phi0: Matrix,
    /// `(H+1)p x (H+1)m`, block `(k, j)` is `D` for `j = k` and `C A^{k-1-j} B` for `j < k`.
    pub phi1: Matrix,
    /// `(H+1)p x Hn`, block `(k, j)` is `C A^{k-1-j}` for `j < k`.
    pub phi2: Matrix,
}

/// `C A^k` for `k = 0..=h`.
fn output_powers(model: &SystemModel, h: usize) -> Vec<Matrix> {
    let mut out = Vec::with_capacity(h + 1);
    let mut ca = model.c().clone();
    for _ in 0..=h {
        let next = ca.mul(model.a());
        out.push(ca);
        ca = next;
    }
    out
}

pub fn build_flow_matrices(model: &SystemModel, horizon: usize) -> FlowMatrices {
    let (n, m, p) = (model.n(), model.m(), model.p());
    let h = horizon;
    let ca = output_powers(model, h);
    let cab: Vec<Matrix> = ca.iter().map(|x| x.mul(model.b())).collect();
    let mut phi0 = Matrix::zeros((h + 1) * p, n);
    let mut phi1 = Matrix::zeros((h + 1) * p, (h + 1) * m);
    let mut phi2 = Matrix::zeros((h + 1) * p, h * n);
    for k in 0..=h {
        phi0.set_block(k * p, 0, &ca[k]);
        phi1.set_block(k * p, k * m, model.d());
        for j in 0..k {
            phi1.set_block(k * p, j * m, &cab[k - 1 - j]);
            phi2.set_block(k * p, j * n, &ca[k - 1 - j]);
        }
    }
    FlowMatrices { horizon: h, phi0, phi1, phi2 }
}

/// Row-wise minimum of `p`.
pub fn omega(p: &Matrix) -> Result<Vec<f64>, LinsysError> {
    if p.is_empty() {
        return Err(LinsysError::Empty("matrix"));
    }
    Ok((0..p.rows()).map(|i| p.row(i).iter().copied().fold(f64::INFINITY, f64::min)).collect())
}

/// Lower corner of the bounding box of the disturbance image over `H` steps,
/// `omega(Phi2 (1 ⊗ W))`, stacked like `y^H`.
///
/// Each disturbance step enters the stacked output independently, so the
/// corner is the running sum over steps of the row-wise minima of
/// `C A^i W`; no enumeration of vertex sequences is needed.
pub fn uncertainty_offset(model: &SystemModel, dist: &DisturbanceModel, horizon: usize) -> Vec<f64> {
    assert_eq!(dist.n(), model.n(), "disturbance dimension mismatch");
    let p = model.p();
    let mut offset = vec![0.0; (horizon + 1) * p];
    if dist.is_zero() {
        return offset;
    }
    let ca = output_powers(model, horizon);
    for k in 1..=horizon {
        let step_min = omega(&ca[k - 1].mul(dist.vertices())).expect("non-empty vertex set");
        for i in 0..p {
            offset[k * p + i] = offset[(k - 1) * p + i] + step_min[i];
        }
    }
    let worst = offset.iter().fold(0.0f64, |a, v| a.max(v.abs()));
    if worst > 1e6 {
        let radius = model.spectral_radius_estimate();
        if radius > 1.0 {
            log::warn!(
                "uncertainty offset reaches {worst:.3e} over {horizon} steps (spectral radius of A ~ {radius:.3}); \
                 robust predictions will be very conservative"
            );
        }
    }
    offset
}

/// `y^{ω,H} = Phi0 x + Phi1 u^H + offset + 1 ⊗ e`.
pub fn robust_prediction(
    model: &SystemModel,
    flow: &FlowMatrices,
    x: &[f64],
    u_stacked: &[f64],
    offset: &[f64],
) -> Vec<f64> {
    let p = model.p();
    assert_eq!(offset.len(), flow.phi0.rows(), "offset horizon mismatch");
    let mut y: Vec<f64> = (0..flow.phi0.rows()).map(|r| offset[r] + model.e()[r % p]).collect();
    flow.phi0.mul_vec_add(x, &mut y);
    flow.phi1.mul_vec_add(u_stacked, &mut y);
    y
}

/// Nominal state sequence `x̂[0..=H]` with `x̂[k+1] = A x̂[k] + B u[k] + ŵ`,
/// where `controls` holds at least `H` inputs.
pub fn nominal_prediction(
    model: &SystemModel,
    dist: &DisturbanceModel,
    x: &[f64],
    controls: &[Vec<f64>],
    horizon: usize,
) -> Vec<Vec<f64>> {
    assert!(controls.len() >= horizon, "need a control per prediction step");
    let mut states = Vec::with_capacity(horizon + 1);
    states.push(x.to_vec());
    for k in 0..horizon {
        let next = model.step(&states[k], &controls[k], dist.nominal());
        states.push(next);
    }
    states
}
