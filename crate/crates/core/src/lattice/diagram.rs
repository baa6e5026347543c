use serde::{Deserialize, Serialize};
use std::fmt;
use std::sync::{Arc, Mutex};

use super::point::{LatticeWindow, Point};
use super::seq::{SeqTail, WeightSeq};
use crate::families::measure::AtomicMeasure1D;
use crate::error::{Error, Result};
use crate::tol;

/// Serializable description of a weight diagram.
///
/// Base kinds carry closed-form or tabulated weights; derived kinds wrap
/// another spec and are evaluated lazily from it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "params", rename_all = "snake_case")]
pub enum DiagramSpec {
    /// Finite tables indexed `[k1][k2]`; outside the table every weight
    /// repeats the nearest edge value.
    Table { alpha: Vec<Vec<f64>>, beta: Vec<Vec<f64>> },
    /// `alpha_k = sigma_{k1}`, `beta_k = tau_{k2}`.
    Tensor { sigma: WeightSeq, tau: WeightSeq },
    /// `alpha_k = beta_k = omega_{k1+k2}`.
    DiagonalCore { omega: WeightSeq },
    /// Rows `(x0, omega_0, omega_1, ...)` then `(a, omega_0, ...)`,
    /// columns likewise.
    Fig2 { x0: f64, a: f64, omega: WeightSeq },
    /// The general family with free `x1, y0, y1` and column sequence `tau`,
    /// subject to `tau_0 x1 = omega_0 y1`.
    Fig2General { x0: f64, x1: f64, y0: f64, y1: f64, a: f64, omega: WeightSeq, tau: WeightSeq },
    /// `alpha = sqrt((k1+1)/(k1+k2+1))`, `beta = sqrt((k2+1)/(k1+k2+1))`.
    DruryArveson,
    /// Spherically quasinormal shift grown from its zeroth row with
    /// `alpha^2 + beta^2 = c^2`.
    Quasinormal { row: WeightSeq, c: f64 },
    Toral { base: Box<DiagramSpec> },
    Spherical { base: Box<DiagramSpec> },
    Scaled { base: Box<DiagramSpec>, a: f64, b: f64 },
    /// `alpha'(k) = alpha(k + (j, i))`.
    Restricted { base: Box<DiagramSpec>, i: usize, j: usize },
    /// Multiplies `alpha_k` by `exp(F(k+e1) - F(k))` and `beta_k` by
    /// `exp(F(k+e2) - F(k))`, where `F = potential[k1][k2]` inside the table
    /// and 0 outside. Commutativity is preserved exactly.
    Gauge { base: Box<DiagramSpec>, potential: Vec<Vec<f64>> },
}

/// What is known about a diagram beyond any finite window.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum Tail {
    /// For `k1 >= n1` the weights at `k` and `k + e1` coincide, and for
    /// `k2 >= n2` those at `k` and `k + e2`.
    Flat { n1: usize, n2: usize },
    /// The core (`k1, k2 >= 1`) is a tensor product of two 1-variable shifts.
    CoreTensor,
    /// Closed-form weights with no eventual flatness.
    Formula,
    /// Nothing known beyond evaluation.
    Opaque,
}

/// Supremum norms `(||T1||, ||T2||)`; `exact` is false for window lower bounds.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Norms {
    pub t1: f64,
    pub t2: f64,
    pub exact: bool,
}

/// Largest violation of `alpha_{k+e2} beta_k = beta_{k+e1} alpha_k` on a window.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CommutativityReport {
    pub max_abs: f64,
    pub max_rel: f64,
    pub at: Point,
}

impl CommutativityReport {
    pub fn holds(&self, rel_tol: f64) -> bool {
        self.max_rel <= rel_tol
    }
}

/// Moments `gamma_k` on a window, `gamma_(0,0) = 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct MomentTable {
    window: LatticeWindow,
    values: Vec<f64>,
}

impl MomentTable {
    pub fn window(&self) -> LatticeWindow {
        self.window
    }

    pub fn get(&self, k: Point) -> Option<f64> {
        self.window
            .contains(k)
            .then(|| self.values[k.k2 * (self.window.k1_max + 1) + k.k1])
    }
}

/// A 2-variable weight diagram: weights `alpha_k`, `beta_k` on `Z+^2`.
///
/// Cheap to clone; evaluation is lazy.
#[derive(Clone)]
pub struct WeightDiagram {
    spec: DiagramSpec,
    node: Arc<Node>,
}

impl fmt::Debug for WeightDiagram {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("WeightDiagram").field("spec", &self.spec).finish()
    }
}

impl PartialEq for WeightDiagram {
    fn eq(&self, other: &Self) -> bool {
        self.spec == other.spec
    }
}

impl Serialize for WeightDiagram {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.spec.serialize(s)
    }
}

impl<'de> Deserialize<'de> for WeightDiagram {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let spec = DiagramSpec::deserialize(d)?;
        WeightDiagram::from_spec(spec).map_err(serde::de::Error::custom)
    }
}

enum Node {
    Table { alpha: Vec<Vec<f64>>, beta: Vec<Vec<f64>> },
    Tensor { sigma: WeightSeq, tau: WeightSeq },
    Diagonal { omega: WeightSeq },
    Fig2 { x0: f64, x1: f64, y0: f64, y1: f64, a: f64, omega: WeightSeq, tau: WeightSeq },
    DruryArveson,
    Quasinormal(Quasi),
    Toral(Arc<Node>),
    Spherical(Arc<Node>),
    Scaled(Arc<Node>, f64, f64),
    Restricted(Arc<Node>, usize, usize),
    Gauge(Arc<Node>, Vec<Vec<f64>>),
}

/// Rows of a quasinormal diagram, grown on demand.
struct Quasi {
    row: WeightSeq,
    c: f64,
    rows: Mutex<Vec<Vec<f64>>>,
}

impl Quasi {
    fn beta_of(&self, alpha: f64) -> f64 {
        (self.c * self.c - alpha * alpha).sqrt()
    }

    fn alpha(&self, k: Point) -> f64 {
        if let (true, SeqTail::Berger { measure, offset }) = (self.row.head().is_empty(), self.row.tail()) {
            return self.berger_alpha(measure, *offset, k);
        }
        let mut rows = self.rows.lock().unwrap_or_else(|e| e.into_inner());
        if rows.len() <= k.k2 {
            rows.resize(k.k2 + 1, Vec::new());
        }
        for r in 0..=k.k2 {
            let need = k.k1 + (k.k2 - r) + 1;
            while rows[r].len() < need {
                let i = rows[r].len();
                let v = if r == 0 {
                    self.row.get(i)
                } else {
                    let prev = &rows[r - 1];
                    prev[i] * self.beta_of(prev[i + 1]) / self.beta_of(prev[i])
                };
                rows[r].push(v);
            }
        }
        rows[k.k2][k.k1]
    }

    /// With row moments `int t^n d xi`, the moments are
    /// `gamma_(k1,k2) = int t^k1 (c^2 - t)^k2 d xi`, all terms positive.
    /// The ratio recursion loses every digit within a few dozen rows here.
    fn berger_alpha(&self, xi: &AtomicMeasure1D, offset: usize, k: Point) -> f64 {
        let c2 = self.c * self.c;
        let log_terms = |p: usize| -> Vec<f64> {
            xi.atoms()
                .iter()
                .map(|a| {
                    let tp = if p == 0 { 0.0 } else { p as f64 * a.at.ln() };
                    a.mass.ln() + tp + k.k2 as f64 * (c2 - a.at).ln()
                })
                .collect()
        };
        let lse = |v: Vec<f64>| {
            let m = v.iter().copied().fold(f64::NEG_INFINITY, f64::max);
            m + v.iter().map(|x| (x - m).exp()).sum::<f64>().ln()
        };
        let p = k.k1 + offset;
        ((lse(log_terms(p + 1)) - lse(log_terms(p))) / 2.0).exp()
    }
}

fn clamp_get(t: &[Vec<f64>], k: Point) -> f64 {
    let col = &t[k.k1.min(t.len() - 1)];
    col[k.k2.min(col.len() - 1)]
}

fn potential_at(p: &[Vec<f64>], k: Point) -> f64 {
    p.get(k.k1).and_then(|c| c.get(k.k2)).copied().unwrap_or(0.0)
}

impl Node {
    fn weights(&self, k: Point) -> (f64, f64) {
        match self {
            Node::Table { alpha, beta } => (clamp_get(alpha, k), clamp_get(beta, k)),
            Node::Tensor { sigma, tau } => (sigma.get(k.k1), tau.get(k.k2)),
            Node::Diagonal { omega } => {
                let w = omega.get(k.degree());
                (w, w)
            }
            Node::Fig2 { x0, x1, y0, y1, a, omega, tau } => {
                let alpha = match (k.k1, k.k2) {
                    (0, 0) => *x0,
                    (1, 0) => *x1,
                    (0, 1) => *a,
                    (0, _) => a * omega.get(0) / x1,
                    (k1, _) => omega.get(k1 - 1),
                };
                let beta = match (k.k1, k.k2) {
                    (0, 0) => *y0,
                    (0, 1) => *y1,
                    (1, 0) => a * y0 / x0,
                    (_, 0) => a * y0 * omega.get(0) / (x0 * x1),
                    (_, k2) => tau.get(k2 - 1),
                };
                (alpha, beta)
            }
            Node::DruryArveson => {
                let n = (k.degree() + 1) as f64;
                (((k.k1 + 1) as f64 / n).sqrt(), ((k.k2 + 1) as f64 / n).sqrt())
            }
            Node::Quasinormal(q) => {
                let a = q.alpha(k);
                (a, q.beta_of(a))
            }
            Node::Toral(base) => {
                let (a0, b0) = base.weights(k);
                let (a1, _) = base.weights(k.right());
                let (_, b1) = base.weights(k.up());
                ((a0 * a1).sqrt(), (b0 * b1).sqrt())
            }
            Node::Spherical(base) => {
                let (a0, b0) = base.weights(k);
                let (ar, br) = base.weights(k.right());
                let (au, bu) = base.weights(k.up());
                let s0 = a0 * a0 + b0 * b0;
                let sr = ar * ar + br * br;
                let su = au * au + bu * bu;
                (a0 * (sr / s0).powf(0.25), b0 * (su / s0).powf(0.25))
            }
            Node::Scaled(base, a, b) => {
                let (x, y) = base.weights(k);
                (a * x, b * y)
            }
            Node::Restricted(base, i, j) => base.weights(k.offset(*j, *i)),
            Node::Gauge(base, p) => {
                let (x, y) = base.weights(k);
                let f = potential_at(p, k);
                let fr = potential_at(p, k.right());
                let fu = potential_at(p, k.up());
                (x * (fr - f).exp(), y * (fu - f).exp())
            }
        }
    }
}

/// Region over which a built diagram is checked for positive finite weights.
const VALIDATION_WINDOW: LatticeWindow = LatticeWindow::new(63, 63);

/// Window used for sup lower bounds when no exact rule applies.
const NORM_PROBE_WINDOW: LatticeWindow = LatticeWindow::new(127, 127);

fn positive(name: &'static str, v: f64) -> Result<()> {
    if v.is_finite() && v > 0.0 {
        Ok(())
    } else {
        Err(Error::param(name, format!("{v} is not a positive finite number")))
    }
}

fn rectangular(name: &'static str, t: &[Vec<f64>]) -> Result<(usize, usize)> {
    let n1 = t.len();
    let n2 = t.first().map_or(0, Vec::len);
    if n1 == 0 || n2 == 0 {
        return Err(Error::param(name, "table is empty"));
    }
    if t.iter().any(|c| c.len() != n2) {
        return Err(Error::param(name, "table rows have different lengths"));
    }
    Ok((n1, n2))
}

fn compile(spec: &DiagramSpec) -> Result<Node> {
    Ok(match spec {
        DiagramSpec::Table { alpha, beta } => {
            let dims = rectangular("alpha", alpha)?;
            if rectangular("beta", beta)? != dims {
                return Err(Error::param("beta", "shape differs from alpha"));
            }
            for (t, k1, k2) in [alpha, beta]
                .iter()
                .flat_map(|t| t.iter().enumerate().flat_map(move |(k1, c)| (0..c.len()).map(move |k2| (t, k1, k2))))
            {
                let v = t[k1][k2];
                if !(v.is_finite() && v > 0.0) {
                    return Err(Error::InvalidWeight { at: Point::new(k1, k2), value: v });
                }
            }
            Node::Table { alpha: alpha.clone(), beta: beta.clone() }
        }
        DiagramSpec::Tensor { sigma, tau } => Node::Tensor { sigma: sigma.clone(), tau: tau.clone() },
        DiagramSpec::DiagonalCore { omega } => Node::Diagonal { omega: omega.clone() },
        DiagramSpec::Fig2 { x0, a, omega } => {
            let w0 = omega.get(0);
            compile(&DiagramSpec::Fig2General {
                x0: *x0,
                x1: w0,
                y0: *x0,
                y1: w0,
                a: *a,
                omega: omega.clone(),
                tau: omega.clone(),
            })?
        }
        DiagramSpec::Fig2General { x0, x1, y0, y1, a, omega, tau } => {
            for (n, v) in [("x0", x0), ("x1", x1), ("y0", y0), ("y1", y1), ("a", a)] {
                positive(n, *v)?;
            }
            let (lhs, rhs) = (tau.get(0) * x1, omega.get(0) * y1);
            if tol::rel_diff(lhs, rhs) > tol::IDENTITY {
                return Err(Error::param(
                    "tau",
                    format!("tau_0 * x1 = {lhs} differs from omega_0 * y1 = {rhs}"),
                ));
            }
            Node::Fig2 {
                x0: *x0,
                x1: *x1,
                y0: *y0,
                y1: *y1,
                a: *a,
                omega: omega.clone(),
                tau: tau.clone(),
            }
        }
        DiagramSpec::DruryArveson => Node::DruryArveson,
        DiagramSpec::Quasinormal { row, c } => {
            positive("c", *c)?;
            let q = Quasi { row: row.clone(), c: *c, rows: Mutex::new(Vec::new()) };
            for k in VALIDATION_WINDOW.points() {
                let a = q.alpha(k);
                if !(a.is_finite() && a > 0.0 && a < *c) {
                    return Err(Error::ConstructionFailed { at: k, value: a, bound: *c });
                }
            }
            Node::Quasinormal(q)
        }
        DiagramSpec::Toral { base } => Node::Toral(Arc::new(compile(base)?)),
        DiagramSpec::Spherical { base } => Node::Spherical(Arc::new(compile(base)?)),
        DiagramSpec::Scaled { base, a, b } => {
            positive("a", *a)?;
            positive("b", *b)?;
            Node::Scaled(Arc::new(compile(base)?), *a, *b)
        }
        DiagramSpec::Restricted { base, i, j } => Node::Restricted(Arc::new(compile(base)?), *i, *j),
        DiagramSpec::Gauge { base, potential } => {
            rectangular("potential", potential)?;
            if potential.iter().flatten().any(|v| !v.is_finite()) {
                return Err(Error::param("potential", "entries must be finite"));
            }
            Node::Gauge(Arc::new(compile(base)?), potential.clone())
        }
    })
}

impl DiagramSpec {
    fn boxed(self) -> Box<DiagramSpec> {
        Box::new(self)
    }

    /// Eventual-flatness thresholds, when decidable from the description.
    pub fn flat_thresholds(&self) -> Option<(usize, usize)> {
        match self {
            DiagramSpec::Table { alpha, .. } => Some((alpha.len() - 1, alpha[0].len() - 1)),
            DiagramSpec::Tensor { sigma, tau } => Some((sigma.flat_from()?, tau.flat_from()?)),
            DiagramSpec::DiagonalCore { omega } => omega.flat_from().map(|m| (m, m)),
            DiagramSpec::Fig2 { omega, .. } => {
                let f = omega.flat_from()?;
                Some(((f + 1).max(2), (f + 1).max(2)))
            }
            DiagramSpec::Fig2General { omega, tau, .. } => {
                Some(((omega.flat_from()? + 1).max(2), (tau.flat_from()? + 1).max(2)))
            }
            DiagramSpec::DruryArveson | DiagramSpec::Quasinormal { .. } => None,
            DiagramSpec::Toral { base }
            | DiagramSpec::Spherical { base }
            | DiagramSpec::Scaled { base, .. } => base.flat_thresholds(),
            DiagramSpec::Restricted { base, i, j } => {
                let (n1, n2) = base.flat_thresholds()?;
                Some((n1.saturating_sub(*j), n2.saturating_sub(*i)))
            }
            DiagramSpec::Gauge { base, potential } => {
                let (n1, n2) = base.flat_thresholds()?;
                Some((n1.max(potential.len()), n2.max(potential[0].len())))
            }
        }
    }

    fn is_formula(&self) -> bool {
        match self {
            DiagramSpec::DruryArveson | DiagramSpec::Quasinormal { .. } => true,
            DiagramSpec::Toral { base }
            | DiagramSpec::Spherical { base }
            | DiagramSpec::Scaled { base, .. }
            | DiagramSpec::Restricted { base, .. } => base.is_formula(),
            _ => false,
        }
    }

    /// Rewrites derived kinds into an equivalent base kind when the weights
    /// stay exactly representable.
    pub fn simplified(&self) -> Option<DiagramSpec> {
        use DiagramSpec as S;
        let base_kind = |s: &S| !matches!(s, S::Toral { .. } | S::Spherical { .. } | S::Scaled { .. } | S::Restricted { .. } | S::Gauge { .. });
        if base_kind(self) {
            return Some(self.clone());
        }
        Some(match self {
            S::Toral { base } => match base.simplified()? {
                S::Tensor { sigma, tau } => S::Tensor { sigma: sigma.aluthge().ok()?, tau: tau.aluthge().ok()? },
                S::DiagonalCore { omega } => S::DiagonalCore { omega: omega.aluthge().ok()? },
                _ => return None,
            },
            S::Spherical { base } => match base.simplified()? {
                // alpha^2 + beta^2 = 2 omega_n^2, so the ratio collapses to the toral one
                S::DiagonalCore { omega } => S::DiagonalCore { omega: omega.aluthge().ok()? },
                S::Tensor { sigma, tau } => {
                    if let Some(0) = sigma.flat_from() {
                        let r = sigma.get(0);
                        S::Tensor { tau: spherical_factor(&tau, r)?, sigma }
                    } else if let Some(0) = tau.flat_from() {
                        let r = tau.get(0);
                        S::Tensor { sigma: spherical_factor(&sigma, r)?, tau }
                    } else {
                        return None;
                    }
                }
                _ => return None,
            },
            S::Scaled { base, a, b } => match base.simplified()? {
                S::Tensor { sigma, tau } => S::Tensor { sigma: sigma.scaled(*a).ok()?, tau: tau.scaled(*b).ok()? },
                S::DiagonalCore { omega } if a == b => S::DiagonalCore { omega: omega.scaled(*a).ok()? },
                S::DruryArveson if a == b && *a == 1.0 => S::DruryArveson,
                _ => return None,
            },
            S::Restricted { base, i, j } => match base.simplified()? {
                S::Tensor { sigma, tau } => S::Tensor { sigma: sigma.shifted(*j), tau: tau.shifted(*i) },
                S::DiagonalCore { omega } => S::DiagonalCore { omega: omega.shifted(i + j) },
                other if *i == 0 && *j == 0 => other,
                _ => return None,
            },
            _ => return None,
        })
    }
}

/// `tau_m ((r^2 + tau_{m+1}^2) / (r^2 + tau_m^2))^{1/4}`
fn spherical_factor(tau: &WeightSeq, r: f64) -> Option<WeightSeq> {
    let r2 = r * r;
    tau.map_pairs(|t0, t1| t0 * ((r2 + t1 * t1) / (r2 + t0 * t0)).powf(0.25)).ok()
}

impl WeightDiagram {
    pub fn from_spec(spec: DiagramSpec) -> Result<Self> {
        let node = Arc::new(compile(&spec)?);
        Ok(WeightDiagram { spec, node })
    }

    fn derive(&self, spec: DiagramSpec, node: Node) -> Self {
        let _ = self;
        WeightDiagram { spec, node: Arc::new(node) }
    }

    pub fn spec(&self) -> &DiagramSpec {
        &self.spec
    }

    /// `(alpha_k, beta_k)`
    pub fn weights(&self, k: Point) -> (f64, f64) {
        self.node.weights(k)
    }

    pub fn alpha(&self, k: Point) -> f64 {
        self.weights(k).0
    }

    pub fn beta(&self, k: Point) -> f64 {
        self.weights(k).1
    }

    /// Tables `alpha[k1][k2]`, `beta[k1][k2]` over a window.
    pub fn window_values(&self, w: LatticeWindow) -> (Vec<Vec<f64>>, Vec<Vec<f64>>) {
        let mut alpha = vec![vec![0.0; w.k2_max + 1]; w.k1_max + 1];
        let mut beta = alpha.clone();
        for k in w.points() {
            let (a, b) = self.weights(k);
            alpha[k.k1][k.k2] = a;
            beta[k.k1][k.k2] = b;
        }
        (alpha, beta)
    }

    pub fn tail(&self) -> Tail {
        let flat = self.spec.flat_thresholds().or_else(|| self.spec.simplified()?.flat_thresholds());
        if let Some((n1, n2)) = flat {
            Tail::Flat { n1, n2 }
        } else if self.core_factors().is_some() {
            Tail::CoreTensor
        } else if self.spec.is_formula() {
            Tail::Formula
        } else {
            Tail::Opaque
        }
    }

    pub fn toral(&self) -> Self {
        self.derive(DiagramSpec::Toral { base: self.spec.clone().boxed() }, Node::Toral(self.node.clone()))
    }

    pub fn spherical(&self) -> Self {
        self.derive(
            DiagramSpec::Spherical { base: self.spec.clone().boxed() },
            Node::Spherical(self.node.clone()),
        )
    }

    pub fn scaled(&self, a: f64, b: f64) -> Result<Self> {
        positive("a", a)?;
        positive("b", b)?;
        Ok(self.derive(
            DiagramSpec::Scaled { base: self.spec.clone().boxed(), a, b },
            Node::Scaled(self.node.clone(), a, b),
        ))
    }

    /// Diagram starting at `(j, i)`: `alpha'(k) = alpha(k + (j, i))`.
    pub fn restrict(&self, i: usize, j: usize) -> Self {
        if let DiagramSpec::Restricted { base, i: i0, j: j0 } = &self.spec {
            if let Node::Restricted(inner, ..) = &*self.node {
                return self.derive(
                    DiagramSpec::Restricted { base: base.clone(), i: i0 + i, j: j0 + j },
                    Node::Restricted(inner.clone(), i0 + i, j0 + j),
                );
            }
        }
        self.derive(
            DiagramSpec::Restricted { base: self.spec.clone().boxed(), i, j },
            Node::Restricted(self.node.clone(), i, j),
        )
    }

    /// Restriction to `k1, k2 >= 1`.
    pub fn core(&self) -> Self {
        self.restrict(1, 1)
    }

    pub fn gauge(&self, potential: Vec<Vec<f64>>) -> Result<Self> {
        rectangular("potential", &potential)?;
        if potential.iter().flatten().any(|v| !v.is_finite()) {
            return Err(Error::param("potential", "entries must be finite"));
        }
        Ok(self.derive(
            DiagramSpec::Gauge { base: self.spec.clone().boxed(), potential: potential.clone() },
            Node::Gauge(self.node.clone(), potential),
        ))
    }

    pub fn check_commutativity(&self, w: LatticeWindow) -> CommutativityReport {
        let mut rep = CommutativityReport { max_abs: 0.0, max_rel: 0.0, at: Point::ORIGIN };
        for k in w.points() {
            let (a, b) = self.weights(k);
            let lhs = self.alpha(k.up()) * b;
            let rhs = self.beta(k.right()) * a;
            let abs = (lhs - rhs).abs();
            let rel = if abs == 0.0 { 0.0 } else { tol::rel_diff(lhs, rhs) };
            if !(rel <= rep.max_rel) {
                rep = CommutativityReport { max_abs: abs, max_rel: rel, at: k };
            }
        }
        rep
    }

    /// `gamma_k` along the path right along row 0, then up column `k1`.
    pub fn moment(&self, k: Point) -> f64 {
        let row = (0..k.k1).map(|i| self.alpha(Point::new(i, 0)));
        let col = (0..k.k2).map(|j| self.beta(Point::new(k.k1, j)));
        path_product(row.chain(col), k.degree())
    }

    /// `gamma_k` along the path up column 0, then right along row `k2`.
    pub fn moment_up_first(&self, k: Point) -> f64 {
        let col = (0..k.k2).map(|j| self.beta(Point::new(0, j)));
        let row = (0..k.k1).map(|i| self.alpha(Point::new(i, k.k2)));
        path_product(col.chain(row), k.degree())
    }

    /// All moments on a window via `gamma_{k+e1} = alpha_k^2 gamma_k` along
    /// row 0 and `gamma_{k+e2} = beta_k^2 gamma_k` up each column.
    pub fn moment_table(&self, w: LatticeWindow) -> MomentTable {
        let n1 = w.k1_max + 1;
        let mut values = vec![0.0; w.len()];
        let log = w.k1_max + w.k2_max > 60;
        let mut g = if log { 0.0 } else { 1.0 };
        for k1 in 0..n1 {
            if k1 > 0 {
                let a = self.alpha(Point::new(k1 - 1, 0));
                g = if log { g + 2.0 * a.ln() } else { g * a * a };
            }
            let mut h = g;
            for k2 in 0..=w.k2_max {
                if k2 > 0 {
                    let b = self.beta(Point::new(k1, k2 - 1));
                    h = if log { h + 2.0 * b.ln() } else { h * b * b };
                }
                values[k2 * n1 + k1] = if log { h.exp() } else { h };
            }
        }
        MomentTable { window: w, values }
    }

    /// Exact sups from the description, or a lower bound over a large window.
    pub fn operator_norms(&self) -> Norms {
        if let Some((t1, t2)) = self.exact_sups() {
            return Norms { t1, t2, exact: true };
        }
        let (t1, t2) = self.window_sups(NORM_PROBE_WINDOW);
        Norms { t1, t2, exact: false }
    }

    pub fn window_sups(&self, w: LatticeWindow) -> (f64, f64) {
        w.points().fold((0.0, 0.0), |(s1, s2), k| {
            let (a, b) = self.weights(k);
            (f64::max(s1, a), f64::max(s2, b))
        })
    }

    fn exact_sups(&self) -> Option<(f64, f64)> {
        if let Some((n1, n2)) = self.spec.flat_thresholds() {
            return Some(self.window_sups(LatticeWindow::new(n1, n2)));
        }
        match self.spec.simplified()? {
            DiagramSpec::Tensor { sigma, tau } => Some((sigma.sup(), tau.sup())),
            DiagramSpec::DiagonalCore { omega } => Some((omega.sup(), omega.sup())),
            DiagramSpec::Fig2 { x0, a, omega } => {
                let s = omega.sup().max(x0).max(a);
                Some((s, s))
            }
            DiagramSpec::Fig2General { x0, x1, y0, y1, a, omega, tau } => {
                let w0 = omega.get(0);
                let t1 = [x0, x1, a, a * w0 / x1, omega.sup()].into_iter().fold(0.0, f64::max);
                let t2 = [y0, y1, a * y0 / x0, a * y0 * w0 / (x0 * x1), tau.sup()]
                    .into_iter()
                    .fold(0.0, f64::max);
                Some((t1, t2))
            }
            DiagramSpec::DruryArveson => Some((1.0, 1.0)),
            _ => None,
        }
    }

    /// Factor sequences `(sigma', tau')` with `alpha(k) = sigma'_{k1-1}` and
    /// `beta(k) = tau'_{k2-1}` for `k1, k2 >= 1`, when the core is of tensor form.
    pub fn core_factors(&self) -> Option<(WeightSeq, WeightSeq)> {
        if let Some((n1, n2)) = self.spec.flat_thresholds() {
            return self.core_factors_from_box(n1, n2);
        }
        core_factors_of(&self.spec)
    }

    fn core_factors_from_box(&self, n1: usize, n2: usize) -> Option<(WeightSeq, WeightSeq)> {
        let (m1, m2) = (n1.max(1) + 1, n2.max(1) + 1);
        let same = |x: f64, y: f64| tol::rel_diff(x, y) <= tol::IDENTITY;
        for k1 in 1..=m1 {
            for k2 in 1..=m2 {
                let (a, b) = self.weights(Point::new(k1, k2));
                if !same(a, self.alpha(Point::new(k1, 1))) || !same(b, self.beta(Point::new(1, k2))) {
                    return None;
                }
            }
        }
        let sigma: Vec<f64> = (1..=m1).map(|k1| self.alpha(Point::new(k1, 1))).collect();
        let tau: Vec<f64> = (1..=m2).map(|k2| self.beta(Point::new(1, k2))).collect();
        Some((WeightSeq::eventually_constant(&sigma).ok()?, WeightSeq::eventually_constant(&tau).ok()?))
    }
}

fn core_factors_of(spec: &DiagramSpec) -> Option<(WeightSeq, WeightSeq)> {
    use DiagramSpec as S;
    match spec {
        S::Tensor { sigma, tau } => Some((sigma.shifted(1), tau.shifted(1))),
        S::Fig2 { omega, .. } => Some((omega.clone(), omega.clone())),
        S::Fig2General { omega, tau, .. } => Some((omega.clone(), tau.clone())),
        S::DiagonalCore { omega } => {
            let f = omega.flat_from()?;
            (f <= 2).then(|| (omega.shifted(2), omega.shifted(2)))
        }
        S::Toral { base } => {
            let (s, t) = core_factors_of(base)?;
            Some((s.aluthge().ok()?, t.aluthge().ok()?))
        }
        S::Spherical { base } => {
            let (s, t) = core_factors_of(base)?;
            if s.flat_from() == Some(0) {
                let r = s.get(0);
                Some((s, spherical_factor(&t, r)?))
            } else if t.flat_from() == Some(0) {
                let r = t.get(0);
                Some((spherical_factor(&s, r)?, t))
            } else {
                None
            }
        }
        S::Scaled { base, a, b } => {
            let (s, t) = core_factors_of(base)?;
            Some((s.scaled(*a).ok()?, t.scaled(*b).ok()?))
        }
        S::Restricted { base, i, j } => {
            let (s, t) = core_factors_of(base)?;
            Some((s.shifted(*j), t.shifted(*i)))
        }
        _ => None,
    }
}

/// Product of squared weights, in log space for long paths.
fn path_product(weights: impl Iterator<Item = f64>, len: usize) -> f64 {
    if len > 60 {
        weights.map(|w| 2.0 * w.ln()).sum::<f64>().exp()
    } else {
        weights.map(|w| w * w).product()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn da() -> WeightDiagram {
        WeightDiagram::from_spec(DiagramSpec::DruryArveson).unwrap()
    }

    fn seq(s: &str) -> WeightSeq {
        s.parse().unwrap()
    }

    #[test]
    fn drury_arveson_weights_and_moments() {
        let d = da();
        assert_relative_eq!(d.alpha(Point::new(1, 1)), (2.0f64 / 3.0).sqrt());
        assert_relative_eq!(d.beta(Point::new(1, 1)), (2.0f64 / 3.0).sqrt());
        assert_relative_eq!(d.moment(Point::new(1, 1)), 0.5, max_relative = 1e-15);
        assert_eq!(d.moment(Point::ORIGIN), 1.0);
        let n = d.operator_norms();
        assert_eq!((n.t1, n.t2, n.exact), (1.0, 1.0, true));
        assert_eq!(d.tail(), Tail::Formula);
    }

    #[test]
    fn diagonal_core_moment() {
        let d = WeightDiagram::from_spec(DiagramSpec::DiagonalCore { omega: seq("periodic:0.5,2") }).unwrap();
        assert_relative_eq!(d.moment(Point::new(2, 0)), 1.0);
        assert_eq!(d.check_commutativity(LatticeWindow::new(3, 3)).max_abs, 0.0);
    }

    #[test]
    fn perturbed_table_breaks_commutativity_at_origin() {
        let d = WeightDiagram::from_spec(DiagramSpec::Tensor { sigma: seq("0.5,0.8,1"), tau: seq("0.6,1") }).unwrap();
        let w = LatticeWindow::new(3, 3);
        let (alpha, mut beta) = d.window_values(w);
        assert_eq!(d.check_commutativity(w).max_abs, 0.0);
        beta[1][0] += 0.1;
        let t = WeightDiagram::from_spec(DiagramSpec::Table { alpha, beta }).unwrap();
        let rep = t.check_commutativity(w);
        assert!(rep.max_abs > 0.0);
        assert_eq!(rep.at, Point::ORIGIN);
    }

    #[test]
    fn fig2_norms_and_core() {
        let d = WeightDiagram::from_spec(DiagramSpec::Fig2 { x0: 0.9, a: 0.5, omega: seq("1") }).unwrap();
        let n = d.operator_norms();
        assert_eq!((n.t1, n.t2, n.exact), (1.0, 1.0, true));
        assert_eq!(d.tail(), Tail::Flat { n1: 2, n2: 2 });
        let (s, t) = d.core_factors().unwrap();
        assert_eq!(s.values(4), vec![1.0; 4]);
        assert_eq!(t.values(4), vec![1.0; 4]);
        assert!(d.check_commutativity(LatticeWindow::new(8, 8)).holds(1e-15));
    }

    #[test]
    fn fig2_general_rejects_constraint_violation() {
        let bad = DiagramSpec::Fig2General {
            x0: 0.5,
            x1: 0.8,
            y0: 0.5,
            y1: 0.7,
            a: 0.4,
            omega: seq("1"),
            tau: seq("1"),
        };
        assert!(WeightDiagram::from_spec(bad).is_err());
    }

    #[test]
    fn restrict_identity_and_composition() {
        let d = da();
        let w = LatticeWindow::new(4, 4);
        let r0 = d.restrict(0, 0);
        let r = d.restrict(1, 2).restrict(3, 1);
        for k in w.points() {
            assert_eq!(r0.weights(k), d.weights(k));
            assert_eq!(r.weights(k), d.weights(k.offset(3, 4)));
        }
    }

    #[test]
    fn core_of_diagonal_is_shifted_diagonal() {
        let d = WeightDiagram::from_spec(DiagramSpec::DiagonalCore { omega: seq("0.3,0.5,0.7,0.9,1") }).unwrap();
        let c = d.core();
        for k in LatticeWindow::new(4, 4).points() {
            assert_eq!(c.alpha(k), d.alpha(Point::new(0, k.degree() + 2)));
        }
    }

    #[test]
    fn moment_table_matches_paths() {
        let d = WeightDiagram::from_spec(DiagramSpec::Fig2 { x0: 0.7, a: 0.6, omega: seq("berger:0.5@1,0.5@2") }).unwrap();
        let w = LatticeWindow::new(5, 5);
        let t = d.moment_table(w);
        for k in w.points() {
            assert_relative_eq!(t.get(k).unwrap(), d.moment(k), max_relative = 1e-13);
            assert_relative_eq!(d.moment_up_first(k), d.moment(k), max_relative = 1e-13);
        }
        assert_eq!(t.get(Point::new(6, 0)), None);
    }

    #[test]
    fn long_paths_use_log_space() {
        let d = WeightDiagram::from_spec(DiagramSpec::DiagonalCore { omega: seq("0.5") }).unwrap();
        let g = d.moment(Point::new(60, 60));
        assert_relative_eq!(g.ln(), 240.0 * 0.5f64.ln(), max_relative = 1e-12);
        let t = d.moment_table(LatticeWindow::new(60, 60));
        assert_relative_eq!(t.get(Point::new(60, 60)).unwrap(), g, max_relative = 1e-12);
    }

    #[test]
    fn quasinormal_recursion_step() {
        let row = WeightSeq::eventually_constant(&[(1.0f64 / 3.0).sqrt(), 0.5f64.sqrt()]).unwrap();
        let d = WeightDiagram::from_spec(DiagramSpec::Quasinormal { row, c: 1.0 }).unwrap();
        assert_relative_eq!(d.alpha(Point::new(0, 1)).powi(2), 0.25, max_relative = 1e-14);
        assert!(d.check_commutativity(LatticeWindow::new(10, 10)).holds(1e-12));
    }

    #[test]
    fn quasinormal_rejects_row_reaching_c() {
        let row = seq("0.5,1.2");
        let err = WeightDiagram::from_spec(DiagramSpec::Quasinormal { row, c: 1.0 }).unwrap_err();
        assert!(matches!(err, Error::ConstructionFailed { at, .. } if at == Point::new(1, 0)));
    }

    #[test]
    fn spec_json_round_trip() {
        let d = WeightDiagram::from_spec(DiagramSpec::Fig2 { x0: 0.9, a: 0.5, omega: seq("0.9;berger:0.5@1,0.5@2") })
            .unwrap()
            .toral()
            .restrict(1, 0);
        let json = serde_json::to_string(&d).unwrap();
        let back: WeightDiagram = serde_json::from_str(&json).unwrap();
        for k in LatticeWindow::new(5, 5).points() {
            assert_eq!(back.weights(k), d.weights(k));
        }
    }

    #[test]
    fn tail_propagation() {
        let flat = WeightDiagram::from_spec(DiagramSpec::Fig2 { x0: 0.5, a: 0.4, omega: seq("1") }).unwrap();
        assert_eq!(flat.toral().tail(), Tail::Flat { n1: 2, n2: 2 });
        assert_eq!(flat.restrict(1, 3).tail(), Tail::Flat { n1: 0, n2: 1 });
        let g = flat.gauge(vec![vec![0.1; 4]; 5]).unwrap();
        assert_eq!(g.tail(), Tail::Flat { n1: 5, n2: 4 });
        let tc = WeightDiagram::from_spec(DiagramSpec::Fig2 { x0: 0.5, a: 0.4, omega: seq("berger:0.5@1,0.5@2") }).unwrap();
        assert_eq!(tc.tail(), Tail::CoreTensor);
        assert_eq!(tc.toral().tail(), Tail::Opaque);
    }
}
