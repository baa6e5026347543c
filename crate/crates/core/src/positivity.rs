//! Hankel and moment matrices, PSD verdicts and windowed k-hyponormality.
//!
//! `W` is k-hyponormal iff `M_u(k) = (gamma_{u+(n,m)+(p,q)})` is positive
//! semidefinite for every lattice point `u`. Each `M_u(k)` is checked after
//! dividing by `gamma_u`; the verdict is unchanged and the entries become
//! products of the weights near `u`, so they neither under- nor overflow.
//! The PSD test then runs on the unit-diagonal form of the matrix.
//!
//! A sweep over a finite window is only a window statement, except when the
//! diagram is flat beyond `(n1, n2)`: then `M_u(k)` no longer depends on `u`
//! past the thresholds and a window reaching `(n1 + 1, n2 + 1)` is reported
//! as certifying.

use nalgebra::{DMatrix, SymmetricEigen};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::lattice::{LatticeWindow, Point, Tail, WeightDiagram, WeightSeq};
use crate::tol;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PsdVerdict {
    pub is_psd: bool,
    pub min_eigenvalue: f64,
    /// Largest diagonal entry; the PSD threshold is `-tol * scale`.
    pub scale: f64,
    pub matrix_order: usize,
    pub failing_u: Option<Point>,
}

/// PSD test via a full symmetric eigendecomposition:
/// `min eig >= -tol * max diagonal`.
pub fn is_psd(m: &DMatrix<f64>, tol: f64) -> Result<PsdVerdict> {
    if !m.is_square() {
        return Err(Error::param("matrix", "not square"));
    }
    let n = m.nrows();
    let mut asym = 0.0f64;
    for i in 0..n {
        for j in 0..i {
            let (a, b) = (m[(i, j)], m[(j, i)]);
            if a != b {
                asym = asym.max(tol::rel_diff(a, b));
            }
        }
    }
    if asym > tol::IDENTITY {
        return Err(Error::NotSymmetric { asymmetry: asym });
    }
    let scale = (0..n).map(|i| m[(i, i)]).fold(0.0, f64::max);
    let min_eigenvalue = if n == 0 {
        0.0
    } else {
        SymmetricEigen::new(m.clone()).eigenvalues.min()
    };
    Ok(PsdVerdict {
        is_psd: min_eigenvalue >= -tol * scale,
        min_eigenvalue,
        scale,
        matrix_order: n,
        failing_u: None,
    })
}

/// Moment matrices have positive diagonals. Testing `D^-1/2 M D^-1/2`
/// instead of `M` makes the verdict invariant under diagonal congruence,
/// i.e. under rescaling the shift, however badly scaled the entries are.
fn psd(m: &DMatrix<f64>, tol: f64) -> PsdVerdict {
    let s: Vec<f64> = m.diagonal().iter().map(|&x| if x > 0.0 { x.sqrt().recip() } else { 1.0 }).collect();
    let unit = DMatrix::from_fn(m.nrows(), m.ncols(), |i, j| m[(i, j)] * s[i] * s[j]);
    is_psd(&unit, tol).expect("moment matrices are symmetric by construction")
}

/// `H(k; u) = (gamma_{u+i+j})_{i,j=0..k}`.
pub fn hankel_matrix(gamma: &[f64], k: usize, u: usize) -> Result<DMatrix<f64>> {
    let needed = u + 2 * k;
    if gamma.len() <= needed {
        return Err(Error::InsufficientMoments { needed, available: gamma.len().saturating_sub(1) });
    }
    Ok(DMatrix::from_fn(k + 1, k + 1, |i, j| gamma[u + i + j]))
}

/// Multi-indices of degree `<= k` in graded order:
/// `(0,0), (1,0), (0,1), (2,0), (1,1), (0,2), ...`
pub fn multi_indices(k: usize) -> Vec<(usize, usize)> {
    (0..=k).flat_map(|d| (0..=d).map(move |m| (d - m, m))).collect()
}

fn matrix_from_moments(k: usize, gamma: impl Fn(usize, usize) -> f64) -> DMatrix<f64> {
    let idx = multi_indices(k);
    DMatrix::from_fn(idx.len(), idx.len(), |r, c| {
        let (n, m) = idx[r];
        let (p, q) = idx[c];
        gamma(n + p, m + q)
    })
}

/// `M_u(k)` with raw moment entries `gamma_{u+(n,m)+(p,q)}`.
pub fn moment_matrix(d: &WeightDiagram, k: usize, u: Point) -> DMatrix<f64> {
    let t = d.moment_table(LatticeWindow::new(u.k1 + 2 * k, u.k2 + 2 * k));
    matrix_from_moments(k, |a, b| t.get(u.offset(a, b)).expect("inside table"))
}

/// `M_u(k) / gamma_u`, built from the weights at and beyond `u`.
pub fn normalized_moment_matrix(d: &WeightDiagram, k: usize, u: Point) -> DMatrix<f64> {
    let t = d.restrict(u.k2, u.k1).moment_table(LatticeWindow::square(2 * k));
    matrix_from_moments(k, |a, b| t.get(Point::new(a, b)).expect("inside table"))
}

/// PSD verdict of `M_u(1)`, the 3x3 matrix of the Six-Point Test.
pub fn six_point_test(d: &WeightDiagram, u: Point) -> PsdVerdict {
    six_point_test_with(d, u, tol::PSD)
}

pub fn six_point_test_with(d: &WeightDiagram, u: Point, tol: f64) -> PsdVerdict {
    let mut v = psd(&normalized_moment_matrix(d, 1, u), tol);
    if !v.is_psd {
        v.failing_u = Some(u);
    }
    v
}

/// Smallest window whose sweep certifies a global verdict, if any.
pub fn certifying_window(d: &WeightDiagram) -> Option<LatticeWindow> {
    match d.tail() {
        Tail::Flat { n1, n2 } => Some(LatticeWindow::new(n1 + 1, n2 + 1)),
        _ => None,
    }
}

pub fn is_certifying(d: &WeightDiagram, w: LatticeWindow) -> bool {
    certifying_window(d).is_some_and(|c| w.k1_max >= c.k1_max && w.k2_max >= c.k2_max)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PointVerdict {
    pub u: Point,
    pub min_eigenvalue: f64,
    pub is_psd: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HyponormalityReport {
    pub k: usize,
    pub window: LatticeWindow,
    pub holds: bool,
    /// True when the window settles the property for the whole diagram.
    pub certifying: bool,
    /// First failing point in row-major order.
    pub first_failure: Option<Point>,
    pub min_eigenvalue: f64,
    pub per_u: Vec<PointVerdict>,
}

pub fn k_hyponormal(d: &WeightDiagram, k: usize, w: LatticeWindow) -> HyponormalityReport {
    k_hyponormal_with(d, k, w, tol::PSD)
}

pub fn k_hyponormal_with(d: &WeightDiagram, k: usize, w: LatticeWindow, tol: f64) -> HyponormalityReport {
    let per_u: Vec<PointVerdict> = w
        .points()
        .map(|u| {
            let v = psd(&normalized_moment_matrix(d, k, u), tol);
            PointVerdict { u, min_eigenvalue: v.min_eigenvalue, is_psd: v.is_psd }
        })
        .collect();
    let first_failure = per_u.iter().find(|p| !p.is_psd).map(|p| p.u);
    HyponormalityReport {
        k,
        window: w,
        holds: first_failure.is_none(),
        certifying: is_certifying(d, w),
        first_failure,
        min_eigenvalue: per_u.iter().map(|p| p.min_eigenvalue).fold(f64::INFINITY, f64::min),
        per_u,
    }
}

/// `alpha` nondecreasing along every row and `beta` along every column of `w`.
pub fn componentwise_hyponormal(d: &WeightDiagram, w: LatticeWindow) -> bool {
    w.points().all(|k| {
        let (a, b) = d.weights(k);
        (k.k1 == w.k1_max || a <= d.alpha(k.right())) && (k.k2 == w.k2_max || b <= d.beta(k.up()))
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HankelReport {
    pub k: usize,
    pub u_max: usize,
    pub holds: bool,
    pub certifying: bool,
    pub first_failure: Option<usize>,
    pub min_eigenvalue: f64,
}

/// 1-variable sweep: `H(k; u) / gamma_u` PSD for `u = 0..=u_max`.
pub fn hankel_sweep(omega: &WeightSeq, k: usize, u_max: usize) -> HankelReport {
    hankel_sweep_with(omega, k, u_max, tol::PSD)
}

pub fn hankel_sweep_with(omega: &WeightSeq, k: usize, u_max: usize, tol: f64) -> HankelReport {
    let mut first_failure = None;
    let mut min_eigenvalue = f64::INFINITY;
    for u in 0..=u_max {
        let gamma = omega.shifted(u).moments(2 * k);
        let v = psd(&hankel_matrix(&gamma, k, 0).expect("enough moments"), tol);
        min_eigenvalue = min_eigenvalue.min(v.min_eigenvalue);
        if !v.is_psd && first_failure.is_none() {
            first_failure = Some(u);
        }
    }
    HankelReport {
        k,
        u_max,
        holds: first_failure.is_none(),
        certifying: omega.flat_from().is_some_and(|f| u_max > f),
        first_failure,
        min_eigenvalue,
    }
}
