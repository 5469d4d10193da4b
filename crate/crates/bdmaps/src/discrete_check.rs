//! Finite-difference check of the symmetrized perturbation determinant:
//! discrete operators, the 2x2 closed form built from `u_±` boundary data,
//! convergence studies and the kernel probe for Dirichlet base angles.

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64 as C;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::boundary_maps::{lambda_map, s_matrix, Mat2};
use crate::error::{Error, Result};
use crate::ode::{is_multiple_of_pi, u_plus_minus, BoundaryAngles, Potential};
use crate::spectral::eigenvalues;

/// Symmetric tridiagonal second-difference operator. Robin ends keep the
/// boundary node (ghost-point closure, symmetrized with the half-weight of
/// the trapezoid rule); Dirichlet ends drop it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiscreteHamiltonian {
    /// Interior node count; mesh width is `R / (n + 1)`.
    pub n: usize,
    pub h: f64,
    pub nodes: Vec<f64>,
    pub diag: Vec<f64>,
    pub offdiag: Vec<f64>,
    pub angles: BoundaryAngles,
    pub pot: Potential,
}

impl DiscreteHamiltonian {
    pub fn dim(&self) -> usize {
        self.diag.len()
    }

    pub fn has_left_node(&self) -> bool {
        !self.angles.left_is_dirichlet()
    }

    pub fn has_right_node(&self) -> bool {
        !self.angles.right_is_dirichlet()
    }

    pub fn dense(&self) -> DMatrix<f64> {
        let m = self.dim();
        let mut a = DMatrix::zeros(m, m);
        for i in 0..m {
            a[(i, i)] = self.diag[i];
        }
        for (i, &o) in self.offdiag.iter().enumerate() {
            a[(i, i + 1)] = o;
            a[(i + 1, i)] = o;
        }
        a
    }

    /// LDLᵀ pivots of `H - z`.
    fn pivots(&self, z: f64) -> Vec<f64> {
        let mut p = Vec::with_capacity(self.dim());
        for i in 0..self.dim() {
            let mut d = self.diag[i] - z;
            if i > 0 {
                d -= self.offdiag[i - 1].powi(2) / p[i - 1];
            }
            p.push(d);
        }
        p
    }

    /// Number of eigenvalues below `z` (Sturm count).
    pub fn count_below(&self, z: f64) -> usize {
        self.pivots(z).iter().filter(|&&d| d < 0.0).count()
    }

    pub fn eigenvalues(&self) -> Vec<f64> {
        let mut e: Vec<f64> = SymmetricEigen::new(self.dense()).eigenvalues.iter().copied().collect();
        e.sort_by(f64::total_cmp);
        e
    }

    pub fn lowest_eigenvalue(&self) -> f64 {
        // Gershgorin bracket, then bisection on the Sturm count
        let m = self.dim();
        let radius = |i: usize| {
            let l = if i > 0 { self.offdiag[i - 1].abs() } else { 0.0 };
            let r = if i + 1 < m { self.offdiag[i].abs() } else { 0.0 };
            l + r
        };
        let mut lo = (0..m).map(|i| self.diag[i] - radius(i)).fold(f64::INFINITY, f64::min);
        let mut hi = (0..m).map(|i| self.diag[i] + radius(i)).fold(f64::NEG_INFINITY, f64::max);
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if self.count_below(mid) >= 1 {
                hi = mid;
            } else {
                lo = mid;
            }
            if hi - lo <= 1e-14 * hi.abs().max(1.0) {
                break;
            }
        }
        0.5 * (lo + hi)
    }

    /// Solve `(H - z) x = b` by the Thomas algorithm.
    fn solve(&self, z: f64, b: &[f64]) -> Vec<f64> {
        let m = self.dim();
        let p = self.pivots(z);
        let mut y = b.to_vec();
        for i in 1..m {
            y[i] -= self.offdiag[i - 1] / p[i - 1] * y[i - 1];
        }
        let mut x = vec![0.0; m];
        x[m - 1] = y[m - 1] / p[m - 1];
        for i in (0..m - 1).rev() {
            x[i] = (y[i] - self.offdiag[i] * x[i + 1]) / p[i];
        }
        x
    }

    fn check_below(&self, z: f64) -> Result<()> {
        if self.pivots(z).iter().all(|&d| d > 0.0) {
            Ok(())
        } else {
            Err(Error::NotBelowSpectrum {
                z,
                lowest: self.lowest_eigenvalue(),
            })
        }
    }
}

/// Second differences on `n` interior nodes of width `R/(n+1)`.
pub fn discretize(pot: &Potential, angles: &BoundaryAngles, n: usize) -> Result<DiscreteHamiltonian> {
    if n < 3 {
        return Err(Error::Invalid(format!("need at least 3 interior nodes, got {n}")));
    }
    if !pot.is_real() {
        return Err(Error::UnsupportedCase("discretization needs a real potential".into()));
    }
    let r = pot.r();
    let h = r / (n + 1) as f64;
    let h2 = h * h;
    let v = |x: f64| pot.eval(x).re;
    let mut nodes = Vec::with_capacity(n + 2);
    let mut diag = Vec::with_capacity(n + 2);
    let mut offdiag = Vec::with_capacity(n + 1);
    let left = !angles.left_is_dirichlet();
    let right = !angles.right_is_dirichlet();
    if left {
        let cot = 1.0 / angles.theta0.tan();
        nodes.push(0.0);
        diag.push((2.0 - 2.0 * h * cot) / h2 + v(0.0));
        offdiag.push(-std::f64::consts::SQRT_2 / h2);
    }
    for i in 1..=n {
        let x = i as f64 * h;
        nodes.push(x);
        diag.push(2.0 / h2 + v(x));
        if i < n {
            offdiag.push(-1.0 / h2);
        }
    }
    if right {
        let cot = 1.0 / angles.theta_r.tan();
        nodes.push(r);
        diag.push((2.0 - 2.0 * h * cot) / h2 + v(r));
        offdiag.push(-std::f64::consts::SQRT_2 / h2);
    }
    Ok(DiscreteHamiltonian {
        n,
        h,
        nodes,
        diag,
        offdiag,
        angles: *angles,
        pot: pot.clone(),
    })
}

fn check_pair(base: &DiscreteHamiltonian, primed: &DiscreteHamiltonian) -> Result<()> {
    if base.n != primed.n || (base.h - primed.h).abs() > 1e-15 * base.h {
        return Err(Error::GridMismatch(format!(
            "discretizations use n = {} and n = {}",
            base.n, primed.n
        )));
    }
    if !primed.has_left_node() || !primed.has_right_node() {
        return Err(Error::Invalid("primed angles must not be Dirichlet".into()));
    }
    Ok(())
}

/// Index of each base node inside the primed node list.
fn embedding(base: &DiscreteHamiltonian) -> Vec<usize> {
    let off = usize::from(!base.has_left_node());
    (0..base.dim()).map(|i| i + off).collect()
}

/// `det((H' - z)^{1/2} (H - z)^{-1} (H' - z)^{1/2})` for real z below both
/// discrete spectra. A Dirichlet base end makes the base resolvent vanish on
/// that boundary node, so the determinant is exactly 0.
pub fn sym_det_discrete(base: &DiscreteHamiltonian, primed: &DiscreteHamiltonian, z: f64) -> Result<f64> {
    check_pair(base, primed)?;
    base.check_below(z)?;
    primed.check_below(z)?;
    if base.dim() < primed.dim() {
        return Ok(0.0);
    }
    let m = base.dim();
    let d: Vec<f64> = primed.diag.iter().zip(&base.diag).map(|(p, b)| p - b).collect();
    let changed: Vec<usize> = (0..m).filter(|&i| d[i] != 0.0).collect();
    if changed.iter().all(|&i| i == 0 || i == m - 1) {
        // det(I + (H - z)^{-1} U diag(d) Uᵀ) = det(I_k + diag(d) Uᵀ (H - z)^{-1} U)
        let cols: Vec<Vec<f64>> = changed
            .iter()
            .map(|&j| {
                let mut e = vec![0.0; m];
                e[j] = 1.0;
                base.solve(z, &e)
            })
            .collect();
        let k = changed.len();
        let mut a = DMatrix::<f64>::identity(k, k);
        for (r, &i) in changed.iter().enumerate() {
            for (c, col) in cols.iter().enumerate() {
                a[(r, c)] += d[i] * col[i];
            }
        }
        return Ok(a.determinant());
    }
    // general diagonal change: ratio of LDLᵀ pivot products
    let pb = base.pivots(z);
    let pp = primed.pivots(z);
    Ok(pp.iter().zip(&pb).map(|(a, b)| a / b).product())
}

/// Entries of `B(z)* B(z)` from the `ǔ_±` boundary data of the primed
/// operator; `c12` and `c21` come from the two independent expressions.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FormGram {
    pub c11: C,
    pub c12: C,
    pub c21: C,
    pub c22: C,
}

impl FormGram {
    pub fn matrix(&self) -> Mat2 {
        Mat2::new(self.c11, self.c12, self.c21, self.c22)
    }
}

/// `ǔ_±` data: `(ǔ_+'(0) + cot θ0', ǔ_-'(R) - cot θR', ǔ_-(0), ǔ_+(R))`
/// with `ǔ_+(0) = ǔ_-(R) = 1`.
fn check_data(pot: &Potential, z: C, primed: &BoundaryAngles, tol: f64) -> Result<[C; 4]> {
    let (up, um) = u_plus_minus(pot, z, primed, tol)?;
    let (u0, _) = um.first();
    let (_, dup0) = up.first();
    let (upr, _) = up.last();
    let (_, dumr) = um.last();
    Ok([
        dup0 + 1.0 / primed.theta0.tan(),
        dumr - 1.0 / primed.theta_r.tan(),
        u0,
        upr,
    ])
}

fn require_robin(primed: &BoundaryAngles) -> Result<()> {
    if primed.left_is_dirichlet() || primed.right_is_dirichlet() {
        Err(Error::Invalid("primed angles must not be multiples of π".into()))
    } else {
        Ok(())
    }
}

pub fn form_gram(
    pot: &Potential,
    z: C,
    base: &BoundaryAngles,
    primed: &BoundaryAngles,
    tol: f64,
) -> Result<FormGram> {
    require_robin(primed)?;
    let [p0, mr, um0, upr] = check_data(pot, z, primed, tol)?;
    let s0 = (base.theta0 - primed.theta0).sin();
    let sr = (base.theta_r - primed.theta_r).sin();
    let (q0, qr) = (primed.theta0.sin(), primed.theta_r.sin());
    let mixed = s0 * sr / (q0 * qr);
    Ok(FormGram {
        c11: -(s0 * s0) / (q0 * q0) / p0,
        c12: mixed * um0 / mr,
        c21: -mixed * upr / p0,
        c22: (sr * sr) / (qr * qr) / mr,
    })
}

/// `diag(sin(θ0 - θ0') sin θ0 / sin θ0', sin(θR - θR') sin θR / sin θR')`.
pub fn gram_shift(base: &BoundaryAngles, primed: &BoundaryAngles) -> Mat2 {
    let d = |t: f64, tp: f64| C::new((t - tp).sin() * t.sin() / tp.sin(), 0.0);
    let zero = C::new(0.0, 0.0);
    Mat2::new(d(base.theta0, primed.theta0), zero, zero, d(base.theta_r, primed.theta_r))
}

/// `‖Λ_{primed}^{base} S_{base - primed} - (B*B + D)‖` (Frobenius).
pub fn gram_identity_residual(
    pot: &Potential,
    z: C,
    base: &BoundaryAngles,
    primed: &BoundaryAngles,
    tol: f64,
) -> Result<f64> {
    let lam = lambda_map(pot, z, primed, base, tol)?;
    let s = s_matrix(base.theta0 - primed.theta0, base.theta_r - primed.theta_r);
    let g = form_gram(pot, z, base, primed, tol)?.matrix();
    Ok((lam * s - (g + gram_shift(base, primed))).norm())
}

/// The Wronskian `W(ǔ_+, ǔ_-)` three ways: directly, from the right end and
/// from the left end.
pub fn wronskian_identities(pot: &Potential, z: C, primed: &BoundaryAngles, tol: f64) -> Result<[C; 3]> {
    require_robin(primed)?;
    let (up, um) = u_plus_minus(pot, z, primed, tol)?;
    let (a, da) = up.at(0);
    let (b, db) = um.at(0);
    let [p0, mr, um0, upr] = check_data(pot, z, primed, tol)?;
    Ok([a * db - da * b, upr * mr, -um0 * p0])
}

/// `det(I₂ - S^{-1} Λ B*B)` with `Λ = Λ_{base}^{primed}` and
/// `S = S_{base - primed}`, restricted to the ends where the angles differ.
pub fn sym_det_closed_form(
    pot: &Potential,
    z: C,
    base: &BoundaryAngles,
    primed: &BoundaryAngles,
    tol: f64,
) -> Result<C> {
    require_robin(primed)?;
    if z.im == 0.0 {
        let e0 = eigenvalues(pot, base, 1, tol)?.values[0].min(eigenvalues(pot, primed, 1, tol)?.values[0]);
        if z.re >= e0 {
            return Err(Error::NotBelowSpectrum { z: z.re, lowest: e0 });
        }
    }
    let g = form_gram(pot, z, base, primed, tol)?.matrix();
    let lam = lambda_map(pot, z, base, primed, tol)?;
    let s = [
        (base.theta0 - primed.theta0).sin(),
        (base.theta_r - primed.theta_r).sin(),
    ];
    let active: Vec<usize> = [
        !is_multiple_of_pi(base.theta0 - primed.theta0),
        !is_multiple_of_pi(base.theta_r - primed.theta_r),
    ]
    .iter()
    .enumerate()
    .filter_map(|(i, &a)| a.then_some(i))
    .collect();
    let (l, c) = (lam.entries(), g.entries());
    let at = |m: &[C; 4], i: usize, j: usize| m[2 * i + j];
    let k = active.len();
    let mut a = [[C::new(0.0, 0.0); 2]; 2];
    for (r, &i) in active.iter().enumerate() {
        for (q, &j) in active.iter().enumerate() {
            let mut v: C = active.iter().map(|&m| at(&l, i, m) * at(&c, m, j)).sum();
            v /= s[i];
            a[r][q] = if r == q { 1.0 - v } else { -v };
        }
    }
    Ok(match k {
        0 => C::new(1.0, 0.0),
        1 => a[0][0],
        _ => a[0][0] * a[1][1] - a[0][1] * a[1][0],
    })
}

/// `(sin θ0 sin θR / (sin θ0' sin θR')) det Λ_{base}^{primed}(z)`.
pub fn sym_det_target(
    pot: &Potential,
    z: C,
    base: &BoundaryAngles,
    primed: &BoundaryAngles,
    tol: f64,
) -> Result<C> {
    let f = base.theta0.sin() * base.theta_r.sin() / (primed.theta0.sin() * primed.theta_r.sin());
    Ok(lambda_map(pot, z, base, primed, tol)?.det() * f)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceRow {
    pub n: usize,
    pub value: f64,
    pub error: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceStudy {
    pub target: f64,
    pub rows: Vec<ConvergenceRow>,
    /// Least-squares slope of `-ln(error)` against `ln(n)`; `None` when an
    /// error is at roundoff level.
    pub order: Option<f64>,
}

/// Discrete symmetrized determinants for each `n` against the closed form.
pub fn convergence_study(
    pot: &Potential,
    z: f64,
    base: &BoundaryAngles,
    primed: &BoundaryAngles,
    n_list: &[usize],
    tol: f64,
) -> Result<ConvergenceStudy> {
    if n_list.len() < 3 || n_list.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::Invalid("n list must be ascending with at least 3 entries".into()));
    }
    let target = sym_det_closed_form(pot, C::new(z, 0.0), base, primed, tol)?.re;
    let rows: Vec<ConvergenceRow> = n_list
        .par_iter()
        .map(|&n| {
            let value = sym_det_discrete(&discretize(pot, base, n)?, &discretize(pot, primed, n)?, z)?;
            Ok(ConvergenceRow {
                n,
                value,
                error: (value - target).abs(),
            })
        })
        .collect::<Result<_>>()?;
    let floor = ROUNDOFF_FLOOR * target.abs().max(1.0);
    let order = if rows.iter().all(|r| r.error > floor) {
        let pts: Vec<(f64, f64)> = rows.iter().map(|r| ((r.n as f64).ln(), -r.error.ln())).collect();
        let m = pts.len() as f64;
        let (sx, sy) = pts.iter().fold((0.0, 0.0), |(a, b), p| (a + p.0, b + p.1));
        let (mx, my) = (sx / m, sy / m);
        let num: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
        let den: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
        Some(num / den)
    } else {
        None
    };
    Ok(ConvergenceStudy { target, rows, order })
}

fn spd_sqrt(a: DMatrix<f64>) -> DMatrix<f64> {
    let e = SymmetricEigen::new(a);
    let d = DMatrix::from_diagonal(&e.eigenvalues.map(|v| v.max(0.0).sqrt()));
    &e.eigenvectors * d * e.eigenvectors.transpose()
}

/// Base resolvent as a matrix on the primed node set, zero on nodes the
/// base operator drops.
fn embedded_resolvent(base: &DiscreteHamiltonian, m: usize, z: f64) -> Result<DMatrix<f64>> {
    let shifted = base.dense() - DMatrix::identity(base.dim(), base.dim()) * z;
    let inv = shifted
        .cholesky()
        .ok_or(Error::NotBelowSpectrum {
            z,
            lowest: base.lowest_eigenvalue(),
        })?
        .inverse();
    let idx = embedding(base);
    let mut out = DMatrix::zeros(m, m);
    for (a, &i) in idx.iter().enumerate() {
        for (b, &j) in idx.iter().enumerate() {
            out[(i, j)] = inv[(a, b)];
        }
    }
    Ok(out)
}

/// The `k` smallest singular values of `(H' - z)^{1/2} (H - z)^{-1} (H' - z)^{1/2}`.
pub fn kernel_dimension_probe(
    base: &DiscreteHamiltonian,
    primed: &DiscreteHamiltonian,
    z: f64,
    k: usize,
) -> Result<Vec<f64>> {
    check_pair(base, primed)?;
    primed.check_below(z)?;
    base.check_below(z)?;
    let m = primed.dim();
    let root = spd_sqrt(primed.dense() - DMatrix::identity(m, m) * z);
    let x = &root * embedded_resolvent(base, m, z)? * &root;
    let mut s: Vec<f64> = x.singular_values().iter().copied().collect();
    s.sort_by(f64::total_cmp);
    s.truncate(k);
    Ok(s)
}

/// Singular values of `(H' - z)^{-1} - (H - z)^{-1}` in decreasing order.
pub fn resolvent_difference_singular_values(
    base: &DiscreteHamiltonian,
    primed: &DiscreteHamiltonian,
    z: f64,
) -> Result<Vec<f64>> {
    check_pair(base, primed)?;
    let m = primed.dim();
    let rp = embedded_resolvent(primed, m, z)?;
    let rb = embedded_resolvent(base, m, z)?;
    let mut s: Vec<f64> = (rp - rb).singular_values().iter().copied().collect();
    s.sort_by(|a, b| b.total_cmp(a));
    Ok(s)
}

/// Relative level below which a singular value counts as numerically zero.
pub const ROUNDOFF_FLOOR: f64 = 1e-10;

/// How many of the probe values decay when `n` doubles: a value counts if it
/// shrinks by at least `factor` or already sits at the roundoff floor.
pub fn decaying_count(coarse: &[f64], fine: &[f64], factor: f64) -> usize {
    coarse
        .iter()
        .zip(fine)
        .filter(|&(&c, &f)| f <= ROUNDOFF_FLOOR || f * factor <= c)
        .count()
}
