//! Finite-dimensional positive-type operators: resolvent diagnostics,
//! negative fractional powers by quadrature, symmetrized determinants and the
//! log-derivative trace formula.

use std::f64::consts::PI;
use std::num::NonZeroUsize;

use gauss_quad::legendre::GaussLegendre;
use nalgebra::DMatrix;
use num_complex::Complex64 as C;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type DenseMatrix = DMatrix<C>;

/// Relative size below which an eigenvalue counts as lying on the real axis.
const AXIS_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PositiveTypeDiagnostics {
    pub neg_axis_in_resolvent: bool,
    /// Sampled `sup_{t ≥ 0} (1 + t) ‖(A + t)^{-1}‖`, including the `t → ∞` limit 1.
    pub m_a_estimate: f64,
    /// Sampled `sup_{t > 0} t ‖(A + t)^{-1}‖`.
    pub m_estimate: f64,
    /// Largest `|arg λ|` over the spectrum.
    pub sector_angle_estimate: f64,
    /// Smallest `t0 ≥ 0` moving the spectrum into the closed right half-plane.
    pub shift_t0: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuadConfig {
    pub tol: f64,
    /// Gauss-Legendre points per panel.
    pub degree: usize,
    pub max_doublings: usize,
}

impl Default for QuadConfig {
    fn default() -> Self {
        Self {
            tol: 1e-13,
            degree: 16,
            max_doublings: 8,
        }
    }
}

fn check_square(a: &DenseMatrix) -> Result<()> {
    if a.nrows() == 0 || a.nrows() != a.ncols() {
        return Err(Error::Invalid(format!("matrix must be square, got {}x{}", a.nrows(), a.ncols())));
    }
    if a.iter().any(|v| !v.re.is_finite() || !v.im.is_finite()) {
        return Err(Error::Invalid("matrix has non-finite entries".into()));
    }
    Ok(())
}

pub fn op_norm(a: &DenseMatrix) -> f64 {
    a.clone().singular_values().max()
}

pub fn eigenvalues(a: &DenseMatrix) -> Result<Vec<C>> {
    check_square(a)?;
    let e = a
        .clone()
        .schur()
        .eigenvalues()
        .ok_or_else(|| Error::Invalid("Schur form did not triangularize".into()))?;
    Ok(e.iter().copied().collect())
}

/// Eigenvalues, rejecting matrices with spectrum on `(-∞, 0]`.
fn positive_type_spectrum(a: &DenseMatrix) -> Result<Vec<C>> {
    let ev = eigenvalues(a)?;
    let scale = ev.iter().map(|l| l.norm()).fold(1.0, f64::max);
    if let Some(l) = ev.iter().find(|l| l.re <= AXIS_TOL * scale && l.im.abs() <= AXIS_TOL * scale) {
        return Err(Error::NotPositiveType(format!("eigenvalue {l} on (-inf, 0]")));
    }
    Ok(ev)
}

fn inverse(a: &DenseMatrix) -> Result<DenseMatrix> {
    a.clone().lu().try_inverse().ok_or(Error::SingularDeterminant)
}

fn shifted(a: &DenseMatrix, t: C) -> DenseMatrix {
    let mut b = a.clone();
    for i in 0..b.nrows() {
        b[(i, i)] += t;
    }
    b
}

/// `0` followed by 200 log-spaced points from `1e-6` to `100 ρ(A)`.
pub fn default_t_grid(a: &DenseMatrix) -> Result<Vec<f64>> {
    let rho = eigenvalues(a)?.iter().map(|l| l.norm()).fold(1.0, f64::max);
    let (lo, hi) = (1e-6f64.ln(), (100.0 * rho).ln());
    let m = 200;
    Ok(std::iter::once(0.0)
        .chain((0..m).map(|i| (lo + (hi - lo) * i as f64 / (m - 1) as f64).exp()))
        .collect())
}

pub fn positive_type_diagnostics(a: &DenseMatrix, t_grid: &[f64]) -> Result<PositiveTypeDiagnostics> {
    let ev = positive_type_spectrum(a)?;
    let rho = ev.iter().map(|l| l.norm()).fold(0.0, f64::max);
    if t_grid.iter().any(|t| !(t.is_finite() && *t >= 0.0)) {
        return Err(Error::Invalid("t grid must be finite and nonnegative".into()));
    }
    let top = t_grid.iter().copied().fold(0.0, f64::max);
    if top < 10.0 * rho {
        return Err(Error::Invalid(format!("t grid ends at {top}, below 10 ρ(A) = {}", 10.0 * rho)));
    }
    let mut m_a = 1.0f64;
    let mut m = 0.0f64;
    for &t in t_grid {
        let r = op_norm(&inverse(&shifted(a, C::new(t, 0.0)))?);
        m_a = m_a.max((1.0 + t) * r);
        m = m.max(t * r);
    }
    Ok(PositiveTypeDiagnostics {
        neg_axis_in_resolvent: true,
        m_a_estimate: m_a,
        m_estimate: m,
        sector_angle_estimate: ev.iter().map(|l| l.arg().abs()).fold(0.0, f64::max),
        shift_t0: ev.iter().map(|l| -l.re).fold(0.0, f64::max),
    })
}

/// `sin(π w) / (π w)`.
fn sinc(w: C) -> C {
    if w.norm() < 1e-8 {
        1.0 - (PI * w).powi(2) / 6.0
    } else {
        (PI * w).sin() / (PI * w)
    }
}

/// `A^{-α}` for `0 < Re α < 2`. Uses `(sin πα / π) ∫ t^{-α} (A + t)^{-1} dt`
/// below `Re α = 1` and `(sin πα / (π (1 - α))) ∫ t^{1-α} (A + t)^{-2} dt`
/// above, both in the variable `s = ln t` on Gauss-Legendre panels split at
/// `ln ρ(A)` and doubled until successive results agree.
pub fn frac_power_neg(a: &DenseMatrix, alpha: C, quad: &QuadConfig) -> Result<DenseMatrix> {
    let ev = positive_type_spectrum(a)?;
    if !(alpha.re > 0.0 && alpha.re < 2.0) {
        return Err(Error::Invalid(format!("need 0 < Re α < 2, got {alpha}")));
    }
    let k: i32 = if alpha.re < 1.0 { 1 } else { 2 };
    let prefactor = if k == 1 {
        (PI * alpha).sin() / PI
    } else {
        sinc(1.0 - alpha)
    };
    let ar = alpha.re;
    let eps = 1e-2 * quad.tol;
    let inv_norm = op_norm(&inverse(a)?);
    let norm = op_norm(a);
    let kf = k as f64;
    // tails: ‖f(s)‖ ≤ t^{k-a} ‖A^{-1}‖^k near 0 and ≤ 2^k t^{-a} beyond 2‖A‖
    let t_lo = (eps * (kf - ar) / inv_norm.powi(k)).powf(1.0 / (kf - ar)).min(1e-3 / inv_norm.max(1e-300));
    let t_hi = (2.0 * norm).max((2f64.powi(k) / (ar * eps)).powf(1.0 / ar));
    let rho = ev.iter().map(|l| l.norm()).fold(0.0, f64::max);
    let s_mid = rho.ln().clamp(t_lo.ln(), t_hi.ln());
    let (s_lo, s_hi) = (t_lo.ln(), t_hi.ln());

    let gl = GaussLegendre::new(NonZeroUsize::new(quad.degree.max(2)).unwrap());
    let rule = gl.as_node_weight_pairs();
    let f = |s: f64| -> Result<DenseMatrix> {
        let t = s.exp();
        let r = inverse(&shifted(a, C::new(t, 0.0)))?;
        let r = if k == 2 { &r * &r } else { r };
        Ok(r * ((kf - alpha) * s).exp())
    };
    let integrate = |lo: f64, hi: f64, panels: usize| -> Result<DenseMatrix> {
        let w = (hi - lo) / panels as f64;
        let mut acc = DenseMatrix::zeros(a.nrows(), a.ncols());
        for p in 0..panels {
            let (pa, pb) = (lo + p as f64 * w, lo + (p + 1) as f64 * w);
            for &(x, wt) in rule {
                acc += f(0.5 * (pb - pa) * x + 0.5 * (pb + pa))? * C::new(0.5 * (pb - pa) * wt, 0.0);
            }
        }
        Ok(acc)
    };
    let n_lo = ((s_mid - s_lo) / 2.0).ceil().max(1.0) as usize;
    let n_hi = ((s_hi - s_mid) / 2.0).ceil().max(1.0) as usize;
    let total = |mult: usize| -> Result<DenseMatrix> {
        Ok((integrate(s_lo, s_mid, n_lo * mult)? + integrate(s_mid, s_hi, n_hi * mult)?) * prefactor)
    };
    let mut prev = total(1)?;
    let mut change = f64::INFINITY;
    for d in 1..=quad.max_doublings {
        let next = total(1 << d)?;
        change = (&next - &prev).norm();
        prev = next;
        if change <= quad.tol * prev.norm().max(1.0) {
            return Ok(prev);
        }
    }
    Err(Error::QuadratureNotConverged { change })
}

/// `A^{1/2} = A · A^{-1/2}`.
pub fn sqrt_op(a: &DenseMatrix) -> Result<DenseMatrix> {
    Ok(a * frac_power_neg(a, C::new(0.5, 0.0), &QuadConfig::default())?)
}

/// `A^α` through the eigendecomposition of a Hermitian positive definite `A`.
pub fn spectral_oracle_power(a: &DenseMatrix, alpha: C) -> Result<DenseMatrix> {
    check_square(a)?;
    let scale = a.norm().max(1e-300);
    if (a - a.adjoint()).norm() > 1e-12 * scale {
        return Err(Error::NotPD);
    }
    let e = a.clone().symmetric_eigen();
    if e.eigenvalues.iter().any(|&l| l <= 0.0) {
        return Err(Error::NotPD);
    }
    let d = DenseMatrix::from_diagonal(&e.eigenvalues.map(|l| C::new(l, 0.0).powc(alpha)));
    Ok(&e.eigenvectors * d * e.eigenvectors.adjoint())
}

/// `det((A - z)^{1/2} (A0 - z)^{-1} (A - z)^{1/2})` for real `z` left of both spectra.
pub fn sym_det_matrix(a: &DenseMatrix, a0: &DenseMatrix, z: f64) -> Result<C> {
    check_square(a)?;
    check_square(a0)?;
    if a.shape() != a0.shape() {
        return Err(Error::Invalid("A and A0 differ in dimension".into()));
    }
    let zc = C::new(z, 0.0);
    let root = sqrt_op(&shifted(a, -zc))?;
    let mid = inverse(&shifted(a0, -zc))?;
    positive_type_spectrum(&shifted(a0, -zc))?;
    Ok((&root * mid * &root).determinant())
}

/// `-d/dz ln det(...)` by central difference and `tr((A - z)^{-1} - (A0 - z)^{-1})`.
pub fn trace_formula_sides(a: &DenseMatrix, a0: &DenseMatrix, z: f64, h: f64) -> Result<(f64, f64)> {
    if !(h > 0.0) {
        return Err(Error::Invalid("step must be positive".into()));
    }
    let ln = |z: f64| -> Result<C> {
        let d = sym_det_matrix(a, a0, z)?;
        if d.norm() < 1e-300 || !d.norm().is_finite() {
            Err(Error::SingularDeterminant)
        } else {
            Ok(d.ln())
        }
    };
    let lhs = -(ln(z + h)? - ln(z - h)?) / (2.0 * h);
    let zc = C::new(z, 0.0);
    let rhs = (inverse(&shifted(a, -zc))? - inverse(&shifted(a0, -zc))?).trace();
    Ok((lhs.re, rhs.re))
}

pub fn trace_formula_residual(a: &DenseMatrix, a0: &DenseMatrix, z: f64, h: f64) -> Result<f64> {
    let (l, r) = trace_formula_sides(a, a0, z, h)?;
    Ok((l - r).abs())
}

/// `‖A^{-α₁} A^{-α₂} - A^{-(α₁+α₂)}‖`.
pub fn semigroup_check(a: &DenseMatrix, alpha1: C, alpha2: C) -> Result<f64> {
    let q = QuadConfig::default();
    let p = frac_power_neg(a, alpha1, &q)? * frac_power_neg(a, alpha2, &q)?;
    Ok(op_norm(&(p - frac_power_neg(a, alpha1 + alpha2, &q)?)))
}

/// Hermitian matrix with eigenvalues drawn from `[lo, hi]`.
pub fn random_hermitian_pd<R: Rng>(dim: usize, lo: f64, hi: f64, rng: &mut R) -> DenseMatrix {
    let g = DenseMatrix::from_fn(dim, dim, |_, _| C::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)));
    let q = g.qr().q();
    let d = DenseMatrix::from_diagonal(&nalgebra::DVector::from_fn(dim, |_, _| C::new(rng.gen_range(lo..hi), 0.0)));
    let a = &q * d * q.adjoint();
    (&a + a.adjoint()) * C::new(0.5, 0.0)
}

/// `c I + N` with `‖N‖ ≤ c / 2`, so the spectrum sits in a disc in the right half-plane.
pub fn random_positive_type<R: Rng>(dim: usize, rng: &mut R) -> DenseMatrix {
    let n = DenseMatrix::from_fn(dim, dim, |_, _| C::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)));
    let c = rng.gen_range(1.0..4.0);
    let n = &n * C::new(0.5 * c / op_norm(&n), 0.0);
    shifted(&n, C::new(c, 0.0))
}
