//! Boundary traces, the characteristic determinant Δ and the boundary data
//! maps Λ between two sets of separated boundary conditions.

use std::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex64 as C;
use serde::{Deserialize, Serialize};

use crate::error::{check_tol, Error, Result};
use crate::ode::{
    is_multiple_of_pi, propagate_fundamental, singular_floor, u_plus_minus, BoundaryAngles,
    FundamentalValues, LogScaled, Potential, SolutionPath,
};

const ZERO: C = C { re: 0.0, im: 0.0 };
const ONE: C = C { re: 1.0, im: 0.0 };

/// Complex 2x2 matrix, row major.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Mat2 {
    pub a11: C,
    pub a12: C,
    pub a21: C,
    pub a22: C,
}

impl Mat2 {
    pub fn new(a11: C, a12: C, a21: C, a22: C) -> Self {
        Self { a11, a12, a21, a22 }
    }

    pub fn from_real(a11: f64, a12: f64, a21: f64, a22: f64) -> Self {
        Self::new(a11.into(), a12.into(), a21.into(), a22.into())
    }

    pub fn identity() -> Self {
        Self::new(ONE, ZERO, ZERO, ONE)
    }

    pub fn zero() -> Self {
        Self::new(ZERO, ZERO, ZERO, ZERO)
    }

    pub fn diag(d1: C, d2: C) -> Self {
        Self::new(d1, ZERO, ZERO, d2)
    }

    pub fn det(&self) -> C {
        self.a11 * self.a22 - self.a12 * self.a21
    }

    pub fn trace(&self) -> C {
        self.a11 + self.a22
    }

    fn row_norms(&self) -> (f64, f64) {
        (
            (self.a11.norm_sqr() + self.a12.norm_sqr()).sqrt(),
            (self.a21.norm_sqr() + self.a22.norm_sqr()).sqrt(),
        )
    }

    /// Singular when `|det| < 1e-12 * (product of row norms)`.
    pub fn is_singular(&self) -> bool {
        let (r1, r2) = self.row_norms();
        self.det().norm() < 1e-12 * r1 * r2 || !self.det().is_finite()
    }

    pub fn inverse(&self) -> Option<Mat2> {
        if self.is_singular() {
            return None;
        }
        let d = self.det();
        Some(Self::new(self.a22 / d, -self.a12 / d, -self.a21 / d, self.a11 / d))
    }

    pub fn adjoint(&self) -> Mat2 {
        Self::new(self.a11.conj(), self.a21.conj(), self.a12.conj(), self.a22.conj())
    }

    pub fn transpose(&self) -> Mat2 {
        Self::new(self.a11, self.a21, self.a12, self.a22)
    }

    pub fn scale(&self, s: C) -> Mat2 {
        Self::new(self.a11 * s, self.a12 * s, self.a21 * s, self.a22 * s)
    }

    /// `(M - M*) / 2i`.
    pub fn im_part(&self) -> Mat2 {
        (*self - self.adjoint()).scale(C::new(0.0, -0.5))
    }

    /// Frobenius norm.
    pub fn norm(&self) -> f64 {
        let (r1, r2) = self.row_norms();
        (r1 * r1 + r2 * r2).sqrt()
    }

    pub fn apply(&self, v: [C; 2]) -> [C; 2] {
        [
            self.a11 * v[0] + self.a12 * v[1],
            self.a21 * v[0] + self.a22 * v[1],
        ]
    }

    pub fn entries(&self) -> [C; 4] {
        [self.a11, self.a12, self.a21, self.a22]
    }

    /// Eigenvalues of the Hermitian part `(M + M*)/2`, ascending.
    pub fn hermitian_eigenvalues(&self) -> [f64; 2] {
        let a = self.a11.re;
        let d = self.a22.re;
        let b = 0.5 * (self.a12 + self.a21.conj());
        let m = 0.5 * (a + d);
        let r = (0.25 * (a - d) * (a - d) + b.norm_sqr()).sqrt();
        [m - r, m + r]
    }
}

impl Add for Mat2 {
    type Output = Mat2;
    fn add(self, o: Mat2) -> Mat2 {
        Mat2::new(self.a11 + o.a11, self.a12 + o.a12, self.a21 + o.a21, self.a22 + o.a22)
    }
}

impl Sub for Mat2 {
    type Output = Mat2;
    fn sub(self, o: Mat2) -> Mat2 {
        Mat2::new(self.a11 - o.a11, self.a12 - o.a12, self.a21 - o.a21, self.a22 - o.a22)
    }
}

impl Neg for Mat2 {
    type Output = Mat2;
    fn neg(self) -> Mat2 {
        self.scale(-ONE)
    }
}

impl Mul for Mat2 {
    type Output = Mat2;
    fn mul(self, o: Mat2) -> Mat2 {
        Mat2::new(
            self.a11 * o.a11 + self.a12 * o.a21,
            self.a11 * o.a12 + self.a12 * o.a22,
            self.a21 * o.a11 + self.a22 * o.a21,
            self.a21 * o.a12 + self.a22 * o.a22,
        )
    }
}

/// The pair `γ(u) = [c0; cR]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundaryVector {
    pub c0: C,
    pub c_r: C,
}

/// Δ(z, R, θ0, θR).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CharDet {
    pub value: LogScaled,
}

/// `[cos θ0 u(0) + sin θ0 u'(0); cos θR u(R) - sin θR u'(R)]`.
pub fn trace_map(angles: &BoundaryAngles, p: &SolutionPath) -> BoundaryVector {
    let (u0, du0) = p.first();
    let (ur, dur) = p.last();
    BoundaryVector {
        c0: angles.trace_left(u0, du0),
        c_r: angles.trace_right(ur, dur),
    }
}

/// `diag(sin δ0, sin δR)`.
pub fn s_matrix(delta0: f64, delta_r: f64) -> Mat2 {
    Mat2::diag(delta0.sin().into(), delta_r.sin().into())
}

fn s_diff(a: &BoundaryAngles, b: &BoundaryAngles) -> Mat2 {
    s_matrix(a.theta0 - b.theta0, a.theta_r - b.theta_r)
}

/// Δ in units of `exp(f.log_scale)` and the norm of the second row of the
/// boundary matrix in the same units (the first row has norm 1).
pub(crate) fn delta_mantissa(f: &FundamentalValues, angles: &BoundaryAngles) -> (C, f64) {
    let [rt, rp] = f.right_row(angles);
    let (s0, c0) = angles.theta0.sin_cos();
    (rp * c0 - rt * s0, (rt.norm_sqr() + rp.norm_sqr()).sqrt())
}

pub fn char_det(pot: &Potential, z: C, angles: &BoundaryAngles, tol: f64) -> Result<CharDet> {
    let f = propagate_fundamental(pot, z, tol)?;
    Ok(char_det_from(&f, angles))
}

pub fn char_det_from(f: &FundamentalValues, angles: &BoundaryAngles) -> CharDet {
    CharDet {
        value: LogScaled::new(delta_mantissa(f, angles).0, f.log_scale),
    }
}

/// Λ_{from}^{to} from one fundamental propagation. The off-diagonal
/// entries use `θφ' - θ'φ = 1` exactly, which avoids cancellation when the
/// solutions grow.
pub fn lambda_from_fundamental(
    f: &FundamentalValues,
    z: C,
    from: &BoundaryAngles,
    to: &BoundaryAngles,
    tol: f64,
) -> Result<Mat2> {
    let (d, row) = delta_mantissa(f, from);
    if d.norm() < singular_floor(tol) * row || !d.is_finite() {
        return Err(Error::AtEigenvalue { z });
    }
    let [rt, rp] = f.right_row(from);
    let [qt, qp] = f.right_row(to);
    let (s0, c0) = from.theta0.sin_cos();
    let (s0p, c0p) = to.theta0.sin_cos();
    let off = |s: f64| C::new(s, 0.0) / d * (-f.log_scale).exp();
    Ok(Mat2::new(
        (rp * c0p - rt * s0p) / d,
        off((to.theta0 - from.theta0).sin()),
        off((to.theta_r - from.theta_r).sin()),
        (qp * c0 - qt * s0) / d,
    ))
}

/// Λ_{from}^{to}(z).
pub fn lambda_map(
    pot: &Potential,
    z: C,
    from: &BoundaryAngles,
    to: &BoundaryAngles,
    tol: f64,
) -> Result<Mat2> {
    let f = propagate_fundamental(pot, z, tol)?;
    lambda_from_fundamental(&f, z, from, to, tol)
}

/// Λ_{from}^{to}(z) assembled from the `(u_+, u_-)` basis of `from`.
pub fn lambda_map_from_u_basis(
    pot: &Potential,
    z: C,
    from: &BoundaryAngles,
    to: &BoundaryAngles,
    tol: f64,
) -> Result<Mat2> {
    let (up, um) = u_plus_minus(pot, z, from, tol)?;
    let (up0, dup0) = up.first();
    let (upr, dupr) = up.last();
    let (um0, dum0) = um.first();
    let (_, dumr) = um.last();
    let (s0, c0) = from.theta0.sin_cos();
    let (sr, cr) = from.theta_r.sin_cos();
    let (s0p, c0p) = to.theta0.sin_cos();
    let (srp, crp) = to.theta_r.sin_cos();
    let den1 = dup0 * s0 + c0;
    let den2 = -dumr * sr + cr;
    debug_assert!((up0 - ONE).norm() < 1e-8);
    Ok(Mat2::new(
        (dup0 * s0p + c0p) / den1,
        (um0 * c0p + dum0 * s0p) / den2,
        (upr * crp - dupr * srp) / den1,
        (-dumr * srp + crp) / den2,
    ))
}

/// `det Λ_{from}^{to}(z)`, which equals `Δ_to / Δ_from`.
pub fn lambda_det(
    pot: &Potential,
    z: C,
    from: &BoundaryAngles,
    to: &BoundaryAngles,
    tol: f64,
) -> Result<C> {
    Ok(lambda_map(pot, z, from, to, tol)?.det())
}

/// Δ_to / Δ_from without forming Λ.
pub fn char_det_ratio(
    pot: &Potential,
    z: C,
    from: &BoundaryAngles,
    to: &BoundaryAngles,
    tol: f64,
) -> Result<C> {
    let f = propagate_fundamental(pot, z, tol)?;
    let (d, row) = delta_mantissa(&f, from);
    if d.norm() < singular_floor(tol) * row {
        return Err(Error::AtEigenvalue { z });
    }
    Ok(delta_mantissa(&f, to).0 / d)
}

/// Λ_{θ}^{θ'} from Λ_{δ}^{δ'} via the linear fractional transformation.
pub fn lft_transfer(
    lambda_ref: &Mat2,
    theta: &BoundaryAngles,
    theta_p: &BoundaryAngles,
    delta: &BoundaryAngles,
    delta_p: &BoundaryAngles,
) -> Result<Mat2> {
    if is_multiple_of_pi(delta_p.theta0 - delta.theta0)
        || is_multiple_of_pi(delta_p.theta_r - delta.theta_r)
    {
        return Err(Error::Invalid(
            "reference angle differences must be nonzero mod π".into(),
        ));
    }
    let sdd = s_diff(delta_p, delta);
    let num = s_diff(delta_p, theta_p) + s_diff(theta_p, delta) * *lambda_ref;
    let den = s_diff(delta_p, theta) + s_diff(theta, delta) * *lambda_ref;
    let den_inv = den.inverse().ok_or(Error::SingularTransfer)?;
    let sdd_inv = sdd.inverse().ok_or(Error::SingularTransfer)?;
    Ok(sdd_inv * num * den_inv * sdd)
}

fn require_herglotz_angles(from: &BoundaryAngles, to: &BoundaryAngles) -> Result<()> {
    if is_multiple_of_pi(to.theta0 - from.theta0) || is_multiple_of_pi(to.theta_r - from.theta_r)
    {
        return Err(Error::Invalid(
            "angle differences must be nonzero mod π".into(),
        ));
    }
    Ok(())
}

/// `Λ_{from}^{to}(z) S_{to - from}`.
pub fn lambda_s(
    pot: &Potential,
    z: C,
    from: &BoundaryAngles,
    to: &BoundaryAngles,
    tol: f64,
) -> Result<Mat2> {
    Ok(lambda_map(pot, z, from, to, tol)? * s_diff(to, from))
}

/// Smallest eigenvalue of `Im(Λ_{from}^{to}(z) S_{to - from})` for `Im z > 0`.
pub fn herglotz_check(
    pot: &Potential,
    z: C,
    from: &BoundaryAngles,
    to: &BoundaryAngles,
    tol: f64,
) -> Result<f64> {
    check_tol(tol)?;
    if !(z.im > 0.0) {
        return Err(Error::Invalid(format!("Im z must be positive, got {z}")));
    }
    if !pot.is_real() {
        return Err(Error::UnsupportedCase("Herglotz check needs a real potential".into()));
    }
    require_herglotz_angles(from, to)?;
    let m = lambda_s(pot, z, from, to, tol)?;
    Ok(m.im_part().hermitian_eigenvalues()[0])
}

/// Leading term of `det Λ_{from}^{to}(z)` as `z → -∞`.
pub fn lambda_asymptotic_leading(from: &BoundaryAngles, to: &BoundaryAngles, z: f64) -> Result<f64> {
    if !(z < 0.0) {
        return Err(Error::Invalid(format!("z must be negative, got {z}")));
    }
    if is_multiple_of_pi(to.theta0) || is_multiple_of_pi(to.theta_r) {
        return Err(Error::UnsupportedCase(
            "target angles must have nonzero sines".into(),
        ));
    }
    let k = (-z).sqrt();
    let top = to.theta0.sin() * to.theta_r.sin();
    let (s0, c0) = from.theta0.sin_cos();
    let (sr, cr) = from.theta_r.sin_cos();
    Ok(match (from.left_is_dirichlet(), from.right_is_dirichlet()) {
        (false, false) => top / (s0 * sr),
        (true, false) => -top * k / (c0.signum() * sr),
        (false, true) => -top * k / (s0 * cr.signum()),
        (true, true) => top * k * k / (c0.signum() * cr.signum()),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI};

    fn c(re: f64) -> C {
        C::new(re, 0.0)
    }

    fn path(f: impl Fn(f64) -> f64, df: impl Fn(f64) -> f64) -> SolutionPath {
        let g: Vec<f64> = (0..=10).map(|i| i as f64 / 10.0).collect();
        SolutionPath::from_fn(g, move |x| c(f(x)), move |x| c(df(x)))
    }

    #[test]
    fn traces_of_linear_function() {
        let p = path(|x| x, |_| 1.0);
        let cases = [
            (BoundaryAngles::dirichlet(), (0.0, 1.0)),
            (BoundaryAngles::neumann(), (1.0, -1.0)),
            (BoundaryAngles::new(PI, PI), (0.0, -1.0)),
        ];
        for (a, (w0, wr)) in cases {
            let b = trace_map(&a, &p);
            assert!((b.c0 - c(w0)).norm() < 1e-15 && (b.c_r - c(wr)).norm() < 1e-15, "{a:?}");
        }
    }

    #[test]
    fn char_det_closed_forms() {
        let v0 = Potential::zero(1.0);
        let d = char_det(&v0, c(-1.0), &BoundaryAngles::dirichlet(), 1e-10).unwrap();
        assert_relative_eq!(d.value.value().re, 1f64.sinh(), max_relative = 1e-9);
        let n = char_det(&v0, c(-9.0), &BoundaryAngles::neumann(), 1e-10).unwrap();
        assert_relative_eq!(n.value.value().re, 3.0 * 3f64.sinh(), max_relative = 1e-9);
        for k in 1..4 {
            let z = c((k as f64 * PI).powi(2));
            let d = char_det(&v0, z, &BoundaryAngles::dirichlet(), 1e-10).unwrap();
            assert!(d.value.value().norm() < 1e-9, "{k}");
        }
    }

    #[test]
    fn dirichlet_to_neumann_at_minus_one() {
        let l = lambda_map(
            &Potential::zero(1.0),
            c(-1.0),
            &BoundaryAngles::dirichlet(),
            &BoundaryAngles::neumann(),
            1e-10,
        )
        .unwrap();
        let coth = 1.0 / 1f64.tanh();
        let csch = 1.0 / 1f64.sinh();
        for (got, want) in l.entries().iter().zip([-coth, csch, csch, -coth]) {
            assert!((got - c(want)).norm() < 1e-9, "{got} vs {want}");
        }
    }

    #[test]
    fn identity_and_triangularity() {
        let p = Potential::cosine(1.0, 1.0, 1.0, 0.0);
        let a = BoundaryAngles::new(0.3, 1.1);
        let l = lambda_map(&p, C::new(-2.0, 1.0), &a, &a, 1e-10).unwrap();
        assert!((l - Mat2::identity()).norm() < 1e-9);
        let b = BoundaryAngles::new(0.3, 2.0);
        let l = lambda_map(&p, c(-2.0), &a, &b, 1e-10).unwrap();
        assert_eq!(l.a12, ZERO);
        let b = BoundaryAngles::new(1.4, 1.1);
        let l = lambda_map(&p, c(-2.0), &a, &b, 1e-10).unwrap();
        assert_eq!(l.a21, ZERO);
    }

    #[test]
    fn determinant_oracles() {
        let v0 = Potential::zero(1.0);
        let d = BoundaryAngles::dirichlet();
        let n = BoundaryAngles::neumann();
        let q = BoundaryAngles::new(FRAC_PI_4, FRAC_PI_4);
        let got = lambda_det(&v0, c(-4.0), &d, &n, 1e-10).unwrap();
        assert!((got - c(4.0)).norm() < 1e-8);
        let got = lambda_det(&v0, c(-9.0), &n, &q, 1e-10).unwrap();
        let s3 = 3f64.sinh();
        let want = ((s3 / 3.0 + 3.0 * s3 - 2.0 * 3f64.cosh()) / 2.0) / (3.0 * s3);
        assert_relative_eq!(got.re, want, max_relative = 1e-8);
        assert_relative_eq!(want, 0.22056554, max_relative = 1e-6);
        let got = lambda_det(&v0, c(-9.0), &q, &q, 1e-10).unwrap();
        assert!((got - ONE).norm() < 1e-12);
    }

    #[test]
    fn eigenvalue_of_source_is_rejected() {
        let e = lambda_map(
            &Potential::zero(1.0),
            c(PI * PI),
            &BoundaryAngles::dirichlet(),
            &BoundaryAngles::neumann(),
            1e-10,
        );
        assert!(matches!(e, Err(Error::AtEigenvalue { .. })));
    }

    #[test]
    fn u_basis_agrees() {
        let p = Potential::cosine(1.0, 2.0, 1.0, 0.3);
        let from = BoundaryAngles::new(0.4, 2.5);
        let to = BoundaryAngles::new(1.7, 0.9);
        for z in [c(-3.0), C::new(5.0, 2.0)] {
            let a = lambda_map(&p, z, &from, &to, 1e-10).unwrap();
            let b = lambda_map_from_u_basis(&p, z, &from, &to, 1e-10).unwrap();
            assert!((a - b).norm() < 1e-7 * a.norm(), "{a:?} {b:?}");
        }
    }

    #[test]
    fn s_matrix_values() {
        assert!((s_matrix(FRAC_PI_2, FRAC_PI_2) - Mat2::identity()).norm() < 1e-15);
        assert_eq!(s_matrix(0.0, 0.0), Mat2::zero());
        let s = s_matrix(FRAC_PI_4, PI / 6.0);
        assert_relative_eq!(s.a11.re, 0.70710678, max_relative = 1e-8);
        assert_relative_eq!(s.a22.re, 0.5, max_relative = 1e-12);
    }

    #[test]
    fn lft_reconstructs_dtn() {
        let v0 = Potential::zero(1.0);
        let z = c(-1.0);
        let d = BoundaryAngles::dirichlet();
        let n = BoundaryAngles::neumann();
        let q = BoundaryAngles::new(FRAC_PI_4, FRAC_PI_4);
        let q3 = BoundaryAngles::new(3.0 * FRAC_PI_4, 3.0 * FRAC_PI_4);
        let reference = lambda_map(&v0, z, &q, &q3, 1e-10).unwrap();
        let got = lft_transfer(&reference, &d, &n, &q, &q3).unwrap();
        let want = lambda_map(&v0, z, &d, &n, 1e-10).unwrap();
        assert!((got - want).norm() < 1e-8, "{got:?}");
        let same = lft_transfer(&reference, &q, &q3, &q, &q3).unwrap();
        assert!((same - reference).norm() < 1e-12);
    }

    #[test]
    fn herglotz_positive_in_upper_half_plane() {
        let v0 = Potential::zero(1.0);
        let d = BoundaryAngles::dirichlet();
        let n = BoundaryAngles::neumann();
        for z in [C::new(0.0, 1.0), C::new(0.0, 2.0)] {
            assert!(herglotz_check(&v0, z, &d, &n, 1e-10).unwrap() > 0.0);
        }
        assert!(herglotz_check(&v0, C::new(0.0, -1.0), &d, &n, 1e-10).is_err());
    }

    #[test]
    fn asymptotic_leading_cases() {
        let d = BoundaryAngles::dirichlet();
        let n = BoundaryAngles::neumann();
        let mixed = BoundaryAngles::new(0.0, FRAC_PI_2);
        assert_relative_eq!(lambda_asymptotic_leading(&d, &n, -100.0).unwrap(), 100.0);
        assert_relative_eq!(lambda_asymptotic_leading(&n, &n, -100.0).unwrap(), 1.0);
        assert_relative_eq!(lambda_asymptotic_leading(&mixed, &n, -100.0).unwrap(), -10.0);
        assert!(matches!(
            lambda_asymptotic_leading(&n, &d, -100.0),
            Err(Error::UnsupportedCase(_))
        ));
    }

    #[test]
    fn mat2_algebra() {
        let a = Mat2::new(C::new(1.0, 2.0), c(3.0), C::new(0.0, -1.0), c(4.0));
        let inv = a.inverse().unwrap();
        assert!((a * inv - Mat2::identity()).norm() < 1e-14);
        assert!(Mat2::from_real(1.0, 2.0, 2.0, 4.0).inverse().is_none());
        let h = Mat2::new(c(2.0), C::new(0.0, 1.0), C::new(0.0, -1.0), c(2.0));
        let [lo, hi] = h.hermitian_eigenvalues();
        assert_relative_eq!(lo, 1.0);
        assert_relative_eq!(hi, 3.0);
    }
}
