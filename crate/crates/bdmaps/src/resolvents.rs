//! Green's function, resolvent application, boundary rows of the resolvent
//! and Krein-type resolvent formulas. Real V and real angles throughout, so
//! the adjoint objects reduce to non-conjugated kernels at the same z.

use num_complex::Complex64 as C;
use serde::{Deserialize, Serialize};

use crate::boundary_maps::{char_det_ratio, lambda_map, s_matrix, BoundaryVector, Mat2};
use crate::error::{Error, Result};
use crate::ode::quad::{cumulative, integrate};
use crate::ode::{
    boundary_pair, default_grid, is_multiple_of_pi, BoundaryAngles, Potential,
    SolutionPath,
};

fn require_real(pot: &Potential) -> Result<()> {
    if pot.is_real() {
        Ok(())
    } else {
        Err(Error::UnsupportedCase("resolvent formulas need a real potential".into()))
    }
}

/// ψ_L, ψ_R on a grid with their Wronskian, all as mantissas sharing one
/// log scale so that every product below is scale free.
struct Pair {
    grid: Vec<f64>,
    breaks: Vec<f64>,
    psi_l: Vec<C>,
    dpsi_l: Vec<C>,
    psi_r: Vec<C>,
    dpsi_r: Vec<C>,
    /// `W(ψ_R, ψ_L)`.
    w: C,
}

impl Pair {
    fn new(pot: &Potential, z: C, angles: &BoundaryAngles, grid: &[f64], tol: f64) -> Result<Self> {
        require_real(pot)?;
        let (r, l, w) = boundary_pair(pot, z, angles, grid, tol)?;
        Ok(Self {
            grid: grid.to_vec(),
            breaks: pot.breakpoints().to_vec(),
            psi_l: l.u,
            dpsi_l: l.u_prime,
            psi_r: r.u,
            dpsi_r: r.u_prime,
            w,
        })
    }

    fn last(&self) -> usize {
        self.grid.len() - 1
    }

    /// `(∫_0^x ψ_L f, ∫_x^R ψ_R f)` at every node.
    fn partial_integrals(&self, f: &[C]) -> (Vec<C>, Vec<C>) {
        let yl: Vec<C> = self.psi_l.iter().zip(f).map(|(a, b)| a * b).collect();
        let yr: Vec<C> = self.psi_r.iter().zip(f).map(|(a, b)| a * b).collect();
        let a = cumulative(&self.grid, &yl, &self.breaks);
        let b = cumulative(&self.grid, &yr, &self.breaks);
        let total = b[self.last()];
        (a, b.iter().map(|v| total - v).collect())
    }

    /// Prefactor of the first row: `-u_-(0)/sin θ0`, or `u_-'(0)/cos θ0`
    /// when θ0 is Dirichlet.
    fn left_factor(&self, angles: &BoundaryAngles, sin_branch: bool) -> C {
        if sin_branch {
            -self.psi_l[0] / angles.theta0.sin()
        } else {
            self.dpsi_l[0] / angles.theta0.cos()
        }
    }

    /// Prefactor of the second row: `u_+(R)/sin θR`, or `u_+'(R)/cos θR`.
    fn right_factor(&self, angles: &BoundaryAngles, sin_branch: bool) -> C {
        let n = self.last();
        if sin_branch {
            self.psi_r[n] / angles.theta_r.sin()
        } else {
            self.dpsi_r[n] / angles.theta_r.cos()
        }
    }

    /// Kernels `r_1, r_2` of `γ_{primed}(H - z)^{-1}`: the row acts as
    /// `f ↦ ∫ r_k f`.
    fn row_kernels(&self, base: &BoundaryAngles, primed: &BoundaryAngles) -> [Vec<C>; 2] {
        let c1 = (primed.theta0 - base.theta0).sin() * self.left_factor(base, !base.left_is_dirichlet())
            / self.w;
        let c2 = -(primed.theta_r - base.theta_r).sin()
            * self.right_factor(base, !base.right_is_dirichlet())
            / self.w;
        [
            self.psi_r.iter().map(|v| v * c1).collect(),
            self.psi_l.iter().map(|v| v * c2).collect(),
        ]
    }
}

/// `G(z, x, x') = u_-(x_<) u_+(x_>) / W(u_+, u_-)`.
pub fn greens_kernel(
    pot: &Potential,
    z: C,
    angles: &BoundaryAngles,
    x: f64,
    x_prime: f64,
    tol: f64,
) -> Result<C> {
    let r = pot.r();
    if !(0.0..=r).contains(&x) || !(0.0..=r).contains(&x_prime) {
        return Err(Error::Invalid(format!("points must lie in [0, {r}]")));
    }
    let (lo, hi) = if x <= x_prime { (x, x_prime) } else { (x_prime, x) };
    let mut grid = vec![0.0, lo, hi, r];
    grid.dedup();
    let p = Pair::new(pot, z, angles, &grid, tol)?;
    let i = grid.iter().position(|&t| t == lo).unwrap();
    let j = grid.iter().position(|&t| t == hi).unwrap();
    Ok(p.psi_l[i] * p.psi_r[j] / p.w)
}

fn sample(grid: &[f64], f: &dyn Fn(f64) -> C) -> Vec<C> {
    grid.iter().map(|&x| f(x)).collect()
}

fn resolvent_from(p: &Pair, fv: &[C]) -> SolutionPath {
    let (a, b) = p.partial_integrals(fv);
    let u = (0..p.grid.len())
        .map(|i| (p.psi_r[i] * a[i] + p.psi_l[i] * b[i]) / p.w)
        .collect();
    let u_prime = (0..p.grid.len())
        .map(|i| (p.dpsi_r[i] * a[i] + p.dpsi_l[i] * b[i]) / p.w)
        .collect();
    SolutionPath {
        grid: p.grid.clone(),
        u,
        u_prime,
        log_scale: 0.0,
        breaks: p.breaks.clone(),
    }
}

/// `(H - z)^{-1} f` on the default grid for `z`.
pub fn apply_resolvent(
    pot: &Potential,
    z: C,
    angles: &BoundaryAngles,
    f: &dyn Fn(f64) -> C,
    tol: f64,
) -> Result<SolutionPath> {
    apply_resolvent_on(pot, z, angles, f, &default_grid(pot, z), tol)
}

/// `(H - z)^{-1} f` sampled on `grid` (which must run from 0 to R).
pub fn apply_resolvent_on(
    pot: &Potential,
    z: C,
    angles: &BoundaryAngles,
    f: &dyn Fn(f64) -> C,
    grid: &[f64],
    tol: f64,
) -> Result<SolutionPath> {
    let p = Pair::new(pot, z, angles, grid, tol)?;
    Ok(resolvent_from(&p, &sample(grid, f)))
}

/// `γ_{primed}(H_base - z)^{-1} f` from the closed row formulas. The
/// sin-branch prefactor is used unless the base angle is Dirichlet.
pub fn boundary_rows(
    pot: &Potential,
    z: C,
    base: &BoundaryAngles,
    primed: &BoundaryAngles,
    f: &dyn Fn(f64) -> C,
    tol: f64,
) -> Result<BoundaryVector> {
    let grid = default_grid(pot, z);
    let p = Pair::new(pot, z, base, &grid, tol)?;
    Ok(rows_from(&p, base, primed, &sample(&grid, f)))
}

fn rows_from(p: &Pair, base: &BoundaryAngles, primed: &BoundaryAngles, fv: &[C]) -> BoundaryVector {
    let [r1, r2] = p.row_kernels(base, primed);
    let dot = |r: &[C]| {
        let y: Vec<C> = r.iter().zip(fv).map(|(a, b)| a * b).collect();
        integrate(&p.grid, &y, &p.breaks)
    };
    BoundaryVector {
        c0: dot(&r1),
        c_r: dot(&r2),
    }
}

/// Both prefactor branches of the first and second rows, for angles where
/// both are defined: `[(sin, cos) for row 1, (sin, cos) for row 2]`.
pub fn row_branches(
    pot: &Potential,
    z: C,
    base: &BoundaryAngles,
    tol: f64,
) -> Result<[(C, C); 2]> {
    let grid = [0.0, pot.r()];
    let p = Pair::new(pot, z, base, &grid, tol)?;
    Ok([
        (p.left_factor(base, true), p.left_factor(base, false)),
        (p.right_factor(base, true), p.right_factor(base, false)),
    ])
}

/// Which of the Krein formulas applies.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum KreinRegime {
    /// Both angles differ: full 2x2 correction.
    BothDiffer,
    /// Only θ0 differs: correction through `P_1`.
    LeftOnly,
    /// Only θR differs: correction through `P_2`.
    RightOnly,
    /// Same operator, no correction.
    Same,
}

pub fn krein_regime(base: &BoundaryAngles, primed: &BoundaryAngles) -> KreinRegime {
    let same0 = is_multiple_of_pi(primed.theta0 - base.theta0);
    let same_r = is_multiple_of_pi(primed.theta_r - base.theta_r);
    match (same0, same_r) {
        (false, false) => KreinRegime::BothDiffer,
        (false, true) => KreinRegime::LeftOnly,
        (true, false) => KreinRegime::RightOnly,
        (true, true) => KreinRegime::Same,
    }
}

/// `S^{-1} Λ^{-1}` restricted according to the regime, as the 2x2 matrix
/// sandwiched between the row kernels.
fn middle(pot: &Potential, z: C, base: &BoundaryAngles, primed: &BoundaryAngles, tol: f64) -> Result<Mat2> {
    let regime = krein_regime(base, primed);
    if regime == KreinRegime::Same {
        return Ok(Mat2::zero());
    }
    // fails with AtEigenvalue when z is in the primed spectrum
    char_det_ratio(pot, z, primed, base, tol)?;
    let lam = lambda_map(pot, z, base, primed, tol)?;
    let zero = C::new(0.0, 0.0);
    Ok(match regime {
        KreinRegime::BothDiffer => {
            let inv = lam.inverse().ok_or(Error::SingularLambda { z })?;
            let s = s_matrix(primed.theta0 - base.theta0, primed.theta_r - base.theta_r);
            let s_inv = s.inverse().ok_or(Error::SingularTransfer)?;
            s_inv * inv
        }
        KreinRegime::RightOnly => {
            if lam.a22.norm() == 0.0 {
                return Err(Error::SingularLambda { z });
            }
            let m = lam.a22.inv() / (primed.theta_r - base.theta_r).sin();
            Mat2::new(zero, zero, zero, m)
        }
        KreinRegime::LeftOnly => {
            if lam.a11.norm() == 0.0 {
                return Err(Error::SingularLambda { z });
            }
            let m = lam.a11.inv() / (primed.theta0 - base.theta0).sin();
            Mat2::new(m, zero, zero, zero)
        }
        KreinRegime::Same => unreachable!(),
    })
}

/// `(H_primed - z)^{-1} f` as the base resolvent plus the rank ≤ 2 Krein
/// correction, on the default grid for `z`.
pub fn krein_resolvent(
    pot: &Potential,
    z: C,
    base: &BoundaryAngles,
    primed: &BoundaryAngles,
    f: &dyn Fn(f64) -> C,
    tol: f64,
) -> Result<SolutionPath> {
    let grid = default_grid(pot, z);
    let p = Pair::new(pot, z, base, &grid, tol)?;
    let fv = sample(&grid, f);
    let mut out = resolvent_from(&p, &fv);
    let m = middle(pot, z, base, primed, tol)?;
    let b = rows_from(&p, base, primed, &fv);
    let coef = m.apply([b.c0, b.c_r]);
    // the adjoint row kernels at z̄ conjugate back to r_k(z, ·)
    let [r1, r2] = p.row_kernels(base, primed);
    let n = grid.len() - 1;
    let (d1, d2) = kernel_derivatives(&p, base, primed);
    for i in 0..=n {
        out.u[i] -= r1[i] * coef[0] + r2[i] * coef[1];
        out.u_prime[i] -= d1[i] * coef[0] + d2[i] * coef[1];
    }
    Ok(out)
}

fn kernel_derivatives(p: &Pair, base: &BoundaryAngles, primed: &BoundaryAngles) -> (Vec<C>, Vec<C>) {
    let c1 = (primed.theta0 - base.theta0).sin() * p.left_factor(base, !base.left_is_dirichlet()) / p.w;
    let c2 = -(primed.theta_r - base.theta_r).sin() * p.right_factor(base, !base.right_is_dirichlet())
        / p.w;
    (
        p.dpsi_r.iter().map(|v| v * c1).collect(),
        p.dpsi_l.iter().map(|v| v * c2).collect(),
    )
}

/// `M_jk = ∫ r_j r_k`: the boundary rows applied to the representatives of
/// the adjoint rows.
fn row_gram(p: &Pair, base: &BoundaryAngles, primed: &BoundaryAngles) -> Mat2 {
    let r = p.row_kernels(base, primed);
    let dot = |a: &[C], b: &[C]| {
        let y: Vec<C> = a.iter().zip(b).map(|(x, y)| x * y).collect();
        integrate(&p.grid, &y, &p.breaks)
    };
    Mat2::new(dot(&r[0], &r[0]), dot(&r[0], &r[1]), dot(&r[1], &r[0]), dot(&r[1], &r[1]))
}

/// Max-entry residual of `d/dz (Λ S) = γ'(H - z)^{-1} [γ'(H - z̄)^{-1}]^*`,
/// the left side by a central difference with step `h`.
pub fn lambda_derivative_identity(
    pot: &Potential,
    z: C,
    base: &BoundaryAngles,
    primed: &BoundaryAngles,
    h: f64,
    tol: f64,
) -> Result<f64> {
    require_real(pot)?;
    if !(h > 0.0) {
        return Err(Error::Invalid(format!("step must be positive, got {h}")));
    }
    let s = s_matrix(primed.theta0 - base.theta0, primed.theta_r - base.theta_r);
    let ls = |w: C| -> Result<Mat2> { Ok(lambda_map(pot, w, base, primed, tol)? * s) };
    let lhs = (ls(z + h)? - ls(z - h)?).scale(C::new(0.5 / h, 0.0));
    let grid = default_grid(pot, z);
    let p = Pair::new(pot, z, base, &grid, tol)?;
    let rhs = row_gram(&p, base, primed);
    Ok((lhs - rhs)
        .entries()
        .iter()
        .fold(0.0, |m: f64, v| m.max(v.norm())))
}

/// Trace of the rank ≤ 2 correction kernel,
/// `tr((H_primed - z)^{-1} - (H_base - z)^{-1}) = -tr(S^{-1} Λ^{-1} M)`.
pub fn krein_correction_trace(
    pot: &Potential,
    z: C,
    base: &BoundaryAngles,
    primed: &BoundaryAngles,
    tol: f64,
) -> Result<C> {
    let grid = default_grid(pot, z);
    let p = Pair::new(pot, z, base, &grid, tol)?;
    let m = middle(pot, z, base, primed, tol)?;
    Ok(-(m * row_gram(&p, base, primed)).trace())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::boundary_maps::trace_map;
    use std::f64::consts::{FRAC_PI_2, PI};

    const TOL: f64 = 1e-10;

    fn c(re: f64) -> C {
        C::new(re, 0.0)
    }

    #[test]
    fn greens_closed_forms() {
        let v0 = Potential::zero(1.0);
        let d = BoundaryAngles::dirichlet();
        let g = greens_kernel(&v0, c(0.0), &d, 0.75, 0.25, TOL).unwrap();
        assert!((g - 0.0625).norm() < 1e-12, "{g}");
        let g = greens_kernel(&v0, c(-1.0), &d, 0.75, 0.25, TOL).unwrap();
        let want = 0.25f64.sinh().powi(2) / 1f64.sinh();
        assert!((g - want).norm() < 1e-10, "{g} vs {want}");
        let g2 = greens_kernel(&v0, c(-1.0), &d, 0.25, 0.75, TOL).unwrap();
        assert_eq!(g, g2);
        let g = greens_kernel(&v0, c(0.0), &d, 0.5, 0.5, TOL).unwrap();
        assert!((g - 0.25).norm() < 1e-12);
    }

    #[test]
    fn resolvent_closed_forms() {
        let v0 = Potential::zero(1.0);
        let d = BoundaryAngles::dirichlet();
        let u = apply_resolvent(&v0, c(0.0), &d, &|_| c(1.0), TOL).unwrap();
        for (i, &x) in u.grid.iter().enumerate() {
            assert!((u.u[i] - x * (1.0 - x) / 2.0).norm() < 1e-10);
            assert!((u.u_prime[i] - (0.5 - x)).norm() < 1e-10);
        }
        let u = apply_resolvent(&v0, c(-1.0), &d, &|x| c((PI * x).sin()), TOL).unwrap();
        for (i, &x) in u.grid.iter().enumerate() {
            assert!((u.u[i] - (PI * x).sin() / (PI * PI + 1.0)).norm() < 1e-10);
        }
        let a = BoundaryAngles::new(0.7, 2.0);
        let pot = Potential::cosine(1.0, 1.0, 2.0, 0.0);
        let u = apply_resolvent(&pot, C::new(3.0, 2.0), &a, &|x| c(x), TOL).unwrap();
        let t = trace_map(&a, &u);
        assert!(t.c0.norm() < 1e-9 && t.c_r.norm() < 1e-9, "{t:?}");
    }

    #[test]
    fn defect_by_second_differences() {
        let pot = Potential::cosine(1.0, 1.5, 2.0, 0.0);
        let a = BoundaryAngles::new(0.6, 2.2);
        let z = C::new(-4.0, 1.0);
        let defect = |n: usize| {
            let grid = crate::ode::grid_with(&pot, n);
            let u = apply_resolvent_on(&pot, z, &a, &|x| c(x), &grid, TOL).unwrap();
            let h = 1.0 / n as f64;
            (1..n)
                .map(|i| {
                    let d2 = (u.u[i + 1] - 2.0 * u.u[i] + u.u[i - 1]) / (h * h);
                    let x = grid[i];
                    (-d2 + (pot.eval(x) - z) * u.u[i] - x).norm()
                })
                .fold(0.0, f64::max)
        };
        let (d1, d2) = (defect(200), defect(400));
        assert!(d2 < 1e-4, "{d2}");
        assert!(d1 / d2 > 3.5, "{d1} {d2}");
    }

    #[test]
    fn rows_closed_forms() {
        let v0 = Potential::zero(1.0);
        let d = BoundaryAngles::dirichlet();
        let n = BoundaryAngles::new(FRAC_PI_2, FRAC_PI_2);
        let b = boundary_rows(&v0, c(0.0), &d, &n, &|_| c(1.0), TOL).unwrap();
        assert!((b.c0 - 0.5).norm() < 1e-10 && (b.c_r - 0.5).norm() < 1e-10, "{b:?}");
        let b = boundary_rows(&v0, c(0.0), &d, &d, &|_| c(1.0), TOL).unwrap();
        assert!(b.c0.norm() < 1e-14 && b.c_r.norm() < 1e-14);
    }

    #[test]
    fn branches_agree() {
        let pot = Potential::cosine(1.0, 2.0, 1.0, 0.3);
        let [(a, b), (c_, d)] = row_branches(&pot, C::new(-2.0, 1.0), &BoundaryAngles::new(0.8, 2.3), TOL)
            .unwrap();
        assert!((a - b).norm() < 1e-9 * a.norm());
        assert!((c_ - d).norm() < 1e-9 * c_.norm());
    }

    #[test]
    fn krein_dirichlet_to_neumann() {
        // -u'' + u = 1 with u'(0) = u'(1) = 0 has u ≡ 1
        let v0 = Potential::zero(1.0);
        let u = krein_resolvent(
            &v0,
            c(-1.0),
            &BoundaryAngles::dirichlet(),
            &BoundaryAngles::neumann(),
            &|_| c(1.0),
            TOL,
        )
        .unwrap();
        for v in &u.u {
            assert!((v - 1.0).norm() < 1e-9, "{v}");
        }
    }

    #[test]
    fn krein_regimes() {
        assert_eq!(
            krein_regime(&BoundaryAngles::new(0.0, 0.0), &BoundaryAngles::new(0.0, FRAC_PI_2)),
            KreinRegime::RightOnly
        );
        assert_eq!(
            krein_regime(&BoundaryAngles::new(1.0, 0.0), &BoundaryAngles::new(2.0, PI)),
            KreinRegime::LeftOnly
        );
        let a = BoundaryAngles::new(0.9, 0.4);
        let u = krein_resolvent(&Potential::zero(1.0), c(-3.0), &a, &a, &|x| c(x), TOL).unwrap();
        let v = apply_resolvent(&Potential::zero(1.0), c(-3.0), &a, &|x| c(x), TOL).unwrap();
        assert_eq!(u, v);
    }

    #[test]
    fn derivative_identity_dirichlet_neumann() {
        let v0 = Potential::zero(1.0);
        let r = lambda_derivative_identity(
            &v0,
            c(-1.0),
            &BoundaryAngles::dirichlet(),
            &BoundaryAngles::neumann(),
            1e-3,
            TOL,
        )
        .unwrap();
        assert!(r < 1e-6, "{r}");
    }

    #[test]
    fn correction_trace_matches_closed_form() {
        // D -> N at z = -1, V = 0 gives 1
        let t = krein_correction_trace(
            &Potential::zero(1.0),
            c(-1.0),
            &BoundaryAngles::dirichlet(),
            &BoundaryAngles::neumann(),
            TOL,
        )
        .unwrap();
        assert!((t - 1.0).norm() < 1e-8, "{t}");
    }
}
