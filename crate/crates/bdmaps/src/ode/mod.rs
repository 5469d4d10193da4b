//! Solutions of `-u'' + V u = z u` on [0, R] at complex `z`.

mod potential;
pub mod quad;
pub(crate) mod rk;

use std::f64::consts::TAU;
use std::ops::{Div, Mul};

use num_complex::Complex64 as C;
use serde::{Deserialize, Serialize};

pub use potential::{Potential, PotentialKind};
use rk::Integrator;

use crate::error::{check_tol, Error, Result};

pub const DEFAULT_TOL: f64 = 1e-10;
/// Angles closer than this to a multiple of π count as Dirichlet.
pub const ANGLE_TOL: f64 = 1e-9;

/// Separated boundary condition angles, normalized into [0, 2π).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundaryAngles {
    pub theta0: f64,
    pub theta_r: f64,
}

impl BoundaryAngles {
    pub fn new(theta0: f64, theta_r: f64) -> Self {
        Self {
            theta0: normalize_angle(theta0),
            theta_r: normalize_angle(theta_r),
        }
    }

    pub fn dirichlet() -> Self {
        Self::new(0.0, 0.0)
    }

    pub fn neumann() -> Self {
        Self::new(std::f64::consts::FRAC_PI_2, std::f64::consts::FRAC_PI_2)
    }

    pub fn left_is_dirichlet(&self) -> bool {
        is_multiple_of_pi(self.theta0)
    }

    pub fn right_is_dirichlet(&self) -> bool {
        is_multiple_of_pi(self.theta_r)
    }

    /// `cos θ0 u(0) + sin θ0 u'(0)`.
    pub fn trace_left(&self, u: C, du: C) -> C {
        u * self.theta0.cos() + du * self.theta0.sin()
    }

    /// `cos θR u(R) - sin θR u'(R)`.
    pub fn trace_right(&self, u: C, du: C) -> C {
        u * self.theta_r.cos() - du * self.theta_r.sin()
    }
}

pub fn normalize_angle(t: f64) -> f64 {
    let r = t.rem_euclid(TAU);
    if r >= TAU {
        0.0
    } else {
        r
    }
}

pub fn is_multiple_of_pi(t: f64) -> bool {
    let r = t.rem_euclid(std::f64::consts::PI);
    r < ANGLE_TOL || std::f64::consts::PI - r < ANGLE_TOL
}

/// `mantissa * exp(log_scale)` with `|mantissa|` in [1, e) unless zero.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LogScaled {
    pub mantissa: C,
    pub log_scale: f64,
}

impl LogScaled {
    pub fn new(mantissa: C, log_scale: f64) -> Self {
        let a = mantissa.norm();
        if a == 0.0 || !a.is_finite() {
            return Self {
                mantissa: if a == 0.0 { C::new(0.0, 0.0) } else { mantissa },
                log_scale: if a == 0.0 { 0.0 } else { log_scale },
            };
        }
        let f = a.ln().floor();
        Self {
            mantissa: mantissa * (-f).exp(),
            log_scale: log_scale + f,
        }
    }

    pub fn value(&self) -> C {
        if self.log_scale > 700.0 {
            C::from_polar((self.mantissa.norm().ln() + self.log_scale).exp(), self.mantissa.arg())
        } else {
            self.mantissa * self.log_scale.exp()
        }
    }

    pub fn is_zero(&self) -> bool {
        self.mantissa == C::new(0.0, 0.0)
    }

    /// Principal `ln` of the value.
    pub fn ln(&self) -> C {
        self.mantissa.ln() + self.log_scale
    }

    pub fn abs_ln(&self) -> f64 {
        self.mantissa.norm().ln() + self.log_scale
    }
}

impl Mul for LogScaled {
    type Output = LogScaled;
    fn mul(self, o: LogScaled) -> LogScaled {
        LogScaled::new(self.mantissa * o.mantissa, self.log_scale + o.log_scale)
    }
}

impl Div for LogScaled {
    type Output = LogScaled;
    fn div(self, o: LogScaled) -> LogScaled {
        LogScaled::new(self.mantissa / o.mantissa, self.log_scale - o.log_scale)
    }
}

/// θ, θ', φ, φ' at x = R, all multiplied by `exp(-log_scale)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FundamentalValues {
    pub theta_r: C,
    pub theta_prime_r: C,
    pub phi_r: C,
    pub phi_prime_r: C,
    pub log_scale: f64,
}

impl FundamentalValues {
    /// Unscaled values; overflow to infinity for huge log scales.
    pub fn unscaled(&self) -> [C; 4] {
        let s = self.log_scale.exp();
        [
            self.theta_r * s,
            self.theta_prime_r * s,
            self.phi_r * s,
            self.phi_prime_r * s,
        ]
    }

    /// `|θφ' - θ'φ - 1|` for the unscaled functions.
    pub fn wronskian_defect(&self) -> f64 {
        let w = self.theta_r * self.phi_prime_r - self.theta_prime_r * self.phi_r;
        ((w.ln() + 2.0 * self.log_scale).exp() - 1.0).norm()
    }

    /// `[γ_left(θ), γ_left(φ)]` at x = 0 (not scaled).
    pub fn left_row(&self, angles: &BoundaryAngles) -> [C; 2] {
        let (c, s) = (angles.theta0.cos(), angles.theta0.sin());
        [C::new(c, 0.0), C::new(s, 0.0)]
    }

    /// `[γ_right(θ), γ_right(φ)]` at x = R, in units of `exp(log_scale)`.
    pub fn right_row(&self, angles: &BoundaryAngles) -> [C; 2] {
        [
            angles.trace_right(self.theta_r, self.theta_prime_r),
            angles.trace_right(self.phi_r, self.phi_prime_r),
        ]
    }
}

/// Values of a solution on a grid, multiplied by `exp(-log_scale)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolutionPath {
    pub grid: Vec<f64>,
    pub u: Vec<C>,
    pub u_prime: Vec<C>,
    pub log_scale: f64,
    /// Interior nodes where the generating potential has kinks.
    #[serde(default)]
    pub breaks: Vec<f64>,
}

impl SolutionPath {
    /// Path sampled from closed forms, e.g. for test functions.
    pub fn from_fn(grid: Vec<f64>, f: impl Fn(f64) -> C, df: impl Fn(f64) -> C) -> Self {
        let u = grid.iter().map(|&x| f(x)).collect();
        let u_prime = grid.iter().map(|&x| df(x)).collect();
        Self {
            grid,
            u,
            u_prime,
            log_scale: 0.0,
            breaks: Vec::new(),
        }
    }

    pub fn len(&self) -> usize {
        self.grid.len()
    }

    pub fn is_empty(&self) -> bool {
        self.grid.is_empty()
    }

    /// `(u, u')` at node `i` with the log scale applied.
    pub fn at(&self, i: usize) -> (C, C) {
        let s = self.log_scale.exp();
        (self.u[i] * s, self.u_prime[i] * s)
    }

    pub fn first(&self) -> (C, C) {
        self.at(0)
    }

    pub fn last(&self) -> (C, C) {
        self.at(self.len() - 1)
    }

    pub fn node_index(&self, x: f64) -> Option<usize> {
        let scale = 1e-12 * (1.0 + self.grid.last().copied().unwrap_or(1.0).abs());
        let i = self.grid.partition_point(|&t| t < x - scale);
        (i < self.len() && (self.grid[i] - x).abs() <= scale).then_some(i)
    }

    pub(crate) fn same_grid(&self, other: &SolutionPath) -> Result<()> {
        let ok = self.len() == other.len()
            && self
                .grid
                .iter()
                .zip(&other.grid)
                .all(|(a, b)| (a - b).abs() <= 1e-13 * (1.0 + a.abs()));
        if ok {
            Ok(())
        } else {
            Err(Error::GridMismatch(format!(
                "grids of length {} and {} differ",
                self.len(),
                other.len()
            )))
        }
    }

    /// Pointwise linear combination `a*self + b*other` on a shared grid.
    pub fn combine(&self, a: C, other: &SolutionPath, b: C) -> Result<SolutionPath> {
        self.same_grid(other)?;
        let s = self.log_scale.max(other.log_scale);
        let (fa, fb) = (a * (self.log_scale - s).exp(), b * (other.log_scale - s).exp());
        Ok(SolutionPath {
            grid: self.grid.clone(),
            u: self.u.iter().zip(&other.u).map(|(x, y)| x * fa + y * fb).collect(),
            u_prime: self
                .u_prime
                .iter()
                .zip(&other.u_prime)
                .map(|(x, y)| x * fa + y * fb)
                .collect(),
            log_scale: s,
            breaks: self.breaks.clone(),
        })
    }

    pub fn scale(&self, a: C) -> SolutionPath {
        SolutionPath {
            u: self.u.iter().map(|x| x * a).collect(),
            u_prime: self.u_prime.iter().map(|x| x * a).collect(),
            ..self.clone()
        }
    }
}

/// Uniform grid fine enough for quadrature at tolerance ~1e-10,
/// merged with the potential's breakpoints.
pub fn default_grid(pot: &Potential, z: C) -> Vec<f64> {
    let k = pot.wave_scale(z);
    let n = ((64.0 * k * pot.r()).ceil() as usize).max(400);
    grid_with(pot, n)
}

/// `n` uniform intervals plus the potential's breakpoints.
pub fn grid_with(pot: &Potential, n: usize) -> Vec<f64> {
    let r = pot.r();
    let mut g: Vec<f64> = (0..=n).map(|i| r * i as f64 / n as f64).collect();
    g.extend_from_slice(pot.breakpoints());
    g.sort_by(|a, b| a.partial_cmp(b).unwrap());
    g.dedup_by(|a, b| (*a - *b).abs() <= 1e-13 * r);
    let last = g.len() - 1;
    g[last] = r;
    g
}

/// θ, θ', φ, φ' at R (normalization θ(0)=φ'(0)=1, θ'(0)=φ(0)=0).
pub fn propagate_fundamental(pot: &Potential, z: C, tol: f64) -> Result<FundamentalValues> {
    check_tol(tol)?;
    let one = C::new(1.0, 0.0);
    let zero = C::new(0.0, 0.0);
    let mut y = [one, zero, zero, one];
    let mut s = 0.0;
    Integrator::new(pot, z, tol).advance(&mut y, &mut s, 0.0, pot.r(), &mut |_, _| {})?;
    Ok(FundamentalValues {
        theta_r: y[0],
        theta_prime_r: y[1],
        phi_r: y[2],
        phi_prime_r: y[3],
        log_scale: s,
    })
}

/// Integrate one solution with initial data `init` at x = 0 (`from_left`)
/// or x = R, recording it at every node of `grid`.
pub fn shoot(
    pot: &Potential,
    z: C,
    from_left: bool,
    init: [C; 2],
    grid: &[f64],
    tol: f64,
) -> Result<SolutionPath> {
    check_tol(tol)?;
    let n = grid.len();
    if n < 2 || grid[0] != 0.0 || (grid[n - 1] - pot.r()).abs() > 1e-12 * pot.r() {
        return Err(Error::GridMismatch("grid must run from 0 to R".into()));
    }
    let mut integ = Integrator::new(pot, z, tol);
    let mut y = init;
    let mut s = 0.0;
    let mut u = vec![C::new(0.0, 0.0); n];
    let mut du = vec![C::new(0.0, 0.0); n];
    let mut scales = vec![0.0; n];
    let order: Vec<usize> = if from_left {
        (0..n).collect()
    } else {
        (0..n).rev().collect()
    };
    let mut prev = order[0];
    u[prev] = y[0];
    du[prev] = y[1];
    for &i in &order[1..] {
        integ.advance(&mut y, &mut s, grid[prev], grid[i], &mut |_, _| {})?;
        u[i] = y[0];
        du[i] = y[1];
        scales[i] = s;
        prev = i;
    }
    for i in 0..n {
        let f = (scales[i] - s).exp();
        u[i] *= f;
        du[i] *= f;
    }
    Ok(SolutionPath {
        grid: grid.to_vec(),
        u,
        u_prime: du,
        log_scale: s,
        breaks: pot.breakpoints().to_vec(),
    })
}

/// Solution satisfying the left boundary condition, started at x = 0 with
/// `(u, u') = (-sin θ0, cos θ0)`.
pub fn left_solution(
    pot: &Potential,
    z: C,
    angles: &BoundaryAngles,
    grid: &[f64],
    tol: f64,
) -> Result<SolutionPath> {
    let (s, c) = angles.theta0.sin_cos();
    shoot(pot, z, true, [C::new(-s, 0.0), C::new(c, 0.0)], grid, tol)
}

/// Solution satisfying the right boundary condition, started at x = R with
/// `(u, u') = (sin θR, cos θR)`.
pub fn right_solution(
    pot: &Potential,
    z: C,
    angles: &BoundaryAngles,
    grid: &[f64],
    tol: f64,
) -> Result<SolutionPath> {
    let (s, c) = angles.theta_r.sin_cos();
    shoot(pot, z, false, [C::new(s, 0.0), C::new(c, 0.0)], grid, tol)
}

/// Relative singularity floor for 2x2 systems, loosened with the
/// integration tolerance so that numerically exact eigenvalues are caught.
pub(crate) fn singular_floor(tol: f64) -> f64 {
    (10.0 * tol).max(1e-12)
}

/// Mantissa Wronskian `W(p, q)` at node 0 and the product of the (u, u')
/// row norms used for the singularity test.
fn mantissa_wronskian(p: &SolutionPath, q: &SolutionPath) -> (C, f64) {
    let w = p.u[0] * q.u_prime[0] - p.u_prime[0] * q.u[0];
    let np = (p.u[0].norm_sqr() + p.u_prime[0].norm_sqr()).sqrt();
    let nq = (q.u[0].norm_sqr() + q.u_prime[0].norm_sqr()).sqrt();
    (w, np * nq)
}

/// The pair (ψ_R, ψ_L) of boundary-adapted solutions together with their
/// mantissa Wronskian `W(ψ_R, ψ_L)`; fails at eigenvalues.
pub(crate) fn boundary_pair(
    pot: &Potential,
    z: C,
    angles: &BoundaryAngles,
    grid: &[f64],
    tol: f64,
) -> Result<(SolutionPath, SolutionPath, C)> {
    let psi_r = right_solution(pot, z, angles, grid, tol)?;
    let psi_l = left_solution(pot, z, angles, grid, tol)?;
    let (w, norm) = mantissa_wronskian(&psi_r, &psi_l);
    if w.norm() < singular_floor(tol) * norm {
        return Err(Error::AtEigenvalue { z });
    }
    Ok((psi_r, psi_l, w))
}

/// Solution with `γ(u) = [c0; cR]` for z in the resolvent set.
pub fn solve_with_boundary_data(
    pot: &Potential,
    z: C,
    angles: &BoundaryAngles,
    c0: C,
    c_r: C,
    tol: f64,
) -> Result<SolutionPath> {
    let grid = default_grid(pot, z);
    let (psi_r, psi_l, _) = boundary_pair(pot, z, angles, &grid, tol)?;
    let g0 = angles.trace_left(psi_r.u[0], psi_r.u_prime[0]);
    let n = grid.len() - 1;
    let gr = angles.trace_right(psi_l.u[n], psi_l.u_prime[n]);
    let mut psi_r = psi_r;
    let mut psi_l = psi_l;
    psi_r.log_scale = 0.0;
    psi_l.log_scale = 0.0;
    psi_r.combine(c0 / g0, &psi_l, c_r / gr)
}

/// `(u_+, u_-)`: `u_+(0) = 1` with the θR condition at R, and `u_-(R) = 1`
/// with the θ0 condition at 0.
pub fn u_plus_minus(
    pot: &Potential,
    z: C,
    angles: &BoundaryAngles,
    tol: f64,
) -> Result<(SolutionPath, SolutionPath)> {
    u_plus_minus_on(pot, z, angles, &default_grid(pot, z), tol)
}

pub fn u_plus_minus_on(
    pot: &Potential,
    z: C,
    angles: &BoundaryAngles,
    grid: &[f64],
    tol: f64,
) -> Result<(SolutionPath, SolutionPath)> {
    let (psi_r, psi_l, _) = boundary_pair(pot, z, angles, grid, tol)?;
    let n = grid.len() - 1;
    let k = pot.wave_scale(z);
    let floor = singular_floor(tol);
    if psi_r.u[0].norm() * k < floor * psi_r.u_prime[0].norm() {
        return Err(Error::AtEigenvalue { z });
    }
    if psi_l.u[n].norm() * k < floor * psi_l.u_prime[n].norm() {
        return Err(Error::AtEigenvalue { z });
    }
    let mut plus = psi_r.scale(psi_r.u[0].inv());
    let mut minus = psi_l.scale(psi_l.u[n].inv());
    plus.log_scale = 0.0;
    minus.log_scale = 0.0;
    Ok((plus, minus))
}

/// `f g' - f' g` at the grid node `x`.
pub fn wronskian(p1: &SolutionPath, p2: &SolutionPath, x: f64) -> Result<C> {
    let i = p1
        .node_index(x)
        .ok_or_else(|| Error::GridMismatch(format!("{x} is not a node of the first path")))?;
    let j = p2
        .node_index(x)
        .ok_or_else(|| Error::GridMismatch(format!("{x} is not a node of the second path")))?;
    let w = p1.u[i] * p2.u_prime[j] - p1.u_prime[i] * p2.u[j];
    Ok(w * (p1.log_scale + p2.log_scale).exp())
}

/// `∫ conj(p1) p2` over [0, R].
pub fn l2_inner(p1: &SolutionPath, p2: &SolutionPath) -> Result<C> {
    p1.same_grid(p2)?;
    let y: Vec<C> = p1.u.iter().zip(&p2.u).map(|(a, b)| a.conj() * b).collect();
    Ok(quad::integrate(&p1.grid, &y, &merged_breaks(p1, p2)) * (p1.log_scale + p2.log_scale).exp())
}

fn merged_breaks(p1: &SolutionPath, p2: &SolutionPath) -> Vec<f64> {
    let mut b = p1.breaks.clone();
    b.extend_from_slice(&p2.breaks);
    b
}

/// `Q(f, g) - z (f, g)` for the form of `H_{θ0,θR}`.
pub fn form_eval(
    pot: &Potential,
    angles: &BoundaryAngles,
    f: &SolutionPath,
    g: &SolutionPath,
    z: C,
) -> Result<C> {
    f.same_grid(g)?;
    let n = f.len() - 1;
    let fnorm = f.u.iter().fold(0.0_f64, |m, v| m.max(v.norm()));
    let gnorm = g.u.iter().fold(0.0_f64, |m, v| m.max(v.norm()));
    for (dir, idx, name) in [
        (angles.left_is_dirichlet(), 0, "x = 0"),
        (angles.right_is_dirichlet(), n, "x = R"),
    ] {
        if dir && (f.u[idx].norm() > 1e-8 * fnorm || g.u[idx].norm() > 1e-8 * gnorm) {
            return Err(Error::DomainViolation(format!(
                "nonzero value at Dirichlet endpoint {name}"
            )));
        }
    }
    let y: Vec<C> = (0..=n)
        .map(|i| {
            f.u_prime[i].conj() * g.u_prime[i]
                + (pot.eval(f.grid[i]) - z) * f.u[i].conj() * g.u[i]
        })
        .collect();
    let mut q = quad::integrate(&f.grid, &y, &merged_breaks(f, g));
    if !angles.left_is_dirichlet() {
        q -= f.u[0].conj() * g.u[0] / angles.theta0.tan();
    }
    if !angles.right_is_dirichlet() {
        q -= f.u[n].conj() * g.u[n] / angles.theta_r.tan();
    }
    Ok(q * (f.log_scale + g.log_scale).exp())
}
