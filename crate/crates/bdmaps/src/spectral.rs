//! Eigenvalues of self-adjoint `H_{θ0,θR}`, resolvent trace differences,
//! log-derivatives of det Λ and the spectral shift function.

use std::f64::consts::PI;

use num_complex::Complex64 as C;
use rayon::prelude::*;
use roots::{find_root_brent, Convergency};
use serde::{Deserialize, Serialize};

use crate::boundary_maps::{char_det_ratio, delta_mantissa};
use crate::error::{check_tol, Error, Result};
use crate::ode::rk::Integrator;
use crate::ode::{is_multiple_of_pi, propagate_fundamental, singular_floor, BoundaryAngles, Potential};

/// Eigenvalues above this are out of reach of the shooting scan.
const CEILING: f64 = 1e9;
const COUNT_TOL: f64 = 1e-7;

/// Lowest eigenvalues of one operator, ascending.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EigenvalueList {
    pub values: Vec<f64>,
    pub angles: BoundaryAngles,
    pub pot: Potential,
    pub count_requested: usize,
}

impl EigenvalueList {
    /// Number of Dirichlet endpoints.
    pub fn dirichlet_ends(&self) -> usize {
        dirichlet_ends(&self.angles)
    }

    /// `ν_k = k - 1 + d/2` for the 1-based index `k`; `√λ_k ≈ ν_k π / R`.
    pub fn asymptotic_index(&self, k: usize) -> f64 {
        asymptotic_index(k, self.dirichlet_ends())
    }

    /// `max_k k |√max(λ_k, 0) - ν_k π / R|`.
    pub fn asymptotic_constant(&self) -> f64 {
        let a = PI / self.pot.r();
        self.values
            .iter()
            .enumerate()
            .map(|(i, &l)| {
                let k = i + 1;
                k as f64 * (l.max(0.0).sqrt() - self.asymptotic_index(k) * a).abs()
            })
            .fold(0.0, f64::max)
    }

    /// `|Δ(λ_k)|` relative to the boundary row it was built from.
    pub fn residuals(&self, tol: f64) -> Result<Vec<f64>> {
        self.values
            .par_iter()
            .map(|&l| {
                let f = propagate_fundamental(&self.pot, C::new(l, 0.0), tol)?;
                let (d, row) = delta_mantissa(&f, &self.angles);
                Ok(d.norm() / row.max(1.0))
            })
            .collect()
    }
}

fn dirichlet_ends(a: &BoundaryAngles) -> usize {
    a.left_is_dirichlet() as usize + a.right_is_dirichlet() as usize
}

fn asymptotic_index(k: usize, d: usize) -> f64 {
    k as f64 - 1.0 + 0.5 * d as f64
}

fn require_real(pot: &Potential) -> Result<()> {
    if pot.is_real() {
        Ok(())
    } else {
        Err(Error::UnsupportedCase(
            "spectral computations need a real potential".into(),
        ))
    }
}

/// Number of eigenvalues below `lambda`, from the Prüfer angle of the
/// solution satisfying the left condition.
pub fn count_below(pot: &Potential, angles: &BoundaryAngles, lambda: f64, tol: f64) -> Result<usize> {
    require_real(pot)?;
    check_tol(tol)?;
    let (vmin, _) = pot.real_range();
    let s = (lambda - vmin).max(1.0).sqrt();
    let (sn, cs) = angles.theta0.sin_cos();
    // orient so that u > 0 just right of 0
    let flip = if -sn < 0.0 || (sn == 0.0 && cs < 0.0) { -1.0 } else { 1.0 };
    let mut y = [C::new(-sn * flip, 0.0), C::new(cs * flip, 0.0)];
    let mut log_scale = 0.0;
    let mut sign = if y[0].re > 0.0 { 1.0 } else { 0.0 };
    let mut zeros = 0usize;
    Integrator::new(pot, C::new(lambda, 0.0), tol).advance(
        &mut y,
        &mut log_scale,
        0.0,
        pot.r(),
        &mut |_, v| {
            let u = v[0].re;
            if u != 0.0 {
                let sg = u.signum();
                if sign != 0.0 && sg != sign {
                    zeros += 1;
                }
                sign = sg;
            }
        },
    )?;
    let frac = y[0].re.atan2(y[1].re / s).rem_euclid(PI);
    let theta_end = zeros as f64 * PI + frac;
    let (sr, cr) = angles.theta_r.sin_cos();
    let mut beta = (s * sr).atan2(cr);
    if beta <= 0.0 {
        beta += PI;
    }
    Ok(if theta_end > beta {
        ((theta_end - beta) / PI).floor() as usize + 1
    } else {
        0
    })
}

struct Width {
    rel: f64,
}

impl Convergency<f64> for Width {
    fn is_root_found(&mut self, y: f64) -> bool {
        y == 0.0
    }
    fn is_converged(&mut self, x1: f64, x2: f64) -> bool {
        (x1 - x2).abs() <= self.rel * x1.abs().max(1.0)
    }
    fn is_iteration_limit_reached(&mut self, iter: usize) -> bool {
        iter > 300
    }
}

/// Right boundary form of the solution satisfying the left condition,
/// as `(mantissa, log_scale)`; vanishes exactly at eigenvalues.
fn shoot_right(pot: &Potential, angles: &BoundaryAngles, l: f64, tol: f64) -> Result<(f64, f64)> {
    let (sn, cs) = angles.theta0.sin_cos();
    let mut y = [C::new(-sn, 0.0), C::new(cs, 0.0)];
    let mut log_scale = 0.0;
    Integrator::new(pot, C::new(l, 0.0), tol).advance(&mut y, &mut log_scale, 0.0, pot.r(), &mut |_, _| {})?;
    Ok((angles.trace_right(y[0], y[1]).re, log_scale))
}

fn refine(pot: &Potential, angles: &BoundaryAngles, a: f64, b: f64, tol: f64) -> Result<f64> {
    let shift = shoot_right(pot, angles, a, tol)?.1;
    let mut failure = None;
    let f = |l: f64| match shoot_right(pot, angles, l, tol) {
        Ok((m, s)) => m * (s - shift).exp(),
        Err(e) => {
            failure = Some(e);
            f64::NAN
        }
    };
    let mut conv = Width { rel: 0.5 * tol };
    let brent = find_root_brent(a, b, f, &mut conv);
    if let Some(e) = failure {
        return Err(e);
    }
    match brent {
        Ok(x) if x.is_finite() => Ok(x),
        // sign test failed at the ends: fall back to bisection on the count
        _ => {
            let (mut lo, mut hi) = (a, b);
            let target = count_below(pot, angles, a, tol)?;
            while hi - lo > 0.5 * tol * hi.abs().max(1.0) {
                let mid = 0.5 * (lo + hi);
                if count_below(pot, angles, mid, tol)? > target {
                    hi = mid;
                } else {
                    lo = mid;
                }
            }
            Ok(0.5 * (lo + hi))
        }
    }
}

/// The lowest `n` eigenvalues of `H_{θ0,θR}`.
pub fn eigenvalues(pot: &Potential, angles: &BoundaryAngles, n: usize, tol: f64) -> Result<EigenvalueList> {
    require_real(pot)?;
    check_tol(tol)?;
    if n == 0 {
        return Err(Error::Invalid("requested zero eigenvalues".into()));
    }
    // the count only needs the angle to within π
    let count_tol = tol.max(COUNT_TOL);
    let count = |l: f64| count_below(pot, angles, l, count_tol);
    let (vmin, vmax) = pot.real_range();
    let mut lo = vmin - 1.0;
    while count(lo)? > 0 {
        lo = vmin - 4.0 * (vmin - lo);
        if lo < -CEILING {
            return Err(Error::BracketingFailure {
                found: 0,
                requested: n,
                ceiling: -CEILING,
            });
        }
    }
    let a = PI / pot.r();
    let nu = asymptotic_index(n, dirichlet_ends(angles));
    let mut hi = (a * (nu + 1.0)).powi(2) + vmax + 1.0;
    let mut c_hi = count(hi)?;
    while c_hi < n {
        hi += 2.0 * (hi - lo);
        if hi > CEILING {
            return Err(Error::BracketingFailure {
                found: c_hi,
                requested: n,
                ceiling: CEILING,
            });
        }
        c_hi = count(hi)?;
    }
    // split until each interval holds at most one of the first n eigenvalues
    let mut open = vec![(lo, 0usize, hi, c_hi)];
    let mut brackets = Vec::with_capacity(n);
    while !open.is_empty() {
        let mids: Vec<f64> = open.iter().map(|&(a, _, b, _)| 0.5 * (a + b)).collect();
        let counts: Vec<usize> = mids.par_iter().map(|&m| count(m)).collect::<Result<_>>()?;
        let mut next = Vec::new();
        for (&(a, ca, b, cb), (&m, &cm)) in open.iter().zip(mids.iter().zip(&counts)) {
            if b - a < 1e-13 * b.abs().max(1.0) {
                return Err(Error::BracketingFailure {
                    found: brackets.len(),
                    requested: n,
                    ceiling: hi,
                });
            }
            for (x, cx, y, cy) in [(a, ca, m, cm), (m, cm, b, cb)] {
                if cy == cx || cx >= n {
                    continue;
                }
                if cy == cx + 1 {
                    brackets.push((x, y));
                } else {
                    next.push((x, cx, y, cy));
                }
            }
        }
        open = next;
    }
    brackets.sort_by(|p, q| p.0.total_cmp(&q.0));
    brackets.truncate(n);
    let values: Vec<f64> = brackets
        .par_iter()
        .map(|&(a, b)| refine(pot, angles, a, b, tol))
        .collect::<Result<_>>()?;
    if values.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(Error::BracketingFailure {
            found: values.len(),
            requested: n,
            ceiling: hi,
        });
    }
    Ok(EigenvalueList {
        values,
        angles: *angles,
        pot: pot.clone(),
        count_requested: n,
    })
}

/// All eigenvalues below `ceiling`.
pub fn eigenvalues_below(
    pot: &Potential,
    angles: &BoundaryAngles,
    ceiling: f64,
    tol: f64,
) -> Result<EigenvalueList> {
    let n = count_below(pot, angles, ceiling, tol)?;
    if n == 0 {
        return Ok(EigenvalueList {
            values: Vec::new(),
            angles: *angles,
            pot: pot.clone(),
            count_requested: 0,
        });
    }
    eigenvalues(pot, angles, n, tol)
}

/// Eigen-sum of `tr((H' - z)^{-1} - (H - z)^{-1})`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TraceSum {
    pub value: C,
    /// Modelled contribution of the eigenvalues beyond `n_terms`.
    pub tail: C,
    pub tail_bound: f64,
    pub n_terms: usize,
}

/// `λ_j ≈ a² ν_j² + b + c / ν_j²`, fitted to the two largest eigenvalues.
struct TailModel {
    a: f64,
    shift: f64,
    b: f64,
    c: f64,
}

impl TailModel {
    fn fit(list: &EigenvalueList) -> Result<Self> {
        let n = list.values.len();
        if n < 3 {
            return Err(Error::Invalid("tail model needs at least 3 eigenvalues".into()));
        }
        let a = PI / list.pot.r();
        let d = list.dirichlet_ends();
        let nu = |k: usize| asymptotic_index(k, d);
        let r = |k: usize| list.values[k - 1] - (a * nu(k)).powi(2);
        let c = (r(n) - r(n - 1)) / (nu(n).powi(-2) - nu(n - 1).powi(-2));
        let b = r(n) - c / nu(n).powi(2);
        Ok(Self {
            a,
            shift: 0.5 * d as f64 - 1.0,
            b,
            c,
        })
    }

    fn eigenvalue(&self, j: usize) -> f64 {
        let nu = j as f64 + self.shift;
        (self.a * nu).powi(2) + self.b + self.c / (nu * nu)
    }

    /// `Σ_{j > n} 1 / (λ_j - z)`, explicit up to `j_max`, then by the
    /// midpoint integral of the leading two-term model.
    fn tail_sum(&self, n: usize, j_max: usize, z: C) -> C {
        let mut s = C::new(0.0, 0.0);
        for j in n + 1..=j_max {
            s += (self.eigenvalue(j) - z).inv();
        }
        // ∫_X^∞ dx / (a² x² + w) = Σ_m (-w)^m / (a^{2m+2} (2m+1) X^{2m+1})
        let x = j_max as f64 + 0.5 + self.shift;
        let w = C::new(self.b, 0.0) - z;
        let q = -w / (self.a * x).powi(2);
        let mut term = C::new(1.0 / (self.a * self.a * x), 0.0);
        let mut m = 0;
        loop {
            let add = term / (2 * m + 1) as f64;
            s += add;
            if add.norm() < 1e-22 || m > 200 {
                break;
            }
            term *= q;
            m += 1;
        }
        s
    }
}

fn check_off_spectrum(z: C, lists: [&EigenvalueList; 2]) -> Result<()> {
    if z.im == 0.0 {
        for l in lists {
            if l.values.iter().any(|&e| (e - z.re).abs() <= 1e-12 * e.abs().max(1.0)) {
                return Err(Error::AtEigenvalue { z });
            }
        }
    }
    Ok(())
}

/// Trace of the resolvent difference from precomputed eigenvalue lists.
pub fn trace_from_eigenvalues(
    base: &EigenvalueList,
    primed: &EigenvalueList,
    z: C,
    tol: f64,
) -> Result<TraceSum> {
    let n = base.values.len().min(primed.values.len());
    check_off_spectrum(z, [base, primed])?;
    let term = |lp: f64, lb: f64| (C::new(lp, 0.0) - z).inv() - (C::new(lb, 0.0) - z).inv();
    let mut value = C::new(0.0, 0.0);
    for k in 0..n {
        value += term(primed.values[k], base.values[k]);
    }
    let mb = TailModel::fit(base)?;
    let mp = TailModel::fit(primed)?;
    let j_max = n + 20_000 + (100.0 * ((mb.b - z).norm().max((mp.b - z).norm())).sqrt()) as usize;
    let tail = mp.tail_sum(n, j_max, z) - mb.tail_sum(n, j_max, z);
    let fit_c = (n.saturating_sub(10).max(1)..=n)
        .map(|k| {
            let actual = term(primed.values[k - 1], base.values[k - 1]);
            let model = term(mp.eigenvalue(k), mb.eigenvalue(k));
            (actual - model).norm() * (k as f64).powi(4)
        })
        .fold(0.0, f64::max);
    let tail_bound = fit_c / (3.0 * (n as f64 + 0.5).powi(3));
    if tail_bound > tol {
        return Err(Error::TailTooLarge {
            bound: tail_bound,
            tol,
        });
    }
    Ok(TraceSum {
        value: value + tail,
        tail,
        tail_bound,
        n_terms: n,
    })
}

/// `Σ_k [1/(λ'_k - z) - 1/(λ_k - z)]` over `n_terms` eigenvalues of each
/// operator plus the modelled tail. `tol` bounds the tail; eigenvalues are
/// computed at `min(tol, 1e-8)`.
pub fn trace_resolvent_diff(
    pot: &Potential,
    base: &BoundaryAngles,
    primed: &BoundaryAngles,
    z: C,
    n_terms: usize,
    tol: f64,
) -> Result<TraceSum> {
    let eig_tol = tol.min(1e-8);
    let eb = eigenvalues(pot, base, n_terms, eig_tol)?;
    let ep = eigenvalues(pot, primed, n_terms, eig_tol)?;
    trace_from_eigenvalues(&eb, &ep, z, tol)
}

/// A derivative estimate with its Richardson error indicator.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Derivative {
    pub value: C,
    pub error: f64,
}

/// `-d/dz ln det Λ_{base}^{primed}(z)` by central differences with one
/// Richardson step.
pub fn log_det_derivative(
    pot: &Potential,
    base: &BoundaryAngles,
    primed: &BoundaryAngles,
    z: C,
    h: f64,
    tol: f64,
) -> Result<Derivative> {
    if !(h > 0.0) {
        return Err(Error::Invalid(format!("step must be positive, got {h}")));
    }
    let det = |w: C| char_det_ratio(pot, w, base, primed, tol);
    let central = |h: f64| -> Result<C> {
        let (p, m) = (det(z + h)?, det(z - h)?);
        Ok((p / m).ln() / (2.0 * h))
    };
    let d1 = central(h)?;
    let d2 = central(0.5 * h)?;
    let r = (d2 * 4.0 - d1) / 3.0;
    Ok(Derivative {
        value: -r,
        error: (r - d2).norm(),
    })
}

/// `η(θ0, θR)`: `-1` when exactly one base endpoint is Dirichlet.
pub fn eta(base: &BoundaryAngles) -> i32 {
    if dirichlet_ends(base) == 1 {
        -1
    } else {
        1
    }
}

/// One point of the boundary-value evaluation of ξ.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SsfSample {
    pub lambda: f64,
    pub xi: i64,
    /// Extrapolated `π^{-1} Im ln(η det Λ(λ + i0))`.
    pub raw: f64,
    pub residual: f64,
    /// Smallest ε actually used.
    pub eps: f64,
}

/// ξ(·; H', H) as a step function with the samples it was read from.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectralShift {
    /// Eigenvalues of either operator up to the top of the grid.
    pub breakpoints: Vec<f64>,
    /// Value on `(-∞, b_0)`, `(b_0, b_1)`, ..., `(b_last, top]`.
    pub values: Vec<i64>,
    pub eta: i32,
    pub base: BoundaryAngles,
    pub primed: BoundaryAngles,
    /// Grid points, in grid order, minus the excluded ones.
    pub samples: Vec<SsfSample>,
    /// Grid points within the guard gap of an eigenvalue.
    pub excluded: Vec<f64>,
    pub max_residual: f64,
}

impl SpectralShift {
    /// Value of ξ at `lambda` from the step function; `None` at a breakpoint
    /// or above the computed range.
    pub fn value_at(&self, lambda: f64) -> Option<i64> {
        if self.breakpoints.iter().any(|&b| b == lambda) {
            return None;
        }
        let i = self.breakpoints.partition_point(|&b| b < lambda);
        self.values.get(i).copied()
    }
}

pub const GUARD_GAP: f64 = 1e-6;
pub const DEFAULT_EPS: [f64; 3] = [1e-2, 1e-3, 1e-4];
const MAX_PHASE_STEP: f64 = PI / 4.0;

/// Continuous phase of det Λ along straight segments.
struct PhaseTracker<'a> {
    pot: &'a Potential,
    base: &'a BoundaryAngles,
    primed: &'a BoundaryAngles,
    tol: f64,
}

impl PhaseTracker<'_> {
    fn det(&self, z: C) -> Result<C> {
        char_det_ratio(self.pot, z, self.base, self.primed, self.tol)
    }

    /// Move from `(za, da, pa)` to `zb`, subdividing until each step turns
    /// the phase by at most π/4.
    fn step(&self, za: C, da: C, pa: f64, zb: C, depth: u32) -> Result<(C, f64)> {
        let db = self.det(zb)?;
        let turn = (db / da).arg();
        if turn.abs() <= MAX_PHASE_STEP {
            return Ok((db, pa + turn));
        }
        if depth > 40 {
            return Err(Error::PhaseTrackingLost { lambda: zb.re });
        }
        let zm = 0.5 * (za + zb);
        let (dm, pm) = self.step(za, da, pa, zm, depth + 1)?;
        self.step(zm, dm, pm, zb, depth + 1)
    }

    fn path(&self, za: C, da: C, pa: f64, zb: C, pieces: usize) -> Result<(C, f64)> {
        let (mut d, mut p, mut z) = (da, pa, za);
        for i in 1..=pieces {
            let next = za + (zb - za) * (i as f64 / pieces as f64);
            (d, p) = self.step(z, d, p, next, 0)?;
            z = next;
        }
        Ok((d, p))
    }

    /// Descend from `λ + iY` through the ε schedule; returns the sample.
    fn descend(&self, lambda: f64, y: f64, d0: C, p0: f64, eps: &[f64]) -> Result<SsfSample> {
        let (mut d, mut p, mut h) = (d0, p0, y);
        let mut phases: Vec<(f64, f64)> = Vec::new();
        let go_to = |target: f64, d: &mut C, p: &mut f64, h: &mut f64| -> Result<()> {
            while *h > target {
                let next = (0.5 * *h).max(target);
                (*d, *p) = self.step(C::new(lambda, *h), *d, *p, C::new(lambda, next), 0)?;
                *h = next;
            }
            Ok(())
        };
        for &e in eps {
            go_to(e, &mut d, &mut p, &mut h)?;
            phases.push((e, p / PI));
        }
        let extrapolate = |ph: &[(f64, f64)]| {
            let (e1, p1) = ph[ph.len() - 2];
            let (e2, p2) = ph[ph.len() - 1];
            p2 + (p2 - p1) * e2 / (e1 - e2)
        };
        let mut raw = extrapolate(&phases);
        // close to an eigenvalue the schedule may stop too early
        while (raw - raw.round()).abs() > 0.01 && h > 1e-12 {
            let e = 0.1 * h;
            go_to(e, &mut d, &mut p, &mut h)?;
            phases.push((e, p / PI));
            raw = extrapolate(&phases);
        }
        Ok(SsfSample {
            lambda,
            xi: raw.round() as i64,
            raw,
            residual: (raw - raw.round()).abs(),
            eps: h,
        })
    }
}

/// ξ(λ; H_{primed}, H_{base}) from boundary values of `η det Λ(λ + iε)`,
/// with the phase followed continuously from a point below both spectra.
pub fn spectral_shift(
    pot: &Potential,
    base: &BoundaryAngles,
    primed: &BoundaryAngles,
    lambda_grid: &[f64],
    eps_schedule: &[f64],
    tol: f64,
) -> Result<SpectralShift> {
    require_real(pot)?;
    check_tol(tol)?;
    if base.theta0 >= PI || base.theta_r >= PI {
        return Err(Error::Invalid("base angles must lie in [0, π)".into()));
    }
    if primed.theta0 >= PI
        || primed.theta_r >= PI
        || is_multiple_of_pi(primed.theta0)
        || is_multiple_of_pi(primed.theta_r)
    {
        return Err(Error::Invalid("primed angles must lie in (0, π)".into()));
    }
    if lambda_grid.is_empty() || lambda_grid.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(Error::Invalid("λ grid must be nonempty and increasing".into()));
    }
    if eps_schedule.len() < 2
        || eps_schedule.windows(2).any(|w| !(w[1] < w[0]))
        || eps_schedule.iter().any(|&e| !(e > 0.0))
    {
        return Err(Error::Invalid(
            "ε schedule needs at least two decreasing positive values".into(),
        ));
    }
    let top = *lambda_grid.last().unwrap();
    let e0 = eigenvalues(pot, base, 1, tol)?.values[0].min(eigenvalues(pot, primed, 1, tol)?.values[0]);
    let anchor = e0.min(lambda_grid[0]) - (0.1 * e0.abs()).max(1.0);
    let mut bps: Vec<f64> = eigenvalues_below(pot, base, top + 1.0, tol)?.values;
    bps.extend(eigenvalues_below(pot, primed, top + 1.0, tol)?.values);
    bps.sort_by(f64::total_cmp);
    bps.dedup_by(|a, b| (*a - *b).abs() <= 1e-9 * a.abs().max(1.0));
    let bps: Vec<f64> = bps.into_iter().filter(|&b| b <= top).collect();

    let guard = |l: f64| bps.iter().any(|&b| (b - l).abs() <= GUARD_GAP * l.abs().max(1.0));
    let (kept, excluded): (Vec<f64>, Vec<f64>) = lambda_grid.iter().partition(|&&l| !guard(l));
    let mut mids = Vec::with_capacity(bps.len() + 1);
    let first = bps.first().copied().unwrap_or(top + 1.0);
    mids.push(0.5 * (anchor + first));
    for w in bps.windows(2) {
        mids.push(0.5 * (w[0] + w[1]));
    }
    if let Some(&last) = bps.last() {
        if top > last && !guard(0.5 * (last + top)) {
            mids.push(0.5 * (last + top));
        }
    }
    let mut points: Vec<(f64, usize)> = kept
        .iter()
        .map(|&l| (l, 0))
        .chain(mids.iter().map(|&l| (l, 1)))
        .collect();
    points.sort_by(|a, b| a.0.total_cmp(&b.0));

    let tracker = PhaseTracker {
        pot,
        base,
        primed,
        tol,
    };
    let eta = eta(base);
    let d_anchor = tracker.det(C::new(anchor, 0.0))? * eta as f64;
    let p_anchor = d_anchor.arg();
    let y = (0.1 * (top - anchor)).max(1.0);
    let (mut d, mut p) = tracker.path(C::new(anchor, 0.0), d_anchor, p_anchor, C::new(anchor, y), 8)?;
    let mut z = C::new(anchor, y);
    let mut starts = Vec::with_capacity(points.len());
    for &(l, _) in &points {
        let next = C::new(l, y);
        let pieces = (((l - z.re) / y).ceil() as usize).max(1);
        (d, p) = tracker.path(z, d, p, next, pieces)?;
        z = next;
        starts.push((d, p));
    }
    let samples: Vec<SsfSample> = points
        .par_iter()
        .zip(starts.par_iter())
        .map(|(&(l, _), &(d, p))| tracker.descend(l, y, d, p, eps_schedule))
        .collect::<Result<_>>()?;
    let mut grid_samples = Vec::new();
    let mut values = Vec::new();
    for (s, &(_, kind)) in samples.iter().zip(&points) {
        if kind == 0 {
            grid_samples.push(*s);
        } else {
            values.push(s.xi);
        }
    }
    let max_residual = samples.iter().map(|s| s.residual).fold(0.0, f64::max);
    Ok(SpectralShift {
        breakpoints: bps,
        values,
        eta,
        base: *base,
        primed: *primed,
        samples: grid_samples,
        excluded,
        max_residual,
    })
}

/// `N(λ; H_base) - N(λ; H_primed)`, counting eigenvalues below λ.
pub fn ssf_counting_oracle(
    pot: &Potential,
    base: &BoundaryAngles,
    primed: &BoundaryAngles,
    lambda: f64,
    tol: f64,
) -> Result<i64> {
    require_real(pot)?;
    check_tol(tol)?;
    let f = propagate_fundamental(pot, C::new(lambda, 0.0), tol)?;
    for a in [base, primed] {
        let (d, row) = delta_mantissa(&f, a);
        if d.norm() < singular_floor(tol) * row.max(1.0) {
            return Err(Error::AtEigenvalue {
                z: C::new(lambda, 0.0),
            });
        }
    }
    Ok(count_below(pot, base, lambda, tol)? as i64 - count_below(pot, primed, lambda, tol)? as i64)
}
