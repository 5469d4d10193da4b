//! Cumulative quadrature on nonuniform grids: each interval integrates the
//! quintic through six neighbouring nodes (three-point Gauss–Legendre is
//! exact for quintics), never letting a stencil straddle a potential
//! breakpoint. Short segments fall back to lower degree.

use num_complex::Complex64 as C;

const G: f64 = 0.774_596_669_241_483_4; // sqrt(3/5)
const STENCIL: usize = 6;

/// `out[i] = ∫_{x[0]}^{x[i]} y`.
pub fn cumulative(x: &[f64], y: &[C], breaks: &[f64]) -> Vec<C> {
    let n = x.len();
    assert_eq!(n, y.len());
    let mut out = vec![C::new(0.0, 0.0); n];
    if n < 2 {
        return out;
    }
    // segment bounds (node indices) between breakpoints
    let mut seg_start = vec![0usize; n];
    let mut seg_end = vec![n - 1; n];
    let mut cut_nodes: Vec<usize> = breaks
        .iter()
        .filter_map(|&b| x.iter().position(|&t| (t - b).abs() <= 1e-13 * (1.0 + b.abs())))
        .collect();
    cut_nodes.sort_unstable();
    let mut s = 0;
    for &c in cut_nodes.iter().chain(std::iter::once(&(n - 1))) {
        if c <= s {
            continue;
        }
        for i in s..c {
            seg_start[i] = s;
            seg_end[i] = c;
        }
        s = c;
    }
    for i in 0..n - 1 {
        let (lo, hi) = (seg_start[i], seg_end[i]);
        let m = STENCIL.min(hi - lo + 1);
        let j0 = i.saturating_sub((m - 1) / 2).max(lo).min(hi + 1 - m);
        let idx: Vec<usize> = (j0..j0 + m).collect();
        let mid = 0.5 * (x[i] + x[i + 1]);
        let half = 0.5 * (x[i + 1] - x[i]);
        let p = |t: f64| lagrange(&idx, x, y, t);
        let piece = (p(mid - half * G) * 5.0 + p(mid) * 8.0 + p(mid + half * G) * 5.0) * (half / 9.0);
        out[i + 1] = out[i] + piece;
    }
    out
}

pub fn integrate(x: &[f64], y: &[C], breaks: &[f64]) -> C {
    *cumulative(x, y, breaks).last().unwrap_or(&C::new(0.0, 0.0))
}

fn lagrange(idx: &[usize], x: &[f64], y: &[C], t: f64) -> C {
    let mut acc = C::new(0.0, 0.0);
    for (a, &i) in idx.iter().enumerate() {
        let mut w = 1.0;
        for (b, &j) in idx.iter().enumerate() {
            if a != b {
                w *= (t - x[j]) / (x[i] - x[j]);
            }
        }
        acc += y[i] * w;
    }
    acc
}
