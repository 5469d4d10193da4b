//! Dormand–Prince 5(4) stepping for `(u, u')' = (u', (V - z) u)`, several
//! solutions at once, with sup-norm rescaling into a shared log scale.

use num_complex::Complex64 as C;

use super::Potential;
use crate::error::{Error, Result};

const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const B1: f64 = 35.0 / 384.0;
const B3: f64 = 500.0 / 1113.0;
const B4: f64 = 125.0 / 192.0;
const B5: f64 = -2187.0 / 6784.0;
const B6: f64 = 11.0 / 84.0;
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;
const C2: f64 = 1.0 / 5.0;
const C3: f64 = 3.0 / 10.0;
const C4: f64 = 4.0 / 5.0;
const C5: f64 = 8.0 / 9.0;

/// Rescale threshold, e^30.
const BIG: f64 = 1.068_647_458_152_446_2e13;
const MAX_STEPS: usize = 5_000_000;

pub(crate) struct Integrator<'a> {
    pot: &'a Potential,
    z: C,
    rtol: f64,
    k: f64,
    h: f64,
}

impl<'a> Integrator<'a> {
    /// `tol` is the caller's relative accuracy; steps are controlled a
    /// decade tighter so the accumulated error stays near `tol`.
    pub fn new(pot: &'a Potential, z: C, tol: f64) -> Self {
        let k = pot.wave_scale(z);
        Self {
            pot,
            z,
            rtol: 0.1 * tol,
            k,
            h: 0.1 / k,
        }
    }

    fn rhs<const N: usize>(&self, x: f64, y: &[C; N]) -> [C; N] {
        let q = self.pot.eval(x) - self.z;
        let mut d = [C::new(0.0, 0.0); N];
        for p in 0..N / 2 {
            d[2 * p] = y[2 * p + 1];
            d[2 * p + 1] = q * y[2 * p];
        }
        d
    }

    /// Advance `y` from `x0` to `x1` (either direction), splitting at the
    /// potential's breakpoints. `on_step` sees every accepted state.
    pub fn advance<const N: usize>(
        &mut self,
        y: &mut [C; N],
        log_scale: &mut f64,
        x0: f64,
        x1: f64,
        on_step: &mut dyn FnMut(f64, &[C; N]),
    ) -> Result<()> {
        if x0 == x1 {
            return Ok(());
        }
        let (lo, hi) = (x0.min(x1), x0.max(x1));
        let mut cuts: Vec<f64> = self
            .pot
            .breakpoints()
            .iter()
            .copied()
            .filter(|&b| b > lo && b < hi)
            .collect();
        if x1 < x0 {
            cuts.reverse();
        }
        cuts.push(x1);
        let mut a = x0;
        for b in cuts {
            self.segment(y, log_scale, a, b, on_step)?;
            a = b;
        }
        Ok(())
    }

    fn segment<const N: usize>(
        &mut self,
        y: &mut [C; N],
        log_scale: &mut f64,
        x0: f64,
        x1: f64,
        on_step: &mut dyn FnMut(f64, &[C; N]),
    ) -> Result<()> {
        let dir = (x1 - x0).signum();
        let len = (x1 - x0).abs();
        let hmin = 1e-14 * len.max(self.pot.r());
        let mut x = x0;
        let mut h = self.h.min(len);
        let mut k1 = self.rhs(x, y);
        for _ in 0..MAX_STEPS {
            let remaining = (x1 - x) * dir;
            if remaining <= 0.0 {
                return Ok(());
            }
            let last = h >= remaining * (1.0 - 1e-12);
            if last {
                h = remaining;
            }
            let s = dir * h;
            let (ynew, k7, err) = self.try_step(x, y, &k1, s);
            if !err.is_finite() || ynew.iter().any(|v| !v.re.is_finite() || !v.im.is_finite()) {
                if h <= hmin {
                    return Err(Error::NonFinite { x });
                }
                h *= 0.25;
                continue;
            }
            if err <= 1.0 {
                x = if last { x1 } else { x + s };
                *y = ynew;
                k1 = k7;
                let m = y.iter().fold(0.0_f64, |acc, v| acc.max(v.norm()));
                if m > BIG {
                    let inv = 1.0 / m;
                    y.iter_mut().for_each(|v| *v *= inv);
                    k1.iter_mut().for_each(|v| *v *= inv);
                    *log_scale += m.ln();
                }
                on_step(x, y);
                let fac = if err == 0.0 { 5.0 } else { (0.9 * err.powf(-0.2)).clamp(0.2, 5.0) };
                if !last {
                    h *= fac;
                    self.h = h;
                } else {
                    self.h = self.h.max(h * fac);
                }
            } else {
                if h <= hmin {
                    return Err(Error::ToleranceNotMet { x });
                }
                h *= (0.9 * err.powf(-0.2)).clamp(0.1, 0.9);
            }
        }
        Err(Error::ToleranceNotMet { x })
    }

    fn try_step<const N: usize>(
        &self,
        x: f64,
        y: &[C; N],
        k1: &[C; N],
        s: f64,
    ) -> ([C; N], [C; N], f64) {
        let comb = |terms: &[(f64, &[C; N])]| -> [C; N] {
            let mut out = *y;
            for (c, k) in terms {
                let w = c * s;
                for i in 0..N {
                    out[i] += k[i] * w;
                }
            }
            out
        };
        let k2 = self.rhs(x + C2 * s, &comb(&[(A21, k1)]));
        let k3 = self.rhs(x + C3 * s, &comb(&[(A31, k1), (A32, &k2)]));
        let k4 = self.rhs(x + C4 * s, &comb(&[(A41, k1), (A42, &k2), (A43, &k3)]));
        let k5 = self.rhs(
            x + C5 * s,
            &comb(&[(A51, k1), (A52, &k2), (A53, &k3), (A54, &k4)]),
        );
        let k6 = self.rhs(
            x + s,
            &comb(&[(A61, k1), (A62, &k2), (A63, &k3), (A64, &k4), (A65, &k5)]),
        );
        let ynew = comb(&[(B1, k1), (B3, &k3), (B4, &k4), (B5, &k5), (B6, &k6)]);
        let k7 = self.rhs(x + s, &ynew);
        let mut err = 0.0_f64;
        for p in 0..N / 2 {
            let (iu, id) = (2 * p, 2 * p + 1);
            let amp = (self.k * y[iu].norm())
                .max(y[id].norm())
                .max(self.k * ynew[iu].norm())
                .max(ynew[id].norm());
            if amp == 0.0 {
                continue;
            }
            let tol_d = self.rtol * amp;
            let tol_u = tol_d / self.k;
            for (i, t) in [(iu, tol_u), (id, tol_d)] {
                let e = (k1[i] * E1 + k3[i] * E3 + k4[i] * E4 + k5[i] * E5 + k6[i] * E6 + k7[i] * E7)
                    * s;
                err = err.max(e.norm() / t);
            }
        }
        (ynew, k7, err)
    }
}
