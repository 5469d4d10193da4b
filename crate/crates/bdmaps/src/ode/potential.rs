use std::f64::consts::TAU;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Shape of V on [0, R].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum PotentialKind {
    Zero,
    Constant {
        c: f64,
    },
    /// `amplitude * cos(2π * frequency * x / R + phase)`.
    Cosine {
        amplitude: f64,
        frequency: f64,
        #[serde(default)]
        phase: f64,
    },
    /// Piecewise-linear interpolation of `(x, v)`; `v_im` adds an imaginary part.
    Samples {
        x: Vec<f64>,
        v: Vec<f64>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        v_im: Option<Vec<f64>>,
    },
}

/// The pair (R, V) for `-u'' + V u = z u` on [0, R].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawPotential")]
pub struct Potential {
    r: f64,
    #[serde(flatten)]
    kind: PotentialKind,
}

#[derive(Deserialize)]
struct RawPotential {
    r: f64,
    #[serde(flatten)]
    kind: PotentialKind,
}

impl TryFrom<RawPotential> for Potential {
    type Error = Error;
    fn try_from(raw: RawPotential) -> Result<Self> {
        Potential::new(raw.r, raw.kind)
    }
}

impl Potential {
    pub fn new(r: f64, kind: PotentialKind) -> Result<Self> {
        if !(r.is_finite() && r > 0.0) {
            return Err(Error::Invalid(format!("R must be positive, got {r}")));
        }
        match &kind {
            PotentialKind::Zero => {}
            PotentialKind::Constant { c } => finite("c", *c)?,
            PotentialKind::Cosine {
                amplitude,
                frequency,
                phase,
            } => {
                finite("amplitude", *amplitude)?;
                finite("frequency", *frequency)?;
                finite("phase", *phase)?;
            }
            PotentialKind::Samples { x, v, v_im } => {
                if x.len() < 2 || x.len() != v.len() {
                    return Err(Error::Invalid(
                        "samples need at least two points and matching x/v lengths".into(),
                    ));
                }
                if let Some(w) = v_im {
                    if w.len() != x.len() {
                        return Err(Error::Invalid("v_im length differs from x".into()));
                    }
                    w.iter().try_for_each(|&t| finite("v_im", t))?;
                }
                v.iter().try_for_each(|&t| finite("v", t))?;
                if x[0] != 0.0 || (x[x.len() - 1] - r).abs() > 1e-12 * r {
                    return Err(Error::Invalid(
                        "sample abscissae must start at 0 and end at R".into(),
                    ));
                }
                if x.windows(2).any(|w| !(w[1] > w[0])) {
                    return Err(Error::Invalid(
                        "sample abscissae must be strictly increasing".into(),
                    ));
                }
            }
        }
        Ok(Self { r, kind })
    }

    pub fn zero(r: f64) -> Self {
        Self::new(r, PotentialKind::Zero).expect("valid length")
    }

    pub fn constant(r: f64, c: f64) -> Self {
        Self::new(r, PotentialKind::Constant { c }).expect("valid constant potential")
    }

    pub fn cosine(r: f64, amplitude: f64, frequency: f64, phase: f64) -> Self {
        Self::new(
            r,
            PotentialKind::Cosine {
                amplitude,
                frequency,
                phase,
            },
        )
        .expect("valid cosine potential")
    }

    pub fn samples(r: f64, x: Vec<f64>, v: Vec<f64>) -> Result<Self> {
        Self::new(r, PotentialKind::Samples { x, v, v_im: None })
    }

    pub fn r(&self) -> f64 {
        self.r
    }

    pub fn kind(&self) -> &PotentialKind {
        &self.kind
    }

    pub fn is_real(&self) -> bool {
        !matches!(&self.kind, PotentialKind::Samples { v_im: Some(w), .. } if w.iter().any(|&t| t != 0.0))
    }

    pub fn eval(&self, x: f64) -> Complex64 {
        match &self.kind {
            PotentialKind::Zero => Complex64::new(0.0, 0.0),
            PotentialKind::Constant { c } => Complex64::new(*c, 0.0),
            PotentialKind::Cosine {
                amplitude,
                frequency,
                phase,
            } => Complex64::new(amplitude * (TAU * frequency * x / self.r + phase).cos(), 0.0),
            PotentialKind::Samples { x: xs, v, v_im } => {
                let n = xs.len();
                let i = xs.partition_point(|&t| t <= x).clamp(1, n - 1) - 1;
                let t = ((x - xs[i]) / (xs[i + 1] - xs[i])).clamp(0.0, 1.0);
                let re = v[i] + t * (v[i + 1] - v[i]);
                let im = v_im
                    .as_ref()
                    .map_or(0.0, |w| w[i] + t * (w[i + 1] - w[i]));
                Complex64::new(re, im)
            }
        }
    }

    /// Interior points where V is only piecewise smooth.
    pub fn breakpoints(&self) -> &[f64] {
        match &self.kind {
            PotentialKind::Samples { x, .. } => &x[1..x.len() - 1],
            _ => &[],
        }
    }

    /// Lower and upper bounds for Re V.
    pub fn real_range(&self) -> (f64, f64) {
        match &self.kind {
            PotentialKind::Zero => (0.0, 0.0),
            PotentialKind::Constant { c } => (*c, *c),
            PotentialKind::Cosine { amplitude, .. } => (-amplitude.abs(), amplitude.abs()),
            PotentialKind::Samples { v, .. } => v
                .iter()
                .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &t| {
                    (lo.min(t), hi.max(t))
                }),
        }
    }

    /// Average of Re V over [0, R].
    pub fn mean(&self) -> f64 {
        match &self.kind {
            PotentialKind::Zero => 0.0,
            PotentialKind::Constant { c } => *c,
            PotentialKind::Cosine {
                amplitude,
                frequency,
                phase,
            } => {
                let w = TAU * frequency;
                if w.abs() < 1e-14 {
                    amplitude * phase.cos()
                } else {
                    amplitude * ((w + phase).sin() - phase.sin()) / w
                }
            }
            PotentialKind::Samples { x, v, .. } => {
                let s: f64 = x
                    .windows(2)
                    .zip(v.windows(2))
                    .map(|(a, b)| 0.5 * (a[1] - a[0]) * (b[0] + b[1]))
                    .sum();
                s / self.r
            }
        }
    }

    /// Wavenumber scale used to balance `u` against `u'` in error control.
    pub(crate) fn wave_scale(&self, z: Complex64) -> f64 {
        let (lo, hi) = self.real_range();
        let vmax = lo.abs().max(hi.abs());
        (1.0 + z.norm() + vmax).sqrt()
    }
}

fn finite(name: &str, v: f64) -> Result<()> {
    if v.is_finite() {
        Ok(())
    } else {
        Err(Error::Invalid(format!("{name} must be finite")))
    }
}
