//! Riley's parametrization of the nonabelian SL(2, C) representations of the
//! figure-eight knot group, the Dehn filling condition and the SU(2) flat
//! connection classes on the surgered manifolds.

use crate::chernsimons::beta_eps;
use crate::error::{Error, Result};
use crate::invariants::SurgeryCoefficient;
use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;
use std::f64::consts::PI;

type Mat = [[Complex64; 2]; 2];

const ARC_TOL: f64 = 1e-12;

/// Which root `u_+` or `u_-` of the Riley polynomial on the unit circle.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, PartialOrd, Ord)]
pub enum Branch {
    Plus,
    Minus,
}

impl Branch {
    pub fn sign(self) -> f64 {
        match self {
            Branch::Plus => 1.0,
            Branch::Minus => -1.0,
        }
    }

    pub fn flip(self) -> Self {
        match self {
            Branch::Plus => Branch::Minus,
            Branch::Minus => Branch::Plus,
        }
    }
}

/// Point `(s, u)` of the Riley parameter space.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RileyPoint {
    pub s: Complex64,
    pub u: Complex64,
}

impl RileyPoint {
    pub fn new(s: Complex64, u: Complex64) -> Result<Self> {
        if s.norm() == 0.0 {
            return Err(Error::InvalidParameter("s must be nonzero".into()));
        }
        Ok(RileyPoint { s, u })
    }

    /// The SU(2) point `s = e^{2 pi i theta}`, `u = u_eps(theta)`.
    pub fn on_arc(theta: f64, eps: Branch) -> Result<Self> {
        let u = u_pm(theta, eps)?;
        Ok(RileyPoint { s: cis_turns(theta), u: Complex64::new(u, 0.0) })
    }

    pub fn phi(&self) -> Complex64 {
        phi_riley(self.s * self.s, self.u)
    }

    pub fn on_variety(&self, tol: f64) -> bool {
        self.phi().norm() < tol
    }
}

/// Images of the two meridian generators and of the word `w = [x^{-1}, y]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RepMatrices {
    pub c: Mat,
    pub d: Mat,
    pub w: Mat,
}

/// `e^{2 pi i t}`, exact at multiples of a quarter turn.
pub fn cis_turns(t: f64) -> Complex64 {
    let q = 4.0 * t;
    if q == q.round() {
        match (q as i64).rem_euclid(4) {
            0 => Complex64::new(1.0, 0.0),
            1 => Complex64::new(0.0, 1.0),
            2 => Complex64::new(-1.0, 0.0),
            _ => Complex64::new(0.0, -1.0),
        }
    } else {
        Complex64::from_polar(1.0, 2.0 * PI * t)
    }
}

/// `phi(t, u) = u^2 + (3 - t - 1/t)(u + 1)`.
pub fn phi_riley(t: Complex64, u: Complex64) -> Complex64 {
    u * u + (3.0 - t - t.inv()) * (u + 1.0)
}

fn arc_discriminant(theta: f64) -> Result<(f64, f64)> {
    let a = theta.abs();
    if !(1.0 / 6.0 - ARC_TOL..=1.0 / 3.0 + ARC_TOL).contains(&a) {
        return Err(Error::OutOfArc(theta));
    }
    let c = (4.0 * PI * theta).cos();
    // c^2 - c - 3/4 = (c - 3/2)(c + 1/2), the second factor written so that it
    // vanishes exactly at the ends of the arc
    let half = 2.0 * (2.0 * PI * (a - 1.0 / 3.0)).sin() * (2.0 * PI * (a - 1.0 / 6.0)).sin();
    Ok((c, ((c - 1.5) * half).max(0.0)))
}

/// Real root `u_eps(theta) = cos 4 pi theta - 3/2 + eps sqrt(...)` of
/// `phi(e^{4 pi i theta}, u) = 0`.
pub fn u_pm(theta: f64, eps: Branch) -> Result<f64> {
    let (c, disc) = arc_discriminant(theta)?;
    Ok(c - 1.5 + eps.sign() * disc.sqrt())
}

/// Upper-left entry of the longitude image, its eigenvalue on the peripheral torus.
pub fn lambda11(s: Complex64, u: Complex64) -> Complex64 {
    let s2 = s * s;
    let si2 = s2.inv();
    -1.0 + si2 - 2.0 * s2 + s2 * s2 + u * (si2 - s2)
}

/// `L_eps(theta) = lambda11(e^{2 pi i theta}, u_eps(theta))` from its closed
/// real and imaginary parts.
pub fn l_pm(theta: f64, eps: Branch) -> Result<Complex64> {
    let (c, disc) = arc_discriminant(theta)?;
    let re = 2.0 * c * c - c - 2.0;
    let im = -eps.sign() * 2.0 * (4.0 * PI * theta).sin() * disc.sqrt();
    Ok(Complex64::new(re, im))
}

fn mul(a: &Mat, b: &Mat) -> Mat {
    let mut m = [[Complex64::new(0.0, 0.0); 2]; 2];
    for i in 0..2 {
        for j in 0..2 {
            m[i][j] = a[i][0] * b[0][j] + a[i][1] * b[1][j];
        }
    }
    m
}

// inverse of a unimodular matrix
fn inv_sl2(a: &Mat) -> Mat {
    [[a[1][1], -a[0][1]], [-a[1][0], a[0][0]]]
}

/// Matrices `C_2(s)`, `D_2(s, u)` and the word value `W = C^{-1} D C D^{-1}`.
pub fn rep_matrices(s: Complex64, u: Complex64) -> RepMatrices {
    let si = s.inv();
    let zero = Complex64::new(0.0, 0.0);
    let c = [[s, si], [zero, si]];
    let d = [[s, zero], [-s * u, si]];
    let w = mul(&mul(&inv_sl2(&c), &d), &mul(&c, &inv_sl2(&d)));
    RepMatrices { c, d, w }
}

/// Frobenius norm of `W C - D W`, zero exactly when the assignment respects
/// the group relation `w x = y w`.
pub fn rep_residual(s: Complex64, u: Complex64) -> f64 {
    let m = rep_matrices(s, u);
    let lhs = mul(&m.w, &m.c);
    let rhs = mul(&m.d, &m.w);
    let mut acc = 0.0;
    for i in 0..2 {
        for j in 0..2 {
            acc += (lhs[i][j] - rhs[i][j]).norm_sqr();
        }
    }
    acc.sqrt()
}

/// Outcome of the Dehn filling test `s^{-p} = lambda11^q`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Extension {
    pub extends: bool,
    pub defect: f64,
}

/// Whether `rho_(s,u)` factors through `pi_1(M_{p/q})`.
pub fn extends_to_surgery(s: Complex64, u: Complex64, surgery: &SurgeryCoefficient, tol: f64) -> Result<Extension> {
    if (s * s - 1.0).norm() < 1e-14 {
        return Err(Error::DegenerateEigenvalue);
    }
    let lhs = s.powi(-(surgery.p as i32));
    let rhs = lambda11(s, u).powi(surgery.q as i32);
    let defect = (lhs - rhs).norm();
    Ok(Extension { extends: defect < tol, defect })
}

/// Kind of a flat SU(2) connection class on `M_{p/q}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ClassKind {
    /// Abelian class with holonomy index `j`, `0 <= j <= |p|/2`.
    AbelianJ(i64),
    /// Member of the one-parameter abelian family present when `p = 0`.
    AbelianTheta(f64),
    /// `rho_{theta, eps}` with `theta` in `[1/6, 1/3]`.
    Irreducible { theta: f64, eps: Branch },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FlatConnectionClass {
    pub kind: ClassKind,
    pub cs: Option<f64>,
    /// Set when the level crossing was a tangency rather than a sign change.
    pub tangential: bool,
}

impl FlatConnectionClass {
    fn new(kind: ClassKind) -> Self {
        FlatConnectionClass { kind, cs: None, tangential: false }
    }

    pub fn is_irreducible(&self) -> bool {
        matches!(self.kind, ClassKind::Irreducible { .. })
    }
}

const SPECIAL: [f64; 3] = [1.0 / 6.0, 0.25, 1.0 / 3.0];

fn snap(theta: f64) -> f64 {
    for s in SPECIAL {
        if (theta - s).abs() < 1e-10 {
            return s;
        }
    }
    theta
}

/// `p theta + q beta_eps(theta)`, integral exactly at filling classes.
pub fn level(surgery: &SurgeryCoefficient, theta: f64, eps: Branch) -> Result<f64> {
    Ok(surgery.p as f64 * theta + surgery.q as f64 * beta_eps(theta, eps)?)
}

fn level_unchecked(surgery: &SurgeryCoefficient, theta: f64, eps: Branch) -> f64 {
    level(surgery, theta, eps).expect("theta on the arc")
}

fn bisect(f: impl Fn(f64) -> f64, mut a: f64, mut b: f64) -> f64 {
    let mut fa = f(a);
    while b - a > 1e-14 {
        let m = 0.5 * (a + b);
        let fm = f(m);
        if fm == 0.0 {
            return m;
        }
        if (fm > 0.0) == (fa > 0.0) {
            a = m;
            fa = fm;
        } else {
            b = m;
        }
    }
    0.5 * (a + b)
}

// golden-section minimum of |f| on [a, b]
fn touch(f: impl Fn(f64) -> f64, mut a: f64, mut b: f64) -> (f64, f64) {
    let g = 0.5 * (5f64.sqrt() - 1.0);
    let mut c = b - g * (b - a);
    let mut d = a + g * (b - a);
    while b - a > 1e-13 {
        if f(c).abs() < f(d).abs() {
            b = d;
        } else {
            a = c;
        }
        c = b - g * (b - a);
        d = a + g * (b - a);
    }
    let x = 0.5 * (a + b);
    (x, f(x).abs())
}

// Solutions theta of level(theta) = m for one branch, with tangency flags.
fn roots_for_branch(surgery: &SurgeryCoefficient, eps: Branch, per_unit: usize) -> Vec<(f64, bool)> {
    let (a, b) = (1.0 / 6.0, 1.0 / 3.0);
    let coarse: Vec<f64> = (0..=64).map(|i| level_unchecked(surgery, a + (b - a) * i as f64 / 64.0, eps)).collect();
    let lo = coarse.iter().cloned().fold(f64::INFINITY, f64::min);
    let hi = coarse.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let n = ((hi - lo) * per_unit as f64).ceil().max(1000.0) as usize;
    let grid: Vec<f64> = (0..=n).map(|i| a + (b - a) * i as f64 / n as f64).collect();
    let vals: Vec<f64> = grid.iter().map(|&t| level_unchecked(surgery, t, eps)).collect();
    let vmin = vals.iter().cloned().fold(f64::INFINITY, f64::min);
    let vmax = vals.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let levels: Vec<i64> = ((vmin - 1e-9).ceil() as i64..=(vmax + 1e-9).floor() as i64).collect();

    let mut out: Vec<(f64, bool)> = levels
        .par_iter()
        .flat_map_iter(|&m| {
            let mf = m as f64;
            let f = |t: f64| level_unchecked(surgery, t, eps) - mf;
            let mut found = Vec::new();
            for s in SPECIAL {
                if f(s).abs() < 1e-9 {
                    found.push((s, false));
                }
            }
            for i in 0..n {
                let (f0, f1) = (vals[i] - mf, vals[i + 1] - mf);
                if f0 == 0.0 {
                    found.push((snap(grid[i]), false));
                } else if f0 * f1 < 0.0 {
                    found.push((snap(bisect(f, grid[i], grid[i + 1])), false));
                } else if i > 0 {
                    let fm = vals[i - 1] - mf;
                    let local_min = f0.abs() <= fm.abs() && f0.abs() <= f1.abs();
                    if local_min && fm * f0 > 0.0 && f0.abs() < 1e-4 {
                        let (x, v) = touch(f, grid[i - 1], grid[i + 1]);
                        if v < 1e-10 {
                            found.push((snap(x), true));
                        }
                    }
                }
            }
            if (vals[n] - mf).abs() < 1e-12 {
                found.push((snap(grid[n]), false));
            }
            found
        })
        .collect();
    out.sort_by(|x, y| x.0.partial_cmp(&y.0).unwrap());
    out.dedup_by(|x, y| (x.0 - y.0).abs() < 1e-9);
    out
}

/// Flat SU(2) connection classes on `M_{p/q}` at the default resolution.
pub fn enumerate_su2_moduli(surgery: &SurgeryCoefficient) -> Vec<FlatConnectionClass> {
    enumerate_su2_moduli_with(surgery, 10_000)
}

/// As [`enumerate_su2_moduli`] with `per_unit` grid points per unit change of
/// the level function.
pub fn enumerate_su2_moduli_with(surgery: &SurgeryCoefficient, per_unit: usize) -> Vec<FlatConnectionClass> {
    let mut out = Vec::new();
    if surgery.p == 0 {
        out.push(FlatConnectionClass::new(ClassKind::AbelianTheta(0.0)));
    } else {
        for j in 0..=surgery.p.abs() / 2 {
            out.push(FlatConnectionClass::new(ClassKind::AbelianJ(j)));
        }
    }
    for eps in [Branch::Plus, Branch::Minus] {
        for (theta, tangential) in roots_for_branch(surgery, eps, per_unit) {
            // u_+ = u_- at the ends of the arc
            if eps == Branch::Minus && (theta == 1.0 / 6.0 || theta == 1.0 / 3.0) {
                continue;
            }
            let mut c = FlatConnectionClass::new(ClassKind::Irreducible { theta, eps });
            c.tangential = tangential;
            out.push(c);
        }
    }
    out
}

/// Irreducible classes only, as `(theta, eps)`.
pub fn irreducible_classes(surgery: &SurgeryCoefficient) -> Vec<(f64, Branch)> {
    enumerate_su2_moduli(surgery)
        .into_iter()
        .filter_map(|c| match c.kind {
            ClassKind::Irreducible { theta, eps } => Some((theta, eps)),
            _ => None,
        })
        .collect()
}
