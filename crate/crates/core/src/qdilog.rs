//! Faddeev's quantum dilogarithm `S_gamma` with `gamma = pi / r`.
//!
//! Inside the strip `|Re zeta| < pi + gamma` it is the exponential of a
//! contour integral over `(-inf, -R] + semicircle + [R, inf)`. The two rays are
//! folded into one integral over `[R, inf)`, which is mapped onto `[0, 1)`.
//! Elsewhere it is continued with `(1 + e^{i zeta}) S(zeta + gamma) = S(zeta - gamma)`.

use crate::error::{Error, Result};
use crate::invariants::SurgeryCoefficient;
use crate::quad::{integrate, integrate_semi_infinite, GaussRule};
use crate::specfun::li2_principal;
use num_complex::Complex64;
use std::f64::consts::PI;

const ARC_NODES: usize = 64;
const MAX_PANELS: usize = 4000;

/// Parameters for evaluating `S_gamma` at level `r`.
#[derive(Debug, Clone)]
pub struct QDilogContext {
    pub r: u32,
    pub gamma: f64,
    pub contour_radius: f64,
    /// Rays are cut at `|t| = tail_cutoff`; infinite means no truncation.
    pub tail_cutoff: f64,
    pub quad_tol: f64,
    arc_s: Vec<(Complex64, Complex64)>,
    arc_i: Vec<(Complex64, Complex64)>,
}

/// A point of the strip where the integral representation is valid.
#[derive(Debug, Clone, Copy)]
pub struct StripPoint {
    pub zeta: Complex64,
    pub in_strip: bool,
}

/// `S_gamma(zeta) = base * num / den`, where `base` is evaluated at
/// `zeta - 2 gamma shifts` and the factors come from the functional equation.
#[derive(Debug, Clone, Copy)]
pub struct ShiftedValue {
    pub base: Complex64,
    pub num: Complex64,
    pub den: Complex64,
    pub shifts: i64,
}

impl ShiftedValue {
    pub fn value(&self) -> Complex64 {
        self.base * self.num / self.den
    }
}

// 1/sinh(w) - 1/w
fn csch_minus_inv(w: Complex64) -> Complex64 {
    if w.norm() < 0.1 {
        let w2 = w * w;
        let c = [-1.0 / 6.0, 7.0 / 360.0, -31.0 / 15120.0, 127.0 / 604800.0, -73.0 / 3421440.0];
        let mut acc = Complex64::new(0.0, 0.0);
        for k in c.iter().rev() {
            acc = acc * w2 + k;
        }
        acc * w
    } else {
        w.sinh().inv() - w.inv()
    }
}

impl QDilogContext {
    pub fn new(r: u32) -> Result<Self> {
        Self::with_params(r, 0.5, f64::INFINITY, 1e-14)
    }

    pub fn with_params(r: u32, contour_radius: f64, tail_cutoff: f64, quad_tol: f64) -> Result<Self> {
        if r < 4 {
            return Err(Error::InvalidParameter(format!("need r > 3 so that gamma < 1, got {r}")));
        }
        if !(contour_radius > 0.0 && contour_radius < 1.0) {
            return Err(Error::InvalidParameter(format!("contour radius {contour_radius} not in (0, 1)")));
        }
        if !(tail_cutoff > contour_radius) || !(quad_tol > 0.0) {
            return Err(Error::InvalidParameter("bad tail cutoff or tolerance".into()));
        }
        let gamma = PI / r as f64;
        let rule = GaussRule::new(ARC_NODES);
        let mut arc_s = Vec::with_capacity(ARC_NODES);
        let mut arc_i = Vec::with_capacity(ARC_NODES);
        for (s, w) in rule.on(0.0, PI) {
            let z = Complex64::from_polar(contour_radius, PI - s);
            let dz = -Complex64::i() * z * w;
            let sp = (z * PI).sinh();
            arc_s.push((z, dz / (sp * (z * gamma).sinh() * z)));
            arc_i.push((z, dz * csch_minus_inv(z * gamma) / (z * sp)));
        }
        Ok(QDilogContext { r, gamma, contour_radius, tail_cutoff, quad_tol, arc_s, arc_i })
    }

    pub fn strip_point(&self, zeta: Complex64) -> StripPoint {
        StripPoint { zeta, in_strip: zeta.re.abs() < PI + self.gamma }
    }

    fn rays<F: Fn(f64) -> Complex64>(&self, f: F, scale: f64) -> Result<Complex64> {
        let r0 = self.contour_radius;
        let abs_tol = self.quad_tol * scale.max(1.0);
        let res = if self.tail_cutoff.is_finite() {
            integrate(f, r0, self.tail_cutoff, abs_tol, self.quad_tol, MAX_PANELS)?
        } else {
            integrate_semi_infinite(f, r0, abs_tol, self.quad_tol, MAX_PANELS)?
        };
        Ok(res.value)
    }

    /// `log S_gamma(zeta)` from the contour integral; `|Re zeta| < pi + gamma`.
    pub fn log_s_gamma_strip(&self, zeta: Complex64) -> Result<Complex64> {
        let g = self.gamma;
        if !(zeta.re.abs() < PI + g) {
            return Err(Error::OutOfStrip { re: zeta.re, im: zeta.im, bound: PI + g });
        }
        let a = zeta - (PI + g);
        let b = -zeta - (PI + g);
        let ray = |t: f64| {
            let den = (-(-2.0 * PI * t).exp_m1()) * (-(-2.0 * g * t).exp_m1()) * t;
            ((a * t).exp() - (b * t).exp()) * (4.0 / den)
        };
        let arc: Complex64 = self.arc_s.iter().map(|(z, c)| c * (zeta * z).exp()).sum();
        let v = self.rays(ray, 1.0 / g)?;
        Ok((v + arc) * 0.25)
    }

    /// `S_gamma(zeta)` from the contour integral; `|Re zeta| < pi + gamma`.
    pub fn s_gamma_strip(&self, zeta: Complex64) -> Result<Complex64> {
        Ok(self.log_s_gamma_strip(zeta)?.exp())
    }

    /// Correction term `I_gamma(zeta)` with the `1/sinh(gamma z) - 1/(gamma z)`
    /// kernel; `|Re zeta| <= pi`.
    pub fn i_gamma(&self, zeta: Complex64) -> Result<Complex64> {
        let g = self.gamma;
        if !(zeta.re.abs() <= PI) {
            return Err(Error::OutOfStrip { re: zeta.re, im: zeta.im, bound: PI });
        }
        let a = zeta - PI;
        let b = -zeta - PI;
        let ray = |t: f64| {
            let gt = g * t;
            let h = if gt < 0.1 {
                csch_minus_inv(Complex64::new(gt, 0.0)).re
            } else {
                let e = (-gt).exp();
                2.0 * e / (1.0 - e * e) - 1.0 / gt
            };
            let den = (-(-2.0 * PI * t).exp_m1()) * t;
            ((a * t).exp() - (b * t).exp()) * (2.0 * h / den)
        };
        let arc: Complex64 = self.arc_i.iter().map(|(z, c)| c * (zeta * z).exp()).sum();
        let v = self.rays(ray, 1.0)?;
        Ok((v + arc) * 0.25)
    }

    /// `exp(Li2(-e^{i zeta}) / (2 i gamma) + I_gamma(zeta))`.
    pub fn s_gamma_dilog(&self, zeta: Complex64) -> Result<Complex64> {
        let li = li2_principal(-(Complex64::i() * zeta).exp());
        Ok((li / (Complex64::i() * 2.0 * self.gamma) + self.i_gamma(zeta)?).exp())
    }

    fn check_pole(&self, zeta: Complex64) -> Result<()> {
        // poles at -pi + 2 pi x_n, x_n = n/r + 1/(2r), n >= r
        let rf = self.r as f64;
        let u = (zeta.re + PI - self.gamma) * rf / (2.0 * PI);
        let n = u.round();
        if n >= rf {
            let pole = Complex64::new(-PI + 2.0 * PI * n / rf + self.gamma, 0.0);
            let dist = (zeta - pole).norm();
            if dist < 1e-8 {
                return Err(Error::NearPole { re: zeta.re, im: zeta.im, dist });
            }
        }
        Ok(())
    }

    /// Continuation into `C` in factored form; never fails on poles or zeros.
    pub fn s_gamma_shifted(&self, zeta: Complex64) -> Result<ShiftedValue> {
        let g = self.gamma;
        let k = (zeta.re / (2.0 * g)).round() as i64;
        let one = Complex64::new(1.0, 0.0);
        let i = Complex64::i();
        let mut num = one;
        let mut den = one;
        let mut z = zeta;
        if k > 0 {
            for _ in 0..k {
                // S(z) = S(z - 2g) / (1 + e^{i(z - g)})
                den *= one + (i * (z - g)).exp();
                z -= 2.0 * g;
            }
        } else {
            for _ in 0..(-k) {
                // S(z) = (1 + e^{i(z + g)}) S(z + 2g)
                num *= one + (i * (z + g)).exp();
                z += 2.0 * g;
            }
        }
        let base = self.s_gamma_strip(z)?;
        Ok(ShiftedValue { base, num, den, shifts: k })
    }

    /// Meromorphic `S_gamma(zeta)`; fails within `1e-8` of a pole.
    pub fn s_gamma(&self, zeta: Complex64) -> Result<Complex64> {
        self.check_pole(zeta)?;
        Ok(self.s_gamma_shifted(zeta)?.value())
    }

    /// `g_r(x) = S(pi - 2 pi x) / S(-pi + 2 pi x)`.
    pub fn g_r(&self, x: Complex64) -> Result<Complex64> {
        let a = self.s_gamma_shifted(Complex64::new(PI, 0.0) - x * (2.0 * PI))?;
        let b = self.s_gamma_shifted(x * (2.0 * PI) - PI)?;
        ratio(&a, &b)
    }

    /// `S(-pi + 2 pi (x - y)) / S(-pi + 2 pi (x + y))`.
    pub fn s_ratio(&self, x: Complex64, y: Complex64) -> Result<Complex64> {
        let a = self.s_gamma_shifted((x - y) * (2.0 * PI) - PI)?;
        let b = self.s_gamma_shifted((x + y) * (2.0 * PI) - PI)?;
        ratio(&a, &b)
    }

    /// Integrand `f_{n,r}(x, y)` of the double contour formula for `tau_r`.
    pub fn f_nr(&self, s: &SurgeryCoefficient, n: i64, x: Complex64, y: Complex64) -> Result<Complex64> {
        Ok(self.f_nr_prefactor(s, n, x, y, 1.0) * self.s_ratio(x, y)?)
    }

    /// Integrand `fbar_{n,r}(x, y)` of the contour formula for the conjugate invariant.
    pub fn fbar_nr(&self, s: &SurgeryCoefficient, n: i64, x: Complex64, y: Complex64) -> Result<Complex64> {
        Ok(self.f_nr_prefactor(s, n, x, y, -1.0) * self.s_ratio(x, y)?)
    }

    /// Everything in `f_{n,r}` except the `S` ratio. `conj = -1` gives the
    /// barred version.
    pub fn f_nr_prefactor(&self, s: &SurgeryCoefficient, n: i64, x: Complex64, y: Complex64, conj: f64) -> Complex64 {
        let qf = s.q as f64;
        let rf = self.r as f64;
        let nf = n as f64;
        let sn = ((x - 2.0 * nf * s.d as f64) * (PI / qf)).sin();
        // r d n^2 / q reduced exactly
        let aq = s.q.abs() as i128;
        let num =
            ((self.r as i128) * (s.d as i128) * (n as i128) * (n as i128) * (s.q.signum() as i128)).rem_euclid(aq);
        let outer = conj * num as f64 / aq as f64;
        let inner = (x * x * (s.p as f64 / (4.0 * qf)) - x * (nf / qf)) * conj - x * y;
        sn * (Complex64::i() * 2.0 * PI * (Complex64::new(outer, 0.0) + inner * rf)).exp()
    }
}

fn ratio(a: &ShiftedValue, b: &ShiftedValue) -> Result<Complex64> {
    let v = a.base * a.num * b.den / (a.den * b.base * b.num);
    if v.is_finite() {
        Ok(v)
    } else {
        Err(Error::NearPole { re: f64::NAN, im: f64::NAN, dist: 0.0 })
    }
}
