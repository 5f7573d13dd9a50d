//! Phase functions of the double contour formula, their stationary points and
//! Hessians, and the leading large-`r` asymptotics assembled from them.

use crate::chernsimons::{cs_irreducible, dist_z};
use crate::error::{Error, Result};
use crate::invariants::{tau_bar, LevelContext, SurgeryCoefficient};
use crate::repvar::{cis_turns, enumerate_su2_moduli, u_pm, Branch, ClassKind, FlatConnectionClass};
use crate::specfun::{cl2, li2_side, log, Side};
use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::Serialize;
use std::f64::consts::PI;

fn c64(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn two_pi_i() -> Complex64 {
    c64(0.0, 2.0 * PI)
}

/// Hyperbolic volume of the figure-eight complement, `2 Cl2(pi/3)`.
pub fn volume() -> f64 {
    2.0 * cl2(PI / 3.0)
}

/// Indices of `Psi_n^{a,b}(x, y) = a x + b y + Phi_n(x, y)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct PhaseIndex {
    pub a: i64,
    pub b: i64,
    pub n: i64,
    pub surgery: SurgeryCoefficient,
}

impl PhaseIndex {
    pub fn new(a: i64, b: i64, n: i64, surgery: SurgeryCoefficient) -> Self {
        PhaseIndex { a, b, n, surgery }
    }

    /// Index of `Phi_n^{a,b} = a(x+y) + b(x-y) + Phi_n`, as a `Psi` index.
    pub fn from_phi(a: i64, b: i64, n: i64, surgery: SurgeryCoefficient) -> Self {
        PhaseIndex { a: a + b, b: a - b, n, surgery }
    }
}

fn lattice(x: Complex64, y: Complex64) -> (Complex64, Complex64, Complex64, Complex64) {
    let z = cis_c(x);
    let w = cis_c(y);
    (z, w, z * w, z / w)
}

// e^{2 pi i x}, exact in phase for real parts at quarter turns
fn cis_c(x: Complex64) -> Complex64 {
    cis_turns(x.re) * (-2.0 * PI * x.im).exp()
}

fn on_cut(z: Complex64) -> bool {
    z.im == 0.0 && z.re > 1.0
}

// the non-dilogarithm part of Psi, with d n^2 / q reduced exactly
fn psi_poly(idx: &PhaseIndex, x: Complex64, y: Complex64) -> Complex64 {
    let s = &idx.surgery;
    let q = s.q as f64;
    let aq = s.q.abs() as i128;
    let dn2 = ((s.d as i128) * (idx.n as i128) * (idx.n as i128)).rem_euclid(aq) as f64 / aq as f64 * q.signum();
    x * idx.a as f64 + y * idx.b as f64 - dn2 - x * x * (s.p as f64 / (4.0 * q)) + x * (idx.n as f64 / q) - x * y
}

/// `Psi_n^{a,b}(x, y)` on the principal branch; fails when `e^{2 pi i (x +- y)}`
/// lies exactly on `(1, inf)`.
pub fn psi(idx: &PhaseIndex, x: Complex64, y: Complex64) -> Result<Complex64> {
    let (_, _, zp, zm) = lattice(x, y);
    for v in [zp, zm] {
        if on_cut(v) {
            return Err(Error::CutAmbiguity(v.re));
        }
    }
    Ok(psi_side(idx, x, y, Side::Below))
}

/// `Psi_n^{a,b}(x, y)` with arguments on the cut taken from `side`.
pub fn psi_side(idx: &PhaseIndex, x: Complex64, y: Complex64, side: Side) -> Complex64 {
    let (_, _, zp, zm) = lattice(x, y);
    psi_poly(idx, x, y) + (li2_side(zp, side) - li2_side(zm, side)) / (4.0 * PI * PI)
}

/// `(dPsi/dx, dPsi/dy)`.
pub fn grad_psi(idx: &PhaseIndex, x: Complex64, y: Complex64) -> Result<(Complex64, Complex64)> {
    let (_, _, zp, zm) = lattice(x, y);
    if (zp - 1.0).norm() == 0.0 || (zm - 1.0).norm() == 0.0 {
        return Err(Error::InvalidParameter("e^{2 pi i (x +- y)} = 1".into()));
    }
    let s = &idx.surgery;
    let q = s.q as f64;
    let lp = log(1.0 - zp);
    let lm = log(1.0 - zm);
    let gx = c64(idx.a as f64, 0.0) - y - x * (s.p as f64 / (2.0 * q)) + idx.n as f64 / q + (lp - lm) / two_pi_i();
    let gy = c64(idx.b as f64, 0.0) - x + (lp + lm) / two_pi_i();
    Ok((gx, gy))
}

/// Symmetric Hessian `[[h11, h12], [h12, h22]]` with its determinant.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Hessian {
    pub h11: Complex64,
    pub h12: Complex64,
    pub h22: Complex64,
    pub det: Complex64,
}

impl Hessian {
    fn new(h11: Complex64, h12: Complex64, h22: Complex64) -> Self {
        Hessian { h11, h12, h22, det: h11 * h22 - h12 * h12 }
    }
}

/// Hessian of `Psi` at an arbitrary point, from differentiating the gradient.
pub fn hessian(idx: &PhaseIndex, x: Complex64, y: Complex64) -> Hessian {
    let (_, _, zp, zm) = lattice(x, y);
    let a = zp / (1.0 - zp);
    let b = zm / (1.0 - zm);
    let pq = idx.surgery.p as f64 / (2.0 * idx.surgery.q as f64);
    Hessian::new(b - a - pq, -1.0 - a - b, b - a)
}

/// Hessian in the reduced form valid at stationary points:
/// `h11 = 1/w - w - p/2q`, `h12 = z - 1/z`, `h22 = 1/w - w`.
pub fn hessian_at_critical(idx: &PhaseIndex, x: Complex64, y: Complex64) -> Hessian {
    let (z, w, _, _) = lattice(x, y);
    let pq = idx.surgery.p as f64 / (2.0 * idx.surgery.q as f64);
    Hessian::new(w.inv() - w - pq, z - z.inv(), w.inv() - w)
}

/// `det H = 1 - 2(z + 1/z) + (p/2q)(w - 1/w)`.
pub fn det_hessian_zw(s: &SurgeryCoefficient, z: Complex64, w: Complex64) -> Complex64 {
    1.0 - 2.0 * (z + z.inv()) + (w - w.inv()) * (s.p as f64 / (2.0 * s.q as f64))
}

/// `det H = 1 - 4 cos(2 pi x) + (p/q) sinh(2 pi Im y)` for points of the SU(2)
/// set, where `w - 1/w = 2 sinh(2 pi Im y)`.
pub fn det_hessian_on_s(s: &SurgeryCoefficient, x: f64, im_y: f64) -> f64 {
    1.0 - 4.0 * (2.0 * PI * x).cos() + s.p as f64 / s.q as f64 * (2.0 * PI * im_y).sinh()
}

/// `det H = 1 - 4 cos(2 pi x) +- (p/q) sqrt(cos^2 - cos - 3/4)` for `w = w_+-(x)`.
pub fn det_hessian_wpm(s: &SurgeryCoefficient, x: f64, sign: Branch) -> Result<f64> {
    let c = (2.0 * PI * x).cos();
    let disc = wpm_disc(x)?;
    Ok(1.0 - 4.0 * c + sign.sign() * s.p as f64 / s.q as f64 * disc.sqrt())
}

fn wpm_disc(x: f64) -> Result<f64> {
    let c = (2.0 * PI * x).cos();
    if c > -0.5 + 1e-12 {
        return Err(Error::InvalidParameter(format!("cos(2 pi x) = {c} outside [-1, -1/2]")));
    }
    Ok((c * c - c - 0.75).max(0.0))
}

/// Negative real root `w_+-(x) = cos 2 pi x - 1/2 +- sqrt(...)` of
/// `w^2 + (1 - 2 cos 2 pi x) w + 1 = 0`.
pub fn w_pm(x: f64, sign: Branch) -> Result<f64> {
    let c = (2.0 * PI * x).cos();
    Ok(c - 0.5 + sign.sign() * wpm_disc(x)?.sqrt())
}

/// Residuals of the exponentiated stationary equations at `v = e^{pi i x}`,
/// `w = e^{2 pi i y}`.
pub fn stationary_residuals(s: &SurgeryCoefficient, x: Complex64, y: Complex64) -> (f64, f64) {
    let v = (Complex64::i() * PI * x).exp();
    let w = cis_c(y);
    let v2 = v * v;
    let r1 = v.powi(-(s.p as i32)) - ((w - v2) / (1.0 - v2 * w)).powi(s.q as i32);
    let r2 = (1.0 - v2 * w) * (w - v2) - v2 * w;
    (r1.norm(), r2.norm())
}

/// Outcome of the positive definiteness search.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum WitnessMethod {
    ClosedForm,
    GridSearch,
    NotFound,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PositiveDefiniteness {
    pub witness: Option<(Complex64, Complex64)>,
    pub method: WitnessMethod,
}

/// Stationary point of a phase function.
#[derive(Debug, Clone, Serialize)]
pub struct CriticalPoint {
    pub x: Complex64,
    pub y: Complex64,
    pub index: PhaseIndex,
    pub psi_value: Complex64,
    pub grad_norm: f64,
    pub hessian: Hessian,
    pub det_h: Complex64,
    pub in_s: bool,
    pub nondegenerate: bool,
    pub positive_definite: PositiveDefiniteness,
    pub rep_class: Option<FlatConnectionClass>,
}

impl CriticalPoint {
    /// `w = e^{2 pi i y}`.
    pub fn w(&self) -> Complex64 {
        cis_c(self.y)
    }
}

fn nearest_int(v: Complex64, what: &str) -> Result<i64> {
    let k = v.re.round();
    if (v.re - k).abs() > 1e-6 || v.im.abs() > 1e-6 {
        return Err(Error::NotFound(format!("{what} = {v} is not integral")));
    }
    Ok(k as i64)
}

/// The stationary point attached to `rho_{theta, eps}`: `x = 2 theta`,
/// `y = Log(1 + u_eps(theta)) / 2 pi i`, `a = 0` and the unique `b`, `n`.
/// Works for `theta` in either half of the arc.
pub fn critical_point_at(s: &SurgeryCoefficient, theta: f64, eps: Branch) -> Result<CriticalPoint> {
    let w = 1.0 + u_pm(theta, eps)?;
    let x = c64(2.0 * theta, 0.0);
    // w < 0, so Re y = 1/2
    let y = c64(0.5, -w.abs().ln() / (2.0 * PI));
    let z = cis_turns(2.0 * theta);
    let lp = log(1.0 - z * w);
    let lm = log(1.0 - z / w);
    let b = nearest_int(x - (lp + lm) / two_pi_i(), "b")?;
    let n = nearest_int(c64(s.p as f64 * theta, 0.0) + y * s.q as f64 + (lm - lp) / two_pi_i() * s.q as f64, "n")?;
    let index = PhaseIndex::new(0, b, n, *s);
    let (gx, gy) = grad_psi(&index, x, y)?;
    let h = hessian_at_critical(&index, x, y);
    let mut pt = CriticalPoint {
        x,
        y,
        index,
        psi_value: psi_side(&index, x, y, Side::Below),
        grad_norm: (gx.norm_sqr() + gy.norm_sqr()).sqrt(),
        hessian: h,
        det_h: h.det,
        in_s: true,
        nondegenerate: true,
        positive_definite: PositiveDefiniteness { witness: None, method: WitnessMethod::NotFound },
        rep_class: None,
    };
    pt.nondegenerate = classify_nondegenerate(s, &pt).nondegenerate;
    pt.positive_definite = positive_definite_witness(&pt);
    Ok(pt)
}

/// Stationary points in the SU(2) set, one per irreducible flat connection
/// class, each with `x` in `[1/3, 2/3]`.
pub fn su2_critical_points(s: &SurgeryCoefficient) -> Result<Vec<CriticalPoint>> {
    let mut out = Vec::new();
    for class in enumerate_su2_moduli(s) {
        if let ClassKind::Irreducible { theta, eps } = class.kind {
            let mut pt = critical_point_at(s, theta, eps)?;
            if pt.grad_norm > 1e-9 {
                return Err(Error::NotFound(format!(
                    "gradient {:e} at theta = {theta} is not stationary",
                    pt.grad_norm
                )));
            }
            let cs = cs_irreducible(s, theta, eps)?;
            pt.rep_class = Some(FlatConnectionClass { cs: Some(cs), ..class });
            out.push(pt);
        }
    }
    Ok(out)
}

/// Row of the comparison between phase values and Chern-Simons invariants.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CsPsiRow {
    pub theta: f64,
    pub eps: Branch,
    pub b: i64,
    pub n: i64,
    pub psi: f64,
    pub cs: f64,
    pub defect: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CsPsiReport {
    pub p: i64,
    pub q: i64,
    pub rows: Vec<CsPsiRow>,
    pub max_defect: f64,
}

/// Distance to `Z` of `Psi - CS` at every SU(2) stationary point.
pub fn verify_cs_equals_psi(s: &SurgeryCoefficient) -> Result<CsPsiReport> {
    let mut rows = Vec::new();
    for pt in su2_critical_points(s)? {
        let class = pt.rep_class.expect("linked class");
        let (theta, eps) = match class.kind {
            ClassKind::Irreducible { theta, eps } => (theta, eps),
            _ => unreachable!(),
        };
        let cs = class.cs.expect("annotated");
        rows.push(CsPsiRow {
            theta,
            eps,
            b: pt.index.b,
            n: pt.index.n,
            psi: pt.psi_value.re,
            cs,
            defect: dist_z(pt.psi_value.re - cs),
        });
    }
    let max_defect = rows.iter().map(|r| r.defect).fold(0.0, f64::max);
    Ok(CsPsiReport { p: s.p, q: s.q, rows, max_defect })
}

/// Nondegeneracy verdict for a point of the SU(2) set.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Classification {
    pub nondegenerate: bool,
    pub degenerate_candidate: bool,
    pub exceptional_cos: Option<f64>,
    pub det_abs: f64,
}

/// `cos(2 pi x)` at which a point may degenerate when `|p/q| > sqrt(20)`.
pub fn exceptional_cos(ratio: f64) -> Option<f64> {
    let pp = ratio * ratio;
    if pp <= 20.0 {
        return None;
    }
    Some(0.5 + (4.0 - ratio.abs() * (pp - 15.0).sqrt()) / (pp - 16.0))
}

/// Nondegenerate below `|p/q| = sqrt(20)`; above it, only the exceptional
/// cosine on the designated root can degenerate.
pub fn classify_nondegenerate(s: &SurgeryCoefficient, pt: &CriticalPoint) -> Classification {
    let det_abs = pt.det_h.norm();
    let ratio = s.ratio();
    let exc = exceptional_cos(ratio);
    let mut candidate = false;
    if let Some(c0) = exc {
        let c = (2.0 * PI * pt.x.re).cos();
        let w = pt.w().re;
        let designated = if ratio < 0.0 { Branch::Plus } else { Branch::Minus };
        let on_root = w_pm(pt.x.re, designated).map(|wd| (wd - w).abs() < 1e-8).unwrap_or(false);
        candidate = (c - c0).abs() < 1e-6 && on_root;
    }
    Classification { nondegenerate: !candidate, degenerate_candidate: candidate, exceptional_cos: exc, det_abs }
}

/// Whether `Im(diag(a, b) H diag(a, b))` is positive definite.
pub fn is_positive_definite_with(h: &Hessian, alpha: Complex64, beta: Complex64) -> bool {
    let a11 = (alpha * alpha * h.h11).im;
    let a12 = (alpha * beta * h.h12).im;
    let a22 = (beta * beta * h.h22).im;
    a11 > 1e-12 && a11 * a22 - a12 * a12 > 1e-12
}

/// A pair `(alpha, beta)` on the unit circle making `Im(A)` positive definite.
pub fn positive_definite_witness(pt: &CriticalPoint) -> PositiveDefiniteness {
    let h = &pt.hessian;
    let e = |k: f64| Complex64::from_polar(1.0, k * PI / 4.0);
    let mut picks = Vec::new();
    let (h11, h22) = (h.h11.re, h.h22.re);
    if h11 > 0.0 && h22 > 0.0 {
        picks.push((e(1.0), e(1.0)));
    } else if h11 < 0.0 && h22 < 0.0 {
        picks.push((e(-1.0), e(-1.0)));
    } else {
        let mu = if h11 > 0.0 { 1.0 } else { -1.0 };
        picks.push((e(mu), e(-mu)));
    }
    for (a, b) in picks {
        if is_positive_definite_with(h, a, b) {
            return PositiveDefiniteness { witness: Some((a, b)), method: WitnessMethod::ClosedForm };
        }
    }
    for i in 0..360 {
        let a = Complex64::from_polar(1.0, 2.0 * PI * i as f64 / 360.0);
        for j in 0..360 {
            let b = Complex64::from_polar(1.0, 2.0 * PI * j as f64 / 360.0);
            if is_positive_definite_with(h, a, b) {
                return PositiveDefiniteness { witness: Some((a, b)), method: WitnessMethod::GridSearch };
            }
        }
    }
    PositiveDefiniteness { witness: None, method: WitnessMethod::NotFound }
}

/// How the integer phases `sigma` of the asymptotic terms are chosen.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SigmaMode {
    Zero,
    Calibrate,
}

impl std::str::FromStr for SigmaMode {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "zero" => Ok(SigmaMode::Zero),
            "calibrate" => Ok(SigmaMode::Calibrate),
            _ => Err(Error::InvalidParameter(format!("unknown sigma mode {s}"))),
        }
    }
}

/// One flat connection's contribution `e^{2 pi i r cs} amplitude`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AsymptoticTerm {
    pub theta: f64,
    pub eps: Branch,
    pub cs: f64,
    /// `sin(pi (x - 2 n d)/q) |det H|^{-1/2}` without `m` and the `sigma` phase.
    pub base: f64,
    pub multiplicity: i64,
    pub sigma: i64,
    pub amplitude: Complex64,
}

impl AsymptoticTerm {
    fn with_sigma(mut self, sigma: i64) -> Self {
        self.sigma = sigma.rem_euclid(4);
        self.amplitude = Complex64::from_polar(self.multiplicity as f64 * self.base, PI * self.sigma as f64 / 2.0);
        self
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AsymptoticPrediction {
    pub p: i64,
    pub q: i64,
    pub front: Complex64,
    pub terms: Vec<AsymptoticTerm>,
}

impl AsymptoticPrediction {
    /// Value of the prediction at level `r`.
    pub fn evaluate(&self, r: u32) -> Complex64 {
        let sum: Complex64 = self
            .terms
            .iter()
            .map(|t| {
                // r cs mod 1 first, to keep the phase accurate at large r
                let ph = (r as f64 * t.cs).rem_euclid(1.0);
                Complex64::from_polar(1.0, 2.0 * PI * ph) * t.amplitude
            })
            .sum();
        self.front * sum
    }

    pub fn sigmas(&self) -> Vec<i64> {
        self.terms.iter().map(|t| t.sigma).collect()
    }
}

/// `sign(q)/(4 sqrt|q|) e^{3 pi i sign(pq)/4}`.
pub fn front_constant(s: &SurgeryCoefficient) -> Complex64 {
    let spq = (s.p.signum() * s.q.signum()) as f64;
    Complex64::from_polar(s.q.signum() as f64 / (4.0 * (s.q.abs() as f64).sqrt()), 0.75 * PI * spq)
}

/// Terms from all SU(2) stationary points with multiplicity `m` and `sigma = 0`.
/// Defined for every `p/q`; for `p = 0` it gives the irreducible part only.
pub fn asymptotic_terms(s: &SurgeryCoefficient, m: i64) -> Result<AsymptoticPrediction> {
    let pts = su2_critical_points(s)?;
    let mut terms = Vec::new();
    for pt in &pts {
        let cls = classify_nondegenerate(s, pt);
        if cls.degenerate_candidate {
            return Err(Error::InvalidParameter(format!(
                "degenerate candidate at x = {} (|det H| = {:e})",
                pt.x.re, cls.det_abs
            )));
        }
        let class = pt.rep_class.expect("linked class");
        let (theta, eps) = match class.kind {
            ClassKind::Irreducible { theta, eps } => (theta, eps),
            _ => unreachable!(),
        };
        let x = pt.x.re;
        let det = det_hessian_on_s(s, x, pt.y.im);
        let sn = (PI / s.q as f64 * (x - 2.0 * (pt.index.n * s.d) as f64)).sin();
        let t = AsymptoticTerm {
            theta,
            eps,
            cs: class.cs.expect("annotated"),
            base: sn / det.abs().sqrt(),
            multiplicity: m,
            sigma: 0,
            amplitude: c64(0.0, 0.0),
        };
        terms.push(t.with_sigma(0));
    }
    Ok(AsymptoticPrediction { p: s.p, q: s.q, front: front_constant(s), terms })
}

/// Levels used to fit the `sigma` phases; disjoint from the usual test levels.
pub const CALIBRATION_LEVELS: [u32; 12] = [30, 31, 32, 33, 34, 35, 36, 37, 38, 39, 40, 41];

/// Fit `sigma` per term against the exact conjugate invariant by complex
/// least squares over `levels`, rounding each fitted phase to a multiple of `pi/2`.
pub fn calibrate_sigma(pred: &AsymptoticPrediction, levels: &[u32]) -> Result<AsymptoticPrediction> {
    let s = SurgeryCoefficient::new(pred.p, pred.q)?;
    let k = pred.terms.len();
    if k == 0 {
        return Ok(pred.clone());
    }
    let rows = levels.len();
    let mut a = DMatrix::<Complex64>::zeros(rows, k);
    let mut rhs = DVector::<Complex64>::zeros(rows);
    for (i, &r) in levels.iter().enumerate() {
        let ctx = LevelContext::new(r)?;
        rhs[i] = tau_bar(&ctx, &s);
        for (j, t) in pred.terms.iter().enumerate() {
            let ph = (r as f64 * t.cs).rem_euclid(1.0);
            a[(i, j)] = pred.front * Complex64::from_polar(t.multiplicity as f64 * t.base, 2.0 * PI * ph);
        }
    }
    let svd = a.svd(true, true);
    let coef = svd.solve(&rhs, 1e-10).map_err(|e| Error::NotFound(format!("sigma fit failed: {e}")))?;
    let mut out = pred.clone();
    for (j, t) in out.terms.iter_mut().enumerate() {
        let sigma = (coef[j].arg() / (PI / 2.0)).round() as i64;
        *t = t.with_sigma(sigma);
    }
    Ok(out)
}

/// Prediction for `tau_bar_r(M_{p/q})`, `p != 0`, with its term data.
pub fn leading_tau_asymptotics(
    s: &SurgeryCoefficient,
    r: u32,
    m: i64,
    mode: SigmaMode,
) -> Result<(Complex64, AsymptoticPrediction)> {
    if s.p == 0 {
        return Err(Error::InvalidParameter("the leading asymptotics formula needs p/q != 0".into()));
    }
    let mut pred = asymptotic_terms(s, m)?;
    if mode == SigmaMode::Calibrate {
        pred = calibrate_sigma(&pred, &CALIBRATION_LEVELS)?;
    }
    Ok((pred.evaluate(r), pred))
}

fn check_lattice(x: Complex64) -> Result<()> {
    if (x.re - x.re.round()).abs() < 1e-14 {
        return Err(Error::InvalidParameter(format!("Re x = {} is an integer", x.re)));
    }
    Ok(())
}

/// `Phi(x) = (Li2(e^{-2 pi i x}) - Li2(e^{2 pi i x})) / 2 pi i`.
pub fn fig8_phase(x: Complex64) -> Result<Complex64> {
    check_lattice(x)?;
    let z = (two_pi_i() * x).exp();
    Ok((li2_side(z.inv(), Side::Below) - li2_side(z, Side::Below)) / two_pi_i())
}

/// `Phi''(x) = 2 pi i (z + 1)/(z - 1)`, `z = e^{2 pi i x}`.
pub fn fig8_phase_d2(x: Complex64) -> Result<Complex64> {
    check_lattice(x)?;
    let z = (two_pi_i() * x).exp();
    Ok(two_pi_i() * (z + 1.0) / (z - 1.0))
}

/// `3^{-1/4} r^{3/2} exp(r Vol / 2 pi)`.
pub fn jones_leading(r: u32) -> f64 {
    let rf = r as f64;
    3f64.powf(-0.25) * rf.powf(1.5) * (rf * volume() / (2.0 * PI)).exp()
}

/// General stationary point `(v, w)` in `(C*)^2`, with `v = e^{pi i x}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct StationarySolution {
    pub v: Complex64,
    pub w: Complex64,
    pub residual: f64,
}

impl StationarySolution {
    /// Whether the point lies in the SU(2) set: `|v| = 1`, `w < 0`.
    pub fn in_s(&self) -> bool {
        (self.v.norm() - 1.0).abs() < 1e-9 && self.w.im.abs() < 1e-9 && self.w.re < 0.0
    }
}

// exponentiated stationary system with w given by the quadratic in z = v^2
fn stationary_system(s: &SurgeryCoefficient, v: Complex64, w: Complex64) -> (Complex64, Complex64) {
    let z = v * v;
    let g1 = w * w - (z + z.inv() - 1.0) * w + 1.0;
    let qa = s.q.unsigned_abs() as i32;
    let (num, den) = ((1.0 - z * w).powi(qa), (w - z).powi(qa));
    let g2 = if s.q > 0 { v.powi(-(s.p as i32)) * num - den } else { v.powi(-(s.p as i32)) * den - num };
    (g1, g2)
}

/// Solutions of the exponentiated stationary equations found by Newton's
/// method from a polar grid of starts in `v`, each with both roots `w` of the
/// quadratic as initial guesses.
pub fn stationary_solutions(s: &SurgeryCoefficient) -> Vec<StationarySolution> {
    let mut found: Vec<StationarySolution> = Vec::new();
    let radii = [0.6, 0.85, 1.0, 1.2, 1.6];
    for &rad in &radii {
        for k in 0..48 {
            let v0 = Complex64::from_polar(rad, 2.0 * PI * (k as f64 + 0.5) / 48.0);
            let z = v0 * v0;
            let bq = z + z.inv() - 1.0;
            let disc = (bq * bq - 4.0).sqrt();
            for w0 in [(bq + disc) / 2.0, (bq - disc) / 2.0] {
                if let Some(sol) = newton2(s, v0, w0) {
                    if !found.iter().any(|f| (f.v - sol.v).norm() < 1e-7 && (f.w - sol.w).norm() < 1e-7) {
                        found.push(sol);
                    }
                }
            }
        }
    }
    found
}

fn newton2(s: &SurgeryCoefficient, mut v: Complex64, mut w: Complex64) -> Option<StationarySolution> {
    let h = 1e-7;
    for _ in 0..100 {
        let (g1, g2) = stationary_system(s, v, w);
        let res = (g1.norm_sqr() + g2.norm_sqr()).sqrt();
        let scale = 1.0 + v.norm().powi(s.p.abs() as i32 + 2 * s.q.abs() as i32) + w.norm().powi(2 * s.q.abs() as i32);
        if res < 1e-13 * scale {
            if v.norm() < 1e-6 || w.norm() < 1e-6 || !v.is_finite() || !w.is_finite() {
                return None;
            }
            return Some(StationarySolution { v, w, residual: res });
        }
        let (a1, a2) = stationary_system(s, v + h, w);
        let (b1, b2) = stationary_system(s, v, w + h);
        let j11 = (a1 - g1) / h;
        let j21 = (a2 - g2) / h;
        let j12 = (b1 - g1) / h;
        let j22 = (b2 - g2) / h;
        let det = j11 * j22 - j12 * j21;
        if det.norm() == 0.0 || !det.is_finite() {
            return None;
        }
        v -= (j22 * g1 - j12 * g2) / det;
        w -= (j11 * g2 - j21 * g1) / det;
        if !v.is_finite() || !w.is_finite() || v.norm() > 1e3 || w.norm() > 1e3 {
            return None;
        }
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sc(p: i64, q: i64) -> SurgeryCoefficient {
        SurgeryCoefficient::new(p, q).unwrap()
    }

    #[test]
    fn w_roots() {
        let s5 = 5f64.sqrt();
        assert!((w_pm(0.5, Branch::Plus).unwrap() - (-3.0 + s5) / 2.0).abs() < 1e-14);
        assert!((w_pm(0.5, Branch::Minus).unwrap() - (-3.0 - s5) / 2.0).abs() < 1e-14);
        let (a, b) = (w_pm(0.4, Branch::Plus).unwrap(), w_pm(0.4, Branch::Minus).unwrap());
        assert!((a * b - 1.0).abs() < 1e-14);
        let c = (2.0 * PI * 0.4).cos();
        assert!((a * a + (1.0 - 2.0 * c) * a + 1.0).abs() < 1e-14);
        assert!(w_pm(0.1, Branch::Plus).is_err());
    }

    #[test]
    fn zero_surgery_points() {
        let s = sc(0, 1);
        let pts = su2_critical_points(&s).unwrap();
        assert_eq!(pts.len(), 2);
        let s5 = 5f64.sqrt();
        for pt in &pts {
            assert_eq!(pt.x.re, 0.5);
            assert!((pt.det_h - 5.0).norm() < 1e-9);
            let w = pt.w().re;
            assert!((w - (-3.0 + s5) / 2.0).abs() < 1e-12 || (w - (-3.0 - s5) / 2.0).abs() < 1e-12);
            let r = pt.psi_value.re.rem_euclid(1.0);
            assert!((r - 0.2).abs() < 1e-9 || (r - 0.8).abs() < 1e-9, "{r}");
            assert!(pt.positive_definite.witness.is_some());
            assert!((pt.hessian.h22.re.abs() - s5).abs() < 1e-12);
        }
    }

    #[test]
    fn b_table() {
        for (p, q) in [(1, 1), (5, 2), (-7, 3), (11, 1), (0, 1), (8, 3)] {
            let s = sc(p, q);
            for pt in su2_critical_points(&s).unwrap() {
                let th = pt.x.re / 2.0;
                let expect = if th <= 0.25 { 0 } else { 1 };
                assert_eq!(pt.index.b, expect, "{p}/{q} theta = {th}");
            }
        }
    }

    #[test]
    fn hessian_forms_agree() {
        for (p, q) in [(1, 1), (3, 1), (-5, 2), (7, 3), (13, 2)] {
            let s = sc(p, q);
            for pt in su2_critical_points(&s).unwrap() {
                let direct = hessian(&pt.index, pt.x, pt.y);
                let reduced = pt.hessian;
                assert!((direct.h11 - reduced.h11).norm() < 1e-10);
                assert!((direct.h12 - reduced.h12).norm() < 1e-10);
                assert!((direct.h22 - reduced.h22).norm() < 1e-10);
                let sin = (2.0 * PI * pt.x.re).sin();
                assert!((reduced.h12 - c64(0.0, 2.0 * sin)).norm() < 1e-12);
                let z = cis_c(pt.x);
                assert!((det_hessian_zw(&s, z, pt.w()) - pt.det_h).norm() < 1e-10);
                assert!((det_hessian_on_s(&s, pt.x.re, pt.y.im) - pt.det_h.re).abs() < 1e-10);
                let br = if pt.w().re > -1.0 { Branch::Plus } else { Branch::Minus };
                assert!((det_hessian_wpm(&s, pt.x.re, br).unwrap() - pt.det_h.re).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn exceptional_cos_matches_quadratic() {
        let pp: f64 = 25.0;
        let a = 16.0 - pp;
        let b = pp - 8.0;
        let c = 1.0 + 0.75 * pp;
        let disc: f64 = (b * b - 4.0 * a * c).sqrt();
        let roots = [(-b + disc) / (2.0 * a), (-b - disc) / (2.0 * a)];
        let e = exceptional_cos(5.0).unwrap();
        assert!(roots.iter().any(|r| (r - e).abs() < 1e-12), "{e} {roots:?}");
        assert!(exceptional_cos(4.0).is_none());
    }

    #[test]
    fn figure_eight_phase() {
        let vol = volume();
        assert!((fig8_phase_d2(c64(1.0 / 6.0, 0.0)).unwrap() - 2.0 * PI * 3f64.sqrt()).norm() < 1e-12);
        assert!((fig8_phase_d2(c64(-1.0 / 6.0, 0.0)).unwrap() + 2.0 * PI * 3f64.sqrt()).norm() < 1e-12);
        assert!((fig8_phase(c64(5.0 / 6.0, 0.0)).unwrap() - vol / (2.0 * PI)).norm() < 1e-12);
        assert!((fig8_phase(c64(1.0 / 6.0, 0.0)).unwrap() + vol / (2.0 * PI)).norm() < 1e-12);
        // Phi' = Log(1 - z) + Log(1 - 1/z) vanishes at +-1/6
        for x in [1.0 / 6.0, 5.0 / 6.0] {
            let h = 1e-6;
            let d = (fig8_phase(c64(x + h, 0.0)).unwrap() - fig8_phase(c64(x - h, 0.0)).unwrap()) / (2.0 * h);
            assert!(d.norm() < 1e-6);
        }
        assert!(fig8_phase(c64(1.0, 0.3)).is_err());
    }

    #[test]
    fn zero_surgery_irreducible_part() {
        let s = sc(0, 1);
        let mut pred = asymptotic_terms(&s, 4).unwrap();
        for t in pred.terms.iter_mut() {
            *t = t.with_sigma(2);
        }
        for r in [5, 6, 17, 40] {
            let expect = -(2.0 / 5f64.sqrt()) * (2.0 * PI * r as f64 / 5.0).cos();
            assert!((pred.evaluate(r) - expect).norm() < 1e-9);
        }
    }

    #[test]
    fn newton_solutions_contain_su2_points() {
        for (p, q) in [(1, 1), (5, 2), (-3, 1)] {
            let s = sc(p, q);
            let sols = stationary_solutions(&s);
            let pts = su2_critical_points(&s).unwrap();
            for pt in &pts {
                let v = (Complex64::i() * PI * pt.x).exp();
                let hit = sols.iter().any(|so| {
                    so.in_s()
                        && (so.w - pt.w()).norm() < 1e-7
                        && ((so.v - v).norm() < 1e-7
                            || (so.v + v).norm() < 1e-7
                            || (so.v - v.inv()).norm() < 1e-7
                            || (so.v + v.inv()).norm() < 1e-7)
                });
                assert!(hit, "{p}/{q} x = {}", pt.x);
            }
        }
    }
}
