//! Chern-Simons invariants of flat SU(2) connections on `M_{p/q}`: the
//! longitude phase curves `beta_eps`, the logarithm bookkeeping of the
//! `Q` functions and the closed-form special values.

use crate::error::{Error, Result};
use crate::invariants::SurgeryCoefficient;
use crate::mod_one;
use crate::quad::integrate;
use crate::repvar::{cis_turns, l_pm, u_pm, Branch, ClassKind, FlatConnectionClass};
use num_complex::Complex64;
use serde::Serialize;
use std::f64::consts::PI;

const SIXTH: f64 = 1.0 / 6.0;
const THIRD: f64 = 1.0 / 3.0;

/// Default absolute tolerance for the integral of `beta_eps`.
pub const CS_QUAD_TOL: f64 = 1e-10;

/// Required closeness of `p theta + q beta` to an integer.
pub const LEVEL_TOL: f64 = 1e-6;

/// Branch data of the longitude curve at one point of the arc.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BranchCurves {
    pub theta: f64,
    pub eps: Branch,
    pub beta: f64,
    pub f_shift: i64,
    pub e_shift: i64,
}

/// `Q_1 = 1 - e^{4 pi i theta}/(1+u)`, `Q_2 = 1 - (1+u) e^{4 pi i theta}`, `Q_3 = 1+u`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QTriple {
    pub q1: Complex64,
    pub q2: Complex64,
    pub q3: Complex64,
}

fn check_upper_arc(theta: f64) -> Result<()> {
    if !(SIXTH - 1e-12..=THIRD + 1e-12).contains(&theta) {
        return Err(Error::OutOfArc(theta));
    }
    Ok(())
}

/// Integer shift making `beta_eps` continuous with `beta_eps(1/6) = 1/2`.
pub fn f_shift(theta: f64, eps: Branch) -> Result<i64> {
    check_upper_arc(theta)?;
    Ok(match eps {
        Branch::Plus => i64::from(theta != SIXTH),
        Branch::Minus => -i64::from(theta == THIRD),
    })
}

/// `beta_eps(theta) = (1/2 pi i) Log L_eps(theta) + f_eps(theta)`.
pub fn beta_eps(theta: f64, eps: Branch) -> Result<f64> {
    check_upper_arc(theta)?;
    let f = f_shift(theta, eps)? as f64;
    // Log(-1) = i pi at the ends; L = 1 at the midpoint
    if theta == SIXTH || theta == THIRD {
        return Ok(0.5 + f);
    }
    if theta == 0.25 {
        return Ok(f);
    }
    let l = l_pm(theta, eps)?;
    Ok(l.im.atan2(l.re) / (2.0 * PI) + f)
}

/// All branch data at `theta` in `[1/6, 1/3]`.
pub fn branch_curves(theta: f64, eps: Branch) -> Result<BranchCurves> {
    Ok(BranchCurves {
        theta,
        eps,
        beta: beta_eps(theta, eps)?,
        f_shift: f_shift(theta, eps)?,
        e_shift: e_eps(theta, eps)?,
    })
}

/// Number of `2 pi i` by which `Log Q1 + Log Q3 - Log Q2` exceeds `Log L_eps`.
pub fn e_eps(theta: f64, eps: Branch) -> Result<i64> {
    let a = theta.abs();
    if !(SIXTH - 1e-12..=THIRD + 1e-12).contains(&a) {
        return Err(Error::OutOfArc(theta));
    }
    if a == SIXTH || a == THIRD {
        return Ok(0);
    }
    let upper = |t: f64| -> i64 {
        let plus = i64::from(t <= 0.25);
        match eps {
            Branch::Plus => plus,
            Branch::Minus => 1 - plus,
        }
    };
    if theta > 0.0 {
        Ok(upper(theta))
    } else if theta == -0.25 {
        Ok(upper(0.25))
    } else {
        Ok(1 - upper(-theta))
    }
}

/// The three `Q` functions at `theta` in `[-1/3,-1/6] u [1/6,1/3]`.
pub fn q_triple(theta: f64, eps: Branch) -> Result<QTriple> {
    let w = 1.0 + u_pm(theta, eps)?;
    let z = cis_turns(2.0 * theta);
    Ok(QTriple { q1: 1.0 - z / w, q2: 1.0 - z * w, q3: Complex64::new(w, 0.0) })
}

/// `int_{1/6}^{theta} beta_eps(t) dt`.
pub fn integral_beta(theta: f64, eps: Branch) -> Result<f64> {
    integral_beta_with(theta, eps, CS_QUAD_TOL)
}

/// `int_{1/6}^{theta} beta_eps(t) dt` to absolute tolerance `tol`, split at
/// `1/4` where the shift `f_eps` and the logarithm jump together.
pub fn integral_beta_with(theta: f64, eps: Branch, tol: f64) -> Result<f64> {
    check_upper_arc(theta)?;
    let theta = theta.clamp(SIXTH, THIRD);
    let f = |t: f64| Complex64::new(beta_eps(t.clamp(SIXTH, THIRD), eps).unwrap(), 0.0);
    let mut pieces = vec![(SIXTH, theta.min(0.25))];
    if theta > 0.25 {
        pieces.push((0.25, theta));
    }
    let mut acc = 0.0;
    for (a, b) in pieces {
        if b > a {
            acc += integrate(f, a, b, 0.5 * tol, 0.0, 4000)?.value.re;
        }
    }
    Ok(acc)
}

/// `p theta + q beta_eps(theta)` rounded, or an error carrying the defect.
pub fn filling_level(surgery: &SurgeryCoefficient, theta: f64, eps: Branch) -> Result<i64> {
    let v = surgery.p as f64 * theta + surgery.q as f64 * beta_eps(theta, eps)?;
    let m = v.round();
    if (v - m).abs() > LEVEL_TOL {
        return Err(Error::InvalidParameter(format!(
            "rho_(theta={theta}, {eps:?}) does not extend to {}/{}: defect {:e}",
            surgery.p,
            surgery.q,
            (v - m).abs()
        )));
    }
    Ok(m as i64)
}

/// Chern-Simons invariant of `rho_{theta, eps}` on `M_{p/q}` in `[0, 1)`, from
/// the form with the integer level `m = p theta + q beta`.
pub fn cs_irreducible(surgery: &SurgeryCoefficient, theta: f64, eps: Branch) -> Result<f64> {
    cs_irreducible_with(surgery, theta, eps, CS_QUAD_TOL)
}

pub fn cs_irreducible_with(surgery: &SurgeryCoefficient, theta: f64, eps: Branch, tol: f64) -> Result<f64> {
    let m = filling_level(surgery, theta, eps)?;
    let (p, q) = (surgery.p as f64, surgery.q as f64);
    let mf = m as f64;
    // (d/q) m^2 reduced exactly mod 1
    let dm2 = (surgery.d as i128 * (m as i128) * (m as i128)).rem_euclid(surgery.q.abs() as i128) as f64;
    let dm2 = dm2 / q.abs() * q.signum();
    let v =
        -1.0 / 6.0 - p / q * theta * theta + 2.0 * mf * theta / q - dm2 - 2.0 * integral_beta_with(theta, eps, tol)?;
    Ok(mod_one(v))
}

/// The same invariant from the form in `c, d, theta, beta` directly.
pub fn cs_kirk_klassen(surgery: &SurgeryCoefficient, theta: f64, eps: Branch) -> Result<f64> {
    filling_level(surgery, theta, eps)?;
    let b = beta_eps(theta, eps)?;
    let (p, q, c, d) = (surgery.p as f64, surgery.q as f64, surgery.c as f64, surgery.d as f64);
    let v =
        -1.0 / 6.0 - c * p * theta * theta - d * q * b * b - 2.0 * c * q * theta * b - 2.0 * integral_beta(theta, eps)?;
    Ok(mod_one(v))
}

/// Closed forms at `theta` in `{1/6, 1/4, 1/3}`.
pub fn cs_special(surgery: &SurgeryCoefficient, theta: f64, eps: Branch) -> Result<f64> {
    let (p, q, c, d) = (surgery.p, surgery.q, surgery.c as f64, surgery.d as f64);
    let (pf, qf) = (p as f64, q as f64);
    let bad = |why: &str| Err(Error::InvalidParameter(format!("{why} for {p}/{q}")));
    if theta == SIXTH {
        if p.rem_euclid(6) != 3 || q % 2 == 0 {
            return bad("theta = 1/6 needs p = 3 mod 6 and q odd");
        }
        Ok(mod_one(-c * pf / 36.0 - d * qf / 4.0 - d / 2.0))
    } else if theta == THIRD {
        if p.rem_euclid(6) != 3 || q % 2 != 0 {
            return bad("theta = 1/3 needs p = 3 mod 6 and q even");
        }
        Ok(mod_one(0.5 - c * pf / 9.0 - d * qf / 4.0))
    } else if theta == 0.25 {
        if p % 4 != 0 {
            return bad("theta = 1/4 needs 4 | p");
        }
        Ok(mod_one(eps.sign() / 5.0 - c * pf / 16.0))
    } else {
        Err(Error::InvalidParameter(format!("no closed form at theta = {theta}")))
    }
}

/// Abelian class `j`, `-c j^2 / p` with `c = (-q)^{-1} mod p`; zero when `p = 0`.
pub fn cs_abelian(surgery: &SurgeryCoefficient, j: i64) -> Result<f64> {
    let p = surgery.p;
    if p == 0 {
        return Ok(0.0);
    }
    if j < 0 || j > p.abs() / 2 {
        return Err(Error::InvalidParameter(format!("abelian index {j} outside 0..={}", p.abs() / 2)));
    }
    let num = (-(surgery.c as i128) * (j as i128) * (j as i128)).rem_euclid(p.abs() as i128);
    Ok(mod_one(num as f64 / p.abs() as f64 * p.signum() as f64))
}

/// Abelian family member on `M_0`; the invariant vanishes identically.
pub fn cs_abelian_family(surgery: &SurgeryCoefficient, _theta: f64) -> Result<f64> {
    if surgery.p != 0 {
        return Err(Error::InvalidParameter("abelian family exists only for p = 0".into()));
    }
    Ok(0.0)
}

/// Fill the `cs` field of each class.
pub fn annotate(surgery: &SurgeryCoefficient, classes: &[FlatConnectionClass]) -> Result<Vec<FlatConnectionClass>> {
    classes
        .iter()
        .map(|c| {
            let cs = match c.kind {
                ClassKind::AbelianJ(j) => cs_abelian(surgery, j)?,
                ClassKind::AbelianTheta(t) => cs_abelian_family(surgery, t)?,
                ClassKind::Irreducible { theta, eps } => cs_irreducible(surgery, theta, eps)?,
            };
            Ok(FlatConnectionClass { cs: Some(cs), ..*c })
        })
        .collect()
}

/// Distinct invariants mod 1 of all flat SU(2) connections, sorted.
pub fn cs_set(surgery: &SurgeryCoefficient) -> Result<Vec<f64>> {
    let cl = annotate(surgery, &crate::repvar::enumerate_su2_moduli(surgery))?;
    let mut v: Vec<f64> = cl.iter().filter_map(|c| c.cs).collect();
    v.sort_by(f64::total_cmp);
    v.dedup_by(|a, b| (*a - *b).abs() < 1e-8);
    if v.len() > 1 && (v[0] + 1.0 - v[v.len() - 1]).abs() < 1e-8 {
        v.pop();
    }
    Ok(v)
}

/// Distance from `x` to the nearest integer.
pub fn dist_z(x: f64) -> f64 {
    (x - x.round()).abs()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::specfun::log;

    fn sc(p: i64, q: i64) -> SurgeryCoefficient {
        SurgeryCoefficient::new(p, q).unwrap()
    }

    #[test]
    fn beta_values() {
        for eps in [Branch::Plus, Branch::Minus] {
            assert_eq!(beta_eps(SIXTH, eps).unwrap(), 0.5);
        }
        assert_eq!(beta_eps(0.25, Branch::Plus).unwrap(), 1.0);
        assert_eq!(beta_eps(0.25, Branch::Minus).unwrap(), 0.0);
        assert!(beta_eps(0.1, Branch::Plus).is_err());
    }

    #[test]
    fn beta_is_continuous() {
        for eps in [Branch::Plus, Branch::Minus] {
            let n = 20000;
            let mut prev = beta_eps(SIXTH, eps).unwrap();
            for i in 1..=n {
                let t = SIXTH + (THIRD - SIXTH) * i as f64 / n as f64;
                let t = if i == n { THIRD } else { t };
                let b = beta_eps(t, eps).unwrap();
                assert!((b - prev).abs() < 0.02, "{eps:?} jump at {t}");
                prev = b;
            }
        }
    }

    #[test]
    fn e_table() {
        assert_eq!(e_eps(0.2, Branch::Plus).unwrap(), 1);
        assert_eq!(e_eps(0.25, Branch::Plus).unwrap(), 1);
        assert_eq!(e_eps(0.3, Branch::Plus).unwrap(), 0);
        assert_eq!(e_eps(0.3, Branch::Minus).unwrap(), 1);
        assert_eq!(e_eps(-0.25, Branch::Minus).unwrap(), e_eps(0.25, Branch::Minus).unwrap());
        assert_eq!(e_eps(-0.2, Branch::Plus).unwrap(), 0);
        assert_eq!(e_eps(SIXTH, Branch::Plus).unwrap(), 0);
        assert_eq!(e_eps(-THIRD, Branch::Minus).unwrap(), 0);
    }

    #[test]
    fn q_identities_and_log_bookkeeping() {
        let two_pi_i = Complex64::new(0.0, 2.0 * PI);
        let mut thetas: Vec<f64> = (0..=200).map(|i| SIXTH + (THIRD - SIXTH) * i as f64 / 200.0).collect();
        thetas.extend(thetas.clone().iter().map(|t| -t));
        for &th in &thetas {
            for eps in [Branch::Plus, Branch::Minus] {
                let q = q_triple(th, eps).unwrap();
                let z2 = cis_turns(2.0 * th);
                assert!((q.q1 * q.q2 - z2).norm() < 1e-12);
                let l = crate::repvar::lambda11(cis_turns(th), Complex64::new(u_pm(th, eps).unwrap(), 0.0));
                assert!((q.q1 * q.q3 / q.q2 - l).norm() < 1e-11, "{th}");
                assert!((log(q.q1) + log(q.q2) - log(q.q1 * q.q2)).norm() < 1e-9, "{th}");
                let lhs = log(q.q1) + log(q.q3) - log(q.q2);
                let rhs = log(l_pm(th, eps).unwrap()) + two_pi_i * e_eps(th, eps).unwrap() as f64;
                assert!((lhs - rhs).norm() < 1e-9, "{th} {eps:?}");
            }
        }
    }

    #[test]
    fn special_integral() {
        let v = integrate(
            |t| Complex64::new(crate::specfun::arg(l_pm(t, Branch::Minus).unwrap()), 0.0),
            SIXTH,
            0.25,
            1e-13,
            0.0,
            2000,
        )
        .unwrap();
        assert!((v.value.re / PI - 1.0 / 30.0).abs() < 1e-8);
    }

    #[test]
    fn log_l_integrates_to_zero_symmetrically() {
        for th0 in [0.27, 0.30, THIRD] {
            for eps in [Branch::Plus, Branch::Minus] {
                let v = integrate(|t| log(l_pm(t, eps).unwrap()), 0.5 - th0, th0, 1e-12, 0.0, 4000).unwrap();
                assert!(v.value.norm() < 1e-9, "{th0} {eps:?}: {}", v.value);
            }
        }
    }

    #[test]
    fn zero_surgery_values() {
        let s = sc(0, 1);
        let a = cs_irreducible(&s, 0.25, Branch::Plus).unwrap();
        let b = cs_irreducible(&s, 0.25, Branch::Minus).unwrap();
        let mut v = [a, b];
        v.sort_by(f64::total_cmp);
        assert!((v[0] - 0.2).abs() < 1e-8 && (v[1] - 0.8).abs() < 1e-8, "{v:?}");
        assert_eq!(cs_set(&s).unwrap().len(), 3);
    }

    #[test]
    fn closed_forms_agree_with_quadrature() {
        for (p, q) in [(4, 1), (-4, 1), (8, 3), (0, 1), (4, 3)] {
            let s = sc(p, q);
            for eps in [Branch::Plus, Branch::Minus] {
                let a = cs_irreducible(&s, 0.25, eps).unwrap();
                let b = cs_special(&s, 0.25, eps).unwrap();
                assert!(dist_z(a - b) < 1e-8, "{p}/{q} {eps:?}: {a} vs {b}");
            }
        }
        for (p, q) in [(3, 1), (-3, 1), (9, 1), (3, 5), (-9, 7)] {
            let s = sc(p, q);
            let a = cs_irreducible(&s, SIXTH, Branch::Plus).unwrap();
            assert!(dist_z(a - cs_special(&s, SIXTH, Branch::Plus).unwrap()) < 1e-8, "{p}/{q}");
        }
        for (p, q) in [(3, 2), (-3, 4), (9, 2)] {
            let s = sc(p, q);
            let a = cs_irreducible(&s, THIRD, Branch::Plus).unwrap();
            assert!(dist_z(a - cs_special(&s, THIRD, Branch::Plus).unwrap()) < 1e-8, "{p}/{q}");
        }
        assert!(cs_special(&sc(1, 1), 0.25, Branch::Plus).is_err());
    }

    #[test]
    fn two_forms_agree() {
        for (p, q) in [(1, 1), (5, 2), (-7, 3), (11, 4), (2, 1)] {
            let s = sc(p, q);
            for (th, eps) in crate::repvar::irreducible_classes(&s) {
                let a = cs_irreducible(&s, th, eps).unwrap();
                let b = cs_kirk_klassen(&s, th, eps).unwrap();
                assert!(dist_z(a - b) < 1e-8, "{p}/{q} {th}");
            }
        }
    }

    #[test]
    fn abelian_values() {
        let s = sc(5, 1);
        assert_eq!(cs_abelian(&s, 0).unwrap(), 0.0);
        // c = -1 from the canonical completion
        assert!((cs_abelian(&s, 1).unwrap() - 0.2).abs() < 1e-15);
        assert!(cs_abelian(&s, 3).is_err());
        assert_eq!(cs_abelian(&sc(0, 1), 0).unwrap(), 0.0);
        assert_eq!(cs_abelian_family(&sc(0, 1), 0.3).unwrap(), 0.0);
    }
}
