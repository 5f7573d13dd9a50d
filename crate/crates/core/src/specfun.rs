//! Principal logarithm, dilogarithm, Clausen and Bloch-Wigner functions.

use crate::error::{Error, Result};
use num_complex::Complex64;
use std::f64::consts::PI;

const PI2_6: f64 = PI * PI / 6.0;

/// Which side of the branch cut `[1, inf)` a real argument is approached from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    Above,
    Below,
}

impl Side {
    fn sign(self) -> f64 {
        match self {
            Side::Above => 1.0,
            Side::Below => -1.0,
        }
    }
}

/// A log-type value together with the number of `2 pi i` sheets added to the
/// principal branch.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BranchedValue {
    pub value: Complex64,
    pub winding: i64,
}

impl BranchedValue {
    pub fn principal(value: Complex64) -> Self {
        BranchedValue { value, winding: 0 }
    }

    /// Move to sheet `w`, shifting the imaginary part by `2 pi` per sheet.
    pub fn on_sheet(self, w: i64) -> Self {
        let shift = 2.0 * PI * (w - self.winding) as f64;
        BranchedValue { value: self.value + Complex64::new(0.0, shift), winding: w }
    }
}

/// Principal logarithm `Log z`, with `Im` in `(-pi, pi]`. A negative real
/// argument with a signed zero imaginary part maps to `+pi`.
pub fn log(z: Complex64) -> Complex64 {
    Complex64::new(z.re, z.im + 0.0).ln()
}

/// Logarithm on sheet `winding`.
pub fn log_branch(z: Complex64, winding: i64) -> BranchedValue {
    BranchedValue::principal(z.ln()).on_sheet(winding)
}

/// Principal argument in `(-pi, pi]`.
pub fn arg(z: Complex64) -> f64 {
    (z.im + 0.0).atan2(z.re)
}

/// A point for `li2` with a record of whether it sits on the cut.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DilogDomainPoint {
    pub z: Complex64,
    pub on_cut: bool,
}

impl DilogDomainPoint {
    pub fn new(z: Complex64) -> Self {
        DilogDomainPoint { z, on_cut: z.im == 0.0 && z.re >= 1.0 }
    }
}

// B_{2k} / (2k+1)! for k = 1..=10
const BERN: [f64; 10] = [
    1.0 / 36.0,
    -1.0 / 3600.0,
    1.0 / 211680.0,
    -1.0 / 10886400.0,
    1.0 / 526901760.0,
    -691.0 / 2730.0 / 6227020800.0,
    7.0 / 6.0 / 1307674368000.0,
    -3617.0 / 510.0 / 355687428096000.0,
    43867.0 / 798.0 / 121645100408832000.0,
    -174611.0 / 330.0 / 51090942171709440000.0,
];

// Li2(z) = sum B_n u^{n+1}/(n+1)! with u = -Log(1-z).
fn bernoulli_series(u: Complex64) -> Complex64 {
    let u2 = u * u;
    let mut acc = Complex64::new(0.0, 0.0);
    let mut pw = u * u2;
    for c in BERN {
        acc += pw * c;
        pw *= u2;
    }
    u - u2 * 0.25 + acc
}

// |z| <= 1 branch.
fn li2_disk(z: Complex64) -> Complex64 {
    if z.re <= 0.5 {
        bernoulli_series(-(Complex64::new(1.0, 0.0) - z).ln())
    } else {
        let one_minus = Complex64::new(1.0, 0.0) - z;
        if one_minus.norm() == 0.0 {
            return Complex64::new(PI2_6, 0.0);
        }
        // reflection z -> 1 - z
        -bernoulli_series(-z.ln()) + PI2_6 - z.ln() * one_minus.ln()
    }
}

/// Principal dilogarithm. On the open cut `(1, inf)` the sign of the zero
/// imaginary part picks the side, `+0.0` meaning from above.
pub fn li2_principal(z: Complex64) -> Complex64 {
    if z.re == 0.0 && z.im == 0.0 {
        return Complex64::new(0.0, 0.0);
    }
    if z.norm_sqr() <= 1.0 {
        return li2_disk(z);
    }
    // inversion: Li2(z) = -pi^2/6 - Log^2(-z)/2 - Li2(1/z)
    let lm = (-z).ln();
    let inv = z.inv();
    // keep the side of the cut consistent for real arguments
    let inv = if z.im == 0.0 { Complex64::new(inv.re, -z.im) } else { inv };
    -PI2_6 - lm * lm * 0.5 - li2_disk(inv)
}

/// Dilogarithm `Li2(z) = -int_0^z Log(1-w)/w dw` on the principal branch.
///
/// Fails on the open cut `(1, inf)` when the imaginary part is exactly zero;
/// use [`li2_side`] there.
pub fn li2(z: Complex64) -> Result<Complex64> {
    if z.im == 0.0 && z.re > 1.0 {
        return Err(Error::CutAmbiguity(z.re));
    }
    Ok(li2_principal(z))
}

/// Dilogarithm with an explicit side for points on the cut.
pub fn li2_side(z: Complex64, side: Side) -> Complex64 {
    if z.im == 0.0 && z.re > 1.0 {
        li2_principal(Complex64::new(z.re, 0.0 * side.sign()))
    } else {
        li2_principal(z)
    }
}

/// Clausen function `Cl2(theta) = Im Li2(e^{i theta})`.
pub fn cl2(theta: f64) -> f64 {
    let t = theta.rem_euclid(2.0 * PI);
    if t == 0.0 {
        return 0.0;
    }
    li2_principal(Complex64::from_polar(1.0, t)).im
}

/// Bloch-Wigner dilogarithm `D(z) = Im Li2(z) + Arg(1-z) Log|z|`.
pub fn bloch_wigner(z: Complex64) -> f64 {
    let one = Complex64::new(1.0, 0.0);
    if z.norm() == 0.0 || (z - one).norm() == 0.0 {
        return 0.0;
    }
    if z.im == 0.0 {
        return 0.0;
    }
    li2_principal(z).im + arg(one - z) * z.norm().ln()
}

/// Value of `Li2(t)` continued across the cut from `side`, written through
/// the reciprocity `-pi^2/6 - Log^2(-t)/2 - Li2(1/t)`.
pub fn li2_reflection(t: f64, side: Side) -> Result<Complex64> {
    if !(t > 1.0) {
        return Err(Error::InvalidParameter(format!("reflection needs t > 1, got {t}")));
    }
    // -(t + i side 0) = -t - i side 0
    let lm = Complex64::new(-t, -0.0 * side.sign()).ln();
    let lm = Complex64::new(lm.re, -side.sign() * PI);
    Ok(-PI2_6 - lm * lm * 0.5 - li2_principal(Complex64::new(1.0 / t, 0.0)))
}
