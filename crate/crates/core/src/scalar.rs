use std::fmt::{self, Debug, Display};
use std::ops::{Add, Div, Mul, Neg, Sub};

use twofloat::TwoFloat;

/// Scalar field used by the series and pole engines.
///
/// `f64` is the working precision everywhere. [`Dd`] is used where a
/// high-order residual has to be resolved far below double-precision
/// round-off.
pub trait Real:
    Copy
    + Debug
    + PartialOrd
    + Send
    + Sync
    + 'static
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
{
    fn of(x: f64) -> Self;
    fn as_f64(self) -> f64;

    fn of_i(n: i64) -> Self {
        Self::of(n as f64)
    }

    fn zero() -> Self {
        Self::of(0.0)
    }

    fn one() -> Self {
        Self::of(1.0)
    }

    fn is_zero(&self) -> bool {
        self.as_f64() == 0.0
    }

    fn abs(self) -> Self {
        if self < Self::zero() {
            -self
        } else {
            self
        }
    }

    fn powi(self, n: i32) -> Self {
        let mut base = if n < 0 { Self::one() / self } else { self };
        let mut e = n.unsigned_abs();
        let mut acc = Self::one();
        while e > 0 {
            if e & 1 == 1 {
                acc = acc * base;
            }
            base = base * base;
            e >>= 1;
        }
        acc
    }
}

impl Real for f64 {
    fn of(x: f64) -> Self {
        x
    }

    fn as_f64(self) -> f64 {
        self
    }

    fn abs(self) -> Self {
        f64::abs(self)
    }

    fn powi(self, n: i32) -> Self {
        f64::powi(self, n)
    }
}

/// Double-double scalar (about 32 significant digits).
///
/// Thin wrapper over [`TwoFloat`]; division gets one Newton correction
/// because the upstream quotient is only accurate to double precision.
#[derive(Clone, Copy, Default, PartialEq, PartialOrd)]
pub struct Dd(pub TwoFloat);

impl Dd {
    pub fn hi(self) -> f64 {
        self.0.hi()
    }

    pub fn lo(self) -> f64 {
        self.0.lo()
    }
}

impl Debug for Dd {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Dd({:e} + {:e})", self.0.hi(), self.0.lo())
    }
}

impl Display for Dd {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:e}", self.0.hi())
    }
}

impl From<f64> for Dd {
    fn from(x: f64) -> Self {
        Dd(TwoFloat::from(x))
    }
}

impl Add for Dd {
    type Output = Dd;
    fn add(self, r: Dd) -> Dd {
        Dd(self.0 + r.0)
    }
}

impl Sub for Dd {
    type Output = Dd;
    fn sub(self, r: Dd) -> Dd {
        Dd(self.0 - r.0)
    }
}

impl Mul for Dd {
    type Output = Dd;
    fn mul(self, r: Dd) -> Dd {
        Dd(self.0 * r.0)
    }
}

impl Div for Dd {
    type Output = Dd;
    fn div(self, r: Dd) -> Dd {
        let q = self.0 / r.0;
        let resid = self.0 - q * r.0;
        Dd(q + resid / r.0.hi())
    }
}

impl Neg for Dd {
    type Output = Dd;
    fn neg(self) -> Dd {
        Dd(-self.0)
    }
}

impl Real for Dd {
    fn of(x: f64) -> Self {
        Dd::from(x)
    }

    fn as_f64(self) -> f64 {
        self.0.hi() + self.0.lo()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dd_division_is_double_double_accurate() {
        let three = Dd::of(3.0);
        let x = Dd::one() / three;
        let e = x * three - Dd::one();
        assert!(e.as_f64().abs() < 1e-31, "{e:?}");
        let y = Dd::of(1.38175) / Dd::of(0.511115);
        let e = y * Dd::of(0.511115) - Dd::of(1.38175);
        assert!(e.as_f64().abs() < 1e-31, "{e:?}");
    }

    #[test]
    fn powi_matches_repeated_product() {
        let x = Dd::of(1.1);
        let p = x.powi(5);
        let q = x * x * x * x * x;
        assert!((p - q).as_f64().abs() < 1e-30);
        assert!((Dd::of(2.0).powi(-2) - Dd::of(0.25)).as_f64() == 0.0);
        assert_eq!(Real::powi(2.0_f64, -2), 0.25);
    }
}
