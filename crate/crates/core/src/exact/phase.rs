//! Exact roots of unity stored as rational turns.

use std::fmt;
use std::ops::{Div, Mul};

use num_complex::Complex64;
use num_rational::Ratio;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

/// The phase `e^{2πi t}` for a rational turn `t`, kept reduced into `[0, 1)`.
///
/// Products add turns, powers scale them; both stay exact.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(into = "(i64, i64)", try_from = "(i64, i64)")]
pub struct PhaseExp(Ratio<i64>);

impl PhaseExp {
    pub const ONE: PhaseExp = PhaseExp(Ratio::new_raw(0, 1));

    /// `e^{2πi·numerator/denominator}`.
    ///
    /// Panics if `denominator` is not positive.
    pub fn new(numerator: i64, denominator: i64) -> Self {
        assert!(denominator > 0, "phase denominator must be positive");
        Self::from_turns(Ratio::new(numerator, denominator))
    }

    /// The primitive `d`-th root of unity `e^{2πi/d}`.
    pub fn root_of_unity(d: usize) -> Self {
        Self::new(1, d as i64)
    }

    pub fn from_turns(t: Ratio<i64>) -> Self {
        let fract = t - t.floor();
        PhaseExp(fract)
    }

    pub fn turns(&self) -> Ratio<i64> {
        self.0
    }

    pub fn numerator(&self) -> i64 {
        *self.0.numer()
    }

    pub fn denominator(&self) -> i64 {
        *self.0.denom()
    }

    pub fn is_one(&self) -> bool {
        self.0.is_zero()
    }

    /// Idempotent; values built through the constructors are already canonical.
    pub fn canonical(&self) -> Self {
        Self::from_turns(self.0)
    }

    pub fn conj(&self) -> Self {
        Self::from_turns(-self.0)
    }

    pub fn pow(&self, k: i64) -> Self {
        Self::from_turns(self.0 * Ratio::from_integer(k))
    }

    /// Smallest `k ≥ 1` with `self^k = 1`.
    pub fn order(&self) -> u64 {
        self.denominator() as u64
    }

    /// Quarter turns map to exact `±1, ±i`.
    pub fn to_complex(&self) -> Complex64 {
        match (self.numerator(), self.denominator()) {
            (0, 1) => return Complex64::new(1.0, 0.0),
            (1, 2) => return Complex64::new(-1.0, 0.0),
            (1, 4) => return Complex64::new(0.0, 1.0),
            (3, 4) => return Complex64::new(0.0, -1.0),
            _ => {}
        }
        let t = *self.0.numer() as f64 / *self.0.denom() as f64;
        Complex64::from_polar(1.0, 2.0 * std::f64::consts::PI * t)
    }
}

impl Default for PhaseExp {
    fn default() -> Self {
        Self::ONE
    }
}

#[allow(clippy::suspicious_arithmetic_impl)]
impl Mul for PhaseExp {
    type Output = PhaseExp;

    fn mul(self, rhs: PhaseExp) -> PhaseExp {
        PhaseExp::from_turns(self.0 + rhs.0)
    }
}

#[allow(clippy::suspicious_arithmetic_impl)]
impl Div for PhaseExp {
    type Output = PhaseExp;

    fn div(self, rhs: PhaseExp) -> PhaseExp {
        PhaseExp::from_turns(self.0 - rhs.0)
    }
}

impl fmt::Display for PhaseExp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_zero() {
            write!(f, "0")
        } else if self.0.denom().is_one() {
            write!(f, "{}", self.0.numer())
        } else {
            write!(f, "{}/{}", self.0.numer(), self.0.denom())
        }
    }
}

impl From<PhaseExp> for (i64, i64) {
    fn from(p: PhaseExp) -> Self {
        (p.numerator(), p.denominator())
    }
}

impl TryFrom<(i64, i64)> for PhaseExp {
    type Error = String;

    fn try_from((n, d): (i64, i64)) -> Result<Self, Self::Error> {
        if d <= 0 {
            return Err(format!("non-positive phase denominator {d}"));
        }
        Ok(PhaseExp::new(n, d))
    }
}

/// Snap a turn value (any real) to the rational turn with the smallest
/// denominator `≤ max_denom` whose angular distance is within `tol` radians.
pub fn snap_turns(turns: f64, tol: f64, max_denom: i64) -> Option<PhaseExp> {
    let t = turns - turns.floor();
    for d in 1..=max_denom {
        let k = (t * d as f64).round();
        let diff = (t - k / d as f64).abs();
        if 2.0 * std::f64::consts::PI * diff <= tol {
            return Some(PhaseExp::new(k as i64, d));
        }
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn canonical_form() {
        let p = PhaseExp::new(6, 4);
        assert_eq!((p.numerator(), p.denominator()), (1, 2));
        let q = PhaseExp::new(-1, 4);
        assert_eq!((q.numerator(), q.denominator()), (3, 4));
        let z = PhaseExp::new(8, 4);
        assert_eq!((z.numerator(), z.denominator()), (0, 1));
        assert!(z.is_one());
    }

    #[test]
    fn omega_and_q() {
        let omega = PhaseExp::root_of_unity(4);
        let q = omega.pow(2);
        assert_eq!(q, PhaseExp::new(1, 2));
        assert_eq!(omega.order(), 4);
        assert!((omega.to_complex() - Complex64::i()).norm() < 1e-15);
    }

    #[test]
    fn snapping() {
        assert_eq!(snap_turns(0.125 + 1e-12, 1e-9, 96), Some(PhaseExp::new(1, 8)));
        assert_eq!(snap_turns(-0.25, 1e-9, 96), Some(PhaseExp::new(3, 4)));
        assert_eq!(snap_turns(0.999_999_999_999_9, 1e-9, 96), Some(PhaseExp::ONE));
        assert_eq!(snap_turns(1.0 / 97.0, 1e-9, 96), None);
    }

    proptest! {
        #[test]
        fn canonical_idempotent(n in -1000i64..1000, d in 1i64..500) {
            let p = PhaseExp::new(n, d);
            prop_assert_eq!(p.canonical(), p);
            prop_assert_eq!(p.canonical().canonical(), p.canonical());
            prop_assert!(p.numerator() >= 0 && p.numerator() < p.denominator());
        }

        #[test]
        fn product_matches_complex(a in -50i64..50, b in 1i64..60, c in -50i64..50, d in 1i64..60) {
            let x = PhaseExp::new(a, b);
            let y = PhaseExp::new(c, d);
            let exact = (x * y).to_complex();
            let float = x.to_complex() * y.to_complex();
            prop_assert!((exact - float).norm() < 1e-13);
        }
    }
}
