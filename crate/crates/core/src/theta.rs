//! Truncated theta series with rational characteristics and numerical checks
//! of the lattice Heisenberg action on them.

use std::f64::consts::PI;

use num_complex::Complex64;
use num_rational::Ratio;
use num_traits::{ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exact::{extract_monomial, DenseMatrix, MonomialMatrix};

/// Largest tail bound accepted before asking for a larger truncation.
pub const TAIL_LIMIT: f64 = 1e-10;

/// Fixed sample set used by every law check.
pub const SAMPLES: [Complex64; 5] = [
    Complex64::new(0.0, 0.0),
    Complex64::new(0.1, 0.0),
    Complex64::new(0.3, 0.2),
    Complex64::new(-0.25, 0.1),
    Complex64::new(0.5, 0.5),
];

fn rat(r: Ratio<i64>) -> f64 {
    r.to_f64().expect("small rational")
}

fn cis(turns_times_pi: Complex64) -> Complex64 {
    (Complex64::i() * PI * turns_times_pi).exp()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ThetaCharacteristic {
    a: Ratio<i64>,
    b: Ratio<i64>,
    n: i64,
}

impl ThetaCharacteristic {
    pub fn new(a: Ratio<i64>, b: Ratio<i64>, n: i64) -> Result<Self> {
        if n < 1 {
            return Err(Error::InvalidParameter(format!("characteristic modulus {n} must be positive")));
        }
        if !(a * n).is_integer() || !(b * n).is_integer() {
            return Err(Error::InvalidParameter(format!("characteristic ({a}, {b}) not in (1/{n})Z")));
        }
        Ok(ThetaCharacteristic { a, b, n })
    }

    /// `(α/n, β/n)`.
    pub fn from_steps(alpha: i64, beta: i64, n: i64) -> Result<Self> {
        if n < 1 {
            return Err(Error::InvalidParameter(format!("characteristic modulus {n} must be positive")));
        }
        Self::new(Ratio::new(alpha, n), Ratio::new(beta, n), n)
    }

    pub fn a(&self) -> Ratio<i64> {
        self.a
    }

    pub fn b(&self) -> Ratio<i64> {
        self.b
    }

    pub fn n(&self) -> i64 {
        self.n
    }

    /// The `n²` characteristics with `a, b ∈ {0, 1/n, …, (n−1)/n}`, index `α·n + β`.
    pub fn all(n: i64) -> Result<Vec<Self>> {
        let mut out = Vec::new();
        for alpha in 0..n {
            for beta in 0..n {
                out.push(Self::from_steps(alpha, beta, n)?);
            }
        }
        Ok(out)
    }

    fn shifted(&self, da: Ratio<i64>, db: Ratio<i64>) -> Self {
        ThetaCharacteristic { a: self.a + da, b: self.b + db, n: self.n }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct LatticeParams {
    tau: Complex64,
    trunc: usize,
}

impl LatticeParams {
    pub fn new(tau: Complex64, trunc: usize) -> Result<Self> {
        if tau.im.is_nan() || tau.im <= 0.0 || !tau.re.is_finite() {
            return Err(Error::InvalidParameter(format!("Im(tau) must be positive, got {tau}")));
        }
        if trunc < 1 {
            return Err(Error::InvalidParameter("truncation must be at least 1".into()));
        }
        Ok(LatticeParams { tau, trunc })
    }

    pub fn tau(&self) -> Complex64 {
        self.tau
    }

    pub fn trunc(&self) -> usize {
        self.trunc
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ThetaValue {
    pub value: Complex64,
    /// Upper bound on the modulus of the omitted terms.
    pub tail_bound: f64,
}

/// `2·Σ_{k>K} e^{−π t k² + 2π y k}` with `t = Im τ`, `y = |Im z|`.
pub fn tail_bound(lp: &LatticeParams, z: Complex64) -> f64 {
    let t = lp.tau.im;
    let y = z.im.abs();
    let peak = y / t;
    let mut sum = 0.0;
    let mut k = lp.trunc as f64 + 1.0;
    for _ in 0..1_000_000 {
        let term = (-PI * t * k * k + 2.0 * PI * y * k).exp();
        sum += term;
        if k > peak && (term == 0.0 || term < 1e-20 * sum) {
            return 2.0 * sum;
        }
        k += 1.0;
    }
    f64::INFINITY
}

fn checked(value: Complex64, tail: f64) -> Result<ThetaValue> {
    if tail.is_nan() || tail > TAIL_LIMIT {
        return Err(Error::TailBound { bound: tail, limit: TAIL_LIMIT });
    }
    Ok(ThetaValue { value, tail_bound: tail })
}

/// `θ(z, τ) = Σ_{|k|≤K} e^{πik²τ + 2πikz}`.
pub fn theta_series(z: Complex64, lp: &LatticeParams) -> Result<ThetaValue> {
    let k_max = lp.trunc as i64;
    let value = (-k_max..=k_max)
        .map(|k| {
            let k = k as f64;
            cis(k * k * lp.tau + 2.0 * k * z)
        })
        .sum();
    checked(value, tail_bound(lp, z))
}

/// `θ_{a,b}(z) = e^{πia²τ + 2πia(z+b)}·θ(z + b + τa)`.
pub fn theta_char(z: Complex64, c: &ThetaCharacteristic, lp: &LatticeParams) -> Result<ThetaValue> {
    let (a, b) = (rat(c.a), rat(c.b));
    let prefactor = cis(a * a * lp.tau + 2.0 * a * (z + b));
    let inner = z + b + lp.tau * a;
    let value = prefactor * theta_series_unchecked(inner, lp);
    checked(value, prefactor.norm() * tail_bound(lp, inner))
}

fn theta_series_unchecked(z: Complex64, lp: &LatticeParams) -> Complex64 {
    let k_max = lp.trunc as i64;
    (-k_max..=k_max).map(|k| cis((k * k) as f64 * lp.tau + 2.0 * k as f64 * z)).sum()
}

/// `(S_x f)(z) = f(z + x)` applied to `θ_{a,b}`.
fn apply_s(x: Ratio<i64>, c: &ThetaCharacteristic, z: Complex64, lp: &LatticeParams) -> Result<ThetaValue> {
    theta_char(z + rat(x), c, lp)
}

/// `(T_y f)(z) = e^{πiy²τ + 2πiyz}·f(z + τy)` applied to `θ_{a,b}`.
fn apply_t(y: Ratio<i64>, c: &ThetaCharacteristic, z: Complex64, lp: &LatticeParams) -> Result<ThetaValue> {
    let y = rat(y);
    let prefactor = cis(y * y * lp.tau + 2.0 * y * z);
    let inner = theta_char(z + lp.tau * y, c, lp)?;
    checked(prefactor * inner.value, prefactor.norm() * inner.tail_bound)
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct LawResidual {
    pub max_residual: f64,
    /// Sum of the tail bounds of both sides at the worst sample, maximized.
    pub max_tail: f64,
}

impl LawResidual {
    fn record(&mut self, lhs: ThetaValue, rhs: ThetaValue) {
        self.max_residual = self.max_residual.max((lhs.value - rhs.value).norm());
        self.max_tail = self.max_tail.max(lhs.tail_bound + rhs.tail_bound);
    }

    fn merge(&mut self, other: LawResidual) {
        self.max_residual = self.max_residual.max(other.max_residual);
        self.max_tail = self.max_tail.max(other.max_tail);
    }
}

/// Checks `S_{b'} θ_{a,b} = θ_{a,b+b'}` and `T_{a'} θ_{a,b} = e^{−2πiba'} θ_{a+a',b}`.
pub fn action_check(
    c: &ThetaCharacteristic,
    shift: (Ratio<i64>, Ratio<i64>),
    lp: &LatticeParams,
    samples: &[Complex64],
) -> Result<LawResidual> {
    let (da, db) = shift;
    ThetaCharacteristic::new(da, db, c.n)?;
    let mut out = LawResidual::default();
    let phase = cis(Complex64::new(-2.0 * rat(c.b) * rat(da), 0.0));
    for &z in samples {
        out.record(apply_s(db, c, z, lp)?, theta_char(z, &c.shifted(Ratio::zero(), db), lp)?);
        let rhs = theta_char(z, &c.shifted(da, Ratio::zero()), lp)?;
        out.record(apply_t(da, c, z, lp)?, ThetaValue { value: phase * rhs.value, tail_bound: rhs.tail_bound });
    }
    Ok(out)
}

/// Checks `θ_{a+x,b+y} = e^{2πiay} θ_{a,b}` for integer `x, y`.
pub fn quasi_periodicity_check(
    c: &ThetaCharacteristic,
    x: i64,
    y: i64,
    lp: &LatticeParams,
    samples: &[Complex64],
) -> Result<LawResidual> {
    let mut out = LawResidual::default();
    let moved = c.shifted(Ratio::from_integer(x), Ratio::from_integer(y));
    let phase = cis(Complex64::new(2.0 * rat(c.a * y), 0.0));
    for &z in samples {
        let lhs = theta_char(z, &moved, lp)?;
        let rhs = theta_char(z, c, lp)?;
        out.record(lhs, ThetaValue { value: phase * rhs.value, tail_bound: rhs.tail_bound });
    }
    Ok(out)
}

/// Matrix of an operator on the span of the `n²` characteristic functions.
/// Each image is matched numerically against every basis function.
fn induced_matrix(
    n: i64,
    lp: &LatticeParams,
    op: impl Fn(&ThetaCharacteristic, Complex64) -> Result<ThetaValue>,
) -> Result<MonomialMatrix> {
    let basis = ThetaCharacteristic::all(n)?;
    let values: Vec<Vec<Complex64>> = basis
        .iter()
        .map(|c| SAMPLES.iter().map(|&z| theta_char(z, c, lp).map(|v| v.value)).collect())
        .collect::<Result<_>>()?;
    let dim = basis.len();
    let mut m = DenseMatrix::zeros(dim, dim);
    for (col, c) in basis.iter().enumerate() {
        let image: Vec<Complex64> = SAMPLES.iter().map(|&z| op(c, z).map(|v| v.value)).collect::<Result<_>>()?;
        let mut best: Option<(usize, Complex64, f64)> = None;
        for (row, g) in values.iter().enumerate() {
            let gg: f64 = g.iter().map(|x| x.norm_sqr()).sum();
            let coef: Complex64 = g.iter().zip(&image).map(|(gi, fi)| gi.conj() * fi).sum::<Complex64>() / gg;
            let res = g.iter().zip(&image).map(|(gi, fi)| (fi - coef * gi).norm()).fold(0.0, f64::max);
            if best.is_none_or(|b| res < b.2) {
                best = Some((row, coef, res));
            }
        }
        let (row, coef, res) = best.expect("nonempty basis");
        if res > 1e-9 {
            return Err(Error::Residual("image is not proportional to a characteristic function", res));
        }
        m[(row, col)] = coef;
    }
    extract_monomial(&m, 1e-9, n * n)
}

/// Induced actions of `S_{1/n}` and `T_{1/n}` on the characteristic basis,
/// and the scalar `c` with `S·T = c·T·S`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct InducedAction {
    pub s: MonomialMatrix,
    pub t: MonomialMatrix,
    pub commutator: Complex64,
    /// Largest deviation of `S·T` from `commutator·T·S`.
    pub defect: f64,
}

pub fn induced_action(n: i64, lp: &LatticeParams) -> Result<InducedAction> {
    let step = Ratio::new(1, n);
    let s = induced_matrix(n, lp, |c, z| apply_s(step, c, z, lp))?;
    let t = induced_matrix(n, lp, |c, z| apply_t(step, c, z, lp))?;
    let st = s.compose(&t)?;
    let ts = t.compose(&s)?;
    let ratio = st.compose(&ts.inverse())?;
    let commutator = ratio.phases()[0].to_complex();
    let defect = ts.to_dense().scale(commutator).max_abs_diff(&st.to_dense());
    Ok(InducedAction { s, t, commutator, defect })
}

/// All laws over every characteristic with modulus `n`: both action laws
/// for every shift in `(1/n)Z` mod 1, and quasi-periodicity for
/// `x, y ∈ {−1, 0, 1}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LawReport {
    pub n: i64,
    pub characteristics: usize,
    pub action: LawResidual,
    pub quasi_periodicity: LawResidual,
}

impl LawReport {
    pub fn max_residual(&self) -> f64 {
        self.action.max_residual.max(self.quasi_periodicity.max_residual)
    }

    pub fn max_tail(&self) -> f64 {
        self.action.max_tail.max(self.quasi_periodicity.max_tail)
    }
}

pub fn verify_laws(n: i64, lp: &LatticeParams) -> Result<LawReport> {
    let chars = ThetaCharacteristic::all(n)?;
    let mut action = LawResidual::default();
    let mut quasi = LawResidual::default();
    for c in &chars {
        for da in 0..n {
            for db in 0..n {
                action.merge(action_check(c, (Ratio::new(da, n), Ratio::new(db, n)), lp, &SAMPLES)?);
            }
        }
        for x in -1..=1 {
            for y in -1..=1 {
                quasi.merge(quasi_periodicity_check(c, x, y, lp, &SAMPLES)?);
            }
        }
    }
    Ok(LawReport { n, characteristics: chars.len(), action, quasi_periodicity: quasi })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn lp() -> LatticeParams {
        LatticeParams::new(Complex64::i(), 40).unwrap()
    }

    fn ch(a: (i64, i64), b: (i64, i64), n: i64) -> ThetaCharacteristic {
        ThetaCharacteristic::new(Ratio::new(a.0, a.1), Ratio::new(b.0, b.1), n).unwrap()
    }

    #[test]
    fn series_at_origin() {
        // Σ_k e^{−πk²} summed directly to |k| ≤ 100
        let oracle: f64 = (-100i32..=100).map(|k| (-PI * (k * k) as f64).exp()).sum();
        let v = theta_series(Complex64::new(0.0, 0.0), &lp()).unwrap();
        assert!((v.value.re - oracle).abs() < 1e-14 && v.value.im.abs() < 1e-14);
        assert!((v.value.re - 1.0864348112).abs() < 1e-10);
        assert!(v.tail_bound < 1e-300);
    }

    #[test]
    fn periodicity_and_quasi_periodicity() {
        let z = Complex64::new(0.3, 0.2);
        let t = theta_series(z, &lp()).unwrap().value;
        let t1 = theta_series(z + 1.0, &lp()).unwrap().value;
        assert!((t - t1).norm() < 1e-13);
        let tq = theta_series(z + Complex64::i(), &lp()).unwrap().value;
        let expected = cis(-Complex64::i() - 2.0 * z) * t;
        assert!((tq - expected).norm() < 1e-10);
    }

    #[test]
    fn tail_bound_error_for_slow_decay() {
        let lp = LatticeParams::new(Complex64::new(0.0, 1e-6), 40).unwrap();
        assert!(matches!(theta_series(Complex64::new(0.0, 0.0), &lp), Err(Error::TailBound { .. })));
    }

    #[test]
    fn invalid_params() {
        assert!(LatticeParams::new(Complex64::new(0.0, -1.0), 40).is_err());
        assert!(LatticeParams::new(Complex64::new(0.0, 0.0), 40).is_err());
        assert!(LatticeParams::new(Complex64::i(), 0).is_err());
        assert!(ThetaCharacteristic::new(Ratio::new(1, 3), Ratio::zero(), 2).is_err());
    }

    #[test]
    fn trivial_characteristic() {
        let z = Complex64::new(-0.25, 0.1);
        let a = theta_char(z, &ch((0, 1), (0, 1), 2), &lp()).unwrap().value;
        assert_eq!(a, theta_series(z, &lp()).unwrap().value);
    }

    #[test]
    fn odd_characteristic_vanishes_at_origin() {
        let v = theta_char(Complex64::new(0.0, 0.0), &ch((1, 2), (1, 2), 2), &lp()).unwrap();
        assert!(v.value.norm() < 1e-10);
    }

    /// Jacobi theta functions in nome form, `q = e^{iπτ}`, argument `u`.
    fn jacobi(u: Complex64, tau: Complex64) -> [Complex64; 4] {
        let q = |e: f64| cis(e * tau);
        let mut t =
            [Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0), Complex64::new(1.0, 0.0), Complex64::new(1.0, 0.0)];
        for k in 0..60 {
            let h = k as f64 + 0.5;
            let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
            t[0] += 2.0 * sign * q(h * h) * ((2 * k + 1) as f64 * u).sin();
            t[1] += 2.0 * q(h * h) * ((2 * k + 1) as f64 * u).cos();
            if k >= 1 {
                let kk = (k * k) as f64;
                t[2] += 2.0 * q(kk) * (2.0 * k as f64 * u).cos();
                t[3] += 2.0 * sign * q(kk) * (2.0 * k as f64 * u).cos();
            }
        }
        t
    }

    #[test]
    fn jacobi_identification() {
        let z = Complex64::new(0.1, 0.0);
        let [t1, t2, t3, t4] = jacobi(PI * z, Complex64::i());
        let f = |a, b| theta_char(z, &ch(a, b, 2), &lp()).unwrap().value;
        assert!((f((0, 1), (0, 1)) - t3).norm() < 1e-10);
        assert!((f((0, 1), (1, 2)) - t4).norm() < 1e-10);
        assert!((f((1, 2), (0, 1)) - t2).norm() < 1e-10);
        // θ_{1/2,1/2} = −θ₁ with θ₁ = 2Σ(−1)^k q^{(k+1/2)²} sin((2k+1)u)
        assert!((f((1, 2), (1, 2)) + t1).norm() < 1e-10);
        assert!(t1.norm() > 0.1);
    }

    #[test]
    fn action_examples() {
        let zero = Ratio::zero();
        let half = Ratio::new(1, 2);
        let r = action_check(&ch((0, 1), (0, 1), 2), (zero, zero), &lp(), &SAMPLES).unwrap();
        assert!(r.max_residual < 1e-15);
        let r = action_check(&ch((0, 1), (0, 1), 2), (zero, half), &lp(), &SAMPLES).unwrap();
        assert!(r.max_residual < 1e-10);
        let r = action_check(&ch((1, 2), (0, 1), 2), (half, zero), &lp(), &SAMPLES).unwrap();
        assert!(r.max_residual < 1e-10 && r.max_tail < TAIL_LIMIT);
    }

    #[test]
    fn quasi_periodicity_examples() {
        let r = quasi_periodicity_check(&ch((0, 1), (0, 1), 2), 2, -3, &lp(), &SAMPLES).unwrap();
        assert!(r.max_residual < 1e-10);
        let r = quasi_periodicity_check(&ch((1, 2), (0, 1), 2), 0, 1, &lp(), &SAMPLES).unwrap();
        assert!(r.max_residual < 1e-10);
        let r = quasi_periodicity_check(&ch((1, 2), (1, 3), 6), 0, 0, &lp(), &SAMPLES).unwrap();
        assert_eq!(r.max_residual, 0.0);
    }

    #[test]
    fn all_laws_n2_n3() {
        for n in [2, 3] {
            let rep = verify_laws(n, &lp()).unwrap();
            assert_eq!(rep.characteristics, (n * n) as usize);
            assert!(rep.max_residual() < 1e-10, "n={n}: {rep:?}");
            assert!(rep.max_tail() < TAIL_LIMIT);
        }
    }

    #[test]
    fn induced_action_commutation() {
        for n in [2i64, 3] {
            let act = induced_action(n, &lp()).unwrap();
            let omega = Complex64::from_polar(1.0, 2.0 * PI / (n * n) as f64);
            assert!(act.defect < 1e-9);
            // S plays the role of Z and T that of X: S·T = ω·T·S
            assert!((act.commutator - omega).norm() < 1e-9, "n={n} c={}", act.commutator);
            assert_eq!(act.s.order().unwrap() as i64, n * n);
        }
    }
}
