//! The SIC equations for the moduli `p_a = |z_a|²` and phases of a fiducial,
//! in the standard and phase-permutation bases, with the exact `N = 4`
//! solution over `Q(√5)`.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

use num_complex::Complex64;
use num_integer::Integer;
use num_rational::Ratio;
use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::heisenberg::{perfect_square_root, BasisKind, RepBasis};

/// Scalars the moduli residuals can be evaluated over.
pub trait ModuliScalar: Copy + Add<Output = Self> + Sub<Output = Self> + Mul<Output = Self> {
    fn zero() -> Self;
    fn ratio(num: i64, den: i64) -> Self;
}

impl ModuliScalar for f64 {
    fn zero() -> Self {
        0.0
    }

    fn ratio(num: i64, den: i64) -> Self {
        num as f64 / den as f64
    }
}

/// `a + b√5` with rational `a`, `b`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct QSqrt5 {
    pub a: Ratio<i64>,
    pub b: Ratio<i64>,
}

impl QSqrt5 {
    pub fn new(a: Ratio<i64>, b: Ratio<i64>) -> Self {
        QSqrt5 { a, b }
    }

    pub fn rational(num: i64, den: i64) -> Self {
        QSqrt5 { a: Ratio::new(num, den), b: Ratio::zero() }
    }

    pub fn sqrt5() -> Self {
        QSqrt5 { a: Ratio::zero(), b: Ratio::from_integer(1) }
    }

    pub fn is_zero(&self) -> bool {
        self.a.is_zero() && self.b.is_zero()
    }

    pub fn conj(&self) -> Self {
        QSqrt5 { a: self.a, b: -self.b }
    }

    /// `a² − 5b²`.
    pub fn norm(&self) -> Ratio<i64> {
        self.a * self.a - Ratio::from_integer(5) * self.b * self.b
    }

    pub fn signum(&self) -> i32 {
        let sa = sign(self.a);
        let sb = sign(self.b);
        if sa == 0 || sb == 0 || sa == sb {
            return if sa != 0 { sa } else { sb };
        }
        // opposite signs: compare a² with 5b²
        let n = self.norm();
        if n.is_zero() {
            0
        } else if n.is_positive() {
            sa
        } else {
            sb
        }
    }

    pub fn is_nonnegative(&self) -> bool {
        self.signum() >= 0
    }

    pub fn to_f64(&self) -> f64 {
        ratio_f64(self.a) + ratio_f64(self.b) * 5f64.sqrt()
    }

    pub fn inv(&self) -> Option<Self> {
        let n = self.norm();
        if n.is_zero() {
            return None;
        }
        Some(QSqrt5 { a: self.a / n, b: -self.b / n })
    }
}

fn sign(r: Ratio<i64>) -> i32 {
    if r.is_zero() {
        0
    } else if r.is_positive() {
        1
    } else {
        -1
    }
}

fn ratio_f64(r: Ratio<i64>) -> f64 {
    *r.numer() as f64 / *r.denom() as f64
}

impl Add for QSqrt5 {
    type Output = QSqrt5;
    fn add(self, o: QSqrt5) -> QSqrt5 {
        QSqrt5 { a: self.a + o.a, b: self.b + o.b }
    }
}

impl Sub for QSqrt5 {
    type Output = QSqrt5;
    fn sub(self, o: QSqrt5) -> QSqrt5 {
        QSqrt5 { a: self.a - o.a, b: self.b - o.b }
    }
}

impl Neg for QSqrt5 {
    type Output = QSqrt5;
    fn neg(self) -> QSqrt5 {
        QSqrt5 { a: -self.a, b: -self.b }
    }
}

impl Mul for QSqrt5 {
    type Output = QSqrt5;
    fn mul(self, o: QSqrt5) -> QSqrt5 {
        let five = Ratio::from_integer(5);
        QSqrt5 { a: self.a * o.a + five * self.b * o.b, b: self.a * o.b + self.b * o.a }
    }
}

#[allow(clippy::suspicious_arithmetic_impl)]
impl Div for QSqrt5 {
    type Output = QSqrt5;
    fn div(self, o: QSqrt5) -> QSqrt5 {
        self * o.inv().expect("division by zero in Q(sqrt 5)")
    }
}

impl ModuliScalar for QSqrt5 {
    fn zero() -> Self {
        QSqrt5::rational(0, 1)
    }

    fn ratio(num: i64, den: i64) -> Self {
        QSqrt5::rational(num, den)
    }
}

/// Canonical `(A±B√5)/C` with integers over a common denominator.
impl fmt::Display for QSqrt5 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let c = self.a.denom().lcm(self.b.denom());
        let big_a = self.a.numer() * (c / self.a.denom());
        let big_b = self.b.numer() * (c / self.b.denom());
        let surd = match big_b.abs() {
            0 => String::new(),
            1 => "√5".to_string(),
            k => format!("{k}√5"),
        };
        let body = match (big_a, big_b) {
            (a, 0) => a.to_string(),
            (0, b) if b < 0 => format!("-{surd}"),
            (0, _) => surd,
            (a, b) if b < 0 => format!("{a}-{surd}"),
            (a, _) => format!("{a}+{surd}"),
        };
        if c == 1 {
            write!(f, "{body}")
        } else {
            write!(f, "({body})/{c}")
        }
    }
}

/// Nonnegative moduli `p_a`, standard order or flat `r·n + s` order.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ModuliVector {
    values: Vec<f64>,
}

impl ModuliVector {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if let Some(bad) = values.iter().find(|&&p| p.is_nan() || p < 0.0) {
            return Err(Error::InvalidParameter(format!("negative modulus {bad}")));
        }
        Ok(ModuliVector { values })
    }

    pub fn from_components(z: &[Complex64]) -> Self {
        ModuliVector { values: z.iter().map(|c| c.norm_sqr()).collect() }
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn dim(&self) -> usize {
        self.values.len()
    }

    pub fn is_normalized(&self) -> bool {
        (self.values.iter().sum::<f64>() - 1.0).abs() <= 1e-12
    }
}

/// Unit-norm fiducial components `z_a`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FiducialComponents {
    z: Vec<Complex64>,
}

impl FiducialComponents {
    pub fn new(z: Vec<Complex64>) -> Result<Self> {
        let norm = crate::exact::dense::norm(&z);
        if (norm * norm - 1.0).abs() > 1e-10 {
            return Err(Error::NotUnitNorm { norm });
        }
        Ok(FiducialComponents { z })
    }

    pub fn components(&self) -> &[Complex64] {
        &self.z
    }

    pub fn moduli(&self) -> ModuliVector {
        ModuliVector::from_components(&self.z)
    }
}

/// Standard-basis residuals: index 0 is `Σ p_a² − 2/(N+1)`, index `x` is
/// `Σ_a p_a p_{a+x} − 1/(N+1)`. Entries `x` and `N − x` are computed by the
/// same summation and are bit-identical.
pub fn moduli_residuals_standard_generic<T: ModuliScalar>(p: &[T]) -> Vec<T> {
    let dim = p.len();
    let (two, one) = (T::ratio(2, dim as i64 + 1), T::ratio(1, dim as i64 + 1));
    (0..dim)
        .map(|x| {
            let rep = x.min(dim - x);
            let sum = (0..dim).fold(T::zero(), |acc, a| acc + p[a] * p[(a + rep) % dim]);
            sum - if x == 0 { two } else { one }
        })
        .collect()
}

pub fn moduli_residuals_standard(p: &ModuliVector) -> Vec<f64> {
    moduli_residuals_standard_generic(p.values())
}

/// Phase-permutation residuals at flat index `x·n + y`: the `(0,0)` entry is
/// `Σ p_{rs}² − 2/(N+1)`, the others `Σ p_{rs} p_{r+x,s+y} − 1/(N+1)`.
/// Entries `(x,y)` and `(−x,−y)` are bit-identical.
pub fn moduli_residuals_pp_generic<T: ModuliScalar>(p: &[T], n: usize) -> Result<Vec<T>> {
    let dim = p.len();
    if perfect_square_root(dim) != Some(n) {
        return Err(Error::NotPerfectSquare { dim });
    }
    let (two, one) = (T::ratio(2, dim as i64 + 1), T::ratio(1, dim as i64 + 1));
    Ok((0..dim)
        .map(|k| {
            let (x, y) = (k / n, k % n);
            let (nx, ny) = ((n - x) % n, (n - y) % n);
            let (x, y) = if nx * n + ny < k { (nx, ny) } else { (x, y) };
            let mut sum = T::zero();
            for r in 0..n {
                for s in 0..n {
                    sum = sum + p[r * n + s] * p[((r + x) % n) * n + (s + y) % n];
                }
            }
            sum - if k == 0 { two } else { one }
        })
        .collect())
}

pub fn moduli_residuals_pp(p: &ModuliVector, n: usize) -> Result<Vec<f64>> {
    moduli_residuals_pp_generic(p.values(), n)
}

/// `Σ_a z̄_a z̄_{a+k−i} z_{a+k} z_{a−i}` for every `i, k ≠ 0`.
pub fn phase_residuals(z: &FiducialComponents) -> BTreeMap<(usize, usize), Complex64> {
    let c = z.components();
    let dim = c.len();
    let idx = |a: usize, plus: usize, minus: usize| (a + plus + dim - minus % dim) % dim;
    let mut out = BTreeMap::new();
    for i in 1..dim {
        for k in 1..dim {
            let sum: Complex64 =
                (0..dim).map(|a| c[a].conj() * c[idx(a, k, i)].conj() * c[(a + k) % dim] * c[idx(a, 0, i)]).sum();
            out.insert((i, k), sum);
        }
    }
    out
}

/// `(Σ p)²` and, for even `N`, `(Σ_even p − Σ_odd p)²`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DerivedIdentities {
    pub s1: f64,
    pub s2: Option<f64>,
}

pub fn derived_identities(p: &ModuliVector) -> DerivedIdentities {
    let v = p.values();
    let total: f64 = v.iter().sum();
    let s2 = v.len().is_multiple_of(2).then(|| {
        let alt: f64 = v.iter().enumerate().map(|(a, x)| if a % 2 == 0 { *x } else { -x }).sum();
        alt * alt
    });
    DerivedIdentities { s1: total * total, s2 }
}

/// Residual indices grouped by the `x ↔ −x` (resp. `(x,y) ↔ (−x,−y)`)
/// identification, each class sorted; class `[0]` is the norm equation.
pub fn independent_equation_set(basis: RepBasis) -> Vec<Vec<usize>> {
    let dim = basis.dim();
    let partner = |k: usize| match basis.kind() {
        BasisKind::Standard => (dim - k) % dim,
        BasisKind::PhasePermutation => {
            let n = basis.side().expect("square");
            ((n - k / n) % n) * n + (n - k % n) % n
        }
    };
    let mut classes = Vec::new();
    for k in 0..dim {
        let j = partner(k);
        if j < k {
            continue;
        }
        classes.push(if j == k { vec![k] } else { vec![k, j] });
    }
    classes
}

/// One sign choice for the square-rooted `N = 4` system.
#[derive(Clone, Debug, PartialEq)]
pub struct SignBranch {
    /// Signs of `√1, √(1/5), √(1/5), √(1/5)` in the four linear equations.
    pub signs: [i8; 4],
    /// `(p₀₀, p₀₁, p₁₀, p₁₁)`.
    pub solution: [QSqrt5; 4],
    pub nonnegative: bool,
    pub ordered: bool,
}

impl SignBranch {
    pub fn admissible(&self) -> bool {
        self.nonnegative && self.ordered
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct N4Solution {
    pub moduli: [QSqrt5; 4],
    pub branches: Vec<SignBranch>,
}

/// Solve a square linear system over `Q(√5)` by Gaussian elimination.
fn solve_exact<const K: usize>(mut m: [[QSqrt5; K]; K], mut rhs: [QSqrt5; K]) -> Option<[QSqrt5; K]> {
    for col in 0..K {
        let pivot = (col..K).find(|&r| !m[r][col].is_zero())?;
        m.swap(col, pivot);
        rhs.swap(col, pivot);
        let inv = m[col][col].inv()?;
        for r in 0..K {
            if r != col && !m[r][col].is_zero() {
                let factor = m[r][col] * inv;
                let pivot_row = m[col];
                for (dst, src) in m[r][col..].iter_mut().zip(&pivot_row[col..]) {
                    *dst = *dst - factor * *src;
                }
                rhs[r] = rhs[r] - factor * rhs[col];
            }
        }
    }
    let mut out = rhs;
    for k in 0..K {
        out[k] = rhs[k] / m[k][k];
    }
    Some(out)
}

/// The `N = 4` moduli in the phase-permutation basis.
///
/// The four equations are squares of linear forms
/// `(p₀₀+p₀₁+p₁₀+p₁₁)² = 1` and `(p₀₀ ± …)² = 1/5`. Under the ordering
/// `p₀₀ ≥ p₀₁ ≥ p₁₀ ≥ p₁₁ ≥ 0` the first three square roots are positive;
/// both signs of the fourth are solved and checked.
pub fn solve_moduli_n4() -> N4Solution {
    let one = QSqrt5::rational(1, 1);
    let neg = -one;
    // rows: coefficients of (p00, p01, p10, p11)
    let system = [[one, one, one, one], [one, one, neg, neg], [one, neg, one, neg], [one, neg, neg, one]];
    let root_fifth = QSqrt5::sqrt5() * QSqrt5::rational(1, 5);
    let mut branches = Vec::new();
    for last in [1i8, -1] {
        let signs = [1, 1, 1, last];
        let rhs = [one, root_fifth, root_fifth, root_fifth * QSqrt5::rational(last as i64, 1)];
        let solution = solve_exact(system, rhs).expect("Hadamard system is invertible");
        let nonnegative = solution.iter().all(QSqrt5::is_nonnegative);
        let ordered = solution.windows(2).all(|w| (w[0] - w[1]).is_nonnegative());
        branches.push(SignBranch { signs, solution, nonnegative, ordered });
    }
    let survivors: Vec<&SignBranch> = branches.iter().filter(|b| b.admissible()).collect();
    assert_eq!(survivors.len(), 1, "exactly one sign branch must survive");
    N4Solution { moduli: survivors[0].solution, branches }
}
