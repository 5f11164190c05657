//! Exact phase-permutation (monomial) matrices.

use std::fmt;

use num_complex::Complex64;
use num_integer::Integer;
use serde::{Deserialize, Serialize};

use super::dense::{DenseMatrix, StateVector};
use super::phase::{snap_turns, PhaseExp};
use crate::error::{Error, Result};

/// Orders above this are reported as [`Error::OrderOverflow`].
pub const ORDER_CAP: u64 = 1_000_000;

/// A monomial matrix: column `c` holds the single entry `phases[c]` at row
/// `perm[c]`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct MonomialMatrix {
    perm: Vec<usize>,
    phases: Vec<PhaseExp>,
}

impl MonomialMatrix {
    pub fn new(perm: Vec<usize>, phases: Vec<PhaseExp>) -> Result<Self> {
        if perm.len() != phases.len() {
            return Err(Error::DimensionMismatch { left: perm.len(), right: phases.len() });
        }
        let mut seen = vec![false; perm.len()];
        for &t in &perm {
            if t >= perm.len() || seen[t] {
                return Err(Error::NotPermutation(perm));
            }
            seen[t] = true;
        }
        Ok(MonomialMatrix { perm, phases })
    }

    pub fn identity(dim: usize) -> Self {
        MonomialMatrix { perm: (0..dim).collect(), phases: vec![PhaseExp::ONE; dim] }
    }

    pub fn diagonal(phases: Vec<PhaseExp>) -> Self {
        MonomialMatrix { perm: (0..phases.len()).collect(), phases }
    }

    pub fn permutation(perm: Vec<usize>) -> Result<Self> {
        let dim = perm.len();
        Self::new(perm, vec![PhaseExp::ONE; dim])
    }

    pub fn dim(&self) -> usize {
        self.perm.len()
    }

    pub fn perm(&self) -> &[usize] {
        &self.perm
    }

    pub fn phases(&self) -> &[PhaseExp] {
        &self.phases
    }

    /// Exact product `self · other`.
    pub fn compose(&self, other: &MonomialMatrix) -> Result<MonomialMatrix> {
        if self.dim() != other.dim() {
            return Err(Error::DimensionMismatch { left: self.dim(), right: other.dim() });
        }
        let (perm, phases) =
            other.perm.iter().zip(&other.phases).map(|(&mid, &ph)| (self.perm[mid], self.phases[mid] * ph)).unzip();
        Ok(MonomialMatrix { perm, phases })
    }

    /// The inverse, which for a monomial unitary is also its adjoint.
    pub fn inverse(&self) -> MonomialMatrix {
        let dim = self.dim();
        let mut perm = vec![0; dim];
        let mut phases = vec![PhaseExp::ONE; dim];
        for c in 0..dim {
            perm[self.perm[c]] = c;
            phases[self.perm[c]] = self.phases[c].conj();
        }
        MonomialMatrix { perm, phases }
    }

    pub fn pow(&self, k: i64) -> MonomialMatrix {
        let mut base = if k < 0 { self.inverse() } else { self.clone() };
        let mut e = k.unsigned_abs();
        let mut acc = MonomialMatrix::identity(self.dim());
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.compose(&base).expect("same dimension");
            }
            base = base.compose(&base).expect("same dimension");
            e >>= 1;
        }
        acc
    }

    pub fn scale(&self, phase: PhaseExp) -> MonomialMatrix {
        MonomialMatrix { perm: self.perm.clone(), phases: self.phases.iter().map(|&p| p * phase).collect() }
    }

    pub fn is_identity(&self) -> bool {
        self.perm.iter().enumerate().all(|(c, &r)| c == r) && self.phases.iter().all(PhaseExp::is_one)
    }

    pub fn is_diagonal(&self) -> bool {
        self.perm.iter().enumerate().all(|(c, &r)| c == r)
    }

    /// Representative modulo global phase: column 0's phase is made trivial.
    pub fn canonical(&self) -> MonomialMatrix {
        match self.phases.first() {
            Some(&p0) => self.scale(p0.conj()),
            None => self.clone(),
        }
    }

    /// Equality up to a global phase.
    pub fn projectively_eq(&self, other: &MonomialMatrix) -> bool {
        self.canonical() == other.canonical()
    }

    /// Smallest `k ≥ 1` with `self^k` equal to the identity.
    ///
    /// On a cycle of length `L` whose phases multiply to `Φ`, the `L`-th power
    /// acts as `Φ`, so the order is the lcm over cycles of `L · ord(Φ)`.
    pub fn order(&self) -> Result<u64> {
        let mut visited = vec![false; self.dim()];
        let mut order: u64 = 1;
        for start in 0..self.dim() {
            if visited[start] {
                continue;
            }
            let mut len = 0u64;
            let mut phase = PhaseExp::ONE;
            let mut c = start;
            while !visited[c] {
                visited[c] = true;
                phase = phase * self.phases[c];
                c = self.perm[c];
                len += 1;
            }
            order = order.lcm(&(len * phase.order()));
            if order > ORDER_CAP {
                return Err(Error::OrderOverflow { cap: ORDER_CAP });
            }
        }
        Ok(order)
    }

    /// The cycles of the underlying permutation, each listed from its
    /// smallest index in the direction `c → perm[c]`.
    pub fn cycles(&self) -> Vec<Vec<usize>> {
        let mut visited = vec![false; self.dim()];
        let mut out = Vec::new();
        for start in 0..self.dim() {
            if visited[start] {
                continue;
            }
            let mut cycle = Vec::new();
            let mut c = start;
            while !visited[c] {
                visited[c] = true;
                cycle.push(c);
                c = self.perm[c];
            }
            out.push(cycle);
        }
        out
    }

    pub fn to_dense(&self) -> DenseMatrix {
        let mut m = DenseMatrix::zeros(self.dim(), self.dim());
        for (c, (&r, p)) in self.perm.iter().zip(&self.phases).enumerate() {
            m[(r, c)] = p.to_complex();
        }
        m
    }

    pub fn apply(&self, v: &[Complex64]) -> StateVector {
        assert_eq!(v.len(), self.dim(), "vector length must match dimension");
        let mut out = vec![Complex64::new(0.0, 0.0); v.len()];
        for (c, (&r, p)) in self.perm.iter().zip(&self.phases).enumerate() {
            out[r] = p.to_complex() * v[c];
        }
        out
    }

    /// `self ⊗ other` with row/column index `a·other.dim() + b`.
    pub fn kron(&self, other: &MonomialMatrix) -> MonomialMatrix {
        let m = other.dim();
        let mut perm = Vec::with_capacity(self.dim() * m);
        let mut phases = Vec::with_capacity(self.dim() * m);
        for a in 0..self.dim() {
            for b in 0..m {
                perm.push(self.perm[a] * m + other.perm[b]);
                phases.push(self.phases[a] * other.phases[b]);
            }
        }
        MonomialMatrix { perm, phases }
    }

    /// Largest phase denominator among the entries.
    pub fn max_denominator(&self) -> i64 {
        self.phases.iter().map(PhaseExp::denominator).max().unwrap_or(1)
    }

    /// `self · dense`, computed by routing rows.
    pub fn left_mul_dense(&self, dense: &DenseMatrix) -> DenseMatrix {
        let mut out = DenseMatrix::zeros(dense.rows(), dense.cols());
        for (c, (&r, p)) in self.perm.iter().zip(&self.phases).enumerate() {
            let ph = p.to_complex();
            for k in 0..dense.cols() {
                out[(r, k)] = ph * dense[(c, k)];
            }
        }
        out
    }
}

impl fmt::Display for MonomialMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let cols: Vec<String> =
            self.perm.iter().zip(&self.phases).enumerate().map(|(c, (r, p))| format!("{c}->{r}@{p}")).collect();
        write!(f, "[{}]", cols.join(", "))
    }
}

/// Default snapping denominator for dimension `dim`.
pub fn default_max_denom(dim: usize) -> i64 {
    24 * dim as i64
}

/// Recover an exact monomial matrix from a dense one.
///
/// Every column must have exactly one entry of modulus above `tol`, that entry
/// must be unimodular within `tol`, and its argument must lie within `tol`
/// radians of a rational turn with denominator at most `max_denom`.
pub fn extract_monomial(m: &DenseMatrix, tol: f64, max_denom: i64) -> Result<MonomialMatrix> {
    if !m.is_square() {
        return Err(Error::DimensionMismatch { left: m.rows(), right: m.cols() });
    }
    let dim = m.rows();
    let mut perm = Vec::with_capacity(dim);
    let mut phases = Vec::with_capacity(dim);
    for c in 0..dim {
        let mut found: Option<usize> = None;
        for r in 0..dim {
            let modulus = m[(r, c)].norm();
            if modulus > tol {
                if let Some(prev) = found {
                    return Err(Error::NotMonomial {
                        column: c,
                        reason: format!("has large entries in rows {prev} and {r}"),
                    });
                }
                found = Some(r);
            }
        }
        let r = found.ok_or_else(|| Error::NotMonomial { column: c, reason: "has no large entry".into() })?;
        let z = m[(r, c)];
        if (z.norm() - 1.0).abs() > tol {
            return Err(Error::NotMonomial { column: c, reason: format!("entry modulus {} is not 1", z.norm()) });
        }
        let turns = z.arg() / (2.0 * std::f64::consts::PI);
        let phase =
            snap_turns(turns, tol, max_denom).ok_or(Error::PhaseNotRecognized { column: c, turns, max_denom })?;
        perm.push(r);
        phases.push(phase);
    }
    MonomialMatrix::new(perm, phases)
        .map_err(|_| Error::NotMonomial { column: 0, reason: "large entries do not form a permutation".into() })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn shift(dim: usize) -> MonomialMatrix {
        MonomialMatrix::permutation((0..dim).map(|c| (c + 1) % dim).collect()).unwrap()
    }

    fn repeated_order(a: &MonomialMatrix) -> u64 {
        let mut acc = a.clone();
        let mut k = 1;
        while !acc.is_identity() {
            acc = acc.compose(a).unwrap();
            k += 1;
        }
        k
    }

    #[test]
    fn rejects_non_permutation() {
        let err = MonomialMatrix::permutation(vec![0, 0]).unwrap_err();
        assert!(matches!(err, Error::NotPermutation(_)));
    }

    #[test]
    fn compose_dimension_mismatch() {
        let a = MonomialMatrix::identity(2);
        let b = MonomialMatrix::identity(3);
        assert!(matches!(a.compose(&b), Err(Error::DimensionMismatch { .. })));
    }

    #[test]
    fn identity_is_neutral() {
        let b = shift(5).scale(PhaseExp::new(1, 3));
        assert_eq!(MonomialMatrix::identity(5).compose(&b).unwrap(), b);
    }

    #[test]
    fn order_identity_and_cycle_phase() {
        assert_eq!(MonomialMatrix::identity(4).order().unwrap(), 1);
        // 2-cycle carrying total phase -1 has order 4
        let m = MonomialMatrix::new(vec![1, 0], vec![PhaseExp::ONE, PhaseExp::new(1, 2)]).unwrap();
        assert_eq!(m.order().unwrap(), 4);
        assert_eq!(repeated_order(&m), 4);
    }

    #[test]
    fn order_overflow() {
        // cycles of coprime lengths whose lcm passes the cap
        let lens = [101usize, 103, 107, 109];
        let mut perm = Vec::new();
        let mut off = 0;
        for &l in &lens {
            perm.extend((0..l).map(|k| off + (k + 1) % l));
            off += l;
        }
        let m = MonomialMatrix::permutation(perm).unwrap();
        assert!(matches!(m.order(), Err(Error::OrderOverflow { .. })));
    }

    #[test]
    fn dense_identity_extracts() {
        let m = extract_monomial(&DenseMatrix::identity(4), 1e-9, 96).unwrap();
        assert!(m.is_identity());
    }

    #[test]
    fn fourier_is_not_monomial() {
        let w = PhaseExp::root_of_unity(4);
        let f = DenseMatrix::from_fn(4, 4, |r, c| w.pow((r * c) as i64).to_complex() * 0.5);
        assert!(matches!(extract_monomial(&f, 1e-9, 96), Err(Error::NotMonomial { .. })));
    }

    #[test]
    fn unrecognized_phase() {
        let mut d = DenseMatrix::identity(2);
        d[(1, 1)] = Complex64::from_polar(1.0, 1.0);
        assert!(matches!(extract_monomial(&d, 1e-9, 96), Err(Error::PhaseNotRecognized { column: 1, .. })));
    }

    #[test]
    fn canonical_drops_global_phase() {
        let a = shift(3).scale(PhaseExp::new(2, 7));
        assert!(a.canonical().phases()[0].is_one());
        assert!(a.projectively_eq(&shift(3)));
    }

    fn monomial_strategy(dim: usize) -> impl Strategy<Value = MonomialMatrix> {
        (Just((0..dim).collect::<Vec<_>>()).prop_shuffle(), proptest::collection::vec((0i64..24, 1i64..13), dim))
            .prop_map(|(perm, ph)| {
                MonomialMatrix::new(perm, ph.into_iter().map(|(n, d)| PhaseExp::new(n, d)).collect()).unwrap()
            })
    }

    proptest! {
        #[test]
        fn dense_product_agrees(a in monomial_strategy(6), b in monomial_strategy(6)) {
            let exact = a.compose(&b).unwrap().to_dense();
            let numeric = &a.to_dense() * &b.to_dense();
            prop_assert!(exact.max_abs_diff(&numeric) < 1e-14);
        }

        #[test]
        fn extract_roundtrip(a in monomial_strategy(5)) {
            prop_assert_eq!(extract_monomial(&a.to_dense(), 1e-9, 24 * 5).unwrap(), a.clone());
            prop_assert!(a.to_dense().unitarity_defect() < 1e-15);
        }

        #[test]
        fn order_matches_repetition(a in monomial_strategy(5), k in 1i64..6) {
            let ord = a.order().unwrap();
            prop_assert_eq!(ord, repeated_order(&a));
            let ord_k = a.pow(k).order().unwrap();
            prop_assert_eq!((ord_k * k as u64) % ord, 0);
        }
    }
}
