//! The Weyl-Heisenberg group `H(N)` in the standard (clock-diagonal) and
//! phase-permutation representations.
//!
//! Flat index convention for `N = n²`: `|r,s⟩ ↔ r·n + s`.

use std::collections::BTreeSet;

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exact::{DenseMatrix, MonomialMatrix, PhaseExp, StateVector};

/// Integer square root if `dim` is a perfect square.
pub fn perfect_square_root(dim: usize) -> Option<usize> {
    let r = (dim as f64).sqrt().round() as usize;
    (r * r == dim).then_some(r)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum BasisKind {
    Standard,
    PhasePermutation,
}

/// Which representation of `H(N)` matrices are written in.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct RepBasis {
    kind: BasisKind,
    dim: usize,
}

impl RepBasis {
    pub fn standard(dim: usize) -> Result<Self> {
        if dim < 2 {
            return Err(Error::InvalidDimension { dim, reason: "need N >= 2".into() });
        }
        Ok(RepBasis { kind: BasisKind::Standard, dim })
    }

    pub fn phase_permutation(dim: usize) -> Result<Self> {
        match perfect_square_root(dim) {
            Some(n) if n >= 2 => Ok(RepBasis { kind: BasisKind::PhasePermutation, dim }),
            Some(_) => Err(Error::InvalidDimension { dim, reason: "need n >= 2".into() }),
            None => Err(Error::NotPerfectSquare { dim }),
        }
    }

    pub fn new(kind: BasisKind, dim: usize) -> Result<Self> {
        match kind {
            BasisKind::Standard => Self::standard(dim),
            BasisKind::PhasePermutation => Self::phase_permutation(dim),
        }
    }

    pub fn kind(&self) -> BasisKind {
        self.kind
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// `n` with `N = n²`, for the phase-permutation basis.
    pub fn side(&self) -> Option<usize> {
        match self.kind {
            BasisKind::PhasePermutation => perfect_square_root(self.dim),
            BasisKind::Standard => None,
        }
    }

    pub fn tag(&self) -> &'static str {
        match self.kind {
            BasisKind::Standard => "std",
            BasisKind::PhasePermutation => "pp",
        }
    }
}

/// Label `(i, j)` of the group word `X^i Z^j`, reduced mod `N`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct DisplacementIndex {
    i: usize,
    j: usize,
    modulus: usize,
}

impl DisplacementIndex {
    pub fn new(i: i64, j: i64, modulus: usize) -> Self {
        let m = modulus as i64;
        DisplacementIndex { i: i.rem_euclid(m) as usize, j: j.rem_euclid(m) as usize, modulus }
    }

    pub fn zero(modulus: usize) -> Self {
        DisplacementIndex { i: 0, j: 0, modulus }
    }

    pub fn i(&self) -> usize {
        self.i
    }

    pub fn j(&self) -> usize {
        self.j
    }

    pub fn modulus(&self) -> usize {
        self.modulus
    }

    pub fn is_zero(&self) -> bool {
        self.i == 0 && self.j == 0
    }

    pub fn add(&self, other: &DisplacementIndex) -> DisplacementIndex {
        Self::new((self.i + other.i) as i64, (self.j + other.j) as i64, self.modulus)
    }

    pub fn neg(&self) -> DisplacementIndex {
        Self::new(-(self.i as i64), -(self.j as i64), self.modulus)
    }

    /// `i·j′ − j·i′ mod N`.
    pub fn symplectic(&self, other: &DisplacementIndex) -> usize {
        let m = self.modulus as i64;
        ((self.i * other.j) as i64 - (self.j * other.i) as i64).rem_euclid(m) as usize
    }

    /// Lexicographic position `i·N + j`.
    pub fn flat(&self) -> usize {
        self.i * self.modulus + self.j
    }

    /// All `N²` labels in lexicographic order.
    pub fn all(modulus: usize) -> impl Iterator<Item = DisplacementIndex> {
        (0..modulus * modulus).map(move |k| DisplacementIndex { i: k / modulus, j: k % modulus, modulus })
    }
}

/// `X`: `|k⟩ → |k+1⟩`; `Z = diag(1, ω, …, ω^{N−1})`.
pub fn standard_generators(dim: usize) -> Result<(MonomialMatrix, MonomialMatrix)> {
    if dim < 2 {
        return Err(Error::InvalidDimension { dim, reason: "need N >= 2".into() });
    }
    let x = MonomialMatrix::permutation((0..dim).map(|k| (k + 1) % dim).collect())?;
    let z = MonomialMatrix::diagonal((0..dim).map(|k| PhaseExp::new(k as i64, dim as i64)).collect());
    Ok((x, z))
}

/// Generators in the phase-permutation basis for `N = n²`:
///
/// * `X|r,s⟩ = |r,s+1⟩`, except `X|r,n−1⟩ = q^r |r,0⟩`;
/// * `Z|r,s⟩ = ω^s |r−1,s⟩`.
pub fn pp_generators(n: usize) -> Result<(MonomialMatrix, MonomialMatrix)> {
    if n < 2 {
        return Err(Error::InvalidDimension { dim: n * n, reason: "need n >= 2".into() });
    }
    let dim = n * n;
    let mut xp = Vec::with_capacity(dim);
    let mut xph = Vec::with_capacity(dim);
    let mut zp = Vec::with_capacity(dim);
    let mut zph = Vec::with_capacity(dim);
    for r in 0..n {
        for s in 0..n {
            if s + 1 < n {
                xp.push(r * n + s + 1);
                xph.push(PhaseExp::ONE);
            } else {
                xp.push(r * n);
                xph.push(PhaseExp::new(r as i64, n as i64));
            }
            zp.push(((r + n - 1) % n) * n + s);
            zph.push(PhaseExp::new(s as i64, dim as i64));
        }
    }
    Ok((MonomialMatrix::new(xp, xph)?, MonomialMatrix::new(zp, zph)?))
}

pub fn generators(basis: RepBasis) -> (MonomialMatrix, MonomialMatrix) {
    match basis.side() {
        Some(n) => pp_generators(n),
        None => standard_generators(basis.dim()),
    }
    .expect("RepBasis is validated on construction")
}

/// `X^i Z^j` in the requested representation.
pub fn displacement(p: DisplacementIndex, basis: RepBasis) -> MonomialMatrix {
    let (x, z) = generators(basis);
    displacement_from(&x, &z, p)
}

fn displacement_from(x: &MonomialMatrix, z: &MonomialMatrix, p: DisplacementIndex) -> MonomialMatrix {
    x.pow(p.i() as i64).compose(&z.pow(p.j() as i64)).expect("same dimension")
}

/// All `N²` displacement operators in lexicographic label order.
pub fn all_displacements(basis: RepBasis) -> Vec<(DisplacementIndex, MonomialMatrix)> {
    let (x, z) = generators(basis);
    let n = basis.dim();
    let zpows: Vec<MonomialMatrix> = (0..n).map(|j| z.pow(j as i64)).collect();
    let mut out = Vec::with_capacity(n * n);
    let mut xi = MonomialMatrix::identity(n);
    for i in 0..n {
        for (j, zj) in zpows.iter().enumerate() {
            out.push((DisplacementIndex::new(i as i64, j as i64, n), xi.compose(zj).expect("same dimension")));
        }
        xi = x.compose(&xi).expect("same dimension");
    }
    out
}

/// Unitary `V` with `V·G_pp·V† = G_std` for `G ∈ {X, Z}`.
///
/// Column `|0,0⟩` is the vector fixed by both `X^n` and `Z^n` in the standard
/// representation, read off the `X^n` cycle through `|0⟩`. The remaining
/// columns are fixed by the phase-permutation action itself:
/// `|r,0⟩ = Z^{n−r}|0,0⟩` and `|r,s⟩ = X^s|r,0⟩`, so that both generator
/// actions hold by construction.
pub fn change_of_basis(n: usize) -> Result<DenseMatrix> {
    let (x, z) = standard_generators(n * n)?;
    let dim = n * n;
    let xn = x.pow(n as i64);
    let seed = cycle_eigenvector(&xn, 0, PhaseExp::ONE)
        .ok_or_else(|| Error::InvalidDimension { dim, reason: "X^n has no fixed vector".into() })?;
    let mut columns = vec![Vec::new(); dim];
    for r in 0..n {
        let mut v = z.pow(((n - r) % n) as i64).apply(&seed);
        for s in 0..n {
            columns[r * n + s] = v.clone();
            v = x.apply(&v);
        }
    }
    let mut basis_change = DenseMatrix::from_columns(&columns);
    // global phase: entry (0,0) real positive, else first nonzero of column 0
    let pivot = (0..dim).map(|r| basis_change[(r, 0)]).find(|z| z.norm() > 1e-12).unwrap_or(Complex64::new(1.0, 0.0));
    basis_change = basis_change.scale(pivot.conj() / pivot.norm());
    Ok(basis_change)
}

/// Unit eigenvector of a monomial matrix supported on the cycle through
/// `start`, for eigenvalue `λ₀·branch`, where `λ₀` is the principal `L`-th
/// root of the phase product around the length-`L` cycle. `branch` must be
/// an `L`-th root of unity. Returns `None` if `start` is out of range.
pub fn cycle_eigenvector(m: &MonomialMatrix, start: usize, branch: PhaseExp) -> Option<StateVector> {
    if start >= m.dim() {
        return None;
    }
    let mut cycle = vec![start];
    let mut hops = vec![m.phases()[start]];
    let mut c = m.perm()[start];
    while c != start {
        cycle.push(c);
        hops.push(m.phases()[c]);
        c = m.perm()[c];
    }
    let len = cycle.len();
    let total = hops.iter().fold(PhaseExp::ONE, |acc, &p| acc * p);
    // principal len-th root, times the requested branch
    let lambda = PhaseExp::from_turns(total.turns() / num_rational::Ratio::from_integer(len as i64)) * branch;
    let mut v = vec![Complex64::new(0.0, 0.0); m.dim()];
    let norm = 1.0 / (len as f64).sqrt();
    let mut coeff = PhaseExp::ONE;
    for (k, &idx) in cycle.iter().enumerate() {
        v[idx] = coeff.to_complex() * norm;
        coeff = coeff * hops[k] / lambda;
    }
    Some(v)
}

/// An order-`N` isotropic subgroup of `Z_N × Z_N`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct StabilizerSubgroup {
    elements: Vec<DisplacementIndex>,
}

impl StabilizerSubgroup {
    pub fn elements(&self) -> &[DisplacementIndex] {
        &self.elements
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn contains(&self, p: &DisplacementIndex) -> bool {
        self.elements.binary_search(p).is_ok()
    }

    pub fn is_isotropic(&self) -> bool {
        self.elements.iter().all(|a| self.elements.iter().all(|b| a.symplectic(b) == 0))
    }
}

pub const MAX_STABILIZER_DIM: usize = 100;

/// Every order-`N` subgroup of `Z_N²` on which the symplectic form vanishes.
///
/// Such subgroups lift to index-`N` lattices containing `N·Z²`; each has a
/// unique Hermite basis `{(a, b), (0, d)}` with `a·d = N`, `0 ≤ b < d`.
pub fn stabilizer_subgroups(dim: usize) -> Result<Vec<StabilizerSubgroup>> {
    if dim > MAX_STABILIZER_DIM {
        return Err(Error::InvalidDimension {
            dim,
            reason: format!("enumeration limited to N <= {MAX_STABILIZER_DIM}"),
        });
    }
    if dim < 2 {
        return Err(Error::InvalidDimension { dim, reason: "need N >= 2".into() });
    }
    let mut out = Vec::new();
    for a in (1..=dim).filter(|a| dim.is_multiple_of(*a)) {
        let d = dim / a;
        for b in 0..d {
            let mut elems = BTreeSet::new();
            for u in 0..d {
                for v in 0..a {
                    elems.insert(DisplacementIndex::new((u * a) as i64, (u * b + v * d) as i64, dim));
                }
            }
            let group = StabilizerSubgroup { elements: elems.into_iter().collect() };
            if group.len() != dim || !group.is_isotropic() {
                return Err(Error::Enumeration(format!("lattice ({a},{b};0,{d}) gave a bad subgroup")));
            }
            out.push(group);
        }
    }
    out.sort();
    Ok(out)
}

/// The stabilizer group `{(n·a, n·b)}`, all of whose operators have order
/// dividing `n` in the phase-permutation representation; uniqueness among
/// all stabilizer groups is checked.
pub fn unique_order_n_stabilizer(n: usize) -> Result<StabilizerSubgroup> {
    let dim = n * n;
    let basis = RepBasis::phase_permutation(dim)?;
    let mut elems: Vec<DisplacementIndex> =
        (0..dim).map(|k| DisplacementIndex::new((n * (k / n)) as i64, (n * (k % n)) as i64, dim)).collect();
    elems.sort();
    let preferred = StabilizerSubgroup { elements: elems };

    let displacements = all_displacements(basis);
    let small_order = |g: &StabilizerSubgroup| -> Result<bool> {
        for p in g.elements() {
            let ord = displacements[p.flat()].1.order()?;
            if !(n as u64).is_multiple_of(ord) {
                return Ok(false);
            }
        }
        Ok(true)
    };
    if !small_order(&preferred)? {
        return Err(Error::Enumeration("preferred subgroup contains an element of order not dividing n".into()));
    }
    let mut matches = 0;
    for g in stabilizer_subgroups(dim)? {
        if small_order(&g)? {
            matches += 1;
            if g != preferred {
                return Err(Error::Enumeration("a second stabilizer group has only order-n elements".into()));
            }
        }
    }
    if matches != 1 {
        return Err(Error::Enumeration(format!("expected exactly one order-n stabilizer group, found {matches}")));
    }
    Ok(preferred)
}

/// Split `A = B ⊗ C` over `|r⟩ ⊗ |s⟩`, with `B`'s column-0 phase trivial.
pub fn kronecker_factor_check(a: &MonomialMatrix, n: usize) -> Result<(MonomialMatrix, MonomialMatrix)> {
    if a.dim() != n * n {
        return Err(Error::DimensionMismatch { left: a.dim(), right: n * n });
    }
    let target = |r: usize, s: usize| a.perm()[r * n + s];
    let phase = |r: usize, s: usize| a.phases()[r * n + s];

    let b_perm: Vec<usize> = (0..n).map(|r| target(r, 0) / n).collect();
    let c_perm: Vec<usize> = (0..n).map(|s| target(0, s) % n).collect();
    let c_phases: Vec<PhaseExp> = (0..n).map(|s| phase(0, s)).collect();
    let b_phases: Vec<PhaseExp> = (0..n).map(|r| phase(r, 0) / c_phases[0]).collect();
    for r in 0..n {
        for s in 0..n {
            if target(r, s) != b_perm[r] * n + c_perm[s] || phase(r, s) != b_phases[r] * c_phases[s] {
                return Err(Error::NotLocal);
            }
        }
    }
    let b = MonomialMatrix::new(b_perm, b_phases).map_err(|_| Error::NotLocal)?;
    let c = MonomialMatrix::new(c_perm, c_phases).map_err(|_| Error::NotLocal)?;
    Ok((b, c))
}

/// Schmidt coefficients of a vector on `ℋⁿ ⊗ ℋⁿ`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SchmidtSpectrum {
    /// Singular values, descending.
    pub values: Vec<f64>,
    /// `2|v₀₀v₁₁ − v₀₁v₁₀|`, only for `n = 2`.
    pub concurrence: Option<f64>,
}

impl SchmidtSpectrum {
    pub fn max_abs_diff(&self, other: &SchmidtSpectrum) -> f64 {
        self.values.iter().zip(&other.values).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max)
    }
}

pub fn schmidt_spectrum(v: &[Complex64], n: usize) -> Result<SchmidtSpectrum> {
    if v.len() != n * n {
        return Err(Error::DimensionMismatch { left: v.len(), right: n * n });
    }
    let norm = crate::exact::dense::norm(v);
    if (norm - 1.0).abs() > 1e-10 {
        return Err(Error::NotUnitNorm { norm });
    }
    let m = DMatrix::from_fn(n, n, |r, s| v[r * n + s]);
    let mut values: Vec<f64> = m.singular_values().iter().copied().collect();
    values.sort_by(|a, b| b.total_cmp(a));
    let concurrence = (n == 2).then(|| 2.0 * (v[0] * v[3] - v[1] * v[2]).norm());
    Ok(SchmidtSpectrum { values, concurrence })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cplx(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn standard_n2() {
        let (x, z) = standard_generators(2).unwrap();
        assert_eq!(
            z.to_dense(),
            DenseMatrix::from_fn(2, 2, |r, c| if r == c { cplx(1.0 - 2.0 * r as f64, 0.0) } else { cplx(0.0, 0.0) })
        );
        let zx = z.compose(&x).unwrap();
        let xz = x.compose(&z).unwrap();
        assert_eq!(zx, xz.scale(PhaseExp::new(1, 2)));
    }

    #[test]
    fn standard_n4_clock() {
        let (_, z) = standard_generators(4).unwrap();
        let diag: Vec<_> = (0..4).map(|k| z.to_dense()[(k, k)]).collect();
        let want = [cplx(1.0, 0.0), cplx(0.0, 1.0), cplx(-1.0, 0.0), cplx(0.0, -1.0)];
        for (a, b) in diag.iter().zip(want) {
            assert!((a - b).norm() < 1e-15);
        }
    }

    #[test]
    fn generator_orders_and_relations() {
        for dim in 2..=25 {
            let (x, z) = standard_generators(dim).unwrap();
            assert_eq!(x.order().unwrap(), dim as u64);
            assert_eq!(z.order().unwrap(), dim as u64);
            let omega = PhaseExp::root_of_unity(dim);
            assert_eq!(z.compose(&x).unwrap(), x.compose(&z).unwrap().scale(omega));
        }
        for n in 2..=5 {
            let dim = n * n;
            let (x, z) = pp_generators(n).unwrap();
            assert_eq!(x.order().unwrap(), dim as u64);
            assert_eq!(z.order().unwrap(), dim as u64);
            assert_eq!(z.compose(&x).unwrap(), x.compose(&z).unwrap().scale(PhaseExp::root_of_unity(dim)));
        }
    }

    #[test]
    fn pp_n2_actions() {
        let (x, z) = pp_generators(2).unwrap();
        // X|1,1⟩ = q|1,0⟩ = −|1,0⟩
        assert_eq!(x.perm()[3], 2);
        assert_eq!(x.phases()[3], PhaseExp::new(1, 2));
        // Z|0,1⟩ = ω|1,1⟩ = i|1,1⟩
        assert_eq!(z.perm()[1], 3);
        assert_eq!(z.phases()[1], PhaseExp::new(1, 4));
        let x2 = x.pow(2);
        assert_eq!(
            x2,
            MonomialMatrix::diagonal(vec![PhaseExp::ONE, PhaseExp::ONE, PhaseExp::new(1, 2), PhaseExp::new(1, 2)])
        );
    }

    #[test]
    fn pp_powers_diagonal() {
        for n in 2..=5 {
            let (x, z) = pp_generators(n).unwrap();
            let xn = x.pow(n as i64);
            let zn = z.pow(n as i64);
            for r in 0..n {
                for s in 0..n {
                    let k = r * n + s;
                    assert_eq!(xn.perm()[k], k);
                    assert_eq!(zn.perm()[k], k);
                    assert_eq!(xn.phases()[k], PhaseExp::new(r as i64, n as i64));
                    assert_eq!(zn.phases()[k], PhaseExp::new(s as i64, n as i64));
                }
            }
        }
    }

    #[test]
    fn invalid_dims() {
        assert!(standard_generators(1).is_err());
        assert!(pp_generators(1).is_err());
        assert!(matches!(RepBasis::phase_permutation(5), Err(Error::NotPerfectSquare { dim: 5 })));
        assert!(matches!(stabilizer_subgroups(101), Err(Error::InvalidDimension { .. })));
    }

    #[test]
    fn displacement_examples() {
        let b2 = RepBasis::standard(2).unwrap();
        assert!(displacement(DisplacementIndex::zero(2), b2).is_identity());
        let xz = displacement(DisplacementIndex::new(1, 1, 2), b2).to_dense();
        let want = DenseMatrix::from_fn(2, 2, |r, c| match (r, c) {
            (0, 1) => cplx(-1.0, 0.0),
            (1, 0) => cplx(1.0, 0.0),
            _ => cplx(0.0, 0.0),
        });
        assert_eq!(xz.max_abs_diff(&want), 0.0);
    }

    #[test]
    fn displacement_commutation_all_pairs() {
        for basis in [RepBasis::standard(4).unwrap(), RepBasis::phase_permutation(4).unwrap()] {
            let all = all_displacements(basis);
            for (p, dp) in &all {
                for (p2, dp2) in &all {
                    let lhs = dp.compose(dp2).unwrap();
                    let rhs = dp2.compose(dp).unwrap();
                    let e = p2.i() as i64 * p.j() as i64 - p.i() as i64 * p2.j() as i64;
                    assert_eq!(lhs, rhs.scale(PhaseExp::new(e, 4)), "{p:?} {p2:?}");
                }
            }
        }
    }

    #[test]
    fn change_of_basis_intertwines() {
        for n in 2..=5 {
            let v = change_of_basis(n).unwrap();
            assert!(v.unitarity_defect() < 1e-13);
            assert!(v[(0, 0)].im.abs() < 1e-15 && v[(0, 0)].re > 0.0);
            let (xs, zs) = standard_generators(n * n).unwrap();
            let (xp, zp) = pp_generators(n).unwrap();
            assert!(v.conjugate(&xp.to_dense()).unwrap().max_abs_diff(&xs.to_dense()) < 1e-12);
            assert!(v.conjugate(&zp.to_dense()).unwrap().max_abs_diff(&zs.to_dense()) < 1e-12);
        }
    }

    #[test]
    fn change_of_basis_columns_are_joint_eigenvectors() {
        let n = 2;
        let v = change_of_basis(n).unwrap();
        let (xs, zs) = standard_generators(4).unwrap();
        let (xn, zn) = (xs.pow(2).to_dense(), zs.pow(2).to_dense());
        for r in 0..n {
            for s in 0..n {
                let col = v.column(r * n + s);
                let q = |e: usize| PhaseExp::new(e as i64, n as i64).to_complex();
                let ax = xn.apply(&col);
                let az = zn.apply(&col);
                for k in 0..4 {
                    assert!((ax[k] - q(r) * col[k]).norm() < 1e-14);
                    assert!((az[k] - q(s) * col[k]).norm() < 1e-14);
                }
            }
        }
    }

    fn brute_force_subgroups(dim: usize) -> BTreeSet<Vec<DisplacementIndex>> {
        let all: Vec<_> = DisplacementIndex::all(dim).collect();
        let mut found = BTreeSet::new();
        for g in &all {
            for h in &all {
                let mut set = BTreeSet::new();
                for a in 0..dim {
                    for b in 0..dim {
                        let mut p = DisplacementIndex::zero(dim);
                        for _ in 0..a {
                            p = p.add(g);
                        }
                        for _ in 0..b {
                            p = p.add(h);
                        }
                        set.insert(p);
                    }
                }
                let elems: Vec<_> = set.into_iter().collect();
                if elems.len() == dim && elems.iter().all(|x| elems.iter().all(|y| x.symplectic(y) == 0)) {
                    found.insert(elems);
                }
            }
        }
        found
    }

    #[test]
    fn stabilizers_match_brute_force() {
        for dim in [2, 3, 4, 6, 8, 9] {
            let fast: BTreeSet<Vec<DisplacementIndex>> =
                stabilizer_subgroups(dim).unwrap().into_iter().map(|g| g.elements().to_vec()).collect();
            assert_eq!(fast, brute_force_subgroups(dim), "N = {dim}");
        }
        assert_eq!(stabilizer_subgroups(2).unwrap().len(), 3);
    }

    #[test]
    fn stabilizers_are_isotropic() {
        for dim in [5, 12, 16] {
            for g in stabilizer_subgroups(dim).unwrap() {
                assert_eq!(g.len(), dim);
                assert!(g.is_isotropic());
            }
        }
    }

    #[test]
    fn preferred_stabilizer() {
        let g = unique_order_n_stabilizer(2).unwrap();
        let want: Vec<_> =
            [(0, 0), (0, 2), (2, 0), (2, 2)].iter().map(|&(i, j)| DisplacementIndex::new(i, j, 4)).collect();
        assert_eq!(g.elements(), want.as_slice());
        let pp = RepBasis::phase_permutation(4).unwrap();
        assert_eq!(displacement(DisplacementIndex::new(2, 2, 4), pp).order().unwrap(), 2);
        assert!(stabilizer_subgroups(4).unwrap().contains(&g));

        let g3 = unique_order_n_stabilizer(3).unwrap();
        assert_eq!(g3.len(), 9);
        let pp9 = RepBasis::phase_permutation(9).unwrap();
        for p in g3.elements() {
            assert_eq!(3 % displacement(*p, pp9).order().unwrap(), 0);
        }
    }

    #[test]
    fn z_standard_factorizes() {
        let (_, z) = standard_generators(4).unwrap();
        let (b, c) = kronecker_factor_check(&z, 2).unwrap();
        assert_eq!(b, MonomialMatrix::diagonal(vec![PhaseExp::ONE, PhaseExp::new(1, 2)]));
        assert_eq!(c, MonomialMatrix::diagonal(vec![PhaseExp::ONE, PhaseExp::new(1, 4)]));
        assert_eq!(b.kron(&c), z);
    }

    #[test]
    fn x_pp_is_not_local() {
        let (x, _) = pp_generators(2).unwrap();
        assert_eq!(kronecker_factor_check(&x, 2), Err(Error::NotLocal));
        // exhaustive search over 2×2 monomial factors with eighth-root phases
        let perms = [vec![0, 1], vec![1, 0]];
        let mut factors = Vec::new();
        for p in &perms {
            for a in 0..8 {
                for b in 0..8 {
                    factors
                        .push(MonomialMatrix::new(p.clone(), vec![PhaseExp::new(a, 8), PhaseExp::new(b, 8)]).unwrap());
                }
            }
        }
        for f in &factors {
            for g in &factors {
                assert!(!f.kron(g).projectively_eq(&x));
            }
        }
    }

    #[test]
    fn pp_central_powers_are_local() {
        for n in 2..=4 {
            let (x, z) = pp_generators(n).unwrap();
            for g in [x.pow(n as i64), z.pow(n as i64)] {
                let (b, c) = kronecker_factor_check(&g, n).unwrap();
                assert!(b.is_diagonal() && c.is_diagonal());
                assert_eq!(b.kron(&c), g);
            }
        }
    }

    #[test]
    fn local_displacements_are_generated_by_z_and_xn() {
        for n in 2..=3 {
            let dim = n * n;
            let pp = RepBasis::phase_permutation(dim).unwrap();
            for (p, d) in all_displacements(pp) {
                let local = kronecker_factor_check(&d, n).is_ok();
                assert_eq!(local, p.i() % n == 0, "{p:?}");
            }
        }
    }

    #[test]
    fn schmidt_examples() {
        let mut prod = vec![cplx(0.0, 0.0); 4];
        prod[0] = cplx(1.0, 0.0);
        let s = schmidt_spectrum(&prod, 2).unwrap();
        assert!((s.values[0] - 1.0).abs() < 1e-15 && s.values[1].abs() < 1e-15);
        assert_eq!(s.concurrence, Some(0.0));

        let h = std::f64::consts::FRAC_1_SQRT_2;
        let bell = vec![cplx(h, 0.0), cplx(0.0, 0.0), cplx(0.0, 0.0), cplx(h, 0.0)];
        let s = schmidt_spectrum(&bell, 2).unwrap();
        assert!(s.values.iter().all(|x| (x - h).abs() < 1e-14));
        assert!((s.concurrence.unwrap() - 1.0).abs() < 1e-14);

        assert!(matches!(
            schmidt_spectrum(&[cplx(2.0, 0.0), cplx(0.0, 0.0), cplx(0.0, 0.0), cplx(0.0, 0.0)], 2),
            Err(Error::NotUnitNorm { .. })
        ));
    }

    #[test]
    fn schmidt_local_invariance() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        let n = 3;
        let (x, z) = pp_generators(n).unwrap();
        let locals = [z.clone(), x.pow(3), z.pow(2).compose(&x.pow(3)).unwrap()];
        for _ in 0..20 {
            let mut v: Vec<Complex64> =
                (0..9).map(|_| cplx(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5)).collect();
            crate::exact::dense::normalize(&mut v);
            let s0 = schmidt_spectrum(&v, n).unwrap();
            for l in &locals {
                let s1 = schmidt_spectrum(&l.apply(&v), n).unwrap();
                assert!(s0.max_abs_diff(&s1) < 1e-10);
            }
        }
    }
}
