//! Clifford unitaries from symplectic data, the monomiality check in the
//! phase-permutation basis, and Zauner unitaries.

use std::collections::HashSet;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exact::dense::orthonormal_basis;
use crate::exact::{default_max_denom, extract_monomial, DenseMatrix, MonomialMatrix, PhaseExp, StateVector};
use crate::heisenberg::{change_of_basis, cycle_eigenvector, displacement, BasisKind, DisplacementIndex, RepBasis};

/// Residual allowed when checking that a constructed unitary intertwines.
pub const INTERTWINING_TOL: f64 = 1e-10;

/// `(α β; γ δ)` over `Z_N` with determinant 1, acting on column labels
/// `(i, j)ᵀ`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SymplecticMatrix {
    entries: [usize; 4],
    modulus: usize,
}

impl SymplecticMatrix {
    pub fn new(alpha: i64, beta: i64, gamma: i64, delta: i64, modulus: usize) -> Result<Self> {
        if modulus < 2 {
            return Err(Error::InvalidDimension { dim: modulus, reason: "need N >= 2".into() });
        }
        let m = modulus as i64;
        let red = |x: i64| x.rem_euclid(m) as usize;
        let f = SymplecticMatrix { entries: [red(alpha), red(beta), red(gamma), red(delta)], modulus };
        if f.det() != 1 % modulus {
            return Err(Error::NoIntertwiner(format!("{f:?} has determinant {} mod {modulus}", f.det())));
        }
        Ok(f)
    }

    pub fn identity(modulus: usize) -> Self {
        SymplecticMatrix { entries: [1, 0, 0, 1], modulus }
    }

    /// `S = (0 −1; 1 0)`.
    pub fn fourier(modulus: usize) -> Self {
        Self::new(0, -1, 1, 0, modulus).expect("det 1")
    }

    /// `T = (1 0; 1 1)`.
    pub fn shear(modulus: usize) -> Self {
        Self::new(1, 0, 1, 1, modulus).expect("det 1")
    }

    pub fn entries(&self) -> [usize; 4] {
        self.entries
    }

    pub fn modulus(&self) -> usize {
        self.modulus
    }

    pub fn det(&self) -> usize {
        let [a, b, c, d] = self.entries;
        ((a * d) as i64 - (b * c) as i64).rem_euclid(self.modulus as i64) as usize
    }

    pub fn trace(&self) -> usize {
        (self.entries[0] + self.entries[3]) % self.modulus
    }

    pub fn compose(&self, other: &SymplecticMatrix) -> SymplecticMatrix {
        let [a, b, c, d] = self.entries;
        let [e, f, g, h] = other.entries;
        let m = self.modulus;
        SymplecticMatrix {
            entries: [(a * e + b * g) % m, (a * f + b * h) % m, (c * e + d * g) % m, (c * f + d * h) % m],
            modulus: m,
        }
    }

    pub fn pow(&self, k: u32) -> SymplecticMatrix {
        (0..k).fold(Self::identity(self.modulus), |acc, _| acc.compose(self))
    }

    pub fn apply(&self, p: DisplacementIndex) -> DisplacementIndex {
        let [a, b, c, d] = self.entries;
        DisplacementIndex::new((a * p.i() + b * p.j()) as i64, (c * p.i() + d * p.j()) as i64, self.modulus)
    }
}

/// `F_Z = (0 −1; 1 −1)`, of order three.
pub fn symplectic_order3_zauner(modulus: usize) -> Result<SymplecticMatrix> {
    let f = SymplecticMatrix::new(0, -1, 1, -1, modulus)?;
    debug_assert_eq!(f.pow(3), SymplecticMatrix::identity(modulus));
    Ok(f)
}

/// `|SL(2, Z_N)| = N³ ∏_{p | N} (1 − 1/p²)`.
pub fn sl2_order(modulus: usize) -> u64 {
    let mut order = (modulus as u64).pow(3);
    let mut m = modulus;
    let mut p = 2;
    while m > 1 {
        if m.is_multiple_of(p) {
            order = order / (p * p) as u64 * (p * p - 1) as u64;
            while m.is_multiple_of(p) {
                m /= p;
            }
        }
        p += 1;
    }
    order
}

/// A Clifford unitary together with the symplectic map it implements.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CliffordElement {
    pub symplectic: SymplecticMatrix,
    pub shift: DisplacementIndex,
    pub unitary: DenseMatrix,
    pub basis: RepBasis,
}

impl CliffordElement {
    /// Largest residual of `U·D_p·U† ∝ D_{F p}` over `p ∈ {(1,0), (0,1)}`.
    pub fn intertwining_residual(&self) -> f64 {
        let n = self.basis.dim();
        [DisplacementIndex::new(1, 0, n), DisplacementIndex::new(0, 1, n)]
            .iter()
            .map(|&p| {
                let lhs = self.unitary.conjugate(&displacement(p, self.basis).to_dense()).expect("square");
                let rhs = displacement(self.symplectic.apply(p), self.basis).to_dense();
                proportionality_residual(&lhs, &rhs).1
            })
            .fold(0.0, f64::max)
    }
}

/// Best unimodular `c` with `lhs ≈ c·rhs`, and the residual `max|lhs − c·rhs|`.
fn proportionality_residual(lhs: &DenseMatrix, rhs: &DenseMatrix) -> (Complex64, f64) {
    let overlap = rhs.inner(lhs);
    let c = if overlap.norm() > 0.0 { overlap / overlap.norm() } else { Complex64::new(1.0, 0.0) };
    (c, lhs.max_abs_diff(&rhs.scale(c)))
}

/// Global phase: the largest-modulus entry of column 0 (first one on ties)
/// becomes real positive.
fn canonicalize_global_phase(u: &DenseMatrix) -> DenseMatrix {
    let col: Vec<f64> = (0..u.rows()).map(|r| u[(r, 0)].norm()).collect();
    let max = col.iter().copied().fold(0.0, f64::max);
    let pivot = col.iter().position(|&x| x >= max - 1e-12).unwrap_or(0);
    let z = u[(pivot, 0)];
    if z.norm() == 0.0 {
        return u.clone();
    }
    u.scale(z.conj() / z.norm())
}

/// A unitary implementing the symplectic map `F` by conjugation.
///
/// Built in the standard basis: `|0⟩` goes to an eigenvector of
/// `B = D_{F(0,1)}` read off one cycle of `B`, and `|k⟩` to `A^k` of it with
/// `A = D_{F(1,0)}`. The phase left over when the `A`-chain wraps around is
/// spread evenly along the chain. The phase-permutation version is the
/// conjugate `V†·U·V` by [`change_of_basis`].
pub fn metaplectic_unitary(f: SymplecticMatrix, basis: RepBasis) -> Result<CliffordElement> {
    let dim = basis.dim();
    if f.modulus() != dim {
        return Err(Error::DimensionMismatch { left: f.modulus(), right: dim });
    }
    if f.det() != 1 {
        return Err(Error::NoIntertwiner("matrix is not symplectic".into()));
    }
    let std = RepBasis::standard(dim)?;
    let a = displacement(f.apply(DisplacementIndex::new(1, 0, dim)), std);
    let b = displacement(f.apply(DisplacementIndex::new(0, 1, dim)), std);

    let start = cycle_eigenvector(&b, 0, PhaseExp::ONE).expect("dimension >= 2");
    let mut chain: Vec<StateVector> = Vec::with_capacity(dim);
    let mut v = start;
    for _ in 0..dim {
        let next = a.apply(&v);
        chain.push(v);
        v = next;
    }
    // `v` is now A^N u₀ = λ u₀
    let lambda = crate::exact::dense::inner(&chain[0], &v);
    if (lambda.norm() - 1.0).abs() > INTERTWINING_TOL {
        return Err(Error::NoIntertwiner(format!("A-chain does not close (|λ| = {})", lambda.norm())));
    }
    let nu = Complex64::from_polar(1.0, -lambda.arg() / dim as f64);
    let mut scale = Complex64::new(1.0, 0.0);
    for col in chain.iter_mut() {
        for x in col.iter_mut() {
            *x *= scale;
        }
        scale *= nu;
    }
    let mut unitary = DenseMatrix::from_columns(&chain);
    if basis.kind() == BasisKind::PhasePermutation {
        let side = basis.side().expect("phase-permutation basis has a side");
        let v = change_of_basis(side)?;
        unitary = v.adjoint().matmul(&unitary)?.matmul(&v)?;
    }
    let element = CliffordElement {
        symplectic: f,
        shift: DisplacementIndex::zero(dim),
        unitary: canonicalize_global_phase(&unitary),
        basis,
    };
    let residual = element.intertwining_residual().max(element.unitary.unitarity_defect());
    if residual > INTERTWINING_TOL {
        return Err(Error::NoIntertwiner(format!("residual {residual:e}")));
    }
    Ok(element)
}

fn cube_roots() -> [Complex64; 3] {
    [0, 1, 2].map(|k| PhaseExp::new(k, 3).to_complex())
}

/// Orthogonal projector onto the `ζ^k` eigenspace of an order-3 unitary,
/// `ζ = e^{2πi/3}`: `(1 + ζ^{−k}U + ζ^{−2k}U²)/3`.
fn cube_root_projector(u: &DenseMatrix, k: usize) -> DenseMatrix {
    let zeta = cube_roots()[k % 3].conj();
    let u2 = u * u;
    let id = DenseMatrix::identity(u.rows());
    DenseMatrix::from_fn(u.rows(), u.cols(), |r, c| (id[(r, c)] + zeta * u[(r, c)] + zeta * zeta * u2[(r, c)]) / 3.0)
}

fn order3_defect(u: &DenseMatrix) -> f64 {
    u.pow(3).max_abs_diff(&DenseMatrix::identity(u.rows()))
}

/// Rescale a projectively order-3 unitary so that its cube is the identity,
/// picking the cube root that gives the largest eigenvalue-1 eigenspace.
pub fn fix_order3_phase(u: &DenseMatrix) -> Result<DenseMatrix> {
    let dim = u.rows();
    let cube = u.pow(3);
    let lambda = cube.trace() / dim as f64;
    let defect = cube.max_abs_diff(&DenseMatrix::identity(dim).scale(lambda));
    if defect > 1e-9 || (lambda.norm() - 1.0).abs() > 1e-9 {
        return Err(Error::NotOrderThree(defect));
    }
    let base = Complex64::from_polar(1.0, -lambda.arg() / 3.0);
    let mut best: Option<(usize, DenseMatrix)> = None;
    for root in cube_roots() {
        let candidate = u.scale(base * root);
        let ones = cube_root_projector(&candidate, 0).trace().re.round() as usize;
        if best.as_ref().is_none_or(|(m, _)| ones > *m) {
            best = Some((ones, candidate));
        }
    }
    let (_, fixed) = best.expect("three candidates");
    let residual = order3_defect(&fixed);
    if residual > 1e-9 {
        return Err(Error::NotOrderThree(residual));
    }
    Ok(fixed)
}

/// Multiplicities of the eigenvalues `(1, e^{2πi/3}, e^{4πi/3})`.
pub fn zauner_spectrum(u: &DenseMatrix) -> Result<[usize; 3]> {
    let defect = order3_defect(u);
    if defect > 1e-9 {
        return Err(Error::NotOrderThree(defect));
    }
    let mut out = [0; 3];
    for (k, slot) in out.iter_mut().enumerate() {
        let tr = cube_root_projector(u, k).trace();
        let rounded = tr.re.round();
        if (tr.re - rounded).abs() > 1e-6 || tr.im.abs() > 1e-6 || rounded < 0.0 {
            return Err(Error::EigenvalueNotCubeRoot(format!("projector trace {tr}")));
        }
        *slot = rounded as usize;
    }
    if out.iter().sum::<usize>() != u.rows() {
        return Err(Error::EigenvalueNotCubeRoot(format!("multiplicities {out:?} do not sum to {}", u.rows())));
    }
    Ok(out)
}

/// Orthonormal basis of the `e^{2πik/3}` eigenspace of an order-3 unitary.
pub fn cube_root_eigenspace(u: &DenseMatrix, k: usize) -> Result<Vec<StateVector>> {
    let expected = zauner_spectrum(u)?[k % 3];
    let proj = cube_root_projector(u, k);
    let columns: Vec<StateVector> = (0..proj.cols()).map(|c| proj.column(c)).collect();
    let basis = orthonormal_basis(&columns, 1e-6);
    if basis.len() != expected {
        return Err(Error::SubspaceDimension { expected, found: basis.len() });
    }
    Ok(basis)
}

/// The Zauner element: a lift `D_p·U_{F_Z}` of `F_Z`, phase-fixed so that
/// its cube is the identity.
///
/// When `3 | N` the lifts of `F_Z` are not all conjugate and their spectra
/// differ, so the shift `p` is chosen (first in lexicographic order) to
/// maximize the eigenvalue-1 multiplicity; otherwise `p = 0` already does.
pub fn zauner_element(basis: RepBasis) -> Result<CliffordElement> {
    let dim = basis.dim();
    let f = symplectic_order3_zauner(dim)?;
    let std = RepBasis::standard(dim)?;
    let base = metaplectic_unitary(f, std)?.unitary;
    let mut best: Option<(usize, DisplacementIndex, DenseMatrix)> = None;
    let shifts: Vec<DisplacementIndex> =
        if dim.is_multiple_of(3) { DisplacementIndex::all(dim).collect() } else { vec![DisplacementIndex::zero(dim)] };
    for p in shifts {
        let lifted = displacement(p, std).left_mul_dense(&base);
        let Ok(fixed) = fix_order3_phase(&lifted) else { continue };
        let ones = zauner_spectrum(&fixed)?[0];
        if best.as_ref().is_none_or(|(m, _, _)| ones > *m) {
            best = Some((ones, p, fixed));
        }
    }
    let (_, shift, mut unitary) = best.ok_or_else(|| Error::NoIntertwiner("no order-3 lift of F_Z".into()))?;
    if basis.kind() == BasisKind::PhasePermutation {
        let v = change_of_basis(basis.side().expect("square"))?;
        unitary = v.adjoint().matmul(&unitary)?.matmul(&v)?;
    }
    Ok(CliffordElement { symplectic: f, shift, unitary, basis })
}

/// The phase-fixed Zauner unitary in the requested basis.
pub fn zauner_unitary(basis: RepBasis) -> Result<DenseMatrix> {
    Ok(zauner_element(basis)?.unitary)
}

/// Exact monomial form of a dense unitary, with the default denominator
/// bound `24·N`.
pub fn verify_monomiality(u: &DenseMatrix, tol: f64) -> Result<MonomialMatrix> {
    if !u.is_square() {
        return Err(Error::DimensionMismatch { left: u.rows(), right: u.cols() });
    }
    let defect = u.unitarity_defect();
    if defect > tol {
        return Err(Error::Residual("unitary", defect));
    }
    extract_monomial(u, tol, default_max_denom(u.rows()))
}

/// Snap tolerance used during closure.
pub const CLOSURE_TOL: f64 = 1e-9;

/// The Clifford group modulo phases in the phase-permutation basis.
///
/// Breadth-first closure of `{U_S, U_T, X, Z}`. Each product is formed from
/// the exact element and the numerically constructed generator, then passed
/// back through [`extract_monomial`]. Returned sorted by canonical form.
pub fn clifford_group_closure(dim: usize, basis: RepBasis, max_elements: usize) -> Result<Vec<MonomialMatrix>> {
    clifford_closure_report(dim, basis, max_elements).map(|r| r.elements)
}

#[derive(Clone, Debug, PartialEq)]
pub struct ClosureReport {
    pub elements: Vec<MonomialMatrix>,
    /// Largest entrywise distance between a numerical product and its
    /// snapped monomial form.
    pub max_snap_error: f64,
    /// Number of products passed through the snap.
    pub products: usize,
}

pub fn clifford_closure_report(dim: usize, basis: RepBasis, max_elements: usize) -> Result<ClosureReport> {
    if basis.kind() != BasisKind::PhasePermutation || basis.dim() != dim {
        return Err(Error::InvalidParameter("closure requires the phase-permutation basis for N".into()));
    }
    let expected = sl2_order(dim) * (dim * dim) as u64;
    if expected > max_elements as u64 {
        return Err(Error::BudgetExceeded { budget: max_elements });
    }
    let generators = closure_generators(basis)?;
    let max_denom = default_max_denom(dim);

    let identity = MonomialMatrix::identity(dim);
    let mut seen: HashSet<MonomialMatrix> = HashSet::from([identity.clone()]);
    let mut frontier = vec![identity];
    let mut max_snap_error: f64 = 0.0;
    let mut products_seen = 0;
    while !frontier.is_empty() {
        let products: Vec<(MonomialMatrix, f64)> = frontier
            .par_iter()
            .flat_map_iter(|g| generators.iter().map(move |gen| (g, gen)))
            .map(|(g, gen)| {
                let dense = g.left_mul_dense(gen);
                let m = extract_monomial(&dense, CLOSURE_TOL, max_denom)?;
                let err = dense.max_abs_diff(&m.to_dense());
                Ok((m.canonical(), err))
            })
            .collect::<Result<_>>()?;
        products_seen += products.len();
        let mut next = Vec::new();
        for (m, err) in products {
            max_snap_error = max_snap_error.max(err);
            if seen.insert(m.clone()) {
                next.push(m);
                if seen.len() > max_elements {
                    return Err(Error::BudgetExceeded { budget: max_elements });
                }
            }
        }
        frontier = next;
    }
    let mut elements: Vec<MonomialMatrix> = seen.into_iter().collect();
    elements.sort();
    Ok(ClosureReport { elements, max_snap_error, products: products_seen })
}

/// Dense `U_S, U_T, X, Z` in the given basis.
pub fn closure_generators(basis: RepBasis) -> Result<Vec<DenseMatrix>> {
    let dim = basis.dim();
    let (x, z) = crate::heisenberg::generators(basis);
    Ok(vec![
        metaplectic_unitary(SymplecticMatrix::fourier(dim), basis)?.unitary,
        metaplectic_unitary(SymplecticMatrix::shear(dim), basis)?.unitary,
        x.to_dense(),
        z.to_dense(),
    ])
}

/// Exact check that `u` normalizes the Heisenberg group: `u·X·u†` and
/// `u·Z·u†` are phases times displacements. Returns the induced symplectic
/// matrix and the phases.
pub fn clifford_action(u: &MonomialMatrix, basis: RepBasis) -> Option<(SymplecticMatrix, [PhaseExp; 2])> {
    let dim = basis.dim();
    let (x, z) = crate::heisenberg::generators(basis);
    let uinv = u.inverse();
    let images = [&x, &z].map(|g| u.compose(g).and_then(|m| m.compose(&uinv)).expect("same dimension"));
    let mut found = [None, None];
    for p in DisplacementIndex::all(dim) {
        let d = displacement(p, basis);
        for (slot, img) in found.iter_mut().zip(&images) {
            if slot.is_none() && d.perm() == img.perm() {
                let ratio = img.phases()[0] / d.phases()[0];
                if d.scale(ratio) == *img {
                    *slot = Some((p, ratio));
                }
            }
        }
    }
    let [(px, cx), (pz, cz)] = [found[0]?, found[1]?];
    let f = SymplecticMatrix::new(px.i() as i64, pz.i() as i64, px.j() as i64, pz.j() as i64, dim).ok()?;
    Some((f, [cx, cz]))
}

/// Structure of a block-diagonalized Zauner unitary.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ZaunerBlockReport {
    pub blocks: usize,
    pub diagonal: Vec<PhaseExp>,
}

impl ZaunerBlockReport {
    /// Eigenvalue multiplicities implied by the block form.
    pub fn multiplicities(&self) -> [usize; 3] {
        let mut m = [self.blocks; 3];
        for d in &self.diagonal {
            m[(d.numerator() * 3 / d.denominator()) as usize] += 1;
        }
        m
    }
}

/// Monomial `P` with `P·U·P†` made of 3×3 cyclic blocks followed by a
/// diagonal part.
///
/// `U³ = 1` forces cycles of length 1 or 3; a 3-cycle `c₀ → c₁ → c₂` with
/// hop phases `φ₀, φ₁` is rephased to `|c₀⟩, φ₀|c₁⟩, φ₀φ₁|c₂⟩`.
pub fn zauner_block_diagonalize(u: &MonomialMatrix) -> Result<(MonomialMatrix, ZaunerBlockReport)> {
    if !u.pow(3).is_identity() {
        return Err(Error::NotExactOrderThree);
    }
    let cycles = u.cycles();
    let mut columns: Vec<(usize, PhaseExp)> = Vec::with_capacity(u.dim());
    let mut fixed = Vec::new();
    for cycle in &cycles {
        match cycle.len() {
            3 => {
                let mut phase = PhaseExp::ONE;
                for &c in cycle {
                    columns.push((c, phase));
                    phase = phase * u.phases()[c];
                }
            }
            1 => fixed.push(cycle[0]),
            _ => return Err(Error::NotExactOrderThree),
        }
    }
    let blocks = columns.len() / 3;
    let diagonal: Vec<PhaseExp> = fixed.iter().map(|&c| u.phases()[c]).collect();
    columns.extend(fixed.iter().map(|&c| (c, PhaseExp::ONE)));
    let (perm, phases): (Vec<usize>, Vec<PhaseExp>) = columns.into_iter().unzip();
    let q = MonomialMatrix::new(perm, phases)?;
    Ok((q.inverse(), ZaunerBlockReport { blocks, diagonal }))
}

/// The Zauner unitary in the phase-permutation basis as an exact monomial
/// matrix with `U³ = 1`.
pub fn zauner_monomial(dim: usize) -> Result<MonomialMatrix> {
    let basis = RepBasis::phase_permutation(dim)?;
    let u = zauner_unitary(basis)?;
    let m = verify_monomiality(&u, CLOSURE_TOL)?;
    if !m.pow(3).is_identity() {
        return Err(Error::NotExactOrderThree);
    }
    Ok(m)
}
