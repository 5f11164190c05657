//! Numerical SIC fiducial search by frame-potential minimization on the unit
//! sphere, optionally inside the Zauner-invariant subspace, plus orbit and
//! multiplet diagnostics.

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::clifford::{cube_root_eigenspace, zauner_monomial};
use crate::error::{Error, Result};
use crate::exact::dense::{inner, norm, normalize};
use crate::exact::{MonomialMatrix, StateVector};
use crate::heisenberg::{
    all_displacements, change_of_basis, perfect_square_root, schmidt_spectrum, BasisKind, DisplacementIndex, RepBasis,
    SchmidtSpectrum,
};

/// Restarts evaluated together before checking for convergence. Fixed so
/// that results do not depend on the thread count.
const RESTART_CHUNK: usize = 8;

/// `(N − 1)/(N + 1)`, the minimum of the frame potential on unit vectors.
pub fn frame_potential_bound(dim: usize) -> f64 {
    (dim as f64 - 1.0) / (dim as f64 + 1.0)
}

/// A unit vector together with the representation it is written in.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Fiducial {
    basis: RepBasis,
    vector: StateVector,
}

impl Fiducial {
    pub fn new(basis: RepBasis, vector: StateVector) -> Result<Self> {
        if vector.len() != basis.dim() {
            return Err(Error::DimensionMismatch { left: vector.len(), right: basis.dim() });
        }
        let n = norm(&vector);
        if (n - 1.0).abs() > 1e-12 {
            return Err(Error::NotUnitNorm { norm: n });
        }
        Ok(Fiducial { basis, vector })
    }

    pub fn normalized(basis: RepBasis, mut vector: StateVector) -> Result<Self> {
        let n = norm(&vector);
        if n == 0.0 || !n.is_finite() {
            return Err(Error::NotUnitNorm { norm: n });
        }
        normalize(&mut vector);
        Self::new(basis, vector)
    }

    pub fn basis(&self) -> RepBasis {
        self.basis
    }

    pub fn dim(&self) -> usize {
        self.basis.dim()
    }

    pub fn vector(&self) -> &[Complex64] {
        &self.vector
    }

    /// The same state written in the other representation.
    pub fn in_basis(&self, kind: BasisKind) -> Result<Fiducial> {
        if kind == self.basis.kind() {
            return Ok(self.clone());
        }
        let n = perfect_square_root(self.dim()).ok_or(Error::NotPerfectSquare { dim: self.dim() })?;
        let v = change_of_basis(n)?;
        let target = RepBasis::new(kind, self.dim())?;
        let vector = match kind {
            BasisKind::Standard => v.apply(&self.vector),
            BasisKind::PhasePermutation => v.adjoint().apply(&self.vector),
        };
        Fiducial::normalized(target, vector)
    }

    /// `v ↦ e^{iθ} v`.
    pub fn rephased(&self, theta: f64) -> Fiducial {
        let ph = Complex64::from_polar(1.0, theta);
        Fiducial { basis: self.basis, vector: self.vector.iter().map(|z| z * ph).collect() }
    }
}

/// Displacement operators in a flat form suited to repeated application.
#[derive(Clone, Debug)]
pub struct DisplacementTable {
    dim: usize,
    targets: Vec<Vec<usize>>,
    phases: Vec<Vec<Complex64>>,
}

impl DisplacementTable {
    pub fn new(basis: RepBasis) -> Self {
        let ops = all_displacements(basis);
        Self::from_ops(basis.dim(), ops.into_iter().map(|(_, m)| m))
    }

    fn from_ops(dim: usize, ops: impl Iterator<Item = MonomialMatrix>) -> Self {
        let (targets, phases) =
            ops.map(|m| (m.perm().to_vec(), m.phases().iter().map(|p| p.to_complex()).collect())).unzip();
        DisplacementTable { dim, targets, phases }
    }

    pub fn len(&self) -> usize {
        self.targets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.targets.is_empty()
    }

    /// `D_p v` for the operator at flat label `k`.
    pub fn apply(&self, k: usize, v: &[Complex64]) -> StateVector {
        let mut out = vec![Complex64::new(0.0, 0.0); self.dim];
        for (c, (&t, ph)) in self.targets[k].iter().zip(&self.phases[k]).enumerate() {
            out[t] = ph * v[c];
        }
        out
    }

    /// `⟨v|D_p|v⟩`.
    pub fn expectation(&self, k: usize, v: &[Complex64]) -> Complex64 {
        self.targets[k].iter().zip(&self.phases[k]).enumerate().map(|(c, (&t, ph))| v[t].conj() * ph * v[c]).sum()
    }

    /// Frame potential `Σ_{p≠0} |⟨v|D_p|v⟩|⁴` and its Euclidean gradient,
    /// written as the complex vector `G` with `df = Re⟨G, dv⟩`.
    pub fn potential_and_gradient(&self, v: &[Complex64]) -> (f64, StateVector) {
        let mut value = 0.0;
        let mut grad = vec![Complex64::new(0.0, 0.0); self.dim];
        for k in 1..self.len() {
            let c = self.expectation(k, v);
            let m = c.norm_sqr();
            value += m * m;
            // 2·∂/∂v̄ of (c c̄)²  =  4|c|² (c̄ D v + c D† v)
            let w = 4.0 * m;
            for (col, (&t, ph)) in self.targets[k].iter().zip(&self.phases[k]).enumerate() {
                grad[t] += w * c.conj() * ph * v[col];
                grad[col] += w * c * ph.conj() * v[t];
            }
        }
        (value, grad)
    }

    /// `h(v) = Σ_{p≠0} (|⟨v|D_p|v⟩|² − 1/(N+1))²` and its gradient. On unit
    /// vectors `h` equals the frame potential minus its lower bound, but it
    /// is evaluated without cancellation near a minimum.
    pub fn residual_and_gradient(&self, v: &[Complex64]) -> (f64, StateVector) {
        let target = 1.0 / (self.dim as f64 + 1.0);
        let mut value = 0.0;
        let mut grad = vec![Complex64::new(0.0, 0.0); self.dim];
        for k in 1..self.len() {
            let c = self.expectation(k, v);
            let r = c.norm_sqr() - target;
            value += r * r;
            let w = 4.0 * r;
            for (col, (&t, ph)) in self.targets[k].iter().zip(&self.phases[k]).enumerate() {
                grad[t] += w * c.conj() * ph * v[col];
                grad[col] += w * c * ph.conj() * v[t];
            }
        }
        (value, grad)
    }

    pub fn potential(&self, v: &[Complex64]) -> f64 {
        (1..self.len()).map(|k| self.expectation(k, v).norm_sqr().powi(2)).sum()
    }
}

/// `|⟨v|D_p|v⟩|²` for every label, in lexicographic `(i, j)` order.
pub fn overlap_profile(f: &Fiducial) -> Vec<f64> {
    let table = DisplacementTable::new(f.basis());
    (0..table.len()).map(|k| table.expectation(k, f.vector()).norm_sqr()).collect()
}

pub fn frame_potential(f: &Fiducial) -> f64 {
    DisplacementTable::new(f.basis()).potential(f.vector())
}

/// Orthonormal basis of the eigenvalue-1 space of the Zauner unitary in the
/// phase-permutation basis.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ZaunerSubspace {
    dim: usize,
    basis: Vec<StateVector>,
}

impl ZaunerSubspace {
    pub fn new(dim: usize, basis: Vec<StateVector>) -> Result<Self> {
        for (a, u) in basis.iter().enumerate() {
            if u.len() != dim {
                return Err(Error::DimensionMismatch { left: u.len(), right: dim });
            }
            for (b, w) in basis.iter().enumerate() {
                let target = if a == b { 1.0 } else { 0.0 };
                if (inner(u, w) - target).norm() > 1e-12 {
                    return Err(Error::InvalidParameter("subspace basis is not orthonormal".into()));
                }
            }
        }
        Ok(ZaunerSubspace { dim, basis })
    }

    /// Ambient dimension `N`.
    pub fn ambient_dim(&self) -> usize {
        self.dim
    }

    /// Number of free complex parameters.
    pub fn param_dim(&self) -> usize {
        self.basis.len()
    }

    pub fn basis(&self) -> &[StateVector] {
        &self.basis
    }

    pub fn embed(&self, params: &[Complex64]) -> StateVector {
        let mut out = vec![Complex64::new(0.0, 0.0); self.dim];
        for (c, b) in params.iter().zip(&self.basis) {
            for (o, x) in out.iter_mut().zip(b) {
                *o += c * x;
            }
        }
        out
    }

    /// `B† w`.
    pub fn project(&self, w: &[Complex64]) -> StateVector {
        self.basis.iter().map(|b| inner(b, w)).collect()
    }

    /// Distance of `v` from the subspace.
    pub fn distance(&self, v: &[Complex64]) -> f64 {
        let back = self.embed(&self.project(v));
        v.iter().zip(&back).map(|(a, b)| (a - b).norm_sqr()).sum::<f64>().sqrt()
    }
}

/// Eigenvalue-1 eigenspace of the phase-fixed Zauner unitary for `N = n²`,
/// which must have dimension `l + 1` for `N = 3l` or `3l + 1`.
pub fn zauner_invariant_parametrization(dim: usize) -> Result<ZaunerSubspace> {
    RepBasis::phase_permutation(dim)?;
    let u = zauner_monomial(dim)?.to_dense();
    let basis = cube_root_eigenspace(&u, 0)?;
    let expected = dim / 3 + 1;
    if basis.len() != expected {
        return Err(Error::SubspaceDimension { expected, found: basis.len() });
    }
    ZaunerSubspace::new(dim, basis)
}

#[derive(Clone, Debug)]
pub struct SearchConfig {
    pub basis: RepBasis,
    pub restarts: usize,
    pub max_iters: usize,
    pub tol: f64,
    pub seed: u64,
    pub subspace: Option<ZaunerSubspace>,
}

impl SearchConfig {
    pub fn new(basis: RepBasis) -> Self {
        SearchConfig { basis, restarts: 32, max_iters: 20_000, tol: 1e-10, seed: 0, subspace: None }
    }

    /// Search inside the Zauner subspace in the phase-permutation basis.
    pub fn zauner(dim: usize) -> Result<Self> {
        let basis = RepBasis::phase_permutation(dim)?;
        Ok(SearchConfig { subspace: Some(zauner_invariant_parametrization(dim)?), ..Self::new(basis) })
    }

    pub fn validate(&self) -> Result<()> {
        if self.tol.is_nan() || self.tol <= 0.0 {
            return Err(Error::InvalidParameter("tol must be positive".into()));
        }
        if self.restarts == 0 || self.max_iters == 0 {
            return Err(Error::InvalidParameter("restarts and max_iters must be positive".into()));
        }
        if let Some(s) = &self.subspace {
            if s.ambient_dim() != self.basis.dim() {
                return Err(Error::DimensionMismatch { left: s.ambient_dim(), right: self.basis.dim() });
            }
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SearchOutcome {
    pub fiducial: Fiducial,
    /// Frame potential of the returned fiducial.
    pub attained: f64,
    pub restarts_used: usize,
    pub converged: bool,
}

struct Objective<'a> {
    table: &'a DisplacementTable,
    subspace: Option<&'a ZaunerSubspace>,
}

impl Objective<'_> {
    fn ambient(&self, x: &[Complex64]) -> StateVector {
        match self.subspace {
            Some(s) => s.embed(x),
            None => x.to_vec(),
        }
    }

    fn eval(&self, x: &[Complex64]) -> (f64, StateVector) {
        let v = self.ambient(x);
        let (f, g) = self.table.residual_and_gradient(&v);
        match self.subspace {
            Some(s) => (f, s.project(&g)),
            None => (f, g),
        }
    }
}

fn re_inner(a: &[Complex64], b: &[Complex64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x.re * y.re + x.im * y.im).sum()
}

/// Riemannian gradient descent on the unit sphere with Barzilai-Borwein step
/// proposals and Armijo backtracking. Returns the final point and value.
fn descend(obj: &Objective<'_>, mut x: StateVector, max_iters: usize) -> (StateVector, f64) {
    normalize(&mut x);
    let (mut f, g) = obj.eval(&x);
    let tangent = |x: &[Complex64], g: &[Complex64]| -> StateVector {
        let radial = re_inner(x, g);
        g.iter().zip(x).map(|(gi, xi)| gi - radial * xi).collect()
    };
    let mut rg = tangent(&x, &g);
    let mut step = 0.1;
    for _ in 0..max_iters {
        let gn2 = re_inner(&rg, &rg);
        if gn2.sqrt() < 1e-15 || f < 1e-30 {
            break;
        }
        let mut accepted = None;
        while step > 1e-16 {
            let mut y: StateVector = x.iter().zip(&rg).map(|(a, b)| a - step * b).collect();
            normalize(&mut y);
            let (fy, gy) = obj.eval(&y);
            if fy <= f - 1e-4 * step * gn2 {
                accepted = Some((y, fy, gy));
                break;
            }
            step *= 0.5;
        }
        let Some((y, fy, gy)) = accepted else { break };
        let rg_new = tangent(&y, &gy);
        let s: StateVector = y.iter().zip(&x).map(|(a, b)| a - b).collect();
        let dg: StateVector = rg_new.iter().zip(&rg).map(|(a, b)| a - b).collect();
        let curvature = re_inner(&s, &dg);
        step = if curvature > 0.0 { (re_inner(&s, &s) / curvature).clamp(1e-6, 1e3) } else { step * 2.0 };
        x = y;
        f = fy;
        rg = rg_new;
    }
    (x, f)
}

fn random_start(len: usize, seed: u64) -> StateVector {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut v: StateVector =
        (0..len).map(|_| Complex64::new(StandardNormal.sample(&mut rng), StandardNormal.sample(&mut rng))).collect();
    normalize(&mut v);
    v
}

/// Best fiducial over seeded restarts; restart `k` is seeded with
/// `seed + k`. Restarts run in fixed-size chunks and the search stops after
/// the first chunk containing a converged run, returning the lowest-index
/// converged restart.
pub fn search_fiducial(cfg: &SearchConfig) -> Result<SearchOutcome> {
    cfg.validate()?;
    let dim = cfg.basis.dim();
    let table = DisplacementTable::new(cfg.basis);
    let obj = Objective { table: &table, subspace: cfg.subspace.as_ref() };
    let param_len = cfg.subspace.as_ref().map_or(dim, ZaunerSubspace::param_dim);

    let mut best: Option<(usize, StateVector, f64)> = None;
    for chunk_start in (0..cfg.restarts).step_by(RESTART_CHUNK) {
        let chunk_end = (chunk_start + RESTART_CHUNK).min(cfg.restarts);
        let runs: Vec<(usize, StateVector, f64)> = (chunk_start..chunk_end)
            .into_par_iter()
            .map(|k| {
                let start = random_start(param_len, cfg.seed.wrapping_add(k as u64));
                let (x, f) = descend(&obj, start, cfg.max_iters);
                (k, x, f)
            })
            .collect();
        for run in runs {
            if best.as_ref().is_none_or(|b| run.2 < b.2) {
                best = Some(run.clone());
            }
            if run.2 <= cfg.tol {
                return finish(&obj, cfg.basis, run, true);
            }
        }
    }
    let (_, x, f) = best.expect("at least one restart");
    finish(&obj, cfg.basis, (cfg.restarts - 1, x, f), false)
}

fn finish(
    obj: &Objective<'_>,
    basis: RepBasis,
    (k, x, _): (usize, StateVector, f64),
    converged: bool,
) -> Result<SearchOutcome> {
    let fiducial = Fiducial::normalized(basis, obj.ambient(&x))?;
    let attained = obj.table.potential(fiducial.vector());
    Ok(SearchOutcome { fiducial, attained, restarts_used: k + 1, converged })
}

/// The `N²` vectors `D_p v`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Orbit {
    pub labels: Vec<DisplacementIndex>,
    pub vectors: Vec<StateVector>,
    /// Pairs `I < J` with `|⟨ψ_I|ψ_J⟩|² > 1 − 1e-9`.
    pub coincidences: Vec<(usize, usize)>,
}

impl Orbit {
    /// `max_{I≠J} | |⟨ψ_I|ψ_J⟩|² − 1/(N+1) |`.
    pub fn max_overlap_deviation(&self) -> f64 {
        let target = 1.0 / (self.vectors[0].len() as f64 + 1.0);
        let mut worst: f64 = 0.0;
        for (a, u) in self.vectors.iter().enumerate() {
            for w in &self.vectors[a + 1..] {
                worst = worst.max((inner(u, w).norm_sqr() - target).abs());
            }
        }
        worst
    }
}

pub fn orbit(f: &Fiducial) -> Orbit {
    let table = DisplacementTable::new(f.basis());
    let labels: Vec<DisplacementIndex> = DisplacementIndex::all(f.dim()).collect();
    let vectors: Vec<StateVector> = (0..table.len()).map(|k| table.apply(k, f.vector())).collect();
    let mut coincidences = Vec::new();
    for (a, u) in vectors.iter().enumerate() {
        for (b, w) in vectors.iter().enumerate().skip(a + 1) {
            if inner(u, w).norm_sqr() > 1.0 - 1e-9 {
                coincidences.push((a, b));
            }
        }
    }
    Orbit { labels, vectors, coincidences }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CosetSpectrum {
    /// `m` in `X^m·⟨Z, X^n⟩`.
    pub coset: usize,
    pub spectrum: SchmidtSpectrum,
    /// Largest deviation of any member's spectrum from `spectrum`.
    pub spread: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MultipletReport {
    pub cosets: Vec<CosetSpectrum>,
    /// Number of distinct spectra across cosets (tolerance 1e-8).
    pub distinct: usize,
    /// Concurrences of all orbit vectors, for `n = 2`.
    pub concurrences: Option<Vec<f64>>,
}

/// Tolerance for spectra being equal within and across cosets.
pub const MULTIPLET_TOL: f64 = 1e-8;

/// Schmidt spectra of the orbit grouped by the cosets `X^m·⟨Z, X^n⟩`.
pub fn multiplet_report(f: &Fiducial) -> Result<MultipletReport> {
    let n = f.basis().side().ok_or(Error::InvalidParameter("multiplets need the phase-permutation basis".into()))?;
    let orb = orbit(f);
    let spectra: Vec<SchmidtSpectrum> = orb.vectors.iter().map(|v| schmidt_spectrum(v, n)).collect::<Result<_>>()?;
    let mut cosets: Vec<CosetSpectrum> = Vec::with_capacity(n);
    for m in 0..n {
        let members: Vec<&SchmidtSpectrum> =
            orb.labels.iter().zip(&spectra).filter(|(p, _)| p.i() % n == m).map(|(_, s)| s).collect();
        let head = members[0].clone();
        let spread = members.iter().map(|s| s.max_abs_diff(&head)).fold(0.0, f64::max);
        if spread > MULTIPLET_TOL {
            return Err(Error::MultipletInvariance(spread));
        }
        cosets.push(CosetSpectrum { coset: m, spectrum: head, spread });
    }
    let mut reps: Vec<&SchmidtSpectrum> = Vec::new();
    for c in &cosets {
        if !reps.iter().any(|r| r.max_abs_diff(&c.spectrum) <= MULTIPLET_TOL) {
            reps.push(&c.spectrum);
        }
    }
    let distinct = reps.len();
    let concurrences = (n == 2).then(|| spectra.iter().map(|s| s.concurrence.expect("n = 2")).collect());
    Ok(MultipletReport { cosets, distinct, concurrences })
}
