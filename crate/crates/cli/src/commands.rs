use std::path::{Path, PathBuf};
use std::time::Instant;

use num_complex::Complex64;
use serde_json::{json, Value};

use phaseperm::clifford::{
    clifford_action, clifford_closure_report, closure_generators, cube_root_eigenspace, sl2_order, verify_monomiality,
    zauner_block_diagonalize, zauner_monomial, CLOSURE_TOL,
};
use phaseperm::exact::{DenseMatrix, MonomialMatrix};
use phaseperm::fiducial_file::FiducialFile;
use phaseperm::heisenberg::{generators, RepBasis};
use phaseperm::sicmoduli::{moduli_residuals_pp_generic, solve_moduli_n4};
use phaseperm::sicsearch::{
    frame_potential, frame_potential_bound, orbit, overlap_profile, search_fiducial, SearchConfig,
};
use phaseperm::theta::{induced_action, verify_laws, LatticeParams};
use phaseperm::{Error, Result};

use crate::report::{Report, Status};

fn complex_json(z: Complex64) -> Value {
    json!([z.re, z.im])
}

fn dense_json(m: &DenseMatrix) -> Value {
    Value::Array(
        (0..m.rows()).map(|r| Value::Array((0..m.cols()).map(|c| complex_json(m[(r, c)])).collect())).collect(),
    )
}

fn monomial_json(m: &MonomialMatrix) -> Value {
    json!({
        "perm": m.perm(),
        "phase_turns": m.phases().iter().map(|p| p.to_string()).collect::<Vec<_>>(),
    })
}

fn basis_from_tag(tag: &str, dim: usize) -> Result<RepBasis> {
    match tag {
        "std" => RepBasis::standard(dim),
        "pp" => RepBasis::phase_permutation(dim),
        other => Err(Error::InvalidParameter(format!("basis must be std or pp, got {other:?}"))),
    }
}

fn elapsed(label: &str, start: Instant) {
    eprintln!("{label} finished in {:.3}s", start.elapsed().as_secs_f64());
}

pub fn rep_show(dim: usize, basis: &str) -> Report {
    let params = json!({ "N": dim, "basis": basis });
    let b = match basis_from_tag(basis, dim) {
        Ok(b) => b,
        Err(e) => return Report::error("rep show", params, &e),
    };
    let (x, z) = generators(b);
    eprintln!("X = {x}\nZ = {z}");
    let results = json!({
        "X": monomial_json(&x),
        "Z": monomial_json(&z),
        "X_dense": dense_json(&x.to_dense()),
        "Z_dense": dense_json(&z.to_dense()),
    });
    Report::new("rep show", params, results, true)
}

pub fn clifford_verify(dim: usize, full_group: bool, budget: usize) -> Report {
    let params = json!({ "N": dim, "full_group": full_group, "budget": budget });
    match clifford_verify_inner(dim, full_group, budget) {
        Ok(r) => r,
        Err(e) => Report::error("clifford verify", params, &e),
    }
}

fn clifford_verify_inner(dim: usize, full_group: bool, budget: usize) -> Result<Report> {
    let params = json!({ "N": dim, "full_group": full_group, "budget": budget });
    let basis = RepBasis::phase_permutation(dim)?;
    let start = Instant::now();
    if full_group {
        let expected = sl2_order(dim) * (dim * dim) as u64;
        let report = clifford_closure_report(dim, basis, budget)?;
        let non_clifford: Vec<&MonomialMatrix> =
            report.elements.iter().filter(|m| clifford_action(m, basis).is_none()).collect();
        let count = report.elements.len() as u64;
        let pass = count == expected && non_clifford.is_empty() && report.max_snap_error <= CLOSURE_TOL;
        elapsed("closure", start);
        eprintln!("{count} projective elements (expected {expected}), max snap error {:.3e}", report.max_snap_error);
        let results = json!({
            "mode": "full_group",
            "elements": count,
            "expected": expected,
            "products_checked": report.products,
            "max_snap_error": report.max_snap_error,
            "snap_tolerance": CLOSURE_TOL,
            "non_clifford": non_clifford.iter().map(|m| monomial_json(m)).collect::<Vec<_>>(),
        });
        return Ok(Report::new("clifford verify", params, results, pass));
    }
    let names = ["U_S", "U_T", "X", "Z"];
    let mut gens: Vec<(&str, DenseMatrix)> = names.into_iter().zip(closure_generators(basis)?).collect();
    gens.push(("U_Zauner", zauner_monomial(dim)?.to_dense()));
    let mut entries = Vec::new();
    let mut pass = true;
    let mut max_err: f64 = 0.0;
    for (name, u) in &gens {
        match verify_monomiality(u, CLOSURE_TOL) {
            Ok(m) => {
                let err = u.max_abs_diff(&m.to_dense());
                let in_clifford = clifford_action(&m, basis).is_some();
                pass &= in_clifford;
                max_err = max_err.max(err);
                eprintln!("{name}: monomial, snap error {err:.3e}");
                entries.push(json!({ "name": name, "monomial": true, "clifford": in_clifford, "snap_error": err, "element": monomial_json(&m) }));
            }
            Err(e) => {
                pass = false;
                eprintln!("{name}: {e}");
                entries
                    .push(json!({ "name": name, "monomial": false, "error": e.to_string(), "element": dense_json(u) }));
            }
        }
    }
    elapsed("generator check", start);
    let results = json!({ "mode": "generators", "generators": entries, "max_snap_error": max_err, "snap_tolerance": CLOSURE_TOL });
    Ok(Report::new("clifford verify", params, results, pass))
}

pub fn zauner(dim: usize) -> Report {
    let params = json!({ "N": dim });
    let run = || -> Result<Report> {
        let u = zauner_monomial(dim)?;
        let (_, blocks) = zauner_block_diagonalize(&u)?;
        let invariant = cube_root_eigenspace(&u.to_dense(), 0)?.len();
        let expected_invariant = dim / 3 + 1;
        let expected_diagonals = if dim.is_multiple_of(3) { 3 } else { 1 };
        let spectrum = blocks.multiplicities();
        eprintln!(
            "blocks {}, diagonal elements {}, spectrum {:?}, invariant subspace dimension {invariant}",
            blocks.blocks,
            blocks.diagonal.len(),
            spectrum
        );
        let pass = invariant == expected_invariant && blocks.diagonal.len() == expected_diagonals;
        let results = json!({
            "spectrum": spectrum,
            "blocks": blocks.blocks,
            "diagonals": blocks.diagonal.len(),
            "diagonal_phase_turns": blocks.diagonal.iter().map(|p| p.to_string()).collect::<Vec<_>>(),
            "invariant_dim": invariant,
            "expected_invariant_dim": expected_invariant,
            "expected_diagonals": expected_diagonals,
            "unitary": monomial_json(&u),
        });
        Ok(Report::new("zauner", params.clone(), results, pass))
    };
    run().unwrap_or_else(|e| Report::error("zauner", json!({ "N": dim }), &e))
}

pub fn sic_solve_n4() -> Report {
    let sol = solve_moduli_n4();
    let labels = ["p00", "p01", "p10", "p11"];
    let moduli: serde_json::Map<String, Value> = labels
        .iter()
        .zip(&sol.moduli)
        .map(|(l, p)| (l.to_string(), json!({ "symbolic": p.to_string(), "decimal": p.to_f64() })))
        .collect();
    let residuals = moduli_residuals_pp_generic(&sol.moduli, 2).expect("n = 2");
    let exact_zero = residuals.iter().all(|r| r.is_zero());
    let branches: Vec<Value> = sol
        .branches
        .iter()
        .map(|b| {
            json!({
                "signs": b.signs,
                "solution": b.solution.iter().map(|p| p.to_string()).collect::<Vec<_>>(),
                "nonnegative": b.nonnegative,
                "ordered": b.ordered,
                "admissible": b.admissible(),
            })
        })
        .collect();
    for (l, p) in labels.iter().zip(&sol.moduli) {
        eprintln!("{l} = {p} ≈ {:.10}", p.to_f64());
    }
    let results = json!({ "moduli": moduli, "residuals_exact_zero": exact_zero, "branches": branches });
    Report::new("sic solve-n4", json!({}), results, exact_zero)
}

pub struct SearchArgs {
    pub dim: usize,
    pub seed: u64,
    pub restarts: usize,
    pub tol: f64,
    pub zauner: bool,
    pub basis: String,
    pub max_iters: usize,
    pub out: Option<PathBuf>,
}

pub fn sic_search(a: &SearchArgs) -> Report {
    let params = json!({
        "N": a.dim, "seed": a.seed, "restarts": a.restarts, "tol": a.tol, "zauner": a.zauner,
        "basis": if a.zauner { "pp" } else { a.basis.as_str() }, "max_iters": a.max_iters,
        "out": a.out.as_ref().map(|p| p.display().to_string()),
    });
    let run = || -> Result<Report> {
        let mut cfg =
            if a.zauner { SearchConfig::zauner(a.dim)? } else { SearchConfig::new(basis_from_tag(&a.basis, a.dim)?) };
        cfg.seed = a.seed;
        cfg.restarts = a.restarts;
        cfg.tol = a.tol;
        cfg.max_iters = a.max_iters;
        let start = Instant::now();
        let out = search_fiducial(&cfg)?;
        elapsed("search", start);
        let bound = frame_potential_bound(a.dim);
        let deviation = orbit(&out.fiducial).max_overlap_deviation();
        let file = FiducialFile::from_fiducial(&out.fiducial);
        if let Some(path) = &a.out {
            FiducialFile::save(&out.fiducial, path)?;
            eprintln!("fiducial written to {}", path.display());
        }
        eprintln!(
            "converged {} after {} restarts, frame potential {:.15} (bound {:.15}), max overlap deviation {deviation:.3e}",
            out.converged, out.restarts_used, out.attained, bound
        );
        let results = json!({
            "converged": out.converged,
            "attained": out.attained,
            "target": bound,
            "gap": out.attained - bound,
            "restarts_used": out.restarts_used,
            "max_overlap_deviation": deviation,
            "fiducial": serde_json::to_value(&file).expect("plain data"),
        });
        let mut report = Report::new("sic search", params.clone(), results, out.converged);
        if !out.converged {
            report.status = Status::NotConverged;
        }
        Ok(report)
    };
    run().unwrap_or_else(|e| Report::error("sic search", params.clone(), &e))
}

pub fn sic_check(file: &Path, tol: f64) -> Report {
    let params = json!({ "file": file.display().to_string(), "tol": tol });
    let run = || -> Result<Report> {
        let f = FiducialFile::load(file)?;
        let dim = f.dim();
        let target = 1.0 / (dim as f64 + 1.0);
        let profile = overlap_profile(&f);
        let profile_dev = profile[1..].iter().map(|x| (x - target).abs()).fold(0.0, f64::max);
        let orb = orbit(&f);
        let deviation = orb.max_overlap_deviation();
        let gap = frame_potential(&f) - frame_potential_bound(dim);
        eprintln!("N = {dim} ({}), max overlap deviation {deviation:.3e}", f.basis().tag());
        let results = json!({
            "N": dim,
            "basis": f.basis().tag(),
            "max_overlap_deviation": deviation,
            "max_profile_deviation": profile_dev,
            "frame_potential_gap": gap,
            "coincidences": orb.coincidences.len(),
        });
        Ok(Report::new("sic check", params.clone(), results, deviation < tol))
    };
    run().unwrap_or_else(|e| Report::error("sic check", params.clone(), &e))
}

pub fn theta(tau: &str, n: i64, trunc: usize) -> Report {
    let params = json!({ "tau": tau, "n": n, "trunc": trunc });
    let run = || -> Result<Report> {
        let tau: Complex64 = tau
            .trim()
            .parse()
            .map_err(|_| Error::InvalidParameter(format!("cannot parse tau {tau:?} (expected a+bi)")))?;
        if n < 1 {
            return Err(Error::InvalidParameter("n must be positive".into()));
        }
        let lp = LatticeParams::new(tau, trunc)?;
        let laws = verify_laws(n, &lp).map_err(|e| match e {
            Error::TailBound { .. } => {
                eprintln!("tail bound too large: raise --trunc or use a tau with larger imaginary part");
                e
            }
            other => other,
        })?;
        let action = induced_action(n, &lp)?;
        let omega = Complex64::from_polar(1.0, 2.0 * std::f64::consts::PI / (n * n) as f64);
        let commutation_error = (action.commutator - omega).norm().max(action.defect);
        let pass = laws.max_residual() < 1e-10 && laws.max_tail() < 1e-10 && commutation_error < 1e-9;
        eprintln!(
            "{} characteristics: action residual {:.3e}, quasi-periodicity residual {:.3e}, tail bound {:.3e}",
            laws.characteristics,
            laws.action.max_residual,
            laws.quasi_periodicity.max_residual,
            laws.max_tail()
        );
        let results = json!({
            "characteristics": laws.characteristics,
            "action_max_residual": laws.action.max_residual,
            "quasi_periodicity_max_residual": laws.quasi_periodicity.max_residual,
            "max_residual": laws.max_residual(),
            "max_tail_bound": laws.max_tail(),
            "induced_commutator": complex_json(action.commutator),
            "commutation_error": commutation_error,
            "induced_s": monomial_json(&action.s),
            "induced_t": monomial_json(&action.t),
        });
        Ok(Report::new("theta", params.clone(), results, pass))
    };
    run().unwrap_or_else(|e| Report::error("theta", params.clone(), &e))
}
