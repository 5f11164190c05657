//! JSON file format for fiducial vectors.

use std::path::Path;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exact::dense::norm;
use crate::heisenberg::{BasisKind, RepBasis};
use crate::sicsearch::Fiducial;

/// Norm tolerance applied when loading.
pub const LOAD_NORM_TOL: f64 = 1e-9;

/// `{"N": 4, "basis": "pp", "vector": [["re", "im"], …]}` with components
/// written to 17 significant digits.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FiducialFile {
    #[serde(rename = "N")]
    pub dim: usize,
    pub basis: String,
    pub vector: Vec<[String; 2]>,
}

fn fmt17(x: f64) -> String {
    format!("{x:.16e}")
}

fn parse(s: &str) -> Result<f64> {
    let x: f64 = s.trim().parse().map_err(|_| Error::Format(format!("not a number: {s:?}")))?;
    if !x.is_finite() {
        return Err(Error::Format(format!("non-finite component {s:?}")));
    }
    Ok(x)
}

impl FiducialFile {
    pub fn from_fiducial(f: &Fiducial) -> Self {
        FiducialFile {
            dim: f.dim(),
            basis: f.basis().tag().to_string(),
            vector: f.vector().iter().map(|z| [fmt17(z.re), fmt17(z.im)]).collect(),
        }
    }

    pub fn components(&self) -> Result<Vec<Complex64>> {
        self.vector.iter().map(|[re, im]| Ok(Complex64::new(parse(re)?, parse(im)?))).collect()
    }

    /// Checks the schema and the norm, then renormalizes to full precision.
    pub fn to_fiducial(&self) -> Result<Fiducial> {
        let kind = match self.basis.as_str() {
            "std" => BasisKind::Standard,
            "pp" => BasisKind::PhasePermutation,
            other => return Err(Error::Format(format!("basis must be \"std\" or \"pp\", got {other:?}"))),
        };
        let basis = RepBasis::new(kind, self.dim)?;
        if self.vector.len() != self.dim {
            return Err(Error::DimensionMismatch { left: self.vector.len(), right: self.dim });
        }
        let v = self.components()?;
        let n = norm(&v);
        if (n - 1.0).abs() > LOAD_NORM_TOL {
            return Err(Error::NotUnitNorm { norm: n });
        }
        Fiducial::normalized(basis, v)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("plain data serializes")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Format(e.to_string()))
    }

    pub fn load(path: &Path) -> Result<Fiducial> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::Format(format!("{}: {e}", path.display())))?;
        Self::from_json(&text)?.to_fiducial()
    }

    pub fn save(f: &Fiducial, path: &Path) -> Result<()> {
        std::fs::write(path, Self::from_fiducial(f).to_json())
            .map_err(|e| Error::Format(format!("{}: {e}", path.display())))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    proptest! {
        #[test]
        fn seventeen_digits_round_trip(x in proptest::num::f64::NORMAL | proptest::num::f64::SUBNORMAL | proptest::num::f64::ZERO) {
            prop_assert_eq!(parse(&fmt17(x)).unwrap().to_bits(), x.to_bits());
        }
    }

    #[test]
    fn file_round_trip() {
        let v = vec![Complex64::new(0.6, 0.0), Complex64::new(0.0, 0.8)];
        let f = Fiducial::new(RepBasis::standard(2).unwrap(), v).unwrap();
        let text = FiducialFile::from_fiducial(&f).to_json();
        assert!(text.contains("\"N\": 2") && text.contains("\"std\""));
        let back = FiducialFile::from_json(&text).unwrap().to_fiducial().unwrap();
        assert_eq!(back, f);
    }

    #[test]
    fn rejects_bad_files() {
        let bad_norm = r#"{"N":2,"basis":"std","vector":[["1","0"],["1","0"]]}"#;
        assert!(matches!(FiducialFile::from_json(bad_norm).unwrap().to_fiducial(), Err(Error::NotUnitNorm { .. })));
        let bad_basis = r#"{"N":2,"basis":"pp","vector":[["1","0"],["0","0"]]}"#;
        assert!(FiducialFile::from_json(bad_basis).unwrap().to_fiducial().is_err());
        let bad_len = r#"{"N":3,"basis":"std","vector":[["1","0"]]}"#;
        assert!(FiducialFile::from_json(bad_len).unwrap().to_fiducial().is_err());
        assert!(FiducialFile::from_json("{").is_err());
        let nan = r#"{"N":1,"basis":"std","vector":[["NaN","0"]]}"#;
        assert!(FiducialFile::from_json(nan).unwrap().to_fiducial().is_err());
    }
}
