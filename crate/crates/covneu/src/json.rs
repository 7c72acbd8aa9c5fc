//! JSON file formats used by the CLI: matrices, groups, POVMs and synthesis
//! results. Complex numbers are `[re, im]` pairs; matrices are row-major.

use std::sync::Arc;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::families::{self, Family};
use crate::groups::{generate_group, MatrixGroup, Representation};
use crate::linalg::{ComplexMatrix, C64};
use crate::povm::{orbit_povm, RankOnePovm};
use crate::repdec::Decomposition;
use crate::synth::{ChoicesRecord, SynthesisResult, VerificationReport};
use crate::Tolerances;

/// `{"rows": r, "cols": c, "data": [[re, im], ...]}` in row-major order.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MatrixJson {
    pub rows: usize,
    pub cols: usize,
    pub data: Vec<[f64; 2]>,
}

impl MatrixJson {
    pub fn from_matrix(m: &ComplexMatrix) -> MatrixJson {
        MatrixJson {
            rows: m.rows(),
            cols: m.cols(),
            data: m.entries().iter().map(|z| [z.re, z.im]).collect(),
        }
    }

    pub fn to_matrix(&self) -> Result<ComplexMatrix> {
        if self.data.len() != self.rows * self.cols {
            return Err(Error::Parse(format!(
                "matrix data has {} entries, expected {}",
                self.data.len(),
                self.rows * self.cols
            )));
        }
        Ok(ComplexMatrix::from_fn(self.rows, self.cols, |i, j| {
            let [re, im] = self.data[i * self.cols + j];
            Complex64::new(re, im)
        }))
    }
}

pub fn vector_to_json(v: &[C64]) -> Vec<[f64; 2]> {
    v.iter().map(|z| [z.re, z.im]).collect()
}

pub fn vector_from_json(v: &[[f64; 2]]) -> Vec<C64> {
    v.iter().map(|&[re, im]| Complex64::new(re, im)).collect()
}

/// Group input: explicit generators or a named family.
///
/// `{"dim": d, "generators": [matrix, ...], "phase_quotient": bool}` or
/// `{"family": "cyclic"|"dihedral"|"weyl-heisenberg", "param": n}`.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GroupJson {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub dim: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub generators: Option<Vec<MatrixJson>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub phase_quotient: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub family: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub param: Option<usize>,
}

/// Parse a family name; `povm_dim` supplies the Hilbert space dimension the
/// cyclic family needs.
pub fn family_from_name(name: &str, param: usize, povm_dim: usize) -> Result<Family> {
    match name {
        "cyclic" => Ok(Family::Cyclic {
            n: param,
            d: povm_dim,
        }),
        "dihedral" => Ok(Family::Dihedral { m: param }),
        "weyl-heisenberg" | "wh" => Ok(Family::WeylHeisenberg { m: param }),
        other => Err(Error::UnsupportedParameter(format!(
            "unknown family '{other}' (expected cyclic, dihedral or weyl-heisenberg)"
        ))),
    }
}

/// Build the symmetry group and representation a family provides.
pub fn family_group_rep(
    family: Family,
    tol: &Tolerances,
) -> Result<(Arc<MatrixGroup>, Representation)> {
    match family {
        Family::Cyclic { n, d } => families::cyclic_group_rep(n, d, tol),
        Family::Dihedral { m } => families::dihedral_group_rep(m, tol),
        Family::WeylHeisenberg { m } => families::wh_group_rep(m, tol),
    }
}

impl GroupJson {
    /// Materialize the group and its natural representation. `povm_dim`
    /// resolves the dimension for family groups.
    pub fn build(
        &self,
        povm_dim: usize,
        tol: &Tolerances,
    ) -> Result<(Arc<MatrixGroup>, Representation)> {
        match (&self.generators, &self.family) {
            (Some(gens), None) => {
                let dim = self
                    .dim
                    .ok_or_else(|| Error::Parse("group with generators needs 'dim'".into()))?;
                let mats: Vec<ComplexMatrix> =
                    gens.iter().map(|g| g.to_matrix()).collect::<Result<_>>()?;
                for m in &mats {
                    if m.rows() != dim {
                        return Err(Error::Parse(format!(
                            "generator is {}x{}, header says dim={dim}",
                            m.rows(),
                            m.cols()
                        )));
                    }
                }
                let group = Arc::new(generate_group(
                    &mats,
                    4096,
                    self.phase_quotient.unwrap_or(false),
                    tol,
                )?);
                let rep = Representation::natural(Arc::clone(&group));
                Ok((group, rep))
            }
            (None, Some(name)) => {
                let param = self
                    .param
                    .ok_or_else(|| Error::Parse("family group needs 'param'".into()))?;
                let family = family_from_name(name, param, povm_dim)?;
                family_group_rep(family, tol)
            }
            _ => Err(Error::Parse(
                "group JSON needs either generators or a family".into(),
            )),
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OrbitJson {
    pub group: GroupJson,
    pub initial: Vec<[f64; 2]>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub phase_quotient: Option<bool>,
}

/// POVM input: explicit vectors or a group orbit.
///
/// `{"dim": d, "vectors": [[[re,im], ...], ...]}` or
/// `{"orbit": {"group": ..., "initial": [[re,im], ...]}}`.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PovmJson {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub dim: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub vectors: Option<Vec<Vec<[f64; 2]>>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub orbit: Option<OrbitJson>,
}

impl PovmJson {
    pub fn from_povm(povm: &RankOnePovm) -> PovmJson {
        PovmJson {
            dim: Some(povm.dim()),
            vectors: Some(povm.vectors().iter().map(|v| vector_to_json(v)).collect()),
            orbit: None,
        }
    }

    pub fn build(&self, tol: &Tolerances) -> Result<RankOnePovm> {
        match (&self.vectors, &self.orbit) {
            (Some(vectors), None) => {
                let dim = self
                    .dim
                    .ok_or_else(|| Error::Parse("explicit POVM needs 'dim'".into()))?;
                let vs: Vec<Vec<C64>> = vectors.iter().map(|v| vector_from_json(v)).collect();
                RankOnePovm::new(dim, vs)
            }
            (None, Some(orbit)) => {
                let initial = vector_from_json(&orbit.initial);
                let (_, rep) = orbit.group.build(initial.len(), tol)?;
                let result = orbit_povm(&rep, &initial, orbit.phase_quotient.unwrap_or(true), tol)?;
                Ok(result.povm)
            }
            _ => Err(Error::Parse(
                "POVM JSON needs either vectors or an orbit".into(),
            )),
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChoicesJson {
    pub family: Option<String>,
    pub v_is_identity: bool,
    pub completion: String,
    pub column_order: String,
    pub decompose_seed: u64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VerificationJson {
    pub trials: usize,
    pub seed: u64,
    pub max_deviation: f64,
}

/// On-disk form of a synthesis result: the transform, the POVM it measures,
/// the recorded choices and the verification report.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SynthesisJson {
    pub tilde_m: MatrixJson,
    pub povm: PovmJson,
    pub choices: ChoicesJson,
    pub verification: VerificationJson,
}

impl SynthesisJson {
    pub fn from_result(result: &SynthesisResult, povm: &RankOnePovm) -> SynthesisJson {
        SynthesisJson {
            tilde_m: MatrixJson::from_matrix(&result.tilde_m),
            povm: PovmJson::from_povm(povm),
            choices: ChoicesJson {
                family: result.choices.family.clone(),
                v_is_identity: result.choices.v_is_identity,
                completion: result.choices.completion.to_string(),
                column_order: result.choices.column_order.to_string(),
                decompose_seed: result.choices.decompose_seed,
            },
            verification: VerificationJson {
                trials: result.verification.trials,
                seed: result.verification.seed,
                max_deviation: result.verification.max_deviation,
            },
        }
    }

    pub fn verification_report(&self) -> VerificationReport {
        VerificationReport {
            trials: self.verification.trials,
            seed: self.verification.seed,
            max_deviation: self.verification.max_deviation,
        }
    }

    pub fn choices_record(&self) -> ChoicesRecord {
        ChoicesRecord {
            family: self.choices.family.clone(),
            v_is_identity: self.choices.v_is_identity,
            completion: "deterministic-orthonormal",
            column_order: "as-given",
            decompose_seed: self.choices.decompose_seed,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BlockJson {
    pub offset: usize,
    pub degree: usize,
    pub label: usize,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DecompositionJson {
    pub base_change: MatrixJson,
    pub blocks: Vec<BlockJson>,
}

impl DecompositionJson {
    pub fn from_decomposition(dec: &Decomposition) -> DecompositionJson {
        DecompositionJson {
            base_change: MatrixJson::from_matrix(&dec.base_change),
            blocks: dec
                .blocks
                .iter()
                .map(|b| BlockJson {
                    offset: b.offset,
                    degree: b.degree,
                    label: b.label,
                })
                .collect(),
        }
    }
}

/// Parse a complex literal of the form `re`, `re+imi` or `re-imi`
/// (e.g. `0.5+0i`, `0.7-0.2i`, `1e-3+2.5i`).
pub fn parse_complex(s: &str) -> Result<C64> {
    let s = s.trim();
    if let Some(body) = s.strip_suffix('i') {
        // Split at the sign of the imaginary part: the last '+'/'-' that is
        // not an exponent sign and not the leading sign.
        let bytes = body.as_bytes();
        let mut split = None;
        for idx in (1..bytes.len()).rev() {
            let c = bytes[idx] as char;
            if (c == '+' || c == '-') && !matches!(bytes[idx - 1] as char, 'e' | 'E') {
                split = Some(idx);
                break;
            }
        }
        let idx = split.ok_or_else(|| {
            Error::Parse(format!(
                "cannot parse complex literal '{s}' (expected re+imi)"
            ))
        })?;
        let re: f64 = body[..idx]
            .parse()
            .map_err(|_| Error::Parse(format!("bad real part in '{s}'")))?;
        let im_str = &body[idx..];
        let im: f64 = if im_str == "+" {
            1.0
        } else if im_str == "-" {
            -1.0
        } else {
            im_str
                .parse()
                .map_err(|_| Error::Parse(format!("bad imaginary part in '{s}'")))?
        };
        Ok(Complex64::new(re, im))
    } else {
        let re: f64 = s
            .parse()
            .map_err(|_| Error::Parse(format!("cannot parse '{s}' as a number")))?;
        Ok(Complex64::new(re, 0.0))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::povm::validate;

    fn tol() -> Tolerances {
        Tolerances::default()
    }

    #[test]
    fn matrix_round_trip_is_bit_exact() {
        let m = crate::linalg::fourier(3);
        let json = MatrixJson::from_matrix(&m);
        let text = serde_json::to_string(&json).unwrap();
        let back: MatrixJson = serde_json::from_str(&text).unwrap();
        assert_eq!(back.to_matrix().unwrap().max_abs_diff(&m), 0.0);
    }

    #[test]
    fn explicit_povm_json_builds() {
        let povm = families::p2_displayed();
        let json = PovmJson::from_povm(&povm);
        let text = serde_json::to_string_pretty(&json).unwrap();
        let back: PovmJson = serde_json::from_str(&text).unwrap();
        let rebuilt = back.build(&tol()).unwrap();
        assert!(validate(&rebuilt, &tol()).passes);
        assert_eq!(rebuilt.len(), 3);
    }

    #[test]
    fn orbit_povm_json_with_family_group() {
        let text = r#"{
            "orbit": {
                "group": {"family": "weyl-heisenberg", "param": 4},
                "initial": [[0.4,0],[0.2,0],[0.1,0],[0.2,0]]
            }
        }"#;
        let json: PovmJson = serde_json::from_str(text).unwrap();
        let povm = json.build(&tol()).unwrap();
        assert_eq!(povm.dim(), 4);
        assert_eq!(povm.len(), 16);
    }

    #[test]
    fn unknown_fields_are_rejected() {
        let text = r#"{"dim": 2, "vectors": [], "surprise": 1}"#;
        assert!(serde_json::from_str::<PovmJson>(text).is_err());
    }

    #[test]
    fn group_json_with_generators_builds() {
        let sx = MatrixJson::from_matrix(&families::sigma_x());
        let sz = MatrixJson::from_matrix(&families::sigma_z());
        let json = GroupJson {
            dim: Some(2),
            generators: Some(vec![sz, sx]),
            phase_quotient: Some(false),
            family: None,
            param: None,
        };
        let (group, rep) = json.build(2, &tol()).unwrap();
        assert_eq!(group.order(), 8);
        assert!(rep.is_homomorphism(1e-10));
    }

    #[test]
    fn complex_literals_parse() {
        assert_eq!(parse_complex("0.5+0i").unwrap(), Complex64::new(0.5, 0.0));
        assert_eq!(
            parse_complex("0.7-0.2i").unwrap(),
            Complex64::new(0.7, -0.2)
        );
        assert_eq!(parse_complex("-1.5").unwrap(), Complex64::new(-1.5, 0.0));
        assert_eq!(
            parse_complex("1e-3+2.5i").unwrap(),
            Complex64::new(1e-3, 2.5)
        );
        assert_eq!(parse_complex("0+i").unwrap(), Complex64::new(0.0, 1.0));
        assert_eq!(parse_complex("0-i").unwrap(), Complex64::new(0.0, -1.0));
        assert!(parse_complex("wat").is_err());
        assert!(parse_complex("1+2j").is_err());
    }
}
