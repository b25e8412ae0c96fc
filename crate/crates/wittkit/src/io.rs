//! JSON wire formats. Parsers here accept untrusted input: every numeric
//! field is validated, sizes are capped, and nothing is trusted without
//! being recomputed by the certificate verifier.
//!
//! Conventions: rationals are "num/den" strings (denominator omitted when
//! it is 1); residues mod p^N are decimal strings; matrices are row-major
//! nested arrays.

use crate::arith::{
    is_prime_u64, rat_from_str, rat_to_string, Matrix, MatrixPN, MatrixQ, Rat, ResidueRing,
    VectorPN,
};
use crate::quad::{OrthogonalMapQ, QuadraticForm, ReflectionWord};
use num_bigint::BigUint;
use num_traits::ToPrimitive;
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Hard caps on untrusted input, to keep hostile certificates from
/// allocating or looping unreasonably.
pub const MAX_DIM: usize = 64;
pub const MAX_PRECISION: u32 = 4096;
pub const MAX_PRIME: u64 = 1 << 50;

#[derive(Debug, Clone, Error, PartialEq)]
pub enum IoError {
    #[error("malformed JSON: {0}")]
    Json(String),
    #[error("bad field {field}: {reason}")]
    BadField { field: String, reason: String },
    #[error("unknown certificate kind: {0}")]
    UnknownKind(String),
    #[error("limit exceeded: {0}")]
    LimitExceeded(String),
}

fn bad(field: &str, reason: impl ToString) -> IoError {
    IoError::BadField {
        field: field.to_string(),
        reason: reason.to_string(),
    }
}

pub fn parse_rat(field: &str, s: &str) -> Result<Rat, IoError> {
    rat_from_str(s).map_err(|e| bad(field, e))
}

pub fn parse_rat_vec(field: &str, v: &[String]) -> Result<Vec<Rat>, IoError> {
    if v.len() > MAX_DIM {
        return Err(IoError::LimitExceeded(format!("{field}: vector too long")));
    }
    v.iter().map(|s| parse_rat(field, s)).collect()
}

pub fn parse_rat_matrix(field: &str, rows: &[Vec<String>]) -> Result<MatrixQ, IoError> {
    if rows.len() > MAX_DIM || rows.iter().any(|r| r.len() > MAX_DIM) {
        return Err(IoError::LimitExceeded(format!("{field}: matrix too large")));
    }
    let parsed: Result<Vec<Vec<Rat>>, IoError> = rows
        .iter()
        .map(|r| parse_rat_vec(field, r))
        .collect();
    Matrix::from_rows(parsed?).map_err(|e| bad(field, e))
}

pub fn rat_vec_to_json(v: &[Rat]) -> Vec<String> {
    v.iter().map(rat_to_string).collect()
}

pub fn rat_matrix_to_json(m: &MatrixQ) -> Vec<Vec<String>> {
    (0..m.rows())
        .map(|i| m.row(i).iter().map(rat_to_string).collect())
        .collect()
}

fn parse_residue(field: &str, s: &str, ring: &ResidueRing) -> Result<BigUint, IoError> {
    if s.is_empty() || s.len() > 100_000 || !s.bytes().all(|b| b.is_ascii_digit()) {
        return Err(bad(field, "residues are nonnegative decimal strings"));
    }
    let n: BigUint = s.parse().map_err(|e| bad(field, e))?;
    if &n >= ring.modulus() {
        return Err(bad(field, "residue out of range for p^N"));
    }
    Ok(n)
}

pub fn parse_residue_vec(
    field: &str,
    v: &[String],
    ring: &ResidueRing,
) -> Result<VectorPN, IoError> {
    if v.len() > MAX_DIM {
        return Err(IoError::LimitExceeded(format!("{field}: vector too long")));
    }
    v.iter().map(|s| parse_residue(field, s, ring)).collect()
}

pub fn parse_residue_matrix(
    field: &str,
    rows: &[Vec<String>],
    ring: &ResidueRing,
) -> Result<MatrixPN, IoError> {
    if rows.len() > MAX_DIM || rows.iter().any(|r| r.len() > MAX_DIM) {
        return Err(IoError::LimitExceeded(format!("{field}: matrix too large")));
    }
    let parsed: Result<Vec<Vec<BigUint>>, IoError> = rows
        .iter()
        .map(|r| parse_residue_vec(field, r, ring))
        .collect();
    Matrix::from_rows(parsed?).map_err(|e| bad(field, e))
}

pub fn residue_vec_to_json(v: &VectorPN) -> Vec<String> {
    v.iter().map(|e| e.to_string()).collect()
}

pub fn residue_matrix_to_json(m: &MatrixPN) -> Vec<Vec<String>> {
    (0..m.rows())
        .map(|i| m.row(i).iter().map(|e| e.to_string()).collect())
        .collect()
}

pub fn parse_ring(p: u64, precision: u32) -> Result<ResidueRing, IoError> {
    if !(3..=MAX_PRIME).contains(&p) || !is_prime_u64(p) {
        return Err(bad("p", "p must be an odd prime below 2^50"));
    }
    if !(1..=MAX_PRECISION).contains(&precision) {
        return Err(bad("N", "precision out of range"));
    }
    ResidueRing::new(p, precision).map_err(|e| bad("p", e))
}

/// Form file: {"n": int, "alphas": [...]} or {"gram": [[...]]}.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FormJson {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub alphas: Option<Vec<String>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub gram: Option<Vec<Vec<String>>>,
}

impl FormJson {
    pub fn of(form: &QuadraticForm) -> Self {
        match form.standard_coeffs() {
            Some(alphas) => FormJson {
                n: Some(form.dim()),
                alphas: Some(rat_vec_to_json(alphas)),
                gram: None,
            },
            None => FormJson {
                n: None,
                alphas: None,
                gram: Some(rat_matrix_to_json(form.gram())),
            },
        }
    }

    pub fn to_form(&self) -> Result<QuadraticForm, IoError> {
        match (&self.alphas, &self.gram) {
            (Some(alphas), None) => {
                if alphas.len() + 2 > MAX_DIM {
                    return Err(IoError::LimitExceeded("alphas".into()));
                }
                let alphas = parse_rat_vec("alphas", alphas)?;
                let form = QuadraticForm::standard(&alphas).map_err(|e| bad("alphas", e))?;
                if let Some(n) = self.n {
                    if n != form.dim() {
                        return Err(bad("n", "n disagrees with the number of coefficients"));
                    }
                }
                Ok(form)
            }
            (None, Some(gram)) => {
                let gram = parse_rat_matrix("gram", gram)?;
                QuadraticForm::from_gram(gram).map_err(|e| bad("gram", e))
            }
            _ => Err(bad("form", "exactly one of alphas/gram is required")),
        }
    }
}

pub fn parse_form(text: &str) -> Result<QuadraticForm, IoError> {
    let json: FormJson = serde_json::from_str(text).map_err(|e| IoError::Json(e.to_string()))?;
    json.to_form()
}

pub fn form_to_string(form: &QuadraticForm) -> String {
    serde_json::to_string_pretty(&FormJson::of(form)).expect("serializable")
}

/// Orthogonal map file: matrix, det sign, optional spinor class and
/// reflection word.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MapJson {
    pub matrix: Vec<Vec<String>>,
    pub det: String,
    pub spinor_norm: Option<i64>,
    pub reflection_word: Option<Vec<Vec<String>>>,
}

impl MapJson {
    pub fn of(form: &QuadraticForm, map: &OrthogonalMapQ) -> Self {
        // Trivial classes are recognized by an exact square test, which
        // avoids factoring the product of reflection values; nontrivial
        // classes are reduced when the product is small enough to factor.
        let spinor_norm = if map.det() == 1 {
            match map.is_spinor_trivial(form) {
                Ok(true) => Some(1),
                Ok(false) => crate::quad::spinor_norm(form, map)
                    .ok()
                    .and_then(|c| c.representative().to_i64()),
                Err(_) => None,
            }
        } else {
            None
        };
        MapJson {
            matrix: rat_matrix_to_json(map.matrix()),
            det: if map.det() == 1 { "+1" } else { "-1" }.to_string(),
            spinor_norm,
            reflection_word: map
                .word()
                .map(|w| w.vectors.iter().map(|v| rat_vec_to_json(v)).collect()),
        }
    }

    /// Rebuild and re-certify the map against a form; the claimed det and
    /// word are checked, the spinor_norm field is advisory.
    pub fn to_map(&self, form: &QuadraticForm) -> Result<OrthogonalMapQ, IoError> {
        let matrix = parse_rat_matrix("matrix", &self.matrix)?;
        let word = match &self.reflection_word {
            Some(vectors) => {
                if vectors.len() > 4 * MAX_DIM {
                    return Err(IoError::LimitExceeded("reflection_word".into()));
                }
                let parsed: Result<Vec<Vec<Rat>>, IoError> = vectors
                    .iter()
                    .map(|v| parse_rat_vec("reflection_word", v))
                    .collect();
                Some(ReflectionWord { vectors: parsed? })
            }
            None => None,
        };
        let map = OrthogonalMapQ::new(form, matrix, word).map_err(|e| bad("matrix", e))?;
        let claimed = match self.det.as_str() {
            "+1" => 1i8,
            "-1" => -1i8,
            other => return Err(bad("det", format!("expected +1 or -1, got {other}"))),
        };
        if claimed != map.det() {
            return Err(bad("det", "claimed determinant is wrong"));
        }
        Ok(map)
    }
}


/// A p-adic scalar as {"p": prime, "N": precision, "r": decimal residue}.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PAdicJson {
    pub p: u64,
    #[serde(rename = "N")]
    pub precision: u32,
    pub r: String,
}

impl PAdicJson {
    pub fn of(value: &crate::arith::PAdicApprox) -> Self {
        PAdicJson {
            p: value.prime,
            precision: value.precision,
            r: value.residue.to_string(),
        }
    }

    pub fn to_padic(&self) -> Result<crate::arith::PAdicApprox, IoError> {
        let ring = parse_ring(self.p, self.precision)?;
        let residue = parse_residue("r", &self.r, &ring)?;
        crate::arith::PAdicApprox::new(self.p, self.precision, residue)
            .map_err(|e| bad("r", e))
    }
}
