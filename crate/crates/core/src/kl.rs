//! Knill-Laflamme detectability: `PEP ∝ P` on a codespace.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::majorana::OperatorSum;
use crate::sim::{SimError, StateVector};
use crate::C64;

pub const KL_TOL: f64 = 1e-9;

#[derive(Debug, Error)]
pub enum KlError {
    #[error("codewords are not orthonormal (deviation {0:.3e})")]
    NotOrthonormal(f64),
    #[error("no codewords given")]
    Empty,
    #[error(transparent)]
    Sim(#[from] SimError),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    Detectable,
    NotDetectable,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct KlReport {
    pub label: String,
    /// `⟨c_a|E|c_b⟩`, row-major
    pub pep: Vec<Vec<C64>>,
    pub lambda: C64,
    /// Frobenius norm of `PEP − λP`
    pub deviation: f64,
    pub verdict: Verdict,
}

fn check_orthonormal(codewords: &[StateVector]) -> Result<(), KlError> {
    let mut worst = 0.0f64;
    for (a, ca) in codewords.iter().enumerate() {
        for (b, cb) in codewords.iter().enumerate() {
            let want = if a == b { 1.0 } else { 0.0 };
            worst = worst.max((ca.inner(cb) - want).norm());
        }
    }
    if worst > KL_TOL {
        return Err(KlError::NotOrthonormal(worst));
    }
    Ok(())
}

/// Matrix of `o` in the codeword basis.
pub fn restricted_matrix(
    codewords: &[StateVector],
    o: &OperatorSum,
) -> Result<Vec<Vec<C64>>, SimError> {
    let images: Vec<StateVector> = codewords
        .iter()
        .map(|c| c.apply_sum(o))
        .collect::<Result<_, _>>()?;
    Ok(codewords
        .iter()
        .map(|ca| images.iter().map(|ib| ca.inner(ib)).collect())
        .collect())
}

pub fn kl_check(
    codewords: &[StateVector],
    errors: &[(String, OperatorSum)],
) -> Result<Vec<KlReport>, KlError> {
    if codewords.is_empty() {
        return Err(KlError::Empty);
    }
    check_orthonormal(codewords)?;
    let k = codewords.len();
    let mut out = Vec::new();
    for (label, e) in errors {
        let pep = restricted_matrix(codewords, e)?;
        let lambda = (0..k).map(|a| pep[a][a]).sum::<C64>() / k as f64;
        let mut dev2 = 0.0;
        for (a, row) in pep.iter().enumerate() {
            for (b, v) in row.iter().enumerate() {
                let target = if a == b { lambda } else { C64::new(0.0, 0.0) };
                dev2 += (v - target).norm_sqr();
            }
        }
        let deviation = dev2.sqrt();
        let verdict = if deviation < KL_TOL {
            Verdict::Detectable
        } else {
            Verdict::NotDetectable
        };
        out.push(KlReport {
            label: label.clone(),
            pep,
            lambda,
            deviation,
            verdict,
        });
    }
    Ok(out)
}

/// Mean and variance of the total number operator on each codeword; a number
/// code needs zero variance and equal means on all codewords.
pub fn number_profile(codewords: &[StateVector]) -> Result<Vec<(f64, f64)>, SimError> {
    let Some(first) = codewords.first() else {
        return Ok(Vec::new());
    };
    let modes = first.registers().n_fermions;
    let total = (0..modes).fold(OperatorSum::zero(), |acc, f| {
        acc.add(&OperatorSum::number(f))
    });
    let squared = total.multiply(&total);
    codewords
        .iter()
        .map(|c| {
            let m = c.expectation(&total)?.re;
            Ok((m, c.expectation(&squared)?.re - m * m))
        })
        .collect()
}
