//! Matrix-level comparison of number-eigenstate and parity-eigenstate codes:
//! whether logical creation operators on two blocks anticommute.

use serde::{Deserialize, Serialize};

use super::{logical_circuit, CodeError, LogicalGate, StabilizerCode};
use crate::circuit::Registers;
use crate::kl::restricted_matrix;
use crate::majorana::{MajoranaQubitString as Mqs, OperatorSum, Phase};
use crate::sim::{init_state, Occupation, StateVector};
use crate::C64;

type Matrix = Vec<Vec<C64>>;

fn mat_mul(a: &Matrix, b: &Matrix) -> Matrix {
    let n = a.len();
    (0..n)
        .map(|i| {
            (0..n)
                .map(|j| (0..n).map(|k| a[i][k] * b[k][j]).sum())
                .collect()
        })
        .collect()
}

fn max_abs(a: &Matrix) -> f64 {
    a.iter().flatten().map(|z| z.norm()).fold(0.0, f64::max)
}

fn anticommutator_norm(a: &Matrix, b: &Matrix) -> f64 {
    let ab = mat_mul(a, b);
    let ba = mat_mul(b, a);
    let sum: Matrix = ab
        .iter()
        .zip(&ba)
        .map(|(r, s)| r.iter().zip(s).map(|(x, y)| x + y).collect())
        .collect();
    max_abs(&sum)
}

/// Matrix of bare `p_k†` on two modes in the Fock basis ordered by index bits.
fn bare_creation(k: usize) -> Result<Matrix, CodeError> {
    let regs = Registers::new(0, 2);
    let probe = StateVector::vacuum(&regs);
    let fock: Vec<StateVector> = (0..4)
        .map(|x| {
            let fermions = (0..2).map(|f| probe.fermion_bit(x, f)).collect();
            init_state(
                &regs,
                &Occupation {
                    fermions,
                    ..Default::default()
                },
            )
        })
        .collect::<Result<_, _>>()?;
    Ok(restricted_matrix(&fock, &OperatorSum::creation(k))?)
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CandidatePair {
    pub a: String,
    pub b: String,
    /// largest entry of either restricted operator
    pub action: f64,
    pub anticommutator: f64,
    /// acts nontrivially and anticommutes across blocks
    pub valid: bool,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct TheoremDemo {
    /// odd-weight strings on the dual-rail number code (modes 0,1 | 2,3)
    pub number_code: Vec<CandidatePair>,
    pub number_code_all_fail: bool,
    /// `{c_a†, c_b†}` for the natural even creation operators `p_1†p_0` of each block
    pub number_code_even_anticommutator: f64,
    /// `{c_a†, c_b†}` on two repetition blocks, restricted to the joint codespace
    pub parity_code_anticommutator: f64,
    /// deviation of the restricted `c_a†`, `c_b†` from bare `p_0†`, `p_1†`
    pub parity_code_creation_deviation: f64,
}

/// Joint dual-rail codewords `|x_a x_b⟩ = p_{2+x_b}† p_{x_a}† |vac⟩`.
fn dual_rail_codewords() -> Result<Vec<StateVector>, CodeError> {
    let regs = Registers::new(0, 4);
    let mut out = Vec::new();
    for x in 0..4usize {
        let (xa, xb) = (x >> 1 & 1, x & 1);
        let mut s = StateVector::vacuum(&regs);
        s = s.create(xa)?;
        s = s.create(2 + xb)?;
        out.push(s);
    }
    Ok(out)
}

fn odd_strings(modes: [usize; 2]) -> Vec<Mqs> {
    let etas: Vec<usize> = modes.iter().flat_map(|&m| [2 * m, 2 * m + 1]).collect();
    (1u32..16)
        .filter(|mask| mask.count_ones() % 2 == 1)
        .map(|mask| {
            let pick: Vec<usize> = (0..4)
                .filter(|k| mask >> k & 1 == 1)
                .map(|k| etas[k])
                .collect();
            Mqs::canonicalize(&pick, Phase::ONE)
        })
        .collect()
}

pub fn cross_block_anticommutator(code: &StabilizerCode) -> Result<(f64, f64), CodeError> {
    let setup = logical_circuit(code, LogicalGate::Braid)?;
    let basis = setup.encoded_basis()?;
    let ca = restricted_matrix(&basis, &setup.blocks[0].logical_creation())?;
    let cb = restricted_matrix(&basis, &setup.blocks[1].logical_creation())?;
    let mut dev = 0.0f64;
    for (got, k) in [(&ca, 0), (&cb, 1)] {
        let want = bare_creation(k)?;
        for (r, s) in got.iter().zip(&want) {
            for (x, y) in r.iter().zip(s) {
                dev = dev.max((x - y).norm());
            }
        }
    }
    Ok((anticommutator_norm(&ca, &cb), dev))
}

pub fn theorem_demo(parity_code: &StabilizerCode) -> Result<TheoremDemo, CodeError> {
    let words = dual_rail_codewords()?;
    let mut number_code = Vec::new();
    for a in odd_strings([0, 1]) {
        for b in odd_strings([2, 3]) {
            let ma = restricted_matrix(&words, &OperatorSum::from_string(a.clone()))?;
            let mb = restricted_matrix(&words, &OperatorSum::from_string(b.clone()))?;
            let action = max_abs(&ma).max(max_abs(&mb));
            let anti = anticommutator_norm(&ma, &mb);
            let valid = max_abs(&ma) > 1e-10 && max_abs(&mb) > 1e-10 && anti < 1e-10;
            number_code.push(CandidatePair {
                a: a.to_string(),
                b: b.to_string(),
                action,
                anticommutator: anti,
                valid,
            });
        }
    }
    let hop = |from: usize, to: usize| {
        OperatorSum::creation(to).multiply(&OperatorSum::annihilation(from))
    };
    let ea = restricted_matrix(&words, &hop(0, 1))?;
    let eb = restricted_matrix(&words, &hop(2, 3))?;
    let (parity_anti, parity_dev) = cross_block_anticommutator(parity_code)?;
    Ok(TheoremDemo {
        number_code_all_fail: number_code.iter().all(|c| !c.valid),
        number_code,
        number_code_even_anticommutator: anticommutator_norm(&ea, &eb),
        parity_code_anticommutator: parity_anti,
        parity_code_creation_deviation: parity_dev,
    })
}
