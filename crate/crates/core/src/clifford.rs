//! Heisenberg-picture conjugation of strings through gates and circuits.

use num_complex::Complex64 as C64;
use thiserror::Error;

use crate::circuit::{Angle, Circuit, Gate, Op, Registers};
use crate::majorana::{MajoranaQubitString as Mqs, OperatorSum, Pauli, Phase};

#[derive(Debug, Error, PartialEq)]
pub enum CliffordError {
    #[error("{0} is not handled symbolically; use the dense simulator")]
    Unsupported(&'static str),
    #[error("circuit contains a measurement, reset or conditioned operation")]
    NonUnitary,
    #[error("braid variant needs two distinct modes, got {0} twice")]
    SameMode(usize),
}

/// A gate written as `global · ∏_k exp(α_k S_k)` with mutually commuting
/// strings `S_k` that square to −1.
#[derive(Clone, Debug)]
pub struct RotationForm {
    pub global: C64,
    pub factors: Vec<(f64, Mqs)>,
}

/// `γ̃_a γ_b` as a canonical string.
pub fn tilde_plain(a: usize, b: usize) -> Mqs {
    Mqs::canonicalize(&[2 * a + 1, 2 * b], Phase::ONE)
}

fn cis(x: f64) -> C64 {
    C64::from_polar(1.0, x)
}

fn phase_form(theta: f64, a: Mqs) -> RotationForm {
    // e^{iθ n} with n = (1 + iA)/2 and A² = −1
    RotationForm {
        global: cis(theta / 2.0),
        factors: vec![(-theta / 2.0, a)],
    }
}

fn controlled_phase_form(theta: f64, a: Mqs, b: Mqs) -> RotationForm {
    // exp(−iθ n_a n_b) with n = (1 + iA)/2
    let ab = a.multiply(&b).scaled(Phase::MINUS_I);
    RotationForm {
        global: cis(-theta / 4.0),
        factors: vec![(theta / 4.0, a), (theta / 4.0, b), (-theta / 4.0, ab)],
    }
}

/// `iZ_q`; the qubit number operator is `(1 + i·iZ)/2`.
fn qubit_generator(q: usize) -> Mqs {
    Mqs::pauli(q, Pauli::Z).scaled(Phase::I)
}

/// `γ̃_f γ_f`, so that `n_f = (1 + iγ̃_fγ_f)/2`.
fn mode_generator(f: usize) -> Mqs {
    tilde_plain(f, f)
}

/// Rotation form of every gate except `H` and the boson gates.
pub fn rotation_form(g: &Gate) -> Option<RotationForm> {
    use std::f64::consts::PI;
    let r = match *g {
        Gate::Tf { f } => phase_form(PI / 4.0, mode_generator(f)),
        Gate::TfDag { f } => phase_form(-PI / 4.0, mode_generator(f)),
        Gate::Sf { f } => phase_form(PI / 2.0, mode_generator(f)),
        Gate::SfDag { f } => phase_form(-PI / 2.0, mode_generator(f)),
        Gate::Zf { f } => phase_form(PI, mode_generator(f)),
        Gate::PhaseF { f, angle } => phase_form(angle.value(), mode_generator(f)),
        Gate::S { q } => phase_form(PI / 2.0, qubit_generator(q)),
        Gate::SDag { q } => phase_form(-PI / 2.0, qubit_generator(q)),
        Gate::Z { q } => phase_form(PI, qubit_generator(q)),
        Gate::T { q } => phase_form(PI / 4.0, qubit_generator(q)),
        Gate::TDag { q } => phase_form(-PI / 4.0, qubit_generator(q)),
        Gate::PhaseQ { q, angle } => phase_form(angle.value(), qubit_generator(q)),
        Gate::Xrot { q, angle } => RotationForm {
            global: C64::new(1.0, 0.0),
            factors: vec![(
                angle.value() / 2.0,
                Mqs::pauli(q, Pauli::X).scaled(Phase::MINUS_I),
            )],
        },
        Gate::X { q } => RotationForm {
            global: C64::new(0.0, 1.0),
            factors: vec![(PI / 2.0, Mqs::pauli(q, Pauli::X).scaled(Phase::MINUS_I))],
        },
        Gate::Braid { i, j } => RotationForm {
            global: C64::new(1.0, 0.0),
            factors: vec![(-PI / 4.0, tilde_plain(i, j))],
        },
        Gate::BraidAngle { i, j, angle } => RotationForm {
            global: C64::new(1.0, 0.0),
            factors: vec![(-angle.value() / 2.0, tilde_plain(i, j))],
        },
        Gate::CZf { i, j } => controlled_phase_form(-PI, mode_generator(i), mode_generator(j)),
        Gate::CZfAngle { i, j, angle } => {
            controlled_phase_form(angle.value(), mode_generator(i), mode_generator(j))
        }
        Gate::CZqf { q, f } => controlled_phase_form(-PI, qubit_generator(q), mode_generator(f)),
        Gate::CZqfAngle { q, f, angle } => {
            controlled_phase_form(angle.value(), qubit_generator(q), mode_generator(f))
        }
        Gate::SqrtISwapF { i, j } => hop_form(-PI / 4.0, i, j),
        Gate::Hop { a, b, angle, .. } => hop_form(angle.value(), a, b),
        Gate::H { .. }
        | Gate::BeamSplitter { .. }
        | Gate::Dissociate { .. }
        | Gate::Pair { .. } => return None,
    };
    Some(r)
}

fn hop_form(theta: f64, a: usize, b: usize) -> RotationForm {
    // p_a†p_b + h.c. = (i/2)(γ̃_aγ_b + γ̃_bγ_a)
    RotationForm {
        global: C64::new(1.0, 0.0),
        factors: vec![
            (theta / 2.0, tilde_plain(a, b)),
            (theta / 2.0, tilde_plain(b, a)),
        ],
    }
}

/// Snaps values within rounding of 0 or ±1 so Clifford angles stay single-term.
fn snap(x: f64) -> f64 {
    for t in [0.0, 1.0, -1.0] {
        if (x - t).abs() < 1e-15 {
            return t;
        }
    }
    x
}

fn conjugate_rotation(alpha: f64, gen: &Mqs, a: &OperatorSum) -> OperatorSum {
    let c = snap((2.0 * alpha).cos());
    let s = snap((2.0 * alpha).sin());
    let mut out = OperatorSum::zero();
    for (k, t) in a.terms() {
        if t.commutes_with(gen) {
            out.add_term(*k, t.clone());
        } else {
            // e^{−αS} A e^{αS} = A e^{2αS} when A and S anticommute
            out.add_term(k * c, t.clone());
            out.add_term(k * s, t.multiply(gen));
        }
    }
    out
}

fn conjugate_hadamard(q: usize, a: &OperatorSum) -> OperatorSum {
    let mut out = OperatorSum::zero();
    for (k, t) in a.terms() {
        let mut t2 = t.clone();
        let mut k2 = *k;
        if let Some(&l) = t.paulis().get(&q) {
            let (letter, sign) = match l {
                Pauli::X => (Pauli::Z, 1.0),
                Pauli::Z => (Pauli::X, 1.0),
                Pauli::Y => (Pauli::Y, -1.0),
            };
            let mut letters: Vec<(usize, Pauli)> =
                t.paulis().iter().map(|(a, b)| (*a, *b)).collect();
            for e in letters.iter_mut() {
                if e.0 == q {
                    e.1 = letter;
                }
            }
            t2 = Mqs::canonicalize(t.majoranas(), t.phase()).with_paulis(letters);
            k2 *= sign;
        }
        out.add_term(k2, t2);
    }
    out
}

/// Relabels modes `i ↔ j` on every Majorana, without extra sign.
fn conjugate_move_swap(i: usize, j: usize, a: &OperatorSum) -> OperatorSum {
    let mut out = OperatorSum::zero();
    for (k, t) in a.terms() {
        let etas: Vec<usize> = t
            .majoranas()
            .iter()
            .map(|&e| {
                let site = e / 2;
                let site = if site == i {
                    j
                } else if site == j {
                    i
                } else {
                    site
                };
                2 * site + e % 2
            })
            .collect();
        let s = Mqs::canonicalize(&etas, t.phase())
            .with_paulis(t.paulis().iter().map(|(a, b)| (*a, *b)));
        out.add_term(*k, s);
    }
    out
}

/// `U† A U` for a single gate applied to a sum.
pub fn conjugate_sum(g: &Gate, a: &OperatorSum) -> Result<OperatorSum, CliffordError> {
    if let Gate::H { q } = g {
        return Ok(conjugate_hadamard(*q, a));
    }
    let form = rotation_form(g).ok_or(CliffordError::Unsupported(g.kind_name()))?;
    let mut out = a.clone();
    for (alpha, s) in &form.factors {
        out = conjugate_rotation(*alpha, s, &out);
    }
    Ok(out)
}

/// `U† s U` for one gate.
pub fn conjugate(g: &Gate, s: &Mqs) -> Result<OperatorSum, CliffordError> {
    conjugate_sum(g, &OperatorSum::from_string(s.clone()))
}

/// `U† A U` where `U` is the whole circuit, ops taken in time order.
pub fn conjugate_circuit_sum(c: &Circuit, a: &OperatorSum) -> Result<OperatorSum, CliffordError> {
    let mut out = a.clone();
    for op in c.ops.iter().rev() {
        out = match op {
            Op::Gate { gate } => conjugate_sum(gate, &out)?,
            Op::MoveSwap { i, j } => conjugate_move_swap(*i, *j, &out),
            _ => return Err(CliffordError::NonUnitary),
        };
    }
    Ok(out)
}

pub fn conjugate_circuit(c: &Circuit, s: &Mqs) -> Result<OperatorSum, CliffordError> {
    conjugate_circuit_sum(c, &OperatorSum::from_string(s.clone()))
}

/// Single-string image for Clifford circuits.
pub fn conjugate_clifford(c: &Circuit, s: &Mqs) -> Result<Mqs, CliffordError> {
    let out = conjugate_circuit(c, s)?;
    out.as_single(1e-12)
        .ok_or(CliffordError::Unsupported("non-Clifford image"))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BraidVariant {
    /// `exp(−π/4 γ̃_i γ̃_j)`
    TildeTilde,
    /// `exp(−π/4 γ_i γ_j)`
    PlainPlain,
    /// `BRAID_ij†`
    Inverse,
}

/// Gate sequence (time order) for one of the braid variants.
pub fn braid_variant_gates(
    kind: BraidVariant,
    i: usize,
    j: usize,
) -> Result<Vec<Gate>, CliffordError> {
    if i == j {
        return Err(CliffordError::SameMode(i));
    }
    let b = Gate::Braid { i, j };
    Ok(match kind {
        BraidVariant::TildeTilde => vec![Gate::Sf { f: j }, b, Gate::SfDag { f: j }],
        BraidVariant::PlainPlain => vec![Gate::SfDag { f: i }, b, Gate::Sf { f: i }],
        BraidVariant::Inverse => vec![Gate::Zf { f: j }, b, Gate::Zf { f: j }],
    })
}

pub fn braid_variant(kind: BraidVariant, i: usize, j: usize) -> Result<Circuit, CliffordError> {
    let gates = braid_variant_gates(kind, i, j)?;
    let mut c = Circuit::new(Registers::new(0, i.max(j) + 1));
    c.gates(gates);
    Ok(c)
}

/// The Majorana string a braid variant rotates about: the variant equals `exp(−π/4 S)`.
pub fn braid_variant_generator(kind: BraidVariant, i: usize, j: usize) -> Mqs {
    match kind {
        BraidVariant::TildeTilde => Mqs::canonicalize(&[2 * i + 1, 2 * j + 1], Phase::ONE),
        BraidVariant::PlainPlain => Mqs::canonicalize(&[2 * i, 2 * j], Phase::ONE),
        BraidVariant::Inverse => tilde_plain(i, j).scaled(Phase::MINUS_ONE),
    }
}

/// Angle helper for callers building Clifford phase gates.
pub fn quarter_turns(a: Angle) -> Option<i64> {
    a.steps_of(2)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn single(g: Gate, s: &str) -> String {
        let out = conjugate(&g, &s.parse().unwrap()).unwrap();
        out.as_single(1e-12).unwrap().to_string()
    }

    #[test]
    fn braid_rows() {
        assert_eq!(single(Gate::Braid { i: 0, j: 1 }, "+1 * gt0"), "-1 * g1");
        assert_eq!(single(Gate::Braid { i: 0, j: 1 }, "+1 * g1"), "+1 * gt0");
        assert_eq!(single(Gate::Braid { i: 0, j: 1 }, "+1 * g0"), "+1 * g0");
    }

    #[test]
    fn sf_rows() {
        assert_eq!(single(Gate::Sf { f: 0 }, "+1 * g0"), "+1 * gt0");
        assert_eq!(single(Gate::Sf { f: 0 }, "+1 * gt0"), "-1 * g0");
        assert_eq!(single(Gate::Zf { f: 0 }, "+1 * g0"), "-1 * g0");
    }

    #[test]
    fn tf_is_two_terms() {
        let out = conjugate(&Gate::Tf { f: 0 }, &Mqs::gamma(0)).unwrap();
        assert_eq!(out.len(), 2);
        let want = OperatorSum::from_terms([
            (
                C64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0),
                Mqs::gamma(0),
            ),
            (
                C64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0),
                Mqs::gamma_tilde(0),
            ),
        ]);
        assert!(out.max_abs_diff(&want) < 1e-15);
    }

    #[test]
    fn czf_row() {
        // γ_i → γ_i Zf_j
        let out = single(Gate::CZf { i: 0, j: 1 }, "+1 * g0");
        let want = Mqs::gamma(0).multiply(&Mqs::parity(1)).to_string();
        assert_eq!(out, want);
    }

    #[test]
    fn hadamard_swaps_letters() {
        assert_eq!(single(Gate::H { q: 0 }, "+1 * | X:q0"), "+1 * | Z:q0");
        assert_eq!(single(Gate::H { q: 0 }, "+1 * | Y:q0"), "-1 * | Y:q0");
    }

    #[test]
    fn boson_gates_unsupported() {
        let g = Gate::BeamSplitter {
            a: 0,
            b: 1,
            angle: Angle::pi_frac(1, 4),
        };
        assert!(matches!(
            conjugate(&g, &Mqs::gamma(0)),
            Err(CliffordError::Unsupported(_))
        ));
    }

    #[test]
    fn tilde_tilde_variant() {
        let c = braid_variant(BraidVariant::TildeTilde, 0, 1).unwrap();
        let out = conjugate_clifford(&c, &Mqs::gamma_tilde(0)).unwrap();
        assert_eq!(out.to_string(), "-1 * gt1");
    }

    #[test]
    fn same_mode_rejected() {
        assert_eq!(
            braid_variant(BraidVariant::Inverse, 2, 2).unwrap_err(),
            CliffordError::SameMode(2)
        );
    }

    #[test]
    fn empty_circuit_is_identity() {
        let s: Mqs = "-i * g0 gt2 | X:q1".parse().unwrap();
        let c = Circuit::new(Registers::new(2, 3));
        assert_eq!(conjugate_clifford(&c, &s).unwrap(), s);
    }
}
