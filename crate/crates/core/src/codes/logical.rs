//! Logical gate compilation, symbolic verification and encoded round trips.

use serde::{Deserialize, Serialize};

use super::{steane_checks, CodeError, CodeFamily, StabilizerCode};
use crate::circuit::{Angle, Circuit, Gate, Registers};
use crate::clifford::{
    braid_variant_gates, conjugate, conjugate_circuit, conjugate_clifford, BraidVariant,
};
use crate::gf2::StabilizerGroup;
use crate::majorana::{MajoranaQubitString as Mqs, OperatorSum, Pauli, Phase};
use crate::sim::{init_state, Occupation, StateVector};
use crate::verify::{Check, TOL};
use crate::C64;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum LogicalGate {
    #[serde(rename = "BRAID")]
    Braid,
    CZf,
    CZqf,
    Sf,
    Tf,
    Zf,
}

impl LogicalGate {
    pub const ALL: [LogicalGate; 6] = [
        LogicalGate::Braid,
        LogicalGate::CZf,
        LogicalGate::CZqf,
        LogicalGate::Sf,
        LogicalGate::Tf,
        LogicalGate::Zf,
    ];

    pub fn name(self) -> &'static str {
        match self {
            LogicalGate::Braid => "BRAID",
            LogicalGate::CZf => "CZf",
            LogicalGate::CZqf => "CZqf",
            LogicalGate::Sf => "Sf",
            LogicalGate::Tf => "Tf",
            LogicalGate::Zf => "Zf",
        }
    }

    /// Fermion blocks the gate acts on.
    pub fn n_blocks(self) -> usize {
        match self {
            LogicalGate::Braid | LogicalGate::CZf => 2,
            _ => 1,
        }
    }

    /// The same gate on bare modes `0, 1` and bare qubit 0.
    pub fn bare(self) -> Gate {
        match self {
            LogicalGate::Braid => Gate::Braid { i: 0, j: 1 },
            LogicalGate::CZf => Gate::CZf { i: 0, j: 1 },
            LogicalGate::CZqf => Gate::CZqf { q: 0, f: 0 },
            LogicalGate::Sf => Gate::Sf { f: 0 },
            LogicalGate::Tf => Gate::Tf { f: 0 },
            LogicalGate::Zf => Gate::Zf { f: 0 },
        }
    }

    pub fn bare_registers(self) -> Registers {
        Registers::new(usize::from(self == LogicalGate::CZqf), self.n_blocks())
    }
}

impl std::str::FromStr for LogicalGate {
    type Err = CodeError;

    fn from_str(s: &str) -> Result<Self, CodeError> {
        LogicalGate::ALL
            .into_iter()
            .find(|g| g.name().eq_ignore_ascii_case(s))
            .ok_or_else(|| CodeError::Unsupported(s.to_string()))
    }
}

/// How the bare qubit of `CZqf` is carried.
#[derive(Clone, Debug, PartialEq)]
pub enum QubitBlock {
    Bare { q: usize },
    Steane { qubits: Vec<usize> },
}

impl QubitBlock {
    pub fn generators(&self) -> Vec<Mqs> {
        let Self::Steane { qubits } = self else {
            return Vec::new();
        };
        let mut out = Vec::new();
        for letter in [Pauli::Z, Pauli::X] {
            for row in steane_checks() {
                let letters = qubits
                    .iter()
                    .zip(&row)
                    .filter(|(_, &b)| b == 1)
                    .map(|(&q, _)| (q, letter));
                out.push(Mqs::identity().with_paulis(letters));
            }
        }
        out
    }

    pub fn logical(&self, letter: Pauli) -> Mqs {
        match self {
            Self::Bare { q } => Mqs::pauli(*q, letter),
            Self::Steane { qubits } => match letter {
                Pauli::Y => self
                    .logical(Pauli::X)
                    .multiply(&self.logical(Pauli::Z))
                    .scaled(Phase::I),
                l => Mqs::identity().with_paulis(qubits.iter().map(|&q| (q, l))),
            },
        }
    }
}

/// A compiled logical gate together with the blocks it acts on.
#[derive(Clone, Debug)]
pub struct LogicalSetup {
    pub gate: LogicalGate,
    pub circuit: Circuit,
    pub blocks: Vec<StabilizerCode>,
    pub qubit_block: Option<QubitBlock>,
    /// qubits that start and end in |0⟩
    pub ancilla_qubits: Vec<usize>,
}

impl LogicalSetup {
    /// Generators of the joint code, including ancillas fixed to |0⟩.
    pub fn generators(&self) -> Vec<Mqs> {
        let mut out: Vec<Mqs> = self
            .blocks
            .iter()
            .flat_map(|b| b.generators.iter().cloned())
            .collect();
        if let Some(qb) = &self.qubit_block {
            out.extend(qb.generators());
        }
        out.extend(self.ancilla_qubits.iter().map(|&q| Mqs::pauli(q, Pauli::Z)));
        out
    }

    pub fn group(&self) -> StabilizerGroup {
        StabilizerGroup::new(
            &self.generators(),
            self.circuit.registers.n_fermions,
            self.circuit.registers.n_qubits,
        )
    }

    /// Image of a bare operator under the encoding map.
    pub fn lift(&self, bare: &Mqs) -> Mqs {
        let mut out = Mqs::identity().scaled(bare.phase());
        for &eta in bare.majoranas() {
            let b = &self.blocks[eta / 2];
            out = out.multiply(if eta % 2 == 0 {
                &b.logical_gamma
            } else {
                &b.logical_gamma_tilde
            });
        }
        for &l in bare.paulis().values() {
            let qb = self.qubit_block.as_ref().expect("bare qubit has a carrier");
            out = out.multiply(&qb.logical(l));
        }
        out
    }

    pub fn lift_sum(&self, bare: &OperatorSum) -> OperatorSum {
        OperatorSum::from_terms(bare.terms().iter().map(|(c, s)| (*c, self.lift(s))))
    }
}

fn with_gates(regs: &Registers, gates: impl IntoIterator<Item = Gate>) -> Circuit {
    let mut c = Circuit::new(regs.clone());
    c.gates(gates);
    c
}

/// Picks the braid variant whose conjugation sends `from` to `+to`.
fn aligning_rotation(
    kind: BraidVariant,
    a: usize,
    b: usize,
    from: &Mqs,
    to: &Mqs,
) -> Result<Vec<Gate>, CodeError> {
    let regs = Registers::new(0, a.max(b) + 1);
    for (i, j) in [(a, b), (b, a)] {
        let gates = braid_variant_gates(kind, i, j)?;
        if &conjugate_clifford(&with_gates(&regs, gates.clone()), from)? == to {
            return Ok(gates);
        }
    }
    Err(CodeError::Unsupported("aligning rotation".into()))
}

fn inverse_gates(gates: &[Gate]) -> Vec<Gate> {
    gates.iter().rev().flat_map(|g| g.inverse()).collect()
}

/// Compiles a logical gate for `code`; two-block gates place block `b`
/// directly after block `a`.
pub fn logical_circuit(
    code: &StabilizerCode,
    gate: LogicalGate,
) -> Result<LogicalSetup, CodeError> {
    let n = code.n_sites;
    let a = code.shifted(0);
    let blocks: Vec<StabilizerCode> = (0..gate.n_blocks()).map(|k| code.shifted(k * n)).collect();
    let color = !matches!(code.family, CodeFamily::Repetition { .. });
    let flip = code.transversal_parity_sign() == Phase::MINUS_ONE;
    let mut ancilla_qubits = Vec::new();
    let mut qubit_block = None;
    let n_qubits = match (gate, color) {
        (LogicalGate::CZqf, false) => {
            qubit_block = Some(QubitBlock::Bare { q: 0 });
            1
        }
        (LogicalGate::CZqf, true) => {
            qubit_block = Some(QubitBlock::Steane {
                qubits: (0..7).collect(),
            });
            7
        }
        (LogicalGate::Tf, true) => {
            ancilla_qubits.push(0);
            1
        }
        _ => 0,
    };
    let regs = Registers::new(n_qubits, gate.n_blocks() * n);
    let mut g: Vec<Gate> = Vec::new();
    if !color {
        let last = n - 1;
        match gate {
            LogicalGate::Braid => g.push(Gate::Braid { i: last, j: n }),
            LogicalGate::Sf => g.push(Gate::Braid { i: last, j: 0 }),
            LogicalGate::Zf => {
                g.extend([Gate::Braid { i: last, j: 0 }, Gate::Braid { i: last, j: 0 }])
            }
            LogicalGate::Tf => g.push(Gate::BraidAngle {
                i: last,
                j: 0,
                angle: Angle::pi_frac(1, 4),
            }),
            LogicalGate::CZf => {
                let mut c = Vec::new();
                for blk in &blocks {
                    let lo = blk.site_extent() - n;
                    c.extend(aligning_rotation(
                        BraidVariant::TildeTilde,
                        lo + last,
                        lo,
                        &Mqs::gamma_tilde(lo),
                        &blk.logical_gamma_tilde,
                    )?);
                }
                g.extend(c.clone());
                g.push(Gate::CZf { i: 0, j: n });
                g.extend(inverse_gates(&c));
            }
            LogicalGate::CZqf => {
                let c = aligning_rotation(
                    BraidVariant::PlainPlain,
                    0,
                    last,
                    &Mqs::gamma(last),
                    &a.logical_gamma,
                )?;
                g.extend(c.clone());
                g.push(Gate::CZqf { q: 0, f: last });
                g.extend(inverse_gates(&c));
            }
        }
    } else {
        let all = |f: &dyn Fn(usize) -> Gate| (0..n).map(f).collect::<Vec<_>>();
        match gate {
            LogicalGate::Braid => g.extend(all(&|i| Gate::Braid { i, j: n + i })),
            LogicalGate::Sf => g.extend(all(&|f| Gate::Sf { f })),
            LogicalGate::Zf => g.extend(all(&|f| Gate::Zf { f })),
            LogicalGate::CZf => {
                g.extend(all(&|i| Gate::CZf { i, j: n + i }));
                if flip {
                    g.extend((0..2 * n).map(|f| Gate::Zf { f }));
                }
            }
            LogicalGate::CZqf => {
                if n != 7 {
                    return Err(CodeError::Unsupported(
                        "CZqf needs a 7-site block to pair with the Steane qubits".into(),
                    ));
                }
                g.extend(all(&|i| Gate::CZqf { q: i, f: i }));
                if flip {
                    g.extend((0..7).map(|q| Gate::Z { q }));
                }
            }
            LogicalGate::Tf => {
                let t = 0;
                let mut copy = vec![Gate::H { q: t }];
                copy.extend(all(&|f| Gate::CZqf { q: t, f }));
                if flip {
                    copy.push(Gate::Z { q: t });
                }
                copy.push(Gate::H { q: t });
                g.extend(copy.clone());
                g.push(Gate::T { q: t });
                g.extend(inverse_gates(&copy));
            }
        }
    }
    Ok(LogicalSetup {
        gate,
        circuit: with_gates(&regs, g),
        blocks,
        qubit_block,
        ancilla_qubits,
    })
}

/// Bare operators whose images pin down a gate: every Majorana and Pauli letter.
fn bare_probes(gate: LogicalGate) -> Vec<Mqs> {
    let mut out: Vec<Mqs> = (0..gate.n_blocks())
        .flat_map(|k| [Mqs::gamma(k), Mqs::gamma_tilde(k)])
        .collect();
    if gate == LogicalGate::CZqf {
        out.extend([Pauli::X, Pauli::Z].map(|l| Mqs::pauli(0, l)));
    }
    out
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct LogicalReport {
    pub gate: LogicalGate,
    pub checks: Vec<Check>,
}

impl LogicalReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }
}

/// Symbolic check that generators map into the stabilizer group with sign +1
/// and logical operators transform as the bare gate, modulo stabilizers.
pub fn verify_logical(
    code: &StabilizerCode,
    gate: LogicalGate,
) -> Result<LogicalReport, CodeError> {
    let setup = logical_circuit(code, gate)?;
    let group = setup.group();
    let mut checks = Vec::new();
    for g in setup.generators() {
        let image = conjugate_circuit(&setup.circuit, &g)?;
        let ok = image
            .as_single(1e-12)
            .and_then(|s| group.membership(&s))
            .is_some_and(|p| p == Phase::ONE);
        checks.push(Check::flag(
            format!("{} preserves {g}", gate.name()),
            ok,
            image.to_string(),
        ));
    }
    for b in bare_probes(gate) {
        let expected = setup.lift_sum(&conjugate(&gate.bare(), &b)?);
        let got = conjugate_circuit(&setup.circuit, &setup.lift(&b))?;
        let dev = group.equivalent(&got, &expected);
        checks.push(Check::new(
            format!("{} logical image of {b}", gate.name()),
            dev,
            TOL,
        ));
    }
    Ok(LogicalReport { gate, checks })
}

/// Phase `p` in `U† Γ_a U = p Γ_a Γ̃_b Γ_b` for transversal CZf, where `Γ` are
/// the bare products `∏γ_i` and `Γ̃ = ∏γ̃_i` of each block.
pub fn transversal_czf_prefactor(code: &StabilizerCode) -> Result<Phase, CodeError> {
    let n = code.n_sites;
    let raw = |lo: usize, t: usize| {
        Mqs::canonicalize(
            &(lo..lo + n).map(|i| 2 * i + t).collect::<Vec<_>>(),
            Phase::ONE,
        )
    };
    let (ga, gtb, gb) = (raw(0, 0), raw(n, 1), raw(n, 0));
    let c = with_gates(
        &Registers::new(0, 2 * n),
        (0..n).map(|i| Gate::CZf { i, j: n + i }),
    );
    let image = conjugate_clifford(&c, &ga)?;
    let reference = ga.multiply(&gtb).multiply(&gb);
    let ratio = image.multiply(&reference.adjoint());
    if !ratio.is_identity_up_to_phase() {
        return Err(CodeError::Invariant(format!(
            "transversal CZf image {image}"
        )));
    }
    Ok(ratio.phase())
}

/// Occupation of a single block whose projection onto `|0⟩_L` is nonzero.
fn seed_occupation(code: &StabilizerCode) -> Result<Vec<u8>, CodeError> {
    let local = relabel_to_zero(code, code.site_extent() - code.n_sites);
    let regs = Registers::new(0, local.n_sites);
    let n = local.n_sites.min(20);
    for pattern in 0u64..(1 << n) {
        let occ: Vec<u8> = (0..local.n_sites)
            .map(|i| (pattern >> i & 1) as u8)
            .collect();
        let mut s = init_state(
            &regs,
            &Occupation {
                fermions: occ.clone(),
                ..Default::default()
            },
        )?;
        s = project(&s, local.generators.iter().chain([&local.logical_parity()]))?;
        if s.norm() > 1e-3 {
            return Ok(occ);
        }
    }
    Err(CodeError::Invariant(
        "no seed state overlaps the codespace".into(),
    ))
}

fn relabel_to_zero(code: &StabilizerCode, lo: usize) -> StabilizerCode {
    let sh = |s: &Mqs| s.relabeled(|i| i - lo, |q| q);
    StabilizerCode {
        generators: code.generators.iter().map(sh).collect(),
        logical_gamma: sh(&code.logical_gamma),
        logical_gamma_tilde: sh(&code.logical_gamma_tilde),
        ..code.clone()
    }
}

/// Applies `∏ (1 + s)/2` without renormalizing.
pub fn project<'a>(
    state: &StateVector,
    strings: impl IntoIterator<Item = &'a Mqs>,
) -> Result<StateVector, CodeError> {
    let mut s = state.clone();
    let half = C64::new(0.5, 0.0);
    for g in strings {
        let gs = s.apply_string(g)?;
        s.scale(half);
        s.add_scaled(half, &gs);
    }
    Ok(s)
}

impl LogicalSetup {
    /// Encoded basis states `E|x⟩` indexed like the bare register.
    pub fn encoded_basis(&self) -> Result<Vec<StateVector>, CodeError> {
        let regs = &self.circuit.registers;
        let mut fermions = Vec::new();
        for b in &self.blocks {
            fermions.extend(seed_occupation(b)?);
        }
        let seed = init_state(
            regs,
            &Occupation {
                fermions,
                ..Default::default()
            },
        )?;
        let mut fixed: Vec<Mqs> = self.generators();
        fixed.extend(self.blocks.iter().map(|b| b.logical_parity()));
        if let Some(qb) = &self.qubit_block {
            fixed.push(qb.logical(Pauli::Z));
        }
        let mut zero = project(&seed, &fixed)?;
        if zero.norm() < 1e-6 {
            return Err(CodeError::Invariant(
                "empty joint codespace projection".into(),
            ));
        }
        zero.normalize();
        let bare_regs = self.gate.bare_registers();
        let bare = StateVector::vacuum(&bare_regs);
        let mut out = Vec::new();
        for idx in 0..bare.dim() {
            let mut s = zero.clone();
            if bare_regs.n_qubits == 1 && bare.qubit_bit(idx, 0) == 1 {
                s = s.apply_string(
                    &self
                        .qubit_block
                        .as_ref()
                        .expect("carrier")
                        .logical(Pauli::X),
                )?;
            }
            for (k, b) in self.blocks.iter().enumerate() {
                if bare.fermion_bit(idx, k) == 1 {
                    s = s.apply_sum(&b.logical_creation())?;
                }
            }
            out.push(s);
        }
        Ok(out)
    }
}

/// Bare Fock state whose occupations are the bits of computational index `x`.
fn fock_state(regs: &Registers, x: usize) -> Result<StateVector, CodeError> {
    let probe = StateVector::vacuum(regs);
    let occ = Occupation {
        qubits: (0..regs.n_qubits).map(|q| probe.qubit_bit(x, q)).collect(),
        fermions: (0..regs.n_fermions)
            .map(|f| probe.fermion_bit(x, f))
            .collect(),
        ..Default::default()
    };
    Ok(init_state(regs, &occ)?)
}

/// Largest entry of `E G − e^{iφ} G_L E` over the encoded basis, with the best
/// global phase `φ`.
pub fn round_trip_deviation(code: &StabilizerCode, gate: LogicalGate) -> Result<f64, CodeError> {
    let setup = logical_circuit(code, gate)?;
    let basis = setup.encoded_basis()?;
    let bare_regs = gate.bare_registers();
    let mut lhs = Vec::new();
    let mut rhs = Vec::new();
    let fock: Vec<StateVector> = (0..basis.len())
        .map(|x| fock_state(&bare_regs, x))
        .collect::<Result<_, _>>()?;
    for (x, ex) in basis.iter().enumerate() {
        let mut b = fock[x].clone();
        b.apply_gate(&gate.bare())?;
        let mut col =
            StateVector::from_amplitudes(ex.registers(), vec![C64::new(0.0, 0.0); ex.dim()])?;
        for (y, fy) in fock.iter().enumerate() {
            col.add_scaled(fy.inner(&b), &basis[y]);
        }
        let mut g = ex.clone();
        g.apply_circuit(&setup.circuit)?;
        lhs.push(col);
        rhs.push(g);
    }
    let overlap: C64 = lhs.iter().zip(&rhs).map(|(l, r)| l.inner(r)).sum();
    let phase = if overlap.norm() > 1e-12 {
        overlap / overlap.norm()
    } else {
        C64::new(1.0, 0.0)
    };
    let mut worst = 0.0f64;
    for (l, r) in lhs.iter_mut().zip(&rhs) {
        l.scale(phase);
        worst = worst.max(l.max_abs_diff(r));
    }
    Ok(worst)
}

#[cfg(test)]
mod tests {
    use super::super::{build_color_code, build_repetition};
    use super::*;

    #[test]
    fn repetition_logicals_verify() {
        for n in [2, 3, 4] {
            let code = build_repetition(n).unwrap();
            for g in LogicalGate::ALL {
                let r = verify_logical(&code, g).unwrap();
                assert!(
                    r.passed(),
                    "N={n} {g:?}: {:?}",
                    r.checks.iter().filter(|c| !c.passed).collect::<Vec<_>>()
                );
            }
        }
    }

    #[test]
    fn repetition_round_trips() {
        for n in [2, 3] {
            let code = build_repetition(n).unwrap();
            for g in LogicalGate::ALL {
                let d = round_trip_deviation(&code, g).unwrap();
                assert!(d < 1e-10, "N={n} {g:?}: {d}");
            }
        }
    }

    #[test]
    fn color_logicals_verify() {
        let code = build_color_code(3).unwrap();
        for g in LogicalGate::ALL {
            let r = verify_logical(&code, g).unwrap();
            assert!(
                r.passed(),
                "{g:?}: {:?}",
                r.checks.iter().filter(|c| !c.passed).collect::<Vec<_>>()
            );
        }
    }

    #[test]
    fn color_round_trips() {
        let code = build_color_code(3).unwrap();
        for g in LogicalGate::ALL {
            let d = round_trip_deviation(&code, g).unwrap();
            assert!(d < 1e-10, "{g:?}: {d}");
        }
    }

    #[test]
    fn transversal_czf_phase_is_minus_i() {
        for d in [3, 5] {
            assert_eq!(
                transversal_czf_prefactor(&build_color_code(d).unwrap()).unwrap(),
                Phase::MINUS_I
            );
        }
    }

    #[test]
    fn braid_sends_tilde_a_to_minus_gamma_b() {
        let code = build_color_code(3).unwrap();
        let s = logical_circuit(&code, LogicalGate::Braid).unwrap();
        let img = conjugate_clifford(&s.circuit, &s.blocks[0].logical_gamma_tilde).unwrap();
        assert_eq!(
            img,
            s.blocks[1].logical_gamma.clone().scaled(Phase::MINUS_ONE)
        );
    }
}
