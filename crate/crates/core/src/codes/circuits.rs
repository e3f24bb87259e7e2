//! Encoding, syndrome extraction, decoding and correction circuits.

use std::collections::BTreeMap;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{CodeError, CodeFamily, StabilizerCode};
use crate::circuit::{Circuit, Gate, Op, Reg, Registers};
use crate::clifford::{braid_variant_gates, conjugate_clifford, BraidVariant};
use crate::gf2::{self, Bits, StabilizerGroup};
use crate::majorana::{MajoranaQubitString as Mqs, Phase};
use crate::sim::{Records, StateVector};

/// Register layout shared by the code circuits: one syndrome qubit per
/// generator and one spare fermion site after the code block.
#[derive(Clone, Debug, PartialEq)]
pub struct Workspace {
    pub registers: Registers,
    pub ancilla_site: usize,
    pub syndrome_qubits: Vec<usize>,
}

pub fn workspace(code: &StabilizerCode) -> Workspace {
    let m = code.n_generators();
    let sites = code.site_extent();
    Workspace {
        registers: Registers::new(m, sites + 1),
        ancilla_site: sites,
        syndrome_qubits: (0..m).collect(),
    }
}

/// Circuit `V` on sites `a`, `b` with `V† Zf_a V = ± i m_x m_y`, where `m_x`
/// sits on `a` and `m_y` on `b`.
pub(crate) fn pair_to_parity(mx: usize, my: usize) -> Vec<Gate> {
    let (a, b) = (mx / 2, my / 2);
    if a == b {
        return Vec::new();
    }
    let variant = match (mx % 2, my % 2) {
        (0, 0) => return vec![Gate::Braid { i: a, j: b }],
        (1, 1) => return vec![Gate::Braid { i: b, j: a }],
        (1, 0) => BraidVariant::PlainPlain,
        _ => BraidVariant::TildeTilde,
    };
    braid_variant_gates(variant, a, b).expect("distinct sites")
}

/// Gates realizing `controlled-g` on qubit `q` for an even, Hermitian,
/// fermion-only string `g`: basis change, `CZqf` on one site per Majorana
/// pair, basis change back, and a `Z` on the control if a sign is left over.
pub fn controlled_string(q: usize, g: &Mqs) -> Result<Vec<Gate>, CodeError> {
    if !g.paulis().is_empty() || g.weight() % 2 == 1 || !g.is_hermitian() {
        return Err(CodeError::Unsupported(format!("controlled {g}")));
    }
    let etas = g.majoranas();
    let mut pairs: Vec<(usize, usize)> = Vec::new();
    let mut singles: Vec<usize> = Vec::new();
    let mut k = 0;
    while k < etas.len() {
        if k + 1 < etas.len() && etas[k] / 2 == etas[k + 1] / 2 {
            pairs.push((etas[k], etas[k + 1]));
            k += 2;
        } else {
            singles.push(etas[k]);
            k += 1;
        }
    }
    pairs.extend(singles.chunks(2).map(|c| (c[0], c[1])));
    let mut basis = Vec::new();
    let mut image = Mqs::identity();
    let regs = Registers::new(0, g.fermion_extent());
    for &(mx, my) in &pairs {
        let v = pair_to_parity(mx, my);
        let mut c = Circuit::new(regs.clone());
        c.gates(v.iter().cloned());
        image = image.multiply(&conjugate_clifford(&c, &Mqs::parity(mx / 2))?);
        basis.extend(v);
    }
    let ratio = image.multiply(g);
    let sign = StabilizerGroup::new(&[], g.fermion_extent(), 0)
        .membership(&ratio)
        .ok_or_else(|| CodeError::Unsupported(format!("basis change for {g}")))?;
    let mut out = basis.clone();
    out.extend(pairs.iter().map(|&(mx, _)| Gate::CZqf { q, f: mx / 2 }));
    out.extend(basis.iter().rev().flat_map(|g| g.inverse()));
    match sign {
        Phase::ONE => {}
        Phase::MINUS_ONE => out.push(Gate::Z { q }),
        _ => {
            return Err(CodeError::Unsupported(format!(
                "non-Hermitian ratio for {g}"
            )))
        }
    }
    Ok(out)
}

/// Hadamard test of every generator; record `k` reads 0 for eigenvalue +1.
pub fn syndrome_ops(
    code: &StabilizerCode,
    qubits: &[usize],
    first_record: usize,
) -> Result<Vec<Op>, CodeError> {
    let mut ops = Vec::new();
    for (k, g) in code.generators.iter().enumerate() {
        let q = qubits[k];
        ops.push(Op::Gate {
            gate: Gate::H { q },
        });
        ops.extend(
            controlled_string(q, g)?
                .into_iter()
                .map(|gate| Op::Gate { gate }),
        );
        ops.push(Op::Gate {
            gate: Gate::H { q },
        });
        ops.push(Op::Measure {
            reg: Reg::Qubit(q),
            record: first_record + k,
        });
    }
    Ok(ops)
}

pub fn syndrome_circuit(code: &StabilizerCode) -> Result<Circuit, CodeError> {
    let ws = workspace(code);
    let mut c = Circuit::new(ws.registers.clone());
    for op in syndrome_ops(code, &ws.syndrome_qubits, 0)? {
        c.push(op);
    }
    Ok(c)
}

/// Syndrome bits read from measurement records `first..first + n`.
pub fn syndrome_from_records(records: &Records, first: usize, n: usize) -> Vec<u8> {
    (first..first + n)
        .map(|k| records.get(&k).copied().unwrap_or(0))
        .collect()
}

/// Gates applying a single Majorana `m_i` via the spare site `a`:
/// `(BRAID_ai)² = γ_i γ̃_a` and the tilde analogue, followed by resetting `a`.
pub fn fixup_ops(fixup: &Mqs, ancilla_site: usize) -> Result<Vec<Op>, CodeError> {
    let a = ancilla_site;
    let g = |gate| Op::Gate { gate };
    let mut ops = Vec::new();
    let etas = fixup.majoranas();
    match etas {
        [] => {}
        [eta] => {
            let i = eta / 2;
            let gates = if eta % 2 == 0 {
                vec![Gate::Braid { i: a, j: i }; 2]
            } else {
                let mut v = braid_variant_gates(BraidVariant::TildeTilde, a, i)?;
                v.extend(v.clone());
                v
            };
            ops.extend(gates.into_iter().map(g));
            ops.push(Op::Reset {
                reg: Reg::Fermion(a),
            });
        }
        [x, y] if x / 2 == y / 2 => ops.push(g(Gate::Zf { f: x / 2 })),
        _ => {
            for &eta in etas {
                ops.extend(fixup_ops(&Mqs::canonicalize(&[eta], Phase::ONE), a)?);
            }
        }
    }
    Ok(ops)
}

/// Lookup from syndrome to correction, each correction a list of single
/// Majoranas or single-site parities.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct SyndromeTable {
    pub entries: BTreeMap<String, Vec<Mqs>>,
}

fn bits_key(s: &[u8]) -> String {
    s.iter().map(|b| char::from(b'0' + b)).collect()
}

impl SyndromeTable {
    /// Identity plus every single-Majorana error on the code sites.
    pub fn single_majorana(code: &StabilizerCode) -> Self {
        let lo = code.site_extent() - code.n_sites;
        let mut entries = BTreeMap::new();
        entries.insert(bits_key(&vec![0; code.n_generators()]), Vec::new());
        for eta in 2 * lo..2 * (lo + code.n_sites) {
            let e = Mqs::canonicalize(&[eta], Phase::ONE);
            entries
                .entry(bits_key(&code.syndrome_of(&e)))
                .or_insert_with(|| vec![e]);
        }
        Self { entries }
    }

    pub fn lookup(&self, syndrome: &[u8]) -> Option<&Vec<Mqs>> {
        self.entries.get(&bits_key(syndrome))
    }
}

/// Minimum-weight `Zf` pattern with the given domain walls; ties go to the
/// pattern whose support starts at the lower site.
fn repetition_decode(n: usize, syndrome: &[u8]) -> Vec<usize> {
    let walk = |x0: u8| {
        let mut x = vec![x0];
        for &s in syndrome {
            x.push(x.last().unwrap() ^ s);
        }
        x
    };
    let support = |x: Vec<u8>| -> Vec<usize> { (0..n).filter(|&k| x[k] == 1).collect() };
    let a = support(walk(0));
    let b = support(walk(1));
    if (b.len(), &b) < (a.len(), &a) {
        b
    } else {
        a
    }
}

/// Correction for a measured syndrome (bit 1 = generator read −1).
///
/// Repetition codes decode `Zf` errors; color codes decode the γ and γ̃
/// halves independently by single-Majorana lookup, which is exact at d = 3.
/// Larger color codes only detect.
pub fn decode(code: &StabilizerCode, syndrome: &[u8]) -> Result<Vec<Mqs>, CodeError> {
    if syndrome.len() != code.n_generators() {
        return Err(CodeError::Mismatch(syndrome.len(), code.n_generators()));
    }
    if syndrome.iter().all(|&b| b == 0) {
        return Ok(Vec::new());
    }
    let lo = code.site_extent() - code.n_sites;
    match code.family {
        CodeFamily::Repetition { n } => Ok(repetition_decode(n, syndrome)
            .into_iter()
            .map(|k| Mqs::parity(lo + k))
            .collect()),
        CodeFamily::Color { d: 3 } | CodeFamily::Css => {
            let table = SyndromeTable::single_majorana(code);
            let half = code.n_generators() / 2;
            let mut out = Vec::new();
            for part in [0, 1] {
                let mut s = vec![0u8; syndrome.len()];
                s[part * half..(part + 1) * half]
                    .copy_from_slice(&syndrome[part * half..(part + 1) * half]);
                if s.contains(&1) {
                    let fix = table
                        .lookup(&s)
                        .ok_or_else(|| CodeError::Uncorrectable(bits_key(syndrome)))?;
                    out.extend(fix.iter().cloned());
                }
            }
            Ok(out)
        }
        CodeFamily::Color { .. } => Err(CodeError::Uncorrectable(bits_key(syndrome))),
    }
}

pub fn correction_circuit(ws: &Workspace, fixups: &[Mqs]) -> Result<Circuit, CodeError> {
    let mut c = Circuit::new(ws.registers.clone());
    for f in fixups {
        for op in fixup_ops(f, ws.ancilla_site)? {
            c.push(op);
        }
    }
    Ok(c)
}

/// Even-weight string flipping generator `k` only, commuting with both logicals.
pub fn destabilizer(code: &StabilizerCode, k: usize) -> Option<Mqs> {
    let lo = code.site_extent() - code.n_sites;
    let n = code.n_sites;
    let g = &code.generators[k];
    let offset = g.majoranas()[0] % 2;
    if g.majoranas().iter().any(|e| e % 2 != offset) {
        return None;
    }
    // unknowns: which same-type Majoranas to include
    let candidate = |i: usize| Mqs::canonicalize(&[2 * (lo + i) + offset], Phase::ONE);
    let mut columns: Vec<Bits> = Vec::new();
    for i in 0..n {
        let e = candidate(i);
        let mut col = code.syndrome_of(&e);
        col.push(1); // weight parity
        columns.push(col);
    }
    let mut target = vec![0u8; code.n_generators() + 1];
    target[k] = 1;
    let x = gf2::solve(&columns, &target)?;
    let etas: Vec<usize> = (0..n)
        .filter(|&i| x[i] == 1)
        .map(|i| 2 * (lo + i) + offset)
        .collect();
    Some(Mqs::canonicalize(&etas, Phase::ONE))
}

/// Gates applying an even product of same-type Majoranas up to phase, two at a
/// time: `exp(−π/2 m_a m_b) = −m_a m_b`.
fn even_string_gates(s: &Mqs) -> Vec<Gate> {
    let mut out = Vec::new();
    for pair in s.majoranas().chunks(2) {
        let (a, b) = (pair[0] / 2, pair[1] / 2);
        let kind = if pair[0] % 2 == 0 {
            BraidVariant::PlainPlain
        } else {
            BraidVariant::TildeTilde
        };
        let v = braid_variant_gates(kind, a, b).expect("distinct sites");
        out.extend(v.clone());
        out.extend(v);
    }
    out
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PrepMode {
    /// conditioned corrections bring every generator to +1
    Corrected,
    /// outcomes are left as a sign frame
    Tracked,
}

/// Braid chain mapping the vacuum to `|0⟩_L` of a repetition code.
fn repetition_encoder(code: &StabilizerCode, regs: &Registers) -> Result<Circuit, CodeError> {
    let n = code.n_sites;
    let lo = code.site_extent() - n;
    let vacuum = StabilizerGroup::new(
        &(lo..lo + n).map(Mqs::parity).collect::<Vec<_>>(),
        code.site_extent(),
        regs.n_qubits,
    );
    let targets: Vec<Mqs> = code
        .generators
        .iter()
        .cloned()
        .chain([code.logical_parity()])
        .collect();
    for descending in [false, true] {
        for dirs in 0..(1u32 << (n - 1)) {
            let mut c = Circuit::new(regs.clone());
            for step in 0..n - 1 {
                let k = if descending { n - 2 - step } else { step };
                let (i, j) = if dirs >> k & 1 == 1 {
                    (k + 1, k)
                } else {
                    (k, k + 1)
                };
                c.gates(braid_variant_gates(
                    BraidVariant::PlainPlain,
                    lo + i,
                    lo + j,
                )?);
            }
            let ok = targets.iter().all(|t| {
                conjugate_clifford(&c, t)
                    .ok()
                    .and_then(|im| vacuum.membership(&im))
                    == Some(Phase::ONE)
            });
            if ok {
                return Ok(c);
            }
        }
    }
    Err(CodeError::Unsupported("repetition encoder".into()))
}

/// Measurement-based preparation of `|0⟩_L` from the vacuum.
///
/// The spare site first donates a fermion when the vacuum sits in the odd
/// logical sector, then every generator is measured and, in corrected mode,
/// a destabilizer is applied on each −1 outcome and the ancilla qubit reset.
pub fn preparation_circuit(code: &StabilizerCode, mode: PrepMode) -> Result<Circuit, CodeError> {
    let ws = workspace(code);
    let mut c = Circuit::new(ws.registers.clone());
    let lo = code.site_extent() - code.n_sites;
    if code.transversal_parity_sign() == Phase::MINUS_ONE {
        c.gates([
            Gate::Braid {
                i: ws.ancilla_site,
                j: lo,
            },
            Gate::Braid {
                i: ws.ancilla_site,
                j: lo,
            },
        ]);
        c.push(Op::Reset {
            reg: Reg::Fermion(ws.ancilla_site),
        });
    }
    for op in syndrome_ops(code, &ws.syndrome_qubits, 0)? {
        c.push(op);
    }
    if mode == PrepMode::Corrected {
        for k in 0..code.n_generators() {
            let d = destabilizer(code, k)
                .ok_or_else(|| CodeError::Unsupported(format!("destabilizer {k}")))?;
            for gate in even_string_gates(&d) {
                c.push(Op::Conditioned {
                    record: k,
                    value: 1,
                    gate,
                });
            }
            c.push(Op::Conditioned {
                record: k,
                value: 1,
                gate: Gate::X {
                    q: ws.syndrome_qubits[k],
                },
            });
        }
    }
    Ok(c)
}

/// Circuit taking the workspace vacuum to `|0⟩_L`.
pub fn encoding_circuit(code: &StabilizerCode) -> Result<Circuit, CodeError> {
    match code.family {
        CodeFamily::Repetition { .. } => repetition_encoder(code, &workspace(code).registers),
        _ => preparation_circuit(code, PrepMode::Corrected),
    }
}

/// Outcome of injecting one error into the encoded `|0⟩_L`, extracting the
/// syndrome, decoding and applying the correction.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CorrectionTrial {
    pub error: Mqs,
    pub syndrome: Vec<u8>,
    pub correction: Vec<Mqs>,
    /// overlap of the corrected fermion state with the clean codeword
    pub fidelity: f64,
}

/// Every single-Majorana error on the code sites, run through the full
/// syndrome and correction circuits on the exact simulator.
pub fn single_majorana_trials(code: &StabilizerCode) -> Result<Vec<CorrectionTrial>, CodeError> {
    let ws = workspace(code);
    let mut clean = StateVector::vacuum(&ws.registers);
    clean.run(&encoding_circuit(code)?, &mut ChaCha8Rng::seed_from_u64(0))?;
    let syn = syndrome_circuit(code)?;
    let lo = code.site_extent() - code.n_sites;
    let mut out = Vec::new();
    for eta in 2 * lo..2 * (lo + code.n_sites) {
        let error = Mqs::canonicalize(&[eta], Phase::ONE);
        let syndrome = code.syndrome_of(&error);
        let mut s = clean.apply_string(&error)?;
        let forced: Records = syndrome.iter().enumerate().map(|(k, &b)| (k, b)).collect();
        s.run_branch(&syn, &forced)?;
        let correction = decode(code, &syndrome)?;
        s.run_branch(&correction_circuit(&ws, &correction)?, &Records::new())?;
        for (k, &b) in syndrome.iter().enumerate() {
            if b == 1 {
                s.apply_gate(&Gate::X {
                    q: ws.syndrome_qubits[k],
                })?;
            }
        }
        let fidelity = s.fidelity(&clean);
        out.push(CorrectionTrial {
            error,
            syndrome,
            correction,
            fidelity,
        });
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::super::{build_color_code, build_repetition};
    use super::*;
    use crate::majorana::OperatorSum;
    use crate::sim::{init_state, Occupation};
    use crate::C64;

    fn expect(s: &StateVector, m: &Mqs) -> f64 {
        s.expectation(&OperatorSum::from_string(m.clone()))
            .unwrap()
            .re
    }

    #[test]
    fn two_site_encoding_state() {
        let code = build_repetition(2).unwrap();
        let c = encoding_circuit(&code).unwrap();
        let regs = c.registers.clone();
        let mut s = StateVector::vacuum(&regs);
        s.apply_circuit(&c).unwrap();
        let occ = |f: Vec<u8>| Occupation {
            fermions: f,
            ..Default::default()
        };
        let mut want = init_state(&regs, &occ(vec![0, 0, 0])).unwrap();
        want.add_scaled(
            C64::new(-1.0, 0.0),
            &init_state(&regs, &occ(vec![1, 1, 0])).unwrap(),
        );
        want.normalize();
        assert!(s.distance_up_to_phase(&want) < 1e-10);
    }

    #[test]
    fn repetition_encoding_stabilized() {
        for n in 2..=5 {
            let code = build_repetition(n).unwrap();
            let c = encoding_circuit(&code).unwrap();
            let mut s = StateVector::vacuum(&c.registers);
            s.apply_circuit(&c).unwrap();
            for g in &code.generators {
                assert!((expect(&s, g) - 1.0).abs() < 1e-10);
            }
            assert!((expect(&s, &code.logical_parity()) - 1.0).abs() < 1e-10);
        }
    }

    #[test]
    fn steane_prepared_in_every_branch() {
        let code = build_color_code(3).unwrap();
        let c = encoding_circuit(&code).unwrap();
        let mut seen = std::collections::BTreeSet::new();
        for seed in 0..8 {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let mut s = StateVector::vacuum(&c.registers);
            seen.insert(s.run(&c, &mut rng).unwrap());
            for g in &code.generators {
                assert!((expect(&s, g) - 1.0).abs() < 1e-10, "{g}");
            }
            let n_l = code.logical_annihilation();
            let n_l = code.logical_creation().multiply(&n_l);
            assert!(s.expectation(&n_l).unwrap().norm() < 1e-10);
        }
        assert!(seen.len() > 1, "corrections were exercised");
    }

    #[test]
    fn syndrome_detects_parity_errors() {
        let code = build_repetition(3).unwrap();
        let mut s = StateVector::vacuum(&workspace(&code).registers);
        s.apply_circuit(&encoding_circuit(&code).unwrap()).unwrap();
        s.apply_gate(&Gate::Zf { f: 1 }).unwrap();
        let syn = syndrome_circuit(&code).unwrap();
        let mut t = s.clone();
        let (_, p) = t
            .run_branch(&syn, &[(0, 1), (1, 1)].into_iter().collect())
            .unwrap();
        assert!((p - 1.0).abs() < 1e-10);
        assert_eq!(code.syndrome_of(&Mqs::parity(1)), vec![1, 1]);
    }

    #[test]
    fn repetition_decoder_rules() {
        let code = build_repetition(3).unwrap();
        assert!(decode(&code, &[0, 0]).unwrap().is_empty());
        assert_eq!(decode(&code, &[1, 0]).unwrap(), vec![Mqs::parity(0)]);
        assert_eq!(decode(&code, &[1, 1]).unwrap(), vec![Mqs::parity(1)]);
        assert_eq!(decode(&code, &[0, 1]).unwrap(), vec![Mqs::parity(2)]);
        assert_eq!(
            decode(&build_repetition(2).unwrap(), &[1]).unwrap(),
            vec![Mqs::parity(0)]
        );
    }

    #[test]
    fn steane_corrects_each_single_majorana() {
        let trials = single_majorana_trials(&build_color_code(3).unwrap()).unwrap();
        assert_eq!(trials.len(), 14);
        let distinct: std::collections::BTreeSet<_> =
            trials.iter().map(|t| t.syndrome.clone()).collect();
        assert_eq!(distinct.len(), 14);
        for t in &trials {
            assert_eq!(t.correction, vec![t.error.clone()]);
            assert!(t.fidelity > 1.0 - 1e-10, "{}: {}", t.error, t.fidelity);
        }
    }
}
