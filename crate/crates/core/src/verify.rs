//! Named consistency checks between the symbolic engine and the dense oracle.

use serde::{Deserialize, Serialize};

use crate::circuit::{Circuit, Gate, Registers};
use crate::clifford::{braid_variant, braid_variant_generator, conjugate, BraidVariant};
use crate::codes::{self, CodeError, LogicalGate, StabilizerCode};
use crate::dense::{self, Matrix};
use crate::kl::{kl_check, Verdict};
use crate::majorana::{MajoranaQubitString as Mqs, OperatorSum, Pauli, Phase};
use crate::C64;

pub const TOL: f64 = 1e-10;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub deviation: f64,
    #[serde(default, skip_serializing_if = "String::is_empty")]
    pub detail: String,
}

impl Check {
    pub fn new(name: impl Into<String>, deviation: f64, tol: f64) -> Self {
        Self {
            name: name.into(),
            passed: deviation.is_finite() && deviation <= tol,
            deviation,
            detail: String::new(),
        }
    }

    pub fn flag(name: impl Into<String>, passed: bool, detail: impl Into<String>) -> Self {
        Self {
            name: name.into(),
            passed,
            deviation: if passed { 0.0 } else { 1.0 },
            detail: detail.into(),
        }
    }

    pub fn with_detail(mut self, d: impl Into<String>) -> Self {
        self.detail = d.into();
        self
    }
}

/// Deliberate corruption used to show a check can fail.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct FaultInjection {
    /// Name of a table row whose expected image gets its sign flipped.
    pub flip_sign_of: Option<String>,
}

fn parse_sum(terms: &[(f64, &str)]) -> OperatorSum {
    OperatorSum::from_terms(
        terms
            .iter()
            .map(|(c, s)| (C64::new(*c, 0.0), s.parse::<Mqs>().expect("valid row"))),
    )
}

/// Rows of the gate transformation table, with `i = 0`, `j = 1`, qubit 0.
fn table_rows() -> Vec<(&'static str, Gate, &'static str, OperatorSum)> {
    let h = std::f64::consts::FRAC_1_SQRT_2;
    vec![
        (
            "Tf: g_i",
            Gate::Tf { f: 0 },
            "+1 * g0",
            parse_sum(&[(h, "+1 * gt0"), (h, "+1 * g0")]),
        ),
        (
            "Tf: gt_i",
            Gate::Tf { f: 0 },
            "+1 * gt0",
            parse_sum(&[(h, "+1 * gt0"), (-h, "+1 * g0")]),
        ),
        (
            "Sf: g_i",
            Gate::Sf { f: 0 },
            "+1 * g0",
            parse_sum(&[(1.0, "+1 * gt0")]),
        ),
        (
            "Sf: gt_i",
            Gate::Sf { f: 0 },
            "+1 * gt0",
            parse_sum(&[(-1.0, "+1 * g0")]),
        ),
        (
            "Zf: g_i",
            Gate::Zf { f: 0 },
            "+1 * g0",
            parse_sum(&[(-1.0, "+1 * g0")]),
        ),
        (
            "Zf: gt_i",
            Gate::Zf { f: 0 },
            "+1 * gt0",
            parse_sum(&[(-1.0, "+1 * gt0")]),
        ),
        (
            "H: Z",
            Gate::H { q: 0 },
            "+1 * | Z:q0",
            parse_sum(&[(1.0, "+1 * | X:q0")]),
        ),
        (
            "H: X",
            Gate::H { q: 0 },
            "+1 * | X:q0",
            parse_sum(&[(1.0, "+1 * | Z:q0")]),
        ),
        (
            "Z: Z",
            Gate::Z { q: 0 },
            "+1 * | Z:q0",
            parse_sum(&[(1.0, "+1 * | Z:q0")]),
        ),
        (
            "Z: X",
            Gate::Z { q: 0 },
            "+1 * | X:q0",
            parse_sum(&[(-1.0, "+1 * | X:q0")]),
        ),
        (
            "BRAID: g_i",
            Gate::Braid { i: 0, j: 1 },
            "+1 * g0",
            parse_sum(&[(1.0, "+1 * g0")]),
        ),
        (
            "BRAID: gt_i",
            Gate::Braid { i: 0, j: 1 },
            "+1 * gt0",
            parse_sum(&[(-1.0, "+1 * g1")]),
        ),
        (
            "BRAID: g_j",
            Gate::Braid { i: 0, j: 1 },
            "+1 * g1",
            parse_sum(&[(1.0, "+1 * gt0")]),
        ),
        (
            "BRAID: gt_j",
            Gate::Braid { i: 0, j: 1 },
            "+1 * gt1",
            parse_sum(&[(1.0, "+1 * gt1")]),
        ),
        // Zf = −iγ̃γ, so γ_i Zf_j = −i γ_i γ̃_j γ_j
        (
            "CZf: g_i",
            Gate::CZf { i: 0, j: 1 },
            "+1 * g0",
            parse_sum(&[(1.0, "-i * g0 gt1 g1")]),
        ),
        (
            "CZf: gt_i",
            Gate::CZf { i: 0, j: 1 },
            "+1 * gt0",
            parse_sum(&[(1.0, "-i * gt0 gt1 g1")]),
        ),
        (
            "CZf: g_j",
            Gate::CZf { i: 0, j: 1 },
            "+1 * g1",
            parse_sum(&[(1.0, "-i * g1 gt0 g0")]),
        ),
        (
            "CZf: gt_j",
            Gate::CZf { i: 0, j: 1 },
            "+1 * gt1",
            parse_sum(&[(1.0, "-i * gt1 gt0 g0")]),
        ),
        (
            "CZqf: g_j",
            Gate::CZqf { q: 0, f: 0 },
            "+1 * g0",
            parse_sum(&[(1.0, "+1 * g0 | Z:q0")]),
        ),
        (
            "CZqf: gt_j",
            Gate::CZqf { q: 0, f: 0 },
            "+1 * gt0",
            parse_sum(&[(1.0, "+1 * gt0 | Z:q0")]),
        ),
        (
            "CZqf: Z",
            Gate::CZqf { q: 0, f: 0 },
            "+1 * | Z:q0",
            parse_sum(&[(1.0, "+1 * | Z:q0")]),
        ),
        (
            "CZqf: X",
            Gate::CZqf { q: 0, f: 0 },
            "+1 * | X:q0",
            parse_sum(&[(1.0, "-i * gt0 g0 | X:q0")]),
        ),
    ]
}

fn dense_conjugate(regs: &Registers, g: &Gate, a: &Mqs) -> Matrix {
    let u = dense::gate_unitary(regs, g);
    u.adjoint() * dense::string_matrix(regs, a) * u
}

/// Table rows: symbolic image equals the tabulated image and the dense `U†AU`.
pub fn table_checks(fault: &FaultInjection) -> Vec<Check> {
    let regs = Registers::new(1, 2);
    let mut out = Vec::new();
    for (name, g, a, expected) in table_rows() {
        let a: Mqs = a.parse().expect("valid row");
        let expected = if fault.flip_sign_of.as_deref() == Some(name) {
            expected.scale(C64::new(-1.0, 0.0))
        } else {
            expected
        };
        let sym = match conjugate(&g, &a) {
            Ok(s) => s,
            Err(e) => {
                out.push(Check::flag(format!("table {name}"), false, e.to_string()));
                continue;
            }
        };
        let d_table = sym.max_abs_diff(&expected);
        let d_dense =
            dense::max_abs(&(dense::sum_matrix(&regs, &sym) - dense_conjugate(&regs, &g, &a)));
        out.push(
            Check::new(format!("table {name}"), d_table.max(d_dense), TOL)
                .with_detail(sym.to_string()),
        );
    }
    out
}

/// Every supported gate on a 1-qubit, 3-mode register against every single
/// Majorana and Pauli letter.
pub fn exhaustive_checks() -> Vec<Check> {
    let regs = Registers::new(1, 3);
    let gates = [
        Gate::Tf { f: 1 },
        Gate::TfDag { f: 2 },
        Gate::Sf { f: 0 },
        Gate::SfDag { f: 1 },
        Gate::Zf { f: 2 },
        Gate::H { q: 0 },
        Gate::S { q: 0 },
        Gate::Z { q: 0 },
        Gate::Braid { i: 0, j: 1 },
        Gate::Braid { i: 2, j: 0 },
        Gate::Braid { i: 1, j: 2 },
        Gate::CZf { i: 0, j: 2 },
        Gate::CZf { i: 1, j: 0 },
        Gate::CZqf { q: 0, f: 1 },
    ];
    let mut ops: Vec<Mqs> = (0..3)
        .flat_map(|k| [Mqs::gamma(k), Mqs::gamma_tilde(k)])
        .collect();
    ops.extend([Pauli::X, Pauli::Y, Pauli::Z].map(|l| Mqs::pauli(0, l)));
    let mut worst = 0.0f64;
    let mut failures = Vec::new();
    for g in &gates {
        for a in &ops {
            let dev = match conjugate(g, a) {
                Ok(sym) => {
                    let single_ok =
                        g.class() != crate::circuit::GateClass::Clifford || sym.len() == 1;
                    let d = dense::max_abs(
                        &(dense::sum_matrix(&regs, &sym) - dense_conjugate(&regs, g, a)),
                    );
                    if single_ok {
                        d
                    } else {
                        f64::INFINITY
                    }
                }
                Err(_) => f64::INFINITY,
            };
            if dev.is_nan() || dev > TOL {
                failures.push(format!("{} on {}", g.kind_name(), a));
            }
            worst = worst.max(dev);
        }
    }
    vec![
        Check::new("exhaustive single-operator conjugation", worst, TOL)
            .with_detail(failures.join("; ")),
    ]
}

/// The three compiled braid variants against their target unitaries.
pub fn braid_identity_checks() -> Vec<Check> {
    let mut out = Vec::new();
    let pairs = [(0usize, 1usize), (1, 0), (0, 2), (2, 1)];
    for (kind, label) in [
        (BraidVariant::TildeTilde, "exp(-pi/4 gt_i gt_j)"),
        (BraidVariant::PlainPlain, "exp(-pi/4 g_i g_j)"),
        (BraidVariant::Inverse, "BRAID_ij^dagger"),
    ] {
        let mut worst = 0.0f64;
        for &(i, j) in &pairs {
            let regs = Registers::new(0, 3);
            let c = braid_variant(kind, i, j).expect("distinct modes");
            let c = Circuit {
                registers: regs.clone(),
                ops: c.ops,
            };
            let got = dense::circuit_unitary(&c).expect("unitary circuit");
            let target = match kind {
                BraidVariant::Inverse => {
                    dense::gate_unitary(&regs, &Gate::Braid { i, j }).adjoint()
                }
                _ => {
                    let s = dense::string_matrix(&regs, &braid_variant_generator(kind, i, j));
                    dense::expm(&(s * C64::new(-std::f64::consts::FRAC_PI_4, 0.0)))
                }
            };
            worst = worst.max(dense::distance_up_to_phase(&got, &target));
        }
        out.push(Check::new(format!("braid identity {label}"), worst, TOL));
    }
    let regs = Registers::new(0, 2);
    let inv = Circuit {
        registers: regs.clone(),
        ops: braid_variant(BraidVariant::Inverse, 0, 1).unwrap().ops,
    };
    let prod = dense::gate_unitary(&regs, &Gate::Braid { i: 0, j: 1 })
        * dense::circuit_unitary(&inv).unwrap();
    out.push(Check::new(
        "braid inverse times braid is identity",
        dense::distance_up_to_phase(&prod, &Matrix::identity(4, 4)),
        TOL,
    ));
    let swapped = dense::gate_unitary(&regs, &Gate::Braid { i: 1, j: 0 });
    let dagger = dense::gate_unitary(&regs, &Gate::Braid { i: 0, j: 1 }).adjoint();
    out.push(Check::flag(
        "BRAID_ij^dagger differs from BRAID_ji",
        dense::distance_up_to_phase(&swapped, &dagger) > 1e-3,
        "",
    ));
    out
}

fn phase_name(p: Phase) -> &'static str {
    match p {
        Phase::ONE => "+1",
        Phase::I => "+i",
        Phase::MINUS_ONE => "-1",
        _ => "-i",
    }
}

fn failed(name: impl Into<String>, e: impl std::fmt::Display) -> Check {
    Check::flag(name, false, e.to_string())
}

/// Detectability on the two-site repetition code: a number operator is
/// detectable, a single creation operator is not.
pub fn kl_checks() -> Vec<Check> {
    let run = || -> Result<Vec<Check>, CodeError> {
        let code = codes::build_repetition(2)?;
        let setup = codes::logical_circuit(&code, LogicalGate::Sf)?;
        let words = setup.encoded_basis()?;
        let block = &setup.blocks[0];
        let site = block.site_extent() - block.n_sites;
        let errors = vec![
            (format!("n{site}"), OperatorSum::number(site)),
            (format!("p{site}"), OperatorSum::annihilation(site)),
            (format!("p{site}^dagger"), OperatorSum::creation(site)),
        ];
        let reports = kl_check(&words, &errors).map_err(|e| CodeError::Invariant(e.to_string()))?;
        let want = [
            Verdict::Detectable,
            Verdict::NotDetectable,
            Verdict::NotDetectable,
        ];
        Ok(reports
            .into_iter()
            .zip(want)
            .map(|(r, w)| {
                Check::flag(
                    format!("KL two-site code {} is {:?}", r.label, w),
                    r.verdict == w,
                    format!("deviation {:.3e}", r.deviation),
                )
            })
            .collect())
    };
    run().unwrap_or_else(|e| vec![failed("KL two-site code", e)])
}

/// Distance-3 color code: 14 distinct single-Majorana syndromes, each
/// corrected back to the clean codeword.
pub fn correction_checks() -> Vec<Check> {
    let trials = match codes::build_color_code(3).and_then(|c| codes::single_majorana_trials(&c)) {
        Ok(t) => t,
        Err(e) => return vec![failed("Steane single-Majorana correction", e)],
    };
    let distinct: std::collections::BTreeSet<_> =
        trials.iter().map(|t| t.syndrome.clone()).collect();
    let worst = trials.iter().map(|t| 1.0 - t.fidelity).fold(0.0, f64::max);
    vec![
        Check::flag(
            "Steane single-Majorana syndromes distinct",
            trials.len() == 14 && distinct.len() == 14,
            format!("{} errors, {} syndromes", trials.len(), distinct.len()),
        ),
        Check::new("Steane single-Majorana correction infidelity", worst, TOL),
    ]
}

/// Repetition (N = 2, 3) and color (d = 3) logical gates: symbolic stabilizer
/// preservation and encode, gate, decode against the bare gate.
pub fn logical_checks() -> Vec<Check> {
    let gates = [
        LogicalGate::Braid,
        LogicalGate::CZf,
        LogicalGate::CZqf,
        LogicalGate::Sf,
        LogicalGate::Tf,
    ];
    let mut out = Vec::new();
    let family: Vec<(String, Result<StabilizerCode, CodeError>)> = vec![
        ("repetition N=2".into(), codes::build_repetition(2)),
        ("repetition N=3".into(), codes::build_repetition(3)),
        ("color d=3".into(), codes::build_color_code(3)),
    ];
    for (label, code) in family {
        let code = match code {
            Ok(c) => c,
            Err(e) => {
                out.push(failed(label, e));
                continue;
            }
        };
        for g in gates {
            let name = format!("logical {} on {label}", g.name());
            match codes::verify_logical(&code, g) {
                Ok(r) => {
                    let bad: Vec<String> = r
                        .checks
                        .iter()
                        .filter(|c| !c.passed)
                        .map(|c| c.name.clone())
                        .collect();
                    out.push(Check::flag(
                        format!("{name} symbolic"),
                        bad.is_empty(),
                        bad.join("; "),
                    ));
                }
                Err(e) => out.push(failed(format!("{name} symbolic"), e)),
            }
            match codes::round_trip_deviation(&code, g) {
                Ok(d) => out.push(Check::new(format!("{name} round trip"), d, TOL)),
                Err(e) => out.push(failed(format!("{name} round trip"), e)),
            }
        }
    }
    out
}

/// Transversal CZf on two color-code blocks picks up the prefactor −i.
pub fn czf_phase_checks() -> Vec<Check> {
    [3usize, 5]
        .into_iter()
        .map(|d| {
            let name = format!("transversal CZf logical phase d={d} is -i");
            match codes::build_color_code(d).and_then(|c| codes::transversal_czf_prefactor(&c)) {
                Ok(p) => Check::flag(name, p == Phase::MINUS_I, phase_name(p)),
                Err(e) => failed(name, e),
            }
        })
        .collect()
}

/// Number-code candidates fail cross-block anticommutation; repetition and
/// Steane blocks pass.
pub fn theorem_checks() -> Vec<Check> {
    let mut out = Vec::new();
    match codes::build_repetition(2).and_then(|c| codes::theorem_demo(&c)) {
        Ok(d) => {
            let n_valid = d.number_code.iter().filter(|c| c.valid).count();
            out.push(Check::flag(
                "number code: every odd-weight candidate pair fails",
                d.number_code_all_fail,
                format!("{} candidates, {n_valid} valid", d.number_code.len()),
            ));
            out.push(Check::new(
                "repetition blocks: logical creation operators anticommute",
                d.parity_code_anticommutator,
                TOL,
            ));
        }
        Err(e) => out.push(failed("theorem demonstration", e)),
    }
    match codes::build_color_code(3).and_then(|c| codes::cross_block_anticommutator(&c)) {
        Ok((anti, _)) => out.push(Check::new(
            "color d=3 blocks: logical creation operators anticommute",
            anti,
            TOL,
        )),
        Err(e) => out.push(failed("color d=3 cross-block anticommutation", e)),
    }
    out
}

/// Every suite, in report order.
pub fn full_suite(fault: &FaultInjection) -> Vec<Check> {
    let mut out = table_checks(fault);
    out.extend(exhaustive_checks());
    out.extend(braid_identity_checks());
    out.extend(kl_checks());
    out.extend(correction_checks());
    out.extend(theorem_checks());
    out.extend(logical_checks());
    out.extend(czf_phase_checks());
    out
}
