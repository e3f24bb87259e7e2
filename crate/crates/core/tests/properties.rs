use fermiqc::circuit::{Angle, Circuit, Gate, HopLabel, Registers};
use fermiqc::clifford::{conjugate, conjugate_clifford};
use fermiqc::codes::{build_color_code, build_repetition};
use fermiqc::dense;
use fermiqc::gadgets;
use fermiqc::majorana::{
    jordan_wigner, Commutation, MajoranaQubitString as Mqs, OperatorSum, Pauli, Phase,
};
use fermiqc::pairing::{Drive, Reservoir, Sector, Source};
use fermiqc::sim::{init_state, Occupation, StateVector};
use fermiqc::tomography::{reconstruct, Setting};
use fermiqc::C64;
use proptest::prelude::*;

const MODES: usize = 3;

fn pauli(k: u8) -> Pauli {
    [Pauli::X, Pauli::Y, Pauli::Z][k as usize % 3]
}

/// Raw Majorana products (unsorted, repeats allowed) times an optional
/// letter on qubit 0, with a random fourth-root phase.
fn string() -> impl Strategy<Value = (Vec<usize>, Option<u8>, u8)> {
    (
        prop::collection::vec(0..2 * MODES, 0..5),
        prop::option::of(0u8..3),
        0u8..4,
    )
}

fn build((etas, letter, ph): &(Vec<usize>, Option<u8>, u8)) -> Mqs {
    let s = Mqs::canonicalize(etas, Phase::from_power(*ph as i64));
    match letter {
        Some(l) => s.with_paulis([(0, pauli(*l))]),
        None => s,
    }
}

fn random_state(regs: &Registers, seed: &[(f64, f64)]) -> StateVector {
    let d = dense::dim(regs);
    let amps: Vec<C64> = (0..d)
        .map(|k| {
            C64::new(
                seed[k % seed.len()].0 + k as f64 * 0.1,
                seed[k % seed.len()].1,
            )
        })
        .collect();
    let mut s = StateVector::from_amplitudes(regs, amps).unwrap();
    s.normalize();
    s
}

fn clifford_gate(k: u8, a: usize, b: usize) -> Gate {
    let (a, b) = (a % MODES, b % MODES);
    let b = if a == b { (a + 1) % MODES } else { b };
    match k % 8 {
        0 => Gate::Braid { i: a, j: b },
        1 => Gate::CZf { i: a, j: b },
        2 => Gate::CZqf { q: 0, f: a },
        3 => Gate::Sf { f: a },
        4 => Gate::Zf { f: a },
        5 => Gate::H { q: 0 },
        6 => Gate::S { q: 0 },
        _ => Gate::Z { q: 0 },
    }
}

fn any_gate(k: u8, a: usize, b: usize, theta: f64) -> Gate {
    let (a, b) = (a % MODES, b % MODES);
    let b = if a == b { (a + 1) % MODES } else { b };
    let angle = Angle::radians(theta);
    match k % 12 {
        0..=7 => clifford_gate(k, a, b),
        8 => Gate::Tf { f: a },
        9 => Gate::BraidAngle { i: a, j: b, angle },
        10 => Gate::CZqfAngle { q: 0, f: a, angle },
        _ => Gate::Hop {
            label: HopLabel::TweezerDown,
            a,
            b,
            angle,
        },
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn product_order_sign_matches_commutation(a in string(), b in string()) {
        let (a, b) = (build(&a), build(&b));
        let ab = a.multiply(&b);
        let ba = b.multiply(&a);
        let want = match a.commutation(&b) {
            Commutation::Commutes => ba.clone(),
            Commutation::Anticommutes => ba.scaled(Phase::MINUS_ONE),
        };
        prop_assert_eq!(ab, want);
    }

    #[test]
    fn jordan_wigner_is_a_homomorphism(a in string(), b in string()) {
        let (a, b) = (build(&a), build(&b));
        let lhs = jordan_wigner(&a.multiply(&b), 1, MODES).unwrap();
        let rhs = jordan_wigner(&a, 1, MODES).unwrap().multiply(&jordan_wigner(&b, 1, MODES).unwrap());
        prop_assert_eq!(&lhs.letters, &rhs.letters);
        prop_assert!((lhs.phase - rhs.phase).norm() < 1e-12);
    }

    #[test]
    fn adjoint_reverses_the_product(etas in prop::collection::vec(0..2 * MODES, 0..6), ph in 0u8..4) {
        let phase = Phase::from_power(ph as i64);
        let mut rev = etas.clone();
        rev.reverse();
        prop_assert_eq!(Mqs::canonicalize(&etas, phase).adjoint(), Mqs::canonicalize(&rev, phase.conj()));
    }

    #[test]
    fn clifford_circuits_keep_strings_single(
        gates in prop::collection::vec((0u8..8, 0..MODES, 0..MODES), 1..8),
        s in string(),
    ) {
        let regs = Registers::new(1, MODES);
        let mut c = Circuit::new(regs.clone());
        c.gates(gates.iter().map(|&(k, a, b)| clifford_gate(k, a, b)));
        let s = build(&s);
        let image = conjugate_clifford(&c, &s).unwrap();
        let u = dense::circuit_unitary(&c).unwrap();
        let want = u.adjoint() * dense::string_matrix(&regs, &s) * &u;
        prop_assert!(dense::max_abs(&(dense::string_matrix(&regs, &image) - want)) < 1e-10);
    }

    #[test]
    fn symbolic_expectations_follow_the_state(
        k in 0u8..8, a in 0..MODES, b in 0..MODES, s in string(),
        seed in prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), 4),
    ) {
        let regs = Registers::new(1, MODES);
        let g = clifford_gate(k, a, b);
        let s = build(&s);
        let psi = random_state(&regs, &seed);
        let mut evolved = psi.clone();
        evolved.apply_gate(&g).unwrap();
        let heis = conjugate(&g, &s).unwrap();
        let lhs = evolved.expectation(&OperatorSum::from_string(s)).unwrap();
        let rhs = psi.expectation(&heis).unwrap();
        prop_assert!((lhs - rhs).norm() < 1e-10);
    }

    #[test]
    fn gates_preserve_the_norm(
        k in 0u8..12, a in 0..MODES, b in 0..MODES, theta in -3.2f64..3.2,
        seed in prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), 5),
    ) {
        let regs = Registers::new(1, MODES);
        let mut psi = random_state(&regs, &seed);
        psi.apply_gate(&any_gate(k, a, b, theta)).unwrap();
        prop_assert!((psi.norm() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn molecules_plus_pairs_are_conserved(
        n in 0usize..4, theta in -1.6f64..1.6, phase in -3.2f64..3.2, n_mean in 0.5f64..4.0,
    ) {
        // fermions [up, down], bosons [storage, tweezer]
        let cut = n + 2;
        let regs = Registers::new(0, 2).with_bosons(vec![cut, cut]);
        let mut psi = init_state(&regs, &Occupation { bosons: vec![n, 0], ..Default::default() }).unwrap();
        let mut c = Circuit::new(regs.clone());
        c.gate(Gate::BeamSplitter { a: 1, b: 0, angle: Angle::radians(theta) })
            .gate(Gate::Dissociate { boson: 1, up: 0, down: 1, n_mean, phase: Angle::radians(phase) })
            .gate(Gate::BeamSplitter { a: 1, b: 0, angle: Angle::radians(-theta) });
        psi.apply_circuit(&c).unwrap();
        let mut total = 0.0;
        let mut spread = 0.0f64;
        for (idx, amp) in psi.amplitudes().iter().enumerate() {
            let w = amp.norm_sqr();
            if w < 1e-24 {
                continue;
            }
            let q = psi.boson_number(idx, 0) + psi.boson_number(idx, 1) + psi.fermion_bit(idx, 0) as usize;
            spread = spread.max((q as f64 - n as f64).abs() * w);
            total += w;
        }
        prop_assert!(spread < 1e-12);
        prop_assert!((total - 1.0).abs() < 1e-12);
    }

    #[test]
    fn tomography_recovers_pure_states(
        re in prop::collection::vec(-1.0f64..1.0, 2), im in prop::collection::vec(-1.0f64..1.0, 2),
    ) {
        let mut v: Vec<C64> = re.iter().zip(&im).map(|(r, i)| C64::new(*r, *i)).collect();
        let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        prop_assume!(norm > 1e-3);
        v.iter_mut().for_each(|z| *z /= norm);
        let labels: Vec<String> = vec!["00".into(), "11".into()];
        let rotations = [
            dense::Matrix::identity(2, 2),
            fermiqc::pairing::ideal_pulse(0.0),
            fermiqc::pairing::ideal_pulse(std::f64::consts::FRAC_PI_2),
        ];
        let settings: Vec<Setting> = rotations
            .iter()
            .map(|r| {
                let out = r * nalgebra_vec(&v);
                Setting { rotation: r.clone(), populations: out.iter().map(|z| z.norm_sqr()).collect() }
            })
            .collect();
        let rho = reconstruct(&labels, &settings).unwrap();
        for r in 0..2 {
            for c in 0..2 {
                prop_assert!((rho.matrix[r][c] - v[r] * v[c].conj()).norm() < 1e-9);
            }
        }
    }

    #[test]
    fn sector_evolution_stays_normalized(
        total in 0usize..300, split in 0.0f64..1.0, steps in prop::collection::vec((0u8..3, -3.2f64..3.2), 0..6),
    ) {
        let n1 = split * total as f64;
        let res = Reservoir { n1, n2: total as f64 - n1, source: Source::Fock };
        let mut s = Sector::split(total, res.angle(), [res.n1, res.n2]);
        for (d, phi) in steps {
            match d {
                0 => s.pulse(Drive::First, phi),
                1 => s.pulse(Drive::Second, phi),
                _ => s.phase(phi),
            }
        }
        let [p0, p1] = s.populations();
        prop_assert!((p0 + p1 - 1.0).abs() < 1e-10);
    }

    #[test]
    fn controlled_hopping_transfers_with_either_control(jdt in -3.0f64..3.0, control in 0u8..2) {
        let regs = Registers::new(1, 2);
        let mut c = Circuit::new(regs.clone());
        c.gates(gadgets::controlled_hopping(0, 0, 1, Angle::radians(jdt)).unwrap());
        let mut psi = init_state(&regs, &Occupation { qubits: vec![control], fermions: vec![1, 0], ..Default::default() }).unwrap();
        psi.apply_circuit(&c).unwrap();
        let moved = init_state(&regs, &Occupation { qubits: vec![control], fermions: vec![0, 1], ..Default::default() }).unwrap();
        prop_assert!((moved.fidelity(&psi) - jdt.sin().powi(2)).abs() < 1e-10);
    }
}

fn nalgebra_vec(v: &[C64]) -> dense::Matrix {
    dense::Matrix::from_column_slice(v.len(), 1, v)
}

#[test]
fn built_codes_satisfy_their_algebra() {
    let mut codes: Vec<_> = (2..=6).map(|n| build_repetition(n).unwrap()).collect();
    codes.extend([3, 5].map(|d| build_color_code(d).unwrap()));
    for code in codes {
        for (a, g) in code.generators.iter().enumerate() {
            for h in &code.generators[a + 1..] {
                assert!(g.commutes_with(h), "{g} vs {h}");
            }
            assert!(
                g.commutes_with(&code.logical_gamma) && g.commutes_with(&code.logical_gamma_tilde)
            );
        }
        assert_eq!(code.logical_gamma.weight() % 2, 1);
        assert_eq!(code.logical_gamma_tilde.weight() % 2, 1);
        assert!(!code.logical_gamma.commutes_with(&code.logical_gamma_tilde));
    }
}
