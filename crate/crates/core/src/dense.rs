//! Explicit matrices for small registers.
//!
//! Operators here are assembled from creation/annihilation matrices and gate
//! unitaries come from matrix exponentials of their defining generators. This
//! route shares nothing with the string algebra or the state-vector kernels,
//! which makes it usable as a reference for both.

use nalgebra::DMatrix;
use num_complex::Complex64 as C64;

use crate::circuit::{Circuit, Gate, Op, Registers};
use crate::majorana::{
    MajoranaIndex, MajoranaKind, MajoranaQubitString as Mqs, OperatorSum, Pauli,
};
use crate::sim::{SimError, StateVector};

pub type Matrix = DMatrix<C64>;

fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

fn eye(n: usize) -> Matrix {
    Matrix::identity(n, n)
}

fn kron(a: &Matrix, b: &Matrix) -> Matrix {
    a.kronecker(b)
}

/// Local factors, one per register slot, multiplied out as a tensor product.
fn embed(regs: &Registers, slot: usize, local: &Matrix, left_fill: &Matrix) -> Matrix {
    let n_bin = regs.n_qubits + regs.n_fermions;
    let mut out = eye(1);
    for k in 0..n_bin {
        let f = if k == slot {
            local.clone()
        } else if k < slot && k >= regs.n_qubits {
            left_fill.clone()
        } else {
            eye(2)
        };
        out = kron(&out, &f);
    }
    for (m, &cut) in regs.boson_cutoffs.iter().enumerate() {
        let f = if n_bin + m == slot {
            local.clone()
        } else {
            eye(cut + 1)
        };
        out = kron(&out, &f);
    }
    out
}

fn z2() -> Matrix {
    Matrix::from_row_slice(2, 2, &[c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(-1.0, 0.0)])
}

/// `|1⟩⟨0|`
fn raise2() -> Matrix {
    Matrix::from_row_slice(2, 2, &[c(0.0, 0.0), c(0.0, 0.0), c(1.0, 0.0), c(0.0, 0.0)])
}

pub fn pauli_matrix(l: Pauli) -> Matrix {
    let (o, l1, i) = (c(0.0, 0.0), c(1.0, 0.0), c(0.0, 1.0));
    match l {
        Pauli::X => Matrix::from_row_slice(2, 2, &[o, l1, l1, o]),
        Pauli::Y => Matrix::from_row_slice(2, 2, &[o, -i, i, o]),
        Pauli::Z => z2(),
    }
}

pub fn dim(regs: &Registers) -> usize {
    (1usize << (regs.n_qubits + regs.n_fermions))
        * regs.boson_cutoffs.iter().map(|c| c + 1).product::<usize>()
}

/// `p_f†` with its sign tail over lower modes.
pub fn creation(regs: &Registers, f: usize) -> Matrix {
    embed(regs, regs.n_qubits + f, &raise2(), &z2())
}

pub fn annihilation(regs: &Registers, f: usize) -> Matrix {
    creation(regs, f).adjoint()
}

pub fn number(regs: &Registers, f: usize) -> Matrix {
    creation(regs, f) * annihilation(regs, f)
}

/// `|1⟩⟨1|` on a qubit.
pub fn qubit_number(regs: &Registers, q: usize) -> Matrix {
    let n = raise2() * raise2().adjoint();
    embed(regs, q, &n, &eye(2))
}

pub fn qubit_op(regs: &Registers, q: usize, m: &Matrix) -> Matrix {
    embed(regs, q, m, &eye(2))
}

/// Boson creation on mode `m`, truncated at its cutoff.
pub fn boson_creation(regs: &Registers, m: usize) -> Matrix {
    let cut = regs.boson_cutoffs[m];
    let mut a = Matrix::zeros(cut + 1, cut + 1);
    for n in 0..cut {
        a[(n + 1, n)] = c(((n + 1) as f64).sqrt(), 0.0);
    }
    embed(regs, regs.n_qubits + regs.n_fermions + m, &a, &eye(2))
}

/// `γ_i = p_i + p_i†`, `γ̃_i = −i(p_i† − p_i)`.
pub fn majorana(regs: &Registers, m: MajoranaIndex) -> Matrix {
    let cd = creation(regs, m.site);
    let a = cd.adjoint();
    match m.kind {
        MajoranaKind::Gamma => &cd + &a,
        MajoranaKind::GammaTilde => (&cd - &a) * c(0.0, -1.0),
    }
}

pub fn string_matrix(regs: &Registers, s: &Mqs) -> Matrix {
    let d = dim(regs);
    let mut out = eye(d) * s.phase().to_complex();
    for &eta in s.majoranas() {
        out *= majorana(regs, MajoranaIndex::unflatten(eta));
    }
    for (&q, &l) in s.paulis() {
        out *= qubit_op(regs, q, &pauli_matrix(l));
    }
    out
}

pub fn sum_matrix(regs: &Registers, o: &OperatorSum) -> Matrix {
    let d = dim(regs);
    let mut out = Matrix::zeros(d, d);
    for (k, s) in o.terms() {
        out += string_matrix(regs, s) * *k;
    }
    out
}

pub fn expm(m: &Matrix) -> Matrix {
    m.clone().exp()
}

fn i_times(m: Matrix, x: f64) -> Matrix {
    m * c(0.0, x)
}

/// Gate unitary from its defining generator.
pub fn gate_unitary(regs: &Registers, g: &Gate) -> Matrix {
    use std::f64::consts::PI;
    let phase = |f: usize, theta: f64| expm(&i_times(number(regs, f), theta));
    let qphase = |q: usize, theta: f64| expm(&i_times(qubit_number(regs, q), theta));
    // i (p_i† − p_i)(p_j† + p_j), the braid generator
    let braid_gen = |i: usize, j: usize| {
        let (ci, cj) = (creation(regs, i), creation(regs, j));
        i_times((&ci - ci.adjoint()) * (&cj + cj.adjoint()), 1.0)
    };
    let hop = |a: usize, b: usize| {
        let (ca, cb) = (creation(regs, a), creation(regs, b));
        &ca * cb.adjoint() + &cb * ca.adjoint()
    };
    match *g {
        Gate::Tf { f } => phase(f, PI / 4.0),
        Gate::TfDag { f } => phase(f, -PI / 4.0),
        Gate::Sf { f } => phase(f, PI / 2.0),
        Gate::SfDag { f } => phase(f, -PI / 2.0),
        Gate::Zf { f } => phase(f, PI),
        Gate::PhaseF { f, angle } => phase(f, angle.value()),
        Gate::H { q } => {
            let h = std::f64::consts::FRAC_1_SQRT_2;
            qubit_op(
                regs,
                q,
                &Matrix::from_row_slice(2, 2, &[c(h, 0.0), c(h, 0.0), c(h, 0.0), c(-h, 0.0)]),
            )
        }
        Gate::S { q } => qphase(q, PI / 2.0),
        Gate::SDag { q } => qphase(q, -PI / 2.0),
        Gate::Z { q } => qubit_op(regs, q, &z2()),
        Gate::X { q } => qubit_op(regs, q, &pauli_matrix(Pauli::X)),
        Gate::T { q } => qphase(q, PI / 4.0),
        Gate::TDag { q } => qphase(q, -PI / 4.0),
        Gate::PhaseQ { q, angle } => qphase(q, angle.value()),
        Gate::Xrot { q, angle } => expm(&i_times(
            qubit_op(regs, q, &pauli_matrix(Pauli::X)),
            -angle.value() / 2.0,
        )),
        Gate::Braid { i, j } => expm(&(braid_gen(i, j) * c(PI / 4.0, 0.0))),
        Gate::BraidAngle { i, j, angle } => expm(&(braid_gen(i, j) * c(angle.value() / 2.0, 0.0))),
        Gate::CZf { i, j } => expm(&i_times(number(regs, i) * number(regs, j), PI)),
        Gate::CZfAngle { i, j, angle } => {
            expm(&i_times(number(regs, i) * number(regs, j), -angle.value()))
        }
        Gate::CZqf { q, f } => expm(&i_times(qubit_number(regs, q) * number(regs, f), PI)),
        Gate::CZqfAngle { q, f, angle } => expm(&i_times(
            qubit_number(regs, q) * number(regs, f),
            -angle.value(),
        )),
        Gate::SqrtISwapF { i, j } => expm(&i_times(hop(i, j), PI / 4.0)),
        Gate::Hop { a, b, angle, .. } => expm(&i_times(hop(a, b), -angle.value())),
        Gate::BeamSplitter { a, b, angle } => {
            let (ad, bd) = (boson_creation(regs, a), boson_creation(regs, b));
            expm(&((&ad * bd.adjoint() - &bd * ad.adjoint()) * c(angle.value(), 0.0)))
        }
        Gate::Dissociate {
            boson,
            up,
            down,
            n_mean,
            phase,
        } => pair_unitary(regs, boson, up, down, n_mean, phase.value(), -1.0),
        Gate::Pair {
            boson,
            i,
            j,
            n_mean,
            phase,
        } => pair_unitary(regs, boson, i, j, n_mean, phase.value(), 1.0),
    }
}

fn pair_unitary(
    regs: &Registers,
    m: usize,
    u: usize,
    d: usize,
    n_mean: f64,
    phi: f64,
    sign: f64,
) -> Matrix {
    if n_mean <= 0.0 {
        return eye(dim(regs));
    }
    let tau = std::f64::consts::PI / (4.0 * n_mean.sqrt());
    let b = boson_creation(regs, m).adjoint();
    let gen = b * creation(regs, u) * creation(regs, d) * C64::from_polar(1.0, phi);
    let h = &gen + gen.adjoint();
    expm(&i_times(h, sign * tau))
}

/// `I + p_i†p_j + p_j†p_i − n_i − n_j`
pub fn move_swap_unitary(regs: &Registers, i: usize, j: usize) -> Matrix {
    let (ci, cj) = (creation(regs, i), creation(regs, j));
    eye(dim(regs)) + &ci * cj.adjoint() + &cj * ci.adjoint() - number(regs, i) - number(regs, j)
}

/// Product of gate unitaries, later ops on the left.
pub fn circuit_unitary(c: &Circuit) -> Option<Matrix> {
    let regs = &c.registers;
    let mut u = eye(dim(regs));
    for op in &c.ops {
        let g = match op {
            Op::Gate { gate } => gate_unitary(regs, gate),
            Op::MoveSwap { i, j } => move_swap_unitary(regs, *i, *j),
            _ => return None,
        };
        u = g * u;
    }
    Some(u)
}

/// Unitary of a circuit obtained by running the state-vector simulator on each basis state.
pub fn simulated_unitary(c: &Circuit) -> Result<Matrix, SimError> {
    let d = dim(&c.registers);
    let mut out = Matrix::zeros(d, d);
    for col in 0..d {
        let mut amps = vec![C64::new(0.0, 0.0); d];
        amps[col] = C64::new(1.0, 0.0);
        let mut s = StateVector::from_amplitudes(&c.registers, amps)?;
        s.apply_circuit(c)?;
        for (row, a) in s.amplitudes().iter().enumerate() {
            out[(row, col)] = *a;
        }
    }
    Ok(out)
}

pub fn max_abs(m: &Matrix) -> f64 {
    m.iter().map(|x| x.norm()).fold(0.0, f64::max)
}

/// `max |A − e^{iφ} B|` with the phase chosen from `tr(B†A)`.
pub fn distance_up_to_phase(a: &Matrix, b: &Matrix) -> f64 {
    let t: C64 = (b.adjoint() * a).trace();
    let ph = if t.norm() > 1e-300 {
        t / t.norm()
    } else {
        c(1.0, 0.0)
    };
    max_abs(&(a - b * ph))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::Angle;
    use crate::majorana::jordan_wigner;

    #[test]
    fn majoranas_square_to_one_and_anticommute() {
        let regs = Registers::new(1, 2);
        let d = dim(&regs);
        for a in 0..4 {
            let ma = majorana(&regs, MajoranaIndex::unflatten(a));
            assert!(max_abs(&(&ma * &ma - eye(d))) < 1e-14);
            for b in a + 1..4 {
                let mb = majorana(&regs, MajoranaIndex::unflatten(b));
                assert!(max_abs(&(&ma * &mb + &mb * &ma)) < 1e-14);
            }
        }
    }

    #[test]
    fn jordan_wigner_matches_creation_route() {
        let regs = Registers::new(1, 3);
        for s in [
            "+1 * gt1",
            "+i * gt0 g0",
            "-1 * g0 gt2 | Y:q0",
            "+i * g1 g2 gt2",
        ] {
            let s: Mqs = s.parse().unwrap();
            let p = jordan_wigner(&s, 1, 3).unwrap();
            let mut m = eye(dim(&regs)) * p.phase;
            for (&w, &l) in &p.letters {
                m *= embed(&regs, w, &pauli_matrix(l), &eye(2));
            }
            assert!(max_abs(&(m - string_matrix(&regs, &s))) < 1e-14, "{s}");
        }
    }

    #[test]
    fn parity_string_is_minus_z_of_number() {
        let regs = Registers::new(0, 1);
        let zf = string_matrix(&regs, &Mqs::parity(0));
        assert!(max_abs(&(zf - (eye(2) - number(&regs, 0) * c(2.0, 0.0)))) < 1e-14);
    }

    #[test]
    fn simulator_matches_oracle_for_every_gate_kind() {
        let regs = Registers::new(1, 3);
        let a = Angle::radians(0.37);
        let gates = [
            Gate::Tf { f: 1 },
            Gate::TfDag { f: 0 },
            Gate::Sf { f: 2 },
            Gate::SfDag { f: 1 },
            Gate::Zf { f: 0 },
            Gate::PhaseF { f: 2, angle: a },
            Gate::H { q: 0 },
            Gate::S { q: 0 },
            Gate::SDag { q: 0 },
            Gate::Z { q: 0 },
            Gate::X { q: 0 },
            Gate::T { q: 0 },
            Gate::TDag { q: 0 },
            Gate::PhaseQ { q: 0, angle: a },
            Gate::Xrot { q: 0, angle: a },
            Gate::Braid { i: 2, j: 0 },
            Gate::BraidAngle {
                i: 0,
                j: 1,
                angle: a,
            },
            Gate::CZf { i: 0, j: 2 },
            Gate::CZfAngle {
                i: 1,
                j: 2,
                angle: a,
            },
            Gate::CZqf { q: 0, f: 1 },
            Gate::CZqfAngle {
                q: 0,
                f: 2,
                angle: a,
            },
            Gate::SqrtISwapF { i: 0, j: 2 },
            Gate::Hop {
                label: crate::circuit::HopLabel::UpDown,
                a: 2,
                b: 1,
                angle: a,
            },
        ];
        for g in gates {
            let mut c = Circuit::new(regs.clone());
            c.gate(g);
            let u = circuit_unitary(&c).unwrap();
            let s = simulated_unitary(&c).unwrap();
            assert!(max_abs(&(u - s)) < 1e-12, "{g:?}");
        }
    }

    #[test]
    fn boson_gates_match_oracle_below_truncation() {
        let regs = Registers::new(0, 2).with_bosons(vec![3, 3]);
        let mut c = Circuit::new(regs.clone());
        c.gate(Gate::Pair {
            boson: 0,
            i: 0,
            j: 1,
            n_mean: 2.0,
            phase: Angle::radians(0.4),
        });
        c.gate(Gate::Dissociate {
            boson: 1,
            up: 1,
            down: 0,
            n_mean: 1.5,
            phase: Angle::radians(-0.2),
        });
        c.move_swap(0, 1);
        // compare on the |n0 + n1 + pairs| ≤ 3 sector, which the truncation keeps exactly
        let u = circuit_unitary(&c).unwrap();
        for (n0, n1) in [(1, 0), (2, 1), (0, 2), (1, 1)] {
            let occ = crate::sim::Occupation {
                bosons: vec![n0, n1],
                ..Default::default()
            };
            let mut s = crate::sim::init_state(&regs, &occ).unwrap();
            let v = nalgebra::DVector::from_column_slice(s.amplitudes());
            s.apply_circuit(&c).unwrap();
            let w = &u * v;
            let diff = w
                .iter()
                .zip(s.amplitudes())
                .map(|(a, b)| (a - b).norm())
                .fold(0.0, f64::max);
            assert!(diff < 1e-12, "({n0},{n1}) {diff}");
        }
        let mut bs = Circuit::new(regs.clone());
        bs.gate(Gate::BeamSplitter {
            a: 0,
            b: 1,
            angle: Angle::radians(0.7),
        });
        let ub = circuit_unitary(&bs).unwrap();
        let occ = crate::sim::Occupation {
            bosons: vec![2, 1],
            ..Default::default()
        };
        let mut s = crate::sim::init_state(&regs, &occ).unwrap();
        let v = nalgebra::DVector::from_column_slice(s.amplitudes());
        s.apply_circuit(&bs).unwrap();
        let w = &ub * v;
        let diff = w
            .iter()
            .zip(s.amplitudes())
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max);
        assert!(diff < 1e-12, "{diff}");
    }
}
