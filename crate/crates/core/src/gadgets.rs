//! Algorithmic gadgets: the fermionic fast Fourier transform, its
//! qubit-hardware baselines, qubit-controlled fermionic evolutions and
//! dual-rail interfacing.

use std::f64::consts::PI;
use std::fmt::Write as _;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::circuit::{Angle, Circuit, Gate, HopLabel, Registers};
use crate::clifford::{conjugate_clifford, CliffordError};
use crate::codes::pair_to_parity;
use crate::majorana::{MajoranaQubitString as Mqs, Phase};
use crate::resources::{count_resources, CostModel, ResourceReport};
use crate::sim::{SimError, StateVector};
use crate::C64;

#[derive(Debug, Error)]
pub enum GadgetError {
    #[error("mode count {0} is not a power of two")]
    NotPowerOfTwo(usize),
    #[error("need at least {need} modes, got {got}")]
    TooFew { need: usize, got: usize },
    #[error("modes {0} and {1} must be distinct")]
    SameMode(usize, usize),
    #[error(transparent)]
    Sim(#[from] SimError),
    #[error(transparent)]
    Clifford(#[from] CliffordError),
}

/// Twiddle `ω_n^k` with `ω_n = e^{−2πi/n}`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FourierPhase {
    pub k: u64,
    pub n: u64,
}

impl FourierPhase {
    pub fn angle(self) -> Angle {
        Angle::pi_frac(-2 * (self.k % self.n.max(1)) as i64, self.n.max(1))
    }

    pub fn is_trivial(self) -> bool {
        self.n == 0 || self.k.is_multiple_of(self.n)
    }
}

/// Butterfly on modes `a`, `b`: an optional twiddle on `b`, then the
/// fermionic Hadamard `p_a† → (p_a† + p_b†)/√2`, `p_b† → (p_a† − p_b†)/√2`.
pub fn two_mode_fourier(
    twiddle: FourierPhase,
    a: usize,
    b: usize,
) -> Result<Vec<Gate>, GadgetError> {
    if a == b {
        return Err(GadgetError::SameMode(a, b));
    }
    let mut gates = Vec::new();
    if !twiddle.is_trivial() {
        gates.push(Gate::PhaseF {
            f: b,
            angle: twiddle.angle(),
        });
    }
    gates.extend([
        Gate::Braid { i: a, j: b },
        Gate::Tf { f: b },
        Gate::TfDag { f: a },
        Gate::Zf { f: b },
        Gate::Braid { i: a, j: b },
    ]);
    Ok(gates)
}

fn log2_exact(n: usize) -> Result<u32, GadgetError> {
    if n < 2 || !n.is_power_of_two() {
        return Err(GadgetError::NotPowerOfTwo(n));
    }
    Ok(n.trailing_zeros())
}

fn bit_reverse(x: usize, bits: u32) -> usize {
    x.reverse_bits() >> (usize::BITS - bits)
}

/// `(twiddle, a, b)` for every butterfly of a decimation-in-time FFT on
/// bit-reversed input, stage by stage.
fn butterflies(n: usize) -> Vec<Vec<(FourierPhase, usize, usize)>> {
    let mut stages = Vec::new();
    let mut m = 2;
    while m <= n {
        let h = m / 2;
        let mut stage = Vec::new();
        for start in (0..n).step_by(m) {
            for k in 0..h {
                stage.push((
                    FourierPhase {
                        k: k as u64,
                        n: m as u64,
                    },
                    start + k,
                    start + k + h,
                ));
            }
        }
        stages.push(stage);
        m *= 2;
    }
    stages
}

/// Fermionic FFT on `n` modes: free fermion moves bit-reverse the input, then
/// `log₂ n` stages of butterflies between arbitrary mode pairs. The
/// single-particle action is the unitary DFT `ω^{jk}/√n`.
pub fn ffft(n: usize) -> Result<Circuit, GadgetError> {
    let bits = log2_exact(n)?;
    let mut c = Circuit::new(Registers::new(0, n));
    for p in 0..n {
        let r = bit_reverse(p, bits);
        if p < r {
            c.move_swap(p, r);
        }
    }
    for stage in butterflies(n) {
        for (tw, a, b) in stage {
            c.gates(two_mode_fourier(tw, a, b)?);
        }
    }
    Ok(c)
}

/// Adjacent-transposition moves `(w, w+1)` sorting `holds` into `target`
/// by odd-even transposition; `holds` is updated in place.
fn odd_even_sort(holds: &mut [usize], target: &[usize], moves: &mut Vec<usize>) {
    let n = holds.len();
    let mut rank = vec![0; n];
    for (w, &p) in target.iter().enumerate() {
        rank[p] = w;
    }
    for round in 0..n {
        let mut swapped = false;
        for w in (round % 2..n.saturating_sub(1)).step_by(2) {
            if rank[holds[w]] > rank[holds[w + 1]] {
                holds.swap(w, w + 1);
                moves.push(w);
                swapped = true;
            }
        }
        if !swapped && holds.iter().zip(target).all(|(h, t)| h == t) {
            break;
        }
    }
}

/// The same transform on qubit hardware, where only neighbouring
/// (Jordan-Wigner adjacent) modes interact: before each stage an odd-even
/// network of fSWAPs brings every butterfly pair next to each other, and a
/// final network restores natural output order.
pub fn qubit_fft_fswap(n: usize) -> Result<Circuit, GadgetError> {
    let bits = log2_exact(n)?;
    let mut c = Circuit::new(Registers::new(0, n));
    // holds[w]: FFT array position currently on wire w
    let mut holds: Vec<usize> = (0..n).map(|w| bit_reverse(w, bits)).collect();
    let sort_to = |holds: &mut Vec<usize>, target: &[usize], c: &mut Circuit| {
        let mut moves = Vec::new();
        odd_even_sort(holds, target, &mut moves);
        for w in moves {
            c.move_swap(w, w + 1);
        }
    };
    for stage in butterflies(n) {
        let target: Vec<usize> = stage.iter().flat_map(|&(_, a, b)| [a, b]).collect();
        sort_to(&mut holds, &target, &mut c);
        for (pair, (tw, _, _)) in stage.iter().enumerate() {
            c.gates(two_mode_fourier(*tw, 2 * pair, 2 * pair + 1)?);
        }
    }
    let natural: Vec<usize> = (0..n).collect();
    sort_to(&mut holds, &natural, &mut c);
    Ok(c)
}

/// Odd-even fSWAP network with `n` layers, the standard way to make every
/// pair of `n` Jordan-Wigner modes adjacent once.
pub fn fswap_network(n: usize) -> Result<Circuit, GadgetError> {
    if n < 2 {
        return Err(GadgetError::TooFew { need: 2, got: n });
    }
    let mut c = Circuit::new(Registers::new(0, n));
    for layer in 0..n {
        for w in (layer % 2..n - 1).step_by(2) {
            c.move_swap(w, w + 1);
        }
    }
    Ok(c)
}

/// `M[j][k] = ⟨vac| p_j U p_k† |vac⟩` for a particle-conserving circuit on
/// fermion modes.
pub fn single_particle_matrix(c: &Circuit) -> Result<DMatrix<C64>, GadgetError> {
    let n = c.registers.n_fermions;
    let vac = StateVector::vacuum(&c.registers);
    let outs: Vec<StateVector> = (0..n).map(|j| vac.create(j)).collect::<Result<_, _>>()?;
    let mut m = DMatrix::zeros(n, n);
    for k in 0..n {
        let mut s = vac.create(k)?;
        s.apply_circuit(c)?;
        for (j, o) in outs.iter().enumerate() {
            m[(j, k)] = o.inner(&s);
        }
    }
    Ok(m)
}

pub fn dft_matrix(n: usize) -> DMatrix<C64> {
    let norm = 1.0 / (n as f64).sqrt();
    DMatrix::from_fn(n, n, |j, k| {
        C64::from_polar(norm, -2.0 * PI * ((j * k) % n) as f64 / n as f64)
    })
}

/// `exp(−iεt n_f)` routed through qubit `q`: copy the occupation onto the
/// qubit, phase it, uncompute. With `εt = −π/4` this is the `Tf` gadget.
pub fn controlled_phase_evolution(q: usize, f: usize, eps_t: Angle) -> Vec<Gate> {
    let copy = [Gate::H { q }, Gate::CZqf { q, f }, Gate::H { q }];
    let mut gates = copy.to_vec();
    gates.push(Gate::PhaseQ { q, angle: -eps_t });
    gates.extend(copy);
    gates
}

/// `exp(−i(θ/2) Z_c (n_i − ½)(n_j − ½))`.
pub fn controlled_interaction(
    c: usize,
    i: usize,
    j: usize,
    theta: Angle,
) -> Result<Vec<Gate>, GadgetError> {
    if i == j {
        return Err(GadgetError::SameMode(i, j));
    }
    Ok(vec![
        Gate::H { q: c },
        Gate::CZqf { q: c, f: i },
        Gate::CZqf { q: c, f: j },
        Gate::Xrot {
            q: c,
            angle: Angle::radians(theta.value() / 4.0),
        },
        Gate::CZqf { q: c, f: j },
        Gate::CZqf { q: c, f: i },
        Gate::H { q: c },
    ])
}

/// `exp(−θ/2 Z_c γ̃_i γ_j)`.
pub fn controlled_braid(
    c: usize,
    i: usize,
    j: usize,
    theta: Angle,
) -> Result<Vec<Gate>, GadgetError> {
    if i == j {
        return Err(GadgetError::SameMode(i, j));
    }
    let w = pair_to_parity(2 * i + 1, 2 * j);
    let mut probe = Circuit::new(Registers::new(0, i.max(j) + 1));
    probe.gates(w.clone());
    // W† Zf_i W = s · iγ̃_iγ_j
    let pulled = conjugate_clifford(&probe, &Mqs::parity(i))?;
    let target = Mqs::canonicalize(&[2 * i + 1, 2 * j], Phase::I);
    let s = if pulled == target { 1.0 } else { -1.0 };
    let mut gates = w.clone();
    gates.extend([
        Gate::H { q: c },
        Gate::CZqf { q: c, f: i },
        Gate::Xrot {
            q: c,
            angle: Angle::radians(-s * theta.value()),
        },
        Gate::CZqf { q: c, f: i },
        Gate::H { q: c },
    ]);
    gates.extend(w.iter().rev().flat_map(Gate::inverse));
    Ok(gates)
}

/// `exp(iJΔt Z_c (p_i†p_j + p_j†p_i))` as two commuting controlled braids.
pub fn controlled_hopping(
    c: usize,
    i: usize,
    j: usize,
    j_dt: Angle,
) -> Result<Vec<Gate>, GadgetError> {
    let mut gates = controlled_braid(c, j, i, j_dt)?;
    gates.extend(controlled_braid(c, i, j, j_dt)?);
    Ok(gates)
}

/// Dual-rail qubit on modes `(a, b)`: `|0⟩ = p_b†|vac⟩`, `|1⟩ = p_a†|vac⟩`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DualRail {
    pub a: usize,
    pub b: usize,
}

impl DualRail {
    /// `exp(−iθ(p_a†p_b + h.c.))`
    fn hop(self, theta: Angle) -> Gate {
        Gate::Hop {
            label: HopLabel::Generic,
            a: self.a,
            b: self.b,
            angle: theta,
        }
    }

    /// CNOT with the dual-rail qubit as control and qubit `q` as target.
    pub fn cnot_to_qubit(self, q: usize) -> Vec<Gate> {
        vec![Gate::H { q }, Gate::CZqf { q, f: self.a }, Gate::H { q }]
    }

    /// CNOT with qubit `q` as control: `exp(iπ/4 (1 − X_DR)(1 − Z_q))`.
    pub fn cnot_from_qubit(self, q: usize) -> Result<Vec<Gate>, GadgetError> {
        let mut gates = vec![self.hop(Angle::pi_frac(1, 4)), Gate::S { q }];
        gates.extend(controlled_hopping(q, self.a, self.b, Angle::pi_frac(1, 4))?);
        Ok(gates)
    }

    /// Moves qubit `q` onto the dual rail (which must hold `|0⟩`), leaving `q` in `|0⟩`.
    pub fn encode(self, q: usize) -> Result<Vec<Gate>, GadgetError> {
        let mut gates = vec![self.hop(Angle::pi_frac(-1, 4))];
        gates.extend(controlled_hopping(
            q,
            self.a,
            self.b,
            Angle::pi_frac(-1, 4),
        )?);
        gates.extend(self.cnot_to_qubit(q));
        gates.push(Gate::PhaseF {
            f: self.a,
            angle: Angle::pi_frac(-1, 2),
        });
        Ok(gates)
    }

    pub fn decode(self, q: usize) -> Result<Vec<Gate>, GadgetError> {
        Ok(self
            .encode(q)?
            .iter()
            .rev()
            .flat_map(Gate::inverse)
            .collect())
    }

    pub fn swap_with_qubit(self, q: usize) -> Result<Vec<Gate>, GadgetError> {
        let mut gates = self.cnot_from_qubit(q)?;
        gates.extend(self.cnot_to_qubit(q));
        gates.extend(self.cnot_from_qubit(q)?);
        Ok(gates)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    FermionicFft,
    QubitFftFswap,
    FswapNetwork,
}

impl Method {
    pub const ALL: [Method; 3] = [
        Method::FermionicFft,
        Method::QubitFftFswap,
        Method::FswapNetwork,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Method::FermionicFft => "fermionic_fft",
            Method::QubitFftFswap => "qubit_fft_fswap",
            Method::FswapNetwork => "fswap_network",
        }
    }

    pub fn circuit(self, n: usize) -> Result<Circuit, GadgetError> {
        match self {
            Method::FermionicFft => ffft(n),
            Method::QubitFftFswap => qubit_fft_fswap(n),
            Method::FswapNetwork => fswap_network(n),
        }
    }

    pub fn cost_model(self) -> CostModel {
        match self {
            Method::FermionicFft => CostModel::default(),
            _ => CostModel::qubit_fswap(),
        }
    }

    pub fn resources(self, n: usize) -> Result<ResourceReport, GadgetError> {
        Ok(count_resources(&self.circuit(n)?, &self.cost_model()))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Metric {
    Depth,
    DepthWithoutRotations,
    Cliffords,
}

impl Metric {
    pub const ALL: [Metric; 3] = [
        Metric::Depth,
        Metric::DepthWithoutRotations,
        Metric::Cliffords,
    ];

    fn of(self, r: &ResourceRow) -> usize {
        match self {
            Metric::Depth => r.depth,
            Metric::DepthWithoutRotations => r.depth_without_rotations,
            Metric::Cliffords => r.cliffords,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ScalingModel {
    N,
    NSquared,
    LogN,
    NLogN,
    NSquaredLogN,
}

impl ScalingModel {
    pub const ALL: [ScalingModel; 5] = [
        ScalingModel::N,
        ScalingModel::NSquared,
        ScalingModel::LogN,
        ScalingModel::NLogN,
        ScalingModel::NSquaredLogN,
    ];

    pub fn eval(self, n: usize) -> f64 {
        let x = n as f64;
        match self {
            ScalingModel::N => x,
            ScalingModel::NSquared => x * x,
            ScalingModel::LogN => x.log2(),
            ScalingModel::NLogN => x * x.log2(),
            ScalingModel::NSquaredLogN => x * x * x.log2(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ResourceRow {
    pub method: Method,
    pub n: usize,
    pub depth: usize,
    pub depth_without_rotations: usize,
    pub cliffords: usize,
    pub t_count: usize,
    pub rotations: usize,
    pub swaps: usize,
}

/// Least-squares `y ≈ c·f(N)` through the origin.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScalingFit {
    pub method: Method,
    pub metric: Metric,
    pub model: ScalingModel,
    pub coefficient: f64,
    /// largest `|y − c·f(N)|` over the fitted points
    pub residual: f64,
}

pub fn fit(ns: &[usize], ys: &[f64], model: ScalingModel) -> (f64, f64) {
    let fs: Vec<f64> = ns.iter().map(|&n| model.eval(n)).collect();
    let den: f64 = fs.iter().map(|f| f * f).sum();
    let c = if den > 0.0 {
        fs.iter().zip(ys).map(|(f, y)| f * y).sum::<f64>() / den
    } else {
        0.0
    };
    let residual = fs
        .iter()
        .zip(ys)
        .map(|(f, y)| (y - c * f).abs())
        .fold(0.0, f64::max);
    (c, residual)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ResourceTable {
    pub rows: Vec<ResourceRow>,
    pub fits: Vec<ScalingFit>,
}

impl ResourceTable {
    /// Best-fitting model for one method and metric.
    pub fn best_fit(&self, method: Method, metric: Metric) -> Option<&ScalingFit> {
        self.fits
            .iter()
            .filter(|f| f.method == method && f.metric == metric)
            .min_by(|a, b| a.residual.total_cmp(&b.residual))
    }

    pub fn fit_for(
        &self,
        method: Method,
        metric: Metric,
        model: ScalingModel,
    ) -> Option<&ScalingFit> {
        self.fits
            .iter()
            .find(|f| f.method == method && f.metric == metric && f.model == model)
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from(
            "method,N,depth,cliffords,rotations,swaps,depth_without_rotations,t_count\n",
        );
        for r in &self.rows {
            let _ = writeln!(
                out,
                "{},{},{},{},{},{},{},{}",
                r.method.name(),
                r.n,
                r.depth,
                r.cliffords,
                r.rotations,
                r.swaps,
                r.depth_without_rotations,
                r.t_count
            );
        }
        out
    }
}

pub fn resource_table(ns: &[usize]) -> Result<ResourceTable, GadgetError> {
    let mut rows = Vec::new();
    for method in Method::ALL {
        for &n in ns {
            let r = method.resources(n)?;
            rows.push(ResourceRow {
                method,
                n,
                depth: r.depth,
                depth_without_rotations: r.depth_without_rotations,
                cliffords: r.clifford_count,
                t_count: r.t_count,
                rotations: r.rotation_count,
                swaps: r.move_swaps,
            });
        }
    }
    let mut fits = Vec::new();
    for method in Method::ALL {
        let mine: Vec<&ResourceRow> = rows.iter().filter(|r| r.method == method).collect();
        let xs: Vec<usize> = mine.iter().map(|r| r.n).collect();
        for metric in Metric::ALL {
            let ys: Vec<f64> = mine.iter().map(|r| metric.of(r) as f64).collect();
            for model in ScalingModel::ALL {
                let (coefficient, residual) = fit(&xs, &ys, model);
                fits.push(ScalingFit {
                    method,
                    metric,
                    model,
                    coefficient,
                    residual,
                });
            }
        }
    }
    Ok(ResourceTable { rows, fits })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dense::{self, distance_up_to_phase, expm, max_abs, Matrix};
    use crate::majorana::{OperatorSum, Pauli};

    fn gates_unitary(regs: Registers, gates: Vec<Gate>) -> Matrix {
        let mut c = Circuit::new(regs);
        c.gates(gates);
        dense::circuit_unitary(&c).unwrap()
    }

    fn close(a: &DMatrix<C64>, b: &DMatrix<C64>) -> f64 {
        max_abs(&(a - b))
    }

    #[test]
    fn butterfly_is_exact_hadamard() {
        let mut c = Circuit::new(Registers::new(0, 2));
        c.gates(two_mode_fourier(FourierPhase { k: 0, n: 2 }, 0, 1).unwrap());
        assert!(close(&single_particle_matrix(&c).unwrap(), &dft_matrix(2)) < 1e-12);
        // vacuum fixed, doubly occupied state picks up −1: a Gaussian unitary
        let u = dense::circuit_unitary(&c).unwrap();
        assert!((u[(0, 0)] - 1.0).norm() < 1e-12);
        assert!((u[(3, 3)] + 1.0).norm() < 1e-12);
        let r = count_resources(&c, &CostModel::default());
        assert_eq!(r.counts["BRAID"], 2);
        assert_eq!(r.t_count + r.counts["Zf"], 3);
        assert_eq!(r.non_clifford_depth, 1);
    }

    #[test]
    fn ffft_is_the_dft() {
        for n in [2, 4, 8, 16] {
            let m = single_particle_matrix(&ffft(n).unwrap()).unwrap();
            assert!(close(&m, &dft_matrix(n)) < 1e-10, "N = {n}");
        }
    }

    #[test]
    fn two_particle_sector_is_the_slater_determinant() {
        let n = 4;
        let c = ffft(n).unwrap();
        let f = dft_matrix(n);
        let vac = StateVector::vacuum(&c.registers);
        let mut s = vac.create(3).unwrap().create(1).unwrap();
        s.apply_circuit(&c).unwrap();
        for a in 0..n {
            for b in 0..a {
                let out = vac.create(b).unwrap().create(a).unwrap();
                let want = f[(a, 1)] * f[(b, 3)] - f[(a, 3)] * f[(b, 1)];
                assert!((out.inner(&s) - want).norm() < 1e-10);
            }
        }
    }

    #[test]
    fn qubit_baseline_is_the_same_transform() {
        for n in [2, 4, 8] {
            let m = single_particle_matrix(&qubit_fft_fswap(n).unwrap()).unwrap();
            assert!(close(&m, &dft_matrix(n)) < 1e-10, "N = {n}");
        }
        // every non-move gate touches neighbouring modes only
        let c = qubit_fft_fswap(8).unwrap();
        for op in &c.ops {
            if let crate::circuit::Op::Gate {
                gate: Gate::Braid { i, j },
            } = op
            {
                assert_eq!(i.abs_diff(*j), 1);
            }
        }
    }

    #[test]
    fn ffft_rejects_bad_sizes() {
        assert!(matches!(ffft(6), Err(GadgetError::NotPowerOfTwo(6))));
        assert!(matches!(ffft(1), Err(GadgetError::NotPowerOfTwo(1))));
    }

    #[test]
    fn scaling_is_exact_where_it_should_be() {
        let t = resource_table(&[2, 4, 8, 16]).unwrap();
        let ffft_depth = t
            .fit_for(
                Method::FermionicFft,
                Metric::DepthWithoutRotations,
                ScalingModel::LogN,
            )
            .unwrap();
        assert!(ffft_depth.residual < 1e-9 && (ffft_depth.coefficient - 4.0).abs() < 1e-12);
        let ffft_cliff = t
            .fit_for(Method::FermionicFft, Metric::Cliffords, ScalingModel::NLogN)
            .unwrap();
        assert!(ffft_cliff.residual < 1e-9 && (ffft_cliff.coefficient - 1.5).abs() < 1e-12);
        let t = resource_table(&[4, 8, 16, 32]).unwrap();
        let net = t
            .fit_for(Method::FswapNetwork, Metric::Depth, ScalingModel::N)
            .unwrap();
        assert!(net.residual < 1e-9 && (net.coefficient - 1.0).abs() < 1e-12);
        let q = t
            .best_fit(Method::QubitFftFswap, Metric::Cliffords)
            .unwrap();
        assert!(
            matches!(q.model, ScalingModel::NSquared | ScalingModel::NSquaredLogN),
            "{q:?}"
        );
        let csv = t.to_csv();
        assert!(csv.starts_with("method,N,depth,cliffords,rotations,swaps"));
        assert_eq!(csv.lines().count(), 1 + 3 * 4);
    }

    #[test]
    fn controlled_phase_matches_number_phase() {
        let regs = Registers::new(1, 1);
        // ancilla in |0⟩: the first half of the basis
        let top = |m: &Matrix| m.view((0, 0), (2, 2)).into_owned();
        for eps in [0.37, -PI / 4.0] {
            let u = gates_unitary(
                regs.clone(),
                controlled_phase_evolution(0, 0, Angle::radians(eps)),
            );
            let want = expm(&(dense::number(&regs, 0) * C64::new(0.0, -eps)));
            assert!(close(&top(&u), &top(&want)) < 1e-12);
            assert!(u.view((2, 0), (2, 2)).iter().all(|z| z.norm() < 1e-12));
        }
        let t = gates_unitary(regs.clone(), vec![Gate::Tf { f: 0 }]);
        let g = gates_unitary(
            regs,
            controlled_phase_evolution(0, 0, Angle::pi_frac(-1, 4)),
        );
        assert!(close(&top(&t), &top(&g)) < 1e-12);
    }

    fn z_times(regs: &Registers, m: &Matrix) -> Matrix {
        dense::qubit_op(regs, 0, &dense::pauli_matrix(Pauli::Z)) * m
    }

    #[test]
    fn controlled_interaction_matches_target() {
        let regs = Registers::new(1, 2);
        let half = Matrix::identity(8, 8) * C64::new(0.5, 0.0);
        let ni = dense::number(&regs, 0) - &half;
        let nj = dense::number(&regs, 1) - &half;
        for theta in [0.3, 1.1, PI] {
            let u = gates_unitary(
                regs.clone(),
                controlled_interaction(0, 0, 1, Angle::radians(theta)).unwrap(),
            );
            let want = expm(&(z_times(&regs, &(&ni * &nj)) * C64::new(0.0, -theta / 2.0)));
            assert!(close(&u, &want) < 1e-12, "θ = {theta}");
        }
    }

    #[test]
    fn controlled_braid_matches_target() {
        let regs = Registers::new(1, 2);
        for (i, j) in [(0, 1), (1, 0)] {
            let g =
                dense::string_matrix(&regs, &Mqs::canonicalize(&[2 * i + 1, 2 * j], Phase::ONE));
            for theta in [0.4, PI / 2.0] {
                let u = gates_unitary(
                    regs.clone(),
                    controlled_braid(0, i, j, Angle::radians(theta)).unwrap(),
                );
                let want = expm(&(z_times(&regs, &g) * C64::new(-theta / 2.0, 0.0)));
                assert!(close(&u, &want) < 1e-12, "({i},{j}) θ = {theta}");
            }
        }
    }

    #[test]
    fn controlled_hopping_transfers_with_either_control() {
        let regs = Registers::new(1, 2);
        let hop = dense::sum_matrix(
            &regs,
            &OperatorSum::creation(0)
                .multiply(&OperatorSum::annihilation(1))
                .add(&OperatorSum::creation(1).multiply(&OperatorSum::annihilation(0))),
        );
        let jdt = 0.7;
        let u = gates_unitary(
            regs.clone(),
            controlled_hopping(0, 0, 1, Angle::radians(jdt)).unwrap(),
        );
        let want = expm(&(z_times(&regs, &hop) * C64::new(0.0, jdt)));
        assert!(close(&u, &want) < 1e-12);
        for control in [0u8, 1] {
            let start = crate::sim::init_state(
                &regs,
                &crate::sim::Occupation {
                    qubits: vec![control],
                    fermions: vec![0, 1],
                    ..Default::default()
                },
            )
            .unwrap();
            let moved = crate::sim::init_state(
                &regs,
                &crate::sim::Occupation {
                    qubits: vec![control],
                    fermions: vec![1, 0],
                    ..Default::default()
                },
            )
            .unwrap();
            let mut s = start.clone();
            let mut c = Circuit::new(regs.clone());
            c.gates(controlled_hopping(0, 0, 1, Angle::radians(jdt)).unwrap());
            s.apply_circuit(&c).unwrap();
            assert!((moved.fidelity(&s) - jdt.sin().powi(2)).abs() < 1e-12);
        }
    }

    /// Restriction of a `(1 qubit, 2 modes)` unitary to qubit ⊗ dual rail.
    fn on_qubit_and_rail(u: &Matrix, regs: &Registers) -> Matrix {
        let probe = StateVector::vacuum(regs);
        let idx = |q: usize, rail: usize| {
            (0..dense::dim(regs))
                .find(|&x| {
                    probe.qubit_bit(x, 0) as usize == q
                        && probe.fermion_bit(x, 0) as usize == rail
                        && probe.fermion_bit(x, 1) as usize == 1 - rail
                })
                .unwrap()
        };
        let basis: Vec<usize> = (0..4).map(|k| idx(k >> 1, k & 1)).collect();
        DMatrix::from_fn(4, 4, |r, c| u[(basis[r], basis[c])])
    }

    #[test]
    fn dual_rail_cnots_and_swap() {
        let regs = Registers::new(1, 2);
        let dr = DualRail { a: 0, b: 1 };
        let one = C64::new(1.0, 0.0);
        let zero = C64::new(0.0, 0.0);
        let perm =
            |p: [usize; 4]| DMatrix::from_fn(4, 4, |r, c| if p[c] == r { one } else { zero });
        // basis index = 2·qubit + rail
        let u = on_qubit_and_rail(
            &gates_unitary(regs.clone(), dr.cnot_from_qubit(0).unwrap()),
            &regs,
        );
        assert!(close(&u, &perm([0, 1, 3, 2])) < 1e-12, "{u}");
        let u = on_qubit_and_rail(&gates_unitary(regs.clone(), dr.cnot_to_qubit(0)), &regs);
        assert!(close(&u, &perm([0, 3, 2, 1])) < 1e-12, "{u}");
        let u = on_qubit_and_rail(
            &gates_unitary(regs.clone(), dr.swap_with_qubit(0).unwrap()),
            &regs,
        );
        assert!(close(&u, &perm([0, 2, 1, 3])) < 1e-12, "{u}");
    }

    #[test]
    fn dual_rail_encoding_round_trips() {
        let regs = Registers::new(1, 2);
        let dr = DualRail { a: 0, b: 1 };
        let enc = gates_unitary(regs.clone(), dr.encode(0).unwrap());
        let u = on_qubit_and_rail(&enc, &regs);
        // |ψ⟩_q |0⟩_DR → |0⟩_q |ψ⟩_DR
        let one = C64::new(1.0, 0.0);
        assert!((u[(0, 0)] - one).norm() < 1e-12);
        assert!((u[(1, 2)] - one).norm() < 1e-12);
        let dec = gates_unitary(regs, dr.decode(0).unwrap());
        assert!(distance_up_to_phase(&(dec * enc), &Matrix::identity(8, 8)) < 1e-12);
    }
}
