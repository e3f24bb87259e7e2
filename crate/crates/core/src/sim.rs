//! Dense state vectors over qubits ⊗ fermions (Jordan-Wigner) ⊗ truncated bosons.
//!
//! Basis index layout: qubit 0 is the most significant binary digit, then the
//! remaining qubits, then fermion modes in ascending order, then boson modes as
//! mixed-radix digits (mode 0 most significant). Fermion occupation is bit 1.

use std::collections::{BTreeMap, HashMap};

use num_complex::Complex64 as C64;
use rand::Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::circuit::{Circuit, Gate, Op, Reg, Registers};
use crate::clifford::rotation_form;
use crate::majorana::{
    MajoranaIndex, MajoranaKind, MajoranaQubitString as Mqs, OperatorSum, Pauli,
};

#[derive(Debug, Error, PartialEq)]
pub enum SimError {
    #[error("occupation {occupation} of {reg} exceeds its allowed range")]
    Occupation { reg: Reg, occupation: usize },
    #[error("{reg} is outside the state layout")]
    OutOfRange { reg: Reg },
    #[error("boson truncation leaked weight {0:e}")]
    Truncation(f64),
    #[error("requested branch has probability {0:e}")]
    ZeroProbability(f64),
    #[error("record {0} not available")]
    MissingRecord(usize),
    #[error("cannot measure {0} projectively")]
    NotMeasurable(Reg),
    #[error("state dimensions differ")]
    Dimension,
}

const LEAK_TOL: f64 = 1e-12;

/// Occupation numbers for a product basis state.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Occupation {
    #[serde(default)]
    pub qubits: Vec<u8>,
    #[serde(default)]
    pub fermions: Vec<u8>,
    #[serde(default)]
    pub bosons: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct StateVector {
    regs: Registers,
    amps: Vec<C64>,
    boson_dim: usize,
}

/// Measurement records of a circuit run.
pub type Records = BTreeMap<usize, u8>;

fn ln_factorials(n: usize) -> Vec<f64> {
    let mut out = vec![0.0; n + 1];
    for k in 1..=n {
        out[k] = out[k - 1] + (k as f64).ln();
    }
    out
}

impl StateVector {
    /// All qubits `|0⟩`, fermion vacuum, boson vacuum.
    pub fn vacuum(regs: &Registers) -> Self {
        let boson_dim = regs.boson_cutoffs.iter().map(|c| c + 1).product();
        let dim = (1usize << (regs.n_qubits + regs.n_fermions)) * boson_dim;
        let mut amps = vec![C64::new(0.0, 0.0); dim];
        amps[0] = C64::new(1.0, 0.0);
        Self {
            regs: regs.clone(),
            amps,
            boson_dim,
        }
    }

    pub fn from_amplitudes(regs: &Registers, amps: Vec<C64>) -> Result<Self, SimError> {
        let mut s = Self::vacuum(regs);
        if amps.len() != s.amps.len() {
            return Err(SimError::Dimension);
        }
        s.amps = amps;
        Ok(s)
    }

    pub fn registers(&self) -> &Registers {
        &self.regs
    }

    pub fn amplitudes(&self) -> &[C64] {
        &self.amps
    }

    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    pub fn norm(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn normalize(&mut self) {
        let n = self.norm();
        if n > 0.0 {
            for a in &mut self.amps {
                *a /= n;
            }
        }
    }

    pub fn scale(&mut self, c: C64) {
        for a in &mut self.amps {
            *a *= c;
        }
    }

    pub fn add_scaled(&mut self, c: C64, other: &StateVector) {
        for (a, b) in self.amps.iter_mut().zip(&other.amps) {
            *a += c * b;
        }
    }

    /// `⟨self|other⟩`
    pub fn inner(&self, other: &StateVector) -> C64 {
        self.amps
            .iter()
            .zip(&other.amps)
            .map(|(a, b)| a.conj() * b)
            .sum()
    }

    /// `|⟨self|other⟩|²` for normalized states.
    pub fn fidelity(&self, other: &StateVector) -> f64 {
        self.inner(other).norm_sqr()
    }

    /// Largest amplitude difference after removing the best global phase.
    pub fn distance_up_to_phase(&self, other: &StateVector) -> f64 {
        let ov = self.inner(other);
        let ph = if ov.norm() > 0.0 {
            ov / ov.norm()
        } else {
            C64::new(1.0, 0.0)
        };
        self.amps
            .iter()
            .zip(&other.amps)
            .map(|(a, b)| (a * ph - b).norm())
            .fold(0.0, f64::max)
    }

    pub fn max_abs_diff(&self, other: &StateVector) -> f64 {
        self.amps
            .iter()
            .zip(&other.amps)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    fn bit_at(&self, idx: usize, shift: usize) -> usize {
        ((idx / self.boson_dim) >> shift) & 1
    }

    fn toggle(&self, idx: usize, shift: usize) -> usize {
        let step = self.boson_dim << shift;
        if self.bit_at(idx, shift) == 1 {
            idx - step
        } else {
            idx + step
        }
    }

    fn fbits(&self, idx: usize) -> u64 {
        ((idx / self.boson_dim) & ((1usize << self.regs.n_fermions) - 1)) as u64
    }

    fn qubit_pos(&self, q: usize) -> usize {
        self.regs.n_fermions + self.regs.n_qubits - 1 - q
    }

    fn fermion_pos(&self, f: usize) -> usize {
        self.regs.n_fermions - 1 - f
    }

    fn boson_stride(&self, m: usize) -> usize {
        self.regs.boson_cutoffs[m + 1..]
            .iter()
            .map(|c| c + 1)
            .product()
    }

    /// Fermion occupation bit of `f` in basis state `idx`.
    pub fn fermion_bit(&self, idx: usize, f: usize) -> u8 {
        (((idx / self.boson_dim) >> self.fermion_pos(f)) & 1) as u8
    }

    pub fn qubit_bit(&self, idx: usize, q: usize) -> u8 {
        (((idx / self.boson_dim) >> self.qubit_pos(q)) & 1) as u8
    }

    pub fn boson_number(&self, idx: usize, m: usize) -> usize {
        (idx / self.boson_stride(m)) % (self.regs.boson_cutoffs[m] + 1)
    }

    /// Number of occupied fermion modes below `f`.
    fn tail_parity(&self, idx: usize, f: usize) -> u32 {
        if f == 0 {
            return 0;
        }
        (self.fbits(idx) >> (self.regs.n_fermions - f)).count_ones()
    }

    fn check_reg(&self, r: Reg) -> Result<(), SimError> {
        if self.regs.contains(r) {
            Ok(())
        } else {
            Err(SimError::OutOfRange { reg: r })
        }
    }

    /// Image of basis state `idx` under a string: `(new index, factor)`.
    fn string_image(&self, s: &Mqs, idx: usize) -> (usize, C64) {
        let mut idx = idx;
        let mut factor = s.phase().to_complex();
        let i = C64::new(0.0, 1.0);
        for (&q, &l) in s.paulis() {
            let shift = self.qubit_pos(q);
            let bit = self.bit_at(idx, shift);
            match l {
                Pauli::X => idx = self.toggle(idx, shift),
                Pauli::Y => {
                    factor *= if bit == 0 { i } else { -i };
                    idx = self.toggle(idx, shift);
                }
                Pauli::Z => {
                    if bit == 1 {
                        factor = -factor;
                    }
                }
            }
        }
        for &eta in s.majoranas().iter().rev() {
            let m = MajoranaIndex::unflatten(eta);
            let shift = self.fermion_pos(m.site);
            let bit = self.bit_at(idx, shift);
            if self.tail_parity(idx, m.site) % 2 == 1 {
                factor = -factor;
            }
            if m.kind == MajoranaKind::GammaTilde {
                factor *= if bit == 0 { -i } else { i };
            }
            idx = self.toggle(idx, shift);
        }
        (idx, factor)
    }

    pub fn apply_string(&self, s: &Mqs) -> Result<StateVector, SimError> {
        if s.fermion_extent() > self.regs.n_fermions {
            return Err(SimError::OutOfRange {
                reg: Reg::Fermion(s.fermion_extent() - 1),
            });
        }
        if s.qubit_extent() > self.regs.n_qubits {
            return Err(SimError::OutOfRange {
                reg: Reg::Qubit(s.qubit_extent() - 1),
            });
        }
        let mut out = vec![C64::new(0.0, 0.0); self.amps.len()];
        for (idx, a) in self.amps.iter().enumerate() {
            if a.norm_sqr() == 0.0 {
                continue;
            }
            let (j, f) = self.string_image(s, idx);
            out[j] += f * a;
        }
        Ok(StateVector {
            regs: self.regs.clone(),
            amps: out,
            boson_dim: self.boson_dim,
        })
    }

    pub fn apply_sum(&self, o: &OperatorSum) -> Result<StateVector, SimError> {
        let mut out = StateVector {
            regs: self.regs.clone(),
            amps: vec![C64::new(0.0, 0.0); self.amps.len()],
            boson_dim: self.boson_dim,
        };
        for (c, s) in o.terms() {
            let t = self.apply_string(s)?;
            out.add_scaled(*c, &t);
        }
        Ok(out)
    }

    pub fn expectation(&self, o: &OperatorSum) -> Result<C64, SimError> {
        Ok(self.inner(&self.apply_sum(o)?))
    }

    /// Applies `p†` to a fermion mode.
    pub fn create(&self, f: usize) -> Result<StateVector, SimError> {
        self.apply_sum(&OperatorSum::creation(f))
    }

    fn apply_rotation(&mut self, alpha: f64, s: &Mqs) -> Result<(), SimError> {
        let rotated = self.apply_string(s)?;
        let (c, si) = (alpha.cos(), alpha.sin());
        for (a, b) in self.amps.iter_mut().zip(&rotated.amps) {
            *a = c * *a + si * b;
        }
        Ok(())
    }

    fn apply_qubit_matrix(&mut self, q: usize, m: [[C64; 2]; 2]) {
        let shift = self.qubit_pos(q);
        for idx in 0..self.amps.len() {
            if self.bit_at(idx, shift) == 0 {
                let j = self.toggle(idx, shift);
                let (a0, a1) = (self.amps[idx], self.amps[j]);
                self.amps[idx] = m[0][0] * a0 + m[0][1] * a1;
                self.amps[j] = m[1][0] * a0 + m[1][1] * a1;
            }
        }
    }

    fn apply_beam_splitter(&mut self, a: usize, b: usize, theta: f64) -> Result<(), SimError> {
        // U a† U† = c a† − s b†,  U b† U† = s a† + c b†
        let (c, s) = (theta.cos(), theta.sin());
        let cut_a = self.regs.boson_cutoffs[a];
        let cut_b = self.regs.boson_cutoffs[b];
        let (sa, sb) = (self.boson_stride(a), self.boson_stride(b));
        let lf = ln_factorials(2 * (cut_a + cut_b) + 2);
        let mut cache: HashMap<(usize, usize), Vec<f64>> = HashMap::new();
        let mut out = vec![C64::new(0.0, 0.0); self.amps.len()];
        let mut leak = 0.0;
        for idx in 0..self.amps.len() {
            let amp = self.amps[idx];
            if amp.norm_sqr() == 0.0 {
                continue;
            }
            let n1 = self.boson_number(idx, a);
            let n2 = self.boson_number(idx, b);
            let base = idx - n1 * sa - n2 * sb;
            let coeffs = cache
                .entry((n1, n2))
                .or_insert_with(|| beam_splitter_column(n1, n2, c, s, &lf));
            for (m, &k) in coeffs.iter().enumerate() {
                if k == 0.0 {
                    continue;
                }
                let m2 = n1 + n2 - m;
                if m > cut_a || m2 > cut_b {
                    leak += (k * amp).norm_sqr();
                    continue;
                }
                out[base + m * sa + m2 * sb] += k * amp;
            }
        }
        if leak > LEAK_TOL {
            return Err(SimError::Truncation(leak));
        }
        self.amps = out;
        Ok(())
    }

    /// `exp(iκ(e^{iφ} b p_u†p_d† + h.c.))`
    fn apply_pair_creation(
        &mut self,
        m: usize,
        u: usize,
        d: usize,
        kappa: f64,
        phi: f64,
    ) -> Result<(), SimError> {
        let stride = self.boson_stride(m);
        let cut = self.regs.boson_cutoffs[m];
        let (pu, pd) = (self.fermion_pos(u), self.fermion_pos(d));
        let mut leak = 0.0;
        let e = C64::from_polar(1.0, phi);
        for idx in 0..self.amps.len() {
            let (bu, bd) = (self.bit_at(idx, pu) == 1, self.bit_at(idx, pd) == 1);
            let n = self.boson_number(idx, m);
            if bu && bd && n == cut {
                leak += self.amps[idx].norm_sqr();
            }
            if bu || bd || n == 0 {
                continue;
            }
            // p_u† p_d† on the empty pair: apply p_d† then p_u†
            let mut sign = self.tail_parity(idx, d) % 2;
            let mid = self.toggle(idx, pd);
            sign += self.tail_parity(mid, u) % 2;
            let target = self.toggle(mid, pu) - stride;
            let h = e * (n as f64).sqrt() * if sign % 2 == 1 { -1.0 } else { 1.0 };
            let hn = h.norm();
            let (c, s) = ((kappa * hn).cos(), (kappa * hn).sin());
            let (xa, xb) = (self.amps[idx], self.amps[target]);
            let i = C64::new(0.0, 1.0);
            self.amps[idx] = c * xa + i * s * (h.conj() / hn) * xb;
            self.amps[target] = c * xb + i * s * (h / hn) * xa;
        }
        if leak > LEAK_TOL {
            return Err(SimError::Truncation(leak));
        }
        Ok(())
    }

    /// Exchanges two fermion modes: `I + p_i†p_j + p_j†p_i − n_i − n_j`.
    fn apply_move_swap(&mut self, i: usize, j: usize) -> Result<(), SimError> {
        let ci = OperatorSum::creation(i);
        let cj = OperatorSum::creation(j);
        let one = OperatorSum::from_string(Mqs::identity());
        let m1 = C64::new(-1.0, 0.0);
        let op = one
            .add(&ci.multiply(&cj.adjoint()))
            .add(&cj.multiply(&ci.adjoint()))
            .add(&OperatorSum::number(i).scale(m1))
            .add(&OperatorSum::number(j).scale(m1));
        *self = self.apply_sum(&op)?;
        Ok(())
    }

    pub fn apply_gate(&mut self, g: &Gate) -> Result<(), SimError> {
        for r in g.targets() {
            self.check_reg(r)?;
        }
        match *g {
            Gate::H { q } => {
                let h = C64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
                self.apply_qubit_matrix(q, [[h, h], [h, -h]]);
                Ok(())
            }
            Gate::BeamSplitter { a, b, angle } => self.apply_beam_splitter(a, b, angle.value()),
            Gate::Dissociate {
                boson,
                up,
                down,
                n_mean,
                phase,
            } => {
                if n_mean <= 0.0 {
                    return Ok(());
                }
                let tau = std::f64::consts::PI / (4.0 * n_mean.sqrt());
                self.apply_pair_creation(boson, up, down, -tau, phase.value())
            }
            Gate::Pair {
                boson,
                i,
                j,
                n_mean,
                phase,
            } => {
                if n_mean <= 0.0 {
                    return Ok(());
                }
                let tau = std::f64::consts::PI / (4.0 * n_mean.sqrt());
                self.apply_pair_creation(boson, i, j, tau, phase.value())
            }
            _ => {
                let form = rotation_form(g).expect("every remaining gate has a rotation form");
                for (alpha, s) in &form.factors {
                    self.apply_rotation(*alpha, s)?;
                }
                self.scale(form.global);
                Ok(())
            }
        }
    }

    fn reg_shift(&self, r: Reg) -> Result<usize, SimError> {
        match r {
            Reg::Qubit(q) => Ok(self.qubit_pos(q)),
            Reg::Fermion(f) => Ok(self.fermion_pos(f)),
            Reg::Boson(_) => Err(SimError::NotMeasurable(r)),
        }
    }

    /// Probability that a qubit reads 1 or a fermion mode is occupied.
    pub fn probability_one(&self, r: Reg) -> Result<f64, SimError> {
        self.check_reg(r)?;
        let shift = self.reg_shift(r)?;
        Ok(self
            .amps
            .iter()
            .enumerate()
            .filter(|(i, _)| self.bit_at(*i, shift) == 1)
            .map(|(_, a)| a.norm_sqr())
            .sum())
    }

    /// Projects onto an outcome and renormalizes; returns its probability.
    pub fn branch(&mut self, r: Reg, outcome: u8) -> Result<f64, SimError> {
        let p1 = self.probability_one(r)?;
        let p = if outcome == 1 { p1 } else { 1.0 - p1 };
        if p < 1e-14 {
            return Err(SimError::ZeroProbability(p));
        }
        let shift = self.reg_shift(r)?;
        let bd = self.boson_dim;
        for (i, a) in self.amps.iter_mut().enumerate() {
            if (((i / bd) >> shift) & 1) as u8 != outcome {
                *a = C64::new(0.0, 0.0);
            }
        }
        self.normalize();
        Ok(p)
    }

    /// Born-rule measurement.
    pub fn measure<R: Rng + ?Sized>(&mut self, r: Reg, rng: &mut R) -> Result<u8, SimError> {
        let p1 = self.probability_one(r)?;
        let outcome = if p1 > 1.0 - 1e-14 {
            1
        } else if p1 < 1e-14 {
            0
        } else {
            (rng.gen::<f64>() < p1) as u8
        };
        self.branch(r, outcome)?;
        Ok(outcome)
    }

    fn flip_to_zero(&mut self, r: Reg) -> Result<(), SimError> {
        match r {
            Reg::Qubit(q) => {
                let o = C64::new(0.0, 0.0);
                let l = C64::new(1.0, 0.0);
                self.apply_qubit_matrix(q, [[o, l], [l, o]]);
            }
            Reg::Fermion(f) => *self = self.apply_sum(&OperatorSum::annihilation(f))?,
            Reg::Boson(_) => return Err(SimError::NotMeasurable(r)),
        }
        Ok(())
    }

    pub fn reset<R: Rng + ?Sized>(&mut self, r: Reg, rng: &mut R) -> Result<(), SimError> {
        if self.measure(r, rng)? == 1 {
            self.flip_to_zero(r)?;
        }
        Ok(())
    }

    fn run_inner(
        &mut self,
        c: &Circuit,
        mut outcome: impl FnMut(&mut StateVector, Reg, usize) -> Result<u8, SimError>,
    ) -> Result<Records, SimError> {
        let mut records = Records::new();
        for op in &c.ops {
            match op {
                Op::Gate { gate } => self.apply_gate(gate)?,
                Op::MoveSwap { i, j } => {
                    self.check_reg(Reg::Fermion(*i))?;
                    self.check_reg(Reg::Fermion(*j))?;
                    self.apply_move_swap(*i, *j)?
                }
                Op::Measure { reg, record } => {
                    let o = outcome(self, *reg, *record)?;
                    records.insert(*record, o);
                }
                Op::Conditioned {
                    record,
                    value,
                    gate,
                } => {
                    let v = records
                        .get(record)
                        .ok_or(SimError::MissingRecord(*record))?;
                    if v == value {
                        self.apply_gate(gate)?;
                    }
                }
                Op::Reset { reg } => {
                    let p1 = self.probability_one(*reg)?;
                    if p1 > 1e-14 {
                        if p1 < 1.0 - 1e-14 {
                            // mixed occupation: treat as an unrecorded measurement
                            let o = outcome(self, *reg, usize::MAX)?;
                            if o == 0 {
                                continue;
                            }
                        }
                        self.flip_to_zero(*reg)?;
                    }
                }
            }
        }
        Ok(records)
    }

    /// Runs a circuit, sampling measurement outcomes.
    pub fn run<R: Rng + ?Sized>(&mut self, c: &Circuit, rng: &mut R) -> Result<Records, SimError> {
        self.run_inner(c, |s, r, _| s.measure(r, rng))
    }

    /// Runs a circuit along the branch with the given outcomes (missing ones read 0).
    /// Returns the records and the total branch probability.
    pub fn run_branch(
        &mut self,
        c: &Circuit,
        forced: &Records,
    ) -> Result<(Records, f64), SimError> {
        let mut prob = 1.0;
        let records = self.run_inner(c, |s, r, rec| {
            let o = forced.get(&rec).copied().unwrap_or(0);
            prob *= s.branch(r, o)?;
            Ok(o)
        })?;
        Ok((records, prob))
    }

    /// Runs a unitary circuit.
    pub fn apply_circuit(&mut self, c: &Circuit) -> Result<(), SimError> {
        self.run_branch(c, &Records::new()).map(|_| ())
    }
}

/// Output amplitudes `⟨m, n1+n2−m| BS |n1, n2⟩` for all `m`.
fn beam_splitter_column(n1: usize, n2: usize, c: f64, s: f64, lf: &[f64]) -> Vec<f64> {
    let total = n1 + n2;
    let mut out = vec![0.0; total + 1];
    let ln_binom = |n: usize, k: usize| lf[n] - lf[k] - lf[n - k];
    // x^e with 0^0 = 1, in log/sign form
    let pow = |x: f64, e: usize| -> Option<(f64, bool)> {
        if e == 0 {
            Some((0.0, false))
        } else if x == 0.0 {
            None
        } else {
            Some((e as f64 * x.abs().ln(), x < 0.0 && e % 2 == 1))
        }
    };
    for k in 0..=n1 {
        for l in 0..=n2 {
            let parts = [pow(c, k), pow(-s, n1 - k), pow(s, l), pow(c, n2 - l)];
            if parts.iter().any(|p| p.is_none()) {
                continue;
            }
            let m = k + l;
            let mut ln =
                ln_binom(n1, k) + ln_binom(n2, l) + 0.5 * (lf[m] + lf[total - m] - lf[n1] - lf[n2]);
            let mut neg = false;
            for p in parts.iter().flatten() {
                ln += p.0;
                neg ^= p.1;
            }
            let v = ln.exp();
            out[m] += if neg { -v } else { v };
        }
    }
    out
}

/// Builds `p_{last}† ⋯ p_0† |vac⟩` times qubit flips times boson Fock states.
pub fn init_state(regs: &Registers, occ: &Occupation) -> Result<StateVector, SimError> {
    let mut s = StateVector::vacuum(regs);
    for (q, &b) in occ.qubits.iter().enumerate() {
        if q >= regs.n_qubits || b > 1 {
            return Err(SimError::Occupation {
                reg: Reg::Qubit(q),
                occupation: b as usize,
            });
        }
        if b == 1 {
            s.apply_gate(&Gate::X { q })?;
        }
    }
    for (f, &b) in occ.fermions.iter().enumerate() {
        if f >= regs.n_fermions || b > 1 {
            return Err(SimError::Occupation {
                reg: Reg::Fermion(f),
                occupation: b as usize,
            });
        }
        if b == 1 {
            s = s.create(f)?;
        }
    }
    if !occ.bosons.is_empty() {
        if occ.bosons.len() > regs.boson_cutoffs.len() {
            return Err(SimError::OutOfRange {
                reg: Reg::Boson(occ.bosons.len() - 1),
            });
        }
        let mut offset = 0;
        for (m, &n) in occ.bosons.iter().enumerate() {
            if n > regs.boson_cutoffs[m] {
                return Err(SimError::Occupation {
                    reg: Reg::Boson(m),
                    occupation: n,
                });
            }
            offset += n * s.boson_stride(m);
        }
        let amps = s.amps.clone();
        s.amps.iter_mut().for_each(|a| *a = C64::new(0.0, 0.0));
        for (idx, a) in amps.iter().enumerate() {
            if a.norm_sqr() > 0.0 {
                s.amps[idx + offset] = *a;
            }
        }
    }
    Ok(s)
}
