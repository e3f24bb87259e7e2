//! Molecule-dissociation pairing gate and its benchmarks.
//!
//! The full seven-pulse sequence runs on the dense simulator for small
//! molecule numbers. Benchmarks at large `N` use [`Sector`], which keeps only
//! the states reachable from a Fock reservoir split over two molecule modes:
//! `n₁ + n₂ + p = N` with `p` the pair occupation of the target sites.

use std::f64::consts::PI;

use nalgebra::DMatrix;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::circuit::{Angle, Circuit, Gate, HopLabel, Op, Reg, Registers};
use crate::sim::SimError;
use crate::tomography::{reconstruct, DensityMatrixOnSubspace, Setting, TomographyError};
use crate::C64;

#[derive(Debug, Error)]
pub enum PairingError {
    #[error("molecule mode {0} is measured while fermions are entangled with it")]
    MoleculesMeasured(usize),
    #[error("register layout lacks {0}")]
    Layout(&'static str),
    #[error("invalid parameter: {0}")]
    Parameter(String),
    #[error(transparent)]
    Sim(#[from] SimError),
    #[error(transparent)]
    Tomography(#[from] TomographyError),
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PairingConfig {
    /// molecule number the pulse duration is calibrated for
    pub n_mean: f64,
    /// gate phase φ in radians
    #[serde(default)]
    pub phase: f64,
    /// Fock levels kept above the initial molecule number
    #[serde(default = "default_margin")]
    pub cutoff_margin: usize,
}

fn default_margin() -> usize {
    3
}

/// Where each participant of one pairing gate lives.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PairLayout {
    pub registers: Registers,
    /// `↓` state of site `i`
    pub i: usize,
    /// `↓` state of site `j`
    pub j: usize,
    /// `↑` state of site `i`
    pub up: usize,
    /// molecule storage mode
    pub storage: usize,
    /// molecule mode in the tweezer of site `i`
    pub tweezer: usize,
}

impl PairLayout {
    /// Fermions `[i↓, j↓, i↑]`, molecule modes `[storage, tweezer]`.
    pub fn standard(n_molecules: usize, cfg: &PairingConfig) -> Self {
        let cut = n_molecules + cfg.cutoff_margin;
        Self {
            registers: Registers::new(0, 3).with_bosons(vec![cut, cut]),
            i: 0,
            j: 1,
            up: 2,
            storage: 0,
            tweezer: 1,
        }
    }

    fn validate(&self) -> Result<(), PairingError> {
        let r = &self.registers;
        for f in [self.i, self.j, self.up] {
            if !r.contains(Reg::Fermion(f)) {
                return Err(PairingError::Layout("a fermion mode"));
            }
        }
        if self.i == self.j || self.i == self.up || self.j == self.up {
            return Err(PairingError::Layout("distinct fermion modes"));
        }
        for b in [self.storage, self.tweezer] {
            if !r.contains(Reg::Boson(b)) {
                return Err(PairingError::Layout("a molecule mode"));
            }
        }
        if self.storage == self.tweezer {
            return Err(PairingError::Layout("distinct molecule modes"));
        }
        Ok(())
    }
}

/// Seven pulses: spin flip, spin-selective tunnelling, molecule transfer,
/// dissociation, and the first three undone. Inverse fermion pulses are the
/// forward pulse conjugated by `Zf` on one of its modes.
pub fn pair_circuit(layout: &PairLayout, cfg: &PairingConfig) -> Result<Circuit, PairingError> {
    layout.validate()?;
    if cfg.n_mean.is_nan() || cfg.n_mean < 0.0 || !cfg.phase.is_finite() {
        return Err(PairingError::Parameter(format!(
            "n_mean {} phase {}",
            cfg.n_mean, cfg.phase
        )));
    }
    let half = Angle::pi_frac(1, 2);
    let spin_flip = Gate::Hop {
        label: HopLabel::UpDown,
        a: layout.up,
        b: layout.i,
        angle: half,
    };
    let tunnel = Gate::Hop {
        label: HopLabel::TweezerDown,
        a: layout.i,
        b: layout.j,
        angle: half,
    };
    let mut c = Circuit::new(layout.registers.clone());
    c.gate(spin_flip)
        .gate(tunnel)
        .gate(Gate::BeamSplitter {
            a: layout.tweezer,
            b: layout.storage,
            angle: half,
        })
        .gate(Gate::Dissociate {
            boson: layout.tweezer,
            up: layout.up,
            down: layout.i,
            n_mean: cfg.n_mean,
            phase: Angle::radians(cfg.phase),
        })
        .gate(Gate::BeamSplitter {
            a: layout.tweezer,
            b: layout.storage,
            angle: -half,
        })
        .gates([Gate::Zf { f: layout.j }, tunnel, Gate::Zf { f: layout.j }])
        .gates([
            Gate::Zf { f: layout.i },
            spin_flip,
            Gate::Zf { f: layout.i },
        ]);
    Ok(c)
}

/// Rejects circuits that measure a molecule mode after it took part in a
/// pairing or dissociation gate.
pub fn guard_schedule(c: &Circuit) -> Result<(), PairingError> {
    let mut entangled = std::collections::BTreeSet::new();
    for op in &c.ops {
        match op {
            Op::Gate {
                gate: Gate::Pair { boson, .. } | Gate::Dissociate { boson, .. },
            } => {
                entangled.insert(*boson);
            }
            Op::Measure {
                reg: Reg::Boson(m), ..
            } if entangled.contains(m) => {
                return Err(PairingError::MoleculesMeasured(*m));
            }
            _ => {}
        }
    }
    Ok(())
}

/// Which molecule mode drives a pulse, or an ideal pulse with no molecules.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Drive {
    First,
    Second,
    Ideal,
}

/// Pure state on `n₁ + n₂ + p = total`, index `p·(total+1) + n₁`.
#[derive(Clone, Debug, PartialEq)]
pub struct Sector {
    total: usize,
    amps: Vec<C64>,
    /// mean occupations the pulses are calibrated for
    means: [f64; 2],
}

impl Sector {
    /// `total` molecules in the second mode, split by `BS(θ) = exp(θ(a†b − b†a))`
    /// with `a` the first mode: `n₁ ~ Binomial(total, sin²θ)`.
    pub fn split(total: usize, theta: f64, means: [f64; 2]) -> Self {
        let (s, c) = theta.sin_cos();
        let mut amps = vec![C64::new(0.0, 0.0); 2 * (total + 1)];
        let mut log_binom = 0.0f64;
        for (n1, amp) in amps.iter_mut().take(total + 1).enumerate() {
            if n1 > 0 {
                log_binom += ((total - n1 + 1) as f64).ln() - (n1 as f64).ln();
            }
            let pow = |k: usize, x: f64| if k == 0 { 0.0 } else { k as f64 * x.abs().ln() };
            let log_amp = 0.5 * log_binom + pow(n1, s) + pow(total - n1, c);
            let sign = if (s < 0.0 && n1 % 2 == 1) ^ (c < 0.0 && (total - n1) % 2 == 1) {
                -1.0
            } else {
                1.0
            };
            *amp = C64::new(sign * log_amp.exp(), 0.0);
        }
        Self { total, amps, means }
    }

    fn idx(&self, p: usize, n1: usize) -> usize {
        p * (self.total + 1) + n1
    }

    /// Pairing pulse `exp(iτ(e^{iφ} b p_i†p_j† + h.c.))`, `τ = π/(4√mean)`.
    pub fn pulse(&mut self, drive: Drive, phi: f64) {
        let e = C64::from_polar(1.0, phi);
        let i = C64::new(0.0, 1.0);
        if drive == Drive::Ideal {
            let (c, s) = (FRAC_PI_4_COS, FRAC_PI_4_COS);
            for n1 in 0..=self.total {
                let (a, b) = (self.idx(0, n1), self.idx(1, n1));
                let (xa, xb) = (self.amps[a], self.amps[b]);
                self.amps[a] = c * xa + i * s * e.conj() * xb;
                self.amps[b] = c * xb + i * s * e * xa;
            }
            return;
        }
        let mode = if drive == Drive::First { 0 } else { 1 };
        let mean = self.means[mode];
        if mean <= 0.0 {
            return;
        }
        let tau = PI / (4.0 * mean.sqrt());
        for n1 in 0..=self.total {
            let n2 = self.total - n1;
            let n = if mode == 0 { n1 } else { n2 };
            if n == 0 {
                continue;
            }
            // |n₁, n₂, 0⟩ ↔ one molecule fewer in the driving mode, pair present
            let a = self.idx(0, n1);
            let b = self.idx(1, if mode == 0 { n1 - 1 } else { n1 });
            let x = tau * (n as f64).sqrt();
            let (c, s) = (x.cos(), x.sin());
            let (xa, xb) = (self.amps[a], self.amps[b]);
            self.amps[a] = c * xa + i * s * e.conj() * xb;
            self.amps[b] = c * xb + i * s * e * xa;
        }
    }

    /// `exp(−iθ n)` on one of the paired sites.
    pub fn phase(&mut self, theta: f64) {
        let ph = C64::from_polar(1.0, -theta);
        let start = self.total + 1;
        for a in &mut self.amps[start..] {
            *a *= ph;
        }
    }

    /// `[P(p = 0), P(p = 1)]`
    pub fn populations(&self) -> [f64; 2] {
        let k = self.total + 1;
        let p0 = self.amps[..k].iter().map(|a| a.norm_sqr()).sum();
        let p1 = self.amps[k..].iter().map(|a| a.norm_sqr()).sum();
        [p0, p1]
    }

    /// Amplitude of `|n₁, n₂, p⟩`, with `|p = 1⟩ = p_i†p_j†|vac⟩`.
    pub fn amplitude(&self, n1: usize, n2: usize, p: usize) -> C64 {
        if p > 1 || n1 + n2 + p != self.total {
            return C64::new(0.0, 0.0);
        }
        self.amps[self.idx(p, n1)]
    }
}

const FRAC_PI_4_COS: f64 = std::f64::consts::FRAC_1_SQRT_2;

/// A sequence of pulses and phases on a [`Sector`].
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Step {
    Pulse(Drive, f64),
    Phase(f64),
}

/// Molecule source feeding the splitter.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Source {
    Fock,
    Poisson,
}

/// Two molecule modes made from one reservoir with designed means `n1`, `n2`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Reservoir {
    pub n1: f64,
    pub n2: f64,
    pub source: Source,
}

impl Reservoir {
    /// Splitter angle with `sin²θ = n1/(n1+n2)`, so that the second mode keeps
    /// `cos²θ = n2/(n1+n2)` of the reservoir.
    pub fn angle(&self) -> f64 {
        let total = self.n1 + self.n2;
        if total <= 0.0 {
            return 0.0;
        }
        (self.n2 / total).sqrt().clamp(0.0, 1.0).acos()
    }

    /// Fock components and their weights.
    fn components(&self) -> Vec<(usize, f64)> {
        let mean = self.n1 + self.n2;
        match self.source {
            Source::Fock => vec![(mean.round() as usize, 1.0)],
            Source::Poisson => poisson_weights(mean, 1e-14),
        }
    }

    /// Readout populations after each step list, mixed over the source.
    pub fn run(&self, programs: &[Vec<Step>]) -> Vec<[f64; 2]> {
        let theta = self.angle();
        let means = [self.n1, self.n2];
        let parts: Vec<Vec<[f64; 2]>> = self
            .components()
            .par_iter()
            .map(|&(n, w)| {
                let start = Sector::split(n, theta, means);
                programs
                    .iter()
                    .map(|prog| {
                        let mut s = start.clone();
                        for step in prog {
                            match *step {
                                Step::Pulse(d, phi) => s.pulse(d, phi),
                                Step::Phase(t) => s.phase(t),
                            }
                        }
                        let [p0, p1] = s.populations();
                        [w * p0, w * p1]
                    })
                    .collect()
            })
            .collect();
        let mut out = vec![[0.0; 2]; programs.len()];
        for part in parts {
            for (o, p) in out.iter_mut().zip(part) {
                o[0] += p[0];
                o[1] += p[1];
            }
        }
        out
    }
}

/// Poisson weights over the smallest window around the mean holding all but `tail`.
pub fn poisson_weights(mean: f64, tail: f64) -> Vec<(usize, f64)> {
    if mean <= 0.0 {
        return vec![(0, 1.0)];
    }
    let centre = mean.floor() as usize;
    let log_p = |n: usize| -> f64 {
        let mut lg = 0.0;
        for k in 2..=n {
            lg += (k as f64).ln();
        }
        n as f64 * mean.ln() - mean - lg
    };
    let base = log_p(centre);
    let mut weights = vec![(centre, base.exp())];
    // walk outwards with the ratio p(n+1)/p(n) = mean/(n+1)
    let mut lp = base;
    let mut n = centre;
    loop {
        lp += (mean / (n + 1) as f64).ln();
        n += 1;
        let w = lp.exp();
        weights.push((n, w));
        if w < tail * 1e-3 && n as f64 > mean + 1.0 {
            break;
        }
    }
    let mut lp = base;
    let mut n = centre;
    while n > 0 {
        lp -= (mean / n as f64).ln();
        n -= 1;
        let w = lp.exp();
        weights.push((n, w));
        if w < tail * 1e-3 {
            break;
        }
    }
    weights.sort_by_key(|&(n, _)| n);
    let total: f64 = weights.iter().map(|w| w.1).sum();
    weights.into_iter().map(|(n, w)| (n, w / total)).collect()
}

/// Ideal pulse `exp(iπ/4(e^{iφ}σ⁺ + e^{−iφ}σ⁻))` on `{|00⟩, |11⟩}`.
pub fn ideal_pulse(phi: f64) -> DMatrix<C64> {
    let c = FRAC_PI_4_COS;
    let i = C64::new(0.0, 1.0);
    DMatrix::from_row_slice(
        2,
        2,
        &[
            C64::new(c, 0.0),
            i * c * C64::from_polar(1.0, -phi),
            i * c * C64::from_polar(1.0, phi),
            C64::new(c, 0.0),
        ],
    )
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Wiring {
    SameMode,
    CrossMode,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FringeData {
    pub n: usize,
    pub wiring: Wiring,
    pub thetas: Vec<f64>,
    /// probability that both sites end empty
    pub probabilities: Vec<f64>,
    pub contrast: f64,
    pub offset: f64,
    /// RMS deviation from the fitted `½ + ½(C cosθ − D)`
    pub residual: f64,
}

pub fn theta_grid(points: usize) -> Vec<f64> {
    (0..points)
        .map(|k| 2.0 * PI * k as f64 / points as f64)
        .collect()
}

/// Unweighted least squares of `½ + ½(C cosθ − D)`; returns `(C, D, rms)`.
pub fn fit_fringe(thetas: &[f64], probs: &[f64]) -> (f64, f64, f64) {
    let n = thetas.len() as f64;
    let (mut sc, mut scc, mut sp, mut spc) = (0.0, 0.0, 0.0, 0.0);
    for (t, p) in thetas.iter().zip(probs) {
        let c = t.cos();
        sc += c;
        scc += c * c;
        sp += p;
        spc += p * c;
    }
    // p ≈ a + b cosθ
    let det = n * scc - sc * sc;
    let b = (n * spc - sc * sp) / det;
    let a = (sp - b * sc) / n;
    let rms = (thetas
        .iter()
        .zip(probs)
        .map(|(t, p)| (p - a - b * t.cos()).powi(2))
        .sum::<f64>()
        / n)
        .sqrt();
    (2.0 * b, 1.0 - 2.0 * a, rms)
}

/// Ramsey sequence on `n` molecules: pulse, `exp(−iθ n)`, reversing pulse
/// (`φ = π`). The molecules are split 50/50 over two modes; the first pulse
/// uses the first mode and the second pulse the same or the other one.
pub fn ramsey(n: usize, wiring: Wiring, thetas: &[f64]) -> Result<FringeData, PairingError> {
    if thetas.len() < 3 {
        return Err(PairingError::Parameter("need at least three phases".into()));
    }
    let half = n as f64 / 2.0;
    let res = Reservoir {
        n1: half,
        n2: half,
        source: Source::Fock,
    };
    let second = match wiring {
        Wiring::SameMode => Drive::First,
        Wiring::CrossMode => Drive::Second,
    };
    let programs: Vec<Vec<Step>> = thetas
        .iter()
        .map(|&t| {
            vec![
                Step::Pulse(Drive::First, 0.0),
                Step::Phase(t),
                Step::Pulse(second, PI),
            ]
        })
        .collect();
    let probabilities: Vec<f64> = res.run(&programs).iter().map(|p| p[0]).collect();
    let (contrast, offset, residual) = fit_fringe(thetas, &probabilities);
    Ok(FringeData {
        n,
        wiring,
        thetas: thetas.to_vec(),
        probabilities,
        contrast,
        offset,
        residual,
    })
}

/// Slope and intercept of `log y` against `log x`, with the RMS residual.
pub fn log_log_fit(xs: &[f64], ys: &[f64]) -> (f64, f64, f64) {
    let lx: Vec<f64> = xs.iter().map(|x| x.ln()).collect();
    let ly: Vec<f64> = ys.iter().map(|y| y.ln()).collect();
    let n = lx.len() as f64;
    let mx = lx.iter().sum::<f64>() / n;
    let my = ly.iter().sum::<f64>() / n;
    let sxy: f64 = lx.iter().zip(&ly).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = lx.iter().map(|x| (x - mx).powi(2)).sum();
    let slope = sxy / sxx;
    let icpt = my - slope * mx;
    let rms = (lx
        .iter()
        .zip(&ly)
        .map(|(x, y)| (y - icpt - slope * x).powi(2))
        .sum::<f64>()
        / n)
        .sqrt();
    (slope, icpt, rms)
}

const TOMOGRAPHY_PHASES: [Option<f64>; 3] = [None, Some(0.0), Some(PI / 2.0)];

fn pair_labels() -> Vec<String> {
    vec!["00".into(), "11".into()]
}

/// Reconstructs the pair state after `prep` from the three readout settings
/// (none, `φ = 0`, `φ = π/2`) driven by `readout`.
fn pair_tomography(
    res: &Reservoir,
    preps: &[Vec<Step>],
    readout: Drive,
) -> Result<Vec<DensityMatrixOnSubspace>, PairingError> {
    let mut programs = Vec::new();
    for prep in preps {
        for ph in TOMOGRAPHY_PHASES {
            let mut p = prep.clone();
            if let Some(phi) = ph {
                p.push(Step::Pulse(readout, phi));
            }
            programs.push(p);
        }
    }
    let pops = res.run(&programs);
    let identity = DMatrix::identity(2, 2);
    pops.chunks(3)
        .map(|chunk| {
            let settings: Vec<Setting> = chunk
                .iter()
                .zip(TOMOGRAPHY_PHASES)
                .map(|(p, ph)| Setting {
                    rotation: ph.map_or(identity.clone(), ideal_pulse),
                    populations: p.to_vec(),
                })
                .collect();
            Ok(reconstruct(&pair_labels(), &settings)?)
        })
        .collect()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BellResult {
    pub n1: f64,
    pub n2: f64,
    pub rho: DensityMatrixOnSubspace,
    /// `1 − ⟨ψ|ρ|ψ⟩`, `ψ = (|00⟩ + i|11⟩)/√2`
    pub infidelity: f64,
}

pub fn bell_target() -> [C64; 2] {
    let c = FRAC_PI_4_COS;
    [C64::new(c, 0.0), C64::new(0.0, c)]
}

fn bell_from(res: Reservoir, prep: Drive, readout: Drive) -> Result<BellResult, PairingError> {
    let rho = pair_tomography(&res, &[vec![Step::Pulse(prep, 0.0)]], readout)?.remove(0);
    let infidelity = 1.0 - rho.fidelity_with(&bell_target());
    Ok(BellResult {
        n1: res.n1,
        n2: res.n2,
        rho,
        infidelity,
    })
}

/// Bell pair prepared by a pulse on the second mode (`n2` molecules) and
/// read out with pulses on the first (`n1`).
pub fn bell_experiment(n1: f64, n2: f64) -> Result<BellResult, PairingError> {
    if n1 < 0.0 || n2 < 0.0 {
        return Err(PairingError::Parameter("negative molecule number".into()));
    }
    bell_from(
        Reservoir {
            n1,
            n2,
            source: Source::Fock,
        },
        Drive::Second,
        Drive::First,
    )
}

/// The same tomography with ideal pulses throughout.
pub fn bell_closed_loop() -> Result<BellResult, PairingError> {
    bell_from(
        Reservoir {
            n1: 0.0,
            n2: 0.0,
            source: Source::Fock,
        },
        Drive::Ideal,
        Drive::Ideal,
    )
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ChoiResult {
    pub n1: f64,
    pub n2: f64,
    pub source: Source,
    /// on `|0000⟩, |0011⟩, |1100⟩, |1111⟩` (system pair, ancilla pair)
    pub choi: DensityMatrixOnSubspace,
    pub entanglement_fidelity: f64,
    /// `(d F_e + 1)/(d + 1)` with `d = 2`
    pub average_fidelity: f64,
    pub average_infidelity: f64,
}

/// Choi matrix of the effective gate on `{|00⟩, |11⟩}`: four inputs
/// (`|0⟩`, `|1⟩`, `|+⟩`, `|+i⟩`) prepared and read out with pulses on `prep`,
/// the gate under test driven by `gate`.
fn choi_from(res: Reservoir, prep: Drive, gate: Drive) -> Result<ChoiResult, PairingError> {
    let g = Step::Pulse(gate, 0.0);
    let preps = vec![
        vec![g],
        vec![Step::Pulse(prep, 0.0), Step::Pulse(prep, 0.0), g],
        vec![Step::Pulse(prep, -PI / 2.0), g],
        vec![Step::Pulse(prep, 0.0), g],
    ];
    let outs: Vec<DMatrix<C64>> = pair_tomography(&res, &preps, prep)?
        .iter()
        .map(|r| r.to_matrix())
        .collect();
    let (e0, e1, ep, ei) = (&outs[0], &outs[1], &outs[2], &outs[3]);
    // E(|0⟩⟨1|) = E(ρ₊) + iE(ρ₊ᵢ) − ½(1+i)(E(ρ₀) + E(ρ₁))
    let half_1pi = C64::new(0.5, 0.5);
    let i = C64::new(0.0, 1.0);
    let e01 = ep + ei * i - (e0 + e1) * half_1pi;
    let e10 = e01.adjoint();
    let blocks = [[e0.clone(), e01], [e10, e1.clone()]];
    // J = ½ Σ E(|a⟩⟨b|) ⊗ |a⟩⟨b|, index 2·s + a
    let j = DMatrix::from_fn(4, 4, |r, c| {
        let (sr, ar) = (r / 2, r % 2);
        let (sc, ac) = (c / 2, c % 2);
        blocks[ar][ac][(sr, sc)] * 0.5
    });
    let u = ideal_pulse(0.0);
    let target: Vec<C64> = (0..4)
        .map(|k| {
            let (s, a) = (k / 2, k % 2);
            u[(s, a)] * FRAC_PI_4_COS
        })
        .collect();
    let v = nalgebra::DVector::from_vec(target);
    let fe = (v.adjoint() * &j * &v)[(0, 0)].re;
    let labels = ["0000", "0011", "1100", "1111"]
        .iter()
        .map(|s| s.to_string())
        .collect();
    let choi = DensityMatrixOnSubspace {
        labels,
        matrix: (0..4)
            .map(|r| (0..4).map(|c| j[(r, c)]).collect())
            .collect(),
    };
    let fav = (2.0 * fe + 1.0) / 3.0;
    Ok(ChoiResult {
        n1: res.n1,
        n2: res.n2,
        source: res.source,
        choi,
        entanglement_fidelity: fe,
        average_fidelity: fav,
        average_infidelity: 1.0 - fav,
    })
}

/// Gate driven by the second mode (`n2`), tomography by the first (`n1`).
pub fn choi_experiment(n1: f64, n2: f64, source: Source) -> Result<ChoiResult, PairingError> {
    if n1 < 0.0 || n2 < 0.0 {
        return Err(PairingError::Parameter("negative molecule number".into()));
    }
    choi_from(Reservoir { n1, n2, source }, Drive::First, Drive::Second)
}

/// The Choi construction with the ideal gate and ideal tomography.
pub fn choi_closed_loop() -> Result<ChoiResult, PairingError> {
    choi_from(
        Reservoir {
            n1: 0.0,
            n2: 0.0,
            source: Source::Fock,
        },
        Drive::Ideal,
        Drive::Ideal,
    )
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Convergence {
    /// `(n1, average infidelity)` in the order tried
    pub trail: Vec<(f64, f64)>,
    pub result: ChoiResult,
    pub converged: bool,
}

/// Doubles `n1` from `start` until the average infidelity changes by less
/// than `rel` relative, or `max_n1` is passed.
pub fn choi_converged(
    n2: f64,
    source: Source,
    start: f64,
    rel: f64,
    max_n1: f64,
) -> Result<Convergence, PairingError> {
    let mut n1 = start.max(1.0);
    let mut prev = choi_experiment(n1, n2, source)?;
    let mut trail = vec![(n1, prev.average_infidelity)];
    loop {
        n1 *= 2.0;
        if n1 > max_n1 {
            return Ok(Convergence {
                trail,
                result: prev,
                converged: false,
            });
        }
        let next = choi_experiment(n1, n2, source)?;
        trail.push((n1, next.average_infidelity));
        let change = (next.average_infidelity - prev.average_infidelity).abs()
            / prev.average_infidelity.abs().max(1e-300);
        if change < rel {
            return Ok(Convergence {
                trail,
                result: next,
                converged: true,
            });
        }
        prev = next;
    }
}
