//! Circuit intermediate representation over qubit, fermion and boson registers.

use std::f64::consts::PI;
use std::fmt;
use std::ops::{Add, Neg};

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum CircuitError {
    #[error("{reg} is outside the declared registers")]
    OutOfRange { reg: Reg },
    #[error("gate {kind} needs distinct targets")]
    RepeatedTarget { kind: &'static str },
    #[error("record {0} used before it is measured")]
    UndefinedRecord(usize),
    #[error("angle is not finite")]
    NonFiniteAngle,
    #[error("operation {0} has no inverse")]
    NotInvertible(String),
    #[error("cannot parse gate record: {0}")]
    Parse(String),
}

/// An angle, kept as an exact multiple of π when it is one.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Angle {
    /// `num/den · π`
    PiFrac(i64, u64),
    Radians(f64),
}

impl Angle {
    pub const ZERO: Angle = Angle::PiFrac(0, 1);

    pub fn pi_frac(num: i64, den: u64) -> Angle {
        let g = gcd(num.unsigned_abs(), den).max(1);
        Angle::PiFrac(num / g as i64, den / g)
    }

    pub fn radians(r: f64) -> Angle {
        Angle::Radians(r)
    }

    pub fn value(self) -> f64 {
        match self {
            Angle::PiFrac(n, d) => PI * n as f64 / d as f64,
            Angle::Radians(r) => r,
        }
    }

    /// The angle as a whole number of `π/den` steps, if it is one exactly.
    pub fn steps_of(self, den: u64) -> Option<i64> {
        match self {
            Angle::PiFrac(n, d) if den.is_multiple_of(d) => Some(n * (den / d) as i64),
            Angle::PiFrac(..) => None,
            Angle::Radians(0.0) => Some(0),
            Angle::Radians(_) => None,
        }
    }

    pub fn is_finite(self) -> bool {
        match self {
            Angle::PiFrac(_, d) => d > 0,
            Angle::Radians(r) => r.is_finite(),
        }
    }
}

fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

impl Neg for Angle {
    type Output = Angle;

    fn neg(self) -> Angle {
        match self {
            Angle::PiFrac(n, d) => Angle::PiFrac(-n, d),
            Angle::Radians(r) => Angle::Radians(-r),
        }
    }
}

impl Add for Angle {
    type Output = Angle;

    fn add(self, rhs: Angle) -> Angle {
        match (self, rhs) {
            (Angle::PiFrac(a, b), Angle::PiFrac(c, d)) => {
                Angle::pi_frac(a * d as i64 + c * b as i64, b * d)
            }
            _ => Angle::Radians(self.value() + rhs.value()),
        }
    }
}

impl fmt::Display for Angle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Angle::PiFrac(n, d) => write!(f, "{n}π/{d}"),
            Angle::Radians(r) => write!(f, "{r}"),
        }
    }
}

/// A typed register reference.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Reg {
    Qubit(usize),
    Fermion(usize),
    Boson(usize),
}

impl fmt::Display for Reg {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Reg::Qubit(i) => write!(f, "q{i}"),
            Reg::Fermion(i) => write!(f, "f{i}"),
            Reg::Boson(i) => write!(f, "b{i}"),
        }
    }
}

/// Which pulse a hopping gate stands for.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum HopLabel {
    /// tweezer-to-spin-down tunnelling pulse
    TweezerDown,
    /// spin-flip pulse between up and down states of one site
    UpDown,
    Generic,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Gate {
    /// `exp(iπ/4 n)`
    Tf {
        f: usize,
    },
    TfDag {
        f: usize,
    },
    /// `exp(iπ/2 n)`
    Sf {
        f: usize,
    },
    SfDag {
        f: usize,
    },
    /// `exp(iπ n)`
    Zf {
        f: usize,
    },
    /// `exp(iθ n)`
    PhaseF {
        f: usize,
        angle: Angle,
    },
    H {
        q: usize,
    },
    S {
        q: usize,
    },
    SDag {
        q: usize,
    },
    Z {
        q: usize,
    },
    X {
        q: usize,
    },
    T {
        q: usize,
    },
    TDag {
        q: usize,
    },
    /// `diag(1, e^{iθ})`
    PhaseQ {
        q: usize,
        angle: Angle,
    },
    /// `exp(−iθ/2 X)`
    Xrot {
        q: usize,
        angle: Angle,
    },
    /// `exp(−π/4 γ̃_i γ_j)`
    Braid {
        i: usize,
        j: usize,
    },
    /// `exp(−θ/2 γ̃_i γ_j)`
    BraidAngle {
        i: usize,
        j: usize,
        angle: Angle,
    },
    /// `exp(iπ n_i n_j)`
    CZf {
        i: usize,
        j: usize,
    },
    /// `exp(−iθ n_i n_j)`
    CZfAngle {
        i: usize,
        j: usize,
        angle: Angle,
    },
    /// `exp(iπ n_q n_f)`
    CZqf {
        q: usize,
        f: usize,
    },
    /// `exp(−iθ n_q n_f)`
    CZqfAngle {
        q: usize,
        f: usize,
        angle: Angle,
    },
    /// `exp(iπ/4 (p_i†p_j + h.c.))`
    SqrtISwapF {
        i: usize,
        j: usize,
    },
    /// `exp(−iθ (p_a†p_b + h.c.))`
    Hop {
        label: HopLabel,
        a: usize,
        b: usize,
        angle: Angle,
    },
    /// `exp(θ(a†b − b†a))` on two boson modes
    BeamSplitter {
        a: usize,
        b: usize,
        angle: Angle,
    },
    /// `exp(−iτ(e^{iφ} b p_u†p_d† + h.c.))` with `τ = π/(4√n_mean)`
    Dissociate {
        boson: usize,
        up: usize,
        down: usize,
        n_mean: f64,
        phase: Angle,
    },
    /// `exp(+iτ(e^{iφ} b p_i†p_j† + h.c.))` with `τ = π/(4√n_mean)`
    Pair {
        boson: usize,
        i: usize,
        j: usize,
        n_mean: f64,
        phase: Angle,
    },
}

/// Broad cost class of a gate.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GateClass {
    Clifford,
    TType,
    Rotation,
    Boson,
}

impl Gate {
    pub fn kind_name(&self) -> &'static str {
        match self {
            Gate::Tf { .. } => "Tf",
            Gate::TfDag { .. } => "TfDag",
            Gate::Sf { .. } => "Sf",
            Gate::SfDag { .. } => "SfDag",
            Gate::Zf { .. } => "Zf",
            Gate::PhaseF { .. } => "PHASEf",
            Gate::H { .. } => "H",
            Gate::S { .. } => "S",
            Gate::SDag { .. } => "SDag",
            Gate::Z { .. } => "Z",
            Gate::X { .. } => "X",
            Gate::T { .. } => "T",
            Gate::TDag { .. } => "TDag",
            Gate::PhaseQ { .. } => "PHASEq",
            Gate::Xrot { .. } => "Xrot",
            Gate::Braid { .. } => "BRAID",
            Gate::BraidAngle { .. } => "BRAIDθ",
            Gate::CZf { .. } => "CZf",
            Gate::CZfAngle { .. } => "CZfθ",
            Gate::CZqf { .. } => "CZqf",
            Gate::CZqfAngle { .. } => "CZqfθ",
            Gate::SqrtISwapF { .. } => "SQRT_ISWAPf",
            Gate::Hop {
                label: HopLabel::TweezerDown,
                ..
            } => "U_TDOWN",
            Gate::Hop {
                label: HopLabel::UpDown,
                ..
            } => "U_UPDOWN",
            Gate::Hop {
                label: HopLabel::Generic,
                ..
            } => "HOPf",
            Gate::BeamSplitter { .. } => "BS",
            Gate::Dissociate { .. } => "U_DISS",
            Gate::Pair { .. } => "PAIR",
        }
    }

    pub fn targets(&self) -> Vec<Reg> {
        use Reg::*;
        match *self {
            Gate::Tf { f }
            | Gate::TfDag { f }
            | Gate::Sf { f }
            | Gate::SfDag { f }
            | Gate::Zf { f }
            | Gate::PhaseF { f, .. } => vec![Fermion(f)],
            Gate::H { q }
            | Gate::S { q }
            | Gate::SDag { q }
            | Gate::Z { q }
            | Gate::X { q }
            | Gate::T { q }
            | Gate::TDag { q }
            | Gate::PhaseQ { q, .. }
            | Gate::Xrot { q, .. } => vec![Qubit(q)],
            Gate::Braid { i, j }
            | Gate::BraidAngle { i, j, .. }
            | Gate::CZf { i, j }
            | Gate::CZfAngle { i, j, .. }
            | Gate::SqrtISwapF { i, j } => vec![Fermion(i), Fermion(j)],
            Gate::Hop { a, b, .. } => vec![Fermion(a), Fermion(b)],
            Gate::CZqf { q, f } | Gate::CZqfAngle { q, f, .. } => vec![Qubit(q), Fermion(f)],
            Gate::BeamSplitter { a, b, .. } => vec![Boson(a), Boson(b)],
            Gate::Dissociate {
                boson, up, down, ..
            } => vec![Boson(boson), Fermion(up), Fermion(down)],
            Gate::Pair { boson, i, j, .. } => vec![Boson(boson), Fermion(i), Fermion(j)],
        }
    }

    pub fn angle(&self) -> Option<Angle> {
        match *self {
            Gate::PhaseF { angle, .. }
            | Gate::PhaseQ { angle, .. }
            | Gate::Xrot { angle, .. }
            | Gate::BraidAngle { angle, .. }
            | Gate::CZfAngle { angle, .. }
            | Gate::CZqfAngle { angle, .. }
            | Gate::Hop { angle, .. }
            | Gate::BeamSplitter { angle, .. } => Some(angle),
            Gate::Dissociate { phase, .. } | Gate::Pair { phase, .. } => Some(phase),
            _ => None,
        }
    }

    pub fn class(&self) -> GateClass {
        match self {
            Gate::Sf { .. }
            | Gate::SfDag { .. }
            | Gate::Zf { .. }
            | Gate::H { .. }
            | Gate::S { .. }
            | Gate::SDag { .. }
            | Gate::Z { .. }
            | Gate::X { .. }
            | Gate::Braid { .. }
            | Gate::CZf { .. }
            | Gate::CZqf { .. } => GateClass::Clifford,
            Gate::Tf { .. } | Gate::TfDag { .. } | Gate::T { .. } | Gate::TDag { .. } => {
                GateClass::TType
            }
            Gate::BeamSplitter { .. } | Gate::Dissociate { .. } | Gate::Pair { .. } => {
                GateClass::Boson
            }
            _ => GateClass::Rotation,
        }
    }

    fn validate(&self, regs: &Registers) -> Result<(), CircuitError> {
        let t = self.targets();
        for r in &t {
            if !regs.contains(*r) {
                return Err(CircuitError::OutOfRange { reg: *r });
            }
        }
        for a in 0..t.len() {
            for b in a + 1..t.len() {
                if t[a] == t[b] {
                    return Err(CircuitError::RepeatedTarget {
                        kind: self.kind_name(),
                    });
                }
            }
        }
        if let Some(a) = self.angle() {
            if !a.is_finite() {
                return Err(CircuitError::NonFiniteAngle);
            }
        }
        match self {
            Gate::Dissociate { n_mean, .. } | Gate::Pair { n_mean, .. }
                if !n_mean.is_finite() || *n_mean < 0.0 =>
            {
                Err(CircuitError::NonFiniteAngle)
            }
            _ => Ok(()),
        }
    }

    /// The inverse as a short gate sequence in time order, staying inside the gate set.
    pub fn inverse(&self) -> Vec<Gate> {
        match *self {
            Gate::Tf { f } => vec![Gate::TfDag { f }],
            Gate::TfDag { f } => vec![Gate::Tf { f }],
            Gate::Sf { f } => vec![Gate::SfDag { f }],
            Gate::SfDag { f } => vec![Gate::Sf { f }],
            Gate::PhaseF { f, angle } => vec![Gate::PhaseF { f, angle: -angle }],
            Gate::S { q } => vec![Gate::SDag { q }],
            Gate::SDag { q } => vec![Gate::S { q }],
            Gate::T { q } => vec![Gate::TDag { q }],
            Gate::TDag { q } => vec![Gate::T { q }],
            Gate::PhaseQ { q, angle } => vec![Gate::PhaseQ { q, angle: -angle }],
            Gate::Xrot { q, angle } => vec![Gate::Xrot { q, angle: -angle }],
            Gate::Braid { i, j } => {
                vec![Gate::Zf { f: j }, Gate::Braid { i, j }, Gate::Zf { f: j }]
            }
            Gate::BraidAngle { i, j, angle } => vec![Gate::BraidAngle {
                i,
                j,
                angle: -angle,
            }],
            Gate::CZfAngle { i, j, angle } => vec![Gate::CZfAngle {
                i,
                j,
                angle: -angle,
            }],
            Gate::CZqfAngle { q, f, angle } => vec![Gate::CZqfAngle {
                q,
                f,
                angle: -angle,
            }],
            Gate::SqrtISwapF { i, j } => vec![Gate::Hop {
                label: HopLabel::Generic,
                a: i,
                b: j,
                angle: Angle::pi_frac(1, 4),
            }],
            Gate::Hop { label, a, b, angle } => vec![Gate::Hop {
                label,
                a,
                b,
                angle: -angle,
            }],
            Gate::BeamSplitter { a, b, angle } => vec![Gate::BeamSplitter {
                a,
                b,
                angle: -angle,
            }],
            Gate::Dissociate {
                boson,
                up,
                down,
                n_mean,
                phase,
            } => {
                vec![Gate::Dissociate {
                    boson,
                    up,
                    down,
                    n_mean,
                    phase: phase + Angle::pi_frac(1, 1),
                }]
            }
            Gate::Pair {
                boson,
                i,
                j,
                n_mean,
                phase,
            } => {
                vec![Gate::Pair {
                    boson,
                    i,
                    j,
                    n_mean,
                    phase: phase + Angle::pi_frac(1, 1),
                }]
            }
            g @ (Gate::Zf { .. }
            | Gate::H { .. }
            | Gate::Z { .. }
            | Gate::X { .. }
            | Gate::CZf { .. }
            | Gate::CZqf { .. }) => {
                vec![g]
            }
        }
    }
}

/// Register counts of a circuit or state.
#[derive(Clone, Debug, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct Registers {
    pub n_qubits: usize,
    pub n_fermions: usize,
    /// Highest Fock level kept per boson mode.
    #[serde(default)]
    pub boson_cutoffs: Vec<usize>,
}

impl Registers {
    pub fn new(n_qubits: usize, n_fermions: usize) -> Self {
        Self {
            n_qubits,
            n_fermions,
            boson_cutoffs: Vec::new(),
        }
    }

    pub fn with_bosons(mut self, cutoffs: Vec<usize>) -> Self {
        self.boson_cutoffs = cutoffs;
        self
    }

    pub fn contains(&self, r: Reg) -> bool {
        match r {
            Reg::Qubit(i) => i < self.n_qubits,
            Reg::Fermion(i) => i < self.n_fermions,
            Reg::Boson(i) => i < self.boson_cutoffs.len(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "op", rename_all = "snake_case")]
pub enum Op {
    Gate {
        gate: Gate,
    },
    /// Z-basis measurement of a qubit or occupation measurement of a fermion mode.
    Measure {
        reg: Reg,
        record: usize,
    },
    /// Applies `gate` when the record equals `value`.
    Conditioned {
        record: usize,
        value: u8,
        gate: Gate,
    },
    /// Returns a qubit or fermion mode to `|0⟩`.
    Reset {
        reg: Reg,
    },
    /// Exchange of two fermion modes by moving atoms.
    MoveSwap {
        i: usize,
        j: usize,
    },
}

impl Op {
    pub fn targets(&self) -> Vec<Reg> {
        match self {
            Op::Gate { gate } | Op::Conditioned { gate, .. } => gate.targets(),
            Op::Measure { reg, .. } | Op::Reset { reg } => vec![*reg],
            Op::MoveSwap { i, j } => vec![Reg::Fermion(*i), Reg::Fermion(*j)],
        }
    }
}

#[derive(Clone, Debug, PartialEq, Default, Serialize, Deserialize)]
pub struct Circuit {
    pub registers: Registers,
    pub ops: Vec<Op>,
}

impl Circuit {
    pub fn new(registers: Registers) -> Self {
        Self {
            registers,
            ops: Vec::new(),
        }
    }

    pub fn gate(&mut self, g: Gate) -> &mut Self {
        self.ops.push(Op::Gate { gate: g });
        self
    }

    pub fn gates(&mut self, gs: impl IntoIterator<Item = Gate>) -> &mut Self {
        for g in gs {
            self.gate(g);
        }
        self
    }

    pub fn push(&mut self, op: Op) -> &mut Self {
        self.ops.push(op);
        self
    }

    pub fn move_swap(&mut self, i: usize, j: usize) -> &mut Self {
        self.ops.push(Op::MoveSwap { i, j });
        self
    }

    /// Appends the ops of `other`, which must fit in these registers.
    pub fn extend(&mut self, other: &Circuit) -> &mut Self {
        self.ops.extend(other.ops.iter().cloned());
        self
    }

    /// Copy with fermion modes renamed through `map`.
    pub fn remap_fermions(&self, registers: Registers, map: impl Fn(usize) -> usize) -> Circuit {
        let remap_gate = |g: &Gate| -> Gate {
            let mut g = *g;
            match &mut g {
                Gate::Tf { f }
                | Gate::TfDag { f }
                | Gate::Sf { f }
                | Gate::SfDag { f }
                | Gate::Zf { f }
                | Gate::PhaseF { f, .. }
                | Gate::CZqf { f, .. }
                | Gate::CZqfAngle { f, .. } => *f = map(*f),
                Gate::Braid { i, j }
                | Gate::BraidAngle { i, j, .. }
                | Gate::CZf { i, j }
                | Gate::CZfAngle { i, j, .. }
                | Gate::SqrtISwapF { i, j }
                | Gate::Pair { i, j, .. } => {
                    *i = map(*i);
                    *j = map(*j);
                }
                Gate::Hop { a, b, .. } => {
                    *a = map(*a);
                    *b = map(*b);
                }
                Gate::Dissociate { up, down, .. } => {
                    *up = map(*up);
                    *down = map(*down);
                }
                _ => {}
            }
            g
        };
        let remap_reg = |r: Reg| match r {
            Reg::Fermion(i) => Reg::Fermion(map(i)),
            other => other,
        };
        let ops = self
            .ops
            .iter()
            .map(|op| match op {
                Op::Gate { gate } => Op::Gate {
                    gate: remap_gate(gate),
                },
                Op::Conditioned {
                    record,
                    value,
                    gate,
                } => Op::Conditioned {
                    record: *record,
                    value: *value,
                    gate: remap_gate(gate),
                },
                Op::Measure { reg, record } => Op::Measure {
                    reg: remap_reg(*reg),
                    record: *record,
                },
                Op::Reset { reg } => Op::Reset {
                    reg: remap_reg(*reg),
                },
                Op::MoveSwap { i, j } => Op::MoveSwap {
                    i: map(*i),
                    j: map(*j),
                },
            })
            .collect();
        Circuit { registers, ops }
    }

    /// The inverse circuit; fails on measurements and resets.
    pub fn inverse(&self) -> Result<Circuit, CircuitError> {
        let mut out = Circuit::new(self.registers.clone());
        for op in self.ops.iter().rev() {
            match op {
                Op::Gate { gate } => {
                    out.gates(gate.inverse());
                }
                Op::MoveSwap { i, j } => {
                    out.move_swap(*i, *j);
                }
                other => return Err(CircuitError::NotInvertible(format!("{other:?}"))),
            }
        }
        Ok(out)
    }

    pub fn validate(&self) -> Result<(), CircuitError> {
        let mut records = std::collections::BTreeSet::new();
        for op in &self.ops {
            match op {
                Op::Gate { gate } => gate.validate(&self.registers)?,
                Op::Conditioned { record, gate, .. } => {
                    if !records.contains(record) {
                        return Err(CircuitError::UndefinedRecord(*record));
                    }
                    gate.validate(&self.registers)?;
                }
                Op::Measure { reg, record } => {
                    if !self.registers.contains(*reg) {
                        return Err(CircuitError::OutOfRange { reg: *reg });
                    }
                    records.insert(*record);
                }
                Op::Reset { reg } => {
                    if !self.registers.contains(*reg) {
                        return Err(CircuitError::OutOfRange { reg: *reg });
                    }
                }
                Op::MoveSwap { i, j } => {
                    for r in [Reg::Fermion(*i), Reg::Fermion(*j)] {
                        if !self.registers.contains(r) {
                            return Err(CircuitError::OutOfRange { reg: r });
                        }
                    }
                    if i == j {
                        return Err(CircuitError::RepeatedTarget { kind: "move-swap" });
                    }
                }
            }
        }
        Ok(())
    }

    pub fn is_unitary(&self) -> bool {
        self.ops
            .iter()
            .all(|op| matches!(op, Op::Gate { .. } | Op::MoveSwap { .. }))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("circuit serializes")
    }

    pub fn from_json(s: &str) -> Result<Circuit, CircuitError> {
        let c: Circuit = serde_json::from_str(s).map_err(|e| CircuitError::Parse(e.to_string()))?;
        c.validate()?;
        Ok(c)
    }
}
