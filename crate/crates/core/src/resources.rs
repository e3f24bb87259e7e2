//! Gate counts and ASAP depth of circuits.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::circuit::{Circuit, Gate, GateClass, Op, Reg};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ResourceReport {
    pub counts: BTreeMap<String, usize>,
    pub clifford_count: usize,
    pub t_count: usize,
    /// arbitrary-angle gates, which would need synthesis
    pub rotation_count: usize,
    pub measurement_count: usize,
    pub move_swaps: usize,
    /// ASAP depth over all ops (move-swaps free unless priced)
    pub depth: usize,
    /// depth with arbitrary-angle rotations left out
    pub depth_without_rotations: usize,
    /// layers holding at least one T-type or arbitrary-angle gate
    pub non_clifford_depth: usize,
}

#[derive(Clone, Debug)]
pub struct CostModel {
    pub clifford_kinds: BTreeSet<String>,
    pub move_swaps_cost_depth: bool,
    /// count each move-swap as one two-qubit Clifford (an fSWAP)
    pub move_swaps_are_cliffords: bool,
}

impl Default for CostModel {
    fn default() -> Self {
        let kinds = [
            "Sf", "SfDag", "Zf", "H", "S", "SDag", "Z", "X", "BRAID", "CZf", "CZqf",
        ];
        Self {
            clifford_kinds: kinds.iter().map(|s| s.to_string()).collect(),
            move_swaps_cost_depth: false,
            move_swaps_are_cliffords: false,
        }
    }
}

impl CostModel {
    /// Qubit hardware: fermion moves are fSWAP gates with real cost.
    pub fn qubit_fswap() -> Self {
        Self {
            move_swaps_cost_depth: true,
            move_swaps_are_cliffords: true,
            ..Self::default()
        }
    }
}

/// Greedy layering: an op goes one layer after the latest op sharing a target.
fn asap_depth<'a>(ops: impl Iterator<Item = (Vec<Reg>, bool)> + 'a) -> (usize, usize) {
    let mut ready: BTreeMap<Reg, usize> = BTreeMap::new();
    let mut marked = BTreeSet::new();
    let mut depth = 0;
    for (targets, mark) in ops {
        let layer = targets
            .iter()
            .map(|r| ready.get(r).copied().unwrap_or(0))
            .max()
            .unwrap_or(0)
            + 1;
        for r in targets {
            ready.insert(r, layer);
        }
        if mark {
            marked.insert(layer);
        }
        depth = depth.max(layer);
    }
    (depth, marked.len())
}

fn op_gate(op: &Op) -> Option<&Gate> {
    match op {
        Op::Gate { gate } | Op::Conditioned { gate, .. } => Some(gate),
        _ => None,
    }
}

pub fn count_resources(c: &Circuit, model: &CostModel) -> ResourceReport {
    let mut counts = BTreeMap::new();
    let mut clifford_count = 0;
    let mut t_count = 0;
    let mut rotation_count = 0;
    let mut measurement_count = 0;
    let mut move_swaps = 0;
    for op in &c.ops {
        match op {
            Op::Measure { .. } => measurement_count += 1,
            Op::MoveSwap { .. } => {
                move_swaps += 1;
                if model.move_swaps_are_cliffords {
                    clifford_count += 1;
                }
            }
            _ => {}
        }
        if let Some(g) = op_gate(op) {
            *counts.entry(g.kind_name().to_string()).or_insert(0) += 1;
            if model.clifford_kinds.contains(g.kind_name()) {
                clifford_count += 1;
            } else {
                match g.class() {
                    GateClass::TType => t_count += 1,
                    GateClass::Rotation => rotation_count += 1,
                    _ => {}
                }
            }
        }
    }
    let is_rotation = |op: &Op| op_gate(op).is_some_and(|g| g.class() == GateClass::Rotation);
    let is_non_clifford = |op: &Op| {
        op_gate(op).is_some_and(|g| matches!(g.class(), GateClass::Rotation | GateClass::TType))
    };
    let counted = |op: &Op| model.move_swaps_cost_depth || !matches!(op, Op::MoveSwap { .. });
    let (depth, non_clifford_depth) = asap_depth(
        c.ops
            .iter()
            .filter(|op| counted(op))
            .map(|op| (op.targets(), is_non_clifford(op))),
    );
    let (depth_without_rotations, _) = asap_depth(
        c.ops
            .iter()
            .filter(|op| counted(op) && !is_rotation(op))
            .map(|op| (op.targets(), false)),
    );
    ResourceReport {
        counts,
        clifford_count,
        t_count,
        rotation_count,
        measurement_count,
        move_swaps,
        depth,
        depth_without_rotations,
        non_clifford_depth,
    }
}
