//! Pauli-frame memory experiment with perfect syndrome readout.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{decode, CodeError, StabilizerCode};
use crate::majorana::{MajoranaQubitString as Mqs, Phase};

#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ErrorModel {
    /// per-site, per-round probability of a `Zf` error
    pub phase_rate: f64,
    /// per-site, per-round probability of a single-Majorana error
    pub loss_rate: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MemoryResult {
    pub shots: usize,
    pub failures: usize,
    pub logical_error_rate: f64,
    /// 95% Wilson interval
    pub ci_low: f64,
    pub ci_high: f64,
}

fn wilson(failures: usize, shots: usize) -> (f64, f64) {
    if shots == 0 {
        return (0.0, 1.0);
    }
    let z = 1.959_963_984_540_054;
    let n = shots as f64;
    let p = failures as f64 / n;
    let denom = 1.0 + z * z / n;
    let centre = (p + z * z / (2.0 * n)) / denom;
    let half = z * (p * (1.0 - p) / n + z * z / (4.0 * n * n)).sqrt() / denom;
    ((centre - half).max(0.0), (centre + half).min(1.0))
}

/// Whether a residual frame (trivial syndrome assumed) flips a logical.
fn is_logical_error(code: &StabilizerCode, frame: &Mqs) -> bool {
    !frame.commutes_with(&code.logical_gamma) || !frame.commutes_with(&code.logical_gamma_tilde)
}

/// One shot; returns whether the logical state was lost.
fn shot(code: &StabilizerCode, model: &ErrorModel, rounds: usize, rng: &mut ChaCha8Rng) -> bool {
    let lo = code.site_extent() - code.n_sites;
    let mut frame = Mqs::identity();
    for _ in 0..rounds {
        for i in lo..lo + code.n_sites {
            if rng.gen::<f64>() < model.phase_rate {
                frame = frame.multiply(&Mqs::parity(i));
            }
            if rng.gen::<f64>() < model.loss_rate {
                let eta = 2 * i + usize::from(rng.gen::<bool>());
                frame = frame.multiply(&Mqs::canonicalize(&[eta], Phase::ONE));
            }
        }
        let Ok(fix) = decode(code, &code.syndrome_of(&frame)) else {
            return true;
        };
        for f in &fix {
            frame = frame.multiply(f);
        }
    }
    is_logical_error(code, &frame)
}

/// Logical error rate over `shots` independent shots; shot `k` draws from
/// stream `k` of the seeded generator, so results do not depend on threading.
pub fn memory_experiment(
    code: &StabilizerCode,
    model: ErrorModel,
    rounds: usize,
    shots: usize,
    seed: u64,
) -> Result<MemoryResult, CodeError> {
    for r in [model.phase_rate, model.loss_rate] {
        if !(0.0..=1.0).contains(&r) {
            return Err(CodeError::Invariant(format!("rate {r} outside [0, 1]")));
        }
    }
    let failures = (0..shots)
        .into_par_iter()
        .filter(|&k| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(k as u64);
            shot(code, &model, rounds, &mut rng)
        })
        .count();
    let (ci_low, ci_high) = wilson(failures, shots);
    Ok(MemoryResult {
        shots,
        failures,
        logical_error_rate: if shots == 0 {
            0.0
        } else {
            failures as f64 / shots as f64
        },
        ci_low,
        ci_high,
    })
}

/// Exact single-round failure probability for phase errors only, by
/// enumerating every error pattern.
pub fn exact_phase_failure_rate(code: &StabilizerCode, p: f64) -> f64 {
    let n = code.n_sites;
    let lo = code.site_extent() - n;
    let mut total = 0.0;
    for pattern in 0u64..(1 << n) {
        let mut frame = Mqs::identity();
        for i in 0..n {
            if pattern >> i & 1 == 1 {
                frame = frame.multiply(&Mqs::parity(lo + i));
            }
        }
        let failed = match decode(code, &code.syndrome_of(&frame)) {
            Ok(fix) => is_logical_error(code, &fix.iter().fold(frame, |f, x| f.multiply(x))),
            Err(_) => true,
        };
        if failed {
            let k = pattern.count_ones() as i32;
            total += p.powi(k) * (1.0 - p).powi(n as i32 - k);
        }
    }
    total
}

/// Every single-Majorana error followed by decoding; returns the errors that
/// leave a logical fault.
pub fn single_error_failures(code: &StabilizerCode) -> Vec<Mqs> {
    let lo = code.site_extent() - code.n_sites;
    (2 * lo..2 * (lo + code.n_sites))
        .map(|eta| Mqs::canonicalize(&[eta], Phase::ONE))
        .filter(|e| match decode(code, &code.syndrome_of(e)) {
            Ok(fix) => {
                let residual = fix.iter().fold(e.clone(), |f, x| f.multiply(x));
                code.syndrome_of(&residual).contains(&1) || is_logical_error(code, &residual)
            }
            Err(_) => true,
        })
        .collect()
}
