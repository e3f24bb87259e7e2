use std::fmt::Write as _;

use anyhow::{bail, Result};
use fermiqc::codes::{self, ErrorModel, LogicalGate, StabilizerCode};
use fermiqc::gadgets::{resource_table, Method, Metric, ScalingModel};
use fermiqc::majorana::{MajoranaQubitString as Mqs, Phase};
use fermiqc::pairing::{self, Convergence, FringeData, Wiring};
use fermiqc::verify::{full_suite, Check, FaultInjection};
use serde::Serialize;
use serde_json::{json, Value};

use crate::config::{Experiment, Family, RunConfig};

pub const SCHEMA_VERSION: u32 = 1;

/// Files produced by one command, written by the caller in order.
#[derive(Debug, Default)]
pub struct Artifacts {
    pub files: Vec<(String, String)>,
    /// false when a verification check failed
    pub success: bool,
}

impl Artifacts {
    fn new() -> Self {
        Self {
            files: Vec::new(),
            success: true,
        }
    }

    fn json(&mut self, cfg: &RunConfig, name: &str, body: Value) -> Result<()> {
        if cfg.format.json() {
            let mut doc = json!({ "schema_version": SCHEMA_VERSION, "config": cfg });
            if let (Value::Object(d), Value::Object(b)) = (&mut doc, body) {
                d.extend(b);
            }
            self.files
                .push((name.to_string(), serde_json::to_string_pretty(&doc)? + "\n"));
        }
        Ok(())
    }

    fn csv(&mut self, cfg: &RunConfig, name: &str, text: String) {
        if cfg.format.csv() {
            self.files.push((name.to_string(), text));
        }
    }
}

fn to_value<T: Serialize>(v: &T) -> Result<Value> {
    Ok(serde_json::to_value(v)?)
}

pub fn verify(cfg: &RunConfig) -> Result<Artifacts> {
    let fault = FaultInjection {
        flip_sign_of: cfg.verify.inject_fault.clone(),
    };
    let mut checks = full_suite(&fault);
    if let Some(tol) = cfg.tolerance {
        for c in &mut checks {
            c.passed = c.deviation.is_finite() && c.deviation <= tol;
        }
    }
    let failed: Vec<&Check> = checks.iter().filter(|c| !c.passed).collect();
    let mut out = Artifacts::new();
    out.success = failed.is_empty();
    out.json(
        cfg,
        "verify.json",
        json!({
            "command": "verify",
            "passed": out.success,
            "n_checks": checks.len(),
            "failed": failed.iter().map(|c| c.name.clone()).collect::<Vec<_>>(),
            "checks": to_value(&checks)?,
        }),
    )?;
    let mut csv = String::from("name,passed,deviation\n");
    for c in &checks {
        writeln!(
            csv,
            "{},{},{:e}",
            c.name.replace(',', ";"),
            c.passed,
            c.deviation
        )?;
    }
    out.csv(cfg, "verify.csv", csv);
    Ok(out)
}

fn build_code(cfg: &RunConfig) -> Result<(String, StabilizerCode)> {
    let c = &cfg.codes;
    Ok(match c.family {
        Family::Repetition => (
            format!("repetition_n{}", c.n),
            codes::build_repetition(c.n)?,
        ),
        Family::Color => (format!("color_d{}", c.d), codes::build_color_code(c.d)?),
    })
}

fn join(strings: &[Mqs]) -> String {
    strings
        .iter()
        .map(|s| s.to_string())
        .collect::<Vec<_>>()
        .join(";")
}

fn bits(s: &[u8]) -> String {
    s.iter().map(|b| char::from(b'0' + b)).collect()
}

/// Single-site errors (each Majorana and each parity) with their syndrome
/// and the decoder's answer.
fn syndrome_rows(code: &StabilizerCode) -> Vec<Value> {
    let lo = code.site_extent() - code.n_sites;
    let mut errors: Vec<Mqs> = (2 * lo..2 * (lo + code.n_sites))
        .map(|eta| Mqs::canonicalize(&[eta], Phase::ONE))
        .collect();
    errors.extend((lo..lo + code.n_sites).map(Mqs::parity));
    errors
        .into_iter()
        .map(|e| {
            let syndrome = code.syndrome_of(&e);
            let correction = codes::decode(code, &syndrome).ok();
            let corrected = correction.as_ref().is_some_and(|fix| {
                let residual = fix.iter().fold(e.clone(), |f, x| f.multiply(x));
                !code.syndrome_of(&residual).contains(&1)
                    && residual.commutes_with(&code.logical_gamma)
                    && residual.commutes_with(&code.logical_gamma_tilde)
            });
            json!({
                "error": e.to_string(),
                "syndrome": bits(&syndrome),
                "correction": correction.as_deref().map(join),
                "corrected": corrected,
            })
        })
        .collect()
}

pub fn codes(cfg: &RunConfig) -> Result<Artifacts> {
    let (label, code) = build_code(cfg)?;
    let c = &cfg.codes;
    let model = ErrorModel {
        phase_rate: c.noise,
        loss_rate: c.loss,
    };
    let memory = codes::memory_experiment(&code, model, c.rounds, c.shots, cfg.seed)?;
    let rows = syndrome_rows(&code);
    let exact = (c.loss == 0.0 && c.rounds == 1 && code.n_sites <= 20)
        .then(|| codes::exact_phase_failure_rate(&code, c.noise));
    let gates: Vec<&str> = LogicalGate::ALL.iter().map(|g| g.name()).collect();
    let mut out = Artifacts::new();
    out.json(
        cfg,
        &format!("codes_{label}.json"),
        json!({
            "command": "codes",
            "seed": cfg.seed,
            "code": to_value(&code)?,
            "n_sites": code.n_sites,
            "n_generators": code.n_generators(),
            "generators": code.generators.iter().map(|g| g.to_string()).collect::<Vec<_>>(),
            "logical_gamma": code.logical_gamma.to_string(),
            "logical_gamma_tilde": code.logical_gamma_tilde.to_string(),
            "logical_gates": gates,
            "syndrome_table": rows,
            "uncorrected_single_majorana_errors": codes::single_error_failures(&code).iter().map(|e| e.to_string()).collect::<Vec<_>>(),
            "memory": {
                "phase_rate": c.noise,
                "loss_rate": c.loss,
                "rounds": c.rounds,
                "result": to_value(&memory)?,
                "exact_phase_failure_rate": exact,
            },
        }),
    )?;
    let mut csv = String::from("error,syndrome,correction,corrected\n");
    for r in &rows {
        writeln!(
            csv,
            "{},{},{},{}",
            r["error"].as_str().unwrap_or_default(),
            r["syndrome"].as_str().unwrap_or_default(),
            r["correction"].as_str().unwrap_or("detect-only"),
            r["corrected"]
        )?;
    }
    out.csv(cfg, &format!("syndromes_{label}.csv"), csv);
    Ok(out)
}

pub fn fft(cfg: &RunConfig) -> Result<Artifacts> {
    let sizes = &cfg.fft.sizes;
    if sizes.is_empty() {
        bail!("no FFT sizes given");
    }
    let table = resource_table(sizes)?;
    let best: Vec<Value> = Method::ALL
        .iter()
        .flat_map(|&m| Metric::ALL.iter().map(move |&k| (m, k)))
        .filter_map(|(m, k)| table.best_fit(m, k))
        .map(|f| json!({ "method": f.method.name(), "metric": f.metric, "model": f.model, "coefficient": f.coefficient, "residual": f.residual }))
        .collect();
    let headline = [
        (
            Method::FermionicFft,
            Metric::DepthWithoutRotations,
            ScalingModel::LogN,
        ),
        (Method::FermionicFft, Metric::Cliffords, ScalingModel::NLogN),
        (Method::FswapNetwork, Metric::Depth, ScalingModel::N),
    ];
    let headline: Vec<Value> = headline
        .iter()
        .filter_map(|&(m, k, s)| table.fit_for(m, k, s))
        .map(|f| json!({ "method": f.method.name(), "metric": f.metric, "model": f.model, "coefficient": f.coefficient, "residual": f.residual }))
        .collect();
    let mut out = Artifacts::new();
    out.json(
        cfg,
        "fft.json",
        json!({
            "command": "fft",
            "sizes": sizes,
            "rows": to_value(&table.rows)?,
            "headline_fits": headline,
            "best_fits": best,
            "fits": to_value(&table.fits)?,
        }),
    )?;
    out.csv(cfg, "fft.csv", table.to_csv());
    Ok(out)
}

fn fmt_opt(x: Option<f64>) -> String {
    x.map(|v| format!("{v:e}")).unwrap_or_default()
}

struct PairingRow {
    experiment: &'static str,
    n1: f64,
    n2: f64,
    theta: Option<f64>,
    value: f64,
    fit: Option<(f64, f64, f64)>,
}

fn pairing_csv(rows: &[PairingRow]) -> Result<String> {
    let mut csv = String::from("experiment,N1,N2,theta,value,fit_C,fit_D,residual\n");
    for r in rows {
        let (c, d, res) = match r.fit {
            Some((c, d, res)) => (Some(c), Some(d), Some(res)),
            None => (None, None, None),
        };
        writeln!(
            csv,
            "{},{},{},{},{:e},{},{},{}",
            r.experiment,
            r.n1,
            r.n2,
            fmt_opt(r.theta),
            r.value,
            fmt_opt(c),
            fmt_opt(d),
            fmt_opt(res)
        )?;
    }
    Ok(csv)
}

/// Power-law exponent of `ys` against `xs`, skipping non-positive points.
fn exponent(xs: &[f64], ys: &[f64]) -> Option<Value> {
    let (x, y): (Vec<f64>, Vec<f64>) = xs
        .iter()
        .zip(ys)
        .filter(|(x, y)| **x > 0.0 && **y > 0.0)
        .map(|(x, y)| (*x, *y))
        .unzip();
    (x.len() >= 2).then(|| {
        let (slope, intercept, residual) = pairing::log_log_fit(&x, &y);
        json!({ "slope": slope, "intercept": intercept, "residual": residual, "points": x.len() })
    })
}

fn ramsey(cfg: &RunConfig, out: &mut Artifacts) -> Result<()> {
    let p = &cfg.pairing;
    let grid = pairing::theta_grid(p.points);
    let mut rows = Vec::new();
    let mut curves: Vec<FringeData> = Vec::new();
    for wiring in [Wiring::SameMode, Wiring::CrossMode] {
        for &n in &p.n {
            let f = pairing::ramsey(n, wiring, &grid)?;
            let name = match wiring {
                Wiring::SameMode => "ramsey_same_mode",
                Wiring::CrossMode => "ramsey_cross_mode",
            };
            for (t, v) in f.thetas.iter().zip(&f.probabilities) {
                rows.push(PairingRow {
                    experiment: name,
                    n1: n as f64 / 2.0,
                    n2: n as f64 / 2.0,
                    theta: Some(*t),
                    value: *v,
                    fit: Some((f.contrast, f.offset, f.residual)),
                });
            }
            curves.push(f);
        }
    }
    let ns: Vec<f64> = p.n.iter().map(|&n| n as f64).collect();
    let fits = |w: Wiring| {
        let gaps: Vec<f64> = curves
            .iter()
            .filter(|c| c.wiring == w)
            .map(|c| 1.0 - c.contrast)
            .collect();
        exponent(&ns, &gaps)
    };
    let summary: Vec<Value> = curves
        .iter()
        .map(|c| json!({ "N": c.n, "wiring": c.wiring, "contrast": c.contrast, "offset": c.offset, "residual": c.residual }))
        .collect();
    out.json(
        cfg,
        "pairing_ramsey.json",
        json!({
            "command": "pairing",
            "experiment": "ramsey",
            "observable": "probability both sites empty",
            "points": p.points,
            "curves": summary,
            "one_minus_contrast_exponent": { "same_mode": fits(Wiring::SameMode), "cross_mode": fits(Wiring::CrossMode) },
        }),
    )?;
    out.csv(cfg, "pairing_ramsey.csv", pairing_csv(&rows)?);
    Ok(())
}

fn bell(cfg: &RunConfig, out: &mut Artifacts) -> Result<()> {
    let p = &cfg.pairing;
    let mut rows = Vec::new();
    let mut results = Vec::new();
    for &n2 in &p.n2 {
        // the doubling rule is shared with the Choi experiment
        let n1 = match p.n1 {
            Some(n1) => n1,
            None => converged(cfg, n2)?.result.n1,
        };
        let r = pairing::bell_experiment(n1, n2)?;
        rows.push(PairingRow {
            experiment: "bell",
            n1,
            n2,
            theta: None,
            value: r.infidelity,
            fit: None,
        });
        results.push(r);
    }
    let xs: Vec<f64> = results.iter().map(|r| r.n2).collect();
    let ys: Vec<f64> = results.iter().map(|r| r.infidelity).collect();
    out.json(
        cfg,
        "pairing_bell.json",
        json!({
            "command": "pairing",
            "experiment": "bell",
            "target": "(|00> + i|11>)/sqrt(2), |11> = p_i^dagger p_j^dagger |vac>",
            "closed_loop_infidelity": pairing::bell_closed_loop()?.infidelity,
            "results": to_value(&results)?,
            "infidelity_exponent_vs_N2": exponent(&xs, &ys),
        }),
    )?;
    out.csv(cfg, "pairing_bell.csv", pairing_csv(&rows)?);
    Ok(())
}

fn converged(cfg: &RunConfig, n2: f64) -> Result<Convergence> {
    let p = &cfg.pairing;
    Ok(pairing::choi_converged(
        n2,
        p.source.into(),
        n2,
        p.convergence,
        p.max_n1,
    )?)
}

fn choi(cfg: &RunConfig, out: &mut Artifacts) -> Result<()> {
    let p = &cfg.pairing;
    let mut rows = Vec::new();
    let mut results = Vec::new();
    for &n2 in &p.n2 {
        let entry = match p.n1 {
            Some(n1) => {
                let r = pairing::choi_experiment(n1, n2, p.source.into())?;
                json!({ "n1_rule": "fixed", "result": to_value(&r)? })
            }
            None => {
                let c = converged(cfg, n2)?;
                json!({ "n1_rule": "doubling", "converged": c.converged, "trail": c.trail, "result": to_value(&c.result)? })
            }
        };
        let r = &entry["result"];
        let n1 = r["n1"].as_f64().unwrap_or_default();
        let value = r["average_infidelity"].as_f64().unwrap_or(f64::NAN);
        rows.push(PairingRow {
            experiment: "choi",
            n1,
            n2,
            theta: None,
            value,
            fit: None,
        });
        results.push(entry);
    }
    let xs: Vec<f64> = rows.iter().map(|r| r.n2).collect();
    let ys: Vec<f64> = rows.iter().map(|r| r.value).collect();
    out.json(
        cfg,
        "pairing_choi.json",
        json!({
            "command": "pairing",
            "experiment": "choi",
            "source": p.source,
            "closed_loop_infidelity": pairing::choi_closed_loop()?.average_infidelity,
            "results": results,
            "infidelity_exponent_vs_N2": exponent(&xs, &ys),
        }),
    )?;
    out.csv(cfg, "pairing_choi.csv", pairing_csv(&rows)?);
    Ok(())
}

pub fn pairing(cfg: &RunConfig) -> Result<Artifacts> {
    let p = &cfg.pairing;
    if p.points < 16 && p.experiment == Experiment::Ramsey {
        bail!("Ramsey grid needs at least 16 phases, got {}", p.points);
    }
    let negative = |n: f64| n.is_nan() || n < 0.0;
    if p.n2.iter().any(|&n| negative(n)) || p.n1.is_some_and(negative) {
        bail!("molecule numbers must be non-negative");
    }
    let mut out = Artifacts::new();
    match p.experiment {
        Experiment::Ramsey => ramsey(cfg, &mut out)?,
        Experiment::Bell => bell(cfg, &mut out)?,
        Experiment::Choi => choi(cfg, &mut out)?,
    }
    Ok(out)
}
