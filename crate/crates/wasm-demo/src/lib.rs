//! Browser bindings. Every export returns a JSON string so the page needs no
//! generated type glue beyond strings and numbers.

use std::f64::consts::TAU;

use serde_json::{json, Value};
use wasm_bindgen::prelude::*;

use pwlab::experiments::semi::sweep_point_config;
use pwlab::experiments::{run_semi, Kind, ScenarioConfig, SemiSetup, SweepParam};
use pwlab::joint::{
    alice_two_time, chsh_from_samples, empirical_joint, sample_outcomes, signalling_gap, two_time_joint, Settings,
};
use pwlab::mode::{chsh, correlator};
use pwlab::traj::BounceClass;

/// Largest ensemble the fan demo accepts.
pub const MAX_FAN_SAMPLES: usize = 2000;
/// Largest pointer ratio the fan demo accepts; slower pointers need very long grids.
pub const MAX_FAN_RATIO: f64 = 10.0;
const FAN_POINTS: usize = 120;

fn err(e: impl std::fmt::Display) -> JsValue {
    JsValue::from_str(&e.to_string())
}

fn sampled_correlator(x: f64, y: f64, n: usize, seed: u64) -> f64 {
    let outs = sample_outcomes(&Settings::new(x, 0.0, y), n, seed);
    let sum: i64 = outs.iter().map(|o| if (o.a == 1) == (o.b == 3) { 1 } else { -1 }).sum();
    sum as f64 / n.max(1) as f64
}

/// Correlator curves `E(x, y)` and `E(x, y')` over a full turn of `x`, plus
/// the CHSH value at `(x, x', y, y')`, analytic and sampled.
pub fn bell_json(x: f64, xp: f64, y: f64, yp: f64, points: usize, samples: usize, seed: u64) -> Value {
    let points = points.clamp(2, 720);
    let xs: Vec<f64> = (0..points).map(|i| TAU * i as f64 / (points - 1) as f64).collect();
    let curve = |b: f64, off: u64| -> Value {
        json!({
            "y": b,
            "analytic": xs.iter().map(|&a| correlator(a, b)).collect::<Vec<_>>(),
            "sampled": xs.iter().enumerate()
                .map(|(i, &a)| sampled_correlator(a, b, samples, seed.wrapping_add(off + ((i as u64) << 20))))
                .collect::<Vec<_>>(),
        })
    };
    let est = chsh_from_samples(x, xp, y, yp, samples.max(1), seed);
    json!({
        "x": xs,
        "curves": [curve(y, 0), curve(yp, 1 << 40)],
        "settings": [x, xp, y, yp],
        "chsh": chsh(x, xp, y, yp),
        "chsh_sampled": est.s,
        "std_err": est.std_err,
    })
}

#[wasm_bindgen]
pub fn bell_demo(x: f64, xp: f64, y: f64, yp: f64, points: usize, samples: usize, seed: u64) -> String {
    bell_json(x, xp, y, yp, points, samples, seed).to_string()
}

/// Two-time joint table at `(x, x', y)` and Alice's two-time table at Bob
/// settings `y` and `y2`, with the signalling gap between them.
pub fn two_time_json(x: f64, xp: f64, y: f64, y2: f64, samples: usize, seed: u64) -> Value {
    let s = Settings::new(x, xp, y);
    let joint = two_time_joint(x, xp, y);
    let emp = (samples > 0).then(|| empirical_joint(&s, &sample_outcomes(&s, samples, seed)));
    let rows: Vec<Value> = joint
        .entries()
        .map(|((a, ap, b), p)| json!({ "a": a, "ap": ap, "b": b, "p": p, "sampled": emp.map(|e| e.get(a, ap, b)) }))
        .collect();
    json!({
        "joint": rows,
        "alice": [
            { "y": y, "table": alice_two_time(&joint) },
            { "y": y2, "table": alice_two_time(&two_time_joint(x, xp, y2)) },
        ],
        "gap": signalling_gap(x, xp, &[y, y2]).unwrap_or(f64::NAN),
    })
}

#[wasm_bindgen]
pub fn two_time_demo(x: f64, xp: f64, y: f64, y2: f64, samples: usize, seed: u64) -> String {
    two_time_json(x, xp, y, y2, samples, seed).to_string()
}

/// Semi-interferometer trajectories. `ratio <= 0` means no pointer;
/// otherwise it is the pointer's tau / T_cross.
pub fn fan_json(ratio: f64, samples: usize, seed: u64, keep: usize) -> Result<Value, String> {
    if !(1..=MAX_FAN_SAMPLES).contains(&samples) {
        return Err(format!("samples must be between 1 and {MAX_FAN_SAMPLES}"));
    }
    if ratio > MAX_FAN_RATIO {
        return Err(format!("pointer ratio is limited to {MAX_FAN_RATIO} in the browser"));
    }
    let mut c = ScenarioConfig::new(Kind::Semi);
    c.ensemble.n = Some(samples);
    c.ensemble.seed = Some(seed);
    if ratio > 0.0 {
        let t_cross = SemiSetup::from_config(&c).map_err(|e| e.to_string())?.t_cross;
        c = sweep_point_config(&c, t_cross, SweepParam::TauRatio, ratio);
    }
    let run = run_semi(&c).map_err(|e| e.to_string())?;
    let r = &run.report;
    let step = samples.div_ceil(keep.clamp(1, samples));
    let trajectories: Vec<Value> = run
        .ensemble
        .trajectories
        .iter()
        .zip(&run.labels)
        .step_by(step)
        .map(|(tr, label)| {
            let every = tr.times.len().div_ceil(FAN_POINTS).max(1);
            let idx: Vec<usize> = (0..tr.times.len()).step_by(every).chain([tr.times.len() - 1]).collect();
            json!({
                "label": match label {
                    Some(BounceClass::Bounced) => "bounced",
                    Some(BounceClass::Crossed) => "crossed",
                    None => "inconclusive",
                },
                "t": idx.iter().map(|&i| tr.times[i]).collect::<Vec<_>>(),
                "x": idx.iter().map(|&i| tr.positions[i][0]).collect::<Vec<_>>(),
            })
        })
        .collect();
    let pointer = r.pointer.as_ref();
    Ok(json!({
        "regime": r.regime,
        "tau_ratio": r.tau_ratio,
        "t_cross": r.t_cross,
        "x_c": r.x_c,
        "t_final": r.t_final,
        "bounce": r.bounce.estimate,
        "ci": [r.bounce.ci.0, r.bounce.ci.1],
        "correlation": pointer.and_then(|p| p.correlation),
        "surreal_fraction": pointer.map(|p| p.surreal_fraction),
        "trajectories": trajectories,
    }))
}

#[wasm_bindgen]
pub fn semi_fan(ratio: f64, samples: usize, seed: u64, keep: usize) -> Result<String, JsValue> {
    fan_json(ratio, samples, seed, keep).map(|v| v.to_string()).map_err(err)
}

#[wasm_bindgen]
pub fn version() -> String {
    pwlab::report::VERSION.to_string()
}
