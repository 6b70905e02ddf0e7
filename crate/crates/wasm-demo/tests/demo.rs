use std::f64::consts::FRAC_PI_2;

use pwlab_wasm_demo::{bell_json, fan_json, two_time_json, MAX_FAN_RATIO, MAX_FAN_SAMPLES};

#[test]
fn bell_curves_follow_the_cosine() {
    let v = bell_json(0.0, FRAC_PI_2, -FRAC_PI_2 / 2.0, FRAC_PI_2 / 2.0, 9, 400, 3);
    let xs: Vec<f64> = v["x"].as_array().unwrap().iter().map(|x| x.as_f64().unwrap()).collect();
    assert_eq!(xs.len(), 9);
    for curve in v["curves"].as_array().unwrap() {
        let y = curve["y"].as_f64().unwrap();
        for (x, e) in xs.iter().zip(curve["analytic"].as_array().unwrap()) {
            assert!((e.as_f64().unwrap() - (x + y).cos()).abs() < 1e-12);
        }
        for s in curve["sampled"].as_array().unwrap() {
            assert!(s.as_f64().unwrap().abs() <= 1.0);
        }
    }
    assert!((v["chsh"].as_f64().unwrap().abs() - 2.0 * 2f64.sqrt()).abs() < 1e-9);
}

#[test]
fn bell_is_deterministic_in_the_seed() {
    let a = bell_json(0.1, 0.2, 0.3, 0.4, 5, 200, 9).to_string();
    assert_eq!(a, bell_json(0.1, 0.2, 0.3, 0.4, 5, 200, 9).to_string());
    assert_ne!(a, bell_json(0.1, 0.2, 0.3, 0.4, 5, 200, 10).to_string());
}

#[test]
fn two_time_gap_at_zero_phases() {
    let v = two_time_json(0.0, 0.0, 0.0, FRAC_PI_2, 0, 1);
    assert!((v["gap"].as_f64().unwrap() - 0.25).abs() < 1e-12);
    let rows = v["joint"].as_array().unwrap();
    assert_eq!(rows.len(), 8);
    let total: f64 = rows.iter().map(|r| r["p"].as_f64().unwrap()).sum();
    assert!((total - 1.0).abs() < 1e-12);
    assert!(rows.iter().all(|r| r["sampled"].is_null()));
}

#[test]
fn two_time_sampled_column_is_a_distribution() {
    let v = two_time_json(0.3, 1.1, 0.0, 1.0, 5000, 2);
    let total: f64 = v["joint"].as_array().unwrap().iter().map(|r| r["sampled"].as_f64().unwrap()).sum();
    assert!((total - 1.0).abs() < 1e-12);
}

#[test]
fn fan_without_pointer_always_bounces() {
    let v = fan_json(0.0, 60, 4, 20).unwrap();
    assert_eq!(v["bounce"].as_f64().unwrap(), 1.0);
    assert!(v["correlation"].is_null());
    let trs = v["trajectories"].as_array().unwrap();
    assert_eq!(trs.len(), 20);
    let x_c = v["x_c"].as_f64().unwrap();
    for tr in trs {
        assert_eq!(tr["label"], "bounced");
        let x: Vec<f64> = tr["x"].as_array().unwrap().iter().map(|x| x.as_f64().unwrap()).collect();
        let side = x[0].signum();
        assert!(x.iter().all(|v| (v - x_c) * side >= -1e-9), "trajectory crossed the midline");
    }
}

#[test]
fn fan_with_fast_pointer_crosses() {
    let v = fan_json(0.1, 60, 4, 10).unwrap();
    assert!(v["bounce"].as_f64().unwrap() <= 0.05);
    assert!(v["correlation"].as_f64().unwrap() > 0.9);
}

#[test]
fn fan_rejects_out_of_range_inputs() {
    assert!(fan_json(0.0, 0, 1, 10).is_err());
    assert!(fan_json(0.0, MAX_FAN_SAMPLES + 1, 1, 10).is_err());
    assert!(fan_json(MAX_FAN_RATIO * 2.0, 10, 1, 10).is_err());
}
