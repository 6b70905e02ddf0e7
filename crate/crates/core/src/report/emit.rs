//! Result files. Column orders:
//!
//! * `bell_tables.csv`: `pair,x,y,a,b,p_analytic,p_sampled`
//! * `two_time_joint.csv`: `a,a_prime,b,p_analytic,p_sampled` (8 rows)
//! * `two_time_alice.csv`: `y,a,a_prime,p`
//! * `trajectories.csv`: `sample,t,x,y,label,refined_steps,node_events,trapped,left_grid`
//!   (`y` empty without a pointer; `label` is `bounced`, `crossed` or empty)
//! * `regime.csv`: one row per regime report
//! * `sweep.csv`: one row per sweep point
//!
//! `p_sampled` is empty when no samples were drawn.

use std::fs;
use std::path::Path;
use std::str::FromStr;

use serde::Serialize;

use super::svg::{Plot, BLUE, GREEN, GREY, ORANGE};
use crate::error::{Error, Result};
use crate::experiments::{BellReport, Outcome, RegimeReport, ScenarioConfig, SemiRun, SweepReport, TwoTimeReport};
use crate::joint::OUTCOMES;
use crate::mode::BASIS;
use crate::traj::BounceClass;
use crate::wave::snapshot::write_snapshot;

/// Samples written to `trajectories.csv`, spread evenly over the ensemble.
pub const TRAJ_CSV_SAMPLES: usize = 1000;
/// Trajectories drawn in the fan plot.
pub const FAN_SAMPLES: usize = 150;
/// Largest dense grid written as a snapshot.
pub const MAX_SNAPSHOT_POINTS: usize = 1 << 22;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Json,
    Csv,
    Svg,
    /// Binary dump of the final wave function plus a JSON sidecar.
    Snapshot,
}

impl FromStr for Format {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "json" => Ok(Format::Json),
            "csv" => Ok(Format::Csv),
            "svg" => Ok(Format::Svg),
            "snapshot" => Ok(Format::Snapshot),
            other => Err(Error::Config(format!("unknown format {other:?}; expected json, csv, svg or snapshot"))),
        }
    }
}

/// Parses a comma-separated format list.
pub fn parse_formats(s: &str) -> Result<Vec<Format>> {
    s.split(',').filter(|p| !p.trim().is_empty()).map(Format::from_str).collect()
}

#[derive(Serialize)]
struct ResultFile<'a> {
    config: &'a ScenarioConfig,
    result: &'a Outcome,
}

struct Out<'a> {
    dir: &'a Path,
    files: Vec<String>,
}

impl Out<'_> {
    fn text(&mut self, name: &str, body: &str) -> Result<()> {
        fs::write(self.dir.join(name), body)?;
        self.files.push(name.into());
        Ok(())
    }

    fn csv(&mut self, name: &str, header: &[&str], rows: Vec<Vec<String>>) -> Result<()> {
        let mut w = csv::Writer::from_path(self.dir.join(name))?;
        w.write_record(header)?;
        for r in rows {
            w.write_record(&r)?;
        }
        w.flush()?;
        self.files.push(name.into());
        Ok(())
    }
}

fn f(v: f64) -> String {
    format!("{v}")
}

/// Serde name of a unit enum variant.
fn tag<T: Serialize>(v: &T) -> String {
    match serde_json::to_value(v) {
        Ok(serde_json::Value::String(s)) => s,
        _ => String::new(),
    }
}

fn opt(v: Option<f64>) -> String {
    v.map(f).unwrap_or_default()
}

/// Writes the requested formats for one outcome and returns the file names.
/// JSON is always written.
pub fn emit_results(outcome: &Outcome, config: &ScenarioConfig, formats: &[Format], dir: &Path) -> Result<Vec<String>> {
    fs::create_dir_all(dir)?;
    let mut out = Out { dir, files: Vec::new() };
    let resolved = config.resolved();
    let json = serde_json::to_string_pretty(&ResultFile { config: &resolved, result: outcome })? + "\n";
    out.text("result.json", &json)?;
    let csv = formats.contains(&Format::Csv);
    let svg = formats.contains(&Format::Svg);
    match outcome {
        Outcome::Bell(r) => {
            if csv {
                bell_csv(&mut out, r)?;
            }
            if svg {
                out.text("bell_tables.svg", &bell_svg(r))?;
            }
        }
        Outcome::TwoTime(r) => {
            if csv {
                two_time_csv(&mut out, r)?;
            }
            if svg {
                out.text("two_time_joint.svg", &two_time_svg(r))?;
                out.text("two_time_alice.svg", &alice_svg(r))?;
            }
        }
        Outcome::Semi(run) => {
            if csv {
                trajectories_csv(&mut out, run)?;
                regime_csv(&mut out, &[(None, &run.report)])?;
            }
            if svg {
                out.text("trajectory_fan.svg", &fan_svg(run))?;
            }
            if formats.contains(&Format::Snapshot) {
                snapshot(&mut out, run)?;
            }
        }
        Outcome::PointerSweep(r) => {
            if csv {
                sweep_csv(&mut out, r)?;
                let rows: Vec<_> = r.points.iter().map(|p| (Some(p.value), &p.report)).collect();
                regime_csv(&mut out, &rows)?;
            }
            if svg {
                out.text("sweep.svg", &sweep_svg(r))?;
            }
        }
    }
    Ok(out.files)
}

fn bell_csv(out: &mut Out, r: &BellReport) -> Result<()> {
    let mut rows = Vec::new();
    for (k, t) in r.tables.iter().enumerate() {
        for (i, &(a, b)) in BASIS.iter().enumerate() {
            rows.push(vec![
                k.to_string(),
                f(t.x),
                f(t.y),
                a.to_string(),
                b.to_string(),
                f(t.analytic.get(a, b)),
                opt(t.sampled.map(|s| s[i])),
            ]);
        }
    }
    out.csv("bell_tables.csv", &["pair", "x", "y", "a", "b", "p_analytic", "p_sampled"], rows)
}

fn two_time_csv(out: &mut Out, r: &TwoTimeReport) -> Result<()> {
    let rows = OUTCOMES
        .iter()
        .map(|&(a, ap, b)| {
            vec![
                a.to_string(),
                ap.to_string(),
                b.to_string(),
                f(r.joint.get(a, ap, b)),
                opt(r.sampled.map(|s| s.get(a, ap, b))),
            ]
        })
        .collect();
    out.csv("two_time_joint.csv", &["a", "a_prime", "b", "p_analytic", "p_sampled"], rows)?;
    let mut rows = Vec::new();
    for t in &r.alice {
        for a in 0..2 {
            for ap in 0..2 {
                rows.push(vec![f(t.y), (a + 1).to_string(), (ap + 1).to_string(), f(t.table[a][ap])]);
            }
        }
    }
    out.csv("two_time_alice.csv", &["y", "a", "a_prime", "p"], rows)
}

fn label_name(l: Option<BounceClass>) -> &'static str {
    match l {
        Some(BounceClass::Bounced) => "bounced",
        Some(BounceClass::Crossed) => "crossed",
        None => "",
    }
}

fn stride(n: usize, keep: usize) -> usize {
    n.div_ceil(keep.max(1)).max(1)
}

fn trajectories_csv(out: &mut Out, run: &SemiRun) -> Result<()> {
    let ens = &run.ensemble;
    let mut rows = Vec::new();
    for (tr, label) in ens.trajectories.iter().zip(&run.labels).step_by(stride(ens.len(), TRAJ_CSV_SAMPLES)) {
        let fl = &tr.flags;
        for (t, p) in tr.times.iter().zip(&tr.positions) {
            rows.push(vec![
                tr.id.to_string(),
                f(*t),
                f(p[0]),
                if ens.dims > 1 { f(p[1]) } else { String::new() },
                label_name(*label).into(),
                fl.refined_steps.to_string(),
                fl.node_events.to_string(),
                (fl.trapped as u8).to_string(),
                (fl.left_grid as u8).to_string(),
            ]);
        }
    }
    out.csv(
        "trajectories.csv",
        &["sample", "t", "x", "y", "label", "refined_steps", "node_events", "trapped", "left_grid"],
        rows,
    )
}

fn regime_csv(out: &mut Out, reports: &[(Option<f64>, &RegimeReport)]) -> Result<()> {
    let rows = reports
        .iter()
        .map(|(v, r)| {
            let p = r.pointer.as_ref();
            vec![
                opt(*v),
                tag(&r.regime),
                opt(r.tau),
                opt(r.tau_ratio),
                r.samples.to_string(),
                r.excluded.to_string(),
                r.inconclusive.to_string(),
                f(r.bounce.estimate),
                f(r.bounce.ci.0),
                f(r.bounce.ci.1),
                opt(p.and_then(|p| p.correlation)),
                opt(p.map(|p| p.surreal_fraction)),
                p.map(|p| p.surrealism.to_string()).unwrap_or_default(),
                opt(p.map(|p| p.distinguishability)),
                r.crossing.config_crossings.to_string(),
                f(r.equivariance.iter().map(|k| k.statistic / k.threshold).fold(0.0, f64::max)),
                r.verdicts.iter().all(|v| v.pass).to_string(),
            ]
        })
        .collect();
    out.csv(
        "regime.csv",
        &[
            "sweep_value",
            "regime",
            "tau",
            "tau_ratio",
            "samples",
            "excluded",
            "inconclusive",
            "bounce",
            "bounce_ci_lo",
            "bounce_ci_hi",
            "correlation",
            "surreal_fraction",
            "surrealism",
            "distinguishability",
            "config_crossings",
            "ks_ratio_max",
            "all_pass",
        ],
        rows,
    )
}

fn sweep_csv(out: &mut Out, r: &SweepReport) -> Result<()> {
    let rows = r
        .points
        .iter()
        .map(|p| {
            vec![
                f(p.value),
                f(p.pointer_mass),
                f(p.k),
                opt(p.report.tau_ratio),
                f(p.report.bounce.estimate),
                f(p.report.bounce.ci.0),
                f(p.report.bounce.ci.1),
            ]
        })
        .collect();
    out.csv("sweep.csv", &["value", "pointer_mass", "k", "tau_ratio", "bounce", "ci_lo", "ci_hi"], rows)
}

fn snapshot(out: &mut Out, run: &SemiRun) -> Result<()> {
    if run.setup.grid.len() > MAX_SNAPSHOT_POINTS {
        return Err(Error::Config(format!(
            "snapshot of {} points exceeds the {MAX_SNAPSHOT_POINTS}-point limit",
            run.setup.grid.len()
        )));
    }
    let history = run.setup.history()?;
    let field = history
        .separable_at(run.setup.t_final)
        .ok_or_else(|| Error::Physics("history holds no product-branch field".into()))?
        .to_dense();
    write_snapshot(&field, out.dir, "field_final")?;
    out.files.push("field_final.bin".into());
    out.files.push("field_final.json".into());
    Ok(())
}

/// Paired bars: analytic (blue) against sampled (orange) per category.
fn paired_bars(title: &str, cats: &[(String, f64, Option<f64>)]) -> String {
    let top = cats.iter().map(|c| c.1.max(c.2.unwrap_or(0.0))).fold(0.0, f64::max);
    let y_max = ((top * 10.0).ceil() / 10.0).max(0.1);
    let mut p = Plot::categorical(title, "outcome", "probability", cats.len(), (0.0, y_max * 1.15));
    for (i, (name, a, s)) in cats.iter().enumerate() {
        let x = i as f64;
        p.bar(x + 0.12, x + 0.5, *a, BLUE);
        if let Some(s) = s {
            p.bar(x + 0.5, x + 0.88, *s, ORANGE);
        }
        p.category(i, name);
    }
    let mut legend = vec![(BLUE, "analytic")];
    if cats.iter().any(|c| c.2.is_some()) {
        legend.push((ORANGE, "sampled"));
    }
    p.legend(&legend);
    p.finish()
}

fn bell_svg(r: &BellReport) -> String {
    let mut cats = Vec::new();
    for (k, t) in r.tables.iter().enumerate() {
        for (i, &(a, b)) in BASIS.iter().enumerate() {
            cats.push((format!("{k}:{a}{b}"), t.analytic.get(a, b), t.sampled.map(|s| s[i])));
        }
    }
    paired_bars(&format!("Coincidences per setting pair, S = {:.4}", r.chsh_analytic), &cats)
}

fn two_time_svg(r: &TwoTimeReport) -> String {
    let cats: Vec<_> = OUTCOMES
        .iter()
        .map(|&(a, ap, b)| (format!("{a}{ap}{b}"), r.joint.get(a, ap, b), r.sampled.map(|s| s.get(a, ap, b))))
        .collect();
    paired_bars("Two-time joint law (a a' b)", &cats)
}

fn alice_svg(r: &TwoTimeReport) -> String {
    let groups = r.alice.len().max(1) as f64;
    let mut p = Plot::categorical(
        &format!("Alice's two-time table per Bob setting, gap = {:.4}", r.gap),
        "(a, a')",
        "probability",
        4,
        (0.0, 1.0),
    );
    let colours = [BLUE, ORANGE, GREEN, GREY];
    for (g, t) in r.alice.iter().enumerate() {
        for a in 0..2 {
            for ap in 0..2 {
                let x = (2 * a + ap) as f64;
                let w = 0.76 / groups;
                let lo = x + 0.12 + w * g as f64;
                p.bar(lo, lo + w, t.table[a][ap], colours[g % colours.len()]);
            }
        }
    }
    for (i, name) in ["11", "12", "21", "22"].iter().enumerate() {
        p.category(i, name);
    }
    let names: Vec<String> = r.alice.iter().map(|t| format!("y = {:.4}", t.y)).collect();
    let legend: Vec<(&str, &str)> =
        names.iter().enumerate().map(|(g, s)| (colours[g % colours.len()], s.as_str())).collect();
    p.legend(&legend);
    p.finish()
}

fn fan_svg(run: &SemiRun) -> String {
    let ens = &run.ensemble;
    let picked: Vec<_> =
        ens.trajectories.iter().zip(&run.labels).step_by(stride(ens.len(), FAN_SAMPLES)).collect();
    let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
    for (tr, _) in &picked {
        for p in &tr.positions {
            lo = lo.min(p[0]);
            hi = hi.max(p[0]);
        }
    }
    if !lo.is_finite() {
        (lo, hi) = (-1.0, 1.0);
    }
    let pad = 0.05 * (hi - lo).max(1e-9);
    let r = &run.report;
    let title = match r.tau_ratio {
        Some(t) => format!("Trajectories, tau/T = {t:.3}, bounce = {:.3}", r.bounce.estimate),
        None => format!("Trajectories without a pointer, bounce = {:.3}", r.bounce.estimate),
    };
    let mut p = Plot::new(&title, "t", "x", (0.0, run.setup.t_final), (lo - pad, hi + pad), false);
    p.hline(run.setup.x_c, GREY);
    for (tr, label) in &picked {
        let colour = match label {
            Some(BounceClass::Bounced) => BLUE,
            Some(BounceClass::Crossed) => ORANGE,
            None => GREY,
        };
        let pts: Vec<(f64, f64)> = tr.times.iter().zip(&tr.positions).map(|(t, q)| (*t, q[0])).collect();
        p.polyline(&pts, colour, 0.8, 0.7);
    }
    p.legend(&[(BLUE, "bounced"), (ORANGE, "crossed"), (GREY, "inconclusive")]);
    p.finish()
}

fn sweep_svg(r: &SweepReport) -> String {
    let mut pts: Vec<_> = r.points.iter().map(|p| (p.value, p.report.bounce)).collect();
    pts.sort_by(|a, b| a.0.total_cmp(&b.0));
    let lo = pts.first().map(|p| p.0).unwrap_or(0.0);
    let hi = pts.last().map(|p| p.0).unwrap_or(1.0);
    let log_x = lo > 0.0 && hi / lo >= 10.0;
    let (x0, x1) = if log_x {
        (lo / 1.5, hi * 1.5)
    } else if hi > lo {
        let pad = 0.05 * (hi - lo);
        (lo - pad, hi + pad)
    } else {
        (lo - 1.0, hi + 1.0)
    };
    let name = tag(&r.param);
    let mut p = Plot::new("Bounce fraction with 95% interval", &name, "bounce fraction", (x0, x1), (0.0, 1.0), log_x);
    let xs: Vec<f64> = pts.iter().map(|q| q.0).collect();
    let lower: Vec<f64> = pts.iter().map(|q| q.1.ci.0).collect();
    let upper: Vec<f64> = pts.iter().map(|q| q.1.ci.1).collect();
    p.band(&xs, &lower, &upper, BLUE);
    p.hline(0.05, GREY);
    p.hline(0.95, GREY);
    let line: Vec<(f64, f64)> = pts.iter().map(|q| (q.0, q.1.estimate)).collect();
    p.polyline(&line, BLUE, 1.5, 1.0);
    p.markers(&line, BLUE);
    p.finish()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::experiments::{run, Kind};

    fn read(dir: &Path, name: &str) -> String {
        fs::read_to_string(dir.join(name)).unwrap()
    }

    #[test]
    fn format_list() {
        assert_eq!(parse_formats("json, csv,svg").unwrap(), vec![Format::Json, Format::Csv, Format::Svg]);
        assert!(parse_formats("json,png").is_err());
    }

    #[test]
    fn two_time_files_are_deterministic() {
        let mut c = ScenarioConfig::new(Kind::TwoTime);
        c.ensemble.n = Some(2000);
        let all = [Format::Json, Format::Csv, Format::Svg];
        let a = tempfile::tempdir().unwrap();
        let b = tempfile::tempdir().unwrap();
        let files = emit_results(&run(&c).unwrap(), &c, &all, a.path()).unwrap();
        emit_results(&run(&c).unwrap(), &c, &all, b.path()).unwrap();
        assert!(files.contains(&"two_time_joint.csv".to_string()));
        for name in &files {
            assert_eq!(read(a.path(), name), read(b.path(), name), "{name}");
        }
        let joint = read(a.path(), "two_time_joint.csv");
        let lines: Vec<&str> = joint.lines().collect();
        assert_eq!(lines[0], "a,a_prime,b,p_analytic,p_sampled");
        assert_eq!(lines.len(), 9);
        let total: f64 = lines[1..].iter().map(|l| l.split(',').nth(3).unwrap().parse::<f64>().unwrap()).sum();
        assert!((total - 1.0).abs() < 1e-12);
    }

    #[test]
    fn bell_json_only_by_default() {
        let mut c = ScenarioConfig::new(Kind::Bell);
        c.ensemble.n = Some(0);
        let d = tempfile::tempdir().unwrap();
        let files = emit_results(&run(&c).unwrap(), &c, &[Format::Json], d.path()).unwrap();
        assert_eq!(files, vec!["result.json".to_string()]);
        let v: serde_json::Value = serde_json::from_str(&read(d.path(), "result.json")).unwrap();
        assert_eq!(v["result"]["kind"], "bell");
        assert_eq!(v["config"]["kind"], "bell");
    }
}
