use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use pwlab::experiments::{run, Kind, ScenarioConfig, Verdict};
use pwlab::report::emit::parse_formats;
use pwlab::report::{
    canonical_hash, check_physics, config_hash, emit_results, exit, exit_code, parse_config, run_checks, CheckOptions,
    RunManifest,
};
use pwlab::Error;

#[derive(Parser)]
#[command(name = "pwlab", version, about = "Pilot-wave simulations of interferometric Bell tests")]
struct Cli {
    /// Scenario config (JSON). Without one the documented defaults are used.
    #[arg(long, global = true, value_name = "PATH")]
    config: Option<PathBuf>,
    /// Overrides `ensemble.seed`.
    #[arg(long, global = true, value_name = "U64")]
    seed: Option<u64>,
    #[arg(long, global = true, value_name = "DIR", default_value = "pwlab-out")]
    out: PathBuf,
    /// Comma-separated list of json, csv, svg, snapshot. JSON is always written.
    #[arg(long, global = true, value_name = "LIST", default_value = "json")]
    format: String,
    /// Worker threads; 0 means one per core.
    #[arg(long, global = true, value_name = "N", env = "PWLAB_THREADS")]
    threads: Option<usize>,
    #[arg(short, long, global = true)]
    quiet: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// CHSH test: coincidence tables and S, analytic and sampled.
    Bell,
    /// Two-time joint law, its marginals and the signalling gap.
    TwoTime,
    /// Semi-interferometer trajectories, with or without a pointer.
    Semi,
    /// Semi-interferometer over a range of pointer speeds.
    PointerSweep,
    /// Runs the invariant suite; exits 4 if any check fails.
    Check(CheckArgs),
}

#[derive(Args)]
struct CheckArgs {
    /// Multiplies every tolerance on exact and numerical errors.
    #[arg(long, default_value_t = 1.0)]
    tol_scale: f64,
    /// Also runs the slow-pointer scenario (about a minute).
    #[arg(long)]
    full: bool,
    /// Ensemble size for the trajectory checks.
    #[arg(long, default_value_t = 5000)]
    samples: usize,
}

fn now() -> String {
    chrono::Utc::now().to_rfc3339_opts(chrono::SecondsFormat::Millis, true)
}

fn fail(e: &Error) -> ExitCode {
    eprintln!("pwlab: {e}");
    ExitCode::from(exit_code(e) as u8)
}

fn print_verdict(v: &Verdict) {
    println!(
        "{} {:<44} value {:<12.6e} limit {:<10.3e} {}",
        if v.pass { "PASS" } else { "FAIL" },
        v.name,
        v.value + 0.0,
        v.limit,
        v.detail
    );
}

fn load(cli: &Cli, kind: Kind) -> Result<ScenarioConfig, Error> {
    let mut c = match &cli.config {
        Some(p) => parse_config(p)?,
        None => ScenarioConfig::new(kind).resolved(),
    };
    if c.kind != kind {
        return Err(Error::Config(format!("config is for {}, but the command is {}", c.kind.name(), kind.name())));
    }
    if let Some(s) = cli.seed {
        c.ensemble.seed = Some(s);
    }
    check_physics(&c)?;
    Ok(c)
}

fn scenario(cli: &Cli, kind: Kind) -> Result<ExitCode, Error> {
    let formats = parse_formats(&cli.format)?;
    let config = load(cli, kind)?;
    let started_at = now();
    let outcome = run(&config)?;
    let files = emit_results(&outcome, &config, &formats, &cli.out)?;
    let verdicts = outcome.verdicts();
    let mut m = RunManifest::new(kind.name(), config_hash(&config)?, config.seed(), &verdicts, files);
    m.started_at = started_at;
    m.finished_at = now();
    m.write(&cli.out)?;
    if !cli.quiet {
        verdicts.iter().for_each(print_verdict);
        println!("wrote {} files to {}", m.files.len() + 1, cli.out.display());
    }
    Ok(ExitCode::SUCCESS)
}

fn check(cli: &Cli, args: &CheckArgs) -> Result<ExitCode, Error> {
    if cli.config.is_some() {
        return Err(Error::Config("check takes no config file".into()));
    }
    let opts = CheckOptions { tol_scale: args.tol_scale, full: args.full, seed: cli.seed.unwrap_or(1), samples: args.samples };
    let started_at = now();
    let quiet = cli.quiet;
    let verdicts = run_checks(&opts, &mut |v| {
        if !quiet {
            print_verdict(v)
        }
    })?;
    write_check(&cli.out, &opts, &verdicts, started_at)?;
    let failed = verdicts.iter().filter(|v| !v.pass).count();
    if !quiet {
        println!("{} checks, {failed} failed", verdicts.len());
    }
    Ok(if failed == 0 { ExitCode::SUCCESS } else { ExitCode::from(exit::CHECK_FAILED as u8) })
}

fn write_check(dir: &Path, opts: &CheckOptions, verdicts: &[Verdict], started_at: String) -> Result<(), Error> {
    std::fs::create_dir_all(dir)?;
    let body = serde_json::json!({ "options": opts, "verdicts": verdicts });
    std::fs::write(dir.join("check.json"), serde_json::to_string_pretty(&body)? + "\n")?;
    let mut m = RunManifest::new("check", canonical_hash(opts)?, opts.seed, verdicts, vec!["check.json".into()]);
    m.started_at = started_at;
    m.finished_at = now();
    m.write(dir)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(n) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            eprintln!("pwlab: cannot start {n} threads: {e}");
            return ExitCode::from(exit::RUNTIME as u8);
        }
    }
    let result = match &cli.command {
        Command::Bell => scenario(&cli, Kind::Bell),
        Command::TwoTime => scenario(&cli, Kind::TwoTime),
        Command::Semi => scenario(&cli, Kind::Semi),
        Command::PointerSweep => scenario(&cli, Kind::PointerSweep),
        Command::Check(a) => check(&cli, a),
    };
    result.unwrap_or_else(|e| fail(&e))
}
