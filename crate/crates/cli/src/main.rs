mod repro;
mod theorem;

use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use mirrorqst::lab::{csv_string, report_json, run_scenario, ScenarioConfig};
use mirrorqst::{
    build_couplings, build_hamiltonian, certify_pst, detect_commensurability, diagonalize, parity_pattern_check,
    pst_spectral_condition, reflection_permutation, scan_transfer_time, Error, Result, SpectrumModel,
};
use serde_json::json;

#[derive(Parser)]
#[command(name = "mirrorqst", version, about = "State transfer and mirror mode concurrence in engineered chains")]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Directory for output files. Without it results go to stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    /// Worker threads for time scans.
    #[arg(long, global = true, default_value_t = 1)]
    threads: usize,

    /// Overrides every tolerance of the scenario.
    #[arg(long, global = true)]
    tol: Option<f64>,
}

#[derive(Subcommand)]
enum Command {
    /// Time series of fidelity and mirror mode concurrence.
    Scan(ConfigArg),
    /// Perfect-transfer certificate at the transfer time.
    Certify(ConfigArg),
    /// Commensurability, parity pattern and closed-form comparison.
    Spectrum(ConfigArg),
    /// Transfer/concurrence theorem over random packets and general symmetries.
    Theorem(theorem::TheoremArgs),
    /// Every figure scenario, written as CSV and JSON.
    Repro(repro::ReproArgs),
}

#[derive(Args)]
struct ConfigArg {
    /// Scenario file (key = value text, or JSON with a .json extension).
    #[arg(long)]
    config: PathBuf,
}

pub(crate) struct Context {
    out: Option<PathBuf>,
    threads: usize,
    tol: Option<f64>,
}

impl Context {
    fn load(&self, path: &Path) -> Result<ScenarioConfig> {
        let mut cfg = ScenarioConfig::load(path)?;
        if let Some(tol) = self.tol {
            cfg.tol.certify = tol;
            cfg.tol.relations = tol;
            cfg.tol.spectrum = tol;
        }
        cfg.validate()?;
        Ok(cfg)
    }

    pub(crate) fn out_dir(&self) -> Result<Option<&Path>> {
        match &self.out {
            Some(dir) => {
                std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
                Ok(Some(dir))
            }
            None => Ok(None),
        }
    }

    /// Writes `text` to `<out>/<name>`, or to stdout without `--out`.
    pub(crate) fn write(&self, name: &str, text: &str) -> Result<()> {
        match self.out_dir()? {
            Some(dir) => write_file(&dir.join(name), text),
            None => {
                let mut stdout = std::io::stdout().lock();
                stdout.write_all(text.as_bytes()).map_err(|e| Error::io("<stdout>", e))
            }
        }
    }
}

pub(crate) fn write_file(path: &Path, text: &str) -> Result<()> {
    log::info!("writing {}", path.display());
    std::fs::write(path, text).map_err(|e| Error::io(path, e))
}

fn scan(ctx: &Context, args: &ConfigArg) -> Result<()> {
    let cfg = ctx.load(&args.config)?;
    let outcome = run_scenario(&cfg, ctx.threads)?;
    let csv = csv_string(&outcome.series);
    let report = report_json(&outcome.report);
    let resolve = |p: &PathBuf| match &ctx.out {
        Some(dir) if p.is_relative() => dir.join(p),
        _ => p.clone(),
    };
    let dir = ctx.out_dir()?;
    match (&cfg.output.csv, dir) {
        (Some(p), _) => write_file(&resolve(p), &csv)?,
        (None, Some(d)) => write_file(&d.join("scan.csv"), &csv)?,
        (None, None) => ctx.write("", &csv)?,
    }
    match (&cfg.output.report, dir) {
        (Some(p), _) => write_file(&resolve(p), &report)?,
        (None, Some(d)) => write_file(&d.join("report.json"), &report)?,
        (None, None) => {}
    }
    Ok(())
}

fn certify(ctx: &Context, args: &ConfigArg) -> Result<()> {
    let cfg = ctx.load(&args.config)?;
    let decomp = diagonalize(&build_hamiltonian(&build_couplings(&cfg.chain)?))?;
    let s = reflection_permutation(cfg.chain.n_sites())?;
    let (tau, source) = match cfg.tau() {
        Some(t) => (t, "closed form"),
        None => {
            let spectral = pst_spectral_condition(&decomp, &s, cfg.tol.spectrum)?;
            match spectral.tau {
                Some(t) => (t, "spectrum"),
                None => {
                    let psi0 = cfg.initial_packet()?;
                    let grid = cfg.grid()?;
                    let t_max = *grid.last().expect("grid has points");
                    (scan_transfer_time(&decomp, &psi0, &s, t_max, grid.len() - 1)?.0, "fidelity scan")
                }
            }
        }
    };
    let cert = certify_pst(&decomp, &s, tau, cfg.tol.certify)?;
    log::info!("tau = {tau} from {source}; certified = {}", cert.certified);
    let doc = json!({ "certified": cert.certified, "tau_source": source, "certificate": cert });
    ctx.write("certificate.json", &pretty(&doc))
}

fn spectrum(ctx: &Context, args: &ConfigArg) -> Result<()> {
    let cfg = ctx.load(&args.config)?;
    let decomp = diagonalize(&build_hamiltonian(&build_couplings(&cfg.chain)?))?;
    let s = reflection_permutation(cfg.chain.n_sites())?;
    let tol = cfg.tol.spectrum;
    let commensurability = detect_commensurability(decomp.eigenvalues(), tol)?;
    let spectral = pst_spectral_condition(&decomp, &s, tol)?;
    let closed_form = match SpectrumModel::for_chain(&cfg.chain) {
        Ok(model) => {
            let predicted = model.eigenvalues();
            let scale = decomp.max_abs_eigenvalue().max(f64::MIN_POSITIVE);
            let deviation = predicted
                .iter()
                .zip(decomp.eigenvalues())
                .map(|(a, b)| (a - b).abs())
                .fold(0.0, f64::max);
            json!({
                "m": model.m,
                "l": model.l,
                "e0": model.e0,
                "offset": model.offset,
                "relative_deviation": deviation / scale,
                "parity_check": parity_pattern_check(&decomp, &model, tol)?,
            })
        }
        Err(e) => {
            log::info!("no closed form: {e}");
            serde_json::Value::Null
        }
    };
    let doc = json!({
        "eigenvalues": decomp.eigenvalues(),
        "parities": decomp.parities(),
        "commensurability": commensurability,
        "spectral_condition": { "holds": spectral.holds, "tau": spectral.tau },
        "closed_form": closed_form,
    });
    ctx.write("spectrum.json", &pretty(&doc))
}

pub(crate) fn pretty(v: &serde_json::Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("json value serialises");
    s.push('\n');
    s
}

/// Outcome of a suite whose checks can fail without a program error.
pub(crate) enum Verdict {
    Holds,
    Fails,
}

fn run(cli: &Cli) -> Result<Verdict> {
    if cli.threads == 0 {
        return Err(Error::config("--threads", "must be at least 1"));
    }
    if let Some(t) = cli.tol {
        if !(t.is_finite() && t > 0.0) {
            return Err(Error::config("--tol", "must be finite and positive"));
        }
    }
    let ctx = Context {
        out: cli.out.clone(),
        threads: cli.threads,
        tol: cli.tol,
    };
    match &cli.command {
        Command::Scan(a) => scan(&ctx, a).map(|_| Verdict::Holds),
        Command::Certify(a) => certify(&ctx, a).map(|_| Verdict::Holds),
        Command::Spectrum(a) => spectrum(&ctx, a).map(|_| Verdict::Holds),
        Command::Theorem(a) => theorem::run(&ctx, a),
        Command::Repro(a) => repro::run(&ctx, a),
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match run(&cli) {
        Ok(Verdict::Holds) => ExitCode::SUCCESS,
        Ok(Verdict::Fails) => {
            eprintln!("error: checks failed, see the report");
            ExitCode::from(3)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(if e.is_numerical() { 3 } else { 2 })
        }
    }
}
