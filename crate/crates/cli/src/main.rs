//! Batch CLI for the adaptive IHT toolbox.
//!
//! Subcommands: `run` (scenario sweeps), `rip-audit` (restricted eigenvalue
//! reports), `demo` (built-in small scenario), `replay` (re-run one
//! replication and print its full trace). Exit codes are stable for
//! scripting: 0 success, 1 runtime failure, 2 usage or config error.

use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use adaiht_core::adaptive::write_selection_csv;
use adaiht_core::error::Error as CoreError;
use adaiht_core::experiments::{
    aggregate, emit_plot_data, emit_records_csv, emit_summary_csv, run_cell, run_scenario,
    EstimatorKind, ScenarioConfig, SummaryReport,
};
use adaiht_core::model::{generate_design, DesignKind, DesignMatrix};
use adaiht_core::rip::{
    contraction_check, restricted_extremes_exact, restricted_extremes_sampled, RipReport,
};

#[derive(Parser)]
#[command(name = "adaiht", version, about = "Adaptive iterative hard thresholding toolbox")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct CommonOpts {
    /// Output directory for CSV artifacts
    #[arg(long, env = "ADAIHT_OUT", default_value = "out", global = true)]
    out: PathBuf,

    /// Master seed override (config files carry their own default)
    #[arg(long, global = true)]
    seed: Option<u64>,

    /// Worker threads for replications (default: available cores);
    /// outputs do not depend on this
    #[arg(long, global = true)]
    threads: Option<usize>,

    /// Config override `key=value`, repeatable; applied after config parse
    #[arg(long = "set", value_name = "KEY=VALUE", global = true)]
    set: Vec<String>,
}

#[derive(Subcommand)]
enum Command {
    /// Run scenario config file(s) and write records, summary and plot CSVs
    Run {
        #[command(flatten)]
        common: CommonOpts,
        /// Scenario config path(s), flat TOML key = value
        #[arg(long, required = true)]
        config: Vec<PathBuf>,
    },
    /// Audit restricted eigenvalues of a design (from CSV or generated)
    RipAudit {
        #[command(flatten)]
        common: CommonOpts,
        /// Design CSV (first line `n,p`, then rows)
        #[arg(long, conflicts_with_all = ["kind", "n", "p"])]
        design_csv: Option<PathBuf>,
        /// Generated design kind: gaussian | rademacher | identity_scaled
        #[arg(long)]
        kind: Option<String>,
        #[arg(long)]
        n: Option<usize>,
        #[arg(long)]
        p: Option<usize>,
        /// Generated designs get unit sqrt(n) columns unless disabled
        #[arg(long, default_value_t = true)]
        normalize: bool,
        /// Audit block sizes 1..=s_max
        #[arg(long, default_value_t = 3)]
        s_max: usize,
        /// Support samples per size when enumeration exceeds the budget
        #[arg(long, default_value_t = 1000)]
        trials: u64,
        /// Also check the Gram-deviation contraction at s_max against this bound
        #[arg(long)]
        delta_claim: Option<f64>,
    },
    /// Run the built-in small end-to-end scenario
    Demo {
        #[command(flatten)]
        common: CommonOpts,
    },
    /// Re-run one (replication, a_over_astar, estimator) cell and print its trace
    Replay {
        #[command(flatten)]
        common: CommonOpts,
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        replication: u64,
        /// Estimator name as it appears in the records CSV
        #[arg(long)]
        estimator: String,
        #[arg(long)]
        a_over_astar: f64,
    },
}

fn parse_overrides(set: &[String]) -> Result<Vec<(String, String)>, String> {
    set.iter()
        .map(|kv| {
            kv.split_once('=')
                .map(|(k, v)| (k.trim().to_string(), v.trim().to_string()))
                .ok_or_else(|| format!("--set expects key=value, got `{kv}`"))
        })
        .collect()
}

fn load_config(
    path: &Path,
    overrides: &[(String, String)],
    seed: Option<u64>,
) -> Result<ScenarioConfig, CoreError> {
    let text = std::fs::read_to_string(path)?;
    let mut all = overrides.to_vec();
    if let Some(s) = seed {
        all.push(("master_seed".to_string(), s.to_string()));
    }
    ScenarioConfig::from_toml_str_with_overrides(&text, &all)
}

fn print_summary(report: &SummaryReport) {
    println!(
        "{:<14} {:<20} {:>8} {:>14} {:>10} {:>10} {:>10}",
        "scenario", "estimator", "a/a*", "med_err/s", "exact_fq", "iters", "event_O"
    );
    for r in &report.rows {
        println!(
            "{:<14} {:<20} {:>8.3} {:>14.4} {:>10.3} {:>10.1} {:>10.3}",
            r.scenario,
            r.estimator.as_str(),
            r.a_over_astar,
            r.normalized_error_q50 / r.s as f64,
            r.exact_recovery_freq,
            r.mean_iterations,
            r.event_o_freq
        );
    }
}

fn write_run_outputs(cfg: &ScenarioConfig, out: &Path) -> Result<SummaryReport, CoreError> {
    std::fs::create_dir_all(out)?;
    if cfg.uses_adaptive_estimators() && !cfg.adaptive_regime_satisfied() {
        eprintln!(
            "# note: scenario `{}` has n <= 14000 s log(ep); the adaptive noise-estimation \
             guarantees are asymptotic at this scale",
            cfg.name
        );
    }
    let records = run_scenario(cfg)?;
    let report = aggregate(&records);

    let base = out.join(&cfg.name);
    let mut f = std::fs::File::create(base.with_extension("records.csv"))?;
    emit_records_csv(&records, &mut f)?;
    let mut f = std::fs::File::create(base.with_extension("summary.csv"))?;
    emit_summary_csv(&report, &mut f)?;
    let mut f = std::fs::File::create(base.with_extension("plot.csv"))?;
    emit_plot_data(&report, &mut f)?;
    // effective config echo, overrides included
    let mut f = std::fs::File::create(base.with_extension("config.toml"))?;
    f.write_all(cfg.to_toml_string().as_bytes())?;
    Ok(report)
}

fn cmd_run(common: &CommonOpts, configs: &[PathBuf]) -> Result<(), CoreError> {
    let overrides = parse_overrides(&common.set).map_err(CoreError::Config)?;
    for path in configs {
        let cfg = load_config(path, &overrides, common.seed)?;
        if !overrides.is_empty() {
            let applied: Vec<String> =
                overrides.iter().map(|(k, v)| format!("{k}={v}")).collect();
            println!("# overrides: {}", applied.join(" "));
        }
        let report = write_run_outputs(&cfg, &common.out)?;
        println!(
            "# scenario `{}`: {} replications, outputs under {}",
            cfg.name,
            cfg.replications,
            common.out.display()
        );
        print_summary(&report);
    }
    Ok(())
}

fn audit_design(
    design: &DesignMatrix,
    s_max: usize,
    trials: u64,
    delta_claim: Option<f64>,
    seed: u64,
    out: &Path,
) -> Result<(), CoreError> {
    design.verify_cache()?;
    println!(
        "# design {}x{}, max col norm {:.6}, normalized: {}",
        design.n(),
        design.p(),
        design.max_col_norm(),
        design.is_normalized()
    );
    let mut lines = vec![RipReport::CSV_HEADER.to_string()];
    for s in 1..=s_max {
        let report = match restricted_extremes_exact(design, s, None) {
            Ok(r) => r,
            Err(CoreError::BudgetExceeded { .. }) => {
                restricted_extremes_sampled(design, s, trials, seed ^ s as u64)?
            }
            Err(e) => return Err(e),
        };
        println!(
            "s={:<3} L_s={:<14.6} m_s={:<14.6} delta_s={:<10.6} gamma_s={:<10.6} ({}, {} supports)",
            report.s,
            report.l_s,
            report.m_s,
            report.delta_s,
            report.gamma(),
            report.method.as_str(),
            report.supports_examined
        );
        lines.push(report.csv_line());
    }
    if let Some(claim) = delta_claim {
        let con = contraction_check(design, s_max, claim, None)?;
        println!(
            "contraction at s={}: worst |eig| = {:.6} vs claim {:.6} -> {}",
            s_max,
            con.worst_abs_eigenvalue,
            claim,
            if con.holds { "holds" } else { "violated" }
        );
    }
    std::fs::create_dir_all(out)?;
    std::fs::write(out.join("rip_report.csv"), lines.join("\n") + "\n")?;
    Ok(())
}

#[allow(clippy::too_many_arguments)]
fn cmd_rip_audit(
    common: &CommonOpts,
    design_csv: Option<&Path>,
    kind: Option<&str>,
    n: Option<usize>,
    p: Option<usize>,
    normalize: bool,
    s_max: usize,
    trials: u64,
    delta_claim: Option<f64>,
) -> Result<(), CoreError> {
    let design = match (design_csv, kind) {
        (Some(path), None) => DesignMatrix::load_csv_path(path)?,
        (None, Some(kind)) => {
            let kind = match kind {
                "gaussian" => DesignKind::Gaussian,
                "rademacher" => DesignKind::Rademacher,
                "identity_scaled" => DesignKind::IdentityScaled,
                other => return Err(CoreError::Config(format!("unknown design kind `{other}`"))),
            };
            let (n, p) = match (n, p) {
                (Some(n), Some(p)) => (n, p),
                _ => return Err(CoreError::Config("--kind requires --n and --p".into())),
            };
            generate_design(kind, n, p, normalize, common.seed.unwrap_or(0))?
        }
        _ => {
            return Err(CoreError::Config(
                "rip-audit needs exactly one of --design-csv or --kind".into(),
            ))
        }
    };
    audit_design(&design, s_max, trials, delta_claim, common.seed.unwrap_or(0), &common.out)
}

fn demo_config(seed: Option<u64>) -> ScenarioConfig {
    let text = r#"
name = "demo"
n = 200
p = 150
s = 3
sigma = 1.0
a_over_astar = [0.8, 2.0]
replications = 10
master_seed = 20200513
estimators = [
  "nonadaptive",
  "early_stopping",
  "iteration_selection",
  "sharp_estimation",
  "iht_top_s",
  "oracle_ls",
]
ista_iters = 80
"#;
    let mut cfg = ScenarioConfig::from_toml_str(text).expect("built-in demo config is valid");
    if let Some(s) = seed {
        cfg.master_seed = s;
    }
    cfg
}

fn cmd_demo(common: &CommonOpts) -> Result<(), CoreError> {
    let overrides = parse_overrides(&common.set).map_err(CoreError::Config)?;
    let cfg = if overrides.is_empty() {
        demo_config(common.seed)
    } else {
        let base = demo_config(common.seed).to_toml_string();
        ScenarioConfig::from_toml_str_with_overrides(&base, &overrides)?
    };
    let report = write_run_outputs(&cfg, &common.out)?;
    println!("# demo scenario done; outputs under {}", common.out.display());
    print_summary(&report);
    Ok(())
}

fn cmd_replay(
    common: &CommonOpts,
    config: &Path,
    replication: u64,
    estimator: &str,
    a_over_astar: f64,
) -> Result<(), CoreError> {
    let overrides = parse_overrides(&common.set).map_err(CoreError::Config)?;
    let cfg = load_config(config, &overrides, common.seed)?;
    let estimator = EstimatorKind::parse(estimator)?;
    let (record, detail) = run_cell(&cfg, replication, a_over_astar, estimator)?;
    println!("# replayed cell:");
    println!("{}", adaiht_core::experiments::RECORDS_CSV_HEADER);
    let mut line = Vec::new();
    emit_records_csv(std::slice::from_ref(&record), &mut line)?;
    let text = String::from_utf8_lossy(&line);
    print!("{}", text.lines().nth(1).map(|l| format!("{l}\n")).unwrap_or_default());
    if let Some(trace) = &detail.trace {
        println!("# trace (stop_index {}, reason {}):", trace.stop_index, trace.stop_reason.as_str());
        let mut buf = Vec::new();
        trace.write_csv(&mut buf, replication)?;
        print!("{}", String::from_utf8_lossy(&buf));
    }
    if !detail.selection.is_empty() {
        println!("# selection records:");
        let mut buf = Vec::new();
        write_selection_csv(&detail.selection, &mut buf)?;
        print!("{}", String::from_utf8_lossy(&buf));
    }
    Ok(())
}

fn dispatch(cli: Cli) -> Result<(), CoreError> {
    let common = match &cli.command {
        Command::Run { common, .. }
        | Command::RipAudit { common, .. }
        | Command::Demo { common }
        | Command::Replay { common, .. } => common.clone(),
    };
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(common.threads.unwrap_or(0))
        .build()
        .map_err(|e| CoreError::Config(e.to_string()))?;
    pool.install(|| match cli.command {
        Command::Run { common, config } => cmd_run(&common, &config),
        Command::RipAudit {
            common,
            design_csv,
            kind,
            n,
            p,
            normalize,
            s_max,
            trials,
            delta_claim,
        } => cmd_rip_audit(
            &common,
            design_csv.as_deref(),
            kind.as_deref(),
            n,
            p,
            normalize,
            s_max,
            trials,
            delta_claim,
        ),
        Command::Demo { common } => cmd_demo(&common),
        Command::Replay { common, config, replication, estimator, a_over_astar } => {
            cmd_replay(&common, &config, replication, &estimator, a_over_astar)
        }
    })
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(cli) {
        Ok(()) => ExitCode::from(0),
        Err(err) => {
            eprintln!("error: {err}");
            match err {
                CoreError::Config(_) | CoreError::Parse(_) => ExitCode::from(2),
                _ => ExitCode::from(1),
            }
        }
    }
}
