//! Command-line front end.
//!
//! Four subcommands over one TOML experiment file:
//!
//! * `verify` - tabulate every configured rule's kernel and check detailed
//!   balance and stationarity against the target;
//! * `run` - run one seeded chain and emit a CSV trace with a summary
//!   footer, byte-identical for identical config and seed;
//! * `compare` - check that Metropolis-Hastings dominates every configured
//!   rule pointwise and entrywise off the kernel diagonal;
//! * `map` - translate the configured parameter into every other
//!   parameterization and confirm the acceptance probabilities coincide.
//!
//! Exit codes: 0 all checks pass, 1 a verification failed, 2 usage or
//! configuration error.

use crate::acceptance::{all_pairs, validate_symmetric_fn, AcceptanceRule};
use crate::config::{
    build_driver, build_map_source, load_config, ExperimentConfig, LoadedModel, RuleSpec,
};
use crate::error::{Error, Result};
use crate::exec;
use crate::mappings::{rule_for, transforms_for};
use crate::model::{DiscreteModel, ModelOps};
use crate::oracle;
use crate::rng::RngStream;
use crate::samplers::{run_chain, ChainRun, Driver, Duplication};
use crate::stats;
use clap::{Args, Parser, Subcommand};
use std::fmt::Write as _;
use std::path::PathBuf;
use std::sync::Arc;

#[derive(Parser)]
#[command(name = "hastings-lab", version, about = "Acceptance rules of the Hastings family: verify, run, compare, map")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand)]
pub enum Command {
    /// Check detailed balance and stationarity of every configured rule
    Verify(CommonOpts),
    /// Run one seeded chain and print a CSV trace
    Run(CommonOpts),
    /// Compare every configured rule against Metropolis-Hastings
    Compare(CommonOpts),
    /// Translate the configured parameter into the other parameterizations
    Map(CommonOpts),
}

#[derive(Args)]
pub struct CommonOpts {
    /// Experiment configuration (TOML)
    #[arg(long)]
    pub config: PathBuf,
    /// Override the configured seed
    #[arg(long)]
    pub seed: Option<u64>,
    /// Override the configured number of steps
    #[arg(long)]
    pub steps: Option<usize>,
    /// Override how many initial steps are dropped from the trace
    #[arg(long)]
    pub discard: Option<usize>,
    /// Write output to this file instead of stdout
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Corrupt one kernel entry before verification (verify only)
    #[arg(long)]
    pub fault_inject: bool,
}

/// 17 significant digits: enough to round-trip any f64 exactly.
fn fmt_real(v: f64) -> String {
    format!("{v:.16e}")
}

fn emit(out: &Option<PathBuf>, text: &str) -> Result<()> {
    match out {
        Some(path) => std::fs::write(path, text).map_err(Error::Io),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn spec_label(spec: &RuleSpec) -> String {
    match (&spec.param, spec.value) {
        (Some(p), Some(v)) => format!("{}[{p}={v}]", spec.name),
        (Some(p), None) => format!("{}[{p}]", spec.name),
        (None, Some(v)) => format!("{}[{v}]", spec.name),
        (None, None) => spec.name.clone(),
    }
}

fn require_discrete(cfg: &ExperimentConfig, what: &str) -> Result<Arc<DiscreteModel>> {
    match cfg.build_model()? {
        LoadedModel::Discrete(m) => Ok(m),
        LoadedModel::Normal(_) => Err(Error::Config(format!(
            "`{what}` needs a discrete model; kernels of continuous models cannot be tabulated"
        ))),
    }
}

/// The rules a verify/compare works through: the configured list, or the
/// standard battery when none is given.
fn configured_rules(
    cfg: &ExperimentConfig,
    model: &Arc<DiscreteModel>,
) -> Result<Vec<(String, AcceptanceRule<usize>)>> {
    let mut specs: Vec<RuleSpec> = Vec::new();
    if let Some(r) = &cfg.rule {
        specs.push(r.clone());
    }
    specs.extend(cfg.rules.iter().cloned());
    if specs.is_empty() {
        return Ok(oracle::standard_rule_family(model));
    }
    specs
        .iter()
        .map(|spec| {
            let rule = match build_driver(model, spec)? {
                Driver::Rule(rule) => rule,
                // The two-stage driver realizes the same kernel as the
                // single-stage k-dial rule.
                Driver::TwoStage(k) => AcceptanceRule::algorithm_m(k)
                    .map_err(|e| Error::Config(e.to_string()))?,
            };
            Ok((spec_label(spec), rule))
        })
        .collect()
}

pub fn cmd_verify(opts: &CommonOpts) -> Result<bool> {
    let cfg = load_config(&opts.config)?;
    let model = require_discrete(&cfg, "verify")?;
    let rules = configured_rules(&cfg, &model)?;
    let mut text = String::from("rule,metric,value,pass\n");
    let mut all_pass = true;
    for (label, rule) in &rules {
        let mut kernel = oracle::build_kernel(&model, rule)?;
        if opts.fault_inject {
            oracle::inject_fault(&mut kernel);
        }
        let balance = oracle::check_detailed_balance(&model, &kernel);
        let stationary_gap = oracle::stationary_error(&model, &kernel)?;
        let row_err = kernel.max_row_sum_error();
        let stationary_ok = stationary_gap <= oracle::STATIONARY_TOL;
        let rows_ok = row_err <= 1e-12;
        for (metric, value, pass) in [
            ("balance_max_violation", balance.max_violation, balance.pass),
            ("stationary_gap", stationary_gap, stationary_ok),
            ("row_sum_error", row_err, rows_ok),
        ] {
            writeln!(text, "{label},{metric},{},{}", fmt_real(value), pass)
                .expect("writing to a string");
            all_pass &= pass;
        }
    }
    emit(&opts.out, &text)?;
    Ok(all_pass)
}

struct RunReport {
    csv: String,
}

#[allow(clippy::too_many_arguments)]
fn render_run<Mo: ModelOps>(
    model: &Mo,
    driver: &Driver<Mo::State>,
    start: Mo::State,
    steps: usize,
    discard: usize,
    seed: u64,
    fmt_state: impl Fn(Mo::State) -> String,
    statistic: impl Fn(Mo::State) -> f64,
    summaries: impl Fn(&ChainRun<Mo::State>, &[Mo::State]) -> Vec<(String, String)>,
) -> Result<RunReport> {
    if discard >= steps {
        return Err(Error::Config(format!(
            "discard ({discard}) must be below steps ({steps})"
        )));
    }
    let mut rng = RngStream::new(seed, 0);
    let run = run_chain(model, driver, start, steps, &mut rng)?;
    let mut csv = String::from("step,state,accepted,duplication_type\n");
    for (i, out) in run.outcomes.iter().enumerate() {
        if i < discard {
            continue;
        }
        writeln!(
            csv,
            "{},{},{},{}",
            i + 1,
            fmt_state(out.next),
            out.accepted,
            out.duplication
        )
        .expect("writing to a string");
    }
    let kept: Vec<Mo::State> = run.outcomes[discard..].iter().map(|o| o.next).collect();
    csv.push_str("metric,value\n");
    let n = run.outcomes.len() as f64;
    writeln!(csv, "acceptance_rate,{}", fmt_real(run.acceptance_rate()))
        .expect("writing to a string");
    let (tx, ty) = if run.two_stage {
        (
            fmt_real(run.duplications(Duplication::TypeX) as f64 / n),
            fmt_real(run.duplications(Duplication::TypeY) as f64 / n),
        )
    } else {
        ("n/a".into(), "n/a".into())
    };
    writeln!(csv, "typex_rate,{tx}").expect("writing to a string");
    writeln!(csv, "typey_rate,{ty}").expect("writing to a string");
    let bmv = if kept.len() >= 4 {
        let samples: Vec<f64> = kept.iter().map(|&s| statistic(s)).collect();
        fmt_real(stats::batch_means(&samples).asymptotic_variance)
    } else {
        "n/a".into()
    };
    writeln!(csv, "batch_means_variance,{bmv}").expect("writing to a string");
    for (k, v) in summaries(&run, &kept) {
        writeln!(csv, "{k},{v}").expect("writing to a string");
    }
    Ok(RunReport { csv })
}

pub fn cmd_run(opts: &CommonOpts) -> Result<bool> {
    let cfg = load_config(&opts.config)?;
    let spec = cfg.primary_rule();
    let steps = opts.steps.unwrap_or(cfg.run.steps);
    let seed = opts.seed.unwrap_or(cfg.run.seed);
    let discard = opts.discard.unwrap_or(cfg.run.discard);
    let report = match cfg.build_model()? {
        LoadedModel::Discrete(model) => {
            let driver = build_driver(&model, &spec)?;
            let start = match cfg.run.start {
                None => 0,
                Some(s) => {
                    let idx = s as usize;
                    if s.fract() != 0.0 || s < 0.0 || idx >= model.n() {
                        return Err(Error::Config(format!(
                            "start {s} is not a state index below {}",
                            model.n()
                        )));
                    }
                    idx
                }
            };
            let n = model.n();
            render_run(
                model.as_ref(),
                &driver,
                start,
                steps,
                discard,
                seed,
                |s| s.to_string(),
                |s| (s == 0) as u8 as f64,
                move |_, kept| {
                    let mut counts = vec![0u64; n];
                    for &s in kept {
                        counts[s] += 1;
                    }
                    counts
                        .iter()
                        .enumerate()
                        .map(|(i, &c)| {
                            (format!("freq_{i}"), fmt_real(c as f64 / kept.len() as f64))
                        })
                        .collect()
                },
            )?
        }
        LoadedModel::Normal(model) => {
            let driver = build_driver(&model, &spec)?;
            let start = cfg.run.start.unwrap_or(0.0);
            render_run(
                model.as_ref(),
                &driver,
                start,
                steps,
                discard,
                seed,
                fmt_real,
                |s| s,
                |_, kept| {
                    let n = kept.len() as f64;
                    let mean = kept.iter().sum::<f64>() / n;
                    let var = kept.iter().map(|&s| (s - mean) * (s - mean)).sum::<f64>() / n;
                    vec![
                        ("mean".into(), fmt_real(mean)),
                        ("variance".into(), fmt_real(var)),
                    ]
                },
            )?
        }
    };
    emit(&opts.out, &report.csv)?;
    Ok(true)
}

pub fn cmd_compare(opts: &CommonOpts) -> Result<bool> {
    let cfg = load_config(&opts.config)?;
    let model = require_discrete(&cfg, "compare")?;
    let rules = configured_rules(&cfg, &model)?;
    let reports = exec::par_map(&rules, |(label, rule)| {
        (label.clone(), oracle::mh_dominance(&model, rule))
    });
    let mut text =
        String::from("rule,worst_alpha_excess,worst_kernel_excess,max_alpha_gap,pass\n");
    let mut all_pass = true;
    for (label, report) in reports {
        let report = report?;
        writeln!(
            text,
            "{label},{},{},{},{}",
            fmt_real(report.worst_alpha_excess),
            fmt_real(report.worst_kernel_excess),
            fmt_real(report.max_alpha_gap),
            report.pass
        )
        .expect("writing to a string");
        all_pass &= report.pass;
    }
    emit(&opts.out, &text)?;
    Ok(all_pass)
}

pub fn cmd_map(opts: &CommonOpts) -> Result<bool> {
    let cfg = load_config(&opts.config)?;
    let model = require_discrete(&cfg, "map")?;
    let source = build_map_source(&model, &cfg.primary_rule())?;
    let pairs = all_pairs(model.n());
    let source_rule = rule_for(source.clone()).map_err(|e| Error::Config(e.to_string()))?;
    let mut text = String::from(
        "x,y,transform,source_value,mapped_value,alpha_source,alpha_mapped,abs_diff,status\n",
    );
    let mut all_ok = true;
    for mapped in transforms_for(&model, &source) {
        let mapped_rule = rule_for(mapped.result.clone())?;
        if !validate_symmetric_fn(model.as_ref(), &mapped.result, &pairs).is_clean() {
            all_ok = false;
        }
        for &(x, y) in &pairs {
            let a = source_rule.alpha(model.as_ref(), x, y)?;
            let b = mapped_rule.alpha(model.as_ref(), x, y)?;
            let diff = (a - b).abs();
            let ok = diff <= 1e-12;
            all_ok &= ok;
            writeln!(
                text,
                "{x},{y},{},{},{},{},{},{},{}",
                mapped.result.label(),
                fmt_real(source.eval(x, y)),
                fmt_real(mapped.result.eval(x, y)),
                fmt_real(a),
                fmt_real(b),
                fmt_real(diff),
                if ok { "ok" } else { "mismatch" }
            )
            .expect("writing to a string");
        }
    }
    emit(&opts.out, &text)?;
    Ok(all_ok)
}

pub fn dispatch(cli: &Cli) -> Result<bool> {
    match &cli.command {
        Command::Verify(o) => cmd_verify(o),
        Command::Run(o) => cmd_run(o),
        Command::Compare(o) => cmd_compare(o),
        Command::Map(o) => cmd_map(o),
    }
}

/// Parse, dispatch and translate the outcome into a process exit code.
pub fn main_entry() -> i32 {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 2,
            };
            let _ = e.print();
            return code;
        }
    };
    exec::configure_threads_from_env();
    match dispatch(&cli) {
        Ok(true) => 0,
        Ok(false) => 1,
        Err(e @ Error::Config(_)) => {
            eprintln!("error: {e}");
            2
        }
        Err(e) => {
            eprintln!("error: {e}");
            1
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn write_cfg(dir: &tempfile::TempDir, text: &str) -> PathBuf {
        let path = dir.path().join("cfg.toml");
        std::fs::write(&path, text).unwrap();
        path
    }

    fn opts(config: PathBuf, out: Option<PathBuf>) -> CommonOpts {
        CommonOpts {
            config,
            seed: None,
            steps: None,
            discard: None,
            out,
            fault_inject: false,
        }
    }

    const D2: &str = r#"
        [model]
        kind = "discrete"
        p = [1.0, 2.0]
        gamma = [[0.5, 0.5], [0.5, 0.5]]

        [run]
        steps = 50
        seed = 3
    "#;

    #[test]
    fn verify_passes_and_fault_injection_fails() {
        let dir = tempfile::tempdir().unwrap();
        let cfg = write_cfg(&dir, D2);
        let out = dir.path().join("report.csv");
        let mut o = opts(cfg, Some(out.clone()));
        assert!(cmd_verify(&o).unwrap());
        let text = std::fs::read_to_string(&out).unwrap();
        assert!(text.starts_with("rule,metric,value,pass"));
        assert!(text.contains("MH,balance_max_violation"));
        o.fault_inject = true;
        assert!(!cmd_verify(&o).unwrap());
    }

    #[test]
    fn run_is_byte_deterministic() {
        let dir = tempfile::tempdir().unwrap();
        let cfg = write_cfg(&dir, D2);
        let a = dir.path().join("a.csv");
        let b = dir.path().join("b.csv");
        assert!(cmd_run(&opts(cfg.clone(), Some(a.clone()))).unwrap());
        assert!(cmd_run(&opts(cfg.clone(), Some(b.clone()))).unwrap());
        assert_eq!(std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
        let text = std::fs::read_to_string(&a).unwrap();
        assert!(text.starts_with("step,state,accepted,duplication_type\n1,"));
        assert!(text.contains("acceptance_rate,"));
        assert!(text.contains("freq_0,"));
        // A different seed changes the trace.
        let mut o = opts(cfg, Some(b.clone()));
        o.seed = Some(99);
        assert!(cmd_run(&o).unwrap());
        assert_ne!(std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
    }

    #[test]
    fn map_round_trip_passes_on_d2() {
        let dir = tempfile::tempdir().unwrap();
        let cfg = write_cfg(
            &dir,
            r#"
            [model]
            kind = "discrete"
            p = [1.0, 2.0]
            gamma = [[0.5, 0.5], [0.5, 0.5]]

            [rule]
            name = "m"
            param = "const"
            value = 3.0
        "#,
        );
        let out = dir.path().join("map.csv");
        assert!(cmd_map(&opts(cfg, Some(out.clone()))).unwrap());
        let text = std::fs::read_to_string(&out).unwrap();
        assert!(text.contains("s_from[k=3]"));
        assert!(!text.contains("mismatch"));
    }

    #[test]
    fn compare_passes_on_the_battery() {
        let dir = tempfile::tempdir().unwrap();
        let cfg = write_cfg(&dir, D2);
        assert!(cmd_compare(&opts(cfg, None)).unwrap());
    }

    #[test]
    fn config_errors_surface_as_config() {
        let dir = tempfile::tempdir().unwrap();
        let cfg = write_cfg(&dir, "[model]\nkind = \"discrete\"");
        assert!(matches!(
            cmd_verify(&opts(cfg, None)).unwrap_err(),
            Error::Config(_)
        ));
        let missing = dir.path().join("nope.toml");
        assert!(matches!(
            cmd_run(&opts(missing, None)).unwrap_err(),
            Error::Config(_)
        ));
    }

    #[test]
    fn continuous_model_rejected_where_kernels_are_needed() {
        let dir = tempfile::tempdir().unwrap();
        let cfg = write_cfg(
            &dir,
            r#"
            [model]
            kind = "normal"
            sigma = 1.0
            proposal = "random_walk"
        "#,
        );
        assert!(matches!(
            cmd_verify(&opts(cfg, None)).unwrap_err(),
            Error::Config(_)
        ));
    }
}
