//! Command-line front end: toy scenarios, Monte Carlo sweeps and schedule
//! debugging. Each subcommand is a library function so it can be tested
//! without spawning a process; `main` only parses arguments and maps errors
//! to exit codes.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};
use serde::Serialize;

use crate::config::SimConfig;
use crate::deployment::{load_scenario, load_scenario_file, Deployment, ScenarioConfig};
use crate::error::{Error, Result};
use crate::mode::{Mode, PowerPolicy};
use crate::montecarlo::output::{
    write_deployments_csv, write_discards_csv, write_percentile_columns, write_percentiles_csv,
    DEPLOYMENTS_SCHEMA, DISCARDS_SCHEMA, PERCENTILES_SCHEMA,
};
use crate::montecarlo::{
    curve_base_seed, run_experiment, EmpiricalCdf, ExperimentResults, ExperimentSpec, Metric,
};
use crate::scheduler::{
    enumerate_combinations, format_combination_table, greedy_select_traced, Decision, GreedyStep,
    Schedule,
};
use crate::simulator::Simulator;

/// Built-in toy scenarios, addressable by name.
pub const TOY_FIXTURES: [(&str, &str); 3] = [
    ("toy1", include_str!("../fixtures/toy1.toml")),
    ("toy2", include_str!("../fixtures/toy2.toml")),
    ("toy3", include_str!("../fixtures/toy3.toml")),
];

#[derive(Debug, Parser)]
#[command(name = "txopsim", version = crate::VERSION, about = "Multi-AP TXOP sharing simulator")]
pub struct Cli {
    /// Configuration file (TOML). Defaults apply to every omitted field.
    #[arg(long, global = true, value_name = "PATH")]
    pub config: Option<PathBuf>,
    /// Output directory, created if missing.
    #[arg(long, global = true, value_name = "DIR", default_value = "out")]
    pub out: PathBuf,
    /// Override a configuration value, e.g. `--set radio.noise_floor_dbm=-90`.
    #[arg(long = "set", global = true, value_name = "KEY=VALUE")]
    pub overrides: Vec<String>,
    /// Worker threads for sweeps (0 = all cores). Shorthand for experiment.workers.
    #[arg(long, global = true)]
    pub workers: Option<usize>,
    /// Deployments per sweep curve. Shorthand for experiment.num_deployments.
    #[arg(long, global = true)]
    pub deployments: Option<usize>,
    /// Increase log verbosity (-v info, -vv debug).
    #[arg(short, long, global = true, action = clap::ArgAction::Count)]
    pub verbose: u8,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Throughput of the three access modes on a toy scenario.
    Toy {
        /// `toy1`, `toy2`, `toy3` or a scenario file.
        scenario: String,
        #[arg(long, value_enum, default_value_t = PolicyArg::Variable)]
        policy: PolicyArg,
    },
    /// Monte Carlo sweep over AP counts and power policies.
    Sweep,
    /// Ranked c-TDMA/SR combinations and the greedy decisions for a scenario.
    ScheduleDebug {
        /// `toy1`, `toy2`, `toy3` or a scenario file.
        scenario: String,
        #[arg(long, value_enum, default_value_t = PolicyArg::Variable)]
        policy: PolicyArg,
        /// Number of ranked combinations to list.
        #[arg(long, default_value_t = 20)]
        limit: usize,
    },
    /// Print the fully resolved configuration.
    Config,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum PolicyArg {
    Fixed,
    Variable,
}

impl From<PolicyArg> for PowerPolicy {
    fn from(p: PolicyArg) -> Self {
        match p {
            PolicyArg::Fixed => PowerPolicy::Fixed,
            PolicyArg::Variable => PowerPolicy::Variable,
        }
    }
}

/// Loads the configuration file (or defaults) and applies overrides, with
/// the dedicated flags taking precedence over `--set`.
pub fn resolve_config(
    path: Option<&Path>,
    overrides: &[String],
    workers: Option<usize>,
    deployments: Option<usize>,
) -> Result<SimConfig> {
    let mut cfg = match path {
        Some(p) => SimConfig::from_file(p)?,
        None => SimConfig::default(),
    };
    cfg.apply_overrides(overrides.iter().map(String::as_str))?;
    if let Some(w) = workers {
        cfg.experiment.workers = w;
    }
    if let Some(n) = deployments {
        cfg.experiment.num_deployments = n;
    }
    cfg.validate()?;
    Ok(cfg)
}

/// Resolves a built-in toy name or loads a scenario file.
pub fn load_named_scenario(name: &str) -> Result<Deployment> {
    match TOY_FIXTURES.iter().find(|(n, _)| *n == name) {
        Some((_, text)) => load_scenario(text),
        None => load_scenario_file(name),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ToyRow {
    pub mode: Mode,
    pub throughput_mbps: f64,
    /// Gain over nc-MAP in percent.
    pub gain_pct: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ToyReport {
    pub scenario: String,
    pub policy: PowerPolicy,
    pub rows: Vec<ToyRow>,
    pub ctdma_sr_slots: usize,
}

impl ToyReport {
    pub fn throughput(&self, mode: Mode) -> f64 {
        self.rows
            .iter()
            .find(|r| r.mode == mode)
            .map(|r| r.throughput_mbps)
            .expect("toy reports contain every mode")
    }

    /// c-TDMA/SR throughput divided by c-TDMA throughput.
    pub fn sr_ratio(&self) -> f64 {
        self.throughput(Mode::CTdmaSr) / self.throughput(Mode::CTdma)
    }

    pub fn render(&self) -> String {
        let mut s = format!(
            "scenario {} ({} power)\n",
            self.scenario,
            policy_name(self.policy)
        );
        let _ = writeln!(s, "{:<10} {:>12} {:>10}", "mode", "Mbps", "gain[%]");
        for r in &self.rows {
            let _ = writeln!(
                s,
                "{:<10} {:>12.2} {:>10.2}",
                r.mode.as_str(),
                r.throughput_mbps,
                r.gain_pct
            );
        }
        let _ = writeln!(
            s,
            "c-TDMA/SR uses {} slots; c-TDMA/SR / c-TDMA = {:.3}",
            self.ctdma_sr_slots,
            self.sr_ratio()
        );
        s
    }

    /// Bar-chart data: one row per mode.
    pub fn write_csv(&self, path: &Path) -> Result<()> {
        let file = fs::File::create(path).map_err(|e| Error::io(path, e))?;
        let mut w = csv::Writer::from_writer(file);
        w.write_record(["scenario", "mode", "throughput_mbps", "gain_pct"])?;
        for r in &self.rows {
            w.write_record([
                self.scenario.clone(),
                r.mode.to_string(),
                r.throughput_mbps.to_string(),
                r.gain_pct.to_string(),
            ])?;
        }
        w.flush().map_err(|e| Error::io(path, e))
    }
}

fn policy_name(p: PowerPolicy) -> &'static str {
    match p {
        PowerPolicy::Fixed => "fixed",
        PowerPolicy::Variable => "variable",
    }
}

pub fn run_toy(cfg: &SimConfig, scenario: &str, policy: PowerPolicy) -> Result<ToyReport> {
    let dep = load_named_scenario(scenario)?;
    let sim = Simulator::from_config(cfg)?;
    let eval = sim.evaluate(&dep, &Mode::ALL, policy)?;
    let rows = Mode::ALL
        .iter()
        .map(|&mode| ToyRow {
            mode,
            throughput_mbps: eval
                .report(mode)
                .expect("all modes evaluated")
                .aggregate_mbps,
            gain_pct: eval.gain_vs_ncmap(mode).expect("all modes evaluated"),
        })
        .collect();
    let ctdma_sr_slots = eval.ctdma_sr.as_ref().map_or(0, |(s, _)| s.num_slots());
    Ok(ToyReport {
        scenario: scenario.to_owned(),
        policy,
        rows,
        ctdma_sr_slots,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScheduleDebug {
    pub num_combinations: usize,
    /// Listing length requested by the caller.
    pub limit: usize,
    /// Ranked combination listing, truncated to `limit`.
    pub table: String,
    pub trace: Vec<GreedyStep>,
    pub schedule: Schedule,
}

impl ScheduleDebug {
    pub fn render(&self) -> String {
        let mut s = format!("{} feasible combinations\n", self.num_combinations);
        s.push_str(&self.table);
        s.push_str("greedy decisions:\n");
        let mut hidden = 0;
        for step in &self.trace {
            if step.position >= self.limit && step.decision != Decision::Accepted {
                hidden += 1;
                continue;
            }
            let what = match step.decision {
                Decision::Accepted => "accepted".to_owned(),
                Decision::Skipped { repeated_sta } => {
                    format!("skipped, STA{} already covered", repeated_sta + 1)
                }
            };
            let _ = writeln!(
                s,
                "  c{:<6} alpha {:>8.2}  {}",
                step.position + 1,
                step.alpha_mbps,
                what
            );
        }
        if hidden > 0 {
            let _ = writeln!(s, "  ({hidden} further skipped candidates not shown)");
        }
        s.push_str("schedule:\n");
        for (i, slot) in self.schedule.slots.iter().enumerate() {
            let links: Vec<String> = slot
                .links
                .iter()
                .map(|l| {
                    format!(
                        "AP{}->STA{} {:.0} dBm MCS{} ({:.1} dB)",
                        l.ap + 1,
                        l.sta + 1,
                        l.tx_power_dbm,
                        l.mcs,
                        l.sinr_db
                    )
                })
                .collect();
            let _ = writeln!(s, "  slot {}: {}", i + 1, links.join(", "));
        }
        s
    }
}

pub fn run_schedule_debug(
    cfg: &SimConfig,
    scenario: &str,
    policy: PowerPolicy,
    limit: usize,
) -> Result<ScheduleDebug> {
    let dep = load_named_scenario(scenario)?;
    let sim = Simulator::from_config(cfg)?;
    let rssi = sim.rssi(&dep)?;
    let combos = enumerate_combinations(&dep, &rssi, sim.link_model(), policy);
    let table = format_combination_table(&combos, dep.num_aps(), limit);
    let (schedule, trace) = greedy_select_traced(&combos, &dep)?;
    Ok(ScheduleDebug {
        num_combinations: combos.len(),
        limit,
        table,
        trace,
        schedule,
    })
}

/// One sweep curve: an AP count under one power policy.
#[derive(Debug, Clone, PartialEq)]
pub struct Curve {
    pub num_aps: usize,
    pub policy: PowerPolicy,
    pub results: ExperimentResults,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepSummary {
    pub curves: Vec<Curve>,
    /// Every file written, manifest last.
    pub files: Vec<PathBuf>,
}

impl SweepSummary {
    pub fn curve(&self, num_aps: usize, policy: PowerPolicy) -> Option<&Curve> {
        self.curves
            .iter()
            .find(|c| c.num_aps == num_aps && c.policy == policy)
    }
}

/// The experiment spec of one sweep curve.
pub fn curve_spec(cfg: &SimConfig, num_aps: usize, policy: PowerPolicy) -> ExperimentSpec {
    ExperimentSpec {
        scenario_template: ScenarioConfig {
            num_aps,
            ..cfg.scenario.clone()
        },
        num_deployments: cfg.experiment.num_deployments,
        modes: cfg.experiment.modes.clone(),
        power_policy: policy,
        base_seed: curve_base_seed(cfg.experiment.base_seed, num_aps),
        worker_count: cfg.experiment.workers,
    }
}

#[derive(Serialize)]
struct Manifest<'a> {
    version: String,
    schemas: BTreeMap<&'static str, &'static str>,
    resolved_config: &'static str,
    curves: Vec<CurveManifest>,
    config: &'a SimConfig,
}

#[derive(Serialize)]
struct CurveManifest {
    num_aps: usize,
    stas_per_ap: usize,
    power_policy: PowerPolicy,
    base_seed: u64,
    num_deployments: usize,
    retained: usize,
    discarded: usize,
    deployments_csv: String,
    percentiles_csv: String,
    discards_csv: String,
}

fn file_name(path: &Path) -> String {
    path.file_name()
        .map(|n| n.to_string_lossy().into_owned())
        .unwrap_or_default()
}

/// Runs every (AP count, power policy) curve and writes per-curve CSVs, the
/// plot tables, the resolved configuration and a manifest to `out`.
pub fn run_sweep(cfg: &SimConfig, out: &Path) -> Result<SweepSummary> {
    cfg.validate()?;
    fs::create_dir_all(out).map_err(|e| Error::io(out, e))?;
    let sim = Simulator::from_config(cfg)?;
    let mut curves = Vec::new();
    let mut files = Vec::new();
    let mut manifest_curves = Vec::new();

    for &num_aps in &cfg.experiment.ap_counts {
        for &policy in &cfg.experiment.power_policies {
            let spec = curve_spec(cfg, num_aps, policy);
            log::info!(
                "curve M={num_aps} {} power: {} deployments from seed {}",
                policy_name(policy),
                spec.num_deployments,
                spec.base_seed
            );
            let results = run_experiment(&spec, &sim)?;
            let stem = format!("M{num_aps}_{}", policy_name(policy));
            let d = out.join(format!("deployments_{stem}.csv"));
            let p = out.join(format!("percentiles_{stem}.csv"));
            let x = out.join(format!("discards_{stem}.csv"));
            write_deployments_csv(&results, &d)?;
            write_percentiles_csv(&results, &p)?;
            write_discards_csv(&results, &x)?;
            manifest_curves.push(CurveManifest {
                num_aps,
                stas_per_ap: cfg.scenario.stas_per_ap,
                power_policy: policy,
                base_seed: spec.base_seed,
                num_deployments: spec.num_deployments,
                retained: results.records.len(),
                discarded: results.discarded.len(),
                deployments_csv: file_name(&d),
                percentiles_csv: file_name(&p),
                discards_csv: file_name(&x),
            });
            files.extend([d, p, x]);
            curves.push(Curve {
                num_aps,
                policy,
                results,
            });
        }
    }

    files.extend(write_plot_tables(&curves, cfg, out)?);

    let resolved = out.join("config.resolved.toml");
    fs::write(&resolved, cfg.to_toml_string()).map_err(|e| Error::io(&resolved, e))?;
    files.push(resolved);

    let manifest = Manifest {
        version: crate::version_string(),
        schemas: BTreeMap::from([
            ("deployments", DEPLOYMENTS_SCHEMA),
            ("percentiles", PERCENTILES_SCHEMA),
            ("discards", DISCARDS_SCHEMA),
        ]),
        resolved_config: "config.resolved.toml",
        curves: manifest_curves,
        config: cfg,
    };
    let text = toml::to_string(&manifest)
        .map_err(|e| Error::Experiment(format!("cannot serialize manifest: {e}")))?;
    let path = out.join("manifest.toml");
    fs::write(&path, text).map_err(|e| Error::io(&path, e))?;
    files.push(path);

    Ok(SweepSummary { curves, files })
}

/// Plot-ready percentile tables: gain CDFs per AP count, variable vs fixed
/// power gains, and TXOP duration CDFs. Tables whose inputs were not run are
/// skipped.
fn write_plot_tables(curves: &[Curve], cfg: &SimConfig, out: &Path) -> Result<Vec<PathBuf>> {
    let primary = cfg.experiment.power_policies[0];
    let cdf = |m: usize, p: PowerPolicy, metric: Metric| -> Option<EmpiricalCdf> {
        curves
            .iter()
            .find(|c| c.num_aps == m && c.policy == p)
            .and_then(|c| c.results.cdf(metric))
    };

    let mut tables: Vec<(&str, Vec<(String, EmpiricalCdf)>)> = Vec::new();
    let mut gains = Vec::new();
    let mut power = Vec::new();
    let mut txop = Vec::new();
    for &m in &cfg.experiment.ap_counts {
        for (metric, name) in [
            (Metric::GainCTdmaPct, "ctdma"),
            (Metric::GainCTdmaSrPct, "ctdma_sr"),
        ] {
            if let Some(c) = cdf(m, primary, metric) {
                gains.push((format!("gain_{name}_M{m}"), c));
            }
        }
        for p in [PowerPolicy::Variable, PowerPolicy::Fixed] {
            if let Some(c) = cdf(m, p, Metric::GainCTdmaSrPct) {
                power.push((format!("gain_ctdma_sr_{}_M{m}", policy_name(p)), c));
            }
        }
        for (metric, name) in [
            (Metric::TxopCTdmaUs, "ctdma"),
            (Metric::TxopCTdmaSrUs, "ctdma_sr"),
        ] {
            if let Some(c) = cdf(m, primary, metric) {
                txop.push((format!("txop_{name}_M{m}"), c));
            }
        }
    }
    tables.push(("gain_cdf.csv", gains));
    if cfg.experiment.power_policies.len() > 1 {
        tables.push(("power_policy_cdf.csv", power));
    }
    tables.push(("txop_cdf.csv", txop));

    let mut written = Vec::new();
    for (name, columns) in tables {
        if columns.is_empty() {
            continue;
        }
        let path = out.join(name);
        let refs: Vec<(&str, &EmpiricalCdf)> =
            columns.iter().map(|(n, c)| (n.as_str(), c)).collect();
        write_percentile_columns(&refs, &path)?;
        written.push(path);
    }
    Ok(written)
}

/// Executes a parsed command line, writing human-readable output to stdout.
pub fn execute(cli: &Cli) -> Result<()> {
    let cfg = resolve_config(
        cli.config.as_deref(),
        &cli.overrides,
        cli.workers,
        cli.deployments,
    )?;
    match &cli.command {
        Command::Toy { scenario, policy } => {
            let report = run_toy(&cfg, scenario, (*policy).into())?;
            print!("{}", report.render());
            fs::create_dir_all(&cli.out).map_err(|e| Error::io(&cli.out, e))?;
            let stem = Path::new(scenario)
                .file_stem()
                .map_or_else(|| "toy".to_owned(), |s| s.to_string_lossy().into_owned());
            let path = cli.out.join(format!("{stem}_throughput.csv"));
            report.write_csv(&path)?;
            println!("wrote {}", path.display());
        }
        Command::Sweep => {
            let summary = run_sweep(&cfg, &cli.out)?;
            for c in &summary.curves {
                let gain = c.results.cdf(Metric::GainCTdmaSrPct);
                let median =
                    gain.map_or_else(|| "-".to_owned(), |g| format!("{:.1}", g.percentile(50.0)));
                println!(
                    "M={} {:<8} retained {:>6} discarded {:>4} median c-TDMA/SR gain {}%",
                    c.num_aps,
                    policy_name(c.policy),
                    c.results.records.len(),
                    c.results.discarded.len(),
                    median
                );
            }
            println!(
                "wrote {} files to {}",
                summary.files.len(),
                cli.out.display()
            );
        }
        Command::ScheduleDebug {
            scenario,
            policy,
            limit,
        } => {
            let debug = run_schedule_debug(&cfg, scenario, (*policy).into(), *limit)?;
            print!("{}", debug.render());
        }
        Command::Config => print!("{}", cfg.to_toml_string()),
    }
    Ok(())
}
