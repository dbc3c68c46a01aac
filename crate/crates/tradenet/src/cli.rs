//! Command-line interface.

use std::collections::BTreeSet;
use std::path::{Path, PathBuf};
use std::time::Instant;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use log::info;

use tradenet_core::calibration::{ga_run, GaConfig};
use tradenet_core::nullmodels::{run_null, NullModelKind};
use tradenet_core::scenarios::{run_scenario, ScenarioId, ScenarioSpec};
use tradenet_core::simulation::{ModelConfig, NBuyerMode, NormalizationScope, SocialSignal};
use tradenet_core::{Dataset, GlobalParams, Model, ObservationRecord, RunReport};

use crate::dataio::{self, write_csv, DataError, DatasetPaths};
use crate::files::{self, DatasetSummary, FileError, Manifest};
use crate::synthetic::{gen_synthetic, SyntheticConfig};

pub const MANIFEST_FILE: &str = "manifest.json";

#[derive(Debug, Parser)]
#[command(
    name = "tradenet",
    version,
    about = "Trading channel network simulation and calibration"
)]
pub struct Cli {
    /// Base seed of every random draw.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Worker threads (default: all cores). Results do not depend on it.
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    /// Output directory.
    #[arg(long, global = true, default_value = "out")]
    pub out: PathBuf,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Generate a synthetic dataset with a planted network.
    GenData(GenDataArgs),
    /// Run the model and write observation metrics and networks.
    Simulate(SimulateArgs),
    /// Fit the ten parameters with the genetic algorithm.
    Calibrate(CalibrateArgs),
    /// Compare the null models with the full model.
    Nullmodels(NullArgs),
    /// Run policy scenarios.
    Scenario(ScenarioArgs),
    /// Check a dataset and report every violation.
    Validate(DataArgs),
}

#[derive(Debug, Args)]
pub struct GenDataArgs {
    /// JSON generator configuration; defaults apply to missing keys.
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long)]
    pub n_sellers: Option<usize>,
    #[arg(long)]
    pub n_buyers: Option<usize>,
    /// JSON parameters of the planted network.
    #[arg(long)]
    pub params: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Sample {
    Complete,
    Reduced,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum NBuyerArg {
    Empirical,
    Regression,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ScopeArg {
    PerSeller,
    Global,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SignalArg {
    Scores,
    Active,
}

#[derive(Debug, Args)]
pub struct DataArgs {
    /// Dataset directory (sellers.csv, buyers.csv, links.csv, ...).
    #[arg(long)]
    pub data: PathBuf,
    #[arg(long, value_enum, default_value_t = Sample::Complete)]
    pub sample: Sample,
}

#[derive(Debug, Args)]
pub struct ModelArgs {
    #[arg(long, value_enum, default_value_t = NBuyerArg::Empirical)]
    pub n_buyer_mode: NBuyerArg,
    #[arg(long, value_enum, default_value_t = ScopeArg::PerSeller)]
    pub normalization: ScopeArg,
    #[arg(long, value_enum, default_value_t = SignalArg::Scores)]
    pub social_signal: SignalArg,
    #[arg(long, default_value_t = tradenet_core::simulation::DEFAULT_MAX_ITER)]
    pub max_iter: usize,
}

impl ModelArgs {
    pub fn config(&self) -> ModelConfig {
        ModelConfig {
            n_buyer_mode: match self.n_buyer_mode {
                NBuyerArg::Empirical => NBuyerMode::Empirical,
                NBuyerArg::Regression => NBuyerMode::Regression,
            },
            normalization: match self.normalization {
                ScopeArg::PerSeller => NormalizationScope::PerSeller,
                ScopeArg::Global => NormalizationScope::Global,
            },
            social_signal: match self.social_signal {
                SignalArg::Scores => SocialSignal::Scores,
                SignalArg::Active => SocialSignal::Active,
            },
            max_iter: self.max_iter,
        }
    }
}

/// Parameter file plus individual overrides.
#[derive(Debug, Args)]
pub struct ParamArgs {
    /// JSON parameter file (default: the reduced-sample survey fit).
    #[arg(long)]
    pub params: Option<PathBuf>,
    #[arg(long)]
    pub n_social: Option<f64>,
    #[arg(long)]
    pub w_price: Option<f64>,
    #[arg(long)]
    pub w_dist: Option<f64>,
    #[arg(long)]
    pub w_debts: Option<f64>,
    #[arg(long)]
    pub w_social: Option<f64>,
    #[arg(long)]
    pub w_s_education: Option<f64>,
    #[arg(long)]
    pub w_s_ethnicity: Option<f64>,
    #[arg(long)]
    pub w_s_activegroup: Option<f64>,
    #[arg(long)]
    pub w_s_prestigious_job: Option<f64>,
    #[arg(long)]
    pub w_s_proximity: Option<f64>,
}

impl ParamArgs {
    pub fn resolve(&self) -> Result<GlobalParams> {
        let mut p = match &self.params {
            Some(path) => files::load_params(path)?,
            None => GlobalParams::default(),
        };
        let overrides = [
            (&mut p.n_social, self.n_social),
            (&mut p.w_price, self.w_price),
            (&mut p.w_dist, self.w_dist),
            (&mut p.w_debts, self.w_debts),
            (&mut p.w_social, self.w_social),
            (&mut p.w_s_education, self.w_s_education),
            (&mut p.w_s_ethnicity, self.w_s_ethnicity),
            (&mut p.w_s_activegroup, self.w_s_activegroup),
            (&mut p.w_s_prestigious_job, self.w_s_prestigious_job),
            (&mut p.w_s_proximity, self.w_s_proximity),
        ];
        for (slot, value) in overrides {
            if let Some(v) = value {
                *slot = v;
            }
        }
        p.validate()?;
        Ok(p)
    }
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    #[command(flatten)]
    pub data: DataArgs,
    #[command(flatten)]
    pub model: ModelArgs,
    #[command(flatten)]
    pub params: ParamArgs,
    /// Number of runs, seeded `seed`, `seed + 1`, ...
    #[arg(long, default_value_t = 1)]
    pub runs: usize,
}

#[derive(Debug, Args)]
pub struct CalibrateArgs {
    #[command(flatten)]
    pub data: DataArgs,
    #[command(flatten)]
    pub model: ModelArgs,
    /// JSON GA configuration; flags below override it.
    #[arg(long)]
    pub ga_config: Option<PathBuf>,
    #[arg(long)]
    pub population: Option<usize>,
    #[arg(long)]
    pub generations: Option<usize>,
    #[arg(long)]
    pub replications: Option<usize>,
}

#[derive(Debug, Args)]
pub struct NullArgs {
    #[command(flatten)]
    pub data: DataArgs,
    #[command(flatten)]
    pub model: ModelArgs,
    #[command(flatten)]
    pub params: ParamArgs,
    #[arg(long, default_value_t = 100)]
    pub runs: usize,
}

#[derive(Debug, Args)]
pub struct ScenarioArgs {
    #[command(flatten)]
    pub data: DataArgs,
    #[command(flatten)]
    pub model: ModelArgs,
    #[command(flatten)]
    pub params: ParamArgs,
    /// Comma-separated scenario ids (baseline, A1, A2, B1, B2, C) or "all".
    #[arg(long, default_value = "all")]
    pub scenarios: String,
    #[arg(long, default_value_t = ScenarioSpec::DEFAULT_REPLICATIONS)]
    pub replications: usize,
}

/// A generator configuration that cannot produce a dataset.
#[derive(Debug, thiserror::Error)]
#[error("unusable generator configuration")]
pub struct UnusableConfig(#[source] pub tradenet_core::Error);

/// Exit status: 0 success, 1 invalid input or model error, 2 I/O failure
/// or an unusable generator configuration.
pub fn exit_code(err: &anyhow::Error) -> u8 {
    let io = err.chain().any(|cause| {
        cause.is::<std::io::Error>()
            || cause.is::<UnusableConfig>()
            || cause
                .downcast_ref::<DataError>()
                .is_some_and(DataError::is_io)
            || cause
                .downcast_ref::<FileError>()
                .is_some_and(FileError::is_io)
    });
    if io {
        2
    } else {
        1
    }
}

/// Runs a parsed command, on a dedicated pool when `--threads` is given.
pub fn run(cli: &Cli) -> Result<()> {
    match cli.threads {
        Some(n) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(n)
                .build()
                .context("building thread pool")?;
            pool.install(|| dispatch(cli))
        }
        None => dispatch(cli),
    }
}

fn dispatch(cli: &Cli) -> Result<()> {
    let started = Instant::now();
    std::fs::create_dir_all(&cli.out).with_context(|| format!("creating {}", cli.out.display()))?;
    let mut manifest = Manifest::new(command_name(&cli.command));
    manifest.threads = cli.threads;
    match &cli.command {
        Command::GenData(args) => gen_data(cli, args, &mut manifest)?,
        Command::Simulate(args) => simulate(cli, args, &mut manifest)?,
        Command::Calibrate(args) => calibrate(cli, args, &mut manifest)?,
        Command::Nullmodels(args) => nullmodels(cli, args, &mut manifest)?,
        Command::Scenario(args) => scenario(cli, args, &mut manifest)?,
        Command::Validate(args) => return validate(args),
    }
    manifest.wall_clock_seconds = started.elapsed().as_secs_f64();
    files::save_json(&manifest, &cli.out.join(MANIFEST_FILE))?;
    Ok(())
}

fn command_name(c: &Command) -> &'static str {
    match c {
        Command::GenData(_) => "gen-data",
        Command::Simulate(_) => "simulate",
        Command::Calibrate(_) => "calibrate",
        Command::Nullmodels(_) => "nullmodels",
        Command::Scenario(_) => "scenario",
        Command::Validate(_) => "validate",
    }
}

fn load_data(args: &DataArgs, manifest: &mut Manifest) -> Result<Dataset> {
    let paths = DatasetPaths::in_dir(&args.data);
    for p in paths.all() {
        manifest.add_input(p)?;
    }
    let dataset = dataio::load_dataset(&paths)?;
    let dataset = match args.sample {
        Sample::Complete => dataset,
        Sample::Reduced => dataio::reduced_sample(&dataset)?,
    };
    let summary = DatasetSummary {
        sellers: dataset.sellers.len(),
        buyers: dataset.buyers.len(),
        empirical_links: dataset.empirical_links.len(),
    };
    info!(
        "loaded {} sellers, {} buyers, {} empirical links",
        summary.sellers, summary.buyers, summary.empirical_links
    );
    manifest.dataset = Some(summary);
    Ok(dataset)
}

fn record_params(
    params: &ParamArgs,
    resolved: &GlobalParams,
    manifest: &mut Manifest,
) -> Result<()> {
    if let Some(path) = &params.params {
        manifest.add_input(path)?;
        manifest.config_path = Some(path.clone());
    }
    manifest.parameters = serde_json::to_value(resolved)?;
    Ok(())
}

fn output(cli: &Cli, manifest: &mut Manifest, name: &str) -> PathBuf {
    let path = cli.out.join(name);
    manifest.outputs.push(path.clone());
    path
}

fn gen_data(cli: &Cli, args: &GenDataArgs, manifest: &mut Manifest) -> Result<()> {
    let mut config = match &args.config {
        Some(path) => {
            manifest.add_input(path)?;
            manifest.config_path = Some(path.clone());
            files::load_json::<SyntheticConfig>(path)?
        }
        None => SyntheticConfig::default(),
    };
    config.seed = cli.seed;
    if let Some(n) = args.n_sellers {
        config.n_sellers = n;
    }
    if let Some(n) = args.n_buyers {
        config.n_buyers = n;
    }
    if let Some(path) = &args.params {
        manifest.add_input(path)?;
        config.planted_params = files::load_params(path)?;
    }
    config.validate().map_err(UnusableConfig)?;
    let (dataset, truth) = gen_synthetic(&config)?;
    info!(
        "planted network: {} links, converged {} after {} iterations",
        dataset.empirical_links.len(),
        truth.converged,
        truth.iterations_used
    );
    let paths = dataio::save_dataset(&dataset, &cli.out)?;
    manifest
        .outputs
        .extend(paths.all().into_iter().map(Path::to_path_buf));
    files::save_json(&config, &output(cli, manifest, "synthetic_config.json"))?;
    files::save_params(&truth.params, &output(cli, manifest, "planted_params.json"))?;
    files::save_json(&truth, &output(cli, manifest, "planted_truth.json"))?;
    manifest.parameters = serde_json::to_value(&config)?;
    manifest.seeds = vec![cli.seed];
    manifest.results = serde_json::json!({
        "empirical_links": dataset.empirical_links.len(),
        "planted_iterations_used": truth.iterations_used,
        "planted_converged": truth.converged,
    });
    Ok(())
}

fn seeds(base: u64, runs: usize) -> Vec<u64> {
    (0..runs as u64).map(|r| base.wrapping_add(r)).collect()
}

fn fmt_bool(b: bool) -> String {
    u8::from(b).to_string()
}

fn observation_fields(o: &ObservationRecord) -> [String; 8] {
    [
        o.active_tradings_n.to_string(),
        o.correct_tradings_n.to_string(),
        o.correct_tradings_p.to_string(),
        o.components_n.to_string(),
        o.components_size_mu.to_string(),
        o.components_n_active_only.to_string(),
        o.mean_link_length.to_string(),
        o.mean_price.to_string(),
    ]
}

pub const OBSERVATION_FILE: &str = "observation.csv";
pub const ACTIVE_LINKS_FILE: &str = "active_links.csv";
pub const SELLER_MATCHES_FILE: &str = "seller_matches.csv";

fn simulate(cli: &Cli, args: &SimulateArgs, manifest: &mut Manifest) -> Result<()> {
    if args.runs == 0 {
        bail!("--runs must be at least 1");
    }
    let dataset = load_data(&args.data, manifest)?;
    let params = args.params.resolve()?;
    record_params(&args.params, &params, manifest)?;
    let model = Model::new(&dataset, args.model.config())?;
    manifest.seeds = seeds(cli.seed, args.runs);
    let reports = {
        use rayon::prelude::*;
        manifest
            .seeds
            .par_iter()
            .map(|&seed| model.run(&params, seed))
            .collect::<Result<Vec<RunReport>, _>>()?
    };
    manifest.results = serde_json::Value::Array(
        reports
            .iter()
            .map(|r| {
                serde_json::json!({
                    "seed": r.seed,
                    "iterations_used": r.iterations_used,
                    "converged": r.converged,
                    "cycle_detected": r.cycle_detected,
                    "correct_tradings_p": r.observation.correct_tradings_p,
                })
            })
            .collect(),
    );
    for (run, r) in reports.iter().enumerate() {
        info!(
            "run {run}: {} iterations, converged {}, {:.1}% correct",
            r.iterations_used,
            r.converged,
            100.0 * r.observation.correct_tradings_p
        );
    }

    let mut header = vec![
        "run_id",
        "seed",
        "iterations",
        "converged",
        "cycle_detected",
    ];
    header.extend(ObservationRecord::FIELDS);
    write_csv(
        &output(cli, manifest, OBSERVATION_FILE),
        &header,
        reports.iter().enumerate().map(|(run, r)| {
            let mut row = vec![
                run.to_string(),
                r.seed.to_string(),
                r.iterations_used.to_string(),
                fmt_bool(r.converged),
                fmt_bool(r.cycle_detected),
            ];
            row.extend(observation_fields(&r.observation));
            row
        }),
    )?;

    let empirical = dataset.empirical_set();
    write_csv(
        &output(cli, manifest, ACTIVE_LINKS_FILE),
        &["run_id", "seller_id", "buyer_id", "empirical"],
        reports.iter().enumerate().flat_map(|(run, r)| {
            let empirical = &empirical;
            r.active_links.iter().map(move |k| {
                [
                    run.to_string(),
                    k.0.to_string(),
                    k.1.to_string(),
                    fmt_bool(empirical.contains(k)),
                ]
            })
        }),
    )?;

    let mut sellers: Vec<_> = dataset.sellers.iter().collect();
    sellers.sort_by_key(|s| s.id);
    let mut rows = Vec::new();
    for (run, r) in reports.iter().enumerate() {
        let active: BTreeSet<_> = r.active_links.iter().copied().collect();
        for (s, &n_buyer) in sellers.iter().zip(model.n_buyer()) {
            let mine: Vec<_> = active
                .range((s.id, tradenet_core::AgentId(0))..)
                .take_while(|k| k.0 == s.id)
                .collect();
            let correct = mine.iter().filter(|k| empirical.contains(k)).count();
            let p = if mine.is_empty() {
                0.0
            } else {
                correct as f64 / mine.len() as f64
            };
            rows.push([
                run.to_string(),
                s.id.to_string(),
                n_buyer.to_string(),
                mine.len().to_string(),
                correct.to_string(),
                p.to_string(),
                s.education.to_string(),
                s.ethnicity.to_string(),
                s.age.to_string(),
                s.transport.to_string(),
                s.group_count.to_string(),
                fmt_bool(s.prestigious_job),
                s.house_value.to_string(),
                s.debt_by_buyer.values().sum::<f64>().to_string(),
            ]);
        }
    }
    write_csv(
        &output(cli, manifest, SELLER_MATCHES_FILE),
        &[
            "run_id",
            "seller_id",
            "n_buyer",
            "n_active",
            "n_correct",
            "p_correct",
            "education",
            "ethnicity",
            "age",
            "transport",
            "group_count",
            "prestigious_job",
            "house_value",
            "debts_total",
        ],
        rows,
    )?;
    Ok(())
}

pub const BEST_PARAMS_FILE: &str = "best_params.json";
pub const BEST_PARAMS_NORMALIZED_FILE: &str = "best_params_normalized.json";
pub const TRACE_FILE: &str = "fitness_trace.csv";

fn calibrate(cli: &Cli, args: &CalibrateArgs, manifest: &mut Manifest) -> Result<()> {
    let dataset = load_data(&args.data, manifest)?;
    let mut config = match &args.ga_config {
        Some(path) => {
            manifest.add_input(path)?;
            manifest.config_path = Some(path.clone());
            files::load_json::<GaConfig>(path)?
        }
        None => GaConfig::default(),
    };
    config.seed = cli.seed;
    config.eval_seed = cli.seed;
    if let Some(n) = args.population {
        config.population_size = n;
    }
    if let Some(n) = args.generations {
        config.generations = n;
    }
    if let Some(n) = args.replications {
        config.replications_per_candidate = n;
    }
    manifest.parameters = serde_json::to_value(config)?;
    manifest.seeds = vec![config.seed];
    let model = Model::new(&dataset, args.model.config())?;
    let result = ga_run(&model, &config)?;
    info!("best fitness {:.4}", result.best_fitness);
    manifest.results = serde_json::json!({ "best_fitness": result.best_fitness });

    files::save_params(&result.best, &output(cli, manifest, BEST_PARAMS_FILE))?;
    files::save_params(
        &result.best.normalized(),
        &output(cli, manifest, BEST_PARAMS_NORMALIZED_FILE),
    )?;
    let mut header = vec!["generation", "best", "mean", "worst"];
    header.extend(GlobalParams::NAMES);
    write_csv(
        &output(cli, manifest, TRACE_FILE),
        &header,
        result.trace.generations.iter().map(|g| {
            let mut row = vec![
                g.generation.to_string(),
                g.best.to_string(),
                g.mean.to_string(),
                g.worst.to_string(),
            ];
            row.extend(g.best_genome.iter().map(f64::to_string));
            row
        }),
    )?;
    Ok(())
}

pub const NULL_RUNS_FILE: &str = "null_models.csv";
pub const NULL_SUMMARY_FILE: &str = "null_summary.csv";
pub const FULL_MODEL_LABEL: &str = "full_model";

fn mean_sd(values: &[f64]) -> (f64, f64) {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let sd = if values.len() < 2 {
        0.0
    } else {
        (values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0)).sqrt()
    };
    (mean, sd)
}

fn nullmodels(cli: &Cli, args: &NullArgs, manifest: &mut Manifest) -> Result<()> {
    if args.runs == 0 {
        bail!("--runs must be at least 1");
    }
    let dataset = load_data(&args.data, manifest)?;
    let params = args.params.resolve()?;
    record_params(&args.params, &params, manifest)?;
    let model = Model::new(&dataset, args.model.config())?;
    manifest.seeds = seeds(cli.seed, args.runs);

    let labels: Vec<&str> = NullModelKind::ALL
        .iter()
        .map(|k| k.name())
        .chain([FULL_MODEL_LABEL])
        .collect();
    let jobs: Vec<(usize, u64)> = (0..labels.len())
        .flat_map(|k| manifest.seeds.iter().map(move |&s| (k, s)))
        .collect();
    let reports = {
        use rayon::prelude::*;
        jobs.par_iter()
            .map(|&(k, seed)| match NullModelKind::ALL.get(k) {
                Some(&kind) => Ok(run_null(&model, kind, seed)),
                None => model.run(&params, seed),
            })
            .collect::<Result<Vec<RunReport>, _>>()?
    };

    write_csv(
        &output(cli, manifest, NULL_RUNS_FILE),
        &[
            "kind",
            "seed",
            "correct_tradings_p",
            "components_n",
            "components_n_active_only",
        ],
        jobs.iter().zip(&reports).map(|(&(k, seed), r)| {
            [
                labels[k].to_string(),
                seed.to_string(),
                r.observation.correct_tradings_p.to_string(),
                r.observation.components_n.to_string(),
                r.observation.components_n_active_only.to_string(),
            ]
        }),
    )?;
    write_csv(
        &output(cli, manifest, NULL_SUMMARY_FILE),
        &[
            "kind",
            "runs",
            "correct_tradings_p_mean",
            "correct_tradings_p_sd",
            "components_n_mean",
        ],
        labels.iter().enumerate().map(|(k, label)| {
            let of_kind: Vec<&RunReport> = jobs
                .iter()
                .zip(&reports)
                .filter(|((j, _), _)| *j == k)
                .map(|(_, r)| r)
                .collect();
            let p: Vec<f64> = of_kind
                .iter()
                .map(|r| r.observation.correct_tradings_p)
                .collect();
            let c: Vec<f64> = of_kind
                .iter()
                .map(|r| r.observation.components_n as f64)
                .collect();
            let (p_mean, p_sd) = mean_sd(&p);
            let (c_mean, _) = mean_sd(&c);
            info!("{label}: {:.1}% correct", 100.0 * p_mean);
            [
                label.to_string(),
                p.len().to_string(),
                p_mean.to_string(),
                p_sd.to_string(),
                c_mean.to_string(),
            ]
        }),
    )?;
    Ok(())
}

pub const SCENARIO_RUNS_FILE: &str = "scenario_runs.csv";
pub const SCENARIO_SUMMARY_FILE: &str = "scenario_summary.csv";

fn parse_scenarios(list: &str) -> Result<Vec<ScenarioId>> {
    if list.trim().eq_ignore_ascii_case("all") {
        return Ok(ScenarioId::ALL.to_vec());
    }
    list.split(',')
        .map(|s| s.trim().parse().map_err(anyhow::Error::from))
        .collect()
}

fn scenario(cli: &Cli, args: &ScenarioArgs, manifest: &mut Manifest) -> Result<()> {
    let dataset = load_data(&args.data, manifest)?;
    let params = args.params.resolve()?;
    record_params(&args.params, &params, manifest)?;
    let ids = parse_scenarios(&args.scenarios)?;
    manifest.seeds = seeds(cli.seed, args.replications);
    let mut run_rows = Vec::new();
    let mut summary_rows = Vec::new();
    for id in ids {
        let spec = ScenarioSpec {
            id,
            replications: args.replications,
            base_seed: cli.seed,
        };
        let outcome = run_scenario(&dataset, &params, args.model.config(), &spec)?;
        for r in &outcome.replications {
            let mut row = vec![
                id.to_string(),
                r.replication.to_string(),
                r.seed.to_string(),
            ];
            match &r.indicators {
                Ok(ind) => {
                    row.extend(ind.values().iter().map(f64::to_string));
                    row.push(String::new());
                }
                Err(e) => {
                    row.extend(std::iter::repeat_n("NaN".to_string(), 4));
                    row.push(e.to_string());
                }
            }
            run_rows.push(row);
        }
        for s in &outcome.summary {
            info!("{id} {}: {:.4} (sd {:.4})", s.indicator, s.mean, s.sd);
            summary_rows.push([
                id.to_string(),
                s.indicator.to_string(),
                s.mean.to_string(),
                s.sd.to_string(),
            ]);
        }
    }
    let mut header = vec!["scenario", "replication", "seed"];
    header.extend(tradenet_core::ScenarioIndicators::NAMES);
    header.push("error");
    write_csv(
        &output(cli, manifest, SCENARIO_RUNS_FILE),
        &header,
        run_rows,
    )?;
    write_csv(
        &output(cli, manifest, SCENARIO_SUMMARY_FILE),
        &["scenario", "indicator", "mean", "sd"],
        summary_rows,
    )?;
    Ok(())
}

fn validate(args: &DataArgs) -> Result<()> {
    let mut manifest = Manifest::new("validate");
    let dataset = load_data(args, &mut manifest)?;
    println!(
        "ok: {} sellers, {} buyers, {} empirical links",
        dataset.sellers.len(),
        dataset.buyers.len(),
        dataset.empirical_links.len()
    );
    Ok(())
}
