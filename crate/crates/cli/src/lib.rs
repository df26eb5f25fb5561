//! Command implementations behind the `tmaze` binary.

use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};

use tmaze_core::analysis::ablation::ablation_battery;
use tmaze_core::analysis::decode::{label_shuffle_null_seeded, spatial_decoding_report};
use tmaze_core::analysis::stats::mean;
use tmaze_core::analysis::trajectory::trajectory_report;
use tmaze_core::analysis::transitions::transition_matrix;
use tmaze_core::evolution::checkpoint::{latest_checkpoint, load_checkpoint, save_checkpoint};
use tmaze_core::evolution::seeds::demo_seed;
use tmaze_core::evolution::{history_csv, Evolution};
use tmaze_core::io::genotype::{load_genotype_with_header, save_genotype_with_header};
use tmaze_core::io::report::{
    ablation_csv, bin_error_csv, edges_csv, spatial_summary_csv, trajectory_csv, transition_matrix_csv, write_report,
};
use tmaze_core::io::{check_same_config, load_trial_log, load_trial_summary, save_trial_log, write_atomic, ArtifactHeader};
use tmaze_core::maze::file::load_layout;
use tmaze_core::maze::run_trial;
use tmaze_core::maze::validate::validate_layout;
use tmaze_core::{Ablation, ExperimentConfig, RnnController, TrialLog};

pub const HISTORY_KIND: &str = "tmaze-history";

#[derive(Debug, Parser)]
#[command(name = "tmaze", version, about = "Evolve and analyse recurrent controllers in a triple T-maze")]
pub struct Cli {
    /// Worker threads for trial evaluation; never changes results.
    #[arg(long, global = true)]
    pub jobs: Option<usize>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args, Clone)]
pub struct Common {
    /// Experiment config (TOML). Defaults describe the full-scale triple T-maze run.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Override the config's master seed.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Run directory; defaults to the config's output_dir.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run neuroevolution, writing checkpoints, history and the best genotype.
    Evolve {
        #[command(flatten)]
        common: Common,
        /// Continue from the newest checkpoint in the run directory.
        #[arg(long)]
        resume: bool,
    },
    /// Record demo trials of a genotype.
    Demo {
        #[command(flatten)]
        common: Common,
        /// Defaults to <run>/best.genotype.
        #[arg(long)]
        genotype: Option<PathBuf>,
        #[arg(long)]
        trials: Option<usize>,
    },
    /// Analyse demo logs or a genotype and write CSV reports.
    Analyze {
        #[command(subcommand)]
        kind: AnalyzeKind,
    },
    /// Check a maze layout's structure.
    ValidateLayout {
        #[arg(long)]
        config: Option<PathBuf>,
        /// Layout file; overrides the config's maze.
        #[arg(long)]
        layout: Option<PathBuf>,
    },
}

#[derive(Debug, Args, Clone)]
pub struct LogInputs {
    #[command(flatten)]
    pub common: Common,
    /// Directory of demo logs for one agent; repeat for several agents.
    /// Defaults to <run>/logs.
    #[arg(long = "logs")]
    pub logs: Vec<PathBuf>,
    /// Accept inputs written under different configurations.
    #[arg(long)]
    pub force: bool,
}

#[derive(Debug, Subcommand)]
pub enum AnalyzeKind {
    /// Decode location from per-bin activity.
    Spatial(LogInputs),
    /// Decode the path taken from activity on shared segments.
    Trajectory(LogInputs),
    /// Per-step shuffle ablations of a genotype.
    Ablation {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        genotype: Option<PathBuf>,
        #[arg(long)]
        trials: Option<usize>,
        #[arg(long)]
        force: bool,
    },
    /// Path-to-path transition probabilities.
    Transitions(LogInputs),
}

pub struct Loaded {
    pub cfg: ExperimentConfig,
    pub hash: String,
    pub run_dir: PathBuf,
}

pub fn load_config(common: &Common) -> Result<Loaded> {
    let mut cfg = match &common.config {
        Some(p) => ExperimentConfig::load(p)?,
        None => ExperimentConfig::default(),
    };
    if let Some(s) = common.seed {
        cfg.master_seed = s;
    }
    let run_dir = common.out.clone().unwrap_or_else(|| cfg.output_dir.clone());
    let hash = cfg.hash()?;
    Ok(Loaded { cfg, hash, run_dir })
}

/// Agents are named by the seed of the run that evolved them, so artifacts
/// do not depend on where a run directory lives.
fn agent_name(cfg: &ExperimentConfig) -> String {
    format!("seed{}", cfg.master_seed)
}

pub fn run(cli: Cli) -> Result<()> {
    let mut pool = rayon::ThreadPoolBuilder::new();
    if let Some(j) = cli.jobs {
        if j == 0 {
            bail!("--jobs must be at least 1");
        }
        pool = pool.num_threads(j);
    }
    let pool = pool.build().context("starting worker pool")?;
    pool.install(|| dispatch(cli.command))
}

fn dispatch(cmd: Command) -> Result<()> {
    match cmd {
        Command::Evolve { common, resume } => evolve(&common, resume).map(|_| ()),
        Command::Demo {
            common,
            genotype,
            trials,
        } => demo(&common, genotype.as_deref(), trials).map(|_| ()),
        Command::Analyze { kind } => match kind {
            AnalyzeKind::Spatial(i) => analyze_spatial(&i).map(|_| ()),
            AnalyzeKind::Trajectory(i) => analyze_trajectory(&i).map(|_| ()),
            AnalyzeKind::Ablation {
                common,
                genotype,
                trials,
                force,
            } => analyze_ablation(&common, genotype.as_deref(), trials, force).map(|_| ()),
            AnalyzeKind::Transitions(i) => analyze_transitions(&i).map(|_| ()),
        },
        Command::ValidateLayout { config, layout } => {
            let ok = validate(config.as_deref(), layout.as_deref())?;
            if !ok {
                bail!("layout failed validation");
            }
            Ok(())
        }
    }
}

pub fn evolve(common: &Common, resume: bool) -> Result<PathBuf> {
    let Loaded { cfg, hash, run_dir } = load_config(common)?;
    let env = cfg.environment()?;
    let ckpt_dir = run_dir.join("checkpoints");
    for sub in ["checkpoints", "logs", "reports"] {
        std::fs::create_dir_all(run_dir.join(sub)).with_context(|| format!("creating {}", run_dir.display()))?;
    }
    let existing = latest_checkpoint(&ckpt_dir)?;
    let ecfg = cfg.evolution_config();
    let mut evo = match (resume, existing) {
        (true, Some(p)) => {
            eprintln!("resuming from {}", p.display());
            load_checkpoint(&p, ecfg, cfg.master_seed, &env, &hash)?
        }
        (false, Some(p)) => bail!(
            "{} already holds checkpoint {}; pass --resume or choose another --out",
            run_dir.display(),
            p.display()
        ),
        (_, None) => Evolution::new(ecfg, cfg.master_seed, &env)?,
    };
    // a copy the later commands can point at with --config
    let mut saved = cfg.clone();
    saved.output_dir = run_dir.clone();
    if let Some(p) = cfg.layout_path() {
        saved.maze.layout = std::fs::canonicalize(&p)?.to_string_lossy().into_owned();
    }
    write_atomic(&run_dir.join("config.toml"), saved.to_toml().as_bytes())?;

    let header = ArtifactHeader::new(&hash, &agent_name(&cfg)).with_seed(cfg.master_seed);
    while !evo.finished() {
        let r = evo.step()?.clone();
        eprintln!(
            "generation {:>4}  best {:.3}  mean {:.3}  steps {:.0}",
            r.generation, r.best_so_far_fitness, r.mean_fitness, r.best_elapsed_steps
        );
        save_checkpoint(&evo, &hash, &ckpt_dir)?;
        let mut hist = header.line(HISTORY_KIND);
        hist.push_str(&history_csv(evo.history()));
        write_atomic(&run_dir.join("history.csv"), hist.as_bytes())?;
    }
    let best = evo.best().context("evolution produced no genotype")?;
    save_genotype_with_header(&best.genotype, &run_dir.join("best.genotype"), &header)?;
    Ok(run_dir)
}

fn genotype_or_best(run_dir: &Path, g: Option<&Path>) -> PathBuf {
    g.map(Path::to_path_buf).unwrap_or_else(|| run_dir.join("best.genotype"))
}

pub fn log_path(dir: &Path, k: usize) -> PathBuf {
    dir.join(format!("trial_{:02}.csv", k + 1))
}

pub fn demo(common: &Common, genotype: Option<&Path>, trials: Option<usize>) -> Result<Vec<PathBuf>> {
    let Loaded { cfg, hash, run_dir } = load_config(common)?;
    let env = cfg.environment()?;
    let gpath = genotype_or_best(&run_dir, genotype);
    let (_, g) = load_genotype_with_header(&gpath)?;
    let n = trials.unwrap_or(cfg.analysis.demo_trials);
    let logs_dir = run_dir.join("logs");
    let agent = agent_name(&cfg);

    use rayon::prelude::*;
    let logs: Vec<TrialLog> = (0..n)
        .into_par_iter()
        .map(|k| {
            let mut ctrl = RnnController::from_genotype(&g, cfg.rnn.leak)?;
            run_trial(&mut ctrl, &env, demo_seed(cfg.master_seed, k), Ablation::None)
        })
        .collect::<tmaze_core::Result<_>>()?;
    let mut written = Vec::new();
    for (k, log) in logs.iter().enumerate() {
        let p = log_path(&logs_dir, k);
        let h = ArtifactHeader::new(&hash, &agent).with_seed(demo_seed(cfg.master_seed, k));
        save_trial_log(&p, log, &h)?;
        eprintln!("trial {:>2}: fitness {:.2}, {} steps", k + 1, log.summary.fitness, log.summary.elapsed_steps);
        written.push(p);
    }
    Ok(written)
}

/// Demo log files in `dir`, in trial order.
pub fn list_logs(dir: &Path) -> Result<Vec<PathBuf>> {
    if !dir.is_dir() {
        return Err(tmaze_core::Error::MissingInput(dir.to_path_buf()).into());
    }
    let mut out: Vec<PathBuf> = std::fs::read_dir(dir)?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| {
            let name = p.file_name().and_then(|n| n.to_str()).unwrap_or("");
            name.starts_with("trial_") && name.ends_with(".csv")
        })
        .collect();
    out.sort();
    if out.is_empty() {
        bail!("no trial_*.csv logs in {}", dir.display());
    }
    Ok(out)
}

fn log_dirs(i: &LogInputs, run_dir: &Path) -> Vec<PathBuf> {
    if i.logs.is_empty() {
        vec![run_dir.join("logs")]
    } else {
        i.logs.clone()
    }
}

fn load_agents(i: &LogInputs, run_dir: &Path) -> Result<Vec<Vec<TrialLog>>> {
    let mut headers = Vec::new();
    let mut agents = Vec::new();
    for dir in log_dirs(i, run_dir) {
        let mut logs = Vec::new();
        for p in list_logs(&dir)? {
            let (h, log) = load_trial_log(&p)?;
            headers.push(h);
            logs.push(log);
        }
        agents.push(logs);
    }
    check_same_config(&headers, i.force)?;
    Ok(agents)
}

fn reports_dir(run_dir: &Path) -> PathBuf {
    run_dir.join("reports")
}

pub fn analyze_spatial(i: &LogInputs) -> Result<Vec<PathBuf>> {
    let Loaded { cfg, hash, run_dir } = load_config(&i.common)?;
    let layout = cfg.layout()?;
    let grid = cfg.grid(&layout);
    let agents = load_agents(i, &run_dir)?;
    let report = spatial_decoding_report(&agents, &grid, cfg.analysis.build_trials)?;
    let null = label_shuffle_null_seeded(&report.predictions, cfg.analysis.shuffles, cfg.master_seed);
    let h = ArtifactHeader::new(&hash, &agent_name(&cfg));
    let dir = reports_dir(&run_dir);
    let a = dir.join("spatial.csv");
    let b = dir.join("bin_error.csv");
    let null_mean = (!null.is_empty()).then(|| mean(&null));
    write_report(&a, &spatial_summary_csv(&report, null_mean, &h))?;
    write_report(&b, &bin_error_csv(&report, &h))?;
    eprintln!(
        "exact {:.1}% of {} bins, mean error {:.2} bins",
        100.0 * report.fraction_exact,
        report.predictions.len(),
        report.mean_error
    );
    Ok(vec![a, b])
}

pub fn analyze_trajectory(i: &LogInputs) -> Result<Vec<PathBuf>> {
    let Loaded { cfg, hash, run_dir } = load_config(&i.common)?;
    let layout = cfg.layout()?;
    let grid = cfg.grid(&layout);
    let agents = load_agents(i, &run_dir)?;
    let rows = trajectory_report(&layout.segments, &agents, &grid, cfg.analysis.build_trials)?;
    let h = ArtifactHeader::new(&hash, &agent_name(&cfg));
    let p = reports_dir(&run_dir).join("trajectory.csv");
    write_report(&p, &trajectory_csv(&rows, &h))?;
    for r in &rows {
        eprintln!(
            "{:<7} {:<13} {:>3} tested  {:.1}% correct (chance {:.0}%)",
            r.segment,
            r.direction.to_string(),
            r.tested,
            100.0 * r.fraction_correct,
            100.0 * r.chance
        );
    }
    Ok(vec![p])
}

pub fn analyze_ablation(common: &Common, genotype: Option<&Path>, trials: Option<usize>, force: bool) -> Result<Vec<PathBuf>> {
    let Loaded { cfg, hash, run_dir } = load_config(common)?;
    let env = cfg.environment()?;
    let (gh, g) = load_genotype_with_header(&genotype_or_best(&run_dir, genotype))?;
    if let Some(gh) = gh {
        check_same_config([&gh, &ArtifactHeader::new(&hash, "")], force)
            .context("genotype was evolved under a different configuration")?;
    }
    let n = trials.unwrap_or(cfg.analysis.ablation_trials);
    let rows = ablation_battery(&g, &env, cfg.rnn.leak, cfg.master_seed, &Ablation::ALL, n)?;
    let h = ArtifactHeader::new(&hash, &agent_name(&cfg));
    let p = reports_dir(&run_dir).join("ablation.csv");
    write_report(&p, &ablation_csv(&rows, cfg.analysis.ablation_alpha, &h))?;
    for r in &rows {
        eprintln!(
            "{:<18} fitness {:.2} ± {:.2}  steps {:.0} ± {:.0}{}",
            r.ablation.to_string(),
            r.mean_fitness,
            r.ci_fitness,
            r.mean_elapsed,
            r.ci_elapsed,
            if r.p_fitness.is_some_and(|p| p < cfg.analysis.ablation_alpha) { "  *" } else { "" }
        );
    }
    Ok(vec![p])
}

pub fn analyze_transitions(i: &LogInputs) -> Result<Vec<PathBuf>> {
    let Loaded { cfg, hash, run_dir } = load_config(&i.common)?;
    let layout = cfg.layout()?;
    let mut headers = Vec::new();
    let mut summaries = Vec::new();
    for dir in log_dirs(i, &run_dir) {
        for p in list_logs(&dir)? {
            let (h, s) = load_trial_summary(&p)?;
            headers.push(h);
            summaries.push(s);
        }
    }
    check_same_config(&headers, i.force)?;
    let t = transition_matrix(&summaries, layout.reward_count());
    let h = ArtifactHeader::new(&hash, &agent_name(&cfg));
    let dir = reports_dir(&run_dir);
    let a = dir.join("transitions.csv");
    let b = dir.join("transition_edges.csv");
    write_report(&a, &transition_matrix_csv(&t, &h))?;
    write_report(&b, &edges_csv(&t, cfg.analysis.transition_threshold, &h))?;
    for e in t.edges(cfg.analysis.transition_threshold) {
        eprintln!("{} -> {}  {:.2}", e.from, e.to, e.probability);
    }
    Ok(vec![a, b])
}

/// Print a validation report; true when the layout passes.
pub fn validate(config: Option<&Path>, layout: Option<&Path>) -> Result<bool> {
    let cfg = match config {
        Some(p) => ExperimentConfig::load(p)?,
        None => ExperimentConfig::default(),
    };
    let m = match layout {
        Some(p) => load_layout(p)?,
        None => cfg.layout()?,
    };
    let grid = cfg.grid(&m);
    let rep = validate_layout(&m, cfg.robot.body_radius, &grid, cfg.analysis.expected_bins);
    println!("corridor bins   {}", rep.corridor_bins);
    println!("rewards         {}", rep.rewards);
    println!("T-intersections {}", rep.junctions);
    println!("segments        {}", rep.segments);
    println!("doors           {}", rep.doors);
    for p in &rep.problems {
        println!("problem: {p}");
    }
    println!("{}", if rep.is_ok() { "ok" } else { "FAILED" });
    Ok(rep.is_ok())
}
