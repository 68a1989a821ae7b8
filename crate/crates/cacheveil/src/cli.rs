//! Command-line front end.

use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Instant;

use cacheveil_core::baselines::{rda_cost, rda_decision, rda_for_target, rda_privacy, RdaConfig};
use cacheveil_core::dpc::{build_layout, layout_to_distribution, sample_placement, FillOrder};
use cacheveil_core::enumeration::{
    count_placements, enumerate, Family, Partition, PlacementSet, DEFAULT_CAP,
};
use cacheveil_core::metrics::{
    evaluate, privacy_bounds, spc_privacy_bounds, EvaluationReport, SpcPrivacyBounds,
};
use cacheveil_core::montecarlo::{uniform_draw, Mechanism, SimConfig, SimReport, Simulator};
use cacheveil_core::optimizer::{grid, min_feasible_chunks, Method, Prepared, Targets};
use cacheveil_core::simplex::LpStatus;
use cacheveil_core::{Policy, Scenario};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::json;

use crate::error::CliError;
use crate::formats::{self, PolicyDoc};
use crate::output::{csv_writer, num, opt_num, sibling, RunManifest};
use crate::{parallel, recipes};

#[derive(Debug, Parser)]
#[command(
    name = "cacheveil",
    version,
    about = "Privacy-preserving probabilistic cache placement"
)]
pub struct Cli {
    #[command(flatten)]
    pub global: GlobalArgs,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Args)]
pub struct GlobalArgs {
    /// Scenario JSON; defaults to the built-in five-file scenario.
    #[arg(long, global = true, value_name = "PATH")]
    pub scenario: Option<PathBuf>,
    /// Output file (a directory for `recipe`); stdout when omitted.
    #[arg(long, global = true, value_name = "PATH")]
    pub out: Option<PathBuf>,
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Maximum number of placements to enumerate.
    #[arg(long, global = true, default_value_t = DEFAULT_CAP)]
    pub cap: usize,
    #[arg(long, global = true)]
    pub quiet: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FamilyArg {
    Chunk,
    File,
    Subset,
}

impl From<FamilyArg> for Family {
    fn from(f: FamilyArg) -> Self {
        match f {
            FamilyArg::Chunk => Family::Chunk,
            FamilyArg::File => Family::File,
            FamilyArg::Subset => Family::Subset,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum MethodArg {
    Jpc,
    Dpc,
    Spc,
}

impl From<MethodArg> for Method {
    fn from(m: MethodArg) -> Self {
        match m {
            MethodArg::Jpc => Method::Jpc,
            MethodArg::Dpc => Method::Dpc,
            MethodArg::Spc => Method::Spc,
        }
    }
}

#[derive(Debug, Clone, Args, Default)]
pub struct PartitionArgs {
    /// Number of equal-as-possible contiguous subsets.
    #[arg(long, value_name = "L", conflicts_with = "partition")]
    pub subsets: Option<usize>,
    /// Explicit subset sizes, e.g. `4,4,4`.
    #[arg(long, value_name = "SIZES", value_delimiter = ',')]
    pub partition: Option<Vec<usize>>,
}

impl PartitionArgs {
    fn resolve(&self, s: &Scenario) -> Result<Option<Partition>, CliError> {
        Ok(match (self.subsets, &self.partition) {
            (Some(l), _) => Some(Partition::balanced(s.num_files(), l)?),
            (None, Some(sizes)) => Some(Partition::new(sizes, s.num_files())?),
            (None, None) => None,
        })
    }
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Count (and optionally list) the placements of a family.
    Enumerate {
        #[arg(long, value_enum)]
        family: FamilyArg,
        #[command(flatten)]
        partition: PartitionArgs,
        /// Write the placement list as CSV.
        #[arg(long)]
        list: bool,
    },
    /// Cost, privacy degree, hit ratios and decision table of a policy.
    Evaluate {
        #[arg(long, value_name = "PATH")]
        policy: PathBuf,
        /// Decision-table CSV; defaults next to --out.
        #[arg(long, value_name = "PATH")]
        decision: Option<PathBuf>,
    },
    /// Solve one program.
    Optimize {
        #[arg(long, value_enum)]
        method: MethodArg,
        #[arg(long)]
        zeta: f64,
        #[arg(long)]
        beta: Option<f64>,
        /// Placement family for jpc.
        #[arg(long, value_enum)]
        family: Option<FamilyArg>,
        #[command(flatten)]
        partition: PartitionArgs,
        /// Also write the optimal policy as a policy document.
        #[arg(long, value_name = "PATH")]
        policy_out: Option<PathBuf>,
    },
    /// Optimal cost over a privacy grid.
    Sweep {
        #[arg(long, value_enum)]
        method: MethodArg,
        /// `start:stop:step`, a comma list, or one value.
        #[arg(long, value_name = "GRID")]
        zeta: String,
        #[arg(long, value_enum)]
        family: Option<FamilyArg>,
        #[command(flatten)]
        partition: PartitionArgs,
        /// Record wall-clock solve times (otherwise 0, keeping output reproducible).
        #[arg(long)]
        timing: bool,
    },
    /// Smallest chunk count meeting each hit-ratio target.
    Cmin {
        #[arg(long, value_enum)]
        method: MethodArg,
        #[arg(long)]
        zeta: f64,
        #[arg(long, value_name = "GRID")]
        beta: String,
        #[arg(long, default_value_t = 10)]
        c_max: usize,
        #[arg(long, value_enum)]
        family: Option<FamilyArg>,
        #[command(flatten)]
        partition: PartitionArgs,
    },
    /// Interval-filling distribution of per-file caching probabilities.
    DpcSample {
        #[arg(long, value_name = "PATH")]
        alpha: PathBuf,
        /// `ascending`, `popularity`, or a one-based permutation like `1,4,2,3`.
        #[arg(long, default_value = "ascending")]
        order: String,
        /// Number of placements to draw.
        #[arg(long, default_value_t = 0)]
        samples: u64,
        #[arg(long, value_name = "PATH")]
        samples_out: Option<PathBuf>,
    },
    /// Random dummy approach over a privacy grid.
    Rda {
        #[arg(long, value_name = "GRID")]
        zeta: String,
    },
    /// Monte Carlo replay of a policy or of the random dummy approach.
    Simulate {
        #[arg(
            long,
            value_name = "PATH",
            conflicts_with = "rda_s",
            required_unless_present = "rda_s"
        )]
        policy: Option<PathBuf>,
        #[arg(long, value_name = "S")]
        rda_s: Option<f64>,
        #[arg(long, default_value_t = 100_000)]
        requests: u64,
        /// Draw each cache's placement once per run instead of per request.
        #[arg(long)]
        hold_placements: bool,
        #[arg(long, value_name = "PATH")]
        histogram: Option<PathBuf>,
    },
    /// Closed-form privacy extremes.
    Bounds {
        #[command(flatten)]
        partition: PartitionArgs,
    },
    /// Built-in figure recipes.
    Recipe {
        name: Option<String>,
        #[arg(long)]
        list: bool,
    },
}

/// Parses `argv` (including the program name), runs, and returns the exit code.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return e.exit_code();
        }
    };
    match execute(&cli) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

fn note(global: &GlobalArgs, msg: impl AsRef<str>) {
    if !global.quiet {
        eprintln!("{}", msg.as_ref());
    }
}

/// Pretty JSON on stdout; a closed pipe is an I/O error, not a panic.
fn print_json<T: Serialize>(value: &T) -> Result<(), CliError> {
    let text = serde_json::to_string_pretty(value).map_err(|e| CliError::Io(e.into()))?;
    writeln!(std::io::stdout().lock(), "{text}")?;
    Ok(())
}

fn load_scenario(global: &GlobalArgs) -> Result<Scenario, CliError> {
    match &global.scenario {
        Some(p) => formats::load_scenario(p),
        None => Ok(Scenario::baseline()),
    }
}

/// `a:b:c`, `a,b,c` or a single value.
pub fn parse_grid(text: &str) -> Result<Vec<f64>, CliError> {
    let bad = || CliError::Validation(format!("cannot parse grid `{text}`"));
    let parts: Vec<&str> = text.split(':').collect();
    match parts.len() {
        3 => {
            let v: Vec<f64> = parts
                .iter()
                .map(|p| p.trim().parse::<f64>().map_err(|_| bad()))
                .collect::<Result<_, _>>()?;
            Ok(grid(v[0], v[1], v[2])?)
        }
        1 => text
            .split(',')
            .map(|p| p.trim().parse::<f64>().map_err(|_| bad()))
            .collect(),
        _ => Err(bad()),
    }
}

fn placement_label(files: &[usize]) -> String {
    files
        .iter()
        .map(|f| (f + 1).to_string())
        .collect::<Vec<_>>()
        .join(" ")
}

fn execute(cli: &Cli) -> Result<(), CliError> {
    let g = &cli.global;
    match &cli.command {
        Command::Enumerate {
            family,
            partition,
            list,
        } => cmd_enumerate(g, (*family).into(), partition, *list),
        Command::Evaluate { policy, decision } => cmd_evaluate(g, policy, decision.as_deref()),
        Command::Optimize {
            method,
            zeta,
            beta,
            family,
            partition,
            policy_out,
        } => cmd_optimize(
            g,
            (*method).into(),
            Targets::new(*zeta, *beta)?,
            family.map(Into::into),
            partition,
            policy_out.as_deref(),
        ),
        Command::Sweep {
            method,
            zeta,
            family,
            partition,
            timing,
        } => cmd_sweep(
            g,
            (*method).into(),
            zeta,
            family.map(Into::into),
            partition,
            *timing,
        ),
        Command::Cmin {
            method,
            zeta,
            beta,
            c_max,
            family,
            partition,
        } => cmd_cmin(
            g,
            (*method).into(),
            *zeta,
            beta,
            *c_max,
            family.map(Into::into),
            partition,
        ),
        Command::DpcSample {
            alpha,
            order,
            samples,
            samples_out,
        } => cmd_dpc_sample(g, alpha, order, *samples, samples_out.as_deref()),
        Command::Rda { zeta } => cmd_rda(g, zeta),
        Command::Simulate {
            policy,
            rda_s,
            requests,
            hold_placements,
            histogram,
        } => cmd_simulate(
            g,
            policy.as_deref(),
            *rda_s,
            *requests,
            *hold_placements,
            histogram.as_deref(),
        ),
        Command::Bounds { partition } => cmd_bounds(g, partition),
        Command::Recipe { name, list } => cmd_recipe(g, name.as_deref(), *list),
    }
}

/// Echoes the global flags into the manifest parameters and writes it.
fn finish(g: &GlobalArgs, manifest: &RunManifest) -> Result<(), CliError> {
    let mut manifest = manifest.clone();
    if let serde_json::Value::Object(map) = &mut manifest.parameters {
        map.entry("seed").or_insert(json!(g.seed));
        map.entry("cap").or_insert(json!(g.cap));
        map.entry("scenario")
            .or_insert(json!(g.scenario.as_ref().map(|p| p.display().to_string())));
    }
    if let Some(path) = manifest.write(None)? {
        note(g, format!("manifest: {}", path.display()));
    }
    Ok(())
}

fn cmd_enumerate(
    g: &GlobalArgs,
    family: Family,
    part: &PartitionArgs,
    list: bool,
) -> Result<(), CliError> {
    let s = load_scenario(g)?;
    let partition = part.resolve(&s)?;
    if family == Family::Subset && partition.is_none() {
        return Err(CliError::Validation(
            "the subset family needs --subsets or --partition".into(),
        ));
    }
    let count = count_placements(&s, family, partition.as_ref())?;
    if count > g.cap as u128 {
        return Err(CliError::CapExceeded(format!(
            "the {family} family has {count} placements, above the enumeration cap of {}; use spc or raise --cap",
            g.cap
        )));
    }
    note(g, format!("{family} family: {count} placements"));
    let mut manifest = RunManifest::new(
        "enumerate",
        formats::scenario_digest(&s),
        json!({"family": family, "partition": partition.as_ref().map(|p| p.sizes().to_vec()), "count": count.to_string(), "cap": g.cap}),
    );
    if list {
        let set = enumerate(&s, family, partition.as_ref(), g.cap)?;
        let mut w = csv_writer(g.out.as_deref())?;
        let prefix = if family == Family::Subset {
            "z_hat_"
        } else {
            "z_"
        };
        let mut header = vec!["index".to_string()];
        header.extend((1..=set.width()).map(|i| format!("{prefix}{i}")));
        w.write_record(&header)?;
        for (idx, z) in set.iter().enumerate() {
            let mut row = vec![idx.to_string()];
            row.extend(z.iter().map(|x| x.to_string()));
            w.write_record(&row)?;
        }
        w.flush()?;
    } else {
        let mut w = csv_writer(g.out.as_deref())?;
        w.write_record(["family", "count"])?;
        w.write_record([family.to_string(), count.to_string()])?;
        w.flush()?;
    }
    if let Some(p) = &g.out {
        manifest.add(p);
    }
    finish(g, &manifest)
}

/// Enumerates the placement set a policy document refers to.
fn policy_set(
    s: &Scenario,
    doc: &PolicyDoc,
    cap: usize,
) -> Result<(PlacementSet, Policy), CliError> {
    let partition = doc.partition(s)?;
    let set = enumerate(s, doc.family, partition.as_ref(), cap)?;
    let policy = doc.to_policy(&set)?;
    Ok((set, policy))
}

fn write_decision(path: Option<&Path>, report: &EvaluationReport) -> Result<(), CliError> {
    let mut w = csv_writer(path)?;
    w.write_record(["y", "k_hat", "i_hat", "score"])?;
    for e in &report.decision.entries {
        w.write_record([
            e.y.to_string(),
            (e.cache + 1).to_string(),
            (e.file + 1).to_string(),
            num(e.score),
        ])?;
    }
    w.flush()?;
    Ok(())
}

fn cmd_evaluate(g: &GlobalArgs, policy: &Path, decision: Option<&Path>) -> Result<(), CliError> {
    let s = load_scenario(g)?;
    let doc = formats::load_policy(policy)?;
    let (set, pol) = policy_set(&s, &doc, g.cap)?;
    let report = evaluate(&s, &set, &pol)?;
    let mut manifest = RunManifest::new(
        "evaluate",
        formats::scenario_digest(&s),
        json!({"policy": policy.display().to_string(), "family": doc.family}),
    );
    match &g.out {
        Some(p) => {
            formats::write_json(p, &report)?;
            manifest.add(p);
        }
        None => print_json(&report)?,
    }
    let decision_path = decision
        .map(Path::to_path_buf)
        .or_else(|| g.out.as_deref().map(|p| sibling(p, "decision.csv")));
    if let Some(p) = &decision_path {
        write_decision(Some(p), &report)?;
        manifest.add(p);
    }
    note(g, format!("omega = {}, psi = {}", report.omega, report.psi));
    finish(g, &manifest)
}

#[derive(Serialize)]
struct OptimizeDoc {
    method: Method,
    status: LpStatus,
    zeta: f64,
    beta: Option<f64>,
    omega_star: Option<f64>,
    gamma: Vec<f64>,
    alpha: Option<Vec<Vec<f64>>>,
    n_vars: usize,
    n_rows: usize,
    iterations: usize,
    family: Family,
    partition: Option<Vec<usize>>,
    verification: Option<EvaluationReport>,
    policy: Option<PolicyDoc>,
}

fn cmd_optimize(
    g: &GlobalArgs,
    method: Method,
    targets: Targets,
    family: Option<Family>,
    part: &PartitionArgs,
    policy_out: Option<&Path>,
) -> Result<(), CliError> {
    let s = load_scenario(g)?;
    let partition = part.resolve(&s)?;
    let prepared = Prepared::new(&s, method, family, partition.as_ref(), g.cap)?;
    let outcome = prepared.solve(&targets)?;
    let set = prepared.placements();
    let policy_doc = outcome
        .policy
        .as_ref()
        .map(|p| PolicyDoc::from_policy(p, set));
    let doc = OptimizeDoc {
        method,
        status: outcome.status,
        zeta: targets.zeta(),
        beta: targets.beta(),
        omega_star: outcome.is_optimal().then_some(outcome.omega_star),
        gamma: outcome.gamma.clone(),
        alpha: outcome
            .alpha
            .as_ref()
            .map(|a| a.iter().map(|v| v.values().to_vec()).collect()),
        n_vars: outcome.num_vars,
        n_rows: outcome.num_rows,
        iterations: outcome.iterations,
        family: set.family(),
        partition: partition.as_ref().map(|p| p.sizes().to_vec()),
        verification: outcome.verification.clone(),
        policy: policy_doc.clone(),
    };
    let mut manifest = RunManifest::new(
        "optimize",
        formats::scenario_digest(&s),
        json!({"method": method, "zeta": targets.zeta(), "beta": targets.beta(), "family": set.family(),
               "partition": partition.as_ref().map(|p| p.sizes().to_vec()), "cap": g.cap}),
    );
    match &g.out {
        Some(p) => {
            formats::write_json(p, &doc)?;
            manifest.add(p);
        }
        None => print_json(&doc)?,
    }
    if let (Some(p), Some(pd)) = (policy_out, &policy_doc) {
        formats::write_json(p, pd)?;
        manifest.add(p);
    }
    finish(g, &manifest)?;
    if outcome.is_optimal() {
        note(g, format!("optimal: omega* = {}", outcome.omega_star));
        Ok(())
    } else {
        Err(CliError::Infeasible(format!(
            "{method} at zeta = {}: {}",
            targets.zeta(),
            outcome.status
        )))
    }
}

fn cmd_sweep(
    g: &GlobalArgs,
    method: Method,
    zeta: &str,
    family: Option<Family>,
    part: &PartitionArgs,
    timing: bool,
) -> Result<(), CliError> {
    let s = load_scenario(g)?;
    let partition = part.resolve(&s)?;
    let zetas = parse_grid(zeta)?;
    let prepared = Prepared::new(&s, method, family, partition.as_ref(), g.cap)?;
    let points = parallel::sweep(&prepared, &zetas)?;
    let mut w = csv_writer(g.out.as_deref())?;
    w.write_record([
        "method",
        "zeta",
        "status",
        "omega_star",
        "psi_verified",
        "hit_ratio",
        "n_vars",
        "n_rows",
        "solve_iterations",
        "solve_ms",
    ])?;
    for (p, ms) in &points {
        w.write_record([
            p.method.to_string(),
            num(p.zeta),
            p.status.to_string(),
            num(p.omega_star),
            num(p.psi_verified),
            num(p.hit_ratio),
            p.num_vars.to_string(),
            p.num_rows.to_string(),
            p.iterations.to_string(),
            if timing {
                format!("{ms:.3}")
            } else {
                "0".into()
            },
        ])?;
    }
    w.flush()?;
    let feasible = points
        .iter()
        .filter(|(p, _)| p.status == LpStatus::Optimal)
        .count();
    note(
        g,
        format!("{feasible} of {} grid points feasible", points.len()),
    );
    let mut manifest = RunManifest::new(
        "sweep",
        formats::scenario_digest(&s),
        json!({"method": method, "zeta": zeta, "family": prepared.placements().family(),
               "partition": partition.as_ref().map(|p| p.sizes().to_vec()), "timing": timing}),
    );
    if let Some(p) = &g.out {
        manifest.add(p);
    }
    finish(g, &manifest)
}

#[allow(clippy::too_many_arguments)]
fn cmd_cmin(
    g: &GlobalArgs,
    method: Method,
    zeta: f64,
    beta: &str,
    c_max: usize,
    family: Option<Family>,
    part: &PartitionArgs,
) -> Result<(), CliError> {
    let s = load_scenario(g)?;
    let partition = part.resolve(&s)?;
    let betas = parse_grid(beta)?;
    let mut w = csv_writer(g.out.as_deref())?;
    w.write_record(["beta", "c_min", "omega_star"])?;
    for &b in &betas {
        let search = min_feasible_chunks(
            &s,
            method,
            &Targets::new(zeta, Some(b))?,
            partition.as_ref(),
            family,
            c_max,
            g.cap,
        )?;
        let omega = search.outcome.as_ref().map(|o| o.omega_star);
        w.write_record([
            num(b),
            search.c_min.map(|c| c.to_string()).unwrap_or_default(),
            opt_num(omega),
        ])?;
        if search.c_min.is_none() {
            note(
                g,
                format!(
                    "beta = {b}: no feasible C up to {}",
                    search.tried.last().map(|t| t.0).unwrap_or(0)
                ),
            );
        }
    }
    w.flush()?;
    let mut manifest = RunManifest::new(
        "cmin",
        formats::scenario_digest(&s),
        json!({"method": method, "zeta": zeta, "beta": beta, "c_max": c_max, "cap": g.cap}),
    );
    if let Some(p) = &g.out {
        manifest.add(p);
    }
    finish(g, &manifest)
}

fn parse_order(text: &str, n: usize, popularity: Option<&[f64]>) -> Result<FillOrder, CliError> {
    match text {
        "ascending" => Ok(FillOrder::ascending(n)),
        "popularity" => match popularity {
            Some(p) if p.len() == n => Ok(FillOrder::by_popularity(p)),
            _ => Ok(FillOrder::ascending(n)),
        },
        list => {
            let perm: Vec<usize> = list
                .split(',')
                .map(|v| match v.trim().parse::<usize>() {
                    Ok(i) if i >= 1 => Ok(i - 1),
                    _ => Err(CliError::Validation(format!("bad fill order `{text}`"))),
                })
                .collect::<Result<_, _>>()?;
            Ok(FillOrder::explicit(&perm)?)
        }
    }
}

fn cmd_dpc_sample(
    g: &GlobalArgs,
    alpha: &Path,
    order: &str,
    samples: u64,
    samples_out: Option<&Path>,
) -> Result<(), CliError> {
    let doc = formats::load_alpha(alpha)?;
    let a = doc.to_alpha()?;
    // Files in an alpha document are already in popularity order when it
    // comes from a scenario; `popularity` falls back to that order.
    let popularity = match &g.scenario {
        Some(p) => Some(formats::load_scenario(p)?.popularity().to_vec()),
        None => None,
    };
    let fill = parse_order(order, a.len(), popularity.as_deref())?;
    let layout = build_layout(&a, &fill)?;
    let mut w = csv_writer(g.out.as_deref())?;
    w.write_record(["placement", "probability"])?;
    for (files, p) in layout_to_distribution(&layout) {
        w.write_record([placement_label(&files), num(p)])?;
    }
    w.flush()?;
    let mut manifest = RunManifest::new(
        "dpc-sample",
        String::new(),
        json!({"alpha": alpha.display().to_string(), "order": order, "samples": samples, "seed": g.seed}),
    );
    if let Some(p) = &g.out {
        manifest.add(p);
    }
    if samples > 0 {
        let path = samples_out
            .map(Path::to_path_buf)
            .or_else(|| g.out.as_deref().map(|p| sibling(p, "samples.csv")));
        let mut w = csv_writer(path.as_deref())?;
        w.write_record(["sample", "u", "placement"])?;
        for j in 0..samples {
            let u = uniform_draw(g.seed, j);
            w.write_record([
                j.to_string(),
                num(u),
                placement_label(sample_placement(&layout, u)),
            ])?;
        }
        w.flush()?;
        if let Some(p) = path {
            manifest.add(&p);
        }
    }
    finish(g, &manifest)
}

fn cmd_rda(g: &GlobalArgs, zeta: &str) -> Result<(), CliError> {
    let s = load_scenario(g)?;
    let zetas = parse_grid(zeta)?;
    let mut w = csv_writer(g.out.as_deref())?;
    w.write_record(["zeta", "s", "omega", "psi"])?;
    let mut skipped = 0;
    for &z in &zetas {
        match rda_for_target(&s, z) {
            Ok(cfg) => w.write_record([
                num(z),
                num(cfg.s()),
                num(rda_cost(&s, cfg)),
                num(rda_privacy(&s, cfg)),
            ])?,
            Err(cacheveil_core::Error::UnreachableTarget { .. }) => skipped += 1,
            Err(e) => return Err(e.into()),
        }
    }
    w.flush()?;
    if skipped > 0 {
        let (lo, hi) = privacy_bounds(&s);
        note(
            g,
            format!("{skipped} grid points outside [{lo}, {hi}] skipped"),
        );
    }
    let mut manifest = RunManifest::new("rda", formats::scenario_digest(&s), json!({"zeta": zeta}));
    if let Some(p) = &g.out {
        manifest.add(p);
    }
    finish(g, &manifest)
}

#[derive(Serialize)]
struct SimulateDoc<'a> {
    mechanism: String,
    omega_analytic: f64,
    psi_analytic: f64,
    #[serde(flatten)]
    report: &'a SimReport,
}

fn cmd_simulate(
    g: &GlobalArgs,
    policy: Option<&Path>,
    rda_s: Option<f64>,
    requests: u64,
    hold: bool,
    histogram: Option<&Path>,
) -> Result<(), CliError> {
    let s = load_scenario(g)?;
    let mut cfg = SimConfig::new(requests, g.seed)?;
    cfg.resample_placements_each_request = !hold;
    let loaded;
    let (mechanism, decision, omega_a, psi_a, label) = match (policy, rda_s) {
        (Some(path), _) => {
            let doc = formats::load_policy(path)?;
            loaded = policy_set(&s, &doc, g.cap)?;
            let report = evaluate(&s, &loaded.0, &loaded.1)?;
            (
                Mechanism::Placement {
                    set: &loaded.0,
                    policy: &loaded.1,
                },
                report.decision,
                report.omega,
                report.psi,
                format!("policy:{}", path.display()),
            )
        }
        (None, Some(v)) => {
            let rda = RdaConfig::new(v)?;
            let (psi, decision) = rda_decision(&s, rda);
            (
                Mechanism::Rda(rda),
                decision,
                rda_cost(&s, rda),
                psi,
                format!("rda:s={v}"),
            )
        }
        (None, None) => return Err(CliError::Validation("give --policy or --rda-s".into())),
    };
    let sim = Simulator::new(&s, mechanism, &decision, &cfg)?;
    let start = Instant::now();
    let counts = parallel::simulate(&sim, &cfg, s.chunks_per_file())?;
    let report = SimReport::from_counts(&counts, s.chunks_per_file(), &cfg);
    note(
        g,
        format!(
            "omega = {:.5} ± {:.5} (analytic {omega_a:.5}), psi = {:.5} ± {:.5} (analytic {psi_a:.5}) in {:.2?}",
            report.omega,
            report.omega_se,
            report.psi,
            report.psi_se,
            start.elapsed()
        ),
    );
    let doc = SimulateDoc {
        mechanism: label,
        omega_analytic: omega_a,
        psi_analytic: psi_a,
        report: &report,
    };
    let mut manifest = RunManifest::new(
        "simulate",
        formats::scenario_digest(&s),
        json!({"policy": policy.map(|p| p.display().to_string()), "rda_s": rda_s, "requests": requests,
               "seed": g.seed, "hold_placements": hold}),
    );
    match &g.out {
        Some(p) => {
            formats::write_json(p, &doc)?;
            manifest.add(p);
        }
        None => print_json(&doc)?,
    }
    let hist_path = histogram
        .map(Path::to_path_buf)
        .or_else(|| g.out.as_deref().map(|p| sibling(p, "histogram.csv")));
    if let Some(p) = &hist_path {
        let analytic = sim.analytic_histogram()?;
        let mut w = csv_writer(Some(p))?;
        w.write_record(["y", "count", "analytic_prob"])?;
        for (y, (&c, &a)) in report.histogram.iter().zip(&analytic).enumerate() {
            w.write_record([y.to_string(), c.to_string(), num(a)])?;
        }
        w.flush()?;
        manifest.add(p);
    }
    finish(g, &manifest)
}

#[derive(Serialize)]
struct BoundsDoc {
    psi_min: f64,
    psi_max: f64,
    spc: Option<SpcPrivacyBounds>,
    partition: Option<Vec<usize>>,
}

fn cmd_bounds(g: &GlobalArgs, part: &PartitionArgs) -> Result<(), CliError> {
    let s = load_scenario(g)?;
    let partition = part.resolve(&s)?;
    let (psi_min, psi_max) = privacy_bounds(&s);
    let spc = partition
        .as_ref()
        .map(|p| spc_privacy_bounds(&s, p))
        .transpose()?;
    let doc = BoundsDoc {
        psi_min,
        psi_max,
        spc,
        partition: partition.as_ref().map(|p| p.sizes().to_vec()),
    };
    let mut manifest = RunManifest::new(
        "bounds",
        formats::scenario_digest(&s),
        json!({"partition": doc.partition}),
    );
    match &g.out {
        Some(p) => {
            formats::write_json(p, &doc)?;
            manifest.add(p);
        }
        None => print_json(&doc)?,
    }
    finish(g, &manifest)
}

fn cmd_recipe(g: &GlobalArgs, name: Option<&str>, list: bool) -> Result<(), CliError> {
    if list || name.is_none() {
        let mut out = std::io::stdout().lock();
        for r in recipes::all() {
            writeln!(out, "{:<6} {}", r.name, r.description)?;
        }
        return Ok(());
    }
    let name = name.unwrap_or_default();
    let recipe = recipes::find(name)
        .ok_or_else(|| CliError::Validation(format!("unknown recipe `{name}`")))?;
    let dir = g
        .out
        .clone()
        .unwrap_or_else(|| PathBuf::from("out").join(recipe.name));
    std::fs::create_dir_all(&dir)?;
    let ctx = recipes::Context {
        dir: dir.clone(),
        seed: g.seed,
        cap: g.cap,
    };
    let start = Instant::now();
    let run = (recipe.run)(&ctx)?;
    let mut manifest = RunManifest::new(
        "recipe",
        run.scenario_digest.clone(),
        json!({"recipe": recipe.name, "seed": g.seed, "cap": g.cap, "notes": run.notes}),
    );
    for p in &run.outputs {
        manifest.add(p);
    }
    let path = manifest.write(Some(&dir))?;
    note(
        g,
        format!(
            "{}: {} files in {} ({:.1?}){}",
            recipe.name,
            run.outputs.len(),
            dir.display(),
            start.elapsed(),
            path.map(|p| format!(", manifest {}", p.display()))
                .unwrap_or_default()
        ),
    );
    Ok(())
}
