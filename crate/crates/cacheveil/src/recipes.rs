//! Built-in figure recipes. Each writes CSV files into a directory; the
//! output depends only on the recipe, the seed and the cap.

use std::path::{Path, PathBuf};

use cacheveil_core::baselines::{rda_cost, rda_for_target, rda_privacy};
use cacheveil_core::enumeration::{Family, Partition};
use cacheveil_core::metrics::{evaluate, privacy_bounds, spc_privacy_bounds};
use cacheveil_core::montecarlo::{Mechanism, SimConfig, SimReport, Simulator};
use cacheveil_core::optimizer::{min_feasible_chunks, Method, Prepared, SweepPoint, Targets};
use cacheveil_core::simplex::LpStatus;
use cacheveil_core::Scenario;

use crate::error::CliError;
use crate::formats::{scenario_digest, write_json, ScenarioDoc};
use crate::output::{csv_writer, num, opt_num};
use crate::parallel;

/// Points in every privacy sweep.
pub const GRID_POINTS: usize = 10;
/// Requests per simulated policy in `fig3`.
pub const FIG3_REQUESTS: u64 = 100_000;
/// Placement cap for the chunk-count searches of `fig7`.
pub const FIG7_CAP: usize = 20_000;

pub struct Context {
    pub dir: PathBuf,
    pub seed: u64,
    pub cap: usize,
}

#[derive(Debug, Default)]
pub struct RecipeRun {
    pub scenario_digest: String,
    pub outputs: Vec<PathBuf>,
    pub notes: Vec<String>,
}

impl RecipeRun {
    fn scenario(&mut self, ctx: &Context, name: &str, s: &Scenario) -> Result<(), CliError> {
        let digest = scenario_digest(s);
        if !self.scenario_digest.is_empty() {
            self.scenario_digest.push(',');
        }
        self.scenario_digest.push_str(&digest);
        let path = ctx.dir.join(format!("{name}.scenario.json"));
        write_json(&path, &ScenarioDoc::from_scenario(s))?;
        self.outputs.push(path);
        Ok(())
    }
}

pub struct Recipe {
    pub name: &'static str,
    pub description: &'static str,
    pub run: fn(&Context) -> Result<RecipeRun, CliError>,
}

pub fn all() -> &'static [Recipe] {
    &[
        Recipe {
            name: "fig3",
            description: "cost vs privacy: JPC at C=1 and C=10, DPC, plus simulated JPC policies",
            run: fig3,
        },
        Recipe {
            name: "fig4",
            description: "JPC, DPC and the random dummy approach at C=1 with relative gap",
            run: fig4,
        },
        Recipe {
            name: "fig5",
            description: "reduced-scale minimum chunk count vs hit-ratio target (N=6, M=2)",
            run: fig5,
        },
        Recipe {
            name: "fig6",
            description: "SPC with L in {3,6,12} vs JPC at N=12, M=3, Zipf 0.65, C=1",
            run: fig6,
        },
        Recipe {
            name: "fig7",
            description: "SPC minimum chunk count vs hit-ratio target for L in {3,6,12}",
            run: fig7,
        },
        Recipe {
            name: "fig8",
            description: "placement count, privacy range and average cost vs number of subsets",
            run: fig8,
        },
    ]
}

pub fn find(name: &str) -> Option<&'static Recipe> {
    all().iter().find(|r| r.name == name)
}

/// `n` evenly spaced points from `lo` to `hi` inclusive.
pub fn linspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    match n {
        0 => Vec::new(),
        1 => vec![lo],
        _ => (0..n)
            .map(|j| {
                if j == 0 {
                    lo
                } else if j + 1 == n {
                    hi
                } else {
                    // Interior points are rounded so decimal grids print cleanly.
                    let x = lo + (hi - lo) * j as f64 / (n - 1) as f64;
                    (x * 1e12).round() / 1e12
                }
            })
            .collect(),
    }
}

/// Privacy grid over `[lo, hi]`, collapsing to one point when the range is empty.
fn privacy_grid(lo: f64, hi: f64) -> Vec<f64> {
    if hi - lo < 1e-12 {
        vec![lo]
    } else {
        linspace(lo, hi, GRID_POINTS)
    }
}

fn sweep(
    s: &Scenario,
    method: Method,
    family: Option<Family>,
    part: Option<&Partition>,
    grid: &[f64],
    cap: usize,
) -> Result<Vec<SweepPoint>, CliError> {
    let prepared = Prepared::new(s, method, family, part, cap)?;
    Ok(parallel::sweep(&prepared, grid)?
        .into_iter()
        .map(|(p, _)| p)
        .collect())
}

const SWEEP_HEADER: [&str; 8] = [
    "series",
    "zeta",
    "status",
    "omega_star",
    "psi_verified",
    "hit_ratio",
    "n_vars",
    "n_rows",
];

fn sweep_row(series: &str, p: &SweepPoint) -> Vec<String> {
    vec![
        series.to_string(),
        num(p.zeta),
        p.status.to_string(),
        num(p.omega_star),
        num(p.psi_verified),
        num(p.hit_ratio),
        p.num_vars.to_string(),
        p.num_rows.to_string(),
    ]
}

fn write_sweeps(path: &Path, series: &[(String, Vec<SweepPoint>)]) -> Result<(), CliError> {
    let mut w = csv_writer(Some(path))?;
    w.write_record(SWEEP_HEADER)?;
    for (name, points) in series {
        for p in points {
            w.write_record(sweep_row(name, p))?;
        }
    }
    w.flush()?;
    Ok(())
}

fn fig3(ctx: &Context) -> Result<RecipeRun, CliError> {
    let mut run = RecipeRun::default();
    let s10 = Scenario::baseline();
    let s1 = s10.with_chunks(1)?;
    run.scenario(ctx, "fig3", &s10)?;
    let (lo, hi) = privacy_bounds(&s10);
    let grid = privacy_grid(lo, hi);

    let jpc1 = Prepared::new(&s1, Method::Jpc, Some(Family::Chunk), None, ctx.cap)?;
    let outcomes1: Vec<_> = grid
        .iter()
        .map(|&z| jpc1.solve(&Targets::privacy(z)?))
        .collect::<Result<_, _>>()?;
    let series = vec![
        (
            "jpc_c1".to_string(),
            outcomes1.iter().map(SweepPoint::from_outcome).collect(),
        ),
        (
            "jpc_c10".to_string(),
            sweep(&s10, Method::Jpc, Some(Family::Chunk), None, &grid, ctx.cap)?,
        ),
        (
            "dpc".to_string(),
            sweep(&s10, Method::Dpc, None, None, &grid, ctx.cap)?,
        ),
    ];
    let path = ctx.dir.join("fig3.csv");
    write_sweeps(&path, &series)?;
    run.outputs.push(path);

    let path = ctx.dir.join("fig3_simulation.csv");
    let mut w = csv_writer(Some(&path))?;
    w.write_record([
        "zeta",
        "requests",
        "seed",
        "omega_analytic",
        "omega_sim",
        "omega_se",
        "psi_analytic",
        "psi_sim",
        "psi_se",
    ])?;
    let cfg = SimConfig::new(FIG3_REQUESTS, ctx.seed)?;
    for (z, outcome) in grid.iter().zip(&outcomes1) {
        let Some(policy) = &outcome.policy else {
            continue;
        };
        let set = jpc1.placements();
        let report = evaluate(&s1, set, policy)?;
        let sim = Simulator::new(
            &s1,
            Mechanism::Placement { set, policy },
            &report.decision,
            &cfg,
        )?;
        let counts = parallel::simulate(&sim, &cfg, s1.chunks_per_file())?;
        let r = SimReport::from_counts(&counts, s1.chunks_per_file(), &cfg);
        w.write_record([
            num(*z),
            FIG3_REQUESTS.to_string(),
            ctx.seed.to_string(),
            num(report.omega),
            num(r.omega),
            num(r.omega_se),
            num(report.psi),
            num(r.psi),
            num(r.psi_se),
        ])?;
    }
    w.flush()?;
    run.outputs.push(path);
    Ok(run)
}

fn fig4(ctx: &Context) -> Result<RecipeRun, CliError> {
    let mut run = RecipeRun::default();
    let s = Scenario::baseline().with_chunks(1)?;
    run.scenario(ctx, "fig4", &s)?;
    let (lo, hi) = privacy_bounds(&s);
    let grid = privacy_grid(lo, hi);
    let jpc = sweep(&s, Method::Jpc, Some(Family::Chunk), None, &grid, ctx.cap)?;
    let dpc = sweep(&s, Method::Dpc, None, None, &grid, ctx.cap)?;
    let path = ctx.dir.join("fig4.csv");
    let mut w = csv_writer(Some(&path))?;
    w.write_record([
        "zeta",
        "omega_jpc",
        "omega_dpc",
        "omega_rda",
        "s_rda",
        "psi_rda",
        "relative_gap",
    ])?;
    let mut peak: f64 = 0.0;
    for ((&z, j), d) in grid.iter().zip(&jpc).zip(&dpc) {
        let cfg = rda_for_target(&s, z)?;
        let omega_rda = rda_cost(&s, cfg);
        let gap = (omega_rda - j.omega_star) / omega_rda;
        peak = peak.max(gap);
        w.write_record([
            num(z),
            num(j.omega_star),
            num(d.omega_star),
            num(omega_rda),
            num(cfg.s()),
            num(rda_privacy(&s, cfg)),
            num(gap),
        ])?;
    }
    w.flush()?;
    run.outputs.push(path);
    run.notes.push(format!(
        "peak relative gap (omega_rda - omega_jpc) / omega_rda = {peak:.4}"
    ));
    Ok(run)
}

fn fig5(ctx: &Context) -> Result<RecipeRun, CliError> {
    let mut run = RecipeRun::default();
    run.notes
        .push("reduced-scale: N=6, M=2 instead of N=12, M=3".into());
    let betas = linspace(0.1, 1.0, 10);
    let path = ctx.dir.join("fig5_reduced_scale.csv");
    let mut w = csv_writer(Some(&path))?;
    w.write_record(["scale", "zipf_alpha", "zeta", "beta", "c_min", "omega_star"])?;
    for alpha in [1.0, 1.5] {
        let s = Scenario::with_zipf(6, 2, 2, 1, alpha, &[0.7, 0.3])?;
        run.scenario(ctx, &format!("fig5_zipf{alpha}"), &s)?;
        let (lo, hi) = privacy_bounds(&s);
        let zeta = 0.5 * (lo + hi);
        for &b in &betas {
            let search = min_feasible_chunks(
                &s,
                Method::Jpc,
                &Targets::new(zeta, Some(b))?,
                None,
                Some(Family::Chunk),
                6,
                ctx.cap,
            )?;
            w.write_record([
                "reduced-scale".to_string(),
                num(alpha),
                num(zeta),
                num(b),
                search.c_min.map(|c| c.to_string()).unwrap_or_default(),
                opt_num(search.outcome.as_ref().map(|o| o.omega_star)),
            ])?;
        }
    }
    w.flush()?;
    run.outputs.push(path);
    Ok(run)
}

fn fig6_scenario() -> Result<Scenario, CliError> {
    Ok(Scenario::with_zipf(12, 2, 3, 1, 0.65, &[0.7, 0.3])?)
}

fn fig6(ctx: &Context) -> Result<RecipeRun, CliError> {
    let mut run = RecipeRun::default();
    let s = fig6_scenario()?;
    run.scenario(ctx, "fig6", &s)?;
    let mut summary = Vec::new();
    let mut common_lo = f64::NEG_INFINITY;
    let mut common_hi = f64::INFINITY;
    let mut parts = Vec::new();
    for l in [3, 6, 12] {
        let part = Partition::balanced(12, l)?;
        let b = spc_privacy_bounds(&s, &part)?;
        common_lo = common_lo.max(b.psi_min);
        common_hi = common_hi.min(b.psi_max);
        parts.push((l, part, b));
    }
    let grid = privacy_grid(common_lo, common_hi);
    let mut series = Vec::new();
    for (l, part, b) in &parts {
        let prepared = Prepared::new(&s, Method::Spc, None, Some(part), ctx.cap)?;
        summary.push((
            format!("spc_l{l}"),
            prepared.placements().len(),
            b.psi_min,
            b.psi_max,
        ));
        let points = parallel::sweep(&prepared, &grid)?
            .into_iter()
            .map(|(p, _)| p)
            .collect();
        series.push((format!("spc_l{l}"), points));
    }
    let jpc = Prepared::new(&s, Method::Jpc, Some(Family::File), None, ctx.cap)?;
    let (lo, hi) = privacy_bounds(&s);
    summary.push(("jpc".to_string(), jpc.placements().len(), lo, hi));
    series.push((
        "jpc".to_string(),
        parallel::sweep(&jpc, &grid)?
            .into_iter()
            .map(|(p, _)| p)
            .collect(),
    ));

    let path = ctx.dir.join("fig6.csv");
    write_sweeps(&path, &series)?;
    run.outputs.push(path);
    let path = ctx.dir.join("fig6_summary.csv");
    let mut w = csv_writer(Some(&path))?;
    w.write_record(["series", "placements", "psi_min", "psi_max"])?;
    for (name, count, lo, hi) in summary {
        w.write_record([name, count.to_string(), num(lo), num(hi)])?;
    }
    w.flush()?;
    run.outputs.push(path);
    Ok(run)
}

fn fig7(ctx: &Context) -> Result<RecipeRun, CliError> {
    let mut run = RecipeRun::default();
    let s = Scenario::with_zipf(12, 2, 3, 1, 1.0, &[0.5, 0.5])?;
    run.scenario(ctx, "fig7", &s)?;
    let zeta = 0.81;
    let cap = ctx.cap.min(FIG7_CAP);
    let betas = linspace(0.2, 1.0, 5);
    let path = ctx.dir.join("fig7.csv");
    let mut w = csv_writer(Some(&path))?;
    w.write_record([
        "series",
        "zeta",
        "beta",
        "c_min",
        "omega_star",
        "largest_c_tried",
    ])?;
    for l in [3, 6, 12] {
        let part = Partition::balanced(12, l)?;
        for &b in &betas {
            let search = min_feasible_chunks(
                &s,
                Method::Spc,
                &Targets::new(zeta, Some(b))?,
                Some(&part),
                None,
                5,
                cap,
            )?;
            let largest = search
                .tried
                .iter()
                .filter(|(_, st)| st.is_some())
                .map(|(c, _)| *c)
                .max()
                .unwrap_or(0);
            w.write_record([
                format!("spc_l{l}"),
                num(zeta),
                num(b),
                search.c_min.map(|c| c.to_string()).unwrap_or_default(),
                opt_num(search.outcome.as_ref().map(|o| o.omega_star)),
                largest.to_string(),
            ])?;
        }
    }
    w.flush()?;
    run.outputs.push(path);
    run.notes.push(format!(
        "request generation (0.5, 0.5); placement cap {cap}"
    ));
    Ok(run)
}

fn fig8(ctx: &Context) -> Result<RecipeRun, CliError> {
    let mut run = RecipeRun::default();
    let s = Scenario::with_zipf(12, 2, 3, 1, 1.0, &[0.7, 0.3])?;
    run.scenario(ctx, "fig8", &s)?;
    let path = ctx.dir.join("fig8.csv");
    let mut w = csv_writer(Some(&path))?;
    w.write_record([
        "subsets",
        "placements",
        "psi_min",
        "psi_max",
        "grid_points",
        "average_omega",
    ])?;
    for l in 1..=12 {
        let part = Partition::balanced(12, l)?;
        let b = spc_privacy_bounds(&s, &part)?;
        let prepared = Prepared::new(&s, Method::Spc, None, Some(&part), ctx.cap)?;
        let grid = privacy_grid(b.psi_min, b.psi_max);
        let points = parallel::sweep(&prepared, &grid)?;
        let solved: Vec<f64> = points
            .iter()
            .filter(|(p, _)| p.status == LpStatus::Optimal)
            .map(|(p, _)| p.omega_star)
            .collect();
        let avg = if solved.is_empty() {
            f64::NAN
        } else {
            solved.iter().sum::<f64>() / solved.len() as f64
        };
        w.write_record([
            l.to_string(),
            prepared.placements().len().to_string(),
            num(b.psi_min),
            num(b.psi_max),
            solved.len().to_string(),
            num(avg),
        ])?;
    }
    w.flush()?;
    run.outputs.push(path);
    Ok(run)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn linspace_endpoints() {
        let g = linspace(0.566, 0.65, 10);
        assert_eq!(g.len(), 10);
        assert_eq!(g[0], 0.566);
        assert_eq!(g[9], 0.65);
        assert_eq!(linspace(1.0, 2.0, 1), vec![1.0]);
    }

    #[test]
    fn names_are_unique() {
        let names: Vec<_> = all().iter().map(|r| r.name).collect();
        assert_eq!(names, ["fig3", "fig4", "fig5", "fig6", "fig7", "fig8"]);
        assert!(find("fig9").is_none());
    }
}
