//! Structural properties of the optimal placements.

use cacheveil_core::dpc::FillOrder;
use cacheveil_core::enumeration::{Family, Partition};
use cacheveil_core::metrics::{evaluate, privacy_bounds, spc_privacy_bounds};
use cacheveil_core::optimizer::{
    embed_dpc_as_jpc, min_feasible_chunks, project_to_dpc, sweep_privacy, Method,
    OptimizationOutcome, Prepared, Targets,
};
use cacheveil_core::simplex::LpStatus;
use cacheveil_core::Scenario;

const CAP: usize = 1_000_000;

fn linspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    (0..n)
        .map(|j| lo + (hi - lo) * j as f64 / (n - 1) as f64)
        .collect()
}

fn omega(p: &Prepared, zeta: f64) -> OptimizationOutcome {
    p.solve(&Targets::privacy(zeta).unwrap()).unwrap()
}

fn check_verification(o: &OptimizationOutcome) {
    let v = o
        .verification
        .as_ref()
        .expect("optimal outcomes carry a verification report");
    assert!(v.psi >= o.targets.zeta() - 1e-6);
    assert!((v.omega - o.omega_star).abs() <= 1e-6);
    if let Some(b) = o.targets.beta() {
        assert!(v.average_hit_ratio >= b - 1e-6);
    }
}

#[test]
fn joint_and_disjoint_agree_on_default_grid() {
    let s10 = Scenario::baseline();
    let s1 = s10.with_chunks(1).unwrap();
    let (lo, hi) = privacy_bounds(&s10);
    let jpc1 = Prepared::new(&s1, Method::Jpc, None, None, CAP).unwrap();
    let jpc10 = Prepared::new(&s10, Method::Jpc, None, None, CAP).unwrap();
    let dpc = Prepared::new(&s10, Method::Dpc, None, None, CAP).unwrap();
    assert_eq!(jpc10.placements().len(), 7051);
    for z in linspace(lo, hi, 10) {
        let a = omega(&jpc1, z);
        let b = omega(&jpc10, z);
        let c = omega(&dpc, z);
        for o in [&a, &b, &c] {
            assert_eq!(o.status, LpStatus::Optimal, "zeta = {z}");
            check_verification(o);
        }
        assert!((a.omega_star - c.omega_star).abs() <= 1e-6, "zeta = {z}");
        assert!((a.omega_star - b.omega_star).abs() <= 1e-6, "zeta = {z}");
    }
}

#[test]
fn file_family_restriction_keeps_the_optimum() {
    for (c, scenario) in [
        (2, Scenario::baseline().with_chunks(2).unwrap()),
        (
            3,
            Scenario::new(4, 2, 2, 3, &[0.4, 0.3, 0.2, 0.1], &[0.6, 0.4]).unwrap(),
        ),
    ] {
        let (lo, hi) = privacy_bounds(&scenario);
        let chunk = Prepared::new(&scenario, Method::Jpc, Some(Family::Chunk), None, CAP).unwrap();
        let file = Prepared::new(&scenario, Method::Jpc, Some(Family::File), None, CAP).unwrap();
        for z in linspace(lo, hi, 6) {
            let a = omega(&chunk, z);
            let b = omega(&file, z);
            assert!(
                (a.omega_star - b.omega_star).abs() <= 1e-6,
                "C = {c}, zeta = {z}"
            );
        }
    }
}

/// Optimal SPC costs for `C = 1, 2, 3` at three points of the common
/// feasible privacy range.
fn spc_costs_by_chunks(base: &Scenario, part: &Partition) -> Vec<Vec<f64>> {
    let runs: Vec<(Scenario, Prepared)> = (1..=3)
        .map(|c| {
            let s = base.with_chunks(c).unwrap();
            let p = Prepared::new(&s, Method::Spc, None, Some(part), CAP).unwrap();
            (s, p)
        })
        .collect();
    let mut lo: f64 = 0.0;
    let mut hi: f64 = 1.0;
    for (s, _) in &runs {
        let b = spc_privacy_bounds(s, part).unwrap();
        lo = lo.max(b.psi_min);
        hi = hi.min(b.psi_max);
    }
    assert!(lo < hi);
    (0..3)
        .map(|j| {
            let z = lo + (hi - lo) * (j as f64 + 0.5) / 3.0;
            runs.iter()
                .map(|(_, p)| {
                    let o = omega(p, z);
                    assert_eq!(o.status, LpStatus::Optimal);
                    check_verification(&o);
                    o.omega_star
                })
                .collect()
        })
        .collect()
}

#[test]
fn subset_cost_is_unchanged_by_chunks_when_whole_subsets_fill_the_cache() {
    // Equal subsets whose size divides M: whole-subset placements reach the
    // C = 1 optimum and carry over to any C unchanged.
    for (base, l) in [
        (
            Scenario::with_zipf(12, 2, 3, 1, 0.8, &[0.7, 0.3]).unwrap(),
            4,
        ),
        (
            Scenario::with_zipf(6, 2, 2, 1, 1.0, &[0.7, 0.3]).unwrap(),
            3,
        ),
        (Scenario::with_zipf(8, 1, 2, 1, 0.65, &[1.0]).unwrap(), 4),
    ] {
        let part = Partition::balanced(base.num_files(), l).unwrap();
        for costs in spc_costs_by_chunks(&base, &part) {
            for c in &costs[1..] {
                assert!((c - costs[0]).abs() <= 1e-6, "L = {l}: {costs:?}");
            }
        }
    }
}

#[test]
fn subset_cost_never_improves_with_chunks() {
    let base = Scenario::with_zipf(12, 2, 3, 1, 0.8, &[0.7, 0.3]).unwrap();
    for l in [3, 6] {
        let part = Partition::balanced(12, l).unwrap();
        for costs in spc_costs_by_chunks(&base, &part) {
            for c in &costs[1..] {
                assert!(*c >= costs[0] - 1e-6, "L = {l}: {costs:?}");
            }
        }
    }
}

#[test]
fn singleton_subsets_match_the_file_family() {
    let s = Scenario::with_zipf(6, 2, 2, 1, 1.0, &[0.7, 0.3]).unwrap();
    let part = Partition::singletons(6);
    let spc = Prepared::new(&s, Method::Spc, None, Some(&part), CAP).unwrap();
    let jpc = Prepared::new(&s, Method::Jpc, Some(Family::File), None, CAP).unwrap();
    let (lo, hi) = privacy_bounds(&s);
    for z in linspace(lo, hi, 5) {
        assert!((omega(&spc, z).omega_star - omega(&jpc, z).omega_star).abs() <= 1e-6);
    }
}

#[test]
fn projection_and_embedding_preserve_cost_and_privacy() {
    let s = Scenario::with_zipf(6, 2, 3, 1, 0.9, &[0.6, 0.4]).unwrap();
    let jpc = Prepared::new(&s, Method::Jpc, Some(Family::File), None, CAP).unwrap();
    let (lo, hi) = privacy_bounds(&s);
    for z in linspace(lo, hi, 4) {
        let o = omega(&jpc, z);
        let policy = o.policy.as_ref().unwrap();
        let before = evaluate(&s, jpc.placements(), policy).unwrap();
        let alphas = project_to_dpc(&s, jpc.placements(), policy).unwrap();
        for order in [
            FillOrder::ascending(6),
            FillOrder::explicit(&[5, 0, 3, 1, 4, 2]).unwrap(),
        ] {
            let (set, embedded) = embed_dpc_as_jpc(&s, &alphas, &order, CAP).unwrap();
            let after = evaluate(&s, &set, &embedded).unwrap();
            assert!((before.omega - after.omega).abs() <= 1e-9);
            assert!((before.psi - after.psi).abs() <= 1e-9);
            assert!((after.omega - o.omega_star).abs() <= 1e-6);
        }
    }
}

#[test]
fn optimal_cost_is_nondecreasing_in_privacy() {
    let cases = [
        (
            Scenario::baseline().with_chunks(2).unwrap(),
            Method::Jpc,
            None,
        ),
        (Scenario::baseline(), Method::Dpc, None),
        (
            Scenario::with_zipf(12, 2, 3, 1, 0.65, &[0.7, 0.3]).unwrap(),
            Method::Spc,
            Some(Partition::balanced(12, 4).unwrap()),
        ),
    ];
    for (s, method, part) in cases {
        let prepared = Prepared::new(&s, method, None, part.as_ref(), CAP).unwrap();
        let (lo, hi) = match &part {
            Some(p) => {
                let b = spc_privacy_bounds(&s, p).unwrap();
                (b.psi_min, b.psi_max)
            }
            None => privacy_bounds(&s),
        };
        let points = sweep_privacy(&prepared, &linspace(lo - 0.02, hi + 0.02, 15)).unwrap();
        let feasible: Vec<f64> = points
            .iter()
            .filter(|p| p.status == LpStatus::Optimal)
            .map(|p| p.omega_star)
            .collect();
        assert!(
            feasible.len() >= 12,
            "{method}: {} feasible",
            feasible.len()
        );
        for w in feasible.windows(2) {
            assert!(w[1] >= w[0] - 1e-9, "{method}: {feasible:?}");
        }
        // Above the achievable maximum the program is infeasible.
        assert_eq!(points.last().unwrap().status, LpStatus::Infeasible);
    }
}

#[test]
fn minimum_chunk_count_is_nondecreasing_in_hit_target() {
    let s = Scenario::with_zipf(6, 2, 2, 1, 1.0, &[0.7, 0.3]).unwrap();
    let (lo, hi) = privacy_bounds(&s);
    let zeta = 0.5 * (lo + hi);
    let mut last = (0usize, 0.0f64);
    for b in linspace(0.1, 1.0, 10) {
        let search = min_feasible_chunks(
            &s,
            Method::Jpc,
            &Targets::new(zeta, Some(b)).unwrap(),
            None,
            None,
            6,
            CAP,
        )
        .unwrap();
        let c = search.c_min.expect("feasible within six chunks");
        let o = search.outcome.unwrap();
        check_verification(&o);
        assert!(c >= last.0, "beta = {b}");
        assert!(o.omega_star >= last.1 - 1e-6, "beta = {b}");
        last = (c, o.omega_star);
    }
}

#[test]
fn hit_target_one_needs_three_chunks_on_default() {
    let s = Scenario::baseline();
    let (lo, _) = privacy_bounds(&s);
    let search = min_feasible_chunks(
        &s,
        Method::Jpc,
        &Targets::new(lo, Some(1.0)).unwrap(),
        None,
        None,
        10,
        CAP,
    )
    .unwrap();
    assert_eq!(search.c_min, Some(3));
    assert_eq!(search.tried.len(), 3);
}
