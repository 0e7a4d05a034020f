//! Reproducible simulation drivers for the four experiments. Trials run on
//! a worker pool; per-trial RNG streams keep results independent of
//! scheduling order, so outputs are byte-identical for a fixed seed.

use std::sync::Arc;

use anyhow::{anyhow, bail, Context, Result};
use rand::distributions::Distribution;
use rand::Rng;
use rayon::prelude::*;

use gromov_core::combine::{convex, g_convex, CombinationWeights};
use gromov_core::graph::{
    generate_graph, DelayModel, GraphKind, NeighborOrder, RngSeed, WeightedGraph,
};
use gromov_core::infer::{
    eval_placement_metrics, eval_source_metrics, gromov_candidate_family, order_accuracy,
    path_probability, place_greedy, place_gromov, source_estimate_snapshot, CostFunction,
    EstimatorMode, EstimatorProblem, SnapshotMethod, SnapshotOptions, SourceTrial, SynthesisGrid,
};
use gromov_core::io::read_graph;
use gromov_core::spectral::spectral_distance;
use gromov_core::tree::Base;
use gromov_core::DEFAULT_TOL;

use crate::config::{ExperimentConfig, ExperimentKind, GraphSpec};
use crate::report::Report;

/// Distance to the nearest random BFS matrix (`d0`), the best distance over
/// the combination grid (`d`), and the improvement ratio `(d0 - d) / d`.
#[derive(Debug, Clone, Copy)]
pub struct ApproxPathResult {
    pub mu: f64,
    pub trial: usize,
    pub d0: f64,
    pub d: f64,
    pub ratio: f64,
}

#[derive(Debug)]
pub struct ApproxPathOutcome {
    pub results: Vec<ApproxPathResult>,
    pub mean_ratio_by_mu: Vec<(f64, f64)>,
    pub report: Report,
}

#[derive(Debug, Clone)]
pub struct SnapshotTrialRow {
    pub trial: usize,
    pub candidates: usize,
    pub true_source: String,
    pub est_baseline: String,
    pub est_gromov: String,
    pub outcome: SourceTrial,
    pub corners_ok: bool,
}

#[derive(Debug)]
pub struct SnapshotOutcome {
    pub rows: Vec<SnapshotTrialRow>,
    pub accuracy_baseline: f64,
    pub accuracy_gromov: f64,
    pub corners_all_ok: bool,
    pub report: Report,
}

#[derive(Debug, Clone)]
pub struct PlacementTrialRow {
    pub trial: usize,
    pub cost_greedy: f64,
    pub cost_gromov: f64,
    pub cost_gromov_recomputed: f64,
    pub greedy_monotone: bool,
    pub iterations: usize,
}

#[derive(Debug)]
pub struct PlacementOutcome {
    pub rows: Vec<PlacementTrialRow>,
    pub mean_ratio: Option<f64>,
    pub report: Report,
}

fn format_float(v: f64) -> String {
    format!("{v}")
}

fn pool(jobs: usize) -> Result<rayon::ThreadPool> {
    rayon::ThreadPoolBuilder::new()
        .num_threads(jobs)
        .build()
        .context("building worker pool")
}

/// Loads the shared graph for file specs; `None` for generated families that
/// are resampled per trial (ER, BA) and for deterministic generators.
fn shared_graph(cfg: &ExperimentConfig) -> Result<Option<Arc<WeightedGraph>>> {
    match &cfg.graph {
        GraphSpec::File { path, unit_weights } => {
            let g = read_graph(path, *unit_weights)
                .with_context(|| format!("reading graph {}", path.display()))?;
            Ok(Some(Arc::new(g)))
        }
        GraphSpec::Generate(_) => Ok(None),
    }
}

/// Graph for one trial: random families resample per trial, deterministic
/// generators and files are shared.
fn trial_graph(
    cfg: &ExperimentConfig,
    shared: &Option<Arc<WeightedGraph>>,
    seed: RngSeed,
) -> Result<Arc<WeightedGraph>> {
    if let Some(g) = shared {
        return Ok(g.clone());
    }
    let GraphSpec::Generate(kind) = &cfg.graph else { unreachable!("file graphs are shared") };
    match kind {
        GraphKind::Er { .. } | GraphKind::Ba { .. } => {
            Ok(Arc::new(generate_graph(*kind, seed)?))
        }
        _ => Ok(Arc::new(generate_graph(*kind, RngSeed::new(0))?)),
    }
}

/// All node names except `exclude`, in canonical index order.
fn base_names_excluding(g: &WeightedGraph, exclude: usize) -> Vec<String> {
    (0..g.node_count()).filter(|&i| i != exclude).map(|i| g.name(i).to_string()).collect()
}

// --- approx-path -------------------------------------------------------------

/// Per trial: sample truncated-Gaussian delays, take the earliest-arrival
/// tree as the target, and measure how much closer the combination grid over
/// two random BFS trees and a star gets than the first BFS tree alone.
pub fn run_approx_path(cfg: &ExperimentConfig) -> Result<ApproxPathOutcome> {
    let shared = shared_graph(cfg)?;
    let base_seed = RngSeed::new(cfg.seed);
    let jobs = pool(cfg.jobs)?;

    let mut tasks: Vec<(usize, usize)> = Vec::new();
    for mu_idx in 0..cfg.mus.len() {
        for trial in 0..cfg.trials {
            tasks.push((mu_idx, trial));
        }
    }

    let results: Vec<ApproxPathResult> = jobs.install(|| {
        tasks
            .par_iter()
            .map(|&(mu_idx, trial)| -> Result<ApproxPathResult> {
                let mu = cfg.mus[mu_idx];
                let salt = (mu_idx * cfg.trials + trial) as u64 * 8;
                let graph = trial_graph(cfg, &shared, base_seed.derive(salt))?;
                let n = graph.node_count();
                let mut rng = base_seed.derive(salt + 1).rng();
                let source = rng.gen_range(0..n);
                let source_name = graph.name(source).to_string();

                let model = DelayModel::truncated_gaussian(mu, cfg.sigma2)?;
                let delays = graph.sample_delays(&model, base_seed.derive(salt + 2));
                let target_tree = graph.shortest_path_tree(&source_name, &delays)?;
                let order = base_names_excluding(&graph, source);
                let target =
                    Base::new(target_tree, source_name.clone(), order.clone())?.gromov_matrix();

                let t0 = graph
                    .bfs_tree(&source_name, &NeighborOrder::Random(base_seed.derive(salt + 3)))?;
                let t1 = graph
                    .bfs_tree(&source_name, &NeighborOrder::Random(base_seed.derive(salt + 4)))?;
                let m0 = Base::new(t0, source_name.clone(), order.clone())?.gromov_matrix();
                let m1 = Base::new(t1, source_name.clone(), order)?.gromov_matrix();
                let star = m1.diagonal_matrix();

                let d0 = spectral_distance(target.as_sym(), m0.as_sym())?;
                let mut d = f64::INFINITY;
                for a_step in 0..=cfg.grid_step {
                    let alpha = a_step as f64 / cfg.grid_step as f64;
                    let blended = g_convex(
                        &[m0.clone(), m1.clone()],
                        &CombinationWeights::pair(alpha).expect("alpha in [0, 1]"),
                    )?;
                    for b_step in 0..=cfg.grid_step {
                        let beta = b_step as f64 / cfg.grid_step as f64;
                        // A combination with a star is already a valid
                        // matrix, so the plain blend equals the repaired one.
                        let candidate = convex(
                            &[blended.clone(), star.clone()],
                            &CombinationWeights::pair(beta).expect("beta in [0, 1]"),
                        )?;
                        d = d.min(spectral_distance(target.as_sym(), &candidate)?);
                    }
                }
                let ratio = if d == 0.0 && d0 == 0.0 { 0.0 } else { (d0 - d) / d };
                Ok(ApproxPathResult { mu, trial, d0, d, ratio })
            })
            .collect::<Result<Vec<_>>>()
    })?;

    let mean_ratio_by_mu: Vec<(f64, f64)> = cfg
        .mus
        .iter()
        .map(|&mu| {
            let rs: Vec<f64> =
                results.iter().filter(|r| r.mu == mu).map(|r| r.ratio).collect();
            (mu, rs.iter().sum::<f64>() / rs.len() as f64)
        })
        .collect();

    let problem = EstimatorProblem {
        cost: CostFunction::WeightedServiceDistance,
        mode: EstimatorMode::Minimization,
    };
    let mut report = Report::new(
        ExperimentKind::ApproxPath.name(),
        problem.mode_name(),
        "mu,trial,d0,d,ratio",
        "mu,mean_ratio",
    );
    for r in &results {
        report.trial_rows.push(format!(
            "{},{},{},{},{}",
            r.mu,
            r.trial,
            format_float(r.d0),
            format_float(r.d),
            format_float(r.ratio)
        ));
    }
    for &(mu, mean) in &mean_ratio_by_mu {
        report.summary.push((format!("mean_ratio[mu={mu}]"), format_float(mean)));
        report.plot_rows.push(format!("{mu},{}", format_float(mean)));
    }
    report.summary.push(("trials_per_mu".into(), cfg.trials.to_string()));

    Ok(ApproxPathOutcome { results, mean_ratio_by_mu, report })
}

// --- acq-order ---------------------------------------------------------------

/// Ground truth from many sampled propagation trees, estimate from a few
/// samples expanded by pairwise combinations; rows pair the two
/// probabilities per `(source, u, v)` triple.
pub fn run_acq_order(cfg: &ExperimentConfig) -> Result<Report> {
    let shared = shared_graph(cfg)?;
    let base_seed = RngSeed::new(cfg.seed);
    let jobs = pool(cfg.jobs)?;
    let graph = trial_graph(cfg, &shared, base_seed.derive(0xACC))?;
    let n = graph.node_count();
    if n < 3 {
        bail!("acq-order needs at least 3 nodes");
    }

    let mut rng = base_seed.derive(1).rng();
    let mut sources: Vec<usize> = Vec::new();
    while sources.len() < cfg.sources.min(n) {
        let s = rng.gen_range(0..n);
        if !sources.contains(&s) {
            sources.push(s);
        }
    }

    let per_source: Vec<Vec<(String, String, String, f64, f64)>> = jobs.install(|| {
        sources
            .par_iter()
            .enumerate()
            .map(|(si, &s)| -> Result<Vec<(String, String, String, f64, f64)>> {
                let s_name = graph.name(s).to_string();
                let salt = 0x100 + si as u64 * 0x100;
                let order = base_names_excluding(&graph, s);

                // Ground truth: membership read off each sampled tree.
                let mut truth_trees = Vec::with_capacity(cfg.truth_samples);
                for i in 0..cfg.truth_samples {
                    let delays =
                        graph.sample_delays(&cfg.delay, base_seed.derive(salt + 2 + i as u64));
                    truth_trees.push(graph.shortest_path_tree(&s_name, &delays)?);
                }

                // Estimate: a handful of fresh samples plus combinations.
                let mut bases = Vec::with_capacity(cfg.sample_count);
                for i in 0..cfg.sample_count {
                    let delays = graph.sample_delays(
                        &cfg.delay,
                        base_seed.derive(salt + 2 + (cfg.truth_samples + i) as u64),
                    );
                    let t = graph.shortest_path_tree(&s_name, &delays)?;
                    bases.push(Base::new(t, s_name.clone(), order.clone())?);
                }

                let mut pair_rng = base_seed.derive(salt + 1).rng();
                let mut rows = Vec::with_capacity(cfg.pairs_per_source);
                for _ in 0..cfg.pairs_per_source {
                    let u = loop {
                        let c = pair_rng.gen_range(0..n);
                        if c != s {
                            break c;
                        }
                    };
                    let v = loop {
                        let c = pair_rng.gen_range(0..n);
                        if c != s && c != u {
                            break c;
                        }
                    };
                    let (u_name, v_name) = (graph.name(u).to_string(), graph.name(v).to_string());

                    let hits = truth_trees
                        .iter()
                        .filter(|t| {
                            let du = t.distance(&s_name, &u_name).expect("spanning tree");
                            let dv = t.distance(&s_name, &v_name).expect("spanning tree");
                            let duv = t.distance(&u_name, &v_name).expect("spanning tree");
                            (du + duv - dv).abs() <= DEFAULT_TOL
                        })
                        .count();
                    let p1 = hits as f64 / truth_trees.len() as f64;

                    let p1_hat = path_probability(
                        &bases,
                        &s_name,
                        &u_name,
                        &v_name,
                        &SynthesisGrid { steps: cfg.grid_step },
                        DEFAULT_TOL,
                    )?;
                    rows.push((s_name.clone(), u_name, v_name, p1, p1_hat));
                }
                Ok(rows)
            })
            .collect::<Result<Vec<_>>>()
    })?;

    let rows: Vec<(String, String, String, f64, f64)> = per_source.into_iter().flatten().collect();
    let truths: Vec<f64> = rows.iter().map(|r| r.3).collect();
    let estimates: Vec<f64> = rows.iter().map(|r| r.4).collect();
    let acc = order_accuracy(&estimates, &truths)?;

    let problem = EstimatorProblem {
        cost: CostFunction::PathIndicator { u: "u".into(), v: "v".into() },
        mode: EstimatorMode::Expectation,
    };
    let mut report = Report::new(
        ExperimentKind::AcqOrder.name(),
        problem.mode_name(),
        "source,u,v,p1,p1_hat",
        "p1,p1_hat",
    );
    for (s, u, v, p1, p1_hat) in &rows {
        report
            .trial_rows
            .push(format!("{s},{u},{v},{},{}", format_float(*p1), format_float(*p1_hat)));
        report.plot_rows.push(format!("{},{}", format_float(*p1), format_float(*p1_hat)));
    }
    report.summary.push((
        "accuracy".into(),
        acc.accuracy.map(format_float).unwrap_or_else(|| "undefined".into()),
    ));
    report.summary.push(("pairs_used".into(), acc.used.to_string()));
    report.summary.push(("pairs_excluded".into(), acc.excluded.to_string()));
    Ok(report)
}

// --- source-snapshot -----------------------------------------------------------

/// Simulates an infection snapshot per trial and ranks candidate sources
/// with both the single-random-BFS heuristic and the combination family.
pub fn run_source_snapshot(cfg: &ExperimentConfig) -> Result<SnapshotOutcome> {
    let shared = shared_graph(cfg)?;
    let base_seed = RngSeed::new(cfg.seed);
    let jobs = pool(cfg.jobs)?;

    let rows: Vec<SnapshotTrialRow> = jobs.install(|| {
        (0..cfg.trials)
            .into_par_iter()
            .map(|trial| -> Result<SnapshotTrialRow> {
                let salt = trial as u64 * 16;
                let graph = trial_graph(cfg, &shared, base_seed.derive(salt))?;
                let n = graph.node_count();
                let mut rng = base_seed.derive(salt + 1).rng();
                let source = rng.gen_range(0..n);
                let source_name = graph.name(source).to_string();
                let frac = rng.gen_range(cfg.infected_lo..=cfg.infected_hi);
                let target = ((n as f64 * frac).round() as usize).clamp(1, n);

                // First-passage infection: infection times are shortest-path
                // distances under sampled delays.
                let delays = graph.sample_delays(&cfg.delay, base_seed.derive(salt + 2));
                let arrival = graph.delay_distances_from(source, &delays)?;
                let mut times: Vec<(f64, usize)> =
                    arrival.into_iter().enumerate().map(|(v, d)| (d, v)).collect();
                times.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
                let infected: Vec<String> =
                    times.iter().take(target).map(|&(_, v)| graph.name(v).to_string()).collect();

                let opts = SnapshotOptions {
                    candidates: cfg.candidates,
                    direction: cfg.direction,
                    tol: DEFAULT_TOL,
                };
                let ranked_b = source_estimate_snapshot(
                    &graph,
                    &infected,
                    &SnapshotMethod::BfsHeuristic { seed: base_seed.derive(salt + 3) },
                    &opts,
                )?;
                let ranked_g = source_estimate_snapshot(
                    &graph,
                    &infected,
                    &SnapshotMethod::Gromov { grid: cfg.grid_step },
                    &opts,
                )?;

                let dist_from_true = graph.distances_from(source);
                let locate = |ranked: &[(String, f64)]| -> Result<(String, f64, f64)> {
                    let est = ranked.first().ok_or_else(|| anyhow!("empty ranking"))?;
                    let pos = ranked
                        .iter()
                        .position(|(name, _)| *name == source_name)
                        .ok_or_else(|| anyhow!("true source not among candidates"))?;
                    let dist = dist_from_true[graph.idx(&est.0)?];
                    Ok((est.0.clone(), dist, (pos + 1) as f64 / ranked.len() as f64))
                };
                let (est_b, dist_b, rank_b) = locate(&ranked_b)?;
                let (est_g, dist_g, rank_g) = locate(&ranked_g)?;

                // Hard invariant: the family the true source generates
                // contains all three pure matrices at the grid corners.
                let corners_ok = if infected.len() >= 2 {
                    let family =
                        gromov_candidate_family(&graph, &infected, &source_name, cfg.grid_step)?;
                    [[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]]
                        .iter()
                        .zip(&family.pure)
                        .all(|(corner, pure)| {
                            family.members.iter().any(|(w, m)| {
                                w.as_slice() == *corner
                                    && m.as_sym().max_abs_diff(pure.as_sym()).unwrap() == 0.0
                            })
                        })
                } else {
                    true
                };

                Ok(SnapshotTrialRow {
                    trial,
                    candidates: ranked_g.len(),
                    true_source: source_name,
                    est_baseline: est_b,
                    est_gromov: est_g,
                    outcome: SourceTrial {
                        dist_baseline: dist_b,
                        dist_gromov: dist_g,
                        rank_frac_baseline: rank_b,
                        rank_frac_gromov: rank_g,
                    },
                    corners_ok,
                })
            })
            .collect::<Result<Vec<_>>>()
    })?;

    let outcomes: Vec<SourceTrial> = rows.iter().map(|r| r.outcome).collect();
    let metrics = eval_source_metrics(&outcomes, cfg.top_fraction)?;
    let corners_all_ok = rows.iter().all(|r| r.corners_ok);

    let problem =
        EstimatorProblem { cost: CostFunction::NegCentroid, mode: EstimatorMode::Minimization };
    let mut report = Report::new(
        ExperimentKind::SourceSnapshot.name(),
        problem.mode_name(),
        "trial,candidates,true_source,est_baseline,est_gromov,dist_baseline,dist_gromov,rank_frac_baseline,rank_frac_gromov,corners_ok",
        "trial,dist_gain",
    );
    for r in &rows {
        report.trial_rows.push(format!(
            "{},{},{},{},{},{},{},{},{},{}",
            r.trial,
            r.candidates,
            r.true_source,
            r.est_baseline,
            r.est_gromov,
            format_float(r.outcome.dist_baseline),
            format_float(r.outcome.dist_gromov),
            format_float(r.outcome.rank_frac_baseline),
            format_float(r.outcome.rank_frac_gromov),
            r.corners_ok,
        ));
        report.plot_rows.push(format!(
            "{},{}",
            r.trial,
            format_float(r.outcome.dist_baseline - r.outcome.dist_gromov)
        ));
    }
    let fmt_opt =
        |v: Option<f64>| v.map(format_float).unwrap_or_else(|| "undefined".into());
    report.summary.push(("mean_dist_baseline".into(), format_float(metrics.mean_dist_baseline)));
    report.summary.push(("mean_dist_gromov".into(), format_float(metrics.mean_dist_gromov)));
    report.summary.push(("error_reduction".into(), fmt_opt(metrics.error_reduction)));
    report.summary.push((
        format!("accuracy_baseline[top={}]", cfg.top_fraction),
        format_float(metrics.accuracy_baseline),
    ));
    report.summary.push((
        format!("accuracy_gromov[top={}]", cfg.top_fraction),
        format_float(metrics.accuracy_gromov),
    ));
    report
        .summary
        .push(("detection_improvement".into(), fmt_opt(metrics.detection_improvement)));
    report.summary.push(("corners_all_ok".into(), corners_all_ok.to_string()));

    Ok(SnapshotOutcome {
        rows,
        accuracy_baseline: metrics.accuracy_baseline,
        accuracy_gromov: metrics.accuracy_gromov,
        corners_all_ok,
        report,
    })
}

// --- placement -----------------------------------------------------------------

/// Greedy versus family-based center placement under Pareto service demand.
pub fn run_placement(cfg: &ExperimentConfig) -> Result<PlacementOutcome> {
    let shared = shared_graph(cfg)?;
    let base_seed = RngSeed::new(cfg.seed);
    let jobs = pool(cfg.jobs)?;

    let rows: Vec<PlacementTrialRow> = jobs.install(|| {
        (0..cfg.trials)
            .into_par_iter()
            .map(|trial| -> Result<PlacementTrialRow> {
                let salt = trial as u64 * 8;
                let graph = trial_graph(cfg, &shared, base_seed.derive(salt))?;
                let n = graph.node_count();

                // Pareto(scale 1, shape 2) service demand.
                let mut rng = base_seed.derive(salt + 1).rng();
                let pareto = rand_distr::Pareto::new(1.0, 2.0).expect("valid parameters");
                let demand: Vec<f64> = (0..n).map(|_| pareto.sample(&mut rng)).collect();

                let greedy = place_greedy(&graph, &demand, cfg.k)?;
                let greedy_monotone =
                    greedy.step_costs.windows(2).all(|w| w[1] <= w[0] + 1e-9);
                let cost_greedy = *greedy.step_costs.last().expect("k >= 1");

                let placed = place_gromov(
                    &graph,
                    &demand,
                    cfg.k,
                    cfg.eta,
                    cfg.max_iterations,
                    base_seed.derive(salt + 2),
                    &SynthesisGrid { steps: cfg.grid_step },
                )?;
                let recomputed =
                    gromov_core::infer::placement_cost(&graph, &demand, &placed.centers)?;

                Ok(PlacementTrialRow {
                    trial,
                    cost_greedy,
                    cost_gromov: placed.cost,
                    cost_gromov_recomputed: recomputed,
                    greedy_monotone,
                    iterations: placed.iterations,
                })
            })
            .collect::<Result<Vec<_>>>()
    })?;

    let metrics =
        eval_placement_metrics(&rows.iter().map(|r| (r.cost_greedy, r.cost_gromov)).collect::<Vec<_>>());

    let problem = EstimatorProblem {
        cost: CostFunction::WeightedServiceDistance,
        mode: EstimatorMode::Minimization,
    };
    let mut report = Report::new(
        ExperimentKind::Placement.name(),
        problem.mode_name(),
        "trial,cost_greedy,cost_gromov,ratio,iterations,greedy_monotone",
        "graph_size,mean_ratio_minus_1",
    );
    for r in &rows {
        let ratio = if r.cost_gromov > 0.0 {
            format_float(r.cost_greedy / r.cost_gromov)
        } else {
            "undefined".into()
        };
        report.trial_rows.push(format!(
            "{},{},{},{},{},{}",
            r.trial,
            format_float(r.cost_greedy),
            format_float(r.cost_gromov),
            ratio,
            r.iterations,
            r.greedy_monotone,
        ));
    }
    let graph_size = match &cfg.graph {
        GraphSpec::Generate(GraphKind::Grid2d { rows, cols }) => rows * cols,
        GraphSpec::Generate(GraphKind::Er { n, .. })
        | GraphSpec::Generate(GraphKind::Ba { n, .. })
        | GraphSpec::Generate(GraphKind::Complete { n }) => *n,
        GraphSpec::File { .. } => 0,
    };
    if let Some(mean) = metrics.mean_cost_ratio {
        report.summary.push(("mean_cost_ratio".into(), format_float(mean)));
        report.plot_rows.push(format!("{graph_size},{}", format_float(mean - 1.0)));
    } else {
        report.summary.push(("mean_cost_ratio".into(), "undefined".into()));
    }
    report.summary.push(("ratio_trials_used".into(), metrics.used.to_string()));
    report.summary.push(("ratio_trials_undefined".into(), metrics.undefined.to_string()));

    Ok(PlacementOutcome { rows, mean_ratio: metrics.mean_cost_ratio, report })
}

/// Dispatches a config to its driver and returns the report.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<Report> {
    match cfg.kind {
        ExperimentKind::ApproxPath => Ok(run_approx_path(cfg)?.report),
        ExperimentKind::AcqOrder => run_acq_order(cfg),
        ExperimentKind::SourceSnapshot => Ok(run_source_snapshot(cfg)?.report),
        ExperimentKind::Placement => Ok(run_placement(cfg)?.report),
    }
}
