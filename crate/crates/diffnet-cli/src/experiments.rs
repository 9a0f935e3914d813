//! The experiment runners behind `run`: build graphs per the config, drive
//! the library, and emit CSV tables and SVG figures.

use std::fs;
use std::path::{Path, PathBuf};

use rayon::prelude::*;

use diffnet::graph::{
    assign_labels, generate_configuration_model, generate_erdos_renyi,
    rewire_to_assortativity, Graph,
};
use diffnet::linalg::Mat;
use diffnet::meanfield::{bifurcation_scan, critical_threshold, MfdParams};
use diffnet::polling::{mse_experiment, Estimator, SeedMode};
use diffnet::population::PopulationState;
use diffnet::reactive::{
    constrained_ode_trajectory, logistic_interpolation_kernel, simulate_joint, ReactiveNetwork,
};
use diffnet::sampling::{verify_friendship_paradox, walk_mixing_diagnostic};
use diffnet::seed::{derive_seed, tag};
use diffnet::sis::{ContagionRule, SisConfig};
use diffnet::tracking::{track, ObservationPlan, QSpec, TrackOptions};

use crate::config::{
    ExperimentConfig, ExperimentKind, GraphModel, GraphSpec, QModeSpec,
};
use crate::svg::{render_grid, Panel, Series};

/// Paths written by a successful run (manifest excluded).
pub struct RunOutput {
    pub artifacts: Vec<PathBuf>,
}

pub fn run_experiment(config: &ExperimentConfig, out_dir: &Path) -> Result<RunOutput, String> {
    let mut written: Vec<PathBuf> = Vec::new();
    let result = dispatch(config, out_dir, &mut written);
    if let Err(e) = result {
        // Failed runs leave no partial outputs behind.
        for path in &written {
            let _ = fs::remove_file(path);
        }
        return Err(e);
    }
    Ok(RunOutput { artifacts: written })
}

fn dispatch(
    config: &ExperimentConfig,
    out_dir: &Path,
    written: &mut Vec<PathBuf>,
) -> Result<(), String> {
    fs::create_dir_all(out_dir).map_err(|e| format!("cannot create output dir: {e}"))?;
    match config.kind {
        ExperimentKind::ParadoxCdfs => run_paradox(config, out_dir, written),
        ExperimentKind::Bifurcation => run_bifurcation(config, out_dir, written),
        ExperimentKind::MseGrid => run_mse_grid(config, out_dir, written),
        ExperimentKind::ReactiveCompare => run_reactive(config, out_dir, written),
        ExperimentKind::Tracking => run_tracking(config, out_dir, written),
    }
}

fn write_artifact(
    path: PathBuf,
    content: &str,
    written: &mut Vec<PathBuf>,
) -> Result<(), String> {
    fs::write(&path, content).map_err(|e| format!("cannot write {}: {e}", path.display()))?;
    written.push(path);
    Ok(())
}

fn base_graph(spec: &GraphSpec, seed: u64) -> Result<Graph, String> {
    match spec.model {
        GraphModel::PowerLaw => generate_configuration_model(
            spec.n,
            spec.alpha.expect("validated"),
            spec.d_min(),
            spec.d_max(),
            seed,
        )
        .map_err(|e| e.to_string()),
        GraphModel::ErdosRenyi => {
            generate_erdos_renyi(spec.n, spec.avg_degree.expect("validated"), seed)
                .map_err(|e| e.to_string())
        }
    }
}

/// Rewired variants for every r_kk target (the raw graph when none).
fn graph_variants(
    spec: &GraphSpec,
    base_seed: u64,
) -> Result<Vec<(String, f64, Graph)>, String> {
    let base = base_graph(spec, derive_seed(base_seed, &[tag("graph")]))?;
    graph_variants_from(base, spec, base_seed)
}

/// Rewired variants of an already-built (possibly labeled) base graph.
fn graph_variants_from(
    base: Graph,
    spec: &GraphSpec,
    base_seed: u64,
) -> Result<Vec<(String, f64, Graph)>, String> {
    if spec.r_kk.is_empty() {
        let achieved = base.stats().assortativity;
        return Ok(vec![("raw".into(), achieved, base)]);
    }
    spec.r_kk
        .iter()
        .enumerate()
        .map(|(i, &target)| {
            let rewired = rewire_to_assortativity(
                &base,
                target,
                spec.rewire_tol,
                spec.rewire_max_steps,
                derive_seed(base_seed, &[tag("rewire"), i as u64]),
            )
            .map_err(|e| e.to_string())?;
            if !rewired.converged && !rewired.degenerate {
                return Err(format!(
                    "rewiring to r_kk = {target} reached only {:.4}; raise rewire_max_steps",
                    rewired.achieved_rkk
                ));
            }
            Ok((format!("rkk_{}", tagify(target)), rewired.achieved_rkk, rewired.graph))
        })
        .collect()
}

fn tagify(v: f64) -> String {
    format!("{v}").replace('-', "m").replace('.', "p")
}

// ---------------------------------------------------------------- paradox

fn run_paradox(
    config: &ExperimentConfig,
    out_dir: &Path,
    written: &mut Vec<PathBuf>,
) -> Result<(), String> {
    let variants = graph_variants(&config.graph, config.seed)?;
    let mut panels = Vec::new();
    for (name, achieved, g) in &variants {
        let report = verify_friendship_paradox(g);
        let mut csv = Vec::new();
        report.write_csv(&mut csv).map_err(|e| e.to_string())?;
        write_artifact(
            out_dir.join(format!("paradox_{name}.csv")),
            &String::from_utf8(csv).unwrap(),
            written,
        )?;
        let degrees: Vec<f64> = (1..report.cdf_dx.len()).map(|k| k as f64).collect();
        let series = |cdf: &[f64], label: &str| Series {
            name: label.into(),
            points: degrees.iter().map(|&k| (k, cdf[k as usize])).collect(),
        };
        panels.push(Panel {
            title: format!("r_kk = {achieved:.3}"),
            x_label: "degree".into(),
            y_label: "cdf".into(),
            series: vec![
                series(&report.cdf_dx, "d(X)"),
                series(&report.cdf_dy, "d(Y)"),
                series(&report.cdf_dz, "d(Z)"),
            ],
            log_y: false,
        });
    }
    write_artifact(
        out_dir.join("paradox_cdfs.svg"),
        &render_grid(&panels, panels.len().max(1)),
        written,
    )
}

// ------------------------------------------------------------ bifurcation

fn run_bifurcation(
    config: &ExperimentConfig,
    out_dir: &Path,
    written: &mut Vec<PathBuf>,
) -> Result<(), String> {
    let dynamics = config.dynamics.as_ref().expect("validated");
    let grid = dynamics.lambda_grid.as_ref().expect("validated").values();
    let variants = graph_variants(&config.graph, config.seed)?;
    let mut panels = Vec::new();
    for (name, achieved, g) in &variants {
        let stats = g.stats();
        let non = bifurcation_scan(&stats, ContagionRule::NonMonophilic, &grid)
            .map_err(|e| e.to_string())?;
        let mono = bifurcation_scan(&stats, ContagionRule::Monophilic, &grid)
            .map_err(|e| e.to_string())?;
        let mut csv = Vec::new();
        diffnet::meanfield::write_bifurcation_csv(&mut csv, &non, &mono)
            .map_err(|e| e.to_string())?;
        write_artifact(
            out_dir.join(format!("bifurcation_{name}.csv")),
            &String::from_utf8(csv).unwrap(),
            written,
        )?;
        let lx = critical_threshold(&stats, ContagionRule::NonMonophilic).lambda_star;
        let lz = critical_threshold(&stats, ContagionRule::Monophilic).lambda_star;
        panels.push(Panel {
            title: format!("r_kk = {achieved:.3} (l*_Z = {lz:.2}, l*_X = {lx:.2})"),
            x_label: "lambda".into(),
            y_label: "rho".into(),
            series: vec![
                Series { name: "non-monophilic".into(), points: non },
                Series { name: "monophilic".into(), points: mono },
            ],
            log_y: false,
        });
    }
    write_artifact(
        out_dir.join("bifurcation.svg"),
        &render_grid(&panels, panels.len().max(1)),
        written,
    )
}

// --------------------------------------------------------------- mse-grid

fn run_mse_grid(
    config: &ExperimentConfig,
    out_dir: &Path,
    written: &mut Vec<PathBuf>,
) -> Result<(), String> {
    let polling = config.polling.as_ref().expect("validated");
    let estimators: Vec<Estimator> =
        polling.estimators.iter().map(|&e| e.into()).collect();
    let budgets = polling.budgets.clone();
    let variants = graph_variants(&config.graph, config.seed)?;

    // One panel per (r_kk variant, p_ks target), computed in a work pool
    // and written in deterministic order afterwards.
    let mut jobs = Vec::new();
    for (vi, (name, achieved_r, g)) in variants.iter().enumerate() {
        for (pi, &p_target) in config.graph.p_ks.iter().enumerate() {
            jobs.push((vi, pi, name.clone(), *achieved_r, g, p_target));
        }
    }
    let results: Vec<Result<(usize, usize, String, f64, f64, diffnet::polling::MseTable), String>> =
        jobs.par_iter()
            .map(|(vi, pi, name, achieved_r, g, p_target)| {
                let labeled = assign_labels(
                    g,
                    config.graph.rho0,
                    *p_target,
                    config.graph.label_tol,
                    derive_seed(config.seed, &[tag("labels"), *vi as u64, *pi as u64]),
                )
                .map_err(|e| e.to_string())?;
                if !labeled.converged && !labeled.degenerate {
                    return Err(format!(
                        "label targeting p_ks = {p_target} reached only {:.4}",
                        labeled.achieved_pks
                    ));
                }
                if estimators.contains(&Estimator::NepRandomWalk)
                    && !labeled.graph.is_connected()
                {
                    return Err(format!(
                        "graph variant {name} is disconnected; the random-walk estimator \
                         needs a connected graph (try d_min >= 2)"
                    ));
                }
                let table = mse_experiment(
                    &labeled.graph,
                    &estimators,
                    &budgets,
                    polling.trials,
                    polling.walk_length,
                    derive_seed(config.seed, &[tag("mse"), *vi as u64, *pi as u64]),
                    SeedMode::Isolated,
                )
                .map_err(|e| e.to_string())?;
                Ok((*vi, *pi, name.clone(), *achieved_r, labeled.achieved_pks, table))
            })
            .collect();

    let mut panels = Vec::new();
    let model_tag = config.graph.model_tag();
    for result in results {
        let (vi, pi, name, achieved_r, achieved_p, table) = result?;
        let panel_name = format!("{name}_pks_{}", tagify(config.graph.p_ks[pi]));
        let mut csv = Vec::new();
        table
            .write_csv(&mut csv, &format!("g{vi}{pi}"), &model_tag, achieved_r, achieved_p)
            .map_err(|e| e.to_string())?;
        write_artifact(
            out_dir.join(format!("mse_{panel_name}.csv")),
            &String::from_utf8(csv).unwrap(),
            written,
        )?;

        let mut series = Vec::new();
        for &estimator in &estimators {
            let points: Vec<(f64, f64)> = budgets
                .iter()
                .map(|&b| (b as f64, table.row(estimator, b).unwrap().mse))
                .collect();
            series.push(Series { name: estimator.name().into(), points });
        }
        let panel = Panel {
            title: format!("r_kk = {achieved_r:.3}, p_ks = {achieved_p:.3}"),
            x_label: "budget b".into(),
            y_label: "mse".into(),
            series,
            log_y: true,
        };
        write_artifact(
            out_dir.join(format!("mse_{panel_name}.svg")),
            &render_grid(std::slice::from_ref(&panel), 1),
            written,
        )?;
        panels.push(panel);
    }
    let cols = config.graph.p_ks.len().max(1);
    write_artifact(out_dir.join("mse_grid.svg"), &render_grid(&panels, cols), written)?;

    // Mixing diagnostic for the random-walk estimator: TV distance of the
    // endpoint degree distribution against q(k), per graph variant.
    if estimators.contains(&Estimator::NepRandomWalk) {
        let mut csv = String::from("variant,walk_length,tv_distance_vs_q
");
        for (vi, (name, _, g)) in variants.iter().enumerate() {
            let tv = walk_mixing_diagnostic(
                g,
                polling.walk_length,
                20_000,
                derive_seed(config.seed, &[tag("mixing"), vi as u64]),
            );
            csv.push_str(&format!("{name},{},{tv}
", polling.walk_length));
        }
        write_artifact(out_dir.join("walk_mixing.csv"), &csv, written)?;
    }
    Ok(())
}

// --------------------------------------------------------------- reactive

fn run_reactive(
    config: &ExperimentConfig,
    out_dir: &Path,
    written: &mut Vec<PathBuf>,
) -> Result<(), String> {
    let dynamics = config.dynamics.as_ref().expect("validated");
    let spec = config.reactive.as_ref().expect("validated");
    // Label the base once, then rewire: every graph in the state space
    // shares node ids, per-node degrees, and labels.
    let base = base_graph(&config.graph, derive_seed(config.seed, &[tag("graph")]))?;
    let labeled = assign_labels(
        &base,
        config.graph.rho0,
        config.graph.p_ks.first().copied().unwrap_or(0.0),
        config.graph.label_tol,
        derive_seed(config.seed, &[tag("labels")]),
    )
    .map_err(|e| e.to_string())?;
    let variants = graph_variants_from(labeled.graph, &config.graph, config.seed)?;
    let graphs: Vec<Graph> = variants.into_iter().map(|(_, _, g)| g).collect();
    let stats0 = graphs[0].stats();
    let to_mat = |m: &Vec<Vec<f64>>| {
        Mat::from_rows(&m.to_vec())
    };
    let kernel = logistic_interpolation_kernel(
        to_mat(&spec.kernel.p_low),
        to_mat(&spec.kernel.p_high),
        spec.kernel.steepness,
        stats0.degree_dist.clone(),
    );
    let rn = ReactiveNetwork::new(graphs, kernel).map_err(|e| e.to_string())?;
    let m = rn.graphs()[0].node_count();
    let params = MfdParams {
        nu: dynamics.nu,
        delta: dynamics.delta,
        m,
        activation: diffnet::sis::Activation::UniformX,
        rule: ContagionRule::Monophilic,
    };
    let x0 = PopulationState::from_graph(&rn.graphs()[0]);
    let ode = constrained_ode_trajectory(&rn, &params, &x0, spec.sweeps)
        .map_err(|e| e.to_string())?;

    let mut csv = String::from("sweep,k,x_k,pi_residual\n");
    for (sweep, point) in ode.iter().enumerate() {
        for k in 1..=point.x.max_degree() {
            if stats0.degree_dist[k] > 0.0 {
                csv.push_str(&format!("{},{},{},{}\n", sweep, k, point.x.get(k), point.residual));
            }
        }
    }
    write_artifact(out_dir.join("reactive_ode.csv"), &csv, written)?;

    let mut cfg = SisConfig::new(dynamics.nu, dynamics.delta);
    cfg.rule = ContagionRule::Monophilic;
    cfg.neighbor_mode = dynamics.neighbor_mode.into();
    let runs: Vec<Result<diffnet::reactive::JointRun, String>> = (0..spec.seeds as u64)
        .into_par_iter()
        .map(|s| {
            simulate_joint(
                &rn,
                &cfg,
                0,
                spec.sweeps * m,
                m,
                derive_seed(config.seed, &[tag("joint"), s]),
            )
            .map_err(|e| e.to_string())
        })
        .collect();

    let mut csv = String::from("seed,sweep,graph_index,k,x_k\n");
    let mut rho_series: Vec<Vec<(f64, f64)>> = Vec::new();
    for (s, run) in runs.into_iter().enumerate() {
        let run = run?;
        let mut rho_points = Vec::new();
        for sample in &run.samples {
            let sweep = sample.tick / m;
            let mut rho = 0.0;
            for k in 1..=sample.state.max_degree() {
                if stats0.degree_dist[k] > 0.0 {
                    csv.push_str(&format!(
                        "{},{},{},{},{}\n",
                        s,
                        sweep,
                        sample.graph_index,
                        k,
                        sample.state.get(k)
                    ));
                    rho += stats0.degree_dist[k] * sample.state.get(k);
                }
            }
            rho_points.push((sweep as f64, rho));
        }
        rho_series.push(rho_points);
    }
    write_artifact(out_dir.join("reactive_sim.csv"), &csv, written)?;

    let ode_rho: Vec<(f64, f64)> = ode
        .iter()
        .enumerate()
        .map(|(sweep, point)| {
            let rho = (1..=point.x.max_degree())
                .map(|k| stats0.degree_dist[k] * point.x.get(k))
                .sum();
            (sweep as f64, rho)
        })
        .collect();
    let mut series = vec![Series { name: "constrained ODE".into(), points: ode_rho }];
    for (s, points) in rho_series.into_iter().enumerate().take(4) {
        series.push(Series { name: format!("simulation seed {s}"), points });
    }
    let panel = Panel {
        title: "reactive network: ODE vs joint simulation".into(),
        x_label: "sweep".into(),
        y_label: "infected fraction".into(),
        series,
        log_y: false,
    };
    write_artifact(out_dir.join("reactive_compare.svg"), &render_grid(&[panel], 1), written)
}

// --------------------------------------------------------------- tracking

fn run_tracking(
    config: &ExperimentConfig,
    out_dir: &Path,
    written: &mut Vec<PathBuf>,
) -> Result<(), String> {
    let dynamics = config.dynamics.as_ref().expect("validated");
    let spec = config.tracking.as_ref().expect("validated");
    let variants = graph_variants(&config.graph, config.seed)?;
    let (_, _, g) = &variants[0];
    let labeled = assign_labels(
        g,
        config.graph.rho0,
        config.graph.p_ks.first().copied().unwrap_or(0.0),
        config.graph.label_tol,
        derive_seed(config.seed, &[tag("labels")]),
    )
    .map_err(|e| e.to_string())?;
    let g = labeled.graph;

    let mut cfg = SisConfig::new(dynamics.nu, dynamics.delta);
    cfg.rule = dynamics.rule.into();
    cfg.activation = dynamics.activation.into();
    cfg.neighbor_mode = dynamics.neighbor_mode.into();
    let plan = ObservationPlan::uniform_all(&g, spec.samples_per_class);
    let opts = TrackOptions {
        substeps: spec.substeps,
        process_noise: match spec.q_mode {
            QModeSpec::Scale => QSpec::Scale(spec.q_scale),
            QModeSpec::Adaptive => QSpec::Adaptive { scale: spec.q_scale },
        },
        updates_enabled: true,
    };
    let log = track(&g, &cfg, &plan, &opts, spec.sweeps, derive_seed(config.seed, &[tag("track")]))
        .map_err(|e| e.to_string())?;

    let mut csv = Vec::new();
    log.write_csv(&mut csv).map_err(|e| e.to_string())?;
    write_artifact(
        out_dir.join("tracking_log.csv"),
        &String::from_utf8(csv).unwrap(),
        written,
    )?;

    // Plot the four most populous classes.
    let counts = g.degree_counts();
    let mut by_size: Vec<usize> = log.classes.clone();
    by_size.sort_by_key(|&k| std::cmp::Reverse(counts[k]));
    let mut panels = Vec::new();
    for &k in by_size.iter().take(4) {
        let idx = log.classes.iter().position(|&c| c == k).unwrap();
        let truth: Vec<(f64, f64)> =
            log.records.iter().map(|r| (r.sweep as f64, r.truth[idx])).collect();
        let filtered: Vec<(f64, f64)> =
            log.records.iter().map(|r| (r.sweep as f64, r.mean[idx])).collect();
        let observed: Vec<(f64, f64)> = log
            .records
            .iter()
            .filter_map(|r| r.observation[idx].map(|y| (r.sweep as f64, y)))
            .collect();
        panels.push(Panel {
            title: format!("degree class k = {k} (M(k) = {})", counts[k]),
            x_label: "sweep".into(),
            y_label: "infected fraction".into(),
            series: vec![
                Series { name: "truth".into(), points: truth },
                Series { name: "filtered mean".into(), points: filtered },
                Series { name: "observation".into(), points: observed },
            ],
            log_y: false,
        });
    }
    write_artifact(
        out_dir.join("tracking.svg"),
        &render_grid(&panels, 2),
        written,
    )?;
    let summary = format!(
        "{{\"rmse_filter\":{},\"rmse_observation\":{},\"mean_nis_per_dim\":{}}}\n",
        log.rmse_filter, log.rmse_observation, log.mean_nis_per_dim
    );
    write_artifact(out_dir.join("tracking_summary.json"), &summary, written)
}
