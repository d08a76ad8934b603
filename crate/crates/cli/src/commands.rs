use anyhow::{Context, Result};
use serde::Serialize;
use serde_json::json;

use qfern::cuts::{
    check_cheeger_inequality, check_cheeger_inequality_scaled, cheeger_constant, CheegerCheck,
    CutResult, MAX_EXACT_NODES,
};
use qfern::graph::{
    format_graph, parse_graph, random_dag, render_dot, symmetrize, DotStyle, MAX_FILE_NODES,
};
use qfern::rewire::{rewire_optimize, RewiringConfig};
use qfern::spectral::{decompose, resistance_matrix, total_effective_resistance};
use qfern::sync::{
    detect_desync_regions, einf_norm_condition, kuramoto_simulate, place_stabilizer,
    FrequencyVector, SimulationConfig, SimulationResult, SyncAnalysis, ThresholdPolicy,
};
use qfern::WeightedGraph;

use crate::output::{input, manifest_beside, prefixed, to_json, usage, Run};
use crate::{AnalyzeArgs, GenerateArgs, RewireArgs, SyncArgs};

const SYMMETRIZED_NOTE: &str = "directed input was symmetrized as (W + W^T) / 2";

/// Loads a graph file, symmetrizing directed input.
fn load_undirected(run: &mut Run, path: &std::path::Path) -> Result<(WeightedGraph, bool)> {
    let text = run.read_input(path)?;
    let g = parse_graph(&text).with_context(|| format!("parsing {}", path.display()))?;
    if g.is_directed() {
        Ok((symmetrize(&g), true))
    } else {
        Ok((g, false))
    }
}

pub fn generate(a: &GenerateArgs) -> Result<()> {
    if a.nodes > MAX_FILE_NODES {
        return Err(usage(format!(
            "node count n = {} must be <= {MAX_FILE_NODES}",
            a.nodes
        )));
    }
    let g = random_dag(a.nodes, a.prob, a.seed)?;
    let mut run = Run::new(
        "generate",
        Some(a.seed),
        json!({ "n": a.nodes, "p": a.prob, "seed": a.seed, "out": a.out.display().to_string() }),
    );
    run.write(&a.out, &format_graph(&g))?;
    run.finish(manifest_beside(&a.out))
}

#[derive(Serialize)]
struct AnalyzeReport {
    nodes: usize,
    edges: usize,
    symmetrized: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    note: Option<&'static str>,
    lambda2: f64,
    degenerate_lambda2: bool,
    eigenvalues: Vec<f64>,
    fiedler: Vec<f64>,
    /// `exact` or `sweep`; the sweep value is an upper bound on h.
    cheeger_method: &'static str,
    cheeger: CutResult,
    cheeger_inequality_ok: bool,
    cheeger_inequality: CheegerCheck,
    degree_scaled_cheeger_inequality_ok: bool,
    r_total: f64,
}

pub fn analyze(a: &AnalyzeArgs) -> Result<()> {
    let mut run = Run::new(
        "analyze",
        None,
        json!({ "graph": a.graph.display().to_string() }),
    );
    let (g, symmetrized) = load_undirected(&mut run, &a.graph)?;
    qfern::graph::require_connected(&g)?;
    let d = decompose(&g)?;
    let cut = cheeger_constant(&g)?;
    let lambda2 = d.lambda2();
    let check = check_cheeger_inequality(cut.ratio, lambda2);
    let report = AnalyzeReport {
        nodes: g.node_count(),
        edges: g.edge_count(),
        symmetrized,
        note: symmetrized.then_some(SYMMETRIZED_NOTE),
        lambda2,
        degenerate_lambda2: d.degenerate_lambda2(),
        eigenvalues: d.eigenvalues().to_vec(),
        fiedler: d.fiedler(),
        cheeger_method: if g.node_count() <= MAX_EXACT_NODES {
            "exact"
        } else {
            "sweep"
        },
        cheeger_inequality_ok: check.holds,
        cheeger_inequality: check,
        degree_scaled_cheeger_inequality_ok: check_cheeger_inequality_scaled(
            cut.ratio,
            lambda2,
            g.max_degree(),
        )
        .holds,
        cheeger: cut,
        r_total: total_effective_resistance(&resistance_matrix(&d)?),
    };
    let text = to_json(&report)?;
    match &a.out {
        Some(path) => {
            run.write(path, &text)?;
            run.finish(manifest_beside(path))
        }
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn fiedler_dot(g: &WeightedGraph) -> Result<String> {
    let values = decompose(g)?.fiedler();
    Ok(render_dot(
        g,
        &DotStyle {
            values: Some(values),
            ..DotStyle::default()
        },
    )?)
}

pub fn rewire(a: &RewireArgs) -> Result<()> {
    let config = RewiringConfig {
        alpha: a.alpha,
        gradient_mode: a.mode.into(),
        max_iterations: a.iters,
        patience: a.patience,
        seed: a.seed,
        candidate_policy: a.candidates.into(),
    };
    config.validate()?;
    let mut run = Run::new(
        "rewire",
        Some(a.seed),
        json!({
            "graph": a.graph.display().to_string(),
            "config": config,
            "out_prefix": a.out_prefix,
        }),
    );
    let (g, _) = load_undirected(&mut run, &a.graph)?;
    let report = rewire_optimize(&g, &config)?;
    let p = a.out_prefix.as_str();
    run.write(prefixed(p, "final.txt"), &format_graph(&report.final_graph))?;
    run.write(prefixed(p, "asoft.csv"), &report.asoft_csv())?;
    run.write(prefixed(p, "report.json"), &to_json(&report)?)?;
    run.write(prefixed(p, "trace.csv"), &report.trace_csv())?;
    run.write(
        prefixed(p, "before.dot"),
        &fiedler_dot(&report.initial_graph)?,
    )?;
    run.write(prefixed(p, "after.dot"), &fiedler_dot(&report.final_graph)?)?;
    run.finish(prefixed(p, "manifest.json"))
}

#[derive(Serialize)]
struct SyncOutput<'a> {
    nodes: usize,
    symmetrized: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    note: Option<&'static str>,
    omega: &'a FrequencyVector,
    #[serde(flatten)]
    analysis: &'a SyncAnalysis,
}

#[derive(Serialize)]
struct SimulationRecord {
    is_tree: bool,
    einf_norm: f64,
    predicted_locked: bool,
    config: SimulationConfig,
    result: SimulationResult,
    /// On trees the condition is exact; elsewhere it is only sufficient.
    verdicts_agree: bool,
}

pub fn sync(a: &SyncArgs) -> Result<()> {
    let policy = match (a.threshold, a.quantile) {
        (Some(t), _) => {
            if !(t.is_finite() && t >= 0.0) {
                return Err(usage(format!(
                    "threshold {t} must be finite and non-negative"
                )));
            }
            ThresholdPolicy::Absolute(t)
        }
        (None, q) => ThresholdPolicy::Quantile(q.unwrap_or(0.5)),
    };
    if !(a.weight.is_finite() && a.weight > 0.0) {
        return Err(usage(format!(
            "stabilizer weight {} must be positive",
            a.weight
        )));
    }
    let sim_config = SimulationConfig {
        dt: a.dt,
        t_max: a.t_max,
        ..SimulationConfig::default()
    };
    let mut run = Run::new(
        "sync",
        a.omega_seed,
        json!({
            "graph": a.graph.display().to_string(),
            "omega": a.omega.as_ref().map(|p| p.display().to_string()),
            "omega_seed": a.omega_seed,
            "policy": policy,
            "k": a.k,
            "weight": a.weight,
            "simulate": a.simulate,
            "simulation": sim_config,
            "out_prefix": a.out_prefix,
        }),
    );
    let (g, symmetrized) = load_undirected(&mut run, &a.graph)?;
    let n = g.node_count();
    if a.k < 2 || a.k > n {
        return Err(usage(format!(
            "fan-out k = {} must satisfy 2 <= k <= {n}",
            a.k
        )));
    }
    let omega = match (&a.omega, a.omega_seed) {
        (Some(path), _) => {
            let text = run.read_input(path)?;
            let omega = FrequencyVector::parse(&text)
                .with_context(|| format!("parsing {}", path.display()))?;
            if omega.len() != n {
                return Err(input(format!(
                    "{} has {} frequencies for a graph with {n} nodes",
                    path.display(),
                    omega.len()
                )));
            }
            omega
        }
        (None, Some(seed)) => FrequencyVector::random(n, seed)?,
        (None, None) => return Err(usage("one of --omega or --omega-seed is required")),
    };

    let analysis = einf_norm_condition(&g, &omega)?;
    let report = detect_desync_regions(&g, &omega, policy)?;
    let p = a.out_prefix.as_str();
    let sync_out = SyncOutput {
        nodes: n,
        symmetrized,
        note: symmetrized.then_some(SYMMETRIZED_NOTE),
        omega: &omega,
        analysis: &analysis,
    };
    run.write(prefixed(p, "sync.json"), &to_json(&sync_out)?)?;
    run.write(prefixed(p, "desync.json"), &to_json(&report)?)?;
    run.write(prefixed(p, "flagged.csv"), &report.flagged_csv())?;
    run.write(
        prefixed(p, "before.dot"),
        &render_dot(
            &g,
            &DotStyle {
                values: Some(analysis.x.clone()),
                highlighted: report.flagged_nodes.clone(),
                stabilizer: None,
            },
        )?,
    )?;

    if report.is_empty() {
        eprintln!(
            "qfern: no pairs above threshold {}; stabilizer skipped",
            report.threshold
        );
    } else {
        let s = place_stabilizer(&g, &report, a.k, a.weight)?;
        run.write(prefixed(p, "stabilized.txt"), &format_graph(&s.graph))?;
        run.write(prefixed(p, "stabilizer.json"), &to_json(&s)?)?;
        run.write(
            prefixed(p, "after.dot"),
            &render_dot(
                &s.graph,
                &DotStyle {
                    values: None,
                    highlighted: report.flagged_nodes.clone(),
                    stabilizer: Some(s.stabilizer),
                },
            )?,
        )?;
    }

    if a.simulate {
        let result = kuramoto_simulate(&g, &omega, &vec![0.0; n], &sim_config)?;
        let record = SimulationRecord {
            is_tree: g.edge_count() + 1 == n,
            einf_norm: analysis.einf_norm,
            predicted_locked: analysis.stable,
            config: sim_config,
            verdicts_agree: result.locked == analysis.stable,
            result,
        };
        run.write(prefixed(p, "simulation.json"), &to_json(&record)?)?;
    }
    run.finish(prefixed(p, "manifest.json"))
}
