use std::path::Path;

use qmflab::fixtures;
use qmflab::netgraph::{classify_case, load_network, min_cut};
use qmflab::numeric::rng::{experiment_id, stream_rng, SHARED_VERTEX};
use qmflab::numeric::{
    chgue_baseline, contract_network, kron_compose, mc_moment, numerical_rank, sample_operator, sample_tensor,
    spectrum as svd_spectrum, DenseTensor, Normalization, OperatorMatrix, RankReport, TensorAssignment, Verdict,
};
use qmflab::wick::{enumerate_moment, enumerate_product_moment, Ensemble};
use qmflab::TensorNetworkGraph;
use rayon::prelude::*;
use serde_json::{json, Value};

use crate::error::CliError;
use crate::output::{emit_csv, emit_json};
use crate::{
    KronCheckArgs, MomentsExactArgs, MomentsMcArgs, NetworkArg, NormalizationArg, OutputArgs, RankScanArgs,
    SpectrumArgs,
};

/// A path to a network file, or the name of a shipped fixture.
fn load(spec: &str) -> Result<TensorNetworkGraph, CliError> {
    let path = Path::new(spec);
    if path.exists() {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Validation(format!("{}: {e}", path.display())))?;
        return load_network(&text).map_err(|e| CliError::Validation(format!("{}: {e}", path.display())));
    }
    fixtures::by_name(spec)
        .ok_or_else(|| CliError::Validation(format!("{spec}: no such file and no built-in network of that name")))
}

fn set_jobs(out: &OutputArgs) {
    if let Some(j) = out.jobs {
        // fails only if a pool already exists, in which case it is kept
        let _ = rayon::ThreadPoolBuilder::new().num_threads(j.max(1)).build_global();
    }
}

fn vertex_ids(g: &TensorNetworkGraph, idx: impl IntoIterator<Item = usize>) -> Vec<String> {
    idx.into_iter().map(|v| g.vertices()[v].id.clone()).collect()
}

fn fmt(x: f64) -> String {
    format!("{x:e}")
}

pub fn validate(a: &NetworkArg) -> Result<(), CliError> {
    let g = load(&a.network)?;
    let connected = g.is_connected_network();
    let report = json!({
        "valid": true,
        "connected": connected,
        "vertices": g.num_vertices(),
        "edges": g.num_edges(),
        "inputs": g.num_inputs(),
        "outputs": g.num_outputs(),
        "identity_edges": g.num_identity_edges(),
        "uniform_degree": g.uniform_degree(),
    });
    emit_json(&a.output, json!({"command": "validate", "network": g.name()}), report)?;
    if !connected {
        eprintln!("warning: {} is not connected: every vertex must be connected to some open edge", g.name());
        return Err(CliError::Validation(format!("{} is not connected", g.name())));
    }
    Ok(())
}

pub fn mincut(a: &NetworkArg) -> Result<(), CliError> {
    let g = load(&a.network)?;
    let m = min_cut(&g);
    let paths: Vec<Value> = m
        .paths
        .paths
        .iter()
        .map(|p| json!({"edges": p.edges, "vertices": vertex_ids(&g, p.vertices.iter().copied())}))
        .collect();
    let body = json!({
        "mc": m.value,
        "cut": {
            "sbar": vertex_ids(&g, m.cut.sbar.iter().copied()),
            "tbar": vertex_ids(&g, m.cut.tbar.iter().copied()),
            "cut_set": m.cut.cut_set,
        },
        "paths": paths,
        "case": classify_case(&g),
    });
    emit_json(&a.output, json!({"command": "mincut", "network": g.name()}), body)
}

pub fn moments_exact(a: &MomentsExactArgs) -> Result<(), CliError> {
    set_jobs(&a.net.output);
    let g = load(&a.net.network)?;
    let ens: Ensemble = a.ensemble.into();
    let poly = match &a.product {
        Some(ks) => enumerate_product_moment(&g, ks, ens)?,
        None => {
            let p = enumerate_moment(&g, a.k, ens)?;
            if g.is_connected_network() {
                let mc = min_cut(&g).value;
                let formula = a.k * g.num_edges() - (a.k - 1) * mc;
                if p.c_max != formula {
                    return Err(CliError::Lemma(format!(
                        "{} at k={}: leading exponent {} but k|E| - (k-1)MC = {formula}",
                        g.name(),
                        a.k,
                        p.c_max
                    )));
                }
            }
            p
        }
    };
    let config = json!({
        "command": "moments-exact",
        "network": g.name(),
        "k": poly.k,
        "factors": poly.factors,
        "ensemble": ens,
    });
    emit_json(&a.net.output, config, serde_json::to_value(&poly).expect("polynomial serializes"))
}

pub fn moments_mc(a: &MomentsMcArgs) -> Result<(), CliError> {
    set_jobs(&a.net.output);
    let g = load(&a.net.network)?;
    let ens: Ensemble = a.ensemble.into();
    let est = mc_moment::<f64>(&g, a.k, a.n, a.samples, ens, a.seed)?;
    let config = json!({
        "command": "moments-mc",
        "network": g.name(),
        "k": a.k,
        "N": a.n,
        "samples": a.samples,
        "ensemble": ens,
        "seed": a.seed,
    });
    emit_json(&a.net.output, config, json!({"mean": est.mean, "stderr": est.stderr}))
}

const SPECTRUM_HEADER: &str = "index,sigma,sigma_normalized";

pub fn spectrum(a: &SpectrumArgs) -> Result<(), CliError> {
    set_jobs(&a.output);
    if let Some(n) = a.chgue {
        let mut rng = stream_rng(a.seed, experiment_id("chgue"), n as u64, 0);
        let s = chgue_baseline::<f64, _>(n, &mut rng)?;
        let rows: Vec<String> = s
            .singular_values
            .iter()
            .enumerate()
            .map(|(i, &x)| format!("{i},{},{}", fmt(x * s.divisor), fmt(x)))
            .collect();
        let meta = [
            ("command", "spectrum".to_string()),
            ("network", "chgue".to_string()),
            ("N", n.to_string()),
            ("seed", a.seed.to_string()),
            ("ensemble", "chgue".to_string()),
            ("normalization", "k".to_string()),
            ("divisor", fmt(s.divisor)),
        ];
        return emit_csv(&a.output, &meta, SPECTRUM_HEADER, &rows);
    }
    let g = load(a.network.as_deref().expect("clap requires --network"))?;
    let n = a.n.expect("clap requires --N");
    let ens: Ensemble = a.ensemble.into();
    eprintln!("spectrum: contracting {} at N={n}", g.name());
    let l = sample_operator::<f64>(&g, n, ens, a.seed, experiment_id("spectrum"), 0)?;
    eprintln!("spectrum: {} x {} SVD", l.rows, l.cols);
    let norm = match a.normalization {
        NormalizationArg::K => Normalization::K,
        NormalizationArg::Raw => Normalization::Raw,
    };
    let s = svd_spectrum(&l, norm)?;
    let rows: Vec<String> = s
        .singular_values
        .iter()
        .enumerate()
        .map(|(i, &x)| format!("{i},{},{}", fmt(x * s.divisor), fmt(x)))
        .collect();
    let meta = [
        ("command", "spectrum".to_string()),
        ("network", g.name().to_string()),
        ("N", n.to_string()),
        ("seed", a.seed.to_string()),
        ("ensemble", ens.to_string()),
        ("normalization", serde_json::to_value(norm).expect("serializes").as_str().unwrap_or("").to_string()),
        ("divisor", fmt(s.divisor)),
        ("mc", s.mc.to_string()),
        ("qmc", s.qmc().to_string()),
    ];
    emit_csv(&a.output, &meta, SPECTRUM_HEADER, &rows)
}

struct ScanRow {
    n: usize,
    seed: u64,
    qmc: usize,
    report: RankReport,
    min_sigma: f64,
    next_sigma: f64,
}

pub fn rank_scan(a: &RankScanArgs) -> Result<(), CliError> {
    set_jobs(&a.net.output);
    let g = load(&a.net.network)?;
    let ens: Ensemble = a.ensemble.into();
    let mc = min_cut(&g).value;
    let exp = experiment_id("rank_scan");
    let (lo, hi) = a.n_range;
    let tasks: Vec<(usize, u64)> = (lo..=hi)
        .flat_map(|n| (0..a.samples as u64).map(move |s| (n, a.seed + s)))
        .collect();
    let mut rows = tasks
        .par_iter()
        .map(|&(n, seed)| -> Result<ScanRow, CliError> {
            let l = sample_operator::<f64>(&g, n, ens, seed, exp, 0)?;
            let s = svd_spectrum(&l, Normalization::Raw)?;
            let report = numerical_rank(&s, a.abs_floor, a.rel_floor);
            let v = &s.singular_values;
            let min_sigma = v.last().copied().unwrap_or(0.0);
            let next_sigma = v.len().checked_sub(2).map(|i| v[i]).unwrap_or(f64::NAN);
            eprintln!("rank-scan: N={n} seed={seed} rank={} ({:?})", report.rank, report.verdict);
            Ok(ScanRow {
                n,
                seed,
                qmc: s.qmc(),
                report,
                min_sigma,
                next_sigma,
            })
        })
        .collect::<Result<Vec<_>, _>>()?;
    rows.sort_by_key(|r| (r.n, r.seed));

    let mut meta = vec![
        ("command", "rank-scan".to_string()),
        ("network", g.name().to_string()),
        ("N_range", format!("{lo}..{hi}")),
        ("samples", a.samples.to_string()),
        ("seed", a.seed.to_string()),
        ("ensemble", ens.to_string()),
        ("abs_floor", fmt(a.abs_floor)),
        ("rel_floor", fmt(a.rel_floor)),
        ("mc", mc.to_string()),
    ];
    for r in rows.iter().filter(|r| r.report.verdict == Verdict::Ambiguous) {
        meta.push((
            "ambiguous",
            format!("N={} seed={} gap_ratio={}", r.n, r.seed, fmt(r.report.gap_ratio)),
        ));
    }
    let lines: Vec<String> = rows
        .iter()
        .map(|r| {
            format!(
                "{},{},{},{},{},{},{}",
                r.n,
                r.n % 4,
                r.qmc,
                r.report.rank,
                r.qmc as i64 - r.report.rank as i64,
                fmt(r.min_sigma),
                fmt(r.next_sigma)
            )
        })
        .collect();
    emit_csv(&a.net.output, &meta, "N,N_mod_4,qmc,rank,deficit,min_sigma,next_sigma", &lines)
}

fn draw_tensors(
    g: &TensorNetworkGraph,
    n: usize,
    ens: Ensemble,
    seed: u64,
    exp: u64,
    sample: u64,
) -> Result<Vec<DenseTensor<f64>>, CliError> {
    match ens {
        Ensemble::Identical => {
            let d = g.uniform_degree().ok_or_else(|| {
                CliError::Validation("the identical ensemble needs every vertex to have the same degree".into())
            })?;
            Ok(vec![sample_tensor(n, d, &mut stream_rng(seed, exp, sample, SHARED_VERTEX))?])
        }
        Ensemble::Independent => Ok(g
            .vertices()
            .iter()
            .enumerate()
            .map(|(v, x)| sample_tensor(n, x.degree, &mut stream_rng(seed, exp, sample, v as u64)))
            .collect::<Result<_, _>>()?),
    }
}

fn contract(
    g: &TensorNetworkGraph,
    ens: Ensemble,
    ts: &[DenseTensor<f64>],
    n: usize,
) -> Result<OperatorMatrix<f64>, CliError> {
    let assignment = match ens {
        Ensemble::Identical => TensorAssignment::Identical(&ts[0]),
        Ensemble::Independent => TensorAssignment::Independent(ts),
    };
    Ok(contract_network(g, assignment, n)?)
}

pub fn kron_check(a: &KronCheckArgs) -> Result<(), CliError> {
    set_jobs(&a.net.output);
    let g = load(&a.net.network)?;
    let ens: Ensemble = a.ensemble.into();
    let exp = experiment_id("kron_check");
    let t1 = draw_tensors(&g, a.n1, ens, a.seed, exp, 0)?;
    let t2 = draw_tensors(&g, a.n2, ens, a.seed, exp, 1)?;
    let t12 = t1
        .iter()
        .zip(&t2)
        .map(|(x, y)| kron_compose(x, y))
        .collect::<Result<Vec<_>, _>>()?;
    let rank = |l: &OperatorMatrix<f64>| -> Result<RankReport, CliError> {
        Ok(numerical_rank(&svd_spectrum(l, Normalization::Raw)?, a.abs_floor, a.rel_floor))
    };
    let r1 = rank(&contract(&g, ens, &t1, a.n1)?)?;
    let r2 = rank(&contract(&g, ens, &t2, a.n2)?)?;
    let r12 = rank(&contract(&g, ens, &t12, a.n1 * a.n2)?)?;
    let product = r1.rank * r2.rank;
    let holds = r12.rank >= product;
    let config = json!({
        "command": "kron-check",
        "network": g.name(),
        "N1": a.n1,
        "N2": a.n2,
        "ensemble": ens,
        "seed": a.seed,
        "abs_floor": a.abs_floor,
        "rel_floor": a.rel_floor,
    });
    let body = json!({
        "rank_n1": r1.rank,
        "rank_n2": r2.rank,
        "rank_composed": r12.rank,
        "product_of_ranks": product,
        "holds": holds,
        "verdicts": [r1.verdict, r2.verdict, r12.verdict],
    });
    emit_json(&a.net.output, config, body)?;
    if !holds {
        return Err(CliError::Lemma(format!(
            "rank at N={} is {} < {} * {}",
            a.n1 * a.n2,
            r12.rank,
            r1.rank,
            r2.rank
        )));
    }
    Ok(())
}
