//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! nonzero if any criterion fails.

mod common;

use std::time::Instant;

use num_complex::Complex64;
use rand::Rng;
use slnr_core::channel::{
    complex_gaussian, generate_channels, ChannelSet, ObjectiveNoise, ReceiverKind, Scheme, SystemConfig,
};
use slnr_core::cli::format_samples;
use slnr_core::metrics::{
    effective_layer_sinr, evaluate_layer_slnr, evaluate_receiver_aware_user_slnr, evaluate_user_slnr, to_db,
};
use slnr_core::numerics::{generalized_eig_top, mat_vec, norm, row_times, ComplexMatrix};
use slnr_core::precoders::{
    build_user_leakage, layer_objective_noise, layer_slnr_precoder, slnr_user_precoder, PrecoderSet,
};
use slnr_core::receivers::{compute_receivers, ReceiverSet};
use slnr_core::sim::{compare_schemes_with, Execution, PairedReport};

use common::*;

const DROPS: usize = 10_000;

struct Suite {
    failed: Vec<String>,
}

impl Suite {
    fn record(&mut self, id: &str, title: &str, pass: bool, detail: String) {
        println!("{} [{id}] {title}: {detail}", if pass { "PASS" } else { "FAIL" });
        if !pass {
            self.failed.push(id.to_string());
        }
    }
}

fn reference(receiver: ReceiverKind, drops: usize) -> SystemConfig {
    let mut c = SystemConfig::reference(Scheme::LayerSlnr, receiver);
    c.drops = drops;
    c
}

fn gap_line(report: &PairedReport, ps: &[f64]) -> String {
    ps.iter()
        .map(|&p| format!("p{:.0} {:+.3} dB", p * 100.0, report.percentile_gap(p)))
        .collect::<Vec<_>>()
        .join(", ")
}

fn within(x: f64, centre: f64, tol: f64) -> bool {
    (x - centre).abs() <= tol
}

/// 95% paired bootstrap lower bound on the mean per-drop delta.
fn bootstrap_lower_bound(report: &PairedReport, resamples: usize) -> f64 {
    let per_layer = report.deltas.len() / report.original.summary.drops;
    let per_drop: Vec<f64> = report
        .deltas
        .chunks(per_layer)
        .map(|c| c.iter().map(|d| d.delta_db).sum::<f64>() / per_layer as f64)
        .collect();
    let n = per_drop.len();
    let mut rng = rng(2024);
    let mut means: Vec<f64> = (0..resamples)
        .map(|_| (0..n).map(|_| per_drop[rng.random_range(0..n)]).sum::<f64>() / n as f64)
        .collect();
    means.sort_by(f64::total_cmp);
    means[(0.025 * resamples as f64) as usize]
}

fn criterion_gaps(suite: &mut Suite, mf: &PairedReport, mmse: &PairedReport) {
    let median = mf.percentile_gap(0.5);
    let p90 = mf.percentile_gap(0.9);
    suite.record(
        "1",
        "MF layer-vs-original gap, 10000 paired drops",
        within(median, 1.0, 0.5) && p90 >= 0.5,
        format!("{} (median 1.0 ± 0.5, p90 ≥ 0.5)", gap_line(mf, &[0.5, 0.9])),
    );
    let lower = bootstrap_lower_bound(mf, 2000);
    suite.record(
        "1b",
        "MF mean paired delta > 0 at 95% bootstrap confidence",
        lower > 0.0,
        format!("mean {:+.3} dB, 2.5% bound {lower:+.3} dB", mf.mean_delta()),
    );
    let p25 = mmse.percentile_gap(0.25);
    let p50 = mmse.percentile_gap(0.5);
    suite.record(
        "2",
        "MMSE layer-vs-original gap, 10000 paired drops",
        within(p25, 1.5, 0.5) && within(p50, 1.5, 0.5),
        format!("{} (each 1.5 ± 0.5)", gap_line(mmse, &[0.25, 0.5])),
    );
}

fn criterion_eigensolver(suite: &mut Suite) {
    let mut rng = rng(3);
    let (mut worst_residual, mut worst_margin) = (0.0f64, f64::INFINITY);
    let mut ok = true;
    for instance in 0..1000 {
        let n = 1 + instance % 10;
        let rank = rng.random_range(1..=n);
        let scale = 10f64.powf(rng.random_range(-1.0..1.0));
        let a = random_psd(&mut rng, n, rank).scale_real(scale);
        let shift = rng.random_range(0.1..2.0);
        let b = random_pd(&mut rng, n, shift);
        let pairs = generalized_eig_top(&a, &b, n).unwrap();
        for p in &pairs {
            let bound = a.frobenius_norm() + p.value.abs() * b.frobenius_norm();
            let r = residual(&a, &b, p.value, &p.vector) / bound;
            worst_residual = worst_residual.max(r);
            ok &= r <= 1e-10 && (norm(&p.vector) - 1.0).abs() <= 1e-12;
        }
        let best = random_search_max(&mut rng, &a, &b, 100_000);
        let top = quotient(&a, &b, &pairs[0].vector);
        worst_margin = worst_margin.min(top - best);
        ok &= top >= best - 1e-9;
    }
    suite.record(
        "3",
        "generalized eigensolver on 1000 random pairs up to 10x10",
        ok,
        format!("max scaled residual {worst_residual:.2e} (≤ 1e-10), min top-minus-search margin {worst_margin:.3e}"),
    );
}

/// A random instance: pipeline channels, realistic or random combiners.
fn instance(c: &SystemConfig, drop: u64, rng: &mut impl Rng) -> (ChannelSet, PrecoderSet, ReceiverSet) {
    let ch = generate_channels(c, drop);
    let p = slnr_user_precoder(&ch, c).unwrap();
    let rx = if drop.is_multiple_of(2) {
        compute_receivers(c.receiver, &ch, &p, c.noise_var).unwrap()
    } else {
        ReceiverSet {
            u: (0..c.users).map(|k| gaussian(rng, c.layers[k], c.rx_antennas[k])).collect(),
        }
    };
    (ch, p, rx)
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(1e-300)
}

fn criterion_formulas(suite: &mut Suite) {
    let mut rng = rng(4);
    let mut worst = [0.0f64; 4];
    let mut count = 0;
    for (i, receiver) in [ReceiverKind::MatchedFilter, ReceiverKind::Mmse].into_iter().enumerate() {
        for noise in [ObjectiveNoise::CombinerWeighted, ObjectiveNoise::Printed] {
            let mut c = reference(receiver, 1);
            c.objective_noise = noise;
            for drop in 1..=60u64 {
                c.noise_var = [0.2, 1.0, 4.0][drop as usize % 3];
                let (ch, p, rx) = instance(&c, drop + 1000 * i as u64, &mut rng);
                count += 1;
                for k in 0..c.users {
                    let l_k = c.layers[k] as f64;
                    // Two lines of the per-user SLNR with unit-norm precoder columns.
                    let v = &p.v[k];
                    let line1 = (ch.h[k].matmul(v).frobenius_norm_sqr() / l_k)
                        / (c.rx_antennas[k] as f64 * c.noise_var
                            + (0..c.users)
                                .filter(|&j| j != k)
                                .map(|j| ch.h[j].matmul(v).frobenius_norm_sqr() / l_k)
                                .sum::<f64>());
                    let line2 =
                        evaluate_user_slnr(&ch.h[k], &build_user_leakage(&ch, k), v, c.rx_antennas[k], c.noise_var);
                    worst[0] = worst[0].max(rel(line1, line2));

                    for l in 0..c.layers[k] {
                        let cand = unit_vector(&mut rng, c.n_tx);
                        let mut vk = p.v[k].clone();
                        vk.set_column(l, &cand);
                        let rho = layer_objective_noise(&c, &rx, k, l);
                        let eq7 = evaluate_layer_slnr(&ch, &rx, &cand, &c, k, l);

                        // Elementwise form: entries of U_k H_k V_k and U_i H_i V_k.
                        let own = rx.u[k].matmul(&ch.h[k]).matmul(&vk);
                        let mut denom = rho * norm(&cand).powi(2);
                        for d in 0..c.layers[k] {
                            if d != l {
                                denom += own[(d, l)].norm_sqr();
                            }
                        }
                        for j in (0..c.users).filter(|&j| j != k) {
                            let t = rx.u[j].matmul(&ch.h[j]).matmul(&vk);
                            for d in 0..c.layers[j] {
                                denom += t[(d, l)].norm_sqr();
                            }
                        }
                        let eq6 = own[(l, l)].norm_sqr() / denom;
                        worst[1] = worst[1].max(rel(eq6, eq7));

                        // Stacked-leakage quotient built from scratch.
                        let g = ComplexMatrix::from_fn(1, c.n_tx, |_, n| row_times(rx.row(k, l), &ch.h[k])[n]);
                        let mut rows: Vec<Vec<Complex64>> = Vec::new();
                        for d in (0..c.layers[k]).filter(|&d| d != l) {
                            rows.push(row_times(rx.row(k, d), &ch.h[k]));
                        }
                        for j in (0..c.users).filter(|&j| j != k) {
                            for d in 0..c.layers[j] {
                                rows.push(row_times(rx.row(j, d), &ch.h[j]));
                            }
                        }
                        let gbar = ComplexMatrix::from_fn(rows.len(), c.n_tx, |r, n| rows[r][n]);
                        let b = ComplexMatrix::scaled_identity(c.n_tx, rho).add(&gbar.gram());
                        let rq = quotient(&g.gram(), &b, &cand);
                        worst[2] = worst[2].max(rel(rq, eq7));
                    }
                }
                // Solver eigenvalue against the objective at the returned vector.
                let q = layer_slnr_precoder(&ch, &rx, &c).unwrap();
                for k in 0..c.users {
                    for l in 0..c.layers[k] {
                        let val = evaluate_layer_slnr(&ch, &rx, &q.column(k, l), &c, k, l);
                        worst[3] = worst[3].max((val - q.values[k][l]).abs() / val.max(1.0));
                    }
                }
            }
        }
    }
    let ok = worst[0] <= 1e-12 && worst[1] <= 1e-12 && worst[2] <= 1e-12 && worst[3] <= 1e-9;
    suite.record(
        "4",
        &format!("formula equivalences over {count} random instances"),
        ok,
        format!(
            "user SLNR forms {:.1e}, elementwise vs partitioned {:.1e}, partitioned vs stacked quotient {:.1e} (each ≤ 1e-12); eigenvalue vs objective {:.1e} (≤ 1e-9)",
            worst[0], worst[1], worst[2], worst[3]
        ),
    );
}

fn criterion_single_layer(suite: &mut Suite) {
    let mut worst = 0.0f64;
    let mut count = 0;
    for receiver in [ReceiverKind::MatchedFilter, ReceiverKind::Mmse] {
        for noise in [ObjectiveNoise::CombinerWeighted, ObjectiveNoise::Printed] {
            let mut c = reference(receiver, 1);
            c.layers = vec![1; 3];
            c.objective_noise = noise;
            for drop in 1..=50 {
                let ch = generate_channels(&c, drop);
                let v0 = slnr_user_precoder(&ch, &c).unwrap();
                let rx = compute_receivers(receiver, &ch, &v0, c.noise_var).unwrap();
                let v1 = layer_slnr_precoder(&ch, &rx, &c).unwrap();
                for p in [&v0, &v1] {
                    for k in 0..c.users {
                        let layer = evaluate_layer_slnr(&ch, &rx, &p.column(k, 0), &c, k, 0);
                        let user = evaluate_receiver_aware_user_slnr(&ch, &rx, &p.v[k], &c, k);
                        worst = worst.max(rel(layer, user));
                        count += 1;
                    }
                }
            }
        }
    }
    suite.record(
        "5",
        "single-layer reduction (L_k = 1): layer objective equals receiver-aware user SLNR",
        worst <= 1e-10,
        format!("{count} comparisons, max relative difference {worst:.1e} (≤ 1e-10)"),
    );
}

/// Realized power ratio at every combiner output over `symbols` transmissions.
fn monte_carlo_sinr(
    c: &SystemConfig,
    ch: &ChannelSet,
    p: &PrecoderSet,
    rx: &ReceiverSet,
    symbols: usize,
    rng: &mut impl Rng,
) -> Vec<f64> {
    let layers = c.total_layers();
    let gains: Vec<Complex64> = (0..c.users)
        .flat_map(|k| (0..c.layers[k]).map(move |l| (k, l)))
        .map(|(k, l)| row_times(rx.row(k, l), &ch.h[k]).iter().zip(p.v[k].column(l)).map(|(a, b)| a * b).sum())
        .collect();
    let sigma = c.noise_var.sqrt();
    let mut desired = vec![0.0; layers];
    let mut rest = vec![0.0; layers];
    let mut s: Vec<Vec<Complex64>> = c.layers.iter().map(|&l| vec![Complex64::new(0.0, 0.0); l]).collect();
    for _ in 0..symbols {
        let mut x = vec![Complex64::new(0.0, 0.0); c.n_tx];
        for (k, sk) in s.iter_mut().enumerate() {
            let amp = (1.0 / c.layers[k] as f64).sqrt();
            for z in sk.iter_mut() {
                *z = complex_gaussian(rng) * amp;
            }
            for (xi, vi) in x.iter_mut().zip(mat_vec(&p.v[k], sk)) {
                *xi += vi;
            }
        }
        let mut j = 0;
        for k in 0..c.users {
            let mut y = mat_vec(&ch.h[k], &x);
            for z in y.iter_mut() {
                *z += complex_gaussian(rng) * sigma;
            }
            let est = mat_vec(&rx.u[k], &y);
            for (l, e) in est.iter().enumerate() {
                let d = gains[j] * s[k][l];
                desired[j] += d.norm_sqr();
                rest[j] += (e - d).norm_sqr();
                j += 1;
            }
        }
    }
    desired.iter().zip(&rest).map(|(d, r)| to_db(d / r)).collect()
}

fn criterion_monte_carlo(suite: &mut Suite) {
    let mut rng = rng(6);
    let mut worst = 0.0f64;
    for i in 0..20u64 {
        let receiver = if i % 2 == 0 { ReceiverKind::MatchedFilter } else { ReceiverKind::Mmse };
        let mut c = reference(receiver, 1);
        c.noise_var = [0.5, 1.0, 2.0][i as usize % 3];
        let ch = generate_channels(&c, 500 + i);
        let mut p = slnr_user_precoder(&ch, &c).unwrap();
        let mut rx = compute_receivers(receiver, &ch, &p, c.noise_var).unwrap();
        if i % 4 >= 2 {
            p = layer_slnr_precoder(&ch, &rx, &c).unwrap();
            rx = compute_receivers(receiver, &ch, &p, c.noise_var).unwrap();
        }
        let mc = monte_carlo_sinr(&c, &ch, &p, &rx, 1_000_000, &mut rng);
        let mut j = 0;
        for k in 0..c.users {
            for l in 0..c.layers[k] {
                let analytic = effective_layer_sinr(&ch, &p, &rx, &c, k, l);
                worst = worst.max((analytic - mc[j]).abs());
                j += 1;
            }
        }
    }
    suite.record(
        "6",
        "analytic layer SINR vs 10^6-symbol Monte Carlo on 20 instances",
        worst <= 0.05,
        format!("max |difference| {worst:.4} dB (≤ 0.05)"),
    );
}

fn criterion_determinism(suite: &mut Suite, mf: &PairedReport) {
    let csv = |r: &PairedReport| (format_samples(&r.original.samples), format_samples(&r.layer.samples));
    let first = csv(mf);
    let serial = compare_schemes_with(&reference(ReceiverKind::MatchedFilter, DROPS), Execution::Serial).unwrap();
    let full_ok = first == csv(&serial) && mf.deltas == serial.deltas;

    // A multi-threaded pool exercises out-of-order completion even on one core.
    let small = reference(ReceiverKind::Mmse, 500);
    let pool = rayon::ThreadPoolBuilder::new().num_threads(4).build().unwrap();
    let threaded = pool.install(|| compare_schemes_with(&small, Execution::Parallel)).unwrap();
    let single = compare_schemes_with(&small, Execution::Serial).unwrap();
    let pool_ok = csv(&threaded) == csv(&single);
    suite.record(
        "7",
        "campaign CSV is byte-identical across runs and execution modes",
        full_ok && pool_ok,
        format!(
            "full MF campaign parallel vs serial: {}; 500-drop MMSE on 4 threads vs serial: {}",
            if full_ok { "identical" } else { "DIFFERENT" },
            if pool_ok { "identical" } else { "DIFFERENT" }
        ),
    );
}

fn criterion_zero_iterations(suite: &mut Suite) {
    let mut ok = true;
    let mut rows = 0;
    for receiver in [ReceiverKind::MatchedFilter, ReceiverKind::Mmse] {
        let mut c = reference(receiver, DROPS);
        c.feedback_iters = 0;
        let r = compare_schemes_with(&c, Execution::Parallel).unwrap();
        rows += r.deltas.len();
        ok &= r.deltas.len() == DROPS * c.total_layers();
        ok &= r.deltas.iter().all(|d| d.delta_db == 0.0);
        ok &= r
            .original
            .samples
            .iter()
            .zip(&r.layer.samples)
            .all(|(a, b)| a.sinr_db.to_bits() == b.sinr_db.to_bits());
    }
    suite.record(
        "8",
        "feedback_iters = 0 gives identical schemes under paired seeds",
        ok,
        format!("{rows} deltas across MF and MMSE, all exactly zero: {ok}"),
    );
}

fn main() {
    let start = Instant::now();
    let mut suite = Suite { failed: Vec::new() };

    let mf = compare_schemes_with(&reference(ReceiverKind::MatchedFilter, DROPS), Execution::Parallel).unwrap();
    let mmse = compare_schemes_with(&reference(ReceiverKind::Mmse, DROPS), Execution::Parallel).unwrap();
    criterion_gaps(&mut suite, &mf, &mmse);
    criterion_eigensolver(&mut suite);
    criterion_formulas(&mut suite);
    criterion_single_layer(&mut suite);
    criterion_monte_carlo(&mut suite);
    criterion_determinism(&mut suite, &mf);
    criterion_zero_iterations(&mut suite);

    println!("acceptance finished in {:.1} s", start.elapsed().as_secs_f64());
    if !suite.failed.is_empty() {
        println!("FAILED criteria: {}", suite.failed.join(", "));
        std::process::exit(1);
    }
}
