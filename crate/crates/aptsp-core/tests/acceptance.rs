//! Acceptance suite: every release criterion as one test, each printing a
//! PASS line with the measured quantities (visible with `--nocapture`).
//!
//! Tolerances and thresholds are pinned in code; brute-force oracles are
//! independent re-implementations living in this file where feasible.

use rand::prelude::*;
use rand_chacha::ChaCha12Rng;

/// Criteria run one at a time so each measures its standalone runtime
/// against its budget, independent of the test harness's parallelism.
static SERIAL: std::sync::Mutex<()> = std::sync::Mutex::new(());

fn run_serially() -> std::sync::MutexGuard<'static, ()> {
    SERIAL.lock().unwrap_or_else(|poisoned| poisoned.into_inner())
}

use aptsp_core::apriori::{
    derandomized_master_route, normalize_instance, run_sampling_algorithm, SamplingPolicy,
};
use aptsp_core::eval::{
    brute_force_opt, exhaustive_sampled_mr_expectation, expected_cost_bruteforce,
    expected_cost_monte_carlo, expected_tour_cost_exact,
};
use aptsp_core::lowerbound::{mrr_lb_ratio, optimize_gamma_sigma, MrrLbParams};
use aptsp_core::lp::{
    bound_from_primal, build_mrr_dual, build_mrr_lp, build_sampling_dual, build_sampling_lp,
    compute_delta_terms, rationalize_mrr_certificate, rationalize_sampling_certificate,
    verify_mrr_certificate, verify_sampling_certificate, MrrCertConfig, MrrLpConfig,
    SamplingCertConfig, SamplingLpConfig, Verdict, DEFAULT_SAFETY,
};
use aptsp_core::tsp::{christofides, double_tree, held_karp, subtour_lp_value};
use aptsp_core::{Instance, Tour, TspKind};

fn random_instance(n: usize, seed: u64, depot: Option<usize>) -> Instance {
    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    let pts: Vec<(f64, f64)> = (0..n)
        .map(|_| (rng.random_range(0.0..100.0), rng.random_range(0.0..100.0)))
        .collect();
    let mut p: Vec<f64> = (0..n).map(|_| rng.random_range(0.05..1.0)).collect();
    if let Some(d) = depot {
        p[d] = 1.0;
    }
    Instance::from_points(&pts, p, depot).unwrap()
}

fn random_tour(n: usize, seed: u64) -> Tour {
    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(&mut rng);
    Tour::new(order)
}

/// Criterion 1: exact evaluator ≡ brute force within 1e-9 on 100 random
/// instances with n ≤ 12.
#[test]
fn criterion_01_exact_evaluator_oracle_equivalence() {
    let _serial = run_serially();
    let start = std::time::Instant::now();
    let mut max_diff: f64 = 0.0;
    for seed in 0..100u64 {
        let n = 2 + (seed as usize * 7) % 11; // 2..=12
        let inst = random_instance(n, 1000 + seed, None);
        let tour = random_tour(n, 2000 + seed);
        let exact = expected_tour_cost_exact(&inst, &tour);
        let brute = expected_cost_bruteforce(&inst, &tour).unwrap();
        max_diff = max_diff.max((exact - brute).abs());
        assert!(
            (exact - brute).abs() <= 1e-9,
            "seed {seed}: exact {exact} vs brute {brute}"
        );
    }
    assert!(
        start.elapsed().as_secs() < 10,
        "criterion 1 over time budget"
    );
    println!(
        "criterion 1 PASS: exact ≡ brute force on 100 instances, max |diff| = {max_diff:.2e} ({:?})",
        start.elapsed()
    );
}

/// Criterion 2: the analytic lower-bound table rows (γ*, σ*, ratio) for
/// α ∈ {1, 4/3, 1.4999} within 2e-3 of the references, thresholds strictly
/// exceeded.
#[test]
fn criterion_02_lower_bound_table_reproduction() {
    let _serial = run_serially();
    let start = std::time::Instant::now();
    let rows = [
        (1.0, 1.623, 0.623, 2.655),
        (4.0 / 3.0, 1.383, 0.651, 2.914),
        (1.4999, 1.291, 0.663, 3.049),
    ];
    for (alpha, gamma_ref, sigma_ref, ratio_above) in rows {
        let (gamma, sigma, ratio) = optimize_gamma_sigma(alpha);
        assert!(
            (gamma - gamma_ref).abs() < 2e-3,
            "α={alpha}: γ* = {gamma}, want {gamma_ref}±2e-3"
        );
        assert!(
            (sigma - sigma_ref).abs() < 2e-3,
            "α={alpha}: σ* = {sigma}, want {sigma_ref}±2e-3"
        );
        assert!(
            ratio > ratio_above,
            "α={alpha}: ratio {ratio} ≤ {ratio_above}"
        );
        println!("criterion 2 row: α={alpha:.4} γ*={gamma:.4} σ*={sigma:.4} ratio={ratio:.4}");
    }
    assert!(
        start.elapsed().as_secs() < 5,
        "criterion 2 over time budget"
    );
    println!(
        "criterion 2 PASS: lower-bound table reproduced ({:?})",
        start.elapsed()
    );
}

/// Criterion 3: the group-family ratio at n = m = 10⁶ lies in
/// (2.5414, 2.5416), consistent with 1/(1−e^{−1/2}).
#[test]
fn criterion_03_master_route_ratio_lower_bound_limit() {
    let _serial = run_serially();
    let start = std::time::Instant::now();
    let ratio = mrr_lb_ratio(&MrrLbParams::new(1_000_000, 1_000_000).unwrap());
    assert!(
        ratio > 2.5414 && ratio < 2.5416,
        "ratio {ratio} outside (2.5414, 2.5416)"
    );
    let limit = 1.0 / (1.0 - (-0.5f64).exp());
    assert!(ratio < limit);
    assert!(
        start.elapsed().as_millis() < 1000,
        "criterion 3 over time budget"
    );
    println!(
        "criterion 3 PASS: ratio(10⁶,10⁶) = {ratio:.6} < {limit:.6} ({:?})",
        start.elapsed()
    );
}

/// Frozen goldens established by the first internal solve of the two
/// desk-scale configurations (regression protection; the bound itself is
/// whatever 1/value is).
const SAMPLING_DESK_GOLDEN: f64 = 0.134032514368;
const MRR_DESK_GOLDEN: f64 = 0.352046447387;

/// Criterion 4a: the sampling LP family at (α=1.5, σ=0.663, β=0.05, N=200)
/// solves internally, strong duality holds to 1e-7, and the rationalized
/// dual passes the exact verifier.
#[test]
fn criterion_04a_sampling_lp_desk_scale() {
    let _serial = run_serially();
    let start = std::time::Instant::now();
    let config = SamplingLpConfig::new(1.5, 0.663, 0.05, 200).unwrap();
    let primal = build_sampling_lp(&config).solve().unwrap();
    let bound = bound_from_primal(primal.value).unwrap();
    assert!(bound.is_finite() && bound > 1.0);
    if SAMPLING_DESK_GOLDEN.is_finite() {
        assert!(
            (primal.value - SAMPLING_DESK_GOLDEN).abs() <= 1e-7 * SAMPLING_DESK_GOLDEN,
            "regression: primal {} vs golden {}",
            primal.value,
            SAMPLING_DESK_GOLDEN
        );
    }
    let dual_model = build_sampling_dual(&config);
    let dual = dual_model.solve().unwrap();
    assert!(
        (primal.value - dual.value).abs() <= 1e-7 * primal.value.max(1.0),
        "duality gap {} too large",
        (primal.value - dual.value).abs()
    );
    let cert = rationalize_sampling_certificate(
        &dual_model,
        &dual,
        SamplingCertConfig {
            alpha: "3/2".into(),
            sigma: "663/1000".into(),
            beta: "1/20".into(),
            n_buckets: 200,
        },
        DEFAULT_SAFETY,
    )
    .unwrap();
    match verify_sampling_certificate(&cert).unwrap() {
        Verdict::Bound {
            bound: certified, ..
        } => {
            assert!(
                (certified - bound).abs() <= 1e-3 * bound,
                "certified {certified} vs 1/primal {bound}"
            );
            println!(
                "criterion 4a PASS: sampling N=200 primal={:.12} bound={certified:.6} gap={:.2e} ({:?})",
                primal.value,
                (primal.value - dual.value).abs(),
                start.elapsed()
            );
        }
        other => panic!("certificate rejected: {other:?}"),
    }
    assert!(
        start.elapsed().as_secs() < 300,
        "criterion 4a over time budget"
    );
}

/// Criterion 4b: the master-route-ratio LP family at (β=0.05, a=9, N=200),
/// same protocol.
#[test]
fn criterion_04b_mrr_lp_desk_scale() {
    let _serial = run_serially();
    let start = std::time::Instant::now();
    let config = MrrLpConfig::new(0.05, 200, 9).unwrap();
    let primal = build_mrr_lp(&config).solve().unwrap();
    let bound = bound_from_primal(primal.value).unwrap();
    assert!(bound.is_finite() && bound > 1.0);
    if MRR_DESK_GOLDEN.is_finite() {
        assert!(
            (primal.value - MRR_DESK_GOLDEN).abs() <= 1e-7 * MRR_DESK_GOLDEN,
            "regression: primal {} vs golden {}",
            primal.value,
            MRR_DESK_GOLDEN
        );
    }
    let dual_model = build_mrr_dual(&config);
    let dual = dual_model.solve().unwrap();
    assert!(
        (primal.value - dual.value).abs() <= 1e-7 * primal.value.max(1.0),
        "duality gap {} too large",
        (primal.value - dual.value).abs()
    );
    let cert = rationalize_mrr_certificate(
        &dual_model,
        &dual,
        MrrCertConfig {
            beta: "1/20".into(),
            n_buckets: 200,
            interval_width: 9,
            offsets: None,
        },
        DEFAULT_SAFETY,
    )
    .unwrap();
    match verify_mrr_certificate(&cert).unwrap() {
        Verdict::Bound {
            bound: certified, ..
        } => {
            assert!(
                (certified - bound).abs() <= 1e-3 * bound,
                "certified {certified} vs 1/primal {bound}"
            );
            println!(
                "criterion 4b PASS: mrr N=200 a=9 primal={:.12} bound={certified:.6} gap={:.2e} ({:?})",
                primal.value,
                (primal.value - dual.value).abs(),
                start.elapsed()
            );
        }
        other => panic!("certificate rejected: {other:?}"),
    }
    assert!(
        start.elapsed().as_secs() < 300,
        "criterion 4b over time budget"
    );
}

/// Criterion 5: randomized guarantee at desk scale. For each of 30 random
/// depot instances (n ≤ 8), the mean over 10⁴ seeds of the exact expected
/// cost of the sampling algorithm (power:0.663, exact TSP) is at most
/// 3.1·OPT.
#[test]
fn criterion_05_randomized_guarantee_desk_scale() {
    let _serial = run_serially();
    let start = std::time::Instant::now();
    let mut worst = 0.0f64;
    for inst_seed in 0..30u64 {
        let n = 4 + (inst_seed as usize) % 5; // 4..=8
        let inst = random_instance(n, 5000 + inst_seed, Some(0));
        let (_, opt) = brute_force_opt(&inst).unwrap();
        let mut total = 0.0;
        let seeds = 10_000u64;
        for seed in 0..seeds {
            let (tour, _) =
                run_sampling_algorithm(&inst, SamplingPolicy::Power(0.663), TspKind::Exact, seed)
                    .unwrap();
            total += expected_tour_cost_exact(&inst, &tour);
        }
        let mean = total / seeds as f64;
        let ratio = mean / opt;
        worst = worst.max(ratio);
        assert!(
            mean <= 3.1 * opt,
            "instance {inst_seed}: mean {mean} > 3.1·OPT = {}",
            3.1 * opt
        );
    }
    assert!(
        start.elapsed().as_secs() < 600,
        "criterion 5 over time budget"
    );
    println!(
        "criterion 5 PASS: 30 instances × 10⁴ seeds, worst mean/OPT = {worst:.4} ≤ 3.1 ({:?})",
        start.elapsed()
    );
}

/// Criterion 6: exhaustive E_{S∼p}[MR(S)] ≤ 3·OPT on 30 random depot
/// instances with n ≤ 8.
#[test]
fn criterion_06_sampled_mr_expectation_three_opt() {
    let _serial = run_serially();
    let start = std::time::Instant::now();
    let mut worst = 0.0f64;
    for inst_seed in 0..30u64 {
        let n = 4 + (inst_seed as usize) % 5;
        let inst = random_instance(n, 6000 + inst_seed, Some(0));
        let lhs = exhaustive_sampled_mr_expectation(&inst).unwrap();
        let (_, opt) = brute_force_opt(&inst).unwrap();
        worst = worst.max(lhs / opt);
        assert!(
            lhs <= 3.0 * opt + 1e-9,
            "instance {inst_seed}: {lhs} > 3·{opt}"
        );
    }
    assert!(
        start.elapsed().as_secs() < 300,
        "criterion 6 over time budget"
    );
    println!(
        "criterion 6 PASS: E[MR(S)] ≤ 3·OPT on 30 instances, worst ratio {worst:.4} ({:?})",
        start.elapsed()
    );
}

/// Criterion 7: derandomization safety. On 30 random depot instances
/// (n ≤ 8) the derandomized tour costs at most 6.5·OPT and the estimator
/// trajectory never increases.
#[test]
fn criterion_07_derandomization_safety() {
    let _serial = run_serially();
    let start = std::time::Instant::now();
    let mut worst = 0.0f64;
    for inst_seed in 0..30u64 {
        let n = 4 + (inst_seed as usize) % 5;
        let inst = random_instance(n, 7000 + inst_seed, Some(0));
        let result = derandomized_master_route(&inst, TspKind::Exact).unwrap();
        let cost = expected_tour_cost_exact(&inst, &result.tour);
        let (_, opt) = brute_force_opt(&inst).unwrap();
        worst = worst.max(cost / opt);
        assert!(
            cost <= 6.5 * opt,
            "instance {inst_seed}: derand cost {cost} > 6.5·OPT = {}",
            6.5 * opt
        );
        for pair in result.estimator_trajectory.windows(2) {
            assert!(
                pair[1] <= pair[0] + 1e-9,
                "instance {inst_seed}: estimator increased {} -> {}",
                pair[0],
                pair[1]
            );
        }
        assert!(cost <= result.estimator_trajectory[0] + 1e-9);
    }
    assert!(
        start.elapsed().as_secs() < 300,
        "criterion 7 over time budget"
    );
    println!(
        "criterion 7 PASS: derand ≤ 6.5·OPT with monotone estimator on 30 instances, worst ratio {worst:.4} ({:?})",
        start.elapsed()
    );
}

/// Criterion 8: analytic identities against truncated sums (10⁶ terms).
#[test]
fn criterion_08_analytic_identity_suite() {
    let _serial = run_serially();
    let start = std::time::Instant::now();
    // Σ_{k>n} k·q^{k-1} = qⁿ(1+n−qn)/(1−q)².
    for &n in &[0usize, 1, 5, 40, 200, 1000] {
        for &q in &[0.1f64, 0.5, 0.9, 0.97, 0.99] {
            let closed = q.powi(n as i32) * (1.0 + n as f64 - q * n as f64) / (1.0 - q).powi(2);
            let mut series = 0.0;
            let mut term = (n as f64 + 1.0) * q.powi(n as i32);
            // term_k = k·q^{k-1}, updated incrementally.
            for k in (n + 1)..(n + 1_000_000) {
                series += term;
                term = term * q * (k as f64 + 1.0) / k as f64;
                if term < 1e-18 * series {
                    break;
                }
            }
            if closed < 1e-280 {
                // Both routes underflow together far below any tolerance.
                assert!(series < 1e-280, "n={n} q={q}: series {series}");
            } else {
                let rel = ((closed - series) / closed).abs();
                assert!(rel <= 1e-10, "n={n} q={q}: rel err {rel}");
            }
        }
    }
    // Σ_{i=1}^k (βp)²(1−βp)^{i-1}·c_i = βγ + (1−βp)^{γ/p} − (1+βpk)(1−βp)^k
    // with c_i = γ/p for i ≤ γ/p, else i; 0⁰ := 1 at βp = 1.
    for &(gamma, p) in &[
        (1.0f64, 0.01f64),
        (1.623, 1.623 / 50.0),
        (2.0, 0.1),
        (1.2, 0.3),
    ] {
        let plateau = (gamma / p).round() as usize;
        for &beta in &[0.3, 1.0, 2.0] {
            for &k_mult in &[1usize, 2, 10] {
                let k = plateau * k_mult;
                let bp = beta * p;
                if bp > 1.0 {
                    continue;
                }
                let mut series = 0.0;
                for i in 1..=k {
                    let c_i = if i <= plateau { gamma / p } else { i as f64 };
                    let pow = if bp == 1.0 {
                        if i == 1 {
                            1.0
                        } else {
                            0.0
                        }
                    } else {
                        (1.0 - bp).powi(i as i32 - 1)
                    };
                    series += bp * bp * pow * c_i;
                }
                let zz = |base: f64, e: f64| -> f64 {
                    if base == 0.0 && e == 0.0 {
                        1.0
                    } else {
                        base.powf(e)
                    }
                };
                let closed = beta * gamma + zz(1.0 - bp, gamma / p)
                    - (1.0 + bp * k as f64) * zz(1.0 - bp, k as f64);
                let scale = closed.abs().max(series.abs()).max(1e-12);
                assert!(
                    (closed - series).abs() / scale <= 1e-10,
                    "γ={gamma} p={p} β={beta} k={k}: {closed} vs {series}"
                );
            }
        }
    }
    // The βp = 1 degenerate case explicitly.
    {
        let (gamma, p) = (1.2f64, 0.3f64);
        let beta = 1.0 / p;
        let plateau = (gamma / p).round() as usize;
        let k = plateau + 3;
        let series = gamma / p; // only i = 1 survives, with 0⁰ = 1
        let closed = beta * gamma + 0.0 - 0.0;
        assert!(((series - closed) / closed).abs() <= 1e-12);
        let _ = k;
    }
    // δ₁/δ₂ closed form vs 10⁶-term series to 1e-12 relative.
    for (beta, n) in [(0.2, 40usize), (0.05, 200), (0.01, 2500)] {
        let config = SamplingLpConfig::new(1.5, 0.663, beta, n).unwrap();
        let (c1, c2) = compute_delta_terms(&config);
        let sb = config.sigma * beta;
        let q = (-sb).exp();
        let mut s1 = 0.0;
        let mut term = (-(n as f64 + 1.0) * sb).exp();
        for _ in 0..1_000_000 {
            s1 += term;
            term *= q;
            if term < 1e-19 * s1 {
                break;
            }
        }
        s1 *= 4.0 * beta;
        let mut s2_sum = 0.0;
        let mut term = (n as f64 + 1.0) * q.powi(n as i32);
        for k in (n + 1)..(n + 1_000_000) {
            s2_sum += term;
            term = term * q * (k as f64 + 1.0) / k as f64;
            if term < 1e-19 * s2_sum {
                break;
            }
        }
        let tail = 4.0 * beta / ((n as f64 * sb).exp() * (sb.exp() - 1.0));
        let s2 = (config.alpha + tail / 2.0) * s2_sum;
        assert!(((c1 - s1) / c1).abs() <= 1e-12, "δ₁: {c1} vs {s1}");
        assert!(((c2 - s2) / c2).abs() <= 1e-12, "δ₂: {c2} vs {s2}");
    }
    assert!(
        start.elapsed().as_secs() < 30,
        "criterion 8 over time budget"
    );
    println!(
        "criterion 8 PASS: analytic identities verified ({:?})",
        start.elapsed()
    );
}

/// Criterion 9: normalization soundness. Instances are drawn from the
/// feasible band (p within the copy-count bracket for ε = 0.15) so that all
/// four plan conditions hold; the normalized optimum never exceeds the
/// original one (both brute-forced).
#[test]
fn criterion_09_normalization_soundness() {
    let _serial = run_serially();
    let start = std::time::Instant::now();
    let epsilon = 0.15;
    let lambda = 1.0;
    let sigma = 0.663;
    let mut done = 0;
    let mut attempt = 0u64;
    while done < 20 {
        attempt += 1;
        let mut rng = ChaCha12Rng::seed_from_u64(9000 + attempt);
        let n = rng.random_range(3..=6usize);
        // Copy counts in {1,2,3} with at most 8 copies total so the
        // normalized instance stays brute-forceable.
        let ks: Vec<usize> = (1..n).map(|_| rng.random_range(1..=3usize)).collect();
        if ks.iter().sum::<usize>() > 8 {
            continue;
        }
        let mut p = vec![1.0];
        for &k in &ks {
            // Activation probabilities must lie in the copy-count bracket
            // [1−(1−ε)^k, ε·k]; at k = 1 it collapses to the point ε.
            let lo = 1.0 - (1.0f64 - epsilon).powi(k as i32);
            let hi = epsilon * k as f64;
            p.push(if lo < hi {
                rng.random_range(lo..hi)
            } else {
                epsilon
            });
        }
        let pts: Vec<(f64, f64)> = (0..n)
            .map(|_| (rng.random_range(0.0..10.0), rng.random_range(0.0..10.0)))
            .collect();
        let inst = Instance::from_points(&pts, p, Some(0)).unwrap();
        let (normalized, plan) = normalize_instance(&inst, epsilon, lambda, sigma).unwrap();
        plan.verify(&inst).unwrap();
        assert_eq!(&plan.copies[1..], &ks[..], "copy counts reproduce the draw");
        let (_, opt_original) = brute_force_opt(&inst).unwrap();
        let (_, opt_normalized) = brute_force_opt(&normalized).unwrap();
        assert!(
            opt_normalized <= opt_original + 1e-9,
            "attempt {attempt}: OPT(normalized) = {opt_normalized} > OPT(original) = {opt_original}"
        );
        done += 1;
    }
    assert!(
        start.elapsed().as_secs() < 120,
        "criterion 9 over time budget"
    );
    println!(
        "criterion 9 PASS: OPT(normalized) ≤ OPT(original) and all plan conditions on 20 instances ({:?})",
        start.elapsed()
    );
}

/// Criterion 10: property suites, ≥ 100 randomized cases each.
#[test]
fn criterion_10_property_suites() {
    let _serial = run_serially();
    let start = std::time::Instant::now();

    // Shortcut monotonicity.
    for seed in 0..100u64 {
        let n = 4 + (seed as usize) % 6;
        let inst = random_instance(n, 10_000 + seed, None);
        let tour = random_tour(n, 20_000 + seed);
        let mut rng = ChaCha12Rng::seed_from_u64(30_000 + seed);
        let b: Vec<usize> = (0..n).filter(|_| rng.random_bool(0.7)).collect();
        let a: Vec<usize> = b.iter().copied().filter(|_| rng.random_bool(0.6)).collect();
        let ca = inst.shortcut_cost(&tour, &aptsp_core::ActiveSet::new(a));
        let cb = inst.shortcut_cost(&tour, &aptsp_core::ActiveSet::new(b));
        assert!(ca <= cb + 1e-9, "seed {seed}: shortcut not monotone");
    }

    // Bucket triangle inequality on random triangle-feasible hop vectors.
    for seed in 0..100u64 {
        let mut rng = ChaCha12Rng::seed_from_u64(40_000 + seed);
        let b = 2 * rng.random_range(1..=4usize) + 1;
        let n = rng.random_range(4..=20usize);
        let len = (n + 2) * b;
        // Concave increasing sequences are subadditive.
        let mut increments: Vec<f64> = (0..len).map(|_| rng.random_range(0.01..1.0)).collect();
        increments.sort_by(|x, y| y.partial_cmp(x).unwrap());
        let mut c = Vec::with_capacity(len);
        let mut acc = 0.0;
        for inc in increments {
            acc += inc;
            c.push(acc);
        }
        let bucket = |i: usize| -> f64 {
            let lo = (i * b).saturating_sub((b - 1) / 2).max(1);
            let hi = i * b + (b - 1) / 2;
            (lo..=hi).filter(|&j| j <= c.len()).map(|j| c[j - 1]).sum()
        };
        for i in 1..=n {
            for j in i..=n {
                if i + j <= n {
                    assert!(
                        bucket(i + j) <= bucket(i) + bucket(j) + 1e-9,
                        "seed {seed}: bucket triangle fails at ({i},{j})"
                    );
                }
            }
        }
    }

    // Monte-Carlo 4σ agreement in at least 99 of 100 trials.
    let mut mc_failures = 0;
    for seed in 0..100u64 {
        let n = 6 + (seed as usize) % 4;
        let inst = random_instance(n, 50_000 + seed, None);
        let tour = random_tour(n, 60_000 + seed);
        let exact = expected_tour_cost_exact(&inst, &tour);
        let mc = expected_cost_monte_carlo(&inst, &tour, 20_000, 70_000 + seed).unwrap();
        let stderr = mc.stderr.unwrap();
        if (mc.value - exact).abs() > 4.0 * stderr {
            mc_failures += 1;
        }
    }
    assert!(
        mc_failures <= 1,
        "{mc_failures} of 100 Monte-Carlo trials outside 4σ"
    );

    // TSP guarantee chains: subtour LP ≤ exact ≤ christofides ≤ 1.5·exact
    // and double tree ≤ 2·exact.
    for seed in 0..100u64 {
        let n = 5 + (seed as usize) % 6; // 5..=10
        let inst = random_instance(n, 80_000 + seed, None);
        let subset: Vec<usize> = (0..n).collect();
        let hk = held_karp(&inst, &subset).unwrap();
        let dt = double_tree(&inst, &subset);
        let ch = christofides(&inst, &subset);
        let (lp, _) = subtour_lp_value(&inst, &subset).unwrap();
        assert!(dt.cost <= 2.0 * hk.cost + 1e-9, "seed {seed}: double tree");
        assert!(ch.cost <= 1.5 * hk.cost + 1e-9, "seed {seed}: christofides");
        assert_eq!(ch.guarantee, 1.5);
        assert!(
            lp <= hk.cost + 1e-6,
            "seed {seed}: subtour LP above optimum"
        );
        assert!(hk.cost <= ch.cost + 1e-9);
    }

    assert!(
        start.elapsed().as_secs() < 300,
        "criterion 10 over time budget"
    );
    println!(
        "criterion 10 PASS: 4×100 property cases (shortcut, buckets, Monte-Carlo, TSP chains) ({:?})",
        start.elapsed()
    );
}
