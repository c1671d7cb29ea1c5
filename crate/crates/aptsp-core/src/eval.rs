//! Exact, Monte-Carlo, and brute-force evaluation of a priori tours and
//! master route solutions.
//!
//! The brute-force evaluators are the oracles for everything else; their size
//! cutoffs are hard errors, never silent fallbacks.

use serde::Serialize;

use crate::instance::{Instance, Tour};
use crate::tsp::held_karp;
use crate::{Error, Result};

/// A master set `S`, a tour on it, and the assignment of every outside
/// customer to its nearest hub in `S` (ties broken by lowest index).
#[derive(Debug, Clone, Serialize)]
pub struct MasterRouteSolution {
    pub master_set: Vec<usize>,
    /// Cyclic order of the master set.
    pub master_tour: Vec<usize>,
    /// `hub[v] = Some(μ(v))` for customers outside the master set, `None`
    /// for members.
    pub hub: Vec<Option<usize>>,
    pub master_cost: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum EvalMethod {
    Exact,
    MonteCarlo,
    BruteForce,
}

/// Result of an expectation evaluation; `stderr`/`samples` are present
/// exactly for the Monte-Carlo method.
#[derive(Debug, Clone, Serialize)]
pub struct ExpectedCostReport {
    pub value: f64,
    pub method: EvalMethod,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub stderr: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub samples: Option<u64>,
}

/// Exact expected cost of an a priori tour in O(n²):
///
///   Σ_{(u,w) ordered, u≠w} p(u)·p(w)·Π_{t between u and w}(1−p(t))·c(u,w),
///
/// where "between" follows the stored tour orientation. Each term is the
/// probability that u and w are consecutive active customers; active sets
/// with fewer than two customers contribute no ordered pair, which matches
/// the convention that such tours cost zero.
pub fn expected_tour_cost_exact(inst: &Instance, tour: &Tour) -> f64 {
    let n = tour.order.len();
    debug_assert!(tour.is_permutation_of(inst.n()));
    if n < 2 {
        return 0.0;
    }
    let order = &tour.order;
    let mut total = 0.0;
    for i in 0..n {
        let u = order[i];
        let pu = inst.p(u);
        if pu == 0.0 {
            continue;
        }
        let mut between = 1.0;
        for step in 1..n {
            let w = order[(i + step) % n];
            total += pu * inst.p(w) * between * inst.dist(u, w);
            between *= 1.0 - inst.p(w);
            if between == 0.0 {
                break;
            }
        }
    }
    total
}

pub const BRUTE_FORCE_SUBSET_LIMIT: usize = 20;

/// Oracle: Σ over all 2ⁿ active sets of probability × shortcut cost.
pub fn expected_cost_bruteforce(inst: &Instance, tour: &Tour) -> Result<f64> {
    let n = inst.n();
    if n > BRUTE_FORCE_SUBSET_LIMIT {
        return Err(Error::SizeLimit {
            op: "expected_cost_bruteforce",
            limit: BRUTE_FORCE_SUBSET_LIMIT,
            actual: n,
        });
    }
    let mut total = 0.0;
    let mut is_active = vec![false; n];
    for mask in 0u32..(1 << n) {
        let mut prob = 1.0;
        for v in 0..n {
            let active = mask & (1 << v) != 0;
            is_active[v] = active;
            prob *= if active { inst.p(v) } else { 1.0 - inst.p(v) };
        }
        if prob > 0.0 {
            total += prob * inst.shortcut_cost_by_flags(tour, &is_active);
        }
    }
    Ok(total)
}

/// Samples per RNG stream. Streams are indexed by block, not by worker, so
/// results are bitwise independent of the worker count.
const MC_BLOCK: u64 = 4096;

/// Unbiased Monte-Carlo estimate with plain standard error; deterministic
/// given the seed.
pub fn expected_cost_monte_carlo(
    inst: &Instance,
    tour: &Tour,
    samples: u64,
    seed: u64,
) -> Result<ExpectedCostReport> {
    expected_cost_monte_carlo_threads(inst, tour, samples, seed, 1)
}

/// Monte-Carlo estimate fanned out over `threads` workers. Each fixed-size
/// block of samples draws from its own RNG stream derived from
/// `(seed, block index)` and the per-block sums are merged in block order,
/// so any worker count produces identical output.
pub fn expected_cost_monte_carlo_threads(
    inst: &Instance,
    tour: &Tour,
    samples: u64,
    seed: u64,
    threads: usize,
) -> Result<ExpectedCostReport> {
    if samples == 0 {
        return Err(Error::invalid("monte carlo needs at least one sample"));
    }
    let blocks = samples.div_ceil(MC_BLOCK);
    let run_block = |b: u64| -> (f64, f64) {
        use rand::prelude::*;
        let mut rng = rand_chacha::ChaCha12Rng::seed_from_u64(seed);
        rng.set_stream(b + 1);
        let count = if (b + 1) * MC_BLOCK <= samples {
            MC_BLOCK
        } else {
            samples - b * MC_BLOCK
        };
        let n = inst.n();
        let mut is_active = vec![false; n];
        let mut sum = 0.0;
        let mut sumsq = 0.0;
        for _ in 0..count {
            for v in 0..n {
                is_active[v] = rng.random::<f64>() < inst.p(v);
            }
            let cost = inst.shortcut_cost_by_flags(tour, &is_active);
            sum += cost;
            sumsq += cost * cost;
        }
        (sum, sumsq)
    };
    let threads = threads.clamp(1, (blocks as usize).max(1));
    let mut per_block = vec![(0.0, 0.0); blocks as usize];
    if threads <= 1 {
        for b in 0..blocks {
            per_block[b as usize] = run_block(b);
        }
    } else {
        let next = std::sync::atomic::AtomicU64::new(0);
        let results: Vec<std::sync::Mutex<Vec<(u64, f64, f64)>>> = (0..threads)
            .map(|_| std::sync::Mutex::new(Vec::new()))
            .collect();
        std::thread::scope(|scope| {
            for t in 0..threads {
                let next = &next;
                let bucket = &results[t];
                let run_block = &run_block;
                scope.spawn(move || loop {
                    let b = next.fetch_add(1, std::sync::atomic::Ordering::Relaxed);
                    if b >= blocks {
                        break;
                    }
                    let (s, sq) = run_block(b);
                    bucket.lock().unwrap().push((b, s, sq));
                });
            }
        });
        for bucket in results {
            for (b, s, sq) in bucket.into_inner().unwrap() {
                per_block[b as usize] = (s, sq);
            }
        }
    }
    let mut sum = 0.0;
    let mut sumsq = 0.0;
    for (s, sq) in per_block {
        sum += s;
        sumsq += sq;
    }
    let nf = samples as f64;
    let mean = sum / nf;
    let stderr = if samples > 1 {
        let var = ((sumsq - sum * sum / nf) / (nf - 1.0)).max(0.0);
        (var / nf).sqrt()
    } else {
        0.0
    };
    Ok(ExpectedCostReport {
        value: mean,
        method: EvalMethod::MonteCarlo,
        stderr: Some(stderr),
        samples: Some(samples),
    })
}

/// Exact expected cost of the master route solution with master set `s` on a
/// depot instance:
///
///   (1 − Π_{v≠d}(1−p(v)))·master_cost + 2·Σ_{v≠d} p(v)·c(v, s).
pub fn mr_cost_exact(inst: &Instance, s: &[usize], master_cost: f64) -> Result<f64> {
    let d = inst.depot().ok_or(Error::DepotRequired {
        op: "mr_cost_exact",
    })?;
    if !s.contains(&d) {
        return Err(Error::DepotNotInSet { depot: d });
    }
    let mut none_active = 1.0;
    let mut connection = 0.0;
    for v in 0..inst.n() {
        if v == d {
            continue;
        }
        none_active *= 1.0 - inst.p(v);
        connection += inst.p(v) * inst.dist_to_set(v, s)?;
    }
    Ok((1.0 - none_active) * master_cost + 2.0 * connection)
}

/// Exact expected cost of the master route solution with master set `s` on an
/// arbitrary instance. With the active set A drawn independently, the
/// solution pays the master tour plus a round trip for every active customer,
/// and nothing when |A| < 2:
///
///   E[1_{|A|≥2}·(master_cost + 2 Σ_{v∈A} c(v,s))]
///     = P[|A|≥2]·master_cost
///       + 2 Σ_v p(v)·c(v,s)·P[some customer other than v is active],
///
/// because v ∈ A and |A| ≥ 2 happen together exactly when v is active and at
/// least one other customer is, and those events are independent. With a
/// depot this reduces to [`mr_cost_exact`].
pub fn mr_cost_exact_general(inst: &Instance, s: &[usize], master_cost: f64) -> Result<f64> {
    if s.is_empty() {
        return Err(Error::EmptySet);
    }
    let n = inst.n();
    // prefix[v] = Π_{u<v}(1−p(u)), suffix[v] = Π_{u>v}(1−p(u)); products of
    // (1−p) excluding v come out without divisions.
    let mut prefix = vec![1.0; n + 1];
    for v in 0..n {
        prefix[v + 1] = prefix[v] * (1.0 - inst.p(v));
    }
    let mut suffix = vec![1.0; n + 1];
    for v in (0..n).rev() {
        suffix[v] = suffix[v + 1] * (1.0 - inst.p(v));
    }
    let none_active = prefix[n];
    let mut exactly_one = 0.0;
    for v in 0..n {
        exactly_one += inst.p(v) * prefix[v] * suffix[v + 1];
    }
    let p_at_least_two = (1.0 - none_active - exactly_one).max(0.0);
    let mut connection = 0.0;
    for v in 0..n {
        let other_active = 1.0 - prefix[v] * suffix[v + 1];
        connection += inst.p(v) * inst.dist_to_set(v, s)? * other_active;
    }
    Ok(p_at_least_two * master_cost + 2.0 * connection)
}

pub const MIN_MR_LIMIT: usize = 12;

/// Enumerates every admissible master set (all nonempty `S`, or all `S`
/// containing the depot when one is present), prices each with an optimum
/// TSP tour, and returns the minimizer of the exact master-route cost.
pub fn min_mr_bruteforce(inst: &Instance) -> Result<(Vec<usize>, f64)> {
    let n = inst.n();
    if n > MIN_MR_LIMIT {
        return Err(Error::SizeLimit {
            op: "min_mr_bruteforce",
            limit: MIN_MR_LIMIT,
            actual: n,
        });
    }
    let mut best: Option<(Vec<usize>, f64)> = None;
    for mask in 1u32..(1 << n) {
        if let Some(d) = inst.depot() {
            if mask & (1 << d) == 0 {
                continue;
            }
        }
        let subset: Vec<usize> = (0..n).filter(|&v| mask & (1 << v) != 0).collect();
        let tsp = held_karp(inst, &subset)?;
        let value = mr_cost_exact_general(inst, &subset, tsp.cost)?;
        if best.as_ref().is_none_or(|(_, b)| value < *b) {
            best = Some((subset, value));
        }
    }
    Ok(best.expect("at least one nonempty subset"))
}

pub const BRUTE_FORCE_TOUR_LIMIT: usize = 9;

/// Brute-force optimum a priori tour over all (n−1)!/2 tours.
pub fn brute_force_opt(inst: &Instance) -> Result<(Tour, f64)> {
    let n = inst.n();
    if n > BRUTE_FORCE_TOUR_LIMIT {
        return Err(Error::SizeLimit {
            op: "brute_force_opt",
            limit: BRUTE_FORCE_TOUR_LIMIT,
            actual: n,
        });
    }
    if n <= 2 {
        let tour = Tour::identity(n);
        let cost = expected_tour_cost_exact(inst, &tour);
        return Ok((tour, cost));
    }
    let mut rest: Vec<usize> = (1..n).collect();
    let mut best: Option<(Tour, f64)> = None;
    permute_tours(&mut rest, 0, &mut |perm| {
        // Fixing customer 0 first and orienting so that the successor of 0 is
        // smaller than its predecessor enumerates each cyclic tour once.
        if perm[0] > perm[perm.len() - 1] {
            return;
        }
        let mut order = Vec::with_capacity(n);
        order.push(0);
        order.extend_from_slice(perm);
        let tour = Tour::new(order);
        let cost = expected_tour_cost_exact(inst, &tour);
        if best.as_ref().is_none_or(|(_, b)| cost < *b) {
            best = Some((tour, cost));
        }
    });
    Ok(best.unwrap())
}

fn permute_tours(items: &mut Vec<usize>, k: usize, f: &mut impl FnMut(&[usize])) {
    if k == items.len() {
        f(items);
        return;
    }
    for i in k..items.len() {
        items.swap(k, i);
        permute_tours(items, k + 1, f);
        items.swap(k, i);
    }
}

/// Best master-route cost divided by the brute-force a priori optimum, with
/// the convention 0/0 = 1.
pub fn empirical_master_route_ratio(inst: &Instance) -> Result<f64> {
    let n = inst.n();
    if n > BRUTE_FORCE_TOUR_LIMIT {
        return Err(Error::SizeLimit {
            op: "empirical_master_route_ratio",
            limit: BRUTE_FORCE_TOUR_LIMIT,
            actual: n,
        });
    }
    let (_, opt) = brute_force_opt(inst)?;
    let (_, min_mr) = min_mr_bruteforce(inst)?;
    if opt == 0.0 && min_mr == 0.0 {
        return Ok(1.0);
    }
    Ok(min_mr / opt)
}

/// Exhaustive E_{S∼p}[MR(S)] on a depot instance: the master set is drawn
/// with the activation probabilities themselves (the depot always included)
/// and each MR(S) is priced with an optimum master tour.
pub fn exhaustive_sampled_mr_expectation(inst: &Instance) -> Result<f64> {
    let n = inst.n();
    if n > MIN_MR_LIMIT {
        return Err(Error::SizeLimit {
            op: "exhaustive_sampled_mr_expectation",
            limit: MIN_MR_LIMIT,
            actual: n,
        });
    }
    let d = inst.depot().ok_or(Error::DepotRequired {
        op: "exhaustive_sampled_mr_expectation",
    })?;
    let mut total = 0.0;
    for mask in 0u32..(1 << n) {
        if mask & (1 << d) == 0 {
            continue;
        }
        let mut prob = 1.0;
        let mut subset = Vec::new();
        for v in 0..n {
            if mask & (1 << v) != 0 {
                subset.push(v);
                if v != d {
                    prob *= inst.p(v);
                }
            } else {
                prob *= 1.0 - inst.p(v);
            }
        }
        if prob == 0.0 {
            continue;
        }
        let tsp = held_karp(inst, &subset)?;
        total += prob * mr_cost_exact(inst, &subset, tsp.cost)?;
    }
    Ok(total)
}
