//! The a priori TSP algorithms end-to-end: randomized master-set sampling,
//! low-activity enumeration, depot selection, normalization by customer
//! copies, and the deterministic conditional-expectation algorithm.

use rand::prelude::*;
use rand_chacha::ChaCha12Rng;
use serde::Serialize;

use crate::eval::{expected_tour_cost_exact, MasterRouteSolution};
use crate::instance::{Instance, Tour};
use crate::lp::model::{LpModel, Relation, Sense};
use crate::tsp::{min_cut, solve_tsp, TspKind};
use crate::{Error, Result};

/// How the master-set sampling probability is derived from the activation
/// probability. Every policy maps probability 1 to 1, and the depot is
/// always sampled.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SamplingPolicy {
    /// f(p) = p
    Identity,
    /// f(p) = 1 − (1−p)^σ
    Power(f64),
    /// f(p) = σ·p for p < 1, f(1) = 1
    Scaled(f64),
}

impl SamplingPolicy {
    pub fn probability(&self, p: f64) -> f64 {
        if p >= 1.0 {
            return 1.0;
        }
        match *self {
            SamplingPolicy::Identity => p,
            SamplingPolicy::Power(sigma) => 1.0 - (1.0 - p).powf(sigma),
            SamplingPolicy::Scaled(sigma) => sigma * p,
        }
    }

    pub fn validate(&self) -> Result<()> {
        match *self {
            SamplingPolicy::Identity => Ok(()),
            SamplingPolicy::Power(s) | SamplingPolicy::Scaled(s) => {
                if s > 0.0 && s <= 1.0 {
                    Ok(())
                } else {
                    Err(Error::invalid(format!(
                        "policy parameter σ = {s} outside (0, 1]"
                    )))
                }
            }
        }
    }
}

impl std::str::FromStr for SamplingPolicy {
    type Err = Error;

    /// Accepts `identity`, `power:<σ>`, `scaled:<σ>`.
    fn from_str(s: &str) -> Result<Self> {
        let policy = if s == "identity" {
            SamplingPolicy::Identity
        } else if let Some(v) = s.strip_prefix("power:") {
            SamplingPolicy::Power(
                v.parse::<f64>()
                    .map_err(|_| Error::invalid(format!("bad σ in policy {s:?}")))?,
            )
        } else if let Some(v) = s.strip_prefix("scaled:") {
            SamplingPolicy::Scaled(
                v.parse::<f64>()
                    .map_err(|_| Error::invalid(format!("bad σ in policy {s:?}")))?,
            )
        } else {
            return Err(Error::invalid(format!(
                "unknown policy {s:?}; expected identity | power:<σ> | scaled:<σ>"
            )));
        };
        policy.validate()?;
        Ok(policy)
    }
}

impl std::fmt::Display for SamplingPolicy {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match *self {
            SamplingPolicy::Identity => write!(f, "identity"),
            SamplingPolicy::Power(s) => write!(f, "power:{s}"),
            SamplingPolicy::Scaled(s) => write!(f, "scaled:{s}"),
        }
    }
}

/// Samples the master set: the depot always, every other customer `v`
/// independently with probability `f(p(v))`. Customers are drawn in index
/// order, so the outcome is a pure function of the seed.
pub fn sample_master_set(inst: &Instance, policy: SamplingPolicy, seed: u64) -> Result<Vec<usize>> {
    let d = inst.depot().ok_or(Error::DepotRequired {
        op: "sample_master_set",
    })?;
    policy.validate()?;
    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    let mut s = Vec::new();
    for v in 0..inst.n() {
        // The depot draws nothing; everyone else consumes one draw in index
        // order so outcomes are reproducible.
        if v == d || rng.random::<f64>() < policy.probability(inst.p(v)) {
            s.push(v);
        }
    }
    Ok(s)
}

/// Builds the master tour on `s` with the chosen solver, assigns every
/// outside customer to its nearest hub (lowest index on ties), and emits the
/// a priori tour that follows the master tour, detouring at each hub through
/// its assigned customers in increasing-distance order.
///
/// The emitted tour shortcuts the closed walk that pays the master tour plus
/// a round trip per active outsider, so its expected cost is at most
/// `mr_cost_exact_general(s, master cost)`.
pub fn build_master_route_tour(
    inst: &Instance,
    s: &[usize],
    tsp_kind: TspKind,
) -> Result<(Tour, MasterRouteSolution)> {
    if s.is_empty() {
        return Err(Error::EmptySet);
    }
    let mut master_set = s.to_vec();
    master_set.sort_unstable();
    master_set.dedup();
    let tsp = solve_tsp(inst, &master_set, tsp_kind)?;
    let n = inst.n();
    let mut hub = vec![None; n];
    let mut pendants: Vec<Vec<usize>> = vec![Vec::new(); n];
    let mut in_master = vec![false; n];
    for &m in &master_set {
        in_master[m] = true;
    }
    for v in 0..n {
        if !in_master[v] {
            let h = inst.nearest_in_set(v, &master_set)?;
            hub[v] = Some(h);
            pendants[h].push(v);
        }
    }
    for (h, group) in pendants.iter_mut().enumerate() {
        group.sort_by(|&a, &b| {
            inst.dist(h, a)
                .partial_cmp(&inst.dist(h, b))
                .unwrap()
                .then(a.cmp(&b))
        });
    }
    let mut order = Vec::with_capacity(n);
    for &m in &tsp.tour {
        order.push(m);
        order.extend_from_slice(&pendants[m]);
    }
    let tour = Tour::new(order);
    debug_assert!(tour.is_permutation_of(n));
    Ok((
        tour,
        MasterRouteSolution {
            master_set,
            master_tour: tsp.tour,
            hub,
            master_cost: tsp.cost,
        },
    ))
}

/// The randomized sampling algorithm: sample a master set, master-route it.
pub fn run_sampling_algorithm(
    inst: &Instance,
    policy: SamplingPolicy,
    tsp_kind: TspKind,
    seed: u64,
) -> Result<(Tour, MasterRouteSolution)> {
    let s = sample_master_set(inst, policy, seed)?;
    build_master_route_tour(inst, &s, tsp_kind)
}

/// Hard cap on the number of master sets the low-activity enumeration may
/// price.
pub const LOW_ACTIVITY_SUBSET_BUDGET: u128 = 10_000_000;

#[derive(Debug, Clone, Serialize)]
pub struct LowActivityResult {
    pub tour: Tour,
    pub master_set: Vec<usize>,
    pub expected_cost: f64,
}

/// Prices every master set of size 2..=`n_max` with an optimum master tour
/// and returns the a priori tour minimizing the exact expected cost.
pub fn solve_low_activity(inst: &Instance, n_max: usize) -> Result<LowActivityResult> {
    let n = inst.n();
    if n < 2 {
        return Err(Error::invalid("low-activity enumeration needs n >= 2"));
    }
    let n_max = n_max.min(n);
    if n_max > crate::tsp::HELD_KARP_LIMIT {
        return Err(Error::SizeLimit {
            op: "solve_low_activity",
            limit: crate::tsp::HELD_KARP_LIMIT,
            actual: n_max,
        });
    }
    let mut budget: u128 = 0;
    for k in 2..=n_max {
        budget = budget.saturating_add(binomial(n, k));
        if budget > LOW_ACTIVITY_SUBSET_BUDGET {
            return Err(Error::BudgetExceeded {
                op: "solve_low_activity",
                detail: format!(
                    "more than {LOW_ACTIVITY_SUBSET_BUDGET} master sets up to size {n_max}"
                ),
            });
        }
    }
    let mut best: Option<LowActivityResult> = None;
    for k in 2..=n_max {
        let mut subset: Vec<usize> = (0..k).collect();
        loop {
            let (tour, mrs) = build_master_route_tour(inst, &subset, TspKind::Exact)?;
            let cost = expected_tour_cost_exact(inst, &tour);
            if best.as_ref().is_none_or(|b| cost < b.expected_cost) {
                best = Some(LowActivityResult {
                    tour,
                    master_set: mrs.master_set,
                    expected_cost: cost,
                });
            }
            if !next_combination(&mut subset, n) {
                break;
            }
        }
    }
    Ok(best.expect("n >= 2 guarantees at least one pair"))
}

fn binomial(n: usize, k: usize) -> u128 {
    if k > n {
        return 0;
    }
    let mut result: u128 = 1;
    for i in 0..k.min(n - k) {
        result = result.saturating_mul((n - i) as u128) / (i as u128 + 1);
    }
    result
}

/// Advances `subset` to the next k-combination of {0..n-1} in lexicographic
/// order; returns false after the last one.
fn next_combination(subset: &mut [usize], n: usize) -> bool {
    let k = subset.len();
    let mut i = k;
    while i > 0 {
        i -= 1;
        if subset[i] < n - k + i {
            subset[i] += 1;
            for j in i + 1..k {
                subset[j] = subset[j - 1] + 1;
            }
            return true;
        }
    }
    false
}

#[derive(Debug, Clone, Serialize)]
pub struct BestDepotResult {
    pub tour: Tour,
    pub chosen_depot: usize,
    pub expected_cost: f64,
}

/// Runs `inner` once per candidate depot (the instance with that customer's
/// probability raised to 1) and returns the candidate tour that is cheapest
/// on the ORIGINAL instance, ties broken by lowest candidate index.
pub fn best_depot_tour(
    inst: &Instance,
    inner: impl Fn(&Instance) -> Result<Tour>,
) -> Result<BestDepotResult> {
    let mut best: Option<BestDepotResult> = None;
    for v in 0..inst.n() {
        let modified = inst.with_depot(v);
        let tour = inner(&modified)?;
        let cost = expected_tour_cost_exact(inst, &tour);
        if best.as_ref().is_none_or(|b| cost < b.expected_cost) {
            best = Some(BestDepotResult {
                tour,
                chosen_depot: v,
                expected_cost: cost,
            });
        }
    }
    best.ok_or_else(|| Error::invalid("empty instance"))
}

/// Inner algorithm run on depot instances by [`solve_apriori`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum DepotAlgorithm {
    Sampling,
    Derandomized,
}

#[derive(Debug, Clone)]
pub struct SolveConfig {
    /// Approximation slack ε of the dispatch.
    pub epsilon: f64,
    pub policy: SamplingPolicy,
    pub tsp: TspKind,
    pub seed: u64,
    pub depot_algorithm: DepotAlgorithm,
    /// Declared guarantee ρ̂ of the depot algorithm; the dispatch threshold
    /// is 2ρ̂/ε.
    pub rho_hat: f64,
}

impl Default for SolveConfig {
    fn default() -> Self {
        SolveConfig {
            epsilon: 0.5,
            policy: SamplingPolicy::Power(0.663),
            tsp: TspKind::Christofides,
            seed: 0,
            depot_algorithm: DepotAlgorithm::Sampling,
            rho_hat: 3.1,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct SolveTrace {
    pub branch: &'static str,
    pub total_activity: f64,
    pub dispatch_threshold: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n_max: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub master_set: Option<Vec<usize>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub chosen_depot: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub estimator_trajectory: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub lp_value: Option<f64>,
}

#[derive(Debug, Clone, Serialize)]
pub struct SolveOutcome {
    pub tour: Tour,
    pub expected_cost: f64,
    pub trace: SolveTrace,
}

fn run_depot_algorithm(inst: &Instance, config: &SolveConfig) -> Result<(Tour, SolveTrace)> {
    match config.depot_algorithm {
        DepotAlgorithm::Sampling => {
            let (tour, mrs) = run_sampling_algorithm(inst, config.policy, config.tsp, config.seed)?;
            Ok((
                tour,
                SolveTrace {
                    branch: "depot-sampling",
                    total_activity: inst.total_activity(),
                    dispatch_threshold: 2.0 * config.rho_hat / config.epsilon,
                    n_max: None,
                    master_set: Some(mrs.master_set),
                    chosen_depot: inst.depot(),
                    estimator_trajectory: None,
                    lp_value: None,
                },
            ))
        }
        DepotAlgorithm::Derandomized => {
            let result = derandomized_master_route(inst, config.tsp)?;
            Ok((
                result.tour,
                SolveTrace {
                    branch: "depot-derandomized",
                    total_activity: inst.total_activity(),
                    dispatch_threshold: 2.0 * config.rho_hat / config.epsilon,
                    n_max: None,
                    master_set: Some(result.solution.master_set),
                    chosen_depot: inst.depot(),
                    estimator_trajectory: Some(result.estimator_trajectory),
                    lp_value: Some(result.lp_value),
                },
            ))
        }
    }
}

/// The general solver: depot instances go to the configured depot algorithm
/// directly; depotless instances with total activity below 2ρ̂/ε are solved
/// by low-activity enumeration, the rest by trying every customer as depot.
pub fn solve_apriori(inst: &Instance, config: &SolveConfig) -> Result<SolveOutcome> {
    let activity = inst.total_activity();
    let threshold = 2.0 * config.rho_hat / config.epsilon;
    if inst.depot().is_some() {
        let (tour, trace) = run_depot_algorithm(inst, config)?;
        let expected_cost = expected_tour_cost_exact(inst, &tour);
        return Ok(SolveOutcome {
            tour,
            expected_cost,
            trace,
        });
    }
    if activity < threshold {
        let n_max = low_activity_size_cap(activity, config.epsilon).min(inst.n());
        let result = solve_low_activity(inst, n_max)?;
        return Ok(SolveOutcome {
            tour: result.tour,
            expected_cost: result.expected_cost,
            trace: SolveTrace {
                branch: "low-activity",
                total_activity: activity,
                dispatch_threshold: threshold,
                n_max: Some(n_max),
                master_set: Some(result.master_set),
                chosen_depot: None,
                estimator_trajectory: None,
                lp_value: None,
            },
        });
    }
    let result = best_depot_tour(inst, |with_depot| {
        run_depot_algorithm(with_depot, config).map(|(tour, _)| tour)
    })?;
    Ok(SolveOutcome {
        expected_cost: result.expected_cost,
        trace: SolveTrace {
            branch: "best-depot",
            total_activity: activity,
            dispatch_threshold: threshold,
            n_max: None,
            master_set: None,
            chosen_depot: Some(result.chosen_depot),
            estimator_trajectory: None,
            lp_value: None,
        },
        tour: result.tour,
    })
}

/// Master-set size cap for the low-activity branch: with total activity k and
/// slack ε, a set of size 2k + ⌈max{2ek, 8/ε}⌉ carries all but an ε/4
/// fraction of the conditional mass (tail bound for sums of independent
/// Bernoulli variables).
pub fn low_activity_size_cap(total_activity: f64, epsilon: f64) -> usize {
    let k = total_activity;
    let ell = (2.0 * std::f64::consts::E * k).max(8.0 / epsilon).ceil();
    ((2.0 * k).ceil() + ell).max(2.0) as usize
}

/// Per-customer copy counts realizing the reduction to a uniform activation
/// probability ε, together with the projection back to the original
/// customers.
#[derive(Debug, Clone, Serialize)]
pub struct NormalizationPlan {
    pub epsilon: f64,
    pub lambda: f64,
    pub sigma: f64,
    /// Copy count per original customer (1 for the depot).
    pub copies: Vec<usize>,
    /// Projection copy index → original index.
    pub projection: Vec<usize>,
}

/// Slack for the numeric verification of the plan conditions; the conditions
/// are often exactly tight (e.g. p = ε·k).
const PLAN_TOL: f64 = 1e-9;

fn check_plan_conditions(p: f64, k: usize, epsilon: f64, lambda: f64, sigma: f64) -> Vec<String> {
    let kf = k as f64;
    let mut failures = Vec::new();
    let one_minus_eps_k = (1.0 - epsilon).powf(kf);
    let one_minus_sige_k = (1.0 - sigma * epsilon).powf(kf);
    // (1) 1−(1−ε)^k ≤ p ≤ ε·k
    if !(1.0 - one_minus_eps_k <= p + PLAN_TOL && p <= epsilon * kf + PLAN_TOL) {
        failures.push(format!("copy-count bracket violated for p={p}, k={k}"));
    }
    // (2) (1−p)^σ ≤ (1−σε)^k
    if (1.0 - p).powf(sigma) > one_minus_sige_k + PLAN_TOL {
        failures.push(format!("sampling upper bound violated for p={p}, k={k}"));
    }
    // (3) 1−(1−p)^σ ≤ (1+λ)(1−(1−σε)^k)
    if 1.0 - (1.0 - p).powf(sigma) > (1.0 + lambda) * (1.0 - one_minus_sige_k) + PLAN_TOL {
        failures.push(format!("sampling lower bound violated for p={p}, k={k}"));
    }
    // (4) (1−ε)^k ≤ (1+λ)(1−p)  (p < 1), or ≤ λ (p = 1)
    let bound = if p < 1.0 {
        (1.0 + lambda) * (1.0 - p)
    } else {
        lambda
    };
    if one_minus_eps_k > bound + PLAN_TOL {
        failures.push(format!("idle-probability bound violated for p={p}, k={k}"));
    }
    failures
}

impl NormalizationPlan {
    /// Re-checks all four conditions for every original customer.
    pub fn verify(&self, original: &Instance) -> Result<()> {
        let d = original.depot().ok_or(Error::DepotRequired {
            op: "NormalizationPlan::verify",
        })?;
        for v in 0..original.n() {
            if v == d {
                continue;
            }
            let failures = check_plan_conditions(
                original.p(v),
                self.copies[v],
                self.epsilon,
                self.lambda,
                self.sigma,
            );
            if !failures.is_empty() {
                return Err(Error::NormalizationInfeasible {
                    detail: failures.join("; "),
                });
            }
        }
        Ok(())
    }
}

/// Replaces every non-depot customer v by k_v copies with activation
/// probability ε (copies at mutual distance zero) such that the plan
/// conditions hold; fails if ε is not small enough for some customer.
///
/// Copy counts: k_v = ⌊ln(1−p)/ln(1−ε)⌋ for p < 1, and
/// k_v = ⌈max{1/ε, ln(λ/(1+λ))/ln(1−σε)}⌉ for p = 1.
pub fn normalize_instance(
    inst: &Instance,
    epsilon: f64,
    lambda: f64,
    sigma: f64,
) -> Result<(Instance, NormalizationPlan)> {
    let d = inst.depot().ok_or(Error::DepotRequired {
        op: "normalize_instance",
    })?;
    if !(epsilon > 0.0 && epsilon < 1.0) {
        return Err(Error::invalid("epsilon must lie in (0,1)"));
    }
    if lambda <= 0.0 {
        return Err(Error::invalid("lambda must be positive"));
    }
    if !(sigma > 0.0 && sigma < 1.0) {
        return Err(Error::invalid("sigma must lie in (0,1)"));
    }
    let n = inst.n();
    let mut copies = vec![0usize; n];
    copies[d] = 1;
    for v in 0..n {
        if v == d {
            continue;
        }
        let p = inst.p(v);
        let k = if p < 1.0 {
            ((1.0 - p).ln() / (1.0 - epsilon).ln()).floor() as i64
        } else {
            (1.0 / epsilon)
                .max((lambda / (1.0 + lambda)).ln() / (1.0 - sigma * epsilon).ln())
                .ceil() as i64
        };
        if k < 1 {
            return Err(Error::NormalizationInfeasible {
                detail: format!("customer {v} with p={p} admits no copy count at ε={epsilon}"),
            });
        }
        let failures = check_plan_conditions(p, k as usize, epsilon, lambda, sigma);
        if !failures.is_empty() {
            return Err(Error::NormalizationInfeasible {
                detail: format!("ε={epsilon} too large: {}", failures.join("; ")),
            });
        }
        copies[v] = k as usize;
    }
    // New instance: depot first, then the copies of each original customer
    // in index order.
    let mut projection = vec![d];
    for v in 0..n {
        if v == d {
            continue;
        }
        for _ in 0..copies[v] {
            projection.push(v);
        }
    }
    let total = projection.len();
    let mut matrix = vec![vec![0.0; total]; total];
    for a in 0..total {
        for b in 0..total {
            matrix[a][b] = inst.dist(projection[a], projection[b]);
        }
    }
    let mut p_new = vec![epsilon; total];
    p_new[0] = 1.0;
    let normalized = Instance::from_matrix(matrix, p_new, Some(0))?;
    Ok((
        normalized,
        NormalizationPlan {
            epsilon,
            lambda,
            sigma,
            copies,
            projection,
        },
    ))
}

/// Exact conditional expectation of the total connection cost
/// Σ_v 2·p(v)·E[c(v,S) | P ⊆ S ⊆ V∖P̄], where undecided customers enter S
/// independently with their activation probabilities. `in_set` must contain
/// the depot (S may never be empty).
///
/// Per customer, candidates are scanned in increasing distance (lowest index
/// on ties); a candidate is the nearest member of S exactly when every
/// strictly closer optional candidate is excluded.
pub fn conditional_connection_cost(inst: &Instance, in_set: &[bool], out_set: &[bool]) -> f64 {
    let n = inst.n();
    debug_assert!(in_set.iter().any(|&b| b), "P must contain the depot");
    debug_assert!((0..n).all(|v| !(in_set[v] && out_set[v])));
    let mut total = 0.0;
    for v in 0..n {
        let pv = inst.p(v);
        if pv == 0.0 {
            continue;
        }
        let mut candidates: Vec<usize> = (0..n).filter(|&u| !out_set[u]).collect();
        candidates.sort_by(|&a, &b| {
            inst.dist(v, a)
                .partial_cmp(&inst.dist(v, b))
                .unwrap()
                .then(a.cmp(&b))
        });
        let mut none_closer = 1.0;
        let mut expect = 0.0;
        for u in candidates {
            if in_set[u] {
                expect += none_closer * inst.dist(v, u);
                break;
            }
            let pu = inst.p(u);
            expect += none_closer * pu * inst.dist(v, u);
            none_closer *= 1.0 - pu;
            if none_closer == 0.0 {
                break;
            }
        }
        total += 2.0 * pv * expect;
    }
    total
}

/// Everything the derandomized algorithm produced, including the pessimistic
/// estimator trajectory (non-increasing by construction).
#[derive(Debug, Clone, Serialize)]
pub struct DerandResult {
    pub tour: Tour,
    pub solution: MasterRouteSolution,
    pub estimator_trajectory: Vec<f64>,
    pub lp_value: f64,
}

/// Edge values of the master-route LP relaxation: `buy[e]` for master-tour
/// edges and `rent[v][e]` for the per-customer connection edges.
struct MrLpSolution {
    value: f64,
    buy: Vec<f64>,
    rent: Vec<Vec<f64>>,
    pairs: Vec<(usize, usize)>,
}

/// Solves min Σ_e (Q·c(e)·b_e + Σ_v p(v)·c(e)·r_e^v) subject to
/// (b + r^v)(δ(U)) ≥ 2 for every v ∈ U ⊆ V∖{d}, by cutting planes with a
/// min v–d cut separation per customer.
fn solve_master_route_lp(inst: &Instance, depot: usize) -> Result<MrLpSolution> {
    let n = inst.n();
    let q_some_active: f64 = 1.0
        - (0..n)
            .filter(|&v| v != depot)
            .map(|v| 1.0 - inst.p(v))
            .product::<f64>();
    let mut pairs = Vec::new();
    for u in 0..n {
        for w in u + 1..n {
            pairs.push((u, w));
        }
    }
    let mut model = LpModel::new("master-route-solution", Sense::Minimize);
    let buy_vars: Vec<usize> = pairs
        .iter()
        .map(|&(u, w)| model.add_var(format!("b_{u}_{w}"), q_some_active * inst.dist(u, w), true))
        .collect();
    let mut rent_vars = vec![Vec::new(); n];
    for v in 0..n {
        if v == depot {
            continue;
        }
        rent_vars[v] = pairs
            .iter()
            .map(|&(u, w)| {
                model.add_var(format!("r_{u}_{w}_{v}"), inst.p(v) * inst.dist(u, w), true)
            })
            .collect();
    }
    let cut_terms = |v: usize, side: &[bool]| -> Vec<(usize, f64)> {
        let mut terms = Vec::new();
        for (e, &(a, b)) in pairs.iter().enumerate() {
            if side[a] != side[b] {
                terms.push((buy_vars[e], 1.0));
                terms.push((rent_vars[v][e], 1.0));
            }
        }
        terms
    };
    let mut added: std::collections::HashSet<(usize, u64)> = std::collections::HashSet::new();
    for v in 0..n {
        if v == depot {
            continue;
        }
        let mut side = vec![false; n];
        side[v] = true;
        model.add_constraint(
            format!("cut_{v}_single"),
            &cut_terms(v, &side),
            Relation::Ge,
            2.0,
        )?;
        added.insert((v, 1 << v));
    }
    loop {
        let sol = model.solve()?;
        let mut new_cuts = 0;
        for v in 0..n {
            if v == depot {
                continue;
            }
            let mut cap = vec![vec![0.0; n]; n];
            for (e, &(a, b)) in pairs.iter().enumerate() {
                let y = sol.values[buy_vars[e]] + sol.values[rent_vars[v][e]];
                cap[a][b] = y;
                cap[b][a] = y;
            }
            let (cut_value, mut side) = min_cut(&cap, v, depot);
            if cut_value < 2.0 - crate::tsp::CUT_TOL {
                side[depot] = false;
                let mut key = 0u64;
                for (i, &b) in side.iter().enumerate() {
                    if b {
                        key |= 1 << i;
                    }
                }
                if added.insert((v, key)) {
                    model.add_constraint(
                        format!("cut_{v}_{key}"),
                        &cut_terms(v, &side),
                        Relation::Ge,
                        2.0,
                    )?;
                    new_cuts += 1;
                }
            }
        }
        if new_cuts == 0 {
            let buy = buy_vars.iter().map(|&id| sol.values[id]).collect();
            let rent = (0..n)
                .map(|v| {
                    if v == depot {
                        Vec::new()
                    } else {
                        rent_vars[v].iter().map(|&id| sol.values[id]).collect()
                    }
                })
                .collect();
            return Ok(MrLpSolution {
                value: sol.value,
                buy,
                rent,
                pairs,
            });
        }
    }
}

/// Probability that at least two customers are active, conditioned on
/// P ⊆ S ⊆ V∖P̄ (the depot is in P, so this is 1 as soon as some other
/// customer is committed).
fn q_conditional(inst: &Instance, depot: usize, in_set: &[bool], out_set: &[bool]) -> f64 {
    let committed = in_set.iter().filter(|&&b| b).count();
    if committed >= 2 {
        return 1.0;
    }
    let mut none: f64 = 1.0;
    for v in 0..inst.n() {
        if v != depot && !in_set[v] && !out_set[v] {
            none *= 1.0 - inst.p(v);
        }
    }
    1.0 - none
}

/// Deterministic master-route algorithm: solves the master-route LP once,
/// then fixes customers one by one by comparing the pessimistic estimator
/// (conditional connection cost plus the LP-based master bound) for the two
/// outcomes.
pub fn derandomized_master_route(inst: &Instance, tsp_kind: TspKind) -> Result<DerandResult> {
    let depot = inst.depot().ok_or(Error::DepotRequired {
        op: "derandomized_master_route",
    })?;
    let n = inst.n();
    let lp = solve_master_route_lp(inst, depot)?;
    let alpha = tsp_kind.alpha_vs_subtour_lp();

    let master_bound = |in_set: &[bool], out_set: &[bool]| -> f64 {
        let q = q_conditional(inst, depot, in_set, out_set);
        let mut total = 0.0;
        for (e, &(u, w)) in lp.pairs.iter().enumerate() {
            let c = inst.dist(u, w);
            let mut weight = q * lp.buy[e];
            for v in 0..n {
                if v == depot {
                    continue;
                }
                if in_set[v] {
                    weight += lp.rent[v][e];
                } else if !out_set[v] {
                    weight += inst.p(v) * lp.rent[v][e];
                }
            }
            total += c * weight;
        }
        alpha * total
    };
    let estimator = |in_set: &[bool], out_set: &[bool]| -> f64 {
        conditional_connection_cost(inst, in_set, out_set) + master_bound(in_set, out_set)
    };

    let mut in_set = vec![false; n];
    let mut out_set = vec![false; n];
    in_set[depot] = true;
    let mut trajectory = vec![estimator(&in_set, &out_set)];
    for v in 0..n {
        if v == depot {
            continue;
        }
        in_set[v] = true;
        let with_v = estimator(&in_set, &out_set);
        in_set[v] = false;
        out_set[v] = true;
        let without_v = estimator(&in_set, &out_set);
        out_set[v] = false;
        let chosen = if with_v <= without_v {
            in_set[v] = true;
            with_v
        } else {
            out_set[v] = true;
            without_v
        };
        debug_assert!(
            chosen <= trajectory.last().unwrap() + 1e-9,
            "pessimistic estimator increased: {} -> {}",
            trajectory.last().unwrap(),
            chosen
        );
        trajectory.push(chosen);
    }
    let master_set: Vec<usize> = (0..n).filter(|&v| in_set[v]).collect();
    let (tour, solution) = build_master_route_tour(inst, &master_set, tsp_kind)?;
    Ok(DerandResult {
        tour,
        solution,
        estimator_trajectory: trajectory,
        lp_value: lp.value,
    })
}
