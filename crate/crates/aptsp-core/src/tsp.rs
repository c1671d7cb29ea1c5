//! Deterministic TSP subroutines with declared guarantees, plus the
//! subtour-elimination LP value used by the derandomized algorithm.
//!
//! Every solver works on an arbitrary subset of an instance's customers and
//! returns the tour, its cost, and the guarantee of the code path actually
//! taken: 1 for exact dynamic programming, 1.5 for Christofides with exact
//! matching, 2 for the double-tree and matching fallbacks.

use serde::Serialize;

use crate::instance::{cycle_cost, Instance};
use crate::lp::model::{LpModel, Relation, Sense};
use crate::{Error, Result};

/// Which TSP subroutine to run.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum TspKind {
    Exact,
    Christofides,
    DoubleTree,
}

impl TspKind {
    /// Guarantee relative to the subtour-elimination LP value, as used by the
    /// pessimistic estimator of the derandomized algorithm. The exact solver
    /// also gets 1.5: an optimum tour costs at most 3/2 times the subtour
    /// bound, and nothing stronger is known.
    pub fn alpha_vs_subtour_lp(self) -> f64 {
        match self {
            TspKind::Exact | TspKind::Christofides => 1.5,
            TspKind::DoubleTree => 2.0,
        }
    }
}

impl std::str::FromStr for TspKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "exact" => Ok(TspKind::Exact),
            "christofides" => Ok(TspKind::Christofides),
            "double-tree" => Ok(TspKind::DoubleTree),
            other => Err(Error::invalid(format!(
                "unknown tsp solver {other:?}; expected exact|christofides|double-tree"
            ))),
        }
    }
}

impl std::fmt::Display for TspKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            TspKind::Exact => "exact",
            TspKind::Christofides => "christofides",
            TspKind::DoubleTree => "double-tree",
        })
    }
}

/// Tour over a subset together with its cost and the declared guarantee α of
/// the code path that produced it.
#[derive(Debug, Clone, Serialize)]
pub struct TspResult {
    pub tour: Vec<usize>,
    pub cost: f64,
    pub guarantee: f64,
}

/// Dispatches to the requested solver.
pub fn solve_tsp(inst: &Instance, subset: &[usize], kind: TspKind) -> Result<TspResult> {
    match kind {
        TspKind::Exact => held_karp(inst, subset),
        TspKind::Christofides => Ok(christofides(inst, subset)),
        TspKind::DoubleTree => Ok(double_tree(inst, subset)),
    }
}

pub const HELD_KARP_LIMIT: usize = 20;

/// Exact optimum cycle via bitmask dynamic programming; guarantee 1.
pub fn held_karp(inst: &Instance, subset: &[usize]) -> Result<TspResult> {
    let k = subset.len();
    if k > HELD_KARP_LIMIT {
        return Err(Error::SizeLimit {
            op: "held_karp",
            limit: HELD_KARP_LIMIT,
            actual: k,
        });
    }
    let mut nodes = subset.to_vec();
    nodes.sort_unstable();
    if k <= 2 {
        let cost = cycle_cost(inst, &nodes);
        return Ok(TspResult {
            tour: nodes,
            cost,
            guarantee: 1.0,
        });
    }
    // Paths start at nodes[0]; dp is indexed by subsets of the remaining
    // m = k-1 customers and the position of the last one.
    let m = k - 1;
    let full = 1usize << m;
    let dist = |a: usize, b: usize| -> f64 { inst.dist(nodes[a], nodes[b]) };
    let mut dp = vec![f64::INFINITY; full * m];
    let mut parent = vec![usize::MAX; full * m];
    for last in 0..m {
        dp[(1 << last) * m + last] = dist(0, last + 1);
    }
    for mask in 1..full {
        for last in 0..m {
            if mask & (1 << last) == 0 {
                continue;
            }
            let cur = dp[mask * m + last];
            if !cur.is_finite() {
                continue;
            }
            let rest = (!mask) & (full - 1);
            let mut next_bits = rest;
            while next_bits != 0 {
                let nxt = next_bits.trailing_zeros() as usize;
                next_bits &= next_bits - 1;
                let nm = mask | (1 << nxt);
                let cand = cur + dist(last + 1, nxt + 1);
                if cand < dp[nm * m + nxt] {
                    dp[nm * m + nxt] = cand;
                    parent[nm * m + nxt] = last;
                }
            }
        }
    }
    let mut best = f64::INFINITY;
    let mut best_last = 0;
    for last in 0..m {
        let cand = dp[(full - 1) * m + last] + dist(last + 1, 0);
        if cand < best {
            best = cand;
            best_last = last;
        }
    }
    let mut order_local = vec![0usize];
    let mut seq = Vec::with_capacity(m);
    let mut mask = full - 1;
    let mut last = best_last;
    while last != usize::MAX {
        seq.push(last + 1);
        let prev = parent[mask * m + last];
        mask &= !(1 << last);
        last = prev;
    }
    seq.reverse();
    order_local.extend(seq);
    let tour: Vec<usize> = order_local.into_iter().map(|i| nodes[i]).collect();
    let cost = cycle_cost(inst, &tour);
    debug_assert!((cost - best).abs() <= 1e-9 * (1.0 + best.abs()));
    Ok(TspResult {
        tour,
        cost,
        guarantee: 1.0,
    })
}

/// Minimum spanning tree over `nodes` (local indices), Prim with
/// lowest-index tie-breaks. Returns (edges, cost).
fn mst_local(inst: &Instance, nodes: &[usize]) -> (Vec<(usize, usize)>, f64) {
    let k = nodes.len();
    if k <= 1 {
        return (Vec::new(), 0.0);
    }
    let mut in_tree = vec![false; k];
    let mut key = vec![f64::INFINITY; k];
    let mut parent = vec![usize::MAX; k];
    in_tree[0] = true;
    for v in 1..k {
        key[v] = inst.dist(nodes[0], nodes[v]);
        parent[v] = 0;
    }
    let mut edges = Vec::with_capacity(k - 1);
    let mut cost = 0.0;
    for _ in 1..k {
        let mut pick = usize::MAX;
        let mut pick_key = f64::INFINITY;
        for v in 0..k {
            if !in_tree[v] && key[v] < pick_key {
                pick = v;
                pick_key = key[v];
            }
        }
        in_tree[pick] = true;
        cost += pick_key;
        edges.push((parent[pick].min(pick), parent[pick].max(pick)));
        for v in 0..k {
            if !in_tree[v] {
                let d = inst.dist(nodes[pick], nodes[v]);
                if d < key[v] {
                    key[v] = d;
                    parent[v] = pick;
                }
            }
        }
    }
    (edges, cost)
}

/// Cost of the minimum spanning tree on a subset.
pub fn mst_cost(inst: &Instance, subset: &[usize]) -> f64 {
    let mut nodes = subset.to_vec();
    nodes.sort_unstable();
    mst_local(inst, &nodes).1
}

/// MST + preorder shortcut; guarantee 2.
pub fn double_tree(inst: &Instance, subset: &[usize]) -> TspResult {
    let mut nodes = subset.to_vec();
    nodes.sort_unstable();
    let k = nodes.len();
    assert!(k >= 1, "double_tree requires a nonempty subset");
    if k <= 2 {
        let cost = cycle_cost(inst, &nodes);
        return TspResult {
            tour: nodes,
            cost,
            guarantee: 2.0,
        };
    }
    let (edges, _) = mst_local(inst, &nodes);
    let mut adj = vec![Vec::new(); k];
    for &(u, v) in &edges {
        adj[u].push(v);
        adj[v].push(u);
    }
    for a in &mut adj {
        a.sort_unstable();
    }
    // Iterative preorder from local node 0, children in ascending order.
    let mut order_local = Vec::with_capacity(k);
    let mut visited = vec![false; k];
    let mut stack = vec![0usize];
    while let Some(v) = stack.pop() {
        if visited[v] {
            continue;
        }
        visited[v] = true;
        order_local.push(v);
        for &u in adj[v].iter().rev() {
            if !visited[u] {
                stack.push(u);
            }
        }
    }
    let tour: Vec<usize> = order_local.into_iter().map(|i| nodes[i]).collect();
    let cost = cycle_cost(inst, &tour);
    TspResult {
        tour,
        cost,
        guarantee: 2.0,
    }
}

const MATCHING_DP_LIMIT: usize = 20;

/// Minimum-weight perfect matching on the nodes listed in `odd` (local
/// indices into `nodes`) by subset DP, O(2^k k^2). Exactly optimal.
fn matching_dp(inst: &Instance, nodes: &[usize], odd: &[usize]) -> Vec<(usize, usize)> {
    let k = odd.len();
    debug_assert!(k % 2 == 0 && k <= MATCHING_DP_LIMIT);
    if k == 0 {
        return Vec::new();
    }
    let full = 1usize << k;
    let mut dp = vec![f64::INFINITY; full];
    let mut choice = vec![0u32; full];
    dp[0] = 0.0;
    for mask in 1..full {
        if mask.count_ones() % 2 == 1 {
            continue;
        }
        let i = mask.trailing_zeros() as usize;
        let mut rest = mask & !(1 << i);
        while rest != 0 {
            let j = rest.trailing_zeros() as usize;
            rest &= rest - 1;
            let prev = mask & !(1 << i) & !(1 << j);
            let cand = dp[prev] + inst.dist(nodes[odd[i]], nodes[odd[j]]);
            if cand < dp[mask] {
                dp[mask] = cand;
                choice[mask] = j as u32;
            }
        }
    }
    let mut pairs = Vec::with_capacity(k / 2);
    let mut mask = full - 1;
    while mask != 0 {
        let i = mask.trailing_zeros() as usize;
        let j = choice[mask] as usize;
        pairs.push((odd[i], odd[j]));
        mask &= !(1 << i) & !(1 << j);
    }
    pairs
}

/// Greedy fallback matching: repeatedly pair the globally closest unmatched
/// odd vertices. No approximation guarantee of its own.
fn matching_greedy(inst: &Instance, nodes: &[usize], odd: &[usize]) -> Vec<(usize, usize)> {
    let mut unmatched: Vec<usize> = odd.to_vec();
    let mut pairs = Vec::with_capacity(odd.len() / 2);
    while unmatched.len() >= 2 {
        let mut best = (0usize, 1usize);
        let mut best_d = f64::INFINITY;
        for a in 0..unmatched.len() {
            for b in a + 1..unmatched.len() {
                let d = inst.dist(nodes[unmatched[a]], nodes[unmatched[b]]);
                if d < best_d {
                    best_d = d;
                    best = (a, b);
                }
            }
        }
        let (a, b) = best;
        pairs.push((unmatched[a], unmatched[b]));
        unmatched.remove(b);
        unmatched.remove(a);
    }
    pairs
}

/// Euler circuit of the connected multigraph given by `edges` on `k` local
/// nodes (Hierholzer), then shortcut to the first occurrence of each node.
fn euler_shortcut(k: usize, edges: &[(usize, usize)]) -> Vec<usize> {
    let mut adj: Vec<Vec<(usize, usize)>> = vec![Vec::new(); k];
    for (id, &(u, v)) in edges.iter().enumerate() {
        adj[u].push((v, id));
        adj[v].push((u, id));
    }
    for a in &mut adj {
        a.sort_unstable();
    }
    let mut used = vec![false; edges.len()];
    let mut cursor = vec![0usize; k];
    let mut stack = vec![0usize];
    let mut circuit = Vec::with_capacity(edges.len() + 1);
    while let Some(&v) = stack.last() {
        let mut advanced = false;
        while cursor[v] < adj[v].len() {
            let (u, id) = adj[v][cursor[v]];
            cursor[v] += 1;
            if !used[id] {
                used[id] = true;
                stack.push(u);
                advanced = true;
                break;
            }
        }
        if !advanced {
            circuit.push(v);
            stack.pop();
        }
    }
    let mut seen = vec![false; k];
    let mut order = Vec::with_capacity(k);
    for &v in circuit.iter().rev() {
        if !seen[v] {
            seen[v] = true;
            order.push(v);
        }
    }
    order
}

/// MST + minimum-weight perfect matching on the odd-degree vertices + Euler
/// shortcut. Guarantee 1.5 with the exact matching; if the odd set is too
/// large for the DP, falls back to the cheaper of greedy matching and the
/// double tree, reported with guarantee 2.
pub fn christofides(inst: &Instance, subset: &[usize]) -> TspResult {
    let mut nodes = subset.to_vec();
    nodes.sort_unstable();
    let k = nodes.len();
    assert!(k >= 1, "christofides requires a nonempty subset");
    if k <= 3 {
        let cost = cycle_cost(inst, &nodes);
        return TspResult {
            tour: nodes,
            cost,
            guarantee: 1.5,
        };
    }
    let (mst_edges, _) = mst_local(inst, &nodes);
    let mut degree = vec![0usize; k];
    for &(u, v) in &mst_edges {
        degree[u] += 1;
        degree[v] += 1;
    }
    let odd: Vec<usize> = (0..k).filter(|&v| degree[v] % 2 == 1).collect();
    let exact_matching = odd.len() <= MATCHING_DP_LIMIT;
    let pairs = if exact_matching {
        matching_dp(inst, &nodes, &odd)
    } else {
        matching_greedy(inst, &nodes, &odd)
    };
    let mut multi = mst_edges;
    multi.extend(pairs);
    let order_local = euler_shortcut(k, &multi);
    let tour: Vec<usize> = order_local.into_iter().map(|i| nodes[i]).collect();
    let cost = cycle_cost(inst, &tour);
    if exact_matching {
        TspResult {
            tour,
            cost,
            guarantee: 1.5,
        }
    } else {
        // The greedy matching certifies nothing; the double tree does.
        let dt = double_tree(inst, subset);
        if dt.cost < cost {
            dt
        } else {
            TspResult {
                tour,
                cost,
                guarantee: 2.0,
            }
        }
    }
}

/// Cut-separation tolerance for the subtour-elimination LP.
pub const CUT_TOL: f64 = 1e-7;

/// Optimal value of `min Σ c(e)·y_e` subject to `y(δ(U)) ≥ 2` for every `U`
/// separating the subset and `y ≥ 0`, solved by cutting planes with min-cut
/// separation. Returns the value and the edge solution keyed by customer
/// pairs.
pub fn subtour_lp_value(
    inst: &Instance,
    subset: &[usize],
) -> Result<(f64, Vec<((usize, usize), f64)>)> {
    let mut nodes = subset.to_vec();
    nodes.sort_unstable();
    let k = nodes.len();
    if k < 2 {
        return Err(Error::invalid("subtour LP needs at least two customers"));
    }
    let mut model = LpModel::new("subtour", Sense::Minimize);
    let mut evar = vec![vec![usize::MAX; k]; k];
    for i in 0..k {
        for j in i + 1..k {
            let id = model.add_var(format!("y_{i}_{j}"), inst.dist(nodes[i], nodes[j]), true);
            evar[i][j] = id;
            evar[j][i] = id;
        }
    }
    let mut added: std::collections::HashSet<u64> = std::collections::HashSet::new();
    let cut_row = |side: &[bool]| -> Vec<(usize, f64)> {
        let mut terms = Vec::new();
        for i in 0..k {
            if !side[i] {
                continue;
            }
            for j in 0..k {
                if !side[j] {
                    terms.push((evar[i][j], 1.0));
                }
            }
        }
        terms
    };
    // Degree cuts first.
    for v in 0..k {
        let mut side = vec![false; k];
        side[v] = true;
        let terms = cut_row(&side);
        model.add_constraint(format!("deg_{v}"), &terms, Relation::Ge, 2.0)?;
        added.insert(side_key(&side));
    }
    loop {
        let sol = model.solve()?;
        let mut cap = vec![vec![0.0f64; k]; k];
        for i in 0..k {
            for j in i + 1..k {
                let y = sol.values[evar[i][j]];
                cap[i][j] = y;
                cap[j][i] = y;
            }
        }
        let mut new_cuts = 0;
        for t in 1..k {
            let (cut_value, mut side) = min_cut(&cap, 0, t);
            if cut_value < 2.0 - CUT_TOL {
                // Normalize to the side not containing the root.
                for b in side.iter_mut() {
                    *b = !*b;
                }
                let key = side_key(&side);
                if added.insert(key) {
                    let terms = cut_row(&side);
                    model.add_constraint(
                        format!("cut_{}", added.len()),
                        &terms,
                        Relation::Ge,
                        2.0,
                    )?;
                    new_cuts += 1;
                }
            }
        }
        if new_cuts == 0 {
            let mut edges = Vec::new();
            for i in 0..k {
                for j in i + 1..k {
                    let y = sol.values[evar[i][j]];
                    if y > 1e-12 {
                        edges.push(((nodes[i], nodes[j]), y));
                    }
                }
            }
            return Ok((sol.value, edges));
        }
    }
}

fn side_key(side: &[bool]) -> u64 {
    let mut key = 0u64;
    for (i, &b) in side.iter().enumerate() {
        if b {
            key |= 1 << i;
        }
    }
    key
}

/// Minimum s-t cut in an undirected dense graph via Edmonds-Karp.
/// Returns the cut value and the s-side indicator.
pub(crate) fn min_cut(cap: &[Vec<f64>], s: usize, t: usize) -> (f64, Vec<bool>) {
    const EPS: f64 = 1e-12;
    let k = cap.len();
    let mut residual: Vec<Vec<f64>> = cap.to_vec();
    let mut flow = 0.0;
    loop {
        // BFS for a shortest augmenting path.
        let mut parent = vec![usize::MAX; k];
        let mut queue = std::collections::VecDeque::new();
        parent[s] = s;
        queue.push_back(s);
        while let Some(u) = queue.pop_front() {
            for v in 0..k {
                if parent[v] == usize::MAX && residual[u][v] > EPS {
                    parent[v] = u;
                    if v == t {
                        queue.clear();
                        break;
                    }
                    queue.push_back(v);
                }
            }
            if parent[t] != usize::MAX {
                break;
            }
        }
        if parent[t] == usize::MAX {
            break;
        }
        let mut bottleneck = f64::INFINITY;
        let mut v = t;
        while v != s {
            let u = parent[v];
            bottleneck = bottleneck.min(residual[u][v]);
            v = u;
        }
        let mut v = t;
        while v != s {
            let u = parent[v];
            residual[u][v] -= bottleneck;
            residual[v][u] += bottleneck;
            v = u;
        }
        flow += bottleneck;
    }
    let mut side = vec![false; k];
    let mut queue = std::collections::VecDeque::new();
    side[s] = true;
    queue.push_back(s);
    while let Some(u) = queue.pop_front() {
        for v in 0..k {
            if !side[v] && residual[u][v] > EPS {
                side[v] = true;
                queue.push_back(v);
            }
        }
    }
    (flow, side)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::prelude::*;
    use rand_chacha::ChaCha12Rng;

    fn random_euclidean(n: usize, seed: u64) -> Instance {
        let mut rng = ChaCha12Rng::seed_from_u64(seed);
        let pts: Vec<(f64, f64)> = (0..n)
            .map(|_| (rng.random_range(0.0..100.0), rng.random_range(0.0..100.0)))
            .collect();
        Instance::from_points(&pts, vec![1.0; n], None).unwrap()
    }

    fn permutation_brute_force(inst: &Instance, subset: &[usize]) -> f64 {
        let mut nodes = subset.to_vec();
        nodes.sort_unstable();
        if nodes.len() < 3 {
            return cycle_cost(inst, &nodes);
        }
        let first = nodes[0];
        let rest = nodes[1..].to_vec();
        let mut best = f64::INFINITY;
        permute(&mut rest.clone(), 0, &mut |perm| {
            let mut order = vec![first];
            order.extend_from_slice(perm);
            best = best.min(cycle_cost(inst, &order));
        });
        best
    }

    fn permute(items: &mut Vec<usize>, k: usize, f: &mut impl FnMut(&[usize])) {
        if k == items.len() {
            f(items);
            return;
        }
        for i in k..items.len() {
            items.swap(k, i);
            permute(items, k + 1, f);
            items.swap(k, i);
        }
    }

    #[test]
    fn held_karp_small_subsets() {
        let inst = random_euclidean(6, 1);
        let single = held_karp(&inst, &[3]).unwrap();
        assert_eq!(single.cost, 0.0);
        let pair = held_karp(&inst, &[1, 4]).unwrap();
        assert!((pair.cost - 2.0 * inst.dist(1, 4)).abs() < 1e-12);
    }

    #[test]
    fn held_karp_uniform_metric() {
        let inst = Instance::uniform_metric(9, vec![1.0; 9], None).unwrap();
        for k in 3..=9 {
            let subset: Vec<usize> = (0..k).collect();
            let res = held_karp(&inst, &subset).unwrap();
            assert!((res.cost - k as f64).abs() < 1e-12);
            assert_eq!(res.guarantee, 1.0);
        }
    }

    #[test]
    fn held_karp_matches_permutation_brute_force() {
        for seed in 0..50 {
            let n = 5 + (seed as usize) % 5; // 5..=9
            let inst = random_euclidean(n, seed);
            let subset: Vec<usize> = (0..n).collect();
            let hk = held_karp(&inst, &subset).unwrap();
            let bf = permutation_brute_force(&inst, &subset);
            assert!(
                (hk.cost - bf).abs() < 1e-9,
                "seed {seed}: hk {} != bf {}",
                hk.cost,
                bf
            );
        }
    }

    #[test]
    fn held_karp_limit() {
        let inst = Instance::uniform_metric(25, vec![1.0; 25], None).unwrap();
        let subset: Vec<usize> = (0..21).collect();
        assert!(matches!(
            held_karp(&inst, &subset),
            Err(Error::SizeLimit { .. })
        ));
    }

    #[test]
    fn double_tree_within_factor_two() {
        for seed in 0..8 {
            let inst = random_euclidean(12, seed + 100);
            let subset: Vec<usize> = (0..12).collect();
            let dt = double_tree(&inst, &subset);
            let hk = held_karp(&inst, &subset).unwrap();
            assert!(dt.cost <= 2.0 * hk.cost + 1e-9);
            assert!(dt.cost >= hk.cost - 1e-9);
            assert_eq!(dt.guarantee, 2.0);
        }
    }

    #[test]
    fn double_tree_on_path_metric() {
        // Points on a line: the MST is the path, so the tour costs at most
        // twice the path length.
        let pts: Vec<(f64, f64)> = (0..8).map(|i| (i as f64, 0.0)).collect();
        let inst = Instance::from_points(&pts, vec![1.0; 8], None).unwrap();
        let dt = double_tree(&inst, &(0..8).collect::<Vec<_>>());
        assert!(dt.cost <= 2.0 * 7.0 + 1e-12);
    }

    #[test]
    fn christofides_within_factor_1_5() {
        for seed in 0..8 {
            let inst = random_euclidean(12, seed + 200);
            let subset: Vec<usize> = (0..12).collect();
            let ch = christofides(&inst, &subset);
            let hk = held_karp(&inst, &subset).unwrap();
            assert_eq!(ch.guarantee, 1.5);
            assert!(
                ch.cost <= 1.5 * hk.cost + 1e-9,
                "seed {seed}: {} > 1.5*{}",
                ch.cost,
                hk.cost
            );
        }
    }

    #[test]
    fn christofides_on_path_mst_metric() {
        // Points on a line: the MST is the Hamiltonian path, its odd-degree
        // vertices are the two endpoints, and the Euler shortcut costs at
        // most MST + matching (here exactly twice the path length).
        let pts: Vec<(f64, f64)> = [0.0, 1.0, 2.5, 4.0, 7.0, 11.0]
            .iter()
            .map(|&x| (x, 0.0))
            .collect();
        let inst = Instance::from_points(&pts, vec![1.0; 6], None).unwrap();
        let subset: Vec<usize> = (0..6).collect();
        let ch = christofides(&inst, &subset);
        let mst = mst_cost(&inst, &subset);
        let matching = inst.dist(0, 5);
        assert!(ch.cost <= mst + matching + 1e-12);
        assert!((ch.cost - 22.0).abs() < 1e-12);
    }

    #[test]
    fn christofides_uniform_four() {
        let inst = Instance::uniform_metric(4, vec![1.0; 4], None).unwrap();
        let ch = christofides(&inst, &[0, 1, 2, 3]);
        assert!((ch.cost - 4.0).abs() < 1e-12);
    }

    #[test]
    fn tours_are_permutations_of_subset() {
        let inst = random_euclidean(10, 7);
        let subset = vec![0, 2, 3, 5, 7, 9];
        for res in [
            held_karp(&inst, &subset).unwrap(),
            double_tree(&inst, &subset),
            christofides(&inst, &subset),
        ] {
            let mut sorted = res.tour.clone();
            sorted.sort_unstable();
            assert_eq!(sorted, subset);
            assert!((res.cost - cycle_cost(&inst, &res.tour)).abs() < 1e-9);
        }
    }

    #[test]
    fn subtour_lp_triangle() {
        let inst = Instance::uniform_metric(5, vec![1.0; 5], None).unwrap();
        let (value, _) = subtour_lp_value(&inst, &[0, 1, 2]).unwrap();
        assert!((value - 3.0).abs() < 1e-6);
    }

    #[test]
    fn subtour_lp_bounds() {
        for seed in 0..6 {
            let inst = random_euclidean(10, seed + 300);
            let subset: Vec<usize> = (0..10).collect();
            let (value, _) = subtour_lp_value(&inst, &subset).unwrap();
            let hk = held_karp(&inst, &subset).unwrap();
            let mst = mst_cost(&inst, &subset);
            assert!(value <= hk.cost + 1e-6, "lp {} > opt {}", value, hk.cost);
            assert!(value >= mst - 1e-6, "lp {} < mst {}", value, mst);
        }
    }

    #[test]
    fn subtour_lp_pair() {
        let inst = random_euclidean(4, 9);
        let (value, edges) = subtour_lp_value(&inst, &[1, 3]).unwrap();
        assert!((value - 2.0 * inst.dist(1, 3)).abs() < 1e-9);
        assert_eq!(edges.len(), 1);
    }

    #[test]
    fn min_cut_simple() {
        // 0-1 heavy, 1-2 light: min cut between 0 and 2 is the light edge.
        let cap = vec![
            vec![0.0, 5.0, 0.0],
            vec![5.0, 0.0, 1.0],
            vec![0.0, 1.0, 0.0],
        ];
        let (value, side) = min_cut(&cap, 0, 2);
        assert!((value - 1.0).abs() < 1e-12);
        assert_eq!(side, vec![true, true, false]);
    }
}
