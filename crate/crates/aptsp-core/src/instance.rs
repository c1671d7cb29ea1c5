//! Instances, tours, active sets, and the primitive metric operations every
//! other module consumes.
//!
//! An [`Instance`] is a dense symmetric cost matrix plus per-customer
//! activation probabilities and an optional depot (a customer with
//! probability 1). All types are immutable after construction and all
//! operations are pure functions, so everything is safe to share across
//! threads.

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Absolute tolerance for the triangle-inequality check during validation.
/// Computations never rely on this tolerance.
pub const TRIANGLE_TOL: f64 = 1e-9;

/// A finite (semi-)metric space with activation probabilities.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "InstanceJson", into = "InstanceJson")]
pub struct Instance {
    n: usize,
    /// Row-major `n × n` cost matrix.
    dist: Vec<f64>,
    p: Vec<f64>,
    depot: Option<usize>,
    names: Option<Vec<String>>,
}

/// Wire format: `{"n", "matrix", "p", "depot", "names"?}`.
#[derive(Serialize, Deserialize)]
struct InstanceJson {
    n: usize,
    matrix: Vec<Vec<f64>>,
    p: Vec<f64>,
    depot: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    names: Option<Vec<String>>,
}

impl TryFrom<InstanceJson> for Instance {
    type Error = Error;
    fn try_from(raw: InstanceJson) -> Result<Self> {
        Instance::from_matrix_opts(raw.matrix, raw.p, raw.depot, raw.names)
    }
}

impl From<Instance> for InstanceJson {
    fn from(inst: Instance) -> Self {
        let matrix = (0..inst.n)
            .map(|i| inst.dist[i * inst.n..(i + 1) * inst.n].to_vec())
            .collect();
        InstanceJson {
            n: inst.n,
            matrix,
            p: inst.p,
            depot: inst.depot,
            names: inst.names,
        }
    }
}

impl Instance {
    /// Builds an instance from a dense matrix. Only structural consistency is
    /// enforced here (dimensions, index ranges); metric and probability
    /// violations are data for [`Instance::validate`].
    pub fn from_matrix(matrix: Vec<Vec<f64>>, p: Vec<f64>, depot: Option<usize>) -> Result<Self> {
        Self::from_matrix_opts(matrix, p, depot, None)
    }

    pub fn from_matrix_opts(
        matrix: Vec<Vec<f64>>,
        p: Vec<f64>,
        depot: Option<usize>,
        names: Option<Vec<String>>,
    ) -> Result<Self> {
        let n = matrix.len();
        if matrix.iter().any(|row| row.len() != n) {
            return Err(Error::invalid("matrix is not square"));
        }
        if p.len() != n {
            return Err(Error::invalid(format!(
                "probability vector has length {}, expected {n}",
                p.len()
            )));
        }
        if let Some(d) = depot {
            if d >= n {
                return Err(Error::invalid(format!("depot index {d} out of range")));
            }
        }
        if let Some(ref names) = names {
            if names.len() != n {
                return Err(Error::invalid("names length does not match n"));
            }
        }
        let dist = matrix.into_iter().flatten().collect();
        Ok(Instance {
            n,
            dist,
            p,
            depot,
            names,
        })
    }

    /// Euclidean instance from 2-D points.
    pub fn from_points(points: &[(f64, f64)], p: Vec<f64>, depot: Option<usize>) -> Result<Self> {
        let n = points.len();
        let mut matrix = vec![vec![0.0; n]; n];
        for i in 0..n {
            for j in 0..n {
                let dx = points[i].0 - points[j].0;
                let dy = points[i].1 - points[j].1;
                matrix[i][j] = (dx * dx + dy * dy).sqrt();
            }
        }
        Self::from_matrix(matrix, p, depot)
    }

    /// All off-diagonal distances equal to 1.
    pub fn uniform_metric(n: usize, p: Vec<f64>, depot: Option<usize>) -> Result<Self> {
        let mut matrix = vec![vec![1.0; n]; n];
        for (i, row) in matrix.iter_mut().enumerate() {
            row[i] = 0.0;
        }
        Self::from_matrix(matrix, p, depot)
    }

    /// Metric closure of a cycle: `c(v_i, v_j) = min{|j-i|, n-|j-i|}`.
    pub fn cycle_closure_metric(n: usize, p: Vec<f64>, depot: Option<usize>) -> Result<Self> {
        let mut matrix = vec![vec![0.0; n]; n];
        for i in 0..n {
            for j in 0..n {
                let k = (i as i64 - j as i64).unsigned_abs() as usize;
                matrix[i][j] = k.min(n - k) as f64;
            }
        }
        Self::from_matrix(matrix, p, depot)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn dist(&self, u: usize, v: usize) -> f64 {
        self.dist[u * self.n + v]
    }

    pub fn p(&self, v: usize) -> f64 {
        self.p[v]
    }

    pub fn probabilities(&self) -> &[f64] {
        &self.p
    }

    pub fn depot(&self) -> Option<usize> {
        self.depot
    }

    pub fn names(&self) -> Option<&[String]> {
        self.names.as_deref()
    }

    /// Sum of activation probabilities (the expected number of active
    /// customers).
    pub fn total_activity(&self) -> f64 {
        self.p.iter().sum()
    }

    /// Copy of this instance with customer `v` turned into the depot
    /// (`p(v) = 1`).
    pub fn with_depot(&self, v: usize) -> Instance {
        let mut inst = self.clone();
        inst.p[v] = 1.0;
        inst.depot = Some(v);
        inst
    }

    /// Checks the standing metric and probability assumptions and returns all
    /// violations as data. `mode` controls whether zero off-diagonal
    /// distances are permitted (semi-metric) or flagged.
    pub fn validate(&self, mode: MetricMode) -> ValidationReport {
        let mut violations = Vec::new();
        let n = self.n;
        for u in 0..n {
            if self.dist(u, u) != 0.0 {
                violations.push(Violation::NonzeroDiagonal { v: u });
            }
            for v in 0..n {
                let c = self.dist(u, v);
                if c < 0.0 {
                    violations.push(Violation::NegativeEntry { u, v });
                }
                if v > u {
                    if (c - self.dist(v, u)).abs() > 0.0 {
                        violations.push(Violation::Asymmetry { u, v });
                    }
                    if mode == MetricMode::Strict && c == 0.0 {
                        violations.push(Violation::ZeroOffDiagonal { u, v });
                    }
                }
            }
        }
        'triangle: for u in 0..n {
            for w in 0..n {
                if w == u {
                    continue;
                }
                let direct = self.dist(u, w);
                for t in 0..n {
                    if t == u || t == w {
                        continue;
                    }
                    if direct > self.dist(u, t) + self.dist(t, w) + TRIANGLE_TOL {
                        violations.push(Violation::TriangleViolation { u, via: t, w });
                        // One witness per report keeps the output readable.
                        break 'triangle;
                    }
                }
            }
        }
        for (v, &pv) in self.p.iter().enumerate() {
            if !(pv > 0.0 && pv <= 1.0) {
                violations.push(Violation::ProbabilityOutOfRange { v, p: pv });
            }
        }
        if let Some(d) = self.depot {
            if self.p[d] != 1.0 {
                violations.push(Violation::DepotNotAlwaysActive {
                    depot: d,
                    p: self.p[d],
                });
            }
        }
        ValidationReport { violations }
    }

    /// Cost of the cycle over the active customers in tour order. Returns 0
    /// when fewer than two customers are active (the tour is cut short to a
    /// single point).
    pub fn shortcut_cost(&self, tour: &Tour, active: &ActiveSet) -> f64 {
        let mut is_active = vec![false; self.n];
        for &v in &active.members {
            is_active[v] = true;
        }
        self.shortcut_cost_by_flags(tour, &is_active)
    }

    /// Same as [`Instance::shortcut_cost`] with the active set given as a
    /// flag vector (hot path for Monte-Carlo sampling).
    pub fn shortcut_cost_by_flags(&self, tour: &Tour, is_active: &[bool]) -> f64 {
        let mut first: Option<usize> = None;
        let mut prev: Option<usize> = None;
        let mut cost = 0.0;
        let mut count = 0usize;
        for &v in &tour.order {
            if !is_active[v] {
                continue;
            }
            count += 1;
            match prev {
                None => first = Some(v),
                Some(u) => cost += self.dist(u, v),
            }
            prev = Some(v);
        }
        if count < 2 {
            return 0.0;
        }
        cost + self.dist(prev.unwrap(), first.unwrap())
    }

    /// Minimum distance from `v` to a customer in `s`; zero if `v ∈ s`.
    /// An empty `s` signals a caller bug and is reported as an error.
    pub fn dist_to_set(&self, v: usize, s: &[usize]) -> Result<f64> {
        if s.is_empty() {
            return Err(Error::EmptySet);
        }
        Ok(s.iter()
            .map(|&u| self.dist(v, u))
            .fold(f64::INFINITY, f64::min))
    }

    /// Nearest member of `s` seen from `v`, ties broken by lowest index.
    pub fn nearest_in_set(&self, v: usize, s: &[usize]) -> Result<usize> {
        if s.is_empty() {
            return Err(Error::EmptySet);
        }
        let mut best = s[0];
        let mut best_d = self.dist(v, s[0]);
        for &u in &s[1..] {
            let d = self.dist(v, u);
            if d < best_d || (d == best_d && u < best) {
                best = u;
                best_d = d;
            }
        }
        Ok(best)
    }
}

/// Whether zero off-diagonal distances count as violations.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MetricMode {
    /// Off-diagonal distances must be strictly positive.
    Strict,
    /// Zero off-diagonal distances allowed (groups of coinciding customers).
    SemiMetric,
}

/// Outcome of [`Instance::validate`]; violations are data, not errors.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn ok(&self) -> bool {
        self.violations.is_empty()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Violation {
    Asymmetry { u: usize, v: usize },
    NegativeEntry { u: usize, v: usize },
    NonzeroDiagonal { v: usize },
    ZeroOffDiagonal { u: usize, v: usize },
    TriangleViolation { u: usize, via: usize, w: usize },
    ProbabilityOutOfRange { v: usize, p: f64 },
    DepotNotAlwaysActive { depot: usize, p: f64 },
}

/// A cyclic order of customers; orientation is fixed by the stored sequence.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Tour {
    pub order: Vec<usize>,
}

impl Tour {
    pub fn new(order: Vec<usize>) -> Self {
        Tour { order }
    }

    /// Identity tour `0, 1, …, n-1`.
    pub fn identity(n: usize) -> Self {
        Tour {
            order: (0..n).collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.order.len()
    }

    pub fn is_empty(&self) -> bool {
        self.order.is_empty()
    }

    /// True iff the tour visits every customer of an `n`-customer instance
    /// exactly once.
    pub fn is_permutation_of(&self, n: usize) -> bool {
        if self.order.len() != n {
            return false;
        }
        let mut seen = vec![false; n];
        for &v in &self.order {
            if v >= n || seen[v] {
                return false;
            }
            seen[v] = true;
        }
        true
    }

    /// Sum of consecutive edges including the closing edge; 0 for fewer than
    /// two stops.
    pub fn cycle_cost(&self, inst: &Instance) -> f64 {
        cycle_cost(inst, &self.order)
    }
}

/// Cycle cost of an arbitrary customer sequence (including the closing
/// edge); 0 for fewer than two stops.
pub fn cycle_cost(inst: &Instance, order: &[usize]) -> f64 {
    if order.len() < 2 {
        return 0.0;
    }
    let mut cost = 0.0;
    for k in 0..order.len() {
        cost += inst.dist(order[k], order[(k + 1) % order.len()]);
    }
    cost
}

/// Subset of customers that turned out to be active.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ActiveSet {
    pub members: Vec<usize>,
}

impl ActiveSet {
    pub fn new(members: Vec<usize>) -> Self {
        ActiveSet { members }
    }
}
