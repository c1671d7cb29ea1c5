//! Builders for the two LP families whose optima certify approximation-ratio
//! upper bounds.
//!
//! Both families encode the metric of a normalized instance through hop
//! aggregates summed into buckets `B_i`; minimizing the bucket value of the
//! optimum tour subject to "some master route solution costs at least 1"
//! makes the reciprocal of the optimum an upper bound on the ratio. The
//! sampling family bounds the randomized sampling algorithm; the
//! master-route-ratio family bounds the best master route solution built
//! from equidistant master tours with bucket intervals `A_j`.

use crate::lp::model::{LpModel, Relation, Sense};
use crate::{Error, Result};

/// Parameters of the sampling-bound LP: TSP guarantee α, sampling exponent
/// σ, bucket width parameter β, and the truncation length N.
#[derive(Debug, Clone, PartialEq)]
pub struct SamplingLpConfig {
    pub alpha: f64,
    pub sigma: f64,
    pub beta: f64,
    pub n_buckets: usize,
}

impl SamplingLpConfig {
    pub fn new(alpha: f64, sigma: f64, beta: f64, n_buckets: usize) -> Result<Self> {
        if !(alpha >= 1.0) {
            return Err(Error::invalid("alpha must be at least 1"));
        }
        if !(sigma > 0.0 && sigma < 1.0) {
            return Err(Error::invalid("sigma must lie in (0,1)"));
        }
        if !(beta > 0.0) {
            return Err(Error::invalid("beta must be positive"));
        }
        if n_buckets < 1 {
            return Err(Error::invalid("need at least one bucket"));
        }
        Ok(SamplingLpConfig {
            alpha,
            sigma,
            beta,
            n_buckets,
        })
    }
}

/// Truncation error terms: coefficients beyond bucket N are charged to the
/// kept buckets (δ₁, spread geometrically) and to B₁ (δ₂, via the bucket
/// triangle inequality B_i ≤ i·B₁):
///
///   δ₁ = 4β / (e^{Nσβ}(e^{σβ}−1)),
///   δ₂ = (α + 2β/(e^{Nσβ}(e^{σβ}−1))) · e^{−Nσβ}/(1−e^{−σβ})² · (1+N−e^{−σβ}N).
pub fn compute_delta_terms(config: &SamplingLpConfig) -> (f64, f64) {
    let sb = config.sigma * config.beta;
    let n = config.n_buckets as f64;
    let tail = (n * sb).exp() * (sb.exp() - 1.0);
    let delta1 = 4.0 * config.beta / tail;
    let delta2 = (config.alpha + 2.0 * config.beta / tail)
        * ((-n * sb).exp() / (1.0 - (-sb).exp()).powi(2))
        * (1.0 + n - (-sb).exp() * n);
    debug_assert!({
        let (s1, s2) = delta_terms_series(config, 1e-18);
        relative_close(delta1, s1, 1e-12) && relative_close(delta2, s2, 1e-12)
    });
    (delta1, delta2)
}

/// Truncated-series route to the same two values: δ₁ sums the geometric
/// series 4β Σ_{j>N} e^{−jσβ}, δ₂ the weighted series Σ_{k>N} k·q^{k−1} with
/// q = e^{−σβ}. Used to cross-check the closed forms.
pub fn delta_terms_series(config: &SamplingLpConfig, tol: f64) -> (f64, f64) {
    let sb = config.sigma * config.beta;
    let n = config.n_buckets;
    let q = (-sb).exp();
    let mut delta1 = 0.0;
    let mut j = n + 1;
    loop {
        let term = (-(j as f64) * sb).exp();
        delta1 += term;
        if term < tol * delta1.max(f64::MIN_POSITIVE) || j > n + 100_000_000 {
            break;
        }
        j += 1;
    }
    delta1 *= 4.0 * config.beta;
    let mut tail_sum = 0.0;
    let mut k = n + 1;
    loop {
        let term = k as f64 * q.powi(k as i32 - 1);
        tail_sum += term;
        if term < tol * tail_sum.max(f64::MIN_POSITIVE) || k > n + 100_000_000 {
            break;
        }
        k += 1;
    }
    let nf = n as f64;
    let geom_tail = 4.0 * config.beta / ((nf * sb).exp() * (sb.exp() - 1.0));
    let delta2 = (config.alpha + geom_tail / 2.0) * tail_sum;
    (delta1, delta2)
}

fn relative_close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * a.abs().max(b.abs()).max(1e-300)
}

fn sampling_master_coefficient(
    config: &SamplingLpConfig,
    delta1: f64,
    delta2: f64,
    k: usize,
) -> f64 {
    let sb = config.sigma * config.beta;
    let mut c = (config.alpha + delta1) * (-(k as f64 - 1.0) * sb).exp();
    if k == 1 {
        c += delta2;
    }
    c
}

/// Primal sampling LP: buckets `B_0..B_N`, pair minima `M_{i,j}`, the master
/// constraint, bucket triangle inequalities, and `M_{i,j} ≤ B_i, B_j`.
pub fn build_sampling_lp(config: &SamplingLpConfig) -> LpModel {
    let n = config.n_buckets;
    let beta = config.beta;
    let sb = config.sigma * beta;
    let (delta1, delta2) = compute_delta_terms(config);
    let mut model = LpModel::new("sampling-lp", Sense::Minimize);
    let b: Vec<usize> = (0..=n)
        .map(|i| model.add_var(format!("B_{i}"), (-(i as f64 + 0.5) * beta).exp(), true))
        .collect();
    let mut m = vec![usize::MAX; (n + 1) * (n + 1)];
    for i in 0..=n {
        for j in i..=n {
            m[i * (n + 1) + j] = model.add_var(format!("M_{i}_{j}"), 0.0, true);
        }
    }
    let mut master: Vec<(usize, f64)> = Vec::with_capacity((n + 1) * (n + 4) / 2);
    for k in 0..=n {
        master.push((b[k], sampling_master_coefficient(config, delta1, delta2, k)));
    }
    for i in 0..=n {
        for j in i..=n {
            master.push((
                m[i * (n + 1) + j],
                4.0 * beta * (-((i + j) as f64 - 1.0) * sb).exp(),
            ));
        }
    }
    let sigma_m2 = 1.0 / (config.sigma * config.sigma);
    model
        .add_constraint("master", &master, Relation::Ge, sigma_m2)
        .expect("vars declared");
    for i in 1..=n {
        for j in i..=n {
            if i + j > n {
                break;
            }
            model
                .add_constraint(
                    format!("tri_{i}_{j}"),
                    &[(b[i], 1.0), (b[j], 1.0), (b[i + j], -1.0)],
                    Relation::Ge,
                    0.0,
                )
                .expect("vars declared");
        }
    }
    for i in 0..=n {
        for j in i..=n {
            let mij = m[i * (n + 1) + j];
            model
                .add_constraint(
                    format!("mb1_{i}_{j}"),
                    &[(b[i], 1.0), (mij, -1.0)],
                    Relation::Ge,
                    0.0,
                )
                .expect("vars declared");
            model
                .add_constraint(
                    format!("mb2_{i}_{j}"),
                    &[(b[j], 1.0), (mij, -1.0)],
                    Relation::Ge,
                    0.0,
                )
                .expect("vars declared");
        }
    }
    model
}

/// Dual of the sampling LP: maximize σ⁻²·y subject to one constraint per
/// pair variable and one per bucket.
pub fn build_sampling_dual(config: &SamplingLpConfig) -> LpModel {
    let n = config.n_buckets;
    let beta = config.beta;
    let sb = config.sigma * beta;
    let (delta1, delta2) = compute_delta_terms(config);
    let mut model = LpModel::new("sampling-dual", Sense::Maximize);
    let y = model.add_var("y", 1.0 / (config.sigma * config.sigma), true);
    let mut x = vec![usize::MAX; (n + 1) * (n + 1)];
    for i in 1..=n {
        for j in i..=n {
            if i + j <= n {
                x[i * (n + 1) + j] = model.add_var(format!("x_{i}_{j}"), 0.0, true);
            }
        }
    }
    let mut v = vec![usize::MAX; (n + 1) * (n + 1)];
    let mut w = vec![usize::MAX; (n + 1) * (n + 1)];
    for i in 0..=n {
        for j in i..=n {
            v[i * (n + 1) + j] = model.add_var(format!("v_{i}_{j}"), 0.0, true);
            w[i * (n + 1) + j] = model.add_var(format!("w_{i}_{j}"), 0.0, true);
        }
    }
    for i in 0..=n {
        for j in i..=n {
            model
                .add_constraint(
                    format!("pair_{i}_{j}"),
                    &[
                        (y, 4.0 * beta * (-((i + j) as f64 - 1.0) * sb).exp()),
                        (v[i * (n + 1) + j], -1.0),
                        (w[i * (n + 1) + j], -1.0),
                    ],
                    Relation::Le,
                    0.0,
                )
                .expect("vars declared");
        }
    }
    for k in 0..=n {
        let mut row: Vec<(usize, f64)> = Vec::new();
        row.push((y, sampling_master_coefficient(config, delta1, delta2, k)));
        for j in k..=n {
            row.push((v[k * (n + 1) + j], 1.0));
        }
        for j in 0..=k {
            row.push((w[j * (n + 1) + k], 1.0));
        }
        if k > 0 {
            // Triangle rows touching B_k: +x_{i,k} and +x_{k,i} (x_{k,k}
            // twice), and −x_{i,j} for i+j = k.
            for i in 1..=k.min(n.saturating_sub(k)) {
                row.push((x[i * (n + 1) + k], 1.0));
            }
            for j in k..=n.saturating_sub(k) {
                row.push((x[k * (n + 1) + j], 1.0));
            }
            for i in 1..=k / 2 {
                let j = k - i;
                if j <= n && i + j <= n && i <= j {
                    row.push((x[i * (n + 1) + j], -1.0));
                }
            }
        }
        model
            .add_constraint(
                format!("bucket_{k}"),
                &row,
                Relation::Le,
                (-(k as f64 + 0.5) * beta).exp(),
            )
            .expect("vars declared");
    }
    model
}

/// Parameters of the master-route-ratio LP: bucket width parameter β,
/// truncation N, odd interval width a, and the offsets h_i (default
/// `h_i = i mod a`).
#[derive(Debug, Clone, PartialEq)]
pub struct MrrLpConfig {
    pub beta: f64,
    pub n_buckets: usize,
    pub interval_width: usize,
    /// Offsets `h_i` for i = 1..=N, each in {0, …, a−1}; index 0 is unused.
    pub offsets: Vec<usize>,
}

impl MrrLpConfig {
    pub fn new(beta: f64, n_buckets: usize, interval_width: usize) -> Result<Self> {
        let offsets = (0..=n_buckets).map(|i| i % interval_width.max(1)).collect();
        Self::with_offsets(beta, n_buckets, interval_width, offsets)
    }

    pub fn with_offsets(
        beta: f64,
        n_buckets: usize,
        interval_width: usize,
        offsets: Vec<usize>,
    ) -> Result<Self> {
        if !(beta > 0.0) {
            return Err(Error::invalid("beta must be positive"));
        }
        if n_buckets < 1 {
            return Err(Error::invalid("need at least one bucket"));
        }
        if interval_width % 2 == 0 {
            return Err(Error::invalid("interval width a must be odd"));
        }
        if offsets.len() != n_buckets + 1 {
            return Err(Error::invalid("offsets must have length N+1"));
        }
        if offsets[1..].iter().any(|&h| h >= interval_width) {
            return Err(Error::invalid("offsets must lie in {0..a-1}"));
        }
        Ok(MrrLpConfig {
            beta,
            n_buckets,
            interval_width,
            offsets,
        })
    }

    /// Number of interval minima in the master constraint for bucket i:
    /// ⌈(h_i + i + 1)/a⌉.
    pub fn min_terms(&self, i: usize) -> usize {
        (self.offsets[i] + i + 1).div_ceil(self.interval_width)
    }
}

fn a_name(i: i64) -> String {
    if i < 0 {
        format!("A_m{}", -i)
    } else {
        format!("A_{i}")
    }
}

fn z_name(i: i64) -> String {
    if i < 0 {
        format!("z_m{}", -i)
    } else {
        format!("z_{i}")
    }
}

/// Primal master-route-ratio LP with buckets `B`, bucket intervals `A`
/// (defined by equalities, clipped at the ends), and interval minima `M`.
pub fn build_mrr_lp(config: &MrrLpConfig) -> LpModel {
    let n = config.n_buckets;
    let a = config.interval_width;
    let beta = config.beta;
    let mut model = LpModel::new("master-route-ratio-lp", Sense::Minimize);
    let b: Vec<usize> = (0..=n)
        .map(|i| model.add_var(format!("B_{i}"), (-(i as f64 + 0.5) * beta).exp(), true))
        .collect();
    // A_j for j = -a..N are sums of buckets, hence left free with defining
    // equalities below.
    let a_vars: Vec<usize> = (-(a as i64)..=(n as i64))
        .map(|j| model.add_var(a_name(j), 0.0, false))
        .collect();
    let a_var = |j: i64| -> usize { a_vars[(j + a as i64) as usize] };
    let mut m_vars: Vec<Vec<usize>> = vec![Vec::new(); n + 1];
    for i in 1..=n {
        m_vars[i] = (1..=config.min_terms(i))
            .map(|j| model.add_var(format!("M_{j}_{i}"), 0.0, true))
            .collect();
    }
    for i in 2..=n {
        model
            .add_constraint(
                format!("sub_{i}"),
                &[(b[1], i as f64), (b[i], -1.0)],
                Relation::Ge,
                0.0,
            )
            .expect("vars declared");
    }
    for i in 1..=n {
        let mut row = vec![(b[i], 1.0)];
        for &mv in &m_vars[i] {
            row.push((mv, 2.0 * beta));
        }
        model
            .add_constraint(
                format!("mr_{i}"),
                &row,
                Relation::Ge,
                i as f64 * beta * beta,
            )
            .expect("vars declared");
    }
    for i in 1..=n {
        let h = config.offsets[i] as i64;
        for j in 1..=config.min_terms(i) {
            let jj = j as i64;
            let left = (jj - 1) * a as i64 - h;
            let right = i as i64 - jj * a as i64 + h;
            model
                .add_constraint(
                    format!("ma_{j}_{i}"),
                    &[(a_var(left), 1.0), (m_vars[i][j - 1], -1.0)],
                    Relation::Ge,
                    0.0,
                )
                .expect("vars declared");
            model
                .add_constraint(
                    format!("mb_{j}_{i}"),
                    &[(a_var(right), 1.0), (m_vars[i][j - 1], -1.0)],
                    Relation::Ge,
                    0.0,
                )
                .expect("vars declared");
        }
    }
    for j in -(a as i64)..=(n as i64) {
        // A_j = Σ_{ℓ = max(j,0)}^{min(j+a, N)} B_ℓ, empty ranges clipped.
        let lo = j.max(0) as usize;
        let hi = ((j + a as i64) as usize).min(n);
        let mut row = vec![(a_var(j), -1.0)];
        for item in b.iter().take(hi + 1).skip(lo) {
            row.push((*item, 1.0));
        }
        model
            .add_constraint(format!("adef_{}", a_name(j)), &row, Relation::Eq, 0.0)
            .expect("vars declared");
    }
    model
}

/// Dual of the master-route-ratio LP.
pub fn build_mrr_dual(config: &MrrLpConfig) -> LpModel {
    let n = config.n_buckets;
    let a = config.interval_width as i64;
    let beta = config.beta;
    let mut model = LpModel::new("master-route-ratio-dual", Sense::Maximize);
    let mut x = vec![usize::MAX; n + 1];
    for (i, slot) in x.iter_mut().enumerate().take(n + 1).skip(2) {
        *slot = model.add_var(format!("x_{i}"), 0.0, true);
    }
    let mut y = vec![usize::MAX; n + 1];
    for (i, slot) in y.iter_mut().enumerate().take(n + 1).skip(1) {
        *slot = model.add_var(format!("y_{i}"), i as f64 * beta * beta, true);
    }
    let mut v: Vec<Vec<usize>> = vec![Vec::new(); n + 1];
    let mut w: Vec<Vec<usize>> = vec![Vec::new(); n + 1];
    for i in 1..=n {
        v[i] = (1..=config.min_terms(i))
            .map(|j| model.add_var(format!("v_{j}_{i}"), 0.0, true))
            .collect();
        w[i] = (1..=config.min_terms(i))
            .map(|j| model.add_var(format!("w_{j}_{i}"), 0.0, true))
            .collect();
    }
    let z: Vec<usize> = (-a..=(n as i64))
        .map(|k| model.add_var(z_name(k), 0.0, false))
        .collect();
    let z_var = |k: i64| -> usize { z[(k + a) as usize] };

    for i in 0..=n {
        let mut row: Vec<(usize, f64)> = Vec::new();
        if i >= 1 {
            row.push((y[i], 1.0));
        }
        for j in (i as i64 - a)..=(i as i64) {
            row.push((z_var(j), 1.0));
        }
        if i == 1 {
            for (j, &xj) in x.iter().enumerate().take(n + 1).skip(2) {
                row.push((xj, j as f64));
            }
        }
        if (2..=n).contains(&i) {
            row.push((x[i], -1.0));
        }
        model
            .add_constraint(
                format!("bucket_{i}"),
                &row,
                Relation::Le,
                (-(i as f64 + 0.5) * beta).exp(),
            )
            .expect("vars declared");
    }
    for i in 1..=n {
        for j in 1..=config.min_terms(i) {
            model
                .add_constraint(
                    format!("pair_{j}_{i}"),
                    &[(y[i], 2.0 * beta), (v[i][j - 1], -1.0), (w[i][j - 1], -1.0)],
                    Relation::Le,
                    0.0,
                )
                .expect("vars declared");
        }
    }
    // Interval balance: v and w entries land in the A-row they reference.
    let mut interval_rows: Vec<Vec<(usize, f64)>> = vec![Vec::new(); (n as i64 + a + 1) as usize];
    for i in 1..=n {
        let h = config.offsets[i] as i64;
        for j in 1..=config.min_terms(i) {
            let jj = j as i64;
            let left = (jj - 1) * a - h;
            let right = i as i64 - jj * a + h;
            interval_rows[(left + a) as usize].push((v[i][j - 1], 1.0));
            interval_rows[(right + a) as usize].push((w[i][j - 1], 1.0));
        }
    }
    for k in -a..=(n as i64) {
        let mut row = interval_rows[(k + a) as usize].clone();
        row.push((z_var(k), -1.0));
        model
            .add_constraint(format!("interval_{}", z_name(k)), &row, Relation::Eq, 0.0)
            .expect("vars declared");
    }
    model
}

/// The reciprocal of a positive primal LP value is the certified ratio
/// upper bound.
pub fn bound_from_primal(value: f64) -> Result<f64> {
    if value > 0.0 {
        Ok(1.0 / value)
    } else {
        Err(Error::invalid(format!(
            "nonpositive LP value {value} yields no bound"
        )))
    }
}
