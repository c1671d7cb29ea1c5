//! Exact rational verification of dual certificates.
//!
//! A certificate is a feasible dual solution whose objective converts into a
//! proven ratio upper bound (σ²/y for the sampling family, 1/Σ iβ²y_i for
//! the master-route-ratio family). Verification runs in exact rational
//! arithmetic; every transcendental coefficient is replaced by a directed
//! rational enclosure — upper bounds on left-hand-side coefficients, lower
//! bounds on right-hand sides — so acceptance implies true feasibility.
//! This code path shares nothing with the float LP builders on purpose.

use std::collections::HashMap;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::lp::interval::{
    exp_enclosure, format_rational, parse_rational, rational_from_f64, RatInterval, ENCLOSURE_BITS,
};
use crate::lp::model::{LpModel, LpSolution};
use crate::{Error, Result};

/// Safety factor applied to the objective variables when converting a float
/// dual solution into a certificate; the sacrificed 10⁻⁶ of the bound buys
/// slack that dominates solver roundoff.
pub const DEFAULT_SAFETY: f64 = 1e-6;

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum DualCertificate {
    Sampling(SamplingCertificate),
    Mrr(MrrCertificate),
}

/// Sampling-family certificate. All numbers are rationals encoded as
/// `"num/den"` (plain integers and decimal strings are accepted on input).
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SamplingCertificate {
    pub config: SamplingCertConfig,
    pub y: String,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub x: Vec<(usize, usize, String)>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub v: Vec<(usize, usize, String)>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub w: Vec<(usize, usize, String)>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SamplingCertConfig {
    pub alpha: String,
    pub sigma: String,
    pub beta: String,
    pub n_buckets: usize,
}

/// Master-route-ratio certificate. `z` may be omitted: it is determined by
/// the interval equalities and is derived from `v` and `w` during
/// verification. If present it must match the derived values exactly.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MrrCertificate {
    pub config: MrrCertConfig,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub y: Vec<(usize, String)>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub x: Vec<(usize, String)>,
    /// Entries `(j, i, value)` matching the primal minima `M_{j,i}`.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub v: Vec<(usize, usize, String)>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub w: Vec<(usize, usize, String)>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub z: Option<Vec<(i64, String)>>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MrrCertConfig {
    pub beta: String,
    pub n_buckets: usize,
    pub interval_width: usize,
    /// Defaults to `h_i = i mod a` when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub offsets: Option<Vec<usize>>,
}

/// Verification outcome. A violation carries the first offending row and
/// the margin by which it fails.
#[derive(Debug, Clone, Serialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum Verdict {
    Bound { bound: f64, bound_rational: String },
    NoFiniteBound,
    Violation { row: String, margin: f64 },
}

fn malformed(msg: impl Into<String>) -> Error {
    Error::MalformedCertificate(msg.into())
}

fn parse_value(role: &str, s: &str) -> Result<BigRational> {
    let value =
        parse_rational(s).ok_or_else(|| malformed(format!("{role}: unparsable rational {s:?}")))?;
    if value.is_negative() {
        return Err(malformed(format!("{role}: negative value {s}")));
    }
    Ok(value)
}

struct PairMap {
    entries: HashMap<(usize, usize), BigRational>,
}

impl PairMap {
    fn parse(
        role: &str,
        raw: &[(usize, usize, String)],
        valid: impl Fn(usize, usize) -> bool,
    ) -> Result<Self> {
        let mut entries = HashMap::with_capacity(raw.len());
        for (i, j, s) in raw {
            if !valid(*i, *j) {
                return Err(malformed(format!("{role}: index ({i},{j}) out of range")));
            }
            let value = parse_value(&format!("{role}_{i}_{j}"), s)?;
            if entries.insert((*i, *j), value).is_some() {
                return Err(malformed(format!("{role}: duplicate index ({i},{j})")));
            }
        }
        Ok(PairMap { entries })
    }

    fn get(&self, i: usize, j: usize) -> BigRational {
        self.entries
            .get(&(i, j))
            .cloned()
            .unwrap_or_else(BigRational::zero)
    }
}

fn rat(n: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

/// Checks every constraint of the sampling dual in exact rational
/// arithmetic. On success returns the bound σ²/y.
pub fn verify_sampling_certificate(cert: &SamplingCertificate) -> Result<Verdict> {
    let alpha = parse_value("config.alpha", &cert.config.alpha)?;
    let sigma = parse_value("config.sigma", &cert.config.sigma)?;
    let beta = parse_value("config.beta", &cert.config.beta)?;
    let n = cert.config.n_buckets;
    if sigma.is_zero() || sigma >= rat(1) {
        return Err(malformed("config.sigma must lie in (0,1)"));
    }
    if beta.is_zero() {
        return Err(malformed("config.beta must be positive"));
    }
    let y = parse_value("y", &cert.y)?;
    let x = PairMap::parse("x", &cert.x, |i, j| i >= 1 && i <= j && i + j <= n)?;
    let v = PairMap::parse("v", &cert.v, |i, j| i <= j && j <= n)?;
    let w = PairMap::parse("w", &cert.w, |i, j| i <= j && j <= n)?;

    let sb = &sigma * &beta;
    // Enclosures of e^{-t·σβ} for all needed integer multiples t (t = -1 for
    // the i+j = 0 pair and the k = 0 bucket).
    let exp_mult = |t: i64| -> RatInterval {
        let arg = -&sb * rat(t);
        exp_enclosure(&arg, ENCLOSURE_BITS)
    };
    let mut exp_cache: HashMap<i64, RatInterval> = HashMap::new();
    let mut exp_mult_cached =
        |t: i64| -> RatInterval { exp_cache.entry(t).or_insert_with(|| exp_mult(t)).clone() };

    // δ₁ = 4β/(e^{Nσβ}(e^{σβ}−1)) and
    // δ₂ = (α + 2β/(e^{Nσβ}(e^{σβ}−1)))·e^{−Nσβ}/(1−e^{−σβ})²·(1+N−e^{−σβ}N)
    // as intervals; only the upper ends are used (they multiply y ≥ 0 on
    // left-hand sides).
    let four_beta = RatInterval::point(rat(4) * &beta);
    let two_beta = RatInterval::point(rat(2) * &beta);
    let exp_nsb_pos = exp_enclosure(&(&sb * rat(n as i64)), ENCLOSURE_BITS);
    let exp_sb_pos = exp_enclosure(&sb, ENCLOSURE_BITS);
    let exp_sb_neg = exp_mult_cached(1);
    let exp_nsb_neg = exp_mult_cached(n as i64);
    let one = RatInterval::from_int(1);
    let nf = RatInterval::from_int(n as i64);
    let tail = exp_nsb_pos.mul(&exp_sb_pos.sub(&one));
    let delta1 = four_beta.div(&tail);
    let one_minus_q = one.sub(&exp_sb_neg);
    let delta2 = RatInterval::point(alpha.clone())
        .add(&two_beta.div(&tail))
        .mul(&exp_nsb_neg.div(&one_minus_q.mul(&one_minus_q)))
        .mul(&one.add(&nf).sub(&exp_sb_neg.mul(&nf)));

    // Pair rows: 4β·e^{-(i+j-1)σβ}·y ≤ v_{i,j} + w_{i,j}. The threshold
    // depends on i+j only.
    let mut thresholds: Vec<BigRational> = Vec::with_capacity(2 * n + 1);
    for s in 0..=(2 * n) {
        let coef_up = exp_mult_cached(s as i64 - 1).hi * rat(4) * &beta;
        thresholds.push(coef_up * &y);
    }
    for i in 0..=n {
        for j in i..=n {
            let lhs = &thresholds[i + j];
            let rhs = v.get(i, j) + w.get(i, j);
            if *lhs > rhs {
                return Ok(Verdict::Violation {
                    row: format!("pair_{i}_{j}"),
                    margin: (lhs - rhs).to_f64().unwrap_or(f64::NAN),
                });
            }
        }
    }

    // Bucket rows. Contributions of the sparse variables are accumulated
    // per row in one pass.
    let mut contrib = vec![BigRational::zero(); n + 1];
    for ((i, _), value) in &v.entries {
        contrib[*i] += value;
    }
    for ((_, j), value) in &w.entries {
        contrib[*j] += value;
    }
    for ((i, j), value) in &x.entries {
        contrib[*i] += value;
        contrib[*j] += value;
        contrib[i + j] -= value;
    }
    for (k, contribution) in contrib.iter().enumerate() {
        let mut ycoef = (RatInterval::point(alpha.clone()).add(&delta1))
            .mul(&exp_mult_cached(k as i64 - 1))
            .hi;
        if k == 1 {
            ycoef += &delta2.hi;
        }
        let lhs = ycoef * &y + contribution;
        let rhs_arg = -(&beta * (rat(2 * k as i64) + rat(1)) / rat(2));
        let rhs = exp_enclosure(&rhs_arg, ENCLOSURE_BITS).lo;
        if lhs > rhs {
            return Ok(Verdict::Violation {
                row: format!("bucket_{k}"),
                margin: (lhs - rhs).to_f64().unwrap_or(f64::NAN),
            });
        }
    }

    if y.is_zero() {
        return Ok(Verdict::NoFiniteBound);
    }
    let bound = &sigma * &sigma / &y;
    Ok(Verdict::Bound {
        bound: bound.to_f64().unwrap_or(f64::NAN),
        bound_rational: format_rational(&bound),
    })
}

/// Checks every constraint of the master-route-ratio dual. Everything except
/// the right-hand sides e^{-(i+1/2)β} is exact rational arithmetic. On
/// success returns the bound 1/(Σ iβ²·y_i).
pub fn verify_mrr_certificate(cert: &MrrCertificate) -> Result<Verdict> {
    let beta = parse_value("config.beta", &cert.config.beta)?;
    if beta.is_zero() {
        return Err(malformed("config.beta must be positive"));
    }
    let n = cert.config.n_buckets;
    let a = cert.config.interval_width;
    if a == 0 || a % 2 == 0 {
        return Err(malformed("config.interval_width must be odd"));
    }
    let offsets: Vec<usize> = match &cert.config.offsets {
        Some(h) => {
            if h.len() != n + 1 {
                return Err(malformed("config.offsets must have length N+1"));
            }
            if h[1..].iter().any(|&hi| hi >= a) {
                return Err(malformed("config.offsets entries must lie in {0..a-1}"));
            }
            h.clone()
        }
        None => (0..=n).map(|i| i % a).collect(),
    };
    let min_terms = |i: usize| -> usize { (offsets[i] + i + 1).div_ceil(a) };

    let mut y = vec![BigRational::zero(); n + 1];
    for (i, s) in &cert.y {
        if *i < 1 || *i > n {
            return Err(malformed(format!("y: index {i} out of range")));
        }
        let value = parse_value(&format!("y_{i}"), s)?;
        if !y[*i].is_zero() {
            return Err(malformed(format!("y: duplicate index {i}")));
        }
        y[*i] = value;
    }
    let mut x = vec![BigRational::zero(); n + 1];
    for (i, s) in &cert.x {
        if *i < 2 || *i > n {
            return Err(malformed(format!("x: index {i} out of range")));
        }
        let value = parse_value(&format!("x_{i}"), s)?;
        if !x[*i].is_zero() {
            return Err(malformed(format!("x: duplicate index {i}")));
        }
        x[*i] = value;
    }
    let valid_pair = |j: usize, i: usize| i >= 1 && i <= n && j >= 1 && j <= min_terms(i);
    let v = PairMap::parse("v", &cert.v, valid_pair)?;
    let w = PairMap::parse("w", &cert.w, valid_pair)?;

    // Derive z from the interval equalities: v_{j,i} lands in row
    // (j−1)a−h_i, w_{j,i} in row i−ja+h_i.
    let offset = a as i64;
    let mut z = vec![BigRational::zero(); n + a + 1];
    for ((j, i), value) in &v.entries {
        let k = (*j as i64 - 1) * a as i64 - offsets[*i] as i64;
        z[(k + offset) as usize] += value;
    }
    for ((j, i), value) in &w.entries {
        let k = *i as i64 - *j as i64 * a as i64 + offsets[*i] as i64;
        z[(k + offset) as usize] += value;
    }
    if let Some(given) = &cert.z {
        let mut provided = vec![None; n + a + 1];
        for (k, s) in given {
            if *k < -(a as i64) || *k > n as i64 {
                return Err(malformed(format!("z: index {k} out of range")));
            }
            let value = parse_rational(s)
                .ok_or_else(|| malformed(format!("z_{k}: unparsable rational {s:?}")))?;
            if provided[(k + offset) as usize].replace(value).is_some() {
                return Err(malformed(format!("z: duplicate index {k}")));
            }
        }
        for k in -(a as i64)..=(n as i64) {
            let given_value = provided[(k + offset) as usize]
                .clone()
                .unwrap_or_else(BigRational::zero);
            let derived = &z[(k + offset) as usize];
            if given_value != *derived {
                return Ok(Verdict::Violation {
                    row: format!("interval_z_{k}"),
                    margin: (&given_value - derived).to_f64().unwrap_or(f64::NAN),
                });
            }
        }
    }

    // Pair rows: 2β·y_i ≤ v_{j,i} + w_{j,i} (exact).
    let two_beta = rat(2) * &beta;
    for i in 1..=n {
        if y[i].is_zero() {
            continue;
        }
        let lhs = &two_beta * &y[i];
        for j in 1..=min_terms(i) {
            let rhs = v.get(j, i) + w.get(j, i);
            if lhs > rhs {
                return Ok(Verdict::Violation {
                    row: format!("pair_{j}_{i}"),
                    margin: (&lhs - rhs).to_f64().unwrap_or(f64::NAN),
                });
            }
        }
    }

    // Bucket rows: y_i + Σ_{j=i-a}^{i} z_j + 1_{i=1}·Σ_j j·x_j − 1_{i≥2}·x_i
    // ≤ e^{-(i+1/2)β}.
    let weighted_x: BigRational = (2..=n).map(|j| rat(j as i64) * &x[j]).sum();
    for (i, y_i) in y.iter().enumerate() {
        let mut lhs = y_i.clone();
        for j in (i as i64 - a as i64)..=(i as i64) {
            lhs += &z[(j + offset) as usize];
        }
        if i == 1 {
            lhs += &weighted_x;
        }
        if i >= 2 {
            lhs -= &x[i];
        }
        let rhs_arg = -(&beta * (rat(2 * i as i64) + rat(1)) / rat(2));
        let rhs = exp_enclosure(&rhs_arg, ENCLOSURE_BITS).lo;
        if lhs > rhs {
            return Ok(Verdict::Violation {
                row: format!("bucket_{i}"),
                margin: (lhs - rhs).to_f64().unwrap_or(f64::NAN),
            });
        }
    }

    let objective: BigRational = (1..=n).map(|i| rat(i as i64) * &beta * &beta * &y[i]).sum();
    if objective.is_zero() {
        return Ok(Verdict::NoFiniteBound);
    }
    let bound = objective.recip();
    Ok(Verdict::Bound {
        bound: bound.to_f64().unwrap_or(f64::NAN),
        bound_rational: format_rational(&bound),
    })
}

/// Verifies a certificate of either kind.
pub fn verify_certificate(cert: &DualCertificate) -> Result<Verdict> {
    match cert {
        DualCertificate::Sampling(c) => verify_sampling_certificate(c),
        DualCertificate::Mrr(c) => verify_mrr_certificate(c),
    }
}

fn clamp_rational(value: f64) -> Option<BigRational> {
    if value <= 0.0 {
        return None;
    }
    rational_from_f64(value)
}

/// Converts a solved sampling dual into a certificate: exact rationalization
/// of the float values, negatives clamped to zero, and `y` scaled by
/// `(1 − safety)` so the lost slack absorbs solver roundoff.
pub fn rationalize_sampling_certificate(
    model: &LpModel,
    solution: &LpSolution,
    config: SamplingCertConfig,
    safety: f64,
) -> Result<SamplingCertificate> {
    let mut y = BigRational::zero();
    let mut x = Vec::new();
    let mut v = Vec::new();
    let mut w = Vec::new();
    for (idx, var) in model.vars().iter().enumerate() {
        let value = solution.values[idx];
        let parts: Vec<&str> = var.name.split('_').collect();
        match parts.as_slice() {
            ["y"] => {
                if let Some(r) = clamp_rational(value) {
                    y = r;
                }
            }
            [kind @ ("x" | "v" | "w"), i, j] => {
                if let Some(r) = clamp_rational(value) {
                    let entry = (
                        i.parse::<usize>().map_err(|_| malformed("bad index"))?,
                        j.parse::<usize>().map_err(|_| malformed("bad index"))?,
                        format_rational(&r),
                    );
                    match *kind {
                        "x" => x.push(entry),
                        "v" => v.push(entry),
                        _ => w.push(entry),
                    }
                }
            }
            _ => {
                return Err(malformed(format!(
                    "unexpected variable {} in sampling dual",
                    var.name
                )))
            }
        }
    }
    let scale = rational_from_f64(1.0 - safety).ok_or_else(|| malformed("bad safety factor"))?;
    y *= scale;
    Ok(SamplingCertificate {
        config,
        y: format_rational(&y),
        x,
        v,
        w,
    })
}

/// Converts a solved master-route-ratio dual into a certificate; `z` is left
/// to be derived exactly by the verifier.
///
/// Unlike the sampling family, bucket rows here can be tight through the
/// interval variables alone (with `y_i = 0`), so scaling only `y` buys no
/// slack on them. Instead `v`, `w`, `x` are scaled by `(1 − safety)` and `y`
/// by `(1 − safety)²`: every row then gains relative slack ~`safety`, which
/// dominates solver roundoff.
pub fn rationalize_mrr_certificate(
    model: &LpModel,
    solution: &LpSolution,
    config: MrrCertConfig,
    safety: f64,
) -> Result<MrrCertificate> {
    let scale = rational_from_f64(1.0 - safety).ok_or_else(|| malformed("bad safety factor"))?;
    let scale_y = &scale * &scale;
    let mut y = Vec::new();
    let mut x = Vec::new();
    let mut v = Vec::new();
    let mut w = Vec::new();
    for (idx, var) in model.vars().iter().enumerate() {
        let value = solution.values[idx];
        let parts: Vec<&str> = var.name.split('_').collect();
        match parts.as_slice() {
            ["y", i] => {
                if let Some(r) = clamp_rational(value) {
                    y.push((
                        i.parse::<usize>().map_err(|_| malformed("bad index"))?,
                        format_rational(&(r * &scale_y)),
                    ));
                }
            }
            ["x", i] => {
                if let Some(r) = clamp_rational(value) {
                    x.push((
                        i.parse::<usize>().map_err(|_| malformed("bad index"))?,
                        format_rational(&(r * &scale)),
                    ));
                }
            }
            [kind @ ("v" | "w"), j, i] => {
                if let Some(r) = clamp_rational(value) {
                    let entry = (
                        j.parse::<usize>().map_err(|_| malformed("bad index"))?,
                        i.parse::<usize>().map_err(|_| malformed("bad index"))?,
                        format_rational(&(r * &scale)),
                    );
                    if *kind == "v" {
                        v.push(entry)
                    } else {
                        w.push(entry)
                    }
                }
            }
            ["z", ..] | ["A", ..] => {}
            _ => {
                return Err(malformed(format!(
                    "unexpected variable {} in master-route-ratio dual",
                    var.name
                )))
            }
        }
    }
    Ok(MrrCertificate {
        config,
        y,
        x,
        v,
        w,
        z: None,
    })
}
