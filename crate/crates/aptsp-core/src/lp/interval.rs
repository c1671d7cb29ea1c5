//! Directed-rounding rational intervals and enclosures of the exponential.
//!
//! The certificate verifier replaces every transcendental coefficient by a
//! rational interval that provably contains it, so that accepting a
//! certificate implies true feasibility. Enclosures are computed by argument
//! reduction and a Taylor expansion with an explicit remainder bound; all
//! endpoint rounding is outward.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

/// Target relative width of enclosures (better than the 2⁻⁶⁰ the
/// verification scheme needs).
pub const ENCLOSURE_BITS: u32 = 64;

/// Closed rational interval `[lo, hi]`.
#[derive(Debug, Clone, PartialEq)]
pub struct RatInterval {
    pub lo: BigRational,
    pub hi: BigRational,
}

impl RatInterval {
    pub fn point(x: BigRational) -> Self {
        RatInterval {
            lo: x.clone(),
            hi: x,
        }
    }

    pub fn from_int(x: i64) -> Self {
        Self::point(BigRational::from_integer(BigInt::from(x)))
    }

    pub fn contains(&self, x: &BigRational) -> bool {
        self.lo <= *x && *x <= self.hi
    }

    pub fn add(&self, other: &RatInterval) -> RatInterval {
        RatInterval {
            lo: &self.lo + &other.lo,
            hi: &self.hi + &other.hi,
        }
    }

    pub fn sub(&self, other: &RatInterval) -> RatInterval {
        RatInterval {
            lo: &self.lo - &other.hi,
            hi: &self.hi - &other.lo,
        }
    }

    pub fn mul(&self, other: &RatInterval) -> RatInterval {
        let candidates = [
            &self.lo * &other.lo,
            &self.lo * &other.hi,
            &self.hi * &other.lo,
            &self.hi * &other.hi,
        ];
        let mut lo = candidates[0].clone();
        let mut hi = candidates[0].clone();
        for c in &candidates[1..] {
            if *c < lo {
                lo = c.clone();
            }
            if *c > hi {
                hi = c.clone();
            }
        }
        RatInterval { lo, hi }
    }

    /// Division; the divisor interval must not contain zero.
    pub fn div(&self, other: &RatInterval) -> RatInterval {
        assert!(
            other.lo.is_positive() || other.hi.is_negative(),
            "interval division by an interval containing zero"
        );
        let inv = RatInterval {
            lo: other.hi.recip(),
            hi: other.lo.recip(),
        };
        self.mul(&inv)
    }

    /// Outward rounding to dyadic endpoints with roughly `bits` relative
    /// precision; keeps numerator/denominator sizes bounded across long
    /// computations.
    pub fn round_out(&self, bits: u32) -> RatInterval {
        RatInterval {
            lo: dyadic_round(&self.lo, bits, false),
            hi: dyadic_round(&self.hi, bits, true),
        }
    }
}

/// Rounds `x` to a dyadic rational with ~`bits` significant bits; `up`
/// selects the rounding direction.
fn dyadic_round(x: &BigRational, bits: u32, up: bool) -> BigRational {
    if x.is_zero() {
        return x.clone();
    }
    // Approximate magnitude: bit length difference of numerator and
    // denominator. Off-by-one only changes the granularity, not correctness.
    let mag = x.numer().bits() as i64 - x.denom().bits() as i64;
    let shift = bits as i64 - mag;
    if shift <= 0 {
        // Large numbers: already coarser than an integer grid; round to
        // integers.
        let scaled = x.clone();
        let floor = scaled.floor();
        return if up && floor != scaled {
            floor + BigRational::one()
        } else if !up {
            floor
        } else {
            scaled
        };
    }
    let two_s = BigRational::from_integer(BigInt::from(1) << shift as u64);
    let scaled = x * &two_s;
    let floor = scaled.floor();
    let rounded = if up && floor != scaled {
        floor + BigRational::one()
    } else {
        floor
    };
    rounded / two_s
}

/// Enclosure of e^x for rational x, with relative width at most 2^(-bits).
///
/// Argument reduction: e^x = (e^(x/2^s))^(2^s) with |x|/2^s ≤ 1/2, then a
/// Taylor expansion whose tail is bounded by twice the first omitted term
/// (the reduced argument is at most 1/2). Negative arguments go through the
/// reciprocal.
pub fn exp_enclosure(x: &BigRational, bits: u32) -> RatInterval {
    if x.is_zero() {
        return RatInterval::point(BigRational::one());
    }
    let negative = x.is_negative();
    let ax = x.abs();
    // Halve until the argument is at most 1/2.
    let half = BigRational::new(BigInt::from(1), BigInt::from(2));
    let mut s = 0u32;
    let mut reduced = ax.clone();
    while reduced > half {
        reduced /= BigRational::from_integer(BigInt::from(2));
        s += 1;
    }
    // Each squaring doubles the relative error; work with enough headroom.
    let work_bits = bits + s + 16;
    let tol_denom = BigInt::from(1) << (work_bits as u64 + 4);
    let tol = BigRational::new(BigInt::from(1), tol_denom);

    let mut sum = BigRational::one();
    let mut term = BigRational::one();
    let mut t = 1u32;
    loop {
        term = term * &reduced / BigRational::from_integer(BigInt::from(t));
        sum += &term;
        // Tail ≤ term_next / (1 - r) ≤ 2·term_next for r ≤ 1/2.
        let next = &term * &reduced / BigRational::from_integer(BigInt::from(t + 1));
        if &next * BigRational::from_integer(BigInt::from(2)) < &tol * &sum {
            let mut enclosure = RatInterval {
                lo: sum.clone(),
                hi: sum + next * BigRational::from_integer(BigInt::from(2)),
            };
            for _ in 0..s {
                enclosure = enclosure.mul(&enclosure).round_out(work_bits);
            }
            if negative {
                enclosure = RatInterval {
                    lo: enclosure.hi.recip(),
                    hi: enclosure.lo.recip(),
                };
            }
            return enclosure.round_out(bits + 4);
        }
        t += 1;
    }
}

/// Parses a rational from `"num/den"`, an integer, or a decimal string with
/// optional exponent (`"0.05"`, `"1e-3"`).
pub fn parse_rational(s: &str) -> Option<BigRational> {
    let s = s.trim();
    if let Some((num, den)) = s.split_once('/') {
        let n: BigInt = num.trim().parse().ok()?;
        let d: BigInt = den.trim().parse().ok()?;
        if d.is_zero() {
            return None;
        }
        return Some(BigRational::new(n, d));
    }
    // Decimal with optional exponent.
    let (mantissa, exp) = match s.split_once(['e', 'E']) {
        Some((m, e)) => (m, e.parse::<i32>().ok()?),
        None => (s, 0),
    };
    let (int_part, frac_part) = match mantissa.split_once('.') {
        Some((i, f)) => (i, f),
        None => (mantissa, ""),
    };
    if int_part.is_empty() && frac_part.is_empty() {
        return None;
    }
    let negative = int_part.starts_with('-');
    let digits: String = format!("{}{}", int_part.trim_start_matches(['+', '-']), frac_part);
    if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) {
        return None;
    }
    let mut value = BigRational::from_integer(digits.parse::<BigInt>().ok()?);
    if negative {
        value = -value;
    }
    let scale = exp - frac_part.len() as i32;
    let ten = BigInt::from(10);
    if scale >= 0 {
        value *= BigRational::from_integer(ten.pow(scale as u32));
    } else {
        value /= BigRational::from_integer(ten.pow((-scale) as u32));
    }
    Some(value)
}

/// Formats a rational as `"num/den"`.
pub fn format_rational(x: &BigRational) -> String {
    format!("{}/{}", x.numer(), x.denom())
}

/// Exact rational value of an f64 (every finite f64 is a dyadic rational).
pub fn rational_from_f64(x: f64) -> Option<BigRational> {
    BigRational::from_float(x)
}

/// Nearest f64 below/at the rational's value.
pub fn rational_to_f64(x: &BigRational) -> Option<f64> {
    num_traits::ToPrimitive::to_f64(x)
}
