//! Exact rational helpers shared by every module.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{EpsError, Result};

/// An exact rational probability mass (or any intermediate rational quantity).
pub type Prob = BigRational;

pub fn ratio(numer: i64, denom: i64) -> Prob {
    Prob::new(BigInt::from(numer), BigInt::from(denom))
}

pub fn int(n: i64) -> Prob {
    Prob::from_integer(BigInt::from(n))
}

pub fn to_f64(p: &Prob) -> f64 {
    p.to_f64().unwrap_or_else(|| {
        // Extremely unbalanced numerators/denominators: fall back to log space.
        let n = p.numer().to_f64().unwrap_or(f64::MAX);
        let d = p.denom().to_f64().unwrap_or(f64::MAX);
        n / d
    })
}

/// Parses `p/q`, an integer, or a terminating decimal (`0.15`, `.5`, `1e-3` is not accepted).
pub fn parse_rational(text: &str) -> std::result::Result<Prob, String> {
    let s = text.trim();
    if s.is_empty() {
        return Err("empty mass".into());
    }
    if let Some((n, d)) = s.split_once('/') {
        let n: BigInt = n.trim().parse().map_err(|_| format!("bad numerator in {s:?}"))?;
        let d: BigInt = d.trim().parse().map_err(|_| format!("bad denominator in {s:?}"))?;
        if d.is_zero() {
            return Err(format!("zero denominator in {s:?}"));
        }
        return Ok(Prob::new(n, d));
    }
    let (neg, body) = match s.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, s.strip_prefix('+').unwrap_or(s)),
    };
    let (whole, frac) = body.split_once('.').unwrap_or((body, ""));
    if whole.is_empty() && frac.is_empty() {
        return Err(format!("bad number {s:?}"));
    }
    if !whole.chars().all(|c| c.is_ascii_digit()) || !frac.chars().all(|c| c.is_ascii_digit()) {
        return Err(format!("bad number {s:?}"));
    }
    let digits = format!("{whole}{frac}");
    let numer: BigInt = if digits.is_empty() {
        BigInt::zero()
    } else {
        digits.parse().map_err(|_| format!("bad number {s:?}"))?
    };
    let denom = num_traits::pow(BigInt::from(10u32), frac.len());
    let value = Prob::new(numer, denom);
    Ok(if neg { -value } else { value })
}

pub fn check_probability(p: &Prob) -> bool {
    !p.is_negative() && *p <= Prob::one()
}

/// Smallest `k` with `base^k >= 1/p`, i.e. `ceil(log_base(1/p))`, computed without floats.
pub fn ceil_log_inverse(p: &Prob, base: u32) -> u32 {
    assert!(p.is_positive() && *p <= Prob::one(), "ceil_log_inverse needs 0 < p <= 1");
    let base = BigInt::from(base);
    let mut power = BigInt::one();
    let mut k = 0u32;
    // base^k * numer >= denom
    while &power * p.numer() < *p.denom() {
        power *= &base;
        k += 1;
    }
    k
}

pub fn lcm_of_denominators<'a>(masses: impl IntoIterator<Item = &'a Prob>) -> BigInt {
    masses
        .into_iter()
        .fold(BigInt::one(), |acc, m| acc.lcm(m.denom()))
}

pub fn bigint_to_u64(value: &BigInt, name: &'static str) -> Result<u64> {
    value.to_u64().ok_or_else(|| EpsError::InvalidParameter {
        name,
        value: value.to_string(),
        reason: "does not fit in 64 bits",
    })
}

/// `floor(p * n)` for a nonnegative rational.
pub fn floor_times(p: &Prob, n: u64) -> BigInt {
    (p * Prob::from_integer(BigInt::from(n))).floor().to_integer()
}
