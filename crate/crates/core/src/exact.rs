use alloc::format;
use alloc::string::String;
use core::cmp::Ordering;
use core::fmt;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Pow, Signed, ToPrimitive, Zero};

/// Exact rational used for weights, thresholds, coordinates and distances.
pub type Rational = BigRational;

/// Parses `"p/q"`, `"-p/q"` or a plain integer.
pub fn parse_ratio(text: &str) -> Option<Rational> {
    let text = text.trim();
    match text.split_once('/') {
        Some((p, q)) => {
            let p: BigInt = p.trim().parse().ok()?;
            let q: BigInt = q.trim().parse().ok()?;
            if q.is_zero() {
                None
            } else {
                Some(Rational::new(p, q))
            }
        }
        None => text.parse::<BigInt>().ok().map(Rational::from_integer),
    }
}

/// `2^exp` as an exact rational; `exp` may be negative.
pub fn dyadic(exp: i64) -> Rational {
    let magnitude = BigInt::one() << exp.unsigned_abs();
    if exp >= 0 {
        Rational::from_integer(magnitude)
    } else {
        Rational::new(BigInt::one(), magnitude)
    }
}

/// Least integer `>= r`.
pub fn ceil_ratio(r: &Rational) -> BigInt {
    r.numer().div_ceil(r.denom())
}

/// Greatest integer `<= r`.
pub fn floor_ratio(r: &Rational) -> BigInt {
    r.numer().div_floor(r.denom())
}

/// Largest integer `l` with `2^l <= r`. Requires `r > 0`.
pub fn floor_log2(r: &Rational) -> i64 {
    assert!(r.is_positive(), "floor_log2 of a non-positive rational");
    // Initial guess from bit lengths, then correct by at most a couple of steps.
    let mut l = r.numer().bits() as i64 - r.denom().bits() as i64;
    while dyadic(l) > *r {
        l -= 1;
    }
    while dyadic(l + 1) <= *r {
        l += 1;
    }
    l
}

/// Natural logarithm of a big integer, rounded to `f64`. `ln(0)` is `-inf`.
pub fn ln_biguint(value: &BigUint) -> f64 {
    if value.is_zero() {
        return f64::NEG_INFINITY;
    }
    let bits = value.bits();
    if bits <= 64 {
        return libm::log(value.to_u64().unwrap_or(u64::MAX) as f64);
    }
    let shift = bits - 64;
    let top = (value >> shift).to_u64().unwrap_or(u64::MAX) as f64;
    libm::log(top) + shift as f64 * core::f64::consts::LN_2
}

pub(crate) fn ratio_to_f64(r: &Rational) -> f64 {
    r.to_f64().unwrap_or(f64::NAN)
}

/// The rate `ln(count) / scale` held exactly.
///
/// Two `LogCount`s compare by cross powers (`c1^s2` against `c2^s1`), so
/// equalities such as "every per-n entropy value equals `ln 8`" are decided
/// on integers, not on rounded logarithms.
#[derive(Debug, Clone)]
pub struct LogCount {
    count: BigUint,
    scale: u64,
}

impl LogCount {
    /// `ln(count) / scale`. Panics when `count == 0` or `scale == 0`.
    pub fn new(count: BigUint, scale: u64) -> Self {
        assert!(!count.is_zero(), "LogCount of zero");
        assert!(scale > 0, "LogCount with zero scale");
        LogCount { count, scale }
    }

    /// `ln(count)`.
    pub fn of(count: BigUint) -> Self {
        Self::new(count, 1)
    }

    /// The integer under the logarithm.
    pub fn count(&self) -> &BigUint {
        &self.count
    }

    /// The divisor applied to the logarithm.
    pub fn scale(&self) -> u64 {
        self.scale
    }

    /// Rounded value.
    pub fn value(&self) -> f64 {
        ln_biguint(&self.count) / self.scale as f64
    }

    /// `m * self`, exactly.
    pub fn times(&self, m: u64) -> Self {
        LogCount::new(Pow::pow(&self.count, m), self.scale)
    }

    /// Same value with the smallest possible scale: `ln(c)/s` becomes
    /// `ln(r)/t` where `r^(s/t) = c`.
    pub fn normalized(&self) -> Self {
        let mut best = self.clone();
        let mut t = self.scale;
        while t > 1 {
            if self.scale.is_multiple_of(t) {
                let root_index = u32::try_from(t).unwrap_or(u32::MAX);
                let root = self.count.nth_root(root_index);
                if Pow::pow(&root, t) == self.count {
                    best = LogCount::new(root, self.scale / t);
                    break;
                }
            }
            t -= 1;
        }
        best
    }

    /// Exact rendering: `ln(8)` or `ln(5)/3`.
    pub fn render(&self) -> String {
        let n = self.normalized();
        if n.scale == 1 {
            format!("ln({})", n.count)
        } else {
            format!("ln({})/{}", n.count, n.scale)
        }
    }
}

impl PartialEq for LogCount {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for LogCount {}

impl PartialOrd for LogCount {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for LogCount {
    fn cmp(&self, other: &Self) -> Ordering {
        if self.scale == other.scale {
            return self.count.cmp(&other.count);
        }
        let lhs = Pow::pow(&self.count, other.scale);
        let rhs = Pow::pow(&other.count, self.scale);
        lhs.cmp(&rhs)
    }
}

impl fmt::Display for LogCount {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(s: &str) -> Rational {
        parse_ratio(s).unwrap()
    }

    #[test]
    fn parses_fractions_and_integers() {
        assert_eq!(q("1/2"), Rational::new(1.into(), 2.into()));
        assert_eq!(q("3"), Rational::from_integer(3.into()));
        assert_eq!(q(" 6/4 "), q("3/2"));
        assert!(parse_ratio("1/0").is_none());
        assert!(parse_ratio("abc").is_none());
    }

    #[test]
    fn ceil_and_floor_log2() {
        assert_eq!(ceil_ratio(&q("9/2")), 5.into());
        assert_eq!(ceil_ratio(&q("6")), 6.into());
        assert_eq!(floor_ratio(&q("-1/2")), (-1).into());
        assert_eq!(floor_log2(&q("16")), 4);
        assert_eq!(floor_log2(&q("1/3")), -2);
        assert_eq!(floor_log2(&q("1")), 0);
        assert_eq!(floor_log2(&q("1023/1024")), -1);
    }

    #[test]
    fn log_counts_compare_exactly() {
        let eight = LogCount::of(BigUint::from(8u32));
        let per_n = LogCount::new(BigUint::from(1u32) << 24u32, 8);
        assert_eq!(eight, per_n);
        assert_eq!(per_n.render(), "ln(8)");
        let five_thirds = LogCount::new(BigUint::from(5u32), 3);
        assert_eq!(five_thirds.render(), "ln(5)/3");
        assert!(five_thirds < eight);
        assert!((eight.value() - libm::log(8.0)).abs() < 1e-15);
    }

    #[test]
    fn ln_of_large_integers() {
        let big = BigUint::from(1u32) << 300u32;
        assert!((ln_biguint(&big) - 300.0 * core::f64::consts::LN_2).abs() < 1e-9);
    }
}
