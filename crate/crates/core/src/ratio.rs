//! Helpers for exact rational arithmetic: gcd generators of subgroups of Q,
//! exact floor/ceil of expressions involving square roots, and interval
//! ranges used by the box tests. No floating point anywhere.

use crate::error::{Error, Result};
use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{Signed, Zero};

pub type Rat = BigRational;

pub fn rat_int(n: i64) -> Rat {
    Rat::from_integer(BigInt::from(n))
}

pub fn rat_of(n: i64, d: i64) -> Rat {
    Rat::new(BigInt::from(n), BigInt::from(d))
}

/// Parse "p/q" or "p" into an exact rational.
pub fn parse_rat(s: &str) -> Result<Rat> {
    s.trim()
        .parse::<Rat>()
        .map_err(|e| Error::Parse(format!("bad rational {s:?}: {e}")))
}

pub fn fmt_rat(r: &Rat) -> String {
    r.to_string()
}

/// Positive generator of the subgroup of Q generated by `a` and `b`
/// (0 if both vanish): gcd(n1 d2, n2 d1) / (d1 d2).
pub fn rat_gcd(a: &Rat, b: &Rat) -> Rat {
    if a.is_zero() {
        return b.abs();
    }
    if b.is_zero() {
        return a.abs();
    }
    let n = a.numer() * b.denom();
    let m = b.numer() * a.denom();
    Rat::new(n.gcd(&m), a.denom() * b.denom())
}

/// Positive generator of the subgroup generated by a list of rationals.
pub fn rat_gcd_all<'a, I: IntoIterator<Item = &'a Rat>>(xs: I) -> Rat {
    let mut g = Rat::zero();
    for x in xs {
        g = rat_gcd(&g, x);
    }
    g
}

pub fn floor_rat(x: &Rat) -> BigInt {
    x.floor().to_integer()
}

pub fn ceil_rat(x: &Rat) -> BigInt {
    x.ceil().to_integer()
}

/// Largest integer n >= 0 with n^2 <= x. Requires x >= 0.
pub fn floor_sqrt_rat(x: &Rat) -> BigInt {
    assert!(!x.is_negative(), "floor_sqrt_rat of negative value");
    if x.is_zero() {
        return BigInt::zero();
    }
    // sqrt(p/q) ~ isqrt(p*q)/q, then correct the off-by-one.
    let pq = x.numer() * x.denom();
    let mut c: BigInt = num_integer::Roots::sqrt(&pq) / x.denom();
    if c.is_negative() {
        c = BigInt::zero();
    }
    let sq = |n: &BigInt| Rat::from_integer(n * n);
    while sq(&(c.clone() + 1)) <= *x {
        c += 1;
    }
    while c.is_positive() && sq(&c) > *x {
        c -= 1;
    }
    c
}

/// Largest integer n with n <= a + sqrt(b). Requires b >= 0.
pub fn floor_a_plus_sqrt(a: &Rat, b: &Rat) -> BigInt {
    let mut c = floor_rat(a) + floor_sqrt_rat(b);
    let ok = |n: &BigInt| {
        // n <= a + sqrt(b)  <=>  n - a <= sqrt(b)
        let t = Rat::from_integer(n.clone()) - a;
        !t.is_positive() || &t * &t <= *b
    };
    while ok(&(c.clone() + 1)) {
        c += 1;
    }
    while !ok(&c) {
        c -= 1;
    }
    c
}

/// Smallest integer n with n >= a - sqrt(b). Requires b >= 0.
pub fn ceil_a_minus_sqrt(a: &Rat, b: &Rat) -> BigInt {
    let mut c = ceil_rat(a) - floor_sqrt_rat(b);
    let ok = |n: &BigInt| {
        // n >= a - sqrt(b)  <=>  a - n <= sqrt(b)
        let t = a - Rat::from_integer(n.clone());
        !t.is_positive() || &t * &t <= *b
    };
    while ok(&(c.clone() - 1)) {
        c -= 1;
    }
    while !ok(&c) {
        c += 1;
    }
    c
}

/// Closed rational interval, used for exact range arithmetic over boxes.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RatInterval {
    pub lo: Rat,
    pub hi: Rat,
}

impl RatInterval {
    pub fn new(lo: Rat, hi: Rat) -> Self {
        assert!(lo <= hi, "interval bounds out of order");
        RatInterval { lo, hi }
    }

    pub fn point(x: Rat) -> Self {
        RatInterval { lo: x.clone(), hi: x }
    }

    pub fn contains_zero(&self) -> bool {
        !self.lo.is_positive() && !self.hi.is_negative()
    }

    pub fn add(&self, other: &Self) -> Self {
        RatInterval::new(&self.lo + &other.lo, &self.hi + &other.hi)
    }

    pub fn scale(&self, c: &Rat) -> Self {
        if c.is_negative() {
            RatInterval::new(&self.hi * c, &self.lo * c)
        } else {
            RatInterval::new(&self.lo * c, &self.hi * c)
        }
    }

    pub fn shift(&self, c: &Rat) -> Self {
        RatInterval::new(&self.lo + c, &self.hi + c)
    }

    pub fn mul(&self, other: &Self) -> Self {
        let cands = [
            &self.lo * &other.lo,
            &self.lo * &other.hi,
            &self.hi * &other.lo,
            &self.hi * &other.hi,
        ];
        let lo = cands.iter().min().unwrap().clone();
        let hi = cands.iter().max().unwrap().clone();
        RatInterval::new(lo, hi)
    }

    /// Exact range of x^2 for x in the interval.
    pub fn square(&self) -> Self {
        let l2 = &self.lo * &self.lo;
        let h2 = &self.hi * &self.hi;
        if self.contains_zero() {
            RatInterval::new(Rat::zero(), l2.max(h2))
        } else {
            RatInterval::new(l2.clone().min(h2.clone()), l2.max(h2))
        }
    }
}

/// Exact range of a univariate quadratic a x^2 + b x + c over [lo, hi]
/// (endpoints plus interior vertex).
pub fn quadratic_range(a: &Rat, b: &Rat, c: &Rat, lo: &Rat, hi: &Rat) -> RatInterval {
    let eval = |x: &Rat| a * x * x + b * x + c;
    let mut vals = vec![eval(lo), eval(hi)];
    if !a.is_zero() {
        let vertex = -b / (&rat_int(2) * a);
        if vertex > *lo && vertex < *hi {
            vals.push(eval(&vertex));
        }
    }
    let min = vals.iter().min().unwrap().clone();
    let max = vals.iter().max().unwrap().clone();
    RatInterval::new(min, max)
}

/// Integer solutions of the quadratic inequality a x^2 + b x + c <= 0
/// with a > 0, as an inclusive range (None when empty).
pub fn quadratic_int_range(a: &Rat, b: &Rat, c: &Rat) -> Option<(BigInt, BigInt)> {
    assert!(a.is_positive());
    let disc = b * b - rat_int(4) * a * c;
    if disc.is_negative() {
        return None;
    }
    // roots (-b ± sqrt(disc)) / 2a
    let two_a = rat_int(2) * a;
    let center = -b / &two_a;
    let radicand = &disc / (&two_a * &two_a);
    let lo = ceil_a_minus_sqrt(&center, &radicand);
    let hi = floor_a_plus_sqrt(&center, &radicand);
    if lo > hi {
        None
    } else {
        Some((lo, hi))
    }
}

pub fn is_int(x: &Rat) -> bool {
    x.is_integer()
}

pub fn denominator(x: &Rat) -> BigInt {
    x.denom().clone()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gcd_of_rationals() {
        assert_eq!(rat_gcd(&rat_of(1, 3), &rat_of(1, 2)), rat_of(1, 6));
        assert_eq!(rat_gcd(&rat_of(2, 6), &rat_of(1, 6)), rat_of(1, 6));
        assert_eq!(rat_gcd(&rat_int(0), &rat_of(-3, 4)), rat_of(3, 4));
        assert_eq!(rat_gcd_all([rat_of(2, 6), rat_of(1, 6)].iter()), rat_of(1, 6));
    }

    #[test]
    fn sqrt_floors() {
        assert_eq!(floor_sqrt_rat(&rat_int(0)), BigInt::from(0));
        assert_eq!(floor_sqrt_rat(&rat_int(48)), BigInt::from(6));
        assert_eq!(floor_sqrt_rat(&rat_int(49)), BigInt::from(7));
        assert_eq!(floor_sqrt_rat(&rat_of(49, 4)), BigInt::from(3));
        assert_eq!(floor_a_plus_sqrt(&rat_of(1, 2), &rat_int(2)), BigInt::from(1));
        assert_eq!(ceil_a_minus_sqrt(&rat_of(1, 2), &rat_int(2)), BigInt::from(0));
        assert_eq!(ceil_a_minus_sqrt(&rat_of(-1, 2), &rat_int(2)), BigInt::from(-1));
        // boundary: sqrt exact
        assert_eq!(floor_a_plus_sqrt(&rat_int(0), &rat_int(4)), BigInt::from(2));
        assert_eq!(ceil_a_minus_sqrt(&rat_int(0), &rat_int(4)), BigInt::from(-2));
    }

    #[test]
    fn quadratic_ranges() {
        // x^2 - 4 <= 0  =>  x in [-2, 2]
        let r = quadratic_int_range(&rat_int(1), &rat_int(0), &rat_int(-4)).unwrap();
        assert_eq!(r, (BigInt::from(-2), BigInt::from(2)));
        assert!(quadratic_int_range(&rat_int(1), &rat_int(0), &rat_int(1)).is_none());
        let rr = quadratic_range(&rat_int(1), &rat_int(-2), &rat_int(0), &rat_int(0), &rat_int(3));
        assert_eq!(rr, RatInterval::new(rat_int(-1), rat_int(3)));
    }

    #[test]
    fn interval_square_is_exact() {
        let i = RatInterval::new(rat_int(-2), rat_int(1)).square();
        assert_eq!(i, RatInterval::new(rat_int(0), rat_int(4)));
    }
}
