//! Laurent polynomials in q with exact rational coefficients: the value type
//! for weighted counts over finite fields, Gaussian binomials, GL point
//! counts, and a small formal-sum layer for symbolic count atoms.

use crate::error::{Error, Result};
use crate::ratio::{rat_int, Rat};
use num_traits::{One, Signed, Zero};
use std::collections::BTreeMap;
use std::fmt;

/// Laurent polynomial in q; no zero coefficients are stored.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Default)]
pub struct LaurentPolyQ {
    coeffs: BTreeMap<i64, Rat>,
}

impl LaurentPolyQ {
    pub fn zero() -> Self {
        LaurentPolyQ::default()
    }

    pub fn one() -> Self {
        LaurentPolyQ::monomial(0, rat_int(1))
    }

    pub fn monomial(exp: i64, coeff: Rat) -> Self {
        let mut coeffs = BTreeMap::new();
        if !coeff.is_zero() {
            coeffs.insert(exp, coeff);
        }
        LaurentPolyQ { coeffs }
    }

    pub fn constant(c: Rat) -> Self {
        LaurentPolyQ::monomial(0, c)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn coeff(&self, exp: i64) -> Rat {
        self.coeffs.get(&exp).cloned().unwrap_or_else(Rat::zero)
    }

    pub fn terms(&self) -> impl Iterator<Item = (&i64, &Rat)> {
        self.coeffs.iter()
    }

    pub fn set_coeff(&mut self, exp: i64, c: Rat) {
        if c.is_zero() {
            self.coeffs.remove(&exp);
        } else {
            self.coeffs.insert(exp, c);
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (e, c) in &other.coeffs {
            let v = out.coeff(*e) + c;
            out.set_coeff(*e, v);
        }
        out
    }

    pub fn neg(&self) -> Self {
        LaurentPolyQ { coeffs: self.coeffs.iter().map(|(e, c)| (*e, -c)).collect() }
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &Self) -> Self {
        let mut out = LaurentPolyQ::zero();
        for (e1, c1) in &self.coeffs {
            for (e2, c2) in &other.coeffs {
                let e = e1 + e2;
                let v = out.coeff(e) + c1 * c2;
                out.set_coeff(e, v);
            }
        }
        out
    }

    pub fn scale(&self, c: &Rat) -> Self {
        if c.is_zero() {
            return LaurentPolyQ::zero();
        }
        LaurentPolyQ { coeffs: self.coeffs.iter().map(|(e, k)| (*e, k * c)).collect() }
    }

    pub fn degree(&self) -> Option<i64> {
        self.coeffs.keys().next_back().copied()
    }

    pub fn low_degree(&self) -> Option<i64> {
        self.coeffs.keys().next().copied()
    }

    /// Exact division; errors when the remainder is nonzero.
    pub fn div_exact(&self, other: &Self) -> Result<Self> {
        if other.is_zero() {
            return Err(Error::Precondition("division by the zero polynomial".into()));
        }
        let mut rem = self.clone();
        let mut quot = LaurentPolyQ::zero();
        let de = other.degree().unwrap();
        let dc = other.coeff(de);
        // an exact quotient's lowest exponent is self.low - other.low
        let min_exp = match (self.low_degree(), other.low_degree()) {
            (Some(a), Some(b)) => a - b,
            _ => 0,
        };
        while !rem.is_zero() {
            let re = rem.degree().unwrap();
            if re - de < min_exp {
                return Err(Error::Precondition("polynomial division is not exact".into()));
            }
            let term = LaurentPolyQ::monomial(re - de, rem.coeff(re) / &dc);
            rem = rem.sub(&term.mul(other));
            quot = quot.add(&term);
            if let Some(new_top) = rem.degree() {
                if new_top >= re {
                    return Err(Error::Internal("division did not reduce degree".into()));
                }
            }
        }
        Ok(quot)
    }

    pub fn eval(&self, q: &Rat) -> Rat {
        let mut acc = Rat::zero();
        for (e, c) in &self.coeffs {
            let mut p = rat_int(1);
            let n = e.unsigned_abs();
            for _ in 0..n {
                p *= q;
            }
            if *e < 0 {
                p = rat_int(1) / p;
            }
            acc += c * p;
        }
        acc
    }

    pub fn to_json_map(&self) -> BTreeMap<String, String> {
        self.coeffs.iter().map(|(e, c)| (e.to_string(), c.to_string())).collect()
    }

    pub fn from_json_map(m: &BTreeMap<String, String>) -> Result<Self> {
        let mut out = LaurentPolyQ::zero();
        for (e, c) in m {
            let exp: i64 = e.parse().map_err(|_| Error::Parse(format!("bad exponent {e}")))?;
            out.set_coeff(exp, crate::ratio::parse_rat(c)?);
        }
        Ok(out)
    }
}

impl fmt::Display for LaurentPolyQ {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (e, c) in self.coeffs.iter().rev() {
            if !first {
                write!(f, " {}", if c.is_negative() { "- " } else { "+ " })?;
            } else if c.is_negative() {
                write!(f, "-")?;
            }
            let mag = c.abs();
            match *e {
                0 => write!(f, "{mag}")?,
                1 => {
                    if mag.is_one() {
                        write!(f, "q")?;
                    } else {
                        write!(f, "{mag}*q")?;
                    }
                }
                _ => {
                    if mag.is_one() {
                        write!(f, "q^{e}")?;
                    } else {
                        write!(f, "{mag}*q^{e}")?;
                    }
                }
            }
            first = false;
        }
        Ok(())
    }
}

/// Gaussian binomial [n choose m]_q by the Pascal recurrence
/// [n m] = [n-1 m-1] + q^m [n-1 m].
pub fn q_binomial(n: u32, m: u32) -> Result<LaurentPolyQ> {
    if m > n {
        return Err(Error::Precondition(format!("q-binomial needs m <= n, got ({n}, {m})")));
    }
    let mut row: Vec<LaurentPolyQ> = vec![LaurentPolyQ::one()];
    for top in 1..=n {
        let mut next = Vec::with_capacity(top as usize + 1);
        for k in 0..=top {
            if k == 0 || k == top {
                next.push(LaurentPolyQ::one());
            } else {
                let left = &row[(k - 1) as usize];
                let right = row[k as usize].mul(&LaurentPolyQ::monomial(k as i64, rat_int(1)));
                next.push(left.add(&right));
            }
        }
        row = next;
    }
    Ok(row[m as usize].clone())
}

/// #GL_N(F_q) = q^{N(N-1)/2} prod_{i=1}^{N} (q^i - 1).
pub fn gl_count(n: u32) -> LaurentPolyQ {
    let mut out = LaurentPolyQ::monomial((n as i64) * (n as i64 - 1) / 2, rat_int(1));
    for i in 1..=n {
        let factor = LaurentPolyQ::monomial(i as i64, rat_int(1))
            .sub(&LaurentPolyQ::one());
        out = out.mul(&factor);
    }
    out
}

/// Formal finite sum of (coefficient polynomial) x (product of named count
/// atoms). A purely numeric value has a single empty-atom term. Atoms stand
/// for unknown weighted counts N(v) and are never evaluated.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct CountExpr {
    terms: BTreeMap<Vec<String>, LaurentPolyQ>,
}

impl CountExpr {
    pub fn zero() -> Self {
        CountExpr::default()
    }

    pub fn from_poly(p: LaurentPolyQ) -> Self {
        let mut terms = BTreeMap::new();
        if !p.is_zero() {
            terms.insert(Vec::new(), p);
        }
        CountExpr { terms }
    }

    pub fn atom(name: String) -> Self {
        let mut terms = BTreeMap::new();
        terms.insert(vec![name], LaurentPolyQ::one());
        CountExpr { terms }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_numeric(&self) -> bool {
        self.terms.keys().all(|k| k.is_empty())
    }

    pub fn numeric_value(&self) -> Option<LaurentPolyQ> {
        if self.is_zero() {
            return Some(LaurentPolyQ::zero());
        }
        if !self.is_numeric() {
            return None;
        }
        self.terms.get(&Vec::new()).cloned()
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (k, p) in &other.terms {
            let cur = out.terms.get(k).cloned().unwrap_or_else(LaurentPolyQ::zero);
            let s = cur.add(p);
            if s.is_zero() {
                out.terms.remove(k);
            } else {
                out.terms.insert(k.clone(), s);
            }
        }
        out
    }

    pub fn neg(&self) -> Self {
        CountExpr { terms: self.terms.iter().map(|(k, p)| (k.clone(), p.neg())).collect() }
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &Self) -> Self {
        let mut out = CountExpr::zero();
        for (k1, p1) in &self.terms {
            for (k2, p2) in &other.terms {
                let mut k: Vec<String> = k1.iter().chain(k2.iter()).cloned().collect();
                k.sort();
                let p = p1.mul(p2);
                let cur = out.terms.get(&k).cloned().unwrap_or_else(LaurentPolyQ::zero);
                let s = cur.add(&p);
                if s.is_zero() {
                    out.terms.remove(&k);
                } else {
                    out.terms.insert(k, s);
                }
            }
        }
        out
    }

    pub fn mul_poly(&self, p: &LaurentPolyQ) -> Self {
        self.mul(&CountExpr::from_poly(p.clone()))
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Vec<String>, &LaurentPolyQ)> {
        self.terms.iter()
    }
}

impl fmt::Display for CountExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for (atoms, poly) in &self.terms {
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            if atoms.is_empty() {
                write!(f, "{poly}")?;
            } else {
                let needs_parens = poly.terms().count() > 1;
                if poly == &LaurentPolyQ::one() {
                    write!(f, "{}", atoms.join("*"))?;
                } else if needs_parens {
                    write!(f, "({poly})*{}", atoms.join("*"))?;
                } else {
                    write!(f, "{poly}*{}", atoms.join("*"))?;
                }
            }
        }
        Ok(())
    }
}
