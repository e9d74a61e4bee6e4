//! Exact multivariate polynomials over arbitrary-precision rationals.
//!
//! Exponent vectors are packed eight bits per variable into a single
//! word, and terms live in a sorted vector, so merges and scalar passes
//! stay cache-friendly. Supports up to eight variables with individual
//! exponents below 256, far beyond desk scale for this crate.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use std::fmt;

/// Unpacked exponent vector, one entry per variable.
pub type Exponents = Vec<u32>;

pub const MAX_VARS: usize = 8;

fn pack(exps: &[u32]) -> u64 {
    debug_assert!(exps.len() <= MAX_VARS);
    let mut key = 0u64;
    for (i, &e) in exps.iter().enumerate() {
        debug_assert!(e < 256, "exponent too large for packed key");
        key |= (e as u64) << (8 * i);
    }
    key
}

fn unpack(key: u64, nvars: usize) -> Exponents {
    (0..nvars).map(|i| ((key >> (8 * i)) & 0xff) as u32).collect()
}

/// Terms sorted by packed key; zero coefficients never stored.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Poly {
    nvars: usize,
    terms: Vec<(u64, BigRational)>,
}

impl Poly {
    pub fn zero(nvars: usize) -> Self {
        assert!(nvars <= MAX_VARS);
        Poly {
            nvars,
            terms: Vec::new(),
        }
    }

    pub fn constant(nvars: usize, c: BigRational) -> Self {
        let mut p = Poly::zero(nvars);
        if !c.is_zero() {
            p.terms.push((0, c));
        }
        p
    }

    pub fn one(nvars: usize) -> Self {
        Poly::constant(nvars, BigRational::one())
    }

    /// The monomial `c * prod x_i^{e_i}`.
    pub fn monomial(nvars: usize, exps: Exponents, c: BigRational) -> Self {
        assert_eq!(exps.len(), nvars);
        let mut p = Poly::zero(nvars);
        if !c.is_zero() {
            p.terms.push((pack(&exps), c));
        }
        p
    }

    /// The variable `x_i`.
    pub fn var(nvars: usize, i: usize) -> Self {
        let mut e = vec![0; nvars];
        e[i] = 1;
        Poly::monomial(nvars, e, BigRational::one())
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn terms(&self) -> impl Iterator<Item = (Exponents, &BigRational)> {
        self.terms.iter().map(|(k, c)| (unpack(*k, self.nvars), c))
    }

    fn merge(mut a: Vec<(u64, BigRational)>, b: &[(u64, BigRational)], negate_b: bool) -> Vec<(u64, BigRational)> {
        let mut out = Vec::with_capacity(a.len() + b.len());
        let mut i = 0;
        let mut j = 0;
        a.reverse(); // pop from the back
        while let Some((ka, _)) = a.last() {
            if j >= b.len() {
                break;
            }
            let (kb, cb) = &b[j];
            if ka < kb {
                out.push(a.pop().unwrap());
            } else if ka > kb {
                let c = if negate_b { -cb.clone() } else { cb.clone() };
                out.push((*kb, c));
                j += 1;
            } else {
                let (k, ca) = a.pop().unwrap();
                let sum = if negate_b { ca - cb } else { ca + cb };
                if !sum.is_zero() {
                    out.push((k, sum));
                }
                j += 1;
            }
            i += 1;
        }
        let _ = i;
        while let Some(t) = a.pop() {
            out.push(t);
        }
        while j < b.len() {
            let (kb, cb) = &b[j];
            let c = if negate_b { -cb.clone() } else { cb.clone() };
            out.push((*kb, c));
            j += 1;
        }
        out
    }

    pub fn add(&self, other: &Poly) -> Poly {
        assert_eq!(self.nvars, other.nvars);
        Poly {
            nvars: self.nvars,
            terms: Self::merge(self.terms.clone(), &other.terms, false),
        }
    }

    pub fn add_assign(&mut self, other: &Poly) {
        assert_eq!(self.nvars, other.nvars);
        let terms = std::mem::take(&mut self.terms);
        self.terms = Self::merge(terms, &other.terms, false);
    }

    pub fn sub(&self, other: &Poly) -> Poly {
        assert_eq!(self.nvars, other.nvars);
        Poly {
            nvars: self.nvars,
            terms: Self::merge(self.terms.clone(), &other.terms, true),
        }
    }

    pub fn neg(&self) -> Poly {
        Poly {
            nvars: self.nvars,
            terms: self.terms.iter().map(|(k, c)| (*k, -c.clone())).collect(),
        }
    }

    pub fn mul(&self, other: &Poly) -> Poly {
        assert_eq!(self.nvars, other.nvars);
        if self.is_zero() || other.is_zero() {
            return Poly::zero(self.nvars);
        }
        // accumulate products of the smaller factor against the larger
        let (small, large) = if self.terms.len() <= other.terms.len() {
            (&self.terms, &other.terms)
        } else {
            (&other.terms, &self.terms)
        };
        let mut acc: Vec<(u64, BigRational)> = Vec::new();
        for (ks, cs) in small {
            let shifted: Vec<(u64, BigRational)> =
                large.iter().map(|(kl, cl)| (ks + kl, cs * cl)).collect();
            acc = Self::merge(acc, &shifted, false);
        }
        Poly {
            nvars: self.nvars,
            terms: acc,
        }
    }

    pub fn scale(&self, c: &BigRational) -> Poly {
        if c.is_zero() {
            return Poly::zero(self.nvars);
        }
        Poly {
            nvars: self.nvars,
            terms: self.terms.iter().map(|(k, v)| (*k, v * c)).collect(),
        }
    }

    fn degree_of(key: u64) -> u32 {
        let mut d = 0;
        let mut k = key;
        while k != 0 {
            d += (k & 0xff) as u32;
            k >>= 8;
        }
        d
    }

    /// Position of the total-degree-then-packed-lex leading term.
    fn leading_pos(&self) -> Option<usize> {
        (0..self.terms.len()).max_by_key(|&i| {
            let k = self.terms[i].0;
            (Self::degree_of(k), k)
        })
    }

    /// Exact division; returns `None` when `divisor` does not divide `self`.
    /// Eliminates leading terms through an ordered remainder map, so the
    /// cost stays near-linear in the number of terms touched.
    pub fn div_exact(&self, divisor: &Poly) -> Option<Poly> {
        assert_eq!(self.nvars, divisor.nvars);
        assert!(!divisor.is_zero());
        let dpos = divisor.leading_pos().unwrap();
        let (dkey, dcoef) = (divisor.terms[dpos].0, divisor.terms[dpos].1.clone());
        let tail: Vec<(u64, BigRational)> = divisor
            .terms
            .iter()
            .enumerate()
            .filter(|(i, _)| *i != dpos)
            .map(|(_, (k, c))| (*k, c.clone()))
            .collect();
        let mut rem: std::collections::BTreeMap<(u32, u64), BigRational> = self
            .terms
            .iter()
            .map(|(k, c)| ((Self::degree_of(*k), *k), c.clone()))
            .collect();
        let mut quot: Vec<(u64, BigRational)> = Vec::new();
        while let Some(((_, rkey), rcoef)) = rem.pop_last() {
            // componentwise exponent comparison against the leading term
            for i in 0..self.nvars {
                if (rkey >> (8 * i)) & 0xff < (dkey >> (8 * i)) & 0xff {
                    return None;
                }
            }
            let qkey = rkey - dkey;
            let qcoef = rcoef / &dcoef;
            for (tk, tc) in &tail {
                let key = qkey + tk;
                let slot = (Self::degree_of(key), key);
                let delta = &qcoef * tc;
                match rem.entry(slot) {
                    std::collections::btree_map::Entry::Vacant(v) => {
                        v.insert(-delta);
                    }
                    std::collections::btree_map::Entry::Occupied(mut o) => {
                        let s = o.get() - delta;
                        if s.is_zero() {
                            o.remove();
                        } else {
                            *o.get_mut() = s;
                        }
                    }
                }
            }
            quot.push((qkey, qcoef));
        }
        quot.sort_by_key(|(k, _)| *k);
        Some(Poly {
            nvars: self.nvars,
            terms: quot,
        })
    }

    /// Builds a polynomial from raw packed terms (summing duplicates).
    pub(crate) fn from_raw_terms(nvars: usize, mut raw: Vec<(u64, BigRational)>) -> Poly {
        raw.sort_by_key(|(k, _)| *k);
        let mut terms: Vec<(u64, BigRational)> = Vec::with_capacity(raw.len());
        for (k, c) in raw {
            match terms.last_mut() {
                Some((lk, lc)) if *lk == k => {
                    *lc += c;
                    if lc.is_zero() {
                        terms.pop();
                    }
                }
                _ => {
                    if !c.is_zero() {
                        terms.push((k, c));
                    }
                }
            }
        }
        Poly { nvars, terms }
    }

    pub(crate) fn raw_terms(&self) -> &[(u64, BigRational)] {
        &self.terms
    }

    pub fn eval(&self, point: &[BigRational]) -> BigRational {
        assert_eq!(point.len(), self.nvars);
        let mut acc = BigRational::zero();
        for (k, c) in &self.terms {
            let mut m = c.clone();
            for i in 0..self.nvars {
                let e = (k >> (8 * i)) & 0xff;
                for _ in 0..e {
                    m *= &point[i];
                }
            }
            acc += m;
        }
        acc
    }

    /// Divides all coefficients by the positive content (gcd of numerators
    /// over lcm of denominators), returning the content.
    pub fn extract_content(&mut self) -> BigRational {
        if self.is_zero() {
            return BigRational::one();
        }
        let mut num_gcd = BigInt::zero();
        let mut den_lcm = BigInt::one();
        for (_, c) in &self.terms {
            num_gcd = num_integer::gcd(num_gcd, c.numer().abs());
            den_lcm = num_integer::lcm(den_lcm, c.denom().clone());
        }
        let content = BigRational::new(num_gcd, den_lcm);
        if content.is_one() {
            return content;
        }
        for (_, c) in self.terms.iter_mut() {
            *c /= &content;
        }
        content
    }
}

impl fmt::Display for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (e, c) in self.terms() {
            if first {
                if c.is_negative() {
                    write!(f, "-")?;
                }
                first = false;
            } else if c.is_negative() {
                write!(f, " - ")?;
            } else {
                write!(f, " + ")?;
            }
            let ac = c.abs();
            let unit_coeff = ac.is_one();
            let const_term = e.iter().all(|&x| x == 0);
            if !unit_coeff || const_term {
                write!(f, "{}", ac)?;
            }
            let mut sep = !unit_coeff || const_term;
            for (i, &p) in e.iter().enumerate() {
                if p == 0 {
                    continue;
                }
                if sep {
                    write!(f, "*")?;
                }
                sep = true;
                write!(f, "λ{}", i + 1)?;
                if p > 1 {
                    write!(f, "^{}", p)?;
                }
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::FromPrimitive;

    fn q(n: i64) -> BigRational {
        BigRational::from_i64(n).unwrap()
    }

    #[test]
    fn exact_division_by_binomial() {
        // (x+y)^3 / (x+y) = (x+y)^2
        let x = Poly::var(2, 0);
        let y = Poly::var(2, 1);
        let s = x.add(&y);
        let cube = s.mul(&s).mul(&s);
        let quot = cube.div_exact(&s).unwrap();
        assert_eq!(quot, s.mul(&s));
        // x^2 + y^2 is not divisible by x+y
        let p = x.mul(&x).add(&y.mul(&y));
        assert!(p.div_exact(&s).is_none());
    }

    #[test]
    fn eval_matches_expansion() {
        let x = Poly::var(2, 0);
        let y = Poly::var(2, 1);
        let p = x.mul(&x).add(&y.scale(&q(3)));
        let v = p.eval(&[q(2), q(5)]);
        assert_eq!(v, q(19));
    }

    #[test]
    fn merge_cancellation() {
        let x = Poly::var(1, 0);
        let d = x.sub(&x);
        assert!(d.is_zero());
        let s = x.add(&x);
        assert_eq!(s, x.scale(&q(2)));
    }
}
