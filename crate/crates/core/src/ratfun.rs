//! Rational functions in the face variables λ1..λl.
//!
//! Denominators stay in factored form: every factor that ever appears is
//! either a single variable λi or a sum λi+λj. Cancellation is exact
//! division of the numerator by those factors, so no general multivariate
//! gcd is needed and arithmetic stays exact end to end.

use crate::poly::Poly;
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use std::collections::BTreeMap;
use std::fmt;

/// An irreducible denominator factor.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum Factor {
    /// λi (0-based variable index)
    Var(usize),
    /// λi + λj with i <= j; i == j is stored as Var-squared? No: kept as
    /// Sum(i,i) = 2λi is *not* irreducible, callers pass i < j and handle
    /// the equal-face case with a Var factor and a rational 1/2.
    Sum(usize, usize),
}

impl Factor {
    pub fn poly(&self, nvars: usize) -> Poly {
        match *self {
            Factor::Var(i) => Poly::var(nvars, i),
            Factor::Sum(i, j) => Poly::var(nvars, i).add(&Poly::var(nvars, j)),
        }
    }
}

/// Exact rational function with a factored denominator.
#[derive(Clone, Debug)]
pub struct RationalFunction {
    nvars: usize,
    num: Poly,
    den: BTreeMap<Factor, u32>,
}

impl RationalFunction {
    pub fn zero(nvars: usize) -> Self {
        RationalFunction {
            nvars,
            num: Poly::zero(nvars),
            den: BTreeMap::new(),
        }
    }

    pub fn constant(nvars: usize, c: BigRational) -> Self {
        RationalFunction {
            nvars,
            num: Poly::constant(nvars, c),
            den: BTreeMap::new(),
        }
    }

    pub fn one(nvars: usize) -> Self {
        Self::constant(nvars, BigRational::one())
    }

    pub fn from_poly(num: Poly) -> Self {
        RationalFunction {
            nvars: num.nvars(),
            num,
            den: BTreeMap::new(),
        }
    }

    /// c / f^power
    pub fn inverse_factor(nvars: usize, f: Factor, power: u32, c: BigRational) -> Self {
        let mut den = BTreeMap::new();
        if power > 0 {
            den.insert(f, power);
        }
        let mut out = RationalFunction {
            nvars,
            num: Poly::constant(nvars, c),
            den,
        };
        if out.num.is_zero() {
            out.den.clear();
        }
        out
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn numerator(&self) -> &Poly {
        &self.num
    }

    pub fn denominator_factors(&self) -> &BTreeMap<Factor, u32> {
        &self.den
    }

    fn reduce(&mut self) {
        if self.num.is_zero() {
            self.den.clear();
            return;
        }
        let factors: Vec<Factor> = self.den.keys().copied().collect();
        for f in factors {
            let fp = f.poly(self.nvars);
            while self.den.get(&f).copied().unwrap_or(0) > 0 {
                match self.num.div_exact(&fp) {
                    Some(q) => {
                        self.num = q;
                        let m = self.den.get_mut(&f).unwrap();
                        *m -= 1;
                        if *m == 0 {
                            self.den.remove(&f);
                            break;
                        }
                    }
                    None => break,
                }
            }
        }
    }

    pub fn add(&self, other: &RationalFunction) -> RationalFunction {
        assert_eq!(self.nvars, other.nvars);
        if self.is_zero() {
            return other.clone();
        }
        if other.is_zero() {
            return self.clone();
        }
        // common denominator: per-factor max multiplicity
        let mut den = self.den.clone();
        for (f, &m) in &other.den {
            let e = den.entry(*f).or_insert(0);
            *e = (*e).max(m);
        }
        let mut a = self.num.clone();
        let mut b = other.num.clone();
        for (f, &m) in &den {
            let fp = f.poly(self.nvars);
            let ma = m - self.den.get(f).copied().unwrap_or(0);
            let mb = m - other.den.get(f).copied().unwrap_or(0);
            for _ in 0..ma {
                a = a.mul(&fp);
            }
            for _ in 0..mb {
                b = b.mul(&fp);
            }
        }
        let mut out = RationalFunction {
            nvars: self.nvars,
            num: a.add(&b),
            den,
        };
        out.reduce();
        out
    }

    pub fn sub(&self, other: &RationalFunction) -> RationalFunction {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> RationalFunction {
        RationalFunction {
            nvars: self.nvars,
            num: self.num.neg(),
            den: self.den.clone(),
        }
    }

    pub fn mul(&self, other: &RationalFunction) -> RationalFunction {
        assert_eq!(self.nvars, other.nvars);
        let mut den = self.den.clone();
        for (f, m) in &other.den {
            *den.entry(*f).or_insert(0) += m;
        }
        let mut out = RationalFunction {
            nvars: self.nvars,
            num: self.num.mul(&other.num),
            den,
        };
        if out.num.is_zero() {
            out.den.clear();
        } else {
            out.reduce();
        }
        out
    }

    pub fn scale(&self, c: &BigRational) -> RationalFunction {
        let mut out = RationalFunction {
            nvars: self.nvars,
            num: self.num.scale(c),
            den: self.den.clone(),
        };
        if out.num.is_zero() {
            out.den.clear();
        }
        out
    }

    /// Exact equality by cross-subtraction.
    pub fn eq_exact(&self, other: &RationalFunction) -> bool {
        self.sub(other).is_zero()
    }

    /// Evaluates at a rational point; `None` when a denominator factor vanishes.
    pub fn eval(&self, point: &[BigRational]) -> Option<BigRational> {
        let mut d = BigRational::one();
        for (f, &m) in &self.den {
            let v = f.poly(self.nvars).eval(point);
            if v.is_zero() {
                return None;
            }
            for _ in 0..m {
                d *= &v;
            }
        }
        Some(self.num.eval(point) / d)
    }

    /// True when the reduced denominator contains only single-variable factors.
    pub fn is_laurent(&self) -> bool {
        self.den.keys().all(|f| matches!(f, Factor::Var(_)))
    }

    /// Writes the function as a sorted list of Laurent terms
    /// `(exponent vector over i64, coefficient)`. `None` when a λi+λj factor
    /// survives reduction.
    pub fn laurent_terms(&self) -> Option<Vec<(Vec<i64>, BigRational)>> {
        if !self.is_laurent() {
            return None;
        }
        let mut shift = vec![0i64; self.nvars];
        for (f, &m) in &self.den {
            if let Factor::Var(i) = f {
                shift[*i] = m as i64;
            }
        }
        let mut out = Vec::new();
        for (e, c) in self.num.terms() {
            let exps: Vec<i64> = e
                .iter()
                .zip(&shift)
                .map(|(&p, &s)| p as i64 - s)
                .collect();
            out.push((exps, c.clone()));
        }
        out.sort_by(|a, b| a.0.cmp(&b.0));
        Some(out)
    }

    /// Canonical text form: Laurent terms sorted by exponent vector, or a
    /// `(num)/(den)` display when the function is not Laurent.
    pub fn canonical_string(&self) -> String {
        if let Some(terms) = self.laurent_terms() {
            if terms.is_empty() {
                return "0".to_string();
            }
            let mut parts = Vec::new();
            for (e, c) in terms {
                parts.push(laurent_term_string(&e, &c));
            }
            parts.join(" + ")
        } else {
            let mut den = String::new();
            for (f, &m) in &self.den {
                let fs = match f {
                    Factor::Var(i) => format!("λ{}", i + 1),
                    Factor::Sum(i, j) => format!("(λ{}+λ{})", i + 1, j + 1),
                };
                if m == 1 {
                    den.push_str(&fs);
                } else {
                    den.push_str(&format!("{}^{}", fs, m));
                }
                den.push('*');
            }
            den.pop();
            format!("({}) / ({})", self.num, den)
        }
    }
}

/// Sums many rational functions: equal denominators pool their numerators
/// for free, then every group is lifted onto the global common denominator
/// and reduced once at the end.
pub fn sum_many(nvars: usize, terms: Vec<RationalFunction>) -> RationalFunction {
    let mut groups: BTreeMap<Vec<(Factor, u32)>, Poly> = BTreeMap::new();
    for t in terms {
        if t.is_zero() {
            continue;
        }
        let key: Vec<(Factor, u32)> = t.den.iter().map(|(f, m)| (*f, *m)).collect();
        match groups.get_mut(&key) {
            None => {
                groups.insert(key, t.num);
            }
            Some(acc) => acc.add_assign(&t.num),
        }
    }
    if groups.is_empty() {
        return RationalFunction::zero(nvars);
    }
    let mut den: BTreeMap<Factor, u32> = BTreeMap::new();
    for key in groups.keys() {
        for (f, m) in key {
            let e = den.entry(*f).or_insert(0);
            *e = (*e).max(*m);
        }
    }
    let mut raw: Vec<(u64, num_rational::BigRational)> = Vec::new();
    for (key, num) in groups {
        let have: BTreeMap<Factor, u32> = key.into_iter().collect();
        let mut lifted = num;
        for (f, &target) in &den {
            let missing = target - have.get(f).copied().unwrap_or(0);
            let fp = f.poly(nvars);
            for _ in 0..missing {
                lifted = lifted.mul(&fp);
            }
        }
        raw.extend_from_slice(lifted.raw_terms());
    }
    let mut out = RationalFunction {
        nvars,
        num: Poly::from_raw_terms(nvars, raw),
        den,
    };
    out.reduce();
    out
}

fn laurent_term_string(e: &[i64], c: &BigRational) -> String {
    let mut pos = Vec::new();
    let mut neg = Vec::new();
    for (i, &p) in e.iter().enumerate() {
        if p > 0 {
            pos.push(if p == 1 {
                format!("λ{}", i + 1)
            } else {
                format!("λ{}^{}", i + 1, p)
            });
        } else if p < 0 {
            neg.push(if p == -1 {
                format!("λ{}", i + 1)
            } else {
                format!("λ{}^{}", i + 1, -p)
            });
        }
    }
    let mut s = String::new();
    let coeff_needed = pos.is_empty() || !c.abs().is_one();
    if c.is_negative() {
        s.push('-');
    }
    let ac = c.abs();
    if coeff_needed {
        s.push_str(&format!("{}", ac));
        if !pos.is_empty() {
            s.push('*');
        }
    } else if !ac.is_one() {
        s.push_str(&format!("{}", ac));
    }
    s.push_str(&pos.join("*"));
    if !neg.is_empty() {
        s.push('/');
        if neg.len() > 1 {
            s.push('(');
        }
        s.push_str(&neg.join("*"));
        if neg.len() > 1 {
            s.push(')');
        }
    }
    s
}

impl fmt::Display for RationalFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.canonical_string())
    }
}

/// (2a-1)!! with the convention (-1)!! = 1.
pub fn double_factorial_odd(a: u64) -> BigInt {
    let mut acc = BigInt::one();
    let mut k = 1i64;
    while k as u64 <= 2 * a {
        if k % 2 == 1 {
            acc *= BigInt::from(k);
        }
        k += 1;
    }
    acc
}

/// binom(2m, m) / (m+1), the Catalan number C_m.
pub fn catalan(m: u64) -> BigInt {
    let mut binom = BigInt::one();
    for i in 0..m {
        binom = binom * BigInt::from(2 * m - i) / BigInt::from(i + 1);
    }
    binom / BigInt::from(m + 1)
}

pub fn pow2(e: u64) -> BigInt {
    BigInt::one() << e
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::FromPrimitive;

    fn q(n: i64) -> BigRational {
        BigRational::from_i64(n).unwrap()
    }

    #[test]
    fn catalan_and_double_factorial() {
        let cs: Vec<i64> = (0..7).map(|m| catalan(m).try_into().unwrap()).collect();
        assert_eq!(cs, vec![1, 1, 2, 5, 14, 42, 132]);
        assert_eq!(double_factorial_odd(0), BigInt::one());
        assert_eq!(double_factorial_odd(1), BigInt::from(1));
        assert_eq!(double_factorial_odd(2), BigInt::from(3));
        assert_eq!(double_factorial_odd(3), BigInt::from(15));
    }

    #[test]
    fn partial_fraction_sum_cancels() {
        // 1/(x(x+y)) + 1/(y(x+y)) = 1/(xy)
        let a = RationalFunction::inverse_factor(2, Factor::Var(0), 1, q(1))
            .mul(&RationalFunction::inverse_factor(2, Factor::Sum(0, 1), 1, q(1)));
        let b = RationalFunction::inverse_factor(2, Factor::Var(1), 1, q(1))
            .mul(&RationalFunction::inverse_factor(2, Factor::Sum(0, 1), 1, q(1)));
        let sum = a.add(&b);
        assert!(sum.is_laurent());
        let expect = RationalFunction::inverse_factor(2, Factor::Var(0), 1, q(1))
            .mul(&RationalFunction::inverse_factor(2, Factor::Var(1), 1, q(1)));
        assert!(sum.eq_exact(&expect));
    }

    #[test]
    fn canonical_string_is_sorted() {
        let t1 = RationalFunction::inverse_factor(1, Factor::Var(0), 3, q(2));
        let t2 = RationalFunction::inverse_factor(1, Factor::Var(0), 1, q(1));
        let s = t1.add(&t2);
        assert_eq!(s.canonical_string(), "2/λ1^3 + 1/λ1");
    }
}
