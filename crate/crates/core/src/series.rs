//! Exact truncated power series in the coupling variables s, t_0..t_N,
//! with Laurent exponents in u. Products drop every monomial whose total
//! degree in (s, t) exceeds the cap, so arithmetic stays finite and exact.

use num_rational::BigRational;
use num_traits::Zero;
use std::collections::BTreeMap;

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct SeriesMono {
    pub u_pow: i64,
    pub s_pow: u32,
    /// exponents of t_0..t_N
    pub t_pows: Vec<u32>,
}

impl SeriesMono {
    pub fn degree(&self) -> u32 {
        self.s_pow + self.t_pows.iter().sum::<u32>()
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TruncatedSeries {
    /// number of t-variables (indices 0..n_t-1)
    pub n_t: usize,
    /// total (s,t)-degree cap
    pub cap: u32,
    terms: BTreeMap<SeriesMono, BigRational>,
}

impl TruncatedSeries {
    pub fn zero(n_t: usize, cap: u32) -> Self {
        TruncatedSeries {
            n_t,
            cap,
            terms: BTreeMap::new(),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&SeriesMono, &BigRational)> {
        self.terms.iter()
    }

    pub fn coefficient(&self, m: &SeriesMono) -> BigRational {
        self.terms.get(m).cloned().unwrap_or_else(BigRational::zero)
    }

    pub fn add_term(&mut self, m: SeriesMono, c: BigRational) {
        assert_eq!(m.t_pows.len(), self.n_t);
        if c.is_zero() || m.degree() > self.cap {
            return;
        }
        use std::collections::btree_map::Entry;
        match self.terms.entry(m) {
            Entry::Vacant(v) => {
                v.insert(c);
            }
            Entry::Occupied(mut o) => {
                let sum = o.get() + c;
                if sum.is_zero() {
                    o.remove();
                } else {
                    *o.get_mut() = sum;
                }
            }
        }
    }

    pub fn add(&self, other: &TruncatedSeries) -> TruncatedSeries {
        assert_eq!(self.n_t, other.n_t);
        let cap = self.cap.min(other.cap);
        let mut out = TruncatedSeries::zero(self.n_t, cap);
        for (m, c) in self.terms.iter().chain(other.terms.iter()) {
            out.add_term(m.clone(), c.clone());
        }
        out
    }

    pub fn sub(&self, other: &TruncatedSeries) -> TruncatedSeries {
        self.add(&other.scale(&BigRational::from_integer((-1).into())))
    }

    pub fn scale(&self, c: &BigRational) -> TruncatedSeries {
        let mut out = TruncatedSeries::zero(self.n_t, self.cap);
        for (m, v) in &self.terms {
            out.add_term(m.clone(), v * c);
        }
        out
    }

    pub fn shift_u(&self, delta: i64) -> TruncatedSeries {
        let mut out = TruncatedSeries::zero(self.n_t, self.cap);
        for (m, v) in &self.terms {
            let mut m2 = m.clone();
            m2.u_pow += delta;
            out.add_term(m2, v.clone());
        }
        out
    }

    pub fn mul(&self, other: &TruncatedSeries) -> TruncatedSeries {
        assert_eq!(self.n_t, other.n_t);
        let cap = self.cap.min(other.cap);
        let mut out = TruncatedSeries::zero(self.n_t, cap);
        for (ma, ca) in &self.terms {
            for (mb, cb) in &other.terms {
                if ma.degree() + mb.degree() > cap {
                    continue;
                }
                let m = SeriesMono {
                    u_pow: ma.u_pow + mb.u_pow,
                    s_pow: ma.s_pow + mb.s_pow,
                    t_pows: ma
                        .t_pows
                        .iter()
                        .zip(&mb.t_pows)
                        .map(|(a, b)| a + b)
                        .collect(),
                };
                out.add_term(m, ca * cb);
            }
        }
        out
    }

    /// Formal partial derivative by t_a (the cap shrinks accordingly:
    /// coefficients of degree cap in the result would need inputs beyond
    /// the original truncation).
    pub fn d_t(&self, a: usize) -> TruncatedSeries {
        let mut out = TruncatedSeries::zero(self.n_t, self.cap.saturating_sub(1));
        for (m, c) in &self.terms {
            if m.t_pows[a] == 0 {
                continue;
            }
            let mut m2 = m.clone();
            m2.t_pows[a] -= 1;
            let factor = BigRational::from_integer((m.t_pows[a] as i64).into());
            out.add_term(m2, c * factor);
        }
        out
    }

    pub fn d_s(&self) -> TruncatedSeries {
        let mut out = TruncatedSeries::zero(self.n_t, self.cap.saturating_sub(1));
        for (m, c) in &self.terms {
            if m.s_pow == 0 {
                continue;
            }
            let mut m2 = m.clone();
            m2.s_pow -= 1;
            let factor = BigRational::from_integer((m.s_pow as i64).into());
            out.add_term(m2, c * factor);
        }
        out
    }

    /// Lowers the cap, discarding higher terms.
    pub fn truncate(&self, cap: u32) -> TruncatedSeries {
        let mut out = TruncatedSeries::zero(self.n_t, cap.min(self.cap));
        for (m, c) in &self.terms {
            out.add_term(m.clone(), c.clone());
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::FromPrimitive;

    fn q(n: i64) -> BigRational {
        BigRational::from_i64(n).unwrap()
    }

    fn mono(u: i64, s: u32, t: Vec<u32>) -> SeriesMono {
        SeriesMono {
            u_pow: u,
            s_pow: s,
            t_pows: t,
        }
    }

    #[test]
    fn truncation_closed_product() {
        let mut a = TruncatedSeries::zero(1, 2);
        a.add_term(mono(0, 1, vec![0]), q(1));
        a.add_term(mono(0, 0, vec![1]), q(2));
        let p = a.mul(&a);
        assert!(p.terms().all(|(m, _)| m.degree() <= 2));
        assert_eq!(p.coefficient(&mono(0, 1, vec![1])), q(4));
        // degree-3 inputs are dropped on entry
        let mut b = TruncatedSeries::zero(1, 2);
        b.add_term(mono(0, 3, vec![0]), q(7));
        assert!(b.is_zero());
    }

    #[test]
    fn derivatives() {
        let mut a = TruncatedSeries::zero(1, 3);
        a.add_term(mono(-1, 2, vec![1]), q(6));
        let ds = a.d_s();
        assert_eq!(ds.coefficient(&mono(-1, 1, vec![1])), q(12));
        let dt = a.d_t(0);
        assert_eq!(dt.coefficient(&mono(-1, 2, vec![0])), q(6));
    }
}
