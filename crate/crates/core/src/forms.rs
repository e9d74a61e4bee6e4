//! Graded-commutative algebra of formal sphere-bundle forms.
//!
//! Generators per index i: r_i (degree 0), dr_i and α_i (degree 1, odd),
//! ω_i (degree 2, central), subject to Σ r_i² = 1 and Σ r_i dr_i = 0. The
//! differential acts by d(r_i) = dr_i, d(α_i) = -ω_i, d(dr_i) = d(ω_i) = 0.
//! Normal forms eliminate r_{n-1}² and r_{n-1}·dr_{n-1} through the two
//! relations and sort the remaining monomials.

use num_rational::BigRational;
use num_traits::{One, Zero};
use std::collections::BTreeMap;

/// Monomial key: polynomial part in the r's, central part in the ω's, and
/// a bitmask for the odd generators (bit 2i = dr_i, bit 2i+1 = α_i, in
/// that fixed global order).
type Mono = (Vec<u32>, Vec<u32>, u64);

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FormalForm {
    pub n: usize,
    terms: BTreeMap<Mono, BigRational>,
}

fn odd_merge_sign(a: u64, b: u64) -> Option<i32> {
    if a & b != 0 {
        return None;
    }
    // parity of the number of (x in a, y in b) pairs with x > y
    let mut sign = 0u32;
    let mut rest_a = a;
    while rest_a != 0 {
        let bit = rest_a & rest_a.wrapping_neg();
        let pos = bit.trailing_zeros();
        // generators of b strictly below pos must hop over this factor
        sign += (b & ((1u64 << pos) - 1)).count_ones();
        rest_a ^= bit;
    }
    Some(if sign % 2 == 0 { 1 } else { -1 })
}

impl FormalForm {
    pub fn zero(n: usize) -> Self {
        FormalForm {
            n,
            terms: BTreeMap::new(),
        }
    }

    pub fn one(n: usize) -> Self {
        let mut f = FormalForm::zero(n);
        f.terms
            .insert((vec![0; n], vec![0; n], 0), BigRational::one());
        f
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn r(n: usize, i: usize) -> Self {
        let mut e = vec![0; n];
        e[i] = 1;
        let mut f = FormalForm::zero(n);
        f.terms.insert((e, vec![0; n], 0), BigRational::one());
        f
    }

    pub fn omega(n: usize, i: usize) -> Self {
        let mut e = vec![0; n];
        e[i] = 1;
        let mut f = FormalForm::zero(n);
        f.terms.insert((vec![0; n], e, 0), BigRational::one());
        f
    }

    pub fn dr(n: usize, i: usize) -> Self {
        let mut f = FormalForm::zero(n);
        f.terms
            .insert((vec![0; n], vec![0; n], 1 << (2 * i)), BigRational::one());
        f
    }

    pub fn alpha(n: usize, i: usize) -> Self {
        let mut f = FormalForm::zero(n);
        f.terms.insert(
            (vec![0; n], vec![0; n], 1 << (2 * i + 1)),
            BigRational::one(),
        );
        f
    }

    fn add_term(&mut self, m: Mono, c: BigRational) {
        if c.is_zero() {
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

    pub fn add(&self, other: &FormalForm) -> FormalForm {
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), c.clone());
        }
        out
    }

    pub fn scale(&self, c: &BigRational) -> FormalForm {
        let mut out = FormalForm::zero(self.n);
        for (m, v) in &self.terms {
            out.add_term(m.clone(), v * c);
        }
        out
    }

    pub fn mul(&self, other: &FormalForm) -> FormalForm {
        let mut out = FormalForm::zero(self.n);
        for ((ra, oa, ma), ca) in &self.terms {
            for ((rb, ob, mb), cb) in &other.terms {
                let Some(sign) = odd_merge_sign(*ma, *mb) else {
                    continue;
                };
                let r: Vec<u32> = ra.iter().zip(rb).map(|(x, y)| x + y).collect();
                let o: Vec<u32> = oa.iter().zip(ob).map(|(x, y)| x + y).collect();
                let c = ca * cb * BigRational::from_integer(sign.into());
                out.add_term((r, o, ma | mb), c);
            }
        }
        out
    }

    /// Exterior differential.
    pub fn d(&self) -> FormalForm {
        let n = self.n;
        let mut out = FormalForm::zero(n);
        for ((r, o, mask), c) in &self.terms {
            // d hitting an r_i factor: e r_i^{e-1} dr_i, no sign (r's sit
            // in front of the odd part)
            for i in 0..n {
                let e = r[i];
                if e == 0 {
                    continue;
                }
                let dr_bit = 1u64 << (2 * i);
                let Some(sign) = odd_merge_sign(dr_bit, *mask) else {
                    continue;
                };
                let mut r2 = r.clone();
                r2[i] -= 1;
                let coeff = c * BigRational::from_integer((e as i64 * sign as i64).into());
                out.add_term((r2, o.clone(), dr_bit | mask), coeff);
            }
            // d hitting an α_i factor: -ω_i, signed by the odd factors in
            // front of it
            for i in 0..n {
                let al_bit = 1u64 << (2 * i + 1);
                if mask & al_bit == 0 {
                    continue;
                }
                let before = (mask & (al_bit - 1)).count_ones();
                let sign = if before % 2 == 0 { 1i64 } else { -1 };
                let mut o2 = o.clone();
                o2[i] += 1;
                let coeff = c * BigRational::from_integer((-sign).into());
                out.add_term((r.clone(), o2, mask & !al_bit), coeff);
            }
        }
        out
    }

    /// Eliminates r_{n-1}² and r_{n-1}·dr_{n-1} via the sphere relations.
    pub fn normalize(&self) -> FormalForm {
        let n = self.n;
        if n == 0 {
            return self.clone();
        }
        let last = n - 1;
        let dr_last = 1u64 << (2 * last);
        let mut work: Vec<(Mono, BigRational)> =
            self.terms.iter().map(|(m, c)| (m.clone(), c.clone())).collect();
        let mut out = FormalForm::zero(n);
        while let Some(((r, o, mask), c)) = work.pop() {
            if r[last] >= 2 {
                // r_last² = 1 - Σ_{i<last} r_i²
                let mut base = r.clone();
                base[last] -= 2;
                work.push(((base.clone(), o.clone(), mask), c.clone()));
                for i in 0..last {
                    let mut ri = base.clone();
                    ri[i] += 2;
                    work.push(((ri, o.clone(), mask), -c.clone()));
                }
            } else if r[last] == 1 && mask & dr_last != 0 {
                // r_last dr_last = -Σ_{i<last} r_i dr_i
                let before = (mask & (dr_last - 1)).count_ones();
                let host_sign = if before % 2 == 0 { 1i64 } else { -1 };
                for i in 0..last {
                    let dr_i = 1u64 << (2 * i);
                    let stripped = mask & !dr_last;
                    let Some(ins_sign) = odd_merge_sign(dr_i, stripped) else {
                        continue;
                    };
                    let mut r2 = r.clone();
                    r2[last] -= 1;
                    r2[i] += 1;
                    let coeff =
                        &c * BigRational::from_integer((-host_sign * ins_sign as i64).into());
                    work.push(((r2, o.clone(), dr_i | stripped), coeff));
                }
            } else {
                out.add_term((r, o, mask), c);
            }
        }
        out
    }

    /// Restricts to the fiber: all ω_i set to zero.
    pub fn fiber_restriction(&self) -> FormalForm {
        let mut out = FormalForm::zero(self.n);
        for ((r, o, mask), c) in &self.terms {
            if o.iter().all(|&x| x == 0) {
                out.add_term((r.clone(), o.clone(), *mask), c.clone());
            }
        }
        out
    }

    pub fn render(&self) -> String {
        if self.terms.is_empty() {
            return "0".into();
        }
        let mut parts = Vec::new();
        for ((r, o, mask), c) in &self.terms {
            let mut s = format!("{}", c);
            for (i, &e) in r.iter().enumerate() {
                if e > 0 {
                    s.push_str(&format!("·r{}^{}", i + 1, e));
                }
            }
            for i in 0..self.n {
                if mask & (1 << (2 * i)) != 0 {
                    s.push_str(&format!("·dr{}", i + 1));
                }
                if mask & (1 << (2 * i + 1)) != 0 {
                    s.push_str(&format!("·α{}", i + 1));
                }
            }
            for (i, &e) in o.iter().enumerate() {
                if e > 0 {
                    s.push_str(&format!("·ω{}^{}", i + 1, e));
                }
            }
            parts.push(s);
        }
        parts.join(" + ")
    }
}

/// The candidate angular form: Σ_k 2^k k! Σ_i r_i² α_i
/// Σ_{|I|=k, i∉I} Π_{j∈I}(r_j dr_j α_j) Π_{h∉I∪{i}} ω_h.
pub fn angular_form(n: usize) -> FormalForm {
    let mut total = FormalForm::zero(n);
    for i in 0..n {
        let head = FormalForm::r(n, i)
            .mul(&FormalForm::r(n, i))
            .mul(&FormalForm::alpha(n, i));
        for subset in subsets_excluding(n, i) {
            let k = subset.len();
            let mut term = head.clone();
            for &j in &subset {
                term = term
                    .mul(&FormalForm::r(n, j))
                    .mul(&FormalForm::dr(n, j))
                    .mul(&FormalForm::alpha(n, j));
            }
            for h in 0..n {
                if h != i && !subset.contains(&h) {
                    term = term.mul(&FormalForm::omega(n, h));
                }
            }
            let mut factor = BigRational::one();
            for x in 1..=k {
                factor *= BigRational::from_integer((2 * x as i64).into());
            }
            // 2^k k! = Π 2x
            total = total.add(&term.scale(&factor));
        }
    }
    total
}

fn subsets_excluding(n: usize, skip: usize) -> Vec<Vec<usize>> {
    let pool: Vec<usize> = (0..n).filter(|&x| x != skip).collect();
    let mut out = Vec::new();
    for mask in 0u32..(1 << pool.len()) {
        out.push(
            pool.iter()
                .enumerate()
                .filter(|(b, _)| mask & (1 << b) != 0)
                .map(|(_, &x)| x)
                .collect(),
        );
    }
    out
}

/// The normalized fiber volume form 2^{n-1}(n-1)! Σ_i r_i²α_i
/// Π_{j≠i}(r_j dr_j α_j).
pub fn fiber_volume_form(n: usize) -> FormalForm {
    let mut total = FormalForm::zero(n);
    for i in 0..n {
        let mut term = FormalForm::r(n, i)
            .mul(&FormalForm::r(n, i))
            .mul(&FormalForm::alpha(n, i));
        for j in 0..n {
            if j != i {
                term = term
                    .mul(&FormalForm::r(n, j))
                    .mul(&FormalForm::dr(n, j))
                    .mul(&FormalForm::alpha(n, j));
            }
        }
        total = total.add(&term);
    }
    let mut factor = BigRational::one();
    for x in 1..n {
        factor *= BigRational::from_integer((2 * x as i64).into());
    }
    total.scale(&factor)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn anticommutativity() {
        let n = 2;
        let a = FormalForm::dr(n, 0).mul(&FormalForm::alpha(n, 1));
        let b = FormalForm::alpha(n, 1).mul(&FormalForm::dr(n, 0));
        assert_eq!(a, b.scale(&BigRational::from_integer((-1).into())));
        assert!(FormalForm::dr(n, 0).mul(&FormalForm::dr(n, 0)).is_zero());
    }

    #[test]
    fn rank_one_angular_form() {
        // Φ = r² α reduces to α, and dΦ = -ω
        let phi = angular_form(1).normalize();
        assert_eq!(phi, FormalForm::alpha(1, 0));
        let total = phi.d().add(&FormalForm::omega(1, 0)).normalize();
        assert!(total.is_zero(), "residual: {}", total.render());
    }

    #[test]
    fn differential_squares_to_zero() {
        let phi = angular_form(2);
        assert!(phi.d().d().normalize().is_zero());
    }
}
