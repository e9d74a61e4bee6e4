//! Weighted graph sums and extraction of open descendents.
//!
//! Every nodal graph contributes a product of edge weights times a power
//! of two per component, divided by its automorphism count. Internal
//! edges between faces i and j weigh 1/(λi+λj) (the same-face case gives
//! 1/(2λi)); a boundary edge of face i carrying m illegal sides weighs
//! C_m λi^{-2m-1} with C_m the Catalan number; ghost boundary edges weigh
//! one. Summed over all node counts, the total collapses to a Laurent
//! polynomial whose coefficients carry the descendents.

use crate::enumerate::{EnumError, EnumLimits};
use crate::nodal::{enumerate_nodal, NodalGraph, OddCatalogSource};
use crate::ratfun::{catalan, double_factorial_odd, pow2, Factor, RationalFunction};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::Serialize;
use std::collections::BTreeMap;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum AmplitudeError {
    #[error("enumeration failed: {0}")]
    Enumeration(#[from] EnumError),
    #[error("signature out of theorem scope: g+k-1 must be even")]
    OutOfScope,
    #[error("total amplitude is not a Laurent polynomial")]
    NonLaurent,
    #[error("Laurent term with unexpected exponents {0:?}")]
    BadExponents(Vec<i64>),
    #[error("amplitude inconsistent across orderings of the same index multiset")]
    InconsistentCoefficients,
    #[error("extraction routes disagree")]
    RouteMismatch,
    #[error("singular evaluation system even after resampling")]
    SingularSystem,
}

/// Weight of one edge of a nodal-graph component.
pub fn edge_weight(
    nvars: usize,
    face_i: Option<usize>,
    face_j: Option<usize>,
    slots: usize,
    ghost: bool,
) -> RationalFunction {
    if ghost {
        return RationalFunction::one(nvars);
    }
    match (face_i, face_j) {
        (Some(i), Some(j)) => {
            // internal edge between faces i and j (1-based labels)
            let (a, b) = (i.min(j) - 1, i.max(j) - 1);
            if a == b {
                // same face on both sides: 1/(λi+λi) = (1/2)/λi
                RationalFunction::inverse_factor(
                    nvars,
                    Factor::Var(a),
                    1,
                    BigRational::new(BigInt::one(), BigInt::from(2)),
                )
            } else {
                RationalFunction::inverse_factor(nvars, Factor::Sum(a, b), 1, BigRational::one())
            }
        }
        (Some(i), None) => {
            // boundary edge of face i with `slots` illegal sides
            let m = slots as u64;
            let c = BigRational::from_integer(catalan(m));
            RationalFunction::inverse_factor(nvars, Factor::Var(i - 1), 2 * slots as u32 + 1, c)
        }
        _ => unreachable!("edge must border at least one face"),
    }
}

/// The exact contribution of one nodal graph.
pub fn graph_amplitude(n: &NodalGraph, nvars: usize, aut: u64) -> RationalFunction {
    let mut power = 0u64;
    let mut weight = RationalFunction::one(nvars);
    for comp in &n.components {
        let g = &comp.graph;
        let stats = g.stats().expect("catalog graphs are valid");
        power += stats.internal_vertices as u64 + stats.genus as u64 + stats.boundaries as u64 - 1;
        let h = g.halfedges();
        for e in h.edges() {
            let other = h.pairing[e];
            if g.is_ghost() {
                // all ghost edges weigh one
                continue;
            }
            if g.on_boundary_edge(e) {
                let inner = if g.is_boundary_half(e) { other } else { e };
                let face = g
                    .face_label_of_half(inner)
                    .expect("boundary edge borders a labeled face");
                let slots = comp.slots.get(&e).map_or(0, |v| v.len());
                weight = weight.mul(&edge_weight(nvars, Some(face), None, slots, false));
            } else {
                let fi = g.face_label_of_half(e).expect("labeled face");
                let fj = g.face_label_of_half(other).expect("labeled face");
                weight = weight.mul(&edge_weight(nvars, Some(fi), Some(fj), 0, false));
            }
        }
    }
    let scale = BigRational::new(pow2(power), BigInt::from(aut));
    weight.scale(&scale)
}

/// Contributions of one node-count stratum.
#[derive(Clone, Debug)]
pub struct StratumReport {
    pub m: usize,
    pub classes: usize,
    pub amplitude: RationalFunction,
}

/// The full weighted sum for a signature, stratified by node count.
#[derive(Clone, Debug)]
pub struct AmplitudeBreakdown {
    pub g: usize,
    pub k: usize,
    pub l: usize,
    pub total: RationalFunction,
    pub strata: Vec<StratumReport>,
}

pub fn in_theorem_scope(g: usize, k: usize) -> bool {
    (g + k) % 2 == 1
}

/// Sums graph amplitudes over all odd critical nodal graphs of the
/// signature, for every admissible node count.
pub fn total_amplitude(
    g: usize,
    k: usize,
    l: usize,
    source: &mut OddCatalogSource,
    limits: &EnumLimits,
) -> Result<AmplitudeBreakdown, AmplitudeError> {
    if !in_theorem_scope(g, k) {
        return Err(AmplitudeError::OutOfScope);
    }
    let dim = 3 * (g as i64) - 3 + k as i64 + 2 * l as i64;
    let mut strata = Vec::new();
    let mut total = RationalFunction::zero(l);
    let mut m = 0usize;
    while (m as i64) <= dim.max(0) {
        let catalog = enumerate_nodal(g, k, l, m, source, limits)?;
        let contributions: Vec<RationalFunction> = catalog
            .entries
            .iter()
            .map(|entry| graph_amplitude(&entry.graph, l, entry.aut))
            .collect();
        let stratum = crate::ratfun::sum_many(l, contributions);
        total = total.add(&stratum);
        strata.push(StratumReport {
            m,
            classes: catalog.len(),
            amplitude: stratum,
        });
        m += 1;
    }
    Ok(AmplitudeBreakdown { g, k, l, total, strata })
}

/// One extracted open descendent.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DescendentRow {
    pub g: usize,
    pub k: usize,
    /// ascending psi-powers a_1 <= ... <= a_l
    pub exponents: Vec<usize>,
    /// exact value as "p/q"
    pub value: String,
}

/// Exact open descendents keyed by (genus, boundary points, sorted powers).
#[derive(Clone, Debug, Default)]
pub struct DescendentTable {
    pub entries: BTreeMap<(usize, usize, Vec<usize>), BigRational>,
}

impl DescendentTable {
    pub fn get(&self, g: usize, k: usize, exps: &[usize]) -> Option<&BigRational> {
        let mut key = exps.to_vec();
        key.sort_unstable();
        self.entries.get(&(g, k, key))
    }

    pub fn insert(&mut self, g: usize, k: usize, mut exps: Vec<usize>, v: BigRational) {
        exps.sort_unstable();
        self.entries.insert((g, k, exps), v);
    }

    pub fn rows(&self) -> Vec<DescendentRow> {
        self.entries
            .iter()
            .map(|((g, k, e), v)| DescendentRow {
                g: *g,
                k: *k,
                exponents: e.clone(),
                value: v.to_string(),
            })
            .collect()
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("g,k,exponents,value\n");
        for ((g, k, e), v) in &self.entries {
            let exps: Vec<String> = e.iter().map(|x| x.to_string()).collect();
            out.push_str(&format!("{},{},{},{}\n", g, k, exps.join(" "), v));
        }
        out
    }
}

/// The Laurent basis coefficient attached to an exponent tuple on the
/// descendent side: 2^{(g+k-1)/2} Π 2^{a_i} (2a_i - 1)!!.
fn basis_coefficient(g: usize, k: usize, exps: &[usize]) -> BigRational {
    let mut c = pow2(((g + k - 1) / 2) as u64);
    for &a in exps {
        c *= pow2(a as u64) * double_factorial_odd(a as u64);
    }
    BigRational::from_integer(c)
}

/// All exponent tuples (ordered) with the given sum.
fn exponent_tuples(l: usize, d: usize) -> Vec<Vec<usize>> {
    fn rec(l: usize, d: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if l == 0 {
            if d == 0 {
                out.push(cur.clone());
            }
            return;
        }
        for a in 0..=d {
            cur.push(a);
            rec(l - 1, d - a, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    let mut cur = Vec::new();
    rec(l, d, &mut cur, &mut out);
    out
}

/// Symbolic route: reduce the total to Laurent form and match coefficients
/// against the descendent basis.
fn extract_symbolic(b: &AmplitudeBreakdown) -> Result<DescendentTable, AmplitudeError> {
    let (g, k, l) = (b.g, b.k, b.l);
    let mut table = DescendentTable::default();
    let Some(terms) = b.total.laurent_terms() else {
        return Err(AmplitudeError::NonLaurent);
    };
    let mut seen: BTreeMap<Vec<usize>, BigRational> = BTreeMap::new();
    for (exps, coeff) in terms {
        let mut a = Vec::with_capacity(l);
        for &e in &exps {
            if e >= 0 || (-e) % 2 == 0 {
                return Err(AmplitudeError::BadExponents(exps.clone()));
            }
            a.push(((-e - 1) / 2) as usize);
        }
        let value = coeff / basis_coefficient(g, k, &a);
        let mut key = a.clone();
        key.sort_unstable();
        if let Some(prev) = seen.get(&key) {
            if *prev != value {
                return Err(AmplitudeError::InconsistentCoefficients);
            }
        } else {
            seen.insert(key.clone(), value.clone());
        }
        table.insert(g, k, a, value);
    }
    Ok(table)
}

const PRIMES: [i64; 32] = [
    2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53, 59, 61, 67, 71, 73, 79, 83, 89,
    97, 101, 103, 107, 109, 113, 127, 131,
];

/// Evaluation route: sample the unreduced per-graph sum at rational points
/// and solve for the basis coefficients exactly.
fn extract_by_evaluation(
    b: &AmplitudeBreakdown,
    seed: usize,
) -> Result<DescendentTable, AmplitudeError> {
    let (g, k, l) = (b.g, b.k, b.l);
    let dim = 3 * (g as i64) - 3 + k as i64 + 2 * l as i64;
    if dim < 0 || dim % 2 != 0 {
        return Ok(DescendentTable::default());
    }
    let d = (dim / 2) as usize;
    let tuples = exponent_tuples(l, d);
    if l == 0 {
        // no variables: the amplitude is a constant
        let c = b
            .total
            .eval(&[])
            .expect("constant amplitude always evaluates");
        let mut table = DescendentTable::default();
        if d == 0 {
            table.insert(g, k, Vec::new(), c / basis_coefficient(g, k, &[]));
        } else if !c.is_zero() {
            return Err(AmplitudeError::NonLaurent);
        }
        return Ok(table);
    }
    let nun = tuples.len();
    // sample rows: basis values and amplitude values at prime points
    let mut rows: Vec<Vec<BigRational>> = Vec::new();
    let mut rhs: Vec<BigRational> = Vec::new();
    let mut attempt = 0usize;
    let mut t = 0usize;
    while rows.len() < nun + 2 {
        if attempt > 4 * (nun + 2) {
            return Err(AmplitudeError::SingularSystem);
        }
        let point: Vec<BigRational> = (0..l)
            .map(|i| {
                let p = PRIMES[(seed + attempt * l + t * l + i) % PRIMES.len()];
                BigRational::from_integer(BigInt::from(p) + BigInt::from((t * 251) as i64))
            })
            .collect();
        attempt += 1;
        t += 1;
        // the point must have distinct coordinates for the basis rows to
        // stand a chance of independence
        let mut sorted = point.clone();
        sorted.sort();
        sorted.dedup();
        if sorted.len() != l {
            continue;
        }
        let Some(value) = strata_eval(b, &point) else {
            continue;
        };
        let row: Vec<BigRational> = tuples
            .iter()
            .map(|a| {
                let mut v = BigRational::one();
                for (i, &ai) in a.iter().enumerate() {
                    let mut p = BigRational::one();
                    for _ in 0..(2 * ai + 1) {
                        p *= &point[i];
                    }
                    v /= p;
                }
                v * basis_coefficient(g, k, a)
            })
            .collect();
        rows.push(row);
        rhs.push(value);
    }
    let solution = solve_exact(&rows, &rhs, nun)?;
    let mut table = DescendentTable::default();
    let mut seen: BTreeMap<Vec<usize>, BigRational> = BTreeMap::new();
    for (a, v) in tuples.iter().zip(&solution) {
        let mut key = a.clone();
        key.sort_unstable();
        if let Some(prev) = seen.get(&key) {
            if prev != v {
                return Err(AmplitudeError::InconsistentCoefficients);
            }
        } else {
            seen.insert(key, v.clone());
        }
        if !v.is_zero() {
            table.insert(g, k, a.clone(), v.clone());
        }
    }
    Ok(table)
}

/// Evaluates the unreduced stratum sums at a point (independent of the
/// symbolic reduction path).
fn strata_eval(b: &AmplitudeBreakdown, point: &[BigRational]) -> Option<BigRational> {
    let mut acc = BigRational::zero();
    for s in &b.strata {
        acc += s.amplitude.eval(point)?;
    }
    Some(acc)
}

/// Exact Gaussian elimination; the extra rows double as a consistency
/// check on the sampled system.
fn solve_exact(
    rows: &[Vec<BigRational>],
    rhs: &[BigRational],
    n: usize,
) -> Result<Vec<BigRational>, AmplitudeError> {
    let mut a: Vec<Vec<BigRational>> = rows
        .iter()
        .zip(rhs)
        .map(|(r, y)| {
            let mut v = r.clone();
            v.push(y.clone());
            v
        })
        .collect();
    let m = a.len();
    let mut rank = 0usize;
    for col in 0..n {
        let Some(p) = (rank..m).find(|&i| !a[i][col].is_zero()) else {
            continue;
        };
        a.swap(rank, p);
        let pivot = a[rank][col].clone();
        for x in a[rank].iter_mut() {
            *x /= &pivot;
        }
        for i in 0..m {
            if i != rank && !a[i][col].is_zero() {
                let f = a[i][col].clone();
                for c in 0..=n {
                    let delta = &a[rank][c] * &f;
                    a[i][c] -= delta;
                }
            }
        }
        rank += 1;
    }
    if rank < n {
        return Err(AmplitudeError::SingularSystem);
    }
    // leftover rows must have vanished entirely
    for row in a.iter().skip(rank) {
        if row.iter().any(|x| !x.is_zero()) {
            return Err(AmplitudeError::RouteMismatch);
        }
    }
    let mut out = vec![BigRational::zero(); n];
    let mut r = 0usize;
    for col in 0..n {
        if r < rank && a[r][col].is_one() && (0..col).all(|c| a[r][c].is_zero()) {
            out[col] = a[r][n].clone();
            r += 1;
        }
    }
    Ok(out)
}

/// Runs both extraction routes and demands exact agreement.
pub fn extract_descendents(
    b: &AmplitudeBreakdown,
    seed: usize,
) -> Result<DescendentTable, AmplitudeError> {
    let symbolic = extract_symbolic(b)?;
    let evaluated = extract_by_evaluation(b, seed)?;
    // the evaluation route omits exact zeros; everything else must match
    for (key, v) in &evaluated.entries {
        match symbolic.entries.get(key) {
            Some(w) if w == v => {}
            None if v.is_zero() => {}
            _ => return Err(AmplitudeError::RouteMismatch),
        }
    }
    for (key, v) in &symbolic.entries {
        if v.is_zero() {
            continue;
        }
        if evaluated.entries.get(key) != Some(v) {
            return Err(AmplitudeError::RouteMismatch);
        }
    }
    Ok(symbolic)
}
