//! Sums of generalized polygonal numbers: evaluation, representation
//! oracles, sieved represented sets, and truants.

use crate::bits::BitTable;
use crate::error::{Error, Result};

/// Memory guard for the dense sieve, in bits.
const MAX_SIEVE_BOUND: u64 = 1 << 33;

/// One term `coeff * P_order` of a polygonal sum.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Term {
    pub coeff: u64,
    pub order: u32,
}

impl Term {
    pub fn new(coeff: u64, order: u32) -> Result<Self> {
        if coeff == 0 {
            return Err(Error::ZeroCoefficient);
        }
        if order < 3 {
            return Err(Error::OrderTooSmall(order));
        }
        Ok(Term { coeff, order })
    }
}

/// `P_m(x) = ((m-2) x^2 - (m-4) x) / 2` for `m >= 3`.
pub fn eval_polygonal(m: u32, x: i64) -> Result<i64> {
    if m < 3 {
        return Err(Error::OrderTooSmall(m));
    }
    Ok(eval_polygonal_unchecked(m, x))
}

#[inline]
pub(crate) fn eval_polygonal_unchecked(m: u32, x: i64) -> i64 {
    let m = m as i64;
    ((m - 2) * x * x - (m - 4) * x) / 2
}

/// A formal sum of generalized polygonal numbers in canonical form:
/// coefficients weakly increasing, orders weakly increasing among equal
/// coefficients. The empty sum is the constant 0 (the tree root).
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct PolygonalSum {
    terms: Vec<Term>,
}

impl PolygonalSum {
    pub fn empty() -> Self {
        PolygonalSum { terms: Vec::new() }
    }

    pub fn new(mut terms: Vec<Term>) -> Self {
        terms.sort();
        PolygonalSum { terms }
    }

    /// Builds from `(coeff, order)` pairs, validating each term.
    pub fn from_pairs(pairs: &[(u64, u32)]) -> Result<Self> {
        let terms = pairs
            .iter()
            .map(|&(a, m)| Term::new(a, m))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self::new(terms))
    }

    pub fn terms(&self) -> &[Term] {
        &self.terms
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// The sum extended by one more term, in canonical position.
    pub fn extended(&self, term: Term) -> Self {
        let mut terms = self.terms.clone();
        terms.push(term);
        Self::new(terms)
    }

    pub fn eval(&self, assignment: &[i64]) -> i64 {
        assert_eq!(assignment.len(), self.terms.len());
        self.terms
            .iter()
            .zip(assignment)
            .map(|(t, &x)| t.coeff as i64 * eval_polygonal_unchecked(t.order, x))
            .sum()
    }

    /// Searches for a witness of `n`, enumerating the last variable
    /// outermost and pruning by the remaining budget.
    pub fn represents(&self, n: u64) -> Option<Witness> {
        let mut assignment = vec![0i64; self.terms.len()];
        if self.search(self.terms.len(), n, &mut assignment) {
            Some(Witness {
                assignment,
                value: n,
            })
        } else {
            None
        }
    }

    fn search(&self, vars_left: usize, rem: u64, assignment: &mut [i64]) -> bool {
        if vars_left == 0 {
            return rem == 0;
        }
        let t = self.terms[vars_left - 1];
        let mut found = false;
        enumerate_arguments(t, rem, |x, v| {
            if !found && self.search(vars_left - 1, rem - v, assignment) {
                assignment[vars_left - 1] = x;
                found = true;
            }
            !found
        });
        found
    }

    /// Exact representation count over ordered integer assignments,
    /// including sign and argument multiplicity.
    pub fn representation_count(&self, n: u64) -> u64 {
        self.count_rec(self.terms.len(), n)
    }

    fn count_rec(&self, vars_left: usize, rem: u64) -> u64 {
        if vars_left == 0 {
            return u64::from(rem == 0);
        }
        let t = self.terms[vars_left - 1];
        let mut total = 0;
        enumerate_arguments(t, rem, |_, v| {
            total += self.count_rec(vars_left - 1, rem - v);
            true
        });
        total
    }

    /// Dense membership table for `[0, bound]`, computed by sieving the
    /// value lattice term by term rather than by per-n search.
    pub fn represented_set(&self, bound: u64) -> Result<RepresentedSet> {
        self.represented_set_with(bound, SieveMode::Parallel)
    }

    pub fn represented_set_with(&self, bound: u64, mode: SieveMode) -> Result<RepresentedSet> {
        if bound == 0 {
            return Err(Error::Invalid("sieve bound must be positive".into()));
        }
        if bound >= MAX_SIEVE_BOUND {
            return Err(Error::Budget(format!(
                "sieve bound {bound} exceeds the {MAX_SIEVE_BOUND} bit budget"
            )));
        }
        let len = bound as usize + 1;
        let mut table = BitTable::new(len);
        table.set(0);
        for t in &self.terms {
            let shifts = term_values(*t, bound)
                .into_iter()
                .map(|v| v as usize)
                .collect::<Vec<_>>();
            table = match mode {
                SieveMode::Sequential => BitTable::or_shifts(&table, &shifts),
                SieveMode::Parallel => BitTable::or_shifts_parallel(&table, &shifts, 1 << 12),
            };
        }
        Ok(RepresentedSet {
            sum: self.clone(),
            bound,
            table,
        })
    }

    /// Least positive integer up to `cap` not represented.
    pub fn truant(&self, cap: u64) -> Result<Truant> {
        let set = self.represented_set(cap)?;
        let first_missing = set.missing().next();
        Ok(match first_missing {
            Some(n) => Truant::Truant(n),
            None => Truant::UniversalUpTo(cap),
        })
    }
}

impl std::fmt::Display for PolygonalSum {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (i, t) in self.terms.iter().enumerate() {
            if i > 0 {
                write!(f, "+")?;
            }
            if t.coeff != 1 {
                write!(f, "{}", t.coeff)?;
            }
            write!(f, "P{}", t.order)?;
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SieveMode {
    Sequential,
    Parallel,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Witness {
    pub assignment: Vec<i64>,
    pub value: u64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize)]
pub enum Truant {
    Truant(u64),
    UniversalUpTo(u64),
}

impl Truant {
    pub fn value(&self) -> Option<u64> {
        match self {
            Truant::Truant(n) => Some(*n),
            Truant::UniversalUpTo(_) => None,
        }
    }
}

/// Sieved membership for `[0, bound]`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RepresentedSet {
    sum: PolygonalSum,
    bound: u64,
    table: BitTable,
}

impl RepresentedSet {
    pub fn sum(&self) -> &PolygonalSum {
        &self.sum
    }

    pub fn bound(&self) -> u64 {
        self.bound
    }

    pub fn contains(&self, n: u64) -> bool {
        assert!(n <= self.bound);
        self.table.get(n as usize)
    }

    /// Positive integers up to the bound that are not represented.
    pub fn missing(&self) -> impl Iterator<Item = u64> + '_ {
        self.table.missing_from(1).map(|i| i as u64)
    }

    pub fn count_represented(&self) -> u64 {
        self.table.count_ones() as u64
    }
}

/// Calls `f(x, a * P_m(x))` for every integer `x` with value at most `rem`,
/// nonnegative arguments first. Stops early when `f` returns false.
fn enumerate_arguments<F: FnMut(i64, u64) -> bool>(t: Term, rem: u64, mut f: F) {
    let a = t.coeff as i64;
    let mut x = 0i64;
    loop {
        let v = a * eval_polygonal_unchecked(t.order, x);
        if v < 0 || v as u64 > rem {
            break;
        }
        if !f(x, v as u64) {
            return;
        }
        x += 1;
    }
    let mut x = -1i64;
    loop {
        let v = a * eval_polygonal_unchecked(t.order, x);
        if v < 0 || v as u64 > rem {
            break;
        }
        if !f(x, v as u64) {
            return;
        }
        x -= 1;
    }
}

/// Distinct values of `a * P_m(x)` up to `bound`, ascending.
pub(crate) fn term_values(t: Term, bound: u64) -> Vec<u64> {
    let mut vals = Vec::new();
    enumerate_arguments(t, bound, |_, v| {
        vals.push(v);
        true
    });
    vals.sort_unstable();
    vals.dedup();
    vals
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sum(pairs: &[(u64, u32)]) -> PolygonalSum {
        PolygonalSum::from_pairs(pairs).unwrap()
    }

    #[test]
    fn eval_polygonal_examples() {
        assert_eq!(eval_polygonal(3, 3).unwrap(), 6);
        assert_eq!(eval_polygonal(4, -5).unwrap(), 25);
        assert_eq!(eval_polygonal(3, -2).unwrap(), 1);
        assert!(matches!(eval_polygonal(2, 1), Err(Error::OrderTooSmall(2))));
    }

    #[test]
    fn polygonal_symmetries() {
        for x in -50i64..50 {
            assert_eq!(
                eval_polygonal(3, x).unwrap(),
                eval_polygonal(3, -x - 1).unwrap()
            );
            assert_eq!(eval_polygonal(4, x).unwrap(), eval_polygonal(4, -x).unwrap());
            assert!(eval_polygonal(3, x).unwrap() >= 0);
            assert!(eval_polygonal(4, x).unwrap() >= 0);
        }
    }

    #[test]
    fn canonical_ordering() {
        let s = sum(&[(3, 4), (1, 4), (1, 3)]);
        let pairs: Vec<_> = s.terms().iter().map(|t| (t.coeff, t.order)).collect();
        assert_eq!(pairs, vec![(1, 3), (1, 4), (3, 4)]);
    }

    #[test]
    fn represents_examples() {
        // Non-universal depth-4 nodes miss exactly their truant.
        assert!(sum(&[(1, 3), (1, 4), (5, 4), (5, 4)]).represents(18).is_none());
        assert!(sum(&[(1, 4), (2, 4), (5, 4), (5, 4)]).represents(15).is_none());
        let w = sum(&[(1, 3)]).represents(10).unwrap();
        assert_eq!(w.assignment, vec![4]);
        assert_eq!(w.value, 10);
    }

    #[test]
    fn witness_evaluates_to_value() {
        let s = sum(&[(1, 3), (2, 4), (3, 3)]);
        for n in 0..200u64 {
            if let Some(w) = s.represents(n) {
                assert_eq!(s.eval(&w.assignment), n as i64);
            }
        }
    }

    #[test]
    fn representation_count_examples() {
        assert_eq!(sum(&[(1, 4)]).representation_count(4), 2);
        assert_eq!(sum(&[(1, 3)]).representation_count(0), 2);
        assert_eq!(sum(&[(1, 3), (1, 3)]).representation_count(5), 0);
    }

    #[test]
    fn count_positive_iff_witness() {
        let s = sum(&[(1, 3), (3, 4)]);
        for n in 0..300u64 {
            assert_eq!(s.representation_count(n) > 0, s.represents(n).is_some());
        }
    }

    #[test]
    fn sieve_agrees_with_search() {
        let s = sum(&[(1, 3), (1, 3)]);
        let set = s.represented_set(200).unwrap();
        for n in 0..=200u64 {
            assert_eq!(set.contains(n), s.represents(n).is_some(), "n={n}");
        }
        // First gap of P3+P3 is its truant 5.
        assert_eq!(set.missing().next(), Some(5));
    }

    #[test]
    fn two_squares_missing() {
        let set = sum(&[(1, 4), (1, 4)]).represented_set(10).unwrap();
        let missing: Vec<u64> = set.missing().collect();
        assert_eq!(missing, vec![3, 6, 7]);
    }

    #[test]
    fn empty_sum_represents_only_zero() {
        let set = PolygonalSum::empty().represented_set(5).unwrap();
        assert!(set.contains(0));
        let missing: Vec<u64> = set.missing().collect();
        assert_eq!(missing, vec![1, 2, 3, 4, 5]);
        assert_eq!(
            PolygonalSum::empty().truant(100).unwrap(),
            Truant::Truant(1)
        );
    }

    #[test]
    fn truant_examples() {
        assert_eq!(sum(&[(1, 3), (1, 3)]).truant(100).unwrap(), Truant::Truant(5));
        assert_eq!(sum(&[(1, 4)]).truant(100).unwrap(), Truant::Truant(2));
        assert_eq!(
            sum(&[(1, 3), (1, 4), (6, 4)]).truant(100).unwrap(),
            Truant::Truant(47)
        );
    }

    #[test]
    fn sieve_modes_identical() {
        let s = sum(&[(1, 3), (2, 4), (7, 3)]);
        let a = s.represented_set_with(50_000, SieveMode::Sequential).unwrap();
        let b = s.represented_set_with(50_000, SieveMode::Parallel).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn monotone_under_extension() {
        let s = sum(&[(1, 4), (2, 4)]);
        let bigger = s.extended(Term::new(3, 3).unwrap());
        let a = s.represented_set(2_000).unwrap();
        let b = bigger.represented_set(2_000).unwrap();
        for n in 0..=2_000u64 {
            assert!(!a.contains(n) || b.contains(n));
        }
    }

    #[test]
    fn sieve_budget_error_is_distinct() {
        let err = sum(&[(1, 3)]).represented_set(MAX_SIEVE_BOUND).unwrap_err();
        assert!(matches!(err, Error::Budget(_)));
    }

    #[test]
    fn euler_pair_small() {
        let a = sum(&[(1, 3), (1, 3)]).represented_set(20_000).unwrap();
        let b = sum(&[(1, 4), (2, 3)]).represented_set(20_000).unwrap();
        for n in 0..=20_000u64 {
            assert_eq!(a.contains(n), b.contains(n), "n={n}");
        }
    }

    #[test]
    fn display_round_trip_shape() {
        assert_eq!(sum(&[(1, 3), (1, 4), (6, 4)]).to_string(), "P3+P4+6P4");
        assert_eq!(PolygonalSum::empty().to_string(), "0");
    }
}
