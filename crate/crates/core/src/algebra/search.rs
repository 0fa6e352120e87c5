use alloc::collections::BTreeMap;
use alloc::vec;
use alloc::vec::Vec;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::ToPrimitive;

use super::poly::{pow_mod, Indet};
use super::transfer::PolyMatrix;

pub const DEFAULT_MAX_FIELD: u64 = 7;
pub const DEFAULT_MAX_INDETS: usize = 16;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SearchOptions {
    pub max_field: u64,
    /// Cap on indeterminates left free after pinning.
    pub max_indets: usize,
}

impl Default for SearchOptions {
    fn default() -> Self {
        SearchOptions {
            max_field: DEFAULT_MAX_FIELD,
            max_indets: DEFAULT_MAX_INDETS,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SearchOutcome {
    /// Value of every indeterminate, by id.
    Found { assignment: Vec<u64>, evaluations: u64 },
    Exhausted { evaluations: u64 },
}

impl SearchOutcome {
    /// Partial assignments checked against the matrix before the search
    /// stopped.
    pub fn evaluations(&self) -> u64 {
        match self {
            SearchOutcome::Found { evaluations, .. } | SearchOutcome::Exhausted { evaluations } => *evaluations,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum SearchError {
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("field size {p} exceeds the cap of {cap}")]
    FieldCap { p: u64, cap: u64 },
    #[error("{count} free indeterminates exceed the cap of {cap}")]
    IndetCap { count: usize, cap: usize },
    #[error("pinned indeterminate {0} does not exist")]
    UnknownPin(Indet),
    #[error("pinned value {value} is not below {p}")]
    PinOutOfRange { value: u64, p: u64 },
    #[error("demand pattern shape does not match the matrix")]
    Shape,
}

fn is_prime(p: u64) -> bool {
    p >= 2 && (2..).take_while(|d| d * d <= p).all(|d| p % d != 0)
}

/// A matrix entry reduced mod `p`, with the 0/1 value it must take.
struct Check {
    terms: Vec<(u64, Vec<(Indet, u32)>)>,
    target: u64,
}

impl Check {
    fn holds(&self, p: u64, values: &[u64]) -> bool {
        let mut acc = 0;
        for (c, factors) in &self.terms {
            let mut t = *c;
            for &(x, e) in factors {
                t = t * pow_mod(values[x as usize], e, p) % p;
            }
            acc = (acc + t) % p;
        }
        acc == self.target
    }
}

/// Searches GF(`p`) for values of the `n_indets` indeterminates under which
/// `m` equals the 0/1 `demand` pattern entrywise.
///
/// Assignments are tried in lexicographic order of the value vector, lowest
/// id most significant, so the first hit is the smallest solution. Each
/// entry is checked as soon as its highest indeterminate is set, and a
/// failing prefix is abandoned. Indeterminates absent from `m` stay at 0
/// unless pinned.
pub fn solvability_search(
    m: &PolyMatrix,
    demand: &[Vec<bool>],
    n_indets: usize,
    p: u64,
    pins: &BTreeMap<Indet, u64>,
    opts: SearchOptions,
) -> Result<SearchOutcome, SearchError> {
    if !is_prime(p) {
        return Err(SearchError::NotPrime(p));
    }
    if p > opts.max_field {
        return Err(SearchError::FieldCap { p, cap: opts.max_field });
    }
    for (&x, &v) in pins {
        if x as usize >= n_indets {
            return Err(SearchError::UnknownPin(x));
        }
        if v >= p {
            return Err(SearchError::PinOutOfRange { value: v, p });
        }
    }
    let free = n_indets - pins.len();
    if free > opts.max_indets {
        return Err(SearchError::IndetCap {
            count: free,
            cap: opts.max_indets,
        });
    }
    if demand.len() != m.rows() || demand.iter().any(|r| r.len() != m.cols()) {
        return Err(SearchError::Shape);
    }

    let big_p = BigInt::from(p);
    let mut checks: Vec<Vec<Check>> = (0..=n_indets).map(|_| Vec::new()).collect();
    let mut used = vec![false; n_indets];
    for (i, row) in demand.iter().enumerate() {
        for (j, &want) in row.iter().enumerate() {
            let entry = m.get(i, j);
            let terms: Vec<(u64, Vec<(Indet, u32)>)> = entry
                .terms()
                .map(|(mono, c)| {
                    let c = c.mod_floor(&big_p).to_u64().expect("reduced below p");
                    (c, mono.factors().to_vec())
                })
                .filter(|(c, _)| *c != 0)
                .collect();
            for x in entry.indets() {
                used[x as usize] = true;
            }
            // Constants are checked at level 0, before anything is assigned.
            let level = entry.max_indet().map_or(0, |x| x as usize + 1);
            checks[level].push(Check {
                terms,
                target: want as u64,
            });
        }
    }

    let mut values: Vec<u64> = (0..n_indets as Indet).map(|x| pins.get(&x).copied().unwrap_or(0)).collect();
    let mut search = Search {
        p,
        pins,
        used: &used,
        checks: &checks,
        evaluations: 0,
    };
    search.evaluations += 1;
    if !checks[0].iter().all(|c| c.holds(p, &values)) {
        return Ok(SearchOutcome::Exhausted {
            evaluations: search.evaluations,
        });
    }
    Ok(if search.descend(0, &mut values) {
        SearchOutcome::Found {
            assignment: values,
            evaluations: search.evaluations,
        }
    } else {
        SearchOutcome::Exhausted {
            evaluations: search.evaluations,
        }
    })
}

struct Search<'a> {
    p: u64,
    pins: &'a BTreeMap<Indet, u64>,
    used: &'a [bool],
    checks: &'a [Vec<Check>],
    evaluations: u64,
}

impl Search<'_> {
    fn descend(&mut self, x: usize, values: &mut [u64]) -> bool {
        if x == values.len() {
            return true;
        }
        let choices = match self.pins.get(&(x as Indet)) {
            Some(&v) => v..v + 1,
            None if !self.used[x] => 0..1,
            None => 0..self.p,
        };
        for v in choices {
            values[x] = v;
            let level = &self.checks[x + 1];
            if !level.is_empty() {
                self.evaluations += 1;
                if !level.iter().all(|c| c.holds(self.p, values)) {
                    continue;
                }
            }
            if self.descend(x + 1, values) {
                return true;
            }
        }
        values[x] = self.pins.get(&(x as Indet)).copied().unwrap_or(0);
        false
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::poly::Poly;

    fn x(i: Indet) -> Poly {
        Poly::var(i)
    }

    /// 1×1 matrix holding `p`.
    fn single(p: Poly) -> PolyMatrix {
        let mut m = PolyMatrix::zeros(1, 1);
        m.set(0, 0, p);
        m
    }

    #[test]
    fn product_needs_both_ones() {
        let m = single(&x(0) * &x(1));
        let out = solvability_search(&m, &[vec![true]], 2, 2, &BTreeMap::new(), SearchOptions::default()).unwrap();
        assert!(matches!(out, SearchOutcome::Found { ref assignment, .. } if assignment == &vec![1, 1]));
    }

    #[test]
    fn sum_vanishing_needs_characteristic_two() {
        // x + y = 0 and x = 1 and y = 1 all at once
        let mut m = PolyMatrix::zeros(1, 3);
        m.set(0, 0, &x(0) + &x(1));
        m.set(0, 1, x(0));
        m.set(0, 2, x(1));
        let d = [vec![false, true, true]];
        let none = BTreeMap::new();
        let opts = SearchOptions::default();
        assert!(matches!(solvability_search(&m, &d, 2, 2, &none, opts).unwrap(), SearchOutcome::Found { .. }));
        for p in [3, 5, 7] {
            assert!(matches!(solvability_search(&m, &d, 2, p, &none, opts).unwrap(), SearchOutcome::Exhausted { .. }));
        }
    }

    #[test]
    fn lexicographic_first_and_pins() {
        // x0 + x1 = 1 over GF(3): first solution is (0, 1)
        let m = single(&x(0) + &x(1));
        let d = [vec![true]];
        let opts = SearchOptions::default();
        let first = solvability_search(&m, &d, 2, 3, &BTreeMap::new(), opts).unwrap();
        assert!(matches!(first, SearchOutcome::Found { ref assignment, .. } if assignment == &vec![0, 1]));
        let pinned = solvability_search(&m, &d, 2, 3, &BTreeMap::from([(0, 2)]), opts).unwrap();
        assert!(matches!(pinned, SearchOutcome::Found { ref assignment, .. } if assignment == &vec![2, 2]));
    }

    #[test]
    fn refusals() {
        let m = single(x(0));
        let d = [vec![true]];
        let none = BTreeMap::new();
        let opts = SearchOptions::default();
        assert_eq!(solvability_search(&m, &d, 1, 4, &none, opts), Err(SearchError::NotPrime(4)));
        assert_eq!(solvability_search(&m, &d, 1, 11, &none, opts), Err(SearchError::FieldCap { p: 11, cap: 7 }));
        let tight = SearchOptions { max_indets: 0, ..opts };
        assert_eq!(solvability_search(&m, &d, 1, 2, &none, tight), Err(SearchError::IndetCap { count: 1, cap: 0 }));
        assert_eq!(solvability_search(&m, &d, 1, 2, &BTreeMap::from([(0, 2)]), opts), Err(SearchError::PinOutOfRange { value: 2, p: 2 }));
        assert_eq!(solvability_search(&m, &[vec![true, false]], 1, 2, &none, opts), Err(SearchError::Shape));
    }

    #[test]
    fn constant_mismatch_exhausts_immediately() {
        let m = single(Poly::zero());
        let out = solvability_search(&m, &[vec![true]], 0, 2, &BTreeMap::new(), SearchOptions::default()).unwrap();
        assert_eq!(out, SearchOutcome::Exhausted { evaluations: 1 });
    }
}
