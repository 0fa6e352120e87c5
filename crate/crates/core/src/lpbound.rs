//! The entropy LP outer bound of an FDG.
//!
//! Columns are joint entropies `h(A)` of the nonempty subsets `A` of the FDG
//! variables. A subset is a bitmask over the frozen variable order (bit `i`
//! is variable `i`), and column `mask - 1` holds `h(mask)`; `h(∅) = 0` never
//! appears. Rows are the elemental Shannon inequalities plus the network
//! constraints: source independence, encoding and decoding functional
//! dependences, and edge capacities.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use crate::fdg::{Fdg, Var};
use crate::netmodel::{Weights, WeightsError};
use crate::rational::Rational;
use crate::simplex::{self, LeRow, Outcome};

/// A set of FDG variables as a bitmask over the frozen variable order.
pub type Subset = u64;

pub const DEFAULT_ELEMENTAL_CAP: usize = 24;
pub const DEFAULT_SOLVER_CAP: usize = 16;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum RowTag {
    Elemental1,
    Elemental2,
    Indep,
    Encode,
    Decode,
    Capacity,
}

impl RowTag {
    pub const ALL: [RowTag; 6] = [
        RowTag::Elemental1,
        RowTag::Elemental2,
        RowTag::Indep,
        RowTag::Encode,
        RowTag::Decode,
        RowTag::Capacity,
    ];
}

impl fmt::Display for RowTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            RowTag::Elemental1 => "ELEMENTAL1",
            RowTag::Elemental2 => "ELEMENTAL2",
            RowTag::Indep => "INDEP",
            RowTag::Encode => "ENCODE",
            RowTag::Decode => "DECODE",
            RowTag::Capacity => "CAPACITY",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sense {
    Le,
    Ge,
    Eq,
}

impl Sense {
    pub fn symbol(self) -> &'static str {
        match self {
            Sense::Le => "<=",
            Sense::Ge => ">=",
            Sense::Eq => "=",
        }
    }
}

/// One constraint `Σ coef · h(subset) <sense> rhs`. Terms are sorted by
/// subset with no zero coefficients.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Row {
    pub tag: RowTag,
    pub name: String,
    pub terms: Vec<(Subset, Rational)>,
    pub sense: Sense,
    pub rhs: Rational,
}

impl Row {
    fn new(tag: RowTag, name: String, terms: Vec<(Subset, i64)>, sense: Sense, rhs: Rational) -> Row {
        let mut acc: BTreeMap<Subset, i64> = BTreeMap::new();
        for (s, c) in terms {
            if s != 0 {
                *acc.entry(s).or_default() += c;
            }
        }
        Row {
            tag,
            name,
            terms: acc
                .into_iter()
                .filter(|(_, c)| *c != 0)
                .map(|(s, c)| (s, Rational::from_integer(c)))
                .collect(),
            sense,
            rhs,
        }
    }

    /// Left-hand side at an assignment of entropies.
    pub fn lhs(&self, h: impl Fn(Subset) -> Rational) -> Rational {
        self.terms.iter().map(|(s, c)| c * &h(*s)).sum()
    }

    pub fn holds(&self, h: impl Fn(Subset) -> Rational) -> bool {
        let lhs = self.lhs(h);
        match self.sense {
            Sense::Le => lhs <= self.rhs,
            Sense::Ge => lhs >= self.rhs,
            Sense::Eq => lhs == self.rhs,
        }
    }
}

/// An elemental inequality in compact form. All have right-hand side 0 and
/// sense `>=`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Elemental {
    /// `h(all) - h(all \ {var}) >= 0`
    Conditional { all: Subset, var: usize },
    /// `h(a ∪ c) + h(b ∪ c) - h(a ∪ b ∪ c) - h(c) >= 0`
    MutualInfo { a: usize, b: usize, c: Subset },
}

impl Elemental {
    /// Signed terms with `h(∅)` dropped, at most four.
    pub fn terms(&self) -> impl Iterator<Item = (Subset, i64)> {
        let arr: [(Subset, i64); 4] = match *self {
            Elemental::Conditional { all, var } => [(all, 1), (all & !(1 << var), -1), (0, 0), (0, 0)],
            Elemental::MutualInfo { a, b, c } => {
                let (a, b) = (1u64 << a, 1u64 << b);
                [(a | c, 1), (b | c, 1), (a | b | c, -1), (c, -1)]
            }
        };
        arr.into_iter().filter(|(s, c)| *s != 0 && *c != 0)
    }

    pub fn tag(&self) -> RowTag {
        match self {
            Elemental::Conditional { .. } => RowTag::Elemental1,
            Elemental::MutualInfo { .. } => RowTag::Elemental2,
        }
    }

    /// `index` counts from 1 within the row's own tag.
    pub fn to_row(&self, index: usize) -> Row {
        let name = match self.tag() {
            RowTag::Elemental1 => format!("elem1_{index}"),
            _ => format!("elem2_{index}"),
        };
        Row::new(self.tag(), name, self.terms().collect(), Sense::Ge, Rational::zero())
    }
}

/// Elemental inequalities over `n` variables: the conditional ones in
/// variable order, then one per pair `a < b` (lexicographic) and subset `c`
/// of the other variables in ascending bitmask order.
#[derive(Debug, Clone)]
pub struct ElementalIter {
    n: usize,
    all: Subset,
    next_var: usize,
    pair: (usize, usize),
    rest: Subset,
    c: Option<Subset>,
}

impl ElementalIter {
    pub fn new(n: usize) -> Self {
        let all = if n == 0 { 0 } else { u64::MAX >> (64 - n) };
        let mut it = ElementalIter {
            n,
            all,
            next_var: 0,
            pair: (0, 1),
            rest: 0,
            c: None,
        };
        it.start_pair();
        it
    }

    fn start_pair(&mut self) {
        let (a, b) = self.pair;
        if b < self.n {
            self.rest = self.all & !(1 << a) & !(1 << b);
            self.c = Some(0);
        } else {
            self.c = None;
        }
    }

    fn advance_pair(&mut self) {
        let (a, b) = self.pair;
        self.pair = if b + 1 < self.n { (a, b + 1) } else { (a + 1, a + 2) };
        self.start_pair();
    }
}

impl Iterator for ElementalIter {
    type Item = Elemental;

    fn next(&mut self) -> Option<Elemental> {
        if self.next_var < self.n {
            let var = self.next_var;
            self.next_var += 1;
            return Some(Elemental::Conditional { all: self.all, var });
        }
        let c = self.c?;
        let (a, b) = self.pair;
        // Next submask of `rest` in ascending order; wraps to 0 after `rest`.
        let next = ((c | !self.rest).wrapping_add(1)) & self.rest;
        if next == 0 {
            self.advance_pair();
        } else {
            self.c = Some(next);
        }
        Some(Elemental::MutualInfo { a, b, c })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum LpError {
    #[error("{n} variables exceed the cap of {cap}; reduce the FDG first")]
    TooManyVars { n: usize, cap: usize },
    #[error("{n} variables exceed the in-process solver cap of {cap}")]
    SolverCap { n: usize, cap: usize },
    #[error("FDG has no variables")]
    Empty,
    #[error("edge variable {0} has no parents")]
    EmptyParents(Var),
    #[error("edge variable {0} has no capacity")]
    MissingCapacity(Var),
    #[error(transparent)]
    Weights(#[from] WeightsError),
    #[error("solver returned a point violating row {0}")]
    WitnessRejected(String),
    #[error("solver objective disagrees with its witness")]
    ObjectiveMismatch,
}

/// The LP bound of one FDG under one weight vector. Elemental rows are
/// generated on demand; network rows are stored.
#[derive(Debug, Clone)]
pub struct LpProblem {
    vars: Vec<Var>,
    objective: Vec<(Subset, Rational)>,
    network_rows: Vec<Row>,
    /// `(parents, var)`: `var` is a function of `parents`.
    dependencies: Vec<(Subset, usize)>,
}

pub fn elemental_inequalities(n: usize, cap: usize) -> Result<ElementalIter, LpError> {
    if n == 0 {
        return Err(LpError::Empty);
    }
    if n > cap {
        return Err(LpError::TooManyVars { n, cap });
    }
    Ok(ElementalIter::new(n))
}

pub fn build_lp(fdg: &Fdg, weights: &Weights) -> Result<LpProblem, LpError> {
    build_lp_capped(fdg, weights, DEFAULT_ELEMENTAL_CAP)
}

pub fn build_lp_capped(fdg: &Fdg, weights: &Weights, cap: usize) -> Result<LpProblem, LpError> {
    let n = fdg.order();
    elemental_inequalities(n, cap)?;
    let sources: Vec<u32> = fdg
        .vars()
        .iter()
        .filter_map(|v| match v {
            Var::Source(s) => Some(*s),
            Var::Edge(_) => None,
        })
        .collect();
    weights.check_against(&sources)?;

    let bit = |i: usize| 1u64 << i;
    let set = |ps: &[usize]| ps.iter().fold(0u64, |m, &p| m | bit(p));
    let source_pos = fdg.source_positions();
    let edge_pos = fdg.edge_positions();

    let mut rows = Vec::new();
    let mut dependencies = Vec::new();
    let mut indep = vec![(set(&source_pos), 1)];
    indep.extend(source_pos.iter().map(|&p| (bit(p), -1)));
    rows.push(Row::new(RowTag::Indep, "indep".into(), indep, Sense::Eq, Rational::zero()));

    for &p in &edge_pos {
        let parents = set(fdg.parents(p));
        if parents == 0 {
            return Err(LpError::EmptyParents(fdg.var(p).clone()));
        }
        dependencies.push((parents, p));
        rows.push(Row::new(
            RowTag::Encode,
            format!("enc_{}", edge_name(fdg.var(p))),
            vec![(parents | bit(p), 1), (parents, -1)],
            Sense::Eq,
            Rational::zero(),
        ));
    }
    for &p in &source_pos {
        let parents = set(fdg.parents(p));
        if parents == 0 {
            continue;
        }
        dependencies.push((parents, p));
        let Var::Source(s) = fdg.var(p) else { unreachable!() };
        rows.push(Row::new(
            RowTag::Decode,
            format!("dec_{s}"),
            vec![(parents | bit(p), 1), (parents, -1)],
            Sense::Eq,
            Rational::zero(),
        ));
    }
    for &p in &edge_pos {
        let cap = fdg
            .capacity(p)
            .ok_or_else(|| LpError::MissingCapacity(fdg.var(p).clone()))?;
        rows.push(Row::new(
            RowTag::Capacity,
            format!("cap_{}", edge_name(fdg.var(p))),
            vec![(bit(p), 1)],
            Sense::Le,
            cap.clone(),
        ));
    }

    let objective = source_pos
        .iter()
        .map(|&p| {
            let Var::Source(s) = fdg.var(p) else { unreachable!() };
            (bit(p), weights.get(*s))
        })
        .filter(|(_, w)| !w.is_zero())
        .collect();

    Ok(LpProblem {
        vars: fdg.vars().to_vec(),
        objective,
        network_rows: rows,
        dependencies,
    })
}

fn edge_name(v: &Var) -> &str {
    match v {
        Var::Edge(e) => e,
        Var::Source(_) => unreachable!("edge position holds a source"),
    }
}

impl LpProblem {
    pub fn n_vars(&self) -> usize {
        self.vars.len()
    }

    pub fn vars(&self) -> &[Var] {
        &self.vars
    }

    /// Number of columns, `2^N - 1`.
    pub fn dimension(&self) -> u64 {
        (1u64 << self.vars.len()) - 1
    }

    pub fn objective(&self) -> &[(Subset, Rational)] {
        &self.objective
    }

    pub fn network_rows(&self) -> &[Row] {
        &self.network_rows
    }

    pub fn elemental(&self) -> ElementalIter {
        ElementalIter::new(self.vars.len())
    }

    /// Every row, elemental first, in export order.
    pub fn rows(&self) -> impl Iterator<Item = Row> + '_ {
        let (mut k1, mut k2) = (0, 0);
        self.elemental()
            .map(move |e| {
                let k = match e {
                    Elemental::Conditional { .. } => {
                        k1 += 1;
                        k1
                    }
                    Elemental::MutualInfo { .. } => {
                        k2 += 1;
                        k2
                    }
                };
                e.to_row(k)
            })
            .chain(self.network_rows.iter().cloned())
    }

    /// Closure of every subset under the functional dependences, indexed
    /// by subset.
    pub fn closures(&self) -> Vec<Subset> {
        let mut table = vec![0; 1usize << self.n_vars()];
        for (a, slot) in table.iter_mut().enumerate() {
            let mut c = a as Subset;
            loop {
                let grown = self
                    .dependencies
                    .iter()
                    .filter(|(parents, _)| c & parents == *parents)
                    .fold(c, |g, (_, v)| g | 1 << v);
                if grown == c {
                    break;
                }
                c = grown;
            }
            *slot = c;
        }
        table
    }

    /// Subset of a single variable, if present.
    pub fn singleton(&self, v: &Var) -> Option<Subset> {
        self.vars.iter().position(|x| x == v).map(|i| 1u64 << i)
    }

    /// Human-readable subset, e.g. `{Y1,U_e3}`.
    pub fn subset_label(&self, s: Subset) -> String {
        let names: Vec<String> = (0..self.vars.len())
            .filter(|i| s >> i & 1 == 1)
            .map(|i| format!("{}", self.vars[i]))
            .collect();
        format!("{{{}}}", names.join(","))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct LpStats {
    pub n_vars: usize,
    pub dimension: u64,
    pub elemental1: usize,
    pub elemental2: usize,
    pub indep: usize,
    pub encode: usize,
    pub decode: usize,
    pub capacity: usize,
    pub total: usize,
}

impl LpStats {
    pub fn count(&self, tag: RowTag) -> usize {
        match tag {
            RowTag::Elemental1 => self.elemental1,
            RowTag::Elemental2 => self.elemental2,
            RowTag::Indep => self.indep,
            RowTag::Encode => self.encode,
            RowTag::Decode => self.decode,
            RowTag::Capacity => self.capacity,
        }
    }

    /// The closed form `N + C(N,2)·2^(N-2) + 1 + 2|E| + |T|`, with `|E|` the
    /// edge variables and `|T|` the decode rows. Differs from `total` only
    /// if some row family deviates from one row per variable.
    pub fn closed_form_total(&self) -> usize {
        let n = self.n_vars;
        let pairs = n * n.saturating_sub(1) / 2;
        let elemental = n + if n >= 2 { pairs << (n - 2) } else { 0 };
        elemental + 1 + 2 * self.capacity + self.decode
    }
}

/// Row counts by tag, taken from the rows themselves.
pub fn lp_stats(p: &LpProblem) -> LpStats {
    let mut s = LpStats {
        n_vars: p.n_vars(),
        dimension: p.dimension(),
        ..LpStats::default()
    };
    for e in p.elemental() {
        match e {
            Elemental::Conditional { .. } => s.elemental1 += 1,
            Elemental::MutualInfo { .. } => s.elemental2 += 1,
        }
    }
    for r in &p.network_rows {
        match r.tag {
            RowTag::Indep => s.indep += 1,
            RowTag::Encode => s.encode += 1,
            RowTag::Decode => s.decode += 1,
            RowTag::Capacity => s.capacity += 1,
            RowTag::Elemental1 | RowTag::Elemental2 => unreachable!(),
        }
    }
    s.total = s.elemental1 + s.elemental2 + s.indep + s.encode + s.decode + s.capacity;
    s
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    Optimal,
    Unbounded,
    Infeasible,
}

impl fmt::Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Status::Optimal => "optimal",
            Status::Unbounded => "unbounded",
            Status::Infeasible => "infeasible",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LpSolution {
    pub status: Status,
    /// Optimal objective value; `None` unless optimal.
    pub value: Option<Rational>,
    /// Nonzero entropies of an optimal point.
    pub witness: BTreeMap<Subset, Rational>,
    pub pivots: usize,
    /// Size of the problem the simplex actually ran on.
    pub solved_columns: usize,
    pub solved_rows: usize,
}

impl LpSolution {
    pub fn h(&self, s: Subset) -> Rational {
        self.witness.get(&s).cloned().unwrap_or_default()
    }

    /// `h(Y_s)` at the optimum, the rate bound of source `s` there.
    pub fn rate_bound(&self, p: &LpProblem, source: u32) -> Option<Rational> {
        p.singleton(&Var::Source(source)).map(|s| self.h(s))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SolveOptions {
    pub max_vars: usize,
    /// Collapse columns with equal closure before solving.
    pub presolve: bool,
}

impl Default for SolveOptions {
    fn default() -> Self {
        SolveOptions {
            max_vars: DEFAULT_SOLVER_CAP,
            presolve: true,
        }
    }
}

/// Checks every row at `witness`, returning the name of the first violated one.
pub fn verify_witness(p: &LpProblem, witness: &BTreeMap<Subset, Rational>) -> Result<(), String> {
    let h = |s: Subset| witness.get(&s).cloned().unwrap_or_default();
    for e in p.elemental() {
        let lhs: Rational = e.terms().map(|(s, c)| Rational::from_integer(c) * h(s)).sum();
        if lhs.is_negative() {
            return Err(e.to_row(0).name);
        }
    }
    for r in &p.network_rows {
        if !r.holds(h) {
            return Err(r.name.clone());
        }
    }
    Ok(())
}

/// The LP handed to the simplex: `max c·x`, `A x <= b`, `x >= 0`.
#[derive(Debug, Clone)]
pub struct Presolved {
    /// Subset behind each column.
    pub columns: Vec<Subset>,
    /// Column of every subset `0..=dimension`; `u32::MAX` for the empty set.
    pub column_of: Vec<u32>,
    pub objective: Vec<(usize, Rational)>,
    /// Rows as `(terms, rhs)` meaning `terms <= rhs`, duplicates dropped.
    pub rows: Vec<(Vec<(usize, Rational)>, Rational)>,
    /// Some row reduced to `0 <= rhs` with `rhs < 0`.
    pub infeasible: bool,
}

/// Rewrites `p` in `<=` form.
///
/// Every feasible point satisfies `h(A) = h(cl A)`, where `cl A` adds each
/// variable whose parents lie in `A` until nothing changes. With `closure`
/// on, only closed subsets get a column and every row is rewritten onto
/// them.
pub fn presolve(p: &LpProblem, closure: bool) -> Presolved {
    let closure: Vec<Subset> = if closure {
        p.closures()
    } else {
        (0..=p.dimension()).collect()
    };
    let mut closed: Vec<Subset> = closure[1..].to_vec();
    closed.sort_unstable();
    closed.dedup();
    let column_of: Vec<u32> = closure
        .iter()
        .map(|c| closed.binary_search(c).map_or(u32::MAX, |i| i as u32))
        .collect();
    let map_terms = |terms: &mut dyn Iterator<Item = (Subset, Rational)>| -> Vec<(usize, Rational)> {
        let mut acc: BTreeMap<usize, Rational> = BTreeMap::new();
        for (s, c) in terms {
            let e = acc.entry(column_of[s as usize] as usize).or_default();
            *e = &*e + &c;
        }
        acc.into_iter().filter(|(_, c)| !c.is_zero()).collect()
    };

    // Elemental rows collapse heavily under the closure, so they are
    // deduplicated in a compact form before any allocation.
    let mut elemental: BTreeSet<([(u32, i8); 4], u8)> = BTreeSet::new();
    for e in p.elemental() {
        let mut key = [(0u32, 0i8); 4];
        let mut len = 0usize;
        for (s, c) in e.terms() {
            let col = column_of[s as usize];
            match key[..len].iter_mut().find(|(k, _)| *k == col) {
                Some(slot) => slot.1 += c as i8,
                None => {
                    key[len] = (col, c as i8);
                    len += 1;
                }
            }
        }
        let mut packed = [(0u32, 0i8); 4];
        let mut m = 0;
        for &(col, c) in &key[..len] {
            if c != 0 {
                packed[m] = (col, c);
                m += 1;
            }
        }
        if m > 0 {
            packed[..m].sort_unstable();
            elemental.insert((packed, m as u8));
        }
    }

    let mut seen: BTreeSet<(Vec<(usize, Rational)>, Rational)> = BTreeSet::new();
    let mut rows: Vec<(Vec<(usize, Rational)>, Rational)> = elemental
        .into_iter()
        .map(|(key, m)| {
            // `lhs >= 0` becomes `-lhs <= 0`.
            let terms = key[..m as usize]
                .iter()
                .map(|&(col, c)| (col as usize, Rational::from_integer(-(c as i64))))
                .collect();
            (terms, Rational::zero())
        })
        .collect();
    let mut infeasible = false;
    let mut push = |terms: Vec<(usize, Rational)>, rhs: Rational| {
        if terms.is_empty() {
            infeasible |= rhs.is_negative();
        } else if seen.insert((terms.clone(), rhs.clone())) {
            rows.push((terms, rhs));
        }
    };
    for r in &p.network_rows {
        let pos = map_terms(&mut r.terms.iter().cloned());
        let neg = || pos.iter().map(|(i, c)| (*i, -c)).collect::<Vec<_>>();
        match r.sense {
            Sense::Le => push(pos.clone(), r.rhs.clone()),
            Sense::Ge => push(neg(), -&r.rhs),
            Sense::Eq => {
                push(neg(), -&r.rhs);
                push(pos.clone(), r.rhs.clone());
            }
        }
    }
    let objective = map_terms(&mut p.objective.iter().cloned());
    Presolved {
        columns: closed,
        column_of,
        objective,
        rows,
        infeasible,
    }
}

/// Solves `p` exactly.
///
/// With `presolve` on, the simplex runs over closed subsets only (see
/// [`presolve`]) and the optimum is lifted back to every column. Either way
/// the returned witness is checked against the full row set.
pub fn lp_solve(p: &LpProblem, opts: SolveOptions) -> Result<LpSolution, LpError> {
    let n = p.n_vars();
    if n > opts.max_vars {
        return Err(LpError::SolverCap { n, cap: opts.max_vars });
    }
    let reduced = presolve(p, opts.presolve);
    let (solved_columns, solved_rows) = (reduced.columns.len(), reduced.rows.len());
    let empty = |status, pivots| LpSolution {
        status,
        value: None,
        witness: BTreeMap::new(),
        pivots,
        solved_columns,
        solved_rows,
    };
    if reduced.infeasible {
        return Ok(empty(Status::Infeasible, 0));
    }
    let rows: Vec<LeRow> = reduced
        .rows
        .into_iter()
        .map(|(terms, rhs)| LeRow { terms, rhs })
        .collect();
    let col_of = reduced.column_of;

    match simplex::maximize(solved_columns, &reduced.objective, &rows) {
        Outcome::Optimal { x, value, pivots } => {
            let witness: BTreeMap<Subset, Rational> = (1..=p.dimension())
                .map(|s| (s, &x[col_of[s as usize] as usize]))
                .filter(|(_, v)| !v.is_zero())
                .map(|(s, v)| (s, v.clone()))
                .collect();
            verify_witness(p, &witness).map_err(LpError::WitnessRejected)?;
            let recomputed: Rational = p
                .objective
                .iter()
                .map(|(s, w)| w * &witness.get(s).cloned().unwrap_or_default())
                .sum();
            if recomputed != value {
                return Err(LpError::ObjectiveMismatch);
            }
            Ok(LpSolution {
                value: Some(value),
                witness,
                ..empty(Status::Optimal, pivots)
            })
        }
        Outcome::Unbounded { pivots } => Ok(empty(Status::Unbounded, pivots)),
        Outcome::OriginInfeasible => Ok(empty(Status::Infeasible, 0)),
    }
}
