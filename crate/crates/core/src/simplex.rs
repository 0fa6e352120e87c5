//! Exact primal simplex for `max c·x` subject to `A x <= b`, `x >= 0`, with
//! `b >= 0` so the origin is a feasible starting vertex.
//!
//! Only the structural variables are kept in dictionary form,
//! `x = x̄ + D z`, where `z` holds the `n` nonbasic variables (structural or
//! slack). Each column of `D` is stored sparsely. A constraint row is read
//! from the input only when it matters: its slack change along the entering
//! column during the ratio test, and its full dictionary row when it leaves.
//! The problem can therefore have many more rows than columns without
//! paying for a dense `m × n` tableau.
//!
//! Pricing is Dantzig's largest coefficient. After a run of degenerate
//! pivots it switches to Bland's rule until the objective moves again, which
//! rules out cycling.

use alloc::vec;
use alloc::vec::Vec;

use crate::rational::Rational;

/// Consecutive degenerate pivots tolerated before Bland's rule takes over.
const DEGENERATE_RUN: usize = 30;

#[derive(Debug, Clone)]
pub(crate) struct LeRow {
    pub terms: Vec<(usize, Rational)>,
    pub rhs: Rational,
}

#[derive(Debug, Clone)]
pub(crate) enum Outcome {
    Optimal {
        x: Vec<Rational>,
        value: Rational,
        pivots: usize,
    },
    Unbounded {
        pivots: usize,
    },
    /// Some right-hand side is negative; this solver only starts from the
    /// origin.
    OriginInfeasible,
}

type SparseCol = Vec<(usize, Rational)>;

struct Tableau<'a> {
    n: usize,
    rows: &'a [LeRow],
    rows_by_col: Vec<Vec<usize>>,
    /// Var id held by each nonbasic position. Ids below `n` are structural,
    /// `n + r` is the slack of row `r`.
    nonbasic: Vec<usize>,
    cols: Vec<SparseCol>,
    xbar: Vec<Rational>,
    slack: Vec<Rational>,
    reduced: Vec<Rational>,
    value: Rational,
    stamp: Vec<usize>,
    epoch: usize,
    /// Scratch index from structural var to its slot in the entering column.
    position: Vec<usize>,
}

enum Leaving {
    Structural(usize),
    Slack(usize),
}

impl Leaving {
    fn id(&self, n: usize) -> usize {
        match *self {
            Leaving::Structural(i) => i,
            Leaving::Slack(r) => n + r,
        }
    }
}

pub(crate) fn maximize(n: usize, objective: &[(usize, Rational)], rows: &[LeRow]) -> Outcome {
    if rows.iter().any(|r| r.rhs.is_negative()) {
        return Outcome::OriginInfeasible;
    }
    let mut rows_by_col = vec![Vec::new(); n];
    for (r, row) in rows.iter().enumerate() {
        for (i, _) in &row.terms {
            rows_by_col[*i].push(r);
        }
    }
    let mut reduced = vec![Rational::zero(); n];
    for (i, c) in objective {
        reduced[*i] = &reduced[*i] + c;
    }
    let mut t = Tableau {
        n,
        rows,
        rows_by_col,
        nonbasic: (0..n).collect(),
        cols: (0..n).map(|k| vec![(k, Rational::one())]).collect(),
        xbar: vec![Rational::zero(); n],
        slack: rows.iter().map(|r| r.rhs.clone()).collect(),
        reduced,
        value: Rational::zero(),
        stamp: vec![usize::MAX; rows.len()],
        epoch: 0,
        position: vec![usize::MAX; n],
    };
    t.run()
}

/// `acc + a * d`, skipping the product when `a` is a unit.
fn add_scaled(acc: &Rational, a: &Rational, d: &Rational) -> Rational {
    if a.is_one() {
        acc + d
    } else if a == &-Rational::one() {
        acc - d
    } else {
        acc + &(a * d)
    }
}

fn lookup(col: &SparseCol, i: usize) -> Option<&Rational> {
    col.binary_search_by_key(&i, |(j, _)| *j)
        .ok()
        .map(|p| &col[p].1)
}

/// `a - b * f`, both sorted by row index.
fn axpy(a: &SparseCol, b: &SparseCol, f: &Rational) -> SparseCol {
    let mut out = Vec::with_capacity(a.len() + b.len());
    let (mut p, mut q) = (0, 0);
    while p < a.len() || q < b.len() {
        let take_a = q == b.len() || (p < a.len() && a[p].0 < b[q].0);
        let take_b = p == a.len() || (q < b.len() && b[q].0 < a[p].0);
        if take_a {
            out.push(a[p].clone());
            p += 1;
        } else if take_b {
            out.push((b[q].0, -&(&b[q].1 * f)));
            q += 1;
        } else {
            let v = a[p].1.sub_mul(&b[q].1, f);
            if !v.is_zero() {
                out.push((a[p].0, v));
            }
            p += 1;
            q += 1;
        }
    }
    out
}

impl Tableau<'_> {
    fn run(&mut self) -> Outcome {
        let mut pivots = 0;
        let mut degenerate = 0;
        loop {
            let bland = degenerate >= DEGENERATE_RUN;
            let Some(k) = self.entering(bland) else {
                return Outcome::Optimal {
                    x: core::mem::take(&mut self.xbar),
                    value: self.value.clone(),
                    pivots,
                };
            };
            let alphas = self.slack_rates(k);
            let Some((leaving, step)) = self.ratio_test(k, &alphas) else {
                return Outcome::Unbounded { pivots };
            };
            if step.is_zero() {
                degenerate += 1;
            } else {
                degenerate = 0;
            }
            self.pivot(k, leaving, step, &alphas);
            pivots += 1;
        }
    }

    fn entering(&self, bland: bool) -> Option<usize> {
        let mut best: Option<usize> = None;
        for k in 0..self.n {
            if !self.reduced[k].is_positive() {
                continue;
            }
            best = match best {
                None => Some(k),
                Some(b) => {
                    let better = if bland {
                        self.nonbasic[k] < self.nonbasic[b]
                    } else {
                        match self.reduced[k].cmp(&self.reduced[b]) {
                            core::cmp::Ordering::Greater => true,
                            core::cmp::Ordering::Less => false,
                            core::cmp::Ordering::Equal => self.nonbasic[k] < self.nonbasic[b],
                        }
                    };
                    Some(if better { k } else { b })
                }
            };
        }
        best
    }

    /// Rate at which each touched row's slack decreases per unit of the
    /// entering variable. Rows not returned do not move.
    fn slack_rates(&mut self, k: usize) -> Vec<(usize, Rational)> {
        self.epoch += 1;
        let mut touched = Vec::new();
        for (i, _) in &self.cols[k] {
            for &r in &self.rows_by_col[*i] {
                if self.stamp[r] != self.epoch {
                    self.stamp[r] = self.epoch;
                    touched.push(r);
                }
            }
        }
        touched.sort_unstable();
        let col = &self.cols[k];
        for (p, (i, _)) in col.iter().enumerate() {
            self.position[*i] = p;
        }
        let alphas = touched
            .into_iter()
            .filter_map(|r| {
                let mut alpha = Rational::zero();
                for (i, a) in &self.rows[r].terms {
                    if let Some(d) = col.get(self.position[*i]).filter(|(j, _)| j == i) {
                        alpha = add_scaled(&alpha, a, &d.1);
                    }
                }
                (!alpha.is_zero()).then_some((r, alpha))
            })
            .collect();
        for (i, _) in col {
            self.position[*i] = usize::MAX;
        }
        alphas
    }

    fn ratio_test(&self, k: usize, alphas: &[(usize, Rational)]) -> Option<(Leaving, Rational)> {
        let n = self.n;
        let mut best: Option<(Leaving, Rational)> = None;
        let consider = |cand: Leaving, ratio: Rational, best: &mut Option<(Leaving, Rational)>| {
            let replace = match best {
                None => true,
                Some((b, r)) => ratio < *r || (ratio == *r && cand.id(n) < b.id(n)),
            };
            if replace {
                *best = Some((cand, ratio));
            }
        };
        for (i, d) in &self.cols[k] {
            if d.is_negative() {
                let ratio = if self.xbar[*i].is_zero() {
                    Rational::zero()
                } else {
                    &self.xbar[*i] / &(-d)
                };
                consider(Leaving::Structural(*i), ratio, &mut best);
            }
        }
        for (r, alpha) in alphas {
            // Nonbasic slacks have rate -1 on their own column and 0 elsewhere,
            // so a positive rate always belongs to a basic row.
            if alpha.is_positive() {
                let ratio = if self.slack[*r].is_zero() {
                    Rational::zero()
                } else {
                    &self.slack[*r] / alpha
                };
                consider(Leaving::Slack(*r), ratio, &mut best);
            }
        }
        best
    }

    /// Dictionary row of the leaving variable, written as `s = s̄ - g·z`.
    fn leaving_row(&self, leaving: &Leaving) -> Vec<Rational> {
        let mut g = vec![Rational::zero(); self.n];
        match *leaving {
            Leaving::Structural(i) => {
                for (l, col) in self.cols.iter().enumerate() {
                    if let Some(d) = lookup(col, i) {
                        g[l] = -d;
                    }
                }
            }
            Leaving::Slack(r) => {
                for (l, col) in self.cols.iter().enumerate() {
                    let mut acc = Rational::zero();
                    for (i, a) in &self.rows[r].terms {
                        if let Some(d) = lookup(col, *i) {
                            acc = add_scaled(&acc, a, d);
                        }
                    }
                    g[l] = acc;
                }
            }
        }
        g
    }

    fn pivot(&mut self, k: usize, leaving: Leaving, step: Rational, alphas: &[(usize, Rational)]) {
        let g = self.leaving_row(&leaving);
        let gk = g[k].clone();
        debug_assert!(gk.is_positive());
        let entering_col = core::mem::take(&mut self.cols[k]);

        if !step.is_zero() {
            for (i, d) in &entering_col {
                self.xbar[*i] = &self.xbar[*i] + &(d * &step);
            }
            for (r, alpha) in alphas {
                self.slack[*r] = self.slack[*r].sub_mul(alpha, &step);
            }
            self.value = &self.value + &(&self.reduced[k] * &step);
        }
        match leaving {
            Leaving::Structural(i) => self.xbar[i] = Rational::zero(),
            Leaving::Slack(r) => self.slack[r] = Rational::zero(),
        }

        let dk = self.reduced[k].clone();
        for l in 0..self.n {
            if l == k || g[l].is_zero() {
                continue;
            }
            let f = &g[l] / &gk;
            self.cols[l] = axpy(&self.cols[l], &entering_col, &f);
            self.reduced[l] = self.reduced[l].sub_mul(&dk, &f);
        }
        let inv = -gk.recip();
        self.cols[k] = entering_col
            .into_iter()
            .map(|(i, d)| (i, &d * &inv))
            .collect();
        self.reduced[k] = &dk * &inv;
        self.nonbasic[k] = leaving.id(self.n);
    }
}
