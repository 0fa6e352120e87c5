//! CPLEX-style LP text export.
//!
//! Columns are named `h_<mask>` with the subset bitmask in lowercase hex.
//! The presolved form keeps one column per closed subset and writes every
//! row as `<=`, named `r<index>`.
//! Coefficients are written as decimals when every value in the row has a
//! finite decimal expansion; otherwise the whole row is multiplied by the
//! common denominator so that only integers appear.

use std::fmt::Write;

use fdg_core::lpbound::{LpProblem, Presolved, Subset};
use fdg_core::rational::common_denominator;
use fdg_core::Rational;

const TERMS_PER_LINE: usize = 8;

pub fn column_name(s: Subset) -> String {
    format!("h_{s:x}")
}

/// Scales a row so every number prints exactly.
fn printable(terms: &[(Subset, Rational)], rhs: &Rational) -> (Vec<(Subset, Rational)>, Rational) {
    let exact = terms.iter().map(|(_, c)| c).chain([rhs]).all(|c| c.to_exact_decimal().is_some());
    if exact {
        return (terms.to_vec(), rhs.clone());
    }
    let k = Rational::from_bigint(common_denominator(terms.iter().map(|(_, c)| c).chain([rhs])));
    (terms.iter().map(|(s, c)| (*s, c * &k)).collect(), rhs * &k)
}

fn number(c: &Rational) -> String {
    c.to_exact_decimal().expect("row scaled to exact values")
}

fn write_terms(out: &mut String, terms: &[(Subset, Rational)]) {
    if terms.is_empty() {
        out.push_str(" 0 h_1");
        return;
    }
    for (i, (s, c)) in terms.iter().enumerate() {
        if i > 0 && i % TERMS_PER_LINE == 0 {
            out.push_str("\n   ");
        }
        let sign = if c.is_negative() { "-" } else { "+" };
        let mag = c.abs();
        if i == 0 && !c.is_negative() {
            out.push(' ');
        } else {
            let _ = write!(out, " {sign} ");
        }
        if !mag.is_one() {
            let _ = write!(out, "{} ", number(&mag));
        }
        out.push_str(&column_name(*s));
    }
}

fn header(objective: &[(Subset, Rational)]) -> String {
    let mut out = String::from("Maximize\n obj:");
    let (obj, _) = printable(objective, &Rational::zero());
    write_terms(&mut out, &obj);
    out.push_str("\nSubject To\n");
    out
}

fn write_row(out: &mut String, name: &str, terms: &[(Subset, Rational)], sense: &str, rhs: &Rational) {
    let (terms, rhs) = printable(terms, rhs);
    let _ = write!(out, " {name}:");
    write_terms(out, &terms);
    let _ = writeln!(out, " {sense} {}", number(&rhs));
}

fn footer(out: &mut String, columns: impl Iterator<Item = Subset>) {
    out.push_str("Bounds\n");
    for s in columns {
        let _ = writeln!(out, " {} >= 0", column_name(s));
    }
    out.push_str("End\n");
}

pub fn export_lp(p: &LpProblem) -> String {
    let mut out = header(p.objective());
    for row in p.rows() {
        write_row(&mut out, &row.name, &row.terms, row.sense.symbol(), &row.rhs);
    }
    footer(&mut out, 1..=p.dimension());
    out
}

/// The closure-presolved LP, which has the same optimum as `p`.
pub fn export_presolved(q: &Presolved) -> String {
    let on_subsets = |terms: &[(usize, Rational)]| -> Vec<(Subset, Rational)> {
        terms.iter().map(|(i, c)| (q.columns[*i], c.clone())).collect()
    };
    let mut out = header(&on_subsets(&q.objective));
    for (k, (terms, rhs)) in q.rows.iter().enumerate() {
        write_row(&mut out, &format!("r{k}"), &on_subsets(terms), "<=", rhs);
    }
    footer(&mut out, q.columns.iter().copied());
    out
}
