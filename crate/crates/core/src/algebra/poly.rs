use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt::Write;
use core::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

/// Index of an indeterminate.
pub type Indet = u32;

/// A product of indeterminates, stored as `(indeterminate, exponent)` pairs
/// sorted by indeterminate with positive exponents.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Monomial(Vec<(Indet, u32)>);

impl Monomial {
    pub fn one() -> Self {
        Monomial(Vec::new())
    }

    pub fn var(x: Indet) -> Self {
        Monomial(alloc::vec![(x, 1)])
    }

    pub fn factors(&self) -> &[(Indet, u32)] {
        &self.0
    }

    pub fn degree(&self) -> u32 {
        self.0.iter().map(|(_, e)| e).sum()
    }

    pub fn max_indet(&self) -> Option<Indet> {
        self.0.last().map(|(x, _)| *x)
    }

    fn mul(&self, other: &Monomial) -> Monomial {
        let (a, b) = (&self.0, &other.0);
        let mut out = Vec::with_capacity(a.len() + b.len());
        let (mut i, mut j) = (0, 0);
        while i < a.len() && j < b.len() {
            match a[i].0.cmp(&b[j].0) {
                core::cmp::Ordering::Less => {
                    out.push(a[i]);
                    i += 1;
                }
                core::cmp::Ordering::Greater => {
                    out.push(b[j]);
                    j += 1;
                }
                core::cmp::Ordering::Equal => {
                    out.push((a[i].0, a[i].1 + b[j].1));
                    i += 1;
                    j += 1;
                }
            }
        }
        out.extend_from_slice(&a[i..]);
        out.extend_from_slice(&b[j..]);
        Monomial(out)
    }

    fn rename(&self, map: impl Fn(Indet) -> Indet) -> Monomial {
        let mut v: Vec<(Indet, u32)> = self.0.iter().map(|&(x, e)| (map(x), e)).collect();
        v.sort_unstable();
        Monomial(v)
    }
}

/// Multivariate polynomial with integer coefficients. Zero coefficients are
/// never stored, so structural equality is polynomial equality.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct Poly(BTreeMap<Monomial, BigInt>);

impl Poly {
    pub fn zero() -> Self {
        Poly(BTreeMap::new())
    }

    pub fn one() -> Self {
        Self::constant(BigInt::one())
    }

    pub fn constant(c: BigInt) -> Self {
        let mut m = BTreeMap::new();
        if !c.is_zero() {
            m.insert(Monomial::one(), c);
        }
        Poly(m)
    }

    pub fn var(x: Indet) -> Self {
        Poly(BTreeMap::from([(Monomial::var(x), BigInt::one())]))
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &BigInt)> {
        self.0.iter()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Highest indeterminate occurring, `None` for constants.
    pub fn max_indet(&self) -> Option<Indet> {
        self.0.keys().filter_map(Monomial::max_indet).max()
    }

    pub fn indets(&self) -> Vec<Indet> {
        let mut v: Vec<Indet> = self.0.keys().flat_map(|m| m.0.iter().map(|(x, _)| *x)).collect();
        v.sort_unstable();
        v.dedup();
        v
    }

    fn add_term(&mut self, m: Monomial, c: BigInt) {
        if c.is_zero() {
            return;
        }
        match self.0.entry(m) {
            alloc::collections::btree_map::Entry::Vacant(e) => {
                e.insert(c);
            }
            alloc::collections::btree_map::Entry::Occupied(mut e) => {
                *e.get_mut() += c;
                if e.get().is_zero() {
                    e.remove();
                }
            }
        }
    }

    /// Value modulo the prime `p`, with `value(x)` already reduced mod `p`.
    pub fn eval_mod(&self, p: u64, value: impl Fn(Indet) -> u64) -> u64 {
        let big_p = BigInt::from(p);
        let mut acc: u64 = 0;
        for (m, c) in &self.0 {
            let c = c.mod_floor(&big_p).to_u64().expect("reduced below p");
            let mut t = c;
            for &(x, e) in &m.0 {
                t = t * pow_mod(value(x), e, p) % p;
            }
            acc = (acc + t) % p;
        }
        acc
    }

    /// Applies `map` to every indeterminate.
    pub fn rename(&self, map: impl Fn(Indet) -> Indet) -> Poly {
        let mut out = Poly::zero();
        for (m, c) in &self.0 {
            out.add_term(m.rename(&map), c.clone());
        }
        out
    }

    /// Renders with `name` for each indeterminate, e.g. `2*a*b^2 + c`.
    pub fn render(&self, name: impl Fn(Indet) -> String) -> String {
        if self.is_zero() {
            return "0".into();
        }
        let mut s = String::new();
        for (i, (m, c)) in self.0.iter().enumerate() {
            let neg = c.is_negative();
            if i == 0 {
                if neg {
                    s.push('-');
                }
            } else {
                s.push_str(if neg { " - " } else { " + " });
            }
            let mag = c.abs();
            let mut parts: Vec<String> = Vec::new();
            if !mag.is_one() || m.0.is_empty() {
                parts.push(alloc::format!("{mag}"));
            }
            for &(x, e) in &m.0 {
                if e == 1 {
                    parts.push(name(x));
                } else {
                    parts.push(alloc::format!("{}^{e}", name(x)));
                }
            }
            let _ = write!(s, "{}", parts.join("*"));
        }
        s
    }
}

pub(crate) fn pow_mod(mut b: u64, mut e: u32, p: u64) -> u64 {
    let mut r = 1 % p;
    b %= p;
    while e > 0 {
        if e & 1 == 1 {
            r = r * b % p;
        }
        b = b * b % p;
        e >>= 1;
    }
    r
}

impl Add for &Poly {
    type Output = Poly;
    fn add(self, rhs: &Poly) -> Poly {
        let mut out = self.clone();
        for (m, c) in &rhs.0 {
            out.add_term(m.clone(), c.clone());
        }
        out
    }
}

impl Sub for &Poly {
    type Output = Poly;
    fn sub(self, rhs: &Poly) -> Poly {
        let mut out = self.clone();
        for (m, c) in &rhs.0 {
            out.add_term(m.clone(), -c);
        }
        out
    }
}

impl Mul for &Poly {
    type Output = Poly;
    fn mul(self, rhs: &Poly) -> Poly {
        let mut out = Poly::zero();
        for (ma, ca) in &self.0 {
            for (mb, cb) in &rhs.0 {
                out.add_term(ma.mul(mb), ca * cb);
            }
        }
        out
    }
}

impl Neg for &Poly {
    type Output = Poly;
    fn neg(self) -> Poly {
        Poly(self.0.iter().map(|(m, c)| (m.clone(), -c)).collect())
    }
}

macro_rules! owned_ops {
    ($($tr:ident $f:ident),*) => {$(
        impl $tr for Poly {
            type Output = Poly;
            fn $f(self, rhs: Poly) -> Poly {
                (&self).$f(&rhs)
            }
        }
    )*};
}
owned_ops!(Add add, Sub sub, Mul mul);
