use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use super::poly::{Indet, Poly};
use crate::fdg::{Fdg, FdgError, Var};

/// Dense matrix of polynomials.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PolyMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Poly>,
}

impl PolyMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        PolyMatrix {
            rows,
            cols,
            data: vec![Poly::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.set(i, i, Poly::one());
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &Poly {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, p: Poly) {
        self.data[i * self.cols + j] = p;
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(Poly::is_zero)
    }

    /// Number of nonzero entries.
    pub fn support(&self) -> usize {
        self.data.iter().filter(|p| !p.is_zero()).count()
    }

    pub fn mul(&self, other: &PolyMatrix) -> PolyMatrix {
        assert_eq!(self.cols, other.rows, "dimension mismatch");
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let b = other.get(k, j);
                    if !b.is_zero() {
                        let cur = out.get(i, j);
                        let next = cur + &(a * b);
                        out.set(i, j, next);
                    }
                }
            }
        }
        out
    }

    pub fn add(&self, other: &PolyMatrix) -> PolyMatrix {
        self.zip(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &PolyMatrix) -> PolyMatrix {
        self.zip(other, |a, b| a - b)
    }

    fn zip(&self, other: &PolyMatrix, f: impl Fn(&Poly, &Poly) -> Poly) -> PolyMatrix {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols), "dimension mismatch");
        PolyMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&other.data).map(|(a, b)| f(a, b)).collect(),
        }
    }

    pub fn map(&self, f: impl Fn(&Poly) -> Poly) -> PolyMatrix {
        PolyMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(f).collect(),
        }
    }
}

/// A decoding slot: sink `sink` recovering source `source`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Slot {
    pub sink: String,
    pub source: u32,
}

impl fmt::Display for Slot {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}.Y{}", self.sink, self.source)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Endpoint {
    Source(u32),
    Edge(String),
    Slot(Slot),
}

impl fmt::Display for Endpoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Endpoint::Source(s) => write!(f, "Y{s}"),
            Endpoint::Edge(e) => f.write_str(e),
            Endpoint::Slot(s) => write!(f, "{s}"),
        }
    }
}

/// The coefficient carried by one FDG dependence edge.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Indeterminate {
    pub from: Endpoint,
    pub to: Endpoint,
}

impl Indeterminate {
    pub fn name(&self) -> String {
        format!("eps_{}_{}", self.from, self.to)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum TransferError {
    #[error("scalar linear coding needs unit capacities")]
    NonUnitCapacity,
    #[error(transparent)]
    Fdg(#[from] FdgError),
    #[error("source Y{from} feeds source Y{to} directly")]
    SourceLink { from: u32, to: u32 },
    #[error("edge adjacency is not nilpotent")]
    NotNilpotent,
}

/// Symbolic scalar linear code of an FDG: `A` maps sources to edges, `F`
/// edges to edges and `B` edges to decoding slots. Edge variables are in
/// dependence order, so `F` is strictly upper triangular.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TransferSystem {
    sources: Vec<u32>,
    edges: Vec<String>,
    slots: Vec<Slot>,
    indets: Vec<Indeterminate>,
    a: PolyMatrix,
    f: PolyMatrix,
    b: PolyMatrix,
}

/// One fresh indeterminate per dependence edge of the FDG, numbered through
/// `A` row by row, then `F`, then `B`.
///
/// A slot for `(sink, s)` reads every edge variable that `Y_s` depends on.
pub fn build_transfer_system(fdg: &Fdg) -> Result<TransferSystem, TransferError> {
    if !fdg.unit_capacities() {
        return Err(TransferError::NonUnitCapacity);
    }
    let order = fdg.edge_topological_order()?;
    let source_pos = fdg.source_positions();
    let source_of = |p: usize| match fdg.var(p) {
        Var::Source(s) => *s,
        Var::Edge(_) => unreachable!(),
    };
    let edge_of = |p: usize| match fdg.var(p) {
        Var::Edge(e) => e.clone(),
        Var::Source(_) => unreachable!(),
    };
    for &p in &source_pos {
        if let Some(&q) = fdg.parents(p).iter().find(|&&q| fdg.is_source(q)) {
            return Err(TransferError::SourceLink {
                from: source_of(q),
                to: source_of(p),
            });
        }
    }

    let sources: Vec<u32> = source_pos.iter().map(|&p| source_of(p)).collect();
    let edges: Vec<String> = order.iter().map(|&p| edge_of(p)).collect();
    let slots: Vec<Slot> = fdg
        .decoders()
        .iter()
        .flat_map(|d| {
            d.demands.iter().map(|&s| Slot {
                sink: d.sink.clone(),
                source: s,
            })
        })
        .collect();

    let mut indets = Vec::new();
    let mut fresh = |from: Endpoint, to: Endpoint| {
        indets.push(Indeterminate { from, to });
        Poly::var((indets.len() - 1) as Indet)
    };

    let mut a = PolyMatrix::zeros(sources.len(), edges.len());
    for (i, &sp) in source_pos.iter().enumerate() {
        for (j, &ep) in order.iter().enumerate() {
            if fdg.parents(ep).binary_search(&sp).is_ok() {
                a.set(i, j, fresh(Endpoint::Source(sources[i]), Endpoint::Edge(edges[j].clone())));
            }
        }
    }
    let mut f = PolyMatrix::zeros(edges.len(), edges.len());
    for (i, &from) in order.iter().enumerate() {
        for (j, &to) in order.iter().enumerate() {
            if fdg.parents(to).binary_search(&from).is_ok() {
                f.set(i, j, fresh(Endpoint::Edge(edges[i].clone()), Endpoint::Edge(edges[j].clone())));
            }
        }
    }
    let mut b = PolyMatrix::zeros(edges.len(), slots.len());
    for (i, &from) in order.iter().enumerate() {
        for (j, slot) in slots.iter().enumerate() {
            let y = fdg
                .position(&Var::Source(slot.source))
                .expect("demanded source has a variable");
            if fdg.parents(y).binary_search(&from).is_ok() {
                b.set(i, j, fresh(Endpoint::Edge(edges[i].clone()), Endpoint::Slot(slot.clone())));
            }
        }
    }

    Ok(TransferSystem {
        sources,
        edges,
        slots,
        indets,
        a,
        f,
        b,
    })
}

impl TransferSystem {
    pub fn sources(&self) -> &[u32] {
        &self.sources
    }

    pub fn edges(&self) -> &[String] {
        &self.edges
    }

    pub fn slots(&self) -> &[Slot] {
        &self.slots
    }

    pub fn indeterminates(&self) -> &[Indeterminate] {
        &self.indets
    }

    pub fn indet_count(&self) -> usize {
        self.indets.len()
    }

    pub fn name(&self, x: Indet) -> String {
        self.indets[x as usize].name()
    }

    pub fn find(&self, name: &str) -> Option<Indet> {
        self.indets.iter().position(|i| i.name() == name).map(|i| i as Indet)
    }

    pub fn a(&self) -> &PolyMatrix {
        &self.a
    }

    pub fn f(&self) -> &PolyMatrix {
        &self.f
    }

    pub fn b(&self) -> &PolyMatrix {
        &self.b
    }

    /// `demand[s][slot]` is true when the slot decodes source `sources()[s]`.
    pub fn demand(&self) -> Vec<Vec<bool>> {
        self.sources
            .iter()
            .map(|&s| self.slots.iter().map(|slot| slot.source == s).collect())
            .collect()
    }

    /// `I + F + … + F^L` and the number of nonzero powers `L`.
    pub fn series(&self) -> Result<(PolyMatrix, usize), TransferError> {
        let n = self.edges.len();
        for i in 0..n {
            for j in 0..=i {
                if !self.f.get(i, j).is_zero() {
                    return Err(TransferError::NotNilpotent);
                }
            }
        }
        let mut sum = PolyMatrix::identity(n);
        let mut power = PolyMatrix::identity(n);
        let mut length = 0;
        loop {
            power = power.mul(&self.f);
            if power.is_zero() {
                return Ok((sum, length));
            }
            length += 1;
            sum = sum.add(&power);
        }
    }
}

/// `M = A (I - F)^{-1} B`, a `|sources| × |slots|` matrix.
pub fn transfer_matrix(ts: &TransferSystem) -> Result<PolyMatrix, TransferError> {
    let (series, _) = ts.series()?;
    Ok(ts.a.mul(&series).mul(&ts.b))
}
