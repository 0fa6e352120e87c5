//! Functional dependence graphs and their reduction.
//!
//! An [`Fdg`] has one variable per source (`Y_s`) and one per edge (`U_e`).
//! Every variable with parents is a deterministic function of them. Edge
//! variables are removed by the redundancy rules in [`Rule`]; each removal
//! reconnects the removed variable's parents to its children.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use crate::netmodel::{Element, Network, Violation};
use crate::rational::Rational;

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Var {
    /// `Y_s`, the message of source `s`.
    Source(u32),
    /// `U_e`, the symbol carried by edge `e`.
    Edge(String),
}

impl Var {
    pub fn is_source(&self) -> bool {
        matches!(self, Var::Source(_))
    }
}

impl fmt::Display for Var {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Var::Source(s) => write!(f, "Y{s}"),
            Var::Edge(e) => write!(f, "U_{e}"),
        }
    }
}

impl FromStr for Var {
    type Err = FdgError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        if let Some(e) = s.strip_prefix("U_") {
            if !e.is_empty() {
                return Ok(Var::Edge(e.into()));
            }
        } else if let Some(idx) = s.strip_prefix('Y') {
            if let Ok(i) = idx.parse() {
                return Ok(Var::Source(i));
            }
        }
        Err(FdgError::BadVarName(s.into()))
    }
}

/// A sink and the sources it decodes, in network order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Decoder {
    pub sink: String,
    pub demands: Vec<u32>,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum FdgError {
    #[error("network is invalid ({} violations)", .0.len())]
    InvalidNetwork(Vec<Violation>),
    #[error("unknown variable `{0}`")]
    UnknownVar(Var),
    #[error("`{0}` is a source variable; only edge variables can be removed")]
    SourceNotRemovable(Var),
    #[error("variable `{0}` appears twice")]
    DuplicateVar(Var),
    #[error("edge variable `{0}` has no capacity")]
    MissingCapacity(Var),
    #[error("self-loop on `{0}`")]
    SelfLoop(Var),
    #[error("{0} requires every edge capacity to be 1")]
    NonUnitCapacity(Rule),
    #[error("empty variable group")]
    EmptyGroup,
    #[error("{0} applies to exactly one variable")]
    ExpectedSingle(Rule),
    #[error("edge variables contain a dependence cycle")]
    EdgeCycle,
    #[error("bad variable name `{0}`")]
    BadVarName(String),
    #[error("unknown rule `{0}`")]
    BadRule(String),
    #[error("trace step {step} does not replay: {reason}")]
    Replay { step: usize, reason: String },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum FdgWarning {
    /// A demanded source whose variable is not on a dependence cycle: no
    /// sink can reach it.
    SourceNotOnCycle(u32),
}

impl fmt::Display for FdgWarning {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FdgWarning::SourceNotOnCycle(s) => {
                write!(f, "Y{s} is not on a dependence cycle (no decoding path)")
            }
        }
    }
}

/// A functional dependence graph.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Fdg {
    vars: Vec<Var>,
    capacities: Vec<Option<Rational>>,
    // sorted positions into `vars`
    parents: Vec<Vec<usize>>,
    decoders: Vec<Decoder>,
}

/// Result of [`build_fdg`].
#[derive(Debug, Clone)]
pub struct Built {
    pub fdg: Fdg,
    pub warnings: Vec<FdgWarning>,
}

/// Builds the FDG of a valid network.
///
/// Variables are the sources in index order followed by the edges in file
/// order. An edge leaving a source node depends on that node's sources;
/// any other edge depends on the edges entering its tail. A source depends
/// on the in-edges of every sink that demands it.
pub fn build_fdg(net: &Network) -> Result<Built, FdgError> {
    let violations = net.validate();
    if !violations.is_empty() {
        return Err(FdgError::InvalidNetwork(violations));
    }
    let sources = net.source_indices();
    let mut vars: Vec<Var> = sources.iter().map(|&s| Var::Source(s)).collect();
    let mut capacities: Vec<Option<Rational>> = alloc::vec![None; vars.len()];
    for e in &net.edges {
        vars.push(Var::Edge(e.id.clone()));
        capacities.push(Some(e.capacity.clone()));
    }
    let pos: BTreeMap<&Var, usize> = vars.iter().enumerate().map(|(i, v)| (v, i)).collect();
    let edge_pos = |id: &str| pos[&Var::Edge(id.into())];

    let mut parents: Vec<BTreeSet<usize>> = alloc::vec![BTreeSet::new(); vars.len()];
    for e in &net.edges {
        let me = edge_pos(&e.id);
        let hosted = net.sources_at(&e.tail);
        if hosted.is_empty() {
            for p in net.in_edges(Element::Node(&e.tail)).expect("validated") {
                parents[me].insert(edge_pos(p));
            }
        } else {
            for s in hosted {
                parents[me].insert(pos[&Var::Source(s)]);
            }
        }
    }
    for t in &net.sinks {
        let feeding: Vec<usize> = net
            .in_edges(Element::Node(&t.at))
            .expect("validated")
            .into_iter()
            .map(edge_pos)
            .collect();
        for &s in &t.demands {
            parents[pos[&Var::Source(s)]].extend(feeding.iter().copied());
        }
    }

    let fdg = Fdg {
        vars,
        capacities,
        parents: parents.into_iter().map(|p| p.into_iter().collect()).collect(),
        decoders: net
            .sinks
            .iter()
            .map(|t| Decoder {
                sink: t.at.clone(),
                demands: t.demands.iter().copied().collect(),
            })
            .collect(),
    };
    let warnings = sources
        .iter()
        .filter(|&&s| !fdg.on_cycle(fdg.position(&Var::Source(s)).unwrap()))
        .map(|&s| FdgWarning::SourceNotOnCycle(s))
        .collect();
    Ok(Built { fdg, warnings })
}

impl Fdg {
    /// Assembles an FDG from explicit parts, checking structural invariants.
    pub fn from_parts(
        vars: Vec<Var>,
        capacities: BTreeMap<Var, Rational>,
        parents: BTreeMap<Var, Vec<Var>>,
        decoders: Vec<Decoder>,
    ) -> Result<Fdg, FdgError> {
        let mut pos = BTreeMap::new();
        for (i, v) in vars.iter().enumerate() {
            if pos.insert(v.clone(), i).is_some() {
                return Err(FdgError::DuplicateVar(v.clone()));
            }
        }
        let mut caps = Vec::with_capacity(vars.len());
        for v in &vars {
            match (v, capacities.get(v)) {
                (Var::Edge(_), Some(c)) => caps.push(Some(c.clone())),
                (Var::Edge(_), None) => return Err(FdgError::MissingCapacity(v.clone())),
                (Var::Source(_), _) => caps.push(None),
            }
        }
        let mut par = alloc::vec![Vec::new(); vars.len()];
        for (child, ps) in parents {
            let c = *pos.get(&child).ok_or_else(|| FdgError::UnknownVar(child.clone()))?;
            let mut set = BTreeSet::new();
            for p in ps {
                let i = *pos.get(&p).ok_or(FdgError::UnknownVar(p.clone()))?;
                if i == c {
                    return Err(FdgError::SelfLoop(p));
                }
                if !set.insert(i) {
                    return Err(FdgError::DuplicateVar(p));
                }
            }
            par[c] = set.into_iter().collect();
        }
        Ok(Fdg {
            vars,
            capacities: caps,
            parents: par,
            decoders,
        })
    }

    /// Number of variables.
    pub fn order(&self) -> usize {
        self.vars.len()
    }

    pub fn vars(&self) -> &[Var] {
        &self.vars
    }

    pub fn var(&self, i: usize) -> &Var {
        &self.vars[i]
    }

    pub fn position(&self, v: &Var) -> Option<usize> {
        self.vars.iter().position(|w| w == v)
    }

    pub fn is_source(&self, i: usize) -> bool {
        self.vars[i].is_source()
    }

    pub fn capacity(&self, i: usize) -> Option<&Rational> {
        self.capacities[i].as_ref()
    }

    pub fn decoders(&self) -> &[Decoder] {
        &self.decoders
    }

    /// Sinks demanding source `s`, in network order.
    pub fn demand_origin(&self, s: u32) -> Vec<&str> {
        self.decoders
            .iter()
            .filter(|d| d.demands.contains(&s))
            .map(|d| d.sink.as_str())
            .collect()
    }

    /// `Up(i)` as positions, ascending.
    pub fn parents(&self, i: usize) -> &[usize] {
        &self.parents[i]
    }

    /// `Down(i)` as positions, ascending.
    pub fn children(&self, i: usize) -> Vec<usize> {
        (0..self.vars.len())
            .filter(|&j| self.parents[j].binary_search(&i).is_ok())
            .collect()
    }

    pub fn up(&self, v: &Var) -> Result<Vec<&Var>, FdgError> {
        let i = self.require(v)?;
        Ok(self.parents[i].iter().map(|&p| &self.vars[p]).collect())
    }

    pub fn down(&self, v: &Var) -> Result<Vec<&Var>, FdgError> {
        let i = self.require(v)?;
        Ok(self.children(i).into_iter().map(|c| &self.vars[c]).collect())
    }

    pub fn source_positions(&self) -> Vec<usize> {
        (0..self.vars.len()).filter(|&i| self.is_source(i)).collect()
    }

    pub fn edge_positions(&self) -> Vec<usize> {
        (0..self.vars.len()).filter(|&i| !self.is_source(i)).collect()
    }

    /// `|Ē|`, the number of dependence edges.
    pub fn dependence_edge_count(&self) -> usize {
        self.parents.iter().map(Vec::len).sum()
    }

    /// All dependence edges `(parent, child)` as variables.
    pub fn dependence_edges(&self) -> Vec<(Var, Var)> {
        let mut out = Vec::new();
        for (c, ps) in self.parents.iter().enumerate() {
            for &p in ps {
                out.push((self.vars[p].clone(), self.vars[c].clone()));
            }
        }
        out
    }

    /// True when every edge variable has capacity exactly 1.
    pub fn unit_capacities(&self) -> bool {
        self.capacities.iter().flatten().all(Rational::is_one)
    }

    fn require(&self, v: &Var) -> Result<usize, FdgError> {
        self.position(v).ok_or_else(|| FdgError::UnknownVar(v.clone()))
    }

    fn require_edge(&self, v: &Var) -> Result<usize, FdgError> {
        let i = self.require(v)?;
        if self.is_source(i) {
            return Err(FdgError::SourceNotRemovable(v.clone()));
        }
        Ok(i)
    }

    /// Whether `i` can reach itself along dependence edges.
    pub fn on_cycle(&self, i: usize) -> bool {
        let n = self.vars.len();
        let mut children: Vec<Vec<usize>> = alloc::vec![Vec::new(); n];
        for (c, ps) in self.parents.iter().enumerate() {
            for &p in ps {
                children[p].push(c);
            }
        }
        let mut seen = alloc::vec![false; n];
        let mut stack: Vec<usize> = children[i].clone();
        while let Some(x) = stack.pop() {
            if x == i {
                return true;
            }
            if !core::mem::replace(&mut seen[x], true) {
                stack.extend(children[x].iter().copied());
            }
        }
        false
    }

    /// Edge variables in dependence order, ties broken by variable order.
    /// Source variables are ignored, which is what makes the order exist.
    pub fn edge_topological_order(&self) -> Result<Vec<usize>, FdgError> {
        let edges = self.edge_positions();
        let mut indeg = alloc::vec![0usize; self.vars.len()];
        let mut children: Vec<Vec<usize>> = alloc::vec![Vec::new(); self.vars.len()];
        for &c in &edges {
            for &p in &self.parents[c] {
                if !self.is_source(p) {
                    indeg[c] += 1;
                    children[p].push(c);
                }
            }
        }
        let mut ready: BTreeSet<usize> = edges.iter().copied().filter(|&e| indeg[e] == 0).collect();
        let mut order = Vec::with_capacity(edges.len());
        while let Some(e) = ready.pop_first() {
            order.push(e);
            for &c in &children[e] {
                indeg[c] -= 1;
                if indeg[c] == 0 {
                    ready.insert(c);
                }
            }
        }
        if order.len() != edges.len() {
            return Err(FdgError::EdgeCycle);
        }
        Ok(order)
    }

    /// Removes one edge variable, connecting each of its parents to each of
    /// its children.
    pub fn remove_var(&self, v: &Var) -> Result<Fdg, FdgError> {
        let i = self.require_edge(v)?;
        Ok(self.remove_positions(&[i]).0)
    }

    /// Removes a set of edge variables treated as one super-variable: the
    /// union of their parents is connected to the union of their children.
    pub fn remove_group(&self, group: &[Var]) -> Result<Fdg, FdgError> {
        let idx = self.group_positions(group)?;
        Ok(self.remove_positions(&idx).0)
    }

    fn group_positions(&self, group: &[Var]) -> Result<Vec<usize>, FdgError> {
        if group.is_empty() {
            return Err(FdgError::EmptyGroup);
        }
        let mut idx = Vec::with_capacity(group.len());
        for v in group {
            let i = self.require_edge(v)?;
            if idx.contains(&i) {
                return Err(FdgError::DuplicateVar(v.clone()));
            }
            idx.push(i);
        }
        idx.sort_unstable();
        Ok(idx)
    }

    /// Returns the reduced graph and the dependence edges that were added.
    fn remove_positions(&self, removed: &[usize]) -> (Fdg, Vec<(Var, Var)>) {
        let gone = |i: usize| removed.binary_search(&i).is_ok();
        let up: BTreeSet<usize> = removed
            .iter()
            .flat_map(|&r| self.parents[r].iter().copied())
            .filter(|&p| !gone(p))
            .collect();
        let down: BTreeSet<usize> = removed
            .iter()
            .flat_map(|&r| self.children(r))
            .filter(|&c| !gone(c))
            .collect();

        let mut new_index = alloc::vec![usize::MAX; self.vars.len()];
        let mut next = 0;
        for (i, slot) in new_index.iter_mut().enumerate() {
            if !gone(i) {
                *slot = next;
                next += 1;
            }
        }

        let mut added = Vec::new();
        let mut vars = Vec::with_capacity(next);
        let mut capacities = Vec::with_capacity(next);
        let mut parents = Vec::with_capacity(next);
        for i in 0..self.vars.len() {
            if gone(i) {
                continue;
            }
            let mut ps: BTreeSet<usize> =
                self.parents[i].iter().copied().filter(|&p| !gone(p)).collect();
            if down.contains(&i) {
                for &a in &up {
                    // parents also in Down would become self-loops
                    if a != i && ps.insert(a) {
                        added.push((self.vars[a].clone(), self.vars[i].clone()));
                    }
                }
            }
            vars.push(self.vars[i].clone());
            capacities.push(self.capacities[i].clone());
            parents.push(ps.into_iter().map(|p| new_index[p]).collect());
        }
        added.sort();
        (
            Fdg {
                vars,
                capacities,
                parents,
                decoders: self.decoders.clone(),
            },
            added,
        )
    }

    fn has_source_among(&self, set: &[usize]) -> bool {
        set.iter().any(|&p| self.is_source(p))
    }

    fn capacity_sum(&self, set: &[usize]) -> Rational {
        set.iter().filter_map(|&i| self.capacities[i].as_ref()).sum()
    }

    fn require_unit(&self, rule: Rule) -> Result<(), FdgError> {
        if self.unit_capacities() {
            Ok(())
        } else {
            Err(FdgError::NonUnitCapacity(rule))
        }
    }

    /// Shared `Up` and `Down` of a group, or `None` if the members differ.
    fn group_signature(&self, idx: &[usize]) -> Option<(Vec<usize>, Vec<usize>)> {
        let up = self.parents[idx[0]].clone();
        let down = self.children(idx[0]);
        idx[1..]
            .iter()
            .all(|&i| self.parents[i] == up && self.children(i) == down)
            .then_some((up, down))
    }

    fn cor1_at(&self, i: usize) -> bool {
        let up = &self.parents[i];
        !self.has_source_among(up)
            && self.capacities[i].as_ref().is_some_and(|c| *c >= self.capacity_sum(up))
    }

    fn cor2_at(&self, idx: &[usize]) -> bool {
        match self.group_signature(idx) {
            Some((up, _)) => {
                !self.has_source_among(&up) && self.capacity_sum(idx) >= self.capacity_sum(&up)
            }
            None => false,
        }
    }

    fn cor5a_at(&self, i: usize) -> bool {
        let up = &self.parents[i];
        up.len() == 1 && !self.has_source_among(up)
    }

    fn cor5b_at(&self, i: usize) -> bool {
        let down = self.children(i);
        down.len() == 1 && !self.has_source_among(&down)
    }

    /// Evaluates one redundancy rule on a variable (single-variable rules) or
    /// a group (`Cor2`, `Cor4`).
    pub fn removable(&self, rule: Rule, target: &[Var]) -> Result<bool, FdgError> {
        let idx = self.group_positions(target)?;
        if rule.needs_unit_capacity() {
            self.require_unit(rule)?;
        }
        let single = || -> Result<usize, FdgError> {
            match idx.as_slice() {
                [i] => Ok(*i),
                _ => Err(FdgError::ExpectedSingle(rule)),
            }
        };
        Ok(match rule {
            Rule::Cor1 => self.cor1_at(single()?),
            Rule::Cor2 => self.cor2_at(&idx),
            Rule::Cor3 => {
                let i = single()?;
                self.parents[i].len() == 1 && !self.has_source_among(&self.parents[i])
            }
            Rule::Cor4 => match self.group_signature(&idx) {
                Some((up, _)) => !self.has_source_among(&up) && up.len() <= idx.len(),
                None => false,
            },
            Rule::Cor5a => self.cor5a_at(single()?),
            Rule::Cor5b => self.cor5b_at(single()?),
        })
    }

    /// Single-edge redundancy with capacities: no source parent and
    /// `C_v >= sum of parent capacities`.
    pub fn cor1(&self, v: &Var) -> Result<bool, FdgError> {
        self.removable(Rule::Cor1, core::slice::from_ref(v))
    }

    /// Group redundancy: identical `Up`/`Down`, no source parent, and total
    /// group capacity covering the parents' capacity.
    pub fn cor2(&self, group: &[Var]) -> Result<bool, FdgError> {
        self.removable(Rule::Cor2, group)
    }

    /// Unit-capacity form of `cor1`: a single, non-source parent.
    pub fn cor3(&self, v: &Var) -> Result<bool, FdgError> {
        self.removable(Rule::Cor3, core::slice::from_ref(v))
    }

    /// Unit-capacity form of `cor2`: `|Up| <= |group|`.
    pub fn cor4(&self, group: &[Var]) -> Result<bool, FdgError> {
        self.removable(Rule::Cor4, group)
    }

    pub fn cor5a(&self, v: &Var) -> Result<bool, FdgError> {
        self.removable(Rule::Cor5a, core::slice::from_ref(v))
    }

    pub fn cor5b(&self, v: &Var) -> Result<bool, FdgError> {
        self.removable(Rule::Cor5b, core::slice::from_ref(v))
    }

    /// Reduces to a fixpoint. Each round applies the first rule that fires,
    /// in this order: `Cor1` on the first removable variable in dependence
    /// order, `Cor2` on the first qualifying maximal group, and in linear
    /// mode `Cor5a` then `Cor5b`.
    pub fn reduce(&self, mode: Mode) -> Result<(Fdg, ReductionTrace), FdgError> {
        if mode == Mode::Linear {
            self.require_unit(Rule::Cor5a)?;
        }
        let mut cur = self.clone();
        let mut steps = Vec::new();
        while let Some((rule, idx)) = cur.next_reduction(mode)? {
            let step_up = cur.parents[idx[0]].iter().map(|&p| cur.vars[p].clone()).collect();
            let step_down = cur.children(idx[0]).into_iter().map(|c| cur.vars[c].clone()).collect();
            let removed = idx.iter().map(|&i| cur.vars[i].clone()).collect();
            let (next, added) = cur.remove_positions(&idx);
            steps.push(Step {
                rule,
                removed,
                up: step_up,
                down: step_down,
                added,
            });
            cur = next;
        }
        let trace = ReductionTrace::new(steps, self, &cur);
        Ok((cur, trace))
    }

    fn next_reduction(&self, mode: Mode) -> Result<Option<(Rule, Vec<usize>)>, FdgError> {
        let order = self.edge_topological_order()?;
        if let Some(&i) = order.iter().find(|&&i| self.cor1_at(i)) {
            return Ok(Some((Rule::Cor1, alloc::vec![i])));
        }
        let mut groups: BTreeMap<(Vec<usize>, Vec<usize>), Vec<usize>> = BTreeMap::new();
        for &i in &order {
            groups
                .entry((self.parents[i].clone(), self.children(i)))
                .or_default()
                .push(i);
        }
        for mut members in groups.into_values() {
            members.sort_unstable();
            if members.len() >= 2 && self.cor2_at(&members) {
                return Ok(Some((Rule::Cor2, members)));
            }
        }
        if mode == Mode::Linear {
            if let Some(&i) = order.iter().find(|&&i| self.cor5a_at(i)) {
                return Ok(Some((Rule::Cor5a, alloc::vec![i])));
            }
            if let Some(&i) = order.iter().find(|&&i| self.cor5b_at(i)) {
                return Ok(Some((Rule::Cor5b, alloc::vec![i])));
            }
        }
        Ok(None)
    }
}

/// Which capacity notion the reduction must preserve.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    /// General (possibly non-linear) coding capacity and its LP bound.
    Shannon,
    /// Scalar linear coding capacity over unit-capacity networks.
    Linear,
}

impl FromStr for Mode {
    type Err = FdgError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "shannon" => Ok(Mode::Shannon),
            "linear" => Ok(Mode::Linear),
            _ => Err(FdgError::BadRule(s.into())),
        }
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Mode::Shannon => "shannon",
            Mode::Linear => "linear",
        })
    }
}

/// Redundancy rules.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Rule {
    Cor1,
    Cor2,
    Cor3,
    Cor4,
    Cor5a,
    Cor5b,
}

impl Rule {
    pub const ALL: [Rule; 6] = [Rule::Cor1, Rule::Cor2, Rule::Cor3, Rule::Cor4, Rule::Cor5a, Rule::Cor5b];

    pub fn needs_unit_capacity(self) -> bool {
        matches!(self, Rule::Cor3 | Rule::Cor4 | Rule::Cor5a | Rule::Cor5b)
    }

    pub fn is_group_rule(self) -> bool {
        matches!(self, Rule::Cor2 | Rule::Cor4)
    }
}

impl fmt::Display for Rule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Rule::Cor1 => "COR1",
            Rule::Cor2 => "COR2",
            Rule::Cor3 => "COR3",
            Rule::Cor4 => "COR4",
            Rule::Cor5a => "COR5a",
            Rule::Cor5b => "COR5b",
        })
    }
}

impl FromStr for Rule {
    type Err = FdgError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Rule::ALL
            .into_iter()
            .find(|r| r.to_string() == s)
            .ok_or_else(|| FdgError::BadRule(s.into()))
    }
}

/// One rule application.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Step {
    pub rule: Rule,
    pub removed: Vec<Var>,
    /// `Up` of the removed variable(s) at removal time.
    pub up: Vec<Var>,
    /// `Down` of the removed variable(s) at removal time.
    pub down: Vec<Var>,
    /// Dependence edges that did not exist before the removal.
    pub added: Vec<(Var, Var)>,
}

/// Ordered log of a reduction.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ReductionTrace {
    pub steps: Vec<Step>,
    /// Variables removed.
    pub delta_v: usize,
    /// Net dependence edges removed; negative if the rewiring added more
    /// edges than it deleted.
    pub delta_e: i64,
}

impl ReductionTrace {
    fn new(steps: Vec<Step>, original: &Fdg, reduced: &Fdg) -> Self {
        ReductionTrace {
            delta_v: steps.iter().map(|s| s.removed.len()).sum(),
            delta_e: original.dependence_edge_count() as i64 - reduced.dependence_edge_count() as i64,
            steps,
        }
    }

    /// Rebuilds a trace from steps alone, recomputing the deltas against
    /// the original graph.
    pub fn from_steps(steps: Vec<Step>, original: &Fdg) -> Result<Self, FdgError> {
        let trace = ReductionTrace {
            steps,
            delta_v: 0,
            delta_e: 0,
        };
        let reduced = trace.replay(original)?;
        Ok(ReductionTrace::new(trace.steps, original, &reduced))
    }

    /// Applies the recorded steps to `original`, checking at every step that
    /// the rule still fires and that the recorded neighbourhoods and added
    /// edges match.
    pub fn replay(&self, original: &Fdg) -> Result<Fdg, FdgError> {
        let mut cur = original.clone();
        for (n, step) in self.steps.iter().enumerate() {
            let fail = |reason: String| FdgError::Replay { step: n + 1, reason };
            let idx = cur.group_positions(&step.removed).map_err(|e| fail(e.to_string()))?;
            if !cur.removable(step.rule, &step.removed).map_err(|e| fail(e.to_string()))? {
                return Err(fail(alloc::format!("{} does not apply", step.rule)));
            }
            let up: Vec<Var> = cur.parents[idx[0]].iter().map(|&p| cur.vars[p].clone()).collect();
            let down: Vec<Var> = cur.children(idx[0]).into_iter().map(|c| cur.vars[c].clone()).collect();
            if up != step.up || down != step.down {
                return Err(fail("recorded Up/Down differ".into()));
            }
            let (next, added) = cur.remove_positions(&idx);
            if added != step.added {
                return Err(fail("recorded added edges differ".into()));
            }
            cur = next;
        }
        Ok(cur)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::netmodel::{Edge, Sink, Source};
    use alloc::vec;

    fn net(edges: &[(&str, &str, &str)], sources: &[(u32, &str)], sinks: &[(&str, &[u32])]) -> Network {
        let mut nodes: Vec<String> = Vec::new();
        for (_, t, h) in edges {
            for n in [t, h] {
                if !nodes.iter().any(|x| x == n) {
                    nodes.push(n.to_string());
                }
            }
        }
        Network {
            nodes,
            edges: edges
                .iter()
                .map(|(id, t, h)| Edge {
                    id: id.to_string(),
                    tail: t.to_string(),
                    head: h.to_string(),
                    capacity: Rational::one(),
                })
                .collect(),
            sources: sources.iter().map(|(i, at)| Source { index: *i, at: at.to_string() }).collect(),
            sinks: sinks
                .iter()
                .map(|(at, d)| Sink { at: at.to_string(), demands: d.iter().copied().collect() })
                .collect(),
        }
    }

    fn butterfly() -> Network {
        net(
            &[
                ("e_a", "s1", "m"),
                ("e_b", "s2", "m"),
                ("e_c", "m", "n"),
                ("e_d", "n", "t1"),
                ("e_e", "n", "t2"),
                ("e_f", "s1", "t2"),
                ("e_g", "s2", "t1"),
            ],
            &[(1, "s1"), (2, "s2")],
            &[("t1", &[1]), ("t2", &[2])],
        )
    }

    fn u(e: &str) -> Var {
        Var::Edge(e.into())
    }

    fn names(vs: Vec<&Var>) -> Vec<String> {
        vs.into_iter().map(|v| v.to_string()).collect()
    }

    #[test]
    fn butterfly_fdg_structure() {
        let built = build_fdg(&butterfly()).unwrap();
        let g = built.fdg;
        assert!(built.warnings.is_empty());
        assert_eq!(g.order(), 9);
        assert_eq!(names(g.up(&u("e_c")).unwrap()), ["U_e_a", "U_e_b"]);
        assert_eq!(names(g.up(&u("e_a")).unwrap()), ["Y1"]);
        assert_eq!(names(g.up(&Var::Source(1)).unwrap()), ["U_e_d", "U_e_g"]);
        assert_eq!(names(g.down(&u("e_c")).unwrap()), ["U_e_d", "U_e_e"]);
        for s in g.source_positions() {
            assert!(g.on_cycle(s));
        }
        assert_eq!(g.demand_origin(2), ["t2"]);
    }

    #[test]
    fn smallest_network_is_a_two_cycle() {
        let g = build_fdg(&net(&[("e1", "s", "t")], &[(1, "s")], &[("t", &[1])])).unwrap().fdg;
        assert_eq!(g.order(), 2);
        assert_eq!(names(g.up(&u("e1")).unwrap()), ["Y1"]);
        assert_eq!(names(g.up(&Var::Source(1)).unwrap()), ["U_e1"]);
    }

    #[test]
    fn undemanded_source_warns() {
        let n = net(&[("e1", "s", "t"), ("e2", "r", "t")], &[(1, "s"), (2, "r")], &[("t", &[1])]);
        let built = build_fdg(&n).unwrap();
        assert_eq!(built.warnings, vec![FdgWarning::SourceNotOnCycle(2)]);
    }

    #[test]
    fn invalid_network_rejected() {
        let mut n = butterfly();
        n.sinks[0].demands.insert(9);
        assert!(matches!(build_fdg(&n), Err(FdgError::InvalidNetwork(_))));
    }

    #[test]
    fn remove_bottleneck_rewires_grandchildren() {
        let g = build_fdg(&butterfly()).unwrap().fdg;
        let r = g.remove_var(&u("e_c")).unwrap();
        assert_eq!(r.order(), 8);
        assert_eq!(names(r.up(&u("e_d")).unwrap()), ["U_e_a", "U_e_b"]);
        assert_eq!(names(r.up(&u("e_e")).unwrap()), ["U_e_a", "U_e_b"]);
        let r = g.remove_var(&u("e_d")).unwrap();
        assert_eq!(names(r.up(&Var::Source(1)).unwrap()), ["U_e_c", "U_e_g"]);
    }

    #[test]
    fn remove_leaf_and_self_loop_exclusion() {
        // U_x has no children: pure deletion
        let g = Fdg::from_parts(
            vec![Var::Source(1), u("a"), u("x")],
            [(u("a"), Rational::one()), (u("x"), Rational::one())].into(),
            [(u("a"), vec![Var::Source(1)]), (u("x"), vec![u("a")])].into(),
            vec![],
        )
        .unwrap();
        let r = g.remove_var(&u("x")).unwrap();
        assert_eq!(r.dependence_edge_count(), 1);

        // Up(v) ∩ Down(v) = {a}: a -> v -> a must not create a -> a
        let g = Fdg::from_parts(
            vec![u("a"), u("v"), u("b")],
            [(u("a"), Rational::one()), (u("v"), Rational::one()), (u("b"), Rational::one())].into(),
            [(u("v"), vec![u("a"), u("b")]), (u("a"), vec![u("v")])].into(),
            vec![],
        )
        .unwrap();
        let r = g.remove_var(&u("v")).unwrap();
        assert_eq!(names(r.up(&u("a")).unwrap()), ["U_b"]);
        assert!(r.dependence_edges().iter().all(|(p, c)| p != c));
    }

    #[test]
    fn sources_cannot_be_removed() {
        let g = build_fdg(&butterfly()).unwrap().fdg;
        assert_eq!(
            g.remove_var(&Var::Source(1)),
            Err(FdgError::SourceNotRemovable(Var::Source(1)))
        );
        assert_eq!(g.cor1(&Var::Source(1)), Err(FdgError::SourceNotRemovable(Var::Source(1))));
    }

    #[test]
    fn butterfly_predicates() {
        let g = build_fdg(&butterfly()).unwrap().fdg;
        assert!(g.cor3(&u("e_d")).unwrap());
        assert!(g.cor1(&u("e_d")).unwrap());
        assert!(!g.cor1(&u("e_c")).unwrap());
        for e in ["e_a", "e_b", "e_f", "e_g"] {
            assert!(!g.cor1(&u(e)).unwrap());
            assert!(!g.cor3(&u(e)).unwrap());
            assert!(!g.cor5a(&u(e)).unwrap());
        }
        // U_e_a has one non-source child (U_e_c)
        assert!(g.cor5b(&u("e_a")).unwrap());
        // U_e_f has a source child
        assert!(!g.cor5b(&u("e_f")).unwrap());
        assert!(g.cor2(&[u("e_d"), u("e_e")]).is_ok_and(|b| !b));
    }

    #[test]
    fn unit_rules_refuse_general_capacities() {
        let mut n = butterfly();
        n.edges[2].capacity = Rational::from_integer(2);
        let g = build_fdg(&n).unwrap().fdg;
        assert_eq!(g.cor5a(&u("e_d")), Err(FdgError::NonUnitCapacity(Rule::Cor5a)));
        assert_eq!(g.cor3(&u("e_d")), Err(FdgError::NonUnitCapacity(Rule::Cor3)));
        assert!(matches!(g.reduce(Mode::Linear), Err(FdgError::NonUnitCapacity(_))));
        // with C = 2 the bottleneck can forward both inputs
        assert!(g.cor1(&u("e_c")).unwrap());
    }

    #[test]
    fn butterfly_reductions() {
        let g = build_fdg(&butterfly()).unwrap().fdg;
        let (r, trace) = g.reduce(Mode::Shannon).unwrap();
        assert_eq!(r.order(), 7);
        assert_eq!(trace.delta_v, 2);
        assert_eq!(trace.steps.iter().map(|s| s.rule).collect::<Vec<_>>(), [Rule::Cor1, Rule::Cor1]);
        assert_eq!(trace.replay(&g).unwrap(), r);

        let (l, ltrace) = g.reduce(Mode::Linear).unwrap();
        assert_eq!(l.order(), 5);
        assert_eq!(ltrace.replay(&g).unwrap(), l);
        assert_eq!(
            l.vars().iter().map(|v| v.to_string()).collect::<Vec<_>>(),
            ["Y1", "Y2", "U_e_c", "U_e_f", "U_e_g"]
        );
    }

    #[test]
    fn group_rule_on_parallel_edges() {
        // two parallel unit edges a->b carry the two inputs of a forward
        let n = net(
            &[
                ("e1", "s1", "a"),
                ("e2", "s2", "a"),
                ("p1", "a", "b"),
                ("p2", "a", "b"),
                ("x", "b", "t"),
            ],
            &[(1, "s1"), (2, "s2")],
            &[("t", &[1, 2])],
        );
        let g = build_fdg(&n).unwrap().fdg;
        assert!(g.cor2(&[u("p1"), u("p2")]).unwrap());
        assert!(g.cor4(&[u("p1"), u("p2")]).unwrap());
        assert!(!g.cor2(&[u("p1")]).unwrap());
        let (r, trace) = g.reduce(Mode::Shannon).unwrap();
        assert_eq!(trace.steps[0].rule, Rule::Cor2);
        assert_eq!(trace.steps[0].removed, vec![u("p1"), u("p2")]);
        assert_eq!(names(r.up(&u("x")).unwrap()), ["U_e1", "U_e2"]);
    }

    #[test]
    fn irreducible_fdg_is_unchanged() {
        let g = build_fdg(&net(&[("e1", "s", "t")], &[(1, "s")], &[("t", &[1])])).unwrap().fdg;
        let (r, trace) = g.reduce(Mode::Linear).unwrap();
        assert_eq!(r, g);
        assert!(trace.steps.is_empty());
        assert_eq!((trace.delta_v, trace.delta_e), (0, 0));
    }

    #[test]
    fn tampered_trace_does_not_replay() {
        let g = build_fdg(&butterfly()).unwrap().fdg;
        let (_, mut trace) = g.reduce(Mode::Shannon).unwrap();
        trace.steps[0].up = vec![Var::Source(1)];
        assert!(matches!(trace.replay(&g), Err(FdgError::Replay { step: 1, .. })));
        let bogus = Step {
            rule: Rule::Cor1,
            removed: vec![u("e_c")],
            up: vec![],
            down: vec![],
            added: vec![],
        };
        let t = ReductionTrace { steps: vec![bogus], delta_v: 1, delta_e: 0 };
        assert!(t.replay(&g).is_err());
    }

    #[test]
    fn var_names_round_trip() {
        for v in [Var::Source(3), u("e_a"), u("U_x")] {
            assert_eq!(v.to_string().parse::<Var>().unwrap(), v);
        }
        assert!("Z1".parse::<Var>().is_err());
        assert_eq!("COR5b".parse::<Rule>().unwrap(), Rule::Cor5b);
    }
}
