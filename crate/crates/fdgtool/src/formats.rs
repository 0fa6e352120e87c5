//! JSON encodings of networks, FDGs, reduction traces, transfer matrices
//! and search results.
//!
//! Objects are strict: unknown keys are rejected unless they start with
//! `_`, which marks a comment. Rationals are written as strings (`"1"`,
//! `"3/2"`). Output maps use sorted keys, so encodings are byte-stable.

use std::collections::{BTreeMap, BTreeSet};

use fdg_core::algebra::{PolyMatrix, TransferSystem};
use fdg_core::fdg::Decoder;
use fdg_core::netmodel::Violation;
use fdg_core::{Edge, Fdg, Network, Rational, ReductionTrace, Rule, Sink, Source, Step, Var};
use serde_json::{json, Map, Value};

#[derive(Debug, thiserror::Error)]
pub enum FormatError {
    #[error("malformed JSON: {0}")]
    Syntax(#[from] serde_json::Error),
    #[error("{path}: {msg}")]
    Schema { path: String, msg: String },
    #[error("invalid network: {}", join(.0))]
    Invalid(Vec<Violation>),
    #[error("{0}")]
    Fdg(#[from] fdg_core::fdg::FdgError),
}

fn join(v: &[Violation]) -> String {
    v.iter().map(ToString::to_string).collect::<Vec<_>>().join("; ")
}

fn schema(path: &str, msg: impl Into<String>) -> FormatError {
    FormatError::Schema {
        path: path.to_string(),
        msg: msg.into(),
    }
}

/// A JSON object whose keys are checked off as they are read.
struct Obj<'a> {
    path: String,
    map: &'a Map<String, Value>,
}

impl<'a> Obj<'a> {
    fn new(v: &'a Value, path: impl Into<String>, keys: &[&str]) -> Result<Self, FormatError> {
        let path = path.into();
        let map = v.as_object().ok_or_else(|| schema(&path, "expected an object"))?;
        if let Some(k) = map.keys().find(|k| !k.starts_with('_') && !keys.contains(&k.as_str())) {
            return Err(schema(&path, format!("unknown key `{k}`")));
        }
        Ok(Obj { path, map })
    }

    fn at(&self, key: &str) -> String {
        format!("{}.{key}", self.path)
    }

    fn get(&self, key: &str) -> Result<&'a Value, FormatError> {
        self.map.get(key).ok_or_else(|| schema(&self.path, format!("missing `{key}`")))
    }

    fn str(&self, key: &str) -> Result<&'a str, FormatError> {
        self.get(key)?.as_str().ok_or_else(|| schema(&self.at(key), "expected a string"))
    }

    fn array(&self, key: &str) -> Result<&'a [Value], FormatError> {
        self.get(key)?
            .as_array()
            .map(Vec::as_slice)
            .ok_or_else(|| schema(&self.at(key), "expected an array"))
    }

    fn index(&self, key: &str) -> Result<u32, FormatError> {
        as_index(self.get(key)?, &self.at(key))
    }
}

fn as_index(v: &Value, path: &str) -> Result<u32, FormatError> {
    v.as_u64()
        .and_then(|n| u32::try_from(n).ok())
        .ok_or_else(|| schema(path, "expected a non-negative integer"))
}

fn as_str<'a>(v: &'a Value, path: &str) -> Result<&'a str, FormatError> {
    v.as_str().ok_or_else(|| schema(path, "expected a string"))
}

fn as_rational(v: &Value, path: &str) -> Result<Rational, FormatError> {
    as_str(v, path)?.parse().map_err(|e| schema(path, format!("{e}")))
}

/// Reads a network without validating it.
pub fn parse_network_unchecked(text: &str) -> Result<Network, FormatError> {
    let doc: Value = serde_json::from_str(text)?;
    let top = Obj::new(&doc, "$", &["nodes", "edges", "sources", "sinks"])?;
    let nodes = top
        .array("nodes")?
        .iter()
        .enumerate()
        .map(|(i, n)| as_str(n, &format!("$.nodes[{i}]")).map(String::from))
        .collect::<Result<_, _>>()?;
    let mut edges = Vec::new();
    for (i, e) in top.array("edges")?.iter().enumerate() {
        let o = Obj::new(e, format!("$.edges[{i}]"), &["id", "tail", "head", "cap"])?;
        edges.push(Edge {
            id: o.str("id")?.into(),
            tail: o.str("tail")?.into(),
            head: o.str("head")?.into(),
            capacity: as_rational(o.get("cap")?, &o.at("cap"))?,
        });
    }
    let mut sources = Vec::new();
    for (i, s) in top.array("sources")?.iter().enumerate() {
        let o = Obj::new(s, format!("$.sources[{i}]"), &["index", "at"])?;
        sources.push(Source {
            index: o.index("index")?,
            at: o.str("at")?.into(),
        });
    }
    let mut sinks = Vec::new();
    for (i, t) in top.array("sinks")?.iter().enumerate() {
        let o = Obj::new(t, format!("$.sinks[{i}]"), &["at", "demands"])?;
        let demands = o
            .array("demands")?
            .iter()
            .enumerate()
            .map(|(k, d)| as_index(d, &format!("{}[{k}]", o.at("demands"))))
            .collect::<Result<BTreeSet<u32>, _>>()?;
        sinks.push(Sink {
            at: o.str("at")?.into(),
            demands,
        });
    }
    Ok(Network {
        nodes,
        edges,
        sources,
        sinks,
    })
}

/// Reads and validates a network.
pub fn parse_network(text: &str) -> Result<Network, FormatError> {
    let net = parse_network_unchecked(text)?;
    let violations = net.validate();
    if violations.is_empty() {
        Ok(net)
    } else {
        Err(FormatError::Invalid(violations))
    }
}

pub fn network_to_json(net: &Network) -> Value {
    json!({
        "nodes": net.nodes,
        "edges": net.edges.iter().map(|e| json!({
            "id": e.id, "tail": e.tail, "head": e.head, "cap": e.capacity.to_string(),
        })).collect::<Vec<_>>(),
        "sources": net.sources.iter().map(|s| json!({"index": s.index, "at": s.at})).collect::<Vec<_>>(),
        "sinks": net.sinks.iter().map(|t| json!({"at": t.at, "demands": t.demands})).collect::<Vec<_>>(),
    })
}

fn names(vars: &[Var]) -> Vec<String> {
    vars.iter().map(ToString::to_string).collect()
}

fn names_at(g: &Fdg, idx: &[usize]) -> Vec<String> {
    idx.iter().map(|&i| g.var(i).to_string()).collect()
}

pub fn fdg_to_json(g: &Fdg) -> Value {
    let parents: BTreeMap<String, Vec<String>> =
        (0..g.order()).map(|i| (g.var(i).to_string(), names_at(g, g.parents(i)))).collect();
    let capacities: BTreeMap<String, String> = (0..g.order())
        .filter_map(|i| g.capacity(i).map(|c| (g.var(i).to_string(), c.to_string())))
        .collect();
    json!({
        "vars": names(g.vars()),
        "parents": parents,
        "capacities": capacities,
        "decoders": g.decoders().iter().map(|d| json!({"sink": d.sink, "demands": d.demands})).collect::<Vec<_>>(),
    })
}

fn as_var(v: &Value, path: &str) -> Result<Var, FormatError> {
    as_str(v, path)?.parse().map_err(|e| schema(path, format!("{e}")))
}

fn var_list(v: &Value, path: &str) -> Result<Vec<Var>, FormatError> {
    v.as_array()
        .ok_or_else(|| schema(path, "expected an array"))?
        .iter()
        .enumerate()
        .map(|(i, x)| as_var(x, &format!("{path}[{i}]")))
        .collect()
}

pub fn parse_fdg(text: &str) -> Result<Fdg, FormatError> {
    let doc: Value = serde_json::from_str(text)?;
    let top = Obj::new(&doc, "$", &["vars", "parents", "capacities", "decoders"])?;
    let vars = var_list(top.get("vars")?, "$.vars")?;
    let mut parents = BTreeMap::new();
    let pmap = top.get("parents")?.as_object().ok_or_else(|| schema("$.parents", "expected an object"))?;
    for (k, v) in pmap {
        let path = format!("$.parents.{k}");
        let var = k.parse::<Var>().map_err(|e| schema(&path, format!("{e}")))?;
        parents.insert(var, var_list(v, &path)?);
    }
    let mut capacities = BTreeMap::new();
    let cmap = top.get("capacities")?.as_object().ok_or_else(|| schema("$.capacities", "expected an object"))?;
    for (k, v) in cmap {
        let path = format!("$.capacities.{k}");
        let var = k.parse::<Var>().map_err(|e| schema(&path, format!("{e}")))?;
        capacities.insert(var, as_rational(v, &path)?);
    }
    let mut decoders = Vec::new();
    for (i, d) in top.array("decoders")?.iter().enumerate() {
        let o = Obj::new(d, format!("$.decoders[{i}]"), &["sink", "demands"])?;
        let demands = o
            .array("demands")?
            .iter()
            .enumerate()
            .map(|(k, x)| as_index(x, &format!("{}[{k}]", o.at("demands"))))
            .collect::<Result<_, _>>()?;
        decoders.push(Decoder {
            sink: o.str("sink")?.into(),
            demands,
        });
    }
    Ok(Fdg::from_parts(vars, capacities, parents, decoders)?)
}

fn pair(a: &Var, b: &Var) -> Value {
    json!([a.to_string(), b.to_string()])
}

pub fn step_to_json(n: usize, s: &Step) -> Value {
    json!({
        "step": n,
        "rule": s.rule.to_string(),
        "removed": names(&s.removed),
        "up": names(&s.up),
        "down": names(&s.down),
        "added": s.added.iter().map(|(a, b)| pair(a, b)).collect::<Vec<_>>(),
    })
}

/// One compact JSON object per line.
pub fn trace_to_jsonl(t: &ReductionTrace) -> String {
    let mut out = String::new();
    for (i, s) in t.steps.iter().enumerate() {
        out.push_str(&step_to_json(i + 1, s).to_string());
        out.push('\n');
    }
    out
}

pub fn parse_step(line: &str, lineno: usize) -> Result<Step, FormatError> {
    let doc: Value = serde_json::from_str(line)?;
    let top = Obj::new(&doc, format!("line {lineno}"), &["step", "rule", "removed", "up", "down", "added"])?;
    let rule: Rule = top.str("rule")?.parse().map_err(|e| schema(&top.at("rule"), format!("{e}")))?;
    let mut added = Vec::new();
    for (i, p) in top.array("added")?.iter().enumerate() {
        let path = format!("{}[{i}]", top.at("added"));
        match var_list(p, &path)?.as_slice() {
            [a, b] => added.push((a.clone(), b.clone())),
            _ => return Err(schema(&path, "expected a pair")),
        }
    }
    Ok(Step {
        rule,
        removed: var_list(top.get("removed")?, &top.at("removed"))?,
        up: var_list(top.get("up")?, &top.at("up"))?,
        down: var_list(top.get("down")?, &top.at("down"))?,
        added,
    })
}

/// Steps of a JSON-lines trace; blank lines are skipped.
pub fn parse_trace(text: &str) -> Result<Vec<Step>, FormatError> {
    text.lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty())
        .map(|(i, l)| parse_step(l, i + 1))
        .collect()
}

/// Row labels (`Y<s>`) and column labels (slots) of the transfer matrix.
pub fn matrix_labels(ts: &TransferSystem) -> (Vec<String>, Vec<String>) {
    (
        ts.sources().iter().map(|s| format!("Y{s}")).collect(),
        ts.slots().iter().map(ToString::to_string).collect(),
    )
}

pub fn matrix_to_json(ts: &TransferSystem, m: &PolyMatrix) -> Value {
    let (rows, cols) = matrix_labels(ts);
    let name = |x| ts.name(x);
    let entries: Vec<Vec<String>> =
        (0..m.rows()).map(|i| (0..m.cols()).map(|j| m.get(i, j).render(name)).collect()).collect();
    let demand: Vec<Vec<u8>> = ts.demand().iter().map(|r| r.iter().map(|&b| b as u8).collect()).collect();
    json!({
        "rows": rows,
        "cols": cols,
        "indeterminates": (0..ts.indet_count() as u32).map(name).collect::<Vec<_>>(),
        "entries": entries,
        "demand": demand,
    })
}

/// One `M[row, col] = entry` line per nonzero entry, row-major.
pub fn matrix_to_text(ts: &TransferSystem, m: &PolyMatrix) -> String {
    let (rows, cols) = matrix_labels(ts);
    let mut out = format!("M: {} x {}, {} indeterminates\n", m.rows(), m.cols(), ts.indet_count());
    for (i, r) in rows.iter().enumerate() {
        for (j, c) in cols.iter().enumerate() {
            let e = m.get(i, j);
            if !e.is_zero() {
                out.push_str(&format!("M[{r}, {c}] = {}\n", e.render(|x| ts.name(x))));
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    #[test]
    fn comments_allowed_unknown_keys_rejected() {
        let ok = r#"{"_note":"x","nodes":["s","t"],"edges":[{"id":"e","tail":"s","head":"t","cap":"1/2","_c":1}],
                    "sources":[{"index":1,"at":"s"}],"sinks":[{"at":"t","demands":[1]}]}"#;
        let net = parse_network(ok).unwrap();
        assert_eq!(net.edges[0].capacity, Rational::new(1, 2));
        let bad = ok.replace("\"_note\"", "\"note\"");
        assert!(matches!(parse_network(&bad), Err(FormatError::Schema { .. })));
    }

    #[test]
    fn capacities_must_be_strings() {
        let text = r#"{"nodes":["s","t"],"edges":[{"id":"e","tail":"s","head":"t","cap":1}],
                      "sources":[{"index":1,"at":"s"}],"sinks":[{"at":"t","demands":[1]}]}"#;
        let err = parse_network(text).unwrap_err().to_string();
        assert!(err.contains("$.edges[0].cap"), "{err}");
    }

    #[test]
    fn errors_by_kind() {
        assert!(matches!(parse_network("{"), Err(FormatError::Syntax(_))));
        assert!(matches!(parse_network(r#"{"nodes":[]}"#), Err(FormatError::Schema { .. })));
        let cyclic = parse_network(fixtures::get("cyclic").unwrap()).unwrap_err();
        assert!(cyclic.to_string().contains("cycle detected"));
        // one node that is both source and sink, no edges
        let degenerate = r#"{"nodes":["a"],"edges":[],"sources":[{"index":1,"at":"a"}],"sinks":[{"at":"a","demands":[1]}]}"#;
        assert!(matches!(parse_network(degenerate), Err(FormatError::Invalid(_))));
    }

    #[test]
    fn fdg_round_trip() {
        for name in fixtures::VALID {
            let net = parse_network(fixtures::get(name).unwrap()).unwrap();
            let g = fdg_core::build_fdg(&net).unwrap().fdg;
            let text = fdg_to_json(&g).to_string();
            assert_eq!(parse_fdg(&text).unwrap(), g);
        }
    }

    #[test]
    fn trace_round_trip() {
        let net = parse_network(fixtures::get("butterfly").unwrap()).unwrap();
        let g = fdg_core::build_fdg(&net).unwrap().fdg;
        let (_, trace) = g.reduce(fdg_core::Mode::Linear).unwrap();
        let steps = parse_trace(&trace_to_jsonl(&trace)).unwrap();
        assert_eq!(steps, trace.steps);
    }
}
