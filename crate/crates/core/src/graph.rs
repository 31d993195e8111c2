//! Source graphs: the bipartite graph of a joint source, its projections onto
//! either side as edge-weighted characteristic graphs, and OR power graphs.

use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::prob::{JointPmf, Pmf};

/// Bivariate function given as a total table over the product alphabet.
///
/// Outputs are opaque strings; only equality between outputs matters.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FunctionTable {
    outputs: Vec<Vec<String>>,
}

impl FunctionTable {
    pub fn new(outputs: Vec<Vec<String>>) -> Result<Self> {
        let cols = outputs.first().map_or(0, Vec::len);
        if outputs.is_empty() || cols == 0 {
            return Err(Error::Config("function table is empty".into()));
        }
        if let Some(i) = outputs.iter().position(|r| r.len() != cols) {
            return Err(Error::Config(format!(
                "function table row {i} has {} entries, expected {cols}",
                outputs[i].len()
            )));
        }
        Ok(FunctionTable { outputs })
    }

    /// Tabulates `f` over index pairs.
    pub fn from_fn(rows: usize, cols: usize, f: impl Fn(usize, usize) -> String) -> Result<Self> {
        FunctionTable::new(
            (0..rows)
                .map(|i| (0..cols).map(|j| f(i, j)).collect())
                .collect(),
        )
    }

    pub fn rows(&self) -> usize {
        self.outputs.len()
    }

    pub fn cols(&self) -> usize {
        self.outputs[0].len()
    }

    #[inline]
    pub fn eval(&self, i: usize, j: usize) -> &str {
        &self.outputs[i][j]
    }

    pub fn outputs(&self) -> &[Vec<String>] {
        &self.outputs
    }

    pub fn is_constant(&self) -> bool {
        let first = &self.outputs[0][0];
        self.outputs.iter().flatten().all(|o| o == first)
    }

    /// Swaps the argument order: `g(x2, x1) = f(x1, x2)`.
    pub fn transpose(&self) -> FunctionTable {
        FunctionTable {
            outputs: (0..self.cols())
                .map(|j| {
                    (0..self.rows())
                        .map(|i| self.outputs[i][j].clone())
                        .collect()
                })
                .collect(),
        }
    }

    /// Blockwise function on n-tuples (mixed radix, first coordinate most
    /// significant), whose output is the tuple of per-coordinate outputs.
    pub fn power(&self, n: usize) -> FunctionTable {
        let (r, c) = (self.rows(), self.cols());
        let rn = r.pow(n as u32);
        let cn = c.pow(n as u32);
        let outputs = (0..rn)
            .map(|i| {
                let xi = digits(i, r, n);
                (0..cn)
                    .map(|j| {
                        let xj = digits(j, c, n);
                        let parts: Vec<&str> =
                            xi.iter().zip(&xj).map(|(&a, &b)| self.eval(a, b)).collect();
                        if n == 1 {
                            parts[0].to_string()
                        } else {
                            format!("({})", parts.join(","))
                        }
                    })
                    .collect()
            })
            .collect();
        FunctionTable { outputs }
    }

    pub(crate) fn check_shape(&self, j: &JointPmf) -> Result<()> {
        if self.rows() != j.rows() || self.cols() != j.cols() {
            return Err(Error::Config(format!(
                "function table is {}x{} but the joint pmf is {}x{}",
                self.rows(),
                self.cols(),
                j.rows(),
                j.cols()
            )));
        }
        Ok(())
    }
}

/// Mixed-radix digits of `idx` in base `radix`, most significant first.
pub fn digits(mut idx: usize, radix: usize, n: usize) -> Vec<usize> {
    let mut out = vec![0; n];
    for k in (0..n).rev() {
        out[k] = idx % radix;
        idx /= radix;
    }
    out
}

/// Inverse of [`digits`].
pub fn undigits(d: &[usize], radix: usize) -> usize {
    d.iter().fold(0, |acc, &x| acc * radix + x)
}

/// Label of an n-tuple of symbols: the symbol itself for n = 1, `(a,b,..)` otherwise.
pub fn tuple_label(alphabet: &[String], d: &[usize]) -> String {
    if d.len() == 1 {
        alphabet[d[0]].clone()
    } else {
        let parts: Vec<&str> = d.iter().map(|&i| alphabet[i].as_str()).collect();
        format!("({})", parts.join(","))
    }
}

/// i.i.d. extension of a joint PMF to n-blocks on both sides.
pub fn joint_power(j: &JointPmf, n: usize) -> Result<JointPmf> {
    if n == 0 {
        return Err(Error::Config("block length must be at least 1".into()));
    }
    if n == 1 {
        return Ok(j.clone());
    }
    let (r, c) = (j.rows(), j.cols());
    let rn = r.pow(n as u32);
    let cn = c.pow(n as u32);
    let rows: Vec<String> = (0..rn)
        .map(|i| tuple_label(j.row_alphabet(), &digits(i, r, n)))
        .collect();
    let cols: Vec<String> = (0..cn)
        .map(|k| tuple_label(j.col_alphabet(), &digits(k, c, n)))
        .collect();
    let matrix = (0..rn)
        .map(|i| {
            let xi = digits(i, r, n);
            (0..cn)
                .map(|k| {
                    let xk = digits(k, c, n);
                    xi.iter().zip(&xk).map(|(&a, &b)| j.p(a, b)).product()
                })
                .collect()
        })
        .collect();
    JointPmf::new(rows, cols, matrix)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    First,
    Second,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Rule {
    /// Probability mass of the distinguishing common neighbors.
    #[default]
    Exact,
    /// Number of distinguishing common neighbors.
    Counting,
}

impl std::str::FromStr for Rule {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "exact" => Ok(Rule::Exact),
            "counting" => Ok(Rule::Counting),
            other => Err(Error::Config(format!("unknown weighting rule {other:?}"))),
        }
    }
}

/// Bipartite graph of a joint source together with the function being computed.
#[derive(Debug, Clone)]
pub struct BipartiteGraph {
    joint: JointPmf,
    function: FunctionTable,
    edges: Vec<(usize, usize, f64)>,
}

pub fn build_bipartite(j: &JointPmf, f: &FunctionTable) -> Result<BipartiteGraph> {
    f.check_shape(j)?;
    let mut edges = Vec::new();
    for u in 0..j.rows() {
        for v in 0..j.cols() {
            let p = j.p(u, v);
            if p > 0.0 {
                edges.push((u, v, p));
            }
        }
    }
    Ok(BipartiteGraph {
        joint: j.clone(),
        function: f.clone(),
        edges,
    })
}

impl BipartiteGraph {
    pub fn left(&self) -> &[String] {
        self.joint.row_alphabet()
    }

    pub fn right(&self) -> &[String] {
        self.joint.col_alphabet()
    }

    pub fn edges(&self) -> &[(usize, usize, f64)] {
        &self.edges
    }

    pub fn joint(&self) -> &JointPmf {
        &self.joint
    }

    pub fn function(&self) -> &FunctionTable {
        &self.function
    }

    /// The same graph seen from the other side.
    pub fn flipped(&self) -> BipartiteGraph {
        BipartiteGraph {
            joint: self.joint.transpose(),
            function: self.function.transpose(),
            edges: self.edges.iter().map(|&(u, v, p)| (v, u, p)).collect(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EdgeWeight {
    pub raw: f64,
    pub normalized: f64,
}

/// Edge-weighted characteristic graph.
///
/// Vertices are indexed `0..len()`. For power graphs the index of an n-tuple is
/// its mixed-radix encoding over the base alphabet.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Ewcg {
    labels: Vec<String>,
    marginal: Pmf,
    edges: BTreeMap<(usize, usize), EdgeWeight>,
    power: usize,
    side: Side,
}

impl Ewcg {
    /// Builds a graph from raw weights; nonpositive weights are dropped and the
    /// rest are normalized by the maximum.
    pub fn from_raw(
        labels: Vec<String>,
        marginal: Pmf,
        raw: impl IntoIterator<Item = ((usize, usize), f64)>,
        power: usize,
        side: Side,
    ) -> Result<Self> {
        if labels.len() != marginal.len() {
            return Err(Error::Structural(format!(
                "{} labels but {} probabilities",
                labels.len(),
                marginal.len()
            )));
        }
        let nv = labels.len();
        let mut map: BTreeMap<(usize, usize), f64> = BTreeMap::new();
        for ((u, v), w) in raw {
            if u >= nv || v >= nv {
                return Err(Error::Structural(format!("edge ({u},{v}) out of range")));
            }
            if u == v {
                return Err(Error::Structural(format!("self loop at {u}")));
            }
            if !w.is_finite() || w < 0.0 {
                return Err(Error::Structural(format!("edge ({u},{v}) has weight {w}")));
            }
            if w > 0.0 {
                let key = (u.min(v), u.max(v));
                if let Some(prev) = map.insert(key, w) {
                    if (prev - w).abs() > 1e-12 {
                        return Err(Error::Structural(format!(
                            "edge ({u},{v}) given twice with different weights"
                        )));
                    }
                }
            }
        }
        let max = map.values().copied().fold(0.0, f64::max);
        let edges = map
            .into_iter()
            .map(|(k, raw)| {
                let normalized = if max > 0.0 { raw / max } else { 0.0 };
                (k, EdgeWeight { raw, normalized })
            })
            .collect();
        Ok(Ewcg {
            labels,
            marginal,
            edges,
            power,
            side,
        })
    }

    /// Unit-weight graph from an edge list, with a uniform marginal.
    pub fn unweighted(nv: usize, edges: &[(usize, usize)]) -> Result<Self> {
        Ewcg::from_raw(
            (0..nv).map(|i| i.to_string()).collect(),
            Pmf::uniform(nv)?,
            edges.iter().map(|&e| (e, 1.0)),
            1,
            Side::First,
        )
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn marginal(&self) -> &Pmf {
        &self.marginal
    }

    pub fn power(&self) -> usize {
        self.power
    }

    pub fn side(&self) -> Side {
        self.side
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> impl Iterator<Item = ((usize, usize), EdgeWeight)> + '_ {
        self.edges.iter().map(|(&k, &w)| (k, w))
    }

    pub fn weight(&self, u: usize, v: usize) -> Option<EdgeWeight> {
        self.edges.get(&(u.min(v), u.max(v))).copied()
    }

    pub fn index_of(&self, label: &str) -> Option<usize> {
        self.labels.iter().position(|l| l == label)
    }

    pub fn max_raw_weight(&self) -> f64 {
        self.edges.values().map(|w| w.raw).fold(0.0, f64::max)
    }

    /// Same vertices and edge set with every weight set to 1.
    pub fn as_unweighted(&self) -> Ewcg {
        Ewcg {
            labels: self.labels.clone(),
            marginal: self.marginal.clone(),
            edges: self
                .edges
                .keys()
                .map(|&k| {
                    (
                        k,
                        EdgeWeight {
                            raw: 1.0,
                            normalized: 1.0,
                        },
                    )
                })
                .collect(),
            power: self.power,
            side: self.side,
        }
    }

    /// Replaces the vertex marginal, keeping the edges.
    pub fn with_marginal(&self, marginal: Pmf) -> Result<Ewcg> {
        if marginal.len() != self.len() {
            return Err(Error::Structural(format!(
                "marginal has {} entries for {} vertices",
                marginal.len(),
                self.len()
            )));
        }
        let mut g = self.clone();
        g.marginal = marginal;
        Ok(g)
    }

    /// Subgraph on the same vertices keeping edges that satisfy `keep`.
    pub fn filter_edges(&self, keep: impl Fn(EdgeWeight) -> bool) -> Ewcg {
        let mut g = self.clone();
        g.edges.retain(|_, w| keep(*w));
        g
    }

    /// Adjacency lists.
    pub fn neighbors(&self) -> Vec<Vec<usize>> {
        let mut adj = vec![Vec::new(); self.len()];
        for &(u, v) in self.edges.keys() {
            adj[u].push(v);
            adj[v].push(u);
        }
        adj
    }

    /// Adjacency as one bitmask per vertex. Only valid for at most 64 vertices.
    pub(crate) fn adjacency_masks(&self) -> Option<Vec<u64>> {
        if self.len() > 64 {
            return None;
        }
        let mut m = vec![0u64; self.len()];
        for &(u, v) in self.edges.keys() {
            m[u] |= 1 << v;
            m[v] |= 1 << u;
        }
        Some(m)
    }
}

/// Symbols of the opposite side that are jointly possible with both `u` and
/// `u2` and on which the function disagrees.
fn distinguishing(j: &JointPmf, f: &FunctionTable, u: usize, u2: usize) -> Vec<usize> {
    (0..j.cols())
        .filter(|&v| j.p(u, v) > 0.0 && j.p(u2, v) > 0.0 && f.eval(u, v) != f.eval(u2, v))
        .collect()
}

/// Projects the bipartite graph onto one side.
pub fn project_ewcg(g: &BipartiteGraph, side: Side, rule: Rule) -> Result<Ewcg> {
    let view = match side {
        Side::First => g.clone(),
        Side::Second => g.flipped(),
    };
    let j = &view.joint;
    let f = &view.function;
    let mut raw = Vec::new();
    for u in 0..j.rows() {
        for u2 in u + 1..j.rows() {
            let dist = distinguishing(j, f, u, u2);
            let w = match rule {
                Rule::Exact => dist.iter().map(|&v| j.p(u, v) + j.p(u2, v)).sum(),
                Rule::Counting => dist.len() as f64,
            };
            if w > 0.0 {
                raw.push(((u, u2), w));
            }
        }
    }
    Ewcg::from_raw(j.row_alphabet().to_vec(), j.row_marginal(), raw, 1, side)
}

/// Default cap on the number of vertices of a power graph.
pub const DEFAULT_POWER_VERTEX_BUDGET: usize = 4096;

/// n-th OR power of a characteristic graph.
///
/// Two tuples are adjacent when some coordinate pair is distinguishable. The
/// raw weight sums `P(u^n, v^n) + P(u'^n, v^n)` over every `v^n` that has at
/// least one distinguishing coordinate; for n = 1 this is the single-letter
/// weight. Under the counting rule the number of such `v^n` among tuples whose
/// coordinates neighbor `u_k` or `u'_k` is used instead.
pub fn power_graph(
    g: &Ewcg,
    n: usize,
    j: &JointPmf,
    f: &FunctionTable,
    rule: Rule,
    vertex_budget: usize,
) -> Result<Ewcg> {
    if n == 0 {
        return Err(Error::Config("power must be at least 1".into()));
    }
    f.check_shape(j)?;
    let (j, f) = match g.side {
        Side::First => (j.clone(), f.clone()),
        Side::Second => (j.transpose(), f.transpose()),
    };
    if j.row_alphabet() != g.labels() {
        return Err(Error::Structural(
            "graph vertices do not match the joint pmf alphabet".into(),
        ));
    }
    if n == 1 {
        return Ok(g.clone());
    }
    let q = j.rows();
    let nv = q
        .checked_pow(n as u32)
        .filter(|&nv| nv <= vertex_budget)
        .ok_or_else(|| {
            Error::capacity(
                "power graph vertices",
                q.saturating_pow(n as u32),
                vertex_budget,
            )
        })?;

    let p1 = j.row_marginal();
    // per base pair: (mass of u on distinguishing symbols, mass of u' on them,
    // neighbor-union size, its size after removing distinguishing symbols)
    let mut pair = vec![vec![(0.0, 0.0, 0usize, 0usize); q]; q];
    let mut adjacent = vec![vec![false; q]; q];
    for a in 0..q {
        for b in 0..q {
            let dist = if a == b {
                Vec::new()
            } else {
                distinguishing(&j, &f, a, b)
            };
            adjacent[a][b] = !dist.is_empty();
            let da = dist.iter().map(|&v| j.p(a, v)).sum();
            let db = dist.iter().map(|&v| j.p(b, v)).sum();
            let union = (0..j.cols())
                .filter(|&v| j.p(a, v) > 0.0 || j.p(b, v) > 0.0)
                .count();
            pair[a][b] = (da, db, union, union - dist.len());
        }
    }

    let tuples: Vec<Vec<usize>> = (0..nv).map(|i| digits(i, q, n)).collect();
    let raw: Vec<((usize, usize), f64)> = (0..nv)
        .into_par_iter()
        .flat_map_iter(|x| {
            let tuples = &tuples;
            let (pair, adjacent, p1) = (&pair, &adjacent, &p1);
            (x + 1..nv).filter_map(move |y| {
                let (tx, ty) = (&tuples[x], &tuples[y]);
                if !tx.iter().zip(ty).any(|(&a, &b)| adjacent[a][b]) {
                    return None;
                }
                let w = match rule {
                    Rule::Exact => {
                        let mut px = 1.0;
                        let mut py = 1.0;
                        let mut rx = 1.0;
                        let mut ry = 1.0;
                        for (&a, &b) in tx.iter().zip(ty) {
                            let (da, db, _, _) = pair[a][b];
                            px *= p1.probs()[a];
                            py *= p1.probs()[b];
                            rx *= (p1.probs()[a] - da).max(0.0);
                            ry *= (p1.probs()[b] - db).max(0.0);
                        }
                        (px - rx) + (py - ry)
                    }
                    Rule::Counting => {
                        let mut all = 1.0;
                        let mut rest = 1.0;
                        for (&a, &b) in tx.iter().zip(ty) {
                            let (_, _, union, remain) = pair[a][b];
                            all *= union as f64;
                            rest *= remain as f64;
                        }
                        all - rest
                    }
                };
                Some(((x, y), w))
            })
        })
        .collect();

    let labels = tuples.iter().map(|t| tuple_label(g.labels(), t)).collect();
    Ewcg::from_raw(labels, p1.power(n)?, raw, n, g.side)
}
