//! Traditional and b-fold colorings of edge-weighted characteristic graphs.
//!
//! An edge of normalized weight `w` forces the color sets of its endpoints to
//! differ in at least `⌈w·b⌉` colors. With unit weights this is the usual
//! disjointness rule of an a:b coloring.

mod lp;
mod search;

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::Ewcg;

pub use lp::{
    fractional_chromatic_number, fractional_cover, maximal_independent_sets, ratio_parts,
    FractionalCover,
};
pub use search::{
    b_fold_chromatic_number, min_entropy_coloring, search_folded_coloring, FoldedSearch,
    SearchOptions, TraditionalColoring,
};

/// Slack used when rounding `w·b` up so exact multiples of `1/b` stay put.
pub const CEIL_NUDGE: f64 = 1e-9;

/// Number of colors two adjacent vertices must not share at fold `b`.
#[inline]
pub fn required_disjoint(w_norm: f64, b: usize) -> usize {
    if w_norm <= 0.0 {
        return 0;
    }
    ((w_norm * b as f64 - CEIL_NUDGE).ceil().max(0.0) as usize).min(b)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Exact,
    Heuristic,
    /// Exact within budget, heuristic beyond it.
    #[default]
    Auto,
}

impl std::str::FromStr for Mode {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "exact" => Ok(Mode::Exact),
            "heuristic" => Ok(Mode::Heuristic),
            "auto" => Ok(Mode::Auto),
            other => Err(Error::Config(format!("unknown search mode {other:?}"))),
        }
    }
}

/// Size limits for the exhaustive parts of the toolkit.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default)]
pub struct Budgets {
    /// Largest graph for exact minimum-entropy (b = 1) coloring.
    pub min_entropy_vertices: usize,
    /// Largest graph for exact folded search.
    pub folded_vertices: usize,
    /// Largest palette for exact folded search.
    pub folded_palette: usize,
    /// Cap on enumerated maximal independent sets.
    pub independent_sets: usize,
    /// Cap on power-graph vertices.
    pub power_vertices: usize,
    /// Heuristic restarts.
    pub restarts: usize,
    /// Annealing moves per vertex per restart.
    pub anneal_moves_per_vertex: usize,
    /// Cap on candidate pairs examined by the binning decoder per block.
    pub decoder_candidates: usize,
}

impl Default for Budgets {
    fn default() -> Self {
        Budgets {
            min_entropy_vertices: 12,
            folded_vertices: 8,
            folded_palette: 8,
            independent_sets: 100_000,
            power_vertices: crate::graph::DEFAULT_POWER_VERTEX_BUDGET,
            restarts: 32,
            anneal_moves_per_vertex: 4000,
            decoder_candidates: 1 << 20,
        }
    }
}

/// The b replica weights of every edge.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReplicaTuple {
    b: usize,
    weights: BTreeMap<(usize, usize), Vec<f64>>,
}

impl ReplicaTuple {
    pub fn b(&self) -> usize {
        self.b
    }

    /// Replica weights `(w_1, .., w_b)` of an edge, if it is one.
    pub fn weights(&self, u: usize, v: usize) -> Option<&[f64]> {
        self.weights.get(&(u.min(v), u.max(v))).map(Vec::as_slice)
    }

    pub fn iter(&self) -> impl Iterator<Item = ((usize, usize), &[f64])> + '_ {
        self.weights.iter().map(|(&k, w)| (k, w.as_slice()))
    }

    /// Edges carrying positive weight in replica `i` (0-based).
    pub fn replica_edges(&self, i: usize) -> Vec<(usize, usize)> {
        self.weights
            .iter()
            .filter(|(_, w)| w.get(i).is_some_and(|&x| x > 0.0))
            .map(|(&k, _)| k)
            .collect()
    }
}

/// Splits each normalized edge weight across `b` replicas, filling replicas in
/// order: `w_i = min{1, max{b·w − Σ_{i'<i} w_{i'}, 0}}`.
pub fn split_replicas(g: &Ewcg, b: usize) -> Result<ReplicaTuple> {
    if b == 0 {
        return Err(Error::Config("fold b must be at least 1".into()));
    }
    let mut weights = BTreeMap::new();
    for (k, w) in g.edges() {
        if !(w.normalized > 0.0 && w.normalized <= 1.0 + 1e-12) {
            return Err(Error::Precondition(format!(
                "edge {k:?} has normalized weight {}; the graph is not normalized",
                w.normalized
            )));
        }
        let total = w.normalized * b as f64;
        let mut assigned = 0.0;
        let mut ws = Vec::with_capacity(b);
        for _ in 0..b {
            let mut wi = (total - assigned).clamp(0.0, 1.0);
            if wi < CEIL_NUDGE {
                wi = 0.0;
            }
            assigned += wi;
            ws.push(wi);
        }
        weights.insert(k, ws);
    }
    Ok(ReplicaTuple { b, weights })
}

/// Per-vertex b-tuples of colors drawn from a palette of `a` colors.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct FoldedColoring {
    a: usize,
    b: usize,
    slots: Vec<Vec<usize>>,
}

impl FoldedColoring {
    pub fn new(a: usize, b: usize, slots: Vec<Vec<usize>>) -> Result<Self> {
        if b == 0 || a < b {
            return Err(Error::Config(format!("need a >= b >= 1, got {a}:{b}")));
        }
        for (v, s) in slots.iter().enumerate() {
            if s.len() != b {
                return Err(Error::Structural(format!(
                    "vertex {v} has {} color slots, expected {b}",
                    s.len()
                )));
            }
            if let Some(&c) = s.iter().find(|&&c| c >= a) {
                return Err(Error::Structural(format!(
                    "vertex {v} uses color {c} outside the palette of {a}"
                )));
            }
        }
        Ok(FoldedColoring { a, b, slots })
    }

    /// A b = 1 coloring from one color per vertex; the palette is the number of colors used.
    pub fn traditional(colors: &[usize]) -> Result<Self> {
        let a = colors.iter().max().map_or(1, |&m| m + 1);
        FoldedColoring::new(a, 1, colors.iter().map(|&c| vec![c]).collect())
    }

    pub(crate) fn from_masks(a: usize, b: usize, masks: &[u64]) -> Self {
        let slots = masks
            .iter()
            .map(|&m| (0..a).filter(|&c| m >> c & 1 == 1).collect())
            .collect();
        FoldedColoring { a, b, slots }
    }

    pub fn a(&self) -> usize {
        self.a
    }

    pub fn b(&self) -> usize {
        self.b
    }

    pub fn len(&self) -> usize {
        self.slots.len()
    }

    pub fn is_empty(&self) -> bool {
        self.slots.is_empty()
    }

    /// Ordered b-tuple of vertex `v`, one color per replica.
    pub fn slots(&self, v: usize) -> &[usize] {
        &self.slots[v]
    }

    pub fn all_slots(&self) -> &[Vec<usize>] {
        &self.slots
    }

    /// Sorted distinct colors of vertex `v`.
    pub fn color_set(&self, v: usize) -> Vec<usize> {
        let mut s = self.slots[v].clone();
        s.sort_unstable();
        s.dedup();
        s
    }

    /// Number of distinct colors appearing anywhere.
    pub fn colors_used(&self) -> usize {
        let mut used = vec![false; self.a];
        for c in self.slots.iter().flatten() {
            used[*c] = true;
        }
        used.into_iter().filter(|&u| u).count()
    }

    /// Same coloring on a larger palette.
    pub fn with_palette(&self, a: usize) -> Result<Self> {
        FoldedColoring::new(a, self.b, self.slots.clone())
    }

    /// Repeats a traditional coloring on `b` disjoint copies of its palette.
    pub fn replicate(traditional: &[usize], k: usize, b: usize) -> Result<Self> {
        FoldedColoring::new(
            k * b,
            b,
            traditional
                .iter()
                .map(|&c| (0..b).map(|i| c + i * k).collect())
                .collect(),
        )
    }
}

/// Combines per-replica colorings; replica `i` uses colors offset past all
/// earlier replicas' palettes.
pub fn compose_replicas(colorings: &[Vec<usize>]) -> Result<FoldedColoring> {
    let b = colorings.len();
    let nv = colorings.first().map_or(0, Vec::len);
    if b == 0 || colorings.iter().any(|c| c.len() != nv) {
        return Err(Error::Structural(
            "replica colorings disagree in size".into(),
        ));
    }
    let mut offsets = Vec::with_capacity(b);
    let mut a = 0;
    for c in colorings {
        offsets.push(a);
        a += c.iter().max().map_or(1, |&m| m + 1);
    }
    let slots = (0..nv)
        .map(|v| (0..b).map(|i| colorings[i][v] + offsets[i]).collect())
        .collect();
    FoldedColoring::new(a.max(b), b, slots)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Violation {
    pub u: usize,
    pub v: usize,
    pub required: usize,
    pub disjoint: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct ValidityReport {
    pub violations: Vec<Violation>,
}

impl ValidityReport {
    pub fn is_ok(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Checks every edge against the disjoint-color requirement.
pub fn validate_folded(c: &FoldedColoring, g: &Ewcg) -> Result<ValidityReport> {
    if c.len() != g.len() {
        return Err(Error::Structural(format!(
            "coloring covers {} vertices, graph has {}",
            c.len(),
            g.len()
        )));
    }
    // re-check slots in case the coloring was deserialized
    FoldedColoring::new(c.a, c.b, c.slots.clone())?;
    let mut violations = Vec::new();
    for ((u, v), w) in g.edges() {
        let required = required_disjoint(w.normalized, c.b);
        let (su, sv) = (c.color_set(u), c.color_set(v));
        let only_u = su.iter().filter(|x| !sv.contains(x)).count();
        let only_v = sv.iter().filter(|x| !su.contains(x)).count();
        let disjoint = only_u.min(only_v);
        if disjoint < required {
            violations.push(Violation {
                u,
                v,
                required,
                disjoint,
            });
        }
    }
    Ok(ValidityReport { violations })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    fn example_graph() -> Ewcg {
        fixtures::example1_graph(crate::graph::Side::First)
    }

    fn idx(g: &Ewcg, s: &str) -> usize {
        g.index_of(s).unwrap()
    }

    #[test]
    fn ceil_nudge() {
        assert_eq!(required_disjoint(0.5, 2), 1);
        assert_eq!(required_disjoint(0.25, 2), 1);
        assert_eq!(required_disjoint(1.0, 3), 3);
        assert_eq!(required_disjoint(0.0, 3), 0);
        assert_eq!(required_disjoint(1.0 / 3.0, 3), 1);
        assert_eq!(required_disjoint(0.3125, 2), 1);
    }

    #[test]
    fn example_replica_split() {
        let g = example_graph();
        let r = split_replicas(&g, 2).unwrap();
        let cases = [
            ("-2", "-1", [1.0, 0.25]),
            ("-2", "0", [1.0, 0.875]),
            ("0", "1", [1.0, 1.0]),
            ("1", "2", [0.5, 0.0]),
            ("-1", "2", [0.625, 0.0]),
        ];
        for (a, b, want) in cases {
            let got = r.weights(idx(&g, a), idx(&g, b)).unwrap();
            for (x, y) in got.iter().zip(want) {
                assert!((x - y).abs() < 1e-9, "{a},{b}: {got:?}");
            }
        }
        assert_eq!(r.weights(idx(&g, "-2"), idx(&g, "1")), None);
    }

    #[test]
    fn replica_invariants_hold_for_small_b() {
        let g = example_graph();
        for b in 1..=6 {
            let r = split_replicas(&g, b).unwrap();
            for ((u, v), ws) in r.iter() {
                let w = g.weight(u, v).unwrap().normalized;
                let mean: f64 = ws.iter().sum::<f64>() / b as f64;
                assert!((mean - w).abs() < 1e-9);
                assert!(ws.windows(2).all(|p| p[0] >= p[1]));
                let positive = ws.iter().filter(|&&x| x > 0.0).count();
                assert_eq!(positive, required_disjoint(w, b));
            }
        }
    }

    #[test]
    fn zero_fold_rejected() {
        assert!(matches!(
            split_replicas(&example_graph(), 0),
            Err(Error::Config(_))
        ));
    }

    #[test]
    fn weighted_5_2_coloring_is_valid() {
        let g = example_graph();
        let c = fixtures::weighted_5_2_coloring();
        assert!(validate_folded(&c, &g).unwrap().is_ok());
        assert_eq!(c.color_set(idx(&g, "-1")), vec![1, 4]);
        assert_eq!(c.color_set(idx(&g, "2")), vec![2, 4]);
    }

    #[test]
    fn identical_sets_on_full_edge_are_invalid() {
        let g = Ewcg::unweighted(2, &[(0, 1)]).unwrap();
        let c = FoldedColoring::new(2, 2, vec![vec![0, 1], vec![0, 1]]).unwrap();
        let rep = validate_folded(&c, &g).unwrap();
        assert_eq!(
            rep.violations,
            vec![Violation {
                u: 0,
                v: 1,
                required: 2,
                disjoint: 0
            }]
        );
        let none = Ewcg::unweighted(2, &[]).unwrap();
        assert!(validate_folded(&c, &none).unwrap().is_ok());
    }

    #[test]
    fn palette_violations_are_structural() {
        assert!(matches!(
            FoldedColoring::new(2, 1, vec![vec![3]]),
            Err(Error::Structural(_))
        ));
        let g = Ewcg::unweighted(1, &[]).unwrap();
        let bad: FoldedColoring = serde_json::from_str(r#"{"a":2,"b":1,"slots":[[5]]}"#).unwrap();
        assert!(matches!(
            validate_folded(&bad, &g),
            Err(Error::Structural(_))
        ));
    }

    #[test]
    fn replica_colorings_compose_to_valid_folded() {
        let g = example_graph();
        for b in 1..=4 {
            let r = split_replicas(&g, b).unwrap();
            let per: Vec<Vec<usize>> = (0..b)
                .map(|i| greedy_proper(g.len(), &r.replica_edges(i)))
                .collect();
            let c = compose_replicas(&per).unwrap();
            assert!(validate_folded(&c, &g).unwrap().is_ok(), "b={b}");
        }
    }

    fn greedy_proper(nv: usize, edges: &[(usize, usize)]) -> Vec<usize> {
        let mut col = vec![usize::MAX; nv];
        for v in 0..nv {
            let taken: Vec<usize> = edges
                .iter()
                .filter_map(|&(x, y)| match (x == v, y == v) {
                    (true, _) => Some(col[y]),
                    (_, true) => Some(col[x]),
                    _ => None,
                })
                .collect();
            col[v] = (0..).find(|c| !taken.contains(c)).unwrap();
        }
        col
    }

    #[test]
    fn replicate_is_valid_when_base_is_proper() {
        let g = example_graph();
        let trad = [0, 1, 1, 0, 2];
        let c = FoldedColoring::replicate(&trad, 3, 2).unwrap();
        assert_eq!(c.a(), 6);
        assert!(validate_folded(&c, &g).unwrap().is_ok());
    }
}
