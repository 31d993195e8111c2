//! Bundled five-symbol example source and reference colorings.

use serde::{Deserialize, Serialize};

use crate::coloring::FoldedColoring;
use crate::error::{Error, Result};
use crate::graph::{build_bipartite, project_ewcg, Ewcg, FunctionTable, Rule, Side};
use crate::prob::JointPmf;
use crate::spec::ProblemSpec;

pub const EXAMPLE1_SPEC: &str = include_str!("../fixtures/example1.json");
pub const WEIGHTED_5_2: &str = include_str!("../fixtures/weighted_5_2.json");
pub const WEIGHTED_6_3: &str = include_str!("../fixtures/weighted_6_3.json");
pub const N2_WEIGHTED_13_2: &str = include_str!("../fixtures/n2_weighted_13_2.json");
pub const N2_UNWEIGHTED_13_2: &str = include_str!("../fixtures/n2_unweighted_13_2.json");
pub const N2_UNWEIGHTED_8_1: &str = include_str!("../fixtures/n2_unweighted_8_1.json");

/// File names of the coloring fixtures, in reporting order.
pub const COLORING_FILES: [&str; 5] = [
    "weighted_5_2.json",
    "weighted_6_3.json",
    "n2_unweighted_8_1.json",
    "n2_unweighted_13_2.json",
    "n2_weighted_13_2.json",
];

/// A stored coloring of the example's side-1 graph (or its second power).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ColoringFixture {
    pub name: String,
    pub provenance: String,
    pub n: usize,
    pub a: usize,
    pub b: usize,
    /// Whether validity is judged against edge weights or full disjointness.
    pub weighted: bool,
    pub vertices: Vec<String>,
    pub slots: Vec<Vec<usize>>,
    pub expected_rate: f64,
    pub tolerance: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub expected_color_pmf: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub expected_uniform_rate: Option<f64>,
}

impl ColoringFixture {
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Input(format!("malformed fixture: {e}")))
    }

    pub fn coloring(&self) -> Result<FoldedColoring> {
        if self.slots.len() != self.vertices.len() {
            return Err(Error::Structural(format!(
                "fixture {} lists {} vertices but {} color tuples",
                self.name,
                self.vertices.len(),
                self.slots.len()
            )));
        }
        FoldedColoring::new(self.a, self.b, self.slots.clone())
    }
}

fn parsed(text: &str) -> ColoringFixture {
    ColoringFixture::from_json(text).expect("bundled fixture parses")
}

pub fn example1_spec() -> ProblemSpec {
    ProblemSpec::from_json(EXAMPLE1_SPEC).expect("bundled spec parses")
}

pub fn example1_joint() -> JointPmf {
    example1_spec().joint().expect("bundled joint pmf is valid")
}

/// `f(x1, x2) = x1`.
pub fn example1_function() -> FunctionTable {
    example1_spec()
        .function_table()
        .expect("bundled function is total")
}

/// Characteristic graph of one side of the example under the exact weighting rule.
pub fn example1_graph(side: Side) -> Ewcg {
    let bip = build_bipartite(&example1_joint(), &example1_function()).expect("shapes match");
    project_ewcg(&bip, side, Rule::Exact).expect("projection succeeds")
}

pub fn weighted_5_2() -> ColoringFixture {
    parsed(WEIGHTED_5_2)
}

pub fn weighted_6_3() -> ColoringFixture {
    parsed(WEIGHTED_6_3)
}

pub fn n2_weighted_13_2() -> ColoringFixture {
    parsed(N2_WEIGHTED_13_2)
}

pub fn n2_unweighted_13_2() -> ColoringFixture {
    parsed(N2_UNWEIGHTED_13_2)
}

pub fn n2_unweighted_8_1() -> ColoringFixture {
    parsed(N2_UNWEIGHTED_8_1)
}

pub fn weighted_5_2_coloring() -> FoldedColoring {
    weighted_5_2()
        .coloring()
        .expect("bundled coloring is well formed")
}

pub fn weighted_6_3_coloring() -> FoldedColoring {
    weighted_6_3()
        .coloring()
        .expect("bundled coloring is well formed")
}

/// Bundled text of a coloring fixture by file name.
pub fn bundled(file: &str) -> Option<&'static str> {
    match file {
        "weighted_5_2.json" => Some(WEIGHTED_5_2),
        "weighted_6_3.json" => Some(WEIGHTED_6_3),
        "n2_weighted_13_2.json" => Some(N2_WEIGHTED_13_2),
        "n2_unweighted_13_2.json" => Some(N2_UNWEIGHTED_13_2),
        "n2_unweighted_8_1.json" => Some(N2_UNWEIGHTED_8_1),
        "example1.json" => Some(EXAMPLE1_SPEC),
        _ => None,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn all_fixtures_parse() {
        for f in COLORING_FILES {
            let fx = ColoringFixture::from_json(bundled(f).unwrap()).unwrap();
            let c = fx.coloring().unwrap();
            assert_eq!(c.len(), 5usize.pow(fx.n as u32), "{f}");
        }
    }

    #[test]
    fn vertex_labels_match_graph_order() {
        let g = example1_graph(Side::First);
        assert_eq!(weighted_5_2().vertices, g.labels());
        assert_eq!(n2_weighted_13_2().vertices[7], "(-1,0)");
    }
}
