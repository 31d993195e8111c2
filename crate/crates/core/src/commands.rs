//! Command implementations behind the `ewcg` binary and the C interface.
//!
//! Each command takes a parsed [`ProblemSpec`] (after any overrides) and
//! returns a serializable result; wrapping it into an [`Envelope`] is left to
//! the caller.

use serde::Serialize;

use crate::coloring::{
    b_fold_chromatic_number, fractional_cover, min_entropy_coloring, ratio_parts,
    search_folded_coloring, split_replicas, validate_folded, FoldedColoring, Mode, ValidityReport,
};
use crate::error::{Error, ErrorKind, Result};
use crate::graph::{build_bipartite, power_graph, project_ewcg, Ewcg, Rule, Side};
use crate::pipeline::{self, Binning, SimOptions, SimResult};
use crate::rates::{self, color_pmf, set_label, RateReport};
use crate::report::Envelope;
use crate::spec::ProblemSpec;

/// Command-line overrides of the options stored in a spec.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Overrides {
    pub n: Option<usize>,
    pub b: Option<usize>,
    pub a: Option<usize>,
    pub mode: Option<Mode>,
    pub rule: Option<Rule>,
    pub seed: Option<u64>,
}

impl Overrides {
    pub fn apply(&self, spec: &ProblemSpec) -> ProblemSpec {
        let mut s = spec.clone();
        let o = &mut s.options;
        o.n = self.n.unwrap_or(o.n);
        o.b = self.b.unwrap_or(o.b);
        o.a = self.a.or(o.a);
        o.mode = self.mode.unwrap_or(o.mode);
        o.rule = self.rule.unwrap_or(o.rule);
        o.seed = self.seed.unwrap_or(o.seed);
        s
    }
}

pub fn envelope<T: Serialize>(command: &str, spec: Option<&ProblemSpec>, result: T) -> Envelope<T> {
    let (hash, seed, budgets) = match spec {
        Some(s) => (Some(s.hash()), s.options.seed, s.options.budgets.clone()),
        None => (None, 0, Default::default()),
    };
    Envelope::new(command, hash, seed, budgets, result)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EdgeReport {
    pub u: String,
    pub v: String,
    pub raw: f64,
    pub normalized: f64,
    pub replicas: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GraphReport {
    pub side: Side,
    pub power: usize,
    pub vertices: Vec<String>,
    pub marginal: Vec<f64>,
    pub edges: Vec<EdgeReport>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WeightsReport {
    pub rule: Rule,
    pub b: usize,
    pub side_1: GraphReport,
    pub side_2: GraphReport,
}

/// Characteristic graph of one side at the spec's block length.
pub fn side_graph(spec: &ProblemSpec, side: Side) -> Result<Ewcg> {
    let (j, f) = (spec.joint()?, spec.function_table()?);
    let o = &spec.options;
    let g = project_ewcg(&build_bipartite(&j, &f)?, side, o.rule)?;
    power_graph(&g, o.n, &j, &f, o.rule, o.budgets.power_vertices)
}

fn graph_report(g: &Ewcg, b: usize) -> Result<GraphReport> {
    let split = split_replicas(g, b)?;
    let edges = g
        .edges()
        .map(|((u, v), w)| EdgeReport {
            u: g.labels()[u].clone(),
            v: g.labels()[v].clone(),
            raw: w.raw,
            normalized: w.normalized,
            replicas: split.weights(u, v).unwrap_or(&[]).to_vec(),
        })
        .collect();
    Ok(GraphReport {
        side: g.side(),
        power: g.power(),
        vertices: g.labels().to_vec(),
        marginal: g.marginal().probs().to_vec(),
        edges,
    })
}

pub fn weights(spec: &ProblemSpec) -> Result<WeightsReport> {
    let b = spec.options.b;
    Ok(WeightsReport {
        rule: spec.options.rule,
        b,
        side_1: graph_report(&side_graph(spec, Side::First)?, b)?,
        side_2: graph_report(&side_graph(spec, Side::Second)?, b)?,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Assignment {
    pub vertex: String,
    pub colors: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ColoringReport {
    pub a: usize,
    pub b: usize,
    pub assignment: Vec<Assignment>,
    pub validity: ValidityReport,
    pub color_pmf: Vec<f64>,
    /// `H(color PMF)/(n·b)`.
    pub entropy_rate: f64,
    pub exact: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ColorReport {
    pub n: usize,
    pub mode: Mode,
    /// Minimum-entropy proper coloring.
    pub traditional: ColoringReport,
    /// Best a:b coloring under the edge weights; absent when `b = 1` and no palette was requested.
    pub weighted: Option<ColoringReport>,
    /// Best a:b coloring with disjoint sets on every edge, when one was found.
    pub unweighted: Option<ColoringReport>,
}

fn coloring_report(
    g: &Ewcg,
    judged: &Ewcg,
    c: &FoldedColoring,
    exact: bool,
) -> Result<ColoringReport> {
    let n = g.power();
    Ok(ColoringReport {
        a: c.a(),
        b: c.b(),
        assignment: (0..c.len())
            .map(|v| Assignment {
                vertex: g.labels()[v].clone(),
                colors: set_label(&c.color_set(v)),
            })
            .collect(),
        validity: validate_folded(c, judged)?,
        color_pmf: color_pmf(c, g.marginal())?.probs.probs().to_vec(),
        entropy_rate: rates::entropy_rate(c, g.marginal(), n)?,
        exact,
    })
}

/// Side-1 colorings: traditional, and a:b under both validity notions.
pub fn color(spec: &ProblemSpec) -> Result<ColorReport> {
    let g = side_graph(spec, Side::First)?;
    let opts = spec.search_options();
    let (b, a) = (spec.options.b, spec.options.a);
    let trad = min_entropy_coloring(&g, g.marginal(), &opts)?;
    let trad_c = FoldedColoring::traditional(&trad.colors)?;
    let traditional = coloring_report(&g, &g.as_unweighted(), &trad_c, trad.exact)?;
    let mut report = ColorReport {
        n: spec.options.n,
        mode: opts.mode,
        traditional,
        weighted: None,
        unweighted: None,
    };
    if b == 1 && a.is_none() {
        return Ok(report);
    }
    let a = a.unwrap_or(b * trad.num_colors().max(1));
    let w = search_folded_coloring(&g, a, b, g.marginal(), &opts)?;
    report.weighted = Some(coloring_report(&g, &g, &w.coloring, w.exact)?);
    let plain = g.as_unweighted();
    report.unweighted = match search_folded_coloring(&plain, a, b, g.marginal(), &opts) {
        Ok(u) => Some(coloring_report(&g, &plain, &u.coloring, u.exact)?),
        Err(e) if e.kind() == ErrorKind::Infeasible => None,
        Err(e) => return Err(e),
    };
    Ok(report)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FoldRow {
    pub b: usize,
    pub chi_b: usize,
    pub ratio: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ChiReport {
    pub power: usize,
    pub chi_f: String,
    pub numerator: i64,
    pub denominator: i64,
    pub value: f64,
    /// Independent sets of an optimal fractional cover with their weights.
    pub cover: Vec<(Vec<String>, String)>,
    /// `χ_b / b` for small `b`, when the graph is within the exact-search budget.
    pub folds: Option<Vec<FoldRow>>,
}

pub fn chif(spec: &ProblemSpec) -> Result<ChiReport> {
    let g = side_graph(spec, Side::First)?.as_unweighted();
    let budgets = &spec.options.budgets;
    let cover = fractional_cover(&g, budgets)?;
    let (numerator, denominator) = ratio_parts(&cover.value)
        .ok_or_else(|| Error::Internal("fractional chromatic number overflows i64".into()))?;
    let sets = cover
        .sets
        .iter()
        .map(|(mask, w)| {
            let members = (0..g.len())
                .filter(|v| mask >> v & 1 == 1)
                .map(|v| g.labels()[v].clone());
            (members.collect(), w.to_string())
        })
        .collect();
    let folds = if g.len() <= budgets.folded_vertices {
        Some(
            (1..=3)
                .map(|b| {
                    let chi_b = b_fold_chromatic_number(&g, b, budgets)?;
                    Ok(FoldRow {
                        b,
                        chi_b,
                        ratio: chi_b as f64 / b as f64,
                    })
                })
                .collect::<Result<Vec<_>>>()?,
        )
    } else {
        None
    };
    Ok(ChiReport {
        power: g.power(),
        chi_f: cover.value.to_string(),
        numerator,
        denominator,
        value: numerator as f64 / denominator as f64,
        cover: sets,
        folds,
    })
}

pub fn rates(spec: &ProblemSpec) -> Result<RateReport> {
    rates::rate_region(
        &spec.joint()?,
        &spec.function_table()?,
        &spec.plan_options(),
    )
}

pub const DEFAULT_BLOCKS: usize = 10_000;

pub fn simulate(
    spec: &ProblemSpec,
    num_blocks: usize,
    binning: Option<Binning>,
) -> Result<SimResult> {
    let opts = SimOptions {
        plan: spec.plan_options(),
        num_blocks,
        seed: spec.options.seed,
        binning,
    };
    pipeline::simulate(&spec.joint()?, &spec.function_table()?, &opts)
}
