//! Color PMFs, chromatic and fractional entropy rates, joint color classes,
//! the coloring connectivity condition, and rate-region estimates at finite
//! block length `n` and fold `b`.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::coloring::{
    fractional_chromatic_number, min_entropy_coloring, search_folded_coloring, FoldedColoring,
    FoldedSearch, SearchOptions, TraditionalColoring,
};
use crate::error::{Error, ErrorKind, Result};
use crate::graph::{
    build_bipartite, joint_power, power_graph, project_ewcg, Ewcg, FunctionTable, Rule, Side,
};
use crate::prob::{entropy_of, JointPmf, Pmf};

/// Distribution of colors induced by a folded coloring.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ColorPmf {
    pub a: usize,
    pub b: usize,
    pub probs: Pmf,
}

impl ColorPmf {
    pub fn entropy(&self) -> f64 {
        self.probs.entropy()
    }
}

/// Each vertex spreads its probability evenly over its `b` color slots.
pub fn color_pmf(c: &FoldedColoring, marginal: &Pmf) -> Result<ColorPmf> {
    if c.len() != marginal.len() {
        return Err(Error::Structural(format!(
            "coloring has {} vertices but the marginal has {} entries",
            c.len(),
            marginal.len()
        )));
    }
    let mut m = vec![0.0; c.a()];
    let share = 1.0 / c.b() as f64;
    for (v, &p) in marginal.probs().iter().enumerate() {
        for &col in c.slots(v) {
            m[col] += p * share;
        }
    }
    Ok(ColorPmf {
        a: c.a(),
        b: c.b(),
        probs: Pmf::new(m)?,
    })
}

/// `H(color PMF) / (n·b)` in bits per source symbol.
pub fn entropy_rate(c: &FoldedColoring, marginal: &Pmf, n: usize) -> Result<f64> {
    if n == 0 {
        return Err(Error::Config("block length must be at least 1".into()));
    }
    Ok(color_pmf(c, marginal)?.entropy() / (n * c.b()) as f64)
}

/// Label of a color set, e.g. `{0,3}`.
pub fn set_label(set: &[usize]) -> String {
    let parts: Vec<String> = set.iter().map(usize::to_string).collect();
    format!("{{{}}}", parts.join(","))
}

/// Joint distribution of the color sets of both sides.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct JointColoring {
    /// Rows: distinct color sets of side 1 in sorted order; columns likewise for side 2.
    pub pmf: JointPmf,
    pub sets_1: Vec<Vec<usize>>,
    pub sets_2: Vec<Vec<usize>>,
    /// Row of each side-1 vertex.
    pub class_1: Vec<usize>,
    /// Column of each side-2 vertex.
    pub class_2: Vec<usize>,
}

fn classes(c: &FoldedColoring) -> (Vec<Vec<usize>>, Vec<usize>) {
    let sets: Vec<Vec<usize>> = (0..c.len()).map(|v| c.color_set(v)).collect();
    let mut distinct = sets.clone();
    distinct.sort();
    distinct.dedup();
    let index: BTreeMap<&Vec<usize>, usize> =
        distinct.iter().enumerate().map(|(i, s)| (s, i)).collect();
    let of = sets.iter().map(|s| index[s]).collect();
    (distinct, of)
}

fn check_block_shapes(c1: &FoldedColoring, c2: &FoldedColoring, jn: &JointPmf) -> Result<()> {
    if c1.len() != jn.rows() || c2.len() != jn.cols() {
        return Err(Error::Structural(format!(
            "colorings cover {}x{} vertices but the block source is {}x{}",
            c1.len(),
            c2.len(),
            jn.rows(),
            jn.cols()
        )));
    }
    Ok(())
}

/// Pushes the n-block joint PMF through both colorings.
pub fn joint_color_pmf(
    c1: &FoldedColoring,
    c2: &FoldedColoring,
    j: &JointPmf,
    n: usize,
) -> Result<JointColoring> {
    let jn = joint_power(j, n)?;
    joint_color_pmf_blocks(c1, c2, &jn)
}

pub(crate) fn joint_color_pmf_blocks(
    c1: &FoldedColoring,
    c2: &FoldedColoring,
    jn: &JointPmf,
) -> Result<JointColoring> {
    check_block_shapes(c1, c2, jn)?;
    let (sets_1, class_1) = classes(c1);
    let (sets_2, class_2) = classes(c2);
    let mut m = vec![vec![0.0; sets_2.len()]; sets_1.len()];
    for x1 in 0..jn.rows() {
        for x2 in 0..jn.cols() {
            m[class_1[x1]][class_2[x2]] += jn.p(x1, x2);
        }
    }
    let pmf = JointPmf::new(
        sets_1.iter().map(|s| set_label(s)).collect(),
        sets_2.iter().map(|s| set_label(s)).collect(),
        m,
    )?;
    Ok(JointColoring {
        pmf,
        sets_1,
        sets_2,
        class_1,
        class_2,
    })
}

/// Two jointly possible block pairs in the same joint color class with different function values.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CccWitness {
    pub class_1: Vec<usize>,
    pub class_2: Vec<usize>,
    /// (x1, x2, f(x1, x2)) for the two witnesses.
    pub first: (String, String, String),
    pub second: (String, String, String),
}

impl fmt::Display for CccWitness {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "class ({}, {}) contains f({},{})={} and f({},{})={}",
            set_label(&self.class_1),
            set_label(&self.class_2),
            self.first.0,
            self.first.1,
            self.first.2,
            self.second.0,
            self.second.1,
            self.second.2
        )
    }
}

/// Function value of every positive-probability joint color class, or the
/// first class on which `f` is not constant.
pub(crate) fn class_outputs(
    c1: &FoldedColoring,
    c2: &FoldedColoring,
    jn: &JointPmf,
    fnn: &FunctionTable,
) -> Result<std::result::Result<BTreeMap<(Vec<usize>, Vec<usize>), String>, CccWitness>> {
    check_block_shapes(c1, c2, jn)?;
    fnn.check_shape(jn)?;
    let mut seen: BTreeMap<(Vec<usize>, Vec<usize>), (usize, usize)> = BTreeMap::new();
    let mut table = BTreeMap::new();
    for x1 in 0..jn.rows() {
        for x2 in 0..jn.cols() {
            if jn.p(x1, x2) <= 0.0 {
                continue;
            }
            let key = (c1.color_set(x1), c2.color_set(x2));
            let out = fnn.eval(x1, x2);
            match seen.get(&key) {
                None => {
                    seen.insert(key.clone(), (x1, x2));
                    table.insert(key, out.to_string());
                }
                Some(&(y1, y2)) if fnn.eval(y1, y2) != out => {
                    let w = |a: usize, b: usize| {
                        (
                            jn.row_alphabet()[a].clone(),
                            jn.col_alphabet()[b].clone(),
                            fnn.eval(a, b).to_string(),
                        )
                    };
                    return Ok(Err(CccWitness {
                        class_1: key.0,
                        class_2: key.1,
                        first: w(y1, y2),
                        second: w(x1, x2),
                    }));
                }
                Some(_) => {}
            }
        }
    }
    Ok(Ok(table))
}

/// Checks that `f` is constant on every positive-probability joint color class.
/// Returns a witness when it is not.
pub fn ccc_check(
    c1: &FoldedColoring,
    c2: &FoldedColoring,
    j: &JointPmf,
    f: &FunctionTable,
    n: usize,
) -> Result<Option<CccWitness>> {
    let jn = joint_power(j, n)?;
    Ok(class_outputs(c1, c2, &jn, &f.power(n))?.err())
}

/// Graph on side-2 blocks joining `v, v'` whenever some side-1 blocks sharing a
/// color set and jointly possible with `v` and `v'` respectively give different
/// function values. Any proper coloring of it, paired with `c1`, satisfies the
/// coloring connectivity condition.
pub fn conditional_conflict_graph(
    jn: &JointPmf,
    fnn: &FunctionTable,
    c1: &FoldedColoring,
    n: usize,
) -> Result<Ewcg> {
    fnn.check_shape(jn)?;
    if c1.len() != jn.rows() {
        return Err(Error::Structural(format!(
            "side-1 coloring covers {} vertices, source has {}",
            c1.len(),
            jn.rows()
        )));
    }
    let (sets, class) = classes(c1);
    let nv = jn.cols();
    // outputs[g][v]: distinct outputs over side-1 blocks of class g jointly possible with v
    let mut outputs: Vec<Vec<Vec<&str>>> = vec![vec![Vec::new(); nv]; sets.len()];
    for x1 in 0..jn.rows() {
        for v in 0..nv {
            if jn.p(x1, v) > 0.0 {
                let o = fnn.eval(x1, v);
                let slot = &mut outputs[class[x1]][v];
                if !slot.contains(&o) {
                    slot.push(o);
                }
            }
        }
    }
    for per in &outputs {
        if let Some(v) = per.iter().position(|o| o.len() > 1) {
            return Err(Error::Precondition(format!(
                "side-1 coloring merges blocks that side-2 block {} must tell apart",
                jn.col_alphabet()[v]
            )));
        }
    }
    let mut edges = Vec::new();
    for v in 0..nv {
        for w in v + 1..nv {
            let conflict = outputs
                .iter()
                .any(|per| match (per[v].first(), per[w].first()) {
                    (Some(a), Some(b)) => a != b,
                    _ => false,
                });
            if conflict {
                edges.push(((v, w), 1.0));
            }
        }
    }
    Ewcg::from_raw(
        jn.col_alphabet().to_vec(),
        jn.col_marginal(),
        edges,
        n,
        Side::Second,
    )
}

/// Inputs for building the colorings of both sides.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct PlanOptions {
    pub n: usize,
    pub b: usize,
    /// Palette of side 1; defaults to `b` times the colors of the best traditional coloring.
    pub a: Option<usize>,
    pub rule: Rule,
    pub search: SearchOptions,
}

impl PlanOptions {
    pub fn new(n: usize, b: usize) -> Self {
        PlanOptions {
            n,
            b,
            ..Default::default()
        }
    }
}

/// Everything both encoders and the decoder agree on before any data flows.
#[derive(Debug, Clone)]
pub struct CodingPlan {
    pub n: usize,
    pub b: usize,
    pub a: usize,
    pub joint: JointPmf,
    pub function: FunctionTable,
    /// Characteristic graph of side 1 at power n.
    pub graph_1: Ewcg,
    pub traditional_1: TraditionalColoring,
    /// Best a:b coloring under full disjointness, when one was found.
    pub unweighted_1: Option<FoldedSearch>,
    pub weighted_1: FoldedSearch,
    /// Side-2 conflict graph given the weighted side-1 coloring.
    pub graph_2: Ewcg,
    pub traditional_2: TraditionalColoring,
    pub coloring_2: FoldedColoring,
}

impl CodingPlan {
    pub fn coloring_1(&self) -> &FoldedColoring {
        &self.weighted_1.coloring
    }
}

fn side_one_graph(
    j: &JointPmf,
    f: &FunctionTable,
    n: usize,
    rule: Rule,
    budget: usize,
) -> Result<Ewcg> {
    let g = project_ewcg(&build_bipartite(j, f)?, Side::First, rule)?;
    power_graph(&g, n, j, f, rule, budget)
}

fn with_warm(opts: &SearchOptions, warm: Vec<FoldedColoring>) -> SearchOptions {
    SearchOptions {
        warm_starts: warm,
        ..opts.clone()
    }
}

fn is_search_failure(e: &Error) -> bool {
    matches!(e, Error::Infeasible { .. } | Error::NotFound { .. })
}

/// Builds the side-1 weighted coloring and a CCC-safe side-2 coloring.
pub fn plan(j: &JointPmf, f: &FunctionTable, opts: &PlanOptions) -> Result<CodingPlan> {
    let (n, b) = (opts.n, opts.b);
    if n == 0 || b == 0 {
        return Err(Error::Config("n and b must be at least 1".into()));
    }
    let budgets = &opts.search.budgets;
    let graph_1 = side_one_graph(j, f, n, opts.rule, budgets.power_vertices)?;
    let marginal = graph_1.marginal().clone();
    let traditional_1 = min_entropy_coloring(&graph_1, &marginal, &opts.search)?;
    let k1 = traditional_1.num_colors().max(1);
    let a = opts.a.unwrap_or(b * k1);
    let mut warm = Vec::new();
    if k1 * b <= a {
        warm.push(FoldedColoring::replicate(&traditional_1.colors, k1, b)?.with_palette(a)?);
    }
    let unweighted_1 = match search_folded_coloring(
        &graph_1.as_unweighted(),
        a,
        b,
        &marginal,
        &with_warm(&opts.search, warm.clone()),
    ) {
        Ok(s) => Some(s),
        Err(e) if is_search_failure(&e) => None,
        Err(e) => return Err(e),
    };
    if let Some(u) = &unweighted_1 {
        warm.push(u.coloring.clone());
    }
    let weighted_1 =
        search_folded_coloring(&graph_1, a, b, &marginal, &with_warm(&opts.search, warm))?;

    let jn = joint_power(j, n)?;
    let fnn = f.power(n);
    let graph_2 = conditional_conflict_graph(&jn, &fnn, &weighted_1.coloring, n)?;
    let traditional_2 = min_entropy_coloring(&graph_2, graph_2.marginal(), &opts.search)?;
    let k2 = traditional_2.num_colors().max(1);
    let coloring_2 =
        FoldedColoring::replicate(&traditional_2.colors, k2, b)?.with_palette(a.max(k2 * b))?;
    Ok(CodingPlan {
        n,
        b,
        a,
        joint: jn,
        function: fnn,
        graph_1,
        traditional_1,
        unweighted_1,
        weighted_1,
        graph_2,
        traditional_2,
        coloring_2,
    })
}

/// Finite-(n, b) estimates of the entropies and rate region of one instance.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct RateReport {
    pub n: usize,
    pub b: usize,
    pub a: Option<usize>,
    /// Minimum-entropy traditional coloring, bits per source symbol.
    pub chromatic_entropy: Option<f64>,
    /// Best a:b coloring with disjoint sets on every edge, `H/(n·b)`.
    pub fractional_entropy_rate: Option<f64>,
    /// Best weight-valid a:b coloring, `H/(n·b)`.
    pub weighted_fractional_entropy_rate: Option<f64>,
    /// Fractional chromatic number of the side-1 graph, e.g. `"5/2"`.
    pub chi_f: Option<String>,
    pub chi_f_value: Option<f64>,
    /// `H(S1)/n`, `H(S2)/n` for the transmitted color sets.
    pub marginal_rates: Option<(f64, f64)>,
    /// `H(S1|S2)/n`, `H(S2|S1)/n`.
    pub conditional_rates: Option<(f64, f64)>,
    /// `H(S1,S2)/n`.
    pub sum_rate_min: Option<f64>,
    /// `H(X1,X2)`, the sum rate without function knowledge.
    pub slepian_wolf_sum_rate: f64,
    /// `(chromatic − weighted)/chromatic`.
    pub savings_vs_traditional: Option<f64>,
    /// True when every search in the report is a proven optimum.
    pub exact: bool,
    pub incomplete: bool,
}

fn chi_f_fields(g: &Ewcg, opts: &PlanOptions) -> Result<(String, f64)> {
    use num_traits::ToPrimitive;
    let chi = fractional_chromatic_number(g, &opts.search.budgets)?;
    Ok((chi.to_string(), chi.to_f64().unwrap_or(f64::NAN)))
}

/// Rate-region estimate at finite `(n, b)`.
///
/// On a capacity error the partial report is returned inside
/// [`Error::Incomplete`].
pub fn rate_region(j: &JointPmf, f: &FunctionTable, opts: &PlanOptions) -> Result<RateReport> {
    let mut report = RateReport {
        n: opts.n,
        b: opts.b,
        slepian_wolf_sum_rate: j.joint_entropy(),
        ..Default::default()
    };
    let incomplete = |mut report: RateReport, e: Error| -> Error {
        if e.kind() == ErrorKind::Capacity {
            report.incomplete = true;
            Error::Incomplete {
                partial: Box::new(report),
                source: Box::new(e),
            }
        } else {
            e
        }
    };
    if opts.n == 0 || opts.b == 0 {
        return Err(Error::Config("n and b must be at least 1".into()));
    }

    let graph_1 = match side_one_graph(j, f, opts.n, opts.rule, opts.search.budgets.power_vertices)
    {
        Ok(g) => g,
        Err(e) => return Err(incomplete(report, e)),
    };
    let mut pending: Option<Error> = None;
    match chi_f_fields(&graph_1, opts) {
        Ok((s, v)) => {
            report.chi_f = Some(s);
            report.chi_f_value = Some(v);
        }
        Err(e) if e.kind() == ErrorKind::Capacity => pending = Some(e),
        Err(e) => return Err(e),
    }

    let p = match plan(j, f, opts) {
        Ok(p) => p,
        Err(e) => return Err(incomplete(report, e)),
    };
    let n = opts.n as f64;
    let nb = (opts.n * opts.b) as f64;
    report.a = Some(p.a);
    report.chromatic_entropy = Some(p.traditional_1.entropy / n);
    report.fractional_entropy_rate = p.unweighted_1.as_ref().map(|u| u.color_entropy / nb);
    report.weighted_fractional_entropy_rate = Some(p.weighted_1.color_entropy / nb);
    let jc = joint_color_pmf_blocks(p.coloring_1(), &p.coloring_2, &p.joint)?;
    let h12 = jc.pmf.joint_entropy();
    let h1 = jc.pmf.row_marginal().entropy();
    let h2 = jc.pmf.col_marginal().entropy();
    report.marginal_rates = Some((h1 / n, h2 / n));
    report.conditional_rates = Some((((h12 - h2) / n).max(0.0), ((h12 - h1) / n).max(0.0)));
    report.sum_rate_min = Some(h12 / n);
    let trad = p.traditional_1.entropy / n;
    report.savings_vs_traditional =
        (trad > 0.0).then(|| (trad - p.weighted_1.color_entropy / nb) / trad);
    report.exact = p.traditional_1.exact
        && p.weighted_1.exact
        && p.unweighted_1.as_ref().is_none_or(|u| u.exact);

    match pending {
        Some(e) => Err(incomplete(report, e)),
        None => Ok(report),
    }
}

/// Joint distribution of the `b` replica colors of a folded coloring.
pub fn replica_distribution(c: &FoldedColoring, marginal: &Pmf) -> Result<Vec<(Vec<usize>, f64)>> {
    if c.len() != marginal.len() {
        return Err(Error::Structural(
            "coloring and marginal differ in size".into(),
        ));
    }
    let mut acc: BTreeMap<Vec<usize>, f64> = BTreeMap::new();
    for (v, &p) in marginal.probs().iter().enumerate() {
        if p > 0.0 {
            *acc.entry(c.slots(v).to_vec()).or_default() += p;
        }
    }
    Ok(acc.into_iter().collect())
}

fn check_tuples(dist: &[(Vec<usize>, f64)]) -> Result<usize> {
    let m = dist.first().map_or(0, |t| t.0.len());
    if m == 0 || dist.iter().any(|t| t.0.len() != m) {
        return Err(Error::Input(
            "tuples must be nonempty and of equal length".into(),
        ));
    }
    Pmf::new(dist.iter().map(|t| t.1).collect())?;
    Ok(m)
}

/// Average over all `k`-subsets `S` of the replicas of `H(Z_S)/k`.
pub fn subset_entropy_average(dist: &[(Vec<usize>, f64)], k: usize) -> Result<f64> {
    let m = check_tuples(dist)?;
    if k == 0 || k > m {
        return Err(Error::Config(format!("subset size {k} outside 1..={m}")));
    }
    let mut total = 0.0;
    let mut count = 0usize;
    for subset in combinations(m, k) {
        let mut acc: BTreeMap<Vec<usize>, f64> = BTreeMap::new();
        for (t, p) in dist {
            *acc.entry(subset.iter().map(|&i| t[i]).collect())
                .or_default() += p;
        }
        total += entropy_of(&acc.into_values().collect::<Vec<_>>()) / k as f64;
        count += 1;
    }
    Ok(total / count as f64)
}

/// Subset averages for `k = 1..=m`; fails if they are not nonincreasing.
pub fn han_profile(dist: &[(Vec<usize>, f64)]) -> Result<Vec<f64>> {
    let m = check_tuples(dist)?;
    let prof: Vec<f64> = (1..=m)
        .map(|k| subset_entropy_average(dist, k))
        .collect::<Result<_>>()?;
    if let Some(k) = prof.windows(2).position(|w| w[1] > w[0] + 1e-9) {
        return Err(Error::Internal(format!(
            "subset entropy average increased from k={} to k={}",
            k + 1,
            k + 2
        )));
    }
    Ok(prof)
}

fn combinations(m: usize, k: usize) -> Vec<Vec<usize>> {
    fn rec(start: usize, m: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..m {
            cur.push(i);
            rec(i + 1, m, k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(0, m, k, &mut Vec::new(), &mut out);
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    fn ex() -> (JointPmf, FunctionTable) {
        (fixtures::example1_joint(), fixtures::example1_function())
    }

    #[test]
    fn weighted_5_2_color_pmf() {
        let g = fixtures::example1_graph(Side::First);
        let c = fixtures::weighted_5_2_coloring();
        let pmf = color_pmf(&c, g.marginal()).unwrap();
        for (x, y) in pmf
            .probs
            .probs()
            .iter()
            .zip([0.22, 0.235, 0.045, 0.22, 0.28])
        {
            assert!((x - y).abs() < 1e-12);
        }
        let r = entropy_rate(&c, g.marginal(), 1).unwrap();
        assert!((r - 1.0838).abs() < 1e-4, "{r}");
    }

    #[test]
    fn weighted_6_3_sixth_color() {
        let g = fixtures::example1_graph(Side::First);
        let c = fixtures::weighted_6_3_coloring();
        let pmf = color_pmf(&c, g.marginal()).unwrap();
        assert!((pmf.probs.probs()[5] - 0.68 / 3.0).abs() < 1e-12);
    }

    #[test]
    fn singleton_classes_give_marginal() {
        let p = Pmf::new(vec![0.1, 0.2, 0.7]).unwrap();
        let c = FoldedColoring::traditional(&[0, 1, 2]).unwrap();
        assert_eq!(color_pmf(&c, &p).unwrap().probs, p);
    }

    #[test]
    fn uniform_five_two() {
        // the 5:2 coloring of the five-cycle with disjoint sets on every edge uses each color twice
        let c = FoldedColoring::new(
            5,
            2,
            vec![vec![0, 1], vec![2, 3], vec![4, 0], vec![1, 2], vec![3, 4]],
        )
        .unwrap();
        let cycle = Ewcg::unweighted(5, &[(0, 1), (1, 2), (2, 3), (3, 4), (4, 0)]).unwrap();
        assert!(crate::coloring::validate_folded(&c, &cycle)
            .unwrap()
            .is_ok());
        let r = entropy_rate(&c, &Pmf::uniform(5).unwrap(), 1).unwrap();
        assert!((r - 0.5 * 5f64.log2()).abs() < 1e-12);
    }

    #[test]
    fn joint_color_pmf_blocks_sum() {
        let (j, _) = ex();
        let c1 = FoldedColoring::traditional(&[0, 1, 1, 0, 2]).unwrap();
        let c2 = FoldedColoring::traditional(&[0, 1, 2, 2, 0]).unwrap();
        let jc = joint_color_pmf(&c1, &c2, &j, 1).unwrap();
        // oracle: direct summation over the 5x5 matrix
        let mut want = [[0.0; 3]; 3];
        for x1 in 0..5 {
            for x2 in 0..5 {
                want[[0, 1, 1, 0, 2][x1]][[0, 1, 2, 2, 0][x2]] += j.p(x1, x2);
            }
        }
        for r in 0..3 {
            for c in 0..3 {
                assert!((jc.pmf.p(r, c) - want[r][c]).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn singleton_joint_is_source() {
        let (j, _) = ex();
        let id = FoldedColoring::traditional(&[0, 1, 2, 3, 4]).unwrap();
        let jc = joint_color_pmf(&id, &id, &j, 1).unwrap();
        assert_eq!(jc.pmf.matrix(), j.matrix());
    }

    #[test]
    fn independent_sources_factor() {
        let p1 = Pmf::new(vec![0.3, 0.7]).unwrap();
        let p2 = Pmf::new(vec![0.5, 0.25, 0.25]).unwrap();
        let j = JointPmf::independent(
            vec!["a".into(), "b".into()],
            &p1,
            vec!["x".into(), "y".into(), "z".into()],
            &p2,
        )
        .unwrap();
        let c1 = FoldedColoring::traditional(&[0, 1]).unwrap();
        let c2 = FoldedColoring::traditional(&[0, 1, 1]).unwrap();
        let jc = joint_color_pmf(&c1, &c2, &j, 1).unwrap();
        let q1 = color_pmf(&c1, &p1).unwrap();
        let q2 = color_pmf(&c2, &p2).unwrap();
        for r in 0..2 {
            for c in 0..2 {
                let want = q1.probs.probs()[r] * q2.probs.probs()[c];
                assert!((jc.pmf.p(r, c) - want).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn ccc_cases() {
        let (j, f) = ex();
        let one = FoldedColoring::traditional(&[0; 5]).unwrap();
        let w = ccc_check(&one, &one, &j, &f, 1)
            .unwrap()
            .expect("violation");
        assert_ne!(w.first.2, w.second.2);
        let constant = FunctionTable::from_fn(5, 5, |_, _| "k".into()).unwrap();
        assert!(ccc_check(&one, &one, &j, &constant, 1).unwrap().is_none());
    }

    #[test]
    fn example_side_two_coloring_is_ccc() {
        let (j, f) = ex();
        let p = plan(&j, &f, &PlanOptions::new(1, 1)).unwrap();
        assert!(ccc_check(p.coloring_1(), &p.coloring_2, &j, &f, 1)
            .unwrap()
            .is_none());
        assert_eq!(p.traditional_2.num_colors(), 3);
        // {-2,2}, {-1}, {0,1}
        let c = &p.traditional_2.colors;
        assert_eq!(c[0], c[4]);
        assert_eq!(c[2], c[3]);
        assert_ne!(c[0], c[1]);
        assert_ne!(c[1], c[2]);
    }

    #[test]
    fn example_rates_n1_b1() {
        let (j, f) = ex();
        let r = rate_region(&j, &f, &PlanOptions::new(1, 1)).unwrap();
        assert!((r.chromatic_entropy.unwrap() - 1.3458).abs() < 1e-3);
        assert_eq!(r.chi_f.as_deref(), Some("5/2"));
        let (r1, r2) = r.conditional_rates.unwrap();
        let sum = r.sum_rate_min.unwrap();
        assert!(r1 <= sum && r2 <= sum);
        assert!(sum <= r.slepian_wolf_sum_rate + 1e-9);
        assert!(r.exact);
    }

    #[test]
    fn rate_region_reports_partial_on_capacity() {
        let (j, f) = ex();
        let mut o = PlanOptions::new(2, 1);
        o.search.budgets.independent_sets = 3;
        match rate_region(&j, &f, &o) {
            Err(Error::Incomplete { partial, source }) => {
                assert!(partial.incomplete);
                assert!(matches!(*source, Error::Capacity { .. }));
                assert!(partial.chromatic_entropy.is_some());
            }
            other => panic!("expected incomplete report, got {other:?}"),
        }
    }

    #[test]
    fn independent_first_function_needs_nothing_from_side_two() {
        let u = Pmf::uniform(3).unwrap();
        let names = |p: &str| (0..3).map(|i| format!("{p}{i}")).collect::<Vec<_>>();
        let j = JointPmf::independent(names("a"), &u, names("b"), &u).unwrap();
        let f = FunctionTable::from_fn(3, 3, |i, _| i.to_string()).unwrap();
        let r = rate_region(&j, &f, &PlanOptions::new(1, 1)).unwrap();
        assert!(r.conditional_rates.unwrap().1.abs() < 1e-12);
    }

    #[test]
    fn subset_averages() {
        let c = fixtures::weighted_5_2_coloring();
        let p1 = fixtures::example1_joint().row_marginal();
        let d = replica_distribution(&c, &p1).unwrap();
        let prof = han_profile(&d).unwrap();
        assert_eq!(prof.len(), 2);
        assert!(prof[1] <= prof[0]);
        let full = subset_entropy_average(&d, 2).unwrap();
        let h: f64 = entropy_of(&d.iter().map(|t| t.1).collect::<Vec<_>>());
        assert!((full - h / 2.0).abs() < 1e-12);
    }

    #[test]
    fn iid_replicas_have_flat_profile() {
        let q = [0.25, 0.75];
        let mut d = Vec::new();
        for a in 0..2 {
            for b in 0..2 {
                for c in 0..2 {
                    d.push((vec![a, b, c], q[a] * q[b] * q[c]));
                }
            }
        }
        let h = entropy_of(&q);
        for v in han_profile(&d).unwrap() {
            assert!((v - h).abs() < 1e-12);
        }
    }
}
