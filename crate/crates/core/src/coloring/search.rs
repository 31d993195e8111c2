//! Minimum-entropy coloring search: exact branch and bound for small graphs and
//! a restarted annealing + local search heuristic for larger ones.
//!
//! Color sets are `u64` bitmasks, so palettes are limited to 64 colors.

use std::cmp::Ordering;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{lp, required_disjoint, Budgets, FoldedColoring, Mode};
use crate::error::{Error, Result};
use crate::graph::Ewcg;
use crate::prob::{entropy_of, plogp, Pmf};

const MAX_PALETTE: usize = 64;

/// Options shared by the search entry points.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct SearchOptions {
    pub mode: Mode,
    pub budgets: Budgets,
    pub seed: u64,
    /// Colorings the heuristic starts from in addition to its own restarts.
    #[serde(default, skip)]
    pub warm_starts: Vec<FoldedColoring>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FoldedSearch {
    pub coloring: FoldedColoring,
    /// Entropy of the induced color PMF in bits (not divided by b).
    pub color_entropy: f64,
    /// True when the result is a proven optimum.
    pub exact: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TraditionalColoring {
    /// Color of each vertex, numbered from 0 in order of first use.
    pub colors: Vec<usize>,
    /// Entropy of the color PMF in bits.
    pub entropy: f64,
    pub exact: bool,
}

impl TraditionalColoring {
    pub fn num_colors(&self) -> usize {
        self.colors.iter().max().map_or(0, |m| m + 1)
    }
}

struct Problem {
    nv: usize,
    a: usize,
    b: usize,
    probs: Vec<f64>,
    /// Vertices by descending probability, ties by index.
    order: Vec<usize>,
    /// (neighbor, required number of colors not shared)
    nbrs: Vec<Vec<(usize, u32)>>,
}

impl Problem {
    fn new(g: &Ewcg, marginal: &Pmf, a: usize, b: usize) -> Result<Self> {
        if marginal.len() != g.len() {
            return Err(Error::Structural(format!(
                "marginal has {} entries for {} vertices",
                marginal.len(),
                g.len()
            )));
        }
        if b == 0 || a < b {
            return Err(Error::Config(format!("need a >= b >= 1, got {a}:{b}")));
        }
        if a > MAX_PALETTE {
            return Err(Error::capacity("palette size", a, MAX_PALETTE));
        }
        let probs = marginal.probs().to_vec();
        let mut order: Vec<usize> = (0..g.len()).collect();
        order.sort_by(|&x, &y| probs[y].total_cmp(&probs[x]).then(x.cmp(&y)));
        let mut nbrs = vec![Vec::new(); g.len()];
        for ((u, v), w) in g.edges() {
            let r = required_disjoint(w.normalized, b) as u32;
            if r > 0 {
                nbrs[u].push((v, r));
                nbrs[v].push((u, r));
            }
        }
        Ok(Problem {
            nv: g.len(),
            a,
            b,
            probs,
            order,
            nbrs,
        })
    }

    fn masses(&self, masks: &[u64]) -> Vec<f64> {
        let mut m = vec![0.0; self.a];
        let share = 1.0 / self.b as f64;
        for (v, &s) in masks.iter().enumerate() {
            for (c, mc) in m.iter_mut().enumerate() {
                if s >> c & 1 == 1 {
                    *mc += self.probs[v] * share;
                }
            }
        }
        m
    }

    fn entropy(&self, masks: &[u64]) -> f64 {
        entropy_of(&self.masses(masks))
    }

    fn deficit_at(&self, masks: &[u64], v: usize, s: u64) -> u32 {
        self.nbrs[v]
            .iter()
            .map(|&(u, r)| r.saturating_sub((s & !masks[u]).count_ones()))
            .sum()
    }

    fn total_deficit(&self, masks: &[u64]) -> u32 {
        (0..self.nv)
            .map(|v| self.deficit_at(masks, v, masks[v]))
            .sum::<u32>()
            / 2
    }
}

/// Relabels colors in order of first appearance so equal colorings compare equal.
fn canonical(masks: &[u64], a: usize) -> Vec<u64> {
    let mut map = [u8::MAX; MAX_PALETTE];
    let mut next = 0u8;
    for &s in masks {
        for c in 0..a {
            if s >> c & 1 == 1 && map[c] == u8::MAX {
                map[c] = next;
                next += 1;
            }
        }
    }
    masks
        .iter()
        .map(|&s| {
            (0..a)
                .filter(|&c| s >> c & 1 == 1)
                .fold(0u64, |acc, c| acc | 1 << map[c])
        })
        .collect()
}

fn cmp_solutions(x: &(f64, Vec<u64>), y: &(f64, Vec<u64>)) -> Ordering {
    x.0.total_cmp(&y.0).then_with(|| x.1.cmp(&y.1))
}

// ---------------------------------------------------------------- exact search

struct BranchAndBound<'p> {
    p: &'p Problem,
    pos: Vec<usize>,
    masks: Vec<u64>,
    mass: Vec<f64>,
    best_h: f64,
    best: Option<Vec<u64>>,
    feasibility_only: bool,
}

impl BranchAndBound<'_> {
    /// Entropy of the current masses with the remaining probability mass spread
    /// as `remaining/b` on the `b` heaviest colors, the least entropy any completion can reach.
    fn bound(&self, remaining: f64) -> f64 {
        let mut m = self.mass.clone();
        m.sort_by(|x, y| y.total_cmp(x));
        let add = remaining / self.p.b as f64;
        for x in m.iter_mut().take(self.p.b) {
            *x += add;
        }
        entropy_of(&m)
    }

    fn run(&mut self, depth: usize, used: usize, remaining: f64) {
        let p = self.p;
        if self.feasibility_only && self.best.is_some() {
            return;
        }
        if depth == p.nv {
            let h = entropy_of(&self.mass);
            if self.best.is_none() || h < self.best_h - 1e-12 {
                self.best_h = h;
                self.best = Some(self.masks.clone());
            }
            return;
        }
        if !self.feasibility_only
            && self.best.is_some()
            && self.bound(remaining) >= self.best_h - 1e-12
        {
            return;
        }
        let v = p.order[depth];
        let share = p.probs[v] / p.b as f64;
        for fresh in 0..=p.b.min(p.a - used) {
            let reuse = p.b - fresh;
            if reuse > used {
                continue;
            }
            let fresh_bits = ((1u64 << fresh) - 1) << used;
            for t in subsets(used, reuse) {
                let s = t | fresh_bits;
                let ok = p.nbrs[v]
                    .iter()
                    .all(|&(u, r)| self.pos[u] >= depth || (s & !self.masks[u]).count_ones() >= r);
                if !ok {
                    continue;
                }
                self.masks[v] = s;
                for c in bits(s) {
                    self.mass[c] += share;
                }
                self.run(depth + 1, used + fresh, remaining - p.probs[v]);
                for c in bits(s) {
                    self.mass[c] -= share;
                }
                self.masks[v] = 0;
            }
        }
    }
}

fn bits(s: u64) -> impl Iterator<Item = usize> {
    (0..64).filter(move |&c| s >> c & 1 == 1)
}

/// All `k`-subsets of `{0..n}` as bitmasks, in increasing numeric order.
fn subsets(n: usize, k: usize) -> impl Iterator<Item = u64> {
    let limit = 1u64.checked_shl(n as u32).unwrap_or(0);
    let mut x = if k == 0 { 0 } else { (1u64 << k) - 1 };
    let mut done = k > n;
    std::iter::from_fn(move || {
        if done {
            return None;
        }
        let cur = x;
        if k == 0 {
            done = true;
        } else {
            let c = x & x.wrapping_neg();
            let r = x + c;
            x = (((r ^ x) >> 2) / c) | r;
            if n < 64 && x >= limit {
                done = true;
            }
            if n == 64 && r == 0 {
                done = true;
            }
        }
        Some(cur)
    })
}

fn exact(p: &Problem, feasibility_only: bool) -> Option<(f64, Vec<u64>)> {
    let mut pos = vec![0; p.nv];
    for (i, &v) in p.order.iter().enumerate() {
        pos[v] = i;
    }
    let mut bb = BranchAndBound {
        p,
        pos,
        masks: vec![0; p.nv],
        mass: vec![0.0; p.a],
        best_h: f64::INFINITY,
        best: None,
        feasibility_only,
    };
    bb.run(0, 0, 1.0);
    let best = bb.best?;
    Some((p.entropy(&best), best))
}

// ------------------------------------------------------------------- heuristic

fn mix_seed(seed: u64, restart: u64) -> u64 {
    // splitmix64 step
    let mut z = seed ^ restart.wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

fn greedy(p: &Problem, rng: &mut ChaCha8Rng, noise: f64) -> Vec<u64> {
    let mut masks = vec![0u64; p.nv];
    let mut mass = vec![0.0; p.a];
    let mut assigned = vec![false; p.nv];
    let share_of = |v: usize| p.probs[v] / p.b as f64;
    for &v in &p.order {
        let share = share_of(v);
        let mut s = 0u64;
        for slot in 0..p.b {
            let rem_after = (p.b - slot - 1) as u32;
            let mut best: Option<(u32, f64, usize)> = None;
            for c in 0..p.a {
                if s >> c & 1 == 1 {
                    continue;
                }
                let cand = s | 1 << c;
                let def: u32 = p.nbrs[v]
                    .iter()
                    .filter(|&&(u, _)| assigned[u])
                    .map(|&(u, r)| r.saturating_sub((cand & !masks[u]).count_ones() + rem_after))
                    .sum();
                let dh = plogp(mass[c] + share) - plogp(mass[c]);
                let dh = dh * (1.0 + noise * rng.random::<f64>());
                if best.is_none_or(|(bd, bh, _)| def < bd || (def == bd && dh < bh)) {
                    best = Some((def, dh, c));
                }
            }
            let c = best.expect("palette has at least b colors").2;
            s |= 1 << c;
        }
        masks[v] = s;
        for c in bits(s) {
            mass[c] += share;
        }
        assigned[v] = true;
    }
    masks
}

struct Local<'p> {
    p: &'p Problem,
    masks: Vec<u64>,
    mass: Vec<f64>,
    deficit: u32,
    h: f64,
}

impl<'p> Local<'p> {
    fn new(p: &'p Problem, masks: Vec<u64>) -> Self {
        let mass = p.masses(&masks);
        let deficit = p.total_deficit(&masks);
        let h = entropy_of(&mass);
        Local {
            p,
            masks,
            mass,
            deficit,
            h,
        }
    }

    /// (change in deficit, change in entropy) of swapping color `out` for `inn` at `v`.
    fn delta(&self, v: usize, out: usize, inn: usize) -> (i64, f64) {
        let old = self.masks[v];
        let new = (old & !(1 << out)) | 1 << inn;
        let mut dd = 0i64;
        for &(u, r) in &self.p.nbrs[v] {
            let before = r.saturating_sub((old & !self.masks[u]).count_ones());
            let after = r.saturating_sub((new & !self.masks[u]).count_ones());
            dd += after as i64 - before as i64;
        }
        let share = self.p.probs[v] / self.p.b as f64;
        let (mo, mi) = (self.mass[out], self.mass[inn]);
        let dh = plogp((mo - share).max(0.0)) - plogp(mo) + plogp(mi + share) - plogp(mi);
        (dd, dh)
    }

    fn apply(&mut self, v: usize, out: usize, inn: usize, dd: i64, dh: f64) {
        let share = self.p.probs[v] / self.p.b as f64;
        self.masks[v] = (self.masks[v] & !(1 << out)) | 1 << inn;
        self.mass[out] = (self.mass[out] - share).max(0.0);
        self.mass[inn] += share;
        self.deficit = (self.deficit as i64 + dd) as u32;
        self.h += dh;
    }

    fn resync(&mut self) {
        self.mass = self.p.masses(&self.masks);
        self.h = entropy_of(&self.mass);
    }

    fn anneal(&mut self, rng: &mut ChaCha8Rng, steps: usize) -> Option<Vec<u64>> {
        let p = self.p;
        let mut best: Option<(f64, Vec<u64>)> =
            (self.deficit == 0).then(|| (self.h, self.masks.clone()));
        if p.a == p.b || p.nv == 0 || steps == 0 {
            return best.map(|b| b.1);
        }
        let lambda = 2.0;
        let (t0, t1) = (0.3f64, 5e-4f64);
        let cool = (t1 / t0).powf(1.0 / steps as f64);
        let mut t = t0;
        for step in 0..steps {
            let v = rng.random_range(0..p.nv);
            let s = self.masks[v];
            let out = nth_bit(s, rng.random_range(0..p.b));
            let inn = nth_bit(!s & low_bits(p.a), rng.random_range(0..p.a - p.b));
            let (dd, dh) = self.delta(v, out, inn);
            let dc = dh + lambda * dd as f64;
            if dc <= 0.0 || rng.random::<f64>() < (-dc / t).exp() {
                self.apply(v, out, inn, dd, dh);
                if self.deficit == 0 && best.as_ref().is_none_or(|b| self.h < b.0 - 1e-12) {
                    best = Some((self.h, self.masks.clone()));
                }
            }
            if step % 4096 == 4095 {
                self.resync();
            }
            t *= cool;
        }
        best.map(|b| b.1)
    }

    /// First-improvement descent on (deficit, entropy).
    fn descend(&mut self) {
        let p = self.p;
        loop {
            let mut improved = false;
            for v in 0..p.nv {
                for out in bits(self.masks[v]).collect::<Vec<_>>() {
                    for inn in 0..p.a {
                        if self.masks[v] >> inn & 1 == 1 || self.masks[v] >> out & 1 == 0 {
                            continue;
                        }
                        let (dd, dh) = self.delta(v, out, inn);
                        if dd < 0 || (dd == 0 && dh < -1e-12) {
                            self.apply(v, out, inn, dd, dh);
                            improved = true;
                        }
                    }
                }
            }
            self.resync();
            if !improved {
                break;
            }
        }
    }
}

fn low_bits(a: usize) -> u64 {
    if a >= 64 {
        u64::MAX
    } else {
        (1u64 << a) - 1
    }
}

fn nth_bit(mut s: u64, n: usize) -> usize {
    for _ in 0..n {
        s &= s - 1;
    }
    s.trailing_zeros() as usize
}

fn restart(
    p: &Problem,
    start: Option<Vec<u64>>,
    seed: u64,
    moves_per_vertex: usize,
) -> Option<(f64, Vec<u64>)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let init = start.unwrap_or_else(|| greedy(p, &mut rng, 0.5));
    let mut local = Local::new(p, init);
    let snapshot = local.anneal(&mut rng, moves_per_vertex * p.nv);
    if let Some(best) = snapshot {
        local = Local::new(p, best);
    }
    local.descend();
    if local.deficit != 0 || p.total_deficit(&local.masks) != 0 {
        return None;
    }
    let masks = canonical(&local.masks, p.a);
    Some((p.entropy(&masks), masks))
}

fn heuristic(p: &Problem, opts: &SearchOptions, starts: Vec<Vec<u64>>) -> Option<(f64, Vec<u64>)> {
    let mut rng = ChaCha8Rng::seed_from_u64(mix_seed(opts.seed, u64::MAX));
    let deterministic = greedy(p, &mut rng, 0.0);
    let mut jobs: Vec<Option<Vec<u64>>> = starts.into_iter().map(Some).collect();
    jobs.push(Some(deterministic));
    jobs.extend((0..opts.budgets.restarts).map(|_| None));
    let moves = opts.budgets.anneal_moves_per_vertex;
    jobs.into_par_iter()
        .enumerate()
        .filter_map(|(i, start)| restart(p, start, mix_seed(opts.seed, i as u64), moves))
        .min_by(cmp_solutions)
}

// ------------------------------------------------------------------ public API

fn starts_for(p: &Problem, warm: &[FoldedColoring]) -> Result<Vec<Vec<u64>>> {
    warm.iter()
        .map(|c| {
            if c.len() != p.nv || c.b() != p.b || c.a() > p.a {
                return Err(Error::Structural(format!(
                    "warm start {}:{} on {} vertices does not fit a {}:{} search on {}",
                    c.a(),
                    c.b(),
                    c.len(),
                    p.a,
                    p.b,
                    p.nv
                )));
            }
            Ok(c.all_slots()
                .iter()
                .map(|s| s.iter().fold(0u64, |m, &x| m | 1 << x))
                .collect::<Vec<u64>>())
        })
        .filter(|m| {
            m.as_ref()
                .map_or(true, |m| m.iter().all(|s| s.count_ones() as usize == p.b))
        })
        .collect()
}

/// Lower bound on the palette from the edges that force full disjointness.
fn palette_lower_bound(g: &Ewcg, b: usize, budgets: &Budgets) -> Option<usize> {
    let strong = g.filter_edges(|w| required_disjoint(w.normalized, b) == b);
    let chi = lp::fractional_chromatic_number(&strong, budgets).ok()?;
    let bound = (chi * num_rational::BigRational::from_integer(b.into())).ceil();
    num_traits::ToPrimitive::to_usize(&bound.to_integer())
}

/// Finds a valid a:b coloring minimizing the entropy of its color PMF.
pub fn search_folded_coloring(
    g: &Ewcg,
    a: usize,
    b: usize,
    marginal: &Pmf,
    opts: &SearchOptions,
) -> Result<FoldedSearch> {
    let p = Problem::new(g, marginal, a, b)?;
    let within = p.nv <= opts.budgets.folded_vertices && a <= opts.budgets.folded_palette;
    let use_exact = match opts.mode {
        Mode::Exact if !within => {
            return Err(Error::capacity(
                "exact search vertices x palette",
                p.nv.max(a),
                opts.budgets
                    .folded_vertices
                    .min(opts.budgets.folded_palette),
            ))
        }
        Mode::Exact => true,
        Mode::Auto => within,
        Mode::Heuristic => false,
    };
    let found = if use_exact {
        exact(&p, false)
    } else {
        if let Some(lb) = palette_lower_bound(g, b, &opts.budgets) {
            if a < lb {
                return Err(Error::Infeasible {
                    a,
                    b,
                    reason: format!(
                        "the fully disjoint edges alone need at least {lb} colors (b times the fractional chromatic number)"
                    ),
                });
            }
        }
        heuristic(&p, opts, starts_for(&p, &opts.warm_starts)?)
    };
    match found {
        Some((h, masks)) => {
            let coloring = FoldedColoring::from_masks(a, b, &masks);
            Ok(FoldedSearch {
                coloring,
                color_entropy: h,
                exact: use_exact,
            })
        }
        None if use_exact => Err(Error::Infeasible {
            a,
            b,
            reason: "exhaustive search found no valid coloring".into(),
        }),
        None => Err(Error::NotFound {
            a,
            b,
            restarts: opts.budgets.restarts,
        }),
    }
}

fn compact(colors: &[usize]) -> Vec<usize> {
    let mut map = std::collections::HashMap::new();
    colors
        .iter()
        .map(|&c| {
            let next = map.len();
            *map.entry(c).or_insert(next)
        })
        .collect()
}

fn traditional_entropy(colors: &[usize], probs: &[f64]) -> f64 {
    let k = colors.iter().max().map_or(0, |m| m + 1);
    let mut m = vec![0.0; k];
    for (&c, &pv) in colors.iter().zip(probs) {
        m[c] += pv;
    }
    entropy_of(&m)
}

/// Proper coloring (adjacency = positive weight) minimizing the entropy of the color PMF.
pub fn min_entropy_coloring(
    g: &Ewcg,
    marginal: &Pmf,
    opts: &SearchOptions,
) -> Result<TraditionalColoring> {
    let nv = g.len();
    if marginal.len() != nv {
        return Err(Error::Structural(format!(
            "marginal has {} entries for {} vertices",
            marginal.len(),
            nv
        )));
    }
    if nv == 0 {
        return Ok(TraditionalColoring {
            colors: Vec::new(),
            entropy: 0.0,
            exact: true,
        });
    }
    let unit = g.as_unweighted();
    let probs = marginal.probs();

    if nv <= MAX_PALETTE {
        if let Ok(mis) = lp::maximal_independent_sets(&unit, &opts.budgets) {
            let disjoint = mis.iter().map(|m| m.count_ones() as usize).sum::<usize>() == nv
                && mis.iter().fold(0u64, |acc, m| acc | m).count_ones() as usize == nv;
            if disjoint {
                let mut colors = vec![0; nv];
                for (i, m) in mis.iter().enumerate() {
                    for v in bits(*m) {
                        colors[v] = i;
                    }
                }
                let colors = compact(&colors);
                let entropy = traditional_entropy(&colors, probs);
                return Ok(TraditionalColoring {
                    colors,
                    entropy,
                    exact: true,
                });
            }
        }
    }

    let within = nv <= opts.budgets.min_entropy_vertices;
    let use_exact = match opts.mode {
        Mode::Exact | Mode::Auto if within => true,
        Mode::Heuristic if nv <= MAX_PALETTE => false,
        Mode::Auto if nv <= MAX_PALETTE => false,
        _ => {
            return Err(Error::capacity(
                "exact minimum-entropy coloring vertices",
                nv,
                opts.budgets.min_entropy_vertices,
            ))
        }
    };
    let p = Problem::new(&unit, marginal, nv, 1)?;
    let found = if use_exact {
        exact(&p, false)
    } else {
        heuristic(&p, opts, starts_for(&p, &opts.warm_starts)?)
    };
    let (_, masks) = found.ok_or_else(|| {
        Error::Internal("a proper coloring with one color per vertex always exists".into())
    })?;
    let colors = compact(
        &masks
            .iter()
            .map(|m| m.trailing_zeros() as usize)
            .collect::<Vec<_>>(),
    );
    let entropy = traditional_entropy(&colors, probs);
    Ok(TraditionalColoring {
        colors,
        entropy,
        exact: use_exact,
    })
}

/// Least palette size admitting a valid a:b coloring, by exhaustive search.
pub fn b_fold_chromatic_number(g: &Ewcg, b: usize, budgets: &Budgets) -> Result<usize> {
    if b == 0 {
        return Err(Error::Config("fold b must be at least 1".into()));
    }
    let nv = g.len();
    if nv > budgets.folded_vertices {
        return Err(Error::capacity(
            "b-fold chromatic number vertices",
            nv,
            budgets.folded_vertices,
        ));
    }
    let upper = (b * nv).max(b);
    if upper > MAX_PALETTE {
        return Err(Error::capacity("palette size", upper, MAX_PALETTE));
    }
    let uniform = Pmf::uniform(nv.max(1))?;
    let marginal = if nv == 0 {
        uniform
    } else {
        g.marginal().clone()
    };
    for a in b..=upper {
        let p = Problem::new(g, &marginal, a, b)?;
        if exact(&p, true).is_some() {
            return Ok(a);
        }
    }
    Err(Error::Internal(format!(
        "{upper}:{b} coloring with disjoint sets per vertex must be valid"
    )))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coloring::validate_folded;
    use crate::fixtures;
    use crate::graph::Side;

    fn cycle(n: usize) -> Ewcg {
        let edges: Vec<_> = (0..n).map(|i| (i, (i + 1) % n)).collect();
        Ewcg::unweighted(n, &edges).unwrap()
    }

    fn opts(mode: Mode) -> SearchOptions {
        SearchOptions {
            mode,
            ..Default::default()
        }
    }

    #[test]
    fn subsets_enumerate_binomially() {
        assert_eq!(subsets(5, 2).count(), 10);
        assert_eq!(subsets(4, 0).collect::<Vec<_>>(), vec![0]);
        assert_eq!(subsets(0, 0).count(), 1);
        assert_eq!(subsets(2, 3).count(), 0);
        assert_eq!(subsets(6, 6).count(), 1);
        assert!(subsets(6, 3).all(|s| s.count_ones() == 3 && s < 64));
    }

    #[test]
    fn example_min_entropy_coloring() {
        let g = fixtures::example1_graph(Side::First);
        let c = min_entropy_coloring(&g, g.marginal(), &opts(Mode::Auto)).unwrap();
        assert!(c.exact);
        assert!((c.entropy - 1.3458).abs() < 1e-3, "{}", c.entropy);
        // classes {-2,1}, {-1,0}, {2}
        assert_eq!(c.colors[0], c.colors[3]);
        assert_eq!(c.colors[1], c.colors[2]);
        assert_eq!(c.num_colors(), 3);
    }

    #[test]
    fn trivial_min_entropy_cases() {
        let empty = Ewcg::unweighted(4, &[]).unwrap();
        let c = min_entropy_coloring(&empty, empty.marginal(), &opts(Mode::Auto)).unwrap();
        assert_eq!(c.entropy, 0.0);
        let k3 = Ewcg::unweighted(3, &[(0, 1), (1, 2), (0, 2)]).unwrap();
        let c = min_entropy_coloring(&k3, k3.marginal(), &opts(Mode::Auto)).unwrap();
        assert!((c.entropy - 3f64.log2()).abs() < 1e-12);
    }

    #[test]
    fn exact_mode_beyond_budget_is_capacity() {
        let g = cycle(13);
        let err = min_entropy_coloring(&g, g.marginal(), &opts(Mode::Exact)).unwrap_err();
        assert!(matches!(err, Error::Capacity { .. }));
        let err = search_folded_coloring(&cycle(9), 9, 2, cycle(9).marginal(), &opts(Mode::Exact))
            .unwrap_err();
        assert!(matches!(err, Error::Capacity { .. }));
    }

    #[test]
    fn exact_and_heuristic_agree_on_example() {
        let g = fixtures::example1_graph(Side::First);
        for (a, b) in [(5, 2), (6, 3), (4, 2)] {
            let e = search_folded_coloring(&g, a, b, g.marginal(), &opts(Mode::Exact)).unwrap();
            let h = search_folded_coloring(&g, a, b, g.marginal(), &opts(Mode::Heuristic)).unwrap();
            assert!(validate_folded(&e.coloring, &g).unwrap().is_ok());
            assert!(validate_folded(&h.coloring, &g).unwrap().is_ok());
            assert!(h.color_entropy >= e.color_entropy - 1e-9);
            assert!(h.color_entropy <= e.color_entropy + 1e-6, "{a}:{b}");
        }
    }

    #[test]
    fn weighted_search_beats_printed_coloring() {
        let g = fixtures::example1_graph(Side::First);
        let e = search_folded_coloring(&g, 5, 2, g.marginal(), &opts(Mode::Exact)).unwrap();
        assert!(e.color_entropy / 2.0 <= 1.0838 + 1e-4);
        let e = search_folded_coloring(&g, 6, 3, g.marginal(), &opts(Mode::Exact)).unwrap();
        assert!(e.color_entropy / 3.0 <= 0.8537 + 1e-4);
    }

    #[test]
    fn unweighted_five_two_is_unique_rate() {
        let g = fixtures::example1_graph(Side::First).as_unweighted();
        let e = search_folded_coloring(&g, 5, 2, g.marginal(), &opts(Mode::Exact)).unwrap();
        assert!(
            (e.color_entropy / 2.0 - 1.15205).abs() < 1e-4,
            "{}",
            e.color_entropy / 2.0
        );
    }

    #[test]
    fn infeasible_palettes() {
        let c5 = cycle(5);
        let err = search_folded_coloring(&c5, 4, 2, c5.marginal(), &opts(Mode::Exact)).unwrap_err();
        assert!(matches!(err, Error::Infeasible { a: 4, b: 2, .. }));
        let err =
            search_folded_coloring(&c5, 4, 2, c5.marginal(), &opts(Mode::Heuristic)).unwrap_err();
        assert!(matches!(err, Error::Infeasible { a: 4, b: 2, .. }));
        assert!(matches!(
            search_folded_coloring(&c5, 1, 2, c5.marginal(), &opts(Mode::Exact)),
            Err(Error::Config(_))
        ));
    }

    #[test]
    fn single_vertex() {
        let g = Ewcg::unweighted(1, &[]).unwrap();
        let r = search_folded_coloring(&g, 1, 1, g.marginal(), &opts(Mode::Auto)).unwrap();
        assert_eq!(r.color_entropy, 0.0);
    }

    #[test]
    fn b_fold_chromatic_numbers() {
        let c5 = cycle(5);
        let b = Budgets::default();
        assert_eq!(b_fold_chromatic_number(&c5, 2, &b).unwrap(), 5);
        assert_eq!(b_fold_chromatic_number(&c5, 1, &b).unwrap(), 3);
        assert_eq!(b_fold_chromatic_number(&c5, 3, &b).unwrap(), 8);
        let empty = Ewcg::unweighted(3, &[]).unwrap();
        for k in 1..4 {
            assert_eq!(b_fold_chromatic_number(&empty, k, &b).unwrap(), k);
        }
    }

    #[test]
    fn heuristic_is_deterministic() {
        let g = fixtures::example1_graph(Side::First);
        let o = SearchOptions {
            mode: Mode::Heuristic,
            seed: 7,
            ..Default::default()
        };
        let x = search_folded_coloring(&g, 6, 3, g.marginal(), &o).unwrap();
        let y = search_folded_coloring(&g, 6, 3, g.marginal(), &o).unwrap();
        assert_eq!(x, y);
    }

    #[test]
    fn canonical_relabels_by_first_use() {
        assert_eq!(canonical(&[0b100, 0b001], 3), vec![0b001, 0b010]);
    }
}
