//! Test-side oracles written independently of the library algorithms.
#![allow(dead_code)]

use ewcg::graph::{Ewcg, FunctionTable, Side};
use ewcg::prob::{JointPmf, Pmf};
use rand::Rng;

pub fn entropy(p: &[f64]) -> f64 {
    p.iter().filter(|&&x| x > 0.0).map(|&x| -x * x.log2()).sum()
}

/// Bitmasks of all `b`-subsets of `0..a`.
pub fn subsets(a: usize, b: usize) -> Vec<u64> {
    (0u64..1 << a)
        .filter(|m| m.count_ones() as usize == b)
        .collect()
}

fn needed(w: f64, b: usize) -> usize {
    (w * b as f64 - 1e-9).ceil().max(0.0) as usize
}

/// Minimum color-PMF entropy over every valid a:b coloring, by enumeration.
/// Vertex 0 is pinned to colors `0..b`, which loses nothing since relabeling
/// colors preserves both validity and entropy.
pub fn brute_force_folded(g: &Ewcg, a: usize, b: usize, p: &[f64]) -> Option<f64> {
    let nv = g.len();
    if nv == 0 {
        return Some(0.0);
    }
    if a < b {
        return None;
    }
    let mut req = vec![vec![0usize; nv]; nv];
    for ((u, v), w) in g.edges() {
        req[u][v] = needed(w.normalized, b);
        req[v][u] = req[u][v];
    }
    let sets = subsets(a, b);
    let mut assign = vec![0u64; nv];
    assign[0] = (1u64 << b) - 1;
    let mut best: Option<f64> = None;

    fn go(
        v: usize,
        assign: &mut Vec<u64>,
        sets: &[u64],
        req: &[Vec<usize>],
        p: &[f64],
        a: usize,
        b: usize,
        best: &mut Option<f64>,
    ) {
        let nv = assign.len();
        if v == nv {
            let mut mass = vec![0.0; a];
            for (u, &m) in assign.iter().enumerate() {
                for (c, slot) in mass.iter_mut().enumerate() {
                    if m >> c & 1 == 1 {
                        *slot += p[u] / b as f64;
                    }
                }
            }
            let h = entropy(&mass);
            if best.is_none_or(|x| h < x) {
                *best = Some(h);
            }
            return;
        }
        for &s in sets {
            let ok = (0..v).all(|u| b - (s & assign[u]).count_ones() as usize >= req[u][v]);
            if ok {
                assign[v] = s;
                go(v + 1, assign, sets, req, p, a, b, best);
            }
        }
    }
    go(1, &mut assign, &sets, &req, p, a, b, &mut best);
    best
}

/// Whether each edge's endpoints differ in enough colors.
pub fn folded_valid(g: &Ewcg, b: usize, sets: &[Vec<usize>]) -> bool {
    g.edges().all(|((u, v), w)| {
        let shared = sets[u].iter().filter(|c| sets[v].contains(c)).count();
        b - shared >= needed(w.normalized, b)
    })
}

/// Maximal independent sets by checking every vertex subset.
pub fn maximal_independent_sets(nv: usize, edges: &[(usize, usize)]) -> Vec<u64> {
    let adj = |m: u64| {
        edges
            .iter()
            .any(|&(u, v)| m >> u & 1 == 1 && m >> v & 1 == 1)
    };
    (1u64..1 << nv)
        .filter(|&m| !adj(m))
        .filter(|&m| (0..nv).all(|v| m >> v & 1 == 1 || adj(m | 1 << v)))
        .collect()
}

/// Solves a square system by Gaussian elimination with partial pivoting.
fn solve(mut a: Vec<Vec<f64>>, mut rhs: Vec<f64>) -> Option<Vec<f64>> {
    let n = rhs.len();
    for col in 0..n {
        let piv = (col..n).max_by(|&i, &k| a[i][col].abs().total_cmp(&a[k][col].abs()))?;
        if a[piv][col].abs() < 1e-10 {
            return None;
        }
        a.swap(col, piv);
        rhs.swap(col, piv);
        for r in 0..n {
            if r != col {
                let f = a[r][col] / a[col][col];
                if f != 0.0 {
                    for c in col..n {
                        a[r][c] -= f * a[col][c];
                    }
                    rhs[r] -= f * rhs[col];
                }
            }
        }
    }
    Some((0..n).map(|i| rhs[i] / a[i][i]).collect())
}

/// Fractional chromatic number as the best vertex of the fractional clique
/// polytope `{y ≥ 0 : Σ_{v∈I} y_v ≤ 1 for each maximal independent set I}`,
/// found by trying every choice of `nv` tight constraints.
pub fn fractional_chromatic_by_vertices(nv: usize, edges: &[(usize, usize)]) -> f64 {
    let mis = maximal_independent_sets(nv, edges);
    // constraint rows: independent sets first, then y_v ≥ 0
    let mut rows: Vec<(Vec<f64>, f64)> = mis
        .iter()
        .map(|&m| ((0..nv).map(|v| (m >> v & 1) as f64).collect(), 1.0))
        .collect();
    for v in 0..nv {
        let mut e = vec![0.0; nv];
        e[v] = 1.0;
        rows.push((e, 0.0));
    }
    let feasible = |y: &[f64]| {
        y.iter().all(|&x| x >= -1e-9)
            && mis.iter().all(|&m| {
                (0..nv)
                    .filter(|v| m >> v & 1 == 1)
                    .map(|v| y[v])
                    .sum::<f64>()
                    <= 1.0 + 1e-9
            })
    };
    let mut best = 0.0f64;
    let mut pick: Vec<usize> = (0..nv).collect();
    loop {
        let a = pick.iter().map(|&i| rows[i].0.clone()).collect();
        let rhs = pick.iter().map(|&i| rows[i].1).collect();
        if let Some(y) = solve(a, rhs) {
            if feasible(&y) {
                best = best.max(y.iter().sum());
            }
        }
        // next combination in lexicographic order
        let m = rows.len();
        let mut i = nv;
        while i > 0 && pick[i - 1] == m - nv + i - 1 {
            i -= 1;
        }
        if i == 0 {
            return best;
        }
        pick[i - 1] += 1;
        for k in i..nv {
            pick[k] = pick[k - 1] + 1;
        }
    }
}

pub fn cycle(n: usize) -> Vec<(usize, usize)> {
    (0..n).map(|i| (i, (i + 1) % n)).collect()
}

pub fn complete(n: usize) -> Vec<(usize, usize)> {
    (0..n)
        .flat_map(|i| (i + 1..n).map(move |j| (i, j)))
        .collect()
}

pub fn petersen() -> Vec<(usize, usize)> {
    let mut e = Vec::new();
    for i in 0..5 {
        e.push((i, (i + 1) % 5));
        e.push((i, i + 5));
        e.push((i + 5, (i + 2) % 5 + 5));
    }
    e
}

/// Random weighted graph on `nv` vertices with weights in eighths.
pub fn random_graph(rng: &mut impl Rng, nv: usize, density: f64) -> (Ewcg, Vec<f64>) {
    let mut raw = Vec::new();
    for u in 0..nv {
        for v in u + 1..nv {
            if rng.random_bool(density) {
                raw.push(((u, v), rng.random_range(1..=8) as f64 / 8.0));
            }
        }
    }
    let p = Pmf::normalized((0..nv).map(|_| rng.random_range(0.05..1.0)).collect()).unwrap();
    let probs = p.probs().to_vec();
    let g = Ewcg::from_raw(
        (0..nv).map(|i| i.to_string()).collect(),
        p,
        raw,
        1,
        Side::First,
    )
    .unwrap();
    (g, probs)
}

/// Random joint source on `k1 × k2` symbols with about 40% zero entries and a
/// random function table with outputs in `0..3`. Every row and column keeps
/// positive mass.
pub fn random_instance(rng: &mut impl Rng, k1: usize, k2: usize) -> (JointPmf, FunctionTable) {
    let mut m: Vec<Vec<f64>> = (0..k1)
        .map(|_| {
            (0..k2)
                .map(|_| {
                    if rng.random_bool(0.4) {
                        0.0
                    } else {
                        rng.random_range(0.05..1.0)
                    }
                })
                .collect()
        })
        .collect();
    for i in 0..k1.max(k2) {
        let (r, c) = (i % k1, i % k2);
        if m[r][c] == 0.0 {
            m[r][c] = rng.random_range(0.05..1.0);
        }
    }
    let total: f64 = m.iter().flatten().sum();
    m.iter_mut().flatten().for_each(|x| *x /= total);
    let j = JointPmf::from_matrix(m).unwrap();
    let outputs: Vec<Vec<String>> = (0..k1)
        .map(|_| {
            (0..k2)
                .map(|_| rng.random_range(0..3).to_string())
                .collect()
        })
        .collect();
    let f = FunctionTable::new(outputs).unwrap();
    (j, f)
}

/// Direct definition of the power-graph weight of `(u, w)` under the exact
/// rule: total probability of `(u, v)` and `(w, v)` over every block `v` with
/// a coordinate where both symbols are jointly possible with `v_k` and `f`
/// tells them apart. The counting rule counts such `v` instead, among blocks
/// whose coordinates are neighbors of `u_k` or `w_k`.
pub fn power_weight(
    j: &JointPmf,
    f: &FunctionTable,
    n: usize,
    u: &[usize],
    w: &[usize],
    counting: bool,
) -> f64 {
    let cols = j.cols();
    let blocks = cols.pow(n as u32);
    let mut total = 0.0;
    for idx in 0..blocks {
        let v: Vec<usize> = (0..n)
            .rev()
            .map(|k| idx / cols.pow(k as u32) % cols)
            .collect();
        let dist = (0..n).any(|k| {
            j.p(u[k], v[k]) > 0.0
                && j.p(w[k], v[k]) > 0.0
                && f.eval(u[k], v[k]) != f.eval(w[k], v[k])
        });
        if !dist {
            continue;
        }
        if counting {
            if (0..n).all(|k| j.p(u[k], v[k]) > 0.0 || j.p(w[k], v[k]) > 0.0) {
                total += 1.0;
            }
        } else {
            let pu: f64 = (0..n).map(|k| j.p(u[k], v[k])).product();
            let pw: f64 = (0..n).map(|k| j.p(w[k], v[k])).product();
            total += pu + pw;
        }
    }
    total
}
