//! Fractional chromatic number as an exact rational linear program over the
//! maximal independent sets of a graph.

use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::Serialize;

use super::Budgets;
use crate::error::{Error, Result};
use crate::graph::Ewcg;

/// All maximal independent sets (adjacency = positive weight) as vertex
/// bitmasks, in increasing numeric order.
pub fn maximal_independent_sets(g: &Ewcg, budgets: &Budgets) -> Result<Vec<u64>> {
    let adj = g
        .adjacency_masks()
        .ok_or_else(|| Error::capacity("independent-set enumeration vertices", g.len(), 64))?;
    let nv = g.len();
    if nv == 0 {
        return Ok(Vec::new());
    }
    let all = if nv == 64 { u64::MAX } else { (1u64 << nv) - 1 };
    let comp: Vec<u64> = (0..nv).map(|v| all & !adj[v] & !(1 << v)).collect();
    let mut out = Vec::new();
    bron_kerbosch(&comp, 0, all, 0, &mut out, budgets.independent_sets)?;
    out.sort_unstable();
    Ok(out)
}

/// Maximal cliques of `comp` (= maximal independent sets of the original graph).
fn bron_kerbosch(
    comp: &[u64],
    r: u64,
    mut p: u64,
    mut x: u64,
    out: &mut Vec<u64>,
    limit: usize,
) -> Result<()> {
    if p == 0 && x == 0 {
        if out.len() >= limit {
            return Err(Error::capacity(
                "maximal independent sets",
                out.len() + 1,
                limit,
            ));
        }
        out.push(r);
        return Ok(());
    }
    let pivot = ones(p | x)
        .max_by_key(|&u| (p & comp[u]).count_ones())
        .expect("p or x is nonempty");
    for v in ones(p & !comp[pivot]).collect::<Vec<_>>() {
        bron_kerbosch(comp, r | 1 << v, p & comp[v], x & comp[v], out, limit)?;
        p &= !(1 << v);
        x |= 1 << v;
    }
    Ok(())
}

fn ones(s: u64) -> impl Iterator<Item = usize> {
    (0..64).filter(move |&i| s >> i & 1 == 1)
}

/// Optimal fractional coloring: weights on independent sets covering every
/// vertex at least once with least total weight.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FractionalCover {
    #[serde(serialize_with = "ser_ratio")]
    pub value: BigRational,
    /// Independent sets with positive weight.
    #[serde(serialize_with = "ser_cover")]
    pub sets: Vec<(u64, BigRational)>,
    /// Optimal vertex weights of the dual (fractional clique) program.
    #[serde(serialize_with = "ser_ratios")]
    pub vertex_weights: Vec<BigRational>,
}

fn ser_ratio<S: serde::Serializer>(r: &BigRational, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&r.to_string())
}

fn ser_ratios<S: serde::Serializer>(
    r: &[BigRational],
    s: S,
) -> std::result::Result<S::Ok, S::Error> {
    s.collect_seq(r.iter().map(|x| x.to_string()))
}

fn ser_cover<S: serde::Serializer>(
    r: &[(u64, BigRational)],
    s: S,
) -> std::result::Result<S::Ok, S::Error> {
    s.collect_seq(
        r.iter()
            .map(|(m, x)| (ones(*m).collect::<Vec<_>>(), x.to_string())),
    )
}

/// Solves `max Σ y_v  s.t.  Σ_{v∈I} y_v ≤ 1 for every maximal independent set I, y ≥ 0`
/// with a rational tableau simplex under Bland's rule. By duality its optimum is
/// the fractional chromatic number; the covering weights are read off the
/// reduced costs of the slack columns.
pub fn fractional_cover(g: &Ewcg, budgets: &Budgets) -> Result<FractionalCover> {
    let sets = maximal_independent_sets(g, budgets)?;
    let nv = g.len();
    let m = sets.len();
    if nv == 0 {
        return Ok(FractionalCover {
            value: BigRational::zero(),
            sets: Vec::new(),
            vertex_weights: Vec::new(),
        });
    }
    let zero = BigRational::zero();
    let one = BigRational::one();
    let cols = nv + m;
    // rows 0..m: constraints, each [coefficients.., rhs]
    let mut t: Vec<Vec<BigRational>> = sets
        .iter()
        .enumerate()
        .map(|(i, &s)| {
            let mut row = vec![zero.clone(); cols + 1];
            for v in ones(s) {
                row[v] = one.clone();
            }
            row[nv + i] = one.clone();
            row[cols] = one.clone();
            row
        })
        .collect();
    let mut obj = vec![zero.clone(); cols + 1];
    for x in obj.iter_mut().take(nv) {
        *x = -one.clone();
    }
    let mut basis: Vec<usize> = (nv..cols).collect();

    loop {
        let Some(enter) = (0..cols).find(|&j| obj[j].is_negative()) else {
            break;
        };
        let mut leave: Option<usize> = None;
        for i in 0..m {
            if t[i][enter].is_positive() {
                let ratio = &t[i][cols] / &t[i][enter];
                let better = match leave {
                    None => true,
                    Some(l) => {
                        let cur = &t[l][cols] / &t[l][enter];
                        ratio < cur || (ratio == cur && basis[i] < basis[l])
                    }
                };
                if better {
                    leave = Some(i);
                }
            }
        }
        let l = leave
            .ok_or_else(|| Error::Internal("fractional clique program is unbounded".into()))?;
        let piv = t[l][enter].clone();
        for x in t[l].iter_mut() {
            *x = &*x / &piv;
        }
        let prow = t[l].clone();
        for (i, row) in t.iter_mut().enumerate() {
            if i != l && !row[enter].is_zero() {
                let f = row[enter].clone();
                for (x, p) in row.iter_mut().zip(&prow) {
                    *x = &*x - &f * p;
                }
            }
        }
        let f = obj[enter].clone();
        for (x, p) in obj.iter_mut().zip(&prow) {
            *x = &*x - &f * p;
        }
        basis[l] = enter;
    }

    let value = obj[cols].clone();
    let mut vertex_weights = vec![zero.clone(); nv];
    for (i, &bv) in basis.iter().enumerate() {
        if bv < nv {
            vertex_weights[bv] = t[i][cols].clone();
        }
    }
    let cover = sets
        .iter()
        .enumerate()
        .filter(|(i, _)| obj[nv + i].is_positive())
        .map(|(i, &s)| (s, obj[nv + i].clone()))
        .collect();
    Ok(FractionalCover {
        value,
        sets: cover,
        vertex_weights,
    })
}

/// Fractional chromatic number of the unweighted support of `g`, exactly.
pub fn fractional_chromatic_number(g: &Ewcg, budgets: &Budgets) -> Result<BigRational> {
    Ok(fractional_cover(g, budgets)?.value)
}

/// `(numerator, denominator)` of a rational that fits in 64 bits.
pub fn ratio_parts(r: &BigRational) -> Option<(i64, i64)> {
    use num_traits::ToPrimitive;
    Some((r.numer().to_i64()?, r.denom().to_i64()?))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::graph::Side;

    fn rat(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    fn complete(n: usize) -> Ewcg {
        let mut e = Vec::new();
        for i in 0..n {
            for j in i + 1..n {
                e.push((i, j));
            }
        }
        Ewcg::unweighted(n, &e).unwrap()
    }

    #[test]
    fn example_base_graph() {
        let g = fixtures::example1_graph(Side::First);
        let b = Budgets::default();
        assert_eq!(maximal_independent_sets(&g, &b).unwrap().len(), 5);
        let c = fractional_cover(&g, &b).unwrap();
        assert_eq!(c.value, rat(5, 2));
        let total: BigRational = c.sets.iter().map(|(_, x)| x.clone()).sum();
        assert_eq!(total, c.value);
        for v in 0..5 {
            let covered: BigRational = c
                .sets
                .iter()
                .filter(|(s, _)| s >> v & 1 == 1)
                .map(|(_, x)| x.clone())
                .sum();
            assert!(covered >= BigRational::one());
        }
        let dual: BigRational = c.vertex_weights.iter().cloned().sum();
        assert_eq!(dual, c.value);
    }

    #[test]
    fn complete_graphs() {
        for n in 1..=6 {
            assert_eq!(
                fractional_chromatic_number(&complete(n), &Budgets::default()).unwrap(),
                rat(n as i64, 1)
            );
        }
    }

    #[test]
    fn edgeless_and_empty() {
        let g = Ewcg::unweighted(4, &[]).unwrap();
        assert_eq!(
            fractional_chromatic_number(&g, &Budgets::default()).unwrap(),
            rat(1, 1)
        );
    }

    #[test]
    fn mis_budget() {
        let g = Ewcg::unweighted(6, &[(0, 1), (2, 3), (4, 5)]).unwrap();
        let b = Budgets {
            independent_sets: 7,
            ..Default::default()
        };
        assert!(matches!(
            maximal_independent_sets(&g, &b),
            Err(Error::Capacity { .. })
        ));
        assert_eq!(
            maximal_independent_sets(&g, &Budgets::default())
                .unwrap()
                .len(),
            8
        );
    }

    #[test]
    fn ratio_parts_roundtrip() {
        assert_eq!(ratio_parts(&rat(25, 4)), Some((25, 4)));
    }
}
