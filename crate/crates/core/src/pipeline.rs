//! End-to-end simulation: two encoders send color sets of their n-blocks,
//! optionally compressed by random linear binning, and the decoder recovers
//! `f` through a lookup table on the pair of color sets.

use std::collections::BTreeMap;

use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::coloring::FoldedColoring;
use crate::error::{Error, Result};
use crate::graph::{digits, joint_power, FunctionTable};
use crate::prob::{entropy_of, JointPmf};
use crate::rates::{self, class_outputs, joint_color_pmf_blocks, CodingPlan, PlanOptions};

/// Function value for every positive-probability pair of color sets.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LookupTable {
    entries: BTreeMap<(Vec<usize>, Vec<usize>), String>,
}

impl LookupTable {
    pub fn get(&self, s1: &[usize], s2: &[usize]) -> Option<&str> {
        self.entries
            .get(&(s1.to_vec(), s2.to_vec()))
            .map(String::as_str)
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&(Vec<usize>, Vec<usize>), &str)> {
        self.entries.iter().map(|(k, v)| (k, v.as_str()))
    }
}

pub(crate) fn build_lookup_blocks(
    jn: &JointPmf,
    fnn: &FunctionTable,
    c1: &FoldedColoring,
    c2: &FoldedColoring,
) -> Result<LookupTable> {
    match class_outputs(c1, c2, jn, fnn)? {
        Ok(entries) => Ok(LookupTable { entries }),
        Err(w) => Err(Error::Ambiguous(Box::new(w))),
    }
}

/// Lookup table for n-blocks; fails with a witness if some joint color class is ambiguous.
pub fn build_lookup(
    j: &JointPmf,
    f: &FunctionTable,
    c1: &FoldedColoring,
    c2: &FoldedColoring,
    n: usize,
) -> Result<LookupTable> {
    build_lookup_blocks(&joint_power(j, n)?, &f.power(n), c1, c2)
}

/// Maps each n-block of `x_seq` to its color set.
pub fn encode<S: AsRef<str>>(
    x_seq: &[S],
    alphabet: &[String],
    c: &FoldedColoring,
    n: usize,
) -> Result<Vec<Vec<usize>>> {
    if n == 0 {
        return Err(Error::Config("block length must be at least 1".into()));
    }
    if x_seq.len() % n != 0 {
        return Err(Error::Input(format!(
            "sequence length {} is not a multiple of the block length {n}",
            x_seq.len()
        )));
    }
    let q = alphabet.len();
    if q.checked_pow(n as u32) != Some(c.len()) {
        return Err(Error::Structural(format!(
            "coloring has {} vertices, expected {q}^{n}",
            c.len()
        )));
    }
    let idx: Vec<usize> = x_seq
        .iter()
        .map(|s| {
            alphabet
                .iter()
                .position(|a| a == s.as_ref())
                .ok_or_else(|| {
                    Error::Input(format!("symbol {:?} is not in the alphabet", s.as_ref()))
                })
        })
        .collect::<Result<_>>()?;
    Ok(idx
        .chunks(n)
        .map(|block| c.color_set(block.iter().fold(0, |acc, &x| acc * q + x)))
        .collect())
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Decoded {
    /// Function value per block, `None` where the color pair is not in the table.
    pub outputs: Vec<Option<String>>,
    pub errors: usize,
}

/// Per-block table lookup. Pairs missing from the table are counted, not fatal.
pub fn decode(
    colors1: &[Vec<usize>],
    colors2: &[Vec<usize>],
    table: &LookupTable,
) -> Result<Decoded> {
    if colors1.len() != colors2.len() {
        return Err(Error::Input(format!(
            "color streams have different lengths {} and {}",
            colors1.len(),
            colors2.len()
        )));
    }
    let outputs: Vec<Option<String>> = colors1
        .iter()
        .zip(colors2)
        .map(|(a, b)| table.get(a, b).map(str::to_string))
        .collect();
    let errors = outputs.iter().filter(|o| o.is_none()).count();
    Ok(Decoded { outputs, errors })
}

/// Rates in bits per source symbol and the number of n-blocks hashed together.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Binning {
    pub r1: f64,
    pub r2: f64,
    pub blocklength: usize,
}

impl std::str::FromStr for Binning {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let parts: Vec<&str> = s.split(',').map(str::trim).collect();
        let bad = || Error::Config(format!("binning must be R1,R2,L, got {s:?}"));
        if parts.len() != 3 {
            return Err(bad());
        }
        Ok(Binning {
            r1: parts[0].parse().map_err(|_| bad())?,
            r2: parts[1].parse().map_err(|_| bad())?,
            blocklength: parts[2].parse().map_err(|_| bad())?,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimOptions {
    pub plan: PlanOptions,
    pub num_blocks: usize,
    pub seed: u64,
    pub binning: Option<Binning>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BinningResult {
    pub r1: f64,
    pub r2: f64,
    pub blocklength: usize,
    pub sequences: usize,
    pub sequence_errors: usize,
    /// Fraction of hashed sequences not recovered exactly.
    pub error_rate: f64,
    /// Hash rows (field elements sent per sequence) for each side; `None` when sent uncompressed.
    pub hash_rows: (Option<usize>, Option<usize>),
    pub field_primes: (u64, u64),
    pub decoder: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimResult {
    pub n: usize,
    pub b: usize,
    pub a_1: usize,
    pub a_2: usize,
    /// Number of n-blocks drawn.
    pub samples: usize,
    pub decode_errors: usize,
    /// Empirical entropy of each side's color-set stream, bits per source symbol.
    pub empirical_rate_1: f64,
    pub empirical_rate_2: f64,
    pub set_counts_1: Vec<(Vec<usize>, u64)>,
    pub set_counts_2: Vec<(Vec<usize>, u64)>,
    pub binning: Option<BinningResult>,
    pub seed: u64,
}

impl SimResult {
    pub fn binning_error_rate(&self) -> Option<f64> {
        self.binning.as_ref().map(|b| b.error_rate)
    }
}

pub(crate) fn mix_seed(seed: u64, stream: u64) -> u64 {
    let mut z = seed ^ stream.wrapping_mul(0x9E37_79B9_7F4A_7C15) ^ 0xD1B5_4A32_D192_ED03;
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

const BATCH: usize = 4096;

/// Per-block context shared by all batches.
struct Channel<'a> {
    plan: &'a CodingPlan,
    sampler: WeightedIndex<f64>,
    cols: usize,
    class_1: Vec<usize>,
    class_2: Vec<usize>,
    q1: usize,
    q2: usize,
    /// `table[s1 * q2 + s2]` = output index for positive classes
    table: Vec<Option<String>>,
    /// joint probability of each pair of set symbols
    pair_p: Vec<f64>,
}

impl<'a> Channel<'a> {
    fn new(plan: &'a CodingPlan) -> Result<Self> {
        let jn = &plan.joint;
        let table = build_lookup_blocks(jn, &plan.function, plan.coloring_1(), &plan.coloring_2)?;
        let jc = joint_color_pmf_blocks(plan.coloring_1(), &plan.coloring_2, jn)?;
        let (q1, q2) = (jc.sets_1.len(), jc.sets_2.len());
        let mut flat = vec![None; q1 * q2];
        for ((s1, s2), out) in table.iter() {
            let r = jc.sets_1.binary_search(s1).expect("set is a class");
            let c = jc.sets_2.binary_search(s2).expect("set is a class");
            flat[r * q2 + c] = Some(out.to_string());
        }
        let pair_p = (0..q1 * q2).map(|i| jc.pmf.p(i / q2, i % q2)).collect();
        let weights: Vec<f64> = jn.matrix().iter().flatten().copied().collect();
        let sampler = WeightedIndex::new(&weights)
            .map_err(|e| Error::Internal(format!("block sampler: {e}")))?;
        Ok(Channel {
            plan,
            sampler,
            cols: jn.cols(),
            class_1: jc.class_1,
            class_2: jc.class_2,
            q1,
            q2,
            table: flat,
            pair_p,
        })
    }

    fn draw(&self, rng: &mut ChaCha8Rng) -> (usize, usize) {
        let i = self.sampler.sample(rng);
        (i / self.cols, i % self.cols)
    }

    fn correct(&self, x1: usize, x2: usize, s1: usize, s2: usize) -> bool {
        self.table[s1 * self.q2 + s2].as_deref() == Some(self.plan.function.eval(x1, x2))
    }
}

#[derive(Default)]
struct Tally {
    blocks: usize,
    errors: usize,
    counts_1: Vec<u64>,
    counts_2: Vec<u64>,
    sequences: usize,
    sequence_errors: usize,
}

impl Tally {
    fn new(q1: usize, q2: usize) -> Self {
        Tally {
            counts_1: vec![0; q1],
            counts_2: vec![0; q2],
            ..Default::default()
        }
    }

    fn merge(mut self, o: Tally) -> Tally {
        self.blocks += o.blocks;
        self.errors += o.errors;
        self.sequences += o.sequences;
        self.sequence_errors += o.sequence_errors;
        for (x, y) in self.counts_1.iter_mut().zip(o.counts_1) {
            *x += y;
        }
        for (x, y) in self.counts_2.iter_mut().zip(o.counts_2) {
            *x += y;
        }
        self
    }
}

/// Builds the coding plan for `j, f` and simulates it.
pub fn simulate(j: &JointPmf, f: &FunctionTable, opts: &SimOptions) -> Result<SimResult> {
    let plan = rates::plan(j, f, &opts.plan)?;
    simulate_plan(
        &plan,
        opts.num_blocks,
        opts.seed,
        opts.binning,
        &opts.plan.search.budgets,
    )
}

fn log2_binomial(a: usize, b: usize) -> f64 {
    (0..b)
        .map(|i| ((a - i) as f64 / (i + 1) as f64).log2())
        .sum()
}

/// Simulates a prepared plan over `num_blocks` i.i.d. n-blocks.
pub fn simulate_plan(
    plan: &CodingPlan,
    num_blocks: usize,
    seed: u64,
    binning: Option<Binning>,
    budgets: &crate::coloring::Budgets,
) -> Result<SimResult> {
    let ch = Channel::new(plan)?;
    let (a1, a2) = (plan.coloring_1().a(), plan.coloring_2.a());
    let n = plan.n;

    let tally = match binning {
        None => {
            let batches = num_blocks.div_ceil(BATCH);
            (0..batches)
                .into_par_iter()
                .map(|bi| {
                    let mut rng = ChaCha8Rng::seed_from_u64(mix_seed(seed, bi as u64));
                    let len = BATCH.min(num_blocks - bi * BATCH);
                    let mut t = Tally::new(ch.q1, ch.q2);
                    for _ in 0..len {
                        let (x1, x2) = ch.draw(&mut rng);
                        let (s1, s2) = (ch.class_1[x1], ch.class_2[x2]);
                        t.counts_1[s1] += 1;
                        t.counts_2[s2] += 1;
                        t.blocks += 1;
                        if !ch.correct(x1, x2, s1, s2) {
                            t.errors += 1;
                        }
                    }
                    t
                })
                .collect::<Vec<_>>()
                .into_iter()
                .fold(Tally::new(ch.q1, ch.q2), Tally::merge)
        }
        Some(bin) => {
            for (r, a) in [(bin.r1, a1), (bin.r2, a2)] {
                let max = log2_binomial(a, plan.b) / n as f64;
                if !(r >= 0.0) || r > max + 1e-12 {
                    return Err(Error::Config(format!(
                        "rate {r} outside [0, {max:.4}] bits per symbol"
                    )));
                }
            }
            if bin.blocklength == 0 || num_blocks < bin.blocklength {
                return Err(Error::Config(format!(
                    "need at least one sequence of {} blocks, got {num_blocks} blocks",
                    bin.blocklength
                )));
            }
            let sequences = num_blocks / bin.blocklength;
            let results: Vec<Result<Tally>> = (0..sequences)
                .into_par_iter()
                .map(|si| binned_sequence(&ch, bin, seed, si, budgets.decoder_candidates))
                .collect();
            let mut t = Tally::new(ch.q1, ch.q2);
            for r in results {
                t = t.merge(r?);
            }
            t
        }
    };

    let rate = |counts: &[u64]| {
        let total: u64 = counts.iter().sum();
        if total == 0 {
            return 0.0;
        }
        entropy_of(
            &counts
                .iter()
                .map(|&c| c as f64 / total as f64)
                .collect::<Vec<_>>(),
        ) / n as f64
    };
    let jc = joint_color_pmf_blocks(plan.coloring_1(), &plan.coloring_2, &plan.joint)?;
    let binning_result = binning.map(|bin| {
        let (k1, p1) = hash_shape(bin.r1, n, bin.blocklength, ch.q1);
        let (k2, p2) = hash_shape(bin.r2, n, bin.blocklength, ch.q2);
        BinningResult {
            r1: bin.r1,
            r2: bin.r2,
            blocklength: bin.blocklength,
            sequences: tally.sequences,
            sequence_errors: tally.sequence_errors,
            error_rate: tally.sequence_errors as f64 / tally.sequences.max(1) as f64,
            hash_rows: (k1, k2),
            field_primes: (p1, p2),
            decoder: "random linear hash per side; minimum empirical joint entropy over both cosets, ties counted as errors".into(),
        }
    });
    Ok(SimResult {
        n,
        b: plan.b,
        a_1: a1,
        a_2: a2,
        samples: tally.blocks,
        decode_errors: tally.errors,
        empirical_rate_1: rate(&tally.counts_1),
        empirical_rate_2: rate(&tally.counts_2),
        set_counts_1: jc
            .sets_1
            .iter()
            .cloned()
            .zip(tally.counts_1.iter().copied())
            .collect(),
        set_counts_2: jc
            .sets_2
            .iter()
            .cloned()
            .zip(tally.counts_2.iter().copied())
            .collect(),
        binning: binning_result,
        seed,
    })
}

fn smallest_prime_at_least(q: usize) -> u64 {
    let mut p = q.max(2) as u64;
    while !(2..).take_while(|d: &u64| d * d <= p).all(|d| p % d != 0) {
        p += 1;
    }
    p
}

/// Hash rows and field size for one side; `None` rows means uncompressed.
fn hash_shape(rate: f64, n: usize, len: usize, q: usize) -> (Option<usize>, u64) {
    let p = smallest_prime_at_least(q);
    if q <= 1 || rate * n as f64 >= (q as f64).log2() {
        return (None, p);
    }
    let bits = rate * (n * len) as f64;
    let k = ((bits / (p as f64).log2()) - 1e-9).ceil().max(0.0) as usize;
    (Some(k.min(len)), p)
}

fn pow_mod(mut b: u64, mut e: u64, p: u64) -> u64 {
    let mut r = 1;
    b %= p;
    while e > 0 {
        if e & 1 == 1 {
            r = r * b % p;
        }
        b = b * b % p;
        e >>= 1;
    }
    r
}

/// All sequences over `{0..q}` with `h·x = s (mod p)`.
fn coset(
    h: &[Vec<u64>],
    s: &[u64],
    p: u64,
    q: usize,
    len: usize,
    budget: usize,
) -> Result<Vec<Vec<usize>>> {
    let mut rows: Vec<Vec<u64>> = h
        .iter()
        .zip(s)
        .map(|(r, &si)| {
            let mut row = r.clone();
            row.push(si);
            row
        })
        .collect();
    let mut pivots = Vec::new();
    let mut rank = 0;
    for col in 0..len {
        let Some(pr) = (rank..rows.len()).find(|&r| rows[r][col] != 0) else {
            continue;
        };
        rows.swap(rank, pr);
        let inv = pow_mod(rows[rank][col], p - 2, p);
        for x in rows[rank].iter_mut() {
            *x = *x * inv % p;
        }
        let prow = rows[rank].clone();
        for (r, row) in rows.iter_mut().enumerate() {
            if r != rank && row[col] != 0 {
                let f = row[col];
                for (x, &y) in row.iter_mut().zip(&prow) {
                    *x = (*x + p * p - f * y % p) % p;
                }
            }
        }
        pivots.push(col);
        rank += 1;
    }
    if rows[rank..].iter().any(|r| r[len] != 0) {
        return Ok(Vec::new());
    }
    let free: Vec<usize> = (0..len).filter(|c| !pivots.contains(c)).collect();
    let total = (p as f64).powi(free.len() as i32);
    if total > budget as f64 {
        return Err(Error::capacity(
            "binning decoder coset size",
            total.min(usize::MAX as f64) as usize,
            budget,
        ));
    }
    let mut out = Vec::new();
    let mut assign = vec![0u64; free.len()];
    loop {
        let mut x = vec![0u64; len];
        for (&c, &v) in free.iter().zip(&assign) {
            x[c] = v;
        }
        for (r, &pc) in pivots.iter().enumerate() {
            let mut v = rows[r][len];
            for (&c, &fv) in free.iter().zip(&assign) {
                v = (v + p * p - rows[r][c] * fv % p) % p;
            }
            x[pc] = v;
        }
        if x.iter().all(|&v| (v as usize) < q) {
            out.push(x.into_iter().map(|v| v as usize).collect());
        }
        // next assignment of the free variables
        let mut i = 0;
        while i < assign.len() {
            assign[i] += 1;
            if assign[i] < p {
                break;
            }
            assign[i] = 0;
            i += 1;
        }
        if i == assign.len() {
            break;
        }
    }
    Ok(out)
}

struct Side<'a> {
    truth: &'a [usize],
    rows: Option<usize>,
    p: u64,
    q: usize,
}

fn candidates(side: &Side<'_>, rng: &mut ChaCha8Rng, budget: usize) -> Result<Vec<Vec<usize>>> {
    let Some(k) = side.rows else {
        return Ok(vec![side.truth.to_vec()]);
    };
    let len = side.truth.len();
    let h: Vec<Vec<u64>> = (0..k)
        .map(|_| (0..len).map(|_| rng.random_range(0..side.p)).collect())
        .collect();
    let s: Vec<u64> = h
        .iter()
        .map(|row| {
            row.iter()
                .zip(side.truth)
                .fold(0, |acc, (&a, &x)| (acc + a * x as u64) % side.p)
        })
        .collect();
    coset(&h, &s, side.p, side.q, len, budget)
}

fn binned_sequence(
    ch: &Channel<'_>,
    bin: Binning,
    seed: u64,
    si: usize,
    budget: usize,
) -> Result<Tally> {
    let mut rng = ChaCha8Rng::seed_from_u64(mix_seed(seed, (1 << 40) + si as u64));
    let len = bin.blocklength;
    let blocks: Vec<(usize, usize)> = (0..len).map(|_| ch.draw(&mut rng)).collect();
    let t1: Vec<usize> = blocks.iter().map(|&(x1, _)| ch.class_1[x1]).collect();
    let t2: Vec<usize> = blocks.iter().map(|&(_, x2)| ch.class_2[x2]).collect();
    let n = ch.plan.n;
    let (k1, p1) = hash_shape(bin.r1, n, len, ch.q1);
    let (k2, p2) = hash_shape(bin.r2, n, len, ch.q2);
    let c1 = candidates(
        &Side {
            truth: &t1,
            rows: k1,
            p: p1,
            q: ch.q1,
        },
        &mut rng,
        budget,
    )?;
    let c2 = candidates(
        &Side {
            truth: &t2,
            rows: k2,
            p: p2,
            q: ch.q2,
        },
        &mut rng,
        budget,
    )?;
    if (c1.len() as f64) * (c2.len() as f64) > budget as f64 {
        return Err(Error::capacity(
            "binning decoder candidate pairs",
            c1.len().saturating_mul(c2.len()),
            budget,
        ));
    }

    let mut best: Option<(f64, usize, usize)> = None;
    let mut tied = false;
    let mut counts = vec![0u32; ch.q1 * ch.q2];
    for (i, x1) in c1.iter().enumerate() {
        for (k, x2) in c2.iter().enumerate() {
            if x1
                .iter()
                .zip(x2)
                .any(|(&a, &b)| ch.pair_p[a * ch.q2 + b] <= 0.0)
            {
                continue;
            }
            counts.iter_mut().for_each(|c| *c = 0);
            for (&a, &b) in x1.iter().zip(x2) {
                counts[a * ch.q2 + b] += 1;
            }
            let h: f64 = counts
                .iter()
                .filter(|&&c| c > 0)
                .map(|&c| {
                    let f = c as f64 / len as f64;
                    -f * f.log2()
                })
                .sum();
            match best {
                Some((bh, _, _)) if (h - bh).abs() <= 1e-12 => tied = true,
                Some((bh, _, _)) if h > bh => {}
                _ => {
                    best = Some((h, i, k));
                    tied = false;
                }
            }
        }
    }

    let mut t = Tally::new(ch.q1, ch.q2);
    t.sequences = 1;
    t.blocks = len;
    for (&a, &b) in t1.iter().zip(&t2) {
        t.counts_1[a] += 1;
        t.counts_2[b] += 1;
    }
    let decoded = match best {
        Some((_, i, k)) if !tied => Some((&c1[i], &c2[k])),
        _ => None,
    };
    match decoded {
        Some((d1, d2)) => {
            if d1 != &t1 || d2 != &t2 {
                t.sequence_errors = 1;
            }
            for (pos, &(x1, x2)) in blocks.iter().enumerate() {
                if !ch.correct(x1, x2, d1[pos], d2[pos]) {
                    t.errors += 1;
                }
            }
        }
        None => {
            t.sequence_errors = 1;
            t.errors = len;
        }
    }
    Ok(t)
}

/// Source symbols of block index `x` at block length `n`.
pub fn block_symbols(x: usize, alphabet: &[String], n: usize) -> Vec<String> {
    digits(x, alphabet.len(), n)
        .into_iter()
        .map(|i| alphabet[i].clone())
        .collect()
}
