//! Probability primitives: validated PMFs, joint PMFs, and Shannon entropy in bits.
//!
//! Inputs are checked against a fixed tolerance and are never renormalized
//! behind the caller's back; use [`Pmf::normalized`] when renormalization is
//! intended.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Tolerance for the total mass of a PMF.
pub const PMF_TOLERANCE: f64 = 1e-9;

/// `-p log2 p` with the convention `0 log 0 = 0`.
#[inline]
pub fn plogp(p: f64) -> f64 {
    if p > 0.0 {
        -p * p.log2()
    } else {
        0.0
    }
}

/// Entropy of an arbitrary nonnegative mass vector, without validation.
///
/// Used internally for partial color masses inside searches where the vector
/// is known to be well formed.
#[inline]
pub fn entropy_of(masses: &[f64]) -> f64 {
    masses.iter().copied().map(plogp).sum()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct Pmf {
    probs: Vec<f64>,
}

impl Pmf {
    pub fn new(probs: Vec<f64>) -> Result<Self> {
        if probs.is_empty() {
            return Err(Error::InvalidPmf("empty probability vector".into()));
        }
        for (i, &p) in probs.iter().enumerate() {
            if !p.is_finite() || p < 0.0 {
                return Err(Error::InvalidPmf(format!("entry {i} is {p}")));
            }
        }
        let sum: f64 = probs.iter().sum();
        if (sum - 1.0).abs() > PMF_TOLERANCE {
            return Err(Error::InvalidPmf(format!("entries sum to {sum}")));
        }
        Ok(Pmf { probs })
    }

    /// Rescales a nonnegative vector to unit mass. This is the only place where
    /// renormalization happens.
    pub fn normalized(weights: Vec<f64>) -> Result<Self> {
        let sum: f64 = weights.iter().sum();
        if !(sum > 0.0) || weights.iter().any(|w| !w.is_finite() || *w < 0.0) {
            return Err(Error::InvalidPmf(
                "cannot normalize: entries must be nonnegative with positive sum".into(),
            ));
        }
        Pmf::new(weights.into_iter().map(|w| w / sum).collect())
    }

    pub fn uniform(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidPmf("uniform over zero outcomes".into()));
        }
        Pmf::new(vec![1.0 / n as f64; n])
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn len(&self) -> usize {
        self.probs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.probs.is_empty()
    }

    pub fn support_size(&self) -> usize {
        self.probs.iter().filter(|&&p| p > 0.0).count()
    }

    /// Shannon entropy in bits.
    pub fn entropy(&self) -> f64 {
        entropy_of(&self.probs)
    }

    /// i.i.d. product over `n` coordinates, indexed in mixed radix with the
    /// first coordinate most significant.
    pub fn power(&self, n: usize) -> Result<Pmf> {
        let mut out = vec![1.0];
        for _ in 0..n {
            out = out
                .iter()
                .flat_map(|&a| self.probs.iter().map(move |&b| a * b))
                .collect();
        }
        Pmf::new(out)
    }
}

impl TryFrom<Vec<f64>> for Pmf {
    type Error = Error;
    fn try_from(v: Vec<f64>) -> Result<Self> {
        Pmf::new(v)
    }
}

impl From<Pmf> for Vec<f64> {
    fn from(p: Pmf) -> Self {
        p.probs
    }
}

/// Entropy of a validated PMF, in bits.
pub fn entropy(p: &Pmf) -> f64 {
    p.entropy()
}

/// Joint PMF of two finite sources. Rows index the first source, columns the second.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct JointPmf {
    row_alphabet: Vec<String>,
    col_alphabet: Vec<String>,
    matrix: Vec<Vec<f64>>,
}

impl JointPmf {
    pub fn new(
        row_alphabet: Vec<String>,
        col_alphabet: Vec<String>,
        matrix: Vec<Vec<f64>>,
    ) -> Result<Self> {
        if row_alphabet.is_empty() || col_alphabet.is_empty() {
            return Err(Error::InvalidPmf("empty alphabet".into()));
        }
        if matrix.len() != row_alphabet.len() {
            return Err(Error::InvalidPmf(format!(
                "matrix has {} rows but the first alphabet has {} symbols",
                matrix.len(),
                row_alphabet.len()
            )));
        }
        for (i, row) in matrix.iter().enumerate() {
            if row.len() != col_alphabet.len() {
                return Err(Error::InvalidPmf(format!(
                    "row {i} has {} entries but the second alphabet has {} symbols",
                    row.len(),
                    col_alphabet.len()
                )));
            }
            for (j, &p) in row.iter().enumerate() {
                if !p.is_finite() || p < 0.0 {
                    return Err(Error::InvalidPmf(format!("entry ({i},{j}) is {p}")));
                }
            }
        }
        let total: f64 = matrix.iter().flatten().sum();
        if (total - 1.0).abs() > PMF_TOLERANCE {
            return Err(Error::InvalidPmf(format!("joint entries sum to {total}")));
        }
        check_distinct(&row_alphabet)?;
        check_distinct(&col_alphabet)?;
        Ok(JointPmf {
            row_alphabet,
            col_alphabet,
            matrix,
        })
    }

    /// Joint PMF with alphabets `0..rows` and `0..cols` rendered as strings.
    pub fn from_matrix(matrix: Vec<Vec<f64>>) -> Result<Self> {
        let rows = matrix.len();
        let cols = matrix.first().map_or(0, Vec::len);
        JointPmf::new(
            (0..rows).map(|i| i.to_string()).collect(),
            (0..cols).map(|j| j.to_string()).collect(),
            matrix,
        )
    }

    /// Product distribution of two marginals.
    pub fn independent(
        row_alphabet: Vec<String>,
        p1: &Pmf,
        col_alphabet: Vec<String>,
        p2: &Pmf,
    ) -> Result<Self> {
        let matrix = p1
            .probs()
            .iter()
            .map(|&a| p2.probs().iter().map(|&b| a * b).collect())
            .collect();
        JointPmf::new(row_alphabet, col_alphabet, matrix)
    }

    pub fn rows(&self) -> usize {
        self.row_alphabet.len()
    }

    pub fn cols(&self) -> usize {
        self.col_alphabet.len()
    }

    pub fn row_alphabet(&self) -> &[String] {
        &self.row_alphabet
    }

    pub fn col_alphabet(&self) -> &[String] {
        &self.col_alphabet
    }

    pub fn matrix(&self) -> &[Vec<f64>] {
        &self.matrix
    }

    #[inline]
    pub fn p(&self, i: usize, j: usize) -> f64 {
        self.matrix[i][j]
    }

    pub fn transpose(&self) -> JointPmf {
        let matrix = (0..self.cols())
            .map(|j| (0..self.rows()).map(|i| self.matrix[i][j]).collect())
            .collect();
        JointPmf {
            row_alphabet: self.col_alphabet.clone(),
            col_alphabet: self.row_alphabet.clone(),
            matrix,
        }
    }

    pub fn row_marginal(&self) -> Pmf {
        Pmf {
            probs: self.matrix.iter().map(|r| r.iter().sum()).collect(),
        }
    }

    pub fn col_marginal(&self) -> Pmf {
        Pmf {
            probs: (0..self.cols())
                .map(|j| self.matrix.iter().map(|r| r[j]).sum())
                .collect(),
        }
    }

    pub fn joint_entropy(&self) -> f64 {
        self.matrix.iter().flatten().copied().map(plogp).sum()
    }

    /// H(row | col).
    pub fn conditional_entropy(&self) -> f64 {
        (self.joint_entropy() - self.col_marginal().entropy()).max(0.0)
    }

    pub fn row_index(&self, symbol: &str) -> Option<usize> {
        self.row_alphabet.iter().position(|s| s == symbol)
    }

    pub fn col_index(&self, symbol: &str) -> Option<usize> {
        self.col_alphabet.iter().position(|s| s == symbol)
    }
}

fn check_distinct(alphabet: &[String]) -> Result<()> {
    let mut seen = std::collections::HashSet::new();
    for s in alphabet {
        if !seen.insert(s) {
            return Err(Error::InvalidPmf(format!("duplicate symbol {s:?}")));
        }
    }
    Ok(())
}

/// Row and column marginals.
pub fn marginals(j: &JointPmf) -> (Pmf, Pmf) {
    (j.row_marginal(), j.col_marginal())
}

/// H(row | col) in bits.
pub fn conditional_entropy(j: &JointPmf) -> f64 {
    j.conditional_entropy()
}
