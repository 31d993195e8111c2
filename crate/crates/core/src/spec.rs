//! Problem specifications: a joint source, the function to compute, and run options.

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::coloring::{Budgets, Mode, SearchOptions};
use crate::error::{Error, Result};
use crate::graph::{FunctionTable, Rule};
use crate::prob::JointPmf;
use crate::rates::PlanOptions;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Builtin {
    /// `f(x1, x2) = x1`
    First,
    /// `x1 + x2` on integer symbols
    Sum,
    /// `(x1 + x2) mod k` on integer symbols
    ModuloK,
    /// `x1 · x2` on integer symbols
    Product,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum FunctionSpec {
    Builtin {
        builtin: Builtin,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        k: Option<i64>,
    },
    Table {
        table: Vec<Vec<String>>,
    },
}

fn one() -> usize {
    1
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpecOptions {
    #[serde(default = "one")]
    pub n: usize,
    #[serde(default = "one")]
    pub b: usize,
    #[serde(default)]
    pub a: Option<usize>,
    #[serde(default)]
    pub mode: Mode,
    #[serde(default)]
    pub rule: Rule,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub budgets: Budgets,
}

impl Default for SpecOptions {
    fn default() -> Self {
        SpecOptions {
            n: 1,
            b: 1,
            a: None,
            mode: Mode::Auto,
            rule: Rule::Exact,
            seed: 0,
            budgets: Budgets::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemSpec {
    pub alphabet_1: Vec<String>,
    pub alphabet_2: Vec<String>,
    pub joint_pmf: Vec<Vec<f64>>,
    pub function: FunctionSpec,
    #[serde(default)]
    pub options: SpecOptions,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub notes: Option<String>,
}

fn int_symbol(s: &str) -> Result<i64> {
    s.trim()
        .parse()
        .map_err(|_| Error::Config(format!("builtin needs integer symbols, got {s:?}")))
}

impl ProblemSpec {
    pub fn from_json(text: &str) -> Result<Self> {
        let spec: ProblemSpec =
            serde_json::from_str(text).map_err(|e| Error::Input(format!("malformed spec: {e}")))?;
        spec.joint()?;
        spec.function_table()?;
        Ok(spec)
    }

    pub fn joint(&self) -> Result<JointPmf> {
        JointPmf::new(
            self.alphabet_1.clone(),
            self.alphabet_2.clone(),
            self.joint_pmf.clone(),
        )
    }

    pub fn function_table(&self) -> Result<FunctionTable> {
        let (r, c) = (self.alphabet_1.len(), self.alphabet_2.len());
        match &self.function {
            FunctionSpec::Table { table } => {
                if table.len() != r || table.iter().any(|row| row.len() != c) {
                    return Err(Error::Config(format!(
                        "function table must be {r}x{c} to cover every symbol pair"
                    )));
                }
                FunctionTable::new(table.clone())
            }
            FunctionSpec::Builtin { builtin, k } => {
                if let Builtin::First = builtin {
                    return FunctionTable::from_fn(r, c, |i, _| self.alphabet_1[i].clone());
                }
                let x1: Vec<i64> = self
                    .alphabet_1
                    .iter()
                    .map(|s| int_symbol(s))
                    .collect::<Result<_>>()?;
                let x2: Vec<i64> = self
                    .alphabet_2
                    .iter()
                    .map(|s| int_symbol(s))
                    .collect::<Result<_>>()?;
                let op: Box<dyn Fn(i64, i64) -> i64> = match builtin {
                    Builtin::Sum => Box::new(|a, b| a + b),
                    Builtin::Product => Box::new(|a, b| a * b),
                    Builtin::ModuloK => {
                        let k = k.filter(|&k| k >= 1).ok_or_else(|| {
                            Error::Config("modulo-k needs a positive integer k".into())
                        })?;
                        Box::new(move |a, b| (a + b).rem_euclid(k))
                    }
                    Builtin::First => unreachable!(),
                };
                FunctionTable::from_fn(r, c, |i, j| op(x1[i], x2[j]).to_string())
            }
        }
    }

    pub fn search_options(&self) -> SearchOptions {
        SearchOptions {
            mode: self.options.mode,
            budgets: self.options.budgets.clone(),
            seed: self.options.seed,
            warm_starts: Vec::new(),
        }
    }

    pub fn plan_options(&self) -> PlanOptions {
        PlanOptions {
            n: self.options.n,
            b: self.options.b,
            a: self.options.a,
            rule: self.options.rule,
            search: self.search_options(),
        }
    }

    /// SHA-256 of the canonical JSON serialization, hex encoded.
    pub fn hash(&self) -> String {
        let bytes = serde_json::to_vec(self).expect("spec serializes");
        Sha256::digest(&bytes)
            .iter()
            .map(|b| format!("{b:02x}"))
            .collect()
    }
}
