//! One-variable weight sequences with an exact tail rule.

use serde::{Deserialize, Serialize};
use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::families::measure::AtomicMeasure1D;

/// What a [`WeightSeq`] does after its explicit head.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SeqTail {
    /// `c, c, c, ...`
    Constant(f64),
    /// The given block repeated forever.
    Periodic(Vec<f64>),
    /// Berger weights `omega_{offset}, omega_{offset+1}, ...` of an atomic measure.
    Berger { measure: AtomicMeasure1D, offset: usize },
}

/// Weights `omega_0, omega_1, ...` of a 1-variable weighted shift:
/// an explicit head followed by a tail rule.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawSeq")]
pub struct WeightSeq {
    head: Vec<f64>,
    tail: SeqTail,
}

#[derive(Deserialize)]
struct RawSeq {
    #[serde(default)]
    head: Vec<f64>,
    tail: SeqTail,
}

impl TryFrom<RawSeq> for WeightSeq {
    type Error = Error;
    fn try_from(raw: RawSeq) -> Result<Self> {
        WeightSeq::new(raw.head, raw.tail)
    }
}

fn check(index: usize, value: f64) -> Result<()> {
    if value.is_finite() && value > 0.0 {
        Ok(())
    } else {
        Err(Error::InvalidSequenceWeight { index, value })
    }
}

impl WeightSeq {
    pub fn new(head: Vec<f64>, tail: SeqTail) -> Result<Self> {
        for (i, &v) in head.iter().enumerate() {
            check(i, v)?;
        }
        match &tail {
            SeqTail::Constant(c) => check(head.len(), *c)?,
            SeqTail::Periodic(block) => {
                if block.is_empty() {
                    return Err(Error::param("tail", "periodic block is empty"));
                }
                for (i, &v) in block.iter().enumerate() {
                    check(head.len() + i, v)?;
                }
            }
            SeqTail::Berger { measure, .. } => {
                if measure.max_position() <= 0.0 {
                    return Err(Error::InvalidMeasure("delta_0 has no weight sequence".into()));
                }
            }
        }
        Ok(WeightSeq { head, tail })
    }

    pub fn constant(c: f64) -> Result<Self> {
        Self::new(Vec::new(), SeqTail::Constant(c))
    }

    /// `values` followed by repetitions of its last entry.
    pub fn eventually_constant(values: &[f64]) -> Result<Self> {
        let (&last, head) = values
            .split_last()
            .ok_or_else(|| Error::param("weights", "empty sequence"))?;
        Self::new(head.to_vec(), SeqTail::Constant(last))
    }

    pub fn periodic(head: Vec<f64>, block: Vec<f64>) -> Result<Self> {
        Self::new(head, SeqTail::Periodic(block))
    }

    /// Berger weights `omega_j = sqrt(gamma_{j+1} / gamma_j)` of `measure`.
    pub fn berger(measure: AtomicMeasure1D) -> Result<Self> {
        Self::new(Vec::new(), SeqTail::Berger { measure, offset: 0 })
    }

    pub fn head(&self) -> &[f64] {
        &self.head
    }

    pub fn tail(&self) -> &SeqTail {
        &self.tail
    }

    pub fn get(&self, i: usize) -> f64 {
        if let Some(&v) = self.head.get(i) {
            return v;
        }
        let j = i - self.head.len();
        match &self.tail {
            SeqTail::Constant(c) => *c,
            SeqTail::Periodic(block) => block[j % block.len()],
            SeqTail::Berger { measure, offset } => {
                measure.weight(offset + j).expect("validated at construction")
            }
        }
    }

    pub fn values(&self, n: usize) -> Vec<f64> {
        (0..n).map(|i| self.get(i)).collect()
    }

    /// Exact supremum. Berger weights are nondecreasing with limit
    /// `sqrt(max atom)`.
    pub fn sup(&self) -> f64 {
        let head = self.head.iter().copied().fold(0.0, f64::max);
        let tail = match &self.tail {
            SeqTail::Constant(c) => *c,
            SeqTail::Periodic(block) => block.iter().copied().fold(0.0, f64::max),
            SeqTail::Berger { measure, .. } => measure.max_position().sqrt(),
        };
        head.max(tail)
    }

    /// Smallest `n` with `omega_i = omega_n` for all `i >= n`, when the tail
    /// rule makes that decidable.
    pub fn flat_from(&self) -> Option<usize> {
        let (c, start) = match &self.tail {
            SeqTail::Constant(c) => (*c, self.head.len()),
            SeqTail::Periodic(block) if block.iter().all(|&v| v == block[0]) => {
                (block[0], self.head.len())
            }
            SeqTail::Periodic(_) => return None,
            SeqTail::Berger { measure, offset } => {
                let atoms = measure.atoms();
                // delta_p, or (1 - t) delta_0 + t delta_p: flat from index 1
                let flat_at: usize = match atoms {
                    [_] => 0,
                    [z, _] if z.at == 0.0 => 1,
                    _ => return None,
                };
                let from = self.head.len() + flat_at.saturating_sub(*offset);
                (self.get(from), from)
            }
        };
        let mut n = start;
        while n > 0 && self.get(n - 1) == c {
            n -= 1;
        }
        Some(n)
    }

    /// True when `omega_0 <= omega_1 <= ...` (the shift is hyponormal).
    pub fn is_nondecreasing(&self) -> bool {
        let n = self.head.len() + self.probe_len();
        (0..n).all(|i| self.get(i) <= self.get(i + 1))
    }

    /// Number of tail terms that determine the tail's shape for checks
    /// like monotonicity.
    fn probe_len(&self) -> usize {
        match &self.tail {
            SeqTail::Constant(_) => 1,
            SeqTail::Periodic(block) => block.len() + 1,
            // Berger weights are nondecreasing; look past the offset join
            SeqTail::Berger { .. } => 2,
        }
    }

    /// Moments `gamma_0 ..= gamma_n` with `gamma_0 = 1`.
    pub fn moments(&self, n: usize) -> Vec<f64> {
        let mut out = Vec::with_capacity(n + 1);
        let mut g = 1.0;
        out.push(g);
        for i in 0..n {
            let w = self.get(i);
            g *= w * w;
            out.push(g);
        }
        out
    }

    /// `omega_m, omega_{m+1}, ...`
    pub fn shifted(&self, m: usize) -> WeightSeq {
        if m <= self.head.len() {
            return WeightSeq { head: self.head[m..].to_vec(), tail: self.tail.clone() };
        }
        let j = m - self.head.len();
        let tail = match &self.tail {
            SeqTail::Constant(c) => SeqTail::Constant(*c),
            SeqTail::Periodic(block) => {
                let r = j % block.len();
                SeqTail::Periodic([&block[r..], &block[..r]].concat())
            }
            SeqTail::Berger { measure, offset } => {
                SeqTail::Berger { measure: measure.clone(), offset: offset + j }
            }
        };
        WeightSeq { head: Vec::new(), tail }
    }

    /// `(x_0, omega_0, omega_1, ...)`
    pub fn prepend(&self, x0: f64) -> Result<WeightSeq> {
        let mut head = vec![x0];
        head.extend_from_slice(&self.head);
        WeightSeq::new(head, self.tail.clone())
    }

    /// `c * omega`
    pub fn scaled(&self, c: f64) -> Result<WeightSeq> {
        self.map_pairs(|x, _| c * x)
    }

    /// `i -> f(omega_i, omega_{i+1})`, kept exact for constant and periodic
    /// tails. Berger tails are not closed under such maps.
    pub fn map_pairs(&self, f: impl Fn(f64, f64) -> f64) -> Result<WeightSeq> {
        let head = (0..self.head.len()).map(|i| f(self.get(i), self.get(i + 1))).collect();
        let tail = match &self.tail {
            SeqTail::Constant(c) => SeqTail::Constant(f(*c, *c)),
            SeqTail::Periodic(block) => {
                let m = block.len();
                SeqTail::Periodic((0..m).map(|j| f(block[j], block[(j + 1) % m])).collect())
            }
            SeqTail::Berger { .. } => {
                return Err(Error::Unsupported(
                    "pairwise map of a Berger-tailed sequence has no exact tail".into(),
                ))
            }
        };
        WeightSeq::new(head, tail)
    }

    /// Aluthge transform `sqrt(omega_i omega_{i+1})`.
    pub fn aluthge(&self) -> Result<WeightSeq> {
        self.map_pairs(|x, y| (x * y).sqrt())
    }
}

impl fmt::Display for WeightSeq {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let head: Vec<String> = self.head.iter().map(|v| v.to_string()).collect();
        let head = head.join(",");
        let sep = if head.is_empty() { "" } else { ";" };
        match &self.tail {
            SeqTail::Constant(c) if head.is_empty() => write!(f, "{c}"),
            SeqTail::Constant(c) => write!(f, "{head},{c}"),
            SeqTail::Periodic(block) => {
                let b: Vec<String> = block.iter().map(|v| v.to_string()).collect();
                write!(f, "{head}{sep}periodic:{}", b.join(","))
            }
            SeqTail::Berger { measure, offset: 0 } => write!(f, "{head}{sep}berger:{measure}"),
            SeqTail::Berger { measure, offset } => {
                write!(f, "{head}{sep}berger+{offset}:{measure}")
            }
        }
    }
}

/// Accepted forms:
///
/// * `"0.5,2,1"`: explicit values, the last one repeats;
/// * `"periodic:0.5,2"`, optionally after a head: `"1;periodic:0.5,2"`;
/// * `"berger:0.5@1,0.5@2"`, optionally after a head: `"0.9;berger:1@1"`.
impl FromStr for WeightSeq {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let nums = |t: &str| -> Result<Vec<f64>> {
            t.split(',')
                .filter(|p| !p.trim().is_empty())
                .map(|p| {
                    p.trim()
                        .parse::<f64>()
                        .map_err(|e| Error::Parse(format!("weight `{p}`: {e}")))
                })
                .collect()
        };
        let (head, rest) = match s.split_once(';') {
            Some((h, r)) => (nums(h)?, r.trim()),
            None => (Vec::new(), s.trim()),
        };
        if let Some(block) = rest.strip_prefix("periodic:") {
            return WeightSeq::periodic(head, nums(block)?);
        }
        if let Some(spec) = rest.strip_prefix("berger") {
            let (offset, measure) = spec
                .split_once(':')
                .ok_or_else(|| Error::Parse(format!("`{s}`: expected berger:<measure>")))?;
            let offset = match offset.strip_prefix('+') {
                Some(o) => o.parse().map_err(|e| Error::Parse(format!("berger offset: {e}")))?,
                None if offset.is_empty() => 0,
                None => return Err(Error::Parse(format!("`{s}`: bad berger offset"))),
            };
            let measure: AtomicMeasure1D = measure.parse()?;
            return WeightSeq::new(head, SeqTail::Berger { measure, offset });
        }
        if !head.is_empty() {
            return Err(Error::Parse(format!("`{s}`: a head needs a periodic or berger tail")));
        }
        let vals = nums(rest)?;
        if vals.is_empty() {
            return Err(Error::Parse("empty weight sequence".into()));
        }
        WeightSeq::eventually_constant(&vals)
    }
}
