//! MAE measurement for the GELU and softmax blocks.

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution as _, Normal};
use rayon::prelude::*;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use sha2::{Digest, Sha256};

use crate::bernstein::BernsteinConfig;
use crate::error::{Error, Result};
use crate::gelu::{gelu, SIConfig};
use crate::softmax::{self, SoftmaxConfig};

/// Source of test inputs.
#[derive(Debug, Clone, PartialEq)]
pub enum Distribution {
    Uniform { lo: f64, hi: f64 },
    /// Normal samples clamped to `[-clip, clip]`.
    Gaussian { mu: f64, sigma: f64, clip: f64 },
    /// CSV rows of numbers.
    File(PathBuf),
}

impl fmt::Display for Distribution {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Uniform { lo, hi } => write!(f, "uniform:{lo}:{hi}"),
            Self::Gaussian { mu, sigma, clip } => write!(f, "gaussian:{mu}:{sigma}:{clip}"),
            Self::File(p) => write!(f, "file:{}", p.display()),
        }
    }
}

impl FromStr for Distribution {
    type Err = Error;

    /// `uniform:LO:HI`, `gaussian:MU:SIGMA:CLIP` or `file:PATH`.
    fn from_str(s: &str) -> Result<Self> {
        let bad = |why: &str| Error::Parse(format!("distribution {s:?}: {why}"));
        let (kind, rest) = s.split_once(':').ok_or_else(|| bad("missing ':'"))?;
        if kind == "file" {
            if rest.is_empty() {
                return Err(bad("empty path"));
            }
            return Ok(Self::File(PathBuf::from(rest)));
        }
        let nums: Vec<f64> = rest
            .split(':')
            .map(|t| t.trim().parse::<f64>().map_err(|_| bad("not a number")))
            .collect::<Result<_>>()?;
        if nums.iter().any(|v| !v.is_finite()) {
            return Err(bad("non-finite parameter"));
        }
        match (kind, nums.as_slice()) {
            ("uniform", &[lo, hi]) if lo < hi => Ok(Self::Uniform { lo, hi }),
            ("uniform", &[_, _]) => Err(bad("need lo < hi")),
            ("gaussian", &[mu, sigma, clip]) if sigma > 0.0 && clip > 0.0 => {
                Ok(Self::Gaussian { mu, sigma, clip })
            }
            ("gaussian", &[_, _, _]) => Err(bad("need sigma > 0 and clip > 0")),
            _ => Err(bad("unknown kind or wrong parameter count")),
        }
    }
}

impl Serialize for Distribution {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for Distribution {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        String::deserialize(d)?
            .parse()
            .map_err(serde::de::Error::custom)
    }
}

/// Parses CSV rows of numbers (no header); every row must have `m` fields
/// when `m` is given.
pub fn parse_vectors(text: &str, m: Option<usize>) -> Result<Vec<Vec<f64>>> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .comment(Some(b'#'))
        .trim(csv::Trim::All)
        .flexible(true)
        .from_reader(text.as_bytes());
    let mut rows = Vec::new();
    for (line, record) in reader.records().enumerate() {
        let record = record?;
        let row: Vec<f64> = record
            .iter()
            .map(|f| match f.parse::<f64>() {
                Ok(v) if v.is_finite() => Ok(v),
                _ => Err(Error::Parse(format!("row {}: bad number {f:?}", line + 1))),
            })
            .collect::<Result<_>>()?;
        if let Some(m) = m {
            if row.len() != m {
                return Err(Error::Shape(format!(
                    "row {} has {} values, expected {m}",
                    line + 1,
                    row.len()
                )));
            }
        }
        rows.push(row);
    }
    if rows.is_empty() {
        return Err(Error::Parse("no vectors in file".into()));
    }
    Ok(rows)
}

pub fn read_vectors(path: &Path, m: Option<usize>) -> Result<Vec<Vec<f64>>> {
    parse_vectors(&std::fs::read_to_string(path)?, m)
}

/// `count` vectors of length `m`, deterministic in `seed`. File sources
/// return all rows of the file and ignore `count` and `seed`.
pub fn gen_vectors(dist: &Distribution, m: usize, count: usize, seed: u64) -> Result<Vec<Vec<f64>>> {
    if count == 0 || m == 0 {
        return Err(Error::Config("count and m must be at least 1".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    match dist {
        Distribution::Uniform { lo, hi } => Ok((0..count)
            .map(|_| (0..m).map(|_| rng.random_range(*lo..*hi)).collect())
            .collect()),
        Distribution::Gaussian { mu, sigma, clip } => {
            let normal = Normal::new(*mu, *sigma).map_err(|e| Error::Config(e.to_string()))?;
            Ok((0..count)
                .map(|_| {
                    (0..m)
                        .map(|_| normal.sample(&mut rng).clamp(-clip, *clip))
                        .collect()
                })
                .collect())
        }
        Distribution::File(path) => read_vectors(path, Some(m)),
    }
}

/// Scalar samples for single-input blocks.
pub fn gen_samples(dist: &Distribution, count: usize, seed: u64) -> Result<Vec<f64>> {
    match dist {
        Distribution::File(path) => Ok(read_vectors(path, None)?.concat()),
        _ => Ok(gen_vectors(dist, 1, count, seed)?.concat()),
    }
}

/// Hex SHA-256 of the canonical JSON form of `value`.
pub fn digest<T: Serialize>(value: &T) -> String {
    let json = serde_json::to_vec(value).expect("config serializes");
    hex::encode(Sha256::digest(&json))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    pub block: String,
    pub config_digest: String,
    pub samples: usize,
    pub mae: f64,
    pub max_abs_error: f64,
    pub distribution: String,
    pub seed: u64,
}

/// Sums in input order so the result does not depend on scheduling.
fn summarize(errors: &[f64]) -> (f64, f64) {
    let sum: f64 = errors.iter().sum();
    let max = errors.iter().copied().fold(0.0, f64::max);
    (sum / errors.len() as f64, max)
}

/// A scalar GELU implementation under test.
pub enum GeluBlock<'a> {
    Si(&'a SIConfig),
    /// Each sample gets its own stream seed derived from the report seed.
    Bernstein(&'a BernsteinConfig),
}

impl GeluBlock<'_> {
    fn id(&self) -> String {
        match self {
            Self::Si(c) => format!("si-gelu-{}-{}", c.b_in, c.b_out),
            Self::Bernstein(c) => format!("bernstein-gelu-{}-{}", c.degree + 1, c.bsl),
        }
    }

    fn config_digest(&self) -> String {
        match self {
            Self::Si(c) => digest(c),
            Self::Bernstein(c) => digest(c),
        }
    }
}

/// Stream seed for sample `index` of a run seeded with `seed`.
pub fn sample_seed(seed: u64, index: usize) -> u64 {
    seed ^ (index as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15)
}

pub fn mae_gelu(
    block: &GeluBlock<'_>,
    samples: &[f64],
    distribution: &Distribution,
    seed: u64,
) -> Result<EvalReport> {
    if samples.is_empty() {
        return Err(Error::Config("no samples".into()));
    }
    let errors: Vec<f64> = samples
        .par_iter()
        .enumerate()
        .map(|(i, &x)| {
            let y = match block {
                GeluBlock::Si(cfg) => cfg.eval_real(x)?,
                GeluBlock::Bernstein(cfg) => cfg.simulate(x, sample_seed(seed, i)),
            };
            Ok((y - gelu(x)).abs())
        })
        .collect::<Result<_>>()?;
    let (mae, max_abs_error) = summarize(&errors);
    Ok(EvalReport {
        block: block.id(),
        config_digest: block.config_digest(),
        samples: samples.len(),
        mae,
        max_abs_error,
        distribution: distribution.to_string(),
        seed,
    })
}

/// Per-element absolute errors of the SC datapath against exact softmax of
/// the raw (unquantized) vector.
pub fn softmax_errors(cfg: &SoftmaxConfig, x: &[f64]) -> Result<Vec<f64>> {
    let got = softmax::sc_softmax_real(x, cfg)?;
    let want = softmax::exact_softmax(x);
    Ok(got.iter().zip(&want).map(|(a, b)| (a - b).abs()).collect())
}

pub fn mae_softmax(
    cfg: &SoftmaxConfig,
    vectors: &[Vec<f64>],
    distribution: &Distribution,
    seed: u64,
) -> Result<EvalReport> {
    softmax::plan(cfg)?;
    if vectors.is_empty() {
        return Err(Error::Config("no vectors".into()));
    }
    let per_vector: Vec<Vec<f64>> = vectors
        .par_iter()
        .map(|x| softmax_errors(cfg, x))
        .collect::<Result<_>>()?;
    let errors = per_vector.concat();
    let (mae, max_abs_error) = summarize(&errors);
    Ok(EvalReport {
        block: format!(
            "softmax-m{}-k{}-bx{}-by{}-s{}-{}",
            cfg.m, cfg.k, cfg.b_x, cfg.b_y, cfg.s1, cfg.s2
        ),
        config_digest: digest(cfg),
        samples: errors.len(),
        mae,
        max_abs_error,
        distribution: distribution.to_string(),
        seed,
    })
}
