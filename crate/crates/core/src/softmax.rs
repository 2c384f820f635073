//! Iterative approximate softmax: floating-point reference and the
//! bit-exact SC datapath.
//!
//! Starting from `y = 1/m`, each of `k` forward-Euler steps computes
//! `z_i = x_i * y_i` and `y_i += (z_i - y_i * sum(z)) / k`.
//!
//! Per iteration and lane the datapath is
//!
//! ```text
//! z_i   = mult1(x_i, y_i)
//! S     = reduce_s1(bsn1(z_0 .. z_{m-1}))            shared by all lanes
//! w_i   = reduce_s2(mult2(y_i, S))
//! y_i'  = requant(bsn2(y_i, rescale(z_i / k), rescale(-w_i / k)))
//! ```
//!
//! where `/ k` only relabels the scale, negation is complement-and-reverse,
//! and the two re-scalers requantize both bracket terms onto the scale of `y_i`.

use std::str::FromStr;

use num_integer::Integer;
use num_rational::Ratio;
use num_traits::{Signed, ToPrimitive};
use serde::{Deserialize, Serialize};

use crate::arith::{self, SubsampleMode};
use crate::bitonic::BsnTrace;
use crate::error::{Error, Result};
use crate::scale::{Exact, Scale};
use crate::stream::ThermometerStream;

/// Numerically stable softmax.
pub fn exact_softmax(x: &[f64]) -> Vec<f64> {
    let max = x.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let e: Vec<f64> = x.iter().map(|v| (v - max).exp()).collect();
    let sum: f64 = e.iter().sum();
    e.into_iter().map(|v| v / sum).collect()
}

/// `k` forward-Euler steps from the uniform vector.
pub fn float_iterative_softmax(x: &[f64], k: usize) -> Vec<f64> {
    float_iterative_trace(x, k).pop().unwrap_or_default()
}

/// The state after every iteration, `y^1 ..= y^k`.
pub fn float_iterative_trace(x: &[f64], k: usize) -> Vec<Vec<f64>> {
    let m = x.len();
    let mut y = vec![1.0 / m as f64; m];
    let mut out = Vec::with_capacity(k);
    for _ in 0..k {
        let z: Vec<f64> = x.iter().zip(&y).map(|(a, b)| a * b).collect();
        let sum_z: f64 = z.iter().sum();
        for i in 0..m {
            y[i] += (z[i] - y[i] * sum_z) / k as f64;
        }
        out.push(y.clone());
    }
    out
}

/// How the `s_1` / `s_2` blocks shorten a stream.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Rescale {
    /// Keep every rate-th bit (scale grows by the rate), floor rounding.
    SubsampleFloor,
    /// Keep every rate-th bit (scale grows by the rate), centered taps.
    SubsampleCentered,
    /// Keep the central `L / rate` bits; scale unchanged, range shrinks.
    #[default]
    Window,
}

impl FromStr for Rescale {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "floor" | "subsample-floor" => Ok(Self::SubsampleFloor),
            "centered" | "subsample-centered" => Ok(Self::SubsampleCentered),
            "window" => Ok(Self::Window),
            _ => Err(Error::Parse(format!("unknown re-scale mode {s:?}"))),
        }
    }
}

/// Treatment of the initial state `y = 1/m`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FirstIteration {
    /// Fold `1/m` into scales when it is not exactly representable in the
    /// state format, otherwise encode it.
    #[default]
    Auto,
    /// Always fold `1/m` into scales.
    Special,
    /// Always encode `1/m` in the state format.
    Constant,
}

impl FromStr for FirstIteration {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "auto" => Ok(Self::Auto),
            "special" => Ok(Self::Special),
            "constant" => Ok(Self::Constant),
            _ => Err(Error::Parse(format!("unknown first-iteration mode {s:?}"))),
        }
    }
}

/// Scale of the state between iterations.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum AlphaSchedule {
    /// Always `(B_y, alpha_y)`.
    #[default]
    Fixed,
    /// After each iteration, the smallest power of two whose range covers
    /// the largest state magnitude.
    Adaptive,
}

impl FromStr for AlphaSchedule {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "fixed" => Ok(Self::Fixed),
            "adaptive" => Ok(Self::Adaptive),
            _ => Err(Error::Parse(format!("unknown alpha schedule {s:?}"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SoftmaxConfig {
    pub m: usize,
    pub k: usize,
    pub b_x: usize,
    pub alpha_x: Scale,
    pub b_y: usize,
    pub alpha_y: Scale,
    pub s1: usize,
    pub s2: usize,
    #[serde(default)]
    pub rescale: Rescale,
    #[serde(default)]
    pub first_iteration: FirstIteration,
    #[serde(default)]
    pub alpha_schedule: AlphaSchedule,
}

impl SoftmaxConfig {
    /// Config with the default scales `alpha_x = 8/B_x`, `alpha_y = 2/B_y`.
    pub fn new(m: usize, k: usize, b_x: usize, b_y: usize, s1: usize, s2: usize) -> Self {
        Self {
            m,
            k,
            b_x,
            alpha_x: Scale::frac(8, b_x.max(1) as u64),
            b_y,
            alpha_y: Scale::frac(2, b_y.max(1) as u64),
            s1,
            s2,
            rescale: Rescale::default(),
            first_iteration: FirstIteration::default(),
            alpha_schedule: AlphaSchedule::default(),
        }
    }

    pub fn with_alpha_x(mut self, alpha: Scale) -> Self {
        self.alpha_x = alpha;
        self
    }

    pub fn with_alpha_y(mut self, alpha: Scale) -> Self {
        self.alpha_y = alpha;
        self
    }

    pub fn with_rescale(mut self, rescale: Rescale) -> Self {
        self.rescale = rescale;
        self
    }

    pub fn with_first_iteration(mut self, mode: FirstIteration) -> Self {
        self.first_iteration = mode;
        self
    }

    pub fn with_alpha_schedule(mut self, schedule: AlphaSchedule) -> Self {
        self.alpha_schedule = schedule;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.m < 2 {
            return Err(Error::Config(format!("m = {} (need at least 2)", self.m)));
        }
        if self.k == 0 {
            return Err(Error::Config("k must be at least 1".into()));
        }
        for (name, b) in [("B_x", self.b_x), ("B_y", self.b_y)] {
            if b < 2 || b % 2 != 0 {
                return Err(Error::Config(format!("{name} = {b} must be even and >= 2")));
            }
        }
        if self.s1 == 0 || self.s2 == 0 {
            return Err(Error::ZeroRate);
        }
        Ok(())
    }

    /// True when iteration 1 folds `1/m` into scales.
    pub fn uses_special_first_iteration(&self) -> bool {
        match self.first_iteration {
            FirstIteration::Special => true,
            FirstIteration::Constant => false,
            FirstIteration::Auto => {
                let y0 = Ratio::new(1, self.m as i128);
                let st = ThermometerStream::encode_exact(y0, self.b_y, self.alpha_y);
                st.map(|s| s.value() != y0).unwrap_or(true)
            }
        }
    }

    fn reduce(&self, s: &ThermometerStream, rate: usize) -> Result<ThermometerStream> {
        match self.rescale {
            Rescale::SubsampleFloor => arith::subsample(s, rate, SubsampleMode::HardwareFloor),
            Rescale::SubsampleCentered => arith::subsample(s, rate, SubsampleMode::Centered),
            Rescale::Window => arith::window(s, rate),
        }
    }
}

/// Width and scale of one named signal, taken from lane 0.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Stage {
    pub name: String,
    pub len: usize,
    pub alpha: Scale,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct IterationTrace {
    pub special: bool,
    pub stages: Vec<Stage>,
    pub bsn1: BsnTrace,
    pub bsn2: BsnTrace,
}

impl IterationTrace {
    pub fn stage(&self, name: &str) -> Option<&Stage> {
        self.stages.iter().find(|s| s.name == name)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SoftmaxRun {
    pub outputs: Vec<ThermometerStream>,
    pub iterations: Vec<IterationTrace>,
}

impl SoftmaxRun {
    pub fn decoded(&self) -> Vec<f64> {
        self.outputs.iter().map(|s| s.decode()).collect()
    }
}

fn record(stages: &mut Vec<Stage>, name: &str, s: &ThermometerStream) {
    stages.push(Stage {
        name: name.to_string(),
        len: s.len(),
        alpha: s.alpha(),
    });
}

/// Largest rational of which both `a` and `b` are integer multiples.
fn rational_gcd(a: Exact, b: Exact) -> Scale {
    let num = a.numer().gcd(b.numer());
    let den = a.denom().lcm(b.denom());
    Scale::from_ratio(Ratio::new(num, den)).expect("positive operands")
}

/// Smallest power of two `a` with `a * b_y / 2 >= max |v|`.
fn covering_power_of_two(max_abs: Exact, b_y: usize) -> Option<Scale> {
    if max_abs <= Exact::from_integer(0) {
        return None;
    }
    let need = max_abs * Ratio::new(2, b_y as i128);
    let mut a = Exact::from_integer(1);
    while a < need {
        a *= 2;
    }
    while a / 2 >= need {
        a /= 2;
    }
    Scale::from_ratio(a).ok()
}

fn iterate(
    cfg: &SoftmaxConfig,
    x: &[ThermometerStream],
    y: Option<&[ThermometerStream]>,
) -> Result<(Vec<ThermometerStream>, IterationTrace)> {
    let k = Scale::integer(cfg.k as u64)?;
    let mut stages = Vec::new();

    let z: Vec<ThermometerStream> = match y {
        Some(y) => x
            .iter()
            .zip(y)
            .map(|(a, b)| arith::multiply(a, b))
            .collect::<Result<_>>()
            .map_err(Error::at("multiplier 1"))?,
        None => {
            let m = Scale::integer(cfg.m as u64)?;
            x.iter().map(|a| a.scale_by_constant(m)).collect()
        }
    };
    record(&mut stages, "z", &z[0]);
    let (sum_z, bsn1) = arith::bsn_add(&z).map_err(Error::at("bsn 1"))?;
    record(&mut stages, "sum_z", &sum_z);

    let w: Vec<ThermometerStream> = match y {
        Some(y) => {
            let sum_r = cfg.reduce(&sum_z, cfg.s1).map_err(Error::at("s1 re-scaler"))?;
            record(&mut stages, "sum_z_reduced", &sum_r);
            let w = y
                .iter()
                .map(|yi| {
                    let p = arith::multiply(yi, &sum_r).map_err(Error::at("multiplier 2"))?;
                    cfg.reduce(&p, cfg.s2).map_err(Error::at("s2 re-scaler"))
                })
                .collect::<Result<Vec<_>>>()?;
            record(&mut stages, "y_sum_z", &arith::multiply(&y[0], &sum_r)?);
            w
        }
        None => {
            let m = Scale::integer(cfg.m as u64)?;
            vec![sum_z.scale_by_constant(m); cfg.m]
        }
    };
    record(&mut stages, "y_sum_z_reduced", &w[0]);

    let mut out = Vec::with_capacity(cfg.m);
    let mut bsn2 = None;
    for i in 0..cfg.m {
        let zk = z[i].scale_by_constant(k);
        let nk = w[i].negate().scale_by_constant(k);
        let (prev, target) = match y {
            Some(y) => (y[i].clone(), y[i].alpha()),
            None => {
                let y0 = Ratio::new(1, cfg.m as i128);
                let target = rational_gcd(zk.alpha().ratio(), y0);
                let levels = (y0 / target.ratio()).ceil().to_integer().max(1);
                let len = 2 * levels as usize;
                (ThermometerStream::encode_exact(y0, len, target)?, target)
            }
        };
        // Re-scalers are sized for the undivided terms, so the block built for
        // one iteration is the same whatever `k` is.
        let zr = zk
            .requantize(arith::covering_len(&z[i], target), target)
            .map_err(Error::at("z re-scaler"))?;
        let nr = nk
            .requantize(arith::covering_len(&w[i], target), target)
            .map_err(Error::at("w re-scaler"))?;
        let (acc, trace) =
            arith::bsn_add(&[prev.clone(), zr.clone(), nr.clone()]).map_err(Error::at("bsn 2"))?;
        if i == 0 {
            record(&mut stages, "y_prev", &prev);
            record(&mut stages, "z_term", &zr);
            record(&mut stages, "w_term", &nr);
            record(&mut stages, "acc", &acc);
        }
        bsn2 = Some(trace);
        out.push(acc);
    }

    let alpha_next = match cfg.alpha_schedule {
        AlphaSchedule::Fixed => cfg.alpha_y,
        AlphaSchedule::Adaptive => {
            let max_abs = out
                .iter()
                .map(|s| s.value().abs())
                .max()
                .unwrap_or_default();
            covering_power_of_two(max_abs, cfg.b_y).unwrap_or(cfg.alpha_y)
        }
    };
    let out: Vec<ThermometerStream> = out
        .iter()
        .map(|s| s.requantize(cfg.b_y, alpha_next))
        .collect::<Result<_>>()?;
    record(&mut stages, "y_next", &out[0]);

    let trace = IterationTrace {
        special: y.is_none(),
        stages,
        bsn1,
        bsn2: bsn2.expect("m >= 2"),
    };
    Ok((out, trace))
}

/// Runs the full `k`-iteration datapath on encoded inputs.
pub fn sc_softmax(x: &[ThermometerStream], cfg: &SoftmaxConfig) -> Result<SoftmaxRun> {
    cfg.validate()?;
    if x.len() != cfg.m {
        return Err(Error::Shape(format!("expected {} lanes, got {}", cfg.m, x.len())));
    }
    if let Some(bad) = x
        .iter()
        .find(|s| s.len() != cfg.b_x || s.alpha() != cfg.alpha_x)
    {
        return Err(Error::Shape(format!(
            "input lane has {} bits at {}, expected {} at {}",
            bad.len(),
            bad.alpha(),
            cfg.b_x,
            cfg.alpha_x
        )));
    }
    plan(cfg)?;

    let mut iterations = Vec::with_capacity(cfg.k);
    let mut y: Vec<ThermometerStream> = Vec::new();
    for j in 0..cfg.k {
        let (next, trace) = if j == 0 && cfg.uses_special_first_iteration() {
            iterate(cfg, x, None)?
        } else {
            if j == 0 {
                let y0 = Ratio::new(1, cfg.m as i128);
                let start = ThermometerStream::encode_exact(y0, cfg.b_y, cfg.alpha_y)?;
                y = vec![start; cfg.m];
            }
            iterate(cfg, x, Some(&y))?
        };
        y = next;
        iterations.push(trace);
    }
    Ok(SoftmaxRun {
        outputs: y,
        iterations,
    })
}

/// Encodes real inputs at `(B_x, alpha_x)`.
pub fn encode_inputs(x: &[f64], cfg: &SoftmaxConfig) -> Result<Vec<ThermometerStream>> {
    x.iter()
        .map(|&v| ThermometerStream::encode(v, cfg.b_x, cfg.alpha_x))
        .collect()
}

/// Encodes, runs the datapath, and decodes.
pub fn sc_softmax_real(x: &[f64], cfg: &SoftmaxConfig) -> Result<Vec<f64>> {
    Ok(sc_softmax(&encode_inputs(x, cfg)?, cfg)?.decoded())
}

/// Widths and scales of one general (non-first) iteration, found by running
/// it on zero inputs. Fails when the config is not realizable.
pub fn plan(cfg: &SoftmaxConfig) -> Result<IterationTrace> {
    cfg.validate()?;
    let x = vec![ThermometerStream::encode(0.0, cfg.b_x, cfg.alpha_x)?; cfg.m];
    let y = vec![ThermometerStream::encode(0.0, cfg.b_y, cfg.alpha_y)?; cfg.m];
    let fixed = SoftmaxConfig {
        alpha_schedule: AlphaSchedule::Fixed,
        ..cfg.clone()
    };
    Ok(iterate(&fixed, &x, Some(&y))?.1)
}

/// Decoded value of the largest representable state level.
pub fn state_range(cfg: &SoftmaxConfig) -> f64 {
    (cfg.alpha_y.ratio() * Ratio::new(cfg.b_y as i128, 2))
        .to_f64()
        .unwrap_or(f64::NAN)
}
