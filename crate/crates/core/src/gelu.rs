//! Gate-assisted selective interconnect (SI).
//!
//! Output bit of rank `r` (wire `y[B_out - r]`) must be high exactly when the
//! target level `t(n)` reaches `r`. Its profile over the input ones-count is
//! split into maximal runs of ones; a run `[a, b]` becomes the term
//! `s_a AND NOT s_{b+1}`, where `s_a` ("at least `a` ones") is simply input
//! wire `x[B_in - a]`. Terms of one bit are OR-ed together.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scale::Scale;
use crate::stream::ThermometerStream;

/// Exact GELU, `x * Phi(x)`.
pub fn gelu(x: f64) -> f64 {
    0.5 * x * (1.0 + libm::erf(x / std::f64::consts::SQRT_2))
}

/// Input scale mapping the window `[-4, 4]` onto `b_in` bits.
pub fn default_alpha_in(b_in: usize) -> Scale {
    Scale::frac(8, b_in as u64)
}

/// Output scale used when none is given: `8 / b_out`, except for the ternary
/// block, where `1/5` keeps the negative lobe of GELU visible as its own level.
pub fn default_alpha_out(b_out: usize) -> Scale {
    if b_out == 2 {
        Scale::frac(1, 5)
    } else {
        Scale::frac(8, b_out as u64)
    }
}

/// Nearest output level for every input ones-count `n = 0..=b_in`.
pub fn target_profile(
    f: impl Fn(f64) -> f64,
    b_in: usize,
    b_out: usize,
    alpha_in: Scale,
    alpha_out: Scale,
) -> Result<Vec<usize>> {
    if b_in == 0 || b_out == 0 {
        return Err(Error::ZeroLength);
    }
    (0..=b_in)
        .map(|n| {
            let x = alpha_in.to_f64() * (n as f64 - b_in as f64 / 2.0);
            let y = f(x);
            if !y.is_finite() {
                return Err(Error::NonFinite);
            }
            Ok(ThermometerStream::encode(y, b_out, alpha_out)?.ones())
        })
        .collect()
}

/// One run of ones in a bit profile: high for `rise <= n < fall`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Interval {
    pub rise: usize,
    pub fall: Option<usize>,
}

impl Interval {
    /// Input wire carrying "at least `rise` ones"; `None` when `rise == 0`
    /// (the signal is constant high).
    pub fn rise_tap(&self, b_in: usize) -> Option<usize> {
        (self.rise > 0).then(|| b_in - self.rise)
    }

    pub fn fall_tap(&self, b_in: usize) -> Option<usize> {
        self.fall.map(|b| b_in - b)
    }

    fn eval(&self, wires: &[bool]) -> bool {
        let b_in = wires.len();
        let up = self.rise_tap(b_in).is_none_or(|i| wires[i]);
        let down = self.fall_tap(b_in).is_some_and(|i| wires[i]);
        up && !down
    }

    /// (NOT, AND) gates needed for this term.
    fn gates(&self) -> (usize, usize) {
        match (self.rise > 0, self.fall.is_some()) {
            (true, true) => (1, 1),
            (false, true) => (1, 0),
            _ => (0, 0),
        }
    }
}

/// All terms driving output wire `y[B_out - rank]`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct OutputBit {
    pub rank: usize,
    pub terms: Vec<Interval>,
}

/// Assist gates by kind.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct GateTally {
    pub not: usize,
    pub and: usize,
    pub or: usize,
}

impl GateTally {
    pub fn total(&self) -> usize {
        self.not + self.and + self.or
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SIConfig {
    pub b_in: usize,
    pub b_out: usize,
    pub alpha_in: Scale,
    pub alpha_out: Scale,
    pub level_table: Vec<usize>,
    pub bits: Vec<OutputBit>,
}

fn runs(profile: &[bool]) -> Vec<Interval> {
    let last = profile.len() - 1;
    let mut out = Vec::new();
    let mut n = 0;
    while n <= last {
        if !profile[n] {
            n += 1;
            continue;
        }
        let start = n;
        while n <= last && profile[n] {
            n += 1;
        }
        out.push(Interval {
            rise: start,
            fall: (n <= last).then_some(n),
        });
    }
    out
}

impl SIConfig {
    /// Synthesizes the block for `f` from its target profile.
    pub fn synthesize(
        f: impl Fn(f64) -> f64,
        b_in: usize,
        b_out: usize,
        alpha_in: Scale,
        alpha_out: Scale,
    ) -> Result<Self> {
        if b_out > b_in {
            return Err(Error::OutputWiderThanInput { b_in, b_out });
        }
        let table = target_profile(f, b_in, b_out, alpha_in, alpha_out)?;
        Self::from_levels(table, b_out, alpha_in, alpha_out)
    }

    /// Synthesizes the block for an explicit level table of length `B_in + 1`.
    pub fn from_levels(
        level_table: Vec<usize>,
        b_out: usize,
        alpha_in: Scale,
        alpha_out: Scale,
    ) -> Result<Self> {
        if level_table.len() < 2 || b_out == 0 {
            return Err(Error::ZeroLength);
        }
        let b_in = level_table.len() - 1;
        if b_out > b_in {
            return Err(Error::OutputWiderThanInput { b_in, b_out });
        }
        if let Some(&t) = level_table.iter().find(|&&t| t > b_out) {
            return Err(Error::Config(format!("level {t} exceeds B_out = {b_out}")));
        }
        let bits = (1..=b_out)
            .map(|rank| {
                let profile: Vec<bool> = level_table.iter().map(|&t| t >= rank).collect();
                OutputBit {
                    rank,
                    terms: runs(&profile),
                }
            })
            .collect();
        Ok(Self {
            b_in,
            b_out,
            alpha_in,
            alpha_out,
            level_table,
            bits,
        })
    }

    /// Checks a deserialized config: shapes, tap ranges, and that the gate
    /// terms reproduce the level table for every input level.
    pub fn validate(&self) -> Result<()> {
        if self.b_in == 0 || self.b_out == 0 {
            return Err(Error::ZeroLength);
        }
        if self.b_out > self.b_in {
            return Err(Error::OutputWiderThanInput {
                b_in: self.b_in,
                b_out: self.b_out,
            });
        }
        if self.level_table.len() != self.b_in + 1 {
            return Err(Error::Shape(format!(
                "level table has {} entries, expected {}",
                self.level_table.len(),
                self.b_in + 1
            )));
        }
        let ranks: Vec<usize> = self.bits.iter().map(|b| b.rank).collect();
        if ranks != (1..=self.b_out).collect::<Vec<_>>() {
            return Err(Error::Shape(format!("output ranks {ranks:?}")));
        }
        for term in self.bits.iter().flat_map(|b| &b.terms) {
            let fall_ok = term.fall.is_none_or(|b| b > term.rise && b <= self.b_in);
            if term.rise > self.b_in || !fall_ok {
                return Err(Error::Config(format!("bad interval {term:?}")));
            }
        }
        for n in 0..=self.b_in {
            let x = ThermometerStream::new(self.b_in, n, self.alpha_in)?;
            let y = self.apply(&x)?;
            if y.ones() != self.level_table[n] {
                return Err(Error::Config(format!(
                    "gate terms give level {} at n = {n}, table says {}",
                    y.ones(),
                    self.level_table[n]
                )));
            }
        }
        Ok(())
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: Self = serde_json::from_str(text)?;
        cfg.validate()?;
        Ok(cfg)
    }

    /// Evaluates the gate netlist on the wires of `x`.
    pub fn apply(&self, x: &ThermometerStream) -> Result<ThermometerStream> {
        if x.len() != self.b_in {
            return Err(Error::Shape(format!(
                "SI block expects {} input bits, got {}",
                self.b_in,
                x.len()
            )));
        }
        if x.alpha() != self.alpha_in {
            return Err(Error::ScaleMismatch(
                self.alpha_in.to_string(),
                x.alpha().to_string(),
            ));
        }
        let wires = x.bits();
        let mut out = vec![false; self.b_out];
        for bit in &self.bits {
            out[self.b_out - bit.rank] = bit.terms.iter().any(|t| t.eval(&wires));
        }
        ThermometerStream::from_bits(&out, self.alpha_out)
    }

    /// Decoded output for input ones-count `n`, read from the level table.
    pub fn output_value(&self, n: usize) -> f64 {
        self.alpha_out.to_f64() * (self.level_table[n] as f64 - self.b_out as f64 / 2.0)
    }

    /// Quantizes a real input onto the block's input grid and returns the
    /// decoded block output.
    pub fn eval_real(&self, x: f64) -> Result<f64> {
        let stream = ThermometerStream::encode(x, self.b_in, self.alpha_in)?;
        Ok(self.apply(&stream)?.decode())
    }

    pub fn gates(&self) -> GateTally {
        let mut tally = GateTally::default();
        for bit in &self.bits {
            for term in &bit.terms {
                let (not, and) = term.gates();
                tally.not += not;
                tally.and += and;
            }
            tally.or += bit.terms.len().saturating_sub(1);
        }
        tally
    }

    /// Logic levels of the deepest output bit.
    pub fn depth(&self) -> usize {
        self.bits
            .iter()
            .map(|bit| {
                let term_depth = bit
                    .terms
                    .iter()
                    .map(|t| match t.gates() {
                        (1, 1) => 2,
                        (1, 0) => 1,
                        _ => 0,
                    })
                    .max()
                    .unwrap_or(0);
                term_depth + ceil_log2(bit.terms.len())
            })
            .max()
            .unwrap_or(0)
    }

    /// Gate equations, one line per output wire, highest wire first.
    pub fn equations(&self) -> Vec<String> {
        self.bits
            .iter()
            .map(|bit| {
                let wire = self.b_out - bit.rank;
                let terms: Vec<String> = bit
                    .terms
                    .iter()
                    .map(|t| {
                        let up = t.rise_tap(self.b_in).map(|i| format!("x[{i}]"));
                        let down = t.fall_tap(self.b_in).map(|i| format!("!x[{i}]"));
                        match (up, down) {
                            (Some(u), Some(d)) => format!("({d} & {u})"),
                            (Some(u), None) => u,
                            (None, Some(d)) => d,
                            (None, None) => "1".to_string(),
                        }
                    })
                    .collect();
                let rhs = if terms.is_empty() {
                    "0".to_string()
                } else {
                    terms.join(" | ")
                };
                format!("y[{wire}] = {rhs}")
            })
            .collect()
    }
}

pub(crate) fn ceil_log2(n: usize) -> usize {
    if n <= 1 {
        0
    } else {
        (usize::BITS - (n - 1).leading_zeros()) as usize
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ternary() -> SIConfig {
        SIConfig::synthesize(gelu, 8, 2, Scale::one(), Scale::frac(1, 5)).unwrap()
    }

    #[test]
    fn gelu_reference_values() {
        assert!((gelu(-1.0) + 0.158_655_253_931_457).abs() < 1e-12);
        assert_eq!(gelu(0.0), 0.0);
        assert!((gelu(4.0) - 3.999_873_315_032_667).abs() < 1e-12);
    }

    #[test]
    fn identity_profile_passes_through() {
        let a = Scale::frac(1, 2);
        let t = target_profile(|x| x, 8, 8, a, a).unwrap();
        assert_eq!(t, (0..=8).collect::<Vec<_>>());
        let cfg = SIConfig::synthesize(|x| x, 8, 8, a, a).unwrap();
        assert_eq!(cfg.gates().total(), 0);
    }

    #[test]
    fn ternary_gelu_profile() {
        let cfg = ternary();
        // input -1 is n = 3
        assert_eq!(cfg.level_table[3], 0);
        assert_eq!(cfg.level_table[4], 1);
        assert_eq!(cfg.level_table, vec![1, 1, 1, 0, 1, 2, 2, 2, 2]);
    }

    #[test]
    fn ternary_gelu_structure() {
        let cfg = ternary();
        assert_eq!(
            cfg.equations(),
            vec!["y[1] = !x[5] | x[4]".to_string(), "y[0] = x[3]".to_string()]
        );
        assert_eq!(
            cfg.gates(),
            GateTally {
                not: 1,
                and: 0,
                or: 1
            }
        );
        assert_eq!(cfg.depth(), 2);
    }

    #[test]
    fn ternary_gelu_apply_extremes() {
        let cfg = ternary();
        let lo = ThermometerStream::new(8, 0, Scale::one()).unwrap();
        assert_eq!(cfg.apply(&lo).unwrap().bit_string(), "10");
        let hi = ThermometerStream::new(8, 8, Scale::one()).unwrap();
        assert_eq!(cfg.apply(&hi).unwrap().bit_string(), "11");
    }

    #[test]
    fn monotone_targets_need_no_gates() {
        for b_in in [2usize, 4, 8, 16] {
            for b_out in (1..=b_in).filter(|b| b % 2 == 0) {
                let cfg = SIConfig::synthesize(
                    |x: f64| x.max(0.0),
                    b_in,
                    b_out,
                    default_alpha_in(b_in),
                    Scale::frac(8, b_out as u64),
                )
                .unwrap();
                assert_eq!(cfg.gates().not, 0);
                assert!(cfg.bits.iter().all(|b| b.terms.len() <= 1));
                assert!(cfg.bits.iter().flat_map(|b| &b.terms).all(|t| t.fall.is_none()));
            }
        }
    }

    #[test]
    fn constant_zero_target() {
        let cfg = SIConfig::synthesize(|_| 0.0, 8, 4, Scale::one(), Scale::one()).unwrap();
        assert_eq!(cfg.level_table, vec![2; 9]);
        assert_eq!(cfg.equations(), vec!["y[3] = 1", "y[2] = 1", "y[1] = 0", "y[0] = 0"]);
        assert_eq!(cfg.gates().total(), 0);
    }

    #[test]
    fn every_extra_dip_costs_three_gates() {
        let one = SIConfig::from_levels(vec![1, 1, 0, 1, 1, 1], 1, Scale::one(), Scale::one()).unwrap();
        let two = SIConfig::from_levels(vec![0, 1, 0, 1, 0, 1], 1, Scale::one(), Scale::one()).unwrap();
        let three = SIConfig::from_levels(vec![1, 0, 1, 0, 1, 0, 1], 1, Scale::one(), Scale::one()).unwrap();
        assert_eq!(one.gates().total(), 2);
        assert_eq!(two.gates().total(), 2 + 2 + 2);
        let four = SIConfig::from_levels(vec![0, 1, 0, 1, 0, 1, 0, 1, 1], 1, Scale::one(), Scale::one()).unwrap();
        assert_eq!(four.gates().total() - two.gates().total(), 3);
        assert!(three.validate().is_ok());
    }

    #[test]
    fn rejects_wider_output_and_bad_inputs() {
        assert_eq!(
            SIConfig::synthesize(gelu, 4, 8, Scale::one(), Scale::one()),
            Err(Error::OutputWiderThanInput { b_in: 4, b_out: 8 })
        );
        let cfg = ternary();
        let wrong_len = ThermometerStream::new(4, 2, Scale::one()).unwrap();
        assert!(matches!(cfg.apply(&wrong_len), Err(Error::Shape(_))));
        let wrong_scale = ThermometerStream::new(8, 2, Scale::frac(1, 2)).unwrap();
        assert!(matches!(cfg.apply(&wrong_scale), Err(Error::ScaleMismatch(..))));
    }

    #[test]
    fn apply_agrees_with_table_and_output_is_thermometer() {
        for b_in in [2usize, 4, 8, 16, 32] {
            for b_out in 1..=b_in {
                for alpha_out in [Scale::frac(1, 5), Scale::frac(1, 20), default_alpha_out(b_out)] {
                    let cfg =
                        SIConfig::synthesize(gelu, b_in, b_out, default_alpha_in(b_in), alpha_out).unwrap();
                    cfg.validate().unwrap();
                }
            }
        }
    }

    #[test]
    fn json_roundtrip_and_tamper_detection() {
        let cfg = ternary();
        let text = serde_json::to_string(&cfg).unwrap();
        assert_eq!(SIConfig::from_json(&text).unwrap(), cfg);
        let mut bad = cfg.clone();
        bad.level_table[0] = 2;
        let text = serde_json::to_string(&bad).unwrap();
        assert!(SIConfig::from_json(&text).is_err());
    }

    #[test]
    fn ceil_log2_values() {
        let got: Vec<usize> = [1usize, 2, 3, 4, 5, 8, 9].iter().map(|&n| ceil_log2(n)).collect();
        assert_eq!(got, vec![0, 1, 2, 2, 3, 3, 4]);
    }
}
