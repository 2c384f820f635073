//! Deterministic SC arithmetic on thermometer streams: truth-table
//! multiplication, BSN addition and the length-reducing re-scaling blocks.

use std::str::FromStr;

use num_rational::Ratio;
use num_traits::ToPrimitive;
use serde::{Deserialize, Serialize};

use crate::bitonic::BsnTrace;
use crate::error::{Error, Result};
use crate::scale::Scale;
use crate::stream::ThermometerStream;

/// Which input bits a sub-sampler keeps.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SubsampleMode {
    /// Taps every `rate`-th bit starting at index 0: `n' = floor(n / rate)`.
    HardwareFloor,
    /// Taps are offset by `rate / 2`: `n' = floor((n + rate/2) / rate)`.
    #[default]
    Centered,
}

impl FromStr for SubsampleMode {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "floor" | "hardware-floor" => Ok(Self::HardwareFloor),
            "centered" => Ok(Self::Centered),
            _ => Err(Error::Parse(format!("unknown sub-sample mode {s:?}"))),
        }
    }
}

fn check_even(len: usize) -> Result<()> {
    if len < 2 || !len.is_multiple_of(2) {
        Err(Error::OddLength(len))
    } else {
        Ok(())
    }
}

/// Exact product. The output holds `L_a * L_b / 2` bits at scale
/// `alpha_a * alpha_b`, wide enough that the largest product never saturates.
pub fn multiply(a: &ThermometerStream, b: &ThermometerStream) -> Result<ThermometerStream> {
    check_even(a.len())?;
    check_even(b.len())?;
    let qa = a.twice_level() / 2;
    let qb = b.twice_level() / 2;
    let len = a.len() * b.len() / 2;
    let ones = (qa * qb + len as i128 / 2) as usize;
    ThermometerStream::new(len, ones, a.alpha() * b.alpha())
}

/// Sums equally-scaled streams by sorting their concatenation.
///
/// The concatenation is padded with a zero-valued stream (half ones) up to
/// the next power of two so a bitonic network of that width exists.
pub fn bsn_add(inputs: &[ThermometerStream]) -> Result<(ThermometerStream, BsnTrace)> {
    if inputs.len() < 2 {
        return Err(Error::TooFewOperands);
    }
    let alpha = inputs[0].alpha();
    if let Some(other) = inputs.iter().find(|s| s.alpha() != alpha) {
        return Err(Error::ScaleMismatch(
            alpha.to_string(),
            other.alpha().to_string(),
        ));
    }
    let total: usize = inputs.iter().map(|s| s.len()).sum();
    if !total.is_multiple_of(2) {
        return Err(Error::OddTotal(total));
    }
    let width = total.next_power_of_two();
    let pad = width - total;
    let ones: usize = inputs.iter().map(|s| s.ones()).sum::<usize>() + pad / 2;
    let trace = BsnTrace::for_width(width)?;
    Ok((ThermometerStream::new(width, ones, alpha)?, trace))
}

/// Keeps one bit in `rate`: `L' = L / rate`, `alpha' = alpha * rate`.
pub fn subsample(
    s: &ThermometerStream,
    rate: usize,
    mode: SubsampleMode,
) -> Result<ThermometerStream> {
    if rate == 0 {
        return Err(Error::ZeroRate);
    }
    if !s.len().is_multiple_of(rate) {
        return Err(Error::RateNotDividing {
            rate,
            len: s.len(),
        });
    }
    let offset = match mode {
        SubsampleMode::HardwareFloor => 0,
        SubsampleMode::Centered => rate / 2,
    };
    let ones = (s.ones() + offset) / rate;
    ThermometerStream::new(s.len() / rate, ones, s.alpha() * rate as u64)
}

/// Keeps the central `L / rate` bits: same scale, range clipped by `rate`.
/// Values outside the narrower range saturate.
pub fn window(s: &ThermometerStream, rate: usize) -> Result<ThermometerStream> {
    if rate == 0 {
        return Err(Error::ZeroRate);
    }
    if !s.len().is_multiple_of(rate) {
        return Err(Error::RateNotDividing {
            rate,
            len: s.len(),
        });
    }
    let kept = s.len() / rate;
    let dropped = s.len() - kept;
    if !dropped.is_multiple_of(2) {
        return Err(Error::UncenteredWindow {
            kept,
            len: s.len(),
        });
    }
    let ones = s.ones().saturating_sub(dropped / 2).min(kept);
    ThermometerStream::new(kept, ones, s.alpha())
}

/// Brings `s` onto the coarser scale `target`.
///
/// An integer ratio is a centered sub-sample. A non-integer ratio is a
/// selective-interconnect requantizer onto the smallest even width that
/// still covers the input range.
pub fn rescale_to(s: &ThermometerStream, target: Scale) -> Result<ThermometerStream> {
    if target == s.alpha() {
        return Ok(s.clone());
    }
    if target < s.alpha() {
        return Err(Error::Config(format!(
            "cannot re-scale {} to the finer scale {target}",
            s.alpha()
        )));
    }
    let ratio = target / s.alpha();
    if let Some(rate) = ratio.as_integer() {
        return subsample(s, rate as usize, SubsampleMode::Centered);
    }
    requantize_covering(s, target)
}

/// General re-scaling block onto any scale, finer or coarser.
///
/// Uses a centered sub-sample when the ratio is an integer dividing the
/// length, otherwise the covering requantizer.
pub fn rescale(s: &ThermometerStream, target: Scale) -> Result<ThermometerStream> {
    if target == s.alpha() {
        return Ok(s.clone());
    }
    if let Some(rate) = (target / s.alpha()).as_integer() {
        if s.len().is_multiple_of(rate as usize) {
            return subsample(s, rate as usize, SubsampleMode::Centered);
        }
    }
    requantize_covering(s, target)
}

/// Width a requantizer onto `target` needs to cover the range of `s`.
pub fn covering_len(s: &ThermometerStream, target: Scale) -> usize {
    let half_span = Ratio::new(s.len() as i128, 2) * s.alpha().ratio() / target.ratio();
    2 * half_span.ceil().to_integer().to_usize().unwrap_or(0).max(1)
}

fn requantize_covering(s: &ThermometerStream, target: Scale) -> Result<ThermometerStream> {
    s.requantize(covering_len(s, target), target)
}

/// Aligns two streams to the larger of their scales.
pub fn align_scales(
    a: &ThermometerStream,
    b: &ThermometerStream,
) -> Result<(ThermometerStream, ThermometerStream)> {
    let target = a.alpha().max(b.alpha());
    Ok((rescale_to(a, target)?, rescale_to(b, target)?))
}

/// Aligns every stream to the largest scale among them.
pub fn align_all(streams: &[ThermometerStream]) -> Result<Vec<ThermometerStream>> {
    let Some(target) = streams.iter().map(|s| s.alpha()).max() else {
        return Ok(Vec::new());
    };
    streams.iter().map(|s| rescale_to(s, target)).collect()
}
