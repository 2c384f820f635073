//! Thermometer-coded stochastic numbers.
//!
//! An `L`-bit stream holding `n` ones encodes `alpha * (n - L/2)`. Bit index
//! `L - 1` is the first to flip, so the ones always occupy indices
//! `L-n ..= L-1`. Because the pattern is fully determined by `(L, n)` the
//! stream is stored in that form; [`ThermometerStream::bits`] materializes the
//! bit vector when a block needs individual wires.

use std::fmt;
use std::str::FromStr;

use num_rational::Ratio;
use num_traits::{ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::scale::{Exact, Scale};

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct ThermometerStream {
    len: usize,
    ones: usize,
    alpha: Scale,
}

/// Nearest level for offset `t = value / alpha`; ties go away from zero
/// (and upward for the odd-length tie at exactly zero).
fn nearest_level_f64(t: f64, len: usize) -> usize {
    let u = t + len as f64 / 2.0;
    let n = if t >= 0.0 {
        (u + 0.5).floor()
    } else {
        (u - 0.5).ceil()
    };
    n.clamp(0.0, len as f64) as usize
}

fn nearest_level_exact(t: Exact, len: usize) -> usize {
    let half = Ratio::new(1, 2);
    let u = t + Ratio::new(len as i128, 2);
    let n = if t >= Exact::zero() {
        (u + half).floor()
    } else {
        (u - half).ceil()
    };
    let n = n.to_integer();
    n.clamp(0, len as i128) as usize
}

impl ThermometerStream {
    /// Stream of `len` bits holding `ones` ones.
    pub fn new(len: usize, ones: usize, alpha: Scale) -> Result<Self> {
        if len == 0 {
            return Err(Error::ZeroLength);
        }
        if ones > len {
            return Err(Error::NotThermometer(format!(
                "{ones} ones in a {len}-bit stream"
            )));
        }
        Ok(Self { len, ones, alpha })
    }

    /// Saturating round-to-nearest encoding of a real value.
    pub fn encode(value: f64, len: usize, alpha: Scale) -> Result<Self> {
        if len == 0 {
            return Err(Error::ZeroLength);
        }
        if value.is_nan() {
            return Err(Error::NonFinite);
        }
        let t = value / alpha.to_f64();
        let ones = if t.is_infinite() {
            if t > 0.0 {
                len
            } else {
                0
            }
        } else {
            nearest_level_f64(t, len)
        };
        Self::new(len, ones, alpha)
    }

    /// Encoding of an exact rational; no floating-point rounding is involved.
    pub fn encode_exact(value: Exact, len: usize, alpha: Scale) -> Result<Self> {
        if len == 0 {
            return Err(Error::ZeroLength);
        }
        let ones = nearest_level_exact(value / alpha.ratio(), len);
        Self::new(len, ones, alpha)
    }

    /// Builds a stream from wires `x[0..L]`, rejecting non-thermometer patterns.
    pub fn from_bits(bits: &[bool], alpha: Scale) -> Result<Self> {
        if bits.is_empty() {
            return Err(Error::ZeroLength);
        }
        let zeros = bits.iter().take_while(|b| !**b).count();
        if bits[zeros..].iter().any(|b| !*b) {
            return Err(Error::NotThermometer(render_bits(bits)));
        }
        Self::new(bits.len(), bits.len() - zeros, alpha)
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn ones(&self) -> usize {
        self.ones
    }

    pub fn alpha(&self) -> Scale {
        self.alpha
    }

    /// `2 * (n - L/2)`, kept integral for odd lengths.
    pub fn twice_level(&self) -> i128 {
        2 * self.ones as i128 - self.len as i128
    }

    /// Exact decoded value `alpha * (n - L/2)`.
    pub fn value(&self) -> Exact {
        self.alpha.ratio() * Ratio::new(self.twice_level(), 2)
    }

    pub fn decode(&self) -> f64 {
        self.value().to_f64().unwrap_or(f64::NAN)
    }

    /// Wire `x[i]`.
    pub fn bit(&self, i: usize) -> bool {
        i < self.len && i >= self.len - self.ones
    }

    /// Wires `x[0..L]` in index order.
    pub fn bits(&self) -> Vec<bool> {
        (0..self.len).map(|i| self.bit(i)).collect()
    }

    /// Complement every bit, then reverse the bit order.
    pub fn negate(&self) -> Self {
        Self {
            len: self.len,
            ones: self.len - self.ones,
            alpha: self.alpha,
        }
    }

    /// Divides the represented value by `c` by re-labelling the scale only.
    pub fn scale_by_constant(&self, c: Scale) -> Self {
        Self {
            alpha: self.alpha / c,
            ..self.clone()
        }
    }

    /// Same bits under a different scale.
    pub fn with_alpha(&self, alpha: Scale) -> Self {
        Self {
            alpha,
            ..self.clone()
        }
    }

    /// Exact decode followed by an exact, saturating re-encode.
    pub fn requantize(&self, len: usize, alpha: Scale) -> Result<Self> {
        Self::encode_exact(self.value(), len, alpha)
    }

    /// Text form written first-to-flip first (`x[L-1]` leftmost), in groups of four.
    pub fn bit_string(&self) -> String {
        let bits = self.bits();
        render_bits(&bits)
    }
}

fn render_bits(bits: &[bool]) -> String {
    let mut out = String::with_capacity(bits.len() + bits.len() / 4);
    for (k, b) in bits.iter().rev().enumerate() {
        if k > 0 && k % 4 == 0 {
            out.push(' ');
        }
        out.push(if *b { '1' } else { '0' });
    }
    out
}

/// Decodes raw wires, rejecting patterns that are not thermometer codes.
pub fn decode_bits(bits: &[bool], alpha: Scale) -> Result<f64> {
    ThermometerStream::from_bits(bits, alpha).map(|s| s.decode())
}

impl fmt::Display for ThermometerStream {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} @ {}", self.bit_string(), self.alpha)
    }
}

impl fmt::Debug for ThermometerStream {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.len <= 64 {
            write!(f, "ThermometerStream(\"{}\", alpha={})", self.bit_string(), self.alpha)
        } else {
            write!(
                f,
                "ThermometerStream(len={}, ones={}, alpha={})",
                self.len, self.ones, self.alpha
            )
        }
    }
}

/// Parses `"1110 0000 @ 1/4"`; the bits are written first-to-flip first and
/// spaces or underscores between them are ignored. Without `@` the scale is 1.
impl FromStr for ThermometerStream {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let (bits_part, alpha) = match s.split_once('@') {
            Some((b, a)) => (b, a.parse::<Scale>()?),
            None => (s, Scale::one()),
        };
        let mut written = Vec::new();
        for c in bits_part.chars() {
            match c {
                '0' => written.push(false),
                '1' => written.push(true),
                ' ' | '_' | '\t' => {}
                other => return Err(Error::Parse(format!("unexpected character {other:?}"))),
            }
        }
        written.reverse();
        Self::from_bits(&written, alpha)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn s(text: &str) -> ThermometerStream {
        text.parse().unwrap()
    }

    #[test]
    fn encode_examples() {
        let zero = ThermometerStream::encode(0.0, 2, Scale::one()).unwrap();
        assert_eq!(zero.bit_string(), "10");
        assert_eq!(zero.ones(), 1);
        assert_eq!(zero.decode(), 0.0);

        let low = ThermometerStream::encode(-4.0, 8, Scale::one()).unwrap();
        assert_eq!(low.ones(), 0);
        assert_eq!(low.decode(), -4.0);

        // round(0.6 / 0.5 + 2) = round(3.2) = 3
        let mid = ThermometerStream::encode(0.6, 4, Scale::frac(1, 2)).unwrap();
        assert_eq!(mid.ones(), 3);
        assert_eq!(mid.decode(), 0.5);
    }

    #[test]
    fn encode_rejects_bad_arguments() {
        assert_eq!(
            ThermometerStream::encode(1.0, 0, Scale::one()),
            Err(Error::ZeroLength)
        );
        assert_eq!(
            ThermometerStream::encode(f64::NAN, 4, Scale::one()),
            Err(Error::NonFinite)
        );
        assert!("0".parse::<Scale>().is_err());
    }

    #[test]
    fn encode_saturates() {
        let hi = ThermometerStream::encode(1e9, 8, Scale::one()).unwrap();
        assert_eq!(hi.ones(), 8);
        let lo = ThermometerStream::encode(f64::NEG_INFINITY, 8, Scale::one()).unwrap();
        assert_eq!(lo.ones(), 0);
    }

    #[test]
    fn ties_round_away_from_zero() {
        let one = Scale::one();
        assert_eq!(ThermometerStream::encode(0.5, 4, one).unwrap().decode(), 1.0);
        assert_eq!(ThermometerStream::encode(-0.5, 4, one).unwrap().decode(), -1.0);
        assert_eq!(ThermometerStream::encode(1.5, 4, one).unwrap().decode(), 2.0);
        let e = ThermometerStream::encode_exact(Ratio::new(-3, 2), 4, one).unwrap();
        assert_eq!(e.decode(), -2.0);
    }

    #[test]
    fn decode_examples() {
        assert_eq!(s("11").decode(), 1.0);
        assert_eq!(s("00").decode(), -1.0);
        assert_eq!(s("1100 0000 @ 1/4").decode(), -0.5);
    }

    #[test]
    fn decode_rejects_non_thermometer_patterns() {
        // x[0] set while x[1] clear
        assert!(matches!(
            decode_bits(&[true, false], Scale::one()),
            Err(Error::NotThermometer(_))
        ));
        assert!("0110".parse::<ThermometerStream>().is_err());
    }

    #[test]
    fn bit_layout_follows_fill_convention() {
        let st = ThermometerStream::new(8, 3, Scale::one()).unwrap();
        assert_eq!(
            st.bits(),
            vec![false, false, false, false, false, true, true, true]
        );
        assert_eq!(st.bit_string(), "1110 0000");
        assert_eq!(st.to_string(), "1110 0000 @ 1/1");
    }

    #[test]
    fn negate_examples() {
        assert_eq!(s("10").negate().bit_string(), "10");
        assert_eq!(s("11").negate().bit_string(), "00");
        let n3 = ThermometerStream::new(8, 3, Scale::one()).unwrap();
        assert_eq!(n3.negate().ones(), 5);
    }

    #[test]
    fn negate_is_complement_then_reverse() {
        for n in 0..=8 {
            let st = ThermometerStream::new(8, n, Scale::frac(1, 3)).unwrap();
            let mut wires: Vec<bool> = st.bits().iter().map(|b| !b).collect();
            wires.reverse();
            assert_eq!(st.negate().bits(), wires);
            assert_eq!(st.negate().value(), -st.value());
        }
    }

    #[test]
    fn scale_by_constant_examples() {
        let c3 = Scale::integer(3).unwrap();
        let v = ThermometerStream::encode(0.75, 8, Scale::frac(1, 4)).unwrap();
        let out = v.scale_by_constant(c3);
        assert_eq!(out.bits(), v.bits());
        assert_eq!(out.value(), Ratio::new(1, 4));

        let zero = ThermometerStream::encode(0.0, 6, Scale::one()).unwrap();
        assert_eq!(zero.scale_by_constant(c3).decode(), 0.0);

        let neg = s("00");
        assert_eq!(neg.scale_by_constant(Scale::integer(2).unwrap()).decode(), -0.5);
    }

    #[test]
    fn requantize_examples() {
        let a = Scale::frac(1, 4);
        let on_grid = ThermometerStream::new(8, 5, a).unwrap();
        assert_eq!(on_grid.requantize(8, a).unwrap(), on_grid);

        let fine = ThermometerStream::new(200, 130, Scale::frac(1, 100)).unwrap();
        assert_eq!(fine.decode(), 0.3);
        assert_eq!(fine.requantize(8, a).unwrap().decode(), 0.25);

        let big = ThermometerStream::new(8, 8, Scale::one()).unwrap();
        assert_eq!(big.requantize(4, a).unwrap().ones(), 4);
    }

    #[test]
    fn roundtrip_exhaustive_small_lengths() {
        for len in 1..=64usize {
            for alpha in [Scale::one(), Scale::frac(1, 4), Scale::frac(3, 7)] {
                for n in 0..=len {
                    let st = ThermometerStream::new(len, n, alpha).unwrap();
                    let again = ThermometerStream::encode(st.decode(), len, alpha).unwrap();
                    assert_eq!(again, st, "len={len} n={n} alpha={alpha}");
                    assert_eq!(
                        ThermometerStream::encode_exact(st.value(), len, alpha).unwrap(),
                        st
                    );
                }
            }
        }
    }

    proptest! {
        #[test]
        fn quantization_bound(v in -10.0f64..10.0, len in 1usize..64, den in 1u64..9) {
            let alpha = Scale::frac(1, den);
            let st = ThermometerStream::encode(v, len, alpha).unwrap();
            let a = alpha.to_f64();
            let top = a * len as f64 / 2.0;
            let err = (st.decode() - v).abs();
            if v.abs() <= top {
                prop_assert!(err <= a / 2.0 + 1e-12);
            } else {
                prop_assert!((err - (v.abs() - top)).abs() < 1e-9);
            }
        }

        #[test]
        fn negate_is_an_involution(len in 1usize..200, frac in 0.0f64..=1.0) {
            let n = (frac * len as f64) as usize;
            let st = ThermometerStream::new(len, n, Scale::frac(2, 3)).unwrap();
            prop_assert_eq!(st.negate().negate(), st);
        }

        #[test]
        fn text_form_roundtrips(len in 1usize..40, frac in 0.0f64..=1.0, num in 1u64..20, den in 1u64..20) {
            let n = (frac * len as f64) as usize;
            let st = ThermometerStream::new(len, n, Scale::frac(num, den)).unwrap();
            let back: ThermometerStream = st.to_string().parse().unwrap();
            prop_assert_eq!(back, st);
        }
    }
}
