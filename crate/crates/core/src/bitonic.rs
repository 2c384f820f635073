//! Wire-level bitonic sorting network on single-bit lanes.
//!
//! A compare-exchange on bits is an AND (min) and an OR (max). Sorting into
//! ascending index order leaves the ones at the high indices, which is the
//! thermometer fill convention used throughout the crate.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Structure of one bitonic sorting network.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct BsnTrace {
    pub total_bits: usize,
    pub stage_count: usize,
    pub compare_exchange_count: usize,
}

impl BsnTrace {
    /// Closed-form structure for `n` lanes (`n` a power of two, at least 2).
    pub fn for_width(n: usize) -> Result<Self> {
        if n < 2 || !n.is_power_of_two() {
            return Err(Error::Config(format!(
                "bitonic network width {n} is not a power of two >= 2"
            )));
        }
        let lg = n.trailing_zeros() as usize;
        let stage_count = lg * (lg + 1) / 2;
        Ok(Self {
            total_bits: n,
            stage_count,
            compare_exchange_count: n / 2 * stage_count,
        })
    }
}

/// Sorts `lanes` in place by running every compare-exchange of the network,
/// and reports the structure that was actually executed.
pub fn sort_bits(lanes: &mut [bool]) -> Result<BsnTrace> {
    let n = lanes.len();
    if n < 2 || !n.is_power_of_two() {
        return Err(Error::Config(format!(
            "bitonic network width {n} is not a power of two >= 2"
        )));
    }
    let mut stages = 0;
    let mut exchanges = 0;
    let mut block = 2;
    while block <= n {
        let mut stride = block / 2;
        while stride >= 1 {
            stages += 1;
            for i in 0..n {
                let partner = i ^ stride;
                if partner <= i {
                    continue;
                }
                exchanges += 1;
                let (a, b) = (lanes[i], lanes[partner]);
                let (lo, hi) = (a & b, a | b);
                if i & block == 0 {
                    lanes[i] = lo;
                    lanes[partner] = hi;
                } else {
                    lanes[i] = hi;
                    lanes[partner] = lo;
                }
            }
            stride /= 2;
        }
        block *= 2;
    }
    Ok(BsnTrace {
        total_bits: n,
        stage_count: stages,
        compare_exchange_count: exchanges,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn closed_form_small_widths() {
        let t2 = BsnTrace::for_width(2).unwrap();
        assert_eq!((t2.compare_exchange_count, t2.stage_count), (1, 1));
        let t4 = BsnTrace::for_width(4).unwrap();
        assert_eq!((t4.compare_exchange_count, t4.stage_count), (6, 3));
        let t8 = BsnTrace::for_width(8).unwrap();
        assert_eq!((t8.compare_exchange_count, t8.stage_count), (24, 6));
    }

    #[test]
    fn executed_network_matches_closed_form() {
        let mut n = 4;
        while n <= 1024 {
            let mut lanes = vec![false; n];
            let run = sort_bits(&mut lanes).unwrap();
            assert_eq!(run, BsnTrace::for_width(n).unwrap());
            n *= 2;
        }
    }

    #[test]
    fn rejects_non_power_of_two() {
        assert!(BsnTrace::for_width(6).is_err());
        assert!(sort_bits(&mut [true; 3]).is_err());
    }

    proptest! {
        #[test]
        fn sorts_any_bit_multiset(
            mut lanes in (1u32..9).prop_flat_map(|lg| prop::collection::vec(any::<bool>(), 1usize << lg))
        ) {
            let n = lanes.len();
            let ones = lanes.iter().filter(|b| **b).count();
            sort_bits(&mut lanes).unwrap();
            let expect: Vec<bool> = (0..n).map(|i| i >= n - ones).collect();
            prop_assert_eq!(lanes, expect);
        }
    }
}
