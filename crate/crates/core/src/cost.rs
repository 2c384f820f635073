//! Relative hardware cost proxy: 2-input gate equivalents, logic levels, and
//! their product.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::bitonic::BsnTrace;
use crate::error::{Error, Result};
use crate::gelu::{ceil_log2, SIConfig};
use crate::softmax::{self, SoftmaxConfig};

/// Per-primitive weights. Every field may be omitted in a profile file.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CostProfile {
    /// Gates per compare-exchange (one AND plus one OR on single bits).
    pub compare_exchange_gates: u64,
    pub not_gate: u64,
    pub and_gate: u64,
    pub or_gate: u64,
    /// Gates per truth-table entry of a multiplier.
    pub multiplier_entry_gates: u64,
    /// Gates of one sub-sample or window block (pure wiring by default).
    pub reducer_gates: u64,
    /// Gates of one re-scaler or requantizer.
    pub rescaler_gates: u64,
}

impl Default for CostProfile {
    fn default() -> Self {
        Self {
            compare_exchange_gates: 2,
            not_gate: 1,
            and_gate: 1,
            or_gate: 1,
            multiplier_entry_gates: 1,
            reducer_gates: 0,
            rescaler_gates: 0,
        }
    }
}

impl CostProfile {
    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Part {
    pub gates: u64,
    pub depth: u64,
}

/// Totals plus a breakdown along the critical path; both gates and depth of
/// the parts add up to the totals.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct CostReport {
    pub gate_count: u64,
    pub depth: u64,
    pub adp_proxy: u64,
    pub breakdown: BTreeMap<String, Part>,
}

impl CostReport {
    fn from_parts(parts: Vec<(&str, Part)>) -> Self {
        let mut breakdown = BTreeMap::new();
        for (name, part) in parts {
            let e: &mut Part = breakdown.entry(name.to_string()).or_default();
            e.gates += part.gates;
            e.depth += part.depth;
        }
        let gate_count = breakdown.values().map(|p| p.gates).sum();
        let depth = breakdown.values().map(|p| p.depth).sum();
        Self {
            gate_count,
            depth,
            adp_proxy: gate_count * depth,
            breakdown,
        }
    }

    fn repeated(&self, times: u64) -> Self {
        let parts = self
            .breakdown
            .iter()
            .map(|(n, p)| {
                (
                    n.as_str(),
                    Part {
                        gates: p.gates * times,
                        depth: p.depth * times,
                    },
                )
            })
            .collect();
        Self::from_parts(parts)
    }
}

fn bsn_part(trace: &BsnTrace, profile: &CostProfile) -> Part {
    Part {
        gates: trace.compare_exchange_count as u64 * profile.compare_exchange_gates,
        depth: trace.stage_count as u64,
    }
}

pub fn cost_bsn(total_bits: usize, profile: &CostProfile) -> Result<CostReport> {
    let trace = BsnTrace::for_width(total_bits)?;
    Ok(CostReport::from_parts(vec![("bsn", bsn_part(&trace, profile))]))
}

/// Truth-table multiplier for operands of `a` and `b` bits.
pub fn multiplier_part(a: usize, b: usize, profile: &CostProfile) -> Part {
    let entries = (a + 1) * (b + 1);
    Part {
        gates: entries as u64 * profile.multiplier_entry_gates,
        depth: ceil_log2(entries) as u64,
    }
}

pub fn cost_si(cfg: &SIConfig, profile: &CostProfile) -> CostReport {
    let g = cfg.gates();
    let gates =
        g.not as u64 * profile.not_gate + g.and as u64 * profile.and_gate + g.or as u64 * profile.or_gate;
    CostReport::from_parts(vec![(
        "assist",
        Part {
            gates,
            depth: cfg.depth() as u64,
        },
    )])
}

/// Cost of the full block: `k` unrolled copies of one general iteration.
pub fn cost_softmax(cfg: &SoftmaxConfig, profile: &CostProfile) -> Result<CostReport> {
    let plan = softmax::plan(cfg)?;
    let width = |name: &str| {
        plan.stage(name)
            .map(|s| s.len)
            .ok_or_else(|| Error::Config(format!("missing stage {name}")))
    };
    let m = cfg.m as u64;
    let lanes = |p: Part| Part {
        gates: p.gates * m,
        depth: p.depth,
    };
    let mult1 = multiplier_part(cfg.b_x, cfg.b_y, profile);
    let mult2 = multiplier_part(cfg.b_y, width("sum_z_reduced")?, profile);
    let reducer = Part {
        gates: profile.reducer_gates,
        depth: 0,
    };
    let rescaler = Part {
        gates: profile.rescaler_gates,
        depth: 0,
    };
    let parts = vec![
        ("multiplier1", lanes(mult1)),
        ("bsn1", bsn_part(&plan.bsn1, profile)),
        ("s1", reducer),
        ("multiplier2", lanes(mult2)),
        ("s2", lanes(reducer)),
        (
            "rescalers",
            Part {
                gates: 2 * m * rescaler.gates,
                depth: 0,
            },
        ),
        ("bsn2", lanes(bsn_part(&plan.bsn2, profile))),
        ("requantizer", lanes(rescaler)),
    ];
    Ok(CostReport::from_parts(parts).repeated(cfg.k as u64))
}
