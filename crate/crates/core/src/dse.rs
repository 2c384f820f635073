//! Design-space sweep over softmax configurations and Pareto extraction.

use std::io::Write;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::cost::{cost_softmax, CostProfile};
use crate::error::{Error, Result};
use crate::eval::{gen_vectors, mae_softmax, Distribution};
use crate::scale::Scale;
use crate::softmax::{FirstIteration, Rescale, SoftmaxConfig};

fn powers_of_two() -> Vec<usize> {
    (0..9).map(|e| 1 << e).collect()
}

fn default_y_range() -> Option<Scale> {
    Some(Scale::frac(1, 32))
}

fn default_dist() -> Distribution {
    Distribution::Gaussian {
        mu: 0.0,
        sigma: 1.0,
        clip: 4.0,
    }
}

/// Parameter lists and the fixed settings shared by every point.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GridSpec {
    pub m: usize,
    pub b_x: usize,
    pub alpha_x: Option<Scale>,
    pub b_y: Vec<usize>,
    pub s1: Vec<usize>,
    pub s2: Vec<usize>,
    pub k: Vec<usize>,
    /// State range `R`; each point uses `alpha_y = 2R / B_y`. Without it the
    /// config default `alpha_y = 2 / B_y` applies.
    pub y_range: Option<Scale>,
    pub rescale: Rescale,
    pub first_iteration: FirstIteration,
    pub dist: Distribution,
    pub count: usize,
    pub seed: u64,
}

impl Default for GridSpec {
    fn default() -> Self {
        Self {
            m: 64,
            b_x: 4,
            alpha_x: None,
            b_y: vec![4, 8, 16, 32],
            s1: powers_of_two(),
            s2: powers_of_two(),
            k: (1..=9).collect(),
            y_range: default_y_range(),
            rescale: Rescale::Window,
            first_iteration: FirstIteration::Auto,
            dist: default_dist(),
            count: 32,
            seed: 1,
        }
    }
}

impl GridSpec {
    pub fn from_json(text: &str) -> Result<Self> {
        let spec: Self = serde_json::from_str(text)?;
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        for (name, list) in [("b_y", &self.b_y), ("s1", &self.s1), ("s2", &self.s2), ("k", &self.k)] {
            if list.is_empty() {
                return Err(Error::Config(format!("grid list {name} is empty")));
            }
        }
        if self.count == 0 {
            return Err(Error::Config("count must be at least 1".into()));
        }
        if self.size() > 1_000_000 {
            return Err(Error::Config(format!("grid of {} points is too large", self.size())));
        }
        Ok(())
    }

    pub fn size(&self) -> usize {
        [&self.b_y, &self.s1, &self.s2, &self.k]
            .iter()
            .fold(1usize, |acc, l| acc.saturating_mul(l.len()))
    }

    fn config(&self, b_y: usize, s1: usize, s2: usize, k: usize) -> SoftmaxConfig {
        let mut cfg = SoftmaxConfig::new(self.m, k, self.b_x, b_y, s1, s2)
            .with_rescale(self.rescale)
            .with_first_iteration(self.first_iteration);
        if let Some(a) = self.alpha_x {
            cfg = cfg.with_alpha_x(a);
        }
        if let Some(r) = self.y_range {
            cfg = cfg.with_alpha_y(r * 2 / b_y.max(1) as u64);
        }
        cfg
    }
}

/// Cartesian product in lexicographic order of `(B_y, s1, s2, k)`.
pub fn enumerate_grid(spec: &GridSpec) -> Vec<SoftmaxConfig> {
    let mut out = Vec::with_capacity(spec.size());
    for &b_y in &spec.b_y {
        for &s1 in &spec.s1 {
            for &s2 in &spec.s2 {
                for &k in &spec.k {
                    out.push(spec.config(b_y, s1, s2, k));
                }
            }
        }
    }
    out
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ParetoPoint {
    pub index: usize,
    pub cfg: SoftmaxConfig,
    pub realizable: bool,
    pub adp_proxy: Option<u64>,
    pub gate_count: Option<u64>,
    pub depth: Option<u64>,
    pub mae: Option<f64>,
    pub max_abs_error: Option<f64>,
    /// Why the point was excluded, when it was.
    pub reason: Option<String>,
}

impl ParetoPoint {
    fn objectives(&self) -> Option<(u64, f64)> {
        Some((self.adp_proxy?, self.mae?))
    }
}

fn evaluate_one(
    index: usize,
    cfg: SoftmaxConfig,
    vectors: &[Vec<f64>],
    spec: &GridSpec,
    profile: &CostProfile,
) -> Result<ParetoPoint> {
    let unrealizable = |cfg: SoftmaxConfig, e: Error| ParetoPoint {
        index,
        cfg,
        realizable: false,
        adp_proxy: None,
        gate_count: None,
        depth: None,
        mae: None,
        max_abs_error: None,
        reason: Some(e.to_string()),
    };
    let cost = match cost_softmax(&cfg, profile) {
        Ok(c) => c,
        Err(e) if e.is_unrealizable() => return Ok(unrealizable(cfg, e)),
        Err(e) => return Err(e),
    };
    let report = match mae_softmax(&cfg, vectors, &spec.dist, spec.seed) {
        Ok(r) => r,
        Err(e) if e.is_unrealizable() => return Ok(unrealizable(cfg, e)),
        Err(e) => return Err(e),
    };
    Ok(ParetoPoint {
        index,
        cfg,
        realizable: true,
        adp_proxy: Some(cost.adp_proxy),
        gate_count: Some(cost.gate_count),
        depth: Some(cost.depth),
        mae: Some(report.mae),
        max_abs_error: Some(report.max_abs_error),
        reason: None,
    })
}

/// Evaluates every grid point; results are in grid order whatever the
/// number of worker threads.
pub fn evaluate_grid(spec: &GridSpec, profile: &CostProfile) -> Result<Vec<ParetoPoint>> {
    spec.validate()?;
    let vectors = gen_vectors(&spec.dist, spec.m, spec.count, spec.seed)?;
    enumerate_grid(spec)
        .into_par_iter()
        .enumerate()
        .map(|(i, cfg)| evaluate_one(i, cfg, &vectors, spec, profile))
        .collect()
}

/// Indices of the non-dominated realizable points (minimizing ADP proxy and
/// MAE), in increasing-cost order. Of points tied on both objectives only
/// the earliest in grid order is kept.
pub fn pareto_front(points: &[ParetoPoint]) -> Result<Vec<usize>> {
    let mut live: Vec<(u64, f64, usize)> = points
        .iter()
        .filter_map(|p| p.objectives().map(|(a, m)| (a, m, p.index)))
        .collect();
    if live.is_empty() {
        return Err(Error::Config("no realizable design points".into()));
    }
    live.sort_by(|a, b| a.0.cmp(&b.0).then(a.1.total_cmp(&b.1)).then(a.2.cmp(&b.2)));
    let mut front = Vec::new();
    let mut best = f64::INFINITY;
    for (_, mae, index) in live {
        if mae < best {
            best = mae;
            front.push(index);
        }
    }
    Ok(front)
}

fn opt<T: ToString>(v: &Option<T>) -> String {
    v.as_ref().map(|x| x.to_string()).unwrap_or_default()
}

/// One row per point. `header` lines are written first, each prefixed `# `.
pub fn write_csv<W: Write>(
    out: W,
    points: &[ParetoPoint],
    front: &[usize],
    header: &[String],
) -> Result<()> {
    let mut out = out;
    for line in header {
        writeln!(out, "# {line}")?;
    }
    let mut w = csv::Writer::from_writer(out);
    w.write_record([
        "index", "m", "b_x", "b_y", "s1", "s2", "k", "alpha_x", "alpha_y", "realizable",
        "gate_count", "depth", "adp_proxy", "mae", "max_abs_error", "on_front", "reason",
    ])?;
    for p in points {
        let c = &p.cfg;
        w.write_record([
            p.index.to_string(),
            c.m.to_string(),
            c.b_x.to_string(),
            c.b_y.to_string(),
            c.s1.to_string(),
            c.s2.to_string(),
            c.k.to_string(),
            c.alpha_x.to_string(),
            c.alpha_y.to_string(),
            p.realizable.to_string(),
            opt(&p.gate_count),
            opt(&p.depth),
            opt(&p.adp_proxy),
            opt(&p.mae),
            opt(&p.max_abs_error),
            front.contains(&p.index).to_string(),
            p.reason.clone().unwrap_or_default(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn point(index: usize, adp: Option<u64>, mae: Option<f64>) -> ParetoPoint {
        ParetoPoint {
            index,
            cfg: SoftmaxConfig::new(4, 1, 4, 8, 1, 1),
            realizable: adp.is_some(),
            adp_proxy: adp,
            gate_count: None,
            depth: None,
            mae,
            max_abs_error: None,
            reason: None,
        }
    }

    #[test]
    fn default_grid_has_2916_points() {
        let spec = GridSpec::default();
        assert_eq!(spec.size(), 2916);
        let cfgs = enumerate_grid(&spec);
        assert_eq!(cfgs.len(), 2916);
        assert_eq!((cfgs[0].b_y, cfgs[0].s1, cfgs[0].s2, cfgs[0].k), (4, 1, 1, 1));
        assert_eq!((cfgs[1].b_y, cfgs[1].k), (4, 2));
        assert_eq!((cfgs[2915].b_y, cfgs[2915].s1, cfgs[2915].s2, cfgs[2915].k), (32, 256, 256, 9));
        assert_eq!(cfgs, enumerate_grid(&spec));
    }

    #[test]
    fn singleton_grid() {
        let spec = GridSpec {
            b_y: vec![8],
            s1: vec![32],
            s2: vec![8],
            k: vec![3],
            ..GridSpec::default()
        };
        let cfgs = enumerate_grid(&spec);
        assert_eq!(cfgs.len(), 1);
        assert_eq!(cfgs[0].alpha_y, Scale::frac(1, 128));
    }

    #[test]
    fn front_examples() {
        assert_eq!(pareto_front(&[point(0, Some(5), Some(0.1))]).unwrap(), vec![0]);
        let pts = [point(0, Some(5), Some(0.1)), point(1, Some(6), Some(0.2))];
        assert_eq!(pareto_front(&pts).unwrap(), vec![0]);
        let pts = [
            point(0, Some(5), Some(0.3)),
            point(1, Some(6), Some(0.2)),
            point(2, Some(6), Some(0.2)),
            point(3, None, None),
            point(4, Some(7), Some(0.25)),
            point(5, Some(5), Some(0.3)),
        ];
        assert_eq!(pareto_front(&pts).unwrap(), vec![0, 1]);
        assert!(pareto_front(&[point(0, None, None)]).is_err());
    }

    #[test]
    fn grid_spec_json() {
        let spec = GridSpec::from_json(r#"{"b_y": [8], "k": [1, 2]}"#).unwrap();
        assert_eq!(spec.size(), 81 * 2);
        assert_eq!(spec.m, 64);
        assert!(GridSpec::from_json(r#"{"b_y": []}"#).is_err());
        assert!(GridSpec::from_json(r#"{"by": [8]}"#).is_err());
        let text = serde_json::to_string(&GridSpec::default()).unwrap();
        assert_eq!(GridSpec::from_json(&text).unwrap(), GridSpec::default());
    }

    #[test]
    fn small_sweep_writes_csv() {
        let spec = GridSpec {
            m: 8,
            b_y: vec![8, 16],
            s1: vec![1, 4, 3],
            s2: vec![1],
            k: vec![1, 2],
            count: 4,
            ..GridSpec::default()
        };
        let points = evaluate_grid(&spec, &CostProfile::default()).unwrap();
        assert_eq!(points.len(), 12);
        assert!(points.iter().any(|p| !p.realizable && p.reason.is_some()));
        let front = pareto_front(&points).unwrap();
        let mut buf = Vec::new();
        write_csv(&mut buf, &points, &front, &["manifest_digest=abc".into()]).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.starts_with("# manifest_digest=abc\nindex,"));
        assert_eq!(text.lines().count(), 14);
    }
}
