//! Command-line front end.
//!
//! Every subcommand first resolves its flags into a [`Job`] with all
//! defaults filled in. With `--out DIR` the job's files are written there
//! together with `manifest.json`; `replay` re-runs a manifest and rewrites
//! the same bytes.

use std::ffi::OsString;
use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use clap::{Args, Parser, Subcommand};
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::bernstein::fit_bernstein;
use crate::cost::{cost_bsn, cost_si, cost_softmax, CostProfile};
use crate::dse::{evaluate_grid, pareto_front, write_csv, GridSpec};
use crate::error::{Error, Result};
use crate::eval::{
    digest, gen_samples, gen_vectors, mae_gelu, mae_softmax, Distribution, GeluBlock,
};
use crate::gelu::{default_alpha_in, default_alpha_out, gelu, SIConfig};
use crate::scale::Scale;
use crate::softmax::{
    self, AlphaSchedule, FirstIteration, Rescale, SoftmaxConfig,
};
use crate::stream::ThermometerStream;

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_UNREALIZABLE: i32 = 3;
pub const EXIT_IO: i32 = 4;

pub const MANIFEST_FILE: &str = "manifest.json";

#[derive(Debug, Parser)]
#[command(name = "sc-forge", version, about = "Thermometer-coded stochastic computing blocks")]
pub struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Encode a real value as a thermometer stream.
    Encode(EncodeArgs),
    /// Decode a stream written as "1110 0000 @ 1/4".
    Decode(DecodeArgs),
    /// Synthesize and evaluate a selective-interconnect GELU block.
    Gelu(GeluArgs),
    /// Run the iterative softmax datapath and report its error.
    Softmax(SoftmaxCmdArgs),
    /// Sweep a grid of softmax configurations and extract the Pareto front.
    Dse(DseArgs),
    /// Report the hardware cost proxy of a block.
    Cost {
        #[command(subcommand)]
        block: CostCommand,
    },
    /// Re-run a manifest and rewrite its outputs.
    Replay(ReplayArgs),
}

#[derive(Debug, Args)]
struct OutArg {
    /// Directory for output files and the run manifest.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct EncodeArgs {
    #[arg(long, allow_hyphen_values = true)]
    value: f64,
    #[arg(long)]
    len: usize,
    #[arg(long, default_value = "1")]
    alpha: Scale,
    #[command(flatten)]
    out: OutArg,
}

#[derive(Debug, Args)]
struct DecodeArgs {
    stream: String,
    #[command(flatten)]
    out: OutArg,
}

/// `bernstein:TERMS:BSL`
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct BaselineSpec {
    pub terms: usize,
    pub bsl: usize,
}

impl FromStr for BaselineSpec {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::Parse(format!("baseline {s:?}: expected bernstein:TERMS:BSL"));
        let parts: Vec<&str> = s.split(':').collect();
        match parts.as_slice() {
            ["bernstein", t, b] => {
                let terms: usize = t.parse().map_err(|_| bad())?;
                let bsl: usize = b.parse().map_err(|_| bad())?;
                if terms < 2 || bsl == 0 {
                    return Err(bad());
                }
                Ok(Self { terms, bsl })
            }
            _ => Err(bad()),
        }
    }
}

#[derive(Debug, Args)]
struct GeluShape {
    #[arg(long)]
    bsl_in: usize,
    #[arg(long)]
    bsl_out: usize,
    /// Defaults to 8 / bsl-in.
    #[arg(long)]
    alpha_in: Option<Scale>,
    /// Defaults to 8 / bsl-out, or 1/5 when bsl-out is 2.
    #[arg(long)]
    alpha_out: Option<Scale>,
}

#[derive(Debug, Args)]
struct GeluArgs {
    #[command(flatten)]
    shape: GeluShape,
    #[arg(long, default_value = "uniform:-4:4", allow_hyphen_values = true)]
    dist: Distribution,
    #[arg(long, default_value_t = 10_000)]
    samples: usize,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// Also evaluate a stochastic baseline, e.g. bernstein:4:1024.
    #[arg(long)]
    baseline: Option<BaselineSpec>,
    #[command(flatten)]
    out: OutArg,
}

#[derive(Debug, Args)]
struct SoftmaxArgs {
    #[arg(long, default_value_t = 64)]
    m: usize,
    #[arg(long)]
    k: usize,
    #[arg(long)]
    bx: usize,
    #[arg(long)]
    by: usize,
    #[arg(long)]
    s1: usize,
    #[arg(long)]
    s2: usize,
    /// Defaults to 8 / bx.
    #[arg(long)]
    alpha_x: Option<Scale>,
    /// Defaults to 2 / by.
    #[arg(long, conflicts_with = "y_range")]
    alpha_y: Option<Scale>,
    /// State range R; sets alpha_y = 2R / by.
    #[arg(long)]
    y_range: Option<Scale>,
    #[arg(long, default_value = "window")]
    rescale: Rescale,
    #[arg(long, default_value = "auto")]
    first_iteration: FirstIteration,
    #[arg(long, default_value = "fixed")]
    alpha_schedule: AlphaSchedule,
}

impl SoftmaxArgs {
    fn config(&self) -> SoftmaxConfig {
        let mut cfg = SoftmaxConfig::new(self.m, self.k, self.bx, self.by, self.s1, self.s2)
            .with_rescale(self.rescale)
            .with_first_iteration(self.first_iteration)
            .with_alpha_schedule(self.alpha_schedule);
        if let Some(a) = self.alpha_x {
            cfg = cfg.with_alpha_x(a);
        }
        if let Some(a) = self.alpha_y {
            cfg = cfg.with_alpha_y(a);
        }
        if let Some(r) = self.y_range {
            cfg = cfg.with_alpha_y(r * 2 / self.by.max(1) as u64);
        }
        cfg
    }
}

#[derive(Debug, Args)]
struct SoftmaxCmdArgs {
    #[command(flatten)]
    block: SoftmaxArgs,
    /// Defaults to gaussian:0:1:C with C the input window half-width.
    #[arg(long, allow_hyphen_values = true)]
    dist: Option<Distribution>,
    #[arg(long, default_value_t = 100)]
    count: usize,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// Also write per-vector outputs next to both references.
    #[arg(long)]
    trace: bool,
    #[command(flatten)]
    out: OutArg,
}

#[derive(Debug, Args)]
struct ProfileArg {
    /// JSON file overriding per-primitive gate weights.
    #[arg(long)]
    cost_profile: Option<PathBuf>,
}

impl ProfileArg {
    fn load(&self) -> Result<CostProfile> {
        match &self.cost_profile {
            Some(p) => CostProfile::from_json(&read_text(p)?),
            None => Ok(CostProfile::default()),
        }
    }
}

#[derive(Debug, Args)]
struct DseArgs {
    /// Grid spec JSON; the built-in 2916-point grid when omitted.
    #[arg(long)]
    grid: Option<PathBuf>,
    #[command(flatten)]
    profile: ProfileArg,
    #[command(flatten)]
    out: OutArg,
}

#[derive(Debug, Subcommand)]
enum CostCommand {
    /// Bitonic sorting network of the given width.
    Bsn {
        #[arg(long)]
        bits: usize,
        #[command(flatten)]
        profile: ProfileArg,
        #[command(flatten)]
        out: OutArg,
    },
    /// Selective-interconnect GELU block.
    Gelu {
        #[command(flatten)]
        shape: GeluShape,
        #[command(flatten)]
        profile: ProfileArg,
        #[command(flatten)]
        out: OutArg,
    },
    /// Softmax block.
    Softmax {
        #[command(flatten)]
        block: SoftmaxArgs,
        #[command(flatten)]
        profile: ProfileArg,
        #[command(flatten)]
        out: OutArg,
    },
}

#[derive(Debug, Args)]
struct ReplayArgs {
    manifest: PathBuf,
    /// Where to write the regenerated files.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EncodeJob {
    pub value: f64,
    pub len: usize,
    pub alpha: Scale,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecodeJob {
    pub stream: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GeluJob {
    pub b_in: usize,
    pub b_out: usize,
    pub alpha_in: Scale,
    pub alpha_out: Scale,
    pub dist: Distribution,
    pub samples: usize,
    pub seed: u64,
    pub baseline: Option<BaselineSpec>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SoftmaxJob {
    pub block: SoftmaxConfig,
    pub dist: Distribution,
    pub count: usize,
    pub seed: u64,
    pub trace: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DseJob {
    pub grid: GridSpec,
    pub profile: CostProfile,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CostBsnJob {
    pub bits: usize,
    pub profile: CostProfile,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CostGeluJob {
    pub b_in: usize,
    pub b_out: usize,
    pub alpha_in: Scale,
    pub alpha_out: Scale,
    pub profile: CostProfile,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CostSoftmaxJob {
    pub block: SoftmaxConfig,
    pub profile: CostProfile,
}

/// A fully resolved run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "subcommand", content = "config", rename_all = "kebab-case")]
pub enum Job {
    Encode(EncodeJob),
    Decode(DecodeJob),
    Gelu(GeluJob),
    Softmax(SoftmaxJob),
    Dse(DseJob),
    CostBsn(CostBsnJob),
    CostGelu(CostGeluJob),
    CostSoftmax(CostSoftmaxJob),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub subcommand: String,
    pub config: Value,
    pub seed: Option<u64>,
    pub tool_version: String,
    /// File names relative to the manifest's directory.
    pub outputs: Vec<String>,
}

impl RunManifest {
    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn job(&self) -> Result<Job> {
        let tagged = json!({ "subcommand": self.subcommand, "config": self.config });
        Ok(serde_json::from_value(tagged)?)
    }

    pub fn digest(&self) -> String {
        digest(self)
    }
}

fn read_text(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))
}

/// JSON object with the manifest digest as an extra top-level key.
fn stamped<T: Serialize>(value: &T, manifest_digest: &str) -> Result<Vec<u8>> {
    let mut v = serde_json::to_value(value)?;
    match &mut v {
        Value::Object(map) => {
            map.insert("manifest_digest".into(), Value::String(manifest_digest.into()));
        }
        other => {
            v = json!({ "manifest_digest": manifest_digest, "value": other.take() });
        }
    }
    let mut bytes = serde_json::to_vec_pretty(&v)?;
    bytes.push(b'\n');
    Ok(bytes)
}

impl Job {
    pub fn seed(&self) -> Option<u64> {
        match self {
            Job::Gelu(j) => Some(j.seed),
            Job::Softmax(j) => Some(j.seed),
            Job::Dse(j) => Some(j.grid.seed),
            _ => None,
        }
    }

    pub fn output_names(&self) -> Vec<String> {
        let names: &[&str] = match self {
            Job::Encode(_) => &["encode.json"],
            Job::Decode(_) => &["decode.json"],
            Job::Gelu(j) if j.baseline.is_some() => &[
                "si_eval.json",
                "si_config.json",
                "si_cost.json",
                "bernstein_eval.json",
                "bernstein_config.json",
            ],
            Job::Gelu(_) => &["si_eval.json", "si_config.json", "si_cost.json"],
            Job::Softmax(j) if j.trace => &[
                "softmax_eval.json",
                "softmax_cost.json",
                "softmax_plan.json",
                "softmax_trace.json",
            ],
            Job::Softmax(_) => &["softmax_eval.json", "softmax_cost.json", "softmax_plan.json"],
            Job::Dse(_) => &["dse_front.json", "dse_results.csv"],
            Job::CostBsn(_) | Job::CostGelu(_) | Job::CostSoftmax(_) => &["cost.json"],
        };
        names.iter().map(|s| s.to_string()).collect()
    }

    pub fn manifest(&self) -> Result<RunManifest> {
        let tagged = serde_json::to_value(self)?;
        Ok(RunManifest {
            subcommand: tagged["subcommand"].as_str().unwrap_or_default().to_string(),
            config: tagged["config"].clone(),
            seed: self.seed(),
            tool_version: env!("CARGO_PKG_VERSION").to_string(),
            outputs: self.output_names(),
        })
    }

    /// Output files, in the order of [`Job::output_names`].
    pub fn execute(&self, manifest_digest: &str) -> Result<Vec<Vec<u8>>> {
        let d = manifest_digest;
        match self {
            Job::Encode(j) => {
                let s = ThermometerStream::encode(j.value, j.len, j.alpha)?;
                Ok(vec![stamped(
                    &json!({
                        "stream": s.to_string(),
                        "ones": s.ones(),
                        "len": s.len(),
                        "alpha": s.alpha(),
                        "decoded": s.decode(),
                    }),
                    d,
                )?])
            }
            Job::Decode(j) => {
                let s: ThermometerStream = j.stream.parse()?;
                Ok(vec![stamped(
                    &json!({
                        "stream": s.to_string(),
                        "ones": s.ones(),
                        "len": s.len(),
                        "alpha": s.alpha(),
                        "value": s.decode(),
                        "exact": s.value().to_string(),
                    }),
                    d,
                )?])
            }
            Job::Gelu(j) => {
                let cfg = SIConfig::synthesize(gelu, j.b_in, j.b_out, j.alpha_in, j.alpha_out)?;
                let samples = gen_samples(&j.dist, j.samples, j.seed)?;
                let report = mae_gelu(&GeluBlock::Si(&cfg), &samples, &j.dist, j.seed)?;
                let cost = cost_si(&cfg, &CostProfile::default());
                let mut files = vec![
                    stamped(&report, d)?,
                    stamped(
                        &json!({ "config": cfg, "equations": cfg.equations(), "gates": cfg.gates() }),
                        d,
                    )?,
                    stamped(&cost, d)?,
                ];
                if let Some(b) = j.baseline {
                    let lo = -j.alpha_in.to_f64() * j.b_in as f64 / 2.0;
                    let base = fit_bernstein(gelu, b.terms - 1, (lo, -lo), b.bsl)?;
                    let report = mae_gelu(&GeluBlock::Bernstein(&base), &samples, &j.dist, j.seed)?;
                    files.push(stamped(&report, d)?);
                    files.push(stamped(&base, d)?);
                }
                Ok(files)
            }
            Job::Softmax(j) => {
                let cfg = &j.block;
                let plan = softmax::plan(cfg)?;
                let vectors = gen_vectors(&j.dist, cfg.m, j.count, j.seed)?;
                let report = mae_softmax(cfg, &vectors, &j.dist, j.seed)?;
                let cost = cost_softmax(cfg, &CostProfile::default())?;
                let mut files = vec![stamped(&report, d)?, stamped(&cost, d)?, stamped(&plan, d)?];
                if j.trace {
                    let rows = vectors
                        .iter()
                        .map(|x| {
                            Ok(json!({
                                "input": x,
                                "sc": softmax::sc_softmax_real(x, cfg)?,
                                "iterative": softmax::float_iterative_softmax(x, cfg.k),
                                "exact": softmax::exact_softmax(x),
                            }))
                        })
                        .collect::<Result<Vec<Value>>>()?;
                    files.push(stamped(&json!({ "vectors": rows }), d)?);
                }
                Ok(files)
            }
            Job::Dse(j) => {
                let points = evaluate_grid(&j.grid, &j.profile)?;
                let front = pareto_front(&points)?;
                let front_points: Vec<_> = front.iter().map(|&i| &points[i]).collect();
                let front_json = stamped(
                    &json!({
                        "grid_size": points.len(),
                        "realizable": points.iter().filter(|p| p.realizable).count(),
                        "front": front_points,
                    }),
                    d,
                )?;
                let mut csv = Vec::new();
                write_csv(&mut csv, &points, &front, &[format!("manifest_digest={d}")])?;
                Ok(vec![front_json, csv])
            }
            Job::CostBsn(j) => Ok(vec![stamped(&cost_bsn(j.bits, &j.profile)?, d)?]),
            Job::CostGelu(j) => {
                let cfg = SIConfig::synthesize(gelu, j.b_in, j.b_out, j.alpha_in, j.alpha_out)?;
                Ok(vec![stamped(&cost_si(&cfg, &j.profile), d)?])
            }
            Job::CostSoftmax(j) => Ok(vec![stamped(&cost_softmax(&j.block, &j.profile)?, d)?]),
        }
    }
}

fn gelu_scales(shape: &GeluShape) -> (Scale, Scale) {
    (
        shape.alpha_in.unwrap_or_else(|| default_alpha_in(shape.bsl_in.max(1))),
        shape.alpha_out.unwrap_or_else(|| default_alpha_out(shape.bsl_out.max(1))),
    )
}

fn resolve(command: Command) -> Result<(Job, Option<PathBuf>)> {
    Ok(match command {
        Command::Encode(a) => (
            Job::Encode(EncodeJob {
                value: a.value,
                len: a.len,
                alpha: a.alpha,
            }),
            a.out.out,
        ),
        Command::Decode(a) => {
            let s: ThermometerStream = a.stream.parse()?;
            (Job::Decode(DecodeJob { stream: s.to_string() }), a.out.out)
        }
        Command::Gelu(a) => {
            let (alpha_in, alpha_out) = gelu_scales(&a.shape);
            (
                Job::Gelu(GeluJob {
                    b_in: a.shape.bsl_in,
                    b_out: a.shape.bsl_out,
                    alpha_in,
                    alpha_out,
                    dist: a.dist,
                    samples: a.samples,
                    seed: a.seed,
                    baseline: a.baseline,
                }),
                a.out.out,
            )
        }
        Command::Softmax(a) => {
            let block = a.block.config();
            let dist = a.dist.unwrap_or_else(|| Distribution::Gaussian {
                mu: 0.0,
                sigma: 1.0,
                clip: softmax_window(&block),
            });
            (
                Job::Softmax(SoftmaxJob {
                    block,
                    dist,
                    count: a.count,
                    seed: a.seed,
                    trace: a.trace,
                }),
                a.out.out,
            )
        }
        Command::Dse(a) => {
            let grid = match &a.grid {
                Some(p) => GridSpec::from_json(&read_text(p)?)?,
                None => GridSpec::default(),
            };
            (
                Job::Dse(DseJob {
                    grid,
                    profile: a.profile.load()?,
                }),
                a.out.out,
            )
        }
        Command::Cost { block } => match block {
            CostCommand::Bsn { bits, profile, out } => (
                Job::CostBsn(CostBsnJob {
                    bits,
                    profile: profile.load()?,
                }),
                out.out,
            ),
            CostCommand::Gelu {
                shape,
                profile,
                out,
            } => {
                let (alpha_in, alpha_out) = gelu_scales(&shape);
                (
                    Job::CostGelu(CostGeluJob {
                        b_in: shape.bsl_in,
                        b_out: shape.bsl_out,
                        alpha_in,
                        alpha_out,
                        profile: profile.load()?,
                    }),
                    out.out,
                )
            }
            CostCommand::Softmax {
                block,
                profile,
                out,
            } => (
                Job::CostSoftmax(CostSoftmaxJob {
                    block: block.config(),
                    profile: profile.load()?,
                }),
                out.out,
            ),
        },
        Command::Replay(_) => unreachable!("replay is handled before resolution"),
    })
}

/// Half-width of the input window, `alpha_x * B_x / 2`.
fn softmax_window(cfg: &SoftmaxConfig) -> f64 {
    cfg.alpha_x.to_f64() * cfg.b_x as f64 / 2.0
}

fn write_outputs(dir: &Path, manifest: &RunManifest, files: &[Vec<u8>]) -> Result<()> {
    fs::create_dir_all(dir).map_err(|e| Error::Io(format!("{}: {e}", dir.display())))?;
    for (name, bytes) in manifest.outputs.iter().zip(files) {
        let path = dir.join(name);
        fs::write(&path, bytes).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    }
    let mut text = serde_json::to_vec_pretty(manifest)?;
    text.push(b'\n');
    let path = dir.join(MANIFEST_FILE);
    fs::write(&path, text).map_err(|e| Error::Io(format!("{}: {e}", path.display())))
}

fn summary(job: &Job, files: &[Vec<u8>]) -> String {
    let first: Value = serde_json::from_slice(&files[0]).unwrap_or(Value::Null);
    match job {
        Job::Encode(_) => first["stream"].as_str().unwrap_or_default().to_string(),
        Job::Decode(_) => first["value"].as_f64().map(|v| v.to_string()).unwrap_or_default(),
        _ => String::from_utf8_lossy(&files[0]).trim_end().to_string(),
    }
}

fn run_job(job: &Job, out: Option<&Path>) -> Result<String> {
    let manifest = job.manifest()?;
    let files = job.execute(&manifest.digest())?;
    if let Some(dir) = out {
        write_outputs(dir, &manifest, &files)?;
    }
    Ok(summary(job, &files))
}

fn replay(args: &ReplayArgs) -> Result<String> {
    let manifest = RunManifest::from_json(&read_text(&args.manifest)?)?;
    let job = manifest.job()?;
    let expected = job.manifest()?;
    if expected.outputs != manifest.outputs {
        return Err(Error::Config("manifest output list does not match its config".into()));
    }
    if manifest.tool_version != expected.tool_version {
        eprintln!(
            "warning: manifest written by version {}, replaying with {}",
            manifest.tool_version, expected.tool_version
        );
    }
    let files = job.execute(&manifest.digest())?;
    write_outputs(&args.out, &manifest, &files)?;
    Ok(format!(
        "replayed {} into {}",
        manifest.subcommand,
        args.out.display()
    ))
}

pub fn exit_code(err: &Error) -> i32 {
    if matches!(err, Error::Io(_)) {
        EXIT_IO
    } else if err.is_unrealizable() {
        EXIT_UNREALIZABLE
    } else {
        EXIT_USAGE
    }
}

fn configure_threads() {
    if let Some(n) = std::env::var("SC_FORGE_THREADS")
        .ok()
        .and_then(|v| v.parse::<usize>().ok())
        .filter(|&n| n > 0)
    {
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
}

/// Parses `args` (including the program name), runs, and returns the exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
        }
    };
    configure_threads();
    let result = match cli.command {
        Command::Replay(a) => replay(&a),
        command => resolve(command).and_then(|(job, out)| run_job(&job, out.as_deref())),
    };
    match result {
        Ok(text) => {
            println!("{text}");
            EXIT_OK
        }
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn baseline_spec_parsing() {
        assert_eq!(
            "bernstein:4:1024".parse::<BaselineSpec>().unwrap(),
            BaselineSpec { terms: 4, bsl: 1024 }
        );
        for s in ["bernstein:1:1024", "bernstein:4", "fsm:4:8", "bernstein:4:0"] {
            assert!(s.parse::<BaselineSpec>().is_err(), "{s}");
        }
    }

    #[test]
    fn manifest_roundtrip() {
        let job = Job::CostBsn(CostBsnJob {
            bits: 8,
            profile: CostProfile::default(),
        });
        let m = job.manifest().unwrap();
        assert_eq!(m.subcommand, "cost-bsn");
        let text = serde_json::to_string(&m).unwrap();
        let back = RunManifest::from_json(&text).unwrap();
        assert_eq!(back.job().unwrap(), job);
        assert_eq!(back.digest(), m.digest());
    }

    #[test]
    fn exit_codes() {
        assert_eq!(exit_code(&Error::Io("x".into())), EXIT_IO);
        assert_eq!(exit_code(&Error::RateNotDividing { rate: 7, len: 8 }), EXIT_UNREALIZABLE);
        assert_eq!(exit_code(&Error::Config("x".into())), EXIT_USAGE);
    }

    #[test]
    fn missing_flag_is_usage_error() {
        assert_eq!(run(["sc-forge", "gelu", "--bsl-in", "8"]), EXIT_USAGE);
        assert_eq!(run(["sc-forge", "frobnicate"]), EXIT_USAGE);
    }

    #[test]
    fn encode_and_decode_run() {
        assert_eq!(run(["sc-forge", "encode", "--value", "-0.5", "--len", "8", "--alpha", "1/4"]), EXIT_OK);
        assert_eq!(run(["sc-forge", "decode", "1100 0000 @ 1/4"]), EXIT_OK);
        assert_eq!(run(["sc-forge", "decode", "0110"]), EXIT_USAGE);
    }
}
