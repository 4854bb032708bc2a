//! Run specifications: one JSON document per run, or the equivalent flags.

use std::fmt;
use std::str::FromStr;

use clap::Args;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use serde_json::Value;

pub const EXPERIMENTS: [&str; 12] = [
    "count",
    "circle-verify",
    "arcs",
    "local-density",
    "singular-series",
    "sing-dim",
    "katz-check",
    "manin",
    "gamma",
    "thresholds",
    "appendix",
    "convergence",
];

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawSpec {
    pub experiment: String,
    #[serde(default)]
    pub params: Value,
    #[serde(default)]
    pub budgets: Budgets,
    #[serde(default)]
    pub output: Option<String>,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub csv: bool,
    #[serde(default)]
    pub threads: Option<usize>,
}

/// A validated run specification. Serializes with every default filled in.
#[derive(Clone, Debug, Serialize)]
pub struct RunSpec {
    pub experiment: &'static str,
    pub params: Params,
    pub budgets: Budgets,
    pub output: Option<String>,
    pub seed: u64,
    pub csv: bool,
    /// Worker pool size; not part of the report since results do not depend on it.
    #[serde(skip)]
    pub threads: Option<usize>,
}

#[derive(Clone, Debug, Serialize, Deserialize, Args)]
#[serde(deny_unknown_fields)]
pub struct Budgets {
    /// Estimated peak bytes for the large tables.
    #[arg(long = "memory-budget", default_value_t = default_memory())]
    #[serde(default = "default_memory")]
    pub memory_bytes: u64,
    /// Largest brute-force enumeration.
    #[arg(long = "oracle-budget", default_value_t = default_oracle())]
    #[serde(default = "default_oracle")]
    pub oracle: u64,
    /// Wall-clock limit in seconds.
    #[arg(long = "time-budget")]
    #[serde(default)]
    pub time_secs: Option<u64>,
}

fn default_memory() -> u64 {
    4 << 30
}

fn default_oracle() -> u64 {
    1_000_000_000
}

impl Default for Budgets {
    fn default() -> Self {
        Budgets {
            memory_bytes: default_memory(),
            oracle: default_oracle(),
            time_secs: None,
        }
    }
}

/// A place of P^1: `inf`, or a monic irreducible polynomial by coefficients.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum PlaceArg {
    Infinity,
    Finite(Vec<u32>),
}

impl FromStr for PlaceArg {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        if s == "inf" {
            return Ok(PlaceArg::Infinity);
        }
        parse_coeffs(s).map(PlaceArg::Finite)
    }
}

impl fmt::Display for PlaceArg {
    fn fmt(&self, f: &mut fmt::Formatter) -> fmt::Result {
        match self {
            PlaceArg::Infinity => write!(f, "inf"),
            PlaceArg::Finite(c) => write!(f, "{}", c.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(",")),
        }
    }
}

impl Serialize for PlaceArg {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match self {
            PlaceArg::Infinity => s.serialize_str("inf"),
            PlaceArg::Finite(c) => c.serialize(s),
        }
    }
}

impl<'de> Deserialize<'de> for PlaceArg {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Name(String),
            Coeffs(Vec<u32>),
        }
        match Raw::deserialize(d)? {
            Raw::Name(s) if s == "inf" => Ok(PlaceArg::Infinity),
            Raw::Name(s) => Err(serde::de::Error::custom(format!("unknown place {s:?}, expected \"inf\" or coefficients"))),
            Raw::Coeffs(c) => Ok(PlaceArg::Finite(c)),
        }
    }
}

fn parse_coeffs(s: &str) -> Result<Vec<u32>, String> {
    s.split(',')
        .map(|t| t.trim().parse::<u32>().map_err(|e| format!("bad coefficient {t:?}: {e}")))
        .collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum CountMethod {
    Bruteforce,
    Convolution,
    Both,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum DensityMethod {
    Recursion,
    Enumeration,
    Both,
}

fn d_cap() -> usize {
    wfl::densities::DEFAULT_DEGREE_CAP
}
fn one() -> u32 {
    1
}
fn two() -> u32 {
    2
}
fn three() -> u32 {
    3
}
fn four() -> usize {
    4
}
fn ten() -> usize {
    10
}
fn yes() -> bool {
    true
}
fn conv() -> CountMethod {
    CountMethod::Convolution
}
fn rec() -> DensityMethod {
    DensityMethod::Recursion
}
fn tenth() -> String {
    "1/10".into()
}
fn zero_str() -> String {
    "0".into()
}
fn e_one() -> i64 {
    1
}
fn e_300() -> i64 {
    300
}
fn grid_e() -> i64 {
    10
}
fn witness() -> i64 {
    24
}

/// Waring count N(f), or the whole f-sweep when `f` is absent.
#[derive(Clone, Debug, Serialize, Deserialize, Args)]
#[serde(deny_unknown_fields)]
pub struct CountParams {
    #[arg(long)]
    pub q: u32,
    #[arg(long)]
    pub k: u32,
    #[arg(long)]
    pub s: u32,
    #[arg(long)]
    pub e: usize,
    /// Coefficients of f, lowest degree first.
    #[arg(long, value_delimiter = ',')]
    #[serde(default)]
    pub f: Option<Vec<u32>>,
    #[arg(long, value_enum, default_value_t = CountMethod::Convolution)]
    #[serde(default = "conv")]
    pub method: CountMethod,
}

#[derive(Clone, Debug, Serialize, Deserialize, Args)]
#[serde(deny_unknown_fields)]
pub struct CircleParams {
    #[arg(long)]
    pub q: u32,
    #[arg(long)]
    pub k: u32,
    #[arg(long)]
    pub s: u32,
    #[arg(long)]
    pub e: usize,
}

#[derive(Clone, Debug, Serialize, Deserialize, Args)]
#[serde(deny_unknown_fields)]
pub struct ArcParams {
    #[arg(long)]
    pub q: u32,
    #[arg(long)]
    pub k: u32,
    #[arg(long)]
    pub e: usize,
    /// Include one record per form.
    #[arg(long)]
    #[serde(default)]
    pub records: bool,
}

#[derive(Clone, Debug, Serialize, Deserialize, Args)]
#[serde(deny_unknown_fields)]
pub struct LocalDensityParams {
    #[arg(long)]
    pub q: u32,
    #[arg(long)]
    pub k: u32,
    #[arg(long)]
    pub s: u32,
    /// `inf` or coefficients of a monic irreducible.
    #[arg(long)]
    pub place: PlaceArg,
    #[arg(long, value_delimiter = ',')]
    pub f: Vec<u32>,
    #[arg(long, value_enum, default_value_t = DensityMethod::Recursion)]
    #[serde(default = "rec")]
    pub method: DensityMethod,
    /// Largest r for the enumeration route.
    #[arg(long, default_value_t = 4)]
    #[serde(default = "four")]
    pub r_cap: usize,
}

#[derive(Clone, Debug, Serialize, Deserialize, Args)]
#[serde(deny_unknown_fields)]
pub struct SeriesParams {
    #[arg(long)]
    pub q: u32,
    #[arg(long)]
    pub k: u32,
    #[arg(long)]
    pub s: u32,
    #[arg(long)]
    pub e: usize,
    #[arg(long, value_delimiter = ',')]
    pub f: Vec<u32>,
    #[arg(long, default_value_t = d_cap())]
    #[serde(default = "d_cap")]
    pub degree_cap: usize,
}

#[derive(Clone, Debug, Serialize, Deserialize, Args)]
#[serde(deny_unknown_fields)]
pub struct SingDimParams {
    #[arg(long)]
    pub q: u32,
    #[arg(long)]
    pub k: u32,
    #[arg(long)]
    pub e: usize,
    /// Coordinates of α on H^0(O(ke)); random forms are drawn when absent.
    #[arg(long, value_delimiter = ',')]
    #[serde(default)]
    pub alpha: Option<Vec<u32>>,
    #[arg(long, default_value_t = 10)]
    #[serde(default = "ten")]
    pub samples: usize,
    #[arg(long, default_value_t = 3)]
    #[serde(default = "three")]
    pub m_max: u32,
    /// Also compare the (a, c) criterion with the definition over F_q.
    #[arg(long, default_value_t = true, action = clap::ArgAction::Set)]
    #[serde(default = "yes")]
    pub verify: bool,
}

#[derive(Clone, Debug, Serialize, Deserialize, Args)]
#[serde(deny_unknown_fields)]
pub struct KatzParams {
    #[arg(long)]
    pub q: u32,
    #[arg(long)]
    pub k: u32,
    #[arg(long)]
    pub e: usize,
    #[arg(long, default_value_t = 3)]
    #[serde(default = "three")]
    pub m_max: u32,
}

#[derive(Clone, Debug, Serialize, Deserialize, Args)]
#[serde(deny_unknown_fields)]
pub struct ManinParams {
    #[arg(long)]
    pub q: u32,
    #[arg(long)]
    pub n: u32,
    #[arg(long)]
    pub d: u32,
    #[arg(long)]
    pub e: usize,
    #[arg(long, default_value_t = d_cap())]
    #[serde(default = "d_cap")]
    pub degree_cap: usize,
    /// Local identity checked at places of degree 1..=this.
    #[arg(long, default_value_t = 2)]
    #[serde(default = "two")]
    pub local_degrees: u32,
}

#[derive(Clone, Debug, Serialize, Deserialize, Args)]
#[serde(deny_unknown_fields)]
pub struct GammaParams {
    #[arg(long)]
    pub k: u32,
    #[arg(long)]
    pub p: u64,
}

#[derive(Clone, Debug, Serialize, Deserialize, Args)]
#[serde(deny_unknown_fields)]
pub struct ThresholdParams {
    #[arg(long)]
    pub k: u32,
    #[arg(long)]
    pub p: u64,
    #[arg(long)]
    pub q: u64,
    /// Number of variables; the smallest feasible one when absent.
    #[arg(long)]
    #[serde(default)]
    pub s: Option<u64>,
}

#[derive(Clone, Debug, Serialize, Deserialize, Args)]
#[serde(deny_unknown_fields)]
pub struct AppendixArgs {
    /// Defaults to the smallest n above the hypothesis.
    #[arg(long)]
    #[serde(default)]
    pub n: Option<i64>,
    #[arg(long)]
    pub d: i64,
    #[arg(long, default_value_t = 0)]
    #[serde(default)]
    pub g: i64,
    #[arg(long, default_value_t = tenth())]
    #[serde(default = "tenth")]
    pub delta: String,
    #[arg(long, default_value_t = 1)]
    #[serde(default = "e_one")]
    pub e_min: i64,
    #[arg(long, default_value_t = 300)]
    #[serde(default = "e_300")]
    pub e_max: i64,
    #[arg(long, default_value_t = zero_str())]
    #[serde(default = "zero_str")]
    pub slack: String,
    #[arg(long, default_value_t = 10)]
    #[serde(default = "grid_e")]
    pub grid_e_max: i64,
    #[arg(long, default_value_t = 24)]
    #[serde(default = "witness")]
    pub witness_max: i64,
}

#[derive(Clone, Debug, Serialize, Deserialize, Args)]
#[serde(deny_unknown_fields)]
pub struct ConvergenceParams {
    #[arg(long)]
    pub q: u32,
    #[arg(long)]
    pub k: u32,
    #[arg(long)]
    pub s: u32,
    #[arg(long, default_value_t = 1)]
    #[serde(default = "one")]
    pub e_min: u32,
    #[arg(long, default_value_t = 4)]
    #[serde(default = "four_u32")]
    pub e_max: u32,
    #[arg(long, default_value_t = d_cap())]
    #[serde(default = "d_cap")]
    pub degree_cap: usize,
}

fn four_u32() -> u32 {
    4
}

#[derive(Clone, Debug, Serialize)]
#[serde(untagged)]
pub enum Params {
    Count(CountParams),
    CircleVerify(CircleParams),
    Arcs(ArcParams),
    LocalDensity(LocalDensityParams),
    SingularSeries(SeriesParams),
    SingDim(SingDimParams),
    KatzCheck(KatzParams),
    Manin(ManinParams),
    Gamma(GammaParams),
    Thresholds(ThresholdParams),
    Appendix(AppendixArgs),
    Convergence(ConvergenceParams),
}

impl Params {
    pub fn name(&self) -> &'static str {
        match self {
            Params::Count(_) => "count",
            Params::CircleVerify(_) => "circle-verify",
            Params::Arcs(_) => "arcs",
            Params::LocalDensity(_) => "local-density",
            Params::SingularSeries(_) => "singular-series",
            Params::SingDim(_) => "sing-dim",
            Params::KatzCheck(_) => "katz-check",
            Params::Manin(_) => "manin",
            Params::Gamma(_) => "gamma",
            Params::Thresholds(_) => "thresholds",
            Params::Appendix(_) => "appendix",
            Params::Convergence(_) => "convergence",
        }
    }

    pub fn parse(name: &str, v: Value) -> Result<Params, String> {
        let v = if v.is_null() { Value::Object(Default::default()) } else { v };
        fn de<T: serde::de::DeserializeOwned>(v: Value) -> Result<T, String> {
            serde_json::from_value(v).map_err(|e| format!("params: {e}"))
        }
        Ok(match name {
            "count" => Params::Count(de(v)?),
            "circle-verify" => Params::CircleVerify(de(v)?),
            "arcs" => Params::Arcs(de(v)?),
            "local-density" => Params::LocalDensity(de(v)?),
            "singular-series" => Params::SingularSeries(de(v)?),
            "sing-dim" => Params::SingDim(de(v)?),
            "katz-check" => Params::KatzCheck(de(v)?),
            "manin" => Params::Manin(de(v)?),
            "gamma" => Params::Gamma(de(v)?),
            "thresholds" => Params::Thresholds(de(v)?),
            "appendix" => Params::Appendix(de(v)?),
            "convergence" => Params::Convergence(de(v)?),
            other => return Err(format!("unknown experiment {other:?}; expected one of {}", EXPERIMENTS.join(", "))),
        })
    }
}

impl RunSpec {
    pub fn from_json(text: &str) -> Result<RunSpec, String> {
        let raw: RawSpec = serde_json::from_str(text).map_err(|e| format!("run spec: {e}"))?;
        let params = Params::parse(&raw.experiment, raw.params)?;
        let spec = RunSpec {
            experiment: params.name(),
            params,
            budgets: raw.budgets,
            output: raw.output,
            seed: raw.seed,
            csv: raw.csv,
            threads: raw.threads,
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<(), String> {
        if self.csv && self.output.is_none() {
            return Err("csv output needs an output directory".into());
        }
        if self.threads == Some(0) {
            return Err("threads must be positive".into());
        }
        Ok(())
    }
}
