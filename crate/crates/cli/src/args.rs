//! Command-line and config-file parameters.
//!
//! Every parameter is optional at parse time. Values merge as
//! flags > config file > defaults, and the fully resolved set is what the
//! manifest records.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};
use skinbench::models::{Boundary, ModelSpec};
use skinbench::Precision;

#[derive(Parser, Debug)]
#[command(name = "skinbench", version, about = "Arbitrary-precision non-Hermitian lattice numerics")]
pub struct Cli {
    /// Output directory for CSV files and manifest.json.
    #[arg(long, global = true, default_value = "out")]
    pub out: PathBuf,
    /// JSON file with parameter values (overridden by flags).
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Re-run the command recorded in a manifest.
    #[arg(long, conflicts_with = "config")]
    pub replay: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Option<Command>,
}

#[derive(Subcommand, Debug, Clone)]
pub enum Command {
    /// Eigenvalues of a single-particle model.
    Spectrum(SpectrumArgs),
    /// Right eigenvectors (and closed forms when available).
    Wavefunctions(SpectrumArgs),
    /// log10 smin(z - H) on a complex grid.
    Pseudo(PseudoArgs),
    /// Eigenvalues of randomly perturbed matrices.
    Cloud(CloudArgs),
    /// Eigenvector condition number.
    Cond(SpectrumArgs),
    /// Gaussian-state evolution from the Neel state.
    Evolve(EvolveArgs),
    /// Growth of the propagator norm.
    Norms(NormsArgs),
    /// Unshifted QR-RQ iteration diagnostics.
    Qrlab(QrlabArgs),
    /// Interacting chain in a fixed particle-number sector.
    Manybody(ManybodyArgs),
    /// Condition numbers of disordered chains.
    Disorder(DisorderArgs),
    /// Working-precision recommendation.
    Audit(AuditArgs),
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Spectrum(_) => "spectrum",
            Command::Wavefunctions(_) => "wavefunctions",
            Command::Pseudo(_) => "pseudo",
            Command::Cloud(_) => "cloud",
            Command::Cond(_) => "cond",
            Command::Evolve(_) => "evolve",
            Command::Norms(_) => "norms",
            Command::Qrlab(_) => "qrlab",
            Command::Manybody(_) => "manybody",
            Command::Disorder(_) => "disorder",
            Command::Audit(_) => "audit",
        }
    }
}

#[derive(ValueEnum, Serialize, Deserialize, Debug, Clone, Copy, PartialEq, Eq)]
#[serde(rename_all = "lowercase")]
pub enum ModelKind {
    Hn,
    Shn,
    Disordered,
}

#[derive(ValueEnum, Serialize, Deserialize, Debug, Clone, Copy, PartialEq, Eq)]
#[serde(rename_all = "lowercase")]
pub enum Bc {
    Obc,
    Pbc,
}

impl From<Bc> for Boundary {
    fn from(b: Bc) -> Self {
        match b {
            Bc::Obc => Boundary::Obc,
            Bc::Pbc => Boundary::Pbc,
        }
    }
}

/// Raised while resolving parameters; maps to the usage exit code.
#[derive(Debug)]
pub struct UsageError(pub String);

impl std::fmt::Display for UsageError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

pub type Resolve<T = ()> = Result<T, UsageError>;

fn fill<T>(slot: &mut Option<T>, default: T) {
    if slot.is_none() {
        *slot = Some(default);
    }
}

fn reject<T>(slot: &Option<T>, name: &str, why: &str) -> Resolve {
    if slot.is_some() {
        return Err(UsageError(format!("--{name} {why}")));
    }
    Ok(())
}

#[derive(Args, Serialize, Deserialize, Debug, Clone, Default)]
pub struct ModelArgs {
    #[arg(long, value_enum)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub model: Option<ModelKind>,
    #[arg(long = "L")]
    #[serde(rename = "L", skip_serializing_if = "Option::is_none")]
    pub l: Option<usize>,
    #[arg(long = "J", allow_negative_numbers = true)]
    #[serde(rename = "J", skip_serializing_if = "Option::is_none")]
    pub j: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub gamma: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub delta: Option<f64>,
    /// Disorder strength (on-site energies uniform in [-W, W]).
    #[arg(long = "W")]
    #[serde(rename = "W", skip_serializing_if = "Option::is_none")]
    pub w: Option<f64>,
    /// Disorder seed.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[arg(long, value_enum)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub bc: Option<Bc>,
}

impl ModelArgs {
    pub fn resolve(&mut self, default_l: usize) -> Resolve {
        fill(&mut self.model, ModelKind::Hn);
        fill(&mut self.l, default_l);
        fill(&mut self.j, 1.0);
        fill(&mut self.gamma, 0.8);
        fill(&mut self.bc, Bc::Obc);
        match self.model.unwrap() {
            ModelKind::Hn => {
                reject(&self.delta, "delta", "needs --model shn")?;
                reject(&self.w, "W", "needs --model disordered")?;
                reject(&self.seed, "seed", "needs --model disordered")?;
            }
            ModelKind::Shn => {
                fill(&mut self.delta, 0.5);
                reject(&self.w, "W", "needs --model disordered")?;
                reject(&self.seed, "seed", "needs --model disordered")?;
            }
            ModelKind::Disordered => {
                reject(&self.delta, "delta", "needs --model shn")?;
                fill(&mut self.w, 1.0);
                fill(&mut self.seed, 0);
            }
        }
        let spec = self.spec();
        spec.validate().map_err(|e| UsageError(e.to_string()))
    }

    pub fn spec(&self) -> ModelSpec {
        let (l, j, g, bc) = (self.l.unwrap(), self.j.unwrap(), self.gamma.unwrap(), self.bc.unwrap().into());
        match self.model.unwrap() {
            ModelKind::Hn => ModelSpec::hn(j, g, l, bc),
            ModelKind::Shn => ModelSpec::shn(j, g, self.delta.unwrap(), l, bc),
            ModelKind::Disordered => ModelSpec::disordered(j, g, self.w.unwrap(), l, self.seed.unwrap(), bc),
        }
    }
}

#[derive(Args, Serialize, Deserialize, Debug, Clone, Default)]
pub struct PrecisionArgs {
    /// Significant decimal digits.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub digits: Option<u32>,
    /// Run `--digits 16` on a 53-bit significand (double-equivalent).
    #[arg(long, num_args = 0..=1, default_missing_value = "true")]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub double_emulation: Option<bool>,
}

impl PrecisionArgs {
    pub fn resolve(&mut self) -> Resolve {
        fill(&mut self.digits, 50);
        fill(&mut self.double_emulation, false);
        self.ctx().map(|_| ())
    }

    pub fn ctx(&self) -> Resolve<Precision> {
        Precision::from_digits(self.digits.unwrap(), self.double_emulation.unwrap()).map_err(|e| UsageError(e.to_string()))
    }
}

#[derive(Args, Serialize, Deserialize, Debug, Clone, Default)]
pub struct SpectrumArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub model: ModelArgs,
    #[command(flatten)]
    #[serde(flatten)]
    pub precision: PrecisionArgs,
}

impl SpectrumArgs {
    pub fn resolve(&mut self) -> Resolve {
        self.model.resolve(20)?;
        self.precision.resolve()
    }
}

#[derive(Args, Serialize, Deserialize, Debug, Clone, Default)]
pub struct PseudoArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub base: SpectrumArgs,
    #[arg(long, allow_negative_numbers = true)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub re_min: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub re_max: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub im_min: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub im_max: Option<f64>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub nx: Option<usize>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub ny: Option<usize>,
}

impl PseudoArgs {
    pub fn resolve(&mut self) -> Resolve {
        self.base.resolve()?;
        let g = skinbench::pseudospec::GridSpec::default();
        fill(&mut self.re_min, g.re_min);
        fill(&mut self.re_max, g.re_max);
        fill(&mut self.im_min, g.im_min);
        fill(&mut self.im_max, g.im_max);
        fill(&mut self.nx, g.nx);
        fill(&mut self.ny, g.ny);
        self.grid().validate().map_err(|e| UsageError(e.to_string()))
    }

    pub fn grid(&self) -> skinbench::pseudospec::GridSpec {
        skinbench::pseudospec::GridSpec {
            re_min: self.re_min.unwrap(),
            re_max: self.re_max.unwrap(),
            im_min: self.im_min.unwrap(),
            im_max: self.im_max.unwrap(),
            nx: self.nx.unwrap(),
            ny: self.ny.unwrap(),
        }
    }
}

#[derive(Args, Serialize, Deserialize, Debug, Clone, Default)]
pub struct CloudArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub base: SpectrumArgs,
    /// Perturbation norms are uniform in (0, epsilon).
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub epsilon: Option<f64>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub samples: Option<usize>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sample_seed: Option<u64>,
}

impl CloudArgs {
    pub fn resolve(&mut self) -> Resolve {
        self.base.resolve()?;
        fill(&mut self.epsilon, 1e-6);
        fill(&mut self.samples, 20);
        fill(&mut self.sample_seed, 1);
        let eps = self.epsilon.unwrap();
        if !(eps > 0.0 && eps.is_finite()) {
            return Err(UsageError("--epsilon must be positive".into()));
        }
        Ok(())
    }
}

fn check_times(dt: f64, t_max: f64) -> Resolve {
    if !(dt > 0.0 && t_max > 0.0 && dt.is_finite() && t_max.is_finite()) {
        return Err(UsageError("--dt and --tmax must be positive".into()));
    }
    Ok(())
}

#[derive(Args, Serialize, Deserialize, Debug, Clone, Default)]
pub struct EvolveArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub base: SpectrumArgs,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub dt: Option<f64>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tmax: Option<f64>,
    /// Record observables every this many steps.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub record_every: Option<usize>,
    /// Length of the late-time averaging window.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub window: Option<f64>,
}

impl EvolveArgs {
    pub fn resolve(&mut self) -> Resolve {
        self.base.model.resolve(60)?;
        self.base.precision.resolve()?;
        fill(&mut self.dt, skinbench::gaussdyn::DEFAULT_DT);
        fill(&mut self.tmax, 40.0);
        fill(&mut self.record_every, 1);
        fill(&mut self.window, self.tmax.unwrap() * skinbench::gaussdyn::DEFAULT_WINDOW_FRACTION);
        check_times(self.dt.unwrap(), self.tmax.unwrap())?;
        if self.record_every == Some(0) {
            return Err(UsageError("--record-every must be at least 1".into()));
        }
        if self.base.model.l.unwrap() % 2 != 0 {
            return Err(UsageError("evolve needs even --L".into()));
        }
        Ok(())
    }
}

#[derive(Args, Serialize, Deserialize, Debug, Clone, Default)]
pub struct NormsArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub base: SpectrumArgs,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub dt: Option<f64>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tmax: Option<f64>,
}

impl NormsArgs {
    pub fn resolve(&mut self) -> Resolve {
        self.base.model.resolve(10)?;
        self.base.precision.resolve()?;
        fill(&mut self.dt, skinbench::gaussdyn::DEFAULT_DT);
        fill(&mut self.tmax, 20.0);
        check_times(self.dt.unwrap(), self.tmax.unwrap())
    }
}

#[derive(Args, Serialize, Deserialize, Debug, Clone, Default)]
pub struct QrlabArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub base: SpectrumArgs,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub iters: Option<usize>,
    /// Householder denominators below this are counted as small.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub threshold: Option<f64>,
}

impl QrlabArgs {
    pub fn resolve(&mut self) -> Resolve {
        self.base.model.resolve(40)?;
        self.base.precision.resolve()?;
        if self.base.model.model == Some(ModelKind::Shn) {
            return Err(UsageError("qrlab needs a real matrix (hn or disordered)".into()));
        }
        fill(&mut self.iters, 4000);
        fill(&mut self.threshold, 1e-16);
        Ok(())
    }
}

#[derive(Args, Serialize, Deserialize, Debug, Clone, Default)]
pub struct ManybodyArgs {
    #[arg(long = "L")]
    #[serde(rename = "L", skip_serializing_if = "Option::is_none")]
    pub l: Option<usize>,
    /// Particle number (default L/2).
    #[arg(long = "N")]
    #[serde(rename = "N", skip_serializing_if = "Option::is_none")]
    pub n: Option<usize>,
    #[arg(long = "J", allow_negative_numbers = true)]
    #[serde(rename = "J", skip_serializing_if = "Option::is_none")]
    pub j: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub gamma: Option<f64>,
    /// Nearest-neighbour interaction.
    #[arg(long = "U", allow_negative_numbers = true)]
    #[serde(rename = "U", skip_serializing_if = "Option::is_none")]
    pub u: Option<f64>,
    #[arg(long, value_enum)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub bc: Option<Bc>,
    #[command(flatten)]
    #[serde(flatten)]
    pub precision: PrecisionArgs,
    /// Also record the propagator norm up to this time.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tmax: Option<f64>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub dt: Option<f64>,
}

impl ManybodyArgs {
    pub fn resolve(&mut self) -> Resolve {
        fill(&mut self.l, 10);
        fill(&mut self.n, self.l.unwrap() / 2);
        fill(&mut self.j, 1.0);
        fill(&mut self.gamma, 0.99);
        fill(&mut self.u, 1.0);
        fill(&mut self.bc, Bc::Obc);
        self.precision.resolve()?;
        if let Some(t) = self.tmax {
            fill(&mut self.dt, skinbench::gaussdyn::DEFAULT_DT);
            check_times(self.dt.unwrap(), t)?;
        } else {
            reject(&self.dt, "dt", "needs --tmax")?;
        }
        let spec = self.spec();
        skinbench::manybody::fock_basis(spec.l, spec.n).map_err(|e| UsageError(e.to_string()))?;
        spec.validate().map_err(|e| UsageError(e.to_string()))
    }

    pub fn spec(&self) -> skinbench::manybody::ManyBodySpec {
        skinbench::manybody::ManyBodySpec::new(
            self.j.unwrap(),
            self.gamma.unwrap(),
            self.u.unwrap(),
            self.l.unwrap(),
            self.n.unwrap(),
            self.bc.unwrap().into(),
        )
    }
}

#[derive(Args, Serialize, Deserialize, Debug, Clone, Default)]
pub struct DisorderArgs {
    #[arg(long = "J", allow_negative_numbers = true)]
    #[serde(rename = "J", skip_serializing_if = "Option::is_none")]
    pub j: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub gamma: Option<f64>,
    /// Comma-separated disorder strengths.
    #[arg(long = "W", value_delimiter = ',')]
    #[serde(rename = "W", skip_serializing_if = "Option::is_none")]
    pub w: Option<Vec<f64>>,
    /// Comma-separated chain lengths.
    #[arg(long = "L", value_delimiter = ',')]
    #[serde(rename = "L", skip_serializing_if = "Option::is_none")]
    pub l: Option<Vec<usize>>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub samples: Option<usize>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[command(flatten)]
    #[serde(flatten)]
    pub precision: PrecisionArgs,
}

impl DisorderArgs {
    pub fn resolve(&mut self) -> Resolve {
        fill(&mut self.j, 1.0);
        fill(&mut self.gamma, 0.9);
        fill(&mut self.w, vec![0.5, 8.0]);
        fill(&mut self.l, vec![8, 12, 16, 20]);
        fill(&mut self.samples, 10);
        fill(&mut self.seed, 0);
        self.precision.resolve()?;
        if self.samples == Some(0) {
            return Err(UsageError("--samples must be at least 1".into()));
        }
        if self.w.as_ref().unwrap().iter().any(|w| !(*w >= 0.0)) || self.l.as_ref().unwrap().iter().any(|l| *l < 2) {
            return Err(UsageError("--W values must be >= 0 and --L values >= 2".into()));
        }
        Ok(())
    }
}

#[derive(Args, Serialize, Deserialize, Debug, Clone, Default)]
pub struct AuditArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub base: SpectrumArgs,
    /// Comma-separated probe sizes.
    #[arg(long, value_delimiter = ',')]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub probes: Option<Vec<usize>>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub target: Option<usize>,
    /// Audit the interacting chain instead (uses --U and --N).
    #[arg(long, num_args = 0..=1, default_missing_value = "true")]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub interacting: Option<bool>,
    #[arg(long = "U", allow_negative_numbers = true)]
    #[serde(rename = "U", skip_serializing_if = "Option::is_none")]
    pub u: Option<f64>,
    #[arg(long = "N")]
    #[serde(rename = "N", skip_serializing_if = "Option::is_none")]
    pub n: Option<usize>,
}

impl AuditArgs {
    pub fn resolve(&mut self) -> Resolve {
        self.base.model.resolve(12)?;
        fill(&mut self.base.precision.digits, 40);
        self.base.precision.resolve()?;
        fill(&mut self.probes, vec![6, 8, 10, 12]);
        fill(&mut self.target, 40);
        fill(&mut self.interacting, false);
        if self.interacting.unwrap() {
            if self.base.model.model != Some(ModelKind::Hn) {
                return Err(UsageError("--interacting needs --model hn".into()));
            }
            fill(&mut self.u, 1.0);
            fill(&mut self.n, self.base.model.l.unwrap() / 2);
        } else {
            reject(&self.u, "U", "needs --interacting")?;
            reject(&self.n, "N", "needs --interacting")?;
        }
        Ok(())
    }
}

pub fn resolve(cmd: &mut Command) -> Resolve {
    match cmd {
        Command::Spectrum(a) | Command::Wavefunctions(a) | Command::Cond(a) => a.resolve(),
        Command::Pseudo(a) => a.resolve(),
        Command::Cloud(a) => a.resolve(),
        Command::Evolve(a) => a.resolve(),
        Command::Norms(a) => a.resolve(),
        Command::Qrlab(a) => a.resolve(),
        Command::Manybody(a) => a.resolve(),
        Command::Disorder(a) => a.resolve(),
        Command::Audit(a) => a.resolve(),
    }
}

/// Parameters of `cmd` as a JSON object (unset values omitted).
pub fn to_json(cmd: &Command) -> serde_json::Value {
    let v = match cmd {
        Command::Spectrum(a) | Command::Wavefunctions(a) | Command::Cond(a) => serde_json::to_value(a),
        Command::Pseudo(a) => serde_json::to_value(a),
        Command::Cloud(a) => serde_json::to_value(a),
        Command::Evolve(a) => serde_json::to_value(a),
        Command::Norms(a) => serde_json::to_value(a),
        Command::Qrlab(a) => serde_json::to_value(a),
        Command::Manybody(a) => serde_json::to_value(a),
        Command::Disorder(a) => serde_json::to_value(a),
        Command::Audit(a) => serde_json::to_value(a),
    };
    v.expect("parameters serialize")
}

/// Rebuilds a command of kind `name` from a JSON parameter object.
pub fn from_json(name: &str, v: serde_json::Value) -> Resolve<Command> {
    fn de<T: serde::de::DeserializeOwned>(v: serde_json::Value) -> Resolve<T> {
        serde_json::from_value(v).map_err(|e| UsageError(format!("bad parameter: {e}")))
    }
    Ok(match name {
        "spectrum" => Command::Spectrum(de(v)?),
        "wavefunctions" => Command::Wavefunctions(de(v)?),
        "pseudo" => Command::Pseudo(de(v)?),
        "cloud" => Command::Cloud(de(v)?),
        "cond" => Command::Cond(de(v)?),
        "evolve" => Command::Evolve(de(v)?),
        "norms" => Command::Norms(de(v)?),
        "qrlab" => Command::Qrlab(de(v)?),
        "manybody" => Command::Manybody(de(v)?),
        "disorder" => Command::Disorder(de(v)?),
        "audit" => Command::Audit(de(v)?),
        other => return Err(UsageError(format!("unknown command {other:?}"))),
    })
}

/// Overlays `flags` on `file` (flags win), rebuilds the command and reports
/// keys that no parameter claimed.
pub fn merge(name: &str, file: serde_json::Value, flags: serde_json::Value) -> Resolve<Command> {
    let serde_json::Value::Object(mut merged) = file else {
        return Err(UsageError("config file must hold a JSON object".into()));
    };
    if let Some(c) = merged.remove("command") {
        if c.as_str() != Some(name) {
            return Err(UsageError(format!("config is for command {c}, not {name:?}")));
        }
    }
    if let serde_json::Value::Object(f) = flags {
        merged.extend(f);
    }
    merged.retain(|_, v| !v.is_null());
    let cmd = from_json(name, serde_json::Value::Object(merged.clone()))?;
    let claimed = to_json(&cmd);
    let unknown: Vec<&String> = merged.keys().filter(|k| claimed.get(k.as_str()).is_none()).collect();
    if !unknown.is_empty() {
        return Err(UsageError(format!("unknown parameter(s) {unknown:?} for {name}")));
    }
    Ok(cmd)
}

pub fn precision_of(cmd: &Command) -> &PrecisionArgs {
    match cmd {
        Command::Spectrum(a) | Command::Wavefunctions(a) | Command::Cond(a) => &a.precision,
        Command::Pseudo(a) => &a.base.precision,
        Command::Cloud(a) => &a.base.precision,
        Command::Evolve(a) => &a.base.precision,
        Command::Norms(a) => &a.base.precision,
        Command::Qrlab(a) => &a.base.precision,
        Command::Manybody(a) => &a.precision,
        Command::Disorder(a) => &a.precision,
        Command::Audit(a) => &a.base.precision,
    }
}
