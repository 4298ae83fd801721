//! Resolved run configuration. Values are layered: built-in defaults,
//! then the optional `--config` JSON file, then explicit flags. Later
//! layers win per field.

use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::Deserialize;

use sensorfuse::{
    ModelFamily, SecondaryAdapter, SensorKind, SynthConfig, DEFAULT_Q_SCALE, DEFAULT_R_SCALE,
    DEFAULT_TOLERANCE_MS,
};

use crate::args;
use crate::error::CliError;

/// Where a dataset comes from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DatasetKind {
    Primary,
    Secondary,
    Synthetic,
}

impl DatasetKind {
    pub fn name(self) -> &'static str {
        match self {
            DatasetKind::Primary => "primary",
            DatasetKind::Secondary => "secondary",
            DatasetKind::Synthetic => "synthetic",
        }
    }
}

impl FromStr for DatasetKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "primary" => Ok(DatasetKind::Primary),
            "secondary" => Ok(DatasetKind::Secondary),
            "synthetic" => Ok(DatasetKind::Synthetic),
            other => Err(format!(
                "unknown dataset kind {other:?} (expected primary, secondary, or synthetic)"
            )),
        }
    }
}

/// How sensor channels are combined before training.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Fusion {
    None,
    Feature,
    Decision,
    Kalman,
}

impl FromStr for Fusion {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "none" => Ok(Fusion::None),
            "feature" => Ok(Fusion::Feature),
            "decision" => Ok(Fusion::Decision),
            "kalman" => Ok(Fusion::Kalman),
            other => Err(format!(
                "unknown fusion mode {other:?} (expected none, feature, decision, or kalman)"
            )),
        }
    }
}

/// Cluster parameters for the synthetic generator.
#[derive(Debug, Clone)]
pub struct SynthParams {
    pub classes: usize,
    pub samples_per_class: usize,
    pub separation: f64,
    /// Per-sensor separations override the shared one when present.
    pub separations: Option<[f64; 3]>,
    pub stddev: f64,
    pub class_names: Option<Vec<String>>,
}

impl SynthParams {
    /// Generator config using `seed` for sampling.
    pub fn to_synth_config(&self, seed: u64) -> SynthConfig {
        let separations = self.separations.unwrap_or([self.separation; 3]);
        let mut config = SynthConfig::with_sensor_separations(
            self.classes,
            self.samples_per_class,
            separations,
            self.stddev,
            seed,
        );
        if let Some(names) = &self.class_names {
            config.class_names = names.clone();
        }
        config
    }
}

/// Fully resolved settings for one invocation.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub input: Vec<PathBuf>,
    pub dataset_kind: DatasetKind,
    pub out: PathBuf,
    pub ratio: f64,
    pub seed: u64,
    pub model: ModelFamily,
    pub fusion: Fusion,
    pub sensors: Option<Vec<SensorKind>>,
    pub q_scale: f64,
    pub r_scale: f64,
    pub trees: usize,
    pub stages: usize,
    pub eta: f64,
    pub epochs: usize,
    pub c: f64,
    pub decision_base: ModelFamily,
    pub bins: usize,
    pub tolerance_ms: i64,
    pub synth: SynthParams,
    pub secondary_adapter: Option<SecondaryAdapter>,
}

impl Default for RunConfig {
    fn default() -> RunConfig {
        RunConfig {
            input: Vec::new(),
            dataset_kind: DatasetKind::Primary,
            out: PathBuf::from("out"),
            ratio: 0.8,
            seed: 7,
            model: ModelFamily::RandomForest,
            fusion: Fusion::Feature,
            sensors: None,
            q_scale: DEFAULT_Q_SCALE,
            r_scale: DEFAULT_R_SCALE,
            trees: 100,
            stages: 100,
            eta: 0.1,
            epochs: 200,
            c: 1.0,
            decision_base: ModelFamily::RandomForest,
            bins: 30,
            tolerance_ms: DEFAULT_TOLERANCE_MS,
            synth: SynthParams {
                classes: 4,
                samples_per_class: 250,
                separation: 6.0,
                separations: None,
                stddev: 1.0,
                class_names: None,
            },
            secondary_adapter: None,
        }
    }
}

/// The sensors to use for a single-view model, in canonical order.
/// `fusion none` demands exactly one; `feature` defaults to all three.
pub fn view_sensors(config: &RunConfig) -> Result<Vec<SensorKind>, CliError> {
    let chosen = config
        .sensors
        .clone()
        .unwrap_or_else(|| SensorKind::ALL.to_vec());
    let mut ordered: Vec<SensorKind> = SensorKind::ALL
        .into_iter()
        .filter(|kind| chosen.contains(kind))
        .collect();
    if ordered.is_empty() {
        return Err(CliError::Config("--sensors names no usable sensor".into()));
    }
    if config.fusion == Fusion::None && ordered.len() != 1 {
        return Err(CliError::Config(
            "fusion mode 'none' uses a single sensor; pass --sensors with exactly one of \
             accel, gyro, mag"
                .into(),
        ));
    }
    if config.fusion == Fusion::Decision && ordered.len() != 3 {
        return Err(CliError::Config(
            "decision fusion votes across all three sensors; drop --sensors or list all of \
             accel, gyro, mag"
                .into(),
        ));
    }
    if config.fusion == Fusion::Kalman {
        ordered = SensorKind::ALL.to_vec();
    }
    Ok(ordered)
}

/// Mirror of [`RunConfig`] for the JSON file; every field optional.
#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct FileConfig {
    input: Option<Vec<PathBuf>>,
    dataset_kind: Option<String>,
    out: Option<PathBuf>,
    ratio: Option<f64>,
    seed: Option<u64>,
    model: Option<String>,
    fusion: Option<String>,
    sensors: Option<Vec<String>>,
    q_scale: Option<f64>,
    r_scale: Option<f64>,
    trees: Option<usize>,
    stages: Option<usize>,
    eta: Option<f64>,
    epochs: Option<usize>,
    c: Option<f64>,
    decision_base: Option<String>,
    bins: Option<usize>,
    tolerance_ms: Option<i64>,
    synth: Option<FileSynth>,
    secondary_adapter: Option<SecondaryAdapter>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct FileSynth {
    classes: Option<usize>,
    samples_per_class: Option<usize>,
    separation: Option<f64>,
    separations: Option<[f64; 3]>,
    stddev: Option<f64>,
    class_names: Option<Vec<String>>,
}

fn config_err(message: String) -> CliError {
    CliError::Config(message)
}

fn parse_family(value: &str) -> Result<ModelFamily, CliError> {
    ModelFamily::from_str(value).map_err(|err| config_err(err.to_string()))
}

fn parse_sensor_names(names: &[String]) -> Result<Vec<SensorKind>, CliError> {
    names
        .iter()
        .map(|name| {
            SensorKind::parse(name).ok_or_else(|| {
                config_err(format!(
                    "unknown sensor {name:?} (expected accel, gyro, or mag)"
                ))
            })
        })
        .collect()
}

/// Loads `--config` (when given) on top of defaults.
fn base_config(path: Option<&Path>) -> Result<RunConfig, CliError> {
    let mut config = RunConfig::default();
    let Some(path) = path else {
        return Ok(config);
    };
    let text = fs::read_to_string(path).map_err(|err| CliError::read(path, err))?;
    let file: FileConfig = serde_json::from_str(&text)
        .map_err(|err| config_err(format!("bad config file {}: {err}", path.display())))?;

    if let Some(input) = file.input {
        config.input = input;
    }
    if let Some(kind) = file.dataset_kind {
        config.dataset_kind = kind.parse().map_err(config_err)?;
    }
    if let Some(out) = file.out {
        config.out = out;
    }
    if let Some(ratio) = file.ratio {
        config.ratio = ratio;
    }
    if let Some(seed) = file.seed {
        config.seed = seed;
    }
    if let Some(model) = file.model {
        config.model = parse_family(&model)?;
    }
    if let Some(fusion) = file.fusion {
        config.fusion = fusion.parse().map_err(config_err)?;
    }
    if let Some(sensors) = file.sensors {
        config.sensors = Some(parse_sensor_names(&sensors)?);
    }
    if let Some(q_scale) = file.q_scale {
        config.q_scale = q_scale;
    }
    if let Some(r_scale) = file.r_scale {
        config.r_scale = r_scale;
    }
    if let Some(trees) = file.trees {
        config.trees = trees;
    }
    if let Some(stages) = file.stages {
        config.stages = stages;
    }
    if let Some(eta) = file.eta {
        config.eta = eta;
    }
    if let Some(epochs) = file.epochs {
        config.epochs = epochs;
    }
    if let Some(c) = file.c {
        config.c = c;
    }
    if let Some(base) = file.decision_base {
        config.decision_base = parse_family(&base)?;
    }
    if let Some(bins) = file.bins {
        config.bins = bins;
    }
    if let Some(tolerance_ms) = file.tolerance_ms {
        config.tolerance_ms = tolerance_ms;
    }
    if let Some(synth) = file.synth {
        let params = &mut config.synth;
        if let Some(classes) = synth.classes {
            params.classes = classes;
        }
        if let Some(samples_per_class) = synth.samples_per_class {
            params.samples_per_class = samples_per_class;
        }
        if let Some(separation) = synth.separation {
            params.separation = separation;
        }
        if synth.separations.is_some() {
            params.separations = synth.separations;
        }
        if let Some(stddev) = synth.stddev {
            params.stddev = stddev;
        }
        if synth.class_names.is_some() {
            params.class_names = synth.class_names;
        }
    }
    config.secondary_adapter = file.secondary_adapter.or(config.secondary_adapter);
    Ok(config)
}

fn apply_common(config: &mut RunConfig, common: &args::CommonArgs) {
    if let Some(out) = &common.out {
        config.out = out.clone();
    }
    if let Some(seed) = common.seed {
        config.seed = seed;
    }
}

fn apply_input(config: &mut RunConfig, input: &args::InputArgs) {
    if !input.input.is_empty() {
        config.input = input.input.clone();
    }
    if let Some(kind) = input.dataset_kind {
        config.dataset_kind = match kind {
            args::DatasetKindArg::Primary => DatasetKind::Primary,
            args::DatasetKindArg::Secondary => DatasetKind::Secondary,
            args::DatasetKindArg::Synthetic => DatasetKind::Synthetic,
        };
    }
    if let Some(tolerance_ms) = input.tolerance_ms {
        config.tolerance_ms = tolerance_ms;
    }
}

fn apply_model(config: &mut RunConfig, model: &args::ModelArgs) {
    if let Some(ratio) = model.ratio {
        config.ratio = ratio;
    }
    if let Some(trees) = model.trees {
        config.trees = trees;
    }
    if let Some(stages) = model.stages {
        config.stages = stages;
    }
    if let Some(eta) = model.eta {
        config.eta = eta;
    }
    if let Some(q_scale) = model.q_scale {
        config.q_scale = q_scale;
    }
    if let Some(r_scale) = model.r_scale {
        config.r_scale = r_scale;
    }
}

/// Sanity limits that no later stage re-checks.
fn validate(config: &RunConfig) -> Result<(), CliError> {
    if config.bins == 0 {
        return Err(config_err("--bins must be at least 1".into()));
    }
    if config.tolerance_ms < 0 {
        return Err(config_err("--tolerance-ms must not be negative".into()));
    }
    if config.epochs == 0 {
        return Err(config_err("epochs must be at least 1".into()));
    }
    if !(config.c.is_finite() && config.c > 0.0) {
        return Err(config_err("c must be a positive number".into()));
    }
    Ok(())
}

pub fn resolve_synth(cli: &args::SynthArgs) -> Result<RunConfig, CliError> {
    let mut config = base_config(cli.common.config.as_deref())?;
    apply_common(&mut config, &cli.common);
    config.dataset_kind = DatasetKind::Synthetic;
    let params = &mut config.synth;
    if let Some(classes) = cli.classes {
        params.classes = classes;
    }
    if let Some(per_class) = cli.per_class {
        params.samples_per_class = per_class;
    }
    if let Some(separation) = cli.separation {
        params.separation = separation;
    }
    if let Some(separations) = &cli.separations {
        let triple: [f64; 3] = separations.as_slice().try_into().map_err(|_| {
            config_err(format!(
                "--separations takes exactly three comma-separated values, got {}",
                separations.len()
            ))
        })?;
        params.separations = Some(triple);
    }
    if let Some(stddev) = cli.stddev {
        params.stddev = stddev;
    }
    validate(&config)?;
    Ok(config)
}

pub fn resolve_explore(cli: &args::ExploreArgs) -> Result<RunConfig, CliError> {
    let mut config = base_config(cli.common.config.as_deref())?;
    apply_common(&mut config, &cli.common);
    apply_input(&mut config, &cli.input);
    if let Some(bins) = cli.bins {
        config.bins = bins;
    }
    validate(&config)?;
    Ok(config)
}

pub fn resolve_train(cli: &args::TrainArgs) -> Result<RunConfig, CliError> {
    let mut config = base_config(cli.common.config.as_deref())?;
    apply_common(&mut config, &cli.common);
    apply_input(&mut config, &cli.input);
    apply_model(&mut config, &cli.model);
    if let Some(family) = cli.family {
        config.model = family.into();
    }
    if let Some(fusion) = cli.fusion {
        config.fusion = match fusion {
            args::FusionArg::None => Fusion::None,
            args::FusionArg::Feature => Fusion::Feature,
            args::FusionArg::Decision => Fusion::Decision,
            args::FusionArg::Kalman => Fusion::Kalman,
        };
    }
    if let Some(sensors) = &cli.sensors {
        config.sensors = Some(sensors.clone());
    }
    validate(&config)?;
    Ok(config)
}

pub fn resolve_eval(cli: &args::EvalArgs) -> Result<RunConfig, CliError> {
    let mut config = base_config(cli.common.config.as_deref())?;
    apply_common(&mut config, &cli.common);
    apply_input(&mut config, &cli.input);
    if let Some(ratio) = cli.ratio {
        config.ratio = ratio;
    }
    validate(&config)?;
    Ok(config)
}

pub fn resolve_kalman(cli: &args::KalmanArgs) -> Result<RunConfig, CliError> {
    let mut config = base_config(cli.common.config.as_deref())?;
    apply_common(&mut config, &cli.common);
    apply_input(&mut config, &cli.input);
    if let Some(q_scale) = cli.q_scale {
        config.q_scale = q_scale;
    }
    if let Some(r_scale) = cli.r_scale {
        config.r_scale = r_scale;
    }
    validate(&config)?;
    Ok(config)
}

pub fn resolve_compare(cli: &args::CompareArgs) -> Result<RunConfig, CliError> {
    let mut config = base_config(cli.common.config.as_deref())?;
    apply_common(&mut config, &cli.common);
    apply_input(&mut config, &cli.input);
    apply_model(&mut config, &cli.model);
    if let Some(base) = cli.decision_base {
        config.decision_base = base.into();
    }
    validate(&config)?;
    Ok(config)
}
