//! Settings resolution: built-in defaults, then a `key=value` config file,
//! then command-line flags.

use std::fs;
use std::path::Path;

use speckle_core::activity::HistScope;
use speckle_core::pipeline::{ActivityThreshold, PipelineConfig};
use speckle_core::wavelet::{Shrink, ThresholdRule};

use crate::args::{GlobalArgs, RuleArg};
use crate::error::CliError;

pub const DEFAULT_SEED: u64 = 0;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Settings {
    pub pipeline: PipelineConfig,
    pub seed: u64,
    pub counter_width: Option<u32>,
}

/// Optional values from one configuration layer.
#[derive(Debug, Clone, Default, PartialEq)]
struct Layer {
    z: Option<u32>,
    threshold: Option<f64>,
    threshold_per_pixel: Option<f64>,
    levels: Option<usize>,
    shrink: Option<Shrink>,
    rule: Option<RuleArg>,
    manual_t: Option<f64>,
    hist_scope: Option<HistScope>,
    homomorphic: Option<bool>,
    seed: Option<u64>,
    counter_width: Option<u32>,
    metrics_frame: Option<usize>,
}

fn parse_value<T: std::str::FromStr>(key: &str, value: &str, line: usize) -> Result<T, CliError> {
    value
        .parse()
        .map_err(|_| CliError::Usage(format!("config line {line}: bad value {value:?} for {key}")))
}

fn parse_bool(key: &str, value: &str, line: usize) -> Result<bool, CliError> {
    match value {
        "true" | "1" | "yes" | "on" => Ok(true),
        "false" | "0" | "no" | "off" => Ok(false),
        _ => Err(CliError::Usage(format!(
            "config line {line}: bad boolean {value:?} for {key}"
        ))),
    }
}

fn parse_layer(text: &str) -> Result<Layer, CliError> {
    let mut layer = Layer::default();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let (key, value) = content
            .split_once('=')
            .ok_or_else(|| CliError::Usage(format!("config line {line}: expected key=value")))?;
        let key = key.trim().replace('-', "_");
        let value = value.trim();
        match key.as_str() {
            "z" => layer.z = Some(parse_value(&key, value, line)?),
            "threshold" => layer.threshold = Some(parse_value(&key, value, line)?),
            "threshold_per_pixel" => {
                layer.threshold_per_pixel = Some(parse_value(&key, value, line)?)
            }
            "levels" => layer.levels = Some(parse_value(&key, value, line)?),
            "shrink" => layer.shrink = Some(parse_value(&key, value, line)?),
            "rule" => {
                layer.rule = Some(match value {
                    "universal" => RuleArg::Universal,
                    "manual" => RuleArg::Manual,
                    _ => {
                        return Err(CliError::Usage(format!(
                            "config line {line}: unknown rule {value:?}"
                        )))
                    }
                })
            }
            "manual_t" => layer.manual_t = Some(parse_value(&key, value, line)?),
            "hist_scope" => layer.hist_scope = Some(parse_value(&key, value, line)?),
            "homomorphic" => layer.homomorphic = Some(parse_bool(&key, value, line)?),
            "seed" => layer.seed = Some(parse_value(&key, value, line)?),
            "counter_width" => layer.counter_width = Some(parse_value(&key, value, line)?),
            "metrics_frame" => layer.metrics_frame = Some(parse_value(&key, value, line)?),
            other => {
                return Err(CliError::Usage(format!(
                    "config line {line}: unknown key {other:?}"
                )))
            }
        }
    }
    Ok(layer)
}

fn flag_layer(g: &GlobalArgs) -> Layer {
    Layer {
        z: g.z,
        threshold: g.threshold,
        threshold_per_pixel: g.threshold_per_pixel,
        levels: g.levels,
        shrink: g.shrink,
        rule: g.rule,
        manual_t: g.manual_t,
        hist_scope: g.hist_scope,
        homomorphic: g.homomorphic.then_some(true),
        seed: g.seed,
        counter_width: g.counter_width,
        metrics_frame: None,
    }
}

/// Mutable accumulator while layers are applied in order.
struct Draft {
    cfg: PipelineConfig,
    rule: Option<RuleArg>,
    manual_t: Option<f64>,
    seed: u64,
    counter_width: Option<u32>,
}

impl Draft {
    fn apply(&mut self, l: Layer) {
        if let Some(z) = l.z {
            self.cfg.z = z;
        }
        // Within one layer an absolute threshold beats a per-pixel one.
        if let Some(f) = l.threshold_per_pixel {
            self.cfg.activity_threshold = ActivityThreshold::PerPixel(f);
        }
        if let Some(t) = l.threshold {
            self.cfg.activity_threshold = ActivityThreshold::Absolute(t);
        }
        if let Some(levels) = l.levels {
            self.cfg.denoise.levels = levels;
        }
        if let Some(mode) = l.shrink {
            self.cfg.denoise.threshold.mode = mode;
        }
        if l.rule.is_some() {
            self.rule = l.rule;
        }
        if l.manual_t.is_some() {
            self.manual_t = l.manual_t;
        }
        if let Some(scope) = l.hist_scope {
            self.cfg.hist_scope = scope;
        }
        if let Some(h) = l.homomorphic {
            self.cfg.denoise.homomorphic = h;
        }
        if let Some(seed) = l.seed {
            self.seed = seed;
        }
        if l.counter_width.is_some() {
            self.counter_width = l.counter_width;
        }
        if let Some(k) = l.metrics_frame {
            self.cfg.metrics_frame = k;
        }
    }

    fn finish(mut self) -> Result<Settings, CliError> {
        let rule = self.rule.unwrap_or(if self.manual_t.is_some() {
            RuleArg::Manual
        } else {
            RuleArg::Universal
        });
        self.cfg.denoise.threshold.rule = match rule {
            RuleArg::Universal => ThresholdRule::Universal,
            RuleArg::Manual => {
                let t = self
                    .manual_t
                    .ok_or_else(|| CliError::Usage("--rule manual requires --manual-t".into()))?;
                if !t.is_finite() || t < 0.0 {
                    return Err(CliError::Usage(format!(
                        "manual threshold must be non-negative, got {t}"
                    )));
                }
                ThresholdRule::Manual(t)
            }
        };
        self.cfg
            .validate()
            .map_err(|e| CliError::Usage(e.to_string()))?;
        if self.counter_width == Some(0) {
            return Err(CliError::Usage("counter width must be at least 1".into()));
        }
        Ok(Settings {
            pipeline: self.cfg,
            seed: self.seed,
            counter_width: self.counter_width,
        })
    }
}

pub fn resolve(global: &GlobalArgs) -> Result<Settings, CliError> {
    let file = match &global.config {
        Some(path) => Some(read_config(path)?),
        None => None,
    };
    resolve_layers(file.as_deref(), global)
}

fn read_config(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(|e| CliError::io(path, e))
}

fn resolve_layers(file: Option<&str>, global: &GlobalArgs) -> Result<Settings, CliError> {
    let mut draft = Draft {
        cfg: PipelineConfig::default(),
        rule: None,
        manual_t: None,
        seed: DEFAULT_SEED,
        counter_width: None,
    };
    if let Some(text) = file {
        draft.apply(parse_layer(text)?);
    }
    draft.apply(flag_layer(global));
    draft.finish()
}
