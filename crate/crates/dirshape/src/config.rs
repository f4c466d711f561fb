//! Run configuration: defaults, a flat `key = value` file, flag overrides.

use std::f64::consts::PI;
use std::path::Path;

use dirshape_core::MetricConfig;

use crate::format::format_g;
use crate::{Error, Result};

/// Seed used by randomized checks when none is given.
pub const DEFAULT_SEED: u64 = 0x5eed_d1a5;

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub metric: MetricConfig,
    /// Gray level at or above which a pixel is foreground.
    pub threshold: u8,
    /// Treat dark pixels as foreground.
    pub invert: bool,
    /// Keep the largest 8-connected component instead of rejecting
    /// disconnected inputs.
    pub largest_component: bool,
    /// Worker threads; 0 lets the pool decide.
    pub workers: usize,
    pub seed: u64,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            metric: MetricConfig::default(),
            threshold: 128,
            invert: false,
            largest_component: false,
            workers: 0,
            seed: DEFAULT_SEED,
        }
    }
}

pub const KEYS: [&str; 10] =
    ["epsilon", "area", "kappa", "thetas", "betas", "threshold", "invert", "largest_component", "workers", "seed"];

impl RunConfig {
    /// Sets one key from its text form.
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        let value = value.trim();
        let bad = |what: &str| Error::Config(format!("{key}: {what} {value:?}"));
        let real = || value.parse::<f64>().map_err(|_| bad("expected a number, got"));
        match key {
            "epsilon" => self.metric.epsilon = real()?,
            "area" => self.metric.area = real()?,
            "kappa" => self.metric.kappa = real()?,
            "thetas" => self.metric.thetas = parse_list(value, parse_angle).map_err(|_| bad("bad angle list"))?,
            "betas" => self.metric.betas = parse_list(value, |s| s.parse().ok()).map_err(|_| bad("bad number list"))?,
            "threshold" => self.threshold = value.parse().map_err(|_| bad("expected 0..=255, got"))?,
            "invert" => self.invert = parse_bool(value).ok_or_else(|| bad("expected true/false, got"))?,
            "largest_component" => {
                self.largest_component = parse_bool(value).ok_or_else(|| bad("expected true/false, got"))?
            }
            "workers" => self.workers = value.parse().map_err(|_| bad("expected a count, got"))?,
            "seed" => self.seed = value.parse().map_err(|_| bad("expected an unsigned integer, got"))?,
            _ => return Err(Error::Config(format!("unknown key {key:?} (known: {})", KEYS.join(", ")))),
        }
        Ok(())
    }

    /// Applies every `key = value` line of `text`; `#` starts a comment.
    pub fn apply_text(&mut self, text: &str, origin: &str) -> Result<()> {
        for (k, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or_default().trim();
            if line.is_empty() {
                continue;
            }
            let parse_err = |message: String| Error::Parse { origin: origin.into(), line: k + 1, message };
            let (key, value) = line.split_once('=').ok_or_else(|| parse_err("expected key = value".into()))?;
            self.set(key.trim(), value).map_err(|e| parse_err(e.to_string()))?;
        }
        Ok(())
    }

    pub fn apply_file(&mut self, path: &Path) -> Result<()> {
        let text = std::fs::read_to_string(path).map_err(Error::io(path))?;
        self.apply_text(&text, &path.display().to_string())
    }

    pub fn validate(&self) -> Result<()> {
        self.metric.validate().map_err(|e| Error::Config(e.to_string()))
    }

    /// Effective settings for artifact headers. The worker count is left
    /// out since it never changes results.
    pub fn echo(&self) -> Vec<(String, String)> {
        let list = |v: &[f64]| v.iter().map(|x| format_g(*x, 9)).collect::<Vec<_>>().join(",");
        let m = &self.metric;
        [
            ("epsilon", format_g(m.epsilon, 9)),
            ("area", format_g(m.area, 9)),
            ("kappa", format_g(m.kappa, 9)),
            ("thetas", list(&m.thetas)),
            ("betas", list(&m.betas)),
            ("threshold", self.threshold.to_string()),
            ("invert", self.invert.to_string()),
            ("largest_component", self.largest_component.to_string()),
            ("seed", self.seed.to_string()),
        ]
        .into_iter()
        .map(|(k, v)| (k.to_string(), v))
        .collect()
    }
}

fn parse_bool(s: &str) -> Option<bool> {
    match s.to_ascii_lowercase().as_str() {
        "true" | "yes" | "1" | "on" => Some(true),
        "false" | "no" | "0" | "off" => Some(false),
        _ => None,
    }
}

fn parse_list(s: &str, item: impl Fn(&str) -> Option<f64>) -> std::result::Result<Vec<f64>, ()> {
    s.split(',').map(|t| item(t.trim()).ok_or(())).collect()
}

/// A number, or a multiple of `pi` such as `pi/2`, `-pi/4` or `3pi/4`.
pub fn parse_angle(s: &str) -> Option<f64> {
    if let Ok(v) = s.parse::<f64>() {
        return Some(v);
    }
    let s = s.replace(' ', "").to_ascii_lowercase();
    let (sign, s) = match s.strip_prefix('-') {
        Some(rest) => (-1.0, rest.to_string()),
        None => (1.0, s),
    };
    let (num, den) = match s.split_once('/') {
        Some((n, d)) => (n.to_string(), d.parse::<f64>().ok()?),
        None => (s, 1.0),
    };
    let coef = num.strip_suffix("pi")?.trim_end_matches('*');
    let coef = if coef.is_empty() { 1.0 } else { coef.parse::<f64>().ok()? };
    Some(sign * coef * PI / den)
}
