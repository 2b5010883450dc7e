//! Simulation configuration and its flat `key=value` file format.
//!
//! ```text
//! # comments and blank lines are ignored
//! rule = 2201
//! width = 200
//! seed = 42
//! ```
//!
//! Keys are the [`SimConfig`] field names; unknown keys are rejected.

use std::fmt::Write as _;
use std::path::Path;
use std::str::FromStr;

use crate::ca::{parse_rule, RuleParams};
use crate::error::{Error, Result};
use crate::kinetics::{MotionGains, Pose, Vec2};
use crate::stimulus::{LightSource, StimulusConfig, DEFAULT_P_EXCITE};

/// Distance from the lattice centre to the light at start, in lattice widths.
pub const START_DISTANCE_FACTOR: f64 = 1.5;
/// Arena half-width in multiples of the starting distance.
pub const ARENA_FACTOR: f64 = 10.0;
pub const DEFAULT_STEPS: u64 = 20_000;

#[derive(Debug, Clone, PartialEq)]
pub struct SimConfig {
    pub rule: RuleParams,
    pub width: usize,
    pub height: usize,
    pub light_x: f64,
    pub light_y: f64,
    pub light_radius: f64,
    pub pose_x: f64,
    pub pose_y: f64,
    pub heading: f64,
    pub k_translate: f64,
    pub k_rotate: f64,
    pub p_excite: f64,
    pub seed: u64,
    pub steps: u64,
    pub record_every: u64,
    /// Snapshot interval in steps; 0 means no snapshots.
    pub render_every: u64,
    /// Pose coordinates are clamped to `[-arena_halfwidth, arena_halfwidth]`.
    pub arena_halfwidth: f64,
    /// Start with a single Excited cell at the lattice centre.
    pub seed_cell: bool,
}

impl Default for SimConfig {
    fn default() -> Self {
        Self::square(200, parse_rule("2201").expect("valid rule"))
    }
}

impl SimConfig {
    /// Square `size × size` lattice at the origin, light due east at
    /// `1.5 · size`, arena ten times that distance.
    pub fn square(size: usize, rule: RuleParams) -> Self {
        let d0 = START_DISTANCE_FACTOR * size as f64;
        Self {
            rule,
            width: size,
            height: size,
            light_x: d0,
            light_y: 0.0,
            light_radius: (size as f64 / 25.0).max(1.0),
            pose_x: 0.0,
            pose_y: 0.0,
            heading: 0.0,
            k_translate: MotionGains::DEFAULT_TRANSLATE,
            k_rotate: MotionGains::DEFAULT_ROTATE,
            p_excite: DEFAULT_P_EXCITE,
            seed: 0,
            steps: DEFAULT_STEPS,
            record_every: 10,
            render_every: 2_000,
            arena_halfwidth: ARENA_FACTOR * d0,
            seed_cell: true,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::Invalid(msg));
        if self.width < 3 || self.height < 3 {
            return bad(format!("lattice {}x{} smaller than 3x3", self.width, self.height));
        }
        if self.steps == 0 {
            return bad("steps must be >= 1".into());
        }
        if self.record_every == 0 {
            return bad("record_every must be >= 1".into());
        }
        for (name, v) in [
            ("light_x", self.light_x),
            ("light_y", self.light_y),
            ("pose_x", self.pose_x),
            ("pose_y", self.pose_y),
            ("heading", self.heading),
        ] {
            if !v.is_finite() {
                return bad(format!("{name} is not finite"));
            }
        }
        if !(self.arena_halfwidth.is_finite() && self.arena_halfwidth > 0.0) {
            return bad(format!("arena_halfwidth {} must be positive", self.arena_halfwidth));
        }
        self.gains()?;
        self.stimulus()?;
        self.light()?;
        Ok(())
    }

    pub fn gains(&self) -> Result<MotionGains> {
        MotionGains::new(self.k_translate, self.k_rotate)
    }

    pub fn stimulus(&self) -> Result<StimulusConfig> {
        StimulusConfig::new(self.p_excite)
    }

    pub fn light(&self) -> Result<LightSource> {
        LightSource::new(Vec2::new(self.light_x, self.light_y), self.light_radius)
    }

    pub fn initial_pose(&self) -> Pose {
        Pose::new(Vec2::new(self.pose_x, self.pose_y), self.heading)
    }

    /// Distance from the starting pose to the light.
    pub fn initial_distance(&self) -> f64 {
        self.initial_pose().position.distance(Vec2::new(self.light_x, self.light_y))
    }

    /// Applies one `key = value` assignment.
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        fn num<T: FromStr>(key: &str, value: &str) -> Result<T> {
            value
                .parse()
                .map_err(|_| Error::Invalid(format!("{key}: cannot parse {value:?}")))
        }
        match key {
            "rule" => self.rule = parse_rule(value)?,
            "width" => self.width = num(key, value)?,
            "height" => self.height = num(key, value)?,
            "light_x" => self.light_x = num(key, value)?,
            "light_y" => self.light_y = num(key, value)?,
            "light_radius" => self.light_radius = num(key, value)?,
            "pose_x" => self.pose_x = num(key, value)?,
            "pose_y" => self.pose_y = num(key, value)?,
            "heading" => self.heading = num(key, value)?,
            "k_translate" => self.k_translate = num(key, value)?,
            "k_rotate" => self.k_rotate = num(key, value)?,
            "p_excite" => self.p_excite = num(key, value)?,
            "seed" => self.seed = num(key, value)?,
            "steps" => self.steps = num(key, value)?,
            "record_every" => self.record_every = num(key, value)?,
            "render_every" => self.render_every = num(key, value)?,
            "arena_halfwidth" => self.arena_halfwidth = num(key, value)?,
            "seed_cell" => self.seed_cell = num(key, value)?,
            _ => return Err(Error::Invalid(format!("unknown key {key:?}"))),
        }
        Ok(())
    }

    /// Applies every assignment of a config file body on top of `self`.
    pub fn apply_text(&mut self, text: &str) -> Result<()> {
        for (i, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let config_err = |message: String| Error::Config { line: i + 1, message };
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| config_err(format!("expected key=value, got {line:?}")))?;
            self.set(key.trim(), value.trim())
                .map_err(|e| config_err(e.to_string()))?;
        }
        Ok(())
    }

    pub fn from_text(text: &str) -> Result<Self> {
        let mut cfg = Self::default();
        cfg.apply_text(text)?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::from_text(&std::fs::read_to_string(path)?)
    }

    /// Serialises every field; [`SimConfig::from_text`] reads it back exactly.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let mut kv = |k: &str, v: &dyn std::fmt::Display| {
            let _ = writeln!(out, "{k}={v}");
        };
        kv("rule", &self.rule);
        kv("width", &self.width);
        kv("height", &self.height);
        kv("light_x", &self.light_x);
        kv("light_y", &self.light_y);
        kv("light_radius", &self.light_radius);
        kv("pose_x", &self.pose_x);
        kv("pose_y", &self.pose_y);
        kv("heading", &self.heading);
        kv("k_translate", &self.k_translate);
        kv("k_rotate", &self.k_rotate);
        kv("p_excite", &self.p_excite);
        kv("seed", &self.seed);
        kv("steps", &self.steps);
        kv("record_every", &self.record_every);
        kv("render_every", &self.render_every);
        kv("arena_halfwidth", &self.arena_halfwidth);
        kv("seed_cell", &self.seed_cell);
        out
    }
}
