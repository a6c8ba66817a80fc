//! Run configuration: built-in defaults, then a `key = value` file, then flags.

use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI};
use std::path::PathBuf;

use clap::ValueEnum;

use super::{CliError, CommonArgs, EngineArg, FamilyArg, FormatArg};
use crate::dynamics::SAMPLES_PER_PERIOD;
use crate::esd::{MIN_WIDTH_PERIODS, ZERO_TOL};
use crate::jcmodel::JCParams;

/// Default bound on the analytic/numeric concurrence difference.
pub const AGREEMENT_TOL: f64 = 1e-9;

#[derive(Clone, Debug, PartialEq)]
pub struct RunConfig {
    pub family: FamilyArg,
    pub alpha: f64,
    pub omega0: f64,
    pub omega: f64,
    pub g: f64,
    pub n_max: usize,
    /// `None` means two Rabi periods, `4 pi / G`.
    pub t_max: Option<f64>,
    pub steps: usize,
    pub engine: EngineArg,
    /// Concurrences at or below this count as zero.
    pub tol: f64,
    pub agreement_tol: f64,
    pub format: Option<FormatArg>,
    pub output: Option<PathBuf>,
    pub alpha_min: f64,
    pub alpha_max: f64,
    pub alpha_steps: usize,
    pub samples_per_period: usize,
    /// Minimum sudden-death width in Rabi periods.
    pub min_width: f64,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            family: FamilyArg::Phi,
            alpha: FRAC_PI_4,
            omega0: 5.0,
            omega: 5.0,
            g: 1.0,
            n_max: 1,
            t_max: None,
            steps: 400,
            engine: EngineArg::Analytic,
            tol: ZERO_TOL,
            agreement_tol: AGREEMENT_TOL,
            format: None,
            output: None,
            alpha_min: 0.0,
            alpha_max: FRAC_PI_2,
            alpha_steps: 20,
            samples_per_period: SAMPLES_PER_PERIOD,
            min_width: MIN_WIDTH_PERIODS,
        }
    }
}

fn usage(msg: String) -> CliError {
    CliError::usage(msg)
}

fn parse_num<T: std::str::FromStr>(key: &str, value: &str) -> Result<T, CliError> {
    value.parse().map_err(|_| usage(format!("invalid value '{value}' for '{key}'")))
}

fn parse_enum<T: ValueEnum>(key: &str, value: &str) -> Result<T, CliError> {
    T::from_str(value, true).map_err(|_| usage(format!("invalid value '{value}' for '{key}'")))
}

impl RunConfig {
    /// Applies `key = value` lines; `#` starts a comment, keys accept `-` or `_`.
    pub fn apply_file(&mut self, text: &str) -> Result<(), CliError> {
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| usage(format!("config line {}: expected 'key = value'", lineno + 1)))?;
            let key = key.trim().replace('-', "_");
            let value = value.trim();
            match key.as_str() {
                "family" => self.family = parse_enum(&key, value)?,
                "alpha" => self.alpha = parse_num(&key, value)?,
                "alpha_deg" => self.alpha = parse_num::<f64>(&key, value)?.to_radians(),
                "omega0" => self.omega0 = parse_num(&key, value)?,
                "omega" => self.omega = parse_num(&key, value)?,
                "g" => self.g = parse_num(&key, value)?,
                "n_max" => self.n_max = parse_num(&key, value)?,
                "t_max" => self.t_max = Some(parse_num(&key, value)?),
                "steps" => self.steps = parse_num(&key, value)?,
                "engine" => self.engine = parse_enum(&key, value)?,
                "tol" => self.tol = parse_num(&key, value)?,
                "agreement_tol" => self.agreement_tol = parse_num(&key, value)?,
                "format" => self.format = Some(parse_enum(&key, value)?),
                "output" => self.output = Some(PathBuf::from(value)),
                "alpha_min" => self.alpha_min = parse_num(&key, value)?,
                "alpha_max" => self.alpha_max = parse_num(&key, value)?,
                "alpha_steps" => self.alpha_steps = parse_num(&key, value)?,
                "samples_per_period" => self.samples_per_period = parse_num(&key, value)?,
                "min_width" => self.min_width = parse_num(&key, value)?,
                other => return Err(usage(format!("config line {}: unknown key '{other}'", lineno + 1))),
            }
        }
        Ok(())
    }

    pub fn apply_flags(&mut self, f: &CommonArgs) {
        macro_rules! set {
            ($($field:ident),*) => { $(if let Some(v) = f.$field.clone() { self.$field = v; })* };
        }
        set!(
            family,
            alpha,
            omega0,
            omega,
            g,
            n_max,
            steps,
            engine,
            tol,
            agreement_tol,
            alpha_min,
            alpha_max,
            alpha_steps,
            samples_per_period,
            min_width
        );
        if let Some(deg) = f.alpha_deg {
            self.alpha = deg.to_radians();
        }
        if f.t_max.is_some() {
            self.t_max = f.t_max;
        }
        if f.format.is_some() {
            self.format = f.format;
        }
        if f.output.is_some() {
            self.output = f.output.clone();
        }
    }

    /// Resolves defaults, the optional config file and the flags, in that order.
    pub fn resolve(flags: &CommonArgs) -> Result<Self, CliError> {
        let mut cfg = Self::default();
        if let Some(path) = &flags.config {
            let text = std::fs::read_to_string(path)
                .map_err(|e| CliError::io(format!("cannot read {}: {e}", path.display())))?;
            cfg.apply_file(&text)?;
        }
        cfg.apply_flags(flags);
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<(), CliError> {
        self.params().map_err(|e| usage(e.to_string()))?;
        let positive = [("tol", self.tol), ("agreement-tol", self.agreement_tol), ("min-width", self.min_width)];
        for (name, v) in positive {
            if !(v.is_finite() && v >= 0.0) {
                return Err(usage(format!("{name} must be a non-negative number")));
            }
        }
        if !self.alpha.is_finite() || !self.alpha_min.is_finite() || !self.alpha_max.is_finite() {
            return Err(usage("angles must be finite".into()));
        }
        if self.steps == 0 || self.samples_per_period == 0 {
            return Err(usage("steps and samples-per-period must be at least 1".into()));
        }
        if self.n_max == 0 {
            return Err(usage("n-max must be at least 1".into()));
        }
        if let Some(t) = self.t_max {
            if !(t.is_finite() && t > 0.0) {
                return Err(usage("t-max must be positive".into()));
            }
        }
        if self.alpha_steps > 0 && self.alpha_max <= self.alpha_min {
            return Err(usage("alpha-max must exceed alpha-min".into()));
        }
        Ok(())
    }

    pub fn params(&self) -> crate::Result<JCParams> {
        JCParams::new(self.omega0, self.omega, self.g)
    }

    /// Rabi frequency `G = 2 g`.
    pub fn rabi(&self) -> f64 {
        2.0 * self.g
    }

    pub fn t_max(&self) -> f64 {
        self.t_max.unwrap_or(4.0 * PI / self.rabi())
    }

    pub fn format_or(&self, default: FormatArg) -> FormatArg {
        self.format.unwrap_or(default)
    }
}
