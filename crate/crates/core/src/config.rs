//! Flat `key = value` configuration with command-line overrides.
//!
//! Lines are `key = value`; `#` starts a comment. Keys use the parameter
//! names (`omega0`, `gamma_g`, `T`, `n_step`, `delta_min`, ...), with `-`
//! accepted in place of `_`. Angles and frequencies accept expressions such
//! as `pi/4`, `3pi/8` or `-2*pi`.

use std::f64::consts::PI;
use std::path::Path;

use crate::gp::GpOptions;
use crate::spinops::ConeAxis;
use crate::sweep::{SweepConfig, SweepMode};
use crate::vdp::VdpParams;
use crate::{Error, Result};

/// Parses a real number or a multiple/fraction of `pi`.
pub fn parse_number(text: &str) -> Option<f64> {
    let s: String = text.chars().filter(|c| !c.is_whitespace()).collect();
    if s.is_empty() {
        return None;
    }
    if let Ok(x) = s.parse::<f64>() {
        return Some(x);
    }
    let lower = s.to_ascii_lowercase();
    let (num, den) = match lower.split_once('/') {
        Some((n, d)) => (n, Some(d.parse::<f64>().ok()?)),
        None => (lower.as_str(), None),
    };
    let coef = num.strip_suffix("pi")?;
    let coef = coef.strip_suffix('*').unwrap_or(coef);
    let coef = match coef {
        "" | "+" => 1.0,
        "-" => -1.0,
        c => c.parse::<f64>().ok()?,
    };
    let value = coef * PI / den.unwrap_or(1.0);
    value.is_finite().then_some(value)
}

/// Canonical spelling of a configuration key.
pub fn normalize_key(key: &str) -> String {
    let k = key.trim().replace('-', "_");
    match k.as_str() {
        "T" | "t" | "strength" => "T".to_string(),
        _ => k.to_ascii_lowercase(),
    }
}

fn bad(key: &str, reason: impl Into<String>) -> Error {
    Error::Config { key: key.to_string(), reason: reason.into() }
}

/// Evolution time: a number or `cycle` for one full turn of the axis.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Duration {
    Fixed(f64),
    Cycle,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Settings {
    pub omega0: f64,
    pub gamma_g: f64,
    pub gamma_d: f64,
    pub alpha: f64,
    pub omega: f64,
    pub strength: f64,
    /// Signal frequency; `omega0 + delta` when unset.
    pub omega_sig: Option<f64>,
    pub delta: f64,
    pub phi_sig: f64,
    /// `200/omega0` when unset.
    pub tau: Option<Duration>,
    pub n_step: usize,
    pub delta_min: f64,
    pub delta_max: f64,
    pub t_min: f64,
    pub t_max: f64,
    pub n_delta: usize,
    pub n_t: usize,
    pub mode: SweepMode,
    pub threads: Option<usize>,
    pub degeneracy_tol: f64,
    pub pivot_tol: f64,
}

impl Default for Settings {
    fn default() -> Self {
        let gp = GpOptions::default();
        Settings {
            omega0: 1.0,
            gamma_g: 0.5,
            gamma_d: 1.0,
            alpha: PI / 4.0,
            omega: 0.05,
            strength: 0.0,
            omega_sig: None,
            delta: 0.0,
            phi_sig: 0.0,
            tau: None,
            n_step: 200_000,
            delta_min: -0.5,
            delta_max: 0.5,
            t_min: 0.0,
            t_max: 0.5,
            n_delta: 11,
            n_t: 11,
            mode: SweepMode::SyncAnalytic,
            threads: None,
            degeneracy_tol: gp.degeneracy_tol,
            pivot_tol: gp.pivot_tol,
        }
    }
}

impl Settings {
    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|source| Error::Io { path: path.to_path_buf(), source })?;
        let mut s = Settings::default();
        s.apply_text(&text)?;
        Ok(s)
    }

    pub fn apply_text(&mut self, text: &str) -> Result<()> {
        for (n, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) =
                line.split_once('=').ok_or_else(|| bad(line, format!("line {}: expected `key = value`", n + 1)))?;
            self.set(key, value)?;
        }
        Ok(())
    }

    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        let key = normalize_key(key);
        let value = value.trim();
        let real = || parse_number(value).ok_or_else(|| bad(&key, format!("not a number: `{value}`")));
        let count = || {
            value
                .replace('_', "")
                .parse::<f64>()
                .ok()
                .filter(|x| x.fract() == 0.0 && *x >= 0.0 && *x <= u32::MAX as f64)
                .map(|x| x as usize)
                .ok_or_else(|| bad(&key, format!("not a non-negative integer: `{value}`")))
        };
        match key.as_str() {
            "omega0" => self.omega0 = real()?,
            "gamma_g" => self.gamma_g = real()?,
            "gamma_d" => self.gamma_d = real()?,
            "alpha" => self.alpha = real()?,
            "omega" => self.omega = real()?,
            "T" => self.strength = real()?,
            "omega_sig" => self.omega_sig = Some(real()?),
            "delta" => self.delta = real()?,
            "phi_sig" => self.phi_sig = real()?,
            "tau" => {
                self.tau =
                    Some(if value.eq_ignore_ascii_case("cycle") { Duration::Cycle } else { Duration::Fixed(real()?) })
            }
            "n_step" => self.n_step = count()?,
            "delta_min" => self.delta_min = real()?,
            "delta_max" => self.delta_max = real()?,
            "t_min" => self.t_min = real()?,
            "t_max" => self.t_max = real()?,
            "n_delta" => self.n_delta = count()?,
            "n_t" => self.n_t = count()?,
            "mode" => self.mode = value.parse().map_err(|e: String| bad(&key, e))?,
            "threads" => {
                self.threads = if value.eq_ignore_ascii_case("auto") { None } else { Some(count()?).filter(|&n| n > 0) }
            }
            "degeneracy_tol" => self.degeneracy_tol = real()?,
            "pivot_tol" => self.pivot_tol = real()?,
            _ => return Err(bad(&key, "unknown key")),
        }
        Ok(())
    }

    pub fn gp_options(&self) -> Result<GpOptions> {
        if !(self.degeneracy_tol >= 0.0) {
            return Err(bad("degeneracy_tol", "must be non-negative"));
        }
        if !(self.pivot_tol > 0.0 && self.pivot_tol < 1.0) {
            return Err(bad("pivot_tol", "must lie in (0, 1)"));
        }
        Ok(GpOptions { degeneracy_tol: self.degeneracy_tol, pivot_tol: self.pivot_tol, ..GpOptions::default() })
    }

    pub fn vdp_params(&self) -> Result<VdpParams> {
        let axis = ConeAxis::new(self.alpha, self.omega).map_err(|e| bad("alpha", e.to_string()))?;
        let tau = match self.tau {
            Some(Duration::Fixed(t)) => t,
            Some(Duration::Cycle) if self.omega != 0.0 => 2.0 * PI / self.omega.abs(),
            Some(Duration::Cycle) => return Err(bad("tau", "`cycle` needs omega != 0")),
            None if self.omega0 != 0.0 => 200.0 / self.omega0.abs(),
            None => return Err(bad("tau", "required when omega0 = 0")),
        };
        let p = VdpParams {
            omega0: self.omega0,
            gamma_g: self.gamma_g,
            gamma_d: self.gamma_d,
            axis,
            strength: self.strength,
            omega_sig: self.omega_sig.unwrap_or(self.omega0 + self.delta),
            phi_sig: self.phi_sig,
            tau,
            n_step: self.n_step,
        };
        p.validate().map_err(|e| match e {
            Error::InvalidParameter { name, reason } => bad(name, reason),
            other => other,
        })?;
        Ok(p)
    }

    pub fn sweep_config(&self) -> Result<SweepConfig> {
        let cfg = SweepConfig {
            delta_min: self.delta_min,
            delta_max: self.delta_max,
            t_min: self.t_min,
            t_max: self.t_max,
            n_delta: self.n_delta,
            n_t: self.n_t,
            mode: self.mode,
            base: self.vdp_params()?,
            threads: self.threads,
            gp: self.gp_options()?,
        };
        cfg.validate()?;
        Ok(cfg)
    }
}
