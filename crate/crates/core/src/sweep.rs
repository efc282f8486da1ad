//! Parameter grids over detuning and signal strength, with CSV and SVG
//! output.

use std::f64::consts::PI;
use std::fmt::Write as _;
use std::path::Path;
use std::str::FromStr;

use rayon::prelude::*;

use crate::evolver::steady_state;
use crate::gp::GpOptions;
use crate::oracles::{gp_noncyclic, sync_measure_closed_form, vdp_coherences};
use crate::spinops::sync_measure_numeric;
use crate::vdp::{build_rwa_model, gp_numeric, VdpParams};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepMode {
    SyncAnalytic,
    SyncNumeric,
    GpNumeric,
    GpAnalytic,
}

impl SweepMode {
    pub fn name(self) -> &'static str {
        match self {
            SweepMode::SyncAnalytic => "sync-analytic",
            SweepMode::SyncNumeric => "sync-numeric",
            SweepMode::GpNumeric => "gp-numeric",
            SweepMode::GpAnalytic => "gp-analytic",
        }
    }

    pub fn is_phase(self) -> bool {
        matches!(self, SweepMode::GpNumeric | SweepMode::GpAnalytic)
    }
}

impl FromStr for SweepMode {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s.trim().replace('_', "-").to_ascii_lowercase().as_str() {
            "sync-analytic" => Ok(SweepMode::SyncAnalytic),
            "sync-numeric" => Ok(SweepMode::SyncNumeric),
            "gp-numeric" => Ok(SweepMode::GpNumeric),
            "gp-analytic" => Ok(SweepMode::GpAnalytic),
            other => Err(format!("unknown mode `{other}` (sync-analytic, sync-numeric, gp-numeric, gp-analytic)")),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepConfig {
    pub delta_min: f64,
    pub delta_max: f64,
    pub t_min: f64,
    pub t_max: f64,
    pub n_delta: usize,
    pub n_t: usize,
    pub mode: SweepMode,
    pub base: VdpParams,
    /// Worker count; all cores when `None`.
    pub threads: Option<usize>,
    pub gp: GpOptions,
}

fn config_err(key: &str, reason: impl Into<String>) -> Error {
    Error::Config { key: key.to_string(), reason: reason.into() }
}

impl SweepConfig {
    pub fn validate(&self) -> Result<()> {
        for (key, n) in [("n_delta", self.n_delta), ("n_t", self.n_t)] {
            if n < 2 {
                return Err(config_err(key, format!("need at least 2 points, got {n}")));
            }
        }
        let finite = [self.delta_min, self.delta_max, self.t_min, self.t_max];
        if finite.iter().any(|x| !x.is_finite()) {
            return Err(config_err("delta_min", "grid bounds must be finite"));
        }
        if !(self.delta_min < self.delta_max) {
            return Err(config_err("delta_max", "must exceed delta_min"));
        }
        if !(self.t_min < self.t_max) {
            return Err(config_err("t_max", "must exceed t_min"));
        }
        if self.t_min < 0.0 {
            return Err(config_err("t_min", "signal strength must be non-negative"));
        }
        self.base.validate()
    }

    pub fn deltas(&self) -> Vec<f64> {
        linspace(self.delta_min, self.delta_max, self.n_delta)
    }

    pub fn strengths(&self) -> Vec<f64> {
        linspace(self.t_min, self.t_max, self.n_t)
    }
}

/// `n` equidistant points including both ends.
pub fn linspace(a: f64, b: f64, n: usize) -> Vec<f64> {
    match n {
        0 => vec![],
        1 => vec![a],
        _ => (0..n).map(|k| if k == n - 1 { b } else { a + (b - a) * k as f64 / (n - 1) as f64 }).collect(),
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub delta: f64,
    pub strength: f64,
    pub value: Option<f64>,
    pub unwrapped: Option<f64>,
    /// `|z|` for phase modes.
    pub visibility: Option<f64>,
    pub flag: Option<&'static str>,
}

/// Grid results, row-major with detuning outer and strength inner.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepTable {
    pub mode: SweepMode,
    pub n_delta: usize,
    pub n_t: usize,
    /// Unit of both axes in labels.
    pub gamma_d: f64,
    pub rows: Vec<SweepRow>,
}

/// Value and optional visibility at one grid point.
pub fn evaluate_point(cfg: &SweepConfig, delta: f64, strength: f64) -> Result<(f64, Option<f64>)> {
    let p = VdpParams { strength, ..cfg.base }.with_detuning(delta);
    match cfg.mode {
        SweepMode::SyncAnalytic => {
            let c = vdp_coherences(p.gamma_g, p.gamma_d, delta, p.phi_sig);
            Ok((sync_measure_closed_form(strength, c), None))
        }
        SweepMode::SyncNumeric => {
            let mut still = p;
            still.axis.omega = 0.0;
            let rho = steady_state(&build_rwa_model(&still)?, 0.0)?;
            Ok((sync_measure_numeric(&rho)?.value, None))
        }
        SweepMode::GpNumeric => {
            let r = gp_numeric(&p, &cfg.gp)?;
            Ok((r.gamma, Some(r.visibility)))
        }
        SweepMode::GpAnalytic => Ok((gp_noncyclic(&p, p.tau), None)),
    }
}

/// Removes jumps larger than π between consecutive defined entries.
pub fn unwrap_phases(values: &[Option<f64>]) -> Vec<Option<f64>> {
    let mut offset = 0.0;
    let mut last: Option<f64> = None;
    values
        .iter()
        .map(|v| {
            let x = (*v)?;
            if let Some(prev) = last {
                let mut y = x + offset;
                while y - prev > PI {
                    offset -= 2.0 * PI;
                    y -= 2.0 * PI;
                }
                while prev - y > PI {
                    offset += 2.0 * PI;
                    y += 2.0 * PI;
                }
            }
            let y = x + offset;
            last = Some(y);
            Some(y)
        })
        .collect()
}

pub fn run_sweep(cfg: &SweepConfig) -> Result<SweepTable> {
    cfg.validate()?;
    let points: Vec<(f64, f64)> =
        cfg.deltas().into_iter().flat_map(|d| cfg.strengths().into_iter().map(move |t| (d, t))).collect();
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cfg.threads.unwrap_or(0))
        .build()
        .map_err(|e| config_err("threads", e.to_string()))?;
    let results: Vec<Result<(f64, Option<f64>)>> =
        pool.install(|| points.par_iter().map(|&(d, t)| evaluate_point(cfg, d, t)).collect());
    let mut rows: Vec<SweepRow> = points
        .iter()
        .zip(results)
        .map(|(&(delta, strength), r)| match r {
            Ok((value, visibility)) => {
                SweepRow { delta, strength, value: Some(value), unwrapped: None, visibility, flag: None }
            }
            Err(e) => {
                SweepRow { delta, strength, value: None, unwrapped: None, visibility: None, flag: Some(e.flag()) }
            }
        })
        .collect();
    for line in rows.chunks_mut(cfg.n_t) {
        let values: Vec<Option<f64>> = line.iter().map(|r| r.value).collect();
        let unwrapped = if cfg.mode.is_phase() { unwrap_phases(&values) } else { values };
        for (row, u) in line.iter_mut().zip(unwrapped) {
            row.unwrapped = u;
        }
    }
    Ok(SweepTable { mode: cfg.mode, n_delta: cfg.n_delta, n_t: cfg.n_t, gamma_d: cfg.base.gamma_d, rows })
}

fn fmt_value(v: Option<f64>) -> String {
    v.map(|x| format!("{x:.16e}")).unwrap_or_default()
}

pub const CSV_HEADER: [&str; 5] = ["delta", "T", "value", "value_unwrapped", "flag"];

pub fn write_csv<W: std::io::Write>(table: &SweepTable, out: W) -> std::result::Result<(), csv::Error> {
    let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(out);
    w.write_record(CSV_HEADER)?;
    for r in &table.rows {
        w.write_record([
            fmt_value(Some(r.delta)),
            fmt_value(Some(r.strength)),
            fmt_value(r.value),
            fmt_value(r.unwrapped),
            r.flag.unwrap_or("").to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

pub fn emit_csv(table: &SweepTable, path: &Path) -> Result<()> {
    let io = |source: std::io::Error| Error::Io { path: path.to_path_buf(), source };
    let file = std::fs::File::create(path).map_err(io)?;
    write_csv(table, std::io::BufWriter::new(file)).map_err(|e| io(e.into()))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Colormap {
    #[default]
    Viridis,
    Gray,
}

impl FromStr for Colormap {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s.to_ascii_lowercase().as_str() {
            "viridis" => Ok(Colormap::Viridis),
            "gray" | "grey" => Ok(Colormap::Gray),
            other => Err(format!("unknown colormap `{other}` (viridis, gray)")),
        }
    }
}

impl Colormap {
    /// Color at `x ∈ [0, 1]` as `#rrggbb`.
    pub fn color(self, x: f64) -> String {
        let x = x.clamp(0.0, 1.0);
        let rgb = match self {
            Colormap::Gray => [x, x, x],
            Colormap::Viridis => {
                const STOPS: [[f64; 3]; 5] = [
                    [0.267, 0.005, 0.329],
                    [0.230, 0.322, 0.546],
                    [0.128, 0.567, 0.551],
                    [0.369, 0.789, 0.383],
                    [0.993, 0.906, 0.144],
                ];
                let s = x * 4.0;
                let i = (s.floor() as usize).min(3);
                let f = s - i as f64;
                std::array::from_fn(|c| STOPS[i][c] + f * (STOPS[i + 1][c] - STOPS[i][c]))
            }
        };
        let b = rgb.map(|v| (v * 255.0).round() as u8);
        format!("#{:02x}{:02x}{:02x}", b[0], b[1], b[2])
    }
}

fn check_rectangular(table: &SweepTable) -> Result<(Vec<f64>, Vec<f64>)> {
    let (nd, nt) = (table.n_delta, table.n_t);
    if nd == 0 || nt == 0 || table.rows.len() != nd * nt {
        return Err(Error::NonRectangular(format!("{} rows for a {nd}×{nt} grid", table.rows.len())));
    }
    let deltas: Vec<f64> = (0..nd).map(|i| table.rows[i * nt].delta).collect();
    let strengths: Vec<f64> = (0..nt).map(|j| table.rows[j].strength).collect();
    for (k, r) in table.rows.iter().enumerate() {
        if r.delta != deltas[k / nt] || r.strength != strengths[k % nt] {
            return Err(Error::NonRectangular(format!("row {k} is off the grid")));
        }
    }
    Ok((deltas, strengths))
}

/// Standalone SVG heatmap with detuning on the horizontal and signal
/// strength on the vertical axis, both in units of `γd`.
pub fn heatmap_svg(table: &SweepTable, colormap: Colormap) -> Result<String> {
    let (deltas, strengths) = check_rectangular(table)?;
    let (nd, nt) = (table.n_delta, table.n_t);
    let values: Vec<f64> = table.rows.iter().filter_map(|r| r.unwrapped.or(r.value)).collect();
    let lo = values.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let degenerate = values.is_empty() || !(hi > lo);

    let cell = (480.0 / nd.max(nt) as f64).clamp(4.0, 40.0);
    let (left, top) = (80.0, 40.0);
    let (w, h) = (cell * nd as f64, cell * nt as f64);
    let bar_x = left + w + 30.0;
    let width = bar_x + 120.0;
    let height = top + h + 60.0;
    let g = table.gamma_d;

    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{width:.0}" height="{height:.0}" viewBox="0 0 {width:.0} {height:.0}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(s, r#"<rect width="100%" height="100%" fill="white"/>"#);
    let _ = writeln!(s, r#"<text x="{left:.1}" y="20">{}</text>"#, table.mode.name());
    for (k, r) in table.rows.iter().enumerate() {
        let (i, j) = (k / nt, k % nt);
        let x = left + i as f64 * cell;
        let y = top + (nt - 1 - j) as f64 * cell;
        let fill = match r.unwrapped.or(r.value) {
            Some(_) if degenerate => colormap.color(0.5),
            Some(v) => colormap.color((v - lo) / (hi - lo)),
            None => "#ff00ff".to_string(),
        };
        let _ = writeln!(s, r#"<rect x="{x:.2}" y="{y:.2}" width="{cell:.2}" height="{cell:.2}" fill="{fill}"/>"#);
    }
    let bottom = top + h;
    let _ = writeln!(
        s,
        r#"<text x="{left:.1}" y="{:.1}">{:.3}</text><text x="{:.1}" y="{:.1}" text-anchor="end">{:.3}</text>"#,
        bottom + 16.0,
        deltas[0] / g,
        left + w,
        bottom + 16.0,
        deltas[nd - 1] / g
    );
    let _ = writeln!(s, r#"<text x="{:.1}" y="{:.1}" text-anchor="middle">Δ/γd</text>"#, left + 0.5 * w, bottom + 40.0);
    let _ = writeln!(
        s,
        r#"<text x="{:.1}" y="{bottom:.1}" text-anchor="end">{:.3}</text><text x="{:.1}" y="{:.1}" text-anchor="end">{:.3}</text>"#,
        left - 6.0,
        strengths[0] / g,
        left - 6.0,
        top + 10.0,
        strengths[nt - 1] / g
    );
    let _ = writeln!(
        s,
        r#"<text x="20" y="{:.1}" transform="rotate(-90 20 {:.1})" text-anchor="middle">T/γd</text>"#,
        top + 0.5 * h,
        top + 0.5 * h
    );
    let bars = 32;
    for b in 0..bars {
        let x = b as f64 / (bars - 1) as f64;
        let y = top + h * (1.0 - (b + 1) as f64 / bars as f64);
        let _ = writeln!(
            s,
            r#"<rect x="{bar_x:.1}" y="{y:.2}" width="16" height="{:.2}" fill="{}"/>"#,
            h / bars as f64,
            colormap.color(if degenerate { 0.5 } else { x })
        );
    }
    if degenerate {
        let v = if values.is_empty() { "none".to_string() } else { format!("{lo:.6e}") };
        let _ = writeln!(
            s,
            r#"<text x="{:.1}" y="{:.1}">constant {v}</text><text x="{:.1}" y="{:.1}">(degenerate scale)</text>"#,
            bar_x + 22.0,
            top + 0.5 * h,
            bar_x + 22.0,
            top + 0.5 * h + 14.0
        );
    } else {
        let _ = writeln!(
            s,
            r#"<text x="{:.1}" y="{:.1}">max {hi:.6e}</text><text x="{:.1}" y="{bottom:.1}">min {lo:.6e}</text>"#,
            bar_x + 22.0,
            top + 10.0,
            bar_x + 22.0
        );
    }
    s.push_str("</svg>\n");
    Ok(s)
}

pub fn render_heatmap(table: &SweepTable, path: &Path, colormap: Colormap) -> Result<()> {
    let svg = heatmap_svg(table, colormap)?;
    std::fs::write(path, svg).map_err(|source| Error::Io { path: path.to_path_buf(), source })
}
