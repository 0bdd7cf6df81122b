//! Steady-state parameter sweeps over the pump rate or the total population,
//! plus the asymptotic slope fit used to read off the scaling laws.

use crate::error::CliError;
use auger_core::model::SystemParams;
use auger_core::numeric::{linear_grid, log_grid, loglog_slope};
use auger_core::steady::{self, Regime};
use auger_core::table::{fmt_f64, TextTable};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepAxis {
    Pump,
    Population,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GridScale {
    Linear,
    Log,
}

#[derive(Debug, Clone, Copy)]
pub struct SweepConfig {
    pub params: SystemParams,
    pub axis: SweepAxis,
    pub min: f64,
    pub max: f64,
    pub points: usize,
    pub scale: GridScale,
    pub write_table: bool,
    pub write_plot: bool,
    pub seed: u64,
}

impl SweepConfig {
    pub fn validate(&self) -> Result<(), CliError> {
        let bad = |key: &'static str, reason: String| Err(CliError::BadConfig { key, reason });
        if self.min.is_nan() || self.max.is_nan() || self.min >= self.max {
            return bad("sweep.min", format!("need min < max, got {} vs {}", self.min, self.max));
        }
        if self.points < 2 {
            return bad("sweep.points", format!("need at least 2 points, got {}", self.points));
        }
        if self.scale == GridScale::Log && self.min <= 0.0 {
            return bad("sweep.min", format!("log grids need min > 0, got {}", self.min));
        }
        Ok(())
    }

    pub fn grid(&self) -> Vec<f64> {
        match self.scale {
            GridScale::Linear => linear_grid(self.min, self.max, self.points),
            GridScale::Log => log_grid(self.min, self.max, self.points),
        }
    }
}

#[derive(Debug, Clone, Copy)]
pub struct PumpSweepRow {
    pub w_p: f64,
    pub j_ph: f64,
    pub regime: Regime,
    pub j_weak: f64,
    pub j_saturated: f64,
}

/// Steady current across a pump grid, with both limit laws for comparison.
/// A point whose parameters fail validation aborts the sweep, naming the
/// offending pump value.
pub fn run_pump_sweep(cfg: &SweepConfig) -> Result<Vec<PumpSweepRow>, CliError> {
    cfg.validate()?;
    cfg.grid()
        .into_iter()
        .map(|w_p| {
            let p = SystemParams { w_p, ..cfg.params }
                .validated()
                .map_err(|source| CliError::SweepPoint {
                    axis: "w_p",
                    value: w_p,
                    source,
                })?;
            let s = steady::steady_populations(&p);
            Ok(PumpSweepRow {
                w_p,
                j_ph: s.j_ph,
                regime: s.regime,
                j_weak: steady::weak_limit_current(&p),
                j_saturated: steady::saturated_limit_current(&p),
            })
        })
        .collect()
}

pub fn pump_sweep_table(rows: &[PumpSweepRow]) -> String {
    let mut t = TextTable::new(vec!["w_p", "j_ph", "regime", "j_weak", "j_saturated"]);
    for r in rows {
        t.push_row(vec![
            fmt_f64(r.w_p),
            fmt_f64(r.j_ph),
            r.regime.to_string(),
            fmt_f64(r.j_weak),
            fmt_f64(r.j_saturated),
        ]);
    }
    t.render()
}

#[derive(Debug, Clone, Copy)]
pub struct PopulationSweepRow {
    pub n_total: f64,
    pub j_ph: f64,
    pub regime: Regime,
}

/// Steady current across a total-population grid at fixed pump.
pub fn run_population_sweep(cfg: &SweepConfig) -> Result<Vec<PopulationSweepRow>, CliError> {
    cfg.validate()?;
    cfg.grid()
        .into_iter()
        .map(|n_total| {
            let p = SystemParams { n_total, ..cfg.params }
                .validated()
                .map_err(|source| CliError::SweepPoint {
                    axis: "n_total",
                    value: n_total,
                    source,
                })?;
            let s = steady::steady_populations(&p);
            Ok(PopulationSweepRow {
                n_total,
                j_ph: s.j_ph,
                regime: s.regime,
            })
        })
        .collect()
}

pub fn population_sweep_table(rows: &[PopulationSweepRow]) -> String {
    let mut t = TextTable::new(vec!["n_total", "j_ph", "regime"]);
    for r in rows {
        t.push_row(vec![fmt_f64(r.n_total), fmt_f64(r.j_ph), r.regime.to_string()]);
    }
    t.render()
}

/// Log-log slopes fitted by ordinary least squares over the outer quarter of
/// the grid at each end, keeping the intermediate-regime bend out of the
/// asymptotic estimates. Returns (low-end slope, high-end slope).
pub fn outer_quarter_slopes(xs: &[f64], ys: &[f64]) -> (f64, f64) {
    assert_eq!(xs.len(), ys.len());
    let k = ((xs.len() as f64) * 0.25).ceil() as usize;
    let k = k.max(2).min(xs.len());
    let low = loglog_slope(&xs[..k], &ys[..k]);
    let high = loglog_slope(&xs[xs.len() - k..], &ys[xs.len() - k..]);
    (low, high)
}
