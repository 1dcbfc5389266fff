//! Tabulated saturation dome.

use super::saturation::{saturation_at_temperature, saturation_from_guess, SaturationPair};
use crate::error::{Error, Result};
use crate::numerics::{brent, Pchip};
use crate::thermo::EosParams;

pub const DEFAULT_DOME_SAMPLES: usize = 512;
pub const DOME_T_MIN: f64 = 0.7;
/// Lowest temperature reached by direct solves outside the table.
const T_FLOOR: f64 = 0.1;

#[derive(Debug, Clone)]
pub struct DomeTable {
    params: EosParams,
    rows: Vec<SaturationPair>,
    liquid: Pchip,
    vapor: Pchip,
}

impl DomeTable {
    /// `n_samples` rows graded toward the critical point, from `DOME_T_MIN` up to Tc.
    pub fn build(params: &EosParams, n_samples: usize) -> Result<Self> {
        Self::build_with(params, n_samples, DOME_T_MIN)
    }

    pub fn build_with(params: &EosParams, n_samples: usize, t_min: f64) -> Result<Self> {
        params.validate()?;
        if n_samples < 8 {
            return Err(Error::Config(format!(
                "dome needs at least 8 samples, got {n_samples}"
            )));
        }
        let tc = params.critical_point().t;
        if !(t_min > 0.0 && t_min < tc) {
            return Err(Error::InvalidTemperature {
                temperature: t_min,
                critical: tc,
            });
        }
        let n = (n_samples - 1) as f64;
        let mut rows = Vec::with_capacity(n_samples);
        rows.push(SaturationPair::critical(params));
        for k in 1..n_samples {
            let s = k as f64 / n;
            let t = tc - (tc - t_min) * s * s;
            let prev = rows.last().expect("nonempty");
            let pair = if k == 1 {
                saturation_at_temperature(params, t)
            } else {
                saturation_from_guess(params, t, prev)
            };
            rows.push(pair?);
        }
        rows.reverse();

        let liquid = Pchip::new(
            rows.iter().map(|r| r.liquid.tau).collect(),
            rows.iter().map(|r| r.liquid.e).collect(),
        );
        let vapor = Pchip::new(
            rows.iter().rev().map(|r| r.vapor.tau).collect(),
            rows.iter().rev().map(|r| r.vapor.e).collect(),
        );
        Ok(Self {
            params: *params,
            rows,
            liquid,
            vapor,
        })
    }

    pub fn params(&self) -> &EosParams {
        &self.params
    }

    /// Rows in increasing temperature, the last one being the critical point.
    pub fn rows(&self) -> &[SaturationPair] {
        &self.rows
    }

    pub fn nearest_row(&self, t: f64) -> &SaturationPair {
        self.rows
            .iter()
            .min_by(|a, b| (a.t_star - t).abs().total_cmp(&(b.t_star - t).abs()))
            .expect("dome has rows")
    }

    /// Saturation pair at an arbitrary temperature, seeded from the nearest row.
    pub fn pair_at(&self, params: &EosParams, t: f64) -> Result<SaturationPair> {
        let near = self.nearest_row(t);
        if near.t_star == t {
            return Ok(*near);
        }
        if near.vapor.tau > near.liquid.tau && params == &self.params {
            saturation_from_guess(params, t, near)
        } else {
            saturation_at_temperature(params, t)
        }
    }

    /// Dome energy g*(τ); `None` when τ is beyond the branches reachable above `T_FLOOR`.
    pub fn g_star(&self, tau: f64) -> Option<f64> {
        let tau_c = 3.0 * self.params.b;
        let (spline, on_liquid) = if tau <= tau_c {
            (&self.liquid, true)
        } else {
            (&self.vapor, false)
        };
        if let Some(e) = spline.eval(tau) {
            return Some(e);
        }
        let t_min = self.rows[0].t_star;
        let branch_tau = |t: f64| -> f64 {
            match self.pair_at(&self.params, t) {
                Ok(p) if on_liquid => p.liquid.tau - tau,
                Ok(p) => p.vapor.tau - tau,
                Err(_) => f64::NAN,
            }
        };
        let t = brent(branch_tau, T_FLOOR, t_min, 1e-14)?;
        self.params.isotherm_energy(tau, t).ok()
    }
}
