//! Finite-volume solver for the homogeneous relaxation model in one dimension.
//!
//! Convection uses an HLLC flux at frozen fractions. Relaxation of the fractions
//! toward the phasic equilibria is applied cell by cell in a separate step.

mod flux;
mod source;
mod state;

use rayon::prelude::*;

pub use flux::{hllc_flux, physical_flux, wave_speeds};
pub use source::{relax_cell, source_step, FRACTION_CLAMP};
pub use state::{cell_state, cons_to_prim, prim_to_cons, CellState, Conserved, Primitive};

use crate::error::{Error, Result};
use crate::thermo::EosParams;

pub const GHOSTS: usize = 2;
const MAX_STEPS: usize = 10_000_000;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid1D {
    pub n_cells: usize,
    pub x_min: f64,
    pub x_max: f64,
    pub dx: f64,
}

impl Grid1D {
    pub fn new(n_cells: usize, x_min: f64, x_max: f64) -> Result<Self> {
        if n_cells == 0 || !(x_max > x_min) || !x_min.is_finite() || !x_max.is_finite() {
            return Err(Error::Config(format!(
                "invalid grid: {n_cells} cells on [{x_min}, {x_max}]"
            )));
        }
        Ok(Self {
            n_cells,
            x_min,
            x_max,
            dx: (x_max - x_min) / n_cells as f64,
        })
    }

    pub fn center(&self, i: usize) -> f64 {
        self.x_min + (i as f64 + 0.5) * self.dx
    }

    pub fn centers(&self) -> Vec<f64> {
        (0..self.n_cells).map(|i| self.center(i)).collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Boundary {
    Transmissive,
    Periodic,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Splitting {
    /// Convection over dt, then relaxation over dt.
    Godunov,
    /// Half relaxation, convection, half relaxation.
    Strang,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolverConfig {
    pub cfl: f64,
    /// Relaxation time; `f64::INFINITY` freezes the fractions.
    pub epsilon: f64,
    pub t_end: f64,
    pub boundary: Boundary,
    pub splitting: Splitting,
    /// Spacing of intermediate snapshots. The initial and final states are always emitted.
    pub snapshot_interval: Option<f64>,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            cfl: 0.9,
            epsilon: 1e-2,
            t_end: 0.4,
            boundary: Boundary::Transmissive,
            splitting: Splitting::Godunov,
            snapshot_interval: None,
        }
    }
}

impl SolverConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.cfl > 0.0 && self.cfl <= 1.0) {
            return Err(Error::Config(format!(
                "cfl must be in (0, 1], got {}",
                self.cfl
            )));
        }
        if !(self.epsilon > 0.0) {
            return Err(Error::Config(format!(
                "epsilon must be positive, got {}",
                self.epsilon
            )));
        }
        if !(self.t_end >= 0.0 && self.t_end.is_finite()) {
            return Err(Error::Config(format!("invalid t_end {}", self.t_end)));
        }
        if let Some(dt) = self.snapshot_interval {
            if !(dt > 0.0) {
                return Err(Error::Config(format!("invalid snapshot interval {dt}")));
            }
        }
        Ok(())
    }
}

/// Two constant states separated at `x0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RiemannProblem {
    pub left: Primitive,
    pub right: Primitive,
    pub x0: f64,
}

pub fn initial_from_fn(
    params: &EosParams,
    grid: &Grid1D,
    f: impl Fn(f64) -> Primitive,
) -> Result<Vec<Conserved>> {
    (0..grid.n_cells)
        .map(|i| prim_to_cons(params, &f(grid.center(i))).map_err(|e| e.at_cell(0.0, i)))
        .collect()
}

pub fn riemann_initial(
    params: &EosParams,
    grid: &Grid1D,
    rp: &RiemannProblem,
) -> Result<Vec<Conserved>> {
    let left = prim_to_cons(params, &rp.left)?;
    let right = prim_to_cons(params, &rp.right)?;
    Ok((0..grid.n_cells)
        .map(|i| if grid.center(i) < rp.x0 { left } else { right })
        .collect())
}

fn cell_states(params: &EosParams, states: &[Conserved], time: f64) -> Result<Vec<CellState>> {
    states
        .par_iter()
        .enumerate()
        .map(|(i, c)| {
            let s = cell_state(params, c).map_err(|e| e.at_cell(time, i))?;
            if !(s.c2 > 0.0) {
                return Err(Error::NonHyperbolicState { c2: s.c2 }.at_cell(time, i));
            }
            Ok(s)
        })
        .collect()
}

fn max_speed(cells: &[CellState]) -> f64 {
    cells
        .iter()
        .map(|s| s.prim.u.abs() + s.c2.sqrt())
        .fold(0.0, f64::max)
}

/// dt = cfl·dx / max(|u| + c).
pub fn stable_dt(params: &EosParams, grid: &Grid1D, states: &[Conserved], cfl: f64) -> Result<f64> {
    let cells = cell_states(params, states, 0.0)?;
    Ok(cfl * grid.dx / max_speed(&cells))
}

fn ghost_index(i: isize, n: usize, boundary: Boundary) -> usize {
    let n = n as isize;
    let j = match boundary {
        Boundary::Transmissive => i.clamp(0, n - 1),
        Boundary::Periodic => i.rem_euclid(n),
    };
    j as usize
}

/// Updated states and the change of the ρ, ρu, ρE totals due to the two boundary fluxes.
fn convect(
    grid: &Grid1D,
    states: &[Conserved],
    cells: &[CellState],
    dt: f64,
    boundary: Boundary,
) -> (Vec<Conserved>, [f64; 3]) {
    let n = grid.n_cells;
    // Interface k sits between cells k-1 and k.
    let fluxes: Vec<[f64; 6]> = (0..=n)
        .into_par_iter()
        .map(|k| {
            let l = ghost_index(k as isize - 1, n, boundary);
            let r = ghost_index(k as isize, n, boundary);
            flux::hllc_from_states(&states[l], &cells[l], &states[r], &cells[r])
        })
        .collect();
    let lam = dt / grid.dx;
    let through_boundary = [3, 4, 5].map(|k| -dt * (fluxes[n][k] - fluxes[0][k]));
    let next = states
        .par_iter()
        .enumerate()
        .map(|(i, c)| {
            let mut u = c.to_array();
            for (q, (fr, fl)) in u.iter_mut().zip(fluxes[i + 1].iter().zip(&fluxes[i])) {
                *q -= lam * (fr - fl);
            }
            Conserved::from_array(u)
        })
        .collect();
    (next, through_boundary)
}

/// W ← W − dt/dx (F_{i+1/2} − F_{i−1/2}).
pub fn convective_step(
    params: &EosParams,
    grid: &Grid1D,
    states: &[Conserved],
    dt: f64,
    boundary: Boundary,
) -> Result<Vec<Conserved>> {
    let cells = cell_states(params, states, 0.0)?;
    Ok(convect(grid, states, &cells, dt, boundary).0)
}

/// Totals of ρ, ρu, ρE over the grid.
pub fn totals(grid: &Grid1D, states: &[Conserved]) -> [f64; 3] {
    let mut t = [0.0; 3];
    for c in states {
        t[0] += c.rho;
        t[1] += c.mom;
        t[2] += c.ene;
    }
    t.map(|v| v * grid.dx)
}

fn abs_totals(grid: &Grid1D, states: &[Conserved]) -> [f64; 3] {
    let mut t = [0.0; 3];
    for c in states {
        t[0] += c.rho.abs();
        t[1] += c.mom.abs();
        t[2] += c.ene.abs();
    }
    t.map(|v| v * grid.dx)
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunSummary {
    pub steps: usize,
    pub time: f64,
    pub states: Vec<Conserved>,
    pub initial_totals: [f64; 3],
    pub final_totals: [f64; 3],
    /// Largest per-step change of each total not accounted for by boundary fluxes,
    /// relative to the sum of absolute values.
    pub max_step_drift: [f64; 3],
    pub min_rho: f64,
    /// Extreme fraction values over all cells and steps.
    pub fraction_min: f64,
    pub fraction_max: f64,
}

fn fraction_bounds(states: &[Conserved]) -> (f64, f64, f64) {
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    let mut rho = f64::INFINITY;
    for c in states {
        for v in [c.ra / c.rho, c.rf / c.rho, c.rx / c.rho] {
            lo = lo.min(v);
            hi = hi.max(v);
        }
        rho = rho.min(c.rho);
    }
    (lo, hi, rho)
}

/// Fractional-step integration to `config.t_end`.
///
/// `on_snapshot` receives the time and states at t = 0, at each multiple of the
/// snapshot interval and at the final time.
pub fn run(
    params: &EosParams,
    grid: &Grid1D,
    config: &SolverConfig,
    initial: Vec<Conserved>,
    mut on_snapshot: impl FnMut(f64, &[Conserved]) -> Result<()>,
) -> Result<RunSummary> {
    config.validate()?;
    if initial.len() != grid.n_cells {
        return Err(Error::Config(format!(
            "{} initial states for {} cells",
            initial.len(),
            grid.n_cells
        )));
    }
    let mut states = initial;
    let initial_totals = totals(grid, &states);
    let (mut fmin, mut fmax, mut min_rho) = fraction_bounds(&states);
    let mut drift = [0.0f64; 3];
    let mut t = 0.0;
    let mut steps = 0;
    let mut next_snap = config.snapshot_interval;
    on_snapshot(0.0, &states)?;

    let relax = |states: &[Conserved], dt: f64, time: f64| {
        source_step(params, states, dt, config.epsilon, time)
    };

    while t < config.t_end {
        if steps >= MAX_STEPS {
            return Err(Error::NoConvergence {
                what: "euler run",
                iterations: steps,
                residual: config.t_end - t,
                trace: Vec::new(),
            });
        }
        let cells = cell_states(params, &states, t)?;
        let mut dt = config.cfl * grid.dx / max_speed(&cells);
        let mut target = config.t_end;
        if let Some(ts) = next_snap {
            target = target.min(ts);
        }
        let mut hit_target = false;
        if t + dt >= target {
            dt = target - t;
            hit_target = true;
        }
        let before = totals(grid, &states);
        let scale_before = abs_totals(grid, &states);
        let (next, outflow) = match config.splitting {
            Splitting::Godunov => {
                let (s, out) = convect(grid, &states, &cells, dt, config.boundary);
                (relax(&s, dt, t + dt)?, out)
            }
            Splitting::Strang => {
                let s = relax(&states, 0.5 * dt, t)?;
                let c = cell_states(params, &s, t)?;
                let (s, out) = convect(grid, &s, &c, dt, config.boundary);
                (relax(&s, 0.5 * dt, t + dt)?, out)
            }
        };
        states = next;
        t = if hit_target { target } else { t + dt };
        steps += 1;

        let after = totals(grid, &states);
        let scale_after = abs_totals(grid, &states);
        for k in 0..3 {
            let scale = scale_before[k].max(scale_after[k]);
            if scale > 0.0 {
                drift[k] = drift[k].max((after[k] - before[k] - outflow[k]).abs() / scale);
            }
        }
        let (lo, hi, rho) = fraction_bounds(&states);
        fmin = fmin.min(lo);
        fmax = fmax.max(hi);
        min_rho = min_rho.min(rho);
        if !(rho > 0.0) {
            let i = states.iter().position(|c| !(c.rho > 0.0)).unwrap_or(0);
            return Err(Error::NonPositiveDensity(rho).at_cell(t, i));
        }

        if let (Some(ts), Some(iv)) = (next_snap, config.snapshot_interval) {
            if hit_target && t == ts && t < config.t_end {
                on_snapshot(t, &states)?;
                let mut nxt = ts + iv;
                // Skip a final interval shorter than a rounding error.
                if nxt >= config.t_end * (1.0 - 1e-12) {
                    nxt = f64::INFINITY;
                }
                next_snap = nxt.is_finite().then_some(nxt);
            }
        }
    }
    on_snapshot(t, &states)?;

    Ok(RunSummary {
        steps,
        time: t,
        final_totals: totals(grid, &states),
        states,
        initial_totals,
        max_step_drift: drift,
        min_rho,
        fraction_min: fmin,
        fraction_max: fmax,
    })
}
