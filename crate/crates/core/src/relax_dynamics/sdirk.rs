//! Adaptive L-stable SDIRK method of order 4 with an embedded order-3 estimate
//! (γ = 1/4, five stages, stiffly accurate), for autonomous 3-dimensional systems.

use nalgebra::{Matrix3, Vector3};

use crate::error::{Error, Result};

const GAMMA: f64 = 0.25;
const STAGES: usize = 5;
const A: [[f64; STAGES]; STAGES] = [
    [0.25, 0.0, 0.0, 0.0, 0.0],
    [0.5, 0.25, 0.0, 0.0, 0.0],
    [17.0 / 50.0, -1.0 / 25.0, 0.25, 0.0, 0.0],
    [371.0 / 1360.0, -137.0 / 2720.0, 15.0 / 544.0, 0.25, 0.0],
    [25.0 / 24.0, -49.0 / 48.0, 125.0 / 16.0, -85.0 / 12.0, 0.25],
];
const B: [f64; STAGES] = A[STAGES - 1];
const B_HAT: [f64; STAGES] = [59.0 / 48.0, -17.0 / 96.0, 225.0 / 32.0, -85.0 / 12.0, 0.0];

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SdirkOptions {
    pub rtol: f64,
    pub atol: f64,
    pub h_init: f64,
    pub h_max: f64,
    pub max_steps: usize,
    /// Maximum simplified-Newton iterations per stage.
    pub newton_iters: usize,
}

impl Default for SdirkOptions {
    fn default() -> Self {
        Self {
            rtol: 1e-8,
            atol: 1e-10,
            h_init: 1e-3,
            h_max: f64::INFINITY,
            max_steps: 1_000_000,
            newton_iters: 10,
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct SdirkStats {
    pub accepted: usize,
    pub rejected: usize,
    pub domain_rejections: usize,
    pub rhs_evals: usize,
}

/// Outcome of one attempted step.
enum Attempt {
    Done {
        y: Vector3<f64>,
        err: f64,
    },
    /// Left the admissible set or the Newton iteration failed.
    Failed,
}

struct Stepper<'a, F, J, D> {
    f: &'a mut F,
    jac: &'a mut J,
    admissible: &'a D,
    opts: SdirkOptions,
    stats: SdirkStats,
}

impl<F, J, D> Stepper<'_, F, J, D>
where
    F: FnMut(&Vector3<f64>) -> Result<Vector3<f64>>,
    J: FnMut(&Vector3<f64>) -> Result<Matrix3<f64>>,
    D: Fn(&Vector3<f64>) -> bool,
{
    fn weights(&self, a: &Vector3<f64>, b: &Vector3<f64>) -> Vector3<f64> {
        Vector3::from_fn(|i, _| self.opts.atol + self.opts.rtol * a[i].abs().max(b[i].abs()))
    }

    fn eval(&mut self, y: &Vector3<f64>) -> Option<Vector3<f64>> {
        if !(self.admissible)(y) {
            return None;
        }
        self.stats.rhs_evals += 1;
        (self.f)(y).ok().filter(|v| v.iter().all(|x| x.is_finite()))
    }

    fn attempt(
        &mut self,
        y: &Vector3<f64>,
        f0: &Vector3<f64>,
        jac: &Matrix3<f64>,
        h: f64,
    ) -> Attempt {
        let m = Matrix3::identity() - jac * (h * GAMMA);
        let Some(lu) = Some(m.lu()).filter(|lu| lu.is_invertible()) else {
            return Attempt::Failed;
        };
        let w = self.weights(y, y);
        let mut k: [Vector3<f64>; STAGES] = [Vector3::zeros(); STAGES];
        for i in 0..STAGES {
            let mut base = *y;
            for j in 0..i {
                base += k[j] * (h * A[i][j]);
            }
            let mut z = base + if i == 0 { f0 } else { &k[i - 1] } * (h * GAMMA);
            let mut converged = false;
            let mut prev_norm = f64::INFINITY;
            for _ in 0..self.opts.newton_iters {
                let Some(fz) = self.eval(&z) else {
                    return Attempt::Failed;
                };
                let g = z - base - fz * (h * GAMMA);
                let Some(dz) = lu.solve(&g) else {
                    return Attempt::Failed;
                };
                z -= dz;
                let norm = dz.component_div(&w).norm() / 3f64.sqrt();
                if norm <= 1e-3 {
                    converged = true;
                    break;
                }
                if norm > 2.0 * prev_norm {
                    break;
                }
                prev_norm = norm;
            }
            if !converged {
                return Attempt::Failed;
            }
            let Some(fz) = self.eval(&z) else {
                return Attempt::Failed;
            };
            k[i] = fz;
        }
        let mut y_new = *y;
        let mut delta = Vector3::zeros();
        for i in 0..STAGES {
            y_new += k[i] * (h * B[i]);
            delta += k[i] * (h * (B[i] - B_HAT[i]));
        }
        if !(self.admissible)(&y_new) {
            return Attempt::Failed;
        }
        // Filtered estimate, bounded for stiff components.
        let est = lu.solve(&delta).unwrap_or(delta);
        let w = self.weights(y, &y_new);
        let err = est.component_div(&w).norm() / 3f64.sqrt();
        Attempt::Done { y: y_new, err }
    }
}

/// Integrates y' = f(y) from `t0` to `t1`, calling `observer(t, y)` at the start
/// and after every accepted step. Steps leaving `admissible` are rejected and halved.
#[allow(clippy::too_many_arguments)]
pub fn integrate<F, J, D, O>(
    mut f: F,
    mut jac: J,
    admissible: D,
    y0: Vector3<f64>,
    t0: f64,
    t1: f64,
    opts: SdirkOptions,
    mut observer: O,
) -> Result<SdirkStats>
where
    F: FnMut(&Vector3<f64>) -> Result<Vector3<f64>>,
    J: FnMut(&Vector3<f64>) -> Result<Matrix3<f64>>,
    D: Fn(&Vector3<f64>) -> bool,
    O: FnMut(f64, &Vector3<f64>) -> Result<()>,
{
    let mut st = Stepper {
        f: &mut f,
        jac: &mut jac,
        admissible: &admissible,
        opts,
        stats: SdirkStats::default(),
    };
    let mut t = t0;
    let mut y = y0;
    observer(t, &y)?;
    if t1 <= t0 {
        return Ok(st.stats);
    }
    let mut f0 = (st.f)(&y)?;
    st.stats.rhs_evals += 1;
    let mut j = (st.jac)(&y)?;
    let mut h = opts.h_init.min(t1 - t0).min(opts.h_max);
    let h_min = |t: f64| 1e-14 * t.abs().max(1.0);

    while t < t1 {
        if st.stats.accepted + st.stats.rejected >= opts.max_steps {
            return Err(Error::NoConvergence {
                what: "relaxation integration",
                iterations: opts.max_steps,
                residual: t1 - t,
                trace: Vec::new(),
            });
        }
        let last = t + h >= t1;
        let h_try = if last { t1 - t } else { h };
        match st.attempt(&y, &f0, &j, h_try) {
            Attempt::Done { y: y_new, err } if err <= 1.0 => {
                t = if last { t1 } else { t + h_try };
                y = y_new;
                st.stats.accepted += 1;
                observer(t, &y)?;
                if t >= t1 {
                    break;
                }
                f0 = (st.f)(&y)?;
                st.stats.rhs_evals += 1;
                j = (st.jac)(&y)?;
                let fac = if err == 0.0 {
                    5.0
                } else {
                    (0.9 * err.powf(-0.25)).clamp(0.2, 5.0)
                };
                h = (h_try * fac).min(opts.h_max);
            }
            Attempt::Done { err, .. } => {
                st.stats.rejected += 1;
                h = h_try * (0.9 * err.powf(-0.25)).clamp(0.2, 0.9);
            }
            Attempt::Failed => {
                st.stats.rejected += 1;
                st.stats.domain_rejections += 1;
                h = 0.5 * h_try;
            }
        }
        if h < h_min(t) {
            return Err(Error::StepSizeUnderflow { t, h });
        }
    }
    Ok(st.stats)
}
