//! Out-of-equilibrium mixture temperature, pressure and sound speed at frozen fractions.

use crate::error::{Error, Result};
use crate::relax_dynamics::{phasic_from_fractions, Fractions};
use crate::thermo::{EosParams, TauE};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MixtureEval {
    pub p_mix: f64,
    pub t_mix: f64,
    /// Squared sound speed; hyperbolicity requires it to be positive.
    pub c2: f64,
}

impl MixtureEval {
    pub fn hyperbolic(&self) -> bool {
        self.c2 > 0.0
    }
}

/// 1/T = ξ/T1 + (1 − ξ)/T2.
pub fn mixture_temperature(params: &EosParams, mix: TauE, r: Fractions) -> Result<f64> {
    let d = phasic_from_fractions(params, mix, r)?;
    let t1 = params.temperature(d.x1)?;
    let t2 = params.temperature(d.x2)?;
    Ok(1.0 / (r.xi / t1 + (1.0 - r.xi) / t2))
}

/// p/T = α p1/T1 + (1 − α) p2/T2.
pub fn mixture_pressure(params: &EosParams, mix: TauE, r: Fractions) -> Result<f64> {
    Ok(mixture_eval(params, mix, r)?.p_mix)
}

pub fn sound_speed_sq(params: &EosParams, mix: TauE, r: Fractions) -> Result<f64> {
    Ok(mixture_eval(params, mix, r)?.c2)
}

pub fn mixture_eval(params: &EosParams, mix: TauE, r: Fractions) -> Result<MixtureEval> {
    let d = phasic_from_fractions(params, mix, r)?;
    let e1 = params.eval(d.x1)?;
    let e2 = params.eval(d.x2)?;
    let inv_t = r.xi / e1.t + (1.0 - r.xi) / e2.t;
    let t = 1.0 / inv_t;
    let p_over_t = r.alpha * e1.p / e1.t + (1.0 - r.alpha) * e2.p / e2.t;
    let p = t * p_over_t;
    let h1 = params.entropy_hessian(d.x1)?;
    let h2 = params.entropy_hessian(d.x2)?;
    let v1 = [-r.alpha, r.xi * p];
    let v2 = [-(1.0 - r.alpha), (1.0 - r.xi) * p];
    let q = h1.quad(v1) / r.phi + h2.quad(v2) / (1.0 - r.phi);
    let c2 = -t * mix.tau * mix.tau * q;
    Ok(MixtureEval {
        p_mix: p,
        t_mix: t,
        c2,
    })
}

/// Specific energy giving mixture pressure `p` at fixed (τ, r), by Newton on e.
pub fn energy_from_pressure(params: &EosParams, tau: f64, r: Fractions, p: f64) -> Result<f64> {
    // Single-phase inversion as the starting point.
    let mut e =
        params.cv * (p + params.a / (tau * tau)) * (tau - params.b) / params.r - params.a / tau;
    let mut trace = Vec::new();
    let f = |e: f64| mixture_pressure(params, TauE::new(tau, e), r).map(|v| v - p);
    // The guess may put one phase below its energy floor; raising e always cures that.
    let mut fe = f(e);
    let mut lift = 1.0 + e.abs();
    for _ in 0..60 {
        if fe.is_ok() {
            break;
        }
        e += lift;
        lift *= 2.0;
        fe = f(e);
    }
    let mut fe = fe?;
    for _ in 0..100 {
        trace.push(fe.abs());
        if fe.abs() <= 1e-12 * (1.0 + p.abs()) {
            return Ok(e);
        }
        let h = 1e-7 * (1.0 + e.abs());
        let slope = (f(e + h)? - f(e - h)?) / (2.0 * h);
        if slope == 0.0 || !slope.is_finite() {
            break;
        }
        let step = -fe / slope;
        let mut lam = 1.0;
        loop {
            let cand = e + lam * step;
            if let Ok(fc) = f(cand) {
                if fc.abs() < fe.abs() {
                    e = cand;
                    fe = fc;
                    break;
                }
            }
            lam *= 0.5;
            if lam < 1e-10 {
                return Err(Error::NoConvergence {
                    what: "pressure inversion",
                    iterations: trace.len(),
                    residual: fe.abs(),
                    trace,
                });
            }
        }
    }
    Err(Error::NoConvergence {
        what: "pressure inversion",
        iterations: trace.len(),
        residual: fe.abs(),
        trace,
    })
}
