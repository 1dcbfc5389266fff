//! Liquid-vapor coexistence at a given temperature.

use crate::error::{Error, Result};
use crate::numerics::brent;
use crate::thermo::{EosParams, TauE};

pub const SAT_MAX_ITER: usize = 100;
pub const SAT_TOL: f64 = 1e-10;

/// Two coexisting states with equal pressure, temperature and chemical potential.
///
/// The vapor state is branch 1 and the liquid state is branch 2.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SaturationPair {
    pub vapor: TauE,
    pub liquid: TauE,
    pub p_star: f64,
    pub t_star: f64,
    pub mu_star: f64,
}

impl SaturationPair {
    pub fn x1(&self) -> TauE {
        self.vapor
    }

    pub fn x2(&self) -> TauE {
        self.liquid
    }

    /// Degenerate pair at the critical point.
    pub fn critical(params: &EosParams) -> Self {
        let c = params.critical_point();
        let x = TauE::new(c.tau, c.e);
        let mu = params
            .chemical_potential(x)
            .expect("critical point lies in the domain");
        Self {
            vapor: x,
            liquid: x,
            p_star: c.p,
            t_star: c.t,
            mu_star: mu,
        }
    }
}

/// Local extrema τ− < τc < τ+ of p(·, T) for T below the critical temperature.
pub fn pressure_extrema(params: &EosParams, t: f64) -> Option<(f64, f64)> {
    let tau_c = 3.0 * params.b;
    let slope = |tau: f64| {
        let d = tau - params.b;
        -params.r * t / (d * d) + 2.0 * params.a / (tau * tau * tau)
    };
    let lo = params.b * (1.0 + 1e-12);
    let hi = params.b + 4.0 * params.a / (params.r * t);
    let tm = brent(slope, lo, tau_c, 1e-15)?;
    let tp = brent(slope, tau_c, hi, 1e-15)?;
    Some((tm, tp))
}

fn check_temperature(params: &EosParams, t: f64) -> Result<f64> {
    let tc = params.critical_point().t;
    if !(t > 0.0 && t < tc) {
        return Err(Error::InvalidTemperature {
            temperature: t,
            critical: tc,
        });
    }
    Ok(tc)
}

/// Equal-area bracketing: bisects on the pressure between the isotherm extrema.
fn bracket_guess(params: &EosParams, t: f64) -> Option<(f64, f64)> {
    let (tm, tp) = pressure_extrema(params, t)?;
    let p = |tau: f64| params.r * t / (tau - params.b) - params.a / (tau * tau);
    let pmax = p(tp);
    let pmin = p(tm).max(pmax * 1e-14);
    if !(pmin < pmax) {
        return Some((tm, tp));
    }
    let roots = |pp: f64| -> Option<(f64, f64)> {
        let tl = brent(|tau| p(tau) - pp, params.b * (1.0 + 1e-14), tm, 1e-15)?;
        let tv = brent(
            |tau| p(tau) - pp,
            tp,
            params.b + 2.0 * params.r * t / pp + 1.0,
            1e-13,
        )?;
        Some((tl, tv))
    };
    let area = |pp: f64| -> f64 {
        match roots(pp) {
            Some((tl, tv)) => {
                params.r * t * ((tv - params.b).ln() - (tl - params.b).ln()) + params.a / tv
                    - params.a / tl
                    - pp * (tv - tl)
            }
            None => f64::NAN,
        }
    };
    let pstar = brent(area, pmin, pmax * (1.0 - 1e-15), 1e-16 * pmax.max(1e-300))?;
    roots(pstar)
}

/// Residual of the coexistence system at fixed T: (p1 − p2, μ1 − μ2).
fn residual(
    params: &EosParams,
    t: f64,
    tl: f64,
    tv: f64,
) -> Result<([f64; 2], [f64; 2], [f64; 2])> {
    let xl = TauE::new(tl, params.isotherm_energy(tl, t)?);
    let xv = TauE::new(tv, params.isotherm_energy(tv, t)?);
    let el = params.eval(xl)?;
    let ev = params.eval(xv)?;
    Ok(([el.p - ev.p, el.mu - ev.mu], [el.p, ev.p], [el.mu, ev.mu]))
}

fn newton(params: &EosParams, t: f64, mut tl: f64, mut tv: f64) -> Result<(f64, f64)> {
    let mut trace = Vec::new();
    let (mut f, _, _) = residual(params, t, tl, tv)?;
    let mut norm = f[0].abs().max(f[1].abs());
    trace.push(norm);
    for _ in 0..SAT_MAX_ITER {
        if norm <= SAT_TOL {
            return Ok((tl, tv));
        }
        // Along an isotherm dμ = τ dp.
        let dl = params.isotherm_pressure_slope(tl, t)?;
        let dv = params.isotherm_pressure_slope(tv, t)?;
        let det = dl * dv * (tv - tl);
        if det == 0.0 || !det.is_finite() {
            break;
        }
        // [[dl, -dv], [tl dl, -tv dv]] (δl, δv) = -f
        let dtl = (-f[0] * (-tv * dv) + dv * (-f[1])) / (dl * (-tv * dv) + dv * tl * dl);
        let dtv = (dl * (-f[1]) - tl * dl * (-f[0])) / (dl * (-tv * dv) + dv * tl * dl);
        let mut lam = 1.0;
        let mut accepted = false;
        while lam > 1e-10 {
            let (nl, nv) = (tl + lam * dtl, tv + lam * dtv);
            if let Ok((fnew, _, _)) = residual(params, t, nl, nv) {
                let nn = fnew[0].abs().max(fnew[1].abs());
                if nn < norm || nn <= SAT_TOL {
                    tl = nl;
                    tv = nv;
                    f = fnew;
                    norm = nn;
                    accepted = true;
                    break;
                }
            }
            lam *= 0.5;
        }
        trace.push(norm);
        if !accepted {
            break;
        }
    }
    if norm <= SAT_TOL {
        return Ok((tl, tv));
    }
    Err(Error::NoConvergence {
        what: "saturation solve",
        iterations: trace.len() - 1,
        residual: norm,
        trace,
    })
}

fn assemble(params: &EosParams, t: f64, tl: f64, tv: f64) -> Result<SaturationPair> {
    let liquid = TauE::new(tl, params.isotherm_energy(tl, t)?);
    let vapor = TauE::new(tv, params.isotherm_energy(tv, t)?);
    let el = params.eval(liquid)?;
    let ev = params.eval(vapor)?;
    Ok(SaturationPair {
        vapor,
        liquid,
        p_star: 0.5 * (el.p + ev.p),
        t_star: t,
        mu_star: 0.5 * (el.mu + ev.mu),
    })
}

/// Solves p(τl, T) = p(τv, T), μ(τl, T) = μ(τv, T) with τl < τc < τv.
pub fn saturation_at_temperature(params: &EosParams, t: f64) -> Result<SaturationPair> {
    check_temperature(params, t)?;
    let (tl, tv) = bracket_guess(params, t).ok_or(Error::NoConvergence {
        what: "saturation bracketing",
        iterations: 0,
        residual: f64::NAN,
        trace: Vec::new(),
    })?;
    let (tl, tv) = newton(params, t, tl, tv)?;
    assemble(params, t, tl, tv)
}

/// Newton from a nearby pair (continuation), falling back to the bracketed solve.
pub fn saturation_from_guess(
    params: &EosParams,
    t: f64,
    guess: &SaturationPair,
) -> Result<SaturationPair> {
    let tc = check_temperature(params, t)?;
    let tau_c = 3.0 * params.b;
    if guess.liquid.tau < tau_c && guess.vapor.tau > tau_c && guess.t_star < tc {
        if let Ok((tl, tv)) = newton(params, t, guess.liquid.tau, guess.vapor.tau) {
            if tl < tau_c && tv > tau_c && (tv - tl) > 1e-8 {
                return assemble(params, t, tl, tv);
            }
        }
    }
    saturation_at_temperature(params, t)
}
