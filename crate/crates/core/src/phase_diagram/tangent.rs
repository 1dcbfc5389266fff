//! Tangent states: y ≠ x with s(y|x) = 0 and μ/T(y) = μ/T(x).

use crate::error::{Error, Result};
use crate::numerics::brent;
use crate::thermo::{EosParams, TauE};

/// Which side of the reference state (in τ) to search.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    /// Smaller specific volume.
    Liquid,
    /// Larger specific volume.
    Vapor,
}

const SCAN_POINTS: usize = 4000;
const ACCEPT_TOL: f64 = 1e-9;

fn mu_over_t(params: &EosParams, y: TauE) -> Result<f64> {
    let ev = params.eval(y)?;
    Ok(ev.mu / ev.t)
}

struct System<'a> {
    params: &'a EosParams,
    x: TauE,
    grad_x: [f64; 2],
    m_x: f64,
}

impl System<'_> {
    fn residual(&self, y: TauE) -> Result<[f64; 2]> {
        Ok([
            self.params.relative_entropy(y, self.x)?,
            mu_over_t(self.params, y)? - self.m_x,
        ])
    }

    fn jacobian(&self, y: TauE) -> Result<[[f64; 2]; 2]> {
        let g = self.params.entropy_gradient(y)?;
        let h = self.params.entropy_hessian(y)?;
        Ok([
            [g[0] - self.grad_x[0], g[1] - self.grad_x[1]],
            [y.tau * h.s_tt + y.e * h.s_te, y.tau * h.s_te + y.e * h.s_ee],
        ])
    }

    fn scale(&self) -> f64 {
        1.0 + self.m_x.abs()
    }

    fn converged(&self, y: TauE) -> bool {
        match self.residual(y) {
            Ok(r) => r[0].abs().max(r[1].abs()) <= ACCEPT_TOL * self.scale(),
            Err(_) => false,
        }
    }

    /// Damped Newton polish.
    fn polish(&self, mut y: TauE) -> Result<TauE> {
        let mut trace = Vec::new();
        let mut r = self.residual(y)?;
        let mut norm = r[0].abs().max(r[1].abs());
        trace.push(norm);
        for _ in 0..50 {
            if norm <= 1e-13 * self.scale() {
                break;
            }
            let j = self.jacobian(y)?;
            let det = j[0][0] * j[1][1] - j[0][1] * j[1][0];
            if det == 0.0 || !det.is_finite() {
                break;
            }
            let dt = (-r[0] * j[1][1] + r[1] * j[0][1]) / det;
            let de = (-r[1] * j[0][0] + r[0] * j[1][0]) / det;
            let mut lam = 1.0;
            let mut moved = false;
            while lam > 1e-8 {
                let cand = TauE::new(y.tau + lam * dt, y.e + lam * de);
                if let Ok(rc) = self.residual(cand) {
                    let nc = rc[0].abs().max(rc[1].abs());
                    if nc < norm {
                        y = cand;
                        r = rc;
                        norm = nc;
                        moved = true;
                        break;
                    }
                }
                lam *= 0.5;
            }
            trace.push(norm);
            if !moved {
                break;
            }
        }
        if norm <= ACCEPT_TOL * self.scale() {
            Ok(y)
        } else {
            Err(Error::NoConvergence {
                what: "tangent state",
                iterations: trace.len() - 1,
                residual: norm,
                trace,
            })
        }
    }

    /// Roots in e of s((τ, ·)|x) at fixed τ, below and above the crest T(y) = T(x).
    fn energy_roots(&self, tau: f64) -> Option<(f64, f64)> {
        let p = self.params;
        let t_x = 1.0 / self.grad_x[1];
        let crest = p.cv * t_x - p.a / tau;
        let rel = |e: f64| {
            p.relative_entropy(TauE::new(tau, e), self.x)
                .unwrap_or(f64::NEG_INFINITY)
        };
        if !(rel(crest) > 0.0) {
            return None;
        }
        let floor = -p.a / tau;
        let lo_end = floor + 1e-10 * (1.0 + crest - floor);
        let lo = brent(rel, lo_end, crest, 1e-14 * (1.0 + crest.abs()))?;
        let mut width = 1.0 + crest - floor;
        let mut hi_end = crest + width;
        while rel(hi_end) > 0.0 {
            width *= 2.0;
            hi_end = crest + width;
            if width > 1e12 {
                return None;
            }
        }
        let hi = brent(rel, crest, hi_end, 1e-14 * (1.0 + crest.abs()))?;
        Some((lo, hi))
    }

    fn is_reference(&self, y: TauE) -> bool {
        (y.tau - self.x.tau).abs() <= 1e-6 * self.x.tau
            && (y.e - self.x.e).abs() <= 1e-6 * (1.0 + self.x.e.abs())
    }
}

fn on_side(side: Side, x: TauE, tau: f64) -> bool {
    match side {
        Side::Liquid => tau < x.tau,
        Side::Vapor => tau > x.tau,
    }
}

/// All tangent states on one side of `x`, ordered from farthest to nearest in τ.
pub fn tangent_states(params: &EosParams, x: TauE, side: Side) -> Result<Vec<TauE>> {
    let ev = params.eval(x)?;
    let sys = System {
        params,
        x,
        grad_x: [ev.p / ev.t, 1.0 / ev.t],
        m_x: ev.mu / ev.t,
    };
    let mut found: Vec<TauE> = Vec::new();
    let push = |y: TauE, found: &mut Vec<TauE>| {
        if sys.is_reference(y) || !on_side(side, x, y.tau) {
            return;
        }
        if found
            .iter()
            .all(|z| (z.tau - y.tau).abs() > 1e-7 * y.tau.max(z.tau))
        {
            found.push(y);
        }
    };

    let b = params.b;
    let (u_lo, u_hi) = match side {
        Side::Liquid => ((b * 1e-9).ln(), ((x.tau - b) * (1.0 - 1e-6)).ln()),
        Side::Vapor => (
            ((x.tau - b) * (1.0 + 1e-6)).ln(),
            (1e4f64.max(100.0 * x.tau)).ln(),
        ),
    };
    let tau_at = |k: usize| b + (u_lo + (u_hi - u_lo) * k as f64 / (SCAN_POINTS - 1) as f64).exp();

    // Isotherm/isobar intersections: the tangential roots shared with the dome.
    let iso = |tau: f64| {
        params
            .isotherm_pressure(tau, ev.t)
            .map(|p| p - ev.p)
            .unwrap_or(f64::NAN)
    };
    let mut prev = (tau_at(0), iso(tau_at(0)));
    for k in 1..SCAN_POINTS {
        let tau = tau_at(k);
        let f = iso(tau);
        if prev.1 * f < 0.0 {
            if let Some(tr) = brent(iso, prev.0, tau, 1e-15 * tau) {
                if let Ok(e) = params.isotherm_energy(tr, ev.t) {
                    let y = TauE::new(tr, e);
                    if sys.converged(y) {
                        push(y, &mut found);
                    }
                }
            }
        }
        prev = (tau, f);
    }

    // Transversal roots along the two branches of s(·|x) = 0.
    for branch in 0..2 {
        let point = |tau: f64| -> Option<(TauE, f64)> {
            let (lo, hi) = sys.energy_roots(tau)?;
            let y = TauE::new(tau, if branch == 0 { lo } else { hi });
            let m = mu_over_t(params, y).ok()? - sys.m_x;
            Some((y, m))
        };
        let mut last: Option<(f64, f64)> = None;
        for k in 0..SCAN_POINTS {
            let tau = tau_at(k);
            match point(tau) {
                Some((_, m)) => {
                    if let Some((tp, mp)) = last {
                        if mp * m < 0.0 {
                            let g = |t: f64| point(t).map(|v| v.1).unwrap_or(f64::NAN);
                            if let Some(tr) = brent(g, tp, tau, 1e-15 * tau) {
                                if let Some((y, _)) = point(tr) {
                                    if let Ok(y) = sys.polish(y) {
                                        push(y, &mut found);
                                    }
                                }
                            }
                        }
                    }
                    last = Some((tau, m));
                }
                None => last = None,
            }
        }
    }

    found.sort_by(|a, b| (b.tau - x.tau).abs().total_cmp(&(a.tau - x.tau).abs()));
    Ok(found)
}

/// The tangent state farthest from `x` on the requested side.
pub fn tangent_state(params: &EosParams, x: TauE, side: Side) -> Result<TauE> {
    tangent_states(params, x, side)?
        .into_iter()
        .next()
        .ok_or(Error::NoDistinctRoot)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::phase_diagram::saturation_at_temperature;

    const P: EosParams = EosParams::REDUCED;

    fn check_root(x: TauE, y: TauE) {
        let r = P.relative_entropy(y, x).unwrap();
        let m = mu_over_t(&P, y).unwrap() - mu_over_t(&P, x).unwrap();
        assert!(r.abs() < 1e-9 && m.abs() < 1e-9, "{y:?}: {r:e} {m:e}");
    }

    #[test]
    fn dome_partner_and_involution() {
        let s = saturation_at_temperature(&P, 1.0).unwrap();
        let y = tangent_state(&P, s.liquid, Side::Vapor).unwrap();
        assert!(
            (y.tau - s.vapor.tau).abs() < 1e-7 * s.vapor.tau,
            "{y:?} {s:?}"
        );
        let z = tangent_state(&P, y, Side::Liquid).unwrap();
        assert!((z.tau - s.liquid.tau).abs() < 1e-7);
        assert!((z.e - s.liquid.e).abs() < 1e-7);
    }

    #[test]
    fn metastable_state_has_liquid_side_roots() {
        let x = TauE::new(3.2, 2.5);
        let ys = tangent_states(&P, x, Side::Liquid).unwrap();
        assert!(!ys.is_empty());
        for y in &ys {
            check_root(x, *y);
        }
    }

    #[test]
    fn spinodal_state_has_roots() {
        let x = TauE::new(2.0, 2.5);
        let y = tangent_state(&P, x, Side::Vapor).unwrap();
        check_root(x, y);
    }

    #[test]
    fn stable_and_supercritical_have_none() {
        assert_eq!(
            tangent_state(&P, TauE::new(0.8, 2.1), Side::Vapor),
            Err(Error::NoDistinctRoot)
        );
        assert_eq!(
            tangent_state(&P, TauE::new(2.0, 4.5), Side::Vapor),
            Err(Error::NoDistinctRoot)
        );
    }
}
