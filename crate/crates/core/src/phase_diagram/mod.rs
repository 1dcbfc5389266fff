//! Spinodal curve, saturation dome, zone classification and the tangent-state
//! systems of the entropy maximization problem.

mod dome;
mod saturation;
mod tangent;

pub use dome::{DomeTable, DEFAULT_DOME_SAMPLES, DOME_T_MIN};
pub use saturation::{
    pressure_extrema, saturation_at_temperature, saturation_from_guess, SaturationPair,
    SAT_MAX_ITER, SAT_TOL,
};
pub use tangent::{tangent_state, tangent_states, Side};

use crate::error::{Error, Result};
use crate::relax_dynamics::Fractions;
use crate::thermo::{EosParams, TauE};

/// g(τ): the energy below which (τ, e) lies in the spinodal zone.
pub fn spinodal_energy(params: &EosParams, tau: f64) -> Result<f64> {
    if !(tau - params.b > crate::thermo::DOMAIN_MARGIN) {
        return Err(Error::Domain { tau, e: f64::NAN });
    }
    let d = tau - params.b;
    Ok(2.0 * params.a * params.cv * d * d / (params.r * tau * tau * tau) - params.a / tau)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Zone {
    Spinodal,
    MetastableLiquid,
    MetastableVapor,
    StableLiquid,
    StableVapor,
    Supercritical,
}

impl Zone {
    pub fn name(&self) -> &'static str {
        match self {
            Zone::Spinodal => "Spinodal",
            Zone::MetastableLiquid => "MetastableLiquid",
            Zone::MetastableVapor => "MetastableVapor",
            Zone::StableLiquid => "StableLiquid",
            Zone::StableVapor => "StableVapor",
            Zone::Supercritical => "Supercritical",
        }
    }

    pub fn is_under_dome(&self) -> bool {
        matches!(
            self,
            Zone::Spinodal | Zone::MetastableLiquid | Zone::MetastableVapor
        )
    }

    /// Rank in the ordering met when increasing e at fixed τ.
    pub fn order(&self) -> u8 {
        match self {
            Zone::Spinodal => 0,
            Zone::MetastableLiquid | Zone::MetastableVapor => 1,
            Zone::StableLiquid | Zone::StableVapor => 2,
            Zone::Supercritical => 3,
        }
    }
}

impl std::fmt::Display for Zone {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

pub fn classify(params: &EosParams, dome: &DomeTable, x: TauE) -> Result<Zone> {
    let t = params.temperature(x)?;
    let g = spinodal_energy(params, x.tau)?;
    let crit = params.critical_point();
    if x.e <= g {
        return Ok(Zone::Spinodal);
    }
    if t >= crit.t {
        return Ok(Zone::Supercritical);
    }
    let liquid = x.tau < crit.tau;
    if let Some(gs) = dome.g_star(x.tau) {
        if x.e <= gs {
            return Ok(if liquid {
                Zone::MetastableLiquid
            } else {
                Zone::MetastableVapor
            });
        }
    }
    // Below Tc and outside the dome, τ < τl(T) < τc or τ > τv(T) > τc.
    Ok(if liquid {
        Zone::StableLiquid
    } else {
        Zone::StableVapor
    })
}

/// Equilibrium fractions of a state under the dome.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EquilibriumFractions {
    /// Fractions with phase 1 the vapor branch.
    pub r_star: Fractions,
    /// Fractions with phase 1 the liquid branch.
    pub complement: Fractions,
    pub pair: SaturationPair,
}

/// Lever-rule mismatch at temperature t: vapor mass fraction from τ minus the one from e.
fn lever(pair: &SaturationPair, x: TauE) -> (f64, f64) {
    let phi_tau = (x.tau - pair.liquid.tau) / (pair.vapor.tau - pair.liquid.tau);
    let phi_e = (x.e - pair.liquid.e) / (pair.vapor.e - pair.liquid.e);
    (phi_tau - phi_e, phi_tau)
}

pub fn equilibrium_fractions(
    params: &EosParams,
    dome: &DomeTable,
    x: TauE,
) -> Result<EquilibriumFractions> {
    params.temperature(x)?;
    let not_under = Error::NotUnderDome { tau: x.tau, e: x.e };
    // Scan rows from the critical point downward, then extend below the table.
    let mut temps: Vec<f64> = dome
        .rows()
        .iter()
        .rev()
        .filter(|r| r.vapor.tau > r.liquid.tau)
        .map(|r| r.t_star)
        .collect();
    let t_low = temps.last().copied().unwrap_or(DOME_T_MIN);
    for k in 1..=40 {
        temps.push(t_low * (1.0 - k as f64 / 41.0));
    }

    let h = |t: f64| -> Option<(f64, f64)> {
        let pair = dome.pair_at(params, t).ok()?;
        Some(lever(&pair, x))
    };

    let mut prev: Option<(f64, f64, f64)> = None;
    for &t in &temps {
        let Some((ht, phi)) = h(t) else { continue };
        if ht == 0.0 && (-1e-12..=1.0 + 1e-12).contains(&phi) {
            return finish(params, dome, x, t);
        }
        if let Some((tp, hp, phip)) = prev {
            if hp * ht < 0.0
                && (phi >= -1e-9 || phip >= -1e-9)
                && (phi <= 1.0 + 1e-9 || phip <= 1.0 + 1e-9)
            {
                let root = crate::numerics::brent(
                    |tt| h(tt).map(|v| v.0).unwrap_or(f64::NAN),
                    t.min(tp),
                    t.max(tp),
                    1e-15,
                );
                if let Some(ts) = root {
                    let out = finish(params, dome, x, ts)?;
                    let phi = out.r_star.phi;
                    if (-1e-9..=1.0 + 1e-9).contains(&phi) {
                        return Ok(out);
                    }
                }
            }
        }
        prev = Some((t, ht, phi));
    }
    Err(not_under)
}

fn finish(params: &EosParams, dome: &DomeTable, x: TauE, t: f64) -> Result<EquilibriumFractions> {
    let pair = dome.pair_at(params, t)?;
    let (_, phi) = lever(&pair, x);
    let phi = phi.clamp(0.0, 1.0);
    let alpha = phi * pair.vapor.tau / x.tau;
    let xi = phi * pair.vapor.e / x.e;
    let r_star = Fractions::unchecked(alpha, phi, xi);
    Ok(EquilibriumFractions {
        r_star,
        complement: r_star.complement(),
        pair,
    })
}

/// Concave hull of the entropy: the tie-line interpolation under the dome, s elsewhere.
pub fn concave_hull_entropy(params: &EosParams, dome: &DomeTable, x: TauE) -> Result<f64> {
    let s = params.entropy(x)?;
    if !classify(params, dome, x)?.is_under_dome() {
        return Ok(s);
    }
    match equilibrium_fractions(params, dome, x) {
        Ok(eq) => {
            let phi = eq.r_star.phi;
            let hull = phi * params.entropy(eq.pair.vapor)?
                + (1.0 - phi) * params.entropy(eq.pair.liquid)?;
            Ok(hull.max(s))
        }
        Err(Error::NotUnderDome { .. }) => Ok(s),
        Err(e) => Err(e),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::sync::OnceLock;

    const P: EosParams = EosParams::REDUCED;

    pub(crate) fn dome() -> &'static DomeTable {
        static D: OnceLock<DomeTable> = OnceLock::new();
        D.get_or_init(|| DomeTable::build(&P, DEFAULT_DOME_SAMPLES).unwrap())
    }

    #[test]
    fn spinodal_values() {
        let c = P.critical_point();
        assert!((spinodal_energy(&P, 1.5).unwrap() - c.e).abs() < 1e-12);
        assert!((spinodal_energy(&P, 2.0).unwrap() - 2.875).abs() < 1e-12);
        for k in 0..100 {
            let tau = 0.52 + 0.2 * k as f64;
            let g = spinodal_energy(&P, tau).unwrap();
            if P.a / tau + g <= 0.0 {
                continue;
            }
            let h = P.entropy_hessian(TauE::new(tau, g)).unwrap();
            let scale = h.s_tt.abs().max(h.s_te.abs()).max(h.s_ee.abs()).powi(2);
            assert!(h.det().abs() <= 1e-8 * scale.max(1.0), "tau={tau}");
        }
    }

    #[test]
    fn det_changes_sign_across_spinodal() {
        for k in 1..60 {
            let tau = 0.55 + 0.1 * k as f64;
            let g = spinodal_energy(&P, tau).unwrap();
            let de = 1e-6 * (1.0 + g.abs());
            if P.a / tau + g - de <= 0.0 {
                continue;
            }
            let below = P.entropy_hessian(TauE::new(tau, g - de)).unwrap().det();
            let above = P.entropy_hessian(TauE::new(tau, g + de)).unwrap().det();
            assert!(below < 0.0 && above > 0.0, "tau={tau}");
        }
    }

    #[test]
    fn paper_zones() {
        let d = dome();
        assert_eq!(
            classify(&P, d, TauE::new(2.0, 2.5)).unwrap(),
            Zone::Spinodal
        );
        assert_eq!(
            classify(&P, d, TauE::new(3.2, 2.5)).unwrap(),
            Zone::MetastableVapor
        );
        assert_eq!(
            classify(&P, d, TauE::new(0.8, 2.1)).unwrap(),
            Zone::StableLiquid
        );
        assert_eq!(
            classify(&P, d, TauE::new(3.0, 3.1)).unwrap(),
            Zone::StableVapor
        );
        assert_eq!(
            classify(&P, d, TauE::new(2.0, 4.0)).unwrap(),
            Zone::Supercritical
        );
    }

    #[test]
    fn boundary_ties() {
        let d = dome();
        let g = spinodal_energy(&P, 2.0).unwrap();
        assert_eq!(classify(&P, d, TauE::new(2.0, g)).unwrap(), Zone::Spinodal);
        let gs = d.g_star(2.0).unwrap();
        assert_eq!(
            classify(&P, d, TauE::new(2.0, gs)).unwrap(),
            Zone::MetastableVapor
        );
    }

    #[test]
    fn zones_are_ordered_along_verticals() {
        let d = dome();
        for k in 0..30 {
            let tau = 0.6 + 0.25 * k as f64;
            let mut last = 0;
            for j in 0..200 {
                let e = -P.a / tau + 0.01 + 0.025 * j as f64;
                let z = classify(&P, d, TauE::new(tau, e)).unwrap().order();
                assert!(z >= last, "tau={tau} e={e}");
                last = z;
            }
        }
    }

    #[test]
    fn table_row_fractions() {
        let eq = equilibrium_fractions(&P, dome(), TauE::new(1.99, 2.1)).unwrap();
        let r = eq.r_star;
        // The published row is rounded to two digits.
        assert!((r.alpha - 0.71).abs() < 1e-2, "{r:?}");
        assert!((r.phi - 0.29).abs() < 1e-2);
        assert!((r.xi - 0.39).abs() < 1e-2);
        assert!((eq.pair.vapor.tau - 4.76).abs() < 0.01);
        assert!((eq.pair.liquid.tau - 0.82).abs() < 0.01);
    }

    #[test]
    fn spinodal_state_fractions() {
        let eq = equilibrium_fractions(&P, dome(), TauE::new(2.0, 2.5)).unwrap();
        let c = eq.complement;
        assert!((c.alpha - 0.255).abs() < 0.01, "{c:?}");
        assert!((c.phi - 0.55).abs() < 0.01);
        assert!((c.xi - 0.47).abs() < 0.01);
        assert!((eq.pair.t_star - 1.077).abs() < 2e-3);
    }

    #[test]
    fn dome_endpoint_gives_pure_phase() {
        let s = saturation_at_temperature(&P, 1.0).unwrap();
        let eq = equilibrium_fractions(&P, dome(), s.vapor).unwrap();
        assert!((eq.r_star.phi - 1.0).abs() < 1e-6);
        let eq = equilibrium_fractions(&P, dome(), s.liquid).unwrap();
        assert!(eq.r_star.phi.abs() < 1e-6);
    }

    #[test]
    fn outside_dome_is_rejected() {
        assert!(matches!(
            equilibrium_fractions(&P, dome(), TauE::new(0.8, 2.1)),
            Err(Error::NotUnderDome { .. })
        ));
    }

    #[test]
    fn hull_entropy() {
        let d = dome();
        let x = TauE::new(0.8, 2.1);
        assert_eq!(
            concave_hull_entropy(&P, d, x).unwrap(),
            P.entropy(x).unwrap()
        );
        let x = TauE::new(2.0, 2.5);
        assert!(concave_hull_entropy(&P, d, x).unwrap() > P.entropy(x).unwrap());
        // Continuity across the vapor branch of the dome.
        let s = saturation_at_temperature(&P, 1.05).unwrap();
        for de in [1e-7, -1e-7] {
            let y = TauE::new(s.vapor.tau, s.vapor.e + de);
            let h = concave_hull_entropy(&P, d, y).unwrap();
            assert!((h - P.entropy(s.vapor).unwrap()).abs() < 1e-6);
        }
    }
}
