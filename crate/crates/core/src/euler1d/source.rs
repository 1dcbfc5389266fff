use rayon::prelude::*;

use super::state::Conserved;
use crate::error::{Error, Result};
use crate::relax_dynamics::{rhs, Fractions};
use crate::thermo::{EosParams, TauE};

/// Fractions are kept in [δ, 1 − δ] during relaxation.
pub const FRACTION_CLAMP: f64 = 1e-12;
const RETRIES: u32 = 4;

/// Relaxes the fractions of every cell over `dt` at frozen ρ, ρu, ρE.
pub fn source_step(
    params: &EosParams,
    states: &[Conserved],
    dt: f64,
    epsilon: f64,
    time: f64,
) -> Result<Vec<Conserved>> {
    states
        .par_iter()
        .enumerate()
        .map(|(i, c)| relax_cell(params, c, dt, epsilon).map_err(|e| e.at_cell(time, i)))
        .collect()
}

/// Classical RK4 on dr/dt = F(r)/ε with internal steps no larger than ε/10.
pub fn relax_cell(params: &EosParams, c: &Conserved, dt: f64, epsilon: f64) -> Result<Conserved> {
    if !(epsilon > 0.0) {
        return Err(Error::Config(format!(
            "epsilon must be positive, got {epsilon}"
        )));
    }
    if !epsilon.is_finite() || dt == 0.0 {
        return Ok(*c);
    }
    let r0 = Fractions::new(c.ra / c.rho, c.rf / c.rho, c.rx / c.rho)?;
    if r0.alpha == r0.phi && r0.phi == r0.xi {
        return Ok(*c);
    }
    let u = c.mom / c.rho;
    let mix = TauE::new(1.0 / c.rho, c.ene / c.rho - 0.5 * u * u);
    let base = (dt / (0.1 * epsilon)).ceil().max(1.0) as usize;
    let mut last = None;
    for k in 0..RETRIES {
        let n = base << (2 * k);
        match rk4(params, mix, r0, dt / epsilon, n) {
            Ok(r) => {
                return Ok(Conserved {
                    ra: c.rho * r.alpha,
                    rf: c.rho * r.phi,
                    rx: c.rho * r.xi,
                    ..*c
                })
            }
            Err(e @ Error::PhasicOutOfDomain { .. }) => last = Some(e),
            Err(e) => return Err(e),
        }
    }
    Err(last.expect("at least one attempt"))
}

/// `n` RK4 steps over the scaled interval `s_total` = dt/ε.
fn rk4(params: &EosParams, mix: TauE, r0: Fractions, s_total: f64, n: usize) -> Result<Fractions> {
    let h = s_total / n as f64;
    let f = |r: [f64; 3]| {
        rhs(
            params,
            mix,
            Fractions::from_array(r).clamped(FRACTION_CLAMP),
        )
    };
    let add =
        |r: [f64; 3], k: [f64; 3], w: f64| [r[0] + w * k[0], r[1] + w * k[1], r[2] + w * k[2]];
    let mut r = r0.as_array();
    for _ in 0..n {
        let k1 = f(r)?;
        let k2 = f(add(r, k1, 0.5 * h))?;
        let k3 = f(add(r, k2, 0.5 * h))?;
        let k4 = f(add(r, k3, h))?;
        for i in 0..3 {
            r[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
        }
        r = Fractions::from_array(r).clamped(FRACTION_CLAMP).as_array();
    }
    Ok(Fractions::from_array(r))
}
