use super::state::{cell_state, CellState, Conserved};
use crate::error::{Error, Result};
use crate::thermo::EosParams;

/// Exact flux u·W + p·(0, 0, 0, 0, 1, u).
pub fn physical_flux(c: &Conserved, s: &CellState) -> [f64; 6] {
    let u = s.prim.u;
    let p = s.prim.p;
    [
        u * c.ra,
        u * c.rf,
        u * c.rx,
        u * c.rho,
        u * c.mom + p,
        u * (c.ene + p),
    ]
}

/// HLLC flux between two admissible, hyperbolic states.
pub fn hllc_flux(params: &EosParams, left: &Conserved, right: &Conserved) -> Result<[f64; 6]> {
    let sl = cell_state(params, left)?;
    let sr = cell_state(params, right)?;
    for s in [&sl, &sr] {
        if !(s.c2 > 0.0) {
            return Err(Error::NonHyperbolicState { c2: s.c2 });
        }
    }
    Ok(hllc_from_states(left, &sl, right, &sr))
}

/// Wave speed estimates (S_L, S*, S_R).
pub fn wave_speeds(sl: &CellState, sr: &CellState) -> (f64, f64, f64) {
    let (ul, ur) = (sl.prim.u, sr.prim.u);
    let (cl, cr) = (sl.c2.sqrt(), sr.c2.sqrt());
    let s_l = (ul - cl).min(ur - cr);
    let s_r = (ul + cl).max(ur + cr);
    let (rl, rr) = (sl.prim.rho, sr.prim.rho);
    let ml = rl * (s_l - ul);
    let mr = rr * (s_r - ur);
    let s_star = (sr.prim.p - sl.prim.p + ml * ul - mr * ur) / (ml - mr);
    (s_l, s_star, s_r)
}

fn star_state(c: &Conserved, s: &CellState, sk: f64, s_star: f64) -> [f64; 6] {
    let u = s.prim.u;
    let k = (sk - u) / (sk - s_star);
    let e_tot = c.ene / c.rho;
    let rho_star = c.rho * k;
    [
        c.ra * k,
        c.rf * k,
        c.rx * k,
        rho_star,
        rho_star * s_star,
        rho_star * (e_tot + (s_star - u) * (s_star + s.prim.p / (c.rho * (sk - u)))),
    ]
}

pub(crate) fn hllc_from_states(
    left: &Conserved,
    sl: &CellState,
    right: &Conserved,
    sr: &CellState,
) -> [f64; 6] {
    if left == right {
        return physical_flux(left, sl);
    }
    let (s_l, s_star, s_r) = wave_speeds(sl, sr);
    if s_l >= 0.0 {
        return physical_flux(left, sl);
    }
    if s_r <= 0.0 {
        return physical_flux(right, sr);
    }
    let (c, s, sk) = if s_star >= 0.0 {
        (left, sl, s_l)
    } else {
        (right, sr, s_r)
    };
    let f = physical_flux(c, s);
    let u = c.to_array();
    let star = star_state(c, s, sk, s_star);
    let mut out = [0.0; 6];
    for i in 0..6 {
        out[i] = f[i] + sk * (star[i] - u[i]);
    }
    out
}
