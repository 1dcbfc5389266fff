use crate::error::{Error, Result};
use crate::mixture_eos::{energy_from_pressure, mixture_eval};
use crate::relax_dynamics::Fractions;
use crate::thermo::{EosParams, TauE};

/// Conserved variables (ρα, ρφ, ρξ, ρ, ρu, ρE).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Conserved {
    pub ra: f64,
    pub rf: f64,
    pub rx: f64,
    pub rho: f64,
    pub mom: f64,
    pub ene: f64,
}

impl Conserved {
    pub fn to_array(&self) -> [f64; 6] {
        [self.ra, self.rf, self.rx, self.rho, self.mom, self.ene]
    }

    pub fn from_array(v: [f64; 6]) -> Self {
        Self {
            ra: v[0],
            rf: v[1],
            rx: v[2],
            rho: v[3],
            mom: v[4],
            ene: v[5],
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Primitive {
    pub rho: f64,
    pub u: f64,
    pub p: f64,
    pub r: Fractions,
}

/// Everything the flux needs about one cell.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CellState {
    pub prim: Primitive,
    pub e: f64,
    pub t: f64,
    pub c2: f64,
}

impl CellState {
    pub fn mix(&self) -> TauE {
        TauE::new(1.0 / self.prim.rho, self.e)
    }

    pub fn total_energy(&self) -> f64 {
        self.e + 0.5 * self.prim.u * self.prim.u
    }
}

pub fn prim_to_cons(params: &EosParams, prim: &Primitive) -> Result<Conserved> {
    if !(prim.rho > 0.0) {
        return Err(Error::NonPositiveDensity(prim.rho));
    }
    let r = Fractions::new(prim.r.alpha, prim.r.phi, prim.r.xi)?;
    let e = energy_from_pressure(params, 1.0 / prim.rho, r, prim.p)?;
    let rho = prim.rho;
    Ok(Conserved {
        ra: rho * r.alpha,
        rf: rho * r.phi,
        rx: rho * r.xi,
        rho,
        mom: rho * prim.u,
        ene: rho * (e + 0.5 * prim.u * prim.u),
    })
}

pub fn cell_state(params: &EosParams, c: &Conserved) -> Result<CellState> {
    if !(c.rho > 0.0) || !c.rho.is_finite() {
        return Err(Error::NonPositiveDensity(c.rho));
    }
    let r = Fractions::new(c.ra / c.rho, c.rf / c.rho, c.rx / c.rho)?;
    let u = c.mom / c.rho;
    let e = c.ene / c.rho - 0.5 * u * u;
    let m = mixture_eval(params, TauE::new(1.0 / c.rho, e), r)?;
    Ok(CellState {
        prim: Primitive {
            rho: c.rho,
            u,
            p: m.p_mix,
            r,
        },
        e,
        t: m.t_mix,
        c2: m.c2,
    })
}

pub fn cons_to_prim(params: &EosParams, c: &Conserved) -> Result<Primitive> {
    Ok(cell_state(params, c)?.prim)
}
