use nalgebra::Complex;

use super::{eigenvalues, jacobian, phasic_from_fractions, rhs, Fractions, Trajectory};
use crate::error::Result;
use crate::thermo::EosParams;

/// Identification tolerance on fraction differences.
pub const TOL_ID: f64 = 1e-4;
/// Relative tolerance on the phasic pressure, temperature and chemical potential gaps.
pub const TOL_SAT: f64 = 1e-5;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EquilibriumKind {
    Saturation,
    Identification,
    NotConverged,
}

impl EquilibriumKind {
    pub fn name(&self) -> &'static str {
        match self {
            EquilibriumKind::Saturation => "Saturation",
            EquilibriumKind::Identification => "Identification",
            EquilibriumKind::NotConverged => "NotConverged",
        }
    }
}

impl std::fmt::Display for EquilibriumKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

/// Phasic values and their relative gaps |q1 − q2| / max(|q1|, |q2|).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhasicGaps {
    pub p: [f64; 2],
    pub t: [f64; 2],
    pub mu: [f64; 2],
    pub rel_p: f64,
    pub rel_t: f64,
    pub rel_mu: f64,
}

impl PhasicGaps {
    pub fn max_rel(&self) -> f64 {
        self.rel_p.max(self.rel_t).max(self.rel_mu)
    }
}

fn rel_gap(a: f64, b: f64) -> f64 {
    let m = a.abs().max(b.abs());
    if m == 0.0 {
        0.0
    } else {
        (a - b).abs() / m
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EquilibriumReport {
    pub kind: EquilibriumKind,
    pub r_final: Fractions,
    /// Euclidean norm of the right-hand side at `r_final`.
    pub residual: f64,
    pub eigenvalues: [Complex<f64>; 3],
    pub gaps: PhasicGaps,
}

pub fn phasic_gaps(
    params: &EosParams,
    mix: crate::thermo::TauE,
    r: Fractions,
) -> Result<PhasicGaps> {
    let d = phasic_from_fractions(params, mix, r)?;
    let a = params.eval(d.x1)?;
    let b = params.eval(d.x2)?;
    Ok(PhasicGaps {
        p: [a.p, b.p],
        t: [a.t, b.t],
        mu: [a.mu, b.mu],
        rel_p: rel_gap(a.p, b.p),
        rel_t: rel_gap(a.t, b.t),
        rel_mu: rel_gap(a.mu, b.mu),
    })
}

pub fn detect_equilibrium(params: &EosParams, traj: &Trajectory) -> Result<EquilibriumReport> {
    let mix = traj.mix;
    let r = traj.final_state();
    let f = rhs(params, mix, r)?;
    let residual = f.iter().map(|v| v * v).sum::<f64>().sqrt();
    let gaps = phasic_gaps(params, mix, r)?;
    let kind = if r.spread() <= TOL_ID {
        EquilibriumKind::Identification
    } else if gaps.max_rel() <= TOL_SAT {
        EquilibriumKind::Saturation
    } else {
        EquilibriumKind::NotConverged
    };
    let eigenvalues = eigenvalues(&jacobian(params, mix, r)?);
    Ok(EquilibriumReport {
        kind,
        r_final: r,
        residual,
        eigenvalues,
        gaps,
    })
}
