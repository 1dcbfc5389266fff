//! Relaxation dynamics of the volume, mass and energy fractions r = (α, φ, ξ)
//! at a fixed mixture state.

mod equilibrium;
mod integrate;
pub mod sdirk;

pub use equilibrium::{
    detect_equilibrium, phasic_gaps, EquilibriumKind, EquilibriumReport, PhasicGaps, TOL_ID,
    TOL_SAT,
};
pub use integrate::{integrate, integrate_batch, sample_fractions, Tolerances, Trajectory};

use nalgebra::{Complex, Matrix3, Vector3};

use crate::error::{Error, Phase, Result};
use crate::phase_diagram::{concave_hull_entropy, DomeTable};
use crate::thermo::{EosParams, TauE, DOMAIN_MARGIN};

/// Volume, mass and energy fractions of phase 1.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Fractions {
    pub alpha: f64,
    pub phi: f64,
    pub xi: f64,
}

impl Fractions {
    pub fn new(alpha: f64, phi: f64, xi: f64) -> Result<Self> {
        let r = Self { alpha, phi, xi };
        if r.as_array().iter().all(|v| *v > 0.0 && *v < 1.0) {
            Ok(r)
        } else {
            Err(Error::FractionOutOfRange(alpha, phi, xi))
        }
    }

    /// No range check; used for closed boundary values such as pure-phase lever fractions.
    pub const fn unchecked(alpha: f64, phi: f64, xi: f64) -> Self {
        Self { alpha, phi, xi }
    }

    pub const fn uniform(beta: f64) -> Self {
        Self::unchecked(beta, beta, beta)
    }

    pub fn complement(&self) -> Self {
        Self::unchecked(1.0 - self.alpha, 1.0 - self.phi, 1.0 - self.xi)
    }

    pub fn as_array(&self) -> [f64; 3] {
        [self.alpha, self.phi, self.xi]
    }

    pub fn from_array(v: [f64; 3]) -> Self {
        Self::unchecked(v[0], v[1], v[2])
    }

    /// Largest pairwise difference among the three fractions.
    pub fn spread(&self) -> f64 {
        let [a, p, x] = self.as_array();
        (a - p).abs().max((p - x).abs()).max((a - x).abs())
    }

    pub fn max_abs_diff(&self, other: &Fractions) -> f64 {
        self.as_array()
            .iter()
            .zip(other.as_array())
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }

    pub fn clamped(&self, delta: f64) -> Self {
        let c = |v: f64| v.clamp(delta, 1.0 - delta);
        Self::unchecked(c(self.alpha), c(self.phi), c(self.xi))
    }
}

/// Phasic states reconstructed from a mixture state and its fractions.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhasicDecomposition {
    pub x1: TauE,
    pub x2: TauE,
    pub phi: f64,
}

pub fn phasic_from_fractions(
    params: &EosParams,
    mix: TauE,
    r: Fractions,
) -> Result<PhasicDecomposition> {
    Fractions::new(r.alpha, r.phi, r.xi)?;
    let x1 = TauE::new(r.alpha * mix.tau / r.phi, r.xi * mix.e / r.phi);
    let x2 = TauE::new(
        (1.0 - r.alpha) * mix.tau / (1.0 - r.phi),
        (1.0 - r.xi) * mix.e / (1.0 - r.phi),
    );
    for (phase, x) in [(Phase::One, x1), (Phase::Two, x2)] {
        if !params.in_domain(x) {
            return Err(Error::PhasicOutOfDomain {
                phase,
                tau: x.tau,
                e: x.e,
            });
        }
    }
    Ok(PhasicDecomposition { x1, x2, phi: r.phi })
}

pub fn mixture_entropy(params: &EosParams, mix: TauE, r: Fractions) -> Result<f64> {
    let d = phasic_from_fractions(params, mix, r)?;
    Ok(d.phi * params.entropy(d.x1)? + (1.0 - d.phi) * params.entropy(d.x2)?)
}

/// Per-phase (p/T, μ/T, 1/T).
fn drivers(params: &EosParams, x: TauE) -> Result<[f64; 3]> {
    let ev = params.eval(x)?;
    Ok([ev.p / ev.t, ev.mu / ev.t, 1.0 / ev.t])
}

/// ∇_r of the mixture entropy.
pub fn entropy_gradient(params: &EosParams, mix: TauE, r: Fractions) -> Result<[f64; 3]> {
    let d = phasic_from_fractions(params, mix, r)?;
    let q1 = drivers(params, d.x1)?;
    let q2 = drivers(params, d.x2)?;
    Ok([
        mix.tau * (q1[0] - q2[0]),
        -q1[1] + q2[1],
        mix.e * (q1[2] - q2[2]),
    ])
}

pub fn rhs(params: &EosParams, mix: TauE, r: Fractions) -> Result<[f64; 3]> {
    let g = entropy_gradient(params, mix, r)?;
    Ok([
        r.alpha * (1.0 - r.alpha) * g[0],
        r.phi * (1.0 - r.phi) * g[1],
        r.xi * (1.0 - r.xi) * g[2],
    ])
}

/// Fraction spread below which the closed-form identification Jacobian is used.
const IDENTIFICATION_EPS: f64 = 1e-10;

/// D_r F at an identification state r = (β, β, β); the logistic factors cancel.
pub fn identification_jacobian(params: &EosParams, mix: TauE) -> Result<Matrix3<f64>> {
    let h = params.entropy_hessian(mix)?;
    let (tau, e) = (mix.tau, mix.e);
    // (∂τ q, ∂e q) for q = p/T, μ/T, 1/T.
    let q = [
        (h.s_tt, h.s_te),
        (tau * h.s_tt + e * h.s_te, tau * h.s_te + e * h.s_ee),
        (h.s_te, h.s_ee),
    ];
    let scale = [tau, -1.0, e];
    let mut j = Matrix3::zeros();
    for i in 0..3 {
        let (qt, qe) = q[i];
        j[(i, 0)] = scale[i] * qt * tau;
        j[(i, 1)] = -scale[i] * (qt * tau + qe * e);
        j[(i, 2)] = scale[i] * qe * e;
    }
    Ok(j)
}

pub fn jacobian(params: &EosParams, mix: TauE, r: Fractions) -> Result<Matrix3<f64>> {
    phasic_from_fractions(params, mix, r)?;
    if r.spread() <= IDENTIFICATION_EPS {
        return identification_jacobian(params, mix);
    }
    let base = r.as_array();
    let mut j = Matrix3::zeros();
    for col in 0..3 {
        let v = base[col];
        let h = (1e-6 * v.abs().max(1e-3))
            .min(0.25 * v)
            .min(0.25 * (1.0 - v));
        let f = |k: f64| -> Result<[f64; 3]> {
            let mut y = base;
            y[col] = v + k * h;
            rhs(params, mix, Fractions::from_array(y))
        };
        let (m2, m1, p1, p2) = (f(-2.0)?, f(-1.0)?, f(1.0)?, f(2.0)?);
        for row in 0..3 {
            j[(row, col)] = (m2[row] - 8.0 * m1[row] + 8.0 * p1[row] - p2[row]) / (12.0 * h);
        }
    }
    Ok(j)
}

/// Eigenvalues sorted by increasing real part.
pub fn eigenvalues(j: &Matrix3<f64>) -> [Complex<f64>; 3] {
    let ev = j.complex_eigenvalues();
    let mut v = [ev[0], ev[1], ev[2]];
    v.sort_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)));
    v
}

/// G_S(r) = conc(s)(mix) − 𝒮(r).
pub fn lyapunov_gs(params: &EosParams, dome: &DomeTable, mix: TauE, r: Fractions) -> Result<f64> {
    Ok(concave_hull_entropy(params, dome, mix)? - mixture_entropy(params, mix, r)?)
}

/// G_I(r) = s(mix) − 𝒮(r).
pub fn lyapunov_gi(params: &EosParams, mix: TauE, r: Fractions) -> Result<f64> {
    Ok(params.entropy(mix)? - mixture_entropy(params, mix, r)?)
}

pub(crate) fn to_vec(r: Fractions) -> Vector3<f64> {
    Vector3::new(r.alpha, r.phi, r.xi)
}

pub(crate) fn from_vec(v: &Vector3<f64>) -> Fractions {
    Fractions::unchecked(v[0], v[1], v[2])
}

/// True when every fraction lies in [δ, 1 − δ].
pub(crate) fn in_cube(v: &Vector3<f64>) -> bool {
    v.iter()
        .all(|x| x.is_finite() && *x >= DOMAIN_MARGIN && *x <= 1.0 - DOMAIN_MARGIN)
}
