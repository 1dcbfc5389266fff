//! Reduced van der Waals equation of state in the intensive (τ, e) variables.

use crate::error::{Error, Result};

/// Margin kept from the boundary of the entropy domain.
pub const DOMAIN_MARGIN: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EosParams {
    pub a: f64,
    pub b: f64,
    pub r: f64,
    pub cv: f64,
    pub s0: f64,
}

impl Default for EosParams {
    fn default() -> Self {
        Self::REDUCED
    }
}

/// Specific volume and specific internal energy.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TauE {
    pub tau: f64,
    pub e: f64,
}

impl TauE {
    pub const fn new(tau: f64, e: f64) -> Self {
        Self { tau, e }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ThermoEval {
    pub s: f64,
    pub t: f64,
    pub p: f64,
    pub mu: f64,
}

/// Second derivatives of the specific entropy.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Hessian2 {
    pub s_tt: f64,
    pub s_te: f64,
    pub s_ee: f64,
}

impl Hessian2 {
    pub fn det(&self) -> f64 {
        self.s_tt * self.s_ee - self.s_te * self.s_te
    }

    /// Quadratic form vᵀHv.
    pub fn quad(&self, v: [f64; 2]) -> f64 {
        self.s_tt * v[0] * v[0] + 2.0 * self.s_te * v[0] * v[1] + self.s_ee * v[1] * v[1]
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CriticalPoint {
    pub tau: f64,
    pub t: f64,
    pub e: f64,
    pub p: f64,
}

impl EosParams {
    pub const REDUCED: EosParams = EosParams {
        a: 1.0,
        b: 0.5,
        r: 0.5,
        cv: 3.0,
        s0: 0.0,
    };

    pub fn new(a: f64, b: f64, r: f64, cv: f64, s0: f64) -> Result<Self> {
        let p = Self { a, b, r, cv, s0 };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        let pos = |name: &str, v: f64| {
            if v.is_finite() && v > 0.0 {
                Ok(())
            } else {
                Err(Error::InvalidParams(format!(
                    "{name} must be positive, got {v}"
                )))
            }
        };
        pos("a", self.a)?;
        pos("b", self.b)?;
        pos("R", self.r)?;
        pos("Cv", self.cv)?;
        if !self.s0.is_finite() {
            return Err(Error::InvalidParams("s0 must be finite".into()));
        }
        Ok(())
    }

    pub fn in_domain(&self, x: TauE) -> bool {
        x.tau.is_finite()
            && x.e.is_finite()
            && x.tau - self.b > DOMAIN_MARGIN
            && self.a / x.tau + x.e > DOMAIN_MARGIN
    }

    fn check(&self, x: TauE) -> Result<()> {
        if self.in_domain(x) {
            Ok(())
        } else {
            Err(Error::Domain { tau: x.tau, e: x.e })
        }
    }

    fn check_tau(&self, tau: f64) -> Result<()> {
        if tau.is_finite() && tau - self.b > DOMAIN_MARGIN {
            Ok(())
        } else {
            Err(Error::Domain { tau, e: f64::NAN })
        }
    }

    pub fn entropy(&self, x: TauE) -> Result<f64> {
        self.check(x)?;
        Ok(self.cv * (self.a / x.tau + x.e).ln() + self.r * (x.tau - self.b).ln() + self.s0)
    }

    pub fn temperature(&self, x: TauE) -> Result<f64> {
        self.check(x)?;
        Ok((x.e + self.a / x.tau) / self.cv)
    }

    pub fn pressure(&self, x: TauE) -> Result<f64> {
        let t = self.temperature(x)?;
        Ok(self.r * t / (x.tau - self.b) - self.a / (x.tau * x.tau))
    }

    pub fn chemical_potential(&self, x: TauE) -> Result<f64> {
        Ok(self.eval(x)?.mu)
    }

    /// Entropy, temperature, pressure and chemical potential in one pass.
    pub fn eval(&self, x: TauE) -> Result<ThermoEval> {
        self.check(x)?;
        let w = self.a / x.tau + x.e;
        let s = self.cv * w.ln() + self.r * (x.tau - self.b).ln() + self.s0;
        let t = w / self.cv;
        let p = self.r * t / (x.tau - self.b) - self.a / (x.tau * x.tau);
        let mu = p * x.tau + x.e - t * s;
        Ok(ThermoEval { s, t, p, mu })
    }

    /// Entropy gradient (∂s/∂τ, ∂s/∂e) = (p/T, 1/T).
    pub fn entropy_gradient(&self, x: TauE) -> Result<[f64; 2]> {
        let ev = self.eval(x)?;
        Ok([ev.p / ev.t, 1.0 / ev.t])
    }

    pub fn entropy_hessian(&self, x: TauE) -> Result<Hessian2> {
        let t = self.temperature(x)?;
        let (a, b, r, cv) = (self.a, self.b, self.r, self.cv);
        let tau = x.tau;
        let tau2 = tau * tau;
        let d = tau - b;
        let s_ee = -1.0 / (cv * t * t);
        let s_te = a / (cv * tau2 * t * t);
        let s_tt = -r / (d * d) + 2.0 * a / (tau2 * tau * t) - a * a / (cv * tau2 * tau2 * t * t);
        Ok(Hessian2 { s_tt, s_te, s_ee })
    }

    pub fn isotherm_pressure(&self, tau: f64, t: f64) -> Result<f64> {
        self.check_tau(tau)?;
        Ok(self.r * t / (tau - self.b) - self.a / (tau * tau))
    }

    /// ∂p/∂τ along an isotherm.
    pub fn isotherm_pressure_slope(&self, tau: f64, t: f64) -> Result<f64> {
        self.check_tau(tau)?;
        let d = tau - self.b;
        Ok(-self.r * t / (d * d) + 2.0 * self.a / (tau * tau * tau))
    }

    pub fn isotherm_energy(&self, tau: f64, t: f64) -> Result<f64> {
        self.check_tau(tau)?;
        Ok(self.cv * t - self.a / tau)
    }

    /// s(x) − s(y) − ∇s(y)·(x − y).
    pub fn relative_entropy(&self, x: TauE, y: TauE) -> Result<f64> {
        let sx = self.entropy(x)?;
        let ey = self.eval(y)?;
        Ok(sx - ey.s - (ey.p / ey.t) * (x.tau - y.tau) - (x.e - y.e) / ey.t)
    }

    pub fn critical_point(&self) -> CriticalPoint {
        let tau = 3.0 * self.b;
        let d = tau - self.b;
        let t = 2.0 * self.a * d * d / (self.r * tau * tau * tau);
        let e = self.cv * t - self.a / tau;
        let p = self.r * t / d - self.a / (tau * tau);
        CriticalPoint { tau, t, e, p }
    }
}
