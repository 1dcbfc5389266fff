use nalgebra::Vector3;
use rand::Rng;
use rayon::prelude::*;

use super::sdirk::{self, SdirkOptions, SdirkStats};
use super::{
    from_vec, in_cube, jacobian, mixture_entropy, phasic_from_fractions, rhs, to_vec, Fractions,
};
use crate::error::Result;
use crate::thermo::{EosParams, TauE};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerances {
    pub rtol: f64,
    pub atol: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            rtol: 1e-8,
            atol: 1e-10,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub mix: TauE,
    pub times: Vec<f64>,
    pub states: Vec<Fractions>,
    pub entropy: Vec<f64>,
    /// Accepted steps whose entropy dropped by more than 10·atol.
    pub entropy_violations: usize,
    /// Largest entropy decrease over one accepted step (0 if none).
    pub max_entropy_drop: f64,
    pub stats: SdirkStats,
}

impl Trajectory {
    pub fn final_state(&self) -> Fractions {
        *self.states.last().expect("trajectory has an initial state")
    }

    pub fn final_time(&self) -> f64 {
        *self.times.last().expect("trajectory has an initial state")
    }
}

/// Integrates the fraction dynamics at fixed mixture state up to `t_final`.
pub fn integrate(
    params: &EosParams,
    mix: TauE,
    r0: Fractions,
    t_final: f64,
    tol: Tolerances,
) -> Result<Trajectory> {
    phasic_from_fractions(params, mix, r0)?;
    let opts = SdirkOptions {
        rtol: tol.rtol,
        atol: tol.atol,
        ..SdirkOptions::default()
    };
    let f = |y: &Vector3<f64>| rhs(params, mix, from_vec(y)).map(Vector3::from);
    let jac = |y: &Vector3<f64>| jacobian(params, mix, from_vec(y));
    let admissible =
        |y: &Vector3<f64>| in_cube(y) && phasic_from_fractions(params, mix, from_vec(y)).is_ok();

    let mut traj = Trajectory {
        mix,
        times: Vec::new(),
        states: Vec::new(),
        entropy: Vec::new(),
        entropy_violations: 0,
        max_entropy_drop: 0.0,
        stats: SdirkStats::default(),
    };
    let threshold = 10.0 * tol.atol;
    let stats = sdirk::integrate(
        f,
        jac,
        admissible,
        to_vec(r0),
        0.0,
        t_final,
        opts,
        |t, y| {
            let r = from_vec(y);
            let s = mixture_entropy(params, mix, r)?;
            if let Some(prev) = traj.entropy.last() {
                let drop = prev - s;
                if drop > traj.max_entropy_drop {
                    traj.max_entropy_drop = drop;
                }
                if drop > threshold {
                    traj.entropy_violations += 1;
                }
            }
            traj.times.push(t);
            traj.states.push(r);
            traj.entropy.push(s);
            Ok(())
        },
    )?;
    traj.stats = stats;
    Ok(traj)
}

/// Independent integrations run in parallel; results keep the input order.
pub fn integrate_batch(
    params: &EosParams,
    mix: TauE,
    r0s: &[Fractions],
    t_final: f64,
    tol: Tolerances,
) -> Vec<Result<Trajectory>> {
    r0s.par_iter()
        .map(|r0| integrate(params, mix, *r0, t_final, tol))
        .collect()
}

/// Uniform samples of (0,1)³ whose phasic states are admissible for `mix`.
pub fn sample_fractions<R: Rng>(
    params: &EosParams,
    mix: TauE,
    n: usize,
    rng: &mut R,
) -> Vec<Fractions> {
    let mut out = Vec::with_capacity(n);
    let mut tries = 0usize;
    while out.len() < n && tries < 10_000 * n.max(1) {
        tries += 1;
        let v: [f64; 3] = [rng.random(), rng.random(), rng.random()];
        let Ok(r) = Fractions::new(v[0], v[1], v[2]) else {
            continue;
        };
        if phasic_from_fractions(params, mix, r).is_ok() && r.spread() > 1e-3 {
            out.push(r);
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    const P: EosParams = EosParams::REDUCED;

    #[test]
    fn identification_start_is_constant() {
        let mix = TauE::new(2.0, 2.5);
        let traj = integrate(
            &P,
            mix,
            Fractions::uniform(0.4),
            10.0,
            Tolerances::default(),
        )
        .unwrap();
        for r in &traj.states {
            assert_eq!(*r, Fractions::uniform(0.4));
        }
    }

    #[test]
    fn entropy_increases_and_fractions_stay_inside() {
        let mix = TauE::new(2.0, 2.5);
        let r0 = Fractions::new(0.2, 0.5, 0.42).unwrap();
        let traj = integrate(&P, mix, r0, 50.0, Tolerances::default()).unwrap();
        assert_eq!(traj.entropy_violations, 0);
        assert!(traj.entropy.last().unwrap() > traj.entropy.first().unwrap());
        for r in &traj.states {
            assert!(r.as_array().iter().all(|v| *v > 0.0 && *v < 1.0));
        }
        assert_eq!(traj.final_time(), 50.0);
    }

    #[test]
    fn complement_trajectory_mirrors() {
        let mix = TauE::new(3.0, 3.1);
        let r0 = Fractions::new(0.134, 0.5, 0.338).unwrap();
        let a = integrate(&P, mix, r0, 20.0, Tolerances::default()).unwrap();
        let b = integrate(&P, mix, r0.complement(), 20.0, Tolerances::default()).unwrap();
        let d = a.final_state().complement().max_abs_diff(&b.final_state());
        assert!(d < 1e-6, "{d}");
    }

    #[test]
    fn sampling_is_deterministic_and_admissible() {
        let mix = TauE::new(2.0, 2.5);
        let a = sample_fractions(&P, mix, 20, &mut ChaCha8Rng::seed_from_u64(7));
        let b = sample_fractions(&P, mix, 20, &mut ChaCha8Rng::seed_from_u64(7));
        assert_eq!(a, b);
        assert_eq!(a.len(), 20);
        for r in a {
            assert!(phasic_from_fractions(&P, mix, r).is_ok());
        }
    }

    #[test]
    fn batch_matches_serial() {
        let mix = TauE::new(2.0, 2.5);
        let r0s = [
            Fractions::new(0.2, 0.5, 0.42).unwrap(),
            Fractions::new(0.6, 0.4, 0.5).unwrap(),
        ];
        let batch = integrate_batch(&P, mix, &r0s, 5.0, Tolerances::default());
        for (r0, res) in r0s.iter().zip(batch) {
            let serial = integrate(&P, mix, *r0, 5.0, Tolerances::default()).unwrap();
            assert_eq!(res.unwrap(), serial);
        }
    }
}
