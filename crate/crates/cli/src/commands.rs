use std::path::Path;

use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use vdw_relax::euler1d::{
    self, Boundary, Grid1D, Primitive, RiemannProblem, SolverConfig, Splitting,
};
use vdw_relax::phase_diagram::{
    classify, equilibrium_fractions, spinodal_energy, DomeTable, DEFAULT_DOME_SAMPLES,
};
use vdw_relax::relax_dynamics::{
    detect_equilibrium, eigenvalues, identification_jacobian, integrate_batch, jacobian,
    phasic_gaps, sample_fractions, Tolerances,
};
use vdw_relax::{EosParams, TauE};

use crate::config::{fractions, Config};
use crate::output::{csv_file, num, row};
use crate::CliError;

/// Mixture states of the published attractivity table.
const TABLE_STATES: [(f64, f64); 5] = [
    (1.99, 2.1),
    (3.9, 2.49),
    (2.39, 1.59),
    (1.79, 1.49),
    (1.89, 1.99),
];

fn dome(cfg: &mut Config, params: &EosParams) -> Result<DomeTable, CliError> {
    let n = cfg.take_or("dome_samples", DEFAULT_DOME_SAMPLES)?;
    Ok(DomeTable::build(params, n)?)
}

fn positive(name: &str, v: usize) -> Result<usize, CliError> {
    if v < 2 {
        return Err(CliError::Config(format!("`{name}` must be at least 2")));
    }
    Ok(v)
}

fn linspace(lo: f64, hi: f64, n: usize) -> impl Iterator<Item = f64> {
    (0..n).map(move |k| lo + (hi - lo) * k as f64 / (n - 1) as f64)
}

pub fn phase_diagram(mut cfg: Config, out: &Path) -> Result<(), CliError> {
    let params = cfg.eos()?;
    let dome = dome(&mut cfg, &params)?;
    let crit = params.critical_point();
    let mut temps = cfg
        .take_list("isotherms")?
        .unwrap_or_else(|| vec![0.85, 0.95, 1.0, 1.077, 1.3]);
    if !temps.iter().any(|t| (t - crit.t).abs() < 1e-12) {
        temps.push(crit.t);
    }
    temps.sort_by(f64::total_cmp);
    let tau_max: f64 = cfg.take_or("tau_max", 10.0)?;
    let tau_points = positive("tau_points", cfg.take_or("tau_points", 400)?)?;
    let z_tau = (
        cfg.take_or("zones_tau_min", 0.6)?,
        cfg.take_or("zones_tau_max", 6.0)?,
    );
    let z_e = (
        cfg.take_or("zones_e_min", 1.0)?,
        cfg.take_or("zones_e_max", 4.5)?,
    );
    let z_n = (
        positive("zones_tau_points", cfg.take_or("zones_tau_points", 120)?)?,
        positive("zones_e_points", cfg.take_or("zones_e_points", 120)?)?,
    );
    cfg.finish()?;
    if !(tau_max > params.b) {
        return Err(CliError::Config(format!(
            "tau_max must exceed b = {}",
            params.b
        )));
    }

    // Volumes graded toward the co-volume b.
    let (u0, u1) = ((0.02 * params.b).ln(), (tau_max - params.b).ln());
    let taus: Vec<f64> = linspace(u0, u1, tau_points)
        .map(|u| params.b + u.exp())
        .collect();

    let note = vec![format!(
        "critical point tau={} T={} e={} p={}",
        crit.tau, crit.t, crit.e, crit.p
    )];
    let mut w = csv_file(out, "isotherms.csv", &params, &note, &["T", "tau", "p"])?;
    for &t in &temps {
        for &tau in &taus {
            let p = params.isotherm_pressure(tau, t)?;
            row(&mut w, [num(t), num(tau), num(p)])?;
        }
    }
    w.flush().map_err(|e| CliError::Io(e.to_string()))?;

    let mut w = csv_file(out, "spinodal.csv", &params, &note, &["tau", "e", "T", "p"])?;
    for &tau in &taus {
        let e = spinodal_energy(&params, tau)?;
        let x = TauE::new(tau, e);
        row(
            &mut w,
            [
                num(tau),
                num(e),
                num(params.temperature(x)?),
                num(params.pressure(x)?),
            ],
        )?;
    }
    w.flush().map_err(|e| CliError::Io(e.to_string()))?;

    let mut w = csv_file(
        out,
        "dome.csv",
        &params,
        &note,
        &[
            "T",
            "p",
            "mu",
            "tau_vapor",
            "e_vapor",
            "tau_liquid",
            "e_liquid",
        ],
    )?;
    for r in dome.rows() {
        row(
            &mut w,
            [
                r.t_star,
                r.p_star,
                r.mu_star,
                r.vapor.tau,
                r.vapor.e,
                r.liquid.tau,
                r.liquid.e,
            ]
            .map(num),
        )?;
    }
    w.flush().map_err(|e| CliError::Io(e.to_string()))?;

    let mut w = csv_file(out, "zones.csv", &params, &note, &["tau", "e", "zone"])?;
    for tau in linspace(z_tau.0, z_tau.1, z_n.0) {
        for e in linspace(z_e.0, z_e.1, z_n.1) {
            let x = TauE::new(tau, e);
            if !params.in_domain(x) {
                continue;
            }
            let z = classify(&params, &dome, x)?;
            row(&mut w, [num(tau), num(e), z.name().to_string()])?;
        }
    }
    w.flush().map_err(|e| CliError::Io(e.to_string()))?;
    println!("phase diagram written to {}", out.display());
    Ok(())
}

pub fn relax(mut cfg: Config, out: &Path, seed: u64) -> Result<(), CliError> {
    let params = cfg.eos()?;
    let mix = cfg.mix()?;
    let explicit = cfg.take_groups("r0", 3)?.unwrap_or_default();
    let n_random: usize = cfg.take_or("n_random", 0)?;
    let t_final: f64 = cfg.take_or("t_final", 200.0)?;
    let d = Tolerances::default();
    let tol = Tolerances {
        rtol: cfg.take_or("rtol", d.rtol)?,
        atol: cfg.take_or("atol", d.atol)?,
    };
    let dome = dome(&mut cfg, &params)?;
    cfg.finish()?;
    if !(t_final > 0.0) {
        return Err(CliError::Config(format!(
            "t_final must be positive, got {t_final}"
        )));
    }
    let mut r0s = explicit
        .iter()
        .map(|v| fractions(v))
        .collect::<Result<Vec<_>, _>>()?;
    let n_given = r0s.len();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    r0s.extend(sample_fractions(&params, mix, n_random, &mut rng));
    if r0s.is_empty() {
        return Err(CliError::Config(
            "no initial fractions: set `r0` or `n_random`".into(),
        ));
    }
    let zone = classify(&params, &dome, mix)?;

    let trajs = integrate_batch(&params, mix, &r0s, t_final, tol);
    let notes = vec![format!(
        "mix tau={} e={} zone={} t_final={} rtol={} atol={} seed={}",
        mix.tau, mix.e, zone, t_final, tol.rtol, tol.atol, seed
    )];
    let mut summary = csv_file(
        out,
        "equilibria.csv",
        &params,
        &notes,
        &[
            "index",
            "source",
            "alpha0",
            "phi0",
            "xi0",
            "kind",
            "alpha",
            "phi",
            "xi",
            "p1",
            "p2",
            "T1",
            "T2",
            "mu1",
            "mu2",
            "residual",
            "lambda1_re",
            "lambda1_im",
            "lambda2_re",
            "lambda2_im",
            "lambda3_re",
            "lambda3_im",
            "steps",
            "entropy_violations",
        ],
    )?;
    let mut counts = std::collections::BTreeMap::new();
    for (i, (r0, traj)) in r0s.iter().zip(trajs).enumerate() {
        let traj = traj.map_err(CliError::Numerical)?;
        let mut w = csv_file(
            out,
            &format!("trajectory_{i:03}.csv"),
            &params,
            &notes,
            &[
                "t", "alpha", "phi", "xi", "entropy", "p1", "p2", "T1", "T2", "mu1", "mu2",
            ],
        )?;
        for ((t, r), s) in traj.times.iter().zip(&traj.states).zip(&traj.entropy) {
            let g = phasic_gaps(&params, mix, *r)?;
            row(
                &mut w,
                [
                    *t, r.alpha, r.phi, r.xi, *s, g.p[0], g.p[1], g.t[0], g.t[1], g.mu[0], g.mu[1],
                ]
                .map(num),
            )?;
        }
        w.flush().map_err(|e| CliError::Io(e.to_string()))?;

        let rep = detect_equilibrium(&params, &traj)?;
        *counts.entry(rep.kind.name()).or_insert(0usize) += 1;
        let g = rep.gaps;
        let mut fields = vec![
            i.to_string(),
            if i < n_given { "given" } else { "random" }.to_string(),
            num(r0.alpha),
            num(r0.phi),
            num(r0.xi),
            rep.kind.name().to_string(),
        ];
        fields.extend(
            [
                rep.r_final.alpha,
                rep.r_final.phi,
                rep.r_final.xi,
                g.p[0],
                g.p[1],
                g.t[0],
                g.t[1],
                g.mu[0],
                g.mu[1],
                rep.residual,
            ]
            .map(num),
        );
        for l in rep.eigenvalues {
            fields.push(num(l.re));
            fields.push(num(l.im));
        }
        fields.push(traj.stats.accepted.to_string());
        fields.push(traj.entropy_violations.to_string());
        row(&mut summary, fields)?;
    }
    summary.flush().map_err(|e| CliError::Io(e.to_string()))?;
    let parts: Vec<String> = counts.iter().map(|(k, v)| format!("{k}: {v}")).collect();
    println!(
        "{} trajectories at mix ({}, {}) [{zone}]: {}",
        r0s.len(),
        mix.tau,
        mix.e,
        parts.join(", ")
    );
    Ok(())
}

pub fn eigen(mut cfg: Config, out: &Path) -> Result<(), CliError> {
    let params = cfg.eos()?;
    let states: Vec<TauE> = match cfg.take_groups("states", 2)? {
        Some(g) => g.iter().map(|v| TauE::new(v[0], v[1])).collect(),
        None => TABLE_STATES.iter().map(|&(t, e)| TauE::new(t, e)).collect(),
    };
    let dome = dome(&mut cfg, &params)?;
    cfg.finish()?;

    let mut w = csv_file(
        out,
        "eigen.csv",
        &params,
        &[],
        &[
            "tau",
            "e",
            "zone",
            "equilibrium",
            "alpha",
            "phi",
            "xi",
            "tau1",
            "e1",
            "tau2",
            "e2",
            "lambda1_re",
            "lambda1_im",
            "lambda2_re",
            "lambda2_im",
            "lambda3_re",
            "lambda3_im",
            "det",
        ],
    )?;
    for mix in states {
        let zone = classify(&params, &dome, mix)?;
        let mut fields = vec![num(mix.tau), num(mix.e), zone.name().to_string()];
        let j = if zone.is_under_dome() {
            let eq = equilibrium_fractions(&params, &dome, mix)?;
            let r = eq.r_star;
            fields.push("Saturation".into());
            fields.extend(
                [
                    r.alpha,
                    r.phi,
                    r.xi,
                    eq.pair.vapor.tau,
                    eq.pair.vapor.e,
                    eq.pair.liquid.tau,
                    eq.pair.liquid.e,
                ]
                .map(num),
            );
            jacobian(&params, mix, r)?
        } else {
            fields.push("Identification".into());
            fields.extend(std::iter::repeat_n(String::new(), 3));
            fields.extend([mix.tau, mix.e, mix.tau, mix.e].map(num));
            identification_jacobian(&params, mix)?
        };
        for l in eigenvalues(&j) {
            fields.push(num(l.re));
            fields.push(num(l.im));
        }
        fields.push(num(j.determinant()));
        row(&mut w, fields)?;
    }
    w.flush().map_err(|e| CliError::Io(e.to_string()))?;
    println!("spectra written to {}", out.join("eigen.csv").display());
    Ok(())
}

fn primitive(cfg: &mut Config, side: &str) -> Result<Primitive, CliError> {
    let mut get = |k: &str| cfg.require::<f64>(&format!("{side}_{k}"));
    let rho = get("rho")?;
    let u = get("u")?;
    let p = get("p")?;
    let r = [get("alpha")?, get("phi")?, get("xi")?];
    Ok(Primitive {
        rho,
        u,
        p,
        r: fractions(&r)?,
    })
}

pub fn euler(mut cfg: Config, out: &Path) -> Result<(), CliError> {
    let params = cfg.eos()?;
    let grid = Grid1D::new(
        cfg.take_or("n_cells", 500)?,
        cfg.take_or("x_min", 0.0)?,
        cfg.take_or("x_max", 1.0)?,
    )?;
    let x0 = cfg.take_or("x_discontinuity", 0.5 * (grid.x_min + grid.x_max))?;
    let boundary = match cfg
        .take_or("boundary", "transmissive".to_string())?
        .as_str()
    {
        "transmissive" => Boundary::Transmissive,
        "periodic" => Boundary::Periodic,
        b => return Err(CliError::Config(format!("unknown boundary `{b}`"))),
    };
    let splitting = match cfg.take_or("splitting", "godunov".to_string())?.as_str() {
        "godunov" => Splitting::Godunov,
        "strang" => Splitting::Strang,
        s => return Err(CliError::Config(format!("unknown splitting `{s}`"))),
    };
    let solver = SolverConfig {
        cfl: cfg.take_or("cfl", 0.9)?,
        epsilon: cfg.require("epsilon")?,
        t_end: cfg.require("t_end")?,
        boundary,
        splitting,
        snapshot_interval: cfg.take("snapshot_interval")?,
    };
    let rp = RiemannProblem {
        left: primitive(&mut cfg, "left")?,
        right: primitive(&mut cfg, "right")?,
        x0,
    };
    let dome = dome(&mut cfg, &params)?;
    cfg.finish()?;
    solver.validate()?;

    let init = euler1d::riemann_initial(&params, &grid, &rp)?;
    let mut snaps = Vec::new();
    let result = euler1d::run(&params, &grid, &solver, init, |t, s| {
        snaps.push((t, s.to_vec()));
        Ok(())
    });
    // Snapshots reached before a failure are still useful for diagnosis.
    for (k, (t, states)) in snaps.iter().enumerate() {
        let mut w = csv_file(
            out,
            &format!("snapshot_{k:04}.csv"),
            &params,
            &[format!("t={t}")],
            &[
                "x",
                "rho",
                "u",
                "p",
                "e",
                "T",
                "alpha",
                "phi",
                "xi",
                "zone",
                "c2_positive",
            ],
        )?;
        for (i, c) in states.iter().enumerate() {
            let s = euler1d::cell_state(&params, c)?;
            let zone = classify(&params, &dome, s.mix())
                .map(|z| z.name())
                .unwrap_or("OutOfDomain");
            let pr = s.prim;
            let mut fields: Vec<String> = [
                grid.center(i),
                pr.rho,
                pr.u,
                pr.p,
                s.e,
                s.t,
                pr.r.alpha,
                pr.r.phi,
                pr.r.xi,
            ]
            .map(num)
            .into();
            fields.push(zone.to_string());
            fields.push((s.c2 > 0.0).to_string());
            row(&mut w, fields)?;
        }
        w.flush().map_err(|e| CliError::Io(e.to_string()))?;
    }
    let summary = result?;

    let mut w = csv_file(
        out,
        "summary.csv",
        &params,
        &[],
        &[
            "steps",
            "time",
            "mass0",
            "momentum0",
            "energy0",
            "mass",
            "momentum",
            "energy",
            "drift_mass",
            "drift_momentum",
            "drift_energy",
            "min_rho",
            "fraction_min",
            "fraction_max",
        ],
    )?;
    let mut fields = vec![summary.steps.to_string(), num(summary.time)];
    fields.extend(summary.initial_totals.map(num));
    fields.extend(summary.final_totals.map(num));
    fields.extend(summary.max_step_drift.map(num));
    fields.extend([summary.min_rho, summary.fraction_min, summary.fraction_max].map(num));
    row(&mut w, fields)?;
    w.flush().map_err(|e| CliError::Io(e.to_string()))?;
    println!(
        "{} steps to t={}; max per-step drift (mass, momentum, energy) = {:?}; min rho {}; fractions in [{}, {}]",
        summary.steps,
        summary.time,
        summary.max_step_drift,
        summary.min_rho,
        summary.fraction_min,
        summary.fraction_max
    );
    Ok(())
}
