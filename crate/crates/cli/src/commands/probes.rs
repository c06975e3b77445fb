//! `probes`: the Monte Carlo battery at one energy -- Furstenberg
//! integral, large-deviation event, negative moment, solution bounds,
//! and the admissibility check.

use nalgebra::DVector;
use serde_json::json;
use symplyap_core::lyapunov::{
    furstenberg_integral_probe, large_deviation_probe, negative_moment_probe,
};
use symplyap_core::model::{norm_bound_check, rng};
use symplyap_core::report::ProbeReport;
use symplyap_core::spectral::{solution_bound_check, BoxOperator};
use symplyap_core::symplectic::wedge_dim;
use symplyap_core::tolerances::DEFAULT_POINTS_PER_CELL;
use symplyap_core::{ModelConfig, Result};

use crate::output::{fmt_f, Csv, OutDir, TaskRecord};
use crate::spec::{run_task, ProbesSpec};

pub fn run(spec: &ProbesSpec, cfg: &ModelConfig, out: &mut OutDir) -> Result<Vec<TaskRecord>> {
    let mut tasks = Vec::new();
    let mut reports: Vec<ProbeReport> = Vec::new();
    let dim = wedge_dim(2 * cfg.n_channels(), spec.p);
    let e1 = DVector::from_fn(dim, |i, _| f64::from(u8::from(i == 0)));

    let furstenberg = run_task(&mut tasks, "furstenberg", || {
        furstenberg_integral_probe(
            cfg,
            spec.energy,
            spec.p,
            spec.steps,
            rng::task_key(spec.seed, "probes-furstenberg", 0),
        )
    })
    .map(|p| {
        println!(
            "furstenberg (p = {}): gamma-sum = {} +- {}, mode mass(0.1) = {}",
            spec.p,
            fmt_f(p.estimate),
            fmt_f(p.stderr),
            fmt_f(p.mode_mass(0.1))
        );
        json!({
            "estimate": p.estimate,
            "stderr": p.stderr,
            "p": p.p,
            "steps": p.steps,
            "burn_in": p.burn_in,
            "mode_mass_0p1": p.mode_mass(0.1),
        })
    });

    if let Some(rep) = run_task(&mut tasks, "large-deviation", || {
        large_deviation_probe(
            cfg,
            spec.energy,
            spec.p,
            spec.n,
            spec.eps,
            spec.trials,
            rng::task_key(spec.seed, "probes-large-deviation", 0),
            &e1,
            &e1,
            None,
        )
    }) {
        println!(
            "large-deviation: p_hat = {} in [{}, {}]",
            fmt_f(rep.estimate),
            fmt_f(rep.ci_low),
            fmt_f(rep.ci_high)
        );
        reports.push(rep);
    }

    if let Some(rep) = run_task(&mut tasks, "negative-moment", || {
        negative_moment_probe(
            cfg,
            spec.energy,
            spec.p,
            spec.delta,
            spec.n,
            spec.trials,
            rng::task_key(spec.seed, "probes-negative-moment", 0),
            &e1,
        )
    }) {
        println!(
            "negative-moment (delta = {}): mean = {}, xi1 = {}",
            spec.delta,
            fmt_f(rep.estimate),
            rep.extra["xi1"]
        );
        reports.push(rep);
    }

    let bounds = run_task(&mut tasks, "solution-bounds", || {
        let b = BoxOperator::sample(
            cfg.clone(),
            spec.half_cells,
            DEFAULT_POINTS_PER_CELL,
            rng::task_key(spec.seed, "probes-bounds-box", 0),
        )?;
        solution_bound_check(
            &b,
            spec.energy,
            spec.trials,
            rng::task_key(spec.seed, "probes-bounds", 0),
        )
    })
    .map(|r| {
        println!(
            "solution-bounds: {} trials, {} growth / {} local violations -> {}",
            r.trials,
            r.violations_growth,
            r.violations_local,
            if r.pass { "pass" } else { "FAIL" }
        );
        r
    });

    let admissibility = run_task(&mut tasks, "admissibility", || {
        norm_bound_check(cfg, spec.energy)
    })
    .map(|nb| {
        println!(
            "admissibility at E = {}: l * max ||X_w(E)|| = {} -> {}",
            fmt_f(spec.energy),
            fmt_f(nb.worst),
            if nb.admissible { "admissible" } else { "NOT admissible" }
        );
        nb
    });

    let mut csv = Csv::new("probe,estimate,ci_low,ci_high,successes,trials");
    for rep in &reports {
        csv.row(&[
            rep.probe.clone(),
            fmt_f(rep.estimate),
            fmt_f(rep.ci_low),
            fmt_f(rep.ci_high),
            rep.successes.map_or_else(|| "-".into(), |s| s.to_string()),
            rep.trials.to_string(),
        ]);
    }
    out.write_text("probes.csv", &csv.finish())?;
    out.write_json(
        "probes.json",
        &json!({
            "energy": spec.energy,
            "p": spec.p,
            "furstenberg": furstenberg,
            "reports": reports,
            "solution_bounds": bounds,
            "admissibility": admissibility,
        }),
    )?;
    Ok(tasks)
}
