//! `lyapunov-sweep`: the full Lyapunov spectrum over an energy grid.

use rayon::prelude::*;
use serde_json::json;
use symplyap_core::lyapunov::{lyapunov_spectrum, LyapunovSpectrum};
use symplyap_core::model::rng;
use symplyap_core::{ModelConfig, Result};

use crate::output::{fmt_f, Csv, OutDir, TaskRecord};
use crate::spec::LyapunovSweepSpec;

pub fn run(
    spec: &LyapunovSweepSpec,
    cfg: &ModelConfig,
    out: &mut OutDir,
) -> Result<Vec<TaskRecord>> {
    let results: Vec<(usize, Result<LyapunovSpectrum>)> = spec
        .energies
        .par_iter()
        .enumerate()
        .map(|(i, &e)| {
            let seed = rng::task_key(spec.seed, "lyap-sweep", i as u64);
            (i, lyapunov_spectrum(cfg, e, spec.steps, seed, spec.reorth_every))
        })
        .collect();

    let mut tasks = Vec::new();
    let mut done: Vec<(usize, LyapunovSpectrum)> = Vec::new();
    for (i, r) in results {
        let name = format!("energy_{i}");
        match r {
            Ok(s) => {
                tasks.push(TaskRecord::ok(&name));
                done.push((i, s));
            }
            Err(e) => {
                eprintln!("task {name} failed: {e}");
                tasks.push(TaskRecord::failed(&name, &e));
            }
        }
    }

    let mut csv = Csv::new("energy,index,gamma,stderr");
    for (_, s) in &done {
        for (k, (g, se)) in s.gamma.iter().zip(&s.stderr).enumerate() {
            csv.row(&[
                fmt_f(s.energy),
                (k + 1).to_string(),
                fmt_f(*g),
                fmt_f(*se),
            ]);
        }
    }
    out.write_text("lyapunov_sweep.csv", &csv.finish())?;

    let dim = 2 * cfg.n_channels();
    for k in 0..dim {
        let mut dat = format!(
            "# Lyapunov exponent gamma_{} per unit length vs energy\n# energy gamma stderr\n",
            k + 1
        );
        for (_, s) in &done {
            dat.push_str(&format!(
                "{} {} {}\n",
                fmt_f(s.energy),
                fmt_f(s.gamma[k]),
                fmt_f(s.stderr[k])
            ));
        }
        out.write_text(&format!("gamma_{}.dat", k + 1), &dat)?;
    }

    out.write_json(
        "lyapunov_sweep.json",
        &json!({
            "steps": spec.steps,
            "reorth_every": spec.reorth_every,
            "seed": spec.seed,
            "spectra": done.iter().map(|(_, s)| s).collect::<Vec<_>>(),
        }),
    )?;

    for (_, s) in &done {
        let (sum, sigma) = s.sum_and_sigma();
        println!(
            "E = {:>12}: gamma_1 = {} +- {}  (sum {} within {})",
            fmt_f(s.energy),
            fmt_f(s.gamma[0]),
            fmt_f(s.stderr[0]),
            fmt_f(sum),
            fmt_f(sigma)
        );
    }
    Ok(tasks)
}
