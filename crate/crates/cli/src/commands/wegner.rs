//! `wegner`: frequency of the spectral-proximity event across box sizes.

use symplyap_core::model::rng;
use symplyap_core::spectral::wegner_probe;
use symplyap_core::{ModelConfig, Result};

use crate::output::{fmt_f, Csv, OutDir, TaskRecord};
use crate::spec::{run_task, WegnerSpec};

pub fn run(spec: &WegnerSpec, cfg: &ModelConfig, out: &mut OutDir) -> Result<Vec<TaskRecord>> {
    let mut tasks = Vec::new();
    let mut csv =
        Csv::new("half_cells,box_half_length,threshold,estimate,ci_low,ci_high,successes,trials");
    let mut dat = String::from(
        "# Wegner event frequency vs box size (zero estimates skipped in log column)\n\
         # box_half_length p_hat log10_p_hat\n",
    );

    for &l in &spec.half_cells {
        let name = format!("L{l}");
        let Some(rep) = run_task(&mut tasks, &name, || {
            wegner_probe(
                cfg,
                spec.energy,
                l,
                spec.kappa,
                spec.beta,
                spec.trials,
                rng::task_key(spec.seed, "wegner-L", l as u64),
            )
        }) else {
            continue;
        };
        let half_length = cfg.cell_length() * l as f64;
        let threshold = (-spec.kappa * half_length.powf(spec.beta)).exp();
        println!(
            "wegner L={l}: p_hat = {} in [{}, {}]  ({}/{})",
            fmt_f(rep.estimate),
            fmt_f(rep.ci_low),
            fmt_f(rep.ci_high),
            rep.successes.unwrap_or(0),
            rep.trials
        );
        csv.row(&[
            l.to_string(),
            fmt_f(half_length),
            fmt_f(threshold),
            fmt_f(rep.estimate),
            fmt_f(rep.ci_low),
            fmt_f(rep.ci_high),
            rep.successes.unwrap_or(0).to_string(),
            rep.trials.to_string(),
        ]);
        if rep.estimate > 0.0 {
            dat.push_str(&format!(
                "{} {} {}\n",
                fmt_f(half_length),
                fmt_f(rep.estimate),
                fmt_f(rep.estimate.log10())
            ));
        }
        out.write_json(&format!("wegner_L{l}.json"), &rep)?;
    }

    out.write_text("wegner.csv", &csv.finish())?;
    out.write_text("wegner_p_vs_L.dat", &dat)?;
    Ok(tasks)
}
