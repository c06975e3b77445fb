//! `decay`: exponential decay fit of the eigenfunction nearest a target
//! energy, compared against both extreme positive Lyapunov exponents.

use serde_json::json;
use symplyap_core::lyapunov::lyapunov_spectrum;
use symplyap_core::model::rng;
use symplyap_core::spectral::{eigenfunction_decay, BoxOperator};
use symplyap_core::tolerances::DEFAULT_POINTS_PER_CELL;
use symplyap_core::{ModelConfig, Result};

use crate::output::{fmt_f, Csv, OutDir, TaskRecord};
use crate::spec::{run_task, DecaySpec};

pub fn run(spec: &DecaySpec, cfg: &ModelConfig, out: &mut OutDir) -> Result<Vec<TaskRecord>> {
    let mut tasks = Vec::new();

    let Some(fit) = run_task(&mut tasks, "decay-fit", || {
        let b = BoxOperator::sample(
            cfg.clone(),
            spec.half_cells,
            DEFAULT_POINTS_PER_CELL,
            rng::task_key(spec.seed, "decay-box", 0),
        )?;
        eigenfunction_decay(&b, spec.energy, spec.window_radius)
    }) else {
        return Ok(tasks);
    };

    // Reference rates: the Lyapunov spectrum at the located eigenvalue;
    // both the top and the slowest positive exponent are reported (the
    // decay rate of a localized state is expected to track the slowest
    // channel).
    let Some(ls) = run_task(&mut tasks, "gamma-reference", || {
        lyapunov_spectrum(
            cfg,
            fit.eigenvalue,
            spec.gamma_steps,
            rng::task_key(spec.seed, "decay-gamma", 0),
            10,
        )
    }) else {
        return Ok(tasks);
    };
    let n = cfg.n_channels();
    let gamma_1 = ls.gamma[0];
    let gamma_n = ls.gamma[n - 1];

    println!(
        "decay: eigenvalue = {}, m_hat = {} (r2 = {})",
        fmt_f(fit.eigenvalue),
        fmt_f(fit.m_hat),
        fmt_f(fit.r2)
    );
    println!(
        "gamma_1 = {} (|m_hat - gamma_1| = {}), gamma_N = {} (|m_hat - gamma_N| = {})",
        fmt_f(gamma_1),
        fmt_f((fit.m_hat - gamma_1).abs()),
        fmt_f(gamma_n),
        fmt_f((fit.m_hat - gamma_n).abs())
    );

    let mut dat = format!(
        "# eigenfunction window log-norms vs window center\n\
         # m_hat = {}, eigenvalue = {}, r2 = {}\n\
         # gamma_1 = {}, |m_hat - gamma_1| = {}\n\
         # gamma_N = {}, |m_hat - gamma_N| = {}\n\
         # center log_window_norm in_fit\n",
        fmt_f(fit.m_hat),
        fmt_f(fit.eigenvalue),
        fmt_f(fit.r2),
        fmt_f(gamma_1),
        fmt_f((fit.m_hat - gamma_1).abs()),
        fmt_f(gamma_n),
        fmt_f((fit.m_hat - gamma_n).abs())
    );
    let mut csv = Csv::new("center,log_window_norm,in_fit");
    for i in 0..fit.centers.len() {
        dat.push_str(&format!(
            "{} {} {}\n",
            fmt_f(fit.centers[i]),
            fmt_f(fit.log_norms[i]),
            u8::from(fit.included[i])
        ));
        csv.row(&[
            fmt_f(fit.centers[i]),
            fmt_f(fit.log_norms[i]),
            u8::from(fit.included[i]).to_string(),
        ]);
    }
    out.write_text("decay_profile.dat", &dat)?;
    out.write_text("decay.csv", &csv.finish())?;
    out.write_json(
        "decay.json",
        &json!({
            "fit": fit,
            "gamma_1": gamma_1,
            "gamma_n": gamma_n,
            "diff_gamma_1": (fit.m_hat - gamma_1).abs(),
            "diff_gamma_n": (fit.m_hat - gamma_n).abs(),
            "gamma_steps": spec.gamma_steps,
        }),
    )?;
    Ok(tasks)
}
