//! `ids`: the integrated density of states over an energy grid, with an
//! optional Holder-exponent fit on a subinterval.

use symplyap_core::spectral::{holder_fit, ids_estimate};
use symplyap_core::{CoreError, ModelConfig, Result};

use crate::output::{fmt_f, Csv, OutDir, TaskRecord};
use crate::spec::{run_task, IdsSpec};

pub fn run(spec: &IdsSpec, cfg: &ModelConfig, out: &mut OutDir) -> Result<Vec<TaskRecord>> {
    let mut tasks = Vec::new();
    let Some(curve) = run_task(&mut tasks, "estimate", || {
        ids_estimate(cfg, &spec.energies, spec.half_cells, spec.samples, spec.seed)
    }) else {
        return Ok(tasks);
    };

    // The per-sample counting curves are clamped monotone, so their mean
    // must be monotone; a violation here is a numerical fault.
    for i in 1..curve.values.len() {
        if curve.values[i] + 1e-12 < curve.values[i - 1] {
            return Err(CoreError::Numeric(format!(
                "IDS curve decreases at energy {}",
                curve.energies[i]
            )));
        }
    }

    let mut csv = Csv::new("energy,ids,ci_half");
    let mut dat = String::from(
        "# integrated density of states per unit length\n# energy N(E) ci_half\n",
    );
    for i in 0..curve.len() {
        csv.row(&[fmt_f(curve.energies[i]), fmt_f(curve.values[i]), fmt_f(curve.ci_half[i])]);
        dat.push_str(&format!(
            "{} {} {}\n",
            fmt_f(curve.energies[i]),
            fmt_f(curve.values[i]),
            fmt_f(curve.ci_half[i])
        ));
    }
    out.write_text("ids.csv", &csv.finish())?;
    out.write_text("ids.dat", &dat)?;
    out.write_json("ids.json", &curve)?;
    println!(
        "ids: {} energies, L = {} cells, {} samples; N({}) = {}",
        curve.len(),
        spec.half_cells,
        spec.samples,
        fmt_f(*curve.energies.last().unwrap()),
        fmt_f(*curve.values.last().unwrap())
    );

    if let Some([lo, hi]) = spec.holder {
        if let Some(fit) = run_task(&mut tasks, "holder-fit", || holder_fit(&curve, lo, hi)) {
            println!(
                "holder fit on [{}, {}]: alpha = {} (r2 = {}{})",
                fmt_f(lo),
                fmt_f(hi),
                fmt_f(fit.alpha),
                fmt_f(fit.r2),
                if fit.degenerate { ", degenerate" } else { "" }
            );
            out.write_json("holder.json", &fit)?;
        }
    }
    Ok(tasks)
}
