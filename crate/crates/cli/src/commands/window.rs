//! `window`: the admissible energy window and critical cell length.

use serde_json::json;
use symplyap_core::model::{energy_window, norm_bound_check};
use symplyap_core::{CoreError, ModelConfig, Result};

use crate::output::{fmt_f, OutDir, TaskRecord};
use crate::spec::WindowSpec;

pub fn run(_spec: &WindowSpec, cfg: &ModelConfig, out: &mut OutDir) -> Result<Vec<TaskRecord>> {
    match energy_window(cfg) {
        Ok(w) => {
            let nb = norm_bound_check(cfg, w.center())?;
            println!("window = [{}, {}]", fmt_f(w.lo), fmt_f(w.hi));
            println!("critical_length = {}", fmt_f(w.critical_length));
            println!(
                "center admissibility: l * max ||X_w(E)|| = {} (d = {}) -> {}",
                fmt_f(nb.worst),
                fmt_f(cfg.log_chart_radius()),
                if nb.admissible { "admissible" } else { "NOT admissible" }
            );
            out.write_json(
                "window.json",
                &json!({
                    "empty": false,
                    "window": w,
                    "center_norm_bound": nb,
                }),
            )?;
        }
        Err(CoreError::EmptyWindow { delta0, ratio }) => {
            // An empty window is a legitimate finding, not a failure.
            let critical = (cfg.log_chart_radius() / delta0).min(1.0);
            println!(
                "window empty (l >= l_C): delta0 = {} >= d/l = {}, l_C = {}",
                fmt_f(delta0),
                fmt_f(ratio),
                fmt_f(critical)
            );
            out.write_json(
                "window.json",
                &json!({
                    "empty": true,
                    "delta0": delta0,
                    "ratio": ratio,
                    "critical_length": critical,
                }),
            )?;
        }
        Err(e) => return Err(e),
    }
    Ok(vec![TaskRecord::ok("window")])
}
