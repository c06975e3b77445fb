//! `lie-check`: bracket closure of the cell generators against the full
//! algebra dimension `N(2N+1)`.

use serde_json::json;
use symplyap_core::model::build_site_matrix;
use symplyap_core::symplectic::lie_closure;
use symplyap_core::tolerances::TOL_RANK;
use symplyap_core::{HamiltonianMatrix, ModelConfig, Result};

use crate::output::{Csv, OutDir, TaskRecord};
use crate::spec::LieCheckSpec;
use crate::spec::run_task;

fn closure_dim(cfg: &ModelConfig, energy: f64) -> Result<usize> {
    let n = cfg.n_channels();
    let mut gens = Vec::with_capacity(1 << n);
    for mask in 0u64..(1 << n) {
        let omega: Vec<f64> = (0..n).map(|i| (mask >> i & 1) as f64).collect();
        let site = build_site_matrix(cfg, &omega, energy)?;
        gens.push(HamiltonianMatrix::from_site(&site)?.into_inner());
    }
    Ok(lie_closure(&gens, TOL_RANK)?.dim)
}

pub fn run(spec: &LieCheckSpec, cfg: &ModelConfig, out: &mut OutDir) -> Result<Vec<TaskRecord>> {
    let mut tasks = Vec::new();
    let mut csv = Csv::new("n,dim,expected,status");
    let mut lines = Vec::new();

    for n in 1..=spec.n_max {
        let name = format!("closure_n{n}");
        let cell = cfg.cell_length();
        let Some(dim) =
            run_task(&mut tasks, &name, || closure_dim(&ModelConfig::bernoulli(n, cell)?, spec.energy))
        else {
            continue;
        };
        let expected = n * (2 * n + 1);
        let status = if dim == expected { "PASS" } else { "FAIL" };
        println!("{n}, {dim}, {expected}, {status}");
        csv.row(&[n.to_string(), dim.to_string(), expected.to_string(), status.to_string()]);
        lines.push(json!({"n": n, "dim": dim, "expected": expected, "status": status}));
    }

    // The configured model, if its couplings deviate from the canonical
    // unit family (zero couplings legitimately close to a smaller algebra).
    if cfg.couplings().iter().any(|&c| c != 1.0) {
        let n = cfg.n_channels();
        if let Some(dim) = run_task(&mut tasks, "closure_config", || closure_dim(cfg, spec.energy)) {
            let expected = n * (2 * n + 1);
            let status = if dim == expected { "PASS" } else { "FAIL" };
            println!("config (N={n}), {dim}, {expected}, {status}");
            csv.row(&[format!("config_n{n}"), dim.to_string(), expected.to_string(), status.to_string()]);
            lines.push(json!({"n": n, "config": true, "dim": dim, "expected": expected, "status": status}));
        }
    }

    out.write_text("lie_check.csv", &csv.finish())?;
    out.write_json("lie_check.json", &json!({"energy": spec.energy, "results": lines}))?;
    Ok(tasks)
}
