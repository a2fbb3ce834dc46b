//! Generic one- and two-axis sweeps: each grid point re-runs the scenario
//! (fixed-rate evaluation when `r_s` is pinned, full optimization otherwise)
//! and contributes one CSV row. Points are evaluated on a worker pool but
//! rows always follow grid order.

use rayon::prelude::*;

use fblsec::channel::ChannelSnapshot;
use fblsec::multi_opt::{adaptive_phi_opt, nonadaptive_throughput_multi, ps_multi};
use fblsec::single_opt::{nonadaptive_throughput, p_success, AdaptiveSingleDesign};

use crate::commands::{optimize_row, OPTIMIZE_HEADER};
use crate::config::{Scheme, ScenarioConfig};
use crate::error::CliError;
use crate::output::Table;

/// Apply one axis value to a scenario copy. Axis names mirror config keys;
/// `n` drives both the operating blocklength and the latency cap, matching
/// the blocklength sweeps of the reference figures.
fn apply_axis(cfg: &mut ScenarioConfig, axis: &str, value: f64) -> Result<(), CliError> {
    let as_count = |value: f64, field: &str| -> Result<usize, CliError> {
        let rounded = value.round();
        if (value - rounded).abs() > 1e-9 || rounded < 1.0 {
            return Err(CliError::validation(field, "axis values must be positive integers"));
        }
        Ok(rounded as usize)
    };
    match axis {
        "eta" => cfg.eta = Some(value),
        "eta_db" => cfg.eta = Some(10f64.powf(value / 10.0)),
        "r_s" => cfg.r_s = Some(value),
        "r_e" => cfg.r_e = Some(value),
        "phi" => cfg.phi = Some(value),
        "alpha" => cfg.alpha = Some(value),
        "delta" => cfg.params.delta = value,
        "n" => {
            let n = as_count(value, "n")?;
            cfg.n = n;
            cfg.params.n_max = n;
        }
        "m" => cfg.params.m = as_count(value, "m")?,
        "m_e" => cfg.params.m_e = as_count(value, "m_e")?,
        "p_b" => cfg.params.p_b = value,
        "p_b_db" => cfg.params.p_b = 10f64.powf(value / 10.0),
        "p_e" => cfg.params.p_e = value,
        "p_e_db" => cfg.params.p_e = 10f64.powf(value / 10.0),
        "sigma_b2" => cfg.params.sigma_b2 = value,
        "sigma_b2_db" => cfg.params.sigma_b2 = 10f64.powf(value / 10.0),
        "sigma_e2" => cfg.params.sigma_e2 = value,
        "sigma_e2_db" => cfg.params.sigma_e2 = 10f64.powf(value / 10.0),
        "gamma_b_db" => cfg.params.sigma_b2 = 10f64.powf(value / 10.0) / cfg.params.p_b,
        "gamma_e_db" => cfg.params.sigma_e2 = 10f64.powf(value / 10.0) / cfg.params.p_e,
        other => {
            return Err(CliError::validation(
                "sweep_axis",
                &format!("unknown axis '{other}'"),
            ))
        }
    }
    cfg.params
        .validate()
        .map_err(|e| CliError::validation(e.field, e.constraint))?;
    Ok(())
}

/// Evaluate one grid point. With a pinned secrecy rate the row reports the
/// scheme's throughput at that rate (optimizing only what remains free);
/// otherwise it is a full optimizer row.
fn point_row(cfg: &ScenarioConfig) -> Result<Vec<f64>, CliError> {
    let Some(r_s) = cfg.r_s else {
        return optimize_row(cfg);
    };
    let params = &cfg.params;
    let n = cfg.n;
    match cfg.scheme {
        Scheme::SingleAdaptive => {
            let eta = cfg
                .eta
                .ok_or_else(|| CliError::validation("eta", "adaptive sweep needs a channel gain"))?;
            let design = AdaptiveSingleDesign::at_blocklength(params, n)?;
            let gamma_b = params.p_b * eta;
            let margin = (1.0 + gamma_b).log2() - design.r_e_star;
            let (r_s_used, t) = if eta <= design.mu_star || r_s > margin {
                (0.0, 0.0)
            } else {
                (r_s, r_s * p_success(gamma_b, n, r_s + design.r_e_star))
            };
            Ok(vec![design.mu_star, n as f64, r_s_used, design.r_e_star, 1.0, 1.0, t, 0.0, 0.0])
        }
        Scheme::SingleNonAdaptive => {
            let t = nonadaptive_throughput(params, r_s, n)?;
            let r_e = fblsec::leakage::invert_redundancy(
                params,
                1.0,
                n,
                params.delta,
                fblsec::LeakageModel::ExactQuadrature,
            )?;
            let mu = (2f64.powf(r_s + r_e) - 1.0) / params.p_b;
            Ok(vec![mu, n as f64, r_s, r_e, 1.0, 1.0, t, 0.0, 0.0])
        }
        Scheme::MultiAdaptive => {
            let eta = cfg
                .eta
                .ok_or_else(|| CliError::validation("eta", "adaptive sweep needs a channel gain"))?;
            let snapshot = ChannelSnapshot::new(eta);
            let phi = match cfg.phi {
                Some(phi) => Some(phi),
                None => adaptive_phi_opt(params, &snapshot, r_s)?,
            };
            match phi {
                Some(phi) => {
                    let rho = fblsec::leakage::rho_e(params, phi, params.delta)?;
                    let r_e = (1.0 + phi * rho).log2();
                    let t = r_s * ps_multi(params, &snapshot, phi, r_s, n)?;
                    let mu = fblsec::multi_opt::mu_star_multi(params)?;
                    Ok(vec![mu, n as f64, r_s, r_e, phi, 1.0, t, 0.0, 0.0])
                }
                // No split supports this rate on this realization.
                None => Ok(vec![f64::NAN, n as f64, 0.0, f64::NAN, f64::NAN, 1.0, 0.0, 0.0, 0.0]),
            }
        }
        Scheme::MultiNonAdaptive => {
            let phi = cfg.phi.ok_or_else(|| {
                CliError::validation("phi", "multi-nonadaptive sweep at fixed r_s needs phi")
            })?;
            let t = nonadaptive_throughput_multi(params, phi, r_s, n)?;
            let rho = fblsec::leakage::rho_e(params, phi, params.delta)?;
            let lambda_e = 1.0 + phi * rho;
            let mu = (2f64.powf(r_s) * lambda_e - 1.0) / (phi * params.p_b);
            Ok(vec![mu, n as f64, r_s, lambda_e.log2(), phi, 1.0, t, 0.0, 0.0])
        }
    }
}

pub fn cmd_sweep(cfg: &ScenarioConfig) -> Result<Table, CliError> {
    let Some(axis1) = cfg.sweep.clone() else {
        return Err(CliError::validation("sweep", "sweep needs at least one axis"));
    };
    let values1 = axis1.values();
    let values2 = cfg.sweep2.as_ref().map(|a| a.values());

    // Validate every grid point up front so no partial file is written.
    let mut points: Vec<(f64, Option<f64>)> = Vec::new();
    match &values2 {
        None => points.extend(values1.iter().map(|&v| (v, None))),
        Some(vs2) => {
            for &v1 in &values1 {
                for &v2 in vs2 {
                    points.push((v1, Some(v2)));
                }
            }
        }
    }
    let configured: Result<Vec<ScenarioConfig>, CliError> = points
        .iter()
        .map(|&(v1, v2)| {
            let mut point_cfg = cfg.clone();
            apply_axis(&mut point_cfg, &axis1.axis, v1)?;
            if let (Some(axis2), Some(v2)) = (cfg.sweep2.as_ref(), v2) {
                apply_axis(&mut point_cfg, &axis2.axis, v2)?;
            }
            Ok(point_cfg)
        })
        .collect();
    let configured = configured?;

    let rows: Result<Vec<Vec<f64>>, CliError> = configured
        .par_iter()
        .map(point_row)
        .collect();
    let rows = rows?;

    let mut header: Vec<&str> = vec![axis1.axis.as_str()];
    if let Some(axis2) = cfg.sweep2.as_ref() {
        header.push(axis2.axis.as_str());
    }
    // Keep optimizer columns that do not repeat an axis column.
    let keep: Vec<usize> = OPTIMIZE_HEADER
        .iter()
        .enumerate()
        .filter(|(_, name)| !header.contains(name))
        .map(|(i, _)| i)
        .collect();
    header.extend(keep.iter().map(|&i| OPTIMIZE_HEADER[i]));
    let mut table = Table::new(&header);
    for ((v1, v2), row) in points.into_iter().zip(rows) {
        let mut full = vec![v1];
        if let Some(v2) = v2 {
            full.push(v2);
        }
        full.extend(keep.iter().map(|&i| row[i]));
        table.push(full);
    }
    Ok(table)
}
