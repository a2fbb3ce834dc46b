//! The `compute` and `optimize` commands: single rows of evaluator and
//! optimizer output for one scenario.

use fblsec::channel::{sinr_bob, AnAllocation, ChannelSnapshot};
use fblsec::leakage::{invert_redundancy, leakage, LeakageError};
use fblsec::multi_opt::{
    adaptive_expected_throughput_multi, ao_optimize, dl_dphi, nonadaptive_opt_multi,
    AO_DEFAULT_EPS,
};
use fblsec::single_opt::{
    adaptive_expected_throughput, conditional_rate_gradient, nonadaptive_opt, p_success,
    theta_b_optimality, AdaptiveSingleDesign,
};

use crate::config::{Scheme, ScenarioConfig};
use crate::error::CliError;
use crate::output::Table;

pub const COMPUTE_HEADER: [&str; 5] = ["gamma_b", "epsilon", "p_s", "oe", "throughput"];
pub const OPTIMIZE_HEADER: [&str; 9] =
    ["mu", "n", "r_s", "r_e", "phi", "alpha", "throughput", "iterations", "residual"];

/// Evaluate the fixed design named by the config: the legitimate receiver's
/// decoding error, the leakage probability, and the conditional throughput.
pub fn compute_row(cfg: &ScenarioConfig) -> Result<Vec<f64>, CliError> {
    let eta = cfg
        .eta
        .ok_or_else(|| CliError::validation("eta", "compute needs a channel gain"))?;
    let r_s = cfg
        .r_s
        .ok_or_else(|| CliError::validation("r_s", "compute needs a secrecy rate"))?;
    let phi = cfg.phi.unwrap_or(1.0);
    let alpha = cfg.alpha.unwrap_or(1.0);
    let r_e = match cfg.r_e {
        Some(v) => v,
        None => invert_redundancy(&cfg.params, phi, cfg.n, cfg.params.delta, cfg.leakage_model)?,
    };
    let snapshot = ChannelSnapshot::new(eta);
    let alloc = AnAllocation::new(phi, alpha);
    let gamma_b = sinr_bob(&cfg.params, &snapshot, &alloc);
    let p_s = p_success(gamma_b, cfg.n, r_s + r_e);
    let oe = leakage(&cfg.params, phi, cfg.n, r_e, cfg.leakage_model)?;
    Ok(vec![gamma_b, 1.0 - p_s, p_s, oe, r_s * p_s])
}

pub fn cmd_compute(cfg: &ScenarioConfig) -> Result<Table, CliError> {
    let mut table = Table::new(&COMPUTE_HEADER);
    table.push(compute_row(cfg)?);
    Ok(table)
}

/// One optimizer row: design variables, achieved throughput, and solver
/// diagnostics. Adaptive schemes without a channel gain report the expected
/// throughput over fading instead of a conditional design.
pub fn optimize_row(cfg: &ScenarioConfig) -> Result<Vec<f64>, CliError> {
    let params = &cfg.params;
    match cfg.scheme {
        Scheme::SingleAdaptive => {
            let design = AdaptiveSingleDesign::new(params)?;
            match cfg.eta {
                Some(eta) => {
                    let point = design.conditional_opt(params, &ChannelSnapshot::new(eta));
                    let residual = if point.throughput > 0.0 {
                        let gamma_b = params.p_b * eta;
                        let margin = (1.0 + gamma_b).log2() - design.r_e_star;
                        if point.r_s < margin - 1e-12 {
                            conditional_rate_gradient(gamma_b, design.n, point.r_s, design.r_e_star)
                                .abs()
                        } else {
                            0.0
                        }
                    } else {
                        0.0
                    };
                    Ok(vec![
                        point.mu,
                        point.n as f64,
                        point.r_s,
                        point.r_e,
                        point.phi,
                        point.alpha,
                        point.throughput,
                        0.0,
                        residual,
                    ])
                }
                None => {
                    let expected = adaptive_expected_throughput(params)?;
                    Ok(vec![
                        design.mu_star,
                        design.n as f64,
                        f64::NAN,
                        design.r_e_star,
                        1.0,
                        1.0,
                        expected,
                        0.0,
                        0.0,
                    ])
                }
            }
        }
        Scheme::SingleNonAdaptive => {
            let point = nonadaptive_opt(params)?;
            let theta = (2f64.powf(point.r_s + point.r_e) - 1.0).sqrt();
            let residual = theta_b_optimality(params, point.r_e, point.n, theta).abs();
            Ok(vec![
                point.mu,
                point.n as f64,
                point.r_s,
                point.r_e,
                point.phi,
                point.alpha,
                point.throughput,
                0.0,
                residual,
            ])
        }
        Scheme::MultiAdaptive => match cfg.eta {
            Some(eta) => {
                let snapshot = ChannelSnapshot::new(eta);
                let res = ao_optimize(params, &snapshot, AO_DEFAULT_EPS, 200)?;
                let d = &res.design;
                let residual = if d.throughput > 0.0 && d.phi < 1.0 - 1e-12 {
                    dl_dphi(params, &snapshot, d.phi, d.r_s)?.abs()
                } else {
                    0.0
                };
                Ok(vec![
                    d.mu,
                    d.n as f64,
                    d.r_s,
                    d.r_e,
                    d.phi,
                    d.alpha,
                    d.throughput,
                    (res.trace.len() - 1) as f64,
                    residual,
                ])
            }
            None => {
                let expected = adaptive_expected_throughput_multi(params)?;
                let mu = fblsec::multi_opt::mu_star_multi(params)?;
                Ok(vec![
                    mu,
                    params.n_max as f64,
                    f64::NAN,
                    f64::NAN,
                    f64::NAN,
                    1.0,
                    expected,
                    0.0,
                    0.0,
                ])
            }
        },
        Scheme::MultiNonAdaptive => {
            let res = nonadaptive_opt_multi(params)?;
            let d = &res.design;
            Ok(vec![
                d.mu,
                d.n as f64,
                d.r_s,
                d.r_e,
                d.phi,
                d.alpha,
                d.throughput,
                res.iterations as f64,
                res.dphi_residual.max(res.drs_residual),
            ])
        }
    }
}

pub fn cmd_optimize(cfg: &ScenarioConfig) -> Result<Table, CliError> {
    if cfg.params.delta <= 0.0 {
        return Err(CliError::Numeric(format!(
            "{}",
            LeakageError::InfeasibleDelta { delta: cfg.params.delta }
        )));
    }
    let mut table = Table::new(&OPTIMIZE_HEADER);
    table.push(optimize_row(cfg)?);
    Ok(table)
}
