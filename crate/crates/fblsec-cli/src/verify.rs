//! The `verify` command: re-runs the library's invariant families and oracle
//! comparisons and reports one machine-readable line per check.
//!
//! `quick` covers every deterministic invariant plus reduced-size sampling
//! checks; `full` adds the Monte-Carlo comparisons at their default sample
//! sizes. All randomness derives from the `--seed` argument.

use fblsec::channel::{cdf_gamma_e, pdf_gamma_e, ChannelSnapshot, SystemParams};
use fblsec::leakage::{
    drho_e_dphi, invert_redundancy, lambda_cap, leakage_asymptotic, leakage_exact,
    leakage_piecewise, rho_e, LeakageModel,
};
use fblsec::multi_opt::{
    adaptive_phi_opt, ao_optimize, dl_dphi, high_snr_approx, l_function, nonadaptive_opt_multi,
    ps_multi, AO_DEFAULT_EPS,
};
use fblsec::oracle::{
    grid_search_1d, mc_cdf_mmse_sinr, mc_leakage, mc_throughput, ThroughputScheme,
};
use fblsec::single_opt::{
    adaptive_expected_throughput, nonadaptive_opt, nonadaptive_rs_approx,
    nonadaptive_throughput_with_re, p_success, AdaptiveSingleDesign,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Level {
    Quick,
    Full,
}

pub struct Check {
    pub name: &'static str,
    pub value: f64,
    pub bound: f64,
    pub pass: bool,
}

fn le(name: &'static str, value: f64, bound: f64) -> Check {
    Check { name, value, bound, pass: value <= bound }
}

fn db(x: f64) -> f64 {
    10f64.powf(x / 10.0)
}

fn run_checks(level: Level, seed: u64) -> Result<Vec<Check>, CliError> {
    let mut checks: Vec<Check> = Vec::new();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);

    // Scalar kernels.
    {
        let mut worst: f64 = 0.0;
        let mut x = -5.0;
        while x <= 5.0 {
            let p = fblsec::specfun::q_function(x)?;
            worst = worst.max((fblsec::specfun::q_inverse(p)? - x).abs());
            x += 0.25;
        }
        checks.push(le("q_inverse_round_trip", worst, 1e-10));

        let mut worst: f64 = 0.0;
        for i in 0..60 {
            let x = 10f64.powf(-3.0 + 9.0 * i as f64 / 59.0);
            let w = fblsec::specfun::lambert_w0(x)?;
            worst = worst.max((w * w.exp() - x).abs() / x);
        }
        checks.push(le("lambert_w_identity", worst, 1e-10));
    }

    // Fading laws: density consistency with the CDF.
    {
        let p = SystemParams::new(4, 1.0, 4.0, 1.0, 1.0, 0.2, 500).unwrap();
        let mut worst: f64 = 0.0;
        for &phi in &[0.3, 0.7] {
            for &g in &[0.1, 1.0, 5.0] {
                let h = 1e-5;
                let fd = (cdf_gamma_e(&p, phi, g + h) - cdf_gamma_e(&p, phi, g - h)) / (2.0 * h);
                let pd = pdf_gamma_e(&p, phi, g);
                worst = worst.max((fd - pd).abs() / pd);
            }
        }
        checks.push(le("cdf_pdf_consistency", worst, 1e-4));
    }

    // Redundancy decreasing in blocklength.
    {
        let p = SystemParams::new(1, 1.0, 1.0, 1.0, 1.0, 0.2, 2000).unwrap();
        let mut prev = f64::INFINITY;
        let mut min_drop = f64::INFINITY;
        for &n in &[100usize, 500, 2000] {
            let re = invert_redundancy(&p, 1.0, n, 0.2, LeakageModel::ExactQuadrature)?;
            min_drop = min_drop.min(prev - re);
            prev = re;
        }
        checks.push(Check {
            name: "redundancy_decreasing_in_n",
            value: min_drop,
            bound: 1e-8,
            pass: min_drop > 1e-8,
        });
    }

    // Cross-model leakage agreement.
    {
        let p = SystemParams::new(1, 1.0, 1.0, 1.0, 1.0, 0.2, 2000).unwrap();
        let mut worst: f64 = 0.0;
        for &n in &[200usize, 2000] {
            for i in 0..8 {
                let r_e = 0.5 + 0.5 * i as f64;
                let gap =
                    (leakage_exact(&p, 1.0, n, r_e)? - leakage_piecewise(&p, 1.0, n, r_e)?).abs();
                worst = worst.max(gap);
            }
        }
        checks.push(le("piecewise_vs_exact_leakage", worst, 0.02));

        let p = SystemParams::new(4, 1.0, 1.0, 1.0, 1.0, 0.2, 500).unwrap();
        let mut worst: f64 = 0.0;
        for i in 0..10 {
            let phi = 0.05 + 0.1 * i as f64;
            for &phi_e in &[0.5, 1.0, 2.0] {
                let gap = (leakage_asymptotic(&p, phi, phi_e)?
                    - leakage_exact(&p, phi, 500, (1.0 + phi_e).log2())?)
                .abs();
                worst = worst.max(gap);
            }
        }
        checks.push(le("asymptotic_vs_exact_leakage", worst, 0.02));
    }

    // Concavity of the conditional throughput in the secrecy rate.
    {
        let p = SystemParams::new(1, 1.0, 1.0, 1.0, 1.0, 0.2, 500).unwrap();
        let design = AdaptiveSingleDesign::new(&p)?;
        let mut worst = f64::NEG_INFINITY;
        for &eta_db in &[3.0, 9.0] {
            let gamma_b = db(eta_db);
            let margin = (1.0 + gamma_b).log2() - design.r_e_star;
            let t = |r: f64| r * p_success(gamma_b, 500, r + design.r_e_star);
            let step = margin / 300.0;
            for i in 1..299 {
                let r = i as f64 * step;
                worst = worst.max(t(r + step) - 2.0 * t(r) + t(r - step));
            }
        }
        checks.push(le("conditional_throughput_concavity", worst, 1e-9));
    }

    // Optimizers against grid oracles.
    {
        let p = SystemParams::new(1, 1.0, 1.0, 1.0, 1.0, 0.2, 500).unwrap();
        let design = AdaptiveSingleDesign::new(&p)?;
        let snap = ChannelSnapshot::new(db(9.0));
        let point = design.conditional_opt(&p, &snap);
        let gamma_b = p.p_b * snap.eta;
        let margin = (1.0 + gamma_b).log2() - design.r_e_star;
        let (_, t_grid) = grid_search_1d(
            |r| r * p_success(gamma_b, 500, r + design.r_e_star),
            1e-6,
            margin,
            3000,
        );
        checks.push(le("adaptive_rate_vs_grid", t_grid - point.throughput, 1e-4));

        let p = SystemParams::new(1, 1.0, 1.0, db(3.0), 1.0, 0.2, 500).unwrap();
        let opt = nonadaptive_opt(&p)?;
        let (_, t_grid) = grid_search_1d(
            |r| nonadaptive_throughput_with_re(&p, r, 500, opt.r_e),
            1e-3,
            6.0,
            6000,
        );
        checks.push(le("nonadaptive_rate_vs_grid", t_grid - opt.throughput, 1e-4));

        let p = SystemParams::new(4, 1.0, 1.0, 1.0, 1.0, 0.2, 500).unwrap();
        let snap = ChannelSnapshot::new(db(10.0));
        let r_s = 1.9;
        let phi = adaptive_phi_opt(&p, &snap, r_s)?.unwrap();
        let t_star = r_s * ps_multi(&p, &snap, phi, r_s, 500)?;
        let (_, t_grid) =
            grid_search_1d(|c| r_s * ps_multi(&p, &snap, c, r_s, 500).unwrap(), 1e-3, 0.999, 998);
        checks.push(le("an_split_vs_grid", t_grid - t_star, 1e-4));
    }

    // Alternating optimization: monotone trace, convergence.
    {
        let p = SystemParams::new(4, 1.0, 1.0, 1.0, 1.0, 0.2, 500).unwrap();
        let mut worst_drop: f64 = 0.0;
        let mut all_converged = true;
        for _ in 0..5 {
            let eta = db(6.0 + 8.0 * rng.random::<f64>());
            let res = ao_optimize(&p, &ChannelSnapshot::new(eta), AO_DEFAULT_EPS, 100)?;
            all_converged &= res.converged;
            for w in res.trace.windows(2) {
                worst_drop = worst_drop.max(w[0].throughput - w[1].throughput);
            }
        }
        checks.push(Check {
            name: "ao_trace_monotone_and_converged",
            value: worst_drop,
            bound: 1e-9,
            pass: worst_drop <= 1e-9 && all_converged,
        });
    }

    // Worst-case split limits.
    {
        let p = SystemParams::new(4, 1.0, 1.0, 1.0, 1.0, 0.2, 500)
            .unwrap()
            .with_worst_case_eve(true);
        let lambda = lambda_cap(4, 0.2);
        let phi = adaptive_phi_opt(&p, &ChannelSnapshot::new(1e6), 1.0)?.unwrap();
        checks.push(le(
            "worst_case_split_eta_limit",
            (phi - 1.0 / (lambda.sqrt() + 1.0)).abs(),
            1e-3,
        ));
        let mut pd = p.clone();
        pd.delta = 1.0 - 1e-8;
        let phi = adaptive_phi_opt(&pd, &ChannelSnapshot::new(db(10.0)), 1.0)?.unwrap();
        checks.push(le("worst_case_split_delta_limit", 1.0 - phi, 1e-3));
    }

    // Closed-form asymptotics.
    {
        let p = SystemParams::new(1, 1.0, 1.0, db(20.0), 1.0, 0.2, 500).unwrap();
        let opt = nonadaptive_opt(&p)?;
        let approx = nonadaptive_rs_approx(&p)?;
        let t_approx = nonadaptive_throughput_with_re(&p, approx.lambert_form, 500, opt.r_e);
        checks.push(le("rate_approx_throughput_loss", 1.0 - t_approx / opt.throughput, 0.01));

        let p = SystemParams::new(4, 1.0, 1.0, db(40.0), 1.0, 0.2, 500)
            .unwrap()
            .with_worst_case_eve(true);
        let hs = high_snr_approx(&p)?;
        let res = nonadaptive_opt_multi(&p)?;
        checks.push(le("high_snr_split_gap", (res.design.phi - hs.phi_star).abs(), 1e-3));
    }

    // Analytic derivatives against finite differences.
    {
        let p = SystemParams::new(4, 1.0, 1.0, 1.0, 1.0, 0.2, 500).unwrap();
        let snap = ChannelSnapshot::new(db(10.0));
        let mut worst: f64 = 0.0;
        for _ in 0..10 {
            let phi = 0.1 + 0.8 * rng.random::<f64>();
            let r_s = 0.2 + 1.2 * rng.random::<f64>();
            let h = 1e-6;
            let fd = (l_function(&p, &snap, phi + h, r_s)? - l_function(&p, &snap, phi - h, r_s)?)
                / (2.0 * h);
            let an = dl_dphi(&p, &snap, phi, r_s)?;
            worst = worst.max((fd - an).abs() / an.abs().max(1e-9));
            let fd = (rho_e(&p, phi + h, 0.2)? - rho_e(&p, phi - h, 0.2)?) / (2.0 * h);
            let an = drho_e_dphi(&p, phi, 0.2)?;
            worst = worst.max((fd - an).abs() / an.abs().max(1e-9));
        }
        checks.push(le("derivative_audit", worst, 1e-5));
    }

    // Sampling comparisons; reduced sizes in quick mode.
    let (leak_samples, thr_samples) = match level {
        Level::Quick => (20_000, 20_000),
        Level::Full => (1_000_000, 100_000),
    };
    {
        let p = SystemParams::new(1, 1.0, 1.0, 1.0, 1.0, 0.2, 500).unwrap();
        let analytic = leakage_exact(&p, 1.0, 500, 1.0)?;
        let est = mc_leakage(&p, 1.0, 500, 1.0, leak_samples, seed ^ 0xA5A5);
        checks.push(le(
            "mc_leakage_sigma_distance",
            (est.mean - analytic).abs() / est.stderr.max(1e-12),
            3.5,
        ));
    }
    {
        let p = SystemParams::new(1, 1.0, 1.0, db(3.0), 1.0, 0.2, 500).unwrap();
        let opt = nonadaptive_opt(&p)?;
        let est =
            mc_throughput(&p, &opt, ThroughputScheme::NonAdaptive, thr_samples, seed ^ 0x5A5A)?;
        checks.push(le(
            "mc_nonadaptive_throughput_gap",
            (est.mean - opt.throughput).abs(),
            3.0 * est.stderr + 0.02,
        ));
    }

    if level == Level::Full {
        // Expected adaptive throughput vs per-sample re-solving.
        let p = SystemParams::new(1, 1.0, 1.0, db(3.0), 1.0, 0.2, 500).unwrap();
        let analytic = adaptive_expected_throughput(&p)?;
        let design = AdaptiveSingleDesign::new(&p)?;
        let dp = fblsec::DesignPoint {
            mu: design.mu_star,
            n: 500,
            r_s: f64::NAN,
            r_e: design.r_e_star,
            phi: 1.0,
            alpha: 1.0,
            throughput: analytic,
        };
        let est = mc_throughput(&p, &dp, ThroughputScheme::Adaptive, 100_000, seed ^ 0x1111)?;
        checks.push(le(
            "mc_adaptive_expected_sigma_distance",
            (est.mean - analytic).abs() / est.stderr.max(1e-12),
            3.5,
        ));

        // MMSE-receiver law at a point.
        let p = SystemParams::new(4, 1.0, 1.0, 1.0, 1.0, 0.2, 500)
            .unwrap()
            .with_eve_antennas(2);
        let analytic = fblsec::channel::cdf_gamma_e_multi(&p, 0.5, 1.0);
        let est = mc_cdf_mmse_sinr(&p, 0.5, 1.0, 400_000, seed ^ 0x2222);
        checks.push(le(
            "mc_mmse_cdf_sigma_distance",
            (est.mean - analytic).abs() / est.stderr.max(1e-12),
            3.5,
        ));

        // Noise-free eavesdropper diagnostic.
        let p = SystemParams::new(4, 1.0, 1e12, 1.0, 1.0, 0.2, 500)
            .unwrap()
            .with_eve_antennas(4);
        let mut worst: f64 = 0.0;
        let mut r_e = 0.1;
        while r_e <= 10.0 {
            worst = worst.max(1.0 - fblsec::leakage::leakage_multi_eve(&p, 0.5, 500, r_e)?);
            r_e += 0.5;
        }
        checks.push(le("noise_free_eve_leakage_deficit", worst, 1e-6));
    }

    Ok(checks)
}

pub fn cmd_verify(level: Level, seed: u64) -> Result<(), CliError> {
    let checks = run_checks(level, seed)?;
    let mut failed = 0;
    for c in &checks {
        let status = if c.pass { "PASS" } else { "FAIL" };
        println!("{status} {} value={:e} bound={:e}", c.name, c.value, c.bound);
        if !c.pass {
            failed += 1;
        }
    }
    let label = match level {
        Level::Quick => "quick",
        Level::Full => "full",
    };
    if failed > 0 {
        println!("VERIFY FAIL level={label} seed={seed}: {failed}/{} checks failed", checks.len());
        return Err(CliError::VerificationFailed { failed, total: checks.len() });
    }
    println!("VERIFY PASS level={label} seed={seed}: {}/{} checks", checks.len(), checks.len());
    Ok(())
}
