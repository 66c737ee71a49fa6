//! End-to-end verification scenarios behind `cg verify`. Each scenario
//! recomputes a known outcome from scratch, so a failure message carries the
//! computed-vs-expected data needed to diagnose a regression on its own.

use std::fmt::Write as _;
use std::time::Instant;

use crate::incentive::{
    mc_toll, nes_subsidy, nominal_equivalent, opt_bounded_subsidy_affine, opt_bounded_toll_affine,
    scaled_mc_toll, Mechanism, SensitivityClass, SensitivityProfile,
};
use crate::latency::total_latency;
use crate::network::{PathSet, RoutingProblem};
use crate::poa::{
    fig1_instance, nes_equivalent_ratio, pigou_rate2, poa_bound_prop1_subsidy,
    poa_bound_prop1_toll, poa_bound_prop2_nes, poa_bound_prop2_smc, poa_bound_prop3_toll,
    poa_bound_prop4_subsidy, poa_instance, thm5_crossover, tight_subsidy_witness,
    tight_toll_witness,
};
use crate::solver::{
    nash_flow_heterogeneous, nash_flow_homogeneous, social_optimum, verify_equilibrium,
    SolverConfig,
};
use crate::{Error, Result};

fn fail(msg: String) -> Error {
    Error::Check(msg)
}

/// One named verification scenario.
pub struct Scenario {
    pub name: &'static str,
    pub what: &'static str,
    pub run: fn(&SolverConfig) -> Result<()>,
}

/// The scenarios `cg verify` runs, in order.
pub fn scenarios() -> Vec<Scenario> {
    vec![
        Scenario {
            name: "reference-instance",
            what: "optimum, untolled equilibrium, and marginal-cost toll on the two-commodity example",
            run: reference_instance,
        },
        Scenario {
            name: "two-population-regression",
            what: "marginal-cost toll and its subsidy-only equivalent under mixed sensitivities",
            run: two_population_regression,
        },
        Scenario {
            name: "budget-curves",
            what: "bounded-incentive guarantees: endpoints, subsidy dominance, near-tight instances",
            run: budget_curves,
        },
        Scenario {
            name: "heterogeneity-curves",
            what: "scaled marginal-cost toll vs its subsidy equivalent across sensitivity ranges",
            run: heterogeneity_curves,
        },
        Scenario {
            name: "crossover",
            what: "budget threshold where robust tolls overtake robust subsidies",
            run: crossover,
        },
    ]
}

fn close(what: &str, got: f64, want: f64, tol: f64) -> Result<()> {
    if (got - want).abs() <= tol {
        Ok(())
    } else {
        Err(fail(format!("{what}: computed {got:.6}, expected {want} ± {tol}")))
    }
}

fn strictly_less(what: &str, lo: f64, hi: f64) -> Result<()> {
    if lo < hi {
        Ok(())
    } else {
        Err(fail(format!("{what}: {lo:.9} is not below {hi:.9}")))
    }
}

fn flows_close(what: &str, got: &[f64], want: &[f64], tol: f64) -> Result<()> {
    let worst = got.iter().zip(want).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
    if got.len() == want.len() && worst <= tol {
        Ok(())
    } else {
        Err(fail(format!(
            "{what}: computed edge flows {}, expected {} ± {tol}",
            fmt_vec(got),
            fmt_vec(want)
        )))
    }
}

fn fmt_vec(v: &[f64]) -> String {
    let mut s = String::from("(");
    for (i, x) in v.iter().enumerate() {
        if i > 0 {
            s.push_str(", ");
        }
        let _ = write!(s, "{x:.4}");
    }
    s.push(')');
    s
}

fn deadline(start: Instant, budget: f64, what: &str) -> Result<()> {
    let dt = start.elapsed().as_secs_f64();
    if dt < budget {
        Ok(())
    } else {
        Err(fail(format!("{what} took {dt:.1} s, budget {budget} s")))
    }
}

fn reference_instance(cfg: &SolverConfig) -> Result<()> {
    let start = Instant::now();
    let problem = fig1_instance();
    let paths = problem.enumerate_paths(cfg.path_count_cap)?;
    let opt = social_optimum(&problem, &paths, cfg)?;
    if !opt.converged {
        return Err(fail("optimum solve did not converge".into()));
    }
    let l_opt = total_latency(&problem, &opt.flow)?;
    close("optimal latency", l_opt, 0.683, 0.005)?;

    let nash = nash_flow_homogeneous(&problem, &paths, None, cfg)?;
    if !nash.converged {
        return Err(fail("untolled equilibrium did not converge".into()));
    }
    flows_close("untolled equilibrium", &nash.flow.edge_flows, &[0.5, 0.0, 0.0, 0.5, 0.0], 0.01)?;
    close("untolled inefficiency", total_latency(&problem, &nash.flow)? / l_opt, 1.465, 0.01)?;

    let toll = mc_toll();
    let tolled = nash_flow_homogeneous(&problem, &paths, Some(&toll), cfg)?;
    if !tolled.converged {
        return Err(fail("marginal-cost equilibrium did not converge".into()));
    }
    close(
        "marginal-cost inefficiency",
        total_latency(&problem, &tolled.flow)? / l_opt,
        1.0,
        0.005,
    )?;
    deadline(start, 5.0, "reference-instance")
}

fn two_population_regression(cfg: &SolverConfig) -> Result<()> {
    let start = Instant::now();
    let problem = fig1_instance();
    let paths = problem.enumerate_paths(cfg.path_count_cap)?;
    // First commodity priced at twice the nominal rate, second at half.
    let profile = SensitivityProfile::new(
        vec![
            vec![SensitivityClass { fraction: 1.0, sensitivity: 2.0 }],
            vec![SensitivityClass { fraction: 1.0, sensitivity: 0.5 }],
        ],
        0.5,
        2.0,
    )?;
    let opt = social_optimum(&problem, &paths, cfg)?;
    let l_opt = total_latency(&problem, &opt.flow)?;

    let toll = mc_toll();
    let (flows, ratio) = settled(&problem, &paths, &toll, &profile, l_opt, cfg)?;
    flows_close("marginal-cost equilibrium", &flows, &[0.224, 0.276, 0.167, 0.333, 0.443], 0.01)?;
    close("marginal-cost inefficiency", ratio, 1.04, 0.01)?;

    let subsidy = nominal_equivalent(mc_toll(), 1.0 / 3.0)?;
    let (flows, ratio) = settled(&problem, &paths, &subsidy, &profile, l_opt, cfg)?;
    flows_close(
        "subsidy-equivalent equilibrium",
        &flows,
        &[0.0, 0.5, 0.137, 0.363, 0.637],
        0.01,
    )?;
    close("subsidy-equivalent inefficiency", ratio, 1.32, 0.01)?;
    deadline(start, 10.0, "two-population-regression")
}

/// Converged, equilibrium-checked flow and its latency ratio to the optimum.
fn settled(
    problem: &RoutingProblem,
    paths: &PathSet,
    mechanism: &Mechanism,
    profile: &SensitivityProfile,
    l_opt: f64,
    cfg: &SolverConfig,
) -> Result<(Vec<f64>, f64)> {
    let eq = nash_flow_heterogeneous(problem, paths, Some(mechanism), profile, cfg)?;
    if !eq.converged {
        return Err(fail(format!("equilibrium solve stalled at residual {:.2e}", eq.residual)));
    }
    let check = verify_equilibrium(problem, paths, Some(mechanism), profile, &eq.flow, 1e-6)?;
    if !check.ok {
        return Err(fail(format!(
            "flow failed the equilibrium check (gap {:.2e})",
            check.worst_gap
        )));
    }
    Ok((eq.flow.edge_flows.clone(), total_latency(problem, &eq.flow)? / l_opt))
}

fn budget_curves(cfg: &SolverConfig) -> Result<()> {
    close("toll guarantee at zero budget", poa_bound_prop1_toll(0.0)?, 4.0 / 3.0, 1e-12)?;
    close("toll guarantee at unit budget", poa_bound_prop1_toll(1.0)?, 1.0, 1e-12)?;
    close("subsidy guarantee at zero budget", poa_bound_prop1_subsidy(0.0)?, 4.0 / 3.0, 1e-12)?;
    close("subsidy guarantee at half budget", poa_bound_prop1_subsidy(0.5)?, 1.0, 1e-12)?;
    for k in 1..=101 {
        let beta = k as f64 / 102.0;
        strictly_less(
            &format!("dominance at budget {beta:.4}"),
            poa_bound_prop1_subsidy(beta)?,
            poa_bound_prop1_toll(beta)?,
        )?;
    }
    for &beta in &[0.1, 0.5, 0.9] {
        let witness = tight_toll_witness(beta)?;
        let bound = poa_bound_prop1_toll(beta)?;
        let mech = opt_bounded_toll_affine(beta)?;
        let report = poa_instance(&witness, Some(&mech), 1.0, 1.0, Some(bound), cfg)?;
        in_band(&format!("toll witness at budget {beta}"), report.poa, bound, report.converged)?;
    }
    for &beta in &[0.1, 0.3, 0.45] {
        let witness = tight_subsidy_witness(beta)?;
        let bound = poa_bound_prop1_subsidy(beta)?;
        let mech = opt_bounded_subsidy_affine(beta)?;
        let report = poa_instance(&witness, Some(&mech), 1.0, 1.0, Some(bound), cfg)?;
        in_band(&format!("subsidy witness at budget {beta}"), report.poa, bound, report.converged)?;
    }
    Ok(())
}

fn in_band(what: &str, poa: f64, bound: f64, converged: bool) -> Result<()> {
    if !converged {
        Err(fail(format!("{what}: solver stalled")))
    } else if poa <= bound + 1e-3 && poa >= bound - 2e-2 {
        Ok(())
    } else {
        Err(fail(format!(
            "{what}: ratio {poa:.6} outside [{:.6}, {:.6}]",
            bound - 2e-2,
            bound + 1e-3
        )))
    }
}

fn heterogeneity_curves(cfg: &SolverConfig) -> Result<()> {
    let problem = pigou_rate2();
    for &q in &[1.0, 0.5, 0.25, 1.0 / 9.0] {
        let smc = poa_bound_prop2_smc(q)?;
        let nes = poa_bound_prop2_nes(q, 1.0)?;
        let q_hat = nes_equivalent_ratio(q, 1.0)?;
        if q == 1.0 {
            close("equivalent ratio at q = 1", q_hat, 1.0, 1e-9)?;
            close("scaled-toll guarantee at q = 1", smc, 1.0, 1e-9)?;
            close("subsidy-equivalent guarantee at q = 1", nes, 1.0, 1e-9)?;
        } else {
            strictly_less(&format!("ratio widening at q = {q:.4}"), q_hat, q)?;
            strictly_less(&format!("guarantee ordering at q = {q:.4}"), smc, nes)?;
        }
        let pairs =
            [("scaled toll", scaled_mc_toll(q, 1.0)?, smc), ("subsidy", nes_subsidy(q, 1.0)?, nes)];
        for (label, mechanism, bound) in pairs {
            let report = poa_instance(&problem, Some(&mechanism), q, 1.0, Some(bound), cfg)?;
            if !report.converged {
                return Err(fail(format!("{label} at q = {q:.4}: solver stalled")));
            }
            if report.poa > bound + 1e-3 {
                return Err(fail(format!(
                    "{label} at q = {q:.4}: ratio {:.6} exceeds guarantee {bound:.6} + 1e-3",
                    report.poa
                )));
            }
        }
    }
    Ok(())
}

fn crossover(_cfg: &SolverConfig) -> Result<()> {
    for &s_u in &[1.5, 2.0, 4.0] {
        let s_l = 1.0 / s_u;
        let cross = thm5_crossover(s_l, s_u)?;
        let both = |beta: f64| -> Result<(f64, f64)> {
            Ok((poa_bound_prop3_toll(beta, s_l, s_u)?, poa_bound_prop4_subsidy(beta, s_l, s_u)?))
        };
        let (toll, subsidy) = both(cross.beta_star)?;
        close(&format!("crossover equality at range {s_u}"), toll - subsidy, 0.0, 1e-9)?;
        for k in 1..=50 {
            let below = cross.beta_star * k as f64 / 51.0;
            let (t, s) = both(below)?;
            strictly_less(&format!("subsidy lead at budget {below:.4}, range {s_u}"), s, t)?;
            let above = cross.beta_star * (1.0 + k as f64 / 50.0);
            let (t, s) = both(above)?;
            strictly_less(&format!("toll lead at budget {above:.4}, range {s_u}"), t, s)?;
        }
    }
    Ok(())
}
