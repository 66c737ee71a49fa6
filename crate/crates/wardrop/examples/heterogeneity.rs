//! Populations that weigh money differently: how much a toll designed for
//! the full sensitivity range guarantees, what its subsidy-only equivalent
//! gives up in exchange for never charging anyone, and the change of
//! variables that makes rescaled incentives exact.

use wardrop::incentive::{
    mc_toll, nes_subsidy, nominal_equivalent, pushforward_cost_scale, scaled_mc_toll,
    sensitivity_pushforward, SensitivityProfile,
};
use wardrop::poa::{
    nes_equivalent_ratio, pigou_rate2, poa_bound_prop2_nes, poa_bound_prop2_smc, poa_instance,
};
use wardrop::solver::{nash_flow_heterogeneous, verify_equilibrium, SolverConfig};

fn main() -> wardrop::Result<()> {
    let cfg = SolverConfig::default();

    // The toll's guarantee depends only on the spread q = s_l/s_u. Its
    // subsidy-only equivalent behaves like a *wider* spread — the effective
    // ratio shrinks, and with it the guarantee — but charges no one.
    println!("worst-case guarantee over a sensitivity spread q = s_l/s_u:");
    println!("{:>8} {:>12} {:>12} {:>10}", "q", "scaled toll", "subsidy eq.", "eff. q");
    for (s_l, s_u) in [(1.0, 1.0), (1.0, 2.0), (1.0, 4.0), (1.0, 9.0)] {
        let q = s_l / s_u;
        println!(
            "{q:>8.4} {:>12.6} {:>12.6} {:>10.4}",
            poa_bound_prop2_smc(q)?,
            poa_bound_prop2_nes(s_l, s_u)?,
            nes_equivalent_ratio(s_l, s_u)?
        );
    }

    let problem = pigou_rate2();
    let (s_l, s_u) = (0.5, 1.0);
    for (label, mech, bound) in [
        ("scaled marginal-cost toll", scaled_mc_toll(s_l, s_u)?, poa_bound_prop2_smc(s_l / s_u)?),
        ("subsidy-only equivalent", nes_subsidy(s_l, s_u)?, poa_bound_prop2_nes(s_l, s_u)?),
    ] {
        let report = poa_instance(&problem, Some(&mech), s_l, s_u, Some(bound), &cfg)?;
        println!(
            "\n{label} on {:?}, s ∈ [{s_l}, {s_u}]: measured {:.6}, guaranteed {:.6}",
            problem.id, report.poa, bound
        );
    }

    // Rescaling a mechanism by λ (money side) is exactly a change of
    // variables on sensitivities: class s behaves like class ŝ with its
    // costs scaled by a positive factor, so equilibria carry over.
    let lambda = 2.0;
    let profile = SensitivityProfile::two_class(1, 0.5, 1.5, 0.5)?;
    let paths = problem.enumerate_paths(cfg.path_count_cap)?;
    let mech = mc_toll();
    let eq = nash_flow_heterogeneous(&problem, &paths, Some(&mech), &profile, &cfg)?;
    let scaled = nominal_equivalent(mech, lambda)?;
    let pushed = profile.pushforward(lambda)?;
    let report = verify_equilibrium(&problem, &paths, Some(&scaled), &pushed, &eq.flow, 4.0 * cfg.epsilon)?;
    println!("\nrescaling the toll by λ = {lambda}:");
    for s in [0.5, 1.5] {
        println!(
            "  class {s} ↦ {:.4} (costs ×{:.4})",
            sensitivity_pushforward(s, lambda)?,
            pushforward_cost_scale(s, lambda)?
        );
    }
    println!(
        "  original equilibrium still verifies under the pushed profile: {} (gap {:.1e})",
        report.ok, report.worst_gap
    );
    Ok(())
}
