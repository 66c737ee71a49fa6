//! Budget-bounded incentives on affine networks: what a toll capped at
//! β·latency guarantees, why the matching subsidy guarantees more, and how
//! close real instances get to the curves.

use wardrop::incentive::{
    check_bound, opt_bounded_subsidy_affine, opt_bounded_toll_affine, BoundCheck, SignClass,
};
use wardrop::poa::{
    poa_bound_prop1_subsidy, poa_bound_prop1_toll, poa_instance, tight_subsidy_witness,
    tight_toll_witness,
};
use wardrop::solver::SolverConfig;

fn main() -> wardrop::Result<()> {
    let cfg = SolverConfig::default();

    println!("guaranteed worst-case inefficiency under a budget β:");
    println!("{:>6} {:>10} {:>10}", "β", "toll", "subsidy");
    for k in 0..=4 {
        let beta = k as f64 / 4.0;
        println!(
            "{beta:>6.2} {:>10.6} {:>10.6}",
            poa_bound_prop1_toll(beta)?,
            poa_bound_prop1_subsidy(beta)?
        );
    }
    println!("(β = 0 is the bare 4/3; tolls need β = 1 to reach 1, subsidies only β = 1/2)");

    // Two-link instances chosen so the cap binds: measured inefficiency
    // tracks the guarantee.
    println!("\nnear-tight instances, measured vs guaranteed:");
    for beta in [0.2, 0.4] {
        let toll = opt_bounded_toll_affine(beta)?;
        let problem = tight_toll_witness(beta)?;
        let bound = poa_bound_prop1_toll(beta)?;
        let report = poa_instance(&problem, Some(&toll), 1.0, 1.0, Some(bound), &cfg)?;
        println!("  toll    β = {beta}: measured {:.6}, guaranteed {:.6}", report.poa, bound);

        let subsidy = opt_bounded_subsidy_affine(beta)?;
        let problem = tight_subsidy_witness(beta)?;
        let bound = poa_bound_prop1_subsidy(beta)?;
        let report = poa_instance(&problem, Some(&subsidy), 1.0, 1.0, Some(bound), &cfg)?;
        println!("  subsidy β = {beta}: measured {:.6}, guaranteed {:.6}", report.poa, bound);
    }

    // The cap is audited pointwise, not assumed.
    let problem = tight_toll_witness(0.5)?;
    let toll = opt_bounded_toll_affine(0.5)?;
    match check_bound(&toll, &problem, 0.5, SignClass::Toll)? {
        BoundCheck::Ok { tight } => println!("\nβ = 0.5 toll respects its cap (tight: {tight})"),
        BoundCheck::Violated { edge, flow, incentive, bound, .. } => println!(
            "\nβ = 0.5 toll breaks its cap on {edge} at flow {flow:.4}: |{incentive:.4}| > {bound:.4}"
        ),
    }
    match check_bound(&toll, &problem, 0.25, SignClass::Toll)? {
        BoundCheck::Ok { .. } => println!("…and sneaks under a β = 0.25 audit (unexpected)"),
        BoundCheck::Violated { edge, flow, incentive, bound, .. } => println!(
            "audited against β = 0.25 it fails on {edge} at flow {flow:.4}: |{incentive:.4}| > {bound:.4}"
        ),
    }
    Ok(())
}
