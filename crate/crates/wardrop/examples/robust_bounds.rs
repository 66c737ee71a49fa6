//! Robust incentive design: one affine mechanism must serve every
//! sensitivity in [s_l, s_u]. Below a budget threshold the subsidy design
//! wins; above it the toll design does, and the crossover has a closed form.

use wardrop::incentive::{affine_mechanism, opt_robust_subsidy_coeffs, opt_robust_toll_coeffs};
use wardrop::poa::{
    pigou_instance, poa_bound_prop3_toll, poa_bound_prop4_subsidy, poa_instance, thm5_crossover,
};
use wardrop::solver::SolverConfig;

fn main() -> wardrop::Result<()> {
    let cfg = SolverConfig::default();
    let (s_l, s_u) = (0.4, 2.5);

    let cross = thm5_crossover(s_l, s_u)?;
    println!(
        "sensitivities in [{s_l}, {s_u}] (product 1): crossover at β* = {:.6}",
        cross.beta_star
    );

    println!("\n{:>6} {:>12} {:>12}  winner", "β", "robust toll", "robust sub.");
    for k in 0..=8 {
        let beta = 0.1 + 0.7 * k as f64 / 8.0;
        let toll = poa_bound_prop3_toll(beta, s_l, s_u)?;
        let subsidy = poa_bound_prop4_subsidy(beta, s_l, s_u)?;
        let winner = if (toll - subsidy).abs() < 1e-9 {
            "tie"
        } else if toll < subsidy {
            "toll"
        } else {
            "subsidy"
        };
        println!("{beta:>6.3} {toll:>12.6} {subsidy:>12.6}  {winner}");
    }

    // The designs themselves are plain affine mechanisms; measure one side
    // of the crossover on a concrete network.
    let problem = pigou_instance(1)?;
    for beta in [0.25, 0.75] {
        let (toll_k1, toll_k2) = opt_robust_toll_coeffs(beta, s_l, s_u)?;
        let toll = affine_mechanism(toll_k1, toll_k2)?;
        let bound = poa_bound_prop3_toll(beta, s_l, s_u)?;
        let rt = poa_instance(&problem, Some(&toll), s_l, s_u, Some(bound), &cfg)?;

        let (sub_k1, sub_k2) = opt_robust_subsidy_coeffs(beta, s_l, s_u)?;
        let subsidy = affine_mechanism(sub_k1, sub_k2)?;
        let bound = poa_bound_prop4_subsidy(beta, s_l, s_u)?;
        let rs = poa_instance(&problem, Some(&subsidy), s_l, s_u, Some(bound), &cfg)?;

        println!(
            "\nβ = {beta} on {:?}: toll (slope {toll_k1:.3}) measures {:.6}, subsidy (offset {sub_k2:.3}) measures {:.6}",
            problem.id, rt.poa, rs.poa
        );
    }
    Ok(())
}
