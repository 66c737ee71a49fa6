//! Tour of the reference two-commodity network: social optimum, the
//! untolled equilibrium it loses to, and the marginal-cost toll that
//! recovers it.

use wardrop::incentive::{mc_toll, SensitivityProfile};
use wardrop::latency::total_latency;
use wardrop::poa::fig1_instance;
use wardrop::solver::{
    nash_flow_homogeneous, social_optimum, verify_equilibrium, SolverConfig,
};

fn main() -> wardrop::Result<()> {
    let cfg = SolverConfig::default();
    let problem = fig1_instance();
    let paths = problem.enumerate_paths(cfg.path_count_cap)?;

    println!("instance {:?}", problem.id);
    for (od, od_paths) in paths.path_ids(&problem).iter().enumerate() {
        let rate = problem.od_pairs[od].rate;
        println!("  commodity {od} (rate {rate}):");
        for p in od_paths {
            println!("    {}", p.join(" → "));
        }
    }

    let opt = social_optimum(&problem, &paths, &cfg)?;
    let l_opt = total_latency(&problem, &opt.flow)?;
    println!("\nsocial optimum: average latency {l_opt:.6}");

    let eq = nash_flow_homogeneous(&problem, &paths, None, &cfg)?;
    let l_nash = total_latency(&problem, &eq.flow)?;
    println!("untolled equilibrium (iterations: {}, residual {:.1e}):", eq.iterations, eq.residual);
    for (e, f) in problem.edges.iter().zip(&eq.flow.edge_flows) {
        println!("  {}: {f:.4}", e.id);
    }
    println!("  average latency {l_nash:.6}, inefficiency ×{:.4}", l_nash / l_opt);

    // Selfish users ignore the congestion they impose on others; charging
    // each edge f·ℓ'(f) makes them face it.
    let mech = mc_toll();
    let eq = nash_flow_homogeneous(&problem, &paths, Some(&mech), &cfg)?;
    let l_tolled = total_latency(&problem, &eq.flow)?;
    println!("\nwith the marginal-cost toll: average latency {l_tolled:.6} (×{:.4})", l_tolled / l_opt);

    let profile = SensitivityProfile::homogeneous(problem.od_pairs.len(), 1.0)?;
    let report = verify_equilibrium(&problem, &paths, Some(&mech), &profile, &eq.flow, cfg.epsilon)?;
    println!("equilibrium verified: {} (worst path-cost gap {:.1e})", report.ok, report.worst_gap);
    Ok(())
}
