//! Finite-player congestion games on shared resources: optimal incentive
//! design via a smoothness linear program, plus exhaustive pure-equilibrium
//! analysis for small games.

use serde::{Deserialize, Serialize};

use crate::incentive::SignClass;
use crate::latency::LatencyFn;
use crate::simplex::{LpProblem, LpSolution, LpStatus, Sense};
use crate::{invalid, Error, Result};

pub const DEFAULT_PIVOT_CAP: usize = 1_000_000;
pub const DEFAULT_PROFILE_CAP: usize = 1_000_000;

/// Resource cost sampled at integer loads 0..=n, with ℓ(0) = 0 by convention.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiscreteLatency {
    pub values: Vec<f64>,
}

impl DiscreteLatency {
    pub fn new(values: Vec<f64>) -> Result<DiscreteLatency> {
        if values.len() < 2 {
            return Err(invalid("discrete latency needs values at loads 0..=n with n ≥ 1"));
        }
        if values[0] != 0.0 {
            return Err(invalid("discrete latency must have ℓ(0) = 0"));
        }
        for (x, v) in values.iter().enumerate() {
            if !v.is_finite() || *v < 0.0 {
                return Err(invalid(format!(
                    "discrete latency must be finite and ≥ 0 (ℓ({x}) = {v})"
                )));
            }
        }
        Ok(DiscreteLatency { values })
    }

    /// Samples a continuous latency at integer loads; ℓ(0) is forced to 0 so
    /// constant terms follow the load-0 convention.
    pub fn from_latency(l: &LatencyFn, n: usize) -> Result<DiscreteLatency> {
        l.validate()?;
        let mut values = vec![0.0];
        for x in 1..=n {
            values.push(l.eval(x as f64));
        }
        DiscreteLatency::new(values)
    }

    /// Monomial basis element x^j (with the load-0 convention for j = 0).
    pub fn monomial(j: u32, n: usize) -> DiscreteLatency {
        let mut values = vec![0.0];
        for x in 1..=n {
            values.push((x as f64).powi(j as i32));
        }
        DiscreteLatency { values }
    }

    pub fn n(&self) -> usize {
        self.values.len() - 1
    }

    pub fn at(&self, load: usize) -> f64 {
        // Loads beyond n and the sentinel n+1 cost nothing extra.
        self.values.get(load).copied().unwrap_or(0.0)
    }
}

/// Basis {1, x, …, x^degree} sampled at loads 0..=n.
pub fn monomial_basis(degree: u32, n: usize) -> Vec<DiscreteLatency> {
    (0..=degree).map(|j| DiscreteLatency::monomial(j, n)).collect()
}

/// Budget attached to the incentive variables of the smoothness LP.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Budget {
    pub beta: f64,
    pub sign: SignClass,
}

/// Smoothness LP for one basis latency and n players. Variables are the
/// incentivized costs f(1..=n) and the smoothness level ρ; every integer
/// split (x, y, z) with 1 ≤ x+y+z ≤ n contributes the row
///
///   b(x+z)(x+z) − ρ·b(x+y)(x+y) + f(x+y)·y − f(x+y+1)·z ≥ 0
///
/// with the conventions b(0) = 0 and f(n+1) = 0.
pub fn build_lp(b: &DiscreteLatency, n: usize) -> Result<LpProblem> {
    if n < 1 {
        return Err(invalid("smoothness LP needs n ≥ 1 players"));
    }
    if n > 64 {
        return Err(invalid(format!("n = {n} players is too large for the dense LP (max 64)")));
    }
    if b.n() < n {
        return Err(invalid(format!(
            "basis latency sampled up to load {}, need {n}",
            b.n()
        )));
    }

    // Columns: f(1..=n), then rho (free).
    let mut lp = LpProblem::new(n + 1);
    lp.names = (1..=n).map(|x| format!("f{x}")).chain(["rho".to_string()]).collect();
    lp.free[n] = true;
    lp.maximize[n] = 1.0;

    for x in 0..=n {
        for y in 0..=(n - x) {
            for z in 0..=(n - x - y) {
                if x + y + z == 0 {
                    continue;
                }
                let mut coeffs = vec![0.0; n + 1];
                let xy = x + y;
                if (1..=n).contains(&xy) {
                    coeffs[xy - 1] += y as f64;
                }
                if (1..=n).contains(&(xy + 1)) {
                    coeffs[xy + 1 - 1] -= z as f64;
                }
                coeffs[n] = -(b.at(xy) * xy as f64);
                let rhs = -(b.at(x + z) * (x + z) as f64);
                lp.add_row(coeffs, Sense::Ge, rhs, format!("x{x}y{y}z{z}"));
            }
        }
    }
    Ok(lp)
}

/// Restricts the LP's incentivized costs to a β-budget around the nominal
/// latency: a scale variable ν ≥ 0 is appended and every load x gets
/// ν·b(x) ≤ f(x) ≤ ν·(1+β)·b(x) for tolls, ν·(1−β)·b(x) ≤ f(x) ≤ ν·b(x)
/// for subsidies.
pub fn add_budget_constraints(
    lp: &mut LpProblem,
    b: &DiscreteLatency,
    n: usize,
    budget: Budget,
) -> Result<()> {
    if !budget.beta.is_finite() || budget.beta < 0.0 {
        return Err(invalid(format!(
            "budget parameter must be finite and ≥ 0 (got {})",
            budget.beta
        )));
    }
    if budget.sign == SignClass::Mixed {
        return Err(invalid("budget constraints need a definite sign class"));
    }
    if lp.n_vars() != n + 1 {
        return Err(invalid("budget constraints expect an unextended smoothness LP"));
    }
    // Append ν.
    lp.maximize.push(0.0);
    lp.free.push(false);
    lp.names.push("nu".to_string());
    for row in &mut lp.rows {
        row.coeffs.push(0.0);
    }

    let (lo, hi) = match budget.sign {
        SignClass::Toll => (1.0, 1.0 + budget.beta),
        SignClass::Subsidy => (1.0 - budget.beta, 1.0),
        SignClass::Mixed => unreachable!(),
    };
    for x in 1..=n {
        let bx = b.at(x);
        let mut lo_row = vec![0.0; n + 2];
        lo_row[x - 1] = 1.0;
        lo_row[n + 1] = -lo * bx;
        lp.add_row(lo_row, Sense::Ge, 0.0, format!("budget-lo-{x}"));
        let mut hi_row = vec![0.0; n + 2];
        hi_row[x - 1] = 1.0;
        hi_row[n + 1] = -hi * bx;
        lp.add_row(hi_row, Sense::Le, 0.0, format!("budget-hi-{x}"));
    }
    Ok(())
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct AtomicLpSolution {
    /// Optimal smoothness level; the price-of-anarchy contribution is 1/ρ.
    pub rho: f64,
    /// Incentivized costs f(1..=n), normalized by ν when a budget was active.
    pub f: Vec<f64>,
    pub nu: Option<f64>,
    pub lp: LpSolution,
}

/// Builds, solves, and certifies the smoothness LP for one basis latency.
pub fn solve_lp(
    b: &DiscreteLatency,
    n: usize,
    budget: Option<Budget>,
    pivot_cap: usize,
) -> Result<AtomicLpSolution> {
    let mut lp = build_lp(b, n)?;
    if let Some(bd) = budget {
        add_budget_constraints(&mut lp, b, n, bd)?;
    }
    let sol = lp.solve(pivot_cap)?;
    match sol.status {
        LpStatus::Optimal => {}
        LpStatus::Infeasible => return Err(Error::Lp("smoothness LP infeasible".into())),
        LpStatus::Unbounded => return Err(Error::Lp("smoothness LP unbounded".into())),
        LpStatus::IterationLimit => {
            return Err(Error::NonConvergence(format!("pivot cap {pivot_cap} exhausted")))
        }
    }
    if sol.max_violation > 1e-7 || !sol.dual_ok {
        return Err(Error::Lp(format!(
            "certification failed: violation {:.3e}, duals ok: {}",
            sol.max_violation, sol.dual_ok
        )));
    }
    let rho = sol.x[n];
    let mut f: Vec<f64> = sol.x[..n].to_vec();
    let nu = if budget.is_some() {
        let nu = sol.x[n + 1];
        if nu <= 1e-9 {
            return Err(Error::Lp(format!("budget normalization collapsed (ν = {nu:.3e})")));
        }
        for v in &mut f {
            *v /= nu;
        }
        Some(nu)
    } else {
        None
    };
    Ok(AtomicLpSolution { rho, f, nu, lp: sol })
}

/// Per-load incentive recovered from a solved LP: τ(x) = f(x) − b(x), the
/// money added on top of the nominal latency (negative entries subsidize).
pub fn optimal_incentive_from_lp(sol: &AtomicLpSolution, b: &DiscreteLatency) -> Result<Vec<f64>> {
    if sol.lp.status != LpStatus::Optimal {
        return Err(Error::Lp("incentive extraction needs an optimal LP solution".into()));
    }
    Ok(sol.f.iter().enumerate().map(|(i, &fx)| fx - b.at(i + 1)).collect())
}

/// Price-of-anarchy bound over a latency basis: each element contributes its
/// own LP, and the binding one decides: PoA = max_j 1/ρ_j.
pub fn atomic_poa_bound(
    basis: &[DiscreteLatency],
    n: usize,
    budget: Option<Budget>,
    pivot_cap: usize,
) -> Result<f64> {
    if basis.is_empty() {
        return Err(invalid("latency basis is empty"));
    }
    let mut poa: f64 = 1.0;
    for b in basis {
        let sol = solve_lp(b, n, budget, pivot_cap)?;
        if sol.rho <= 1e-12 {
            return Err(Error::Lp("smoothness level ρ ≈ 0: unbounded inefficiency".into()));
        }
        poa = poa.max(1.0 / sol.rho);
    }
    Ok(poa)
}

/// A finite congestion game: each player picks one action (a resource set).
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct AtomicGame {
    pub resources: Vec<DiscreteLatency>,
    /// `actions[i]` lists player i's actions, each a set of resource indices.
    pub actions: Vec<Vec<Vec<usize>>>,
}

impl AtomicGame {
    pub fn new(resources: Vec<DiscreteLatency>, actions: Vec<Vec<Vec<usize>>>) -> Result<AtomicGame> {
        if actions.is_empty() {
            return Err(invalid("game needs at least one player"));
        }
        let n = actions.len();
        for r in &resources {
            if r.n() < n {
                return Err(invalid(format!(
                    "resource sampled up to load {}, need {} for {} players",
                    r.n(),
                    n,
                    n
                )));
            }
        }
        for (i, acts) in actions.iter().enumerate() {
            if acts.is_empty() {
                return Err(invalid(format!("player {i} has no actions")));
            }
            for a in acts {
                for &r in a {
                    if r >= resources.len() {
                        return Err(invalid(format!(
                            "player {i} references unknown resource {r}"
                        )));
                    }
                }
            }
        }
        Ok(AtomicGame { resources, actions })
    }

    pub fn n_players(&self) -> usize {
        self.actions.len()
    }

    pub fn n_profiles(&self) -> usize {
        self.actions.iter().map(|a| a.len()).product()
    }

    fn loads(&self, profile: &[usize]) -> Vec<usize> {
        let mut loads = vec![0usize; self.resources.len()];
        for (i, &a) in profile.iter().enumerate() {
            for &r in &self.actions[i][a] {
                loads[r] += 1;
            }
        }
        loads
    }

    fn player_cost(&self, player: usize, action: usize, loads: &[usize], incentive: Option<&[Vec<f64>]>) -> f64 {
        self.actions[player][action]
            .iter()
            .map(|&r| {
                let load = loads[r];
                let tau = incentive.map_or(0.0, |t| t[r].get(load).copied().unwrap_or(0.0));
                self.resources[r].at(load) + tau
            })
            .sum()
    }

    /// Total latency Σ_r load·ℓ_r(load); incentives are transfers and do not
    /// appear.
    pub fn social_cost(&self, profile: &[usize]) -> f64 {
        let loads = self.loads(profile);
        self.resources
            .iter()
            .zip(&loads)
            .map(|(r, &load)| load as f64 * r.at(load))
            .sum()
    }
}

fn check_incentive_shape(game: &AtomicGame, incentive: Option<&[Vec<f64>]>) -> Result<()> {
    if let Some(t) = incentive {
        if t.len() != game.resources.len() {
            return Err(invalid(format!(
                "incentive covers {} resources, game has {}",
                t.len(),
                game.resources.len()
            )));
        }
        for (r, row) in t.iter().enumerate() {
            if row.len() < game.n_players() + 1 {
                return Err(invalid(format!(
                    "incentive for resource {r} has {} entries, need loads 0..={}",
                    row.len(),
                    game.n_players()
                )));
            }
        }
    }
    Ok(())
}

/// All pure Nash equilibria of the incentivized game, by exhaustive profile
/// enumeration (players minimize latency plus incentive).
pub fn atomic_nash_enumerate(
    game: &AtomicGame,
    incentive: Option<&[Vec<f64>]>,
    profile_cap: usize,
) -> Result<Vec<Vec<usize>>> {
    check_incentive_shape(game, incentive)?;
    if game.n_profiles() > profile_cap {
        return Err(invalid(format!(
            "{} profiles exceed the enumeration cap of {profile_cap}",
            game.n_profiles()
        )));
    }
    let n = game.n_players();
    let mut equilibria = Vec::new();
    let mut profile = vec![0usize; n];
    loop {
        let loads = game.loads(&profile);
        let mut is_ne = true;
        'players: for (i, &chosen) in profile.iter().enumerate() {
            let current = game.player_cost(i, chosen, &loads, incentive);
            for alt in 0..game.actions[i].len() {
                if alt == chosen {
                    continue;
                }
                // Loads with player i moved from its action to alt.
                let mut moved = loads.clone();
                for &r in &game.actions[i][chosen] {
                    moved[r] -= 1;
                }
                for &r in &game.actions[i][alt] {
                    moved[r] += 1;
                }
                if game.player_cost(i, alt, &moved, incentive) < current - 1e-9 {
                    is_ne = false;
                    break 'players;
                }
            }
        }
        if is_ne {
            equilibria.push(profile.clone());
        }
        // Odometer step.
        let mut k = 0;
        loop {
            if k == n {
                return Ok(equilibria);
            }
            profile[k] += 1;
            if profile[k] < game.actions[k].len() {
                break;
            }
            profile[k] = 0;
            k += 1;
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct AtomicPoaReport {
    pub poa: f64,
    pub worst_equilibrium_cost: f64,
    pub optimal_cost: f64,
    pub n_equilibria: usize,
}

/// Empirical price of anarchy: worst pure-equilibrium social cost over the
/// best achievable social cost.
pub fn atomic_poa(
    game: &AtomicGame,
    incentive: Option<&[Vec<f64>]>,
    profile_cap: usize,
) -> Result<AtomicPoaReport> {
    let equilibria = atomic_nash_enumerate(game, incentive, profile_cap)?;
    if equilibria.is_empty() {
        return Err(invalid("game has no pure equilibrium"));
    }
    let worst = equilibria
        .iter()
        .map(|p| game.social_cost(p))
        .fold(f64::NEG_INFINITY, f64::max);

    let mut best = f64::INFINITY;
    let mut profile = vec![0usize; game.n_players()];
    loop {
        best = best.min(game.social_cost(&profile));
        let mut k = 0;
        loop {
            if k == game.n_players() {
                if best <= 1e-12 {
                    if worst <= 1e-12 {
                        return Ok(AtomicPoaReport {
                            poa: 1.0,
                            worst_equilibrium_cost: worst,
                            optimal_cost: best,
                            n_equilibria: equilibria.len(),
                        });
                    }
                    return Err(invalid("optimal social cost is zero but equilibria cost more"));
                }
                return Ok(AtomicPoaReport {
                    poa: worst / best,
                    worst_equilibrium_cost: worst,
                    optimal_cost: best,
                    n_equilibria: equilibria.len(),
                });
            }
            profile[k] += 1;
            if profile[k] < game.actions[k].len() {
                break;
            }
            profile[k] = 0;
            k += 1;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn linear(n: usize) -> DiscreteLatency {
        DiscreteLatency::monomial(1, n)
    }

    #[test]
    fn lp_rows_for_single_player() {
        let lp = build_lp(&linear(1), 1).unwrap();
        // (1,0,0), (0,1,0), (0,0,1)
        assert_eq!(lp.rows.len(), 3);
        let sol = lp.solve(10_000).unwrap();
        assert_eq!(sol.status, LpStatus::Optimal);
        assert!((sol.x[1] - 1.0).abs() < 1e-9, "single player is efficient");
    }

    #[test]
    fn two_player_linear_smoothness() {
        let sol = solve_lp(&linear(2), 2, None, 10_000).unwrap();
        assert!((sol.rho - 0.6).abs() < 1e-9);
        assert!((sol.f[0] - 1.0).abs() < 1e-9);
        assert!((sol.f[1] - 1.4).abs() < 1e-9);
        let tau = optimal_incentive_from_lp(&sol, &linear(2)).unwrap();
        assert!((tau[0] - 0.0).abs() < 1e-9);
        assert!((tau[1] + 0.6).abs() < 1e-9);
    }

    #[test]
    fn constant_basis_is_efficient() {
        let sol = solve_lp(&DiscreteLatency::monomial(0, 3), 3, None, 100_000).unwrap();
        assert!((sol.rho - 1.0).abs() < 1e-7);
    }

    #[test]
    fn zero_budget_pins_costs_to_nominal() {
        let b = linear(2);
        let budget = Budget { beta: 0.0, sign: SignClass::Toll };
        let sol = solve_lp(&b, 2, Some(budget), 100_000).unwrap();
        assert!((sol.rho - 0.5).abs() < 1e-7);
        // normalized costs equal the basis itself
        assert!((sol.f[0] - 1.0).abs() < 1e-7);
        assert!((sol.f[1] - 2.0).abs() < 1e-7);
    }

    #[test]
    fn loose_budget_recovers_unconstrained_level() {
        let b = linear(2);
        let unconstrained = solve_lp(&b, 2, None, 100_000).unwrap();
        let budget = Budget { beta: 10.0, sign: SignClass::Subsidy };
        let sol = solve_lp(&b, 2, Some(budget), 100_000).unwrap();
        assert!(sol.rho >= unconstrained.rho - 1e-7);
    }

    #[test]
    fn budget_interpolates_monotonically() {
        let b = linear(3);
        let mut prev = 0.0;
        for beta in [0.0, 0.25, 0.5, 1.0, 2.0] {
            let sol =
                solve_lp(&b, 3, Some(Budget { beta, sign: SignClass::Toll }), 100_000).unwrap();
            assert!(sol.rho >= prev - 1e-9, "ρ must not decrease as the budget loosens");
            prev = sol.rho;
        }
    }

    #[test]
    fn poa_bound_over_basis() {
        let poa = atomic_poa_bound(&monomial_basis(1, 2), 2, None, 100_000).unwrap();
        // constant element gives 1, linear element 1/0.6
        assert!((poa - 1.0 / 0.6).abs() < 1e-7);
    }

    #[test]
    fn nash_enumeration_two_player_pigou() {
        // r0: ℓ = load, r1: constant 2
        let game = AtomicGame::new(
            vec![
                DiscreteLatency::new(vec![0.0, 1.0, 2.0]).unwrap(),
                DiscreteLatency::new(vec![0.0, 2.0, 2.0]).unwrap(),
            ],
            vec![vec![vec![0], vec![1]]; 2],
        )
        .unwrap();
        let nes = atomic_nash_enumerate(&game, None, 1_000).unwrap();
        // both-on-r0 plus the two splits; both-on-r1 is not stable
        assert_eq!(nes.len(), 3);
        assert!(nes.contains(&vec![0, 0]));
        assert!(!nes.contains(&vec![1, 1]));

        let report = atomic_poa(&game, None, 1_000).unwrap();
        assert!((report.poa - 4.0 / 3.0).abs() < 1e-12);
        assert!((report.optimal_cost - 3.0).abs() < 1e-12);
    }

    #[test]
    fn incentive_changes_equilibria() {
        // Tolling r0 at load 2 removes the inefficient equilibrium.
        let game = AtomicGame::new(
            vec![
                DiscreteLatency::new(vec![0.0, 1.0, 2.0]).unwrap(),
                DiscreteLatency::new(vec![0.0, 2.0, 2.0]).unwrap(),
            ],
            vec![vec![vec![0], vec![1]]; 2],
        )
        .unwrap();
        let incentive = vec![vec![0.0, 0.0, 0.5], vec![0.0, 0.0, 0.0]];
        let nes = atomic_nash_enumerate(&game, Some(&incentive), 1_000).unwrap();
        assert!(!nes.contains(&vec![0, 0]));
        let report = atomic_poa(&game, Some(&incentive), 1_000).unwrap();
        assert!((report.poa - 1.0).abs() < 1e-12);
    }

    #[test]
    fn profile_cap_enforced() {
        let game = AtomicGame::new(
            vec![DiscreteLatency::new(vec![0.0, 1.0, 2.0, 3.0]).unwrap()],
            vec![vec![vec![0], vec![]]; 3],
        )
        .unwrap();
        assert!(atomic_nash_enumerate(&game, None, 7).is_err());
        assert!(atomic_nash_enumerate(&game, None, 8).is_ok());
    }

    #[test]
    fn discrete_latency_validation() {
        assert!(DiscreteLatency::new(vec![0.0, 1.0]).is_ok());
        assert!(DiscreteLatency::new(vec![0.5, 1.0]).is_err());
        assert!(DiscreteLatency::new(vec![0.0, -1.0]).is_err());
        assert!(DiscreteLatency::new(vec![0.0]).is_err());
        let d = DiscreteLatency::from_latency(&LatencyFn::affine(1.0, 1.0), 3).unwrap();
        assert_eq!(d.values, vec![0.0, 2.0, 3.0, 4.0]);
    }

    #[test]
    fn budget_rejects_bad_parameters() {
        let b = linear(2);
        let mut lp = build_lp(&b, 2).unwrap();
        assert!(add_budget_constraints(
            &mut lp,
            &b,
            2,
            Budget { beta: -0.5, sign: SignClass::Toll }
        )
        .is_err());
        let mut lp = build_lp(&b, 2).unwrap();
        assert!(add_budget_constraints(
            &mut lp,
            &b,
            2,
            Budget { beta: 0.5, sign: SignClass::Mixed }
        )
        .is_err());
    }

    // The eight-player certificate optimizes over every load pattern
    // smoothness can produce; parallel-link games with at most four players
    // cannot realize it, so the enumerated maximum (4/3, at two players on
    // resources 2x and x) sits 0.68 below the 2.0109520 bound. Both values
    // are pinned so a solver or enumeration change shows up here.
    #[test]
    fn eight_player_certificate_covers_the_small_linear_corpus() {
        let b = linear(8);
        let sol = solve_lp(&b, 8, None, DEFAULT_PIVOT_CAP).unwrap();
        let bound = 1.0 / sol.rho;
        assert!((bound - 2.010951979781).abs() <= 1e-9, "certificate moved: {bound:.12}");
        let tau = optimal_incentive_from_lp(&sol, &b).unwrap();
        let mut max_poa = 0.0f64;
        for n in 1..=4usize {
            for r in [2usize, 3] {
                for mask in 0..3usize.pow(r as u32) {
                    let mut coeffs = Vec::with_capacity(r);
                    let mut m = mask;
                    for _ in 0..r {
                        coeffs.push((m % 3) as f64);
                        m /= 3;
                    }
                    if coeffs.contains(&0.0) {
                        continue; // a free resource pins the optimum at zero
                    }
                    let resources: Vec<DiscreteLatency> = coeffs
                        .iter()
                        .map(|&c| {
                            DiscreteLatency::new((0..=n).map(|x| c * x as f64).collect())
                                .unwrap()
                        })
                        .collect();
                    let game = AtomicGame::new(
                        resources,
                        vec![(0..r).map(|j| vec![j]).collect(); n],
                    )
                    .unwrap();
                    let incentive: Vec<Vec<f64>> = coeffs
                        .iter()
                        .map(|&c| {
                            let mut row = vec![0.0];
                            row.extend(tau.iter().take(n).map(|&t| c * t));
                            row
                        })
                        .collect();
                    let report =
                        atomic_poa(&game, Some(&incentive), DEFAULT_PROFILE_CAP).unwrap();
                    assert!(
                        report.poa <= bound + 1e-6,
                        "n = {n}, coefficients {coeffs:?}: ratio {:.9} beats the certificate",
                        report.poa
                    );
                    max_poa = max_poa.max(report.poa);
                }
            }
        }
        assert!((max_poa - 4.0 / 3.0).abs() <= 1e-9, "corpus maximum moved: {max_poa:.12}");
    }
}
