//! Acceptance gate: one test per shipped guarantee, each ending in a single
//! PASS or FAIL line (run with `--nocapture` to see them alongside the
//! harness output).
//!
//! Two guarantees are recorded failures: the two-population subsidy
//! regression values cannot be reproduced because they do not satisfy the
//! equilibrium conditions of the game they are recorded for, and the
//! `verify` subcommand therefore exits nonzero. Those tests assert the
//! exact documented failure so any drift — including an accidental fix —
//! is caught. Details live in the README's Known Issues section.

mod common;

use std::time::Instant;

use wardrop::atomic::{
    atomic_poa, atomic_poa_bound, monomial_basis, optimal_incentive_from_lp, solve_lp,
    AtomicGame, Budget, DiscreteLatency, DEFAULT_PIVOT_CAP, DEFAULT_PROFILE_CAP,
};
use wardrop::checks::scenarios;
use wardrop::incentive::{
    affine_mechanism, mc_toll, nominal_equivalent, pushforward_cost_scale, SensitivityProfile,
    SignClass,
};
use wardrop::poa::{example_corpus, parallel_affine_instance, pigou_instance, poa_instance};
use wardrop::solver::{
    nash_flow_heterogeneous, nash_flow_homogeneous, verify_equilibrium, SolverConfig,
};

fn run_scenario(name: &str) -> Result<(), String> {
    let all = scenarios();
    let scenario = all
        .iter()
        .find(|s| s.name == name)
        .unwrap_or_else(|| panic!("no scenario named {name}"));
    (scenario.run)(&SolverConfig::default()).map_err(|e| e.to_string())
}

#[test]
fn criterion_01_reference_instance_regression() {
    let start = Instant::now();
    run_scenario("reference-instance").unwrap();
    let secs = start.elapsed().as_secs_f64();
    assert!(secs < 5.0, "reference instance took {secs:.2}s, budget is 5s");
    eprintln!(
        "criterion 01 PASS — reference instance: optimum 0.683, untolled flows and ratio 1.465, \
         marginal-cost ratio 1.000 ({secs:.2}s)"
    );
}

/// The recorded subsidy-equivalent flows (0, 0.5, 0.137, 0.363, 0.637) are
/// not an equilibrium of the game they are recorded for: the low-sensitivity
/// population's indifference condition pins the middle edge at 0.4. The
/// solver finds the verified equilibrium (0, 0.5, 0.1, 0.4, 0.6) with ratio
/// 1.348 instead of the recorded 1.32. The marginal-cost half of the
/// scenario passes; this test asserts the documented failure of the subsidy
/// half so any drift is caught.
#[test]
fn criterion_02_two_population_regression_documented_failure() {
    let start = Instant::now();
    let err = run_scenario("two-population-regression")
        .expect_err("the recorded subsidy regression unexpectedly reproduced — update the gate");
    assert!(
        err.contains("subsidy-equivalent equilibrium"),
        "failure moved to a different stage: {err}"
    );
    let secs = start.elapsed().as_secs_f64();
    assert!(secs < 10.0, "two-population scenario took {secs:.2}s, budget is 10s");
    eprintln!(
        "criterion 02 FAIL (documented) — subsidy-equivalent regression flows are not an \
         equilibrium; the verified one is (0, 0.5, 0.1, 0.4, 0.6) with ratio 1.348. \
         See README Known Issues ({secs:.2}s)"
    );
}

#[test]
fn criterion_03_budget_curve_endpoints_and_dominance() {
    let start = Instant::now();
    run_scenario("budget-curves").unwrap();
    eprintln!(
        "criterion 03 PASS — bounded-incentive guarantees: exact endpoints, strict subsidy \
         dominance at 101 interior budgets, near-tight witnesses ({:.2}s)",
        start.elapsed().as_secs_f64()
    );
}

#[test]
fn criterion_04_heterogeneity_curves() {
    let start = Instant::now();
    run_scenario("heterogeneity-curves").unwrap();
    eprintln!(
        "criterion 04 PASS — scaled toll vs subsidy equivalent: reduced effective ratio, \
         strict improvement, both guarantees hold empirically ({:.2}s)",
        start.elapsed().as_secs_f64()
    );
}

#[test]
fn criterion_05_robust_design_crossover() {
    let start = Instant::now();
    run_scenario("crossover").unwrap();
    eprintln!(
        "criterion 05 PASS — robust toll and subsidy guarantees cross exactly once, at the \
         predicted budget, for all three sensitivity spreads ({:.2}s)",
        start.elapsed().as_secs_f64()
    );
}

#[test]
fn criterion_06_rescaling_suites_cover_the_full_corpus() {
    let start = Instant::now();
    let cfg = SolverConfig::default();
    let mech = mc_toll();
    let corpus = example_corpus(&cfg).unwrap();
    let total = corpus.len();
    assert_eq!(total, 29, "corpus changed size: {total} instances");

    let mut uniform_ok = 0usize;
    let mut pushed_ok = 0usize;
    for problem in &corpus {
        let paths = problem.enumerate_paths(cfg.path_count_cap).unwrap();
        let n = problem.od_pairs.len();

        let eq = nash_flow_homogeneous(problem, &paths, Some(&mech), &cfg).unwrap();
        assert!(eq.converged, "{}: homogeneous solve stalled", problem.id);
        let homo = SensitivityProfile::homogeneous(n, 1.0).unwrap();
        let mut ok = true;
        for lambda in [0.5, 2.0] {
            let scaled = nominal_equivalent(mech.clone(), lambda).unwrap();
            let report = verify_equilibrium(
                problem,
                &paths,
                Some(&scaled),
                &homo,
                &eq.flow,
                lambda * cfg.epsilon,
            )
            .unwrap();
            assert!(
                report.ok,
                "{}: uniform rescaling λ = {lambda} broke the equilibrium (gap {:.3e})",
                problem.id, report.worst_gap
            );
            ok &= report.ok;
        }
        uniform_ok += ok as usize;

        let (s_low, s_high) = (0.5, 1.5);
        let mixed = SensitivityProfile::two_class(n, s_low, s_high, 0.5).unwrap();
        let eq = nash_flow_heterogeneous(problem, &paths, Some(&mech), &mixed, &cfg).unwrap();
        assert!(eq.converged, "{}: two-class solve stalled", problem.id);
        let mut ok = true;
        for lambda in [0.5, 2.0] {
            let scaled = nominal_equivalent(mech.clone(), lambda).unwrap();
            let pushed = mixed.pushforward(lambda).unwrap();
            let factor = pushforward_cost_scale(s_low, lambda)
                .unwrap()
                .max(pushforward_cost_scale(s_high, lambda).unwrap());
            let report = verify_equilibrium(
                problem,
                &paths,
                Some(&scaled),
                &pushed,
                &eq.flow,
                factor * cfg.epsilon,
            )
            .unwrap();
            assert!(
                report.ok,
                "{}: pushed rescaling λ = {lambda} broke the equilibrium (gap {:.3e})",
                problem.id, report.worst_gap
            );
            ok &= report.ok;
        }
        pushed_ok += ok as usize;
    }
    assert_eq!(uniform_ok, total);
    assert_eq!(pushed_ok, total);
    eprintln!(
        "criterion 06 PASS — uniform rescaling {uniform_ok}/{total}, pushed-profile rescaling \
         {pushed_ok}/{total} instances ({:.2}s)",
        start.elapsed().as_secs_f64()
    );
}

#[test]
fn criterion_07_rescaling_trend_and_no_subsidy_rescue() {
    let start = Instant::now();
    let cfg = SolverConfig::default();

    for p in [1, 2] {
        let problem = pigou_instance(p).unwrap();
        let mut previous = f64::INFINITY;
        let mut last = f64::NAN;
        for lambda in [1.0, 2.0, 4.0, 8.0, 16.0] {
            let mech = nominal_equivalent(mc_toll(), lambda).unwrap();
            let report = poa_instance(&problem, Some(&mech), 1.0, 4.0, None, &cfg).unwrap();
            assert!(report.converged, "{}: λ = {lambda} scan stalled", problem.id);
            assert!(
                report.poa <= previous + 1e-3,
                "{}: worst ratio rose from {previous:.6} to {:.6} at λ = {lambda}",
                problem.id,
                report.poa
            );
            previous = report.poa;
            last = report.poa;
        }
        assert!(last <= 1.02, "{}: ratio {last:.6} above 1.02 at λ = 16", problem.id);
    }

    let a = pigou_instance(1).unwrap();
    let (b, _) = parallel_affine_instance(&[1.0, 0.0], &[0.0, 0.5], 1.0, &cfg).unwrap();
    for k in 0..=100 {
        let k2 = -5.0 + 5.0 * k as f64 / 100.0;
        let mech = affine_mechanism(0.0, k2).unwrap();
        let ra = poa_instance(&a, Some(&mech), 1.0, 4.0, None, &cfg).unwrap();
        let rb = poa_instance(&b, Some(&mech), 1.0, 4.0, None, &cfg).unwrap();
        assert!(ra.converged && rb.converged, "k₂ = {k2}: scan stalled");
        assert!(
            ra.poa.max(rb.poa) > 1.001,
            "k₂ = {k2} brought both scaled variants near optimal ({:.6}, {:.6})",
            ra.poa,
            rb.poa
        );
    }
    eprintln!(
        "criterion 07 PASS — worst ratio non-increasing in the rescaling and ≤ 1.02 at λ = 16; \
         no offset subsidy in [-5, 0] rescues both scaled variants ({:.2}s)",
        start.elapsed().as_secs_f64()
    );
}

#[test]
fn criterion_08_discrete_budget_curves_degree_four() {
    let start = Instant::now();
    let n = 8;
    let basis = monomial_basis(4, n);
    let mut prev_toll = f64::INFINITY;
    let mut prev_subsidy = f64::INFINITY;
    for k in 0..=20 {
        let beta = 5.0 * k as f64 / 20.0;
        let toll = atomic_poa_bound(
            &basis,
            n,
            Some(Budget { beta, sign: SignClass::Toll }),
            DEFAULT_PIVOT_CAP,
        )
        .unwrap();
        let subsidy = atomic_poa_bound(
            &basis,
            n,
            Some(Budget { beta, sign: SignClass::Subsidy }),
            DEFAULT_PIVOT_CAP,
        )
        .unwrap();
        for b in &basis {
            for sign in [SignClass::Toll, SignClass::Subsidy] {
                let sol = solve_lp(b, n, Some(Budget { beta, sign }), DEFAULT_PIVOT_CAP).unwrap();
                assert!(
                    sol.lp.max_violation <= 1e-7 && sol.lp.dual_ok,
                    "β = {beta}: row recheck failed (violation {:.3e}, duals ok: {})",
                    sol.lp.max_violation,
                    sol.lp.dual_ok
                );
            }
        }
        assert!(
            subsidy <= toll + 1e-6,
            "β = {beta}: subsidy curve {subsidy:.9} above toll curve {toll:.9}"
        );
        if k == 0 {
            assert!(
                (toll - subsidy).abs() <= 1e-9,
                "β = 0: curves differ ({toll:.12} vs {subsidy:.12})"
            );
        }
        assert!(toll <= prev_toll + 1e-9, "toll curve rose at β = {beta}");
        assert!(subsidy <= prev_subsidy + 1e-9, "subsidy curve rose at β = {beta}");
        prev_toll = toll;
        prev_subsidy = subsidy;
    }
    let secs = start.elapsed().as_secs_f64();
    assert!(secs < 60.0, "degree-4 curves took {secs:.2}s, budget is 60s");
    eprintln!(
        "criterion 08 PASS — degree-4 basis, 8 players, 21 budgets: subsidy ≤ toll, both \
         non-increasing, equal at β = 0, every row certified ({secs:.2}s)"
    );
}

/// Every parallel-link game with up to four players, two or three resources,
/// and per-resource costs assembled from {1, x, x²} with coefficients in
/// {0, 1, 2} stays within the certified bound for its player count once the
/// matching incentive is applied. Games containing a cost-free resource are
/// skipped: their optimum is zero and the ratio is undefined.
#[test]
fn criterion_09_certified_bound_holds_on_enumerated_games() {
    let start = Instant::now();
    let mut games = 0usize;
    for n_players in 1..=4usize {
        let basis = monomial_basis(2, n_players);
        let sols: Vec<_> = basis
            .iter()
            .map(|b| solve_lp(b, n_players, None, DEFAULT_PIVOT_CAP).unwrap())
            .collect();
        let bound = sols.iter().map(|s| 1.0 / s.rho).fold(1.0f64, f64::max);
        let taus: Vec<Vec<f64>> = sols
            .iter()
            .zip(&basis)
            .map(|(s, b)| optimal_incentive_from_lp(s, b).unwrap())
            .collect();
        for r in [2usize, 3] {
            for mask in 0..27usize.pow(r as u32) {
                let mut alphas: Vec<[f64; 3]> = Vec::with_capacity(r);
                let mut m = mask;
                for _ in 0..r {
                    alphas.push([(m % 3) as f64, (m / 3 % 3) as f64, (m / 9 % 3) as f64]);
                    m /= 27;
                }
                if alphas.iter().any(|a| a.iter().all(|&x| x == 0.0)) {
                    continue;
                }
                let resources: Vec<DiscreteLatency> = alphas
                    .iter()
                    .map(|a| {
                        DiscreteLatency::new(
                            (0..=n_players)
                                .map(|x| {
                                    a[0] * basis[0].at(x)
                                        + a[1] * basis[1].at(x)
                                        + a[2] * basis[2].at(x)
                                })
                                .collect(),
                        )
                        .unwrap()
                    })
                    .collect();
                let game = AtomicGame::new(
                    resources,
                    vec![(0..r).map(|j| vec![j]).collect(); n_players],
                )
                .unwrap();
                // Incentives compose the same way the costs do: the row for a
                // resource is the coefficient-weighted sum of the per-element
                // incentives, so each summand keeps its own smoothness rows.
                let incentive: Vec<Vec<f64>> = alphas
                    .iter()
                    .map(|a| {
                        let mut row = vec![0.0];
                        for load in 1..=n_players {
                            row.push(
                                a[0] * taus[0][load - 1]
                                    + a[1] * taus[1][load - 1]
                                    + a[2] * taus[2][load - 1],
                            );
                        }
                        row
                    })
                    .collect();
                let report = atomic_poa(&game, Some(&incentive), DEFAULT_PROFILE_CAP).unwrap();
                assert!(
                    report.poa <= bound + 1e-6,
                    "{n_players} players, coefficients {alphas:?}: ratio {:.9} exceeds the \
                     certified bound {bound:.9}",
                    report.poa
                );
                games += 1;
            }
        }
    }
    let secs = start.elapsed().as_secs_f64();
    assert!(secs < 120.0, "enumeration took {secs:.2}s, budget is 120s");
    eprintln!(
        "criterion 09 PASS — {games} enumerated games stay within their certified bound \
         ({secs:.2}s)"
    );
}

/// `verify` currently exits 1: its second scenario pins the two-population
/// subsidy regression, which is not reproducible (see criterion 02). This
/// test asserts that exact behavior — four scenarios pass, one fails, exit
/// code 1 — so the gate notices if anything shifts.
#[test]
fn criterion_10_verify_subcommand_documented_failure() {
    let start = Instant::now();
    let out = std::process::Command::new(env!("CARGO_BIN_EXE_cg"))
        .arg("verify")
        .output()
        .expect("verify run");
    let secs = start.elapsed().as_secs_f64();
    let stdout = String::from_utf8_lossy(&out.stdout);
    assert!(secs < 30.0, "verify took {secs:.2}s, budget is 30s");
    assert_eq!(
        out.status.code(),
        Some(1),
        "verify exit code moved (stdout:\n{stdout})"
    );
    for line in
        ["ok reference-instance", "ok budget-curves", "ok heterogeneity-curves", "ok crossover"]
    {
        assert!(stdout.contains(line), "missing `{line}` in verify output:\n{stdout}");
    }
    assert!(
        stdout.contains("FAIL two-population-regression"),
        "expected the documented scenario failure in verify output:\n{stdout}"
    );
    assert!(stdout.contains("5 scenarios, 1 failures"), "summary line moved:\n{stdout}");
    eprintln!(
        "criterion 10 FAIL (documented) — verify exits 1 in {secs:.2}s: the two-population \
         subsidy regression is not reproducible; the other four scenarios pass. \
         See README Known Issues"
    );
}
