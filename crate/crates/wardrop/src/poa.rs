//! Price-of-anarchy analysis: closed-form guarantees for the incentive
//! catalog, reference instances that attain them, and parameter sweeps.

use serde::{Deserialize, Serialize};

use crate::incentive::{
    nes_subsidy, opt_bounded_subsidy_affine, opt_bounded_toll_affine, opt_robust_subsidy_coeffs,
    opt_robust_toll_coeffs, Mechanism,
};
use crate::latency::{total_latency, LatencyFn};
use crate::network::{Edge, OdPair, RoutingProblem};
use crate::solver::{nash_flow_homogeneous, social_optimum, worst_nash_latency, SolverConfig};
use crate::{invalid, Result};

fn check_beta(beta: f64) -> Result<()> {
    if !beta.is_finite() || beta < 0.0 {
        return Err(invalid(format!("budget parameter must be finite and ≥ 0 (got {beta})")));
    }
    Ok(())
}

fn check_pair(s_l: f64, s_u: f64) -> Result<()> {
    if !s_l.is_finite() || !s_u.is_finite() || s_l <= 0.0 || s_u < s_l {
        return Err(invalid(format!("sensitivity bounds need 0 < s_l ≤ s_u (got [{s_l}, {s_u}])")));
    }
    Ok(())
}

/// Pigou-type guarantee as a function of an effective slope surcharge.
fn pigou_curve(beta_hat: f64) -> f64 {
    if beta_hat >= 1.0 {
        1.0
    } else {
        4.0 / (3.0 + 2.0 * beta_hat - beta_hat * beta_hat)
    }
}

/// Guarantee of the β-bounded toll on affine instances with homogeneous
/// users: 4/(3 + 2β − β²), saturating at 1 for β ≥ 1.
pub fn poa_bound_prop1_toll(beta: f64) -> Result<f64> {
    check_beta(beta)?;
    Ok(pigou_curve(beta))
}

/// Guarantee of the β-bounded subsidy with homogeneous users: the toll curve
/// evaluated at β/(1−β), saturating at 1 for β ≥ 1/2.
pub fn poa_bound_prop1_subsidy(beta: f64) -> Result<f64> {
    check_beta(beta)?;
    if beta >= 0.5 {
        return Ok(1.0);
    }
    Ok(pigou_curve(beta / (1.0 - beta)))
}

/// Heterogeneity curve (4/3)·(1 − √q/(1+√q)²) shared by the scaled
/// marginal-cost bounds.
fn ratio_curve(q: f64) -> f64 {
    let r = q.sqrt();
    4.0 / 3.0 * (1.0 - r / ((1.0 + r) * (1.0 + r)))
}

/// Guarantee of the scaled marginal-cost toll for sensitivity ratio
/// q = s_l/s_u ∈ (0, 1].
pub fn poa_bound_prop2_smc(q: f64) -> Result<f64> {
    if !q.is_finite() || q <= 0.0 || q > 1.0 {
        return Err(invalid(format!("sensitivity ratio must lie in (0, 1] (got {q})")));
    }
    Ok(ratio_curve(q))
}

/// The sensitivity ratio that, under the scaled marginal-cost toll, induces
/// the same equilibria as ratio s_l/s_u does under the toll's subsidy-only
/// equivalent. Always strictly below s_l/s_u when s_l < s_u.
pub fn nes_equivalent_ratio(s_l: f64, s_u: f64) -> Result<f64> {
    check_pair(s_l, s_u)?;
    let q = s_l / s_u;
    let root = (s_l * s_u).sqrt();
    let lambda = root / (1.0 + root);
    Ok(lambda * q / (1.0 - q + lambda * q))
}

/// Guarantee of the subsidy-only equivalent of the scaled marginal-cost toll:
/// the same curve at the equivalent (widened) ratio.
pub fn poa_bound_prop2_nes(s_l: f64, s_u: f64) -> Result<f64> {
    Ok(ratio_curve(nes_equivalent_ratio(s_l, s_u)?))
}

/// Guarantee of the robust β-bounded toll with coefficients from
/// `opt_robust_toll_coeffs` over sensitivities in [s_l, s_u].
pub fn poa_bound_prop3_toll(beta: f64, s_l: f64, s_u: f64) -> Result<f64> {
    check_beta(beta)?;
    check_pair(s_l, s_u)?;
    let bl = beta * s_l;
    if beta < 1.0 / (s_l * s_u).sqrt() {
        Ok(4.0 / 3.0 * (1.0 - bl / ((1.0 + bl) * (1.0 + bl))))
    } else {
        let q = s_l / s_u;
        let num = (1.0 + bl) * (q + bl);
        let den = 1.0 + 2.0 * bl + q;
        Ok(4.0 / 3.0 * (1.0 - num / (den * den)))
    }
}

/// Guarantee of the robust β-bounded subsidy with coefficients from
/// `opt_robust_subsidy_coeffs`; constant once β reaches 1/(s_l + s_u).
pub fn poa_bound_prop4_subsidy(beta: f64, s_l: f64, s_u: f64) -> Result<f64> {
    check_beta(beta)?;
    check_pair(s_l, s_u)?;
    if beta < 1.0 / (s_l + s_u) {
        let bl = beta * s_l;
        Ok(4.0 / 3.0 * (1.0 - bl * (1.0 - bl)))
    } else {
        let q = s_l / s_u;
        Ok(4.0 / 3.0 * (1.0 - q / ((1.0 + q) * (1.0 + q))))
    }
}

/// Where the robust toll and subsidy guarantees cross, after normalizing the
/// sensitivity range to unit product: below `beta_star` the subsidy wins,
/// above it the toll does.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Crossover {
    pub beta_star: f64,
    /// Multiplier applied to both bounds to reach s_l·s_u = 1.
    pub scale: f64,
    pub s_l: f64,
    pub s_u: f64,
}

pub fn thm5_crossover(s_l: f64, s_u: f64) -> Result<Crossover> {
    check_pair(s_l, s_u)?;
    let scale = 1.0 / (s_l * s_u).sqrt();
    let nl = s_l * scale;
    let nu = s_u * scale;
    Ok(Crossover { beta_star: 1.0 / nu, scale, s_l: nl, s_u: nu })
}

/// Maps a mechanism to its closed-form guarantee for the given sensitivity
/// range, when one applies.
pub fn closed_form_bound(mechanism: &Mechanism, s_l: f64, s_u: f64) -> Option<f64> {
    let homogeneous_unit = s_l == 1.0 && s_u == 1.0;
    match mechanism {
        Mechanism::Mc => homogeneous_unit.then_some(1.0),
        Mechanism::Smc { s_l: ml, s_u: mu } => {
            (*ml == s_l && *mu == s_u).then(|| ratio_curve(s_l / s_u))
        }
        Mechanism::OptToll { beta } => {
            homogeneous_unit.then(|| poa_bound_prop1_toll(*beta).expect("validated"))
        }
        Mechanism::OptSubsidy { beta } => {
            homogeneous_unit.then(|| poa_bound_prop1_subsidy(*beta).expect("validated"))
        }
        Mechanism::Nominal { lambda, inner } => match inner.as_ref() {
            Mechanism::Smc { s_l: ml, s_u: mu } if *ml == s_l && *mu == s_u => {
                let k = 1.0 / (s_l * s_u).sqrt();
                let expect = 1.0 / (1.0 + k);
                ((lambda - expect).abs() <= 1e-12)
                    .then(|| poa_bound_prop2_nes(s_l, s_u).expect("validated"))
            }
            _ => None,
        },
        Mechanism::Affine { k1, k2 } => {
            if *k1 > 0.0 {
                let (_, want_k2) = opt_robust_toll_coeffs(*k1, s_l, s_u).ok()?;
                ((k2 - want_k2).abs() <= 1e-12)
                    .then(|| poa_bound_prop3_toll(*k1, s_l, s_u).expect("validated"))
            } else if *k1 == 0.0 && *k2 < 0.0 {
                let beta = -*k2;
                (beta <= 1.0 / (s_l + s_u) + 1e-12)
                    .then(|| poa_bound_prop4_subsidy(beta, s_l, s_u).expect("validated"))
            } else {
                None
            }
        }
    }
}

// ---------------------------------------------------------------------------
// Reference instances

fn vnames(names: &[&str]) -> Vec<String> {
    names.iter().map(|s| s.to_string()).collect()
}

/// Two-commodity network whose untolled equilibrium wastes the shared
/// shortcut: a quadratic expressway, a linear arterial, and three constant
/// connectors.
pub fn fig1_instance() -> RoutingProblem {
    RoutingProblem::new(
        "fig1",
        vnames(&["v1", "v2", "v3", "v4"]),
        vec![
            Edge { id: "e1".into(), tail: 0, head: 3, latency: LatencyFn::poly(vec![0.0, 0.0, 4.0]) },
            Edge { id: "e2".into(), tail: 0, head: 2, latency: LatencyFn::affine(0.0, 0.5) },
            Edge { id: "e3".into(), tail: 1, head: 2, latency: LatencyFn::affine(0.0, 0.5) },
            Edge { id: "e4".into(), tail: 1, head: 3, latency: LatencyFn::affine(2.0, 0.0) },
            Edge { id: "e5".into(), tail: 2, head: 3, latency: LatencyFn::affine(0.0, 0.5) },
        ],
        vec![OdPair { origin: 0, dest: 3, rate: 0.5 }, OdPair { origin: 1, dest: 3, rate: 0.5 }],
    )
    .expect("reference instance is valid")
}

/// Two parallel links with ℓ1 = f^p against a constant link ℓ2 = 1, unit
/// demand: the classic worst case for unpriced routing.
pub fn pigou_instance(p: u32) -> Result<RoutingProblem> {
    if !(1..=16).contains(&p) {
        return Err(invalid(format!("pigou exponent must lie in 1..=16 (got {p})")));
    }
    let mut coeffs = vec![0.0; p as usize + 1];
    coeffs[p as usize] = 1.0;
    RoutingProblem::new(
        format!("pigou-{p}"),
        vnames(&["s", "t"]),
        vec![
            Edge { id: "e1".into(), tail: 0, head: 1, latency: LatencyFn::poly(coeffs) },
            Edge { id: "e2".into(), tail: 0, head: 1, latency: LatencyFn::affine(0.0, 1.0) },
        ],
        vec![OdPair { origin: 0, dest: 1, rate: 1.0 }],
    )
}

/// Pigou variant whose constant link is raised so that the β-bounded toll's
/// guarantee is met with equality: ℓ1 = f, ℓ2 = 1 + min(β, 1).
pub fn tight_toll_witness(beta: f64) -> Result<RoutingProblem> {
    check_beta(beta)?;
    RoutingProblem::new(
        "tight-pigou",
        vnames(&["s", "t"]),
        vec![
            Edge { id: "e1".into(), tail: 0, head: 1, latency: LatencyFn::affine(1.0, 0.0) },
            Edge { id: "e2".into(), tail: 0, head: 1, latency: LatencyFn::affine(0.0, 1.0 + beta.min(1.0)) },
        ],
        vec![OdPair { origin: 0, dest: 1, rate: 1.0 }],
    )
}

/// Subsidy counterpart of `tight_toll_witness`: ℓ2 = 1/(1 − min(β, 1/2)).
pub fn tight_subsidy_witness(beta: f64) -> Result<RoutingProblem> {
    check_beta(beta)?;
    RoutingProblem::new(
        "tight-pigou",
        vnames(&["s", "t"]),
        vec![
            Edge { id: "e1".into(), tail: 0, head: 1, latency: LatencyFn::affine(1.0, 0.0) },
            Edge {
                id: "e2".into(),
                tail: 0,
                head: 1,
                latency: LatencyFn::affine(0.0, 1.0 / (1.0 - beta.min(0.5))),
            },
        ],
        vec![OdPair { origin: 0, dest: 1, rate: 1.0 }],
    )
}

/// The affine Pigou network at demand 2: both links carry flow at the
/// untolled equilibrium, so it sits inside the fully-utilized parallel class
/// that the heterogeneity guarantees quantify over.
pub fn pigou_rate2() -> RoutingProblem {
    RoutingProblem::new(
        "pigou-rate2",
        vnames(&["s", "t"]),
        vec![
            Edge { id: "e1".into(), tail: 0, head: 1, latency: LatencyFn::affine(1.0, 0.0) },
            Edge { id: "e2".into(), tail: 0, head: 1, latency: LatencyFn::affine(0.0, 1.0) },
        ],
        vec![OdPair { origin: 0, dest: 1, rate: 2.0 }],
    )
    .expect("reference instance is valid")
}

/// Parallel network with affine links ℓ_i = a_i·f + b_i and the given demand.
/// The second element reports whether the untolled equilibrium puts positive
/// flow on every link.
pub fn parallel_affine_instance(
    a: &[f64],
    b: &[f64],
    rate: f64,
    cfg: &SolverConfig,
) -> Result<(RoutingProblem, bool)> {
    if a.len() < 2 || a.len() != b.len() {
        return Err(invalid("parallel instance needs matching slope/offset lists with ≥ 2 links"));
    }
    let edges = a
        .iter()
        .zip(b)
        .enumerate()
        .map(|(i, (&ai, &bi))| Edge {
            id: format!("e{}", i + 1),
            tail: 0,
            head: 1,
            latency: LatencyFn::affine(ai, bi),
        })
        .collect();
    let problem = RoutingProblem::new(
        "parallel-affine",
        vnames(&["s", "t"]),
        edges,
        vec![OdPair { origin: 0, dest: 1, rate }],
    )?;
    let paths = problem.enumerate_paths(cfg.path_count_cap)?;
    let nash = nash_flow_homogeneous(&problem, &paths, None, cfg)?;
    let threshold = 1e-7 * rate.max(1.0);
    let utilized = nash.converged && nash.flow.edge_flows.iter().all(|&f| f > threshold);
    Ok((problem, utilized))
}

/// Deterministic two-link affine corpus: slopes and offsets drawn from
/// {0, 1/2, 1, 2}, filtered to instances whose untolled equilibrium uses both
/// links and whose optimum has positive latency; the first 25 in enumeration
/// order are kept.
pub fn affine_corpus(cfg: &SolverConfig) -> Result<Vec<RoutingProblem>> {
    let grid = [0.0, 0.5, 1.0, 2.0];
    let mut kept = Vec::new();
    'outer: for (i1, &a1) in grid.iter().enumerate() {
        for (j1, &b1) in grid.iter().enumerate() {
            for (i2, &a2) in grid.iter().enumerate() {
                for (j2, &b2) in grid.iter().enumerate() {
                    // unordered pair of links: keep the canonical orientation
                    if (i2, j2) < (i1, j1) {
                        continue;
                    }
                    let (mut problem, utilized) =
                        parallel_affine_instance(&[a1, a2], &[b1, b2], 1.0, cfg)?;
                    if !utilized {
                        continue;
                    }
                    let paths = problem.enumerate_paths(cfg.path_count_cap)?;
                    let opt = social_optimum(&problem, &paths, cfg)?;
                    if !opt.converged || total_latency(&problem, &opt.flow)? <= 1e-9 {
                        continue;
                    }
                    problem.id = format!("parallel-affine-{:02}", kept.len());
                    kept.push(problem);
                    if kept.len() == 25 {
                        break 'outer;
                    }
                }
            }
        }
    }
    Ok(kept)
}

/// Reference corpus: the two-commodity instance, three Pigou exponents, and
/// the affine corpus.
pub fn example_corpus(cfg: &SolverConfig) -> Result<Vec<RoutingProblem>> {
    let mut v = vec![fig1_instance(), pigou_instance(1)?, pigou_instance(2)?, pigou_instance(4)?];
    v.extend(affine_corpus(cfg)?);
    Ok(v)
}

// ---------------------------------------------------------------------------
// Instance analysis

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PoaReport {
    pub instance: String,
    pub mechanism: Option<Mechanism>,
    pub s_l: f64,
    pub s_u: f64,
    pub nash_latency: f64,
    pub opt_latency: f64,
    pub poa: f64,
    pub bound: Option<f64>,
    pub within_bound: Option<bool>,
    pub converged: bool,
}

/// Worst-case equilibrium latency over the sensitivity range against the
/// optimum, with an optional guarantee to compare against.
pub fn poa_instance(
    problem: &RoutingProblem,
    mechanism: Option<&Mechanism>,
    s_l: f64,
    s_u: f64,
    bound: Option<f64>,
    cfg: &SolverConfig,
) -> Result<PoaReport> {
    check_pair(s_l, s_u)?;
    let paths = problem.enumerate_paths(cfg.path_count_cap)?;
    let opt = social_optimum(problem, &paths, cfg)?;
    let opt_latency = total_latency(problem, &opt.flow)?;
    if opt_latency <= 1e-12 {
        return Err(invalid(format!(
            "instance {:?} has zero optimal latency; inefficiency is undefined",
            problem.id
        )));
    }
    let worst = worst_nash_latency(problem, &paths, mechanism, s_l, s_u, cfg)?;
    let poa = worst.latency / opt_latency;
    let within_bound = bound.map(|b| poa <= b * (1.0 + 1e-7) + 1e-9);
    Ok(PoaReport {
        instance: problem.id.clone(),
        mechanism: mechanism.cloned(),
        s_l,
        s_u,
        nash_latency: worst.latency,
        opt_latency,
        poa,
        bound,
        within_bound,
        converged: opt.converged && worst.all_converged,
    })
}

// ---------------------------------------------------------------------------
// Sweeps

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SweepPreset {
    /// Homogeneous budget sweep: bounded toll vs subsidy guarantees over
    /// β ∈ [0, 1], with empirical ratios on the tight Pigou family.
    Fig3,
    /// Heterogeneity sweep over the ratio s_u/s_l: scaled marginal-cost toll
    /// vs its subsidy equivalent, population normalized to [s_l/s_u, 1],
    /// empirical ratios on the demand-2 Pigou network.
    Fig4,
    /// Robust-incentive sweep at β = 0.4 over s_u with s_l·s_u = 1: robust
    /// toll vs robust subsidy, crossing at s_u = 2.5.
    Fig5,
}

impl SweepPreset {
    pub fn parse(name: &str) -> Result<SweepPreset> {
        match name {
            "fig3" => Ok(SweepPreset::Fig3),
            "fig4" => Ok(SweepPreset::Fig4),
            "fig5" => Ok(SweepPreset::Fig5),
            _ => Err(invalid(format!("unknown sweep preset {name:?} (want fig3|fig4|fig5)"))),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            SweepPreset::Fig3 => "fig3",
            SweepPreset::Fig4 => "fig4",
            SweepPreset::Fig5 => "fig5",
        }
    }

    pub fn params(&self) -> Vec<f64> {
        match self {
            // β over [0, 1], 101 uniform points
            SweepPreset::Fig3 => grid(0.0, 1.0, 101),
            // ratio s_u/s_l over [1, 16]
            SweepPreset::Fig4 => grid(1.0, 16.0, 101),
            // s_u over [1, 4] with s_l = 1/s_u; 2.5 falls on the grid
            SweepPreset::Fig5 => grid(1.0, 4.0, 101),
        }
    }
}

fn grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    (0..n).map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64).collect()
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SweepRow {
    pub param: f64,
    pub toll_bound: f64,
    pub subsidy_bound: f64,
    pub empirical_toll: Option<f64>,
    pub empirical_subsidy: Option<f64>,
    pub instance_id: String,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BoundCurve {
    pub preset: String,
    pub rows: Vec<SweepRow>,
}

/// One sweep row; pure in (preset, param), so rows can be computed in any
/// order or in parallel.
pub fn sweep_row(
    preset: SweepPreset,
    param: f64,
    empirical: bool,
    cfg: &SolverConfig,
) -> Result<SweepRow> {
    match preset {
        SweepPreset::Fig3 => {
            let beta = param;
            let toll_bound = poa_bound_prop1_toll(beta)?;
            let subsidy_bound = poa_bound_prop1_subsidy(beta)?;
            let (mut empirical_toll, mut empirical_subsidy) = (None, None);
            if empirical {
                let tp = tight_toll_witness(beta)?;
                let tm = opt_bounded_toll_affine(beta)?;
                empirical_toll =
                    Some(poa_instance(&tp, Some(&tm), 1.0, 1.0, None, cfg)?.poa);
                let sp = tight_subsidy_witness(beta)?;
                let sm = opt_bounded_subsidy_affine(beta)?;
                empirical_subsidy =
                    Some(poa_instance(&sp, Some(&sm), 1.0, 1.0, None, cfg)?.poa);
            }
            Ok(SweepRow {
                param,
                toll_bound,
                subsidy_bound,
                empirical_toll,
                empirical_subsidy,
                instance_id: "tight-pigou".into(),
            })
        }
        SweepPreset::Fig4 => {
            // population normalized so the upper sensitivity is 1
            let (s_l, s_u) = (1.0 / param, 1.0);
            let toll_bound = poa_bound_prop2_smc(s_l / s_u)?;
            let subsidy_bound = poa_bound_prop2_nes(s_l, s_u)?;
            let (mut empirical_toll, mut empirical_subsidy) = (None, None);
            if empirical {
                let p = pigou_rate2();
                let smc = crate::incentive::scaled_mc_toll(s_l, s_u)?;
                empirical_toll =
                    Some(poa_instance(&p, Some(&smc), s_l, s_u, None, cfg)?.poa);
                let nes = nes_subsidy(s_l, s_u)?;
                empirical_subsidy =
                    Some(poa_instance(&p, Some(&nes), s_l, s_u, None, cfg)?.poa);
            }
            Ok(SweepRow {
                param,
                toll_bound,
                subsidy_bound,
                empirical_toll,
                empirical_subsidy,
                instance_id: "pigou-rate2".into(),
            })
        }
        SweepPreset::Fig5 => {
            let beta = 0.4;
            let s_u = param;
            let s_l = 1.0 / s_u;
            let toll_bound = poa_bound_prop3_toll(beta, s_l, s_u)?;
            let subsidy_bound = poa_bound_prop4_subsidy(beta, s_l, s_u)?;
            let (mut empirical_toll, mut empirical_subsidy) = (None, None);
            if empirical {
                let p = pigou_rate2();
                let (k1, k2) = opt_robust_toll_coeffs(beta, s_l, s_u)?;
                let toll = crate::incentive::affine_mechanism(k1, k2)?;
                empirical_toll =
                    Some(poa_instance(&p, Some(&toll), s_l, s_u, None, cfg)?.poa);
                let (k1, k2) = opt_robust_subsidy_coeffs(beta, s_l, s_u)?;
                let subsidy = crate::incentive::affine_mechanism(k1, k2)?;
                empirical_subsidy =
                    Some(poa_instance(&p, Some(&subsidy), s_l, s_u, None, cfg)?.poa);
            }
            Ok(SweepRow {
                param,
                toll_bound,
                subsidy_bound,
                empirical_toll,
                empirical_subsidy,
                instance_id: "pigou-rate2".into(),
            })
        }
    }
}

/// Runs a preset sweep; `jobs > 1` distributes rows across threads without
/// changing the output.
pub fn run_sweep(
    preset: SweepPreset,
    empirical: bool,
    cfg: &SolverConfig,
    jobs: usize,
) -> Result<BoundCurve> {
    let params = preset.params();
    let rows = if jobs <= 1 {
        params
            .iter()
            .map(|&p| sweep_row(preset, p, empirical, cfg))
            .collect::<Result<Vec<_>>>()?
    } else {
        parallel_map(&params, jobs, |p| sweep_row(preset, p, empirical, cfg))?
    };
    Ok(BoundCurve { preset: preset.name().to_string(), rows })
}

/// Index-preserving parallel map over a parameter list.
fn parallel_map<F>(params: &[f64], jobs: usize, f: F) -> Result<Vec<SweepRow>>
where
    F: Fn(f64) -> Result<SweepRow> + Sync,
{
    let mut out: Vec<Option<Result<SweepRow>>> = Vec::new();
    out.resize_with(params.len(), || None);
    let chunk = params.len().div_ceil(jobs);
    std::thread::scope(|scope| {
        let mut rest: &mut [Option<Result<SweepRow>>] = &mut out;
        let mut offset = 0;
        while offset < params.len() {
            let take = chunk.min(params.len() - offset);
            let (head, tail) = rest.split_at_mut(take);
            rest = tail;
            let slice = &params[offset..offset + take];
            let f = &f;
            scope.spawn(move || {
                for (slot, &p) in head.iter_mut().zip(slice) {
                    *slot = Some(f(p));
                }
            });
            offset += take;
        }
    });
    out.into_iter().map(|slot| slot.expect("worker filled slot")).collect()
}

/// Formats with 9 significant digits, shortest round-trip representation.
pub fn fmt_sig9(x: f64) -> String {
    if x == 0.0 {
        return "0".to_string();
    }
    let rounded: f64 = format!("{x:.8e}").parse().expect("float round trip");
    format!("{rounded}")
}

impl BoundCurve {
    pub fn to_csv(&self) -> String {
        let mut out =
            String::from("param,toll_bound,subsidy_bound,empirical_toll,empirical_subsidy,instance_id\n");
        for r in &self.rows {
            let opt = |v: Option<f64>| v.map(fmt_sig9).unwrap_or_default();
            out.push_str(&format!(
                "{},{},{},{},{},{}\n",
                fmt_sig9(r.param),
                fmt_sig9(r.toll_bound),
                fmt_sig9(r.subsidy_bound),
                opt(r.empirical_toll),
                opt(r.empirical_subsidy),
                r.instance_id
            ));
        }
        out
    }
}
