//! Monetary incentives: marginal-cost tolls, bounded tolls and subsidies,
//! heterogeneity-robust variants, and the scaling transform that maps any
//! incentive to a family of equivalent ones.

use serde::{Deserialize, Serialize};

use crate::latency::{LatencyFn, Poly};
use crate::network::RoutingProblem;
use crate::{invalid, Result};

/// Sign pattern of an incentive on the relevant flow range.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SignClass {
    Toll,
    Subsidy,
    Mixed,
}

/// A per-edge incentive: a money polynomial in the edge flow plus its sign
/// class on the flow range it was classified over.
#[derive(Debug, Clone, PartialEq)]
pub struct Incentive {
    pub money: Poly,
    pub sign: SignClass,
}

/// Classify a money polynomial on `[0, demand]` (zero counts as a toll).
pub fn classify_sign(money: &Poly, demand: f64) -> SignClass {
    let mut nonneg = true;
    let mut nonpos = true;
    for i in 0..=1000 {
        let f = demand * i as f64 / 1000.0;
        let v = money.eval(f);
        if v < -1e-12 {
            nonneg = false;
        }
        if v > 1e-12 {
            nonpos = false;
        }
    }
    if nonneg {
        SignClass::Toll
    } else if nonpos {
        SignClass::Subsidy
    } else {
        SignClass::Mixed
    }
}

/// Incentive mechanism catalog. Every mechanism maps an edge latency to a
/// money polynomial; all of them are latency-aware but flow-agnostic (the
/// designer never observes the realized flow).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "params", rename_all = "kebab-case")]
pub enum Mechanism {
    /// Marginal-cost toll f·ℓ'(f).
    Mc,
    /// Scaled marginal-cost toll a·f/√(s_l·s_u) for affine latencies.
    Smc { s_l: f64, s_u: f64 },
    /// Coefficient mechanism k1·a·f + k2·b for affine latencies.
    Affine { k1: f64, k2: f64 },
    /// β-bounded toll min(β,1)·a·f, optimal among bounded tolls on affine
    /// latencies with homogeneous users.
    OptToll { beta: f64 },
    /// β-bounded subsidy −min(β,1/2)·b, the subsidy counterpart.
    OptSubsidy { beta: f64 },
    /// Scaling transform of an inner mechanism: T_λ = λ·T + (λ−1)·ℓ.
    Nominal { lambda: f64, inner: Box<Mechanism> },
}

pub fn mc_toll() -> Mechanism {
    Mechanism::Mc
}

pub fn scaled_mc_toll(s_l: f64, s_u: f64) -> Result<Mechanism> {
    check_bounds_pair(s_l, s_u)?;
    Ok(Mechanism::Smc { s_l, s_u })
}

pub fn affine_mechanism(k1: f64, k2: f64) -> Result<Mechanism> {
    if !k1.is_finite() || !k2.is_finite() {
        return Err(invalid("affine mechanism coefficients must be finite"));
    }
    Ok(Mechanism::Affine { k1, k2 })
}

pub fn opt_bounded_toll_affine(beta: f64) -> Result<Mechanism> {
    check_beta(beta)?;
    Ok(Mechanism::OptToll { beta })
}

pub fn opt_bounded_subsidy_affine(beta: f64) -> Result<Mechanism> {
    check_beta(beta)?;
    Ok(Mechanism::OptSubsidy { beta })
}

/// Wraps `inner` in the scaling transform with parameter `lambda`.
///
/// Users who optimize ℓ + s·T_λ behave exactly like users with pushed-forward
/// sensitivity optimizing ℓ + ŝ·T, so equilibria are preserved up to the class
/// relabeling.
pub fn nominal_equivalent(inner: Mechanism, lambda: f64) -> Result<Mechanism> {
    if !lambda.is_finite() || lambda <= 0.0 {
        return Err(invalid(format!("transform parameter must be > 0 (got {lambda})")));
    }
    Ok(Mechanism::Nominal { lambda, inner: Box::new(inner) })
}

/// Subsidy-only equivalent of the scaled marginal-cost toll: the transform at
/// λ = 1/(1 + 1/√(s_l·s_u)), which yields −b/(1+√(s_l·s_u)) on each edge.
pub fn nes_subsidy(s_l: f64, s_u: f64) -> Result<Mechanism> {
    let smc = scaled_mc_toll(s_l, s_u)?;
    let k = 1.0 / (s_l * s_u).sqrt();
    nominal_equivalent(smc, 1.0 / (1.0 + k))
}

fn check_beta(beta: f64) -> Result<()> {
    if !beta.is_finite() || beta < 0.0 {
        return Err(invalid(format!("budget parameter must be finite and ≥ 0 (got {beta})")));
    }
    Ok(())
}

fn check_bounds_pair(s_l: f64, s_u: f64) -> Result<()> {
    if !s_l.is_finite() || !s_u.is_finite() || s_l <= 0.0 || s_u < s_l {
        return Err(invalid(format!(
            "sensitivity bounds need 0 < s_l ≤ s_u (got [{s_l}, {s_u}])"
        )));
    }
    Ok(())
}

impl Mechanism {
    /// Parameter validation, for mechanisms built via deserialization.
    pub fn validate(&self) -> Result<()> {
        match self {
            Mechanism::Mc => Ok(()),
            Mechanism::Smc { s_l, s_u } => check_bounds_pair(*s_l, *s_u),
            Mechanism::Affine { k1, k2 } => {
                if !k1.is_finite() || !k2.is_finite() {
                    return Err(invalid("affine mechanism coefficients must be finite"));
                }
                Ok(())
            }
            Mechanism::OptToll { beta } | Mechanism::OptSubsidy { beta } => check_beta(*beta),
            Mechanism::Nominal { lambda, inner } => {
                if !lambda.is_finite() || *lambda <= 0.0 {
                    return Err(invalid(format!(
                        "transform parameter must be > 0 (got {lambda})"
                    )));
                }
                inner.validate()
            }
        }
    }

    /// Money polynomial for one edge latency.
    pub fn apply(&self, latency: &LatencyFn) -> Result<Poly> {
        self.validate()?;
        match self {
            Mechanism::Mc => Ok(latency.as_poly().flow_times_derivative()),
            Mechanism::Smc { s_l, s_u } => {
                let (a, _) = require_affine(latency, "scaled marginal-cost toll")?;
                Ok(Poly::new(vec![0.0, a / (s_l * s_u).sqrt()]))
            }
            Mechanism::Affine { k1, k2 } => {
                let (a, b) = require_affine(latency, "affine coefficient mechanism")?;
                Ok(Poly::new(vec![k2 * b, k1 * a]))
            }
            Mechanism::OptToll { beta } => {
                let (a, _) = require_affine(latency, "bounded toll")?;
                Ok(Poly::new(vec![0.0, beta.min(1.0) * a]))
            }
            Mechanism::OptSubsidy { beta } => {
                let (_, b) = require_affine(latency, "bounded subsidy")?;
                Ok(Poly::new(vec![-beta.min(0.5) * b]))
            }
            Mechanism::Nominal { lambda, inner } => {
                let t = inner.apply(latency)?;
                Ok(t.scale(*lambda).add(&latency.as_poly().scale(lambda - 1.0)))
            }
        }
    }

    /// Money polynomial and sign class for every edge of a problem.
    pub fn materialize(&self, problem: &RoutingProblem) -> Result<Vec<Incentive>> {
        let demand = problem.total_demand();
        problem
            .edges
            .iter()
            .map(|e| {
                let money = self.apply(&e.latency).map_err(|err| {
                    invalid(format!("edge {:?}: {err}", e.id))
                })?;
                let sign = classify_sign(&money, demand);
                Ok(Incentive { money, sign })
            })
            .collect()
    }

    pub fn describe(&self) -> String {
        match self {
            Mechanism::Mc => "mc".to_string(),
            Mechanism::Smc { s_l, s_u } => format!("smc(s_l={s_l}, s_u={s_u})"),
            Mechanism::Affine { k1, k2 } => format!("affine(k1={k1}, k2={k2})"),
            Mechanism::OptToll { beta } => format!("opt-toll(beta={beta})"),
            Mechanism::OptSubsidy { beta } => format!("opt-subsidy(beta={beta})"),
            Mechanism::Nominal { lambda, inner } => {
                format!("nominal({}, lambda={lambda})", inner.describe())
            }
        }
    }
}

fn require_affine(latency: &LatencyFn, what: &str) -> Result<(f64, f64)> {
    latency
        .as_affine()
        .ok_or_else(|| invalid(format!("{what} is defined for affine latencies only")))
}

/// Robust bounded-toll coefficients (k1*, k2*) for sensitivity range
/// [s_l, s_u]: k1* = β and k2* = max{0, (β²·s_l·s_u − 1)/(s_l + s_u + 2β·s_l·s_u)}.
pub fn opt_robust_toll_coeffs(beta: f64, s_l: f64, s_u: f64) -> Result<(f64, f64)> {
    check_beta(beta)?;
    check_bounds_pair(s_l, s_u)?;
    let k2 = ((beta * beta * s_l * s_u - 1.0) / (s_l + s_u + 2.0 * beta * s_l * s_u)).max(0.0);
    Ok((beta, k2))
}

/// Robust bounded-subsidy coefficients: (0, −min{β, 1/(s_l + s_u)}).
pub fn opt_robust_subsidy_coeffs(beta: f64, s_l: f64, s_u: f64) -> Result<(f64, f64)> {
    check_beta(beta)?;
    check_bounds_pair(s_l, s_u)?;
    Ok((0.0, -beta.min(1.0 / (s_l + s_u))))
}

/// Sensitivity relabeling induced by the scaling transform with parameter λ:
/// a user of sensitivity s facing T_λ behaves like one of sensitivity
/// ŝ = s/(λ + s(1−λ)) facing T.
pub fn sensitivity_pushforward(s: f64, lambda: f64) -> Result<f64> {
    if !s.is_finite() || s <= 0.0 {
        return Err(invalid(format!("sensitivity must be > 0 (got {s})")));
    }
    if !lambda.is_finite() || lambda <= 0.0 {
        return Err(invalid(format!("transform parameter must be > 0 (got {lambda})")));
    }
    let denom = lambda + s * (1.0 - lambda);
    if denom <= 0.0 {
        return Err(invalid(format!(
            "pushforward undefined: λ + s(1−λ) = {denom} ≤ 0 for s={s}, λ={lambda}"
        )));
    }
    Ok(s / denom)
}

/// Positive factor relating the two cost scales in the pushforward
/// equivalence: a class-s cost under T_λ equals this factor times the
/// corresponding class-ŝ cost under T.
pub fn pushforward_cost_scale(s: f64, lambda: f64) -> Result<f64> {
    let denom = lambda + s * (1.0 - lambda);
    sensitivity_pushforward(s, lambda)?;
    Ok(lambda / denom)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SensitivityClass {
    pub fraction: f64,
    pub sensitivity: f64,
}

/// Population heterogeneity: per OD pair, a finite mix of price-sensitivity
/// classes, plus the declared sensitivity range [s_min, s_max].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SensitivityProfile {
    pub per_od: Vec<Vec<SensitivityClass>>,
    pub s_min: f64,
    pub s_max: f64,
}

impl SensitivityProfile {
    pub fn new(per_od: Vec<Vec<SensitivityClass>>, s_min: f64, s_max: f64) -> Result<SensitivityProfile> {
        check_bounds_pair(s_min, s_max)?;
        if per_od.is_empty() {
            return Err(invalid("profile needs at least one od group"));
        }
        for (k, classes) in per_od.iter().enumerate() {
            if classes.is_empty() {
                return Err(invalid(format!("od {k} has no sensitivity classes")));
            }
            let mut mass = 0.0;
            for c in classes {
                if !c.fraction.is_finite() || c.fraction < 0.0 {
                    return Err(invalid(format!("od {k}: class fraction must be ≥ 0")));
                }
                if !c.sensitivity.is_finite()
                    || c.sensitivity < s_min - 1e-12
                    || c.sensitivity > s_max + 1e-12
                {
                    return Err(invalid(format!(
                        "od {k}: sensitivity {} outside declared range [{s_min}, {s_max}]",
                        c.sensitivity
                    )));
                }
                mass += c.fraction;
            }
            if (mass - 1.0).abs() > 1e-9 {
                return Err(invalid(format!("od {k}: class fractions sum to {mass}, want 1")));
            }
        }
        Ok(SensitivityProfile { per_od, s_min, s_max })
    }

    pub fn homogeneous(n_ods: usize, s: f64) -> Result<SensitivityProfile> {
        SensitivityProfile::new(
            vec![vec![SensitivityClass { fraction: 1.0, sensitivity: s }]; n_ods],
            s,
            s,
        )
    }

    /// Every OD pair split θ : (1−θ) between sensitivities s_l and s_u.
    pub fn two_class(n_ods: usize, s_l: f64, s_u: f64, theta: f64) -> Result<SensitivityProfile> {
        if !(0.0..=1.0).contains(&theta) {
            return Err(invalid(format!("mass split must lie in [0, 1] (got {theta})")));
        }
        let mut classes = Vec::new();
        if theta > 0.0 {
            classes.push(SensitivityClass { fraction: theta, sensitivity: s_l });
        }
        if theta < 1.0 {
            classes.push(SensitivityClass { fraction: 1.0 - theta, sensitivity: s_u });
        }
        SensitivityProfile::new(vec![classes; n_ods], s_l, s_u)
    }

    pub fn n_ods(&self) -> usize {
        self.per_od.len()
    }

    pub fn is_homogeneous(&self) -> bool {
        let mut s = None;
        for classes in &self.per_od {
            for c in classes {
                match s {
                    None => s = Some(c.sensitivity),
                    Some(v) if (v - c.sensitivity).abs() <= 0.0 => {}
                    _ => return false,
                }
            }
        }
        true
    }

    /// Relabels every class through the pushforward; errors if any class (or
    /// range endpoint) lands outside the transform's domain.
    pub fn pushforward(&self, lambda: f64) -> Result<SensitivityProfile> {
        let per_od = self
            .per_od
            .iter()
            .map(|classes| {
                classes
                    .iter()
                    .map(|c| {
                        Ok(SensitivityClass {
                            fraction: c.fraction,
                            sensitivity: sensitivity_pushforward(c.sensitivity, lambda)?,
                        })
                    })
                    .collect::<Result<Vec<_>>>()
            })
            .collect::<Result<Vec<_>>>()?;
        let s_min = sensitivity_pushforward(self.s_min, lambda)?;
        let s_max = sensitivity_pushforward(self.s_max, lambda)?;
        SensitivityProfile::new(per_od, s_min, s_max)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ViolationKind {
    /// |incentive| exceeds β·latency at the witness flow.
    Magnitude,
    /// Incentive has the wrong sign for the claimed class.
    Sign,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum BoundCheck {
    /// Bound holds everywhere; `tight` if every edge attains |τ| = β·ℓ at
    /// some flow where the cap is meaningful (β·ℓ > 0, or β = 0).
    Ok { tight: bool },
    Violated { kind: ViolationKind, edge: String, flow: f64, incentive: f64, bound: f64 },
}

/// Grid-checks |τ_e(f)| ≤ β·ℓ_e(f) and the claimed sign on [0, total demand]
/// for every edge (1001 points, endpoints included).
pub fn check_bound(
    mechanism: &Mechanism,
    problem: &RoutingProblem,
    beta: f64,
    sign: SignClass,
) -> Result<BoundCheck> {
    check_beta(beta)?;
    if sign == SignClass::Mixed {
        return Err(invalid("bound check needs a definite sign class (toll or subsidy)"));
    }
    let incentives = mechanism.materialize(problem)?;
    let demand = problem.total_demand();
    let mut all_tight = true;
    for (e, inc) in problem.edges.iter().zip(&incentives) {
        let mut edge_tight = false;
        for i in 0..=1000 {
            let f = demand * i as f64 / 1000.0;
            let tau = inc.money.eval(f);
            let ell = e.latency.eval(f);
            let cap = beta * ell;
            let tol = 1e-9 * cap.abs().max(1.0);
            if tau.abs() > cap + tol {
                return Ok(BoundCheck::Violated {
                    kind: ViolationKind::Magnitude,
                    edge: e.id.clone(),
                    flow: f,
                    incentive: tau,
                    bound: cap,
                });
            }
            let sign_tol = 1e-9 * ell.abs().max(1.0);
            let wrong_sign = match sign {
                SignClass::Toll => tau < -sign_tol,
                SignClass::Subsidy => tau > sign_tol,
                SignClass::Mixed => unreachable!(),
            };
            if wrong_sign {
                return Ok(BoundCheck::Violated {
                    kind: ViolationKind::Sign,
                    edge: e.id.clone(),
                    flow: f,
                    incentive: tau,
                    bound: 0.0,
                });
            }
            // The cap only "binds" where β·ℓ > 0; a zero cap is attained
            // trivially and says nothing unless β itself is zero.
            if (tau.abs() - cap).abs() <= tol && (beta == 0.0 || cap > 1e-12) {
                edge_tight = true;
            }
        }
        all_tight &= edge_tight;
    }
    Ok(BoundCheck::Ok { tight: all_tight })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::network::{Edge, OdPair};

    fn affine_net(edges: &[(f64, f64)], rate: f64) -> RoutingProblem {
        let v: Vec<String> = ["s", "t"].iter().map(|s| s.to_string()).collect();
        let es = edges
            .iter()
            .enumerate()
            .map(|(i, &(a, b))| Edge {
                id: format!("e{}", i + 1),
                tail: 0,
                head: 1,
                latency: LatencyFn::affine(a, b),
            })
            .collect();
        RoutingProblem::new("net", v, es, vec![OdPair { origin: 0, dest: 1, rate }]).unwrap()
    }

    #[test]
    fn mc_toll_on_polynomial() {
        let tau = mc_toll().apply(&LatencyFn::poly(vec![0.0, 0.0, 4.0])).unwrap();
        assert_eq!(tau.coeffs, vec![0.0, 0.0, 8.0]);
    }

    #[test]
    fn scaling_transform_of_mc() {
        // λ = 1/3 on 2f: λ·(2f) + (λ−1)·(2f) = −(2/3)f
        let m = nominal_equivalent(mc_toll(), 1.0 / 3.0).unwrap();
        let tau = m.apply(&LatencyFn::affine(2.0, 0.0)).unwrap();
        assert_eq!(tau.degree(), 1);
        assert!((tau.coeff(1) + 2.0 / 3.0).abs() < 1e-12);

        // constant latency 1/2: toll part vanishes, subsidy (λ−1)·b = −1/3
        let tau = m.apply(&LatencyFn::affine(0.0, 0.5)).unwrap();
        assert!((tau.coeff(0) + 1.0 / 3.0).abs() < 1e-12);

        // degree-2 latency at λ = 1/3: λ·2ℓ + (λ−1)ℓ cancels (up to rounding)
        let tau = m.apply(&LatencyFn::poly(vec![0.0, 0.0, 4.0])).unwrap();
        assert!(tau.coeffs.iter().all(|c| c.abs() < 1e-12));
    }

    #[test]
    fn smc_and_nes() {
        // smc divides the slope by √(s_l·s_u)
        let m = scaled_mc_toll(1.0, 4.0).unwrap();
        let tau = m.apply(&LatencyFn::affine(3.0, 7.0)).unwrap();
        assert_eq!(tau.coeffs, vec![0.0, 1.5]);

        // nes keeps only a constant subsidy −b/(1+√(s_l·s_u))
        let m = nes_subsidy(1.0, 4.0).unwrap();
        let tau = m.apply(&LatencyFn::affine(3.0, 7.0)).unwrap();
        assert_eq!(tau.degree(), 0);
        assert!((tau.coeff(0) + 7.0 / 3.0).abs() < 1e-12);

        // with unit sensitivities it is exactly −b/2
        let m = nes_subsidy(1.0, 1.0).unwrap();
        let tau = m.apply(&LatencyFn::affine(3.0, 7.0)).unwrap();
        assert!((tau.coeff(0) + 3.5).abs() < 1e-12);
    }

    #[test]
    fn bounded_toll_and_subsidy_clip() {
        let l = LatencyFn::affine(2.0, 3.0);
        let t = opt_bounded_toll_affine(0.4).unwrap().apply(&l).unwrap();
        assert_eq!(t.coeffs, vec![0.0, 0.8]);
        let t = opt_bounded_toll_affine(5.0).unwrap().apply(&l).unwrap();
        assert_eq!(t.coeffs, vec![0.0, 2.0]); // clipped at β = 1

        let s = opt_bounded_subsidy_affine(0.3).unwrap().apply(&l).unwrap();
        assert!((s.coeff(0) + 0.9).abs() < 1e-12);
        let s = opt_bounded_subsidy_affine(5.0).unwrap().apply(&l).unwrap();
        assert!((s.coeff(0) + 1.5).abs() < 1e-12); // clipped at β = 1/2
    }

    #[test]
    fn smc_rejects_nonaffine() {
        let err = scaled_mc_toll(1.0, 4.0)
            .unwrap()
            .apply(&LatencyFn::poly(vec![0.0, 0.0, 1.0]))
            .unwrap_err();
        assert!(err.to_string().contains("affine"));
    }

    #[test]
    fn robust_coefficients() {
        // k2 engages once β²·s_l·s_u > 1
        let (k1, k2) = opt_robust_toll_coeffs(0.5, 1.0, 4.0).unwrap();
        assert_eq!((k1, k2), (0.5, 0.0));
        let (k1, k2) = opt_robust_toll_coeffs(2.0, 0.5, 2.0).unwrap();
        assert_eq!(k1, 2.0);
        assert!((k2 - 6.0 / 13.0).abs() < 1e-12);

        let (k1, k2) = opt_robust_subsidy_coeffs(0.5, 1.0, 4.0).unwrap();
        assert_eq!(k1, 0.0);
        assert!((k2 + 0.2).abs() < 1e-12); // min(0.5, 1/5)
        let (_, k2) = opt_robust_subsidy_coeffs(0.1, 1.0, 4.0).unwrap();
        assert!((k2 + 0.1).abs() < 1e-12);
    }

    #[test]
    fn pushforward_values() {
        assert!((sensitivity_pushforward(1.0, 0.25).unwrap() - 1.0).abs() < 1e-15);
        assert!((sensitivity_pushforward(2.0, 0.5).unwrap() - 4.0 / 3.0).abs() < 1e-12);
        // denominator hits zero at s = λ/(λ−1)
        assert!(sensitivity_pushforward(2.0, 2.0).is_err());
        assert!(sensitivity_pushforward(3.0, 2.0).is_err());
        assert!(sensitivity_pushforward(1.9, 2.0).is_ok());
    }

    #[test]
    fn pushforward_profile_maps_bounds() {
        let p = SensitivityProfile::two_class(2, 0.5, 1.5, 0.25).unwrap();
        let q = p.pushforward(0.5).unwrap();
        assert!((q.s_min - 0.5 / (0.5 + 0.25)).abs() < 1e-12);
        assert!((q.s_max - 1.5 / (0.5 + 0.75)).abs() < 1e-12);
        assert_eq!(q.per_od.len(), 2);
        assert_eq!(q.per_od[0][0].fraction, 0.25);
    }

    #[test]
    fn profile_validation() {
        assert!(SensitivityProfile::homogeneous(1, 1.0).is_ok());
        assert!(SensitivityProfile::homogeneous(1, 0.0).is_err());
        assert!(SensitivityProfile::two_class(1, 1.0, 4.0, 1.5).is_err());
        // fractions must sum to one
        let bad = SensitivityProfile::new(
            vec![vec![SensitivityClass { fraction: 0.7, sensitivity: 1.0 }]],
            1.0,
            1.0,
        );
        assert!(bad.is_err());
        // class outside declared range
        let bad = SensitivityProfile::new(
            vec![vec![SensitivityClass { fraction: 1.0, sensitivity: 5.0 }]],
            1.0,
            4.0,
        );
        assert!(bad.is_err());
    }

    #[test]
    fn mechanism_json_shapes() {
        let cases = [
            (mc_toll(), r#"{"kind":"mc"}"#),
            (
                scaled_mc_toll(1.0, 4.0).unwrap(),
                r#"{"kind":"smc","params":{"s_l":1.0,"s_u":4.0}}"#,
            ),
            (
                affine_mechanism(0.5, 0.25).unwrap(),
                r#"{"kind":"affine","params":{"k1":0.5,"k2":0.25}}"#,
            ),
            (
                opt_bounded_toll_affine(0.4).unwrap(),
                r#"{"kind":"opt-toll","params":{"beta":0.4}}"#,
            ),
            (
                opt_bounded_subsidy_affine(0.4).unwrap(),
                r#"{"kind":"opt-subsidy","params":{"beta":0.4}}"#,
            ),
            (
                nominal_equivalent(mc_toll(), 0.5).unwrap(),
                r#"{"kind":"nominal","params":{"lambda":0.5,"inner":{"kind":"mc"}}}"#,
            ),
        ];
        for (m, want) in cases {
            assert_eq!(serde_json::to_string(&m).unwrap(), want);
            assert_eq!(serde_json::from_str::<Mechanism>(want).unwrap(), m);
        }
    }

    #[test]
    fn bound_check_zero_mechanism() {
        let p = affine_net(&[(1.0, 0.0), (0.0, 1.0)], 1.0);
        let zero = affine_mechanism(0.0, 0.0).unwrap();
        // β = 0: the zero incentive is feasible and trivially tight
        assert_eq!(
            check_bound(&zero, &p, 0.0, SignClass::Toll).unwrap(),
            BoundCheck::Ok { tight: true }
        );
        // β > 0: feasible but not tight (cap never attained where it binds)
        assert_eq!(
            check_bound(&zero, &p, 0.3, SignClass::Toll).unwrap(),
            BoundCheck::Ok { tight: false }
        );
    }

    #[test]
    fn bound_check_tight_toll_on_pure_linear_network() {
        // β ≤ 1 toll attains β·a·f = β·ℓ everywhere when all offsets are zero
        let p = affine_net(&[(1.0, 0.0), (2.0, 0.0)], 1.0);
        let m = opt_bounded_toll_affine(0.4).unwrap();
        assert_eq!(
            check_bound(&m, &p, 0.4, SignClass::Toll).unwrap(),
            BoundCheck::Ok { tight: true }
        );
        // same mechanism checked against a looser budget: feasible, not tight
        assert_eq!(
            check_bound(&m, &p, 0.5, SignClass::Toll).unwrap(),
            BoundCheck::Ok { tight: false }
        );
    }

    #[test]
    fn bound_check_catches_violations() {
        let p = affine_net(&[(1.0, 1.0)], 1.0);
        // k1 = 1 toll against budget β = 0.5: at f = 1, τ = 1 > 0.5·ℓ = 1 ⇒ fails
        // once f·a > β·(a·f+b) ⇔ f > 1 ⇒ within range only if rate > 1
        let p2 = affine_net(&[(1.0, 1.0)], 3.0);
        let m = affine_mechanism(1.0, 0.0).unwrap();
        assert!(matches!(
            check_bound(&m, &p2, 0.5, SignClass::Toll).unwrap(),
            BoundCheck::Violated { kind: ViolationKind::Magnitude, .. }
        ));

        // subsidy claimed but toll produced
        let m = affine_mechanism(0.5, 0.0).unwrap();
        assert!(matches!(
            check_bound(&m, &p, 0.5, SignClass::Subsidy).unwrap(),
            BoundCheck::Violated { kind: ViolationKind::Sign, .. }
        ));
    }

    #[test]
    fn transform_composition_is_multiplicative() {
        let base = mc_toll();
        let l = LatencyFn::affine(1.5, 0.75);
        let twice = nominal_equivalent(
            nominal_equivalent(base.clone(), 0.6).unwrap(),
            0.5,
        )
        .unwrap();
        let once = nominal_equivalent(base, 0.3).unwrap();
        let a = twice.apply(&l).unwrap();
        let b = once.apply(&l).unwrap();
        assert_eq!(a.degree(), b.degree());
        for i in 0..=a.degree() {
            assert!((a.coeff(i) - b.coeff(i)).abs() < 1e-12);
        }
    }

    #[test]
    fn cost_scale_positive_on_domain() {
        let scale = pushforward_cost_scale(2.0, 0.5).unwrap();
        assert!((scale - 0.5 / 1.5).abs() < 1e-12);
        assert!(pushforward_cost_scale(2.0, 2.0).is_err());
    }
}
