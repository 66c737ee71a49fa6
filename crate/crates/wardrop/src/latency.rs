//! Polynomial latency functions and their calculus.

use serde::{Deserialize, Serialize};

use crate::network::{FlowAssignment, RoutingProblem};
use crate::{invalid, Result};

/// Dense univariate polynomial, coefficients in ascending powers.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Poly {
    pub coeffs: Vec<f64>,
}

impl Poly {
    /// Trailing zero coefficients are trimmed; the zero polynomial keeps `[0.0]`.
    pub fn new(coeffs: Vec<f64>) -> Poly {
        let mut p = Poly { coeffs };
        p.trim();
        p
    }

    pub fn zero() -> Poly {
        Poly { coeffs: vec![0.0] }
    }

    pub fn constant(c: f64) -> Poly {
        Poly::new(vec![c])
    }

    fn trim(&mut self) {
        while self.coeffs.len() > 1 && self.coeffs.last() == Some(&0.0) {
            self.coeffs.pop();
        }
        if self.coeffs.is_empty() {
            self.coeffs.push(0.0);
        }
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|&c| c == 0.0)
    }

    pub fn eval(&self, x: f64) -> f64 {
        // Horner.
        self.coeffs.iter().rev().fold(0.0, |acc, &c| acc * x + c)
    }

    pub fn derivative(&self) -> Poly {
        if self.coeffs.len() <= 1 {
            return Poly::zero();
        }
        Poly::new(
            self.coeffs[1..]
                .iter()
                .enumerate()
                .map(|(i, &c)| c * (i + 1) as f64)
                .collect(),
        )
    }

    /// The polynomial x·p'(x).
    pub fn flow_times_derivative(&self) -> Poly {
        Poly::new(
            self.coeffs
                .iter()
                .enumerate()
                .map(|(i, &c)| c * i as f64)
                .collect(),
        )
    }

    pub fn scale(&self, k: f64) -> Poly {
        Poly::new(self.coeffs.iter().map(|&c| c * k).collect())
    }

    pub fn add(&self, other: &Poly) -> Poly {
        let n = self.coeffs.len().max(other.coeffs.len());
        let mut out = vec![0.0; n];
        for (i, slot) in out.iter_mut().enumerate() {
            *slot = self.coeffs.get(i).copied().unwrap_or(0.0)
                + other.coeffs.get(i).copied().unwrap_or(0.0);
        }
        Poly::new(out)
    }

    pub fn coeff(&self, power: usize) -> f64 {
        self.coeffs.get(power).copied().unwrap_or(0.0)
    }
}

/// Edge latency: affine `a·f + b` or a general polynomial with nonnegative
/// coefficients. Both forms are nondecreasing on f ≥ 0.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum LatencyFn {
    Affine { a: f64, b: f64 },
    Poly { coeffs: Vec<f64> },
}

impl LatencyFn {
    pub fn affine(a: f64, b: f64) -> LatencyFn {
        LatencyFn::Affine { a, b }
    }

    pub fn poly(coeffs: Vec<f64>) -> LatencyFn {
        LatencyFn::Poly { coeffs }
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            LatencyFn::Affine { a, b } => {
                if !a.is_finite() || !b.is_finite() || *a < 0.0 || *b < 0.0 {
                    return Err(invalid(format!(
                        "affine latency needs finite a ≥ 0, b ≥ 0 (got a={a}, b={b})"
                    )));
                }
            }
            LatencyFn::Poly { coeffs } => {
                if coeffs.is_empty() {
                    return Err(invalid("polynomial latency needs at least one coefficient"));
                }
                for (i, c) in coeffs.iter().enumerate() {
                    if !c.is_finite() || *c < 0.0 {
                        return Err(invalid(format!(
                            "polynomial latency coefficient {i} must be finite and ≥ 0 (got {c})"
                        )));
                    }
                }
            }
        }
        Ok(())
    }

    /// Latency at flow `f`. Panics on negative flow: flows are physical
    /// quantities and a negative value means the caller broke an invariant.
    pub fn eval(&self, f: f64) -> f64 {
        assert!(f >= 0.0, "negative flow {f} passed to latency");
        match self {
            LatencyFn::Affine { a, b } => a * f + b,
            LatencyFn::Poly { coeffs } => Poly { coeffs: coeffs.clone() }.eval(f),
        }
    }

    pub fn derivative(&self, f: f64) -> f64 {
        assert!(f >= 0.0, "negative flow {f} passed to latency derivative");
        match self {
            LatencyFn::Affine { a, .. } => *a,
            LatencyFn::Poly { coeffs } => Poly { coeffs: coeffs.clone() }.derivative().eval(f),
        }
    }

    /// Marginal social cost ℓ(f) + f·ℓ'(f).
    pub fn marginal_cost(&self, f: f64) -> f64 {
        self.eval(f) + f * self.derivative(f)
    }

    pub fn as_poly(&self) -> Poly {
        match self {
            LatencyFn::Affine { a, b } => Poly::new(vec![*b, *a]),
            LatencyFn::Poly { coeffs } => Poly::new(coeffs.clone()),
        }
    }

    /// `(a, b)` when the latency is affine, including degree ≤ 1 polynomials.
    pub fn as_affine(&self) -> Option<(f64, f64)> {
        let p = self.as_poly();
        if p.degree() <= 1 {
            Some((p.coeff(1), p.coeff(0)))
        } else {
            None
        }
    }

    /// The marginal-cost polynomial ℓ(f) + f·ℓ'(f) as a `Poly`.
    pub fn marginal_cost_poly(&self) -> Poly {
        let p = self.as_poly();
        p.add(&p.flow_times_derivative())
    }
}

/// Per-edge cost experienced by a user: latency plus an additive money term
/// (an incentive already scaled by the user's price sensitivity).
#[derive(Debug, Clone)]
pub struct CostFunction {
    pub latency: LatencyFn,
    pub money: Poly,
}

impl CostFunction {
    pub fn latency_only(latency: LatencyFn) -> CostFunction {
        CostFunction { latency, money: Poly::zero() }
    }

    pub fn eval(&self, f: f64) -> f64 {
        self.latency.eval(f) + self.money.eval(f)
    }

    pub fn as_poly(&self) -> Poly {
        self.latency.as_poly().add(&self.money)
    }
}

/// Total latency Σ_e f_e·ℓ_e(f_e) of a feasible assignment.
///
/// Incentives never enter: money transfers cancel in the social objective.
pub fn total_latency(problem: &RoutingProblem, flow: &FlowAssignment) -> Result<f64> {
    flow.check_feasible(problem, 1e-7)?;
    Ok(problem
        .edges
        .iter()
        .zip(&flow.edge_flows)
        .map(|(e, &f)| f * e.latency.eval(f))
        .sum())
}
