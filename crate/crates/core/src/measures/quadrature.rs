//! Gauss–Legendre quadrature on the open half-line `(0, ∞)`.
//!
//! Nodes live on `t ∈ (0, 1)` and are mapped to the half-line by a fixed
//! substitution. Every node is stored through `ln λ` so that nodes far out
//! in either tail never overflow, and every weight is taken with respect to
//! `d(ln λ)`: a density `d(λ)` enters as `λ·d(λ)`.

use std::f64::consts::PI;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::scalar::Real;

/// Minimum number of nodes accepted by [`QuadSpec::new`].
pub const MIN_NODES: usize = 8;
/// Default number of nodes.
pub const DEFAULT_NODES: usize = 200;

/// A point of `(0, ∞)` stored by its logarithm.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HalfLinePoint<R> {
    ln: R,
}

impl<R: Real> HalfLinePoint<R> {
    /// Requires `0 < λ < ∞`.
    pub fn new(lambda: R) -> Self {
        debug_assert!(lambda > R::zero() && lambda.is_finite());
        HalfLinePoint { ln: lambda.ln() }
    }

    pub fn from_ln(ln: R) -> Self {
        HalfLinePoint { ln }
    }

    pub fn ln(self) -> R {
        self.ln
    }

    /// `λ`; underflows to 0 or overflows to ∞ far in the tails.
    pub fn value(self) -> R {
        self.ln.exp()
    }

    /// `1/λ`.
    pub fn recip(self) -> R {
        (-self.ln).exp()
    }

    /// `λ ⩽ 1`.
    pub fn is_lower(self) -> bool {
        self.ln <= R::zero()
    }

    /// The reflected point `1/λ`.
    pub fn reflect(self) -> Self {
        HalfLinePoint { ln: -self.ln }
    }
}

/// The map from `t ∈ (0, 1)` to `λ ∈ (0, ∞)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Substitution {
    /// `ln λ = −π·cot(π t)`, i.e. `ln λ = π·tan(φ)` with `φ` uniform on
    /// `(−π/2, π/2)`. Densities that are integrable against `d(ln λ)` with
    /// algebraic tails become smooth in `t`, so the rule converges rapidly.
    #[default]
    LogCauchy,
    /// `λ = t/(1 − t)`. Converges only algebraically when the density is
    /// unbounded at an end of the half-line.
    Rational,
}

#[derive(Debug, Clone, Copy)]
pub struct QuadNode<R> {
    pub point: HalfLinePoint<R>,
    /// Weight with respect to `d(ln λ)`.
    pub weight: R,
}

/// Node count, substitution and the precomputed node table.
#[derive(Clone)]
pub struct QuadSpec<R> {
    nodes: usize,
    substitution: Substitution,
    table: Arc<[QuadNode<R>]>,
}

impl<R> std::fmt::Debug for QuadSpec<R> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("QuadSpec")
            .field("nodes", &self.nodes)
            .field("substitution", &self.substitution)
            .finish()
    }
}

impl<R> PartialEq for QuadSpec<R> {
    fn eq(&self, other: &Self) -> bool {
        self.nodes == other.nodes && self.substitution == other.substitution
    }
}

impl<R: Real> Default for QuadSpec<R> {
    fn default() -> Self {
        Self::new(DEFAULT_NODES).expect("default node count is valid")
    }
}

impl<R: Real> QuadSpec<R> {
    pub fn new(nodes: usize) -> Result<Self> {
        Self::with_substitution(nodes, Substitution::default())
    }

    pub fn with_substitution(nodes: usize, substitution: Substitution) -> Result<Self> {
        if nodes < MIN_NODES {
            return Err(Error::InvalidParameter(format!(
                "quadrature needs at least {MIN_NODES} nodes, got {nodes}"
            )));
        }
        let table = gauss_legendre_unit::<R>(nodes)
            .into_iter()
            .map(|(t, one_minus_t, w)| map_node(t, one_minus_t, w, substitution))
            .collect::<Vec<_>>();
        Ok(QuadSpec {
            nodes,
            substitution,
            table: table.into(),
        })
    }

    pub fn node_count(&self) -> usize {
        self.nodes
    }

    pub fn substitution(&self) -> Substitution {
        self.substitution
    }

    pub fn nodes(&self) -> &[QuadNode<R>] {
        &self.table
    }

    /// `∫ h(ln λ) d(ln λ)` over the whole line.
    pub fn integrate_log(&self, h: impl Fn(HalfLinePoint<R>) -> R) -> R {
        self.table
            .iter()
            .fold(R::zero(), |acc, n| acc + n.weight * h(n.point))
    }
}

fn map_node<R: Real>(t: R, one_minus_t: R, w: R, substitution: Substitution) -> QuadNode<R> {
    let pi = R::pi();
    match substitution {
        Substitution::LogCauchy => {
            let half = R::lit(0.5);
            // the smaller of t, 1 − t keeps full relative precision
            let (near, sign) = if t <= half {
                (t, -R::one())
            } else {
                (one_minus_t, R::one())
            };
            let angle = pi * near;
            let ln = sign * pi * angle.cos() / angle.sin();
            let jac = pi * pi / (angle.sin() * angle.sin());
            QuadNode {
                point: HalfLinePoint::from_ln(ln),
                weight: w * jac,
            }
        }
        Substitution::Rational => QuadNode {
            point: HalfLinePoint::from_ln(t.ln() - one_minus_t.ln()),
            weight: w / (t * one_minus_t),
        },
    }
}

/// Gauss–Legendre rule on `(0, 1)` as `(t, 1 − t, weight)` triples,
/// ascending in `t`.
///
/// Newton iteration runs on the angle `θ` with `x = cos θ`, which gives
/// `t = cos²(θ/2)` and `1 − t = sin²(θ/2)` to full relative precision.
pub(crate) fn gauss_legendre_unit<R: Real>(n: usize) -> Vec<(R, R, R)> {
    let nr = R::lit(n as f64);
    let half = R::lit(0.5);
    let mut out = Vec::with_capacity(n);
    for i in 1..=n {
        let mut theta = R::lit(PI * (i as f64 - 0.25) / (n as f64 + 0.5));
        let mut deriv_core = R::one();
        for _ in 0..100 {
            let (p, q) = legendre_pair(n, theta.cos());
            let core = theta.cos() * p - q;
            // d/dθ P_n(cos θ) = n (x P_n − P_{n−1}) / sin θ
            let step = p * theta.sin() / (nr * core);
            theta -= step;
            deriv_core = core;
            if step.abs() <= R::default_epsilon() * R::lit(4.0) {
                let (p, q) = legendre_pair(n, theta.cos());
                deriv_core = theta.cos() * p - q;
                break;
            }
        }
        let s = theta.sin();
        let w = R::lit(2.0) * s * s / (nr * nr * deriv_core * deriv_core);
        let c = (theta * half).cos();
        let sn = (theta * half).sin();
        out.push((c * c, sn * sn, w * half));
    }
    out.reverse();
    out
}

/// `(P_n(x), P_{n−1}(x))` by the three-term recurrence.
fn legendre_pair<R: Real>(n: usize, x: R) -> (R, R) {
    let mut p_prev = R::one();
    let mut p = x;
    for k in 2..=n {
        let kr = R::lit(k as f64);
        let next = ((R::lit(2.0) * kr - R::one()) * x * p - (kr - R::one()) * p_prev) / kr;
        p_prev = p;
        p = next;
    }
    (p, p_prev)
}
