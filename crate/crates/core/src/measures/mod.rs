//! Finite Borel measures on the extended half-line `[0, ∞]`.
//!
//! A [`RepMeasure`] is an atom at 0, an atom at ∞, finitely many interior
//! atoms and an optional smooth density integrated by quadrature. The norm
//! of the cone is the total mass. Endpoint atoms are always integrated
//! exactly against values the integrand declares; quadrature only ever sees
//! the open half-line.

mod density;
mod quadrature;

pub use density::Density;
pub use quadrature::{HalfLinePoint, QuadNode, QuadSpec, Substitution, DEFAULT_NODES, MIN_NODES};

use std::fmt;

use crate::error::{Error, Result};
pub use crate::scalar::Accumulate;
use crate::scalar::Real;

/// Slack used by [`RepMeasure::leq`] for atom masses and density values.
pub const ORDER_SLACK: f64 = 1e-12;

/// An integrand on `[0, ∞]`: a function on the open half-line together with
/// its declared values at the two endpoints.
pub struct Integrand<V, F> {
    zero: V,
    at_zero: Option<V>,
    at_infinity: Option<V>,
    interior: F,
}

impl<V, F> Integrand<V, F> {
    /// `zero` is the additive identity the integral starts from.
    pub fn new(zero: V, interior: F) -> Self {
        Integrand {
            zero,
            at_zero: None,
            at_infinity: None,
            interior,
        }
    }

    pub fn at_zero(mut self, v: V) -> Self {
        self.at_zero = Some(v);
        self
    }

    pub fn at_infinity(mut self, v: V) -> Self {
        self.at_infinity = Some(v);
        self
    }
}

/// Weighted catalog densities sharing one quadrature rule.
#[derive(Clone, Debug)]
pub struct DensityPart<R> {
    terms: Vec<(R, Density<R>)>,
    quad: QuadSpec<R>,
}

impl<R: Real> DensityPart<R> {
    pub fn terms(&self) -> &[(R, Density<R>)] {
        &self.terms
    }

    pub fn quad(&self) -> &QuadSpec<R> {
        &self.quad
    }

    /// Combined density with respect to `d(ln λ)`.
    pub fn eval_log(&self, p: HalfLinePoint<R>) -> R {
        self.terms
            .iter()
            .fold(R::zero(), |acc, (w, d)| acc + *w * d.eval_log(p))
    }

    fn mass(&self) -> R {
        self.quad.integrate_log(|p| self.eval_log(p))
    }
}

/// Atoms at `0`, at `∞` and inside `(0, ∞)`, plus an optional density.
#[derive(Clone, Debug)]
pub struct RepMeasure<R> {
    atom_zero: R,
    atom_inf: R,
    /// `(λ, mass)`, strictly increasing in `λ`, positive masses only.
    interior: Vec<(R, R)>,
    density: Option<DensityPart<R>>,
}

fn check_mass<R: Real>(m: R) -> Result<R> {
    if m.is_finite() && m >= R::zero() {
        Ok(m)
    } else {
        Err(Error::InvalidParameter(format!(
            "mass must be finite and nonnegative, got {}",
            m.as_f64()
        )))
    }
}

fn check_scalar<R: Real>(k: R) -> Result<R> {
    if k < R::zero() || !k.is_finite() {
        Err(Error::NegativeScalar(k.as_f64()))
    } else {
        Ok(k)
    }
}

impl<R: Real> RepMeasure<R> {
    pub fn zero() -> Self {
        RepMeasure {
            atom_zero: R::zero(),
            atom_inf: R::zero(),
            interior: Vec::new(),
            density: None,
        }
    }

    /// `m · δ₀`.
    pub fn atom_at_zero(m: R) -> Result<Self> {
        Ok(RepMeasure {
            atom_zero: check_mass(m)?,
            ..Self::zero()
        })
    }

    /// `m · δ_∞`.
    pub fn atom_at_infinity(m: R) -> Result<Self> {
        Ok(RepMeasure {
            atom_inf: check_mass(m)?,
            ..Self::zero()
        })
    }

    /// `m · δ_λ` for `0 < λ < ∞`.
    pub fn atom(lambda: R, m: R) -> Result<Self> {
        if !(lambda > R::zero() && lambda.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "interior atom location must lie in (0, ∞), got {}",
                lambda.as_f64()
            )));
        }
        let m = check_mass(m)?;
        let interior = if m > R::zero() {
            vec![(lambda, m)]
        } else {
            Vec::new()
        };
        Ok(RepMeasure {
            interior,
            ..Self::zero()
        })
    }

    /// `w · d(λ) dλ` integrated with `quad`.
    pub fn density(density: Density<R>, w: R, quad: QuadSpec<R>) -> Result<Self> {
        let w = check_mass(w)?;
        let m = RepMeasure {
            density: (w > R::zero()).then(|| DensityPart {
                terms: vec![(w, density)],
                quad,
            }),
            ..Self::zero()
        };
        if !m.density_mass().is_finite() {
            return Err(Error::NonFiniteIntegral);
        }
        Ok(m)
    }

    /// `(δ₀ + δ_∞)/2`, representing the arithmetic mean.
    pub fn arithmetic() -> Self {
        let half = R::lit(0.5);
        RepMeasure {
            atom_zero: half,
            atom_inf: half,
            ..Self::zero()
        }
    }

    /// `δ₁`, representing the harmonic mean.
    pub fn harmonic() -> Self {
        RepMeasure {
            interior: vec![(R::one(), R::one())],
            ..Self::zero()
        }
    }

    /// `δ₁/2`, representing the parallel sum.
    pub fn parallel_sum() -> Self {
        RepMeasure {
            interior: vec![(R::one(), R::lit(0.5))],
            ..Self::zero()
        }
    }

    /// `dλ/(π √λ (1 + λ))`, representing the geometric mean.
    pub fn geometric(quad: QuadSpec<R>) -> Self {
        Self::density(Density::Geometric, R::one(), quad).expect("catalog density is finite")
    }

    /// `dλ/(λ (ln²λ + π²))`, representing the logarithmic mean.
    pub fn logarithmic(quad: QuadSpec<R>) -> Self {
        Self::density(Density::LogMean, R::one(), quad).expect("catalog density is finite")
    }

    pub fn atom_zero(&self) -> R {
        self.atom_zero
    }

    pub fn atom_infinity(&self) -> R {
        self.atom_inf
    }

    pub fn interior_atoms(&self) -> &[(R, R)] {
        &self.interior
    }

    pub fn density_part(&self) -> Option<&DensityPart<R>> {
        self.density.as_ref()
    }

    pub fn has_atoms(&self) -> bool {
        self.atom_zero > R::zero() || self.atom_inf > R::zero() || !self.interior.is_empty()
    }

    pub fn has_density(&self) -> bool {
        self.density.is_some()
    }

    fn density_mass(&self) -> R {
        self.density.as_ref().map_or(R::zero(), DensityPart::mass)
    }

    /// `μ([0, ∞])`, the norm of the cone.
    pub fn total_mass(&self) -> Result<R> {
        let atoms = self
            .interior
            .iter()
            .fold(self.atom_zero + self.atom_inf, |acc, &(_, w)| acc + w);
        let total = atoms + self.density_mass();
        if total.is_finite() {
            Ok(total)
        } else {
            Err(Error::NonFiniteIntegral)
        }
    }

    /// `g(0)·μ({0}) + g(∞)·μ({∞}) + Σ wᵢ g(λᵢ) + ∫ g·d`.
    ///
    /// Endpoint values must be declared whenever the matching atom is
    /// present; they are never inferred numerically.
    pub fn integrate<V, F>(&self, integrand: &Integrand<V, F>) -> Result<V>
    where
        V: Accumulate<R>,
        F: Fn(HalfLinePoint<R>) -> Result<V>,
    {
        let mut acc = integrand.zero.clone();
        if self.atom_zero > R::zero() {
            let v = integrand
                .at_zero
                .as_ref()
                .ok_or(Error::MissingEndpointValue("0"))?;
            acc.add_scaled(self.atom_zero, v);
        }
        if self.atom_inf > R::zero() {
            let v = integrand
                .at_infinity
                .as_ref()
                .ok_or(Error::MissingEndpointValue("infinity"))?;
            acc.add_scaled(self.atom_inf, v);
        }
        for &(lambda, w) in &self.interior {
            acc.add_scaled(w, &(integrand.interior)(HalfLinePoint::new(lambda))?);
        }
        if let Some(part) = &self.density {
            for node in part.quad.nodes() {
                let w = node.weight * part.eval_log(node.point);
                if w > R::zero() {
                    acc.add_scaled(w, &(integrand.interior)(node.point)?);
                }
            }
        }
        if acc.is_finite_value() {
            Ok(acc)
        } else {
            Err(Error::NonFiniteIntegral)
        }
    }

    /// Integral of a scalar function; `g0` and `g_inf` are its endpoint values.
    pub fn integrate_scalar(
        &self,
        g0: R,
        g_inf: R,
        g: impl Fn(HalfLinePoint<R>) -> R,
    ) -> Result<R> {
        self.integrate(
            &Integrand::new(R::zero(), |p| Ok(g(p)))
                .at_zero(g0)
                .at_infinity(g_inf),
        )
    }

    /// Atom-wise and density-wise sum; atoms at equal locations merge.
    pub fn add(&self, other: &Self) -> Self {
        let mut interior = Vec::with_capacity(self.interior.len() + other.interior.len());
        let (mut i, mut j) = (0, 0);
        while i < self.interior.len() || j < other.interior.len() {
            let next = match (self.interior.get(i), other.interior.get(j)) {
                (Some(&a), Some(&b)) if a.0 == b.0 => {
                    i += 1;
                    j += 1;
                    (a.0, a.1 + b.1)
                }
                (Some(&a), Some(&b)) if a.0 < b.0 => {
                    i += 1;
                    a
                }
                (Some(_), Some(&b)) | (None, Some(&b)) => {
                    j += 1;
                    b
                }
                (Some(&a), None) => {
                    i += 1;
                    a
                }
                (None, None) => unreachable!(),
            };
            interior.push(next);
        }
        let density = match (&self.density, &other.density) {
            (None, None) => None,
            (Some(d), None) | (None, Some(d)) => Some(d.clone()),
            (Some(a), Some(b)) => {
                let mut terms = a.terms.clone();
                for (w, d) in &b.terms {
                    match terms.iter_mut().find(|(_, e)| e.same_kind(d)) {
                        Some(t) => t.0 += *w,
                        None => terms.push((*w, d.clone())),
                    }
                }
                let quad = if b.quad.node_count() > a.quad.node_count() {
                    b.quad.clone()
                } else {
                    a.quad.clone()
                };
                Some(DensityPart { terms, quad })
            }
        };
        RepMeasure {
            atom_zero: self.atom_zero + other.atom_zero,
            atom_inf: self.atom_inf + other.atom_inf,
            interior,
            density,
        }
    }

    /// `k · μ` for `k ⩾ 0`; scaling by zero yields the zero measure.
    pub fn scale(&self, k: R) -> Result<Self> {
        let k = check_scalar(k)?;
        if k == R::zero() {
            return Ok(Self::zero());
        }
        Ok(RepMeasure {
            atom_zero: self.atom_zero * k,
            atom_inf: self.atom_inf * k,
            interior: self.interior.iter().map(|&(l, w)| (l, w * k)).collect(),
            density: self.density.as_ref().map(|d| DensityPart {
                terms: d.terms.iter().map(|(w, t)| (*w * k, t.clone())).collect(),
                quad: d.quad.clone(),
            }),
        })
    }

    /// `μ ⩽ ν` setwise: every atom of `ν − μ` and its density on the
    /// quadrature nodes are nonnegative up to [`ORDER_SLACK`].
    ///
    /// Fails with `IncomparableRepresentation` when exactly one side carries
    /// density mass and the other carries atoms.
    pub fn leq(&self, other: &Self) -> Result<bool> {
        let mixed = |a: &Self, b: &Self| a.has_density() && !b.has_density() && b.has_atoms();
        if mixed(self, other) || mixed(other, self) {
            return Err(Error::IncomparableRepresentation);
        }
        let slack = R::tol(ORDER_SLACK);
        let ok = |diff: R| diff >= -slack;
        if !ok(other.atom_zero - self.atom_zero) || !ok(other.atom_inf - self.atom_inf) {
            return Ok(false);
        }
        let mass_at = |m: &Self, l: R| {
            m.interior
                .iter()
                .find(|(x, _)| *x == l)
                .map_or(R::zero(), |a| a.1)
        };
        for &(l, _) in self.interior.iter().chain(&other.interior) {
            if !ok(mass_at(other, l) - mass_at(self, l)) {
                return Ok(false);
            }
        }
        let quad = match (&self.density, &other.density) {
            (None, None) => return Ok(true),
            (Some(a), Some(b)) if b.quad.node_count() > a.quad.node_count() => &b.quad,
            (Some(a), _) => &a.quad,
            (None, Some(b)) => &b.quad,
        };
        let eval = |m: &Self, p| m.density.as_ref().map_or(R::zero(), |d| d.eval_log(p));
        Ok(quad
            .nodes()
            .iter()
            .all(|n| ok(eval(other, n.point) - eval(self, n.point))))
    }

    /// Push-forward under `λ ↦ 1/λ`, which exchanges the endpoint atoms.
    pub fn reflect(&self) -> Self {
        RepMeasure {
            atom_zero: self.atom_inf,
            atom_inf: self.atom_zero,
            interior: self
                .interior
                .iter()
                .rev()
                .map(|&(l, w)| (l.recip(), w))
                .collect(),
            density: self.density.as_ref().map(|d| DensityPart {
                terms: d.terms.iter().map(|(w, t)| (*w, t.reflect())).collect(),
                quad: d.quad.clone(),
            }),
        }
    }

    /// The same measure with its density integrated by `quad`.
    pub fn with_quadrature(&self, quad: QuadSpec<R>) -> Self {
        let mut m = self.clone();
        if let Some(d) = &mut m.density {
            d.quad = quad;
        }
        m
    }
}

/// Measure spec text: one `atom0 m`, `atomInf m`, `atom λ m` or
/// `density <name> [weight]` line per component.
impl<R: Real> fmt::Display for RepMeasure<R> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut lines = Vec::new();
        if self.atom_zero > R::zero() {
            lines.push(format!("atom0 {}", self.atom_zero.as_f64()));
        }
        if self.atom_inf > R::zero() {
            lines.push(format!("atomInf {}", self.atom_inf.as_f64()));
        }
        for &(l, w) in &self.interior {
            lines.push(format!("atom {} {}", l.as_f64(), w.as_f64()));
        }
        if let Some(d) = &self.density {
            for (w, t) in &d.terms {
                lines.push(format!("density {} {}", t.name(), w.as_f64()));
            }
        }
        if lines.is_empty() {
            lines.push("atom0 0".to_string());
        }
        f.write_str(&lines.join("\n"))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;
    use std::sync::Arc;

    fn quad(n: usize) -> QuadSpec<f64> {
        QuadSpec::new(n).unwrap()
    }

    /// Independent oracle for ∫ g dμ_geo: with λ = tan²θ the geometric
    /// density becomes (2/π) dθ on (0, π/2); composite Simpson in θ.
    fn geometric_oracle(g: impl Fn(f64) -> f64) -> f64 {
        let n = 20_000;
        let h = (PI / 2.0) / n as f64;
        let mut s = 0.0;
        for k in 0..=n {
            let theta = k as f64 * h;
            let lam = theta.tan().powi(2);
            let v = if k == 0 {
                g(0.0)
            } else if k == n {
                g(f64::INFINITY)
            } else {
                g(lam)
            };
            let c = if k == 0 || k == n {
                1.0
            } else if k % 2 == 1 {
                4.0
            } else {
                2.0
            };
            s += c * v;
        }
        s * h / 3.0 * 2.0 / PI
    }

    #[test]
    fn total_mass_examples() {
        assert_eq!(RepMeasure::<f64>::harmonic().total_mass().unwrap(), 1.0);
        assert_eq!(RepMeasure::<f64>::arithmetic().total_mass().unwrap(), 1.0);
        let geo = RepMeasure::geometric(quad(200));
        assert!((geo.total_mass().unwrap() - 1.0).abs() <= 1e-6);
        let custom = RepMeasure::density(
            Density::Custom(Arc::new(|l: f64| 1.0 / (PI * l.sqrt() * (1.0 + l)))),
            1.0,
            quad(200),
        )
        .unwrap();
        assert!((custom.total_mass().unwrap() - 1.0).abs() <= 1e-6);
        let lm = RepMeasure::logarithmic(quad(200));
        assert!((lm.total_mass().unwrap() - 1.0).abs() <= 1e-12);
    }

    #[test]
    fn rational_substitution_is_slow_on_singular_density() {
        let q = QuadSpec::<f64>::with_substitution(200, Substitution::Rational).unwrap();
        let err = (RepMeasure::geometric(q).total_mass().unwrap() - 1.0).abs();
        assert!(err > 1e-4, "{err}");
    }

    #[test]
    fn integrate_examples() {
        let v = RepMeasure::<f64>::harmonic()
            .integrate_scalar(0.0, 0.0, |p| p.value())
            .unwrap();
        assert_eq!(v, 1.0);
        let v = RepMeasure::<f64>::arithmetic()
            .integrate_scalar(3.0, 7.0, |_| f64::NAN)
            .unwrap();
        assert_eq!(v, 5.0);
        let x = 4.0;
        let g = |l: f64| (1.0 + l) * x / (x + l);
        let geo = RepMeasure::geometric(quad(200));
        let v = geo
            .integrate_scalar(1.0, x, |p| {
                if p.is_lower() {
                    g(p.value())
                } else {
                    let s = p.recip();
                    (1.0 + s) * x / (s * x + 1.0)
                }
            })
            .unwrap();
        assert!((v - 2.0).abs() < 1e-6, "{v}");
        let oracle = geometric_oracle(|l| if l.is_infinite() { x } else { g(l) });
        assert!((oracle - 2.0).abs() < 1e-8, "{oracle}");
    }

    #[test]
    fn missing_endpoint_value() {
        let m = RepMeasure::<f64>::arithmetic();
        let bare = Integrand::new(0.0, |_p: HalfLinePoint<f64>| Ok(1.0));
        assert_eq!(m.integrate(&bare), Err(Error::MissingEndpointValue("0")));
        let m = RepMeasure::<f64>::atom_at_infinity(1.0).unwrap();
        let half = Integrand::new(0.0, |_p: HalfLinePoint<f64>| Ok(1.0)).at_zero(1.0);
        assert_eq!(
            m.integrate(&half),
            Err(Error::MissingEndpointValue("infinity"))
        );
        // no endpoint atoms: no values required
        assert_eq!(RepMeasure::<f64>::harmonic().integrate(&bare), Ok(1.0));
    }

    #[test]
    fn non_finite_integral() {
        let m = RepMeasure::<f64>::atom(2.0, 1.0).unwrap();
        let r = m.integrate_scalar(0.0, 0.0, |_| f64::INFINITY);
        assert_eq!(r, Err(Error::NonFiniteIntegral));
        let bad = RepMeasure::density(
            Density::Custom(Arc::new(|_l: f64| f64::INFINITY)),
            1.0,
            quad(16),
        );
        assert_eq!(bad.unwrap_err(), Error::NonFiniteIntegral);
    }

    #[test]
    fn cone_operations() {
        let sum = RepMeasure::<f64>::atom_at_zero(1.0)
            .unwrap()
            .add(&RepMeasure::atom_at_infinity(1.0).unwrap())
            .scale(0.5)
            .unwrap();
        assert_eq!(sum.atom_zero(), 0.5);
        assert_eq!(sum.atom_infinity(), 0.5);
        let zero = RepMeasure::<f64>::harmonic().scale(0.0).unwrap();
        assert_eq!(zero.total_mass().unwrap(), 0.0);
        assert!(!zero.has_atoms());
        let two = RepMeasure::<f64>::harmonic().add(&RepMeasure::harmonic());
        assert_eq!(two.interior_atoms(), &[(1.0, 2.0)]);
        assert_eq!(
            RepMeasure::<f64>::harmonic().scale(-1.0).unwrap_err(),
            Error::NegativeScalar(-1.0)
        );
        let merged = RepMeasure::atom(3.0, 1.0)
            .unwrap()
            .add(&RepMeasure::atom(0.5, 2.0).unwrap())
            .add(&RepMeasure::atom(3.0, 1.0).unwrap());
        assert_eq!(merged.interior_atoms(), &[(0.5, 2.0), (3.0, 2.0)]);
        let dens = RepMeasure::geometric(quad(100)).add(&RepMeasure::geometric(quad(300)));
        let part = dens.density_part().unwrap();
        assert_eq!(part.terms().len(), 1);
        assert_eq!(part.quad().node_count(), 300);
    }

    #[test]
    fn order_examples() {
        let h = RepMeasure::<f64>::harmonic();
        assert!(h.leq(&h.scale(2.0).unwrap()).unwrap());
        assert!(!h.leq(&RepMeasure::arithmetic()).unwrap());
        assert!(RepMeasure::zero().leq(&h).unwrap());
        assert!(RepMeasure::zero()
            .leq(&RepMeasure::geometric(quad(50)))
            .unwrap());
        let g = RepMeasure::geometric(quad(50));
        assert!(g.leq(&g.scale(1.5).unwrap()).unwrap());
        assert!(!g.scale(1.5).unwrap().leq(&g).unwrap());
        assert_eq!(g.leq(&h), Err(Error::IncomparableRepresentation));
        assert_eq!(h.leq(&g), Err(Error::IncomparableRepresentation));
    }

    #[test]
    fn reflection_swaps_endpoints_and_inverts_atoms() {
        let m = RepMeasure::<f64>::atom_at_zero(2.0)
            .unwrap()
            .add(&RepMeasure::atom(4.0, 1.0).unwrap())
            .add(&RepMeasure::atom(0.5, 3.0).unwrap());
        let r = m.reflect();
        assert_eq!(r.atom_infinity(), 2.0);
        assert_eq!(r.atom_zero(), 0.0);
        assert_eq!(r.interior_atoms(), &[(0.25, 1.0), (2.0, 3.0)]);
    }

    #[test]
    fn quadrature_converges_for_catalog_densities() {
        for x in [0.01, 0.5, 4.0, 100.0] {
            let g = |p: HalfLinePoint<f64>| {
                if p.is_lower() {
                    let l = p.value();
                    (1.0 + l) * x / (x + l)
                } else {
                    let s = p.recip();
                    (1.0 + s) * x / (s * x + 1.0)
                }
            };
            for make in [RepMeasure::geometric, RepMeasure::logarithmic] {
                let a = make(quad(200)).integrate_scalar(1.0, x, g).unwrap();
                let b = make(quad(400)).integrate_scalar(1.0, x, g).unwrap();
                assert!((a - b).abs() < 1e-8 * a.abs(), "x={x}: {a} vs {b}");
            }
        }
    }

    #[test]
    fn display_lines() {
        let m = RepMeasure::<f64>::arithmetic().add(&RepMeasure::atom(2.0, 0.25).unwrap());
        assert_eq!(m.to_string(), "atom0 0.5\natomInf 0.5\natom 2 0.25");
        let g = RepMeasure::<f64>::geometric(quad(20));
        assert_eq!(g.to_string(), "density geometric 1");
        assert_eq!(RepMeasure::<f64>::zero().to_string(), "atom0 0");
    }
}
