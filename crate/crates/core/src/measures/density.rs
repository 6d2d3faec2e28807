use std::fmt;
use std::sync::Arc;

use super::quadrature::HalfLinePoint;
use crate::scalar::Real;

/// A nonnegative density on `(0, ∞)`.
///
/// Catalog densities are evaluated through `ln λ`, so they stay finite at
/// every quadrature node. Both catalog entries are even in `ln λ`, hence
/// invariant under `λ ↦ 1/λ`.
#[derive(Clone)]
pub enum Density<R> {
    /// `1/(π √λ (1 + λ))`, the representing density of the geometric mean.
    Geometric,
    /// `1/(λ (ln²λ + π²))`, the representing density of the logarithmic mean.
    LogMean,
    /// A user density `λ ↦ d(λ)`; nodes where `λ` under- or overflows are
    /// skipped.
    Custom(Arc<dyn Fn(R) -> R + Send + Sync>),
}

impl<R> fmt::Debug for Density<R> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl<R> Density<R> {
    /// Catalog name used by the measure spec format.
    pub fn name(&self) -> &'static str {
        match self {
            Density::Geometric => "geometric",
            Density::LogMean => "logmean-numeric",
            Density::Custom(_) => "custom",
        }
    }

    pub fn is_catalog(&self) -> bool {
        !matches!(self, Density::Custom(_))
    }

    pub fn from_name(name: &str) -> Option<Self> {
        match name {
            "geometric" => Some(Density::Geometric),
            "logmean-numeric" | "logmean" => Some(Density::LogMean),
            _ => None,
        }
    }

    pub(crate) fn same_kind(&self, other: &Self) -> bool {
        match (self, other) {
            (Density::Geometric, Density::Geometric) | (Density::LogMean, Density::LogMean) => true,
            (Density::Custom(a), Density::Custom(b)) => Arc::ptr_eq(a, b),
            _ => false,
        }
    }
}

impl<R: Real> Density<R> {
    /// `d(λ)` at a finite positive `λ`.
    pub fn eval(&self, lambda: R) -> R {
        let p = HalfLinePoint::new(lambda);
        self.eval_log(p) / lambda
    }

    /// `λ · d(λ)`, the density with respect to `d(ln λ)`.
    pub fn eval_log(&self, p: HalfLinePoint<R>) -> R {
        let pi = R::pi();
        match self {
            Density::Geometric => R::one() / (R::lit(2.0) * pi * (p.ln() * R::lit(0.5)).cosh()),
            Density::LogMean => R::one() / (p.ln() * p.ln() + pi * pi),
            Density::Custom(d) => {
                let lambda = p.value();
                if lambda > R::zero() && lambda.is_finite() {
                    lambda * d(lambda)
                } else {
                    R::zero()
                }
            }
        }
    }

    /// Push-forward under `λ ↦ 1/λ`.
    pub fn reflect(&self) -> Self {
        match self {
            Density::Geometric => Density::Geometric,
            Density::LogMean => Density::LogMean,
            Density::Custom(d) => {
                let d = Arc::clone(d);
                Density::Custom(Arc::new(move |u: R| {
                    let inv = u.recip();
                    d(inv) * inv * inv
                }))
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn closed_forms() {
        for lambda in [1e-6, 0.3, 1.0, 7.5, 1e8] {
            let g: f64 = Density::Geometric.eval(lambda);
            let expect = 1.0 / (PI * lambda.sqrt() * (1.0 + lambda));
            assert!((g - expect).abs() <= 1e-14 * expect, "{lambda}");
            let l: f64 = Density::LogMean.eval(lambda);
            let expect = 1.0 / (lambda * (lambda.ln().powi(2) + PI * PI));
            assert!((l - expect).abs() <= 1e-14 * expect, "{lambda}");
        }
    }

    #[test]
    fn reflection_of_custom_density() {
        let d: Density<f64> = Density::Custom(Arc::new(|l: f64| (-l).exp()));
        let r = d.reflect();
        let u = 0.25;
        assert!((r.eval(u) - (-4.0f64).exp() * 16.0).abs() < 1e-15);
    }

    #[test]
    fn names_round_trip() {
        for d in [Density::<f64>::Geometric, Density::LogMean] {
            assert!(Density::<f64>::from_name(d.name()).unwrap().same_kind(&d));
        }
        assert!(Density::<f64>::from_name("weird").is_none());
    }
}
