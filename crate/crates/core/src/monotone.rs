//! Operator monotone functions on `[0, ∞)` as a normed ordered cone.
//!
//! Every catalog function is nonnegative, nondecreasing and concave, and the
//! norm is evaluation at 1. Membership is screened numerically through
//! Loewner matrices only.

use std::fmt;

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::matcore::HermitianMatrix;
use crate::measures::{HalfLinePoint, QuadSpec, RepMeasure};
use crate::scalar::Real;

/// Slack for the pointwise order.
pub const ORDER_SLACK: f64 = 1e-12;
/// Relative step of the central difference on the Loewner diagonal.
pub const LOEWNER_STEP: f64 = 1e-6;
/// Relative eigenvalue slack of the Loewner screen.
pub const LOEWNER_SLACK: f64 = 1e-8;

#[derive(Clone, Debug)]
pub enum OMKind<R> {
    /// `x ↦ a + b x`.
    Affine {
        a: R,
        b: R,
    },
    /// `x ↦ x^α`, `α ∈ [0, 1]`.
    Power(R),
    /// `x ↦ (x − 1)/ln x`, extended by 1 at `x = 1` and by 0 at `x = 0`.
    LogMean,
    /// `x ↦ (1 + λ) x/(x + λ)`, `λ ∈ (0, ∞)`.
    Moebius(R),
    /// `x ↦ ∫ (1 + λ) x/(x + λ) dμ(λ)`, with the endpoints contributing
    /// `μ({0}) + μ({∞}) x`.
    MeasureBacked(RepMeasure<R>),
    ConeSum(Vec<(R, OMFunction<R>)>),
}

/// An operator monotone function with a display label.
#[derive(Clone, Debug)]
pub struct OMFunction<R> {
    kind: OMKind<R>,
    label: String,
}

/// `(1 + λ) x/(x + λ)`, evaluated through `1/λ` when `λ > 1`.
pub(crate) fn moebius_kernel<R: Real>(p: HalfLinePoint<R>, x: R) -> R {
    if x == R::zero() {
        return R::zero();
    }
    if p.is_lower() {
        let l = p.value();
        (R::one() + l) * x / (x + l)
    } else {
        let s = p.recip();
        (R::one() + s) * x / (R::one() + s * x)
    }
}

fn log_mean<R: Real>(x: R) -> R {
    if x == R::zero() {
        return R::zero();
    }
    let u = x - R::one();
    if u == R::zero() {
        R::one()
    } else if u.abs() < R::lit(0.5) {
        u / u.ln_1p()
    } else {
        u / x.ln()
    }
}

fn check_nonneg<R: Real>(what: &str, v: R) -> Result<R> {
    if v >= R::zero() && v.is_finite() {
        Ok(v)
    } else {
        Err(Error::InvalidParameter(format!(
            "{what} must be finite and nonnegative, got {}",
            v.as_f64()
        )))
    }
}

/// `{0, 0.1, …, 10} ∪ {20, 50, 100}`.
pub fn default_grid<R: Real>() -> Vec<R> {
    (0..=100)
        .map(|k| R::lit(k as f64 / 10.0))
        .chain([20.0, 50.0, 100.0].map(R::lit))
        .collect()
}

impl<R: Real> OMFunction<R> {
    fn with_kind(kind: OMKind<R>) -> Self {
        let label = spec_text(&kind);
        OMFunction { kind, label }
    }

    pub fn affine(a: R, b: R) -> Result<Self> {
        Ok(Self::with_kind(OMKind::Affine {
            a: check_nonneg("affine coefficient", a)?,
            b: check_nonneg("affine coefficient", b)?,
        }))
    }

    pub fn zero() -> Self {
        Self::with_kind(OMKind::Affine {
            a: R::zero(),
            b: R::zero(),
        })
    }

    pub fn power(alpha: R) -> Result<Self> {
        if !(alpha >= R::zero() && alpha <= R::one()) {
            return Err(Error::InvalidParameter(format!(
                "power exponent must lie in [0, 1], got {}",
                alpha.as_f64()
            )));
        }
        Ok(Self::with_kind(OMKind::Power(alpha)))
    }

    pub fn log_mean() -> Self {
        Self::with_kind(OMKind::LogMean)
    }

    pub fn moebius(lambda: R) -> Result<Self> {
        if !(lambda > R::zero() && lambda.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "moebius parameter must lie in (0, ∞), got {}",
                lambda.as_f64()
            )));
        }
        Ok(Self::with_kind(OMKind::Moebius(lambda)))
    }

    pub fn from_measure(mu: RepMeasure<R>) -> Self {
        Self::with_kind(OMKind::MeasureBacked(mu))
    }

    /// `Σ wᵢ fᵢ` with `wᵢ ⩾ 0`.
    pub fn cone_sum(terms: Vec<(R, OMFunction<R>)>) -> Result<Self> {
        for (w, _) in &terms {
            if *w < R::zero() || !w.is_finite() {
                return Err(Error::NegativeScalar(w.as_f64()));
            }
        }
        Ok(Self::with_kind(OMKind::ConeSum(terms)))
    }

    pub fn kind(&self) -> &OMKind<R> {
        &self.kind
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = label.into();
        self
    }

    /// `f(x)` for `x ⩾ 0`.
    pub fn eval(&self, x: R) -> R {
        match &self.kind {
            OMKind::Affine { a, b } => *a + *b * x,
            OMKind::Power(alpha) => {
                if *alpha == R::zero() {
                    R::one()
                } else if x == R::zero() {
                    R::zero()
                } else {
                    x.powf(*alpha)
                }
            }
            OMKind::LogMean => log_mean(x),
            OMKind::Moebius(l) => moebius_kernel(HalfLinePoint::new(*l), x),
            OMKind::MeasureBacked(mu) => mu
                .integrate_scalar(R::one(), x, |p| moebius_kernel(p, x))
                .unwrap_or_else(|_| R::lit(f64::NAN)),
            OMKind::ConeSum(terms) => terms
                .iter()
                .fold(R::zero(), |acc, (w, f)| acc + *w * f.eval(x)),
        }
    }

    /// `‖f‖ = f(1)`.
    pub fn norm(&self) -> R {
        self.eval(R::one())
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut terms = Vec::new();
        for f in [self, other] {
            match &f.kind {
                OMKind::ConeSum(t) => terms.extend(t.iter().cloned()),
                _ => terms.push((R::one(), f.clone())),
            }
        }
        Self::with_kind(OMKind::ConeSum(terms))
    }

    /// `k f` for `k ⩾ 0`; `k = 0` yields the zero function.
    pub fn scale(&self, k: R) -> Result<Self> {
        if k < R::zero() || !k.is_finite() {
            return Err(Error::NegativeScalar(k.as_f64()));
        }
        if k == R::zero() {
            return Ok(Self::zero());
        }
        Self::cone_sum(vec![(k, self.clone())])
    }

    /// `f(x) ⩽ g(x) + 1e-12` on every grid point.
    pub fn leq(&self, other: &Self, grid: &[R]) -> bool {
        let slack = R::tol(ORDER_SLACK);
        grid.iter().all(|&x| self.eval(x) <= other.eval(x) + slack)
    }

    /// `f*(x) = x f(1/x)`, the function of the transposed connection
    /// `(A, B) ↦ B σ A`.
    pub fn transpose(&self) -> Self {
        let kind = match &self.kind {
            OMKind::Affine { a, b } => OMKind::Affine { a: *b, b: *a },
            OMKind::Power(alpha) => OMKind::Power(R::one() - *alpha),
            OMKind::LogMean => OMKind::LogMean,
            OMKind::Moebius(l) => OMKind::Moebius(l.recip()),
            OMKind::MeasureBacked(mu) => OMKind::MeasureBacked(mu.reflect()),
            OMKind::ConeSum(terms) => {
                OMKind::ConeSum(terms.iter().map(|(w, f)| (*w, f.transpose())).collect())
            }
        };
        Self::with_kind(kind)
    }

    /// The representing measure, where it is known in closed form.
    ///
    /// Densities are integrated with `quad`. Powers other than 0, ½ and 1
    /// are not inverted.
    pub fn representing_measure(&self, quad: &QuadSpec<R>) -> Result<RepMeasure<R>> {
        match &self.kind {
            OMKind::Affine { a, b } => {
                Ok(RepMeasure::atom_at_zero(*a)?.add(&RepMeasure::atom_at_infinity(*b)?))
            }
            OMKind::Power(alpha) => {
                if *alpha == R::zero() {
                    RepMeasure::atom_at_zero(R::one())
                } else if *alpha == R::one() {
                    RepMeasure::atom_at_infinity(R::one())
                } else if *alpha == R::lit(0.5) {
                    Ok(RepMeasure::geometric(quad.clone()))
                } else {
                    Err(Error::UnsupportedInversion(self.label.clone()))
                }
            }
            OMKind::LogMean => Ok(RepMeasure::logarithmic(quad.clone())),
            OMKind::Moebius(l) => RepMeasure::atom(*l, R::one()),
            OMKind::MeasureBacked(mu) => Ok(mu.clone()),
            OMKind::ConeSum(terms) => terms.iter().try_fold(RepMeasure::zero(), |acc, (w, f)| {
                Ok(acc.add(&f.representing_measure(quad)?.scale(*w)?))
            }),
        }
    }

    /// Nonnegativity, monotonicity and midpoint concavity on a sorted grid.
    pub fn satisfies_invariants(&self, grid: &[R]) -> bool {
        let slack = R::tol(ORDER_SLACK);
        let values: Vec<R> = grid.iter().map(|&x| self.eval(x)).collect();
        let scale = values.iter().fold(R::one(), |m, v| m.max(v.abs()));
        let tol = slack * scale;
        if values.iter().any(|v| !v.is_finite() || *v < -tol) {
            return false;
        }
        if values.windows(2).any(|w| w[1] < w[0] - tol) {
            return false;
        }
        grid.windows(2).all(|w| {
            let mid = (w[0] + w[1]) * R::lit(0.5);
            self.eval(mid) >= (self.eval(w[0]) + self.eval(w[1])) * R::lit(0.5) - tol
        })
    }
}

impl<R: Real> fmt::Display for OMFunction<R> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.label)
    }
}

fn spec_text<R: Real>(kind: &OMKind<R>) -> String {
    match kind {
        OMKind::Affine { a, b } => format!("affine {} {}", a.as_f64(), b.as_f64()),
        OMKind::Power(alpha) => format!("power {}", alpha.as_f64()),
        OMKind::LogMean => "logmean".to_string(),
        OMKind::Moebius(l) => format!("moebius {}", l.as_f64()),
        OMKind::MeasureBacked(_) => "measure".to_string(),
        OMKind::ConeSum(terms) => {
            let mut leaves = Vec::new();
            flatten(terms, R::one(), &mut leaves);
            if leaves.is_empty() {
                return "affine 0 0".to_string();
            }
            let parts: Vec<String> = leaves
                .iter()
                .map(|(w, f)| format!("{} {}", w.as_f64(), f.label))
                .collect();
            format!("sum {}", parts.join(" + "))
        }
    }
}

/// Nested sums expanded into `(weight, summand)` pairs with multiplied weights.
fn flatten<'a, R: Real>(
    terms: &'a [(R, OMFunction<R>)],
    k: R,
    out: &mut Vec<(R, &'a OMFunction<R>)>,
) {
    for (w, f) in terms {
        match &f.kind {
            OMKind::ConeSum(inner) => flatten(inner, k * *w, out),
            _ => out.push((k * *w, f)),
        }
    }
}

/// Outcome of the Loewner-matrix screen.
#[derive(Clone, Debug, PartialEq)]
pub struct LoewnerVerdict<R> {
    pub is_monotone_candidate: bool,
    pub min_loewner_eigenvalue: R,
    pub sample_points: Vec<R>,
}

/// Screens `f` for operator monotonicity on `points`.
pub fn loewner_check<R: Real>(f: &OMFunction<R>, points: &[R]) -> Result<LoewnerVerdict<R>> {
    loewner_check_fn(|x| f.eval(x), points)
}

/// Loewner screen for an arbitrary real function.
///
/// `L_ij = (f(xᵢ) − f(xⱼ))/(xᵢ − xⱼ)` off the diagonal and a central
/// difference with step `1e-6·xᵢ` on it; the verdict holds iff
/// `λ_min(L) ⩾ −1e-8 ‖L‖`.
pub fn loewner_check_fn<R: Real>(f: impl Fn(R) -> R, points: &[R]) -> Result<LoewnerVerdict<R>> {
    let n = points.len();
    if n < 2 {
        return Err(Error::DegenerateGrid(format!(
            "need at least 2 points, got {n}"
        )));
    }
    if let Some(x) = points.iter().find(|x| !(**x > R::zero() && x.is_finite())) {
        return Err(Error::DegenerateGrid(format!(
            "points must be positive, got {}",
            x.as_f64()
        )));
    }
    for i in 0..n {
        for j in 0..i {
            if points[i] == points[j] {
                return Err(Error::DegenerateGrid(format!(
                    "point {} appears twice",
                    points[i].as_f64()
                )));
            }
        }
    }
    let values: Vec<R> = points.iter().map(|&x| f(x)).collect();
    let mut l = DMatrix::<R>::zeros(n, n);
    for i in 0..n {
        let x = points[i];
        let h = R::lit(LOEWNER_STEP) * x;
        l[(i, i)] = (f(x + h) - f(x - h)) / (h + h);
        for j in 0..i {
            let q = (values[i] - values[j]) / (points[i] - points[j]);
            l[(i, j)] = q;
            l[(j, i)] = q;
        }
    }
    if l.iter().any(|v| !v.is_finite()) {
        return Err(Error::DomainError {
            at: points[0].as_f64(),
        });
    }
    let h = HermitianMatrix::from_entries(l);
    let min = h.min_eigenvalue();
    Ok(LoewnerVerdict {
        is_monotone_candidate: min >= -(R::lit(LOEWNER_SLACK) * h.operator_norm()),
        min_loewner_eigenvalue: min,
        sample_points: points.to_vec(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn grid() -> Vec<f64> {
        default_grid()
    }

    fn arithmetic() -> OMFunction<f64> {
        OMFunction::affine(0.5, 0.5).unwrap()
    }

    #[test]
    fn eval_examples() {
        assert_eq!(OMFunction::<f64>::power(0.5).unwrap().eval(4.0), 2.0);
        assert_eq!(OMFunction::<f64>::log_mean().eval(1.0), 1.0);
        let m = OMFunction::<f64>::moebius(1.0).unwrap();
        assert!((m.eval(3.0) - 1.5).abs() < 1e-15);
        assert_eq!(OMFunction::<f64>::log_mean().eval(0.0), 0.0);
        assert_eq!(OMFunction::<f64>::power(0.0).unwrap().eval(0.0), 1.0);
    }

    #[test]
    fn log_mean_is_continuous_at_one() {
        let f = OMFunction::<f64>::log_mean();
        for x in [1.0 - 1e-6, 1.0 + 1e-6] {
            // oracle: (x−1)/ln x from the naive quotient
            let naive = (x - 1.0) / f64::ln(x);
            assert!((f.eval(x) - naive).abs() < 1e-9);
            assert!((f.eval(x) - 1.0).abs() < 1e-6);
        }
        assert!((f.eval(1.0 + 1e-15) - 1.0).abs() < 1e-15);
        assert!((f.eval(1e-300) - 1.0 / 690.7755278982137).abs() < 1e-15);
    }

    #[test]
    fn norm_examples() {
        assert_eq!(arithmetic().norm(), 1.0);
        assert_eq!(OMFunction::<f64>::power(0.5).unwrap().norm(), 1.0);
        assert_eq!(OMFunction::<f64>::affine(0.0, 3.0).unwrap().norm(), 3.0);
        assert_eq!(OMFunction::<f64>::log_mean().norm(), 1.0);
    }

    #[test]
    fn cone_examples() {
        let p = OMFunction::<f64>::power(0.5).unwrap();
        assert_eq!(p.add(&p).eval(4.0), 4.0);
        let z = p.scale(0.0).unwrap();
        assert!(grid().iter().all(|&x| z.eval(x) == 0.0));
        assert_eq!(arithmetic().scale(2.0).unwrap().norm(), 2.0);
        assert_eq!(p.scale(-1.0).unwrap_err(), Error::NegativeScalar(-1.0));
    }

    #[test]
    fn order_examples() {
        let harmonic = OMFunction::<f64>::moebius(1.0).unwrap();
        assert!(harmonic.leq(&arithmetic(), &grid()));
        assert!(harmonic.leq(&harmonic, &grid()));
        let id = OMFunction::<f64>::affine(0.0, 1.0).unwrap();
        assert!(!id.leq(&arithmetic(), &grid()));
    }

    #[test]
    fn loewner_examples() {
        let pts = [0.5, 1.0, 2.0, 4.0];
        let v = loewner_check(&OMFunction::<f64>::power(0.5).unwrap(), &pts).unwrap();
        assert!(v.is_monotone_candidate, "{v:?}");
        let sq = loewner_check_fn(|x: f64| x * x, &pts).unwrap();
        assert!(!sq.is_monotone_candidate);
        // oracle: L = x1ᵀ + 1xᵀ has rank 2 with eigenvalues Σx ± √(n Σx²)
        let n = 4.0;
        let s1: f64 = pts.iter().sum();
        let s2: f64 = pts.iter().map(|x| x * x).sum();
        let oracle_min = s1 - (n * s2).sqrt();
        assert!(
            (sq.min_loewner_eigenvalue - oracle_min).abs() < 1e-6,
            "{sq:?}"
        );
        for (a, b) in [(0.0, 1.0), (2.0, 0.5), (3.0, 0.0)] {
            let f = OMFunction::<f64>::affine(a, b).unwrap();
            assert!(
                loewner_check(&f, &[0.3, 1.0, 7.0])
                    .unwrap()
                    .is_monotone_candidate
            );
        }
        let lm = loewner_check(&OMFunction::<f64>::log_mean(), &[0.1, 0.5, 1.5, 3.0, 9.0]).unwrap();
        assert!(lm.is_monotone_candidate);
    }

    #[test]
    fn loewner_degenerate_grids() {
        let f = OMFunction::<f64>::log_mean();
        assert!(matches!(
            loewner_check(&f, &[1.0, 1.0]),
            Err(Error::DegenerateGrid(_))
        ));
        assert!(matches!(
            loewner_check(&f, &[1.0]),
            Err(Error::DegenerateGrid(_))
        ));
        assert!(matches!(
            loewner_check(&f, &[0.0, 1.0]),
            Err(Error::DegenerateGrid(_))
        ));
    }

    #[test]
    fn catalog_satisfies_invariants() {
        let quad = QuadSpec::default();
        let fs = vec![
            arithmetic(),
            OMFunction::power(0.3).unwrap(),
            OMFunction::power(0.0).unwrap(),
            OMFunction::log_mean(),
            OMFunction::moebius(0.2).unwrap(),
            OMFunction::from_measure(RepMeasure::geometric(quad)),
        ];
        for f in fs {
            assert!(f.satisfies_invariants(&grid()), "{f}");
        }
        let convex = OMFunction::from_measure(RepMeasure::zero());
        assert!(convex.satisfies_invariants(&grid()));
    }

    #[test]
    fn measure_backed_matches_closed_forms() {
        let quad = QuadSpec::default();
        for l in [0.01, 0.5, 1.0, 3.0, 250.0] {
            let closed = OMFunction::<f64>::moebius(l).unwrap();
            let backed = OMFunction::from_measure(RepMeasure::atom(l, 1.0).unwrap());
            for &x in &grid() {
                assert!(
                    (closed.eval(x) - backed.eval(x)).abs() <= 1e-12,
                    "λ={l} x={x}"
                );
            }
        }
        let checks: Vec<(OMFunction<f64>, RepMeasure<f64>, f64)> = vec![
            (arithmetic(), RepMeasure::arithmetic(), 1e-15),
            (
                OMFunction::power(0.5).unwrap(),
                RepMeasure::geometric(quad.clone()),
                1e-9,
            ),
            (
                OMFunction::log_mean(),
                RepMeasure::logarithmic(quad.clone()),
                1e-9,
            ),
        ];
        for (f, mu, tol) in checks {
            let backed = OMFunction::from_measure(mu);
            for &x in &grid() {
                let (a, b) = (f.eval(x), backed.eval(x));
                assert!((a - b).abs() <= tol * a.max(1.0), "{f} at {x}: {a} vs {b}");
            }
        }
    }

    #[test]
    fn representing_measure_inversion() {
        let quad = QuadSpec::<f64>::default();
        let mu = OMFunction::affine(0.25, 2.0)
            .unwrap()
            .representing_measure(&quad)
            .unwrap();
        assert_eq!((mu.atom_zero(), mu.atom_infinity()), (0.25, 2.0));
        let mu = OMFunction::moebius(3.0)
            .unwrap()
            .representing_measure(&quad)
            .unwrap();
        assert_eq!(mu.interior_atoms(), &[(3.0, 1.0)]);
        let err = OMFunction::power(0.3).unwrap().representing_measure(&quad);
        assert!(matches!(err, Err(Error::UnsupportedInversion(_))));
        let sum = OMFunction::affine(1.0, 0.0)
            .unwrap()
            .add(&OMFunction::moebius(2.0).unwrap().scale(3.0).unwrap());
        let mu = sum.representing_measure(&quad).unwrap();
        assert_eq!(mu.total_mass().unwrap(), 4.0);
        assert_eq!(sum.label(), "sum 1 affine 1 0 + 3 moebius 2");
    }

    #[test]
    fn transpose_examples() {
        let f = OMFunction::<f64>::affine(0.25, 2.0).unwrap();
        assert_eq!(f.transpose().eval(2.0), 2.0 + 0.25 * 2.0);
        assert_eq!(f.transpose().transpose().label(), f.label());
    }

    fn catalog() -> impl Strategy<Value = OMFunction<f64>> {
        prop_oneof![
            (0.0..5.0, 0.0..5.0).prop_map(|(a, b)| OMFunction::affine(a, b).unwrap()),
            (0.0..=1.0).prop_map(|a| OMFunction::power(a).unwrap()),
            Just(OMFunction::log_mean()),
            (0.01..100.0).prop_map(|l| OMFunction::moebius(l).unwrap()),
        ]
    }

    fn closure() -> impl Strategy<Value = OMFunction<f64>> {
        prop::collection::vec((0.0..3.0, catalog()), 1..4)
            .prop_map(|terms| OMFunction::cone_sum(terms).unwrap())
    }

    proptest! {
        #[test]
        fn norm_is_linear(f in closure(), g in closure(), k in 0.0..10.0) {
            let sum = f.add(&g).norm();
            prop_assert!((sum - (f.norm() + g.norm())).abs() <= 1e-12 * sum.max(1.0));
            let scaled = f.scale(k).unwrap().norm();
            prop_assert!((scaled - k * f.norm()).abs() <= 1e-12 * scaled.max(1.0));
        }

        #[test]
        fn order_implies_norm_order(f in closure(), g in closure()) {
            if f.leq(&g, &grid()) {
                prop_assert!(f.norm() <= g.norm() + 1e-12);
            }
            // f ⩽ f + g always
            prop_assert!(f.leq(&f.add(&g), &grid()));
        }

        #[test]
        fn zero_norm_means_zero(f in closure()) {
            if f.norm() == 0.0 {
                prop_assert!(grid().iter().all(|&x| f.eval(x) == 0.0));
            }
            let z = f.scale(0.0).unwrap();
            prop_assert!(grid().iter().all(|&x| z.eval(x) == 0.0));
        }

        #[test]
        fn closure_satisfies_invariants(f in closure()) {
            prop_assert!(f.satisfies_invariants(&grid()));
        }

        #[test]
        fn transpose_is_x_f_of_inverse(f in closure(), x in 0.01..50.0) {
            // oracle: direct evaluation of x f(1/x)
            let direct = x * f.eval(1.0 / x);
            let t = f.transpose().eval(x);
            prop_assert!((t - direct).abs() <= 1e-12 * direct.max(1.0), "{} vs {}", t, direct);
        }
    }
}
