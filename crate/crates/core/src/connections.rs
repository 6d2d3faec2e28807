//! Operator connections on pairs of positive semidefinite matrices.
//!
//! A [`Connection`] is built from a named mean, a representing function, a
//! representing measure or a nonnegative combination of other connections.
//!
//! Evaluation avoids regularization wherever an exact formula exists:
//!
//! * if `A` is invertible, `A^{1/2} f(A^{−1/2} B A^{−1/2}) A^{1/2}`;
//! * if only `B` is invertible, the same with the roles of `A` and `B`
//!   exchanged and `f` replaced by `x f(1/x)`;
//! * otherwise compress to the range of `S = A + B` and congruence by
//!   `S^{−1/2}`, after which the pair commutes and every connection acts
//!   through its scalar form `x σ̃ y` on the joint eigenvalues.
//!
//! Measure routes always use the commuting form, integrating the scalar
//! integrand. The `ε`-ladder `A + εI, B + εI` is available as
//! [`eps_ladder`] for continuity checks.

use std::fmt;

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::matcore::{HermitianMatrix, PsdMatrix, ABS_FLOOR, TOL_INV};
use crate::measures::{QuadSpec, RepMeasure};
use crate::monotone::OMFunction;
use crate::scalar::{Entry, Real};

/// Regularization levels of the `ε`-ladder, relative to `max(‖A‖, ‖B‖, 1)`.
pub const LADDER: [f64; 3] = [1e-4, 1e-6, 1e-8];
/// Relative change below which the ladder is accepted.
pub const LADDER_ACCEPT: f64 = 1e-6;
/// Deviation from a multiple of `I` tolerated by [`Connection::induced_scalar`].
pub const SCALAR_TOL: f64 = 1e-10;
/// `|‖σ‖ − 1|` tolerated by [`Connection::is_mean`].
pub const MEAN_TOL: f64 = 1e-9;
/// Norms at or below this are treated as zero by [`Connection::normalize`].
pub const ZERO_NORM: f64 = 1e-14;
/// Dimension at which [`Connection::norm`] evaluates `I σ I`.
pub const NORM_DIM: usize = 2;

/// The closed-form connections.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum NamedMean {
    Arithmetic,
    Geometric,
    Harmonic,
    ParallelSum,
    Logarithmic,
}

impl NamedMean {
    pub const ALL: [NamedMean; 5] = [
        NamedMean::Arithmetic,
        NamedMean::Geometric,
        NamedMean::Harmonic,
        NamedMean::ParallelSum,
        NamedMean::Logarithmic,
    ];

    pub fn name(self) -> &'static str {
        match self {
            NamedMean::Arithmetic => "arithmetic",
            NamedMean::Geometric => "geometric",
            NamedMean::Harmonic => "harmonic",
            NamedMean::ParallelSum => "parallel",
            NamedMean::Logarithmic => "logarithmic",
        }
    }

    /// Spec text: `mean <name>`, or `parallel` for the parallel sum.
    pub fn spec(self) -> String {
        match self {
            NamedMean::ParallelSum => "parallel".to_string(),
            m => format!("mean {}", m.name()),
        }
    }
}

#[derive(Clone, Debug)]
pub enum Route<R> {
    ClosedForm(NamedMean),
    FromFunction(OMFunction<R>),
    FromMeasure(RepMeasure<R>),
    /// `Σ wᵢ σᵢ` with `wᵢ ⩾ 0`; the empty sum is the zero connection.
    Cone(Vec<(R, Connection<R>)>),
}

#[derive(Clone, Debug)]
pub struct Connection<R> {
    route: Route<R>,
    label: String,
}

/// `‖σ‖ = ‖I σ I‖` together with `I σ I`.
#[derive(Clone, Debug)]
pub struct ConnectionNorm<R: Real> {
    pub value: R,
    pub witness: PsdMatrix<R>,
}

fn check_dims<R: Real, E: Entry<R>>(a: &PsdMatrix<R, E>, b: &PsdMatrix<R, E>) -> Result<()> {
    if a.dim() == b.dim() {
        Ok(())
    } else {
        Err(Error::DimensionMismatch {
            left: a.dim(),
            right: b.dim(),
        })
    }
}

fn psd_from<R: Real, E: Entry<R>>(m: &DMatrix<E>) -> PsdMatrix<R, E> {
    PsdMatrix::trusted(HermitianMatrix::from_computed(m))
}

/// A pair `(A, B)` brought to commuting form on the range of `S = A + B`.
///
/// With `S = Q diag(s) Q*` restricted to its range and `T = Q diag(s^{−1/2})`,
/// the compressions `T*AT` and `T*BT` sum to the identity, so they share an
/// eigenbasis `U` with eigenvalues `xᵢ` and `yᵢ`. Any connection then acts as
/// `A σ B = M diag(xᵢ σ̃ yᵢ) M*` with `M = Q diag(√s) U`.
struct Reduced<R: Real, E: Entry<R>> {
    frame: DMatrix<E>,
    x: Vec<R>,
    y: Vec<R>,
}

impl<R: Real, E: Entry<R>> Reduced<R, E> {
    fn new(a: &PsdMatrix<R, E>, b: &PsdMatrix<R, E>) -> Result<Self> {
        check_dims(a, b)?;
        let sum = a.add(b)?;
        let s = sum.as_hermitian().spectral();
        let cut = (R::tol(TOL_INV) * sum.operator_norm()).max(R::tol(ABS_FLOOR));
        let keep: Vec<usize> = (0..a.dim()).filter(|&i| s.eigenvalues[i] > cut).collect();
        let n = a.dim();
        let r = keep.len();
        if r == 0 {
            return Ok(Reduced {
                frame: DMatrix::zeros(n, 0),
                x: Vec::new(),
                y: Vec::new(),
            });
        }
        let t = DMatrix::from_fn(n, r, |i, j| {
            s.eigenvectors[(i, keep[j])].scale(s.eigenvalues[keep[j]].sqrt().recip())
        });
        let root = DMatrix::from_fn(n, r, |i, j| {
            s.eigenvectors[(i, keep[j])].scale(s.eigenvalues[keep[j]].sqrt())
        });
        let ta = HermitianMatrix::from_computed(&(t.adjoint() * a.entries() * &t));
        let tb = t.adjoint() * b.entries() * &t;
        let sa = ta.spectral();
        let u = &sa.eigenvectors;
        // rounding in xᵢ is of order ε‖A‖ ‖T uᵢ‖²; values below it are zero
        let noise: Vec<R> = (0..r)
            .map(|i| {
                let w = (0..r).fold(R::zero(), |acc, k| {
                    acc + u[(k, i)].modulus_squared() / s.eigenvalues[keep[k]]
                });
                R::default_epsilon() * R::lit(64.0) * w
            })
            .collect();
        let snap = |v: R, floor: R| {
            if v <= floor {
                R::zero()
            } else {
                v.min(R::one())
            }
        };
        let x = (0..r)
            .map(|i| snap(sa.eigenvalues[i], noise[i] * a.operator_norm()))
            .collect();
        let y = (0..r)
            .map(|i| {
                let col = u.column(i);
                snap(
                    (col.adjoint() * &tb * col)[(0, 0)].real(),
                    noise[i] * b.operator_norm(),
                )
            })
            .collect();
        Ok(Reduced {
            frame: root * u,
            x,
            y,
        })
    }

    fn dim(&self) -> usize {
        self.frame.nrows()
    }

    /// `M diag(k(xᵢ, yᵢ)) M*`.
    fn assemble(&self, k: impl Fn(R, R) -> Result<R>) -> Result<PsdMatrix<R, E>> {
        let mut scaled = self.frame.clone();
        for (i, mut col) in scaled.column_iter_mut().enumerate() {
            let v = k(self.x[i], self.y[i])?;
            if !(v.is_finite() && v >= R::zero()) {
                return Err(Error::DomainError {
                    at: self.x[i].as_f64(),
                });
            }
            col.iter_mut().for_each(|e| *e = e.scale(v));
        }
        if self.frame.ncols() == 0 {
            return Ok(PsdMatrix::zeros(self.dim()));
        }
        Ok(psd_from(&(scaled * self.frame.adjoint())))
    }
}

/// `x σ̃ y = x f(y/x) = y f*(x/y)`, using whichever form keeps the argument
/// at most 1.
fn scalar_mean<R: Real>(f: &OMFunction<R>, f_t: &OMFunction<R>, x: R, y: R) -> R {
    if x == R::zero() && y == R::zero() {
        R::zero()
    } else if x >= y {
        x * f.eval(y / x)
    } else {
        y * f_t.eval(x / y)
    }
}

/// `∫ (1 + λ) x y/(λx + y) dμ(λ)` with endpoint values `x` at 0 and `y` at ∞.
fn scalar_integral<R: Real>(mu: &RepMeasure<R>, x: R, y: R) -> Result<R> {
    if x == R::zero() && y == R::zero() {
        return Ok(R::zero());
    }
    mu.integrate_scalar(x, y, |p| {
        if x == R::zero() || y == R::zero() {
            R::zero()
        } else if p.is_lower() {
            let l = p.value();
            (R::one() + l) * x * y / (l * x + y)
        } else {
            let s = p.recip();
            (R::one() + s) * x * y / (x + s * y)
        }
    })
}

/// `rcond(A + B)` above which the parallel sum uses `A (A + B)⁻¹ B`.
const PRODUCT_RCOND: f64 = 1e-4;

/// Parallel sum `A : B = (A⁻¹ + B⁻¹)⁻¹`.
///
/// Computed as `A (A + B)⁻¹ B` when `A + B` is well conditioned; inverting
/// `A` and `B` separately loses `ε / rcond`. Other pairs are evaluated on
/// the range of `A + B`, which gives the limit of the regularized formula.
pub fn parallel_sum<R: Real, E: Entry<R>>(
    a: &PsdMatrix<R, E>,
    b: &PsdMatrix<R, E>,
) -> Result<PsdMatrix<R, E>> {
    check_dims(a, b)?;
    let s = a.add(b)?;
    if s.rcond() >= R::lit(PRODUCT_RCOND) && s.is_invertible() {
        let x = a.entries() * s.inv()?.entries() * b.entries();
        return Ok(psd_from(&x));
    }
    Reduced::new(a, b)?.assemble(|x, y| {
        Ok(if x + y > R::zero() {
            x * y / (x + y)
        } else {
            R::zero()
        })
    })
}

/// Harmonic mean `A ! B = 2 (A : B)`.
pub fn harmonic<R: Real, E: Entry<R>>(
    a: &PsdMatrix<R, E>,
    b: &PsdMatrix<R, E>,
) -> Result<PsdMatrix<R, E>> {
    parallel_sum(a, b)?.scale(R::lit(2.0))
}

/// `A^{1/2} f(A^{−1/2} B A^{−1/2}) A^{1/2}`; requires invertible `A`.
fn centered<R: Real, E: Entry<R>>(
    f: &OMFunction<R>,
    a: &PsdMatrix<R, E>,
    b: &PsdMatrix<R, E>,
) -> Result<PsdMatrix<R, E>> {
    let root = a.sqrt();
    let inner = b.congruence(a.inv_sqrt()?.entries())?;
    // rounding in the congruence is of order ε‖B‖/λ_min(A); values below
    // it are zero, and f may be steep at 0
    let floor = R::default_epsilon() * R::lit(64.0) * b.operator_norm() / a.min_eigenvalue();
    let fx = PsdMatrix::trusted(
        inner.apply_spectral(|x| f.eval(if x <= floor { R::zero() } else { x }))?,
    );
    fx.congruence(root.entries())
}

/// Reciprocal condition number below which centering at `A` or `B` is
/// abandoned for the reduction on the range of `A + B`.
pub const CENTER_RCOND: f64 = 1e-4;

/// `A σ B = A^{1/2} f(A^{−1/2} B A^{−1/2}) A^{1/2}` from the representing
/// function.
///
/// Centering switches to `B` with `x f(1/x)` when `B` is the better
/// conditioned of the two. When both are singular or badly conditioned
/// the pair is evaluated on the range of `A + B`, which is exact for
/// singular inputs.
pub fn eval_primal<R: Real, E: Entry<R>>(
    f: &OMFunction<R>,
    a: &PsdMatrix<R, E>,
    b: &PsdMatrix<R, E>,
) -> Result<PsdMatrix<R, E>> {
    check_dims(a, b)?;
    let (ra, rb) = (a.rcond(), b.rcond());
    let good = R::lit(CENTER_RCOND);
    if ra >= rb && ra >= good && a.is_invertible() {
        centered(f, a, b)
    } else if rb >= good && b.is_invertible() {
        centered(&f.transpose(), b, a)
    } else {
        eval_reduced(f, a, b)
    }
}

/// `A σ B` from the representing function, always through the reduction on
/// the range of `A + B`.
pub fn eval_reduced<R: Real, E: Entry<R>>(
    f: &OMFunction<R>,
    a: &PsdMatrix<R, E>,
    b: &PsdMatrix<R, E>,
) -> Result<PsdMatrix<R, E>> {
    let f_t = f.transpose();
    Reduced::new(a, b)?.assemble(|x, y| Ok(scalar_mean(f, &f_t, x, y)))
}

/// `A σ B = ∫ (λ + 1)/(2λ) (λA ! B) dμ(λ)`, with the integrand extended by
/// `A` at `λ = 0` and by `B` at `λ = ∞`.
///
/// The integrand `(1 + λ) A (λA + B)⁻¹ B` is evaluated on the commuting
/// form of the pair, where it is exact for singular inputs.
pub fn eval_integral<R: Real, E: Entry<R>>(
    mu: &RepMeasure<R>,
    a: &PsdMatrix<R, E>,
    b: &PsdMatrix<R, E>,
) -> Result<PsdMatrix<R, E>> {
    Reduced::new(a, b)?.assemble(|x, y| scalar_integral(mu, x, y))
}

/// Evaluates `op` on `(A + εI, B + εI)` down the ladder and returns the
/// last value once successive values agree.
pub fn eps_ladder<R: Real, E: Entry<R>>(
    a: &PsdMatrix<R, E>,
    b: &PsdMatrix<R, E>,
    op: impl Fn(&PsdMatrix<R, E>, &PsdMatrix<R, E>) -> Result<PsdMatrix<R, E>>,
) -> Result<PsdMatrix<R, E>> {
    check_dims(a, b)?;
    let scale = a.operator_norm().max(b.operator_norm()).max(R::one());
    let mut prev: Option<PsdMatrix<R, E>> = None;
    let mut change = R::zero();
    for eps in LADDER {
        let e = R::lit(eps) * scale;
        let v = op(&a.shifted(e)?, &b.shifted(e)?)?;
        if let Some(p) = &prev {
            change = v.as_hermitian().distance(p.as_hermitian())?;
        }
        prev = Some(v);
    }
    if change < R::lit(LADDER_ACCEPT) * scale {
        Ok(prev.expect("ladder is nonempty"))
    } else {
        Err(Error::ConvergenceFailure {
            change: change.as_f64(),
        })
    }
}

/// Nested cones expanded into `(weight, connection)` pairs.
fn flatten<'a, R: Real>(
    terms: &'a [(R, Connection<R>)],
    k: R,
    out: &mut Vec<(R, &'a Connection<R>)>,
) {
    for (w, c) in terms {
        match &c.route {
            Route::Cone(inner) => flatten(inner, k * *w, out),
            _ => out.push((k * *w, c)),
        }
    }
}

impl<R: Real> Connection<R> {
    fn with_route(route: Route<R>) -> Self {
        let label = match &route {
            Route::ClosedForm(m) => m.spec(),
            Route::FromFunction(f) => format!("function {}", f.label()),
            Route::FromMeasure(_) => "measure".to_string(),
            Route::Cone(terms) => {
                let mut leaves = Vec::new();
                flatten(terms, R::one(), &mut leaves);
                if leaves.is_empty() {
                    return Connection {
                        route,
                        label: "scale 0 mean arithmetic".to_string(),
                    };
                }
                let parts: Vec<String> = leaves
                    .iter()
                    .map(|(w, c)| {
                        if *w == R::one() {
                            c.label.clone()
                        } else {
                            format!("scale {} {}", w.as_f64(), c.label)
                        }
                    })
                    .collect();
                if parts.len() == 1 {
                    parts[0].clone()
                } else {
                    format!("sum {}", parts.join(" + "))
                }
            }
        };
        Connection { route, label }
    }

    pub fn named(mean: NamedMean) -> Self {
        Self::with_route(Route::ClosedForm(mean))
    }

    pub fn arithmetic() -> Self {
        Self::named(NamedMean::Arithmetic)
    }

    pub fn geometric() -> Self {
        Self::named(NamedMean::Geometric)
    }

    pub fn harmonic() -> Self {
        Self::named(NamedMean::Harmonic)
    }

    pub fn parallel_sum() -> Self {
        Self::named(NamedMean::ParallelSum)
    }

    pub fn logarithmic() -> Self {
        Self::named(NamedMean::Logarithmic)
    }

    pub fn from_function(f: OMFunction<R>) -> Self {
        Self::with_route(Route::FromFunction(f))
    }

    pub fn from_measure(mu: RepMeasure<R>) -> Self {
        Self::with_route(Route::FromMeasure(mu))
    }

    pub fn zero() -> Self {
        Self::with_route(Route::Cone(Vec::new()))
    }

    /// `Σ wᵢ σᵢ`; requires `wᵢ ⩾ 0`.
    pub fn cone(terms: Vec<(R, Connection<R>)>) -> Result<Self> {
        for (w, _) in &terms {
            if *w < R::zero() || !w.is_finite() {
                return Err(Error::NegativeScalar(w.as_f64()));
            }
        }
        Ok(Self::with_route(Route::Cone(terms)))
    }

    pub fn route(&self) -> &Route<R> {
        &self.route
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = label.into();
        self
    }

    /// `A σ B`.
    pub fn evaluate<E: Entry<R>>(
        &self,
        a: &PsdMatrix<R, E>,
        b: &PsdMatrix<R, E>,
    ) -> Result<PsdMatrix<R, E>> {
        check_dims(a, b)?;
        match &self.route {
            Route::ClosedForm(NamedMean::Arithmetic) => a.add(b)?.scale(R::lit(0.5)),
            Route::ClosedForm(NamedMean::Harmonic) => harmonic(a, b),
            Route::ClosedForm(NamedMean::ParallelSum) => parallel_sum(a, b),
            Route::ClosedForm(m @ (NamedMean::Geometric | NamedMean::Logarithmic)) => {
                let f = Self::named(*m).representing_function();
                eval_primal(&f, a, b)
            }
            Route::FromFunction(f) => eval_reduced(f, a, b),
            Route::FromMeasure(mu) => eval_integral(mu, a, b),
            Route::Cone(terms) => {
                let mut acc = PsdMatrix::zeros(a.dim());
                for (w, c) in terms {
                    acc = acc.add(&c.evaluate(a, b)?.scale(*w)?)?;
                }
                Ok(acc)
            }
        }
    }

    /// `‖σ‖ = ‖I σ I‖`, evaluated at the identity of dimension 2.
    pub fn norm(&self) -> Result<ConnectionNorm<R>> {
        let id = PsdMatrix::<R>::identity(NORM_DIM);
        let witness = self.evaluate(&id, &id)?;
        Ok(ConnectionNorm {
            value: witness.operator_norm(),
            witness,
        })
    }

    /// The function `f` with `f(x) I = I σ (xI)`.
    pub fn representing_function(&self) -> OMFunction<R> {
        let half = R::lit(0.5);
        match &self.route {
            Route::ClosedForm(m) => {
                let f = match m {
                    NamedMean::Arithmetic => OMFunction::affine(half, half),
                    NamedMean::Geometric => OMFunction::power(half),
                    NamedMean::Harmonic => OMFunction::moebius(R::one()),
                    NamedMean::ParallelSum => {
                        OMFunction::moebius(R::one()).and_then(|f| f.scale(half))
                    }
                    NamedMean::Logarithmic => Ok(OMFunction::log_mean()),
                };
                f.expect("catalog parameters are valid")
            }
            Route::FromFunction(f) => f.clone(),
            Route::FromMeasure(mu) => function_from_measure(mu),
            Route::Cone(terms) => OMFunction::cone_sum(
                terms
                    .iter()
                    .map(|(w, c)| (*w, c.representing_function()))
                    .collect(),
            )
            .expect("cone weights are nonnegative"),
        }
    }

    /// The representing measure, with densities integrated by the default rule.
    pub fn representing_measure(&self) -> Result<RepMeasure<R>> {
        self.representing_measure_with(&QuadSpec::default())
    }

    /// The representing measure, with densities integrated by `quad`.
    ///
    /// Function routes are inverted only for catalog functions.
    pub fn representing_measure_with(&self, quad: &QuadSpec<R>) -> Result<RepMeasure<R>> {
        match &self.route {
            Route::ClosedForm(m) => Ok(match m {
                NamedMean::Arithmetic => RepMeasure::arithmetic(),
                NamedMean::Geometric => RepMeasure::geometric(quad.clone()),
                NamedMean::Harmonic => RepMeasure::harmonic(),
                NamedMean::ParallelSum => RepMeasure::parallel_sum(),
                NamedMean::Logarithmic => RepMeasure::logarithmic(quad.clone()),
            }),
            Route::FromFunction(f) => f
                .representing_measure(quad)
                .map_err(|_| Error::UnsupportedInversion(f.label().to_string())),
            Route::FromMeasure(mu) => Ok(mu.clone()),
            Route::Cone(terms) => terms.iter().try_fold(RepMeasure::zero(), |acc, (w, c)| {
                Ok(acc.add(&c.representing_measure_with(quad)?.scale(*w)?))
            }),
        }
    }

    /// `(A, B) ↦ A σ B + A η B`.
    pub fn add(&self, other: &Self) -> Self {
        Self::with_route(Route::Cone(vec![
            (R::one(), self.clone()),
            (R::one(), other.clone()),
        ]))
    }

    /// `(A, B) ↦ k (A σ B)`; `k = 0` yields the zero connection.
    pub fn scale(&self, k: R) -> Result<Self> {
        if k < R::zero() || !k.is_finite() {
            return Err(Error::NegativeScalar(k.as_f64()));
        }
        if k == R::zero() {
            return Ok(Self::zero());
        }
        Self::cone(vec![(k, self.clone())])
    }

    /// `x σ̃ y`, defined by `(xI) σ (yI) = (x σ̃ y) I`, read off at dimension 2.
    pub fn induced_scalar(&self, x: R, y: R) -> Result<R> {
        let out = self.evaluate(
            &PsdMatrix::<R>::scalar(NORM_DIM, x)?,
            &PsdMatrix::<R>::scalar(NORM_DIM, y)?,
        )?;
        let h = out.as_hermitian();
        let c = h.entries().trace() / R::lit(NORM_DIM as f64);
        let deviation = h.deviation_from_scalar(c);
        if deviation > R::lit(SCALAR_TOL) {
            return Err(Error::NonScalarResult {
                deviation: deviation.as_f64(),
            });
        }
        Ok(c.max(R::zero()))
    }

    /// `|‖σ‖ − 1| ⩽ 1e-9`.
    pub fn is_mean(&self) -> Result<bool> {
        Ok((self.norm()?.value - R::one()).abs() <= R::tol(MEAN_TOL))
    }

    /// `σ/‖σ‖`, which is a mean.
    pub fn normalize(&self) -> Result<Self> {
        let norm = self.norm()?.value;
        if norm <= R::lit(ZERO_NORM) {
            return Err(Error::ZeroConnection);
        }
        self.scale(norm.recip())
    }
}

/// `f(x) = μ({0}) + μ({∞}) x + ∫ (1 + λ) x/(x + λ) dμ(λ)`.
pub fn function_from_measure<R: Real>(mu: &RepMeasure<R>) -> OMFunction<R> {
    OMFunction::from_measure(mu.clone())
}

impl<R: Real> fmt::Display for Connection<R> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.label)
    }
}
