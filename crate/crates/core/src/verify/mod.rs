//! Randomized property checks for connections.
//!
//! Each check draws independent trials from a per-property ChaCha stream,
//! runs them in parallel and reduces them in trial order, so a report is a
//! function of the seed and the configuration alone.

mod fixtures;
pub mod random;
mod report;

use rayon::prelude::*;

use crate::connections::{Connection, NamedMean};
use crate::error::{Error, Result};
use crate::matcore::{format_matrix, loewner_violation, HermitianMatrix, PsdMatrix};
use crate::measures::{QuadSpec, RepMeasure, DEFAULT_NODES};
use crate::monotone::{default_grid, loewner_check_fn, OMFunction};
use crate::scalar::Real;

pub use fixtures::{BrokenOp, PsdOperation};
pub use random::{
    random_combination, random_invertible, random_projection, random_psd, random_psd_any,
    random_psd_separated, random_rank, random_well_conditioned_pair, trial_rng, TrialRng,
    SEPARATED, WELL_CONDITIONED,
};
pub use report::{format_csv, format_text, Measurement, VerifyReport};

use random::salt;
use report::float_max;

/// Steps `n = 1..=20` of the sequences `A + 2⁻ⁿI`.
pub const CONTINUITY_STEPS: i32 = 20;
/// Ladder length for singular pairs, long enough for the logarithmic
/// approach of the log mean.
pub const SINGULAR_STEPS: i32 = 30;
/// Random invertible `A` per dimension for the norm forms.
pub const NORM_FORM_TRIALS: usize = 50;
/// Random combinations `k₁σ₁ + k₂σ₂` in the isometry check.
pub const ISOMETRY_COMBINATIONS: usize = 100;

/// Named tolerances, each overridable by name.
#[derive(Clone, Debug, PartialEq)]
pub struct Tolerances {
    /// Loewner residuals, relative to `1 + ‖lhs‖ + ‖rhs‖`.
    pub loewner: f64,
    /// Matrix equalities, same scaling.
    pub equality: f64,
    /// Loewner steps of a decreasing sequence.
    pub step: f64,
    /// Distance to the limit at the last step.
    pub limit: f64,
    /// Largest admissible ratio of the last to the first distance for
    /// singular limits.
    pub decay: f64,
    /// Norm identities.
    pub norm: f64,
    /// Masses of measures with a density part.
    pub measure: f64,
    /// Convergence in the norm pseudo-metric.
    pub convergence: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            loewner: 1e-8,
            equality: 1e-8,
            step: 1e-9,
            limit: 1e-5,
            decay: 0.5,
            norm: 1e-9,
            measure: 1e-6,
            convergence: 1e-6,
        }
    }
}

impl Tolerances {
    pub const NAMES: [&'static str; 8] = [
        "loewner",
        "equality",
        "step",
        "limit",
        "decay",
        "norm",
        "measure",
        "convergence",
    ];

    fn slot(&mut self, name: &str) -> Option<&mut f64> {
        Some(match name {
            "loewner" => &mut self.loewner,
            "equality" => &mut self.equality,
            "step" => &mut self.step,
            "limit" => &mut self.limit,
            "decay" => &mut self.decay,
            "norm" => &mut self.norm,
            "measure" => &mut self.measure,
            "convergence" => &mut self.convergence,
            _ => return None,
        })
    }

    pub fn get(&self, name: &str) -> Option<f64> {
        self.clone().slot(name).map(|v| *v)
    }

    pub fn set(&mut self, name: &str, value: f64) -> Result<()> {
        if !(value >= 0.0 && value.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "tolerance {name} must be finite and nonnegative, got {value}"
            )));
        }
        let slot = self.slot(name).ok_or_else(|| {
            Error::InvalidParameter(format!(
                "unknown tolerance `{name}`, expected one of {}",
                Self::NAMES.join(", ")
            ))
        })?;
        *slot = value;
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct TrialConfig {
    pub min_dim: usize,
    pub max_dim: usize,
    pub trials: usize,
    pub seed: u64,
    pub tol: Tolerances,
    /// Gauss–Legendre nodes for catalog densities.
    pub nodes: usize,
}

impl Default for TrialConfig {
    fn default() -> Self {
        TrialConfig {
            min_dim: 1,
            max_dim: 6,
            trials: 200,
            seed: 1,
            tol: Tolerances::default(),
            nodes: DEFAULT_NODES,
        }
    }
}

impl TrialConfig {
    pub fn new(min_dim: usize, max_dim: usize, trials: usize, seed: u64) -> Result<Self> {
        if min_dim == 0 || max_dim < min_dim {
            return Err(Error::InvalidParameter(format!(
                "dimension range {min_dim}:{max_dim} must satisfy 1 ⩽ lo ⩽ hi"
            )));
        }
        if trials == 0 {
            return Err(Error::InvalidParameter(
                "at least one trial is required".into(),
            ));
        }
        Ok(TrialConfig {
            min_dim,
            max_dim,
            trials,
            seed,
            ..Self::default()
        })
    }

    pub fn quad<R: Real>(&self) -> Result<QuadSpec<R>> {
        QuadSpec::new(self.nodes)
    }

    fn dim(&self, rng: &mut TrialRng) -> usize {
        use rand::Rng;
        rng.random_range(self.min_dim..=self.max_dim)
    }
}

type Trial = (String, Result<Vec<f64>>);

fn run_trials<F>(cfg: &TrialConfig, property: &str, count: usize, f: F) -> Vec<Trial>
where
    F: Fn(&mut TrialRng, usize) -> Trial + Sync + Send,
{
    let s = salt(property);
    (0..count)
        .into_par_iter()
        .map(|t| f(&mut trial_rng(cfg.seed, s, t as u64), t))
        .collect()
}

/// Folds trial results into a report; the witness is the first trial that
/// violates some tolerance.
fn aggregate(
    property: String,
    anchor: &str,
    spec: &[(&str, f64)],
    trials: Vec<Trial>,
) -> VerifyReport {
    let mut worst = vec![0.0f64; spec.len()];
    let mut witness = None;
    let count = trials.len();
    for (t, (inputs, result)) in trials.into_iter().enumerate() {
        let (values, error) = match result {
            Ok(v) => (v, None),
            Err(e) => (vec![f64::INFINITY; spec.len()], Some(e)),
        };
        let mut failed = false;
        for (j, &v) in values.iter().enumerate() {
            worst[j] = float_max(worst[j], v);
            failed |= !(v <= spec[j].1);
        }
        if failed && witness.is_none() {
            let mut w = format!("trial {t}\n{inputs}");
            if let Some(e) = error {
                w.push_str(&format!("error: {e}\n"));
            }
            for (j, &v) in values.iter().enumerate() {
                w.push_str(&format!("{} = {v:e}\n", spec[j].0));
            }
            witness = Some(w);
        }
    }
    let measurements = spec
        .iter()
        .zip(worst)
        .map(|(&(name, tolerance), worst)| Measurement {
            name: name.to_string(),
            worst,
            tolerance,
            passed: worst <= tolerance,
        })
        .collect();
    VerifyReport::new(property, anchor, count, measurements).with_witness(witness)
}

fn describe<R: Real>(items: &[(&str, &PsdMatrix<R>)]) -> String {
    items
        .iter()
        .map(|(name, m)| format!("{name}:\n{}", format_matrix(m.as_hermitian())))
        .collect()
}

fn scale_of<R: Real>(x: &HermitianMatrix<R>, y: &HermitianMatrix<R>) -> R {
    R::one() + x.operator_norm() + y.operator_norm()
}

/// `max(0, −λ_min(rhs − lhs)) / (1 + ‖lhs‖ + ‖rhs‖)`.
fn order_residual<R: Real>(lhs: &HermitianMatrix<R>, rhs: &HermitianMatrix<R>) -> Result<f64> {
    Ok((loewner_violation(lhs, rhs)? / scale_of(lhs, rhs)).as_f64())
}

/// `‖x − y‖ / (1 + ‖x‖ + ‖y‖)`.
fn distance_residual<R: Real>(x: &HermitianMatrix<R>, y: &HermitianMatrix<R>) -> Result<f64> {
    Ok((x.distance(y)? / scale_of(x, y)).as_f64())
}

/// `|x − y|` compared with `tol`, allowing for the rounding of `x` and `y`
/// themselves.
fn within(x: f64, y: f64, tol: f64) -> bool {
    (x - y).abs() <= tol + 4.0 * f64::EPSILON * x.abs().max(y.abs())
}

fn relative_gap(x: f64, y: f64) -> f64 {
    (x - y).abs() / (1.0 + x.abs().max(y.abs()))
}

const MONOTONICITY: &str = "monotonicity: A ⩽ C, B ⩽ D ⟹ A σ B ⩽ C σ D";
const TRANSFORMER: &str =
    "transformer inequality: C (A σ B) C ⩽ (CAC) σ (CBC), with equality for invertible C";
const CONTINUITY: &str = "continuity from above: Aₙ ↓ A, Bₙ ↓ B ⟹ Aₙ σ Bₙ ↓ A σ B";
const NORM_FORMS: &str =
    "norm forms: ‖σ‖ = ‖I σ I‖ = ‖A σ A‖/‖A‖ for invertible A, and ‖A σ B‖ ⩽ ‖A‖ σ̃ ‖B‖";
const NORM_AXIOMS: &str =
    "normed ordered cone: the norm is homogeneous, additive, order monotone and faithful";
const ISOMETRY: &str =
    "isometry: ‖σ‖ = f_σ(1) = μ_σ([0,∞]) and σ ↦ f_σ preserves order, while σ ↦ μ_σ does not";
const MEAN_TFAE: &str =
    "means: A σ A = A for all A ⟺ ‖σ‖ = 1 ⟺ ‖A σ A‖ = ‖A‖ for all A ⟺ ‖A σ A‖ = ‖A‖ for some A > 0";
const CONVERGENCE: &str = "convergence: σₙ → σ ⟺ fₙ → f ⟺ μₙ → μ in the norm pseudo-metric";
const MEAN_LIMIT: &str = "the limit of a sequence of means is a mean";
const LOEWNER: &str = "Loewner matrices of operator monotone functions are positive semidefinite";
const HARNESS: &str = "every check rejects an operation that is not a connection";

/// Samples `A ⩽ C`, `B ⩽ D` by adding random PSD increments.
pub fn check_monotonicity<R: Real, O: PsdOperation<R> + ?Sized>(
    op: &O,
    cfg: &TrialConfig,
) -> VerifyReport {
    let property = format!("monotonicity {}", op.label());
    let trials = run_trials(cfg, &property, cfg.trials, |rng, _| {
        let n = cfg.dim(rng);
        let a = random_psd_any::<R>(rng, n);
        let b = random_psd_any::<R>(rng, n);
        let c = a.add(&random_psd_any(rng, n)).expect("same dimension");
        let d = b.add(&random_psd_any(rng, n)).expect("same dimension");
        let inputs = describe(&[("A", &a), ("B", &b), ("C", &c), ("D", &d)]);
        let result = (|| {
            let lhs = op.apply(&a, &b)?;
            let rhs = op.apply(&c, &d)?;
            Ok(vec![order_residual(&lhs, &rhs)?])
        })();
        (inputs, result)
    });
    aggregate(
        property,
        MONOTONICITY,
        &[("loewner residual", cfg.tol.loewner)],
        trials,
    )
}

/// Congruences by singular projections, singular PSD matrices and
/// invertible PSD matrices, in rotation.
pub fn check_transformer<R: Real, O: PsdOperation<R> + ?Sized>(
    op: &O,
    cfg: &TrialConfig,
) -> VerifyReport {
    use rand::Rng;
    let property = format!("transformer {}", op.label());
    let trials = run_trials(cfg, &property, cfg.trials, |rng, t| {
        let n = cfg.dim(rng);
        let a = random_psd_any::<R>(rng, n);
        let b = random_psd_any::<R>(rng, n);
        let (c, invertible) = match t % 3 {
            0 => {
                let rank = rng.random_range(0..n);
                (random_projection::<R>(rng, n, rank), false)
            }
            1 => {
                let rank = rng.random_range(0..n);
                (random_psd_separated::<R>(rng, n, rank), false)
            }
            _ => (random_invertible::<R>(rng, n), true),
        };
        let inputs = describe(&[("A", &a), ("B", &b), ("C", &c)]);
        let result = (|| {
            let lhs = op.apply(&a, &b)?.congruence(c.entries())?;
            let rhs = op.apply(&a.congruence(c.entries())?, &b.congruence(c.entries())?)?;
            let equality = if invertible {
                distance_residual(&lhs, &rhs)?
            } else {
                0.0
            };
            Ok(vec![order_residual(&lhs, &rhs)?, equality])
        })();
        (inputs, result)
    });
    aggregate(
        property,
        TRANSFORMER,
        &[
            ("loewner residual", cfg.tol.loewner),
            ("equality residual (invertible C)", cfg.tol.equality),
        ],
        trials,
    )
}

/// Largest Loewner increase along `op(A + 2⁻ⁿI, B + 2⁻ⁿI)`, the distances
/// `‖Xₙ − X‖` of the terms to `X = op(A, B)` for `n = 1..=steps`, and the
/// last distance scaled by `1 + ‖X_steps‖ + ‖X‖`.
fn descent<R: Real, O: PsdOperation<R> + ?Sized>(
    op: &O,
    a: &PsdMatrix<R>,
    b: &PsdMatrix<R>,
    steps: i32,
) -> Result<(f64, Vec<f64>, f64)> {
    let limit = op.apply(a, b)?;
    let mut prev: Option<HermitianMatrix<R>> = None;
    let mut step = 0.0f64;
    let mut distances = Vec::new();
    for k in 1..=steps {
        let eps = R::lit(2f64.powi(-k));
        let x = op.apply(&a.shifted(eps)?, &b.shifted(eps)?)?;
        if let Some(p) = &prev {
            step = float_max(step, order_residual(&x, p)?);
        }
        distances.push(x.distance(&limit)?.as_f64());
        prev = Some(x);
    }
    let last = distance_residual(&prev.expect("at least one step"), &limit)?;
    Ok((step, distances, last))
}

/// Random trials use jointly well-conditioned invertible `A, B`, where the
/// distance at `n = 20` is held to `limit`; the rate constant grows like
/// `(‖B‖/λ_min(A))^{1/2}` for the geometric mean, so no fixed bound holds
/// for all invertible inputs. Singular fixtures in every dimension check the
/// decrease and that the distance to the limit shrinks by the factor
/// `decay` over `SINGULAR_STEPS` steps; the approach there may be as slow
/// as `1/n` (geometric) or `1/log(1/ε)` (logarithmic).
pub fn check_continuity_from_above<R: Real, O: PsdOperation<R> + ?Sized>(
    op: &O,
    cfg: &TrialConfig,
) -> VerifyReport {
    use rand::Rng;
    let property = format!("continuity {}", op.label());
    let dims: Vec<usize> = (cfg.min_dim..=cfg.max_dim).collect();
    let fixtures = 3 * dims.len();
    let trials = run_trials(cfg, &property, cfg.trials + fixtures, |rng, t| {
        let (a, b, singular) = if t < cfg.trials {
            let n = cfg.dim(rng);
            let (a, b) = random_well_conditioned_pair::<R>(rng, n);
            (a, b, false)
        } else {
            let k = t - cfg.trials;
            let n = dims[k / 3];
            let deficient = |rng: &mut TrialRng| {
                let rank = rng.random_range(0..n);
                random_psd_separated::<R>(rng, n, rank)
            };
            let pair = match k % 3 {
                0 => (deficient(rng), random_invertible(rng, n)),
                1 => (deficient(rng), deficient(rng)),
                _ => (PsdMatrix::zeros(n), random_psd_any(rng, n)),
            };
            (pair.0, pair.1, true)
        };
        let inputs = describe(&[("A", &a), ("B", &b)]);
        let steps = if singular {
            SINGULAR_STEPS
        } else {
            CONTINUITY_STEPS
        };
        let result = descent(op, &a, &b, steps).map(|(step, d, last)| {
            if singular {
                let decay = if d[0] > 1e-14 {
                    d[d.len() - 1] / d[0]
                } else {
                    0.0
                };
                vec![0.0, 0.0, step, decay]
            } else {
                vec![step, last, 0.0, 0.0]
            }
        });
        (inputs, result)
    });
    aggregate(
        property,
        CONTINUITY,
        &[
            ("loewner increase", cfg.tol.step),
            ("distance at n = 20", cfg.tol.limit),
            ("loewner increase (singular)", cfg.tol.step),
            ("distance ratio n = 30 : n = 1 (singular)", cfg.tol.decay),
        ],
        trials,
    )
}

/// `‖A σ A‖/‖A‖ = ‖I σ I‖` on `NORM_FORM_TRIALS` random invertible `A` per
/// dimension, `‖A σ B‖ ⩽ ‖A‖ σ̃ ‖B‖` on random pairs and the norm at every
/// dimension.
pub fn check_norm_forms<R: Real>(sigma: &Connection<R>, cfg: &TrialConfig) -> VerifyReport {
    let property = format!("norm-forms {}", sigma.label());
    let norm = match sigma.norm() {
        Ok(n) => n.value,
        Err(e) => return failed_report(property, NORM_FORMS, e),
    };
    let dims: Vec<usize> = (cfg.min_dim..=cfg.max_dim).collect();
    let trials = run_trials(cfg, &property, NORM_FORM_TRIALS * dims.len(), |rng, t| {
        let n = dims[t / NORM_FORM_TRIALS];
        let a = random_invertible::<R>(rng, n);
        let c = random_psd_any::<R>(rng, n);
        let d = random_psd_any::<R>(rng, n);
        let inputs = describe(&[("A", &a), ("C", &c), ("D", &d)]);
        let result = (|| {
            let form = (sigma.evaluate(&a, &a)?.operator_norm() / a.operator_norm() - norm).abs();
            let cd = sigma.evaluate(&c, &d)?.operator_norm();
            let bound = sigma.induced_scalar(c.operator_norm(), d.operator_norm())?;
            let scalar_bound = (cd - bound).max(R::zero()) / (R::one() + bound);
            let id = PsdMatrix::<R>::identity(n);
            let at_dim = (sigma.evaluate(&id, &id)?.operator_norm() - norm).abs();
            Ok(vec![form.as_f64(), scalar_bound.as_f64(), at_dim.as_f64()])
        })();
        (inputs, result)
    });
    aggregate(
        property,
        NORM_FORMS,
        &[
            ("|‖AσA‖/‖A‖ − ‖IσI‖|", cfg.tol.norm),
            ("‖CσD‖ above ‖C‖ σ̃ ‖D‖", cfg.tol.norm),
            ("|‖IσI‖ at dim − ‖σ‖|", cfg.tol.norm),
        ],
        trials,
    )
}

fn failed_report(property: String, anchor: &str, e: Error) -> VerifyReport {
    VerifyReport::new(
        property,
        anchor,
        0,
        vec![Measurement {
            name: "setup".into(),
            worst: f64::INFINITY,
            tolerance: 0.0,
            passed: false,
        }],
    )
    .with_witness(Some(format!("error: {e}")))
}

/// Norm axioms over random cone combinations of the catalog.
pub fn check_norm_axioms<R: Real>(cfg: &TrialConfig) -> VerifyReport {
    use rand::Rng;
    let property = "norm-axioms".to_string();
    let trials = run_trials(cfg, &property, cfg.trials, |rng, _| {
        let sigma = random_combination::<R>(rng);
        let eta = random_combination::<R>(rng);
        let k = R::lit(5.0 * rng.random::<f64>());
        let n = cfg.dim(rng);
        let a = random_psd_any::<R>(rng, n);
        let b = random_psd_any::<R>(rng, n);
        let inputs = format!(
            "sigma = {sigma}\neta = {eta}\nk = {}\n{}",
            k.as_f64(),
            describe(&[("A", &a), ("B", &b)])
        );
        let result = (|| {
            let ns = sigma.norm()?.value.as_f64();
            let ne = eta.norm()?.value.as_f64();
            let k64 = k.as_f64();
            let homogeneity = relative_gap(sigma.scale(k)?.norm()?.value.as_f64(), k64 * ns);
            let sum = sigma.add(&eta).norm()?.value.as_f64();
            let subadditivity = (sum - ns - ne).max(0.0) / (1.0 + ns + ne);
            let additivity = relative_gap(sum, ns + ne);
            // σ ⩽ σ + η by construction.
            let upper = sigma.add(&eta);
            let pair_order = order_residual(
                sigma.evaluate(&a, &b)?.as_hermitian(),
                upper.evaluate(&a, &b)?.as_hermitian(),
            )?;
            let norm_order = (ns - upper.norm()?.value.as_f64()).max(0.0);
            let zero = Connection::<R>::zero();
            let faithful =
                zero.evaluate(&a, &b)?.operator_norm().as_f64() + zero.norm()?.value.as_f64();
            Ok(vec![
                homogeneity,
                subadditivity,
                additivity,
                pair_order,
                norm_order,
                faithful,
            ])
        })();
        (inputs, result)
    });
    let t = &cfg.tol;
    aggregate(
        property,
        NORM_AXIOMS,
        &[
            ("‖kσ‖ − k‖σ‖", t.norm),
            ("‖σ+η‖ above ‖σ‖+‖η‖", t.norm),
            ("‖σ+η‖ − ‖σ‖ − ‖η‖", t.norm),
            ("σ ⩽ σ+η on sampled pairs", t.loewner),
            ("‖σ‖ above ‖σ+η‖", t.norm),
            ("zero connection", t.norm),
        ],
        trials,
    )
}

/// A connection with the representing function and measure it is claimed
/// to have.
#[derive(Clone, Debug)]
pub struct IsometryCase<R> {
    pub connection: Connection<R>,
    pub function: OMFunction<R>,
    pub measure: RepMeasure<R>,
}

impl<R: Real> IsometryCase<R> {
    pub fn of(connection: Connection<R>, quad: &QuadSpec<R>) -> Result<Self> {
        Ok(IsometryCase {
            function: connection.representing_function(),
            measure: connection.representing_measure_with(quad)?,
            connection,
        })
    }
}

/// The catalog and `ISOMETRY_COMBINATIONS` random `k₁σ₁ + k₂σ₂`.
pub fn isometry_cases<R: Real>(cfg: &TrialConfig) -> Result<Vec<IsometryCase<R>>> {
    use rand::Rng;
    let quad = cfg.quad::<R>()?;
    let mut rng = trial_rng(cfg.seed, salt("isometry cases"), 0);
    let mut cases = NamedMean::ALL
        .iter()
        .map(|m| IsometryCase::of(Connection::named(*m), &quad))
        .collect::<Result<Vec<_>>>()?;
    for _ in 0..ISOMETRY_COMBINATIONS {
        let i = rng.random_range(0..NamedMean::ALL.len());
        let j = rng.random_range(0..NamedMean::ALL.len());
        let k1 = R::lit(3.0 * rng.random::<f64>());
        let k2 = R::lit(3.0 * rng.random::<f64>());
        let c = Connection::cone(vec![
            (k1, Connection::named(NamedMean::ALL[i])),
            (k2, Connection::named(NamedMean::ALL[j])),
        ])?;
        cases.push(IsometryCase::of(c, &quad)?);
    }
    Ok(cases)
}

/// Isometry over [`isometry_cases`].
pub fn check_isometry<R: Real>(cfg: &TrialConfig) -> VerifyReport {
    match isometry_cases::<R>(cfg) {
        Ok(cases) => check_isometry_cases(&cases, cfg),
        Err(e) => failed_report("isometry".into(), ISOMETRY, e),
    }
}

/// Three-way norm equality for each case, order preservation of `σ ↦ f`
/// for `σ ⩽ σ + η`, and the failure of measure order for `! ⩽ ▽`.
pub fn check_isometry_cases<R: Real>(cases: &[IsometryCase<R>], cfg: &TrialConfig) -> VerifyReport {
    let property = "isometry".to_string();
    let grid = default_grid::<R>();
    let quad = match cfg.quad::<R>() {
        Ok(q) => q,
        Err(e) => return failed_report(property, ISOMETRY, e),
    };
    let mut trials = run_trials(cfg, &property, cases.len(), |rng, t| {
        let case = &cases[t];
        let eta = random_combination::<R>(rng);
        let inputs = format!(
            "sigma = {}\nf = {}\nmu = {}\neta = {eta}\n",
            case.connection, case.function, case.measure
        );
        let result = (|| {
            let norm = case.connection.norm()?.value.as_f64();
            let function = (norm - case.function.norm().as_f64()).abs();
            let measure = (norm - case.measure.total_mass()?.as_f64()).abs();
            let upper = case.connection.add(&eta).representing_function();
            let order = grid
                .iter()
                .map(|&x| {
                    ((case.function.eval(x) - upper.eval(x)) / (R::one() + upper.eval(x))).as_f64()
                })
                .fold(0.0, float_max);
            Ok(vec![function, measure, order, 0.0])
        })();
        (inputs, result)
    });
    let order_gap = (|| {
        let h = Connection::<R>::harmonic();
        let a = Connection::<R>::arithmetic();
        let functions = h
            .representing_function()
            .leq(&a.representing_function(), &grid);
        let measures = match h
            .representing_measure_with(&quad)?
            .leq(&a.representing_measure_with(&quad)?)
        {
            Ok(b) => b,
            Err(Error::IncomparableRepresentation) => false,
            Err(e) => return Err(e),
        };
        Ok(if functions && !measures { 0.0 } else { 1.0 })
    })();
    trials.push((
        "f_! ⩽ f_▽ on the default grid, μ_! = δ₁ not below μ_▽ = (δ₀ + δ_∞)/2\n".into(),
        order_gap.map(|r| vec![0.0, 0.0, 0.0, r]),
    ));
    aggregate(
        property,
        ISOMETRY,
        &[
            ("|‖σ‖ − f_σ(1)|", cfg.tol.norm),
            ("|‖σ‖ − μ_σ([0,∞])|", cfg.tol.measure),
            ("f_σ above f_{σ+η}", cfg.tol.norm),
            ("measure order of (!, ▽) not refuted", 0.0),
        ],
        trials,
    )
}

/// The four mean conditions, each computed on its own samples.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct MeanConditions {
    /// `A σ A = A` for every sampled `A`.
    pub fixed_point: bool,
    /// `‖σ‖ = 1` with `‖σ‖ = ‖I σ I‖` at dimension 2.
    pub unit_norm: bool,
    /// `‖A σ A‖ = ‖A‖` for every sampled `A`.
    pub norm_preserving: bool,
    /// `‖A σ A‖ = ‖A‖` for the single invertible `A = diag(1, 2, 3)`.
    pub single_invertible: bool,
}

impl MeanConditions {
    pub fn agree(&self) -> bool {
        let v = [
            self.fixed_point,
            self.unit_norm,
            self.norm_preserving,
            self.single_invertible,
        ];
        v.iter().all(|&b| b == v[0])
    }
}

pub fn mean_conditions<R: Real, O: PsdOperation<R> + ?Sized>(
    op: &O,
    cfg: &TrialConfig,
) -> Result<MeanConditions> {
    let tol = &cfg.tol;
    let sample = |name: &str| {
        run_trials(
            cfg,
            &format!("{name} {}", op.label()),
            cfg.trials,
            |rng, _| {
                let n = cfg.dim(rng);
                let a = random_psd_any::<R>(rng, n);
                (
                    String::new(),
                    op.apply(&a, &a).map(|x| {
                        vec![
                            a.operator_norm().as_f64(),
                            x.distance(a.as_hermitian())
                                .map(|d| d.as_f64())
                                .unwrap_or(f64::INFINITY),
                            x.operator_norm().as_f64(),
                        ]
                    }),
                )
            },
        )
        .into_iter()
        .map(|(_, r)| r)
        .collect::<Result<Vec<_>>>()
    };
    let fixed_point = sample("fixed-point")?
        .iter()
        .all(|v| v[1] <= tol.equality * (1.0 + 2.0 * v[0]));
    let norm_preserving = sample("norm-preserving")?
        .iter()
        .all(|v| within(v[2], v[0], tol.norm * v[0]));
    let id = PsdMatrix::<R>::identity(2);
    let unit_norm = within(op.apply(&id, &id)?.operator_norm().as_f64(), 1.0, tol.norm);
    let a = PsdMatrix::<R>::from_diagonal(&[R::one(), R::lit(2.0), R::lit(3.0)])?;
    let single_invertible = within(
        op.apply(&a, &a)?.operator_norm().as_f64(),
        3.0,
        3.0 * tol.norm,
    );
    Ok(MeanConditions {
        fixed_point,
        unit_norm,
        norm_preserving,
        single_invertible,
    })
}

/// The four equivalent characterizations of a mean must agree.
pub fn check_mean_tfae<R: Real, O: PsdOperation<R> + ?Sized>(
    op: &O,
    cfg: &TrialConfig,
) -> VerifyReport {
    let property = format!("mean-tfae {}", op.label());
    let trials = cfg.trials * 2 + 2;
    match mean_conditions::<R, O>(op, cfg) {
        Ok(c) => {
            let text = format!(
                "fixed point {}, unit norm {}, norm preserving {}, single invertible {}",
                c.fixed_point, c.unit_norm, c.norm_preserving, c.single_invertible
            );
            let agree = c.agree();
            VerifyReport::new(
                property,
                MEAN_TFAE,
                trials,
                vec![Measurement {
                    name: "disagreeing conditions".into(),
                    worst: if agree { 0.0 } else { 1.0 },
                    tolerance: 0.0,
                    passed: agree,
                }],
            )
            .with_witness((!agree).then(|| format!("{text}\n")))
            .note(text)
        }
        Err(e) => failed_report(property, MEAN_TFAE, e),
    }
}

/// Distances of `‖σ_N‖, f_N(1), μ_N([0,∞])` to the limit values, for the
/// last element `σ_N` of a sequence.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ConvergenceVerdicts {
    pub distances: [f64; 3],
    pub converged: [bool; 3],
}

impl ConvergenceVerdicts {
    pub fn agree(&self) -> bool {
        self.converged.iter().all(|&c| c == self.converged[0])
    }
}

fn norm_triple<R: Real>(sigma: &Connection<R>, quad: &QuadSpec<R>) -> Result<[f64; 3]> {
    Ok([
        sigma.norm()?.value.as_f64(),
        sigma.representing_function().norm().as_f64(),
        sigma
            .representing_measure_with(quad)?
            .total_mass()?
            .as_f64(),
    ])
}

/// Verdicts under `tol` for the last element of `sequence`.
pub fn convergence_verdicts<R: Real>(
    sequence: &[Connection<R>],
    limit: &Connection<R>,
    quad: &QuadSpec<R>,
    tol: f64,
) -> Result<ConvergenceVerdicts> {
    let last = sequence
        .last()
        .ok_or_else(|| Error::InvalidParameter("empty connection sequence".into()))?;
    let (x, y) = (norm_triple(last, quad)?, norm_triple(limit, quad)?);
    Ok(convergence_from_triples(x, y, tol))
}

/// Verdicts from precomputed norm triples.
pub fn convergence_from_triples(last: [f64; 3], limit: [f64; 3], tol: f64) -> ConvergenceVerdicts {
    let distances = [0, 1, 2].map(|i| (last[i] - limit[i]).abs());
    let converged = [0, 1, 2].map(|i| within(last[i], limit[i], tol));
    ConvergenceVerdicts {
        distances,
        converged,
    }
}

/// `σₙ = (1 + 1/n)·!` for `n = 1..=count`.
pub fn harmonic_sequence<R: Real>(count: usize) -> Result<Vec<Connection<R>>> {
    (1..=count)
        .map(|n| Connection::harmonic().scale(R::one() + R::lit(n as f64).recip()))
        .collect()
}

/// `σₙ = n·!` for `n = 1..=count`, which has no limit.
pub fn divergent_sequence<R: Real>(count: usize) -> Result<Vec<Connection<R>>> {
    (1..=count)
        .map(|n| Connection::harmonic().scale(R::lit(n as f64)))
        .collect()
}

/// The three norm sequences converge together or not at all; `tol` is
/// `cfg.tol.convergence`.
pub fn check_convergence_equivalence<R: Real>(
    sequence: &[Connection<R>],
    limit: &Connection<R>,
    cfg: &TrialConfig,
) -> VerifyReport {
    let property = format!("convergence n = {} to {}", sequence.len(), limit.label());
    let verdicts = cfg
        .quad::<R>()
        .and_then(|q| convergence_verdicts(sequence, limit, &q, cfg.tol.convergence));
    match verdicts {
        Ok(v) => {
            let text = format!(
                "distances ‖σ‖ {:e}, f(1) {:e}, μ mass {:e}; converged {:?}",
                v.distances[0], v.distances[1], v.distances[2], v.converged
            );
            let agree = v.agree();
            VerifyReport::new(
                property,
                CONVERGENCE,
                sequence.len(),
                vec![Measurement {
                    name: "disagreeing verdicts".into(),
                    worst: if agree { 0.0 } else { 1.0 },
                    tolerance: 0.0,
                    passed: agree,
                }],
            )
            .with_witness((!agree).then(|| format!("{text}\n")))
            .note(text)
        }
        Err(e) => failed_report(property, CONVERGENCE, e),
    }
}

/// Norms along `t▽ + (1−t)!`, of the constant sequence `#`, and of
/// `normalize(k·#)` for `k ∈ {0.1, 1, 2, …, 10}`.
pub fn check_mean_limit<R: Real>(cfg: &TrialConfig) -> VerifyReport {
    let property = "mean-limit".to_string();
    let mut members: Vec<Result<(String, Connection<R>)>> = Vec::new();
    let path = |t: f64| {
        Connection::cone(vec![
            (R::lit(t), Connection::arithmetic()),
            (R::lit(1.0 - t), Connection::harmonic()),
        ])
    };
    for i in 0..=10 {
        let t = i as f64 / 10.0;
        members.push(path(t).map(|c| (format!("path t = {t}"), c)));
    }
    members.push(path(0.5).map(|c| ("path limit t = 0.5".into(), c)));
    members.push(Ok(("constant geometric".into(), Connection::geometric())));
    for k in [0.1, 1.0, 2.0, 3.0, 4.0, 5.0, 6.0, 7.0, 8.0, 9.0, 10.0] {
        let c = Connection::<R>::geometric()
            .scale(R::lit(k))
            .and_then(|c| c.normalize());
        members.push(c.map(|c| (format!("normalize({k}·#)"), c)));
    }
    let trials = members
        .into_iter()
        .map(|m| match m {
            Ok((name, c)) => (
                format!("{name}: {c}\n"),
                c.norm().map(|n| vec![(n.value.as_f64() - 1.0).abs()]),
            ),
            Err(e) => (String::new(), Err(e)),
        })
        .collect();
    aggregate(property, MEAN_LIMIT, &[("|‖σ‖ − 1|", cfg.tol.norm)], trials)
}

/// The screen accepts `x^α` for `α ∈ {0, ¼, ½, 1}`, the log mean and
/// `x/(1 + x)`, and rejects `x²` and `exp` on the positive points of the
/// default grid.
pub fn check_loewner_screen<R: Real>() -> VerifyReport {
    let grid: Vec<R> = default_grid::<R>()
        .into_iter()
        .filter(|x| *x > R::zero())
        .collect();
    let accept: Vec<(String, OMFunction<R>)> = [0.0, 0.25, 0.5, 1.0]
        .iter()
        .map(|&a| {
            (
                format!("power {a}"),
                OMFunction::power(R::lit(a)).expect("exponent in [0, 1]"),
            )
        })
        .chain([
            ("logmean".to_string(), OMFunction::log_mean()),
            (
                "moebius 1".to_string(),
                OMFunction::moebius(R::one()).expect("positive"),
            ),
        ])
        .collect();
    let mut trials: Vec<Trial> = accept
        .iter()
        .map(|(name, f)| {
            let v = loewner_check_fn(|x| f.eval(x), &grid);
            (
                format!("{name}\n"),
                v.map(|v| vec![if v.is_monotone_candidate { 0.0 } else { 1.0 }]),
            )
        })
        .collect();
    let reject: [(&str, fn(R) -> R); 2] = [("x^2", |x| x * x), ("exp", |x| x.exp())];
    for (name, f) in reject {
        let v = loewner_check_fn(f, &grid);
        trials.push((
            format!("{name}\n"),
            v.map(|v| vec![if v.is_monotone_candidate { 1.0 } else { 0.0 }]),
        ));
    }
    aggregate(
        "loewner-screen".into(),
        LOEWNER,
        &[("wrong verdicts", 0.0)],
        trials,
    )
}

/// Runs each check on every broken fixture and passes iff each fixture is
/// rejected by the checks aimed at it.
pub fn check_harness<R: Real>(cfg: &TrialConfig) -> VerifyReport {
    type Check = fn(&BrokenOp, &TrialConfig) -> VerifyReport;
    let expected: [(BrokenOp, &str, Check); 6] = [
        (BrokenOp::SymmetrizedProduct, "monotonicity", |o, c| {
            check_monotonicity::<R, _>(o, c)
        }),
        (BrokenOp::SquaredAverage, "monotonicity", |o, c| {
            check_monotonicity::<R, _>(o, c)
        }),
        (BrokenOp::SquaredAverage, "transformer", |o, c| {
            check_transformer::<R, _>(o, c)
        }),
        (BrokenOp::RangeProjection, "transformer", |o, c| {
            check_transformer::<R, _>(o, c)
        }),
        (BrokenOp::RangeProjection, "continuity", |o, c| {
            check_continuity_from_above::<R, _>(o, c)
        }),
        (BrokenOp::DimensionDependent, "mean-tfae", |o, c| {
            check_mean_tfae::<R, _>(o, c)
        }),
    ];
    let trials = expected
        .par_iter()
        .map(|(op, name, check)| {
            let r = check(op, cfg);
            let label = <BrokenOp as PsdOperation<R>>::label(op);
            let text = format!(
                "{name} {label}: {}\n",
                if r.passed { "accepted" } else { "rejected" }
            );
            (text, Ok(vec![if r.passed { 1.0 } else { 0.0 }]))
        })
        .collect();
    aggregate(
        "harness".into(),
        HARNESS,
        &[("accepted fixtures", 0.0)],
        trials,
    )
}

/// Groups of checks selectable from the command line.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Suite {
    Axioms,
    Norms,
    Isometry,
    Means,
    Convergence,
    Loewner,
    Harness,
    All,
}

impl Suite {
    pub const NAMES: [&'static str; 8] = [
        "axioms",
        "norms",
        "isometry",
        "means",
        "convergence",
        "loewner",
        "harness",
        "all",
    ];

    pub fn from_name(name: &str) -> Option<Self> {
        Some(match name {
            "axioms" => Suite::Axioms,
            "norms" => Suite::Norms,
            "isometry" => Suite::Isometry,
            "means" => Suite::Means,
            "convergence" => Suite::Convergence,
            "loewner" => Suite::Loewner,
            "harness" => Suite::Harness,
            "all" => Suite::All,
            _ => return None,
        })
    }
}

fn catalog<R: Real>() -> Vec<Connection<R>> {
    NamedMean::ALL
        .iter()
        .map(|m| Connection::named(*m))
        .collect()
}

pub fn run_suite<R: Real>(suite: Suite, cfg: &TrialConfig) -> Vec<VerifyReport> {
    let all = suite == Suite::All;
    let mut out = Vec::new();
    if all || suite == Suite::Axioms {
        for c in catalog::<R>() {
            out.push(check_monotonicity(&c, cfg));
            out.push(check_transformer(&c, cfg));
            out.push(check_continuity_from_above(&c, cfg));
        }
    }
    if all || suite == Suite::Norms {
        for c in catalog::<R>() {
            out.push(check_norm_forms(&c, cfg));
        }
        out.push(check_norm_axioms::<R>(cfg));
    }
    if all || suite == Suite::Isometry {
        out.push(check_isometry::<R>(cfg));
    }
    if all || suite == Suite::Means {
        let mut family = vec![Connection::<R>::zero()];
        for c in catalog::<R>() {
            for k in [0.5, 1.0, 2.0] {
                family.push(c.scale(R::lit(k)).expect("positive factor"));
            }
        }
        for c in &family {
            out.push(check_mean_tfae(c, cfg));
        }
        out.push(check_mean_limit::<R>(cfg));
    }
    if all || suite == Suite::Convergence {
        let limit = Connection::<R>::harmonic();
        for seq in [harmonic_sequence::<R>(50), divergent_sequence::<R>(50)] {
            match seq {
                Ok(s) => out.push(check_convergence_equivalence(&s, &limit, cfg)),
                Err(e) => out.push(failed_report("convergence".into(), CONVERGENCE, e)),
            }
        }
        out.push(check_convergence_equivalence(
            std::slice::from_ref(&limit),
            &limit,
            cfg,
        ));
    }
    if all || suite == Suite::Loewner {
        out.push(check_loewner_screen::<R>());
    }
    if all || suite == Suite::Harness {
        out.push(check_harness::<R>(cfg));
    }
    out
}
