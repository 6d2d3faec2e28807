//! Dense Hermitian and positive semidefinite matrices.
//!
//! [`HermitianMatrix`] is the carrier of every operator computation in the
//! crate. It stores the (exactly symmetrized) entries and lazily caches an
//! ascending spectral decomposition, which backs the functional calculus,
//! the Loewner order and the operator norm. [`PsdMatrix`] adds the
//! positivity invariant.

mod io;

pub use io::{format_matrix, parse_matrix, read_matrix_file};

use std::fmt;
use std::sync::OnceLock;

use nalgebra::{DMatrix, DVector, SymmetricEigen};

use crate::error::{Error, Result};
use crate::scalar::{Entry, Real};

/// Relative symmetry tolerance, in units of the largest entry modulus.
pub const TOL_SYM: f64 = 1e-12;
/// Relative positivity tolerance, in units of the operator norm.
pub const TOL_PSD: f64 = 1e-10;
/// Relative invertibility threshold, in units of the operator norm.
pub const TOL_INV: f64 = 1e-12;
/// Absolute floor for tolerances on (numerically) zero matrices.
pub const ABS_FLOOR: f64 = 1e-14;

/// Ascending eigenvalues together with a unitary matrix of eigenvectors
/// (column `i` belongs to eigenvalue `i`).
#[derive(Debug, Clone)]
pub struct Spectral<R: Real, E: Entry<R>> {
    pub eigenvalues: DVector<R>,
    pub eigenvectors: DMatrix<E>,
}

impl<R: Real, E: Entry<R>> Spectral<R, E> {
    fn compute(entries: &DMatrix<E>) -> Self {
        let eig = SymmetricEigen::new(entries.clone());
        let n = eig.eigenvalues.len();
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&i, &j| {
            eig.eigenvalues[i]
                .partial_cmp(&eig.eigenvalues[j])
                .unwrap_or(std::cmp::Ordering::Equal)
        });
        let eigenvalues = DVector::from_iterator(n, order.iter().map(|&i| eig.eigenvalues[i]));
        let eigenvectors = DMatrix::from_fn(n, n, |r, c| eig.eigenvectors[(r, order[c])]);
        Spectral {
            eigenvalues,
            eigenvectors,
        }
    }

    /// `U · diag(values) · U*`.
    pub fn synthesize(&self, values: &[R]) -> DMatrix<E> {
        let u = &self.eigenvectors;
        let mut scaled = u.clone();
        for (mut col, &v) in scaled.column_iter_mut().zip(values) {
            col.iter_mut().for_each(|e| *e = e.scale(v));
        }
        scaled * u.adjoint()
    }
}

/// A finite Hermitian matrix with a lazily computed, immutable spectral cache.
pub struct HermitianMatrix<R: Real, E: Entry<R> = R> {
    entries: DMatrix<E>,
    spectral: OnceLock<Spectral<R, E>>,
}

impl<R: Real, E: Entry<R>> Clone for HermitianMatrix<R, E> {
    fn clone(&self) -> Self {
        let spectral = OnceLock::new();
        if let Some(s) = self.spectral.get() {
            let _ = spectral.set(s.clone());
        }
        HermitianMatrix {
            entries: self.entries.clone(),
            spectral,
        }
    }
}

impl<R: Real, E: Entry<R>> fmt::Debug for HermitianMatrix<R, E> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("HermitianMatrix")
            .field("entries", &self.entries)
            .finish()
    }
}

pub(crate) fn symmetrize<R: Real, E: Entry<R>>(m: &DMatrix<E>) -> DMatrix<E> {
    let half = R::lit(0.5);
    (m + m.adjoint()).map(|e| e.scale(half))
}

fn max_modulus<R: Real, E: Entry<R>>(m: &DMatrix<E>) -> R {
    m.iter().fold(R::zero(), |acc, e| acc.max(e.modulus()))
}

impl<R: Real, E: Entry<R>> HermitianMatrix<R, E> {
    /// Validates that `entries` is square and Hermitian within
    /// `TOL_SYM · max|entry|`, then stores its exact Hermitian part.
    pub fn new(entries: DMatrix<E>) -> Result<Self> {
        if entries.nrows() != entries.ncols() {
            return Err(Error::DimensionMismatch {
                left: entries.nrows(),
                right: entries.ncols(),
            });
        }
        if entries.nrows() == 0 {
            return Err(Error::InvalidParameter(
                "matrix dimension must be positive".into(),
            ));
        }
        let asymmetry = max_modulus(&(&entries - entries.adjoint()));
        let tolerance = (R::tol(TOL_SYM) * max_modulus(&entries)).max(R::tol(ABS_FLOOR));
        if !(asymmetry <= tolerance) {
            return Err(Error::NonHermitianInput {
                asymmetry: asymmetry.as_f64(),
                tolerance: tolerance.as_f64(),
            });
        }
        Ok(Self::from_entries(symmetrize(&entries)))
    }

    /// Builds a matrix from entries that are already exactly Hermitian.
    pub(crate) fn from_entries(entries: DMatrix<E>) -> Self {
        HermitianMatrix {
            entries,
            spectral: OnceLock::new(),
        }
    }

    /// Symmetrizes a computed result without validation.
    pub(crate) fn from_computed(entries: &DMatrix<E>) -> Self {
        Self::from_entries(symmetrize(entries))
    }

    pub fn identity(dim: usize) -> Self {
        Self::from_entries(DMatrix::identity(dim, dim))
    }

    pub fn zeros(dim: usize) -> Self {
        Self::from_entries(DMatrix::zeros(dim, dim))
    }

    /// `x · I` of the given dimension.
    pub fn scalar(dim: usize, x: R) -> Self {
        Self::from_entries(DMatrix::from_diagonal_element(dim, dim, E::from_real(x)))
    }

    pub fn from_diagonal(values: &[R]) -> Self {
        let n = values.len();
        Self::from_entries(DMatrix::from_fn(n, n, |i, j| {
            if i == j {
                E::from_real(values[i])
            } else {
                E::zero()
            }
        }))
    }

    pub fn dim(&self) -> usize {
        self.entries.nrows()
    }

    pub fn entries(&self) -> &DMatrix<E> {
        &self.entries
    }

    pub fn into_entries(self) -> DMatrix<E> {
        self.entries
    }

    /// Cached spectral decomposition (computed on first access).
    pub fn spectral(&self) -> &Spectral<R, E> {
        self.spectral
            .get_or_init(|| Spectral::compute(&self.entries))
    }

    /// Ascending eigenvalues and the matching unitary eigenvector matrix.
    pub fn spectral_decompose(&self) -> (&DVector<R>, &DMatrix<E>) {
        let s = self.spectral();
        (&s.eigenvalues, &s.eigenvectors)
    }

    pub fn eigenvalues(&self) -> &DVector<R> {
        &self.spectral().eigenvalues
    }

    pub fn min_eigenvalue(&self) -> R {
        self.eigenvalues()[0]
    }

    pub fn max_eigenvalue(&self) -> R {
        self.eigenvalues()[self.dim() - 1]
    }

    /// Spectral radius, which equals the operator norm for Hermitian matrices.
    pub fn operator_norm(&self) -> R {
        self.min_eigenvalue().abs().max(self.max_eigenvalue().abs())
    }

    /// `true` iff the smallest eigenvalue is at least `−tol · max(1, ‖H‖)`.
    pub fn is_psd(&self, tol: R) -> bool {
        self.min_eigenvalue() >= -(tol * self.operator_norm().max(R::one()))
    }

    /// Functional calculus on the unclamped spectrum.
    pub fn map_spectrum(&self, g: impl Fn(R) -> R) -> Result<Self> {
        let s = self.spectral();
        let values = s
            .eigenvalues
            .iter()
            .map(|&l| {
                let v = g(l);
                if v.is_finite() {
                    Ok(v)
                } else {
                    Err(Error::DomainError { at: l.as_f64() })
                }
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self::from_computed(&s.synthesize(&values)))
    }

    fn check_dims(&self, other: &Self) -> Result<()> {
        if self.dim() == other.dim() {
            Ok(())
        } else {
            Err(Error::DimensionMismatch {
                left: self.dim(),
                right: other.dim(),
            })
        }
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_dims(other)?;
        Ok(Self::from_entries(&self.entries + &other.entries))
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.check_dims(other)?;
        Ok(Self::from_entries(&self.entries - &other.entries))
    }

    pub fn scale(&self, k: R) -> Self {
        Self::from_entries(self.entries.map(|e| e.scale(k)))
    }

    /// `C · H · C*` for a square `C` of the same dimension.
    pub fn congruence(&self, c: &DMatrix<E>) -> Result<Self> {
        if c.nrows() != self.dim() || c.ncols() != self.dim() {
            return Err(Error::DimensionMismatch {
                left: self.dim(),
                right: c.nrows(),
            });
        }
        Ok(Self::from_computed(&(c * &self.entries * c.adjoint())))
    }

    /// Operator norm of `self − other`.
    pub fn distance(&self, other: &Self) -> Result<R> {
        Ok(self.sub(other)?.operator_norm())
    }

    /// Largest `|λ|` of `self − c·I` relative to `max(|c|, floor)`, used to
    /// test whether a matrix is a scalar multiple of the identity.
    pub fn deviation_from_scalar(&self, c: R) -> R {
        let shifted = Self::from_entries(
            &self.entries - DMatrix::from_diagonal_element(self.dim(), self.dim(), E::from_real(c)),
        );
        shifted.operator_norm() / c.abs().max(R::tol(ABS_FLOOR))
    }
}

/// `A ⩽ B` in the Loewner order, i.e. `B − A` is positive semidefinite
/// within `tol`.
pub fn loewner_leq<R: Real, E: Entry<R>>(
    a: &HermitianMatrix<R, E>,
    b: &HermitianMatrix<R, E>,
    tol: R,
) -> Result<bool> {
    Ok(b.sub(a)?.is_psd(tol))
}

/// Amount by which `A ⩽ B` fails: `max(0, −λ_min(B − A))`.
pub fn loewner_violation<R: Real, E: Entry<R>>(
    a: &HermitianMatrix<R, E>,
    b: &HermitianMatrix<R, E>,
) -> Result<R> {
    Ok((-b.sub(a)?.min_eigenvalue()).max(R::zero()))
}

/// A Hermitian matrix whose spectrum is nonnegative up to
/// `TOL_PSD · ‖A‖`; eigenvalues in `[−tol, 0)` read as zero.
#[derive(Clone, Debug)]
pub struct PsdMatrix<R: Real, E: Entry<R> = R> {
    inner: HermitianMatrix<R, E>,
}

impl<R: Real, E: Entry<R>> PsdMatrix<R, E> {
    pub fn new(h: HermitianMatrix<R, E>) -> Result<Self> {
        let floor = (R::tol(TOL_PSD) * h.operator_norm()).max(R::tol(ABS_FLOOR));
        let min = h.min_eigenvalue();
        if min < -floor {
            return Err(Error::NotPositive {
                min_eigenvalue: min.as_f64(),
            });
        }
        Ok(PsdMatrix { inner: h })
    }

    pub fn from_entries(entries: DMatrix<E>) -> Result<Self> {
        Self::new(HermitianMatrix::new(entries)?)
    }

    pub(crate) fn from_computed(entries: &DMatrix<E>) -> Result<Self> {
        Self::new(HermitianMatrix::from_computed(entries))
    }

    /// Wraps a matrix known to be PSD by construction (sums, congruences).
    pub(crate) fn trusted(h: HermitianMatrix<R, E>) -> Self {
        PsdMatrix { inner: h }
    }

    pub fn identity(dim: usize) -> Self {
        Self::trusted(HermitianMatrix::identity(dim))
    }

    pub fn zeros(dim: usize) -> Self {
        Self::trusted(HermitianMatrix::zeros(dim))
    }

    /// `x · I`; requires `x ⩾ 0`.
    pub fn scalar(dim: usize, x: R) -> Result<Self> {
        if x < R::zero() {
            return Err(Error::NegativeScalar(x.as_f64()));
        }
        Ok(Self::trusted(HermitianMatrix::scalar(dim, x)))
    }

    pub fn from_diagonal(values: &[R]) -> Result<Self> {
        Self::new(HermitianMatrix::from_diagonal(values))
    }

    pub fn as_hermitian(&self) -> &HermitianMatrix<R, E> {
        &self.inner
    }

    pub fn into_hermitian(self) -> HermitianMatrix<R, E> {
        self.inner
    }

    pub fn dim(&self) -> usize {
        self.inner.dim()
    }

    pub fn entries(&self) -> &DMatrix<E> {
        self.inner.entries()
    }

    pub fn operator_norm(&self) -> R {
        self.inner.max_eigenvalue().max(R::zero())
    }

    /// Eigenvalues clamped at zero, ascending.
    pub fn clamped_eigenvalues(&self) -> Vec<R> {
        self.inner
            .eigenvalues()
            .iter()
            .map(|&l| l.max(R::zero()))
            .collect()
    }

    pub fn min_eigenvalue(&self) -> R {
        self.inner.min_eigenvalue().max(R::zero())
    }

    /// Invertible in the sense of `inv_psd`: `λ_min > TOL_INV · ‖A‖`.
    pub fn is_invertible(&self) -> bool {
        let norm = self.operator_norm();
        norm > R::zero() && self.inner.min_eigenvalue() > R::tol(TOL_INV) * norm
    }

    /// Reciprocal condition number `λ_min / λ_max` (zero for singular input).
    pub fn rcond(&self) -> R {
        let norm = self.operator_norm();
        if norm > R::zero() {
            self.min_eigenvalue() / norm
        } else {
            R::zero()
        }
    }

    /// Functional calculus `U · diag(g(λᵢ)) · U*` on the clamped spectrum.
    pub fn apply_spectral(&self, g: impl Fn(R) -> R) -> Result<HermitianMatrix<R, E>> {
        let s = self.inner.spectral();
        let values = s
            .eigenvalues
            .iter()
            .map(|&l| {
                let x = l.max(R::zero());
                let v = g(x);
                if v.is_finite() {
                    Ok(v)
                } else {
                    Err(Error::DomainError { at: x.as_f64() })
                }
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(HermitianMatrix::from_computed(&s.synthesize(&values)))
    }

    /// Functional calculus with a nonnegative `g`; the result is PSD.
    pub(crate) fn apply_nonnegative(&self, g: impl Fn(R) -> R) -> Result<Self> {
        Ok(Self::trusted(self.apply_spectral(|x| g(x).max(R::zero()))?))
    }

    pub fn inv(&self) -> Result<Self> {
        if !self.is_invertible() {
            return Err(Error::SingularMatrix {
                min_eigenvalue: self.inner.min_eigenvalue().as_f64(),
            });
        }
        self.apply_nonnegative(|x| x.recip())
    }

    pub fn sqrt(&self) -> Self {
        self.apply_nonnegative(|x| x.sqrt())
            .expect("square root is finite on a clamped spectrum")
    }

    /// `A^{-1/2}`; requires invertibility.
    pub fn inv_sqrt(&self) -> Result<Self> {
        if !self.is_invertible() {
            return Err(Error::SingularMatrix {
                min_eigenvalue: self.inner.min_eigenvalue().as_f64(),
            });
        }
        self.apply_nonnegative(|x| x.sqrt().recip())
    }

    /// Moore–Penrose pseudo-inverse, treating eigenvalues at or below
    /// `TOL_INV · ‖A‖` as zero.
    pub fn pinv(&self) -> Self {
        let cut = (R::tol(TOL_INV) * self.operator_norm()).max(R::tol(ABS_FLOOR));
        self.apply_nonnegative(|x| if x > cut { x.recip() } else { R::zero() })
            .expect("pseudo-inverse is finite")
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        Ok(Self::trusted(self.inner.add(&other.inner)?))
    }

    /// `k · A`; requires `k ⩾ 0`.
    pub fn scale(&self, k: R) -> Result<Self> {
        if k < R::zero() {
            return Err(Error::NegativeScalar(k.as_f64()));
        }
        Ok(Self::trusted(self.inner.scale(k)))
    }

    /// `A + ε·I`.
    pub fn shifted(&self, eps: R) -> Result<Self> {
        self.add(&Self::scalar(self.dim(), eps)?)
    }

    /// `C · A · C*`, which is PSD for every `C`.
    pub fn congruence(&self, c: &DMatrix<E>) -> Result<Self> {
        Ok(Self::trusted(self.inner.congruence(c)?))
    }
}

impl<R: Real, E: Entry<R>> From<PsdMatrix<R, E>> for HermitianMatrix<R, E> {
    fn from(p: PsdMatrix<R, E>) -> Self {
        p.inner
    }
}

impl<R: Real, E: Entry<R>> TryFrom<HermitianMatrix<R, E>> for PsdMatrix<R, E> {
    type Error = Error;

    fn try_from(h: HermitianMatrix<R, E>) -> Result<Self> {
        PsdMatrix::new(h)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use nalgebra::dmatrix;
    use num_complex::Complex64;

    fn h(m: DMatrix<f64>) -> HermitianMatrix<f64> {
        HermitianMatrix::new(m).unwrap()
    }

    fn psd(m: DMatrix<f64>) -> PsdMatrix<f64> {
        PsdMatrix::from_entries(m).unwrap()
    }

    fn max_abs(m: &DMatrix<f64>) -> f64 {
        m.iter().fold(0.0, |a, x| a.max(x.abs()))
    }

    #[test]
    fn identity_spectrum() {
        let i = HermitianMatrix::<f64>::identity(2);
        let (l, u) = i.spectral_decompose();
        assert_eq!(l.as_slice(), &[1.0, 1.0]);
        assert!(max_abs(&(u * u.transpose() - DMatrix::identity(2, 2))) < 1e-15);
    }

    #[test]
    fn two_by_two_spectrum() {
        let m = h(dmatrix![2.0, 1.0; 1.0, 2.0]);
        let (l, u) = m.spectral_decompose();
        assert!((l[0] - 1.0).abs() < 1e-14 && (l[1] - 3.0).abs() < 1e-14);
        let recon = m.spectral().synthesize(l.as_slice());
        assert!(max_abs(&(recon - m.entries())) < 1e-10 * 3.0);
        assert!(max_abs(&(u.transpose() * u - DMatrix::identity(2, 2))) < 1e-14);
    }

    #[test]
    fn diagonal_spectrum_is_sorted() {
        let m = HermitianMatrix::<f64>::from_diagonal(&[5.0, 0.0, 3.0]);
        let l: Vec<f64> = m.eigenvalues().iter().copied().collect();
        assert_eq!(l, vec![0.0, 3.0, 5.0]);
    }

    #[test]
    fn rejects_non_hermitian() {
        let err = HermitianMatrix::new(dmatrix![1.0, 2.0; 0.0, 1.0]).unwrap_err();
        assert!(matches!(err, Error::NonHermitianInput { .. }));
        let err = HermitianMatrix::new(DMatrix::<f64>::zeros(2, 3)).unwrap_err();
        assert!(matches!(err, Error::DimensionMismatch { .. }));
    }

    #[test]
    fn tiny_asymmetry_is_symmetrized() {
        let m = h(dmatrix![1.0, 2.0 + 1e-14; 2.0, 1.0]);
        assert_eq!(m.entries()[(0, 1)], m.entries()[(1, 0)]);
    }

    #[test]
    fn apply_spectral_examples() {
        let a = PsdMatrix::<f64>::from_diagonal(&[1.0, 4.0]).unwrap();
        let r = a.apply_spectral(f64::sqrt).unwrap();
        assert!(max_abs(&(r.entries() - dmatrix![1.0, 0.0; 0.0, 2.0])) < 1e-15);

        let i = PsdMatrix::<f64>::identity(3);
        let r = i.apply_spectral(|x| 7.0 * x + 2.0).unwrap();
        assert!(max_abs(&(r.entries() - DMatrix::identity(3, 3) * 9.0)) < 1e-14);

        let a = psd(dmatrix![2.0, 1.0; 1.0, 2.0]);
        let squared = a.apply_spectral(|x| x * x).unwrap();
        let product = a.entries() * a.entries();
        assert!(max_abs(&(squared.entries() - &product)) < 1e-9 * 9.0);
        // commutes with A
        let comm = squared.entries() * a.entries() - a.entries() * squared.entries();
        assert!(max_abs(&comm) < 1e-9 * 3.0 * 9.0);
    }

    #[test]
    fn apply_spectral_domain_error() {
        let a = PsdMatrix::<f64>::from_diagonal(&[0.0, 1.0]).unwrap();
        let err = a.apply_spectral(|x| x.recip()).unwrap_err();
        assert_eq!(err, Error::DomainError { at: 0.0 });
    }

    #[test]
    fn psd_predicate() {
        assert!(HermitianMatrix::<f64>::identity(2).is_psd(1e-10));
        assert!(!h(dmatrix![1.0, 2.0; 2.0, 1.0]).is_psd(1e-10));
        assert!(HermitianMatrix::<f64>::zeros(3).is_psd(1e-10));
    }

    #[test]
    fn loewner_examples() {
        let i = HermitianMatrix::<f64>::identity(2);
        let two = HermitianMatrix::scalar(2, 2.0);
        assert!(loewner_leq(&i, &two, 1e-10).unwrap());
        assert!(!loewner_leq(&two, &i, 1e-10).unwrap());
        let a = HermitianMatrix::from_diagonal(&[1.0, 3.0]);
        let b = h(dmatrix![2.0, 1.0; 1.0, 2.0]);
        assert!(!loewner_leq(&a, &b, 1e-10).unwrap());
        // B − A = [[1,1],[1,−1]] has eigenvalue −√2
        let v = loewner_violation(&a, &b).unwrap();
        assert!((v - 2f64.sqrt()).abs() < 1e-14);
        let err = loewner_leq(&i, &HermitianMatrix::identity(3), 1e-10).unwrap_err();
        assert!(matches!(err, Error::DimensionMismatch { .. }));
    }

    #[test]
    fn operator_norm_examples() {
        assert_eq!(
            HermitianMatrix::<f64>::from_diagonal(&[1.0, 3.0]).operator_norm(),
            3.0
        );
        assert_eq!(HermitianMatrix::<f64>::zeros(2).operator_norm(), 0.0);
        let m = h(dmatrix![2.0, 1.0; 1.0, 2.0]);
        assert!((m.operator_norm() - 3.0).abs() < 1e-14);
        let n = HermitianMatrix::<f64>::from_diagonal(&[-4.0, 1.0]);
        assert_eq!(n.operator_norm(), 4.0);
    }

    #[test]
    fn inverse_and_sqrt() {
        let a = PsdMatrix::<f64>::from_diagonal(&[2.0, 4.0]).unwrap();
        let inv = a.inv().unwrap();
        assert!(max_abs(&(inv.entries() - dmatrix![0.5, 0.0; 0.0, 0.25])) < 1e-15);
        let b = PsdMatrix::<f64>::from_diagonal(&[4.0, 9.0]).unwrap();
        assert!(max_abs(&(b.sqrt().entries() - dmatrix![2.0, 0.0; 0.0, 3.0])) < 1e-15);

        let c = psd(dmatrix![2.0, 1.0; 1.0, 2.0]);
        let r = c.sqrt();
        let sq = r.entries() * r.entries();
        assert!(max_abs(&(sq - c.entries())) < 1e-9 * 3.0);
        let (l, _) = r.as_hermitian().spectral_decompose();
        assert!((l[0] - 1.0).abs() < 1e-14 && (l[1] - 3f64.sqrt()).abs() < 1e-14);
        let prod = c.inv().unwrap().entries() * c.entries();
        assert!(max_abs(&(prod - DMatrix::identity(2, 2))) < 1e-8 * 3.0);
    }

    #[test]
    fn singular_inverse_is_rejected() {
        let a = PsdMatrix::<f64>::from_diagonal(&[1.0, 0.0]).unwrap();
        assert!(matches!(a.inv(), Err(Error::SingularMatrix { .. })));
        let p = a.pinv();
        assert!(max_abs(&(p.entries() - dmatrix![1.0, 0.0; 0.0, 0.0])) < 1e-15);
    }

    #[test]
    fn psd_rejects_negative_and_clamps_roundoff() {
        let err = PsdMatrix::from_entries(dmatrix![1.0, 2.0; 2.0, 1.0]).unwrap_err();
        assert!(matches!(err, Error::NotPositive { .. }));
        let a = PsdMatrix::<f64>::from_diagonal(&[-1e-13, 1.0]).unwrap();
        assert_eq!(a.clamped_eigenvalues()[0], 0.0);
        assert_eq!(a.min_eigenvalue(), 0.0);
    }

    #[test]
    fn complex_hermitian_functional_calculus() {
        let i = Complex64::i();
        let one = Complex64::new(1.0, 0.0);
        let m = DMatrix::from_row_slice(2, 2, &[one * 2.0, i, -i, one * 2.0]);
        let a = PsdMatrix::<f64, Complex64>::from_entries(m.clone()).unwrap();
        let (l, u) = a.as_hermitian().spectral_decompose();
        assert!((l[0] - 1.0).abs() < 1e-14 && (l[1] - 3.0).abs() < 1e-14);
        let unitary = u.adjoint() * u - DMatrix::<Complex64>::identity(2, 2);
        assert!(unitary.iter().all(|z| z.norm() < 1e-14));
        let r = a.sqrt();
        let diff = r.entries() * r.entries() - &m;
        assert!(diff.iter().all(|z| z.norm() < 1e-12));
        let err = HermitianMatrix::<f64, Complex64>::new(DMatrix::from_row_slice(
            2,
            2,
            &[one, i, i, one],
        ));
        assert!(matches!(err, Err(Error::NonHermitianInput { .. })));
    }

    #[test]
    fn single_precision_carrier() {
        let a =
            PsdMatrix::<f32>::from_entries(DMatrix::from_row_slice(2, 2, &[2.0f32, 1.0, 1.0, 2.0]))
                .unwrap();
        let r = a.sqrt();
        let sq = r.entries() * r.entries() - a.entries();
        assert!(sq.iter().all(|x| x.abs() < 1e-5));
    }
}
