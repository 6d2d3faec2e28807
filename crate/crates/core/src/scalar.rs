//! Scalar abstractions.
//!
//! Every numerical routine in the crate is generic over a real field `R`
//! (`f32` or `f64`) and, for matrices, over an entry type `E` which is either
//! `R` itself (real symmetric matrices) or `Complex<R>` (complex Hermitian
//! matrices).

use nalgebra::{ComplexField, DMatrix, RealField};
use num_traits::ToPrimitive;

/// Real scalar field used for eigenvalues, masses, weights and tolerances.
pub trait Real: RealField + Copy + ToPrimitive + Accumulate<Self> {
    /// Lossy conversion from an `f64` literal.
    #[inline]
    fn lit(x: f64) -> Self {
        nalgebra::convert(x)
    }

    /// Lossy conversion to `f64`, used for reports and printing.
    #[inline]
    fn as_f64(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }

    /// Relative tolerance `tol`, floored at a small multiple of the machine
    /// epsilon so that `f64`-calibrated defaults remain meaningful for `f32`.
    #[inline]
    fn tol(tol: f64) -> Self {
        let floor = Self::default_epsilon() * Self::lit(64.0);
        Self::lit(tol).max(floor)
    }
}

impl<T: RealField + Copy + ToPrimitive + Accumulate<T>> Real for T {}

/// Values that can be accumulated as weighted sums: scalars and matrices.
pub trait Accumulate<R>: Clone {
    fn add_scaled(&mut self, k: R, other: &Self);
    fn is_finite_value(&self) -> bool;
}

macro_rules! accumulate_float {
    ($($t:ty),*) => {$(
        impl Accumulate<$t> for $t {
            fn add_scaled(&mut self, k: $t, other: &Self) {
                *self += k * *other;
            }

            fn is_finite_value(&self) -> bool {
                self.is_finite()
            }
        }
    )*};
}

accumulate_float!(f32, f64);

impl<R: Real, E: Entry<R>> Accumulate<R> for DMatrix<E> {
    fn add_scaled(&mut self, k: R, other: &Self) {
        self.zip_apply(other, |a, b| *a += b.scale(k));
    }

    fn is_finite_value(&self) -> bool {
        self.iter()
            .all(|e| e.real().is_finite() && e.imaginary().is_finite())
    }
}

/// Matrix entry type whose real field is `R`.
pub trait Entry<R: Real>: ComplexField<RealField = R> + Copy {}

impl<R: Real, E: ComplexField<RealField = R> + Copy> Entry<R> for E {}
