use crate::connections::Connection;
use crate::error::Result;
use crate::matcore::{HermitianMatrix, PsdMatrix, ABS_FLOOR, TOL_INV};
use crate::scalar::Real;

/// A binary operation on PSD matrices that the checks can be run against.
pub trait PsdOperation<R: Real>: Sync {
    fn label(&self) -> String;
    fn apply(&self, a: &PsdMatrix<R>, b: &PsdMatrix<R>) -> Result<HermitianMatrix<R>>;
}

impl<R: Real> PsdOperation<R> for Connection<R> {
    fn label(&self) -> String {
        Connection::label(self).to_string()
    }

    fn apply(&self, a: &PsdMatrix<R>, b: &PsdMatrix<R>) -> Result<HermitianMatrix<R>> {
        Ok(self.evaluate(a, b)?.into_hermitian())
    }
}

/// Operations that are not connections, used to show each check can fail.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BrokenOp {
    /// `(AB + BA)/2`: not monotone.
    SymmetrizedProduct,
    /// Projection onto the range of `A`: monotone, but not continuous from
    /// above at singular `A`, and no transformer inequality.
    RangeProjection,
    /// `((A + B)/2)²`: neither monotone nor a transformer.
    SquaredAverage,
    /// `(A + B)/2` in dimension 2 and `A + B` elsewhere, so `I σ I` at
    /// dimension 2 misreports the norm.
    DimensionDependent,
}

impl BrokenOp {
    pub const ALL: [BrokenOp; 4] = [
        BrokenOp::SymmetrizedProduct,
        BrokenOp::RangeProjection,
        BrokenOp::SquaredAverage,
        BrokenOp::DimensionDependent,
    ];
}

impl<R: Real> PsdOperation<R> for BrokenOp {
    fn label(&self) -> String {
        match self {
            BrokenOp::SymmetrizedProduct => "fixture symmetrized-product",
            BrokenOp::RangeProjection => "fixture range-projection",
            BrokenOp::SquaredAverage => "fixture squared-average",
            BrokenOp::DimensionDependent => "fixture dimension-dependent",
        }
        .to_string()
    }

    fn apply(&self, a: &PsdMatrix<R>, b: &PsdMatrix<R>) -> Result<HermitianMatrix<R>> {
        let (x, y) = (a.entries(), b.entries());
        match self {
            BrokenOp::SymmetrizedProduct => Ok(HermitianMatrix::from_computed(
                &((x * y + y * x) * R::lit(0.5)),
            )),
            BrokenOp::RangeProjection => {
                let cut = (R::tol(TOL_INV) * a.operator_norm()).max(R::tol(ABS_FLOOR));
                a.apply_spectral(|l| if l > cut { R::one() } else { R::zero() })
            }
            BrokenOp::SquaredAverage => {
                let m = (x + y) * R::lit(0.5);
                Ok(HermitianMatrix::from_computed(&(&m * &m)))
            }
            BrokenOp::DimensionDependent => {
                let k = if a.dim() == 2 { R::lit(0.5) } else { R::one() };
                Ok(HermitianMatrix::from_computed(&((x + y) * k)))
            }
        }
    }
}
