//! Random instances: `G·Gᵀ` with standard normal `G`.

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::connections::{Connection, NamedMean};
use crate::matcore::PsdMatrix;
use crate::scalar::Real;

pub type TrialRng = ChaCha8Rng;

/// FNV-1a, used to give every property its own random streams.
pub(crate) fn salt(name: &str) -> u64 {
    name.bytes().fold(0xcbf2_9ce4_8422_2325, |h, b| {
        (h ^ b as u64).wrapping_mul(0x0100_0000_01b3)
    })
}

/// Generator for trial `trial` of the property with salt `salt`.
pub fn trial_rng(seed: u64, salt: u64, trial: u64) -> TrialRng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ salt);
    rng.set_stream(trial);
    rng
}

fn gaussian<R: Real>(rng: &mut impl Rng, rows: usize, cols: usize) -> DMatrix<R> {
    DMatrix::from_fn(rows, cols, |_, _| {
        R::lit(rng.sample::<f64, _>(StandardNormal))
    })
}

fn gram<R: Real>(g: &DMatrix<R>) -> PsdMatrix<R> {
    PsdMatrix::from_computed(&(g * g.transpose())).expect("a Gram matrix is PSD")
}

/// `G·Gᵀ` with `G` of size `n × n` whose columns from `rank` on are zero.
pub fn random_psd<R: Real>(rng: &mut impl Rng, n: usize, rank: usize) -> PsdMatrix<R> {
    let mut g = gaussian::<R>(rng, n, n);
    for j in rank.min(n)..n {
        g.column_mut(j).fill(R::zero());
    }
    gram(&g)
}

/// Smallest ratio `λ / ‖A‖` over the nonzero eigenvalues accepted by
/// [`random_psd_separated`].
pub const SEPARATED: f64 = 1e-3;

/// [`random_psd`] redrawn until every nonzero eigenvalue is at least
/// `SEPARATED · ‖A‖`, so the null space is well defined in floating point.
pub fn random_psd_separated<R: Real>(rng: &mut impl Rng, n: usize, rank: usize) -> PsdMatrix<R> {
    loop {
        let a = random_psd::<R>(rng, n, rank);
        let ev = a.clamped_eigenvalues();
        if rank == 0 || ev[n - rank.min(n)] >= R::lit(SEPARATED) * a.operator_norm() {
            return a;
        }
    }
}

/// Full rank with probability 2/3, otherwise a uniformly chosen smaller rank.
pub fn random_rank(rng: &mut impl Rng, n: usize) -> usize {
    if rng.random_range(0..3) == 0 {
        rng.random_range(0..n)
    } else {
        n
    }
}

/// [`random_psd_separated`] at a rank drawn by [`random_rank`].
pub fn random_psd_any<R: Real>(rng: &mut impl Rng, n: usize) -> PsdMatrix<R> {
    let rank = random_rank(rng, n);
    random_psd_separated(rng, n, rank)
}

/// `G·Gᵀ` with `G` of size `n × 2n`, invertible and moderately conditioned.
pub fn random_invertible<R: Real>(rng: &mut impl Rng, n: usize) -> PsdMatrix<R> {
    gram(&gaussian::<R>(rng, n, 2 * n))
}

/// Joint reciprocal condition number accepted by [`random_well_conditioned_pair`].
pub const WELL_CONDITIONED: f64 = 1e-2;

/// Two [`random_invertible`] draws, redrawn until
/// `min(λ_min(A), λ_min(B)) / max(‖A‖, ‖B‖) ⩾ WELL_CONDITIONED`.
pub fn random_well_conditioned_pair<R: Real>(
    rng: &mut impl Rng,
    n: usize,
) -> (PsdMatrix<R>, PsdMatrix<R>) {
    loop {
        let a = random_invertible::<R>(rng, n);
        let b = random_invertible::<R>(rng, n);
        let low = a.min_eigenvalue().min(b.min_eigenvalue());
        let high = a.operator_norm().max(b.operator_norm());
        if low >= R::lit(WELL_CONDITIONED) * high {
            return (a, b);
        }
    }
}

/// Orthogonal projection onto the span of `rank` Gaussian vectors.
pub fn random_projection<R: Real>(rng: &mut impl Rng, n: usize, rank: usize) -> PsdMatrix<R> {
    if rank == 0 {
        return PsdMatrix::zeros(n);
    }
    let q = gaussian::<R>(rng, n, rank.min(n)).qr().q();
    gram(&q)
}

/// Nonnegative combination of a nonempty random subset of the catalog with
/// weights in `(0, 3)`.
pub fn random_combination<R: Real>(rng: &mut impl Rng) -> Connection<R> {
    loop {
        let mut terms = Vec::new();
        for m in NamedMean::ALL {
            let w = R::lit(3.0 * rng.random::<f64>());
            if rng.random_bool(0.5) && w > R::zero() {
                terms.push((w, Connection::named(m)));
            }
        }
        if !terms.is_empty() {
            return Connection::cone(terms).expect("weights are positive");
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn generated_ranks() {
        let mut rng = trial_rng(7, salt("ranks"), 0);
        for n in 1..=6 {
            for rank in 0..=n {
                let a = random_psd::<f64>(&mut rng, n, rank);
                let nonzero = a
                    .clamped_eigenvalues()
                    .iter()
                    .filter(|&&l| l > 1e-10 * a.operator_norm())
                    .count();
                assert_eq!(nonzero, rank);
                let p = random_projection::<f64>(&mut rng, n, rank);
                let h = p.as_hermitian();
                let sq = h.congruence(p.entries()).unwrap();
                assert!(sq.distance(h).unwrap() < 1e-12);
                assert!((h.entries().trace() - rank as f64).abs() < 1e-12);
                let s = random_psd_separated::<f64>(&mut rng, n, rank);
                let ev = s.clamped_eigenvalues();
                assert!(ev[..n - rank]
                    .iter()
                    .all(|&l| l < 1e-12 * s.operator_norm().max(1.0)));
                assert!(ev[n - rank..]
                    .iter()
                    .all(|&l| l >= SEPARATED * s.operator_norm()));
            }
            assert!(random_invertible::<f64>(&mut rng, n).is_invertible());
            let (a, b) = random_well_conditioned_pair::<f64>(&mut rng, n);
            assert!(a.min_eigenvalue() >= WELL_CONDITIONED * b.operator_norm());
        }
    }

    #[test]
    fn streams_are_reproducible() {
        let draw = |t| random_psd::<f64>(&mut trial_rng(3, salt("p"), t), 3, 3);
        assert_eq!(draw(5).entries(), draw(5).entries());
        assert_ne!(draw(5).entries(), draw(6).entries());
    }
}
