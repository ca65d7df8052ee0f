//! Numerical certification of strategies.
//!
//! Residuals are measured on orthonormalized bases, so the tolerance does not
//! depend on how a strategy scales its basis vectors.

use serde::Serialize;

use crate::channel::ChannelSet;
use crate::error::{Error, Result};
use crate::linalg::{self, max_abs, range_basis, CMatrix, RANK_TOL};
use crate::strategy::Strategy;

pub const DEFAULT_TOL: f64 = 1e-8;

#[derive(Debug, Clone, Serialize)]
pub struct PairResidual {
    /// Receiver, 1-based.
    pub i: usize,
    /// Interfering transmitter, 1-based.
    pub j: usize,
    pub residual: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct VerificationReport {
    pub tol: f64,
    pub max_orthogonality_residual: f64,
    pub pair_residuals: Vec<PairResidual>,
    /// `None` when the channel set carries no direct channels.
    pub direct_rank_ok: Option<Vec<bool>>,
    pub dims_ok: bool,
    pub passed: bool,
}

/// Largest entry of `V_i^dagger H_ij U_j` over all `i != j`, plus dimension
/// and direct-channel rank checks.
pub fn check_orthogonality(ch: &ChannelSet, s: &Strategy, tol: f64) -> Result<VerificationReport> {
    s.check_shapes(ch.spec())?;
    let k = ch.k();
    let qu: Vec<CMatrix> = s.u.iter().map(range_basis).collect();
    let qv: Vec<CMatrix> = s.v.iter().map(range_basis).collect();
    let dims_ok = (0..k).all(|i| {
        let d = ch.spec().user(i).d;
        qu[i].ncols() == d && qv[i].ncols() == d
    });
    let mut pair_residuals = Vec::with_capacity(k * (k - 1));
    let mut worst = 0.0f64;
    for (i, j, h) in ch.cross_iter() {
        let residual = max_abs(&(qv[i].adjoint() * h * &qu[j]));
        worst = worst.max(residual);
        pair_residuals.push(PairResidual { i: i + 1, j: j + 1, residual });
    }
    let direct_rank_ok = if ch.has_direct() { Some(direct_rank(ch, &qu, &qv, RANK_TOL)) } else { None };
    let passed = worst <= tol && dims_ok && direct_rank_ok.as_ref().is_none_or(|ok| ok.iter().all(|&b| b));
    Ok(VerificationReport {
        tol,
        max_orthogonality_residual: worst,
        pair_residuals,
        direct_rank_ok,
        dims_ok,
        passed,
    })
}

fn direct_rank(ch: &ChannelSet, qu: &[CMatrix], qv: &[CMatrix], rel_tol: f64) -> Vec<bool> {
    (0..ch.k())
        .map(|i| {
            let h = ch.direct(i).expect("caller checked direct channels");
            let d = ch.spec().user(i).d;
            let scale = linalg::singular_values(h).first().copied().unwrap_or(0.0);
            if scale == 0.0 || qu[i].ncols() < d || qv[i].ncols() < d {
                return false;
            }
            let sv = linalg::singular_values(&(qv[i].adjoint() * h * &qu[i]));
            sv.iter().filter(|&&x| x > rel_tol * scale).count() == d
        })
        .collect()
}

/// Per user: does the desired signal survive projection onto `V_i` with full
/// dimension? Singular values count when above `tol * ||H_ii||`.
pub fn check_direct_rank(ch: &ChannelSet, s: &Strategy, tol: f64) -> Result<Vec<bool>> {
    if !ch.has_direct() {
        return Err(Error::MissingDirectChannels);
    }
    s.check_shapes(ch.spec())?;
    let qu: Vec<CMatrix> = s.u.iter().map(range_basis).collect();
    let qv: Vec<CMatrix> = s.v.iter().map(range_basis).collect();
    Ok(direct_rank(ch, &qu, &qv, tol))
}

/// Dimensions shared among the interference images at receiver `i`:
/// the sum of the ranks of `H_ij U_j` minus the rank of their concatenation.
/// With three users this is `dim(H_ij U_j ∩ H_ik U_k)`.
pub fn interference_overlap(ch: &ChannelSet, s: &Strategy, i: usize) -> usize {
    let images: Vec<CMatrix> = (0..ch.k()).filter(|&j| j != i).map(|j| ch.cross(i, j) * &s.u[j]).collect();
    let separate: usize = images.iter().map(linalg::rank).sum();
    let joint = CMatrix::from_columns(
        &images.iter().flat_map(|m| m.column_iter().map(|c| c.into_owned())).collect::<Vec<_>>(),
    );
    let joint_rank = if joint.ncols() == 0 { 0 } else { linalg::rank(&joint) };
    separate - joint_rank
}

/// Largest principal angle between two column spaces.
pub fn subspace_distance(a: &CMatrix, b: &CMatrix) -> Result<f64> {
    linalg::principal_angle(a, b)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::generate_channels;
    use crate::linalg::{c, random_gaussian};
    use crate::spec::ProblemSpec;
    use rand::SeedableRng;

    fn random_strategy(spec: &ProblemSpec, seed: u64) -> Strategy {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let u = spec.users().iter().map(|u| random_gaussian(u.m, u.d, &mut rng)).collect();
        let v = spec.users().iter().map(|u| random_gaussian(u.n, u.d, &mut rng)).collect();
        Strategy::new(u, v)
    }

    #[test]
    fn zero_channels_pass() {
        let spec = ProblemSpec::symmetric(3, 2, 2, 1).unwrap();
        let ch = generate_channels(&spec, 1).scaled(c(0.0, 0.0)).without_direct();
        let report = check_orthogonality(&ch, &random_strategy(&spec, 2), DEFAULT_TOL).unwrap();
        assert!(report.passed);
        assert!(report.direct_rank_ok.is_none());
        assert_eq!(report.pair_residuals.len(), 6);
    }

    #[test]
    fn misaligned_receiver_fails() {
        let spec = ProblemSpec::symmetric(3, 2, 2, 1).unwrap();
        let ch = generate_channels(&spec, 3).without_direct();
        let mut s = random_strategy(&spec, 4);
        s.v[0] = ch.cross(0, 1) * &s.u[1];
        let report = check_orthogonality(&ch, &s, DEFAULT_TOL).unwrap();
        assert!(!report.passed);
        let r12 = report.pair_residuals.iter().find(|p| p.i == 1 && p.j == 2).unwrap().residual;
        // V_1 spans H_12 U_2 itself, so the residual is the image norm.
        let image = ch.cross(0, 1) * crate::linalg::orthonormal_basis(&s.u[1]).unwrap();
        assert!((r12 - image.norm()).abs() < 1e-12);
        assert!(r12 > 0.1);
    }

    #[test]
    fn shape_mismatch_is_error() {
        let spec = ProblemSpec::symmetric(3, 2, 2, 1).unwrap();
        let ch = generate_channels(&spec, 3);
        let mut s = random_strategy(&spec, 4);
        s.u[2] = CMatrix::zeros(3, 1);
        assert!(matches!(check_orthogonality(&ch, &s, DEFAULT_TOL), Err(Error::ShapeMismatch(_))));
    }

    #[test]
    fn rank_deficient_basis_fails_dims() {
        let spec = ProblemSpec::symmetric(3, 4, 4, 2).unwrap();
        let ch = generate_channels(&spec, 3).scaled(c(0.0, 0.0)).without_direct();
        let mut s = random_strategy(&spec, 4);
        let col = s.u[0].column(0).into_owned();
        s.u[0].set_column(1, &col);
        let report = check_orthogonality(&ch, &s, DEFAULT_TOL).unwrap();
        assert!(!report.dims_ok && !report.passed);
    }

    #[test]
    fn direct_rank_cases() {
        let spec = ProblemSpec::symmetric(3, 2, 2, 1).unwrap();
        let ch = generate_channels(&spec, 5);
        let s = random_strategy(&spec, 6);
        assert_eq!(check_direct_rank(&ch, &s, RANK_TOL).unwrap(), vec![true; 3]);

        let mut direct: Vec<CMatrix> = (0..3).map(|i| ch.direct(i).unwrap().clone()).collect();
        direct[0] = CMatrix::zeros(2, 2);
        direct[1] = CMatrix::identity(2, 2);
        let ch2 = ch.clone().with_direct(direct).unwrap();
        let mut s2 = s.clone();
        s2.u[1] = CMatrix::from_column_slice(2, 1, &[c(1.0, 0.0), c(0.0, 0.0)]);
        s2.v[1] = CMatrix::from_column_slice(2, 1, &[c(0.0, 0.0), c(1.0, 0.0)]);
        let ok = check_direct_rank(&ch2, &s2, RANK_TOL).unwrap();
        assert_eq!(ok, vec![false, false, true]);

        assert!(matches!(check_direct_rank(&ch.without_direct(), &s, RANK_TOL), Err(Error::MissingDirectChannels)));
    }

    #[test]
    fn overlap_is_zero_without_room_to_align() {
        // 2M <= N: the two interference images are in general position.
        let spec = ProblemSpec::symmetric(3, 2, 5, 1).unwrap();
        for seed in 0..20 {
            let ch = generate_channels(&spec, seed);
            let s = random_strategy(&spec, seed + 100);
            for i in 0..3 {
                assert_eq!(interference_overlap(&ch, &s, i), 0);
            }
        }
    }

    #[test]
    fn overlap_of_unaligned_strategy_is_bounded() {
        // 2M > N: generic strategies still do not align (2d <= N here).
        let spec = ProblemSpec::symmetric(3, 4, 6, 2).unwrap();
        let ch = generate_channels(&spec, 9);
        let s = random_strategy(&spec, 10);
        for i in 0..3 {
            assert!(interference_overlap(&ch, &s, i) <= 2 * 4 - 6);
        }
    }

    #[test]
    fn subspace_distance_symmetric() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(12);
        let a = random_gaussian(6, 3, &mut rng);
        let b = random_gaussian(6, 3, &mut rng);
        assert!(subspace_distance(&a, &a).unwrap() < 1e-7);
        let ab = subspace_distance(&a, &b).unwrap();
        let ba = subspace_distance(&b, &a).unwrap();
        assert!((ab - ba).abs() <= 1e-12);
    }

    #[test]
    fn basis_change_keeps_verdict() {
        let spec = ProblemSpec::symmetric(3, 2, 2, 1).unwrap();
        let ch = generate_channels(&spec, 13);
        let s = random_strategy(&spec, 14);
        let before = check_orthogonality(&ch, &s, DEFAULT_TOL).unwrap();
        let scaled = Strategy::new(
            s.u.iter().map(|m| m * c(3.0, -1.0)).collect(),
            s.v.iter().map(|m| m * c(0.2, 0.0)).collect(),
        );
        let after = check_orthogonality(&ch, &scaled, DEFAULT_TOL).unwrap();
        assert_eq!(before.passed, after.passed);
        assert!(after.max_orthogonality_residual <= 10.0 * before.max_orthogonality_residual);
    }
}
