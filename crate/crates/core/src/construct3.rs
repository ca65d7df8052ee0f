//! Exact strategies for three users.
//!
//! With `M = N = 2d` every solution comes from a `d`-dimensional invariant
//! subspace of the cyclic channel product `B`. With `M < N` solutions are
//! assembled from alignment paths: kernel vectors of the block matrices
//! `A_r`, whose blocks place one transmitter's vector after another so that
//! consecutive images coincide at the receiver in between.
//!
//! Users are 0-based here and all index arithmetic is modulo 3.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::channel::ChannelSet;
use crate::error::{Error, Result};
use crate::feasibility::decide_3user_symmetric;
use crate::linalg::{self, kernel_basis, least_left_singular, orthonormal_basis, random_gaussian, CMatrix};
use crate::strategy::Strategy;

/// Maximum principal angle above which two strategies count as distinct.
pub const DISTINCT_ANGLE: f64 = 1e-6;

const PATH_SEED_SALT: u64 = 0x5bd1_e995_7f4a_7c15;

fn cyc(i: usize) -> usize {
    i % 3
}

/// Which channel sits in a block of [`AlignmentMatrix::matrix`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct BlockSource {
    pub row_block: usize,
    pub col_block: usize,
    pub receiver: usize,
    pub transmitter: usize,
}

/// `rN x (r+1)M` block matrix for the path starting at receiver `start`.
/// Row block `j` holds `H_{s+j, s+j+1}` in column block `j` and
/// `H_{s+j, s+j+2}` in column block `j + 1`; column block `j` belongs to
/// transmitter `s + j + 1`.
#[derive(Debug, Clone)]
pub struct AlignmentMatrix {
    pub r: usize,
    pub start: usize,
    pub matrix: CMatrix,
    pub blocks: Vec<BlockSource>,
}

fn three_user_antennas(ch: &ChannelSet) -> Result<(usize, usize)> {
    if ch.k() != 3 {
        return Err(Error::InvalidSpec(format!("three-user construction given K = {}", ch.k())));
    }
    if !ch.spec().equal_antennas() {
        return Err(Error::AsymmetricSpec);
    }
    let u = ch.spec().user(0);
    Ok((u.m, u.n))
}

/// Assemble `A_r` starting at user `start`. `r = 0` gives the empty `0 x M`
/// matrix, whose kernel is all of `C^M`.
pub fn build_alignment_matrix(ch: &ChannelSet, start: usize, r: usize) -> Result<AlignmentMatrix> {
    let (m, n) = three_user_antennas(ch)?;
    let mut matrix = CMatrix::zeros(r * n, (r + 1) * m);
    let mut blocks = Vec::with_capacity(2 * r);
    for j in 0..r {
        let rx = cyc(start + j);
        for (col_block, tx) in [(j, cyc(start + j + 1)), (j + 1, cyc(start + j + 2))] {
            matrix.view_mut((j * n, col_block * m), (n, m)).copy_from(ch.cross(rx, tx));
            blocks.push(BlockSource { row_block: j, col_block, receiver: rx, transmitter: tx });
        }
    }
    Ok(AlignmentMatrix { r, start: cyc(start), matrix, blocks })
}

/// Whether `A_r` attains rank `min(rN, (r+1)M)`.
pub fn rank_check_ar(ch: &ChannelSet, start: usize, r: usize) -> Result<bool> {
    let (m, n) = three_user_antennas(ch)?;
    let a = build_alignment_matrix(ch, start, r)?;
    Ok(linalg::rank(&a.matrix) == (r * n).min((r + 1) * m))
}

fn require_streams(ch: &ChannelSet, d: usize) -> Result<()> {
    if ch.spec().users().iter().any(|u| u.d != d) {
        return Err(Error::ShapeMismatch(format!("every user must carry d = {d} streams")));
    }
    Ok(())
}

fn invert(ch: &ChannelSet, i: usize, j: usize) -> Result<CMatrix> {
    linalg::inverse(ch.cross(i, j)).ok_or(Error::SingularChannel(i + 1, j + 1))
}

fn pad_rows(a: &CMatrix, rows: usize) -> CMatrix {
    let mut out = CMatrix::zeros(rows, a.ncols());
    out.view_mut((0, 0), a.shape()).copy_from(a);
    out
}

/// Eigen-data shared by every selection on the same channels.
struct SquareProblem {
    channels: ChannelSet,
    full_m: usize,
    full_n: usize,
    d: usize,
    vectors: CMatrix,
    inv12: CMatrix,
    inv13: CMatrix,
    inv21: CMatrix,
}

impl SquareProblem {
    fn new(ch: &ChannelSet, d: usize) -> Result<Self> {
        let (m, n) = three_user_antennas(ch)?;
        require_streams(ch, d)?;
        if m != n || m < 2 * d {
            return Err(Error::InvalidSpec(format!("eigenvector method needs M = N >= 2d, got M = {m}, N = {n}, d = {d}")));
        }
        let channels = if m > 2 * d { ch.restricted(2 * d, 2 * d)? } else { ch.clone() };
        let h = |i, j| channels.cross(i, j);
        let inv = |i, j| invert(&channels, i, j);
        let (inv12, inv13, inv21, inv32) = (inv(0, 1)?, inv(0, 2)?, inv(1, 0)?, inv(2, 1)?);
        // Every channel must be invertible, including the two that B does
        // not invert.
        inv(1, 2)?;
        inv(2, 0)?;
        let b = h(0, 1) * inv32 * h(2, 0) * &inv21 * h(1, 2) * &inv13;
        let eig = linalg::eig(&b)?;
        let mut order: Vec<usize> = (0..2 * d).collect();
        order.sort_by(|&x, &y| {
            let (a, b) = (eig.values[x], eig.values[y]);
            a.norm().total_cmp(&b.norm()).then(a.arg().total_cmp(&b.arg()))
        });
        let vectors = CMatrix::from_fn(2 * d, 2 * d, |i, k| eig.vectors[(i, order[k])]);
        if linalg::rank(&vectors) < 2 * d {
            return Err(Error::DefectiveB);
        }
        Ok(Self { channels, full_m: m, full_n: n, d, vectors, inv12, inv13, inv21 })
    }

    fn strategy(&self, selection: &[usize]) -> Result<Strategy> {
        let d = self.d;
        let mut sorted = selection.to_vec();
        sorted.sort_unstable();
        sorted.dedup();
        if sorted.len() != d || sorted.iter().any(|&s| s >= 2 * d) {
            return Err(Error::InvalidSpec(format!("selection {selection:?} is not a {d}-subset of 0..{}", 2 * d)));
        }
        let h = |i, j| self.channels.cross(i, j);
        let w = CMatrix::from_columns(&sorted.iter().map(|&k| self.vectors.column(k).into_owned()).collect::<Vec<_>>());
        let u3 = &self.inv13 * &w;
        let u2 = &self.inv12 * &w;
        let aligned2 = h(1, 2) * &u3;
        let u1 = &self.inv21 * &aligned2;
        let v1 = least_left_singular(&w, d);
        let v2 = least_left_singular(&aligned2, d);
        let v3 = least_left_singular(&(h(2, 0) * &u1), d);
        let u = [u1, u2, u3]
            .iter()
            .map(|x| orthonormal_basis(x).map(|q| pad_rows(&q, self.full_m)))
            .collect::<Result<Vec<_>>>()?;
        let v = [v1, v2, v3].iter().map(|x| pad_rows(x, self.full_n)).collect();
        Ok(Strategy::new(u, v))
    }
}

/// Strategy from the `d` eigenvectors of `B = H12 H32^-1 H31 H21^-1 H23 H13^-1`
/// picked by `selection` (0-based, eigenvalues ordered by modulus then
/// argument). The span `W` of those eigenvectors is aligned at receiver 1
/// (`H12 U2 = H13 U3 = W`), and `B W = W` closes the cycle at receiver 3.
/// When `M = N > 2d` the leading `2d` coordinates are used and the bases are
/// zero-padded.
pub fn solve_square(ch: &ChannelSet, d: usize, selection: &[usize]) -> Result<Strategy> {
    SquareProblem::new(ch, d)?.strategy(selection)
}

fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    fn rec(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            if n - i < k - cur.len() {
                break;
            }
            cur.push(i);
            rec(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(0, n, k, &mut Vec::with_capacity(k), &mut out);
    out
}

/// Strategies for every `d`-subset of eigenvectors (or the first `limit`),
/// keeping only pairwise-distinct ones.
pub fn enumerate_square_solutions(ch: &ChannelSet, d: usize, limit: Option<usize>) -> Result<Vec<Strategy>> {
    let problem = SquareProblem::new(ch, d)?;
    let mut out: Vec<Strategy> = Vec::new();
    for sel in combinations(2 * d, d).into_iter().take(limit.unwrap_or(usize::MAX)) {
        let s = problem.strategy(&sel)?;
        let mut fresh = true;
        for prev in &out {
            if s.distance(prev)? <= DISTINCT_ANGLE {
                fresh = false;
                break;
            }
        }
        if fresh {
            out.push(s);
        }
    }
    Ok(out)
}

/// Path length parameter for `M < N`: the unique `r` with `rN < (r+1)M` and
/// `(r+1)N >= (r+2)M`.
pub fn path_parameter(m: usize, n: usize) -> usize {
    assert!(m < n, "path parameter needs M < N");
    let mut r = 0;
    while (r + 1) * n < (r + 2) * m {
        r += 1;
    }
    r
}

/// Which regime of the path construction applies, with its derived sizes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct PathPlan {
    pub r: usize,
    /// `dim ker A_r = (r+1)M - rN`.
    pub kernel_dim: usize,
    /// True when every stream fits on length-`(r+1)` paths.
    pub long_paths_only: bool,
}

pub fn path_plan(m: usize, n: usize, d: usize) -> PathPlan {
    let r = path_parameter(m, n);
    let kernel_dim = (r + 1) * m - r * n;
    PathPlan { r, kernel_dim, long_paths_only: d <= (r + 1) * kernel_dim }
}

/// `count` orthonormal vectors inside span(`space`) (orthonormal columns) and
/// orthogonal to span(`avoid`) (orthonormal columns), drawn at random.
fn random_inside_avoiding(space: &CMatrix, avoid: &CMatrix, count: usize, rng: &mut ChaCha8Rng) -> Result<CMatrix> {
    if count == 0 {
        return Ok(CMatrix::zeros(space.nrows(), 0));
    }
    let mut cand = space * random_gaussian(space.ncols(), count, rng);
    if avoid.ncols() > 0 {
        cand -= avoid * (avoid.adjoint() * &cand);
    }
    orthonormal_basis(&cand).map_err(|_| {
        Error::DegenerateKernel(format!("no room for {count} new directions outside a {}-dimensional subspace", avoid.ncols()))
    })
}

/// Path vectors (columns of `paths`) with `used` leading blocks, spread over
/// the transmitters they visit.
fn scatter(paths: &CMatrix, start: usize, used: usize, m: usize, contributions: &mut [Vec<CMatrix>; 3]) {
    if paths.ncols() == 0 {
        return;
    }
    for offset in 1..=used {
        let block = paths.rows((offset - 1) * m, m).into_owned();
        contributions[cyc(start + offset)].push(block);
    }
}

fn hcat(parts: &[CMatrix], rows: usize) -> CMatrix {
    let cols: Vec<_> = parts.iter().flat_map(|p| p.column_iter().map(|c| c.into_owned())).collect();
    if cols.is_empty() {
        CMatrix::zeros(rows, 0)
    } else {
        CMatrix::from_columns(&cols)
    }
}

/// Alignment-path construction without the feasibility precheck. Used
/// directly to probe what the construction does on infeasible parameters.
pub fn try_paths_construction(ch: &ChannelSet, m: usize, n: usize, d: usize, seed: u64) -> Result<Strategy> {
    let (cm, cn) = three_user_antennas(ch)?;
    if (cm, cn) != (m, n) {
        return Err(Error::ShapeMismatch(format!("channels have M = {cm}, N = {cn}; asked for M = {m}, N = {n}")));
    }
    require_streams(ch, d)?;
    if m >= n {
        return Err(Error::InvalidSpec(format!("path construction needs M < N, got M = {m}, N = {n}")));
    }
    let plan = path_plan(m, n, d);
    let r = plan.r;
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ PATH_SEED_SALT);
    let mut contributions: [Vec<CMatrix>; 3] = Default::default();

    for start in 0..3 {
        let ker = kernel_basis(&build_alignment_matrix(ch, start, r)?.matrix);
        if plan.long_paths_only {
            let per_path = d / (r + 1);
            let remainder = d - (r + 1) * per_path;
            let needed = per_path + usize::from(remainder > 0);
            if ker.ncols() < needed {
                return Err(Error::DegenerateKernel(format!(
                    "ker A_{r} at user {} has dimension {}, need {needed}",
                    start + 1,
                    ker.ncols()
                )));
            }
            let w = ker.columns(0, per_path).into_owned();
            let rest = ker.columns(per_path, ker.ncols() - per_path).into_owned();
            let extra = random_inside_avoiding(&rest, &CMatrix::zeros(rest.nrows(), 0), usize::from(remainder > 0), &mut rng)?;
            scatter(&w, start, r + 1, m, &mut contributions);
            scatter(&extra, start, remainder, m, &mut contributions);
        } else {
            // Every long path is used; the rest of the streams ride on paths
            // one step shorter, drawn from ker A_{r-1} away from the
            // truncated long paths.
            if r == 0 {
                return Err(Error::DegenerateKernel(format!("{d} streams exceed the {} direct paths", plan.kernel_dim)));
            }
            let leftover = d - (r + 1) * plan.kernel_dim;
            let per_short = leftover / r;
            let remainder = leftover - r * per_short;
            let shorter = kernel_basis(&build_alignment_matrix(ch, start, r - 1)?.matrix);
            let truncated = ker.rows(0, r * m).into_owned();
            let truncated = if truncated.ncols() == 0 { truncated } else { linalg::range_basis(&truncated) };
            let x = random_inside_avoiding(&shorter, &truncated, per_short, &mut rng)?;
            let avoid = hcat(&[truncated.clone(), x.clone()], r * m);
            let extra = random_inside_avoiding(&shorter, &avoid, usize::from(remainder > 0), &mut rng)?;
            scatter(&ker, start, r + 1, m, &mut contributions);
            scatter(&x, start, r, m, &mut contributions);
            scatter(&extra, start, remainder, m, &mut contributions);
        }
    }

    let mut u = Vec::with_capacity(3);
    for (j, parts) in contributions.iter().enumerate() {
        let raw = hcat(parts, m);
        if raw.ncols() != d {
            return Err(Error::DegenerateKernel(format!("U_{} collected {} directions, need {d}", j + 1, raw.ncols())));
        }
        u.push(orthonormal_basis(&raw).map_err(|_| {
            Error::DegenerateKernel(format!("path components at transmitter {} are dependent", j + 1))
        })?);
    }
    let mut v = Vec::with_capacity(3);
    for j in 0..3 {
        let (a, b) = (cyc(j + 1), cyc(j + 2));
        let interference = hcat(&[ch.cross(j, a) * &u[a], ch.cross(j, b) * &u[b]], n);
        let occupied = linalg::rank(&interference);
        if occupied + d > n {
            return Err(Error::DegenerateKernel(format!(
                "interference at receiver {} spans {occupied} of {n} dimensions, leaving fewer than {d}",
                j + 1
            )));
        }
        v.push(least_left_singular(&interference, d));
    }
    Ok(Strategy::new(u, v))
}

/// Alignment-path strategy for three users with `M < N`, seeded from the
/// channel set's seed.
pub fn solve_paths(ch: &ChannelSet, m: usize, n: usize, d: usize) -> Result<Strategy> {
    solve_paths_seeded(ch, m, n, d, ch.seed().unwrap_or(0))
}

/// As [`solve_paths`], with an explicit seed for the random choices inside
/// kernels.
pub fn solve_paths_seeded(ch: &ChannelSet, m: usize, n: usize, d: usize, seed: u64) -> Result<Strategy> {
    if m >= n {
        return Err(Error::InvalidSpec(format!("path construction needs M < N, got M = {m}, N = {n}")));
    }
    let verdict = decide_3user_symmetric(m, n, d);
    if !verdict.is_feasible() {
        return Err(Error::InfeasibleInput(format!("(M, N, d) = ({m}, {n}, {d}) violates {:?}", verdict.certificates)));
    }
    try_paths_construction(ch, m, n, d, seed)
}

/// Constructive solver for any feasible symmetric three-user instance:
/// eigenvectors when `M = N`, alignment paths when `M < N`, and alignment
/// paths on the reciprocal network when `M > N`.
pub fn solve_three_user(ch: &ChannelSet) -> Result<Strategy> {
    let (m, n) = three_user_antennas(ch)?;
    let d = ch.spec().user(0).d;
    require_streams(ch, d)?;
    let verdict = decide_3user_symmetric(m, n, d);
    if !verdict.is_feasible() {
        return Err(Error::InfeasibleInput(format!("(M, N, d) = ({m}, {n}, {d}) violates {:?}", verdict.certificates)));
    }
    if m == n {
        let selection: Vec<usize> = (0..d).collect();
        solve_square(ch, d, &selection)
    } else if m < n {
        solve_paths(ch, m, n, d)
    } else {
        let s = solve_paths(&ch.reciprocal(), n, m, d)?;
        Ok(Strategy::new(s.v, s.u))
    }
}

/// Scale-invariance helper for tests and callers: the same strategy up to
/// basis changes.
pub fn same_subspaces(a: &Strategy, b: &Strategy) -> Result<bool> {
    Ok(a.distance(b)? <= DISTINCT_ANGLE)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::generate_channels;
    use crate::spec::ProblemSpec;
    use crate::linalg::c;
    use crate::verify::{check_orthogonality, interference_overlap, DEFAULT_TOL};

    fn channels(m: usize, n: usize, d: usize, seed: u64) -> ChannelSet {
        generate_channels(&ProblemSpec::symmetric(3, m, n, d).unwrap(), seed)
    }

    fn assert_verified(ch: &ChannelSet, s: &Strategy) {
        let report = check_orthogonality(ch, s, DEFAULT_TOL).unwrap();
        assert!(report.passed, "{report:?}");
    }

    #[test]
    fn alignment_matrix_layout() {
        let ch = channels(2, 3, 1, 1);
        let a1 = build_alignment_matrix(&ch, 0, 1).unwrap();
        assert_eq!(a1.matrix.shape(), (3, 4));
        assert_eq!(a1.matrix.view((0, 0), (3, 2)).into_owned(), *ch.cross(0, 1));
        assert_eq!(a1.matrix.view((0, 2), (3, 2)).into_owned(), *ch.cross(0, 2));

        let a2 = build_alignment_matrix(&ch, 0, 2).unwrap();
        assert_eq!(a2.matrix.shape(), (6, 6));
        assert_eq!(a2.matrix.view((3, 2), (3, 2)).into_owned(), *ch.cross(1, 2));
        assert_eq!(a2.matrix.view((3, 4), (3, 2)).into_owned(), *ch.cross(1, 0));
        assert!(a2.matrix.view((0, 4), (3, 2)).iter().all(|z| z.norm() == 0.0));
        assert!(a2.matrix.view((3, 0), (3, 2)).iter().all(|z| z.norm() == 0.0));
        assert_eq!(a2.blocks[3], BlockSource { row_block: 1, col_block: 2, receiver: 1, transmitter: 0 });

        let zero = ch.scaled(c(0.0, 0.0));
        let az = build_alignment_matrix(&zero, 1, 3).unwrap();
        assert_eq!(az.matrix.shape(), (9, 8));
        assert!(az.matrix.iter().all(|z| z.norm() == 0.0));
        assert!(!rank_check_ar(&zero, 1, 3).unwrap());
    }

    #[test]
    fn alignment_matrix_rejects_unequal_antennas() {
        use crate::spec::UserDims;
        let spec = ProblemSpec::new(vec![UserDims::new(2, 3, 1), UserDims::new(2, 4, 1), UserDims::new(2, 3, 1)]).unwrap();
        let ch = generate_channels(&spec, 0);
        assert!(matches!(build_alignment_matrix(&ch, 0, 1), Err(Error::AsymmetricSpec)));
    }

    #[test]
    fn rank_check_examples() {
        assert!(rank_check_ar(&channels(3, 5, 2, 3), 0, 2).unwrap());

        // Specialization B = (I; 0) on the first diagonal, C = (0; I) on the second.
        let (m, n) = (2, 3);
        let mut b = CMatrix::zeros(n, m);
        let mut cc = CMatrix::zeros(n, m);
        for i in 0..m {
            b[(i, i)] = c(1.0, 0.0);
            cc[(n - m + i, i)] = c(1.0, 0.0);
        }
        let spec = ProblemSpec::symmetric(3, m, n, 1).unwrap();
        let mut cross = vec![vec![CMatrix::zeros(0, 0); 3]; 3];
        for i in 0..3 {
            cross[i][cyc(i + 1)] = b.clone();
            cross[i][cyc(i + 2)] = cc.clone();
        }
        let special = ChannelSet::new(spec, cross, None, None).unwrap();
        assert!(rank_check_ar(&special, 0, 2).unwrap());
    }

    #[test]
    fn square_small_cases() {
        let ch = channels(2, 2, 1, 7);
        let all = enumerate_square_solutions(&ch, 1, None).unwrap();
        assert_eq!(all.len(), 2);
        for s in &all {
            assert_verified(&ch, s);
        }
        let ch = channels(4, 4, 2, 8);
        let all = enumerate_square_solutions(&ch, 2, None).unwrap();
        assert_eq!(all.len(), 6);
        for s in &all {
            assert_verified(&ch, s);
        }
        assert_eq!(enumerate_square_solutions(&ch, 2, Some(4)).unwrap().len(), 4);
    }

    #[test]
    fn square_is_scale_invariant() {
        let ch = channels(4, 4, 2, 9);
        let a = solve_square(&ch, 2, &[0, 3]).unwrap();
        let b = solve_square(&ch.scaled(c(2.5, -0.5)), 2, &[0, 3]).unwrap();
        assert!(same_subspaces(&a, &b).unwrap());
    }

    #[test]
    fn square_restricts_larger_arrays() {
        let ch = channels(5, 5, 2, 10);
        let s = solve_square(&ch, 2, &[1, 2]).unwrap();
        assert_eq!(s.u[0].shape(), (5, 2));
        assert_verified(&ch, &s);
    }

    #[test]
    fn square_rejects_bad_input() {
        let ch = channels(4, 4, 2, 11);
        assert!(solve_square(&ch, 2, &[0]).is_err());
        assert!(solve_square(&ch, 2, &[0, 4]).is_err());
        assert!(solve_square(&channels(3, 3, 2, 1), 2, &[0, 1]).is_err());
        let singular = ch.clone().with_cross(0, 2, CMatrix::zeros(4, 4)).unwrap();
        assert!(matches!(solve_square(&singular, 2, &[0, 1]), Err(Error::SingularChannel(1, 3))));
    }

    #[test]
    fn square_eigen_alignment_overlap() {
        let ch = channels(4, 4, 2, 12);
        let s = solve_square(&ch, 2, &[0, 1]).unwrap();
        assert_eq!(interference_overlap(&ch, &s, 0), 2);
    }

    #[test]
    fn path_parameters() {
        assert_eq!(path_parameter(3, 5), 1);
        assert_eq!(path_parameter(2, 3), 1);
        assert_eq!(path_parameter(5, 7), 2);
        assert_eq!(path_parameter(2, 5), 0);
        let plan = path_plan(3, 5, 2);
        assert_eq!((plan.r, plan.kernel_dim, plan.long_paths_only), (1, 1, true));
    }

    #[test]
    fn paths_examples() {
        for (m, n, d) in [(3, 5, 2), (2, 3, 1), (5, 7, 3)] {
            let ch = channels(m, n, d, 21);
            let s = solve_paths(&ch, m, n, d).unwrap();
            assert_verified(&ch, &s);
        }
        let ch = channels(5, 7, 3, 22);
        let s = solve_paths(&ch, 5, 7, 3).unwrap();
        assert!((0..3).any(|i| interference_overlap(&ch, &s, i) >= 1));
    }

    #[test]
    fn paths_reject_infeasible() {
        let ch = channels(4, 8, 3, 1);
        assert!(matches!(solve_paths(&ch, 4, 8, 3), Err(Error::InfeasibleInput(_))));
        let ch = channels(4, 4, 2, 1);
        assert!(solve_paths(&ch, 4, 4, 2).is_err());
    }

    #[test]
    fn second_regime_uses_shorter_paths() {
        // ker A_r is one-dimensional, so only r + 1 streams ride on long
        // paths and the rest need shorter ones.
        for (m, n, d) in [(5, 9, 3), (6, 11, 4), (7, 10, 4), (8, 14, 5)] {
            assert!(!path_plan(m, n, d).long_paths_only);
            assert!(decide_3user_symmetric(m, n, d).is_feasible());
            let ch = channels(m, n, d, 5);
            assert_verified(&ch, &solve_paths(&ch, m, n, d).unwrap());
        }
    }

    #[test]
    fn reciprocal_dispatch() {
        let ch = channels(5, 3, 2, 30);
        assert_verified(&ch, &solve_three_user(&ch).unwrap());
    }
}
