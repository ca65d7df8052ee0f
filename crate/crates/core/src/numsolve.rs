//! Numerical alignment for any number of users.
//!
//! Each subspace is written in affine coordinates `[I; X]`. Receive subspaces
//! are stored conjugated, `conj(V_i) = [I; Y_i]`, so every condition
//! `V_i^dagger H_ij U_j = 0` becomes the holomorphic bilinear equation
//! `[I; Y_i]^T H_ij [I; X_j] = 0`. Damped Gauss-Newton from random starts
//! solves the stacked system.

use nalgebra::DVector;
use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::channel::ChannelSet;
use crate::error::{Error, Result};
use crate::linalg::{self, random_gaussian, CMatrix};
use crate::spec::ProblemSpec;
use crate::strategy::Strategy;

/// Entrywise threshold, relative to `1 + |a|`, under which two canonical
/// coordinate vectors are the same solution.
pub const DEDUP_TOL: f64 = 1e-6;

/// Free blocks below the identity: `x[j]` is `(M_j - d_j) x d_j` for `U_j`
/// and `y[i]` is `(N_i - d_i) x d_i` for `conj(V_i)`.
#[derive(Debug, Clone, PartialEq)]
pub struct AffineStrategyCoords {
    pub x: Vec<CMatrix>,
    pub y: Vec<CMatrix>,
}

impl AffineStrategyCoords {
    pub fn zeros(spec: &ProblemSpec) -> Self {
        let x = spec.users().iter().map(|u| CMatrix::zeros(u.m.saturating_sub(u.d), u.d)).collect();
        let y = spec.users().iter().map(|u| CMatrix::zeros(u.n.saturating_sub(u.d), u.d)).collect();
        Self { x, y }
    }

    pub fn random<R: rand::Rng + ?Sized>(spec: &ProblemSpec, rng: &mut R) -> Self {
        let mut out = Self::zeros(spec);
        for b in out.x.iter_mut().chain(out.y.iter_mut()) {
            *b = random_gaussian(b.nrows(), b.ncols(), rng);
        }
        out
    }

    pub fn len(&self) -> usize {
        self.x.iter().chain(&self.y).map(|b| b.len()).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// All coordinates, `X_1..X_K` then `Y_1..Y_K`, each column-major.
    pub fn to_vector(&self) -> DVector<Complex64> {
        DVector::from_iterator(self.len(), self.x.iter().chain(&self.y).flat_map(|b| b.iter().copied()))
    }

    pub fn set_from_vector(&mut self, v: &DVector<Complex64>) {
        let mut it = v.iter().copied();
        for b in self.x.iter_mut().chain(self.y.iter_mut()) {
            for z in b.iter_mut() {
                *z = it.next().expect("coordinate vector too short");
            }
        }
    }

    fn check(&self, spec: &ProblemSpec) -> Result<()> {
        let expect = Self::zeros(spec);
        let ok = self.x.len() == spec.k()
            && self.y.len() == spec.k()
            && self.x.iter().chain(&self.y).zip(expect.x.iter().chain(&expect.y)).all(|(a, b)| a.shape() == b.shape());
        if ok { Ok(()) } else { Err(Error::ShapeMismatch("affine coordinates do not match the problem".into())) }
    }

    /// Orthonormal strategy spanning `[I; X_j]` and `conj([I; Y_i])`.
    pub fn to_strategy(&self) -> Result<Strategy> {
        let extend = |b: &CMatrix| {
            let d = b.ncols();
            let mut full = CMatrix::zeros(d + b.nrows(), d);
            full.view_mut((0, 0), (d, d)).fill_with_identity();
            full.view_mut((d, 0), b.shape()).copy_from(b);
            full
        };
        let u = self.x.iter().map(|x| linalg::orthonormal_basis(&extend(x))).collect::<Result<Vec<_>>>()?;
        let v = self.y.iter().map(|y| linalg::orthonormal_basis(&extend(y).conjugate())).collect::<Result<Vec<_>>>()?;
        Ok(Strategy::new(u, v))
    }
}

fn affine_block(basis: &CMatrix, what: &str) -> Result<CMatrix> {
    let d = basis.ncols();
    let lead = basis.rows(0, d).into_owned();
    let sv = linalg::singular_values(&lead);
    let top = linalg::singular_values(basis).first().copied().unwrap_or(0.0);
    if d > 0 && (sv.last().copied().unwrap_or(0.0) <= linalg::RANK_TOL * top || top == 0.0) {
        return Err(Error::PivotSingular(what.to_string()));
    }
    let inv = linalg::inverse(&lead).ok_or_else(|| Error::PivotSingular(what.to_string()))?;
    Ok(basis.rows(d, basis.nrows() - d) * inv)
}

/// Canonical affine coordinates of a strategy: each basis right-multiplied by
/// the inverse of its leading `d x d` block.
pub fn to_affine(strategy: &Strategy) -> Result<AffineStrategyCoords> {
    let x = strategy.u.iter().enumerate().map(|(j, u)| affine_block(u, &format!("U_{}", j + 1))).collect::<Result<Vec<_>>>()?;
    let y = strategy
        .v
        .iter()
        .enumerate()
        .map(|(i, v)| affine_block(&v.conjugate(), &format!("V_{}", i + 1)))
        .collect::<Result<Vec<_>>>()?;
    Ok(AffineStrategyCoords { x, y })
}

/// Apply seeded random unitary changes of coordinates `P_i` at receivers and
/// `Q_j` at transmitters: `H'_ij = P_i^dagger H_ij Q_j`, `U'_j = Q_j^dagger U_j`,
/// `V'_i = P_i^dagger V_i`. Alignment is preserved, and the new leading blocks
/// are generically invertible.
pub fn change_basis(ch: &ChannelSet, strategy: &Strategy, seed: u64) -> Result<(ChannelSet, Strategy)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let unitary = |n: usize, rng: &mut ChaCha8Rng| random_gaussian(n, n, rng).qr().q();
    let users = ch.spec().users().to_vec();
    let q: Vec<CMatrix> = users.iter().map(|u| unitary(u.m, &mut rng)).collect();
    let p: Vec<CMatrix> = users.iter().map(|u| unitary(u.n, &mut rng)).collect();
    let mut out = ch.clone();
    for (i, j, h) in ch.cross_iter() {
        out = out.with_cross(i, j, p[i].adjoint() * h * &q[j])?;
    }
    if ch.has_direct() {
        let direct = (0..ch.k()).map(|i| p[i].adjoint() * ch.direct(i).unwrap() * &q[i]).collect();
        out = out.with_direct(direct)?;
    }
    let u = strategy.u.iter().zip(&q).map(|(u, q)| q.adjoint() * u).collect();
    let v = strategy.v.iter().zip(&p).map(|(v, p)| p.adjoint() * v).collect();
    Ok((out, Strategy::new(u, v)))
}

/// [`to_affine`], falling back once to a random unitary change of
/// coordinates when a leading block is singular. Returns the channels the
/// coordinates refer to.
pub fn to_affine_with_retry(ch: &ChannelSet, strategy: &Strategy, seed: u64) -> Result<(ChannelSet, AffineStrategyCoords)> {
    match to_affine(strategy) {
        Ok(a) => Ok((ch.clone(), a)),
        Err(Error::PivotSingular(_)) => {
            let (ch2, s2) = change_basis(ch, strategy, seed)?;
            Ok((ch2, to_affine(&s2)?))
        }
        Err(e) => Err(e),
    }
}

/// Channel blocks split at the identity boundary:
/// `H_ij = [[A, B], [C, D]]` with `A` of size `d_i x d_j`.
struct Blocks {
    i: usize,
    j: usize,
    a: CMatrix,
    b: CMatrix,
    c: CMatrix,
    d: CMatrix,
    row: usize,
}

/// Precomputed layout of the square system.
pub struct AlignmentSystem {
    spec: ProblemSpec,
    blocks: Vec<Blocks>,
    x_offset: Vec<usize>,
    y_offset: Vec<usize>,
    vars: usize,
    equations: usize,
    scale: f64,
}

impl AlignmentSystem {
    pub fn new(ch: &ChannelSet) -> Result<Self> {
        let spec = ch.spec().clone();
        if let Some(u) = spec.users().iter().find(|u| u.d > u.m || u.d > u.n) {
            return Err(Error::InvalidSpec(format!("user with d = {} exceeds M = {} or N = {}", u.d, u.m, u.n)));
        }
        let users = spec.users();
        let mut x_offset = Vec::new();
        let mut at = 0;
        for u in users {
            x_offset.push(at);
            at += (u.m - u.d) * u.d;
        }
        let mut y_offset = Vec::new();
        for u in users {
            y_offset.push(at);
            at += (u.n - u.d) * u.d;
        }
        let vars = at;
        let mut blocks = Vec::new();
        let mut row = 0;
        for (i, j, h) in ch.cross_iter() {
            let (di, dj) = (users[i].d, users[j].d);
            let (ni, mj) = (users[i].n, users[j].m);
            blocks.push(Blocks {
                i,
                j,
                a: h.view((0, 0), (di, dj)).into_owned(),
                b: h.view((0, dj), (di, mj - dj)).into_owned(),
                c: h.view((di, 0), (ni - di, dj)).into_owned(),
                d: h.view((di, dj), (ni - di, mj - dj)).into_owned(),
                row,
            });
            row += di * dj;
        }
        Ok(Self { spec, blocks, x_offset, y_offset, vars, equations: row, scale: ch.max_cross_magnitude() })
    }

    pub fn variables(&self) -> usize {
        self.vars
    }

    pub fn equations(&self) -> usize {
        self.equations
    }


    /// Residual, and the Jacobian when asked. Row `(p, q)` of block `(i, j)`
    /// sits at `row + p d_j + q`.
    fn evaluate(&self, x: &AffineStrategyCoords, with_jacobian: bool) -> (DVector<Complex64>, Option<CMatrix>) {
        let mut r = DVector::zeros(self.equations);
        let mut jac = with_jacobian.then(|| CMatrix::zeros(self.equations, self.vars));
        for blk in &self.blocks {
            let (xj, yi) = (&x.x[blk.j], &x.y[blk.i]);
            let (di, dj) = (blk.a.nrows(), blk.a.ncols());
            let yt = yi.transpose();
            // G = B + Y^T D multiplies X; E = C + D X is multiplied by Y^T.
            let g = &blk.b + &yt * &blk.d;
            let e = &blk.c + &blk.d * xj;
            let res = &blk.a + &blk.b * xj + &yt * &e;
            for p in 0..di {
                for q in 0..dj {
                    r[blk.row + p * dj + q] = res[(p, q)];
                }
            }
            if let Some(jac) = jac.as_mut() {
                let mj_free = xj.nrows();
                for q in 0..dj {
                    for a in 0..mj_free {
                        let col = self.x_offset[blk.j] + a + q * mj_free;
                        for p in 0..di {
                            jac[(blk.row + p * dj + q, col)] = g[(p, a)];
                        }
                    }
                }
                let ni_free = yi.nrows();
                for p in 0..di {
                    for a in 0..ni_free {
                        let col = self.y_offset[blk.i] + a + p * ni_free;
                        for q in 0..dj {
                            jac[(blk.row + p * dj + q, col)] = e[(a, q)];
                        }
                    }
                }
            }
        }
        (r, jac)
    }
}

/// Stacked entries of `[I; Y_i]^T H_ij [I; X_j]` over all `i != j`.
pub fn residual(ch: &ChannelSet, x: &AffineStrategyCoords) -> Result<DVector<Complex64>> {
    let sys = AlignmentSystem::new(ch)?;
    x.check(ch.spec())?;
    Ok(sys.evaluate(x, false).0)
}

/// Complex Jacobian of [`residual`] with respect to [`AffineStrategyCoords::to_vector`].
pub fn jacobian(ch: &ChannelSet, x: &AffineStrategyCoords) -> Result<CMatrix> {
    let sys = AlignmentSystem::new(ch)?;
    x.check(ch.spec())?;
    Ok(sys.evaluate(x, true).1.expect("jacobian requested"))
}

fn inf_norm(v: &DVector<Complex64>) -> f64 {
    v.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct NewtonOptions {
    pub restarts: usize,
    pub max_iters: usize,
    pub lambda0: f64,
    pub lambda_factor: f64,
    pub seed: u64,
}

impl Default for NewtonOptions {
    fn default() -> Self {
        Self { restarts: 100, max_iters: 200, lambda0: 1e-3, lambda_factor: 10.0, seed: 0 }
    }
}

impl NewtonOptions {
    pub fn with_seed(seed: u64) -> Self {
        Self { seed, ..Self::default() }
    }
}

/// Result of one damped Gauss-Newton run.
#[derive(Debug, Clone)]
pub struct Attempt {
    pub index: usize,
    pub coords: AffineStrategyCoords,
    pub residual: f64,
    pub iterations: usize,
    pub converged: bool,
}

/// Successful solve with telemetry.
#[derive(Debug, Clone)]
pub struct NewtonSolution {
    pub strategy: Strategy,
    pub coords: AffineStrategyCoords,
    pub residual: f64,
    pub iterations: usize,
    /// Starts used, including the successful one.
    pub attempts: usize,
}

fn start_rng(seed: u64, index: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index as u64);
    rng
}

fn solve_damped(m: &CMatrix, rhs: &DVector<Complex64>, lambda: f64) -> Option<DVector<Complex64>> {
    let mut a = m.clone();
    for k in 0..a.nrows() {
        a[(k, k)] += lambda;
    }
    a.cholesky().map(|ch| ch.solve(rhs))
}

impl AlignmentSystem {
    /// Levenberg-Marquardt from one random start.
    pub fn run_attempt(&self, opts: &NewtonOptions, index: usize) -> Attempt {
        let mut rng = start_rng(opts.seed, index);
        let mut coords = AffineStrategyCoords::random(&self.spec, &mut rng);
        let tol = 1e-10 * (1.0 + self.scale);
        let mut x = coords.to_vector();
        let (mut r, mut jac) = self.evaluate(&coords, true);
        let mut cost = r.norm_squared();
        let mut lambda = opts.lambda0;
        let mut stalled = 0;
        let mut iterations = 0;
        let wide = self.equations < self.vars;
        while iterations < opts.max_iters {
            if inf_norm(&r) <= tol {
                break;
            }
            iterations += 1;
            let j = jac.take().expect("jacobian");
            let jh = j.adjoint();
            // The smaller of J^H J and J J^H gives the same damped step.
            let (normal, rhs) = if wide { (&j * &jh, r.clone()) } else { (&jh * &j, &jh * &r) };
            let mut accepted = None;
            while lambda < 1e12 {
                if let Some(sol) = solve_damped(&normal, &rhs, lambda) {
                    let step = if wide { -(&jh * sol) } else { -sol };
                    let trial = &x + &step;
                    let mut tc = coords.clone();
                    tc.set_from_vector(&trial);
                    let (tr, _) = self.evaluate(&tc, false);
                    let tcost = tr.norm_squared();
                    if tcost.is_finite() && tcost < cost {
                        accepted = Some((trial, tc, tr, tcost));
                        break;
                    }
                }
                lambda *= opts.lambda_factor;
            }
            let Some((nx, nc, nr, ncost)) = accepted else { break };
            stalled = if cost - ncost < 1e-6 * cost { stalled + 1 } else { 0 };
            x = nx;
            coords = nc;
            r = nr;
            cost = ncost;
            lambda = (lambda / opts.lambda_factor).max(1e-15);
            if stalled >= 10 || inf_norm(&x) > 1e8 {
                break;
            }
            jac = self.evaluate(&coords, true).1;
        }
        let residual = inf_norm(&r);
        Attempt { index, coords, residual, iterations, converged: residual <= tol }
    }
}

fn trivially_unsolvable(spec: &ProblemSpec) -> bool {
    spec.users().iter().any(|u| u.d > u.m || u.d > u.n)
}

/// Multi-start damped Gauss-Newton. Starts are drawn from independent
/// streams of `opts.seed`; the lowest-indexed converged start wins, so the
/// result does not depend on thread scheduling.
pub fn solve_newton(ch: &ChannelSet, opts: &NewtonOptions) -> Result<NewtonSolution> {
    if trivially_unsolvable(ch.spec()) {
        return Err(Error::NoConvergence { restarts: 0, best_residual: f64::INFINITY });
    }
    let sys = AlignmentSystem::new(ch)?;
    let batch = rayon::current_num_threads().max(1);
    let mut best = f64::INFINITY;
    let mut next = 0;
    while next < opts.restarts {
        let end = (next + batch).min(opts.restarts);
        let runs: Vec<Attempt> = (next..end).into_par_iter().map(|i| sys.run_attempt(opts, i)).collect();
        for a in runs {
            if a.converged {
                let strategy = a.coords.to_strategy()?;
                return Ok(NewtonSolution {
                    strategy,
                    coords: a.coords,
                    residual: a.residual,
                    iterations: a.iterations,
                    attempts: a.index + 1,
                });
            }
            best = best.min(a.residual);
        }
        next = end;
    }
    Err(Error::NoConvergence { restarts: opts.restarts, best_residual: best })
}

/// Converged starts among `attempts`, deduplicated on canonical affine
/// coordinates. A lower bound on the number of isolated solutions.
pub fn find_distinct_solutions(ch: &ChannelSet, attempts: usize, seed: u64) -> Result<Vec<Strategy>> {
    Ok(find_distinct_coords(ch, attempts, seed)?.into_iter().map(|c| c.to_strategy()).collect::<Result<Vec<_>>>()?)
}

/// As [`find_distinct_solutions`], returning the canonical coordinates.
pub fn find_distinct_coords(ch: &ChannelSet, attempts: usize, seed: u64) -> Result<Vec<AffineStrategyCoords>> {
    if trivially_unsolvable(ch.spec()) {
        return Ok(Vec::new());
    }
    let sys = AlignmentSystem::new(ch)?;
    let opts = NewtonOptions { restarts: 1, ..NewtonOptions::with_seed(seed) };
    let mut found: Vec<(Vec<Complex64>, AffineStrategyCoords)> = (0..attempts)
        .into_par_iter()
        .map(|i| sys.run_attempt(&opts, i))
        .filter(|a| a.converged)
        .map(|a| (a.coords.to_vector().iter().copied().collect(), a.coords))
        .collect();
    found.sort_by(|(a, _), (b, _)| {
        a.iter().zip(b).map(|(p, q)| p.re.total_cmp(&q.re).then(p.im.total_cmp(&q.im))).find(|o| o.is_ne()).unwrap_or(std::cmp::Ordering::Equal)
    });
    let mut kept: Vec<(Vec<Complex64>, AffineStrategyCoords)> = Vec::new();
    for (v, c) in found {
        let dup = kept.iter().any(|(w, _)| v.iter().zip(w).all(|(a, b)| (a - b).norm() <= DEDUP_TOL * (1.0 + a.norm())));
        if !dup {
            kept.push((v, c));
        }
    }
    Ok(kept.into_iter().map(|(_, c)| c).collect())
}
