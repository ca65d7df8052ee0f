//! Schubert calculus on products of Grassmannians.
//!
//! Classes in the Chow ring of `G(d, m)` are indexed by partitions fitting a
//! `d x (m - d)` box and multiply by the Littlewood-Richardson rule. The
//! incidence `H U ⊥ V` between a transmit and a receive Grassmannian has class
//! `Σ_λ [λ] ⊗ [d^d - λ']`, and the number of alignment solutions is the
//! coefficient of the top class in the product of all `K(K-1)` incidences.

use std::collections::HashMap;
use std::fmt;
use std::sync::{Mutex, OnceLock};

use num_bigint::BigUint;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Weakly decreasing list of positive parts.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default, Serialize, Deserialize)]
#[serde(try_from = "Vec<usize>", into = "Vec<usize>")]
pub struct Partition(Vec<usize>);

impl Partition {
    /// Trailing zeros are dropped; any other disorder is rejected.
    pub fn new(mut parts: Vec<usize>) -> Result<Self> {
        while parts.last() == Some(&0) {
            parts.pop();
        }
        if parts.windows(2).any(|w| w[0] < w[1]) || parts.contains(&0) {
            return Err(Error::InvalidSpec(format!("{parts:?} is not a partition")));
        }
        Ok(Self(parts))
    }

    pub fn empty() -> Self {
        Self(Vec::new())
    }

    /// `rows` parts all equal to `width`, written `width^rows`.
    pub fn rectangle(width: usize, rows: usize) -> Self {
        if width == 0 { Self::empty() } else { Self(vec![width; rows]) }
    }

    pub fn parts(&self) -> &[usize] {
        &self.0
    }

    /// Number of nonzero parts.
    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn size(&self) -> usize {
        self.0.iter().sum()
    }

    /// Part `i` (0-based), zero past the end.
    pub fn part(&self, i: usize) -> usize {
        self.0.get(i).copied().unwrap_or(0)
    }

    pub fn conjugate(&self) -> Self {
        let width = self.part(0);
        Self((0..width).map(|c| self.0.iter().take_while(|&&p| p > c).count()).collect())
    }

    pub fn fits(&self, rows: usize, cols: usize) -> bool {
        self.len() <= rows && self.part(0) <= cols
    }

    pub fn contains(&self, other: &Partition) -> bool {
        other.len() <= self.len() && other.0.iter().zip(&self.0).all(|(a, b)| a <= b)
    }

    /// Complement in the `rows x cols` box, read backwards:
    /// part `k` is `cols - self[rows - 1 - k]`.
    pub fn complement(&self, rows: usize, cols: usize) -> Self {
        Self::new((0..rows).map(|k| cols - self.part(rows - 1 - k)).collect()).expect("complement of a fitting partition")
    }

    /// All partitions in the `rows x cols` box, ordered by size then
    /// lexicographically.
    pub fn in_box(rows: usize, cols: usize) -> Vec<Partition> {
        fn rec(rows: usize, max: usize, cur: &mut Vec<usize>, out: &mut Vec<Partition>) {
            out.push(Partition(cur.clone()));
            if cur.len() == rows {
                return;
            }
            for p in 1..=max {
                cur.push(p);
                rec(rows, p, cur, out);
                cur.pop();
            }
        }
        let mut out = Vec::new();
        rec(rows, cols, &mut Vec::new(), &mut out);
        out.sort_by(|a, b| a.size().cmp(&b.size()).then_with(|| a.cmp(b)));
        out
    }

    /// All partitions of `n` with parts of size at most `max_part` and at
    /// most `max_len` parts.
    pub fn of_size(n: usize, max_len: usize, max_part: usize) -> Vec<Partition> {
        fn rec(n: usize, max_len: usize, max: usize, cur: &mut Vec<usize>, out: &mut Vec<Partition>) {
            if n == 0 {
                out.push(Partition(cur.clone()));
                return;
            }
            if cur.len() == max_len {
                return;
            }
            for p in (1..=max.min(n)).rev() {
                cur.push(p);
                rec(n - p, max_len, p, cur, out);
                cur.pop();
            }
        }
        let mut out = Vec::new();
        rec(n, max_len, max_part, &mut Vec::new(), &mut out);
        out
    }
}

impl TryFrom<Vec<usize>> for Partition {
    type Error = Error;
    fn try_from(v: Vec<usize>) -> Result<Self> {
        Partition::new(v)
    }
}

impl From<Partition> for Vec<usize> {
    fn from(p: Partition) -> Self {
        p.0
    }
}

impl fmt::Display for Partition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(|p| p.to_string()).collect();
        write!(f, "({})", parts.join(","))
    }
}

pub fn conjugate(lambda: &Partition) -> Partition {
    lambda.conjugate()
}

type LrKey = (Vec<usize>, Vec<usize>, Vec<usize>);

fn lr_memo() -> &'static Mutex<HashMap<LrKey, u64>> {
    static MEMO: OnceLock<Mutex<HashMap<LrKey, u64>>> = OnceLock::new();
    MEMO.get_or_init(|| Mutex::new(HashMap::new()))
}

/// Littlewood-Richardson coefficient `c^ν_{λμ}`: the number of semistandard
/// fillings of `ν/λ` with content `μ` whose reverse reading word is a lattice
/// word.
pub fn lr_coefficient(lambda: &Partition, mu: &Partition, nu: &Partition) -> u64 {
    if nu.size() != lambda.size() + mu.size() || !nu.contains(lambda) || !nu.contains(mu) {
        return 0;
    }
    if mu.is_empty() {
        return 1;
    }
    let key = (lambda.0.clone(), mu.0.clone(), nu.0.clone());
    if let Some(&v) = lr_memo().lock().unwrap().get(&key) {
        return v;
    }
    let v = count_lr_tableaux(lambda, mu, nu);
    lr_memo().lock().unwrap().insert(key, v);
    v
}

fn count_lr_tableaux(lambda: &Partition, mu: &Partition, nu: &Partition) -> u64 {
    struct Fill<'a> {
        lambda: &'a Partition,
        mu: &'a Partition,
        nu: &'a Partition,
        cells: Vec<(usize, usize)>,
        grid: Vec<Vec<usize>>,
        used: Vec<usize>,
    }
    impl Fill<'_> {
        fn run(&mut self, idx: usize) -> u64 {
            let Some(&(r, c)) = self.cells.get(idx) else { return 1 };
            let mut hi = self.mu.len();
            if c + 1 < self.nu.part(r) {
                hi = hi.min(self.grid[r][c + 1]);
            }
            let lo = if r > 0 && c >= self.lambda.part(r - 1) { self.grid[r - 1][c] + 1 } else { 1 };
            let mut total = 0;
            for v in lo..=hi {
                if self.used[v] >= self.mu.part(v - 1) || (v > 1 && self.used[v] + 1 > self.used[v - 1]) {
                    continue;
                }
                self.used[v] += 1;
                self.grid[r][c] = v;
                total += self.run(idx + 1);
                self.used[v] -= 1;
            }
            self.grid[r][c] = 0;
            total
        }
    }
    let mut cells = Vec::new();
    for r in 0..nu.len() {
        for c in (lambda.part(r)..nu.part(r)).rev() {
            cells.push((r, c));
        }
    }
    let grid = (0..nu.len()).map(|r| vec![0; nu.part(r)]).collect();
    Fill { lambda, mu, nu, cells, grid, used: vec![0; mu.len() + 1] }.run(0)
}

/// `G(d, m)`: `d`-planes in `C^m`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct GrassmannianShape {
    pub d: usize,
    pub m: usize,
}

impl GrassmannianShape {
    pub fn new(d: usize, m: usize) -> Result<Self> {
        if d == 0 || d > m {
            return Err(Error::InvalidSpec(format!("G({d}, {m}) needs 1 <= d <= m")));
        }
        Ok(Self { d, m })
    }

    pub fn dimension(&self) -> usize {
        self.d * (self.m - self.d)
    }

    pub fn fits(&self, p: &Partition) -> bool {
        p.fits(self.d, self.m - self.d)
    }

    /// The point class `(m-d)^d`.
    pub fn top(&self) -> Partition {
        Partition::rectangle(self.m - self.d, self.d)
    }

    pub fn partitions(&self) -> Vec<Partition> {
        Partition::in_box(self.d, self.m - self.d)
    }
}

/// `[λ][μ]` in the Chow ring of `shape`: LR terms whose `ν` fits the box.
pub fn schur_multiply_in_box(lambda: &Partition, mu: &Partition, shape: GrassmannianShape) -> Vec<(Partition, u64)> {
    let n = lambda.size() + mu.size();
    if !shape.fits(lambda) || !shape.fits(mu) || n > shape.dimension() {
        return Vec::new();
    }
    Partition::of_size(n, shape.d, shape.m - shape.d)
        .into_iter()
        .filter_map(|nu| {
            let c = lr_coefficient(lambda, mu, &nu);
            (c > 0).then_some((nu, c))
        })
        .collect()
}

/// Terms `(λ, d^d - λ')` of the incidence class, `λ` on the transmit factor.
pub fn incidence_class(d: usize) -> Vec<(Partition, Partition)> {
    Partition::in_box(d, d).into_iter().map(|l| {
        let rx = l.conjugate().complement(d, d);
        (l, rx)
    }).collect()
}

/// Sparse element of the Chow ring of a product of Grassmannians.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ChowVector {
    pub shapes: Vec<GrassmannianShape>,
    pub terms: HashMap<Vec<Partition>, BigUint>,
}

impl ChowVector {
    /// The unit class.
    pub fn one(shapes: Vec<GrassmannianShape>) -> Self {
        let key = vec![Partition::empty(); shapes.len()];
        Self { shapes, terms: HashMap::from([(key, BigUint::from(1u32))]) }
    }

    /// Product with a class living on two factors, given as `(left, right)`
    /// partition pairs with unit coefficients.
    pub fn multiply_pair_class(&self, left: usize, right: usize, class: &[(Partition, Partition)]) -> Self {
        let mut terms: HashMap<Vec<Partition>, BigUint> = HashMap::new();
        for (key, coeff) in &self.terms {
            for (a, b) in class {
                for (pa, ca) in schur_multiply_in_box(&key[left], a, self.shapes[left]) {
                    for (pb, cb) in schur_multiply_in_box(&key[right], b, self.shapes[right]) {
                        let mut k = key.clone();
                        k[left] = pa.clone();
                        k[right] = pb;
                        *terms.entry(k).or_default() += coeff * BigUint::from(ca * cb);
                    }
                }
            }
        }
        Self { shapes: self.shapes.clone(), terms }
    }

    pub fn coefficient(&self, key: &[Partition]) -> BigUint {
        self.terms.get(key).cloned().unwrap_or_default()
    }

    /// Coefficient of the point class.
    pub fn top_coefficient(&self) -> BigUint {
        let key: Vec<Partition> = self.shapes.iter().map(|s| s.top()).collect();
        self.coefficient(&key)
    }
}

/// Alignment count by expanding a [`ChowVector`] relation by relation with
/// no pruning. Factors are `U_1..U_K` then `V_1..V_K`. Only practical for
/// very small instances; [`count_solutions`] is the fast path.
pub fn count_solutions_naive(k: usize, d: usize, n: usize) -> Result<BigUint> {
    check_square(k, d, n)?;
    let shape = GrassmannianShape::new(d, n)?;
    let class = incidence_class(d);
    let mut v = ChowVector::one(vec![shape; 2 * k]);
    for rx in 0..k {
        for tx in (0..k).filter(|&t| t != rx) {
            v = v.multiply_pair_class(tx, k + rx, &class);
        }
    }
    Ok(v.top_coefficient())
}

fn check_square(k: usize, d: usize, n: usize) -> Result<()> {
    if k < 2 || d == 0 || n < d {
        return Err(Error::InvalidSpec(format!("counting needs K >= 2 and 1 <= d <= N, got K = {k}, d = {d}, N = {n}")));
    }
    let dim = 2 * k * d * (n - d);
    let codim = k * (k - 1) * d * d;
    if dim != codim {
        return Err(Error::DimensionMismatch { dim: dim as i64, codim: codim as i64 });
    }
    Ok(())
}

/// Options for [`count_solutions_with`].
#[derive(Debug, Clone, Copy)]
pub struct CountOptions {
    /// Largest number of live terms allowed at any step.
    pub budget: usize,
}

impl Default for CountOptions {
    fn default() -> Self {
        Self { budget: 20_000_000 }
    }
}

/// Multiplication table of one Grassmannian with partitions as indices.
struct BoxRing {
    parts: Vec<Partition>,
    sizes: Vec<usize>,
    table: Vec<Vec<Vec<(usize, u64)>>>,
    top: usize,
}

impl BoxRing {
    fn new(shape: GrassmannianShape, right: &[Partition]) -> Self {
        let parts = shape.partitions();
        let index: HashMap<&Partition, usize> = parts.iter().enumerate().map(|(i, p)| (p, i)).collect();
        let table = parts
            .iter()
            .map(|a| {
                right
                    .iter()
                    .map(|b| schur_multiply_in_box(a, b, shape).into_iter().map(|(p, c)| (index[&p], c)).collect())
                    .collect()
            })
            .collect();
        let top = index[&shape.top()];
        let sizes = parts.iter().map(Partition::size).collect();
        Self { parts, sizes, table, top }
    }
}

/// Coefficient arithmetic with overflow detection.
trait Coeff: Clone + Send + Sync + Default {
    fn from_u64(v: u64) -> Self;
    fn add_product(&mut self, a: &Self, b: u64) -> bool;
    fn add(&mut self, a: &Self) -> bool;
    fn to_big(&self) -> BigUint;
}

impl Coeff for u128 {
    fn from_u64(v: u64) -> Self {
        v as u128
    }
    fn add_product(&mut self, a: &Self, b: u64) -> bool {
        match a.checked_mul(b as u128).and_then(|p| self.checked_add(p)) {
            Some(v) => {
                *self = v;
                true
            }
            None => false,
        }
    }
    fn add(&mut self, a: &Self) -> bool {
        match self.checked_add(*a) {
            Some(v) => {
                *self = v;
                true
            }
            None => false,
        }
    }
    fn to_big(&self) -> BigUint {
        BigUint::from(*self)
    }
}

impl Coeff for BigUint {
    fn from_u64(v: u64) -> Self {
        BigUint::from(v)
    }
    fn add_product(&mut self, a: &Self, b: u64) -> bool {
        *self += a * b;
        true
    }
    fn add(&mut self, a: &Self) -> bool {
        *self += a;
        true
    }
    fn to_big(&self) -> BigUint {
        self.clone()
    }
}

enum Failure {
    Overflow,
    Budget,
}

/// Packs one small index per factor.
#[derive(Clone, Copy)]
struct Packing {
    bits: u32,
}

impl Packing {
    fn get(self, key: u128, f: usize) -> usize {
        ((key >> (f as u32 * self.bits)) & ((1u128 << self.bits) - 1)) as usize
    }
    fn set(self, key: u128, f: usize, v: usize) -> u128 {
        let shift = f as u32 * self.bits;
        (key & !(((1u128 << self.bits) - 1) << shift)) | ((v as u128) << shift)
    }
}

/// One receiver's incidences with its receive factor already reduced to
/// the point class: transmit-side partitions (indices into the incidence
/// list, one per other user) with their coefficients.
fn receiver_class(k: usize, ring: &BoxRing, class: &[(Partition, Partition)]) -> Vec<(Vec<usize>, u64)> {
    let shape_parts = &ring.parts;
    let index: HashMap<&Partition, usize> = shape_parts.iter().enumerate().map(|(i, p)| (p, i)).collect();
    // The receive side multiplies by the incidence's right partitions, so
    // reuse the ring tables keyed by incidence index.
    let rx_index: Vec<Option<usize>> = class.iter().map(|(_, b)| index.get(b).copied()).collect();
    let mut states: Vec<(Vec<usize>, usize, u64)> = vec![(Vec::new(), 0, 1)];
    let others = k - 1;
    let d2 = class.iter().map(|(a, b)| a.size() + b.size()).max().unwrap_or(0);
    for step in 0..others {
        let remaining = others - step - 1;
        let mut next: HashMap<(Vec<usize>, usize), u64> = HashMap::new();
        for (choice, v, c) in &states {
            for (t, rx) in rx_index.iter().enumerate() {
                let Some(rx) = rx else { continue };
                for &(p, lr) in &ring.table[*v][*rx] {
                    if ring.sizes[ring.top] - ring.sizes[p] > d2 * remaining {
                        continue;
                    }
                    let mut ch = choice.clone();
                    ch.push(t);
                    *next.entry((ch, p)).or_default() += c * lr;
                }
            }
        }
        states = next.into_iter().map(|((ch, p), c)| (ch, p, c)).collect();
    }
    let mut out: Vec<(Vec<usize>, u64)> = states.into_iter().filter(|(_, p, _)| *p == ring.top).map(|(ch, _, c)| (ch, c)).collect();
    out.sort();
    out
}

fn expand<C: Coeff>(
    k: usize,
    d2: usize,
    ring: &BoxRing,
    tx_index: &[usize],
    receivers: &[Vec<(Vec<usize>, u64)>],
    pack: Packing,
    budget: usize,
) -> std::result::Result<C, Failure> {
    let mut live: Vec<(u128, C)> = vec![(0, C::from_u64(1))];
    let top_size = ring.sizes[ring.top];
    for rx in 0..k {
        let rclass = &receivers[rx];
        let tx_order: Vec<usize> = (0..k).filter(|&t| t != rx).collect();
        // Incidences still to come for each transmit factor after this receiver.
        let remaining: Vec<usize> = (0..k).map(|t| ((rx + 1)..k).filter(|&r| r != t).count()).collect();
        let merged = live
            .par_chunks(4096.max(live.len() / (4 * rayon::current_num_threads()).max(1)))
            .map(|chunk| {
                let mut acc: HashMap<u128, C> = HashMap::new();
                let mut stack: Vec<(u128, C)> = Vec::new();
                for (key, coeff) in chunk {
                    for (choice, rc) in rclass {
                        let mut base = C::default();
                        if !base.add_product(coeff, *rc) {
                            return Err(Failure::Overflow);
                        }
                        stack.clear();
                        stack.push((*key, base));
                        for (slot, &t) in tx_order.iter().enumerate() {
                            let b = tx_index[choice[slot]];
                            let mut grown = Vec::with_capacity(stack.len() * 2);
                            for (kk, cc) in &stack {
                                let a = pack.get(*kk, t);
                                for &(p, lr) in &ring.table[a][b] {
                                    let deficit = top_size - ring.sizes[p];
                                    if deficit > d2 * remaining[t] {
                                        continue;
                                    }
                                    let mut c = C::default();
                                    if !c.add_product(cc, lr) {
                                        return Err(Failure::Overflow);
                                    }
                                    grown.push((pack.set(*kk, t, p), c));
                                }
                            }
                            stack = grown;
                            if stack.is_empty() {
                                break;
                            }
                        }
                        for (kk, cc) in stack.drain(..) {
                            if !acc.entry(kk).or_default().add(&cc) {
                                return Err(Failure::Overflow);
                            }
                        }
                    }
                    if acc.len() > budget {
                        return Err(Failure::Budget);
                    }
                }
                Ok(acc)
            })
            .try_reduce(HashMap::new, |mut a, b| {
                let (mut big, small) = if a.len() >= b.len() { (std::mem::take(&mut a), b) } else { (b, a) };
                for (kk, cc) in small {
                    if !big.entry(kk).or_default().add(&cc) {
                        return Err(Failure::Overflow);
                    }
                }
                Ok(big)
            })?;
        if merged.len() > budget {
            return Err(Failure::Budget);
        }
        live = merged.into_iter().collect();
        live.sort_unstable_by_key(|(kk, _)| *kk);
    }
    let full = (0..k).fold(0u128, |kk, t| pack.set(kk, t, ring.top));
    Ok(live.into_iter().find(|(kk, _)| *kk == full).map(|(_, c)| c).unwrap_or_default())
}

/// Number of alignment solutions for `K` users with `M = N` antennas and `d`
/// streams, for generic channels. Requires the square case
/// `2K d(N-d) = K(K-1)d²`.
pub fn count_solutions(k: usize, d: usize, n: usize) -> Result<BigUint> {
    count_solutions_with(k, d, n, CountOptions::default())
}

pub fn count_solutions_with(k: usize, d: usize, n: usize, opts: CountOptions) -> Result<BigUint> {
    check_square(k, d, n)?;
    let shape = GrassmannianShape::new(d, n)?;
    let class = incidence_class(d);
    let tx_parts: Vec<Partition> = class.iter().map(|(a, _)| a.clone()).collect();
    let ring = BoxRing::new(shape, &shape.partitions());
    let index: HashMap<&Partition, usize> = ring.parts.iter().enumerate().map(|(i, p)| (p, i)).collect();
    // Incidence terms whose transmit partition leaves the box vanish.
    let fits: Vec<bool> = tx_parts.iter().map(|p| index.contains_key(p)).collect();
    let tx_index: Vec<usize> = tx_parts.iter().map(|p| index.get(p).copied().unwrap_or(0)).collect();
    let rclass: Vec<(Vec<usize>, u64)> =
        receiver_class(k, &ring, &class).into_iter().filter(|(ch, _)| ch.iter().all(|&t| fits[t])).collect();
    let receivers = vec![rclass; k];
    let bits = usize::BITS - (ring.parts.len() - 1).max(1).leading_zeros();
    if bits as usize * k > 128 {
        return Err(Error::ResourceLimit(opts.budget));
    }
    let pack = Packing { bits };
    let d2 = d * d;
    match expand::<u128>(k, d2, &ring, &tx_index, &receivers, pack, opts.budget) {
        Ok(c) => Ok(c.to_big()),
        Err(Failure::Budget) => Err(Error::ResourceLimit(opts.budget)),
        Err(Failure::Overflow) => match expand::<BigUint>(k, d2, &ring, &tx_index, &receivers, pack, opts.budget) {
            Ok(c) => Ok(c),
            Err(_) => Err(Error::ResourceLimit(opts.budget)),
        },
    }
}

/// Chosen incidence term for one relation of the existence witness.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct WitnessTerm {
    /// 1-based.
    pub receiver: usize,
    /// 1-based.
    pub transmitter: usize,
    pub transmit_partition: Partition,
    pub receive_partition: Partition,
}

/// Product of the chosen partitions on one factor.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FactorProduct {
    /// `"U3"` or `"V1"`.
    pub factor: String,
    pub partitions: Vec<Partition>,
    /// The term the argument predicts, with its coefficient in the product.
    pub target: Partition,
    pub target_coefficient: u64,
    pub terms: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ExistenceWitness {
    pub k: usize,
    pub d: usize,
    pub n: usize,
    pub terms: Vec<WitnessTerm>,
    pub factors: Vec<FactorProduct>,
}

fn box_product(parts: &[Partition], shape: GrassmannianShape) -> HashMap<Partition, u64> {
    let mut acc = HashMap::from([(Partition::empty(), 1u64)]);
    for p in parts {
        let mut next = HashMap::new();
        for (q, c) in &acc {
            for (r, lr) in schur_multiply_in_box(q, p, shape) {
                *next.entry(r).or_default() += c * lr;
            }
        }
        acc = next;
    }
    acc
}

/// One nonvanishing term of the product of all incidence classes, showing
/// that alignment is feasible for `K` users with `M = N` antennas and `d`
/// streams when `2N >= (K+1)d`. Each factor's product is checked to contain
/// the predicted partition.
pub fn existence_witness(k: usize, d: usize, n: usize) -> Result<ExistenceWitness> {
    if k < 3 {
        return Err(Error::BadK(k));
    }
    if d == 0 || 2 * n < (k + 1) * d {
        return Err(Error::InfeasibleInput(format!("need 2N >= (K+1)d, got K = {k}, d = {d}, N = {n}")));
    }
    let shape = GrassmannianShape::new(d, n)?;
    let mut terms = Vec::with_capacity(k * (k - 1));
    for rx in 1..=k {
        for tx in (1..=k).filter(|&t| t != rx) {
            let tx_part = if k % 2 == 1 {
                let diff = (tx + k - rx) % k;
                if diff <= (k - 1) / 2 { Partition::rectangle(d, d) } else { Partition::empty() }
            } else {
                // Half-width rectangles, with d/2 rounded down when the
                // indices differ by an even amount.
                let even_diff = (rx + k - tx) % 2 == 0;
                let half = if even_diff { d / 2 } else { d.div_ceil(2) };
                let tall = tx % 2 == 0 && (rx == (tx % k) + 1 || rx == ((tx + 1) % k) + 1);
                if tall { Partition::rectangle(d, half) } else { Partition::rectangle(half, d) }
            };
            let rx_part = tx_part.conjugate().complement(d, d);
            terms.push(WitnessTerm { receiver: rx, transmitter: tx, transmit_partition: tx_part, receive_partition: rx_part });
        }
    }
    let target_width = d * (k - 1) / 2;
    let mut factors = Vec::with_capacity(2 * k);
    let mut collect = |name: String, parts: Vec<Partition>| -> Result<()> {
        let product = box_product(&parts, shape);
        let total: usize = parts.iter().map(Partition::size).sum();
        // With K even and d odd the widths cannot all agree, so any nonzero
        // term will do; take the largest.
        let target = if d * (k - 1) % 2 == 0 && target_width * d == total {
            Partition::rectangle(target_width, d)
        } else {
            product.keys().max().cloned().unwrap_or_default()
        };
        let target_coefficient = product.get(&target).copied().unwrap_or(0);
        if target_coefficient == 0 {
            return Err(Error::WitnessFailed(format!("{name}: product of {parts:?} misses {target}")));
        }
        factors.push(FactorProduct { factor: name, partitions: parts, target, target_coefficient, terms: product.len() });
        Ok(())
    };
    for u in 1..=k {
        collect(format!("U{u}"), terms.iter().filter(|t| t.transmitter == u).map(|t| t.transmit_partition.clone()).collect())?;
    }
    for v in 1..=k {
        collect(format!("V{v}"), terms.iter().filter(|t| t.receiver == v).map(|t| t.receive_partition.clone()).collect())?;
    }
    Ok(ExistenceWitness { k, d, n, terms, factors })
}
