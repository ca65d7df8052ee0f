//! Closed-form feasibility tests.
//!
//! The counting bound over user subsets and the triple/path bounds are
//! necessary conditions for arbitrary instances. Complete answers exist for
//! three symmetric users, for `M_i = N_i = N` with equal streams, and for
//! equal streams dividing every antenna count.

use num_rational::Ratio;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::spec::ProblemSpec;

/// Largest `K` for which [`check_counting`] enumerates all subsets.
pub const MAX_COUNTING_USERS: usize = 24;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Feasible,
    Infeasible,
    NecessaryConditionsPassOnly,
}

/// One evaluated condition. User indices are 1-based.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "condition", rename_all = "snake_case")]
pub enum Certificate {
    /// Dimension count `t_A` over the subset `users`.
    SubsetCount { users: Vec<usize>, t: i64 },
    /// `d_i + d_j + d_k <= max(N_i, M_j + M_k)`, or the transmit-side form
    /// with `M` and `N` exchanged when `reversed`.
    Triple { users: [usize; 3], reversed: bool, lhs: i64, rhs: i64 },
    /// Alignment-path bound over `sequence` (length `r + 2`).
    PathBound { sequence: Vec<usize>, r: usize, reversed: bool, lhs: i64, rhs: i64 },
    /// Three-user symmetric condition `(2r+1)d <= max(rN, (r+1)M)`.
    PathLength { r: u64, lhs: i64, rhs: i64 },
    /// Fully symmetric condition `2N >= (K+1)d`, stored as `lhs = (K+1)d`,
    /// `rhs = 2N`.
    FullySymmetric { lhs: i64, rhs: i64 },
}

impl Certificate {
    pub fn holds(&self) -> bool {
        match self {
            Certificate::SubsetCount { t, .. } => *t >= 0,
            Certificate::Triple { lhs, rhs, .. }
            | Certificate::PathBound { lhs, rhs, .. }
            | Certificate::PathLength { lhs, rhs, .. }
            | Certificate::FullySymmetric { lhs, rhs } => lhs <= rhs,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FeasibilityVerdict {
    pub status: Status,
    /// Dimension `t_{1..K}` of the solution variety, when defined.
    pub dimension: Option<i64>,
    pub certificates: Vec<Certificate>,
}

impl FeasibilityVerdict {
    pub fn is_feasible(&self) -> bool {
        self.status == Status::Feasible
    }

    pub fn is_infeasible(&self) -> bool {
        self.status == Status::Infeasible
    }

    fn infeasible(cert: Certificate) -> Self {
        Self { status: Status::Infeasible, dimension: None, certificates: vec![cert] }
    }
}

fn per_user_terms(spec: &ProblemSpec, i: usize) -> (i64, i64) {
    let u = spec.user(i);
    let (m, n, d) = (u.m as i64, u.n as i64, u.d as i64);
    (d * (n - d) + d * (m - d), d)
}

/// `t_A` for a set of 0-based users: strategy dimensions over `A` minus one
/// equation per stream pair `(i, j)`, `i != j`, both in `A`.
pub fn t_subset(spec: &ProblemSpec, users: &[usize]) -> i64 {
    let mut own = 0;
    let mut streams = 0;
    let mut squares = 0;
    for &i in users {
        let (a, d) = per_user_terms(spec, i);
        own += a;
        streams += d;
        squares += d * d;
    }
    own - (streams * streams - squares)
}

fn mask_users(mask: u64, k: usize) -> Vec<usize> {
    (0..k).filter(|&i| mask >> i & 1 == 1).collect()
}

/// Dimension count over every non-empty subset, in increasing bitmask order.
/// Reports the first subset with `t_A < 0`.
pub fn check_counting(spec: &ProblemSpec) -> Result<FeasibilityVerdict> {
    let k = spec.k();
    if k > MAX_COUNTING_USERS {
        return Err(Error::TooManyUsers { k, max: MAX_COUNTING_USERS });
    }
    let terms: Vec<(i64, i64)> = (0..k).map(|i| per_user_terms(spec, i)).collect();
    for mask in 1u64..(1u64 << k) {
        let (mut own, mut streams, mut squares) = (0i64, 0i64, 0i64);
        let mut rest = mask;
        while rest != 0 {
            let i = rest.trailing_zeros() as usize;
            rest &= rest - 1;
            let (a, d) = terms[i];
            own += a;
            streams += d;
            squares += d * d;
        }
        let t = own - (streams * streams - squares);
        if t < 0 {
            let users = mask_users(mask, k).into_iter().map(|i| i + 1).collect();
            return Ok(FeasibilityVerdict::infeasible(Certificate::SubsetCount { users, t }));
        }
    }
    let all: Vec<usize> = (0..k).collect();
    let t = t_subset(spec, &all);
    Ok(FeasibilityVerdict {
        status: Status::NecessaryConditionsPassOnly,
        dimension: Some(t),
        certificates: vec![Certificate::SubsetCount { users: all.iter().map(|i| i + 1).collect(), t }],
    })
}

/// Both forms of the triple bound for distinct 0-based users.
pub fn triple_certificates(spec: &ProblemSpec, i: usize, j: usize, k: usize) -> [Certificate; 2] {
    assert!(i != j && j != k && i != k, "triple needs distinct users");
    let (ui, uj, uk) = (spec.user(i), spec.user(j), spec.user(k));
    let lhs = (ui.d + uj.d + uk.d) as i64;
    let users = [i + 1, j + 1, k + 1];
    [
        Certificate::Triple { users, reversed: false, lhs, rhs: ui.n.max(uj.m + uk.m) as i64 },
        Certificate::Triple { users, reversed: true, lhs, rhs: ui.m.max(uj.n + uk.n) as i64 },
    ]
}

/// `d_i + d_j + d_k <= max(N_i, M_j + M_k)` together with its reversed form.
pub fn check_triple(spec: &ProblemSpec, i: usize, j: usize, k: usize) -> bool {
    triple_certificates(spec, i, j, k).iter().all(Certificate::holds)
}

fn validate_sequence(spec: &ProblemSpec, seq: &[usize]) -> Result<()> {
    if seq.len() < 2 {
        return Err(Error::HypothesisViolated(format!("sequence needs at least 2 indices, got {}", seq.len())));
    }
    if let Some(&bad) = seq.iter().find(|&&i| i >= spec.k()) {
        return Err(Error::HypothesisViolated(format!("user {} out of range", bad + 1)));
    }
    let r = seq.len() - 2;
    for j in 0..seq.len() - 1 {
        if seq[j] == seq[j + 1] {
            return Err(Error::HypothesisViolated(format!("positions {} and {} repeat a user", j + 1, j + 2)));
        }
    }
    for j in 0..r {
        if seq[j] == seq[j + 2] {
            return Err(Error::HypothesisViolated(format!("positions {} and {} repeat a user", j + 1, j + 3)));
        }
    }
    // A repeated index may not reuse a channel in both diagonals:
    // i_j = i_j' forbids i_{j+1} = i_{j'+2}.
    for j in 0..=r {
        for jp in 0..r {
            if seq[j] == seq[jp] && seq[j + 1] == seq[jp + 2] {
                return Err(Error::HypothesisViolated(format!(
                    "positions {} and {} reuse channel ({}, {})",
                    j + 1,
                    jp + 1,
                    seq[j] + 1,
                    seq[j + 1] + 1
                )));
            }
        }
    }
    Ok(())
}

/// Certificates for every form of the path bound whose equal-antenna
/// hypothesis holds on `seq` (0-based users).
pub fn path_bound_certificates(spec: &ProblemSpec, seq: &[usize]) -> Result<Vec<Certificate>> {
    validate_sequence(spec, seq)?;
    let r = seq.len() - 2;
    let d = |j: usize| spec.user(seq[j]).d as i64;
    let lhs: i64 = (0..r).map(d).sum::<i64>() + (1..r + 2).map(d).sum::<i64>();
    let sequence: Vec<usize> = seq.iter().map(|i| i + 1).collect();
    let receivers = &seq[..r];
    let transmitters = &seq[1..];
    let all_equal = |idx: &[usize], f: &dyn Fn(usize) -> usize| idx.windows(2).all(|w| f(w[0]) == f(w[1]));
    let n_of = |i: usize| spec.user(i).n;
    let m_of = |i: usize| spec.user(i).m;

    let mut certs = Vec::new();
    if all_equal(receivers, &n_of) && all_equal(transmitters, &m_of) {
        let n = receivers.first().map_or(0, |&i| n_of(i)) as i64;
        let m = m_of(transmitters[0]) as i64;
        let rhs = (r as i64 * n).max((r as i64 + 1) * m);
        certs.push(Certificate::PathBound { sequence: sequence.clone(), r, reversed: false, lhs, rhs });
    }
    if all_equal(receivers, &m_of) && all_equal(transmitters, &n_of) {
        let m = receivers.first().map_or(0, |&i| m_of(i)) as i64;
        let n = n_of(transmitters[0]) as i64;
        let rhs = (r as i64 * m).max((r as i64 + 1) * n);
        certs.push(Certificate::PathBound { sequence, r, reversed: true, lhs, rhs });
    }
    if certs.is_empty() {
        return Err(Error::HypothesisViolated("antenna counts along the sequence are not equal".into()));
    }
    Ok(certs)
}

/// Alignment-path bound for a sequence `i_1, ..., i_{r+2}` of 0-based users.
pub fn check_path_bound(spec: &ProblemSpec, seq: &[usize]) -> Result<bool> {
    Ok(path_bound_certificates(spec, seq)?.iter().all(Certificate::holds))
}

/// Every admissible sequence of length `2..=max_len` (i.e. `r <= max_len - 2`)
/// whose equal-antenna hypothesis holds in at least one form.
pub fn admissible_sequences(spec: &ProblemSpec, max_len: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut seq = Vec::new();
    fn extend(spec: &ProblemSpec, max_len: usize, seq: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if seq.len() >= 2 && path_bound_certificates(spec, seq).is_ok() {
            out.push(seq.clone());
        }
        if seq.len() == max_len {
            return;
        }
        for next in 0..spec.k() {
            seq.push(next);
            // Prefixes of valid sequences are valid, so prune on the prefix.
            if seq.len() < 2 || validate_sequence(spec, seq).is_ok() {
                extend(spec, max_len, seq, out);
            }
            seq.pop();
        }
    }
    extend(spec, max_len, &mut seq, &mut out);
    out
}

/// Counting bound, every triple bound, and optionally every admissible path
/// bound up to `max_path_len` indices. Never reports `Feasible`.
pub fn check_necessary(spec: &ProblemSpec, max_path_len: Option<usize>) -> Result<FeasibilityVerdict> {
    let mut verdict = check_counting(spec)?;
    if verdict.is_infeasible() {
        return Ok(verdict);
    }
    let k = spec.k();
    for i in 0..k {
        for j in 0..k {
            for l in j + 1..k {
                if i == j || i == l {
                    continue;
                }
                if let Some(bad) = triple_certificates(spec, i, j, l).into_iter().find(|c| !c.holds()) {
                    return Ok(FeasibilityVerdict::infeasible(bad));
                }
            }
        }
    }
    if let Some(max_len) = max_path_len {
        for seq in admissible_sequences(spec, max_len) {
            let certs = path_bound_certificates(spec, &seq)?;
            if let Some(bad) = certs.into_iter().find(|c| !c.holds()) {
                return Ok(FeasibilityVerdict::infeasible(bad));
            }
        }
    }
    verdict.status = Status::NecessaryConditionsPassOnly;
    Ok(verdict)
}

/// `(lhs, rhs)` of `(2r+1)d <= max(rN, (r+1)M)`.
pub fn three_user_condition(m: usize, n: usize, d: usize, r: u64) -> (i64, i64) {
    let (m, n, d, r) = (m as i64, n as i64, d as i64, r as i64);
    ((2 * r + 1) * d, (r * n).max((r + 1) * m))
}

/// Last `r` that needs checking, or `None` when the condition fails for all
/// large `r` (only possible with `N <= 2d`). Assumes `n >= m`.
fn three_user_r_limit(m: usize, n: usize, d: usize) -> Option<u64> {
    if n > 2 * d {
        Some(d.div_ceil(n - 2 * d) as u64)
    } else if m == 2 * d && n == 2 * d {
        Some(1)
    } else {
        None
    }
}

/// Complete test for three users with `M`, `N` antennas and `d` streams each.
pub fn decide_3user_symmetric(m: usize, n: usize, d: usize) -> FeasibilityVerdict {
    let (m, n) = if n >= m { (m, n) } else { (n, m) };
    let failing = |r: u64| {
        let (lhs, rhs) = three_user_condition(m, n, d, r);
        (lhs > rhs).then_some(Certificate::PathLength { r, lhs, rhs })
    };
    let witness = match three_user_r_limit(m, n, d) {
        Some(limit) => (0..=limit).find_map(failing),
        None => {
            // N <= 2d and M < 2d: rN < (2r+1)d for every r, so the condition
            // reduces to (r+1)M >= (2r+1)d, which fails from the first r
            // above (M - d) / (2d - M) on (or already at r = 0 when d > M).
            let first = if m < d { 0 } else { ((m - d) / (2 * d - m)) as u64 + 1 };
            failing(first).or_else(|| (0..first).find_map(failing))
        }
    };
    match witness {
        Some(cert) => FeasibilityVerdict::infeasible(cert),
        None => {
            let (m, n, d) = (m as i64, n as i64, d as i64);
            FeasibilityVerdict {
                status: Status::Feasible,
                dimension: Some(3 * d * (m + n - 4 * d)),
                certificates: vec![],
            }
        }
    }
}

/// Complete test for `K >= 3` users with `M_i = N_i = N` and `d_i = d`.
pub fn decide_fully_symmetric(k: usize, n: usize, d: usize) -> Result<FeasibilityVerdict> {
    if k < 3 {
        return Err(Error::BadK(k));
    }
    let (k, n, d) = (k as i64, n as i64, d as i64);
    let cert = Certificate::FullySymmetric { lhs: (k + 1) * d, rhs: 2 * n };
    if cert.holds() {
        Ok(FeasibilityVerdict {
            status: Status::Feasible,
            dimension: Some(k * d * (2 * n - (k + 1) * d)),
            certificates: vec![cert],
        })
    } else {
        Ok(FeasibilityVerdict::infeasible(cert))
    }
}

/// Complete test when all streams equal `d` and `d` divides every antenna
/// count; `None` when that hypothesis fails.
pub fn decide_divisible(spec: &ProblemSpec) -> Result<Option<FeasibilityVerdict>> {
    let d = spec.user(0).d;
    let applicable = spec.users().iter().all(|u| u.d == d && u.m % d == 0 && u.n % d == 0);
    if !applicable {
        return Ok(None);
    }
    let mut verdict = check_counting(spec)?;
    if verdict.status == Status::NecessaryConditionsPassOnly {
        verdict.status = Status::Feasible;
    }
    Ok(Some(verdict))
}

/// Best verdict available for an arbitrary instance: complete
/// characterizations where they apply, otherwise the necessary conditions.
pub fn assess(spec: &ProblemSpec, max_path_len: Option<usize>) -> Result<FeasibilityVerdict> {
    let first = spec.user(0);
    if spec.is_symmetric() {
        if spec.k() == 3 {
            return Ok(decide_3user_symmetric(first.m, first.n, first.d));
        }
        if first.m == first.n && spec.k() >= 3 {
            return decide_fully_symmetric(spec.k(), first.n, first.d);
        }
    }
    let necessary = check_necessary(spec, max_path_len)?;
    if necessary.is_infeasible() {
        return Ok(necessary);
    }
    if let Some(verdict) = decide_divisible(spec)? {
        return Ok(verdict);
    }
    Ok(necessary)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct MaxDof {
    pub d: usize,
    pub total: usize,
    /// Total dof divided by the single-user dof `N`.
    pub normalized: Ratio<usize>,
}

/// Largest symmetric stream count `d = floor(2N / (K+1))` and the resulting
/// totals for `K >= 3` users with `N` antennas each.
pub fn max_dof_fully_symmetric(k: usize, n: usize) -> MaxDof {
    assert!(k >= 3 && n >= 1, "needs K >= 3 and N >= 1");
    let d = 2 * n / (k + 1);
    MaxDof { d, total: k * d, normalized: Ratio::new(k * d, n) }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct SubsetDof {
    pub active: usize,
    pub d: usize,
    pub total: usize,
}

/// Per-user streams when `k` of the users are active, each with `N` antennas.
fn streams_with_active(k: usize, n: usize) -> usize {
    match k {
        1 => n,
        // Two users need V_i and H_ij U_j complementary in C^N.
        2 => n / 2,
        _ => 2 * n / (k + 1),
    }
}

/// Total dof maximized over the number of active users `1 <= k <= K`; ties go
/// to the fewest active users.
pub fn best_subset_dof(k: usize, n: usize) -> SubsetDof {
    assert!(k >= 1, "needs K >= 1");
    (1..=k)
        .map(|active| {
            let d = streams_with_active(active, n);
            SubsetDof { active, d, total: active * d }
        })
        .fold(None::<SubsetDof>, |best, cand| match best {
            Some(b) if b.total >= cand.total => Some(b),
            _ => Some(cand),
        })
        .expect("at least one candidate")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spec::UserDims;

    fn sym(k: usize, m: usize, n: usize, d: usize) -> ProblemSpec {
        ProblemSpec::symmetric(k, m, n, d).unwrap()
    }

    /// Independent double loop over ordered pairs.
    fn t_oracle(spec: &ProblemSpec, users: &[usize]) -> i64 {
        let mut t = 0i64;
        for &i in users {
            let u = spec.user(i);
            t += (u.d * (u.n - u.d)) as i64 + (u.d * (u.m - u.d)) as i64;
            for &j in users {
                if i != j {
                    t -= (u.d * spec.user(j).d) as i64;
                }
            }
        }
        t
    }

    #[test]
    fn t_subset_examples() {
        assert_eq!(t_subset(&sym(3, 2, 2, 1), &[0, 1, 2]), 0);
        assert_eq!(t_subset(&sym(3, 2, 2, 1), &[]), 0);
        for (m, n, d) in [(3, 5, 2), (4, 8, 3), (6, 6, 2), (7, 4, 1)] {
            let spec = sym(3, m, n, d);
            let (mi, ni, di) = (m as i64, n as i64, d as i64);
            assert_eq!(t_subset(&spec, &[0, 1, 2]), 3 * di * (mi + ni - 4 * di));
            assert_eq!(t_subset(&spec, &[0, 1, 2]), t_oracle(&spec, &[0, 1, 2]));
        }
    }

    #[test]
    fn t_subset_matches_oracle_on_asymmetric() {
        let spec = ProblemSpec::new(vec![
            UserDims::new(3, 4, 1),
            UserDims::new(5, 2, 2),
            UserDims::new(2, 6, 1),
            UserDims::new(4, 4, 3),
        ])
        .unwrap();
        for mask in 0u64..16 {
            let users = mask_users(mask, 4);
            assert_eq!(t_subset(&spec, &users), t_oracle(&spec, &users));
        }
    }

    #[test]
    fn counting_examples() {
        for d in 1..5 {
            let v = check_counting(&sym(3, 2 * d, 2 * d, d)).unwrap();
            assert_eq!(v.status, Status::NecessaryConditionsPassOnly);
            assert_eq!(v.dimension, Some(0));
        }
        let v = check_counting(&sym(3, 3, 4, 2)).unwrap();
        assert_eq!(v.status, Status::Infeasible);
        assert_eq!(v.certificates, vec![Certificate::SubsetCount { users: vec![1, 2, 3], t: -6 }]);

        let v = check_counting(&sym(4, 5, 5, 2)).unwrap();
        assert_eq!(v.status, Status::NecessaryConditionsPassOnly);
        assert_eq!(v.dimension, Some(0));
    }

    #[test]
    fn counting_caps_users() {
        let spec = sym(25, 2, 2, 1);
        assert!(matches!(check_counting(&spec), Err(Error::TooManyUsers { k: 25, .. })));
    }

    #[test]
    fn triple_examples() {
        let spec = ProblemSpec::new(vec![UserDims::new(1, 3, 1), UserDims::new(1, 3, 1), UserDims::new(1, 3, 1)]).unwrap();
        // Stated form 3 <= max(3, 2); reversed form 3 <= max(1, 6).
        assert!(check_triple(&spec, 0, 1, 2));

        let spec = sym(3, 2, 4, 2);
        assert!(!check_triple(&spec, 0, 1, 2));

        for d in 1..6 {
            assert!(check_triple(&sym(3, 2 * d, 2 * d, d), 0, 1, 2));
        }
    }

    #[test]
    fn path_bound_examples() {
        // r = 0: d_{i_2} <= M.
        assert!(check_path_bound(&sym(3, 1, 1, 1), &[0, 1]).unwrap());
        assert!(!check_path_bound(&sym(3, 1, 3, 2), &[0, 1]).unwrap());

        // r = 1: 3d <= max(N, 2M).
        assert!(check_path_bound(&sym(3, 3, 4, 2), &[0, 1, 2]).unwrap());
        assert!(!check_path_bound(&sym(3, 4, 8, 3), &[0, 1, 2]).unwrap());

        // r = 2: 5d <= max(2N, 3M).
        assert!(!check_path_bound(&sym(3, 3, 4, 2), &[0, 1, 2, 0]).unwrap());
        assert!(check_path_bound(&sym(3, 4, 8, 3), &[0, 1, 2, 0]).unwrap());
    }

    #[test]
    fn path_bound_hypotheses() {
        let spec = sym(3, 2, 2, 1);
        assert!(matches!(check_path_bound(&spec, &[0]), Err(Error::HypothesisViolated(_))));
        assert!(matches!(check_path_bound(&spec, &[0, 0]), Err(Error::HypothesisViolated(_))));
        assert!(matches!(check_path_bound(&spec, &[0, 1, 0]), Err(Error::HypothesisViolated(_))));
        assert!(matches!(check_path_bound(&spec, &[0, 1, 5]), Err(Error::HypothesisViolated(_))));
        // 1,2,3,1,2 repeats users without reusing a channel.
        assert!(check_path_bound(&sym(4, 2, 2, 1), &[0, 1, 2, 0, 1]).is_ok());
        // 1,2,3,4,1,3 would place H_13 on both diagonals.
        assert!(matches!(
            check_path_bound(&sym(4, 2, 2, 1), &[0, 1, 2, 3, 0, 2]),
            Err(Error::HypothesisViolated(_))
        ));
        let unequal = ProblemSpec::new(vec![UserDims::new(2, 3, 1), UserDims::new(3, 2, 1), UserDims::new(4, 5, 1)]).unwrap();
        assert!(matches!(check_path_bound(&unequal, &[0, 1, 2]), Err(Error::HypothesisViolated(_))));
    }

    #[test]
    fn three_user_examples() {
        assert!(decide_3user_symmetric(2, 2, 1).is_feasible());
        let v = decide_3user_symmetric(3, 5, 2);
        assert!(v.is_feasible());
        assert_eq!(v.dimension, Some(0));
        let v = decide_3user_symmetric(4, 8, 3);
        assert!(v.is_infeasible());
        assert_eq!(v.certificates, vec![Certificate::PathLength { r: 1, lhs: 9, rhs: 8 }]);
        assert_eq!(t_subset(&sym(3, 4, 8, 3), &[0, 1, 2]), 0);
    }

    #[test]
    fn three_user_small_n() {
        // N = 2d but M < 2d: fails once (r+1)M < (2r+1)d.
        let v = decide_3user_symmetric(3, 4, 2);
        assert_eq!(v.certificates, vec![Certificate::PathLength { r: 2, lhs: 10, rhs: 9 }]);
        // d > M fails at r = 0.
        let v = decide_3user_symmetric(1, 10, 2);
        assert_eq!(v.certificates, vec![Certificate::PathLength { r: 0, lhs: 2, rhs: 1 }]);
        // Both below 2d.
        assert!(decide_3user_symmetric(3, 3, 2).is_infeasible());
    }

    #[test]
    fn fully_symmetric_examples() {
        let v = decide_fully_symmetric(4, 5, 2).unwrap();
        assert!(v.is_feasible());
        assert_eq!(v.dimension, Some(0));
        assert!(decide_fully_symmetric(5, 2, 1).unwrap().is_infeasible());
        for d in 1..5 {
            let v = decide_fully_symmetric(3, 2 * d, d).unwrap();
            assert!(v.is_feasible());
            assert_eq!(v.dimension, Some(0));
        }
        assert!(matches!(decide_fully_symmetric(2, 4, 1), Err(Error::BadK(2))));
    }

    #[test]
    fn divisible_examples() {
        assert_eq!(decide_divisible(&sym(4, 5, 5, 2)).unwrap(), None);
        // Oracle: all 15 non-empty subsets of four users, by size a:
        // t = a * 16 - a(a-1) * 4 >= 0 for a <= 4.
        for a in 1..=4i64 {
            assert!(a * 16 - a * (a - 1) * 4 >= 0);
        }
        let v = decide_divisible(&sym(4, 6, 6, 2)).unwrap().unwrap();
        assert!(v.is_feasible());
        assert_eq!(v.dimension, Some(16));
        assert!(decide_divisible(&sym(3, 2, 2, 1)).unwrap().unwrap().is_feasible());
        let mixed = ProblemSpec::new(vec![UserDims::new(2, 2, 1), UserDims::new(4, 4, 2), UserDims::new(2, 2, 1)]).unwrap();
        assert_eq!(decide_divisible(&mixed).unwrap(), None);
    }

    #[test]
    fn dof_examples() {
        let m = max_dof_fully_symmetric(5, 3);
        assert_eq!((m.d, m.total), (1, 5));
        let m = max_dof_fully_symmetric(5, 2);
        assert_eq!((m.d, m.total), (0, 0));
        let m = max_dof_fully_symmetric(3, 2);
        assert_eq!((m.d, m.total, m.normalized), (1, 3, Ratio::new(3, 2)));

        assert_eq!(best_subset_dof(5, 2), SubsetDof { active: 3, d: 1, total: 3 });
        assert_eq!(best_subset_dof(5, 3), SubsetDof { active: 5, d: 1, total: 5 });
        assert_eq!(best_subset_dof(5, 1), SubsetDof { active: 1, d: 1, total: 1 });
    }

    #[test]
    fn assess_dispatch() {
        assert!(assess(&sym(3, 3, 5, 2), None).unwrap().is_feasible());
        assert!(assess(&sym(4, 5, 5, 2), None).unwrap().is_feasible());
        assert!(assess(&sym(4, 6, 6, 2), None).unwrap().is_feasible());
        let v = assess(&sym(4, 5, 7, 2), Some(6)).unwrap();
        assert_eq!(v.status, Status::NecessaryConditionsPassOnly);
        let asym = ProblemSpec::new(vec![UserDims::new(2, 2, 1), UserDims::new(2, 2, 1), UserDims::new(1, 2, 2)]).unwrap();
        assert!(assess(&asym, None).unwrap().is_infeasible());
    }

    #[test]
    fn admissible_sequences_for_three_users_are_cycles() {
        let seqs = admissible_sequences(&sym(3, 2, 2, 1), 5);
        // Two directions of travel from each start, for every length 2..=5.
        assert_eq!(seqs.len(), 4 * 6);
        for s in &seqs {
            for w in s.windows(2) {
                assert_ne!(w[0], w[1]);
            }
        }
    }
}
