//! Problem instances: user count and per-user antenna and stream counts.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Antennas and transmit dimensions of one transmitter/receiver pair.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct UserDims {
    /// Transmit antennas.
    #[serde(rename = "M")]
    pub m: usize,
    /// Receive antennas.
    #[serde(rename = "N")]
    pub n: usize,
    /// Transmit dimensions (streams).
    pub d: usize,
}

impl UserDims {
    pub fn new(m: usize, n: usize, d: usize) -> Self {
        Self { m, n, d }
    }
}

/// An alignment instance `(K; M_i, N_i, d_i)`. Users are 1-based in all
/// public interfaces and 0-based in `users`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "RawSpec", into = "RawSpec")]
pub struct ProblemSpec {
    users: Vec<UserDims>,
}

#[derive(Serialize, Deserialize)]
struct RawSpec {
    #[serde(rename = "K")]
    k: usize,
    users: Vec<UserDims>,
}

impl TryFrom<RawSpec> for ProblemSpec {
    type Error = Error;

    fn try_from(raw: RawSpec) -> Result<Self> {
        if raw.k != raw.users.len() {
            return Err(Error::InvalidSpec(format!(
                "K = {} but {} users listed",
                raw.k,
                raw.users.len()
            )));
        }
        ProblemSpec::new(raw.users)
    }
}

impl From<ProblemSpec> for RawSpec {
    fn from(spec: ProblemSpec) -> Self {
        RawSpec { k: spec.k(), users: spec.users }
    }
}

impl ProblemSpec {
    pub fn new(users: Vec<UserDims>) -> Result<Self> {
        if users.len() < 2 {
            return Err(Error::InvalidSpec(format!("need K >= 2 users, got {}", users.len())));
        }
        if let Some((i, u)) = users
            .iter()
            .enumerate()
            .find(|(_, u)| u.m == 0 || u.n == 0 || u.d == 0)
        {
            return Err(Error::InvalidSpec(format!(
                "user {} has a zero dimension: M={}, N={}, d={}",
                i + 1,
                u.m,
                u.n,
                u.d
            )));
        }
        Ok(Self { users })
    }

    /// `K` users, each with `M` transmit and `N` receive antennas and `d` streams.
    pub fn symmetric(k: usize, m: usize, n: usize, d: usize) -> Result<Self> {
        Self::new(vec![UserDims::new(m, n, d); k])
    }

    pub fn k(&self) -> usize {
        self.users.len()
    }

    pub fn users(&self) -> &[UserDims] {
        &self.users
    }

    /// Dimensions of user `i` (0-based).
    pub fn user(&self, i: usize) -> UserDims {
        self.users[i]
    }

    pub fn is_symmetric(&self) -> bool {
        let first = self.users[0];
        self.users.iter().all(|u| *u == first)
    }

    /// True when all `M_i` agree and all `N_i` agree (streams may differ).
    pub fn equal_antennas(&self) -> bool {
        let first = self.users[0];
        self.users.iter().all(|u| u.m == first.m && u.n == first.n)
    }

    /// Dimension of the strategy space, `sum_i d_i(M_i - d_i) + d_i(N_i - d_i)`.
    /// Negative contributions mean the Grassmannian is empty.
    pub fn strategy_dimension(&self) -> i64 {
        self.users
            .iter()
            .map(|u| {
                let (m, n, d) = (u.m as i64, u.n as i64, u.d as i64);
                d * (m - d) + d * (n - d)
            })
            .sum()
    }

    /// Number of scalar alignment equations, `sum_{i != j} d_i d_j`.
    pub fn equation_count(&self) -> i64 {
        let total: i64 = self.users.iter().map(|u| u.d as i64).sum();
        let squares: i64 = self.users.iter().map(|u| (u.d * u.d) as i64).sum();
        total * total - squares
    }

    /// The reciprocal network: transmit and receive antenna counts swap.
    pub fn reciprocal(&self) -> Self {
        Self {
            users: self.users.iter().map(|u| UserDims::new(u.n, u.m, u.d)).collect(),
        }
    }
}
