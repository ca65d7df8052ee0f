use crate::error::{Error, Result};
use crate::linalg::CMatrix;
use crate::spec::ProblemSpec;

/// Transmit bases `U_i` (`M_i x d_i`) and receive bases `V_i` (`N_i x d_i`).
/// Alignment asks for `V_i^dagger H_ij U_j = 0` whenever `i != j`.
#[derive(Debug, Clone, PartialEq)]
pub struct Strategy {
    pub u: Vec<CMatrix>,
    pub v: Vec<CMatrix>,
}

impl Strategy {
    pub fn new(u: Vec<CMatrix>, v: Vec<CMatrix>) -> Self {
        Self { u, v }
    }

    pub fn k(&self) -> usize {
        self.u.len()
    }

    /// Check that every basis has the shape the problem declares.
    pub fn check_shapes(&self, spec: &ProblemSpec) -> Result<()> {
        if self.u.len() != spec.k() || self.v.len() != spec.k() {
            return Err(Error::ShapeMismatch(format!(
                "strategy has {}/{} bases for K = {}",
                self.u.len(),
                self.v.len(),
                spec.k()
            )));
        }
        for (i, user) in spec.users().iter().enumerate() {
            if self.u[i].shape() != (user.m, user.d) {
                return Err(Error::ShapeMismatch(format!(
                    "U_{} is {:?}, expected {:?}",
                    i + 1,
                    self.u[i].shape(),
                    (user.m, user.d)
                )));
            }
            if self.v[i].shape() != (user.n, user.d) {
                return Err(Error::ShapeMismatch(format!(
                    "V_{} is {:?}, expected {:?}",
                    i + 1,
                    self.v[i].shape(),
                    (user.n, user.d)
                )));
            }
        }
        Ok(())
    }

    /// Largest principal angle over all corresponding subspaces.
    pub fn distance(&self, other: &Strategy) -> Result<f64> {
        if self.k() != other.k() {
            return Err(Error::ShapeMismatch("strategies for different user counts".into()));
        }
        let mut worst = 0.0f64;
        for (a, b) in self.u.iter().zip(&other.u).chain(self.v.iter().zip(&other.v)) {
            worst = worst.max(crate::linalg::principal_angle(a, b)?);
        }
        Ok(worst)
    }
}
