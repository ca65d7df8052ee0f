//! Channel sets and their seeded generation.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::linalg::{max_abs, random_gaussian, CMatrix};
use crate::spec::ProblemSpec;

/// Cross channels `H_ij` (`N_i x M_j`, `i != j`) and optional direct channels
/// `H_ii` (`N_i x M_i`). Indices are 0-based.
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelSet {
    spec: ProblemSpec,
    cross: Vec<Option<CMatrix>>,
    direct: Option<Vec<CMatrix>>,
    seed: Option<u64>,
}

impl ChannelSet {
    /// Assemble from explicit matrices. `cross` is indexed `[i][j]`; diagonal
    /// entries are ignored.
    pub fn new(
        spec: ProblemSpec,
        cross: Vec<Vec<CMatrix>>,
        direct: Option<Vec<CMatrix>>,
        seed: Option<u64>,
    ) -> Result<Self> {
        let k = spec.k();
        if cross.len() != k || cross.iter().any(|row| row.len() != k) {
            return Err(Error::ShapeMismatch(format!("cross channels must be indexed {k}x{k}")));
        }
        let mut flat = Vec::with_capacity(k * k);
        for (i, row) in cross.into_iter().enumerate() {
            for (j, h) in row.into_iter().enumerate() {
                flat.push(if i == j { None } else { Some(h) });
            }
        }
        Self::from_flat(spec, flat, direct, seed)
    }

    pub(crate) fn from_flat(
        spec: ProblemSpec,
        cross: Vec<Option<CMatrix>>,
        direct: Option<Vec<CMatrix>>,
        seed: Option<u64>,
    ) -> Result<Self> {
        let k = spec.k();
        for i in 0..k {
            for j in 0..k {
                if i == j {
                    continue;
                }
                let want = (spec.user(i).n, spec.user(j).m);
                match &cross[i * k + j] {
                    Some(h) if h.shape() == want => {}
                    Some(h) => {
                        return Err(Error::ShapeMismatch(format!(
                            "H[{},{}] is {:?}, expected {:?}",
                            i + 1,
                            j + 1,
                            h.shape(),
                            want
                        )))
                    }
                    None => {
                        return Err(Error::ShapeMismatch(format!("missing H[{},{}]", i + 1, j + 1)))
                    }
                }
            }
        }
        if let Some(direct) = &direct {
            if direct.len() != k {
                return Err(Error::ShapeMismatch(format!("expected {k} direct channels, got {}", direct.len())));
            }
            for (i, h) in direct.iter().enumerate() {
                let want = (spec.user(i).n, spec.user(i).m);
                if h.shape() != want {
                    return Err(Error::ShapeMismatch(format!(
                        "H[{},{}] is {:?}, expected {:?}",
                        i + 1,
                        i + 1,
                        h.shape(),
                        want
                    )));
                }
            }
        }
        let mut cross = cross;
        for i in 0..k {
            cross[i * k + i] = None;
        }
        Ok(Self { spec, cross, direct, seed })
    }

    pub fn spec(&self) -> &ProblemSpec {
        &self.spec
    }

    pub fn k(&self) -> usize {
        self.spec.k()
    }

    pub fn seed(&self) -> Option<u64> {
        self.seed
    }

    /// Cross channel from transmitter `j` to receiver `i`, `i != j`.
    pub fn cross(&self, i: usize, j: usize) -> &CMatrix {
        assert_ne!(i, j, "cross channel needs distinct users");
        self.cross[i * self.k() + j].as_ref().expect("validated at construction")
    }

    pub fn direct(&self, i: usize) -> Option<&CMatrix> {
        self.direct.as_ref().map(|d| &d[i])
    }

    pub fn has_direct(&self) -> bool {
        self.direct.is_some()
    }

    /// Iterate `(i, j, H_ij)` over ordered pairs `i != j`, lexicographically.
    pub fn cross_iter(&self) -> impl Iterator<Item = (usize, usize, &CMatrix)> {
        let k = self.k();
        self.cross
            .iter()
            .enumerate()
            .filter_map(move |(idx, h)| h.as_ref().map(|h| (idx / k, idx % k, h)))
    }

    /// Largest entry modulus over all cross channels.
    pub fn max_cross_magnitude(&self) -> f64 {
        self.cross_iter().map(|(_, _, h)| max_abs(h)).fold(0.0, f64::max)
    }

    /// Replace one cross channel, keeping its shape.
    pub fn with_cross(mut self, i: usize, j: usize, h: CMatrix) -> Result<Self> {
        if h.shape() != self.cross(i, j).shape() {
            return Err(Error::ShapeMismatch(format!("replacement for H[{},{}] has shape {:?}", i + 1, j + 1, h.shape())));
        }
        let k = self.k();
        self.cross[i * k + j] = Some(h);
        Ok(self)
    }

    pub fn without_direct(mut self) -> Self {
        self.direct = None;
        self
    }

    pub fn with_direct(self, direct: Vec<CMatrix>) -> Result<Self> {
        Self::from_flat(self.spec, self.cross, Some(direct), self.seed)
    }

    /// Channel set of the reciprocal network: `H'_ji = H_ij^dagger`.
    pub fn reciprocal(&self) -> Self {
        let k = self.k();
        let mut cross = vec![None; k * k];
        for (i, j, h) in self.cross_iter() {
            cross[j * k + i] = Some(h.adjoint());
        }
        let direct = self.direct.as_ref().map(|d| d.iter().map(|h| h.adjoint()).collect());
        Self::from_flat(self.spec.reciprocal(), cross, direct, self.seed).expect("shapes transpose consistently")
    }

    /// Every channel multiplied by the same scalar.
    pub fn scaled(&self, factor: num_complex::Complex64) -> Self {
        let mut out = self.clone();
        for h in out.cross.iter_mut().flatten() {
            *h *= factor;
        }
        if let Some(d) = out.direct.as_mut() {
            for h in d.iter_mut() {
                *h *= factor;
            }
        }
        out
    }

    /// Restrict every user to its leading `m` transmit and `n` receive
    /// coordinates.
    pub fn restricted(&self, m: usize, n: usize) -> Result<Self> {
        let k = self.k();
        let users = self
            .spec
            .users()
            .iter()
            .map(|u| {
                if m > u.m || n > u.n {
                    Err(Error::ShapeMismatch(format!("cannot restrict {}x{} to {n}x{m}", u.n, u.m)))
                } else {
                    Ok(crate::spec::UserDims::new(m, n, u.d))
                }
            })
            .collect::<Result<Vec<_>>>()?;
        let spec = ProblemSpec::new(users)?;
        let mut cross = vec![None; k * k];
        for (i, j, h) in self.cross_iter() {
            cross[i * k + j] = Some(h.view((0, 0), (n, m)).into_owned());
        }
        let direct = self
            .direct
            .as_ref()
            .map(|d| d.iter().map(|h| h.view((0, 0), (n, m)).into_owned()).collect());
        Self::from_flat(spec, cross, direct, self.seed)
    }
}

/// Fill every channel with i.i.d. standard complex Gaussian entries.
///
/// The stream is a ChaCha8 generator seeded with `seed`. Cross channels are
/// drawn first in lexicographic `(i, j)` order, then the direct channels
/// `H_11, ..., H_KK`; each matrix is drawn row-major, real part before
/// imaginary part, each part `N(0, 1/2)`.
pub fn generate_channels(spec: &ProblemSpec, seed: u64) -> ChannelSet {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let k = spec.k();
    let mut cross = vec![None; k * k];
    for i in 0..k {
        for j in 0..k {
            if i != j {
                cross[i * k + j] = Some(random_gaussian(spec.user(i).n, spec.user(j).m, &mut rng));
            }
        }
    }
    let direct = (0..k)
        .map(|i| random_gaussian(spec.user(i).n, spec.user(i).m, &mut rng))
        .collect();
    ChannelSet::from_flat(spec.clone(), cross, Some(direct), Some(seed)).expect("generated shapes are consistent")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spec::UserDims;

    #[test]
    fn shapes_and_determinism() {
        let spec = ProblemSpec::symmetric(3, 2, 2, 1).unwrap();
        let a = generate_channels(&spec, 7);
        let b = generate_channels(&spec, 7);
        assert_eq!(a, b);
        assert_eq!(a.cross_iter().count(), 6);
        assert!(a.cross_iter().all(|(_, _, h)| h.shape() == (2, 2)));
        assert!((0..3).all(|i| a.direct(i).unwrap().shape() == (2, 2)));
        assert_eq!(a.seed(), Some(7));
    }

    #[test]
    fn asymmetric_shapes() {
        let spec = ProblemSpec::new(vec![UserDims::new(1, 3, 1), UserDims::new(2, 1, 1)]).unwrap();
        let ch = generate_channels(&spec, 0);
        assert_eq!(ch.cross(0, 1).shape(), (3, 2));
        assert_eq!(ch.cross(1, 0).shape(), (1, 1));
    }

    #[test]
    fn seeds_differ() {
        let spec = ProblemSpec::new(vec![UserDims::new(1, 3, 1), UserDims::new(2, 1, 1)]).unwrap();
        assert_ne!(generate_channels(&spec, 0), generate_channels(&spec, 1));
    }

    #[test]
    fn reciprocal_swaps() {
        let spec = ProblemSpec::new(vec![UserDims::new(1, 3, 1), UserDims::new(2, 1, 1)]).unwrap();
        let ch = generate_channels(&spec, 2);
        let r = ch.reciprocal();
        assert_eq!(r.spec().user(0), UserDims::new(3, 1, 1));
        assert_eq!(r.cross(1, 0), &ch.cross(0, 1).adjoint());
    }

    #[test]
    fn rejects_bad_shapes() {
        let spec = ProblemSpec::symmetric(2, 2, 2, 1).unwrap();
        let ok = CMatrix::zeros(2, 2);
        let bad = CMatrix::zeros(3, 2);
        let cross = vec![vec![ok.clone(), bad], vec![ok.clone(), ok.clone()]];
        assert!(ChannelSet::new(spec, cross, None, None).is_err());
    }
}
