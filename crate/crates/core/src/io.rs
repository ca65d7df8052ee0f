//! JSON file formats for channel sets and strategies.
//!
//! Matrices are stored as `{"rows", "cols", "re", "im"}` with entries in
//! row-major order. User indices in keys are 1-based: cross channels under
//! `"i,j"`, direct channels and strategy bases under `"i"`.

use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::channel::ChannelSet;
use crate::error::{Error, Result};
use crate::linalg::{c, CMatrix};
use crate::spec::ProblemSpec;
use crate::strategy::Strategy;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MatrixJson {
    pub rows: usize,
    pub cols: usize,
    pub re: Vec<f64>,
    pub im: Vec<f64>,
}

impl From<&CMatrix> for MatrixJson {
    fn from(m: &CMatrix) -> Self {
        let (rows, cols) = m.shape();
        let mut re = Vec::with_capacity(rows * cols);
        let mut im = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                re.push(m[(i, j)].re);
                im.push(m[(i, j)].im);
            }
        }
        Self { rows, cols, re, im }
    }
}

impl TryFrom<&MatrixJson> for CMatrix {
    type Error = Error;

    fn try_from(m: &MatrixJson) -> Result<Self> {
        let n = m.rows * m.cols;
        if m.re.len() != n || m.im.len() != n {
            return Err(Error::ShapeMismatch(format!(
                "{}x{} matrix with {} real and {} imaginary entries",
                m.rows,
                m.cols,
                m.re.len(),
                m.im.len()
            )));
        }
        let data: Vec<_> = m.re.iter().zip(&m.im).map(|(&a, &b)| c(a, b)).collect();
        Ok(CMatrix::from_row_slice(m.rows, m.cols, &data))
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ChannelFile {
    pub spec: ProblemSpec,
    pub seed: Option<u64>,
    pub cross: BTreeMap<String, MatrixJson>,
    #[serde(default)]
    pub direct: BTreeMap<String, MatrixJson>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct StrategyFile {
    pub spec: ProblemSpec,
    #[serde(rename = "U")]
    pub u: BTreeMap<String, MatrixJson>,
    #[serde(rename = "V")]
    pub v: BTreeMap<String, MatrixJson>,
}

fn lookup(map: &BTreeMap<String, MatrixJson>, key: &str) -> Result<CMatrix> {
    map.get(key)
        .ok_or_else(|| Error::ShapeMismatch(format!("missing matrix \"{key}\"")))
        .and_then(CMatrix::try_from)
}

impl From<&ChannelSet> for ChannelFile {
    fn from(ch: &ChannelSet) -> Self {
        let cross = ch
            .cross_iter()
            .map(|(i, j, h)| (format!("{},{}", i + 1, j + 1), MatrixJson::from(h)))
            .collect();
        let direct = (0..ch.k())
            .filter_map(|i| ch.direct(i).map(|h| ((i + 1).to_string(), MatrixJson::from(h))))
            .collect();
        Self { spec: ch.spec().clone(), seed: ch.seed(), cross, direct }
    }
}

impl TryFrom<&ChannelFile> for ChannelSet {
    type Error = Error;

    fn try_from(f: &ChannelFile) -> Result<Self> {
        let k = f.spec.k();
        let mut cross = vec![vec![CMatrix::zeros(0, 0); k]; k];
        for (i, row) in cross.iter_mut().enumerate() {
            for (j, slot) in row.iter_mut().enumerate() {
                if i != j {
                    *slot = lookup(&f.cross, &format!("{},{}", i + 1, j + 1))?;
                }
            }
        }
        let direct = if f.direct.is_empty() {
            None
        } else {
            Some((0..k).map(|i| lookup(&f.direct, &(i + 1).to_string())).collect::<Result<Vec<_>>>()?)
        };
        ChannelSet::new(f.spec.clone(), cross, direct, f.seed)
    }
}

impl StrategyFile {
    pub fn from_strategy(spec: &ProblemSpec, s: &Strategy) -> Self {
        let key = |i: usize| (i + 1).to_string();
        Self {
            spec: spec.clone(),
            u: s.u.iter().enumerate().map(|(i, m)| (key(i), MatrixJson::from(m))).collect(),
            v: s.v.iter().enumerate().map(|(i, m)| (key(i), MatrixJson::from(m))).collect(),
        }
    }

    pub fn to_strategy(&self) -> Result<Strategy> {
        let k = self.spec.k();
        let u = (0..k).map(|i| lookup(&self.u, &(i + 1).to_string())).collect::<Result<Vec<_>>>()?;
        let v = (0..k).map(|i| lookup(&self.v, &(i + 1).to_string())).collect::<Result<Vec<_>>>()?;
        let s = Strategy::new(u, v);
        s.check_shapes(&self.spec)?;
        Ok(s)
    }
}

pub fn read_channels(path: &Path) -> Result<ChannelSet> {
    let text = std::fs::read_to_string(path)?;
    let file: ChannelFile = serde_json::from_str(&text)?;
    ChannelSet::try_from(&file)
}

pub fn write_channels(path: &Path, ch: &ChannelSet) -> Result<()> {
    std::fs::write(path, serde_json::to_string_pretty(&ChannelFile::from(ch))?)?;
    Ok(())
}

pub fn read_strategy(path: &Path) -> Result<(ProblemSpec, Strategy)> {
    let text = std::fs::read_to_string(path)?;
    let file: StrategyFile = serde_json::from_str(&text)?;
    let s = file.to_strategy()?;
    Ok((file.spec, s))
}

pub fn write_strategy(path: &Path, spec: &ProblemSpec, s: &Strategy) -> Result<()> {
    std::fs::write(path, serde_json::to_string_pretty(&StrategyFile::from_strategy(spec, s))?)?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::generate_channels;
    use proptest::prelude::*;

    #[test]
    fn channel_file_layout() {
        let spec = ProblemSpec::symmetric(2, 2, 3, 1).unwrap();
        let ch = generate_channels(&spec, 11);
        let v = serde_json::to_value(ChannelFile::from(&ch)).unwrap();
        assert_eq!(v["seed"], 11);
        assert_eq!(v["spec"]["K"], 2);
        assert_eq!(v["cross"]["1,2"]["rows"], 3);
        assert_eq!(v["cross"]["1,2"]["cols"], 2);
        // Row-major: second stored entry is (0, 1).
        assert_eq!(v["cross"]["1,2"]["re"][1].as_f64().unwrap(), ch.cross(0, 1)[(0, 1)].re);
        assert!(v["direct"]["2"].is_object());
        let back: ChannelFile = serde_json::from_value(v).unwrap();
        assert_eq!(ChannelSet::try_from(&back).unwrap(), ch);
    }

    #[test]
    fn rejects_truncated_matrix() {
        let m = MatrixJson { rows: 2, cols: 2, re: vec![0.0; 3], im: vec![0.0; 4] };
        assert!(CMatrix::try_from(&m).is_err());
    }

    #[test]
    fn missing_direct_reads_as_none() {
        let spec = ProblemSpec::symmetric(2, 1, 1, 1).unwrap();
        let ch = generate_channels(&spec, 1).without_direct();
        let text = serde_json::to_string(&ChannelFile::from(&ch)).unwrap();
        let back: ChannelFile = serde_json::from_str(&text).unwrap();
        assert!(!ChannelSet::try_from(&back).unwrap().has_direct());
    }

    proptest! {
        #[test]
        fn matrix_roundtrip(rows in 0usize..5, cols in 0usize..5, seed in any::<u64>()) {
            use rand::SeedableRng;
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
            let m = crate::linalg::random_gaussian(rows, cols, &mut rng);
            let back = CMatrix::try_from(&MatrixJson::from(&m)).unwrap();
            prop_assert_eq!(back, m);
        }
    }
}
