//! Joint strategy points with explicit per-player block structure.

use nalgebra::DVector;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A joint point `x = (x^1, ..., x^N)`, one real vector per player.
///
/// Two-player games use blocks `[u, v]`. Block dimensions are fixed at
/// construction; all arithmetic preserves them.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct JointPoint {
    blocks: Vec<DVector<f64>>,
}

impl JointPoint {
    pub fn new(blocks: Vec<DVector<f64>>) -> Self {
        assert!(!blocks.is_empty(), "a point needs at least one block");
        Self { blocks }
    }

    /// Two-player constructor, blocks `(u, v)`.
    pub fn two_player(u: DVector<f64>, v: DVector<f64>) -> Self {
        Self::new(vec![u, v])
    }

    /// Two-player point with scalar blocks.
    pub fn scalar(u: f64, v: f64) -> Self {
        Self::two_player(DVector::from_element(1, u), DVector::from_element(1, v))
    }

    /// Zero point with the given block dimensions.
    pub fn zeros(dims: &[usize]) -> Self {
        Self::new(dims.iter().map(|&d| DVector::zeros(d)).collect())
    }

    /// Build from a stacked vector, splitting at the given block dimensions.
    pub fn from_stacked(stacked: &DVector<f64>, dims: &[usize]) -> Self {
        assert_eq!(stacked.len(), dims.iter().sum::<usize>());
        let mut blocks = Vec::with_capacity(dims.len());
        let mut offset = 0;
        for &d in dims {
            blocks.push(DVector::from_column_slice(
                &stacked.as_slice()[offset..offset + d],
            ));
            offset += d;
        }
        Self::new(blocks)
    }

    pub fn num_blocks(&self) -> usize {
        self.blocks.len()
    }

    pub fn block(&self, i: usize) -> &DVector<f64> {
        &self.blocks[i]
    }

    pub fn block_mut(&mut self, i: usize) -> &mut DVector<f64> {
        &mut self.blocks[i]
    }

    pub fn blocks(&self) -> &[DVector<f64>] {
        &self.blocks
    }

    pub fn dims(&self) -> Vec<usize> {
        self.blocks.iter().map(DVector::len).collect()
    }

    /// Total dimension (sum of block dimensions).
    pub fn dim(&self) -> usize {
        self.blocks.iter().map(DVector::len).sum()
    }

    /// First block; `u` in the two-player case.
    pub fn u(&self) -> &DVector<f64> {
        &self.blocks[0]
    }

    /// Second block; `v` in the two-player case.
    pub fn v(&self) -> &DVector<f64> {
        &self.blocks[1]
    }

    /// Concatenate the blocks into one vector.
    pub fn stacked(&self) -> DVector<f64> {
        let mut out = DVector::zeros(self.dim());
        let mut offset = 0;
        for b in &self.blocks {
            out.rows_mut(offset, b.len()).copy_from(b);
            offset += b.len();
        }
        out
    }

    /// Check this point's block dimensions against `dims`, naming the
    /// offending block on mismatch.
    pub fn check_dims(&self, dims: &[usize]) -> Result<()> {
        if self.num_blocks() != dims.len() {
            return Err(Error::DimensionMismatch {
                block: "block count".to_string(),
                expected: dims.len(),
                got: self.num_blocks(),
            });
        }
        for (i, (b, &d)) in self.blocks.iter().zip(dims).enumerate() {
            if b.len() != d {
                return Err(Error::DimensionMismatch {
                    block: block_name(i, dims.len()),
                    expected: d,
                    got: b.len(),
                });
            }
        }
        Ok(())
    }

    pub fn is_finite(&self) -> bool {
        self.blocks.iter().all(|b| b.iter().all(|x| x.is_finite()))
    }

    /// `self + s * other`, blockwise.
    pub fn axpy(&mut self, s: f64, other: &JointPoint) {
        for (a, b) in self.blocks.iter_mut().zip(&other.blocks) {
            a.axpy(s, b, 1.0);
        }
    }

    pub fn sub(&self, other: &JointPoint) -> JointPoint {
        let mut out = self.clone();
        out.axpy(-1.0, other);
        out
    }

    pub fn add(&self, other: &JointPoint) -> JointPoint {
        let mut out = self.clone();
        out.axpy(1.0, other);
        out
    }

    pub fn scale(&self, s: f64) -> JointPoint {
        Self::new(self.blocks.iter().map(|b| b * s).collect())
    }

    /// Plain Euclidean inner product of the stacked vectors.
    pub fn dot(&self, other: &JointPoint) -> f64 {
        self.blocks
            .iter()
            .zip(&other.blocks)
            .map(|(a, b)| a.dot(b))
            .sum()
    }

    /// Largest absolute coordinate difference to `other`.
    pub fn max_abs_diff(&self, other: &JointPoint) -> f64 {
        self.blocks
            .iter()
            .zip(&other.blocks)
            .map(|(a, b)| (a - b).amax())
            .fold(0.0, f64::max)
    }
}

/// Human-readable block name: `u`/`v` for two-player points, `x^i` otherwise.
pub fn block_name(i: usize, n_blocks: usize) -> String {
    if n_blocks == 2 {
        if i == 0 {
            "u".to_string()
        } else {
            "v".to_string()
        }
    } else {
        format!("x^{i}")
    }
}
