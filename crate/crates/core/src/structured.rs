//! Qubit moment operators as products of diagonal and Hadamard-conjugated
//! diagonal blocks, applied without forming dense matrices.
//!
//! On `2tN` qubits `H_N^{⊗t,t} = H^{⊗2tN}` because the Hadamard matrix is
//! real, so conjugating a diagonal `D` gives `(W D W)_{ab} = f(a ⊕ b)` with
//! `f` the Walsh–Hadamard transform of `D` divided by the dimension.

use crate::budget::Budget;
use crate::error::{Error, Result};
use crate::linalg::{ComplexMatrix, C64, ZERO};
use rayon::prelude::*;

/// Diagonal entries at or below this modulus are treated as exact zeros,
/// absorbing roundoff from averaging over complete sets of roots of unity.
pub const SUPPORT_TOL: f64 = 1e-12;

/// In-place unnormalised Walsh–Hadamard transform; length must be a power of 2.
pub fn walsh_hadamard(v: &mut [C64]) {
    let n = v.len();
    assert!(n.is_power_of_two());
    let mut h = 1;
    while h < n {
        for chunk in v.chunks_mut(2 * h) {
            let (a, b) = chunk.split_at_mut(h);
            for (x, y) in a.iter_mut().zip(b.iter_mut()) {
                let (p, q) = (*x, *y);
                *x = p + q;
                *y = p - q;
            }
        }
        h *= 2;
    }
}

/// `f` with `(W diag(v) W)_{ab} = f[a ⊕ b]`.
pub fn conjugation_kernel(diag: &[C64]) -> Vec<C64> {
    let mut f = diag.to_vec();
    walsh_hadamard(&mut f);
    let s = 1.0 / diag.len() as f64;
    f.iter_mut().for_each(|x| *x *= s);
    f
}

#[derive(Clone, Debug, PartialEq)]
pub enum Block {
    Diagonal(Vec<C64>),
    /// `W diag(v) W`.
    Conjugated(Vec<C64>),
}

impl Block {
    pub fn len(&self) -> usize {
        match self {
            Block::Diagonal(v) | Block::Conjugated(v) => v.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn apply(&self, v: &mut [C64]) {
        match self {
            Block::Diagonal(d) => v.iter_mut().zip(d).for_each(|(x, y)| *x *= y),
            Block::Conjugated(d) => {
                walsh_hadamard(v);
                v.iter_mut().zip(d).for_each(|(x, y)| *x *= y);
                walsh_hadamard(v);
                let s = 1.0 / v.len() as f64;
                v.iter_mut().for_each(|x| *x *= s);
            }
        }
    }
}

/// `blocks[n-1] ⋯ blocks[1] blocks[0]`.
#[derive(Clone, Debug, PartialEq)]
pub struct BlockProduct {
    pub blocks: Vec<Block>,
}

impl BlockProduct {
    pub fn new(blocks: Vec<Block>) -> Result<Self> {
        let n = blocks.first().map(Block::len).ok_or_else(|| Error::invalid("empty block product"))?;
        if !n.is_power_of_two() || blocks.iter().any(|b| b.len() != n) {
            return Err(Error::DimensionMismatch("blocks must share a power-of-two length".into()));
        }
        Ok(BlockProduct { blocks })
    }

    pub fn dim(&self) -> usize {
        self.blocks[0].len()
    }

    pub fn apply(&self, v: &mut [C64]) {
        for b in &self.blocks {
            b.apply(v);
        }
    }

    pub fn column(&self, j: usize) -> Vec<C64> {
        let mut v = vec![ZERO; self.dim()];
        v[j] = C64::new(1.0, 0.0);
        self.apply(&mut v);
        v
    }

    pub fn to_dense(&self, budget: &Budget) -> Result<ComplexMatrix> {
        budget.check_dense(self.dim() as u128)?;
        let n = self.dim();
        let cols: Vec<Vec<C64>> = (0..n).into_par_iter().map(|j| self.column(j)).collect();
        Ok(ComplexMatrix::from_fn(n, |i, j| cols[j][i]))
    }

    /// Entrywise max difference, one column at a time.
    pub fn max_abs_diff(&self, other: &Self) -> Result<f64> {
        if self.dim() != other.dim() {
            return Err(Error::DimensionMismatch("block products of different size".into()));
        }
        Ok((0..self.dim())
            .into_par_iter()
            .map(|j| {
                let (a, b) = (self.column(j), other.column(j));
                a.iter().zip(&b).fold(0.0, |m: f64, (x, y)| m.max((x - y).norm()))
            })
            .reduce(|| 0.0, f64::max))
    }

    /// Labels where the outermost diagonal blocks exceed [`SUPPORT_TOL`] in
    /// modulus. The product vanishes outside `support × support` when both
    /// ends are diagonal and share a support.
    pub fn end_support(&self) -> Option<Vec<usize>> {
        let (Block::Diagonal(first), Block::Diagonal(last)) = (&self.blocks[0], self.blocks.last()?) else {
            return None;
        };
        let s: Vec<usize> = (0..first.len()).filter(|&i| first[i].norm() > SUPPORT_TOL || last[i].norm() > SUPPORT_TOL).collect();
        Some(s)
    }

    /// The block `⟨a|M|b⟩` for `a, b ∈ labels`.
    pub fn compressed(&self, labels: &[usize]) -> ComplexMatrix {
        let cols: Vec<Vec<C64>> = labels
            .par_iter()
            .map(|&b| {
                let c = self.column(b);
                labels.iter().map(|&a| c[a]).collect()
            })
            .collect();
        ComplexMatrix::from_fn(labels.len(), |i, j| cols[j][i])
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{hadamard, kron_power};

    #[test]
    fn kernel_matches_dense_conjugation() {
        let n = 4;
        let w = kron_power(&hadamard(), n);
        let diag: Vec<C64> = (0..16).map(|i| C64::from_polar(1.0, 0.37 * i as f64)).collect();
        let dense = w.mul(&ComplexMatrix::from_diagonal(&diag)).mul(&w);
        let f = conjugation_kernel(&diag);
        for a in 0..16 {
            for b in 0..16 {
                assert!((dense.get(a, b) - f[a ^ b]).norm() < 1e-13);
            }
        }
        let prod = BlockProduct::new(vec![Block::Conjugated(diag.clone())]).unwrap();
        assert!(prod.to_dense(&Budget::default()).unwrap().max_abs_diff(&dense) < 1e-13);
    }
}
