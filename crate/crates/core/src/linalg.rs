//! Dense complex matrices, tensor powers, Hermitian eigenvalues and Haar sampling.

use crate::budget::{pow_u128, Budget};
use crate::error::{Error, Result};
use crate::rng::complex_normal;
use rand::Rng;
use rayon::prelude::*;

pub use num_complex::Complex64 as C64;

pub const ZERO: C64 = C64 { re: 0.0, im: 0.0 };
pub const ONE: C64 = C64 { re: 1.0, im: 0.0 };

/// QL sweeps allowed per eigenvalue before [`Error::NonConvergence`].
pub const QL_ITERATION_CAP: usize = 60;
/// Jacobi sweeps allowed in [`symmetric_eigen`].
pub const JACOBI_SWEEP_CAP: usize = 100;

/// Index layout of `U^{⊗t,t} = U^{⊗t} ⊗ U*^{⊗t}` on `(C^d)^{⊗2t}`.
///
/// A basis label is `(k, l)` with `k, l ∈ [0,d)^t`; `k` indexes the t
/// unconjugated factors and `l` the t conjugated ones. The flat index reads
/// `k_1 … k_t l_1 … l_t` as a base-d number with `k_1` most significant.
/// For qubit registers (`d = 2^N`) the same rule applies one level down:
/// qubit 1 is the most significant bit of each `k_s`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct TensorLayout {
    pub d: usize,
    pub t: usize,
}

impl TensorLayout {
    pub fn new(d: usize, t: usize) -> Self {
        TensorLayout { d, t }
    }

    /// `d^t`, the size of one half.
    pub fn half(&self) -> usize {
        self.d.pow(self.t as u32)
    }

    /// `d^{2t}`.
    pub fn dim(&self) -> usize {
        self.half() * self.half()
    }

    pub fn encode(&self, digits: &[usize]) -> usize {
        digits.iter().fold(0, |acc, &x| acc * self.d + x)
    }

    pub fn decode(&self, mut code: usize, out: &mut [usize]) {
        for x in out.iter_mut().rev() {
            *x = code % self.d;
            code /= self.d;
        }
    }

    pub fn index(&self, k: &[usize], l: &[usize]) -> usize {
        self.encode(k) * self.half() + self.encode(l)
    }

    pub fn split(&self, index: usize) -> (Vec<usize>, Vec<usize>) {
        let mut k = vec![0; self.t];
        let mut l = vec![0; self.t];
        self.decode(index / self.half(), &mut k);
        self.decode(index % self.half(), &mut l);
        (k, l)
    }
}

/// Square complex matrix, row-major.
#[derive(Clone, Debug, PartialEq)]
pub struct ComplexMatrix {
    dim: usize,
    data: Vec<C64>,
}

impl ComplexMatrix {
    pub fn new(dim: usize, data: Vec<C64>) -> Result<Self> {
        if dim == 0 || data.len() != dim * dim {
            return Err(Error::DimensionMismatch(format!(
                "{} entries for dimension {dim}",
                data.len()
            )));
        }
        Ok(ComplexMatrix { dim, data })
    }

    pub fn zeros(dim: usize) -> Self {
        assert!(dim >= 1);
        ComplexMatrix { dim, data: vec![ZERO; dim * dim] }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            m.data[i * dim + i] = ONE;
        }
        m
    }

    pub fn from_fn(dim: usize, f: impl Fn(usize, usize) -> C64 + Sync) -> Self {
        assert!(dim >= 1);
        let mut data = vec![ZERO; dim * dim];
        data.par_chunks_mut(dim).enumerate().for_each(|(i, row)| {
            for (j, x) in row.iter_mut().enumerate() {
                *x = f(i, j);
            }
        });
        ComplexMatrix { dim, data }
    }

    pub fn from_diagonal(diag: &[C64]) -> Self {
        let mut m = Self::zeros(diag.len());
        for (i, &x) in diag.iter().enumerate() {
            m.data[i * diag.len() + i] = x;
        }
        m
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn data(&self) -> &[C64] {
        &self.data
    }

    pub fn get(&self, i: usize, j: usize) -> C64 {
        self.data[i * self.dim + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: C64) {
        self.data[i * self.dim + j] = v;
    }

    pub fn row(&self, i: usize) -> &[C64] {
        &self.data[i * self.dim..(i + 1) * self.dim]
    }

    pub fn diagonal(&self) -> Vec<C64> {
        (0..self.dim).map(|i| self.get(i, i)).collect()
    }

    pub fn adjoint(&self) -> Self {
        let n = self.dim;
        Self::from_fn(n, |i, j| self.data[j * n + i].conj())
    }

    pub fn conj(&self) -> Self {
        ComplexMatrix { dim: self.dim, data: self.data.iter().map(|x| x.conj()).collect() }
    }

    pub fn transpose(&self) -> Self {
        let n = self.dim;
        Self::from_fn(n, |i, j| self.data[j * n + i])
    }

    /// `self · other`. Each output row is accumulated in a fixed order, so the
    /// result does not depend on the thread count.
    pub fn mul(&self, other: &Self) -> Self {
        assert_eq!(self.dim, other.dim, "matrix product dimension mismatch");
        let n = self.dim;
        let mut data = vec![ZERO; n * n];
        data.par_chunks_mut(n).enumerate().for_each(|(i, out)| {
            for k in 0..n {
                let a = self.data[i * n + k];
                if a == ZERO {
                    continue;
                }
                let row = &other.data[k * n..(k + 1) * n];
                for (o, b) in out.iter_mut().zip(row) {
                    *o += a * b;
                }
            }
        });
        ComplexMatrix { dim: n, data }
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!(self.dim, other.dim);
        let data = self.data.iter().zip(&other.data).map(|(a, b)| a + b).collect();
        ComplexMatrix { dim: self.dim, data }
    }

    pub fn sub(&self, other: &Self) -> Self {
        assert_eq!(self.dim, other.dim);
        let data = self.data.iter().zip(&other.data).map(|(a, b)| a - b).collect();
        ComplexMatrix { dim: self.dim, data }
    }

    pub fn scale(&self, s: C64) -> Self {
        ComplexMatrix { dim: self.dim, data: self.data.iter().map(|x| x * s).collect() }
    }

    /// Kronecker product, `self` on the more significant index.
    pub fn kron(&self, other: &Self) -> Self {
        let (a, b) = (self.dim, other.dim);
        Self::from_fn(a * b, |i, j| self.get(i / b, j / b) * other.get(i % b, j % b))
    }

    pub fn trace(&self) -> C64 {
        (0..self.dim).map(|i| self.get(i, i)).sum()
    }

    pub fn apply(&self, v: &[C64]) -> Vec<C64> {
        assert_eq!(v.len(), self.dim);
        (0..self.dim)
            .map(|i| self.row(i).iter().zip(v).map(|(a, b)| a * b).sum())
            .collect()
    }

    /// Largest entry modulus.
    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |m, x| m.max(x.norm()))
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        assert_eq!(self.dim, other.dim);
        self.data.iter().zip(&other.data).fold(0.0, |m, (a, b)| m.max((a - b).norm()))
    }

    pub fn hermitian_defect(&self) -> f64 {
        let n = self.dim;
        let mut worst: f64 = 0.0;
        for i in 0..n {
            for j in i..n {
                worst = worst.max((self.get(i, j) - self.get(j, i).conj()).norm());
            }
        }
        worst
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.hermitian_defect() <= tol
    }

    /// `||U†U − I||` entrywise within `tol`.
    pub fn is_unitary(&self, tol: f64) -> bool {
        self.adjoint().mul(self).max_abs_diff(&Self::identity(self.dim)) <= tol
    }

    pub fn is_projector(&self, tol: f64) -> bool {
        self.is_hermitian(tol) && self.mul(self).max_abs_diff(self) <= tol
    }
}

/// `M^{⊗t} ⊗ M*^{⊗t}` in the [`TensorLayout`] convention.
pub fn tensor_power_conj(m: &ComplexMatrix, t: usize, budget: &Budget) -> Result<ComplexMatrix> {
    if t == 0 {
        return Err(Error::invalid("tensor power order must be positive"));
    }
    budget.check_dense(pow_u128(m.dim() as u128, 2 * t as u32))?;
    let conj = m.conj();
    let mut out = m.clone();
    for _ in 1..t {
        out = out.kron(m);
    }
    for _ in 0..t {
        out = out.kron(&conj);
    }
    Ok(out)
}

/// `M^{⊗k}`.
pub fn kron_power(m: &ComplexMatrix, k: usize) -> ComplexMatrix {
    let mut out = ComplexMatrix::identity(1);
    for _ in 0..k {
        out = out.kron(m);
    }
    out
}

/// Eigenvalues of a Hermitian matrix, ascending.
///
/// Householder reduction to complex tridiagonal form, a diagonal phase change
/// to a real symmetric tridiagonal, then implicit QL with Wilkinson-type
/// shifts. Only the lower triangle's Hermitian part is meaningful.
pub fn hermitian_eigenvalues(m: &ComplexMatrix) -> Result<Vec<f64>> {
    let n = m.dim();
    let mut a = m.data().to_vec();
    let mut diag = vec![0.0; n];
    let mut off = vec![0.0; n];
    let mut v = vec![ZERO; n];
    let mut p = vec![ZERO; n];
    // Columns below this are left as they are: dropping them moves no
    // eigenvalue by more than their norm, and reflecting them underflows.
    let negligible = f64::EPSILON * 1e-2 * m.max_abs();
    for k in 0..n.saturating_sub(2) {
        let s = k + 1;
        let xnorm = (s..n).map(|i| a[i * n + k].norm_sqr()).sum::<f64>().sqrt();
        if xnorm <= negligible {
            continue;
        }
        let x0 = a[s * n + k];
        let phase = if x0.norm() > 0.0 { x0 / x0.norm() } else { ONE };
        let alpha = -phase * xnorm;
        for i in s..n {
            v[i] = a[i * n + k];
        }
        v[s] -= alpha;
        let vv: f64 = (s..n).map(|i| v[i].norm_sqr()).sum();
        if vv == 0.0 {
            continue;
        }
        let tau = 2.0 / vv;
        for i in s..n {
            let row = &a[i * n + s..i * n + n];
            p[i] = row.iter().zip(&v[s..n]).map(|(x, y)| x * y).sum::<C64>() * tau;
        }
        let kk = (s..n).map(|i| v[i].conj() * p[i]).sum::<C64>() * (tau / 2.0);
        for i in s..n {
            p[i] -= kk * v[i];
        }
        for i in s..n {
            let (vi, wi) = (v[i], p[i]);
            let row = &mut a[i * n + s..i * n + n];
            for (j, x) in row.iter_mut().enumerate() {
                let j = j + s;
                *x -= vi * p[j].conj() + wi * v[j].conj();
            }
        }
        a[s * n + k] = alpha;
        a[k * n + s] = alpha.conj();
        for i in s + 1..n {
            a[i * n + k] = ZERO;
            a[k * n + i] = ZERO;
        }
    }
    for i in 0..n {
        diag[i] = a[i * n + i].re;
        if i + 1 < n {
            off[i] = a[(i + 1) * n + i].norm();
        }
    }
    tridiagonal_ql(&mut diag, &mut off)?;
    diag.sort_by(|x, y| x.total_cmp(y));
    Ok(diag)
}

/// Implicit QL on a real symmetric tridiagonal matrix. `e[i]` couples `i` and
/// `i+1`; on return `d` holds the eigenvalues (unordered).
fn tridiagonal_ql(d: &mut [f64], e: &mut [f64]) -> Result<()> {
    let n = d.len();
    if n == 0 {
        return Ok(());
    }
    e[n - 1] = 0.0;
    // Absolute floor so blocks of numerically zero eigenvalues still deflate.
    let anorm = (0..n).fold(0.0f64, |m, i| m.max(d[i].abs() + e[i].abs()));
    let floor = f64::EPSILON * anorm;
    for l in 0..n {
        let mut iter = 0;
        loop {
            let mut m = l;
            while m + 1 < n {
                let dd = d[m].abs() + d[m + 1].abs();
                if e[m].abs() <= f64::EPSILON * dd || e[m].abs() <= floor {
                    break;
                }
                m += 1;
            }
            if m == l {
                break;
            }
            iter += 1;
            if iter > QL_ITERATION_CAP {
                return Err(Error::NonConvergence(QL_ITERATION_CAP));
            }
            let mut g = (d[l + 1] - d[l]) / (2.0 * e[l]);
            let mut r = g.hypot(1.0);
            g = d[m] - d[l] + e[l] / (g + r.copysign(g));
            let (mut s, mut c, mut p) = (1.0, 1.0, 0.0);
            let mut deflated = false;
            let mut i = m;
            while i > l {
                i -= 1;
                let f = s * e[i];
                let b = c * e[i];
                r = f.hypot(g);
                e[i + 1] = r;
                if r == 0.0 {
                    d[i + 1] -= p;
                    e[m] = 0.0;
                    deflated = true;
                    break;
                }
                s = f / r;
                c = g / r;
                g = d[i + 1] - p;
                r = (d[i] - g) * s + 2.0 * c * b;
                p = s * r;
                d[i + 1] = g + p;
                g = c * r - b;
            }
            if deflated {
                continue;
            }
            d[l] -= p;
            e[l] = g;
            e[m] = 0.0;
        }
    }
    Ok(())
}

/// Largest singular value.
///
/// Hermitian input takes the largest eigenvalue modulus; anything else goes
/// through the eigenvalues of `M†M`.
pub fn operator_norm(m: &ComplexMatrix) -> Result<f64> {
    let scale = m.max_abs().max(1.0);
    if m.is_hermitian(1e-13 * scale) {
        let ev = hermitian_eigenvalues(m)?;
        Ok(ev.iter().fold(0.0, |a: f64, x| a.max(x.abs())))
    } else {
        gram_norm(&m.adjoint().mul(m))
    }
}

/// `sqrt(λ_max(G))` for a Gram matrix `G = M†M`.
pub fn gram_norm(gram: &ComplexMatrix) -> Result<f64> {
    let ev = hermitian_eigenvalues(gram)?;
    Ok(ev.last().copied().unwrap_or(0.0).max(0.0).sqrt())
}

/// Eigen-decomposition of a real symmetric `n×n` matrix (row-major) by cyclic
/// Jacobi rotations. Returns eigenvalues and the matrix whose columns are the
/// eigenvectors.
pub fn symmetric_eigen(a: &[f64], n: usize) -> Result<(Vec<f64>, Vec<f64>)> {
    assert_eq!(a.len(), n * n);
    let mut a = a.to_vec();
    let mut v = vec![0.0; n * n];
    for i in 0..n {
        v[i * n + i] = 1.0;
    }
    let total: f64 = a.iter().map(|x| x * x).sum::<f64>().sqrt().max(f64::MIN_POSITIVE);
    for _ in 0..JACOBI_SWEEP_CAP {
        let off: f64 = (0..n)
            .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| a[i * n + j] * a[i * n + j])
            .sum::<f64>()
            .sqrt();
        if off <= 1e-15 * total {
            let vals = (0..n).map(|i| a[i * n + i]).collect();
            return Ok((vals, v));
        }
        for p in 0..n {
            for q in p + 1..n {
                let apq = a[p * n + q];
                if apq == 0.0 {
                    continue;
                }
                let theta = (a[q * n + q] - a[p * n + p]) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..n {
                    let (akp, akq) = (a[k * n + p], a[k * n + q]);
                    a[k * n + p] = c * akp - s * akq;
                    a[k * n + q] = s * akp + c * akq;
                }
                for k in 0..n {
                    let (apk, aqk) = (a[p * n + k], a[q * n + k]);
                    a[p * n + k] = c * apk - s * aqk;
                    a[q * n + k] = s * apk + c * aqk;
                }
                for k in 0..n {
                    let (vkp, vkq) = (v[k * n + p], v[k * n + q]);
                    v[k * n + p] = c * vkp - s * vkq;
                    v[k * n + q] = s * vkp + c * vkq;
                }
            }
        }
    }
    Err(Error::NonConvergence(JACOBI_SWEEP_CAP))
}

/// Haar-random `d×d` unitary.
///
/// A Ginibre matrix is orthonormalised column by column (Gram–Schmidt, two
/// passes). The triangular factor's diagonal is then the positive column norm,
/// which is the phase convention that makes the result exactly Haar.
pub fn haar_sample<R: Rng + ?Sized>(d: usize, rng: &mut R) -> ComplexMatrix {
    assert!(d >= 1);
    let mut cols: Vec<Vec<C64>> = Vec::with_capacity(d);
    let mut z = vec![ZERO; d * d];
    for x in z.iter_mut() {
        *x = complex_normal(rng);
    }
    for j in 0..d {
        let mut v: Vec<C64> = (0..d).map(|i| z[i * d + j]).collect();
        for _ in 0..2 {
            for q in &cols {
                let r: C64 = q.iter().zip(&v).map(|(a, b)| a.conj() * b).sum();
                for (x, y) in v.iter_mut().zip(q) {
                    *x -= r * y;
                }
            }
        }
        let norm = v.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt();
        v.iter_mut().for_each(|x| *x /= norm);
        cols.push(v);
    }
    ComplexMatrix::from_fn(d, |i, j| cols[j][i])
}

/// The 2×2 Hadamard matrix.
pub fn hadamard() -> ComplexMatrix {
    let h = std::f64::consts::FRAC_1_SQRT_2;
    ComplexMatrix::new(2, vec![C64::new(h, 0.0), C64::new(h, 0.0), C64::new(h, 0.0), C64::new(-h, 0.0)])
        .expect("2x2")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::RandomSource;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn tensor_power_of_identity() {
        let out = tensor_power_conj(&ComplexMatrix::identity(2), 2, &Budget::default()).unwrap();
        assert_eq!(out, ComplexMatrix::identity(16));
    }

    #[test]
    fn conjugated_block_negates_phase() {
        let m = ComplexMatrix::from_diagonal(&[ONE, c(0.0, 1.0)]);
        let out = tensor_power_conj(&m, 1, &Budget::default()).unwrap();
        let want = ComplexMatrix::from_diagonal(&[ONE, c(0.0, -1.0), c(0.0, 1.0), ONE]);
        assert!(out.max_abs_diff(&want) < 1e-15);
    }

    #[test]
    fn hadamard_power_matches_index_loop() {
        let h = hadamard();
        let out = tensor_power_conj(&h, 2, &Budget::default()).unwrap();
        let lay = TensorLayout::new(2, 2);
        // Quadruple loop over the factor digits, independent of kron.
        for k1 in 0..2 {
            for k2 in 0..2 {
                for l1 in 0..2 {
                    for l2 in 0..2 {
                        let row = lay.index(&[k1, k2], &[l1, l2]);
                        for a1 in 0..2 {
                            for a2 in 0..2 {
                                for b1 in 0..2 {
                                    for b2 in 0..2 {
                                        let col = lay.index(&[a1, a2], &[b1, b2]);
                                        let sign = (-1f64).powi((k1 * a1 + k2 * a2 + l1 * b1 + l2 * b2) as i32);
                                        assert!((out.get(row, col) - c(sign / 4.0, 0.0)).norm() < 1e-15);
                                    }
                                }
                            }
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn tensor_power_budget() {
        let err = tensor_power_conj(&ComplexMatrix::identity(2), 7, &Budget::default());
        assert!(matches!(err, Err(Error::BudgetExceeded { .. })));
    }

    #[test]
    fn norm_examples() {
        assert!((operator_norm(&ComplexMatrix::identity(4)).unwrap() - 1.0).abs() < 1e-12);
        let d = ComplexMatrix::from_diagonal(&[c(0.5, 0.0), c(-2.0, 0.0), ZERO]);
        assert!((operator_norm(&d).unwrap() - 2.0).abs() < 1e-12);
        let nilpotent = ComplexMatrix::new(2, vec![ZERO, c(3.0, 0.0), ZERO, ZERO]).unwrap();
        assert!((operator_norm(&nilpotent).unwrap() - 3.0).abs() < 1e-12);
    }

    #[test]
    fn eigenvalues_of_known_hermitian() {
        // [[2, i], [-i, 2]] has eigenvalues 1 and 3.
        let m = ComplexMatrix::new(2, vec![c(2.0, 0.0), c(0.0, 1.0), c(0.0, -1.0), c(2.0, 0.0)]).unwrap();
        let ev = hermitian_eigenvalues(&m).unwrap();
        assert!((ev[0] - 1.0).abs() < 1e-12 && (ev[1] - 3.0).abs() < 1e-12);
    }

    #[test]
    fn eigenvalues_match_unitary_conjugation() {
        let src = RandomSource::new(5);
        let mut rng = src.stream(0);
        let u = haar_sample(12, &mut rng);
        let vals: Vec<f64> = (0..12).map(|i| i as f64 - 5.5).collect();
        let d = ComplexMatrix::from_diagonal(&vals.iter().map(|&x| c(x, 0.0)).collect::<Vec<_>>());
        let m = u.mul(&d).mul(&u.adjoint());
        let ev = hermitian_eigenvalues(&m).unwrap();
        for (a, b) in ev.iter().zip(&vals) {
            assert!((a - b).abs() < 1e-10, "{a} vs {b}");
        }
    }

    #[test]
    fn jacobi_reconstructs() {
        let a = [4.0, 1.0, 0.5, 1.0, 3.0, 0.25, 0.5, 0.25, 1.0];
        let (vals, vecs) = symmetric_eigen(&a, 3).unwrap();
        for i in 0..3 {
            for j in 0..3 {
                let r: f64 = (0..3).map(|k| vecs[i * 3 + k] * vals[k] * vecs[j * 3 + k]).sum();
                assert!((r - a[i * 3 + j]).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn haar_is_unitary() {
        let src = RandomSource::new(1);
        let u1 = haar_sample(1, &mut src.stream(0));
        assert!((u1.get(0, 0).norm() - 1.0).abs() < 1e-12);
        for i in 0..20 {
            assert!(haar_sample(4, &mut src.stream(i)).is_unitary(1e-10));
        }
    }

    #[test]
    fn layout_round_trip() {
        let lay = TensorLayout::new(3, 2);
        for idx in 0..lay.dim() {
            let (k, l) = lay.split(idx);
            assert_eq!(lay.index(&k, &l), idx);
        }
        assert_eq!(lay.index(&[1, 0], &[0, 2]), 3 * 9 + 2);
    }
}
