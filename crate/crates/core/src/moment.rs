//! Moment operators `E[U^{⊗t,t}]`: the Haar projector `P₀`, the diagonal
//! projector `P_E`, and the expander gap of `P_E P_F P_E`.

use crate::budget::{pow_u128, Budget};
use crate::error::{Error, Result};
use crate::linalg::{hermitian_eigenvalues, operator_norm, symmetric_eigen, ComplexMatrix, TensorLayout, C64, ONE, ZERO};
use crate::mub::{verify_pair, FourierTypePair, DEFAULT_THRESHOLD};
use crate::rng::RandomSource;
use rand_chacha::ChaCha20Rng;
use rayon::prelude::*;
use serde::Serialize;
use std::collections::BTreeMap;

/// Relative cutoff for the Gram pseudo-inverse.
pub const PINV_CUTOFF: f64 = 1e-10;

/// A bijection of `[0, t)`, stored by images.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Permutation {
    images: Vec<usize>,
}

impl Permutation {
    pub fn new(images: Vec<usize>) -> Result<Self> {
        let mut seen = vec![false; images.len()];
        for &x in &images {
            if x >= images.len() || seen[x] {
                return Err(Error::invalid(format!("{images:?} is not a permutation")));
            }
            seen[x] = true;
        }
        Ok(Permutation { images })
    }

    pub fn identity(t: usize) -> Self {
        Permutation { images: (0..t).collect() }
    }

    pub fn len(&self) -> usize {
        self.images.len()
    }

    pub fn is_empty(&self) -> bool {
        self.images.is_empty()
    }

    pub fn images(&self) -> &[usize] {
        &self.images
    }

    pub fn image(&self, s: usize) -> usize {
        self.images[s]
    }

    /// `(self ∘ other)(s) = self(other(s))`.
    pub fn compose(&self, other: &Self) -> Self {
        Permutation { images: other.images.iter().map(|&s| self.images[s]).collect() }
    }

    pub fn inverse(&self) -> Self {
        let mut inv = vec![0; self.len()];
        for (s, &x) in self.images.iter().enumerate() {
            inv[x] = s;
        }
        Permutation { images: inv }
    }

    pub fn cycles(&self) -> usize {
        let mut seen = vec![false; self.len()];
        let mut count = 0;
        for s in 0..self.len() {
            if !seen[s] {
                count += 1;
                let mut x = s;
                while !seen[x] {
                    seen[x] = true;
                    x = self.images[x];
                }
            }
        }
        count
    }

    /// `k_π`: position `π(s)` receives `k_s`.
    pub fn apply<T: Copy>(&self, k: &[T]) -> Vec<T> {
        let mut out = k.to_vec();
        for (s, &x) in k.iter().enumerate() {
            out[self.images[s]] = x;
        }
        out
    }

    /// All of `S_t` in lexicographic order of image arrays.
    pub fn all(t: usize) -> Vec<Permutation> {
        let mut out = Vec::new();
        let mut cur: Vec<usize> = (0..t).collect();
        loop {
            out.push(Permutation { images: cur.clone() });
            // next lexicographic permutation
            let Some(i) = (1..t).rev().find(|&i| cur[i - 1] < cur[i]) else { break };
            let j = (i..t).rev().find(|&j| cur[j] > cur[i - 1]).unwrap();
            cur.swap(i - 1, j);
            cur[i..].reverse();
        }
        out
    }
}

/// Gram matrix of the permutation states, `G_{πσ} = d^{cycles(π⁻¹σ) − t}`.
pub fn permutation_gram(d: usize, perms: &[Permutation]) -> Vec<f64> {
    let t = perms.first().map_or(0, |p| p.len()) as i32;
    let n = perms.len();
    let mut g = vec![0.0; n * n];
    for (i, p) in perms.iter().enumerate() {
        let pi = p.inverse();
        for (j, q) in perms.iter().enumerate() {
            g[i * n + j] = (d as f64).powi(pi.compose(q).cycles() as i32 - t);
        }
    }
    g
}

/// Moore–Penrose inverse of a real symmetric matrix, dropping eigenvalues
/// below `cutoff · λ_max`.
pub fn symmetric_pinv(a: &[f64], n: usize, cutoff: f64) -> Result<Vec<f64>> {
    let (vals, vecs) = symmetric_eigen(a, n)?;
    let top = vals.iter().fold(0.0, |m: f64, x| m.max(x.abs()));
    let mut out = vec![0.0; n * n];
    for (k, &lam) in vals.iter().enumerate() {
        if lam.abs() <= cutoff * top {
            continue;
        }
        for i in 0..n {
            for j in 0..n {
                out[i * n + j] += vecs[i * n + k] * vecs[j * n + k] / lam;
            }
        }
    }
    Ok(out)
}

/// `P₀` in factored form: `⟨k,l|P₀|k',l'⟩ = d^{-t} Σ_{π,σ} [l = k_π] G⁺_{πσ} [l' = k'_σ]`.
#[derive(Clone, Debug)]
pub struct PermutationSubspace {
    pub layout: TensorLayout,
    pub perms: Vec<Permutation>,
    pub pinv: Vec<f64>,
}

impl PermutationSubspace {
    pub fn new(d: usize, t: usize) -> Result<Self> {
        if d == 0 || t == 0 {
            return Err(Error::invalid("d and t must be positive"));
        }
        let perms = Permutation::all(t);
        let g = permutation_gram(d, &perms);
        let pinv = symmetric_pinv(&g, perms.len(), PINV_CUTOFF)?;
        Ok(PermutationSubspace { layout: TensorLayout::new(d, t), perms, pinv })
    }

    /// Indices of the permutations with `k_π = l`.
    pub fn matches(&self, k: &[usize], l: &[usize]) -> Vec<usize> {
        (0..self.perms.len()).filter(|&i| self.perms[i].apply(k) == l).collect()
    }

    /// Matrix element between labels whose match sets are `a` and `b`.
    pub fn entry_from_matches(&self, a: &[usize], b: &[usize]) -> f64 {
        let n = self.perms.len();
        let mut s = 0.0;
        for &i in a {
            for &j in b {
                s += self.pinv[i * n + j];
            }
        }
        s / self.layout.half() as f64
    }

    /// Compressed `P₀` on a list of flat label indices.
    pub fn compressed(&self, labels: &[usize]) -> Vec<f64> {
        let sets: Vec<Vec<usize>> = labels
            .iter()
            .map(|&x| {
                let (k, l) = self.layout.split(x);
                self.matches(&k, &l)
            })
            .collect();
        let n = labels.len();
        let mut out = vec![0.0; n * n];
        out.par_chunks_mut(n.max(1)).enumerate().for_each(|(i, row)| {
            if sets[i].is_empty() {
                return;
            }
            for (j, x) in row.iter_mut().enumerate() {
                if !sets[j].is_empty() {
                    *x = self.entry_from_matches(&sets[i], &sets[j]);
                }
            }
        });
        out
    }

    pub fn rank(&self) -> Result<usize> {
        let g = permutation_gram(self.layout.d, &self.perms);
        let (vals, _) = symmetric_eigen(&g, self.perms.len())?;
        let top = vals.iter().fold(0.0, |m: f64, x| m.max(x.abs()));
        Ok(vals.iter().filter(|x| x.abs() > PINV_CUTOFF * top).count())
    }
}

/// Flat indices `(k, l)` with `l` a rearrangement of `k`, ascending.
pub fn rearrangement_labels(d: usize, t: usize) -> Vec<usize> {
    let lay = TensorLayout::new(d, t);
    let half = lay.half();
    let sig = multiset_signatures(d, t);
    let mut groups: BTreeMap<u64, Vec<usize>> = BTreeMap::new();
    for (code, &s) in sig.iter().enumerate() {
        groups.entry(s).or_default().push(code);
    }
    let mut out = Vec::new();
    for (k, s) in sig.iter().enumerate() {
        for &l in &groups[s] {
            out.push(k * half + l);
        }
    }
    out
}

/// For every code in `[0, d^t)`, an integer identifying its digit multiset.
pub fn multiset_signatures(d: usize, t: usize) -> Vec<u64> {
    let lay = TensorLayout::new(d, t);
    let mut digits = vec![0; t];
    (0..lay.half())
        .map(|code| {
            lay.decode(code, &mut digits);
            let mut s = digits.clone();
            s.sort_unstable();
            s.iter().fold(0u64, |acc, &x| acc * d as u64 + x as u64)
        })
        .collect()
}

/// 0/1 diagonal over the label space, stored as a bitset.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DiagonalIndicator {
    pub layout: TensorLayout,
    bits: Vec<u64>,
}

impl DiagonalIndicator {
    pub fn from_fn(layout: TensorLayout, f: impl Fn(usize) -> bool + Sync) -> Self {
        let n = layout.dim();
        let bits = (0..n.div_ceil(64))
            .into_par_iter()
            .map(|w| {
                let mut word = 0u64;
                for b in 0..64 {
                    let i = w * 64 + b;
                    if i < n && f(i) {
                        word |= 1 << b;
                    }
                }
                word
            })
            .collect();
        DiagonalIndicator { layout, bits }
    }

    pub fn get(&self, i: usize) -> bool {
        self.bits[i / 64] >> (i % 64) & 1 == 1
    }

    pub fn len(&self) -> usize {
        self.layout.dim()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn count(&self) -> u64 {
        self.bits.iter().map(|w| w.count_ones() as u64).sum()
    }

    pub fn support(&self) -> Vec<usize> {
        (0..self.len()).filter(|&i| self.get(i)).collect()
    }

    pub fn words(&self) -> &[u64] {
        &self.bits
    }
}

#[derive(Clone, Debug)]
pub enum MomentOperator {
    Dense { layout: TensorLayout, matrix: ComplexMatrix },
    Diagonal(DiagonalIndicator),
}

impl MomentOperator {
    pub fn layout(&self) -> TensorLayout {
        match self {
            MomentOperator::Dense { layout, .. } => *layout,
            MomentOperator::Diagonal(ind) => ind.layout,
        }
    }

    pub fn to_dense(&self, budget: &Budget) -> Result<ComplexMatrix> {
        match self {
            MomentOperator::Dense { matrix, .. } => Ok(matrix.clone()),
            MomentOperator::Diagonal(ind) => {
                budget.check_dense(ind.len() as u128)?;
                let diag: Vec<C64> = (0..ind.len()).map(|i| if ind.get(i) { ONE } else { ZERO }).collect();
                Ok(ComplexMatrix::from_diagonal(&diag))
            }
        }
    }

    pub fn trace(&self) -> f64 {
        match self {
            MomentOperator::Dense { matrix, .. } => matrix.trace().re,
            MomentOperator::Diagonal(ind) => ind.count() as f64,
        }
    }
}

/// The Haar moment `P₀` as a dense matrix.
pub fn projector_p0(d: usize, t: usize, budget: &Budget) -> Result<MomentOperator> {
    let layout = TensorLayout::new(d, t);
    budget.check_dense(pow_u128(d as u128, 2 * t as u32))?;
    let sub = PermutationSubspace::new(d, t)?;
    let labels = rearrangement_labels(d, t);
    let block = sub.compressed(&labels);
    let n = labels.len();
    let mut m = ComplexMatrix::zeros(layout.dim());
    for (i, &x) in labels.iter().enumerate() {
        for (j, &y) in labels.iter().enumerate() {
            let v = block[i * n + j];
            if v != 0.0 {
                m.set(x, y, C64::new(v, 0.0));
            }
        }
    }
    Ok(MomentOperator::Dense { layout, matrix: m })
}

/// The moment of a uniformly random diagonal unitary.
pub fn projector_diag(d: usize, t: usize, budget: &Budget) -> Result<MomentOperator> {
    budget.check_labels(pow_u128(d as u128, 2 * t as u32))?;
    let layout = TensorLayout::new(d, t);
    let sig = multiset_signatures(d, t);
    let half = layout.half();
    Ok(MomentOperator::Diagonal(DiagonalIndicator::from_fn(layout, |i| sig[i / half] == sig[i % half])))
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EtaResult {
    pub eta: f64,
    /// `((1+t²)t!² + t²)/d`, or `None` when it is not below 1.
    pub bound: Option<f64>,
    pub leading_term: f64,
    pub subspace_dim: usize,
}

pub fn leading_bound(d: usize, t: usize) -> f64 {
    let tf: f64 = (1..=t).map(|x| x as f64).product();
    let t2 = (t * t) as f64;
    ((1.0 + t2) * tf * tf + t2) / d as f64
}

/// `||P_E P_F P_E − P₀||` computed on the range of `P_E`.
///
/// For a Fourier-type pair `⟨k,l|P_F|k',l'⟩` depends only on `(k⊖k', l⊖l')`,
/// so one `d^t × d^t` table `h` gives every entry of the compressed block.
pub fn tpe_eta(pair: &FourierTypePair, t: usize, budget: &Budget) -> Result<EtaResult> {
    if t == 0 {
        return Err(Error::invalid("t must be positive"));
    }
    let report = verify_pair(pair, DEFAULT_THRESHOLD);
    if !report.passes() {
        return Err(Error::NotFourierType(format!("{:?}", report.max_residuals)));
    }
    let d = pair.d();
    let labels = rearrangement_labels(d, t);
    let n = labels.len();
    budget.check_structured(n as u128)?;
    budget.check_labels(pow_u128(d as u128, 2 * t as u32))?;
    let lay = TensorLayout::new(d, t);
    let half = lay.half();

    let h = difference_table(pair, t);
    let sub_table: Vec<usize> = (0..d * d)
        .map(|i| {
            let (a, b) = (i / d, i % d);
            (0..d).find(|&c| pair.add(c, b) == a).expect("group has inverses")
        })
        .collect();
    let digits: Vec<Vec<usize>> = (0..half)
        .map(|c| {
            let mut v = vec![0; t];
            lay.decode(c, &mut v);
            v
        })
        .collect();
    let diff = |a: usize, b: usize| -> usize {
        digits[a].iter().zip(&digits[b]).fold(0, |acc, (&x, &y)| acc * d + sub_table[x * d + y])
    };
    let p0 = PermutationSubspace::new(d, t)?.compressed(&labels);
    let m = ComplexMatrix::from_fn(n, |i, j| {
        let (k, l) = (labels[i] / half, labels[i] % half);
        let (k2, l2) = (labels[j] / half, labels[j] % half);
        h[diff(k, k2) * half + diff(l, l2)] - C64::new(p0[i * n + j], 0.0)
    });
    let ev = hermitian_eigenvalues(&m)?;
    let eta = ev.iter().fold(0.0, |a: f64, x| a.max(x.abs()));
    let lead = leading_bound(d, t);
    Ok(EtaResult { eta, bound: (lead < 1.0).then_some(lead), leading_term: lead, subspace_dim: n })
}

/// `h(δ, ε) = d^{-2t} Σ_{(α,β)} φ(δ,α) φ(ε,β)*` over multiset-equal `(α, β)`,
/// with `φ(δ,α) = e^{iΣ_s θ_{δ_s α_s}}`. Row-major in `(δ, ε)`.
fn difference_table(pair: &FourierTypePair, t: usize) -> Vec<C64> {
    let d = pair.d();
    let lay = TensorLayout::new(d, t);
    let half = lay.half();
    let phi: Vec<C64> = (0..d * d).map(|i| C64::from_polar(1.0, pair.phases()[i])).collect();
    let sig = multiset_signatures(d, t);
    let mut groups: BTreeMap<u64, Vec<usize>> = BTreeMap::new();
    for (code, &s) in sig.iter().enumerate() {
        groups.entry(s).or_default().push(code);
    }
    let digits: Vec<Vec<usize>> = (0..half)
        .map(|c| {
            let mut v = vec![0; t];
            lay.decode(c, &mut v);
            v
        })
        .collect();
    // y[α][ε] = Σ_{β ~ α} φ(ε, β)*
    let mut y = vec![ZERO; half * half];
    y.par_chunks_mut(half).enumerate().for_each(|(alpha, row)| {
        for &beta in &groups[&sig[alpha]] {
            for (eps, x) in row.iter_mut().enumerate() {
                let mut p = ONE;
                for s in 0..t {
                    p *= phi[digits[eps][s] * d + digits[beta][s]];
                }
                *x += p.conj();
            }
        }
    });
    // h = φ^{⊗t} y, one tensor factor at a time.
    let mut cur = y;
    let mut next = vec![ZERO; half * half];
    for s in 0..t {
        let stride = d.pow((t - 1 - s) as u32) * half;
        next.par_chunks_mut(half).enumerate().for_each(|(row, out)| {
            let a = (row / d.pow((t - 1 - s) as u32)) % d;
            let base = row - a * d.pow((t - 1 - s) as u32);
            out.iter_mut().for_each(|x| *x = ZERO);
            for b in 0..d {
                let w = phi[a * d + b];
                let src = &cur[base * half + b * stride..base * half + b * stride + half];
                for (o, v) in out.iter_mut().zip(src) {
                    *o += w * v;
                }
            }
        });
        std::mem::swap(&mut cur, &mut next);
    }
    let norm = 1.0 / (half as f64 * half as f64);
    cur.iter_mut().for_each(|x| *x *= norm);
    cur
}

/// Iterations of an `(η, t)`-expander needed for an ε-approximate design,
/// `⌈(t ln d + ln(1/ε)) / ln(1/η)⌉`.
///
/// `η = 0` returns 1. A quotient within `1e-9` of an integer is not rounded
/// up past it.
pub fn tpe_iterations(eta: f64, d: usize, t: usize, eps: f64) -> Result<u64> {
    if eta.is_nan() || eta < 0.0 {
        return Err(Error::invalid(format!("eta = {eta}")));
    }
    if eta >= 1.0 {
        return Err(Error::VacuousGap(eta));
    }
    if !(eps > 0.0 && eps <= 1.0) || d < 1 || t < 1 {
        return Err(Error::invalid(format!("need 0 < eps ≤ 1, d ≥ 1, t ≥ 1 (eps = {eps})")));
    }
    if eta == 0.0 {
        return Ok(1);
    }
    let x = (t as f64 * (d as f64).ln() + (1.0 / eps).ln()) / (1.0 / eta).ln();
    Ok(ceil_snapped(x).max(1.0) as u64)
}

pub(crate) fn ceil_snapped(x: f64) -> f64 {
    let r = x.round();
    if (x - r).abs() <= 1e-9 * x.abs().max(1.0) {
        r
    } else {
        x.ceil()
    }
}

/// Sample mean of `U^{⊗t,t}` over `samples` draws of `sampler`, one rng
/// stream per sample.
pub fn monte_carlo_moment<F>(d: usize, t: usize, samples: usize, src: &RandomSource, budget: &Budget, sampler: F) -> Result<ComplexMatrix>
where
    F: Fn(&mut ChaCha20Rng) -> ComplexMatrix + Sync,
{
    let layout = TensorLayout::new(d, t);
    budget.check_dense(layout.dim() as u128)?;
    let half = layout.half();
    let mean = src.mean(samples, layout.dim() * layout.dim(), |rng, out| {
        let u = sampler(rng);
        let mut a = ComplexMatrix::identity(1);
        for _ in 0..t {
            a = a.kron(&u);
        }
        for (r, row) in out.chunks_mut(layout.dim()).enumerate() {
            let (k, k2) = (r / half, r % half);
            let (ak, ak2) = (a.row(k), a.row(k2));
            for (c, x) in row.iter_mut().enumerate() {
                *x = ak[c / half] * ak2[c % half].conj();
            }
        }
    });
    ComplexMatrix::new(layout.dim(), mean)
}

/// `d^t ||(I−P₀) M (I−P₀)||^ℓ`, the diamond-norm certificate for `ℓ` iterations.
pub fn residual_contraction(m: &MomentOperator, p0: &MomentOperator, ell: u32, budget: &Budget) -> Result<f64> {
    if m.layout() != p0.layout() {
        return Err(Error::DimensionMismatch("moment and P₀ layouts differ".into()));
    }
    let mm = m.to_dense(budget)?;
    let p = p0.to_dense(budget)?;
    let q = ComplexMatrix::identity(p.dim()).sub(&p);
    let r = q.mul(&mm).mul(&q);
    let norm = operator_norm(&r)?;
    Ok(norm.powi(ell as i32) * m.layout().half() as f64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mub::{fourier_pair, pauli_xz_pair};

    #[test]
    fn permutation_group_laws() {
        let all = Permutation::all(4);
        assert_eq!(all.len(), 24);
        for p in &all {
            assert_eq!(p.compose(&p.inverse()), Permutation::identity(4));
            for q in &all {
                for r in &all {
                    assert_eq!(p.compose(q).compose(r), p.compose(&q.compose(r)));
                }
            }
        }
        assert!(Permutation::new(vec![0, 0]).is_err());
    }

    #[test]
    fn gram_matches_state_overlaps() {
        let (d, t) = (2, 3);
        let perms = Permutation::all(t);
        let g = permutation_gram(d, &perms);
        let lay = TensorLayout::new(d, t);
        for (i, p) in perms.iter().enumerate() {
            for (j, q) in perms.iter().enumerate() {
                let mut k = vec![0; t];
                let mut hits = 0;
                for c in 0..lay.half() {
                    lay.decode(c, &mut k);
                    if p.apply(&k) == q.apply(&k) {
                        hits += 1;
                    }
                }
                assert!((g[i * perms.len() + j] - hits as f64 / 8.0).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn p0_small_cases() {
        let b = Budget::default();
        let p = projector_p0(2, 1, &b).unwrap().to_dense(&b).unwrap();
        let h = C64::new(0.5, 0.0);
        for (i, j) in [(0, 0), (0, 3), (3, 0), (3, 3)] {
            assert!((p.get(i, j) - h).norm() < 1e-12);
        }
        assert!((p.trace().re - 1.0).abs() < 1e-12);
        let p22 = projector_p0(2, 2, &b).unwrap();
        assert!((p22.trace() - 2.0).abs() < 1e-9);
        // d < t: the six permutation states span only 1 + 2² = 5 dimensions.
        let p23 = projector_p0(2, 3, &b).unwrap();
        assert!((p23.trace() - 5.0).abs() < 1e-9);
        assert_eq!(PermutationSubspace::new(2, 3).unwrap().rank().unwrap() as f64, p23.trace().round());
    }

    #[test]
    fn diag_projector_traces() {
        let b = Budget::default();
        assert_eq!(projector_diag(2, 2, &b).unwrap().trace(), 6.0);
        for d in 2..6 {
            assert_eq!(projector_diag(d, 1, &b).unwrap().trace(), d as f64);
            assert_eq!(projector_diag(d, 2, &b).unwrap().trace(), (2 * d * d - d) as f64);
        }
        assert_eq!(rearrangement_labels(32, 2).len(), 2016);
    }

    #[test]
    fn t1_gap_vanishes() {
        let b = Budget::default();
        for d in 2..=8 {
            assert!(tpe_eta(&fourier_pair(d).unwrap(), 1, &b).unwrap().eta < 1e-10);
        }
        for n in 1..=3 {
            assert!(tpe_eta(&pauli_xz_pair(n, &b).unwrap(), 1, &b).unwrap().eta < 1e-10);
        }
    }

    #[test]
    fn rejects_broken_pairs_and_budget() {
        let b = Budget::default();
        let p = fourier_pair(4).unwrap();
        let mut th = p.phases().to_vec();
        th[5] += 0.3;
        let bad = FourierTypePair::from_parts(4, th, crate::mub::GroupLaw::Modular).unwrap();
        assert!(matches!(tpe_eta(&bad, 2, &b), Err(Error::NotFourierType(_))));
        let small = Budget { structured_cap: 100, ..Budget::default() };
        assert!(matches!(tpe_eta(&fourier_pair(8).unwrap(), 2, &small), Err(Error::BudgetExceeded { .. })));
    }

    #[test]
    fn iteration_counts() {
        assert_eq!(tpe_iterations(0.5, 2, 1, 0.5).unwrap(), 2);
        assert!(matches!(tpe_iterations(1.0, 2, 1, 0.5), Err(Error::VacuousGap(_))));
        assert!(matches!(tpe_iterations(1.0 - 1e-17, 2, 1, 0.5), Err(Error::VacuousGap(_))));
        assert!(tpe_iterations(-0.1, 2, 1, 0.5).is_err());
        assert_eq!(tpe_iterations(0.0, 2, 1, 0.5).unwrap(), 1);
        // η = 1/d gives ℓ = t + log(1/ε)/log d, rounded up.
        for n in 2..8 {
            let d = 1usize << n;
            let eps = 2f64.powi(-3);
            let want = (2.0 + 3.0 / n as f64).ceil() as u64;
            assert_eq!(tpe_iterations(1.0 / d as f64, d, 2, eps).unwrap(), want);
        }
    }

    #[test]
    fn residual_examples() {
        let b = Budget::default();
        let p0 = projector_p0(3, 2, &b).unwrap();
        assert!(residual_contraction(&p0, &p0, 3, &b).unwrap() < 1e-9);
    }
}
