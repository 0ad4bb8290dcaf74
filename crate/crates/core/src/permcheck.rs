//! Local permutation check problems on t×N binary matrices.
//!
//! Conventions: rows are indexed from 0, column positions from 1. A row is an
//! N-bit integer with position 1 as its most significant bit, and a column is a
//! t-bit integer with row 0 as its most significant bit. A matrix code
//! concatenates the rows, row 0 first.

use crate::budget::Budget;
use crate::error::{Error, Result};
use crate::moment::Permutation;
use num_rational::Ratio;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::collections::{BTreeMap, HashMap};
use std::path::Path;

/// Matrices between checkpoint writes in [`lambda_count_with`].
pub const CHECKPOINT_INTERVAL: u64 = 1 << 20;
/// Tolerance for deciding that `O·k` is a 0/1 vector.
pub const HYPERCUBE_TOL: f64 = 1e-9;

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct BinaryMatrix {
    t: usize,
    n: usize,
    rows: Vec<u64>,
}

impl BinaryMatrix {
    pub fn new(t: usize, n: usize, rows: Vec<u64>) -> Result<Self> {
        if t == 0 || n == 0 || n > 64 || rows.len() != t {
            return Err(Error::invalid(format!("{t}×{n} matrix with {} rows", rows.len())));
        }
        if n < 64 && rows.iter().any(|&r| r >> n != 0) {
            return Err(Error::invalid("row wider than N bits"));
        }
        Ok(BinaryMatrix { t, n, rows })
    }

    /// From explicit 0/1 rows.
    pub fn from_bits(rows: &[&[u8]]) -> Result<Self> {
        let n = rows.first().map_or(0, |r| r.len());
        if rows.iter().any(|r| r.len() != n || r.iter().any(|&b| b > 1)) {
            return Err(Error::invalid("ragged or non-binary rows"));
        }
        let packed = rows.iter().map(|r| r.iter().fold(0u64, |a, &b| a << 1 | b as u64)).collect();
        Self::new(rows.len(), n, packed)
    }

    /// From t-bit columns, position 1 first.
    pub fn from_columns(t: usize, cols: &[u64]) -> Result<Self> {
        let n = cols.len();
        let mut rows = vec![0u64; t];
        for (s, row) in rows.iter_mut().enumerate() {
            for &c in cols {
                *row = *row << 1 | (c >> (t - 1 - s) & 1);
            }
        }
        Self::new(t, n, rows)
    }

    pub fn from_code(code: u64, t: usize, n: usize) -> Self {
        let mask = if n == 64 { u64::MAX } else { (1u64 << n) - 1 };
        let rows = (0..t).map(|s| code >> (n * (t - 1 - s)) & mask).collect();
        BinaryMatrix { t, n, rows }
    }

    pub fn code(&self) -> Option<u64> {
        if self.t * self.n > 64 {
            return None;
        }
        Some(self.rows.iter().fold(0u64, |a, &r| if self.n == 64 { r } else { a << self.n | r }))
    }

    pub fn t(&self) -> usize {
        self.t
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn rows(&self) -> &[u64] {
        &self.rows
    }

    /// Bit at row `s` (from 0) and position `i` (from 1).
    pub fn bit(&self, s: usize, i: usize) -> u64 {
        self.rows[s] >> (self.n - i) & 1
    }

    pub fn column(&self, i: usize) -> u64 {
        (0..self.t).fold(0, |a, s| a << 1 | self.bit(s, i))
    }

    pub fn columns(&self) -> Vec<u64> {
        (1..=self.n).map(|i| self.column(i)).collect()
    }

    /// `K_{s,I}` read as a binary number, smallest position most significant.
    pub fn restrict(&self, s: usize, subset: &[usize]) -> u64 {
        subset.iter().fold(0, |a, &i| a << 1 | self.bit(s, i))
    }

    pub fn permute_rows(&self, p: &Permutation) -> Self {
        BinaryMatrix { t: self.t, n: self.n, rows: p.apply(&self.rows) }
    }

    pub fn sorted_rows(&self) -> Vec<u64> {
        let mut r = self.rows.clone();
        r.sort_unstable();
        r
    }
}

/// A family of index sets, kept in lexicographic order.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct IndexFamily {
    n: usize,
    subsets: Vec<Vec<usize>>,
    /// `Some(r)` for the family of all r-subsets.
    complete: Option<usize>,
}

impl IndexFamily {
    pub fn new(n: usize, subsets: Vec<Vec<usize>>) -> Result<Self> {
        let mut clean = Vec::with_capacity(subsets.len());
        for mut s in subsets {
            s.sort_unstable();
            if s.is_empty() {
                return Err(Error::invalid("empty index set"));
            }
            if s[0] == 0 || *s.last().unwrap() > n || s.windows(2).any(|w| w[0] == w[1]) {
                return Err(Error::invalid(format!("index set {s:?} not a subset of [1,{n}]")));
            }
            clean.push(s);
        }
        clean.sort();
        if clean.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::invalid("duplicate index set"));
        }
        Ok(IndexFamily { n, subsets: clean, complete: None })
    }

    /// `𝓘_r`: every r-element subset of `[1, n]`.
    pub fn complete(n: usize, r: usize) -> Result<Self> {
        if r == 0 || r > n {
            return Err(Error::invalid(format!("no {r}-subsets of [1,{n}]")));
        }
        let mut subsets = Vec::new();
        let mut cur: Vec<usize> = (1..=r).collect();
        loop {
            subsets.push(cur.clone());
            let Some(i) = (0..r).rev().find(|&i| cur[i] < n - (r - 1 - i)) else { break };
            cur[i] += 1;
            for j in i + 1..r {
                cur[j] = cur[j - 1] + 1;
            }
        }
        Ok(IndexFamily { n, subsets, complete: Some(r) })
    }

    /// The single full-width set `[1, n]`.
    pub fn full(n: usize) -> Result<Self> {
        let mut f = Self::complete(n, n)?;
        f.complete = Some(n);
        Ok(f)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn subsets(&self) -> &[Vec<usize>] {
        &self.subsets
    }

    pub fn complete_rank(&self) -> Option<usize> {
        self.complete
    }

    pub fn is_subfamily_of(&self, other: &Self) -> bool {
        self.subsets.iter().all(|s| other.subsets.contains(s))
    }

    /// Short label for reports: `I2`, `full`, or the explicit sets.
    pub fn label(&self) -> String {
        match self.complete {
            Some(r) if r == self.n => "full".into(),
            Some(r) => format!("I{r}"),
            None => format!("{:?}", self.subsets),
        }
    }
}

/// `Ω(K_I)`: the rows of `K` restricted to `I`, ascending.
pub fn canonical_omega(k: &BinaryMatrix, subset: &[usize]) -> Result<Vec<u64>> {
    if subset.is_empty() {
        return Err(Error::invalid("empty index set"));
    }
    if subset.iter().any(|&i| i == 0 || i > k.n) {
        return Err(Error::invalid(format!("{subset:?} outside [1,{}]", k.n)));
    }
    let mut v: Vec<u64> = (0..k.t).map(|s| k.restrict(s, subset)).collect();
    v.sort_unstable();
    Ok(v)
}

fn check_dims(k: &BinaryMatrix, k2: &BinaryMatrix) -> Result<()> {
    if k.t != k2.t || k.n != k2.n {
        return Err(Error::DimensionMismatch(format!("{}×{} vs {}×{}", k.t, k.n, k2.t, k2.n)));
    }
    Ok(())
}

pub fn is_local_permutation(k: &BinaryMatrix, k2: &BinaryMatrix, fam: &IndexFamily) -> Result<bool> {
    check_dims(k, k2)?;
    if fam.n != k.n {
        return Err(Error::DimensionMismatch(format!("family on [1,{}] for N = {}", fam.n, k.n)));
    }
    for s in &fam.subsets {
        if canonical_omega(k, s)? != canonical_omega(k2, s)? {
            return Ok(false);
        }
    }
    Ok(true)
}

pub fn is_row_permutation(k: &BinaryMatrix, k2: &BinaryMatrix) -> Result<bool> {
    check_dims(k, k2)?;
    Ok(k.sorted_rows() == k2.sorted_rows())
}

/// Concatenated canonical keys of a row multiset, subsets in family order.
fn family_key(rows: &[u64], n: usize, fam: &IndexFamily, out: &mut Vec<u64>) {
    out.clear();
    let mut buf = vec![0u64; rows.len()];
    for s in &fam.subsets {
        for (b, &r) in buf.iter_mut().zip(rows) {
            *b = s.iter().fold(0, |a, &i| a << 1 | (r >> (n - i) & 1));
        }
        buf.sort_unstable();
        out.extend_from_slice(&buf);
    }
}

fn pack_sorted(rows: &mut [u64], n: usize) -> u64 {
    rows.sort_unstable();
    rows.iter().fold(0, |a, &r| a << n | r)
}

fn unpack(code: u64, t: usize, n: usize) -> Vec<u64> {
    let mask = (1u64 << n) - 1;
    (0..t).map(|s| code >> (n * (t - 1 - s)) & mask).collect()
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
struct Checkpoint {
    t: usize,
    n: usize,
    family: Vec<Vec<usize>>,
    next_code: u64,
    classes: Vec<(u64, u64)>,
}

/// Options for long enumerations.
#[derive(Default)]
pub struct SweepOptions<'a> {
    /// JSON checkpoint written every [`CHECKPOINT_INTERVAL`] matrices and
    /// resumed from when present. Removed on completion.
    pub checkpoint: Option<&'a Path>,
    /// Called with `(done, total)` after each interval.
    pub progress: Option<&'a (dyn Fn(u64, u64) + Sync)>,
    /// Stop once this many matrices have been visited in this call, leaving
    /// the checkpoint in place.
    pub stop_after: Option<u64>,
}

/// `Λ(𝓘)`: ordered pairs `(K, K')` that are 𝓘-local but not row permutations.
pub fn lambda_count(t: usize, n: usize, fam: &IndexFamily, budget: &Budget) -> Result<u64> {
    Ok(lambda_count_with(t, n, fam, budget, SweepOptions::default())?.expect("no stop requested"))
}

/// Bucketed count over all `2^{tN}` matrices.
///
/// Every matrix is reduced to its sorted-row class; a class fixes every
/// canonical key, so buckets are unions of classes and each bucket adds
/// `size² − Σ class²`. Returns `None` when stopped early by
/// [`SweepOptions::stop_after`].
pub fn lambda_count_with(
    t: usize,
    n: usize,
    fam: &IndexFamily,
    budget: &Budget,
    opts: SweepOptions,
) -> Result<Option<u64>> {
    if t == 0 || n == 0 || fam.n != n {
        return Err(Error::invalid(format!("t = {t}, N = {n}, family on [1,{}]", fam.n)));
    }
    budget.check_enumeration(crate::budget::pow_u128(2, (t * n) as u32))?;
    let total = 1u64 << (t * n);

    let mut classes: HashMap<u64, u64> = HashMap::new();
    let mut start = 0u64;
    if let Some(path) = opts.checkpoint {
        if path.exists() {
            let cp: Checkpoint = serde_json::from_str(&std::fs::read_to_string(path)?)?;
            if cp.t != t || cp.n != n || cp.family != fam.subsets {
                return Err(Error::invalid(format!("checkpoint {} belongs to another sweep", path.display())));
            }
            start = cp.next_code;
            classes = cp.classes.into_iter().collect();
        }
    }
    const SUB: u64 = 1 << 14;
    let first = start;
    while start < total {
        if opts.stop_after.is_some_and(|limit| start - first >= limit) {
            return Ok(None);
        }
        let end = (start + CHECKPOINT_INTERVAL).min(total);
        let parts: Vec<HashMap<u64, u64>> = (start..end)
            .step_by(SUB as usize)
            .collect::<Vec<_>>()
            .into_par_iter()
            .map(|lo| {
                let mut local: HashMap<u64, u64> = HashMap::new();
                let mut rows = vec![0u64; t];
                for code in lo..(lo + SUB).min(end) {
                    let mask = (1u64 << n) - 1;
                    for (s, r) in rows.iter_mut().enumerate() {
                        *r = code >> (n * (t - 1 - s)) & mask;
                    }
                    *local.entry(pack_sorted(&mut rows, n)).or_insert(0) += 1;
                }
                local
            })
            .collect();
        for p in parts {
            for (c, m) in p {
                *classes.entry(c).or_insert(0) += m;
            }
        }
        start = end;
        if let Some(path) = opts.checkpoint {
            if start < total {
                let mut sorted: Vec<(u64, u64)> = classes.iter().map(|(&a, &b)| (a, b)).collect();
                sorted.sort_unstable();
                let cp = Checkpoint { t, n, family: fam.subsets.clone(), next_code: start, classes: sorted };
                let tmp = path.with_extension("tmp");
                std::fs::write(&tmp, serde_json::to_string(&cp)?)?;
                std::fs::rename(&tmp, path)?;
            }
        }
        if let Some(f) = opts.progress {
            f(start, total);
        }
    }
    if let Some(path) = opts.checkpoint {
        if path.exists() {
            std::fs::remove_file(path)?;
        }
    }
    let mut buckets: HashMap<Vec<u64>, (u64, u64)> = HashMap::new();
    let mut key = Vec::new();
    for (&c, &m) in &classes {
        family_key(&unpack(c, t, n), n, fam, &mut key);
        let e = buckets.entry(key.clone()).or_insert((0, 0));
        e.0 += m;
        e.1 += m * m;
    }
    Ok(Some(buckets.values().map(|&(s, sq)| s * s - sq).sum()))
}

/// Pair-by-pair count from [`canonical_omega`]; the cross-check for
/// [`lambda_count`]. Limited to `2^{tN} ≤ 2^16`.
pub fn lambda_count_naive(t: usize, n: usize, fam: &IndexFamily) -> Result<u64> {
    if t * n > 16 {
        return Err(Error::BudgetExceeded { what: "naive enumeration", required: 1 << (t * n).min(100), cap: 1 << 16 });
    }
    let mats: Vec<BinaryMatrix> = (0..1u64 << (t * n)).map(|c| BinaryMatrix::from_code(c, t, n)).collect();
    let keys: Vec<Vec<Vec<u64>>> = mats
        .iter()
        .map(|k| fam.subsets.iter().map(|s| canonical_omega(k, s)).collect::<Result<_>>())
        .collect::<Result<_>>()?;
    let sorted: Vec<Vec<u64>> = mats.iter().map(|k| k.sorted_rows()).collect();
    Ok((0..mats.len())
        .into_par_iter()
        .map(|i| (0..mats.len()).filter(|&j| keys[i] == keys[j] && sorted[i] != sorted[j]).count() as u64)
        .sum())
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GrowthPoint {
    pub t: usize,
    pub n: usize,
    pub lambda: u64,
    /// `t!² 8^N`; at `t = 4` this is the count over `C₀ ∪ C₁` column pairs.
    pub pair_bound: f64,
    /// `2^{2t² + (t−1)N}`.
    pub isometry_bound: f64,
    /// `Λ(N) / Λ(N−1)` when the previous value is nonzero.
    pub ratio: Option<f64>,
}

/// `Λ₂(t, N)` for `N = 2 ..= n_max` (the family of pairs is empty at N = 1).
pub fn lambda_growth(t: usize, n_max: usize, budget: &Budget) -> Result<Vec<GrowthPoint>> {
    let tf: f64 = (1..=t).map(|x| x as f64).product();
    let mut out: Vec<GrowthPoint> = Vec::new();
    for n in 2..=n_max {
        let lambda = lambda_count(t, n, &IndexFamily::complete(n, 2)?, budget)?;
        let ratio = out.last().filter(|p| p.lambda > 0).map(|p| lambda as f64 / p.lambda as f64);
        out.push(GrowthPoint {
            t,
            n,
            lambda,
            pair_bound: tf * tf * 8f64.powi(n as i32),
            isometry_bound: 2f64.powi((2 * t * t + (t - 1) * n) as i32),
            ratio,
        });
    }
    Ok(out)
}

/// Column pairs allowed after row rearrangement when `t = 4`.
pub const C0: [(u64, u64); 6] = [(0b0000, 0b0000), (0b1111, 0b1111), (0b0011, 0b0011), (0b1100, 0b1100), (0b1010, 0b1010), (0b0101, 0b0101)];
pub const C1: [(u64, u64); 2] = [(0b0110, 0b1001), (0b1001, 0b0110)];

/// Whether some `π, σ ∈ S_4` put every column pair of `(K_π, K'_σ)` in `C₀ ∪ C₁`.
pub fn fits_c0_c1(k: &BinaryMatrix, k2: &BinaryMatrix) -> Result<bool> {
    check_dims(k, k2)?;
    if k.t != 4 {
        return Err(Error::invalid("the C₀ ∪ C₁ characterisation is for t = 4"));
    }
    let allowed: Vec<(u64, u64)> = C0.iter().chain(C1.iter()).copied().collect();
    let perms = Permutation::all(4);
    for p in &perms {
        let a = k.permute_rows(p).columns();
        for q in &perms {
            let b = k2.permute_rows(q).columns();
            if a.iter().zip(&b).all(|(&x, &y)| allowed.contains(&(x, y))) {
                return Ok(true);
            }
        }
    }
    Ok(false)
}

/// `k⃗_i · k⃗_j` for all column pairs.
pub fn column_gram(k: &BinaryMatrix) -> Vec<u32> {
    let cols = k.columns();
    let mut g = Vec::with_capacity(cols.len() * cols.len());
    for &a in &cols {
        for &b in &cols {
            g.push((a & b).count_ones());
        }
    }
    g
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct OrthogonalCandidate {
    pub t: usize,
    /// Row-major `t×t`.
    pub matrix: Vec<f64>,
    /// Rank of the exactly-computed part (the span of the columns).
    pub exact_rank: usize,
    pub is_permutation: bool,
    pub source: (BinaryMatrix, BinaryMatrix),
}

impl OrthogonalCandidate {
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.matrix[i * self.t + j]
    }

    /// `max |OᵀO − I|`.
    pub fn orthogonality_defect(&self) -> f64 {
        let t = self.t;
        let mut worst: f64 = 0.0;
        for i in 0..t {
            for j in 0..t {
                let s: f64 = (0..t).map(|k| self.get(k, i) * self.get(k, j)).sum();
                worst = worst.max((s - if i == j { 1.0 } else { 0.0 }).abs());
            }
        }
        worst
    }

    pub fn apply(&self, v: &[f64]) -> Vec<f64> {
        (0..self.t).map(|i| (0..self.t).map(|j| self.get(i, j) * v[j]).sum()).collect()
    }
}

type Q = Ratio<i64>;

fn bits_to_vec(col: u64, t: usize) -> Vec<Q> {
    (0..t).map(|s| Q::from_integer((col >> (t - 1 - s) & 1) as i64)).collect()
}

/// Indices of a maximal linearly independent prefix-greedy set of columns.
fn independent_columns(cols: &[Vec<Q>]) -> Vec<usize> {
    let mut basis: Vec<(usize, Vec<Q>)> = Vec::new(); // (pivot, reduced row)
    let mut chosen = Vec::new();
    for (idx, c) in cols.iter().enumerate() {
        let mut v = c.clone();
        for (p, b) in &basis {
            if v[*p] != Q::from_integer(0) {
                let f = v[*p] / b[*p];
                for (x, y) in v.iter_mut().zip(b) {
                    *x -= f * y;
                }
            }
        }
        if let Some(p) = v.iter().position(|x| *x != Q::from_integer(0)) {
            basis.push((p, v));
            chosen.push(idx);
        }
    }
    chosen
}

fn invert(m: &[Q], r: usize) -> Vec<Q> {
    let zero = Q::from_integer(0);
    let one = Q::from_integer(1);
    let mut a = m.to_vec();
    let mut inv: Vec<Q> = (0..r * r).map(|i| if i / r == i % r { one } else { zero }).collect();
    for c in 0..r {
        let p = (c..r).find(|&i| a[i * r + c] != zero).expect("Gram of independent columns is invertible");
        for j in 0..r {
            a.swap(c * r + j, p * r + j);
            inv.swap(c * r + j, p * r + j);
        }
        let d = a[c * r + c];
        for j in 0..r {
            a[c * r + j] /= d;
            inv[c * r + j] /= d;
        }
        for i in 0..r {
            if i != c && a[i * r + c] != zero {
                let f = a[i * r + c];
                for j in 0..r {
                    let (x, y) = (a[c * r + j], inv[c * r + j]);
                    a[i * r + j] -= f * x;
                    inv[i * r + j] -= f * y;
                }
            }
        }
    }
    inv
}

/// `B G⁻¹ Aᵀ` for `t×r` column lists `A`, `B` and `r×r` inverse `G⁻¹`.
fn sandwich(b: &[Vec<Q>], ginv: &[Q], a: &[Vec<Q>], t: usize) -> Vec<Q> {
    let r = a.len();
    let mut out = vec![Q::from_integer(0); t * t];
    for i in 0..t {
        for j in 0..t {
            let mut s = Q::from_integer(0);
            for p in 0..r {
                for q in 0..r {
                    s += b[p][i] * ginv[p * r + q] * a[q][j];
                }
            }
            out[i * t + j] = s;
        }
    }
    out
}

/// Orthonormal basis of the complement of `span(cols)`, from projecting
/// `e_1, e_2, …` in order and orthonormalising.
fn complement_basis(proj: &[Q], t: usize, want: usize) -> Vec<Vec<f64>> {
    let mut out: Vec<Vec<f64>> = Vec::new();
    for i in 0..t {
        if out.len() == want {
            break;
        }
        let mut v: Vec<f64> = (0..t)
            .map(|j| {
                let e = if i == j { 1.0 } else { 0.0 };
                e - to_f64(proj[j * t + i])
            })
            .collect();
        for _ in 0..2 {
            for q in &out {
                let r: f64 = q.iter().zip(&v).map(|(a, b)| a * b).sum();
                v.iter_mut().zip(q).for_each(|(x, y)| *x -= r * y);
            }
        }
        let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if norm > 1e-9 {
            v.iter_mut().for_each(|x| *x /= norm);
            out.push(v);
        }
    }
    out
}

fn to_f64(q: Q) -> f64 {
    *q.numer() as f64 / *q.denom() as f64
}

/// An orthogonal `O` with `OK = K'`, or `None` when the column Gram matrices
/// differ.
///
/// The span part `K'_B G_B⁻¹ K_Bᵀ` is exact over the rationals; the complement
/// part pairs canonical orthonormal bases of the two orthogonal complements.
pub fn partial_isometry(k: &BinaryMatrix, k2: &BinaryMatrix) -> Result<Option<OrthogonalCandidate>> {
    check_dims(k, k2)?;
    if column_gram(k) != column_gram(k2) {
        return Ok(None);
    }
    let t = k.t;
    let a: Vec<Vec<Q>> = k.columns().into_iter().map(|c| bits_to_vec(c, t)).collect();
    let b: Vec<Vec<Q>> = k2.columns().into_iter().map(|c| bits_to_vec(c, t)).collect();
    let idx = independent_columns(&a);
    let r = idx.len();
    let ab: Vec<Vec<Q>> = idx.iter().map(|&i| a[i].clone()).collect();
    let bb: Vec<Vec<Q>> = idx.iter().map(|&i| b[i].clone()).collect();
    let gram: Vec<Q> = (0..r * r)
        .map(|x| ab[x / r].iter().zip(&ab[x % r]).map(|(p, q)| p * q).sum())
        .collect();
    let ginv = if r > 0 { invert(&gram, r) } else { Vec::new() };
    let span = sandwich(&bb, &ginv, &ab, t);
    let proj_a = sandwich(&ab, &ginv, &ab, t);
    let proj_b = sandwich(&bb, &ginv, &bb, t);
    let ua = complement_basis(&proj_a, t, t - r);
    let ub = complement_basis(&proj_b, t, t - r);
    let mut m: Vec<f64> = span.iter().map(|&q| to_f64(q)).collect();
    for (u, w) in ua.iter().zip(&ub) {
        for i in 0..t {
            for j in 0..t {
                m[i * t + j] += w[i] * u[j];
            }
        }
    }
    let is_permutation = (0..t).all(|j| {
        let col: Vec<f64> = (0..t).map(|i| m[i * t + j]).collect();
        col.iter().filter(|x| (**x - 1.0).abs() < 1e-9).count() == 1 && col.iter().filter(|x| x.abs() < 1e-9).count() == t - 1
    });
    Ok(Some(OrthogonalCandidate { t, matrix: m, exact_rank: r, is_permutation, source: (k.clone(), k2.clone()) }))
}

/// `|{k ∈ {0,1}^t : O k ∈ {0,1}^t}|`.
pub fn hypercube_preserved_count(o: &OrthogonalCandidate) -> Result<usize> {
    let t = o.t;
    if t > 20 {
        return Err(Error::BudgetExceeded { what: "hypercube enumeration", required: 1 << t.min(100), cap: 1 << 20 });
    }
    Ok((0..1u64 << t)
        .into_par_iter()
        .filter(|&v| {
            let x: Vec<f64> = (0..t).map(|s| (v >> (t - 1 - s) & 1) as f64).collect();
            o.apply(&x).iter().all(|y| y.abs() <= HYPERCUBE_TOL || (y - 1.0).abs() <= HYPERCUBE_TOL)
        })
        .count())
}

/// Every ordered pair of `t×N` matrices with equal column Gram matrices that
/// are not row permutations, grouped by Gram bucket.
pub fn gram_equal_pairs(t: usize, n: usize, budget: &Budget) -> Result<Vec<(BinaryMatrix, BinaryMatrix)>> {
    budget.check_enumeration(1u128 << (t * n))?;
    let mut buckets: BTreeMap<Vec<u32>, Vec<BinaryMatrix>> = BTreeMap::new();
    for code in 0..1u64 << (t * n) {
        let k = BinaryMatrix::from_code(code, t, n);
        buckets.entry(column_gram(&k)).or_default().push(k);
    }
    let mut out = Vec::new();
    for group in buckets.values() {
        for a in group {
            for b in group {
                if a.sorted_rows() != b.sorted_rows() {
                    out.push((a.clone(), b.clone()));
                }
            }
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fam2(n: usize) -> IndexFamily {
        IndexFamily::complete(n, 2).unwrap()
    }

    #[test]
    fn omega_examples() {
        let k = BinaryMatrix::from_bits(&[&[0, 1], &[1, 0], &[0, 0]]).unwrap();
        assert_eq!(canonical_omega(&k, &[1, 2]).unwrap(), vec![0, 1, 2]);
        let single = BinaryMatrix::from_bits(&[&[1, 0, 1, 1]]).unwrap();
        assert_eq!(canonical_omega(&single, &[1, 3, 4]).unwrap(), vec![0b111]);
        assert!(canonical_omega(&k, &[]).is_err());
    }

    #[test]
    fn family_construction() {
        let f = IndexFamily::complete(4, 2).unwrap();
        assert_eq!(f.subsets().len(), 6);
        assert_eq!(f.subsets()[0], vec![1, 2]);
        assert!(IndexFamily::new(3, vec![vec![1, 2], vec![2, 1]]).is_err());
        assert!(IndexFamily::new(3, vec![vec![4]]).is_err());
        assert!(IndexFamily::new(3, vec![vec![]]).is_err());
    }

    #[test]
    fn small_lambda_values() {
        let b = Budget::default();
        assert_eq!(lambda_count(2, 2, &fam2(2), &b).unwrap(), 0);
        assert_eq!(lambda_count(3, 4, &fam2(4), &b).unwrap(), 0);
        assert_eq!(lambda_count(4, 3, &fam2(3), &b).unwrap(), lambda_count_naive(4, 3, &fam2(3)).unwrap());
    }

    #[test]
    fn isometry_for_c1_pair() {
        let k = BinaryMatrix::from_columns(4, &[0b0110, 0b1001]).unwrap();
        let k2 = BinaryMatrix::from_columns(4, &[0b1001, 0b0110]).unwrap();
        let o = partial_isometry(&k, &k2).unwrap().unwrap();
        assert!(o.orthogonality_defect() < 1e-12);
        assert!(!o.is_permutation || o.exact_rank == 2);
        for (c, c2) in k.columns().iter().zip(k2.columns()) {
            let x: Vec<f64> = (0..4).map(|s| (c >> (3 - s) & 1) as f64).collect();
            let y = o.apply(&x);
            for s in 0..4 {
                assert!((y[s] - (c2 >> (3 - s) & 1) as f64).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn isometry_identity_and_mismatch() {
        let k = BinaryMatrix::from_columns(3, &[0b011, 0b101]).unwrap();
        let o = partial_isometry(&k, &k).unwrap().unwrap();
        assert!(o.is_permutation);
        assert_eq!(hypercube_preserved_count(&o).unwrap(), 8);
        let k2 = BinaryMatrix::from_columns(3, &[0b001, 0b101]).unwrap();
        assert!(partial_isometry(&k, &k2).unwrap().is_none());
    }

    #[test]
    fn checkpoint_resume_matches() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("sweep.json");
        let fam = fam2(6);
        let b = Budget::default();
        let stop = SweepOptions { checkpoint: Some(&path), stop_after: Some(3 << 20), ..Default::default() };
        assert_eq!(lambda_count_with(4, 6, &fam, &b, stop).unwrap(), None);
        let cp: Checkpoint = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
        assert_eq!(cp.next_code, 3 << 20);
        let seen = std::sync::Mutex::new(Vec::new());
        let progress = |d: u64, _t: u64| seen.lock().unwrap().push(d);
        let resume = SweepOptions { checkpoint: Some(&path), progress: Some(&progress), stop_after: None };
        let a = lambda_count_with(4, 6, &fam, &b, resume).unwrap();
        assert_eq!(a, Some(lambda_count(4, 6, &fam, &b).unwrap()));
        assert!(!path.exists());
        assert_eq!(seen.lock().unwrap().len(), 13);
        let other = SweepOptions { checkpoint: Some(&path), stop_after: Some(1), ..Default::default() };
        lambda_count_with(4, 6, &fam, &b, other).unwrap();
        assert!(lambda_count_with(4, 6, &fam2(5).clone(), &b, SweepOptions { checkpoint: Some(&path), ..Default::default() }).is_err());
    }
}
