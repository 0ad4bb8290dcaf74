//! The piecewise-constant Hamiltonian `H_XZ`: Z-type and X-type Ising
//! intervals of length π with couplings and fields drawn from finite grids.
//!
//! Time is measured so that each interval has length π.

use crate::budget::{pow_u128, Budget};
use crate::error::{Error, Result};
use crate::linalg::{hermitian_eigenvalues, operator_norm, ComplexMatrix, TensorLayout, C64, ONE};
use crate::moment::{ceil_snapped, projector_p0, rearrangement_labels, PermutationSubspace};
use crate::rdc::{diagonal_left, hadamard_left};
use crate::structured::{Block, BlockProduct};
use num_rational::Ratio;
use rand::Rng;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

type Q = Ratio<i64>;

/// Which grid the couplings and fields are drawn from.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GridChoice {
    /// `B ∈ {m/s : 0 ≤ m ≤ 2⌊t/2⌋+1}`, `J ∈ {m/s : 0 ≤ m ≤ ⌊t/2⌋}`, `s = 2(⌊t/2⌋+1)`.
    Proof,
    /// `{m/s : m ∈ −c + ℤ, |m| ≤ c}`, the symmetric grid stepped from `−c`.
    SymmetricLattice,
    /// `{m/s : m ∈ ℤ, |m| ≤ c}`.
    SymmetricInteger,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ParameterGrid {
    pub t: usize,
    pub values: Vec<Q>,
}

fn step(t: usize) -> i64 {
    2 * (t as i64 / 2 + 1)
}

/// `⌊t/2⌋/2`, the coupling half-width.
pub fn coupling_half_width(t: usize) -> Q {
    Q::new(t as i64 / 2, 2)
}

/// `⌊t/2⌋ + 1/2`, the field half-width.
pub fn field_half_width(t: usize) -> Q {
    Q::new(2 * (t as i64 / 2) + 1, 2)
}

impl ParameterGrid {
    fn from_numerators(t: usize, mut nums: Vec<Q>) -> Self {
        let s = Q::from_integer(step(t));
        nums.sort();
        nums.dedup();
        ParameterGrid { t, values: nums.into_iter().map(|m| m / s).collect() }
    }

    /// Symmetric grid of half-width `c`.
    pub fn symmetric(t: usize, c: Q, lattice: bool) -> Self {
        let nums = if lattice {
            let count = (c * 2).floor().to_integer();
            (0..=count).map(|j| -c + j).collect()
        } else {
            let m = c.floor().to_integer();
            (-m..=m).map(Q::from_integer).collect()
        };
        Self::from_numerators(t, nums)
    }

    pub fn proof_fields(t: usize) -> Self {
        Self::from_numerators(t, (0..step(t)).map(Q::from_integer).collect())
    }

    pub fn proof_couplings(t: usize) -> Self {
        Self::from_numerators(t, (0..=t as i64 / 2).map(Q::from_integer).collect())
    }

    pub fn fields(t: usize, choice: GridChoice) -> Self {
        match choice {
            GridChoice::Proof => Self::proof_fields(t),
            GridChoice::SymmetricLattice => Self::symmetric(t, field_half_width(t), true),
            GridChoice::SymmetricInteger => Self::symmetric(t, field_half_width(t), false),
        }
    }

    pub fn couplings(t: usize, choice: GridChoice) -> Self {
        match choice {
            GridChoice::Proof => Self::proof_couplings(t),
            GridChoice::SymmetricLattice => Self::symmetric(t, coupling_half_width(t), true),
            GridChoice::SymmetricInteger => Self::symmetric(t, coupling_half_width(t), false),
        }
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn as_f64(&self) -> Vec<f64> {
        self.values.iter().map(|q| *q.numer() as f64 / *q.denom() as f64).collect()
    }
}

/// `−Σ_{j<k} J_{jk} P_j P_k − Σ_j B_j P_j` with `P = Z` or `X`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct IntervalHamiltonian {
    /// Pairs `j < k` in lexicographic order.
    pub couplings: Vec<f64>,
    pub fields: Vec<f64>,
}

impl IntervalHamiltonian {
    pub fn zero(n: usize) -> Self {
        IntervalHamiltonian { couplings: vec![0.0; n * (n - 1) / 2], fields: vec![0.0; n] }
    }

    /// `τ(Σ J z_j z_k + Σ B z_j)` at each computational basis state, so that
    /// `e^{−iτH_Z}` is `diag(e^{i·phase})`.
    pub fn phase_table(&self, n: usize, tau: f64) -> Vec<f64> {
        let dim = 1usize << n;
        let mut out = vec![0.0; dim];
        for (x, p) in out.iter_mut().enumerate() {
            let z = |j: usize| if x >> (n - 1 - j) & 1 == 1 { -1.0 } else { 1.0 };
            let mut acc = 0.0;
            let mut c = 0;
            for j in 0..n {
                for k in j + 1..n {
                    acc += self.couplings[c] * z(j) * z(k);
                    c += 1;
                }
                acc += self.fields[j] * z(j);
            }
            *p = tau * acc;
        }
        out
    }
}

/// Interval `m` runs over `[mπ, (m+1)π)`; even intervals are Z-type, odd are X-type.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HamiltonianSchedule {
    pub n_qubits: usize,
    pub t: usize,
    pub intervals: Vec<IntervalHamiltonian>,
}

/// JSON schedule: explicit tables, or a seed and grid for random draws.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScheduleDocument {
    pub n_qubits: usize,
    pub t: usize,
    pub interval_count: usize,
    pub grid: GridChoice,
    #[serde(default)]
    pub seed: Option<u64>,
    #[serde(default)]
    pub intervals: Option<Vec<IntervalHamiltonian>>,
}

impl ScheduleDocument {
    pub fn schedule(&self) -> Result<HamiltonianSchedule> {
        match (&self.intervals, self.seed) {
            (Some(iv), _) => {
                if iv.len() != self.interval_count {
                    return Err(Error::invalid("interval_count does not match the explicit tables"));
                }
                HamiltonianSchedule::new(self.n_qubits, self.t, iv.clone())
            }
            (None, Some(seed)) => {
                let mut rng = crate::rng::RandomSource::new(seed).stream(0);
                HamiltonianSchedule::random(self.n_qubits, self.t, self.interval_count, self.grid, &mut rng)
            }
            (None, None) => Err(Error::invalid("schedule needs explicit intervals or a seed")),
        }
    }
}

impl HamiltonianSchedule {
    pub fn new(n_qubits: usize, t: usize, intervals: Vec<IntervalHamiltonian>) -> Result<Self> {
        if n_qubits < 1 || n_qubits > 20 {
            return Err(Error::invalid(format!("N = {n_qubits}")));
        }
        for iv in &intervals {
            if iv.couplings.len() != n_qubits * (n_qubits - 1) / 2 || iv.fields.len() != n_qubits {
                return Err(Error::DimensionMismatch("interval tables do not match N".into()));
            }
            if iv.couplings.iter().chain(&iv.fields).any(|v| !v.is_finite() || v.abs() > 1.0) {
                return Err(Error::invalid("couplings and fields must lie in [−1, 1]"));
            }
        }
        Ok(HamiltonianSchedule { n_qubits, t, intervals })
    }

    pub fn random<R: Rng + ?Sized>(n: usize, t: usize, count: usize, choice: GridChoice, rng: &mut R) -> Result<Self> {
        let jg = ParameterGrid::couplings(t, choice).as_f64();
        let bg = ParameterGrid::fields(t, choice).as_f64();
        if jg.is_empty() || bg.is_empty() {
            return Err(Error::invalid("empty parameter grid"));
        }
        let intervals = (0..count)
            .map(|_| IntervalHamiltonian {
                couplings: (0..n * (n - 1) / 2).map(|_| jg[rng.random_range(0..jg.len())]).collect(),
                fields: (0..n).map(|_| bg[rng.random_range(0..bg.len())]).collect(),
            })
            .collect();
        Self::new(n, t, intervals)
    }

    pub fn duration(&self) -> f64 {
        self.intervals.len() as f64 * PI
    }
}

/// Overlap of `[t1, t2]` with interval `m`, in time units.
fn overlap(m: usize, t1: f64, t2: f64) -> f64 {
    let lo = t1.max(m as f64 * PI);
    let hi = t2.min((m + 1) as f64 * PI);
    (hi - lo).max(0.0)
}

fn check_window(sched: &HamiltonianSchedule, t1: f64, t2: f64) -> Result<()> {
    if !(t1 >= 0.0) || !(t2 >= t1) {
        return Err(Error::invalid(format!("time window [{t1}, {t2}]")));
    }
    if t2 > sched.duration() * (1.0 + 1e-12) {
        return Err(Error::invalid(format!("T = {t2} beyond the schedule's {} intervals", sched.intervals.len())));
    }
    Ok(())
}

/// The propagator from `t1` to `t2`, one commuting factor table per interval.
pub fn evolve_between(sched: &HamiltonianSchedule, t1: f64, t2: f64, budget: &Budget) -> Result<ComplexMatrix> {
    check_window(sched, t1, t2)?;
    let n = sched.n_qubits;
    budget.check_sample(1u128 << n)?;
    let mut u = ComplexMatrix::identity(1 << n);
    for (m, iv) in sched.intervals.iter().enumerate() {
        let tau = overlap(m, t1, t2);
        if tau == 0.0 {
            continue;
        }
        let d: Vec<C64> = iv.phase_table(n, tau).into_iter().map(|p| C64::from_polar(1.0, p)).collect();
        if m % 2 == 0 {
            diagonal_left(&mut u, &d);
        } else {
            hadamard_left(&mut u);
            diagonal_left(&mut u, &d);
            hadamard_left(&mut u);
        }
    }
    Ok(u)
}

/// `U_H(T)`.
pub fn evolve(sched: &HamiltonianSchedule, time: f64, budget: &Budget) -> Result<ComplexMatrix> {
    if time < 0.0 {
        return Err(Error::invalid(format!("negative time {time}")));
    }
    evolve_between(sched, 0.0, time, budget)
}

fn pauli_term(n: usize, sites: &[usize], p: &ComplexMatrix) -> ComplexMatrix {
    let id = ComplexMatrix::identity(2);
    let mut out = ComplexMatrix::identity(1);
    for j in 0..n {
        out = out.kron(if sites.contains(&j) { p } else { &id });
    }
    out
}

/// Largest operator-norm commutator among the terms of one interval, built
/// from explicit Pauli matrices.
pub fn commutator_defect(n: usize, iv: &IntervalHamiltonian, x_type: bool) -> Result<f64> {
    let p = if x_type {
        ComplexMatrix::new(2, vec![C64::new(0.0, 0.0), ONE, ONE, C64::new(0.0, 0.0)])?
    } else {
        ComplexMatrix::from_diagonal(&[ONE, -ONE])
    };
    let mut terms = Vec::new();
    let mut c = 0;
    for j in 0..n {
        for k in j + 1..n {
            terms.push(pauli_term(n, &[j, k], &p).scale(C64::new(-iv.couplings[c], 0.0)));
            c += 1;
        }
        terms.push(pauli_term(n, &[j], &p).scale(C64::new(-iv.fields[j], 0.0)));
    }
    let mut worst = 0.0f64;
    for a in 0..terms.len() {
        for b in a + 1..terms.len() {
            let comm = terms[a].mul(&terms[b]).sub(&terms[b].mul(&terms[a]));
            worst = worst.max(operator_norm(&comm)?);
        }
    }
    Ok(worst)
}

fn diag4(v: [C64; 4]) -> ComplexMatrix {
    ComplexMatrix::from_diagonal(&v)
}

fn phase(x: f64) -> C64 {
    C64::from_polar(1.0, x)
}

fn two_qubit_lhs(j: f64, bk: f64, bk2: f64) -> ComplexMatrix {
    let z = |x: usize| if x == 1 { -1.0 } else { 1.0 };
    let zz = diag4(std::array::from_fn(|x| phase(PI * j * z(x >> 1) * z(x & 1))));
    let single = |b: f64| ComplexMatrix::from_diagonal(&[phase(PI * b), phase(-PI * b)]);
    zz.mul(&single(bk).kron(&single(bk2)))
}

fn two_qubit_rhs(j: f64, first: f64, second: f64, bk: f64, bk2: f64) -> ComplexMatrix {
    let pre = phase(PI * (j + bk + bk2));
    let a = ComplexMatrix::from_diagonal(&[ONE, phase(-2.0 * PI * (j + first))]);
    let b = ComplexMatrix::from_diagonal(&[ONE, phase(-2.0 * PI * (j + second))]);
    let cz = diag4([ONE, ONE, ONE, phase(4.0 * PI * j)]);
    a.kron(&b).mul(&cz).scale(pre)
}

/// `e^{iπJ Z⊗Z}(e^{iπB_k Z} ⊗ e^{iπB_{k'} Z})` against
/// `e^{πi(J+B_k+B_{k'})}(diag{1,e^{−2πi(J+B_k)}} ⊗ diag{1,e^{−2πi(J+B_{k'})}}) diag{1,1,1,e^{4πiJ}}`,
/// first tensor factor on qubit `k`. Returns the entrywise max difference.
pub fn phase_decomposition_check(j: f64, bk: f64, bk2: f64) -> f64 {
    two_qubit_lhs(j, bk, bk2).max_abs_diff(&two_qubit_rhs(j, bk, bk2, bk, bk2))
}

/// The same comparison with the single-qubit phases attached the other way
/// round (`B_{k'}` on qubit `k`). This agrees only when `B_k ≡ B_{k'}` mod 1.
pub fn phase_decomposition_swapped(j: f64, bk: f64, bk2: f64) -> f64 {
    two_qubit_lhs(j, bk, bk2).max_abs_diff(&two_qubit_rhs(j, bk2, bk, bk, bk2))
}

/// Max of [`phase_decomposition_check`] over the proof grids.
pub fn phase_decomposition_sweep(t: usize) -> f64 {
    let bg = ParameterGrid::proof_fields(t).as_f64();
    let jg = ParameterGrid::proof_couplings(t).as_f64();
    let mut worst = 0.0f64;
    for &b1 in &bg {
        for &b2 in &bg {
            for &j in &jg {
                worst = worst.max(phase_decomposition_check(j, b1, b2));
            }
        }
    }
    worst
}

fn frac(q: Q) -> Q {
    q - q.floor()
}

/// Sorted multiset of `(−(J+B_{k'}), −(J+B_k), 2J) mod 1`, phases in units of 2π.
pub fn induced_phase_multiset(t: usize, choice: GridChoice) -> Vec<(Q, Q, Q)> {
    let bg = ParameterGrid::fields(t, choice).values;
    let jg = ParameterGrid::couplings(t, choice).values;
    let mut out = Vec::with_capacity(bg.len() * bg.len() * jg.len());
    for &bk in &bg {
        for &bk2 in &bg {
            for &j in &jg {
                out.push((frac(-(j + bk2)), frac(-(j + bk)), frac(j * 2)));
            }
        }
    }
    out.sort();
    out
}

/// Sorted `(m₁/a, m₂/a, m₃/b)` grid of the factored-discrete gate, units of 2π.
pub fn discrete_phase_grid(a: i64, b: i64) -> Vec<(Q, Q, Q)> {
    let mut out = Vec::with_capacity((a * a * b) as usize);
    for m1 in 0..a {
        for m2 in 0..a {
            for m3 in 0..b {
                out.push((Q::new(m1, a), Q::new(m2, a), Q::new(m3, b)));
            }
        }
    }
    out.sort();
    out
}

/// Ensemble mean of one interval's `U^{⊗t,t}` of duration `tau`, over
/// independent uniform draws from the grids, in the Z frame.
///
/// On label `(K, K')` the phase is `τ(Σ J_{jk} n_{jk} + Σ B_j n_j)`, with
/// `n_{jk} = Σ_s z_j z_k(k_s) − z_j z_k(l_s)` and `n_j` likewise, so the mean
/// factorises into per-parameter means of `e^{iτ J n}`.
pub fn interval_moment(n: usize, t: usize, tau: f64, choice: GridChoice, budget: &Budget) -> Result<Vec<C64>> {
    budget.check_labels(pow_u128(2, (2 * t * n) as u32))?;
    let jg = ParameterGrid::couplings(t, choice).as_f64();
    let bg = ParameterGrid::fields(t, choice).as_f64();
    if jg.is_empty() || bg.is_empty() {
        return Err(Error::invalid("empty parameter grid"));
    }
    let span = 4 * t + 1;
    let mean = |g: &[f64], k: i64| g.iter().map(|&v| phase(tau * v * k as f64)).sum::<C64>() / g.len() as f64;
    let avg_j: Vec<C64> = (0..span as i64).map(|k| mean(&jg, k - 2 * t as i64)).collect();
    let avg_b: Vec<C64> = (0..span as i64).map(|k| mean(&bg, k - 2 * t as i64)).collect();
    let layout = TensorLayout::new(1 << n, t);
    let half = layout.half();
    let pairs = n * (n - 1) / 2;
    // Per half-label: Σ_s z_j z_k for each pair, then Σ_s z_j for each qubit.
    let sums: Vec<Vec<i64>> = (0..half)
        .map(|code| {
            let mut v = vec![0i64; pairs + n];
            for s in 0..t {
                let row = code >> (n * (t - 1 - s));
                let z = |j: usize| if row >> (n - 1 - j) & 1 == 1 { -1i64 } else { 1 };
                let mut c = 0;
                for j in 0..n {
                    for k in j + 1..n {
                        v[c] += z(j) * z(k);
                        c += 1;
                    }
                    v[pairs + j] += z(j);
                }
            }
            v
        })
        .collect();
    let off = 2 * t as i64;
    use rayon::prelude::*;
    Ok((0..layout.dim())
        .into_par_iter()
        .map(|idx| {
            let (a, b) = (&sums[idx / half], &sums[idx % half]);
            let mut acc = ONE;
            for c in 0..pairs {
                acc *= avg_j[(a[c] - b[c] + off) as usize];
            }
            for j in 0..n {
                acc *= avg_b[(a[pairs + j] - b[pairs + j] + off) as usize];
            }
            acc
        })
        .collect())
}

/// `E[U_XZ(T)^{⊗t,t}]` as a block product, one block per (partial) interval.
pub fn hamiltonian_moment_at(n: usize, t: usize, time: f64, choice: GridChoice, budget: &Budget) -> Result<BlockProduct> {
    if !(time >= 0.0) {
        return Err(Error::invalid(format!("time {time}")));
    }
    let dim = pow_u128(2, (2 * t * n) as u32);
    budget.check_dense(dim)?;
    let count = ceil_snapped(time / PI) as usize;
    let mut full = None;
    let mut blocks = Vec::new();
    for m in 0..count {
        let tau = overlap(m, 0.0, time);
        if tau <= 0.0 {
            continue;
        }
        let d = if (tau - PI).abs() <= 1e-12 {
            if full.is_none() {
                full = Some(interval_moment(n, t, PI, choice, budget)?);
            }
            full.clone().unwrap()
        } else {
            interval_moment(n, t, tau, choice, budget)?
        };
        blocks.push(if m % 2 == 0 { Block::Diagonal(d) } else { Block::Conjugated(d) });
    }
    if blocks.is_empty() {
        blocks.push(Block::Diagonal(vec![ONE; dim as usize]));
    }
    BlockProduct::new(blocks)
}

/// `E[U_XZ(T_ℓ)^{⊗t,t}]` at `T_ℓ = (2ℓ+1)π`.
pub fn hamiltonian_moment(n: usize, t: usize, ell: usize, choice: GridChoice, budget: &Budget) -> Result<BlockProduct> {
    hamiltonian_moment_at(n, t, (2 * ell + 1) as f64 * PI, choice, budget)
}

/// `(2t + 1 + (2/N) log₂(1/ε)) π`.
pub fn design_time(t: usize, n: usize, eps: f64) -> Result<f64> {
    if t < 1 || n < 1 || !(eps > 0.0 && eps <= 1.0) {
        return Err(Error::invalid(format!("t = {t}, N = {n}, eps = {eps}")));
    }
    Ok((2.0 * t as f64 + 1.0 + 2.0 / n as f64 * (1.0 / eps).log2()) * PI)
}

/// `⌈t + log₂(1/ε)/N⌉`, the interval pairs needed before the design time.
pub fn design_repetitions(t: usize, n: usize, eps: f64) -> Result<usize> {
    design_time(t, n, eps)?;
    Ok(ceil_snapped(t as f64 + (1.0 / eps).log2() / n as f64).max(1.0) as usize)
}

/// `||M − P₀||` for a block product that starts and ends on diagonal blocks
/// and fixes `P₀`; evaluated on the support of those blocks.
pub fn lattice_residual(m: &BlockProduct, n: usize, t: usize, budget: &Budget) -> Result<f64> {
    let mut labels = m.end_support().ok_or_else(|| Error::invalid("moment does not end on diagonal blocks"))?;
    labels.extend(rearrangement_labels(1 << n, t));
    labels.sort_unstable();
    labels.dedup();
    budget.check_structured(labels.len() as u128)?;
    let c = m.compressed(&labels);
    let p0 = PermutationSubspace::new(1 << n, t)?.compressed(&labels);
    let s = labels.len();
    let diff = ComplexMatrix::from_fn(s, |i, j| c.get(i, j) - C64::new(p0[i * s + j], 0.0));
    Ok(hermitian_eigenvalues(&diff)?.iter().fold(0.0, |a: f64, x| a.max(x.abs())))
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Certificate {
    pub n_qubits: usize,
    pub t: usize,
    pub eps: f64,
    pub repetitions: usize,
    pub design_time: f64,
    pub residual: f64,
    /// `d^t ||(I−P₀)M(I−P₀)||`.
    pub value: f64,
}

/// The diamond-norm certificate at the threshold lattice time.
pub fn design_certificate(n: usize, t: usize, eps: f64, choice: GridChoice, budget: &Budget) -> Result<Certificate> {
    let ell = design_repetitions(t, n, eps)?;
    let m = hamiltonian_moment(n, t, ell, choice, budget)?;
    let residual = lattice_residual(&m, n, t, budget)?;
    Ok(Certificate {
        n_qubits: n,
        t,
        eps,
        repetitions: ell,
        design_time: design_time(t, n, eps)?,
        residual,
        value: residual * 2f64.powi((n * t) as i32),
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Closure {
    pub at_lattice: f64,
    pub after: f64,
    pub holds: bool,
}

/// `||E[U(T_ℓ+δ)^{⊗t,t}] − P₀||` against `||E[U(T_ℓ)^{⊗t,t}] − P₀||`, dense.
pub fn post_threshold_closure(n: usize, t: usize, ell: usize, delta: f64, choice: GridChoice, budget: &Budget) -> Result<Closure> {
    if !(0.0..2.0 * PI).contains(&delta) {
        return Err(Error::invalid(format!("δ = {delta} outside [0, 2π)")));
    }
    let p0 = projector_p0(1 << n, t, budget)?.to_dense(budget)?;
    let t_ell = (2 * ell + 1) as f64 * PI;
    let dist = |time: f64| -> Result<f64> {
        let m = hamiltonian_moment_at(n, t, time, choice, budget)?.to_dense(budget)?;
        operator_norm(&m.sub(&p0))
    };
    let at_lattice = dist(t_ell)?;
    let after = if delta == 0.0 { at_lattice } else { dist(t_ell + delta)? };
    Ok(Closure { at_lattice, after, holds: after <= at_lattice + 1e-9 })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::RandomSource;

    #[test]
    fn grid_sizes() {
        for t in 1..=8 {
            let h = t / 2;
            assert_eq!(ParameterGrid::proof_fields(t).len(), 2 * h + 2);
            assert_eq!(ParameterGrid::proof_couplings(t).len(), h + 1);
            assert_eq!(ParameterGrid::fields(t, GridChoice::SymmetricLattice).len(), 2 * h + 2);
            assert_eq!(ParameterGrid::couplings(t, GridChoice::SymmetricLattice).len(), h + 1);
            assert_eq!(ParameterGrid::fields(t, GridChoice::SymmetricInteger).len(), 2 * h + 1);
        }
        assert_eq!(ParameterGrid::couplings(2, GridChoice::SymmetricInteger).values, vec![Q::from_integer(0)]);
        assert_eq!(ParameterGrid::couplings(2, GridChoice::SymmetricLattice).values, vec![Q::new(-1, 8), Q::new(1, 8)]);
    }

    #[test]
    fn trivial_evolutions() {
        let b = Budget::default();
        let s = HamiltonianSchedule::random(3, 2, 4, GridChoice::Proof, &mut RandomSource::new(5).stream(0)).unwrap();
        assert!(evolve(&s, 0.0, &b).unwrap().max_abs_diff(&ComplexMatrix::identity(8)) < 1e-15);
        let z = HamiltonianSchedule::new(3, 2, vec![IntervalHamiltonian::zero(3); 3]).unwrap();
        assert!(evolve(&z, 2.5 * PI, &b).unwrap().max_abs_diff(&ComplexMatrix::identity(8)) < 1e-14);
        assert!(evolve(&s, -1.0, &b).is_err());
        assert!(evolve(&s, 5.0 * PI, &b).is_err());
    }

    #[test]
    fn z_interval_matches_closed_form() {
        let iv = IntervalHamiltonian { couplings: vec![0.375], fields: vec![0.125, -0.625] };
        let s = HamiltonianSchedule::new(2, 2, vec![iv.clone()]).unwrap();
        let u = evolve(&s, PI, &Budget::default()).unwrap();
        for x in 0..4usize {
            let z1 = if x >> 1 == 1 { -1.0 } else { 1.0 };
            let z2 = if x & 1 == 1 { -1.0 } else { 1.0 };
            let want = phase(PI * (0.375 * z1 * z2 + 0.125 * z1 - 0.625 * z2));
            assert!((u.get(x, x) - want).norm() < 1e-12);
        }
    }

    #[test]
    fn x_interval_matches_pauli_products() {
        let iv = IntervalHamiltonian { couplings: vec![0.3, -0.2, 0.7], fields: vec![0.1, 0.4, -0.9] };
        let sched = HamiltonianSchedule::new(3, 2, vec![IntervalHamiltonian::zero(3), iv.clone()]).unwrap();
        let tau = 0.8;
        let u = evolve_between(&sched, PI, PI + tau, &Budget::default()).unwrap();
        let x = ComplexMatrix::new(2, vec![C64::new(0.0, 0.0), ONE, ONE, C64::new(0.0, 0.0)]).unwrap();
        let exp = |c: f64, op: ComplexMatrix| {
            ComplexMatrix::identity(8).scale(C64::new((tau * c).cos(), 0.0)).add(&op.scale(C64::new(0.0, (tau * c).sin())))
        };
        let mut want = ComplexMatrix::identity(8);
        let mut c = 0;
        for j in 0..3 {
            for k in j + 1..3 {
                want = want.mul(&exp(iv.couplings[c], pauli_term(3, &[j, k], &x)));
                c += 1;
            }
            want = want.mul(&exp(iv.fields[j], pauli_term(3, &[j], &x)));
        }
        assert!(u.max_abs_diff(&want) < 1e-12);
    }

    #[test]
    fn decomposition_identity() {
        assert!(phase_decomposition_check(0.0, 0.0, 0.0) < 1e-15);
        for t in 1..=6 {
            assert!(phase_decomposition_sweep(t) <= 1e-12, "t = {t}");
        }
        // With the two single-qubit phases swapped the identity fails unless B_k = B_k'.
        assert!(phase_decomposition_swapped(0.25, 0.25, 0.25) < 1e-12);
        assert!(phase_decomposition_swapped(0.0, 0.25, 0.0) > 0.5);
    }

    #[test]
    fn proof_grid_phases_match_discrete_model() {
        for t in 1..=6 {
            let b = t as i64 / 2 + 1;
            assert_eq!(induced_phase_multiset(t, GridChoice::Proof), discrete_phase_grid(2 * b, b), "t = {t}");
            // The lattice reading is the proof grid shifted by (ΔB, ΔJ): a fixed diagonal gate.
            let (db, dj) = (field_half_width(t) / (2 * b), coupling_half_width(t) / (2 * b));
            let mut shifted: Vec<_> = discrete_phase_grid(2 * b, b)
                .into_iter()
                .map(|(x, y, z)| (frac(x + db + dj), frac(y + db + dj), frac(z - dj * 2)))
                .collect();
            shifted.sort();
            assert_eq!(induced_phase_multiset(t, GridChoice::SymmetricLattice), shifted, "t = {t}");
            assert_ne!(induced_phase_multiset(t, GridChoice::SymmetricInteger), discrete_phase_grid(2 * b, b));
        }
    }

    #[test]
    fn design_time_examples() {
        assert!((design_time(2, 4, 1.0).unwrap() - 5.0 * PI).abs() < 1e-12);
        assert!((design_time(2, 2, 0.25).unwrap() - 7.0 * PI).abs() < 1e-12);
        assert!((design_time(3, 1_000_000, 1.0).unwrap() - 7.0 * PI).abs() < 1e-12);
        assert!(design_time(2, 2, 0.0).is_err());
        assert_eq!(design_repetitions(2, 3, 1.0).unwrap(), 2);
    }

    #[test]
    fn interval_terms_commute() {
        let src = RandomSource::new(9);
        for n in 1..=3 {
            let s = HamiltonianSchedule::random(n, 3, 2, GridChoice::Proof, &mut src.stream(n as u64)).unwrap();
            for (m, iv) in s.intervals.iter().enumerate() {
                assert!(commutator_defect(n, iv, m % 2 == 1).unwrap() <= 1e-12);
            }
        }
    }

    #[test]
    fn closure_at_zero_is_equality() {
        let c = post_threshold_closure(2, 1, 1, 0.0, GridChoice::Proof, &Budget::default()).unwrap();
        assert_eq!(c.at_lattice, c.after);
    }
}
