//! Random diagonal circuits `RDC(𝓘)` and their exact moments.

use crate::budget::{pow_u128, Budget};
use crate::error::{Error, Result};
use crate::linalg::{hermitian_eigenvalues, ComplexMatrix, TensorLayout, C64, ONE, ZERO};
use crate::moment::{ceil_snapped, tpe_eta, DiagonalIndicator, MomentOperator, PermutationSubspace};
use crate::mub::pauli_xz_pair;
use crate::permcheck::{lambda_count, IndexFamily};
use crate::structured::{conjugation_kernel, walsh_hadamard, Block, BlockProduct};
use rand::Rng;
use serde::{Deserialize, Serialize};
use std::f64::consts::TAU;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum PhaseModel {
    /// Independent uniform phases on all `2^|I|` basis states of the gate.
    Continuous,
    /// `(diag{1,e^{iφ₁}} ⊗ diag{1,e^{iφ₂}}) diag{1,1,1,e^{iϑ}}` with
    /// `φ₁, φ₂ ∈ {2πm/a}` and `ϑ ∈ {2πm/b}`, on two qubits.
    FactoredDiscrete { a: u32, b: u32 },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Gate {
    /// Qubit positions from 1, ascending.
    pub qubits: Vec<usize>,
    pub phase: PhaseModel,
}

/// A diagonal layer `RDC(𝓘)` repeated as `(RDC(𝓘) H_N)^{2ℓ} RDC(𝓘)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CircuitSpec {
    pub n_qubits: usize,
    pub gates: Vec<Gate>,
    /// `ℓ`; zero means a single diagonal layer.
    pub repetitions: usize,
}

impl CircuitSpec {
    pub fn new(n_qubits: usize, gates: Vec<Gate>, repetitions: usize) -> Result<Self> {
        if n_qubits == 0 || n_qubits > 30 {
            return Err(Error::invalid(format!("N = {n_qubits}")));
        }
        let mut clean = Vec::with_capacity(gates.len());
        for mut g in gates {
            g.qubits.sort_unstable();
            if g.qubits.is_empty() || g.qubits[0] == 0 || *g.qubits.last().unwrap() > n_qubits {
                return Err(Error::invalid(format!("gate on {:?} outside [1,{n_qubits}]", g.qubits)));
            }
            if g.qubits.windows(2).any(|w| w[0] == w[1]) {
                return Err(Error::invalid("repeated qubit in a gate"));
            }
            if let PhaseModel::FactoredDiscrete { a, b } = g.phase {
                if g.qubits.len() != 2 || a == 0 || b == 0 {
                    return Err(Error::invalid("factored-discrete gates need two qubits and a, b ≥ 1"));
                }
            }
            clean.push(g);
        }
        Ok(CircuitSpec { n_qubits, gates: clean, repetitions })
    }

    /// One gate per index set of `fam`.
    pub fn from_family(fam: &IndexFamily, phase: PhaseModel, repetitions: usize) -> Result<Self> {
        let gates = fam.subsets().iter().map(|s| Gate { qubits: s.clone(), phase }).collect();
        Self::new(fam.n(), gates, repetitions)
    }

    /// The index sets the gates act on.
    pub fn family(&self) -> Result<IndexFamily> {
        let mut sets: Vec<Vec<usize>> = self.gates.iter().map(|g| g.qubits.clone()).collect();
        sets.sort();
        sets.dedup();
        let f = IndexFamily::new(self.n_qubits, sets)?;
        let full = IndexFamily::full(self.n_qubits)?;
        if f.subsets() == full.subsets() {
            return Ok(full);
        }
        for r in 1..=self.n_qubits {
            let c = IndexFamily::complete(self.n_qubits, r)?;
            if c.subsets() == f.subsets() {
                return Ok(c);
            }
        }
        Ok(f)
    }
}

/// Family descriptor inside a [`CircuitDocument`].
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum FamilyDescriptor {
    /// `"I<r>"` or `"full"`.
    Named(String),
    Explicit(Vec<Vec<usize>>),
}

impl FamilyDescriptor {
    pub fn resolve(&self, n: usize) -> Result<IndexFamily> {
        match self {
            FamilyDescriptor::Named(s) if s == "full" => IndexFamily::full(n),
            FamilyDescriptor::Named(s) => {
                let r = s
                    .strip_prefix('I')
                    .and_then(|r| r.parse().ok())
                    .ok_or_else(|| Error::invalid(format!("unknown family {s:?}")))?;
                IndexFamily::complete(n, r)
            }
            FamilyDescriptor::Explicit(sets) => IndexFamily::new(n, sets.clone()),
        }
    }
}

/// The JSON form of a circuit:
/// `{"n_qubits": 3, "t": 2, "family": "I2", "phase_model": {"kind": "continuous"}, "repetitions": 1}`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CircuitDocument {
    pub n_qubits: usize,
    pub t: usize,
    pub family: FamilyDescriptor,
    pub phase_model: PhaseModel,
    #[serde(default)]
    pub repetitions: usize,
}

impl CircuitDocument {
    pub fn spec(&self) -> Result<CircuitSpec> {
        CircuitSpec::from_family(&self.family.resolve(self.n_qubits)?, self.phase_model, self.repetitions)
    }
}

/// Exact moment of one diagonal layer: 0/1 over labels `(K, K')`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DiagonalMoment {
    pub n_qubits: usize,
    pub t: usize,
    pub indicator: DiagonalIndicator,
}

impl DiagonalMoment {
    pub fn layout(&self) -> TensorLayout {
        self.indicator.layout
    }

    pub fn value(&self, label: usize) -> f64 {
        if self.indicator.get(label) {
            1.0
        } else {
            0.0
        }
    }

    pub fn trace(&self) -> u64 {
        self.indicator.count()
    }

    pub fn as_vector(&self) -> Vec<C64> {
        (0..self.indicator.len()).map(|i| if self.indicator.get(i) { ONE } else { ZERO }).collect()
    }

    pub fn into_operator(self) -> MomentOperator {
        MomentOperator::Diagonal(self.indicator)
    }

    /// Run-length text: a header line, then `value count` per run.
    pub fn to_rle(&self) -> String {
        let mut out = format!("# rdc-moment n_qubits={} t={} labels={}\n", self.n_qubits, self.t, self.indicator.len());
        let mut i = 0;
        let n = self.indicator.len();
        while i < n {
            let v = self.indicator.get(i);
            let mut j = i;
            while j < n && self.indicator.get(j) == v {
                j += 1;
            }
            out.push_str(&format!("{} {}\n", v as u8, j - i));
            i = j;
        }
        out
    }

    pub fn from_rle(text: &str) -> Result<Self> {
        let mut lines = text.lines();
        let header = lines.next().ok_or_else(|| Error::invalid("empty moment file"))?;
        let field = |name: &str| -> Result<usize> {
            header
                .split_whitespace()
                .find_map(|w| w.strip_prefix(name).and_then(|v| v.strip_prefix('=')))
                .and_then(|v| v.parse().ok())
                .ok_or_else(|| Error::invalid(format!("missing {name} in header")))
        };
        let (n, t) = (field("n_qubits")?, field("t")?);
        let mut bits = Vec::new();
        for line in lines {
            let mut it = line.split_whitespace();
            let (Some(v), Some(c)) = (it.next(), it.next()) else { continue };
            let v = v == "1";
            let c: usize = c.parse().map_err(|_| Error::invalid(format!("bad run {line:?}")))?;
            bits.extend(std::iter::repeat_n(v, c));
        }
        let layout = TensorLayout::new(1 << n, t);
        if bits.len() != layout.dim() {
            return Err(Error::invalid("run lengths do not cover the label space"));
        }
        Ok(DiagonalMoment { n_qubits: n, t, indicator: DiagonalIndicator::from_fn(layout, |i| bits[i]) })
    }
}

/// Per-gate data of one half-label `K` that decides the moment.
fn gate_signature(rows: &[u64], n: usize, g: &Gate, out: &mut Vec<u64>) {
    match g.phase {
        PhaseModel::Continuous => {
            let mut vals: Vec<u64> = rows
                .iter()
                .map(|&r| g.qubits.iter().fold(0, |a, &i| a << 1 | (r >> (n - i) & 1)))
                .collect();
            vals.sort_unstable();
            out.push(vals.iter().fold(0u64, |a, &v| a << g.qubits.len() | v));
        }
        PhaseModel::FactoredDiscrete { .. } => {
            let (i, j) = (g.qubits[0], g.qubits[1]);
            let (mut wi, mut wj, mut c) = (0, 0, 0);
            for &r in rows {
                let (x, y) = (r >> (n - i) & 1, r >> (n - j) & 1);
                wi += x;
                wj += y;
                c += x & y;
            }
            out.extend_from_slice(&[wi, wj, c]);
        }
    }
}

/// `E[D^{⊗t,t}]` for one layer of the circuit.
///
/// Continuous gates give `[Ω(K_I) = Ω(K'_I)]`. A factored-discrete gate gives
/// `[a | n₁][a | n₂][b | n₃]`, where `n₁, n₂` are the differences in column
/// weight and `n₃` the difference in the count of rows reading `11`; this is
/// the mean of `e^{imφ}` over `φ ∈ {2πj/a}` applied to each phase.
pub fn rdc_moment(spec: &CircuitSpec, t: usize, budget: &Budget) -> Result<DiagonalMoment> {
    let n = spec.n_qubits;
    if t == 0 {
        return Err(Error::invalid("t must be positive"));
    }
    budget.check_labels(pow_u128(2, (2 * t * n) as u32))?;
    let layout = TensorLayout::new(1 << n, t);
    let half = layout.half();
    let mut sigs: Vec<Vec<u64>> = Vec::with_capacity(half);
    let mut rows = vec![0u64; t];
    for code in 0..half {
        for (s, r) in rows.iter_mut().enumerate() {
            *r = (code >> (n * (t - 1 - s))) as u64 & ((1u64 << n) - 1);
        }
        let mut sig = Vec::new();
        for g in &spec.gates {
            gate_signature(&rows, n, g, &mut sig);
        }
        sigs.push(sig);
    }
    let gates = &spec.gates;
    let indicator = DiagonalIndicator::from_fn(layout, |idx| {
        let (a, b) = (&sigs[idx / half], &sigs[idx % half]);
        let mut p = 0;
        for g in gates {
            match g.phase {
                PhaseModel::Continuous => {
                    if a[p] != b[p] {
                        return false;
                    }
                    p += 1;
                }
                PhaseModel::FactoredDiscrete { a: qa, b: qb } => {
                    let d = |x: u64, y: u64, m: u32| (x as i64 - y as i64).rem_euclid(m as i64) == 0;
                    if !(d(a[p], b[p], qa) && d(a[p + 1], b[p + 1], qa) && d(a[p + 2], b[p + 2], qb)) {
                        return false;
                    }
                    p += 3;
                }
            }
        }
        true
    });
    Ok(DiagonalMoment { n_qubits: n, t, indicator })
}

/// `P_Z`: the indicator of row-permutation pairs.
pub fn row_permutation_moment(n: usize, t: usize, budget: &Budget) -> Result<DiagonalMoment> {
    let spec = CircuitSpec::from_family(&IndexFamily::full(n)?, PhaseModel::Continuous, 0)?;
    rdc_moment(&spec, t, budget)
}

/// `Q_Z (W Q_Z W) Q_Z ⋯` with `2ℓ+1` layers, the moment of the whole circuit.
pub fn rdc_iterated_moment(spec: &CircuitSpec, t: usize, budget: &Budget) -> Result<BlockProduct> {
    let q = rdc_moment(spec, t, budget)?.as_vector();
    let blocks = (0..2 * spec.repetitions + 1)
        .map(|i| if i % 2 == 0 { Block::Diagonal(q.clone()) } else { Block::Conjugated(q.clone()) })
        .collect();
    BlockProduct::new(blocks)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EtaTilde {
    pub eta_tilde_exact: f64,
    pub lemma5_bound: f64,
    /// Gap of the ideal diagonal ensemble for `d = 2^N`.
    pub eta: f64,
    pub lambda: u64,
    /// False only if the bound is below 1 and exceeded beyond `1e-9`.
    pub holds: bool,
}

/// `||Q_Z Q_X Q_Z − P₀||` and the bound `η + 3t!Λ/2^{tN} + (Λ/2^{tN})²`.
///
/// `Q_Z Q_X Q_Z − P₀` lives on the support `S` of `Q_Z`, where its entries are
/// `f(a ⊕ b) − P₀(a, b)` with `f` the Walsh–Hadamard kernel of `Q_Z`.
pub fn eta_tilde(spec: &CircuitSpec, t: usize, budget: &Budget) -> Result<EtaTilde> {
    let n = spec.n_qubits;
    budget.check_dense(pow_u128(2, (2 * t * n) as u32))?;
    let q = rdc_moment(spec, t, budget)?;
    let support = q.indicator.support();
    budget.check_structured(support.len() as u128)?;
    let f = conjugation_kernel(&q.as_vector());
    let p0 = PermutationSubspace::new(1 << n, t)?.compressed(&support);
    let s = support.len();
    let m = ComplexMatrix::from_fn(s, |i, j| f[support[i] ^ support[j]] - C64::new(p0[i * s + j], 0.0));
    let ev = hermitian_eigenvalues(&m)?;
    let exact = ev.iter().fold(0.0, |a: f64, x| a.max(x.abs()));
    let eta = tpe_eta(&pauli_xz_pair(n, budget)?, t, budget)?.eta;
    let lambda = lambda_count(t, n, &spec.family()?, budget)?;
    let tf: f64 = (1..=t).map(|x| x as f64).product();
    let r = lambda as f64 / 2f64.powi((t * n) as i32);
    let bound = eta + 3.0 * tf * r + r * r;
    Ok(EtaTilde { eta_tilde_exact: exact, lemma5_bound: bound, eta, lambda, holds: bound >= 1.0 || exact <= bound + 1e-9 })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Resources {
    pub n_qubits: usize,
    pub t: usize,
    pub eps: f64,
    pub repetitions: u64,
    pub two_qubit_gates: u64,
    pub hadamard_layers: u64,
    /// Whole random bits: `2⌈log₂(t+1)⌉ + ⌈log₂(⌊t/2⌋+1)⌉` per gate.
    pub random_bits: u64,
    /// `2log₂(t+1) + log₂(⌊t/2⌋+1)` per gate, not rounded.
    pub random_bits_real: f64,
    /// `3log₂(t+1)` per gate.
    pub random_bits_bound: f64,
}

fn ceil_log2(x: u64) -> u64 {
    if x <= 1 {
        0
    } else {
        64 - (x - 1).leading_zeros() as u64
    }
}

/// Gate and randomness count of `(RDC_disc(𝓘₂) H_N)^{2ℓ} RDC_disc(𝓘₂)` at
/// `ℓ = ⌈t + log₂(1/ε)/N⌉`.
pub fn resource_count(n: usize, t: usize, eps: f64) -> Result<Resources> {
    if n < 2 || t < 1 || !(eps > 0.0 && eps <= 1.0) {
        return Err(Error::invalid(format!("N = {n}, t = {t}, eps = {eps}")));
    }
    let ell = ceil_snapped(t as f64 + (1.0 / eps).log2() / n as f64) as u64;
    let pairs = (n * (n - 1) / 2) as u64;
    let gates = (2 * ell + 1) * pairs;
    let tt = t as u64;
    let per_gate = 2 * ceil_log2(tt + 1) + ceil_log2(tt / 2 + 1);
    let real = 2.0 * ((t + 1) as f64).log2() + ((t / 2 + 1) as f64).log2();
    Ok(Resources {
        n_qubits: n,
        t,
        eps,
        repetitions: ell,
        two_qubit_gates: gates,
        hadamard_layers: 2 * ell,
        random_bits: gates * per_gate,
        random_bits_real: gates as f64 * real,
        random_bits_bound: gates as f64 * 3.0 * ((t + 1) as f64).log2(),
    })
}

/// Random phases of one diagonal layer, as the diagonal of a `2^N` unitary.
pub fn sample_layer<R: Rng + ?Sized>(spec: &CircuitSpec, rng: &mut R) -> Vec<C64> {
    let n = spec.n_qubits;
    let dim = 1usize << n;
    let mut phase = vec![0.0f64; dim];
    for g in &spec.gates {
        match g.phase {
            PhaseModel::Continuous => {
                let table: Vec<f64> = (0..1usize << g.qubits.len()).map(|_| rng.random::<f64>() * TAU).collect();
                for (x, p) in phase.iter_mut().enumerate() {
                    let local = g.qubits.iter().fold(0, |a, &i| a << 1 | (x >> (n - i) & 1));
                    *p += table[local];
                }
            }
            PhaseModel::FactoredDiscrete { a, b } => {
                let p1 = TAU * rng.random_range(0..a) as f64 / a as f64;
                let p2 = TAU * rng.random_range(0..a) as f64 / a as f64;
                let th = TAU * rng.random_range(0..b) as f64 / b as f64;
                let (i, j) = (g.qubits[0], g.qubits[1]);
                for (x, p) in phase.iter_mut().enumerate() {
                    let (u, v) = ((x >> (n - i) & 1) as f64, (x >> (n - j) & 1) as f64);
                    *p += p1 * u + p2 * v + th * u * v;
                }
            }
        }
    }
    phase.into_iter().map(|p| C64::from_polar(1.0, p)).collect()
}

/// Apply `H^{⊗N}` to every column of `u`.
pub(crate) fn hadamard_left(u: &mut ComplexMatrix) {
    let dim = u.dim();
    let s = 1.0 / (dim as f64).sqrt();
    let mut col = vec![ZERO; dim];
    for j in 0..dim {
        for (i, c) in col.iter_mut().enumerate() {
            *c = u.get(i, j);
        }
        walsh_hadamard(&mut col);
        for (i, c) in col.iter().enumerate() {
            u.set(i, j, c * s);
        }
    }
}

pub(crate) fn diagonal_left(u: &mut ComplexMatrix, diag: &[C64]) {
    for (i, d) in diag.iter().enumerate() {
        for j in 0..u.dim() {
            let x = u.get(i, j);
            u.set(i, j, x * d);
        }
    }
}

/// One realisation of the circuit as a dense unitary.
pub fn sample_circuit<R: Rng + ?Sized>(spec: &CircuitSpec, rng: &mut R, budget: &Budget) -> Result<ComplexMatrix> {
    let dim = 1usize << spec.n_qubits;
    budget.check_sample(dim as u128)?;
    let mut u = ComplexMatrix::identity(dim);
    for layer in 0..2 * spec.repetitions + 1 {
        if layer > 0 {
            hadamard_left(&mut u);
        }
        let d = sample_layer(spec, rng);
        diagonal_left(&mut u, &d);
    }
    Ok(u)
}
