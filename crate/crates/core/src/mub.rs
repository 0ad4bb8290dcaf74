//! Fourier-type pairs of bases: the computational basis `E` together with a
//! basis `F` whose overlap phases are additive in the first index.

use crate::budget::Budget;
use crate::error::{Error, Result};
use crate::linalg::{ComplexMatrix, C64};
use crate::rng::RandomSource;
use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;
use std::f64::consts::TAU;

/// Largest `d` for which [`verify_pair`] checks every triple.
pub const EXHAUSTIVE_LIMIT: usize = 256;
/// Triples drawn by [`verify_pair`] above [`EXHAUSTIVE_LIMIT`].
pub const SAMPLED_TRIPLES: usize = 100_000;
pub const DEFAULT_THRESHOLD: f64 = 1e-10;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub enum GroupLaw {
    /// Addition modulo d.
    Modular,
    /// Bitwise XOR; d must be a power of two.
    Xor,
    /// Arbitrary table `op[a*d + b]`. Used to feed broken laws to the checker.
    Table(Vec<usize>),
}

impl GroupLaw {
    pub fn op(&self, d: usize, a: usize, b: usize) -> usize {
        match self {
            GroupLaw::Modular => (a + b) % d,
            GroupLaw::Xor => a ^ b,
            GroupLaw::Table(t) => t[a * d + b],
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct FourierTypePair {
    d: usize,
    /// `θ[k*d + α]` in `[0, 2π)`.
    phases: Vec<f64>,
    group: GroupLaw,
    basis: ComplexMatrix,
}

impl FourierTypePair {
    /// Build from a phase table; `F_{kα} = e^{iθ_{kα}} / √d`.
    pub fn from_parts(d: usize, phases: Vec<f64>, group: GroupLaw) -> Result<Self> {
        if d < 2 || phases.len() != d * d {
            return Err(Error::invalid(format!("phase table of length {} for d = {d}", phases.len())));
        }
        if let GroupLaw::Table(t) = &group {
            if t.len() != d * d {
                return Err(Error::invalid("group table must be d×d"));
            }
        }
        let phases: Vec<f64> = phases.into_iter().map(|x| x.rem_euclid(TAU)).collect();
        let s = 1.0 / (d as f64).sqrt();
        let basis = ComplexMatrix::from_fn(d, |k, a| C64::from_polar(s, phases[k * d + a]));
        Ok(FourierTypePair { d, phases, group, basis })
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn phase(&self, k: usize, alpha: usize) -> f64 {
        self.phases[k * self.d + alpha]
    }

    pub fn phases(&self) -> &[f64] {
        &self.phases
    }

    pub fn group(&self) -> &GroupLaw {
        &self.group
    }

    pub fn add(&self, a: usize, b: usize) -> usize {
        self.group.op(self.d, a, b)
    }

    /// Group inverse, found by search.
    pub fn neg(&self, a: usize) -> Option<usize> {
        (0..self.d).find(|&b| self.add(a, b) == 0)
    }

    pub fn basis(&self) -> &ComplexMatrix {
        &self.basis
    }
}

/// The discrete Fourier basis: `θ_{kα} = 2πkα/d` with addition mod d.
pub fn fourier_pair(d: usize) -> Result<FourierTypePair> {
    if d < 2 {
        return Err(Error::invalid("fourier_pair needs d ≥ 2"));
    }
    let phases = (0..d * d)
        .map(|i| TAU * (((i / d) * (i % d)) % d) as f64 / d as f64)
        .collect();
    FourierTypePair::from_parts(d, phases, GroupLaw::Modular)
}

/// Pauli X and Z eigenbases on `n` qubits: `θ_{kα} = π·popcount(k & α)`.
pub fn pauli_xz_pair(n: usize, budget: &Budget) -> Result<FourierTypePair> {
    if n == 0 || n >= 31 {
        return Err(Error::invalid("pauli_xz_pair needs 1 ≤ N ≤ 30"));
    }
    budget.check_dense(1u128 << n)?;
    let d = 1usize << n;
    let phases = (0..d * d)
        .map(|i| if ((i / d) & (i % d)).count_ones() % 2 == 1 { std::f64::consts::PI } else { 0.0 })
        .collect();
    FourierTypePair::from_parts(d, phases, GroupLaw::Xor)
}

#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct Residuals {
    pub unitary: f64,
    pub unbiased: f64,
    pub additive: f64,
    /// Number of violated group axioms.
    pub group: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PairReport {
    pub unitary: bool,
    pub unbiased: bool,
    pub additive: bool,
    pub group: bool,
    pub exhaustive: bool,
    pub max_residuals: Residuals,
}

impl PairReport {
    pub fn passes(&self) -> bool {
        self.unitary && self.unbiased && self.additive && self.group
    }
}

fn phase_gap(x: f64) -> f64 {
    let r = x.rem_euclid(TAU);
    r.min(TAU - r)
}

/// Check every Fourier-type property; exhaustive for `d ≤ 256`.
pub fn verify_pair(p: &FourierTypePair, threshold: f64) -> PairReport {
    verify_pair_with(p, threshold, &RandomSource::default())
}

pub fn verify_pair_with(p: &FourierTypePair, threshold: f64, rng: &RandomSource) -> PairReport {
    let d = p.d;
    let f = &p.basis;
    let unitary = f.adjoint().mul(f).max_abs_diff(&ComplexMatrix::identity(d));
    let target = 1.0 / (d as f64).sqrt();
    let unbiased = f.data().iter().fold(0.0, |m: f64, x| m.max((x.norm() - target).abs()));
    let exhaustive = d <= EXHAUSTIVE_LIMIT;

    let in_range = (0..d * d).all(|i| p.add(i / d, i % d) < d);
    let (additive, group_faults) = if !in_range {
        (f64::INFINITY, 1.0)
    } else if exhaustive {
        let add = (0..d)
            .into_par_iter()
            .map(|k| {
                let mut worst: f64 = 0.0;
                for l in 0..d {
                    let kl = p.add(k, l);
                    for a in 0..d {
                        worst = worst.max(phase_gap(p.phase(kl, a) - p.phase(k, a) - p.phase(l, a)));
                    }
                }
                worst
            })
            .reduce(|| 0.0, f64::max);
        (add, group_faults(p))
    } else {
        let mut r = rng.stream(0);
        let mut worst: f64 = 0.0;
        let mut faults = 0.0;
        for _ in 0..SAMPLED_TRIPLES {
            let (k, l, a) = (r.random_range(0..d), r.random_range(0..d), r.random_range(0..d));
            let kl = p.add(k, l);
            worst = worst.max(phase_gap(p.phase(kl, a) - p.phase(k, a) - p.phase(l, a)));
            if p.add(k, l) != p.add(l, k) || p.add(p.add(k, l), a) != p.add(k, p.add(l, a)) {
                faults += 1.0;
            }
        }
        if (0..d).any(|a| p.add(0, a) != a) {
            faults += 1.0;
        }
        (worst, faults)
    };
    PairReport {
        unitary: unitary <= threshold,
        unbiased: unbiased <= threshold,
        additive: additive <= threshold,
        group: group_faults == 0.0,
        exhaustive,
        max_residuals: Residuals { unitary, unbiased, additive, group: group_faults },
    }
}

/// Identity, inverses, commutativity and associativity, over all elements.
fn group_faults(p: &FourierTypePair) -> f64 {
    let d = p.d;
    let mut faults = 0usize;
    faults += (0..d).filter(|&a| p.add(0, a) != a || p.add(a, 0) != a).count();
    faults += (0..d).filter(|&a| p.neg(a).is_none()).count();
    faults += (0..d * d).filter(|&i| p.add(i / d, i % d) != p.add(i % d, i / d)).count();
    faults += (0..d)
        .into_par_iter()
        .map(|a| {
            let mut n = 0;
            for b in 0..d {
                let ab = p.add(a, b);
                for c in 0..d {
                    if p.add(ab, c) != p.add(a, p.add(b, c)) {
                        n += 1;
                    }
                }
            }
            n
        })
        .sum::<usize>();
    faults as f64
}
