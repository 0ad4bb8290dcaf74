//! Sampled moments against the exact operators. Fixed seeds; tolerances are
//! several standard errors wide.

use designkit::hamiltonian::{evolve, hamiltonian_moment, GridChoice, HamiltonianSchedule};
use designkit::linalg::{haar_sample, tensor_power_conj};
use designkit::moment::{monte_carlo_moment, projector_diag, projector_p0};
use designkit::mub::fourier_pair;
use designkit::permcheck::IndexFamily;
use designkit::rdc::{rdc_iterated_moment, rdc_moment, sample_circuit, sample_layer, CircuitSpec, PhaseModel};
use designkit::rng::uniform_phase;
use designkit::{Budget, ComplexMatrix, RandomSource, C64};

const SAMPLES: usize = 100_000;
/// Entries of a diagonal unitary's moment have modulus one, so their standard
/// error at `SAMPLES` is about `3e-3`; these estimators use ten times more.
const DIAGONAL_SAMPLES: usize = 1_000_000;

fn random_diagonal(d: usize, rng: &mut rand_chacha::ChaCha20Rng) -> ComplexMatrix {
    let v: Vec<C64> = (0..d).map(|_| C64::from_polar(1.0, uniform_phase(rng))).collect();
    ComplexMatrix::from_diagonal(&v)
}

#[test]
fn haar_first_moment() {
    let b = Budget::default();
    let mc = monte_carlo_moment(2, 1, SAMPLES, &RandomSource::new(11), &b, |r| haar_sample(2, r)).unwrap();
    let p0 = projector_p0(2, 1, &b).unwrap().to_dense(&b).unwrap();
    let diff = mc.max_abs_diff(&p0);
    assert!(diff < 4e-3, "{diff}");
}

#[test]
fn haar_overlap_mean_is_one_over_d() {
    let d = 3;
    let src = RandomSource::new(12);
    let v = [C64::new(0.6, 0.0), C64::new(0.0, 0.8), C64::new(0.0, 0.0)];
    let xs: Vec<f64> = (0..SAMPLES)
        .map(|i| {
            let u = haar_sample(d, &mut src.stream(i as u64));
            let uv = u.apply(&v);
            v.iter().zip(&uv).map(|(a, b)| a.conj() * b).sum::<C64>().norm_sqr()
        })
        .collect();
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
    let se = (var / n).sqrt();
    assert!((mean - 1.0 / d as f64).abs() < 5.0 * se, "mean {mean}, se {se}");
}

#[test]
fn random_diagonal_moment() {
    let b = Budget::default();
    let mc = monte_carlo_moment(2, 2, DIAGONAL_SAMPLES, &RandomSource::new(13), &b, |r| random_diagonal(2, r)).unwrap();
    let pe = projector_diag(2, 2, &b).unwrap().to_dense(&b).unwrap();
    let diff = mc.max_abs_diff(&pe);
    assert!(diff < 5e-3, "{diff}");
}

#[test]
fn alternating_basis_product_moment() {
    let (d, t) = (4, 2);
    let b = Budget::default();
    let f = fourier_pair(d).unwrap().basis().clone();
    let fa = f.adjoint();
    let mc = monte_carlo_moment(d, t, SAMPLES, &RandomSource::new(14), &b, |r| {
        let (d1, d2, d3) = (random_diagonal(d, r), random_diagonal(d, r), random_diagonal(d, r));
        d3.mul(&f).mul(&d2).mul(&fa).mul(&d1)
    })
    .unwrap();
    let pe = projector_diag(d, t, &b).unwrap().to_dense(&b).unwrap();
    let ft = tensor_power_conj(&f, t, &b).unwrap();
    let pf = ft.mul(&pe).mul(&ft.adjoint());
    let exact = pe.mul(&pf).mul(&pe);
    let diff = mc.max_abs_diff(&exact);
    assert!(diff < 5e-3, "{diff}");
}

#[test]
fn single_layer_diagonal_entries() {
    let b = Budget::default();
    let t = 2;
    let discrete = PhaseModel::FactoredDiscrete { a: 3, b: 2 };
    let cases = [(2, PhaseModel::Continuous, DIAGONAL_SAMPLES, 5e-3), (3, PhaseModel::Continuous, SAMPLES, 2e-2), (3, discrete, SAMPLES, 2e-2)];
    for (n, phase, samples, tol) in cases {
        let fam = IndexFamily::complete(n, 2).unwrap();
        let spec = CircuitSpec::from_family(&fam, phase, 0).unwrap();
        let exact = rdc_moment(&spec, t, &b).unwrap();
        let layout = exact.layout();
        let src = RandomSource::new(15 + n as u64);
        let mean = src.mean(samples, layout.dim(), |rng, out| {
            let diag = sample_layer(&spec, rng);
            let mut k = vec![0usize; t];
            let mut l = vec![0usize; t];
            let half = layout.half();
            for (i, x) in out.iter_mut().enumerate() {
                layout.decode(i / half, &mut k);
                layout.decode(i % half, &mut l);
                let mut v = C64::new(1.0, 0.0);
                for s in 0..t {
                    v *= diag[k[s]] * diag[l[s]].conj();
                }
                *x = v;
            }
        });
        let diff = (0..layout.dim()).map(|i| (mean[i] - C64::new(exact.value(i), 0.0)).norm()).fold(0.0, f64::max);
        assert!(diff < tol, "N={n}: {diff}");
    }
}

#[test]
fn iterated_circuit_moment() {
    let b = Budget::default();
    let (n, t) = (2, 2);
    let spec = CircuitSpec::from_family(&IndexFamily::complete(n, 2).unwrap(), PhaseModel::Continuous, 1).unwrap();
    let mc = monte_carlo_moment(1 << n, t, SAMPLES, &RandomSource::new(21), &b, |r| sample_circuit(&spec, r, &b).unwrap()).unwrap();
    let exact = rdc_iterated_moment(&spec, t, &b).unwrap().to_dense(&b).unwrap();
    let diff = mc.max_abs_diff(&exact);
    assert!(diff < 5e-3, "{diff}");
}

#[test]
fn hamiltonian_schedule_moment() {
    let b = Budget::default();
    let (n, t, ell) = (2, 2, 1);
    let time = (2 * ell + 1) as f64 * std::f64::consts::PI;
    let mc = monte_carlo_moment(1 << n, t, SAMPLES, &RandomSource::new(22), &b, |r| {
        let sched = HamiltonianSchedule::random(n, t, 2 * ell + 1, GridChoice::Proof, r).unwrap();
        evolve(&sched, time, &b).unwrap()
    })
    .unwrap();
    let exact = hamiltonian_moment(n, t, ell, GridChoice::Proof, &b).unwrap().to_dense(&b).unwrap();
    let diff = mc.max_abs_diff(&exact);
    assert!(diff < 5e-3, "{diff}");
}
