use designkit::hamiltonian::{commutator_defect, evolve, evolve_between, GridChoice, HamiltonianSchedule, IntervalHamiltonian};
use designkit::linalg::{haar_sample, operator_norm, tensor_power_conj};
use designkit::moment::{projector_diag, projector_p0, residual_contraction, tpe_eta, MomentOperator};
use designkit::mub::{fourier_pair, pauli_xz_pair, verify_pair, FourierTypePair};
use designkit::permcheck::{is_local_permutation, is_row_permutation, lambda_count, lambda_count_naive, BinaryMatrix, IndexFamily};
use designkit::rdc::{eta_tilde, rdc_moment, CircuitSpec, PhaseModel};
use designkit::{Budget, ComplexMatrix, RandomSource, C64};
use proptest::prelude::*;
use std::f64::consts::TAU;

fn budget() -> Budget {
    Budget::default()
}

fn family_from_masks(n: usize, masks: &[u32]) -> IndexFamily {
    let subsets = masks.iter().map(|&m| (1..=n).filter(|&i| m >> (i - 1) & 1 == 1).collect()).collect();
    IndexFamily::new(n, subsets).unwrap()
}

/// `(N, family masks)` with every mask a nonempty subset of `[1, N]`.
fn family_strategy(n_range: std::ops::RangeInclusive<usize>) -> impl Strategy<Value = (usize, Vec<u32>)> {
    n_range.prop_flat_map(|n| {
        let masks = prop::collection::btree_set(1u32..(1 << n), 1..=(1usize << n) - 1);
        (Just(n), masks.prop_map(|s| s.into_iter().collect::<Vec<_>>()))
    })
}

fn dense_pf(pair: &FourierTypePair, t: usize, b: &Budget) -> ComplexMatrix {
    let pe = projector_diag(pair.d(), t, b).unwrap().to_dense(b).unwrap();
    let f = tensor_power_conj(pair.basis(), t, b).unwrap();
    f.mul(&pe).mul(&f.adjoint())
}

fn random_matrix(d: usize, seed: u64) -> ComplexMatrix {
    use rand::Rng;
    let mut rng = RandomSource::new(seed).stream(0);
    let data = (0..d * d).map(|_| C64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))).collect();
    ComplexMatrix::new(d, data).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 64, ..ProptestConfig::default() })]

    #[test]
    fn local_permutation_is_an_equivalence(
        (n, masks) in family_strategy(1..=3),
        t in 1usize..=4,
        codes in prop::array::uniform3(any::<u64>()),
    ) {
        let fam = family_from_masks(n, &masks);
        let m = |c: u64| BinaryMatrix::from_code(c % (1u64 << (t * n)), t, n);
        let (a, b, c) = (m(codes[0]), m(codes[1]), m(codes[2]));
        prop_assert!(is_local_permutation(&a, &a, &fam).unwrap());
        prop_assert_eq!(is_local_permutation(&a, &b, &fam).unwrap(), is_local_permutation(&b, &a, &fam).unwrap());
        if is_local_permutation(&a, &b, &fam).unwrap() && is_local_permutation(&b, &c, &fam).unwrap() {
            prop_assert!(is_local_permutation(&a, &c, &fam).unwrap());
        }
        // Permuting rows never changes locality.
        let p = designkit::moment::Permutation::all(t).swap_remove((codes[1] as usize) % (1..=t).product::<usize>());
        let ap = a.permute_rows(&p);
        prop_assert!(is_row_permutation(&a, &ap).unwrap());
        prop_assert_eq!(is_local_permutation(&ap, &c, &fam).unwrap(), is_local_permutation(&a, &c, &fam).unwrap());
    }

    #[test]
    fn lambda_shrinks_as_the_family_grows(
        (n, masks) in family_strategy(2..=3),
        extra in 1u32..8,
        t in 2usize..=4,
    ) {
        let small = family_from_masks(n, &masks);
        let mut more = masks.clone();
        let e = extra % ((1 << n) - 1) + 1;
        if !more.contains(&e) {
            more.push(e);
        }
        let big = family_from_masks(n, &more);
        prop_assert!(small.is_subfamily_of(&big));
        let b = budget();
        prop_assert!(lambda_count(t, n, &big, &b).unwrap() <= lambda_count(t, n, &small, &b).unwrap());
    }

    #[test]
    fn full_family_has_no_defect(t in 1usize..=5, n in 1usize..=3) {
        prop_assert_eq!(lambda_count(t, n, &IndexFamily::full(n).unwrap(), &budget()).unwrap(), 0);
    }

    #[test]
    fn bucketed_count_matches_pairwise((n, masks) in family_strategy(1..=3), t in 1usize..=4) {
        prop_assume!(t * n <= 10);
        let fam = family_from_masks(n, &masks);
        prop_assert_eq!(lambda_count(t, n, &fam, &budget()).unwrap(), lambda_count_naive(t, n, &fam).unwrap());
    }

    #[test]
    fn operator_norm_is_submultiplicative(d in 1usize..=6, s1 in any::<u64>(), s2 in any::<u64>()) {
        let (a, b) = (random_matrix(d, s1), random_matrix(d, s2));
        let lhs = operator_norm(&a.mul(&b)).unwrap();
        let rhs = operator_norm(&a).unwrap() * operator_norm(&b).unwrap();
        prop_assert!(lhs <= rhs * (1.0 + 1e-10) + 1e-12, "{lhs} > {rhs}");
    }

    #[test]
    fn moment_of_a_unitary_is_unitary(d in 2usize..=3, t in 1usize..=2, seed in any::<u64>()) {
        let u = haar_sample(d, &mut RandomSource::new(seed).stream(0));
        prop_assert!((operator_norm(&u).unwrap() - 1.0).abs() < 1e-10);
        prop_assert!(tensor_power_conj(&u, t, &budget()).unwrap().is_unitary(1e-10));
    }

    #[test]
    fn fourier_phases_are_additive(d in 2usize..=16) {
        let p = fourier_pair(d).unwrap();
        prop_assert!(verify_pair(&p, 1e-10).passes());
        for a in 0..d {
            prop_assert_eq!(p.phase(0, a), 0.0);
            for b in 0..d {
                for k in 0..d {
                    let lhs = p.phase(k, a) + p.phase(k, b) - p.phase(k, p.add(a, b));
                    let wrapped = (lhs / TAU).round() * TAU - lhs;
                    prop_assert!(wrapped.abs() < 1e-9);
                }
            }
        }
    }

    #[test]
    fn diagonal_moment_is_swap_symmetric_and_contains_p_z(
        (n, masks) in family_strategy(1..=3),
        t in 1usize..=3,
    ) {
        let b = budget();
        let fam = family_from_masks(n, &masks);
        let q = rdc_moment(&CircuitSpec::from_family(&fam, PhaseModel::Continuous, 0).unwrap(), t, &b).unwrap();
        let layout = q.layout();
        let half = layout.half();
        let MomentOperator::Diagonal(pz) = projector_diag(1 << n, t, &b).unwrap() else { panic!("P_Z is diagonal") };
        for i in 0..layout.dim() {
            let swapped = (i % half) * half + i / half;
            prop_assert_eq!(q.indicator.get(i), q.indicator.get(swapped));
            if pz.get(i) {
                prop_assert!(q.indicator.get(i));
            }
        }
        // Tr R_Z = Tr Q_Z − Tr P_Z counts exactly the defect pairs.
        prop_assert_eq!(q.trace() - pz.count(), lambda_count(t, n, &fam, &b).unwrap());
    }

    #[test]
    fn evolution_composes_across_boundaries(seed in any::<u64>(), f1 in 0.0f64..1.0, f2 in 0.0f64..1.0, n in 1usize..=3) {
        let b = budget();
        let sched = HamiltonianSchedule::random(n, 2, 4, GridChoice::Proof, &mut RandomSource::new(seed).stream(0)).unwrap();
        let (t1, t2) = (f1.min(f2) * sched.duration(), f1.max(f2) * sched.duration());
        let u1 = evolve(&sched, t1, &b).unwrap();
        let u2 = evolve(&sched, t2, &b).unwrap();
        let step = evolve_between(&sched, t1, t2, &b).unwrap();
        prop_assert!(u2.is_unitary(1e-10));
        prop_assert!(step.mul(&u1).max_abs_diff(&u2) < 1e-10);
    }

    #[test]
    fn interval_terms_commute(n in 2usize..=3, vals in prop::collection::vec(-1.0f64..1.0, 6), x_type in any::<bool>()) {
        let pairs = n * (n - 1) / 2;
        let iv = IntervalHamiltonian { couplings: vals[..pairs].to_vec(), fields: vals[3..3 + n].to_vec() };
        prop_assert!(commutator_defect(n, &iv, x_type).unwrap() <= 1e-12);
    }

    #[test]
    fn haar_moment_gap_is_unitarily_invariant(d in 2usize..=3, t in 1usize..=2, seed in any::<u64>()) {
        let b = budget();
        let pair = fourier_pair(d).unwrap();
        let pe = projector_diag(d, t, &b).unwrap().to_dense(&b).unwrap();
        let m = pe.mul(&dense_pf(&pair, t, &b)).mul(&pe);
        let p0 = projector_p0(d, t, &b).unwrap().to_dense(&b).unwrap();
        let v = tensor_power_conj(&haar_sample(d, &mut RandomSource::new(seed).stream(0)), t, &b).unwrap();
        let lhs = operator_norm(&v.mul(&m).sub(&p0)).unwrap();
        let rhs = operator_norm(&m.sub(&p0)).unwrap();
        prop_assert!((lhs - rhs).abs() < 1e-9);
    }

    #[test]
    fn eta_tilde_within_bound((n, masks) in family_strategy(2..=3), t in 2usize..=3) {
        prop_assume!(t * n <= 6);
        let fam = family_from_masks(n, &masks);
        let e = eta_tilde(&CircuitSpec::from_family(&fam, PhaseModel::Continuous, 1).unwrap(), t, &budget()).unwrap();
        prop_assert!(e.holds, "{e:?}");
        prop_assert!(e.eta_tilde_exact >= e.eta - 1e-9);
    }
}

#[test]
fn row_permutations_are_exactly_the_log_local_ones() {
    let b = budget();
    for t in 1..=4usize {
        let r = t.ilog2() as usize + 1;
        for n in 1..=3 {
            let fam = if r >= n { IndexFamily::full(n).unwrap() } else { IndexFamily::complete(n, r).unwrap() };
            assert_eq!(lambda_count(t, n, &fam, &b).unwrap(), 0, "t={t} N={n} r={r}");
            if t * n <= 12 {
                assert_eq!(lambda_count_naive(t, n, &fam).unwrap(), 0);
            }
        }
    }
    // One below the threshold already fails at t = 2.
    assert!(lambda_count(2, 2, &IndexFamily::complete(2, 1).unwrap(), &b).unwrap() > 0);
}

#[test]
fn projector_laws() {
    let b = budget();
    for (d, t) in [(2, 1), (2, 2), (3, 2), (2, 3), (4, 2)] {
        let p0 = projector_p0(d, t, &b).unwrap().to_dense(&b).unwrap();
        let pe = projector_diag(d, t, &b).unwrap().to_dense(&b).unwrap();
        assert!(p0.is_projector(1e-10) && pe.is_projector(1e-10), "d={d} t={t}");
        assert!(p0.mul(&pe).max_abs_diff(&p0) < 1e-10);
        assert!(pe.mul(&p0).max_abs_diff(&p0) < 1e-10);
        let tf: f64 = (1..=t).map(|x| x as f64).product();
        if d >= t {
            assert!((p0.trace().re - tf).abs() < 1e-9);
        }
        let pair = fourier_pair(d).unwrap();
        let pf = dense_pf(&pair, t, &b);
        assert!(pf.is_projector(1e-10));
        let m = pe.mul(&pf).mul(&pe);
        assert!(m.mul(&p0).max_abs_diff(&p0) < 1e-10);
        assert!(p0.mul(&m).max_abs_diff(&p0) < 1e-10);

        // Dense gap against the compressed computation.
        let dense = operator_norm(&m.sub(&p0)).unwrap();
        assert!((dense - tpe_eta(&pair, t, &b).unwrap().eta).abs() < 1e-9, "d={d} t={t}");

        // Residual power law.
        let mop = MomentOperator::Dense { layout: designkit::TensorLayout::new(d, t), matrix: m };
        let p0op = projector_p0(d, t, &b).unwrap();
        let r1 = residual_contraction(&mop, &p0op, 1, &b).unwrap();
        let r3 = residual_contraction(&mop, &p0op, 3, &b).unwrap();
        let dt = (d as f64).powi(t as i32);
        assert!((r3 * dt * dt - r1.powi(3)).abs() <= 1e-9 * r1.powi(3).max(1.0));
    }
}

#[test]
fn pauli_pairs_are_fourier_type() {
    let b = budget();
    for n in 1..=3 {
        let p = pauli_xz_pair(n, &b).unwrap();
        assert!(verify_pair(&p, 1e-10).passes());
        assert!((0..p.d()).all(|a| p.phase(0, a) == 0.0));
    }
}
