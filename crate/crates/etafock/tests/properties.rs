//! Property tests for the algebraic invariants: sesquilinearity of the
//! indefinite form, functoriality and unitarity of second quantization,
//! oracle equivalence of the two annihilator constructions, and the
//! involution laws of the dagger.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64 as C64;
use proptest::prelude::*;

use etafock::field::{
    anticommutator, commutator, compressed_field, dagger, direct_bose, direct_fermi, FockRep,
};
use etafock::fock::{
    embed_symmetric, enumerate_basis, second_quantization, GradedOperator, Statistics,
};
use etafock::krein::KreinTriplet;
use etafock::linalg::{max_abs, unitarity_residual};
use etafock::models;

fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

/// Strategy for complex numbers in the unit square.
fn complex() -> impl Strategy<Value = C64> {
    (-1.0..1.0f64, -1.0..1.0f64).prop_map(|(re, im)| c(re, im))
}

/// A metric drawn from the families the models use, at its natural size.
fn metric() -> impl Strategy<Value = DMatrix<C64>> {
    prop_oneof![
        Just(DMatrix::<C64>::identity(2, 2)),
        Just(-DMatrix::<C64>::identity(2, 2)),
        Just(models::eta_swap()),
        Just(models::eta_pair_swap(2)),
        Just(models::eta_minus_minkowski()),
        (0.0..std::f64::consts::TAU, 0.0..std::f64::consts::TAU)
            .prop_map(|(theta, xi)| models::eta_theta_xi(theta, xi)),
    ]
}

/// Unitary from a seeded QR draw.
fn unitary(dim: usize) -> impl Strategy<Value = DMatrix<C64>> {
    proptest::collection::vec(complex(), dim * dim).prop_map(move |entries| {
        let m = DMatrix::from_vec(dim, dim, entries);
        // shift away from singular draws
        let m = m + DMatrix::<C64>::identity(dim, dim) * c(2.0, 0.0);
        m.qr().q()
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn indefinite_form_is_sesquilinear(
        eta in metric(),
        seed_v in proptest::collection::vec(complex(), 8),
        alpha in complex(),
        beta in complex(),
    ) {
        let d = eta.nrows();
        let triplet = KreinTriplet::new(eta, 1e-10).unwrap();
        let v = DVector::from_fn(d, |i, _| seed_v[i % 8]);
        let w = DVector::from_fn(d, |i, _| seed_v[(i + 3) % 8]);
        let vw = triplet.indefinite_form(&v, &w).unwrap();
        let wv = triplet.indefinite_form(&w, &v).unwrap();
        prop_assert!((vw - wv.conj()).norm() < 1e-12);

        let scaled = triplet.indefinite_form(&(&v * alpha), &(&w * beta)).unwrap();
        prop_assert!((scaled - alpha.conj() * beta * vw).norm() < 1e-12);
    }

    #[test]
    fn second_quantization_is_functorial_unitary_and_adjoint_compatible(
        u in unitary(2),
        v in unitary(2),
        stats in prop_oneof![Just(Statistics::Full), Just(Statistics::Bose), Just(Statistics::Fermi)],
        cutoff in 0usize..=3,
    ) {
        let basis = enumerate_basis(stats, 2, cutoff, None).unwrap();
        let gu = second_quantization(&u, &basis, 1e-10).unwrap();
        let gv = second_quantization(&v, &basis, 1e-10).unwrap();
        let guv = second_quantization(&(&u * &v), &basis, 1e-10).unwrap();
        prop_assert!(gu.compose(&gv).unwrap().sub(&guv).unwrap().max_abs() < 1e-12);
        prop_assert!(unitarity_residual(gu.matrix()) < 1e-12);
        let gu_star = second_quantization(&u.adjoint(), &basis, 1e-10).unwrap();
        prop_assert!(max_abs(&(gu.matrix().adjoint() - gu_star.matrix())) < 1e-12);
    }

    #[test]
    fn embedding_columns_stay_orthonormal(
        stats in prop_oneof![Just(Statistics::Bose), Just(Statistics::Fermi)],
        d in 1usize..=3,
        cutoff in 0usize..=3,
    ) {
        let sym = enumerate_basis(stats, d, cutoff, None).unwrap();
        let full = enumerate_basis(Statistics::Full, d, sym.cutoff(), None).unwrap();
        let v = embed_symmetric(&sym, &full).unwrap();
        let gram = v.adjoint() * &v;
        let n = sym.total_len();
        prop_assert!(max_abs(&(gram - DMatrix::<C64>::identity(n, n))) < 1e-12);
    }

    #[test]
    fn compression_matches_the_occupation_oracles(
        stats in prop_oneof![Just(Statistics::Bose), Just(Statistics::Fermi)],
        d in 1usize..=3,
        cutoff in 2usize..=4,
        entries in proptest::collection::vec(complex(), 3),
    ) {
        let f = DVector::from_fn(d, |i, _| entries[i]);
        let triplet = KreinTriplet::identity(d, 1e-10).unwrap();
        let sym = enumerate_basis(stats, d, cutoff, None).unwrap();
        let full = enumerate_basis(Statistics::Full, d, sym.cutoff(), None).unwrap();
        let pair = compressed_field(&f, &triplet, &sym, &full).unwrap();
        let oracle = match stats {
            Statistics::Bose => direct_bose(&f, &sym).unwrap(),
            Statistics::Fermi => direct_fermi(&f, &sym).unwrap(),
            Statistics::Full => unreachable!(),
        };
        prop_assert!(max_abs(&(pair.annihilator.matrix() - &oracle)) < 1e-12);
        // a*(f) is the conjugate transpose on the truncated space
        prop_assert!(max_abs(&(pair.creator_star.matrix() - oracle.adjoint())) < 1e-12);
    }

    #[test]
    fn smearing_is_conjugate_linear(
        eta in metric(),
        entries in proptest::collection::vec(complex(), 8),
        alpha in complex(),
        beta in complex(),
    ) {
        let d = eta.nrows();
        let triplet = KreinTriplet::new(eta, 1e-10).unwrap();
        let rep = FockRep::new(&triplet, Statistics::Bose, 2, None).unwrap();
        let f = DVector::from_fn(d, |i, _| entries[i % 8]);
        let g = DVector::from_fn(d, |i, _| entries[(i + 4) % 8]);
        let combo = rep.annihilator(&(&f * alpha + &g * beta)).unwrap();
        let expect = rep
            .annihilator(&f)
            .unwrap()
            .scale(alpha.conj())
            .add(&rep.annihilator(&g).unwrap().scale(beta.conj()))
            .unwrap();
        prop_assert!(combo.sub(&expect).unwrap().max_abs() < 1e-12);
        // creators are linear in f
        let combo = rep.creator_star(&(&f * alpha + &g * beta)).unwrap();
        let expect = rep
            .creator_star(&f)
            .unwrap()
            .scale(alpha)
            .add(&rep.creator_star(&g).unwrap().scale(beta))
            .unwrap();
        prop_assert!(combo.sub(&expect).unwrap().max_abs() < 1e-12);
    }

    #[test]
    fn dagger_laws_hold_for_random_operators(
        eta in metric(),
        entries in proptest::collection::vec(complex(), 64),
    ) {
        let triplet = KreinTriplet::new(eta, 1e-10).unwrap();
        let rep = FockRep::new(&triplet, Statistics::Fermi, 4, None).unwrap();
        let n = rep.basis().total_len();
        let x = GradedOperator::from_matrix(
            rep.basis().clone(),
            rep.basis().clone(),
            DMatrix::from_fn(n, n, |i, j| entries[(i * n + j) % 64]),
            None,
        )
        .unwrap();
        let y = GradedOperator::from_matrix(
            rep.basis().clone(),
            rep.basis().clone(),
            DMatrix::from_fn(n, n, |i, j| entries[(i * 7 + j * 3 + 5) % 64]),
            None,
        )
        .unwrap();
        let ddx = dagger(&dagger(&x, rep.gamma()).unwrap(), rep.gamma()).unwrap();
        prop_assert!(ddx.sub(&x).unwrap().max_abs() < 1e-12);
        let dxy = dagger(&x.compose(&y).unwrap(), rep.gamma()).unwrap();
        let dydx = dagger(&y, rep.gamma())
            .unwrap()
            .compose(&dagger(&x, rep.gamma()).unwrap())
            .unwrap();
        prop_assert!(dxy.sub(&dydx).unwrap().max_abs() < 1e-12);
    }

    #[test]
    fn zero_relations_hold_for_random_smearings(
        eta in metric(),
        entries in proptest::collection::vec(complex(), 8),
    ) {
        let d = eta.nrows();
        let triplet = KreinTriplet::new(eta, 1e-10).unwrap();
        let f = DVector::from_fn(d, |i, _| entries[i % 8]);
        let g = DVector::from_fn(d, |i, _| entries[(i + 4) % 8]);

        let bose = FockRep::new(&triplet, Statistics::Bose, 3, None).unwrap();
        let af = bose.annihilator(&f).unwrap();
        let ag = bose.annihilator(&g).unwrap();
        prop_assert!(commutator(&af, &ag).unwrap().max_abs() < 1e-12);
        let df = bose.creator_dagger(&f).unwrap();
        let dg = bose.creator_dagger(&g).unwrap();
        prop_assert!(commutator(&df, &dg).unwrap().max_abs() < 1e-12);

        let fermi = FockRep::new(&triplet, Statistics::Fermi, d, None).unwrap();
        let af = fermi.annihilator(&f).unwrap();
        let ag = fermi.annihilator(&g).unwrap();
        prop_assert!(anticommutator(&af, &ag).unwrap().max_abs() < 1e-12);
        let df = fermi.creator_dagger(&f).unwrap();
        let dg = fermi.creator_dagger(&g).unwrap();
        prop_assert!(anticommutator(&df, &dg).unwrap().max_abs() < 1e-12);
    }
}
