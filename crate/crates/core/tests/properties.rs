use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use natorus::cochain::{Cochain2, Cochain3, Tricharacter};
use natorus::crossed_product::{
    inverse_takai_transform, lbs_product, strictified_product, takai_transform, verify_duality, CrossedElement,
    StrictifiedElement, TwistData,
};
use natorus::group::{fourier, inverse_fourier, FiniteAbelianGroup};
use natorus::linalg;
use natorus::twisted_algebra::{octonion_multiplier, ScalarField, TwistedGroupAlgebra};
use natorus::twisted_kernels::associativity_cocycle_mismatch;

fn small_group() -> impl Strategy<Value = FiniteAbelianGroup> {
    prop::collection::vec(2u32..=4, 1..=2).prop_map(|f| FiniteAbelianGroup::new(&f).unwrap())
}

fn octonion_twist(seed: u64) -> TwistData {
    let phi = Tricharacter::octonion().to_cochain3();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let v = TwistData::random_perturbation(phi.group(), 2, &mut rng);
    TwistData::perturbed(&octonion_multiplier(), &phi, v).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn coboundaries_are_cocycles(g in small_group(), den in 1u64..13, seed: u64) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let s = Cochain2::random(&g, den, &mut rng);
        prop_assert!(s.coboundary().is_cocycle());
    }

    #[test]
    fn bicharacters_are_cocycles(g in small_group(), entries in prop::collection::vec(0i64..12, 4)) {
        let r = g.rank();
        let e = g.exponent() as u64;
        let f = g.factors();
        let gcd = |a: u64, b: u64| (1..=a.min(b)).rev().find(|d| a % d == 0 && b % d == 0).unwrap();
        let m: Vec<Vec<i64>> = (0..r)
            .map(|i| (0..r).map(|j| entries[i * 2 + j] * (e / gcd(f[i] as u64, f[j] as u64)) as i64).collect())
            .collect();
        let s = Cochain2::bicharacter(&g, &m, e).unwrap();
        prop_assert!(s.is_cocycle());
    }

    #[test]
    fn fourier_round_trip(g in small_group(), seed: u64) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let f: Vec<_> = (0..g.order()).map(|_| linalg::random_complex(&mut rng)).collect();
        let back = inverse_fourier(&g, &fourier(&g, &f));
        for (a, b) in f.iter().zip(&back) {
            prop_assert!((a - b).norm() < 1e-12);
        }
    }

    #[test]
    fn associator_is_coboundary(g in small_group(), den in 1u64..9, seed: u64) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let s = Cochain2::random(&g, den, &mut rng);
        let d = s.coboundary();
        let alg = TwistedGroupAlgebra::new(s, ScalarField::Complex).unwrap();
        let n = g.order();
        for i in 0..n * n * n {
            let (a, b, c) = (i / (n * n), (i / n) % n, i % n);
            // a(bc) against (ab)c on basis elements, from products alone.
            let (p1, bc) = alg.basis_product(b, c);
            let (p2, _) = alg.basis_product(a, bc);
            let (q1, ab) = alg.basis_product(a, b);
            let (q2, _) = alg.basis_product(ab, c);
            prop_assert_eq!((p1 + p2) - (q1 + q2), d.get(a, b, c));
        }
    }

    #[test]
    fn lbs_product_has_associator(seed: u64, x in 0usize..8, y in 0usize..8, z in 0usize..8) {
        let tw = octonion_twist(seed);
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 1);
        let mut delta = |t: usize| {
            let mut e = CrossedElement::zero(&tw);
            e.entries[t] = linalg::random_matrix(2, 2, &mut rng);
            e
        };
        let (a, b, c) = (delta(x), delta(y), delta(z));
        let left = lbs_product(&lbs_product(&a, &b, &tw).unwrap(), &c, &tw).unwrap();
        let right = lbs_product(&a, &lbs_product(&b, &c, &tw).unwrap(), &tw).unwrap();
        let phase = tw.phi().get(x, y, z).to_complex();
        let expect = CrossedElement { entries: left.entries.iter().map(|m| m * phase).collect() };
        prop_assert!(right.max_diff(&expect) < 1e-12);
    }

    #[test]
    fn takai_is_bijective(seed: u64) {
        let tw = octonion_twist(seed);
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 2);
        let a = StrictifiedElement::random(&tw, &mut rng);
        let back = inverse_takai_transform(&takai_transform(&a, &tw), &tw).unwrap();
        prop_assert!(back.max_diff(&a) < 1e-12);
    }

    #[test]
    fn strictified_associativity(seed: u64) {
        // Associative at ψ = 0; at ψ = −φ it is the crossed product of a
        // nonassociative algebra and stays nonassociative.
        let tw = octonion_twist(seed);
        let g = tw.group().clone();
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 3);
        let a = StrictifiedElement::random(&tw, &mut rng);
        let b = StrictifiedElement::random(&tw, &mut rng);
        let c = StrictifiedElement::random(&tw, &mut rng);
        let defect = |psi: &Cochain3| {
            let ab_c = strictified_product(&strictified_product(&a, &b, &tw, psi).unwrap(), &c, &tw, psi).unwrap();
            let a_bc = strictified_product(&a, &strictified_product(&b, &c, &tw, psi).unwrap(), &tw, psi).unwrap();
            ab_c.max_diff(&a_bc) / ab_c.max_abs()
        };
        prop_assert!(defect(&Cochain3::zero(&g)) < 1e-12);
        prop_assert!(defect(&tw.phi().negate()) > 1e-3);
    }

    #[test]
    fn duality_for_random_twists(seed: u64) {
        let tw = octonion_twist(seed);
        let r = verify_duality(&tw, &Cochain3::zero(tw.group()), 5, seed, 1e-10).unwrap();
        prop_assert!(r.pass, "{:?}", r);
    }
}

#[test]
fn scaled_levi_civita_associativity_cocycle() {
    let g = FiniteAbelianGroup::new(&[4, 4, 4]).unwrap();
    for k in 1i64..4 {
        let mut t = vec![vec![vec![0i64; 3]; 3]; 3];
        for (i, j, l, s) in [(0, 1, 2, 1), (1, 2, 0, 1), (2, 0, 1, 1), (0, 2, 1, -1), (2, 1, 0, -1), (1, 0, 2, -1)] {
            t[i][j][l] = s * k;
        }
        let phi = Tricharacter::from_tensor(&g, &t, None).unwrap().to_cochain3();
        assert!(phi.is_alternating());
        assert_eq!(associativity_cocycle_mismatch(&phi).unwrap(), None);
    }
}
