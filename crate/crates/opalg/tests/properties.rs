//! Property-based invariants of the norm estimators, defect functionals and
//! wire formats. Heavy numerical properties run few cases with seeded
//! inputs; structural properties (serialization) run wider.

use proptest::prelude::*;

use opalg::defect::{mult_defect, star_map};
use opalg::harness;
use opalg::matcore::{random, AlgElement, BlockAlgebra};
use opalg::opspace::{amplified_norm, bilinear_h_norm, cb_norm, BilMap, LinMap};

fn small_dims() -> impl Strategy<Value = Vec<usize>> {
    prop_oneof![
        Just(vec![2]),
        Just(vec![3]),
        Just(vec![2, 2]),
        Just(vec![2, 3]),
    ]
}

fn seeded_map(dims: &[usize], seed: u64) -> LinMap {
    let alg = BlockAlgebra::new(dims.to_vec()).unwrap();
    let mut rng = random::rng_from_seed(seed);
    let g = random::random_element(&alg, &mut rng);
    let base = LinMap::left_mul(&g);
    base.scale(1.0 / base.coord_norm().max(1e-12))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(8))]

    #[test]
    fn amplified_norms_are_monotone_in_level(dims in small_dims(), seed in 0u64..1000) {
        let map = seeded_map(&dims, seed);
        let mut prev = 0.0f64;
        for k in 1..=3usize {
            let est = amplified_norm(&map, k, 4, seed).unwrap();
            prop_assert!(est.lower >= prev - 1e-9,
                "level {} lower {} below previous {}", k, est.lower, prev);
            prev = est.lower;
        }
    }

    #[test]
    fn cb_norm_is_submultiplicative(dims in small_dims(), seed in 0u64..1000) {
        let alg = BlockAlgebra::new(dims.clone()).unwrap();
        let mut rng = random::rng_from_seed(seed);
        let s = LinMap::left_mul(&random::random_element(&alg, &mut rng));
        let t = LinMap::left_mul(&random::random_element(&alg, &mut rng));
        let st = s.compose(&t).unwrap();
        let cs = cb_norm(&s, 6, seed).unwrap().value;
        let ct = cb_norm(&t, 6, seed + 1).unwrap().value;
        let cst = cb_norm(&st, 6, seed + 2).unwrap().value;
        prop_assert!(cst <= cs * ct + 1e-6, "{} > {} * {}", cst, cs, ct);
    }

    #[test]
    fn witnesses_replay_their_lower_bounds(dims in small_dims(), seed in 0u64..1000) {
        let map = seeded_map(&dims, seed);
        let est = cb_norm(&map, 4, seed).unwrap();
        let replay = est.verify_linear(&map).unwrap();
        prop_assert!((replay - est.lower).abs() < 1e-9);
        prop_assert!(est.witness[0].op_norm() <= 1.0 + 1e-9);

        let defect = mult_defect(&map).unwrap();
        let bil = bilinear_h_norm(&defect, 2, 4, seed).unwrap();
        let replay = bil.verify_bilinear(&defect).unwrap();
        prop_assert!((replay - bil.lower).abs() < 1e-9);
    }

    #[test]
    fn star_map_preserves_cb_norm(dims in small_dims(), seed in 0u64..1000) {
        let map = seeded_map(&dims, seed);
        let a = cb_norm(&map, 6, seed).unwrap().value;
        let b = cb_norm(&star_map(&map), 6, seed + 7).unwrap().value;
        prop_assert!((a - b).abs() < 1e-6, "‖T‖ est {} vs ‖T⋆‖ est {}", a, b);
    }

    #[test]
    fn zero_defect_characterizes_homomorphisms(dims in small_dims(), seed in 0u64..1000) {
        let alg = BlockAlgebra::new(dims.clone()).unwrap();
        let mut rng = random::rng_from_seed(seed);
        // forward: homomorphisms have zero tensor
        let pi = harness::star_isomorphism(&alg, &mut rng);
        prop_assert!(mult_defect(&pi).unwrap().coord_norm() < 1e-12);
        // converse: a zero tensor forces multiplicativity on random pairs
        let g = random::random_element(&alg, &mut rng);
        let t = LinMap::left_mul(&g);
        let d = mult_defect(&t).unwrap();
        if d.coord_norm() > 1e-9 {
            // non-homomorphism must fail multiplicativity somewhere
            let mut worst = 0.0f64;
            for _ in 0..20 {
                let x = random::random_element(&alg, &mut rng);
                let y = random::random_element(&alg, &mut rng);
                let lhs = t.apply(&x.mul(&y).unwrap()).unwrap();
                let rhs = t.apply(&x).unwrap().mul(&t.apply(&y).unwrap()).unwrap();
                worst = worst.max(lhs.sub(&rhs).unwrap().op_norm());
            }
            prop_assert!(worst > 1e-9);
        }
    }

    #[test]
    fn multiplication_h_norm_is_one(dims in small_dims(), seed in 0u64..1000, k in 1usize..=3) {
        let alg = BlockAlgebra::new(dims.clone()).unwrap();
        let m = BilMap::native_multiplication(&alg);
        let est = bilinear_h_norm(&m, k, 4, seed).unwrap();
        prop_assert!((est.value - 1.0).abs() < 1e-6, "k = {}: {}", k, est.value);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn element_json_round_trips_bit_exactly(dims in small_dims(), seed in 0u64..10_000) {
        let alg = BlockAlgebra::new(dims.clone()).unwrap();
        let mut rng = random::rng_from_seed(seed);
        let x = random::random_element(&alg, &mut rng).scale(num_complex::Complex64::new(
            1.0 / 3.0,
            -7.0 / 11.0,
        ));
        let s = serde_json::to_string(&x).unwrap();
        let back: AlgElement = serde_json::from_str(&s).unwrap();
        prop_assert_eq!(x, back);
    }

    #[test]
    fn linmap_json_round_trips_bit_exactly(dims in small_dims(), seed in 0u64..10_000) {
        let map = seeded_map(&dims, seed);
        let s = serde_json::to_string(&map).unwrap();
        let back: LinMap = serde_json::from_str(&s).unwrap();
        prop_assert_eq!(map, back);
    }

    #[test]
    fn bilmap_json_round_trips_bit_exactly(dims in small_dims(), seed in 0u64..10_000) {
        let d = mult_defect(&seeded_map(&dims, seed)).unwrap();
        let s = serde_json::to_string(&d).unwrap();
        let back: BilMap = serde_json::from_str(&s).unwrap();
        prop_assert_eq!(d, back);
    }
}

#[test]
fn iterated_defect_respects_chained_bound() {
    // ℓ = 3 on near-isometric maps: pointwise values stay under the bound
    let alg = BlockAlgebra::new(vec![2, 2]).unwrap();
    for seed in 0..5u64 {
        let mut rng = random::rng_from_seed(seed);
        let s = {
            let pi = harness::star_isomorphism(&alg, &mut rng);
            let noise = harness::unit_norm_noise(&alg, &mut rng);
            LinMap::identity(&alg)
                .add(&noise.scale(5e-3))
                .unwrap()
                .compose(&pi)
                .unwrap()
        };
        let opts = opalg::defect::DefectOptions::fast(seed);
        let it = opalg::defect::iterated_defect(&s, 3, &opts).unwrap();
        let worst = it.spot_check(100, seed + 50).unwrap();
        assert!(
            worst <= it.bound + 1e-6,
            "seed {seed}: pointwise {worst} vs bound {}",
            it.bound
        );
    }
}

#[test]
fn delta2_measures_quadratic_obstruction() {
    // for associative m, the obstruction of D = m − m_native is O(‖D‖²)
    let alg = BlockAlgebra::new(vec![2]).unwrap();
    for (seed, scale) in [(1u64, 1e-2), (2, 1e-3), (3, 1e-4)] {
        let mut rng = random::rng_from_seed(seed);
        let (m, _) = harness::planted_multiplication(&alg, scale, &mut rng).unwrap();
        let d = m.defect_tensor();
        let d_norm = d.coord_norm();
        let tri = opalg::perturb::coboundary_2(&d).unwrap();
        let worst = tri.max_residual(30, seed + 9).unwrap();
        assert!(
            worst <= 20.0 * d_norm * d_norm,
            "seed {seed}: δ²D residual {worst} vs ‖D‖² = {}",
            d_norm * d_norm
        );
    }
}
