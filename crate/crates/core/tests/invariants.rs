use proptest::prelude::*;

use mval::geometry::{random_polytope, Polytope};
use mval::linalg::{haar_orthogonal, random_unit};
use mval::measures::{area_measure, quermass_exact, AreaOptions};
use mval::rng::stream;
use mval::valuations::{pi_i_support, projection_support_atoms, projection_support_direct};

fn close(a: f64, b: f64, rel: f64) -> bool {
    (a - b).abs() <= rel * a.abs().max(b.abs()).max(1.0)
}

fn unit(seed: u64) -> Vec<f64> {
    random_unit(3, &mut stream(seed, 1, 0)).as_slice().to_vec()
}

fn body(seed: u64, count: usize) -> Polytope {
    random_polytope(3, count, seed).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn support_is_sublinear(seed in any::<u64>(), count in 5usize..16, lam in 0.1f64..5.0) {
        let k = body(seed, count);
        let (x, y) = (unit(seed ^ 1), unit(seed ^ 2));
        let xy: Vec<f64> = x.iter().zip(&y).map(|(a, b)| a + b).collect();
        prop_assert!(k.support(&xy) <= k.support(&x) + k.support(&y) + 1e-12);
        let lx: Vec<f64> = x.iter().map(|a| lam * a).collect();
        prop_assert!(close(k.support(&lx), lam * k.support(&x), 1e-12));
    }

    #[test]
    fn projection_body_routes_agree(seed in any::<u64>(), count in 5usize..16) {
        let k = body(seed, count);
        let u = unit(seed ^ 3);
        let a = projection_support_atoms(&k, &u).unwrap();
        let d = projection_support_direct(&k, &u).unwrap();
        prop_assert!(close(a, d, 1e-9), "{a} vs {d}");
    }

    #[test]
    fn projection_body_is_translation_invariant(seed in any::<u64>(), t in prop::array::uniform3(-3.0f64..3.0)) {
        let k = body(seed, 10);
        let u = unit(seed ^ 4);
        let a = pi_i_support(&k, 2, &u).unwrap();
        let b = pi_i_support(&k.translate(&t), 2, &u).unwrap();
        prop_assert!(close(a, b, 1e-9));
    }

    #[test]
    fn pi_i_is_rotation_equivariant(seed in any::<u64>(), i in 1usize..3) {
        let k = body(seed, 10);
        let u = unit(seed ^ 5);
        let rot = haar_orthogonal(3, &mut stream(seed, 2, 0));
        let ru: Vec<f64> = (&rot * nalgebra::DVector::from_column_slice(&u)).as_slice().to_vec();
        let a = pi_i_support(&k, i, &u).unwrap();
        let b = pi_i_support(&k.transform(&rot), i, &ru).unwrap();
        prop_assert!(close(a, b, 1e-9), "{a} vs {b}");
    }

    #[test]
    fn pi_i_is_homogeneous_of_degree_i(seed in any::<u64>(), i in 1usize..3, lam in 0.2f64..4.0) {
        let k = body(seed, 10);
        let u = unit(seed ^ 6);
        let a = pi_i_support(&k.scale(lam), i, &u).unwrap();
        let b = lam.powi(i as i32) * pi_i_support(&k, i, &u).unwrap();
        prop_assert!(close(a, b, 1e-9));
    }

    #[test]
    fn pi_i_is_monotone(seed in any::<u64>(), i in 1usize..3) {
        let k = body(seed, 8);
        let mut coords = k.flat().to_vec();
        coords.extend(body(seed ^ 7, 6).flat());
        let l = Polytope::from_flat(coords, 3).unwrap();
        let u = unit(seed ^ 8);
        prop_assert!(pi_i_support(&k, i, &u).unwrap() <= pi_i_support(&l, i, &u).unwrap() + 1e-12);
    }

    #[test]
    fn intrinsic_volumes_are_valuation_normalized(seed in any::<u64>(), count in 5usize..16) {
        let k = body(seed, count);
        let v = k.intrinsic_volumes();
        prop_assert!(close(v[0], 1.0, 1e-12));
        prop_assert!(close(v[3], k.volume(), 1e-9));
        let w = quermass_exact(&k);
        prop_assert!(close(w.w(0), k.volume(), 1e-9));
    }

    #[test]
    fn surface_area_measure_is_centered(seed in any::<u64>(), count in 5usize..16) {
        let k = body(seed, count);
        let s = area_measure(&k, 2, &AreaOptions::default()).unwrap();
        let mut c = [0.0; 3];
        for (u, w) in s.atoms() {
            for (ck, uk) in c.iter_mut().zip(u) {
                *ck += w * uk;
            }
        }
        prop_assert!(c.iter().all(|x| x.abs() <= 1e-9 * s.total_mass()));
        prop_assert!(close(s.total_mass(), 2.0 * k.intrinsic_volumes()[2], 1e-9));
    }
}
