mod common;

use common::*;
use gradus::artinian::ArtinianDual;
use gradus::exactla::{Matrix, PrimeField};
use gradus::graded::Window;
use gradus::invariants::InvariantConfig;
use gradus::koszul::{transition, Direction, KoszulComplex};
use gradus::modfile::{parse_module_file, print_module_file};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn matrix() -> impl Strategy<Value = Matrix> {
    (1usize..8, 1usize..8).prop_flat_map(|(r, c)| {
        prop::collection::vec(prop_oneof![Just(0u32), 0u32..32003], r * c)
            .prop_map(move |data| Matrix::from_data(PrimeField::default(), r, c, data).unwrap())
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn rank_plus_nullity_is_column_count(a in matrix()) {
        let kernel = a.kernel_basis();
        prop_assert_eq!(a.rank() + kernel.len(), a.cols());
        for v in &kernel {
            prop_assert!(a.mul_vec(v).unwrap().iter().all(|&x| x == 0));
        }
        prop_assert_eq!(a.rank(), a.transpose().rank());
    }

    #[test]
    fn solutions_solve(a in matrix(), seed in any::<u64>()) {
        use rand::Rng;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let v: Vec<u32> = (0..a.cols()).map(|_| rng.gen_range(0..32003)).collect();
        let b = a.mul_vec(&v).unwrap();
        let x = a.solve(&b).unwrap();
        prop_assert!(x.is_some());
        prop_assert_eq!(a.mul_vec(&x.unwrap()).unwrap(), b);
    }

    #[test]
    fn rref_is_idempotent(a in matrix()) {
        let once = a.rref();
        let twice = once.reduced.rref();
        prop_assert_eq!(&twice.reduced, &once.reduced);
        prop_assert_eq!(twice.pivots, once.pivots);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn koszul_differentials_and_transitions(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let m = random_module(&mut rng);
        let f = random_sequence(m.ring(), &mut rng);
        let total: i32 = f.iter().map(|p| p.homogeneous_degree().unwrap() as i32).sum();
        let w = Window::new(0, 3).unwrap();
        let base = m.realize(Window::new(-2 * total, 3 + 2 * total).unwrap()).unwrap();
        let c1 = KoszulComplex::build(&base, &f, 1, w).unwrap();
        let c2 = KoszulComplex::build(&base, &f, 2, w).unwrap();
        prop_assert!(c1.check_square_zero().is_ok());
        prop_assert!(c2.check_square_zero().is_ok());
        let down = transition(&c2, &c1, Direction::Homological).unwrap();
        prop_assert!(down.check_commutes(&c2, &c1).is_ok());
        let c2up = KoszulComplex::build(&base, &f, 2, w.shifted(total)).unwrap();
        let up = transition(&c1, &c2up, Direction::Cohomological).unwrap();
        prop_assert!(up.check_commutes(&c1, &c2up).is_ok());
    }

    #[test]
    fn extreme_koszul_homology(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let m = random_module(&mut rng);
        let f = random_sequence(m.ring(), &mut rng);
        let total: i32 = f.iter().map(|p| p.homogeneous_degree().unwrap() as i32).sum();
        let emax = f.iter().map(|p| p.homogeneous_degree().unwrap() as i32).max().unwrap();
        let w = Window::new(0, 4).unwrap();
        let c = KoszulComplex::from_presented(&m, &f, 1, w).unwrap();
        let h0 = c.homology(0).unwrap().module().hilbert().to_vec();
        prop_assert_eq!(h0, m.quotient_by_elements(&f).unwrap().hilbert_function(w));
        let htop = c.homology(f.len()).unwrap().module().hilbert().to_vec();
        let ext = m.realize(Window::new(-total, 4 - total + emax).unwrap()).unwrap();
        let colon = ext.colon(&f).unwrap().restrict(Window::new(-total, 4 - total).unwrap()).unwrap();
        prop_assert_eq!(htop, colon.hilbert().to_vec());
    }

    #[test]
    fn duality_is_an_involution(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let m = random_module(&mut rng);
        let x = m.realize(Window::new(-1, 4).unwrap()).unwrap();
        prop_assert_eq!(&x.dual().dual(), &x);
        let mut h = x.dual().hilbert().to_vec();
        h.reverse();
        prop_assert_eq!(h, x.hilbert().to_vec());
    }

    #[test]
    fn module_files_round_trip(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let m = random_module(&mut rng);
        prop_assert_eq!(parse_module_file(&print_module_file(&m)).unwrap(), m);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(8))]

    #[test]
    fn width_is_at_most_ndim(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let m = random_module(&mut rng);
        prop_assume!(!m.is_zero());
        let x = ArtinianDual::graded_dual(m);
        let cfg = InvariantConfig::default();
        let width = x.width(&cfg).unwrap().width.finite().unwrap() as i64;
        prop_assert!(width <= x.ndim(&cfg).unwrap().ndim);
    }
}
