//! Property-based checks of the algebraic invariants.

use gesforge::constructions::{antisymmetric_subspace, chain_ges, chain_ges_right, p_to_s, s_to_p};
use gesforge::distill::min_pt_eigenvalue;
use gesforge::linalg::{
    kron, partial_trace, partial_transpose, permute_parties, schmidt, Bipartition, DensityOperator, DimProfile,
    PureState,
};
use gesforge::measures::{gme_measure_state, geometric_measure_state, subspace_geometric_measure, OptimizerPolicy};
use gesforge::rng::{derived_rng, gaussian_matrix, random_unit_vector, Stream};
use gesforge::subspace::{join, projector, tensor, JoinSpec, Subspace};
use gesforge::C64;
use nalgebra::DMatrix;
use proptest::prelude::*;

fn max_abs(m: &DMatrix<C64>) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

fn dims_strategy(max_parties: usize) -> impl Strategy<Value = Vec<usize>> {
    prop::collection::vec(2usize..=3, 2..=max_parties)
}

fn random_state(dims: &[usize], seed: u64) -> PureState {
    let profile = DimProfile::new(dims.to_vec()).unwrap();
    let mut rng = derived_rng(seed, Stream::Samples, 0);
    PureState::new(random_unit_vector(&mut rng, profile.total()), profile).unwrap()
}

fn random_mixed(dims: &[usize], rank: usize, seed: u64) -> DensityOperator {
    let profile = DimProfile::new(dims.to_vec()).unwrap();
    let mut rng = derived_rng(seed, Stream::Samples, 1);
    let g = gaussian_matrix(&mut rng, profile.total(), rank);
    DensityOperator::from_unnormalized(&g * g.adjoint(), profile).unwrap()
}

fn random_subspace(dims: &[usize], k: usize, seed: u64) -> Subspace {
    let profile = DimProfile::new(dims.to_vec()).unwrap();
    let mut rng = derived_rng(seed, Stream::Samples, 2);
    let vecs: Vec<_> = (0..k).map(|_| random_unit_vector(&mut rng, profile.total())).collect();
    Subspace::from_vectors(&vecs, profile).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn schmidt_reconstructs_and_normalizes(dims in dims_strategy(3), seed in any::<u64>()) {
        let psi = random_state(&dims, seed);
        for cut in Bipartition::all_cuts(psi.profile()) {
            let s = schmidt(&psi, &cut).unwrap();
            let total: f64 = s.lambdas().iter().sum();
            prop_assert!((total - 1.0).abs() < 1e-12);
            let back = s.reconstruct().unwrap();
            prop_assert!((back - psi.amplitudes()).norm() < 1e-12);
            for w in s.coeffs.windows(2) {
                prop_assert!(w[0] >= w[1]);
            }
        }
    }

    #[test]
    fn partial_transpose_is_involutive_and_trace_preserving(dims in dims_strategy(3), seed in any::<u64>()) {
        let rho = random_mixed(&dims, 2, seed);
        for cut in Bipartition::all_cuts(rho.profile()) {
            let t = partial_transpose(&rho, &cut).unwrap();
            prop_assert!((t.trace().re - 1.0).abs() < 1e-12);
            prop_assert!(max_abs(&(&t - t.adjoint())) < 1e-12);
            let tt = gesforge::linalg::partial_transpose_matrix(&t, rho.profile(), cut.members());
            prop_assert!(max_abs(&(tt - rho.matrix())) < 1e-14);
            let a = min_pt_eigenvalue(&rho, &cut).unwrap().min_eigenvalue;
            let b = min_pt_eigenvalue(&rho, &cut.complement()).unwrap().min_eigenvalue;
            prop_assert!((a - b).abs() < 1e-10);
        }
    }

    #[test]
    fn partial_trace_of_product_is_factor(d1 in 2usize..=3, d2 in 2usize..=3, seed in any::<u64>()) {
        let a = random_mixed(&[d1], 1, seed);
        let b = random_mixed(&[d2], 2, seed ^ 1);
        let ab = a.kron(&b).unwrap();
        let ra = partial_trace(&ab, &[1]).unwrap();
        let rb = partial_trace(&ab, &[0]).unwrap();
        prop_assert!(max_abs(&(ra.matrix() - a.matrix())) < 1e-12);
        prop_assert!(max_abs(&(rb.matrix() - b.matrix())) < 1e-12);
    }

    #[test]
    fn kron_mixed_product(seed in any::<u64>()) {
        let mut rng = derived_rng(seed, Stream::Samples, 3);
        let a = gaussian_matrix(&mut rng, 2, 3);
        let b = gaussian_matrix(&mut rng, 3, 2);
        let c = gaussian_matrix(&mut rng, 3, 2);
        let d = gaussian_matrix(&mut rng, 2, 3);
        let lhs = kron(&a, &b).unwrap() * kron(&c, &d).unwrap();
        let rhs = kron(&(&a * &c), &(&b * &d)).unwrap();
        prop_assert!(max_abs(&(lhs - rhs)) < 1e-10);
    }

    #[test]
    fn permutation_round_trip(dims in dims_strategy(4), seed in any::<u64>()) {
        let psi = random_state(&dims, seed);
        let n = dims.len();
        let perm: Vec<usize> = (0..n).rev().collect();
        let mut inverse = vec![0; n];
        for (k, &p) in perm.iter().enumerate() {
            inverse[p] = k;
        }
        let there = permute_parties(&psi, &perm).unwrap();
        let back = permute_parties(&there, &inverse).unwrap();
        prop_assert_eq!(back.profile(), psi.profile());
        prop_assert!((back.amplitudes() - psi.amplitudes()).norm() < 1e-15);
    }

    #[test]
    fn gme_is_minimum_over_cuts(dims in dims_strategy(4), seed in any::<u64>()) {
        let psi = random_state(&dims, seed);
        let (g, cut) = gme_measure_state(&psi).unwrap();
        for c in Bipartition::all_cuts(psi.profile()) {
            prop_assert!(g <= geometric_measure_state(&psi, &c).unwrap() + 1e-15);
        }
        prop_assert!((g - geometric_measure_state(&psi, &cut).unwrap()).abs() < 1e-15);
    }

    #[test]
    fn subspace_json_round_trip(d1 in 2usize..=3, d2 in 2usize..=4, k in 1usize..=3, seed in any::<u64>()) {
        let s = random_subspace(&[d1, d2], k, seed);
        let back = Subspace::from_json(&s.to_json()).unwrap();
        prop_assert!(max_abs(&(projector(&back) - projector(&s))) < 1e-12);
    }

    #[test]
    fn tensor_and_join_bookkeeping(k1 in 1usize..=2, k2 in 1usize..=2, seed in any::<u64>()) {
        let a = random_subspace(&[2, 3], k1, seed);
        let b = random_subspace(&[3, 2], k2, seed ^ 7);
        let t = tensor(&a, &b).unwrap();
        prop_assert_eq!(t.dim(), k1 * k2);
        prop_assert_eq!(t.profile().dims(), &[2, 3, 3, 2]);
        let j = join(&t, JoinSpec { left_party: 1 }).unwrap();
        prop_assert_eq!(j.profile().dims(), &[2, 9, 2]);
        prop_assert_eq!(j.basis(), t.basis());
    }

    #[test]
    fn werner_parameter_round_trip(s in 0.0f64..=1.0, d in 2usize..=8) {
        let p = s_to_p(s, d).unwrap();
        prop_assert!((-1.0 - 1e-12..=1.0 + 1e-12).contains(&p));
        prop_assert!((p_to_s(p.clamp(-1.0, 1.0), d).unwrap() - s).abs() < 1e-12);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn subspace_measure_respects_column_floor(d1 in 2usize..=3, d2 in 2usize..=3, k in 1usize..=3, seed in any::<u64>()) {
        let s = random_subspace(&[d1, d2], k, seed);
        let opt = OptimizerPolicy { restarts: 8, agreement_count: 1, ..OptimizerPolicy::default() };
        let r = subspace_geometric_measure(&s, &opt).unwrap();
        prop_assert!((0.0..=1.0).contains(&r.value));
        let cut = Bipartition::new(&[0], s.profile()).unwrap();
        for c in 0..s.dim() {
            let g = geometric_measure_state(&s.column_state(c), &cut).unwrap();
            prop_assert!(r.value <= g + 1e-12);
        }
        prop_assert!(gesforge::subspace::contains(&s, &r.witness_vector, 1e-9).unwrap());
        prop_assert!((geometric_measure_state(&r.witness_vector, &cut).unwrap() - r.value).abs() < 1e-9);
    }
}

#[test]
fn chain_folds_agree() {
    let a = antisymmetric_subspace(2).unwrap();
    let b = antisymmetric_subspace(3).unwrap();
    let left = chain_ges(&[a.clone(), b.clone(), a.clone()]).unwrap();
    let right = chain_ges_right(&[a.clone(), b, a]).unwrap();
    assert_eq!(left.profile(), right.profile());
    assert!(max_abs(&(projector(&left) - projector(&right))) < 1e-12);
}
