use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use eqcipher_core::cipher::{avg_channel, implied_epsilon, indist_distance, joint_purity, purity_bound};
use eqcipher_core::hashfam::FieldGf2m;
use eqcipher_core::pauli::{conjugate, inverse_conjugate};
use eqcipher_core::qmatrix::{hermitian_eigen, min_entropy};
use eqcipher_core::sources::{decompose_flat, decompose_state, random_t_source, random_t_source_with};
use eqcipher_core::{CipherParams, DensityOperator, GeneratorKind, PauliMask};

fn kind() -> impl Strategy<Value = GeneratorKind> {
    prop::sample::select(GeneratorKind::ALL.to_vec())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn conjugation_round_trips(n in 1u32..=4, a in any::<u32>(), b in any::<u32>(), seed in any::<u64>(), k in kind()) {
        let mask = PauliMask::new(n, a & ((1 << n) - 1), b & ((1 << n) - 1)).unwrap();
        let rho = random_t_source(n, 0, k, seed).unwrap();
        let enc = conjugate(&rho, &mask).unwrap();
        let back = inverse_conjugate(&enc, &mask).unwrap();
        prop_assert!(back.matrix().max_abs_diff(rho.matrix()).unwrap() <= 1e-15);
        let before = rho.spectrum().unwrap().eigenvalues;
        let after = enc.spectrum().unwrap().eigenvalues;
        for (x, y) in before.iter().zip(&after) {
            prop_assert!((x - y).abs() <= 1e-10);
        }
    }

    #[test]
    fn field_axioms(m in prop::sample::select(vec![2u32, 4, 6, 8, 10, 12]), x in any::<u32>(), y in any::<u32>(), z in any::<u32>()) {
        let f = FieldGf2m::standard(m).unwrap();
        let mask = f.order() - 1;
        let (x, y, z) = (x & mask, y & mask, z & mask);
        prop_assert_eq!(f.mul(x, y), f.mul(y, x));
        prop_assert_eq!(f.mul(x, y ^ z), f.mul(x, y) ^ f.mul(x, z));
        prop_assert_eq!(f.mul(f.mul(x, y), z), f.mul(x, f.mul(y, z)));
        if x != 0 {
            prop_assert_eq!(f.mul(x, f.inverse(x).unwrap()), 1);
        }
    }

    #[test]
    fn flat_decomposition_reconstructs(n in 0u32..=6, t_frac in 0.0f64..1.0, seed in any::<u64>()) {
        let t = ((n.min(4) as f64 + 1.0) * t_frac) as u32;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let state = random_t_source_with(n, t, GeneratorKind::RandomDiagonal, &mut rng).unwrap();
        let w: Vec<f64> = (0..state.dim()).map(|j| state.matrix()[(j, j)].re).collect();
        let dec = decompose_flat(&w, t).unwrap();
        prop_assert!(dec.residual_against(&w) <= 1e-10);
        prop_assert!((dec.total_weight() - 1.0).abs() <= 1e-10);
        prop_assert!(dec.terms.iter().all(|(q, f)| *q > 0.0 && f.support.len() == 1 << t));
    }

    #[test]
    fn remixed_flat_terms_keep_entropy(n in 1u32..=3, seed in any::<u64>(), k in kind()) {
        let t = (seed % (n as u64 + 1)) as u32;
        let rho = random_t_source(n, t, k, seed).unwrap();
        let dec = decompose_state(&rho, t).unwrap();
        prop_assert!(dec.reconstruct_state().unwrap().max_abs_diff(rho.matrix()).unwrap() <= 1e-10);
        let terms: Vec<DensityOperator> = (0..dec.terms.len()).map(|j| dec.term_state(j).unwrap()).collect();
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 1);
        let raw: Vec<f64> = terms.iter().map(|_| rand::Rng::gen::<f64>(&mut rng) + 1e-3).collect();
        let total: f64 = raw.iter().sum();
        let mix: Vec<(f64, &DensityOperator)> = raw.iter().map(|w| w / total).zip(&terms).collect();
        let remixed = DensityOperator::mixture(&mix).unwrap();
        prop_assert!(min_entropy(&remixed).unwrap() >= t as f64 - 1e-9);
    }

    #[test]
    fn channel_metrics_are_ordered(n in 1u32..=3, t_frac in 0.0f64..1.0, t_k_frac in 0.0f64..1.0, seed in any::<u64>(), k in kind()) {
        let t = ((n as f64 + 1.0) * t_frac) as u32;
        let t_k = ((2 * n) as f64 * t_k_frac).round() as u32;
        let rho = random_t_source(n, t, k, seed).unwrap();
        let params = CipherParams::standard(n, t_k).unwrap();
        let out = avg_channel(&rho, &params).unwrap();
        let d = indist_distance(&out).unwrap();
        prop_assert!(joint_purity(&out) <= purity_bound(&rho, &params).unwrap() + 1e-12);
        prop_assert!(d <= implied_epsilon(&out) + 1e-12);
        prop_assert!((0.0..=1.0).contains(&d));
    }

    #[test]
    fn eigen_reconstructs(n in 1u32..=5, seed in any::<u64>()) {
        let rho = random_t_source(n, 0, GeneratorKind::RandomUnitaryConjugated, seed).unwrap();
        let spec = hermitian_eigen(rho.matrix()).unwrap();
        prop_assert!(spec.reconstruct().max_abs_diff(rho.matrix()).unwrap() <= 1e-10);
        prop_assert!(spec.eigenvalues.windows(2).all(|w| w[0] >= w[1]));
    }
}
