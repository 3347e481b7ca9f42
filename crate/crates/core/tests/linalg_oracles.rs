mod common;

use common::*;
use qprospect_core::composite::CompositeState;
use qprospect_core::entangle::{entanglement_production, LogBase};
use qprospect_core::events::DensityOperator;
use qprospect_core::linalg::{matrix_exponential, partial_trace, spectral_norm, tensor_product, Subsystem};
use qprospect_core::ComplexMatrix;

#[test]
fn exponential_matches_scaling_and_squaring() {
    let mut rng = rng(11);
    for dim in 2..=8 {
        for &t in &[0.0, 0.3, 2.5, 17.0] {
            let h = random_hermitian(&mut rng, dim);
            let exact = matrix_exponential(&h, t).unwrap();
            let oracle = expm_taylor(&h, t);
            let diff = exact.max_abs_diff(&oracle);
            assert!(diff < 1e-9, "dim {dim} t {t}: {diff}");
            assert!(exact.unitarity_residual() < 1e-12);
        }
    }
}

#[test]
fn spectral_norm_matches_power_iteration() {
    let mut rng = rng(12);
    for dim in 2..=8 {
        let h = random_hermitian(&mut rng, dim);
        let fast = spectral_norm(&h).unwrap();
        let oracle = power_norm(&h, &mut rng);
        assert!((fast - oracle).abs() < 1e-8 * fast.max(1.0), "{fast} vs {oracle}");
    }
}

#[test]
fn partial_trace_of_product_recovers_factors() {
    let mut rng = rng(13);
    for (da, db) in [(2, 3), (3, 2), (4, 4), (2, 5)] {
        let a = random_density(&mut rng, da);
        let b = random_density(&mut rng, db);
        let ab = tensor_product(a.matrix(), b.matrix()).unwrap();
        assert!(partial_trace(&ab, (da, db), Subsystem::A).unwrap().max_abs_diff(a.matrix()) < 1e-14);
        assert!(partial_trace(&ab, (da, db), Subsystem::B).unwrap().max_abs_diff(b.matrix()) < 1e-14);
    }
}

#[test]
fn entanglement_norms_against_eigenvalue_oracle() {
    let mut rng = rng(14);
    for (da, db) in [(2, 2), (2, 3), (3, 3), (4, 2)] {
        // Separable mixture of diagonal product states.
        let mut m = ComplexMatrix::zeros(da * db, da * db);
        let weights: Vec<f64> = (0..3).map(|_| rand::Rng::random::<f64>(&mut rng) + 0.1).collect();
        let total: f64 = weights.iter().sum();
        for w in &weights {
            let pa: Vec<f64> = (0..da).map(|_| rand::Rng::random::<f64>(&mut rng)).collect();
            let pb: Vec<f64> = (0..db).map(|_| rand::Rng::random::<f64>(&mut rng)).collect();
            let (sa, sb): (f64, f64) = (pa.iter().sum(), pb.iter().sum());
            let a = ComplexMatrix::from_real_diagonal(&pa.iter().map(|x| x / sa).collect::<Vec<_>>());
            let b = ComplexMatrix::from_real_diagonal(&pb.iter().map(|x| x / sb).collect::<Vec<_>>());
            m = &m + &tensor_product(&a, &b).unwrap().scale_real(w / total);
        }
        let rho = CompositeState::new(m, (da, db)).unwrap();
        let report = entanglement_production(&rho, LogBase::Natural).unwrap();
        let joint = power_norm(rho.matrix(), &mut rng);
        let a = power_norm(rho.reduced_a().matrix(), &mut rng);
        let b = power_norm(rho.reduced_b().matrix(), &mut rng);
        assert!((report.spectral.joint - joint).abs() < 1e-10);
        assert!((report.spectral.a - a).abs() < 1e-10);
        assert!((report.spectral.b - b).abs() < 1e-10);
        assert!((report.spectral.epsilon - (joint / (a * b)).ln()).abs() < 1e-9);
        // Diagonal states: both evaluations coincide.
        assert!((report.epsilon - report.spectral.epsilon).abs() < 1e-10);
    }
}

#[test]
fn classical_correlation_registers() {
    // ½(|00⟩⟨00| + |11⟩⟨11|) is separable, yet every norm equals ½.
    let m = ComplexMatrix::from_real_diagonal(&[0.5, 0.0, 0.0, 0.5]);
    let rho = CompositeState::new(m, (2, 2)).unwrap();
    let report = entanglement_production(&rho, LogBase::Natural).unwrap();
    assert!((report.epsilon - 2f64.ln()).abs() < 1e-12);
}

#[test]
fn product_states_of_all_small_dims_have_zero_epsilon() {
    let mut rng = rng(15);
    for da in 2..=6 {
        for db in 2..=6 {
            let a = DensityOperator::from_pure(&random_unit_vector(&mut rng, da)).unwrap();
            let b = random_density(&mut rng, db);
            let rho = CompositeState::product(&a, &b).unwrap();
            let report = entanglement_production(&rho, LogBase::Two).unwrap();
            assert!(report.epsilon.abs() < 1e-12, "{da}x{db}: {}", report.epsilon);
            assert!(report.spectral.epsilon.abs() < 1e-10);
            let r = report.norms;
            assert!((report.epsilon - (r.0 / (r.1 * r.2)).log2()).abs() < 1e-12);
        }
    }
}
