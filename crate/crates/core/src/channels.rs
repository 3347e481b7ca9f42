//! The multichannel measurement pipeline.
//!
//! A system state `ρ_S` is coupled to a finite-dimensional measurer (a
//! pointer with a user-supplied coupling Hamiltonian), evolved unitarily,
//! disentangled by readout into the product of its reduced states, moved to
//! another observable's basis and read out again:
//!
//! ```text
//! ρ_B → ρ_B ⊗ ρ_M → ρ_BM → ρ_B ⊗ ρ_M → ρ_BM → ρ_AM → ρ_A
//! ```
//!
//! Every intermediate state is a validated density operator on either the
//! system or the joint space.

use alloc::format;
use alloc::vec::Vec;

use crate::composite::CompositeState;
use crate::dynamics::AmplitudeMatrix;
use crate::error::{Error, Result};
use crate::events::{DensityOperator, Observable};
use crate::linalg::{matrix_exponential, partial_trace, tensor_product, ComplexMatrix, Subsystem};

/// The measurer: its initial state and the Hermitian interaction
/// Hamiltonian on `system ⊗ measurer`.
#[derive(Debug, Clone, PartialEq)]
pub struct MeasurerSpec {
    initial_state: DensityOperator,
    coupling: ComplexMatrix,
}

impl MeasurerSpec {
    pub fn new(initial_state: DensityOperator, coupling: ComplexMatrix) -> Result<Self> {
        coupling.require_hermitian("coupling Hamiltonian")?;
        if !coupling.rows().is_multiple_of(initial_state.dim()) {
            return Err(Error::Shape(format!(
                "coupling of size {} is not a multiple of the measurer dimension {}",
                coupling.rows(),
                initial_state.dim()
            )));
        }
        Ok(MeasurerSpec {
            initial_state,
            coupling,
        })
    }

    pub fn dim(&self) -> usize {
        self.initial_state.dim()
    }

    pub fn initial_state(&self) -> &DensityOperator {
        &self.initial_state
    }

    pub fn coupling(&self) -> &ComplexMatrix {
        &self.coupling
    }

    /// Dimension of the system this measurer couples to.
    pub fn system_dim(&self) -> usize {
        self.coupling.rows() / self.dim()
    }
}

/// One channel of the pipeline.
#[derive(Debug, Clone, PartialEq)]
pub enum PipelineStage {
    /// `ρ_S → ρ_S ⊗ ρ_M`.
    Compose,
    /// `U ρ U†` under the coupling for the given duration (`ħ = 1`).
    Evolve { duration: f64 },
    /// `ρ_SM → Tr_M ρ_SM ⊗ Tr_S ρ_SM`.
    Readout,
    /// `(T ⊗ 1_M) ρ (T ⊗ 1_M)†` with unitary `T` on the system.
    Transform { basis: ComplexMatrix },
}

impl PipelineStage {
    pub fn name(&self) -> &'static str {
        match self {
            PipelineStage::Compose => "compose",
            PipelineStage::Evolve { .. } => "evolve",
            PipelineStage::Readout => "readout",
            PipelineStage::Transform { .. } => "transform",
        }
    }

    /// `T = E_A† E_B`: coordinates in the eigenbasis of `b` to coordinates in
    /// the eigenbasis of `a`.
    pub fn basis_change(a: &Observable, b: &Observable) -> Result<PipelineStage> {
        let basis = a.basis().adjoint().try_mul(b.basis())?;
        Ok(PipelineStage::Transform { basis })
    }
}

/// The six-stage sequence with the given durations and transform.
pub fn standard_stages(first: f64, second: f64, transform: ComplexMatrix) -> Vec<PipelineStage> {
    alloc::vec![
        PipelineStage::Compose,
        PipelineStage::Evolve { duration: first },
        PipelineStage::Readout,
        PipelineStage::Evolve { duration: second },
        PipelineStage::Transform { basis: transform },
        PipelineStage::Readout,
    ]
}

/// State after one stage.
#[derive(Debug, Clone, PartialEq)]
pub struct StageRecord {
    pub stage: &'static str,
    /// Channel label `C0`, `C1`, … in execution order.
    pub channel: usize,
    pub time: f64,
    /// Joint state after the stage (system ⊗ measurer).
    pub state: DensityOperator,
    /// System factor after a readout.
    pub system: Option<DensityOperator>,
    /// Measurer factor after a readout.
    pub measurer: Option<DensityOperator>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PipelineTrace {
    pub records: Vec<StageRecord>,
    /// System state at the first readout (`ρ_B`), if any.
    pub reduced_b: Option<DensityOperator>,
    /// `Tr_M` of the final joint state (`ρ_A`).
    pub final_a: DensityOperator,
}

/// `C0`: `ρ_S ⊗ ρ_M`.
pub fn compose(rho: &DensityOperator, measurer: &MeasurerSpec) -> Result<DensityOperator> {
    Ok(DensityOperator::from_trusted(tensor_product(
        rho.matrix(),
        measurer.initial_state.matrix(),
    )?))
}

/// `U ρ U†` with `U = exp(−iHt)`.
pub fn evolve(rho: &DensityOperator, hamiltonian: &ComplexMatrix, t: f64) -> Result<DensityOperator> {
    if !(t >= 0.0) {
        return Err(Error::TimeOrder { from: 0.0, to: t });
    }
    if hamiltonian.rows() != rho.dim() {
        return Err(Error::mismatch(rho.dim(), hamiltonian.rows()));
    }
    let u = matrix_exponential(hamiltonian, t)?;
    DensityOperator::new(rho.matrix().conjugate_by(&u)?)
}

/// Both partial traces of a joint state on `C^dS ⊗ C^dM`.
pub fn readout(rho: &DensityOperator, dims: (usize, usize)) -> Result<(DensityOperator, DensityOperator)> {
    let s = partial_trace(rho.matrix(), dims, Subsystem::A)?;
    let m = partial_trace(rho.matrix(), dims, Subsystem::B)?;
    Ok((DensityOperator::new(s)?, DensityOperator::new(m)?))
}

/// `T ρ T†` for unitary `T`.
pub fn transform_basis(rho: &DensityOperator, t_ab: &ComplexMatrix) -> Result<DensityOperator> {
    t_ab.require_unitary("basis transformation")?;
    if t_ab.rows() != rho.dim() {
        return Err(Error::mismatch(rho.dim(), t_ab.rows()));
    }
    DensityOperator::new(rho.matrix().conjugate_by(t_ab)?)
}

/// Runs the stages in order. `Compose` must come first and only once;
/// every readout must follow an evolution or a transform.
pub fn run_pipeline(rho: &DensityOperator, measurer: &MeasurerSpec, stages: &[PipelineStage]) -> Result<PipelineTrace> {
    let dims = (rho.dim(), measurer.dim());
    if measurer.system_dim() != rho.dim() {
        return Err(Error::mismatch(measurer.system_dim(), rho.dim()));
    }
    match stages.first() {
        Some(PipelineStage::Compose) => {}
        _ => return Err(Error::Protocol("pipeline must start with compose".into())),
    }
    let mut records = Vec::with_capacity(stages.len());
    let mut time = 0.0;
    let mut joint = compose(rho, measurer)?;
    let mut reduced_b = None;
    records.push(StageRecord {
        stage: "compose",
        channel: 0,
        time,
        state: joint.clone(),
        system: None,
        measurer: None,
    });
    let mut previous = &stages[0];
    for (channel, stage) in stages.iter().enumerate().skip(1) {
        let (system, measured) = match stage {
            PipelineStage::Compose => {
                return Err(Error::Protocol(format!("compose repeated at stage {channel}")));
            }
            PipelineStage::Evolve { duration } => {
                if !(*duration >= 0.0) || !duration.is_finite() {
                    return Err(Error::TimeOrder {
                        from: time,
                        to: time + duration,
                    });
                }
                joint = evolve(&joint, &measurer.coupling, *duration)?;
                time += duration;
                (None, None)
            }
            PipelineStage::Transform { basis } => {
                basis.require_unitary("basis transformation")?;
                if basis.rows() != dims.0 {
                    return Err(Error::mismatch(dims.0, basis.rows()));
                }
                let lifted = tensor_product(basis, &ComplexMatrix::identity(dims.1))?;
                joint = transform_basis(&joint, &lifted)?;
                (None, None)
            }
            PipelineStage::Readout => {
                if !matches!(previous, PipelineStage::Evolve { .. } | PipelineStage::Transform { .. }) {
                    return Err(Error::Protocol(format!(
                        "readout at stage {channel} must follow an evolution or transform"
                    )));
                }
                let (s, m) = readout(&joint, dims)?;
                joint = DensityOperator::new(tensor_product(s.matrix(), m.matrix())?)?;
                if reduced_b.is_none() {
                    reduced_b = Some(s.clone());
                }
                (Some(s), Some(m))
            }
        };
        records.push(StageRecord {
            stage: stage.name(),
            channel,
            time,
            state: joint.clone(),
            system,
            measurer: measured,
        });
        previous = stage;
    }
    let final_a = DensityOperator::new(partial_trace(joint.matrix(), dims, Subsystem::A)?)?;
    Ok(PipelineTrace {
        records,
        reduced_b,
        final_a,
    })
}

/// Pure composite state dual to a correlation amplitude matrix,
/// `ρ^{αβ}_{mn} = c_{mα} c*_{nβ}`.
pub fn composite_state_from_correlation(c: &AmplitudeMatrix) -> Result<CompositeState> {
    CompositeState::from_amplitudes(c.matrix())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{ComplexVector, C64, ZERO};
    use crate::measure::born_distribution;
    use alloc::vec;
    use core::f64::consts::{FRAC_1_SQRT_2, PI};

    fn r(x: f64) -> C64 {
        C64::new(x, 0.0)
    }

    fn pointer(coupling_time_scale: f64) -> MeasurerSpec {
        let sz = ComplexMatrix::from_real_diagonal(&[1.0, -1.0]);
        let sx = ComplexMatrix::from_real_rows(&[&[0.0, 1.0], &[1.0, 0.0]]).unwrap();
        let h = tensor_product(&sz, &sx).unwrap().scale_real(coupling_time_scale);
        let zero = DensityOperator::from_pure(&ComplexVector::basis(2, 0).unwrap()).unwrap();
        MeasurerSpec::new(zero, h).unwrap()
    }

    fn input() -> DensityOperator {
        let psi = ComplexVector::new(vec![r(0.6), C64::new(0.0, 0.8)]).unwrap();
        DensityOperator::from_pure(&psi).unwrap()
    }

    #[test]
    fn compose_products() {
        let mixed = DensityOperator::maximally_mixed(2).unwrap();
        let m = MeasurerSpec::new(mixed.clone(), ComplexMatrix::zeros(4, 4)).unwrap();
        let joint = compose(&mixed, &m).unwrap();
        assert!(joint.matrix().max_abs_diff(&ComplexMatrix::identity(4).scale_real(0.25)) < 1e-15);
        let pure = compose(&input(), &pointer(1.0)).unwrap();
        assert!((pure.purity() - 1.0).abs() < 1e-14);
    }

    #[test]
    fn evolve_cases() {
        let rho = compose(&input(), &pointer(1.0)).unwrap();
        let same = evolve(&rho, pointer(1.0).coupling(), 0.0).unwrap();
        assert!(same.matrix().max_abs_diff(rho.matrix()) < 1e-15);
        let diag = DensityOperator::new(ComplexMatrix::from_real_diagonal(&[0.1, 0.2, 0.3, 0.4])).unwrap();
        let h = ComplexMatrix::from_real_diagonal(&[1.0, -2.0, 0.5, 3.0]);
        assert!(evolve(&diag, &h, 2.3).unwrap().matrix().max_abs_diff(diag.matrix()) < 1e-14);
        assert!(evolve(&diag, &h, -1.0).is_err());
        let bad = ComplexMatrix::from_real_rows(&[&[0.0, 1.0], &[0.0, 0.0]]).unwrap();
        assert!(evolve(&DensityOperator::maximally_mixed(2).unwrap(), &bad, 1.0).is_err());
    }

    #[test]
    fn readout_of_bell_is_maximally_mixed() {
        let psi = ComplexVector::new(vec![r(FRAC_1_SQRT_2), ZERO, ZERO, r(FRAC_1_SQRT_2)]).unwrap();
        let (s, m) = readout(&DensityOperator::from_pure(&psi).unwrap(), (2, 2)).unwrap();
        let half = ComplexMatrix::identity(2).scale_real(0.5);
        assert!(s.matrix().max_abs_diff(&half) < 1e-15);
        assert!(m.matrix().max_abs_diff(&half) < 1e-15);
    }

    #[test]
    fn hadamard_transform() {
        let zero = DensityOperator::from_pure(&ComplexVector::basis(2, 0).unwrap()).unwrap();
        let h = ComplexMatrix::from_real_rows(&[&[1.0, 1.0], &[1.0, -1.0]]).unwrap().scale_real(FRAC_1_SQRT_2);
        let out = transform_basis(&zero, &h).unwrap();
        let plus = ComplexMatrix::from_real_rows(&[&[0.5, 0.5], &[0.5, 0.5]]).unwrap();
        assert!(out.matrix().max_abs_diff(&plus) < 1e-15);
        let not_unitary = ComplexMatrix::from_real_diagonal(&[1.0, 2.0]);
        assert!(transform_basis(&zero, &not_unitary).is_err());
    }

    #[test]
    fn zero_duration_pipeline_is_identity() {
        let stages = standard_stages(0.0, 0.0, ComplexMatrix::identity(2));
        let trace = run_pipeline(&input(), &pointer(1.0), &stages).unwrap();
        assert!(trace.final_a.matrix().max_abs_diff(input().matrix()) < 1e-12);
        assert_eq!(trace.records.len(), 6);
        assert_eq!(trace.records[5].channel, 5);
    }

    #[test]
    fn pointer_reproduces_born_distribution() {
        let z = Observable::computational("Z", 2).unwrap();
        let expected = born_distribution(&input(), &z).unwrap();
        for t in [PI / 2.0, PI / 4.0, 0.3] {
            let stages = [PipelineStage::Compose, PipelineStage::Evolve { duration: t }, PipelineStage::Readout];
            let trace = run_pipeline(&input(), &pointer(1.0), &stages).unwrap();
            let got = born_distribution(trace.reduced_b.as_ref().unwrap(), &z).unwrap();
            for n in 0..2 {
                assert!((got[n] - expected[n]).abs() < 1e-10);
            }
        }
        // At t = π/4 the pointer states are orthogonal and coherences vanish.
        let stages = [PipelineStage::Compose, PipelineStage::Evolve { duration: PI / 4.0 }, PipelineStage::Readout];
        let trace = run_pipeline(&input(), &pointer(1.0), &stages).unwrap();
        assert!(trace.final_a.matrix()[(0, 1)].norm() < 1e-12);
    }

    #[test]
    fn protocol_errors() {
        let m = pointer(1.0);
        let no_compose = [PipelineStage::Evolve { duration: 1.0 }];
        assert!(matches!(run_pipeline(&input(), &m, &no_compose), Err(Error::Protocol(_))));
        let early_readout = [PipelineStage::Compose, PipelineStage::Readout];
        assert!(matches!(run_pipeline(&input(), &m, &early_readout), Err(Error::Protocol(_))));
        let twice = [PipelineStage::Compose, PipelineStage::Compose];
        assert!(matches!(run_pipeline(&input(), &m, &twice), Err(Error::Protocol(_))));
        let backwards = [PipelineStage::Compose, PipelineStage::Evolve { duration: -1.0 }];
        assert!(matches!(run_pipeline(&input(), &m, &backwards), Err(Error::TimeOrder { .. })));
    }

    #[test]
    fn basis_change_maps_eigenbases() {
        let z = Observable::computational("Z", 2).unwrap();
        let x = Observable::fourier("X", 2).unwrap();
        let PipelineStage::Transform { basis } = PipelineStage::basis_change(&z, &x).unwrap() else {
            panic!("expected a transform");
        };
        assert!(basis.unitarity_residual() < 1e-15);
        assert!((basis[(0, 0)] - r(FRAC_1_SQRT_2)).norm() < 1e-15);
    }
}
