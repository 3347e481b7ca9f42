//! Entanglement production and generalized Bell states.
//!
//! `ε(ρ) = log(‖ρ_AB‖ / (‖ρ_A‖ ‖ρ_B‖))`. Two evaluations of the three norms
//! are computed:
//!
//! * `diagonal`: the basis-diagonal suprema `sup_{nα} ρ^{αα}_{nn}`,
//!   `sup_n Σ_α ρ^{αα}_{nn}` and `sup_α Σ_n ρ^{αα}_{nn}`. This is the
//!   evaluation under which the Bell state gives `ε = log M`, and it is the
//!   one reported as [`EntanglementReport::epsilon`].
//! * `spectral`: operator norms from eigendecomposition. For a pure
//!   composite state `‖ρ_AB‖ = 1`, so the Bell state gives `2 log M` here.
//!
//! Both agree on product states (`ε = 0`).

use alloc::format;

use crate::composite::CompositeState;
use crate::error::{Error, Result};
use crate::linalg::{spectral_norm, ComplexMatrix, C64};
use crate::numeric;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum LogBase {
    #[default]
    Natural,
    Two,
}

impl LogBase {
    pub fn log(self, x: f64) -> f64 {
        match self {
            LogBase::Natural => libm::log(x),
            LogBase::Two => libm::log2(x),
        }
    }

    pub fn unit(self) -> &'static str {
        match self {
            LogBase::Natural => "nat",
            LogBase::Two => "bit",
        }
    }
}

/// `(‖ρ_AB‖, ‖ρ_A‖, ‖ρ_B‖)` under one evaluation, with the resulting `ε`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NormTriple {
    pub joint: f64,
    pub a: f64,
    pub b: f64,
    pub epsilon: f64,
}

impl NormTriple {
    fn new(joint: f64, a: f64, b: f64, base: LogBase) -> Result<Self> {
        let denominator = a * b;
        if denominator <= numeric::DIVISION_GUARD || joint <= numeric::DIVISION_GUARD {
            return Err(Error::NumericContract {
                quantity: "entanglement norm",
                value: denominator.min(joint),
                bound: "> 1e-12",
            });
        }
        Ok(NormTriple {
            joint,
            a,
            b,
            epsilon: base.log(joint / denominator),
        })
    }

    pub fn as_tuple(&self) -> (f64, f64, f64) {
        (self.joint, self.a, self.b)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EntanglementReport {
    pub epsilon: f64,
    pub norms: (f64, f64, f64),
    pub log_base: LogBase,
    pub diagonal: NormTriple,
    pub spectral: NormTriple,
}

impl EntanglementReport {
    pub fn unit(&self) -> &'static str {
        self.log_base.unit()
    }
}

fn diagonal_norms(rho: &CompositeState, base: LogBase) -> Result<NormTriple> {
    let (da, db) = rho.dims();
    let mut joint = 0.0f64;
    let mut row = alloc::vec![0.0f64; da];
    let mut col = alloc::vec![0.0f64; db];
    for n in 0..da {
        for alpha in 0..db {
            let d = rho.element(n, alpha, n, alpha).re;
            joint = joint.max(d);
            row[n] += d;
            col[alpha] += d;
        }
    }
    let a = row.iter().copied().fold(0.0, f64::max);
    let b = col.iter().copied().fold(0.0, f64::max);
    NormTriple::new(joint, a, b, base)
}

fn spectral_norms(rho: &CompositeState, base: LogBase) -> Result<NormTriple> {
    NormTriple::new(
        spectral_norm(rho.matrix())?,
        spectral_norm(rho.reduced_a().matrix())?,
        spectral_norm(rho.reduced_b().matrix())?,
        base,
    )
}

pub fn entanglement_production(rho: &CompositeState, log_base: LogBase) -> Result<EntanglementReport> {
    let diagonal = diagonal_norms(rho, log_base)?;
    let spectral = spectral_norms(rho, log_base)?;
    Ok(EntanglementReport {
        epsilon: diagonal.epsilon,
        norms: diagonal.as_tuple(),
        log_base,
        diagonal,
        spectral,
    })
}

/// `(1/M) Σ_{mn} |mm⟩⟨nn|`.
pub fn bell_state(m: usize) -> Result<CompositeState> {
    if m < 2 {
        return Err(Error::InvalidArgument(format!("Bell state needs M >= 2, got {m}")));
    }
    let s = 1.0 / libm::sqrt(m as f64);
    let c = ComplexMatrix::from_fn(m, m, |n, a| if n == a { C64::new(s, 0.0) } else { C64::new(0.0, 0.0) });
    CompositeState::from_amplitudes(&c)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::composite::{joint_probability, prospect_lattice, Normalization};
    use crate::events::DensityOperator;
    use crate::linalg::ComplexVector;
    use alloc::vec;

    #[test]
    #[allow(clippy::approx_constant)]
    fn bell_gives_log_m() {
        for m in 2..=8 {
            let rho = bell_state(m).unwrap();
            let report = entanglement_production(&rho, LogBase::Natural).unwrap();
            assert!((report.epsilon - libm::log(m as f64)).abs() < 1e-12);
            assert!((report.spectral.epsilon - 2.0 * libm::log(m as f64)).abs() < 1e-10);
            let bits = entanglement_production(&rho, LogBase::Two).unwrap();
            assert!((bits.epsilon - libm::log2(m as f64)).abs() < 1e-12);
            assert_eq!(bits.unit(), "bit");
            for n in 0..m {
                for a in 0..m {
                    let expected = if n == a { 1.0 / m as f64 } else { 0.0 };
                    assert!((joint_probability(&rho, n, a).unwrap() - expected).abs() < 1e-15);
                }
            }
            let lattice = prospect_lattice(&rho, &vec![C64::new(1.0, 0.0); m], Normalization::Raw).unwrap();
            assert!(lattice.iter().all(|x| x.q.abs() < 1e-12));
        }
        assert!((entanglement_production(&bell_state(2).unwrap(), LogBase::Natural).unwrap().epsilon - 0.693147).abs() < 1e-6);
        assert!(bell_state(1).is_err());
    }

    #[test]
    fn product_states_are_unentangled() {
        let plus = ComplexVector::from_real(&[1.0, 1.0]).unwrap().normalized().unwrap();
        let a = DensityOperator::from_pure(&plus).unwrap();
        let b = DensityOperator::new(ComplexMatrix::from_real_diagonal(&[0.2, 0.5, 0.3])).unwrap();
        let rho = CompositeState::product(&a, &b).unwrap();
        let report = entanglement_production(&rho, LogBase::Natural).unwrap();
        assert!(report.epsilon.abs() < 1e-12);
        assert!(report.spectral.epsilon.abs() < 1e-12);
    }

    #[test]
    fn entangled_state_with_interference() {
        // c = [[0.6, 0.3], [0.3i, ·]] normalized: entangled and q ≠ 0.
        let raw = [C64::new(0.6, 0.0), C64::new(0.3, 0.0), C64::new(0.0, 0.3), C64::new(0.2, 0.0)];
        let norm = libm::sqrt(raw.iter().map(|z| z.norm_sqr()).sum::<f64>());
        let c = ComplexMatrix::new(2, 2, raw.iter().map(|z| z / norm).collect()).unwrap();
        let rho = CompositeState::from_amplitudes(&c).unwrap();
        let report = entanglement_production(&rho, LogBase::Natural).unwrap();
        assert!(report.spectral.epsilon > 1e-3);
        let lattice = prospect_lattice(&rho, &[C64::new(1.0, 0.0), C64::new(1.0, 0.0)], Normalization::Raw).unwrap();
        assert!(lattice.iter().any(|x| x.q.abs() > 0.01));
    }
}
