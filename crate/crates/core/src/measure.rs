//! Single-space measurement calculus: Born probabilities, expected values,
//! Lüders reduction and transition probabilities, Wigner and Kirkwood forms.
//!
//! Raw probabilities are checked against `[−1e-12, 1 + 1e-12]` before being
//! clamped into `[0, 1]`; a larger excursion is a numeric contract error.

use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::events::{DensityOperator, EventId, Observable};
use crate::linalg::{ComplexVector, C64, ZERO};
use crate::numeric;

fn check_dims(rho: &DensityOperator, obs: &Observable) -> Result<()> {
    rho.require_dim(obs.dim())
}

fn same_space(a: &Observable, b: &Observable) -> Result<()> {
    if a.dim() != b.dim() {
        return Err(Error::mismatch(a.dim(), b.dim()));
    }
    Ok(())
}

fn raw_born(rho: &DensityOperator, v: &ComplexVector) -> Result<f64> {
    Ok(rho.matrix().sandwich(v, v)?.re)
}

/// `p(A_n) = ⟨n|ρ|n⟩`.
pub fn born_probability(rho: &DensityOperator, obs: &Observable, n: usize) -> Result<f64> {
    check_dims(rho, obs)?;
    let v = obs.eigenvector(n)?;
    numeric::clamp_probability("Born probability", raw_born(rho, &v)?)
}

/// Born probabilities of every eigenstate of `obs`.
pub fn born_distribution(rho: &DensityOperator, obs: &Observable) -> Result<Vec<f64>> {
    (0..obs.dim()).map(|n| born_probability(rho, obs, n)).collect()
}

/// `⟨Â⟩ = Σ_n p(A_n) A_n`.
pub fn expected_value(rho: &DensityOperator, obs: &Observable) -> Result<f64> {
    Ok(born_distribution(rho, obs)?
        .iter()
        .zip(obs.eigenvalues())
        .map(|(p, a)| p * a)
        .sum())
}

/// Index of the most probable eigenstate; ties go to the lowest index.
pub fn most_probable(rho: &DensityOperator, obs: &Observable) -> Result<usize> {
    let probs = born_distribution(rho, obs)?;
    let mut best = 0;
    for (n, &p) in probs.iter().enumerate().skip(1) {
        if p > probs[best] {
            best = n;
        }
    }
    Ok(best)
}

/// Probability of a union of distinct eigenstates of one observable.
///
/// Projectors of one observable are mutually orthogonal, which is exactly
/// when probabilities of a union add. Repeated indices are rejected since
/// `A ∪ A = A` would be double counted.
pub fn disjoint_union_probability(rho: &DensityOperator, obs: &Observable, indices: &[usize]) -> Result<f64> {
    check_dims(rho, obs)?;
    for (i, &n) in indices.iter().enumerate() {
        obs.check_index(n)?;
        if indices[..i].contains(&n) {
            return Err(Error::DuplicateIndex(n));
        }
    }
    let mut total = 0.0;
    for &n in indices {
        total += raw_born(rho, &obs.eigenvector(n)?)?;
    }
    numeric::clamp_probability("union probability", total)
}

/// Result of measuring one event on a state.
#[derive(Debug, Clone, PartialEq)]
pub struct MeasurementOutcome {
    pub event: EventId,
    pub probability: f64,
    pub post_state: DensityOperator,
}

/// Lüders state reduction `P̂_n ρ P̂_n / Tr ρ P̂_n`.
pub fn luders_reduce(rho: &DensityOperator, obs: &Observable, n: usize) -> Result<DensityOperator> {
    Ok(measure(rho, obs, n)?.post_state)
}

pub fn measure(rho: &DensityOperator, obs: &Observable, n: usize) -> Result<MeasurementOutcome> {
    let probability = born_probability(rho, obs, n)?;
    if probability <= numeric::DIVISION_GUARD {
        return Err(Error::ZeroProbability(probability));
    }
    let p = obs.projector(n)?;
    let reduced = p
        .matrix()
        .try_mul(rho.matrix())?
        .try_mul(p.matrix())?
        .scale_real(1.0 / probability);
    Ok(MeasurementOutcome {
        event: obs.event(n),
        probability,
        post_state: DensityOperator::new(reduced)?,
    })
}

/// Lüders transition probability `|⟨n|α⟩|²`.
pub fn luders_transition(obs_a: &Observable, n: usize, obs_b: &Observable, alpha: usize) -> Result<f64> {
    same_space(obs_a, obs_b)?;
    let overlap = obs_a.eigenvector(n)?.inner(&obs_b.eigenvector(alpha)?)?;
    numeric::clamp_probability("transition probability", overlap.norm_sqr())
}

/// Full table `p_L(A_n|B_α)` indexed `[n][α]`.
pub fn transition_matrix(obs_a: &Observable, obs_b: &Observable) -> Result<Vec<Vec<f64>>> {
    same_space(obs_a, obs_b)?;
    (0..obs_a.dim())
        .map(|n| {
            (0..obs_b.dim())
                .map(|alpha| luders_transition(obs_a, n, obs_b, alpha))
                .collect()
        })
        .collect()
}

/// Wigner distribution `p_W(A_n|B_α) = |⟨n|α⟩|² p(B_α)`.
pub fn wigner_distribution(
    rho: &DensityOperator,
    obs_a: &Observable,
    n: usize,
    obs_b: &Observable,
    alpha: usize,
) -> Result<f64> {
    check_dims(rho, obs_a)?;
    let transition = luders_transition(obs_a, n, obs_b, alpha)?;
    Ok(transition * born_probability(rho, obs_b, alpha)?)
}

/// Kirkwood form `⟨P̂_n P̂_α⟩ = Tr ρ P̂_n P̂_α = ⟨α|ρ|n⟩⟨n|α⟩`; complex in
/// general.
pub fn kirkwood_form(
    rho: &DensityOperator,
    obs_a: &Observable,
    n: usize,
    obs_b: &Observable,
    alpha: usize,
) -> Result<C64> {
    check_dims(rho, obs_a)?;
    same_space(obs_a, obs_b)?;
    let vn = obs_a.eigenvector(n)?;
    let va = obs_b.eigenvector(alpha)?;
    Ok(rho.matrix().sandwich(&va, &vn)? * vn.inner(&va)?)
}

/// Both sides of `p(A_n) = Σ_α p_W(A_n|B_α) + Σ_{α≠β} ⟨P̂_α P̂_n P̂_β⟩`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IdentityChain {
    pub born: f64,
    pub wigner_sum: f64,
    pub cross_term: C64,
    pub residual: f64,
}

pub fn identity_chain(rho: &DensityOperator, obs_a: &Observable, n: usize, obs_b: &Observable) -> Result<IdentityChain> {
    check_dims(rho, obs_a)?;
    same_space(obs_a, obs_b)?;
    let born = raw_born(rho, &obs_a.eigenvector(n)?)?;
    let dim = obs_b.dim();
    let mut wigner_sum = 0.0;
    for alpha in 0..dim {
        wigner_sum += wigner_distribution(rho, obs_a, n, obs_b, alpha)?;
    }
    // ⟨P̂_α P̂_n P̂_β⟩ = Tr ρ |α⟩⟨α|n⟩⟨n|β⟩⟨β| = ⟨β|ρ|α⟩⟨α|n⟩⟨n|β⟩
    let vn = obs_a.eigenvector(n)?;
    let overlaps: Vec<C64> = (0..dim)
        .map(|alpha| obs_b.basis().column(alpha).inner(&vn))
        .collect::<Result<_>>()?;
    let rep = obs_b.represent(rho.matrix())?;
    let mut cross_term = ZERO;
    for alpha in 0..dim {
        for beta in 0..dim {
            if alpha != beta {
                cross_term += rep[(beta, alpha)] * overlaps[alpha] * overlaps[beta].conj();
            }
        }
    }
    let residual = (C64::new(born - wigner_sum, 0.0) - cross_term).norm();
    Ok(IdentityChain {
        born,
        wigner_sum,
        cross_term,
        residual,
    })
}

/// `|p(A_n) − Σ_α p_W − Σ_{α≠β}⟨P̂_α P̂_n P̂_β⟩|`.
pub fn identity_chain_residual(rho: &DensityOperator, obs_a: &Observable, n: usize, obs_b: &Observable) -> Result<f64> {
    identity_chain(rho, obs_a, n, obs_b).map(|c| c.residual)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{ComplexMatrix, ONE};
    use alloc::vec;

    fn r(x: f64) -> C64 {
        C64::new(x, 0.0)
    }

    fn ket(amps: &[C64]) -> DensityOperator {
        DensityOperator::from_pure(&ComplexVector::new(amps.to_vec()).unwrap()).unwrap()
    }

    fn plus() -> DensityOperator {
        let s = core::f64::consts::FRAC_1_SQRT_2;
        ket(&[r(s), r(s)])
    }

    fn z2() -> Observable {
        Observable::computational("Z", 2).unwrap()
    }

    fn x2() -> Observable {
        Observable::fourier("X", 2).unwrap()
    }

    #[test]
    fn born_basics() {
        let zero = ket(&[ONE, ZERO]);
        assert_eq!(born_probability(&zero, &z2(), 0).unwrap(), 1.0);
        let probs = born_distribution(&plus(), &z2()).unwrap();
        assert!((probs[0] - 0.5).abs() < 1e-15 && (probs[1] - 0.5).abs() < 1e-15);
        assert!(matches!(born_probability(&zero, &z2(), 2), Err(Error::IndexOutOfRange { .. })));
        let z3 = Observable::computational("Z", 3).unwrap();
        assert!(matches!(born_probability(&zero, &z3, 0), Err(Error::DimensionMismatch { .. })));
    }

    #[test]
    fn expected_values() {
        let obs = Observable::new("A", vec![-1.0, 0.5, 4.0], ComplexMatrix::identity(3)).unwrap();
        let mixed = DensityOperator::maximally_mixed(3).unwrap();
        assert!((expected_value(&mixed, &obs).unwrap() - 3.5 / 3.0).abs() < 1e-15);
        let one = ket(&[ZERO, ZERO, ONE]);
        assert_eq!(expected_value(&one, &obs).unwrap(), 4.0);
    }

    #[test]
    fn most_probable_ties_go_low() {
        assert_eq!(most_probable(&ket(&[ZERO, ONE]), &z2()).unwrap(), 1);
        assert_eq!(most_probable(&DensityOperator::maximally_mixed(2).unwrap(), &z2()).unwrap(), 0);
    }

    #[test]
    fn unions() {
        let rho = DensityOperator::new(ComplexMatrix::from_real_diagonal(&[0.1, 0.2, 0.3, 0.4])).unwrap();
        let z4 = Observable::computational("Z", 4).unwrap();
        assert!((disjoint_union_probability(&rho, &z4, &[0, 1, 2, 3]).unwrap() - 1.0).abs() < 1e-15);
        assert!((disjoint_union_probability(&rho, &z4, &[2]).unwrap() - 0.3).abs() < 1e-15);
        assert_eq!(
            disjoint_union_probability(&rho, &z4, &[1, 1]),
            Err(Error::DuplicateIndex(1))
        );
    }

    #[test]
    fn luders_cases() {
        let zero = ket(&[ONE, ZERO]);
        assert!(luders_reduce(&zero, &z2(), 0).unwrap().matrix().max_abs_diff(zero.matrix()) < 1e-15);
        let mixed = DensityOperator::maximally_mixed(2).unwrap();
        let one = luders_reduce(&mixed, &z2(), 1).unwrap();
        assert!(one.matrix().max_abs_diff(&ComplexMatrix::from_real_diagonal(&[0.0, 1.0])) < 1e-15);
        let out = measure(&plus(), &z2(), 0).unwrap();
        assert!((out.probability - 0.5).abs() < 1e-15);
        assert!(out.post_state.matrix().max_abs_diff(zero.matrix()) < 1e-15);
        assert!(matches!(luders_reduce(&zero, &z2(), 1), Err(Error::ZeroProbability(_))));
    }

    #[test]
    fn transition_trivializes_for_same_observable() {
        let f = Observable::fourier("F", 4).unwrap();
        for n in 0..4 {
            for a in 0..4 {
                let p = luders_transition(&f, n, &f, a).unwrap();
                assert!((p - if n == a { 1.0 } else { 0.0 }).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn unbiased_bases_give_half() {
        for row in transition_matrix(&z2(), &x2()).unwrap() {
            for p in row {
                assert!((p - 0.5).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn wigner_cases() {
        // ρ = |0⟩⟨0|, A = Z, B = X: |⟨0|+⟩|² · ⟨+|0⟩⟨0|+⟩ = ½ · ½.
        let zero = ket(&[ONE, ZERO]);
        assert!((wigner_distribution(&zero, &z2(), 0, &x2(), 0).unwrap() - 0.25).abs() < 1e-15);
        let mixed = DensityOperator::maximally_mixed(2).unwrap();
        assert!((wigner_distribution(&mixed, &z2(), 1, &x2(), 0).unwrap() - 0.25).abs() < 1e-15);
        let p_b = born_probability(&plus(), &x2(), 0).unwrap();
        assert!((wigner_distribution(&plus(), &x2(), 0, &x2(), 0).unwrap() - p_b).abs() < 1e-15);
        assert!(wigner_distribution(&plus(), &x2(), 1, &x2(), 0).unwrap().abs() < 1e-15);
    }

    #[test]
    fn kirkwood_has_imaginary_part_for_complex_phase() {
        // ψ = (|0⟩ + i|1⟩)/√2: ⟨+|ρ|0⟩⟨0|+⟩ = (ρ₀₀ + ρ₁₀)/2 = (½ + i/2)/2.
        let s = core::f64::consts::FRAC_1_SQRT_2;
        let rho = ket(&[r(s), C64::new(0.0, s)]);
        let k = kirkwood_form(&rho, &z2(), 0, &x2(), 0).unwrap();
        assert!((k - C64::new(0.25, 0.25)).norm() < 1e-15);
        let mut total = ZERO;
        for n in 0..2 {
            for a in 0..2 {
                total += kirkwood_form(&rho, &z2(), n, &x2(), a).unwrap();
            }
        }
        assert!((total - ONE).norm() < 1e-12);
    }

    #[test]
    fn kirkwood_compatible_is_real_diagonal() {
        let rho = plus();
        for n in 0..2 {
            for a in 0..2 {
                let k = kirkwood_form(&rho, &z2(), n, &z2(), a).unwrap();
                let expected = if n == a { born_probability(&rho, &z2(), n).unwrap() } else { 0.0 };
                assert!((k - r(expected)).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn identity_chain_compatible_has_no_cross_term() {
        let rho = plus();
        for n in 0..2 {
            let chain = identity_chain(&rho, &x2(), n, &x2()).unwrap();
            assert!(chain.cross_term.norm() < 1e-15);
            assert!(chain.residual < 1e-15);
        }
    }
}
