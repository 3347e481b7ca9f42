//! Quantum events: states, observables, projectors, multimode states and
//! POVM families.
//!
//! Events are identified by `(observable label, index)` rather than by
//! eigenvalue, so identity never depends on float equality. Observables
//! must have nondegenerate spectra; degenerate input is rejected at
//! construction.

use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use crate::error::{Error, Result};
use crate::linalg::{ComplexMatrix, ComplexVector, C64, ONE, ZERO};
use crate::numeric;

/// A statistical operator: Hermitian, unit trace, positive semidefinite.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityOperator {
    matrix: ComplexMatrix,
}

impl DensityOperator {
    pub fn new(matrix: ComplexMatrix) -> Result<Self> {
        validate_state_matrix(&matrix, "density operator")?;
        Ok(DensityOperator { matrix })
    }

    /// `|ψ⟩⟨ψ|` for a unit vector `ψ`.
    pub fn from_pure(psi: &ComplexVector) -> Result<Self> {
        let residual = (psi.norm_sqr() - 1.0).abs();
        if residual > numeric::tolerance() {
            return Err(Error::constraint("pure state", "unit norm", residual));
        }
        Ok(DensityOperator {
            matrix: psi.outer(psi),
        })
    }

    /// `I/d`.
    pub fn maximally_mixed(dim: usize) -> Result<Self> {
        if dim == 0 {
            return Err(Error::Shape("zero-dimensional state".into()));
        }
        Ok(DensityOperator {
            matrix: ComplexMatrix::identity(dim).scale_real(1.0 / dim as f64),
        })
    }

    pub(crate) fn from_trusted(matrix: ComplexMatrix) -> Self {
        DensityOperator { matrix }
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn dim(&self) -> usize {
        self.matrix.rows()
    }

    /// `Tr ρ X`.
    pub fn expectation(&self, op: &ComplexMatrix) -> Result<C64> {
        if op.rows() != self.dim() || op.cols() != self.dim() {
            return Err(Error::mismatch(self.dim(), op.rows()));
        }
        Ok(trace_of_product(&self.matrix, op))
    }

    /// `Tr ρ²`.
    pub fn purity(&self) -> f64 {
        trace_of_product(&self.matrix, &self.matrix).re
    }

    pub fn eigenvalues(&self) -> Vec<f64> {
        self.matrix
            .eigenvalues_hermitian()
            .expect("density operators are Hermitian")
    }

    pub(crate) fn require_dim(&self, dim: usize) -> Result<()> {
        if self.dim() != dim {
            return Err(Error::mismatch(dim, self.dim()));
        }
        Ok(())
    }
}

/// `Tr(A B)` without forming the product.
pub(crate) fn trace_of_product(a: &ComplexMatrix, b: &ComplexMatrix) -> C64 {
    let n = a.rows();
    let mut acc = ZERO;
    for i in 0..n {
        for k in 0..a.cols() {
            acc += a[(i, k)] * b[(k, i)];
        }
    }
    acc
}

/// Hermitian, unit-trace and positive-semidefinite checks at the global
/// tolerance.
pub(crate) fn validate_state_matrix(m: &ComplexMatrix, what: &'static str) -> Result<()> {
    m.require_square()?;
    if m.rows() == 0 {
        return Err(Error::Shape("zero-dimensional state".into()));
    }
    let tol = numeric::tolerance();
    let herm = m.hermiticity_residual();
    if herm > tol {
        return Err(Error::constraint(what, "Hermitian", herm));
    }
    let trace = m.trace();
    let trace_residual = (trace - ONE).norm();
    if trace_residual > tol {
        return Err(Error::constraint(what, "unit trace", trace_residual));
    }
    let min = m.eigenvalues_hermitian()?.first().copied().unwrap_or(0.0);
    if min < -tol {
        return Err(Error::constraint(what, "positive semidefinite", -min));
    }
    Ok(())
}

/// Identity of a single event: which observable, which eigenstate.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct EventId {
    pub observable: String,
    pub index: usize,
}

impl fmt::Display for EventId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}[{}]", self.observable, self.index)
    }
}

/// An observable with a nondegenerate spectrum and orthonormal eigenbasis.
#[derive(Debug, Clone, PartialEq)]
pub struct Observable {
    label: String,
    eigenvalues: Vec<f64>,
    basis: ComplexMatrix,
}

impl Observable {
    /// `basis` holds the eigenvectors `|n⟩` as columns, in the order of
    /// `eigenvalues`.
    pub fn new(label: impl Into<String>, eigenvalues: Vec<f64>, basis: ComplexMatrix) -> Result<Self> {
        let dim = basis.require_square()?;
        if dim == 0 {
            return Err(Error::Shape("empty eigenbasis".into()));
        }
        if eigenvalues.len() != dim {
            return Err(Error::mismatch(dim, eigenvalues.len()));
        }
        if eigenvalues.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("eigenvalues"));
        }
        let gram = &basis.adjoint() * &basis;
        let residual = gram.max_abs_diff(&ComplexMatrix::identity(dim));
        if residual > numeric::tolerance() {
            return Err(Error::constraint("eigenbasis", "orthonormal columns", residual));
        }
        let mut sorted = eigenvalues.clone();
        sorted.sort_by(f64::total_cmp);
        let gap = sorted
            .windows(2)
            .map(|w| w[1] - w[0])
            .fold(f64::INFINITY, f64::min);
        if gap <= numeric::MIN_EIGENVALUE_GAP {
            return Err(Error::constraint("spectrum", "nondegenerate", gap));
        }
        Ok(Observable {
            label: label.into(),
            eigenvalues,
            basis,
        })
    }

    /// Computational basis with eigenvalues `0, 1, …, d−1`.
    pub fn computational(label: impl Into<String>, dim: usize) -> Result<Self> {
        Self::new(label, (0..dim).map(|n| n as f64).collect(), ComplexMatrix::identity(dim))
    }

    /// Discrete Fourier basis with eigenvalues `0, 1, …, d−1`; for `d = 2`
    /// this is the Hadamard basis `|±⟩`.
    pub fn fourier(label: impl Into<String>, dim: usize) -> Result<Self> {
        let norm = 1.0 / libm::sqrt(dim as f64);
        let basis = ComplexMatrix::from_fn(dim, dim, |j, k| {
            let angle = 2.0 * core::f64::consts::PI * (j * k) as f64 / dim as f64;
            let (s, c) = libm::sincos(angle);
            C64::new(c * norm, s * norm)
        });
        Self::new(label, (0..dim).map(|n| n as f64).collect(), basis)
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn dim(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    pub fn basis(&self) -> &ComplexMatrix {
        &self.basis
    }

    pub fn check_index(&self, n: usize) -> Result<()> {
        if n >= self.dim() {
            return Err(Error::IndexOutOfRange {
                index: n,
                dim: self.dim(),
            });
        }
        Ok(())
    }

    /// The eigenvector `|n⟩`.
    pub fn eigenvector(&self, n: usize) -> Result<ComplexVector> {
        self.check_index(n)?;
        Ok(self.basis.column(n))
    }

    pub fn event(&self, n: usize) -> EventId {
        EventId {
            observable: self.label.clone(),
            index: n,
        }
    }

    pub fn projector(&self, n: usize) -> Result<Projector> {
        projector_of(self, n)
    }

    /// `Â = Σ_n A_n P̂_n`.
    pub fn operator(&self) -> ComplexMatrix {
        let scaled = ComplexMatrix::from_fn(self.dim(), self.dim(), |i, j| {
            self.basis[(i, j)] * self.eigenvalues[j]
        });
        &scaled * &self.basis.adjoint()
    }

    /// `ρ` written in this observable's eigenbasis: entries `⟨m|ρ|n⟩`.
    pub fn represent(&self, rho: &ComplexMatrix) -> Result<ComplexMatrix> {
        if rho.rows() != self.dim() {
            return Err(Error::mismatch(self.dim(), rho.rows()));
        }
        self.basis.adjoint().try_mul(rho)?.try_mul(&self.basis)
    }
}

/// Rank-1 projector `|n⟩⟨n|` tagged with the event that produced it.
#[derive(Debug, Clone, PartialEq)]
pub struct Projector {
    matrix: ComplexMatrix,
    source: EventId,
}

impl Projector {
    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn source(&self) -> &EventId {
        &self.source
    }
}

pub fn projector_of(obs: &Observable, n: usize) -> Result<Projector> {
    let v = obs.eigenvector(n)?;
    Ok(Projector {
        matrix: v.outer(&v),
        source: obs.event(n),
    })
}

/// `|B⟩ = Σ_α b_α |α⟩` over the eigenbasis of an observable. The vector
/// need not be normalized.
#[derive(Debug, Clone, PartialEq)]
pub struct MultimodeState {
    coefficients: Vec<C64>,
    basis: Observable,
}

impl MultimodeState {
    pub fn new(basis: Observable, coefficients: Vec<C64>) -> Result<Self> {
        if coefficients.len() != basis.dim() {
            return Err(Error::mismatch(basis.dim(), coefficients.len()));
        }
        if coefficients.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::NonFinite("multimode coefficients"));
        }
        Ok(MultimodeState { coefficients, basis })
    }

    pub fn coefficients(&self) -> &[C64] {
        &self.coefficients
    }

    pub fn basis(&self) -> &Observable {
        &self.basis
    }

    pub fn dim(&self) -> usize {
        self.coefficients.len()
    }

    /// `|B⟩` in the standard representation.
    pub fn vector(&self) -> ComplexVector {
        let b = ComplexVector::new(self.coefficients.clone()).expect("finite coefficients");
        self.basis.basis().mul_vector(&b).expect("dimensions checked")
    }

    pub fn proposition(&self) -> GeneralizedProposition {
        GeneralizedProposition::from_vector(&self.vector())
    }
}

/// `P̂_B = |B⟩⟨B|`; self-adjoint, positive, rank 1, with
/// `P̂_B² = ⟨B|B⟩ P̂_B`.
#[derive(Debug, Clone, PartialEq)]
pub struct GeneralizedProposition {
    operator: ComplexMatrix,
    weight: f64,
}

impl GeneralizedProposition {
    pub fn from_vector(b: &ComplexVector) -> Self {
        GeneralizedProposition {
            operator: b.outer(b),
            weight: b.norm_sqr(),
        }
    }

    pub fn operator(&self) -> &ComplexMatrix {
        &self.operator
    }

    /// `⟨B|B⟩`.
    pub fn weight(&self) -> f64 {
        self.weight
    }

    pub fn dim(&self) -> usize {
        self.operator.rows()
    }
}

/// A finite family of generalized propositions meant to resolve the identity.
#[derive(Debug, Clone, PartialEq)]
pub struct PovmFamily {
    members: Vec<GeneralizedProposition>,
}

impl PovmFamily {
    pub fn new(members: Vec<GeneralizedProposition>) -> Result<Self> {
        let dim = members.first().ok_or(Error::EmptyFamily)?.dim();
        if let Some(bad) = members.iter().find(|m| m.dim() != dim) {
            return Err(Error::mismatch(dim, bad.dim()));
        }
        Ok(PovmFamily { members })
    }

    /// The projection-valued measure of one observable.
    pub fn from_observable(obs: &Observable) -> Self {
        let members = (0..obs.dim())
            .map(|n| GeneralizedProposition::from_vector(&obs.basis().column(n)))
            .collect();
        PovmFamily { members }
    }

    pub fn from_multimodes(states: &[MultimodeState]) -> Result<Self> {
        Self::new(states.iter().map(MultimodeState::proposition).collect())
    }

    pub fn members(&self) -> &[GeneralizedProposition] {
        &self.members
    }

    pub fn dim(&self) -> usize {
        self.members[0].dim()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PovmReport {
    /// `max |Σ_B P̂_B − I|`.
    pub residual: f64,
    pub pass: bool,
    /// `Σ_B Tr ρ P̂_B` when a state was supplied.
    pub total_probability: Option<f64>,
}

pub fn validate_povm(family: &PovmFamily, rho: Option<&DensityOperator>) -> Result<PovmReport> {
    let dim = family.dim();
    let mut sum = ComplexMatrix::zeros(dim, dim);
    for m in family.members() {
        sum = &sum + m.operator();
    }
    let residual = sum.max_abs_diff(&ComplexMatrix::identity(dim));
    let total_probability = match rho {
        Some(rho) => {
            rho.require_dim(dim)?;
            Some(
                family
                    .members()
                    .iter()
                    .map(|m| trace_of_product(rho.matrix(), m.operator()).re)
                    .sum(),
            )
        }
        None => None,
    };
    Ok(PovmReport {
        residual,
        pass: residual <= numeric::POVM_TOLERANCE,
        total_probability,
    })
}

/// Probability of a multimode event split into its diagonal and
/// interference parts.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MultimodeProbability {
    /// `Tr ρ P̂_B`.
    pub p: f64,
    /// `Σ_α |b_α|² p(B_α)`.
    pub classical: f64,
    /// `2 Re Σ_{α<β} b*_α b_β ⟨α|ρ|β⟩`.
    pub quantum: f64,
}

pub fn multimode_probability(rho: &DensityOperator, b: &MultimodeState) -> Result<MultimodeProbability> {
    rho.require_dim(b.dim())?;
    let rep = b.basis().represent(rho.matrix())?;
    let coeffs = b.coefficients();
    let (classical, quantum) = split_quadratic_form(&rep, coeffs);

    let v = b.vector();
    let direct = rho.matrix().sandwich(&v, &v)?;
    let scale = b.proposition().weight().max(1.0);
    if direct.im.abs() > numeric::PROBABILITY_SLACK * scale {
        return Err(Error::NumericContract {
            quantity: "imaginary part of Tr ρ P_B",
            value: direct.im,
            bound: "|Im| <= 1e-12",
        });
    }
    let p = direct.re;
    if (p - classical - quantum).abs() > numeric::PROBABILITY_SLACK * scale {
        return Err(Error::NumericContract {
            quantity: "p - classical - quantum",
            value: p - classical - quantum,
            bound: "|.| <= 1e-12",
        });
    }
    Ok(MultimodeProbability { p, classical, quantum })
}

/// Splits `Σ_{αβ} b*_α b_β M_{αβ}` into its diagonal part and
/// `2 Re Σ_{α<β} b*_α b_β M_{αβ}`.
pub(crate) fn split_quadratic_form(m: &ComplexMatrix, b: &[C64]) -> (f64, f64) {
    let mut diagonal = 0.0;
    let mut off = ZERO;
    for alpha in 0..b.len() {
        diagonal += b[alpha].norm_sqr() * m[(alpha, alpha)].re;
        for beta in alpha + 1..b.len() {
            off += b[alpha].conj() * b[beta] * m[(alpha, beta)];
        }
    }
    (diagonal, 2.0 * off.re)
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    fn r(x: f64) -> C64 {
        C64::new(x, 0.0)
    }

    fn plus_state() -> DensityOperator {
        let s = core::f64::consts::FRAC_1_SQRT_2;
        DensityOperator::from_pure(&ComplexVector::new(vec![r(s), r(s)]).unwrap()).unwrap()
    }

    #[test]
    fn computational_projector() {
        let z = Observable::computational("Z", 2).unwrap();
        let p = projector_of(&z, 0).unwrap();
        assert_eq!(*p.matrix(), ComplexMatrix::from_real_diagonal(&[1.0, 0.0]));
        assert_eq!(alloc::format!("{}", p.source()), "Z[0]");
        assert!(matches!(projector_of(&z, 2), Err(Error::IndexOutOfRange { .. })));
    }

    #[test]
    fn hadamard_projector_is_plus_plus() {
        let x = Observable::fourier("X", 2).unwrap();
        let p = projector_of(&x, 0).unwrap();
        let expected = ComplexMatrix::from_real_rows(&[&[0.5, 0.5], &[0.5, 0.5]]).unwrap();
        assert!(p.matrix().max_abs_diff(&expected) < 1e-15);
    }

    #[test]
    fn projectors_orthogonal_and_complete() {
        let f = Observable::fourier("F", 5).unwrap();
        let ps: Vec<_> = (0..5).map(|n| projector_of(&f, n).unwrap()).collect();
        let mut sum = ComplexMatrix::zeros(5, 5);
        for (m, pm) in ps.iter().enumerate() {
            sum = &sum + pm.matrix();
            for (n, pn) in ps.iter().enumerate() {
                let prod = pm.matrix() * pn.matrix();
                let expected = if m == n { pn.matrix().clone() } else { ComplexMatrix::zeros(5, 5) };
                assert!(prod.max_abs_diff(&expected) < 1e-12);
            }
        }
        assert!(sum.max_abs_diff(&ComplexMatrix::identity(5)) < 1e-12);
    }

    #[test]
    fn observable_validation() {
        let id = ComplexMatrix::identity(2);
        assert!(matches!(
            Observable::new("A", vec![1.0, 1.0], id.clone()),
            Err(Error::Constraint { constraint: "nondegenerate", .. })
        ));
        let skew = ComplexMatrix::from_real_rows(&[&[1.0, 0.1], &[0.0, 1.0]]).unwrap();
        assert!(matches!(
            Observable::new("A", vec![0.0, 1.0], skew),
            Err(Error::Constraint { constraint: "orthonormal columns", .. })
        ));
        assert!(Observable::new("A", vec![0.0], id).is_err());
    }

    #[test]
    fn observable_operator_has_its_spectrum() {
        let x = Observable::new("X", vec![-1.0, 1.0], Observable::fourier("F", 2).unwrap().basis().clone()).unwrap();
        let op = x.operator();
        let pauli_x = ComplexMatrix::from_real_rows(&[&[0.0, -1.0], &[-1.0, 0.0]]).unwrap();
        assert!(op.max_abs_diff(&pauli_x) < 1e-15);
    }

    #[test]
    fn density_validation_names_constraint() {
        let m = ComplexMatrix::from_real_diagonal(&[0.6, 0.6]);
        assert!(matches!(
            DensityOperator::new(m),
            Err(Error::Constraint { constraint: "unit trace", .. })
        ));
        let m = ComplexMatrix::from_real_diagonal(&[1.5, -0.5]);
        assert!(matches!(
            DensityOperator::new(m),
            Err(Error::Constraint { constraint: "positive semidefinite", .. })
        ));
        let m = ComplexMatrix::from_real_rows(&[&[0.5, 0.2], &[0.0, 0.5]]).unwrap();
        assert!(matches!(
            DensityOperator::new(m),
            Err(Error::Constraint { constraint: "Hermitian", .. })
        ));
        let psi = ComplexVector::from_real(&[1.0, 1.0]).unwrap();
        assert!(DensityOperator::from_pure(&psi).is_err());
    }

    #[test]
    fn single_mode_has_no_interference() {
        let z = Observable::computational("Z", 2).unwrap();
        let rho = plus_state();
        let b = MultimodeState::new(z, vec![ZERO, ONE]).unwrap();
        let mp = multimode_probability(&rho, &b).unwrap();
        assert!((mp.p - 0.5).abs() < 1e-15);
        assert_eq!(mp.quantum, 0.0);
    }

    #[test]
    fn diagonal_state_has_no_interference() {
        let z = Observable::computational("Z", 3).unwrap();
        let rho = DensityOperator::new(ComplexMatrix::from_real_diagonal(&[0.2, 0.3, 0.5])).unwrap();
        let b = MultimodeState::new(z, vec![r(0.3), C64::new(0.1, 0.7), r(-0.4)]).unwrap();
        let mp = multimode_probability(&rho, &b).unwrap();
        assert!(mp.quantum.abs() < 1e-15);
        assert!((mp.p - mp.classical).abs() < 1e-15);
    }

    #[test]
    fn plus_state_uniform_multimode() {
        // ⟨B|ρ|B⟩ = |⟨B|+⟩|² = 1; diagonal part ½·½ + ½·½.
        let z = Observable::computational("Z", 2).unwrap();
        let s = core::f64::consts::FRAC_1_SQRT_2;
        let b = MultimodeState::new(z, vec![r(s), r(s)]).unwrap();
        let mp = multimode_probability(&plus_state(), &b).unwrap();
        assert!((mp.p - 1.0).abs() < 1e-12);
        assert!((mp.classical - 0.5).abs() < 1e-12);
        assert!((mp.quantum - 0.5).abs() < 1e-12);
    }

    #[test]
    fn povm_cases() {
        let z = Observable::computational("Z", 2).unwrap();
        let fam = PovmFamily::from_observable(&z);
        let rep = validate_povm(&fam, Some(&plus_state())).unwrap();
        assert_eq!(rep.residual, 0.0);
        assert!(rep.pass);
        assert!((rep.total_probability.unwrap() - 1.0).abs() < 1e-15);

        let modes = [
            MultimodeState::new(z.clone(), vec![ONE, ZERO]).unwrap(),
            MultimodeState::new(z.clone(), vec![ZERO, ONE]).unwrap(),
        ];
        assert!(validate_povm(&PovmFamily::from_multimodes(&modes).unwrap(), None).unwrap().pass);

        // Two mutually unbiased qubit bases, each vector scaled by 1/√2.
        let s = core::f64::consts::FRAC_1_SQRT_2;
        let x = Observable::fourier("X", 2).unwrap();
        let mut members = Vec::new();
        for obs in [&z, &x] {
            for n in 0..2 {
                members.push(GeneralizedProposition::from_vector(&obs.eigenvector(n).unwrap().scaled(r(s))));
            }
        }
        let rep = validate_povm(&PovmFamily::new(members).unwrap(), None).unwrap();
        assert!(rep.pass && rep.residual < 1e-15);

        let lone = PovmFamily::new(vec![GeneralizedProposition::from_vector(&ComplexVector::basis(2, 0).unwrap())]).unwrap();
        assert!(!validate_povm(&lone, None).unwrap().pass);
        assert_eq!(PovmFamily::new(Vec::new()), Err(Error::EmptyFamily));
    }

    #[test]
    fn proposition_square_scales_with_weight() {
        let b = ComplexVector::new(vec![C64::new(0.3, 0.4), r(1.2)]).unwrap();
        let p = GeneralizedProposition::from_vector(&b);
        let sq = p.operator() * p.operator();
        assert!(sq.max_abs_diff(&p.operator().scale_real(p.weight())) < 1e-14);
    }
}
