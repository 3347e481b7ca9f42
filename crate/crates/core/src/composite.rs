//! Composite events on `H_A ⊗ H_B`: joint, marginal and conditional
//! probabilities, and prospect probabilities with their interference split.
//!
//! A [`CompositeState`] is written in the product eigenbasis `|nα⟩` of the
//! two observables, with `n` (the `A` index) as the slow index. Its elements
//! `ρ^{αβ}_{mn} = ⟨mα|ρ|nβ⟩` are read directly; no observable objects are
//! needed here.
//!
//! # Normalized prospect lattices
//!
//! The prospect operators `P̂_n ⊗ P̂_B` sum over `n` to `1_A ⊗ P̂_B`, not to
//! the identity, so raw prospect probabilities do not sum to one when
//! `dim B > 1`. [`Normalization::Conditioned`] conditions on the multimode
//! event `B`: the total becomes `p(π_n)/Σ_m p(π_m)` (the quantum conditional
//! probability), the diagonal part becomes `f(π_n)/Σ_m f(π_m)` (the classical
//! conditional), and the interference part is their difference. Then
//! `Σ p = Σ f = 1` and `Σ q = 0` for every state.

use alloc::format;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::events::{split_quadratic_form, validate_state_matrix, DensityOperator, MultimodeState};
use crate::linalg::{partial_trace, tensor_product, ComplexMatrix, ComplexVector, Subsystem, C64, ZERO};
use crate::numeric;

/// Statistical operator of a bipartite system.
#[derive(Debug, Clone, PartialEq)]
pub struct CompositeState {
    matrix: ComplexMatrix,
    dims: (usize, usize),
}

impl CompositeState {
    pub fn new(matrix: ComplexMatrix, dims: (usize, usize)) -> Result<Self> {
        let n = matrix.require_square()?;
        if dims.0 == 0 || dims.1 == 0 || dims.0.checked_mul(dims.1) != Some(n) {
            return Err(Error::Shape(format!(
                "{n}x{n} matrix does not factor as {}x{}",
                dims.0, dims.1
            )));
        }
        validate_state_matrix(&matrix, "composite state")?;
        Ok(CompositeState { matrix, dims })
    }

    /// Pure state `ρ^{αβ}_{mn} = c_{mα} c*_{nβ}` from an amplitude matrix
    /// with rows indexed by `n` and columns by `α`.
    pub fn from_amplitudes(c: &ComplexMatrix) -> Result<Self> {
        let dims = (c.rows(), c.cols());
        if dims.0 == 0 || dims.1 == 0 {
            return Err(Error::Shape("empty amplitude matrix".into()));
        }
        let norm: f64 = c.as_slice().iter().map(|z| z.norm_sqr()).sum();
        let residual = (norm - 1.0).abs();
        if residual > numeric::tolerance() {
            return Err(Error::constraint("amplitude matrix", "unit norm", residual));
        }
        let psi = ComplexVector::new(c.as_slice().to_vec())?;
        Ok(CompositeState {
            matrix: psi.outer(&psi),
            dims,
        })
    }

    /// `ρ_A ⊗ ρ_B`.
    pub fn product(a: &DensityOperator, b: &DensityOperator) -> Result<Self> {
        Ok(CompositeState {
            matrix: tensor_product(a.matrix(), b.matrix())?,
            dims: (a.dim(), b.dim()),
        })
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn dims(&self) -> (usize, usize) {
        self.dims
    }

    fn flat(&self, n: usize, alpha: usize) -> usize {
        n * self.dims.1 + alpha
    }

    /// `ρ^{αβ}_{mn} = ⟨mα|ρ|nβ⟩`.
    pub fn element(&self, m: usize, alpha: usize, n: usize, beta: usize) -> C64 {
        self.matrix[(self.flat(m, alpha), self.flat(n, beta))]
    }

    pub fn check_indices(&self, n: usize, alpha: usize) -> Result<()> {
        if n >= self.dims.0 {
            return Err(Error::IndexOutOfRange { index: n, dim: self.dims.0 });
        }
        if alpha >= self.dims.1 {
            return Err(Error::IndexOutOfRange { index: alpha, dim: self.dims.1 });
        }
        Ok(())
    }

    /// `ρ_A = Tr_B ρ`.
    pub fn reduced_a(&self) -> DensityOperator {
        let m = partial_trace(&self.matrix, self.dims, Subsystem::A).expect("dims validated");
        DensityOperator::from_trusted(m)
    }

    /// `ρ_B = Tr_A ρ`.
    pub fn reduced_b(&self) -> DensityOperator {
        let m = partial_trace(&self.matrix, self.dims, Subsystem::B).expect("dims validated");
        DensityOperator::from_trusted(m)
    }

    pub fn as_density(&self) -> DensityOperator {
        DensityOperator::from_trusted(self.matrix.clone())
    }
}

/// `p(A_n ⊗ B_α) = ρ^{αα}_{nn}`.
pub fn joint_probability(rho: &CompositeState, n: usize, alpha: usize) -> Result<f64> {
    rho.check_indices(n, alpha)?;
    numeric::clamp_probability("joint probability", rho.element(n, alpha, n, alpha).re)
}

/// Joint table indexed `[n][α]`.
pub fn joint_table(rho: &CompositeState) -> Result<Vec<Vec<f64>>> {
    let (da, db) = rho.dims();
    (0..da)
        .map(|n| (0..db).map(|alpha| joint_probability(rho, n, alpha)).collect())
        .collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct Marginals {
    pub a: Vec<f64>,
    pub b: Vec<f64>,
}

/// Row and column sums of the joint table.
pub fn marginals(rho: &CompositeState) -> Result<Marginals> {
    let table = joint_table(rho)?;
    let (da, db) = rho.dims();
    let a = table.iter().map(|row| row.iter().sum()).collect();
    let b = (0..db).map(|alpha| (0..da).map(|n| table[n][alpha]).sum()).collect();
    Ok(Marginals { a, b })
}

/// Diagonals of the two reduced operators.
pub fn marginals_via_partial_trace(rho: &CompositeState) -> Marginals {
    let diag = |d: DensityOperator| d.matrix().diagonal().iter().map(|z| z.re).collect();
    Marginals {
        a: diag(rho.reduced_a()),
        b: diag(rho.reduced_b()),
    }
}

/// `p(A_n|B_α) = p(A_n ⊗ B_α) / p(B_α)`.
pub fn bayes_conditional(rho: &CompositeState, n: usize, alpha: usize) -> Result<f64> {
    rho.check_indices(n, alpha)?;
    let p_b: f64 = (0..rho.dims().0)
        .map(|m| rho.element(m, alpha, m, alpha).re)
        .sum();
    if p_b <= numeric::DIVISION_GUARD {
        return Err(Error::ZeroProbability(p_b));
    }
    numeric::clamp_probability("conditional probability", joint_probability(rho, n, alpha)? / p_b)
}

/// `π_n = A_n ⊗ B` with `|B⟩ = Σ_α b_α |α⟩`.
#[derive(Debug, Clone, PartialEq)]
pub struct Prospect {
    n: usize,
    coefficients: Vec<C64>,
}

impl Prospect {
    pub fn new(n: usize, coefficients: Vec<C64>) -> Result<Self> {
        if coefficients.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::NonFinite("prospect coefficients"));
        }
        if coefficients.iter().all(|z| *z == ZERO) {
            return Err(Error::InvalidArgument(
                "multimode vector needs at least one nonzero coefficient".into(),
            ));
        }
        Ok(Prospect { n, coefficients })
    }

    pub fn from_multimode(n: usize, b: &MultimodeState) -> Result<Self> {
        Self::new(n, b.coefficients().to_vec())
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn coefficients(&self) -> &[C64] {
        &self.coefficients
    }

    fn check(&self, rho: &CompositeState) -> Result<()> {
        let (da, db) = rho.dims();
        if self.coefficients.len() != db {
            return Err(Error::mismatch(db, self.coefficients.len()));
        }
        if self.n >= da {
            return Err(Error::IndexOutOfRange { index: self.n, dim: da });
        }
        Ok(())
    }
}

/// `P̂(π_n) = P̂_n ⊗ P̂_B = |π_n⟩⟨π_n|`; positive and self-adjoint but
/// idempotent only when `⟨B|B⟩ = 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct ProspectOperator {
    operator: ComplexMatrix,
    weight: f64,
}

impl ProspectOperator {
    pub fn new(dims: (usize, usize), prospect: &Prospect) -> Result<Self> {
        if prospect.coefficients.len() != dims.1 {
            return Err(Error::mismatch(dims.1, prospect.coefficients.len()));
        }
        let n = ComplexVector::basis(dims.0, prospect.n)?;
        let b = ComplexVector::new(prospect.coefficients.clone())?;
        let pi = n.tensor(&b);
        Ok(ProspectOperator {
            operator: pi.outer(&pi),
            weight: pi.norm_sqr(),
        })
    }

    pub fn operator(&self) -> &ComplexMatrix {
        &self.operator
    }

    /// `⟨π_n|π_n⟩`, so that `P̂² = weight · P̂`.
    pub fn weight(&self) -> f64 {
        self.weight
    }
}

/// `max |Σ_n P̂(π_n) − 1_AB|` for a shared multimode vector. Reported only:
/// the sum is `1_A ⊗ P̂_B`, which differs from the identity whenever
/// `dim B > 1`.
pub fn lattice_resolution_residual(dims: (usize, usize), coefficients: &[C64]) -> Result<f64> {
    let size = dims.0 * dims.1;
    let mut sum = ComplexMatrix::zeros(size, size);
    for n in 0..dims.0 {
        let op = ProspectOperator::new(dims, &Prospect::new(n, coefficients.to_vec())?)?;
        sum = &sum + op.operator();
    }
    Ok(sum.max_abs_diff(&ComplexMatrix::identity(size)))
}

/// `p = f + q`: total, diagonal (classical) and interference parts.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProspectProbability {
    pub p: f64,
    pub f: f64,
    pub q: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Normalization {
    /// Plain operator expectation `Tr ρ P̂(π_n)`.
    Raw,
    /// Conditioned on the multimode event; see the module docs.
    #[default]
    Conditioned,
}

fn raw_prospect(rho: &CompositeState, prospect: &Prospect) -> Result<ProspectProbability> {
    prospect.check(rho)?;
    let n = prospect.n;
    let b = &prospect.coefficients;
    let db = b.len();
    let block = ComplexMatrix::from_fn(db, db, |alpha, beta| rho.element(n, alpha, n, beta));
    let (f, q) = split_quadratic_form(&block, b);

    let mut total = ZERO;
    for alpha in 0..db {
        for beta in 0..db {
            total += b[alpha].conj() * b[beta] * block[(alpha, beta)];
        }
    }
    let scale = b.iter().map(|z| z.norm_sqr()).sum::<f64>().max(1.0);
    if total.im.abs() > numeric::PROBABILITY_SLACK * scale {
        return Err(Error::NumericContract {
            quantity: "imaginary part of prospect probability",
            value: total.im,
            bound: "|Im| <= 1e-12",
        });
    }
    let p = total.re;
    if (p - f - q).abs() > numeric::PROBABILITY_SLACK * scale {
        return Err(Error::NumericContract {
            quantity: "p - f - q",
            value: p - f - q,
            bound: "|.| <= 1e-12",
        });
    }
    if f < -numeric::PROBABILITY_SLACK * scale {
        return Err(Error::NumericContract {
            quantity: "classical part f",
            value: f,
            bound: "f >= 0",
        });
    }
    Ok(ProspectProbability { p, f, q })
}

/// `q(π_n)` as the full `α ≠ β` double sum; equals the `2 Re Σ_{α<β}` form.
pub fn interference_double_sum(rho: &CompositeState, prospect: &Prospect) -> Result<f64> {
    prospect.check(rho)?;
    let b = &prospect.coefficients;
    let mut acc = ZERO;
    for alpha in 0..b.len() {
        for beta in 0..b.len() {
            if alpha != beta {
                acc += b[alpha].conj() * b[beta] * rho.element(prospect.n, alpha, prospect.n, beta);
            }
        }
    }
    Ok(acc.re)
}

/// Prospect probability of `π_n = A_n ⊗ B` and its decomposition.
pub fn prospect_probability(
    rho: &CompositeState,
    prospect: &Prospect,
    normalization: Normalization,
) -> Result<ProspectProbability> {
    match normalization {
        Normalization::Raw => raw_prospect(rho, prospect),
        Normalization::Conditioned => {
            prospect.check(rho)?;
            let lattice = prospect_lattice(rho, &prospect.coefficients, Normalization::Conditioned)?;
            Ok(lattice[prospect.n])
        }
    }
}

/// Prospect probabilities for every `n` with a shared multimode vector.
pub fn prospect_lattice(
    rho: &CompositeState,
    coefficients: &[C64],
    normalization: Normalization,
) -> Result<Vec<ProspectProbability>> {
    let raw: Vec<ProspectProbability> = (0..rho.dims().0)
        .map(|n| raw_prospect(rho, &Prospect::new(n, coefficients.to_vec())?))
        .collect::<Result<_>>()?;
    if normalization == Normalization::Raw {
        return Ok(raw);
    }
    let total_p: f64 = raw.iter().map(|x| x.p).sum();
    let total_f: f64 = raw.iter().map(|x| x.f).sum();
    if total_p <= numeric::DIVISION_GUARD {
        return Err(Error::DegenerateLattice(total_p));
    }
    if total_f <= numeric::DIVISION_GUARD {
        return Err(Error::DegenerateLattice(total_f));
    }
    raw.iter()
        .map(|x| {
            let p = numeric::clamp_probability("normalized prospect probability", x.p / total_p)?;
            let f = numeric::clamp_probability("normalized classical part", x.f / total_f)?;
            Ok(ProspectProbability { p, f, q: p - f })
        })
        .collect()
}

/// `p(A_n|B) = p(A_n ⊗ B) / p(B)` where `p(B)` is the multimode probability
/// of `B` on `ρ_B = Tr_A ρ`.
pub fn conditional_under_uncertainty(rho: &CompositeState, prospect: &Prospect) -> Result<f64> {
    let numerator = raw_prospect(rho, prospect)?.p;
    let rho_b = rho.reduced_b();
    let (classical, interference) = split_quadratic_form(rho_b.matrix(), &prospect.coefficients);
    let denominator = classical + interference;
    if denominator <= numeric::DIVISION_GUARD {
        return Err(Error::ZeroProbability(denominator));
    }
    numeric::clamp_probability("conditional probability", numerator / denominator)
}

#[derive(Debug, Clone, PartialEq)]
pub struct ClassicalLimitReport {
    /// Conditioned lattice, indexed by `n`.
    pub lattice: Vec<ProspectProbability>,
    pub sum_f: f64,
    pub sum_q: f64,
    pub min_q: f64,
    pub max_q: f64,
    /// `Σ_n q(π_n)` before normalization.
    pub raw_sum_q: f64,
    pub pass: bool,
}

/// Checks `Σ f = 1`, `Σ q = 0`, `f ∈ [0,1]`, `q ∈ [−1,1]` on a full lattice.
pub fn classical_limit_check(lattice: &[Prospect], rho: &CompositeState) -> Result<ClassicalLimitReport> {
    let da = rho.dims().0;
    let first = lattice
        .first()
        .ok_or_else(|| Error::IncompleteLattice("no prospects".into()))?;
    let coefficients = first.coefficients();
    let mut seen = alloc::vec![false; da];
    for prospect in lattice {
        prospect.check(rho)?;
        if prospect.coefficients() != coefficients {
            return Err(Error::IncompleteLattice(
                "prospects do not share one multimode vector".into(),
            ));
        }
        if core::mem::replace(&mut seen[prospect.n], true) {
            return Err(Error::IncompleteLattice(format!("index {} repeated", prospect.n)));
        }
    }
    if let Some(missing) = seen.iter().position(|s| !s) {
        return Err(Error::IncompleteLattice(format!("index {missing} missing")));
    }
    let raw_sum_q = prospect_lattice(rho, coefficients, Normalization::Raw)?
        .iter()
        .map(|x| x.q)
        .sum();
    let normalized = prospect_lattice(rho, coefficients, Normalization::Conditioned)?;
    let sum_f: f64 = normalized.iter().map(|x| x.f).sum();
    let sum_q: f64 = normalized.iter().map(|x| x.q).sum();
    let min_q = normalized.iter().map(|x| x.q).fold(f64::INFINITY, f64::min);
    let max_q = normalized.iter().map(|x| x.q).fold(f64::NEG_INFINITY, f64::max);
    let pass = sum_q.abs() <= numeric::DEFAULT_TOLERANCE
        && normalized.iter().all(|x| {
            (-1.0..=1.0).contains(&x.q) && (0.0..=1.0).contains(&x.f)
        });
    Ok(ClassicalLimitReport {
        lattice: normalized,
        sum_f,
        sum_q,
        min_q,
        max_q,
        raw_sum_q,
        pass,
    })
}
