//! Multimode Schrödinger dynamics and two-time composite events.
//!
//! The Hamiltonian is `H(t) = H_0 + V(t)` with piecewise-constant `V`, so
//! each segment is propagated exactly by a matrix exponential. Amplitudes
//! live in the eigenmode basis of `H_0`.
//!
//! Observing mode `α` at `t_0` and mode `n` at `t` is a composite event with
//! amplitude `c_{nα} = ⟨n|U(t, t_0)|α⟩ c_α(t_0)`; the induced pure composite
//! state is `ρ^{αβ}_{mn} = c_{mα} c*_{nβ}`.

use alloc::format;
use alloc::vec::Vec;

use crate::composite::ProspectProbability;
use crate::error::{Error, Result};
use crate::events::split_quadratic_form;
use crate::linalg::{matrix_exponential, ComplexMatrix, ComplexVector, C64};
use crate::numeric;

/// `H_0` plus a piecewise-constant perturbation: piece `k` is active on
/// `[start_k, start_{k+1})`, and `V = 0` before the first start time.
#[derive(Debug, Clone, PartialEq)]
pub struct HamiltonianSpec {
    h0: ComplexMatrix,
    pieces: Vec<(f64, ComplexMatrix)>,
}

impl HamiltonianSpec {
    pub fn new(h0: ComplexMatrix, pieces: Vec<(f64, ComplexMatrix)>) -> Result<Self> {
        h0.require_hermitian("H0")?;
        let dim = h0.rows();
        for (k, (start, v)) in pieces.iter().enumerate() {
            if !start.is_finite() {
                return Err(Error::NonFinite("perturbation start time"));
            }
            if v.rows() != dim {
                return Err(Error::mismatch(dim, v.rows()));
            }
            v.require_hermitian("perturbation")?;
            if k > 0 && !(pieces[k - 1].0 < *start) {
                return Err(Error::TimeOrder {
                    from: pieces[k - 1].0,
                    to: *start,
                });
            }
        }
        Ok(HamiltonianSpec { h0, pieces })
    }

    pub fn time_independent(h0: ComplexMatrix) -> Result<Self> {
        Self::new(h0, Vec::new())
    }

    pub fn dim(&self) -> usize {
        self.h0.rows()
    }

    pub fn h0(&self) -> &ComplexMatrix {
        &self.h0
    }

    pub fn pieces(&self) -> &[(f64, ComplexMatrix)] {
        &self.pieces
    }

    /// Index of the piece active at `t`, if any.
    fn active_piece(&self, t: f64) -> Option<usize> {
        self.pieces.iter().rposition(|(start, _)| *start <= t)
    }

    fn hamiltonian_at(&self, t: f64) -> ComplexMatrix {
        match self.active_piece(t) {
            Some(k) => &self.h0 + &self.pieces[k].1,
            None => self.h0.clone(),
        }
    }

    /// Start time of the first piece boundary strictly after `t`.
    fn next_boundary(&self, t: f64) -> Option<f64> {
        self.pieces.iter().map(|(s, _)| *s).find(|s| *s > t)
    }

    /// `U(t, t0)`, built segment by segment.
    pub fn propagator(&self, t0: f64, t: f64) -> Result<ComplexMatrix> {
        if !(t >= t0) || !t.is_finite() || !t0.is_finite() {
            return Err(Error::TimeOrder { from: t0, to: t });
        }
        let mut u = ComplexMatrix::identity(self.dim());
        let mut now = t0;
        while now < t {
            let end = self.next_boundary(now).map_or(t, |b| b.min(t));
            let step = matrix_exponential(&self.hamiltonian_at(now), end - now)?;
            u = step.try_mul(&u)?;
            now = end;
        }
        Ok(u)
    }
}

/// `|ψ(t)⟩ = Σ_n c_n(t) |n⟩` over the eigenmodes of `H_0`.
#[derive(Debug, Clone, PartialEq)]
pub struct WaveState {
    coefficients: ComplexVector,
    time: f64,
}

impl WaveState {
    pub fn new(coefficients: ComplexVector, time: f64) -> Result<Self> {
        if !time.is_finite() {
            return Err(Error::NonFinite("time"));
        }
        let residual = (coefficients.norm_sqr() - 1.0).abs();
        if residual > numeric::NORM_TOLERANCE {
            return Err(Error::constraint("wave state", "unit norm", residual));
        }
        Ok(WaveState { coefficients, time })
    }

    pub fn coefficients(&self) -> &ComplexVector {
        &self.coefficients
    }

    pub fn time(&self) -> f64 {
        self.time
    }

    pub fn dim(&self) -> usize {
        self.coefficients.dim()
    }

    /// `|c_n|²` for every mode.
    pub fn populations(&self) -> Vec<f64> {
        self.coefficients.as_slice().iter().map(|z| z.norm_sqr()).collect()
    }
}

/// Propagates `psi0` from its own time to `t`.
pub fn evolve_state(psi0: &WaveState, h: &HamiltonianSpec, t: f64) -> Result<WaveState> {
    if psi0.dim() != h.dim() {
        return Err(Error::mismatch(h.dim(), psi0.dim()));
    }
    let u = h.propagator(psi0.time, t)?;
    let coefficients = u.mul_vector(&psi0.coefficients)?;
    let residual = (coefficients.norm_sqr() - 1.0).abs();
    if residual > numeric::NORM_TOLERANCE {
        return Err(Error::NumericContract {
            quantity: "norm drift",
            value: residual,
            bound: "<= 1e-8",
        });
    }
    Ok(WaveState { coefficients, time: t })
}

/// Correlation amplitudes `c_{nα}` (rows `n`, columns `α`) with unit total
/// weight.
#[derive(Debug, Clone, PartialEq)]
pub struct AmplitudeMatrix {
    c: ComplexMatrix,
    times: Option<(f64, f64)>,
}

impl AmplitudeMatrix {
    pub fn new(c: ComplexMatrix) -> Result<Self> {
        let total: f64 = c.as_slice().iter().map(|z| z.norm_sqr()).sum();
        let residual = (total - 1.0).abs();
        if residual > numeric::NORM_TOLERANCE {
            return Err(Error::constraint("amplitude matrix", "unit norm", residual));
        }
        Ok(AmplitudeMatrix { c, times: None })
    }

    /// `c_{nα} = δ_{nα}/√M`.
    pub fn bell(m: usize) -> Result<Self> {
        if m < 2 {
            return Err(Error::InvalidArgument(format!("Bell state needs M >= 2, got {m}")));
        }
        let s = 1.0 / libm::sqrt(m as f64);
        Self::new(ComplexMatrix::from_fn(m, m, |n, a| {
            if n == a {
                C64::new(s, 0.0)
            } else {
                C64::new(0.0, 0.0)
            }
        }))
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.c
    }

    pub fn times(&self) -> Option<(f64, f64)> {
        self.times
    }

    pub fn dims(&self) -> (usize, usize) {
        (self.c.rows(), self.c.cols())
    }

    /// `Σ_n |c_{nα}|²` for each `α`.
    pub fn column_norms(&self) -> Vec<f64> {
        (0..self.c.cols())
            .map(|a| (0..self.c.rows()).map(|n| self.c[(n, a)].norm_sqr()).sum())
            .collect()
    }

    /// `Σ_α |c_{nα}|²` for each `n`.
    pub fn row_norms(&self) -> Vec<f64> {
        (0..self.c.rows())
            .map(|n| self.c.row(n).iter().map(|z| z.norm_sqr()).sum())
            .collect()
    }

    /// `max_n |Σ_α |c_{nα}|² − |c_n(t)|²|`. Nonzero whenever the two-time
    /// prospects interfere, since then `|c_n(t)|² = f + q`.
    pub fn row_sum_residual(&self, later: &WaveState) -> Result<f64> {
        if later.dim() != self.c.rows() {
            return Err(Error::mismatch(self.c.rows(), later.dim()));
        }
        Ok(self
            .row_norms()
            .iter()
            .zip(later.populations())
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max))
    }

    /// `max_α |Σ_n |c_{nα}|² − |c_α(t_0)|²|`.
    pub fn column_residual(&self, earlier: &WaveState) -> Result<f64> {
        if earlier.dim() != self.c.cols() {
            return Err(Error::mismatch(self.c.cols(), earlier.dim()));
        }
        Ok(self
            .column_norms()
            .iter()
            .zip(earlier.populations())
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max))
    }
}

/// `c_{nα} = ⟨n|U(t, t_0)|α⟩ c_α(t_0)` with `c(t_0)` obtained by evolving
/// `psi0` to `t0`.
pub fn amplitude_matrix(psi0: &WaveState, h: &HamiltonianSpec, t0: f64, t: f64) -> Result<AmplitudeMatrix> {
    if !(t > t0) {
        return Err(Error::TimeOrder { from: t0, to: t });
    }
    let earlier = evolve_state(psi0, h, t0)?;
    let u = h.propagator(t0, t)?;
    let c0 = earlier.coefficients.as_slice();
    let c = ComplexMatrix::from_fn(u.rows(), u.cols(), |n, a| u[(n, a)] * c0[a]);
    let mut out = AmplitudeMatrix::new(c)?;
    out.times = Some((t0, t));
    Ok(out)
}

/// `p(A_n ⊗ B_α) = |c_{nα}|²`.
pub fn two_time_joint(c: &AmplitudeMatrix, n: usize, alpha: usize) -> Result<f64> {
    let (rows, cols) = c.dims();
    if n >= rows {
        return Err(Error::IndexOutOfRange { index: n, dim: rows });
    }
    if alpha >= cols {
        return Err(Error::IndexOutOfRange { index: alpha, dim: cols });
    }
    numeric::clamp_probability("two-time joint probability", c.c[(n, alpha)].norm_sqr())
}

/// Prospect `A_n ⊗ B` on the two-time state: `f = Σ_α |b_α|² |c_{nα}|²` and
/// `q = Σ_{α≠β} b*_α b_β c_{nα} c*_{nβ}` (raw, unnormalized).
pub fn two_time_prospect(c: &AmplitudeMatrix, n: usize, b: &[C64]) -> Result<ProspectProbability> {
    let (rows, cols) = c.dims();
    if b.len() != cols {
        return Err(Error::mismatch(cols, b.len()));
    }
    if n >= rows {
        return Err(Error::IndexOutOfRange { index: n, dim: rows });
    }
    let row = c.c.row(n);
    let block = ComplexMatrix::from_fn(cols, cols, |a, bt| row[a] * row[bt].conj());
    let (f, q) = split_quadratic_form(&block, b);
    let amplitude: C64 = b.iter().zip(row).map(|(bb, cc)| bb.conj() * cc).sum();
    let p = amplitude.norm_sqr();
    let scale = b.iter().map(|z| z.norm_sqr()).sum::<f64>().max(1.0);
    if (p - f - q).abs() > numeric::PROBABILITY_SLACK * scale {
        return Err(Error::NumericContract {
            quantity: "p - f - q",
            value: p - f - q,
            bound: "|.| <= 1e-12",
        });
    }
    Ok(ProspectProbability { p, f, q })
}
