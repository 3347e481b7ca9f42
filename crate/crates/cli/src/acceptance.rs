//! The acceptance suite, shared by `qprospect selftest` and the
//! `acceptance` test target.

use std::f64::consts::{FRAC_1_SQRT_2, LN_2, PI};
use std::fmt;

use qprospect_core::channels::{run_pipeline, standard_stages, MeasurerSpec};
use qprospect_core::composite::{
    bayes_conditional, joint_table, marginals, marginals_via_partial_trace, prospect_lattice, CompositeState,
    Normalization,
};
use qprospect_core::dynamics::{amplitude_matrix, evolve_state, HamiltonianSpec, WaveState};
use qprospect_core::entangle::{bell_state, entanglement_production, LogBase};
use qprospect_core::events::{DensityOperator, Observable};
use qprospect_core::game::{
    broken_symmetry_probabilities, classical_prospects, monte_carlo_cohort, quarter_law, BrokenMode, Choice,
    CohortConfig, GameSpec, InterferenceDistribution, Symmetry, TVERSKY_SHAFIR,
};
use qprospect_core::linalg::tensor_product;
use qprospect_core::measure::{
    born_distribution, identity_chain_residual, kirkwood_form, luders_transition, transition_matrix,
    wigner_distribution,
};
use qprospect_core::{ComplexMatrix, ComplexVector, C64};
use rand::rngs::StdRng;
use rand::SeedableRng;

use crate::random;

pub const DEFAULT_SEED: u64 = 20_240_611;

#[derive(Debug, Clone, PartialEq)]
pub struct Criterion {
    pub id: u8,
    pub title: &'static str,
    pub pass: bool,
    pub detail: String,
}

impl fmt::Display for Criterion {
    fn fmt(&self, f: &mut fmt::Formatter) -> fmt::Result {
        let status = if self.pass { "PASS" } else { "FAIL" };
        write!(f, "[{status}] {:>2} {}: {}", self.id, self.title, self.detail)
    }
}

type Outcome = Result<(bool, String), qprospect_core::Error>;

fn criterion(id: u8, title: &'static str, body: impl FnOnce() -> Outcome) -> Criterion {
    let (pass, detail) = match body() {
        Ok(r) => r,
        Err(e) => (false, format!("error: {e}")),
    };
    Criterion { id, title, pass, detail }
}

/// Runs every criterion. Random instances are drawn from `seed`.
pub fn run_all(seed: u64) -> Vec<Criterion> {
    vec![
        criterion(1, "quarter law", quarter_law_uniform),
        criterion(2, "game reproduction", game_reproduction),
        criterion(3, "Monte Carlo consistency", || monte_carlo(seed)),
        criterion(4, "Bell entanglement", bell_entanglement),
        criterion(5, "Bell interference nullity", bell_nullity),
        criterion(6, "Lueders symmetry", || luders_symmetry(seed)),
        criterion(7, "compatible observables", || compatible(seed)),
        criterion(8, "identity chain", || chain(seed)),
        criterion(9, "composite measure", || composite_measure(seed)),
        criterion(10, "prospect decomposition", || prospect_decomposition(seed)),
        criterion(11, "pipeline fidelity", pipeline_fidelity),
        criterion(12, "dynamics oracle", dynamics_oracle),
        criterion(13, "Kirkwood witness", kirkwood_witness),
    ]
}

fn quarter_law_uniform() -> Outcome {
    let (plus, minus) = quarter_law(&InterferenceDistribution::Uniform);
    let err = (plus - 0.25).abs().max((minus + 0.25).abs());
    Ok((err <= 1e-10, format!("q+ = {plus:.12}, q- = {minus:.12}, max error {err:.1e} (tol 1e-10)")))
}

/// A joint table with row marginals (0.1, 0.9).
pub fn reference_game() -> qprospect_core::Result<GameSpec> {
    GameSpec::new(None, [[0.05, 0.05], [0.45, 0.45]])
}

fn game_reproduction() -> Outcome {
    let f = classical_prospects(&reference_game()?);
    let r = broken_symmetry_probabilities(f, 0.25, Choice::Cooperate)?.with_reference(TVERSKY_SHAFIR);
    let err = (r.p.0 - 0.35).abs().max((r.p.1 - 0.65).abs());
    let (d1, d2) = r.deviations().unwrap_or((f64::INFINITY, f64::INFINITY));
    // The deviations are exactly 0.02 in real arithmetic; allow the same
    // 1e-12 slack as the probabilities themselves.
    let pass = err <= 1e-12 && d1 <= 0.02 + 1e-12 && d2 <= 0.02 + 1e-12;
    Ok((
        pass,
        format!(
            "p = ({:.12}, {:.12}), error {err:.1e} (tol 1e-12); vs empirical (0.37, 0.63): deviations ({d1:.4}, {d2:.4}) (tol 0.02)",
            r.p.0, r.p.1
        ),
    ))
}

fn monte_carlo(seed: u64) -> Outcome {
    let spec = reference_game()?;
    let uniform = InterferenceDistribution::Uniform;
    let n = 1_000_000;
    let fixed = broken_symmetry_probabilities(classical_prospects(&spec), quarter_law(&uniform).0, Choice::Cooperate)?
        .p
        .0;
    let broken = monte_carlo_cohort(
        &spec,
        &uniform,
        &CohortConfig::new(
            n,
            Symmetry::Broken {
                favored: Choice::Cooperate,
                mode: BrokenMode::MassWeighted,
            },
            seed,
        ),
    )?;
    let intact = monte_carlo_cohort(&spec, &uniform, &CohortConfig::new(n, Symmetry::Intact, seed))?;
    let gap = (broken.cooperation_fraction - fixed).abs();
    let pass = gap <= 0.002 && intact.mean_q.abs() <= 3.0 * intact.stderr_q;
    Ok((
        pass,
        format!(
            "broken cooperation {:.5} vs fixed {fixed:.5} (|gap| {gap:.5}, tol 0.002); intact mean q {:.2e}, 3*stderr {:.2e}",
            broken.cooperation_fraction,
            intact.mean_q,
            3.0 * intact.stderr_q
        ),
    ))
}

#[allow(clippy::approx_constant)]
fn bell_entanglement() -> Outcome {
    let mut worst = 0.0f64;
    let mut spectral = Vec::new();
    for m in 2..=8 {
        let report = entanglement_production(&bell_state(m)?, LogBase::Natural)?;
        worst = worst.max((report.epsilon - (m as f64).ln()).abs());
        spectral.push(report.spectral.epsilon / (m as f64).ln());
    }
    let e2 = entanglement_production(&bell_state(2)?, LogBase::Natural)?.epsilon;
    let pass = worst <= 1e-12 && (e2 - 0.693147).abs() < 5e-7 && (e2 - LN_2).abs() <= 1e-12;
    Ok((
        pass,
        format!(
            "max |eps - ln M| = {worst:.1e} over M = 2..8 (tol 1e-12); eps(2) = {e2:.6} nat; spectral-norm eps / ln M = {:.6}",
            spectral.iter().copied().fold(0.0, f64::max)
        ),
    ))
}

fn bell_nullity() -> Outcome {
    let mut worst = 0.0f64;
    let mut min_eps = f64::INFINITY;
    for m in 2..=8 {
        let rho = bell_state(m)?;
        let b = vec![C64::new(1.0, 0.0); m];
        for x in prospect_lattice(&rho, &b, Normalization::Raw)? {
            worst = worst.max(x.q.abs());
        }
        for x in prospect_lattice(&rho, &b, Normalization::Conditioned)? {
            worst = worst.max(x.q.abs());
        }
        min_eps = min_eps.min(entanglement_production(&rho, LogBase::Natural)?.epsilon);
    }
    Ok((
        worst <= 1e-12 && min_eps > 0.0,
        format!("max |q| = {worst:.1e} (tol 1e-12) with min eps = {min_eps:.4} > 0"),
    ))
}

fn luders_symmetry(seed: u64) -> Outcome {
    let mut rng = StdRng::seed_from_u64(seed ^ 6);
    let (mut asym, mut sums) = (0.0f64, 0.0f64);
    for k in 0..100 {
        let dim = 2 + k % 7;
        let a = random::observable(&mut rng, "A", dim);
        let b = random::observable(&mut rng, "B", dim);
        let ab = transition_matrix(&a, &b)?;
        for n in 0..dim {
            for alpha in 0..dim {
                asym = asym.max((ab[n][alpha] - luders_transition(&b, alpha, &a, n)?).abs());
            }
            sums = sums.max((ab[n].iter().sum::<f64>() - 1.0).abs());
            sums = sums.max(((0..dim).map(|r| ab[r][n]).sum::<f64>() - 1.0).abs());
        }
    }
    Ok((
        asym <= 1e-14 && sums <= 1e-12,
        format!("max asymmetry {asym:.1e} (tol 1e-14), max row/column sum error {sums:.1e} (tol 1e-12), 100 pairs, dims 2-8"),
    ))
}

fn compatible(seed: u64) -> Outcome {
    let mut rng = StdRng::seed_from_u64(seed ^ 7);
    let mut worst = 0.0f64;
    for dim in 2..=8 {
        let a = random::observable(&mut rng, "A", dim);
        // Same eigenbasis, different spectrum.
        let b = Observable::new("B", (0..dim).map(|k| 2.0 * k as f64 - 1.0).collect(), a.basis().clone())?;
        let rho = random::density(&mut rng, dim);
        let born = born_distribution(&rho, &b)?;
        let pl = transition_matrix(&a, &b)?;
        for n in 0..dim {
            for alpha in 0..dim {
                let delta = if n == alpha { 1.0 } else { 0.0 };
                worst = worst.max((pl[n][alpha] - delta).abs());
                let pw = wigner_distribution(&rho, &a, n, &b, alpha)?;
                worst = worst.max((pw - delta * born[alpha]).abs());
            }
        }
    }
    Ok((worst <= 1e-12, format!("max deviation from delta form {worst:.1e} (tol 1e-12), dims 2-8")))
}

fn chain(seed: u64) -> Outcome {
    let mut rng = StdRng::seed_from_u64(seed ^ 8);
    let mut worst = 0.0f64;
    for k in 0..100 {
        let dim = 2 + k % 7;
        let rho = random::density(&mut rng, dim);
        let a = random::observable(&mut rng, "A", dim);
        let b = random::observable(&mut rng, "B", dim);
        for n in 0..dim {
            worst = worst.max(identity_chain_residual(&rho, &a, n, &b)?);
        }
    }
    Ok((worst <= 1e-10, format!("max residual {worst:.1e} (tol 1e-10), 100 instances, dims 2-8")))
}

fn composite_measure(seed: u64) -> Outcome {
    let mut rng = StdRng::seed_from_u64(seed ^ 9);
    let (mut joint_err, mut bayes_err, mut marg_err) = (0.0f64, 0.0f64, 0.0f64);
    let mut negative = false;
    for k in 0..100 {
        let (da, db) = (2 + k % 3, 2 + (k / 3) % 3);
        let rho = CompositeState::new(random::density(&mut rng, da * db).matrix().clone(), (da, db))?;
        let table = joint_table(&rho)?;
        negative |= table.iter().flatten().any(|p| *p < 0.0);
        joint_err = joint_err.max((table.iter().flatten().sum::<f64>() - 1.0).abs());
        for alpha in 0..db {
            let s: f64 = (0..da).map(|n| bayes_conditional(&rho, n, alpha)).sum::<Result<f64, _>>()?;
            bayes_err = bayes_err.max((s - 1.0).abs());
        }
        let (x, y) = (marginals(&rho)?, marginals_via_partial_trace(&rho));
        for (u, v) in x.a.iter().zip(&y.a).chain(x.b.iter().zip(&y.b)) {
            marg_err = marg_err.max((u - v).abs());
        }
    }
    Ok((
        !negative && joint_err <= 1e-12 && bayes_err <= 1e-10 && marg_err <= 1e-12,
        format!(
            "nonnegative {}, table sum error {joint_err:.1e} (tol 1e-12), Bayes sum error {bayes_err:.1e} (tol 1e-10), marginal gap {marg_err:.1e} (tol 1e-12)",
            !negative
        ),
    ))
}

fn prospect_decomposition(seed: u64) -> Outcome {
    let mut rng = StdRng::seed_from_u64(seed ^ 10);
    let (mut split, mut sum_q, mut range) = (0.0f64, 0.0f64, 0.0f64);
    let mut min_eps = f64::INFINITY;
    for k in 0..100 {
        let (da, db) = (2 + k % 3, 2 + (k / 3) % 3);
        let psi = random::unit_vector(&mut rng, da * db);
        let rho = CompositeState::from_amplitudes(&ComplexMatrix::new(da, db, psi.into_vec())?)?;
        min_eps = min_eps.min(entanglement_production(&rho, LogBase::Natural)?.spectral.epsilon);
        let b: Vec<C64> = (0..db).map(|_| random::complex(&mut rng)).collect();
        for x in prospect_lattice(&rho, &b, Normalization::Raw)? {
            split = split.max((x.p - x.f - x.q).abs());
        }
        let lattice = prospect_lattice(&rho, &b, Normalization::Conditioned)?;
        for x in &lattice {
            split = split.max((x.p - x.f - x.q).abs());
            range = range.max(x.q.abs() - 1.0);
        }
        sum_q = sum_q.max(lattice.iter().map(|x| x.q).sum::<f64>().abs());
    }
    Ok((
        split <= 1e-12 && sum_q <= 1e-10 && range <= 0.0 && min_eps > 0.0,
        format!(
            "max |p - f - q| {split:.1e}, max |sum q| {sum_q:.1e} (tol 1e-10), all q in [-1, 1]: {}, min spectral eps {min_eps:.3} > 0",
            range <= 0.0
        ),
    ))
}

/// The pointer model: `H = σ_z ⊗ σ_x`, pointer starting in `|0⟩`.
pub fn pointer_measurer() -> qprospect_core::Result<MeasurerSpec> {
    let sz = ComplexMatrix::from_real_diagonal(&[1.0, -1.0]);
    let sx = ComplexMatrix::from_real_rows(&[&[0.0, 1.0], &[1.0, 0.0]])?;
    let zero = DensityOperator::from_pure(&ComplexVector::basis(2, 0)?)?;
    MeasurerSpec::new(zero, tensor_product(&sz, &sx)?)
}

fn pipeline_fidelity() -> Outcome {
    let input = DensityOperator::from_pure(&ComplexVector::new(vec![C64::new(0.6, 0.0), C64::new(0.0, 0.8)])?)?;
    let z = Observable::computational("Z", 2)?;
    let born = born_distribution(&input, &z)?;
    let measurer = pointer_measurer()?;
    let trace = run_pipeline(&input, &measurer, &standard_stages(PI / 4.0, 0.0, ComplexMatrix::identity(2)))?;
    let reduced = trace.reduced_b.as_ref().unwrap_or(&trace.final_a);
    let mut born_err = 0.0f64;
    for (k, p) in born.iter().enumerate() {
        born_err = born_err.max((reduced.matrix()[(k, k)].re - p).abs());
        born_err = born_err.max((trace.final_a.matrix()[(k, k)].re - p).abs());
    }
    let identity = run_pipeline(&input, &measurer, &standard_stages(0.0, 0.0, ComplexMatrix::identity(2)))?;
    let id_err = identity.final_a.matrix().max_abs_diff(input.matrix());
    Ok((
        born_err <= 1e-10 && id_err <= 1e-12,
        format!("diagonal vs Born (0.36, 0.64): {born_err:.1e} (tol 1e-10); zero-duration pipeline: {id_err:.1e} (tol 1e-12)"),
    ))
}

fn dynamics_oracle() -> Outcome {
    let g = 0.8;
    let v = ComplexMatrix::from_real_rows(&[&[0.0, g], &[g, 0.0]])?;
    // Resonance in the rotating frame, where H_0 drops out.
    let h = HamiltonianSpec::new(ComplexMatrix::zeros(2, 2), vec![(0.0, v)])?;
    let ground = WaveState::new(ComplexVector::basis(2, 0)?, 0.0)?;
    let mut rabi = 0.0f64;
    for k in 1..=50 {
        let t = 0.157 * k as f64;
        let p1 = evolve_state(&ground, &h, t)?.populations()[1];
        rabi = rabi.max((p1 - (g * t).sin().powi(2)).abs());
    }
    let psi = WaveState::new(ComplexVector::new(vec![C64::new(0.6, 0.0), C64::new(0.0, 0.8)])?, 0.0)?;
    let (t0, t) = (0.3, 0.3 + PI / (2.0 * g));
    let c = amplitude_matrix(&psi, &h, t0, t)?;
    let column = c.column_residual(&evolve_state(&psi, &h, t0)?)?;
    Ok((
        rabi <= 1e-8 && column <= 1e-10,
        format!("max |P1 - sin^2(gt)| {rabi:.1e} at 50 times (tol 1e-8); column-norm identity {column:.1e} (tol 1e-10)"),
    ))
}

fn kirkwood_witness() -> Outcome {
    let psi = ComplexVector::new(vec![C64::new(FRAC_1_SQRT_2, 0.0), C64::new(0.0, FRAC_1_SQRT_2)])?;
    let rho = DensityOperator::from_pure(&psi)?;
    let z = Observable::computational("Z", 2)?;
    let x = Observable::fourier("X", 2)?;
    let k = kirkwood_form(&rho, &z, 0, &x, 0)?;
    Ok((
        k.im.abs() > 0.01,
        format!("psi = (|0> + i|1>)/sqrt2: <P_Z[0] P_X[0]> = {:.4} + {:.4}i, |Im| > 0.01", k.re, k.im),
    ))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn display_line() {
        let c = Criterion {
            id: 3,
            title: "t",
            pass: false,
            detail: "d".into(),
        };
        assert_eq!(c.to_string(), "[FAIL]  3 t: d");
    }

    #[test]
    fn cheap_criteria_pass() {
        for c in [
            criterion(1, "quarter law", quarter_law_uniform),
            criterion(2, "game", game_reproduction),
            criterion(13, "kirkwood", kirkwood_witness),
        ] {
            assert!(c.pass, "{c}");
        }
    }
}
