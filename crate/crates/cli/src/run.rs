//! Subcommand dispatch: scenario in, result table out.

use clap::ValueEnum;
use qprospect_core::channels::run_pipeline;
use qprospect_core::composite::{
    bayes_conditional, classical_limit_check, conditional_under_uncertainty, joint_table, marginals,
    marginals_via_partial_trace, prospect_lattice, Prospect,
};
use qprospect_core::dynamics::{amplitude_matrix, evolve_state, two_time_joint, two_time_prospect};
use qprospect_core::entangle::entanglement_production;
use qprospect_core::events::DensityOperator;
use qprospect_core::game::{
    broken_symmetry_probabilities, classical_prospects, cohort_partial, cohort_report, quarter_law, BrokenMode,
    CohortConfig, Symmetry,
};
use qprospect_core::measure::{
    born_distribution, disjoint_union_probability, expected_value, identity_chain, kirkwood_form, measure,
    most_probable, transition_matrix, wigner_distribution,
};
use qprospect_core::numeric;
use rayon::prelude::*;

use crate::error::CliError;
use crate::output::ResultTable;
use crate::scenario::{composite, density, Scenario, SymmetrySpec};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Command {
    Born,
    Lueders,
    Wigner,
    Kirkwood,
    Joint,
    Prospect,
    Conditional,
    Pipeline,
    Entanglement,
    Game,
    QuarterLaw,
    Dynamics,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Born => "born",
            Command::Lueders => "lueders",
            Command::Wigner => "wigner",
            Command::Kirkwood => "kirkwood",
            Command::Joint => "joint",
            Command::Prospect => "prospect",
            Command::Conditional => "conditional",
            Command::Pipeline => "pipeline",
            Command::Entanglement => "entanglement",
            Command::Game => "game",
            Command::QuarterLaw => "quarter-law",
            Command::Dynamics => "dynamics",
        }
    }
}

fn core<T>(field: &str, r: qprospect_core::Result<T>) -> Result<T, CliError> {
    r.map_err(|e| CliError::from_core(field, e))
}

/// Runs one subcommand. `seed` overrides the scenario's seed.
pub fn run(command: Command, scenario: &Scenario, seed: Option<u64>) -> Result<ResultTable, CliError> {
    let previous = numeric::tolerance();
    if let Some(tol) = scenario.run.tolerance {
        core("run.tolerance", numeric::set_tolerance(tol))?;
    }
    let seed = seed.or(scenario.run.seed).unwrap_or(0);
    let mut table = ResultTable::new();
    table.meta("command", command.name());
    if let Some(name) = &scenario.name {
        table.meta("scenario", name);
    }
    table.meta("seed", seed);
    table.meta("tolerance", numeric::tolerance());
    table.meta("version", env!("CARGO_PKG_VERSION"));
    let result = dispatch(command, scenario, seed, &mut table);
    // Restore so library callers running several scenarios are unaffected.
    let _ = numeric::set_tolerance(previous);
    result.map(|()| table)
}

fn dispatch(command: Command, s: &Scenario, seed: u64, t: &mut ResultTable) -> Result<(), CliError> {
    match command {
        Command::Born => born(s, t),
        Command::Lueders => lueders(s, t),
        Command::Wigner => wigner(s, t),
        Command::Kirkwood => kirkwood(s, t),
        Command::Joint => joint(s, t),
        Command::Prospect => prospect(s, t),
        Command::Conditional => conditional(s, t),
        Command::Pipeline => pipeline(s, t),
        Command::Entanglement => entanglement(s, t),
        Command::Game => game(s, seed, t),
        Command::QuarterLaw => quarter(s, t),
        Command::Dynamics => dynamics(s, t),
    }
}

fn state(s: &Scenario) -> Result<DensityOperator, CliError> {
    density("state", s.state_spec()?)
}

fn born(s: &Scenario, t: &mut ResultTable) -> Result<(), CliError> {
    let rho = state(s)?;
    let a = s.named_observable("run.observable", &s.run.observable)?;
    for (n, p) in core("born", born_distribution(&rho, &a))?.into_iter().enumerate() {
        t.probability(format!("p({})", a.event(n)), p, "born_probability")?;
    }
    t.quantity(format!("<{}>", a.label()), core("born", expected_value(&rho, &a))?, "expected_value")?;
    t.quantity("most_probable", core("born", most_probable(&rho, &a))? as f64, "most_probable")?;
    if let Some(indices) = &s.run.union {
        let label = indices.iter().map(|n| a.event(*n).to_string()).collect::<Vec<_>>().join("+");
        let p = core("run.union", disjoint_union_probability(&rho, &a, indices))?;
        t.probability(format!("p({label})"), p, "disjoint_union_probability")?;
    }
    Ok(())
}

fn lueders(s: &Scenario, t: &mut ResultTable) -> Result<(), CliError> {
    let a = s.named_observable("run.observable", &s.run.observable)?;
    let b = s.named_observable("run.second", &s.run.second)?;
    let ab = core("lueders", transition_matrix(&a, &b))?;
    for (n, row) in ab.iter().enumerate() {
        for (alpha, p) in row.iter().enumerate() {
            t.probability(format!("pL({}|{})", a.event(n), b.event(alpha)), *p, "luders_transition")?;
        }
    }
    if let Some(n) = s.run.index {
        let rho = state(s)?;
        let outcome = core("run.index", measure(&rho, &a, n))?;
        t.probability(format!("p({})", outcome.event), outcome.probability, "measure")?;
        for (alpha, p) in core("lueders", born_distribution(&outcome.post_state, &b))?.into_iter().enumerate() {
            t.probability(format!("p({}|after {})", b.event(alpha), outcome.event), p, "luders_reduce")?;
        }
    }
    Ok(())
}

fn wigner(s: &Scenario, t: &mut ResultTable) -> Result<(), CliError> {
    let rho = state(s)?;
    let a = s.named_observable("run.observable", &s.run.observable)?;
    let b = s.named_observable("run.second", &s.run.second)?;
    for n in 0..a.dim() {
        for alpha in 0..b.dim() {
            let p = core("wigner", wigner_distribution(&rho, &a, n, &b, alpha))?;
            t.probability(format!("pW({},{})", a.event(n), b.event(alpha)), p, "wigner_distribution")?;
        }
    }
    for n in 0..a.dim() {
        let chain = core("wigner", identity_chain(&rho, &a, n, &b))?;
        t.quantity(format!("chain_residual({})", a.event(n)), chain.residual, "identity_chain")?;
    }
    Ok(())
}

fn kirkwood(s: &Scenario, t: &mut ResultTable) -> Result<(), CliError> {
    let rho = state(s)?;
    let a = s.named_observable("run.observable", &s.run.observable)?;
    let b = s.named_observable("run.second", &s.run.second)?;
    for n in 0..a.dim() {
        for alpha in 0..b.dim() {
            let k = core("kirkwood", kirkwood_form(&rho, &a, n, &b, alpha))?;
            t.quantity(format!("Re K({},{})", a.event(n), b.event(alpha)), k.re, "kirkwood_form")?;
            t.quantity(format!("Im K({},{})", a.event(n), b.event(alpha)), k.im, "kirkwood_form")?;
        }
    }
    Ok(())
}

fn joint(s: &Scenario, t: &mut ResultTable) -> Result<(), CliError> {
    let rho = composite("state", s.state_spec()?)?;
    let (da, db) = rho.dims();
    for (n, row) in core("joint", joint_table(&rho))?.iter().enumerate() {
        for (alpha, p) in row.iter().enumerate() {
            t.probability(format!("p(A[{n}]xB[{alpha}])"), *p, "joint_probability")?;
        }
    }
    let m = core("joint", marginals(&rho))?;
    let via = marginals_via_partial_trace(&rho);
    for n in 0..da {
        t.probability(format!("p(A[{n}])"), m.a[n], "marginals")?;
    }
    for alpha in 0..db {
        t.probability(format!("p(B[{alpha}])"), m.b[alpha], "marginals")?;
    }
    let gap = m
        .a
        .iter()
        .zip(&via.a)
        .chain(m.b.iter().zip(&via.b))
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max);
    t.quantity("marginal_trace_gap", gap, "marginals_via_partial_trace")?;
    for alpha in 0..db {
        for n in 0..da {
            match bayes_conditional(&rho, n, alpha) {
                Ok(p) => t.probability(format!("p(A[{n}]|B[{alpha}])"), p, "bayes_conditional")?,
                Err(qprospect_core::Error::ZeroProbability(_)) => break,
                Err(e) => return Err(CliError::from_core("joint", e)),
            }
        }
    }
    Ok(())
}

fn prospect(s: &Scenario, t: &mut ResultTable) -> Result<(), CliError> {
    let rho = composite("state", s.state_spec()?)?;
    let b = s.run_multimode()?;
    let normalization = s.normalization();
    t.meta("normalization", format!("{normalization:?}").to_lowercase());
    let lattice = core("prospect", prospect_lattice(&rho, b.coefficients(), normalization))?;
    for (n, x) in lattice.iter().enumerate() {
        t.probability(format!("p(pi[{n}])"), x.p, "prospect_probability")?;
        t.probability(format!("f(pi[{n}])"), x.f, "prospect_probability")?;
        t.quantity(format!("q(pi[{n}])"), x.q, "prospect_probability")?;
    }
    let prospects = (0..rho.dims().0)
        .map(|n| Prospect::new(n, b.coefficients().to_vec()))
        .collect::<qprospect_core::Result<Vec<_>>>();
    let report = core("prospect", classical_limit_check(&core("prospect", prospects)?, &rho))?;
    t.quantity("sum_q", report.sum_q, "classical_limit_check")?;
    t.quantity("raw_sum_q", report.raw_sum_q, "classical_limit_check")?;
    t.quantity("lattice_pass", f64::from(u8::from(report.pass)), "classical_limit_check")?;
    Ok(())
}

fn conditional(s: &Scenario, t: &mut ResultTable) -> Result<(), CliError> {
    let rho = composite("state", s.state_spec()?)?;
    let b = s.run_multimode()?;
    for n in 0..rho.dims().0 {
        let prospect = core("conditional", Prospect::new(n, b.coefficients().to_vec()))?;
        let p = core("conditional", conditional_under_uncertainty(&rho, &prospect))?;
        t.probability(format!("p(A[{n}]|B)"), p, "conditional_under_uncertainty")?;
    }
    Ok(())
}

fn pipeline(s: &Scenario, t: &mut ResultTable) -> Result<(), CliError> {
    let rho = state(s)?;
    let measurer = s.measurer()?;
    let stages = s.stages()?;
    let trace = core("pipeline", run_pipeline(&rho, &measurer, &stages))?;
    for r in &trace.records {
        t.quantity(format!("C{}:{}:time", r.channel, r.stage), r.time, "run_pipeline")?;
        t.probability(format!("C{}:{}:purity", r.channel, r.stage), r.state.purity().clamp(0.0, 1.0), "run_pipeline")?;
    }
    if let Some(rb) = &trace.reduced_b {
        for (k, d) in rb.matrix().diagonal().iter().enumerate() {
            t.probability(format!("rho_B[{k},{k}]"), d.re.clamp(0.0, 1.0), "readout")?;
        }
    }
    for (k, d) in trace.final_a.matrix().diagonal().iter().enumerate() {
        t.probability(format!("rho_A[{k},{k}]"), d.re.clamp(0.0, 1.0), "readout")?;
    }
    if let Some(name) = &s.run.observable {
        let a = s.observable(name)?;
        for (n, p) in core("pipeline", born_distribution(&rho, &a))?.into_iter().enumerate() {
            t.probability(format!("input p({})", a.event(n)), p, "born_probability")?;
        }
    }
    Ok(())
}

fn entanglement(s: &Scenario, t: &mut ResultTable) -> Result<(), CliError> {
    let rho = composite("state", s.state_spec()?)?;
    let report = core("entanglement", entanglement_production(&rho, s.log_base()))?;
    t.meta("unit", report.unit());
    t.quantity("epsilon", report.epsilon, "entanglement_production")?;
    t.quantity("norm_AB", report.norms.0, "entanglement_production")?;
    t.quantity("norm_A", report.norms.1, "entanglement_production")?;
    t.quantity("norm_B", report.norms.2, "entanglement_production")?;
    t.quantity("spectral_epsilon", report.spectral.epsilon, "entanglement_production")?;
    t.quantity("spectral_norm_AB", report.spectral.joint, "entanglement_production")?;
    t.quantity("spectral_norm_A", report.spectral.a, "entanglement_production")?;
    t.quantity("spectral_norm_B", report.spectral.b, "entanglement_production")?;
    for (n, row) in core("entanglement", joint_table(&rho))?.iter().enumerate() {
        for (alpha, p) in row.iter().enumerate() {
            t.probability(format!("p(A[{n}]xB[{alpha}])"), *p, "joint_probability")?;
        }
    }
    let db = rho.dims().1;
    let uniform = vec![qprospect_core::C64::new(1.0, 0.0); db];
    let lattice = core("entanglement", prospect_lattice(&rho, &uniform, qprospect_core::composite::Normalization::Raw))?;
    for (n, x) in lattice.iter().enumerate() {
        t.quantity(format!("q(pi[{n}])"), x.q, "prospect_probability")?;
    }
    Ok(())
}

fn game(s: &Scenario, seed: u64, t: &mut ResultTable) -> Result<(), CliError> {
    let spec = s.game_spec()?;
    let g = s.game()?;
    let dist = s.distribution()?;
    let (q_plus, _) = quarter_law(&dist);
    let f = classical_prospects(&spec);
    let q = g.q.unwrap_or(q_plus);
    let mut result = core("game", broken_symmetry_probabilities(f, q, g.favored.into()))?;
    if let Some([e1, e2]) = g.reference {
        result = result.with_reference((e1, e2));
    }
    t.probability("f(pi[1])", f.0, "classical_prospects")?;
    t.probability("f(pi[2])", f.1, "classical_prospects")?;
    t.quantity("q(pi[1])", result.q_applied.0, "broken_symmetry_probabilities")?;
    t.quantity("q(pi[2])", result.q_applied.1, "broken_symmetry_probabilities")?;
    t.probability("p(pi[1])", result.p.0, "broken_symmetry_probabilities")?;
    t.probability("p(pi[2])", result.p.1, "broken_symmetry_probabilities")?;
    if let (Some((e1, e2)), Some((d1, d2))) = (result.empirical_reference, result.deviations()) {
        t.probability("empirical p(pi[1])", e1, "reference")?;
        t.probability("empirical p(pi[2])", e2, "reference")?;
        t.quantity("deviation(pi[1])", d1, "reference")?;
        t.quantity("deviation(pi[2])", d2, "reference")?;
    }
    if let Some(mc) = &g.monte_carlo {
        let symmetry = match mc.symmetry {
            SymmetrySpec::Intact => Symmetry::Intact,
            SymmetrySpec::Broken => Symmetry::Broken {
                favored: g.favored.into(),
                mode: BrokenMode::from(mc.mode),
            },
        };
        let config = CohortConfig {
            n_pairs: mc.n_pairs,
            symmetry,
            seed,
            workers: mc.workers,
        };
        // Each worker owns a deterministic substream; partials are merged in
        // worker order, so output does not depend on scheduling.
        let partials = (0..config.workers)
            .into_par_iter()
            .map(|w| cohort_partial(f, &dist, &config, w))
            .collect::<qprospect_core::Result<Vec<_>>>();
        let report = core("game.monte_carlo", cohort_report(f, &dist, &core("game.monte_carlo", partials)?))?;
        t.quantity("mc n_pairs", report.n_pairs as f64, "monte_carlo_cohort")?;
        t.quantity("mc mean q", report.mean_q, "monte_carlo_cohort")?;
        t.quantity("mc stderr q", report.stderr_q, "monte_carlo_cohort")?;
        t.probability("mc cooperation", report.cooperation_fraction, "monte_carlo_cohort")?;
        t.quantity("mc stderr cooperation", report.stderr_cooperation, "monte_carlo_cohort")?;
        t.probability("mc realized cooperation", report.realized_cooperation, "monte_carlo_cohort")?;
    }
    Ok(())
}

fn quarter(s: &Scenario, t: &mut ResultTable) -> Result<(), CliError> {
    let (plus, minus) = quarter_law(&s.distribution()?);
    t.quantity("q_plus", plus, "quarter_law")?;
    t.quantity("q_minus", minus, "quarter_law")?;
    Ok(())
}

fn dynamics(s: &Scenario, t: &mut ResultTable) -> Result<(), CliError> {
    let d = s.dynamics()?;
    let h = s.hamiltonian()?;
    let psi = s.initial_wave()?;
    for &time in &d.samples {
        let out = core("dynamics.samples", evolve_state(&psi, &h, time))?;
        for (n, p) in out.populations().iter().enumerate() {
            t.probability(format!("|c_{n}({time})|^2"), p.clamp(0.0, 1.0), "evolve_state")?;
        }
    }
    let c = core("dynamics", amplitude_matrix(&psi, &h, d.t0, d.t))?;
    let (rows, cols) = c.dims();
    for n in 0..rows {
        for alpha in 0..cols {
            t.probability(format!("p(A[{n}]xB[{alpha}])"), core("dynamics", two_time_joint(&c, n, alpha))?, "two_time_joint")?;
        }
    }
    let earlier = core("dynamics", evolve_state(&psi, &h, d.t0))?;
    let later = core("dynamics", evolve_state(&psi, &h, d.t))?;
    t.quantity("column_residual", core("dynamics", c.column_residual(&earlier))?, "amplitude_matrix")?;
    t.quantity("row_sum_residual", core("dynamics", c.row_sum_residual(&later))?, "amplitude_matrix")?;
    if let Some(b) = s.dynamics_multimode() {
        for n in 0..rows {
            let x = core("dynamics.multimode", two_time_prospect(&c, n, &b))?;
            t.quantity(format!("p(pi[{n}])"), x.p, "two_time_prospect")?;
            t.quantity(format!("f(pi[{n}])"), x.f, "two_time_prospect")?;
            t.quantity(format!("q(pi[{n}])"), x.q, "two_time_prospect")?;
        }
    }
    let rho = core("dynamics", qprospect_core::channels::composite_state_from_correlation(&c))?;
    let report = core("dynamics", entanglement_production(&rho, s.log_base()))?;
    t.quantity("epsilon", report.epsilon, "entanglement_production")?;
    t.quantity("spectral_epsilon", report.spectral.epsilon, "entanglement_production")?;
    Ok(())
}
