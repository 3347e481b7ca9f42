//! The two-player prisoner-dilemma game as a pair of prospects.
//!
//! `π_1 = C_1 ⊗ B_2` (cooperate) and `π_2 = D_1 ⊗ B_2` (defect), where the
//! second player's move `B_2` is uncertain. Classical parts come from a joint
//! table of observed frequencies; interference parts are random with a
//! zero-mean distribution `μ(q)` on `[−1, 1]`.

use alloc::format;
use alloc::vec::Vec;

use rand_chacha::rand_core::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::numeric;

/// Tolerance on the moments of an interference density.
pub const MOMENT_TOLERANCE: f64 = 1e-10;
/// Absolute error target of the quarter-law quadrature.
pub const QUADRATURE_TOLERANCE: f64 = 1e-12;
/// Observed frequencies reported by Tversky and Shafir.
pub const TVERSKY_SHAFIR: (f64, f64) = (0.37, 0.63);

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Choice {
    Cooperate,
    Defect,
}

impl Choice {
    pub fn name(self) -> &'static str {
        match self {
            Choice::Cooperate => "cooperate",
            Choice::Defect => "defect",
        }
    }
}

/// `x_1` (both cooperate), `x_2` (sucker), `x_3` (temptation), `x_4` (both
/// defect), for the row player.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Payoffs {
    pub x1: f64,
    pub x2: f64,
    pub x3: f64,
    pub x4: f64,
}

impl Payoffs {
    pub fn is_dilemma(&self) -> bool {
        self.x3 > self.x1 && self.x1 > self.x4 && self.x4 > self.x2
    }

    /// Row player's payoff matrix `[[x1, x2], [x3, x4]]`; the column player's
    /// is its transpose.
    pub fn matrix(&self) -> [[f64; 2]; 2] {
        [[self.x1, self.x2], [self.x3, self.x4]]
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GameSpec {
    payoffs: Option<Payoffs>,
    /// `[[p(C1⊗C2), p(C1⊗D2)], [p(D1⊗C2), p(D1⊗D2)]]`.
    joint: [[f64; 2]; 2],
}

impl GameSpec {
    pub fn new(payoffs: Option<Payoffs>, joint: [[f64; 2]; 2]) -> Result<Self> {
        if let Some(x) = payoffs {
            if ![x.x1, x.x2, x.x3, x.x4].iter().all(|v| v.is_finite()) {
                return Err(Error::NonFinite("payoff"));
            }
            if !x.is_dilemma() {
                return Err(Error::constraint("payoffs", "x3 > x1 > x4 > x2", 0.0));
            }
        }
        let mut total = 0.0;
        for v in joint.iter().flatten() {
            if !v.is_finite() {
                return Err(Error::NonFinite("joint probability"));
            }
            if *v < 0.0 {
                return Err(Error::constraint("joint table", "nonnegative", -v));
            }
            total += v;
        }
        let residual = (total - 1.0).abs();
        if residual > numeric::PROBABILITY_SLACK {
            return Err(Error::constraint("joint table", "sums to 1", residual));
        }
        Ok(GameSpec { payoffs, joint })
    }

    pub fn payoffs(&self) -> Option<Payoffs> {
        self.payoffs
    }

    pub fn joint(&self) -> [[f64; 2]; 2] {
        self.joint
    }
}

/// `(f(π_1), f(π_2))`: the row player's marginals.
pub fn classical_prospects(spec: &GameSpec) -> (f64, f64) {
    let j = spec.joint;
    (j[0][0] + j[0][1], j[1][0] + j[1][1])
}

/// Density `μ(q)` of the interference term on `[−1, 1]`.
#[derive(Debug, Clone, PartialEq)]
pub enum InterferenceDistribution {
    /// `μ = 1/2`.
    Uniform,
    /// Piecewise-linear through `(q_k, μ_k)`, knots strictly increasing from
    /// `−1` to `1`.
    Tabulated(Tabulated),
}

#[derive(Debug, Clone, PartialEq)]
pub struct Tabulated {
    knots: Vec<(f64, f64)>,
    /// Cumulative mass at each knot.
    cdf: Vec<f64>,
}

impl Tabulated {
    pub fn knots(&self) -> &[(f64, f64)] {
        &self.knots
    }

    fn density(&self, q: f64) -> f64 {
        if !(-1.0..=1.0).contains(&q) {
            return 0.0;
        }
        let k = self.knots.partition_point(|(x, _)| *x <= q).clamp(1, self.knots.len() - 1);
        let (x0, y0) = self.knots[k - 1];
        let (x1, y1) = self.knots[k];
        y0 + (y1 - y0) * (q - x0) / (x1 - x0)
    }

    /// Inverse of the cumulative distribution.
    fn quantile(&self, u: f64) -> f64 {
        let k = self.cdf.partition_point(|c| *c <= u).clamp(1, self.knots.len() - 1);
        let (x0, y0) = self.knots[k - 1];
        let (x1, y1) = self.knots[k];
        let target = u - self.cdf[k - 1];
        let h = x1 - x0;
        let slope = (y1 - y0) / h;
        // Solve y0·s + slope·s²/2 = target for s ∈ [0, h].
        let s = if slope.abs() < 1e-14 {
            if y0 > 0.0 { target / y0 } else { 0.0 }
        } else {
            let disc = (y0 * y0 + 2.0 * slope * target).max(0.0);
            (libm::sqrt(disc) - y0) / slope
        };
        x0 + s.clamp(0.0, h)
    }
}

impl InterferenceDistribution {
    pub fn tabulated(knots: Vec<(f64, f64)>) -> Result<Self> {
        if knots.len() < 2 {
            return Err(Error::InvalidDistribution("need at least two knots".into()));
        }
        if knots.iter().any(|(x, y)| !x.is_finite() || !y.is_finite()) {
            return Err(Error::NonFinite("density knot"));
        }
        if knots[0].0 != -1.0 || knots[knots.len() - 1].0 != 1.0 {
            return Err(Error::InvalidDistribution("knots must span [-1, 1]".into()));
        }
        if knots.windows(2).any(|w| !(w[0].0 < w[1].0)) {
            return Err(Error::InvalidDistribution("knots must be strictly increasing".into()));
        }
        if let Some((x, y)) = knots.iter().find(|(_, y)| *y < 0.0) {
            return Err(Error::InvalidDistribution(format!("negative density {y} at q = {x}")));
        }
        let mut cdf = Vec::with_capacity(knots.len());
        let mut mass = 0.0;
        let mut first_moment = 0.0;
        cdf.push(0.0);
        for w in knots.windows(2) {
            let ((x0, y0), (x1, y1)) = (w[0], w[1]);
            let h = x1 - x0;
            mass += h * (y0 + y1) / 2.0;
            // ∫ q·(linear) over the segment, exact.
            first_moment += h * (y0 * (2.0 * x0 + x1) + y1 * (x0 + 2.0 * x1)) / 6.0;
            cdf.push(mass);
        }
        if (mass - 1.0).abs() > MOMENT_TOLERANCE {
            return Err(Error::constraint("interference density", "unit mass", (mass - 1.0).abs()));
        }
        if first_moment.abs() > MOMENT_TOLERANCE {
            return Err(Error::constraint("interference density", "zero mean", first_moment.abs()));
        }
        Ok(InterferenceDistribution::Tabulated(Tabulated { knots, cdf }))
    }

    /// `μ(q) = h(1 − |q|/w)` on `|q| ≤ w` with `h = 1/w`.
    pub fn triangular(half_width: f64) -> Result<Self> {
        if !(half_width > 0.0 && half_width <= 1.0) {
            return Err(Error::InvalidDistribution(format!("half width {half_width} outside (0, 1]")));
        }
        let h = 1.0 / half_width;
        let knots = if half_width < 1.0 {
            alloc::vec![(-1.0, 0.0), (-half_width, 0.0), (0.0, h), (half_width, 0.0), (1.0, 0.0)]
        } else {
            alloc::vec![(-1.0, 0.0), (0.0, h), (1.0, 0.0)]
        };
        Self::tabulated(knots)
    }

    pub fn density(&self, q: f64) -> f64 {
        match self {
            InterferenceDistribution::Uniform => {
                if (-1.0..=1.0).contains(&q) {
                    0.5
                } else {
                    0.0
                }
            }
            InterferenceDistribution::Tabulated(t) => t.density(q),
        }
    }

    /// Points where `μ` may have a kink; quadrature splits there.
    fn breakpoints(&self) -> Vec<f64> {
        match self {
            InterferenceDistribution::Uniform => alloc::vec![-1.0, 0.0, 1.0],
            InterferenceDistribution::Tabulated(t) => {
                let mut xs: Vec<f64> = t.knots.iter().map(|k| k.0).collect();
                if !xs.contains(&0.0) {
                    xs.push(0.0);
                    xs.sort_by(f64::total_cmp);
                }
                xs
            }
        }
    }

    fn cdf(&self, q: f64) -> f64 {
        match self {
            InterferenceDistribution::Uniform => ((q + 1.0) / 2.0).clamp(0.0, 1.0),
            InterferenceDistribution::Tabulated(t) => {
                let k = t.knots.partition_point(|(x, _)| *x <= q).clamp(1, t.knots.len() - 1);
                let (x0, y0) = t.knots[k - 1];
                let s = (q - x0).max(0.0);
                t.cdf[k - 1] + y0 * s + (t.density(q) - y0) * s / 2.0
            }
        }
    }

    /// Mass on `q ≥ 0`.
    pub fn positive_mass(&self) -> f64 {
        1.0 - self.cdf(0.0)
    }

    /// Draw with `u ∈ [0, 1)`.
    pub fn quantile(&self, u: f64) -> f64 {
        match self {
            InterferenceDistribution::Uniform => 2.0 * u - 1.0,
            InterferenceDistribution::Tabulated(t) => t.quantile(u),
        }
    }

    /// Draw from `μ` restricted to `[0, 1]`, with `u ∈ [0, 1)`.
    pub fn positive_quantile(&self, u: f64) -> f64 {
        let c0 = self.cdf(0.0);
        self.quantile(c0 + u * (1.0 - c0)).max(0.0)
    }
}

fn simpson(a: f64, b: f64, fa: f64, fm: f64, fb: f64) -> f64 {
    (b - a) / 6.0 * (fa + 4.0 * fm + fb)
}

#[allow(clippy::too_many_arguments)]
fn adaptive_simpson(f: &dyn Fn(f64) -> f64, a: f64, b: f64, fa: f64, fm: f64, fb: f64, whole: f64, tol: f64, depth: u32) -> f64 {
    let m = (a + b) / 2.0;
    let (lm, rm) = ((a + m) / 2.0, (m + b) / 2.0);
    let (flm, frm) = (f(lm), f(rm));
    let left = simpson(a, m, fa, flm, fm);
    let right = simpson(m, b, fm, frm, fb);
    let delta = left + right - whole;
    if depth == 0 || delta.abs() <= 15.0 * tol {
        return left + right + delta / 15.0;
    }
    adaptive_simpson(f, a, m, fa, flm, fm, left, tol / 2.0, depth - 1)
        + adaptive_simpson(f, m, b, fm, frm, fb, right, tol / 2.0, depth - 1)
}

/// `∫_a^b f` to absolute error `tol`.
pub fn integrate(f: &dyn Fn(f64) -> f64, a: f64, b: f64, tol: f64) -> f64 {
    if a == b {
        return 0.0;
    }
    let (fa, fm, fb) = (f(a), f((a + b) / 2.0), f(b));
    let whole = simpson(a, b, fa, fm, fb);
    adaptive_simpson(f, a, b, fa, fm, fb, whole, tol, 40)
}

/// `(q_+, q_−) = (∫_0^1 qμ dq, ∫_{−1}^0 qμ dq)`.
pub fn quarter_law(dist: &InterferenceDistribution) -> (f64, f64) {
    let points = dist.breakpoints();
    let segments = (points.len() - 1) as f64;
    let integrand = |q: f64| q * dist.density(q);
    let mut plus = 0.0;
    let mut minus = 0.0;
    for w in points.windows(2) {
        let value = integrate(&integrand, w[0], w[1], QUADRATURE_TOLERANCE / segments);
        if w[0] >= 0.0 {
            plus += value;
        } else {
            minus += value;
        }
    }
    (plus, minus)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GameResult {
    pub f: (f64, f64),
    pub q_applied: (f64, f64),
    pub p: (f64, f64),
    pub empirical_reference: Option<(f64, f64)>,
}

impl GameResult {
    pub fn with_reference(mut self, reference: (f64, f64)) -> Self {
        self.empirical_reference = Some(reference);
        self
    }

    /// `(|p_1 − e_1|, |p_2 − e_2|)` against the empirical reference.
    pub fn deviations(&self) -> Option<(f64, f64)> {
        self.empirical_reference
            .map(|(e1, e2)| ((self.p.0 - e1).abs(), (self.p.1 - e2).abs()))
    }
}

fn check_pair(f: (f64, f64)) -> Result<()> {
    if !f.0.is_finite() || !f.1.is_finite() {
        return Err(Error::NonFinite("classical prospect"));
    }
    for v in [f.0, f.1] {
        if !(0.0..=1.0).contains(&v) {
            return Err(Error::constraint("classical prospects", "each in [0, 1]", v));
        }
    }
    let residual = (f.0 + f.1 - 1.0).abs();
    if residual > numeric::PROBABILITY_SLACK {
        return Err(Error::constraint("classical prospects", "sums to 1", residual));
    }
    Ok(())
}

/// `p = f + q` with `q_1 = −q_2`, each component clamped to `[0, 1]` and
/// the pair renormalized.
fn apply_interference(f: (f64, f64), q1: f64) -> GameResult {
    let p1 = (f.0 + q1).clamp(0.0, 1.0);
    let p2 = (f.1 - q1).clamp(0.0, 1.0);
    let total = p1 + p2;
    GameResult {
        f,
        q_applied: (q1, -q1),
        p: (p1 / total, p2 / total),
        empirical_reference: None,
    }
}

pub fn broken_symmetry_probabilities(f: (f64, f64), q_magnitude: f64, favored: Choice) -> Result<GameResult> {
    check_pair(f)?;
    if !(0.0..=1.0).contains(&q_magnitude) {
        return Err(Error::InvalidArgument(format!("interference magnitude {q_magnitude} outside [0, 1]")));
    }
    let q1 = match favored {
        Choice::Cooperate => q_magnitude,
        Choice::Defect => -q_magnitude,
    };
    Ok(apply_interference(f, q1))
}

/// How the favored side's `|q|` is chosen per participant.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum BrokenMode {
    /// `|q| = q_+` for everyone.
    Fixed,
    /// `|q|` drawn from `μ` restricted to `q ≥ 0`; mean `q_+ / m_+`.
    Conditional,
    /// Conditional draw scaled by the positive-side mass `m_+`; mean `q_+`.
    #[default]
    MassWeighted,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Symmetry {
    /// `q` drawn from `μ` with equiprobable sign.
    Intact,
    Broken { favored: Choice, mode: BrokenMode },
}

#[derive(Debug, Clone, PartialEq)]
pub struct CohortConfig {
    pub n_pairs: u64,
    pub symmetry: Symmetry,
    pub seed: u64,
    /// Number of independent substreams; results depend on this but not on
    /// how the substreams are scheduled.
    pub workers: u32,
}

impl CohortConfig {
    pub fn new(n_pairs: u64, symmetry: Symmetry, seed: u64) -> Self {
        CohortConfig {
            n_pairs,
            symmetry,
            seed,
            workers: 8,
        }
    }

    /// Half-open range of draws owned by `worker`.
    pub fn share(&self, worker: u32) -> (u64, u64) {
        let w = u64::from(self.workers);
        let i = u64::from(worker);
        (self.n_pairs * i / w, self.n_pairs * (i + 1) / w)
    }
}

/// Running sums from one substream.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct CohortPartial {
    pub count: u64,
    pub sum_q: f64,
    pub sum_q2: f64,
    pub sum_p1: f64,
    pub sum_p1_sq: f64,
    pub cooperators: u64,
}

impl CohortPartial {
    pub fn merge(mut self, other: &CohortPartial) -> CohortPartial {
        self.count += other.count;
        self.sum_q += other.sum_q;
        self.sum_q2 += other.sum_q2;
        self.sum_p1 += other.sum_p1;
        self.sum_p1_sq += other.sum_p1_sq;
        self.cooperators += other.cooperators;
        self
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CohortReport {
    pub n_pairs: u64,
    pub f: (f64, f64),
    pub q_plus: f64,
    /// Mean interference applied to the cooperate prospect.
    pub mean_q: f64,
    pub stderr_q: f64,
    /// Mean of the per-participant `p(π_1)`.
    pub cooperation_fraction: f64,
    pub stderr_cooperation: f64,
    /// Fraction of participants whose sampled choice was to cooperate.
    pub realized_cooperation: f64,
}

fn unit_interval(rng: &mut ChaCha8Rng) -> f64 {
    (rng.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
}

fn substream(seed: u64, worker: u32) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(u64::from(worker));
    rng
}

/// Simulates the draws owned by one worker.
pub fn cohort_partial(
    f: (f64, f64),
    dist: &InterferenceDistribution,
    config: &CohortConfig,
    worker: u32,
) -> Result<CohortPartial> {
    check_pair(f)?;
    if worker >= config.workers {
        return Err(Error::IndexOutOfRange {
            index: worker as usize,
            dim: config.workers as usize,
        });
    }
    let (q_plus, _) = quarter_law(dist);
    let mass = dist.positive_mass();
    let (start, end) = config.share(worker);
    let mut rng = substream(config.seed, worker);
    let mut acc = CohortPartial::default();
    for _ in start..end {
        let q1 = match config.symmetry {
            Symmetry::Intact => {
                let magnitude = dist.quantile(unit_interval(&mut rng)).abs();
                if rng.next_u32() & 1 == 0 { magnitude } else { -magnitude }
            }
            Symmetry::Broken { favored, mode } => {
                let magnitude = match mode {
                    BrokenMode::Fixed => q_plus,
                    BrokenMode::Conditional => dist.positive_quantile(unit_interval(&mut rng)),
                    BrokenMode::MassWeighted => mass * dist.positive_quantile(unit_interval(&mut rng)),
                };
                match favored {
                    Choice::Cooperate => magnitude,
                    Choice::Defect => -magnitude,
                }
            }
        };
        let result = apply_interference(f, q1);
        let p1 = result.p.0;
        acc.count += 1;
        acc.sum_q += q1;
        acc.sum_q2 += q1 * q1;
        acc.sum_p1 += p1;
        acc.sum_p1_sq += p1 * p1;
        if unit_interval(&mut rng) < p1 {
            acc.cooperators += 1;
        }
    }
    Ok(acc)
}

/// Combines per-worker sums, in worker order, into a report.
pub fn cohort_report(f: (f64, f64), dist: &InterferenceDistribution, partials: &[CohortPartial]) -> Result<CohortReport> {
    let total = partials.iter().fold(CohortPartial::default(), |a, b| a.merge(b));
    if total.count == 0 {
        return Err(Error::InvalidArgument("cohort is empty".into()));
    }
    let n = total.count as f64;
    let stderr = |sum: f64, sum_sq: f64| {
        let mean = sum / n;
        let var = if total.count > 1 {
            ((sum_sq - n * mean * mean) / (n - 1.0)).max(0.0)
        } else {
            0.0
        };
        libm::sqrt(var / n)
    };
    Ok(CohortReport {
        n_pairs: total.count,
        f,
        q_plus: quarter_law(dist).0,
        mean_q: total.sum_q / n,
        stderr_q: stderr(total.sum_q, total.sum_q2),
        cooperation_fraction: total.sum_p1 / n,
        stderr_cooperation: stderr(total.sum_p1, total.sum_p1_sq),
        realized_cooperation: total.cooperators as f64 / n,
    })
}

/// Sequential cohort simulation over all substreams.
pub fn monte_carlo_cohort(spec: &GameSpec, dist: &InterferenceDistribution, config: &CohortConfig) -> Result<CohortReport> {
    if config.n_pairs == 0 {
        return Err(Error::InvalidArgument("n_pairs must be at least 1".into()));
    }
    if config.workers == 0 {
        return Err(Error::InvalidArgument("workers must be at least 1".into()));
    }
    let f = classical_prospects(spec);
    let partials = (0..config.workers)
        .map(|w| cohort_partial(f, dist, config, w))
        .collect::<Result<Vec<_>>>()?;
    cohort_report(f, dist, &partials)
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    fn dilemma_spec() -> GameSpec {
        GameSpec::new(None, [[0.05, 0.05], [0.45, 0.45]]).unwrap()
    }

    #[test]
    fn classical_marginals() {
        let (f1, f2) = classical_prospects(&dilemma_spec());
        assert!((f1 - 0.1).abs() < 1e-15 && (f2 - 0.9).abs() < 1e-15);
        assert_eq!(classical_prospects(&GameSpec::new(None, [[0.25; 2]; 2]).unwrap()), (0.5, 0.5));
        assert_eq!(classical_prospects(&GameSpec::new(None, [[1.0, 0.0], [0.0, 0.0]]).unwrap()), (1.0, 0.0));
    }

    #[test]
    fn spec_validation() {
        assert!(GameSpec::new(None, [[0.5, 0.5], [0.5, 0.0]]).is_err());
        assert!(GameSpec::new(None, [[1.1, -0.1], [0.0, 0.0]]).is_err());
        let good = Payoffs { x1: 3.0, x2: 0.0, x3: 5.0, x4: 1.0 };
        assert!(GameSpec::new(Some(good), [[0.25; 2]; 2]).is_ok());
        let bad = Payoffs { x1: 5.0, ..good };
        assert!(matches!(GameSpec::new(Some(bad), [[0.25; 2]; 2]), Err(Error::Constraint { .. })));
    }

    #[test]
    fn quarter_law_uniform_and_triangles() {
        let (p, m) = quarter_law(&InterferenceDistribution::Uniform);
        assert!((p - 0.25).abs() < 1e-12 && (m + 0.25).abs() < 1e-12);
        let (p, m) = quarter_law(&InterferenceDistribution::triangular(0.5).unwrap());
        assert!((p - 1.0 / 12.0).abs() < 1e-12 && (p + m).abs() < 1e-12);
        let (p, _) = quarter_law(&InterferenceDistribution::triangular(1.0).unwrap());
        assert!((p - 1.0 / 6.0).abs() < 1e-12);
    }

    #[test]
    fn narrow_bumps_approach_half_atom() {
        let a = 0.6;
        let w = 1e-3;
        let h = 0.5 / w;
        let knots = vec![
            (-1.0, 0.0),
            (-a - w, 0.0),
            (-a, h),
            (-a + w, 0.0),
            (a - w, 0.0),
            (a, h),
            (a + w, 0.0),
            (1.0, 0.0),
        ];
        let dist = InterferenceDistribution::tabulated(knots).unwrap();
        let (p, m) = quarter_law(&dist);
        assert!((p - a / 2.0).abs() < 1e-10 && (m + a / 2.0).abs() < 1e-10);
    }

    #[test]
    fn distribution_validation() {
        assert!(InterferenceDistribution::tabulated(vec![(-1.0, 0.5), (1.0, 0.6)]).is_err());
        assert!(InterferenceDistribution::tabulated(vec![(-1.0, 0.0), (0.0, 2.0), (1.0, 0.0)]).is_err());
        // Unit mass but mean 1/3.
        assert!(matches!(
            InterferenceDistribution::tabulated(vec![(-1.0, 0.0), (1.0, 1.0)]),
            Err(Error::Constraint { .. })
        ));
        assert!(InterferenceDistribution::tabulated(vec![(-0.5, 1.0), (1.0, 0.0)]).is_err());
    }

    #[test]
    fn quantiles_invert_cdf() {
        let dist = InterferenceDistribution::triangular(0.5).unwrap();
        for k in 0..=20 {
            let u = k as f64 / 20.0;
            let q = dist.quantile(u);
            assert!((dist.cdf(q) - u).abs() < 1e-12, "u={u} q={q}");
        }
        assert!((dist.positive_mass() - 0.5).abs() < 1e-15);
    }

    #[test]
    fn broken_symmetry_examples() {
        let r = broken_symmetry_probabilities((0.1, 0.9), 0.25, Choice::Cooperate).unwrap();
        assert!((r.p.0 - 0.35).abs() < 1e-12 && (r.p.1 - 0.65).abs() < 1e-12);
        let d = r.with_reference(TVERSKY_SHAFIR).deviations().unwrap();
        assert!(d.0 <= 0.02 + 1e-12 && d.1 <= 0.02 + 1e-12);
        let r = broken_symmetry_probabilities((0.9, 0.1), 0.25, Choice::Defect).unwrap();
        assert!((r.p.0 - 0.65).abs() < 1e-12);
        assert_eq!(broken_symmetry_probabilities((0.3, 0.7), 0.0, Choice::Defect).unwrap().p, (0.3, 0.7));
        // Clamped edge: 0.9 + 0.25 exceeds 1.
        let r = broken_symmetry_probabilities((0.9, 0.1), 0.25, Choice::Cooperate).unwrap();
        assert_eq!(r.p, (1.0, 0.0));
        assert!(broken_symmetry_probabilities((0.2, 0.7), 0.1, Choice::Cooperate).is_err());
        assert!(broken_symmetry_probabilities((0.2, 0.8), 1.5, Choice::Cooperate).is_err());
    }

    #[test]
    fn cohort_is_deterministic() {
        let cfg = CohortConfig::new(1, Symmetry::Intact, 42);
        let a = monte_carlo_cohort(&dilemma_spec(), &InterferenceDistribution::Uniform, &cfg).unwrap();
        let b = monte_carlo_cohort(&dilemma_spec(), &InterferenceDistribution::Uniform, &cfg).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.n_pairs, 1);
        let zero = CohortConfig::new(0, Symmetry::Intact, 42);
        assert!(monte_carlo_cohort(&dilemma_spec(), &InterferenceDistribution::Uniform, &zero).is_err());
    }

    #[test]
    fn fixed_mode_reproduces_deterministic_value() {
        let sym = Symmetry::Broken {
            favored: Choice::Cooperate,
            mode: BrokenMode::Fixed,
        };
        let report = monte_carlo_cohort(&dilemma_spec(), &InterferenceDistribution::Uniform, &CohortConfig::new(1000, sym, 7)).unwrap();
        assert!((report.cooperation_fraction - 0.35).abs() < 1e-12);
    }

    #[test]
    fn cohort_modes_have_expected_means() {
        let spec = dilemma_spec();
        let uniform = InterferenceDistribution::Uniform;
        let run = |symmetry| monte_carlo_cohort(&spec, &uniform, &CohortConfig::new(200_000, symmetry, 3)).unwrap();
        let intact = run(Symmetry::Intact);
        assert!(intact.mean_q.abs() <= 4.0 * intact.stderr_q);
        let weighted = run(Symmetry::Broken { favored: Choice::Cooperate, mode: BrokenMode::MassWeighted });
        assert!((weighted.mean_q - 0.25).abs() < 5.0 * weighted.stderr_q);
        let conditional = run(Symmetry::Broken { favored: Choice::Cooperate, mode: BrokenMode::Conditional });
        assert!((conditional.mean_q - 0.5).abs() < 5.0 * conditional.stderr_q);
    }
}
