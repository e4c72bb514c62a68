//! Executable checks of the invariance and scale properties.
//!
//! Every checker is deterministic in `(trials, seed)` and returns a
//! [`Report`] instead of failing fast, so a full table can be produced in
//! one run.

use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::family::{build, ScaleFamily};
use crate::generator::{is_affine_equivalent, Expr, Generator};
use crate::interval::Interval;
use crate::mean::{mean, power_mean, WeightedSample};
use crate::neutral::{is_neutral_for, random_sample, NeutralMap, NeutralityCheck};
use crate::solver::solve;

/// Relative tolerance of the characterization checks.
pub const CHECK_TOL: f64 = 1e-9;
/// Tolerance handed to `is_neutral_for` by the suites.
pub const NEUTRAL_TOL: f64 = 1e-8;
/// Smallest margin accepted for a non-comparability witness.
pub const WITNESS_MARGIN: f64 = 1e-6;
pub const SURJECTIVITY_TARGETS: usize = 50;
pub const ROUND_TRIP_TOL: f64 = 1e-6;

const EQUIVALENCE_PROBES: usize = 9;
const HOMOGENEITY_FACTORS: [f64; 3] = [0.1, 2.0, 7.0];
const TRANSLATIONS: [f64; 3] = [-3.0, 1.0, 10.0];
const PROXY_NOTE: &str = "uniqueness (every invariant generator lies in the family) is only \
    sampled: a perturbed non-member is shown to break the invariance, which is a proxy, not a proof";

pub fn beta_grid() -> Vec<f64> {
    (-5..=5).map(f64::from).collect()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Report {
    pub suite: String,
    pub passed: bool,
    pub checks: Vec<Check>,
    pub notes: Vec<String>,
}

impl Report {
    fn new(suite: &str) -> Self {
        Report {
            suite: suite.to_string(),
            passed: true,
            checks: Vec::new(),
            notes: Vec::new(),
        }
    }

    fn push(&mut self, name: impl Into<String>, passed: bool, detail: impl Into<String>) {
        self.passed &= passed;
        self.checks.push(Check {
            name: name.into(),
            passed,
            detail: detail.into(),
        });
    }

    fn note(&mut self, text: impl Into<String>) {
        self.notes.push(text.into());
    }

    pub fn failures(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| !c.passed)
    }
}

fn rel_err(got: f64, want: f64) -> f64 {
    (got - want).abs() / want.abs().max(1.0)
}

// Plain relative error, for quantities bounded away from zero.
fn strict_rel_err(got: f64, want: f64) -> f64 {
    (got - want).abs() / want.abs()
}

/// Tracks the worst relative error and the first failure of a repeated check.
struct Tally {
    worst: f64,
    count: usize,
    first_failure: Option<String>,
    tol: f64,
}

impl Tally {
    fn new(tol: f64) -> Self {
        Tally {
            worst: 0.0,
            count: 0,
            first_failure: None,
            tol,
        }
    }

    fn record(&mut self, err: f64, context: impl FnOnce() -> String) {
        self.count += 1;
        self.worst = if err.is_nan() { f64::INFINITY } else { self.worst.max(err) };
        if (err.is_nan() || err > self.tol) && self.first_failure.is_none() {
            self.first_failure = Some(context());
        }
    }

    fn error(&mut self, e: Error, context: impl FnOnce() -> String) {
        self.count += 1;
        self.worst = f64::INFINITY;
        if self.first_failure.is_none() {
            self.first_failure = Some(format!("{}: {e}", context()));
        }
    }

    fn into_check(self, report: &mut Report, name: &str) {
        let detail = match &self.first_failure {
            None => format!("{} evaluations, worst relative error {:.3e}", self.count, self.worst),
            Some(f) => format!("{} evaluations, first failure: {f}", self.count),
        };
        report.push(name, self.first_failure.is_none(), detail);
    }
}

/// Strict internality of `M_g` on random samples plus one constant sample.
pub fn check_internality(g: &Generator, trials: usize, seed: u64) -> Report {
    let mut report = Report::new("internality");
    report.note(format!("generator {g}"));
    let (lo, hi) = g.domain().sampling_window();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut failures = Vec::new();
    let mut checked = 0;
    for t in 0..trials {
        let s = match random_sample(&mut rng, lo, hi) {
            Ok(s) => s,
            Err(e) => {
                failures.push(format!("trial {t}: {e}"));
                continue;
            }
        };
        if s.is_constant() {
            continue;
        }
        checked += 1;
        match mean(g, &s) {
            Ok(m) if s.min() < m && m < s.max() => {}
            Ok(m) => failures.push(format!(
                "trial {t}: mean {m} not strictly inside ({}, {})",
                s.min(),
                s.max()
            )),
            Err(e) => failures.push(format!("trial {t}: {e}")),
        }
    }
    let detail = if failures.is_empty() {
        format!("{checked} non-constant samples strictly inside")
    } else {
        format!("{} failures, first: {}", failures.len(), failures[0])
    };
    report.push("strict_internality", failures.is_empty(), detail);

    let v = g.domain().interior_point();
    let constant = WeightedSample::new(vec![v; 3], vec![0.2, 0.3, 0.5]);
    let (ok, detail) = match constant.and_then(|s| mean(g, &s)) {
        Ok(m) => (
            rel_err(m, v) <= 1e-12,
            format!("constant sample {v} -> {m}"),
        ),
        Err(e) => (false, e.to_string()),
    };
    report.push("constant_sample", ok, detail);
    report
}

/// The family of `x -> 2x` over the identity on `(0, inf)` is the power-mean
/// scale and every member is homogeneous.
pub fn check_homogeneity_equivalence(trials: usize, seed: u64) -> Report {
    let mut report = Report::new("homogeneity");
    let fam = match power_family() {
        Ok(f) => f,
        Err(e) => {
            report.push("build_family", false, e.to_string());
            return report;
        }
    };
    let (lo, hi) = fam.domain().sampling_window();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let samples: Vec<WeightedSample> = (0..trials)
        .filter_map(|_| random_sample(&mut rng, lo, hi).ok())
        .collect();

    let mut homogeneous = Tally::new(CHECK_TOL);
    let mut matches = Tally::new(CHECK_TOL);
    for beta in beta_grid() {
        let g = match fam.generator_at(beta) {
            Ok(g) => g,
            Err(e) => {
                homogeneous.error(e, || format!("beta {beta}"));
                continue;
            }
        };
        for (i, s) in samples.iter().enumerate() {
            let base = match mean(&g, s) {
                Ok(m) => m,
                Err(e) => {
                    homogeneous.error(e, || format!("beta {beta}, sample {i}"));
                    continue;
                }
            };
            for lambda in HOMOGENEITY_FACTORS {
                let scaled = s.map_values(|v| Ok(lambda * v)).and_then(|t| mean(&g, &t));
                match scaled {
                    Ok(m) => homogeneous.record(strict_rel_err(m, lambda * base), || {
                        format!("beta {beta}, lambda {lambda}, sample {i}: {m} vs {}", lambda * base)
                    }),
                    Err(e) => homogeneous.error(e, || format!("beta {beta}, lambda {lambda}")),
                }
            }
            match power_mean(beta, s) {
                Ok(p) => matches.record(strict_rel_err(base, p), || {
                    format!("beta {beta}, sample {i}: member {base} vs power mean {p}")
                }),
                Err(e) => matches.error(e, || format!("beta {beta}, sample {i}")),
            }
        }
    }
    homogeneous.into_check(&mut report, "members_homogeneous");
    matches.into_check(&mut report, "members_are_power_means");

    let outcome = nonmember_breaks_homogeneity(&samples);
    match outcome {
        Some((lambda, i, err)) => report.push(
            "nonmember_breaks_homogeneity",
            true,
            format!("x + sin(2 pi x)/(4 pi): lambda {lambda}, sample {i}, relative gap {err:.3e}"),
        ),
        None => report.push(
            "nonmember_breaks_homogeneity",
            false,
            "perturbed generator looked homogeneous on every sample",
        ),
    }
    report.note(PROXY_NOTE);
    report
}

fn nonmember_breaks_homogeneity(samples: &[WeightedSample]) -> Option<(f64, usize, f64)> {
    let g = Generator::with_domain(Expr::SineRamp { amplitude: 0.5 }, Interval::POSITIVE).ok()?;
    for (i, s) in samples.iter().enumerate() {
        let base = mean(&g, s).ok()?;
        for lambda in HOMOGENEITY_FACTORS {
            let scaled = mean(&g, &s.map_values(|v| Ok(lambda * v)).ok()?).ok()?;
            let err = strict_rel_err(scaled, lambda * base);
            if err > WITNESS_MARGIN {
                return Some((lambda, i, err));
            }
        }
    }
    None
}

/// Stable closed form `(1/beta) ln(sum w_i exp(beta v_i))`, arithmetic mean at 0.
pub fn log_exp_mean(beta: f64, s: &WeightedSample) -> f64 {
    let pairs = s.values().iter().zip(s.weights());
    if beta == 0.0 {
        return pairs.map(|(v, w)| v * w).sum();
    }
    let top = s
        .values()
        .iter()
        .map(|v| beta * v)
        .fold(f64::NEG_INFINITY, f64::max);
    let acc: f64 = pairs.map(|(v, w)| w * (beta * v - top).exp()).sum();
    (top + acc.ln()) / beta
}

/// The family of `x -> x + 1` over the identity on the reals consists of the
/// translative log-exp means.
pub fn check_translation_logexp(trials: usize, seed: u64) -> Report {
    let mut report = Report::new("translation");
    let fam = match translation_family() {
        Ok(f) => f,
        Err(e) => {
            report.push("build_family", false, e.to_string());
            return report;
        }
    };
    let (lo, hi) = fam.domain().sampling_window();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let samples: Vec<WeightedSample> = (0..trials)
        .filter_map(|_| random_sample(&mut rng, lo, hi).ok())
        .collect();

    let mut translative = Tally::new(CHECK_TOL);
    let mut closed_form = Tally::new(CHECK_TOL);
    for beta in beta_grid() {
        let g = match fam.generator_at(beta) {
            Ok(g) => g,
            Err(e) => {
                translative.error(e, || format!("beta {beta}"));
                continue;
            }
        };
        for (i, s) in samples.iter().enumerate() {
            let base = match mean(&g, s) {
                Ok(m) => m,
                Err(e) => {
                    translative.error(e, || format!("beta {beta}, sample {i}"));
                    continue;
                }
            };
            for c in TRANSLATIONS {
                match s.map_values(|v| Ok(v + c)).and_then(|t| mean(&g, &t)) {
                    Ok(m) => translative.record(rel_err(m, base + c), || {
                        format!("beta {beta}, c {c}, sample {i}: {m} vs {}", base + c)
                    }),
                    Err(e) => translative.error(e, || format!("beta {beta}, c {c}")),
                }
            }
            let want = log_exp_mean(beta, s);
            closed_form.record(rel_err(base, want), || {
                format!("beta {beta}, sample {i}: member {base} vs log-exp {want}")
            });
        }
    }
    translative.into_check(&mut report, "members_translative");
    closed_form.into_check(&mut report, "members_are_log_exp_means");
    report
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WitnessSample {
    pub sample: WeightedSample,
    pub reference_mean: f64,
    pub generator_mean: f64,
    /// `|reference_mean - generator_mean|`.
    pub margin: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Witness {
    /// Identity mean exceeds the generator's mean.
    pub above: WitnessSample,
    /// Identity mean falls below the generator's mean.
    pub below: WitnessSample,
    pub shift_neutral_for_identity: NeutralityCheck,
    pub shift_neutral_for_generator: NeutralityCheck,
}

/// Search two-point samples on `[0, 1]` for both orderings of `M_id` and
/// `M_g`, and confirm `x -> x + 1` is neutral for both means.
pub fn noncomparability_witness(g: &Generator, grid_size: usize, seed: u64) -> Result<Witness> {
    if grid_size < 2 {
        return Err(Error::Input(format!("grid needs at least 2 points, got {grid_size}")));
    }
    let id = Generator::identity();
    let grid: Vec<f64> = (0..grid_size)
        .map(|i| i as f64 / (grid_size - 1) as f64)
        .collect();
    let weights: Vec<f64> = (1..=9).map(|k| k as f64 / 10.0).collect();

    let mut above: Option<WitnessSample> = None;
    let mut below: Option<WitnessSample> = None;
    for (i, &v1) in grid.iter().enumerate() {
        for &v2 in &grid[i + 1..] {
            if !(g.domain().contains(v1) && g.domain().contains(v2)) {
                continue;
            }
            for &w in &weights {
                let s = WeightedSample::new(vec![v1, v2], vec![w, 1.0 - w])?;
                let m_id = mean(&id, &s)?;
                let m_g = mean(g, &s)?;
                let diff = m_id - m_g;
                let slot = if diff > 0.0 { &mut above } else { &mut below };
                if slot.as_ref().is_none_or(|best| diff.abs() > best.margin) {
                    *slot = Some(WitnessSample {
                        sample: s,
                        reference_mean: m_id,
                        generator_mean: m_g,
                        margin: diff.abs(),
                    });
                }
            }
        }
    }
    let found = |slot: Option<WitnessSample>, what: &str| {
        slot.filter(|w| w.margin > WITNESS_MARGIN).ok_or_else(|| {
            Error::WitnessNotFound(format!(
                "no two-point sample on a {grid_size}-point grid has M_id {what} M_g by more than {WITNESS_MARGIN}"
            ))
        })
    };
    let above = found(above, ">")?;
    let below = found(below, "<")?;

    let shift = NeutralMap::from_coeffs(&id, 1.0, 1.0)?;
    Ok(Witness {
        above,
        below,
        shift_neutral_for_identity: is_neutral_for(&shift, &id, 200, NEUTRAL_TOL, seed)?,
        shift_neutral_for_generator: is_neutral_for(&shift, g, 200, NEUTRAL_TOL, seed)?,
    })
}

/// `x + sin(2 pi x) / (4 pi)`.
pub fn perturbed_identity() -> Generator {
    Generator::new(Expr::SineRamp { amplitude: 0.5 }).expect("amplitude 1/2 is valid")
}

pub fn check_noncomparability(grid_size: usize, seed: u64) -> Report {
    let mut report = Report::new("noncomparability");
    let g = perturbed_identity();
    report.note(format!("f = identity, g = {g}"));
    match noncomparability_witness(&g, grid_size, seed) {
        Ok(w) => {
            let describe = |ws: &WitnessSample| {
                format!(
                    "v = {:?}, w = {:?}: M_id = {}, M_g = {}, margin {:.3e}",
                    ws.sample.values(),
                    ws.sample.weights(),
                    ws.reference_mean,
                    ws.generator_mean,
                    ws.margin
                )
            };
            report.push("identity_mean_above", true, describe(&w.above));
            report.push("identity_mean_below", true, describe(&w.below));
            for (name, c) in [
                ("shift_neutral_for_identity", w.shift_neutral_for_identity),
                ("shift_neutral_for_generator", w.shift_neutral_for_generator),
            ] {
                report.push(
                    name,
                    c.holds,
                    format!("{} trials, worst residual {:.3e}", c.trials, c.worst_residual),
                );
            }
        }
        Err(e) => report.push("witness_search", false, e.to_string()),
    }
    report
}

/// Scale axiom on the default grid `beta = -5..=5`.
pub fn check_scale_axiom(fam: &ScaleFamily, trials: usize, seed: u64) -> Report {
    check_scale_axiom_on_grid(fam, &beta_grid(), trials, seed)
}

/// Surjectivity of `beta -> mean` onto the open sample interval, round-trip
/// recovery of `beta`, and pairwise non-equivalence of members on `betas`.
pub fn check_scale_axiom_on_grid(
    fam: &ScaleFamily,
    betas: &[f64],
    trials: usize,
    seed: u64,
) -> Report {
    let mut report = Report::new("scale");
    report.note(format!(
        "family {}",
        serde_json::to_string(fam).unwrap_or_default()
    ));
    let (lo, hi) = fam.domain().sampling_window();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);

    let mut surjective = Tally::new(CHECK_TOL);
    let mut round_trip = Tally::new(ROUND_TRIP_TOL);
    let mut plateaus = 0usize;
    for t in 0..trials {
        let s = match random_sample(&mut rng, lo, hi) {
            Ok(s) if !s.is_constant() => s,
            _ => continue,
        };
        let (vmin, vmax) = (s.min(), s.max());
        let delta = 1e-3 * (vmax - vmin);
        let (a, b) = (vmin + delta, vmax - delta);
        for j in 0..SURJECTIVITY_TARGETS {
            let target = a + (b - a) * (j + 1) as f64 / (SURJECTIVITY_TARGETS + 1) as f64;
            let got = solve(fam, &s, target, CHECK_TOL)
                .and_then(|beta| fam.mean_at(beta, &s).map(|m| (beta, m.resolve(&s))));
            match got {
                Ok((beta, m)) => surjective.record(rel_err(m, target), || {
                    format!("trial {t}, target {target}: beta {beta} gives {m}")
                }),
                Err(e) => surjective.error(e, || format!("trial {t}, target {target}")),
            }
        }

        let beta_star = rng.random_range(-20.0..=20.0);
        let target = match fam.mean_at(beta_star, &s) {
            Ok(m) => m.resolve(&s),
            Err(e) => {
                round_trip.error(e, || format!("trial {t}, beta* {beta_star}"));
                continue;
            }
        };
        if !(vmin < target && target < vmax) {
            plateaus += 1;
            continue;
        }
        match solve(fam, &s, target, f64::MIN_POSITIVE) {
            Ok(beta) => {
                let err = (beta - beta_star).abs();
                if err > ROUND_TRIP_TOL {
                    // Plateau: accept when the means are indistinguishable.
                    let m = fam.mean_at(beta, &s).map(|m| m.resolve(&s)).unwrap_or(f64::NAN);
                    if rel_err(m, target) <= CHECK_TOL {
                        plateaus += 1;
                        continue;
                    }
                }
                round_trip.record(err, || format!("trial {t}: beta* {beta_star} -> {beta}"));
            }
            Err(e) => round_trip.error(e, || format!("trial {t}, beta* {beta_star}")),
        }
    }
    if trials == 0 {
        report.note("warning: zero trials, surjectivity and round trip hold vacuously");
    }
    surjective.into_check(&mut report, "surjective_onto_interior");
    round_trip.into_check(&mut report, "round_trip_beta");
    if plateaus > 0 {
        report.note(format!(
            "{plateaus} round trips landed on a floating-point plateau and were accepted on the mean"
        ));
    }

    if betas.len() < 2 {
        report.note("warning: fewer than two grid points, injectivity holds vacuously");
    }
    let mut injective = true;
    let mut detail = format!("{} members pairwise distinct", betas.len());
    let members: Result<Vec<Generator>> = betas.iter().map(|&b| fam.generator_at(b)).collect();
    match members {
        Ok(members) => {
            'outer: for (i, gi) in members.iter().enumerate() {
                for (j, gj) in members.iter().enumerate().skip(i) {
                    let equivalent = is_affine_equivalent(gi, gj, EQUIVALENCE_PROBES, CHECK_TOL)
                        .map(|w| w.is_some());
                    let expected = betas[i] == betas[j];
                    if equivalent.as_ref().ok() != Some(&expected) {
                        injective = false;
                        detail = format!(
                            "beta {} vs {}: equivalence {:?}, expected {expected}",
                            betas[i], betas[j], equivalent
                        );
                        break 'outer;
                    }
                }
            }
        }
        Err(e) => {
            injective = false;
            detail = e.to_string();
        }
    }
    report.push("members_pairwise_distinct", injective, detail);
    report
}

/// Families over the identity on `(0, inf)` with `x -> 2x`.
pub fn power_family() -> Result<ScaleFamily> {
    let g = Generator::with_domain(Expr::Identity, Interval::POSITIVE)?;
    let n = NeutralMap::from_coeffs(&g, 2.0, 0.0)?;
    Ok(build(&g, &n)?.remove(0))
}

/// Family over the identity on the reals with `x -> x + 1`.
pub fn translation_family() -> Result<ScaleFamily> {
    let g = Generator::identity();
    let n = NeutralMap::from_coeffs(&g, 1.0, 1.0)?;
    Ok(build(&g, &n)?.remove(0))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Suite {
    Internality,
    Homogeneity,
    Translation,
    Noncomparability,
    Scale,
    All,
}

impl std::str::FromStr for Suite {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "internality" => Suite::Internality,
            "homogeneity" => Suite::Homogeneity,
            "translation" => Suite::Translation,
            "noncomparability" => Suite::Noncomparability,
            "scale" => Suite::Scale,
            "all" => Suite::All,
            other => return Err(Error::Input(format!("unknown suite {other:?}"))),
        })
    }
}

pub const WITNESS_GRID: usize = 101;

/// Run a suite; reports come back in a fixed order.
pub fn run_suite(suite: Suite, trials: usize, seed: u64) -> Vec<Report> {
    let mut out = Vec::new();
    let all = suite == Suite::All;
    if all || suite == Suite::Internality {
        let generators = [
            Generator::identity(),
            Generator::ln(),
            Generator::exp(),
            Generator::power(3.0).expect("valid"),
            Generator::power(-1.0).expect("valid"),
            perturbed_identity(),
        ];
        for g in &generators {
            out.push(check_internality(g, trials, seed));
        }
    }
    if all || suite == Suite::Homogeneity {
        out.push(check_homogeneity_equivalence(trials, seed));
    }
    if all || suite == Suite::Translation {
        out.push(check_translation_logexp(trials, seed));
    }
    if all || suite == Suite::Noncomparability {
        out.push(check_noncomparability(WITNESS_GRID, seed));
    }
    if all || suite == Suite::Scale {
        for fam in [power_family(), translation_family()] {
            match fam {
                Ok(f) => out.push(check_scale_axiom(&f, trials, seed)),
                Err(e) => {
                    let mut r = Report::new("scale");
                    r.push("build_family", false, e.to_string());
                    out.push(r);
                }
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn half(a: f64, b: f64) -> WeightedSample {
        WeightedSample::new(vec![a, b], vec![0.5, 0.5]).unwrap()
    }

    #[test]
    fn internality_examples() {
        let r = check_internality(&Generator::ln(), 1000, 7);
        assert!(r.passed, "{r:?}");
        let g = Generator::power(3.0).unwrap();
        let s = WeightedSample::uniform(vec![2.5; 3]).unwrap();
        assert_eq!(mean(&g, &s).unwrap(), 2.5);
        // ln((1 + e) / 2), 40-digit reference.
        let m = mean(&Generator::exp(), &half(0.0, 1.0)).unwrap();
        assert!((m - 0.620_114_506_958_277_5).abs() < 1e-15, "{m}");
    }

    #[test]
    fn homogeneity_examples() {
        let fam = power_family().unwrap();
        let g = fam.generator_at(2.0).unwrap();
        assert!((mean(&g, &half(2.0, 14.0)).unwrap() - 10.0).abs() < 1e-13);
        let g = fam.generator_at(0.0).unwrap();
        assert!((mean(&g, &half(6.0, 24.0)).unwrap() - 12.0).abs() < 1e-13);
        let g = fam.generator_at(-1.0).unwrap();
        assert!((mean(&g, &half(1.0, 1.0 / 3.0)).unwrap() - 0.5).abs() < 1e-15);
        assert!((mean(&g, &half(3.0, 1.0)).unwrap() - 1.5).abs() < 1e-15);
    }

    #[test]
    fn translation_examples() {
        let fam = translation_family().unwrap();
        let g = fam.generator_at(0.0).unwrap();
        assert_eq!(mean(&g, &half(11.0, 13.0)).unwrap(), 12.0);
        let g = fam.generator_at(1.0).unwrap();
        let m = mean(&g, &half(0.0, 3f64.ln())).unwrap();
        assert!((m - 2f64.ln()).abs() < 1e-15);
        let m = mean(&g, &half(1.0, 1.0 + 3f64.ln())).unwrap();
        assert!((m - (1.0 + 2f64.ln())).abs() < 1e-15);
        let g = fam.generator_at(-1.0).unwrap();
        assert_eq!(mean(&g, &half(0.0, 0.0)).unwrap(), 0.0);
        assert!((log_exp_mean(1.0, &half(0.0, 3f64.ln())) - 2f64.ln()).abs() < 1e-15);
    }

    #[test]
    fn suites_are_deterministic() {
        let a = serde_json::to_string(&run_suite(Suite::Homogeneity, 20, 3)).unwrap();
        let b = serde_json::to_string(&run_suite(Suite::Homogeneity, 20, 3)).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn vacuous_scale_check_warns() {
        let fam = power_family().unwrap();
        let r = check_scale_axiom_on_grid(&fam, &[], 0, 1);
        assert!(r.passed);
        assert!(r.notes.iter().any(|n| n.contains("vacuously")));
    }

    #[test]
    fn witness_grid_too_small() {
        assert!(matches!(
            noncomparability_witness(&perturbed_identity(), 1, 0),
            Err(Error::Input(_))
        ));
    }

    #[test]
    fn comparable_generators_have_no_witness() {
        // Power means are ordered, so one direction never occurs.
        let g = Generator::with_domain(Expr::power(2.0), Interval::new(-0.5, 2.0).unwrap());
        let g = g.unwrap();
        assert!(matches!(
            noncomparability_witness(&g, 21, 0),
            Err(Error::WitnessNotFound(_))
        ));
    }
}
