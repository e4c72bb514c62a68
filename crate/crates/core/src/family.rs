//! One-parameter generator families invariant under a neutral map and all of
//! its f-roots.
//!
//! For `eta(x) = f^-1(a f(x) + b)`:
//!
//! * `a = 1` (translation case) gives `{exp(beta f)} u {f}`;
//! * `a != 1` (scaling case) gives, with `f~ = f + b / (a - 1)`, the families
//!   `{(f~)^beta} u {ln f~}` where `f~ > 0` and `{(-f~)^beta} u {ln(-f~)}`
//!   where `f~ < 0`.
//!
//! `beta = 0` is the logarithmic (scaling) or plain (translation) member, so
//! every real `beta` indexes a generator.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Extreme, Result};
use crate::generator::{Expr, Generator, Monotonicity};
use crate::interval::Interval;
use crate::mean::{power_mean, weighted_log_sum_exp, WeightedSample};
use crate::neutral::NeutralMap;

/// Beyond this `|beta|` `mean_at` reports the limiting extreme.
pub const BETA_CAP: f64 = 1e6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FamilyCase {
    Scaling,
    Translation,
}

/// Sign region of the shifted generator a scaling family lives on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Branch {
    Positive,
    Negative,
}

/// A family member's mean, or the extreme it tends to for huge `|beta|`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ScaleValue {
    Mean(f64),
    Limit(Extreme),
}

impl ScaleValue {
    /// Numeric value, reading a limit flag as the sample extreme.
    pub fn resolve(self, s: &WeightedSample) -> f64 {
        match self {
            ScaleValue::Mean(m) => m,
            ScaleValue::Limit(Extreme::Min) => s.min(),
            ScaleValue::Limit(Extreme::Max) => s.max(),
        }
    }

    pub fn mean(self) -> Option<f64> {
        match self {
            ScaleValue::Mean(m) => Some(m),
            ScaleValue::Limit(_) => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScaleFamily {
    case: FamilyCase,
    branch: Option<Branch>,
    neutral: NeutralMap,
    shift: f64,
    /// Scaling: `+-f~`, positive on the branch domain. Translation: `f`.
    base: Generator,
}

/// Build the invariant families of `n`, re-expressed relative to `g`.
///
/// Returns one translation family when `a = 1`, otherwise one scaling family
/// per nonempty sign region of `f~`.
pub fn build(g: &Generator, n: &NeutralMap) -> Result<Vec<ScaleFamily>> {
    let n = n.rebased(g)?;
    let (a, b) = n.coeffs();
    if n.is_involution() {
        return Err(Error::ExcludedInvolution);
    }
    if a == 1.0 {
        if b == 0.0 {
            return Err(Error::Input("(a, b) = (1, 0) is the identity map".into()));
        }
        return Ok(vec![ScaleFamily {
            case: FamilyCase::Translation,
            branch: None,
            neutral: n,
            shift: 0.0,
            base: g.clone(),
        }]);
    }
    if a < 0.0 {
        return Err(Error::Input(format!(
            "a = {a} < 0: even-order f-roots do not exist, so no root-invariant scale can be built"
        )));
    }
    let shift = b / (a - 1.0);
    let shifted = if shift == 0.0 {
        g.clone()
    } else {
        g.post_compose(Expr::affine(1.0, shift))?
    };
    let mut out = Vec::with_capacity(2);
    for branch in [Branch::Positive, Branch::Negative] {
        let signed = match branch {
            Branch::Positive => shifted.clone(),
            Branch::Negative => shifted.post_compose(Expr::Negate)?,
        };
        if let Some(dom) = signed.preimage(&Interval::POSITIVE) {
            out.push(ScaleFamily {
                case: FamilyCase::Scaling,
                branch: Some(branch),
                neutral: n.clone(),
                shift,
                base: signed.restrict(dom)?,
            });
        }
    }
    if out.is_empty() {
        return Err(Error::DegenerateDomain(format!(
            "shifted generator f + {shift} never leaves zero"
        )));
    }
    Ok(out)
}

impl ScaleFamily {
    pub fn case(&self) -> FamilyCase {
        self.case
    }

    pub fn branch(&self) -> Option<Branch> {
        self.branch
    }

    /// The neutral map the family is invariant under.
    pub fn neutral(&self) -> &NeutralMap {
        &self.neutral
    }

    /// The generator `f` the family was built from.
    pub fn generator(&self) -> &Generator {
        self.neutral.generator()
    }

    /// `b / (a - 1)` in the scaling case, zero otherwise.
    pub fn shift(&self) -> f64 {
        self.shift
    }

    pub fn base(&self) -> &Generator {
        &self.base
    }

    /// Where every member is defined.
    pub fn domain(&self) -> Interval {
        self.base.domain()
    }

    /// Direction of `beta -> mean` on non-constant samples.
    pub fn direction(&self) -> Monotonicity {
        self.base.monotonicity()
    }

    /// Extreme approached as `beta -> +inf` (`upper`) or `-inf`.
    pub fn limit(&self, upper: bool) -> Extreme {
        if upper == self.base.is_increasing() {
            Extreme::Max
        } else {
            Extreme::Min
        }
    }

    pub fn generator_at(&self, beta: f64) -> Result<Generator> {
        if !beta.is_finite() {
            return Err(Error::Input(format!("beta must be finite, got {beta}")));
        }
        match (self.case, beta == 0.0) {
            (FamilyCase::Scaling, true) => self.base.post_compose(Expr::Ln),
            (FamilyCase::Scaling, false) => self.base.post_compose(Expr::power(beta)),
            (FamilyCase::Translation, true) => Ok(self.base.clone()),
            (FamilyCase::Translation, false) => self
                .base
                .post_compose(Expr::compose(Expr::Exp, Expr::affine(beta, 0.0))),
        }
    }

    /// Mean of the member at `beta`, evaluated in the log domain.
    pub fn mean_at(&self, beta: f64, s: &WeightedSample) -> Result<ScaleValue> {
        if beta.is_nan() {
            return Err(Error::Input("beta is NaN".into()));
        }
        let inner = s.map_values(|v| self.base.eval(v))?;
        if beta.abs() > BETA_CAP {
            return Ok(ScaleValue::Limit(self.limit(beta > 0.0)));
        }
        let (lo, hi) = (inner.min(), inner.max());
        let combined = match self.case {
            FamilyCase::Scaling => power_mean(beta, &inner)?,
            FamilyCase::Translation => {
                let raw = if beta == 0.0 {
                    inner.values().iter().zip(inner.weights()).map(|(y, w)| w * y).sum()
                } else {
                    weighted_log_sum_exp(beta, inner.values(), inner.weights()) / beta
                };
                raw.clamp(lo, hi)
            }
        };
        let m = if combined <= lo {
            // Exact extremes avoid an inverse round trip on constant samples.
            value_at(s, &inner, lo)
        } else if combined >= hi {
            value_at(s, &inner, hi)
        } else {
            self.base.inverse(combined)?
        };
        Ok(ScaleValue::Mean(m.clamp(s.min(), s.max())))
    }

    /// First `depth` f-roots of the neutral map and the part of the family
    /// domain on which all of them are defined.
    pub fn root_ladder_domain(&self, depth: usize) -> Result<Interval> {
        let mut dom = self.domain().intersect(&self.neutral.domain());
        for r in self.neutral.root_sequence(depth)? {
            dom = dom.and_then(|d| d.intersect(&r.domain()));
        }
        dom.ok_or_else(|| {
            Error::DegenerateDomain(format!(
                "the first {depth} f-roots have no common domain inside {}",
                self.domain()
            ))
        })
    }

    pub fn to_spec(&self) -> FamilySpec {
        FamilySpec {
            case: self.case,
            generator: self.generator().clone(),
            a: self.neutral.a(),
            b: self.neutral.b(),
            branch: self.branch,
        }
    }

    pub fn from_spec(spec: &FamilySpec) -> Result<Self> {
        let n = NeutralMap::from_coeffs(&spec.generator, spec.a, spec.b)?;
        let mut families = build(&spec.generator, &n)?;
        let pick = families
            .iter()
            .position(|f| spec.branch.is_none() || f.branch == spec.branch)
            .ok_or_else(|| {
                Error::Input(format!("branch {:?} is empty for this generator", spec.branch))
            })?;
        let fam = families.swap_remove(pick);
        if fam.case != spec.case {
            return Err(Error::Input(format!(
                "coefficients give a {:?} family, not {:?}",
                fam.case, spec.case
            )));
        }
        Ok(fam)
    }
}

// Values whose base value equals `target`, used only for exact extremes.
fn value_at(s: &WeightedSample, inner: &WeightedSample, target: f64) -> f64 {
    s.values()
        .iter()
        .zip(inner.values())
        .find(|(_, &y)| y == target)
        .map(|(&v, _)| v)
        .unwrap_or(f64::NAN)
}

/// Serialized form of a family: `{case, generator, a, b, branch}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FamilySpec {
    pub case: FamilyCase,
    pub generator: Generator,
    pub a: f64,
    pub b: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub branch: Option<Branch>,
}

impl Serialize for ScaleFamily {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        self.to_spec().serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for ScaleFamily {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let spec = FamilySpec::deserialize(deserializer)?;
        ScaleFamily::from_spec(&spec).map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mean::mean;

    fn half(a: f64, b: f64) -> WeightedSample {
        WeightedSample::new(vec![a, b], vec![0.5, 0.5]).unwrap()
    }

    fn power_family() -> ScaleFamily {
        let g = Generator::with_domain(Expr::Identity, Interval::POSITIVE).unwrap();
        let n = NeutralMap::from_coeffs(&g, 2.0, 0.0).unwrap();
        let mut fams = build(&g, &n).unwrap();
        assert_eq!(fams.len(), 1);
        fams.remove(0)
    }

    fn translation_family() -> ScaleFamily {
        let g = Generator::identity();
        let n = NeutralMap::from_coeffs(&g, 1.0, 1.0).unwrap();
        build(&g, &n).unwrap().remove(0)
    }

    #[test]
    fn translation_case() {
        let fam = translation_family();
        assert_eq!(fam.case(), FamilyCase::Translation);
        assert_eq!(fam.generator_at(0.0).unwrap().expr(), &Expr::Identity);
        let e = fam.generator_at(1.0).unwrap();
        assert_eq!(e.expr(), &Expr::compose(Expr::Exp, Expr::affine(1.0, 0.0)));
        assert!((e.eval(1.0).unwrap() - 1f64.exp()).abs() < 1e-15);
        assert_eq!(fam.mean_at(0.0, &half(1.0, 3.0)).unwrap(), ScaleValue::Mean(2.0));
    }

    #[test]
    fn power_mean_case() {
        let fam = power_family();
        assert_eq!(fam.case(), FamilyCase::Scaling);
        assert_eq!(fam.branch(), Some(Branch::Positive));
        assert_eq!(fam.domain(), Interval::POSITIVE);
        assert_eq!(fam.generator_at(0.0).unwrap().expr(), &Expr::Ln);
        assert_eq!(fam.generator_at(2.0).unwrap().expr(), &Expr::power(2.0));
        let m = fam.mean_at(2.0, &half(1.0, 7.0)).unwrap().mean().unwrap();
        assert!((m - 5.0).abs() < 1e-14);
        let m = fam.mean_at(0.0, &half(2.0, 8.0)).unwrap().mean().unwrap();
        assert!((m - 4.0).abs() < 1e-14);
    }

    #[test]
    fn sign_changing_shift_gives_two_branches() {
        let g = Generator::identity();
        let n = NeutralMap::from_coeffs(&g, 2.0, -2.0).unwrap();
        let fams = build(&g, &n).unwrap();
        assert_eq!(fams.len(), 2);
        assert_eq!(fams[0].shift(), -2.0);
        assert_eq!(fams[0].domain(), Interval::new(2.0, f64::INFINITY).unwrap());
        assert_eq!(fams[1].domain(), Interval::new(f64::NEG_INFINITY, 2.0).unwrap());
        let sq = fams[0].generator_at(2.0).unwrap();
        assert_eq!(sq.eval(5.0).unwrap(), 9.0);
        let sq = fams[1].generator_at(2.0).unwrap();
        assert_eq!(sq.eval(-1.0).unwrap(), 9.0);
        assert_eq!(fams[1].direction(), Monotonicity::Decreasing);
    }

    #[test]
    fn build_errors() {
        let g = Generator::identity();
        let inv = NeutralMap::from_coeffs(&g, -1.0, 3.0).unwrap();
        assert_eq!(build(&g, &inv).unwrap_err(), Error::ExcludedInvolution);
        let neg = NeutralMap::from_coeffs(&g, -2.0, 0.0).unwrap();
        assert!(matches!(build(&g, &neg), Err(Error::Input(_))));
        let other = NeutralMap::from_coeffs(&Generator::exp(), 2.0, 0.0).unwrap();
        assert!(matches!(build(&g, &other), Err(Error::Input(_))));
    }

    #[test]
    fn stable_mean_agrees_with_literal_mean() {
        let fam = power_family();
        let s = WeightedSample::new(vec![0.3, 2.0, 9.0], vec![0.2, 0.5, 0.3]).unwrap();
        for beta in [-3.0, -1.0, 0.0, 0.5, 4.0] {
            let stable = fam.mean_at(beta, &s).unwrap().mean().unwrap();
            let literal = mean(&fam.generator_at(beta).unwrap(), &s).unwrap();
            assert!((stable - literal).abs() <= 1e-12 * literal, "{beta}");
        }
        let fam = translation_family();
        let s = WeightedSample::new(vec![-1.0, 0.5, 3.0], vec![0.2, 0.5, 0.3]).unwrap();
        for beta in [-3.0, -1.0, 0.0, 0.5, 4.0] {
            let stable = fam.mean_at(beta, &s).unwrap().mean().unwrap();
            let literal = mean(&fam.generator_at(beta).unwrap(), &s).unwrap();
            assert!((stable - literal).abs() <= 1e-12 * literal.abs().max(1.0), "{beta}");
        }
    }

    #[test]
    fn huge_beta_reports_limit() {
        let fam = power_family();
        let s = half(1.0, 7.0);
        assert_eq!(fam.mean_at(2e6, &s).unwrap(), ScaleValue::Limit(Extreme::Max));
        assert_eq!(fam.mean_at(-2e6, &s).unwrap(), ScaleValue::Limit(Extreme::Min));
        assert_eq!(fam.mean_at(2e6, &s).unwrap().resolve(&s), 7.0);
        // Large but finite beta does not overflow.
        let m = fam.mean_at(1e5, &half(1e8, 1.0)).unwrap().mean().unwrap();
        assert!(m.is_finite() && m > 0.99 * 1e8);
    }

    #[test]
    fn mean_at_rejects_values_off_branch() {
        let fam = power_family();
        assert!(matches!(fam.mean_at(1.0, &half(-1.0, 2.0)), Err(Error::Domain { .. })));
    }

    #[test]
    fn spec_round_trip() {
        let g = Generator::identity();
        let n = NeutralMap::from_coeffs(&g, 2.0, -2.0).unwrap();
        let fam = build(&g, &n).unwrap().remove(1);
        let text = serde_json::to_string(&fam).unwrap();
        assert_eq!(
            text,
            r#"{"case":"scaling","generator":{"op":"identity"},"a":2.0,"b":-2.0,"branch":"negative"}"#
        );
        let back: ScaleFamily = serde_json::from_str(&text).unwrap();
        assert_eq!(back, fam);
        let wrong = r#"{"case":"translation","generator":{"op":"identity"},"a":2.0,"b":0.0}"#;
        assert!(serde_json::from_str::<ScaleFamily>(wrong).is_err());
    }

    #[test]
    fn root_ladder_domain_on_bounded_interval() {
        let unit = Generator::with_domain(Expr::Identity, Interval::new(0.0, 1.0).unwrap()).unwrap();
        let n = NeutralMap::from_coeffs(&unit, 2.0, 0.0).unwrap();
        let fam = build(&unit, &n).unwrap().remove(0);
        assert_eq!(fam.root_ladder_domain(4).unwrap(), Interval::new(0.0, 0.5).unwrap());
    }
}
