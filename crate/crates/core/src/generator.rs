//! Generators of quasi-arithmetic means as expression trees.
//!
//! A [`Generator`] is a strictly monotone function on an open interval built
//! from a fixed set of primitives. Domains, ranges and the direction of
//! monotonicity are propagated exactly through composition, and every node
//! has a closed-form inverse except [`Expr::SineRamp`], which is inverted by
//! bracketed bisection.

use std::f64::consts::TAU;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::bisect::invert_monotone;
use crate::error::{Error, Result};
use crate::interval::Interval;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Monotonicity {
    Increasing,
    Decreasing,
}

impl Monotonicity {
    pub fn is_increasing(self) -> bool {
        matches!(self, Monotonicity::Increasing)
    }

    fn from_increasing(inc: bool) -> Self {
        if inc {
            Monotonicity::Increasing
        } else {
            Monotonicity::Decreasing
        }
    }
}

/// Expression tree over the primitive set.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "op", rename_all = "snake_case")]
pub enum Expr {
    Identity,
    /// `c1 * x + c0`, `c1 != 0`.
    Affine { c1: f64, c0: f64 },
    Ln,
    Exp,
    /// `x^beta` on `(0, inf)`, `beta != 0`.
    Power { beta: f64 },
    Negate,
    /// `x + amplitude * sin(2 pi x) / (2 pi)`, `|amplitude| < 1`.
    SineRamp { amplitude: f64 },
    /// `outer(inner(x))`.
    Compose { outer: Box<Expr>, inner: Box<Expr> },
}

impl Expr {
    pub fn affine(c1: f64, c0: f64) -> Expr {
        Expr::Affine { c1, c0 }
    }

    pub fn power(beta: f64) -> Expr {
        Expr::Power { beta }
    }

    /// `outer o inner`, dropping identities.
    pub fn compose(outer: Expr, inner: Expr) -> Expr {
        match (outer, inner) {
            (Expr::Identity, e) | (e, Expr::Identity) => e,
            (outer, inner) => Expr::Compose {
                outer: Box::new(outer),
                inner: Box::new(inner),
            },
        }
    }

    /// Check the parameter constraints of every node.
    pub fn validate(&self) -> Result<()> {
        match self {
            Expr::Affine { c1, c0 } => {
                if *c1 == 0.0 || !c1.is_finite() || !c0.is_finite() {
                    return Err(Error::Input(format!(
                        "affine needs finite c1 != 0 and finite c0, got c1 = {c1}, c0 = {c0}"
                    )));
                }
            }
            Expr::Power { beta } => {
                if *beta == 0.0 || !beta.is_finite() {
                    return Err(Error::Input(format!(
                        "power needs finite beta != 0, got {beta}"
                    )));
                }
            }
            Expr::SineRamp { amplitude } => {
                if amplitude.is_nan() || amplitude.abs() >= 1.0 {
                    return Err(Error::Input(format!(
                        "sine_ramp needs |amplitude| < 1 to stay strictly increasing, got {amplitude}"
                    )));
                }
            }
            Expr::Compose { outer, inner } => {
                outer.validate()?;
                inner.validate()?;
            }
            Expr::Identity | Expr::Ln | Expr::Exp | Expr::Negate => {}
        }
        Ok(())
    }

    pub fn is_increasing(&self) -> bool {
        match self {
            Expr::Identity | Expr::Ln | Expr::Exp | Expr::SineRamp { .. } => true,
            Expr::Negate => false,
            Expr::Affine { c1, .. } => *c1 > 0.0,
            Expr::Power { beta } => *beta > 0.0,
            Expr::Compose { outer, inner } => outer.is_increasing() == inner.is_increasing(),
        }
    }

    /// Largest open interval on which the expression is defined.
    pub fn natural_domain(&self) -> Option<Interval> {
        match self {
            Expr::Ln | Expr::Power { .. } => Some(Interval::POSITIVE),
            Expr::Compose { outer, inner } => {
                let inner_dom = inner.natural_domain()?;
                let outer_dom = outer.natural_domain()?;
                inner
                    .preimage(&outer_dom)
                    .and_then(|p| p.intersect(&inner_dom))
            }
            _ => Some(Interval::REAL),
        }
    }

    /// Evaluation on the extended reals; infinite arguments give the limits.
    pub fn eval_ext(&self, x: f64) -> f64 {
        match self {
            Expr::Identity => x,
            Expr::Affine { c1, c0 } => c1 * x + c0,
            Expr::Ln => x.ln(),
            Expr::Exp => x.exp(),
            Expr::Power { beta } => x.powf(*beta),
            Expr::Negate => -x,
            Expr::SineRamp { amplitude } => {
                if x.is_finite() {
                    x + amplitude * (TAU * x).sin() / TAU
                } else {
                    x
                }
            }
            Expr::Compose { outer, inner } => outer.eval_ext(inner.eval_ext(x)),
        }
    }

    /// Inverse on the extended reals, assuming `y` lies in the closure of the
    /// image of the natural domain.
    pub fn inverse_ext(&self, y: f64) -> Result<f64> {
        Ok(match self {
            Expr::Identity => y,
            Expr::Affine { c1, c0 } => (y - c0) / c1,
            Expr::Ln => y.exp(),
            Expr::Exp => y.ln(),
            Expr::Power { beta } => y.powf(beta.recip()),
            Expr::Negate => -y,
            Expr::SineRamp { .. } => {
                if !y.is_finite() {
                    y
                } else {
                    invert_monotone(|x| self.eval_ext(x), y, Interval::REAL, true)?
                }
            }
            Expr::Compose { outer, inner } => inner.inverse_ext(outer.inverse_ext(y)?)?,
        })
    }

    /// Image of an interval contained in the natural domain.
    pub fn image(&self, dom: &Interval) -> Option<Interval> {
        Interval::spanned(self.eval_ext(dom.lo()), self.eval_ext(dom.hi()))
    }

    /// `{x in natural domain : self(x) in target}`.
    pub fn preimage(&self, target: &Interval) -> Option<Interval> {
        let nat = self.natural_domain()?;
        let reachable = self.image(&nat)?.intersect(target)?;
        let a = self.inverse_ext(reachable.lo()).ok()?;
        let b = self.inverse_ext(reachable.hi()).ok()?;
        Interval::spanned(a, b)?.intersect(&nat)
    }

    fn has_closed_inverse(&self) -> bool {
        match self {
            Expr::SineRamp { .. } => false,
            Expr::Compose { outer, inner } => outer.has_closed_inverse() && inner.has_closed_inverse(),
            _ => true,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
struct GeneratorRepr {
    #[serde(flatten)]
    expr: Expr,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    domain: Option<Interval>,
}

/// A strictly monotone function on an open interval, with its range.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "GeneratorRepr", into = "GeneratorRepr")]
pub struct Generator {
    expr: Expr,
    domain: Interval,
    range: Interval,
    increasing: bool,
}

impl TryFrom<GeneratorRepr> for Generator {
    type Error = Error;

    fn try_from(repr: GeneratorRepr) -> Result<Self> {
        match repr.domain {
            Some(d) => Generator::with_domain(repr.expr, d),
            None => Generator::new(repr.expr),
        }
    }
}

impl From<Generator> for GeneratorRepr {
    fn from(g: Generator) -> Self {
        let natural = g.expr.natural_domain();
        let domain = if natural == Some(g.domain) {
            None
        } else {
            Some(g.domain)
        };
        GeneratorRepr {
            expr: g.expr,
            domain,
        }
    }
}

impl Generator {
    /// Generator on the natural domain of `expr`.
    pub fn new(expr: Expr) -> Result<Self> {
        expr.validate()?;
        let domain = expr.natural_domain().ok_or_else(|| {
            Error::DegenerateDomain("expression is defined nowhere on the real line".into())
        })?;
        Self::build(expr, domain)
    }

    /// Generator restricted to `domain` intersected with the natural domain.
    pub fn with_domain(expr: Expr, domain: Interval) -> Result<Self> {
        expr.validate()?;
        let natural = expr.natural_domain().ok_or_else(|| {
            Error::DegenerateDomain("expression is defined nowhere on the real line".into())
        })?;
        let domain = natural.intersect(&domain).ok_or_else(|| {
            Error::DegenerateDomain(format!(
                "requested domain {domain} misses the natural domain {natural}"
            ))
        })?;
        Self::build(expr, domain)
    }

    fn build(expr: Expr, domain: Interval) -> Result<Self> {
        let range = expr.image(&domain).ok_or_else(|| {
            Error::DegenerateDomain(format!("image of {domain} collapses to a point"))
        })?;
        let increasing = expr.is_increasing();
        Ok(Generator {
            expr,
            domain,
            range,
            increasing,
        })
    }

    pub fn identity() -> Self {
        Self::new(Expr::Identity).expect("identity is valid")
    }

    pub fn ln() -> Self {
        Self::new(Expr::Ln).expect("ln is valid")
    }

    pub fn exp() -> Self {
        Self::new(Expr::Exp).expect("exp is valid")
    }

    pub fn power(beta: f64) -> Result<Self> {
        Self::new(Expr::power(beta))
    }

    pub fn affine(c1: f64, c0: f64) -> Result<Self> {
        Self::new(Expr::affine(c1, c0))
    }

    pub fn expr(&self) -> &Expr {
        &self.expr
    }

    pub fn domain(&self) -> Interval {
        self.domain
    }

    pub fn range(&self) -> Interval {
        self.range
    }

    pub fn monotonicity(&self) -> Monotonicity {
        Monotonicity::from_increasing(self.increasing)
    }

    pub fn is_increasing(&self) -> bool {
        self.increasing
    }

    pub fn has_closed_inverse(&self) -> bool {
        self.expr.has_closed_inverse()
    }

    pub fn eval(&self, x: f64) -> Result<f64> {
        if !self.domain.contains(x) {
            return Err(Error::Domain {
                x,
                domain: self.domain,
            });
        }
        let y = self.expr.eval_ext(x);
        if !y.is_finite() {
            return Err(Error::Overflow(format!("generator value at {x} is {y}")));
        }
        Ok(y)
    }

    pub fn inverse(&self, y: f64) -> Result<f64> {
        if !self.range.contains(y) {
            return Err(Error::Range {
                y,
                range: self.range,
            });
        }
        self.expr.inverse_ext(y)
    }

    /// Same expression on a smaller domain.
    pub fn restrict(&self, domain: Interval) -> Result<Self> {
        let d = self.domain.intersect(&domain).ok_or_else(|| {
            Error::DegenerateDomain(format!("{domain} misses the generator domain {}", self.domain))
        })?;
        Self::build(self.expr.clone(), d)
    }

    /// `outer o self` on the part of the domain where it is defined.
    pub fn post_compose(&self, outer: Expr) -> Result<Self> {
        outer.validate()?;
        let outer_dom = outer.natural_domain().ok_or_else(|| {
            Error::DegenerateDomain("outer expression is defined nowhere".into())
        })?;
        let domain = self.preimage(&outer_dom).ok_or_else(|| {
            Error::DegenerateDomain(format!(
                "no point of {} maps into {outer_dom}",
                self.domain
            ))
        })?;
        Self::build(Expr::compose(outer, self.expr.clone()), domain)
    }

    /// Image of a subinterval of the domain.
    pub fn image(&self, sub: &Interval) -> Option<Interval> {
        let sub = sub.intersect(&self.domain)?;
        self.expr.image(&sub)
    }

    /// `{x in domain : self(x) in target}`.
    pub fn preimage(&self, target: &Interval) -> Option<Interval> {
        self.expr.preimage(target)?.intersect(&self.domain)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("generator serializes")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Input(format!("bad generator JSON: {e}")))
    }
}

impl fmt::Display for Generator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_json())
    }
}

/// The pair `(a, b)` with `g2 = a * g1 + b`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AffineWitness {
    pub a: f64,
    pub b: f64,
}

/// Decide whether `g2 = a * g1 + b` on the common domain by probing.
///
/// `(a, b)` is fitted from the two outermost probes of an evenly spaced grid
/// and must reproduce `g2` on every probe to `tol * max(1, |g2|)`.
pub fn is_affine_equivalent(
    g1: &Generator,
    g2: &Generator,
    probe_count: usize,
    tol: f64,
) -> Result<Option<AffineWitness>> {
    if probe_count < 3 {
        return Err(Error::Input(format!(
            "affine equivalence needs at least 3 probes, got {probe_count}"
        )));
    }
    let common = g1.domain().intersect(&g2.domain()).ok_or_else(|| {
        Error::DegenerateDomain(format!(
            "domains {} and {} do not overlap",
            g1.domain(),
            g2.domain()
        ))
    })?;
    let (lo, hi) = common.sampling_window();
    let step = (hi - lo) / (probe_count - 1) as f64;
    let mut probes = Vec::with_capacity(probe_count);
    for i in 0..probe_count {
        let x = lo + step * i as f64;
        probes.push((g1.eval(x)?, g2.eval(x)?));
    }
    let (u0, v0) = probes[0];
    let (u1, v1) = probes[probe_count - 1];
    let a = (v1 - v0) / (u1 - u0);
    let b = v0 - a * u0;
    if !a.is_finite() || a == 0.0 || !b.is_finite() {
        return Ok(None);
    }
    let fits = probes
        .iter()
        .all(|&(u, v)| (a * u + b - v).abs() <= tol * v.abs().max(1.0));
    Ok(fits.then_some(AffineWitness { a, b }))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn eval_examples() {
        assert_eq!(Generator::power(2.0).unwrap().eval(7.0).unwrap(), 49.0);
        assert_eq!(Generator::ln().eval(1.0).unwrap(), 0.0);
        assert_eq!(Generator::affine(3.0, 5.0).unwrap().eval(2.0).unwrap(), 11.0);
    }

    #[test]
    fn eval_outside_domain_reports_domain() {
        let err = Generator::ln().eval(0.0).unwrap_err();
        assert_eq!(
            err,
            Error::Domain {
                x: 0.0,
                domain: Interval::POSITIVE
            }
        );
        let g = Generator::with_domain(Expr::Identity, Interval::new(0.0, 1.0).unwrap()).unwrap();
        assert!(g.eval(1.0).is_err());
    }

    #[test]
    fn inverse_examples() {
        assert_eq!(Generator::power(2.0).unwrap().inverse(49.0).unwrap(), 7.0);
        assert_eq!(Generator::exp().inverse(1.0).unwrap(), 0.0);
        let g = Generator::new(Expr::compose(Expr::Ln, Expr::affine(1.0, 1.0))).unwrap();
        assert_eq!(g.domain(), Interval::new(-1.0, f64::INFINITY).unwrap());
        assert_eq!(g.inverse(0.0).unwrap(), 0.0);
    }

    #[test]
    fn inverse_outside_range() {
        let err = Generator::exp().inverse(-1.0).unwrap_err();
        assert!(matches!(err, Error::Range { .. }));
        let err = Generator::power(2.0).unwrap().inverse(0.0).unwrap_err();
        assert!(matches!(err, Error::Range { .. }));
    }

    #[test]
    fn monotonicity_examples() {
        assert_eq!(Generator::identity().monotonicity(), Monotonicity::Increasing);
        assert_eq!(
            Generator::new(Expr::Negate).unwrap().monotonicity(),
            Monotonicity::Decreasing
        );
        let g = Generator::new(Expr::compose(Expr::Negate, Expr::Ln)).unwrap();
        assert_eq!(g.monotonicity(), Monotonicity::Decreasing);
        assert_eq!(Generator::power(-1.0).unwrap().monotonicity(), Monotonicity::Decreasing);
    }

    #[test]
    fn ranges_propagate() {
        let g = Generator::power(-2.0).unwrap();
        assert_eq!(g.range(), Interval::POSITIVE);
        let g = Generator::new(Expr::compose(Expr::Exp, Expr::Negate)).unwrap();
        assert_eq!(g.range(), Interval::POSITIVE);
        let g = Generator::with_domain(Expr::affine(-2.0, 1.0), Interval::new(0.0, 1.0).unwrap())
            .unwrap();
        assert_eq!(g.range(), Interval::new(-1.0, 1.0).unwrap());
    }

    #[test]
    fn empty_composition_is_rejected() {
        // ln(-e^x) is defined nowhere.
        let e = Expr::compose(Expr::Ln, Expr::compose(Expr::Negate, Expr::Exp));
        assert!(matches!(Generator::new(e), Err(Error::DegenerateDomain(_))));
    }

    #[test]
    fn sine_ramp_uses_numeric_inverse() {
        let g = Generator::new(Expr::SineRamp { amplitude: 0.5 }).unwrap();
        assert!(!g.has_closed_inverse());
        for x in [-3.3, -0.25, 0.0, 0.1, 0.75, 12.4] {
            let y = g.eval(x).unwrap();
            let back = g.inverse(y).unwrap();
            assert!((back - x).abs() <= 1e-12 * x.abs().max(1.0), "{x} -> {back}");
        }
        assert!(Generator::new(Expr::SineRamp { amplitude: 1.0 }).is_err());
    }

    #[test]
    fn affine_equivalence_examples() {
        let id = Generator::identity();
        let w = is_affine_equivalent(&id, &Generator::affine(3.0, 5.0).unwrap(), 7, 1e-9)
            .unwrap()
            .unwrap();
        assert!((w.a - 3.0).abs() < 1e-12 && (w.b - 5.0).abs() < 1e-12);

        let cube = Generator::power(3.0).unwrap();
        assert!(is_affine_equivalent(&id, &cube, 7, 1e-9).unwrap().is_none());

        let ln = Generator::ln();
        let g2 = Generator::new(Expr::compose(Expr::affine(2.0, 1.0), Expr::Ln)).unwrap();
        let w = is_affine_equivalent(&ln, &g2, 7, 1e-9).unwrap().unwrap();
        assert!((w.a - 2.0).abs() < 1e-12 && (w.b - 1.0).abs() < 1e-12);
    }

    #[test]
    fn affine_equivalence_needs_overlap_and_probes() {
        let a = Generator::with_domain(Expr::Identity, Interval::new(0.0, 1.0).unwrap()).unwrap();
        let b = Generator::with_domain(Expr::Identity, Interval::new(2.0, 3.0).unwrap()).unwrap();
        assert!(matches!(
            is_affine_equivalent(&a, &b, 5, 1e-9),
            Err(Error::DegenerateDomain(_))
        ));
        assert!(matches!(is_affine_equivalent(&a, &a, 2, 1e-9), Err(Error::Input(_))));
    }

    #[test]
    fn json_shapes() {
        let g = Generator::from_json(
            r#"{"op":"compose","outer":{"op":"power","beta":2.0},"inner":{"op":"affine","c1":3,"c0":5}}"#,
        )
        .unwrap();
        assert_eq!(g.eval(1.0).unwrap(), 64.0);
        assert_eq!(g.domain(), Interval::new(-5.0 / 3.0, f64::INFINITY).unwrap());

        let g = Generator::from_json(r#"{"op":"identity","domain":[0,null]}"#).unwrap();
        assert_eq!(g.domain(), Interval::POSITIVE);
        assert_eq!(g.to_json(), r#"{"op":"identity","domain":[0.0,null]}"#);
        assert_eq!(Generator::ln().to_json(), r#"{"op":"ln"}"#);

        assert!(Generator::from_json(r#"{"op":"affine","c1":0,"c0":1}"#).is_err());
        assert!(Generator::from_json(r#"{"op":"power","beta":0}"#).is_err());
        assert!(Generator::from_json(r#"{"op":"bogus"}"#).is_err());
    }

    #[test]
    fn post_compose_shrinks_domain() {
        // (x - 2) on the reals, then a power: defined on (2, inf).
        let shifted = Generator::affine(1.0, -2.0).unwrap();
        let g = shifted.post_compose(Expr::power(2.0)).unwrap();
        assert_eq!(g.domain(), Interval::new(2.0, f64::INFINITY).unwrap());
        assert_eq!(g.eval(5.0).unwrap(), 9.0);
    }
}
