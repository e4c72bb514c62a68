//! Neutral maps `eta(x) = f^-1(a f(x) + b)` and their f-roots.
//!
//! A map of this form commutes with the quasi-arithmetic mean generated by
//! `f`: `M_f(eta(v), w) = eta(M_f(v, w))`. The k-th f-root of `eta` is the
//! unique map of the same form and monotonicity whose k-fold composition is
//! `eta`; its coefficients are `p = a^(1/k)` and
//! `q = b / (1 + p + ... + p^(k-1))`.

use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::generator::{is_affine_equivalent, Generator, Monotonicity};
use crate::interval::Interval;
use crate::mean::{mean, WeightedSample};

/// Deepest root ladder `root_sequence` will build.
pub const MAX_ROOT_DEPTH: usize = 12;

const REBASE_PROBES: usize = 9;
const REBASE_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq)]
pub struct NeutralMap {
    generator: Generator,
    a: f64,
    b: f64,
    domain: Interval,
}

impl NeutralMap {
    /// Build `x -> g^-1(a g(x) + b)` on its maximal domain.
    pub fn from_coeffs(g: &Generator, a: f64, b: f64) -> Result<Self> {
        if a == 0.0 || !a.is_finite() || !b.is_finite() {
            return Err(Error::Input(format!(
                "neutral map needs finite a != 0 and finite b, got a = {a}, b = {b}"
            )));
        }
        if a == 1.0 && b == 0.0 {
            return Err(Error::Input("(a, b) = (1, 0) is the identity map".into()));
        }
        let domain = maximal_domain(g, a, b)?;
        Ok(NeutralMap {
            generator: g.clone(),
            a,
            b,
            domain,
        })
    }

    pub fn generator(&self) -> &Generator {
        &self.generator
    }

    pub fn a(&self) -> f64 {
        self.a
    }

    pub fn b(&self) -> f64 {
        self.b
    }

    pub fn coeffs(&self) -> (f64, f64) {
        (self.a, self.b)
    }

    /// Maximal domain `{x : a f(x) + b in range(f)}`.
    pub fn domain(&self) -> Interval {
        self.domain
    }

    pub fn monotonicity(&self) -> Monotonicity {
        if self.a > 0.0 {
            Monotonicity::Increasing
        } else {
            Monotonicity::Decreasing
        }
    }

    /// `a = -1`, i.e. `eta o eta = id`.
    pub fn is_involution(&self) -> bool {
        self.a == -1.0
    }

    pub fn apply(&self, x: f64) -> Result<f64> {
        if !self.domain.contains(x) {
            return Err(Error::Domain {
                x,
                domain: self.domain,
            });
        }
        let y = self.a * self.generator.eval(x)? + self.b;
        self.generator.inverse(y)
    }

    /// Fixed point `f^-1(b / (1 - a))` when `a != 1` and it exists.
    pub fn fixed_point(&self) -> Option<f64> {
        if self.a == 1.0 {
            return None;
        }
        self.generator.inverse(self.b / (1.0 - self.a)).ok()
    }

    /// `{x in domain : eta(x) in target}`.
    pub fn preimage(&self, target: &Interval) -> Option<Interval> {
        let g = &self.generator;
        let reach = g.image(target)?;
        let shifted = Interval::spanned(
            (reach.lo() - self.b) / self.a,
            (reach.hi() - self.b) / self.a,
        )?;
        g.preimage(&shifted)?.intersect(&self.domain)
    }

    /// Coefficients of `self` re-expressed relative to `g`, which must be an
    /// affine image `c f + d` of this map's generator (or the reverse).
    pub fn rebased(&self, g: &Generator) -> Result<NeutralMap> {
        if *g == self.generator {
            return Ok(self.clone());
        }
        // self.generator = c g + d  =>  g(eta) = a g + (b + d (a - 1)) / c
        let w = is_affine_equivalent(g, &self.generator, REBASE_PROBES, REBASE_TOL)?
            .ok_or_else(|| {
                Error::Input(format!(
                    "generators {} and {} are not affinely related",
                    self.generator, g
                ))
            })?;
        let b = (self.b + w.b * (self.a - 1.0)) / w.a;
        NeutralMap::from_coeffs(g, self.a, b)
    }

    /// `self o inner`, relative to this map's generator.
    pub fn compose(&self, inner: &NeutralMap) -> Result<NeutralMap> {
        let inner = inner.rebased(&self.generator)?;
        let a = self.a * inner.a;
        let b = self.a * inner.b + self.b;
        NeutralMap::from_coeffs(&self.generator, a, b)
    }

    /// The unique neutral `m` of the same monotonicity with `m^k = self`.
    pub fn kth_root(&self, k: u32) -> Result<NeutralMap> {
        if k == 0 {
            return Err(Error::Input("root order must be at least 1".into()));
        }
        if k == 1 {
            return Ok(self.clone());
        }
        if self.a < 0.0 && k.is_multiple_of(2) {
            return Err(Error::NoRoot { a: self.a, k });
        }
        let magnitude = if k == 3 {
            self.a.abs().cbrt()
        } else {
            self.a.abs().powf(1.0 / f64::from(k))
        };
        let p = magnitude.copysign(self.a);
        // 1 + p + ... + p^(k-1); equals (a - 1) / (p - 1) away from a = 1.
        let mut geometric = 0.0;
        let mut term = 1.0;
        for _ in 0..k {
            geometric += term;
            term *= p;
        }
        let q = self.b / geometric;
        NeutralMap::from_coeffs(&self.generator, p, q)
    }

    /// `eta_1, ..., eta_depth` with `eta_i` the cube root of `eta_(i-1)`.
    pub fn root_sequence(&self, depth: usize) -> Result<Vec<NeutralMap>> {
        if depth == 0 || depth > MAX_ROOT_DEPTH {
            return Err(Error::Input(format!(
                "root depth must be in 1..={MAX_ROOT_DEPTH}, got {depth}"
            )));
        }
        let mut out: Vec<NeutralMap> = Vec::with_capacity(depth);
        for _ in 0..depth {
            let next = out.last().unwrap_or(self).kth_root(3)?;
            out.push(next);
        }
        Ok(out)
    }
}

fn maximal_domain(g: &Generator, a: f64, b: f64) -> Result<Interval> {
    let range = g.range();
    let degenerate = || {
        Error::DegenerateDomain(format!(
            "no x in {} has {a} f(x) + {b} inside the range {range}",
            g.domain()
        ))
    };
    let pulled = Interval::spanned((range.lo() - b) / a, (range.hi() - b) / a)
        .and_then(|j| j.intersect(&range))
        .ok_or_else(degenerate)?;
    g.preimage(&pulled).ok_or_else(degenerate)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct NeutralityCheck {
    pub holds: bool,
    /// Largest `|M(eta(v)) - eta(M(v))| / max(1, |eta(M(v))|)` seen.
    pub worst_residual: f64,
    pub trials: usize,
}

/// Test `M_g(eta(v), w) = eta(M_g(v, w))` on seeded random samples of sizes
/// 2 to 6 drawn from the part of the common domain that `eta` keeps inside
/// `domain(g)`.
pub fn is_neutral_for(
    n: &NeutralMap,
    g: &Generator,
    trials: usize,
    tol: f64,
    seed: u64,
) -> Result<NeutralityCheck> {
    let region = n
        .domain()
        .intersect(&g.domain())
        .and_then(|d| n.preimage(&g.domain()).and_then(|p| p.intersect(&d)))
        .ok_or_else(|| {
            Error::DegenerateDomain(format!(
                "no room to sample: eta domain {} vs generator domain {}",
                n.domain(),
                g.domain()
            ))
        })?;
    let (lo, hi) = region.sampling_window();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst = 0.0_f64;
    for _ in 0..trials {
        let s = random_sample(&mut rng, lo, hi)?;
        let moved = s.map_values(|v| n.apply(v))?;
        let lhs = mean(g, &moved)?;
        let rhs = n.apply(mean(g, &s)?)?;
        let residual = (lhs - rhs).abs() / rhs.abs().max(1.0);
        worst = worst.max(residual);
    }
    Ok(NeutralityCheck {
        holds: worst <= tol,
        worst_residual: worst,
        trials,
    })
}

/// Sample of 2 to 6 values uniform in `[lo, hi]` with random positive weights.
pub(crate) fn random_sample(rng: &mut ChaCha8Rng, lo: f64, hi: f64) -> Result<WeightedSample> {
    let n = rng.random_range(2..=6usize);
    let values: Vec<f64> = (0..n).map(|_| rng.random_range(lo..=hi)).collect();
    let raw: Vec<f64> = (0..n).map(|_| rng.random_range(0.05..1.0)).collect();
    let total: f64 = raw.iter().sum();
    WeightedSample::new(values, raw.into_iter().map(|w| w / total).collect())
}
