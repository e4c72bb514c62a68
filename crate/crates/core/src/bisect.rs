//! Bracketed bisection for monotone scalar functions.

use crate::error::{Error, Result};
use crate::interval::Interval;

pub(crate) const GROWTH_CAP: usize = 200;
pub(crate) const BISECTION_CAP: usize = 200;

/// Relative bracket width at which the inverse is accepted.
const X_REL_TOL: f64 = 1e-13;

/// Solve `f(x) = target` for a strictly monotone `f` on `domain`.
///
/// The bracket is grown geometrically from an interior seed, doubling the
/// step on unbounded sides and halving the gap to a finite endpoint, then
/// bisected until it is narrower than `1e-13 * max(1, |x|)`.
pub(crate) fn invert_monotone<F>(f: F, target: f64, domain: Interval, increasing: bool) -> Result<f64>
where
    F: Fn(f64) -> f64,
{
    let sign = if increasing { 1.0 } else { -1.0 };
    let g = |x: f64| sign * f(x);
    let t = sign * target;

    let seed = domain.interior_point();
    let g_seed = g(seed);
    if g_seed == t {
        return Ok(seed);
    }
    let upward = g_seed < t;

    let mut inner = seed;
    let mut outer = seed;
    let mut step = seed.abs().max(1.0);
    let mut bracketed = false;
    for _ in 0..GROWTH_CAP {
        let candidate = if upward {
            if domain.hi().is_finite() {
                0.5 * (outer + domain.hi())
            } else {
                outer + step
            }
        } else if domain.lo().is_finite() {
            0.5 * (outer + domain.lo())
        } else {
            outer - step
        };
        if candidate == outer {
            break;
        }
        step *= 2.0;
        let gc = g(candidate);
        if (upward && gc >= t) || (!upward && gc <= t) {
            inner = outer;
            outer = candidate;
            bracketed = true;
            break;
        }
        outer = candidate;
    }
    if !bracketed {
        return Err(Error::Convergence {
            iterations: GROWTH_CAP,
            context: format!("could not bracket preimage of {target} in {domain}"),
        });
    }

    let (mut lo, mut hi) = if upward { (inner, outer) } else { (outer, inner) };
    for _ in 0..BISECTION_CAP {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            return Ok(mid);
        }
        let gm = g(mid);
        if gm == t {
            return Ok(mid);
        }
        if gm < t {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo <= X_REL_TOL * mid.abs().max(1.0) {
            return Ok(0.5 * (lo + hi));
        }
    }
    Err(Error::Convergence {
        iterations: BISECTION_CAP,
        context: format!("bisection for preimage of {target} did not narrow"),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cube_root_by_bisection() {
        let x = invert_monotone(|x| x * x * x, 27.0, Interval::REAL, true).unwrap();
        assert!((x - 3.0).abs() < 1e-12);
        let x = invert_monotone(|x| x * x * x, -1e9, Interval::REAL, true).unwrap();
        assert!((x + 1e3).abs() < 1e-9);
    }

    #[test]
    fn decreasing_on_bounded_domain() {
        let dom = Interval::new(0.0, 1.0).unwrap();
        let x = invert_monotone(|x| 1.0 / x, 1e6, dom, false).unwrap();
        assert!((x - 1e-6).abs() < 1e-13);
    }

    #[test]
    fn unreachable_target_fails() {
        let dom = Interval::new(0.0, 1.0).unwrap();
        let err = invert_monotone(|x| x, 5.0, dom, true).unwrap_err();
        assert!(matches!(err, Error::Convergence { .. }));
    }
}
