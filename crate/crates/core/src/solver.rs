//! Inverting the scale map `beta -> mean_at(beta, s)`.

use crate::error::{Error, Result};
use crate::family::{ScaleFamily, BETA_CAP};
use crate::mean::WeightedSample;

pub const DEFAULT_TOL: f64 = 1e-9;
pub const MAX_ITERATIONS: usize = 500;

/// Relative bracket width at which bisection stops.
const BETA_REL_WIDTH: f64 = 1e-12;

/// Find `beta` with `|mean_at(beta, s) - target| <= tol * max(1, |target|)`.
///
/// The direction of the scale is read off two probes at `beta = -1, 1`, the
/// bracket `[-1, 1]` is doubled until it straddles the target, and then
/// bisected. Bisection also stops once the bracket is narrower than
/// `1e-12 * max(1, |beta|)`, which covers floating-point plateaus.
pub fn solve(fam: &ScaleFamily, s: &WeightedSample, target: f64, tol: f64) -> Result<f64> {
    if s.is_constant() {
        return Err(Error::Input(
            "sample is constant; every member has the same mean".into(),
        ));
    }
    let (lo_v, hi_v) = (s.min(), s.max());
    if !(lo_v < target && target < hi_v) {
        return Err(Error::TargetOutOfRange {
            target,
            lo: lo_v,
            hi: hi_v,
        });
    }
    if tol.is_nan() || tol <= 0.0 {
        return Err(Error::Input(format!("tolerance must be positive, got {tol}")));
    }

    let eval = |beta: f64| -> Result<f64> { Ok(fam.mean_at(beta, s)?.resolve(s)) };
    let scale = tol * target.abs().max(1.0);

    let m_lo = eval(-1.0)?;
    let m_hi = eval(1.0)?;
    let increasing = if m_lo == m_hi {
        fam.direction().is_increasing()
    } else {
        m_lo < m_hi
    };
    // Signed gap, increasing in beta.
    let gap = |m: f64| if increasing { m - target } else { target - m };

    let (mut lo, mut hi) = (-1.0_f64, 1.0_f64);
    let (mut g_lo, mut g_hi) = (gap(m_lo), gap(m_hi));
    while g_hi < 0.0 {
        lo = hi;
        g_lo = g_hi;
        hi *= 2.0;
        if hi > BETA_CAP {
            return Err(Error::NearExtreme {
                extreme: fam.limit(true),
                beta_cap: BETA_CAP,
            });
        }
        g_hi = gap(eval(hi)?);
    }
    while g_lo > 0.0 {
        hi = lo;
        g_hi = g_lo;
        lo *= 2.0;
        if lo < -BETA_CAP {
            return Err(Error::NearExtreme {
                extreme: fam.limit(false),
                beta_cap: BETA_CAP,
            });
        }
        g_lo = gap(eval(lo)?);
    }
    if g_lo.abs() <= scale {
        return Ok(lo);
    }
    if g_hi.abs() <= scale {
        return Ok(hi);
    }

    for _ in 0..MAX_ITERATIONS {
        let mid = 0.5 * (lo + hi);
        let g_mid = gap(eval(mid)?);
        if g_mid.abs() <= scale {
            return Ok(mid);
        }
        if g_mid < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo <= BETA_REL_WIDTH * mid.abs().max(1.0) {
            return Ok(0.5 * (lo + hi));
        }
    }
    Err(Error::Convergence {
        iterations: MAX_ITERATIONS,
        context: format!("scale inversion for target {target}"),
    })
}

/// `(beta, mean)` pairs in input order; limit flags resolve to the extreme.
pub fn sweep(fam: &ScaleFamily, s: &WeightedSample, betas: &[f64]) -> Result<Vec<(f64, f64)>> {
    betas
        .iter()
        .map(|&beta| Ok((beta, fam.mean_at(beta, s)?.resolve(s))))
        .collect()
}
