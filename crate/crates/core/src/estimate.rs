//! Estimating the sybil share from a uniformly sampled voter inspection.
//!
//! Inspecting k voters and finding s sybils gives a binomial picture of the
//! true share. The upper bound is the smallest z whose binomial lower tail
//! at s drops to the requested probability, found by bisection and rounded
//! up onto a fixed grid so the tail guarantee survives the rounding.

use serde::{Deserialize, Serialize};

use crate::error::Error;
use crate::exact::Rational;
use crate::threshold::SigmaBound;

/// Outcome of inspecting a uniform sample of voters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct InspectionSample {
    /// Voters inspected.
    pub sample_size: u64,
    /// Inspected voters identified as sybils.
    pub sybils_observed: u64,
    /// Acceptable probability that the true share exceeds the bound.
    pub confidence: f64,
}

impl InspectionSample {
    pub fn new(sample_size: u64, sybils_observed: u64, confidence: f64) -> Result<Self, Error> {
        if sample_size == 0 {
            return Err(Error::InvalidSample("sample size must be at least 1".into()));
        }
        if sybils_observed > sample_size {
            return Err(Error::InvalidSample(format!(
                "observed {sybils_observed} sybils in a sample of {sample_size}"
            )));
        }
        if !(confidence > 0.0 && confidence < 1.0) {
            return Err(Error::InvalidTailProbability(confidence));
        }
        Ok(Self {
            sample_size,
            sybils_observed,
            confidence,
        })
    }

    // Fields are public, so rules re-check them on entry.
    fn validate(&self) -> Result<(), Error> {
        Self::new(self.sample_size, self.sybils_observed, self.confidence).map(|_| ())
    }
}

/// `Pr[Bin(k, z) <= s]`, evaluated in log space term by term.
pub fn binomial_lower_tail(k: u64, s: u64, z: f64) -> f64 {
    assert!(s <= k && (0.0..=1.0).contains(&z));
    if z == 0.0 {
        return 1.0;
    }
    if z == 1.0 {
        return if s == k { 1.0 } else { 0.0 };
    }
    // ln(i!) for i = 0..=k.
    let mut ln_fact = Vec::with_capacity(k as usize + 1);
    ln_fact.push(0.0f64);
    for i in 1..=k {
        ln_fact.push(ln_fact[i as usize - 1] + (i as f64).ln());
    }
    let ln_z = z.ln();
    // ln(1 - z) without cancellation for small z.
    let ln_1z = (-z).ln_1p();
    let mut sum = 0.0f64;
    for i in 0..=s {
        let ln_term = ln_fact[k as usize] - ln_fact[i as usize] - ln_fact[(k - i) as usize]
            + i as f64 * ln_z
            + (k - i) as f64 * ln_1z;
        sum += ln_term.exp();
    }
    sum.min(1.0)
}

/// Resolution of the returned bound: bisection stops once the bracket is
/// this narrow, and the result is rounded up to a multiple of it.
const GRID: i128 = 1_000_000_000;

/// Smallest share z (on the grid, rounded up) such that observing at most
/// `s` sybils among `k` would have probability `<= p` if the true share
/// were z. Returns 1 when every sampled voter was a sybil.
pub fn sigma_upper_bound(sample: InspectionSample) -> Result<SigmaBound, Error> {
    sample.validate()?;
    let (k, s, p) = (sample.sample_size, sample.sybils_observed, sample.confidence);
    if s == k {
        return Ok(SigmaBound::new(Rational::one()).expect("1 is a valid share"));
    }
    // binomial_lower_tail is decreasing in z, 1 at z=0 and 0 at z=1.
    let mut lo = 0.0f64;
    let mut hi = 1.0f64;
    while hi - lo > 0.5 / GRID as f64 {
        let mid = 0.5 * (lo + hi);
        if binomial_lower_tail(k, s, mid) <= p {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    let steps = ((hi * GRID as f64).ceil() as i128).min(GRID);
    Ok(SigmaBound::new(Rational::new(steps, GRID)?).expect("grid value lies in [0, 1]"))
}

/// The sampled fraction plus a chosen margin, clamped to 1. Exact: with a
/// zero margin this is the rational `s/k` itself.
pub fn sigma_point_plus_margin(
    sample: InspectionSample,
    epsilon: Rational,
) -> Result<SigmaBound, Error> {
    sample.validate()?;
    if epsilon.is_negative() {
        return Err(Error::InvalidSample("margin must be nonnegative".into()));
    }
    let point = Rational::new(sample.sybils_observed as i128, sample.sample_size as i128)?;
    let estimate = point + epsilon;
    let clamped = if estimate > Rational::one() {
        Rational::one()
    } else {
        estimate
    };
    Ok(SigmaBound::new(clamped).expect("clamped to [0, 1]"))
}
