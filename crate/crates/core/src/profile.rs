//! Synthetic hourly profiles for data-center workload and clear-sky PV.

use alloc::vec::Vec;
use core::f64::consts::PI;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ProfileError {
    #[error("daily energy {energy} is infeasible for valley {valley} / peak {peak} over {horizon} h (mean {mean})")]
    InfeasibleEnergy {
        energy: f64,
        valley: f64,
        peak: f64,
        horizon: usize,
        mean: f64,
    },
    #[error("invalid daylight window [{sunrise}, {sunset}] for horizon {horizon}")]
    InvalidWindow { sunrise: f64, sunset: f64, horizon: usize },
    #[error("invalid profile parameter: {0}")]
    InvalidParameter(&'static str),
    #[error("shares sum to {0}, expected 1")]
    SharesDoNotSumToOne(f64),
    #[error("share for bus {0} is negative")]
    NegativeShare(u32),
}

/// Where the diurnal data-center template bottoms out and peaks.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DiurnalShape {
    pub valley_hour: usize,
    pub peak_hour: usize,
}

impl DiurnalShape {
    /// Valley at hour 4 and peak at hour 20 of a 24 h day, scaled to `horizon`.
    pub fn default_for(horizon: usize) -> Self {
        let scale = |h: usize| ((h * horizon) as f64 / 24.0 + 0.5) as usize % horizon.max(1);
        Self {
            valley_hour: scale(4),
            peak_hour: scale(20),
        }
    }

    /// Cosine template in [0, 1]: 0 at the valley, 1 at the peak.
    fn template(&self, horizon: usize) -> Vec<f64> {
        let rise = (self.peak_hour + horizon - self.valley_hour) % horizon;
        let fall = horizon - rise;
        (0..horizon)
            .map(|t| {
                let s = (t + horizon - self.valley_hour) % horizon;
                if s <= rise {
                    0.5 * (1.0 - libm::cos(PI * s as f64 / rise as f64))
                } else {
                    0.5 * (1.0 + libm::cos(PI * (s - rise) as f64 / fall as f64))
                }
            })
            .collect()
    }
}

/// Diurnal data-center profile with the given peak, valley and total energy.
///
/// The cosine template is rescaled affinely onto `[valley, peak]`, then every
/// hour other than the valley and peak hours is pulled toward `peak` (or
/// `valley`) in proportion to its headroom so the hourly sum hits
/// `daily_energy`. The pull is itself affine, so the shape stays a cosine.
pub fn synthesize_dc_profile(peak: f64, valley: f64, daily_energy: f64, horizon: usize) -> Result<Vec<f64>, ProfileError> {
    synthesize_dc_profile_with(DiurnalShape::default_for(horizon), peak, valley, daily_energy, horizon)
}

pub fn synthesize_dc_profile_with(
    shape: DiurnalShape,
    peak: f64,
    valley: f64,
    daily_energy: f64,
    horizon: usize,
) -> Result<Vec<f64>, ProfileError> {
    if horizon == 0 {
        return Err(ProfileError::InvalidParameter("horizon must be >= 1"));
    }
    if !(valley >= 0.0 && peak >= valley && peak.is_finite() && daily_energy.is_finite()) {
        return Err(ProfileError::InvalidParameter("require 0 <= valley <= peak"));
    }
    let h = horizon as f64;
    let mean = daily_energy / h;
    let infeasible = || ProfileError::InfeasibleEnergy {
        energy: daily_energy,
        valley,
        peak,
        horizon,
        mean,
    };
    let tol = 1e-9 * daily_energy.abs().max(1.0);
    if peak - valley <= 1e-12 * peak.max(1.0) {
        if (daily_energy - h * peak).abs() > tol {
            return Err(infeasible());
        }
        return Ok(alloc::vec![peak; horizon]);
    }
    // At least one hour sits on each extreme.
    let lo = h * valley + (peak - valley);
    let hi = (h - 1.0) * peak + valley;
    if horizon < 2 || shape.valley_hour == shape.peak_hour || daily_energy < lo - tol || daily_energy > hi + tol {
        return Err(infeasible());
    }
    if shape.valley_hour >= horizon || shape.peak_hour >= horizon {
        return Err(ProfileError::InvalidParameter("shape hours outside horizon"));
    }

    let span = peak - valley;
    let mut profile: Vec<f64> = shape.template(horizon).into_iter().map(|x| valley + span * x).collect();
    profile[shape.valley_hour] = valley;
    profile[shape.peak_hour] = peak;

    let delta = daily_energy - profile.iter().sum::<f64>();
    let free = |t: usize| t != shape.valley_hour && t != shape.peak_hour;
    let headroom: f64 = (0..horizon)
        .filter(|&t| free(t))
        .map(|t| if delta > 0.0 { peak - profile[t] } else { profile[t] - valley })
        .sum();
    if headroom > 0.0 {
        let k = (delta.abs() / headroom).min(1.0);
        for (t, x) in profile.iter_mut().enumerate() {
            if free(t) {
                *x = if delta > 0.0 { *x + k * (peak - *x) } else { *x - k * (*x - valley) };
                *x = x.clamp(valley, peak);
            }
        }
    }
    Ok(profile)
}

/// Half-sine clear-sky PV profile: zero outside `[sunrise, sunset]`, peaking
/// at `capacity` at the window midpoint.
pub fn synthesize_pv_profile(capacity: f64, sunrise: f64, sunset: f64, horizon: usize) -> Result<Vec<f64>, ProfileError> {
    if !(capacity >= 0.0 && capacity.is_finite()) {
        return Err(ProfileError::InvalidParameter("capacity must be >= 0"));
    }
    if !(sunrise >= 0.0 && sunrise < sunset && sunset <= horizon as f64) {
        return Err(ProfileError::InvalidWindow { sunrise, sunset, horizon });
    }
    let width = sunset - sunrise;
    Ok((0..horizon)
        .map(|t| {
            let t = t as f64;
            if t <= sunrise || t >= sunset {
                0.0
            } else {
                (capacity * libm::sin(PI * (t - sunrise) / width)).clamp(0.0, capacity)
            }
        })
        .collect())
}

/// Splits a system profile across sites by fraction.
///
/// Every site share is rounded to a multiple of the hour's `ulp` and the last
/// site takes the remainder, so per-hour site sums reproduce the input bit for
/// bit in any summation order.
pub fn split_pv(profile: &[f64], shares: &[(u32, f64)]) -> Result<Vec<(u32, Vec<f64>)>, ProfileError> {
    if shares.is_empty() {
        return Err(ProfileError::SharesDoNotSumToOne(0.0));
    }
    for &(bus, f) in shares {
        if !(f >= 0.0) {
            return Err(ProfileError::NegativeShare(bus));
        }
    }
    let total: f64 = shares.iter().map(|s| s.1).sum();
    if (total - 1.0).abs() > 1e-9 {
        return Err(ProfileError::SharesDoNotSumToOne(total));
    }
    let mut out: Vec<(u32, Vec<f64>)> = shares.iter().map(|&(b, _)| (b, Vec::with_capacity(profile.len()))).collect();
    let last = shares.len() - 1;
    for &x in profile {
        let unit = ulp(x);
        let mut assigned = 0.0;
        for (i, &(_, f)) in shares.iter().enumerate() {
            let part = if i == last {
                x - assigned
            } else if unit > 0.0 {
                libm::round(f / total * x / unit) * unit
            } else {
                f / total * x
            };
            assigned += part;
            out[i].1.push(part);
        }
        // rounding can overshoot by an ulp when the last share is tiny
        let t = out[last].1.len() - 1;
        if out[last].1[t] < 0.0 {
            let short = out[last].1[t];
            out[last].1[t] = 0.0;
            if let Some(donor) = out[..last].iter_mut().rev().find(|s| s.1[t] > 0.0) {
                donor.1[t] += short;
            }
        }
    }
    Ok(out)
}

/// Splits `x` into `(fraction * x, remainder)` such that the two parts add
/// back to `x` exactly.
pub fn exact_split(x: f64, fraction: f64) -> (f64, f64) {
    let unit = ulp(x);
    let part = if unit > 0.0 {
        libm::round(fraction * x / unit) * unit
    } else {
        fraction * x
    };
    (part, x - part)
}

/// Spacing of doubles at `x` (zero for zero and subnormal inputs).
fn ulp(x: f64) -> f64 {
    let exp = (x.abs().to_bits() >> 52) & 0x7ff;
    if exp <= 52 {
        0.0
    } else {
        f64::from_bits((exp - 52) << 52)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn max(p: &[f64]) -> f64 {
        p.iter().cloned().fold(f64::MIN, f64::max)
    }
    fn min(p: &[f64]) -> f64 {
        p.iter().cloned().fold(f64::MAX, f64::min)
    }

    #[test]
    fn hyperscale_profile_hits_targets() {
        let p = synthesize_dc_profile(720.0, 443.0, 13614.0, 24).unwrap();
        assert_eq!(p.len(), 24);
        assert_eq!(max(&p), 720.0);
        assert_eq!(min(&p), 443.0);
        assert_eq!(p[4], 443.0);
        assert_eq!(p[20], 720.0);
        let sum: f64 = p.iter().sum();
        assert!((sum - 13614.0).abs() <= 1e-6 * 13614.0, "sum {sum}");
        // rises from the valley to the peak, falls back afterwards
        for t in 4..20 {
            assert!(p[t + 1] >= p[t]);
        }
        for t in 20..23 {
            assert!(p[t + 1] <= p[t]);
        }
    }

    #[test]
    fn flat_when_peak_equals_valley() {
        let p = synthesize_dc_profile(500.0, 500.0, 12000.0, 24).unwrap();
        assert!(p.iter().all(|&x| x == 500.0));
    }

    #[test]
    fn mean_above_peak_is_error() {
        let err = synthesize_dc_profile(720.0, 443.0, 20000.0, 24).unwrap_err();
        match err {
            ProfileError::InfeasibleEnergy { mean, .. } => assert!((mean - 833.333).abs() < 1e-3),
            other => panic!("{other:?}"),
        }
        assert!(synthesize_dc_profile(720.0, 443.0, 443.0 * 24.0 - 1.0, 24).is_err());
    }

    #[test]
    fn pv_half_sine() {
        let p = synthesize_pv_profile(3380.0, 6.0, 20.0, 24).unwrap();
        assert_eq!(p[13], 3380.0);
        for t in (0..=6).chain(20..24) {
            assert_eq!(p[t], 0.0, "hour {t}");
        }
        // oracle: direct evaluation of the half-sine
        for t in 7..20 {
            let expect = 3380.0 * (core::f64::consts::PI * (t as f64 - 6.0) / 14.0).sin();
            assert!((p[t] - expect).abs() < 1e-9);
            assert!(p[t] > 0.0 && p[t] <= 3380.0);
        }
        assert!((p[10] - p[16]).abs() < 1e-9);
    }

    #[test]
    fn pv_edge_cases() {
        assert!(synthesize_pv_profile(0.0, 6.0, 20.0, 24).unwrap().iter().all(|&x| x == 0.0));
        assert!(matches!(
            synthesize_pv_profile(100.0, 12.0, 12.0, 24),
            Err(ProfileError::InvalidWindow { .. })
        ));
        assert!(synthesize_pv_profile(100.0, 6.0, 25.0, 24).is_err());
    }

    #[test]
    fn pv_split_thirty_seventy() {
        let p = synthesize_pv_profile(3380.0, 6.0, 20.0, 24).unwrap();
        let sites = split_pv(&p, &[(9, 0.3), (18, 0.7)]).unwrap();
        assert_eq!(sites[0].0, 9);
        assert!((max(&sites[0].1) - 1014.0).abs() < 1e-9);
        assert!((max(&sites[1].1) - 2366.0).abs() < 1e-9);
        for t in 0..24 {
            assert_eq!(sites[0].1[t] + sites[1].1[t], p[t]);
        }
    }

    #[test]
    fn pv_split_identity_and_errors() {
        let p = [0.0, 1.5, 2.25];
        let sites = split_pv(&p, &[(9, 1.0)]).unwrap();
        assert_eq!(sites[0].1, p.to_vec());
        assert_eq!(
            split_pv(&p, &[(9, 0.5), (18, 0.6)]).unwrap_err(),
            ProfileError::SharesDoNotSumToOne(1.1)
        );
        assert!(matches!(split_pv(&p, &[(9, -0.5), (18, 1.5)]), Err(ProfileError::NegativeShare(9))));
    }

    proptest! {
        #[test]
        fn dc_profile_invariants(valley in 10.0f64..1000.0, extra in 1.0f64..800.0, w in 0.02f64..0.98) {
            let peak = valley + extra;
            let lo = 24.0 * valley + extra;
            let hi = 23.0 * peak + valley;
            let energy = lo + w * (hi - lo);
            let p = synthesize_dc_profile(peak, valley, energy, 24).unwrap();
            let sum: f64 = p.iter().sum();
            prop_assert!((sum - energy).abs() <= 1e-6 * energy);
            prop_assert_eq!(max(&p), peak);
            prop_assert_eq!(min(&p), valley);
            prop_assert!(p.iter().all(|&x| x >= valley && x <= peak));
        }

        #[test]
        fn split_sums_bit_exact(xs in proptest::collection::vec(0.0f64..5000.0, 1..30),
                                a in 0.0f64..1.0, b in 0.0f64..1.0) {
            let (f1, f2) = (a * (1.0 - b), (1.0 - a) * (1.0 - b));
            let f3 = 1.0 - f1 - f2;
            let sites = split_pv(&xs, &[(1, f1), (2, f2), (3, f3)]).unwrap();
            for (t, &x) in xs.iter().enumerate() {
                let s = sites[0].1[t] + sites[1].1[t] + sites[2].1[t];
                prop_assert_eq!(s, x);
                let r = sites[2].1[t] + sites[1].1[t] + sites[0].1[t];
                prop_assert_eq!(r, x);
                prop_assert!((sites[0].1[t] - f1 * x).abs() <= 1e-12 * x.max(1.0));
            }
        }
    }
}
