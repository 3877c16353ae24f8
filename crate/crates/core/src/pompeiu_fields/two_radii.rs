use serde::{Deserialize, Serialize};

use crate::error::{LabError, Result};
use crate::specfun::{bessel_zeros, BesselOrder};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum TwoRadiiVerdict {
    /// No ratio `s_j / s_m` within `tol`: two radii suffice.
    Admissible,
    /// `r1 / r2` is within `gap` of `s_j / s_m`.
    Resonant { j: usize, m: usize, gap: f64 },
    /// Not resonant, but the ratio lies outside the range the zero table can
    /// rule out.
    Inconclusive,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TwoRadiiReport {
    pub r1: f64,
    pub r2: f64,
    pub zero_count: usize,
    pub tol: f64,
    pub verdict: TwoRadiiVerdict,
    /// Closest pair `(j, m)` and its gap, whatever the verdict.
    pub closest: (usize, usize),
    pub min_gap: f64,
    /// `[s_1 / s_count, s_count / s_1]`.
    pub coverage: (f64, f64),
    pub in_coverage: bool,
}

/// Compare `r1 / r2` with every ratio `s_j / s_m` of the first `zero_count`
/// positive zeros of `J_1`.
///
/// The comparison is made with the larger radius on top, so swapping the
/// radii swaps `(j, m)` and leaves the gap unchanged.
pub fn two_radii_test(r1: f64, r2: f64, zero_count: usize, tol: f64) -> Result<TwoRadiiReport> {
    if !(r1 > 0.0 && r2 > 0.0 && r1.is_finite() && r2.is_finite()) {
        return Err(LabError::Domain(format!("radii must be positive, got {r1}, {r2}")));
    }
    if !(tol > 0.0) {
        return Err(LabError::Domain("tol must be > 0".into()));
    }
    let zeros: Vec<f64> = bessel_zeros(BesselOrder::ONE, zero_count)?.iter().map(|z| z.value).collect();
    let swapped = r1 < r2;
    let ratio = if swapped { r2 / r1 } else { r1 / r2 };
    let mut best = (f64::INFINITY, 0, 0);
    for (top, st) in zeros.iter().enumerate() {
        for (bottom, sb) in zeros.iter().enumerate().take(top + 1) {
            let gap = (ratio - st / sb).abs();
            if gap < best.0 {
                best = (gap, top + 1, bottom + 1);
            }
        }
    }
    let (min_gap, top, bottom) = best;
    let closest = if swapped { (bottom, top) } else { (top, bottom) };
    let last = zeros[zeros.len() - 1];
    let coverage = (zeros[0] / last, last / zeros[0]);
    let in_coverage = ratio <= coverage.1;
    let verdict = if min_gap <= tol {
        TwoRadiiVerdict::Resonant {
            j: closest.0,
            m: closest.1,
            gap: min_gap,
        }
    } else if in_coverage {
        TwoRadiiVerdict::Admissible
    } else {
        TwoRadiiVerdict::Inconclusive
    };
    Ok(TwoRadiiReport {
        r1,
        r2,
        zero_count,
        tol,
        verdict,
        closest,
        min_gap,
        coverage,
        in_coverage,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    const S1: f64 = 3.831_705_970_207_512_3;
    const S2: f64 = 7.015_586_669_815_618_8;

    #[test]
    fn equal_radii_resonate_trivially() {
        let r = two_radii_test(2.0, 2.0, 200, 1e-9).unwrap();
        assert_eq!(r.verdict, TwoRadiiVerdict::Resonant { j: 1, m: 1, gap: 0.0 });
    }

    #[test]
    fn first_two_zeros_resonate() {
        let r = two_radii_test(S1, S2, 200, 1e-9).unwrap();
        match r.verdict {
            TwoRadiiVerdict::Resonant { j, m, gap } => {
                assert_eq!((j, m), (1, 2));
                assert!(gap < 1e-9);
            }
            v => panic!("expected resonance, got {v:?}"),
        }
    }

    #[test]
    fn symmetric_in_the_radii() {
        for (a, b) in [(1.0, 1.001), (S1, S2), (1.0, 37.0), (0.3, 0.71)] {
            let x = two_radii_test(a, b, 50, 1e-6).unwrap();
            let y = two_radii_test(b, a, 50, 1e-6).unwrap();
            assert_eq!(x.min_gap, y.min_gap);
            assert_eq!(x.closest, (y.closest.1, y.closest.0));
            assert_eq!(std::mem::discriminant(&x.verdict), std::mem::discriminant(&y.verdict));
        }
    }

    #[test]
    fn near_unit_ratio_is_admissible() {
        // exhaustive 200 x 200 scan (scipy jn_zeros): closest ratio is s_1/s_1, gap 1.0e-3
        let r = two_radii_test(1.001, 1.0, 200, 1e-6).unwrap();
        assert_eq!(r.verdict, TwoRadiiVerdict::Admissible);
        assert_eq!(r.closest, (1, 1));
        assert!((r.min_gap - 1e-3).abs() < 1e-12);
    }

    #[test]
    fn far_ratio_is_flagged() {
        let r = two_radii_test(1.0, 1000.0, 20, 1e-12).unwrap();
        assert!(!r.in_coverage);
        assert_eq!(r.verdict, TwoRadiiVerdict::Inconclusive);
    }
}
