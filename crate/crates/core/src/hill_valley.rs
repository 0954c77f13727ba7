//! Hill-Valley test: two points share a basin unless some interior point on
//! the segment between them is at least as high as both endpoints.

use std::cmp::Ordering;

use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct HvConfig {
    /// Number of interior test points.
    pub test_points: usize,
}

impl Default for HvConfig {
    fn default() -> Self {
        HvConfig { test_points: 10 }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct HvOutcome {
    pub same_basin: bool,
    /// Interior evaluations performed; endpoints are never charged here.
    pub evals: usize,
}

/// Runs the test between `xi` and `xj` whose fitnesses the caller supplies.
///
/// Endpoints are put in a canonical order before the interior points are
/// generated, so `hv_test(a, b)` and `hv_test(b, a)` probe bit-identical
/// points. Identical endpoints share a basin without any evaluation. A
/// non-finite interior value counts as a hill.
pub fn hv_test<F>(xi: &[f64], fi: f64, xj: &[f64], fj: f64, mut f: F, cfg: HvConfig) -> HvOutcome
where
    F: FnMut(&[f64]) -> f64,
{
    assert_eq!(xi.len(), xj.len(), "hill-valley endpoints differ in dimension");
    if xi == xj {
        return HvOutcome {
            same_basin: true,
            evals: 0,
        };
    }
    let (from, to) = match lexicographic(xi, xj) {
        Ordering::Greater => (xj, xi),
        _ => (xi, xj),
    };
    let level = fi.max(fj);
    let n = cfg.test_points;
    let mut point = vec![0.0; from.len()];
    for k in 1..=n {
        let t = k as f64 / (n + 1) as f64;
        for ((p, a), b) in point.iter_mut().zip(from).zip(to) {
            *p = a + t * (b - a);
        }
        let value = f(&point);
        if !value.is_finite() || level <= value {
            return HvOutcome {
                same_basin: false,
                evals: k,
            };
        }
    }
    HvOutcome {
        same_basin: true,
        evals: n,
    }
}

fn lexicographic(a: &[f64], b: &[f64]) -> Ordering {
    a.iter()
        .zip(b)
        .map(|(x, y)| x.total_cmp(y))
        .find(|o| *o != Ordering::Equal)
        .unwrap_or(Ordering::Equal)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn rastrigin1(x: &[f64]) -> f64 {
        x[0] * x[0] + 10.0 - 10.0 * (2.0 * PI * x[0]).cos()
    }

    #[test]
    fn monotone_segment_is_one_basin() {
        let f = |x: &[f64]| x[0];
        let out = hv_test(&[-1.0, 0.0], -1.0, &[1.0, 0.0], 1.0, f, HvConfig::default());
        assert_eq!(out, HvOutcome { same_basin: true, evals: 10 });
    }

    #[test]
    fn adjacent_rastrigin_basins_are_separated() {
        // dense grid: the ridge between basins 0 and 1 peaks near x = 0.5
        let ridge = (0..=1000)
            .map(|i| i as f64 * 0.995 / 1000.0)
            .map(|x| rastrigin1(&[x]))
            .fold(f64::NEG_INFINITY, f64::max);
        assert!(ridge > 20.0);
        let fj = rastrigin1(&[0.995]);
        let out = hv_test(&[0.0], 0.0, &[0.995], fj, rastrigin1, HvConfig::default());
        assert!(!out.same_basin);
        assert!(out.evals >= 1 && out.evals <= 10);
    }

    #[test]
    fn identical_points_short_circuit() {
        let out = hv_test(&[0.3, 0.3], 1.0, &[0.3, 0.3], 1.0, |_| unreachable!(), HvConfig::default());
        assert_eq!(out, HvOutcome { same_basin: true, evals: 0 });
    }

    #[test]
    fn non_finite_interior_is_a_hill() {
        let out = hv_test(&[0.0], 0.0, &[1.0], 0.0, |_| f64::NAN, HvConfig::default());
        assert_eq!(out, HvOutcome { same_basin: false, evals: 1 });
    }

    #[test]
    fn plateau_counts_as_hill() {
        let out = hv_test(&[0.0], 1.0, &[1.0], 1.0, |_| 1.0, HvConfig::default());
        assert!(!out.same_basin);
    }

    #[test]
    fn convex_quadratic_is_single_basin() {
        let f = |x: &[f64]| x.iter().map(|v| v * v).sum::<f64>();
        let a = [4.0, -3.0, 0.5];
        let b = [-2.0, 1.0, 3.0];
        let out = hv_test(&a, f(&a), &b, f(&b), f, HvConfig { test_points: 25 });
        assert!(out.same_basin);
    }
}
