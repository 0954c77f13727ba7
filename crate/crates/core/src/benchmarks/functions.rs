//! Plain objective formulas, all over untransformed coordinates.

use std::f64::consts::PI;

pub fn sphere(x: &[f64]) -> f64 {
    x.iter().map(|v| v * v).sum()
}

pub fn rastrigin(x: &[f64]) -> f64 {
    10.0 * x.len() as f64
        + x.iter()
            .map(|v| v * v - 10.0 * (2.0 * PI * v).cos())
            .sum::<f64>()
}

/// Local minimizer of the one-dimensional Rastrigin term nearest to `k`.
pub fn rastrigin_local_min_1d(k: i32) -> f64 {
    // stationary points of x² − 10 cos(2πx): 2x + 20π sin(2πx) = 0
    let mut x = k as f64;
    for _ in 0..50 {
        let g = 2.0 * x + 20.0 * PI * (2.0 * PI * x).sin();
        let h = 2.0 + 40.0 * PI * PI * (2.0 * PI * x).cos();
        let step = g / h;
        x -= step;
        if step.abs() < 1e-15 {
            break;
        }
    }
    x
}

/// Classical Himmelblau `(x₁²+x₂−11)² + (x₁+x₂²−7)²`.
pub fn himmelblau(x: &[f64]) -> f64 {
    let a = x[0] * x[0] + x[1] - 11.0;
    let b = x[0] + x[1] * x[1] - 7.0;
    a * a + b * b
}

/// Himmelblau with a capped Euclidean distance penalty towards `x_star`.
pub fn modified_himmelblau(x: &[f64], x_star: &[f64]) -> f64 {
    himmelblau(x) + euclidean(x, x_star).min(0.01)
}

/// Variant whose first term is left unsquared.
pub fn modified_himmelblau_unsquared(x: &[f64], x_star: &[f64]) -> f64 {
    let a = x[0] * x[0] + x[1] - 11.0;
    let b = x[0] + x[1] * x[1] - 7.0;
    a + b * b + euclidean(x, x_star).min(0.01)
}

pub(crate) fn himmelblau_gradient(x: f64, y: f64) -> ([f64; 2], [[f64; 2]; 2]) {
    let a = x * x + y - 11.0;
    let b = x + y * y - 7.0;
    let grad = [4.0 * x * a + 2.0 * b, 2.0 * a + 4.0 * y * b];
    let hxy = 4.0 * x + 4.0 * y;
    let hess = [
        [12.0 * x * x + 4.0 * y - 42.0, hxy],
        [hxy, 12.0 * y * y + 4.0 * x - 26.0],
    ];
    (grad, hess)
}

/// The four minimizers of the classical Himmelblau function, Newton-refined.
pub fn himmelblau_minimizers() -> [[f64; 2]; 4] {
    let starts = [
        [3.0, 2.0],
        [-2.805118, 3.131312],
        [-3.779310, -3.283186],
        [3.584428, -1.848126],
    ];
    starts.map(|s| newton2(s, himmelblau_gradient))
}

/// Five-uneven-peak trap (maximization), domain `[0, 30]`.
pub fn five_uneven_peak_trap(x: &[f64]) -> f64 {
    let x = x[0];
    if x < 0.0 {
        f64::NEG_INFINITY
    } else if x < 2.5 {
        80.0 * (2.5 - x)
    } else if x < 5.0 {
        64.0 * (x - 2.5)
    } else if x < 7.5 {
        64.0 * (7.5 - x)
    } else if x < 12.5 {
        28.0 * (x - 7.5)
    } else if x < 17.5 {
        28.0 * (17.5 - x)
    } else if x < 22.5 {
        32.0 * (x - 17.5)
    } else if x < 27.5 {
        32.0 * (27.5 - x)
    } else if x <= 30.0 {
        80.0 * (x - 27.5)
    } else {
        f64::NEG_INFINITY
    }
}

/// Equal maxima `sin⁶(5πx)` (maximization), domain `[0, 1]`.
pub fn equal_maxima(x: &[f64]) -> f64 {
    (5.0 * PI * x[0]).sin().powi(6)
}

/// Standard six-hump camel back (minimization form).
pub fn six_hump_camel(x: &[f64]) -> f64 {
    let (a, b) = (x[0], x[1]);
    (4.0 - 2.1 * a * a + a.powi(4) / 3.0) * a * a + a * b + (-4.0 + 4.0 * b * b) * b * b
}

pub(crate) fn six_hump_camel_gradient(a: f64, b: f64) -> ([f64; 2], [[f64; 2]; 2]) {
    let grad = [
        8.0 * a - 8.4 * a.powi(3) + 2.0 * a.powi(5) + b,
        a - 8.0 * b + 16.0 * b.powi(3),
    ];
    let hess = [
        [8.0 - 25.2 * a * a + 10.0 * a.powi(4), 1.0],
        [1.0, -8.0 + 48.0 * b * b],
    ];
    (grad, hess)
}

/// `Σ_{j=1}^{5} j cos((j+1)t + j)`, the Shubert factor.
pub fn shubert_factor(t: f64) -> f64 {
    (1..=5)
        .map(|j| {
            let j = j as f64;
            j * ((j + 1.0) * t + j).cos()
        })
        .sum()
}

fn shubert_factor_derivatives(t: f64) -> (f64, f64) {
    (1..=5).fold((0.0, 0.0), |(d1, d2), j| {
        let j = j as f64;
        let arg = (j + 1.0) * t + j;
        (
            d1 - j * (j + 1.0) * arg.sin(),
            d2 - j * (j + 1.0) * (j + 1.0) * arg.cos(),
        )
    })
}

/// Shubert product `∏ Σ j cos((j+1)x_i + j)` (minimization form).
pub fn shubert(x: &[f64]) -> f64 {
    x.iter().map(|t| shubert_factor(*t)).product()
}

/// Global maximizers and minimizers of the Shubert factor on `[lo, hi]`.
pub fn shubert_factor_extremes(lo: f64, hi: f64) -> (Vec<f64>, Vec<f64>) {
    let n = 20_000;
    let step = (hi - lo) / n as f64;
    let mut stationary = Vec::new();
    let mut prev = shubert_factor_derivatives(lo).0;
    for i in 1..=n {
        let t = lo + i as f64 * step;
        let d = shubert_factor_derivatives(t).0;
        if prev.signum() != d.signum() {
            let mut x = t - step / 2.0;
            for _ in 0..50 {
                let (d1, d2) = shubert_factor_derivatives(x);
                let s = d1 / d2;
                x -= s;
                if s.abs() < 1e-15 {
                    break;
                }
            }
            if x >= lo && x <= hi {
                stationary.push(x);
            }
        }
        prev = d;
    }
    let values: Vec<f64> = stationary.iter().map(|t| shubert_factor(*t)).collect();
    let max = values.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let min = values.iter().cloned().fold(f64::INFINITY, f64::min);
    let pick = |target: f64| {
        let mut out: Vec<f64> = stationary
            .iter()
            .zip(&values)
            .filter(|(_, v)| (**v - target).abs() < 1e-9)
            .map(|(t, _)| *t)
            .collect();
        out.dedup_by(|a, b| (*a - *b).abs() < 1e-6);
        out
    };
    (pick(max), pick(min))
}

/// Vincent `(1/d) Σ sin(10 ln x_i)` (maximization), domain `[0.25, 10]^d`.
pub fn vincent(x: &[f64]) -> f64 {
    x.iter().map(|v| (10.0 * v.ln()).sin()).sum::<f64>() / x.len() as f64
}

/// Coordinates where `sin(10 ln t) = 1` inside `[0.25, 10]`.
pub fn vincent_peak_coordinates() -> Vec<f64> {
    (-5..=5)
        .map(|k| ((PI / 2.0 + 2.0 * PI * k as f64) / 10.0).exp())
        .filter(|t| (0.25..=10.0).contains(t))
        .collect()
}

pub fn euclidean(a: &[f64], b: &[f64]) -> f64 {
    squared_distance(a, b).sqrt()
}

pub fn squared_distance(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

/// Two-dimensional Newton iteration on a gradient/Hessian pair.
pub(crate) fn newton2<G>(start: [f64; 2], grad: G) -> [f64; 2]
where
    G: Fn(f64, f64) -> ([f64; 2], [[f64; 2]; 2]),
{
    let mut p = start;
    for _ in 0..100 {
        let (g, h) = grad(p[0], p[1]);
        let det = h[0][0] * h[1][1] - h[0][1] * h[1][0];
        if det == 0.0 {
            break;
        }
        let dx = (h[1][1] * g[0] - h[0][1] * g[1]) / det;
        let dy = (h[0][0] * g[1] - h[1][0] * g[0]) / det;
        p[0] -= dx;
        p[1] -= dy;
        if dx.abs().max(dy.abs()) < 1e-15 {
            break;
        }
    }
    p
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn himmelblau_at_classical_points() {
        assert_eq!(modified_himmelblau(&[3.0, 2.0], &[3.0, 2.0]), 0.0);
        let v = modified_himmelblau(&[-2.805118, 3.131312], &[3.0, 2.0]);
        assert!((v - 0.01).abs() < 1e-6, "{v}");
        assert!((modified_himmelblau(&[0.0, 0.0], &[3.0, 2.0]) - 170.01).abs() < 1e-12);
        for m in himmelblau_minimizers() {
            assert!(himmelblau(&m) < 1e-20, "{m:?}");
        }
    }

    #[test]
    fn unsquared_variant_differs() {
        // first term is linear: (0 + 0 − 11) + 49 + 0.01
        let v = modified_himmelblau_unsquared(&[0.0, 0.0], &[3.0, 2.0]);
        assert!((v - 38.01).abs() < 1e-12);
    }

    #[test]
    fn rastrigin_lattice_minimum_is_stationary() {
        for k in -4..=4 {
            let x = rastrigin_local_min_1d(k);
            assert!((x - k as f64).abs() < 0.05);
            let f = |t: f64| rastrigin(&[t]);
            assert!(f(x) <= f(x + 1e-4) && f(x) <= f(x - 1e-4));
        }
        assert_eq!(rastrigin_local_min_1d(0), 0.0);
    }

    #[test]
    fn trap_peaks() {
        let f = |x: f64| five_uneven_peak_trap(&[x]);
        assert_eq!(f(0.0), 200.0);
        assert_eq!(f(30.0), 200.0);
        assert_eq!(f(5.0), 160.0);
        assert_eq!(f(12.5), 140.0);
        assert_eq!(f(22.5), 160.0);
    }

    #[test]
    fn shubert_has_eighteen_global_minima_in_2d() {
        let (maxs, mins) = shubert_factor_extremes(-10.0, 10.0);
        assert_eq!(maxs.len(), 3);
        assert_eq!(mins.len(), 3);
        let best = shubert_factor(maxs[0]) * shubert_factor(mins[0]);
        assert!((best - -186.7309).abs() < 1e-3, "{best}");
    }

    #[test]
    fn vincent_has_six_peaks_per_axis() {
        let peaks = vincent_peak_coordinates();
        assert_eq!(peaks.len(), 6);
        for p in peaks {
            assert!((vincent(&[p]) - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn camel_global_minima() {
        let p = newton2([0.0898, -0.7126], six_hump_camel_gradient);
        assert!((six_hump_camel(&p) - -1.031628453).abs() < 1e-8);
    }
}
