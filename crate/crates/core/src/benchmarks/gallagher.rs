//! Gallagher-style random peaks: one global peak of height 10 and `n − 1`
//! lower peaks with strictly increasing heights in `[1.1, 9.1]`.

use nalgebra::DVector;

use crate::numerics::{Matrix, RngStream, Vector};

#[derive(Clone, Debug)]
pub struct Peak {
    /// Location in base (rotated, translated) coordinates.
    pub center: Vec<f64>,
    /// Diagonal of the peak's precision matrix.
    pub scales: Vec<f64>,
    pub height: f64,
}

#[derive(Clone, Debug)]
pub struct GallagherPeaks {
    pub peaks: Vec<Peak>,
}

impl GallagherPeaks {
    /// Builds the landscape for peak locations given in instance space.
    /// `locations[0]` is the global peak; `to_base` maps instance to base
    /// coordinates.
    pub fn generate<F>(locations: &[Vec<f64>], to_base: F, rng: &mut RngStream) -> Self
    where
        F: Fn(&[f64]) -> Vec<f64>,
    {
        let n = locations.len();
        let dim = locations[0].len();
        let (global_alpha, exponent_den) = if n > 50 {
            (1000.0, (n - 2) as f64)
        } else {
            (1e6, (n - 2) as f64)
        };

        let mut alphas: Vec<f64> = (0..n - 1)
            .map(|j| 1000f64.powf(2.0 * j as f64 / exponent_den))
            .collect();
        shuffle(&mut alphas, rng);

        let peaks = locations
            .iter()
            .enumerate()
            .map(|(i, loc)| {
                let (alpha, height) = if i == 0 {
                    (global_alpha, 10.0)
                } else {
                    let h = if n > 2 {
                        1.1 + 8.0 * (i - 1) as f64 / (n - 2) as f64
                    } else {
                        1.1
                    };
                    (alphas[i - 1], h)
                };
                let mut scales: Vec<f64> = (0..dim)
                    .map(|k| {
                        let e = if dim > 1 {
                            0.5 * k as f64 / (dim - 1) as f64
                        } else {
                            0.0
                        };
                        alpha.powf(e) / alpha.powf(0.25)
                    })
                    .collect();
                shuffle(&mut scales, rng);
                Peak {
                    center: to_base(loc),
                    scales,
                    height,
                }
            })
            .collect();
        GallagherPeaks { peaks }
    }

    fn activation(&self, peak: &Peak, z: &[f64]) -> f64 {
        let dim = z.len() as f64;
        let q: f64 = z
            .iter()
            .zip(&peak.center)
            .zip(&peak.scales)
            .map(|((a, c), s)| s * (a - c) * (a - c))
            .sum();
        peak.height * (-q / (2.0 * dim)).exp()
    }

    /// `(10 − max_i w_i exp(−q_i(z) / 2d))²`
    pub fn evaluate(&self, z: &[f64]) -> f64 {
        let best = self
            .peaks
            .iter()
            .map(|p| self.activation(p, z))
            .fold(0.0, f64::max);
        (10.0 - best).powi(2)
    }

    /// Indices of non-global peaks that dominate every other peak at their
    /// own center, and so are strict local minima.
    pub fn dominant_local_peaks(&self) -> Vec<usize> {
        (1..self.peaks.len())
            .filter(|&i| {
                let own = self.peaks[i].height;
                self.peaks
                    .iter()
                    .enumerate()
                    .filter(|(j, _)| *j != i)
                    .all(|(_, p)| self.activation(p, &self.peaks[i].center) < own)
            })
            .collect()
    }
}

fn shuffle<T>(v: &mut [T], rng: &mut RngStream) {
    for i in (1..v.len()).rev() {
        let j = (rng.uniform() * (i + 1) as f64) as usize;
        v.swap(i, j.min(i));
    }
}

/// Random orthogonal matrix: QR of a Gaussian matrix with a sign fix.
pub fn random_rotation(dim: usize, rng: &mut RngStream) -> Matrix {
    let a = Matrix::from_fn(dim, dim, |_, _| rng.standard_normal());
    let qr = a.qr();
    let mut q = qr.q();
    let r = qr.r();
    for j in 0..dim {
        if r[(j, j)] < 0.0 {
            let col: DVector<f64> = -q.column(j);
            q.set_column(j, &col);
        }
    }
    q
}

pub(crate) fn as_vector(x: &[f64]) -> Vector {
    Vector::from_column_slice(x)
}
