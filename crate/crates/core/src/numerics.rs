//! Shared numerical building blocks: symmetric eigendecomposition, sampling
//! from a multivariate normal, Mahalanobis distances, the gamma function and
//! the seeded random streams every run draws from.

use nalgebra::{DMatrix, DVector};
use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{Error, Result};

pub type Matrix = DMatrix<f64>;
pub type Vector = DVector<f64>;

/// Eigendecomposition `C = B diag(D) Bᵀ` of a symmetric matrix, eigenvalues
/// in ascending order.
#[derive(Clone, Debug)]
pub struct Eigen {
    pub vectors: Matrix,
    pub values: Vector,
}

impl Eigen {
    /// Decomposition of the identity.
    pub fn identity(dim: usize) -> Self {
        Eigen {
            vectors: Matrix::identity(dim, dim),
            values: Vector::from_element(dim, 1.0),
        }
    }

    pub fn dim(&self) -> usize {
        self.values.len()
    }

    pub fn condition_number(&self) -> f64 {
        let min = self.values.min();
        let max = self.values.max();
        if min <= 0.0 {
            f64::INFINITY
        } else {
            max / min
        }
    }

    /// Rebuilds `B diag(D) Bᵀ`.
    pub fn reconstruct(&self) -> Matrix {
        let scaled = &self.vectors * Matrix::from_diagonal(&self.values);
        &scaled * self.vectors.transpose()
    }

    /// Applies `C^{-1/2} = B diag(1/√D) Bᵀ` to `v`.
    pub fn inv_sqrt_apply(&self, v: &Vector) -> Vector {
        let mut coords = self.vectors.tr_mul(v);
        for (c, d) in coords.iter_mut().zip(self.values.iter()) {
            *c /= d.sqrt();
        }
        &self.vectors * coords
    }

    /// Mahalanobis distance of `x - y` under `C⁻¹`, without forming the inverse.
    pub fn mahalanobis(&self, x: &Vector, y: &Vector) -> f64 {
        let diff = x - y;
        let coords = self.vectors.tr_mul(&diff);
        coords
            .iter()
            .zip(self.values.iter())
            .map(|(c, d)| c * c / d)
            .sum::<f64>()
            .sqrt()
    }
}

/// Symmetrizes `c` and decomposes it. Eigenvalues come back ascending.
pub fn eigendecompose(c: &Matrix) -> Result<Eigen> {
    if !c.is_square() {
        return Err(Error::Dimension {
            expected: c.nrows(),
            got: c.ncols(),
        });
    }
    if c.iter().any(|v| !v.is_finite()) {
        return Err(Error::Numerical("non-finite covariance entry".into()));
    }
    let sym = (c + c.transpose()) * 0.5;
    let eig = sym.symmetric_eigen();

    let dim = eig.eigenvalues.len();
    let mut order: Vec<usize> = (0..dim).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));

    let values = Vector::from_iterator(dim, order.iter().map(|&i| eig.eigenvalues[i]));
    let mut vectors = Matrix::zeros(dim, dim);
    for (col, &i) in order.iter().enumerate() {
        vectors.set_column(col, &eig.eigenvectors.column(i));
    }
    if values.iter().any(|v| !v.is_finite()) {
        return Err(Error::Numerical("eigendecomposition did not converge".into()));
    }
    Ok(Eigen { vectors, values })
}

/// Draws `m + σ B diag(√D) z` with `z` standard normal.
pub fn sample_mvn(mean: &Vector, sigma: f64, eigen: &Eigen, rng: &mut RngStream) -> Vector {
    let z = Vector::from_iterator(eigen.dim(), (0..eigen.dim()).map(|_| rng.standard_normal()));
    sample_mvn_from(mean, sigma, eigen, &z)
}

/// Deterministic part of [`sample_mvn`] for a given standard-normal vector.
pub fn sample_mvn_from(mean: &Vector, sigma: f64, eigen: &Eigen, z: &Vector) -> Vector {
    let scaled = Vector::from_iterator(
        z.len(),
        z.iter().zip(eigen.values.iter()).map(|(zi, d)| zi * d.sqrt()),
    );
    mean + (&eigen.vectors * scaled) * sigma
}

/// `√((x−y)ᵀ C⁻¹ (x−y))` for an explicit inverse covariance.
pub fn mahalanobis(x: &[f64], y: &[f64], c_inv: &Matrix) -> Result<f64> {
    if x.len() != y.len() {
        return Err(Error::Dimension {
            expected: x.len(),
            got: y.len(),
        });
    }
    if c_inv.nrows() != x.len() || c_inv.ncols() != x.len() {
        return Err(Error::Dimension {
            expected: x.len(),
            got: c_inv.nrows(),
        });
    }
    let diff = Vector::from_iterator(x.len(), x.iter().zip(y).map(|(a, b)| a - b));
    let q = diff.dot(&(c_inv * &diff));
    Ok(q.max(0.0).sqrt())
}

pub fn gamma_function(z: f64) -> Result<f64> {
    if !(z > 0.0) || !z.is_finite() {
        return Err(Error::Domain(format!("gamma requires z > 0, got {z}")));
    }
    Ok(statrs::function::gamma::gamma(z))
}

const SPLITMIX_GAMMA: u64 = 0x9E37_79B9_7F4A_7C15;

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(SPLITMIX_GAMMA);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Folds a sequence of keys into a seed with SplitMix64.
pub fn derive_seed(base: u64, keys: &[u64]) -> u64 {
    keys.iter()
        .fold(splitmix64(base), |acc, &k| splitmix64(acc ^ splitmix64(k)))
}

/// 64-bit FNV-1a, used to turn names into seed keys.
pub fn name_key(name: &str) -> u64 {
    name.bytes().fold(0xcbf2_9ce4_8422_2325, |h, b| {
        (h ^ u64::from(b)).wrapping_mul(0x0000_0100_0000_01b3)
    })
}

/// Seeded ChaCha8 stream. Sub-streams are derived with [`derive_seed`], so
/// `(seed, keys)` fully determines the sequence.
#[derive(Clone, Debug)]
pub struct RngStream {
    seed: u64,
    inner: ChaCha8Rng,
}

impl RngStream {
    pub fn new(seed: u64) -> Self {
        RngStream {
            seed,
            inner: ChaCha8Rng::seed_from_u64(seed),
        }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    /// Independent stream keyed by `keys` below this stream's seed.
    pub fn substream(&self, keys: &[u64]) -> RngStream {
        RngStream::new(derive_seed(self.seed, keys))
    }

    /// Uniform draw on `[0, 1)`.
    pub fn uniform(&mut self) -> f64 {
        // 53 random mantissa bits.
        (self.inner.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    pub fn uniform_in(&mut self, lo: f64, hi: f64) -> f64 {
        lo + (hi - lo) * self.uniform()
    }

    pub fn standard_normal(&mut self) -> f64 {
        StandardNormal.sample(&mut self.inner)
    }
}

impl RngCore for RngStream {
    fn next_u32(&mut self) -> u32 {
        self.inner.next_u32()
    }

    fn next_u64(&mut self) -> u64 {
        self.inner.next_u64()
    }

    fn fill_bytes(&mut self, dst: &mut [u8]) {
        self.inner.fill_bytes(dst)
    }
}
