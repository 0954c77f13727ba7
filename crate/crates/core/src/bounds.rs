use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::{RngStream, Vector};

/// Axis-aligned box `[lower, upper]`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Bounds {
    lower: Vec<f64>,
    upper: Vec<f64>,
}

impl Bounds {
    pub fn new(lower: Vec<f64>, upper: Vec<f64>) -> Result<Self> {
        if lower.len() != upper.len() {
            return Err(Error::config(
                "bounds",
                format!("{} lower vs {} upper entries", lower.len(), upper.len()),
            ));
        }
        if lower.is_empty() {
            return Err(Error::config("bounds", "zero-dimensional box"));
        }
        for (i, (l, u)) in lower.iter().zip(&upper).enumerate() {
            if !(l.is_finite() && u.is_finite() && l < u) {
                return Err(Error::config(
                    "bounds",
                    format!("coordinate {i}: need finite lb < ub, got [{l}, {u}]"),
                ));
            }
        }
        Ok(Bounds { lower, upper })
    }

    pub fn uniform(dim: usize, lo: f64, hi: f64) -> Result<Self> {
        Bounds::new(vec![lo; dim], vec![hi; dim])
    }

    pub fn dim(&self) -> usize {
        self.lower.len()
    }

    pub fn lower(&self) -> &[f64] {
        &self.lower
    }

    pub fn upper(&self) -> &[f64] {
        &self.upper
    }

    /// `∏ (ub_i − lb_i)`
    pub fn volume(&self) -> f64 {
        self.lower
            .iter()
            .zip(&self.upper)
            .map(|(l, u)| u - l)
            .product()
    }

    pub fn contains(&self, x: &[f64]) -> bool {
        x.len() == self.dim()
            && x.iter()
                .zip(self.lower.iter().zip(&self.upper))
                .all(|(v, (l, u))| *l <= *v && *v <= *u)
    }

    /// Clamps every coordinate into the box.
    pub fn saturate(&self, x: &Vector) -> Vector {
        Vector::from_iterator(
            x.len(),
            x.iter()
                .zip(self.lower.iter().zip(&self.upper))
                .map(|(v, (l, u))| v.clamp(*l, *u)),
        )
    }

    pub fn sample_uniform(&self, rng: &mut RngStream) -> Vector {
        Vector::from_iterator(
            self.dim(),
            self.lower
                .iter()
                .zip(&self.upper)
                .map(|(l, u)| rng.uniform_in(*l, *u)),
        )
    }

    /// The box enlarged by `factor` times its range on every side.
    pub fn widened(&self, factor: f64) -> Bounds {
        let (lower, upper) = self
            .lower
            .iter()
            .zip(&self.upper)
            .map(|(l, u)| {
                let r = u - l;
                (l - factor * r, u + factor * r)
            })
            .unzip();
        Bounds { lower, upper }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn five() -> Bounds {
        Bounds::uniform(2, -5.0, 5.0).unwrap()
    }

    #[test]
    fn saturate_clamps() {
        let b = five();
        let v = |a: f64, c: f64| Vector::from_vec(vec![a, c]);
        assert_eq!(b.saturate(&v(7.0, 0.0)), v(5.0, 0.0));
        assert_eq!(b.saturate(&v(-9.0, 9.0)), v(-5.0, 5.0));
        assert_eq!(b.saturate(&v(1.25, -3.5)), v(1.25, -3.5));
    }

    #[test]
    fn rejects_bad_boxes() {
        assert!(Bounds::new(vec![1.0], vec![1.0]).is_err());
        assert!(Bounds::new(vec![0.0, 0.0], vec![1.0]).is_err());
        assert!(Bounds::new(vec![f64::NAN], vec![1.0]).is_err());
        assert!(Bounds::new(vec![], vec![]).is_err());
    }

    #[test]
    fn volume_and_widening() {
        let b = Bounds::new(vec![0.0, -1.0], vec![2.0, 4.0]).unwrap();
        assert_eq!(b.volume(), 10.0);
        let w = b.widened(10.0);
        assert_eq!(w.lower(), &[-20.0, -51.0]);
        assert_eq!(w.upper(), &[22.0, 54.0]);
    }
}
