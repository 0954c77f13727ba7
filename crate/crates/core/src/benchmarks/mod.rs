//! Multimodal benchmark problems with optima metadata.
//!
//! Every problem is a minimization problem over a box. Rotatable problems
//! (sphere, Rastrigin, Gallagher peaks) get a seeded [`InstanceTransform`]
//! that moves the optimum inside the central 80% of the box; the others take
//! their instance from the choice of global optimizer.

pub mod functions;
pub mod gallagher;

use std::fmt;
use std::io::Write;
use std::sync::Arc;

use serde::Serialize;

use crate::bounds::Bounds;
use crate::error::{Error, Result};
use crate::numerics::{derive_seed, name_key, Matrix, RngStream, Vector};
use functions::*;
use gallagher::{as_vector, random_rotation, GallagherPeaks};

pub type Objective = Arc<dyn Fn(&[f64]) -> f64 + Send + Sync>;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LocalOptimum {
    pub x: Vec<f64>,
    pub f: f64,
}

/// Seeded rotation and translation. Base coordinates `z` map to instance
/// coordinates `x = t + Rᵀ (z − anchor)`.
#[derive(Clone, Debug)]
pub struct InstanceTransform {
    pub rotation: Matrix,
    pub translation: Vec<f64>,
    /// Base-space location of the optimum.
    pub anchor: Vec<f64>,
}

impl InstanceTransform {
    pub fn to_base(&self, x: &[f64]) -> Vec<f64> {
        let shifted = as_vector(x) - as_vector(&self.translation);
        let z = &self.rotation * shifted + as_vector(&self.anchor);
        z.as_slice().to_vec()
    }

    pub fn to_instance(&self, z: &[f64]) -> Vec<f64> {
        let shifted = as_vector(z) - as_vector(&self.anchor);
        let x = self.rotation.tr_mul(&shifted) + as_vector(&self.translation);
        x.as_slice().to_vec()
    }
}

#[derive(Clone)]
pub struct Problem {
    pub name: String,
    pub bounds: Bounds,
    objective: Objective,
    pub x_star: Vec<f64>,
    pub f_star: f64,
    pub local_optima: Vec<LocalOptimum>,
    pub instance_seed: u64,
    transform: Option<(InstanceTransform, Objective)>,
}

impl fmt::Debug for Problem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Problem")
            .field("name", &self.name)
            .field("dim", &self.dim())
            .field("x_star", &self.x_star)
            .field("f_star", &self.f_star)
            .field("local_optima", &self.local_optima.len())
            .field("instance_seed", &self.instance_seed)
            .finish()
    }
}

impl Problem {
    /// A problem from an arbitrary objective. `f_star` is taken as
    /// `objective(x_star)`.
    pub fn new(name: impl Into<String>, bounds: Bounds, objective: Objective, x_star: Vec<f64>) -> Result<Self> {
        if x_star.len() != bounds.dim() {
            return Err(Error::Dimension {
                expected: bounds.dim(),
                got: x_star.len(),
            });
        }
        if !bounds.contains(&x_star) {
            return Err(Error::config("x_star", "optimizer lies outside the bounds"));
        }
        let f_star = objective(&x_star);
        Ok(Problem {
            name: name.into(),
            bounds,
            objective,
            x_star,
            f_star,
            local_optima: Vec::new(),
            instance_seed: 0,
            transform: None,
        })
    }

    pub fn dim(&self) -> usize {
        self.bounds.dim()
    }

    pub fn evaluate(&self, x: &[f64]) -> f64 {
        (self.objective)(x)
    }

    pub fn objective(&self) -> Objective {
        Arc::clone(&self.objective)
    }

    /// The instance transform and untransformed objective, when the problem
    /// was built from a rotatable base function.
    pub fn transform(&self) -> Option<(&InstanceTransform, &Objective)> {
        self.transform.as_ref().map(|(t, f)| (t, f))
    }

    /// True if no in-bounds ±`h` coordinate perturbation improves on `x`.
    pub fn is_local_min(&self, x: &[f64], h: f64) -> bool {
        let fx = self.evaluate(x);
        let mut probe = x.to_vec();
        for i in 0..x.len() {
            for step in [-h, h] {
                let v = (x[i] + step).clamp(self.bounds.lower()[i], self.bounds.upper()[i]);
                if v == x[i] {
                    continue;
                }
                probe[i] = v;
                let fp = self.evaluate(&probe);
                probe[i] = x[i];
                if fp < fx {
                    return false;
                }
            }
        }
        true
    }

    /// CSV rows `kind,f,x_1..x_d` for the global and cataloged local optima.
    pub fn write_optima_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        let mut header = vec!["kind".to_string(), "f".to_string()];
        header.extend((1..=self.dim()).map(|i| format!("x{i}")));
        let to_err = |e: csv::Error| Error::Report(e.to_string());
        w.write_record(&header).map_err(to_err)?;
        let row = |kind: &str, f: f64, x: &[f64]| {
            let mut r = vec![kind.to_string(), f.to_string()];
            r.extend(x.iter().map(|v| v.to_string()));
            r
        };
        w.write_record(row("global", self.f_star, &self.x_star)).map_err(to_err)?;
        for lo in &self.local_optima {
            w.write_record(row("local", lo.f, &lo.x)).map_err(to_err)?;
        }
        w.flush().map_err(|e| Error::Report(e.to_string()))?;
        Ok(())
    }
}

/// Allowed dimensions of a catalog entry.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DimRule {
    Any,
    Exactly(usize),
    AtMost(usize),
}

impl DimRule {
    pub fn allows(self, d: usize) -> bool {
        d >= 1
            && match self {
                DimRule::Any => true,
                DimRule::Exactly(n) => d == n,
                DimRule::AtMost(n) => d <= n,
            }
    }
}

impl fmt::Display for DimRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DimRule::Any => write!(f, "any"),
            DimRule::Exactly(n) => write!(f, "{n}"),
            DimRule::AtMost(n) => write!(f, "1..={n}"),
        }
    }
}

#[derive(Clone, Copy, Debug)]
pub struct CatalogEntry {
    pub name: &'static str,
    pub dims: DimRule,
    pub summary: &'static str,
}

pub const CATALOG: &[CatalogEntry] = &[
    CatalogEntry { name: "sphere", dims: DimRule::Any, summary: "unimodal control, translated" },
    CatalogEntry { name: "rastrigin", dims: DimRule::Any, summary: "separable multimodal with global structure, translated" },
    CatalogEntry { name: "gallagher21", dims: DimRule::Any, summary: "21 random peaks, weak global structure, rotated" },
    CatalogEntry { name: "gallagher101", dims: DimRule::Any, summary: "101 random peaks, weak global structure, rotated" },
    CatalogEntry { name: "himmelblau", dims: DimRule::Exactly(2), summary: "Himmelblau with capped distance penalty; instance picks the global minimizer" },
    CatalogEntry { name: "himmelblau-unsquared", dims: DimRule::Exactly(2), summary: "same with the first term unsquared; x_star is only the penalty anchor" },
    CatalogEntry { name: "five-uneven-peak-trap", dims: DimRule::Exactly(1), summary: "globalized five-uneven-peak trap on [0, 30]" },
    CatalogEntry { name: "equal-maxima", dims: DimRule::Exactly(1), summary: "globalized sin^6(5 pi x) on [0, 1]" },
    CatalogEntry { name: "six-hump-camel", dims: DimRule::Exactly(2), summary: "globalized six-hump camel back" },
    CatalogEntry { name: "shubert", dims: DimRule::Exactly(2), summary: "globalized Shubert on [-10, 10]^2, 18 former global optima" },
    CatalogEntry { name: "vincent", dims: DimRule::AtMost(3), summary: "globalized Vincent on [0.25, 10]^d, 6^d former global optima" },
];

/// Maximization problem with a catalog of its global and local maximizers.
#[derive(Clone)]
pub struct MaximizationProblem {
    pub name: String,
    pub bounds: Bounds,
    pub f: Objective,
    pub global_maxima: Vec<Vec<f64>>,
    pub local_maxima: Vec<Vec<f64>>,
}

/// `min(0.01, ‖x − x*‖²)`
pub fn globalization_penalty(x: &[f64], x_star: &[f64]) -> f64 {
    squared_distance(x, x_star).min(0.01)
}

/// Turns a maximization problem with several global maxima into a
/// minimization problem `f′(x) = −f(x) + min(0.01, ‖x − x*‖²)` whose only
/// global minimizer is `global_maxima[index]`.
pub fn globalize(def: &MaximizationProblem, index: usize) -> Result<Problem> {
    let x_star = def
        .global_maxima
        .get(index)
        .cloned()
        .ok_or_else(|| Error::config("instance", "no such global optimum"))?;
    let f = Arc::clone(&def.f);
    let anchor = x_star.clone();
    let objective: Objective = Arc::new(move |x: &[f64]| -f(x) + globalization_penalty(x, &anchor));
    let mut problem = Problem::new(def.name.clone(), def.bounds.clone(), objective, x_star)?;
    problem.local_optima = def
        .global_maxima
        .iter()
        .enumerate()
        .filter(|(i, _)| *i != index)
        .map(|(_, x)| x)
        .chain(&def.local_maxima)
        .map(|x| LocalOptimum {
            x: x.clone(),
            f: problem.evaluate(x),
        })
        .collect();
    Ok(problem)
}

/// Builds catalog problem `name` in dimension `dim` for `instance_seed`.
pub fn make_problem(name: &str, dim: usize, instance_seed: u64) -> Result<Problem> {
    let entry = CATALOG
        .iter()
        .find(|e| e.name == name)
        .ok_or_else(|| Error::config("problem", format!("unknown problem `{name}`")))?;
    if !entry.dims.allows(dim) {
        return Err(Error::config(
            "dim",
            format!("`{name}` supports dimension {}, got {dim}", entry.dims),
        ));
    }
    let mut rng = RngStream::new(derive_seed(instance_seed, &[name_key(name), dim as u64]));
    let mut problem = match name {
        "sphere" => transformed(name, dim, &mut rng, false, Arc::new(sphere), vec![0.0; dim], |_, _| Vec::new())?,
        "rastrigin" => transformed(name, dim, &mut rng, false, Arc::new(rastrigin), vec![0.0; dim], |_, _| {
            rastrigin_lattice(dim)
        })?,
        "gallagher21" => make_gallagher(name, dim, 21, &mut rng)?,
        "gallagher101" => make_gallagher(name, dim, 101, &mut rng)?,
        "himmelblau" | "himmelblau-unsquared" => make_himmelblau(name, instance_seed)?,
        "five-uneven-peak-trap" => globalize(&trap_definition()?, (instance_seed % 2) as usize)?,
        "equal-maxima" => globalize(&equal_maxima_definition()?, (instance_seed % 5) as usize)?,
        "six-hump-camel" => globalize(&camel_definition()?, (instance_seed % 2) as usize)?,
        "shubert" => {
            let def = shubert_definition()?;
            let n = def.global_maxima.len() as u64;
            globalize(&def, (instance_seed % n) as usize)?
        }
        "vincent" => {
            let def = vincent_definition(dim)?;
            let n = def.global_maxima.len() as u64;
            globalize(&def, (instance_seed % n) as usize)?
        }
        _ => unreachable!("catalog entry without constructor"),
    };
    problem.instance_seed = instance_seed;
    Ok(problem)
}

fn transformed<L>(
    name: &str,
    dim: usize,
    rng: &mut RngStream,
    rotate: bool,
    base: Objective,
    anchor: Vec<f64>,
    locals: L,
) -> Result<Problem>
where
    L: Fn(&InstanceTransform, &Objective) -> Vec<(Vec<f64>, f64)>,
{
    let bounds = Bounds::uniform(dim, -5.0, 5.0)?;
    let translation: Vec<f64> = (0..dim).map(|_| rng.uniform_in(-4.0, 4.0)).collect();
    let rotation = if rotate {
        random_rotation(dim, rng)
    } else {
        Matrix::identity(dim, dim)
    };
    let transform = InstanceTransform {
        rotation,
        translation: translation.clone(),
        anchor,
    };
    Ok(assemble(name, bounds, transform, base, translation, locals))
}

fn assemble<L>(
    name: &str,
    bounds: Bounds,
    transform: InstanceTransform,
    base: Objective,
    x_star: Vec<f64>,
    locals: L,
) -> Problem
where
    L: Fn(&InstanceTransform, &Objective) -> Vec<(Vec<f64>, f64)>,
{
    let catalog: Vec<LocalOptimum> = locals(&transform, &base)
        .into_iter()
        .map(|(z, f)| LocalOptimum {
            x: transform.to_instance(&z),
            f,
        })
        .filter(|lo| bounds.contains(&lo.x))
        .collect();
    let t = transform.clone();
    let b = Arc::clone(&base);
    let objective: Objective = Arc::new(move |x: &[f64]| b(&t.to_base(x)));
    let f_star = objective(&x_star);
    Problem {
        name: name.to_string(),
        bounds,
        objective,
        x_star,
        f_star,
        local_optima: catalog,
        instance_seed: 0,
        transform: Some((transform, base)),
    }
}

const RASTRIGIN_CATALOG_LIMIT: usize = 10_000;

fn rastrigin_lattice(dim: usize) -> Vec<(Vec<f64>, f64)> {
    let per_axis: Vec<f64> = (-4..=4).map(rastrigin_local_min_1d).collect();
    let count = per_axis.len().pow(dim as u32);
    if count > RASTRIGIN_CATALOG_LIMIT {
        return Vec::new();
    }
    (0..count)
        .filter_map(|mut code| {
            let z: Vec<f64> = (0..dim)
                .map(|_| {
                    let v = per_axis[code % per_axis.len()];
                    code /= per_axis.len();
                    v
                })
                .collect();
            if z.iter().all(|v| *v == 0.0) {
                None
            } else {
                let f = rastrigin(&z);
                Some((z, f))
            }
        })
        .collect()
}

fn make_gallagher(name: &str, dim: usize, n_peaks: usize, rng: &mut RngStream) -> Result<Problem> {
    let bounds = Bounds::uniform(dim, -5.0, 5.0)?;
    let translation: Vec<f64> = (0..dim).map(|_| rng.uniform_in(-4.0, 4.0)).collect();
    let rotation = random_rotation(dim, rng);
    let transform = InstanceTransform {
        rotation,
        translation: translation.clone(),
        anchor: vec![0.0; dim],
    };
    let mut locations = vec![translation.clone()];
    locations.extend((1..n_peaks).map(|_| (0..dim).map(|_| rng.uniform_in(-4.9, 4.9)).collect()));
    let peaks = GallagherPeaks::generate(&locations, |x| transform.to_base(x), rng);
    let local: Vec<(Vec<f64>, f64)> = peaks
        .dominant_local_peaks()
        .into_iter()
        .map(|i| {
            let c = peaks.peaks[i].center.clone();
            let f = peaks.evaluate(&c);
            (c, f)
        })
        .collect();
    let base: Objective = Arc::new(move |z: &[f64]| peaks.evaluate(z));
    Ok(assemble(name, bounds, transform, base, translation, move |_, _| local.clone()))
}

fn make_himmelblau(name: &str, instance_seed: u64) -> Result<Problem> {
    let minimizers = himmelblau_minimizers();
    let index = (instance_seed % 4) as usize;
    let x_star = minimizers[index].to_vec();
    let anchor = x_star.clone();
    let objective: Objective = if name == "himmelblau" {
        Arc::new(move |x: &[f64]| modified_himmelblau(x, &anchor))
    } else {
        Arc::new(move |x: &[f64]| modified_himmelblau_unsquared(x, &anchor))
    };
    let mut problem = Problem::new(name, Bounds::uniform(2, -5.0, 5.0)?, objective, x_star)?;
    if name == "himmelblau" {
        problem.local_optima = minimizers
            .iter()
            .enumerate()
            .filter(|(i, _)| *i != index)
            .map(|(_, m)| LocalOptimum {
                x: m.to_vec(),
                f: problem.evaluate(m),
            })
            .collect();
    }
    Ok(problem)
}

fn trap_definition() -> Result<MaximizationProblem> {
    Ok(MaximizationProblem {
        name: "five-uneven-peak-trap".into(),
        bounds: Bounds::new(vec![0.0], vec![30.0])?,
        f: Arc::new(five_uneven_peak_trap),
        global_maxima: vec![vec![0.0], vec![30.0]],
        local_maxima: vec![vec![5.0], vec![12.5], vec![22.5]],
    })
}

fn equal_maxima_definition() -> Result<MaximizationProblem> {
    Ok(MaximizationProblem {
        name: "equal-maxima".into(),
        bounds: Bounds::new(vec![0.0], vec![1.0])?,
        f: Arc::new(equal_maxima),
        global_maxima: [0.1, 0.3, 0.5, 0.7, 0.9].iter().map(|x| vec![*x]).collect(),
        local_maxima: Vec::new(),
    })
}

fn camel_definition() -> Result<MaximizationProblem> {
    let refine = |s: [f64; 2]| newton2(s, six_hump_camel_gradient).to_vec();
    Ok(MaximizationProblem {
        name: "six-hump-camel".into(),
        bounds: Bounds::new(vec![-1.9, -1.1], vec![1.9, 1.1])?,
        f: Arc::new(|x: &[f64]| -4.0 * six_hump_camel(x)),
        global_maxima: vec![refine([0.0898, -0.7126]), refine([-0.0898, 0.7126])],
        local_maxima: vec![
            refine([-1.7036, 0.7961]),
            refine([1.7036, -0.7961]),
            refine([-1.6071, -0.5687]),
            refine([1.6071, 0.5687]),
        ],
    })
}

fn shubert_definition() -> Result<MaximizationProblem> {
    let (maxs, mins) = shubert_factor_extremes(-10.0, 10.0);
    let mut optima = Vec::new();
    for a in &maxs {
        for b in &mins {
            optima.push(vec![*a, *b]);
            optima.push(vec![*b, *a]);
        }
    }
    optima.sort_by(|p, q| p[0].total_cmp(&q[0]).then(p[1].total_cmp(&q[1])));
    Ok(MaximizationProblem {
        name: "shubert".into(),
        bounds: Bounds::uniform(2, -10.0, 10.0)?,
        f: Arc::new(|x: &[f64]| -shubert(x)),
        global_maxima: optima,
        local_maxima: Vec::new(),
    })
}

fn vincent_definition(dim: usize) -> Result<MaximizationProblem> {
    let axis = vincent_peak_coordinates();
    let count = axis.len().pow(dim as u32);
    let optima = (0..count)
        .map(|mut code| {
            (0..dim)
                .map(|_| {
                    let v = axis[code % axis.len()];
                    code /= axis.len();
                    v
                })
                .collect()
        })
        .collect();
    Ok(MaximizationProblem {
        name: "vincent".into(),
        bounds: Bounds::uniform(dim, 0.25, 10.0)?,
        f: Arc::new(vincent),
        global_maxima: optima,
        local_maxima: Vec::new(),
    })
}

/// Uniform point in the problem's box, as a vector.
pub fn random_point(problem: &Problem, rng: &mut RngStream) -> Vector {
    problem.bounds.sample_uniform(rng)
}
