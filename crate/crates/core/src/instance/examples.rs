//! Built-in instances and seeded generators.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Map, Value};

use super::{Decision, Instance};
use crate::cone::Cone;
use crate::error::{Error, Result};
use crate::imagesets::{prune_to_extreme, ImageSet, Point};
use crate::scalar::{points_eq, Scalar};

pub const EXAMPLE_NAMES: [&str; 7] = [
    "t_one",
    "strict_min",
    "cantor",
    "mfdvp",
    "mfdvp_polytope",
    "random_finite",
    "convex_polyhedral",
];

/// Image family of the convex polyhedral generator.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PolyShape {
    /// Seeded `C`, `E`, `h`.
    Random,
    /// `E = 0`: every decision has the same polytope.
    Constant,
    /// A fixed triangle translated by `(x1, -x1)` (plus `(x2, x2)` when
    /// `n = 2`).
    Shifted,
}

impl std::str::FromStr for PolyShape {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "random" => Ok(Self::Random),
            "constant" => Ok(Self::Constant),
            "shifted" => Ok(Self::Shifted),
            _ => Err(Error::InvalidParameter(format!("unknown shape `{s}`"))),
        }
    }
}

#[derive(Debug, Clone)]
pub struct ExampleParams {
    /// Grid points per axis (`t_one`: 3, `strict_min`: 5, `convex_polyhedral`: 17).
    pub grid: Option<usize>,
    /// Truncation `T` of the cantor example.
    pub t: usize,
    /// Image truncation `N >= T` of the cantor example (default `T + 1`).
    pub n: Option<usize>,
    pub seed: u64,
    /// Number of decisions of `random_finite`.
    pub size: usize,
    /// Largest image of `random_finite`.
    pub max_image: usize,
    /// Coordinates of `random_finite` are `k / denom` with `|k| <= 5 denom`.
    pub denom: i64,
    /// `random_finite`: store images as polytopes of their extreme points.
    pub polytope: bool,
    /// Use the cone `{y2 >= 0, y1 >= y2}` with `e = (1, 1/2)` instead of the orthant.
    pub skew_cone: bool,
    /// Decision dimension of `convex_polyhedral` (1 or 2).
    pub dim: usize,
    pub shape: PolyShape,
}

impl Default for ExampleParams {
    fn default() -> Self {
        Self {
            grid: None,
            t: 3,
            n: None,
            seed: 0,
            size: 6,
            max_image: 4,
            denom: 1,
            polytope: false,
            skew_cone: false,
            dim: 1,
            shape: PolyShape::Random,
        }
    }
}

pub fn make_example<T: Scalar>(name: &str, params: &ExampleParams) -> Result<Instance<T>> {
    match name {
        "t_one" => t_one(params.grid.unwrap_or(3)),
        "strict_min" => strict_min(params.grid.unwrap_or(5)),
        "cantor" => cantor(params.t, params.n.unwrap_or(params.t + 1)),
        "mfdvp" => mfdvp(false),
        "mfdvp_polytope" => mfdvp(true),
        "random_finite" => random_finite(params),
        "convex_polyhedral" => convex_polyhedral(params),
        other => Err(Error::UnknownExample(other.to_string())),
    }
}

fn q<T: Scalar>(n: i64, d: i64) -> T {
    T::from_ratio(n, d)
}

fn pt<T: Scalar>(a: i64, b: i64) -> Point<T> {
    vec![q(a, 1), q(b, 1)]
}

fn meta(generator: &str, extra: Value) -> Map<String, Value> {
    let mut m = Map::new();
    m.insert("generator".into(), json!(generator));
    if let Value::Object(o) = extra {
        m.extend(o);
    }
    m
}

/// Label for the grid value `num / den`.
fn grid_label(num: i64, den: i64) -> String {
    format!("{}", num as f64 / den as f64)
}

fn check_grid(g: usize) -> Result<()> {
    if g == 0 {
        return Err(Error::InvalidParameter("grid size must be at least 1".into()));
    }
    Ok(())
}

/// Grid on `[lo, hi]` as `(numerator, denominator)` pairs; `lo`, `hi` given
/// as fractions over `base`.
fn grid(g: usize, lo: i64, hi: i64, base: i64) -> Vec<(i64, i64)> {
    if g == 1 {
        return vec![(lo, base)];
    }
    let steps = g as i64 - 1;
    (0..g as i64)
        .map(|k| (lo * steps + k * (hi - lo), base * steps))
        .collect()
}

fn t_one<T: Scalar>(g: usize) -> Result<Instance<T>> {
    check_grid(g)?;
    let (decisions, images) = grid(g, 1, 2, 4)
        .into_iter()
        .map(|(n, d)| {
            let x: T = q(n, d);
            let img = ImageSet::Polytope(vec![pt(1, 0), pt(0, 1), vec![x.clone(), x.clone()]]);
            (Decision { label: grid_label(n, d), x: vec![x] }, img)
        })
        .unzip();
    Instance::new(Cone::orthant(2), decisions, images, meta("t_one", json!({ "grid": g })))
}

fn strict_min<T: Scalar>(g: usize) -> Result<Instance<T>> {
    check_grid(g)?;
    let (decisions, images) = grid(g, 0, 1, 1)
        .into_iter()
        .map(|(n, d)| {
            let x: T = q(n, d);
            let img = ImageSet::Finite(vec![vec![T::zero(), x.clone()]]);
            (Decision { label: grid_label(n, d), x: vec![x] }, img)
        })
        .unzip();
    Instance::new(Cone::orthant(2), decisions, images, meta("strict_min", json!({ "grid": g })))
}

/// `2^-k`.
fn half_pow<T: Scalar>(k: usize) -> T {
    let mut v = T::one();
    let two = q::<T>(2, 1);
    for _ in 0..k {
        v = v / two.clone();
    }
    v
}

/// `y^i`: the base point `(5/2, -5/2)` for `i = 0`, moved right and down for
/// `i >= 1` so that `y^{i,*}` lands on the line `y1 + y2 = 2`.
pub(crate) fn cantor_base<T: Scalar>(i: usize) -> Point<T> {
    let y0 = vec![q::<T>(5, 2), q::<T>(-5, 2)];
    if i == 0 {
        return y0;
    }
    let a: T = half_pow(i);
    let a_prev: T = half_pow(i - 1);
    let a_next: T = half_pow(i + 1);
    vec![
        y0[0].clone() + T::one() + a.clone() + a_next.clone(),
        y0[1].clone() + T::one() - a_prev - a - a_next,
    ]
}

/// `y^{i,k} = y^i + (sum_{s=i+1}^{k} 2^-s) (1,1)`.
pub(crate) fn cantor_point<T: Scalar>(i: usize, k: usize) -> Point<T> {
    let shift = (i + 1..=k).fold(T::zero(), |acc, s| acc + half_pow::<T>(s));
    cantor_base::<T>(i).into_iter().map(|v| v + shift.clone()).collect()
}

/// `y^{i,*} = y^i + 2^-i (1,1)`.
pub(crate) fn cantor_limit<T: Scalar>(i: usize) -> Point<T> {
    let shift: T = half_pow(i);
    cantor_base::<T>(i).into_iter().map(|v| v + shift.clone()).collect()
}

fn cantor<T: Scalar>(t_max: usize, n_max: usize) -> Result<Instance<T>> {
    if t_max == 0 {
        return Err(Error::InvalidParameter("cantor needs T >= 1".into()));
    }
    if n_max < t_max {
        return Err(Error::InvalidParameter(format!(
            "cantor needs N >= T, got N = {n_max} < T = {t_max}"
        )));
    }
    let mut decisions = Vec::new();
    let mut images = Vec::new();
    for t in 1..=t_max {
        let (num, den) = (t as i64 - 1, t as i64);
        let label = if num == 0 { "0".to_string() } else { format!("{num}/{den}") };
        decisions.push(Decision { label, x: vec![q(num, den)] });
        images.push(ImageSet::Finite((0..t).map(|i| cantor_point(i, t - 1)).collect()));
    }
    decisions.push(Decision { label: "1".into(), x: vec![T::one()] });
    images.push(ImageSet::Finite((0..=n_max).map(cantor_limit).collect()));
    Instance::new(
        Cone::orthant(2),
        decisions,
        images,
        meta("cantor", json!({ "T": t_max, "N": n_max })),
    )
}

fn mfdvp<T: Scalar>(polytope: bool) -> Result<Instance<T>> {
    let raw = [
        [pt(2, 0), pt(0, 2)],
        [pt(1, -1), pt(0, 2)],
        [pt(2, 0), pt(-1, 1)],
    ];
    let decisions = (0..3)
        .map(|k| Decision { label: k.to_string(), x: vec![q(k, 1)] })
        .collect();
    let images = raw
        .into_iter()
        .map(|p| {
            let p = p.to_vec();
            if polytope {
                ImageSet::Polytope(p)
            } else {
                ImageSet::Finite(p)
            }
        })
        .collect();
    let name = if polytope { "mfdvp_polytope" } else { "mfdvp" };
    Instance::new(Cone::orthant(2), decisions, images, meta(name, json!({})))
}

fn skew_cone<T: Scalar>() -> Cone<T> {
    Cone::new(vec![pt(0, 1), pt(1, -1)], vec![T::one(), q(1, 2)]).expect("valid cone")
}

fn random_finite<T: Scalar>(p: &ExampleParams) -> Result<Instance<T>> {
    if p.size == 0 || p.max_image == 0 || p.denom <= 0 {
        return Err(Error::InvalidParameter(
            "random_finite needs size, max_image and denom positive".into(),
        ));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(p.seed);
    let tol = T::default_tolerance();
    let span = 5 * p.denom;
    let mut decisions = Vec::with_capacity(p.size);
    let mut images = Vec::with_capacity(p.size);
    for k in 0..p.size {
        let count = rng.gen_range(1..=p.max_image);
        let mut points: Vec<Point<T>> = Vec::with_capacity(count);
        for _ in 0..count {
            let y: Point<T> = (0..2)
                .map(|_| q(rng.gen_range(-span..=span), p.denom))
                .collect();
            if !points.iter().any(|z| points_eq(z, &y, &tol)) {
                points.push(y);
            }
        }
        decisions.push(Decision { label: k.to_string(), x: vec![q(k as i64, 1)] });
        images.push(if p.polytope {
            ImageSet::Polytope(prune_to_extreme(&points)?)
        } else {
            ImageSet::Finite(points)
        });
    }
    let cone = if p.skew_cone { skew_cone() } else { Cone::orthant(2) };
    Instance::new(
        cone,
        decisions,
        images,
        meta(
            "random_finite",
            json!({
                "seed": p.seed, "size": p.size, "max_image": p.max_image,
                "denom": p.denom, "polytope": p.polytope, "skew_cone": p.skew_cone,
            }),
        ),
    )
}

/// Vertices of `{y in R^2 : C y <= rhs}` by pairwise line intersection.
fn polygon_vertices<T: Scalar>(c: &[[i64; 2]], rhs: &[T]) -> Result<Vec<Point<T>>> {
    let tol = T::default_tolerance();
    let mut out: Vec<Point<T>> = Vec::new();
    for j in 0..c.len() {
        for k in j + 1..c.len() {
            let det = c[j][0] * c[k][1] - c[j][1] * c[k][0];
            if det == 0 {
                continue;
            }
            let d: T = q(det, 1);
            let y1 = (rhs[j].clone() * q(c[k][1], 1) - rhs[k].clone() * q(c[j][1], 1)) / d.clone();
            let y2 = (rhs[k].clone() * q(c[j][0], 1) - rhs[j].clone() * q(c[k][0], 1)) / d;
            let y = vec![y1, y2];
            let feasible = c.iter().zip(rhs).all(|(row, r)| {
                q::<T>(row[0], 1) * y[0].clone() + q::<T>(row[1], 1) * y[1].clone()
                    <= r.clone() + tol.clone()
            });
            if feasible && !out.iter().any(|z| points_eq(z, &y, &tol)) {
                out.push(y);
            }
        }
    }
    prune_to_extreme(&out)
}

fn convex_polyhedral<T: Scalar>(p: &ExampleParams) -> Result<Instance<T>> {
    let n = p.dim;
    if !(1..=2).contains(&n) {
        return Err(Error::InvalidParameter("convex_polyhedral needs n in {1, 2}".into()));
    }
    let g = p.grid.unwrap_or(17);
    check_grid(g)?;
    let mut rng = ChaCha8Rng::seed_from_u64(p.seed);
    // The base triangle rows positively span the plane, so every value is bounded.
    let mut c: Vec<[i64; 2]> = vec![[-1, 0], [0, -1], [1, 1]];
    if p.shape != PolyShape::Shifted {
        for _ in 0..rng.gen_range(0..=2) {
            let row = loop {
                let r = [rng.gen_range(-3..=3), rng.gen_range(-3..=3)];
                if r != [0, 0] {
                    break r;
                }
            };
            c.push(row);
        }
    }
    let e: Vec<Vec<i64>> = c
        .iter()
        .map(|row| match p.shape {
            PolyShape::Random => (0..n).map(|_| rng.gen_range(-2..=2)).collect(),
            PolyShape::Constant => vec![0; n],
            PolyShape::Shifted => {
                let shifts = [[1, -1], [1, 1]];
                (0..n).map(|k| row[0] * shifts[k][0] + row[1] * shifts[k][1]).collect()
            }
        })
        .collect();
    // h_j >= sum_k |E_jk| keeps 0 in F(x) on the unit box.
    let h: Vec<i64> = e
        .iter()
        .map(|row| row.iter().map(|v: &i64| v.abs()).sum::<i64>() + rng.gen_range(1..=3))
        .collect();

    let axis = grid(g, 0, 1, 1);
    let points: Vec<Vec<(i64, i64)>> = if n == 1 {
        axis.iter().map(|&v| vec![v]).collect()
    } else {
        axis.iter()
            .flat_map(|&a| axis.iter().map(move |&b| vec![a, b]))
            .collect()
    };
    let mut decisions = Vec::with_capacity(points.len());
    let mut images = Vec::with_capacity(points.len());
    for xs in points {
        let x: Vec<T> = xs.iter().map(|&(a, b)| q(a, b)).collect();
        let rhs: Vec<T> = h
            .iter()
            .zip(&e)
            .map(|(hj, ej)| {
                ej.iter()
                    .zip(&x)
                    .fold(q::<T>(*hj, 1), |acc, (ejk, xk)| acc + q::<T>(*ejk, 1) * xk.clone())
            })
            .collect();
        let label = xs
            .iter()
            .map(|&(a, b)| grid_label(a, b))
            .collect::<Vec<_>>()
            .join(",");
        decisions.push(Decision { label, x });
        images.push(ImageSet::Polytope(polygon_vertices(&c, &rhs)?));
    }
    let shape = match p.shape {
        PolyShape::Random => "random",
        PolyShape::Constant => "constant",
        PolyShape::Shifted => "shifted",
    };
    Instance::new(
        Cone::orthant(2),
        decisions,
        images,
        meta(
            "convex_polyhedral",
            json!({ "seed": p.seed, "grid": g, "n": n, "shape": shape, "C": c, "E": e, "h": h }),
        ),
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::Rational;

    fn r(n: i64, d: i64) -> Rational {
        Rational::from_ratio(n, d)
    }

    #[test]
    fn every_example_validates() {
        for name in EXAMPLE_NAMES {
            let inst = make_example::<Rational>(name, &ExampleParams::default()).unwrap();
            inst.validate().unwrap();
            let f = make_example::<f64>(name, &ExampleParams::default()).unwrap();
            assert_eq!(f.len(), inst.len(), "{name}");
        }
        assert!(matches!(
            make_example::<f64>("nope", &ExampleParams::default()),
            Err(Error::UnknownExample(_))
        ));
    }

    #[test]
    fn cantor_points() {
        let params = ExampleParams { t: 3, n: Some(4), ..Default::default() };
        let inst = make_example::<Rational>("cantor", &params).unwrap();
        let half = inst.index_of("1/2").unwrap();
        assert_eq!(
            inst.images[half].points(),
            &[cantor_point::<Rational>(0, 1), vec![r(17, 4), r(-13, 4)]]
        );
        assert_eq!(cantor_limit::<Rational>(0), vec![r(7, 2), r(-3, 2)]);
        let one = inst.index_of("1").unwrap();
        assert_eq!(inst.images[one].len(), 5);
        for y in inst.images[one].points() {
            assert_eq!(y[0].clone() + y[1].clone(), r(2, 1));
        }
        let bad = ExampleParams { t: 4, n: Some(3), ..Default::default() };
        assert!(make_example::<Rational>("cantor", &bad).is_err());
    }

    #[test]
    fn mfdvp_images() {
        let inst = make_example::<Rational>("mfdvp", &ExampleParams::default()).unwrap();
        assert_eq!(inst.labels(), vec!["0", "1", "2"]);
        assert_eq!(inst.images[1], ImageSet::Finite(vec![pt(1, -1), pt(0, 2)]));
        assert_eq!(inst.images[2], ImageSet::Finite(vec![pt(2, 0), pt(-1, 1)]));
    }

    #[test]
    fn grids() {
        let params = ExampleParams { grid: Some(9), ..Default::default() };
        let t = make_example::<Rational>("t_one", &params).unwrap();
        assert_eq!(t.labels()[0], "0.25");
        assert_eq!(t.labels()[8], "0.5");
        assert_eq!(t.decisions[1].x[0], r(9, 32));
        let s = make_example::<f64>("strict_min", &ExampleParams::default()).unwrap();
        assert_eq!(s.labels(), vec!["0", "0.25", "0.5", "0.75", "1"]);
    }

    #[test]
    fn random_is_reproducible() {
        let p = ExampleParams { seed: 42, denom: 4, ..Default::default() };
        let a = make_example::<Rational>("random_finite", &p).unwrap();
        let b = make_example::<Rational>("random_finite", &p).unwrap();
        assert_eq!(a, b);
        let c = make_example::<Rational>("random_finite", &ExampleParams { seed: 43, ..p }).unwrap();
        assert_ne!(a, c);
    }

    #[test]
    fn convex_polyhedral_values_contain_origin() {
        for shape in [PolyShape::Random, PolyShape::Constant, PolyShape::Shifted] {
            for dim in [1, 2] {
                let p = ExampleParams { shape, dim, grid: Some(4), seed: 5, ..Default::default() };
                let inst = make_example::<Rational>("convex_polyhedral", &p).unwrap();
                assert_eq!(inst.len(), 4usize.pow(dim as u32));
                for img in &inst.images {
                    assert!(img.len() >= 3);
                    let origin = vec![r(0, 1), r(0, 1)];
                    assert!(crate::imagesets::in_convex_hull(&origin, img.points()).unwrap());
                }
            }
        }
    }
}
