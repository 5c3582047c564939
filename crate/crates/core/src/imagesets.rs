//! Image sets `F(x)`: finite point lists and polytopes given by vertices.

use crate::cone::{Cone, Order};
use crate::error::{Error, Result};
use crate::lp::{lp_feasible, lp_maximize, LinearProgram, Outcome};
use crate::scalar::{dist_sq, dot, json_point, points_eq, Scalar};
use crate::setcover::{exact_set_cover, greedy_set_cover, BitSet};

pub type Point<T> = Vec<T>;

#[derive(Debug, Clone, PartialEq)]
pub enum ImageSet<T> {
    Finite(Vec<Point<T>>),
    /// Convex hull of the listed vertices.
    Polytope(Vec<Point<T>>),
}

/// How a target point is reached from an image: an index into a finite
/// image, or convex multipliers over polytope vertices.
#[derive(Debug, Clone, PartialEq)]
pub enum Witness<T> {
    Point(usize),
    Convex(Vec<T>),
}

impl<T: Scalar> Witness<T> {
    /// The image point this witness designates.
    pub fn resolve(&self, image: &ImageSet<T>) -> Point<T> {
        match self {
            Witness::Point(i) => image.points()[*i].clone(),
            Witness::Convex(lambda) => image.combination(lambda),
        }
    }

    pub fn to_json(&self) -> serde_json::Value {
        match self {
            Witness::Point(i) => serde_json::json!({ "index": i }),
            Witness::Convex(l) => serde_json::json!({ "lambda": json_point(l) }),
        }
    }
}

impl<T: Scalar> ImageSet<T> {
    /// Points of a finite image or vertices of a polytope.
    pub fn points(&self) -> &[Point<T>] {
        match self {
            ImageSet::Finite(p) | ImageSet::Polytope(p) => p,
        }
    }

    pub fn is_finite(&self) -> bool {
        matches!(self, ImageSet::Finite(_))
    }

    pub fn kind_name(&self) -> &'static str {
        match self {
            ImageSet::Finite(_) => "finite",
            ImageSet::Polytope(_) => "polytope",
        }
    }

    pub fn dim(&self) -> usize {
        self.points().first().map_or(0, Vec::len)
    }

    pub fn len(&self) -> usize {
        self.points().len()
    }

    pub fn is_empty(&self) -> bool {
        self.points().is_empty()
    }

    /// Same variant with every point moved by `t`.
    pub fn translate(&self, t: &[T]) -> Self {
        let moved = self
            .points()
            .iter()
            .map(|p| crate::scalar::add(p, t))
            .collect();
        match self {
            ImageSet::Finite(_) => ImageSet::Finite(moved),
            ImageSet::Polytope(_) => ImageSet::Polytope(moved),
        }
    }

    fn combination(&self, lambda: &[T]) -> Point<T> {
        let m = self.dim();
        let mut out = vec![T::zero(); m];
        for (l, v) in lambda.iter().zip(self.points()) {
            for (o, c) in out.iter_mut().zip(v) {
                *o = o.clone() + l.clone() * c.clone();
            }
        }
        out
    }

    /// `Min(A, K)` (`weak = false`) or `WMin(A, K)` (`weak = true`) of a
    /// finite image.
    pub fn min_elements(&self, cone: &Cone<T>, weak: bool) -> Result<Vec<Point<T>>> {
        let ImageSet::Finite(points) = self else {
            return Err(Error::PolytopeUnsupported);
        };
        Ok(min_indices(points, cone, weak)
            .into_iter()
            .map(|i| points[i].clone())
            .collect())
    }

    /// `max { eps : b - eps e in A + K }`.
    pub fn point_margin(&self, b: &[T], cone: &Cone<T>) -> Result<T> {
        Ok(self.point_margin_witness(b, cone)?.0)
    }

    /// Point margin together with the image point attaining it.
    pub fn point_margin_witness(&self, b: &[T], cone: &Cone<T>) -> Result<(T, Witness<T>)> {
        match self {
            ImageSet::Finite(points) => {
                let mut best: Option<(T, usize)> = None;
                for (i, a) in points.iter().enumerate() {
                    let mu = cone.margin(a, b);
                    if best.as_ref().is_none_or(|(v, _)| mu > *v) {
                        best = Some((mu, i));
                    }
                }
                let (mu, i) = best.ok_or(Error::EmptyImage("point_margin".into()))?;
                Ok((mu, Witness::Point(i)))
            }
            ImageSet::Polytope(vertices) => polytope_point_margin(b, vertices, cone),
        }
    }

    /// Witness `a in A` with `a <=_K b - eps e` and `a != b - eps e`, if any.
    pub fn strong_witness(&self, b: &[T], cone: &Cone<T>, eps: &T) -> Result<Option<Witness<T>>> {
        match self {
            ImageSet::Finite(points) => Ok(points
                .iter()
                .position(|a| cone.compare(a, b, eps, Order::Strong))
                .map(Witness::Point)),
            ImageSet::Polytope(vertices) => {
                let target = cone.shift(b, eps);
                polytope_strong_witness(&target, vertices, cone)
            }
        }
    }
}

/// Indices of the minimal (or weakly minimal) points of a finite set.
pub fn min_indices<T: Scalar>(points: &[Point<T>], cone: &Cone<T>, weak: bool) -> Vec<usize> {
    let zero = T::zero();
    let order = if weak { Order::Strict } else { Order::Strong };
    (0..points.len())
        .filter(|&i| {
            !points
                .iter()
                .any(|a| cone.compare(a, &points[i], &zero, order))
        })
        .collect()
}

/// LP: maximize eps s.t. `A (b - eps e - V lambda) >= 0`, `sum lambda = 1`.
fn polytope_point_margin<T: Scalar>(
    b: &[T],
    vertices: &[Point<T>],
    cone: &Cone<T>,
) -> Result<(T, Witness<T>)> {
    let k = vertices.len();
    // variables: lambda_0..lambda_{k-1} >= 0, eps free
    let mut prog = LinearProgram::nonneg(k + 1).lower_bound(k, None);
    let mut obj = vec![T::zero(); k + 1];
    obj[k] = T::one();
    prog = prog.maximize(obj);
    for (a, ae) in cone.rows().iter().zip(cone.row_dot_e()) {
        let mut row: Vec<T> = vertices.iter().map(|v| -dot(a, v)).collect();
        row.push(-ae.clone());
        prog = prog.ge(row, -dot(a, b));
    }
    let mut simplex = vec![T::one(); k];
    simplex.push(T::zero());
    prog = prog.eq(simplex, T::one());
    match lp_maximize(&prog)? {
        Outcome::Optimal { value, mut point } => {
            point.truncate(k);
            Ok((value, Witness::Convex(point)))
        }
        other => Err(Error::Parse(format!(
            "point margin LP returned {other:?}; numerically degenerate polytope"
        ))),
    }
}

/// LP: maximize `sum_j a_j.(t - V lambda)` s.t. `A (t - V lambda) >= 0`,
/// `sum lambda = 1`. A positive optimum means `t - V lambda in K \ {0}`,
/// since total slack zero forces `A k = 0`, hence `k = 0` for a pointed cone.
fn polytope_strong_witness<T: Scalar>(
    target: &[T],
    vertices: &[Point<T>],
    cone: &Cone<T>,
) -> Result<Option<Witness<T>>> {
    let k = vertices.len();
    let tol = T::default_tolerance();
    let mut prog = LinearProgram::nonneg(k);
    let mut obj = vec![T::zero(); k];
    for a in cone.rows() {
        let row: Vec<T> = vertices.iter().map(|v| -dot(a, v)).collect();
        for (o, r) in obj.iter_mut().zip(&row) {
            *o = o.clone() + r.clone();
        }
        prog = prog.ge(row, -dot(a, target));
    }
    prog = prog.maximize(obj).eq(vec![T::one(); k], T::one());
    let constant = cone
        .rows()
        .iter()
        .fold(T::zero(), |acc, a| acc + dot(a, target));
    match lp_maximize(&prog)? {
        Outcome::Optimal { value, point } => {
            if value + constant > tol {
                Ok(Some(Witness::Convex(point)))
            } else {
                Ok(None)
            }
        }
        Outcome::Infeasible => Ok(None),
        Outcome::Unbounded => Err(Error::Parse("bounded LP reported unbounded".into())),
    }
}

/// Vertices `v` of `conv(vertices)` that no other hull point strongly
/// dominates (`p <=_K v`, `p != v`).
pub fn minimal_vertices<T: Scalar>(vertices: &[Point<T>], cone: &Cone<T>) -> Result<Vec<Point<T>>> {
    let zero = T::zero();
    let mut out = Vec::new();
    for v in dedup_points(vertices) {
        if polytope_strong_witness(&cone.shift(&v, &zero), vertices, cone)?.is_none() {
            out.push(v);
        }
    }
    Ok(out)
}

fn dedup_points<T: Scalar>(points: &[Point<T>]) -> Vec<Point<T>> {
    let tol = T::default_tolerance();
    let mut out: Vec<Point<T>> = Vec::with_capacity(points.len());
    for p in points {
        if !out.iter().any(|q| points_eq(p, q, &tol)) {
            out.push(p.clone());
        }
    }
    out
}

/// `point in conv(others)` by LP feasibility.
pub fn in_convex_hull<T: Scalar>(point: &[T], others: &[Point<T>]) -> Result<bool> {
    if others.is_empty() {
        return Ok(false);
    }
    let k = others.len();
    let mut prog = LinearProgram::nonneg(k).eq(vec![T::one(); k], T::one());
    for c in 0..point.len() {
        let row = others.iter().map(|v| v[c].clone()).collect();
        prog = prog.eq(row, point[c].clone());
    }
    Ok(lp_feasible(&prog)?.feasible)
}

/// Drops duplicates and every point that is a convex combination of the rest.
pub fn prune_to_extreme<T: Scalar>(vertices: &[Point<T>]) -> Result<Vec<Point<T>>> {
    let mut pts = dedup_points(vertices);
    let mut i = 0;
    while i < pts.len() {
        let others: Vec<Point<T>> = pts
            .iter()
            .enumerate()
            .filter(|&(j, _)| j != i)
            .map(|(_, p)| p.clone())
            .collect();
        if in_convex_hull(&pts[i], &others)? {
            pts.remove(i);
        } else {
            i += 1;
        }
    }
    Ok(pts)
}

/// Squared Hausdorff distance between finite sets (exact for rationals).
pub fn hausdorff_squared<T: Scalar>(a: &ImageSet<T>, b: &ImageSet<T>) -> Result<T> {
    if !a.is_finite() || !b.is_finite() {
        return Err(Error::PolytopeUnsupported);
    }
    if a.dim() != b.dim() {
        return Err(Error::DimensionMismatch(format!(
            "hausdorff between dimensions {} and {}",
            a.dim(),
            b.dim()
        )));
    }
    let directed = |from: &[Point<T>], to: &[Point<T>]| {
        from.iter()
            .map(|p| {
                to.iter()
                    .map(|q| dist_sq(p, q))
                    .reduce(crate::scalar::min_of)
                    .unwrap_or_else(T::zero)
            })
            .reduce(crate::scalar::max_of)
            .unwrap_or_else(T::zero)
    };
    Ok(crate::scalar::max_of(
        directed(a.points(), b.points()),
        directed(b.points(), a.points()),
    ))
}

pub fn hausdorff<T: Scalar>(a: &ImageSet<T>, b: &ImageSet<T>) -> Result<T> {
    Ok(hausdorff_squared(a, b)?.sqrt_value())
}

#[derive(Debug, Clone, PartialEq)]
pub struct Covering<T> {
    pub count: usize,
    pub centers: Vec<Point<T>>,
    /// `count` is the minimum over center subsets of the image.
    pub exact: bool,
}

/// Above this many points covering falls back to greedy.
pub const EXACT_COVER_LIMIT: usize = 24;

/// Internal covering with centers drawn from the image itself and closed
/// Euclidean balls of radius `eps`.
pub fn covering_number_internal<T: Scalar>(a: &ImageSet<T>, eps: &T) -> Result<Covering<T>> {
    if *eps <= T::zero() {
        return Err(Error::InvalidParameter("covering radius must be positive".into()));
    }
    covering_internal_sq(a, &(eps.clone() * eps.clone()))
}

/// As [`covering_number_internal`] with the squared radius given directly.
pub fn covering_internal_sq<T: Scalar>(a: &ImageSet<T>, radius_sq: &T) -> Result<Covering<T>> {
    let ImageSet::Finite(points) = a else {
        return Err(Error::PolytopeUnsupported);
    };
    let n = points.len();
    let balls: Vec<BitSet> = points
        .iter()
        .map(|c| {
            let mut s = BitSet::new(n);
            for (j, p) in points.iter().enumerate() {
                if dist_sq(c, p) <= *radius_sq {
                    s.insert(j);
                }
            }
            s
        })
        .collect();
    let exact = n <= EXACT_COVER_LIMIT;
    let chosen = if exact {
        exact_set_cover(n, &balls)
    } else {
        greedy_set_cover(n, &balls)
    }
    .expect("every point covers itself");
    Ok(Covering {
        count: chosen.len(),
        centers: chosen.iter().map(|&i| points[i].clone()).collect(),
        exact,
    })
}

/// Domination property: `Min(A,K)` nonempty and `A subset Min(A,K) + K`.
pub fn domination_check<T: Scalar>(a: &ImageSet<T>, cone: &Cone<T>) -> Result<bool> {
    let mins = a.min_elements(cone, false)?;
    if mins.is_empty() {
        return Ok(false);
    }
    let zero = T::zero();
    Ok(a
        .points()
        .iter()
        .all(|p| mins.iter().any(|m| cone.compare(m, p, &zero, Order::Weak))))
}
