//! Projected solution sets of the vectorized problem `VP_p`: decisions `x`
//! admitting a tuple `(y^1, ..., y^p)` of points of `F(x)` that no
//! `(x', y'^1, ..., y'^p)` dominates in the product cone `K^p`.
//!
//! Membership is decided on a candidate pool `M(x)` of minimal points.
//! With `D(x') = {b in M : some y in F(x') has y < b - eps e}` and
//! `C(x') = M \ D(x')`, a tuple survives `x'` iff one of its components lies
//! in `C(x')`. Weak membership at budget `p` is therefore a hitting set of
//! size at most `p` for the family `{C(x')}`.

use rayon::prelude::*;
use serde_json::{json, Value};

use crate::cone::{Cone, Order};
use crate::error::{Error, Result};
use crate::imagesets::{covering_internal_sq, min_indices, minimal_vertices, ImageSet, Point, Witness};
use crate::instance::Instance;
use crate::scalar::{json_point, le_tol, lt_tol, points_eq, Scalar};
use crate::setcover::{exact_set_cover, BitSet};
use crate::solver_direct::{solve_direct, Concept};

/// Largest candidate pool handled by the exact hitting-set search.
pub const POOL_CAP: usize = 24;
/// Largest number of subsets enumerated for min membership.
pub const SUBSET_CAP: u128 = 2_000_000;
/// Largest number of tuples per decision enumerated by the brute-force oracle.
pub const TUPLE_CAP: u128 = 1_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum VpKind {
    /// `eps`-weakly minimal tuples (interior of `K^p`).
    Weak,
    /// `eps`-minimal tuples (`K^p \ {0}`).
    Min,
}

impl VpKind {
    pub fn name(self) -> &'static str {
        match self {
            VpKind::Weak => "weak",
            VpKind::Min => "min",
        }
    }
}

impl std::str::FromStr for VpKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "weak" => Ok(VpKind::Weak),
            "min" => Ok(VpKind::Min),
            _ => Err(Error::InvalidParameter(format!(
                "unknown kind `{s}` (expected weak or min)"
            ))),
        }
    }
}

/// Why a competitor `x'` fails to dominate a member tuple.
#[derive(Debug, Clone, PartialEq)]
pub enum Survival {
    /// Tuple component `i` has no `y in F(x')` below it (strictly, for the
    /// weak kind; weakly, for the min kind).
    Escapes(usize),
    /// Min kind: every component is weakly dominated but only by `b - eps e`
    /// itself.
    NotStrict,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Verdict<T> {
    Member { surviving: Vec<(String, Survival)> },
    /// Weak kind: `x'` strictly dominates every pool point, `witnesses[i]`
    /// in `F(x')` below `tuple[i]`.
    Dominated { by: String, witnesses: Vec<Witness<T>> },
    /// Weak kind: the smallest surviving tuple (`tuple`) is longer than `p`.
    BudgetExceeded { required_p: usize },
    /// Min kind: every pool subset of size at most `p` is dominated.
    NoUndominatedSubset,
    /// Brute-force oracle: every tuple of `F(x)^p` is dominated.
    AllTuplesDominated,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TupleCertificate<T> {
    pub label: String,
    pub tuple: Vec<Point<T>>,
    pub verdict: Verdict<T>,
}

impl<T: Scalar> TupleCertificate<T> {
    pub fn is_member(&self) -> bool {
        matches!(self.verdict, Verdict::Member { .. })
    }

    /// Re-checks the certificate against the instance definitions.
    pub fn verify(&self, inst: &Instance<T>, eps: &T, kind: VpKind) -> Result<bool> {
        let x = inst.index_of(&self.label)?;
        let cone = &inst.cone;
        let tol = T::default_tolerance();
        for y in &self.tuple {
            if !image_contains(&inst.images[x], y)? {
                return Ok(false);
            }
        }
        match &self.verdict {
            Verdict::Member { surviving } => {
                if surviving.len() != inst.len() {
                    return Ok(false);
                }
                for (label, why) in surviving {
                    let img = &inst.images[inst.index_of(label)?];
                    let ok = match why {
                        Survival::Escapes(i) => {
                            let Some(b) = self.tuple.get(*i) else {
                                return Ok(false);
                            };
                            let mu = img.point_margin(b, cone)?;
                            match kind {
                                VpKind::Weak => le_tol(&mu, eps, &tol),
                                VpKind::Min => lt_tol(&mu, eps, &tol),
                            }
                        }
                        Survival::NotStrict => {
                            let mut ok = kind == VpKind::Min;
                            for b in &self.tuple {
                                ok &= img.strong_witness(b, cone, eps)?.is_none();
                            }
                            ok
                        }
                    };
                    if !ok {
                        return Ok(false);
                    }
                }
                Ok(true)
            }
            Verdict::Dominated { by, witnesses } => {
                let img = &inst.images[inst.index_of(by)?];
                Ok(kind == VpKind::Weak
                    && witnesses.len() == self.tuple.len()
                    && witnesses.iter().zip(&self.tuple).all(|(w, b)| {
                        cone.compare(&w.resolve(img), b, eps, Order::Strict)
                    }))
            }
            Verdict::BudgetExceeded { required_p } => Ok(kind == VpKind::Weak && *required_p == self.tuple.len()),
            Verdict::NoUndominatedSubset => Ok(kind == VpKind::Min),
            Verdict::AllTuplesDominated => Ok(true),
        }
    }

    pub fn to_json(&self) -> Value {
        let verdict = match &self.verdict {
            Verdict::Member { surviving } => json!({
                "member": surviving.iter().map(|(l, s)| match s {
                    Survival::Escapes(i) => json!({ "x": l, "escapes": i }),
                    Survival::NotStrict => json!({ "x": l, "not_strict": true }),
                }).collect::<Vec<_>>(),
            }),
            Verdict::Dominated { by, witnesses } => json!({
                "dominated": {
                    "by": by,
                    "witnesses": witnesses.iter().map(Witness::to_json).collect::<Vec<_>>(),
                }
            }),
            Verdict::BudgetExceeded { required_p } => json!({ "budget_exceeded": { "required_p": required_p } }),
            Verdict::NoUndominatedSubset => json!({ "no_undominated_subset": true }),
            Verdict::AllTuplesDominated => json!({ "all_tuples_dominated": true }),
        };
        json!({
            "x": self.label,
            "tuple": self.tuple.iter().map(|p| json_point(p)).collect::<Vec<_>>(),
            "verdict": verdict,
        })
    }
}

fn image_contains<T: Scalar>(img: &ImageSet<T>, y: &[T]) -> Result<bool> {
    let tol = T::default_tolerance();
    match img {
        ImageSet::Finite(p) => Ok(p.iter().any(|a| points_eq(a, y, &tol))),
        ImageSet::Polytope(v) => crate::imagesets::in_convex_hull(y, v),
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct VpReport<T> {
    pub kind: VpKind,
    pub p: usize,
    pub epsilon: T,
    pub members: Vec<String>,
    /// One per decision, in instance order.
    pub certificates: Vec<TupleCertificate<T>>,
    /// Excluded labels whose polytope pool is not known to be complete at
    /// this `p`: their exclusion may be an artefact of the pool.
    pub incomplete: Vec<String>,
}

impl<T: Scalar> VpReport<T> {
    pub fn is_member(&self, label: &str) -> bool {
        self.members.iter().any(|m| m == label)
    }

    pub fn to_json(&self) -> Value {
        json!({
            "kind": self.kind.name(),
            "p": self.p,
            "epsilon": self.epsilon.to_json(),
            "members": self.members,
            "incomplete": self.incomplete,
            "certificates": self.certificates.iter().map(TupleCertificate::to_json).collect::<Vec<_>>(),
        })
    }
}

/// Candidate pool `M(x)`.
#[derive(Debug, Clone, PartialEq)]
pub struct CandidatePool<T> {
    pub points: Vec<Point<T>>,
    /// Finite image: the pool is `Min(F(x), K)` and complete for every `p`.
    pub finite: bool,
}

impl<T> CandidatePool<T> {
    /// Whether pool-based answers are exact at budget `p`.
    pub fn complete(&self, p: usize) -> bool {
        self.finite || p >= self.points.len()
    }
}

/// `Min(F(x), K)` for finite images, the minimal vertices for polytopes.
pub fn candidate_pool<T: Scalar>(inst: &Instance<T>, x: usize) -> Result<CandidatePool<T>> {
    let img = &inst.images[x];
    match img {
        ImageSet::Finite(points) => Ok(CandidatePool {
            points: min_indices(points, &inst.cone, false)
                .into_iter()
                .map(|i| points[i].clone())
                .collect(),
            finite: true,
        }),
        ImageSet::Polytope(v) => Ok(CandidatePool {
            points: minimal_vertices(v, &inst.cone)?,
            finite: false,
        }),
    }
}

/// Cached point margins of one decision's pool against every image.
#[derive(Debug, Clone)]
pub struct DominationTable<T> {
    pub x: usize,
    pub pool: CandidatePool<T>,
    /// `margins[x'][j] = point_margin(pool[j], F(x'))`.
    pub margins: Vec<Vec<T>>,
    /// Points of `F(x')` attaining `margins[x'][j]`.
    witnesses: Vec<Vec<Witness<T>>>,
}

impl<T: Scalar> DominationTable<T> {
    pub fn build(inst: &Instance<T>, x: usize) -> Result<Self> {
        let pool = candidate_pool(inst, x)?;
        if pool.points.len() > POOL_CAP {
            return Err(Error::CapExceeded {
                needed: pool.points.len() as u128,
                cap: POOL_CAP as u128,
            });
        }
        let mut margins = Vec::with_capacity(inst.len());
        let mut witnesses = Vec::with_capacity(inst.len());
        for img in &inst.images {
            let (m, w): (Vec<T>, Vec<Witness<T>>) = pool
                .points
                .iter()
                .map(|b| img.point_margin_witness(b, &inst.cone))
                .collect::<Result<Vec<_>>>()?
                .into_iter()
                .unzip();
            margins.push(m);
            witnesses.push(w);
        }
        Ok(Self { x, pool, margins, witnesses })
    }

    /// `b_j in D(x')`.
    pub fn strictly_dominated(&self, other: usize, j: usize, eps: &T) -> bool {
        lt_tol(eps, &self.margins[other][j], &T::default_tolerance())
    }

    /// `C(x') = M \ D(x')` for every `x'`.
    pub fn complements(&self, eps: &T) -> Vec<BitSet> {
        let k = self.pool.points.len();
        (0..self.margins.len())
            .map(|o| {
                let mut s = BitSet::new(k);
                for j in 0..k {
                    if !self.strictly_dominated(o, j, eps) {
                        s.insert(j);
                    }
                }
                s
            })
            .collect()
    }
}

/// `rel[competitor][pool point]`.
type Relation = Vec<Vec<bool>>;

/// Decides membership of every decision, reusing margin tables across
/// `(p, eps, kind)` queries.
pub struct Vectorizer<'a, T> {
    inst: &'a Instance<T>,
    tables: Vec<DominationTable<T>>,
}

impl<'a, T: Scalar> Vectorizer<'a, T> {
    pub fn new(inst: &'a Instance<T>) -> Result<Self> {
        let tables = (0..inst.len())
            .into_par_iter()
            .map(|x| DominationTable::build(inst, x))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { inst, tables })
    }

    pub fn table(&self, x: usize) -> &DominationTable<T> {
        &self.tables[x]
    }

    pub fn membership(&self, p: usize, eps: &T, kind: VpKind) -> Result<VpReport<T>> {
        check_params(p, eps)?;
        let certificates = (0..self.inst.len())
            .into_par_iter()
            .map(|x| self.decide(x, p, eps, kind))
            .collect::<Result<Vec<_>>>()?;
        let mut members = Vec::new();
        let mut incomplete = Vec::new();
        for (x, c) in certificates.iter().enumerate() {
            if c.is_member() {
                members.push(c.label.clone());
            } else if !self.tables[x].pool.complete(p) {
                incomplete.push(c.label.clone());
            }
        }
        Ok(VpReport {
            kind,
            p,
            epsilon: eps.clone(),
            members,
            certificates,
            incomplete,
        })
    }

    pub fn decide(&self, x: usize, p: usize, eps: &T, kind: VpKind) -> Result<TupleCertificate<T>> {
        match kind {
            VpKind::Weak => self.decide_weak(x, Some(p), eps),
            VpKind::Min => self.decide_min(x, Some(p), eps),
        }
    }

    /// Weak kind with `p = None` returns the minimum hitting set.
    fn decide_weak(&self, x: usize, p: Option<usize>, eps: &T) -> Result<TupleCertificate<T>> {
        let t = &self.tables[x];
        let label = self.inst.decisions[x].label.clone();
        let comps = t.complements(eps);
        if let Some(o) = comps.iter().position(BitSet::is_empty) {
            return Ok(TupleCertificate {
                label,
                tuple: t.pool.points.clone(),
                verdict: Verdict::Dominated {
                    by: self.inst.decisions[o].label.clone(),
                    witnesses: t.witnesses[o].clone(),
                },
            });
        }
        // Elements are competitors, sets are pool points.
        let k = t.pool.points.len();
        let sets: Vec<BitSet> = (0..k)
            .map(|j| {
                let mut s = BitSet::new(comps.len());
                for (o, c) in comps.iter().enumerate() {
                    if c.contains(j) {
                        s.insert(o);
                    }
                }
                s
            })
            .collect();
        let hit = exact_set_cover(comps.len(), &sets).expect("every complement is nonempty");
        let mut tuple: Vec<Point<T>> = hit.iter().map(|&j| t.pool.points[j].clone()).collect();
        if let Some(p) = p {
            if hit.len() > p {
                return Ok(TupleCertificate {
                    label,
                    tuple,
                    verdict: Verdict::BudgetExceeded { required_p: hit.len() },
                });
            }
            // Repeating a component keeps the tuple undominated.
            while tuple.len() < p {
                tuple.push(tuple.last().expect("nonempty hitting set").clone());
            }
        }
        let surviving = comps
            .iter()
            .enumerate()
            .map(|(o, c)| {
                let i = hit.iter().position(|&j| c.contains(j)).expect("hitting set");
                (self.inst.decisions[o].label.clone(), Survival::Escapes(i))
            })
            .collect();
        Ok(TupleCertificate {
            label,
            tuple,
            verdict: Verdict::Member { surviving },
        })
    }

    /// `weak[o][j]`: some `y in F(x')` with `y <= b_j - eps e`; `strong[o][j]`:
    /// additionally `y != b_j - eps e`.
    fn min_relations(&self, x: usize, eps: &T) -> Result<(Relation, Relation)> {
        let t = &self.tables[x];
        let tol = T::default_tolerance();
        let mut weak = Vec::with_capacity(self.inst.len());
        let mut strong = Vec::with_capacity(self.inst.len());
        for (o, img) in self.inst.images.iter().enumerate() {
            let w: Vec<bool> = t.margins[o].iter().map(|m| le_tol(eps, m, &tol)).collect();
            let s = t
                .pool
                .points
                .iter()
                .zip(&w)
                .map(|(b, &wk)| Ok(wk && img.strong_witness(b, &self.inst.cone, eps)?.is_some()))
                .collect::<Result<Vec<bool>>>()?;
            weak.push(w);
            strong.push(s);
        }
        Ok((weak, strong))
    }

    /// Min kind with `p = None` searches every subset size.
    fn decide_min(&self, x: usize, p: Option<usize>, eps: &T) -> Result<TupleCertificate<T>> {
        let t = &self.tables[x];
        let k = t.pool.points.len();
        let max_size = p.map_or(k, |p| p.min(k));
        let needed: u128 = (1..=max_size).map(|s| binomial(k, s)).sum();
        if needed > SUBSET_CAP {
            return Err(Error::CapExceeded { needed, cap: SUBSET_CAP });
        }
        let (weak, strong) = self.min_relations(x, eps)?;
        let label = self.inst.decisions[x].label.clone();
        for size in 1..=max_size {
            let mut subset: Vec<usize> = (0..size).collect();
            loop {
                if let Some(surviving) = survives_all(&subset, &weak, &strong) {
                    let mut tuple: Vec<Point<T>> =
                        subset.iter().map(|&j| t.pool.points[j].clone()).collect();
                    if let Some(p) = p {
                        while tuple.len() < p {
                            tuple.push(tuple.last().expect("nonempty subset").clone());
                        }
                    }
                    let surviving = surviving
                        .into_iter()
                        .enumerate()
                        .map(|(o, s)| (self.inst.decisions[o].label.clone(), s))
                        .collect();
                    return Ok(TupleCertificate {
                        label,
                        tuple,
                        verdict: Verdict::Member { surviving },
                    });
                }
                if !next_combination(&mut subset, k) {
                    break;
                }
            }
        }
        Ok(TupleCertificate {
            label,
            tuple: Vec::new(),
            verdict: Verdict::NoUndominatedSubset,
        })
    }

    pub fn minimal_p(&self, x: usize, eps: &T, kind: VpKind) -> Result<MinimalP<T>> {
        check_params(1, eps)?;
        let cert = match kind {
            VpKind::Weak => self.decide_weak(x, None, eps)?,
            VpKind::Min => self.decide_min(x, None, eps)?,
        };
        let finite = self.tables[x].pool.finite;
        Ok(match cert.verdict {
            Verdict::Member { .. } => {
                let p_star = cert.tuple.len();
                MinimalP::Found {
                    p_star,
                    exact: finite || p_star == 1,
                    certificate: cert,
                }
            }
            _ => MinimalP::Never {
                exact: finite || kind == VpKind::Weak,
                certificate: cert,
            },
        })
    }
}

/// Per competitor, the reason it fails to dominate `subset`, or `None` if
/// some competitor dominates.
fn survives_all(subset: &[usize], weak: &[Vec<bool>], strong: &[Vec<bool>]) -> Option<Vec<Survival>> {
    weak.iter()
        .zip(strong)
        .map(|(w, s)| {
            if let Some(i) = subset.iter().position(|&j| !w[j]) {
                Some(Survival::Escapes(i))
            } else if subset.iter().all(|&j| !s[j]) {
                Some(Survival::NotStrict)
            } else {
                None
            }
        })
        .collect()
}

fn next_combination(c: &mut [usize], n: usize) -> bool {
    let k = c.len();
    for i in (0..k).rev() {
        if c[i] < n - k + i {
            c[i] += 1;
            for j in i + 1..k {
                c[j] = c[j - 1] + 1;
            }
            return true;
        }
    }
    false
}

fn binomial(n: usize, k: usize) -> u128 {
    if k > n {
        return 0;
    }
    (0..k).fold(1u128, |acc, i| acc * (n - i) as u128 / (i as u128 + 1))
}

fn check_params<T: Scalar>(p: usize, eps: &T) -> Result<()> {
    if p == 0 {
        return Err(Error::InvalidParameter("p must be at least 1".into()));
    }
    if *eps < T::zero() {
        return Err(Error::InvalidParameter("epsilon must be nonnegative".into()));
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq)]
pub enum MinimalP<T> {
    Found {
        p_star: usize,
        /// False when a polytope pool might hide a shorter tuple.
        exact: bool,
        certificate: TupleCertificate<T>,
    },
    Never {
        exact: bool,
        certificate: TupleCertificate<T>,
    },
}

impl<T: Scalar> MinimalP<T> {
    pub fn p_star(&self) -> Option<usize> {
        match self {
            MinimalP::Found { p_star, .. } => Some(*p_star),
            MinimalP::Never { .. } => None,
        }
    }

    pub fn to_json(&self) -> Value {
        match self {
            MinimalP::Found { p_star, exact, certificate } => json!({
                "p_star": p_star, "exact": exact, "witness": certificate.to_json(),
            }),
            MinimalP::Never { exact, certificate } => json!({
                "p_star": Value::Null, "never": true, "exact": exact, "witness": certificate.to_json(),
            }),
        }
    }
}

pub fn membership_vp<T: Scalar>(inst: &Instance<T>, p: usize, eps: &T, kind: VpKind) -> Result<VpReport<T>> {
    Vectorizer::new(inst)?.membership(p, eps, kind)
}

pub fn minimal_p<T: Scalar>(inst: &Instance<T>, x: usize, eps: &T, kind: VpKind) -> Result<MinimalP<T>> {
    Vectorizer::new(inst)?.minimal_p(x, eps, kind)
}

pub const DEFAULT_GAMMA: f64 = 0.5;

/// Internal covering number of `F(x)` at radius `r_eps / 2`: a budget at
/// which every weakly minimal `x` is an `eps`-weak member.
pub fn covering_p_bound<T: Scalar>(inst: &Instance<T>, x: usize, eps: &T, gamma: &T) -> Result<usize> {
    let r_sq = inst.cone.r_epsilon_squared(eps, gamma)?;
    let quarter = T::from_ratio(1, 4);
    Ok(covering_internal_sq(&inst.images[x], &(r_sq * quarter))?.count)
}

/// Maximum of [`covering_p_bound`] over the weakly minimal decisions.
pub fn covering_p_bound_global<T: Scalar>(inst: &Instance<T>, eps: &T, gamma: &T) -> Result<usize> {
    let members = solve_direct(inst, Concept::Weak, &T::zero())?.members;
    let mut out = 1;
    for label in members {
        out = out.max(covering_p_bound(inst, inst.index_of(&label)?, eps, gamma)?);
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq)]
pub struct WeightedSolution<T> {
    pub label: String,
    pub value: T,
    pub tuple: Vec<Point<T>>,
}

impl<T: Scalar> WeightedSolution<T> {
    pub fn to_json(&self) -> Value {
        json!({
            "x": self.label,
            "value": self.value.to_json(),
            "tuple": self.tuple.iter().map(|p| json_point(p)).collect::<Vec<_>>(),
        })
    }
}

/// Minimizes `sum_i w_i . y^i` over `x` and `y^i in F(x)`. The problem
/// separates per component; every minimizer is returned.
pub fn solve_weighted_sum<T: Scalar>(inst: &Instance<T>, weights: &[Vec<T>]) -> Result<Vec<WeightedSolution<T>>> {
    if weights.is_empty() {
        return Err(Error::InvalidParameter("need p >= 1 weight vectors".into()));
    }
    for (i, w) in weights.iter().enumerate() {
        if !inst.cone.in_dual_cone(w)? {
            return Err(Error::WeightNotInDualCone { index: i });
        }
    }
    if weights.iter().flatten().all(|v| v.is_zero()) {
        return Err(Error::InvalidParameter("weights must not all be zero".into()));
    }
    let tol = T::default_tolerance();
    let per_x: Vec<(T, Vec<Point<T>>)> = inst
        .images
        .iter()
        .map(|img| {
            let mut total = T::zero();
            let mut tuple = Vec::with_capacity(weights.len());
            for w in weights {
                let (v, y) = img
                    .points()
                    .iter()
                    .map(|y| (crate::scalar::dot(w, y), y))
                    .fold(None, |best: Option<(T, &Point<T>)>, (v, y)| match best {
                        Some((bv, by)) if bv <= v => Some((bv, by)),
                        _ => Some((v, y)),
                    })
                    .expect("nonempty image");
                total = total + v;
                tuple.push(y.clone());
            }
            (total, tuple)
        })
        .collect();
    let best = per_x
        .iter()
        .map(|(v, _)| v.clone())
        .reduce(crate::scalar::min_of)
        .expect("nonempty instance");
    Ok(per_x
        .into_iter()
        .enumerate()
        .filter(|(_, (v, _))| le_tol(v, &best, &tol))
        .map(|(x, (value, tuple))| WeightedSolution {
            label: inst.decisions[x].label.clone(),
            value,
            tuple,
        })
        .collect())
}

/// Deliberate corruption of the brute-force oracle, used to check that the
/// verifier notices disagreements: competitor `from` is treated as
/// dominating every tuple of decision `to` exactly when it does not.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Fault {
    pub from: usize,
    pub to: usize,
}

/// Definition-level oracle: enumerates every ordered tuple of the full
/// finite image and every competitor.
pub fn brute_force_vp<T: Scalar>(inst: &Instance<T>, p: usize, eps: &T, kind: VpKind) -> Result<VpReport<T>> {
    brute_force_vp_with(inst, p, eps, kind, None)
}

pub fn brute_force_vp_with<T: Scalar>(
    inst: &Instance<T>,
    p: usize,
    eps: &T,
    kind: VpKind,
    fault: Option<Fault>,
) -> Result<VpReport<T>> {
    check_params(p, eps)?;
    if !inst.all_finite() {
        return Err(Error::PolytopeUnsupported);
    }
    for img in &inst.images {
        let needed = (img.len() as u128).checked_pow(p as u32).unwrap_or(u128::MAX);
        if needed > TUPLE_CAP {
            return Err(Error::CapExceeded { needed, cap: TUPLE_CAP });
        }
    }
    let certificates = (0..inst.len())
        .into_par_iter()
        .map(|x| brute_decide(inst, x, p, eps, kind, fault))
        .collect::<Vec<_>>();
    let members = certificates
        .iter()
        .filter(|c| c.is_member())
        .map(|c| c.label.clone())
        .collect();
    Ok(VpReport {
        kind,
        p,
        epsilon: eps.clone(),
        members,
        certificates,
        incomplete: Vec::new(),
    })
}

fn brute_decide<T: Scalar>(
    inst: &Instance<T>,
    x: usize,
    p: usize,
    eps: &T,
    kind: VpKind,
    fault: Option<Fault>,
) -> TupleCertificate<T> {
    let cone = &inst.cone;
    let own = inst.images[x].points();
    let mut idx = vec![0usize; p];
    loop {
        let tuple: Vec<&Point<T>> = idx.iter().map(|&i| &own[i]).collect();
        let mut surviving = Vec::with_capacity(inst.len());
        for (o, img) in inst.images.iter().enumerate() {
            let mut dominated = match kind {
                VpKind::Weak => tuple_dominated_weak(cone, img.points(), &tuple, eps),
                VpKind::Min => tuple_dominated_min(cone, img.points(), &tuple, eps),
            };
            if fault == Some(Fault { from: o, to: x }) {
                dominated = !dominated;
            }
            if dominated {
                surviving.clear();
                break;
            }
            surviving.push((inst.decisions[o].label.clone(), survival_reason(cone, img.points(), &tuple, eps, kind)));
        }
        if surviving.len() == inst.len() {
            return TupleCertificate {
                label: inst.decisions[x].label.clone(),
                tuple: tuple.into_iter().cloned().collect(),
                verdict: Verdict::Member { surviving },
            };
        }
        if !next_tuple(&mut idx, own.len()) {
            break;
        }
    }
    TupleCertificate {
        label: inst.decisions[x].label.clone(),
        tuple: Vec::new(),
        verdict: Verdict::AllTuplesDominated,
    }
}

/// Some `y in F(x')^p` with `y^i < b^i - eps e` for every `i`.
fn tuple_dominated_weak<T: Scalar>(cone: &Cone<T>, other: &[Point<T>], tuple: &[&Point<T>], eps: &T) -> bool {
    tuple
        .iter()
        .all(|b| other.iter().any(|y| cone.compare(y, b, eps, Order::Strict)))
}

/// Some `y in F(x')^p` with `y^i <= b^i - eps e` for every `i` and
/// `y != b - eps e^p`, found by walking the product of per-component
/// candidate lists.
fn tuple_dominated_min<T: Scalar>(cone: &Cone<T>, other: &[Point<T>], tuple: &[&Point<T>], eps: &T) -> bool {
    let tol = T::default_tolerance();
    let lists: Vec<Vec<&Point<T>>> = tuple
        .iter()
        .map(|b| other.iter().filter(|y| cone.compare(y, b, eps, Order::Weak)).collect())
        .collect();
    if lists.iter().any(Vec::is_empty) {
        return false;
    }
    let shifted: Vec<Point<T>> = tuple.iter().map(|b| cone.shift(b, eps)).collect();
    let sizes: Vec<usize> = lists.iter().map(Vec::len).collect();
    let mut choice = vec![0usize; tuple.len()];
    loop {
        let differs = choice
            .iter()
            .zip(&lists)
            .zip(&shifted)
            .any(|((&c, l), s)| !points_eq(l[c], s, &tol));
        if differs {
            return true;
        }
        if !next_mixed(&mut choice, &sizes) {
            return false;
        }
    }
}

fn survival_reason<T: Scalar>(
    cone: &Cone<T>,
    other: &[Point<T>],
    tuple: &[&Point<T>],
    eps: &T,
    kind: VpKind,
) -> Survival {
    let order = match kind {
        VpKind::Weak => Order::Strict,
        VpKind::Min => Order::Weak,
    };
    match tuple
        .iter()
        .position(|b| !other.iter().any(|y| cone.compare(y, b, eps, order)))
    {
        Some(i) => Survival::Escapes(i),
        None => Survival::NotStrict,
    }
}

fn next_tuple(idx: &mut [usize], base: usize) -> bool {
    for v in idx.iter_mut().rev() {
        *v += 1;
        if *v < base {
            return true;
        }
        *v = 0;
    }
    false
}

fn next_mixed(idx: &mut [usize], sizes: &[usize]) -> bool {
    for (v, &s) in idx.iter_mut().zip(sizes).rev() {
        *v += 1;
        if *v < s {
            return true;
        }
        *v = 0;
    }
    false
}
