//! Property suites over built-in and seeded random instances.
//!
//! Failures are report content, never errors: a check that errors is a
//! failed check carrying the error text and a replayable counterexample.

use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde_json::{json, Value};

use crate::error::Result;
use crate::imagesets::domination_check;
use crate::instance::{
    discretize_map, instance_distance_squared, make_example, ExampleParams, Instance, PolyShape,
};
use crate::scalar::{le_tol, Scalar};
use crate::setrelations::{set_margin, set_relation, RelationKind};
use crate::solver_direct::{margin_matrix, solve_with_margins, thresholds_from, Concept};
use crate::vectorizer::{
    brute_force_vp_with, covering_p_bound, solve_weighted_sum, Fault, VpKind, Vectorizer,
};

#[derive(Debug, Clone, PartialEq)]
pub struct CheckResult {
    pub name: String,
    pub instance: String,
    pub passed: bool,
    /// Hard checks are exact consequences of the theory on finite
    /// instances; soft ones are empirical probes.
    pub hard: bool,
    /// Counterexample payload (instance, replay parameters, details) when
    /// failing.
    pub counterexample: Option<Value>,
    pub elapsed: Duration,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct SuiteReport {
    pub checks: Vec<CheckResult>,
    /// Free-form experiment results (agreement ratios and the like).
    pub findings: Vec<Value>,
    pub elapsed: Option<Duration>,
}

impl SuiteReport {
    pub fn hard_failures(&self) -> Vec<&CheckResult> {
        self.checks.iter().filter(|c| c.hard && !c.passed).collect()
    }

    pub fn soft_failures(&self) -> Vec<&CheckResult> {
        self.checks.iter().filter(|c| !c.hard && !c.passed).collect()
    }

    pub fn all_hard_passed(&self) -> bool {
        self.hard_failures().is_empty()
    }

    /// Check names with pass/fail counts, in first-seen order.
    pub fn summary(&self) -> Vec<(String, usize, usize)> {
        let mut out: Vec<(String, usize, usize)> = Vec::new();
        for c in &self.checks {
            let idx = match out.iter().position(|(n, _, _)| *n == c.name) {
                Some(i) => i,
                None => {
                    out.push((c.name.clone(), 0, 0));
                    out.len() - 1
                }
            };
            if c.passed {
                out[idx].1 += 1;
            } else {
                out[idx].2 += 1;
            }
        }
        out
    }

    /// Timing is omitted unless requested so that reports are reproducible
    /// byte for byte.
    pub fn to_json(&self, timing: bool) -> Value {
        let summary: Vec<Value> = self
            .summary()
            .into_iter()
            .map(|(n, p, f)| json!({ "check": n, "passed": p, "failed": f }))
            .collect();
        let failures: Vec<Value> = self
            .checks
            .iter()
            .filter(|c| !c.passed)
            .map(|c| {
                json!({
                    "check": c.name,
                    "instance": c.instance,
                    "hard": c.hard,
                    "counterexample": c.counterexample,
                })
            })
            .collect();
        let mut out = json!({
            "total": self.checks.len(),
            "hard_failures": self.hard_failures().len(),
            "soft_failures": self.soft_failures().len(),
            "summary": summary,
            "failures": failures,
            "findings": self.findings,
        });
        if timing {
            if let Some(d) = self.elapsed {
                out["elapsed_ms"] = json!(d.as_millis() as u64);
            }
            let mut per_check = serde_json::Map::new();
            for c in &self.checks {
                let e = per_check.entry(c.name.clone()).or_insert(json!(0u64));
                *e = json!(e.as_u64().unwrap_or(0) + c.elapsed.as_millis() as u64);
            }
            out["check_ms"] = Value::Object(per_check);
        }
        out
    }
}

#[derive(Debug, Clone)]
pub struct SuiteConfig<T> {
    /// Seeds of the random finite instances.
    pub seeds: Vec<u64>,
    /// Number of random polytope instances (seeded from `seeds` in order).
    pub polytope_count: usize,
    /// Decisions per random instance.
    pub size: usize,
    /// Largest random image.
    pub max_image: usize,
    /// Positive epsilons tested besides zero.
    pub eps_grid: Vec<T>,
    /// Budgets tested in the `(p, eps)` lattice.
    pub p_range: std::ops::RangeInclusive<usize>,
    /// Random epsilons per instance for the threshold law.
    pub threshold_samples: usize,
    /// Corrupt the brute-force oracle on the first golden instance.
    pub inject_fault: bool,
    /// Run only checks whose name starts with one of these prefixes.
    pub only: Option<Vec<String>>,
}

impl<T: Scalar> Default for SuiteConfig<T> {
    fn default() -> Self {
        Self {
            seeds: (0..50).collect(),
            polytope_count: 20,
            size: 8,
            max_image: 6,
            eps_grid: vec![T::from_ratio(1, 10), T::from_ratio(1, 2), T::from_ratio(7, 10), T::one()],
            p_range: 1..=3,
            threshold_samples: 20,
            inject_fault: false,
            only: None,
        }
    }
}

/// Collects the checks of one instance.
struct Checks<'a, T> {
    id: String,
    only: Option<&'a [String]>,
    inst: &'a Instance<T>,
    replay: Value,
    out: Vec<CheckResult>,
}

impl<'a, T: Scalar> Checks<'a, T> {
    fn new(id: impl Into<String>, inst: &'a Instance<T>, replay: Value, only: Option<&'a [String]>) -> Self {
        Self {
            id: id.into(),
            only,
            inst,
            replay,
            out: Vec::new(),
        }
    }

    fn run(&mut self, name: &str, check: impl FnOnce() -> Result<Finding>) {
        if let Some(only) = self.only {
            if !only.iter().any(|o| name.starts_with(o.as_str())) {
                return;
            }
        }
        let start = Instant::now();
        let outcome = check();
        let elapsed = start.elapsed();
        let detail = match outcome {
            Ok(Ok(())) => None,
            Ok(Err(d)) => Some(d),
            Err(e) => Some(json!({ "error": e.to_string() })),
        };
        let counterexample = detail.map(|d| {
            json!({ "replay": self.replay, "details": d, "instance": self.inst.to_json() })
        });
        self.out.push(CheckResult {
            name: name.to_string(),
            instance: self.id.clone(),
            passed: counterexample.is_none(),
            hard: true,
            counterexample,
            elapsed,
        });
    }
}

/// `Err` carries the details of a violated property.
type Finding = std::result::Result<(), Value>;

fn ensure(cond: bool, detail: impl FnOnce() -> Value) -> Finding {
    if cond {
        Ok(())
    } else {
        Err(detail())
    }
}

fn subset(a: &[String], b: &[String]) -> bool {
    a.iter().all(|x| b.contains(x))
}

fn eps_json<T: Scalar>(e: &T) -> Value {
    e.to_json()
}

/// Parameters of the random suite instance with this seed. Finite
/// instances vary the coordinate grid and the cone with the seed; polytope
/// instances use seeds offset by 1000 and at most 6 decisions.
pub fn random_params(seed: u64, polytope: bool, size: usize, max_image: usize) -> ExampleParams {
    if polytope {
        ExampleParams {
            seed: seed + 1000,
            size: size.min(6),
            max_image,
            polytope: true,
            ..Default::default()
        }
    } else {
        ExampleParams {
            seed,
            size,
            max_image,
            denom: if seed % 3 == 2 { 4 } else { 1 },
            skew_cone: seed % 5 == 4,
            ..Default::default()
        }
    }
}

pub fn run_suite<T: Scalar>(config: &SuiteConfig<T>) -> SuiteReport {
    let start = Instant::now();
    let mut checks = golden_checks::<T>(config);

    let finite: Vec<Vec<CheckResult>> = config
        .seeds
        .par_iter()
        .map(|&seed| {
            random_instance_checks(config, &random_params(seed, false, config.size, config.max_image), false)
        })
        .collect();
    let poly: Vec<Vec<CheckResult>> = config
        .seeds
        .iter()
        .take(config.polytope_count)
        .collect::<Vec<_>>()
        .par_iter()
        .map(|&&seed| {
            random_instance_checks(config, &random_params(seed, true, config.size, config.max_image), true)
        })
        .collect();
    checks.extend(finite.into_iter().flatten());
    checks.extend(poly.into_iter().flatten());
    SuiteReport {
        checks,
        findings: Vec::new(),
        elapsed: Some(start.elapsed()),
    }
}

fn replay_of(name: &str, p: &ExampleParams) -> Value {
    json!({
        "example": name, "seed": p.seed, "size": p.size, "max_image": p.max_image,
        "denom": p.denom, "polytope": p.polytope, "skew_cone": p.skew_cone,
        "grid": p.grid, "T": p.t, "N": p.n,
    })
}

fn random_instance_checks<T: Scalar>(
    config: &SuiteConfig<T>,
    params: &ExampleParams,
    polytope: bool,
) -> Vec<CheckResult> {
    let id = format!(
        "random_{}[seed={}]",
        if polytope { "polytope" } else { "finite" },
        params.seed
    );
    let inst = match make_example::<T>("random_finite", params) {
        Ok(i) => i,
        Err(e) => {
            return vec![CheckResult {
                name: "generator".into(),
                instance: id,
                passed: false,
                hard: true,
                counterexample: Some(json!({ "replay": replay_of("random_finite", params), "error": e.to_string() })),
                elapsed: Duration::ZERO,
            }]
        }
    };
    let mut c = Checks::new(id, &inst, replay_of("random_finite", params), config.only.as_deref());
    let zero = T::zero();
    let mut eps_all = vec![zero.clone()];
    eps_all.extend(config.eps_grid.iter().cloned());

    if !polytope {
        c.run("imagesets.min_subset_wmin_and_domination", || image_checks(&inst));
    }
    c.run("setrelations.chain_and_threshold", || relation_checks(&inst, params.seed));

    let margins = match margin_matrix(&inst) {
        Ok(m) => m,
        Err(e) => {
            c.run("solver_direct.margins", || Err(e));
            return c.out;
        }
    };
    c.run("solver_direct.chain", || direct_chain(&inst, &margins, &eps_all));
    c.run("solver_direct.eps_monotone", || direct_monotone(&inst, &margins, &eps_all));
    c.run(
        "solver_direct.threshold_law",
        || threshold_law(&inst, &margins, config.threshold_samples, params.seed),
    );
    c.run("solver_direct.intersection_law", || intersection_law(&inst, &margins, &config.eps_grid));

    let vec = match Vectorizer::new(&inst) {
        Ok(v) => v,
        Err(e) => {
            c.run("vectorizer.tables", || Err(e));
            return c.out;
        }
    };
    c.run(
        "vectorizer.monotone_in_p_and_inclusions",
        || lattice_checks(&inst, &vec, &margins, config.p_range.clone(), &eps_all),
    );
    c.run("vectorizer.minimal_p_consistency", || minimal_p_consistency(&inst, &vec, &margins, &eps_all));
    if polytope {
        let p = inst.max_image_len();
        c.run("vectorizer.extreme_point_budget", || budget_equality(&inst, &vec, &margins, p));
    } else {
        let oracle_eps: Vec<T> = [zero.clone(), T::from_ratio(1, 10), T::from_ratio(7, 10)].to_vec();
        c.run(
            "vectorizer.oracle_equivalence",
            || oracle_equivalence(&inst, &vec, config.p_range.clone(), &oracle_eps, None),
        );
        let p44 = (inst.len() - 1).max(1);
        c.run("vectorizer.decision_count_budget", || budget_equality(&inst, &vec, &margins, p44));
        let p45 = vec_pool_max(&inst, &vec);
        c.run("vectorizer.minimal_count_budget", || budget_equality(&inst, &vec, &margins, p45));
        c.run("vectorizer.no_quality_lost", || quality_sets(&inst, &vec));
        c.run("vectorizer.union_over_p", || union_checks(&inst, &vec, &margins, &config.eps_grid));
        c.run("vectorizer.weighted_sum_sound", || weighted_sum_sound(&inst, &vec, params.seed));
        c.run("vectorizer.covering_bound", || covering_bound(&inst, &vec, &margins));
        c.run("instance.discretization", || discretization(&inst));
    }
    c.out
}

fn vec_pool_max<T: Scalar>(inst: &Instance<T>, v: &Vectorizer<'_, T>) -> usize {
    (0..inst.len())
        .map(|x| v.table(x).pool.points.len())
        .max()
        .unwrap_or(1)
        .max(1)
}

fn image_checks<T: Scalar>(inst: &Instance<T>) -> Result<Finding> {
    for (k, img) in inst.images.iter().enumerate() {
        let min = img.min_elements(&inst.cone, false)?;
        let wmin = img.min_elements(&inst.cone, true)?;
        let ok = min.iter().all(|p| wmin.contains(p)) && wmin.iter().all(|p| img.points().contains(p));
        if !ok {
            return Ok(Err(json!({ "image": k, "reason": "Min ⊄ WMin ⊄ A" })));
        }
        if !domination_check(img, &inst.cone)? {
            return Ok(Err(json!({ "image": k, "reason": "domination property fails" })));
        }
    }
    Ok(Ok(()))
}

fn relation_checks<T: Scalar>(inst: &Instance<T>, seed: u64) -> Result<Finding> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5eed);
    let cone = &inst.cone;
    let tol = T::default_tolerance();
    let zero = T::zero();
    for a in &inst.images {
        for b in &inst.images {
            let mu = set_margin(a, b, cone)?;
            for _ in 0..4 {
                let eps = T::from_ratio(rng.gen_range(0..=24), 8);
                let strict = set_relation(a, b, cone, RelationKind::LowerStrict, &eps)?.0;
                let strong = set_relation(a, b, cone, RelationKind::LowerStrong, &eps)?.0;
                let lower = set_relation(a, b, cone, RelationKind::Lower, &eps)?.0;
                if (strict && !strong) || (strong && !lower) {
                    return Ok(Err(json!({ "reason": "strict ⇒ strong ⇒ lower broken", "eps": eps_json(&eps) })));
                }
                if strict != crate::scalar::lt_tol(&eps, &mu, &tol) {
                    return Ok(Err(json!({ "reason": "threshold law", "eps": eps_json(&eps), "margin": mu.to_json() })));
                }
            }
        }
    }
    // transitivity of the lower relation at eps = 0
    let n = inst.len();
    let rel: Vec<Vec<bool>> = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| Ok(set_relation(&inst.images[i], &inst.images[j], cone, RelationKind::Lower, &zero)?.0))
                .collect::<Result<Vec<bool>>>()
        })
        .collect::<Result<_>>()?;
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                if rel[i][j] && rel[j][k] && !rel[i][k] {
                    return Ok(Err(json!({ "reason": "transitivity", "triple": [i, j, k] })));
                }
            }
        }
    }
    Ok(Ok(()))
}

fn direct_chain<T: Scalar>(inst: &Instance<T>, m: &[Vec<T>], eps_all: &[T]) -> Result<Finding> {
    for eps in eps_all {
        let one = solve_with_margins(inst, Concept::TypeOne, eps, m)?;
        let two = solve_with_margins(inst, Concept::TypeTwo, eps, m)?;
        let weak = solve_with_margins(inst, Concept::Weak, eps, m)?;
        for r in [&one, &two, &weak] {
            if !r.verify(inst)? {
                return Ok(Err(json!({ "reason": "certificate does not re-verify", "concept": r.concept.name(), "eps": eps_json(eps) })));
            }
        }
        if !subset(&one.members, &two.members) || !subset(&two.members, &weak.members) {
            return Ok(Err(json!({
                "eps": eps_json(eps), "type1": one.members, "type2": two.members, "weak": weak.members,
            })));
        }
    }
    Ok(Ok(()))
}

fn direct_monotone<T: Scalar>(inst: &Instance<T>, m: &[Vec<T>], eps_all: &[T]) -> Result<Finding> {
    let mut sorted = eps_all.to_vec();
    sorted.sort_by(|a, b| a.partial_cmp(b).expect("finite"));
    for concept in [Concept::Weak, Concept::TypeTwo] {
        let mut prev: Option<Vec<String>> = None;
        for eps in &sorted {
            let cur = solve_with_margins(inst, concept, eps, m)?.members;
            if let Some(p) = &prev {
                if !subset(p, &cur) {
                    return Ok(Err(json!({ "concept": concept.name(), "eps": eps_json(eps), "before": p, "after": cur })));
                }
            }
            prev = Some(cur);
        }
    }
    Ok(Ok(()))
}

fn threshold_law<T: Scalar>(
    inst: &Instance<T>,
    m: &[Vec<T>],
    samples: usize,
    seed: u64,
) -> Result<Finding> {
    let th = thresholds_from(m);
    let tol = T::default_tolerance();
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x7a0);
    // Ties are the delicate case: test every nonnegative threshold itself,
    // then random dyadic values.
    let mut eps: Vec<T> = th.iter().filter(|t| **t >= T::zero()).cloned().collect();
    eps.truncate(samples);
    while eps.len() < samples {
        eps.push(T::from_ratio(rng.gen_range(0..=48), 16));
    }
    for e in &eps {
        let members = solve_with_margins(inst, Concept::Weak, e, m)?.members;
        let expected: Vec<String> = inst
            .decisions
            .iter()
            .zip(&th)
            .filter(|(_, t)| le_tol(*t, e, &tol))
            .map(|(d, _)| d.label.clone())
            .collect();
        if members != expected {
            return Ok(Err(json!({ "eps": eps_json(e), "members": members, "expected": expected })));
        }
    }
    Ok(Ok(()))
}

fn intersection_law<T: Scalar>(inst: &Instance<T>, m: &[Vec<T>], grid: &[T]) -> Result<Finding> {
    let zero = T::zero();
    let weak0 = solve_with_margins(inst, Concept::Weak, &zero, m)?.members;
    let two0 = solve_with_margins(inst, Concept::TypeTwo, &zero, m)?.members;
    // the smallest positive threshold bounds the epsilons at which the weak
    // sets still equal the unshifted one
    let th = thresholds_from(m);
    let mut eps: Vec<T> = grid.to_vec();
    if let Some(t) = th.iter().filter(|t| **t > zero).cloned().reduce(crate::scalar::min_of) {
        eps.push(t / T::from_ratio(2, 1));
    }
    let mut inter: Vec<String> = inst.labels();
    for e in &eps {
        let w = solve_with_margins(inst, Concept::Weak, e, m)?.members;
        inter.retain(|l| w.contains(l));
        let t = solve_with_margins(inst, Concept::TypeTwo, e, m)?.members;
        if !subset(&two0, &t) {
            return Ok(Err(json!({ "reason": "type2 at 0 not inside type2 at eps", "eps": eps_json(e) })));
        }
    }
    Ok(ensure(inter == weak0, || json!({ "intersection": inter, "weak0": weak0 })))
}

fn lattice_checks<T: Scalar>(
    inst: &Instance<T>,
    v: &Vectorizer<'_, T>,
    m: &[Vec<T>],
    p_range: std::ops::RangeInclusive<usize>,
    eps_all: &[T],
) -> Result<Finding> {
    for eps in eps_all {
        let weak = solve_with_margins(inst, Concept::Weak, eps, m)?.members;
        let two = solve_with_margins(inst, Concept::TypeTwo, eps, m)?.members;
        for kind in [VpKind::Weak, VpKind::Min] {
            let mut prev: Option<Vec<String>> = None;
            for p in p_range.clone() {
                let r = v.membership(p, eps, kind)?;
                for cert in &r.certificates {
                    if !cert.verify(inst, eps, kind)? {
                        return Ok(Err(json!({ "reason": "tuple certificate", "x": cert.label, "p": p, "kind": kind.name(), "eps": eps_json(eps) })));
                    }
                }
                let outer = if kind == VpKind::Weak { &weak } else { &two };
                if !subset(&r.members, outer) {
                    return Ok(Err(json!({ "reason": "vectorized set not inside set solution", "p": p, "kind": kind.name(), "eps": eps_json(eps), "vp": r.members, "sp": outer })));
                }
                if let Some(pr) = &prev {
                    if !subset(pr, &r.members) {
                        return Ok(Err(json!({ "reason": "not monotone in p", "p": p, "kind": kind.name(), "eps": eps_json(eps) })));
                    }
                }
                prev = Some(r.members);
            }
        }
    }
    Ok(Ok(()))
}

fn minimal_p_consistency<T: Scalar>(
    inst: &Instance<T>,
    v: &Vectorizer<'_, T>,
    m: &[Vec<T>],
    eps_all: &[T],
) -> Result<Finding> {
    for eps in eps_all {
        let weak = solve_with_margins(inst, Concept::Weak, eps, m)?.members;
        for x in 0..inst.len() {
            let never = v.minimal_p(x, eps, VpKind::Weak)?.p_star().is_none();
            let label = &inst.decisions[x].label;
            if never == weak.contains(label) {
                return Ok(Err(json!({ "x": label, "eps": eps_json(eps), "never": never })));
            }
        }
    }
    Ok(Ok(()))
}

fn budget_equality<T: Scalar>(
    inst: &Instance<T>,
    v: &Vectorizer<'_, T>,
    m: &[Vec<T>],
    p: usize,
) -> Result<Finding> {
    let zero = T::zero();
    let vp = v.membership(p, &zero, VpKind::Weak)?.members;
    let sp = solve_with_margins(inst, Concept::Weak, &zero, m)?.members;
    Ok(ensure(vp == sp, || json!({ "p": p, "vp": vp, "sp": sp })))
}

fn oracle_equivalence<T: Scalar>(
    inst: &Instance<T>,
    v: &Vectorizer<'_, T>,
    p_range: std::ops::RangeInclusive<usize>,
    eps_list: &[T],
    fault: Option<Fault>,
) -> Result<Finding> {
    for eps in eps_list {
        for p in p_range.clone() {
            for kind in [VpKind::Weak, VpKind::Min] {
                let fast = v.membership(p, eps, kind)?.members;
                let slow = brute_force_vp_with(inst, p, eps, kind, fault)?.members;
                if fast != slow {
                    return Ok(Err(json!({
                        "p": p, "eps": eps_json(eps), "kind": kind.name(), "vectorizer": fast, "oracle": slow,
                    })));
                }
            }
        }
    }
    Ok(Ok(()))
}

fn quality_sets<T: Scalar>(inst: &Instance<T>, v: &Vectorizer<'_, T>) -> Result<Finding> {
    let zero = T::zero();
    let mut union = Vec::new();
    for x in 0..inst.len() {
        if v.minimal_p(x, &zero, VpKind::Min)?.p_star().is_some() {
            union.push(x);
        }
    }
    for x in 0..inst.len() {
        let mut found = false;
        for &u in &union {
            if set_margin(&inst.images[u], &inst.images[x], &inst.cone)? >= -T::default_tolerance() {
                found = true;
                break;
            }
        }
        if !found {
            return Ok(Err(json!({ "x": inst.decisions[x].label, "union": union })));
        }
    }
    Ok(Ok(()))
}

fn union_members<T: Scalar>(inst: &Instance<T>, v: &Vectorizer<'_, T>, eps: &T, kind: VpKind) -> Result<Vec<String>> {
    let mut out = Vec::new();
    for x in 0..inst.len() {
        if v.minimal_p(x, eps, kind)?.p_star().is_some() {
            out.push(inst.decisions[x].label.clone());
        }
    }
    Ok(out)
}

/// For `eps > 0` the union over `p` of the min sets lies between the
/// weakly minimal decisions and the union of the weak sets; both unions
/// collapse to the weakly minimal decisions once `eps` is below every
/// positive threshold.
fn union_checks<T: Scalar>(
    inst: &Instance<T>,
    v: &Vectorizer<'_, T>,
    m: &[Vec<T>],
    grid: &[T],
) -> Result<Finding> {
    let zero = T::zero();
    let wargmin = solve_with_margins(inst, Concept::Weak, &zero, m)?.members;
    let th = thresholds_from(m);
    let small = th
        .iter()
        .filter(|t| **t > zero)
        .cloned()
        .reduce(crate::scalar::min_of)
        .map_or_else(T::one, |t| t / T::from_ratio(2, 1));
    for eps in grid.iter().chain(std::iter::once(&small)) {
        if *eps <= zero {
            continue;
        }
        let weak_u = union_members(inst, v, eps, VpKind::Weak)?;
        let min_u = union_members(inst, v, eps, VpKind::Min)?;
        if !subset(&min_u, &weak_u) || !subset(&wargmin, &min_u) {
            return Ok(Err(json!({ "eps": eps_json(eps), "weak_union": weak_u, "min_union": min_u, "wargmin": wargmin })));
        }
        if eps == &small && (weak_u != wargmin || min_u != wargmin) {
            return Ok(Err(json!({ "eps": eps_json(eps), "reason": "unions differ below the smallest threshold", "weak_union": weak_u, "min_union": min_u, "wargmin": wargmin })));
        }
    }
    Ok(Ok(()))
}

fn weighted_sum_sound<T: Scalar>(inst: &Instance<T>, v: &Vectorizer<'_, T>, seed: u64) -> Result<Finding> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x3e1);
    let zero = T::zero();
    for p in 1..=3 {
        // w_i = A^T lambda with lambda >= 0 lies in the dual cone
        let weights: Vec<Vec<T>> = (0..p)
            .map(|_| {
                let lambda: Vec<T> = inst.cone.rows().iter().map(|_| T::from_ratio(rng.gen_range(0..=3), 1)).collect();
                (0..inst.cone.dim())
                    .map(|c| {
                        inst.cone
                            .rows()
                            .iter()
                            .zip(&lambda)
                            .fold(T::zero(), |acc, (a, l)| acc + a[c].clone() * l.clone())
                    })
                    .collect()
            })
            .collect();
        if weights.iter().flatten().all(|w| w.is_zero()) {
            continue;
        }
        let sols = solve_weighted_sum(inst, &weights)?;
        let members = v.membership(p, &zero, VpKind::Weak)?.members;
        for s in &sols {
            if !members.contains(&s.label) {
                return Ok(Err(json!({ "p": p, "x": s.label, "members": members })));
            }
        }
    }
    Ok(Ok(()))
}

fn covering_bound<T: Scalar>(inst: &Instance<T>, v: &Vectorizer<'_, T>, m: &[Vec<T>]) -> Result<Finding> {
    let zero = T::zero();
    let gamma = T::from_ratio(1, 2);
    let wargmin = solve_with_margins(inst, Concept::Weak, &zero, m)?.members;
    for eps in [T::from_ratio(1, 2), T::one()] {
        for label in &wargmin {
            let x = inst.index_of(label)?;
            let p = covering_p_bound(inst, x, &eps, &gamma)?;
            if !v.decide(x, p, &eps, VpKind::Weak)?.is_member() {
                return Ok(Err(json!({ "x": label, "eps": eps_json(&eps), "p": p })));
            }
        }
    }
    Ok(Ok(()))
}

fn discretization<T: Scalar>(inst: &Instance<T>) -> Result<Finding> {
    for eps in [T::from_ratio(1, 10), T::from_ratio(1, 2)] {
        let d = discretize_map(inst, &eps)?;
        let dist = instance_distance_squared(inst, &d)?;
        if !le_tol(&dist, &(eps.clone() * eps.clone()), &T::default_tolerance()) {
            return Ok(Err(json!({ "eps": eps_json(&eps), "distance_squared": dist.to_json() })));
        }
        for (a, b) in inst.images.iter().zip(&d.images) {
            if !b.points().iter().all(|p| a.points().contains(p)) {
                return Ok(Err(json!({ "eps": eps_json(&eps), "reason": "centers outside image" })));
            }
        }
        let dv = Vectorizer::new(&d)?;
        let p = d.max_image_len();
        let dm = margin_matrix(&d)?;
        if let Err(v) = budget_equality(&d, &dv, &dm, p)? {
            return Ok(Err(json!({ "eps": eps_json(&eps), "discretized": d.to_json(), "details": v })));
        }
    }
    Ok(Ok(()))
}

fn golden_checks<T: Scalar>(config: &SuiteConfig<T>) -> Vec<CheckResult> {
    let zero = T::zero();
    let mut out = Vec::new();
    let def = ExampleParams::default();

    if let Ok(inst) = make_example::<T>("mfdvp", &def) {
        let mut c = Checks::new("mfdvp", &inst, replay_of("mfdvp", &def), config.only.as_deref());
        c.run("golden.mfdvp", || {
            let two = crate::solver_direct::solve_direct(&inst, Concept::TypeTwo, &zero)?.members;
            let v = Vectorizer::new(&inst)?;
            let mut min_has_zero = Vec::new();
            for p in 1..=6 {
                if v.membership(p, &zero, VpKind::Min)?.is_member("0") {
                    min_has_zero.push(p);
                }
            }
            let weak2 = v.membership(2, &zero, VpKind::Weak)?.is_member("0");
            let pstar = v.minimal_p(0, &zero, VpKind::Weak)?.p_star();
            Ok(ensure(
                two == ["0", "1", "2"] && min_has_zero.is_empty() && weak2 && pstar == Some(2),
                || json!({ "type2": two, "min_contains_0_at": min_has_zero, "weak2_has_0": weak2, "p_star": pstar }),
            ))
        });
        let fault = config.inject_fault.then_some(Fault { from: 0, to: 0 });
        c.run("golden.mfdvp_oracle", || {
            let v = Vectorizer::new(&inst)?;
            oracle_equivalence(&inst, &v, 1..=3, std::slice::from_ref(&zero), fault)
        });
        out.extend(c.out);
    }

    let p9 = ExampleParams { grid: Some(9), ..Default::default() };
    if let Ok(inst) = make_example::<T>("t_one", &p9) {
        let mut c = Checks::new("t_one[grid=9]", &inst, replay_of("t_one", &p9), config.only.as_deref());
        c.run("golden.t_one", || {
            let one = crate::solver_direct::solve_direct(&inst, Concept::TypeOne, &zero)?.members;
            let two = crate::solver_direct::solve_direct(&inst, Concept::TypeTwo, &zero)?.members;
            let v = Vectorizer::new(&inst)?;
            let cert = v.decide(inst.index_of("0.5")?, 1, &zero, VpKind::Min)?;
            let tuple_ok = cert.is_member() && cert.tuple == vec![vec![T::one(), T::zero()]];
            Ok(ensure(
                one == ["0.25"] && two == inst.labels() && tuple_ok,
                || json!({ "type1": one, "type2": two, "tuple": cert.to_json() }),
            ))
        });
        out.extend(c.out);
    }

    let p5 = ExampleParams { grid: Some(5), ..Default::default() };
    if let Ok(inst) = make_example::<T>("strict_min", &p5) {
        let mut c = Checks::new("strict_min[grid=5]", &inst, replay_of("strict_min", &p5), config.only.as_deref());
        c.run("golden.strict_min", || {
            let two = crate::solver_direct::solve_direct(&inst, Concept::TypeTwo, &zero)?.members;
            let v = Vectorizer::new(&inst)?;
            let mut short = Vec::new();
            for eps in [T::from_ratio(1, 100), T::from_ratio(1, 10), T::one()] {
                let m = v.membership(1, &eps, VpKind::Min)?.members;
                if m != inst.labels() {
                    short.push(json!({ "eps": eps_json(&eps), "members": m }));
                }
            }
            Ok(ensure(two == ["0"] && short.is_empty(), || json!({ "type2": two, "min_p1": short })))
        });
        out.extend(c.out);
    }

    let pc = ExampleParams { t: 6, n: Some(8), ..Default::default() };
    if let Ok(inst) = make_example::<T>("cantor", &pc) {
        let mut c = Checks::new("cantor[T=6,N=8]", &inst, replay_of("cantor", &pc), config.only.as_deref());
        c.run("golden.cantor", || {
            let weak = crate::solver_direct::solve_direct(&inst, Concept::Weak, &zero)?;
            let mut seq = Vec::new();
            for t in 3..=6 {
                let small = make_example::<T>("cantor", &ExampleParams { t, n: Some(t + 2), ..Default::default() })?;
                let x = small.index_of("1")?;
                let mp = Vectorizer::new(&small)?.minimal_p(x, &zero, VpKind::Weak)?;
                let oracle = hitting_oracle(&small, x)?;
                if mp.p_star() != oracle {
                    return Ok(Err(json!({ "T": t, "p_star": mp.p_star(), "oracle": oracle })));
                }
                seq.push(mp.p_star());
            }
            let nondecreasing = seq.windows(2).all(|w| w[0] <= w[1]) && seq.iter().all(Option::is_some);
            Ok(ensure(weak.is_member("1") && nondecreasing, || json!({ "weak": weak.members, "p_star_by_T": seq })))
        });
        out.extend(c.out);
    }
    out
}

/// Smallest subset `S` of the full image `F(x)` such that no competitor
/// strictly dominates every point of `S`, by enumeration of subsets in
/// increasing size. Independent of the pool and of the set-cover search.
pub fn hitting_oracle<T: Scalar>(inst: &Instance<T>, x: usize) -> Result<Option<usize>> {
    let own = inst.images[x].points();
    let zero = T::zero();
    let n = own.len();
    if n > 20 {
        return Err(crate::error::Error::CapExceeded { needed: 1 << n, cap: 1 << 20 });
    }
    let dominated: Vec<Vec<bool>> = inst
        .images
        .iter()
        .map(|img| {
            own.iter()
                .map(|b| {
                    img.points()
                        .iter()
                        .any(|y| inst.cone.compare(y, b, &zero, crate::cone::Order::Strict))
                })
                .collect()
        })
        .collect();
    let best = (1u32..1 << n)
        .filter(|mask| {
            dominated
                .iter()
                .all(|d| (0..n).any(|j| mask & (1 << j) != 0 && !d[j]))
        })
        .map(|mask| mask.count_ones() as usize)
        .min();
    Ok(best)
}

#[derive(Debug, Clone)]
pub struct ConvexConfig {
    pub seed: u64,
    pub grid: usize,
    /// Decision dimension (1 or 2).
    pub n: usize,
    pub count: usize,
    pub shape: PolyShape,
}

impl Default for ConvexConfig {
    fn default() -> Self {
        Self {
            seed: 0,
            grid: 17,
            n: 1,
            count: 10,
            shape: PolyShape::Random,
        }
    }
}

/// Compares the weakly minimal grid decisions with the weak members of
/// `VP_{n+1}` on seeded convex polyhedral instances. Disagreements are soft.
pub fn convex_experiment<T: Scalar>(config: &ConvexConfig) -> SuiteReport {
    let start = Instant::now();
    let results: Vec<(CheckResult, Value)> = (0..config.count)
        .into_par_iter()
        .map(|k| {
            let seed = config.seed + k as u64;
            let params = ExampleParams {
                seed,
                grid: Some(config.grid),
                dim: config.n,
                shape: config.shape,
                ..Default::default()
            };
            let id = format!("convex_polyhedral[seed={seed}]");
            let start = Instant::now();
            // agreement ratio, disagreeing labels, incomplete pools, wargmin
            type Agreement = (f64, Vec<String>, Vec<String>, Vec<String>);
            let outcome = (|| -> Result<Agreement> {
                let inst = make_example::<T>("convex_polyhedral", &params)?;
                let zero = T::zero();
                let sp = crate::solver_direct::solve_direct(&inst, Concept::Weak, &zero)?.members;
                let vp = Vectorizer::new(&inst)?.membership(config.n + 1, &zero, VpKind::Weak)?;
                let labels = inst.labels();
                let disagree: Vec<String> = labels
                    .iter()
                    .filter(|l| sp.contains(l) != vp.is_member(l))
                    .cloned()
                    .collect();
                let ratio = 1.0 - disagree.len() as f64 / labels.len() as f64;
                Ok((ratio, disagree, vp.incomplete, sp))
            })();
            match outcome {
                Ok((ratio, disagree, incomplete, sp)) => {
                    let finding = json!({
                        "instance": id, "seed": seed, "agreement": ratio, "disagreements": disagree,
                        "incomplete_pools": incomplete, "wargmin_size": sp.len(),
                    });
                    let check = CheckResult {
                        name: "convex.agreement".into(),
                        instance: id,
                        passed: disagree.is_empty(),
                        hard: false,
                        counterexample: (!disagree.is_empty()).then(|| finding.clone()),
                        elapsed: start.elapsed(),
                    };
                    (check, finding)
                }
                Err(e) => {
                    let finding = json!({ "instance": id, "seed": seed, "skipped": e.to_string() });
                    let check = CheckResult {
                        name: "convex.generator".into(),
                        instance: id,
                        passed: false,
                        hard: false,
                        counterexample: Some(finding.clone()),
                        elapsed: start.elapsed(),
                    };
                    (check, finding)
                }
            }
        })
        .collect();
    let (checks, findings) = results.into_iter().unzip();
    SuiteReport {
        checks,
        findings,
        elapsed: Some(start.elapsed()),
    }
}

/// Agreement ratios of a convex experiment report, in instance order.
pub fn agreement_ratios(report: &SuiteReport) -> Vec<f64> {
    report
        .findings
        .iter()
        .filter_map(|f| f.get("agreement").and_then(Value::as_f64))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::Rational;

    fn small() -> SuiteConfig<Rational> {
        SuiteConfig {
            seeds: vec![0, 1, 2, 4],
            polytope_count: 2,
            size: 5,
            max_image: 4,
            ..Default::default()
        }
    }

    #[test]
    fn small_suite_passes() {
        let r = run_suite(&small());
        if let Some(f) = r.hard_failures().first() {
            panic!("{} on {}: {}", f.name, f.instance, serde_json::to_string(&f.counterexample).unwrap());
        }
        assert!(r.checks.len() > 20);
    }

    #[test]
    fn fault_is_reported() {
        let cfg = SuiteConfig { inject_fault: true, ..small() };
        let r = run_suite(&cfg);
        let fails = r.hard_failures();
        assert_eq!(fails.len(), 1);
        assert_eq!(fails[0].name, "golden.mfdvp_oracle");
        let ce = fails[0].counterexample.as_ref().unwrap();
        assert!(ce.get("instance").is_some() && ce.get("replay").is_some());
    }

    #[test]
    fn empty_grid_runs_zero_only() {
        let cfg = SuiteConfig { eps_grid: vec![], seeds: vec![3], polytope_count: 1, ..small() };
        assert!(run_suite(&cfg).all_hard_passed());
    }

    #[test]
    fn suite_is_deterministic() {
        let a = run_suite(&small()).to_json(false);
        let b = run_suite(&small()).to_json(false);
        assert_eq!(a, b);
    }

    #[test]
    fn convex_edge_cases() {
        let empty = convex_experiment::<Rational>(&ConvexConfig { count: 0, ..Default::default() });
        assert!(empty.checks.is_empty());
        let constant = convex_experiment::<Rational>(&ConvexConfig {
            count: 2,
            grid: 5,
            shape: PolyShape::Constant,
            ..Default::default()
        });
        assert_eq!(agreement_ratios(&constant), vec![1.0, 1.0]);
    }

    #[test]
    fn cantor_oracle_small() {
        let inst = make_example::<Rational>("cantor", &ExampleParams { t: 3, n: Some(5), ..Default::default() }).unwrap();
        let x = inst.index_of("1").unwrap();
        assert_eq!(hitting_oracle(&inst, x).unwrap(), Some(3));
    }
}
