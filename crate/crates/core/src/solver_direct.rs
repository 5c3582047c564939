//! Exact solution sets of the set problem: weakly minimal, type-one and
//! type-two minimal decisions, each shifted by `eps e`.

use rayon::prelude::*;
use serde_json::{json, Map, Value};

use crate::error::{Error, Result};
use crate::instance::Instance;
use crate::scalar::{le_tol, lt_tol, max_of, Scalar};
use crate::setrelations::{relation_unchecked, set_margin, RelationCertificate, RelationKind};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Concept {
    Weak,
    TypeOne,
    TypeTwo,
}

impl Concept {
    pub fn name(self) -> &'static str {
        match self {
            Concept::Weak => "weak",
            Concept::TypeOne => "type1",
            Concept::TypeTwo => "type2",
        }
    }
}

impl std::str::FromStr for Concept {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "weak" => Ok(Concept::Weak),
            "type1" => Ok(Concept::TypeOne),
            "type2" => Ok(Concept::TypeTwo),
            _ => Err(Error::InvalidParameter(format!(
                "unknown concept `{s}` (expected weak, type1 or type2)"
            ))),
        }
    }
}

/// Why a decision is not a member.
#[derive(Debug, Clone, PartialEq)]
pub struct Exclusion<T> {
    pub label: String,
    /// The dominating decision.
    pub by: String,
    /// `F(by) ⋄ F(label) - eps e` with `⋄` given by `relation`.
    pub relation: RelationKind,
    pub certificate: RelationCertificate<T>,
    /// Type-one only: failure of `F(label) - eps e ≼ F(by)`.
    pub reverse: Option<RelationCertificate<T>>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolutionReport<T> {
    pub concept: Concept,
    pub epsilon: T,
    /// Member labels in instance order.
    pub members: Vec<String>,
    /// One entry per excluded label, in instance order.
    pub excluded: Vec<Exclusion<T>>,
    /// Weak concept: `tau_w` per label in instance order.
    pub thresholds: Option<Vec<(String, T)>>,
}

impl<T: Scalar> SolutionReport<T> {
    pub fn is_member(&self, label: &str) -> bool {
        self.members.iter().any(|m| m == label)
    }

    /// Re-checks every exclusion certificate against the instance.
    pub fn verify(&self, inst: &Instance<T>) -> Result<bool> {
        let neg = -self.epsilon.clone();
        for ex in &self.excluded {
            let x = &inst.images[inst.index_of(&ex.label)?];
            let by = &inst.images[inst.index_of(&ex.by)?];
            if !ex.certificate.holds()
                || !ex
                    .certificate
                    .verify(by, x, &inst.cone, ex.relation, &self.epsilon)?
            {
                return Ok(false);
            }
            if let Some(rev) = &ex.reverse {
                if rev.holds() || !rev.verify(x, by, &inst.cone, RelationKind::Lower, &neg)? {
                    return Ok(false);
                }
            }
        }
        let mut all: Vec<&str> = self.members.iter().map(String::as_str).collect();
        all.extend(self.excluded.iter().map(|e| e.label.as_str()));
        all.sort_unstable();
        let mut labels = inst.labels();
        labels.sort_unstable();
        Ok(all == labels)
    }

    pub fn to_json(&self) -> Value {
        let certificates: Vec<Value> = self
            .excluded
            .iter()
            .map(|e| {
                let mut v = json!({
                    "x": e.label,
                    "by": e.by,
                    "relation": e.relation.name(),
                    "certificate": e.certificate.to_json(),
                });
                if let Some(r) = &e.reverse {
                    v["reverse"] = r.to_json();
                }
                v
            })
            .collect();
        let mut out = json!({
            "concept": self.concept.name(),
            "epsilon": self.epsilon.to_json(),
            "members": self.members,
            "certificates": certificates,
        });
        if let Some(th) = &self.thresholds {
            let map: Map<String, Value> = th.iter().map(|(l, t)| (l.clone(), t.to_json())).collect();
            out["thresholds"] = Value::Object(map);
        }
        out
    }
}

/// `M[from][to] = set_margin(F(from), F(to))`.
pub fn margin_matrix<T: Scalar>(inst: &Instance<T>) -> Result<Vec<Vec<T>>> {
    (0..inst.len())
        .into_par_iter()
        .map(|from| {
            inst.images
                .iter()
                .map(|to| set_margin(&inst.images[from], to, &inst.cone))
                .collect::<Result<Vec<T>>>()
        })
        .collect()
}

/// `tau_w(x) = max_{x'} set_margin(F(x'), F(x))`; `x` is `eps`-weakly minimal
/// iff `eps >= tau_w(x)`.
pub fn weak_threshold<T: Scalar>(inst: &Instance<T>) -> Result<Vec<T>> {
    Ok(thresholds_from(&margin_matrix(inst)?))
}

pub(crate) fn thresholds_from<T: Scalar>(m: &[Vec<T>]) -> Vec<T> {
    (0..m.len())
        .map(|to| {
            m.iter()
                .map(|row| row[to].clone())
                .reduce(max_of)
                .expect("nonempty instance")
        })
        .collect()
}

pub fn solve_direct<T: Scalar>(inst: &Instance<T>, concept: Concept, eps: &T) -> Result<SolutionReport<T>> {
    let m = margin_matrix(inst)?;
    solve_with_margins(inst, concept, eps, &m)
}

/// [`solve_direct`] reusing a precomputed [`margin_matrix`].
pub fn solve_with_margins<T: Scalar>(
    inst: &Instance<T>,
    concept: Concept,
    eps: &T,
    m: &[Vec<T>],
) -> Result<SolutionReport<T>> {
    if *eps < T::zero() {
        return Err(Error::InvalidParameter("epsilon must be nonnegative".into()));
    }
    let tol = T::default_tolerance();
    let neg = -eps.clone();
    let cone = &inst.cone;
    let verdicts: Vec<Option<Exclusion<T>>> = (0..inst.len())
        .into_par_iter()
        .map(|x| -> Result<Option<Exclusion<T>>> {
            let fx = &inst.images[x];
            for (y, fy) in inst.images.iter().enumerate() {
                let found = match concept {
                    Concept::Weak => {
                        if !lt_tol(eps, &m[y][x], &tol) {
                            continue;
                        }
                        let (_, cert) = relation_unchecked(fy, fx, cone, RelationKind::LowerStrict, eps)?;
                        Some((RelationKind::LowerStrict, cert, None))
                    }
                    Concept::TypeTwo => {
                        if !le_tol(eps, &m[y][x], &tol) {
                            continue;
                        }
                        let (ok, cert) = relation_unchecked(fy, fx, cone, RelationKind::LowerStrong, eps)?;
                        ok.then_some((RelationKind::LowerStrong, cert, None))
                    }
                    Concept::TypeOne => {
                        if !le_tol(eps, &m[y][x], &tol) || le_tol(&neg, &m[x][y], &tol) {
                            continue;
                        }
                        let (_, cert) = relation_unchecked(fy, fx, cone, RelationKind::Lower, eps)?;
                        let (_, rev) = relation_unchecked(fx, fy, cone, RelationKind::Lower, &neg)?;
                        Some((RelationKind::Lower, cert, Some(rev)))
                    }
                };
                if let Some((relation, certificate, reverse)) = found {
                    return Ok(Some(Exclusion {
                        label: inst.decisions[x].label.clone(),
                        by: inst.decisions[y].label.clone(),
                        relation,
                        certificate,
                        reverse,
                    }));
                }
            }
            Ok(None)
        })
        .collect::<Result<_>>()?;

    let mut members = Vec::new();
    let mut excluded = Vec::new();
    for (x, v) in verdicts.into_iter().enumerate() {
        match v {
            Some(e) => excluded.push(e),
            None => members.push(inst.decisions[x].label.clone()),
        }
    }
    let thresholds = (concept == Concept::Weak).then(|| {
        inst.labels().into_iter().zip(thresholds_from(m)).collect()
    });
    Ok(SolutionReport {
        concept,
        epsilon: eps.clone(),
        members,
        excluded,
        thresholds,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instance::{make_example, ExampleParams};
    use crate::scalar::Rational;

    fn zero() -> Rational {
        Rational::from_ratio(0, 1)
    }

    fn grid(name: &str, g: usize) -> Instance<Rational> {
        make_example(name, &ExampleParams { grid: Some(g), ..Default::default() }).unwrap()
    }

    #[test]
    fn mfdvp_type_two_is_everything() {
        let inst = make_example::<Rational>("mfdvp", &ExampleParams::default()).unwrap();
        let r = solve_direct(&inst, Concept::TypeTwo, &zero()).unwrap();
        assert_eq!(r.members, vec!["0", "1", "2"]);
        let th = weak_threshold(&inst).unwrap();
        assert!(th[0] <= zero());
    }

    #[test]
    fn strict_min_type_two() {
        let inst = grid("strict_min", 3);
        let r = solve_direct(&inst, Concept::TypeTwo, &zero()).unwrap();
        assert_eq!(r.members, vec!["0"]);
        assert!(r.verify(&inst).unwrap());
        assert!(weak_threshold(&inst).unwrap().iter().all(|t| *t == zero()));
        let w = solve_direct(&inst, Concept::Weak, &zero()).unwrap();
        assert_eq!(w.members.len(), 3);
    }

    #[test]
    fn t_one_type_one() {
        let inst = grid("t_one", 3);
        let r = solve_direct(&inst, Concept::TypeOne, &zero()).unwrap();
        assert_eq!(r.members, vec!["0.25"]);
        assert!(r.verify(&inst).unwrap());
        let two = solve_direct(&inst, Concept::TypeTwo, &zero()).unwrap();
        assert_eq!(two.members.len(), 3);
    }

    #[test]
    fn certificates_and_partition() {
        let inst = make_example::<Rational>(
            "random_finite",
            &ExampleParams { seed: 3, size: 7, ..Default::default() },
        )
        .unwrap();
        for concept in [Concept::Weak, Concept::TypeOne, Concept::TypeTwo] {
            for eps in [zero(), Rational::from_ratio(1, 2), Rational::from_ratio(2, 1)] {
                let r = solve_direct(&inst, concept, &eps).unwrap();
                assert!(r.verify(&inst).unwrap(), "{concept:?} {eps}");
            }
        }
    }

    #[test]
    fn concept_names_round_trip() {
        for c in [Concept::Weak, Concept::TypeOne, Concept::TypeTwo] {
            assert_eq!(c.name().parse::<Concept>().unwrap(), c);
        }
        assert!("best".parse::<Concept>().is_err());
    }
}
