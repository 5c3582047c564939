//! Lower set less relations between images, shifted by `eps e`.
//!
//! `A ≼ B - eps e` holds iff every target `b` of `B` lies in `A + K + eps e`.
//! Targets are the points of a finite `B` or the vertices of a polytope `B`;
//! the vertex reduction needs `A + K` convex, so a finite `A` cannot be
//! compared against a polytope `B`.

use crate::cone::{Cone, Order};
use crate::error::{Error, Result};
use crate::imagesets::{ImageSet, Witness};
use crate::scalar::{le_tol, lt_tol, min_of, Scalar};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum RelationKind {
    /// `B - eps e ⊆ A + K`
    Lower,
    /// `B - eps e ⊆ A + K \ {0}`
    LowerStrong,
    /// `B - eps e ⊆ A + int K`
    LowerStrict,
}

impl RelationKind {
    pub fn name(self) -> &'static str {
        match self {
            RelationKind::Lower => "lower",
            RelationKind::LowerStrong => "lower_strong",
            RelationKind::LowerStrict => "lower_strict",
        }
    }

    fn order(self) -> Order {
        match self {
            RelationKind::Lower => Order::Weak,
            RelationKind::LowerStrong => Order::Strong,
            RelationKind::LowerStrict => Order::Strict,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum RelationCertificate<T> {
    /// One witness per target of `B`, in target order.
    Holds { witnesses: Vec<Witness<T>> },
    /// Index of a target of `B` with no witness in `A`.
    Fails { target: usize },
}

impl<T: Scalar> RelationCertificate<T> {
    pub fn holds(&self) -> bool {
        matches!(self, RelationCertificate::Holds { .. })
    }

    /// Re-checks the certificate from scratch. A `Holds` certificate is
    /// checked witness by witness; a `Fails` certificate by recomputing the
    /// named target with the solver.
    pub fn verify(
        &self,
        a: &ImageSet<T>,
        b: &ImageSet<T>,
        cone: &Cone<T>,
        kind: RelationKind,
        eps: &T,
    ) -> Result<bool> {
        match self {
            RelationCertificate::Holds { witnesses } => {
                if witnesses.len() != b.len() {
                    return Ok(false);
                }
                Ok(witnesses.iter().zip(b.points()).all(|(w, target)| {
                    let y = w.resolve(a);
                    cone.compare(&y, target, eps, kind.order())
                }))
            }
            RelationCertificate::Fails { target } => {
                let Some(t) = b.points().get(*target) else {
                    return Ok(false);
                };
                Ok(target_witness(a, t, cone, kind, eps)?.is_none())
            }
        }
    }

    pub fn to_json(&self) -> serde_json::Value {
        match self {
            RelationCertificate::Holds { witnesses } => serde_json::json!({
                "kind": "holds",
                "witnesses": witnesses.iter().map(Witness::to_json).collect::<Vec<_>>(),
            }),
            RelationCertificate::Fails { target } => serde_json::json!({
                "kind": "fails",
                "target": target,
            }),
        }
    }
}

fn check_kinds<T: Scalar>(a: &ImageSet<T>, b: &ImageSet<T>, cone: &Cone<T>) -> Result<()> {
    for (name, s) in [("left", a), ("right", b)] {
        if s.is_empty() {
            return Err(Error::EmptyImage(name.into()));
        }
        if s.dim() != cone.dim() {
            return Err(Error::DimMismatch {
                field: format!("{name} image"),
                expected: cone.dim(),
                found: s.dim(),
            });
        }
    }
    if a.is_finite() && !b.is_finite() {
        return Err(Error::MixedImageKinds {
            finite: "left".into(),
            polytope: "right".into(),
        });
    }
    Ok(())
}

/// `min_b point_margin(b, A)` over the targets of `B`. `A ≺ B - eps e` iff
/// `eps < set_margin`, and `A ≼ B - eps e` iff `eps <= set_margin`.
pub fn set_margin<T: Scalar>(a: &ImageSet<T>, b: &ImageSet<T>, cone: &Cone<T>) -> Result<T> {
    check_kinds(a, b, cone)?;
    let mut out: Option<T> = None;
    for target in b.points() {
        let mu = a.point_margin(target, cone)?;
        out = Some(match out {
            None => mu,
            Some(m) => min_of(m, mu),
        });
    }
    Ok(out.expect("nonempty right image"))
}

fn target_witness<T: Scalar>(
    a: &ImageSet<T>,
    target: &[T],
    cone: &Cone<T>,
    kind: RelationKind,
    eps: &T,
) -> Result<Option<Witness<T>>> {
    let tol = T::default_tolerance();
    match kind {
        RelationKind::LowerStrong => a.strong_witness(target, cone, eps),
        RelationKind::Lower | RelationKind::LowerStrict => {
            let (mu, w) = a.point_margin_witness(target, cone)?;
            let ok = if kind == RelationKind::Lower {
                le_tol(eps, &mu, &tol)
            } else {
                lt_tol(eps, &mu, &tol)
            };
            Ok(ok.then_some(w))
        }
    }
}

/// Decides `A ⋄ B - eps e` and returns a certificate.
pub fn set_relation<T: Scalar>(
    a: &ImageSet<T>,
    b: &ImageSet<T>,
    cone: &Cone<T>,
    kind: RelationKind,
    eps: &T,
) -> Result<(bool, RelationCertificate<T>)> {
    if *eps < T::zero() {
        return Err(Error::InvalidParameter("epsilon must be nonnegative".into()));
    }
    relation_unchecked(a, b, cone, kind, eps)
}

/// [`set_relation`] allowing a negative shift, used for the reverse test of
/// type-one minimality.
pub(crate) fn relation_unchecked<T: Scalar>(
    a: &ImageSet<T>,
    b: &ImageSet<T>,
    cone: &Cone<T>,
    kind: RelationKind,
    eps: &T,
) -> Result<(bool, RelationCertificate<T>)> {
    check_kinds(a, b, cone)?;
    let mut witnesses = Vec::with_capacity(b.len());
    for (i, target) in b.points().iter().enumerate() {
        match target_witness(a, target, cone, kind, eps)? {
            Some(w) => witnesses.push(w),
            None => return Ok((false, RelationCertificate::Fails { target: i })),
        }
    }
    Ok((true, RelationCertificate::Holds { witnesses }))
}
