//! The problem `min F(x) over x in Omega` as a finite labeled list of
//! decisions, their images, and an ordering cone.

mod examples;
mod json;

pub use examples::{make_example, ExampleParams, PolyShape, EXAMPLE_NAMES};

use serde_json::{Map, Value};

use crate::cone::Cone;
use crate::error::{Error, Result};
use crate::imagesets::{covering_number_internal, hausdorff_squared, ImageSet};
use crate::scalar::{max_of, Scalar};

#[derive(Debug, Clone, PartialEq)]
pub struct Decision<T> {
    pub label: String,
    pub x: Vec<T>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Instance<T> {
    pub cone: Cone<T>,
    pub decisions: Vec<Decision<T>>,
    /// Parallel to `decisions`.
    pub images: Vec<ImageSet<T>>,
    pub metadata: Map<String, Value>,
}

impl<T: Scalar> Instance<T> {
    /// Builds and validates an instance.
    pub fn new(
        cone: Cone<T>,
        decisions: Vec<Decision<T>>,
        images: Vec<ImageSet<T>>,
        metadata: Map<String, Value>,
    ) -> Result<Self> {
        let inst = Self {
            cone,
            decisions,
            images,
            metadata,
        };
        inst.validate()?;
        Ok(inst)
    }

    pub fn validate(&self) -> Result<()> {
        if self.decisions.is_empty() {
            return Err(Error::NoDecisions);
        }
        if self.images.len() != self.decisions.len() {
            return Err(Error::DimMismatch {
                field: "images".into(),
                expected: self.decisions.len(),
                found: self.images.len(),
            });
        }
        let n = self.decisions[0].x.len();
        let m = self.cone.dim();
        let mut seen = std::collections::HashSet::new();
        for (k, d) in self.decisions.iter().enumerate() {
            if !seen.insert(d.label.as_str()) {
                return Err(Error::DuplicateLabel(d.label.clone()));
            }
            if d.x.len() != n {
                return Err(Error::DimMismatch {
                    field: format!("decisions[{k}].x"),
                    expected: n,
                    found: d.x.len(),
                });
            }
            if d.x.iter().any(|v| !v.is_finite_value()) {
                return Err(Error::NonFinite(format!("decisions[{k}].x")));
            }
        }
        for (k, img) in self.images.iter().enumerate() {
            if img.is_empty() {
                return Err(Error::EmptyImage(self.decisions[k].label.clone()));
            }
            for (i, p) in img.points().iter().enumerate() {
                if p.len() != m {
                    return Err(Error::DimMismatch {
                        field: format!("images[{k}].points[{i}]"),
                        expected: m,
                        found: p.len(),
                    });
                }
                if p.iter().any(|v| !v.is_finite_value()) {
                    return Err(Error::NonFinite(format!("images[{k}].points[{i}]")));
                }
            }
        }
        let finite = self.images.iter().position(ImageSet::is_finite);
        let poly = self.images.iter().position(|i| !i.is_finite());
        if let (Some(f), Some(p)) = (finite, poly) {
            return Err(Error::MixedImageKinds {
                finite: self.decisions[f].label.clone(),
                polytope: self.decisions[p].label.clone(),
            });
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.decisions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.decisions.is_empty()
    }

    pub fn labels(&self) -> Vec<String> {
        self.decisions.iter().map(|d| d.label.clone()).collect()
    }

    pub fn index_of(&self, label: &str) -> Result<usize> {
        self.decisions
            .iter()
            .position(|d| d.label == label)
            .ok_or_else(|| Error::UnknownLabel(label.to_string()))
    }

    pub fn image_dim(&self) -> usize {
        self.cone.dim()
    }

    pub fn decision_dim(&self) -> usize {
        self.decisions[0].x.len()
    }

    pub fn all_finite(&self) -> bool {
        self.images.iter().all(ImageSet::is_finite)
    }

    /// Largest image size (points or vertices).
    pub fn max_image_len(&self) -> usize {
        self.images.iter().map(ImageSet::len).max().unwrap_or(0)
    }

    /// Converts every coordinate to another scalar type through `f64`
    /// (or exactly, when both sides are rational).
    pub fn convert<U: Scalar>(&self) -> Result<Instance<U>> {
        let json = self.to_json();
        Instance::<U>::from_json_value(&json)
    }
}

fn check_same_decisions<T: Scalar>(a: &Instance<T>, b: &Instance<T>) -> Result<()> {
    if a.decisions != b.decisions {
        return Err(Error::MismatchedDecisions(format!(
            "{} vs {} decisions, or differing labels/points",
            a.len(),
            b.len()
        )));
    }
    Ok(())
}

/// Squared distance `max_x d_H(F1(x), F2(x))^2`, exact for rationals.
pub fn instance_distance_squared<T: Scalar>(a: &Instance<T>, b: &Instance<T>) -> Result<T> {
    check_same_decisions(a, b)?;
    let mut out = T::zero();
    for (fa, fb) in a.images.iter().zip(&b.images) {
        out = max_of(out, hausdorff_squared(fa, fb)?);
    }
    Ok(out)
}

/// `max_x d_H(F1(x), F2(x))` over identical decision lists.
pub fn instance_distance<T: Scalar>(a: &Instance<T>, b: &Instance<T>) -> Result<T> {
    Ok(instance_distance_squared(a, b)?.sqrt_value())
}

/// Replaces each image by the centers of an internal `eps`-cover, a
/// subset at Hausdorff distance at most `eps`.
pub fn discretize_map<T: Scalar>(inst: &Instance<T>, eps: &T) -> Result<Instance<T>> {
    if !inst.all_finite() {
        return Err(Error::PolytopeUnsupported);
    }
    let images = inst
        .images
        .iter()
        .map(|img| Ok(ImageSet::Finite(covering_number_internal(img, eps)?.centers)))
        .collect::<Result<Vec<_>>>()?;
    let mut metadata = inst.metadata.clone();
    metadata.insert("discretized_eps".into(), eps.to_json());
    Instance::new(inst.cone.clone(), inst.decisions.clone(), images, metadata)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::Rational;

    fn q(n: i64, d: i64) -> Rational {
        Rational::from_ratio(n, d)
    }

    fn single(points: Vec<Vec<Rational>>) -> Instance<Rational> {
        Instance::new(
            Cone::orthant(2),
            vec![Decision {
                label: "a".into(),
                x: vec![q(0, 1)],
            }],
            vec![ImageSet::Finite(points)],
            Map::new(),
        )
        .unwrap()
    }

    #[test]
    fn discretize_example() {
        let inst = single(vec![
            vec![q(0, 1), q(0, 1)],
            vec![q(3, 10), q(0, 1)],
            vec![q(1, 1), q(0, 1)],
        ]);
        let eps = q(35, 100);
        let d = discretize_map(&inst, &eps).unwrap();
        let centers = d.images[0].points();
        assert_eq!(centers.len(), 2);
        assert!(centers.iter().all(|c| inst.images[0].points().contains(c)));
        assert!(instance_distance_squared(&inst, &d).unwrap() <= eps.clone() * eps);
        // below the smallest gap every point is its own center
        let tight = discretize_map(&inst, &q(1, 10)).unwrap();
        assert_eq!(tight.images, inst.images);
    }

    #[test]
    fn distance_of_translation() {
        let inst = make_example::<f64>("mfdvp", &ExampleParams::default()).unwrap();
        let mut moved = inst.clone();
        moved.images = inst.images.iter().map(|i| i.translate(&[0.1, 0.0])).collect();
        assert!((instance_distance(&inst, &moved).unwrap() - 0.1).abs() < 1e-12);
        assert_eq!(instance_distance(&inst, &inst).unwrap(), 0.0);
    }

    #[test]
    fn mismatched_decisions_rejected() {
        let a = make_example::<f64>("mfdvp", &ExampleParams::default()).unwrap();
        let mut b = a.clone();
        b.decisions[0].label = "z".into();
        assert!(matches!(instance_distance(&a, &b), Err(Error::MismatchedDecisions(_))));
    }

    #[test]
    fn validation_errors() {
        let a = make_example::<f64>("mfdvp", &ExampleParams::default()).unwrap();
        let mut dup = a.clone();
        dup.decisions[1].label = "0".into();
        assert_eq!(dup.validate(), Err(Error::DuplicateLabel("0".into())));
        let mut wide = a.clone();
        wide.images[1] = ImageSet::Finite(vec![vec![0.0, 0.0, 0.0]]);
        assert!(matches!(wide.validate(), Err(Error::DimMismatch { .. })));
        let mut empty = a.clone();
        empty.images[2] = ImageSet::Finite(vec![]);
        assert_eq!(empty.validate(), Err(Error::EmptyImage("2".into())));
        let mut mixed = a;
        mixed.images[0] = ImageSet::Polytope(vec![vec![0.0, 0.0]]);
        assert!(matches!(mixed.validate(), Err(Error::MixedImageKinds { .. })));
    }
}
