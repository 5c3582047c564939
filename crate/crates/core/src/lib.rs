//! Set optimization under the lower set less relation.

pub mod cone;
pub mod error;
pub mod imagesets;
pub mod instance;
pub mod lp;
pub mod plot;
pub mod scalar;
pub mod setcover;
pub mod setrelations;
pub mod solver_direct;
pub mod vectorizer;
pub mod verifier;

pub use cone::{Cone, Order};
pub use error::{Error, Result};
pub use imagesets::{ImageSet, Point, Witness};
pub use instance::{make_example, Decision, ExampleParams, Instance};
pub use scalar::{Rational, Scalar};
pub use setrelations::{set_margin, set_relation, RelationCertificate, RelationKind};
pub use solver_direct::{solve_direct, weak_threshold, Concept, SolutionReport};
pub use vectorizer::{
    brute_force_vp, covering_p_bound, membership_vp, minimal_p, solve_weighted_sum, TupleCertificate,
    VpKind, VpReport, Vectorizer,
};
pub use verifier::{convex_experiment, run_suite, ConvexConfig, SuiteConfig, SuiteReport};

/// Instances over exact rationals, the mode used for verification.
pub type ExactInstance = Instance<Rational>;
pub type Instance64 = Instance<f64>;
pub type Instance32 = Instance<f32>;
