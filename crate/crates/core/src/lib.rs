//! A toolkit for stable marriage problems, classical (strict complete
//! preference lists) and with ties and incomplete lists.
//!
//! The pieces:
//!
//! * [`model`] — instances, matchings, blocking pairs, preference queries.
//! * [`generate`] — seeded random instance generators and the instance text
//!   format.
//! * [`stability`] — blocking-pair detection, dominance filtering,
//!   evaluation, and the pair-removal move operators.
//! * [`gale_shapley`] — the deferred-acceptance baseline (side-optimal
//!   stable marriages).
//! * [`search`] — the local-search solvers.
//! * [`lattice`] — exhaustive enumeration, the dominance Hasse diagram, and
//!   sampling-fairness metrics.
//! * [`naive`] — deliberately simple reference implementations for
//!   cross-checking.
//! * [`rng`] — the pinned pseudo-random generator all of the above draw
//!   from.

pub mod fixtures;
pub mod gale_shapley;
pub mod generate;
pub mod lattice;
pub mod model;
pub mod naive;
pub mod rng;
pub mod search;
pub mod stability;

pub use gale_shapley::{gale_shapley, GsError};
pub use generate::{gen_sm_ic, gen_smti, parse_instance, serialize_instance, GenParams};
pub use lattice::{build_lattice, enumerate_stable, EnumLimits, Lattice, SampleStats};
pub use model::{BlockingPair, Gender, Instance, Matching, Mode, PersonId, Preference};
pub use search::{run_search, SearchParams, SearchResult, Variant};
pub use stability::{blocking_pairs, evaluate, remove_pair, BlockingSet, Evaluation};
