//! Quantum walks on symmetric tensor extensions of commutative association schemes.
//!
//! The crate builds small base schemes with closed-form eigendata ([`scheme`]), handles
//! their `N`-th symmetric tensor products at the multi-index level ([`extension`]),
//! evaluates multivariate Krawtchouk polynomials ([`krawtchouk`]), and computes
//! continuous-time walk amplitudes in closed form ([`walk`]). [`detectors`] classifies
//! the resulting profiles into transfer events, and [`oracle`] re-derives everything
//! by brute force on the materialized `|X|^N`-point graph.

pub mod detectors;
pub mod error;
pub mod extension;
pub mod krawtchouk;
pub mod linalg;
pub mod oracle;
pub mod scheme;
pub mod walk;

pub use detectors::{classify, scan, EventKind, Scenario, TransferEvent};
pub use error::{Error, Result};
pub use extension::{enumerate_indices, multinomial, ExtensionScheme, MultiIndex};
pub use krawtchouk::{krawtchouk_genfun, krawtchouk_series, params_from_scheme, GriffithsParams};
pub use scheme::{directed_ngon, ordered_word_scheme, trivial_scheme_2, AssociationScheme, ValidationReport};
pub use walk::{amplitudes, projected_matrix, AmplitudeProfile, ProjectedMatrix, WalkSpec};
