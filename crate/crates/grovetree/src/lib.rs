//! Stochastic uniform growth trees: generation, closed-form structural
//! quantities, and independent random-walk oracles.
//!
//! The crate is organized around three questions about a growing tree family:
//!
//! * **What does the tree look like?** [`tree`] holds the immutable labeled
//!   tree type and exact combinatorial functionals (distances, Wiener index,
//!   split sizes). [`growth`] builds trees by iterating one of three
//!   stochastic growth operations (vertex-based, edge-based, mixture) from an
//!   arbitrary seed tree.
//! * **What do the closed forms predict?** [`analytic`] evaluates the
//!   expected vertex count, Wiener index, mean first-passage time, Kirchhoff
//!   index, network criticality, scaling exponents, and spectral dimensions
//!   for all three families, in both `f64` and exact rational arithmetic.
//! * **Do the predictions hold on concrete trees?** [`walk`] computes hitting
//!   times by dense linear solve, by the split-size shortcut, by Laplacian
//!   eigenvalues, and by Monte Carlo walks - deliberately independent routes
//!   used to cross-check each other and the closed forms.
//!
//! [`driver`] wires these pieces into the `grovetree` command-line tool and
//! its JSON/CSV outputs. Each major capability also has a runnable example
//! under `examples/`.

pub mod analytic;
pub mod driver;
pub mod growth;
pub mod tree;
pub mod walk;

pub use growth::{GrowthKind, GrowthSpec, LengthDistribution, RngStream};
pub use tree::Tree;
