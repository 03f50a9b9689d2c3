//! Restricted root data, Cartan subsets and radial parts of the quadratic Casimir of so(p+1,q+1)
//! relative to the four-point pair and the defect pairs, with Calogero–Sutherland matching.
//!
//! The examples are the intended entry points:
//!
//! ```text
//! cargo run -p mscasimir --example root_data        # C2 root data for d = 3..6, a_p types
//! cargo run -p mscasimir --example cartan_catalog   # the eight Lorentzian Cartan subsets, Ad(t) and ε
//! cargo run -p mscasimir --example casimir_oracle   # radial formula vs Ω in the defining rep
//! cargo run -p mscasimir --example scalar_blocks    # scalar case as a gauged BC2 Laplacian
//! cargo run -p mscasimir --example spinor_matrices  # K/L tables for spinning d = 3, exact
//! cargo run -p mscasimir --example defect_blocks    # defect pairs, B_N / D_N
//! cargo run -p mscasimir --example cross_ratios     # (u, v), the affine Weyl group, causal regions
//! cargo run -p mscasimir --example custom_bimodule  # radial operator for user matrices
//! ```
//!
//! [`verify`] bundles the numerical checks into suites; the `mscasimir` binary exposes them.

pub mod cartan;
pub mod cli;
pub mod coords;
pub mod csmodels;
pub mod error;
pub mod json;
pub mod linalg;
pub mod liealg;
pub mod radial;
pub mod rootspace;
pub mod scalar;
pub mod verify;

pub use error::{Error, Result};
