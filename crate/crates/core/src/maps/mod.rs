//! Linear maps on `ℳ_d(ℂ)` in Kraus, transfer-matrix and Choi form, their
//! structural checks, exact and sampled positivity oracles, classical
//! stochastic matrices, and a catalog of test maps.

pub mod catalog;
mod linear;
mod oracle;
mod stochastic;

pub use catalog::{catalog, catalog_map, CatalogSpec, MapItem};
pub use linear::{KrausTerm, LinearMap, MapRepr};
pub use oracle::{cp_oracle, oracle_verdict, positivity_oracle, OracleVerdict, PositivityEstimate};
pub use stochastic::{
    identity_stochastic, negative_entry, permutation, random_simplex_point, random_stochastic,
    stochastic_apply, uniform_mixer, StochasticMap,
};
