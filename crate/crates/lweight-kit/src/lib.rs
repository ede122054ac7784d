//! Exact combinatorics of loop weights ("ℓ-weights") for quantum loop
//! algebras, with full support for ground parameters of finite odd order.
//!
//! The crate manipulates, exactly and symbolically:
//!
//! - spectral parameters in a free abelian symbol group times `ξ^Z`
//!   ([`ground`]);
//! - finite-type Cartan data and Weyl-group words ([`cartan`]);
//! - ξ-factorizations of split polynomials into quantum strings and
//!   Frobenius factors, with the resonance and regularity predicates on
//!   them ([`qfactor`]);
//! - the ℓ-weight lattice, its dominance cone, duality, and the Frobenius
//!   decomposition ([`lweight`]);
//! - the braid group action on ℓ-weights ([`braid`]);
//! - resonant-order decision procedures for tensor products ([`resonance`]);
//! - the elliptic-character block group and linking chains ([`blocks`]);
//! - q-characters: the sl₂ ladder, specialization, braid-invariance lower
//!   bounds, and the worked adjoint-node computation in type D ([`qchar`]);
//! - a desk-scale exact cyclotomic oracle for sl₂ tensor products
//!   ([`sl2oracle`]).
//!
//! A narrative guide with runnable examples lives in the `book/` directory
//! of the repository and is mirrored into [`guide`] so that every code
//! block in it is compiled and run by `cargo test --doc`.
//!
//! The `lwk` binary exposes the main operations as CLI subcommands with
//! deterministic JSON output; see [`session`].

pub mod blocks;
pub mod braid;
pub mod cartan;
pub mod ground;
pub mod guide;
pub mod intlin;
pub mod lweight;
pub mod parse;
pub mod qchar;
pub mod qfactor;
pub mod resonance;
pub mod session;
pub mod sl2oracle;

pub use cartan::{build_cartan, CartanData, TypeLetter, Weight, WeylWord};
pub use ground::{BaseVec, FieldMode, GroundField, SpectralParam};
pub use lweight::LWeight;
