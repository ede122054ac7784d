//! The user guide, mirrored from the repository's `book/` directory.
//!
//! Each chapter module below embeds one book chapter as its
//! documentation, so `cargo test --doc` compiles and runs every code
//! block in the book and the guide cannot drift from the library.  Read
//! the rendered version with `mdbook serve book/`, or browse these
//! modules in rustdoc.

#[doc = include_str!("../../../book/src/overview.md")]
pub mod overview {}

#[doc = include_str!("../../../book/src/ch01-ground.md")]
pub mod ch01_ground {}

#[doc = include_str!("../../../book/src/ch02-cartan.md")]
pub mod ch02_cartan {}

#[doc = include_str!("../../../book/src/ch03-factorization.md")]
pub mod ch03_factorization {}

#[doc = include_str!("../../../book/src/ch04-lweights.md")]
pub mod ch04_lweights {}

#[doc = include_str!("../../../book/src/ch05-braid.md")]
pub mod ch05_braid {}

#[doc = include_str!("../../../book/src/ch06-resonance.md")]
pub mod ch06_resonance {}

#[doc = include_str!("../../../book/src/ch07-blocks.md")]
pub mod ch07_blocks {}

#[doc = include_str!("../../../book/src/ch08-qcharacters.md")]
pub mod ch08_qcharacters {}

#[doc = include_str!("../../../book/src/ch09-oracle.md")]
pub mod ch09_oracle {}

#[doc = include_str!("../../../book/src/ch10-cli.md")]
pub mod ch10_cli {}
