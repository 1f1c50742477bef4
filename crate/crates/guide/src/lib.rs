//! The book's chapters as doc comments, so `cargo test` runs every snippet.

#[doc = include_str!("../../../book/src/introduction.md")]
pub mod introduction {}
#[doc = include_str!("../../../book/src/fields.md")]
pub mod fields {}
#[doc = include_str!("../../../book/src/surfaces.md")]
pub mod surfaces {}
#[doc = include_str!("../../../book/src/smoothness.md")]
pub mod smoothness {}
#[doc = include_str!("../../../book/src/local-factors.md")]
pub mod local_factors {}
#[doc = include_str!("../../../book/src/stabilization.md")]
pub mod stabilization {}
#[doc = include_str!("../../../book/src/census.md")]
pub mod census {}
#[doc = include_str!("../../../book/src/anti-bertini.md")]
pub mod anti_bertini {}
#[doc = include_str!("../../../book/src/cli.md")]
pub mod cli {}
