//! Compiles the guide's code samples as doc-tests so `cargo test` keeps the
//! book honest. Not a library; nothing here is meant to be imported.

#[doc = include_str!("../../../book/src/intro.md")]
pub mod ch01 {}

#[doc = include_str!("../../../book/src/noise.md")]
pub mod ch02 {}

#[doc = include_str!("../../../book/src/dephasing.md")]
pub mod ch03 {}

#[doc = include_str!("../../../book/src/analysis.md")]
pub mod ch04 {}

#[doc = include_str!("../../../book/src/cli.md")]
pub mod ch05 {}
