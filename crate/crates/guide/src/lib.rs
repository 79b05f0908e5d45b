//! Runs the code snippets of the book as doc-tests.

#[doc = include_str!("../../../book/src/overview.md")]
pub mod overview {}
#[doc = include_str!("../../../book/src/local.md")]
pub mod local {}
#[doc = include_str!("../../../book/src/paths.md")]
pub mod paths {}
#[doc = include_str!("../../../book/src/admissible.md")]
pub mod admissible {}
#[doc = include_str!("../../../book/src/equations.md")]
pub mod equations {}
#[doc = include_str!("../../../book/src/verify.md")]
pub mod verify {}
#[doc = include_str!("../../../book/src/cli.md")]
pub mod cli {}
