//! The user guide, verbatim from `book/src/`, so every code block in the
//! book compiles and runs as a doc-test of this crate. Read it rendered
//! with `mdbook serve book`, or right here in rustdoc.

#[doc = include_str!("../../../book/src/01-overview.md")]
pub mod overview {}

#[doc = include_str!("../../../book/src/02-bits-and-rationals.md")]
pub mod bits_and_rationals {}

#[doc = include_str!("../../../book/src/03-reference-machine.md")]
pub mod reference_machine {}

#[doc = include_str!("../../../book/src/04-complexity-tables.md")]
pub mod complexity_tables {}

#[doc = include_str!("../../../book/src/05-predictors.md")]
pub mod predictors {}

#[doc = include_str!("../../../book/src/06-environments.md")]
pub mod environments {}

#[doc = include_str!("../../../book/src/07-block-machines.md")]
pub mod block_machines {}

#[doc = include_str!("../../../book/src/08-experiments-cli.md")]
pub mod experiments_cli {}
