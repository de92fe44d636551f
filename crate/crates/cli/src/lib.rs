//! Library surface of the command-line tool: the expression parser, the
//! expression-to-generating-function lowering, and the subcommand logic,
//! exposed so integration tests can call them without spawning processes.

pub mod commands;
pub mod convert;
pub mod expr;
