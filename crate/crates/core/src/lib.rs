//! Choice revision over a finite propositional language.

pub mod believability;
pub mod cli;
pub mod descriptor;
pub mod error;
pub mod graph;
pub mod io;
pub mod logic;
pub mod model;
pub mod operator;
pub mod report;
pub mod synthesis;

pub use error::{Error, Result};
