//! Model checking ∀*∃* HyperLTL on finite transition systems through
//! parity games with prophecy variables.

pub mod automata;
pub mod bench;
pub mod checker;
pub mod error;
pub mod game;
mod graph;
pub mod hyperltl;
pub mod lasso;
pub mod model;
pub mod prophecy;

pub use error::{Error, Result};
