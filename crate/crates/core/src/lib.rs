pub mod dominant;
pub mod error;
pub mod gadgets;
pub mod instance;
pub mod lp;
pub mod maxweight;
pub mod popularity;
pub mod witness;
pub mod rational;
pub mod stable;
pub mod subgraph;

pub use error::{Error, Result};
pub use instance::{Kind, Matching, PreferenceInstance, Side, Vertex};
pub use rational::Rational;
