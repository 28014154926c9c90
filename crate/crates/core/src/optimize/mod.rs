//! Optimized cut sets, binary representations and the bounds they yield.

mod binary;
mod bounds;
mod construct;
mod explore;
mod paths;

pub use binary::*;
pub use bounds::*;
pub use construct::*;
pub use explore::*;
pub use paths::*;
