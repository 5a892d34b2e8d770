pub mod arith;
pub mod descent_global;
pub mod descent_local;
pub mod elliptic;
pub mod error;
pub mod jacobian;
pub mod poly;
pub mod tate;

pub use error::{Error, Result};
