pub mod arith;
pub mod bernstein;
pub mod bitonic;
pub mod cli;
pub mod cost;
pub mod dse;
pub mod error;
pub mod eval;
pub mod gelu;
pub mod scale;
pub mod softmax;
pub mod stream;

pub use error::{Error, Result};
pub use scale::{Exact, Scale};
pub use stream::ThermometerStream;
