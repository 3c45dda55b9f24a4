pub mod bits;
pub mod construct;
pub mod decode;
pub mod dense;
pub mod encode;
pub mod error;
pub mod phy;
pub mod sim;
pub mod sozu;

pub use error::{Error, Result};
