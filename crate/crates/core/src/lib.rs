pub mod channel;
pub mod cli;
pub mod error;
pub mod metrics;
pub mod numerics;
pub mod precoders;
pub mod receivers;
pub mod sim;

pub use error::{Error, Result};
