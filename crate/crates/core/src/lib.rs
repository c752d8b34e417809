pub mod error;
pub mod superlinalg;
pub mod gl11_modules;
pub mod tensor_ring;
pub mod kz_engine;
pub mod category_checks;
pub mod quantum_gl11;
pub mod correlators;

pub use error::{KzError, Result};
