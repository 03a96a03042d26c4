pub mod algebra;
pub mod calculus;
pub mod cli;
pub mod diagnostics;
pub mod error;
pub mod exec;
pub mod fft;
pub mod field;
pub mod gauge;
pub mod grid;
pub mod nonlinearity;
pub mod sample;
pub mod selftest;
pub mod solver;
pub mod vector_fields;

pub use error::{Error, Result};
pub use exec::Exec;

#[global_allocator]
static ALLOC: mimalloc::MiMalloc = mimalloc::MiMalloc;
