pub mod algebra;
pub mod enumerator;
pub mod operations;
pub mod tiling;
pub mod verifier;
pub mod weight;
