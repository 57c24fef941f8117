//! Bilinear multiplication algorithms in finite field extensions: exact field
//! arithmetic, decomposition verification and search, constructive builders,
//! function-field tower data and a bound engine for the tensor rank of
//! multiplication in F_{q^n}/F_q.

pub mod gf_core;
pub mod tensor_decomp;
pub mod constructor;
pub mod towers;
pub mod bounds;
pub mod cli;
