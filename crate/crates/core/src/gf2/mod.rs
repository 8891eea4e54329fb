//! Arithmetic over GF(2)[x] and GF(2^lambda).

mod bitpoly;
mod clmul;
pub mod counting;
mod field;
mod opcount;
mod reduce;

pub use bitpoly::BitPoly;
pub use clmul::{clmul, clmul_cost, hardware_clmul, Backend};
pub use field::{find_irreducible, FieldSpec};
pub use opcount::OpCount;
pub use reduce::{gf_add, gf_mul, gf_mul_cost, reduce, reduce_cost};

/// The `m` low-order coefficients of `p`.
pub fn lsb_truncate(p: &BitPoly, m: usize) -> crate::Result<BitPoly> {
    p.lsb_truncate(m)
}
