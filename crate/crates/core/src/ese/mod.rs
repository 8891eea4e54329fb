//! The classical scheme, key tags for the quantum scheme, parameter
//! derivation and the ciphertext wire format.

mod params;
mod scheme;
pub mod wire;

pub use params::{derive_key_length, indistinguishability_key_length, SchemeParams};
pub use scheme::{
    decrypt, encrypt, encrypt_with_randomness, gen, quantum_keytag, quantum_keytag_with_randomness, recover_pauli_key,
    Ciphertext,
};
pub use wire::{deserialize, serialize, WireError};
