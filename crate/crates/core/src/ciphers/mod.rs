//! Cipher constructions: one-time pad, partition codes and compress-encrypt-pad.

pub mod cep;
pub mod partition;
pub mod prefix;
pub mod spec;

pub use cep::build_compress_encrypt_pad;
pub use partition::{
    build_one_time_pad, build_partition_code, build_partition_from_spec, psi_exact, psi_floor,
    PartitionCodeSpec,
};
pub use prefix::{huffman_code, shannon_code, PrefixCode};
pub use spec::{decrypt, digits_label, encrypt, induced_joint, CipherSpec, Decoder, EncoderRow};
