//! Truncated digests for the stored half of the collision search.
//!
//! Entries keep only the first 4Q bits (Q hex digits) of a 128-bit digest of
//! the half-product. Truncation can only cause spurious matches, never missed
//! ones, and every match is re-verified with exact modular products.

use md5::{Digest as _, Md5};
use num_bigint::BigUint;
use sha2::Sha256;

/// The digest backing the half-set, pinned in run logs so stored artifacts
/// stay portable across builds.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum DigestKind {
    #[default]
    Md5,
    /// First 128 bits of SHA-256.
    Sha256,
}

impl DigestKind {
    pub fn name(&self) -> &'static str {
        match self {
            DigestKind::Md5 => "md5",
            DigestKind::Sha256 => "sha256",
        }
    }

    pub fn parse(name: &str) -> Option<DigestKind> {
        match name {
            "md5" => Some(DigestKind::Md5),
            "sha256" => Some(DigestKind::Sha256),
            _ => None,
        }
    }
}

/// 128-bit digest of the canonical (minimal big-endian) byte encoding.
pub fn digest128(kind: DigestKind, x: &BigUint) -> u128 {
    let bytes = x.to_bytes_be();
    let mut out = [0u8; 16];
    match kind {
        DigestKind::Md5 => {
            let mut hasher = Md5::new();
            hasher.update(&bytes);
            out.copy_from_slice(&hasher.finalize());
        }
        DigestKind::Sha256 => {
            let mut hasher = Sha256::new();
            hasher.update(&bytes);
            out.copy_from_slice(&hasher.finalize()[..16]);
        }
    }
    u128::from_be_bytes(out)
}

/// The first 4Q bits of the digest, right-aligned. Q = 32 keeps all 128 bits.
pub fn truncated_digest(kind: DigestKind, x: &BigUint, q_hex: u32) -> u128 {
    debug_assert!((1..=32).contains(&q_hex));
    let d = digest128(kind, x);
    if q_hex >= 32 {
        d
    } else {
        d >> (128 - 4 * q_hex)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn q32_keeps_everything() {
        let x = BigUint::from(190_238u64);
        assert_eq!(truncated_digest(DigestKind::Md5, &x, 32), digest128(DigestKind::Md5, &x));
    }

    #[test]
    fn prefix_property() {
        let x = BigUint::from(9_851_537u64);
        let full = digest128(DigestKind::Md5, &x);
        assert_eq!(truncated_digest(DigestKind::Md5, &x, 1), full >> 124);
        for q in 1..32 {
            let short = truncated_digest(DigestKind::Md5, &x, q);
            let longer = truncated_digest(DigestKind::Md5, &x, q + 1);
            assert_eq!(short, longer >> 4);
        }
    }

    #[test]
    fn deterministic_across_calls() {
        let x = BigUint::from(42u32);
        assert_eq!(
            truncated_digest(DigestKind::Md5, &x, 12),
            truncated_digest(DigestKind::Md5, &x, 12)
        );
        assert_ne!(
            digest128(DigestKind::Md5, &x),
            digest128(DigestKind::Sha256, &x)
        );
    }

    #[test]
    fn md5_known_vector() {
        // md5("") = d41d8cd98f00b204e9800998ecf8427e; BigUint zero encodes as [0]
        // so instead pin md5 of the single byte 0x2a (the number 42).
        let d = digest128(DigestKind::Md5, &BigUint::from(42u32));
        assert_eq!(format!("{d:032x}"), "3389dae361af79b04c9c8e7057f60cc6");
        let s = digest128(DigestKind::Sha256, &BigUint::from(42u32));
        assert_eq!(format!("{s:032x}"), "684888c0ebb17f374298b65ee2807526");
    }
}
