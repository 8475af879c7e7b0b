//! 64-bit FNV-1a, used for hashed n-gram keys.
//!
//! Keys are hashed over a fixed byte serialisation so that hashed indexes are
//! identical across platforms: word tokens are written as a `u32`
//! little-endian byte length followed by their UTF-8 bytes, token ids as
//! 4-byte little-endian integers.

pub const FNV_OFFSET_BASIS: u64 = 0xcbf2_9ce4_8422_2325;
pub const FNV_PRIME: u64 = 0x0000_0100_0000_01b3;

#[derive(Clone, Copy, Debug)]
pub struct Fnv1a(u64);

impl Default for Fnv1a {
    fn default() -> Self {
        Fnv1a(FNV_OFFSET_BASIS)
    }
}

impl Fnv1a {
    pub fn new() -> Self {
        Self::default()
    }

    #[inline]
    pub fn write(&mut self, bytes: &[u8]) {
        for &b in bytes {
            self.0 ^= u64::from(b);
            self.0 = self.0.wrapping_mul(FNV_PRIME);
        }
    }

    #[inline]
    pub fn finish(&self) -> u64 {
        self.0
    }
}

pub fn fnv1a(bytes: &[u8]) -> u64 {
    let mut h = Fnv1a::new();
    h.write(bytes);
    h.finish()
}

/// Hash of a word n-gram.
pub fn hash_words<S: AsRef<str>>(tokens: &[S]) -> u64 {
    let mut h = Fnv1a::new();
    for t in tokens {
        let t = t.as_ref().as_bytes();
        h.write(&(t.len() as u32).to_le_bytes());
        h.write(t);
    }
    h.finish()
}

/// Hash of a token-id n-gram.
pub fn hash_ids(ids: &[u32]) -> u64 {
    let mut h = Fnv1a::new();
    for id in ids {
        h.write(&id.to_le_bytes());
    }
    h.finish()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn published_vectors() {
        // Reference values from the FNV test suite.
        assert_eq!(fnv1a(b""), 0xcbf29ce484222325);
        assert_eq!(fnv1a(b"a"), 0xaf63dc4c8601ec8c);
        assert_eq!(fnv1a(b"foobar"), 0x85944171f73967e8);
    }

    #[test]
    fn word_hash_is_length_prefixed() {
        // "ab","c" and "a","bc" must not collide through plain concatenation.
        assert_ne!(hash_words(&["ab", "c"]), hash_words(&["a", "bc"]));
        let mut manual = Vec::new();
        manual.extend_from_slice(&2u32.to_le_bytes());
        manual.extend_from_slice(b"ab");
        manual.extend_from_slice(&1u32.to_le_bytes());
        manual.extend_from_slice(b"c");
        assert_eq!(hash_words(&["ab", "c"]), fnv1a(&manual));
    }

    #[test]
    fn id_hash_uses_little_endian() {
        let bytes = [1u8, 0, 0, 0, 0, 1, 0, 0];
        assert_eq!(hash_ids(&[1, 256]), fnv1a(&bytes));
    }
}
