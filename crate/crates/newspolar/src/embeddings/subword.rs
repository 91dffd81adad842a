//! Character n-gram extraction and bucket hashing.
//!
//! Words are bracketed as `<word>` before n-gram extraction so prefixes
//! and suffixes hash differently from word-internal substrings. Buckets
//! come from the 64-bit FNV-1a hash of the n-gram's UTF-8 bytes reduced
//! modulo the bucket count; the hash is pinned here so an independent
//! implementation can reproduce the same bucket ids.

const FNV_OFFSET: u64 = 0xcbf2_9ce4_8422_2325;
const FNV_PRIME: u64 = 0x0000_0100_0000_01b3;

pub fn fnv1a64(bytes: &[u8]) -> u64 {
    let mut hash = FNV_OFFSET;
    for b in bytes {
        hash ^= *b as u64;
        hash = hash.wrapping_mul(FNV_PRIME);
    }
    hash
}

/// Bucket ids of all character n-grams of the bracketed word with length
/// in `[n_min, n_max]`. N-grams are counted with multiplicity; any
/// non-empty word yields at least one n-gram when `n_min <= 3`.
pub fn ngram_buckets(word: &str, n_min: usize, n_max: usize, buckets: usize) -> Vec<u32> {
    let bracketed: Vec<char> = std::iter::once('<')
        .chain(word.chars())
        .chain(std::iter::once('>'))
        .collect();
    let mut ids = Vec::new();
    let mut ngram = String::new();
    for n in n_min..=n_max.min(bracketed.len()) {
        for start in 0..=bracketed.len() - n {
            ngram.clear();
            ngram.extend(&bracketed[start..start + n]);
            ids.push((fnv1a64(ngram.as_bytes()) % buckets as u64) as u32);
        }
    }
    ids
}
