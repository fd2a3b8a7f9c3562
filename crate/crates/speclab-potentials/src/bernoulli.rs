//! The deterministic 0/1 sequence built by concatenating every binary word
//! in well-order: the two words of length 1 in ascending order, then the four
//! of length 2, then the eight of length 3, and so on. Every finite 0/1 word
//! therefore occurs somewhere in the sequence, which is what makes the
//! corresponding potential's set of right limits the full Bernoulli shift.

/// Total number of letters contributed by all words of length `<= len`.
///
/// Words of length `l` contribute `l * 2^l` letters; the closed form of the
/// partial sum is `(len - 1) * 2^(len+1) + 2` (and 0 at `len = 0`).
fn letters_through(len: u32) -> u128 {
    if len == 0 {
        return 0;
    }
    (u128::from(len) - 1) * (1u128 << (len + 1)) + 2
}

/// The `n`-th letter of the sequence, 1-indexed.
pub fn bit_at(n: u64) -> u8 {
    assert!(n >= 1, "sequence is 1-indexed");
    let n = u128::from(n);
    let mut len = 1u32;
    while letters_through(len) < n {
        len += 1;
    }
    let rank = n - letters_through(len - 1) - 1; // 0-based within the length-`len` run
    let word = rank / u128::from(len);
    let pos = (rank % u128::from(len)) as u32;
    ((word >> (len - 1 - pos)) & 1) as u8
}

/// First `k` letters of the sequence.
pub fn sequence(k: u64) -> Vec<u8> {
    (1..=k).map(bit_at).collect()
}
