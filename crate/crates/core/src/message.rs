//! Words and messages. All traffic and space is counted in words.

use serde::{Deserialize, Serialize};

/// One accounting unit. Its logical width is `ModelParams::word_bits`; the
/// engines reject payload values that do not fit.
pub type Word = u64;

/// Default word width: `ceil(log2 n) + 2` bits, enough for a vertex id or the
/// value `n` plus a small tag.
pub fn default_word_bits(n: usize) -> u32 {
    ceil_log2(n) + 2
}

pub fn ceil_log2(n: usize) -> u32 {
    if n <= 1 {
        0
    } else {
        usize::BITS - (n - 1).leading_zeros()
    }
}

pub fn fits_width(word: Word, bits: u32) -> bool {
    bits >= 64 || word >> bits == 0
}

/// An outgoing message as emitted by a program.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Envelope {
    pub dst: usize,
    pub payload: Vec<Word>,
}

impl Envelope {
    pub fn new(dst: usize, payload: Vec<Word>) -> Self {
        Envelope { dst, payload }
    }

    pub fn single(dst: usize, word: Word) -> Self {
        Envelope {
            dst,
            payload: vec![word],
        }
    }
}

/// A delivered message. `round` is the round in which it was sent.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Message {
    pub src: usize,
    pub dst: usize,
    pub payload: Vec<Word>,
    pub round: usize,
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn log2_and_width() {
        assert_eq!(ceil_log2(1), 0);
        assert_eq!(ceil_log2(2), 1);
        assert_eq!(ceil_log2(3), 2);
        assert_eq!(ceil_log2(64), 6);
        assert_eq!(ceil_log2(65), 7);
        assert_eq!(default_word_bits(64), 8);
        assert!(fits_width(255, 8));
        assert!(!fits_width(256, 8));
        assert!(fits_width(u64::MAX, 64));
    }
}
