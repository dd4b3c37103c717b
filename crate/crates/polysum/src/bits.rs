//! Dense bit tables over `[0, bound]` used by the representation sieves.
//!
//! The sieve step is "shift the whole table by a value and OR it in", so the
//! table is stored as `u64` words and shifted at word granularity. The
//! chunked variant writes disjoint word ranges of the output from a shared
//! read-only source, which keeps parallel runs bit-identical to sequential
//! ones.

use rayon::prelude::*;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BitTable {
    len: usize,
    words: Vec<u64>,
}

impl BitTable {
    pub fn new(len: usize) -> Self {
        BitTable {
            len,
            words: vec![0; len.div_ceil(64)],
        }
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    #[inline]
    pub fn get(&self, i: usize) -> bool {
        debug_assert!(i < self.len);
        self.words[i / 64] >> (i % 64) & 1 == 1
    }

    #[inline]
    pub fn set(&mut self, i: usize) {
        debug_assert!(i < self.len);
        self.words[i / 64] |= 1 << (i % 64);
    }

    /// Reads bit `i - shift` of `words`, or false when out of range.
    #[inline]
    fn shifted_bit_word(words: &[u64], word_index: usize, shift: usize) -> u64 {
        let wq = shift / 64;
        let wr = shift % 64;
        if word_index < wq {
            return 0;
        }
        let lo = words.get(word_index - wq).copied().unwrap_or(0);
        if wr == 0 {
            lo
        } else {
            let hi = if word_index > wq {
                words.get(word_index - wq - 1).copied().unwrap_or(0)
            } else {
                0
            };
            lo << wr | hi >> (64 - wr)
        }
    }

    /// `self |= src << shift` for every shift in `shifts`, restricted to the
    /// word range `[word_lo, word_hi)` of the output.
    fn or_shifts_range(&mut self, src: &BitTable, shifts: &[usize], word_lo: usize, word_hi: usize) {
        for w in word_lo..word_hi {
            let mut acc = self.words[w];
            for &s in shifts {
                acc |= Self::shifted_bit_word(&src.words, w, s);
            }
            self.words[w] = acc;
        }
    }

    /// Returns the OR of `src << shift` over all shifts, on the full range.
    pub fn or_shifts(src: &BitTable, shifts: &[usize]) -> BitTable {
        let mut out = src.clone();
        let n = out.words.len();
        out.or_shifts_range(src, shifts, 0, n);
        out.mask_tail();
        out
    }

    /// Same result as [`BitTable::or_shifts`], computed over disjoint word
    /// chunks in parallel. Output is bit-identical to the sequential path.
    pub fn or_shifts_parallel(src: &BitTable, shifts: &[usize], chunk_words: usize) -> BitTable {
        let chunk_words = chunk_words.max(1);
        let mut out = src.clone();
        out.words
            .par_chunks_mut(chunk_words)
            .enumerate()
            .for_each(|(ci, chunk)| {
                let base = ci * chunk_words;
                for (j, word) in chunk.iter_mut().enumerate() {
                    let mut acc = *word;
                    for &s in shifts {
                        acc |= Self::shifted_bit_word(&src.words, base + j, s);
                    }
                    *word = acc;
                }
            });
        out.mask_tail();
        out
    }

    fn mask_tail(&mut self) {
        let r = self.len % 64;
        if r != 0 {
            if let Some(last) = self.words.last_mut() {
                *last &= (1u64 << r) - 1;
            }
        }
    }

    /// Indices in `[lo, len)` whose bit is clear.
    pub fn missing_from(&self, lo: usize) -> impl Iterator<Item = usize> + '_ {
        (lo..self.len).filter(move |&i| !self.get(i))
    }

    pub fn count_ones(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn naive_or_shifts(src: &BitTable, shifts: &[usize]) -> BitTable {
        let mut out = src.clone();
        for &s in shifts {
            for i in 0..src.len() {
                if src.get(i) && i + s < src.len() {
                    out.set(i + s);
                }
            }
        }
        out
    }

    #[test]
    fn shift_or_matches_naive() {
        let mut t = BitTable::new(300);
        for i in [0usize, 1, 5, 63, 64, 65, 130, 299] {
            t.set(i);
        }
        for shifts in [vec![0], vec![1], vec![63, 64, 65], vec![7, 200, 299]] {
            assert_eq!(BitTable::or_shifts(&t, &shifts), naive_or_shifts(&t, &shifts));
        }
    }

    #[test]
    fn parallel_is_bit_identical() {
        let mut t = BitTable::new(10_000);
        let mut x: u64 = 0x9e3779b97f4a7c15;
        for _ in 0..500 {
            x = x.wrapping_mul(6364136223846793005).wrapping_add(1);
            t.set((x % 10_000) as usize);
        }
        let shifts: Vec<usize> = (0..40).map(|k| k * k * 3 + 1).collect();
        let seq = BitTable::or_shifts(&t, &shifts);
        for chunk in [1, 7, 64, 1000] {
            assert_eq!(seq, BitTable::or_shifts_parallel(&t, &shifts, chunk));
        }
    }
}
