//! List-format sparse vectors and the bitvector variant.

use crate::error::{Error, Result};
use std::collections::HashSet;

/// Whether a list-format vector keeps its indices strictly increasing.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    Sorted,
    Unsorted,
}

/// Sparse vector stored compactly as (index, value) pairs.
///
/// Indices are unique in both modes; `Sorted` additionally means strictly
/// increasing. Duplicate indices are rejected at construction because no
/// combining rule is defined for the list format.
#[derive(Debug, Clone, PartialEq)]
pub struct SparseVec<T> {
    len: usize,
    entries: Vec<(usize, T)>,
    mode: Mode,
}

impl<T: Copy> SparseVec<T> {
    /// Validating constructor.
    pub fn new(len: usize, entries: Vec<(usize, T)>, mode: Mode) -> Result<Self> {
        match mode {
            Mode::Sorted => {
                for w in entries.windows(2) {
                    if w[1].0 <= w[0].0 {
                        return Err(Error::DuplicateEntry { row: w[1].0, col: 0 });
                    }
                }
            }
            Mode::Unsorted => {
                let mut seen = HashSet::with_capacity(entries.len());
                for &(i, _) in &entries {
                    if !seen.insert(i) {
                        return Err(Error::DuplicateEntry { row: i, col: 0 });
                    }
                }
            }
        }
        for &(i, _) in &entries {
            if i >= len {
                return Err(Error::IndexOutOfBounds {
                    index: (i, 0),
                    bounds: (len, 1),
                });
            }
        }
        Ok(SparseVec { len, entries, mode })
    }

    pub fn empty(len: usize, mode: Mode) -> Self {
        SparseVec {
            len,
            entries: Vec::new(),
            mode,
        }
    }

    /// Constructor for kernel outputs whose invariants hold by construction;
    /// checked only under debug assertions.
    pub(crate) fn from_parts(len: usize, entries: Vec<(usize, T)>, mode: Mode) -> Self {
        debug_assert!(SparseVec::new(len, entries.clone(), mode).is_ok());
        SparseVec { len, entries, mode }
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn nnz(&self) -> usize {
        self.entries.len()
    }

    pub fn mode(&self) -> Mode {
        self.mode
    }

    pub fn entries(&self) -> &[(usize, T)] {
        &self.entries
    }

    pub fn iter(&self) -> impl Iterator<Item = (usize, T)> + '_ {
        self.entries.iter().copied()
    }

    /// Convert between modes without changing logical content. Converting to
    /// `Sorted` sorts the pair list; converting to `Unsorted` only retags.
    pub fn convert(mut self, target: Mode) -> Self {
        if target == Mode::Sorted && self.mode == Mode::Unsorted {
            self.entries.sort_unstable_by_key(|&(i, _)| i);
        }
        self.mode = target;
        self
    }

    /// The (index -> value) map this vector represents.
    pub fn to_map(&self) -> std::collections::HashMap<usize, T> {
        self.entries.iter().copied().collect()
    }

    /// Convert to bitvector format. Values are stored in ascending index
    /// order regardless of the list order.
    pub fn to_bitvec(&self) -> BitVec<T> {
        let mut sorted: Vec<(usize, T)> = self.entries.clone();
        sorted.sort_unstable_by_key(|&(i, _)| i);
        let nwords = self.len.div_ceil(64);
        let mut words = vec![0u64; nwords];
        let mut values = Vec::with_capacity(sorted.len());
        for &(i, v) in &sorted {
            words[i / 64] |= 1 << (i % 64);
            values.push(v);
        }
        BitVec::from_parts(self.len, words, values)
    }

    pub(crate) fn take_entries(&mut self) -> Vec<(usize, T)> {
        std::mem::take(&mut self.entries)
    }

    pub(crate) fn set_from(&mut self, len: usize, entries: Vec<(usize, T)>, mode: Mode) {
        self.len = len;
        self.entries = entries;
        self.mode = mode;
    }
}

/// Bitvector-format sparse vector: a dense bitmap plus a value list aligned
/// to the set bits in ascending index order. Supports O(1) membership and
/// value lookup via per-word rank counts.
#[derive(Debug, Clone, PartialEq)]
pub struct BitVec<T> {
    len: usize,
    words: Vec<u64>,
    word_rank: Vec<u32>,
    values: Vec<T>,
}

impl<T: Copy> BitVec<T> {
    fn from_parts(len: usize, words: Vec<u64>, values: Vec<T>) -> Self {
        let mut word_rank = Vec::with_capacity(words.len());
        let mut acc = 0u32;
        for &w in &words {
            word_rank.push(acc);
            acc += w.count_ones();
        }
        debug_assert_eq!(acc as usize, values.len());
        BitVec {
            len,
            words,
            word_rank,
            values,
        }
    }

    pub fn empty(len: usize) -> Self {
        BitVec::from_parts(len, vec![0u64; len.div_ceil(64)], Vec::new())
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    pub fn words(&self) -> &[u64] {
        &self.words
    }

    /// Value stored at `i`, if the bit is set.
    pub fn get(&self, i: usize) -> Option<T> {
        debug_assert!(i < self.len);
        let (w, b) = (i / 64, i % 64);
        if self.words[w] & (1 << b) == 0 {
            return None;
        }
        let below = (self.words[w] & ((1u64 << b) - 1)).count_ones();
        Some(self.values[self.word_rank[w] as usize + below as usize])
    }

    pub fn contains(&self, i: usize) -> bool {
        self.words[i / 64] & (1 << (i % 64)) != 0
    }

    /// Convert back to list format; indices come out ascending, so the
    /// content satisfies either mode tag.
    pub fn to_sparse(&self, mode: Mode) -> SparseVec<T> {
        let mut entries = Vec::with_capacity(self.values.len());
        let mut k = 0;
        for (w, &word) in self.words.iter().enumerate() {
            let mut bits = word;
            while bits != 0 {
                let b = bits.trailing_zeros() as usize;
                entries.push((w * 64 + b, self.values[k]));
                k += 1;
                bits &= bits - 1;
            }
        }
        SparseVec::from_parts(self.len, entries, mode)
    }
}
