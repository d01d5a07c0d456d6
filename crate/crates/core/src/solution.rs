use std::fmt;

use serde::{Deserialize, Serialize};

/// A subset of nodes, one flag per node.
#[derive(Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Solution {
    bits: Vec<bool>,
}

impl Solution {
    pub fn empty(n: usize) -> Self {
        Solution { bits: vec![false; n] }
    }

    pub fn full(n: usize) -> Self {
        Solution { bits: vec![true; n] }
    }

    pub fn from_bits(bits: Vec<bool>) -> Self {
        Solution { bits }
    }

    /// Solution containing exactly the given node indices.
    pub fn from_nodes(n: usize, nodes: &[usize]) -> Self {
        let mut s = Solution::empty(n);
        for &v in nodes {
            s.bits[v] = true;
        }
        s
    }

    /// Decode the low `n` bits of `mask` (bit `i` selects node `i`).
    pub fn from_mask(n: usize, mask: u64) -> Self {
        Solution {
            bits: (0..n).map(|i| mask >> i & 1 == 1).collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.bits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bits.is_empty()
    }

    pub fn get(&self, i: usize) -> bool {
        self.bits[i]
    }

    pub fn set(&mut self, i: usize, value: bool) {
        self.bits[i] = value;
    }

    pub fn flip(&mut self, i: usize) {
        self.bits[i] = !self.bits[i];
    }

    pub fn bits(&self) -> &[bool] {
        &self.bits
    }

    pub fn count_selected(&self) -> usize {
        self.bits.iter().filter(|&&b| b).count()
    }

    pub fn selected(&self) -> impl Iterator<Item = usize> + '_ {
        self.bits
            .iter()
            .enumerate()
            .filter_map(|(i, &b)| b.then_some(i))
    }
}

impl fmt::Debug for Solution {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s: String = self.bits.iter().map(|&b| if b { '1' } else { '0' }).collect();
        write!(f, "Solution({s})")
    }
}
