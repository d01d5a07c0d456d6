//! Data-parallel dispatch with a sequential fallback.
//!
//! With the `parallel` feature (on by default) [`Exec::Parallel`] maps work
//! onto the rayon pool; without it every mode runs sequentially. Output order
//! always follows the input index, so results are identical in both modes.

#[cfg(feature = "parallel")]
use rayon::prelude::*;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Exec {
    Sequential,
    Parallel,
}

impl Default for Exec {
    fn default() -> Self {
        if cfg!(feature = "parallel") {
            Exec::Parallel
        } else {
            Exec::Sequential
        }
    }
}

impl Exec {
    /// Evaluate `f(0), …, f(count - 1)` and collect in index order.
    pub fn map_indexed<T, F>(self, count: usize, f: F) -> Vec<T>
    where
        T: Send,
        F: Fn(usize) -> T + Sync + Send,
    {
        match self {
            #[cfg(feature = "parallel")]
            Exec::Parallel => (0..count).into_par_iter().map(f).collect(),
            _ => (0..count).map(f).collect(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn both_modes_preserve_order() {
        let seq = Exec::Sequential.map_indexed(100, |i| i * i);
        let par = Exec::Parallel.map_indexed(100, |i| i * i);
        assert_eq!(seq, par);
        assert_eq!(seq[9], 81);
    }
}
