/// Execution strategy for the data-parallel loops.
///
/// Results are always collected in index order, so both strategies return
/// identical output. Without the `parallel` feature, `Parallel` runs
/// sequentially.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Exec {
    Parallel,
    Sequential,
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
    /// Evaluate `f(0..len)` and collect in index order.
    pub fn map_range<T, F>(self, len: usize, f: F) -> Vec<T>
    where
        T: Send,
        F: Fn(usize) -> T + Sync + Send,
    {
        match self {
            #[cfg(feature = "parallel")]
            Exec::Parallel => {
                use rayon::prelude::*;
                (0..len).into_par_iter().map(f).collect()
            }
            _ => (0..len).map(f).collect(),
        }
    }

    /// Fill `out[i] = f(i)` in chunks.
    pub(crate) fn fill<T, F>(self, out: &mut [T], f: F)
    where
        T: Send,
        F: Fn(usize) -> T + Sync + Send,
    {
        match self {
            #[cfg(feature = "parallel")]
            Exec::Parallel => {
                use rayon::prelude::*;
                const CHUNK: usize = 1 << 12;
                out.par_chunks_mut(CHUNK).enumerate().for_each(|(c, chunk)| {
                    let base = c * CHUNK;
                    for (k, slot) in chunk.iter_mut().enumerate() {
                        *slot = f(base + k);
                    }
                });
            }
            _ => {
                for (i, slot) in out.iter_mut().enumerate() {
                    *slot = f(i);
                }
            }
        }
    }
}
