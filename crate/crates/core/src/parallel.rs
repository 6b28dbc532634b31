//! Ordered data-parallel map used by the clip and frame-pair loops.
//!
//! With the `parallel` feature enabled, work is spread over a rayon pool; without it
//! every call runs serially. Output order always follows input order.

/// How many workers a batch may use.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Workers {
    /// Run on the calling thread.
    Serial,
    /// Use the global rayon pool (serial when the `parallel` feature is off).
    #[default]
    Auto,
    /// Use a dedicated pool with this many threads.
    Fixed(usize),
}

impl Workers {
    /// Maps a `--workers K` style count: 0 means auto, 1 means serial.
    pub fn from_count(k: usize) -> Self {
        match k {
            0 => Workers::Auto,
            1 => Workers::Serial,
            n => Workers::Fixed(n),
        }
    }
}

/// Applies `f` to every item, returning results in input order.
pub fn ordered_map<T, R, F>(items: &[T], workers: Workers, f: F) -> Vec<R>
where
    T: Sync,
    R: Send,
    F: Fn(usize, &T) -> R + Sync + Send,
{
    #[cfg(feature = "parallel")]
    {
        use rayon::prelude::*;
        let run = || {
            items
                .par_iter()
                .enumerate()
                .map(|(i, item)| f(i, item))
                .collect::<Vec<_>>()
        };
        match workers {
            Workers::Serial => {}
            Workers::Auto => return run(),
            Workers::Fixed(n) => {
                if let Ok(pool) = rayon::ThreadPoolBuilder::new().num_threads(n).build() {
                    return pool.install(run);
                }
            }
        }
    }
    #[cfg(not(feature = "parallel"))]
    let _ = workers;

    items
        .iter()
        .enumerate()
        .map(|(i, item)| f(i, item))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn order_is_preserved_for_every_worker_setting() {
        let items: Vec<u64> = (0..257).collect();
        let expected: Vec<u64> = items.iter().map(|x| x * x + 1).collect();
        for w in [Workers::Serial, Workers::Auto, Workers::Fixed(3)] {
            assert_eq!(ordered_map(&items, w, |_, x| x * x + 1), expected);
        }
    }

    #[test]
    fn worker_counts() {
        assert_eq!(Workers::from_count(0), Workers::Auto);
        assert_eq!(Workers::from_count(1), Workers::Serial);
        assert_eq!(Workers::from_count(4), Workers::Fixed(4));
    }
}
