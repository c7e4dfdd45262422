//! Data-parallel helpers with a sequential fallback.
//!
//! Every helper maps an index range (or a slice) to a `Vec` in input order, so
//! the parallel and sequential builds produce identical output as long as each
//! element is computed independently. Reductions are always performed by the
//! caller over the ordered result.

/// Below this many items the helpers stay on the calling thread.
pub const MIN_PARALLEL_LEN: usize = 64;

/// True when the crate was built with the `parallel` feature.
pub const fn is_parallel() -> bool {
    cfg!(feature = "parallel")
}

#[cfg(feature = "parallel")]
pub fn map_range<T, F>(len: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Send + Sync,
{
    use rayon::prelude::*;
    if len < MIN_PARALLEL_LEN {
        (0..len).map(f).collect()
    } else {
        (0..len).into_par_iter().map(f).collect()
    }
}

#[cfg(not(feature = "parallel"))]
pub fn map_range<T, F>(len: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Send + Sync,
{
    (0..len).map(f).collect()
}

/// Like [`map_range`] but always fans out, regardless of length. Used for
/// small batches of expensive items (time points, frontier states).
#[cfg(feature = "parallel")]
pub fn map_slice<S, T, F>(items: &[S], f: F) -> Vec<T>
where
    S: Sync,
    T: Send,
    F: Fn(&S) -> T + Send + Sync,
{
    use rayon::prelude::*;
    if items.len() < 2 {
        items.iter().map(f).collect()
    } else {
        items.par_iter().map(f).collect()
    }
}

#[cfg(not(feature = "parallel"))]
pub fn map_slice<S, T, F>(items: &[S], f: F) -> Vec<T>
where
    S: Sync,
    T: Send,
    F: Fn(&S) -> T + Send + Sync,
{
    items.iter().map(f).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn map_range_preserves_order() {
        let out = map_range(1000, |i| i * 2);
        assert_eq!(out.len(), 1000);
        assert!(out.iter().enumerate().all(|(i, &v)| v == 2 * i));
    }

    #[test]
    fn map_slice_preserves_order() {
        let items: Vec<u32> = (0..17).collect();
        assert_eq!(map_slice(&items, |x| x + 1), (1..18).collect::<Vec<_>>());
    }
}
