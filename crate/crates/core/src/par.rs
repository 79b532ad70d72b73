//! Data-parallel map used by the scans. With the default `parallel` feature
//! the work is spread over rayon; without it the same call sites run
//! sequentially, which keeps scan output order-identical in both builds.

#[cfg(feature = "parallel")]
pub(crate) fn par_map<T, U, F>(items: Vec<T>, f: F) -> Vec<U>
where
    T: Send,
    U: Send,
    F: Fn(T) -> U + Send + Sync,
{
    use rayon::prelude::*;
    items.into_par_iter().map(f).collect()
}

#[cfg(not(feature = "parallel"))]
pub(crate) fn par_map<T, U, F>(items: Vec<T>, f: F) -> Vec<U>
where
    T: Send,
    U: Send,
    F: Fn(T) -> U + Send + Sync,
{
    items.into_iter().map(f).collect()
}
