//! Order-preserving data parallelism that degrades to sequential code when
//! the `parallel` feature is off (e.g. on wasm).

#[cfg(feature = "parallel")]
use rayon::prelude::*;

#[cfg(feature = "parallel")]
pub fn filter_map<T: Sync, U: Send>(items: &[T], f: impl Fn(&T) -> Option<U> + Sync + Send) -> Vec<U> {
    items.par_iter().filter_map(f).collect()
}

#[cfg(not(feature = "parallel"))]
pub fn filter_map<T, U>(items: &[T], f: impl Fn(&T) -> Option<U>) -> Vec<U> {
    items.iter().filter_map(f).collect()
}

#[cfg(feature = "parallel")]
pub fn map<T: Sync, U: Send>(items: &[T], f: impl Fn(&T) -> U + Sync + Send) -> Vec<U> {
    items.par_iter().map(f).collect()
}

#[cfg(not(feature = "parallel"))]
pub fn map<T, U>(items: &[T], f: impl Fn(&T) -> U) -> Vec<U> {
    items.iter().map(f).collect()
}
