//! Data-parallel helpers. With the `parallel` feature (default) these fan
//! out over rayon's pool; without it they run sequentially, so the crate
//! builds without a rayon dependency.

#[cfg(feature = "parallel")]
use rayon::prelude::*;

/// Order-preserving map over an index range.
#[cfg(feature = "parallel")]
pub fn map_range<T, F>(range: std::ops::RangeInclusive<usize>, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    range.into_par_iter().map(f).collect()
}

#[cfg(not(feature = "parallel"))]
pub fn map_range<T, F>(range: std::ops::RangeInclusive<usize>, f: F) -> Vec<T>
where
    F: Fn(usize) -> T,
{
    range.map(f).collect()
}

/// Order-preserving map over a slice.
#[cfg(feature = "parallel")]
pub fn map_slice<I, T, F>(items: &[I], f: F) -> Vec<T>
where
    I: Sync,
    T: Send,
    F: Fn(&I) -> T + Sync + Send,
{
    items.par_iter().map(f).collect()
}

#[cfg(not(feature = "parallel"))]
pub fn map_slice<I, T, F>(items: &[I], f: F) -> Vec<T>
where
    F: Fn(&I) -> T,
{
    items.iter().map(f).collect()
}

/// Order-preserving filter_map over a slice.
#[cfg(feature = "parallel")]
pub fn filter_map_slice<I, T, F>(items: &[I], f: F) -> Vec<T>
where
    I: Sync,
    T: Send,
    F: Fn(&I) -> Option<T> + Sync + Send,
{
    items.par_iter().filter_map(f).collect()
}

#[cfg(not(feature = "parallel"))]
pub fn filter_map_slice<I, T, F>(items: &[I], f: F) -> Vec<T>
where
    F: Fn(&I) -> Option<T>,
{
    items.iter().filter_map(f).collect()
}

/// First index in the range satisfying the predicate; the parallel version
/// still returns the earliest match.
#[cfg(feature = "parallel")]
pub fn find_first_in_range<F>(range: std::ops::Range<u64>, pred: F) -> Option<u64>
where
    F: Fn(u64) -> bool + Sync + Send,
{
    range.into_par_iter().find_first(|&x| pred(x))
}

#[cfg(not(feature = "parallel"))]
pub fn find_first_in_range<F>(range: std::ops::Range<u64>, pred: F) -> Option<u64>
where
    F: Fn(u64) -> bool,
{
    range.into_iter().find(|&x| pred(x))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn find_first_is_deterministic() {
        assert_eq!(find_first_in_range(0..1000, |x| x % 7 == 3), Some(3));
        assert_eq!(find_first_in_range(0..10, |x| x > 100), None);
    }

    #[test]
    fn helpers_preserve_order() {
        assert_eq!(map_range(0..=4, |i| i * i), vec![0, 1, 4, 9, 16]);
        let xs = [3, 1, 4, 1, 5];
        assert_eq!(map_slice(&xs, |&x| x + 1), vec![4, 2, 5, 2, 6]);
        assert_eq!(
            filter_map_slice(&xs, |&x| (x > 2).then_some(x)),
            vec![3, 4, 5]
        );
    }
}
