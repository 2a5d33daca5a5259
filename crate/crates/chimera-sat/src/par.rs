//! Execution helpers that run on rayon when the `parallel` feature is
//! enabled and fall back to plain iterators otherwise.
//!
//! Every helper merges results in a fixed order, so outputs are identical
//! with and without the feature (and for any worker count).

#[cfg(feature = "parallel")]
use rayon::prelude::*;

/// Caps the global worker pool from `CHIMERA_SAT_THREADS` when set.
///
/// Must run before any parallel work; later calls are ignored by rayon.
pub fn configure_threads_from_env() {
    #[cfg(feature = "parallel")]
    {
        if let Ok(raw) = std::env::var("CHIMERA_SAT_THREADS") {
            if let Ok(n) = raw.trim().parse::<usize>() {
                if n > 0 {
                    let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
                }
            }
        }
    }
}

/// Maps `f` over `0..total` and collects in index order.
pub(crate) fn map_masks<T: Send>(total: u64, parallel: bool, f: impl Fn(u64) -> T + Sync + Send) -> Vec<T> {
    #[cfg(feature = "parallel")]
    if parallel {
        return (0..total).into_par_iter().map(f).collect();
    }
    let _ = parallel;
    (0..total).map(f).collect()
}

/// Maps `f` over `0..n` (index domain) and collects in index order.
pub(crate) fn map_indices<T: Send>(n: usize, parallel: bool, f: impl Fn(usize) -> T + Sync + Send) -> Vec<T> {
    #[cfg(feature = "parallel")]
    if parallel {
        return (0..n).into_par_iter().map(f).collect();
    }
    let _ = parallel;
    (0..n).map(f).collect()
}

/// Minimum of `f` over `0..total`. `total` must be nonzero.
pub(crate) fn min_energy_over_masks(total: u64, f: impl Fn(u64) -> f64 + Sync + Send) -> f64 {
    #[cfg(feature = "parallel")]
    {
        return (0..total)
            .into_par_iter()
            .map(f)
            .reduce(|| f64::INFINITY, f64::min);
    }
    #[allow(unreachable_code)]
    (0..total).map(f).fold(f64::INFINITY, f64::min)
}

/// All masks in `0..total` satisfying `pred`, ascending.
pub(crate) fn collect_masks(total: u64, pred: impl Fn(u64) -> bool + Sync + Send) -> Vec<u64> {
    #[cfg(feature = "parallel")]
    {
        return (0..total).into_par_iter().filter(|&m| pred(m)).collect();
    }
    #[allow(unreachable_code)]
    (0..total).filter(|&m| pred(m)).collect()
}
