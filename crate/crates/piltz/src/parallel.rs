//! Thread-scoped versions of the embarrassingly parallel loops.
//!
//! Work is cut into contiguous chunks and the partial results are merged in
//! chunk order, so the output does not depend on the thread count.

use std::num::NonZeroUsize;
use std::ops::Range;

use piltz_core::divisor::DivisorTable;
use piltz_core::numberfield::{count_splitting, DensityVector, NumberFieldSpec, SplittingCounts};
use piltz_core::primes::primes_up_to;
use piltz_core::resonance::{merge_candidates, ResonanceSum, ResonatorConfig, ResonatorSet, SearchOutcome};
use piltz_core::Error;

pub fn default_threads() -> usize {
    std::thread::available_parallelism().map(NonZeroUsize::get).unwrap_or(1)
}

fn chunks(len: u64, parts: usize) -> Vec<Range<u64>> {
    let parts = (parts.max(1) as u64).min(len.max(1));
    (0..parts).map(|i| len * i / parts..len * (i + 1) / parts).collect()
}

fn map_chunks<T: Send>(len: u64, threads: usize, f: impl Fn(Range<u64>) -> T + Sync) -> Vec<T> {
    let ranges = chunks(len, threads);
    if ranges.len() == 1 {
        return vec![f(ranges[0].clone())];
    }
    std::thread::scope(|s| {
        let handles: Vec<_> = ranges.into_iter().map(|r| s.spawn(|| f(r))).collect();
        handles.into_iter().map(|h| h.join().expect("worker panicked")).collect()
    })
}

pub fn count_splitting_parallel(spec: &NumberFieldSpec, primes: &[u64], threads: usize) -> SplittingCounts {
    let parts = map_chunks(primes.len() as u64, threads, |r| {
        count_splitting(spec, &primes[r.start as usize..r.end as usize])
    });
    let mut total = SplittingCounts::new(spec.degree());
    for p in &parts {
        total.merge(p);
    }
    total
}

pub fn estimate_densities_parallel(spec: &NumberFieldSpec, bound: u64, threads: usize) -> Result<DensityVector, Error> {
    if bound < 100 {
        return Err(Error::InvalidParameter("prime bound must be at least 100".into()));
    }
    Ok(count_splitting_parallel(spec, &primes_up_to(bound), threads).into_densities())
}

/// Same result as `resonance_search`, with the grid scan split across threads.
pub fn resonance_search_parallel(
    spec: &NumberFieldSpec,
    table: &DivisorTable,
    cfg: &ResonatorConfig,
    resonator: &ResonatorSet,
    grid_points: u64,
    threads: usize,
) -> Result<SearchOutcome, Error> {
    if resonator.is_empty() {
        return Err(Error::EmptyResonator);
    }
    let sum = ResonanceSum::new(spec, table, cfg)?;
    let plan = sum.plan(grid_points)?;
    let lists = map_chunks(plan.points, threads, |r| sum.scan(&plan, r));
    let best = sum.polish(&plan, &merge_candidates(&lists));
    sum.outcome(resonator, &plan, best)
}

#[cfg(test)]
mod tests {
    use super::*;
    use piltz_core::divisor::sieve_divisors;
    use piltz_core::resonance::{build_resonator, resonance_search, PrimePools};

    #[test]
    fn chunks_cover_range() {
        assert_eq!(chunks(10, 3), vec![0..3, 3..6, 6..10]);
        assert_eq!(chunks(2, 8), vec![0..1, 1..2]);
        assert_eq!(chunks(0, 4), vec![0..0]);
    }

    #[test]
    fn thread_count_does_not_change_results() {
        let q = NumberFieldSpec::rationals();
        let d = DensityVector::normal_extension(1);
        let t = sieve_divisors(&q, 2, 70_000).unwrap();
        let cfg = ResonatorConfig::new(&q, &d, 2, 1e3, 20.0).unwrap();
        let set = build_resonator(&q, &d, &cfg, &PrimePools::new(&q, 1000)).unwrap();
        let serial = resonance_search(&q, &t, &cfg, &set, 50_000).unwrap();
        for threads in [1, 3, 7] {
            assert_eq!(resonance_search_parallel(&q, &t, &cfg, &set, 50_000, threads).unwrap(), serial);
        }
        let primes = primes_up_to(20_000);
        let one = count_splitting_parallel(&q, &primes, 1);
        assert_eq!(count_splitting_parallel(&q, &primes, 5), one);
    }
}
