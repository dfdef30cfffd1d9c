//! Close-by-One concept counting and enumeration.
//!
//! Counting never stores concepts: the recursion keeps one preallocated
//! extent/intent frame per depth and a 64-bit checked counter. Parallelism
//! expands the search tree breadth-first to a chosen depth and hands the
//! frontier subtrees to a fixed worker pool; the count is independent of the
//! worker count and the split depth.
//!
//! Intent closures are computed column-wise: attribute `y` belongs to the
//! closure of extent `C` iff `C ⊆ col(y)`, a word-level containment test.
//! The canonicity test scans only the attributes below the branch attribute
//! that are missing from the parent intent, which is cheap on the dense
//! contexts this crate produces.

use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use crate::bitset::BitSet;
use crate::context::FormalContext;

/// Concept counts are exact unsigned 64-bit values; overflow is an error,
/// never a wrap.
pub type ConceptCount = u64;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CountError {
    EmptyContext,
    /// More than 2^64 - 1 concepts.
    Overflow,
}

impl fmt::Display for CountError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CountError::EmptyContext => write!(f, "context has no objects or no attributes"),
            CountError::Overflow => write!(f, "concept count exceeds 64 bits"),
        }
    }
}

#[cfg(feature = "std")]
impl std::error::Error for CountError {}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum EnumerateError {
    EmptyContext,
    LimitExceeded { limit: usize },
}

impl fmt::Display for EnumerateError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            EnumerateError::EmptyContext => write!(f, "context has no objects or no attributes"),
            EnumerateError::LimitExceeded { limit } => {
                write!(f, "concept count exceeds limit {limit}")
            }
        }
    }
}

#[cfg(feature = "std")]
impl std::error::Error for EnumerateError {}

/// A formal concept: a closed extent/intent pair.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Debug)]
pub struct Concept {
    pub extent: BitSet,
    pub intent: BitSet,
}

/// `A↑`: the attributes shared by every object of `A` (all attributes when
/// `A` is empty).
pub fn derive_up(ctx: &FormalContext, objects: &BitSet) -> BitSet {
    let mut out = BitSet::full(ctx.n_attributes());
    for i in objects.ones() {
        out.and_assign(ctx.row(i));
    }
    out
}

/// `B↓`: the objects having every attribute of `B` (all objects when `B` is
/// empty).
pub fn derive_down(ctx: &FormalContext, attributes: &BitSet) -> BitSet {
    let mut out = BitSet::full(ctx.n_objects());
    for j in attributes.ones() {
        out.and_assign(ctx.col(j));
    }
    out
}

struct Frame {
    extent: BitSet,
    intent: BitSet,
}

struct Cbo<'a> {
    ctx: &'a FormalContext,
    n_attrs: usize,
}

impl<'a> Cbo<'a> {
    fn new(ctx: &'a FormalContext) -> Result<Self, CountError> {
        if ctx.n_objects() == 0 || ctx.n_attributes() == 0 {
            return Err(CountError::EmptyContext);
        }
        Ok(Cbo {
            ctx,
            n_attrs: ctx.n_attributes(),
        })
    }

    fn frames(&self) -> Vec<Frame> {
        (0..self.n_attrs + 2)
            .map(|_| Frame {
                extent: BitSet::new(self.ctx.n_objects()),
                intent: BitSet::new(self.n_attrs),
            })
            .collect()
    }

    fn root(&self) -> (BitSet, BitSet) {
        let extent = BitSet::full(self.ctx.n_objects());
        let intent = derive_up(self.ctx, &extent);
        (extent, intent)
    }

    /// Canonicity: reject if some attribute below `j` outside the parent
    /// intent also contains the child extent. Scans the complement of the
    /// intent word-wise; dense intents deep in the tree make this cheap.
    #[inline]
    fn canonical(&self, child_extent: &BitSet, parent_intent: &BitSet, j: usize) -> bool {
        let words = parent_intent.words();
        let full = j / 64;
        for (w, &word) in words.iter().enumerate().take(full) {
            let mut miss = !word;
            while miss != 0 {
                let y = w * 64 + miss.trailing_zeros() as usize;
                miss &= miss - 1;
                if child_extent.is_subset(self.ctx.col(y)) {
                    return false;
                }
            }
        }
        let rem = j % 64;
        if rem != 0 {
            let mut miss = !words[full] & ((1u64 << rem) - 1);
            while miss != 0 {
                let y = full * 64 + miss.trailing_zeros() as usize;
                miss &= miss - 1;
                if child_extent.is_subset(self.ctx.col(y)) {
                    return false;
                }
            }
        }
        true
    }

    /// Fill `frames[0]` with the child of (`extent`,`intent`) along attribute
    /// `j`, if canonical.
    #[inline]
    fn make_child(
        &self,
        extent: &BitSet,
        intent: &BitSet,
        j: usize,
        child: &mut Frame,
    ) -> bool {
        child.extent.copy_and(extent, self.ctx.col(j));
        if !self.canonical(&child.extent, intent, j) {
            return false;
        }
        child.intent.copy_from(intent);
        child.intent.set(j);
        // closure above j, scanning the complement of the intent word-wise
        let nw = child.intent.words().len();
        for w in (j + 1) / 64..nw {
            let lo = w * 64;
            let mut miss = !child.intent.words()[w];
            if lo < j + 1 {
                miss &= !((1u64 << ((j + 1) - lo)) - 1);
            }
            while miss != 0 {
                let y = lo + miss.trailing_zeros() as usize;
                miss &= miss - 1;
                if y >= self.n_attrs {
                    break;
                }
                if child.extent.is_subset(self.ctx.col(y)) {
                    child.intent.set(y);
                }
            }
        }
        true
    }

    /// Count the subtree rooted at `frames[0]`, whose branch attribute is
    /// `start`.
    fn count_subtree(
        &self,
        frames: &mut [Frame],
        start: usize,
        count: &mut u64,
    ) -> Result<(), CountError> {
        *count = count.checked_add(1).ok_or(CountError::Overflow)?;
        let (cur, rest) = frames.split_first_mut().expect("frame arena exhausted");
        for j in start..self.n_attrs {
            if cur.intent.get(j) {
                continue;
            }
            if self.make_child(&cur.extent, &cur.intent, j, &mut rest[0]) {
                self.count_subtree(rest, j + 1, count)?;
            }
        }
        Ok(())
    }

    fn enumerate_subtree(
        &self,
        frames: &mut [Frame],
        start: usize,
        limit: usize,
        out: &mut Vec<Concept>,
    ) -> Result<(), EnumerateError> {
        if out.len() >= limit {
            return Err(EnumerateError::LimitExceeded { limit });
        }
        let (cur, rest) = frames.split_first_mut().expect("frame arena exhausted");
        out.push(Concept {
            extent: cur.extent.clone(),
            intent: cur.intent.clone(),
        });
        for j in start..self.n_attrs {
            if cur.intent.get(j) {
                continue;
            }
            if self.make_child(&cur.extent, &cur.intent, j, &mut rest[0]) {
                self.enumerate_subtree(rest, j + 1, limit, out)?;
            }
        }
        Ok(())
    }
}

/// A frontier node of the breadth-first expansion: a concept plus the
/// attribute its subtree continues from.
#[derive(Clone, Debug)]
pub struct Seed {
    extent: BitSet,
    intent: BitSet,
    start: usize,
}

/// Safety valve: stop expanding the frontier once it holds this many seeds.
const MAX_SEEDS: usize = 1 << 22;

/// Expand the search tree breadth-first to `depth` levels. Returns the number
/// of concepts counted on the expanded levels and the frontier seeds whose
/// subtrees remain.
pub fn split_seeds(
    ctx: &FormalContext,
    depth: usize,
) -> Result<(ConceptCount, Vec<Seed>), CountError> {
    let cbo = Cbo::new(ctx)?;
    let (extent, intent) = cbo.root();
    let mut level = vec![Seed {
        extent,
        intent,
        start: 0,
    }];
    let mut counted: u64 = 0;
    let mut child = Frame {
        extent: BitSet::new(ctx.n_objects()),
        intent: BitSet::new(ctx.n_attributes()),
    };
    for _ in 0..depth {
        if level.len() >= MAX_SEEDS {
            break;
        }
        let mut next = Vec::new();
        for seed in &level {
            counted = counted.checked_add(1).ok_or(CountError::Overflow)?;
            for j in seed.start..cbo.n_attrs {
                if seed.intent.get(j) {
                    continue;
                }
                if cbo.make_child(&seed.extent, &seed.intent, j, &mut child) {
                    next.push(Seed {
                        extent: child.extent.clone(),
                        intent: child.intent.clone(),
                        start: j + 1,
                    });
                }
            }
        }
        level = next;
        if level.is_empty() {
            break;
        }
    }
    Ok((counted, level))
}

/// Count the concepts under one seed (including the seed itself).
pub fn count_from_seed(ctx: &FormalContext, seed: &Seed) -> Result<ConceptCount, CountError> {
    let cbo = Cbo::new(ctx)?;
    let mut frames = cbo.frames();
    frames[0].extent.copy_from(&seed.extent);
    frames[0].intent.copy_from(&seed.intent);
    let mut count = 0u64;
    cbo.count_subtree(&mut frames, seed.start, &mut count)?;
    Ok(count)
}

/// Serial Close-by-One count of all formal concepts.
pub fn count_concepts_serial(ctx: &FormalContext) -> Result<ConceptCount, CountError> {
    let cbo = Cbo::new(ctx)?;
    let mut frames = cbo.frames();
    let (extent, intent) = cbo.root();
    frames[0].extent.copy_from(&extent);
    frames[0].intent.copy_from(&intent);
    let mut count = 0u64;
    cbo.count_subtree(&mut frames, 0, &mut count)?;
    Ok(count)
}

/// Parallel concept count: expand breadth-first to `split_depth`, then let
/// `workers` threads consume the frontier with private counters merged at the
/// end. The result does not depend on `workers` or `split_depth`.
#[cfg(feature = "std")]
pub fn count_concepts(
    ctx: &FormalContext,
    workers: usize,
    split_depth: usize,
) -> Result<ConceptCount, CountError> {
    use core::sync::atomic::{AtomicUsize, Ordering};

    let (base, seeds) = split_seeds(ctx, split_depth)?;
    if seeds.is_empty() {
        return Ok(base);
    }
    let workers = workers.max(1).min(seeds.len());
    if workers == 1 {
        let mut total = base;
        for seed in &seeds {
            total = total
                .checked_add(count_from_seed(ctx, seed)?)
                .ok_or(CountError::Overflow)?;
        }
        return Ok(total);
    }

    let next = AtomicUsize::new(0);
    let results: Vec<Result<u64, CountError>> = std::thread::scope(|scope| {
        let handles: Vec<_> = (0..workers)
            .map(|_| {
                let next = &next;
                let seeds = &seeds;
                scope.spawn(move || {
                    let cbo = Cbo::new(ctx)?;
                    let mut frames = cbo.frames();
                    let mut local: u64 = 0;
                    loop {
                        let i = next.fetch_add(1, Ordering::Relaxed);
                        if i >= seeds.len() {
                            return Ok(local);
                        }
                        let seed = &seeds[i];
                        frames[0].extent.copy_from(&seed.extent);
                        frames[0].intent.copy_from(&seed.intent);
                        let mut sub = 0u64;
                        cbo.count_subtree(&mut frames, seed.start, &mut sub)?;
                        local = local.checked_add(sub).ok_or(CountError::Overflow)?;
                    }
                })
            })
            .collect();
        handles.into_iter().map(|h| h.join().unwrap()).collect()
    });

    let mut total = base;
    for r in results {
        total = total.checked_add(r?).ok_or(CountError::Overflow)?;
    }
    Ok(total)
}

/// Materialize every concept, failing once more than `limit` are found.
/// Single-threaded; intended for small contexts.
pub fn enumerate_concepts(
    ctx: &FormalContext,
    limit: usize,
) -> Result<Vec<Concept>, EnumerateError> {
    let cbo = Cbo::new(ctx).map_err(|_| EnumerateError::EmptyContext)?;
    let mut frames = cbo.frames();
    let (extent, intent) = cbo.root();
    frames[0].extent.copy_from(&extent);
    frames[0].intent.copy_from(&intent);
    let mut out = Vec::new();
    cbo.enumerate_subtree(&mut frames, 0, limit, &mut out)?;
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::context::build_reduced_context;
    use crate::lattice::GLattice;

    fn example_context() -> FormalContext {
        FormalContext::from_bits(&[&[1, 0, 0, 0], &[0, 0, 0, 1], &[1, 1, 1, 0]])
    }

    fn catalan(n: usize) -> u64 {
        let mut c: u128 = 1;
        for i in 0..n as u128 {
            c = c * 2 * (2 * i + 1) / (i + 2);
        }
        c as u64
    }

    #[test]
    fn derivations_on_worked_example() {
        let ctx = example_context();
        let all = derive_up(&ctx, &BitSet::new(3));
        assert_eq!(all, BitSet::full(4));
        // {x3}↑ = {y1, y2, y3}
        let x3 = BitSet::from_indices(3, [2]);
        assert_eq!(derive_up(&ctx, &x3), BitSet::from_indices(4, [0, 1, 2]));
        // {y1}↓ = {x1, x3}
        let y1 = BitSet::from_indices(4, [0]);
        assert_eq!(derive_down(&ctx, &y1), BitSet::from_indices(3, [0, 2]));
    }

    #[test]
    fn worked_example_has_five_concepts() {
        let ctx = example_context();
        assert_eq!(count_concepts_serial(&ctx).unwrap(), 5);
        let concepts = enumerate_concepts(&ctx, 10).unwrap();
        assert_eq!(concepts.len(), 5);
        let expected = [
            (vec![], vec![0, 1, 2, 3]),
            (vec![0, 1, 2], vec![]),
            (vec![2], vec![0, 1, 2]),
            (vec![0, 2], vec![0]),
            (vec![1], vec![3]),
        ];
        for (ext, int) in expected {
            let ext = BitSet::from_indices(3, ext);
            let int = BitSet::from_indices(4, int);
            assert!(
                concepts.iter().any(|c| c.extent == ext && c.intent == int),
                "missing concept ({ext:?}, {int:?})"
            );
        }
    }

    #[test]
    fn one_by_one_zero_has_two_concepts() {
        let ctx = FormalContext::from_bits(&[&[0]]);
        assert_eq!(count_concepts_serial(&ctx).unwrap(), 2);
        let concepts = enumerate_concepts(&ctx, 4).unwrap();
        assert_eq!(concepts.len(), 2);
    }

    #[test]
    fn chain_contexts_count_catalan() {
        for n in 1..=7usize {
            let ctx = build_reduced_context(&GLattice::chain(n));
            assert_eq!(
                count_concepts_serial(&ctx).unwrap(),
                catalan(n + 1),
                "chain({n})"
            );
        }
    }

    #[test]
    fn chain10_counts_58786() {
        let ctx = build_reduced_context(&GLattice::chain(10));
        assert_eq!(count_concepts_serial(&ctx).unwrap(), 58786);
    }

    #[test]
    fn emitted_concepts_are_closed_and_distinct() {
        let ctx = build_reduced_context(&GLattice::boolean(2));
        let concepts = enumerate_concepts(&ctx, 100).unwrap();
        for c in &concepts {
            assert_eq!(derive_up(&ctx, &c.extent), c.intent);
            assert_eq!(derive_down(&ctx, &c.intent), c.extent);
        }
        for (i, a) in concepts.iter().enumerate() {
            for b in concepts.iter().skip(i + 1) {
                assert_ne!(a.extent, b.extent, "duplicate extent");
            }
        }
    }

    #[test]
    fn enumerate_limit_errors() {
        let ctx = build_reduced_context(&GLattice::chain(3));
        assert_eq!(
            enumerate_concepts(&ctx, 5),
            Err(EnumerateError::LimitExceeded { limit: 5 })
        );
    }

    #[test]
    fn count_is_independent_of_workers_and_depth() {
        for l in [GLattice::chain(5), GLattice::boolean(3)] {
            let ctx = build_reduced_context(&l);
            let reference = count_concepts_serial(&ctx).unwrap();
            for workers in [1usize, 2, 8] {
                for depth in 0..=3usize {
                    assert_eq!(
                        count_concepts(&ctx, workers, depth).unwrap(),
                        reference,
                        "workers={workers} depth={depth}"
                    );
                }
            }
        }
    }

    #[test]
    fn count_matches_on_sorted_rows() {
        let ctx = build_reduced_context(&GLattice::chain(5));
        let sorted = ctx.sort_rows_for_cbo();
        assert_eq!(
            count_concepts_serial(&ctx).unwrap(),
            count_concepts_serial(&sorted).unwrap()
        );
    }

    #[test]
    fn count_respects_trivial_bound_and_floor() {
        for l in [GLattice::chain(3), GLattice::boolean(2)] {
            let ctx = build_reduced_context(&l);
            let count = count_concepts_serial(&ctx).unwrap();
            let min_side = ctx.n_objects().min(ctx.n_attributes()) as u32;
            assert!(count <= 2u64.pow(min_side));
            assert!(count >= 2, "nonempty, not all ones");
        }
    }

    #[test]
    fn chain2_concepts_form_pentagon() {
        let ctx = build_reduced_context(&GLattice::chain(2));
        let concepts = enumerate_concepts(&ctx, 10).unwrap();
        assert_eq!(concepts.len(), 5);
        // order by extent inclusion; the pentagon has exactly 5 cover edges
        // and exactly one 3-element maximal chain plus one 2-element side
        let n = concepts.len();
        let below = |a: usize, b: usize| concepts[a].extent.is_subset(&concepts[b].extent);
        let mut covers = 0;
        for a in 0..n {
            for b in 0..n {
                if a == b || !below(a, b) {
                    continue;
                }
                let is_cover = (0..n).all(|c| {
                    c == a || c == b || !(below(a, c) && below(c, b) && c != a && c != b)
                });
                if is_cover {
                    covers += 1;
                }
            }
        }
        assert_eq!(covers, 5, "pentagon has 5 Hasse edges");
    }
}
