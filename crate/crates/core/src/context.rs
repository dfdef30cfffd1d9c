//! Reduced formal contexts of transfer-system lattices.
//!
//! For a finite lattice `L` with group action, the rows and columns of the
//! reduced context are both indexed by the orbits of nontrivial relations
//! `x < y`, and the incidence between row `(a,b)` and column `(x,y)` holds
//! exactly when, for every action permutation `g`:
//! `g·a ≥ x` and `g·b ≥ y` imply `g·a ≥ y`.
//!
//! Counting the concepts of this context counts the transfer systems on `L`
//! without materializing a single one of them.

use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;

use crate::bitset::BitSet;
use crate::lattice::GLattice;

/// A nontrivial relation `x < y` in a lattice; these index both the
/// join-irreducible and the meet-irreducible transfer systems.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct RelationPair {
    pub x: u32,
    pub y: u32,
}

impl RelationPair {
    pub fn new(x: usize, y: usize) -> Self {
        RelationPair {
            x: x as u32,
            y: y as u32,
        }
    }
}

impl fmt::Display for RelationPair {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}<{}", self.x, self.y)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ContextError {
    EmptyContext,
}

impl fmt::Display for ContextError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ContextError::EmptyContext => write!(f, "context has no cells"),
        }
    }
}

#[cfg(feature = "std")]
impl std::error::Error for ContextError {}

/// An objects × attributes incidence bit-matrix with optional relation-pair
/// labels (present when the context was built from a lattice, absent after a
/// FIMI import).
#[derive(Clone, PartialEq, Eq)]
pub struct FormalContext {
    rows: Vec<BitSet>,
    cols: Vec<BitSet>,
    pub object_pairs: Option<Vec<RelationPair>>,
    pub attribute_pairs: Option<Vec<RelationPair>>,
}

impl fmt::Debug for FormalContext {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "FormalContext({}x{}, {} ones)",
            self.n_objects(),
            self.n_attributes(),
            self.ones()
        )
    }
}

impl FormalContext {
    /// Build from row bitsets over `n_attributes` columns.
    pub fn from_rows(n_attributes: usize, rows: Vec<BitSet>) -> FormalContext {
        debug_assert!(rows.iter().all(|r| r.len() == n_attributes));
        let n_objects = rows.len();
        let mut cols = vec![BitSet::new(n_objects); n_attributes];
        for (i, row) in rows.iter().enumerate() {
            for j in row.ones() {
                cols[j].set(i);
            }
        }
        FormalContext {
            rows,
            cols,
            object_pairs: None,
            attribute_pairs: None,
        }
    }

    /// Build from explicit 0/1 rows (test and example helper).
    pub fn from_bits(bits: &[&[u8]]) -> FormalContext {
        let n_attributes = bits.first().map_or(0, |r| r.len());
        let rows = bits
            .iter()
            .map(|r| BitSet::from_indices(n_attributes, r.iter().enumerate().filter(|(_, &b)| b != 0).map(|(j, _)| j)))
            .collect();
        FormalContext::from_rows(n_attributes, rows)
    }

    pub fn n_objects(&self) -> usize {
        self.rows.len()
    }

    pub fn n_attributes(&self) -> usize {
        self.cols.len()
    }

    #[inline]
    pub fn has(&self, object: usize, attribute: usize) -> bool {
        self.rows[object].get(attribute)
    }

    pub fn row(&self, object: usize) -> &BitSet {
        &self.rows[object]
    }

    pub fn col(&self, attribute: usize) -> &BitSet {
        &self.cols[attribute]
    }

    pub fn rows(&self) -> &[BitSet] {
        &self.rows
    }

    pub fn cols(&self) -> &[BitSet] {
        &self.cols
    }

    /// Number of 1 entries.
    pub fn ones(&self) -> u64 {
        self.rows.iter().map(|r| r.count_ones() as u64).sum()
    }

    pub fn cells(&self) -> u64 {
        self.n_objects() as u64 * self.n_attributes() as u64
    }

    /// Proportion of 1 entries, as an exact rational.
    pub fn density(&self) -> Result<BigRational, ContextError> {
        if self.cells() == 0 {
            return Err(ContextError::EmptyContext);
        }
        Ok(BigRational::new(
            BigInt::from(self.ones()),
            BigInt::from(self.cells()),
        ))
    }

    /// Proportion of 0 entries; `density + codensity = 1`.
    pub fn codensity(&self) -> Result<BigRational, ContextError> {
        if self.cells() == 0 {
            return Err(ContextError::EmptyContext);
        }
        Ok(BigRational::new(
            BigInt::from(self.cells() - self.ones()),
            BigInt::from(self.cells()),
        ))
    }

    /// True iff no row is the intersection of other rows that contain it, and
    /// dually for columns.
    pub fn is_reduced(&self) -> bool {
        no_redundant_line(&self.rows) && no_redundant_line(&self.cols)
    }

    /// Rows sorted in decreasing order, each row read as a binary number with
    /// its most significant digit in the last column. Labels are carried
    /// along; columns are untouched.
    pub fn sort_rows_for_cbo(&self) -> FormalContext {
        let mut order: Vec<usize> = (0..self.n_objects()).collect();
        order.sort_by(|&a, &b| self.rows[b].value_cmp(&self.rows[a]));
        let rows: Vec<BitSet> = order.iter().map(|&i| self.rows[i].clone()).collect();
        let mut ctx = FormalContext::from_rows(self.n_attributes(), rows);
        ctx.object_pairs = self
            .object_pairs
            .as_ref()
            .map(|pairs| order.iter().map(|&i| pairs[i]).collect());
        ctx.attribute_pairs = self.attribute_pairs.clone();
        ctx
    }

    /// Short `rows x cols` shape string for reports.
    pub fn shape(&self) -> String {
        alloc::format!("{}x{}", self.n_objects(), self.n_attributes())
    }
}

fn no_redundant_line(lines: &[BitSet]) -> bool {
    let n = lines.len();
    for i in 0..n {
        let mut meet: Option<BitSet> = None;
        for j in 0..n {
            if j != i && lines[i].is_subset(&lines[j]) {
                match meet.as_mut() {
                    Some(m) => m.and_assign(&lines[j]),
                    None => meet = Some(lines[j].clone()),
                }
            }
        }
        if let Some(m) = meet {
            if m == lines[i] {
                return false;
            }
        }
    }
    true
}

/// One canonical representative per orbit of `{(x,y) : x < y}` under the
/// diagonal action `g·(x,y) = (g·x, g·y)`; the representative is the
/// lexicographically least pair of its orbit and the list is sorted.
pub fn nontrivial_relation_orbits(lattice: &GLattice) -> Vec<RelationPair> {
    let m = lattice.size();
    let mut visited = vec![BitSet::new(m); m];
    let mut reps = Vec::new();
    let mut stack: Vec<(usize, usize)> = Vec::new();
    for x in 0..m {
        for y in 0..m {
            if x == y || !lattice.leq(x, y) || visited[x].get(y) {
                continue;
            }
            // first touch in lexicographic sweep = orbit's least pair
            reps.push(RelationPair::new(x, y));
            visited[x].set(y);
            stack.push((x, y));
            while let Some((a, b)) = stack.pop() {
                for g in lattice.action() {
                    let (ga, gb) = (g[a] as usize, g[b] as usize);
                    if !visited[ga].get(gb) {
                        visited[ga].set(gb);
                        stack.push((ga, gb));
                    }
                }
            }
        }
    }
    reps
}

/// The reduced formal context of the transfer-system lattice of `lattice`:
/// rows and columns are both [`nontrivial_relation_orbits`] in the same
/// order, and incidence((a,b),(x,y)) holds iff for every action permutation
/// `g`, `g·a ≥ x` and `g·b ≥ y` imply `g·a ≥ y`.
pub fn build_reduced_context(lattice: &GLattice) -> FormalContext {
    let pairs = nontrivial_relation_orbits(lattice);
    let n = pairs.len();
    let action = lattice.action();
    let mut rows = Vec::with_capacity(n);
    for obj in &pairs {
        let (a, b) = (obj.x as usize, obj.y as usize);
        let mut row = BitSet::new(n);
        'cols: for (j, attr) in pairs.iter().enumerate() {
            let (x, y) = (attr.x as usize, attr.y as usize);
            for g in action {
                let ga = g[a] as usize;
                let gb = g[b] as usize;
                // violation: g·a ≥ x, g·b ≥ y, but g·a ≱ y
                if lattice.leq(x, ga) && lattice.leq(y, gb) && !lattice.leq(y, ga) {
                    continue 'cols;
                }
            }
            row.set(j);
        }
        rows.push(row);
    }
    let mut ctx = FormalContext::from_rows(n, rows);
    ctx.object_pairs = Some(pairs.clone());
    ctx.attribute_pairs = Some(pairs);
    ctx
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::{parse_group_spec, subgroup_lattice};

    /// The worked 3x4 example context: rows x1..x3, columns y1..y4.
    pub(crate) fn example_context() -> FormalContext {
        FormalContext::from_bits(&[&[1, 0, 0, 0], &[0, 0, 0, 1], &[1, 1, 1, 0]])
    }

    #[test]
    fn chain_orbit_count_is_binomial() {
        for n in 1..=6usize {
            let l = GLattice::chain(n);
            let orbits = nontrivial_relation_orbits(&l);
            assert_eq!(orbits.len(), (n + 1) * n / 2);
        }
    }

    #[test]
    fn s4_has_34_relation_orbits() {
        let g = parse_group_spec("S:4").unwrap();
        let l = subgroup_lattice(&g).unwrap();
        assert_eq!(nontrivial_relation_orbits(&l).len(), 34);
        let ctx = build_reduced_context(&l);
        assert_eq!(ctx.n_objects(), 34);
        assert_eq!(ctx.n_attributes(), 34);
    }

    #[test]
    fn chain1_context_is_single_zero() {
        let ctx = build_reduced_context(&GLattice::chain(1));
        assert_eq!(ctx.n_objects(), 1);
        assert_eq!(ctx.n_attributes(), 1);
        assert!(!ctx.has(0, 0));
    }

    #[test]
    fn chain2_context_matches_hand_evaluation() {
        let ctx = build_reduced_context(&GLattice::chain(2));
        // pair order (0,1), (0,2), (1,2)
        let expected = [[0, 1, 1], [0, 0, 1], [1, 0, 0]];
        for i in 0..3 {
            for j in 0..3 {
                assert_eq!(ctx.has(i, j), expected[i][j] != 0, "cell ({i},{j})");
            }
        }
    }

    #[test]
    fn diagonal_is_always_zero() {
        for l in [
            GLattice::chain(4),
            GLattice::boolean(3),
            GLattice::subspace_lattice(2, 2).unwrap(),
        ] {
            let ctx = build_reduced_context(&l);
            for i in 0..ctx.n_objects() {
                assert!(!ctx.has(i, i));
            }
        }
    }

    #[test]
    fn densities_are_exact() {
        let ctx = build_reduced_context(&GLattice::chain(2));
        assert_eq!(
            ctx.codensity().unwrap(),
            BigRational::new(BigInt::from(5), BigInt::from(9))
        );
        let one = BigRational::new(BigInt::from(1), BigInt::from(1));
        assert_eq!(ctx.density().unwrap() + ctx.codensity().unwrap(), one);

        let chain1 = build_reduced_context(&GLattice::chain(1));
        assert_eq!(chain1.codensity().unwrap(), one);

        let all_ones = FormalContext::from_bits(&[&[1, 1, 1], &[1, 1, 1]]);
        assert_eq!(all_ones.density().unwrap(), one);
        assert_eq!(
            all_ones.codensity().unwrap(),
            BigRational::new(BigInt::from(0), BigInt::from(1))
        );
    }

    #[test]
    fn empty_context_density_errors() {
        let empty = FormalContext::from_rows(0, vec![]);
        assert_eq!(empty.density(), Err(ContextError::EmptyContext));
    }

    #[test]
    fn example_context_is_not_reduced() {
        // second and third columns are equal
        assert!(!example_context().is_reduced());
    }

    #[test]
    fn built_contexts_are_reduced() {
        for l in [
            GLattice::chain(3),
            GLattice::boolean(2),
            GLattice::subspace_lattice(2, 2).unwrap(),
        ] {
            assert!(build_reduced_context(&l).is_reduced());
        }
    }

    #[test]
    fn one_by_one_zero_matrix_is_reduced() {
        let ctx = FormalContext::from_bits(&[&[0]]);
        assert!(ctx.is_reduced());
    }

    #[test]
    fn row_sort_orders_by_value_descending() {
        let ctx = FormalContext::from_bits(&[&[0, 1], &[1, 1], &[1, 0]]);
        let sorted = ctx.sort_rows_for_cbo();
        // values 2, 3, 1 -> order 3, 2, 1
        assert!(sorted.has(0, 0) && sorted.has(0, 1));
        assert!(!sorted.has(1, 0) && sorted.has(1, 1));
        assert!(sorted.has(2, 0) && !sorted.has(2, 1));
    }

    #[test]
    fn row_sort_is_idempotent() {
        let ctx = build_reduced_context(&GLattice::chain(4));
        let once = ctx.sort_rows_for_cbo();
        let twice = once.sort_rows_for_cbo();
        assert_eq!(once, twice);
    }

    #[test]
    fn orbit_representative_choice_does_not_change_incidence() {
        // rebuild the S4 incidence from conjugated representatives and compare
        let g = parse_group_spec("S:4").unwrap();
        let l = subgroup_lattice(&g).unwrap();
        let ctx = build_reduced_context(&l);
        let pairs = nontrivial_relation_orbits(&l);
        let action = l.action();
        // deterministically re-choose each representative via a fixed stride
        for (i, p) in pairs.iter().enumerate() {
            let g_alt = &action[(i * 7 + 3) % action.len()];
            let (a, b) = (g_alt[p.x as usize] as usize, g_alt[p.y as usize] as usize);
            for (j, q) in pairs.iter().enumerate() {
                let (x, y) = (q.x as usize, q.y as usize);
                let mut incidence = true;
                for g in action {
                    let (ga, gb) = (g[a] as usize, g[b] as usize);
                    if l.leq(x, ga) && l.leq(y, gb) && !l.leq(y, ga) {
                        incidence = false;
                        break;
                    }
                }
                assert_eq!(incidence, ctx.has(i, j));
            }
        }
    }
}
