//! Permutation groups, exhaustive subgroup enumeration, and the subgroup
//! lattice with its conjugation action.
//!
//! Element lists are produced in breadth-first discovery order from the
//! generators, so everything downstream (subgroup indices, orbit
//! representatives, context row order) is reproducible from the group spec.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use crate::bitset::BitSet;
use crate::lattice::{GLattice, LatticeError};

/// Default cap on the group order accepted by [`close_generators`].
pub const DEFAULT_ORDER_CAP: usize = 1000;

pub type Point = u16;

/// A permutation of `{0..degree}`, stored as its image list.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct Perm(pub Vec<Point>);

impl Perm {
    pub fn identity(degree: usize) -> Perm {
        Perm((0..degree as Point).collect())
    }

    pub fn degree(&self) -> usize {
        self.0.len()
    }

    #[inline]
    pub fn apply(&self, x: usize) -> usize {
        self.0[x] as usize
    }

    /// `self ∘ other`: apply `other` first, then `self`.
    pub fn compose(&self, other: &Perm) -> Perm {
        Perm(other.0.iter().map(|&x| self.0[x as usize]).collect())
    }

    pub fn inverse(&self) -> Perm {
        let mut inv = vec![0 as Point; self.0.len()];
        for (i, &v) in self.0.iter().enumerate() {
            inv[v as usize] = i as Point;
        }
        Perm(inv)
    }

    pub fn is_identity(&self) -> bool {
        self.0.iter().enumerate().all(|(i, &v)| v as usize == i)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum GroupError {
    /// Generators act on inconsistent degrees.
    MixedDegrees,
    /// Group order exceeds the configured cap.
    OrderCapExceeded { cap: usize },
    /// The enumerated subgroups fail meet-closure (intersection not found);
    /// indicates a corrupted input group.
    MeetClosureViolation,
    Lattice(LatticeError),
    Spec(GroupSpecError),
}

impl fmt::Display for GroupError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GroupError::MixedDegrees => write!(f, "generators have different degrees"),
            GroupError::OrderCapExceeded { cap } => {
                write!(f, "group order exceeds cap {cap}")
            }
            GroupError::MeetClosureViolation => {
                write!(f, "subgroup intersection missing from enumeration")
            }
            GroupError::Lattice(e) => write!(f, "{e}"),
            GroupError::Spec(e) => write!(f, "{e}"),
        }
    }
}

#[cfg(feature = "std")]
impl std::error::Error for GroupError {}

impl From<LatticeError> for GroupError {
    fn from(e: LatticeError) -> Self {
        GroupError::Lattice(e)
    }
}

/// A finite permutation group given by its full element list (closure of the
/// generators, identity first).
#[derive(Clone, Debug)]
pub struct PermGroup {
    degree: usize,
    generators: Vec<Perm>,
    elements: Vec<Perm>,
}

impl PermGroup {
    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn order(&self) -> usize {
        self.elements.len()
    }

    pub fn generators(&self) -> &[Perm] {
        &self.generators
    }

    pub fn elements(&self) -> &[Perm] {
        &self.elements
    }

    /// Index-based multiplication table: `table[i * order + j]` is the index
    /// of `elements[i] ∘ elements[j]`.
    pub fn multiplication_table(&self) -> Vec<u32> {
        let n = self.order();
        let index: BTreeMap<&Perm, u32> = self
            .elements
            .iter()
            .enumerate()
            .map(|(i, p)| (p, i as u32))
            .collect();
        let mut table = vec![0u32; n * n];
        for i in 0..n {
            for j in 0..n {
                let prod = self.elements[i].compose(&self.elements[j]);
                table[i * n + j] = index[&prod];
            }
        }
        table
    }
}

/// Close a generator list under composition, breadth first, identity first.
pub fn close_generators(gens: &[Perm], cap: usize) -> Result<PermGroup, GroupError> {
    let degree = match gens.first() {
        Some(g) => g.degree(),
        None => 1,
    };
    if gens.iter().any(|g| g.degree() != degree) {
        return Err(GroupError::MixedDegrees);
    }
    let mut elements = vec![Perm::identity(degree)];
    let mut seen: BTreeMap<Perm, ()> = BTreeMap::new();
    seen.insert(elements[0].clone(), ());
    let mut head = 0usize;
    while head < elements.len() {
        let current = elements[head].clone();
        head += 1;
        for g in gens {
            let next = g.compose(&current);
            if !seen.contains_key(&next) {
                if elements.len() >= cap {
                    return Err(GroupError::OrderCapExceeded { cap });
                }
                seen.insert(next.clone(), ());
                elements.push(next);
            }
        }
    }
    Ok(PermGroup {
        degree,
        generators: gens.to_vec(),
        elements,
    })
}

/// A subgroup of an ambient [`PermGroup`], as the bitset of its element
/// indices.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Debug)]
pub struct Subgroup {
    pub members: BitSet,
}

impl Subgroup {
    pub fn order(&self) -> usize {
        self.members.count_ones()
    }

    /// Closure check within the ambient group's multiplication table.
    pub fn is_closed(&self, table: &[u32], order: usize) -> bool {
        if !self.members.get(0) {
            return false;
        }
        for i in self.members.ones() {
            for j in self.members.ones() {
                if !self.members.get(table[i * order + j] as usize) {
                    return false;
                }
            }
        }
        true
    }
}

/// All subgroups of `g`, each exactly once.
///
/// Seeds with the cyclic subgroups, then repeatedly adds joins of pairs of
/// known subgroups until a fixed point. The result is sorted by
/// (order, member set), so the trivial subgroup is first and `g` itself last.
pub fn enumerate_subgroups(g: &PermGroup) -> Result<Vec<Subgroup>, GroupError> {
    let n = g.order();
    let table = g.multiplication_table();
    let full = BitSet::full(n);

    let mut subs: Vec<BitSet> = Vec::new();
    let mut seen: BTreeMap<BitSet, ()> = BTreeMap::new();
    let push = |set: BitSet, subs: &mut Vec<BitSet>, seen: &mut BTreeMap<BitSet, ()>| {
        if !seen.contains_key(&set) {
            seen.insert(set.clone(), ());
            subs.push(set);
        }
    };

    for i in 0..n {
        push(cyclic_closure(i, &table, n), &mut subs, &mut seen);
    }

    // join every pair once; new subgroups extend the loop bounds
    let mut i = 0;
    while i < subs.len() {
        let mut j = 0;
        while j <= i {
            let joined = join_closure(&subs[i], &subs[j], &table, n, &full);
            push(joined, &mut subs, &mut seen);
            j += 1;
        }
        i += 1;
    }

    subs.sort_by(|a, b| a.count_ones().cmp(&b.count_ones()).then(a.cmp(b)));
    Ok(subs.into_iter().map(|members| Subgroup { members }).collect())
}

fn cyclic_closure(elem: usize, table: &[u32], n: usize) -> BitSet {
    let mut set = BitSet::new(n);
    set.set(0);
    let mut x = elem;
    while !set.get(x) {
        set.set(x);
        x = table[x * n + elem] as usize;
    }
    set
}

/// `<a ∪ b>`. Once the member count exceeds half the group order the result
/// must be the whole group (the order divides |G|), so bail out early.
fn join_closure(a: &BitSet, b: &BitSet, table: &[u32], n: usize, full: &BitSet) -> BitSet {
    if a.is_subset(b) {
        return b.clone();
    }
    if b.is_subset(a) {
        return a.clone();
    }
    let mut set = a.clone();
    let mut members: Vec<u32> = a.ones().map(|x| x as u32).collect();
    let mut queue: Vec<u32> = Vec::new();
    for x in b.ones() {
        if !set.get(x) {
            set.set(x);
            members.push(x as u32);
            queue.push(x as u32);
        }
    }
    // products of seed members among themselves first
    let mut head = 0usize;
    let seed_len = members.len();
    for i in 0..seed_len {
        for j in 0..seed_len {
            let p = table[members[i] as usize * n + members[j] as usize];
            if !set.get(p as usize) {
                set.set(p as usize);
                members.push(p);
                queue.push(p);
                if members.len() > n / 2 {
                    return full.clone();
                }
            }
        }
    }
    while head < queue.len() {
        let x = queue[head] as usize;
        head += 1;
        let mut k = 0;
        while k < members.len() {
            let y = members[k] as usize;
            for p in [table[x * n + y], table[y * n + x]] {
                if !set.get(p as usize) {
                    set.set(p as usize);
                    members.push(p);
                    queue.push(p);
                    if members.len() > n / 2 {
                        return full.clone();
                    }
                }
            }
            k += 1;
        }
    }
    set
}

/// The subgroup lattice of `g` as a [`GLattice`]: order is inclusion, meet is
/// intersection, join is the generated subgroup, and the action is
/// conjugation (one permutation of subgroup indices per group element,
/// deduplicated).
pub fn subgroup_lattice(g: &PermGroup) -> Result<GLattice, GroupError> {
    let subs = enumerate_subgroups(g)?;
    let m = subs.len();
    let index: BTreeMap<&BitSet, u32> = subs
        .iter()
        .enumerate()
        .map(|(i, s)| (&s.members, i as u32))
        .collect();

    let mut up = vec![BitSet::new(m); m];
    for x in 0..m {
        for y in 0..m {
            if subs[x].members.is_subset(&subs[y].members) {
                up[x].set(y);
            }
        }
    }

    // meet-closure sanity: the intersection of any two subgroups must be in
    // the list
    let mut probe = BitSet::new(g.order());
    for x in 0..m {
        for y in (x + 1)..m {
            probe.copy_and(&subs[x].members, &subs[y].members);
            if !index.contains_key(&probe) {
                return Err(GroupError::MeetClosureViolation);
            }
        }
    }

    // conjugation action
    let n = g.order();
    let table = g.multiplication_table();
    let mut inv = vec![0u32; n];
    for (i, e) in g.elements().iter().enumerate() {
        let e_inv = e.inverse();
        inv[i] = g
            .elements()
            .iter()
            .position(|x| *x == e_inv)
            .expect("inverse closed") as u32;
    }
    let mut action = Vec::with_capacity(n);
    for gi in 0..n {
        // conj(x) = g x g^-1 as an element permutation
        let conj: Vec<u32> = (0..n)
            .map(|x| table[table[gi * n + x] as usize * n + inv[gi] as usize])
            .collect();
        let perm: Vec<u32> = (0..m)
            .map(|s| {
                let mut image = BitSet::new(n);
                for x in subs[s].members.ones() {
                    image.set(conj[x] as usize);
                }
                index[&image]
            })
            .collect();
        action.push(perm);
    }

    let lattice = GLattice::from_order(up, action)?;
    Ok(lattice)
}

/// Number of conjugacy classes of subgroups.
pub fn orbit_count_subgroups(g: &PermGroup) -> Result<usize, GroupError> {
    let lattice = subgroup_lattice(g)?;
    Ok(lattice.element_orbits().1)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GroupSpecError {
    pub message: String,
}

impl fmt::Display for GroupSpecError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "bad group spec: {}", self.message)
    }
}

#[cfg(feature = "std")]
impl std::error::Error for GroupSpecError {}

fn spec_err<T>(message: impl Into<String>) -> Result<T, GroupSpecError> {
    Err(GroupSpecError {
        message: message.into(),
    })
}

/// Parse a named-group spec into a permutation group.
///
/// Grammar:
/// - `cyclic:N` — C_N as the N-cycle `(0 1 ... N-1)`
/// - `elem-abelian:p^n` — C_p^n as n disjoint p-cycles on p*n points
/// - `S:n` (n <= 6) — symmetric group via `(0 1)` and `(0 1 ... n-1)`
/// - `A:n` (n <= 7) — alternating group via 3-cycles `(0 1 k)`
/// - `D:n` — dihedral group of order 2n
/// - `Q:8` — quaternion group in its regular representation
/// - `perm:<cycles;cycles;...>` — raw generators in cycle notation, e.g.
///   `perm:(01)(23);(024)`. Within a cycle, points may be single digits run
///   together or separated by spaces/commas for multi-digit points.
pub fn parse_group_spec(spec: &str) -> Result<PermGroup, GroupError> {
    parse_group_spec_with_cap(spec, DEFAULT_ORDER_CAP)
}

pub fn parse_group_spec_with_cap(spec: &str, cap: usize) -> Result<PermGroup, GroupError> {
    let gens = parse_group_generators(spec).map_err(GroupError::Spec)?;
    close_generators(&gens, cap)
}

/// The generator list for a named-group spec; see [`parse_group_spec`] for
/// the grammar.
pub fn parse_group_generators(spec: &str) -> Result<Vec<Perm>, GroupSpecError> {
    let (name, arg) = match spec.split_once(':') {
        Some(pair) => pair,
        None => return spec_err(format!("expected '<name>:<params>', got '{spec}'")),
    };
    let gens = match name {
        "cyclic" => {
            let n: usize = parse_num(arg)?;
            if n == 0 {
                return spec_err("cyclic:N requires N >= 1");
            }
            vec![cycle_perm(n)]
        }
        "elem-abelian" => {
            let (p, e) = match arg.split_once('^') {
                Some((p, e)) => (parse_num(p)?, parse_num(e)?),
                None => return spec_err("elem-abelian expects p^n"),
            };
            if p < 2 || e == 0 {
                return spec_err("elem-abelian:p^n requires p >= 2, n >= 1");
            }
            (0..e)
                .map(|i| {
                    let mut img: Vec<Point> = (0..(p * e) as Point).collect();
                    for k in 0..p {
                        img[i * p + k] = (i * p + (k + 1) % p) as Point;
                    }
                    Perm(img)
                })
                .collect()
        }
        "S" => {
            let n: usize = parse_num(arg)?;
            if n == 0 || n > 6 {
                return spec_err("S:n supports 1 <= n <= 6");
            }
            if n == 1 {
                vec![Perm::identity(1)]
            } else {
                vec![transposition(n, 0, 1), cycle_perm(n)]
            }
        }
        "A" => {
            let n: usize = parse_num(arg)?;
            if n == 0 || n > 7 {
                return spec_err("A:n supports 1 <= n <= 7");
            }
            if n <= 2 {
                vec![Perm::identity(n.max(1))]
            } else {
                (2..n)
                    .map(|k| {
                        let mut img: Vec<Point> = (0..n as Point).collect();
                        img[0] = 1;
                        img[1] = k as Point;
                        img[k] = 0;
                        Perm(img)
                    })
                    .collect()
            }
        }
        "D" => {
            let n: usize = parse_num(arg)?;
            match n {
                0 => return spec_err("D:n requires n >= 1"),
                1 => vec![transposition(2, 0, 1)],
                2 => vec![transposition(4, 0, 1), transposition(4, 2, 3)],
                _ => {
                    let reflection =
                        Perm((0..n).map(|x| ((n - x) % n) as Point).collect());
                    vec![cycle_perm(n), reflection]
                }
            }
        }
        "Q" => {
            if arg != "8" {
                return spec_err("only Q:8 is supported");
            }
            // left multiplication by i and j on {1,-1,i,-i,j,-j,k,-k}
            vec![
                Perm(vec![2, 3, 1, 0, 6, 7, 5, 4]),
                Perm(vec![4, 5, 7, 6, 1, 0, 2, 3]),
            ]
        }
        "perm" => parse_cycle_generators(arg)?,
        other => return spec_err(format!("unknown group family '{other}'")),
    };
    Ok(gens)
}

fn parse_num(s: &str) -> Result<usize, GroupSpecError> {
    s.parse::<usize>()
        .map_err(|_| GroupSpecError {
            message: format!("expected a number, got '{s}'"),
        })
}

fn cycle_perm(n: usize) -> Perm {
    Perm((0..n).map(|x| ((x + 1) % n) as Point).collect())
}

fn transposition(n: usize, a: usize, b: usize) -> Perm {
    let mut img: Vec<Point> = (0..n as Point).collect();
    img.swap(a, b);
    Perm(img)
}

/// Parse `;`-separated generators, each a product of parenthesized cycles of
/// 0-based points. Cycles are composed left to right.
fn parse_cycle_generators(s: &str) -> Result<Vec<Perm>, GroupSpecError> {
    let mut cycles_per_gen: Vec<Vec<Vec<usize>>> = Vec::new();
    let mut max_point = 0usize;
    for gen in s.split(';') {
        let mut cycles = Vec::new();
        let mut rest = gen.trim();
        while !rest.is_empty() {
            if !rest.starts_with('(') {
                return spec_err(format!("expected '(' in cycle spec '{gen}'"));
            }
            let close = match rest.find(')') {
                Some(c) => c,
                None => return spec_err(format!("unbalanced parentheses in '{gen}'")),
            };
            let body = &rest[1..close];
            rest = &rest[close + 1..];
            let points = parse_cycle_points(body)?;
            for &p in &points {
                max_point = max_point.max(p);
            }
            if !points.is_empty() {
                cycles.push(points);
            }
        }
        cycles_per_gen.push(cycles);
    }
    let degree = max_point + 1;
    Ok(cycles_per_gen
        .into_iter()
        .map(|cycles| {
            let mut perm = Perm::identity(degree);
            for cycle in cycles {
                let mut img: Vec<Point> = (0..degree as Point).collect();
                for w in 0..cycle.len() {
                    img[cycle[w]] = cycle[(w + 1) % cycle.len()] as Point;
                }
                perm = Perm(img).compose(&perm);
            }
            perm
        })
        .collect())
}

fn parse_cycle_points(body: &str) -> Result<Vec<usize>, GroupSpecError> {
    let body = body.trim();
    if body.is_empty() {
        return Ok(Vec::new());
    }
    let points: Vec<usize> = if body.contains(|c: char| c == ',' || c.is_whitespace()) {
        body.split(|c: char| c == ',' || c.is_whitespace())
            .filter(|t| !t.is_empty())
            .map(parse_num)
            .collect::<Result<_, _>>()?
    } else {
        body.chars()
            .map(|c| {
                c.to_digit(10)
                    .map(|d| d as usize)
                    .ok_or(GroupSpecError {
                        message: format!("bad cycle point '{c}'"),
                    })
            })
            .collect::<Result<_, _>>()?
    };
    let mut seen = alloc::collections::BTreeSet::new();
    for &p in &points {
        if !seen.insert(p) {
            return spec_err(format!("repeated point {p} in cycle"));
        }
    }
    Ok(points)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn group(spec: &str) -> PermGroup {
        parse_group_spec(spec).unwrap()
    }

    #[test]
    fn cyclic_four_has_order_four() {
        let g = close_generators(&[cycle_perm(4)], DEFAULT_ORDER_CAP).unwrap();
        assert_eq!(g.order(), 4);
        assert!(g.elements()[0].is_identity());
    }

    #[test]
    fn s4_has_order_24() {
        assert_eq!(group("S:4").order(), 24);
    }

    #[test]
    fn a6_has_order_360() {
        assert_eq!(group("A:6").order(), 360);
    }

    #[test]
    fn q8_has_order_8_and_6_subgroups() {
        let g = group("Q:8");
        assert_eq!(g.order(), 8);
        assert_eq!(enumerate_subgroups(&g).unwrap().len(), 6);
    }

    #[test]
    fn dihedral_orders() {
        for n in [1usize, 2, 3, 4, 6] {
            assert_eq!(group(&format!("D:{n}")).order(), 2 * n, "D:{n}");
        }
    }

    #[test]
    fn elem_abelian_2_3() {
        let g = group("elem-abelian:2^3");
        assert_eq!(g.degree(), 6);
        assert_eq!(g.order(), 8);
    }

    #[test]
    fn perm_spec_with_cycles() {
        let g = group("perm:(01)(23);(024)");
        assert_eq!(g.degree(), 5);
        // <(01)(23), (024)> inside S5: this is A5? just check closure works
        assert!(g.order() > 1);
        assert_eq!(group("perm:(0,1,2,3,4,5,6,7,8,9,10)").order(), 11);
    }

    #[test]
    fn order_cap_enforced() {
        assert_eq!(
            parse_group_spec_with_cap("cyclic:2000", 1000).unwrap_err(),
            GroupError::OrderCapExceeded { cap: 1000 }
        );
        assert!(matches!(
            parse_group_spec("nosuch:3").unwrap_err(),
            GroupError::Spec(_)
        ));
    }

    #[test]
    fn c6_has_four_subgroups() {
        let g = group("cyclic:6");
        assert_eq!(enumerate_subgroups(&g).unwrap().len(), 4);
    }

    #[test]
    fn s4_has_30_subgroups_in_11_classes() {
        let g = group("S:4");
        let subs = enumerate_subgroups(&g).unwrap();
        assert_eq!(subs.len(), 30);
        assert_eq!(orbit_count_subgroups(&g).unwrap(), 11);
    }

    #[test]
    fn a5_has_59_subgroups_in_9_classes() {
        let g = group("A:5");
        assert_eq!(enumerate_subgroups(&g).unwrap().len(), 59);
        assert_eq!(orbit_count_subgroups(&g).unwrap(), 9);
    }

    #[test]
    fn subgroups_satisfy_lagrange_and_closure() {
        let g = group("S:4");
        let n = g.order();
        let table = g.multiplication_table();
        for s in enumerate_subgroups(&g).unwrap() {
            assert_eq!(n % s.order(), 0, "Lagrange");
            assert!(s.is_closed(&table, n));
        }
    }

    #[test]
    fn subgroup_lattice_of_cyclic_p_power_is_chain() {
        let g = group("cyclic:8");
        let l = subgroup_lattice(&g).unwrap();
        assert_eq!(l.size(), 4);
        assert!(l.has_trivial_action());
        for x in 0..4 {
            for y in 0..4 {
                assert_eq!(l.leq(x, y), x <= y, "total order by sorted size");
            }
        }
    }

    #[test]
    fn s4_subgroup_lattice_is_valid_with_conjugation() {
        let g = group("S:4");
        let l = subgroup_lattice(&g).unwrap();
        assert_eq!(l.size(), 30);
        assert!(l.validate().is_empty());
        assert!(!l.has_trivial_action());
        // equivariance: conjugation commutes with meet and join
        for pi in l.action() {
            for x in 0..l.size() {
                for y in 0..l.size() {
                    let (px, py) = (pi[x] as usize, pi[y] as usize);
                    assert_eq!(pi[l.meet(x, y)] as usize, l.meet(px, py));
                    assert_eq!(pi[l.join(x, y)] as usize, l.join(px, py));
                }
            }
        }
    }

    #[test]
    fn abelian_action_dedups_to_identity() {
        let g = group("elem-abelian:2^2");
        let l = subgroup_lattice(&g).unwrap();
        assert!(l.has_trivial_action());
        assert_eq!(l.size(), 5);
    }

    #[test]
    fn abelian_orbit_count_equals_subgroup_count() {
        let g = group("cyclic:12");
        let subs = enumerate_subgroups(&g).unwrap().len();
        assert_eq!(orbit_count_subgroups(&g).unwrap(), subs);
    }
}
