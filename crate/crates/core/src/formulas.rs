//! Exact-arithmetic evaluation of the closed-form codensities, counts,
//! bounds, and limits for the lattice families: chains, grids of chains,
//! arbitrary products of chains, Boolean lattices, and subspace lattices.
//!
//! Everything is big-integer or big-rational; nothing here goes through
//! floating point. The product-of-chains codensity is evaluated in factorized
//! form (one polynomial-size sum per coordinate) so the limit checks at
//! n = 10^4 are cheap; the literal nested sum survives in the tests as the
//! oracle for the factorization.

use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::bitset::BitSet;
use crate::context::FormalContext;

/// Arbitrary-precision rational, reduced, denominator positive.
pub type ExactRational = BigRational;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum FormulaError {
    /// A parameter outside the formula's domain.
    InvalidParameter(String),
}

impl fmt::Display for FormulaError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FormulaError::InvalidParameter(msg) => write!(f, "invalid parameter: {msg}"),
        }
    }
}

#[cfg(feature = "std")]
impl std::error::Error for FormulaError {}

fn big(n: u64) -> BigInt {
    BigInt::from(n)
}

fn ratio(num: BigInt, den: BigInt) -> ExactRational {
    BigRational::new(num, den)
}

/// Ordinary binomial coefficient.
pub fn binomial(n: u64, k: u64) -> BigInt {
    if k > n {
        return BigInt::zero();
    }
    let k = k.min(n - k);
    let mut acc = BigInt::one();
    for i in 0..k {
        acc = acc * big(n - i) / big(i + 1);
    }
    acc
}

/// Gaussian binomial coefficient: the number of k-dimensional subspaces of
/// F_p^n when p is prime. Accepts any p >= 1; p = 1 degenerates to the
/// ordinary binomial coefficient.
pub fn gaussian_binomial(n: u64, k: u64, p: u64) -> BigInt {
    if k > n {
        return BigInt::zero();
    }
    if p == 1 {
        return binomial(n, k);
    }
    let p = big(p);
    let mut acc = BigInt::one();
    for i in 1..=k {
        let num = p.pow((n - k + i) as u32) - BigInt::one();
        let den = p.pow(i as u32) - BigInt::one();
        let (q, r) = (&acc * num).div_rem(&den);
        debug_assert!(r.is_zero(), "q-binomial step must divide exactly");
        acc = q;
    }
    acc
}

/// Total number of subspaces of F_p^d.
pub fn a_total_subspaces(d: u64, p: u64) -> BigInt {
    (0..=d).map(|i| gaussian_binomial(d, i, p)).sum()
}

/// Codensity of the transfer-system context of the chain lattice with n+1
/// elements: (n+2)(n+3) / 6n(n+1).
pub fn rho_chain(n: u64) -> Result<ExactRational, FormulaError> {
    if n == 0 {
        return Err(FormulaError::InvalidParameter("rho_chain needs n >= 1".into()));
    }
    Ok(ratio(big(n + 2) * big(n + 3), big(6) * big(n) * big(n + 1)))
}

/// Codensity for the product of two chains:
/// (m+2)(m+3)(n+2)(n+3)(3mn+4m+4n) / 36(m+1)(n+1)(2m+2n+mn)^2.
/// m = 0 is permitted and reduces to `rho_chain(n)`.
pub fn rho_grid(n: u64, m: u64) -> Result<ExactRational, FormulaError> {
    if n == 0 {
        return Err(FormulaError::InvalidParameter("rho_grid needs n >= 1".into()));
    }
    let num = big(m + 2) * big(m + 3) * big(n + 2) * big(n + 3) * big(3 * m * n + 4 * m + 4 * n);
    let base = big(2 * m + 2 * n + m * n);
    let den = big(36) * big(m + 1) * big(n + 1) * &base * &base;
    Ok(ratio(num, den))
}

/// Sum of (z - x + 1) over 0 <= x <= y <= z <= n, evaluated in O(n).
fn chain_sum_span(n: u64) -> BigInt {
    // group by d = z - x: (n + 1 - d) positions, (d + 1) choices of y,
    // weight (d + 1)
    let mut acc = BigInt::zero();
    for d in 0..=n {
        acc += big(n + 1 - d) * big(d + 1) * big(d + 1);
    }
    acc
}

/// Sum of (z - y + 1) over 0 <= x <= y <= z <= n, evaluated in O(n).
fn chain_sum_upper(n: u64) -> BigInt {
    let mut acc = BigInt::zero();
    for y in 0..=n {
        let e = n - y;
        acc += big(y + 1) * (big(e + 1) * big(e + 2) / big(2));
    }
    acc
}

/// Codensity for an arbitrary product of chains `[n_1] x ... x [n_k]`,
/// evaluated in factorized form:
/// numerator = prod A_i - prod B_i over the per-coordinate triple sums, and
/// denominator = (prod C(n_i + 2, 2) - prod (n_i + 1))^2.
pub fn rho_cyclic(ns: &[u64]) -> Result<ExactRational, FormulaError> {
    if ns.is_empty() {
        return Err(FormulaError::InvalidParameter(
            "rho_cyclic needs at least one exponent".into(),
        ));
    }
    if ns.iter().all(|&n| n == 0) {
        return Err(FormulaError::InvalidParameter(
            "rho_cyclic needs a nonzero exponent (the relation set is empty)".into(),
        ));
    }
    let mut span = BigInt::one();
    let mut upper = BigInt::one();
    let mut pairs = BigInt::one();
    let mut points = BigInt::one();
    for &n in ns {
        span *= chain_sum_span(n);
        upper *= chain_sum_upper(n);
        pairs *= binomial(n + 2, 2);
        points *= big(n + 1);
    }
    let base = pairs - points;
    Ok(ratio(span - upper, &base * &base))
}

/// Codensity for the Boolean lattice with k atoms: (6^k - 5^k)/(3^k - 2^k)^2.
pub fn rho_boolean(k: u64) -> Result<ExactRational, FormulaError> {
    if k == 0 {
        return Err(FormulaError::InvalidParameter("rho_boolean needs k >= 1".into()));
    }
    let num = big(6).pow(k as u32) - big(5).pow(k as u32);
    let base = big(3).pow(k as u32) - big(2).pow(k as u32);
    Ok(ratio(num, &base * &base))
}

/// Number of zeros in the subspace-lattice context: the triple Gaussian sum.
pub fn elem_abelian_context_zeros(p: u64, n: u64) -> BigInt {
    let a: Vec<BigInt> = (0..=n).map(|d| a_total_subspaces(d, p)).collect();
    let mut acc = BigInt::zero();
    for i in 0..n {
        for j in 1..=(n - i) {
            for k in 0..=(n - i - j) {
                acc += gaussian_binomial(n, i, p)
                    * gaussian_binomial(n - i, j, p)
                    * gaussian_binomial(n - i - j, k, p)
                    * (&a[(j + k) as usize] - &a[k as usize]);
            }
        }
    }
    acc
}

/// Number of nontrivial relations H < K in the subspace lattice of F_p^n.
pub fn elem_abelian_relation_count(p: u64, n: u64) -> BigInt {
    let mut acc = BigInt::zero();
    for i in 0..n {
        acc += gaussian_binomial(n, i, p) * (a_total_subspaces(n - i, p) - BigInt::one());
    }
    acc
}

/// Codensity for the subspace lattice of F_p^n (p = 1 gives the Boolean
/// specialization).
pub fn rho_elem_abelian(p: u64, n: u64) -> Result<ExactRational, FormulaError> {
    if p == 0 || n == 0 {
        return Err(FormulaError::InvalidParameter(
            "rho_elem_abelian needs p >= 1, n >= 1".into(),
        ));
    }
    let num = elem_abelian_context_zeros(p, n);
    let base = elem_abelian_relation_count(p, n);
    Ok(ratio(num, &base * &base))
}

/// A lattice family with closed-form irreducible counts.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum LatticeFamily {
    Chain { n: u64 },
    Grid { n: u64, m: u64 },
    Cyclic { ns: Vec<u64> },
    Boolean { k: u64 },
    ElemAbelian { p: u64, n: u64 },
}

/// Closed-form count of join-irreducibles (= meet-irreducibles = relation
/// orbits) for one of the named families.
pub fn j_count(family: &LatticeFamily) -> Result<BigInt, FormulaError> {
    match family {
        LatticeFamily::Chain { n } => Ok(binomial(n + 1, 2)),
        LatticeFamily::Grid { n, m } => {
            Ok(ratio(
                big(m + 1) * big(n + 1) * big(m * n + 2 * m + 2 * n),
                big(4),
            )
            .to_integer())
        }
        LatticeFamily::Cyclic { ns } => {
            if ns.is_empty() {
                return Err(FormulaError::InvalidParameter("empty exponent list".into()));
            }
            let mut pairs = BigInt::one();
            let mut points = BigInt::one();
            for &n in ns {
                pairs *= binomial(n + 2, 2);
                points *= big(n + 1);
            }
            Ok(pairs - points)
        }
        LatticeFamily::Boolean { k } => Ok(big(3).pow(*k as u32) - big(2).pow(*k as u32)),
        LatticeFamily::ElemAbelian { p, n } => Ok(elem_abelian_relation_count(*p, *n)),
    }
}

/// `floor((3/2) * 2^sqrt(ones + 1)) - 1`, computed exactly: the square root
/// and the power of two are bracketed in fixed-point big-integer arithmetic
/// with directed rounding, and the precision doubles until the floor is
/// pinned. Never goes through floating point.
pub fn schuett_bound(ones: &BigUint) -> BigInt {
    let t = ones + 1u32;
    let r = t.sqrt();
    if &r * &r == t {
        // exact: 3 * 2^(r-1) - 1, r >= 1
        let r: u64 = r.to_u64().expect("sqrt of desk-scale counts fits u64");
        return big(3) * BigInt::from(BigUint::one() << (r - 1) as usize) - BigInt::one();
    }
    let r_bits: u64 = r.to_u64().expect("desk-scale") ;
    let mut fraction_bits = (r_bits + 48) as usize;
    loop {
        if let Some(n) = pow2_sqrt_floor(&t, r_bits, fraction_bits) {
            return BigInt::from(n) - BigInt::one();
        }
        fraction_bits *= 2;
    }
}

/// floor(3 * 2^(sqrt(t) - 1)) for non-square t, with `r = floor(sqrt(t))` and
/// the fraction of sqrt(t) carried to `f` bits. Returns None when the
/// precision cannot pin the floor yet.
fn pow2_sqrt_floor(t: &BigUint, r: u64, f: usize) -> Option<BigUint> {
    let prec = f + 64;
    // x_scaled = floor(2^f * sqrt(t))
    let x_scaled = (t << (2 * f)).sqrt();
    let frac_lo = &x_scaled - (BigUint::from(r) << f);
    let frac_hi = &frac_lo + 1u32;

    // 2^(frac / 2^f) via the square-root chain of 2, with directed rounding
    let one = BigUint::one() << prec;
    let mut lo_acc = one.clone();
    let mut hi_acc = one.clone();
    // chain[i] brackets 2^(1/2^(i+1)) scaled by 2^prec
    let mut lo_chain = Vec::with_capacity(f);
    let mut hi_chain = Vec::with_capacity(f);
    let mut lo_cur = ((BigUint::from(2u32) << (2 * prec)) >> 0usize).sqrt(); // floor(2^prec * sqrt(2))
    let mut hi_cur = &lo_cur + 1u32;
    for _ in 0..f {
        lo_chain.push(lo_cur.clone());
        hi_chain.push(hi_cur.clone());
        lo_cur = (&lo_cur << prec).sqrt();
        hi_cur = ((&hi_cur << prec) + (BigUint::one() << prec)).sqrt() + 1u32;
    }
    for bit in 0..f {
        // fraction bit with weight 2^-(f - bit) corresponds to chain index
        // f - bit - 1
        let idx = f - bit - 1;
        if (frac_lo.clone() >> bit) & BigUint::one() == BigUint::one() {
            lo_acc = (lo_acc * &lo_chain[idx]) >> prec;
        }
        if (frac_hi.clone() >> bit) & BigUint::one() == BigUint::one() {
            hi_acc = ((hi_acc * &hi_chain[idx]) >> prec) + 1u32;
        }
    }
    // value = 3 * 2^(r-1) * acc / 2^prec  (r >= 1 since t >= 2)
    let shift = (r - 1) as usize;
    let lo_val = ((BigUint::from(3u32) * lo_acc) << shift) >> prec;
    let hi_val = ((BigUint::from(3u32) * hi_acc) << shift) >> prec;
    if lo_val == hi_val {
        Some(lo_val)
    } else {
        None
    }
}

/// `2^min(rows, cols)`.
pub fn trivial_bound(rows: u64, cols: u64) -> BigInt {
    BigInt::from(BigUint::one() << rows.min(cols) as usize)
}

/// Concept-count bound for a context with no k×k contranomial subcontext:
/// sum of C(rows, i) for i < k.
pub fn ncfree_bound(k: u64, rows: u64) -> BigInt {
    (0..k).map(|i| binomial(rows, i)).sum()
}

/// Result of the contranomial-scale search.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ContranomialResult {
    /// Largest k found such that a k×k submatrix with all-zero diagonal and
    /// all-one off-diagonal exists.
    pub k: usize,
    /// False when the node budget ran out before the search was exhaustive;
    /// `k` is then only a lower bound.
    pub exact: bool,
    pub nodes_used: u64,
}

/// Largest k such that the context contains a k×k submatrix with zeros on a
/// perfect row↔column matching and ones elsewhere, by backtracking over row
/// choices with bitset pruning. Aborts with `exact = false` when the node
/// budget is exhausted.
pub fn contranomial_max_k(ctx: &FormalContext, budget: u64) -> ContranomialResult {
    let rows = ctx.n_objects();
    let cols = ctx.n_attributes();
    let mut state = ContranomialSearch {
        ctx,
        best: 0,
        nodes: 0,
        budget,
        exhausted: false,
        chosen_rows: Vec::new(),
        chosen_cols: Vec::new(),
    };
    let cand_rows = BitSet::full(rows);
    let cand_cols = BitSet::full(cols);
    state.search(&cand_rows, &cand_cols);
    ContranomialResult {
        k: state.best,
        exact: !state.exhausted,
        nodes_used: state.nodes,
    }
}

struct ContranomialSearch<'a> {
    ctx: &'a FormalContext,
    best: usize,
    nodes: u64,
    budget: u64,
    exhausted: bool,
    chosen_rows: Vec<usize>,
    chosen_cols: Vec<usize>,
}

impl<'a> ContranomialSearch<'a> {
    /// `cand_rows`: rows above the last chosen row having 1 in every chosen
    /// column; `cand_cols`: unused columns having 1 in every chosen row.
    fn search(&mut self, cand_rows: &BitSet, cand_cols: &BitSet) {
        let depth = self.chosen_rows.len();
        self.best = self.best.max(depth);
        if self.exhausted {
            return;
        }
        // bound: cannot beat best even if every candidate pairs up
        if depth + cand_rows.count_ones().min(cand_cols.count_ones()) <= self.best {
            return;
        }
        for r in cand_rows.ones() {
            for c in cand_cols.ones() {
                if self.ctx.has(r, c) {
                    continue; // need a 0 on the matching cell
                }
                self.nodes += 1;
                if self.nodes > self.budget {
                    self.exhausted = true;
                    return;
                }
                // rows after r that also have 1 in column c
                let mut next_rows = cand_rows.clone();
                next_rows.and_assign(self.ctx.col(c));
                for past in 0..=r {
                    if next_rows.get(past) {
                        next_rows.unset(past);
                    }
                }
                let mut next_cols = cand_cols.clone();
                next_cols.and_assign(self.ctx.row(r));
                // c itself has a 0 in row r, so it is already excluded
                self.chosen_rows.push(r);
                self.chosen_cols.push(c);
                self.search(&next_rows, &next_cols);
                self.chosen_rows.pop();
                self.chosen_cols.pop();
                if self.exhausted {
                    return;
                }
            }
        }
    }
}

/// The conjectured limiting codensity (2^k - 1) / 6^k for k chain factors.
pub fn conjectured_limit(k: u64) -> ExactRational {
    ratio(
        big(2).pow(k as u32) - BigInt::one(),
        big(6).pow(k as u32),
    )
}

/// Evaluate `rho_cyclic([n; k])` in factorized form and test it against the
/// conjectured limit within `tol`.
pub fn limit_table_check(k: u64, n: u64, tol: &ExactRational) -> Result<bool, FormulaError> {
    let ns = vec![n; k as usize];
    let value = rho_cyclic(&ns)?;
    let diff = (value - conjectured_limit(k)).abs();
    Ok(diff <= *tol)
}

/// Render a rational as a truncated decimal with `places` digits.
pub fn decimal_string(r: &ExactRational, places: usize) -> String {
    let negative = r.is_negative();
    let abs = r.abs();
    let scale = BigInt::from(10u32).pow(places as u32);
    let scaled = (abs.numer() * &scale) / abs.denom();
    let (int_part, frac_part) = scaled.div_rem(&scale);
    let frac = frac_part.to_string();
    let mut out = String::new();
    if negative {
        out.push('-');
    }
    out.push_str(&int_part.to_string());
    out.push('.');
    for _ in frac.len()..places {
        out.push('0');
    }
    out.push_str(&frac);
    out
}
