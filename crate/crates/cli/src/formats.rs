//! Context file formats: FIMI `.dat` and portable bitmap (P1).
//!
//! FIMI: one line per object, each line the ascending 0-based indices of the
//! object's attributes, space-separated, newline-terminated. Objects with no
//! attributes produce empty lines, which round-trip. On import the column
//! count is one past the largest index seen.
//!
//! PBM: ASCII `P1`, white (0) for a context 1 and black (1) for a context 0.

use std::fmt;

use trfca_core::bitset::BitSet;
use trfca_core::context::FormalContext;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum FimiError {
    BadToken { line: usize, token: String },
}

impl fmt::Display for FimiError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FimiError::BadToken { line, token } => {
                write!(f, "line {line}: expected an attribute index, got '{token}'")
            }
        }
    }
}

impl std::error::Error for FimiError {}

pub fn export_fimi(ctx: &FormalContext) -> String {
    let mut out = String::new();
    for i in 0..ctx.n_objects() {
        let mut first = true;
        for j in ctx.row(i).ones() {
            if !first {
                out.push(' ');
            }
            out.push_str(&j.to_string());
            first = false;
        }
        out.push('\n');
    }
    out
}

pub fn import_fimi(text: &str) -> Result<FormalContext, FimiError> {
    let mut lines: Vec<&str> = text.split('\n').collect();
    // a trailing newline produces one final empty fragment, not an object
    if lines.last() == Some(&"") {
        lines.pop();
    }
    let mut indices: Vec<Vec<usize>> = Vec::with_capacity(lines.len());
    let mut max_index: Option<usize> = None;
    for (lineno, line) in lines.iter().enumerate() {
        let mut row = Vec::new();
        for token in line.split_whitespace() {
            let idx: usize = token.parse().map_err(|_| FimiError::BadToken {
                line: lineno + 1,
                token: token.to_string(),
            })?;
            max_index = Some(max_index.map_or(idx, |m: usize| m.max(idx)));
            row.push(idx);
        }
        indices.push(row);
    }
    let n_attributes = max_index.map_or(0, |m| m + 1);
    let rows = indices
        .into_iter()
        .map(|row| BitSet::from_indices(n_attributes, row))
        .collect();
    Ok(FormalContext::from_rows(n_attributes, rows))
}

pub fn export_pbm(ctx: &FormalContext) -> String {
    let mut out = String::new();
    out.push_str("P1\n");
    out.push_str(&format!("{} {}\n", ctx.n_attributes(), ctx.n_objects()));
    for i in 0..ctx.n_objects() {
        for j in 0..ctx.n_attributes() {
            if j > 0 {
                out.push(' ');
            }
            // PBM 1 = black = context 0
            out.push(if ctx.has(i, j) { '0' } else { '1' });
        }
        out.push('\n');
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use trfca_core::context::build_reduced_context;
    use trfca_core::GLattice;

    fn example_context() -> FormalContext {
        FormalContext::from_bits(&[&[1, 0, 0, 0], &[0, 0, 0, 1], &[1, 1, 1, 0]])
    }

    #[test]
    fn fimi_golden_for_worked_example() {
        assert_eq!(export_fimi(&example_context()), "0\n3\n0 1 2\n");
    }

    #[test]
    fn fimi_single_empty_line_for_one_by_one_zero() {
        let ctx = FormalContext::from_bits(&[&[0]]);
        assert_eq!(export_fimi(&ctx), "\n");
        // the all-zero column is unrepresentable in FIMI; the import sees one
        // object with no attributes
        let back = import_fimi("\n").unwrap();
        assert_eq!(back.n_objects(), 1);
        assert_eq!(back.n_attributes(), 0);
    }

    #[test]
    fn fimi_round_trips_chain4_context() {
        let ctx = build_reduced_context(&GLattice::chain(4));
        let back = import_fimi(&export_fimi(&ctx)).unwrap();
        assert_eq!(back.n_objects(), ctx.n_objects());
        assert_eq!(back.n_attributes(), ctx.n_attributes());
        for i in 0..ctx.n_objects() {
            for j in 0..ctx.n_attributes() {
                assert_eq!(back.has(i, j), ctx.has(i, j));
            }
        }
    }

    #[test]
    fn fimi_preserves_interior_empty_lines() {
        let ctx = import_fimi("2\n\n0 1\n").unwrap();
        assert_eq!(ctx.n_objects(), 3);
        assert_eq!(ctx.n_attributes(), 3);
        assert_eq!(ctx.row(1).count_ones(), 0);
        assert_eq!(export_fimi(&ctx), "2\n\n0 1\n");
    }

    #[test]
    fn fimi_rejects_garbage() {
        assert_eq!(
            import_fimi("0 x\n"),
            Err(FimiError::BadToken {
                line: 1,
                token: "x".into()
            })
        );
    }

    #[test]
    fn pbm_golden_for_worked_example() {
        assert_eq!(
            export_pbm(&example_context()),
            "P1\n4 3\n0 1 1 1\n1 1 1 0\n0 0 0 1\n"
        );
    }

    #[test]
    fn pbm_all_ones_context_is_all_white() {
        let ctx = FormalContext::from_bits(&[&[1, 1], &[1, 1]]);
        assert_eq!(export_pbm(&ctx), "P1\n2 2\n0 0\n0 0\n");
    }

    #[test]
    fn pbm_chain2_has_five_black_pixels() {
        let ctx = build_reduced_context(&GLattice::chain(2));
        let pbm = export_pbm(&ctx);
        let blacks = pbm
            .lines()
            .skip(2)
            .flat_map(|l| l.split_whitespace())
            .filter(|&t| t == "1")
            .count();
        assert_eq!(blacks, 5);
    }
}
