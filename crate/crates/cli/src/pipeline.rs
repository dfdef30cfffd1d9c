//! Resolve a job source (group spec, lattice spec, or FIMI input) into a
//! formal context, with the timing split the reports expose.

use std::fmt;
use std::fs;
use std::io::Read;
use std::time::Instant;

use trfca_core::cbo::CountError;
use trfca_core::context::{build_reduced_context, FormalContext};
use trfca_core::group::{parse_group_spec_with_cap, subgroup_lattice, GroupError};
use trfca_core::lattice::{GLattice, LatticeError};
use trfca_core::oracle::OracleError;

use crate::formats;

/// Errors carrying the process exit code: 1 parse, 2 cap exceeded,
/// 3 overflow, 4 I/O.
#[derive(Debug)]
pub enum CliError {
    Parse(String),
    CapExceeded(String),
    Overflow(String),
    Io(String),
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Parse(m) => write!(f, "parse error: {m}"),
            CliError::CapExceeded(m) => write!(f, "cap exceeded: {m}"),
            CliError::Overflow(m) => write!(f, "overflow: {m}"),
            CliError::Io(m) => write!(f, "i/o error: {m}"),
        }
    }
}

impl std::error::Error for CliError {}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Parse(_) => 1,
            CliError::CapExceeded(_) => 2,
            CliError::Overflow(_) => 3,
            CliError::Io(_) => 4,
        }
    }
}

impl From<GroupError> for CliError {
    fn from(e: GroupError) -> Self {
        match e {
            GroupError::OrderCapExceeded { .. } => CliError::CapExceeded(e.to_string()),
            GroupError::Lattice(LatticeError::SubspaceCapExceeded { .. }) => {
                CliError::CapExceeded(e.to_string())
            }
            GroupError::Spec(_) => CliError::Parse(e.to_string()),
            other => CliError::Parse(other.to_string()),
        }
    }
}

impl From<LatticeError> for CliError {
    fn from(e: LatticeError) -> Self {
        match e {
            LatticeError::SubspaceCapExceeded { .. } => CliError::CapExceeded(e.to_string()),
            other => CliError::Parse(other.to_string()),
        }
    }
}

impl From<CountError> for CliError {
    fn from(e: CountError) -> Self {
        match e {
            CountError::Overflow => CliError::Overflow(e.to_string()),
            CountError::EmptyContext => CliError::Parse(e.to_string()),
        }
    }
}

impl From<OracleError> for CliError {
    fn from(e: OracleError) -> Self {
        match e {
            OracleError::OrbitCapExceeded { .. } | OracleError::FamilyCapExceeded { .. } => {
                CliError::CapExceeded(e.to_string())
            }
            other => CliError::Parse(other.to_string()),
        }
    }
}

impl From<formats::FimiError> for CliError {
    fn from(e: formats::FimiError) -> Self {
        CliError::Parse(e.to_string())
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e.to_string())
    }
}

/// Where a job's context comes from.
#[derive(Debug, Clone)]
pub enum Source {
    Group(String),
    Lattice(String),
    /// FIMI path, `-` for stdin.
    Input(String),
}

impl Source {
    pub fn from_flags(
        group: Option<String>,
        lattice: Option<String>,
        input: Option<String>,
    ) -> Result<Source, CliError> {
        match (group, lattice, input) {
            (Some(g), None, None) => Ok(Source::Group(g)),
            (None, Some(l), None) => Ok(Source::Lattice(l)),
            (None, None, Some(i)) => Ok(Source::Input(i)),
            _ => Err(CliError::Parse(
                "exactly one of --group, --lattice, --input is required".into(),
            )),
        }
    }
}

/// Caps forwarded to the builders.
#[derive(Debug, Clone, Copy)]
pub struct Caps {
    pub group_order: usize,
    pub subspace_count: usize,
}

impl Default for Caps {
    fn default() -> Self {
        Caps {
            group_order: trfca_core::group::DEFAULT_ORDER_CAP,
            subspace_count: trfca_core::lattice::DEFAULT_SUBSPACE_CAP,
        }
    }
}

/// Parse `chain:<n>`, `grid:<n1>,<n2>,...`, `boolean:<k>`,
/// `subspaces:<p>,<n>`.
pub fn build_lattice_from_lattice_spec(spec: &str, caps: Caps) -> Result<GLattice, CliError> {
    let (name, arg) = spec
        .split_once(':')
        .ok_or_else(|| CliError::Parse(format!("expected '<family>:<params>', got '{spec}'")))?;
    match name {
        "chain" => {
            let n: usize = parse_num(arg)?;
            Ok(GLattice::chain(n))
        }
        "grid" => {
            let ns = parse_num_list(arg)?;
            if ns.is_empty() {
                return Err(CliError::Parse("grid needs at least one length".into()));
            }
            let factors: Vec<GLattice> = ns.iter().map(|&n| GLattice::chain(n)).collect();
            Ok(GLattice::product(&factors)?)
        }
        "boolean" => {
            let k: usize = parse_num(arg)?;
            Ok(GLattice::boolean(k))
        }
        "subspaces" => {
            let ns = parse_num_list(arg)?;
            if ns.len() != 2 {
                return Err(CliError::Parse("subspaces expects p,n".into()));
            }
            Ok(GLattice::subspace_lattice_with_cap(
                ns[0] as u64,
                ns[1] as u32,
                caps.subspace_count,
            )?)
        }
        other => Err(CliError::Parse(format!("unknown lattice family '{other}'"))),
    }
}

/// Build the subgroup lattice for a group spec. Abelian named families go
/// straight to their lattice models: `cyclic:N` to the product of chains
/// given by the prime factorization, `elem-abelian:p^n` to the subspace
/// lattice of F_p^n. Everything else goes through permutation-group closure
/// and exhaustive subgroup enumeration.
pub fn build_lattice_from_group_spec(spec: &str, caps: Caps) -> Result<GLattice, CliError> {
    if let Some(arg) = spec.strip_prefix("cyclic:") {
        let n: u64 = parse_num(arg)? as u64;
        if n == 0 {
            return Err(CliError::Parse("cyclic:N requires N >= 1".into()));
        }
        let exponents = prime_exponents(n);
        if exponents.is_empty() {
            return Ok(GLattice::chain(0));
        }
        let factors: Vec<GLattice> = exponents
            .iter()
            .map(|&(_, e)| GLattice::chain(e as usize))
            .collect();
        return Ok(GLattice::product(&factors)?);
    }
    if let Some(arg) = spec.strip_prefix("elem-abelian:") {
        let (p, n) = arg
            .split_once('^')
            .ok_or_else(|| CliError::Parse("elem-abelian expects p^n".into()))?;
        let p: u64 = parse_num(p)? as u64;
        let n: u32 = parse_num(n)? as u32;
        return Ok(GLattice::subspace_lattice_with_cap(
            p,
            n,
            caps.subspace_count,
        )?);
    }
    let group = parse_group_spec_with_cap(spec, caps.group_order)?;
    Ok(subgroup_lattice(&group)?)
}

pub fn build_lattice(source: &Source, caps: Caps) -> Result<GLattice, CliError> {
    match source {
        Source::Group(spec) => build_lattice_from_group_spec(spec, caps),
        Source::Lattice(spec) => build_lattice_from_lattice_spec(spec, caps),
        Source::Input(_) => Err(CliError::Parse(
            "this action needs a lattice or group source, not a context file".into(),
        )),
    }
}

/// A resolved context plus how long it took to produce.
pub struct LoadedContext {
    pub ctx: FormalContext,
    pub t_context_ms: u128,
}

pub fn load_context(source: &Source, caps: Caps) -> Result<LoadedContext, CliError> {
    let start = Instant::now();
    let ctx = match source {
        Source::Input(path) => {
            let text = if path == "-" {
                let mut buf = String::new();
                std::io::stdin().read_to_string(&mut buf)?;
                buf
            } else {
                fs::read_to_string(path)?
            };
            formats::import_fimi(&text)?
        }
        other => {
            let lattice = build_lattice(other, caps)?;
            build_reduced_context(&lattice)
        }
    };
    Ok(LoadedContext {
        ctx,
        t_context_ms: start.elapsed().as_millis(),
    })
}

fn parse_num(s: &str) -> Result<usize, CliError> {
    s.trim()
        .parse::<usize>()
        .map_err(|_| CliError::Parse(format!("expected a number, got '{s}'")))
}

fn parse_num_list(s: &str) -> Result<Vec<usize>, CliError> {
    s.split(',').map(parse_num).collect()
}

/// Prime factorization as (prime, exponent) pairs; empty for n = 1.
pub fn prime_exponents(mut n: u64) -> Vec<(u64, u32)> {
    let mut out = Vec::new();
    let mut d = 2u64;
    while d * d <= n {
        if n % d == 0 {
            let mut e = 0u32;
            while n % d == 0 {
                n /= d;
                e += 1;
            }
            out.push((d, e));
        }
        d += 1;
    }
    if n > 1 {
        out.push((n, 1));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn factorization() {
        assert_eq!(prime_exponents(1), vec![]);
        assert_eq!(prime_exponents(1024), vec![(2, 10)]);
        assert_eq!(prime_exponents(216), vec![(2, 3), (3, 3)]);
        assert_eq!(prime_exponents(30), vec![(2, 1), (3, 1), (5, 1)]);
    }

    #[test]
    fn cyclic_group_routes_to_chain_product() {
        let caps = Caps::default();
        let l = build_lattice_from_group_spec("cyclic:1024", caps).unwrap();
        assert_eq!(l.size(), 11);
        let l = build_lattice_from_group_spec("cyclic:12", caps).unwrap();
        assert_eq!(l.size(), 6); // [2] x [1]
        let l = build_lattice_from_group_spec("cyclic:30", caps).unwrap();
        assert_eq!(l.size(), 8); // boolean cube
    }

    #[test]
    fn elem_abelian_routes_to_subspaces() {
        let l = build_lattice_from_group_spec("elem-abelian:2^2", Caps::default()).unwrap();
        assert_eq!(l.size(), 5);
    }

    #[test]
    fn nonabelian_groups_route_to_subgroup_lattice() {
        let l = build_lattice_from_group_spec("S:3", Caps::default()).unwrap();
        assert_eq!(l.size(), 6);
        assert!(!l.has_trivial_action());
    }

    #[test]
    fn lattice_specs() {
        let caps = Caps::default();
        assert_eq!(
            build_lattice_from_lattice_spec("chain:3", caps).unwrap().size(),
            4
        );
        assert_eq!(
            build_lattice_from_lattice_spec("grid:2,3", caps).unwrap().size(),
            12
        );
        assert_eq!(
            build_lattice_from_lattice_spec("boolean:3", caps).unwrap().size(),
            8
        );
        assert_eq!(
            build_lattice_from_lattice_spec("subspaces:2,2", caps)
                .unwrap()
                .size(),
            5
        );
        assert!(build_lattice_from_lattice_spec("weird:1", caps).is_err());
    }

    #[test]
    fn exit_codes() {
        assert_eq!(CliError::Parse(String::new()).exit_code(), 1);
        assert_eq!(CliError::CapExceeded(String::new()).exit_code(), 2);
        assert_eq!(CliError::Overflow(String::new()).exit_code(), 3);
        assert_eq!(CliError::Io(String::new()).exit_code(), 4);
    }
}
