//! Command-line front end: build lattices and reduced contexts, count
//! transfer systems, export context files, run the brute-force oracle, and
//! evaluate the closed-form formulas and bounds.

use std::fs;
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_bigint::BigUint;

use trfca::formats;
use trfca::pipeline::{build_lattice, Caps, CliError, LoadedContext, Source};
use trfca::report::{rational_with_decimal, CountReport};
use trfca_core::cbo;
use trfca_core::context::FormalContext;
use trfca_core::formulas::{self, ExactRational, LatticeFamily};
use trfca_core::oracle;

#[derive(Parser)]
#[command(
    name = "trfca",
    version,
    about = "Count transfer systems on finite group lattices via formal concept analysis"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Build the reduced formal context and write it (FIMI or PBM)
    Context(ContextArgs),
    /// Count the formal concepts (= transfer systems) of a context
    Count(CountArgs),
    /// Print the exact density and codensity of a context
    Density(DensityArgs),
    /// Build a context and export it to a file in a chosen format
    Export(ExportArgs),
    /// Brute-force enumeration and cross-checks on small lattices
    Oracle(OracleArgs),
    /// Closed-form codensities, irreducible counts, bounds, and limits
    Formula(FormulaArgs),
    /// Largest contranomial-scale size contained in a context
    Complexity(ComplexityArgs),
}

#[derive(Args)]
struct SourceArgs {
    /// Group spec: cyclic:N | elem-abelian:p^n | S:n | A:n | D:n | Q:8 |
    /// perm:(cycles);(cycles)
    #[arg(long)]
    group: Option<String>,
    /// Lattice spec: chain:n | grid:n1,n2,... | boolean:k | subspaces:p,n
    #[arg(long)]
    lattice: Option<String>,
    /// FIMI .dat file to read, or - for stdin
    #[arg(long)]
    input: Option<String>,
    /// Override the group-order and subspace-count caps
    #[arg(long)]
    cap: Option<usize>,
}

impl SourceArgs {
    fn source(&self) -> Result<Source, CliError> {
        Source::from_flags(self.group.clone(), self.lattice.clone(), self.input.clone())
    }

    fn caps(&self) -> Caps {
        let mut caps = Caps::default();
        if let Some(cap) = self.cap {
            caps.group_order = cap;
            caps.subspace_count = cap;
        }
        caps
    }

    fn load(&self) -> Result<LoadedContext, CliError> {
        trfca::pipeline::load_context(&self.source()?, self.caps())
    }
}

#[derive(Copy, Clone, PartialEq, Eq, ValueEnum)]
enum Format {
    Fimi,
    Pbm,
}

#[derive(Args)]
struct ContextArgs {
    #[command(flatten)]
    source: SourceArgs,
    /// Output path; stdout when omitted
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Fimi)]
    format: Format,
    /// Apply the decreasing row-sort heuristic before writing
    #[arg(long)]
    sorted: bool,
}

#[derive(Args)]
struct CountArgs {
    #[command(flatten)]
    source: SourceArgs,
    /// Worker threads; defaults to the available parallelism
    #[arg(long)]
    threads: Option<usize>,
    /// Breadth-first split depth; defaults to min(7, rows/4)
    #[arg(long)]
    depth: Option<usize>,
    /// Machine-readable report
    #[arg(long)]
    json: bool,
    /// List the concepts instead of counting (requires --limit)
    #[arg(long)]
    enumerate: bool,
    /// Maximum number of concepts to enumerate
    #[arg(long)]
    limit: Option<usize>,
}

#[derive(Args)]
struct DensityArgs {
    #[command(flatten)]
    source: SourceArgs,
}

#[derive(Args)]
struct ExportArgs {
    #[command(flatten)]
    source: SourceArgs,
    #[arg(long, value_enum)]
    format: Format,
    #[arg(long)]
    out: PathBuf,
    #[arg(long)]
    sorted: bool,
}

#[derive(Args)]
struct OracleArgs {
    #[command(subcommand)]
    action: OracleAction,
}

#[derive(Subcommand)]
enum OracleAction {
    /// Number of transfer systems by exhaustive search
    Count(OracleSourceArgs),
    /// List every system as its arrow set
    List(OracleSourceArgs),
    /// Run the cross-module identity suite, one pass/fail line per property
    Verify(OracleSourceArgs),
}

#[derive(Args)]
struct OracleSourceArgs {
    #[arg(long)]
    group: Option<String>,
    #[arg(long)]
    lattice: Option<String>,
    /// Saturated transfer systems only
    #[arg(long)]
    saturated: bool,
    /// Orbit cap (family cap when --saturated)
    #[arg(long)]
    cap: Option<usize>,
}

#[derive(Args)]
struct FormulaArgs {
    #[command(subcommand)]
    which: FormulaCmd,
}

#[derive(Subcommand)]
enum FormulaCmd {
    /// Codensity of the chain lattice [n]
    RhoChain { n: u64 },
    /// Codensity of [n] x [m]
    RhoGrid { n: u64, m: u64 },
    /// Codensity of [n1] x [n2] x ... (comma-separated exponents)
    RhoCyclic { ns: String },
    /// Codensity of the Boolean lattice with k atoms
    RhoBoolean { k: u64 },
    /// Codensity of the subspace lattice of F_p^n
    RhoElemAbelian { p: u64, n: u64 },
    /// Closed-form irreducible count: family in
    /// chain|grid|cyclic|boolean|elem-abelian, params comma-separated
    JCount { family: String, params: String },
    /// Trivial and Schütt bounds for a context file
    Bounds {
        #[arg(long)]
        input: String,
        /// Also print the contranomial-freeness bound for this k
        #[arg(long)]
        k: Option<u64>,
    },
    /// Contranomial search on a context file
    Complexity {
        #[arg(long)]
        input: String,
        #[arg(long)]
        budget: Option<u64>,
    },
    /// The conjectured limiting codensity (2^k - 1)/6^k, optionally checked
    /// against the factorized evaluation at [n]^k
    Conjecture {
        k: u64,
        #[arg(long)]
        n: Option<u64>,
        /// Tolerance, as num/den or a decimal (default 1/1000)
        #[arg(long)]
        tol: Option<String>,
    },
}

#[derive(Args)]
struct ComplexityArgs {
    #[arg(long)]
    input: String,
    #[arg(long)]
    budget: Option<u64>,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            // help/version requests are not errors
            if e.use_stderr() {
                eprintln!("{e}");
                return ExitCode::from(1);
            }
            print!("{e}");
            return ExitCode::SUCCESS;
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Context(args) => write_context(
            &args.source,
            args.format,
            args.sorted,
            args.out.as_deref(),
        ),
        Command::Count(args) => run_count(args),
        Command::Density(args) => run_density(args),
        Command::Export(args) => write_context(
            &args.source,
            args.format,
            args.sorted,
            Some(args.out.as_path()),
        ),
        Command::Oracle(args) => run_oracle(args),
        Command::Formula(args) => run_formula(args.which),
        Command::Complexity(args) => run_complexity(&args.input, args.budget),
    }
}

fn write_context(
    source: &SourceArgs,
    format: Format,
    sorted: bool,
    out: Option<&std::path::Path>,
) -> Result<(), CliError> {
    let loaded = source.load()?;
    let ctx = if sorted {
        loaded.ctx.sort_rows_for_cbo()
    } else {
        loaded.ctx
    };
    let payload = match format {
        Format::Fimi => formats::export_fimi(&ctx),
        Format::Pbm => formats::export_pbm(&ctx),
    };
    match out {
        Some(path) => fs::write(path, payload)?,
        None => {
            std::io::stdout().write_all(payload.as_bytes())?;
        }
    }
    eprintln!(
        "context {} built in {} ms",
        ctx.shape(),
        loaded.t_context_ms
    );
    Ok(())
}

fn run_count(args: CountArgs) -> Result<(), CliError> {
    let loaded = args.source.load()?;
    let ctx = &loaded.ctx;

    if args.enumerate {
        let limit = args
            .limit
            .ok_or_else(|| CliError::Parse("--enumerate requires --limit <k>".into()))?;
        let concepts = cbo::enumerate_concepts(ctx, limit)
            .map_err(|e| CliError::CapExceeded(e.to_string()))?;
        for c in &concepts {
            let extent: Vec<String> = c.extent.ones().map(|i| i.to_string()).collect();
            let intent: Vec<String> = c.intent.ones().map(|j| j.to_string()).collect();
            println!("({{{}}}, {{{}}})", extent.join(","), intent.join(","));
        }
        eprintln!("{} concepts", concepts.len());
        return Ok(());
    }

    // a context with no cells means no irreducibles: the one-element lattice
    let (count, t_count_ms) = if ctx.cells() == 0 {
        (1u64, 0u128)
    } else {
        let sorted = ctx.sort_rows_for_cbo();
        let threads = args.threads.unwrap_or_else(default_threads);
        let depth = args
            .depth
            .unwrap_or_else(|| default_split_depth(sorted.n_objects()));
        let start = Instant::now();
        let count = cbo::count_concepts(&sorted, threads, depth)?;
        (count, start.elapsed().as_millis())
    };

    let report = CountReport::from_context(ctx, count, loaded.t_context_ms, t_count_ms);
    if args.json {
        println!("{}", report.to_json());
    } else {
        print!("{}", report.human());
    }
    Ok(())
}

fn default_threads() -> usize {
    std::thread::available_parallelism()
        .map(|n| n.get())
        .unwrap_or(1)
}

fn default_split_depth(rows: usize) -> usize {
    (rows / 4).min(7)
}

fn run_density(args: DensityArgs) -> Result<(), CliError> {
    let loaded = args.source.load()?;
    let density = loaded
        .ctx
        .density()
        .map_err(|e| CliError::Parse(e.to_string()))?;
    let codensity = loaded.ctx.codensity().expect("nonempty");
    println!("context: {}", loaded.ctx.shape());
    println!("density: {}", rational_with_decimal(&density));
    println!("codensity: {}", rational_with_decimal(&codensity));
    Ok(())
}

fn oracle_lattice(args: &OracleSourceArgs) -> Result<trfca_core::GLattice, CliError> {
    let source = Source::from_flags(args.group.clone(), args.lattice.clone(), None)?;
    build_lattice(&source, Caps::default())
}

fn run_oracle(args: OracleArgs) -> Result<(), CliError> {
    match args.action {
        OracleAction::Count(src) => {
            let lattice = oracle_lattice(&src)?;
            let systems = oracle_enumerate(&lattice, &src)?;
            println!("{}", systems.len());
            Ok(())
        }
        OracleAction::List(src) => {
            let lattice = oracle_lattice(&src)?;
            let systems = oracle_enumerate(&lattice, &src)?;
            for s in &systems {
                let arrows: Vec<String> = s
                    .nontrivial_pairs()
                    .into_iter()
                    .map(|(x, y)| format!("{x}->{y}"))
                    .collect();
                println!("{{{}}}", arrows.join(", "));
            }
            eprintln!("{} systems", systems.len());
            Ok(())
        }
        OracleAction::Verify(src) => {
            let lattice = oracle_lattice(&src)?;
            let cap = src.cap.unwrap_or(oracle::DEFAULT_ORBIT_CAP);
            let items = oracle::verify_identities(&lattice, cap)?;
            let mut failed = 0;
            for item in &items {
                let status = if item.pass { "PASS" } else { "FAIL" };
                if item.detail.is_empty() {
                    println!("{status} {}", item.name);
                } else {
                    println!("{status} {} ({})", item.name, item.detail);
                }
                if !item.pass {
                    failed += 1;
                }
            }
            if failed > 0 {
                return Err(CliError::Parse(format!("{failed} identities failed")));
            }
            Ok(())
        }
    }
}

fn oracle_enumerate(
    lattice: &trfca_core::GLattice,
    src: &OracleSourceArgs,
) -> Result<Vec<oracle::GRelation>, CliError> {
    if src.saturated {
        let cap = src.cap.unwrap_or(oracle::DEFAULT_SATURATED_CAP);
        Ok(oracle::enumerate_saturated_with_cap(lattice, cap)?)
    } else {
        let cap = src.cap.unwrap_or(oracle::DEFAULT_ORBIT_CAP);
        Ok(oracle::enumerate_transfer_systems_with_cap(lattice, cap)?)
    }
}

fn print_rational(label: &str, value: &ExactRational) {
    println!("{label}: {}", rational_with_decimal(value));
}

fn run_formula(cmd: FormulaCmd) -> Result<(), CliError> {
    let map_err = |e: formulas::FormulaError| CliError::Parse(e.to_string());
    match cmd {
        FormulaCmd::RhoChain { n } => {
            print_rational("rho", &formulas::rho_chain(n).map_err(map_err)?);
        }
        FormulaCmd::RhoGrid { n, m } => {
            print_rational("rho", &formulas::rho_grid(n, m).map_err(map_err)?);
        }
        FormulaCmd::RhoCyclic { ns } => {
            let ns = parse_u64_list(&ns)?;
            print_rational("rho", &formulas::rho_cyclic(&ns).map_err(map_err)?);
        }
        FormulaCmd::RhoBoolean { k } => {
            print_rational("rho", &formulas::rho_boolean(k).map_err(map_err)?);
        }
        FormulaCmd::RhoElemAbelian { p, n } => {
            if p > 1 && !is_prime(p) {
                eprintln!("warning: p = {p} is not prime; evaluating the q-analog");
            }
            print_rational("rho", &formulas::rho_elem_abelian(p, n).map_err(map_err)?);
        }
        FormulaCmd::JCount { family, params } => {
            let params_list = parse_u64_list(&params)?;
            let family = match (family.as_str(), params_list.as_slice()) {
                ("chain", [n]) => LatticeFamily::Chain { n: *n },
                ("grid", [n, m]) => LatticeFamily::Grid { n: *n, m: *m },
                ("cyclic", ns) if !ns.is_empty() => LatticeFamily::Cyclic { ns: ns.to_vec() },
                ("boolean", [k]) => LatticeFamily::Boolean { k: *k },
                ("elem-abelian", [p, n]) => LatticeFamily::ElemAbelian { p: *p, n: *n },
                _ => {
                    return Err(CliError::Parse(format!(
                        "unknown family/params: {family} {params}"
                    )))
                }
            };
            println!("{}", formulas::j_count(&family).map_err(map_err)?);
        }
        FormulaCmd::Bounds { input, k } => {
            let ctx = load_context_file(&input)?;
            let ones = ctx.ones();
            println!("rows: {}", ctx.n_objects());
            println!("cols: {}", ctx.n_attributes());
            println!("ones: {ones}");
            println!(
                "trivial_bound: {}",
                formulas::trivial_bound(ctx.n_objects() as u64, ctx.n_attributes() as u64)
            );
            println!(
                "schuett_bound: {}",
                formulas::schuett_bound(&BigUint::from(ones))
            );
            if let Some(k) = k {
                println!(
                    "ncfree_bound(k={k}): {}",
                    formulas::ncfree_bound(k, ctx.n_objects() as u64)
                );
            }
        }
        FormulaCmd::Complexity { input, budget } => {
            run_complexity(&input, budget)?;
        }
        FormulaCmd::Conjecture { k, n, tol } => {
            let value = formulas::conjectured_limit(k);
            print_rational("conjectured_limit", &value);
            if let Some(n) = n {
                let tol = match tol {
                    Some(t) => parse_rational(&t)?,
                    None => ExactRational::new(1.into(), 1000.into()),
                };
                let ok = formulas::limit_table_check(k, n, &tol).map_err(map_err)?;
                println!("within_tol_at_n_{n}: {ok}");
            }
        }
    }
    Ok(())
}

fn run_complexity(input: &str, budget: Option<u64>) -> Result<(), CliError> {
    let ctx = load_context_file(input)?;
    let budget = budget.unwrap_or(10_000_000);
    let result = formulas::contranomial_max_k(&ctx, budget);
    println!("complexity: {}", result.k);
    println!("exact: {}", result.exact);
    println!("nodes: {}", result.nodes_used);
    if !result.exact {
        eprintln!("budget exhausted; {} is only a lower bound", result.k);
    }
    Ok(())
}

fn load_context_file(path: &str) -> Result<FormalContext, CliError> {
    let text = if path == "-" {
        use std::io::Read;
        let mut buf = String::new();
        std::io::stdin().read_to_string(&mut buf)?;
        buf
    } else {
        fs::read_to_string(path)?
    };
    Ok(formats::import_fimi(&text)?)
}

fn parse_u64_list(s: &str) -> Result<Vec<u64>, CliError> {
    s.split(',')
        .map(|t| {
            t.trim()
                .parse::<u64>()
                .map_err(|_| CliError::Parse(format!("expected a number, got '{t}'")))
        })
        .collect()
}

/// Accepts `num/den` or a plain decimal like `0.001`.
fn parse_rational(s: &str) -> Result<ExactRational, CliError> {
    if let Some((num, den)) = s.split_once('/') {
        let num: i64 = num
            .trim()
            .parse()
            .map_err(|_| CliError::Parse(format!("bad numerator '{num}'")))?;
        let den: i64 = den
            .trim()
            .parse()
            .map_err(|_| CliError::Parse(format!("bad denominator '{den}'")))?;
        if den == 0 {
            return Err(CliError::Parse("zero denominator".into()));
        }
        return Ok(ExactRational::new(num.into(), den.into()));
    }
    let (int_part, frac_part) = s.split_once('.').unwrap_or((s, ""));
    let int: i64 = int_part
        .parse()
        .map_err(|_| CliError::Parse(format!("bad number '{s}'")))?;
    let mut value = ExactRational::from_integer(int.into());
    if !frac_part.is_empty() {
        let digits: i64 = frac_part
            .parse()
            .map_err(|_| CliError::Parse(format!("bad number '{s}'")))?;
        let scale = 10i64.pow(frac_part.len() as u32);
        value += ExactRational::new(digits.into(), scale.into());
    }
    Ok(value)
}

fn is_prime(p: u64) -> bool {
    if p < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= p {
        if p % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}
