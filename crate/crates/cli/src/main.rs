use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use propends::cli::{self, Format, LatticeArg, Report, RunConfig, SubgroupArg};
use propends::ends::Strategy;

#[derive(Parser)]
#[command(
    name = "propends",
    version,
    about = "Ends of pro-p groups, Kurosh data and modular Krull-Schmidt"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    common: Common,
}

#[derive(Args)]
struct Common {
    /// prime (defaults to 2 with a warning)
    #[arg(long, global = true)]
    p: Option<u32>,
    #[arg(long, global = true, default_value_t = 6)]
    depth: usize,
    #[arg(long, global = true, default_value_t = 20000)]
    max_cosets: usize,
    /// random Fitting trials before a Probabilistic certificate
    #[arg(long, global = true, default_value_t = 64)]
    trials: usize,
    /// largest endomorphism ring scanned exhaustively
    #[arg(long, global = true, default_value_t = 1 << 22)]
    enum_budget: u64,
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    #[arg(long, global = true, value_enum, default_value_t = OutFormat::Text)]
    format: OutFormat,
    #[arg(long, global = true, env = "PROPENDS_CACHE_DIR")]
    cache_dir: Option<PathBuf>,
    #[arg(long, global = true)]
    no_cache: bool,
    /// print wall-clock time to stderr
    #[arg(long, global = true)]
    timing: bool,
}

#[derive(Clone, Copy, ValueEnum)]
enum OutFormat {
    Text,
    Json,
}

#[derive(Clone, Copy, ValueEnum)]
enum ChainStrategy {
    Mixed,
    Frattini,
    IndexP,
}

#[derive(Subcommand)]
enum Command {
    /// Estimate the number of ends from the transfer colimit
    Ends {
        expr: String,
        #[arg(long, value_enum, default_value_t = ChainStrategy::Mixed)]
        strategy: ChainStrategy,
    },
    /// Kurosh decomposition data of a finite-index subgroup of a free product
    Kurosh {
        expr: String,
        /// kernel of the map to Z/m, e.g. "a->1,b->1" or "a->1:0,b->0:1"
        #[arg(long, conflicts_with = "subgroup_gens")]
        subgroup_kernel: Option<String>,
        /// modulus m of the kernel map (default p)
        #[arg(long)]
        modulus: Option<u32>,
        /// comma-separated generating words
        #[arg(long)]
        subgroup_gens: Option<String>,
    },
    /// Krull-Schmidt decomposition of a module over a finite p-group
    Decompose {
        #[arg(long)]
        group: String,
        /// augmentation | regular | trivial | permutation:<words> | jideal:<words> | restricted-augmentation:<words>
        #[arg(long, default_value = "augmentation")]
        module: String,
    },
    /// Classify a Z[C_p]-lattice as Z[C_p]^a + I^b + Z^c
    ClassifyLattice {
        /// σ with rows separated by ';'
        #[arg(long, conflicts_with = "standard")]
        sigma: Option<String>,
        /// "a,b,c": build the standard lattice and conjugate it with a seeded unimodular matrix
        #[arg(long)]
        standard: Option<String>,
    },
    /// Explicit basis of the index-p cyclic cover of the free group of rank r
    Schreier { r: usize },
    /// Run the built-in invariant suite
    Selftest,
}

fn config(c: &Common) -> RunConfig {
    RunConfig {
        p: c.p.unwrap_or(2),
        p_defaulted: c.p.is_none(),
        depth: c.depth,
        max_cosets: c.max_cosets,
        trials: c.trials,
        enum_budget: c.enum_budget,
        seed: c.seed,
        format: match c.format {
            OutFormat::Text => Format::Text,
            OutFormat::Json => Format::Json,
        },
        cache_dir: if c.no_cache { None } else { c.cache_dir.clone() },
    }
}

fn run(cmd: &Command, cfg: &RunConfig) -> propends::Result<Report> {
    match cmd {
        Command::Ends { expr, strategy } => {
            let s = match strategy {
                ChainStrategy::Mixed => Strategy::Mixed,
                ChainStrategy::Frattini => Strategy::Frattini,
                ChainStrategy::IndexP => Strategy::IndexP,
            };
            cli::run_ends(expr, cfg, s)
        }
        Command::Kurosh {
            expr,
            subgroup_kernel,
            modulus,
            subgroup_gens,
        } => {
            let h = match (subgroup_kernel, subgroup_gens) {
                (Some(k), _) => SubgroupArg::Kernel {
                    spec: k,
                    modulus: *modulus,
                },
                (None, Some(g)) => SubgroupArg::Generators(g),
                (None, None) => {
                    return Err(propends::Error::Input(
                        "give --subgroup-kernel or --subgroup-gens".into(),
                    ))
                }
            };
            cli::run_kurosh(expr, &h, cfg)
        }
        Command::Decompose { group, module } => cli::run_decompose(group, module, cfg),
        Command::ClassifyLattice { sigma, standard } => {
            let arg = match (sigma, standard) {
                (Some(s), _) => LatticeArg::Sigma(s),
                (None, Some(t)) => {
                    let v: Vec<usize> = t
                        .split(',')
                        .map(|x| {
                            x.trim()
                                .parse()
                                .map_err(|_| propends::Error::Input(format!("bad multiplicity '{x}'")))
                        })
                        .collect::<propends::Result<_>>()?;
                    let [a, b, c] = v[..] else {
                        return Err(propends::Error::Input("--standard takes three numbers a,b,c".into()));
                    };
                    LatticeArg::Standard { a, b, c }
                }
                (None, None) => return Err(propends::Error::Input("give --sigma or --standard".into())),
            };
            cli::run_classify_lattice(&arg, cfg)
        }
        Command::Schreier { r } => cli::run_schreier(*r, cfg),
        Command::Selftest => cli::run_selftest(cfg),
    }
}

fn main() -> ExitCode {
    let args = match Cli::try_parse() {
        Ok(a) => a,
        Err(e) => {
            let _ = e.print();
            // usage mistakes are input errors
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    let cfg = config(&args.common);
    if cfg.p_defaulted {
        eprintln!("warning: --p not given, using p = 2");
    }
    let start = Instant::now();
    let result = run(&args.command, &cfg);
    if args.common.timing {
        eprintln!("elapsed: {} ms", start.elapsed().as_millis());
    }
    match result {
        Ok(report) => {
            print!("{}", report.render(cfg.format));
            if report.all_pass() {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(cli::EXIT_CHECK_FAILED as u8)
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            if let propends::Error::Syntax { start, end, .. } = &e {
                if let Some(src) = source_text(&args.command) {
                    eprintln!("  {src}");
                    eprintln!("  {}{}", " ".repeat(*start), "^".repeat((end - start).max(1)));
                }
            }
            ExitCode::from(cli::exit_code(&e) as u8)
        }
    }
}

fn source_text(cmd: &Command) -> Option<&str> {
    match cmd {
        Command::Ends { expr, .. } | Command::Kurosh { expr, .. } => Some(expr),
        Command::Decompose { group, .. } => Some(group),
        _ => None,
    }
}
