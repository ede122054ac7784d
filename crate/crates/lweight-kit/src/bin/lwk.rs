//! `lwk`: command-line front end with deterministic JSON output.

use clap::{Parser, Subcommand};
use lweight_kit::session::{error_value, Session, EXIT_ERROR};

#[derive(Parser)]
#[command(name = "lwk", about = "exact l-weight combinatorics", version)]
struct Cli {
    /// Lie type letter (A..G)
    #[arg(long = "type", default_value = "A", global = true)]
    type_letter: String,
    /// Rank
    #[arg(long, default_value_t = 1, global = true)]
    rank: usize,
    /// Ground field: q | zeta:L | one
    #[arg(long, default_value = "q", global = true)]
    field: String,
    /// Declared base symbols (comma separated); omit to allow any symbol
    #[arg(long, global = true)]
    symbols: Option<String>,
    /// Pretty-print the JSON output
    #[arg(long, global = true)]
    pretty: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// xi-factorize a root multiset
    Factor {
        #[arg(long)]
        roots: String,
        /// pre-existing Frobenius bases (comma separated)
        #[arg(long, default_value = "")]
        frob: String,
        /// shift step d_i
        #[arg(long, default_value_t = 1)]
        step: i64,
    },
    /// Apply T_w to an l-weight
    Braid {
        #[arg(long)]
        word: String,
        #[arg(long)]
        lweight: String,
    },
    /// The simple l-root at (node, param)
    Alpha {
        #[arg(long)]
        node: usize,
        #[arg(long)]
        param: String,
    },
    /// Resonant-order verdict for a tuple of dominant l-weights
    Resonant {
        /// l-weights separated by `;`
        #[arg(long)]
        tuple: String,
        #[arg(long, default_value = "strict")]
        strength: String,
    },
    /// xi-regularity of a positive product of fundamentals
    Regular {
        #[arg(long)]
        lweight: String,
    },
    /// Highest-l-weight verdict for an ordered tensor product
    HlwCheck {
        #[arg(long)]
        tuple: String,
    },
    /// Is the Weyl module a tensor product of fundamental modules
    WeylFund {
        #[arg(long)]
        lweight: String,
        /// irreducibility flags `w[i](a)=true,...`
        #[arg(long, default_value = "")]
        flags: String,
    },
    /// Elliptic-character equality
    BlockEq {
        #[arg(long)]
        lhs: String,
        #[arg(long)]
        rhs: String,
    },
    /// Tau-linking chain between same-block l-weights
    BlockLink {
        #[arg(long)]
        lhs: String,
        #[arg(long)]
        rhs: String,
    },
    /// Signed l-root-lattice membership with block-group certification
    LatticeMember {
        #[arg(long)]
        lweight: String,
    },
    /// The sl2 Weyl-module q-character ladder
    QcharSl2 {
        #[arg(long)]
        a: String,
        #[arg(long)]
        r: u32,
    },
    /// Braid-invariance lower bound for a fundamental module
    QcharFund {
        #[arg(long)]
        node: usize,
        #[arg(long)]
        a: String,
        #[arg(long, default_value_t = 100_000)]
        max_steps: usize,
    },
    /// The D_n node-2 fundamental q-character
    QcharDn2 {
        #[arg(long)]
        n: usize,
        /// order of the root of unity (omit for the session field)
        #[arg(long)]
        l: Option<u32>,
        #[arg(long, default_value = "a")]
        a: String,
    },
    /// Evaluate a generic l-weight at the session field
    Specialize {
        #[arg(long)]
        lweight: String,
    },
    /// First-level generation rank for sl2 evaluation factors `len@exp,...`
    OracleSl2 {
        #[arg(long)]
        l: u32,
        #[arg(long)]
        factors: String,
    },
}

fn main() {
    let cli = Cli::parse();
    let budget = std::env::var("LWK_BUDGET")
        .ok()
        .and_then(|s| s.parse::<usize>().ok())
        .unwrap_or(8);
    let symbols = cli
        .symbols
        .map(|s| s.split(',').map(|t| t.trim().to_string()).collect::<Vec<_>>());
    let session = match Session::new(&cli.type_letter, cli.rank, &cli.field, symbols, budget) {
        Ok(s) => s,
        Err(e) => {
            println!("{}", error_value(&e));
            std::process::exit(EXIT_ERROR);
        }
    };
    let result = match &cli.command {
        Command::Factor { roots, frob, step } => session.cmd_factor(roots, frob, *step),
        Command::Braid { word, lweight } => session.cmd_braid(word, lweight),
        Command::Alpha { node, param } => session.cmd_alpha(*node, param),
        Command::Resonant { tuple, strength } => session.cmd_resonant(tuple, strength),
        Command::Regular { lweight } => session.cmd_regular(lweight),
        Command::HlwCheck { tuple } => session.cmd_hlw_check(tuple),
        Command::WeylFund { lweight, flags } => session.cmd_weyl_fund(lweight, flags),
        Command::BlockEq { lhs, rhs } => session.cmd_block_eq(lhs, rhs),
        Command::BlockLink { lhs, rhs } => session.cmd_block_link(lhs, rhs),
        Command::LatticeMember { lweight } => session.cmd_lattice_member(lweight),
        Command::QcharSl2 { a, r } => session.cmd_qchar_sl2(a, *r),
        Command::QcharFund { node, a, max_steps } => {
            session.cmd_qchar_fund(*node, a, *max_steps)
        }
        Command::QcharDn2 { n, l, a } => session.cmd_qchar_dn2(*n, *l, a),
        Command::Specialize { lweight } => session.cmd_specialize(lweight),
        Command::OracleSl2 { l, factors } => session.cmd_oracle_sl2(*l, factors),
    };
    match result {
        Ok((value, code)) => {
            if cli.pretty {
                println!("{}", serde_json::to_string_pretty(&value).unwrap());
            } else {
                println!("{value}");
            }
            std::process::exit(code);
        }
        Err(e) => {
            println!("{}", error_value(&e));
            std::process::exit(EXIT_ERROR);
        }
    }
}
