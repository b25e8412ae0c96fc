//! wittkit: construction, decision and verification workflows for exact
//! isometries of quadratic forms, over JSON files.
//!
//! Exit codes: 0 = success / verified-true, 1 = verified-negative,
//! 2 = error (malformed input, violated hypothesis, missing file).

mod commands;
mod files;

use clap::{Parser, Subcommand};
use std::path::PathBuf;

#[derive(Parser)]
#[command(name = "wittkit", version, about = "Exact isometry toolkit for quadratic forms")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Bring a nondegenerate isotropic form (dim >= 5) into standard shape.
    FormNormalize {
        /// Form file: {"gram": [...]} or {"n": ..., "alphas": [...]}
        form: PathBuf,
        /// Maximum coordinate height for the isotropic-vector search
        #[arg(long, default_value_t = 5)]
        height_bound: u64,
        /// Optional isotropic witness "x1,...,xn" (rational entries)
        #[arg(long)]
        witness: Option<String>,
        /// Certificate output path
        #[arg(long, short, default_value = "normalize.cert.json")]
        output: PathBuf,
    },
    /// Extend a system map a_i -> b_i to an isometry over Q.
    WittExtend {
        form: PathBuf,
        /// Vectors file: {"sources": [...], "targets": [...]}
        vectors: PathBuf,
        /// Force det +1 (and trivial spinor norm when the sources avoid the
        /// hyperbolic plane of a standard-shape form)
        #[arg(long)]
        special: bool,
        #[arg(long, short, default_value = "witt.cert.json")]
        output: PathBuf,
    },
    /// Transport a residue system by an orthogonal matrix mod p^N.
    Lift {
        form: PathBuf,
        /// Vectors file: {"sources": [...], "targets": [...]} with
        /// p-integral entries
        transporter: PathBuf,
        #[arg(long)]
        prime: u64,
        #[arg(long)]
        precision: u32,
        /// Require determinant +1 (needs 2m+1 <= n)
        #[arg(long)]
        special: bool,
        #[arg(long, short, default_value = "lift.cert.json")]
        output: PathBuf,
    },
    /// Decide the orbit criterion for two vectors mod p^N.
    OrbitTest {
        form: PathBuf,
        /// Vectors file: {"a": [...], "b": [...]}
        vectors: PathBuf,
        #[arg(long)]
        prime: u64,
        #[arg(long)]
        precision: u32,
        #[arg(long, short, default_value = "orbit.cert.json")]
        output: PathBuf,
    },
    /// Decompose a spinor-kernel element into four stabilizer factors.
    Borovoi {
        form: PathBuf,
        /// Orthogonal-map file for the element
        element: PathBuf,
        /// Additionally produce the mod-p^N quadruple: --local P N
        #[arg(long, num_args = 2, value_names = ["P", "N"])]
        local: Option<Vec<u64>>,
        #[arg(long, short, default_value = "borovoi.cert.json")]
        output: PathBuf,
    },
    /// Decide strong approximation for the quadric q = value.
    Sap {
        form: PathBuf,
        /// The quadric value (nonzero rational)
        value: String,
        /// Comma-separated places, e.g. "real,7"
        places: String,
        /// Comma-separated rational witness point on the quadric
        witness: String,
        #[arg(long, short, default_value = "sap.cert.json")]
        output: PathBuf,
    },
    /// Local invariants (discriminant, Hasse, Witt index) at the relevant places.
    Invariants {
        form: PathBuf,
        #[arg(long, default_value_t = 1_000_000)]
        factor_bound: u64,
        #[arg(long, short, default_value = "invariants.cert.json")]
        output: PathBuf,
    },
    /// Re-check every claim in a certificate file.
    Verify {
        certificate: PathBuf,
        #[arg(long, default_value_t = 1_000_000)]
        factor_bound: u64,
    },
    /// Run the property suites at a reduced size.
    Selftest {
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

fn main() {
    let cli = Cli::parse();
    let code = match commands::dispatch(cli.command) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            2
        }
    };
    std::process::exit(code);
}
