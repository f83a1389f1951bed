//! Library surface of the CLI: argument schema, file formats, command
//! handlers, and report rendering. The binary in main.rs is a thin shell so
//! integration tests can drive the same code paths directly.

pub mod commands;
pub mod files;
pub mod reports;

use std::path::PathBuf;

use clap::{Parser, Subcommand};

#[derive(Parser)]
#[command(
    name = "invariant-forge",
    version,
    about = "Exact computations on finite-dimensional presented structures"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,

    /// Structure file; overrides the job's structure reference
    #[arg(long, global = true, value_name = "PATH")]
    pub structure: Option<PathBuf>,

    /// Job file with command-specific parameters
    #[arg(long, global = true, value_name = "PATH")]
    pub job: Option<PathBuf>,

    /// Closure degree bound as P,Q
    #[arg(long, global = true, value_name = "P,Q")]
    pub bound: Option<String>,

    /// Identity degree
    #[arg(long, global = true, value_name = "D")]
    pub degree: Option<usize>,

    /// Report rendering
    #[arg(long, global = true, value_parser = ["json", "text"], default_value = "json")]
    pub format: String,

    /// Seed for randomized harnesses; the commands here are deterministic,
    /// the flag is accepted so scripted sweeps can pass one uniformly
    #[arg(long, global = true, value_name = "N")]
    pub seed: Option<u64>,

    /// Evaluation budget in tensor entries touched
    #[arg(long, global = true, value_name = "N")]
    pub budget: Option<u64>,

    /// Allow trace-identity evaluations beyond the built-in size gate
    #[arg(long, global = true)]
    pub force_large: bool,
}

#[derive(Subcommand)]
pub enum Command {
    /// Grow the tensor closure of a structure up to a degree bound
    Closure,
    /// Closure plus the field-of-invariants report on X^{0,0}
    InvariantField,
    /// Lie algebra of derivation-like symmetries of a structure
    AutLie,
    /// Multilinear identity space at a fixed degree
    Identities,
    /// Identity space for homogeneous variables of prescribed grades
    GradedIdentities,
    /// Evaluate expression bindings and report labeled results
    Eval,
    /// Build a twisted group algebra structure file from a cocycle
    TwistedGroup,
    /// Commutation scalars, mu, and the base field of the generic form
    GenericForm,
    /// Build a Taft algebra structure file from (n, a, b)
    TaftBuild,
    /// Recover (n, a-class, b) from a Taft-shaped structure
    TaftExtract,
    /// Build a product-of-Taft-algebras deformation and its invariants
    TaftProduct,
    /// Twist a cocycle by a Galois automorphism and compare mu
    GaloisTwist,
    /// Product-of-traces invariant over a cycle partition
    Procesi,
    /// Formanek alternating trace polynomial f (or the pair form D)
    Formanek,
}
