use clap::{Args, Parser, Subcommand};
use std::path::PathBuf;

#[derive(Debug, Parser)]
#[command(name = "porphyry", version, about = "Definition systems, Porphyry trees and finite-model entailment")]
pub struct Cli {
    /// Emit JSON instead of text.
    #[arg(long, global = true)]
    pub json: bool,

    /// Largest number of candidate models enumerated for one universe size.
    #[arg(long, global = true, env = "PORPHYRY_CEILING", value_parser = clap::value_parser!(u64).range(1..))]
    pub ceiling: Option<u64>,

    /// Largest universe searched by bounded entailment outside the monadic
    /// fragment.
    #[arg(long, global = true, value_parser = clap::value_parser!(u64).range(1..))]
    pub bound: Option<u64>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Validate the definition system of a file.
    Check {
        file: PathBuf,
    },
    /// Genus/species tree of the defined classes.
    Tree {
        file: PathBuf,
        /// Graphviz output.
        #[arg(long)]
        dot: bool,
    },
    /// Classify a formula as difference, property or accident of a class.
    Classify {
        file: PathBuf,
        #[arg(long)]
        species: String,
        #[arg(long)]
        formula: String,
        #[arg(long, default_value = "x")]
        var: String,
    },
    /// Check whether one formula entails another.
    Entail {
        #[arg(long)]
        lhs: String,
        #[arg(long)]
        rhs: String,
        #[command(flatten)]
        sig: SigArg,
    },
    /// Find a model of a formula.
    Sat {
        #[arg(long)]
        formula: String,
        #[command(flatten)]
        sig: SigArg,
    },
    /// Monadic normal form with respect to one free variable.
    Normalize {
        #[arg(long)]
        formula: String,
        #[command(flatten)]
        sig: SigArg,
        #[arg(long, default_value = "x")]
        var: String,
    },
    /// Extensions of the defined classes in a model.
    Extensions {
        file: PathBuf,
        #[arg(long)]
        model: String,
    },
    /// Rebuild definitions from a family of sets over a model.
    Reconstruct {
        file: PathBuf,
        #[arg(long)]
        model: String,
        /// Inline `A={0,1};B={0}`, or `@NAME` for a family block of the file.
        #[arg(long)]
        family: String,
    },
    /// Flag the asserted sentences of a file that entail all the others.
    Generators {
        file: PathBuf,
    },
    /// Generate demo data.
    Demo {
        #[command(subcommand)]
        which: Demo,
    },
    /// Choose the closest genus of a class among candidates.
    Proximate {
        file: PathBuf,
        #[arg(long)]
        species: String,
        #[arg(long, value_delimiter = ',', required = true)]
        candidates: Vec<String>,
    },
}

#[derive(Debug, Args)]
pub struct SigArg {
    /// Signature body such as `pred M1/1; pred R/2; const c`. Inferred from
    /// the formulas when omitted (constants are then read as variables).
    #[arg(long)]
    pub sig: Option<String>,
}

#[derive(Debug, Subcommand)]
pub enum Demo {
    /// Every binary operation table on carriers of size 1..=N, with
    /// monoid, group and abelian group definitions.
    Magma {
        #[arg(long, value_parser = clap::value_parser!(u64).range(1..=3))]
        max_size: u64,
    },
}
