use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

#[derive(Parser, Debug, Serialize)]
#[command(name = "qshare", version, about = "Quantile shares for fair division of indivisible goods")]
pub struct Cli {
    /// Seed for every randomized step.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,

    /// Worker threads (default: all cores). Results do not depend on it.
    #[arg(long, global = true)]
    pub threads: Option<usize>,

    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    pub format: Format,

    /// Write the result here instead of stdout.
    #[arg(long, global = true)]
    pub output: Option<PathBuf>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Tsv,
}

#[derive(Subcommand, Debug, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    /// Quantile shares, satisfaction and value distributions.
    Quantile(QuantileArgs),
    /// Fair, maximin and round-robin allocations.
    #[command(subcommand)]
    Allocate(AllocateCmd),
    /// Maximin shares and their quantiles.
    Mms(MmsArgs),
    /// Veto lists.
    #[command(subcommand)]
    Veto(VetoCmd),
    /// Set-family and probability checks.
    #[command(subcommand)]
    Extremal(ExtremalCmd),
    /// Threshold searches, LP export and named instances.
    #[command(subcommand)]
    Lab(LabCmd),
    /// Run a reproduction check (`all` runs every one).
    Repro(ReproArgs),
}

#[derive(Args, Debug, Serialize)]
pub struct InstanceArg {
    /// Instance JSON file.
    #[arg(long)]
    pub instance: PathBuf,
}

#[derive(Args, Debug, Serialize)]
pub struct QuantileArgs {
    #[command(flatten)]
    pub instance: InstanceArg,
    /// 1-indexed agent.
    #[arg(long, default_value_t = 1)]
    pub agent: usize,
    /// Quantile level `p/q`; omitted prints the whole distribution.
    #[arg(long)]
    pub q: Option<String>,
    /// Bundle as comma-separated 1-indexed goods (empty string for ∅).
    #[arg(long)]
    pub bundle: Option<String>,
    /// Exact enumeration (the default).
    #[arg(long, conflicts_with = "samples")]
    pub exact: bool,
    /// Estimate satisfaction of `--bundle` by sampling instead.
    #[arg(long)]
    pub samples: Option<u64>,
    #[arg(long, default_value_t = 0.01)]
    pub delta: f64,
}

#[derive(Subcommand, Debug, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum AllocateCmd {
    /// First q-fair allocation, or an infeasibility certificate (exit 1).
    #[command(alias = "exhaustive")]
    Fair {
        #[command(flatten)]
        instance: InstanceArg,
        #[arg(long)]
        q: String,
    },
    /// Allocation maximizing the least satisfaction.
    #[command(alias = "maximin-satisfaction")]
    Maximin {
        #[command(flatten)]
        instance: InstanceArg,
        #[arg(long)]
        min_size: Option<usize>,
        #[arg(long)]
        max_size: Option<usize>,
    },
    /// Round-robin picking (additive and unit-demand valuations).
    #[command(alias = "round_robin")]
    RoundRobin {
        #[command(flatten)]
        instance: InstanceArg,
        /// Report fairness at this level.
        #[arg(long, default_value = "1/2")]
        q: String,
    },
    /// Per-agent report for a given allocation.
    Report {
        #[command(flatten)]
        instance: InstanceArg,
        /// Bundles separated by `;`, goods by `,`: `1,2;3;4`.
        #[arg(long)]
        allocation: String,
        #[arg(long)]
        q: String,
    },
    /// Largest common independent set of two matroids with its certificate.
    Intersection {
        /// JSON file `{"first": <matroid>, "second": <matroid>}`.
        #[arg(long)]
        matroids: PathBuf,
    },
    /// P[Σ w_j b_j ≤ p Σ w_j] against 0.14 (1 - p).
    Deviation {
        /// Comma-separated weights.
        #[arg(long)]
        weights: String,
        #[arg(long)]
        p: String,
    },
}

#[derive(Args, Debug, Serialize)]
pub struct MmsArgs {
    #[command(flatten)]
    pub instance: InstanceArg,
    /// 1-indexed agent; omitted reports every agent.
    #[arg(long)]
    pub agent: Option<usize>,
    /// Require matroid-rank valuations and use matroid intersection.
    #[arg(long)]
    pub matroid_fast: bool,
}

#[derive(Subcommand, Debug, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum VetoCmd {
    /// Veto lists induced at level q.
    #[command(alias = "emit-lists")]
    Lists {
        #[command(flatten)]
        instance: InstanceArg,
        #[arg(long)]
        q: String,
    },
    /// First allocation no list vetoes (exit 1 if none).
    Solve {
        /// Veto-lists JSON file.
        #[arg(long)]
        lists: PathBuf,
    },
    /// Random three-way equivalence checks.
    Suite {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        m: usize,
        #[arg(long, default_value_t = 100)]
        trials: u64,
    },
}

#[derive(Subcommand, Debug, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ExtremalCmd {
    /// Cover and clique sizes.
    #[command(alias = "emc-bounds")]
    Bounds {
        #[arg(long)]
        m: usize,
        #[arg(long)]
        k: usize,
        #[arg(long)]
        n: usize,
    },
    /// The two extremal families.
    #[command(alias = "emc-families")]
    Families {
        #[arg(long)]
        m: usize,
        #[arg(long)]
        k: usize,
        #[arg(long)]
        n: usize,
    },
    /// Random search for families above the bound without an n-matching.
    #[command(alias = "emc-falsify")]
    Falsify {
        #[arg(long)]
        m: usize,
        #[arg(long)]
        k: usize,
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 1000)]
        trials: u64,
    },
    /// Matching number of a family file `{"m": .., "k": .., "sets": [[1,2], ..]}`.
    #[command(alias = "nu")]
    Matching {
        #[arg(long)]
        family: PathBuf,
    },
    /// Rainbow matching across `{"m": .., "k": .., "families": [[[1,2], ..], ..]}`.
    Rainbow {
        #[arg(long)]
        families: PathBuf,
    },
    /// The k'-shadow of a family file.
    Shadow {
        #[arg(long)]
        family: PathBuf,
        #[arg(long)]
        k_prime: usize,
    },
    /// Kruskal–Katona implication on a family file.
    Kk {
        #[arg(long)]
        family: PathBuf,
        #[arg(long)]
        m_prime: usize,
        #[arg(long)]
        k_prime: usize,
    },
    /// min over t ≤ t_max of P[Bin(tn-1, 1/n) < t].
    Qn {
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 200)]
        t_max: usize,
        #[arg(long, default_value_t = 1e-15)]
        precision: f64,
    },
    /// P[Poisson(λ) ≤ λ].
    Poisson {
        #[arg(long)]
        lambda: String,
        #[arg(long, default_value_t = 1e-15)]
        precision: f64,
    },
    /// Binomial inequality at m = (k+1)n.
    Lemma9 {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        k: usize,
    },
    /// Layer-by-layer chain check on a 0/1 valuation.
    Chain {
        #[command(flatten)]
        instance: InstanceArg,
        #[arg(long, default_value_t = 1)]
        agent: usize,
    },
}

#[derive(Subcommand, Debug, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum LabCmd {
    /// Exhaustive profile search (exit 1 when none exists).
    Search {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        m: usize,
        /// Per-agent zero-allocation cap; defaults to n^(m-n+1)(n-1)^(n-1) - 1.
        #[arg(long)]
        budget: Option<String>,
        #[arg(long)]
        no_symmetry: bool,
        /// Give up after this many seconds (exit 3).
        #[arg(long)]
        time_limit: Option<u64>,
    },
    /// Write the integer program in LP format.
    Export {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        m: usize,
        #[arg(long)]
        budget: Option<String>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Print a named instance as instance JSON.
    Instance {
        #[arg(long)]
        name: String,
        #[arg(long)]
        n: Option<usize>,
        #[arg(long)]
        m: Option<usize>,
        #[arg(long)]
        epsilon: Option<String>,
    },
    /// Equal-size optimum against the unconstrained optimum.
    Gap {
        #[arg(long, default_value_t = 3)]
        n: usize,
        #[arg(long, default_value_t = 6)]
        m: usize,
        #[arg(long, default_value = "1/100")]
        epsilon: String,
        #[arg(long, default_value_t = 0)]
        slack: usize,
    },
}

#[derive(Args, Debug, Serialize)]
pub struct ReproArgs {
    /// Target name, or `all`.
    pub target: String,
}
