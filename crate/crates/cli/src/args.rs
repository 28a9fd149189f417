use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Deserialize;

#[derive(Parser, Debug)]
#[command(name = "gauss-nclass", version, about = "Nonclassicality and entanglement of two-mode Gaussian states")]
pub struct Cli {
    /// JSON object whose keys fill in flags not given on the command line
    /// (flag names in snake_case, e.g. {"seed": 3, "count": 500}).
    #[arg(long, global = true, value_name = "FILE")]
    pub config: Option<PathBuf>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Sample the P function of the photon/coherent mixture on a grid.
    PfuncCut(PfuncCutArgs),
    /// Duan, P-positivity, LN and depth of one state.
    Measures(StateArgs),
    /// Bring a state to the form where P-positivity decides separability.
    Canonicalize(StateArgs),
    /// Monte Carlo depth vs LN study.
    McStudy(McStudyArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default, ValueEnum, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SliceKind {
    /// Joint function on Im α_a = Im α_b = 0.
    #[default]
    Joint,
    /// Reduced P function of mode a over its complex plane.
    MarginalA,
    /// Reduced P function of mode b over its complex plane.
    MarginalB,
}

#[derive(Args, Debug, Default, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PfuncCutArgs {
    /// Real part of the coherent amplitude β.
    #[arg(long, allow_hyphen_values = true)]
    pub beta: Option<f64>,
    /// Imaginary part of β.
    #[arg(long, allow_hyphen_values = true)]
    pub beta_im: Option<f64>,
    /// Weight of the single-photon branch, in [0, 1].
    #[arg(long)]
    pub p: Option<f64>,
    /// β = 2, p = 3/4.
    #[arg(long)]
    pub paper_params: bool,
    /// Exchange the branch weights, p → 1 − p.
    #[arg(long)]
    pub complementary: bool,
    #[arg(long, value_enum)]
    pub slice: Option<SliceKind>,
    /// Grid covers [−w, w] on each axis (default 4).
    #[arg(long)]
    pub half_width: Option<f64>,
    /// Samples per axis (default 161).
    #[arg(long)]
    pub points: Option<usize>,
    /// CSV output (default pfunc_cut.csv).
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// JSON summary output (default: CSV path with a .json extension).
    #[arg(long)]
    pub summary: Option<PathBuf>,
}

impl PfuncCutArgs {
    pub fn merge(self, cfg: Self) -> Self {
        Self {
            beta: self.beta.or(cfg.beta),
            beta_im: self.beta_im.or(cfg.beta_im),
            p: self.p.or(cfg.p),
            paper_params: self.paper_params || cfg.paper_params,
            complementary: self.complementary || cfg.complementary,
            slice: self.slice.or(cfg.slice),
            half_width: self.half_width.or(cfg.half_width),
            points: self.points.or(cfg.points),
            out: self.out.or(cfg.out),
            summary: self.summary.or(cfg.summary),
        }
    }
}

#[derive(Args, Debug, Default, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct StateArgs {
    /// State file: {"sigma": [[..4 rows..]]} or {"m1", "m2", "n1", "n2", "c1", "c2"}.
    #[arg(long, conflicts_with = "tmsv")]
    pub state: Option<PathBuf>,
    /// Two-mode squeezed vacuum with squeezing r instead of a file.
    #[arg(long)]
    pub tmsv: Option<f64>,
    /// Write the JSON here instead of stdout.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

impl StateArgs {
    pub fn merge(self, cfg: Self) -> Self {
        // one input source: a flag on the command line replaces both config inputs
        let (state, tmsv) =
            if self.state.is_some() || self.tmsv.is_some() { (self.state, self.tmsv) } else { (cfg.state, cfg.tmsv) };
        Self { state, tmsv, out: self.out.or(cfg.out) }
    }
}

#[derive(Args, Debug, Default, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct McStudyArgs {
    /// Default 1.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Number of sampled states, at least 100 (default 10000).
    #[arg(long)]
    pub count: Option<usize>,
    /// Only states with m1 = m2, n1 = n2, c1 = −c2.
    #[arg(long)]
    pub symmetric: bool,
    #[arg(long)]
    pub max_squeeze: Option<f64>,
    #[arg(long)]
    pub max_thermal: Option<f64>,
    #[arg(long)]
    pub max_local_squeeze: Option<f64>,
    /// Skip the random beam splitter and phase rotations.
    #[arg(long)]
    pub no_mix: bool,
    /// Study CSV (default study.csv).
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Relation report JSON (default study_report.json).
    #[arg(long)]
    pub report: Option<PathBuf>,
}

impl McStudyArgs {
    pub fn merge(self, cfg: Self) -> Self {
        Self {
            seed: self.seed.or(cfg.seed),
            count: self.count.or(cfg.count),
            symmetric: self.symmetric || cfg.symmetric,
            max_squeeze: self.max_squeeze.or(cfg.max_squeeze),
            max_thermal: self.max_thermal.or(cfg.max_thermal),
            max_local_squeeze: self.max_local_squeeze.or(cfg.max_local_squeeze),
            no_mix: self.no_mix || cfg.no_mix,
            out: self.out.or(cfg.out),
            report: self.report.or(cfg.report),
        }
    }
}
