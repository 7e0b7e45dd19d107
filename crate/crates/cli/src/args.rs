use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use osfp_core::cardgame::DEFAULT_NODE_BUDGET;
use osfp_core::league::{GateParams, OpponentRule};
use osfp_core::mcts::{MctsParams, RolloutMixParams};
use osfp_core::policy::PgConfig;
use osfp_core::solvers::{Method, DEFAULT_ETA};

#[derive(Debug, Parser)]
#[command(name = "osfp", version, about = "Equilibrium solvers, league training and MCTS for small zero-sum games")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run SFP, OSFP or OMD on a matrix game and write the convergence CSV.
    SolveMatrix(SolveMatrixArgs),
    /// Run SFP or OSFP with exact treeplex smooth best responses.
    SolveEfg(SolveEfgArgs),
    /// Emit a seeded card pool and, within the node budget, the flattened tree.
    GenGame(GenGameArgs),
    /// League training of one learner against its frozen snapshots.
    TrainLeague(TrainArgs),
    /// League training that alternates between the CB and BT stage tables.
    TrainAt(TrainArgs),
    /// Head-to-head evaluation of two policies with random seats.
    Eval(EvalArgs),
    /// Play matches where one or both agents search with MCTS.
    MctsPlay(MctsPlayArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum MatrixPreset {
    Rps,
    Pennies,
}

#[derive(Debug, Args)]
pub struct SolveMatrixArgs {
    /// Matrix file: `rows cols` then one row per line (player 1's loss).
    #[arg(long, conflicts_with = "preset")]
    pub game: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "rps")]
    pub preset: MatrixPreset,
    /// sfp, osfp or omd.
    #[arg(long, default_value = "osfp")]
    pub method: Method,
    #[arg(long, default_value_t = DEFAULT_ETA)]
    pub eta: f64,
    #[arg(long, default_value_t = 1000)]
    pub iters: usize,
    /// Comma-separated start for player 1; uniform when omitted.
    #[arg(long, value_delimiter = ',')]
    pub x0: Option<Vec<f64>>,
    /// Comma-separated start for player 2; uniform when omitted.
    #[arg(long, value_delimiter = ',')]
    pub y0: Option<Vec<f64>>,
    /// CSV output (`k,gap_actual,gap_average`); stdout when omitted.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Preset {
    Tiny,
    Small,
    Default,
}

#[derive(Debug, Clone, Args)]
pub struct GameArgs {
    /// Card game config file with `key = value` lines.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Built-in card game config, used when --config is absent.
    #[arg(long, value_enum, default_value = "tiny")]
    pub preset: Preset,
    /// Overrides the config's card-pool seed.
    #[arg(long)]
    pub game_seed: Option<u64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum EfgFixture {
    Kuhn,
    Pennies,
}

#[derive(Debug, Args)]
pub struct SolveEfgArgs {
    /// Tree file in the `efg-tree v1` format.
    #[arg(long, conflicts_with = "fixture")]
    pub efg: Option<PathBuf>,
    /// Built-in tree; the card game from --preset/--config is used otherwise.
    #[arg(long, value_enum)]
    pub fixture: Option<EfgFixture>,
    #[command(flatten)]
    pub game: GameArgs,
    #[arg(long, default_value_t = DEFAULT_NODE_BUDGET)]
    pub budget: usize,
    /// sfp or osfp.
    #[arg(long, default_value = "osfp")]
    pub method: Method,
    #[arg(long, default_value_t = DEFAULT_ETA)]
    pub eta: f64,
    #[arg(long, default_value_t = 1000)]
    pub iters: usize,
    /// CSV output (`k,exploitability_actual,exploitability_average,value`).
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// JSON with the final actual and average sequence-form policies.
    #[arg(long)]
    pub strategy_out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct GenGameArgs {
    #[command(flatten)]
    pub game: GameArgs,
    #[arg(long, default_value_t = DEFAULT_NODE_BUDGET)]
    pub budget: usize,
    /// Card pool listing.
    #[arg(long)]
    pub pool_out: Option<PathBuf>,
    /// Flattened tree in the `efg-tree v1` format.
    #[arg(long)]
    pub efg_out: Option<PathBuf>,
    /// The resolved config as `key = value` lines.
    #[arg(long)]
    pub config_out: Option<PathBuf>,
    /// JSON summary; stdout when omitted.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct TrainArgs {
    #[command(flatten)]
    pub game: GameArgs,
    /// Full league config as JSON; overrides every other training flag.
    #[arg(long)]
    pub league_config: Option<PathBuf>,
    #[arg(long, default_value_t = 30)]
    pub n_lp: usize,
    #[arg(long, default_value_t = 100_000)]
    pub samples_per_lp: usize,
    /// Self-play probability.
    #[arg(long, default_value_t = GateParams::default().p)]
    pub p: f64,
    /// Gate threshold on G/C.
    #[arg(long, default_value_t = GateParams::default().xi)]
    pub xi: f64,
    /// Learning periods without snapshot before one is forced.
    #[arg(long, default_value_t = GateParams::default().c)]
    pub c: u32,
    /// Historical opponent rule: uniform or recency.
    #[arg(long, default_value = "uniform")]
    pub opponent_rule: OpponentRule,
    #[arg(long, default_value_t = PgConfig::default().lr)]
    pub lr: f64,
    /// Games per update wave.
    #[arg(long, default_value_t = PgConfig::default().batch)]
    pub batch: usize,
    #[arg(long, default_value_t = PgConfig::default().discount)]
    pub discount: f64,
    #[arg(long, default_value_t = 0.01)]
    pub entropy_weight: f64,
    #[arg(long, default_value_t = 1.0)]
    pub tau: f64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = DEFAULT_NODE_BUDGET)]
    pub budget: usize,
    /// Receives log.csv, config.json, learner.policy and one
    /// snapshot_NNN.policy per snapshot.
    #[arg(long)]
    pub out_dir: PathBuf,
}

#[derive(Debug, Args)]
pub struct EvalArgs {
    #[command(flatten)]
    pub game: GameArgs,
    /// Policy file of the first agent, or `uniform`.
    #[arg(long)]
    pub a: String,
    /// Policy file of the second agent, or `uniform`.
    #[arg(long)]
    pub b: String,
    #[arg(long, default_value_t = 2500)]
    pub n: usize,
    #[arg(long, default_value_t = 1.0)]
    pub tau: f64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// JSON result; stdout when omitted.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Searcher {
    A,
    B,
    Both,
    None,
}

#[derive(Debug, Args)]
pub struct MctsPlayArgs {
    #[command(flatten)]
    pub game: GameArgs,
    /// Policy file of the first agent, or `uniform`.
    #[arg(long, default_value = "uniform")]
    pub a: String,
    /// Policy file of the second agent, or `uniform`.
    #[arg(long, default_value = "uniform")]
    pub b: String,
    /// Which agents search.
    #[arg(long, value_enum, default_value = "a")]
    pub search: Searcher,
    #[arg(long, default_value_t = 20)]
    pub games: usize,
    /// Simulations per search.
    #[arg(long, default_value_t = MctsParams::default().n)]
    pub n: usize,
    /// Exploration constant.
    #[arg(long, default_value_t = MctsParams::default().c)]
    pub c: f64,
    /// Prior temperature.
    #[arg(long = "prior-tau", default_value_t = MctsParams::default().tau)]
    pub prior_tau: f64,
    /// Dirichlet concentration.
    #[arg(long, default_value_t = MctsParams::default().alpha)]
    pub alpha: f64,
    /// Weight of the policy prior against the Dirichlet draw.
    #[arg(long, default_value_t = MctsParams::default().p_mix)]
    pub p_mix: f64,
    /// Rollout mixing: probability of searching at an own decision. Every
    /// decision is searched by default.
    #[arg(long, default_value_t = 1.0)]
    pub p_expand: f64,
    /// Rollout mixing: simulations per triggered search; --n when omitted.
    #[arg(long)]
    pub n_expand: Option<usize>,
    /// Rollout mixing: consecutive own decisions searched once triggered.
    #[arg(long, default_value_t = RolloutMixParams::default().m_successive)]
    pub m_successive: usize,
    /// Sampling temperature of non-searched moves.
    #[arg(long, default_value_t = 1.0)]
    pub tau: f64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// JSON result; stdout when omitted.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Replay file of the first game.
    #[arg(long)]
    pub replay_out: Option<PathBuf>,
}
