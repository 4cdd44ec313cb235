use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(
    name = "sse",
    version,
    about = "Shotgun sequencing channel with erasures: rates, simulation and toy decoding"
)]
pub struct Cli {
    /// Worker threads (0 = all cores). Output does not depend on this.
    #[arg(long, global = true, default_value_t = 0)]
    pub threads: usize,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Achievable-rate curves as CSV or JSON.
    RateCurve(RateCurveArgs),
    /// One channel use, as JSON.
    Simulate(SimulateArgs),
    /// Monte Carlo concentration study.
    Concentration(ConcentrationArgs),
    /// Exhaustive toy decoding with a JSON trace.
    DecodeDemo(DecodeDemoArgs),
    /// Exact expected suffix-size histogram.
    GtauTable(GtauArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, Args)]
pub struct OutputArgs {
    /// Write to this file instead of stdout.
    #[arg(long, short)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct ParamArgs {
    /// Codeword length.
    #[arg(long)]
    pub n: usize,
    /// Read length.
    #[arg(long = "L", conflicts_with = "lbar", required_unless_present = "lbar")]
    pub read_len: Option<usize>,
    /// Normalized read length, L = round(lbar log2 n).
    #[arg(long)]
    pub lbar: Option<f64>,
    /// Number of reads.
    #[arg(long = "K", conflicts_with = "c", required_unless_present = "c")]
    pub num_reads: Option<usize>,
    /// Coverage depth, K = round(c n / L).
    #[arg(long)]
    pub c: Option<f64>,
    /// Erasure probability.
    #[arg(long)]
    pub delta: f64,
}

#[derive(Debug, Clone, Args)]
pub struct RateCurveArgs {
    /// Normalized read length.
    #[arg(long)]
    pub lbar: f64,
    /// Comma-separated erasure probabilities or start:stop:step.
    #[arg(long, default_value = "0")]
    pub deltas: String,
    /// Coverage grid: start:stop:step (inclusive) or a comma list.
    #[arg(long)]
    pub c: String,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
    #[command(flatten)]
    pub out: OutputArgs,
}

#[derive(Debug, Clone, Args)]
pub struct SimulateArgs {
    #[command(flatten)]
    pub params: ParamArgs,
    /// Master seed; equal seeds give byte-identical output.
    #[arg(long)]
    pub seed: u64,
    /// Draw a random codebook of rate R and send a uniform message; without
    /// it a single random codeword is sent as message 0.
    #[arg(long)]
    pub rate: Option<f64>,
    /// Emit only the decoder's view (parameters and reads).
    #[arg(long)]
    pub decoder_view: bool,
    #[command(flatten)]
    pub out: OutputArgs,
}

#[derive(Debug, Clone, Args)]
pub struct ConcentrationArgs {
    #[command(flatten)]
    pub params: ParamArgs,
    /// Independent channel uses to simulate.
    #[arg(long)]
    pub trials: usize,
    /// Master seed; equal seeds give byte-identical output.
    #[arg(long)]
    pub seed: u64,
    /// M_z probes per trial.
    #[arg(long, default_value_t = 2)]
    pub mz_probes: usize,
    /// Target tau_ue of the M_z probes.
    #[arg(long, default_value_t = 0.5)]
    pub mz_tau: f64,
    /// json: aggregate summary; csv: one row per trial.
    #[arg(long, value_enum, default_value_t = Format::Json)]
    pub format: Format,
    #[command(flatten)]
    pub out: OutputArgs,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum OmegaModeArg {
    TypicalOnly,
    AllTuples,
}

#[derive(Debug, Clone, Args)]
pub struct DecodeDemoArgs {
    #[command(flatten)]
    pub params: ParamArgs,
    /// Codebook rate; the codebook has ceil(2^{nR}) words.
    #[arg(
        long,
        conflicts_with = "codebook_size",
        required_unless_present = "codebook_size"
    )]
    pub rate: Option<f64>,
    /// Number of codewords, as an alternative to --rate.
    #[arg(long)]
    pub codebook_size: Option<usize>,
    /// Master seed; equal seeds give byte-identical output.
    #[arg(long)]
    pub seed: u64,
    /// Typicality and filter slack; omit for no slack limit.
    #[arg(long)]
    pub epsilon: Option<f64>,
    #[arg(long, value_enum, default_value_t = OmegaModeArg::AllTuples)]
    pub omega_mode: OmegaModeArg,
    /// Match islands against linear rather than cyclic windows.
    #[arg(long)]
    pub linear: bool,
    #[command(flatten)]
    pub out: OutputArgs,
}

#[derive(Debug, Clone, Args)]
pub struct GtauArgs {
    #[command(flatten)]
    pub params: ParamArgs,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
    #[command(flatten)]
    pub out: OutputArgs,
}
