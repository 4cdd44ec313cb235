use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::Path;

use serde::Serialize;
use thiserror::Error;

use sse_core::channel::{random_codeword, ReadCount, ReadLength, DEFAULT_CODEBOOK_CAP};
use sse_core::decoder::{algorithm1_decode, oracle_decode, DecodeTrace, ToyInstance};
use sse_core::rates::{parse_grid, rate_curve, write_rate_csv};
use sse_core::stats::{
    concentration_experiment, expected_g_tau_table, island_choice_exponent, ConcentrationConfig,
    MzTarget,
};
use sse_core::{
    transmit_codeword, ChannelParams, DecoderConfig, Execution, OmegaMode, Outcome, Seeder, Stage,
};

use crate::args::{
    Command, ConcentrationArgs, DecodeDemoArgs, Format, GtauArgs, OmegaModeArg, OutputArgs,
    ParamArgs, RateCurveArgs, SimulateArgs,
};

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Domain(String),
    #[error("i/o: {0}")]
    Io(#[from] io::Error),
}

fn domain<E: std::fmt::Display>(e: E) -> CliError {
    CliError::Domain(e.to_string())
}

pub fn run(cmd: Command) -> Result<(), CliError> {
    match cmd {
        Command::RateCurve(a) => rate_curve_cmd(a),
        Command::Simulate(a) => simulate_cmd(a),
        Command::Concentration(a) => concentration_cmd(a),
        Command::DecodeDemo(a) => decode_demo_cmd(a),
        Command::GtauTable(a) => gtau_cmd(a),
    }
}

fn resolve(p: &ParamArgs) -> Result<ChannelParams, CliError> {
    let len = match (p.read_len, p.lbar) {
        (Some(l), _) => ReadLength::Literal(l),
        (None, Some(lbar)) => ReadLength::Normalized(lbar),
        (None, None) => return Err(CliError::Domain("one of --L or --lbar is required".into())),
    };
    let count = match (p.num_reads, p.c) {
        (Some(k), _) => ReadCount::Literal(k),
        (None, Some(c)) => ReadCount::Depth(c),
        (None, None) => return Err(CliError::Domain("one of --K or --c is required".into())),
    };
    ChannelParams::resolve(p.n, len, count, p.delta).map_err(domain)
}

fn emit(
    out: &OutputArgs,
    body: impl FnOnce(&mut dyn Write) -> io::Result<()>,
) -> Result<(), CliError> {
    match &out.output {
        Some(path) => write_file(path, body),
        None => {
            let stdout = io::stdout();
            let mut lock = stdout.lock();
            body(&mut lock)?;
            lock.flush()?;
            Ok(())
        }
    }
}

fn write_file(
    path: &Path,
    body: impl FnOnce(&mut dyn Write) -> io::Result<()>,
) -> Result<(), CliError> {
    let mut w = BufWriter::new(File::create(path)?);
    body(&mut w)?;
    w.flush()?;
    Ok(())
}

fn json_body<T: Serialize>(value: &T) -> impl FnOnce(&mut dyn Write) -> io::Result<()> + '_ {
    move |w| {
        serde_json::to_writer_pretty(&mut *w, value)?;
        w.write_all(b"\n")
    }
}

fn rate_curve_cmd(a: RateCurveArgs) -> Result<(), CliError> {
    let cs = parse_grid(&a.c).map_err(domain)?;
    let deltas = parse_grid(&a.deltas).map_err(domain)?;
    let points = rate_curve(&cs, a.lbar, &deltas, Execution::Parallel).map_err(domain)?;
    if let Some(bad) = points
        .iter()
        .find(|p| !p.valid)
        .filter(|_| points.iter().all(|p| !p.valid))
    {
        return Err(CliError::Domain(format!(
            "no grid point satisfies c > 0 and lbar (1 - delta) > 1 (first: {})",
            bad.reason.as_deref().unwrap_or("invalid")
        )));
    }
    match a.format {
        Format::Csv => emit(&a.out, |w| write_rate_csv(&points, w)),
        Format::Json => emit(&a.out, json_body(&points)),
    }
}

fn simulate_cmd(a: SimulateArgs) -> Result<(), CliError> {
    let params = resolve(&a.params)?;
    let seeder = Seeder::new(a.seed);
    let output = match a.rate {
        Some(rate) => {
            ToyInstance::sample_rate(&params, rate, DEFAULT_CODEBOOK_CAP, &seeder)
                .map_err(domain)?
                .output
        }
        None => {
            let x = random_codeword(params.n, &mut seeder.rng(Stage::Codebook, 0));
            transmit_codeword(&x, 0, &params, &seeder).map_err(domain)?
        }
    };
    if a.decoder_view {
        emit(&a.out, json_body(&output.decoder_view()))
    } else {
        emit(&a.out, json_body(&output))
    }
}

fn concentration_cmd(a: ConcentrationArgs) -> Result<(), CliError> {
    let params = resolve(&a.params)?;
    let config = ConcentrationConfig {
        mz_probes: a.mz_probes,
        mz_target: MzTarget::Tau(a.mz_tau),
        ..ConcentrationConfig::new(params, a.trials, a.seed)
    };
    let report = concentration_experiment(&config, Execution::Parallel).map_err(domain)?;
    match a.format {
        Format::Json => emit(&a.out, json_body(&report.summary)),
        Format::Csv => emit(&a.out, |w| report.write_csv(w)),
    }
}

#[derive(Serialize)]
struct DecodeDemoReport<'a> {
    params: ChannelParams,
    seed: u64,
    codebook_size: usize,
    message: usize,
    trace: DecodeTrace,
    oracle_candidates: Vec<usize>,
    correct: bool,
    reads: &'a [sse_core::TritString],
}

fn decode_demo_cmd(a: DecodeDemoArgs) -> Result<(), CliError> {
    let params = resolve(&a.params)?;
    let seeder = Seeder::new(a.seed);
    let inst = match (a.rate, a.codebook_size) {
        (Some(rate), _) => ToyInstance::sample_rate(&params, rate, DEFAULT_CODEBOOK_CAP, &seeder),
        (None, Some(size)) => ToyInstance::sample(&params, size, &seeder),
        (None, None) => {
            return Err(CliError::Domain(
                "one of --rate or --codebook-size is required".into(),
            ))
        }
    }
    .map_err(domain)?;
    let config = DecoderConfig {
        epsilon: a.epsilon.unwrap_or(f64::INFINITY),
        omega_mode: match a.omega_mode {
            OmegaModeArg::TypicalOnly => OmegaMode::TypicalOnly,
            OmegaModeArg::AllTuples => OmegaMode::AllTuples,
        },
        cyclic_check: !a.linear,
        ..DecoderConfig::default()
    };
    let reads = inst.output.reads();
    let result = algorithm1_decode(&inst.codebook, reads, &params, &config).map_err(domain)?;
    let oracle = oracle_decode(&inst.codebook, reads, config.cyclic_check);
    let report = DecodeDemoReport {
        params,
        seed: a.seed,
        codebook_size: inst.codebook.len(),
        message: inst.message(),
        trace: result.trace(&config),
        oracle_candidates: oracle.candidates(),
        correct: result.outcome == Outcome::Message(inst.message()),
        reads,
    };
    emit(&a.out, json_body(&report))
}

#[derive(Serialize)]
struct GtauRow {
    size: usize,
    tau: f64,
    g_bar: f64,
}

#[derive(Serialize)]
struct GtauReport {
    params: ChannelParams,
    rows: Vec<GtauRow>,
    island_choice_exponent: f64,
}

fn gtau_cmd(a: GtauArgs) -> Result<(), CliError> {
    let params = resolve(&a.params)?;
    let log_n = params.log_n();
    let rows: Vec<GtauRow> = expected_g_tau_table(&params)
        .into_iter()
        .enumerate()
        .map(|(size, g_bar)| GtauRow {
            size,
            tau: size as f64 / log_n,
            g_bar,
        })
        .collect();
    match a.format {
        Format::Csv => emit(&a.out, |w| {
            writeln!(w, "size,tau,g_bar")?;
            for r in &rows {
                writeln!(w, "{},{},{}", r.size, r.tau, r.g_bar)?;
            }
            Ok(())
        }),
        Format::Json => {
            let report = GtauReport {
                params,
                island_choice_exponent: island_choice_exponent(&params),
                rows,
            };
            emit(&a.out, json_body(&report))
        }
    }
}
