use clap::{Parser, Subcommand};
use polarscatter::bits::{bits_to_hex, hex_to_bits};
use polarscatter::construct::{bhattacharyya_evolve, make_code_spec, DesignChannel, ReliabilityOrder};
use polarscatter::decode::{BpConfig, BpDecoder, ChannelLLRs, UpdateRule};
use polarscatter::encode::{encode_systematic_streaming, storage_report};
use polarscatter::phy::{
    llr_basic, llr_conventional, llr_leakage, random_peak, synthesize_with_rng, BinChannel,
    LeakageModel, LlrMethod, NoiseModel,
};
use polarscatter::sim::{run_sweep, SimConfig};
use polarscatter::sozu::{plan_session, run_session, verify_replay, FeedbackChannel, SessionTrace};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Deserialize;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

#[derive(Parser)]
#[command(name = "polarscatter", version, about = "Rate-adaptive polar coding simulator for backscatter links")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Reliability order of a BEC-designed code as CSV.
    Construct {
        #[arg(long)]
        eps: f64,
        /// log2 of the code length.
        #[arg(long)]
        n: u32,
        #[arg(long)]
        emit_capacities: bool,
    },
    /// Systematic encoding of one block plus the storage report, as JSON.
    Encode {
        #[arg(long)]
        n: u32,
        #[arg(long)]
        k: usize,
        /// K info bits, MSB first, zero-padded to a whole nibble.
        #[arg(long)]
        info: String,
        #[arg(long, default_value_t = 0.5)]
        eps: f64,
    },
    /// BP decoding of one block of channel LLRs.
    Decode {
        /// JSON code description: {"n": log2N, "k": K, "eps": 0.5}.
        #[arg(long)]
        spec: PathBuf,
        /// Comma- or newline-separated LLRs, positive favouring 0.
        #[arg(long)]
        llrs: PathBuf,
        #[arg(long, default_value_t = polarscatter::decode::DEFAULT_MAX_ITERS)]
        iters: usize,
        #[arg(long, default_value = "exact")]
        rule: String,
    },
    /// Per-symbol LLRs from all three demodulators, as CSV.
    Llr {
        #[arg(long)]
        nfft: usize,
        #[arg(long)]
        sigma2: f64,
        #[arg(long)]
        samples: usize,
        #[arg(long)]
        seed: u64,
        /// Input SNR in dB before dechirping.
        #[arg(long, default_value_t = -20.0, allow_hyphen_values = true)]
        snr: f64,
        #[arg(long, value_delimiter = ',')]
        leak: Option<Vec<f64>>,
        /// Power estimate handed to the conventional demodulator, `phat=<v>`.
        #[arg(long)]
        baseline: Option<String>,
    },
    /// One two-stage session, printed as a JSON trace.
    Session {
        #[arg(long)]
        k: Option<usize>,
        #[arg(long, allow_hyphen_values = true)]
        snr: Option<f64>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 0.0)]
        fb_loss: f64,
        #[arg(long, default_value_t = 128)]
        nfft: usize,
        #[arg(long, default_value_t = 1.0)]
        sigma2: f64,
        /// Mother-code design erasure probability; defaults to the stage-1
        /// punctured fraction.
        #[arg(long)]
        design_erasure: Option<f64>,
        /// Also write the frames in wire format, one per line.
        #[arg(long)]
        frames: Option<PathBuf>,
        /// Replay a recorded trace instead and check every decision.
        #[arg(long, conflicts_with_all = ["k", "snr"])]
        replay: Option<PathBuf>,
    },
    /// Run a configured sweep and print the summary JSON.
    Simulate {
        #[arg(long)]
        config: PathBuf,
    },
    /// Run a configured sweep and write metrics.csv, trials.jsonl, summary.json.
    Sweep {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
}

enum Failure {
    Config(String),
    Io(String),
}

impl From<polarscatter::Error> for Failure {
    fn from(e: polarscatter::Error) -> Self {
        Failure::Config(e.to_string())
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure::Io(e.to_string())
    }
}

type CliResult = Result<(), Failure>;

fn read(path: &Path) -> Result<String, Failure> {
    std::fs::read_to_string(path).map_err(|e| Failure::Io(format!("{}: {e}", path.display())))
}

fn print_json<T: serde::Serialize>(v: &T) -> CliResult {
    let mut out = io::stdout().lock();
    serde_json::to_writer_pretty(&mut out, v).map_err(|e| Failure::Io(e.to_string()))?;
    writeln!(out)?;
    Ok(())
}

fn construct(eps: f64, n: u32, emit_capacities: bool) -> CliResult {
    let order = ReliabilityOrder::from_bec(DesignChannel::new(eps)?, n)?;
    let z = bhattacharyya_evolve(eps, n)?;
    let mut out = BufWriter::new(io::stdout().lock());
    if emit_capacities {
        writeln!(out, "rank,index,z,capacity")?;
    } else {
        writeln!(out, "rank,index,z")?;
    }
    for (rank, &i) in order.as_slice().iter().enumerate() {
        if emit_capacities {
            writeln!(out, "{rank},{i},{},{}", z[i], 1.0 - z[i])?;
        } else {
            writeln!(out, "{rank},{i},{}", z[i])?;
        }
    }
    out.flush()?;
    Ok(())
}

fn encode(n: u32, k: usize, info_hex: &str, eps: f64) -> CliResult {
    let order = ReliabilityOrder::from_bec(DesignChannel::new(eps)?, n)?;
    let spec = make_code_spec(&order, k)?;
    let info = hex_to_bits(info_hex, k)?;
    let cw = encode_systematic_streaming(&info, &spec)?;
    let storage = storage_report(n, k).ok();
    print_json(&serde_json::json!({
        "n": spec.n(),
        "k": k,
        "codeword": cw.to_hex(),
        "storage": storage.map(|s| serde_json::json!({
            "conventional_bits": s.conventional_bits,
            "lowcost_bits": s.lowcost_bits,
            "ratio": s.ratio(),
        })),
    }))
}

#[derive(Deserialize)]
struct SpecFile {
    n: u32,
    k: usize,
    #[serde(default = "default_eps")]
    eps: f64,
}

fn default_eps() -> f64 {
    0.5
}

fn decode(spec_path: &Path, llr_path: &Path, iters: usize, rule: &str) -> CliResult {
    let sf: SpecFile = serde_json::from_str(&read(spec_path)?)
        .map_err(|e| Failure::Config(format!("{}: {e}", spec_path.display())))?;
    let spec = make_code_spec(&ReliabilityOrder::from_bec(DesignChannel::new(sf.eps)?, sf.n)?, sf.k)?;
    let llrs = read(llr_path)?
        .split(|c: char| c == ',' || c.is_whitespace())
        .filter(|t| !t.is_empty())
        .map(|t| t.parse::<f64>().map_err(|e| Failure::Config(format!("llr {t:?}: {e}"))))
        .collect::<Result<Vec<_>, _>>()?;
    let update_rule = match rule {
        "exact" => UpdateRule::ExactTanh,
        "minsum" => UpdateRule::MinSum,
        _ => return Err(Failure::Config(format!("unknown rule {rule:?}"))),
    };
    let cfg = BpConfig { max_iters: iters, update_rule, ..BpConfig::default() };
    let r = BpDecoder::new(&spec).decode(&ChannelLLRs(llrs), &cfg)?;
    print_json(&serde_json::json!({
        "info": bits_to_hex(&r.info_bits),
        "fber": r.fber,
        "iterations": r.iterations_used,
        "converged": r.converged,
    }))
}

#[allow(clippy::too_many_arguments)]
fn llr(
    nfft: usize,
    sigma2: f64,
    samples: usize,
    seed: u64,
    snr: f64,
    leak: Option<Vec<f64>>,
    baseline: Option<String>,
) -> CliResult {
    let noise = NoiseModel::from_snr_db(snr, sigma2, nfft)?;
    let leak = match leak {
        Some(v) => LeakageModel::new(
            v.try_into().map_err(|_| Failure::Config("--leak needs three fractions".into()))?,
        )?,
        None => LeakageModel::default(),
    };
    let p_hat = match baseline {
        None => noise.signal_power,
        Some(b) => b
            .strip_prefix("phat=")
            .and_then(|v| v.parse::<f64>().ok())
            .ok_or_else(|| Failure::Config(format!("--baseline expects phat=<value>, got {b:?}")))?,
    };
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = BufWriter::new(io::stdout().lock());
    writeln!(out, "true_bit,L_basic,L_leak,L_conv")?;
    for _ in 0..samples {
        let bit = rng.gen_range(0..=1u8);
        let s = random_peak(nfft, &mut rng);
        let obs = synthesize_with_rng(bit, s, &noise, &leak, nfft, &mut rng)?;
        writeln!(
            out,
            "{bit},{},{},{}",
            llr_basic(&obs, sigma2),
            llr_leakage(&obs, sigma2),
            llr_conventional(&obs, sigma2, p_hat)
        )?;
    }
    out.flush()?;
    Ok(())
}

#[allow(clippy::too_many_arguments)]
fn session(
    k: usize,
    snr: f64,
    seed: u64,
    fb_loss: f64,
    nfft: usize,
    sigma2: f64,
    design_erasure: Option<f64>,
    frames: Option<PathBuf>,
) -> CliResult {
    let mut plan = plan_session(k)?;
    if let Some(eps) = design_erasure {
        plan = plan.with_design_erasure(eps)?;
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let info: Vec<u8> = (0..k).map(|_| rng.gen_range(0..=1u8)).collect();
    let noise = NoiseModel::from_snr_db(snr, sigma2, nfft)?;
    let mut channel = BinChannel::new(noise, LeakageModel::default(), nfft, LlrMethod::Leakage, rng.gen())?;
    let mut fb = FeedbackChannel::new(fb_loss, rng.gen())?;
    let trace = run_session(&info, plan, BpConfig::default(), &mut channel, &mut fb)?;
    if let Some(path) = frames {
        let lines: String = trace.frames.iter().map(|f| f.frame.clone() + "\n").collect();
        std::fs::write(&path, lines).map_err(|e| Failure::Io(format!("{}: {e}", path.display())))?;
    }
    print_json(&serde_json::json!({
        "info": bits_to_hex(&info),
        "clean": trace.delivered && trace.decoded_bits == info,
        "trace": trace,
    }))
}

fn replay(path: &Path) -> CliResult {
    let text = read(path)?;
    let value: serde_json::Value =
        serde_json::from_str(&text).map_err(|e| Failure::Config(format!("{}: {e}", path.display())))?;
    // accept either a bare trace or the `session` output wrapping one
    let inner = value.get("trace").cloned().unwrap_or(value);
    let trace: SessionTrace =
        serde_json::from_value(inner).map_err(|e| Failure::Config(format!("{}: {e}", path.display())))?;
    verify_replay(&trace)?;
    print_json(&serde_json::json!({ "replayed": trace.frames.len(), "decisions": trace.decisions() }))
}

fn load_config(path: &Path) -> Result<SimConfig, Failure> {
    Ok(SimConfig::parse(&read(path)?)?)
}

fn run(cli: Cli) -> CliResult {
    match cli.cmd {
        Cmd::Construct { eps, n, emit_capacities } => construct(eps, n, emit_capacities),
        Cmd::Encode { n, k, info, eps } => encode(n, k, &info, eps),
        Cmd::Decode { spec, llrs, iters, rule } => decode(&spec, &llrs, iters, &rule),
        Cmd::Llr { nfft, sigma2, samples, seed, snr, leak, baseline } => {
            llr(nfft, sigma2, samples, seed, snr, leak, baseline)
        }
        Cmd::Session { replay: Some(path), .. } => replay(&path),
        Cmd::Session { k, snr, seed, fb_loss, nfft, sigma2, design_erasure, frames, replay: None } => {
            let k = k.ok_or_else(|| Failure::Config("--k is required".into()))?;
            let snr = snr.ok_or_else(|| Failure::Config("--snr is required".into()))?;
            session(k, snr, seed, fb_loss, nfft, sigma2, design_erasure, frames)
        }
        Cmd::Simulate { config } => {
            let out = run_sweep(&load_config(&config)?)?;
            println!("{}", out.summary_json());
            Ok(())
        }
        Cmd::Sweep { config, out } => {
            let result = run_sweep(&load_config(&config)?)?;
            result.write_all(&out).map_err(|e| Failure::Io(format!("{}: {e}", out.display())))
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Config(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(2)
        }
        Err(Failure::Io(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(3)
        }
    }
}
