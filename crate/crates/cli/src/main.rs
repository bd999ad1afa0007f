//! `ppgsec` command-line driver.
//!
//! Exit codes: 0 success, 2 input/output or usage error, 3 domain error
//! (degenerate trace, no peaks, invalid parameters).

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use ppgsec::auth::{enroll, spoof_eval, AttackKind, DistanceKind, UserTemplate};
use ppgsec::error::{Error, Result};
use ppgsec::extract::Method;
use ppgsec::io;
use ppgsec::metrics::{MetricsReport, PairedSeries};
use ppgsec::pipeline::{analyse_ipi, clean_signal, extract_pulse, paired_intervals, pulse_cycles, PipelineConfig};
use ppgsec::pulse::{heart_rate, CycleSet};
use ppgsec::quantize::{fit_bins, gray_bitstream, gray_encode, normalize_ipi, trend_encode};
use ppgsec::sigh::{inject, make_waveform, verify_hiding, WaveformKind, DEFAULT_CHANNEL_WEIGHTS};
use ppgsec::synth::{gen_frames, PulseModel, SceneConfig};
use ppgsec::{Pulse, Signal};

const SCHEMA: u32 = 1;

#[derive(Parser)]
#[command(name = "ppgsec", version, about = "Remote-PPG spoofing and signal-hiding workbench")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a synthetic face video with a known pulse.
    Synth(SynthArgs),
    /// Extract a pulse signal from a video and mask.
    Extract(ExtractArgs),
    /// Detect peaks and derive intervals, cycles and key bits from a pulse.
    Ipi(IpiArgs),
    /// Encode an interval file with one codec.
    Quantize(QuantizeArgs),
    /// Enroll a user template from contact-PPG recordings.
    Enroll(EnrollArgs),
    /// Attack an enrolled template with rPPG recovered from a video.
    Attack(AttackArgs),
    /// Superimpose a decoy waveform on a video.
    Inject(InjectArgs),
    /// Inject a decoy waveform and verify that the true pulse is hidden.
    Defend(DefendArgs),
    /// Compare reference and candidate files.
    Metrics(MetricsArgs),
}

#[derive(Args)]
struct SynthArgs {
    /// Output directory for video.frv1, mask.msk1, truth.csv, truth_ipi.csv and trace.csv.
    #[arg(long)]
    out_dir: PathBuf,
    #[arg(long, default_value_t = 42)]
    seed: u64,
    /// Draw the pulse morphology of corpus user N instead of the default model.
    #[arg(long)]
    user: Option<u64>,
    /// Population seed for --user; the same user and population give the same person.
    #[arg(long, default_value_t = 0)]
    population: u64,
    /// Override a model or scene parameter, e.g. `--set bpm=65`. Repeatable.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    sets: Vec<String>,
}

#[derive(Args)]
struct VideoInput {
    #[arg(long)]
    video: PathBuf,
    #[arg(long)]
    mask: PathBuf,
}

#[derive(Args)]
struct ExtractArgs {
    #[command(flatten)]
    input: VideoInput,
    #[arg(long, value_enum, default_value_t = MethodArg::Chrom)]
    method: MethodArg,
    /// Output Signal CSV.
    #[arg(long)]
    out: PathBuf,
    /// Optional JSON report path (printed to stdout otherwise).
    #[arg(long)]
    report: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum MethodArg {
    Chrom,
    Pos,
    Lgi,
    Pca,
}

impl From<MethodArg> for Method {
    fn from(m: MethodArg) -> Self {
        match m {
            MethodArg::Chrom => Method::Chrom,
            MethodArg::Pos => Method::Pos,
            MethodArg::Lgi => Method::Lgi,
            MethodArg::Pca => Method::Pca,
        }
    }
}

#[derive(Args)]
struct IpiArgs {
    /// Pulse Signal CSV.
    #[arg(long)]
    signal: PathBuf,
    /// Sample rate; inferred from the time column when absent.
    #[arg(long)]
    fps: Option<f64>,
    /// Output directory for peaks.csv, ipi.csv, cycles.csv, gray.txt and trend.txt.
    #[arg(long)]
    out_dir: PathBuf,
}

#[derive(Clone, Copy, ValueEnum)]
enum Codec {
    Gray,
    Trend,
}

#[derive(Args)]
struct QuantizeArgs {
    /// IPI CSV (`seconds`).
    #[arg(long)]
    ipi: PathBuf,
    #[arg(long, value_enum)]
    codec: Codec,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct EnrollArgs {
    /// Contact-PPG Signal CSV of the user.
    #[arg(long)]
    ppg: PathBuf,
    /// Contact-PPG Signal CSVs of other users. Repeatable.
    #[arg(long = "impostor", required = true)]
    impostors: Vec<PathBuf>,
    #[arg(long, default_value = "user")]
    user_id: String,
    #[arg(long, value_enum, default_value_t = DistanceArg::Correlation)]
    distance: DistanceArg,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Clone, Copy, ValueEnum)]
enum DistanceArg {
    Correlation,
    Euclidean,
}

#[derive(Args)]
struct AttackArgs {
    #[command(flatten)]
    input: VideoInput,
    /// Template JSON written by `enroll`.
    #[arg(long)]
    template: PathBuf,
    #[arg(long, value_enum, default_value_t = MethodArg::Chrom)]
    method: MethodArg,
    /// Output JSON (stdout when absent).
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct WaveArgs {
    #[arg(long, value_enum, default_value_t = WaveArg::Sine)]
    wave: WaveArg,
    #[arg(long, default_value_t = 1.5)]
    freq: f64,
    /// Peak injected intensity in pixel units.
    #[arg(long, default_value_t = 2.0)]
    amp: f64,
    /// Signal CSV holding the custom waveform (with `--wave custom`).
    #[arg(long)]
    custom: Option<PathBuf>,
    /// Per-channel injection weights `r,g,b`.
    #[arg(long, value_delimiter = ',', num_args = 3)]
    weights: Option<Vec<f64>>,
}

#[derive(Clone, Copy, ValueEnum)]
enum WaveArg {
    Sine,
    Custom,
}

#[derive(Args)]
struct InjectArgs {
    #[command(flatten)]
    input: VideoInput,
    #[command(flatten)]
    wave: WaveArgs,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct DefendArgs {
    #[command(flatten)]
    input: VideoInput,
    #[command(flatten)]
    wave: WaveArgs,
    /// Ground-truth pulse Signal CSV for the hiding check.
    #[arg(long)]
    truth: PathBuf,
    /// Protected FRV1 output.
    #[arg(long)]
    out: PathBuf,
    /// Hiding report JSON (stdout when absent).
    #[arg(long)]
    report: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum MetricsKind {
    /// Two Signal CSVs compared sample by sample.
    Signal,
    /// Two pulse Signal CSVs compared on their anchored interval series.
    Pulse,
    /// Two IPI CSVs truncated to the common length.
    Ipi,
    /// Two bitstring files.
    Bits,
}

#[derive(Args)]
struct MetricsArgs {
    #[arg(long = "ref")]
    reference: PathBuf,
    #[arg(long)]
    cand: PathBuf,
    #[arg(long, value_enum)]
    kind: MetricsKind,
    /// Method label recorded in the report.
    #[arg(long)]
    method: Option<String>,
    #[arg(long)]
    out: Option<PathBuf>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("ppgsec: {e}");
            ExitCode::from(if e.is_io() { 2 } else { 3 })
        }
    }
}

fn run(cmd: Command) -> Result<()> {
    match cmd {
        Command::Synth(a) => cmd_synth(a),
        Command::Extract(a) => cmd_extract(a),
        Command::Ipi(a) => cmd_ipi(a),
        Command::Quantize(a) => cmd_quantize(a),
        Command::Enroll(a) => cmd_enroll(a),
        Command::Attack(a) => cmd_attack(a),
        Command::Inject(a) => cmd_inject(a),
        Command::Defend(a) => cmd_defend(a),
        Command::Metrics(a) => cmd_metrics(a),
    }
}

fn require_file(p: &Path) -> Result<()> {
    if p.is_file() {
        Ok(())
    } else {
        Err(Error::Io(format!("{}: no such file", p.display())))
    }
}

fn require_dir(p: &Path) -> Result<()> {
    fs::create_dir_all(p).map_err(|e| Error::Io(format!("{}: {e}", p.display())))
}

fn write_json<T: Serialize>(path: Option<&Path>, value: &T) -> Result<()> {
    let text = serde_json::to_string_pretty(value).map_err(|e| Error::Format(e.to_string()))?;
    match path {
        Some(p) => io::write_atomic(p, |w| Ok(writeln!(w, "{text}")?)),
        None => {
            println!("{text}");
            Ok(())
        }
    }
}

fn read_video(input: &VideoInput) -> Result<(ppgsec::FrameSequence, ppgsec::RoiMask)> {
    require_file(&input.video)?;
    require_file(&input.mask)?;
    let video = io::read_frv1(&mut io::open(&input.video)?)?;
    let mask = io::read_msk1(&mut io::open(&input.mask)?)?;
    mask.check_matches(&video)?;
    Ok((video, mask))
}

fn read_signal(path: &Path, fps: Option<f64>) -> Result<Signal> {
    require_file(path)?;
    io::read_signal_csv(io::open(path)?, fps)
}

fn apply_set(model: &mut PulseModel, scene: &mut SceneConfig, kv: &str) -> Result<()> {
    let (key, value) = kv
        .split_once('=')
        .ok_or_else(|| Error::InvalidParameter(format!("expected KEY=VALUE, got {kv:?}")))?;
    let num = || -> Result<f64> {
        value.trim().parse::<f64>().map_err(|_| Error::InvalidParameter(format!("{key}: bad number {value:?}")))
    };
    let int = || -> Result<usize> {
        value.trim().parse::<usize>().map_err(|_| Error::InvalidParameter(format!("{key}: bad integer {value:?}")))
    };
    match key.trim() {
        "bpm" | "heart_rate_bpm" => model.heart_rate_bpm = num()?,
        "systolic_width" => model.systolic_width = num()?,
        "dicrotic_width" => model.dicrotic_width = num()?,
        "dicrotic_amplitude" => model.dicrotic_amplitude = num()?,
        "dicrotic_delay" => model.dicrotic_delay = num()?,
        "jitter" | "hrv_jitter" => model.hrv_jitter = num()?,
        "width" => scene.width = int()?,
        "height" => scene.height = int()?,
        "fps" => scene.fps = num()?,
        "duration" | "duration_s" => scene.duration_s = num()?,
        "noise" | "noise_std" => scene.noise_std = num()?,
        "texture" | "texture_std" => scene.texture_std = num()?,
        "trend" | "trend_amplitude" => scene.trend_amplitude = num()?,
        "strength_r" => scene.pulse_strength[0] = num()?,
        "strength_g" => scene.pulse_strength[1] = num()?,
        "strength_b" => scene.pulse_strength[2] = num()?,
        other => return Err(Error::InvalidParameter(format!("unknown synth parameter {other:?}"))),
    }
    Ok(())
}

fn cmd_synth(a: SynthArgs) -> Result<()> {
    let mut model = match a.user {
        Some(u) => PulseModel::for_user(u, a.population),
        None => PulseModel::default(),
    }
    .with_seed(a.seed);
    let mut scene = SceneConfig::default();
    for kv in &a.sets {
        apply_set(&mut model, &mut scene, kv)?;
    }
    let v = gen_frames::<f64>(&model, &scene)?;
    require_dir(&a.out_dir)?;
    io::write_atomic(&a.out_dir.join("video.frv1"), |w| io::write_frv1(w, &v.frames))?;
    io::write_atomic(&a.out_dir.join("mask.msk1"), |w| io::write_msk1(w, &v.mask))?;
    io::write_atomic(&a.out_dir.join("truth.csv"), |w| io::write_signal_csv(w, &v.truth))?;
    io::write_atomic(&a.out_dir.join("truth_ipi.csv"), |w| io::write_ipi_csv(w, &v.truth_ipi))?;
    io::write_atomic(&a.out_dir.join("trace.csv"), |w| io::write_trace_csv(w, &v.trace))
}

#[derive(Serialize)]
struct ExtractReport {
    schema: u32,
    method: String,
    n: usize,
    heart_rate_bpm: Option<f64>,
}

fn cmd_extract(a: ExtractArgs) -> Result<()> {
    let (video, mask) = read_video(&a.input)?;
    let method: Method = a.method.into();
    let pulse: Pulse = extract_pulse(&video, &mask, &PipelineConfig::with_method(method))?;
    io::write_atomic(&a.out, |w| io::write_signal_csv(w, &pulse))?;
    let hr = analyse_ipi(&pulse, &PipelineConfig::default().peaks).ok().and_then(|x| heart_rate(&x.ipi).ok());
    let report = ExtractReport { schema: SCHEMA, method: method.to_string(), n: pulse.len(), heart_rate_bpm: hr };
    write_json(a.report.as_deref(), &report)
}

fn cmd_ipi(a: IpiArgs) -> Result<()> {
    let signal = read_signal(&a.signal, a.fps)?;
    let peaks = PipelineConfig::default().peaks;
    let analysis = analyse_ipi(&signal, &peaks)?;
    let cycles = pulse_cycles(&signal, &peaks)?;
    require_dir(&a.out_dir)?;
    let gray: Vec<&str> = analysis.gray.iter().map(|g| g.bits.as_str()).collect();
    let trend: Vec<String> = analysis.trend.iter().map(|t| t.as_string()).collect();
    if analysis.trend.is_none() {
        eprintln!("ppgsec: intervals have no spread; trend code left empty");
    }
    io::write_atomic(&a.out_dir.join("peaks.csv"), |w| io::write_peaks_csv(w, &analysis.peaks))?;
    io::write_atomic(&a.out_dir.join("ipi.csv"), |w| io::write_ipi_csv(w, &analysis.ipi))?;
    io::write_atomic(&a.out_dir.join("cycles.csv"), |w| io::write_cycles_csv(w, &cycles))?;
    io::write_atomic(&a.out_dir.join("gray.txt"), |w| io::write_bit_lines(w, &gray))?;
    io::write_atomic(&a.out_dir.join("trend.txt"), |w| io::write_bit_lines(w, &trend))
}

fn cmd_quantize(a: QuantizeArgs) -> Result<()> {
    require_file(&a.ipi)?;
    let ipi = io::read_ipi_csv(io::open(&a.ipi)?)?;
    let lines: Vec<String> = match a.codec {
        Codec::Gray => gray_encode(&normalize_ipi(&ipi)).into_iter().map(|g| g.bits).collect(),
        Codec::Trend => vec![trend_encode(&ipi, &fit_bins(&ipi)?).as_string()],
    };
    io::write_atomic(&a.out, |w| io::write_bit_lines(w, &lines))
}

fn ppg_cycles(path: &Path) -> Result<CycleSet<f64>> {
    let cfg = PipelineConfig::default();
    let signal = read_signal(path, None)?;
    pulse_cycles(&clean_signal(&signal, &cfg)?, &cfg.peaks)
}

fn cmd_enroll(a: EnrollArgs) -> Result<()> {
    let own = ppg_cycles(&a.ppg)?;
    let others = a.impostors.iter().map(|p| ppg_cycles(p)).collect::<Result<Vec<_>>>()?;
    let impostors = CycleSet::concat(&others.iter().collect::<Vec<_>>())?;
    let distance = match a.distance {
        DistanceArg::Correlation => DistanceKind::Correlation,
        DistanceArg::Euclidean => DistanceKind::Euclidean,
    };
    let template = enroll(&own, &impostors, &a.user_id, distance)?;
    write_json(Some(&a.out), &template)
}

#[derive(Serialize)]
struct SpoofEntry {
    #[serde(flatten)]
    metrics: MetricsReport,
    attack_kind: AttackKind,
    success_rate: f64,
    attempts: usize,
}

#[derive(Serialize)]
struct AttackReport {
    schema: u32,
    user_id: String,
    threshold: f64,
    reports: Vec<SpoofEntry>,
}

fn cmd_attack(a: AttackArgs) -> Result<()> {
    require_file(&a.template)?;
    let template: UserTemplate<f64> = serde_json::from_reader(io::open(&a.template)?)
        .map_err(|e| Error::Format(format!("{}: {e}", a.template.display())))?;
    let template = UserTemplate::new(template.user_id, template.template, template.threshold, template.distance)?;
    let (video, mask) = read_video(&a.input)?;
    let method: Method = a.method.into();
    let cfg = PipelineConfig::with_method(method);
    let pulse: Pulse = extract_pulse(&video, &mask, &cfg)?;
    let cycles = pulse_cycles(&pulse, &cfg.peaks)?;
    let reports = [AttackKind::VictimRppg, AttackKind::MeanRppg]
        .into_iter()
        .map(|kind| {
            let r = spoof_eval(&template, &cycles, kind)?;
            let metrics = MetricsReport {
                far_at_threshold: Some(r.success_rate),
                ..MetricsReport::new(Some(method.to_string()), r.attempts)
            };
            Ok(SpoofEntry { metrics, attack_kind: kind, success_rate: r.success_rate, attempts: r.attempts })
        })
        .collect::<Result<Vec<_>>>()?;
    let report = AttackReport { schema: SCHEMA, user_id: template.user_id.clone(), threshold: template.threshold, reports };
    write_json(a.out.as_deref(), &report)
}

fn waveform(args: &WaveArgs, video: &ppgsec::FrameSequence) -> Result<(Vec<f64>, [f64; 3])> {
    let kind = match args.wave {
        WaveArg::Sine => WaveformKind::Sine { freq_hz: args.freq },
        WaveArg::Custom => {
            let path = args
                .custom
                .as_ref()
                .ok_or_else(|| Error::InvalidParameter("--wave custom needs --custom FILE".into()))?;
            WaveformKind::Custom { samples: read_signal(path, Some(video.fps()))?.into_values() }
        }
    };
    let weights = match &args.weights {
        Some(w) => [w[0], w[1], w[2]],
        None => DEFAULT_CHANNEL_WEIGHTS,
    };
    if weights.iter().any(|v| !v.is_finite()) {
        return Err(Error::InvalidParameter("channel weights must be finite".into()));
    }
    Ok((make_waveform(&kind, video.fps(), video.frame_count(), args.amp)?, weights))
}

fn cmd_inject(a: InjectArgs) -> Result<()> {
    let (video, mask) = read_video(&a.input)?;
    let (wave, weights) = waveform(&a.wave, &video)?;
    let out = inject(&video, &mask, &wave, weights)?;
    io::write_atomic(&a.out, |w| io::write_frv1(w, &out))
}

fn cmd_defend(a: DefendArgs) -> Result<()> {
    let (video, mask) = read_video(&a.input)?;
    let truth = read_signal(&a.truth, Some(video.fps()))?;
    let (wave, weights) = waveform(&a.wave, &video)?;
    let out = inject(&video, &mask, &wave, weights)?;
    io::write_atomic(&a.out, |w| io::write_frv1(w, &out))?;
    let report = verify_hiding(&video, &out, &mask, &truth, &wave)?;
    write_json(a.report.as_deref(), &report)
}

fn cmd_metrics(a: MetricsArgs) -> Result<()> {
    let report = match a.kind {
        MetricsKind::Signal => {
            let r = read_signal(&a.reference, None)?;
            let c = read_signal(&a.cand, None)?;
            MetricsReport::from_series(a.method, &PairedSeries::truncated(r.values(), c.values())?)
        }
        MetricsKind::Pulse => {
            let r = read_signal(&a.reference, None)?;
            let c = read_signal(&a.cand, None)?;
            let peaks = PipelineConfig::default().peaks;
            let pair = paired_intervals(&r, &c, &peaks)?;
            let bits_r = gray_bitstream(&ppgsec::Ipi::new(pair.reference().to_vec())?);
            let bits_c = gray_bitstream(&ppgsec::Ipi::new(pair.candidate().to_vec())?);
            MetricsReport { bhr: Some(ppgsec::metrics::bhr(&bits_r, &bits_c)?), ..MetricsReport::from_series(a.method, &pair) }
        }
        MetricsKind::Ipi => {
            require_file(&a.reference)?;
            require_file(&a.cand)?;
            let r = io::read_ipi_csv(io::open(&a.reference)?)?;
            let c = io::read_ipi_csv(io::open(&a.cand)?)?;
            MetricsReport::from_series(a.method, &PairedSeries::truncated(r.intervals(), c.intervals())?)
        }
        MetricsKind::Bits => {
            require_file(&a.reference)?;
            require_file(&a.cand)?;
            let r = io::read_bit_lines(io::open(&a.reference)?)?.concat();
            let c = io::read_bit_lines(io::open(&a.cand)?)?.concat();
            let (rb, cb) = (ppgsec::quantize::parse_bits(&r)?, ppgsec::quantize::parse_bits(&c)?);
            MetricsReport { bhr: Some(ppgsec::metrics::bhr(&rb, &cb)?), ..MetricsReport::new(a.method, rb.len().min(cb.len())) }
        }
    };
    write_json(a.out.as_deref(), &report)
}
