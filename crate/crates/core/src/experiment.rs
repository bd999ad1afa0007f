//! Corpus-level spoofing experiment: enroll synthetic users on contact PPG,
//! then attack them with other users' PPG, with rPPG recovered from the
//! victim's video, with the mean of that rPPG, and with rPPG from the
//! SigH-protected video.

use serde::{Deserialize, Serialize};

use crate::auth::{enroll, spoof_eval, AttackKind, DistanceKind, UserTemplate};
use crate::error::Result;
use crate::extract::Method;
use crate::pipeline::{clean_signal, extract_pulse, pulse_cycles, PipelineConfig};
use crate::pulse::CycleSet;
use crate::sigh::{inject, make_waveform, WaveformKind, DEFAULT_AMPLITUDE, DEFAULT_CHANNEL_WEIGHTS, DEFAULT_FREQ_HZ};
use crate::synth::{gen_frames, gen_pulse, PulseModel, SceneConfig};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub users: usize,
    pub ppg_duration_s: f64,
    pub video_duration_s: f64,
    /// Enrollment cycles borrowed from each other user as impostor examples.
    pub impostor_cycles_per_user: usize,
    pub method: Method,
    pub distance: DistanceKind,
    pub inject_amplitude: f64,
    pub inject_freq_hz: f64,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            users: 10,
            ppg_duration_s: 60.0,
            video_duration_s: 30.0,
            impostor_cycles_per_user: 6,
            method: Method::Chrom,
            distance: DistanceKind::Correlation,
            inject_amplitude: DEFAULT_AMPLITUDE,
            inject_freq_hz: DEFAULT_FREQ_HZ,
        }
    }
}

/// Success rates for one user.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct UserOutcome {
    pub user: usize,
    pub threshold: f64,
    pub random: f64,
    pub victim_rppg: f64,
    pub mean_rppg: f64,
    pub protected_victim_rppg: f64,
    pub protected_mean_rppg: f64,
    pub victim_cycles: usize,
}

/// Per-seed corpus result; rates are means over users.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CorpusOutcome {
    pub seed: u64,
    pub random: f64,
    pub victim_rppg: f64,
    pub mean_rppg: f64,
    pub protected_victim_rppg: f64,
    pub protected_mean_rppg: f64,
    pub users: Vec<UserOutcome>,
}

// session seeds derived from the corpus seed
fn session_seed(seed: u64, user: usize, session: u64) -> u64 {
    seed.wrapping_mul(1_000_003).wrapping_add(user as u64 * 97).wrapping_add(session)
}

const SESSION_ENROLL: u64 = 1;
const SESSION_PROBE: u64 = 2;
const SESSION_VIDEO: u64 = 3;

/// Contact-PPG cycles: the band-passed clean pulse, as a sensor would give.
pub fn ppg_cycles(model: &PulseModel, fps: f64, duration_s: f64, cfg: &PipelineConfig) -> Result<CycleSet<f64>> {
    let raw = gen_pulse::<f64>(model, fps, duration_s)?;
    pulse_cycles(&clean_signal(&raw, cfg)?, &cfg.peaks)
}

pub fn run_corpus(seed: u64, cfg: &ExperimentConfig) -> Result<CorpusOutcome> {
    let pipe = PipelineConfig::with_method(cfg.method);
    let scene = SceneConfig { duration_s: cfg.video_duration_s, ..SceneConfig::default() };
    let fps = scene.fps;
    let models: Vec<PulseModel> = (0..cfg.users).map(|u| PulseModel::for_user(u as u64, seed)).collect();

    let enroll_sets = models
        .iter()
        .enumerate()
        .map(|(u, m)| ppg_cycles(&m.with_seed(session_seed(seed, u, SESSION_ENROLL)), fps, cfg.ppg_duration_s, &pipe))
        .collect::<Result<Vec<_>>>()?;
    let probe_sets = models
        .iter()
        .enumerate()
        .map(|(u, m)| ppg_cycles(&m.with_seed(session_seed(seed, u, SESSION_PROBE)), fps, cfg.ppg_duration_s, &pipe))
        .collect::<Result<Vec<_>>>()?;

    let mut users = Vec::with_capacity(cfg.users);
    for (u, model) in models.iter().enumerate() {
        let others: Vec<usize> = (0..cfg.users).filter(|&o| o != u).collect();
        let impostor_parts: Vec<CycleSet<f64>> = others
            .iter()
            .map(|&o| enroll_sets[o].subset(0..cfg.impostor_cycles_per_user.min(enroll_sets[o].len())))
            .collect();
        let impostors = CycleSet::concat(&impostor_parts.iter().collect::<Vec<_>>())?;
        let template = enroll(&enroll_sets[u], &impostors, &format!("user{u}"), cfg.distance)?;

        let random_parts: Vec<&CycleSet<f64>> = others.iter().map(|&o| &probe_sets[o]).collect();
        let random = spoof_eval(&template, &CycleSet::concat(&random_parts)?, AttackKind::Random)?;

        let video = gen_frames::<f64>(&model.with_seed(session_seed(seed, u, SESSION_VIDEO)), &scene)?;
        let (victim, mean) = attack_video(&template, &video.frames, &video.mask, &pipe)?;

        let n = video.frames.frame_count();
        let wave: Vec<f64> = make_waveform(&WaveformKind::Sine { freq_hz: cfg.inject_freq_hz }, fps, n, cfg.inject_amplitude)?;
        let protected = inject(&video.frames, &video.mask, &wave, DEFAULT_CHANNEL_WEIGHTS)?;
        let (p_victim, p_mean) = attack_video(&template, &protected, &video.mask, &pipe)?;

        users.push(UserOutcome {
            user: u,
            threshold: template.threshold,
            random: random.success_rate,
            victim_rppg: victim.0,
            mean_rppg: mean,
            protected_victim_rppg: p_victim.0,
            protected_mean_rppg: p_mean,
            victim_cycles: victim.1,
        });
    }
    let avg = |f: fn(&UserOutcome) -> f64| users.iter().map(f).sum::<f64>() / users.len().max(1) as f64;
    Ok(CorpusOutcome {
        seed,
        random: avg(|o| o.random),
        victim_rppg: avg(|o| o.victim_rppg),
        mean_rppg: avg(|o| o.mean_rppg),
        protected_victim_rppg: avg(|o| o.protected_victim_rppg),
        protected_mean_rppg: avg(|o| o.protected_mean_rppg),
        users,
    })
}

/// Victim-rPPG `(success, attempts)` and mean-rPPG success of one video
/// against a template. A video whose pulse cannot be segmented scores zero.
pub fn attack_video(
    template: &UserTemplate<f64>,
    frames: &crate::signal::FrameSequence,
    mask: &crate::signal::RoiMask,
    pipe: &PipelineConfig,
) -> Result<((f64, usize), f64)> {
    let cycles = match extract_pulse::<f64>(frames, mask, pipe).and_then(|p| pulse_cycles(&p, &pipe.peaks)) {
        Ok(c) => c,
        Err(e) if !e.is_io() => return Ok(((0.0, 0), 0.0)),
        Err(e) => return Err(e),
    };
    let victim = spoof_eval(template, &cycles, AttackKind::VictimRppg)?;
    let mean = spoof_eval(template, &cycles, AttackKind::MeanRppg)?;
    Ok(((victim.success_rate, victim.attempts), mean.success_rate))
}
