use ppgsec::auth::{authenticate, enroll, DistanceKind, UserTemplate};
use ppgsec::io;
use ppgsec::metrics::pearson_values;
use ppgsec::pipeline::{analyse_ipi, clean_signal, extract_pulse, pulse_cycles, PipelineConfig};
use ppgsec::pulse::{heart_rate, CycleSet, PeakConfig};
use ppgsec::synth::{gen_frames, gen_pulse, gen_trace, PulseModel, SceneConfig};
use ppgsec::Method;

fn short_scene() -> SceneConfig {
    SceneConfig { duration_s: 20.0, ..SceneConfig::default() }
}

#[test]
fn single_precision_pipeline() {
    let v = gen_frames::<f32>(&PulseModel::default(), &short_scene()).unwrap();
    for m in Method::ALL {
        let p = extract_pulse::<f32>(&v.frames, &v.mask, &PipelineConfig::with_method(m)).unwrap();
        let r = pearson_values(p.values(), v.truth.values()).unwrap();
        let hr = heart_rate(&analyse_ipi(&p, &PeakConfig::default()).unwrap().ipi).unwrap();
        assert!(r > 0.85, "{m}: r = {r}");
        assert!((hr - 72.0).abs() < 1.5, "{m}: hr = {hr}");
    }
}

#[test]
fn f32_and_f64_agree() {
    let v = gen_frames::<f64>(&PulseModel::default(), &short_scene()).unwrap();
    let a = extract_pulse::<f64>(&v.frames, &v.mask, &PipelineConfig::default()).unwrap();
    let b = extract_pulse::<f32>(&v.frames, &v.mask, &PipelineConfig::default()).unwrap();
    let b64: Vec<f64> = b.values().iter().map(|&x| f64::from(x)).collect();
    assert!(pearson_values(a.values(), &b64).unwrap() > 0.9999);
}

#[test]
fn extraction_survives_file_round_trip() {
    let v = gen_frames::<f64>(&PulseModel::default(), &short_scene()).unwrap();
    let mut frv = Vec::new();
    io::write_frv1(&mut frv, &v.frames).unwrap();
    let mut msk = Vec::new();
    io::write_msk1(&mut msk, &v.mask).unwrap();
    let frames = io::read_frv1(&mut frv.as_slice()).unwrap();
    let mask = io::read_msk1(&mut msk.as_slice()).unwrap();
    assert_eq!(frames, v.frames);

    let cfg = PipelineConfig::default();
    let p = extract_pulse::<f64>(&frames, &mask, &cfg).unwrap();
    let mut csv = Vec::new();
    io::write_signal_csv(&mut csv, &p).unwrap();
    let back = io::read_signal_csv(csv.as_slice(), None).unwrap();
    assert_eq!(back, p);
}

#[test]
fn frames_reproduce_the_trace() {
    let model = PulseModel::for_user(3, 1);
    let scene = short_scene();
    let v = gen_frames::<f64>(&model, &scene).unwrap();
    let t = gen_trace::<f64>(&model, &scene).unwrap();
    let m: ppgsec::Trace = ppgsec::signal::mean_rgb(&v.frames, &v.mask).unwrap();
    for (a, b) in m.samples().iter().zip(t.trace.samples()) {
        for c in 0..3 {
            assert!((a[c] - b[c]).abs() <= 0.5, "{a:?} vs {b:?}");
        }
    }
}

fn contact_cycles(user: u64, seed: u64) -> CycleSet<f64> {
    let cfg = PipelineConfig::default();
    let raw = gen_pulse::<f64>(&PulseModel::for_user(user, 11).with_seed(seed), 30.0, 40.0).unwrap();
    pulse_cycles(&clean_signal(&raw, &cfg).unwrap(), &cfg.peaks).unwrap()
}

#[test]
fn enrolled_template_survives_json_and_accepts_its_user() {
    let own = contact_cycles(0, 1);
    let others: Vec<CycleSet<f64>> = (1..5).map(|u| contact_cycles(u, 1)).collect();
    let impostors = CycleSet::concat(&others.iter().collect::<Vec<_>>()).unwrap();
    let tpl = enroll(&own, &impostors, "u0", DistanceKind::Correlation).unwrap();
    let json = serde_json::to_string(&tpl).unwrap();
    let back: UserTemplate<f64> = serde_json::from_str(&json).unwrap();
    assert_eq!(back, tpl);

    let probe = contact_cycles(0, 2);
    let accepted = probe.cycles().iter().filter(|c| authenticate(c, &back).unwrap().accept).count();
    assert!(accepted * 2 > probe.len(), "{accepted}/{}", probe.len());
}
