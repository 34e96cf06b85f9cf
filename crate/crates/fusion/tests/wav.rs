use std::process::Command;

use fusion::wav;

#[test]
fn hound_reads_written_files() {
    let samples: Vec<f32> = (0..1000).map(|i| (i as f32 * 0.01).sin()).collect();
    let mut bytes = Vec::new();
    wav::write_wav(&mut bytes, &samples, 48_000).unwrap();
    let reader = hound::WavReader::new(bytes.as_slice()).unwrap();
    let spec = reader.spec();
    assert_eq!(spec.channels, 1);
    assert_eq!(spec.sample_rate, 48_000);
    assert_eq!(spec.bits_per_sample, 32);
    assert_eq!(spec.sample_format, hound::SampleFormat::Float);
    let back: Vec<f32> = reader.into_samples::<f32>().map(Result::unwrap).collect();
    assert_eq!(back, samples);
}

#[test]
fn cli_wav_matches_raw() {
    let dir = tempfile::tempdir().unwrap();
    let render = |format: &str, name: &str| {
        let path = dir.path().join(name);
        let status = Command::new(env!("CARGO_BIN_EXE_fusion"))
            .args(["render", "--program", "ping", "--samples", "3000", "--format", format, "--out"])
            .arg(&path)
            .status()
            .unwrap();
        assert!(status.success());
        path
    };
    let raw = std::fs::read(render("f32", "ping.f32")).unwrap();
    let reader = hound::WavReader::open(render("wav", "ping.wav")).unwrap();
    assert_eq!(reader.spec().sample_rate, 44_100);
    let from_wav: Vec<f32> = reader.into_samples::<f32>().map(Result::unwrap).collect();
    let from_raw: Vec<f32> = raw.chunks_exact(4).map(|b| f32::from_le_bytes(b.try_into().unwrap())).collect();
    assert_eq!(from_wav.len(), 3000);
    assert_eq!(from_wav, from_raw);
}

#[test]
fn empty_wav_is_valid() {
    let mut bytes = Vec::new();
    wav::write_wav(&mut bytes, &[], 44_100).unwrap();
    assert_eq!(bytes.len(), 44);
    let reader = hound::WavReader::new(bytes.as_slice()).unwrap();
    assert_eq!(reader.len(), 0);
}
