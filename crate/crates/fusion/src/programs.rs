//! The seven benchmark programs, written once against [`Engine`] and
//! instantiated for the scalar and the vector engine.
//!
//! Oscillator frequencies are rounded to multiples of `2^-32` cycles per
//! sample. Phases then add exactly in double precision and both engines
//! produce the same phases, including at the wrap. Oscillator values and
//! envelopes run in double precision and are narrowed to single precision
//! samples at the output. Noise, filters and feedback run in single precision
//! throughout.

use std::fmt;
use std::marker::PhantomData;
use std::ops::{Add, Mul};
use std::str::FromStr;
use std::sync::atomic::AtomicUsize;

use fusion_core::causal::{fanout, mix_proc, Causal, CausalExt};
use fusion_core::filter::{
    allpass_cascade, butterworth_sections, held_filter, karplus_strong, AllpassParam, ControlRated, FirstOrderParam,
    SecondOrderParam,
};
use fusion_core::generator::{
    amplify, counted, exponential, mix, noise, osci, pulse_gate, quantize_phase, render_into, saw_wave,
};
use fusion_core::params::{compile, CompiledProgram, ParamError, ParamRecord, ParamValues};
use fusion_core::vector::{
    exponential_vec, karplus_strong_vec, noise_vec, osci_vec, pulse_gate_vec, render_blocks_into, VecAllpass,
    VecSecondOrder,
};
use fusion_core::{render, render_blocks, DefinitionError, Generator, GeneratorExt, Lanes, RenderError};

use crate::config::Config;

/// Lane width of the vector engine.
pub const LANES: usize = 4;

/// Sections of the tenth-order Butterworth lowpass.
pub const BUTTERWORTH_SECTIONS: usize = 5;

pub type SweepParams = [SecondOrderParam<f32>; BUTTERWORTH_SECTIONS];

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Program {
    Saw,
    Chord,
    ChordChorus,
    Ping,
    Butterworth,
    Allpass,
    Karplus,
}

impl Program {
    pub const ALL: [Program; 7] = [
        Program::Saw,
        Program::Chord,
        Program::ChordChorus,
        Program::Ping,
        Program::Butterworth,
        Program::Allpass,
        Program::Karplus,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Program::Saw => "saw",
            Program::Chord => "chord",
            Program::ChordChorus => "chordchorus",
            Program::Ping => "ping",
            Program::Butterworth => "butterworth",
            Program::Allpass => "allpass",
            Program::Karplus => "karplus",
        }
    }

    /// Programs with recursive filters or feedback. Their vector form
    /// reassociates the recursion, so engine outputs agree less tightly.
    pub fn is_recursive(self) -> bool {
        matches!(self, Program::Butterworth | Program::Allpass | Program::Karplus)
    }
}

impl fmt::Display for Program {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct UnknownProgram(pub String);

impl fmt::Display for UnknownProgram {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let names: Vec<_> = Program::ALL.iter().map(|p| p.name()).collect();
        write!(f, "unknown program `{}` (expected one of {})", self.0, names.join(", "))
    }
}

impl std::error::Error for UnknownProgram {}

impl FromStr for Program {
    type Err = UnknownProgram;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Program::ALL.into_iter().find(|p| p.name() == s).ok_or_else(|| UnknownProgram(s.to_string()))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum EngineKind {
    Scalar,
    Vector,
}

impl EngineKind {
    pub fn name(self) -> &'static str {
        match self {
            EngineKind::Scalar => "scalar",
            EngineKind::Vector => "vector",
        }
    }
}

impl fmt::Display for EngineKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// The primitives a benchmark program is built from.
pub trait Engine: 'static {
    /// Oscillator and envelope values for one step.
    type Wide: Copy + Add<Output = Self::Wide> + Mul<Output = Self::Wide>;
    /// Output samples for one step.
    type Sample: Copy + Add<Output = Self::Sample> + Mul<Output = Self::Sample>;

    const KIND: EngineKind;

    fn saw(freq: f64) -> Result<impl Generator<Sample = Self::Wide> + Clone, DefinitionError>;
    fn exponential(half_life: f64, amp: f64) -> Result<impl Generator<Sample = Self::Wide> + Clone, DefinitionError>;
    fn noise(seed: u32) -> impl Generator<Sample = Self::Sample> + Clone;
    fn gate(period: u64, length: u64) -> Result<impl Generator<Sample = Self::Sample> + Clone, DefinitionError>;
    fn narrow(x: Self::Wide, gain: f64) -> Self::Sample;
    fn gain(x: Self::Sample, gain: f32) -> Self::Sample;

    /// A filter driven by one parameter record per `factor` samples.
    fn swept_lowpass<G>(
        ctrl: G,
        factor: usize,
    ) -> Result<impl Causal<Input = Self::Sample, Output = Self::Sample> + Clone, DefinitionError>
    where
        G: Generator<Sample = SweepParams> + Clone;

    fn allpass(
        stages: usize,
        p: AllpassParam<f32>,
    ) -> Result<impl Causal<Input = Self::Sample, Output = Self::Sample> + Clone, DefinitionError>;

    fn karplus<G>(
        delay: usize,
        damping: FirstOrderParam<f32>,
        loop_gain: f32,
        excitation: G,
    ) -> Result<impl Generator<Sample = Self::Sample> + Clone, DefinitionError>
    where
        G: Generator<Sample = Self::Sample> + Clone;

    fn render<G: Generator<Sample = Self::Sample>>(g: &G, n: usize) -> Result<Vec<f32>, RenderError>;
    fn render_into<G: Generator<Sample = Self::Sample>>(g: &G, out: &mut [f32]) -> usize;
}

pub struct Scalar;

pub struct Vector;

impl Engine for Scalar {
    type Wide = f64;
    type Sample = f32;

    const KIND: EngineKind = EngineKind::Scalar;

    fn saw(freq: f64) -> Result<impl Generator<Sample = f64> + Clone, DefinitionError> {
        osci(saw_wave::<f64>, 0.0, quantize_phase(freq))
    }

    fn exponential(half_life: f64, amp: f64) -> Result<impl Generator<Sample = f64> + Clone, DefinitionError> {
        exponential(half_life, amp)
    }

    fn noise(seed: u32) -> impl Generator<Sample = f32> + Clone {
        noise(seed)
    }

    fn gate(period: u64, length: u64) -> Result<impl Generator<Sample = f32> + Clone, DefinitionError> {
        pulse_gate(Some(period), length)
    }

    #[inline(always)]
    fn narrow(x: f64, gain: f64) -> f32 {
        (gain * x) as f32
    }

    #[inline(always)]
    fn gain(x: f32, gain: f32) -> f32 {
        gain * x
    }

    fn swept_lowpass<G>(
        ctrl: G,
        factor: usize,
    ) -> Result<impl Causal<Input = f32, Output = f32> + Clone, DefinitionError>
    where
        G: Generator<Sample = SweepParams> + Clone,
    {
        Ok(held_filter(ControlRated::new(ctrl, factor)?))
    }

    fn allpass(
        stages: usize,
        p: AllpassParam<f32>,
    ) -> Result<impl Causal<Input = f32, Output = f32> + Clone, DefinitionError> {
        allpass_cascade(stages, p)
    }

    fn karplus<G>(
        delay: usize,
        damping: FirstOrderParam<f32>,
        loop_gain: f32,
        excitation: G,
    ) -> Result<impl Generator<Sample = f32> + Clone, DefinitionError>
    where
        G: Generator<Sample = f32> + Clone,
    {
        karplus_strong(delay, damping, loop_gain, excitation)
    }

    fn render<G: Generator<Sample = f32>>(g: &G, n: usize) -> Result<Vec<f32>, RenderError> {
        render(g, n)
    }

    fn render_into<G: Generator<Sample = f32>>(g: &G, out: &mut [f32]) -> usize {
        render_into(g, &mut g.start(), out)
    }
}

type Wide4 = Lanes<f64, LANES>;
type Block = Lanes<f32, LANES>;

impl Engine for Vector {
    type Wide = Wide4;
    type Sample = Block;

    const KIND: EngineKind = EngineKind::Vector;

    fn saw(freq: f64) -> Result<impl Generator<Sample = Wide4> + Clone, DefinitionError> {
        osci_vec::<_, f64, f64, LANES>(saw_wave::<f64>, 0.0, quantize_phase(freq))
    }

    fn exponential(half_life: f64, amp: f64) -> Result<impl Generator<Sample = Wide4> + Clone, DefinitionError> {
        exponential_vec(half_life, amp)
    }

    fn noise(seed: u32) -> impl Generator<Sample = Block> + Clone {
        noise_vec(seed)
    }

    fn gate(period: u64, length: u64) -> Result<impl Generator<Sample = Block> + Clone, DefinitionError> {
        pulse_gate_vec(Some(period), length)
    }

    #[inline(always)]
    fn narrow(x: Wide4, gain: f64) -> Block {
        x.map(|v| (gain * v) as f32)
    }

    #[inline(always)]
    fn gain(x: Block, gain: f32) -> Block {
        x.scale(gain)
    }

    fn swept_lowpass<G>(
        ctrl: G,
        factor: usize,
    ) -> Result<impl Causal<Input = Block, Output = Block> + Clone, DefinitionError>
    where
        G: Generator<Sample = SweepParams> + Clone,
    {
        if factor % LANES != 0 {
            return Err(DefinitionError::NotMultiple { what: "control rate factor", value: factor, lanes: LANES });
        }
        let blocks = ctrl.map(|sections: SweepParams| sections.map(VecSecondOrder::<f32, LANES>::from));
        Ok(held_filter(ControlRated::new(blocks, factor / LANES)?))
    }

    fn allpass(
        stages: usize,
        p: AllpassParam<f32>,
    ) -> Result<impl Causal<Input = Block, Output = Block> + Clone, DefinitionError> {
        allpass_cascade(stages, VecAllpass::<f32, LANES>::from(p))
    }

    fn karplus<G>(
        delay: usize,
        damping: FirstOrderParam<f32>,
        loop_gain: f32,
        excitation: G,
    ) -> Result<impl Generator<Sample = Block> + Clone, DefinitionError>
    where
        G: Generator<Sample = Block> + Clone,
    {
        karplus_strong_vec(delay, damping, loop_gain, excitation)
    }

    fn render<G: Generator<Sample = Block>>(g: &G, n: usize) -> Result<Vec<f32>, RenderError> {
        render_blocks(g, n)
    }

    fn render_into<G: Generator<Sample = Block>>(g: &G, out: &mut [f32]) -> usize {
        render_blocks_into(g, out)
    }
}

/// Sawtooth at `freq` cycles per sample.
pub fn saw<E: Engine>(freq: f64) -> Result<impl Generator<Sample = E::Sample> + Clone, DefinitionError> {
    Ok(E::saw(freq)?.map(|x| E::narrow(x, 1.0)))
}

/// Sawtooth times an exponential decay starting at one.
pub fn ping<E: Engine>(
    freq: f64,
    half_life: f64,
) -> Result<impl Generator<Sample = E::Sample> + Clone, DefinitionError> {
    Ok(amplify(E::exponential(half_life, 1.0)?, E::saw(freq)?).map(|x| E::narrow(x, 1.0)))
}

fn saw_mix<E: Engine>(freqs: [f64; 4]) -> Result<impl Generator<Sample = E::Wide> + Clone, DefinitionError> {
    let [a, b, c, d] = freqs;
    Ok(mix(mix(E::saw(a)?, E::saw(b)?), mix(E::saw(c)?, E::saw(d)?)))
}

/// Four sawtooth tones mixed at equal level.
pub fn chord<E: Engine>(freqs: [f64; 4]) -> Result<impl Generator<Sample = E::Sample> + Clone, DefinitionError> {
    Ok(saw_mix::<E>(freqs)?.map(|x| E::narrow(x, 0.25)))
}

/// Four tones, each a chorus of four slightly detuned sawtooth oscillators.
pub fn chordchorus<E: Engine>(
    freqs: [f64; 4],
    detune_cents: [f64; 4],
) -> Result<impl Generator<Sample = E::Sample> + Clone, DefinitionError> {
    let voice = |f: f64| saw_mix::<E>(detune_cents.map(|c| f * (c / 1200.0).exp2()));
    let [a, b, c, d] = freqs;
    Ok(mix(mix(voice(a)?, voice(b)?), mix(voice(c)?, voice(d)?)).map(|x| E::narrow(x, 1.0 / 16.0)))
}

/// Settings of the swept Butterworth lowpass, frequencies in cycles per sample.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Sweep {
    pub cutoff_low: f64,
    pub cutoff_high: f64,
    pub sweep_rate: f64,
    pub control_factor: usize,
    pub seed: u32,
}

/// Butterworth sections for a cutoff that moves exponentially between the
/// bounds, one record per control step.
pub fn sweep_control(s: &Sweep) -> Result<impl Generator<Sample = SweepParams> + Clone, DefinitionError> {
    for fc in [s.cutoff_low, s.cutoff_high] {
        butterworth_sections::<f32, BUTTERWORTH_SECTIONS>(fc)?;
    }
    let (low, ratio) = (s.cutoff_low, s.cutoff_high / s.cutoff_low);
    let lfo = osci(|p: f64| (std::f64::consts::TAU * p).sin(), 0.0, s.sweep_rate * s.control_factor as f64)?;
    Ok(lfo.map(move |v| {
        let fc = low * ratio.powf(0.5 + 0.5 * v);
        butterworth_sections(fc).expect("cutoff stays between checked bounds")
    }))
}

/// Tenth-order Butterworth lowpass sweep over white noise.
pub fn butterworth<E: Engine>(s: &Sweep) -> Result<impl Generator<Sample = E::Sample> + Clone, DefinitionError> {
    Ok(E::swept_lowpass(sweep_control(s)?, s.control_factor)?.apply(E::noise(s.seed)))
}

/// Phaser: the source mixed with itself through an allpass cascade. The
/// source is evaluated once per step.
pub fn allpass<E: Engine, G>(
    source: G,
    stages: usize,
    coefficient: f64,
) -> Result<impl Generator<Sample = E::Sample> + Clone, DefinitionError>
where
    G: Generator<Sample = E::Sample> + Clone,
{
    let p = AllpassParam::new(coefficient as f32)?;
    let phaser = fanout().then(E::allpass(stages, p)?.second()).then(mix_proc());
    Ok(phaser.apply(source).map(|x| E::gain(x, 0.5)))
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Pluck {
    pub delay: usize,
    pub damping: f64,
    pub loop_gain: f64,
    pub burst_period: u64,
    pub burst_length: u64,
    pub seed: u32,
}

/// Karplus-Strong string re-plucked by periodic noise bursts.
pub fn karplus<E: Engine>(s: &Pluck) -> Result<impl Generator<Sample = E::Sample> + Clone, DefinitionError> {
    let excitation = amplify(E::gate(s.burst_period, s.burst_length)?, E::noise(s.seed));
    E::karplus(s.delay, FirstOrderParam::new(s.damping as f32)?, s.loop_gain as f32, excitation)
}

/// A compiled program that renders single precision samples.
pub trait Render {
    /// Open parameter names.
    fn schema(&self) -> &[String];
    fn render(&self, rec: &ParamRecord, n: usize) -> Result<Vec<f32>, ParamError>;
    /// Renders into an existing buffer; returns the number of samples written.
    fn render_into(&self, rec: &ParamRecord, out: &mut [f32]) -> Result<usize, ParamError>;
}

struct Compiled<E, F> {
    program: CompiledProgram<F>,
    _engine: PhantomData<E>,
}

impl<E, F, G> Render for Compiled<E, F>
where
    E: Engine,
    F: Fn(&ParamValues) -> Result<G, DefinitionError>,
    G: Generator<Sample = E::Sample>,
{
    fn schema(&self) -> &[String] {
        self.program.schema()
    }

    fn render(&self, rec: &ParamRecord, n: usize) -> Result<Vec<f32>, ParamError> {
        let g = self.program.instantiate(rec)?;
        Ok(E::render(&g, n)?)
    }

    fn render_into(&self, rec: &ParamRecord, out: &mut [f32]) -> Result<usize, ParamError> {
        let g = self.program.instantiate(rec)?;
        Ok(E::render_into(&g, out))
    }
}

fn boxed<'c, E, F, G>(program: CompiledProgram<F>) -> Box<dyn Render + 'c>
where
    E: Engine,
    F: Fn(&ParamValues) -> Result<G, DefinitionError> + 'c,
    G: Generator<Sample = E::Sample>,
{
    Box::new(Compiled::<E, F> { program, _engine: PhantomData })
}

/// Compiles `program` for engine `E`. With a probe, the allpass program
/// counts how often its Butterworth source is stepped.
pub fn build_for<'c, E: Engine>(
    program: Program,
    cfg: &Config,
    probe: Option<&'c AtomicUsize>,
) -> Result<Box<dyn Render + 'c>, ParamError> {
    let sr = cfg.sample_rate;
    Ok(match program {
        Program::Saw => boxed::<E, _, _>(compile(|s| {
            let freq = s.param("freq");
            move |v: &ParamValues| saw::<E>(freq.get(v) / sr)
        })?),
        Program::Ping => boxed::<E, _, _>(compile(|s| {
            let freq = s.param("freq");
            let half_life = s.param("half_life");
            move |v: &ParamValues| ping::<E>(freq.get(v) / sr, half_life.get(v))
        })?),
        Program::Chord => {
            let ratios = cfg.chord.ratios;
            boxed::<E, _, _>(compile(|s| {
                let root = s.param("root");
                move |v: &ParamValues| chord::<E>(ratios.map(|r| r * root.get(v) / sr))
            })?)
        }
        Program::ChordChorus => {
            let (ratios, detune) = (cfg.chordchorus.ratios, cfg.chordchorus.detune_cents);
            boxed::<E, _, _>(compile(|s| {
                let root = s.param("root");
                move |v: &ParamValues| chordchorus::<E>(ratios.map(|r| r * root.get(v) / sr), detune)
            })?)
        }
        Program::Butterworth => {
            let b = cfg.butterworth.clone();
            boxed::<E, _, _>(compile(|s| {
                let (low, high, rate) = (s.param("cutoff_low"), s.param("cutoff_high"), s.param("sweep_rate"));
                move |v: &ParamValues| {
                    butterworth::<E>(&Sweep {
                        cutoff_low: low.get(v) / sr,
                        cutoff_high: high.get(v) / sr,
                        sweep_rate: rate.get(v) / sr,
                        control_factor: b.control_factor,
                        seed: b.seed,
                    })
                }
            })?)
        }
        Program::Allpass => {
            let (b, stages) = (cfg.butterworth.clone(), cfg.allpass.stages);
            boxed::<E, _, _>(compile(|s| {
                let (low, high, rate) = (s.param("cutoff_low"), s.param("cutoff_high"), s.param("sweep_rate"));
                let coefficient = s.param("coefficient");
                move |v: &ParamValues| {
                    let source = butterworth::<E>(&Sweep {
                        cutoff_low: low.get(v) / sr,
                        cutoff_high: high.get(v) / sr,
                        sweep_rate: rate.get(v) / sr,
                        control_factor: b.control_factor,
                        seed: b.seed,
                    })?;
                    allpass::<E, _>(counted(source, probe), stages, coefficient.get(v))
                }
            })?)
        }
        Program::Karplus => {
            let k = cfg.karplus.clone();
            boxed::<E, _, _>(compile(|s| {
                let loop_gain = s.param("loop_gain");
                move |v: &ParamValues| {
                    karplus::<E>(&Pluck {
                        delay: k.delay,
                        damping: k.damping,
                        loop_gain: loop_gain.get(v),
                        burst_period: k.burst_period,
                        burst_length: k.burst_length,
                        seed: k.seed,
                    })
                }
            })?)
        }
    })
}

pub fn build<'c>(
    program: Program,
    engine: EngineKind,
    cfg: &Config,
    probe: Option<&'c AtomicUsize>,
) -> Result<Box<dyn Render + 'c>, ParamError> {
    match engine {
        EngineKind::Scalar => build_for::<Scalar>(program, cfg, probe),
        EngineKind::Vector => build_for::<Vector>(program, cfg, probe),
    }
}

/// Values of the open parameters as configured.
pub fn default_record(program: Program, cfg: &Config) -> ParamRecord {
    let rec = ParamRecord::new();
    let sweep = |rec: ParamRecord| {
        rec.with("cutoff_low", cfg.butterworth.cutoff_low)
            .with("cutoff_high", cfg.butterworth.cutoff_high)
            .with("sweep_rate", cfg.butterworth.sweep_rate)
    };
    match program {
        Program::Saw => rec.with("freq", cfg.saw.freq),
        Program::Ping => rec.with("freq", cfg.ping.freq).with("half_life", cfg.ping.half_life),
        Program::Chord => rec.with("root", cfg.chord.root),
        Program::ChordChorus => rec.with("root", cfg.chordchorus.root),
        Program::Butterworth => sweep(rec),
        Program::Allpass => sweep(rec).with("coefficient", cfg.allpass.coefficient),
        Program::Karplus => rec.with("loop_gain", cfg.karplus.loop_gain),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn scalar(g: &impl Generator<Sample = f32>, n: usize) -> Vec<f32> {
        render(g, n).unwrap()
    }

    #[test]
    fn saw_hand_evaluation() {
        assert_eq!(scalar(&saw::<Scalar>(0.25).unwrap(), 4), [1.0, 0.5, 0.0, -0.5]);
        assert_eq!(Vector::render(&saw::<Vector>(0.25).unwrap(), 6).unwrap(), [1.0, 0.5, 0.0, -0.5, 1.0, 0.5]);
    }

    #[test]
    fn ping_is_saw_times_decay() {
        let h = 300.0;
        let p = scalar(&ping::<Scalar>(0.01, h).unwrap(), 2000);
        let s = render(&osci(saw_wave::<f64>, 0.0, 0.01).unwrap(), 2000).unwrap();
        for (k, (y, x)) in p.iter().zip(&s).enumerate() {
            let expected = (x * (-(k as f64) / h).exp2()) as f32;
            assert!((y - expected).abs() <= 1e-6);
        }
    }

    #[test]
    fn names_round_trip() {
        for p in Program::ALL {
            assert_eq!(p.name().parse::<Program>().unwrap(), p);
        }
        assert!("sine".parse::<Program>().is_err());
    }

    #[test]
    fn every_program_builds_for_both_engines() {
        let cfg = Config::default();
        for p in Program::ALL {
            for e in [EngineKind::Scalar, EngineKind::Vector] {
                let r = build(p, e, &cfg, None).unwrap();
                let out = r.render(&default_record(p, &cfg), 1001).unwrap();
                assert_eq!(out.len(), 1001, "{p} {e}");
                assert!(out.iter().all(|x| x.is_finite()), "{p} {e}");
            }
        }
    }

    #[test]
    fn misaligned_control_factor_is_rejected_by_vector_engine() {
        let s = Sweep { cutoff_low: 0.01, cutoff_high: 0.1, sweep_rate: 1e-5, control_factor: 10, seed: 1 };
        assert!(butterworth::<Scalar>(&s).is_ok());
        assert!(butterworth::<Vector>(&s).is_err());
    }
}
