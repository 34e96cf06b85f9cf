//! Signal generators and the render drivers.
//!
//! A generator is an initial state plus a step function. The step ships one
//! sample while updating the state, or returns `None` once the signal has
//! ended. Combinators nest the states of their operands, so a composed
//! generator is still a single state machine and [`render`] drives it in one
//! loop.

use alloc::vec::Vec;
use core::marker::PhantomData;
use core::ops::{Add, Mul};
use core::sync::atomic::{AtomicUsize, Ordering};

use crate::error::{DefinitionError, RenderError};
use crate::sample::{fraction, wrap_once, Float};

/// Contiguous output of a render driver.
pub type SampleBuffer<A> = Vec<A>;

/// A description of a sample stream.
///
/// `step` must be a pure function of the state: running from [`start`] again
/// reproduces the same samples. `None` ends the stream and drivers never call
/// `step` again afterwards.
///
/// [`start`]: Generator::start
pub trait Generator {
    type State;
    type Sample;

    fn start(&self) -> Self::State;
    fn step(&self, state: &mut Self::State) -> Option<Self::Sample>;
}

impl<G: Generator + ?Sized> Generator for &G {
    type State = G::State;
    type Sample = G::Sample;

    #[inline(always)]
    fn start(&self) -> G::State {
        (**self).start()
    }

    #[inline(always)]
    fn step(&self, state: &mut G::State) -> Option<G::Sample> {
        (**self).step(state)
    }
}

/// Exponential decay `amp, amp·r, amp·r², …` with `r = 2^(-1/half_life)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Exponential<T> {
    amp: T,
    ratio: T,
}

/// Exponential decay with the given half-life in samples.
pub fn exponential<T: Float>(half_life: f64, amp: T) -> Result<Exponential<T>, DefinitionError> {
    let ratio = half_life_ratio(half_life)?;
    Ok(Exponential { amp, ratio: T::from_f64(ratio) })
}

pub(crate) fn half_life_ratio(half_life: f64) -> Result<f64, DefinitionError> {
    if !(half_life > 0.0 && half_life.is_finite()) {
        return Err(DefinitionError::HalfLife(half_life));
    }
    Ok(libm::exp2(-1.0 / half_life))
}

impl<T> Exponential<T> {
    pub fn amp(&self) -> T
    where
        T: Copy,
    {
        self.amp
    }

    /// Per-sample decay factor.
    pub fn ratio(&self) -> T
    where
        T: Copy,
    {
        self.ratio
    }
}

impl<T: Float> Generator for Exponential<T> {
    type State = T;
    type Sample = T;

    #[inline(always)]
    fn start(&self) -> T {
        self.amp
    }

    #[inline(always)]
    fn step(&self, y: &mut T) -> Option<T> {
        let out = *y;
        *y = out * self.ratio;
        Some(out)
    }
}

/// Sawtooth over one period: `1 - 2·phase`.
#[inline(always)]
pub fn saw_wave<T: Float>(phase: T) -> T {
    T::one() - (phase + phase)
}

/// Oscillator mapping a wrapping phase through a wave function.
#[derive(Clone, Copy, Debug)]
pub struct Osci<W, T> {
    wave: W,
    phase: T,
    freq: T,
}

/// Oscillator emitting `wave(φ)` with `φ₀ = phase0`, `φₙ₊₁ = fraction(φₙ + freq)`.
///
/// `freq` is in cycles per sample. It is reduced into `[0, 1)` once here,
/// which does not change the phase sequence and lets every step wrap with a
/// single compare.
pub fn osci<W, T, B>(wave: W, phase0: T, freq: T) -> Result<Osci<W, T>, DefinitionError>
where
    W: Fn(T) -> B,
    T: Float,
{
    check_phase(phase0)?;
    if !freq.is_finite() {
        return Err(DefinitionError::NotFinite("frequency"));
    }
    Ok(Osci { wave, phase: phase0, freq: fraction(freq) })
}

pub(crate) fn check_phase<T: Float>(phase0: T) -> Result<(), DefinitionError> {
    if phase0 >= T::zero() && phase0 < T::one() {
        Ok(())
    } else {
        Err(DefinitionError::Phase(phase0.to_f64()))
    }
}

impl<W, T> Osci<W, T> {
    pub fn wave(&self) -> &W {
        &self.wave
    }

    pub fn phase0(&self) -> T
    where
        T: Copy,
    {
        self.phase
    }

    /// The phase increment, reduced into `[0, 1)`.
    pub fn freq(&self) -> T
    where
        T: Copy,
    {
        self.freq
    }
}

impl<W, T, B> Generator for Osci<W, T>
where
    W: Fn(T) -> B,
    T: Float,
{
    type State = T;
    type Sample = B;

    #[inline(always)]
    fn start(&self) -> T {
        self.phase
    }

    #[inline(always)]
    fn step(&self, phase: &mut T) -> Option<B> {
        let out = (self.wave)(*phase);
        *phase = wrap_once(*phase + self.freq);
        Some(out)
    }
}

/// One cycle of a fixed-point phase.
const PHASE_ONE: f64 = 4_294_967_296.0;

/// `fraction(x)` as a 32-bit fixed-point phase, rounded to nearest.
pub(crate) fn to_fixed_phase(x: f64) -> u32 {
    // A value that rounds up to a whole cycle wraps to zero.
    libm::round(fraction(x) * PHASE_ONE) as u64 as u32
}

/// Rounds `fraction(x)` to the nearest multiple of `2^-32` cycles.
///
/// Phases and frequencies on this grid add exactly in `f64`, so an [`osci`]
/// and an `osci_vec` built from quantized values agree bit for bit.
pub fn quantize_phase(x: f64) -> f64 {
    to_fixed_phase(x) as f64 * (1.0 / PHASE_ONE)
}

#[inline(always)]
pub(crate) fn from_fixed_phase<T: Float>(p: u32) -> T {
    let x = T::from_f64(p as f64 * (1.0 / PHASE_ONE));
    if x >= T::one() {
        T::below_one()
    } else {
        x
    }
}

/// Oscillator with a 32-bit fixed-point phase.
///
/// The phase advances by integer addition modulo `2^32`, which is exact, so
/// every evaluation order of the phase sequence gives the same samples. Phase
/// and frequency are quantized to `2^-32` cycles.
#[derive(Clone, Copy, Debug)]
pub struct FixedOsci<W, T> {
    wave: W,
    phase: u32,
    inc: u32,
    _phase: PhantomData<fn() -> T>,
}

pub fn osci_fixed<W, T, B>(wave: W, phase0: T, freq: T) -> Result<FixedOsci<W, T>, DefinitionError>
where
    W: Fn(T) -> B,
    T: Float,
{
    check_phase(phase0)?;
    if !freq.is_finite() {
        return Err(DefinitionError::NotFinite("frequency"));
    }
    Ok(FixedOsci {
        wave,
        phase: to_fixed_phase(phase0.to_f64()),
        inc: to_fixed_phase(freq.to_f64()),
        _phase: PhantomData,
    })
}

impl<W, T> FixedOsci<W, T> {
    pub fn phase0_fixed(&self) -> u32 {
        self.phase
    }

    pub fn freq_fixed(&self) -> u32 {
        self.inc
    }
}

impl<W, T, B> Generator for FixedOsci<W, T>
where
    W: Fn(T) -> B,
    T: Float,
{
    type State = u32;
    type Sample = B;

    #[inline(always)]
    fn start(&self) -> u32 {
        self.phase
    }

    #[inline(always)]
    fn step(&self, phase: &mut u32) -> Option<B> {
        let out = (self.wave)(from_fixed_phase(*phase));
        *phase = phase.wrapping_add(self.inc);
        Some(out)
    }
}

/// Multiplier of the 32-bit linear congruential noise source.
pub const LCG_MULTIPLIER: u32 = 1_664_525;
/// Increment of the 32-bit linear congruential noise source.
pub const LCG_INCREMENT: u32 = 1_013_904_223;

#[inline(always)]
pub(crate) fn lcg_next(s: u32) -> u32 {
    s.wrapping_mul(LCG_MULTIPLIER).wrapping_add(LCG_INCREMENT)
}

/// Maps a raw LCG state to `[-1, 1)` using its top 24 bits, exactly
/// representable in both `f32` and `f64`.
#[inline(always)]
pub fn lcg_sample<T: Float>(s: u32) -> T {
    T::from_i32((s as i32) >> 8) * T::from_f64(1.0 / 8_388_608.0)
}

/// White noise from `s ← 1664525·s + 1013904223 (mod 2³²)`.
///
/// The first sample comes from the state after one update of `seed`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Noise<T> {
    seed: u32,
    _sample: PhantomData<fn() -> T>,
}

pub fn noise<T: Float>(seed: u32) -> Noise<T> {
    Noise { seed, _sample: PhantomData }
}

impl<T> Noise<T> {
    pub fn seed(&self) -> u32 {
        self.seed
    }
}

impl<T: Float> Generator for Noise<T> {
    type State = u32;
    type Sample = T;

    #[inline(always)]
    fn start(&self) -> u32 {
        self.seed
    }

    #[inline(always)]
    fn step(&self, s: &mut u32) -> Option<T> {
        *s = lcg_next(*s);
        Some(lcg_sample(*s))
    }
}

/// Arithmetic progression `start, start + slope, …`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Ramp<T> {
    start: T,
    slope: T,
}

pub fn ramp_linear<T: Float>(start: T, slope: T) -> Ramp<T> {
    Ramp { start, slope }
}

impl<T: Float> Generator for Ramp<T> {
    type State = T;
    type Sample = T;

    #[inline(always)]
    fn start(&self) -> T {
        self.start
    }

    #[inline(always)]
    fn step(&self, x: &mut T) -> Option<T> {
        let out = *x;
        *x = out + self.slope;
        Some(out)
    }
}

/// Repeats one value forever.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Constant<A>(pub A);

impl<A: Clone> Generator for Constant<A> {
    type State = ();
    type Sample = A;

    #[inline(always)]
    fn start(&self) {}

    #[inline(always)]
    fn step(&self, _: &mut ()) -> Option<A> {
        Some(self.0.clone())
    }
}

pub fn silence<T: Float>() -> Constant<T> {
    Constant(T::zero())
}

/// Emits one for the first `length` samples of every `period`, zero otherwise.
///
/// Integer state keeps the gate pattern identical in every engine.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PulseGate<T> {
    period: u64,
    length: u64,
    _sample: PhantomData<fn() -> T>,
}

/// Gate with the given period; `None` opens it once and never again.
pub fn pulse_gate<T: Float>(period: Option<u64>, length: u64) -> Result<PulseGate<T>, DefinitionError> {
    let period = period.unwrap_or(u64::MAX);
    if period == 0 {
        return Err(DefinitionError::ZeroCount("gate period"));
    }
    Ok(PulseGate { period, length, _sample: PhantomData })
}

impl<T> PulseGate<T> {
    pub fn period(&self) -> u64 {
        self.period
    }

    pub fn length(&self) -> u64 {
        self.length
    }
}

impl<T: Float> Generator for PulseGate<T> {
    type State = u64;
    type Sample = T;

    #[inline(always)]
    fn start(&self) -> u64 {
        0
    }

    #[inline(always)]
    fn step(&self, pos: &mut u64) -> Option<T> {
        let out = if *pos < self.length { T::one() } else { T::zero() };
        *pos += 1;
        if *pos == self.period {
            *pos = 0;
        }
        Some(out)
    }
}

/// Pointwise product; ends as soon as either operand ends.
#[derive(Clone, Copy, Debug)]
pub struct Amplify<E, I> {
    env: E,
    input: I,
}

pub fn amplify<E, I>(env: E, input: I) -> Amplify<E, I>
where
    E: Generator,
    I: Generator,
    E::Sample: Mul<I::Sample>,
{
    Amplify { env, input }
}

impl<E, I> Generator for Amplify<E, I>
where
    E: Generator,
    I: Generator,
    E::Sample: Mul<I::Sample>,
{
    type State = (E::State, I::State);
    type Sample = <E::Sample as Mul<I::Sample>>::Output;

    #[inline(always)]
    fn start(&self) -> Self::State {
        (self.env.start(), self.input.start())
    }

    #[inline(always)]
    fn step(&self, (es, is): &mut Self::State) -> Option<Self::Sample> {
        let e = self.env.step(es);
        let i = self.input.step(is);
        Some(e? * i?)
    }
}

/// Pointwise sum; ends as soon as either operand ends.
#[derive(Clone, Copy, Debug)]
pub struct Mix<A, B> {
    a: A,
    b: B,
}

pub fn mix<A, B>(a: A, b: B) -> Mix<A, B>
where
    A: Generator,
    B: Generator,
    A::Sample: Add<B::Sample>,
{
    Mix { a, b }
}

impl<A, B> Generator for Mix<A, B>
where
    A: Generator,
    B: Generator,
    A::Sample: Add<B::Sample>,
{
    type State = (A::State, B::State);
    type Sample = <A::Sample as Add<B::Sample>>::Output;

    #[inline(always)]
    fn start(&self) -> Self::State {
        (self.a.start(), self.b.start())
    }

    #[inline(always)]
    fn step(&self, (sa, sb): &mut Self::State) -> Option<Self::Sample> {
        let a = self.a.step(sa);
        let b = self.b.step(sb);
        Some(a? + b?)
    }
}

/// Pairs two streams sample by sample; ends with the shorter one.
#[derive(Clone, Copy, Debug)]
pub struct Zip<A, B> {
    a: A,
    b: B,
}

pub fn zip<A: Generator, B: Generator>(a: A, b: B) -> Zip<A, B> {
    Zip { a, b }
}

impl<A: Generator, B: Generator> Generator for Zip<A, B> {
    type State = (A::State, B::State);
    type Sample = (A::Sample, B::Sample);

    #[inline(always)]
    fn start(&self) -> Self::State {
        (self.a.start(), self.b.start())
    }

    #[inline(always)]
    fn step(&self, (sa, sb): &mut Self::State) -> Option<Self::Sample> {
        let a = self.a.step(sa);
        let b = self.b.step(sb);
        Some((a?, b?))
    }
}

/// Applies a pure function to every sample.
#[derive(Clone, Copy, Debug)]
pub struct Map<G, F> {
    gen: G,
    f: F,
}

impl<G, F, B> Generator for Map<G, F>
where
    G: Generator,
    F: Fn(G::Sample) -> B,
{
    type State = G::State;
    type Sample = B;

    #[inline(always)]
    fn start(&self) -> G::State {
        self.gen.start()
    }

    #[inline(always)]
    fn step(&self, s: &mut G::State) -> Option<B> {
        self.gen.step(s).map(&self.f)
    }
}

/// Plays a buffer once; the state is the read position.
#[derive(Clone, Copy, Debug)]
pub struct FromBuffer<'a, A> {
    buf: &'a [A],
}

pub fn from_buffer<A: Clone>(buf: &[A]) -> FromBuffer<'_, A> {
    FromBuffer { buf }
}

impl<A: Clone> Generator for FromBuffer<'_, A> {
    type State = usize;
    type Sample = A;

    #[inline(always)]
    fn start(&self) -> usize {
        0
    }

    #[inline(always)]
    fn step(&self, pos: &mut usize) -> Option<A> {
        let out = self.buf.get(*pos)?.clone();
        *pos += 1;
        Some(out)
    }
}

/// Counts every step of the wrapped generator into a shared counter.
///
/// Used to observe how often a source is evaluated in a larger program.
#[derive(Clone, Copy, Debug)]
pub struct Counted<'c, G> {
    gen: G,
    counter: Option<&'c AtomicUsize>,
}

pub fn counted<G: Generator>(gen: G, counter: Option<&AtomicUsize>) -> Counted<'_, G> {
    Counted { gen, counter }
}

impl<G: Generator> Generator for Counted<'_, G> {
    type State = G::State;
    type Sample = G::Sample;

    #[inline(always)]
    fn start(&self) -> G::State {
        self.gen.start()
    }

    #[inline(always)]
    fn step(&self, s: &mut G::State) -> Option<G::Sample> {
        if let Some(c) = self.counter {
            c.fetch_add(1, Ordering::Relaxed);
        }
        self.gen.step(s)
    }
}

/// Method syntax for the generator combinators.
pub trait GeneratorExt: Generator + Sized {
    fn map<F, B>(self, f: F) -> Map<Self, F>
    where
        F: Fn(Self::Sample) -> B,
    {
        Map { gen: self, f }
    }

    fn amplify<I>(self, input: I) -> Amplify<Self, I>
    where
        I: Generator,
        Self::Sample: Mul<I::Sample>,
    {
        amplify(self, input)
    }

    fn mix<B>(self, other: B) -> Mix<Self, B>
    where
        B: Generator,
        Self::Sample: Add<B::Sample>,
    {
        mix(self, other)
    }

    fn zip<B: Generator>(self, other: B) -> Zip<Self, B> {
        zip(self, other)
    }
}

impl<G: Generator> GeneratorExt for G {}

/// Steps `g` from `state` into `out` until it ends or `out` is full.
/// Returns the number of samples written.
#[inline]
pub fn render_into<G: Generator>(g: &G, state: &mut G::State, out: &mut [G::Sample]) -> usize {
    for (n, slot) in out.iter_mut().enumerate() {
        match g.step(state) {
            Some(x) => *slot = x,
            None => return n,
        }
    }
    out.len()
}

/// Renders up to `max_samples` samples into a fresh buffer.
///
/// The buffer is reserved once up front; the length of the result is the
/// number of samples produced before the generator ended.
pub fn render<G: Generator>(g: &G, max_samples: usize) -> Result<SampleBuffer<G::Sample>, RenderError> {
    let mut state = g.start();
    render_from(g, &mut state, max_samples)
}

pub(crate) fn render_from<G: Generator>(
    g: &G,
    state: &mut G::State,
    max_samples: usize,
) -> Result<SampleBuffer<G::Sample>, RenderError> {
    let mut buf = Vec::new();
    buf.try_reserve_exact(max_samples).map_err(|_| RenderError::Alloc { samples: max_samples })?;
    let mut n = 0;
    for slot in &mut buf.spare_capacity_mut()[..max_samples] {
        match g.step(state) {
            Some(x) => {
                slot.write(x);
                n += 1;
            }
            None => break,
        }
    }
    // SAFETY: the first `n` slots were initialized in order above.
    unsafe { buf.set_len(n) };
    Ok(buf)
}

/// Demand-driven rendering into chunks of `chunk_size` samples.
///
/// The generator state is carried from one chunk to the next and nothing is
/// computed before a chunk is requested. The last chunk may be short; an
/// ended generator yields no further chunks.
pub fn render_chunked<G: Generator>(g: &G, chunk_size: usize) -> Result<Chunks<'_, G>, DefinitionError> {
    if chunk_size == 0 {
        return Err(DefinitionError::ZeroCount("chunk size"));
    }
    Ok(Chunks { gen: g, state: Some(g.start()), chunk_size })
}

pub struct Chunks<'g, G: Generator> {
    gen: &'g G,
    state: Option<G::State>,
    chunk_size: usize,
}

impl<G: Generator> Iterator for Chunks<'_, G> {
    type Item = Result<SampleBuffer<G::Sample>, RenderError>;

    fn next(&mut self) -> Option<Self::Item> {
        let state = self.state.as_mut()?;
        match render_from(self.gen, state, self.chunk_size) {
            Ok(chunk) => {
                if chunk.len() < self.chunk_size {
                    self.state = None;
                }
                if chunk.is_empty() {
                    None
                } else {
                    Some(Ok(chunk))
                }
            }
            Err(e) => {
                self.state = None;
                Some(Err(e))
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    fn take<G: Generator>(g: G, n: usize) -> Vec<G::Sample> {
        render(&g, n).unwrap()
    }

    /// Ends after `n` samples.
    #[derive(Clone)]
    struct Finite(usize);

    impl Generator for Finite {
        type State = usize;
        type Sample = f32;
        fn start(&self) -> usize {
            0
        }
        fn step(&self, i: &mut usize) -> Option<f32> {
            if *i < self.0 {
                *i += 1;
                Some(*i as f32)
            } else {
                None
            }
        }
    }

    #[test]
    fn fixed_osci_examples() {
        let g = osci_fixed(saw_wave::<f64>, 0.0, 0.25).unwrap();
        assert_eq!(g.freq_fixed(), 1 << 30);
        assert_eq!(render(&g, 6).unwrap(), [1.0, 0.5, 0.0, -0.5, 1.0, 0.5]);
        let f = osci_fixed(|p: f32| p, 0.0, 1.0 - 1e-12).unwrap();
        assert_eq!(render(&f, 2).unwrap(), [0.0, 0.0]);
        let near_one = from_fixed_phase::<f32>(u32::MAX);
        assert!(near_one < 1.0);
        assert!(osci_fixed(saw_wave::<f64>, 1.0, 0.1).is_err());
        assert!(osci_fixed(saw_wave::<f64>, 0.0, f64::NAN).is_err());
    }

    #[test]
    fn fixed_osci_tracks_float_osci() {
        let a = render(&osci_fixed(|p: f64| p, 0.3, 0.0123).unwrap(), 10_000).unwrap();
        let b = render(&osci(|p: f64| p, 0.3, 0.0123).unwrap(), 10_000).unwrap();
        for (x, y) in a.iter().zip(&b) {
            let d = (x - y).abs();
            assert!(d.min(1.0 - d) < 1e-5);
        }
    }

    #[test]
    fn exponential_examples() {
        assert_eq!(take(exponential(1.0, 1.0f32).unwrap(), 4), [1.0, 0.5, 0.25, 0.125]);
        assert_eq!(take(exponential(1e12, 3.0f32).unwrap(), 1), [3.0]);
        let s = take(exponential(2.0, 1.0f64).unwrap(), 3);
        assert!((s[2] - 0.5).abs() < 1e-15);
    }

    #[test]
    fn exponential_rejects_bad_half_life() {
        assert!(exponential(0.0, 1.0f32).is_err());
        assert!(exponential(-3.0, 1.0f32).is_err());
        assert!(exponential(f64::NAN, 1.0f32).is_err());
        assert!(exponential(f64::INFINITY, 1.0f32).is_err());
    }

    #[test]
    fn saw_wave_values() {
        assert_eq!(saw_wave(0.0f32), 1.0);
        assert_eq!(saw_wave(0.5f32), 0.0);
        assert_eq!(saw_wave(0.75f32), -0.5);
    }

    #[test]
    fn osci_examples() {
        let g = osci(saw_wave::<f32>, 0.0, 0.25).unwrap();
        assert_eq!(take(g, 5), [1.0, 0.5, 0.0, -0.5, 1.0]);
        let g = osci(saw_wave::<f32>, 0.0, 0.0).unwrap();
        assert_eq!(take(g, 4), [1.0; 4]);
        let g = osci(|p: f64| p, 0.5, 0.5).unwrap();
        assert_eq!(take(g, 4), [0.5, 0.0, 0.5, 0.0]);
    }

    #[test]
    fn osci_negative_frequency_runs_backwards() {
        let g = osci(|p: f64| p, 0.0, -0.25).unwrap();
        assert_eq!(take(g, 5), [0.0, 0.75, 0.5, 0.25, 0.0]);
    }

    #[test]
    fn osci_rejects_phase_out_of_range() {
        assert_eq!(osci(saw_wave::<f32>, 1.0, 0.1).err(), Some(DefinitionError::Phase(1.0)));
        assert!(osci(saw_wave::<f32>, -0.1, 0.1).is_err());
        assert!(osci(saw_wave::<f32>, 0.0, f32::INFINITY).is_err());
    }

    #[test]
    fn noise_first_states() {
        let mut s = 1u32;
        let mut states = vec![];
        for _ in 0..3 {
            s = lcg_next(s);
            states.push(s);
        }
        // Evaluated independently with arbitrary precision integers.
        assert_eq!(states, [1_015_568_748, 1_586_005_467, 2_165_703_038]);
        let g = noise::<f64>(1);
        let expected: Vec<f64> = states.iter().map(|&s| ((s as i32) >> 8) as f64 / 8_388_608.0).collect();
        assert_eq!(take(g, 3), expected);
    }

    #[test]
    fn noise_is_deterministic_and_centred() {
        let a = take(noise::<f32>(7), 100_000);
        let b = take(noise::<f32>(7), 100_000);
        assert_eq!(a, b);
        let mean = a.iter().map(|&x| x as f64).sum::<f64>() / a.len() as f64;
        assert!(mean.abs() < 0.02, "mean {mean}");
        assert!(a.iter().all(|&x| (-1.0..1.0).contains(&x)));
    }

    #[test]
    fn ramp_examples() {
        assert_eq!(take(ramp_linear(0.0f32, 1.0), 4), [0.0, 1.0, 2.0, 3.0]);
        assert_eq!(take(ramp_linear(5.0f32, 0.0), 3), [5.0; 3]);
        assert_eq!(take(ramp_linear(1.0f32, -0.5), 5)[4], -1.0);
    }

    #[test]
    fn amplify_examples() {
        let saw = osci(saw_wave::<f32>, 0.0, 0.25).unwrap();
        assert_eq!(take(amplify(Constant(2.0f32), saw), 4), [2.0, 1.0, 0.0, -1.0]);
        assert_eq!(render(&amplify(Constant(1.0f32), Finite(3)), 10).unwrap().len(), 3);
        assert_eq!(render(&amplify(Finite(3), Constant(1.0f32)), 10).unwrap().len(), 3);
        let e = exponential(1.0, 1.0f32).unwrap();
        assert_eq!(take(amplify(e, Constant(1.0f32)), 3), [1.0, 0.5, 0.25]);
    }

    #[test]
    fn mix_examples() {
        let saw = || osci(saw_wave::<f32>, 0.0, 0.25).unwrap();
        assert_eq!(take(mix(saw(), silence::<f32>()), 8), take(saw(), 8));
        let shifted = osci(saw_wave::<f32>, 0.5, 0.25).unwrap();
        // [1, .5, 0, -.5] + [0, -.5, 1, .5]
        assert_eq!(take(mix(saw(), shifted), 4), [1.0, 0.0, 1.0, 0.0]);
        assert_eq!(take(mix(ramp_linear(0.0f32, 1.0), ramp_linear(0.0, -1.0)), 5), [0.0; 5]);
    }

    #[test]
    fn from_buffer_examples() {
        let empty: [f32; 0] = [];
        assert!(take(from_buffer(&empty), 5).is_empty());
        assert_eq!(take(from_buffer(&[1.0f32, 2.0, 3.0]), 10), [1.0, 2.0, 3.0]);
    }

    #[test]
    fn render_counts() {
        assert_eq!(render(&Finite(3), 10).unwrap().len(), 3);
        assert!(render(&noise::<f32>(1), 0).unwrap().is_empty());
    }

    #[test]
    fn render_reports_allocation_failure() {
        let err = render(&Constant(0u64), usize::MAX / 2).unwrap_err();
        assert_eq!(err, RenderError::Alloc { samples: usize::MAX / 2 });
    }

    #[test]
    fn chunk_lengths() {
        let lens: Vec<usize> = render_chunked(&Finite(10), 4).unwrap().map(|c| c.unwrap().len()).collect();
        assert_eq!(lens, [4, 4, 2]);
        let lens: Vec<usize> = render_chunked(&Finite(8), 4).unwrap().map(|c| c.unwrap().len()).collect();
        assert_eq!(lens, [4, 4]);
        assert!(render_chunked(&Finite(8), 0).is_err());
    }

    #[test]
    fn chunking_infinite_generator_is_lazy() {
        let saw = osci(saw_wave::<f32>, 0.0, 0.01).unwrap();
        let first = render_chunked(&saw, 64).unwrap().next().unwrap().unwrap();
        assert_eq!(first, take(saw, 64));
    }

    #[test]
    fn pulse_gate_pattern() {
        let g = pulse_gate::<f32>(Some(4), 2).unwrap();
        assert_eq!(take(g, 9), [1.0, 1.0, 0.0, 0.0, 1.0, 1.0, 0.0, 0.0, 1.0]);
        let once = pulse_gate::<f32>(None, 2).unwrap();
        assert_eq!(take(once, 5), [1.0, 1.0, 0.0, 0.0, 0.0]);
        assert!(pulse_gate::<f32>(Some(0), 1).is_err());
    }

    #[test]
    fn counted_counts_steps() {
        let c = AtomicUsize::new(0);
        let g = counted(noise::<f32>(3), Some(&c));
        render(&g, 17).unwrap();
        assert_eq!(c.load(Ordering::Relaxed), 17);
    }
}
