//! The vector engine.
//!
//! Generators are vectorized serially: lane `i` of an `N`-lane generator runs
//! the scalar recurrence at `N` times the stride, starting `i` samples late, so
//! the flattened block stream is the scalar stream.
//!
//! Recursive filters cannot be split that way, since every output needs the
//! previous one. Within a block they are evaluated with shift-add rounds
//! derived from [`decompose_recursive`](crate::poly::decompose_recursive):
//! round `j` adds a scaled copy of the block shifted up by `2^j` lanes, so a
//! block of `N` samples costs `log2(N)` rounds instead of `N` dependent steps.
//! The true filter history (the last outputs of the previous block) is then
//! added through precomputed homogeneous responses.

use alloc::vec;
use alloc::vec::Vec;
use core::marker::PhantomData;

use crate::causal::{arr, feedback, Causal, CausalExt};
use crate::error::{DefinitionError, RenderError};
use crate::filter::{fixed, AllpassParam, FilterParam, FirstOrderParam, Fixed, SecondOrderParam};
use crate::generator::{
    check_phase, from_fixed_phase, half_life_ratio, lcg_next, lcg_sample, osci_fixed, Generator, LCG_INCREMENT,
    LCG_MULTIPLIER,
};
use crate::lanes::Lanes;
use crate::poly::decompose_recursive;
use crate::sample::{fraction, wrap_once, Float};

/// Renders `n` samples of a block generator into a flat buffer.
///
/// Whole blocks are copied out; when `n` is not a multiple of `N` one further
/// block is computed and only its leading lanes are kept. A generator that
/// ends stops the output at the last complete block.
pub fn render_blocks<G, T, const N: usize>(g: &G, n: usize) -> Result<Vec<T>, RenderError>
where
    G: Generator<Sample = Lanes<T, N>>,
    T: Copy,
{
    let mut buf = Vec::new();
    buf.try_reserve_exact(n).map_err(|_| RenderError::Alloc { samples: n })?;
    let mut state = g.start();
    let mut written = 0;
    let spare = &mut buf.spare_capacity_mut()[..n];
    let mut chunks = spare.chunks_exact_mut(N);
    for chunk in &mut chunks {
        match g.step(&mut state) {
            Some(block) => {
                for (slot, x) in chunk.iter_mut().zip(block.0) {
                    slot.write(x);
                }
                written += N;
            }
            None => break,
        }
    }
    let tail = chunks.into_remainder();
    if written + tail.len() == n && !tail.is_empty() {
        if let Some(block) = g.step(&mut state) {
            for (slot, x) in tail.iter_mut().zip(block.0) {
                slot.write(x);
            }
            written = n;
        }
    }
    // SAFETY: the first `written` slots were initialized in order above.
    unsafe { buf.set_len(written) };
    Ok(buf)
}

/// Fills `out` from a fresh start of a block generator, with the same tail
/// handling as [`render_blocks`]. Returns the number of samples written.
pub fn render_blocks_into<G, T, const N: usize>(g: &G, out: &mut [T]) -> usize
where
    G: Generator<Sample = Lanes<T, N>>,
    T: Copy,
{
    let mut state = g.start();
    let mut written = 0;
    let mut chunks = out.chunks_exact_mut(N);
    for chunk in &mut chunks {
        match g.step(&mut state) {
            Some(block) => chunk.copy_from_slice(&block.0),
            None => return written,
        }
        written += N;
    }
    let tail = chunks.into_remainder();
    if !tail.is_empty() {
        if let Some(block) = g.step(&mut state) {
            let k = tail.len();
            tail.copy_from_slice(&block.0[..k]);
            written += k;
        }
    }
    written
}

const fn log2(n: usize) -> usize {
    n.trailing_zeros() as usize
}

/// Block form of `y[t] = x[t] + k·y[t-1]`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct VecFirstOrder<T, const N: usize> {
    /// `k^(2^j)` for round `j < log2(N)`.
    rounds: [T; N],
    /// `k^(i+1)`: contribution of the previous output to lane `i`.
    carry: Lanes<T, N>,
}

impl<T: Float, const N: usize> VecFirstOrder<T, N> {
    pub fn new(k: T) -> Self {
        const { assert!(N.is_power_of_two()) };
        let k64 = k.to_f64();
        let mut rounds = [T::zero(); N];
        let mut p = k64;
        for r in rounds.iter_mut().take(log2(N)) {
            *r = T::from_f64(p);
            p *= p;
        }
        let carry = Lanes::from_fn(|i| T::from_f64(libm::pow(k64, (i + 1) as f64)));
        VecFirstOrder { rounds, carry }
    }

    /// Runs one block; returns the outputs and the new carry.
    #[inline(always)]
    pub fn block(&self, v: Lanes<T, N>, y_prev: T) -> (Lanes<T, N>, T) {
        let mut x = v;
        for j in 0..log2(N) {
            x = x.mul_add(self.rounds[j], x.shifted(1 << j));
        }
        let y = x.mul_add(y_prev, self.carry);
        (y, y.last())
    }
}

impl<T: Float, const N: usize> From<FirstOrderParam<T>> for VecFirstOrder<T, N> {
    fn from(p: FirstOrderParam<T>) -> Self {
        VecFirstOrder::new(p.k())
    }
}

impl<T: Float, const N: usize> FilterParam<Lanes<T, N>> for VecFirstOrder<T, N> {
    type State = T;

    #[inline(always)]
    fn initial_state() -> T {
        T::zero()
    }

    #[inline(always)]
    fn process(&self, x: Lanes<T, N>, y1: &mut T) -> Lanes<T, N> {
        let (y, carry) = self.block(x, *y1);
        *y1 = carry;
        y
    }
}

/// One block of `y[t] = x[t] + k·y[t-1]` by shift-add rounds
/// `x ← x + k^(2^j)·(x↑2^j)`, followed by the carry `k^(i+1)·y_prev`.
pub fn first_order_vec_block<T: Float, const N: usize>(k: T, v: Lanes<T, N>, y_prev: T) -> (Lanes<T, N>, T) {
    VecFirstOrder::new(k).block(v, y_prev)
}

/// Block form of a biquad
/// `(n0 + n1·z⁻¹ + n2·z⁻²) / (1 - a·z⁻¹ + b·z⁻²)`.
///
/// Within a block the numerator and the shift-add rounds are linear in the
/// input lanes and the two inputs before the block, with the output history
/// entering only through the carry. `process` uses the precomputed response
/// to each of those inputs, one broadcast multiply-add per input lane;
/// [`process_rounds`](Self::process_rounds) runs the rounds themselves.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct VecSecondOrder<T, const N: usize> {
    num: [T; 3],
    /// Round `j` multiplies by `1 + c1·z^-s + c2·z^-2s` with `s = 2^j`.
    rounds: [[T; 2]; N],
    /// `taps[j]`: response to a unit input at lane `j`.
    taps: [Lanes<T, N>; N],
    /// Responses to a unit `x[t-2]` and a unit `x[t-1]` before the block.
    history: [Lanes<T, N>; 2],
    /// Responses of lane `i` to a unit `y[t-1]` and a unit `y[t-2]`.
    carry1: Lanes<T, N>,
    carry2: Lanes<T, N>,
}

/// Numerator and shift-add rounds over one block, without the output carry.
fn shift_add_block<T: Float, const N: usize>(
    num: [T; 3],
    rounds: &[[T; 2]],
    x: Lanes<T, N>,
    prev: Lanes<T, N>,
) -> Lanes<T, N> {
    let [n0, n1, n2] = num;
    let mut v = x.scale(n0).mul_add(n1, x.shifted_in(prev, 1)).mul_add(n2, x.shifted_in(prev, 2));
    for (j, &[c1, c2]) in rounds.iter().enumerate() {
        let s = 1 << j;
        let next = v.mul_add(c1, v.shifted(s));
        v = if 2 * s < N { next.mul_add(c2, v.shifted(2 * s)) } else { next };
    }
    v
}

impl<T: Float, const N: usize> From<SecondOrderParam<T>> for VecSecondOrder<T, N> {
    fn from(p: SecondOrderParam<T>) -> Self {
        const { assert!(N.is_power_of_two() && N >= 2 && N <= 64) };
        let a = p.a().to_f64();
        let b = p.b().to_f64();
        // Round j multiplies by the alternating polynomial of
        // 1 - aⱼ·z^-s + bⱼ·z^-2s, leaving 1 - (aⱼ² - 2bⱼ)·z^-2s + bⱼ²·z^-4s.
        let mut rounds = [[T::zero(); 2]; N];
        let (mut aj, mut bj) = (a, b);
        for r in rounds.iter_mut().take(log2(N)) {
            *r = [T::from_f64(aj), T::from_f64(bj)];
            (aj, bj) = (aj * aj - 2.0 * bj, bj * bj);
        }
        let num = p.numerator();
        let [n0, n1, n2] = num.map(|c| c.to_f64());
        // Impulse response of the recursion alone, r[n] for n < N.
        let mut r = [0.0; 64];
        for n in 0..N {
            let r1 = if n >= 1 { r[n - 1] } else { 0.0 };
            let r2 = if n >= 2 { r[n - 2] } else { 0.0 };
            r[n] = if n == 0 { 1.0 } else { 0.0 } + a * r1 - b * r2;
        }
        let r = |n: isize| if n >= 0 { r[n as usize] } else { 0.0 };
        let lanes = |f: &dyn Fn(isize) -> f64| Lanes::from_fn(|i| T::from_f64(f(i as isize)));
        let homogeneous = |mut y1: f64, mut y2: f64| {
            Lanes::from_fn(|_| {
                let y = a * y1 - b * y2;
                y2 = y1;
                y1 = y;
                T::from_f64(y)
            })
        };
        VecSecondOrder {
            num,
            rounds,
            taps: core::array::from_fn(|j| {
                let j = j as isize;
                lanes(&|i| n0 * r(i - j) + n1 * r(i - j - 1) + n2 * r(i - j - 2))
            }),
            history: [lanes(&|i| n2 * r(i)), lanes(&|i| n1 * r(i) + n2 * r(i - 1))],
            carry1: homogeneous(1.0, 0.0),
            carry2: homogeneous(0.0, 1.0),
        }
    }
}

impl<T: Float, const N: usize> VecSecondOrder<T, N> {
    /// One block evaluated round by round, for checking the folded form.
    pub fn process_rounds(&self, x: Lanes<T, N>, (prev, prev_y): &mut (Lanes<T, N>, Lanes<T, N>)) -> Lanes<T, N> {
        let v = shift_add_block(self.num, &self.rounds[..log2(N)], x, *prev);
        let y = v.mul_add(prev_y.0[N - 1], self.carry1).mul_add(prev_y.0[N - 2], self.carry2);
        *prev = x;
        *prev_y = y;
        y
    }
}

impl<T: Float, const N: usize> FilterParam<Lanes<T, N>> for VecSecondOrder<T, N> {
    /// `(previous input block, previous output block)`
    type State = (Lanes<T, N>, Lanes<T, N>);

    #[inline(always)]
    fn initial_state() -> Self::State {
        (Lanes::splat(T::zero()), Lanes::splat(T::zero()))
    }

    #[inline(always)]
    fn process(&self, x: Lanes<T, N>, (prev, prev_y): &mut Self::State) -> Lanes<T, N> {
        let feedback = self.carry1.scale(prev_y.0[N - 1]).mul_add(prev_y.0[N - 2], self.carry2);
        let mut v = self.history[0].scale(prev.0[N - 2]).mul_add(prev.0[N - 1], self.history[1]);
        for j in 0..N {
            v = v.mul_add(x.0[j], self.taps[j]);
        }
        let y = v + feedback;
        *prev = x;
        *prev_y = y;
        y
    }
}

/// Block form of the first-order allpass `y[t] = k·x[t] + x[t-1] - k·y[t-1]`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct VecAllpass<T, const N: usize> {
    k: T,
    recursion: VecFirstOrder<T, N>,
}

impl<T: Float, const N: usize> From<AllpassParam<T>> for VecAllpass<T, N> {
    fn from(p: AllpassParam<T>) -> Self {
        VecAllpass { k: p.k(), recursion: VecFirstOrder::new(-p.k()) }
    }
}

impl<T: Float, const N: usize> FilterParam<Lanes<T, N>> for VecAllpass<T, N> {
    /// `(x[t-1], y[t-1])`
    type State = (T, T);

    #[inline(always)]
    fn initial_state() -> (T, T) {
        (T::zero(), T::zero())
    }

    #[inline(always)]
    fn process(&self, x: Lanes<T, N>, (x1, y1): &mut (T, T)) -> Lanes<T, N> {
        let mut delayed = x.shifted(1);
        delayed.0[0] = *x1;
        let u = delayed.mul_add(self.k, x);
        let (y, carry) = self.recursion.block(u, *y1);
        *x1 = x.last();
        *y1 = carry;
        y
    }
}

pub fn first_order_recursive_vec<T: Float, const N: usize>(
    p: FirstOrderParam<T>,
) -> Fixed<VecFirstOrder<T, N>, Lanes<T, N>> {
    fixed(p.into())
}

pub fn second_order_recursive_vec<T: Float, const N: usize>(
    p: SecondOrderParam<T>,
) -> Fixed<VecSecondOrder<T, N>, Lanes<T, N>> {
    fixed(p.into())
}

/// A filter driven by one parameter record per block, i.e. controlled at the
/// sample rate divided by `N`. Ends when the parameter stream ends.
pub fn vector_rate_control<G, T, const N: usize>(params: G) -> crate::filter::ControlledFilter<G, Lanes<T, N>>
where
    G: Generator,
    G::Sample: FilterParam<Lanes<T, N>>,
{
    crate::filter::controlled_filter(params)
}

/// A purely recursive filter `1 / d(z)` of any order, evaluated block-wise
/// through the full decomposition: the non-recursive part runs over current
/// and past input blocks, and the remaining recursion only reaches whole
/// blocks back, so it is a plain lane-wise multiply-add.
#[derive(Clone, Debug, PartialEq)]
pub struct StridedRecursive<T, const N: usize> {
    fir: Vec<T>,
    /// `(blocks back, coefficient)`
    iir: Vec<(usize, T)>,
}

impl<T: Float, const N: usize> StridedRecursive<T, N> {
    /// `denominator[0]` must be one.
    pub fn new(denominator: &[f64]) -> Option<Self> {
        let dec = decompose_recursive(denominator, N)?;
        Some(StridedRecursive {
            fir: dec.fir.iter().map(|&c| T::from_f64(c)).collect(),
            iir: dec.iir_strided.iter().map(|&(lag, c)| (lag / N, T::from_f64(c))).collect(),
        })
    }

    fn input_blocks(&self) -> usize {
        self.fir.len().saturating_sub(1).div_ceil(N)
    }

    fn output_blocks(&self) -> usize {
        self.iir.iter().map(|&(m, _)| m).max().unwrap_or(0)
    }
}

/// Lane `i` holds `x[t + i - lag]`, reading past blocks from `history`
/// (most recent first).
#[inline]
fn lagged<T: Float, const N: usize>(cur: Lanes<T, N>, history: &[Lanes<T, N>], lag: usize) -> Lanes<T, N> {
    Lanes::from_fn(|i| {
        if i >= lag {
            cur.0[i - lag]
        } else {
            let back = lag - i;
            let block = (back - 1) / N;
            let lane = N - 1 - (back - 1) % N;
            history.get(block).map_or(T::zero(), |b| b.0[lane])
        }
    })
}

impl<T: Float, const N: usize> Causal for StridedRecursive<T, N> {
    /// `(past input blocks, past output blocks)`, most recent first.
    type State = (Vec<Lanes<T, N>>, Vec<Lanes<T, N>>);
    type Input = Lanes<T, N>;
    type Output = Lanes<T, N>;

    fn start(&self) -> Self::State {
        let zero = Lanes::splat(T::zero());
        (vec![zero; self.input_blocks()], vec![zero; self.output_blocks()])
    }

    fn step(&self, x: Lanes<T, N>, (xs, ys): &mut Self::State) -> Option<Lanes<T, N>> {
        let mut w = x.scale(self.fir[0]);
        for (lag, &c) in self.fir.iter().enumerate().skip(1) {
            w = w.mul_add(c, lagged(x, xs, lag));
        }
        for &(m, c) in &self.iir {
            w = w.mul_add(c, ys[m - 1]);
        }
        if !xs.is_empty() {
            xs.pop();
            xs.insert(0, x);
        }
        if !ys.is_empty() {
            ys.pop();
            ys.insert(0, w);
        }
        Some(w)
    }
}

/// Serially vectorized oscillator: lane `i` starts at `fraction(p + i·f)` and
/// advances by `fraction(N·f)`.
#[derive(Clone, Copy, Debug)]
pub struct OsciVec<W, T, const N: usize> {
    wave: W,
    phases: Lanes<T, N>,
    stride: T,
}

pub fn osci_vec<W, T, B, const N: usize>(wave: W, phase0: T, freq: T) -> Result<OsciVec<W, T, N>, DefinitionError>
where
    W: Fn(T) -> B,
    T: Float,
{
    check_phase(phase0)?;
    if !freq.is_finite() {
        return Err(DefinitionError::NotFinite("frequency"));
    }
    let f = fraction(freq);
    let phases = Lanes::from_fn(|i| fraction(phase0 + T::from_i32(i as i32) * f));
    let stride = fraction(T::from_i32(N as i32) * f);
    Ok(OsciVec { wave, phases, stride })
}

impl<W, T, const N: usize> OsciVec<W, T, N> {
    pub fn initial_phases(&self) -> Lanes<T, N>
    where
        T: Copy,
    {
        self.phases
    }

    pub fn stride(&self) -> T
    where
        T: Copy,
    {
        self.stride
    }
}

impl<W, T, B, const N: usize> Generator for OsciVec<W, T, N>
where
    W: Fn(T) -> B,
    T: Float,
    B: Copy,
{
    type State = Lanes<T, N>;
    type Sample = Lanes<B, N>;

    #[inline(always)]
    fn start(&self) -> Lanes<T, N> {
        self.phases
    }

    #[inline(always)]
    fn step(&self, phases: &mut Lanes<T, N>) -> Option<Lanes<B, N>> {
        let out = phases.map(&self.wave);
        *phases = phases.map(|p| wrap_once(p + self.stride));
        Some(out)
    }
}

/// Serially vectorized [`FixedOsci`](crate::generator::FixedOsci). Lane
/// phases and the block stride are exact modulo one, so the flattened stream
/// is bit-identical to the scalar oscillator.
#[derive(Clone, Copy, Debug)]
pub struct FixedOsciVec<W, T, const N: usize> {
    wave: W,
    phases: Lanes<u32, N>,
    stride: u32,
    _phase: PhantomData<fn() -> T>,
}

pub fn osci_fixed_vec<W, T, B, const N: usize>(
    wave: W,
    phase0: T,
    freq: T,
) -> Result<FixedOsciVec<W, T, N>, DefinitionError>
where
    W: Fn(T) -> B,
    T: Float,
{
    let scalar = osci_fixed(|p: T| p, phase0, freq)?;
    let (p, inc) = (scalar.phase0_fixed(), scalar.freq_fixed());
    Ok(FixedOsciVec {
        wave,
        phases: Lanes::from_fn(|i| p.wrapping_add(inc.wrapping_mul(i as u32))),
        stride: inc.wrapping_mul(N as u32),
        _phase: PhantomData,
    })
}

impl<W, T, B, const N: usize> Generator for FixedOsciVec<W, T, N>
where
    W: Fn(T) -> B,
    T: Float,
    B: Copy,
{
    type State = Lanes<u32, N>;
    type Sample = Lanes<B, N>;

    #[inline(always)]
    fn start(&self) -> Lanes<u32, N> {
        self.phases
    }

    #[inline(always)]
    fn step(&self, phases: &mut Lanes<u32, N>) -> Option<Lanes<B, N>> {
        let out = phases.map(|p| (self.wave)(from_fixed_phase(p)));
        *phases = phases.map(|p| p.wrapping_add(self.stride));
        Some(out)
    }
}

/// Serially vectorized exponential decay: lanes start at `amp·rⁱ` and decay
/// by `rᴺ` per block.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ExponentialVec<T, const N: usize> {
    init: Lanes<T, N>,
    decay: T,
}

pub fn exponential_vec<T: Float, const N: usize>(
    half_life: f64,
    amp: T,
) -> Result<ExponentialVec<T, N>, DefinitionError> {
    half_life_ratio(half_life)?;
    let init = Lanes::from_fn(|i| amp * T::from_f64(libm::exp2(-(i as f64) / half_life)));
    let decay = T::from_f64(libm::exp2(-(N as f64) / half_life));
    Ok(ExponentialVec { init, decay })
}

impl<T: Copy, const N: usize> ExponentialVec<T, N> {
    pub fn initial(&self) -> Lanes<T, N> {
        self.init
    }

    pub fn block_decay(&self) -> T {
        self.decay
    }
}

impl<T: Float, const N: usize> Generator for ExponentialVec<T, N> {
    type State = Lanes<T, N>;
    type Sample = Lanes<T, N>;

    #[inline(always)]
    fn start(&self) -> Lanes<T, N> {
        self.init
    }

    #[inline(always)]
    fn step(&self, y: &mut Lanes<T, N>) -> Option<Lanes<T, N>> {
        let out = *y;
        *y = out.scale(self.decay);
        Some(out)
    }
}

/// Serially vectorized LCG noise. The lanes jump `N` states per block with
/// the composed affine map, so the stream is bit-identical to [`noise`](crate::generator::noise).
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct NoiseVec<T, const N: usize> {
    init: Lanes<u32, N>,
    mul: u32,
    inc: u32,
    _sample: PhantomData<fn() -> T>,
}

pub fn noise_vec<T: Float, const N: usize>(seed: u32) -> NoiseVec<T, N> {
    let mut s = seed;
    let init = Lanes::from_fn(|_| {
        s = lcg_next(s);
        s
    });
    let (mut mul, mut inc) = (1u32, 0u32);
    for _ in 0..N {
        mul = mul.wrapping_mul(LCG_MULTIPLIER);
        inc = inc.wrapping_mul(LCG_MULTIPLIER).wrapping_add(LCG_INCREMENT);
    }
    NoiseVec { init, mul, inc, _sample: PhantomData }
}

impl<T: Float, const N: usize> Generator for NoiseVec<T, N> {
    type State = Lanes<u32, N>;
    type Sample = Lanes<T, N>;

    #[inline(always)]
    fn start(&self) -> Lanes<u32, N> {
        self.init
    }

    #[inline(always)]
    fn step(&self, s: &mut Lanes<u32, N>) -> Option<Lanes<T, N>> {
        let out = s.map(lcg_sample);
        *s = s.map(|x| x.wrapping_mul(self.mul).wrapping_add(self.inc));
        Some(out)
    }
}

/// Serially vectorized ramp.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RampVec<T, const N: usize> {
    init: Lanes<T, N>,
    stride: T,
}

pub fn ramp_linear_vec<T: Float, const N: usize>(start: T, slope: T) -> RampVec<T, N> {
    RampVec { init: Lanes::from_fn(|i| start + T::from_i32(i as i32) * slope), stride: T::from_i32(N as i32) * slope }
}

impl<T: Float, const N: usize> Generator for RampVec<T, N> {
    type State = Lanes<T, N>;
    type Sample = Lanes<T, N>;

    #[inline(always)]
    fn start(&self) -> Lanes<T, N> {
        self.init
    }

    #[inline(always)]
    fn step(&self, x: &mut Lanes<T, N>) -> Option<Lanes<T, N>> {
        let out = *x;
        *x = out.map(|v| v + self.stride);
        Some(out)
    }
}

/// Serially vectorized [`PulseGate`](crate::generator::PulseGate).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PulseGateVec<T, const N: usize> {
    period: u64,
    length: u64,
    _sample: PhantomData<fn() -> T>,
}

pub fn pulse_gate_vec<T: Float, const N: usize>(
    period: Option<u64>,
    length: u64,
) -> Result<PulseGateVec<T, N>, DefinitionError> {
    let g = crate::generator::pulse_gate::<T>(period, length)?;
    Ok(PulseGateVec { period: g.period(), length: g.length(), _sample: PhantomData })
}

impl<T: Float, const N: usize> Generator for PulseGateVec<T, N> {
    type State = Lanes<u64, N>;
    type Sample = Lanes<T, N>;

    fn start(&self) -> Lanes<u64, N> {
        Lanes::from_fn(|i| ((i as u128) % self.period as u128) as u64)
    }

    #[inline]
    fn step(&self, pos: &mut Lanes<u64, N>) -> Option<Lanes<T, N>> {
        let out = pos.map(|p| if p < self.length { T::one() } else { T::zero() });
        *pos = pos.map(|p| ((p as u128 + N as u128) % self.period as u128) as u64);
        Some(out)
    }
}

/// Delay of `d` samples applied to a block stream.
#[derive(Clone, Debug)]
pub struct LaneDelay<T, const N: usize> {
    samples: usize,
    _sample: PhantomData<fn(T) -> T>,
}

pub fn lane_delay<T: Float, const N: usize>(samples: usize) -> LaneDelay<T, N> {
    LaneDelay { samples, _sample: PhantomData }
}

impl<T: Float, const N: usize> Causal for LaneDelay<T, N> {
    type State = (Vec<T>, usize);
    type Input = Lanes<T, N>;
    type Output = Lanes<T, N>;

    fn start(&self) -> Self::State {
        (vec![T::zero(); self.samples], 0)
    }

    #[inline]
    fn step(&self, x: Lanes<T, N>, (ring, pos): &mut Self::State) -> Option<Lanes<T, N>> {
        if ring.is_empty() {
            return Some(x);
        }
        let mut out = x;
        for (o, v) in out.0.iter_mut().zip(x.0) {
            *o = core::mem::replace(&mut ring[*pos], v);
            *pos += 1;
            if *pos == ring.len() {
                *pos = 0;
            }
        }
        Some(out)
    }
}

/// Block form of [`karplus_strong`](crate::filter::karplus_strong).
///
/// The block feedback loop delays by `N` samples, so `delay` must be at
/// least `N`; the remainder is a sample-granular delay line.
pub fn karplus_strong_vec<T, G, const N: usize>(
    delay: usize,
    damping: FirstOrderParam<T>,
    loop_gain: T,
    excitation: G,
) -> Result<impl Generator<Sample = Lanes<T, N>> + Clone, DefinitionError>
where
    T: Float,
    G: Generator<Sample = Lanes<T, N>> + Clone,
{
    if delay < N {
        return Err(DefinitionError::NotMultiple { what: "karplus-strong delay (minimum)", value: delay, lanes: N });
    }
    let input_gain = (T::one() - damping.k()) * loop_gain;
    let path = lane_delay::<T, N>(delay - N).then(arr(move |y: Lanes<T, N>| y.scale(input_gain))).then(fixed::<
        VecFirstOrder<T, N>,
        _,
    >(
        damping.into(),
    ));
    let body = arr(|(x, c): (Lanes<T, N>, Lanes<T, N>)| {
        let y = x + c;
        (y, y)
    })
    .then(path.second::<Lanes<T, N>>());
    Ok(feedback(Lanes::splat(T::zero()), body).apply(excitation))
}
