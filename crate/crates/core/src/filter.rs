//! Recursive filters with explicit, opaque parameter records.
//!
//! Filtering is split into three stages: generating parameters (often at a
//! control rate), resampling them to the sample rate, and the filter itself.
//! Each parameter type selects its filter through [`FilterParam`], so a
//! parameter record can only ever drive the filter it was designed for.

use alloc::vec::Vec;
use core::f64::consts::PI;
use core::marker::PhantomData;

use crate::causal::{arr, delay_line, feedback, Causal, CausalExt};
use crate::error::DefinitionError;
use crate::generator::Generator;
use crate::sample::Float;

/// A parameter record that knows how to run its filter.
///
/// The filter history does not depend on the parameter values, so a stream of
/// changing parameters can drive one running filter.
pub trait FilterParam<X> {
    type State;

    /// Zero history.
    fn initial_state() -> Self::State;
    fn process(&self, x: X, state: &mut Self::State) -> X;
}

/// `y[t] = x[t] + k·y[t-1]`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FirstOrderParam<T> {
    k: T,
}

impl<T: Float> FirstOrderParam<T> {
    /// Stable feedback coefficient, `|k| < 1`.
    pub fn new(k: T) -> Result<Self, DefinitionError> {
        if k.abs() < T::one() {
            Ok(FirstOrderParam { k })
        } else {
            Err(DefinitionError::Unstable("first-order feedback"))
        }
    }

    /// Any coefficient. With `|k| ≥ 1` the filter grows without bound.
    pub fn from_raw(k: T) -> Self {
        FirstOrderParam { k }
    }

    /// One-pole lowpass with `k = exp(-2π·fc)`.
    pub fn lowpass(fc: f64) -> Result<Self, DefinitionError> {
        check_cutoff(fc)?;
        Ok(FirstOrderParam { k: T::from_f64(libm::exp(-2.0 * PI * fc)) })
    }

    pub fn k(&self) -> T {
        self.k
    }
}

impl<T: Float> FilterParam<T> for FirstOrderParam<T> {
    type State = T;

    #[inline(always)]
    fn initial_state() -> T {
        T::zero()
    }

    #[inline(always)]
    fn process(&self, x: T, y1: &mut T) -> T {
        let y = x + self.k * *y1;
        *y1 = y;
        y
    }
}

/// Biquad `(n0 + n1·z⁻¹ + n2·z⁻²) / (1 - a·z⁻¹ + b·z⁻²)`.
///
/// The purely recursive form has numerator `1`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SecondOrderParam<T> {
    a: T,
    b: T,
    num: [T; 3],
}

impl<T: Float> SecondOrderParam<T> {
    /// `1 / (1 - a·z⁻¹ + b·z⁻²)` with both poles inside the unit circle.
    pub fn recursive(a: T, b: T) -> Result<Self, DefinitionError> {
        Self::biquad([T::one(), T::zero(), T::zero()], a, b)
    }

    /// Full biquad with both poles inside the unit circle.
    pub fn biquad(num: [T; 3], a: T, b: T) -> Result<Self, DefinitionError> {
        if b.abs() < T::one() && a.abs() < T::one() + b {
            Ok(SecondOrderParam { a, b, num })
        } else {
            Err(DefinitionError::Unstable("second-order feedback"))
        }
    }

    /// Unchecked coefficients; poles on or outside the unit circle diverge.
    pub fn from_raw(num: [T; 3], a: T, b: T) -> Self {
        SecondOrderParam { a, b, num }
    }

    /// Resonant lowpass by bilinear transform of `1 / (s² + s/q + 1)`,
    /// prewarped so the analog corner lands on `fc`.
    pub fn lowpass(fc: f64, q: f64) -> Result<Self, DefinitionError> {
        check_cutoff(fc)?;
        if !(q > 0.0 && q.is_finite()) {
            return Err(DefinitionError::Resonance(q));
        }
        let k = libm::tan(PI * fc);
        let k2 = k * k;
        let norm = 1.0 / (1.0 + k / q + k2);
        let n0 = k2 * norm;
        let a1 = 2.0 * (k2 - 1.0) * norm;
        let a2 = (1.0 - k / q + k2) * norm;
        let f = T::from_f64;
        Ok(SecondOrderParam { a: f(-a1), b: f(a2), num: [f(n0), f(2.0 * n0), f(n0)] })
    }

    pub fn a(&self) -> T {
        self.a
    }

    pub fn b(&self) -> T {
        self.b
    }

    pub fn numerator(&self) -> [T; 3] {
        self.num
    }

    /// Denominator coefficients `[1, -a, b]` over `z⁻¹`.
    pub fn denominator(&self) -> [T; 3] {
        [T::one(), -self.a, self.b]
    }

    /// Magnitude of the frequency response at `f` cycles per sample.
    pub fn gain_at(&self, f: f64) -> f64 {
        let num = self.num.map(Float::to_f64);
        let den = self.denominator().map(Float::to_f64);
        poly_magnitude(&num, f) / poly_magnitude(&den, f)
    }
}

/// `|Σ c·e^{-iωk}|` at `f` cycles per sample.
pub fn poly_magnitude(coeffs: &[f64], f: f64) -> f64 {
    let w = 2.0 * PI * f;
    let (mut re, mut im) = (0.0, 0.0);
    for (k, &c) in coeffs.iter().enumerate() {
        re += c * libm::cos(w * k as f64);
        im -= c * libm::sin(w * k as f64);
    }
    libm::hypot(re, im)
}

impl<T: Float> FilterParam<T> for SecondOrderParam<T> {
    /// `[x1, x2, y1, y2]`
    type State = [T; 4];

    #[inline(always)]
    fn initial_state() -> [T; 4] {
        [T::zero(); 4]
    }

    #[inline(always)]
    fn process(&self, x: T, s: &mut [T; 4]) -> T {
        let [x1, x2, y1, y2] = *s;
        let u = self.num[0] * x + self.num[1] * x1 + self.num[2] * x2;
        let y = u + self.a * y1 - self.b * y2;
        *s = [x, x1, y, y1];
        y
    }
}

/// First-order allpass `y[t] = k·x[t] + x[t-1] - k·y[t-1]`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AllpassParam<T> {
    k: T,
}

impl<T: Float> AllpassParam<T> {
    pub fn new(k: T) -> Result<Self, DefinitionError> {
        if k.abs() < T::one() {
            Ok(AllpassParam { k })
        } else {
            Err(DefinitionError::Unstable("allpass coefficient"))
        }
    }

    pub fn k(&self) -> T {
        self.k
    }
}

impl<T: Float> FilterParam<T> for AllpassParam<T> {
    /// `(x1, y1)`
    type State = (T, T);

    #[inline(always)]
    fn initial_state() -> (T, T) {
        (T::zero(), T::zero())
    }

    #[inline(always)]
    fn process(&self, x: T, (x1, y1): &mut (T, T)) -> T {
        let y = self.k * x + *x1 - self.k * *y1;
        *x1 = x;
        *y1 = y;
        y
    }
}

/// Fixed-length cascade: sections run in order.
impl<X, P: FilterParam<X>, const S: usize> FilterParam<X> for [P; S] {
    type State = [P::State; S];

    #[inline(always)]
    fn initial_state() -> Self::State {
        core::array::from_fn(|_| P::initial_state())
    }

    #[inline(always)]
    fn process(&self, x: X, state: &mut Self::State) -> X {
        let mut y = x;
        for (p, s) in self.iter().zip(state.iter_mut()) {
            y = p.process(y, s);
        }
        y
    }
}

fn check_cutoff(fc: f64) -> Result<(), DefinitionError> {
    if fc > 0.0 && fc < 0.5 {
        Ok(())
    } else {
        Err(DefinitionError::Cutoff(fc))
    }
}

/// How the resonance of a lowpass is specified.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum LowpassSpec {
    /// One pole, no resonance.
    FirstOrder,
    /// Two poles with quality factor `q`; larger `q` means a steeper knee.
    Slope { q: f64 },
    /// Two poles with the given peak amplification (linear, `> 1`) at the
    /// resonant frequency of the analog prototype.
    Resonance { peak_gain: f64 },
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum LowpassParam<T> {
    First(FirstOrderParam<T>),
    Second(SecondOrderParam<T>),
}

/// Quality factor whose two-pole lowpass peaks at `peak_gain`.
pub fn q_from_peak_gain(peak_gain: f64) -> Result<f64, DefinitionError> {
    if !(peak_gain > 1.0 && peak_gain.is_finite()) {
        return Err(DefinitionError::Resonance(peak_gain));
    }
    // |H|max² = q⁴ / (q² - 1/4) solved for the root with q > 1/√2.
    let g2 = peak_gain * peak_gain;
    Ok(libm::sqrt((g2 + libm::sqrt(g2 * g2 - g2)) / 2.0))
}

pub fn lowpass_param_from_cutoff<T: Float>(fc: f64, spec: LowpassSpec) -> Result<LowpassParam<T>, DefinitionError> {
    match spec {
        LowpassSpec::FirstOrder => FirstOrderParam::lowpass(fc).map(LowpassParam::First),
        LowpassSpec::Slope { q } => SecondOrderParam::lowpass(fc, q).map(LowpassParam::Second),
        LowpassSpec::Resonance { peak_gain } => {
            SecondOrderParam::lowpass(fc, q_from_peak_gain(peak_gain)?).map(LowpassParam::Second)
        }
    }
}

/// Quality factors of the second-order sections of an even-order Butterworth
/// lowpass, from the analog prototype pole angles.
fn butterworth_qs(order: usize) -> impl Iterator<Item = f64> {
    (0..order / 2).map(move |k| {
        let theta = PI * (2 * k + 1) as f64 / (2 * order) as f64;
        1.0 / (2.0 * libm::sin(theta))
    })
}

/// `order / 2` biquads whose cascade is a Butterworth lowpass with its −3 dB
/// point at `fc` cycles per sample.
pub fn butterworth_lowpass_cascade<T: Float>(
    order: usize,
    fc: f64,
) -> Result<Vec<SecondOrderParam<T>>, DefinitionError> {
    if order < 2 || order % 2 != 0 {
        return Err(DefinitionError::Order(order));
    }
    butterworth_qs(order).map(|q| SecondOrderParam::lowpass(fc, q)).collect()
}

/// [`butterworth_lowpass_cascade`] of order `2·S` as an array, usable as a
/// single copyable parameter record.
pub fn butterworth_sections<T: Float, const S: usize>(fc: f64) -> Result<[SecondOrderParam<T>; S], DefinitionError> {
    check_cutoff(fc)?;
    let mut qs = butterworth_qs(2 * S);
    let mut err = None;
    let sections = core::array::from_fn(|_| {
        let q = qs.next().unwrap_or(1.0);
        SecondOrderParam::lowpass(fc, q).unwrap_or_else(|e| {
            err = Some(e);
            SecondOrderParam::from_raw([T::zero(); 3], T::zero(), T::zero())
        })
    });
    match err {
        Some(e) => Err(e),
        None => Ok(sections),
    }
}

/// A filter with one parameter record for its whole life.
pub struct Fixed<P, X> {
    param: P,
    _signal: PhantomData<fn(X) -> X>,
}

impl<P: Clone, X> Clone for Fixed<P, X> {
    fn clone(&self) -> Self {
        Fixed { param: self.param.clone(), _signal: PhantomData }
    }
}

impl<P: Copy, X> Copy for Fixed<P, X> {}

pub fn fixed<P: FilterParam<X>, X>(param: P) -> Fixed<P, X> {
    Fixed { param, _signal: PhantomData }
}

impl<P, X> Fixed<P, X> {
    pub fn param(&self) -> &P {
        &self.param
    }
}

impl<P: FilterParam<X>, X> Causal for Fixed<P, X> {
    type State = P::State;
    type Input = X;
    type Output = X;

    #[inline(always)]
    fn start(&self) -> P::State {
        P::initial_state()
    }

    #[inline(always)]
    fn step(&self, x: X, s: &mut P::State) -> Option<X> {
        Some(self.param.process(x, s))
    }
}

pub fn first_order_recursive<T: Float>(p: FirstOrderParam<T>) -> Fixed<FirstOrderParam<T>, T> {
    fixed(p)
}

pub fn second_order_recursive<T: Float>(p: SecondOrderParam<T>) -> Fixed<SecondOrderParam<T>, T> {
    fixed(p)
}

/// A filter fed one `(parameters, sample)` pair per tick.
pub struct Controlled<P, X> {
    _types: PhantomData<fn(P, X) -> X>,
}

impl<P, X> Clone for Controlled<P, X> {
    fn clone(&self) -> Self {
        *self
    }
}

impl<P, X> Copy for Controlled<P, X> {}

pub fn controlled<P: FilterParam<X>, X>() -> Controlled<P, X> {
    Controlled { _types: PhantomData }
}

impl<P: FilterParam<X>, X> Causal for Controlled<P, X> {
    type State = P::State;
    type Input = (P, X);
    type Output = X;

    #[inline(always)]
    fn start(&self) -> P::State {
        P::initial_state()
    }

    #[inline(always)]
    fn step(&self, (p, x): (P, X), s: &mut P::State) -> Option<X> {
        Some(p.process(x, s))
    }
}

/// A filter that pulls its parameters from a sample-rate parameter stream.
/// Ends when the parameter stream ends.
#[derive(Clone, Copy, Debug)]
pub struct ControlledFilter<G, X> {
    params: G,
    _signal: PhantomData<fn(X) -> X>,
}

pub fn controlled_filter<G, X>(params: G) -> ControlledFilter<G, X>
where
    G: Generator,
    G::Sample: FilterParam<X>,
{
    ControlledFilter { params, _signal: PhantomData }
}

impl<G, X> Causal for ControlledFilter<G, X>
where
    G: Generator,
    G::Sample: FilterParam<X>,
{
    type State = (G::State, <G::Sample as FilterParam<X>>::State);
    type Input = X;
    type Output = X;

    #[inline(always)]
    fn start(&self) -> Self::State {
        (self.params.start(), G::Sample::initial_state())
    }

    #[inline(always)]
    fn step(&self, x: X, (ps, fs): &mut Self::State) -> Option<X> {
        let p = self.params.step(ps)?;
        Some(p.process(x, fs))
    }
}

/// A filter whose parameters come from a control-rate stream, each record
/// driving `factor` consecutive input samples. Same output as
/// [`controlled_filter`] over [`resample_constant`], without copying the
/// record for every sample. Ends when the control stream ends.
#[derive(Clone, Copy, Debug)]
pub struct HeldFilter<G, X> {
    ctrl: ControlRated<G>,
    _signal: PhantomData<fn(X) -> X>,
}

pub fn held_filter<G, X>(ctrl: ControlRated<G>) -> HeldFilter<G, X>
where
    G: Generator,
    G::Sample: FilterParam<X>,
{
    HeldFilter { ctrl, _signal: PhantomData }
}

impl<G, X> Causal for HeldFilter<G, X>
where
    G: Generator,
    G::Sample: FilterParam<X>,
{
    /// `(control state, current record, samples left, filter history)`
    type State = (G::State, Option<G::Sample>, usize, <G::Sample as FilterParam<X>>::State);
    type Input = X;
    type Output = X;

    fn start(&self) -> Self::State {
        (self.ctrl.params.start(), None, 0, G::Sample::initial_state())
    }

    #[inline(always)]
    fn step(&self, x: X, (cs, current, left, fs): &mut Self::State) -> Option<X> {
        if *left == 0 {
            *current = Some(self.ctrl.params.step(cs)?);
            *left = self.ctrl.factor;
        }
        *left -= 1;
        current.as_ref().map(|p| p.process(x, fs))
    }
}

/// Sections of equal type run in series; the length is chosen at run time.
#[derive(Clone, Debug)]
pub struct Cascade<P, X> {
    sections: Vec<P>,
    _signal: PhantomData<fn(X) -> X>,
}

pub fn cascade<P: FilterParam<X>, X>(sections: Vec<P>) -> Cascade<P, X> {
    Cascade { sections, _signal: PhantomData }
}

impl<P, X> Cascade<P, X> {
    pub fn sections(&self) -> &[P] {
        &self.sections
    }
}

impl<P: FilterParam<X>, X> Causal for Cascade<P, X> {
    type State = Vec<P::State>;
    type Input = X;
    type Output = X;

    fn start(&self) -> Vec<P::State> {
        self.sections.iter().map(|_| P::initial_state()).collect()
    }

    #[inline]
    fn step(&self, x: X, state: &mut Vec<P::State>) -> Option<X> {
        let mut y = x;
        for (p, s) in self.sections.iter().zip(state.iter_mut()) {
            y = p.process(y, s);
        }
        Some(y)
    }
}

/// `n_stages` identical allpass sections in series.
pub fn allpass_cascade<P: FilterParam<X> + Clone, X>(n_stages: usize, p: P) -> Result<Cascade<P, X>, DefinitionError> {
    if n_stages == 0 {
        return Err(DefinitionError::ZeroCount("allpass stages"));
    }
    Ok(cascade(alloc::vec![p; n_stages]))
}

/// Linear interpolation between two parameter records.
pub trait Lerp {
    /// `a` at `t = 0`, `b` at `t = 1`.
    fn lerp(a: &Self, b: &Self, t: f64) -> Self;
}

impl Lerp for f32 {
    fn lerp(a: &Self, b: &Self, t: f64) -> Self {
        a + (b - a) * t as f32
    }
}

impl Lerp for f64 {
    fn lerp(a: &Self, b: &Self, t: f64) -> Self {
        a + (b - a) * t
    }
}

fn lerp_t<T: Float>(a: T, b: T, t: f64) -> T {
    a + (b - a) * T::from_f64(t)
}

impl<T: Float> Lerp for FirstOrderParam<T> {
    fn lerp(a: &Self, b: &Self, t: f64) -> Self {
        FirstOrderParam { k: lerp_t(a.k, b.k, t) }
    }
}

impl<T: Float> Lerp for AllpassParam<T> {
    fn lerp(a: &Self, b: &Self, t: f64) -> Self {
        AllpassParam { k: lerp_t(a.k, b.k, t) }
    }
}

impl<T: Float> Lerp for SecondOrderParam<T> {
    fn lerp(a: &Self, b: &Self, t: f64) -> Self {
        SecondOrderParam {
            a: lerp_t(a.a, b.a, t),
            b: lerp_t(a.b, b.b, t),
            num: core::array::from_fn(|i| lerp_t(a.num[i], b.num[i], t)),
        }
    }
}

impl<P: Lerp, const S: usize> Lerp for [P; S] {
    fn lerp(a: &Self, b: &Self, t: f64) -> Self {
        core::array::from_fn(|i| P::lerp(&a[i], &b[i], t))
    }
}

/// A parameter stream at a control rate `factor` times slower than the
/// sample rate.
#[derive(Clone, Copy, Debug)]
pub struct ControlRated<G> {
    params: G,
    factor: usize,
}

impl<G: Generator> ControlRated<G> {
    pub fn new(params: G, factor: usize) -> Result<Self, DefinitionError> {
        if factor == 0 {
            return Err(DefinitionError::ZeroCount("control rate factor"));
        }
        Ok(ControlRated { params, factor })
    }

    pub fn factor(&self) -> usize {
        self.factor
    }
}

/// Control values each held for `factor` samples.
#[derive(Clone, Copy, Debug)]
pub struct HoldResample<G> {
    ctrl: ControlRated<G>,
}

pub fn resample_constant<G: Generator>(ctrl: ControlRated<G>) -> HoldResample<G>
where
    G::Sample: Clone,
{
    HoldResample { ctrl }
}

impl<G: Generator> Generator for HoldResample<G>
where
    G::Sample: Clone,
{
    /// `(control state, held value, samples left)`
    type State = (G::State, Option<G::Sample>, usize);
    type Sample = G::Sample;

    fn start(&self) -> Self::State {
        (self.ctrl.params.start(), None, 0)
    }

    #[inline(always)]
    fn step(&self, (cs, held, left): &mut Self::State) -> Option<G::Sample> {
        if *left == 0 {
            *held = Some(self.ctrl.params.step(cs)?);
            *left = self.ctrl.factor;
        }
        *left -= 1;
        held.clone()
    }
}

/// Straight-line segments between consecutive control values; the stream
/// ends when no next value is available to interpolate towards.
#[derive(Clone, Copy, Debug)]
pub struct LinearResample<G> {
    ctrl: ControlRated<G>,
}

pub fn resample_linear<G: Generator>(ctrl: ControlRated<G>) -> LinearResample<G>
where
    G::Sample: Lerp,
{
    LinearResample { ctrl }
}

impl<G: Generator> Generator for LinearResample<G>
where
    G::Sample: Lerp,
{
    /// `(control state, segment end points, position in segment)`
    type State = (G::State, Option<(G::Sample, G::Sample)>, usize);
    type Sample = G::Sample;

    fn start(&self) -> Self::State {
        (self.ctrl.params.start(), None, 0)
    }

    fn step(&self, (cs, seg, pos): &mut Self::State) -> Option<G::Sample> {
        let gen = &self.ctrl.params;
        match seg.take() {
            None => {
                let a = gen.step(cs)?;
                let b = gen.step(cs)?;
                *seg = Some((a, b));
                *pos = 0;
            }
            Some((_, b)) if *pos == self.ctrl.factor => {
                let c = gen.step(cs)?;
                *seg = Some((b, c));
                *pos = 0;
            }
            kept => *seg = kept,
        }
        let (a, b) = seg.as_ref()?;
        let out = G::Sample::lerp(a, b, *pos as f64 / self.ctrl.factor as f64);
        *pos += 1;
        Some(out)
    }
}

/// Plucked string: the excitation plus its own output fed back through a
/// delay of `delay` samples, a unity-DC-gain one-pole lowpass
/// `(1 - k)·x + k·y[t-1]`, and `loop_gain`.
pub fn karplus_strong<T, G>(
    delay: usize,
    damping: FirstOrderParam<T>,
    loop_gain: T,
    excitation: G,
) -> Result<impl Generator<Sample = T> + Clone, DefinitionError>
where
    T: Float,
    G: Generator<Sample = T> + Clone,
{
    if delay == 0 {
        return Err(DefinitionError::ZeroCount("karplus-strong delay"));
    }
    let input_gain = (T::one() - damping.k()) * loop_gain;
    // The feedback loop itself contributes one sample of delay.
    let path =
        delay_line(delay - 1, T::zero()).then(arr(move |y: T| input_gain * y)).then(first_order_recursive(damping));
    let body = arr(|(x, c): (T, T)| {
        let y = x + c;
        (y, y)
    })
    .then(path.second::<T>());
    Ok(feedback(T::zero(), body).apply(excitation))
}
