//! Causal processes: every output sample depends only on the current and past
//! input samples, and exactly one input is consumed per output.
//!
//! The combinators form an arrow: [`arr`] lifts pure functions, [`compose`]
//! chains processes, [`first`] and [`second`] run a process on one half of a
//! pair. [`apply`] feeds a generator into a process, yielding a generator
//! again. Because a process sees each input sample exactly once, fanning a
//! signal out with [`fanout`] shares it instead of recomputing it.
//!
//! [`feedback`] closes a loop through a one-sample delay, which makes every
//! feedback network well-defined without fixpoint iteration.

use alloc::vec;
use alloc::vec::Vec;
use core::marker::PhantomData;
use core::ops::Add;

use crate::error::DefinitionError;
use crate::generator::Generator;
use crate::sample::Float;

/// A stateful, rate-preserving stream transformer.
///
/// `step` is pure in `(input, state)`. Returning `None` ends the stream.
pub trait Causal {
    type State;
    type Input;
    type Output;

    fn start(&self) -> Self::State;
    fn step(&self, input: Self::Input, state: &mut Self::State) -> Option<Self::Output>;
}

impl<P: Causal + ?Sized> Causal for &P {
    type State = P::State;
    type Input = P::Input;
    type Output = P::Output;

    #[inline(always)]
    fn start(&self) -> P::State {
        (**self).start()
    }

    #[inline(always)]
    fn step(&self, input: P::Input, state: &mut P::State) -> Option<P::Output> {
        (**self).step(input, state)
    }
}

/// Stateless lifting of a pure function.
pub struct Arr<F, A, B> {
    f: F,
    _types: PhantomData<fn(A) -> B>,
}

impl<F: Clone, A, B> Clone for Arr<F, A, B> {
    fn clone(&self) -> Self {
        Arr { f: self.f.clone(), _types: PhantomData }
    }
}

impl<F: Copy, A, B> Copy for Arr<F, A, B> {}

pub fn arr<F, A, B>(f: F) -> Arr<F, A, B>
where
    F: Fn(A) -> B,
{
    Arr { f, _types: PhantomData }
}

impl<F, A, B> Causal for Arr<F, A, B>
where
    F: Fn(A) -> B,
{
    type State = ();
    type Input = A;
    type Output = B;

    #[inline(always)]
    fn start(&self) {}

    #[inline(always)]
    fn step(&self, input: A, _: &mut ()) -> Option<B> {
        Some((self.f)(input))
    }
}

/// Serial composition: `f` then `g`.
#[derive(Clone, Copy, Debug)]
pub struct Compose<F, G> {
    f: F,
    g: G,
}

pub fn compose<F, G>(f: F, g: G) -> Compose<F, G>
where
    F: Causal,
    G: Causal<Input = F::Output>,
{
    Compose { f, g }
}

impl<F, G> Causal for Compose<F, G>
where
    F: Causal,
    G: Causal<Input = F::Output>,
{
    type State = (F::State, G::State);
    type Input = F::Input;
    type Output = G::Output;

    #[inline(always)]
    fn start(&self) -> Self::State {
        (self.f.start(), self.g.start())
    }

    #[inline(always)]
    fn step(&self, input: F::Input, (fs, gs): &mut Self::State) -> Option<G::Output> {
        let b = self.f.step(input, fs)?;
        self.g.step(b, gs)
    }
}

/// Runs `f` on the first component and passes the second through.
pub struct First<F, C> {
    f: F,
    _pass: PhantomData<fn(C) -> C>,
}

impl<F: Clone, C> Clone for First<F, C> {
    fn clone(&self) -> Self {
        First { f: self.f.clone(), _pass: PhantomData }
    }
}

pub fn first<F: Causal, C>(f: F) -> First<F, C> {
    First { f, _pass: PhantomData }
}

impl<F: Causal, C> Causal for First<F, C> {
    type State = F::State;
    type Input = (F::Input, C);
    type Output = (F::Output, C);

    #[inline(always)]
    fn start(&self) -> F::State {
        self.f.start()
    }

    #[inline(always)]
    fn step(&self, (a, c): (F::Input, C), s: &mut F::State) -> Option<(F::Output, C)> {
        Some((self.f.step(a, s)?, c))
    }
}

/// Runs `f` on the second component and passes the first through.
pub struct Second<F, C> {
    f: F,
    _pass: PhantomData<fn(C) -> C>,
}

impl<F: Clone, C> Clone for Second<F, C> {
    fn clone(&self) -> Self {
        Second { f: self.f.clone(), _pass: PhantomData }
    }
}

pub fn second<F: Causal, C>(f: F) -> Second<F, C> {
    Second { f, _pass: PhantomData }
}

impl<F: Causal, C> Causal for Second<F, C> {
    type State = F::State;
    type Input = (C, F::Input);
    type Output = (C, F::Output);

    #[inline(always)]
    fn start(&self) -> F::State {
        self.f.start()
    }

    #[inline(always)]
    fn step(&self, (c, a): (C, F::Input), s: &mut F::State) -> Option<(C, F::Output)> {
        Some((c, self.f.step(a, s)?))
    }
}

/// Feeds a generator through a process. The result is an ordinary generator.
#[derive(Clone, Copy, Debug)]
pub struct Apply<P, G> {
    process: P,
    gen: G,
}

pub fn apply<P, G>(process: P, gen: G) -> Apply<P, G>
where
    G: Generator,
    P: Causal<Input = G::Sample>,
{
    Apply { process, gen }
}

impl<P, G> Generator for Apply<P, G>
where
    G: Generator,
    P: Causal<Input = G::Sample>,
{
    type State = (G::State, P::State);
    type Sample = P::Output;

    #[inline(always)]
    fn start(&self) -> Self::State {
        (self.gen.start(), self.process.start())
    }

    #[inline(always)]
    fn step(&self, (gs, ps): &mut Self::State) -> Option<P::Output> {
        let x = self.gen.step(gs)?;
        self.process.step(x, ps)
    }
}

/// Passes the first `n` inputs through, then ends.
pub struct Take<A> {
    n: usize,
    _sample: PhantomData<fn(A) -> A>,
}

impl<A> Clone for Take<A> {
    fn clone(&self) -> Self {
        *self
    }
}

impl<A> Copy for Take<A> {}

pub fn take<A>(n: usize) -> Take<A> {
    Take { n, _sample: PhantomData }
}

impl<A> Causal for Take<A> {
    type State = usize;
    type Input = A;
    type Output = A;

    #[inline(always)]
    fn start(&self) -> usize {
        self.n
    }

    #[inline(always)]
    fn step(&self, input: A, remaining: &mut usize) -> Option<A> {
        if *remaining > 0 {
            *remaining -= 1;
            Some(input)
        } else {
            None
        }
    }
}

/// One-sample delay: emits `init`, then the previous input.
#[derive(Clone, Copy, Debug)]
pub struct Delay1<A> {
    init: A,
}

pub fn delay1<A: Clone>(init: A) -> Delay1<A> {
    Delay1 { init }
}

impl<A: Clone> Causal for Delay1<A> {
    type State = A;
    type Input = A;
    type Output = A;

    #[inline(always)]
    fn start(&self) -> A {
        self.init.clone()
    }

    #[inline(always)]
    fn step(&self, input: A, prev: &mut A) -> Option<A> {
        Some(core::mem::replace(prev, input))
    }
}

/// `n`-sample delay over a ring buffer; `n = 0` passes input through.
#[derive(Clone, Debug)]
pub struct DelayLine<A> {
    len: usize,
    init: A,
}

/// Delay by `n ≥ 1` samples, emitting `init` for the first `n` outputs.
pub fn delay_n<A: Clone>(n: usize, init: A) -> Result<DelayLine<A>, DefinitionError> {
    if n == 0 {
        return Err(DefinitionError::ZeroCount("delay length"));
    }
    Ok(DelayLine { len: n, init })
}

pub(crate) fn delay_line<A: Clone>(n: usize, init: A) -> DelayLine<A> {
    DelayLine { len: n, init }
}

impl<A> DelayLine<A> {
    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }
}

impl<A: Clone> Causal for DelayLine<A> {
    type State = (Vec<A>, usize);
    type Input = A;
    type Output = A;

    fn start(&self) -> Self::State {
        (vec![self.init.clone(); self.len], 0)
    }

    #[inline]
    fn step(&self, input: A, (ring, pos): &mut Self::State) -> Option<A> {
        if ring.is_empty() {
            return Some(input);
        }
        let out = core::mem::replace(&mut ring[*pos], input);
        *pos += 1;
        if *pos == ring.len() {
            *pos = 0;
        }
        Some(out)
    }
}

/// Feedback through a one-sample delay.
///
/// Each tick the body receives the current input together with the feedback
/// value produced on the previous tick (`init` on the first). Its second
/// output becomes the next tick's feedback value. If the body ends, the loop
/// ends at once and that tick's feedback value is dropped.
#[derive(Clone, Copy, Debug)]
pub struct Feedback<C, P> {
    init: C,
    body: P,
}

pub fn feedback<A, B, C, P>(init: C, body: P) -> Feedback<C, P>
where
    C: Clone,
    P: Causal<Input = (A, C), Output = (B, C)>,
{
    Feedback { init, body }
}

impl<A, B, C, P> Causal for Feedback<C, P>
where
    C: Clone,
    P: Causal<Input = (A, C), Output = (B, C)>,
{
    type State = (P::State, C);
    type Input = A;
    type Output = B;

    #[inline(always)]
    fn start(&self) -> Self::State {
        (self.body.start(), self.init.clone())
    }

    #[inline(always)]
    fn step(&self, input: A, (bs, fed): &mut Self::State) -> Option<B> {
        let c = fed.clone();
        let (b, next) = self.body.step((input, c), bs)?;
        *fed = next;
        Some(b)
    }
}

/// Duplicates each sample into a pair.
pub fn fanout<A: Clone>() -> Arr<fn(A) -> (A, A), A, (A, A)> {
    arr(|x: A| (x.clone(), x))
}

/// Adds the two components of a pair.
pub fn mix_proc<A: Add<Output = A>>() -> Arr<fn((A, A)) -> A, (A, A), A> {
    arr(|(a, b): (A, A)| a + b)
}

pub fn swap<A, B>((a, b): (A, B)) -> (B, A) {
    (b, a)
}

/// Phase accumulator driven by a per-sample frequency input.
///
/// Output depends only on past frequencies, so it is causal in its control.
#[derive(Clone, Copy, Debug)]
pub struct FreqModOsci<W, T> {
    wave: W,
    phase: T,
}

pub fn freq_mod_osci<W, T, B>(wave: W, phase0: T) -> Result<FreqModOsci<W, T>, DefinitionError>
where
    W: Fn(T) -> B,
    T: Float,
{
    crate::generator::check_phase(phase0)?;
    Ok(FreqModOsci { wave, phase: phase0 })
}

impl<W, T, B> Causal for FreqModOsci<W, T>
where
    W: Fn(T) -> B,
    T: Float,
{
    type State = T;
    type Input = T;
    type Output = B;

    #[inline(always)]
    fn start(&self) -> T {
        self.phase
    }

    #[inline(always)]
    fn step(&self, freq: T, phase: &mut T) -> Option<B> {
        let out = (self.wave)(*phase);
        *phase = crate::sample::fraction(*phase + freq);
        Some(out)
    }
}

/// Method syntax for the process combinators.
pub trait CausalExt: Causal + Sized {
    /// `self` followed by `next`.
    fn then<G: Causal<Input = Self::Output>>(self, next: G) -> Compose<Self, G> {
        compose(self, next)
    }

    fn first<C>(self) -> First<Self, C> {
        first(self)
    }

    fn second<C>(self) -> Second<Self, C> {
        second(self)
    }

    fn apply<G: Generator<Sample = Self::Input>>(self, gen: G) -> Apply<Self, G> {
        apply(self, gen)
    }
}

impl<P: Causal> CausalExt for P {}

/// Runs a process over a finite input sequence.
pub fn run<P: Causal>(process: &P, input: impl IntoIterator<Item = P::Input>) -> Vec<P::Output> {
    let mut state = process.start();
    let mut out = Vec::new();
    for x in input {
        match process.step(x, &mut state) {
            Some(y) => out.push(y),
            None => break,
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generator::{from_buffer, mix, noise, osci, render, saw_wave, Constant, GeneratorExt};
    use core::cell::Cell;

    #[test]
    fn arr_examples() {
        assert_eq!(run(&arr(|x: i32| x), [1, 2, 3]), [1, 2, 3]);
        assert_eq!(run(&arr(|x: i32| (x, x)), [4, 5]), [(4, 4), (5, 5)]);
        let nn = arr(|x: i32| -x).then(arr(|x: i32| -x));
        assert_eq!(run(&nn, [7, -2]), [7, -2]);
    }

    #[test]
    fn compose_of_takes_is_shorter() {
        let p = take::<i32>(3).then(take(5));
        assert_eq!(run(&p, 0..10).len(), 3);
        let p = take::<i32>(5).then(take(3));
        assert_eq!(run(&p, 0..10).len(), 3);
    }

    #[test]
    fn first_and_second() {
        let p = first::<_, char>(arr(|x: i32| x * 10));
        assert_eq!(run(&p, [(1, 'a'), (2, 'b')]), [(10, 'a'), (20, 'b')]);
        let p = first::<_, i32>(take::<i32>(2));
        assert_eq!(run(&p, [(1, 1), (2, 2), (3, 3)]).len(), 2);

        let inputs = [(1, 5), (2, 6), (3, 7)];
        let direct = run(&second::<_, i32>(arr(|x: i32| x + 100)), inputs);
        let via_swap = arr(swap::<i32, i32>).then(first::<_, i32>(arr(|x: i32| x + 100))).then(arr(swap::<i32, i32>));
        assert_eq!(direct, run(&via_swap, inputs));
    }

    #[test]
    fn take_examples() {
        assert!(run(&take::<i32>(0), [1, 2]).is_empty());
        assert_eq!(run(&take(3), [5, 6, 7, 8]), [5, 6, 7]);
    }

    #[test]
    fn apply_examples() {
        let g = osci(saw_wave::<f32>, 0.0, 0.1).unwrap();
        assert_eq!(render(&apply(arr(|x: f32| x), g), 20).unwrap(), render(&g, 20).unwrap());
        assert_eq!(render(&apply(take(7), noise::<f32>(1)), 100).unwrap().len(), 7);
    }

    #[test]
    fn delay_examples() {
        assert_eq!(run(&delay1(0), [1, 2, 3]), [0, 1, 2]);
        assert_eq!(run(&delay1(9), [0]), [9]);
        assert_eq!(run(&delay1(1).then(delay1(2)), [5, 6, 7, 8]), [2, 1, 5, 6]);
        assert_eq!(run(&delay_n(3, 0).unwrap(), [1, 2, 3, 4]), [0, 0, 0, 1]);
        assert_eq!(run(&delay_n(1, 4).unwrap(), [1, 2, 3]), run(&delay1(4), [1, 2, 3]));
        assert_eq!(delay_n(0, 0).unwrap_err(), DefinitionError::ZeroCount("delay length"));
        assert_eq!(run(&delay_line(0, 0), [1, 2]), [1, 2]);
    }

    #[test]
    fn comb_filter_on_impulse() {
        let comb = feedback(0i64, arr(|(x, c): (i64, i64)| (x + c, x + c)));
        let impulse = (0..1000).map(|t| i64::from(t == 0));
        assert!(run(&comb, impulse).iter().all(|&y| y == 1));
    }

    #[test]
    fn feedback_ignoring_loop_is_plain_body() {
        let p = feedback(42, arr(|(x, _c): (i32, i32)| (x * 3, 0)));
        assert_eq!(run(&p, [1, 2, 3]), [3, 6, 9]);
    }

    #[test]
    fn feedback_ends_with_body() {
        let body = take::<(i32, i32)>(2).then(arr(|(x, c): (i32, i32)| (x + c, x)));
        assert_eq!(run(&feedback(0, body), [1, 2, 3, 4]), [1, 3]);
    }

    #[test]
    fn mix_proc_and_fanout() {
        assert_eq!(run(&mix_proc(), [(1, 2)]), [3]);
        let doubled = fanout::<i32>().then(mix_proc());
        assert_eq!(run(&doubled, [1, -4, 9]), [2, -8, 18]);
    }

    /// Counts its own steps in a shared cell.
    struct Probe<'a>(&'a Cell<usize>);

    impl Generator for Probe<'_> {
        type State = u32;
        type Sample = i64;
        fn start(&self) -> u32 {
            0
        }
        fn step(&self, s: &mut u32) -> Option<i64> {
            self.0.set(self.0.get() + 1);
            *s += 1;
            Some(i64::from(*s) * 3)
        }
    }

    #[test]
    fn fanout_shares_the_source() {
        let steps = Cell::new(0);
        let shared = fanout::<i64>().then(mix_proc()).apply(Probe(&steps));
        let out = render(&shared, 50).unwrap();
        assert_eq!(steps.get(), 50);

        let naive_steps = Cell::new(0);
        let naive = mix(Probe(&naive_steps), Probe(&naive_steps));
        assert_eq!(render(&naive, 50).unwrap(), out);
        assert_eq!(naive_steps.get(), 100);
    }

    #[test]
    fn freq_mod_with_constant_control_is_plain_oscillator() {
        let fm = freq_mod_osci(saw_wave::<f64>, 0.25).unwrap().apply(Constant(0.013));
        let plain = osci(saw_wave::<f64>, 0.25, 0.013).unwrap();
        let a = render(&fm, 5000).unwrap();
        let b = render(&plain, 5000).unwrap();
        for (x, y) in a.iter().zip(&b) {
            assert!((x - y).abs() < 1e-9);
        }
    }

    #[test]
    fn run_stops_at_end_of_process() {
        let buf = [1.0f32, 2.0, 3.0];
        let g = take(2).apply(from_buffer(&buf)).map(|x: f32| x * 2.0);
        assert_eq!(render(&g, 10).unwrap(), [2.0, 4.0]);
    }
}
