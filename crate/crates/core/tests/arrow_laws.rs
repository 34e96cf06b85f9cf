use fusion_core::causal::{arr, delay1, feedback, first, run, Causal, CausalExt};
use proptest::prelude::*;

/// A small family of integer processes, some stateful.
#[derive(Clone, Debug)]
enum Leaf {
    Affine(i64, i64),
    Delay(i64),
    Sum,
}

enum LeafState {
    None,
    Delay(i64),
    Sum(i64),
}

impl Causal for Leaf {
    type State = LeafState;
    type Input = i64;
    type Output = i64;

    fn start(&self) -> LeafState {
        match self {
            Leaf::Affine(..) => LeafState::None,
            Leaf::Delay(init) => LeafState::Delay(delay1(*init).start()),
            Leaf::Sum => LeafState::Sum(0),
        }
    }

    fn step(&self, x: i64, s: &mut LeafState) -> Option<i64> {
        match (self, s) {
            (&Leaf::Affine(a, b), LeafState::None) => {
                arr(move |x: i64| a.wrapping_mul(x).wrapping_add(b)).step(x, &mut ())
            }
            (Leaf::Delay(init), LeafState::Delay(st)) => delay1(*init).step(x, st),
            (Leaf::Sum, LeafState::Sum(c)) => {
                let body = arr(|(x, c): (i64, i64)| {
                    let y = x.wrapping_add(c);
                    (y, y)
                });
                let fb = feedback(0i64, body);
                let mut st = ((), *c);
                let y = fb.step(x, &mut st);
                *c = st.1;
                y
            }
            _ => unreachable!(),
        }
    }
}

fn leaf() -> impl Strategy<Value = Leaf> {
    prop_oneof![
        (-5i64..5, -100i64..100).prop_map(|(a, b)| Leaf::Affine(a, b)),
        (-100i64..100).prop_map(Leaf::Delay),
        Just(Leaf::Sum),
    ]
}

fn signal() -> impl Strategy<Value = Vec<i64>> {
    prop::collection::vec(-1000i64..1000, 0..64)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn identity(f in leaf(), x in signal()) {
        let id = || arr(|x: i64| x);
        prop_assert_eq!(run(&id().then(f.clone()), x.clone()), run(&f, x.clone()));
        prop_assert_eq!(run(&f.clone().then(id()), x.clone()), run(&f, x));
    }

    #[test]
    fn associativity(f in leaf(), g in leaf(), h in leaf(), x in signal()) {
        let left = f.clone().then(g.clone()).then(h.clone());
        let right = f.then(g.then(h));
        prop_assert_eq!(run(&left, x.clone()), run(&right, x));
    }

    #[test]
    fn first_distributes(f in leaf(), g in leaf(), x in signal(), c in signal()) {
        let pairs: Vec<(i64, i64)> = x.iter().copied().zip(c.iter().copied()).collect();
        let left = first::<_, i64>(f.clone().then(g.clone()));
        let right = first::<_, i64>(f).then(first(g));
        prop_assert_eq!(run(&left, pairs.clone()), run(&right, pairs));
    }

    #[test]
    fn arr_composes_functions(a in -5i64..5, b in -5i64..5, x in signal()) {
        let f = move |x: i64| x.wrapping_mul(a);
        let g = move |x: i64| x.wrapping_add(b);
        prop_assert_eq!(run(&arr(f).then(arr(g)), x.clone()), run(&arr(move |x| g(f(x))), x));
    }
}
