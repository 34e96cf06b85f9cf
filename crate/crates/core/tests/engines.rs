use fusion_core::filter::{first_order_recursive, FirstOrderParam};
use fusion_core::generator::{noise, osci, render, saw_wave};
use fusion_core::lanes::cum_sum;
use fusion_core::poly::{decompose_recursive, poly_mul};
use fusion_core::vector::{first_order_vec_block, noise_vec, osci_vec};
use fusion_core::{causal::run, render_blocks, render_chunked, CausalExt, Lanes};
use proptest::prelude::*;

proptest! {
    #[test]
    fn chunked_concatenation_equals_render(seed in any::<u32>(), n in 0usize..500, chunk in 1usize..64) {
        let g = fusion_core::causal::take(n).apply(noise::<f32>(seed));
        let whole = render(&g, 1000).unwrap();
        let pieces: Vec<f32> = render_chunked(&g, chunk).unwrap().flat_map(|c| c.unwrap()).collect();
        prop_assert_eq!(whole, pieces);
    }

    #[test]
    fn cum_sum_is_prefix_sum(v in prop::array::uniform8(-1_000_000i64..1_000_000)) {
        let got = cum_sum(Lanes(v));
        let mut acc = 0i64;
        for (i, x) in v.iter().enumerate() {
            acc += x;
            prop_assert_eq!(got[i], acc);
        }
    }

    #[test]
    fn block_recursion_matches_scalar(k in -0.99f64..0.99, xs in prop::collection::vec(-1.0f64..1.0, 4..256)) {
        let n = xs.len() / 4 * 4;
        let scalar = run(&first_order_recursive(FirstOrderParam::new(k).unwrap()), xs[..n].iter().copied());
        let mut carry = 0.0;
        let mut vector = Vec::new();
        for c in xs[..n].chunks_exact(4) {
            let (y, next) = first_order_vec_block(k, Lanes([c[0], c[1], c[2], c[3]]), carry);
            vector.extend(y.0);
            carry = next;
        }
        let peak = scalar.iter().fold(1e-300f64, |m, v| m.max(v.abs()));
        for (a, b) in scalar.iter().zip(&vector) {
            prop_assert!((a - b).abs() <= 1e-9 * peak);
        }
    }

    #[test]
    fn decomposition_reproduces_denominator(a in -1.9f64..1.9, b in -0.95f64..0.95, log_stride in 0u32..4) {
        let d = [1.0, -a, b];
        let dec = decompose_recursive(&d, 1 << log_stride).unwrap();
        let lhs = poly_mul(&dec.fir, &d);
        let rhs = dec.denominator();
        let scale = lhs.iter().fold(1.0f64, |m, c| m.max(c.abs()));
        for i in 0..lhs.len().max(rhs.len()) {
            let l = lhs.get(i).copied().unwrap_or(0.0);
            let r = rhs.get(i).copied().unwrap_or(0.0);
            prop_assert!((l - r).abs() <= 1e-12 * scale);
        }
        for &(lag, _) in &dec.iir_strided {
            prop_assert_eq!(lag % (1 << log_stride), 0);
        }
    }

    #[test]
    fn serial_noise_is_the_scalar_stream(seed in any::<u32>(), n in 0usize..300) {
        prop_assert_eq!(render_blocks(&noise_vec::<f32, 8>(seed), n).unwrap(), render(&noise::<f32>(seed), n).unwrap());
    }

    #[test]
    fn serial_saw_tracks_scalar(p in 0.0f64..1.0, f in 0.0f64..0.5) {
        let s = render(&osci(saw_wave::<f64>, p, f).unwrap(), 4096).unwrap();
        let v = render_blocks(&osci_vec::<_, f64, f64, 4>(saw_wave::<f64>, p, f).unwrap(), 4096).unwrap();
        prop_assert_eq!(s.len(), v.len());
        for (a, b) in s.iter().zip(&v) {
            // The saw jumps by 2 at the wrap; a phase within rounding of 0
            // may land on either side of it.
            let d = (a - b).abs();
            prop_assert!(d < 1e-9 || (d - 2.0).abs() < 1e-9);
        }
    }
}
