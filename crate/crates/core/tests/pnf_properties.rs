mod support;

use proptest::prelude::*;
use stlmpc_core::stl::{robustness_signal, to_pnf, OutputMap};
use stlmpc_core::Matrix;
use support::{formula_strategy, trace_strategy};

const LEN: usize = 14;

fn identity_map(p: usize) -> OutputMap {
    OutputMap::new(Matrix::identity(p), Matrix::zeros(p, 1), vec![0.0; p])
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn rewriting_preserves_values(f in formula_strategy(3, true), tr in trace_strategy(3, LEN)) {
        let (g, map) = to_pnf(&f, &identity_map(3));
        prop_assert!(g.is_negation_free());
        prop_assert_eq!(g.horizon(), f.horizon());
        let remapped = map.remap_trace(&tr);
        prop_assert_eq!(robustness_signal(&g, &remapped).unwrap(), robustness_signal(&f, &tr).unwrap());
    }

    #[test]
    fn rewritten_formula_is_monotone(
        f in formula_strategy(3, true),
        tr in trace_strategy(3, LEN),
        lift in proptest::collection::vec(0.0f64..1.0, 6 * LEN),
    ) {
        let (g, map) = to_pnf(&f, &identity_map(3));
        let low = map.remap_trace(&tr);
        let mut high = low.clone();
        for t in 0..LEN {
            for (k, v) in high.sample_mut(t).iter_mut().enumerate() {
                *v += lift[t * 6 + k];
            }
        }
        let a = robustness_signal(&g, &low).unwrap();
        let b = robustness_signal(&g, &high).unwrap();
        for (x, y) in a.iter().zip(&b) {
            prop_assert!(y >= x);
        }
    }

    #[test]
    fn uniform_shift_moves_robustness_by_the_shift(f in formula_strategy(3, false), tr in trace_strategy(3, LEN), z in 0.0f64..3.0) {
        let a = robustness_signal(&f, &tr).unwrap();
        let b = robustness_signal(&f, &tr.shifted(z)).unwrap();
        for (x, y) in a.iter().zip(&b) {
            prop_assert!((y - x - z).abs() <= 1e-12);
        }
    }
}
