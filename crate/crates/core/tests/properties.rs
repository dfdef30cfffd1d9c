//! Randomized invariants over arbitrary small contexts.

use proptest::prelude::*;
use trfca_core::bitset::BitSet;
use trfca_core::cbo::{count_concepts, count_concepts_serial, derive_down, derive_up};
use trfca_core::context::FormalContext;

fn arb_context() -> impl Strategy<Value = FormalContext> {
    (1usize..=6, 1usize..=6).prop_flat_map(|(rows, cols)| {
        proptest::collection::vec(proptest::collection::vec(any::<bool>(), cols), rows).prop_map(
            move |bits| {
                let rows = bits
                    .iter()
                    .map(|r| {
                        BitSet::from_indices(
                            cols,
                            r.iter().enumerate().filter(|(_, &b)| b).map(|(j, _)| j),
                        )
                    })
                    .collect();
                FormalContext::from_rows(cols, rows)
            },
        )
    })
}

proptest! {
    #[test]
    fn derivation_is_a_galois_connection(ctx in arb_context(), seed in any::<u64>()) {
        // random object set A: A ⊆ (A↑)↓ and A↑ = ((A↑)↓)↑
        let mut a = BitSet::new(ctx.n_objects());
        for i in 0..ctx.n_objects() {
            if (seed >> (i % 64)) & 1 == 1 {
                a.set(i);
            }
        }
        let up = derive_up(&ctx, &a);
        let down = derive_down(&ctx, &up);
        prop_assert!(a.is_subset(&down));
        prop_assert_eq!(derive_up(&ctx, &down), up);
    }

    #[test]
    fn count_is_scheduling_independent(ctx in arb_context()) {
        let reference = count_concepts_serial(&ctx).unwrap();
        for workers in [1usize, 3] {
            for depth in [0usize, 2] {
                prop_assert_eq!(count_concepts(&ctx, workers, depth).unwrap(), reference);
            }
        }
    }

    #[test]
    fn row_sort_preserves_count_and_is_idempotent(ctx in arb_context()) {
        let sorted = ctx.sort_rows_for_cbo();
        prop_assert_eq!(sorted.sort_rows_for_cbo(), sorted.clone());
        prop_assert_eq!(
            count_concepts_serial(&ctx).unwrap(),
            count_concepts_serial(&sorted).unwrap()
        );
    }
}
