mod common;

use std::collections::BTreeSet;

use tilings_core::enumerator::{enumerate_centered, Budget};
use tilings_core::tiling::CanonicalKey;

// Counts produced by the brute-force census before the enumerator existed.
const FROZEN: &[(usize, usize, usize)] = &[(3, 1, 8), (3, 2, 36), (4, 1, 20), (4, 2, 258)];

// Larger cases from the same census, too slow to brute force here.
const FROZEN_LARGE: &[(usize, usize, usize)] =
    &[(3, 3, 220), (3, 4, 1528), (4, 3, 4758), (5, 2, 1176)];

#[test]
fn brute_force_matches_frozen_counts() {
    for &(m, d, count) in FROZEN {
        let census = common::brute_force_census(m, d);
        assert_eq!(census.len(), count, "classes at m={m}, d={d}");
    }
}

#[test]
fn enumerator_matches_brute_force() {
    for &(m, d, _) in FROZEN {
        let census = common::brute_force_census(m, d);
        let found: Vec<CanonicalKey> = enumerate_centered(m, d, Budget::default())
            .unwrap()
            .iter()
            .map(|g| g.canonical_form())
            .collect();
        let unique: BTreeSet<_> = found.iter().cloned().collect();
        assert_eq!(
            unique.len(),
            found.len(),
            "duplicate classes at m={m}, d={d}"
        );
        let expected: BTreeSet<_> = census.keys().cloned().collect();
        assert_eq!(unique, expected, "class sets differ at m={m}, d={d}");
        // Rooted maps have no automorphisms, so every labelling is distinct.
        for (key, &times) in &census {
            assert_eq!(times, common::factorial(d), "labellings of {}", key.0);
        }
    }
}

#[test]
fn enumerator_matches_frozen_large_counts() {
    for &(m, d, count) in FROZEN_LARGE {
        let found = enumerate_centered(m, d, Budget::default()).unwrap();
        assert_eq!(found.len(), count, "classes at m={m}, d={d}");
    }
}
