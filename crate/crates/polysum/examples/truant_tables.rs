//! Recompute the truants of the shallow non-universal nodes by sieve.

use polysum::verify::{table_depth2, table_depth3, table_depth4};

fn main() {
    for (label, table) in [
        ("depth 2", table_depth2()),
        ("depth 3", table_depth3()),
        ("depth 4", table_depth4()),
    ] {
        println!("{label}:");
        for (sum, expected) in table {
            let got = sum.truant(10_000).unwrap();
            println!("  {sum:<20} truant {expected:>2}  recomputed {got:?}");
            assert_eq!(got.value(), Some(expected));
        }
    }
}
