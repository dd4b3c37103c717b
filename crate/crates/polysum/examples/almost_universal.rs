//! For each critical integer t, build a sum that misses exactly t: take
//! the shallowest tree node with truant t, then pad it with three copies
//! of (t+1)P3 and one (2t+1)P3.

use polysum::verify::{node_with_truant, CRITICAL_SET};
use polysum::{PolygonalSum, Term};

fn main() {
    for t in CRITICAL_SET {
        let base = node_with_truant(t).unwrap_or_else(PolygonalSum::empty);
        let mut h = base.clone();
        for _ in 0..3 {
            h = h.extended(Term::new(t + 1, 3).unwrap());
        }
        h = h.extended(Term::new(2 * t + 1, 3).unwrap());
        let missing: Vec<u64> = h.represented_set(2_000).unwrap().missing().collect();
        println!("t={t:>2}  base {base:<22} misses {missing:?}");
        assert_eq!(missing, vec![t]);
    }
}
