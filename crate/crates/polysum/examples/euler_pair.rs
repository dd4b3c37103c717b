//! Two sums with identical represented sets: a square plus two triangular
//! copies represents exactly what two triangular copies do.

use polysum::parse_sum;

fn main() {
    let a = parse_sum("P3+P3").unwrap();
    let b = parse_sum("P4+2P3").unwrap();
    let bound = 1_000_000;
    let sa = a.represented_set(bound).unwrap();
    let sb = b.represented_set(bound).unwrap();
    for n in 0..=bound {
        assert_eq!(sa.contains(n), sb.contains(n), "first difference at {n}");
    }
    println!("{a} and {b} agree on [0, {bound}]");
    println!(
        "first missing: {:?} / {:?}",
        sa.missing().next(),
        sb.missing().next()
    );
}
