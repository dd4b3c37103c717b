//! Local densities: exact rational solution densities over the p-adics,
//! with the closed form checked against brute-force counting.

use polysum::forms::CongruenceForm;
use polysum::local::{DensityCache, LocalDensity};

fn main() {
    let four_squares = CongruenceForm::diagonal(&[1, 1, 1, 1]).unwrap();
    let cache = DensityCache::new(&four_squares);
    println!("x^2+y^2+z^2+w^2, level {}:", cache.level());
    for (n, p) in [(1u64, 3u64), (1, 2), (9, 3), (10, 5), (25, 5)] {
        let LocalDensity {
            value,
            stabilized_at,
            ..
        } = cache.local_density(n, p).unwrap();
        println!("  beta_{p}({n}) = {value}  (stable at p^{stabilized_at})");
    }
    // A quaternary node's form: the target is locally represented at all
    // primes exactly when no local obstruction survives.
    let form = polysum::complete_squares(&polysum::parse_sum("P3+P3+3P3").unwrap()).unwrap();
    let cache = DensityCache::new(&form);
    for n in [69u64, 77] {
        println!(
            "target {n}: locally represented = {}",
            cache.locally_represented(n).unwrap()
        );
    }
}
