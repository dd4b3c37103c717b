//! Analytic constants for a depth-4 node: the Eisenstein lower-bound
//! constant, the twisted-divisor infimum, and the crossover past which the
//! main term dominates any cusp bound.

use polysum::analytic::AnalyticProfile;
use polysum::forms::complete_squares;
use polysum::parse_sum;

fn main() {
    let sum = parse_sum("P3+P3+5P4+19P3").unwrap();
    let form = complete_squares(&sum).unwrap();
    let profile = AnalyticProfile::new(&form, 1e-9);
    let c_e = profile.constant_ce().unwrap();
    let ceps = profile.constant_ceps(0.25).unwrap();
    println!("{sum}:");
    println!("  C_E        = {c_e:.6}");
    println!("  C_eps(1/4) = {:.6}", ceps.value);
    for f in &ceps.factors {
        println!("    p={:<3} exponent {}  factor {:.6}", f.prime, f.exponent, f.factor);
    }
    // The cusp constant is an external input (newform computation is out
    // of scope); with it, universality reduces to a finite check.
    let crossover = profile.crossover(12.645, 0.25).unwrap();
    println!("  crossover with C_G=12.645: N0 = {}", crossover.bound);
}
