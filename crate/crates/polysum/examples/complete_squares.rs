//! Complete squares: turn a polygonal sum into a diagonal quadratic form
//! with congruence conditions and a shift pair, then inspect its geometry.

use polysum::forms::complete_squares;
use polysum::parse_sum;

fn main() {
    for text in ["P3+P3+5P4+19P3", "P4+P4+P4+P4", "P3+P4+6P4"] {
        let sum = parse_sum(text).unwrap();
        let form = complete_squares(&sum).unwrap();
        let g = form.geometry();
        println!("{sum}: r(n) counted at target {}n+{}", form.scale, form.offset);
        for t in form.terms() {
            println!("  {}z^2 with z = {} (mod {})", t.coeff, t.residue, t.modulus);
        }
        println!("  discriminant {}  level {}", g.discriminant, g.level);
        // The shift pair is exact: representation counts agree.
        for n in 1..=10u64 {
            assert_eq!(
                sum.representation_count(n),
                form.representation_count(form.scale * n + form.offset)
            );
        }
    }
}
