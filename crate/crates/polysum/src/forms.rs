//! Diagonal quadratic forms with congruence conditions, obtained from
//! polygonal sums by completing the square, together with discriminant,
//! level, and theta coefficients.
//!
//! A sum with at least one triangular term maps to
//! `Q = sum a_i (2x_i+1)^2 + sum 2 b_j (2y_j)^2` with shift pair
//! `(mu, rho) = (8, sum a_i)`, so that `r_F(n) = r_Q(8n + rho)`. A pure sum
//! of squares is already a quadratic form and maps to itself.

use num_integer::Integer;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::sums::PolygonalSum;

/// One variable `q z^2` with `z` restricted to `residue (mod modulus)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct FormTerm {
    pub coeff: u64,
    pub modulus: u64,
    pub residue: u64,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct CongruenceForm {
    terms: Vec<FormTerm>,
    /// Shift pair: `r_F(n) = r_Q(scale * n + offset)`.
    pub scale: u64,
    pub offset: u64,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct FormGeometry {
    pub hessian_diagonal: Vec<u64>,
    pub discriminant: u64,
    pub level: u64,
}

impl CongruenceForm {
    pub fn new(terms: Vec<FormTerm>, scale: u64, offset: u64) -> Result<Self> {
        for t in &terms {
            if t.coeff == 0 || t.modulus == 0 {
                return Err(Error::Invalid("form term with zero coefficient or modulus".into()));
            }
            if t.residue >= t.modulus {
                return Err(Error::Invalid("form residue out of range".into()));
            }
        }
        Ok(CongruenceForm {
            terms,
            scale,
            offset,
        })
    }

    /// A diagonal form `sum q_i z_i^2` without congruence conditions.
    pub fn diagonal(coeffs: &[u64]) -> Result<Self> {
        Self::new(
            coeffs
                .iter()
                .map(|&q| FormTerm {
                    coeff: q,
                    modulus: 1,
                    residue: 0,
                })
                .collect(),
            1,
            0,
        )
    }

    pub fn terms(&self) -> &[FormTerm] {
        &self.terms
    }

    pub fn rank(&self) -> usize {
        self.terms.len()
    }

    /// Hessian diagonal `2 q_i`, discriminant (its product), and level (the
    /// least `N` with every `N / (2 q_i)` an even integer).
    pub fn geometry(&self) -> FormGeometry {
        let hessian: Vec<u64> = self.terms.iter().map(|t| 2 * t.coeff).collect();
        let discriminant = hessian.iter().product();
        let level = self
            .terms
            .iter()
            .map(|t| 4 * t.coeff)
            .fold(1u64, |acc, x| acc.lcm(&x));
        FormGeometry {
            hessian_diagonal: hessian,
            discriminant,
            level,
        }
    }

    /// Number of integer tuples in the allowed congruence classes with
    /// Q-value exactly `n`: the n-th theta coefficient.
    pub fn representation_count(&self, n: u64) -> u64 {
        self.count_rec(self.terms.len(), n)
    }

    fn count_rec(&self, vars_left: usize, rem: u64) -> u64 {
        if vars_left == 0 {
            return u64::from(rem == 0);
        }
        let t = self.terms[vars_left - 1];
        let mut total = 0;
        enumerate_class_arguments(t, rem, |_, v| {
            total += self.count_rec(vars_left - 1, rem - v);
        });
        total
    }

    /// Theta coefficients for `n in [0, bound]`, sieved by convolving
    /// per-variable value tables.
    pub fn theta_coefficients(&self, bound: u64) -> Result<Vec<u64>> {
        if bound >= (1 << 28) {
            return Err(Error::Budget(format!(
                "theta bound {bound} exceeds the dense-table budget"
            )));
        }
        let len = bound as usize + 1;
        let mut acc = vec![0u64; len];
        acc[0] = 1;
        for t in &self.terms {
            let mut table = vec![0u64; len];
            enumerate_class_arguments(*t, bound, |_, v| {
                table[v as usize] += 1;
            });
            // Truncated convolution acc * table.
            let mut next = vec![0u64; len];
            for (v, &c) in table.iter().enumerate() {
                if c == 0 {
                    continue;
                }
                for u in 0..len - v {
                    let a = acc[u];
                    if a != 0 {
                        next[u + v] += a * c;
                    }
                }
            }
            acc = next;
        }
        Ok(acc)
    }
}

impl std::fmt::Display for CongruenceForm {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        for (i, t) in self.terms.iter().enumerate() {
            if i > 0 {
                write!(f, " + ")?;
            }
            if t.coeff != 1 {
                write!(f, "{}", t.coeff)?;
            }
            if t.modulus == 1 {
                write!(f, "z{i}^2")?;
            } else {
                write!(f, "({}z{i}+{})^2", t.modulus, t.residue)?;
            }
        }
        Ok(())
    }
}

/// Calls `f(z, q z^2)` for every integer `z = residue (mod modulus)` with
/// value at most `rem`.
fn enumerate_class_arguments<F: FnMut(i64, u64)>(t: FormTerm, rem: u64, mut f: F) {
    let q = t.coeff;
    let m = t.modulus as i64;
    let r = t.residue as i64;
    let mut z = r;
    loop {
        let v = q.checked_mul((z * z) as u64).unwrap();
        if v > rem {
            break;
        }
        f(z, v);
        z += m;
    }
    let mut z = r - m;
    loop {
        let v = q.checked_mul((z * z) as u64).unwrap();
        if v > rem {
            break;
        }
        f(z, v);
        z -= m;
    }
}

/// Completes the square in a sum of triangular numbers and squares.
pub fn complete_squares(sum: &PolygonalSum) -> Result<CongruenceForm> {
    let mut terms = Vec::with_capacity(sum.len());
    let mut triangular_total = 0u64;
    let mut has_triangular = false;
    for t in sum.terms() {
        match t.order {
            3 => {
                has_triangular = true;
                triangular_total += t.coeff;
            }
            4 => {}
            m => {
                return Err(Error::Invalid(format!(
                    "completing the square requires orders 3 or 4, got {m}"
                )))
            }
        }
    }
    if !has_triangular {
        // A sum of squares is already a quadratic form.
        for t in sum.terms() {
            terms.push(FormTerm {
                coeff: t.coeff,
                modulus: 1,
                residue: 0,
            });
        }
        return CongruenceForm::new(terms, 1, 0);
    }
    for t in sum.terms() {
        terms.push(match t.order {
            3 => FormTerm {
                coeff: t.coeff,
                modulus: 2,
                residue: 1,
            },
            _ => FormTerm {
                coeff: 2 * t.coeff,
                modulus: 2,
                residue: 0,
            },
        });
    }
    CongruenceForm::new(terms, 8, triangular_total)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sums::PolygonalSum;

    fn sum(pairs: &[(u64, u32)]) -> PolygonalSum {
        PolygonalSum::from_pairs(pairs).unwrap()
    }

    #[test]
    fn complete_squares_mixed() {
        let f = complete_squares(&sum(&[(1, 3), (1, 3), (3, 3)])).unwrap();
        assert_eq!(f.scale, 8);
        assert_eq!(f.offset, 5);
        let coeffs: Vec<u64> = f.terms().iter().map(|t| t.coeff).collect();
        assert_eq!(coeffs, vec![1, 1, 3]);
        assert!(f.terms().iter().all(|t| t.modulus == 2 && t.residue == 1));
    }

    #[test]
    fn complete_squares_node_3_1_6_7() {
        let f = complete_squares(&sum(&[(1, 3), (1, 4), (6, 4), (7, 4)])).unwrap();
        assert_eq!(f.scale, 8);
        assert_eq!(f.offset, 1);
        let got: Vec<(u64, u64, u64)> = f
            .terms()
            .iter()
            .map(|t| (t.coeff, t.modulus, t.residue))
            .collect();
        assert_eq!(got, vec![(1, 2, 1), (2, 2, 0), (12, 2, 0), (14, 2, 0)]);
    }

    #[test]
    fn complete_squares_pure_squares_is_identity() {
        let f = complete_squares(&sum(&[(1, 4), (1, 4)])).unwrap();
        assert_eq!((f.scale, f.offset), (1, 0));
        assert_eq!(f.terms()[0].modulus, 1);
        // Value sets coincide for the identity case.
        let s = sum(&[(1, 4), (1, 4)]);
        for n in 0..100u64 {
            assert_eq!(s.representation_count(n), f.representation_count(n));
        }
    }

    #[test]
    fn complete_squares_rejects_general_orders() {
        assert!(complete_squares(&sum(&[(1, 5)])).is_err());
    }

    #[test]
    fn geometry_examples() {
        let f = complete_squares(&sum(&[(1, 3), (1, 3), (3, 3)])).unwrap();
        let g = f.geometry();
        assert_eq!(g.hessian_diagonal, vec![2, 2, 6]);
        assert_eq!(g.discriminant, 24);

        let f = complete_squares(&sum(&[(1, 3), (1, 4), (6, 4), (7, 3)])).unwrap();
        assert_eq!(f.geometry().level, 336);

        let four_squares = CongruenceForm::diagonal(&[1, 1, 1, 1]).unwrap();
        let g = four_squares.geometry();
        assert_eq!(g.discriminant, 16);
        assert_eq!(g.level, 4);
    }

    #[test]
    fn level_divides_four_d() {
        for pairs in [
            vec![(1u64, 3u32), (1, 3), (3, 3)],
            vec![(1, 3), (1, 4), (6, 4), (7, 4)],
            vec![(1, 4), (2, 4), (5, 3), (8, 4)],
        ] {
            let g = complete_squares(&sum(&pairs)).unwrap().geometry();
            assert_eq!(4 * g.discriminant % g.level, 0);
            assert_eq!(g.level % 4, 0);
        }
    }

    #[test]
    fn representation_count_examples() {
        let f = complete_squares(&sum(&[(1, 3), (1, 3), (3, 3)])).unwrap();
        assert_eq!(f.representation_count(5), 8);
        // Congruence forcing: targets off the progression have no solutions.
        assert_eq!(f.representation_count(6), 0);
        let four = CongruenceForm::diagonal(&[1, 1, 1, 1]).unwrap();
        assert_eq!(four.representation_count(1), 8);
        assert_eq!(four.representation_count(8), 24);
    }

    #[test]
    fn theta_matches_pointwise_counts() {
        let f = complete_squares(&sum(&[(1, 3), (2, 4), (3, 3)])).unwrap();
        let theta = f.theta_coefficients(400).unwrap();
        for n in 0..=400u64 {
            assert_eq!(theta[n as usize], f.representation_count(n), "n={n}");
        }
        assert_eq!(theta[0], 0); // odd residues force a positive minimum
        let four = CongruenceForm::diagonal(&[1, 1, 1, 1]).unwrap();
        let theta = four.theta_coefficients(8).unwrap();
        assert_eq!(theta[0], 1);
        assert_eq!(theta[8], 24);
    }

    #[test]
    fn shift_pair_transfers_counts() {
        for pairs in [
            vec![(1u64, 3u32), (1, 3), (3, 3)],
            vec![(1, 3), (1, 4), (6, 4), (7, 4)],
            vec![(1, 4), (1, 4), (3, 3)],
        ] {
            let s = sum(&pairs);
            let f = complete_squares(&s).unwrap();
            for n in 0..150u64 {
                assert_eq!(
                    s.representation_count(n),
                    f.representation_count(f.scale * n + f.offset),
                    "sum {s} at n={n}"
                );
            }
        }
    }
}
