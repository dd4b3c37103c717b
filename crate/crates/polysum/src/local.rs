//! Local data at a prime: the Kronecker character, solution counts modulo
//! prime powers, local densities, and per-prime density floors.
//!
//! The local density `beta_p(n)` is computed as the stabilized limit
//! `p^{-k(r-1)} N_k(n)`, where `N_k` counts congruence-respecting solutions
//! of `Q = n (mod p^k)`. For odd p the modulus-2 conditions are dropped (2
//! is a unit); for p = 2 they are enforced exactly. When the prime power
//! needed for direct counting exceeds the budget at odd p, the count is
//! reduced by one level of Hensel descent: nonsingular solutions mod p lift
//! uniquely, and the singular ones are counted through the partially dual
//! form at target n/p.

use std::collections::HashMap;
use std::sync::{Arc, Mutex};

use num_rational::Ratio;
use num_traits::Zero;

use crate::error::{Error, Result};
use crate::forms::CongruenceForm;

pub type Rational = Ratio<i128>;

/// Largest prime-power modulus the dense counting tables may use.
const MAX_MODULUS: u64 = 1 << 17;
/// Cap on the floor-scan refinement exponent at p = 2.
const MAX_FLOOR_REFINE: u32 = 6;

/// Kronecker symbol `(a | b)`, completely multiplicative in both arguments.
pub fn kronecker(mut a: i64, mut b: i64) -> i32 {
    if b == 0 {
        return i32::from(a == 1 || a == -1);
    }
    if a % 2 == 0 && b % 2 == 0 {
        return 0;
    }
    let mut k = 1i32;
    let mut v = 0u32;
    while b % 2 == 0 {
        b /= 2;
        v += 1;
    }
    if v % 2 == 1 {
        k = match a.rem_euclid(8) {
            1 | 7 => 1,
            3 | 5 => -1,
            _ => 0,
        };
        if k == 0 {
            return 0;
        }
    }
    if b < 0 {
        b = -b;
        if a < 0 {
            k = -k;
        }
    }
    if a < 0 {
        a = -a;
        if b % 4 == 3 {
            k = -k;
        }
    }
    a %= b;
    loop {
        if a == 0 {
            return if b == 1 { k } else { 0 };
        }
        let mut v = 0u32;
        while a % 2 == 0 {
            a /= 2;
            v += 1;
        }
        if v % 2 == 1 && matches!(b % 8, 3 | 5) {
            k = -k;
        }
        if a % 4 == 3 && b % 4 == 3 {
            k = -k;
        }
        let r = a;
        a = b % r;
        b = r;
    }
}

/// The quadratic character `chi_D = (D | .)` attached to a discriminant.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct QuadraticCharacter {
    discriminant: i64,
}

impl QuadraticCharacter {
    pub fn new(discriminant: i64) -> Self {
        assert!(discriminant != 0);
        QuadraticCharacter { discriminant }
    }

    pub fn discriminant(&self) -> i64 {
        self.discriminant
    }

    pub fn eval(&self, n: i64) -> i32 {
        kronecker(self.discriminant, n)
    }

    /// A period of the character (not necessarily the conductor).
    pub fn period(&self) -> u64 {
        4 * self.discriminant.unsigned_abs()
    }
}

/// Exact local density value with the exponent at which counting stabilized.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LocalDensity {
    pub prime: u64,
    pub target: u64,
    pub value: Rational,
    pub stabilized_at: u32,
}

fn ord_p(mut n: u64, p: u64) -> u32 {
    assert!(n > 0);
    let mut k = 0;
    while n.is_multiple_of(p) {
        n /= p;
        k += 1;
    }
    k
}

fn pow_u64(p: u64, k: u32) -> Option<u64> {
    p.checked_pow(k)
}

/// Per-variable counting data at a prime: coefficient plus the 2-adic
/// congruence restriction (only honored at p = 2).
#[derive(Clone, Copy, Debug)]
struct VarClass {
    coeff: u64,
    modulus: u64,
    residue: u64,
}

fn var_classes(form: &CongruenceForm) -> Vec<VarClass> {
    form.terms()
        .iter()
        .map(|t| VarClass {
            coeff: t.coeff,
            modulus: t.modulus,
            residue: t.residue,
        })
        .collect()
}

/// Dense table of `N_k(v)` for all residues `v` mod `p^k`.
fn count_table(vars: &[VarClass], p: u64, k: u32) -> Result<Vec<u64>> {
    let m = pow_u64(p, k)
        .filter(|&m| m <= MAX_MODULUS)
        .ok_or_else(|| Error::Budget(format!("modulus {p}^{k} exceeds counting budget")))?
        as usize;
    let mut acc: Option<Vec<u64>> = None;
    for var in vars {
        let mut tbl = vec![0u64; m];
        let (start, step) = if p == 2 && var.modulus > 1 {
            (var.residue % var.modulus, var.modulus)
        } else {
            (0, 1)
        };
        let q = var.coeff % m as u64;
        let mut z = start;
        while z < m as u64 {
            let v = (q * (z * z % m as u64)) % m as u64;
            tbl[v as usize] += 1;
            z += step;
        }
        acc = Some(match acc {
            None => tbl,
            Some(prev) => cyclic_mul(&prev, &tbl),
        });
    }
    Ok(acc.unwrap_or_else(|| {
        let mut t = vec![0u64; m];
        t[0] = 1;
        t
    }))
}

/// Cyclic convolution, iterating the sparser factor.
fn cyclic_mul(a: &[u64], b: &[u64]) -> Vec<u64> {
    let m = a.len();
    let nnz = |t: &[u64]| t.iter().filter(|&&x| x != 0).count();
    let (dense, sparse) = if nnz(a) >= nnz(b) { (a, b) } else { (b, a) };
    let mut out = vec![0u64; m];
    for (i, &c) in sparse.iter().enumerate() {
        if c == 0 {
            continue;
        }
        let split = m - i;
        for j in 0..split {
            out[i + j] += dense[j] * c;
        }
        for j in split..m {
            out[i + j - m] += dense[j] * c;
        }
    }
    out
}

/// Number of congruence-respecting solutions of `Q = n (mod p^k)`.
pub fn count_solutions_mod(form: &CongruenceForm, n: u64, p: u64, k: u32) -> Result<u64> {
    let table = count_table(&var_classes(form), p, k)?;
    Ok(table[(n % table.len() as u64) as usize])
}

type CountTables = HashMap<(u64, u32), Arc<Vec<u64>>>;

/// Memoizing computer for local densities of one form. Tables are keyed by
/// `(p, k)` and shared across targets, so scans over many `n` reuse work.
pub struct DensityCache<'a> {
    form: &'a CongruenceForm,
    level: u64,
    character: QuadraticCharacter,
    tables: Mutex<CountTables>,
}

impl<'a> DensityCache<'a> {
    pub fn new(form: &'a CongruenceForm) -> Self {
        let g = form.geometry();
        DensityCache {
            form,
            level: g.level,
            character: QuadraticCharacter::new(g.discriminant as i64),
            tables: Mutex::new(HashMap::new()),
        }
    }

    pub fn character(&self) -> QuadraticCharacter {
        self.character
    }

    pub fn level(&self) -> u64 {
        self.level
    }

    fn table(&self, p: u64, k: u32) -> Result<Arc<Vec<u64>>> {
        if let Some(t) = self.tables.lock().unwrap().get(&(p, k)) {
            return Ok(Arc::clone(t));
        }
        let t = Arc::new(count_table(&var_classes(self.form), p, k)?);
        self.tables
            .lock()
            .unwrap()
            .insert((p, k), Arc::clone(&t));
        Ok(t)
    }

    fn normalized(&self, n: u64, p: u64, k: u32) -> Result<Rational> {
        let t = self.table(p, k)?;
        let count = t[(n % t.len() as u64) as usize];
        let denom = (p as i128).pow(k * (self.form.rank() as u32 - 1));
        Ok(Ratio::new(count as i128, denom))
    }

    /// `beta_p(n)`: fast closed form when `p` does not divide the level,
    /// otherwise stabilized counting.
    pub fn local_density(&self, n: u64, p: u64) -> Result<LocalDensity> {
        if n == 0 {
            return Err(Error::Invalid("local density target must be positive".into()));
        }
        if !self.level.is_multiple_of(p) {
            return Ok(self.closed_form_density(n, p));
        }
        self.density_by_counting(n, p)
    }

    /// `(1 - chi(p)/p^2) * sum_{j<=t} (chi(p)/p)^j` with `t = ord_p(n)`,
    /// valid off the level.
    pub fn closed_form_density(&self, n: u64, p: u64) -> LocalDensity {
        let chi = self.character.eval(p as i64) as i128;
        let p128 = p as i128;
        let t = ord_p(n, p);
        let lead = Ratio::new(p128 * p128 - chi, p128 * p128);
        let mut geo = Rational::zero();
        let mut term = Rational::from_integer(1);
        for _ in 0..=t {
            geo += term;
            term *= Ratio::new(chi, p128);
        }
        LocalDensity {
            prime: p,
            target: n,
            value: lead * geo,
            stabilized_at: 0,
        }
    }

    pub fn density_by_counting(&self, n: u64, p: u64) -> Result<LocalDensity> {
        let max_ord_q = self
            .form
            .terms()
            .iter()
            .map(|t| ord_p(4 * t.coeff, p))
            .max()
            .unwrap_or(0);
        let mut k = (ord_p(n, p) + max_ord_q + 1).max(1);
        loop {
            let within = |kk: u32| pow_u64(p, kk).is_some_and(|m| m <= MAX_MODULUS);
            if !within(k + 1) {
                // A vanishing count at any exponent is final: solutions mod
                // p^{k+1} would reduce to solutions mod p^k.
                let mut k_feasible = k;
                while !within(k_feasible) {
                    k_feasible -= 1;
                }
                let probe = self.normalized(n, p, k_feasible)?;
                if probe.is_zero() {
                    return Ok(LocalDensity {
                        prime: p,
                        target: n,
                        value: probe,
                        stabilized_at: k_feasible,
                    });
                }
                if p % 2 == 1 {
                    let value = self.descend_odd(n, p)?;
                    return Ok(LocalDensity {
                        prime: p,
                        target: n,
                        value,
                        stabilized_at: k,
                    });
                }
                return Err(Error::NonStabilized { p });
            }
            let a = self.normalized(n, p, k)?;
            let b = self.normalized(n, p, k + 1)?;
            if a == b {
                return Ok(LocalDensity {
                    prime: p,
                    target: n,
                    value: a,
                    stabilized_at: k,
                });
            }
            k += 1;
        }
    }

    /// One Hensel-descent step at an odd prime, used only when the direct
    /// modulus would blow the budget.
    fn descend_odd(&self, n: u64, p: u64) -> Result<Rational> {
        let coeffs: Vec<u64> = self.form.terms().iter().map(|t| t.coeff).collect();
        beta_odd_recursive(&coeffs, n, p)
    }
}

/// `beta_p` for a plain diagonal form at odd p, by counting when the
/// modulus fits and by Hensel descent otherwise.
fn beta_odd_recursive(coeffs: &[u64], n: u64, p: u64) -> Result<Rational> {
    assert!(p % 2 == 1 && n > 0);
    let r = coeffs.len() as u32;
    let max_ord_q = coeffs.iter().map(|&q| ord_p(4 * q, p)).max().unwrap_or(0);
    let k0 = (ord_p(n, p) + max_ord_q + 1).max(1);
    if pow_u64(p, k0 + 2).is_some_and(|m| m <= MAX_MODULUS) {
        let vars: Vec<VarClass> = coeffs
            .iter()
            .map(|&q| VarClass {
                coeff: q,
                modulus: 1,
                residue: 0,
            })
            .collect();
        let mut k = k0;
        loop {
            let ta = count_table(&vars, p, k)?;
            let tb = count_table(&vars, p, k + 1)?;
            let denom = |kk: u32| (p as i128).pow(kk * (r - 1));
            let a = Ratio::new(ta[(n % ta.len() as u64) as usize] as i128, denom(k));
            let b = Ratio::new(tb[(n % tb.len() as u64) as usize] as i128, denom(k + 1));
            if a == b {
                return Ok(a);
            }
            if pow_u64(p, k + 2).is_none_or(|m| m > MAX_MODULUS) {
                break;
            }
            k += 1;
        }
    }
    // Nonsingular solutions mod p lift uniquely (Hensel); singular ones
    // have every unit-coefficient variable divisible by p and reduce to the
    // partial dual form at target n/p.
    let a1 = nonsingular_count_mod_p(coeffs, n, p);
    let mut value = Ratio::new(a1 as i128, (p as i128).pow(r - 1));
    if n.is_multiple_of(p) {
        let dual: Vec<u64> = coeffs
            .iter()
            .map(|&q| if q % p == 0 { q / p } else { q * p })
            .collect();
        let s = coeffs.iter().filter(|&&q| q % p == 0).count() as i32;
        let scale = Ratio::new((p as i128).pow(s.max(0) as u32), (p as i128).pow(r - 1));
        value += scale * beta_odd_recursive(&dual, n / p, p)?;
    }
    Ok(value)
}

/// Solutions of `sum q_i z_i^2 = n (mod p)` where some variable with a unit
/// coefficient is itself a unit.
fn nonsingular_count_mod_p(coeffs: &[u64], n: u64, p: u64) -> u64 {
    let target = n % p;
    let mut count = 0u64;
    let r = coeffs.len();
    let mut z = vec![0u64; r];
    loop {
        let val: u64 = coeffs
            .iter()
            .zip(&z)
            .map(|(&q, &zi)| q % p * (zi * zi % p) % p)
            .sum::<u64>()
            % p;
        if val == target
            && coeffs
                .iter()
                .zip(&z)
                .any(|(&q, &zi)| q % p != 0 && zi != 0)
        {
            count += 1;
        }
        let mut i = 0;
        loop {
            if i == r {
                return count;
            }
            z[i] += 1;
            if z[i] < p {
                break;
            }
            z[i] = 0;
            i += 1;
        }
    }
}

impl<'a> DensityCache<'a> {
    /// Local representability: positive density at every prime of the
    /// level. Odd primes off the level leave a unimodular form of rank >= 3
    /// which is always locally universal.
    pub fn locally_represented(&self, n: u64) -> Result<bool> {
        if n == 0 {
            return Ok(true);
        }
        for p in prime_factors(self.level) {
            if self.local_density(n, p)?.value.is_zero() {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// Floor `b_p`: the minimum positive local density over admissible
    /// residue classes of the target progression.
    ///
    /// For odd p the hypothesis `ord_p(target) <= 1` bounds the scan to
    /// classes mod p^2; for p = 2 the scan modulus is refined until the
    /// floor stabilizes across two successive levels.
    pub fn density_floor(&self, p: u64) -> Result<Rational> {
        if !self.level.is_multiple_of(p) {
            return Err(Error::Invalid(format!(
                "density floor is only defined for primes dividing the level (p={p})"
            )));
        }
        if p % 2 == 1 {
            let modulus = p * p;
            let mut floor: Option<Rational> = None;
            for c in 1..modulus {
                if c % (p * p) == 0 {
                    continue; // ord constraint
                }
                let d = self.local_density(c, p)?;
                if !d.value.is_zero() {
                    floor = Some(match floor {
                        None => d.value,
                        Some(f) => f.min(d.value),
                    });
                }
            }
            return floor.ok_or_else(|| {
                Error::Invalid(format!("no admissible residue class mod {modulus} at p={p}"))
            });
        }
        let mut prev: Option<Rational> = None;
        for refine in 0..=MAX_FLOOR_REFINE {
            let modulus = 1u64 << (3 + refine);
            let step = if self.form.scale == 8 { 8 } else { 1 };
            let start = if self.form.scale == 8 {
                self.form.offset % 8
            } else {
                1
            };
            let mut floor: Option<Rational> = None;
            let mut c = start;
            while c < modulus {
                let target = if c == 0 { modulus } else { c };
                let d = self.local_density(target, 2)?;
                if !d.value.is_zero() {
                    floor = Some(match floor {
                        None => d.value,
                        Some(f) => f.min(d.value),
                    });
                }
                c += step;
            }
            let floor = floor.ok_or_else(|| {
                Error::Invalid(format!("no admissible residue class mod {modulus} at p=2"))
            })?;
            if prev == Some(floor) {
                return Ok(floor);
            }
            prev = Some(floor);
        }
        Err(Error::NonStabilized { p: 2 })
    }
}

/// Distinct prime factors by trial division.
pub fn prime_factors(mut n: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut d = 2;
    while d * d <= n {
        if n.is_multiple_of(d) {
            out.push(d);
            while n.is_multiple_of(d) {
                n /= d;
            }
        }
        d += 1;
    }
    if n > 1 {
        out.push(n);
    }
    out
}

/// `n = prod p^e` as `(p, e)` pairs.
pub fn factorize(mut n: u64) -> Vec<(u64, u32)> {
    let mut out = Vec::new();
    let mut d = 2;
    while d * d <= n {
        if n.is_multiple_of(d) {
            let mut e = 0;
            while n.is_multiple_of(d) {
                n /= d;
                e += 1;
            }
            out.push((d, e));
        }
        d += 1;
    }
    if n > 1 {
        out.push((n, 1));
    }
    out
}
