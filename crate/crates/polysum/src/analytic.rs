//! Eisenstein coefficients through the product of local densities, the
//! constants `C_E` and `C_eps`, the crossover bound, and cusp-residual
//! diagnostics.
//!
//! The cusp constant `C_G` is always an external input; nothing here
//! computes newforms.

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::sync::Mutex;

use num_traits::{ToPrimitive, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::forms::CongruenceForm;
use crate::local::{factorize, prime_factors, DensityCache, QuadraticCharacter, Rational};

/// Approximation of `L(2, chi)` with its tail bound.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct L2Value {
    pub value: f64,
    pub error_bound: f64,
}

/// Partial sum of `sum chi(n)/n^2`; the dropped tail is below
/// `sum_{n>T} n^{-2} < 1/T` with `T = ceil(1/tolerance)`.
pub fn dirichlet_l2(chi: &QuadraticCharacter, tolerance: f64) -> L2Value {
    assert!(tolerance > 0.0);
    let terms = (1.0 / tolerance).ceil() as u64;
    let period = chi.period();
    let vals: Vec<i32> = (0..period).map(|r| chi.eval(r as i64)).collect();
    let mut sum = 0.0;
    for n in 1..=terms {
        let c = vals[(n % period) as usize];
        if c != 0 {
            sum += c as f64 / (n as f64 * n as f64);
        }
    }
    L2Value {
        value: sum,
        error_bound: 1.0 / terms as f64,
    }
}

/// Twisted divisor sum `sum_{d|n} chi(d)/d`.
pub fn sigma_twisted(n: u64, chi: &QuadraticCharacter) -> f64 {
    assert!(n >= 1);
    factorize(n)
        .into_iter()
        .map(|(p, e)| geometric_char_sum(chi.eval(p as i64), p, e))
        .product()
}

/// `sum_{j=0}^{t} (chi(p)/p)^j`.
fn geometric_char_sum(chi_p: i32, p: u64, t: u32) -> f64 {
    let x = chi_p as f64 / p as f64;
    let mut sum = 0.0;
    let mut term = 1.0;
    for _ in 0..=t {
        sum += term;
        term *= x;
    }
    sum
}

/// Divisor count.
pub fn sigma_zero(n: u64) -> u64 {
    assert!(n >= 1);
    factorize(n).into_iter().map(|(_, e)| e as u64 + 1).product()
}

/// The 2-adic valuation pattern of targets in the progression
/// `scale * n + offset`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TwoAdicConstraint {
    Any,
    Exactly(u32),
    AtLeast(u32),
}

/// One per-prime factor of the `C_eps` infimum.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct PrimeFactor {
    pub prime: u64,
    pub exponent: u32,
    pub factor: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct CepsBreakdown {
    pub epsilon: f64,
    pub value: f64,
    pub factors: Vec<PrimeFactor>,
}

#[derive(Clone, Debug, Serialize)]
pub struct CrossoverReport {
    pub c_e: f64,
    pub c_g: f64,
    pub c_eps: f64,
    pub epsilon: f64,
    pub bound: u64,
}

/// Least `N0` with `C_E C_eps n^{1-eps} > C_G n^{1/2}` for all `n >= N0`.
pub fn crossover_bound(c_e: f64, c_g: f64, c_eps: f64, epsilon: f64) -> u64 {
    assert!(c_e > 0.0 && c_g >= 0.0 && c_eps > 0.0);
    assert!(epsilon > 0.0 && epsilon < 0.5);
    let ratio = c_g / (c_e * c_eps);
    if ratio <= 1.0 {
        return 1;
    }
    let x = ratio.powf(1.0 / (0.5 - epsilon));
    (x.floor() as u64 + 1).max(1)
}

/// Analytic data of one rank-4 form: geometry, character, `L(2, chi_D)`,
/// cached local densities, and lazily computed floors.
pub struct AnalyticProfile<'a> {
    form: &'a CongruenceForm,
    cache: DensityCache<'a>,
    pub discriminant: u64,
    pub level: u64,
    pub character: QuadraticCharacter,
    pub l2: L2Value,
    level_primes: Vec<u64>,
    floors: Mutex<Option<BTreeMap<u64, Rational>>>,
}

impl<'a> AnalyticProfile<'a> {
    pub fn new(form: &'a CongruenceForm, tolerance: f64) -> Self {
        let g = form.geometry();
        let cache = DensityCache::new(form);
        let character = cache.character();
        AnalyticProfile {
            form,
            cache,
            discriminant: g.discriminant,
            level: g.level,
            character,
            l2: dirichlet_l2(&character, tolerance),
            level_primes: prime_factors(g.level),
            floors: Mutex::new(None),
        }
    }

    pub fn form(&self) -> &CongruenceForm {
        self.form
    }

    pub fn cache(&self) -> &DensityCache<'a> {
        &self.cache
    }

    /// `b_p` for every prime of the level.
    pub fn floors(&self) -> Result<BTreeMap<u64, Rational>> {
        if let Some(f) = self.floors.lock().unwrap().as_ref() {
            return Ok(f.clone());
        }
        let mut out = BTreeMap::new();
        for &p in &self.level_primes {
            out.insert(p, self.cache.density_floor(p)?);
        }
        *self.floors.lock().unwrap() = Some(out.clone());
        Ok(out)
    }

    /// `a_E(n)`: the Siegel-Minkowski product with the off-level part
    /// collapsed through the unimodular closed form.
    pub fn eisenstein_coefficient(&self, n: u64) -> Result<f64> {
        if self.form.rank() != 4 {
            return Err(Error::Invalid("Eisenstein coefficients need rank 4".into()));
        }
        assert!(n >= 1);
        let mut value = 4.0 * PI * PI * n as f64 / (self.discriminant as f64).sqrt()
            / self.l2.value;
        for &p in &self.level_primes {
            let beta = self.cache.local_density(n, p)?.value;
            if beta.is_zero() {
                return Ok(0.0);
            }
            value *= beta.to_f64().unwrap();
            let chi_p = self.character.eval(p as i64) as f64;
            value /= 1.0 - chi_p / (p as f64 * p as f64);
        }
        for (p, e) in factorize(n) {
            if !self.level.is_multiple_of(p) {
                value *= geometric_char_sum(self.character.eval(p as i64), p, e);
            }
        }
        Ok(value)
    }

    /// `C_E = 4 pi^2 / (L(2,chi_D) sqrt(D)) * prod_{p|N} b_p / (1 - chi(p) p^-2)`,
    /// the leading constant of the Eisenstein lower bound
    /// `a_E(n) >= C_E sigma_chi(n) n` on admissible targets.
    pub fn constant_ce(&self) -> Result<f64> {
        let mut value = 4.0 * PI * PI / (self.l2.value * (self.discriminant as f64).sqrt());
        for (&p, b_p) in &self.floors()? {
            let chi_p = self.character.eval(p as i64) as f64;
            value *= b_p.to_f64().unwrap() / (1.0 - chi_p / (p as f64 * p as f64));
        }
        Ok(value)
    }

    /// Valuation pattern forced on targets at 2 by the shift pair.
    pub fn two_adic_constraint(&self) -> TwoAdicConstraint {
        if self.form.scale != 8 {
            return TwoAdicConstraint::Any;
        }
        match self.form.offset % 8 {
            r if r % 2 == 1 => TwoAdicConstraint::Exactly(0),
            r if r % 4 == 2 => TwoAdicConstraint::Exactly(1),
            4 => TwoAdicConstraint::Exactly(2),
            _ => TwoAdicConstraint::AtLeast(3),
        }
    }

    /// Admissibility of a target for the extremal constants: it lies on the
    /// progression at 2 and has valuation at most 1 at odd level primes.
    pub fn admissible_target(&self, n: u64) -> bool {
        if n == 0 {
            return false;
        }
        let t2 = n.trailing_zeros().min(63);
        let ok2 = match self.two_adic_constraint() {
            TwoAdicConstraint::Any => true,
            TwoAdicConstraint::Exactly(k) => t2 == k,
            TwoAdicConstraint::AtLeast(k) => t2 >= k,
        };
        ok2 && self
            .level_primes
            .iter()
            .filter(|&&p| p != 2)
            .all(|&p| !n.is_multiple_of(p * p))
    }

    /// `C_eps = inf n^eps sigma_chi(n) / sigma_0(n)` over admissible
    /// targets, as a product of per-prime minima.
    ///
    /// A prime with `p^eps >= 4` contributes at least
    /// `4^t (1 - 1/p) / (2(t+1)) >= 1` at every exponent, so the scan stops
    /// at that cutoff; forced valuations at level primes restrict the
    /// per-prime exponent range instead of the free minimum over t >= 0.
    pub fn constant_ceps(&self, epsilon: f64) -> Result<CepsBreakdown> {
        assert!(epsilon > 0.0 && epsilon < 0.5);
        let cutoff = 4f64.powf(1.0 / epsilon);
        if cutoff > 2e7 {
            return Err(Error::Budget(format!(
                "epsilon {epsilon} pushes the prime cutoff to {cutoff:.0}"
            )));
        }
        let mut value = 1.0;
        let mut factors = Vec::new();
        let (f2, t2) = self.min_factor_at_two(epsilon);
        if f2 != 1.0 {
            factors.push(PrimeFactor {
                prime: 2,
                exponent: t2,
                factor: f2,
            });
            value *= f2;
        }
        for p in odd_primes_up_to(cutoff.ceil() as u64) {
            let chi_p = self.character.eval(p as i64);
            let capped = self.level.is_multiple_of(p);
            let (f, t) = min_prime_factor(p, chi_p, epsilon, capped.then_some(1));
            if f < 1.0 {
                factors.push(PrimeFactor {
                    prime: p,
                    exponent: t,
                    factor: f,
                });
                value *= f;
            }
        }
        Ok(CepsBreakdown {
            epsilon,
            value,
            factors,
        })
    }

    /// The 2-part factor, honoring the forced valuation. `chi(2)` vanishes
    /// whenever the constraint is non-trivial (2 divides D), so the factor
    /// is `2^{eps t} / (t+1)` over allowed t.
    fn min_factor_at_two(&self, epsilon: f64) -> (f64, u32) {
        let chi_2 = self.character.eval(2);
        let one = |t: u32| {
            2f64.powf(epsilon * t as f64) * geometric_char_sum(chi_2, 2, t) / (t as f64 + 1.0)
        };
        match self.two_adic_constraint() {
            TwoAdicConstraint::Exactly(k) => (one(k), k),
            TwoAdicConstraint::Any => {
                let (f, t) = min_prime_factor(2, chi_2, epsilon, None);
                if f < 1.0 {
                    (f, t)
                } else {
                    (1.0, 0)
                }
            }
            TwoAdicConstraint::AtLeast(k) => {
                let mut best = (one(k), k);
                let mut t = k + 1;
                loop {
                    let f = one(t);
                    if f < best.0 {
                        best = (f, t);
                    }
                    let envelope =
                        2f64.powf(epsilon * t as f64) * 0.5 / (t as f64 + 1.0);
                    if envelope > best.0 && (t as f64 + 1.0) * epsilon * 2f64.ln() > 1.0 {
                        return best;
                    }
                    t += 1;
                }
            }
        }
    }

    /// `N0` from the computed constants and a supplied cusp constant.
    pub fn crossover(&self, c_g: f64, epsilon: f64) -> Result<CrossoverReport> {
        let c_e = self.constant_ce()?;
        let c_eps = self.constant_ceps(epsilon)?.value;
        Ok(CrossoverReport {
            c_e,
            c_g,
            c_eps,
            epsilon,
            bound: crossover_bound(c_e, c_g, c_eps, epsilon),
        })
    }

    /// `r_Q(n) - a_E(n)`.
    pub fn cusp_residual(&self, n: u64) -> Result<f64> {
        Ok(self.form.representation_count(n) as f64 - self.eisenstein_coefficient(n)?)
    }

    /// `max |r_Q(n) - a_E(n)| / (sigma_0(n) sqrt(n))` over a range,
    /// using one theta pass for the counts.
    pub fn max_deligne_ratio(&self, lo: u64, hi: u64) -> Result<f64> {
        assert!(1 <= lo && lo <= hi);
        let theta = self.form.theta_coefficients(hi)?;
        let mut max = 0.0f64;
        for n in lo..=hi {
            let residual = theta[n as usize] as f64 - self.eisenstein_coefficient(n)?;
            let ratio = residual.abs() / (sigma_zero(n) as f64 * (n as f64).sqrt());
            max = max.max(ratio);
        }
        Ok(max)
    }
}

/// Free-function form of the Eisenstein coefficient; builds a transient
/// profile, so loops should construct an [`AnalyticProfile`] instead.
pub fn eisenstein_coefficient(form: &CongruenceForm, n: u64, tolerance: f64) -> Result<f64> {
    AnalyticProfile::new(form, tolerance).eisenstein_coefficient(n)
}

/// Minimum of `p^{eps t} sigma_chi(p^t) / sigma_0(p^t)` over `t >= 0`
/// (capped when a level prime forces valuation at most `cap`), with the
/// attaining exponent. The lower envelope `p^{eps t}(1-1/p)/(t+1)` is
/// eventually increasing, which bounds the scan.
fn min_prime_factor(p: u64, chi_p: i32, epsilon: f64, cap: Option<u32>) -> (f64, u32) {
    let one = |t: u32| {
        (p as f64).powf(epsilon * t as f64) * geometric_char_sum(chi_p, p, t)
            / (t as f64 + 1.0)
    };
    let mut best = (1.0, 0u32);
    let mut t = 1u32;
    loop {
        if let Some(c) = cap {
            if t > c {
                return best;
            }
        }
        let f = one(t);
        if f < best.0 {
            best = (f, t);
        }
        let envelope =
            (p as f64).powf(epsilon * t as f64) * (1.0 - 1.0 / p as f64) / (t as f64 + 1.0);
        if envelope > best.0 && (t as f64 + 1.0) * epsilon * (p as f64).ln() > 1.0 {
            return best;
        }
        t += 1;
    }
}

fn odd_primes_up_to(bound: u64) -> Vec<u64> {
    if bound < 3 {
        return Vec::new();
    }
    let n = bound as usize;
    let mut composite = vec![false; n + 1];
    let mut out = Vec::new();
    for p in 3..=n {
        if p % 2 == 1 && !composite[p] {
            out.push(p as u64);
            let mut m = p * p;
            while m <= n {
                composite[m] = true;
                m += p;
            }
        }
    }
    out
}
