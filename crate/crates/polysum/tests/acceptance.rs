//! Acceptance suite: one test per criterion, each printing a single
//! pass/fail line. Run with `--nocapture` to see the lines.

use std::time::{Duration, Instant};

use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

use polysum::analytic::{crossover_bound, eisenstein_coefficient, AnalyticProfile};
use polysum::escalator::{build_tree, TreeOptions};
use polysum::forms::CongruenceForm;
use polysum::local::DensityCache;
use polysum::parse_sum;
use polysum::verify::{self, CRITICAL_SET};

struct Criterion {
    name: &'static str,
    limit: Duration,
    start: Instant,
}

impl Criterion {
    fn new(name: &'static str, limit_secs: u64) -> Self {
        Criterion {
            name,
            limit: Duration::from_secs(limit_secs),
            start: Instant::now(),
        }
    }

    fn finish(self, pass: bool) {
        let elapsed = self.start.elapsed();
        let in_time = elapsed <= self.limit;
        let verdict = if pass && in_time { "pass" } else { "fail" };
        println!(
            "criterion {}: {verdict} ({elapsed:.1?} of {:?} allowed)",
            self.name, self.limit
        );
        assert!(pass, "criterion {} failed", self.name);
        assert!(
            in_time,
            "criterion {} exceeded its time limit: {elapsed:?}",
            self.name
        );
    }
}

#[test]
fn criterion_01_truant_tables() {
    let c = Criterion::new("1 (truant tables)", 60);
    let report = verify::verify_truant_tables(10_000).unwrap();
    let pass = report.passed() && report.data["pairs"] == 40;
    c.finish(pass);
}

#[test]
fn criterion_02_critical_set() {
    let c = Criterion::new("2 (critical set and tree depth)", 600);
    let tree = build_tree(&TreeOptions {
        cap: 100_000,
        ..Default::default()
    })
    .unwrap();
    let truants = tree.truant_set();
    let deepest = tree.truant_table(5);
    let pass = truants == CRITICAL_SET
        && tree.max_non_universal_depth() == 5
        && deepest.len() == 2
        && deepest.iter().all(|(s, t)| {
            *t == 48 && s.to_string().starts_with("P3+P4+7P4+7P4+21P")
        });
    c.finish(pass);
}

#[test]
fn criterion_03_exceptional_sets() {
    let c = Criterion::new("3 (exceptional-set characterizations)", 600);
    let claims = verify::exceptional_set_claims();
    assert_eq!(claims.len(), 14);
    let pass = claims.iter().all(|(id, claim)| {
        let r = verify::verify_exceptional_set(id, claim, 100_000).unwrap();
        if !r.passed() {
            println!("  {id} failed: {:?}", r.counterexamples);
        }
        r.passed()
    });
    c.finish(pass);
}

#[test]
fn criterion_04_constants_and_crossover() {
    let c = Criterion::new("4 (analytic constants)", 60);
    let sum = parse_sum("P3+P3+5P4+19P3").unwrap();
    let form = polysum::complete_squares(&sum).unwrap();
    let profile = AnalyticProfile::new(&form, 1e-8);
    let c_e = profile.constant_ce().unwrap();
    let ceps = profile.constant_ceps(0.25).unwrap().value;
    let n0 = crossover_bound(c_e, 12.645, ceps, 0.25);
    let reference = 152_402_970u64;
    let within = (n0 as f64 - reference as f64).abs() / reference as f64 <= 0.01;
    let pass = (0.226..=0.246).contains(&c_e) && (0.472..=0.492).contains(&ceps) && within;
    if !pass {
        println!("  C_E={c_e} C_eps={ceps} N0={n0}");
    }
    c.finish(pass);
}

#[test]
fn criterion_05_siegel_exactness() {
    let c = Criterion::new("5 (four-squares Siegel oracle)", 600);
    let form = CongruenceForm::diagonal(&[1, 1, 1, 1]).unwrap();
    let counts = form.theta_coefficients(2_000).unwrap();
    let profile = AnalyticProfile::new(&form, 1e-8);
    // Spot-check the one-shot entry point once; the loop reuses the profile.
    assert!((eisenstein_coefficient(&form, 1, 1e-8).unwrap() - 8.0).abs() < 1e-3);
    let mut pass = true;
    for n in 1..=2_000u64 {
        let r = counts[n as usize] as f64;
        let a = profile.eisenstein_coefficient(n).unwrap();
        if (r - a).abs() > 1e-4 * r.max(1.0) {
            println!("  n={n}: r={r} a_E={a}");
            pass = false;
        }
    }
    c.finish(pass);
}

#[test]
fn criterion_06_density_paths_agree() {
    let c = Criterion::new("6 (closed form vs counting)", 600);
    let mut rng = StdRng::seed_from_u64(11);
    let forms = [
        CongruenceForm::diagonal(&[1, 1, 1, 1]).unwrap(),
        polysum::complete_squares(&parse_sum("P3+P3+5P4+19P3").unwrap()).unwrap(),
        polysum::complete_squares(&parse_sum("P3+P4+7P4+7P4").unwrap()).unwrap(),
    ];
    let caches: Vec<DensityCache> = forms.iter().map(DensityCache::new).collect();
    let mut pass = true;
    let mut checked = 0;
    while checked < 50 {
        let cache = &caches[rng.gen_range(0..caches.len())];
        let p = [3u64, 5, 7, 11, 13, 17, 23, 29][rng.gen_range(0..8)];
        if cache.level() % p == 0 {
            continue;
        }
        let n = rng.gen_range(1..5_000u64);
        let fast = cache.closed_form_density(n, p).value;
        let slow = cache.density_by_counting(n, p).unwrap().value;
        if fast != slow {
            println!("  p={p} n={n}: {fast} vs {slow}");
            pass = false;
        }
        checked += 1;
    }
    c.finish(pass);
}

#[test]
fn criterion_07_euler_pair() {
    let c = Criterion::new("7 (Euler pair set equality)", 30);
    let report = verify::verify_euler(1_000_000).unwrap();
    c.finish(report.passed());
}

#[test]
fn criterion_08_sliding_identities() {
    let c = Criterion::new("8 (sliding identities and mod-5 conclusion)", 600);
    let report = verify::verify_sliding_identities(100_000).unwrap();
    if !report.passed() {
        println!("  {:?}", report.data);
    }
    c.finish(report.passed());
}

#[test]
fn criterion_09_single_miss_constructions() {
    let c = Criterion::new("9 (single-miss constructions)", 300);
    let pass = CRITICAL_SET.iter().all(|&t| {
        let r = verify::verify_single_miss(t, 5_000).unwrap();
        if !r.passed() {
            println!("  t={t}: {:?}", r.counterexamples);
        }
        r.passed()
    });
    c.finish(pass);
}

#[test]
fn criterion_10_deligne_consistency() {
    let c = Criterion::new("10 (cusp-residual consistency windows)", 600);
    let sum = parse_sum("P3+P3+5P4+19P3").unwrap();
    let form = polysum::complete_squares(&sum).unwrap();
    let profile = AnalyticProfile::new(&form, 1e-8);
    let early = profile.max_deligne_ratio(100, 5_000).unwrap();
    let late = profile.max_deligne_ratio(5_000, 10_000).unwrap();
    let pass = late <= 1.5 * early;
    if !pass {
        println!("  early={early} late={late}");
    }
    c.finish(pass);
}
