//! The `verify` suite: named invariant checks over seeded random instances.
//!
//! Each check is a plain function with explicit sizes, so the acceptance
//! tests can run the same code at larger scale.

use std::collections::HashSet;

use rand::seq::SliceRandom;
use rand::Rng;

use poisonlab_core::adversaries::{
    brute_force_attack, greedy_flip_attack, maximal_coupling_draw, AttackBudget, BruteForceAttack,
};
use poisonlab_core::analysis::{
    cover_radius, restrict_dedupe, stability_certificate, uniform_marginal, vc_dimension,
};
use poisonlab_core::domain::{
    ball_enumerate, ball_size, dist_tv, full_alphabet, hamming_count, BiasVector, Example, Hypothesis,
    HypothesisClass, Label, Point, ProductBiasDistribution, Sample, DEFAULT_BALL_CAP,
};
use poisonlab_core::experiments::{
    equivalence_check, exact_adversarial_loss, learner_by_id, mc_adversarial_loss,
    public_domination_check, run_sweep, SizeRule, SweepGrid,
};
use poisonlab_core::learners::{exp_mechanism_dist, predict_prob, ExpMechanismConfig};
use poisonlab_core::stats::Z95;
use poisonlab_core::{Budget, RandomSource};

use crate::output::{write_csv, ResultRow};

/// Result of one named check.
#[derive(Debug, Clone, PartialEq)]
pub struct CheckOutcome {
    /// `module/invariant`.
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

impl CheckOutcome {
    fn new(name: &str, passed: bool, detail: String) -> Self {
        Self { name: name.into(), passed, detail }
    }

    fn error(name: &str, e: impl std::fmt::Display) -> Self {
        Self::new(name, false, format!("error: {e}"))
    }

    pub fn line(&self) -> String {
        format!("[{}] {}: {}", if self.passed { "PASS" } else { "FAIL" }, self.name, self.detail)
    }
}

/// Faults the runner can inject to prove that failures are reported.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct Faults {
    /// Flip the sign of the log-ratio bound.
    pub ratio_sign: bool,
}

pub fn random_sample<R: Rng>(rng: &mut R, d: usize, n: usize) -> Sample {
    Sample::new(
        (0..n)
            .map(|_| Example::new(rng.gen_range(0..d), Label::from_bool(rng.gen::<bool>())))
            .collect(),
    )
    .expect("n >= 1")
}

/// `m` distinct hypotheses on `d` points, uniformly among all such sets. Requires `m ≤ 2^d`.
pub fn random_class<R: Rng>(rng: &mut R, d: usize, m: usize) -> HypothesisClass {
    let masks = rand::seq::index::sample(rng, 1usize << d, m);
    let hyps = masks.iter().map(|mask| Hypothesis::from_mask(d, mask as u64)).collect();
    HypothesisClass::new(d, hyps).expect("distinct masks")
}

/// A random class on `d` points whose VC dimension is between 1 and `max_vc`.
pub fn random_class_with_vc<R: Rng>(rng: &mut R, d: usize, max_vc: usize, max_m: usize) -> (HypothesisClass, usize) {
    loop {
        let m = rng.gen_range(2..=max_m.min(1 << d));
        let class = random_class(rng, d, m);
        let vc = vc_dimension(&class).expect("small domain");
        if (1..=max_vc).contains(&vc) {
            return (class, vc);
        }
    }
}

fn binomial(n: usize, k: usize) -> u128 {
    if k > n {
        return 0;
    }
    (0..k).fold(1u128, |acc, i| acc * (n - i) as u128 / (i as u128 + 1))
}

/// Expected empirical loss of the exponential mechanism is within `ln m / t`
/// of the best empirical loss. Reports the worst slack.
pub fn check_exp_loss_bound(seed: u64, instances: usize) -> CheckOutcome {
    const NAME: &str = "learners/exp-mechanism-loss-bound";
    let mut rng = RandomSource::new(seed, 1).rng();
    let mut worst = f64::INFINITY;
    for _ in 0..instances {
        let d = rng.gen_range(1..=6);
        let m = rng.gen_range(2..=64.min(1usize << d));
        let n = rng.gen_range(1..=50);
        let eta = Budget::new(1, rng.gen_range(2..=64)).expect("valid");
        let class = random_class(&mut rng, d, m);
        let sample = random_sample(&mut rng, d, n);
        let cfg = ExpMechanismConfig::from_budget(eta);
        let probs = match exp_mechanism_dist(&class, &sample, &cfg) {
            Ok(p) => p,
            Err(e) => return CheckOutcome::error(NAME, e),
        };
        let losses = class.losses(&sample).expect("matching domain");
        let expected: f64 = probs.iter().zip(&losses).map(|(p, l)| p * l).sum();
        let best = losses.iter().copied().fold(f64::INFINITY, f64::min);
        let t = cfg.temperature(m);
        worst = worst.min(best + (m as f64).ln() / t - expected);
    }
    CheckOutcome::new(NAME, worst >= -1e-12, format!("{instances} instances, worst slack {worst:.3e}"))
}

/// Worst slacks of the log-ratio bound `2tη` and the flip bound `4tη`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StabilitySlack {
    pub ratio: f64,
    pub flip: f64,
    pub pairs: usize,
}

/// Every pair `(S, S')` with `S'` in the budget ball of `S`, over random
/// instances with `n ≤ 6`, `d ≤ 2`.
pub fn stability_slack(seed: u64, instances: usize, faults: Faults) -> poisonlab_core::Result<StabilitySlack> {
    let mut rng = RandomSource::new(seed, 3).rng();
    let mut out = StabilitySlack { ratio: f64::INFINITY, flip: f64::INFINITY, pairs: 0 };
    let sign = if faults.ratio_sign { -1.0 } else { 1.0 };
    for _ in 0..instances {
        let d = rng.gen_range(1..=2);
        let n = rng.gen_range(2..=6);
        let eta = Budget::new(1, rng.gen_range(2..=n as u64))?;
        let mut hyps: Vec<Hypothesis> = HypothesisClass::full(d)?.hypotheses().to_vec();
        hyps.shuffle(&mut rng);
        hyps.truncate(rng.gen_range(2..=hyps.len()));
        let class = HypothesisClass::new(d, hyps)?;
        let cfg = ExpMechanismConfig::from_budget(eta);
        let sample = random_sample(&mut rng, d, n);
        let points: Vec<Point> = (0..d).map(Point).collect();
        for other in ball_enumerate(&sample, eta.max_changes(1, n), &full_alphabet(d), DEFAULT_BALL_CAP)? {
            let r = stability_certificate(&class, &sample, &other, &cfg, &points)?;
            out.ratio = out.ratio.min(sign * r.ratio_bound - r.max_gap);
            for (_, f) in &r.flip_probs {
                out.flip = out.flip.min(r.flip_bound - f);
            }
            out.pairs += 1;
        }
    }
    Ok(out)
}

pub fn check_stability(seed: u64, instances: usize, faults: Faults) -> Vec<CheckOutcome> {
    const RATIO: &str = "analysis/log-ratio-bound";
    const FLIP: &str = "analysis/coupled-flip-bound";
    match stability_slack(seed, instances, faults) {
        Ok(s) => vec![
            CheckOutcome::new(RATIO, s.ratio >= -1e-9, format!("{} neighbour pairs, worst slack {:.3e}", s.pairs, s.ratio)),
            CheckOutcome::new(FLIP, s.flip >= -1e-12, format!("{} neighbour pairs, worst slack {:.3e}", s.pairs, s.flip)),
        ],
        Err(e) => vec![CheckOutcome::error(RATIO, &e), CheckOutcome::error(FLIP, &e)],
    }
}

/// Restriction sizes obey the Sauer–Shelah bound; each restriction also
/// matches an independent count of distinct projections.
pub fn check_sauer(seed: u64, classes: usize, subsets: usize) -> CheckOutcome {
    const NAME: &str = "analysis/sauer-shelah";
    let mut rng = RandomSource::new(seed, 4).rng();
    let mut checked = 0;
    for _ in 0..classes {
        let d = rng.gen_range(3..=10);
        let (class, vc) = random_class_with_vc(&mut rng, d, 3, 16);
        for _ in 0..subsets {
            let size = rng.gen_range(1..=d);
            let mut pts: Vec<usize> = (0..d).collect();
            pts.shuffle(&mut rng);
            let x: Vec<Point> = pts[..size].iter().map(|&i| Point(i)).collect();
            let r = match restrict_dedupe(&class, &x) {
                Ok(r) => r,
                Err(e) => return CheckOutcome::error(NAME, e),
            };
            let distinct: HashSet<Vec<Label>> =
                class.iter().map(|h| x.iter().map(|&p| h.at(p)).collect()).collect();
            let bound: u128 = (0..=vc).map(|i| binomial(size, i)).sum();
            if r.len() != distinct.len() || r.len() as u128 > bound {
                return CheckOutcome::new(
                    NAME,
                    false,
                    format!("|X| = {size}, vc = {vc}: {} restrictions, {} projections, bound {bound}", r.len(), distinct.len()),
                );
            }
            checked += 1;
        }
    }
    CheckOutcome::new(NAME, true, format!("{checked} (class, X) pairs"))
}

/// Mean cover radius and the bound `(13d/n)·ln(2en/d)` for one class.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CoverStat {
    pub domain: usize,
    pub vc: usize,
    pub mean: f64,
    pub std_error: f64,
    pub bound: f64,
}

pub fn cover_stats(seed: u64, classes: usize, samples: usize, n: usize) -> poisonlab_core::Result<Vec<CoverStat>> {
    let mut rng = RandomSource::new(seed, 5).rng();
    let mut out = Vec::with_capacity(classes);
    for _ in 0..classes {
        let domain = rng.gen_range(2..=12);
        let (class, vc) = random_class_with_vc(&mut rng, domain, 2, 12);
        let marginal = uniform_marginal(domain);
        let mut radii = Vec::with_capacity(samples);
        for _ in 0..samples {
            let pts: Vec<Point> = (0..n).map(|_| Point(rng.gen_range(0..domain))).collect();
            let sub = restrict_dedupe(&class, &pts)?;
            radii.push(cover_radius(&class, sub.representatives(), &marginal)?);
        }
        let (mean, std_error) = poisonlab_core::stats::mean_and_se(&radii);
        let dv = vc as f64;
        let bound = 13.0 * dv / n as f64 * (2.0 * std::f64::consts::E * n as f64 / dv).ln();
        out.push(CoverStat { domain, vc, mean, std_error, bound });
    }
    Ok(out)
}

pub fn check_cover(seed: u64, classes: usize, samples: usize, n: usize) -> CheckOutcome {
    const NAME: &str = "analysis/cover-radius-bound";
    match cover_stats(seed, classes, samples, n) {
        Ok(stats) => {
            let worst = stats
                .iter()
                .map(|s| s.bound + 3.0 * s.std_error - s.mean)
                .fold(f64::INFINITY, f64::min);
            CheckOutcome::new(NAME, worst >= 0.0, format!("{classes} classes, worst margin {worst:.4}"))
        }
        Err(e) => CheckOutcome::error(NAME, e),
    }
}

/// Learners compared in the exhaustive checks.
pub const EXHAUSTIVE_LEARNERS: [&str; 3] = ["exp", "coupled", "majority"];

/// Minimum slack of the equivalence inequality and of public domination.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExhaustiveSlack {
    pub equivalence: f64,
    pub domination: f64,
    pub cases: usize,
}

/// Exhaustive sweep over `n`, `η`, learners and an 11-point grid of `u`.
pub fn exhaustive_slack(sizes: &[usize], etas: &[Budget]) -> poisonlab_core::Result<ExhaustiveSlack> {
    let mut out = ExhaustiveSlack { equivalence: f64::INFINITY, domination: f64::INFINITY, cases: 0 };
    for &n in sizes {
        for &eta in etas {
            for k in 0..=10 {
                let u = -0.5 + k as f64 / 10.0;
                for id in EXHAUSTIVE_LEARNERS {
                    let learner = learner_by_id(id, 1, eta, &BiasVector::new(vec![u])?)?;
                    let e = equivalence_check(&learner, u, eta, n)?;
                    out.equivalence = out.equivalence.min(e.slack);
                    let p = public_domination_check(&learner, u, eta, n)?;
                    out.domination = out.domination.min(p.private_loss - p.public_loss);
                    out.cases += 1;
                }
            }
        }
    }
    Ok(out)
}

pub fn check_exhaustive(sizes: &[usize], etas: &[Budget]) -> Vec<CheckOutcome> {
    const EQ: &str = "experiments/equivalence-inequality";
    const PUB: &str = "experiments/public-domination";
    match exhaustive_slack(sizes, etas) {
        Ok(s) => vec![
            CheckOutcome::new(EQ, s.equivalence >= -1e-9, format!("{} cases, worst slack {:.3e}", s.cases, s.equivalence)),
            CheckOutcome::new(PUB, s.domination >= -1e-9, format!("{} cases, worst slack {:.3e}", s.cases, s.domination)),
        ],
        Err(e) => vec![CheckOutcome::error(EQ, &e), CheckOutcome::error(PUB, &e)],
    }
}

/// Ball enumeration: distinct members, all within budget, count matching the closed form.
pub fn check_ball(seed: u64, instances: usize) -> CheckOutcome {
    const NAME: &str = "domain/ball-enumeration";
    let mut rng = RandomSource::new(seed, 6).rng();
    for _ in 0..instances {
        let d = rng.gen_range(1..=3);
        let n = rng.gen_range(1..=5);
        let r = rng.gen_range(0..=n);
        let s = random_sample(&mut rng, d, n);
        let alphabet = full_alphabet(d);
        let ball = match ball_enumerate(&s, r, &alphabet, DEFAULT_BALL_CAP) {
            Ok(b) => b,
            Err(e) => return CheckOutcome::error(NAME, e),
        };
        let distinct: HashSet<&Sample> = ball.iter().collect();
        let within = ball.iter().all(|b| hamming_count(&s, b).is_ok_and(|c| c <= r));
        // Σ_j C(n, j)(2d − 1)^j
        let expected: u128 = (0..=r).map(|j| binomial(n, j) * (2 * d as u128 - 1).pow(j as u32)).sum();
        if distinct.len() != ball.len() || !within || ball.len() as u128 != expected || ball_size(&s, r, &alphabet) != expected {
            return CheckOutcome::new(NAME, false, format!("d = {d}, n = {n}, r = {r}: {} members, expected {expected}", ball.len()));
        }
    }
    CheckOutcome::new(NAME, true, format!("{instances} balls"))
}

/// Both attacks stay within budget and brute force is at least as strong as greedy.
pub fn check_attacks(seed: u64, instances: usize) -> Vec<CheckOutcome> {
    const BUDGET: &str = "adversaries/budget-integrity";
    const DOM: &str = "adversaries/brute-dominates-greedy";
    let mut rng = RandomSource::new(seed, 7).rng();
    let (mut within, mut dominated) = (true, true);
    for _ in 0..instances {
        let d = rng.gen_range(1..=2);
        let n = rng.gen_range(1..=6);
        let eta = Budget::new(1, rng.gen_range(2..=8)).expect("valid");
        let class = HypothesisClass::full(d).expect("small");
        let cfg = ExpMechanismConfig::from_budget(eta);
        let s = random_sample(&mut rng, d, n);
        let target = Example::new(rng.gen_range(0..d), Label::from_bool(rng.gen::<bool>()));
        let budget = AttackBudget::new(eta, n);
        let alphabet = full_alphabet(d);
        let oracle = |x: &Sample, p: Point| predict_prob(&class, x, p, &cfg).map(|q| q.p_plus);
        let greedy = greedy_flip_attack(&s, target, &budget, &alphabet);
        let brute = match brute_force_attack(&oracle, &s, target, &budget, &alphabet, DEFAULT_BALL_CAP) {
            Ok(b) => b,
            Err(e) => return vec![CheckOutcome::error(BUDGET, &e), CheckOutcome::error(DOM, &e)],
        };
        let k = budget.max_corruptions();
        within &= hamming_count(&s, &greedy).unwrap_or(usize::MAX) <= k && hamming_count(&s, &brute).unwrap_or(usize::MAX) <= k;
        let err = |x: &Sample| {
            let p = oracle(x, target.point).unwrap_or(f64::NAN);
            if target.label == Label::Plus { 1.0 - p } else { p }
        };
        dominated &= err(&brute) >= err(&greedy) - 1e-12;
    }
    vec![
        CheckOutcome::new(BUDGET, within, format!("{instances} attacks per adversary")),
        CheckOutcome::new(DOM, dominated, format!("{instances} targets")),
    ]
}

/// Disagreement rate of the maximal coupling matches the total variation distance.
pub fn check_coupling(seed: u64, draws: usize) -> CheckOutcome {
    const NAME: &str = "adversaries/maximal-coupling";
    let p = ProductBiasDistribution::new(BiasVector::new(vec![0.3, -0.1]).expect("valid"));
    let q = ProductBiasDistribution::new(BiasVector::new(vec![0.05, 0.2]).expect("valid"));
    let tv = dist_tv(p.bias(), q.bias()).expect("same dim");
    let src = RandomSource::new(seed, 8);
    let mut differ = 0usize;
    for i in 0..draws {
        match maximal_coupling_draw(&p, &q, &src.child(i as u64)) {
            Ok((a, b)) => differ += usize::from(a != b),
            Err(e) => return CheckOutcome::error(NAME, e),
        }
    }
    let rate = differ as f64 / draws as f64;
    let sd = (tv * (1.0 - tv) / draws as f64).sqrt();
    CheckOutcome::new(NAME, (rate - tv).abs() <= 4.0 * sd, format!("rate {rate:.4} vs TV {tv:.4} ({draws} draws)"))
}

/// Monte Carlo with the brute-force adversary agrees with exhaustive enumeration,
/// and the exact loss is nondecreasing in the radius.
pub fn check_oracles(seed: u64, trials: usize) -> Vec<CheckOutcome> {
    const AGREE: &str = "experiments/oracle-agreement";
    const MONO: &str = "experiments/budget-monotonicity";
    let run = || -> poisonlab_core::Result<(bool, String, bool, String)> {
        let eta = Budget::new(1, 3)?;
        let dist = ProductBiasDistribution::new(BiasVector::new(vec![0.2])?);
        let learner = learner_by_id("exp", 1, eta, dist.bias())?;
        let n = 3;
        let exact = exact_adversarial_loss(&learner, &dist, n, eta.max_changes(1, n))?;
        let est = mc_adversarial_loss(&learner, &BruteForceAttack::new(1), &dist, n, eta, trials, &RandomSource::new(seed, 9))?;
        let se = est.half_width() / Z95;
        let agree = (est.loss_mean() - exact).abs() <= 4.0 * se.max(1e-12);
        let losses: Vec<f64> = (0..=n).map(|r| exact_adversarial_loss(&learner, &dist, n, r)).collect::<Result<_, _>>()?;
        let mono = losses.windows(2).all(|w| w[1] >= w[0] - 1e-12);
        Ok((
            agree,
            format!("mc {:.5} vs exact {exact:.5} (se {se:.2e})", est.loss_mean()),
            mono,
            format!("losses by radius {losses:.5?}"),
        ))
    };
    match run() {
        Ok((a, da, m, dm)) => vec![CheckOutcome::new(AGREE, a, da), CheckOutcome::new(MONO, m, dm)],
        Err(e) => vec![CheckOutcome::error(AGREE, &e), CheckOutcome::error(MONO, &e)],
    }
}

/// A small sweep produces identical CSV bytes with one and several threads.
pub fn check_determinism(seed: u64) -> CheckOutcome {
    const NAME: &str = "experiments/seed-determinism";
    let grid = SweepGrid {
        etas: vec![Budget::new(1, 8).expect("valid"), Budget::new(1, 16).expect("valid")],
        dims: vec![1, 2],
        sizes: SizeRule::Fixed(vec![16]),
        biases: vec![0.2],
        learners: vec!["exp".into(), "vc".into()],
        adversaries: vec!["greedy".into()],
        trials: 200,
        seed,
        ..SweepGrid::default()
    };
    let cfg = crate::config::RunConfig::from_raw(crate::config::Command::Sweep, &Default::default()).expect("defaults");
    let csv = |threads| -> Result<Vec<u8>, String> {
        let rows: Vec<ResultRow> = run_sweep(&grid, Some(threads))
            .map_err(|e| e.to_string())?
            .iter()
            .map(|r| ResultRow::from_cell(&cfg, r))
            .collect();
        let mut buf = Vec::new();
        write_csv(&rows, &mut buf).map_err(|e| e.to_string())?;
        Ok(buf)
    };
    match (csv(1), csv(3)) {
        (Ok(a), Ok(b)) => CheckOutcome::new(NAME, a == b, format!("{} bytes, 1 vs 3 threads", a.len())),
        (Err(e), _) | (_, Err(e)) => CheckOutcome::error(NAME, e),
    }
}

/// The full suite at its default scale.
pub fn run_all(seed: u64, faults: Faults) -> Vec<CheckOutcome> {
    let quarter = Budget::new(1, 4).expect("valid");
    let half = Budget::new(1, 2).expect("valid");
    let mut out = vec![check_ball(seed, 60), check_exp_loss_bound(seed, 200)];
    out.extend(check_stability(seed, 100, faults));
    out.push(check_sauer(seed, 50, 20));
    out.push(check_cover(seed, 20, 200, 64));
    out.extend(check_attacks(seed, 100));
    out.push(check_coupling(seed, 20_000));
    out.extend(check_exhaustive(&[2, 4, 8], &[quarter, half]));
    out.extend(check_oracles(seed, 20_000));
    out.push(check_determinism(seed));
    out
}
