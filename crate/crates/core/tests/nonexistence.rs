use kirchhoff_core::atlas::{nonexistence_q2, nonexistence_qgt2_threshold};
use kirchhoff_core::nonexistence::{qgt2_constant_valid_up_to, QGT2_RANGE};
use kirchhoff_core::*;
use rand::{Rng, SeedableRng};

fn ball(dim: u32, q: f64) -> DomainConstants {
    DomainConstants::for_ball(&RadialGrid::shared(1.0, 1024, dim).unwrap(), q).unwrap()
}

/// Dense log scan of `f(A) / A^2` without any refinement.
fn brute_min(p: &ProblemParams, dc: &DomainConstants) -> f64 {
    let ts = p.two_star();
    let c1 = p.lambda() * dc.sq().unwrap().powf(-p.q() / 2.0);
    let c2 = p.mu() * dc.sobolev().powf(-ts / 2.0);
    (0..200_001)
        .map(|i| {
            let x = 10f64.powf(-6.0 + 12.0 * i as f64 / 200_000.0);
            p.a() / x + p.b() - c1 * x.powf(p.q() / 2.0 - 2.0) - c2 * x.powf(ts / 2.0 - 2.0)
        })
        .fold(f64::INFINITY, f64::min)
}

#[test]
fn qgt2_twice_threshold_is_positive() {
    for (n, q) in [(5, 2.5), (5, 3.0), (6, 2.5)] {
        let dc = ball(n, q);
        let p = ProblemParams::new(1.0, 1.0, 1.0, 1.0, q, n).unwrap();
        let thr = nonexistence_qgt2_threshold(&p, &dc).unwrap();
        let p = p.with_b_mu(2.0 * thr, 1.0).unwrap();
        let r = nonexistence_invariant_check(&p, &dc, 10_000).unwrap();
        assert!(r.range.0 <= QGT2_RANGE.0 && r.range.1 >= QGT2_RANGE.1);
        assert!(r.min_slack > 0.0 && r.chain_holds);
        assert!(r.min_slack >= r.chain_bound);
        let brute = brute_min(&p, &dc);
        assert!(r.min_slack <= brute && brute - r.min_slack < 1e-6 * brute.abs().max(1.0));
    }
}

#[test]
fn qgt2_at_threshold_is_nonnegative() {
    let dc = ball(5, 3.0);
    let p = ProblemParams::new(1.0, 1.0, 1.0, 1.0, 3.0, 5).unwrap();
    let thr = nonexistence_qgt2_threshold(&p, &dc).unwrap();
    let p = p.with_b_mu(thr, 1.0).unwrap();
    let r = nonexistence_invariant_check(&p, &dc, 10_000).unwrap();
    assert!(r.min_slack >= -1e-9);
    assert!(r.chain_bound == 0.0 && r.chain_holds);
}

#[test]
fn q2_branch_is_positive() {
    let dc = ball(5, 2.0);
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(8);
    let mut checked = 0;
    while checked < 200 {
        let a = 10f64.powf(rng.gen_range(-1.0..1.0));
        let mu = 10f64.powf(rng.gen_range(-1.0..1.0));
        let b = 10f64.powf(rng.gen_range(-4.0..2.0));
        let lam = rng.gen_range(0.05..0.95) * a * dc.sigma1();
        let p = ProblemParams::new(a, b, lam, mu, 2.0, 5).unwrap();
        if !nonexistence_q2(&p, &dc).holds() {
            continue;
        }
        let r = nonexistence_invariant_check(&p, &dc, 2000).unwrap();
        assert!(r.min_slack > 0.0 && r.chain_holds, "{p:?}: {r:?}");
        assert!(r.min_slack >= r.chain_bound * (1.0 - 1e-9));
        checked += 1;
    }
}

#[test]
fn preconditions_are_enforced() {
    let dc = ball(5, 3.0);
    let p = ProblemParams::new(1.0, 1e-6, 1.0, 1.0, 3.0, 5).unwrap();
    assert!(matches!(nonexistence_invariant_check(&p, &dc, 100), Err(Error::Precondition(_))));
    let dc4 = ball(4, 3.0);
    let p = ProblemParams::new(1.0, 1.0, 1.0, 1.0, 3.0, 4).unwrap();
    assert!(matches!(nonexistence_invariant_check(&p, &dc4, 100), Err(Error::WrongBranch(_))));
    let dc2 = ball(5, 2.0);
    let p = ProblemParams::new(1.0, 1e-8, 1.0, 1.0, 2.0, 5).unwrap();
    assert!(matches!(nonexistence_invariant_check(&p, &dc2, 100), Err(Error::Precondition(_))));
}

#[test]
fn validity_limit_values() {
    let ts5 = 10.0 / 3.0;
    assert!((qgt2_constant_valid_up_to(3.0, ts5) - 8.0).abs() < 1e-12);
    assert!((qgt2_constant_valid_up_to(2.9, 3.0) - 6.9888).abs() < 1e-3);
    assert!((qgt2_constant_valid_up_to(2.5, ts5) - 4.233).abs() < 1e-3);
}

/// Above the limit the printed threshold no longer implies positivity.
#[test]
fn qgt2_fails_beyond_validity_limit() {
    let dc = ball(5, 3.0);
    let p = ProblemParams::new(5000.0, 1.0, 0.1, 0.1, 3.0, 5).unwrap();
    let thr = nonexistence_qgt2_threshold(&p, &dc).unwrap();
    let p = p.with_b_mu(1.01 * thr, 0.1).unwrap();
    assert!(matches!(
        nonexistence_invariant_check(&p, &dc, 10_000),
        Err(Error::InvariantViolation { .. })
    ));
}
