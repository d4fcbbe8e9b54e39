use vlwe::noise::{self, simulate, SimOp};
use vlwe::{Context, Plaintext, Sampler, SchemeParams, VarietyParams};

const Q30: u64 = 1_073_707_009;

fn ctx() -> Context {
    let ring = VarietyParams::negacyclic(4, 16, Q30, 257, 3.2).unwrap();
    Context::new(SchemeParams::new(ring).unwrap()).unwrap()
}

#[test]
fn fresh_variance_matches_monte_carlo() {
    let ctx = ctx();
    let report = simulate(&ctx, SimOp::Add(0), 100_000, &Sampler::from_u64(1)).unwrap();
    // m·d·σ⁴ = 2·16·3.2⁴
    let expected = 2.0 * 16.0 * 3.2f64.powi(4);
    for i in 0..4 {
        assert!((report.predicted[i] - expected).abs() < 1e-9);
        let r = report.ratio(i);
        assert!((r - 1.0).abs() <= 0.25, "coordinate {i}: ratio {r}");
    }
    assert_eq!(report.within_budget, 1.0);
}

#[test]
fn sum_variance_matches_monte_carlo() {
    let ctx = ctx();
    let report = simulate(&ctx, SimOp::Add(1), 10_000, &Sampler::from_u64(2)).unwrap();
    for i in 0..4 {
        let r = report.ratio(i);
        assert!((r - 1.0).abs() <= 0.25, "coordinate {i}: ratio {r}");
    }
    assert!(report.max_cross_correlation < 0.05, "rho = {}", report.max_cross_correlation);
}

#[test]
fn safety_predicate_implies_decryption() {
    let ctx = ctx();
    let mut rng = Sampler::from_u64(3);
    let (pk, sk) = ctx.keygen(&mut rng).unwrap();
    let delta = ctx.delta(0).unwrap();
    let mut ok = 0;
    for _ in 0..1000 {
        let v: Vec<u64> = (0..4).map(|_| rng.uniform_below(257)).collect();
        let pt = Plaintext::from_vector(&ctx, &v).unwrap();
        let ct = ctx.encrypt(&pk, &pt, &mut rng).unwrap();
        assert!(noise::decryption_safe(ct.noise.max_var(), delta));
        ok += usize::from(ctx.decrypt(&sk, &ct).unwrap() == pt);
    }
    assert!(ok >= 999);
}

#[test]
fn measured_noise_respects_tail_bound() {
    let ctx = ctx();
    let mut rng = Sampler::from_u64(4);
    let (pk, sk) = ctx.keygen(&mut rng).unwrap();
    let bound = 6.0 * noise::noise_fresh(ctx.params()).var[0].sqrt();
    for _ in 0..200 {
        let pt = Plaintext::from_vector(&ctx, &[1, 2, 3, 4]).unwrap();
        let ct = ctx.encrypt(&pk, &pt, &mut rng).unwrap();
        let m = noise::measure_noise(&ctx, &sk, &ct, &pt).unwrap();
        assert!(m.iter().all(|&x| x < bound));
    }
}

#[test]
fn report_is_reproducible() {
    let ctx = ctx();
    let a = simulate(&ctx, SimOp::Add(2), 50, &Sampler::from_u64(5)).unwrap();
    let b = simulate(&ctx, SimOp::Add(2), 50, &Sampler::from_u64(5)).unwrap();
    assert_eq!(a, b);
    assert_eq!(a.to_tsv().lines().count(), 4);
}
