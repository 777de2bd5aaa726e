use graph_recon::gen::{self, InstanceSpec};
use graph_recon::graph;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn pareto_cdf(alpha: f64, w: f64) -> f64 {
    if w < 1.0 {
        0.0
    } else {
        1.0 - w.powf(-alpha)
    }
}

#[test]
fn pareto_samples_pass_kolmogorov_smirnov() {
    let alpha = 3.0;
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let mut xs: Vec<f64> = (0..100_000).map(|_| gen::pareto_sample(alpha, &mut rng)).collect();
    xs.sort_by(f64::total_cmp);
    let n = xs.len() as f64;
    let d = xs
        .iter()
        .enumerate()
        .map(|(i, &x)| {
            let f = pareto_cdf(alpha, x);
            (f - i as f64 / n).abs().max(((i + 1) as f64 / n - f).abs())
        })
        .fold(0.0, f64::max);
    assert!(d < 0.01, "KS distance {d}");
    assert!(xs[0] >= 1.0);
}

#[test]
fn library_cdf_and_quantile_agree_with_closed_form() {
    for alpha in [1.5, 2.0, 3.0] {
        for &u in &[1e-9, 0.01, 0.3, 0.5, 0.99, 1.0] {
            let w = gen::pareto_quantile(alpha, u);
            assert!((w - u.powf(-1.0 / alpha)).abs() <= 1e-12 * w);
        }
        for &w in &[1.0, 1.5, 4.0, 100.0] {
            assert!((gen::pareto_cdf(alpha, w) - pareto_cdf(alpha, w)).abs() < 1e-15);
            assert!((gen::tail_probability(alpha, w) - w.powf(-alpha)).abs() < 1e-15);
        }
    }
    assert_eq!(gen::critical_threshold(16, 2.0), 4.0);
}

#[test]
fn layer_thinning_within_three_sigma() {
    let alpha = 2.0;
    let spec = InstanceSpec::connected(20_000, 6, alpha, 99);
    let g = gen::gen_graph(&spec).unwrap();
    let m = g.m() as f64;
    for thr in [1.5f64, 2.0, 3.0, 5.0, 10.0] {
        let p = thr.powf(-alpha);
        let kept = graph::layer(&g, thr).unwrap().edges().count() as f64;
        let sigma = (m * p * (1.0 - p)).sqrt();
        assert!((kept - m * p).abs() <= 3.0 * sigma, "thr {thr}: {kept} vs {}", m * p);
    }
}

#[test]
fn edge_count_tracks_target() {
    for (n, d) in [(1000, 4), (1000, 2), (500, 8)] {
        let g = gen::gen_graph(&InstanceSpec::connected(n, d, 2.0, 5)).unwrap();
        let target = (1.5 * n as f64).ceil().min((n * d) as f64 / 2.0);
        assert!(g.m() >= n - 1);
        assert!((g.m() as f64) <= target + 1.0, "m {} target {target}", g.m());
        assert!((g.m() as f64) >= 0.9 * target, "m {} target {target}", g.m());
    }
}

#[test]
fn truncated_pareto_stays_below_cap_and_matches_conditional_cdf() {
    let spec = InstanceSpec {
        w_cap: Some(3.0),
        ..InstanceSpec::connected(20_000, 6, 2.0, 8)
    };
    let g = gen::gen_graph(&spec).unwrap();
    assert!(g.edges().iter().all(|e| e.w >= 1.0 && e.w <= 3.0));
    let below2 = g.edges().iter().filter(|e| e.w < 2.0).count() as f64 / g.m() as f64;
    let want = pareto_cdf(2.0, 2.0) / pareto_cdf(2.0, 3.0);
    assert!((below2 - want).abs() < 0.02, "{below2} vs {want}");
}
