use eigopt::baselines::{grid_oracle, piyavskii_shubert};
use eigopt::envelope1d::{maximize_1d, optimize_1d, Sample1D};
use eigopt::envelope2d::SampleND;
use eigopt::mesh::{algorithm2_traced, BoxStatus, MeshOptions};
use eigopt::{SearchBox, Status};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// `sum_k a_k sin(k x + p_k)` with its curvature bound `sum |a_k| k^2`.
struct Trig {
    terms: Vec<(f64, f64, f64)>,
}

impl Trig {
    fn seeded(seed: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let terms = (1..=4)
            .map(|k| (rng.random_range(-1.0..1.0), k as f64, rng.random_range(0.0..6.3)))
            .collect();
        Self { terms }
    }
    fn value(&self, x: f64) -> f64 {
        self.terms.iter().map(|(a, k, p)| a * (k * x + p).sin()).sum()
    }
    fn slope(&self, x: f64) -> f64 {
        self.terms.iter().map(|(a, k, p)| a * k * (k * x + p).cos()).sum()
    }
    fn gamma(&self) -> f64 {
        self.terms.iter().map(|(a, k, _)| a.abs() * k * k).sum()
    }
    fn lipschitz(&self) -> f64 {
        self.terms.iter().map(|(a, k, _)| a.abs() * k).sum()
    }
}

#[test]
fn one_dimensional_sandwich_against_grid() {
    for seed in 0..10 {
        let f = Trig::seeded(seed);
        let r = optimize_1d(
            |x| Ok(Sample1D::smooth(f.value(x), f.slope(x))),
            0.0,
            6.0,
            f.gamma(),
            1e-6,
            10_000,
        )
        .unwrap();
        assert_eq!(r.status, Status::Converged);
        let g = grid_oracle(|x| Ok(f.value(x[0])), &SearchBox::interval(0.0, 6.0).unwrap(), 100_001).unwrap();
        assert!(r.lower <= g.min + 1e-12, "seed {seed}: {} > {}", r.lower, g.min);
        assert!(g.min - g.lipschitz_guarantee(f.lipschitz()) <= r.upper);
        assert!(r.upper <= g.min + 1e-6 + 1e-12);
        for w in r.history.windows(2) {
            assert!(w[1].lower >= w[0].lower && w[1].upper <= w[0].upper);
        }
    }
}

#[test]
fn maximization_is_minimization_of_the_negation() {
    let f = Trig::seeded(99);
    let s = |x: f64| Ok(Sample1D::smooth(f.value(x), f.slope(x)));
    let max = maximize_1d(s, 0.0, 6.0, f.gamma(), 1e-7, 10_000).unwrap();
    let min = optimize_1d(
        |x| Ok(Sample1D::smooth(-f.value(x), -f.slope(x))),
        0.0,
        6.0,
        f.gamma(),
        1e-7,
        10_000,
    )
    .unwrap();
    assert_eq!(max.fbest, -min.fbest);
    assert_eq!((max.lower, max.upper), (-min.upper, -min.lower));
    assert_eq!(max.evaluations, min.evaluations);
}

#[test]
fn piyavskii_shubert_needs_more_evaluations() {
    for seed in 0..5 {
        let f = Trig::seeded(seed);
        let q = optimize_1d(
            |x| Ok(Sample1D::smooth(f.value(x), f.slope(x))),
            0.0,
            6.0,
            f.gamma(),
            1e-4,
            10_000,
        )
        .unwrap();
        let p = piyavskii_shubert(|x| Ok(f.value(x)), 0.0, 6.0, f.lipschitz(), 1e-4, 100_000).unwrap();
        assert_eq!(p.status, Status::Converged);
        assert!((p.fbest - q.fbest).abs() <= 2e-4);
        assert!(
            p.evaluations > q.evaluations,
            "seed {seed}: {} vs {}",
            p.evaluations,
            q.evaluations
        );
    }
}

#[test]
fn mesh_prunes_only_boxes_without_better_points() {
    // f(x, y) = sin 2x sin 3y + 0.2 (x + y); its Hessian has norm at most 13
    let f = |x: &[f64]| (2.0 * x[0]).sin() * (3.0 * x[1]).sin() + 0.2 * (x[0] + x[1]);
    let grad = |x: &[f64]| {
        vec![
            2.0 * (2.0 * x[0]).cos() * (3.0 * x[1]).sin() + 0.2,
            3.0 * (2.0 * x[0]).sin() * (3.0 * x[1]).cos() + 0.2,
        ]
    };
    let bx = SearchBox::new(vec![-2.0, -2.0], vec![2.0, 2.0]).unwrap();
    let eps = 1e-3;
    let opts = MeshOptions::new(13.0, eps, Some(20));
    let (r, trace) = algorithm2_traced(
        |x: &[f64]| {
            Ok(SampleND {
                value: f(x),
                gradient: grad(x),
            })
        },
        &bx,
        &opts,
    )
    .unwrap();
    assert_eq!(r.status, Status::Converged);
    let g = grid_oracle(|x| Ok(f(x)), &bx, 801).unwrap();
    assert!(r.lower <= g.min + 1e-12 && g.min - g.lipschitz_guarantee(4.0) <= r.upper);
    for sb in trace.iter().filter(|b| b.status == BoxStatus::Pruned) {
        let inner = grid_oracle(|x| Ok(f(x)), &sb.bounds, 41).unwrap();
        assert!(inner.min >= r.upper - eps - 1e-12, "{sb:?}: {}", inner.min);
    }
}
