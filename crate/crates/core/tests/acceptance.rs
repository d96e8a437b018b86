//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! non-zero if any criterion fails.

use std::f64::consts::TAU;
use std::process::ExitCode;
use std::time::Instant;

use eigopt::apps::instances::{complex_gaussian, gaussian, pentadiagonal_example, poisson_random, stable_gaussian};
use eigopt::apps::*;
use eigopt::baselines::{grid_oracle, piyavskii_shubert};
use eigopt::envelope1d::{envelope_value, Model1D, Sample1D};
use eigopt::envelope2d::{algorithm1, Algorithm1Options};
use eigopt::linalg::{from_real_rows, identity, norm2, CMatrix};
use eigopt::matfunc::{
    all_branch_slopes, branch_slopes, eig_gradient, eig_second_derivative_line, hermitian_spectrum, singular_triple,
    spectrum, sval_gradient, AnalyticMatrixFunction, HermitianMatrixFunction,
};
use eigopt::mesh::{algorithm2, MeshOptions};
use eigopt::{HistoryRow, SearchBox};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = std::result::Result<String, String>;

/// Histories of every optimizer run, checked by criterion 3.
#[derive(Default)]
struct Runs {
    histories: Vec<(String, Vec<HistoryRow>)>,
}

impl Runs {
    fn record(&mut self, name: &str, history: &[HistoryRow]) {
        self.histories.push((name.to_string(), history.to_vec()));
    }
}

fn ok(cond: bool, detail: String) -> Outcome {
    if cond {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn c(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

fn hermitian(n: usize, seed: u64) -> CMatrix {
    let g = complex_gaussian(n, n, seed);
    (&g + g.adjoint()) * c(0.5)
}

/// Fourth-order central differences.
fn d1(f: &dyn Fn(f64) -> f64, h: f64) -> f64 {
    (-f(2.0 * h) + 8.0 * f(h) - 8.0 * f(-h) + f(-2.0 * h)) / (12.0 * h)
}

fn d2(f: &dyn Fn(f64) -> f64, h: f64) -> f64 {
    (-f(2.0 * h) + 16.0 * f(h) - 30.0 * f(0.0) + 16.0 * f(-h) - f(-2.0 * h)) / (12.0 * h * h)
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(1.0)
}

fn criterion_1(_: &mut Runs) -> Outcome {
    let start = Instant::now();
    let n = 6;
    let (a0, a1, a2, a3) = (hermitian(n, 1), hermitian(n, 2), hermitian(n, 3), hermitian(n, 4));
    let (e, p, s) = (
        (a0.clone(), a1.clone(), a2.clone(), a3.clone()),
        (a1, a2.clone(), a3.clone()),
        (a2, a3),
    );
    let f = HermitianMatrixFunction::new(
        2,
        n,
        move |w| &e.0 + &e.1 * c(w[0]) + &e.2 * c(w[1].sin()) + &e.3 * c(w[0] * w[1]),
        move |w, k| match k {
            0 => &p.0 + &p.2 * c(w[1]),
            _ => &p.1 * c(w[1].cos()) + &p.2 * c(w[0]),
        },
    )
    .with_second_along(move |w, d| &s.0 * c(-w[1].sin() * d[1] * d[1]) + &s.1 * c(2.0 * d[0] * d[1]));
    let eig = |w: &[f64], j: usize| spectrum(&f, w).unwrap().values[j - 1];

    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let (mut worst1, mut worst_part, mut worst2) = (0.0f64, 0.0f64, 0.0f64);
    let mut accepted = 0;
    while accepted < 100 {
        let w = [rng.random_range(-2.0..2.0), rng.random_range(-2.0..2.0)];
        let j = rng.random_range(1..=n);
        let spec = spectrum(&f, &w).unwrap();
        let gap = spec.gap(j);
        if gap <= 1e-3 {
            continue;
        }
        accepted += 1;
        let t: f64 = rng.random_range(0.0..TAU);
        let dir = [t.cos(), t.sin()];
        let along = |a: f64| eig(&[w[0] + a * dir[0], w[1] + a * dir[1]], j);
        let h1 = 1e-3 * gap.min(1.0);
        let slope = branch_slopes(&spec, &f.directional(&w, &dir), j).unwrap()[0];
        worst1 = worst1.max(rel(slope, d1(&along, h1)));
        let grad = eig_gradient(&f, &spec.point(j).unwrap()).unwrap();
        for k in 0..2 {
            let axis = |a: f64| {
                let mut x = w;
                x[k] += a;
                eig(&x, j)
            };
            worst_part = worst_part.max(rel(grad[k], d1(&axis, h1)));
        }
        let second = eig_second_derivative_line(&f, &w, &dir, j).unwrap();
        worst2 = worst2.max(rel(second, d2(&along, 1e-2 * gap.min(1.0))));
    }

    let (b0, b1, b2) = (
        complex_gaussian(5, 3, 5),
        complex_gaussian(5, 3, 6),
        complex_gaussian(5, 3, 7),
    );
    let (be, bp) = ((b0, b1.clone(), b2.clone()), (b1, b2));
    let i = Complex64::new(0.0, 1.0);
    let b = AnalyticMatrixFunction::new(
        2,
        5,
        3,
        move |w| &be.0 + &be.1 * c(w[0]) + &be.2 * (i * w[1]).exp(),
        move |w, k| match k {
            0 => bp.0.clone(),
            _ => &bp.1 * (i * (i * w[1]).exp()),
        },
    );
    let svals = |w: &[f64]| {
        let mut s: Vec<f64> = b.eval(w).singular_values().iter().cloned().collect();
        s.sort_by(|x, y| y.total_cmp(x));
        s
    };
    let mut worst_sv = 0.0f64;
    let mut accepted = 0;
    while accepted < 100 {
        let w = [rng.random_range(-2.0..2.0), rng.random_range(-2.0..2.0)];
        let j = rng.random_range(1..=3);
        let s = svals(&w);
        let gap = (0..3)
            .filter(|&k| k != j - 1)
            .map(|k| (s[k] - s[j - 1]).abs())
            .fold(s[j - 1], f64::min);
        if gap <= 1e-3 {
            continue;
        }
        accepted += 1;
        let grad = sval_gradient(&b, &w, &singular_triple(&b, &w, j).unwrap()).unwrap();
        for k in 0..2 {
            let axis = |a: f64| {
                let mut x = w;
                x[k] += a;
                svals(&x)[j - 1]
            };
            worst_sv = worst_sv.max(rel(grad[k], d1(&axis, 1e-3 * gap.min(1.0))));
        }
    }
    let secs = start.elapsed().as_secs_f64();
    ok(
        worst1 <= 1e-5 && worst_part <= 1e-5 && worst_sv <= 1e-5 && worst2 <= 1e-3 && secs < 30.0,
        format!(
            "max rel err: first {worst1:.1e}, partial {worst_part:.1e}, singular {worst_sv:.1e}, second {worst2:.1e}; {secs:.1}s"
        ),
    )
}

/// Sample whose slopes bound the derivatives of every branch, so the models
/// stay valid past exact crossings.
fn bundle_sample(a: &CMatrix, da: &CMatrix, j: usize) -> Sample1D {
    let spec = hermitian_spectrum(a, &[0.0]).unwrap();
    Sample1D::from_branches(spec.values[j - 1], &all_branch_slopes(&spec, da).unwrap()).unwrap()
}

fn diag(entries: &[f64]) -> CMatrix {
    CMatrix::from_fn(entries.len(), entries.len(), |i, j| {
        if i == j {
            c(entries[i])
        } else {
            c(0.0)
        }
    })
}

/// A scalar function on an interval, its samples and a valid curvature bound.
struct Instance {
    name: String,
    a: f64,
    b: f64,
    gamma: f64,
    sample: Box<dyn Fn(f64) -> Sample1D>,
    centers: Vec<f64>,
}

fn smooth(name: &str, a: f64, b: f64, gamma: f64, f: fn(f64) -> (f64, f64)) -> Instance {
    Instance {
        name: name.into(),
        a,
        b,
        gamma,
        sample: Box::new(move |x| {
            let (v, d) = f(x);
            Sample1D::smooth(v, d)
        }),
        centers: Vec::new(),
    }
}

fn eig_instance(name: &str, a: f64, b: f64, gamma: f64, j: usize, m: fn(f64) -> (CMatrix, CMatrix)) -> Instance {
    Instance {
        name: name.into(),
        a,
        b,
        gamma,
        sample: Box::new(move |x| {
            let (v, d) = m(x);
            bundle_sample(&v, &d, j)
        }),
        centers: Vec::new(),
    }
}

fn criterion_2(_: &mut Runs) -> Outcome {
    let mut instances = vec![
        smooth("sin 3x", 0.0, TAU, 9.0, |x| ((3.0 * x).sin(), 3.0 * (3.0 * x).cos())),
        smooth("cos x + 0.3x^2", -4.0, 4.0, 1.0, |x| {
            (x.cos() + 0.3 * x * x, -x.sin() + 0.6 * x)
        }),
        smooth("x^4 - 2x^2", -2.0, 2.0, 4.0, |x| {
            (x.powi(4) - 2.0 * x * x, 4.0 * x.powi(3) - 4.0 * x)
        }),
        smooth("gaussian bump", -3.0, 3.0, 2.0, |x| {
            ((-x * x).exp(), -2.0 * x * (-x * x).exp())
        }),
        smooth("sin x sin 5x", 0.0, 3.0, 26.0, |x| {
            (
                x.sin() * (5.0 * x).sin(),
                x.cos() * (5.0 * x).sin() + 5.0 * x.sin() * (5.0 * x).cos(),
            )
        }),
        eig_instance("min(sin x, cos 2x)", 0.0, 6.0, 4.0, 2, |x| {
            (
                diag(&[x.sin(), (2.0 * x).cos()]),
                diag(&[x.cos(), -2.0 * (2.0 * x).sin()]),
            )
        }),
        eig_instance("max(cos x, sin 2x)", 0.0, 6.0, 4.0, 1, |x| {
            (
                diag(&[x.cos(), (2.0 * x).sin()]),
                diag(&[-x.sin(), 2.0 * (2.0 * x).cos()]),
            )
        }),
        eig_instance("-|x|", -1.0, 1.0, 0.1, 2, |x| (diag(&[x, -x]), diag(&[1.0, -1.0]))),
        eig_instance("middle of (x, -x, sin 3x / 2)", -1.5, 1.5, 4.5, 2, |x| {
            (
                diag(&[x, -x, 0.5 * (3.0 * x).sin()]),
                diag(&[1.0, -1.0, 1.5 * (3.0 * x).cos()]),
            )
        }),
        eig_instance(
            "lambda_1 of A0 + x A1 + x^2 A2",
            -2.0,
            2.0,
            2.0 * norm2(&hermitian(4, 33)),
            1,
            |x| {
                let (a0, a1, a2) = (hermitian(4, 31), hermitian(4, 32), hermitian(4, 33));
                (&a0 + &a1 * c(x) + &a2 * c(x * x), &a1 + &a2 * c(2.0 * x))
            },
        ),
    ];
    // a model centered exactly on the kink
    instances[7].centers.push(0.0);
    for seed in 0..10u64 {
        let a = complex_gaussian(20, 20, 100 + seed);
        let f = numerical_radius_function(&a);
        instances.push(Instance {
            name: format!("numerical radius, seed {}", 100 + seed),
            a: 0.0,
            b: TAU,
            gamma: norm2(&a),
            sample: Box::new(move |t| bundle_sample(&f.eval(&[t]), &f.directional(&[t], &[1.0]), 1).negated()),
            centers: Vec::new(),
        });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut worst = f64::NEG_INFINITY;
    let mut worst_name = String::new();
    for inst in &instances {
        let mut centers = inst.centers.clone();
        centers.extend([inst.a, inst.b]);
        centers.extend((0..15).map(|_| rng.random_range(inst.a..inst.b)));
        let models: Vec<Model1D> = centers
            .iter()
            .map(|&x| Model1D::new(x, &(inst.sample)(x), inst.gamma))
            .collect();
        for _ in 0..1000 {
            let x = rng.random_range(inst.a..=inst.b);
            let excess = envelope_value(&models, x) - (inst.sample)(x).value;
            if excess > worst {
                worst = excess;
                worst_name = inst.name.clone();
            }
        }
    }
    ok(
        worst <= 1e-10,
        format!(
            "{} instances x 1000 points, max envelope - f = {worst:.2e} ({worst_name})",
            instances.len()
        ),
    )
}

fn criterion_3(runs: &mut Runs) -> Outcome {
    let mut problems = Vec::new();
    let mut rows = 0;
    for (name, h) in &runs.histories {
        rows += h.len();
        if h.iter().any(|r| r.lower > r.upper) {
            problems.push(format!("{name}: lower > upper"));
        }
        if h.windows(2).any(|w| w[1].lower < w[0].lower || w[1].upper > w[0].upper) {
            problems.push(format!("{name}: not monotone"));
        }
    }
    // grid-oracle sandwiches: l <= oracle min and oracle min - guarantee <= u
    let a = stable_gaussian(6, 41, 0.5);
    let r = dist_instability(&a, &InstabilityOptions::new(1e-6)).map_err(|e| e.to_string())?;
    let n = a.nrows();
    let (lo, hi) = (-2.0 * norm2(&a).max(0.5), 2.0 * norm2(&a).max(0.5));
    let g = grid_oracle(
        |w: &[f64]| {
            Ok(eigopt::linalg::sigma_min(
                &(&a - identity(n) * Complex64::new(0.0, w[0])),
            ))
        },
        &SearchBox::interval(lo, hi).unwrap(),
        20001,
    )
    .map_err(|e| e.to_string())?;
    let guarantee = g.lipschitz_guarantee(1.0);
    if !(r.lower <= g.min && g.min - guarantee <= r.upper) {
        problems.push(format!(
            "instability sandwich [{}, {}] vs grid {}",
            r.lower, r.upper, g.min
        ));
    }
    runs.record("instability (criterion 3)", &r.history);

    let a = complex_gaussian(8, 8, 43);
    let r = numerical_radius(&a, &NumradOptions::new(1e-6)).map_err(|e| e.to_string())?;
    let f = numerical_radius_function(&a);
    let g = grid_oracle(
        |t: &[f64]| Ok(-spectrum(&f, t)?.values[0]),
        &SearchBox::interval(0.0, TAU).unwrap(),
        20001,
    )
    .map_err(|e| e.to_string())?;
    let guarantee = g.lipschitz_guarantee(norm2(&a));
    // maximization: -u <= -max <= grid min of -f
    if !(-r.upper <= g.min && g.min - guarantee <= -r.lower) {
        problems.push(format!(
            "numerical radius sandwich [{}, {}] vs grid {}",
            r.lower, r.upper, -g.min
        ));
    }
    runs.record("numerical radius (criterion 3)", &r.history);
    ok(
        problems.is_empty(),
        format!(
            "{} runs, {rows} history rows, 2 grid sandwiches (+ criterion 6); {problems:?}",
            runs.histories.len()
        ),
    )
}

fn criterion_4(runs: &mut Runs) -> Outcome {
    let nil = numerical_radius(&from_real_rows(2, 2, &[0.0, 1.0, 0.0, 0.0]), &NumradOptions::new(1e-6))
        .map_err(|e| e.to_string())?;
    let herm = numerical_radius(&from_real_rows(2, 2, &[3.0, 0.0, 0.0, -5.0]), &NumradOptions::new(1e-9))
        .map_err(|e| e.to_string())?;
    let m = |v| from_real_rows(1, 1, &[v]);
    let sys = LTISystem::new(m(-1.0), m(1.0), m(1.0), m(0.0)).map_err(|e| e.to_string())?;
    let hinf = hinf_norm(&sys, &HinfOptions::new(1e-10)).map_err(|e| e.to_string())?;
    let inst = dist_instability(
        &from_real_rows(2, 2, &[-1.0, 0.0, 0.0, -1.0]),
        &InstabilityOptions::new(1e-10),
    )
    .map_err(|e| e.to_string())?;
    for (name, r) in [
        ("nilpotent", &nil),
        ("diag(3,-5)", &herm),
        ("hinf", &hinf),
        ("-I", &inst),
    ] {
        runs.record(name, &r.history);
    }
    ok(
        (nil.value - 0.5).abs() <= 1e-10
            && (herm.value - 5.0).abs() <= 1e-8
            && (hinf.value - 1.0).abs() <= 1e-8
            && (inst.value - 1.0).abs() <= 1e-8,
        format!(
            "r(nilpotent) = {:.12}, r(diag(3,-5)) = {:.10}, hinf = {:.10}, dist_instability(-I) = {:.10}",
            nil.value, herm.value, hinf.value, inst.value
        ),
    )
}

fn criterion_5(runs: &mut Runs) -> Outcome {
    let a = gaussian(6, 6, 5);
    let with_i = dist_uncontrollability(&a, &identity(6), &UncontrolOptions::new(1e-7)).map_err(|e| e.to_string())?;
    let zero =
        dist_uncontrollability(&a, &CMatrix::zeros(6, 1), &UncontrolOptions::new(1e-7)).map_err(|e| e.to_string())?;
    runs.record("uncontrollability (A, I)", &with_i.history);
    runs.record("uncontrollability (A, 0)", &zero.history);
    ok(
        (with_i.value - 1.0).abs() <= 1e-6 && zero.value <= 1e-6,
        format!("(A, I): {:.10}, (A, 0): {:.2e}", with_i.value, zero.value),
    )
}

fn criterion_6(runs: &mut Runs) -> Outcome {
    let start = Instant::now();
    let (a, b) = (gaussian(8, 8, 21), gaussian(8, 3, 22));
    let eps = 1e-4;
    let r = dist_uncontrollability(&a, &b, &UncontrolOptions::new(eps)).map_err(|e| e.to_string())?;
    runs.record("uncontrollability 8x8/8x3", &r.history);
    let solve = start.elapsed().as_secs_f64();
    let bx = SearchBox::square([0.0, 0.0], norm2(&a) + norm2(&b)).unwrap();
    // sigma_n([A - zI, B])^2 = lambda_min((A - zI)(A - zI)* + BB*)
    let bb = &b * b.adjoint();
    let g = grid_oracle(
        |z: &[f64]| {
            let mut m = a.clone();
            for k in 0..8 {
                m[(k, k)] -= Complex64::new(z[0], z[1]);
            }
            let gram = &m * m.adjoint() + &bb;
            Ok(gram
                .symmetric_eigenvalues()
                .iter()
                .cloned()
                .fold(f64::INFINITY, f64::min)
                .max(0.0)
                .sqrt())
        },
        &bx,
        2001,
    )
    .map_err(|e| e.to_string())?;
    let secs = start.elapsed().as_secs_f64();
    // sigma_n([A - zI, B]) is 1-Lipschitz in z
    let guarantee = g.lipschitz_guarantee(1.0);
    let diff = (r.value - g.min).abs();
    ok(
        diff <= eps + guarantee && r.lower <= g.min && g.min - guarantee <= r.upper && secs < 120.0,
        format!(
            "optimizer {:.8} ({:?}), grid {:.8} at {:?}, |diff| {diff:.2e} <= {:.2e}; {solve:.1}s solve, {secs:.1}s total",
            r.value,
            r.status,
            g.min,
            g.argmin,
            eps + guarantee
        ),
    )
}

fn criterion_7(runs: &mut Runs) -> Outcome {
    let t = pentadiagonal_example();
    // The tolerance on the coalescence point leaves ~3e-4 of slack around the
    // true minimizer, and the objective is very flat there, so the argmin has
    // to be resolved well below the stated digits.
    let mut opts = DefectOptions::new(1e-8);
    opts.max_depth = 20;
    let r = dist_defectiveness(&t, &opts).map_err(|e| e.to_string())?;
    runs.record("defectiveness 5x5 Toeplitz", &r.history);
    // A is real, so the objective is symmetric under conjugation of lambda.
    let dist = ((r.argmin[0] + 0.336).powi(2) + (r.argmin[1].abs() - 13.6).powi(2)).sqrt();
    // the literal reading has the double eigenvalue 1, where the objective is
    // a minimum of cones; gamma = 2 is too small there, so use 20
    let mut literal = DefectOptions::new(1e-3);
    literal.gamma = 20.0;
    let lit = dist_defectiveness(&diag(&[1.0, -10.0, 0.0, 10.0, 1.0]), &literal).map_err(|e| e.to_string())?;
    runs.record("defectiveness literal diag", &lit.history);
    ok(
        (r.value - 3.753).abs() <= 2e-2 && dist <= 0.05,
        format!(
            "banded Toeplitz reading (offsets -2..2 = 1,-10,0,10,1): value {:.6}, point ({:.4}, {:.4}) [conjugate of ({:.4}, {:.4})], distance {dist:.4}, t* = {:.2e}, {:?}; literal diag(1,-10,0,10,1) reading (double eigenvalue 1, gamma 20) gives {:.1e} with lower bound {:.1e}",
            r.value,
            r.argmin[0],
            r.argmin[1],
            r.argmin[0],
            -r.argmin[1],
            r.inner.unwrap_or(f64::NAN),
            r.status,
            lit.value,
            lit.lower
        ),
    )
}

fn criterion_8(runs: &mut Runs) -> Outcome {
    let a = diag(&[0.0, 1.0]);
    let r = dist_defectiveness(&a, &DefectOptions::new(1e-6)).map_err(|e| e.to_string())?;
    runs.record("defectiveness diag(0,1)", &r.history);
    // inner maximum by sampling t, outer minimum on a grid through (0.5, 0)
    let inner = |z: &[f64]| {
        let mut best = f64::NEG_INFINITY;
        for k in 0..=300 {
            let t = 3.0 * k as f64 / 300.0;
            let mut m = CMatrix::zeros(4, 4);
            for i in 0..2 {
                let d = a[(i, i)] - Complex64::new(z[0], z[1]);
                m[(i, i)] = d;
                m[(i + 2, i + 2)] = d;
                m[(i, i + 2)] = c(t);
            }
            let mut s: Vec<f64> = m.singular_values().iter().cloned().collect();
            s.sort_by(|x, y| y.total_cmp(x));
            best = best.max(s[2]);
        }
        Ok(best)
    };
    let g =
        grid_oracle(inner, &SearchBox::new(vec![0.0, -0.5], vec![1.0, 0.5]).unwrap(), 41).map_err(|e| e.to_string())?;
    ok(
        (r.value - g.min).abs() <= 1e-3,
        format!(
            "optimizer {:.8} at {:?}, oracle {:.8} at {:?}",
            r.value, r.argmin, g.min, g.argmin
        ),
    )
}

fn criterion_9(runs: &mut Runs) -> Outcome {
    let a = poisson_random(36, 1);
    let l = norm2(&a);
    let q2 = numerical_radius(&a, &NumradOptions::new(1e-2)).map_err(|e| e.to_string())?;
    let q4 = numerical_radius(&a, &NumradOptions::new(1e-4)).map_err(|e| e.to_string())?;
    let f = numerical_radius_function(&a);
    let ps = piyavskii_shubert(|t| Ok(-spectrum(&f, &[t])?.values[0]), 0.0, TAU, l, 1e-4, 1_000_000)
        .map_err(|e| e.to_string())?;
    runs.record("numerical radius eps 1e-2", &q2.history);
    runs.record("numerical radius eps 1e-4", &q4.history);
    runs.record("piyavskii-shubert", &ps.history);
    let ratio = ps.evaluations as f64 / q4.evaluations as f64;
    ok(
        ratio >= 10.0 && q4.evaluations <= 2 * q2.evaluations,
        format!(
            "gamma = L = {l:.4}: quadratic {} evals at 1e-2, {} at 1e-4; Piyavskii-Shubert {} at 1e-4 ({ratio:.0}x)",
            q2.evaluations, q4.evaluations, ps.evaluations
        ),
    )
}

fn criterion_10(runs: &mut Runs) -> Outcome {
    let (a, b) = (gaussian(20, 20, 11), gaussian(20, 6, 12));
    let capped = dist_uncontrollability(&a, &b, &UncontrolOptions::new(1e-2)).map_err(|e| e.to_string())?;
    let mut o = UncontrolOptions::new(1e-2);
    o.n_q = None;
    o.max_depth = 0;
    let plain = dist_uncontrollability(&a, &b, &o).map_err(|e| e.to_string())?;
    runs.record("mesh n_q = 30", &capped.history);
    runs.record("uncapped", &plain.history);
    let share = capped.vertex_computations as f64 / plain.vertex_computations as f64;
    ok(
        share <= 0.2 && capped.status == eigopt::Status::Converged && plain.status == eigopt::Status::Converged,
        format!(
            "vertex computations {} (n_q = 30) vs {} (uncapped): {:.1}%; values {:.6} / {:.6}",
            capped.vertex_computations,
            plain.vertex_computations,
            100.0 * share,
            capped.value,
            plain.value
        ),
    )
}

fn criterion_11(runs: &mut Runs) -> Outcome {
    let (a, b) = (gaussian(5, 5, 61), gaussian(5, 2, 62));
    let f = uncontrollability_objective(&a, &b).map_err(|e| e.to_string())?;
    let bx = SearchBox::square([0.0, 0.0], norm2(&a) + norm2(&b)).unwrap();
    let mut mesh = MeshOptions::new(2.0, 1e-3, None);
    mesh.max_depth = 0;
    let r2 = algorithm2(&f, &bx, &mesh).map_err(|e| e.to_string())?;
    let r1 = algorithm1(&f, &bx, &Algorithm1Options::new(2.0, 1e-3)).map_err(|e| e.to_string())?;
    runs.record("algorithm 1", &r1.history);
    runs.record("algorithm 2, depth 0", &r2.history);
    let same_iterates = r1.history.len() == r2.history.len()
        && r1
            .history
            .iter()
            .zip(&r2.history)
            .all(|(x, y)| x.x == y.x && x.f == y.f);
    // wall-clock times are the only fields allowed to differ
    let untimed = |mut r: eigopt::OptResult| {
        r.history.iter_mut().for_each(|h| h.elapsed = 0.0);
        r
    };
    let n = r1.history.len();
    ok(
        same_iterates && untimed(r1) == untimed(r2),
        format!("{n} iterates, identical: {same_iterates}"),
    )
}

fn main() -> ExitCode {
    let criteria: [(usize, &str, fn(&mut Runs) -> Outcome); 11] = [
        (1, "derivative formulas match finite differences", criterion_1),
        (2, "envelopes underestimate", criterion_2),
        (4, "1D exact values", criterion_4),
        (5, "2D exact values", criterion_5),
        (6, "2D grid oracle", criterion_6),
        (7, "5x5 Toeplitz distance to defectiveness", criterion_7),
        (8, "defectiveness oracle", criterion_8),
        (9, "convergence-rate ordering", criterion_9),
        (10, "mesh vertex savings", criterion_10),
        (11, "depth-0 mesh equals algorithm 1", criterion_11),
        (3, "bound sandwich and monotonicity", criterion_3),
    ];
    let mut runs = Runs::default();
    let mut failed = 0;
    for (id, name, check) in criteria {
        let start = Instant::now();
        let outcome = check(&mut runs);
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("PASS criterion {id:>2}: {name} [{secs:.1}s] {detail}"),
            Err(detail) => {
                failed += 1;
                println!("FAIL criterion {id:>2}: {name} [{secs:.1}s] {detail}");
            }
        }
    }
    if failed > 0 {
        println!("{failed} of 11 criteria failed");
        ExitCode::FAILURE
    } else {
        println!("all 11 criteria passed");
        ExitCode::SUCCESS
    }
}
