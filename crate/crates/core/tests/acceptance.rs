//! Acceptance suite. Runs every criterion and prints one PASS/FAIL line each;
//! exits non-zero if any fails.

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::{Duration, Instant};

use ellsum::generate::{derive_seed, generate_problem, GeneratorConfig};
use ellsum::optim::random_alpha;
use ellsum::verify::{
    check_points, dense_kron_logdet, dense_kron_trace, finite_difference_gradient, random_pd,
    random_problem, random_slice_point, sample_sum_point, tightness_scalar_oracle,
    RandomProblemSpec,
};
use ellsum::{
    check_lmi_feasibility, family, gradient_logdet, mm_step, objective_logdet, objective_trace,
    size_logdet, size_trace, solve_mm, solve_projgrad, solve_trace, surrogate_coeffs,
    trace_optimal_alpha, AlphaVector, Init, MatrixEllipsoid, MmConfig, SampleMode, SumProblem,
    SumTerm,
};
use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs()
}

/// q, r <= 6 and K <= 20 with general maps; identity maps when no
/// full-rank general draw exists for the chosen sizes.
fn mixed_problem(seed: u64) -> SumProblem {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let q = rng.random_range(1..=6);
    let r = rng.random_range(1..=6);
    let terms = rng.random_range(1..=20);
    let spec = RandomProblemSpec {
        q,
        r,
        terms,
        max_inner: 6,
        ridge: 0.5,
        general_maps: true,
    };
    random_problem(&spec, &mut rng).unwrap_or_else(|_| {
        let spec = RandomProblemSpec {
            general_maps: false,
            ..spec
        };
        random_problem(&spec, &mut rng).expect("identity-map problem")
    })
}

fn positive_alpha<G: Rng>(k: usize, rng: &mut G) -> AlphaVector {
    let v = DVector::from_fn(k, |_, _| 10f64.powf(rng.random_range(-2.0..2.0)));
    AlphaVector::new(v).unwrap()
}

fn containment() -> Outcome {
    let start = Instant::now();
    let mut checked = 0usize;
    let mut worst = f64::INFINITY;
    for seed in 0..100u64 {
        let p = mixed_problem(seed);
        let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(1, &[seed]));
        let points: Vec<_> = (0..1000)
            .map(|_| sample_sum_point(&p, SampleMode::Boundary, &mut rng))
            .collect();

        let mut alphas = vec![("trace", trace_optimal_alpha(&p).unwrap())];
        let mm = solve_mm(&p, &MmConfig::default()).map_err(|e| e.to_string())?;
        alphas.push(("mm", mm.alpha_final));
        for _ in 0..5 {
            alphas.push(("random", positive_alpha(p.len(), &mut rng)));
        }
        for (label, a) in &alphas {
            let e = family(&p, a).unwrap().to_centered().unwrap();
            let rep = check_points(&e, &points, 1e-8).unwrap();
            ensure(rep.violations == 0, || {
                format!(
                    "seed {seed} ({label} alpha): {} violations, worst margin {:.3e}",
                    rep.violations, rep.worst_margin
                )
            })?;
            checked += rep.samples_tested;
            worst = worst.min(rep.worst_margin);
        }
    }
    let elapsed = start.elapsed();
    ensure(elapsed < Duration::from_secs(120), || {
        format!("took {elapsed:?}")
    })?;
    Ok(format!(
        "{checked} point checks, 0 violations, worst margin {worst:.2e}, {:.1}s",
        elapsed.as_secs_f64()
    ))
}

fn trace_exactness() -> Outcome {
    let mut worst_kkt = 0.0f64;
    for seed in 0..50u64 {
        let p = mixed_problem(derive_seed(2, &[seed]));
        let a = trace_optimal_alpha(&p).unwrap();
        // u_k / (α_k² v_k) must be the same for every k
        let ratios: Vec<f64> = p
            .terms()
            .iter()
            .zip(a.as_slice())
            .map(|(t, &ak)| {
                let f = t.left_map();
                let g = t.right_map();
                let u = (f * t.ellipsoid().left() * f.transpose()).trace();
                let v = (g.transpose() * t.ellipsoid().right() * g).trace();
                u / (ak * ak * v)
            })
            .collect();
        let mean = ratios.iter().sum::<f64>() / ratios.len() as f64;
        let spread = ratios.iter().map(|x| rel(*x, mean)).fold(0.0, f64::max);
        ensure(spread <= 1e-10, || {
            format!("seed {seed}: Lagrange spread {spread:.3e}")
        })?;
        worst_kkt = worst_kkt.max(spread);

        let best = objective_trace(&p, &a).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for i in 0..1000 {
            let b = random_slice_point(&p, &mut rng).unwrap();
            let f = objective_trace(&p, &b).unwrap();
            // with K = 1 the slice is a single point and ties are exact up to rounding
            ensure(best <= f * (1.0 + 1e-12), || {
                format!("seed {seed}: random point {i} beats closed form ({f} < {best})")
            })?;
        }
    }

    let mut worst_radius = 0.0f64;
    let mut rng = ChaCha8Rng::seed_from_u64(22);
    for _ in 0..50 {
        let k = rng.random_range(1..=20);
        let terms = (0..k)
            .map(|_| {
                let e = MatrixEllipsoid::centered(
                    DMatrix::from_element(1, 1, rng.random_range(0.01..10.0)),
                    DMatrix::from_element(1, 1, rng.random_range(0.01..10.0)),
                )
                .unwrap();
                let f = DMatrix::from_element(1, 1, rng.random_range(-3.0..3.0));
                let g = DMatrix::from_element(1, 1, rng.random_range(-3.0..3.0));
                SumTerm::new(f, e, g).unwrap()
            })
            .collect();
        let p = SumProblem::new(terms).unwrap();
        let (_, b) = solve_trace(&p).unwrap();
        let radius = (b.left[(0, 0)] * b.right[(0, 0)]).sqrt();
        let exact = tightness_scalar_oracle(&p).unwrap();
        let err = rel(radius, exact);
        ensure(err <= 1e-9, || {
            format!("1-D radius {radius} vs exact {exact}")
        })?;
        worst_radius = worst_radius.max(err);
    }
    Ok(format!(
        "Lagrange spread <= {worst_kkt:.1e}, beats 5e4 random points, 1-D radius err <= {worst_radius:.1e}"
    ))
}

fn mm_monotone_stationary() -> Outcome {
    let mut matrix_cases = 0;
    let mut worst = 0.0f64;
    let config = MmConfig {
        epsilon: 1e-10,
        max_iters: 100_000,
        ..MmConfig::default()
    };
    for seed in 0..50u64 {
        let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(3, &[seed]));
        let q = rng.random_range(1..=5);
        let r = rng.random_range(1..=5);
        let k = rng.random_range(1..=10);
        let p = generate_problem(&GeneratorConfig::matrix(q, r, k, seed)).unwrap();
        matrix_cases += usize::from(r >= 2);
        let rep = solve_mm(&p, &config).map_err(|e| e.to_string())?;
        for w in rep.objective_trace.windows(2) {
            ensure(w[1] <= w[0] + 1e-9 * w[0].abs().max(1.0), || {
                format!("seed {seed}: objective rose {} -> {}", w[0], w[1])
            })?;
        }
        let f = rep.final_objective();
        let g = gradient_logdet(&p, &rep.alpha_final).unwrap().amax();
        let ratio = g / (1.0 + f.abs());
        ensure(ratio <= 1e-5, || {
            format!("seed {seed} (q={q} r={r} K={k}): |grad| {g:.3e} with f {f:.3e}")
        })?;
        worst = worst.max(ratio);
    }
    ensure(matrix_cases > 0, || "no r >= 2 problem drawn".into())?;
    Ok(format!(
        "50 problems ({matrix_cases} with r >= 2), max |grad|/(1+|f|) = {worst:.2e}"
    ))
}

fn mm_matches_projgrad() -> Outcome {
    let mut worst = 0.0f64;
    for k in [10usize, 20, 30, 40, 50] {
        for trial in 0..20u64 {
            let p = generate_problem(&GeneratorConfig::vector(
                5,
                k,
                derive_seed(4, &[k as u64, trial]),
            ))
            .unwrap();
            let config = MmConfig {
                epsilon: 1e-10,
                max_iters: 100_000,
                init: Init::Random(trial),
                ..MmConfig::default()
            };
            let a = solve_mm(&p, &config).map_err(|e| e.to_string())?;
            let b = solve_projgrad(&p, &config).map_err(|e| e.to_string())?;
            let d = rel(a.final_objective(), b.final_objective());
            ensure(d <= 1e-4, || {
                format!(
                    "K={k} trial {trial}: mm {} vs projgrad {}",
                    a.final_objective(),
                    b.final_objective()
                )
            })?;
            worst = worst.max(d);
        }
    }
    Ok(format!("100 trials, max rel difference {worst:.2e}"))
}

fn surrogate() -> Outcome {
    let mut worst_tight = 0.0f64;
    let mut min_gap = f64::INFINITY;
    for seed in 0..10u64 {
        let p = mixed_problem(derive_seed(5, &[seed]));
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for _ in 0..100 {
            let at = positive_alpha(p.len(), &mut rng);
            let c = surrogate_coeffs(&p, &at).unwrap();
            let f_t = objective_logdet(&p, &at).unwrap();
            let tight = rel(c.value(at.values()), f_t);
            ensure(tight <= 1e-9, || {
                format!("seed {seed}: not tight ({tight:.3e})")
            })?;
            worst_tight = worst_tight.max(tight);

            let a = at
                .values()
                .map(|x| x * 10f64.powf(rng.random_range(-1.5..1.5)));
            let f = objective_logdet(&p, &AlphaVector::new(a.clone()).unwrap()).unwrap();
            let g = c.value(&a);
            ensure(g >= f - 1e-9, || {
                format!("seed {seed}: surrogate {g} below f {f}")
            })?;
            min_gap = min_gap.min(g - f);
        }
    }

    let mut rng = ChaCha8Rng::seed_from_u64(55);
    for i in 0..1000 {
        let n = rng.random_range(1..=8);
        let x = random_pd(n, 0.1, &mut rng);
        let x0 = random_pd(n, 0.1, &mut rng);
        let lhs = x.clone().cholesky().unwrap().determinant().ln();
        let c0 = x0.clone().cholesky().unwrap();
        let rhs = c0.determinant().ln() + (c0.inverse() * (&x - &x0)).trace();
        ensure(lhs <= rhs + 1e-12 * (1.0 + rhs.abs()), || {
            format!("pair {i} (n={n}): log det {lhs} above tangent {rhs}")
        })?;
    }
    Ok(format!(
        "1e3 pairs, min g - f = {min_gap:.2e}, tightness <= {worst_tight:.1e}; tangent bound on 1e3 PD pairs"
    ))
}

fn gradient_check() -> Outcome {
    let mut worst = 0.0f64;
    for seed in 0..50u64 {
        let p = mixed_problem(derive_seed(6, &[seed]));
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let a = random_slice_point(&p, &mut rng).unwrap();
        let g = gradient_logdet(&p, &a).unwrap();
        let fd = finite_difference_gradient(&p, &a, 1e-6).unwrap();
        // A single term makes the gradient vanish identically (q r / α - r q / α);
        // measure against the size of the two cancelling parts instead.
        let scale = if p.len() == 1 {
            let c = surrogate_coeffs(&p, &a).unwrap();
            c.a[0].max(c.b[0] / (a.as_slice()[0] * a.as_slice()[0]))
        } else {
            g.amax()
        };
        let err = (&g - &fd).amax() / scale;
        ensure(err <= 1e-5, || format!("seed {seed}: rel error {err:.3e}"))?;
        worst = worst.max(err);
    }
    Ok(format!("50 problems, max rel error {worst:.2e}"))
}

fn median(mut xs: Vec<f64>) -> f64 {
    xs.sort_by(f64::total_cmp);
    xs[xs.len() / 2]
}

fn scaling() -> Outcome {
    let ks = [100usize, 200, 300, 400, 500];
    let cases: Vec<_> = ks
        .iter()
        .map(|&k| {
            let p = generate_problem(&GeneratorConfig::vector(50, k, derive_seed(7, &[k as u64])))
                .unwrap();
            let a = random_alpha(&p, &mut ChaCha8Rng::seed_from_u64(k as u64)).unwrap();
            (p, a)
        })
        .collect();
    // Rounds visit every K in turn so machine drift hits all sizes alike.
    let mut samples = vec![Vec::new(); ks.len()];
    for round in 0..33 {
        for (i, (p, a)) in cases.iter().enumerate() {
            let t = Instant::now();
            std::hint::black_box(mm_step(p, a).unwrap());
            if round >= 3 {
                samples[i].push(t.elapsed().as_secs_f64());
            }
        }
    }
    let per_iter: Vec<f64> = samples.into_iter().map(median).collect();
    let xs: Vec<f64> = ks.iter().map(|&k| (k as f64).ln()).collect();
    let ys: Vec<f64> = per_iter.iter().map(|t| t.ln()).collect();
    let (mx, my) = (xs.iter().sum::<f64>() / 5.0, ys.iter().sum::<f64>() / 5.0);
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    let slope = sxy / sxx;
    ensure(slope <= 1.3, || {
        format!("log-log slope {slope:.3}, times {per_iter:?}")
    })?;

    let p = generate_problem(&GeneratorConfig::vector(50, 500, derive_seed(7, &[500]))).unwrap();
    let t = Instant::now();
    let rep = solve_mm(
        &p,
        &MmConfig {
            init: Init::Random(0),
            ..MmConfig::default()
        },
    )
    .map_err(|e| e.to_string())?;
    let full = t.elapsed();
    ensure(full < Duration::from_secs(10), || {
        format!("K=500 run took {full:?}")
    })?;
    let ms: Vec<String> = per_iter.iter().map(|t| format!("{:.2}", t * 1e3)).collect();
    Ok(format!(
        "slope {slope:.2} (per-iteration ms: {}), K=500 run {} iters in {:.2}s",
        ms.join(" "),
        rep.iterations,
        full.as_secs_f64()
    ))
}

fn lmi_consistency() -> Outcome {
    let mut pairs = 0;
    for seed in 0..100u64 {
        let p = mixed_problem(derive_seed(8, &[seed]));
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for _ in 0..10 {
            let a = positive_alpha(p.len(), &mut rng);
            let b = family(&p, &a).unwrap();
            let precision = b.left.clone().cholesky().unwrap().inverse();
            let ok = check_lmi_feasibility(&p, &precision, &b.right, a.as_slice(), 1e-8).unwrap();
            ensure(ok, || format!("seed {seed}: family point rejected"))?;
            pairs += 1;
        }
    }

    let mut rng = ChaCha8Rng::seed_from_u64(88);
    let e = MatrixEllipsoid::centered(random_pd(3, 0.5, &mut rng), random_pd(2, 0.5, &mut rng))
        .unwrap();
    let f =
        DMatrix::from_fn(3, 3, |_, _| rng.random_range(-1.0..1.0)) + DMatrix::identity(3, 3) * 3.0;
    let single =
        SumProblem::new(vec![SumTerm::new(f, e, DMatrix::identity(2, 2)).unwrap()]).unwrap();
    let a = AlphaVector::from_slice(&[1.0]).unwrap();
    let b = family(&single, &a).unwrap();
    let precision = b.left.clone().cholesky().unwrap().inverse();
    let base = check_lmi_feasibility(&single, &precision, &b.right, &[1.0], 1e-8).unwrap();
    let cut = check_lmi_feasibility(&single, &precision, &b.right, &[0.5], 1e-8).unwrap();
    ensure(base && !cut, || {
        format!("single term: alpha=1 -> {base}, alpha=0.5 -> {cut}")
    })?;
    Ok(format!("{pairs} pairs feasible, halved weight rejected"))
}

fn kronecker() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let (mut wt, mut wl) = (0.0f64, 0.0f64);
    for q in 1..=4 {
        for r in 1..=4 {
            for _ in 0..10 {
                let a = random_pd(q, 0.3, &mut rng);
                let b = random_pd(r, 0.3, &mut rng);
                let et = rel(size_trace(&a, &b).unwrap(), dense_kron_trace(&a, &b));
                let el = rel(
                    size_logdet(&a, &b).unwrap(),
                    dense_kron_logdet(&a, &b).unwrap(),
                );
                ensure(et <= 1e-10 && el <= 1e-10, || {
                    format!("q={q} r={r}: trace err {et:.3e}, logdet err {el:.3e}")
                })?;
                wt = wt.max(et);
                wl = wl.max(el);
            }
        }
    }
    Ok(format!(
        "160 pairs, trace err <= {wt:.1e}, logdet err <= {wl:.1e}"
    ))
}

fn main() {
    let criteria: [Criterion; 9] = [
        ("containment soundness", containment),
        ("trace-optimal closed form", trace_exactness),
        ("MM monotone and stationary", mm_monotone_stationary),
        ("MM agrees with projected gradient", mm_matches_projgrad),
        ("surrogate majorizes", surrogate),
        ("gradient vs finite differences", gradient_check),
        ("per-iteration cost scales linearly", scaling),
        ("LMI consistency", lmi_consistency),
        ("Kronecker size identities", kronecker),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let t = Instant::now();
        let outcome =
            catch_unwind(AssertUnwindSafe(run)).unwrap_or_else(|_| Err("panicked".to_string()));
        let secs = t.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("PASS [{}] {name}: {detail} ({secs:.1}s)", i + 1),
            Err(detail) => {
                failed += 1;
                println!("FAIL [{}] {name}: {detail} ({secs:.1}s)", i + 1);
            }
        }
    }
    println!(
        "acceptance: {} passed, {failed} failed",
        criteria.len() - failed
    );
    if failed > 0 {
        std::process::exit(1);
    }
}
