//! Acceptance suite: one PASS/FAIL line per criterion, non-zero exit on failure.

use std::f64::consts::PI;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use riesz_core::ballpot::{
    ball_potential, ball_volume, log_potential_ball, ode_residual, reflect_in_lambda, reflect_in_t, sphere_area,
};
use riesz_core::centers::{centroid, find_centers, uniqueness_sweep, CenterSearchConfig};
use riesz_core::engine::{log_potential, potential, potential_via_complement_default};
use riesz_core::quadrature::SphereQuadrature;
use riesz_core::rings::{asphericity, bihausdorff_to_ball, minimal_ring, parallel_body_bound, phi, RingSearch};
use riesz_core::shapes::{builtin, slit_ball, star_cos, Shape};

const ORACLE_TOL_2D: f64 = 1e-6;
const ORACLE_TOL_3D: f64 = 1e-4;
const ORACLE_DIRECTIONS_2D: usize = 1 << 16;
const ORACLE_DIRECTIONS_3D: usize = 200_000;
const ORACLE_TIME_LIMIT: Duration = Duration::from_secs(60);
const CLOSED_FORM_TOL: f64 = 1e-12;
const BOUNDARY_STEP: f64 = 1e-4;
const BOUNDARY_TOL: f64 = 1e-5;
const REFLECTION_TOL: f64 = 1e-9;
const ODE_TOL: f64 = 1e-8;
const VOLUME_TOL: f64 = 1e-6;
const COMPLEMENT_TOL: f64 = 1e-6;
const HOMOTHETY_TOL: f64 = 1e-8;
const CENTER_TOL: f64 = 1e-4;
const CENTROID_TOL: f64 = 1e-3;
const CENTER_TIME_LIMIT: Duration = Duration::from_secs(300);
const SWEEP_STARTS: usize = 48;
const SWEEP_DIRECTIONS: usize = 1024;
const RING_TOL: f64 = 1e-3;
const PARALLEL_SLACK: f64 = 1e-3;
const LOG_DISK_TOL: f64 = 1e-6;
const MONTE_CARLO_SAMPLES: usize = 10_000_000;
const MONTE_CARLO_SIGMAS: f64 = 3.0;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: String) -> Outcome {
    Outcome { pass, detail }
}

fn run(id: usize, title: &str, f: impl FnOnce() -> Outcome) -> bool {
    let start = Instant::now();
    let result = catch_unwind(AssertUnwindSafe(f));
    let secs = start.elapsed().as_secs_f64();
    let (pass, detail) = match result {
        Ok(o) => (o.pass, o.detail),
        Err(e) => {
            let msg = e
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_default();
            (false, format!("panicked: {msg}"))
        }
    };
    println!("{} criterion {id} ({title}) [{secs:.1}s]: {detail}", if pass { "PASS" } else { "FAIL" });
    pass
}

fn rel(value: f64, exact: f64) -> f64 {
    if exact == 0.0 {
        value.abs()
    } else {
        ((value - exact) / exact).abs()
    }
}

fn ball_oracle() -> Outcome {
    let start = Instant::now();
    let lambdas = [-3.0, -1.0, -0.5, 0.0, 0.5, 2.0, 3.7];
    let ts = [0.0, 0.3, 0.6, 0.9, 1.5, 3.0];
    let mut pass = true;
    let mut notes = Vec::new();
    for (n, tol, q) in [
        (2, ORACLE_TOL_2D, SphereQuadrature::circle(ORACLE_DIRECTIONS_2D)),
        (3, ORACLE_TOL_3D, SphereQuadrature::fibonacci(ORACLE_DIRECTIONS_3D)),
    ] {
        let ball = Shape::ball(&vec![0.0; n], 1.0).unwrap();
        let mut worst = (0.0, 0.0, 0.0);
        for &l in &lambdas {
            for &t in &ts {
                let mut x = vec![0.0; n];
                x[0] = t;
                let e = rel(potential(&ball, &x, l, &q).unwrap().value, ball_potential(n, l, t).unwrap());
                if e > worst.0 {
                    worst = (e, l, t);
                }
            }
        }
        pass &= worst.0 <= tol;
        notes.push(format!(
            "n={n} ({} dirs) worst rel {:.2e} at λ={}, t={} (tol {tol:.0e})",
            q.len(),
            worst.0,
            worst.1,
            worst.2
        ));
    }
    let elapsed = start.elapsed();
    pass &= elapsed < ORACLE_TIME_LIMIT;
    notes.push(format!("{:.1}s < {}s", elapsed.as_secs_f64(), ORACLE_TIME_LIMIT.as_secs()));
    outcome(pass, notes.join("; "))
}

fn newton_values() -> Outcome {
    let q = SphereQuadrature::fibonacci(ORACLE_DIRECTIONS_3D);
    let ball = Shape::ball(&[0.0, 0.0, 0.0], 1.0).unwrap();
    let mut pass = true;
    let mut notes = Vec::new();
    for (t, exact) in [(0.5, 2.0 * PI * 11.0 / 12.0), (2.0, 2.0 * PI / 3.0)] {
        let closed = ball_potential(3, 2.0, t).unwrap();
        let engine = potential(&ball, &[t, 0.0, 0.0], 2.0, &q).unwrap().value;
        let (ec, ee) = (rel(closed, exact), rel(engine, exact));
        pass &= ec <= CLOSED_FORM_TOL && ee <= ORACLE_TOL_3D;
        notes.push(format!("t={t}: closed form rel {ec:.1e}, engine rel {ee:.1e}"));
    }
    outcome(pass, notes.join("; "))
}

fn gauss_boundary() -> Outcome {
    let mut worst_mid: f64 = 0.0;
    let mut worst_side: f64 = 0.0;
    for n in [2, 3, 4] {
        for l in [0.5, 1.0, 2.0, 3.0] {
            let at_one = ball_potential(n, l, 1.0).unwrap();
            let below = ball_potential(n, l, 1.0 - BOUNDARY_STEP).unwrap();
            let above = ball_potential(n, l, 1.0 + BOUNDARY_STEP).unwrap();
            worst_mid = worst_mid.max(rel(0.5 * (below + above), at_one));
            worst_side = worst_side.max(rel(below, at_one)).max(rel(above, at_one));
        }
    }
    outcome(
        worst_mid <= BOUNDARY_TOL,
        format!(
            "two-sided estimate (V(1-h)+V(1+h))/2 vs gamma formula, h={BOUNDARY_STEP:.0e}: worst rel {worst_mid:.2e} (tol {BOUNDARY_TOL:.0e}); single-sided worst rel {worst_side:.2e}"
        ),
    )
}

fn reflections() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let (mut worst_ref, mut worst_ode): (f64, f64) = (0.0, 0.0);
    for _ in 0..100 {
        let n = rng.random_range(2..=6usize);
        let l = loop {
            let l: f64 = rng.random_range(-4.0..6.0);
            if l.abs() > 0.05 {
                break l;
            }
        };
        let t: f64 = match rng.random_range(0..3) {
            0 => rng.random_range(-0.95..0.95),
            1 => rng.random_range(1.05..4.0),
            _ => rng.random_range(-4.0..-1.05),
        };
        let direct = ball_potential(n, l, t).unwrap();
        let scale = direct.abs().max(1.0);
        worst_ref = worst_ref
            .max((reflect_in_t(n, l, t).unwrap() - direct).abs() / scale)
            .max((reflect_in_lambda(n, l, t).unwrap() - direct).abs() / scale);
        worst_ode = worst_ode.max(ode_residual(n, l, t).unwrap().abs() / scale);
    }
    outcome(
        worst_ref <= REFLECTION_TOL && worst_ode <= ODE_TOL,
        format!("100 samples: reflection worst {worst_ref:.2e}, ODE residual worst {worst_ode:.2e} (relative, unit floor)"),
    )
}

fn blob() -> Shape {
    Shape::union(vec![
        Shape::ball(&[0.0, 0.0], 1.0).unwrap(),
        Shape::cuboid(&[-0.2, -0.3], &[1.6, 1.1]).unwrap(),
        Shape::ball(&[0.4, 0.3], 0.6).unwrap(),
    ])
    .unwrap()
}

fn regularization() -> Outcome {
    let q_fine = SphereQuadrature::circle(ORACLE_DIRECTIONS_2D);
    let q = SphereQuadrature::circle(4096);
    let mut worst_vol: f64 = 0.0;
    let rect = Shape::cuboid(&[-1.0, -0.5], &[2.0, 1.5]).unwrap();
    let disk = Shape::ball(&[0.2, 0.1], 0.8).unwrap();
    for x in [[0.0, 0.0], [1.5, 1.0], [-0.5, 0.9]] {
        worst_vol = worst_vol.max(rel(potential(&rect, &x, 2.0, &q_fine).unwrap().value, 6.0));
    }
    for x in [[0.2, 0.1], [0.7, 0.3], [-0.4, 0.0]] {
        worst_vol = worst_vol.max(rel(potential(&disk, &x, 2.0, &q_fine).unwrap().value, PI * 0.64));
    }
    let b3 = Shape::ball(&[0.0, 0.0, 0.0], 1.0).unwrap();
    let v3 = potential(&b3, &[0.0, 0.0, 0.0], 3.0, &SphereQuadrature::fibonacci(1000)).unwrap().value;
    worst_vol = worst_vol.max(rel(v3, ball_volume(3)));

    let mut worst_comp: f64 = 0.0;
    for shape in [blob(), disk.clone()] {
        for l in [-0.5, -1.0, -2.0] {
            for x in [[0.2, 0.1], [0.5, -0.2], [-0.3, 0.4]] {
                let direct = potential(&shape, &x, l, &q).unwrap().value;
                let comp = potential_via_complement_default(&shape, &x, l, &q).unwrap();
                worst_comp = worst_comp.max(rel(comp, direct));
            }
        }
    }

    let mut worst_hom: f64 = 0.0;
    let q_small = SphereQuadrature::circle(1024);
    for shape in [blob(), disk, builtin("two-lobe-x").unwrap()] {
        for l in [-1.5, -0.5, 0.0, 0.7, 2.5] {
            for k in [0.5, 2.0] {
                let scaled = Shape::scale(shape.clone(), k).unwrap();
                for x in [[0.2, 0.1], [0.5, -0.2]] {
                    let v = potential(&shape, &x, l, &q_small).unwrap().value;
                    let vk = potential(&scaled, &[k * x[0], k * x[1]], l, &q_small).unwrap().value;
                    let expected = if l == 0.0 { v + sphere_area(2) * k.ln() } else { k.powf(l) * v };
                    worst_hom = worst_hom.max((vk - expected).abs() / expected.abs().max(1.0));
                }
            }
        }
    }
    outcome(
        worst_vol <= VOLUME_TOL && worst_comp <= COMPLEMENT_TOL && worst_hom <= HOMOTHETY_TOL,
        format!(
            "λ=n volume worst rel {worst_vol:.2e}; complement vs finite part worst rel {worst_comp:.2e}; homothety worst {worst_hom:.2e}"
        ),
    )
}

fn centers() -> Outcome {
    let start = Instant::now();
    let q = SphereQuadrature::circle(4096);
    let mut pass = true;
    let mut notes = Vec::new();

    let (c, r) = ([0.3, -0.2], 0.7);
    let disk = Shape::ball(&c, r).unwrap();
    let mut worst: f64 = 0.0;
    for l in [-2.0, -0.5, 0.0, 0.5, 2.0, 3.0, 5.0] {
        let report = find_centers(&disk, &CenterSearchConfig::new(l), &q).unwrap();
        let p = &report.centers[0].point;
        let err = (p[0] - c[0]).hypot(p[1] - c[1]) / r;
        pass &= report.unique;
        worst = worst.max(err);
    }
    pass &= worst <= CENTER_TOL;
    notes.push(format!("ball center worst error {worst:.1e}·r"));

    // Centroids from exact areas and first moments.
    let disk_pair = Shape::union_of_balls(&[(vec![0.0, 0.0], 1.0), (vec![2.2, 0.0], 0.7)]).unwrap();
    let pair_c = [0.49 * 2.2 / 1.49, 0.0];
    let holed = Shape::difference(
        Shape::cuboid(&[-1.0, -1.0], &[1.5, 1.0]).unwrap(),
        Shape::ball(&[0.6, 0.2], 0.4).unwrap(),
    )
    .unwrap();
    let hole = 0.16 * PI;
    let holed_c = [(5.0 * 0.25 - hole * 0.6) / (5.0 - hole), (-hole * 0.2) / (5.0 - hole)];
    let ell = Shape::union(vec![
        Shape::cuboid(&[0.0, 0.0], &[2.0, 1.0]).unwrap(),
        Shape::cuboid(&[0.0, 0.0], &[1.0, 2.0]).unwrap(),
    ])
    .unwrap();
    let ell_c = [2.5 / 3.0, 2.5 / 3.0];
    let mut worst_c: f64 = 0.0;
    let mut worst_log: f64 = 0.0;
    for (shape, exact) in [(&disk_pair, pair_c), (&holed, holed_c), (&ell, ell_c)] {
        let report = find_centers(shape, &CenterSearchConfig::new(4.0), &q).unwrap();
        let p = &report.centers[0].point;
        pass &= report.unique;
        worst_c = worst_c.max((p[0] - exact[0]).abs().max((p[1] - exact[1]).abs()));
        let g = centroid(shape, &q).unwrap();
        worst_c = worst_c.max((g[0] - exact[0]).abs().max((g[1] - exact[1]).abs()));
        let log_center = find_centers(shape, &CenterSearchConfig::new(2.0), &q).unwrap();
        let p = &log_center.centers[0].point;
        worst_log = worst_log.max((p[0] - exact[0]).hypot(p[1] - exact[1]));
    }
    pass &= worst_c <= CENTROID_TOL;
    notes.push(format!(
        "r²-center (λ=n+2) and centroid vs exact centroid worst {worst_c:.1e}; λ=2 (log) center lies {worst_log:.2} from it"
    ));

    let two = find_centers(&builtin("two-balls").unwrap(), &CenterSearchConfig::new(-5.0), &q).unwrap();
    pass &= two.centers.len() == 2;
    notes.push(format!("two-balls λ=-5: {} centers", two.centers.len()));

    let elapsed = start.elapsed();
    pass &= elapsed < CENTER_TIME_LIMIT;
    notes.push(format!("{:.1}s < {}s", elapsed.as_secs_f64(), CENTER_TIME_LIMIT.as_secs()));
    outcome(pass, notes.join("; "))
}

fn uniqueness() -> Outcome {
    let q = SphereQuadrature::circle(SWEEP_DIRECTIONS);
    let cfg = CenterSearchConfig { starts: SWEEP_STARTS, ..CenterSearchConfig::new(0.0) };
    let rings = RingSearch { grid_resolution: 32, ..Default::default() };
    let stars = uniqueness_sweep(
        |eps| star_cos(3, eps, 720),
        &[0.01, 0.05, 0.1],
        &[-2.0, -1.0, 0.5, 1.0, 3.0],
        &cfg,
        Some(&rings),
        &q,
    )
    .unwrap();
    let bodies = uniqueness_sweep(
        |ell| Shape::parallel_body(&[vec![0.0, 0.0], vec![1.0, 0.0]], ell),
        &[10.0],
        &[-2.0, -1.0],
        &cfg,
        Some(&rings),
        &q,
    )
    .unwrap();
    let bad: Vec<String> = stars
        .iter()
        .chain(&bodies)
        .filter(|r| r.n_centers != 1)
        .map(|r| format!("(param {}, λ {}) -> {}", r.parameter, r.lambda, r.n_centers))
        .collect();
    let alphas: Vec<String> = stars
        .iter()
        .step_by(5)
        .chain(bodies.iter().take(1))
        .map(|r| format!("{}:{:.4}", r.parameter, r.asphericity.unwrap_or(f64::NAN)))
        .collect();
    outcome(
        bad.is_empty(),
        format!(
            "{} star entries and {} parallel-body entries, {SWEEP_STARTS} starts; non-unique: [{}]; asphericity by parameter [{}]",
            stars.len(),
            bodies.len(),
            bad.join(", "),
            alphas.join(", ")
        ),
    )
}

fn ring_fixtures() -> Outcome {
    let q = SphereQuadrature::circle(4096);
    let mut pass = true;
    let mut notes = Vec::new();
    let x = builtin("two-lobe-x").unwrap();
    let ring = minimal_ring(&x, &RingSearch::default(), &q).unwrap();
    let near = |p: &[f64], a: [f64; 2]| (p[0] - a[0]).hypot(p[1] - a[1]) < 1e-2;
    let at_a = ring.centers.iter().any(|p| near(p, [0.0, 0.0]));
    let at_b = ring.centers.iter().any(|p| near(p, [1.0, 0.0]));
    pass &= ring.centers.len() == 2 && at_a && at_b && (ring.phi - 1.0).abs() <= RING_TOL;
    notes.push(format!("X: {} ring centers (A: {at_a}, B: {at_b}), phi {:.7}", ring.centers.len(), ring.phi));
    let expected = 3.75f64.sqrt() - 0.75f64.sqrt();
    let at_c = phi(&x, &[0.5, 0.0], &q);
    pass &= (at_c - expected).abs() <= RING_TOL;
    notes.push(format!("phi(0.5,0) {at_c:.6} vs {expected:.6}"));

    let slit = slit_ball(2, 0.1).unwrap();
    let d = bihausdorff_to_ball(&slit, &[0.0, 0.0], 1.0, &q).unwrap();
    pass &= d == 1.0;
    notes.push(format!("slit ball d_bH = {d}"));

    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let search = RingSearch { grid_resolution: 32, ..Default::default() };
    let mut worst_margin = f64::NEG_INFINITY;
    for _ in 0..20 {
        let count = rng.random_range(2..=6);
        let pts: Vec<Vec<f64>> = (0..count).map(|_| vec![rng.random_range(0.0..1.0), rng.random_range(0.0..1.0)]).collect();
        let ell = rng.random_range(2.0..10.0);
        let body = Shape::parallel_body(&pts, ell).unwrap();
        let a = asphericity(&body, &search, &q).unwrap().value;
        worst_margin = worst_margin.max(a - parallel_body_bound(&pts, ell));
    }
    pass &= worst_margin <= PARALLEL_SLACK;
    notes.push(format!("20 clouds: max alpha - d/ell = {worst_margin:.2e}"));
    outcome(pass, notes.join("; "))
}

fn log_potentials() -> Outcome {
    let disk = log_potential_ball(2, 0.0).unwrap();
    let disk_err = (disk - PI / 2.0).abs();

    let closed = log_potential_ball(3, 0.5).unwrap();
    let engine = log_potential(
        &Shape::ball(&[0.0, 0.0, 0.0], 1.0).unwrap(),
        &[0.5, 0.0, 0.0],
        &SphereQuadrature::fibonacci(ORACLE_DIRECTIONS_3D),
    )
    .unwrap()
    .value;
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let (mut sum, mut sum_sq) = (0.0, 0.0);
    let mut drawn = 0;
    while drawn < MONTE_CARLO_SAMPLES {
        let y: [f64; 3] = [rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)];
        if y[0] * y[0] + y[1] * y[1] + y[2] * y[2] > 1.0 {
            continue;
        }
        let f = -((y[0] - 0.5).powi(2) + y[1] * y[1] + y[2] * y[2]).sqrt().ln();
        sum += f;
        sum_sq += f * f;
        drawn += 1;
    }
    let m = drawn as f64;
    let mean = sum / m;
    let sd = ((sum_sq / m - mean * mean) * m / (m - 1.0)).sqrt();
    let vol = ball_volume(3);
    let (mc, se) = (vol * mean, vol * sd / m.sqrt());
    let z_closed = (closed - mc).abs() / se;
    let z_engine = (engine - mc).abs() / se;
    outcome(
        disk_err <= LOG_DISK_TOL && z_closed <= MONTE_CARLO_SIGMAS && z_engine <= MONTE_CARLO_SIGMAS,
        format!(
            "disk center {disk:.12} (err {disk_err:.1e}); n=3 t=0.5: closed {closed:.6}, engine {engine:.6}, Monte Carlo {mc:.6} ± {se:.1e} ({z_closed:.2}σ, {z_engine:.2}σ)"
        ),
    )
}

fn main() {
    let results = [
        run(1, "ball oracle equivalence", ball_oracle),
        run(2, "Newton potential values", newton_values),
        run(3, "Gauss boundary value", gauss_boundary),
        run(4, "reflection identities and ODE", reflections),
        run(5, "regularization identities", regularization),
        run(6, "center correctness", centers),
        run(7, "uniqueness phenomenon", uniqueness),
        run(8, "ring fixtures", ring_fixtures),
        run(9, "log potential", log_potentials),
    ];
    let passed = results.iter().filter(|&&p| p).count();
    println!("{passed}/{} criteria passed", results.len());
    if passed != results.len() {
        std::process::exit(1);
    }
}
