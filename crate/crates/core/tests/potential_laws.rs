use proptest::prelude::*;
use riesz_core::ballpot::sphere_area;
use riesz_core::engine::{gradient, hessian, potential, potential_via_complement_default, v_hat};
use riesz_core::quadrature::SphereQuadrature;
use riesz_core::shapes::Shape;
use std::f64::consts::PI;

fn blob(a: f64, b: f64, c: f64) -> Shape {
    Shape::union(vec![
        Shape::ball(&[0.0, 0.0], 1.0).unwrap(),
        Shape::cuboid(&[-0.2, -0.3], &[a, b]).unwrap(),
        Shape::ball(&[0.4, c], 0.6).unwrap(),
    ])
    .unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn homothety(a in 1.2f64..2.0, b in 0.5f64..1.5, c in -0.6f64..0.6,
                 xs in (-0.3f64..0.3, -0.3f64..0.3), li in 0usize..5, big in any::<bool>()) {
        let q = SphereQuadrature::circle(512);
        let lambda = [-1.5, -0.5, 0.0, 0.7, 2.5][li];
        let k = if big { 2.0 } else { 0.5 };
        let shape = blob(a, b, c);
        let scaled = Shape::scale(shape.clone(), k).unwrap();
        let x = [xs.0, xs.1];
        let v = potential(&shape, &x, lambda, &q).unwrap().value;
        let vk = potential(&scaled, &[k * x[0], k * x[1]], lambda, &q).unwrap().value;
        let expected = if lambda == 0.0 { v + sphere_area(2) * k.ln() } else { k.powf(lambda) * v };
        prop_assert!((vk - expected).abs() <= 1e-8 * expected.abs().max(1.0), "{vk} vs {expected}");
    }

    #[test]
    fn adding_a_disjoint_ball_increases_the_potential(
        xs in (-0.5f64..0.5, -0.5f64..0.5), li in 0usize..4
    ) {
        let q = SphereQuadrature::circle(1024);
        let lambda = [-2.0, -0.5, 0.5, 3.0][li];
        let a = Shape::ball(&[0.0, 0.0], 1.0).unwrap();
        let b = Shape::union(vec![a.clone(), Shape::ball(&[4.0, 0.0], 0.5).unwrap()]).unwrap();
        let x = [xs.0, xs.1];
        let va = potential(&a, &x, lambda, &q).unwrap().value;
        let vb = potential(&b, &x, lambda, &q).unwrap().value;
        prop_assert!(va <= vb + 1e-9);
    }
}

#[test]
fn positive_lambda_monotonicity_holds_outside_too() {
    let q = SphereQuadrature::circle(1024);
    let a = Shape::ball(&[0.0, 0.0], 1.0).unwrap();
    let b = Shape::union(vec![a.clone(), Shape::ball(&[4.0, 0.0], 0.5).unwrap()]).unwrap();
    for x in [[2.0, 0.0], [0.0, 3.0], [4.0, 0.0], [-1.0, 0.0]] {
        for lambda in [0.5, 1.0, 2.5] {
            let va = potential(&a, &x, lambda, &q).unwrap().value;
            let vb = potential(&b, &x, lambda, &q).unwrap().value;
            assert!(va <= vb + 1e-9, "{x:?} {lambda}");
        }
    }
}

#[test]
fn lambda_n_gives_the_volume() {
    // Corners and tangent rays limit the trapezoid rule to low algebraic order.
    let q2 = SphereQuadrature::circle(1 << 18);
    let rect = Shape::cuboid(&[-1.0, -0.5], &[2.0, 1.5]).unwrap();
    let pair = Shape::union_of_balls(&[(vec![0.0, 0.0], 1.0), (vec![3.0, 0.0], 0.5)]).unwrap();
    for x in [[0.0, 0.0], [1.5, 1.0], [-0.9, -0.4]] {
        assert!((potential(&rect, &x, 2.0, &q2).unwrap().value - 6.0).abs() < 1e-6 * 6.0);
    }
    for x in [[0.0, 0.0], [0.5, 0.5], [3.1, 0.0]] {
        let vol = PI * 1.25;
        let v = potential(&pair, &x, 2.0, &q2).unwrap().value;
        assert!((v - vol).abs() < 1e-6 * vol, "{x:?}: {}", (v - vol) / vol);
    }
    let q3 = SphereQuadrature::fibonacci(200_000);
    let cube = Shape::cuboid(&[0.0, 0.0, 0.0], &[1.0, 2.0, 0.5]).unwrap();
    let v = potential(&cube, &[0.4, 1.1, 0.2], 3.0, &q3).unwrap().value;
    assert!((v - 1.0).abs() < 1e-4);
}

#[test]
fn complement_form_matches_finite_part() {
    let q = SphereQuadrature::circle(4096);
    let shape = blob(1.6, 1.1, 0.3);
    for lambda in [-0.5, -1.0, -2.0] {
        for x in [[0.0, 0.0], [0.5, 0.2], [-0.4, -0.5]] {
            let direct = potential(&shape, &x, lambda, &q).unwrap().value;
            let comp = potential_via_complement_default(&shape, &x, lambda, &q).unwrap();
            assert!((direct - comp).abs() <= 1e-6 * direct.abs(), "λ={lambda} {x:?}: {direct} vs {comp}");
        }
    }
}

fn central(f: impl Fn(&[f64]) -> f64, x: &[f64], j: usize, h: f64) -> f64 {
    let (mut a, mut b) = (x.to_vec(), x.to_vec());
    a[j] += h;
    b[j] -= h;
    (f(&a) - f(&b)) / (2.0 * h)
}

#[test]
fn derivatives_match_finite_differences() {
    let h = 1e-5;
    let cases: Vec<(Shape, Vec<f64>, SphereQuadrature)> = vec![
        (Shape::ball(&[0.1, 0.2], 1.0).unwrap(), vec![0.4, -0.1], SphereQuadrature::circle(4096)),
        (Shape::ball(&[0.0, 0.0, 0.0], 1.0).unwrap(), vec![0.3, 0.2, -0.1], SphereQuadrature::fibonacci(20_000)),
    ];
    for (shape, x, q) in &cases {
        for lambda in [2.5, 3.5, 5.0] {
            let g = gradient(shape, x, lambda, q).unwrap();
            for j in 0..x.len() {
                let fd = central(|p| v_hat(shape, p, lambda, q).unwrap(), x, j, h);
                assert!((g[j] - fd).abs() <= 1e-5 * g.amax(), "grad λ={lambda} j={j}: {} vs {fd}", g[j]);
            }
            let hm = hessian(shape, x, lambda, q).unwrap();
            for i in 0..x.len() {
                for j in 0..x.len() {
                    let fd = central(|p| gradient(shape, p, lambda, q).unwrap()[i], x, j, h);
                    assert!((hm[(i, j)] - fd).abs() <= 1e-5 * hm.amax(), "hess λ={lambda} {i}{j}: {} vs {fd}", hm[(i, j)]);
                }
            }
        }
    }
}
