use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use riesz_core::shapes::{builtin, Shape, BUILTIN_NAMES};

#[test]
fn builtins_survive_json_round_trip() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for name in BUILTIN_NAMES {
        let shape = builtin(name).unwrap();
        let text = shape.to_json();
        let back = Shape::from_json(&text).unwrap();
        assert_eq!(back.to_json(), text, "{name}");
        for _ in 0..100 {
            let o: Vec<f64> = (0..2).map(|_| rng.random_range(-4.0..4.0)).collect();
            let a: f64 = rng.random_range(0.0..std::f64::consts::TAU);
            let d = [a.cos(), a.sin()];
            assert_eq!(shape.ray_intervals(&o, &d).unwrap(), back.ray_intervals(&o, &d).unwrap(), "{name}");
        }
    }
}

#[test]
fn documented_schema_parses() {
    let text = r#"{
        "type": "difference",
        "left": {"type": "box", "min": [-1, -1], "max": [1, 1]},
        "right": {"type": "translate", "vector": [0.5, 0],
                  "child": {"type": "scale", "factor": 0.25,
                            "child": {"type": "ball", "center": [0, 0], "radius": 1}}}
    }"#;
    let s = Shape::from_json(text).unwrap();
    assert!(s.contains(&[-0.5, 0.0]));
    assert!(!s.contains(&[0.5, 0.1]));
    let pb = Shape::from_json(r#"{"type": "parallel_body", "points": [[0, 0], [1, 0]], "ell": 0.6}"#).unwrap();
    assert!(pb.contains(&[0.5, 0.3]));
}
