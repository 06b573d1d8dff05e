use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::*;
use crate::assignment::Assignment;
use crate::graph::{enumerate_triangles, WeightedGraph};

fn random_instance(rng: &mut ChaCha8Rng, kind: EstimatorKind) -> SmoothSensInstance {
    let d = rng.random_range(2..=12);
    let weights: Vec<i64> = (0..d).map(|_| rng.random_range(-10..=10)).collect();
    let density = rng.random_range(0.2..1.0);
    let mut triangles = Vec::new();
    for a in 0..d {
        for b in a + 1..d {
            if rng.random_bool(density) {
                triangles.push(LocalTriangle {
                    a,
                    b,
                    noisy: rng.random_range(-10..=10),
                });
            }
        }
    }
    let beta = [0.1, 0.5, 1.0][rng.random_range(0..3)];
    SmoothSensInstance::new(weights, triangles, rng.random_range(-5..=5), beta, kind).unwrap()
}

fn close(a: f64, b: f64) -> bool {
    (a - b).abs() <= 1e-9 * a.abs().max(b.abs()).max(1e-300)
}

fn single(
    w: [i64; 2],
    noisy: i64,
    lambda: i64,
    beta: f64,
    kind: EstimatorKind,
) -> SmoothSensInstance {
    SmoothSensInstance::new(
        w.to_vec(),
        vec![LocalTriangle { a: 0, b: 1, noisy }],
        lambda,
        beta,
        kind,
    )
    .unwrap()
}

#[test]
fn biased_examples() {
    let beta = 0.5;
    // w_T = λ - 1
    let inst = single([1, 1], 1, 4, beta, EstimatorKind::Biased);
    assert!(close(smooth_sensitivity_biased(&inst).unwrap(), 1.0));
    // w_T = λ + 5
    let inst = single([1, 1], 7, 4, beta, EstimatorKind::Biased);
    let expected = (-5.0 * beta).exp();
    assert!(close(smooth_sensitivity_biased(&inst).unwrap(), expected));
    assert!(close(
        smooth_sensitivity_bruteforce(&inst, DEFAULT_RADIUS).unwrap(),
        expected
    ));
    // two triangles on slot 0, both at λ - 1
    let inst = SmoothSensInstance::new(
        vec![0, 1, 2],
        vec![
            LocalTriangle {
                a: 0,
                b: 1,
                noisy: 2,
            },
            LocalTriangle {
                a: 0,
                b: 2,
                noisy: 1,
            },
        ],
        4,
        beta,
        EstimatorKind::Biased,
    )
    .unwrap();
    assert!(close(smooth_sensitivity_biased(&inst).unwrap(), 2.0));
    assert!(close(
        smooth_sensitivity_bruteforce(&inst, DEFAULT_RADIUS).unwrap(),
        2.0
    ));
}

#[test]
fn unbiased_examples() {
    let p = 0.5;
    let kind = EstimatorKind::unbiased(p).unwrap();
    let x = crate::estimators::x_of(p);
    // w_T = λ: a decrease moves it from -x to 1 + x
    let inst = single([1, 1], 2, 4, 0.5, kind);
    assert!(close(
        smooth_sensitivity_unbiased(&inst).unwrap(),
        1.0 + 2.0 * x
    ));
    assert!(close(
        smooth_sensitivity_bruteforce(&inst, DEFAULT_RADIUS).unwrap(),
        1.0 + 2.0 * x
    ));
    let inst = single([1, 1], 1, 4, 0.5, kind);
    let fast = smooth_sensitivity_unbiased(&inst).unwrap();
    assert!(fast >= x);
    assert!(close(
        fast,
        smooth_sensitivity_bruteforce(&inst, DEFAULT_RADIUS).unwrap()
    ));
    let empty = SmoothSensInstance::new(vec![3, 4], vec![], 0, 0.5, kind).unwrap();
    assert_eq!(smooth_sensitivity_unbiased(&empty).unwrap(), 0.0);
    assert_eq!(
        smooth_sensitivity_bruteforce(&empty, DEFAULT_RADIUS).unwrap(),
        0.0
    );
}

#[test]
fn wrong_kind_and_bad_input() {
    let inst = single([0, 0], 0, 0, 1.0, EstimatorKind::Biased);
    assert!(smooth_sensitivity_unbiased(&inst).is_err());
    assert!(SmoothSensInstance::new(vec![0], vec![], 0, 0.0, EstimatorKind::Biased).is_err());
    assert!(SmoothSensInstance::new(
        vec![0, 0],
        vec![LocalTriangle {
            a: 0,
            b: 2,
            noisy: 0
        }],
        0,
        1.0,
        EstimatorKind::Biased
    )
    .is_err());
    let big = SmoothSensInstance::new(vec![0; 13], vec![], 0, 1.0, EstimatorKind::Biased).unwrap();
    assert!(matches!(
        smooth_sensitivity_bruteforce(&big, DEFAULT_RADIUS),
        Err(Error::TooLarge { size: 13, .. })
    ));
}

#[test]
fn fast_matches_oracle() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for round in 0..300 {
        let kind = if round % 2 == 0 {
            EstimatorKind::Biased
        } else {
            EstimatorKind::unbiased((-[0.5f64, 1.0, 2.0][round % 3]).exp()).unwrap()
        };
        let inst = random_instance(&mut rng, kind);
        let fast = smooth_sensitivity(&inst);
        let oracle = smooth_sensitivity_bruteforce(&inst, DEFAULT_RADIUS).unwrap();
        assert!(
            close(fast, oracle),
            "round {round}: fast {fast} oracle {oracle} for {inst:?}"
        );
    }
}

#[test]
fn bounded_by_local_and_global() {
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    for round in 0..300 {
        let kind = if round % 2 == 0 {
            EstimatorKind::Biased
        } else {
            EstimatorKind::unbiased(0.3).unwrap()
        };
        let inst = random_instance(&mut rng, kind);
        let s = smooth_sensitivity(&inst);
        assert!(s >= local_sensitivity(&inst) * (1.0 - 1e-12));
        assert!(s <= inst.global_sensitivity() * (1.0 + 1e-12));
    }
}

#[test]
fn nonincreasing_in_beta() {
    let mut rng = ChaCha8Rng::seed_from_u64(13);
    for round in 0..200 {
        let kind = if round % 2 == 0 {
            EstimatorKind::Biased
        } else {
            EstimatorKind::unbiased(0.6).unwrap()
        };
        let inst = random_instance(&mut rng, kind);
        let mut prev = f64::INFINITY;
        for beta in [0.05, 0.1, 0.5, 1.0, 2.0] {
            let s = smooth_sensitivity(&inst.with_beta(beta).unwrap());
            assert!(s <= prev * (1.0 + 1e-12));
            prev = s;
        }
    }
}

#[test]
fn local_sensitivity_matches_count_differences() {
    let mut rng = ChaCha8Rng::seed_from_u64(14);
    for _ in 0..100 {
        let inst = random_instance(&mut rng, EstimatorKind::unbiased(0.4).unwrap());
        let base = inst.local_count(inst.weights());
        let mut ls = 0.0f64;
        for i in 0..inst.degree() {
            for b in [1, -1] {
                let mut w = inst.weights().to_vec();
                w[i] += b;
                ls = ls.max((inst.local_count(&w) - base).abs());
            }
        }
        assert!((ls - local_sensitivity(&inst)).abs() < 1e-9);
    }
}

#[test]
fn global_sensitivity_examples() {
    // five triangles {0, 1, a} all assigned to node 0, sharing edge {0, 1}
    let mut edges = vec![(0, 1, 0)];
    for a in 2..7 {
        edges.push((0, a, 0));
        edges.push((1, a, 0));
    }
    let g = WeightedGraph::new(7, edges).unwrap();
    let tris = enumerate_triangles(&g);
    let a = Assignment::from_choices(&g, &tris, vec![2; tris.len()]).unwrap();
    assert_eq!(a.triangles_of(0).len(), 5);
    assert_eq!(global_sensitivity(0, &a, &g, EstimatorKind::Biased), 5.0);
    assert_eq!(
        global_sensitivity(0, &a, &g, EstimatorKind::unbiased(0.5).unwrap()),
        25.0
    );
    assert_eq!(global_sensitivity(3, &a, &g, EstimatorKind::Biased), 0.0);
    let inst =
        SmoothSensInstance::from_graph(&g, &a, 0, g.weights(), 0, 1.0, EstimatorKind::Biased)
            .unwrap();
    assert_eq!(inst.global_sensitivity(), 5.0);
    assert_eq!(inst.triangles().len(), 5);
}

fn dense_instance(d: usize, kind: EstimatorKind) -> SmoothSensInstance {
    let mut rng = ChaCha8Rng::seed_from_u64(d as u64);
    let weights: Vec<i64> = (0..d).map(|_| rng.random_range(0..=10_000)).collect();
    let mut triangles = Vec::new();
    for a in 0..d {
        for b in a + 1..d {
            triangles.push(LocalTriangle {
                a,
                b,
                noisy: rng.random_range(0..=10_000),
            });
        }
    }
    SmoothSensInstance::new(weights, triangles, 15_000, 0.2, kind).unwrap()
}

fn best_time(inst: &SmoothSensInstance) -> f64 {
    (0..3)
        .map(|_| {
            let start = std::time::Instant::now();
            std::hint::black_box(smooth_sensitivity(inst));
            start.elapsed().as_secs_f64()
        })
        .fold(f64::INFINITY, f64::min)
}

#[test]
fn biased_runtime_scaling() {
    let small = best_time(&dense_instance(250, EstimatorKind::Biased));
    let large = best_time(&dense_instance(500, EstimatorKind::Biased));
    eprintln!(
        "d=250: {small:.3}s, d=500: {large:.3}s, ratio {:.2}",
        large / small
    );
    assert!(large / small <= 5.0, "ratio {}", large / small);
}
