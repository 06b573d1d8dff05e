use lwdp_demo::ops::{estimator_moments, protocol_run, sensitivity_curve};

#[test]
fn curve_is_bracketed_and_monotone() {
    let betas = [0.05, 0.2, 0.5, 1.0, 3.0];
    for unbiased in [false, true] {
        let out = sensitivity_curve(25, 0.5, 10, 4, 1.0, unbiased, &betas).unwrap();
        let (ls, gs, smooth) = (out[2], out[3], &out[4..]);
        assert_eq!(smooth.len(), betas.len());
        for w in smooth.windows(2) {
            assert!(w[1] <= w[0] + 1e-12);
        }
        assert!(
            smooth.iter().all(|&s| ls - 1e-12 <= s && s <= gs + 1e-12),
            "{out:?}"
        );
    }
}

#[test]
fn moments_rows() {
    let out = estimator_moments(0.5, -2, 2).unwrap();
    assert_eq!(out.len(), 20);
    // E[biased] at w_T = λ is Pr[Z < 0] = p / (1 + p)
    assert!((out[2 * 4 + 1] - 0.5 / 1.5).abs() < 1e-12);
    assert!(estimator_moments(1.0, 0, 1).is_err());
    assert!(estimator_moments(0.5, 3, 1).is_err());
}

#[test]
fn protocol_run_tallies() {
    let out = protocol_run(20, 0.5, 10, 2, 2.0, true, true).unwrap();
    assert_eq!(out[4], out[6]);
    assert_eq!(out[5], 20.0);
    assert!(out[0] > 0.0);
    assert!(protocol_run(20, 0.5, 10, 2, -1.0, true, true).is_err());
}
