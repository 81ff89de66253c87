use stlsq_core::ode::uniform_samples;
use stlsq_core::pde::{
    c0_error, reference_solution, to_schrodinger_picture, InteractionSolution, PeriodicSchrodinger,
};
use stlsq_core::torus::free_propagate;
use stlsq_core::MovingCosinePotential;

fn problem(n: usize, tau: f64) -> PeriodicSchrodinger {
    PeriodicSchrodinger::with_gaussian(n, tau, MovingCosinePotential::default()).unwrap()
}

#[test]
fn minimizer_norm_stays_close_to_the_initial_norm() {
    let p = problem(16, 0.5);
    let u0 = p.u0().norm();
    for k in [32, 64, 256] {
        let sol = p.solve(k).unwrap();
        let delta = 10.0 * sol.diagnostics.energy.sqrt() / u0;
        for t in uniform_samples(201) {
            let ratio = sol.eval(t).unwrap().norm() / u0;
            assert!((ratio - 1.0).abs() <= delta, "K={k} t={t} ratio {ratio} delta {delta}");
        }
    }
}

#[test]
fn pictures_agree_at_zero_and_share_norms() {
    let p = problem(8, 0.5);
    let sol: InteractionSolution = p.solve(48).unwrap();
    let at_zero = to_schrodinger_picture(&sol, &p, 0.0).unwrap();
    assert_eq!(at_zero, sol.eval(0.0).unwrap());
    for t in uniform_samples(9) {
        let v = sol.eval(t).unwrap();
        let u = to_schrodinger_picture(&sol, &p, t).unwrap();
        assert!((u.norm() - v.norm()).abs() < 1e-13);
    }
    assert!(to_schrodinger_picture(&sol, &p, 1.5).is_err());
}

#[test]
fn reference_conserves_the_norm_in_both_pictures() {
    let p = problem(8, 0.5);
    let samples = uniform_samples(17);
    let r = reference_solution(&p, &samples, 1 << 13).unwrap();
    assert!(r.richardson_gap <= 1e-9);
    let n0 = p.u0().norm();
    for (&t, v) in samples.iter().zip(&r.values) {
        let u = free_propagate(v, t * p.tau());
        assert!((u.norm() - n0).abs() < 1e-9);
    }
}

#[test]
fn c0_error_shrinks_with_k_on_a_small_torus() {
    let p = problem(8, 0.25);
    let samples = uniform_samples(33);
    let r = reference_solution(&p, &samples, 1 << 13).unwrap();
    let errors: Vec<f64> = [16, 32, 64, 128, 192]
        .iter()
        .map(|&k| c0_error(&p.solve(k).unwrap().v_coeffs, &r.values, &samples).unwrap())
        .collect();
    assert!(errors.windows(2).all(|w| w[1] < w[0]), "{errors:?}");
    assert!(errors[4] < 1e-7, "{errors:?}");
}

#[test]
fn pcg_iterations_fall_with_tau() {
    let iters: Vec<usize> = [1.0, 0.5, 0.25, 0.125]
        .iter()
        .map(|&tau| problem(8, tau).solve(64).unwrap().diagnostics.iterations)
        .collect();
    assert!(iters.windows(2).all(|w| w[1] <= w[0]), "{iters:?}");
}
