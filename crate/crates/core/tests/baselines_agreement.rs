use stlsq_core::baselines::{
    crank_nicolson, picard_duhamel, rk4, two_sided, uniform_grid, CnOptions, DuhamelProblem,
    PicardQuadrature,
};
use stlsq_core::ode::CosineOde;
use stlsq_core::pde::{integrate_to_samples, PeriodicSchrodinger};
use stlsq_core::torus::free_propagate;
use stlsq_core::{Complex64, FourierField2D, HilbertElement, MovingCosinePotential};

fn zero_forcing(_: f64) -> Complex64 {
    Complex64::new(0.0, 0.0)
}

#[test]
fn scalar_baselines_agree_at_their_finest_settings() {
    let ode = CosineOde::new(5.0, 20.0, Complex64::new(0.6, 0.8));
    let op = ode.coefficient();
    let grid = uniform_grid(0.0, 0.5, 1 << 14);

    let cn = crank_nicolson(&op, ode.eta0, &grid, CnOptions::default()).unwrap();
    let rk = rk4(&op, ode.eta0, &grid).unwrap();
    let free = [0.0];
    let picard = picard_duhamel(
        &DuhamelProblem {
            free_symbol: &free,
            bounded: &op,
            forcing: zero_forcing,
            u0: ode.eta0,
            quadrature: PicardQuadrature::default(),
        },
        &grid,
        40,
    )
    .unwrap();

    let trajectories = [&cn, &rk, &picard.trajectory];
    for a in trajectories {
        assert!(a.max_error(|t| ode.exact_solution(t)) < 1e-7);
        for b in trajectories {
            let gap = a
                .states
                .iter()
                .zip(&b.states)
                .map(|(x, y)| (x - y).norm())
                .fold(0.0, f64::max);
            assert!(gap < 1e-7, "{:?} vs {:?}: {gap:e}", a.method, b.method);
        }
    }
}

#[test]
fn two_sided_crank_nicolson_is_second_order_on_the_torus() {
    let p = PeriodicSchrodinger::with_gaussian(8, 0.25, MovingCosinePotential::default()).unwrap();
    let op = p.interaction_operator().unwrap();
    let exact = integrate_to_samples(&op, p.u0(), &[-1.0, 1.0], 1 << 14).unwrap();
    let err = |steps: usize| {
        let traj = two_sided(p.u0().clone(), 1.0, steps, |y, g| {
            crank_nicolson(&op, y, g, CnOptions::default())
        })
        .unwrap();
        let first = traj.states[0].sub(&exact[0]).norm();
        first.max(traj.last().sub(&exact[1]).norm())
    };
    let (e1, e2) = (err(256), err(512));
    let order = (e1 / e2).log2();
    assert!((1.8..2.2).contains(&order), "order {order}, errors {e1:e} {e2:e}");
}

/// Picard in the Schrödinger picture against RK4 in the interaction picture.
#[test]
fn picard_matches_the_interaction_picture_reference() {
    let tau = 0.25;
    let p = PeriodicSchrodinger::with_gaussian(8, tau, MovingCosinePotential::default()).unwrap();
    let symbol = p.free_symbol().unwrap();
    let bounded = p.potential_operator().unwrap();
    let grid = uniform_grid(0.0, 0.25, 1 << 12);
    let out = picard_duhamel(
        &DuhamelProblem {
            free_symbol: &symbol,
            bounded: &bounded,
            forcing: |_: f64| FourierField2D::zeros(8).unwrap(),
            u0: p.u0().clone(),
            quadrature: PicardQuadrature::default(),
        },
        &grid,
        40,
    )
    .unwrap();
    let samples = [0.0625, 0.125, 0.25];
    let v = integrate_to_samples(&p.interaction_operator().unwrap(), p.u0(), &samples, 1 << 14).unwrap();
    for (&t, vt) in samples.iter().zip(&v) {
        let idx = (t / 0.25 * (1 << 12) as f64).round() as usize;
        let u_ref = free_propagate(vt, t * tau);
        let gap = out.trajectory.states[idx].sub(&u_ref).norm();
        assert!(gap < 1e-6, "t={t}: {gap:e}");
    }
    let inc = &out.increments;
    assert!(inc.last().unwrap() < &1e-12, "{inc:?}");
}
