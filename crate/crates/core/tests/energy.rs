#![allow(clippy::needless_range_loop)]

mod common;

use common::*;
use locnl_core::elliptic::{solve_u_given_v, solve_v_given_u};
use locnl_core::energy::{dissipation, dissipation_form, energy_ev, energy_f, energy_model2};
use locnl_core::evolution::{initial_state, integrate, schur_generator, step, ExactFlow};
use locnl_core::spectral::lambda1;
use locnl_core::{DVector, ModelKind, TimeScheme};
use proptest::prelude::*;

#[test]
fn functionals_match_triple_loops() {
    let sys = mixed(4, 4);
    let mut r = rng(31);
    for _ in 0..10 {
        let (u, v) = (random_vec(&mut r, 4), random_vec(&mut r, 4));
        let (us, vs) = (u.as_slice(), v.as_slice());
        assert!((energy_ev(&sys, &u, &v) - naive_ev(&sys, us, vs)).abs() < 1e-13);
        assert!((energy_f(&sys, &u, &v) - naive_f(&sys, us, vs)).abs() < 1e-13);
        let (f_u, e) = energy_model2(&sys, &u, &v);
        let (nf, ne) = naive_model2(&sys, us, vs);
        assert!((f_u - nf).abs() < 1e-13 && (e - ne).abs() < 1e-13);
        let d = dissipation_form(&sys, &u, &v);
        assert!((d.total - naive_dissipation(&sys, us, vs)).abs() < 1e-13);
        assert!((d.total - (d.grad_term + d.g_term + d.j_term)).abs() < 1e-13);
        assert!(d.grad_term >= 0.0 && d.g_term >= 0.0 && d.j_term >= 0.0);
    }
}

#[test]
fn constant_states() {
    let sys = reference(8, 8);
    let mass = sys.transmission_mass();
    let ones_a = DVector::from_element(8, 1.0);
    let ones_b = DVector::from_element(8, 1.0);
    assert!((energy_ev(&sys, &ones_a, &ones_b) + 0.5 * mass).abs() < 1e-14);
    for c in [-2.0, 0.5, 3.0] {
        let (ua, vb) = (&ones_a * c, &ones_b * c);
        assert!(energy_f(&sys, &ua, &vb).abs() < 1e-14);
        // the absorption and cross terms of F_u do not cancel on constants
        let (f_u, e) = energy_model2(&sys, &ua, &vb);
        let (nf, _) = naive_model2(&sys, ua.as_slice(), vb.as_slice());
        assert!((f_u - nf).abs() < 1e-13);
        assert!((f_u + 0.5 * mass * c * c).abs() < 1e-13);
        assert!(e.abs() < 1e-14);
        assert!(dissipation(&sys, &ua).unwrap().total.abs() < 1e-13);
    }
    let z = DVector::zeros(8);
    assert_eq!(energy_model2(&sys, &z, &z), (0.0, 0.0));
    assert_eq!(energy_ev(&sys, &z, &z), 0.0);
}

#[test]
fn solved_constraints_are_minimizers() {
    let sys = mixed(10, 9);
    let mut r = rng(32);
    let u = random_vec(&mut r, 10);
    let v = solve_v_given_u(&sys, &u).unwrap().solution;
    let f0 = energy_f(&sys, &u, &v);
    let v2 = random_vec(&mut r, 9);
    let u2 = solve_u_given_v(&sys, &v2).unwrap().solution;
    let e0 = energy_model2(&sys, &u2, &v2).1;
    for k in 0..100 {
        let scale = 10f64.powi(-(k % 6));
        let dv = random_vec(&mut r, 9) * scale;
        assert!(energy_f(&sys, &u, &(&v + dv)) >= f0);
        let du = random_vec(&mut r, 10) * scale;
        assert!(energy_model2(&sys, &(&u2 + du), &v2).1 >= e0);
    }
}

fn central_gradient(f: impl Fn(&DVector<f64>) -> f64, x: &DVector<f64>, step: f64) -> DVector<f64> {
    DVector::from_fn(x.len(), |k, _| {
        let mut p = x.clone();
        let mut m = x.clone();
        p[k] += step;
        m[k] -= step;
        (f(&p) - f(&m)) / (2.0 * step)
    })
}

#[test]
fn gradient_of_f_vanishes_at_solution() {
    let sys = mixed(10, 9);
    let u = random_vec(&mut rng(33), 10);
    let v = solve_v_given_u(&sys, &u).unwrap().solution;
    let g = central_gradient(|v| energy_f(&sys, &u, v), &v, 1e-5);
    assert!(g.norm() <= 1e-9, "{}", g.norm());
}

#[test]
fn gradient_flow_consistency() {
    let sys = mixed(12, 10);
    let w = sys.grid_a.weights();
    let mut r = rng(34);
    for _ in 0..5 {
        let u = random_vec(&mut r, 12);
        let v = solve_v_given_u(&sys, &u).unwrap().solution;
        let rhs = &sys.lap * &u + &sys.jab * &v - sys.b_vec.component_mul(&u);
        let g = central_gradient(|x| energy_ev(&sys, x, &v), &u, 1e-5);
        let g = DVector::from_fn(12, |i, _| g[i] / w[i]);
        assert!((&g + &rhs).norm() <= 1e-6 * rhs.norm(), "{} vs {}", (&g + &rhs).norm(), rhs.norm());
    }
}

#[test]
fn dissipation_identity_is_first_order() {
    let sys = mixed(16, 12);
    let w = sys.grid_a.weights().to_vec();
    let s = schur_generator(&sys, ModelKind::ParabolicElliptic).unwrap();
    // a state taken from along the exact trajectory, past the fast transient
    let u0 = ExactFlow::new(&s, &w).unwrap().apply(0.2, &sys.grid_a.sample(|x| (3.0 * x).sin() + 0.3));
    let ladder = [0.004, 0.002, 0.001, 0.0005];
    let residuals: Vec<f64> = ladder
        .iter()
        .map(|&dt| {
            let st = initial_state(&sys, ModelKind::ParabolicElliptic, &u0).unwrap();
            let b = step(&sys, ModelKind::ParabolicElliptic, &st, dt, TimeScheme::ImplicitEuler).unwrap().u;
            let dn = (weighted_norm(b.as_slice(), &w).powi(2) - weighted_norm(u0.as_slice(), &w).powi(2)) / (2.0 * dt);
            (dn + dissipation(&sys, &b).unwrap().total).abs()
        })
        .collect();
    let order = log_slope(&ladder, &residuals);
    assert!((order - 1.0).abs() <= 0.2, "order {order}, residuals {residuals:?}");
}

#[test]
fn dissipation_bounds_gap_times_norm() {
    for model in [ModelKind::ParabolicElliptic, ModelKind::EllipticParabolic] {
        let sys = mixed(14, 11);
        let lam = lambda1(&sys, model).unwrap().lambda1;
        let w = model.evolving_weights(&sys).to_vec();
        let mut r = rng(35);
        for _ in 0..100 {
            let mut x = random_vec(&mut r, w.len());
            let mean = weighted_sum(x.as_slice(), &w) / w.iter().sum::<f64>();
            x.add_scalar_mut(-mean);
            let d = locnl_core::energy::dissipation_for(&sys, model, &x).unwrap().total;
            assert!(d >= lam * weighted_norm(x.as_slice(), &w).powi(2) * (1.0 - 1e-10));
        }
    }
}

/// `½Σ|∇u|² + F(v)` with `v` closed by the balance.
fn total_energy(sys: &locnl_core::DiscreteSystem, u: &DVector<f64>, v: &DVector<f64>) -> f64 {
    0.5 * grad_sq(u.as_slice(), sys.grid_a.h()) + energy_f(sys, u, v)
}

#[test]
fn total_energy_is_the_generator_form_and_decreases() {
    let sys = reference(32, 32);
    let w = sys.grid_a.weights().to_vec();
    let s = schur_generator(&sys, ModelKind::ParabolicElliptic).unwrap();
    let u0 = sys.grid_a.sample(|x| -5.0 * (1.0 + x) * (1.0 + x));
    let tr = integrate(&sys, ModelKind::ParabolicElliptic, &u0, 0.5, 0.005, TimeScheme::ImplicitEuler).unwrap();
    let mut prev = f64::INFINITY;
    for st in &tr.snapshots {
        let e = total_energy(&sys, &st.u, &st.v);
        let form = 0.5 * weighted_sum((&s * &st.u).component_mul(&st.u).as_slice(), &w);
        assert!((e - form).abs() <= 1e-10 * (1.0 + form.abs()));
        assert!(e <= prev + 1e-10);
        prev = e;
    }
}

#[test]
fn ev_alone_is_not_monotone() {
    let sys = reference(32, 32);
    let u0 = sys.grid_a.sample(|x| -5.0 * (1.0 + x) * (1.0 + x));
    let tr = integrate(&sys, ModelKind::ParabolicElliptic, &u0, 0.5, 0.005, TimeScheme::ImplicitEuler).unwrap();
    let ev: Vec<f64> = tr.diagnostics.iter().map(|d| d.energy_ev).collect();
    let rise = ev.windows(2).map(|p| p[1] - p[0]).fold(f64::NEG_INFINITY, f64::max);
    assert!(rise > 1e-5, "largest increase {rise}");
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn difference_terms_are_shift_invariant(seed in 0u64..10_000, c in -10.0f64..10.0, na in 2usize..12, nb in 2usize..12) {
        let sys = mixed(na, nb);
        let mut r = rng(seed);
        let (u, v) = (random_vec(&mut r, na), random_vec(&mut r, nb));
        let a = dissipation_form(&sys, &u, &v);
        let b = dissipation_form(&sys, &u.add_scalar(c), &v.add_scalar(c));
        prop_assert!((a.g_term - b.g_term).abs() <= 1e-12 * (1.0 + a.g_term));
        prop_assert!((a.j_term - b.j_term).abs() <= 1e-12 * (1.0 + a.j_term));
        prop_assert!((a.grad_term - b.grad_term).abs() <= 1e-11 * (1.0 + a.grad_term));
    }
}
