mod common;

use casq_core::casci::{
    dense_hamiltonian, dense_solve, solve_davidson, solve_multiplets,
    transition_density_spin_traced, DEFAULT_DENSE_CAP,
};
use casq_core::detspace::CasSpace;
use casq_core::ingest::{
    d_orbital_angular_momentum, d_shell_eri, random_integrals, IntegralSet, PropertyIntegrals,
};
use casq_core::soc::{qdpt, soc_matrix, SocAnalysis, SocStateBasis};
use casq_core::spectra::{oscillator_strength, transition_dipole};
use casq_core::units::{cm_to_hartree, ev_to_hartree, G_ELECTRON};
use common::*;
use nalgebra::DMatrix;

#[test]
fn gaunt_integrals_match_sphere_quadrature() {
    let (b, c) = (0.11, 0.43);
    let ours = d_shell_eri(b, c);
    let oracle = d_eri_by_quadrature(b, c);
    let worst = ours
        .iter()
        .zip(&oracle)
        .map(|(a, o)| (a - o).abs())
        .fold(0.0, f64::max);
    assert!(worst < 1e-12, "max deviation {worst}");
}

#[test]
fn angular_momentum_matches_differential_operator() {
    let ours = d_orbital_angular_momentum();
    let oracle = d_angular_momentum_by_quadrature();
    for k in 0..3 {
        assert!((&ours[k] - &oracle[k]).amax() < 1e-12, "component {k}");
    }
}

#[test]
fn angular_momentum_commutator() {
    // l_k = i L_k, so [l_x, l_y] = i l_z becomes [L_x, L_y] = L_z
    let l = d_orbital_angular_momentum();
    let comm = &l[0] * &l[1] - &l[1] * &l[0];
    assert!((comm - &l[2]).amax() < 1e-13);
    // l² = l(l + 1) = 6 on the d shell
    let l2 = -(&l[0] * &l[0] + &l[1] * &l[1] + &l[2] * &l[2]);
    assert!((l2 - DMatrix::identity(5, 5) * 6.0).amax() < 1e-13);
}

fn assert_gauge_equivalent(ours: &DMatrix<f64>, oracle: &DMatrix<f64>) {
    let n = ours.nrows();
    // recover per-determinant phases by walking the nonzero couplings
    let mut phase = vec![0.0f64; n];
    for start in 0..n {
        if phase[start] != 0.0 {
            continue;
        }
        phase[start] = 1.0;
        let mut stack = vec![start];
        while let Some(i) = stack.pop() {
            for j in 0..n {
                if phase[j] == 0.0 && oracle[(i, j)].abs() > 1e-10 {
                    phase[j] = phase[i] * (ours[(i, j)] / oracle[(i, j)]).signum();
                    stack.push(j);
                }
            }
        }
    }
    for i in 0..n {
        for j in 0..n {
            let d = ours[(i, j)] - phase[i] * phase[j] * oracle[(i, j)];
            assert!(d.abs() < 1e-12, "element ({i},{j}) differs by {d}");
        }
    }
}

#[test]
fn slater_condon_matches_second_quantization() {
    for (ne, no, ms2, seed) in [(3, 4, 1, 1u64), (4, 4, 0, 2), (4, 5, 2, 3), (5, 5, 1, 4)] {
        let ints = random_integrals(no, seed);
        let space = CasSpace::new(ne, no, ms2).unwrap();
        let ours = dense_hamiltonian(&space, &ints, DEFAULT_DENSE_CAP).unwrap();
        let oracle = second_quantized_hamiltonian(&space, &ints);
        assert_gauge_equivalent(&ours, &oracle);
    }
}

#[test]
fn davidson_matches_dense_on_random_sets() {
    for seed in 0..6u64 {
        let ints = random_integrals(6, 100 + seed);
        let space = CasSpace::new(6, 6, 0).unwrap();
        let dense = dense_solve(&space, &ints, 4, DEFAULT_DENSE_CAP).unwrap();
        let dav = solve_davidson(&space, &ints, 4, &tight()).unwrap();
        for (a, b) in dense.iter().zip(&dav) {
            assert!((a.energy - b.energy).abs() < 1e-9, "seed {seed}");
        }
    }
}

#[test]
fn one_electron_soc_matches_spin_orbital_diagonalization() {
    let model = diagonal_model([3.5, 1.6, 1.6, 2.1, 0.0], 0.0, 0.0, 400.0, 1);
    let b = build(&model);
    let mults = multiplets_of(&b);
    assert_eq!(mults.len(), 5);
    let basis = SocStateBasis::from_multiplets(&mults);
    let soc = soc_matrix(&basis, &mults, &b.properties, 1, 5).unwrap();
    let ours = qdpt(&basis, &basis.diagonal_energies(&mults), &soc).unwrap();
    let oracle = one_electron_soc_hamiltonian(b.integrals.h_matrix(), &b.properties.z);
    let (expect, _) = casq_core::linalg::hermitian_eigen(&oracle).unwrap();
    for (a, e) in ours.energies.iter().zip(&expect) {
        assert!((a - e).abs() < 1e-12, "{a} vs {e}");
    }
}

#[test]
fn t2g_spin_orbit_pattern() {
    // t2g orbitals (xz, yz, xy) of a d¹ ion with no splitting
    let zeta = cm_to_hartree(300.0);
    let l = d_orbital_angular_momentum();
    let pick = [1usize, 2, 4];
    let sub = |m: &DMatrix<f64>| DMatrix::from_fn(3, 3, |i, j| m[(pick[i], pick[j])]);
    let mut props = PropertyIntegrals::zeros(3);
    props.l = std::array::from_fn(|k| sub(&l[k]));
    props.z = std::array::from_fn(|k| sub(&l[k]) * zeta);
    let ints = IntegralSet::zeros(3);
    let mults = solve_multiplets(1, 3, &ints, &roots(&[(2, 3)]), &tight()).unwrap();
    let basis = SocStateBasis::from_multiplets(&mults);
    let soc = soc_matrix(&basis, &mults, &props, 1, 3).unwrap();
    let out = qdpt(&basis, &basis.diagonal_energies(&mults), &soc).unwrap();
    let oracle = one_electron_soc_hamiltonian(&DMatrix::zeros(3, 3), &props.z);
    let (expect, _) = casq_core::linalg::hermitian_eigen(&oracle).unwrap();
    for (a, e) in out.energies.iter().zip(&expect) {
        assert!((a - e).abs() < 1e-14);
    }
    // quartet at −ζ/2, doublet at +ζ (trace zero)
    for k in 0..4 {
        assert!((out.energies[k] + zeta / 2.0).abs() < 1e-14);
    }
    for k in 4..6 {
        assert!((out.energies[k] - zeta).abs() < 1e-14);
    }
}

fn excitation_spectrum(n_elec: usize, v: [f64; 5]) -> Vec<f64> {
    let b = build(&diagonal_model(v, 0.09, 0.35, 0.0, n_elec));
    let space = CasSpace::new(n_elec, 5, 1).unwrap();
    let states = dense_solve(&space, &b.integrals, space.len(), DEFAULT_DENSE_CAP).unwrap();
    states.iter().map(|s| s.energy - states[0].energy).collect()
}

#[test]
fn particle_hole_symmetry_of_d_shell() {
    let v = [0.7, -0.3, 0.2, 1.1, -0.9];
    let neg = v.map(|x| -x);
    let d9 = excitation_spectrum(9, v);
    let d1 = excitation_spectrum(1, neg);
    assert_eq!(d9.len(), d1.len());
    for (a, b) in d9.iter().zip(&d1) {
        assert!((a - b).abs() < 1e-12);
    }
}

#[test]
fn d_shell_repulsion_is_rotationally_invariant() {
    let l = d_orbital_angular_momentum();
    let gen = &l[0] * 0.4 - &l[1] * 0.9 + &l[2] * 0.25;
    let u = expm_antisymmetric(&gen);
    assert!((u.transpose() * &u - DMatrix::identity(5, 5)).amax() < 1e-13);
    let b = build(&diagonal_model(
        [0.5, 0.1, -0.2, 0.9, 0.0],
        0.1,
        0.4,
        0.0,
        3,
    ));
    let rotated = b.integrals.rotated(&u);
    let worst = rotated
        .g2_raw()
        .iter()
        .zip(b.integrals.g2_raw())
        .map(|(a, c)| (a - c).abs())
        .fold(0.0, f64::max);
    assert!(worst < 1e-13, "g2 changed by {worst}");
    let space = CasSpace::new(3, 5, 1).unwrap();
    let e0 = dense_solve(&space, &b.integrals, 10, DEFAULT_DENSE_CAP).unwrap();
    let e1 = dense_solve(&space, &rotated, 10, DEFAULT_DENSE_CAP).unwrap();
    for (a, c) in e0.iter().zip(&e1) {
        assert!((a.energy - c.energy).abs() < 1e-9);
    }
}

#[test]
fn transition_dipole_matches_one_electron_operator_matrix() {
    let n = 5;
    let ints = random_integrals(n, 77);
    let space = CasSpace::new(4, n, 0).unwrap();
    let states = dense_solve(&space, &ints, 6, DEFAULT_DENSE_CAP).unwrap();
    let mut props = PropertyIntegrals::zeros(n);
    for k in 0..3 {
        props.d[k] = DMatrix::from_fn(n, n, |p, q| {
            (((p + 2 * q + k) % 5) as f64 - 2.0) * 0.1 + ((q + 2 * p + k) % 5) as f64 * 0.1
        });
    }
    for k in 0..3 {
        // D as a one-body "Hamiltonian" through the Slater–Condon path
        let mut one = IntegralSet::zeros(n);
        for p in 0..n {
            for q in 0..=p {
                one.set_h(p, q, props.d[k][(p, q)]);
            }
        }
        let dmat = dense_hamiltonian(&space, &one, DEFAULT_DENSE_CAP).unwrap();
        for s in states.iter().skip(1) {
            if s.multiplicity != states[0].multiplicity {
                continue;
            }
            let c0 = nalgebra::DVector::from_column_slice(&states[0].coeffs);
            let cn = nalgebra::DVector::from_column_slice(&s.coeffs);
            let expect = c0.dot(&(&dmat * cn));
            let mu = transition_dipole(&space, &states[0], s, &props).unwrap();
            assert!((mu.mu[k] - expect).abs() < 1e-12);
        }
    }
}

#[test]
fn oscillator_strength_sum_is_rotation_invariant() {
    let n = 5;
    let ints = random_integrals(n, 5);
    let space = CasSpace::new(4, n, 0).unwrap();
    let mut props = PropertyIntegrals::zeros(n);
    for k in 0..3 {
        props.d[k] = DMatrix::from_fn(n, n, |p, q| ((p * 3 + q * 3 + k) % 7) as f64 * 0.05);
    }
    let total = |ints: &IntegralSet, props: &PropertyIntegrals| -> f64 {
        let states = dense_solve(&space, ints, 8, DEFAULT_DENSE_CAP).unwrap();
        states
            .iter()
            .skip(1)
            .map(|s| {
                let mu = transition_dipole(&space, &states[0], s, props).unwrap();
                oscillator_strength(s.energy - states[0].energy, mu.mu).unwrap()
            })
            .sum()
    };
    let gen = DMatrix::from_fn(n, n, |p, q| {
        ((p as f64) - (q as f64)) * 0.13
            + if p < q {
                0.05
            } else if p > q {
                -0.05
            } else {
                0.0
            }
    });
    let u = expm_antisymmetric(&gen);
    let f0 = total(&ints, &props);
    let f1 = total(&ints.rotated(&u), &props.rotated(&u));
    assert!(f0 > 0.0);
    assert!((f0 - f1).abs() < 1e-9, "{f0} vs {f1}");
}

#[test]
fn spin_traced_density_of_ground_state_integrates_to_electrons() {
    let ints = random_integrals(5, 8);
    let space = CasSpace::new(5, 5, 1).unwrap();
    let st = solve_davidson(&space, &ints, 1, &tight()).unwrap();
    let g = transition_density_spin_traced(&space, &st[0].coeffs, &st[0].coeffs);
    assert!((g.trace() - 5.0).abs() < 1e-10);
}

#[test]
fn d1_g_shifts_follow_second_order_formula() {
    let zeta_cm = 20.0;
    let b = build(&diagonal_model(
        [3.5, 1.6, 1.6, 2.1, 0.0],
        0.0,
        0.0,
        zeta_cm,
        1,
    ));
    let mults = multiplets_of(&b);
    let a = SocAnalysis::run(&mults, &b.properties, 1, 5).unwrap();
    let g = a.g_eha.unwrap();
    let zeta = cm_to_hartree(zeta_cm);
    let d1 = ev_to_hartree(2.1);
    let d2 = ev_to_hartree(1.6);
    let dgz = g.principal[2] - G_ELECTRON;
    let dgx = g.principal[0] - G_ELECTRON;
    assert!(
        (dgz / (-8.0 * zeta / d1) - 1.0).abs() < 0.01,
        "Δg_z = {dgz}"
    );
    assert!(
        (dgx / (-2.0 * zeta / d2) - 1.0).abs() < 0.01,
        "Δg_x = {dgx}"
    );
    let sos = a.g_sos.unwrap();
    assert!((sos.principal[2] - G_ELECTRON + 8.0 * zeta / d1).abs() < 1e-10);
}
