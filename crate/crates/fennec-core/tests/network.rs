mod common;

use std::f64::consts::PI;

use common::max_diff;
use fennec::linalg::{id2, max_abs, sigma_y, unitarity_defect2, unitarity_defect3, M2, M3};
use fennec::network::{
    circulator_scattering, impedance, pauli_form, scattering, scattering_from_impedance,
    ComplexTwoPort, Disorder, GyratorCircuit, Normalized, PortKind,
};
use fennec::C64;
use nalgebra::{DMatrix, DVector};
use proptest::prelude::*;

const I: C64 = C64::new(0.0, 1.0);

fn circuit(lc: f64, z0: f64, g: f64) -> GyratorCircuit {
    GyratorCircuit::from_normalized(Normalized { lc, z0, g }, 2.0 * PI * 6e9, 50.0)
}

/// Port impedance from a four-node nodal admittance matrix: port nodes 0,1
/// connect through L_c to internal nodes 2,3, which carry the capacitance,
/// inductance and gyrator. The internal nodes are eliminated by solving
/// Y v = e_k for each port drive.
fn nodal_impedance(c: &GyratorCircuit, w: f64) -> M2 {
    let d = c.disorder;
    let lc = [c.lc + d.d_lc, c.lc - d.d_lc];
    let cap = nalgebra::Matrix2::new(c.c0 + d.d_c0, -d.c12, -d.c12, c.c0 - d.d_c0);
    let ind = nalgebra::Matrix2::new(c.l0 + d.d_l0, -d.l12, -d.l12, c.l0 - d.d_l0);
    let inv_l = ind.try_inverse().unwrap();
    let mut y = DMatrix::<C64>::zeros(4, 4);
    for k in 0..2 {
        let yl = 1.0 / (I * w * lc[k]);
        y[(k, k)] += yl;
        y[(k + 2, k + 2)] += yl;
        y[(k, k + 2)] -= yl;
        y[(k + 2, k)] -= yl;
        for j in 0..2 {
            y[(k + 2, j + 2)] += I * w * cap[(k, j)] + inv_l[(k, j)] / (I * w);
        }
    }
    y[(2, 3)] += C64::from(c.g);
    y[(3, 2)] -= C64::from(c.g);
    let lu = y.lu();
    let mut z = M2::zeros();
    for k in 0..2 {
        let mut e = DVector::<C64>::zeros(4);
        e[k] = C64::from(1.0);
        let v = lu.solve(&e).unwrap();
        z[(0, k)] = v[0];
        z[(1, k)] = v[1];
    }
    z
}

#[test]
fn impedance_matches_nodal_analysis() {
    let base = circuit(0.7, 4.0, 0.3);
    let dis = Disorder {
        d_lc: 0.03 * base.lc,
        d_c0: 0.02 * base.c0,
        d_l0: -0.04 * base.l0,
        c12: 0.01 * base.c0,
        l12: 0.015 * base.l0,
    };
    for c in [base, base.with_disorder(dis)] {
        for k in 0..40 {
            let w = c.omega0() * (0.4 + 1.2 * k as f64 / 39.0);
            let z = impedance(&c, w).unwrap().m;
            let oracle = nodal_impedance(&c, w);
            assert!(
                max_diff(z.iter(), oracle.iter()) <= 1e-9 * max_abs(oracle.iter()),
                "w/w0 = {}",
                w / c.omega0()
            );
        }
    }
}

#[test]
fn resonance_impedance_hand_inverse() {
    let c = circuit(0.3, 10.0, 0.8);
    let w0 = c.omega0();
    let z = impedance(&c, w0).unwrap().m;
    // (iGσy)⁻¹ = −(i/G)σy since σy² = 1
    let want = id2() * (I * w0 * c.lc) - sigma_y() * (I / c.g);
    assert!(max_diff(z.iter(), want.iter()) < 1e-12 * max_abs(want.iter()));
}

#[test]
fn clean_impedance_commutes_with_sigma_y() {
    let c = circuit(1.3, 2.0, 0.4);
    let z = impedance(&c, 1.1 * c.omega0()).unwrap().m;
    let comm = z * sigma_y() - sigma_y() * z;
    assert!(max_abs(comm.iter()) <= 1e-12 * max_abs(z.iter()));
}

#[test]
fn matched_gyrator_is_ideal() {
    let c = circuit(0.0, 10.0, 1.0);
    let s = scattering(&c, c.omega0()).unwrap();
    let want = M2::new(
        C64::from(0.0),
        C64::from(1.0),
        C64::from(-1.0),
        C64::from(0.0),
    );
    assert!(max_diff(s.iter(), want.iter()) < 1e-3);
    assert!(20.0 * s[(0, 0)].norm().max(1e-300).log10() <= -60.0);
    let (angle, p) = pauli_form(&c, c.omega0()).unwrap();
    assert!(angle.tan_2theta.abs() >= 1e8);
    assert!(max_diff(p.m.iter(), want.iter()) < 1e-4);
}

#[test]
fn zero_coupling_pauli_is_plus_minus_identity() {
    let c = circuit(0.5, 3.0, 0.0);
    let (angle, p) = pauli_form(&c, 0.8 * c.omega0()).unwrap();
    assert_eq!(angle.tan_2theta, 0.0);
    let mag = p.m[(0, 0)].norm();
    assert!((mag - 1.0).abs() < 1e-12);
    assert!(p.m[(0, 1)].norm() < 1e-12);
}

#[test]
fn pauli_sweep_agrees_with_direct() {
    let c = circuit(0.9, 6.0, 0.35);
    for k in 0..1000 {
        let w = c.omega0() * (0.5 + k as f64 / 999.0);
        let direct = scattering(&c, w).unwrap();
        let (_, p) = pauli_form(&c, w).unwrap();
        assert!(
            max_diff(direct.iter(), p.m.iter()) < 1e-10,
            "w/w0 = {}",
            w / c.omega0()
        );
    }
}

#[test]
fn open_short_limits() {
    let open = ComplexTwoPort {
        m: id2() * C64::from(1e12 * 50.0),
        omega: 1.0,
        kind: PortKind::Impedance,
    };
    let s = scattering_from_impedance(&open, 50.0).unwrap().m;
    assert!(max_diff(s.iter(), id2().iter()) < 1e-10);
    let short = ComplexTwoPort {
        m: M2::zeros(),
        omega: 1.0,
        kind: PortKind::Impedance,
    };
    let s = scattering_from_impedance(&short, 50.0).unwrap().m;
    assert!(max_diff(s.iter(), (-id2()).iter()) < 1e-15);
}

#[test]
fn circulator_ideal_and_far_detuned() {
    let s = circulator_scattering(50.0, 50.0, 50.0, 1.0, 1.0).unwrap();
    let (o, one) = (C64::from(0.0), C64::from(1.0));
    let ideal = M3::new(o, one, o, o, o, -one, one, o, o);
    assert!(max_diff(s.iter(), ideal.iter()) < 1e-9);
    let mut prev = 0.0;
    for w in [0.1, 0.03, 0.01] {
        let s = circulator_scattering(50.0, 50.0, 50.0, 1.0, w).unwrap();
        let m = (0..3).map(|i| s[(i, i)].norm()).fold(1.0f64, f64::min);
        assert!(m > prev);
        prev = m;
    }
    assert!(prev > 0.99, "min |S_ii| = {prev}");
}

fn anti_hermitian() -> impl Strategy<Value = M2> {
    prop::array::uniform6(-10.0f64..10.0).prop_map(|a| {
        let off = C64::new(a[2], a[3]);
        M2::new(I * a[0], off, -off.conj(), I * a[1])
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn anti_hermitian_impedance_gives_unitary(z in anti_hermitian(), zt in 1.0f64..200.0) {
        let s = scattering_from_impedance(&ComplexTwoPort { m: z * C64::from(zt), omega: 1.0, kind: PortKind::Impedance }, zt).unwrap().m;
        prop_assert!(unitarity_defect2(&s) <= 1e-12);
    }

    #[test]
    fn lossless_two_port_properties(
        w in 0.2f64..3.0,
        lc in 0.0f64..20.0,
        z0 in 0.05f64..50.0,
        g in -5.0f64..5.0,
    ) {
        let c = circuit(lc, z0, g);
        let s = scattering(&c, w * c.omega0()).unwrap();
        prop_assert!(unitarity_defect2(&s) <= 1e-10);
        let det = s[(0, 0)] * s[(1, 1)] - s[(0, 1)] * s[(1, 0)];
        prop_assert!((det.norm() - 1.0).abs() <= 1e-10);
        prop_assert!((s[(0, 1)] + s[(1, 0)]).norm() <= 1e-12);
        let flipped = scattering(&c.with_g(-c.g), w * c.omega0()).unwrap();
        prop_assert!(max_diff(s.iter(), flipped.transpose().iter()) <= 1e-10);
    }

    #[test]
    fn disordered_two_port_stays_unitary(
        w in 0.3f64..2.0,
        lc in 0.01f64..5.0,
        g in 0.05f64..3.0,
        d in prop::array::uniform5(-0.1f64..0.1),
    ) {
        let c = circuit(lc, 5.0, g);
        let dis = Disorder { d_lc: d[0] * c.lc, d_c0: d[1] * c.c0, d_l0: d[2] * c.l0, c12: d[3] * c.c0, l12: d[4] * c.l0 };
        let s = scattering(&c.with_disorder(dis), w * c.omega0()).unwrap();
        prop_assert!(unitarity_defect2(&s) <= 1e-10);
    }

    #[test]
    fn reciprocal_without_coupling(w in 0.3f64..0.9, lc in 0.0f64..5.0) {
        let c = circuit(lc, 5.0, 0.0);
        let s = scattering(&c, w * c.omega0()).unwrap();
        prop_assert!((s[(0, 1)] - s[(1, 0)]).norm() <= 1e-12);
    }

    #[test]
    fn circulator_unitary_off_resonance(
        zt in 10.0f64..200.0,
        r in 10.0f64..200.0,
        z0 in 5.0f64..500.0,
        w in prop_oneof![0.05f64..0.99, 1.01f64..20.0],
    ) {
        let s = circulator_scattering(zt, r, z0, 1.0, w).unwrap();
        prop_assert!(unitarity_defect3(&s) <= 1e-10);
    }
}
