mod common;

use common::{max_diff, rel};
use fennec::constants::RESISTANCE_QUANTUM;
use fennec::design::{
    bandwidth, central_frequency, chi, compression_curve, disorder_first_order, disorder_tolerance,
    matched_point_ds, mixing_matrices, optimal_conductance, DisorderParam, MixingDrive, NormMetric,
    DEFAULT_COMPRESSION_RATIO,
};
use fennec::linalg::{max_abs, M2};
use fennec::network::{pauli_tan, scattering, Disorder, GyratorCircuit, Normalized};
use fennec::C64;
use proptest::prelude::*;

const W0: f64 = 2.0 * std::f64::consts::PI * 7e9;
const ZTL: f64 = 50.0;

fn circuit(lc: f64, z0: f64) -> GyratorCircuit {
    let c = GyratorCircuit::from_normalized(Normalized { lc, z0, g: 1.0 }, W0, ZTL);
    c.with_g(optimal_conductance(&c))
}

fn s11(c: &GyratorCircuit, w: f64) -> f64 {
    scattering(c, w).unwrap()[(0, 0)].norm()
}

/// Golden-section minimiser on a unimodal interval.
fn golden_min(f: impl Fn(f64) -> f64, mut a: f64, mut b: f64, iters: usize) -> f64 {
    let r = (5f64.sqrt() - 1.0) / 2.0;
    for _ in 0..iters {
        let c = b - r * (b - a);
        let d = a + r * (b - a);
        if f(c) < f(d) {
            b = d;
        } else {
            a = c;
        }
    }
    0.5 * (a + b)
}

/// Conductance nulling S11 at ω0, from the quadratic den(G²) = 0 of the
/// Pauli denominator: G = 1/(Z_TL·sqrt(1 + L_c'²)).
fn null_conductance(lc: f64) -> f64 {
    1.0 / (ZTL * (1.0 + lc * lc).sqrt())
}

#[test]
fn null_conductance_minimises_reflection() {
    for lc in [0.05, 0.5, 2.0, 8.0] {
        let c = circuit(lc, 10.0);
        let best = golden_min(|g| s11(&c.with_g(g), W0), 0.01 * c.g, 3.0 * c.g, 200);
        assert!(rel(best, null_conductance(lc)) < 1e-6, "lc' = {lc}");
        assert!(s11(&c.with_g(null_conductance(lc)), W0) < 1e-9);
    }
}

#[test]
fn optimal_conductance_closed_form() {
    for lc in [1e-3, 0.05, 0.5, 2.0, 8.0, 100.0] {
        // positive root of L_c'² G'² + G' − 1 = 0
        let g = optimal_conductance(&circuit(lc, 10.0)) * ZTL;
        assert!((lc * lc * g * g + g - 1.0).abs() < 1e-12);
    }
    // agrees with the reflection null in both limits, not in between
    assert!(
        rel(
            optimal_conductance(&circuit(1e-4, 10.0)),
            null_conductance(1e-4)
        ) < 1e-8
    );
    assert!(
        rel(
            optimal_conductance(&circuit(1e3, 10.0)),
            null_conductance(1e3)
        ) < 1e-3
    );
    assert!(
        rel(
            optimal_conductance(&circuit(1.0, 10.0)),
            null_conductance(1.0)
        ) > 0.1
    );
}

#[test]
fn optimal_conductance_limits() {
    let tiny = circuit(1e-9, 10.0);
    assert!(rel(optimal_conductance(&tiny), 1.0 / ZTL) < 1e-9);
    let big = circuit(50.0, 10.0);
    assert!(rel(optimal_conductance(&big), 1.0 / (big.lc * W0)) < 0.02);
    // both sides of the series-branch switch
    let a = optimal_conductance(&circuit(0.99e-6, 10.0));
    let b = optimal_conductance(&circuit(1.01e-6, 10.0));
    assert!(rel(a, b) < 1e-11);
}

#[test]
fn optimal_conductance_monotone_in_lc() {
    let mut prev = f64::INFINITY;
    for k in 0..400 {
        let g = optimal_conductance(&circuit(k as f64 * 0.25, 10.0));
        assert!(g < prev || k == 0);
        prev = g;
    }
}

#[test]
fn central_frequency_oracles() {
    let c = circuit(0.0, 10.0);
    assert_eq!(central_frequency(&c).unwrap(), W0);

    let c = circuit(5.0, 10.0);
    assert!((central_frequency(&c).unwrap() / W0 - 1.0).abs() <= 0.1);
    for lc in [0.5, 2.0, 5.0, 10.0] {
        let c = circuit(lc, 10.0);
        let wc = central_frequency(&c).unwrap();
        let (t, _, _) = pauli_tan(&c, wc);
        assert!(t.abs() > 1e6, "tan2theta at the central frequency = {t}");
        assert!(s11(&c, wc) < 1e-9);
    }

    // detuned coupling: the central frequency is where reflection vanishes
    let c = circuit(0.5, 10.0);
    let c = c.with_g(1.1 * c.g);
    let wc = central_frequency(&c).unwrap();
    assert!(s11(&c, wc) < 1e-8);
    let oracle = golden_min(|w| s11(&c, w), wc - 0.02 * W0, wc + 0.02 * W0, 200);
    assert!(rel(wc, oracle) < 1e-7);
}

#[test]
fn central_frequency_is_unit_independent() {
    let si = circuit(5.0, 10.0);
    let norm = GyratorCircuit::from_normalized(
        Normalized {
            lc: 5.0,
            z0: 10.0,
            g: si.g * ZTL,
        },
        1.0,
        1.0,
    );
    let a = central_frequency(&si).unwrap() / W0;
    let b = central_frequency(&norm).unwrap();
    assert!((a - b).abs() < 1e-10);
}

#[test]
fn bandwidth_edges_balance_reflection_and_transmission() {
    for lc in [0.0, 0.3, 5.0, 20.0] {
        let c = circuit(lc, 10.0);
        let b = bandwidth(&c).unwrap();
        assert!(b.omega_minus < W0 && W0 < b.omega_plus);
        for w in [b.omega_minus, b.omega_plus] {
            let s = scattering(&c, w).unwrap();
            assert!(
                (s[(0, 0)].norm() - s[(0, 1)].norm()).abs() < 1e-7,
                "lc' = {lc}"
            );
        }
        assert!(b.residuals.iter().all(|r| *r <= 1e-8));
    }
}

#[test]
fn bandwidth_zero_lc_closed_form() {
    let b = bandwidth(&circuit(0.0, 10.0)).unwrap();
    let est = b.zero_lc_estimate.unwrap();
    assert!(
        rel(b.delta, est) < 0.05,
        "delta {} vs {}",
        b.delta / W0,
        est / W0
    );
}

#[test]
fn bandwidth_inverse_square_at_large_lc() {
    let d20 = bandwidth(&circuit(20.0, 10.0)).unwrap().delta;
    let d40 = bandwidth(&circuit(40.0, 10.0)).unwrap().delta;
    let ratio = d20 / d40;
    assert!((3.5..=4.5).contains(&ratio), "ratio {ratio}");
}

#[test]
fn compression_scale_law() {
    let grid: Vec<f64> = (0..=4000).map(|k| k as f64 * 0.05).collect();
    for z0 in [10.0, 50.0, 200.0, 1000.0] {
        let c = circuit(0.0, z0 / ZTL);
        let grid: Vec<f64> = grid.iter().map(|n| n * 50.0 / z0).collect();
        let r = compression_curve(&c, &grid, DEFAULT_COMPRESSION_RATIO).unwrap();
        assert!(
            (r.n_threshold_scaled - 1.0).abs() <= 0.05,
            "Z0 = {z0}: {}",
            r.n_threshold_scaled
        );
        let first_zero = r.g.iter().position(|g| *g <= 0.0).unwrap_or(r.g.len());
        assert!(r.s12_abs[..first_zero]
            .windows(2)
            .all(|w| w[1] <= w[0] + 1e-15));
    }
    let c = circuit(0.0, 1.0);
    let r = compression_curve(&c, &grid, DEFAULT_COMPRESSION_RATIO).unwrap();
    assert!(
        (r.n_threshold - 41.0).abs() <= 0.05 * 41.0,
        "{}",
        r.n_threshold
    );
    let direct = RESISTANCE_QUANTUM / (std::f64::consts::PI * 50.0);
    assert!(rel(r.n_max_estimate, direct) < 1e-12);
}

fn one_param(c: &GyratorCircuit, p: DisorderParam, frac: f64) -> GyratorCircuit {
    c.with_disorder(p.disorder(frac * p.scale(c)))
}

#[test]
fn disorder_residual_is_second_order() {
    for lc in [0.05, 5.0] {
        let c = circuit(lc, 10.0);
        for p in DisorderParam::ALL {
            let r1 = disorder_first_order(&one_param(&c, p, 2e-3), W0)
                .unwrap()
                .residual;
            let r2 = disorder_first_order(&one_param(&c, p, 1e-3), W0)
                .unwrap()
                .residual;
            let ratio = r1 / r2;
            assert!(
                (3.2..=4.8).contains(&ratio),
                "{} at lc' = {lc}: ratio {ratio}",
                p.name()
            );
        }
    }
}

#[test]
fn matched_point_formula_by_hand() {
    let c = circuit(0.0, 10.0);
    let d = Disorder {
        d_lc: 1e-3 * ZTL / W0,
        d_c0: 2e-3 * c.c0,
        d_l0: -1e-3 * c.l0,
        c12: 1.5e-3 * c.c0,
        l12: 5e-4 * c.l0,
    };
    let c = c.with_disorder(d);
    let i = C64::new(0.0, 1.0);
    let (g, l0) = (c.g, c.l0);
    let z_term = i * W0 * d.d_lc - (i * W0 * d.d_c0 - d.d_l0 / (i * l0 * l0 * W0)) / (g * g);
    let x_term = (i * W0 * d.c12 - d.l12 / (i * l0 * l0 * W0)) / (g * g);
    // dZ = −Z dY Z with Z = −iσy/G, and dS = −dZ/Z_TL at the matched point
    let want = -M2::new(z_term, x_term, x_term, -z_term) / C64::from(ZTL);
    let got = disorder_first_order(&c, W0).unwrap();
    assert!(max_diff(got.ds.iter(), want.iter()) < 1e-10 * max_abs(want.iter()).max(1e-300));
    assert!(max_diff(matched_point_ds(&c, W0).iter(), want.iter()) < 1e-10 * max_abs(want.iter()));
    assert!((got.ds[(0, 0)] + got.ds[(1, 1)]).norm() < 1e-12 * max_abs(want.iter()));
}

#[test]
fn zero_disorder_has_zero_deviation() {
    let r = disorder_first_order(&circuit(2.0, 10.0), 0.9 * W0).unwrap();
    assert_eq!(max_abs(r.ds.iter()), 0.0);
}

#[test]
fn tolerance_is_linear_and_reproduces_budget() {
    let c = circuit(0.5, 10.0);
    for p in DisorderParam::ALL {
        let t1 = disorder_tolerance(&c, p, 0.001, NormMetric::Max).unwrap();
        let t5 = disorder_tolerance(&c, p, 0.005, NormMetric::Max).unwrap();
        let t10 = disorder_tolerance(&c, p, 0.01, NormMetric::Max).unwrap();
        assert!(t1.magnitude < t10.magnitude);
        let ratio = t10.magnitude / t5.magnitude;
        assert!((1.9..=2.1).contains(&ratio), "{}: {ratio}", p.name());
        let s0 = scattering(&c, W0).unwrap();
        let s = scattering(&c.with_disorder(p.disorder(t10.magnitude)), W0).unwrap();
        assert!((max_abs((s - s0).iter()) - 0.01).abs() <= 1e-3);
    }
}

#[test]
fn capacitance_tolerance_grows_with_conductance() {
    let small = circuit(0.05, 10.0);
    let large = circuit(5.0, 10.0);
    assert!(small.g > large.g);
    let budget = 0.01;
    let ts = disorder_tolerance(&small, DisorderParam::DC0, budget, NormMetric::Max).unwrap();
    let tl = disorder_tolerance(&large, DisorderParam::DC0, budget, NormMetric::Max).unwrap();
    assert!(ts.magnitude > tl.magnitude);
    // first-order prediction: budget over the dS slope per unit dC0
    let predict = |c: &GyratorCircuit| {
        let h = 1e-6 * c.c0;
        let ds = disorder_first_order(&c.with_disorder(DisorderParam::DC0.disorder(h)), W0)
            .unwrap()
            .ds;
        budget * h / max_abs(ds.iter())
    };
    let measured = ts.magnitude / tl.magnitude;
    let predicted = predict(&small) / predict(&large);
    assert!(
        rel(measured, predicted) < 0.2,
        "measured {measured}, predicted {predicted}"
    );
}

#[test]
fn mixing_blocks_scale_with_drive_power() {
    let c = circuit(0.5, 10.0);
    let chi = chi(c.c0, W0);
    let a = [C64::new(1e-3, 0.0), C64::new(2e-4, 5e-4)];
    let r1 = mixing_matrices(&c, &MixingDrive::new(a, chi)).unwrap();
    let r2 = mixing_matrices(&c, &MixingDrive::new([a[0] * 2.0, a[1] * 2.0], chi)).unwrap();
    for (b1, b2) in r1.blocks.iter().zip(&r2.blocks) {
        assert!(
            max_diff((b1.m * C64::from(4.0)).iter(), b2.m.iter()) <= 1e-12 * max_abs(b2.m.iter())
        );
    }
    assert!(
        max_diff(
            (r1.static_block * C64::from(4.0)).iter(),
            r2.static_block.iter()
        ) <= 1e-12 * max_abs(r2.static_block.iter())
    );
    let zero = mixing_matrices(&c, &MixingDrive::new([C64::from(0.0); 2], chi)).unwrap();
    assert!(zero.blocks.iter().all(|b| max_abs(b.m.iter()) == 0.0));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn reflection_vanishes_at_central_frequency(lc in 2.0f64..30.0, z0 in 2.0f64..40.0) {
        let c = circuit(lc, z0);
        let wc = central_frequency(&c).unwrap();
        prop_assert!(s11(&c, wc) < 1e-8);
    }

    #[test]
    fn tolerance_scales_with_budget(lc in 0.05f64..5.0, budget in 0.001f64..0.01) {
        let c = circuit(lc, 10.0);
        let a = disorder_tolerance(&c, DisorderParam::C12, budget, NormMetric::Max).unwrap();
        let b = disorder_tolerance(&c, DisorderParam::C12, 2.0 * budget, NormMetric::Max).unwrap();
        prop_assert!(b.magnitude > a.magnitude);
    }
}
