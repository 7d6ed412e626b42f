use bellforge::bellpoly::BellPolynomial;
use bellforge::catalog;
use bellforge::lhvlab;
use bellforge::qviolation::{
    self, direction_from_angles, ghz, DensityMatrix, MeasurementConfig, PureState, SeesawOptions,
    C64,
};
use nalgebra::DMatrix;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn bell_entries() -> Vec<(String, BellPolynomial)> {
    catalog::entries()
        .unwrap()
        .iter()
        .filter_map(|e| {
            e.polynomial
                .as_bell()
                .map(|b| (e.name.to_string(), b.clone()))
        })
        .filter(|(_, b)| b.scenario().parties() <= 6)
        .collect()
}

/// Bloch vector of a random single-qubit pure state, and its amplitudes.
fn random_qubit(rng: &mut impl Rng) -> ([f64; 3], [C64; 2]) {
    let theta = (1.0 - 2.0 * rng.random::<f64>()).acos();
    let phi = rng.random::<f64>() * std::f64::consts::TAU;
    let amps = [
        C64::new((theta / 2.0).cos(), 0.0),
        C64::from_polar((theta / 2.0).sin(), phi),
    ];
    (direction_from_angles(theta, phi), amps)
}

/// Local-hidden-variable style prediction: each party's observable averages
/// to `r·n` independently.
fn product_value(p: &BellPolynomial, blochs: &[[f64; 3]], c: &MeasurementConfig) -> f64 {
    p.terms()
        .map(|(m, coef)| {
            let mut v = coef.to_f64();
            for (j, r) in blochs.iter().enumerate() {
                for k in m.settings_of(j) {
                    let n = c.direction(j, k);
                    v *= r[0] * n[0] + r[1] * n[1] + r[2] * n[2];
                }
            }
            v
        })
        .sum()
}

fn product_state(qubits: &[[C64; 2]]) -> PureState {
    let mut amps = vec![C64::new(1.0, 0.0)];
    for q in qubits {
        amps = amps.iter().flat_map(|a| [a * q[0], a * q[1]]).collect();
    }
    PureState::normalized(amps).unwrap()
}

#[test]
fn separable_states_respect_the_classical_bound() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for (name, p) in bell_entries() {
        let s = p.scenario();
        let n = s.parties();
        let lhv = lhvlab::lhv_bound(&p).unwrap().1.to_f64();
        for _ in 0..100 {
            let c = MeasurementConfig::random(s, &mut rng);
            let parts = rng.random_range(1..4);
            let weights: Vec<f64> = (0..parts).map(|_| rng.random::<f64>() + 0.1).collect();
            let total: f64 = weights.iter().sum();
            let dim = 1 << n;
            let mut rho = DMatrix::<C64>::zeros(dim, dim);
            let mut oracle = 0.0;
            for w in &weights {
                let (blochs, amps): (Vec<_>, Vec<_>) =
                    (0..n).map(|_| random_qubit(&mut rng)).unzip();
                let psi = product_state(&amps);
                let pure = qviolation::expectation(&p, &psi, &c).unwrap();
                let independent = product_value(&p, &blochs, &c);
                assert!((pure - independent).abs() < 1e-9, "{name}");
                rho += psi.projector() * C64::new(w / total, 0.0);
                oracle += w / total * independent;
            }
            let rho = DensityMatrix::new(rho).unwrap();
            let e = qviolation::expectation(&p, &rho, &c).unwrap();
            assert!((e - oracle).abs() < 1e-9, "{name}");
            assert!(e <= lhv + 1e-9, "{name}: {e} > {lhv}");
        }
    }
}

#[test]
fn noise_is_invisible_to_non_identity_terms() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for (name, p) in bell_entries() {
        for _ in 0..10 {
            let c = MeasurementConfig::random(p.scenario(), &mut rng);
            assert!(
                qviolation::noise_residual(&p, &c).unwrap() <= qviolation::NOISE_TOL,
                "{name}"
            );
        }
    }
}

#[test]
fn gradient_matches_central_differences() {
    let mut rng = ChaCha8Rng::seed_from_u64(19);
    let p = catalog::lookup("i33", None)
        .unwrap()
        .polynomial
        .as_bell()
        .unwrap()
        .clone();
    let s = p.scenario();
    let h = 1e-5;
    for _ in 0..10 {
        let psi = PureState::haar_random(s.parties(), &mut rng).unwrap();
        let c = MeasurementConfig::random(s, &mut rng);
        let angles = c.angles();
        let j = rng.random_range(0..s.parties());
        let k = rng.random_range(1..=s.settings());
        let (theta, phi) = angles[j][k - 1];
        let v = qviolation::partial_expectation_vector(&p, &psi, &c, j, k).unwrap();
        let dn_dtheta = [
            theta.cos() * phi.cos(),
            theta.cos() * phi.sin(),
            -theta.sin(),
        ];
        let dn_dphi = [-theta.sin() * phi.sin(), theta.sin() * phi.cos(), 0.0];
        let dot = |a: [f64; 3]| a[0] * v[0] + a[1] * v[1] + a[2] * v[2];
        let at = |dt: f64, dp: f64| {
            let mut a = angles.clone();
            a[j][k - 1] = (theta + dt, phi + dp);
            let c = MeasurementConfig::from_angles(s, &a).unwrap();
            qviolation::expectation(&p, &psi, &c).unwrap()
        };
        let fd_theta = (at(h, 0.0) - at(-h, 0.0)) / (2.0 * h);
        let fd_phi = (at(0.0, h) - at(0.0, -h)) / (2.0 * h);
        assert!(
            (fd_theta - dot(dn_dtheta)).abs() < 1e-6,
            "{fd_theta} vs {}",
            dot(dn_dtheta)
        );
        assert!(
            (fd_phi - dot(dn_dphi)).abs() < 1e-6,
            "{fd_phi} vs {}",
            dot(dn_dphi)
        );
    }
}

#[test]
fn converged_settings_are_stationary() {
    let opts = SeesawOptions {
        restarts: 8,
        ..SeesawOptions::default()
    };
    for name in ["chsh", "mabk3", "i33"] {
        let p = catalog::lookup(name, None)
            .unwrap()
            .polynomial
            .as_bell()
            .unwrap()
            .clone();
        let psi = ghz(p.scenario().parties(), 0.6).unwrap();
        let r = qviolation::seesaw_settings(&p, &psi, &opts, &[]).unwrap();
        assert!(r.converged, "{name}");
        let res = qviolation::stationarity_residual(&p, &psi, &r.config).unwrap();
        assert!(res <= 1e-8, "{name}: {res}");
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]

    #[test]
    fn sweeps_never_decrease_the_objective(seed in any::<u64>(), which in 0usize..4) {
        let names = ["chsh", "mabk3", "i33", "i42"];
        let p = catalog::lookup(names[which], None).unwrap().polynomial.as_bell().unwrap().clone();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let psi = PureState::haar_random(p.scenario().parties(), &mut rng).unwrap();
        let mut c = MeasurementConfig::random(p.scenario(), &mut rng);
        let mut last = qviolation::expectation(&p, &psi, &c).unwrap();
        for _ in 0..5 {
            for v in qviolation::seesaw_sweep(&p, &psi, &mut c).unwrap() {
                prop_assert!(v >= last - 1e-12, "{} after {}", v, last);
                last = v;
            }
        }
        let e = qviolation::expectation(&p, &psi, &c).unwrap();
        prop_assert!((e - last).abs() < 1e-10);
    }
}
