use std::f64::consts::PI;

use nonrad::current::{BuiltinSource, StaticCurrentLoop, StaticGaussianCharge};
use nonrad::exchange::{action_spectral_cross, static_energy, PvSpec, StaticsSpec};
use nonrad::spectral::WindowedStatic;
use nonrad::PhysicalConstants;

fn charge(q: f64, z: f64, sigma: f64) -> BuiltinSource {
    BuiltinSource::StaticGaussianCharge(StaticGaussianCharge { charge: q, center: [0.0, 0.0, z], sigma })
}

#[test]
fn windowed_static_pair_action_matches_energy() {
    let consts = PhysicalConstants::NATURAL;
    for a in [1.0, 2.0] {
        let tau = 10.0 * a;
        let sa = WindowedStatic::new(vec![charge(1.0, 0.0, 0.1)], tau, consts).unwrap();
        let sb = WindowedStatic::new(vec![charge(1.0, a, 0.1)], tau, consts).unwrap();
        let pv = PvSpec { n_theta: 128, n_phi: 1, ..PvSpec::default() };
        let w = action_spectral_cross(&sa, &sb, &pv).unwrap();
        let u = static_energy(&[charge(1.0, 0.0, 0.1), charge(1.0, a, 0.1)], &StaticsSpec::default(), false, &consts).unwrap();
        let ratio = w.w / sa.effective_duration();
        eprintln!("a={a} W/T={ratio} U={} spread={} windowed={:?}", u.static_energy_total, w.spread, w.windowed);
        assert!(w.w < 0.0);
        assert!((ratio + u.static_energy_total).abs() < 0.02 * u.static_energy_total);
    }
}

fn agm_mutual_inductance(b1: f64, b2: f64, s: f64) -> f64 {
    // complete elliptic integrals by the arithmetic-geometric mean
    let k2 = 4.0 * b1 * b2 / ((b1 + b2).powi(2) + s * s);
    let k = k2.sqrt();
    let (mut a, mut g) = (1.0f64, (1.0 - k2).sqrt());
    let mut sum = 0.5 * k2;
    let mut pow = 0.5;
    for _ in 0..40 {
        let an = 0.5 * (a + g);
        let gn = (a * g).sqrt();
        let cn = 0.5 * (a - g);
        pow *= 2.0;
        sum += pow * cn * cn;
        a = an;
        g = gn;
    }
    let kk = PI / (2.0 * a);
    let ee = kk * (1.0 - sum);
    4.0 * PI * (b1 * b2).sqrt() * ((2.0 / k - k) * kk - 2.0 / k * ee)
}

fn coaxial(current: f64, z: f64) -> BuiltinSource {
    BuiltinSource::StaticCurrentLoop(StaticCurrentLoop { current, radius: 1.0, center: [0.0, 0.0, z], axis: [0.0, 0.0, 1.0], sigma: 0.02 })
}

#[test]
fn coaxial_loops_match_elliptic_mutual_inductance() {
    let consts = PhysicalConstants::new(2.0, 1.0).unwrap();
    for s in [0.3, 1.0] {
        let r = static_energy(&[coaxial(1.0, 0.0), coaxial(1.0, s)], &StaticsSpec::default(), false, &consts).unwrap();
        let m = agm_mutual_inductance(1.0, 1.0, s);
        let oracle = -m / (consts.c * consts.c);
        eprintln!("s={s} ampere={} oracle={oracle}", r.ampere_part);
        assert!((r.ampere_part - oracle).abs() < 5e-3 * oracle.abs());
        let flipped = static_energy(&[coaxial(-1.0, 0.0), coaxial(1.0, s)], &StaticsSpec::default(), false, &consts).unwrap();
        assert_eq!(flipped.ampere_part, -r.ampere_part);
    }
}
