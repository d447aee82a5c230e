use std::f64::consts::PI;

use nonrad::current::{total_charge, BuiltinSource, FourCurrent, GaussianDipolePulse, OrbitingGaussianCharge, OrbitingShell, StaticCurrentLoop, StaticGaussianCharge};
use nonrad::exchange::{static_energy, StaticsSpec};
use nonrad::quadrature::QuadratureSpec;
use nonrad::radiation::{mean_photon_number_pulsed, photon_rate_periodic};
use nonrad::spectral::{PeriodicSpectrum, WaveTrain};
use nonrad::PhysicalConstants;

fn orbit(charge: f64, axis: [f64; 3]) -> FourCurrent {
    FourCurrent::Builtin(BuiltinSource::OrbitingGaussianCharge(OrbitingGaussianCharge {
        charge,
        orbit_radius: 0.1,
        omega0: 1.0,
        sigma: None,
        center: [0.0; 3],
        axis,
        phase: 0.0,
    }))
}

fn rate(src: &FourCurrent, n_max: u32) -> nonrad::radiation::EmissionResult {
    let spec = PeriodicSpectrum::new(src, PhysicalConstants::NATURAL).unwrap();
    photon_rate_periodic(&spec, n_max, &QuadratureSpec::default().with_angular(16, 32)).unwrap()
}

#[test]
fn orbit_rate_is_rotation_invariant() {
    let base = rate(&orbit(1.0, [0.0, 0.0, 1.0]), 8);
    for axis in [[1.0, 0.0, 0.0], [1.0, 1.0, 0.3], [-0.2, 0.7, -1.0]] {
        let r = rate(&orbit(1.0, axis), 8);
        let rel = (r.n_bar - base.n_bar).abs() / base.n_bar;
        assert!(rel < 1e-8, "axis {axis:?}: rel {rel:e}");
    }
}

#[test]
fn photon_number_scales_quadratically() {
    let base = rate(&orbit(1.0, [0.0, 0.0, 1.0]), 8).n_bar;
    for lambda in [0.1, 3.0, -2.0] {
        let n = rate(&orbit(lambda, [0.0, 0.0, 1.0]), 8).n_bar;
        assert!((n - lambda * lambda * base).abs() < 1e-12 * n, "lambda {lambda}");
    }
    let dipole = |amp: f64| {
        let src = FourCurrent::Builtin(BuiltinSource::GaussianDipolePulse(GaussianDipolePulse {
            dipole_amplitude: amp,
            carrier_omega: 1.0,
            envelope_width: 4.0,
            orientation: [0.0, 0.0, 1.0],
            sigma: 0.1,
            center: [0.0; 3],
            t0: 0.0,
        }));
        let spec = nonrad::spectral::PulsedSpectrum::new(&src, PhysicalConstants::NATURAL).unwrap();
        mean_photon_number_pulsed(&spec, &QuadratureSpec::default().with_angular(8, 16)).unwrap().n_bar
    };
    let (a, b) = (dipole(1.0), dipole(2.5));
    assert!((b - 6.25 * a).abs() < 1e-12 * b);
}

#[test]
fn angular_sectors_add_up() {
    let r = rate(&orbit(1.0, [0.0, 0.0, 1.0]), 8);
    let sector = |f: &dyn Fn(&[f64; 3]) -> bool| -> f64 {
        r.angular.iter().filter(|b| f(&b.direction)).map(|b| b.density * b.weight).sum()
    };
    let upper = sector(&|d| d[2] > 0.0);
    let lower = sector(&|d| d[2] <= 0.0);
    assert!((upper + lower - r.n_bar).abs() < 1e-12 * r.n_bar);
    // the orbit plane is a mirror plane
    assert!((upper - lower).abs() < 1e-10 * r.n_bar);
    let quads: f64 = (0..4)
        .map(|q| {
            sector(&|d| {
                let phi = d[1].atan2(d[0]).rem_euclid(2.0 * PI);
                (phi / (0.5 * PI)) as usize == q
            })
        })
        .sum();
    assert!((quads - r.n_bar).abs() < 1e-12 * r.n_bar);
}

fn shell(d_over_ct: f64) -> f64 {
    let period = 2.0 * PI;
    let src = FourCurrent::Builtin(BuiltinSource::OrbitingShell(OrbitingShell {
        charge: 1.0,
        diameter: d_over_ct * period,
        orbit_radius: 0.05,
        period,
        sigma: None,
        center: [0.0; 3],
        axis: [0.0, 0.0, 1.0],
        phase: 0.0,
    }));
    let spec = PeriodicSpectrum::new(&src, PhysicalConstants::NATURAL).unwrap();
    let quad = QuadratureSpec { skip_angular_check: true, ..QuadratureSpec::default().with_angular(8, 16) };
    photon_rate_periodic(&spec, 4, &quad).unwrap().n_bar
}

#[test]
fn shell_sweep_is_continuous_with_zeros_at_whole_wavelengths() {
    let ds: Vec<f64> = (0..=23).map(|i| 0.9 + 0.1 * i as f64).collect();
    let n: Vec<f64> = ds.iter().map(|&d| shell(d)).collect();
    let peak = n.iter().cloned().fold(0.0, f64::max);
    for w in n.windows(2) {
        assert!((w[1] - w[0]).abs() < 0.35 * peak, "{n:?}");
    }
    let minima: Vec<f64> = (1..n.len() - 1).filter(|&i| n[i] < n[i - 1] && n[i] < n[i + 1]).map(|i| ds[i]).collect();
    assert_eq!(minima.len(), 3, "{minima:?}");
    for (m, want) in minima.iter().zip([1.0, 2.0, 3.0]) {
        assert!((m - want).abs() < 1e-9, "{minima:?}");
    }
}

#[test]
fn wave_train_slope_matches_periodic_rate() {
    let src = orbit(1.0, [0.0, 0.0, 1.0]);
    let spec = PeriodicSpectrum::new(&src, PhysicalConstants::NATURAL).unwrap();
    let quad = QuadratureSpec::default().with_angular(8, 16);
    let per_period = photon_rate_periodic(&spec, 8, &quad).unwrap().n_bar;
    let train = |m: f64| {
        let w = WaveTrain { periodic: &spec, periods: m, edge: 2.0 * PI, n_max: 3, k_max: 3.6 };
        mean_photon_number_pulsed(&w, &QuadratureSpec { tol: 1e-7, skip_angular_check: true, ..quad.clone() }).unwrap().n_bar
    };
    let n: Vec<f64> = [8.0, 16.0, 32.0].iter().map(|&m| train(m)).collect();
    for (slope, m) in [((n[1] - n[0]) / 8.0, 8), ((n[2] - n[1]) / 16.0, 16)] {
        let rel = (slope - per_period).abs() / per_period;
        assert!(rel < 5e-3, "slope from M={m}: {slope} vs {per_period} (rel {rel:e})");
    }
}

#[test]
fn total_charge_is_constant_in_time() {
    let sources = [
        orbit(1.3, [0.0, 1.0, 1.0]),
        FourCurrent::Builtin(BuiltinSource::OrbitingShell(OrbitingShell {
            charge: -0.7,
            diameter: 1.5,
            orbit_radius: 0.3,
            period: 2.0 * PI,
            sigma: None,
            center: [0.1, 0.0, 0.0],
            axis: [0.0, 0.0, 1.0],
            phase: 0.2,
        })),
        FourCurrent::Builtin(BuiltinSource::GaussianDipolePulse(GaussianDipolePulse {
            dipole_amplitude: 1.0,
            carrier_omega: 1.0,
            envelope_width: 3.0,
            orientation: [1.0, 0.0, 0.0],
            sigma: 0.2,
            center: [0.0; 3],
            t0: 0.0,
        })),
        FourCurrent::Builtin(BuiltinSource::StaticGaussianCharge(StaticGaussianCharge { charge: 2.0, center: [0.0; 3], sigma: 0.3 })),
    ];
    for s in &sources {
        let q0 = total_charge(s, 0.0);
        for t in [0.7, 2.1, 5.0] {
            let q = total_charge(s, t);
            assert!((q - q0).abs() < 1e-8 * q0.abs().max(1.0), "{q} vs {q0}");
        }
    }
}

fn gauss(q: f64, c: [f64; 3], sigma: f64) -> BuiltinSource {
    BuiltinSource::StaticGaussianCharge(StaticGaussianCharge { charge: q, center: c, sigma })
}

fn ring(current: f64, c: [f64; 3], axis: [f64; 3]) -> BuiltinSource {
    BuiltinSource::StaticCurrentLoop(StaticCurrentLoop { current, radius: 1.0, center: c, axis, sigma: 0.03 })
}

#[test]
fn static_energy_is_translation_invariant() {
    let consts = PhysicalConstants::NATURAL;
    let spec = StaticsSpec::default();
    let shift = [0.37, -1.2, 0.81];
    let mv = |c: [f64; 3]| [c[0] + shift[0], c[1] + shift[1], c[2] + shift[2]];
    let pairs = [
        ([0.0, 0.0, 0.0], [0.4, 1.1, 2.6]),
        ([0.2, 0.0, 0.0], [0.0, 0.5, -3.0]),
    ];
    for (a, b) in pairs {
        let u = static_energy(&[gauss(1.0, a, 0.2), gauss(-0.5, b, 0.3)], &spec, false, &consts).unwrap();
        let v = static_energy(&[gauss(1.0, mv(a), 0.2), gauss(-0.5, mv(b), 0.3)], &spec, false, &consts).unwrap();
        assert!((u.static_energy_total - v.static_energy_total).abs() < 1e-10 * u.static_energy_total.abs());
        let u = static_energy(&[ring(1.0, a, [0.0, 0.0, 1.0]), ring(2.0, b, [0.3, 0.0, 1.0])], &spec, false, &consts).unwrap();
        let v = static_energy(&[ring(1.0, mv(a), [0.0, 0.0, 1.0]), ring(2.0, mv(b), [0.3, 0.0, 1.0])], &spec, false, &consts).unwrap();
        assert!((u.static_energy_total - v.static_energy_total).abs() < 1e-10 * u.static_energy_total.abs());
    }
}

#[test]
fn coulomb_limit_is_approached_monotonically() {
    let consts = PhysicalConstants::NATURAL;
    let sigma = 0.5;
    let mut last = f64::INFINITY;
    for a in [1.0, 2.0, 3.0] {
        let u = static_energy(&[gauss(1.0, [0.0; 3], sigma), gauss(2.0, [0.0, 0.0, a], sigma)], &StaticsSpec::default(), false, &consts).unwrap();
        let err = (u.coulomb_part * a - 2.0).abs();
        // combined width sigma*sqrt(2): deficit is 2 erfc(a / 2 sigma)
        let want = 2.0 * libm::erfc(a / (2.0 * sigma));
        assert!((err - want).abs() < 1e-8 * want.max(1e-3), "a={a}: {err:e} vs {want:e}");
        assert!(err < last);
        last = err;
    }
}

#[test]
fn parallel_currents_attract() {
    let consts = PhysicalConstants::NATURAL;
    let spec = StaticsSpec::default();
    let z = [0.0, 0.0, 1.0];
    let par = static_energy(&[ring(1.0, [0.0; 3], z), ring(1.0, [0.0, 0.0, 0.6], z)], &spec, false, &consts).unwrap();
    let anti = static_energy(&[ring(1.0, [0.0; 3], z), ring(-1.0, [0.0, 0.0, 0.6], z)], &spec, false, &consts).unwrap();
    assert!(par.ampere_part < 0.0);
    assert_eq!(anti.ampere_part, -par.ampere_part);
    assert_eq!(par.coulomb_part, 0.0);
}
