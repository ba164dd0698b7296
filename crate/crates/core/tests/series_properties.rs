//! Stability and physical trends of the closed-form intensity.

use std::f64::consts::FRAC_PI_3;

use hgpol_core::beam::series_s;
use hgpol_core::{
    intensity, BeamParams, CoherenceSpec, Observation, PathKind, PathSpec, TurbulenceProfile,
};
use num_complex::Complex;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs()
}

fn imaginary_b(t: f64, a: f64) -> Complex<f64> {
    Complex::new(0.0, t * a.sqrt())
}

/// Order-12 values from a 60-digit direct summation of the double series.
#[test]
#[allow(clippy::excessive_precision)]
fn order_twelve_matches_extended_precision() {
    let frozen = [
        (5562.5, 1125.0, 0.0, 790421659429.15545),
        (5562.5, 1125.0, 0.5, 828629737718.03386),
        (5562.5, 1125.0, 1.0, 864790033761.14562),
        (5562.5, 1125.0, 2.0, 439222484693.09945),
        (5562.5, 1125.0, 5.0, 627540.76408900919),
        (5562.5, 1125.0, 10.0, 4.6573616279422153e-23),
        (2.0e4, 300.0, 0.0, 1795895153664.1028),
        (2.0e4, 300.0, 1.0, 780288816598.80224),
        (2.0e4, 300.0, 3.0, 717666270.8163298),
        (2.0e4, 300.0, 10.0, 2.5372902344491345e-29),
    ];
    for (a, d, t, want) in frozen {
        let got = series_s(12, a, imaginary_b(t, a), d).unwrap();
        assert!(rel(got, want) < 1e-9, "a={a} t={t}: {got} vs {want}");
    }
}

#[test]
fn order_twelve_is_smooth_in_b() {
    let (a, d) = (5562.5, 1125.0);
    let h = 0.01;
    let logs: Vec<f64> = (0..=1000)
        .map(|j| {
            let s = series_s(12, a, imaginary_b(j as f64 * h, a), d).unwrap();
            assert!(s.is_finite() && s > 0.0, "t={}: {s}", j as f64 * h);
            s.ln()
        })
        .collect();
    for w in logs.windows(3) {
        let curvature = (w[2] - 2.0 * w[1] + w[0]).abs();
        assert!(curvature < 10.0 * h, "curvature {curvature}");
    }
}

#[test]
fn imaginary_residue_random_grid() {
    let mut rng = StdRng::seed_from_u64(0x5eed);
    for _ in 0..100 {
        let order = rng.gen_range(0..=20);
        let a: f64 = 10f64.powf(rng.gen_range(1.0..5.0));
        let d: f64 = a * rng.gen_range(0.05..2.0);
        let t: f64 = rng.gen_range(0.0..6.0);
        let s = series_s(order, a, imaginary_b(t, a), d);
        assert!(
            s.as_ref().is_ok_and(|v| v.is_finite()),
            "m={order} a={a} d={d} t={t}: {s:?}"
        );
    }
}

fn horizontal(z: f64, cn2: f64) -> PathSpec {
    PathSpec::new(
        PathKind::Horizontal,
        FRAC_PI_3,
        z,
        TurbulenceProfile::default().with_cn2_ground(cn2),
    )
    .unwrap()
}

#[test]
fn long_distance_profile_loses_its_dip() {
    let beam = BeamParams::new(800e-9, 0.03, 4, 4).unwrap();
    let spec = CoherenceSpec::new(0.01).unwrap();
    let z = 5e4;
    let path = horizontal(z, 1e-14);
    let profile: Vec<f64> = (0..400)
        .map(|i| {
            let r = i as f64 * 0.025;
            intensity(&beam, &spec, &path, &Observation::new(r, r, z)).unwrap()
        })
        .collect();
    let max = profile.iter().cloned().fold(0.0, f64::max);
    assert!(profile[399] < 1e-3 * max, "grid too short");
    assert!(1.0 - profile[0] / max < 0.02);

    let near = horizontal(1e3, 1e-14);
    let i0 = intensity(&beam, &spec, &near, &Observation::on_axis(1e3)).unwrap();
    let i1 = intensity(&beam, &spec, &near, &Observation::new(0.03, 0.03, 1e3)).unwrap();
    assert!(i1 > i0);
}

/// Second moment of the x profile at `rho_y = 0`, by trapezoid.
fn rms_width(
    beam: &BeamParams,
    spec: &CoherenceSpec,
    path: &PathSpec,
    z: f64,
    half_width: f64,
) -> f64 {
    let n = 4000;
    let h = 2.0 * half_width / n as f64;
    let (mut m0, mut m2) = (0.0, 0.0);
    for i in 0..=n {
        let x = -half_width + i as f64 * h;
        let w = if i == 0 || i == n { 0.5 } else { 1.0 };
        let v = intensity(beam, spec, path, &Observation::new(x, 0.0, z)).unwrap();
        m0 += w * v;
        m2 += w * v * x * x;
    }
    (m2 / m0).sqrt()
}

#[test]
fn beam_width_grows_with_turbulence_strength() {
    let beam = BeamParams::new(800e-9, 0.03, 2, 2).unwrap();
    let spec = CoherenceSpec::new(0.01).unwrap();
    let z = 1e4;
    let widths: Vec<f64> = [0.0, 1e-15, 1e-14, 1e-13]
        .iter()
        .map(|&c| rms_width(&beam, &spec, &horizontal(z, c), z, 6.0))
        .collect();
    for w in widths.windows(2) {
        assert!(w[1] >= w[0], "{widths:?}");
    }
    assert!(widths[3] > 1.1 * widths[0]);
}
