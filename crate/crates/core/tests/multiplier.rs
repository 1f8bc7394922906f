use dampwave::mode_oracle::{fundamental_matrix, integrate_mode};
use dampwave::multiplier::{
    dphi1, dphi2, energy_symbol, energy_symbol_complex, energy_symbol_det, fundamental_det,
    fundamental_symbol, multipliers, multipliers_at_zero, phi1, phi2, psi, wronskian_defect,
    Multipliers,
};
use dampwave::specfun::rgamma;
use dampwave::{Freq, Mat2, ModelParams, MultiplierIndex};
use num_complex::Complex64;
use proptest::prelude::*;
use std::f64::consts::PI;

fn freq(r: f64) -> Freq {
    Freq::new(r).unwrap()
}

fn params(mu: f64, kappa: f64) -> ModelParams {
    ModelParams::new(mu, kappa).unwrap()
}

/// Ascending series for J by term ratios, compensated; small arguments only.
fn series_j(nu: f64, z: f64) -> f64 {
    let q = -0.25 * z * z;
    let mut term = (0.5 * z).powf(nu) * rgamma(nu + 1.0);
    let mut sum = term;
    let mut comp = 0.0f64;
    for k in 1..80 {
        let kf = k as f64;
        term *= q / (kf * (kf + nu));
        let t = sum + term;
        comp += if sum.abs() >= term.abs() {
            (sum - t) + term
        } else {
            (term - t) + sum
        };
        sum = t;
    }
    sum + comp
}

/// `Ψ` through the determinant of J_{±} values with the `csc(rho pi)` factor,
/// for non-integer `rho`. Returns the imaginary part and the size of the
/// largest product, for a cancellation-aware tolerance.
fn psi_csc(idx: MultiplierIndex, t: f64, r: f64) -> (f64, f64) {
    let (a, b) = (r, (1.0 + t) * r);
    let rho = idx.rho;
    let d = idx.delta;
    let sign = if d % 2 == 0 { 1.0 } else { -1.0 };
    let p1 = series_j(-rho, a) * series_j(rho + d as f64, b);
    let p2 = series_j(rho, a) * series_j(-rho - d as f64, b);
    let csc = 1.0 / (rho * PI).sin();
    let weight = 2.0 * r.powf(idx.k) * r.hypot(1.0).powf(idx.s + 1.0 - idx.k);
    (
        weight * csc * (p1 - sign * p2),
        weight * csc.abs() * (p1.abs() + p2.abs()),
    )
}

#[test]
fn vanishes_on_the_diagonal_at_time_zero() {
    for &rho in &[-0.5, -1.0, -2.25, -7.0] {
        for &r in &[1e-3, 0.7, 15.0, 400.0] {
            let v = psi(
                MultiplierIndex::new(1.0, 0.0, rho, 0).unwrap(),
                0.0,
                freq(r),
            )
            .unwrap();
            assert_eq!(v, Complex64::new(0.0, 0.0));
        }
    }
}

#[test]
fn csc_form_documented_example() {
    let idx = MultiplierIndex::new(1.0, 0.0, -0.75 - 1.0, 1).unwrap();
    let got = psi(idx, 2.0, freq(1.3)).unwrap();
    let (want, _) = psi_csc(idx, 2.0, 1.3);
    assert!(got.re == 0.0);
    assert!(
        (got.im - want).abs() <= 1e-10 * want.abs(),
        "{} vs {want}",
        got.im
    );
}

fn mu2_closed_form(t: f64, r: f64) -> Multipliers {
    let s = 1.0 + t;
    let (sn, cs) = (t * r).sin_cos();
    let phi1 = (cs + sn / r) / s;
    let phi2 = sn / (r * s);
    // derivatives of w / s with w the free solutions
    let dphi1 = (-r * sn + cs) / s - phi1 / s;
    let dphi2 = cs / s - phi2 / s;
    Multipliers {
        phi1,
        phi2,
        dphi1_over_r: dphi1 / r,
        dphi2,
    }
}

#[test]
fn mu_two_documented_example() {
    let p = params(2.0, 0.0);
    let f = freq(2.0);
    let want = mu2_closed_form(3.0, 2.0);
    let got = multipliers(&p, 3.0, f).unwrap();
    assert!((got.phi1 - want.phi1).abs() < 1e-12);
    assert!((got.phi2 - want.phi2).abs() < 1e-12);
    assert!((got.dphi2 - want.dphi2).abs() < 1e-12);
    assert!((got.dphi1_over_r - want.dphi1_over_r).abs() < 1e-12);
    assert!((phi1(&p, 3.0, f).unwrap().re - want.phi1).abs() < 1e-12);
    assert!((phi2(&p, 3.0, f).unwrap().re - want.phi2).abs() < 1e-12);
    assert!((dphi2(&p, 3.0, f).unwrap().re - want.dphi2).abs() < 1e-12);
    assert!((dphi1(&p, 3.0, f).unwrap().re - 2.0 * want.dphi1_over_r).abs() < 1e-12);
    // psi itself: -(i pi/4)(1+t)^rho Psi_{0,-1,rho,0} = sin(tr)/(r(1+t))
    let idx = MultiplierIndex::new(0.0, -1.0, -0.5, 0).unwrap();
    let v = psi(idx, 3.0, f).unwrap();
    let phi = -Complex64::new(0.0, PI / 4.0) * 4f64.powf(-0.5) * v;
    assert!((phi.re - want.phi2).abs() < 1e-12 && phi.im == 0.0);
}

#[test]
fn initial_conditions_on_grid() {
    let mut worst: f64 = 0.0;
    for i in 0..40 {
        let mu = 2.0 + 18.0 * i as f64 / 39.0;
        let p = params(mu, 0.0);
        for j in 0..25 {
            let r = 10f64.powf(-6.0 + 9.0 * j as f64 / 24.0);
            let f = freq(r);
            let m = multipliers(&p, 0.0, f).unwrap();
            worst = worst
                .max((m.phi1 - 1.0).abs())
                .max(m.phi2.abs())
                .max((r * m.dphi1_over_r).abs())
                .max((m.dphi2 - 1.0).abs());
            if r >= 1e-3 {
                let c = [
                    phi1(&p, 0.0, f).unwrap(),
                    phi2(&p, 0.0, f).unwrap(),
                    dphi1(&p, 0.0, f).unwrap(),
                    dphi2(&p, 0.0, f).unwrap(),
                ];
                for (z, want) in c.iter().zip([1.0, 0.0, 0.0, 1.0]) {
                    assert!(z.im.abs() < 1e-12 * (1.0 + z.re.abs()));
                    worst = worst.max((z.re - want).abs());
                }
            }
        }
    }
    assert!(worst <= 1e-10, "worst {worst:e}");
}

#[test]
fn matches_mode_oracle() {
    let p = params(3.0, 0.0);
    let got = multipliers(&p, 5.0, freq(1.0)).unwrap();
    let ode = integrate_mode(&p, 1.0, 1.0, 0.0, 5.0, 1e-10).unwrap();
    assert!((got.phi1 - ode.v).abs() <= 1e-6 * ode.v.abs());
    assert!((got.dphi1_over_r - ode.vdot).abs() <= 1e-6 * ode.vdot.abs());
    for &(mu, r, t) in &[
        (2.0, 0.3, 40.0),
        (4.7, 2.5, 12.0),
        (11.0, 0.05, 300.0),
        (6.0, 40.0, 3.0),
    ] {
        let p = params(mu, 0.0);
        let m = multipliers(&p, t, freq(r)).unwrap();
        let a = integrate_mode(&p, r, 1.0, 0.0, t, 1e-11).unwrap();
        let b = integrate_mode(&p, r, 0.0, 1.0, t, 1e-11).unwrap();
        let s1 = a.v.abs().max(a.vdot.abs());
        let s2 = b.v.abs().max(b.vdot.abs());
        assert!((m.phi1 - a.v).abs() <= 1e-8 * s1, "mu={mu} r={r} t={t}");
        assert!((r * m.dphi1_over_r - a.vdot).abs() <= 1e-8 * s1);
        assert!((m.phi2 - b.v).abs() <= 1e-8 * s2);
        assert!((m.dphi2 - b.vdot).abs() <= 1e-8 * s2);
    }
}

#[test]
fn derivatives_match_centered_differences() {
    let p = params(4.0, 0.0);
    let f = freq(0.5);
    let h = 1e-5;
    let at = |t: f64| multipliers(&p, t, f).unwrap();
    let (lo, mid, hi) = (at(10.0 - h), at(10.0), at(10.0 + h));
    let d1 = (hi.phi1 - lo.phi1) / (2.0 * h);
    let d2 = (hi.phi2 - lo.phi2) / (2.0 * h);
    assert!((d1 - 0.5 * mid.dphi1_over_r).abs() < 1e-6);
    assert!((d2 - mid.dphi2).abs() < 1e-6);
    let c1 = (phi1(&p, 10.0 + h, f).unwrap().re - phi1(&p, 10.0 - h, f).unwrap().re) / (2.0 * h);
    assert!((c1 - dphi1(&p, 10.0, f).unwrap().re).abs() < 1e-6);
    let c2 = (phi2(&p, 10.0 + h, f).unwrap().re - phi2(&p, 10.0 - h, f).unwrap().re) / (2.0 * h);
    assert!((c2 - dphi2(&p, 10.0, f).unwrap().re).abs() < 1e-6);
}

#[test]
fn energy_symbol_at_time_zero() {
    for &kappa in &[0.0, 0.25, 0.5, 3.0] {
        let e = energy_symbol(&params(3.0, kappa), 0.0, freq(1.0)).unwrap();
        let want = Mat2::diag(2f64.powf(-(1.0 + kappa) / 2.0), 2f64.powf(-kappa / 2.0));
        assert!(e.max_abs_diff(&want) < 1e-12, "{e:?}");
    }
}

#[test]
fn liouville_determinant_documented() {
    let (mu, kappa, t, r) = (3.0, 0.5, 7.0, 2.0);
    let e = energy_symbol(&params(mu, kappa), t, freq(r)).unwrap();
    let d = e.scale((1.0f64 + t).powf(mu / 2.0)).det();
    let want = freq(r).bracket().powf(1.0 + 2.0 * kappa);
    assert!((d / want - 1.0).abs() < 1e-9, "{d} vs {want}");
    assert!(wronskian_defect(&params(3.0, 0.0), 0.0, freq(1.0)).unwrap() < 1e-12);
    assert!(wronskian_defect(&params(4.0, 0.0), 100.0, freq(0.3)).unwrap() < 1e-9);
}

#[test]
fn determinant_where_expansion_cancels() {
    // at mu = 5, r = 0.02, t = 100 the two products in ad - bc are ~1e7 times the determinant
    let p = params(5.0, 0.0);
    for &(r, t) in &[(0.0149, 100.0), (0.0223, 100.0), (1e-3, 1e3)] {
        let m = fundamental_symbol(&p, t, freq(r)).unwrap();
        let s = (1.0f64 + t).powf(5.0);
        let det = fundamental_det(&p, t, freq(r)).unwrap();
        assert!((det * s - 1.0).abs() < 1e-12, "r={r} t={t}");
        let size = (m.e11 * m.e22).abs() + (m.e12 * m.e21).abs();
        assert!(size * s > 1e6);
        assert!((m.det() - det).abs() <= 1e-14 * size);
    }
    assert_eq!(
        fundamental_det(&p, 3.0, freq(0.0)).unwrap(),
        4f64.powf(-5.0)
    );
}

#[test]
fn energy_columns_match_oracle() {
    let p = params(2.5, 0.0);
    let (t, r) = (1.0, 0.8);
    let e = energy_symbol(&p, t, freq(r)).unwrap();
    let b = freq(r).bracket();
    // remove the [r] weight of the first column to get the energy-variable propagator
    let m = fundamental_matrix(&p, r, t, 1e-10).unwrap();
    assert!((e.e11 / b - m.e11).abs() < 1e-6);
    assert!((e.e21 / b - m.e21).abs() < 1e-6);
    assert!((e.e12 - m.e12).abs() < 1e-6);
    assert!((e.e22 - m.e22).abs() < 1e-6);
}

#[test]
fn bare_psi_determinant() {
    // det of the Ψ matrix without the (iπ/4)(1+t)^ρ prefactors
    for &(mu, t, r) in &[(3.0, 2.0, 1.0), (3.0, 40.0, 0.2), (5.5, 3.0, 7.0)] {
        let p = params(mu, 0.0);
        let c = Complex64::new(0.0, PI / 4.0 * (1.0f64 + t).powf(p.rho()));
        let [a, b, cc, d] = energy_symbol_complex(&p, t, freq(r))
            .unwrap()
            .map(|z| z / c);
        let det = a * d - b * cc;
        let want = -16.0 * freq(r).bracket() / (PI * PI * (1.0 + t));
        assert!(
            (det.re / want - 1.0).abs() < 1e-9 && det.im.abs() < 1e-12 * want.abs(),
            "{det} vs {want}"
        );
    }
}

#[test]
fn columns_solve_the_first_order_system() {
    let p = params(3.6, 0.0);
    let r = 1.7;
    let h = 1e-4;
    let sym = |t: f64| fundamental_symbol(&p, t, freq(r)).unwrap();
    for i in 0..=50 {
        let t = 2.0 * i as f64 + h;
        let d = (sym(t + h) - sym(t - h)).scale(0.5 / h);
        let a = Mat2::new(0.0, r, -r, -p.mu() / (1.0 + t));
        let c = sym(t);
        let defect = d - a * c;
        for j in 0..2 {
            let col = c.column(j);
            let norm = col[0].hypot(col[1]);
            let dc = defect.column(j);
            assert!(dc[0].hypot(dc[1]) <= 1e-5 * norm, "t={t} col={j}");
        }
    }
}

#[test]
fn zero_frequency_is_continuous_limit() {
    for &mu in &[2.0, 3.0, 4.4, 9.0, 20.0] {
        let p = params(mu, 0.0);
        for &t in &[0.0, 1.0, 1e3] {
            let z = multipliers(&p, t, freq(0.0)).unwrap();
            let exact = multipliers_at_zero(&p, t).unwrap();
            assert!((z.phi1 - exact.phi1).abs() < 1e-15);
            assert!((z.phi2 - exact.phi2).abs() < 1e-15);
            assert!(z.dphi1_over_r.abs() < 1e-300);
            assert!((z.dphi2 / exact.dphi2 - 1.0).abs() < 1e-14);
            let near = multipliers(&p, t, freq(1e-9)).unwrap();
            assert!((near.phi1 - z.phi1).abs() < 1e-9);
            assert!((near.phi2 - z.phi2).abs() < 1e-9 * (1.0 + z.phi2.abs()));
            assert!((near.dphi2 - z.dphi2).abs() < 1e-9 * z.dphi2.abs() + 1e-15);
        }
    }
}

#[test]
fn tiny_frequency_psi_reports_overflow() {
    let idx = MultiplierIndex::new(0.0, 0.0, -15.5, 1).unwrap();
    assert!(psi(idx, 1.0, freq(1e-300)).is_err());
    assert!(psi(idx, 1.0, freq(0.0)).is_err());
    assert!(psi(idx, -1.0, freq(1.0)).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn csc_and_cross_product_forms_agree(
        rho in -6.0f64..-0.5,
        delta in -1i32..=1,
        k in 0.0f64..3.0,
        s in -1.0f64..1.0,
        t in 0.0f64..3.0,
        r in 0.05f64..2.0,
    ) {
        let frac = rho - rho.round();
        prop_assume!(frac.abs() >= 0.01);
        let idx = MultiplierIndex::new(k, s, rho, delta).unwrap();
        let got = psi(idx, t, freq(r)).unwrap();
        let (want, scale) = psi_csc(idx, t, r);
        prop_assert!(got.re == 0.0);
        prop_assert!((got.im - want).abs() <= 1e-10 * want.abs().max(1e-6 * scale),
            "got {} want {} scale {}", got.im, want, scale);
    }

    #[test]
    fn mu_two_closed_forms(t in 0.0f64..200.0, r in 0.01f64..50.0) {
        let got = multipliers(&params(2.0, 0.0), t, freq(r)).unwrap();
        let want = mu2_closed_form(t, r);
        let tol = 1e-10 * (1.0 + 1.0 / r);
        prop_assert!((got.phi1 - want.phi1).abs() <= tol);
        prop_assert!((got.phi2 - want.phi2).abs() <= tol);
        prop_assert!((got.dphi2 - want.dphi2).abs() <= tol);
        prop_assert!((r * (got.dphi1_over_r - want.dphi1_over_r)).abs() <= tol);
    }

    #[test]
    fn determinant_identity(
        mu in 2.0f64..12.0,
        kappa in 0.0f64..3.0,
        t in 0.0f64..1e4,
        log_r in -4.0f64..3.0,
    ) {
        let r = 10f64.powf(log_r);
        let p = params(mu, kappa);
        let f = freq(r);
        let scale = (1.0f64 + t).powf(mu);
        let want = f.bracket().powf(1.0 + 2.0 * kappa);
        let d = energy_symbol_det(&p, t, f).unwrap() * scale;
        prop_assert!((d / want - 1.0).abs() <= 1e-9, "d/want - 1 = {:e}", d / want - 1.0);
        prop_assert!(wronskian_defect(&p, t, f).unwrap() <= 1e-9);
        // the entries agree with it up to the cancellation in expanding them
        let e = energy_symbol(&p, t, f).unwrap();
        let size = (e.e11 * e.e22).abs() + (e.e12 * e.e21).abs();
        prop_assert!((e.det() - d / scale).abs() <= 1e-13 * size.max(want / scale));
    }

    #[test]
    fn complex_route_is_real_and_agrees(
        mu in 2.0f64..10.0,
        kappa in 0.0f64..2.0,
        t in 0.0f64..500.0,
        r in 0.01f64..100.0,
    ) {
        let p = params(mu, kappa);
        let e = energy_symbol(&p, t, freq(r)).unwrap();
        let z = energy_symbol_complex(&p, t, freq(r)).unwrap();
        let scale = e.spectral_norm();
        for (zc, x) in z.iter().zip(e.entries()) {
            prop_assert!(zc.im.abs() <= 1e-12 * zc.re.abs().max(scale));
            prop_assert!((zc.re - x).abs() <= 1e-9 * scale, "{} vs {}", zc.re, x);
        }
    }
}
