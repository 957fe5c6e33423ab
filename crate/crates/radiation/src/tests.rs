use super::*;
use materials::Dispersion;

fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

fn constant_material(eps: C64) -> MaterialSpec {
    MaterialSpec::isotropic("test-constant", Dispersion::Constant { eps })
}

/// Spectral prefactor `-(hbar omega / pi^2) n_B(T)` relating the kernel sums
/// to the emitted density at `T_env = 0`.
fn pref(omega_ev: f64, t: f64) -> f64 {
    -HBAR_SI * (omega_ev / HBAR_EVS) / std::f64::consts::PI.powi(2)
        * bose_occupation(omega_ev, t)
}

#[test]
fn frozen_mode_sum_references() {
    // Independently computed kernel integrals sum_n int dkz Xi_P for three
    // material/geometry points (quadrature-converged to ~1e-9).
    let opts = RadiationOptions {
        allow_extrapolation: true,
        ..Default::default()
    };
    let cases: [(&str, f64, f64, f64, f64); 3] = [
        ("sic", 1e-6, 0.05, -2.21655482980072165e1, -7.30867297364698402e2),
        ("gold-drude", 1e-6, 0.10, -1.77591630901278018e3, -4.74475995541492648e3),
        ("graphite-uniaxial", 2e-6, 0.05, -1.89699158858987685e4, -2.26698703381604209e4),
    ];
    for (name, radius, e, sm_ref, sn_ref) in cases {
        let mat = materials::by_name(name).unwrap();
        let s = mode_sum(&mat, radius, e, 300.0, 0.0, &opts).unwrap();
        let p = pref(e, 300.0);
        let (sm, sn) = (s.h_m / p, s.h_n / p);
        assert!(
            (sm / sm_ref - 1.0).abs() < 1e-6,
            "{name}: SM = {sm}, want {sm_ref}"
        );
        assert!(
            (sn / sn_ref - 1.0).abs() < 1e-6,
            "{name}: SN = {sn}, want {sn_ref}"
        );
        // Both kernel integrals are nonpositive for passive cylinders, so the
        // emitted densities are nonnegative.
        assert!(s.h_m >= 0.0 && s.h_n >= 0.0);
        // T-form and S-form evaluations of the same sum must coincide.
        assert!(
            s.dual_residual < 1e-10,
            "{name}: dual residual {}",
            s.dual_residual
        );
    }
}

#[test]
fn lossless_materials_do_not_radiate() {
    let opts = RadiationOptions::default();
    for eps in [c(1.0, 0.0), c(4.0, 0.0), c(-2.5, 0.0)] {
        let s = mode_sum(&constant_material(eps), 1e-6, 0.3, 300.0, 0.0, &opts).unwrap();
        assert_eq!(s.h_n, 0.0);
        assert_eq!(s.h_m, 0.0);
    }
}

#[test]
fn temperature_swap_negates_exactly() {
    let sic = materials::by_name("sic").unwrap();
    let opts = RadiationOptions::default();
    let fwd = mode_sum(&sic, 1e-6, 0.05, 300.0, 100.0, &opts).unwrap();
    let rev = mode_sum(&sic, 1e-6, 0.05, 100.0, 300.0, &opts).unwrap();
    assert_eq!(fwd.h_n, -rev.h_n);
    assert_eq!(fwd.h_m, -rev.h_m);
    assert!(fwd.h_n > 0.0, "hotter cylinder radiates net power");
}

#[test]
fn spectrum_invariants_and_long_wavelength_polarization() {
    let eps = c(3.0, 1.0);
    let mat = constant_material(eps);
    let opts = RadiationOptions::default();
    let grid: Vec<f64> = (0..12).map(|i| 0.01 * (i + 1) as f64).collect();
    let spec = spectral_emissivity(&mat, 1e-8, 300.0, &grid, &opts).unwrap();
    for i in 0..grid.len() {
        assert!(spec.h_n[i] >= 0.0 && spec.h_m[i] >= 0.0);
        assert!(spec.i_omega[i].abs() <= 1.0);
        let den = spec.h_n[i] + spec.h_m[i];
        if den > 0.0 {
            let direct = (spec.h_n[i] - spec.h_m[i]) / den;
            assert_eq!(spec.i_omega[i], direct);
        }
    }
    // Thin cylinder, long wavelength: I_omega approaches the constant
    // (|eps|^2 + 2 Re eps - 3)/(|eps|^2 + 2 Re eps + 9) = 0.52 here.
    let want = polarization_limit(eps);
    assert!((want - 0.52).abs() < 1e-14);
    assert!(
        (spec.i_omega[0] - want).abs() < 1e-3,
        "I_omega = {} vs limit {}",
        spec.i_omega[0],
        want
    );
    assert!(polarization_limit(c(1.0, 0.0)).abs() < 1e-15, "vacuum limit");
    // Frequency-independent permittivity: the spectral polarization is
    // temperature independent (the thermal prefactor cancels in the ratio,
    // leaving only its last-ulp rounding).
    let spec2 = spectral_emissivity(&mat, 1e-8, 700.0, &grid, &opts).unwrap();
    for i in 0..grid.len() {
        assert!(
            (spec.i_omega[i] - spec2.i_omega[i]).abs() < 1e-14,
            "I_omega(300 K) = {} vs I_omega(700 K) = {}",
            spec.i_omega[i],
            spec2.i_omega[i]
        );
    }
}

#[test]
fn small_r_law_matches_full_solution_for_sic() {
    let sic = materials::by_name("sic").unwrap();
    let opts = RadiationOptions::default();
    let (radius, t) = (10e-9, 300.0);
    let full = total_radiation(&sic, radius, t, 0.0, &opts).unwrap();
    let (hn_area, hm_area) = small_r_dielectric(&sic, radius, t, &opts).unwrap();
    let area = 2.0 * std::f64::consts::PI * radius;
    assert!(
        (full.h_npol / (area * hn_area) - 1.0).abs() < 0.01,
        "N: full {} vs law {}",
        full.h_npol,
        area * hn_area
    );
    assert!(
        (full.h_mpol / (area * hm_area) - 1.0).abs() < 0.01,
        "M: full {} vs law {}",
        full.h_mpol,
        area * hm_area
    );
    assert!((full.h_total - full.h_npol - full.h_mpol).abs() <= 1e-10 * full.h_total);
    assert!(full.i_total.abs() <= 1.0);
    // The law is explicitly linear in R.
    let (hn2, hm2) = small_r_dielectric(&sic, 2.0 * radius, t, &opts).unwrap();
    assert!((hn2 / hn_area - 2.0).abs() < 1e-9);
    assert!((hm2 / hm_area - 2.0).abs() < 1e-9);
}

#[test]
fn low_t_closed_forms() {
    let (h_n, h_m, i) = low_t_dielectric(3.0, 1e-6, 1e-6, 10.0).unwrap();
    assert!((i - 0.5).abs() < 1e-15, "I(eps0=3) = {i}");
    // Consistency of the closed forms with the standard definition of I.
    assert!(((h_n - h_m) / (h_n + h_m) - i).abs() < 1e-12);
    let (_, _, i1) = low_t_dielectric(1.0, 1e-6, 1e-6, 10.0).unwrap();
    assert!(i1.abs() < 1e-15);
    // T^6 scaling: doubling the temperature scales both parts by 64.
    let (h_n2, h_m2, _) = low_t_dielectric(3.0, 1e-6, 1e-6, 20.0).unwrap();
    assert!((h_n2 / h_n - 64.0).abs() < 1e-9);
    assert!((h_m2 / h_m - 64.0).abs() < 1e-9);
    assert!(low_t_dielectric(-1.0, 1e-6, 1e-6, 10.0).is_err());
}

#[test]
fn conductor_asymptotic_matches_full_solution_for_cold_gold() {
    // Regime lambda_T >> R >> delta: at 30 K, lambda_T ~ 76 um and the gold
    // skin depth at thermal frequencies is ~60 nm; R = 2 um sits mid-decade.
    let gold = materials::by_name("gold-drude").unwrap();
    let opts = RadiationOptions::default();
    let (radius, t) = (2e-6, 30.0);
    let full = total_radiation(&gold, radius, t, 0.0, &opts).unwrap();
    let area = 2.0 * std::f64::consts::PI * radius;
    let law = conductor_asymptotic(&gold, radius, t, &opts).unwrap();
    assert!(
        (area * law / full.h_npol - 1.0).abs() < 0.15,
        "conductor law {} vs full N {}",
        area * law,
        full.h_npol
    );
    // The emission is almost completely N-polarized in this regime.
    assert!(full.i_total > 0.9, "I = {}", full.i_total);
    // The law vanishes for ever better conductors (as 1/sqrt(eps)).
    let h_big = conductor_asymptotic(&constant_material(c(-1e8, 1e8)), radius, t, &opts).unwrap();
    let h_small = conductor_asymptotic(&constant_material(c(-1e4, 1e4)), radius, t, &opts).unwrap();
    assert!(h_big < 0.02 * h_small, "h(big eps) {h_big} vs h(small eps) {h_small}");
}

#[test]
fn rytov_closed_form_tracks_the_conductor_law() {
    let gold = materials::by_name("gold-drude").unwrap();
    let opts = RadiationOptions::default();
    let (radius, t) = (2e-6, 30.0);
    let exact = conductor_asymptotic(&gold, radius, t, &opts).unwrap();
    let approx = rytov_approx(&gold, radius, t, &opts).unwrap();
    let ratio = approx / exact;
    assert!(
        (0.1..=10.0).contains(&ratio),
        "rytov/exact ratio {ratio} outside the expected order of magnitude"
    );
    // Where omega R / (2c) crosses unity the log factor changes sign and the
    // closed form must refuse.
    assert!(matches!(
        rytov_approx(&gold, 1e-3, 300.0, &opts),
        Err(RadiationError::Regime(_))
    ));
}

#[test]
fn polarization_condition_cases() {
    let r = polarization_ratio(c(2.0, 0.1));
    assert!((r - 90.1).abs() < 1e-10);
    assert!(polarization_condition(c(2.0, 0.1)));
    assert!((polarization_ratio(c(-1.0, 1.0)) - 1.0).abs() < 1e-15);
    assert!(!polarization_condition(c(-1.0, 1.0)));
    assert!(polarization_ratio(c(5.0, 0.0)).is_infinite());
    assert!(polarization_condition(c(5.0, 0.0)));
}

#[test]
fn plate_limit_delegation() {
    let bb = constant_material(c(1.0, 1e-6));
    let opts = RadiationOptions::default();
    let s = plate_limit_check(&bb, 300.0, &opts).unwrap();
    let sb = sigma_sb() * 300.0f64.powi(4);
    assert!((s.s_total / sb - 1.0).abs() < 1e-3);
    let mirror = constant_material(c(-1e10, 1e10));
    let m = plate_limit_check(&mirror, 300.0, &opts).unwrap();
    assert!(m.s_total / sb < 1e-3);
}

#[test]
fn domain_truncation_and_window_errors() {
    let sic = materials::by_name("sic").unwrap();
    let opts = RadiationOptions::default();
    assert!(matches!(
        mode_sum(&sic, 0.0, 0.05, 300.0, 0.0, &opts),
        Err(RadiationError::Domain(_))
    ));
    assert!(matches!(
        total_radiation(&sic, 1e-6, 0.0, 0.0, &opts),
        Err(RadiationError::Domain(_))
    ));
    let strangled = RadiationOptions {
        n_cap: 4,
        ..Default::default()
    };
    assert!(matches!(
        mode_sum(&sic, 1e-6, 0.05, 300.0, 0.0, &strangled),
        Err(RadiationError::Truncation { cap: 4, .. })
    ));
    // Graphite at 300 K requires the explicit extrapolation flag.
    let graphite = materials::by_name("graphite-uniaxial").unwrap();
    assert!(matches!(
        total_radiation(&graphite, 1e-6, 300.0, 0.0, &opts),
        Err(RadiationError::WindowMismatch { .. })
    ));
}

#[test]
fn mode_tolerance_is_a_faithful_error_bound() {
    let sic = materials::by_name("sic").unwrap();
    let loose = RadiationOptions {
        mode_tolerance: 1e-6,
        ..Default::default()
    };
    let tight = RadiationOptions {
        mode_tolerance: 5e-7,
        ..Default::default()
    };
    let a = mode_sum(&sic, 5e-6, 0.05, 300.0, 0.0, &loose).unwrap();
    let b = mode_sum(&sic, 5e-6, 0.05, 300.0, 0.0, &tight).unwrap();
    let rel = ((a.h_n - b.h_n).abs() + (a.h_m - b.h_m).abs()) / (b.h_n + b.h_m);
    assert!(rel < 1e-6, "halving the mode tolerance moved the result by {rel}");
}
