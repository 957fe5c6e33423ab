use super::*;
use materials::consts::HBAR_EVS;
use rand::{Rng, SeedableRng};

fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

fn omega_of_ev(e: f64) -> f64 {
    e / HBAR_EVS
}

fn assert_close(got: C64, want: C64, rel: f64, what: &str) {
    let scale = want.norm().max(1e-300);
    let err = (got - want).norm() / scale;
    assert!(
        err <= rel,
        "{what}: got {got}, want {want}, rel err {err:.3e}"
    );
}

fn reference_uniaxial_case() -> (C64, C64, C64, f64, f64, f64) {
    let eps_r = c(2.0, 0.5);
    let eps_z = c(3.0, 0.25);
    let mu = c(1.0, 0.0);
    let radius = 1.0e-6;
    let omega = omega_of_ev(0.5);
    let k_z = 0.4 * omega / C_LIGHT;
    (eps_r, eps_z, mu, radius, omega, k_z)
}

#[test]
fn frozen_uniaxial_blocks() {
    let (eps_r, eps_z, mu, radius, omega, k_z) = reference_uniaxial_case();
    let want = [
        (
            0,
            c(-7.18898079525789879e-1, 1.37350323090514953e-1),
            c(-6.31820772490671478e-1, -2.15522181583089167e-1),
            c(0.0, 0.0),
        ),
        (
            1,
            c(-4.94645706256073237e-1, 1.58507660817921198e-1),
            c(-8.79938223560322919e-1, -8.26193678539569321e-2),
            c(6.36917369850492458e-3, 1.01188364015585303e-2),
        ),
        (
            2,
            c(-3.45335938686742228e-1, 2.67323262115003069e-1),
            c(-7.47512298630286898e-1, -2.08796290032247395e-1),
            c(-6.59829327366433099e-2, -6.57806461543310322e-2),
        ),
    ];
    for (n, t_mm, t_nn, t_mn) in want {
        let mode = ModeIndex::new(n, k_z, omega);
        for (path, b) in [
            ("closed", t_block_uniaxial(eps_r, eps_z, mu, radius, mode).unwrap()),
            ("oracle", t_block_oracle(eps_r, eps_z, mu, radius, mode).unwrap()),
        ] {
            assert_close(b.t_mm, t_mm, 5e-11, &format!("{path} t_mm n={n}"));
            assert_close(b.t_nn, t_nn, 5e-11, &format!("{path} t_nn n={n}"));
            if n == 0 {
                assert!(b.t_mn.norm() < 1e-15 && b.t_nm.norm() < 1e-15);
            } else {
                assert_close(b.t_mn, t_mn, 5e-10, &format!("{path} t_mn n={n}"));
                assert_close(b.t_nm, t_mn, 5e-10, &format!("{path} t_nm n={n}"));
            }
        }
    }
}

#[test]
fn frozen_isotropic_conductor_block() {
    let eps = c(-80.0, 60.0);
    let mu = c(1.0, 0.0);
    let radius = 5.0e-6;
    let omega = omega_of_ev(0.5);
    let mode = ModeIndex::new(1, 0.3 * omega / C_LIGHT, omega);
    let b = t_block_uniaxial(eps, eps, mu, radius, mode).unwrap();
    assert_close(
        b.t_mm,
        c(-1.04516699738104180e-1, -2.55674884901130439e-1),
        5e-11,
        "conductor t_mm",
    );
    assert_close(
        b.t_nn,
        c(-9.16752678559662915e-1, 2.13551297124301431e-1),
        5e-11,
        "conductor t_nn",
    );
    assert_close(
        b.t_mn,
        c(2.39972633995778548e-3, -4.89299711734227116e-4),
        5e-10,
        "conductor t_mn",
    );
}

#[test]
fn vacuum_scatters_nothing() {
    let one = c(1.0, 0.0);
    let omega = omega_of_ev(0.3);
    for n in [0, 1, 3] {
        let mode = ModeIndex::new(n, 0.2 * omega / C_LIGHT, omega);
        for b in [
            t_block_uniaxial(one, one, one, 1e-6, mode).unwrap(),
            t_block_oracle(one, one, one, 1e-6, mode).unwrap(),
            t_small_r(one, one, 1e-8, ModeIndex::new(n.min(1), mode.k_z, omega)).unwrap(),
        ] {
            assert!(
                b.t_mm.norm() < 1e-13
                    && b.t_nn.norm() < 1e-13
                    && b.t_mn.norm() < 1e-13,
                "vacuum block not ~0: {b:?}"
            );
        }
    }
}

#[test]
fn oracle_equivalence_randomized() {
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(0x5eed_0003);
    let mut worst = 0.0f64;
    for trial in 0..1000 {
        let n = rng.gen_range(-8..=8);
        let e_ev = 0.01 * (100.0f64).powf(rng.gen::<f64>()); // 0.01..1 eV
        let omega = omega_of_ev(e_ev);
        let radius = 1.0e-8 * (1.0e4f64).powf(rng.gen::<f64>()); // 10 nm..100 um
        let k_z = rng.gen_range(-0.999..0.999) * omega / C_LIGHT;
        let eps_r = c(rng.gen_range(-60.0..60.0), rng.gen_range(0.01..60.0));
        let eps_z = c(rng.gen_range(-60.0..60.0), rng.gen_range(0.01..60.0));
        let mu = if trial % 10 == 0 {
            c(rng.gen_range(0.5..3.0), rng.gen_range(0.01..1.0))
        } else {
            c(1.0, 0.0)
        };
        let mode = ModeIndex::new(n, k_z, omega);
        let a = t_block_uniaxial(eps_r, eps_z, mu, radius, mode).unwrap();
        let b = t_block_oracle(eps_r, eps_z, mu, radius, mode).unwrap();
        let scale = [a.t_mm, a.t_nn, a.t_mn]
            .iter()
            .map(|v| v.norm())
            .fold(1e-300, f64::max);
        for (x, y, what) in [
            (a.t_mm, b.t_mm, "t_mm"),
            (a.t_nn, b.t_nn, "t_nn"),
            (a.t_mn, b.t_mn, "t_mn"),
            (a.t_nm, b.t_nm, "t_nm"),
        ] {
            let err = (x - y).norm() / scale;
            worst = worst.max(err);
            assert!(
                err <= 1e-8,
                "trial {trial} {what}: closed {x} vs oracle {y}, rel {err:.3e} \
                 (n={n}, e={e_ev:.4} eV, R={radius:.3e}, kt={:.3}, eps_r={eps_r}, eps_z={eps_z}, mu={mu})",
                mode.k_tilde()
            );
        }
        // Passivity and subunitarity on the same lossy draws.
        let (xi_m, xi_n) = a.xi();
        assert!(
            xi_m <= 1e-12 && xi_n <= 1e-12,
            "trial {trial}: passivity violated, xi=({xi_m:.3e},{xi_n:.3e})"
        );
        let (s1, s2) = a.s_singular_values();
        assert!(
            s1 <= 1.0 + 1e-10 && s2 <= 1.0 + 1e-10,
            "trial {trial}: subunitarity violated, s=({s1},{s2})"
        );
    }
    eprintln!("worst closed-vs-oracle deviation: {worst:.3e}");
}

#[test]
fn index_symmetries() {
    let (eps_r, eps_z, mu, radius, omega, k_z) = reference_uniaxial_case();
    for n in [1, 2, 5] {
        let b = t_block_uniaxial(eps_r, eps_z, mu, radius, ModeIndex::new(n, k_z, omega)).unwrap();
        assert_eq!(b.t_mn, b.t_nm);
        let bm = t_block_uniaxial(eps_r, eps_z, mu, radius, ModeIndex::new(-n, -k_z, omega)).unwrap();
        assert_close(bm.t_mm, b.t_mm, 1e-12, "(-n,-kz) t_mm");
        assert_close(bm.t_nn, b.t_nn, 1e-12, "(-n,-kz) t_nn");
        assert_close(bm.t_mn, b.t_mn, 1e-12, "(-n,-kz) t_mn");
        let bk = t_block_uniaxial(eps_r, eps_z, mu, radius, ModeIndex::new(n, -k_z, omega)).unwrap();
        assert_close(bk.t_mm, b.t_mm, 1e-12, "(n,-kz) t_mm");
        assert_close(bk.t_nn, b.t_nn, 1e-12, "(n,-kz) t_nn");
        assert_close(bk.t_mn, -b.t_mn, 1e-12, "(n,-kz) t_mn sign flip");
    }
}

#[test]
fn sequence_matches_single_calls() {
    let (eps_r, eps_z, mu, radius, omega, k_z) = reference_uniaxial_case();
    let seq = t_block_sequence(eps_r, eps_z, mu, radius, k_z, omega, 12).unwrap();
    assert_eq!(seq.len(), 13);
    for (n, b) in seq.iter().enumerate() {
        let single =
            t_block_uniaxial(eps_r, eps_z, mu, radius, ModeIndex::new(n as i32, k_z, omega))
                .unwrap();
        let scale = single.t_mm.norm().max(single.t_nn.norm()).max(1e-300);
        assert!(
            (b.t_mm - single.t_mm).norm() / scale < 1e-9
                && (b.t_nn - single.t_nn).norm() / scale < 1e-9
                && (b.t_mn - single.t_mn).norm() / scale < 1e-9,
            "sequence/single mismatch at n={n}: {b:?} vs {single:?}"
        );
    }
}

#[test]
fn sequence_zeroes_overflowed_tail() {
    // Tiny x with large nmax: high orders have |H_n| beyond f64 range and
    // must come back as zero blocks rather than NaNs.
    let omega = omega_of_ev(0.05);
    let k_z = 0.1 * omega / C_LIGHT;
    let seq =
        t_block_sequence(c(2.0, 0.5), c(2.0, 0.5), c(1.0, 0.0), 1.0e-8, k_z, omega, 300).unwrap();
    assert_eq!(seq.len(), 301);
    let tail = &seq[250];
    assert_eq!(tail.t_mm, c(0.0, 0.0));
    assert_eq!(tail.t_nn, c(0.0, 0.0));
    // Low orders are still real values.
    assert!(seq[0].t_nn.norm() > 0.0);
}

#[test]
fn small_r_reference_values() {
    let omega = omega_of_ev(0.5);
    let k = omega / C_LIGHT;
    let radius = 0.01 / k; // omega R / c = 0.01
    let eps = c(2.0, 0.0);
    let mu = c(1.0, 0.0);
    // n = 0, k_z = 0: t_nn = (i pi/4) x^2 for eps = 2.
    let b0 = t_small_r(eps, mu, radius, ModeIndex::new(0, 0.0, omega)).unwrap();
    assert_close(b0.t_nn, c(0.0, std::f64::consts::PI / 4.0 * 1e-4), 1e-12, "t_nn0");
    assert!(b0.t_mm.norm() < 1e-18 && b0.t_mn.norm() == 0.0);
    // n = 1, k_z = 0: t_mm = (i pi/4)(1/3) x^2.
    let b1 = t_small_r(eps, mu, radius, ModeIndex::new(1, 0.0, omega)).unwrap();
    assert_close(
        b1.t_mm,
        c(0.0, std::f64::consts::PI / 12.0 * 1e-4),
        1e-12,
        "t_mm1",
    );
    // Antisymmetry of the cross element in n.
    let kz = 0.5 * k;
    let p = t_small_r(eps, mu, radius, ModeIndex::new(1, kz, omega)).unwrap();
    let m = t_small_r(eps, mu, radius, ModeIndex::new(-1, kz, omega)).unwrap();
    assert_close(m.t_mn, -p.t_mn, 1e-15, "t_mn antisymmetry");
    // |n| > 1 rejected.
    assert!(matches!(
        t_small_r(eps, mu, radius, ModeIndex::new(2, 0.0, omega)),
        Err(TMatrixError::Domain(_))
    ));
}

#[test]
fn small_r_matches_exact_and_converges_as_x4() {
    let eps = c(3.0, 0.4);
    let mu = c(1.0, 0.0);
    let omega = omega_of_ev(0.1);
    let k = omega / C_LIGHT;
    let kz = 0.35 * k;
    let mut prev: Option<(f64, f64)> = None;
    for halvings in 0..3 {
        let x = 1.0e-3 / (2.0f64).powi(halvings);
        let radius = x / k;
        let mut abs_dev = 0.0f64;
        let mut rel_dev = 0.0f64;
        for n in [0, 1, -1] {
            let mode = ModeIndex::new(n, kz, omega);
            let approx = t_small_r(eps, mu, radius, mode).unwrap();
            let exact = t_block_uniaxial(eps, eps, mu, radius, mode).unwrap();
            let scale = exact.t_mm.norm().max(exact.t_nn.norm());
            let d = (approx.t_mm - exact.t_mm)
                .norm()
                .max((approx.t_nn - exact.t_nn).norm())
                .max((approx.t_mn - exact.t_mn).norm());
            abs_dev = abs_dev.max(d);
            rel_dev = rel_dev.max(d / scale);
        }
        if halvings == 0 {
            assert!(rel_dev <= 1e-4, "small-R deviation {rel_dev:.3e} at x=1e-3");
        }
        if let Some((p, _)) = prev {
            // The elements scale as x^2 and the truncation error as x^4, so
            // halving x shrinks the absolute deviation ~16x; allow slack.
            assert!(
                abs_dev < p / 8.0,
                "deviation not O(x^4): {p:.3e} -> {abs_dev:.3e}"
            );
        }
        prev = Some((abs_dev, rel_dev));
    }
}

#[test]
fn conductor_limit_forms() {
    let omega = omega_of_ev(0.1);
    let k = omega / C_LIGHT;
    let radius = 1.0e-6;
    let x = k * radius;
    let mode = ModeIndex::new(0, 0.0, omega);
    // |eps| -> infinity: middle term vanishes.
    let big = c(-1.0e18, 1.0e18);
    let got = t_conductor_limit(big, radius, mode).unwrap();
    let pi = std::f64::consts::PI;
    let want = -pi
        / (C64::new(pi, 2.0 * materials::consts::EULER_GAMMA) + c(0.0, 2.0) * (x / 2.0).ln());
    assert_close(got, want, 1e-8, "perfect-conductor limit");
    // Drude-gold eps at 0.1 eV: within 10% of the exact T^NN_0.
    let e = 0.1;
    let eps_gold = c(1.0, 0.0) - 9.03f64.powi(2) / (e * (e + c(0.0, 2.67e-2)));
    let approx = t_conductor_limit(eps_gold, radius, mode).unwrap();
    let exact = t_block_uniaxial(eps_gold, eps_gold, c(1.0, 0.0), radius, mode)
        .unwrap()
        .t_nn;
    let rel = (approx - exact).norm() / exact.norm();
    assert!(rel < 0.10, "conductor limit off by {rel:.3}: {approx} vs {exact}");
}

#[test]
fn degenerate_endpoint_rejected() {
    let omega = omega_of_ev(0.5);
    let k = omega / C_LIGHT;
    let mode = ModeIndex::new(0, k, omega);
    assert!(matches!(
        t_block_uniaxial(c(2.0, 0.1), c(2.0, 0.1), c(1.0, 0.0), 1e-6, mode),
        Err(TMatrixError::Degenerate(_))
    ));
}

#[test]
fn lossless_interior_resonance_reports_pole() {
    // Choose a lossless dielectric whose interior argument x_N sits on the
    // first zero of J_0, where the interior log-derivative blows up.
    let omega = omega_of_ev(0.5);
    let k = omega / C_LIGHT;
    let radius = 1.0e-6;
    let j0_zero = 2.404825557695773;
    let eps = (j0_zero / (k * radius)).powi(2);
    let mode = ModeIndex::new(0, 0.0, omega);
    let r = t_block_uniaxial(c(eps, 0.0), c(eps, 0.0), c(1.0, 0.0), radius, mode);
    assert!(
        matches!(
            r,
            Err(TMatrixError::SpecFun(specfun::SpecFunError::Pole))
        ),
        "expected pole, got {r:?}"
    );
}

#[test]
fn isotropic_reduction_consistency() {
    // eps_r = eps_z: the extraordinary and ordinary wavevectors coincide and
    // the closed form must agree with the oracle on a conducting draw.
    let eps = c(-200.0, 150.0);
    let omega = omega_of_ev(0.2);
    let mode = ModeIndex::new(3, 0.6 * omega / C_LIGHT, omega);
    let a = t_block_uniaxial(eps, eps, c(1.0, 0.0), 2.0e-6, mode).unwrap();
    let b = t_block_oracle(eps, eps, c(1.0, 0.0), 2.0e-6, mode).unwrap();
    assert_close(a.t_mm, b.t_mm, 1e-9, "iso t_mm");
    assert_close(a.t_nn, b.t_nn, 1e-9, "iso t_nn");
    let wv = wavevectors(eps, eps, c(1.0, 0.0), &mode);
    assert_close(wv.q_n, wv.q_m, 1e-14, "q_n = q_m for isotropic");
}
