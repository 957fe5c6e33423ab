//! Embedded invariant suite: quick structural checks that the numerical
//! stack is assembled correctly, printed as one PASS/FAIL line per check
//! with its worst residual.  The report is deterministic.

use clap::Args;
use materials::consts::{C_LIGHT, HBAR_EVS};
use num_complex::Complex64 as C64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::process::ExitCode;
use tmatrix::{t_block_oracle, t_block_uniaxial, ModeIndex};

#[derive(Args, Debug)]
pub struct SelfcheckArgs {
    /// Debug fault injection: offset added to the closed-form permittivity
    /// only, so the oracle-equivalence check must fail when nonzero.
    #[arg(long, hide = true, default_value_t = 0.0)]
    pub epsilon_offset: f64,
}

struct Check {
    name: &'static str,
    residual: f64,
    bound: f64,
}

impl Check {
    fn passed(&self) -> bool {
        self.residual <= self.bound
    }
}

fn wronskian_sample() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5e1f_0001);
    let mut worst = 0.0f64;
    for _ in 0..200 {
        let n = rng.gen_range(-12..=12);
        let z = C64::new(rng.gen_range(-40.0..40.0), rng.gen_range(-40.0..40.0));
        if z.norm() < 1e-3 {
            continue;
        }
        match specfun::bessel_pair(n, z) {
            Ok(eval) => worst = worst.max(eval.wronskian_residual),
            Err(_) => worst = f64::INFINITY,
        }
    }
    Check {
        name: "wronskian-sample",
        residual: worst,
        bound: 1e-9,
    }
}

fn random_draw(rng: &mut ChaCha8Rng) -> (C64, C64, C64, f64, ModeIndex) {
    let eps_r = C64::new(rng.gen_range(-60.0..60.0), rng.gen_range(0.01..60.0));
    let eps_z = C64::new(rng.gen_range(-60.0..60.0), rng.gen_range(0.01..60.0));
    let mu = C64::new(1.0, 0.0);
    let e_ev = 10f64.powf(rng.gen_range(-2.0..0.0));
    let omega = e_ev / HBAR_EVS;
    let radius = 10f64.powf(rng.gen_range(-8.0..-4.0));
    let kt = rng.gen_range(-0.999..0.999);
    let n = rng.gen_range(-8..=8);
    let mode = ModeIndex::new(n, kt * omega / C_LIGHT, omega);
    (eps_r, eps_z, mu, radius, mode)
}

fn block_distance(a: &tmatrix::TMatrixBlock, b: &tmatrix::TMatrixBlock) -> f64 {
    let scale = [a.t_mm, a.t_nn, a.t_mn]
        .iter()
        .map(|v| v.norm())
        .fold(1e-300, f64::max);
    ((a.t_mm - b.t_mm).norm() + (a.t_nn - b.t_nn).norm() + (a.t_mn - b.t_mn).norm()) / scale
}

fn oracle_equivalence(epsilon_offset: f64) -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5e1f_0002);
    let mut worst = 0.0f64;
    for _ in 0..100 {
        let (eps_r, eps_z, mu, radius, mode) = random_draw(&mut rng);
        let shifted = eps_r + C64::new(epsilon_offset, 0.0);
        let closed = t_block_uniaxial(shifted, eps_z + epsilon_offset, mu, radius, mode);
        let oracle = t_block_oracle(eps_r, eps_z, mu, radius, mode);
        match (closed, oracle) {
            (Ok(a), Ok(b)) => worst = worst.max(block_distance(&a, &b)),
            _ => worst = f64::INFINITY,
        }
    }
    Check {
        name: "oracle-equivalence",
        residual: worst,
        bound: 1e-8,
    }
}

fn isotropic_reduction() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5e1f_0003);
    let mut worst = 0.0f64;
    for _ in 0..100 {
        let (eps_r, _, mu, radius, mode) = random_draw(&mut rng);
        let uni = t_block_uniaxial(eps_r, eps_r, mu, radius, mode);
        let oracle = t_block_oracle(eps_r, eps_r, mu, radius, mode);
        match (uni, oracle) {
            (Ok(a), Ok(b)) => worst = worst.max(block_distance(&a, &b)),
            _ => worst = f64::INFINITY,
        }
    }
    Check {
        name: "isotropic-reduction",
        residual: worst,
        bound: 1e-8,
    }
}

fn dual_formula() -> Check {
    let opts = radiation::RadiationOptions::default();
    let mut worst = 0.0f64;
    for (name, radius, e_ev) in [
        ("sic", 1e-6, 0.05),
        ("sic", 1e-7, 0.10),
        ("gold-drude", 1e-6, 0.10),
    ] {
        let mat = materials::by_name(name).expect("built-in material");
        match radiation::mode_sum(&mat, radius, e_ev, 300.0, 0.0, &opts) {
            Ok(s) => worst = worst.max(s.dual_residual),
            Err(_) => worst = f64::INFINITY,
        }
    }
    Check {
        name: "dual-formula",
        residual: worst,
        bound: 1e-10,
    }
}

fn temperature_antisymmetry() -> Check {
    let opts = radiation::RadiationOptions::default();
    let mat = materials::by_name("sic").expect("built-in material");
    let residual = match (
        radiation::mode_sum(&mat, 1e-6, 0.05, 300.0, 100.0, &opts),
        radiation::mode_sum(&mat, 1e-6, 0.05, 100.0, 300.0, &opts),
    ) {
        (Ok(a), Ok(b)) => {
            ((a.h_n + b.h_n).abs() + (a.h_m + b.h_m).abs())
                / (a.h_n.abs() + a.h_m.abs()).max(1e-300)
        }
        _ => f64::INFINITY,
    };
    Check {
        name: "temperature-antisymmetry",
        residual,
        bound: 1e-15,
    }
}

pub fn run(args: &SelfcheckArgs) -> ExitCode {
    let checks = [
        wronskian_sample(),
        oracle_equivalence(args.epsilon_offset),
        isotropic_reduction(),
        dual_formula(),
        temperature_antisymmetry(),
    ];
    let mut all_ok = true;
    for c in &checks {
        let verdict = if c.passed() { "PASS" } else { "FAIL" };
        all_ok &= c.passed();
        println!(
            "{verdict} {name}: residual {res:.3e} (bound {bound:.1e})",
            name = c.name,
            res = c.residual,
            bound = c.bound
        );
    }
    if all_ok {
        println!("selfcheck: all {} checks passed", checks.len());
        ExitCode::SUCCESS
    } else {
        println!("selfcheck: FAILURES detected");
        ExitCode::FAILURE
    }
}
