//! Independent boundary-value evaluation of the cylinder T-matrix: continuity
//! of the tangential field components at the surface yields a 4×4 linear
//! system for the interior amplitudes (A) and scattering amplitudes (T) per
//! incident polarization.  The interior-amplitude columns are rescaled by
//! `1/J_n(x_M)` and `1/J_n(x_N)` so that only logarithmic-derivative ratios
//! of the interior Bessel functions appear, keeping the assembly
//! overflow-free for strongly absorbing media.

use crate::{check_mode, finalize, wavevectors, ModeIndex, Result, TMatrixBlock, TMatrixError};
use materials::consts::C_LIGHT;
use num_complex::Complex64 as C64;

/// Solve `m x = rhs` for two right-hand sides by Gaussian elimination with
/// partial pivoting; errors if the pivot-magnitude spread exceeds 1e14.
fn solve_4x4_2rhs(mut m: [[C64; 4]; 4], mut rhs: [[C64; 2]; 4]) -> Result<[[C64; 2]; 4]> {
    // Equilibrate rows so the pivot-magnitude spread measures conditioning
    // rather than the (physically disparate) row scales.
    for r in 0..4 {
        let s = m[r].iter().map(|v| v.norm()).fold(0.0f64, f64::max);
        if s == 0.0 {
            return Err(TMatrixError::Singular { cond: f64::INFINITY });
        }
        for v in m[r].iter_mut() {
            *v /= s;
        }
        for v in rhs[r].iter_mut() {
            *v /= s;
        }
    }
    // Equilibrate columns as well (rescaling the unknowns), undone below.
    let mut col_scale = [0.0f64; 4];
    for (c, s) in col_scale.iter_mut().enumerate() {
        *s = (0..4).map(|r| m[r][c].norm()).fold(0.0f64, f64::max);
        if *s == 0.0 {
            return Err(TMatrixError::Singular { cond: f64::INFINITY });
        }
        for r in 0..4 {
            m[r][c] /= *s;
        }
    }
    let mut pivot_max: f64 = 0.0;
    let mut pivot_min = f64::INFINITY;
    for col in 0..4 {
        let (best, mag) = (col..4)
            .map(|r| (r, m[r][col].norm()))
            .max_by(|a, b| a.1.total_cmp(&b.1))
            .unwrap();
        if mag == 0.0 {
            return Err(TMatrixError::Singular { cond: f64::INFINITY });
        }
        pivot_max = pivot_max.max(mag);
        pivot_min = pivot_min.min(mag);
        m.swap(col, best);
        rhs.swap(col, best);
        for row in (col + 1)..4 {
            let f = m[row][col] / m[col][col];
            for c in col..4 {
                let sub = f * m[col][c];
                m[row][c] -= sub;
            }
            for c in 0..2 {
                let sub = f * rhs[col][c];
                rhs[row][c] -= sub;
            }
        }
    }
    let cond = pivot_max / pivot_min;
    if cond > 1e14 {
        return Err(TMatrixError::Singular { cond });
    }
    let mut x = [[C64::new(0.0, 0.0); 2]; 4];
    for col in 0..2 {
        for row in (0..4).rev() {
            let mut acc = rhs[row][col];
            for c in (row + 1)..4 {
                acc -= m[row][c] * x[c][col];
            }
            x[row][col] = acc / m[row][row];
        }
    }
    for (row, s) in col_scale.iter().enumerate() {
        for v in x[row].iter_mut() {
            *v /= *s;
        }
    }
    Ok(x)
}

/// Boundary-value oracle for the uniaxial cylinder block; agrees with
/// [`crate::t_block_uniaxial`] elementwise but shares no algebra with it.
pub fn t_block_oracle(
    eps_r: C64,
    eps_z: C64,
    mu: C64,
    radius: f64,
    mode: ModeIndex,
) -> Result<TMatrixBlock> {
    check_mode(&mode, radius)?;
    let wv = wavevectors(eps_r, eps_z, mu, &mode);
    let x = wv.q * radius;
    let x_m = wv.q_m * radius;
    let x_n = wv.q_n * radius;
    let n = mode.n;
    let nf = n as f64;
    let co = C_LIGHT / mode.omega;
    let kz = mode.k_z;
    // Interior functions enter only as J'_n/J_n.
    let l_m = specfun::log_derivative_j(n, x_m)?;
    let l_n = specfun::log_derivative_j(n, x_n)?;
    // Exterior functions at real argument.
    let j = specfun::bessel_j(n, x)?;
    let jp = specfun::bessel_j_derivative(n, x)?;
    let h = specfun::hankel1(n, x)?;
    let hp = specfun::hankel1_derivative(n, x)?;
    let zero = C64::new(0.0, 0.0);
    // Unknown vectors (per incident polarization P): the interior amplitudes
    // scaled as A^MP J_n(x_M), A^NP J_n(x_N), and the raw T^MP, T^NP.
    let m = [
        [wv.q_m * co / mu, -wv.q * co * h, zero, zero],
        [l_m, -hp, nf * kz * co / x_n, -nf * kz * co / x * h],
        [zero, zero, (eps_r / eps_z) * wv.q_n * co, -wv.q * co * h],
        [nf * kz * co / (mu * x_m), -nf * kz * co / x * h, eps_r * l_n, -hp],
    ];
    // Columns: incident M, incident N.
    let rhs = [
        [co * wv.q * j, zero],
        [jp, nf * kz * co / x * j],
        [zero, co * wv.q * j],
        [nf * kz * co / x * j, jp],
    ];
    let sol = solve_4x4_2rhs(m, rhs)?;
    let t_mm = sol[1][0];
    let t_nm = sol[3][0];
    let t_mn = sol[1][1];
    let t_nn = sol[3][1];
    let block = finalize(t_mm, t_nn, t_mn, mode, radius)?;
    Ok(TMatrixBlock { t_nm, ..block })
}
