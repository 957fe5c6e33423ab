//! Reflection matrix of a uniaxial half-space whose optic axis lies in the
//! surface plane (along x).  The transmitted field is a superposition of one
//! ordinary and one extraordinary wave, both on the decaying branch; the
//! 2×2 reflection matrix follows from continuity of the tangential E and H
//! components, solved as a 4×4 linear system per `(omega, k_perp, phi)`.

use crate::FresnelPair;
use materials::consts::C_LIGHT;
use num_complex::Complex64 as C64;
use tmatrix::branch_im_pos;

type V3 = [C64; 3];

fn cz(re: f64) -> C64 {
    C64::new(re, 0.0)
}

fn cross(a: &V3, b: &V3) -> V3 {
    [
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ]
}

/// Unnormalized bilinear dot product (no conjugation): the right notion for
/// normalizing complex polarization basis vectors of non-uniform plane waves.
fn dot(a: &V3, b: &V3) -> C64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

fn scale(a: &V3, s: C64) -> V3 {
    [a[0] * s, a[1] * s, a[2] * s]
}

fn norm_sqr(a: &V3) -> f64 {
    a.iter().map(|v| v.norm_sqr()).sum()
}

/// Reflection matrix of the uniaxial half-space; `eps_r` is the permittivity
/// perpendicular to the optic axis, `eps_z` along it, `omega` in rad/s,
/// `0 <= k_perp < omega/c`, `phi` the azimuth of the incidence plane
/// relative to the optic axis.
pub fn fresnel_uniaxial(
    eps_r: C64,
    eps_z: C64,
    mu: C64,
    omega: f64,
    k_perp: f64,
    phi: f64,
) -> FresnelPair {
    let k0 = omega / C_LIGHT;
    let (kx, ky) = (k_perp * phi.cos(), k_perp * phi.sin());
    let kz0 = (k0 * k0 - k_perp * k_perp).max(0.0).sqrt();
    let ki: V3 = [cz(kx), cz(ky), cz(-kz0)];
    let kr: V3 = [cz(kx), cz(ky), cz(kz0)];
    // Transmitted wavevectors (z < 0 half-space, decaying branch).
    let kzo = -branch_im_pos(eps_r * mu * k0 * k0 - cz(k_perp * k_perp));
    let kze = -branch_im_pos(
        eps_z * mu * k0 * k0 - (eps_z / eps_r) * kx * kx - cz(ky * ky),
    );
    let ko: V3 = [cz(kx), cz(ky), kzo];
    let ke: V3 = [cz(kx), cz(ky), kze];
    // Ordinary polarization: E perpendicular to both the optic axis and k.
    let xhat: V3 = [cz(1.0), cz(0.0), cz(0.0)];
    let mut eo = cross(&ko, &xhat);
    let no = dot(&eo, &eo).sqrt();
    eo = if no.norm() < 1e-30 {
        [cz(0.0), cz(1.0), cz(0.0)]
    } else {
        scale(&eo, 1.0 / no)
    };
    // Extraordinary polarization: null vector of the dispersion tensor
    // D = ke (x) ke - (ke.ke) 1 + mu k0^2 eps, found from row cross-products.
    let kk = dot(&ke, &ke);
    let eps_diag = [eps_z, eps_r, eps_r];
    let mut rows: [V3; 3] = [[cz(0.0); 3]; 3];
    for (i, row) in rows.iter_mut().enumerate() {
        for j in 0..3 {
            row[j] = ke[i] * ke[j];
            if i == j {
                row[j] += mu * k0 * k0 * eps_diag[i] - kk;
            }
        }
    }
    let mut best = 0.0f64;
    let mut ee: V3 = [cz(0.0); 3];
    for i in 0..3 {
        for j in (i + 1)..3 {
            let v = cross(&rows[i], &rows[j]);
            let s = norm_sqr(&v);
            if s > best {
                best = s;
                ee = v;
            }
        }
    }
    let scale_m: f64 = rows.iter().map(norm_sqr).sum();
    if best < 1e-18 * scale_m * scale_m {
        // Degenerate (isotropic) limit: any p-like transmitted vector works.
        ee = cross(&ke, &eo);
    }
    let ne = dot(&ee, &ee).sqrt();
    let ee = scale(&ee, 1.0 / ne);
    // Vacuum s and p unit vectors for incident and reflected waves.
    let shat: V3 = if k_perp < 1e-12 * k0 {
        [cz(0.0), cz(1.0), cz(0.0)]
    } else {
        [cz(ky / k_perp), cz(-kx / k_perp), cz(0.0)]
    };
    let p_inc = scale(&cross(&shat, &ki), C64::new(1.0 / k0, 0.0));
    let p_ref = scale(&cross(&shat, &kr), C64::new(1.0 / k0, 0.0));
    let h_of = |k: &V3, e: &V3, mu_w: C64| -> V3 { scale(&cross(k, e), 1.0 / (cz(k0) * mu_w)) };
    // Unknowns: [r_s, r_p, t_o, t_e]; rows: continuity of Ex, Ey, Hx, Hy.
    let one = cz(1.0);
    let waves: [(&V3, &V3, C64, f64); 4] = [
        (&kr, &shat, one, 1.0),
        (&kr, &p_ref, one, 1.0),
        (&ko, &eo, mu, -1.0),
        (&ke, &ee, mu, -1.0),
    ];
    let mut a = [[cz(0.0); 4]; 4];
    for (col, (k, e, mu_w, sign)) in waves.iter().enumerate() {
        let h = h_of(k, e, *mu_w);
        a[0][col] = *sign * e[0];
        a[1][col] = *sign * e[1];
        a[2][col] = *sign * h[0];
        a[3][col] = *sign * h[1];
    }
    let solve_for = |e_inc: &V3| -> (C64, C64) {
        let h = h_of(&ki, e_inc, one);
        let rhs = [-e_inc[0], -e_inc[1], -h[0], -h[1]];
        let sol = solve_4x4(a, rhs);
        (sol[0], sol[1])
    };
    let (r_ss, r_ps) = solve_for(&shat);
    let (r_sp, r_pp) = solve_for(&p_inc);
    FresnelPair {
        r_ss,
        r_pp,
        r_sp,
        r_ps,
    }
}

/// Gaussian elimination with partial pivoting for the 4×4 continuity system.
fn solve_4x4(mut m: [[C64; 4]; 4], mut rhs: [C64; 4]) -> [C64; 4] {
    for col in 0..4 {
        let best = (col..4)
            .max_by(|&a, &b| m[a][col].norm().total_cmp(&m[b][col].norm()))
            .unwrap();
        m.swap(col, best);
        rhs.swap(col, best);
        for row in (col + 1)..4 {
            let f = m[row][col] / m[col][col];
            for c in col..4 {
                let sub = f * m[col][c];
                m[row][c] -= sub;
            }
            let sub = f * rhs[col];
            rhs[row] -= sub;
        }
    }
    let mut x = [cz(0.0); 4];
    for row in (0..4).rev() {
        let mut acc = rhs[row];
        for c in (row + 1)..4 {
            acc -= m[row][c] * x[c];
        }
        x[row] = acc / m[row][row];
    }
    x
}
