//! Thermal emission of a semi-infinite planar body (the large-radius limit of
//! the cylinder): Fresnel reflection coefficients for isotropic and uniaxial
//! half-spaces (optic axis in the surface plane) and the emitted power per
//! area, decomposed into the cylinder's M/N polarization channels.
//!
//! The M/N decomposition used here assigns, per plane wave, the fraction
//! `cos^2(phi)` of the s-channel deficit and `sin^2(phi)` of the p-channel
//! deficit to M (and the complements to N), where `phi` is the azimuth
//! between the optic axis and the line where the incidence plane meets the
//! surface.  This split sums to the total emissivity exactly at every
//! quadrature node.  A coherent polarimetric split, which instead projects
//! the emitted field onto the direction of the optic axis, is available as
//! [`plate_emissivity_coherent`]; the two differ for strongly anisotropic
//! media.

use materials::consts::{bose_occupation, C_LIGHT, HBAR_EVS, HBAR_SI};
use materials::{MaterialError, MaterialSpec};
use num_complex::Complex64 as C64;
use rayon::prelude::*;
use tmatrix::branch_im_pos;

mod uniaxial;
pub use uniaxial::fresnel_uniaxial;

#[derive(Debug, Clone, thiserror::Error)]
pub enum PlateError {
    #[error(transparent)]
    Material(#[from] MaterialError),
    #[error("quadrature failed to reach tolerance {requested:.1e}; achieved {achieved:.1e}")]
    NonConvergence { requested: f64, achieved: f64 },
    #[error("invalid input: {0}")]
    Domain(String),
    #[error("the material window [{lo:.3e}, {hi:.3e}] eV misses the thermal band at T = {t_kelvin} K")]
    WindowMismatch { lo: f64, hi: f64, t_kelvin: f64 },
}

pub type Result<T> = std::result::Result<T, PlateError>;

/// Reflection amplitudes at fixed `(omega, k_perp, phi)`; `r_xy` scatters
/// incident polarization `y` into outgoing `x`.
///
/// Basis convention: `s` along `k_perp x z`, `p = s x k / k0` for each wave
/// with its own propagation direction.  In this convention the isotropic
/// half-space gives the textbook `r_pp = (eps kz1 - kz2)/(eps kz1 + kz2)`
/// (so `r_ss = -r_pp` at normal incidence), and an in-plane optic axis has a
/// single independent cross amplitude with `r_sp = -r_ps`; conventions that
/// mirror the reflected p-vector instead report `r_sp = +r_ps` with the
/// diagonal signs swapped.  Only relative phases within one column affect
/// any emissivity.
#[derive(Debug, Clone, Copy)]
pub struct FresnelPair {
    pub r_ss: C64,
    pub r_pp: C64,
    pub r_sp: C64,
    pub r_ps: C64,
}

impl FresnelPair {
    /// Emissivities of the two incident channels:
    /// `e_s = 1 - |r_ss|^2 - |r_ps|^2`, `e_p = 1 - |r_pp|^2 - |r_sp|^2`.
    pub fn emissivities(&self) -> (f64, f64) {
        (
            1.0 - self.r_ss.norm_sqr() - self.r_ps.norm_sqr(),
            1.0 - self.r_pp.norm_sqr() - self.r_sp.norm_sqr(),
        )
    }
}

/// Standard half-space Fresnel coefficients; `omega` in rad/s, `k_perp` in
/// rad/m with `0 <= k_perp < omega/c`.
pub fn fresnel_isotropic(eps: C64, mu: C64, omega: f64, k_perp: f64) -> FresnelPair {
    let k0 = omega / C_LIGHT;
    let kz1 = C64::new((k0 * k0 - k_perp * k_perp).max(0.0).sqrt(), 0.0);
    let kz2 = branch_im_pos(eps * mu * k0 * k0 - k_perp * k_perp);
    let zero = C64::new(0.0, 0.0);
    FresnelPair {
        r_ss: (mu * kz1 - kz2) / (mu * kz1 + kz2),
        r_pp: (eps * kz1 - kz2) / (eps * kz1 + kz2),
        r_sp: zero,
        r_ps: zero,
    }
}

/// Emitted power per area of a half-space, with its M/N split.
#[derive(Debug, Clone, Copy)]
pub struct PlateEmissivity {
    /// W/m², perpendicular (M) share.
    pub s_m: f64,
    /// W/m², parallel (N) share.
    pub s_n: f64,
    /// W/m², total = s_m + s_n.
    pub s_total: f64,
    /// Degree of polarization `(s_n - s_m)/(s_n + s_m)`.
    pub i_plate: f64,
    /// Relative change of the last frequency-grid refinement.
    pub achieved_tolerance: f64,
}

#[derive(Debug, Clone, Copy)]
pub struct PlateOptions {
    /// Relative tolerance of the frequency quadrature.
    pub tolerance: f64,
    /// Allow analytic models to be stretched beyond their fitted window.
    pub allow_extrapolation: bool,
}

impl Default for PlateOptions {
    fn default() -> Self {
        Self {
            tolerance: 1.0e-6,
            allow_extrapolation: false,
        }
    }
}

/// Which M/N decomposition of the plate emission to use.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Split {
    /// Channel-weighted: M gets `e_s cos^2 phi + e_p sin^2 phi`.
    ChannelWeighted,
    /// Coherent polarimetric projection onto the optic-axis direction.
    Coherent,
}

/// Plate emissivity with the channel-weighted M/N split (see module docs).
pub fn plate_emissivity(
    material: &MaterialSpec,
    t_kelvin: f64,
    opts: &PlateOptions,
) -> Result<PlateEmissivity> {
    emissivity_impl(material, t_kelvin, opts, Split::ChannelWeighted)
}

/// Plate emissivity with the coherent polarimetric M/N split: the emitted
/// intensity is projected onto the field direction aligned with the optic
/// axis (N) and its orthogonal complement (M) per plane wave.
pub fn plate_emissivity_coherent(
    material: &MaterialSpec,
    t_kelvin: f64,
    opts: &PlateOptions,
) -> Result<PlateEmissivity> {
    emissivity_impl(material, t_kelvin, opts, Split::Coherent)
}

/// The M/N-resolved angular sum at one frequency; returns the two
/// dimensionless integrals `int dtheta sin cos int dphi p_{M,N} / (2 pi)`
/// scaled so that a blackbody gives (1/2, 1/2).
fn angular_sums(
    eps_r: C64,
    eps_z: C64,
    mu: C64,
    omega: f64,
    split: Split,
    theta_rule: &[(f64, f64)],
    n_phi: usize,
) -> (f64, f64) {
    let isotropic = (eps_r - eps_z).norm() <= 1e-14 * eps_r.norm();
    let k0 = omega / C_LIGHT;
    let mut acc_m = 0.0;
    let mut acc_n = 0.0;
    for &(theta, w) in theta_rule {
        let (sin_t, cos_t) = theta.sin_cos();
        let k_perp = k0 * sin_t;
        let jac = 2.0 * w * sin_t * cos_t; // normalized: int 2 sin cos dtheta = 1
        if isotropic && split == Split::ChannelWeighted {
            let (e_s, e_p) = fresnel_isotropic(eps_r, mu, omega, k_perp).emissivities();
            // Azimuthal averages of cos^2/sin^2 are both 1/2.
            let half = 0.25 * (e_s + e_p);
            acc_m += jac * half;
            acc_n += jac * half;
            continue;
        }
        let mut phi_m = 0.0;
        let mut phi_n = 0.0;
        for ip in 0..n_phi {
            let phi = 2.0 * std::f64::consts::PI * (ip as f64) / (n_phi as f64);
            let r = fresnel_uniaxial(eps_r, eps_z, mu, omega, k_perp, phi);
            let (p_m, p_n) = match split {
                Split::ChannelWeighted => {
                    let (e_s, e_p) = r.emissivities();
                    let (c2, s2) = (phi.cos().powi(2), phi.sin().powi(2));
                    (e_s * c2 + e_p * s2, e_s * s2 + e_p * c2)
                }
                Split::Coherent => coherent_split(&r, theta, phi),
            };
            phi_m += p_m;
            phi_n += p_n;
        }
        acc_m += jac * 0.5 * phi_m / (n_phi as f64);
        acc_n += jac * 0.5 * phi_n / (n_phi as f64);
    }
    (acc_m, acc_n)
}

/// Coherent split: W = 1 - R R^dagger is the per-plane-wave emitted
/// coherency matrix in the (s, p) basis; project it onto the unit
/// polarization vector whose electric field lies along the optic axis
/// (x-direction), which for propagation direction (theta, phi) has s/p
/// components (a, b) below.  N gets the projection, M the remainder.
fn coherent_split(r: &FresnelPair, theta: f64, phi: f64) -> (f64, f64) {
    let w_ss = 1.0 - r.r_ss.norm_sqr() - r.r_sp.norm_sqr();
    let w_pp = 1.0 - r.r_pp.norm_sqr() - r.r_ps.norm_sqr();
    let w_sp = -(r.r_ss * r.r_ps.conj() + r.r_sp * r.r_pp.conj());
    let den = 1.0 - (theta.sin() * phi.cos()).powi(2);
    if den < 1e-14 {
        // Grazing propagation along the optic axis: no transverse field
        // component can point along x; everything is M.
        return (w_ss + w_pp, 0.0);
    }
    let a = phi.sin() / den.sqrt();
    let b = -theta.cos() * phi.cos() / den.sqrt();
    let p_n = w_ss * a * a + w_pp * b * b + 2.0 * w_sp.re * a * b;
    ((w_ss + w_pp - p_n).max(0.0), p_n.max(0.0))
}

fn emissivity_impl(
    material: &MaterialSpec,
    t_kelvin: f64,
    opts: &PlateOptions,
    split: Split,
) -> Result<PlateEmissivity> {
    if !(t_kelvin > 0.0) {
        return Err(PlateError::Domain(format!(
            "temperature must be positive, got {t_kelvin}"
        )));
    }
    let kb_t = materials::consts::KB_EV * t_kelvin;
    // Thermal band in scaled photon energy x = E/(kB T), clamped to the
    // material's usable window.
    let (mut e_lo, mut e_hi) = (0.02 * kb_t, 40.0 * kb_t);
    if let Some((lo, hi)) = material.usable_window(opts.allow_extrapolation) {
        e_lo = e_lo.max(lo);
        e_hi = e_hi.min(hi);
        if !(e_hi > e_lo) || e_hi < 2.0 * kb_t {
            return Err(PlateError::WindowMismatch {
                lo,
                hi,
                t_kelvin,
            });
        }
    }
    let theta_rule = gauss_theta_rule(64);
    let n_phi = 64;
    let spectral = |e_ev: f64| -> Result<(f64, f64)> {
        let eps_r = material.eps_radial(e_ev, opts.allow_extrapolation)?;
        let eps_z = material.eps_axial(e_ev, opts.allow_extrapolation)?;
        let mu = C64::new(material.mu, 0.0);
        let omega = e_ev / HBAR_EVS;
        let (am, an) = angular_sums(eps_r, eps_z, mu, omega, split, &theta_rule, n_phi);
        // dS_P/domega = (hbar omega^3 n_B)/(4 pi^2 c^2) * (angular sum)_P,
        // where each angular sum is 1/2 for a blackbody (total sigma T^4).
        let pref = HBAR_SI * omega.powi(3) * bose_occupation(e_ev, t_kelvin)
            / (4.0 * std::f64::consts::PI.powi(2) * C_LIGHT * C_LIGHT);
        Ok((pref * am, pref * an))
    };
    // Log-spaced trapezoid in E with doubling until the total stabilizes.
    let (u_lo, u_hi) = (e_lo.ln(), e_hi.ln());
    let eval_grid = |n: usize| -> Result<(f64, f64)> {
        let pts: Vec<f64> = (0..n)
            .map(|i| (u_lo + (u_hi - u_lo) * i as f64 / (n - 1) as f64).exp())
            .collect();
        let vals: std::result::Result<Vec<(f64, f64)>, PlateError> =
            pts.par_iter().map(|&e| spectral(e)).collect();
        let vals = vals?;
        let h = (u_hi - u_lo) / (n - 1) as f64;
        let mut s_m = 0.0;
        let mut s_n = 0.0;
        for (i, (m, nn)) in vals.iter().enumerate() {
            // Integrating over u = ln E: domega = (E/hbar) du.
            let w = if i == 0 || i == n - 1 { 0.5 } else { 1.0 };
            let jac = pts[i] / HBAR_EVS;
            s_m += w * h * jac * m;
            s_n += w * h * jac * nn;
        }
        Ok((s_m, s_n))
    };
    let mut n = 129;
    let (mut s_m, mut s_n) = eval_grid(n)?;
    let mut achieved = f64::INFINITY;
    for _ in 0..5 {
        n = 2 * n - 1;
        let (m2, n2) = eval_grid(n)?;
        let total = (m2 + n2).abs().max(1e-300);
        achieved = ((m2 - s_m).abs() + (n2 - s_n).abs()) / total;
        s_m = m2;
        s_n = n2;
        if achieved <= opts.tolerance {
            break;
        }
    }
    if achieved > opts.tolerance {
        return Err(PlateError::NonConvergence {
            requested: opts.tolerance,
            achieved,
        });
    }
    let s_total = s_m + s_n;
    Ok(PlateEmissivity {
        s_m,
        s_n,
        s_total,
        i_plate: (s_n - s_m) / s_total,
        achieved_tolerance: achieved,
    })
}

/// Gauss–Legendre rule on `theta in [0, pi/2]`.
fn gauss_theta_rule(n: usize) -> Vec<(f64, f64)> {
    let gl = gauss_quad::GaussLegendre::new(n).expect("valid Gauss-Legendre degree");
    let half_pi = 0.5 * std::f64::consts::PI;
    gl.nodes()
        .zip(gl.weights())
        .map(|(&x, &w)| (0.5 * (x + 1.0) * half_pi, 0.5 * half_pi * w))
        .collect()
}

#[cfg(test)]
mod tests;
