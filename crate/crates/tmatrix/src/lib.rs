//! The 2×2 polarization-coupled T-matrix of an infinite cylinder made of a
//! uniaxial (or isotropic) medium whose optic axis coincides with the
//! cylinder axis, evaluated per multipole order `n` and axial wavenumber
//! `k_z`.  Includes:
//!
//! * the closed-form block ([`t_block_uniaxial`], batched in
//!   [`t_block_sequence`]),
//! * an independent boundary-value solver ([`t_block_oracle`]) that matches
//!   interior/exterior fields on the cylinder surface with a pivoted 4×4
//!   solve — used to validate the closed forms,
//! * the small-radius dielectric expansion ([`t_small_r`]) and the conductor
//!   limit of the dominant element ([`t_conductor_limit`]).
//!
//! Polarization labels: `M` is the TE-like mode (electric field transverse to
//! the cylinder axis), `N` the TM-like mode.  All Bessel ratios at complex
//! interior arguments go through overflow-safe logarithmic derivatives.

use materials::consts::C_LIGHT;
use num_complex::Complex64 as C64;

mod oracle;
pub use oracle::t_block_oracle;

#[derive(Debug, Clone, thiserror::Error)]
pub enum TMatrixError {
    #[error(transparent)]
    SpecFun(#[from] specfun::SpecFunError),
    #[error("invalid mode: {0}")]
    Domain(String),
    #[error("degenerate evaluation point: {0}")]
    Degenerate(String),
    #[error("boundary-value matrix numerically singular (condition estimate {cond:.3e})")]
    Singular { cond: f64 },
}

pub type Result<T> = std::result::Result<T, TMatrixError>;

/// One scattering channel of the cylinder.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModeIndex {
    /// Multipole order.
    pub n: i32,
    /// Axial wavenumber, rad/m.
    pub k_z: f64,
    /// Angular frequency, rad/s.
    pub omega: f64,
}

impl ModeIndex {
    pub fn new(n: i32, k_z: f64, omega: f64) -> Self {
        Self { n, k_z, omega }
    }

    /// Vacuum wavenumber `k = omega/c`, rad/m.
    pub fn k(&self) -> f64 {
        self.omega / C_LIGHT
    }

    /// Dimensionless axial wavenumber `k_z/k`.
    pub fn k_tilde(&self) -> f64 {
        self.k_z / self.k()
    }
}

/// Principal square root folded onto the branch with `Im >= 0`
/// (and `Re >= 0` on the real axis), so interior waves decay.
pub fn branch_im_pos(z: C64) -> C64 {
    let s = z.sqrt();
    if s.im < 0.0 || (s.im == 0.0 && s.re < 0.0) {
        -s
    } else {
        s
    }
}

/// Transverse wavevector components at fixed `(omega, k_z)`.
#[derive(Debug, Clone, Copy)]
pub struct WaveVectors {
    /// Exterior: `sqrt(k^2 - k_z^2)`, real and >= 0 in the propagating sector.
    pub q: C64,
    /// Interior ordinary: `sqrt(eps_r mu k^2 - k_z^2)`, `Im >= 0` branch.
    pub q_m: C64,
    /// Interior extraordinary: `sqrt(eps_z/eps_r) * q_m`.
    pub q_n: C64,
}

pub fn wavevectors(eps_r: C64, eps_z: C64, mu: C64, mode: &ModeIndex) -> WaveVectors {
    let k = mode.k();
    let q = branch_im_pos(C64::new(k * k - mode.k_z * mode.k_z, 0.0));
    let q_m = branch_im_pos(eps_r * mu * k * k - mode.k_z * mode.k_z);
    let q_n = (eps_z / eps_r).sqrt() * q_m;
    WaveVectors { q, q_m, q_n }
}

/// The four scattering amplitudes of one channel.
#[derive(Debug, Clone, Copy)]
pub struct TMatrixBlock {
    pub t_mm: C64,
    pub t_nn: C64,
    pub t_mn: C64,
    pub t_nm: C64,
    pub mode: ModeIndex,
    pub radius: f64,
}

impl TMatrixBlock {
    pub fn zero(mode: ModeIndex, radius: f64) -> Self {
        let z = C64::new(0.0, 0.0);
        Self {
            t_mm: z,
            t_nn: z,
            t_mn: z,
            t_nm: z,
            mode,
            radius,
        }
    }

    /// Per-polarization emission kernels
    /// `Xi_P = Re T^PP + |T^PP|^2 + |T^PPbar|^2`; both are <= 0 for a passive
    /// (lossy) cylinder and their negatives weight the radiation mode sum.
    ///
    /// `Re T` and `|T|^2` cancel almost exactly for strong, weakly absorbing
    /// scatterers (the result can be ~1e-8 of the individual terms for good
    /// metals), so the sum is evaluated with error-free transformations to
    /// keep it accurate relative to its own small value.
    pub fn xi(&self) -> (f64, f64) {
        let xi_m = compensated_xi(self.t_mm, self.t_mn);
        let xi_n = compensated_xi(self.t_nn, self.t_nm);
        (xi_m, xi_n)
    }

    /// Singular values of the 2×2 scattering matrix `S = 1 + 2T`; both are
    /// <= 1 for a passive cylinder.
    pub fn s_singular_values(&self) -> (f64, f64) {
        // sigma^2 are eigenvalues of S^dagger S; form W = 1 - S^dagger S
        // directly in T so weak scatterers (S near the identity) do not lose
        // the small absorption deficit to cancellation.
        let (t11, t12, t21, t22) = (self.t_mm, self.t_mn, self.t_nm, self.t_nn);
        let w11 = -4.0 * (t11.re + t11.norm_sqr() + t21.norm_sqr());
        let w22 = -4.0 * (t22.re + t22.norm_sqr() + t12.norm_sqr());
        let w12 = -2.0 * (t12 + t21.conj()) - 4.0 * (t11.conj() * t12 + t21.conj() * t22);
        let mid = 0.5 * (w11 + w22);
        let disc = (0.25 * (w11 - w22).powi(2) + w12.norm_sqr()).sqrt();
        let l_max = mid + disc;
        let l_min = mid - disc;
        ((1.0 - l_min).max(0.0).sqrt(), (1.0 - l_max).max(0.0).sqrt())
    }
}

/// Error-free square: returns `(p, e)` with `x * x == p + e` exactly.
#[inline]
pub fn square_exact(x: f64) -> (f64, f64) {
    let p = x * x;
    (p, x.mul_add(x, -p))
}

/// Error-free sum: returns `(s, e)` with `a + b == s + e` exactly.
#[inline]
pub fn two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let bb = s - a;
    (s, (a - (s - bb)) + (b - bb))
}

/// Compensated sum of a short list of terms (exact up to one rounding of the
/// accumulated compensation).
#[inline]
pub fn compensated_sum(terms: &[f64]) -> f64 {
    let mut sum = 0.0;
    let mut comp = 0.0;
    for &t in terms {
        let (s, e) = two_sum(sum, t);
        sum = s;
        comp += e;
    }
    sum + comp
}

fn compensated_xi(t_diag: C64, t_cross: C64) -> f64 {
    let (p1, e1) = square_exact(t_diag.re);
    let (p2, e2) = square_exact(t_diag.im);
    let (p3, e3) = square_exact(t_cross.re);
    let (p4, e4) = square_exact(t_cross.im);
    compensated_sum(&[t_diag.re, p1, p2, p3, p4, e1, e2, e3, e4])
}

pub(crate) fn check_mode(mode: &ModeIndex, radius: f64) -> Result<()> {
    if !(mode.omega > 0.0) || !mode.omega.is_finite() {
        return Err(TMatrixError::Domain(format!(
            "omega must be positive and finite, got {}",
            mode.omega
        )));
    }
    if !(radius > 0.0) || !radius.is_finite() {
        return Err(TMatrixError::Domain(format!(
            "radius must be positive and finite, got {radius}"
        )));
    }
    let k = mode.k();
    if (mode.k_z.abs() - k).abs() < 1e-12 * k {
        return Err(TMatrixError::Degenerate(
            "k_z = ±omega/c (grazing endpoint, q = 0) is not evaluable".into(),
        ));
    }
    Ok(())
}

/// Ingredients shared by the closed form at one `(n, k_z, omega, R)`:
/// interior log-derivative ratios and exterior cylinder-function values.
struct Ingredients {
    /// `J'_n(x_N) / (x_N J_n(x_N))`.
    f_n: C64,
    /// `J'_n(x_M) / (x_M J_n(x_M))`.
    f_m: C64,
    /// `J'_n(x) / (x J_n(x))`, exterior.
    jj: C64,
    /// `H'_n(x) / (x H_n(x))`, exterior.
    hh: C64,
    /// `J_n(x) / H_n(x)`.
    j_over_h: C64,
    /// `1 / H_n(x)^2`.
    inv_h_sq: C64,
}

pub(crate) fn assemble(
    n: i32,
    k_tilde: f64,
    eps_z: C64,
    mu: C64,
    x: C64,
    radius: f64,
    wv: &WaveVectors,
    ing: &Ingredients,
) -> (C64, C64, C64) {
    let i = C64::new(0.0, 1.0);
    let sqrt_ez_mu = (eps_z * mu).sqrt();
    let d1 = ing.f_n - ing.hh / eps_z;
    let d2 = ing.f_m - ing.hh / mu;
    let d3 = ing.f_n - ing.jj / eps_z;
    let d4 = ing.f_m - ing.jj / mu;
    let kk = (n as f64) * k_tilde / (sqrt_ez_mu * radius * radius)
        * (1.0 / (wv.q_m * wv.q_m) - 1.0 / (wv.q * wv.q));
    let den = d1 * d2 - kk * kk;
    let t_mm = -ing.j_over_h * (d1 * d4 - kk * kk) / den;
    let t_nn = -ing.j_over_h * (d2 * d3 - kk * kk) / den;
    let t_mn = 2.0 * i / (std::f64::consts::PI * sqrt_ez_mu * x * x) * kk * ing.inv_h_sq / den;
    (t_mm, t_nn, t_mn)
}

/// Closed-form T-matrix block of a uniaxial cylinder.
pub fn t_block_uniaxial(
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
    // All the ratio combinations below are even in n.
    let f_n = specfun::log_derivative_j(n, x_n)? / x_n;
    let f_m = specfun::log_derivative_j(n, x_m)? / x_m;
    let jj = specfun::log_derivative_j(n, x)? / x;
    let h = specfun::hankel1(n, x)?;
    let hp = specfun::hankel1_derivative(n, x)?;
    let hh = hp / (x * h);
    let j = specfun::bessel_j(n, x)?;
    let ing = Ingredients {
        f_n,
        f_m,
        jj,
        hh,
        j_over_h: j / h,
        inv_h_sq: 1.0 / (h * h),
    };
    let (t_mm, t_nn, t_mn) = assemble(n, mode.k_tilde(), eps_z, mu, x, radius, &wv, &ing);
    finalize(t_mm, t_nn, t_mn, mode, radius)
}

pub(crate) fn finalize(t_mm: C64, t_nn: C64, t_mn: C64, mode: ModeIndex, radius: f64) -> Result<TMatrixBlock> {
    for (label, v) in [("t_mm", t_mm), ("t_nn", t_nn), ("t_mn", t_mn)] {
        if !v.re.is_finite() || !v.im.is_finite() {
            return Err(TMatrixError::Degenerate(format!(
                "{label} is non-finite (denominator underflow or resonance)"
            )));
        }
    }
    Ok(TMatrixBlock {
        t_mm,
        t_nn,
        t_mn,
        t_nm: t_mn,
        mode,
        radius,
    })
}

/// All blocks for orders `0..=nmax` at fixed `(k_z, omega, R)` in one pass:
/// one continued fraction at the top order plus downward recurrences give
/// every interior ratio, so the cost per order is O(1).  Orders whose
/// exterior Hankel value exceeds the floating-point range scatter
/// negligibly and are returned as zero blocks.
pub fn t_block_sequence(
    eps_r: C64,
    eps_z: C64,
    mu: C64,
    radius: f64,
    k_z: f64,
    omega: f64,
    nmax: usize,
) -> Result<Vec<TMatrixBlock>> {
    let mode0 = ModeIndex::new(0, k_z, omega);
    check_mode(&mode0, radius)?;
    let wv = wavevectors(eps_r, eps_z, mu, &mode0);
    let x = wv.q * radius;
    let x_m = wv.q_m * radius;
    let x_n = wv.q_n * radius;
    let logd_m = specfun::log_derivative_j_array(nmax, x_m)?;
    let logd_n = specfun::log_derivative_j_array(nmax, x_n)?;
    let logd_x = specfun::log_derivative_j_array(nmax, x)?;
    let jx = specfun::bessel_j_array(nmax, x)?;
    let hseq = specfun::hankel1_seq(nmax, x)?;
    let k_tilde = mode0.k_tilde();
    let mut out = Vec::with_capacity(nmax + 1);
    for n in 0..=nmax {
        let mode = ModeIndex::new(n as i32, k_z, omega);
        // H'_0 needs H_1, so order 0 also requires valid_len >= 2.
        if n >= hseq.valid_len || (n == 0 && hseq.valid_len < 2) {
            out.push(TMatrixBlock::zero(mode, radius));
            continue;
        }
        let h = hseq.values[n];
        // H'_n = H_{n-1} - (n/x) H_n  (H'_0 = -H_1).
        let hp = if n == 0 {
            -hseq.values[1]
        } else {
            hseq.values[n - 1] - (n as f64) / x * h
        };
        // Near the overflow boundary |H_n| approaches 1e290 and naive complex
        // division/squaring degenerates; route through scaled division.
        let one = C64::new(1.0, 0.0);
        let ing = Ingredients {
            f_n: logd_n[n] / x_n,
            f_m: logd_m[n] / x_m,
            jj: logd_x[n] / x,
            hh: specfun::safe_div(hp, x * h),
            j_over_h: specfun::safe_div(jx[n], h),
            inv_h_sq: specfun::safe_div(specfun::safe_div(one, h), h),
        };
        let (t_mm, t_nn, t_mn) = assemble(n as i32, k_tilde, eps_z, mu, x, radius, &wv, &ing);
        out.push(finalize(t_mm, t_nn, t_mn, mode, radius)?);
    }
    Ok(out)
}

/// Small-radius expansion of the isotropic-cylinder block, valid for
/// `|n| <= 1` and `R << min(delta, c/omega)`; evaluates the `O((omega R/c)^2)`
/// polynomials regardless of regime.
pub fn t_small_r(eps: C64, mu: C64, radius: f64, mode: ModeIndex) -> Result<TMatrixBlock> {
    check_mode(&mode, radius)?;
    if mode.n.abs() > 1 {
        return Err(TMatrixError::Domain(format!(
            "small-radius expansion only covers |n| <= 1, got n = {}",
            mode.n
        )));
    }
    let i = C64::new(0.0, 1.0);
    let pi = std::f64::consts::PI;
    let kt = mode.k_tilde();
    let x2 = (mode.k() * radius).powi(2);
    let (t_mm, t_nn, t_mn) = if mode.n == 0 {
        (
            -i * pi / 4.0 * (mu - 1.0) * (kt * kt - 1.0) * x2,
            -i * pi / 4.0 * (eps - 1.0) * (kt * kt - 1.0) * x2,
            C64::new(0.0, 0.0),
        )
    } else {
        let den = (eps + 1.0) * (mu + 1.0);
        let t_nn = i * pi / 4.0 * (kt * kt * (mu + 1.0) * (eps - 1.0) + (mu - 1.0) * (eps + 1.0))
            / den
            * x2;
        let t_mm = i * pi / 4.0 * (kt * kt * (mu - 1.0) * (eps + 1.0) + (mu + 1.0) * (eps - 1.0))
            / den
            * x2;
        let sgn = mode.n.signum() as f64;
        let t_mn = sgn * i * pi / 2.0 * (eps * mu - 1.0) * kt / den * x2;
        (t_mm, t_nn, t_mn)
    };
    finalize(t_mm, t_nn, t_mn, mode, radius)
}

/// Conductor-regime (`delta << R << c/omega`) limit of the dominant element
/// `T^NN` at `n = 0`.
pub fn t_conductor_limit(eps: C64, radius: f64, mode: ModeIndex) -> Result<C64> {
    check_mode(&mode, radius)?;
    let i = C64::new(0.0, 1.0);
    let pi = std::f64::consts::PI;
    let gamma_e = materials::consts::EULER_GAMMA;
    let kt = mode.k_tilde();
    let x = mode.k() * radius;
    let one_minus = 1.0 - kt * kt;
    let den = pi
        + 2.0 * i * gamma_e
        + 2.0 / (one_minus * (2.0 * i + eps.sqrt() * x))
        + 2.0 * i * (one_minus.sqrt() * x / 2.0).ln();
    Ok(-pi / den)
}

#[cfg(test)]
mod tests;
