//! Complex-argument, integer-order cylinder functions: `J_n(z)`, `H^(1)_n(z)`,
//! their derivatives, and overflow-safe logarithmic-derivative (ratio) forms.
//!
//! Algorithm map:
//! * `J_n`: ascending power series for `|z| <= 12`, otherwise backward (Miller)
//!   recurrence normalized by the identity `J_0 + 2*sum_{k>=1} J_{2k} = 1`.
//! * `Y_n` / `H^(1)_n`: series with digamma terms for small `|z|`; Hankel-type
//!   large-argument asymptotics for large `|z|` near the real axis; for
//!   arguments with a large imaginary part `H^(1)_n` is routed through the
//!   modified Bessel function `K_n` (upward recurrence in `K` is stable and
//!   free of the `J + iY` cancellation), using
//!   `H^(1)_n(z) = (2/pi) (-i)^(n+1) K_n(-i z)` for `Im z > 0`.
//! * Ratios `J'_n/J_n`: Lentz continued fraction, stable far beyond the range
//!   where `J_n` itself is representable.
//!
//! All functions are pure; there is no global state.

use num_complex::Complex64 as C64;

mod algorithms;

pub use algorithms::{
    safe_div,
    bessel_j_array, hankel1_seq, log_derivative_j_array, HankelSeq,
};

/// Largest `|z|` accepted by the full-value (non-ratio) entry points.
pub const MAX_ABS_Z: f64 = 1.0e4;
/// Largest `|Im z|` accepted before `exp(Im z)` style factors overflow f64.
pub const MAX_IM_Z: f64 = 700.0;
/// Largest order accepted by the full-value entry points.
pub const MAX_ORDER: i32 = 5000;

#[derive(Debug, Clone, thiserror::Error)]
pub enum SpecFunError {
    #[error("argument outside the supported domain: {0}")]
    Domain(String),
    #[error("unscaled result would overflow the floating-point range: {0}")]
    OverflowRisk(String),
    #[error("argument is within tolerance of a zero of J_n (pole of J'_n/J_n)")]
    Pole,
    #[error("internal iteration failed to converge: {0}")]
    NoConvergence(String),
}

pub type Result<T> = std::result::Result<T, SpecFunError>;

/// The four cylinder-function values at one `(n, z)` together with the
/// recorded Wronskian consistency residual.
#[derive(Debug, Clone, Copy)]
pub struct BesselEval {
    pub order: i32,
    pub argument: C64,
    pub value_j: C64,
    pub value_jprime: C64,
    pub value_h1: C64,
    pub value_h1prime: C64,
    /// `|J*H' - J'*H - 2i/(pi z)|` relative to `|2/(pi z)|`.
    pub wronskian_residual: f64,
}

fn check_argument(z: C64) -> Result<()> {
    if !z.re.is_finite() || !z.im.is_finite() {
        return Err(SpecFunError::Domain("non-finite argument".into()));
    }
    if z.norm() > MAX_ABS_Z {
        return Err(SpecFunError::OverflowRisk(format!(
            "|z| = {:.3e} exceeds {:.1e}; use ratio forms",
            z.norm(),
            MAX_ABS_Z
        )));
    }
    if z.im.abs() > MAX_IM_Z {
        return Err(SpecFunError::OverflowRisk(format!(
            "|Im z| = {:.3e} exceeds {}; use ratio forms",
            z.im.abs(),
            MAX_IM_Z
        )));
    }
    Ok(())
}

fn check_order(n: i32) -> Result<()> {
    if n.abs() > MAX_ORDER {
        return Err(SpecFunError::Domain(format!(
            "|n| = {} exceeds the supported maximum {}",
            n.abs(),
            MAX_ORDER
        )));
    }
    Ok(())
}

/// Parity sign for negative orders: `J_{-n} = (-1)^n J_n`, same for `H^(1)`.
fn parity(n: i32) -> f64 {
    if n.rem_euclid(2) == 0 {
        1.0
    } else {
        -1.0
    }
}

/// Bessel function of the first kind `J_n(z)` for integer order.
pub fn bessel_j(n: i32, z: C64) -> Result<C64> {
    check_order(n)?;
    check_argument(z)?;
    let m = n.unsigned_abs() as usize;
    let sign = if n < 0 { parity(n) } else { 1.0 };
    if z.norm() == 0.0 {
        return Ok(C64::new(if m == 0 { sign } else { 0.0 }, 0.0));
    }
    let v = if z.norm() <= 12.0 {
        algorithms::j_series(m, z)
    } else {
        let arr = algorithms::bessel_j_array(m, z)?;
        arr[m]
    };
    Ok(sign * v)
}

/// Derivative `J'_n(z)`.
pub fn bessel_j_derivative(n: i32, z: C64) -> Result<C64> {
    check_order(n)?;
    check_argument(z)?;
    // J'_n = (J_{n-1} - J_{n+1})/2 for any integer n (parity handles n <= 0).
    let a = bessel_j(n - 1, z)?;
    let b = bessel_j(n + 1, z)?;
    Ok(0.5 * (a - b))
}

/// Hankel function of the first kind `H^(1)_n(z) = J_n(z) + i Y_n(z)`.
pub fn hankel1(n: i32, z: C64) -> Result<C64> {
    check_order(n)?;
    check_argument(z)?;
    if z.norm() == 0.0 {
        return Err(SpecFunError::Domain(
            "H^(1)_n is singular at z = 0".into(),
        ));
    }
    let m = n.unsigned_abs() as usize;
    let sign = if n < 0 { parity(n) } else { 1.0 };
    let seq = algorithms::hankel1_seq(m, z)?;
    if m >= seq.valid_len {
        return Err(SpecFunError::OverflowRisk(format!(
            "H^(1)_{}({}) exceeds the floating-point range",
            n, z
        )));
    }
    Ok(sign * seq.values[m])
}

/// Derivative `H^(1)'_n(z)`.
pub fn hankel1_derivative(n: i32, z: C64) -> Result<C64> {
    let a = hankel1(n - 1, z)?;
    let b = hankel1(n + 1, z)?;
    Ok(0.5 * (a - b))
}

/// Logarithmic derivative `J'_n(z)/J_n(z)` evaluated by a Lentz continued
/// fraction; stable where `J_n` itself overflows (`|Im z|` up to ~1e5).
pub fn log_derivative_j(n: i32, z: C64) -> Result<C64> {
    if !z.re.is_finite() || !z.im.is_finite() || z.norm() == 0.0 {
        return Err(SpecFunError::Domain(
            "log-derivative requires a finite nonzero argument".into(),
        ));
    }
    let m = n.unsigned_abs();
    let ratio = algorithms::j_ratio_cf(m as usize, z)?;
    let f = C64::new(m as f64, 0.0) / z - ratio;
    if !f.re.is_finite() || !f.im.is_finite() {
        return Err(SpecFunError::Pole);
    }
    // Near a zero z0 of J_n the value grows like 1/(z - z0); a magnitude of
    // 1e12 flags |z - z0| <~ 1e-12..1e-13.  The n/z term is excluded from the
    // flag so that legitimately large small-argument values pass through.
    let small_arg_scale = 1.0 + (m as f64) / z.norm();
    if f.norm() > 1.0e12 * small_arg_scale {
        return Err(SpecFunError::Pole);
    }
    Ok(f)
}

/// Bundle `J_n`, `J'_n`, `H^(1)_n`, `H^(1)'_n` with a consistency pass.
pub fn bessel_pair(n: i32, z: C64) -> Result<BesselEval> {
    check_order(n)?;
    check_argument(z)?;
    if z.norm() == 0.0 {
        return Err(SpecFunError::Domain(
            "H^(1)_n is singular at z = 0".into(),
        ));
    }
    let value_j = bessel_j(n, z)?;
    let value_jprime = bessel_j_derivative(n, z)?;
    let wexact = C64::new(0.0, 2.0 / std::f64::consts::PI) / z;
    let (value_h1, value_h1prime, w);
    if z.im < -3.0 {
        // In the lower half-plane H^(1)_n(z) = 2 J_n(z) - conj(H^(1)_n(zbar))
        // and the 2 J_n part dominates exponentially.  Evaluating the
        // Wronskian directly on the assembled values would cancel to noise,
        // so use W[J, 2J + s] = W[J, s] with the small part s kept separate.
        let s = -hankel1(n, z.conj())?.conj();
        let sprime = -hankel1_derivative(n, z.conj())?.conj();
        value_h1 = 2.0 * value_j + s;
        value_h1prime = 2.0 * value_jprime + sprime;
        w = value_j * sprime - value_jprime * s;
    } else {
        value_h1 = hankel1(n, z)?;
        value_h1prime = hankel1_derivative(n, z)?;
        w = value_j * value_h1prime - value_jprime * value_h1;
    }
    let wronskian_residual = (w - wexact).norm() / wexact.norm();
    Ok(BesselEval {
        order: n,
        argument: z,
        value_j,
        value_jprime,
        value_h1,
        value_h1prime,
        wronskian_residual,
    })
}
