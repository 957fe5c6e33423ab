//! Internal algorithm kernels.  Everything here assumes the order is
//! non-negative; parity folding happens in the public wrappers.

use crate::{Result, SpecFunError};
use num_complex::Complex64 as C64;
use std::f64::consts::PI;

const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;
/// Rescale threshold used inside recurrences to stay far from overflow.
const BIG: f64 = 1.0e250;
/// Hard overflow marker for Hankel upward recurrences.
const HUGE: f64 = 1.0e290;

/// Overflow-safe complex division.  The stock `Complex64` division squares
/// the denominator norm and silently overflows/underflows for magnitudes
/// beyond ~1e154; this variant rescales the denominator first.
pub fn safe_div(a: C64, b: C64) -> C64 {
    let s = b.re.abs().max(b.im.abs());
    if s == 0.0 {
        return C64::new(f64::NAN, f64::NAN);
    }
    let br = b.re / s;
    let bi = b.im / s;
    let d = br * br + bi * bi; // in [1, 2]
    let re = (a.re * br + a.im * bi) / d;
    let im = (a.im * br - a.re * bi) / d;
    C64::new(re / s, im / s)
}

fn zero() -> C64 {
    C64::new(0.0, 0.0)
}
fn one() -> C64 {
    C64::new(1.0, 0.0)
}
fn i() -> C64 {
    C64::new(0.0, 1.0)
}

/// Ascending power series for `J_n(z)`; accurate for `|z| <= 12` (the
/// alternating-series cancellation there costs at most ~5 digits).
pub(crate) fn j_series(n: usize, z: C64) -> C64 {
    // leading factor (z/2)^n / n!
    let half = 0.5 * z;
    let mut lead = one();
    for k in 1..=n {
        lead *= half / (k as f64);
        if lead.norm() == 0.0 {
            return zero(); // underflow: J_n is indistinguishable from 0
        }
    }
    let w = -half * half; // -(z/2)^2
    let mut term = one();
    let mut sum = one();
    for k in 1..400 {
        term *= w / ((k * (n + k)) as f64);
        sum += term;
        if term.norm() < 1.0e-18 * sum.norm().max(1.0e-280) {
            break;
        }
    }
    lead * sum
}

/// `J_0(z) .. J_nmax(z)` by backward (Miller) recurrence with the
/// `J_0 + 2 sum J_{2k} = 1` normalization; start order chosen adaptively.
pub fn bessel_j_array(nmax: usize, z: C64) -> Result<Vec<C64>> {
    if z.norm() == 0.0 {
        let mut out = vec![zero(); nmax + 1];
        out[0] = one();
        return Ok(out);
    }
    if z.norm() <= 12.0 {
        return Ok((0..=nmax).map(|n| j_series(n, z)).collect());
    }
    let mut extra = 22 + (2.5 * z.norm().sqrt()) as usize;
    let mut prev = miller_pass(nmax, z, extra);
    for _ in 0..8 {
        extra += extra / 2 + 12;
        let next = miller_pass(nmax, z, extra);
        let scale = next
            .iter()
            .fold(0.0_f64, |m, v| m.max(v.norm()))
            .max(1.0e-280);
        // The absolute floor (1e-14 * scale) must sit above the recurrence
        // rounding noise (~1e-16 * scale after hundreds of steps), otherwise
        // entries near a zero of J_n can never satisfy the check.
        let ok = prev
            .iter()
            .zip(next.iter())
            .all(|(a, b)| (a - b).norm() <= 1.0e-12 * (b.norm() + 1.0e-2 * scale));
        if ok {
            return Ok(next);
        }
        prev = next;
    }
    Err(SpecFunError::NoConvergence(
        "Miller recurrence failed to stabilize".into(),
    ))
}

fn miller_pass(nmax: usize, z: C64, extra: usize) -> Vec<C64> {
    let start = nmax.max(z.norm().ceil() as usize) + extra;
    let inv_z = one() / z;
    // Normalization: sum_n w^n J_n over all integers equals exp((z/2)(w - 1/w)).
    // With w = -i (for Im z >= 0) the target is exp(-iz), whose magnitude
    // exp(Im z) matches the size of the individual J_n — no cancellation.
    // With w = +i (Im z < 0) the target is exp(iz), likewise.
    // Pairing n and -n gives  N = J_0 + 2 * sum_{n>=1} w^n J_n.
    let w = if z.im >= 0.0 { -i() } else { i() };
    let target = if z.im >= 0.0 {
        (-i() * z).exp()
    } else {
        (i() * z).exp()
    };
    let mut fp = zero(); // order start+1
    let mut f = C64::new(1.0e-30, 0.0); // order start
    let mut out = vec![zero(); nmax + 1];
    let mut wsum = zero(); // sum of w^n J_n over visited n >= 1
    let mut wpow = w.powu(start as u32);
    if start <= nmax {
        out[start] = f;
    }
    if start > 0 {
        wsum += wpow * f;
    }
    for k in (1..=start).rev() {
        let fm = 2.0 * (k as f64) * inv_z * f - fp;
        fp = f;
        f = fm;
        wpow *= one() / w; // w^{-1} = conj(w) for w = ±i
        let ord = k - 1;
        if ord <= nmax {
            out[ord] = f;
        }
        if ord > 0 {
            wsum += wpow * f;
        }
        if f.norm() > BIG {
            let s = 1.0 / BIG;
            f *= s;
            fp *= s;
            wsum *= s;
            out.iter_mut().for_each(|v| *v *= s);
        }
    }
    // f now holds the unnormalized J_0; rescale so the weighted sum hits the
    // target.  Magnitudes here can exceed the naive-division range.
    let factor = safe_div(target, f + 2.0 * wsum);
    out.iter_mut().for_each(|v| *v = *v * factor);
    out
}

/// Lentz continued fraction for the ratio `J_{n+1}(z)/J_n(z)`.
pub(crate) fn j_ratio_cf(n: usize, z: C64) -> Result<C64> {
    // J_{n+1}/J_n = 1/(2(n+1)/z - 1/(2(n+2)/z - ...))
    //
    // `tiny` placeholder kept well above the range where the naive complex
    // division (which squares the denominator norm) underflows.
    let tiny = C64::new(1.0e-100, 0.0);
    let mut f = tiny;
    let mut c = f;
    let mut d = zero();
    for k in 1..100_000 {
        let b = 2.0 * ((n + k) as f64) / z;
        let a = if k == 1 { one() } else { -one() };
        d = b + a * d;
        if d.norm() < 1.0e-100 {
            d = tiny;
        }
        c = b + a / c;
        if c.norm() < 1.0e-100 {
            c = tiny;
        }
        d = one() / d;
        let delta = c * d;
        f *= delta;
        if (delta - one()).norm() < 1.0e-15 {
            return Ok(f);
        }
    }
    Err(SpecFunError::NoConvergence(
        "continued fraction for J_{n+1}/J_n".into(),
    ))
}

/// Ratios `J'_n(z)/J_n(z)` for all orders `0..=nmax`: one continued fraction
/// at the top order, then the stable downward ratio recurrence.
pub fn log_derivative_j_array(nmax: usize, z: C64) -> Result<Vec<C64>> {
    if z.norm() == 0.0 {
        return Err(SpecFunError::Domain(
            "log-derivative requires z != 0".into(),
        ));
    }
    let mut ratios = vec![zero(); nmax + 1]; // ratios[n] = J_{n+1}/J_n
    ratios[nmax] = j_ratio_cf(nmax, z)?;
    for n in (1..=nmax).rev() {
        // J_n/J_{n-1} = 1/(2n/z - J_{n+1}/J_n)
        let denom = 2.0 * (n as f64) / z - ratios[n];
        ratios[n - 1] = one() / denom;
    }
    Ok((0..=nmax)
        .map(|n| C64::new(n as f64, 0.0) / z - ratios[n])
        .collect())
}

/// `H^(1)_0(z) .. H^(1)_nmax(z)` with a valid-prefix length: orders at and
/// beyond `valid_len` overflowed during the upward recurrence (their exact
/// values are astronomically large; the matching `J_n` underflow makes every
/// consumer ratio negligible).
#[derive(Debug, Clone)]
pub struct HankelSeq {
    pub values: Vec<C64>,
    pub valid_len: usize,
}

pub fn hankel1_seq(nmax: usize, z: C64) -> Result<HankelSeq> {
    if z.norm() == 0.0 {
        return Err(SpecFunError::Domain(
            "H^(1)_n is singular at z = 0".into(),
        ));
    }
    if z.im > 3.0 {
        // K-route: H^(1)_n(z) = (2/pi) (-i)^{n+1} K_n(-i z); stable for any
        // Re z because K_n is single-signed and grows with n.
        let w = -i() * z;
        let ks = k_seq(nmax, w)?;
        let mut values = Vec::with_capacity(nmax + 1);
        let mut phase = -i() * (2.0 / PI); // (2/pi)(-i)^{0+1}
        for item in ks.values.iter().take(ks.valid_len) {
            values.push(phase * item);
            phase *= -i();
        }
        let valid_len = values.len();
        values.resize(nmax + 1, zero());
        return Ok(HankelSeq { values, valid_len });
    }
    if z.im < -3.0 {
        // H^(1)_n(z) = 2 J_n(z) - H^(2)_n(z), and H^(2)_n(z) = conj(H^(1)_n(z*))
        // for real order.  In this half-plane H^(1) is the exponentially large
        // combination, so no cancellation occurs.
        let j = bessel_j_array(nmax, z)?;
        let h1c = hankel1_seq(nmax, z.conj())?;
        let mut values = Vec::with_capacity(nmax + 1);
        for n in 0..h1c.valid_len.min(nmax + 1) {
            values.push(2.0 * j[n] - h1c.values[n].conj());
        }
        let valid_len = values.len();
        values.resize(nmax + 1, zero());
        return Ok(HankelSeq { values, valid_len });
    }
    if z.re < 0.0 {
        // |Im z| <= 3, Re z < 0: reflect to w = -z (Re w > 0).  For Im z >= 0,
        // H^(1)_n(z) = (-1)^n (H^(1)_n(w) - 2 J_n(w)); for Im z < 0,
        // H^(1)_n(z) = (-1)^n (H^(1)_n(w) + 2 J_n(w)).  The cancellation in the
        // first branch is bounded by exp(2*|Im z|) <= e^6.
        let w = -z;
        let j = bessel_j_array(nmax, w)?;
        let h = hankel1_seq(nmax, w)?;
        let sgn_j = if z.im >= 0.0 { -2.0 } else { 2.0 };
        let mut values = Vec::with_capacity(nmax + 1);
        let mut par = 1.0;
        for n in 0..h.valid_len.min(nmax + 1) {
            values.push(par * (h.values[n] + sgn_j * j[n]));
            par = -par;
        }
        let valid_len = values.len();
        values.resize(nmax + 1, zero());
        return Ok(HankelSeq { values, valid_len });
    }
    // Re z >= 0, |Im z| <= 3: assemble H = J + iY near the real axis.  The
    // series/asymptotic crossover sits at |z| = 15 where both routes hold
    // ~1e-10 accuracy (the series loses digits to alternating cancellation,
    // the asymptotic tail bottoms out near exp(-2|z|)).
    let (h0, h1) = if z.norm() <= 15.0 {
        let j0 = j_series(0, z);
        let j1 = j_series(1, z);
        let y0 = y_series(0, z, j0);
        let y1 = y_series(1, z, j1);
        (j0 + i() * y0, j1 + i() * y1)
    } else {
        (hankel1_asymptotic(0, z)?, hankel1_asymptotic(1, z)?)
    };
    let mut values = vec![zero(); nmax + 1];
    values[0] = h0;
    let mut valid_len = nmax + 1;
    if nmax >= 1 {
        values[1] = h1;
    }
    let inv_z = one() / z;
    for n in 1..nmax {
        let next = 2.0 * (n as f64) * inv_z * values[n] - values[n - 1];
        if next.norm() > HUGE || !next.re.is_finite() || !next.im.is_finite() {
            valid_len = n + 1;
            break;
        }
        values[n + 1] = next;
    }
    Ok(HankelSeq { values, valid_len })
}

/// `Y_n(z)` for small orders (used at n = 0, 1) via the digamma series,
/// valid for `|z| <= 15`, any phase with `Re z >= 0`.
fn y_series(n: usize, z: C64, jn: C64) -> C64 {
    let half = 0.5 * z;
    let lnz = half.ln(); // principal branch; Re z >= 0 keeps us off the cut
    let mut out = (2.0 / PI) * lnz * jn;
    // finite sum: -(1/pi) sum_{k=0}^{n-1} (n-k-1)!/k! (z/2)^{2k-n}
    if n > 0 {
        let mut fact = (1..n).product::<usize>() as f64; // (n-1)!/0!
        let mut pw = half.powi(-(n as i32));
        let w = half * half;
        let mut fin = zero();
        for k in 0..n {
            fin += fact * pw;
            pw *= w;
            if k + 1 < n {
                // (n-k-1)!/k! -> (n-k-2)!/(k+1)!
                fact /= ((n - k - 1) * (k + 1)) as f64;
            }
        }
        out -= fin / PI;
    }
    // infinite sum: -(1/pi) sum_k (-1)^k (H_k + H_{n+k} - 2*gamma)
    //               (z/2)^{2k+n} / (k! (n+k)!)
    let w = half * half;
    let mut lead = half.powu(n as u32);
    for k in 1..=n {
        lead /= k as f64;
    }
    let mut term = lead; // (z/2)^n / n! at k = 0
    let mut hk = 0.0; // H_0
    let mut hnk: f64 = (1..=n).map(|m| 1.0 / m as f64).sum(); // H_n
    let mut sum = term * (hk + hnk - 2.0 * EULER_GAMMA);
    let mut sign = 1.0;
    for k in 1..400 {
        term *= w / ((k * (n + k)) as f64);
        sign = -sign;
        hk += 1.0 / k as f64;
        hnk += 1.0 / (n + k) as f64;
        let add = sign * term * (hk + hnk - 2.0 * EULER_GAMMA);
        sum += add;
        if add.norm() < 1.0e-18 * sum.norm().max(1.0e-280) {
            break;
        }
    }
    out - sum / PI
}

/// Large-argument (Hankel) asymptotic expansion of `H^(1)_n(z)`,
/// used for `|z| > 12` near the real axis (n = 0, 1 only).
fn hankel1_asymptotic(n: usize, z: C64) -> Result<C64> {
    let mu = 4.0 * (n as f64) * (n as f64);
    let mut term = one();
    let mut sum = term;
    let mut prev_mag = f64::INFINITY;
    let mut tail = f64::INFINITY;
    for k in 1..=60 {
        let kk = (2 * k - 1) as f64;
        term *= i() * (mu - kk * kk) / (8.0 * k as f64) / z;
        let mag = term.norm();
        if mag >= prev_mag {
            break; // divergent tail reached: stop at the smallest term
        }
        sum += term;
        prev_mag = mag;
        tail = mag / sum.norm().max(1.0e-280);
        if tail < 1.0e-17 {
            break;
        }
    }
    if tail > 1.0e-10 {
        return Err(SpecFunError::NoConvergence(
            "Hankel asymptotic series insufficient at this argument".into(),
        ));
    }
    let omega = z - C64::new((n as f64) * PI / 2.0 + PI / 4.0, 0.0);
    let pref = (C64::new(2.0 / PI, 0.0) / z).sqrt() * (i() * omega).exp();
    Ok(pref * sum)
}

/// `K_0(w) .. K_nmax(w)` for `Re w > 0`, with valid-prefix semantics like
/// `HankelSeq` (K grows with order and can overflow at small `|w|`).
struct KSeq {
    values: Vec<C64>,
    valid_len: usize,
}

fn k_seq(nmax: usize, w: C64) -> Result<KSeq> {
    let (k0, k1) = if w.norm() > 12.0 {
        (k_asymptotic(0, w)?, k_asymptotic(1, w)?)
    } else {
        k01_cf(w)?
    };
    let mut values = vec![zero(); nmax + 1];
    values[0] = k0;
    let mut valid_len = nmax + 1;
    if nmax >= 1 {
        values[1] = k1;
    }
    let inv_w = one() / w;
    for n in 1..nmax {
        let next = values[n - 1] + 2.0 * (n as f64) * inv_w * values[n];
        if next.norm() > HUGE || !next.re.is_finite() || !next.im.is_finite() {
            valid_len = n + 1;
            break;
        }
        values[n + 1] = next;
    }
    Ok(KSeq { values, valid_len })
}

/// Large-argument asymptotic expansion of `K_n(w)` (n = 0, 1).
fn k_asymptotic(n: usize, w: C64) -> Result<C64> {
    let mu = 4.0 * (n as f64) * (n as f64);
    let mut term = one();
    let mut sum = term;
    let mut prev_mag = f64::INFINITY;
    let mut tail = f64::INFINITY;
    for k in 1..=60 {
        let kk = (2 * k - 1) as f64;
        term *= (mu - kk * kk) / (8.0 * k as f64) / w;
        let mag = term.norm();
        if mag >= prev_mag {
            break;
        }
        sum += term;
        prev_mag = mag;
        tail = mag / sum.norm().max(1.0e-280);
        if tail < 1.0e-17 {
            break;
        }
    }
    if tail > 1.0e-10 {
        return Err(SpecFunError::NoConvergence(
            "K asymptotic series insufficient at this argument".into(),
        ));
    }
    let pref = (C64::new(PI / 2.0, 0.0) / w).sqrt() * (-w).exp();
    Ok(pref * sum)
}

/// Temme/Thompson-Barnett continued fraction (CF2) for `K_0(w)`, `K_1(w)`,
/// valid for `Re w > ~2` (callers only reach this with `Re w > 3`).
fn k01_cf(w: C64) -> Result<(C64, C64)> {
    let a1 = C64::new(0.25, 0.0); // 1/4 - mu^2 with mu = 0
    let mut b = 2.0 * (one() + w);
    let mut d = one() / b;
    let mut h = d;
    let mut delh = d;
    let mut q1 = zero();
    let mut q2 = one();
    let mut a = -a1;
    let mut c = a1;
    let mut q = c;
    let mut s = one() + q * delh;
    let mut converged = false;
    for it in 2..100_000 {
        a -= C64::new(2.0 * (it as f64 - 1.0), 0.0);
        c = -a * c / (it as f64);
        let qnew = (q1 - b * q2) / a;
        q1 = q2;
        q2 = qnew;
        q += c * qnew;
        b += C64::new(2.0, 0.0);
        d = one() / (b + a * d);
        delh = (b * d - one()) * delh;
        h += delh;
        let dels = q * delh;
        s += dels;
        if dels.norm() < 1.0e-16 * s.norm() {
            converged = true;
            break;
        }
    }
    if !converged {
        return Err(SpecFunError::NoConvergence(
            "CF2 for K_0/K_1".into(),
        ));
    }
    h = a1 * h;
    let k0 = (C64::new(PI / 2.0, 0.0) / w).sqrt() * (-w).exp() / s;
    let k1 = k0 * (w + C64::new(0.5, 0.0) - h) / w;
    Ok((k0, k1))
}
