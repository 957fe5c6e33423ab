//! Frequency-dependent complex permittivity models for the materials studied
//! by the cylinder-radiation code: Drude gold, Lorentz SiC, multi-oscillator
//! tungsten and graphite, a low-frequency two-parameter expansion, constants,
//! and tabulated optical data with linear interpolation.
//!
//! Conventions: all public frequencies are photon energies in eV; ε follows
//! the `exp(-i omega t)` sign convention, so passive media have `Im ε >= 0`.
//! Uniaxial media carry one model per tensor axis ([`MaterialSpec`]).

use num_complex::Complex64 as C64;

pub mod consts;

#[derive(Debug, Clone, thiserror::Error)]
pub enum MaterialError {
    #[error("frequency {omega_ev} eV outside the model window [{lo}, {hi}] eV")]
    OutOfWindow { omega_ev: f64, lo: f64, hi: f64 },
    #[error("frequency must be positive and finite, got {0}")]
    BadFrequency(f64),
    #[error("tabulated data parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("tabulated energies must be strictly ascending (line {line})")]
    Monotonicity { line: usize },
    #[error("tabulated Im eps must be >= 0 (line {line})")]
    NegativeIm { line: usize },
    #[error("tabulated data needs at least 2 samples, got {0}")]
    TooFewSamples(usize),
    #[error("unknown built-in material `{0}`")]
    UnknownMaterial(String),
    #[error("lossless medium: Im sqrt(eps) = 0, skin depth is infinite")]
    Lossless,
    #[error("i/o error reading tabulated data: {0}")]
    Io(String),
}

pub type Result<T> = std::result::Result<T, MaterialError>;

/// One damped oscillator of the tungsten model: strength `k0`
/// (dimensionless), resonance wavelength `lambda_s` (m), damping `delta`
/// (dimensionless).
#[derive(Debug, Clone, PartialEq)]
pub struct TungstenOscillator {
    pub k0: f64,
    pub lambda_s: f64,
    pub delta: f64,
}

/// One conduction term of the tungsten model: conductivity `sigma`
/// (Ω⁻¹·m⁻¹), relaxation wavelength `lambda_r` (m).
#[derive(Debug, Clone, PartialEq)]
pub struct TungstenConduction {
    pub sigma: f64,
    pub lambda_r: f64,
}

/// Wavelength-parameterized tungsten permittivity
/// `1 + Σ_p K_0p λ²/(λ² − λ_sp² + i δ_p λ_sp λ) − λ²/(2π c ε0) Σ_q σ_q/(λ_rq − iλ)`
/// evaluated in SI units and then conjugated: the printed parameterization
/// follows the `exp(+i omega t)` convention (it yields `Im ε < 0`), while
/// this crate uses `exp(-i omega t)` throughout.
#[derive(Debug, Clone, PartialEq)]
pub struct TungstenModel {
    pub oscillators: Vec<TungstenOscillator>,
    pub conduction: Vec<TungstenConduction>,
    /// Temperature (K) of the parameter set, informational only.
    pub temperature_tag: f64,
}

/// One oscillator of the graphite model with Gaussian-modulated damping
/// `Γ'_j = Γ_j exp[−α_j ((E − ω_tj)/Γ_j)²]`.  All energies in eV.
#[derive(Debug, Clone, PartialEq)]
pub struct GraphiteOscillator {
    pub f: f64,
    pub alpha: f64,
    pub omega_t: f64,
    pub gamma: f64,
}

/// One principal axis of the graphite dielectric tensor:
/// `ε(E) = 1 − f_0 ω_p²/(E(E + iΓ_0)) − Σ_j f_j ω_p²/((E² − ω_tj²) + i E Γ'_j)`.
#[derive(Debug, Clone, PartialEq)]
pub struct GraphiteAxisModel {
    pub omega_p: f64,
    pub gamma_0: f64,
    pub f_0: f64,
    pub oscillators: Vec<GraphiteOscillator>,
    /// Frequency range (eV) over which the parameterization was fitted.
    pub fitted_window: (f64, f64),
}

/// Tabulated optical data: strictly ascending photon energies (eV) with
/// `(Re ε, Im ε)` samples; queries interpolate linearly and never extrapolate.
#[derive(Debug, Clone, PartialEq)]
pub struct TabulatedModel {
    samples: Vec<(f64, f64, f64)>,
}

impl TabulatedModel {
    pub fn new(samples: Vec<(f64, f64, f64)>) -> Result<Self> {
        if samples.len() < 2 {
            return Err(MaterialError::TooFewSamples(samples.len()));
        }
        for (i, w) in samples.windows(2).enumerate() {
            if !(w[1].0 > w[0].0) {
                return Err(MaterialError::Monotonicity { line: i + 2 });
            }
        }
        if let Some(i) = samples.iter().position(|s| s.2 < 0.0) {
            return Err(MaterialError::NegativeIm { line: i + 1 });
        }
        if let Some(i) = samples.iter().position(|s| !(s.0 > 0.0)) {
            return Err(MaterialError::Parse {
                line: i + 1,
                msg: "photon energy must be positive".into(),
            });
        }
        Ok(Self { samples })
    }

    pub fn samples(&self) -> &[(f64, f64, f64)] {
        &self.samples
    }

    pub fn window(&self) -> (f64, f64) {
        (self.samples[0].0, self.samples[self.samples.len() - 1].0)
    }

    fn eval(&self, omega_ev: f64) -> Result<C64> {
        let (lo, hi) = self.window();
        if omega_ev < lo || omega_ev > hi {
            return Err(MaterialError::OutOfWindow {
                omega_ev,
                lo,
                hi,
            });
        }
        let idx = self
            .samples
            .partition_point(|s| s.0 <= omega_ev)
            .min(self.samples.len() - 1)
            .max(1);
        let (e0, re0, im0) = self.samples[idx - 1];
        let (e1, re1, im1) = self.samples[idx];
        let t = (omega_ev - e0) / (e1 - e0);
        Ok(C64::new(re0 + t * (re1 - re0), im0 + t * (im1 - im0)))
    }
}

/// A frequency → complex-permittivity rule.
#[derive(Debug, Clone, PartialEq)]
pub enum Dispersion {
    /// Frequency-independent ε.
    Constant { eps: C64 },
    /// `ε(E) = ε∞ − ω_p²/(E(E + i ω_τ))`, parameters in eV.
    Drude {
        eps_inf: f64,
        omega_p: f64,
        omega_tau: f64,
    },
    /// `ε(E) = ε∞ (E² − ω_LO² + iEγ)/(E² − ω_TO² + iEγ)`, parameters in eV.
    Lorentz {
        eps_inf: f64,
        omega_lo: f64,
        omega_to: f64,
        gamma: f64,
    },
    Tungsten(TungstenModel),
    GraphiteAxis(GraphiteAxisModel),
    /// Low-frequency expansion `ε(ω) = ε0 + i λ_in ω/c` with `λ_in` in m.
    LowT { eps0: f64, lambda_in: f64 },
    Tabulated(TabulatedModel),
    /// Arithmetic mean of two models (isotropic stand-in for a tensor).
    Average(Box<Dispersion>, Box<Dispersion>),
}

impl Dispersion {
    /// Validity window in eV, if the model has one.  `None` means the
    /// analytic form is trusted at any positive frequency.
    pub fn window(&self) -> Option<(f64, f64)> {
        match self {
            Dispersion::Tabulated(t) => Some(t.window()),
            Dispersion::GraphiteAxis(g) => Some(g.fitted_window),
            Dispersion::Average(a, b) => intersect(a.window(), b.window()),
            _ => None,
        }
    }

    /// ε(ω).  `allow_extrapolation` lifts the window check for analytic
    /// models; tabulated data can never be queried outside its samples.
    pub fn permittivity(&self, omega_ev: f64, allow_extrapolation: bool) -> Result<C64> {
        if !omega_ev.is_finite() || omega_ev <= 0.0 {
            return Err(MaterialError::BadFrequency(omega_ev));
        }
        if !allow_extrapolation {
            if let Some((lo, hi)) = self.window() {
                if omega_ev < lo || omega_ev > hi {
                    return Err(MaterialError::OutOfWindow {
                        omega_ev,
                        lo,
                        hi,
                    });
                }
            }
        }
        self.eval(omega_ev)
    }

    fn eval(&self, e: f64) -> Result<C64> {
        let i = C64::new(0.0, 1.0);
        Ok(match self {
            Dispersion::Constant { eps } => *eps,
            Dispersion::Drude {
                eps_inf,
                omega_p,
                omega_tau,
            } => eps_inf - omega_p * omega_p / (e * (e + i * *omega_tau)),
            Dispersion::Lorentz {
                eps_inf,
                omega_lo,
                omega_to,
                gamma,
            } => {
                *eps_inf * (e * e - omega_lo * omega_lo + i * e * *gamma)
                    / (e * e - omega_to * omega_to + i * e * *gamma)
            }
            Dispersion::Tungsten(m) => {
                let lam = consts::wavelength_m(e);
                let mut eps = C64::new(1.0, 0.0);
                for o in &m.oscillators {
                    eps += o.k0 * lam * lam
                        / (lam * lam - o.lambda_s * o.lambda_s + i * o.delta * o.lambda_s * lam);
                }
                let pref = lam * lam
                    / (2.0 * std::f64::consts::PI * consts::C_LIGHT * consts::EPS0_SI);
                for c in &m.conduction {
                    eps -= pref * c.sigma / (c.lambda_r - i * lam);
                }
                // The parameterization is written in the opposite time-phase
                // convention; conjugate so that the medium is passive here.
                eps.conj()
            }
            Dispersion::GraphiteAxis(m) => {
                let wp2 = m.omega_p * m.omega_p;
                let mut eps = C64::new(1.0, 0.0) - m.f_0 * wp2 / (e * (e + i * m.gamma_0));
                for o in &m.oscillators {
                    let gp = o.gamma * (-o.alpha * ((e - o.omega_t) / o.gamma).powi(2)).exp();
                    eps -= o.f * wp2 / (C64::new(e * e - o.omega_t * o.omega_t, 0.0) + i * e * gp);
                }
                eps
            }
            Dispersion::LowT { eps0, lambda_in } => C64::new(
                *eps0,
                lambda_in * consts::omega_rad_per_s(e) / consts::C_LIGHT,
            ),
            Dispersion::Tabulated(t) => t.eval(e)?,
            Dispersion::Average(a, b) => 0.5 * (a.eval(e)? + b.eval(e)?),
        })
    }
}

/// Window that cannot be lifted by extrapolation (tabulated sample ranges).
fn hard_window(d: &Dispersion) -> Option<(f64, f64)> {
    match d {
        Dispersion::Tabulated(t) => Some(t.window()),
        Dispersion::Average(a, b) => intersect(hard_window(a), hard_window(b)),
        _ => None,
    }
}

fn intersect(a: Option<(f64, f64)>, b: Option<(f64, f64)>) -> Option<(f64, f64)> {
    match (a, b) {
        (Some((alo, ahi)), Some((blo, bhi))) => Some((alo.max(blo), ahi.min(bhi))),
        (Some(w), None) | (None, Some(w)) => Some(w),
        (None, None) => None,
    }
}

/// Skin depth `δ = c/(Im sqrt(ε) · ω)` in meters (principal square root).
pub fn skin_depth(model: &Dispersion, omega_ev: f64, allow_extrapolation: bool) -> Result<f64> {
    let eps = model.permittivity(omega_ev, allow_extrapolation)?;
    let im = eps.sqrt().im;
    if im <= 0.0 {
        return Err(MaterialError::Lossless);
    }
    Ok(consts::C_LIGHT / (im * consts::omega_rad_per_s(omega_ev)))
}

/// Permittivity tensor of a (possibly uniaxial) medium whose optic axis is
/// the cylinder axis: `radial` is the in-plane component ε_r, `axial` the
/// on-axis component ε_z.  `mu` is a real scalar permeability.
#[derive(Debug, Clone, PartialEq)]
pub struct MaterialSpec {
    pub name: String,
    pub radial: Dispersion,
    pub axial: Dispersion,
    pub mu: f64,
    /// Wider window (eV) the model may be stretched to when extrapolation is
    /// explicitly requested; `None` means "anywhere".
    pub extended_window: Option<(f64, f64)>,
}

impl MaterialSpec {
    pub fn isotropic(name: impl Into<String>, model: Dispersion) -> Self {
        Self {
            name: name.into(),
            radial: model.clone(),
            axial: model,
            mu: 1.0,
            extended_window: None,
        }
    }

    pub fn is_isotropic(&self) -> bool {
        self.radial == self.axial
    }

    /// Strict window: intersection of the two axis windows.
    pub fn window(&self) -> Option<(f64, f64)> {
        intersect(self.radial.window(), self.axial.window())
    }

    /// Window effectively usable given the extrapolation setting.  Even with
    /// extrapolation enabled, tabulated data is bounded by its samples.
    pub fn usable_window(&self, allow_extrapolation: bool) -> Option<(f64, f64)> {
        if allow_extrapolation {
            intersect(
                self.extended_window,
                intersect(hard_window(&self.radial), hard_window(&self.axial)),
            )
        } else {
            self.window()
        }
    }

    pub fn eps_radial(&self, omega_ev: f64, allow_extrapolation: bool) -> Result<C64> {
        self.radial.permittivity(omega_ev, allow_extrapolation)
    }

    pub fn eps_axial(&self, omega_ev: f64, allow_extrapolation: bool) -> Result<C64> {
        self.axial.permittivity(omega_ev, allow_extrapolation)
    }
}

fn graphite_in_layer() -> GraphiteAxisModel {
    // ε_z: optic (c-)axis response, fitted for 2–40 eV.
    GraphiteAxisModel {
        omega_p: 19.0,
        gamma_0: 0.091,
        f_0: 0.016,
        oscillators: osc(&[
            (0.134, 24.708, 2.358, 9.806),
            (0.072, 0.524, 5.149, 472.7),
            (0.307, 0.217, 13.785, 4.651),
            (0.380, 0.518, 10.947, 1.797),
            (0.065, 0.286, 16.988, 2.418),
            (0.553, 0.248, 24.038, 21.395),
            (1.381, 15.101, 36.252, 37.025),
        ]),
        fitted_window: (2.0, 40.0),
    }
}

fn graphite_inter_layer() -> GraphiteAxisModel {
    // ε_r: in-plane response, fitted for 0.12–40 eV.
    GraphiteAxisModel {
        omega_p: 27.0,
        gamma_0: 6.365,
        f_0: 0.014,
        oscillators: osc(&[
            (0.073, 0.505, 0.275, 4.102),
            (0.056, 7.079, 3.508, 7.328),
            (0.069, 0.362, 4.451, 1.414),
            (0.005, 7.426, 13.591, 0.046),
            (0.262, 0.000382, 14.226, 1.862),
            (0.460, 1.387, 15.550, 11.922),
            (0.200, 28.963, 32.011, 39.091),
        ]),
        fitted_window: (0.12, 40.0),
    }
}

fn osc(rows: &[(f64, f64, f64, f64)]) -> Vec<GraphiteOscillator> {
    rows.iter()
        .map(|&(f, alpha, omega_t, gamma)| GraphiteOscillator {
            f,
            alpha,
            omega_t,
            gamma,
        })
        .collect()
}

fn tungsten_298() -> TungstenModel {
    let um = 1.0e-6;
    TungstenModel {
        oscillators: vec![
            TungstenOscillator {
                k0: 12.0,
                lambda_s: 1.26 * um,
                delta: 0.6,
            },
            TungstenOscillator {
                k0: 14.4,
                lambda_s: 0.6 * um,
                delta: 0.8,
            },
            TungstenOscillator {
                k0: 12.9,
                lambda_s: 0.3 * um,
                delta: 0.6,
            },
        ],
        conduction: vec![
            TungstenConduction {
                sigma: 17.5e6,
                lambda_r: 45.5 * um,
            },
            TungstenConduction {
                sigma: 0.21e6,
                lambda_r: 3.7 * um,
            },
        ],
        temperature_tag: 298.0,
    }
}

fn tungsten_2400() -> TungstenModel {
    // The high-temperature parameter set has no oscillator block.
    let um = 1.0e-6;
    TungstenModel {
        oscillators: vec![],
        conduction: vec![
            TungstenConduction {
                sigma: 1.19e6,
                lambda_r: 3.66 * um,
            },
            TungstenConduction {
                sigma: 0.25e6,
                lambda_r: 0.36 * um,
            },
        ],
        temperature_tag: 2400.0,
    }
}

/// Wider graphite window (eV) usable only with explicit extrapolation: the
/// parameterization is stretched down to thermal frequencies.
pub const GRAPHITE_EXTENDED_WINDOW: (f64, f64) = (0.004, 40.0);

/// Built-in materials: `gold-drude`, `sic`, `tungsten-298`, `tungsten-2400`,
/// `graphite-uniaxial`, `graphite-isotropic-average`.
pub fn by_name(name: &str) -> Result<MaterialSpec> {
    let spec = match name {
        "gold-drude" => MaterialSpec::isotropic(
            name,
            Dispersion::Drude {
                eps_inf: 1.0,
                omega_p: 9.03,
                omega_tau: 2.67e-2,
            },
        ),
        "sic" => MaterialSpec::isotropic(
            name,
            Dispersion::Lorentz {
                eps_inf: 6.7,
                omega_lo: 0.12,
                omega_to: 0.098,
                gamma: 5.88e-4,
            },
        ),
        "tungsten-298" => MaterialSpec::isotropic(name, Dispersion::Tungsten(tungsten_298())),
        "tungsten-2400" => MaterialSpec::isotropic(name, Dispersion::Tungsten(tungsten_2400())),
        "graphite-uniaxial" => MaterialSpec {
            name: name.into(),
            radial: Dispersion::GraphiteAxis(graphite_inter_layer()),
            axial: Dispersion::GraphiteAxis(graphite_in_layer()),
            mu: 1.0,
            extended_window: Some(GRAPHITE_EXTENDED_WINDOW),
        },
        "graphite-isotropic-average" => {
            let avg = Dispersion::Average(
                Box::new(Dispersion::GraphiteAxis(graphite_in_layer())),
                Box::new(Dispersion::GraphiteAxis(graphite_inter_layer())),
            );
            MaterialSpec {
                name: name.into(),
                radial: avg.clone(),
                axial: avg,
                mu: 1.0,
                extended_window: Some(GRAPHITE_EXTENDED_WINDOW),
            }
        }
        other => return Err(MaterialError::UnknownMaterial(other.into())),
    };
    Ok(spec)
}

/// Parse tabulated optical data: one `energy_eV re_eps im_eps` sample per
/// line, columns separated by whitespace and/or commas, `#` comments.
pub fn parse_tabulated(text: &str) -> Result<TabulatedModel> {
    let mut samples = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let content = raw.split('#').next().unwrap_or("");
        let cols: Vec<&str> = content
            .split(|c: char| c.is_whitespace() || c == ',')
            .filter(|s| !s.is_empty())
            .collect();
        if cols.is_empty() {
            continue;
        }
        if cols.len() != 3 {
            return Err(MaterialError::Parse {
                line,
                msg: format!("expected 3 columns, found {}", cols.len()),
            });
        }
        let mut vals = [0.0f64; 3];
        for (v, col) in vals.iter_mut().zip(&cols) {
            *v = col.parse().map_err(|e| MaterialError::Parse {
                line,
                msg: format!("`{col}`: {e}"),
            })?;
        }
        if let Some(last) = samples.last() {
            let &(prev, _, _): &(f64, f64, f64) = last;
            if !(vals[0] > prev) {
                return Err(MaterialError::Monotonicity { line });
            }
        }
        if vals[2] < 0.0 {
            return Err(MaterialError::NegativeIm { line });
        }
        samples.push((vals[0], vals[1], vals[2]));
    }
    TabulatedModel::new(samples)
}

/// [`parse_tabulated`] for a file on disk.
pub fn load_tabulated(path: &std::path::Path) -> Result<TabulatedModel> {
    let text =
        std::fs::read_to_string(path).map_err(|e| MaterialError::Io(format!("{path:?}: {e}")))?;
    parse_tabulated(&text)
}
