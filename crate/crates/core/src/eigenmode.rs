//! Eigenmode mathematics for a lossy reverberant cavity.
//!
//! A cavity field inside a band is modelled as a sum of damped eigenmodes.
//! Each mode rings down as `E0 exp(-i w_n t) exp(-t / 2 tau_n)` and shows up
//! in the spectrum as a Lorentzian line of power width `1 / tau_n`. The
//! statistical channel built on top of that multiplies an exponential power
//! delay profile with a random modal sum whose coefficients are Gaussian,
//! phases uniform and eigenfrequency spacings Wigner distributed.

use std::f64::consts::{PI, TAU};

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};

/// Vacuum speed of light, m/s.
pub const SPEED_OF_LIGHT: f64 = 299_792_458.0;

/// One damped cavity eigenmode.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Mode {
    /// Angular eigenfrequency, rad/s.
    pub omega: f64,
    /// Modal coefficient.
    pub alpha: f64,
    /// Phase shift, rad, in `[0, 2pi)`.
    pub phi: f64,
    /// Energy decay time, s.
    pub tau: f64,
}

impl Mode {
    pub fn new(omega: f64, alpha: f64, phi: f64, tau: f64) -> Result<Self> {
        if !(omega > 0.0 && omega.is_finite()) {
            return Err(invalid("omega", format!("must be positive, got {omega}")));
        }
        if !(tau > 0.0 && tau.is_finite()) {
            return Err(invalid("tau", format!("must be positive, got {tau}")));
        }
        if !alpha.is_finite() || !phi.is_finite() {
            return Err(invalid("alpha/phi", "must be finite"));
        }
        Ok(Mode {
            omega,
            alpha,
            phi: wrap_phase(phi),
            tau,
        })
    }

    /// Initial complex amplitude `alpha * exp(j phi)`.
    pub fn amplitude(&self) -> Complex64 {
        Complex64::from_polar(self.alpha, self.phi)
    }
}

/// Wraps an angle into `[0, 2pi)`.
pub fn wrap_phase(phi: f64) -> f64 {
    let w = phi.rem_euclid(TAU);
    // rem_euclid can round up to exactly TAU for tiny negative inputs
    if w >= TAU {
        0.0
    } else {
        w
    }
}

/// An ordered set of modes resonating inside `[band_lo, band_hi]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "EnsembleDoc", into = "EnsembleDoc")]
pub struct EigenmodeEnsemble {
    modes: Vec<Mode>,
    band_lo: f64,
    band_hi: f64,
}

#[derive(Serialize, Deserialize)]
struct EnsembleDoc {
    band_lo: f64,
    band_hi: f64,
    n_m: usize,
    modes: Vec<Mode>,
}

impl TryFrom<EnsembleDoc> for EigenmodeEnsemble {
    type Error = Error;

    fn try_from(doc: EnsembleDoc) -> Result<Self> {
        if doc.n_m != doc.modes.len() {
            return Err(invalid(
                "n_m",
                format!("{} does not match {} modes", doc.n_m, doc.modes.len()),
            ));
        }
        let ens = EigenmodeEnsemble::new(doc.modes, doc.band_lo, doc.band_hi)?;
        Ok(ens)
    }
}

impl From<EigenmodeEnsemble> for EnsembleDoc {
    fn from(e: EigenmodeEnsemble) -> Self {
        EnsembleDoc {
            band_lo: e.band_lo,
            band_hi: e.band_hi,
            n_m: e.modes.len(),
            modes: e.modes,
        }
    }
}

impl EigenmodeEnsemble {
    /// Builds an ensemble, sorting the modes by eigenfrequency. Fails if a
    /// mode lies outside the band.
    pub fn new(mut modes: Vec<Mode>, band_lo: f64, band_hi: f64) -> Result<Self> {
        if !(band_lo < band_hi) || !band_lo.is_finite() || !band_hi.is_finite() {
            return Err(invalid(
                "band",
                format!("need band_lo < band_hi, got [{band_lo}, {band_hi}]"),
            ));
        }
        if let Some(m) = modes
            .iter()
            .find(|m| m.omega < band_lo || m.omega > band_hi)
        {
            return Err(invalid(
                "modes",
                format!("omega {} outside [{band_lo}, {band_hi}]", m.omega),
            ));
        }
        modes.sort_by(|a, b| a.omega.total_cmp(&b.omega));
        Ok(EigenmodeEnsemble {
            modes,
            band_lo,
            band_hi,
        })
    }

    /// Rebuilds the ensemble from modes that may have wandered: wraps phases,
    /// clamps eigenfrequencies into the band and re-sorts.
    pub(crate) fn with_modes_clamped(&self, mut modes: Vec<Mode>) -> Self {
        for m in &mut modes {
            m.omega = m.omega.clamp(self.band_lo, self.band_hi);
            m.phi = wrap_phase(m.phi);
        }
        modes.sort_by(|a, b| a.omega.total_cmp(&b.omega));
        EigenmodeEnsemble {
            modes,
            band_lo: self.band_lo,
            band_hi: self.band_hi,
        }
    }

    pub fn modes(&self) -> &[Mode] {
        &self.modes
    }

    pub fn band_lo(&self) -> f64 {
        self.band_lo
    }

    pub fn band_hi(&self) -> f64 {
        self.band_hi
    }

    /// Number of modes in the band.
    pub fn n_m(&self) -> usize {
        self.modes.len()
    }

    /// Mean eigenfrequency spacing implied by the band and count, rad/s.
    pub fn mean_spacing(&self) -> f64 {
        (self.band_hi - self.band_lo) / self.modes.len().max(1) as f64
    }

    /// Concatenates two ensembles over the union of their bands.
    pub fn merged(&self, other: &EigenmodeEnsemble) -> EigenmodeEnsemble {
        let mut modes = self.modes.clone();
        modes.extend_from_slice(&other.modes);
        modes.sort_by(|a, b| a.omega.total_cmp(&b.omega));
        EigenmodeEnsemble {
            modes,
            band_lo: self.band_lo.min(other.band_lo),
            band_hi: self.band_hi.max(other.band_hi),
        }
    }
}

/// Global cavity parameters shared by every mode of an ensemble.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CavityGeometry {
    /// Cavity volume, m^3.
    pub volume: f64,
    /// Average energy decay time, s.
    pub tau: f64,
    /// Power delay profile gain.
    pub a0: f64,
    /// Centre wavelength, m.
    pub lambda: f64,
}

impl CavityGeometry {
    pub fn new(volume: f64, tau: f64, a0: f64, lambda: f64) -> Result<Self> {
        for (name, v) in [("volume", volume), ("tau", tau), ("lambda", lambda)] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(invalid(name, format!("must be positive, got {v}")));
            }
        }
        if !a0.is_finite() {
            return Err(invalid("a0", "must be finite"));
        }
        Ok(CavityGeometry {
            volume,
            tau,
            a0,
            lambda,
        })
    }

    /// Geometry whose centre wavelength corresponds to `center_frequency` (Hz).
    pub fn from_center_frequency(volume: f64, tau: f64, a0: f64, center_frequency: f64) -> Result<Self> {
        if !(center_frequency > 0.0) {
            return Err(invalid("center_frequency", "must be positive"));
        }
        Self::new(volume, tau, a0, SPEED_OF_LIGHT / center_frequency)
    }
}

/// Time-domain ring-down of a single mode.
pub fn mode_time_response(mode: &Mode, t: f64) -> Complex64 {
    if t < 0.0 {
        return Complex64::new(0.0, 0.0);
    }
    mode.amplitude() * Complex64::from_polar((-t / (2.0 * mode.tau)).exp(), -mode.omega * t)
}

/// Magnitude of the Fourier transform of [`mode_time_response`].
pub fn mode_spectral_magnitude(mode: &Mode, omega: f64) -> f64 {
    let x = 2.0 * mode.tau * (omega - mode.omega);
    mode.alpha.abs() * mode.tau / PI / (1.0 + x * x).sqrt()
}

/// Superposition of all mode ring-downs.
pub fn field_time_response(ensemble: &EigenmodeEnsemble, t: f64) -> Complex64 {
    ensemble
        .modes
        .iter()
        .map(|m| mode_time_response(m, t))
        .sum()
}

/// Exponential power delay profile envelope `A0 exp(-t / 2 tau) U(t)`.
pub fn power_delay_profile(a0: f64, tau: f64, t: f64) -> f64 {
    if t < 0.0 {
        0.0
    } else {
        a0 * (-t / (2.0 * tau)).exp()
    }
}

/// Channel impulse response: delay profile times the random modal sum.
pub fn channel_impulse_response(
    ensemble: &EigenmodeEnsemble,
    geom: &CavityGeometry,
    t_grid: &[f64],
) -> Vec<Complex64> {
    t_grid
        .iter()
        .map(|&t| {
            let envelope = power_delay_profile(geom.a0, geom.tau, t);
            if envelope == 0.0 {
                return Complex64::new(0.0, 0.0);
            }
            let modal: Complex64 = ensemble
                .modes
                .iter()
                .map(|m| m.amplitude() * Complex64::cis(m.omega * t))
                .sum();
            modal * envelope
        })
        .collect()
}

/// Weyl estimate of the number of modes below `omega` in a cavity of the
/// given volume.
pub fn mode_count(omega: f64, volume: f64) -> f64 {
    omega.powi(3) * volume / (3.0 * PI * PI * SPEED_OF_LIGHT.powi(3))
}

/// Relative volume change `dV / V` that shifts the mode count by one.
pub fn critical_volume_ratio(lambda: f64, volume: f64) -> f64 {
    3.0 * lambda.powi(3) / (8.0 * PI * volume)
}

/// Transfer function `A0 sum alpha e^{j phi} / (j (w_n - w) + 1/(2 tau))`
/// evaluated on `omega_grid`.
pub fn transfer_function(
    ensemble: &EigenmodeEnsemble,
    geom: &CavityGeometry,
    omega_grid: &[f64],
) -> Vec<Complex64> {
    let gamma = 0.5 / geom.tau;
    let gamma2 = gamma * gamma;
    let mut re = vec![0.0; omega_grid.len()];
    let mut im = vec![0.0; omega_grid.len()];
    // 1 / (g + j d) = (g - j d) / (g^2 + d^2); written in real arithmetic so the
    // inner loop vectorises
    for mode in &ensemble.modes {
        let (s, c) = mode.phi.sin_cos();
        let cr = mode.alpha * c;
        let ci = mode.alpha * s;
        for ((w, r), i) in omega_grid.iter().zip(re.iter_mut()).zip(im.iter_mut()) {
            let d = mode.omega - w;
            let inv = 1.0 / (gamma2 + d * d);
            let kr = gamma * inv;
            let ki = -d * inv;
            *r += cr * kr - ci * ki;
            *i += cr * ki + ci * kr;
        }
    }
    re.into_iter()
        .zip(im)
        .map(|(r, i)| Complex64::new(geom.a0 * r, geom.a0 * i))
        .collect()
}

/// Cumulative distribution of the GOE Wigner surmise `P(s) = pi s/2 exp(-pi s^2/4)`.
pub fn wigner_cdf(s: f64) -> f64 {
    if s <= 0.0 {
        0.0
    } else {
        1.0 - (-PI * s * s / 4.0).exp()
    }
}

/// Draws one unit-mean Wigner spacing by inverting [`wigner_cdf`].
pub fn sample_wigner_spacing<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    let u: f64 = rng.random();
    (-4.0 / PI * (1.0 - u).ln()).sqrt()
}

/// Samples one statistical realization of the modes in `[band_lo, band_hi]`.
///
/// The mode count comes from the Weyl law, spacings from the Wigner surmise
/// (rescaled affinely so the first and last mode sit half a mean spacing
/// inside the band edges), coefficients from `N(0, alpha_sigma)` and phases
/// uniformly from `[0, 2pi)`. Every mode shares the geometry's decay time.
pub fn sample_ensemble(
    seed: u64,
    geom: &CavityGeometry,
    band_lo: f64,
    band_hi: f64,
    alpha_sigma: f64,
) -> Result<EigenmodeEnsemble> {
    if !(band_lo > 0.0 && band_lo < band_hi) {
        return Err(invalid(
            "band",
            format!("need 0 < band_lo < band_hi, got [{band_lo}, {band_hi}]"),
        ));
    }
    if !(alpha_sigma >= 0.0 && alpha_sigma.is_finite()) {
        return Err(invalid("alpha_sigma", "must be a finite non-negative std"));
    }
    let expected = mode_count(band_hi, geom.volume) - mode_count(band_lo, geom.volume);
    let n_m = expected.round();
    if n_m < 1.0 {
        return Err(Error::BandTooNarrow { expected });
    }
    let n_m = n_m as usize;

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let width = band_hi - band_lo;
    let mean_spacing = width / n_m as f64;

    let mut positions = Vec::with_capacity(n_m);
    let mut acc = 0.0;
    positions.push(acc);
    for _ in 1..n_m {
        acc += mean_spacing * sample_wigner_spacing(&mut rng);
        positions.push(acc);
    }
    let lo = band_lo + 0.5 * mean_spacing;
    let span = width - mean_spacing;
    let omegas: Vec<f64> = if n_m == 1 {
        vec![0.5 * (band_lo + band_hi)]
    } else {
        positions.iter().map(|x| lo + span * x / acc).collect()
    };

    let alpha_dist = Normal::new(0.0, alpha_sigma).map_err(|e| invalid("alpha_sigma", e.to_string()))?;
    let modes = omegas
        .into_iter()
        .map(|omega| Mode {
            omega,
            alpha: alpha_dist.sample(&mut rng),
            phi: rng.random_range(0.0..TAU),
            tau: geom.tau,
        })
        .collect();
    EigenmodeEnsemble::new(modes, band_lo, band_hi)
}
