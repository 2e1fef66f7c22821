//! Boundary perturbation: the rectangular-cavity reference problem and the
//! mapping from RIS codebook switches to eigenmode perturbations.
//!
//! The reference problem evaluates the first-order shape-perturbation
//! formula
//!
//! ```text
//! dw = -j ∮_dS (E0* x H) . ds / ∫_V (eps E . E0* + mu H . H0*) dv
//! ```
//!
//! for a wall of a rectangular cavity pushed inward, with the perturbed fields
//! replaced by the unperturbed TE_m0p standing waves. The closed-form
//! eigenfrequency of the resized box is the independent check.

use std::f64::consts::{PI, TAU};

use num_complex::Complex64;
use rand::seq::index;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::eigenmode::{EigenmodeEnsemble, SPEED_OF_LIGHT};
use crate::error::{invalid, Error, Result};

/// Vacuum permittivity, F/m.
pub const EPSILON_0: f64 = 8.854_187_812_8e-12;
/// Vacuum permeability, H/m.
pub const MU_0: f64 = 1.256_637_062_12e-6;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RectangularCavity {
    pub a: f64,
    pub b: f64,
    pub d: f64,
    pub epsilon: f64,
    pub mu: f64,
}

impl RectangularCavity {
    pub fn new(a: f64, b: f64, d: f64, epsilon: f64, mu: f64) -> Result<Self> {
        for (name, v) in [("a", a), ("b", b), ("d", d), ("epsilon", epsilon), ("mu", mu)] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(invalid(name, format!("must be positive, got {v}")));
            }
        }
        Ok(RectangularCavity { a, b, d, epsilon, mu })
    }

    /// Air-filled box; `epsilon` and `mu` are chosen so that `1/sqrt(mu eps)`
    /// is exactly the speed of light.
    pub fn vacuum(a: f64, b: f64, d: f64) -> Result<Self> {
        Self::new(a, b, d, 1.0 / (MU_0 * SPEED_OF_LIGHT * SPEED_OF_LIGHT), MU_0)
    }

    pub fn volume(&self) -> f64 {
        self.a * self.b * self.d
    }

    fn edge(&self, wall: Wall) -> f64 {
        match wall {
            Wall::XMin | Wall::XMax => self.a,
            Wall::YMin | Wall::YMax => self.b,
            Wall::ZMin | Wall::ZMax => self.d,
        }
    }
}

/// Mode index triple `(m, n, p)` along `(x, y, z)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ModeIndex {
    pub m: u32,
    pub n: u32,
    pub p: u32,
}

impl ModeIndex {
    pub const fn new(m: u32, n: u32, p: u32) -> Self {
        ModeIndex { m, n, p }
    }
}

/// One of the six cavity walls.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Wall {
    XMin,
    XMax,
    YMin,
    YMax,
    ZMin,
    ZMax,
}

/// Resonant angular frequency of mode `(m, n, p)` in a rectangular box.
///
/// A TE or TM mode exists when at most one index is zero.
pub fn rect_mode_frequency(idx: ModeIndex, cavity: &RectangularCavity) -> Result<f64> {
    let zeros = [idx.m, idx.n, idx.p].iter().filter(|&&k| k == 0).count();
    if zeros > 1 {
        return Err(Error::NonexistentMode {
            m: idx.m,
            n: idx.n,
            p: idx.p,
        });
    }
    let kx = idx.m as f64 / cavity.a;
    let ky = idx.n as f64 / cavity.b;
    let kz = idx.p as f64 / cavity.d;
    Ok(PI / (cavity.mu * cavity.epsilon).sqrt() * (kx * kx + ky * ky + kz * kz).sqrt())
}

/// Complex phasor field at a point, `E` in units of the peak electric field.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModeField {
    pub e: [Complex64; 3],
    pub h: [Complex64; 3],
}

/// Standing-wave fields of the TE_m0p mode, scaled so that `max |E| = 1`.
///
/// `E_y = sin(m pi x / a) sin(p pi z / d)` with the magnetic field following
/// from Faraday's law.
pub fn rect_mode_fields(
    idx: ModeIndex,
    cavity: &RectangularCavity,
    point: [f64; 3],
) -> Result<ModeField> {
    if idx.n != 0 || idx.m == 0 || idx.p == 0 {
        return Err(Error::UnsupportedMode {
            m: idx.m,
            n: idx.n,
            p: idx.p,
        });
    }
    let [x, y, z] = point;
    let inside = |v: f64, edge: f64| (0.0..=edge).contains(&v);
    if !(inside(x, cavity.a) && inside(y, cavity.b) && inside(z, cavity.d)) {
        return Err(Error::OutsideCavity { x, y, z });
    }
    let omega = rect_mode_frequency(idx, cavity)?;
    let kx = idx.m as f64 * PI / cavity.a;
    let kz = idx.p as f64 * PI / cavity.d;
    let (sx, cx) = (kx * x).sin_cos();
    let (sz, cz) = (kz * z).sin_cos();
    let wmu = omega * cavity.mu;
    let zero = Complex64::new(0.0, 0.0);
    Ok(ModeField {
        e: [zero, Complex64::new(sx * sz, 0.0), zero],
        h: [
            Complex64::new(0.0, -kz / wmu * sx * cz),
            zero,
            Complex64::new(0.0, kx / wmu * cx * sz),
        ],
    })
}

fn cross(a: &[Complex64; 3], b: &[Complex64; 3]) -> [Complex64; 3] {
    [
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ]
}

fn dot(a: &[Complex64; 3], b: &[Complex64; 3]) -> Complex64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

fn conj3(a: &[Complex64; 3]) -> [Complex64; 3] {
    [a[0].conj(), a[1].conj(), a[2].conj()]
}

/// Sums in a fixed pairwise order so a given grid always reproduces the same
/// bits.
fn pairwise_sum(values: &[Complex64]) -> Complex64 {
    match values.len() {
        0 => Complex64::new(0.0, 0.0),
        1 => values[0],
        n => {
            let (l, r) = values.split_at(n / 2);
            pairwise_sum(l) + pairwise_sum(r)
        }
    }
}

fn midpoints(lo: f64, hi: f64, n: usize) -> impl Iterator<Item = f64> + Clone {
    let h = (hi - lo) / n as f64;
    (0..n).map(move |i| lo + (i as f64 + 0.5) * h)
}

/// Midpoint-rule refinement: doubles the grid until two successive results
/// agree to 0.1%.
fn refine<F: FnMut(usize) -> Result<Complex64>>(mut integrate: F) -> Result<Complex64> {
    const TOL: f64 = 1e-3;
    let mut n = 8;
    let mut prev = integrate(n)?;
    loop {
        n *= 2;
        let next = integrate(n)?;
        let scale = next.norm().max(f64::MIN_POSITIVE);
        if (next - prev).norm() <= TOL * scale || n >= 128 {
            return Ok(next);
        }
        prev = next;
    }
}

/// `∫_V (eps |E0|^2 + mu |H0|^2) dv` by tensor-product midpoint quadrature.
fn stored_energy(idx: ModeIndex, cavity: &RectangularCavity) -> Result<f64> {
    let c = *cavity;
    let total = refine(|n| {
        let dv = c.a * c.b * c.d / (n * n * n) as f64;
        let mut cells = Vec::with_capacity(n * n * n);
        for x in midpoints(0.0, c.a, n) {
            for y in midpoints(0.0, c.b, n) {
                for z in midpoints(0.0, c.d, n) {
                    let f = rect_mode_fields(idx, &c, [x, y, z])?;
                    let density = c.epsilon * dot(&f.e, &conj3(&f.e)) + c.mu * dot(&f.h, &conj3(&f.h));
                    cells.push(density * dv);
                }
            }
        }
        Ok(pairwise_sum(&cells))
    })?;
    Ok(total.re)
}

/// First-order eigenfrequency shift (rad/s) when `wall` moves inward by
/// `inward_displacement` metres.
///
/// The flux `E0* x H0` is integrated over the displaced wall face with the
/// surface element pointing along the displacement (into the remaining
/// cavity); displacements larger than a tenth of the edge are rejected.
pub fn eigenfrequency_shift(
    cavity: &RectangularCavity,
    idx: ModeIndex,
    wall: Wall,
    inward_displacement: f64,
) -> Result<f64> {
    let edge = cavity.edge(wall);
    let limit = edge / 10.0;
    if !(0.0..=limit).contains(&inward_displacement) {
        return Err(Error::DisplacementOutOfRange {
            displacement: inward_displacement,
            limit,
        });
    }
    // field formulas are validated up front so a zero shift still rejects
    // unsupported modes
    rect_mode_fields(idx, cavity, [0.0, 0.0, 0.0])?;
    if inward_displacement == 0.0 {
        return Ok(0.0);
    }

    let c = *cavity;
    let delta = inward_displacement;
    // wall position, unit vector along the displacement, and the two in-plane
    // axes of the face
    let (axis, position, sign) = match wall {
        Wall::XMin => (0, delta, 1.0),
        Wall::XMax => (0, c.a - delta, -1.0),
        Wall::YMin => (1, delta, 1.0),
        Wall::YMax => (1, c.b - delta, -1.0),
        Wall::ZMin => (2, delta, 1.0),
        Wall::ZMax => (2, c.d - delta, -1.0),
    };
    let extents = [c.a, c.b, c.d];
    let (u_axis, v_axis) = match axis {
        0 => (1, 2),
        1 => (0, 2),
        _ => (0, 1),
    };

    let flux = refine(|n| {
        let da = extents[u_axis] * extents[v_axis] / (n * n) as f64;
        let mut cells = Vec::with_capacity(n * n);
        for u in midpoints(0.0, extents[u_axis], n) {
            for v in midpoints(0.0, extents[v_axis], n) {
                let mut point = [0.0; 3];
                point[axis] = position;
                point[u_axis] = u;
                point[v_axis] = v;
                let f = rect_mode_fields(idx, &c, point)?;
                let s = cross(&conj3(&f.e), &f.h);
                cells.push(s[axis] * sign * da);
            }
        }
        Ok(pairwise_sum(&cells))
    })?;

    let energy = stored_energy(idx, cavity)?;
    let shift = Complex64::new(0.0, -1.0) * flux / energy;
    Ok(shift.re)
}

/// Virtual wall displacement mimicked by a unit whose reflection phase
/// changes by `delta_phi`.
pub fn equivalent_displacement(delta_phi: f64, lambda: f64) -> Result<f64> {
    if !(lambda > 0.0 && lambda.is_finite()) {
        return Err(invalid("lambda", format!("must be positive, got {lambda}")));
    }
    Ok(delta_phi / TAU * lambda)
}

/// Binary phase states of every RIS unit.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Codebook {
    bits: Vec<bool>,
}

impl Codebook {
    pub fn new(bits: Vec<bool>) -> Self {
        Codebook { bits }
    }

    pub fn zeros(units: usize) -> Self {
        Codebook {
            bits: vec![false; units],
        }
    }

    pub fn ones(units: usize) -> Self {
        Codebook {
            bits: vec![true; units],
        }
    }

    pub fn random<R: Rng + ?Sized>(units: usize, rng: &mut R) -> Self {
        Codebook {
            bits: (0..units).map(|_| rng.random()).collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.bits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bits.is_empty()
    }

    pub fn bits(&self) -> &[bool] {
        &self.bits
    }

    /// Bitwise complement, the maximally distant codebook.
    pub fn complement(&self) -> Self {
        Codebook {
            bits: self.bits.iter().map(|b| !b).collect(),
        }
    }

    /// Copy with `count` distinct, randomly chosen units flipped.
    pub fn with_flips<R: Rng + ?Sized>(&self, count: usize, rng: &mut R) -> Self {
        let mut bits = self.bits.clone();
        for i in index::sample(rng, bits.len(), count.min(bits.len())) {
            bits[i] = !bits[i];
        }
        Codebook { bits }
    }

    pub fn hamming(&self, other: &Codebook) -> Result<usize> {
        if self.len() != other.len() {
            return Err(Error::CodebookLength {
                left: self.len(),
                right: other.len(),
            });
        }
        Ok(self.bits.iter().zip(&other.bits).filter(|(a, b)| a != b).count())
    }

    /// Hex encoding, one digit per four units, first unit in the most
    /// significant bit.
    pub fn to_hex(&self) -> String {
        const DIGITS: &[u8; 16] = b"0123456789abcdef";
        self.bits
            .chunks(4)
            .map(|chunk| {
                let mut v = 0usize;
                for k in 0..4 {
                    v = (v << 1) | usize::from(chunk.get(k).copied().unwrap_or(false));
                }
                DIGITS[v] as char
            })
            .collect()
    }

    pub fn from_hex(s: &str) -> Result<Self> {
        let mut bits = Vec::with_capacity(s.len() * 4);
        for ch in s.chars() {
            let v = ch
                .to_digit(16)
                .ok_or_else(|| Error::CodebookHex(format!("bad digit {ch:?} in {s:?}")))?;
            for k in (0..4).rev() {
                bits.push((v >> k) & 1 == 1);
            }
        }
        Ok(Codebook { bits })
    }
}

impl Serialize for Codebook {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.to_hex())
    }
}

impl<'de> Deserialize<'de> for Codebook {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        Codebook::from_hex(&s).map_err(serde::de::Error::custom)
    }
}

/// Physical description of a binary-phase RIS panel.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RisPanel {
    pub unit_count: usize,
    /// Area of one unit, m^2.
    pub unit_area: f64,
    /// Reflection phase difference between the two unit states, rad.
    pub delta_phi: f64,
    /// Operating wavelength, m.
    pub lambda: f64,
    /// Eigenfrequency jitter per sqrt(flipped unit), rad/s.
    pub kappa: f64,
}

impl RisPanel {
    pub fn new(unit_count: usize, unit_area: f64, delta_phi: f64, lambda: f64, kappa: f64) -> Result<Self> {
        if unit_count == 0 {
            return Err(invalid("unit_count", "must be positive"));
        }
        if !(unit_area > 0.0) {
            return Err(invalid("unit_area", "must be positive"));
        }
        if !(delta_phi > 0.0 && delta_phi <= TAU) {
            return Err(invalid("delta_phi", format!("must lie in (0, 2pi], got {delta_phi}")));
        }
        if !(lambda > 0.0) {
            return Err(invalid("lambda", "must be positive"));
        }
        if !(kappa >= 0.0 && kappa.is_finite()) {
            return Err(invalid("kappa", "must be finite and non-negative"));
        }
        Ok(RisPanel {
            unit_count,
            unit_area,
            delta_phi,
            lambda,
            kappa,
        })
    }

    /// Jitter strength for which switching every unit moves each mode by one
    /// mean spacing (rms).
    pub fn calibrated_kappa(unit_count: usize, mean_spacing: f64) -> f64 {
        mean_spacing / (unit_count as f64).sqrt()
    }

    fn check(&self, cb: &Codebook) -> Result<()> {
        if cb.len() != self.unit_count {
            return Err(Error::CodebookLength {
                left: cb.len(),
                right: self.unit_count,
            });
        }
        Ok(())
    }
}

/// Equivalent volume perturbation (m^3) of switching from `cb_a` to `cb_b`.
pub fn codebook_switch_volume(cb_a: &Codebook, cb_b: &Codebook, panel: &RisPanel) -> Result<f64> {
    let flipped = cb_a.hamming(cb_b)?;
    Ok(flipped as f64 * panel.unit_area * equivalent_displacement(panel.delta_phi, panel.lambda)?)
}

/// Applies the statistical effect of a codebook switch to an ensemble.
///
/// With `h` flipped units every eigenfrequency gets an independent Gaussian
/// shift of std `kappa sqrt(h)`, and every phase moves towards a fresh
/// uniform draw by a fraction `h / U` of the circular distance. Coefficients
/// are left untouched.
pub fn perturb_ensemble(
    ensemble: &EigenmodeEnsemble,
    cb_a: &Codebook,
    cb_b: &Codebook,
    panel: &RisPanel,
    seed: u64,
) -> Result<EigenmodeEnsemble> {
    panel.check(cb_a)?;
    panel.check(cb_b)?;
    let flipped = cb_a.hamming(cb_b)?;
    if flipped == 0 {
        return Ok(ensemble.clone());
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let jitter = Normal::new(0.0, panel.kappa * (flipped as f64).sqrt())
        .map_err(|e| invalid("kappa", e.to_string()))?;
    let weight = flipped as f64 / panel.unit_count as f64;
    let modes = ensemble
        .modes()
        .iter()
        .map(|m| {
            let mut m = *m;
            m.omega += jitter.sample(&mut rng);
            let fresh: f64 = rng.random_range(0.0..TAU);
            let gap = (fresh - m.phi + PI).rem_euclid(TAU) - PI;
            m.phi += weight * gap;
            m
        })
        .collect();
    Ok(ensemble.with_modes_clamped(modes))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::eigenmode::{sample_ensemble, CavityGeometry};

    fn box_224() -> RectangularCavity {
        RectangularCavity::vacuum(2.0, 2.0, 4.0).unwrap()
    }

    const TE101: ModeIndex = ModeIndex::new(1, 0, 1);

    #[test]
    fn te101_frequency() {
        let w = rect_mode_frequency(TE101, &box_224()).unwrap();
        let expect = PI * SPEED_OF_LIGHT * (0.25f64 + 1.0 / 16.0).sqrt();
        assert!((w - expect).abs() / expect < 1e-9);
        // quoted as roughly 5.268e8 rad/s, 83.8 MHz
        assert!((w - 5.268e8).abs() / 5.268e8 < 1e-3);
        assert!((w / TAU / 1e6 - 83.8).abs() < 0.05);
        let big = RectangularCavity::vacuum(4.0, 4.0, 8.0).unwrap();
        let w2 = rect_mode_frequency(TE101, &big).unwrap();
        assert!((w2 * 2.0 - w).abs() / w < 1e-12);
    }

    #[test]
    fn nonexistent_modes() {
        for (m, n, p) in [(0, 0, 1), (0, 0, 0), (2, 0, 0)] {
            assert!(matches!(
                rect_mode_frequency(ModeIndex::new(m, n, p), &box_224()),
                Err(Error::NonexistentMode { .. })
            ));
        }
        assert!(rect_mode_frequency(ModeIndex::new(1, 1, 0), &box_224()).is_ok());
    }

    #[test]
    fn fields_vanish_tangentially_on_walls() {
        let c = RectangularCavity::vacuum(2.0, 1.5, 4.0).unwrap();
        for idx in [TE101, ModeIndex::new(2, 0, 3)] {
            for i in 0..=10 {
                for j in 0..=10 {
                    let (u, v) = (i as f64 / 10.0, j as f64 / 10.0);
                    // x walls: tangential Ey, Ez
                    for x in [0.0, c.a] {
                        let f = rect_mode_fields(idx, &c, [x, u * c.b, v * c.d]).unwrap();
                        assert!(f.e[1].norm() < 1e-12 && f.e[2].norm() < 1e-12);
                    }
                    for y in [0.0, c.b] {
                        let f = rect_mode_fields(idx, &c, [u * c.a, y, v * c.d]).unwrap();
                        assert!(f.e[0].norm() < 1e-12 && f.e[2].norm() < 1e-12);
                    }
                    for z in [0.0, c.d] {
                        let f = rect_mode_fields(idx, &c, [u * c.a, v * c.b, z]).unwrap();
                        assert!(f.e[0].norm() < 1e-12 && f.e[1].norm() < 1e-12);
                    }
                }
            }
        }
    }

    #[test]
    fn te101_field_peaks_at_centre() {
        let c = box_224();
        let centre = rect_mode_fields(TE101, &c, [1.0, 1.0, 2.0]).unwrap();
        assert!((centre.e[1].norm() - 1.0).abs() < 1e-12);
        for p in [[0.5, 1.0, 2.0], [1.0, 0.3, 1.0], [1.7, 1.9, 3.5]] {
            let f = rect_mode_fields(TE101, &c, p).unwrap();
            assert!(f.e[1].norm() <= centre.e[1].norm() + 1e-15);
        }
    }

    #[test]
    fn fields_are_divergence_free() {
        let c = RectangularCavity::vacuum(2.0, 1.5, 4.0).unwrap();
        let idx = ModeIndex::new(2, 0, 3);
        let h = 1e-5;
        let comp = |p: [f64; 3], field: fn(&ModeField) -> [Complex64; 3], k: usize| {
            field(&rect_mode_fields(idx, &c, p).unwrap())[k]
        };
        let e_of: fn(&ModeField) -> [Complex64; 3] = |f| f.e;
        let h_of: fn(&ModeField) -> [Complex64; 3] = |f| f.h;
        for p in [[0.3, 0.4, 1.1], [1.2, 0.9, 2.7], [1.9, 1.4, 3.6]] {
            for field in [e_of, h_of] {
                let mut div = Complex64::new(0.0, 0.0);
                let mut grad_max: f64 = 0.0;
                for k in 0..3 {
                    for comp_idx in 0..3 {
                        let mut lo = p;
                        let mut hi = p;
                        lo[k] -= h;
                        hi[k] += h;
                        let d = (comp(hi, field, comp_idx) - comp(lo, field, comp_idx)) / (2.0 * h);
                        grad_max = grad_max.max(d.norm());
                        if comp_idx == k {
                            div += d;
                        }
                    }
                }
                assert!(div.norm() < 1e-6 * grad_max.max(1e-300), "div {div} grad {grad_max}");
            }
        }
    }

    #[test]
    fn fields_reject_outside_points_and_other_families() {
        let c = box_224();
        assert!(matches!(
            rect_mode_fields(TE101, &c, [2.1, 1.0, 1.0]),
            Err(Error::OutsideCavity { .. })
        ));
        assert!(matches!(
            rect_mode_fields(ModeIndex::new(1, 1, 1), &c, [1.0, 1.0, 1.0]),
            Err(Error::UnsupportedMode { .. })
        ));
    }

    fn analytic_shift(c: &RectangularCavity, wall: Wall, delta: f64) -> f64 {
        let mut resized = *c;
        match wall {
            Wall::XMin | Wall::XMax => resized.a -= delta,
            Wall::YMin | Wall::YMax => resized.b -= delta,
            Wall::ZMin | Wall::ZMax => resized.d -= delta,
        }
        rect_mode_frequency(TE101, &resized).unwrap() - rect_mode_frequency(TE101, c).unwrap()
    }

    #[test]
    fn end_wall_shift_matches_resized_cavity() {
        let c = box_224();
        let delta = c.d / 1000.0;
        let shift = eigenfrequency_shift(&c, TE101, Wall::ZMax, delta).unwrap();
        let exact = analytic_shift(&c, Wall::ZMax, delta);
        assert!(shift > 0.0);
        assert!((shift - exact).abs() / exact < 0.02, "{shift} vs {exact}");
    }

    #[test]
    fn shift_sign_and_size_on_every_wall() {
        let c = box_224();
        for wall in [Wall::XMin, Wall::XMax, Wall::ZMin, Wall::ZMax] {
            let delta = c.edge(wall) / 1000.0;
            let shift = eigenfrequency_shift(&c, TE101, wall, delta).unwrap();
            let exact = analytic_shift(&c, wall, delta);
            assert!(shift > 0.0 && exact > 0.0);
            assert!((shift - exact).abs() / exact < 0.02, "{wall:?}: {shift} vs {exact}");
        }
        // TE_m0p does not depend on b
        for wall in [Wall::YMin, Wall::YMax] {
            let shift = eigenfrequency_shift(&c, TE101, wall, 0.002).unwrap();
            assert!(shift.abs() < 1e-6 * rect_mode_frequency(TE101, &c).unwrap());
        }
    }

    #[test]
    fn shift_is_linear_in_displacement() {
        let c = box_224();
        let per_metre: Vec<f64> = [2000.0, 1000.0, 500.0]
            .iter()
            .map(|k| {
                let delta = c.d / k;
                eigenfrequency_shift(&c, TE101, Wall::ZMax, delta).unwrap() / delta
            })
            .collect();
        for r in &per_metre[1..] {
            assert!((r / per_metre[0] - 1.0).abs() < 0.05);
        }
    }

    #[test]
    fn shift_validity_range() {
        let c = box_224();
        assert_eq!(eigenfrequency_shift(&c, TE101, Wall::ZMax, 0.0).unwrap(), 0.0);
        assert!(matches!(
            eigenfrequency_shift(&c, TE101, Wall::ZMax, 0.5),
            Err(Error::DisplacementOutOfRange { .. })
        ));
        assert!(eigenfrequency_shift(&c, TE101, Wall::ZMax, -1e-3).is_err());
    }

    #[test]
    fn equivalent_displacement_values() {
        assert!((equivalent_displacement(PI, 0.1).unwrap() - 0.05).abs() < 1e-15);
        assert!((equivalent_displacement(TAU, 0.37).unwrap() - 0.37).abs() < 1e-15);
        assert_eq!(equivalent_displacement(0.0, 0.1).unwrap(), 0.0);
        assert!(equivalent_displacement(1.0, 0.0).is_err());
        let a = equivalent_displacement(0.7, 0.2).unwrap();
        assert!((equivalent_displacement(1.4, 0.2).unwrap() - 2.0 * a).abs() < 1e-15);
        assert!((equivalent_displacement(0.7, 0.6).unwrap() - 3.0 * a).abs() < 1e-15);
    }

    fn panel(kappa: f64) -> RisPanel {
        RisPanel::new(512, 0.01, PI, 0.1, kappa).unwrap()
    }

    #[test]
    fn switch_volume_values() {
        let p = panel(0.0);
        let a = Codebook::zeros(512);
        assert_eq!(codebook_switch_volume(&a, &a, &p).unwrap(), 0.0);
        let mut bits = vec![false; 512];
        bits[17] = true;
        let b = Codebook::new(bits);
        let v = codebook_switch_volume(&a, &b, &p).unwrap();
        assert!((v - 5e-4).abs() < 1e-15);
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let x = Codebook::random(512, &mut rng);
        let y = Codebook::random(512, &mut rng);
        assert_eq!(
            codebook_switch_volume(&x, &y, &p).unwrap(),
            codebook_switch_volume(&y, &x, &p).unwrap()
        );
        let full = codebook_switch_volume(&a, &a.complement(), &p).unwrap();
        assert!(full <= 512.0 * p.unit_area * p.lambda);
        assert!(matches!(
            codebook_switch_volume(&a, &Codebook::zeros(8), &p),
            Err(Error::CodebookLength { .. })
        ));
    }

    #[test]
    fn codebook_hex_format() {
        let cb = Codebook::new(vec![true, false, false, false, false, true, true, true]);
        assert_eq!(cb.to_hex(), "87");
        assert_eq!(Codebook::from_hex("87").unwrap(), cb);
        assert_eq!(Codebook::ones(512).to_hex().len(), 128);
        assert!(Codebook::from_hex("8g").is_err());
        let json = serde_json::to_string(&cb).unwrap();
        assert_eq!(json, "\"87\"");
    }

    fn ensemble() -> EigenmodeEnsemble {
        let g = CavityGeometry::new(0.1, 0.15e-6, 1.0, 0.09).unwrap();
        let w0 = TAU * 3.3e9;
        sample_ensemble(11, &g, w0 - TAU * 100e6, w0 + TAU * 100e6, 1.0).unwrap()
    }

    #[test]
    fn identical_codebooks_leave_ensemble_unchanged() {
        let ens = ensemble();
        let p = panel(RisPanel::calibrated_kappa(512, ens.mean_spacing()));
        let cb = Codebook::random(512, &mut ChaCha8Rng::seed_from_u64(1));
        assert_eq!(perturb_ensemble(&ens, &cb, &cb, &p, 9).unwrap(), ens);
    }

    #[test]
    fn perturbation_preserves_invariants() {
        let ens = ensemble();
        let p = panel(RisPanel::calibrated_kappa(512, ens.mean_spacing()));
        let a = Codebook::zeros(512);
        let out = perturb_ensemble(&ens, &a, &a.complement(), &p, 3).unwrap();
        assert_eq!(out.n_m(), ens.n_m());
        assert!(out.modes().windows(2).all(|w| w[0].omega <= w[1].omega));
        assert!(out
            .modes()
            .iter()
            .all(|m| m.omega >= ens.band_lo() && m.omega <= ens.band_hi() && (0.0..TAU).contains(&m.phi)));
        let mut alphas_in: Vec<f64> = ens.modes().iter().map(|m| m.alpha).collect();
        let mut alphas_out: Vec<f64> = out.modes().iter().map(|m| m.alpha).collect();
        alphas_in.sort_by(f64::total_cmp);
        alphas_out.sort_by(f64::total_cmp);
        assert_eq!(alphas_in, alphas_out);
    }

    #[test]
    fn full_switch_rms_shift_is_one_spacing() {
        let ens = ensemble();
        let spacing = ens.mean_spacing();
        let p = panel(RisPanel::calibrated_kappa(512, spacing));
        let a = Codebook::zeros(512);
        // compare by identity through alpha, which is untouched and distinct
        let out = perturb_ensemble(&ens, &a, &a.complement(), &p, 8).unwrap();
        let mut sq = 0.0;
        let mut n = 0.0;
        for m in ens.modes() {
            let moved = out.modes().iter().find(|o| o.alpha == m.alpha).unwrap();
            if moved.omega > ens.band_lo() && moved.omega < ens.band_hi() {
                sq += (moved.omega - m.omega).powi(2);
                n += 1.0;
            }
        }
        let rms = (sq / n).sqrt() / spacing;
        assert!((rms - 1.0).abs() < 0.2, "rms shift {rms} spacings");
    }

    mod props {
        use super::super::*;
        use proptest::prelude::*;

        fn bits() -> impl Strategy<Value = Vec<bool>> {
            prop::collection::vec(any::<bool>(), 1..200)
        }

        proptest! {
            #[test]
            fn hex_roundtrip_pads_to_nibbles(b in bits()) {
                let cb = Codebook::new(b.clone());
                let back = Codebook::from_hex(&cb.to_hex()).unwrap();
                prop_assert_eq!(back.len(), b.len().div_ceil(4) * 4);
                prop_assert_eq!(&back.bits()[..b.len()], &b[..]);
                prop_assert!(back.bits()[b.len()..].iter().all(|&x| !x));
            }

            #[test]
            fn hamming_is_a_metric(a in bits(), seed in any::<u64>()) {
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                let x = Codebook::new(a);
                let y = Codebook::random(x.len(), &mut rng);
                let z = Codebook::random(x.len(), &mut rng);
                prop_assert_eq!(x.hamming(&x).unwrap(), 0);
                prop_assert_eq!(x.hamming(&y).unwrap(), y.hamming(&x).unwrap());
                prop_assert!(x.hamming(&z).unwrap() <= x.hamming(&y).unwrap() + y.hamming(&z).unwrap());
                prop_assert_eq!(x.hamming(&x.complement()).unwrap(), x.len());
            }

            #[test]
            fn with_flips_changes_exactly_count(a in bits(), frac in 0.0f64..=1.0, seed in any::<u64>()) {
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                let x = Codebook::new(a);
                let count = (frac * x.len() as f64).floor() as usize;
                prop_assert_eq!(x.with_flips(count, &mut rng).hamming(&x).unwrap(), count);
            }

            #[test]
            fn switch_volume_scales_with_flips(a in bits(), seed in any::<u64>()) {
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                let x = Codebook::new(a);
                let y = Codebook::random(x.len(), &mut rng);
                let p = RisPanel::new(x.len(), 0.01, PI, 0.09, 1.0).unwrap();
                let per_unit = codebook_switch_volume(&Codebook::zeros(1), &Codebook::ones(1),
                    &RisPanel::new(1, 0.01, PI, 0.09, 1.0).unwrap()).unwrap();
                let v = codebook_switch_volume(&x, &y, &p).unwrap();
                prop_assert!((v - per_unit * x.hamming(&y).unwrap() as f64).abs() <= 1e-12 * v.abs().max(1.0));
            }
        }
    }
}
