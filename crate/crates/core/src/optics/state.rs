use std::collections::{BTreeMap, BTreeSet};

use num_complex::Complex64;

use super::{JonesMatrix, ModeId, Polarization};
use crate::error::{check_range, Error, Result};

/// Tolerance on `total_norm` after any sequence of transforms.
pub const NORM_TOL: f64 = 1e-9;

/// Single-photon state over labeled modes.
///
/// Besides the coherent amplitudes the state carries two real ledgers:
/// `sinks` (absorbed probability, keyed by label) and `background`
/// (probability that lost coherence at an imperfect interferometer and now
/// propagates classically through the remaining elements).
#[derive(Debug, Clone, PartialEq, Default)]
pub struct ModeState {
    amplitudes: BTreeMap<ModeId, Complex64>,
    background: BTreeMap<ModeId, f64>,
    sinks: BTreeMap<String, f64>,
}

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

impl ModeState {
    pub fn single_photon(mode: ModeId) -> Self {
        let mut state = Self::default();
        state.amplitudes.insert(mode, Complex64::new(1.0, 0.0));
        state
    }

    /// State with the given amplitudes and empty ledgers. No normalization is applied.
    pub fn from_amplitudes(amplitudes: impl IntoIterator<Item = (ModeId, Complex64)>) -> Self {
        let mut state = Self::default();
        for (mode, amp) in amplitudes {
            state.set_amplitude(mode, amp);
        }
        state
    }

    pub fn amplitude(&self, mode: &ModeId) -> Complex64 {
        self.amplitudes.get(mode).copied().unwrap_or(ZERO)
    }

    pub fn amplitudes(&self) -> &BTreeMap<ModeId, Complex64> {
        &self.amplitudes
    }

    pub fn background(&self) -> &BTreeMap<ModeId, f64> {
        &self.background
    }

    pub fn sinks(&self) -> &BTreeMap<String, f64> {
        &self.sinks
    }

    pub fn sink(&self, label: &str) -> f64 {
        self.sinks.get(label).copied().unwrap_or(0.0)
    }

    pub fn set_amplitude(&mut self, mode: ModeId, amp: Complex64) {
        if amp == ZERO {
            self.amplitudes.remove(&mode);
        } else {
            self.amplitudes.insert(mode, amp);
        }
    }

    fn background_of(&self, mode: &ModeId) -> f64 {
        self.background.get(mode).copied().unwrap_or(0.0)
    }

    fn set_background(&mut self, mode: ModeId, value: f64) {
        if value > 0.0 {
            self.background.insert(mode, value);
        } else {
            self.background.remove(&mode);
        }
    }

    fn add_sink(&mut self, label: &str, value: f64) {
        if value > 0.0 {
            *self.sinks.entry(label.to_string()).or_insert(0.0) += value;
        } else {
            self.sinks.entry(label.to_string()).or_insert(0.0);
        }
    }

    /// Detection probability of one mode, coherent plus background.
    pub fn probability(&self, mode: &ModeId) -> f64 {
        self.amplitude(mode).norm_sqr() + self.background_of(mode)
    }

    pub fn is_occupied(&self, mode: &ModeId) -> bool {
        self.amplitudes.contains_key(mode) || self.background.contains_key(mode)
    }

    /// Σ|amplitude|² + Σ background + Σ sinks.
    pub fn total_norm(&self) -> f64 {
        self.amplitudes.values().map(|a| a.norm_sqr()).sum::<f64>()
            + self.background.values().sum::<f64>()
            + self.sinks.values().sum::<f64>()
    }

    /// Probability still held in modes (not absorbed).
    pub fn in_flight(&self) -> f64 {
        self.amplitudes.values().map(|a| a.norm_sqr()).sum::<f64>() + self.background.values().sum::<f64>()
    }

    pub fn occupied_modes(&self) -> BTreeSet<ModeId> {
        self.amplitudes.keys().chain(self.background.keys()).cloned().collect()
    }

    pub fn check_norm(&self) -> Result<()> {
        let norm = self.total_norm();
        if (norm - 1.0).abs() <= NORM_TOL && self.sinks.values().all(|&s| s >= 0.0) {
            Ok(())
        } else {
            Err(Error::NumericalIntegrity(format!(
                "total norm {norm:.15} deviates from 1"
            )))
        }
    }

    /// Two-mode rotation: a beam splitter of reflectivity cos²θ.
    ///
    /// `(a, b) -> (cosθ·a − sinθ·b, sinθ·a + cosθ·b)`.
    pub fn apply_rotation(&mut self, a: &ModeId, b: &ModeId, theta: f64) -> Result<()> {
        if a == b {
            return Err(Error::InvalidWiring(format!(
                "rotation needs two distinct modes, got {a} twice"
            )));
        }
        let (s, c) = theta.sin_cos();
        let (x, y) = (self.amplitude(a), self.amplitude(b));
        self.set_amplitude(a.clone(), x * c - y * s);
        self.set_amplitude(b.clone(), x * s + y * c);

        let (ix, iy) = (self.background_of(a), self.background_of(b));
        if ix > 0.0 || iy > 0.0 {
            self.set_background(a.clone(), c * c * ix + s * s * iy);
            self.set_background(b.clone(), s * s * ix + c * c * iy);
        }
        Ok(())
    }

    /// Applies `m` to the (H, V) amplitudes of `path` in `time_bin`.
    pub fn apply_jones(&mut self, path: &str, time_bin: u32, m: &JonesMatrix) -> Result<()> {
        if m.unitarity_defect() > super::jones::UNITARY_TOL {
            return Err(Error::InvalidElement(format!(
                "non-unitary Jones matrix on path {path}"
            )));
        }
        let h = ModeId::new(path, Polarization::H, time_bin);
        let v = ModeId::new(path, Polarization::V, time_bin);
        let (h2, v2) = m.apply(self.amplitude(&h), self.amplitude(&v));
        self.set_amplitude(h.clone(), h2);
        self.set_amplitude(v.clone(), v2);

        let (ih, iv) = (self.background_of(&h), self.background_of(&v));
        if ih > 0.0 || iv > 0.0 {
            let w = |r: usize, c: usize| m.entry(r, c).norm_sqr();
            self.set_background(h, w(0, 0) * ih + w(0, 1) * iv);
            self.set_background(v, w(1, 0) * ih + w(1, 1) * iv);
        }
        Ok(())
    }

    /// Polarizing beam splitter: H of `in_path` goes to `h_path`, V to `v_path`.
    pub fn apply_pbs(&mut self, in_path: &str, h_path: &str, v_path: &str, time_bin: u32) -> Result<()> {
        if h_path == v_path {
            return Err(Error::InvalidWiring(format!(
                "PBS outputs must differ, both are {h_path}"
            )));
        }
        let h_in = ModeId::new(in_path, Polarization::H, time_bin);
        let v_in = ModeId::new(in_path, Polarization::V, time_bin);
        self.route(&h_in, &ModeId::new(h_path, Polarization::H, time_bin))?;
        self.route(&v_in, &ModeId::new(v_path, Polarization::V, time_bin))
    }

    /// Inverse PBS: H from `h_path` and V from `v_path` merge onto `out_path`.
    pub fn apply_combine(&mut self, h_path: &str, v_path: &str, out_path: &str, time_bin: u32) -> Result<()> {
        if h_path == v_path {
            return Err(Error::InvalidWiring(format!(
                "PBS inputs must differ, both are {h_path}"
            )));
        }
        self.route(
            &ModeId::new(h_path, Polarization::H, time_bin),
            &ModeId::new(out_path, Polarization::H, time_bin),
        )?;
        self.route(
            &ModeId::new(v_path, Polarization::V, time_bin),
            &ModeId::new(out_path, Polarization::V, time_bin),
        )
    }

    /// Moves everything in `from` to `to` (mirror or free propagation).
    ///
    /// Moving onto an occupied mode would merge two modes, which no
    /// passive element can do, so it is rejected.
    pub fn route(&mut self, from: &ModeId, to: &ModeId) -> Result<()> {
        if from == to {
            return Ok(());
        }
        if !self.is_occupied(from) {
            return Ok(());
        }
        if self.is_occupied(to) {
            return Err(Error::InvalidWiring(format!(
                "cannot route {from} onto occupied mode {to}"
            )));
        }
        if let Some(a) = self.amplitudes.remove(from) {
            self.amplitudes.insert(to.clone(), a);
        }
        if let Some(i) = self.background.remove(from) {
            self.background.insert(to.clone(), i);
        }
        Ok(())
    }

    pub fn apply_phase(&mut self, mode: &ModeId, phi: f64) {
        if let Some(a) = self.amplitudes.get_mut(mode) {
            *a *= Complex64::from_polar(1.0, phi);
        }
    }

    /// Moves `fraction` of the probability in `mode` into `sink`.
    pub fn absorb(&mut self, mode: &ModeId, sink: &str, fraction: f64) -> Result<()> {
        check_range("fraction", fraction, 0.0, 1.0, "[0, 1]")?;
        let amp = self.amplitude(mode);
        let bg = self.background_of(mode);
        let taken = (amp.norm_sqr() + bg) * fraction;
        self.set_amplitude(mode.clone(), amp * (1.0 - fraction).sqrt());
        self.set_background(mode.clone(), bg * (1.0 - fraction));
        self.add_sink(sink, taken);
        Ok(())
    }

    /// Partial loss of coherence on the pair `(a, b)`.
    ///
    /// Each amplitude keeps a factor `sqrt(v)`; the removed `(1 − v)·|amp|²`
    /// moves into the background of the same mode, which from then on
    /// splits with classical (intensity) ratios. For a balanced two-path
    /// interferometer this makes the measured output contrast exactly `v`.
    pub fn decohere(&mut self, a: &ModeId, b: &ModeId, visibility: f64) -> Result<()> {
        check_range("visibility", visibility, 0.0, 1.0, "[0, 1]")?;
        if a == b {
            return Err(Error::InvalidWiring(format!(
                "visibility needs two distinct modes, got {a} twice"
            )));
        }
        if visibility == 1.0 {
            return Ok(());
        }
        let keep = visibility.sqrt();
        for mode in [a, b] {
            let amp = self.amplitude(mode);
            if amp == ZERO {
                continue;
            }
            let lost = (1.0 - visibility) * amp.norm_sqr();
            self.set_amplitude(mode.clone(), amp * keep);
            let bg = self.background_of(mode);
            self.set_background(mode.clone(), bg + lost);
        }
        Ok(())
    }

    /// Moves both polarizations of `path` from `time_bin` to `time_bin + 1`.
    pub fn advance_time_bin(&mut self, path: &str, time_bin: u32) -> Result<()> {
        for pol in Polarization::BOTH {
            let from = ModeId::new(path, pol, time_bin);
            self.route(&from, &from.at_bin(time_bin + 1))?;
        }
        Ok(())
    }

    /// Per-detector click probability; each detector sums over its modes.
    pub fn detect<'a, I, S>(&self, ports: I) -> Result<BTreeMap<String, f64>>
    where
        I: IntoIterator<Item = (&'a str, S)>,
        S: IntoIterator<Item = &'a ModeId>,
    {
        let mut seen: BTreeMap<&ModeId, &str> = BTreeMap::new();
        let mut out = BTreeMap::new();
        for (name, modes) in ports {
            let mut p = 0.0;
            for mode in modes {
                if let Some(other) = seen.insert(mode, name) {
                    return Err(Error::InvalidWiring(format!(
                        "mode {mode} is assigned to both {other} and {name}"
                    )));
                }
                p += self.probability(mode);
            }
            out.insert(name.to_string(), p);
        }
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn a() -> ModeId {
        ModeId::h("a")
    }
    fn b() -> ModeId {
        ModeId::h("b")
    }

    #[test]
    fn fresh_photon_is_normalized() {
        let s = ModeState::single_photon(ModeId::h("A"));
        assert_eq!(s.total_norm(), 1.0);
        assert_eq!(s.probability(&ModeId::h("A")), 1.0);
        let det = s
            .detect([("D0", vec![&ModeId::h("A")]), ("D1", vec![&ModeId::v("A")])])
            .unwrap();
        assert_eq!(det["D0"], 1.0);
        assert_eq!(det["D1"], 0.0);
    }

    #[test]
    fn rotation_examples() {
        let mut s = ModeState::single_photon(a());
        s.apply_rotation(&a(), &b(), 0.0).unwrap();
        assert_eq!(s.amplitude(&a()).re, 1.0);

        let mut s = ModeState::single_photon(a());
        s.apply_rotation(&a(), &b(), PI / 4.0).unwrap();
        assert!((s.amplitude(&a()).re - std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-6);
        assert!((s.amplitude(&b()).re - std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-6);

        let mut s = ModeState::single_photon(a());
        s.apply_rotation(&a(), &b(), PI / 8.0).unwrap();
        assert!((s.amplitude(&a()).re - 0.923880).abs() < 1e-6);
        assert!((s.amplitude(&b()).re - 0.382683).abs() < 1e-6);
    }

    #[test]
    fn rotation_same_mode_is_wiring_error() {
        let mut s = ModeState::single_photon(a());
        assert!(matches!(
            s.apply_rotation(&a(), &a(), 0.1),
            Err(Error::InvalidWiring(_))
        ));
    }

    #[test]
    fn pbs_examples() {
        let mut s = ModeState::single_photon(ModeId::h("in"));
        s.apply_pbs("in", "h", "v", 0).unwrap();
        assert_eq!(s.probability(&ModeId::h("h")), 1.0);

        let mut s = ModeState::single_photon(ModeId::v("in"));
        s.apply_pbs("in", "h", "v", 0).unwrap();
        assert_eq!(s.probability(&ModeId::v("v")), 1.0);

        let mut s = ModeState::from_amplitudes([
            (ModeId::h("in"), Complex64::new(0.6, 0.0)),
            (ModeId::v("in"), Complex64::new(0.8, 0.0)),
        ]);
        s.apply_pbs("in", "h", "v", 0).unwrap();
        assert!((s.probability(&ModeId::h("h")) - 0.36).abs() < 1e-15);
        assert!((s.probability(&ModeId::v("v")) - 0.64).abs() < 1e-15);
        assert!(matches!(s.apply_pbs("in", "x", "x", 0), Err(Error::InvalidWiring(_))));
    }

    #[test]
    fn absorb_examples() {
        let mut s = ModeState::from_amplitudes([
            (a(), Complex64::new(0.5, 0.0)),
            (b(), Complex64::new(0.75f64.sqrt(), 0.0)),
        ]);
        s.absorb(&a(), "sink", 1.0).unwrap();
        assert!((s.sink("sink") - 0.25).abs() < 1e-15);
        assert_eq!(s.amplitude(&a()), ZERO);

        let mut s = ModeState::single_photon(a());
        s.absorb(&a(), "sink", 0.0).unwrap();
        assert_eq!(s.amplitude(&a()).re, 1.0);
        assert_eq!(s.sink("sink"), 0.0);

        let mut s = ModeState::single_photon(a());
        s.absorb(&a(), "sink", 0.5).unwrap();
        assert!((s.sink("sink") - 0.5).abs() < 1e-15);
        assert!((s.amplitude(&a()).re - std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-6);
        s.check_norm().unwrap();

        assert!(matches!(s.absorb(&a(), "sink", 1.5), Err(Error::Range { .. })));
        assert!(matches!(s.absorb(&a(), "sink", -0.1), Err(Error::Range { .. })));
    }

    #[test]
    fn detect_rejects_overlapping_ports() {
        let s = ModeState::single_photon(a());
        let err = s.detect([("D0", vec![&a()]), ("D1", vec![&a()])]);
        assert!(matches!(err, Err(Error::InvalidWiring(_))));
    }

    #[test]
    fn balanced_superposition_detects_half_half() {
        let mut s = ModeState::single_photon(a());
        s.apply_rotation(&a(), &b(), PI / 4.0).unwrap();
        let det = s.detect([("D0", [&a()]), ("D1", [&b()])]).unwrap();
        assert!((det["D0"] - 0.5).abs() < 1e-15);
        assert!((det["D1"] - 0.5).abs() < 1e-15);
    }

    #[test]
    fn route_onto_occupied_mode_rejected() {
        let mut s = ModeState::single_photon(a());
        s.apply_rotation(&a(), &b(), PI / 4.0).unwrap();
        assert!(matches!(s.route(&a(), &b()), Err(Error::InvalidWiring(_))));
    }

    #[test]
    fn decohere_keeps_norm() {
        let mut s = ModeState::single_photon(a());
        s.apply_rotation(&a(), &b(), PI / 4.0).unwrap();
        s.decohere(&a(), &b(), 0.7).unwrap();
        s.check_norm().unwrap();
        s.apply_rotation(&a(), &b(), PI / 4.0).unwrap();
        s.check_norm().unwrap();
        // bright port (1 + v)/2, dark port (1 − v)/2
        assert!((s.probability(&b()) - 0.85).abs() < 1e-12);
        assert!((s.probability(&a()) - 0.15).abs() < 1e-12);
    }
}
