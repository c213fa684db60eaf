//! Spectra of probe time series, peak extraction and matching against
//! analytic cavity resonances.

use std::f64::consts::PI;
use std::path::Path;

use rustfft::num_complex::Complex;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::constants::C0;

/// Shortest series accepted by [`spectrum`].
pub const MIN_SERIES_LEN: usize = 16;

pub const DEFAULT_PAD_FACTOR: usize = 8;

/// Half-width of the matching window, relative to the analytic frequency.
pub const MATCH_WINDOW: f64 = 0.05;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SpectralError {
    #[error("series has {len} samples, need at least {MIN_SERIES_LEN}")]
    SeriesTooShort { len: usize },
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("invalid mode indices: {0}")]
    InvalidModeIndices(String),
}

pub type Result<T, E = SpectralError> = std::result::Result<T, E>;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Window {
    Rectangular,
    #[default]
    Hann,
}

impl Window {
    /// Window coefficients for `n` samples.
    pub fn coefficients(self, n: usize) -> Vec<f64> {
        match self {
            Window::Rectangular => vec![1.0; n],
            Window::Hann => {
                let denom = n.max(2) as f64 - 1.0;
                (0..n).map(|i| 0.5 - 0.5 * (2.0 * PI * i as f64 / denom).cos()).collect()
            }
        }
    }
}

/// One-sided magnitude spectrum, bins `0 ..= n_padded / 2`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Spectrum {
    pub frequencies: Vec<f64>,
    pub magnitudes: Vec<f64>,
    /// Bin spacing `1 / (n_padded · dt)`, Hz.
    pub bin_width: f64,
    pub n_samples: usize,
    pub n_padded: usize,
    pub window: Window,
}

impl Spectrum {
    /// `Σ |X_k|² / n_padded` over the full two-sided spectrum.
    pub fn energy(&self) -> f64 {
        let n = self.n_padded;
        let last = self.magnitudes.len() - 1;
        let sum: f64 = self
            .magnitudes
            .iter()
            .enumerate()
            .map(|(k, m)| {
                let twice = k != 0 && !(n.is_multiple_of(2) && k == last);
                if twice { 2.0 * m * m } else { m * m }
            })
            .sum();
        sum / n as f64
    }

    /// Resolution of the unpadded record, `1 / (n_samples · dt)`, Hz.
    pub fn native_resolution(&self) -> f64 {
        self.bin_width * self.n_padded as f64 / self.n_samples as f64
    }
}

/// Windowed, zero-padded DFT magnitude of a real series sampled every `dt`
/// seconds.
pub fn spectrum(series: &[f64], dt: f64, pad_factor: usize, window: Window) -> Result<Spectrum> {
    if series.len() < MIN_SERIES_LEN {
        return Err(SpectralError::SeriesTooShort { len: series.len() });
    }
    if pad_factor < 1 {
        return Err(SpectralError::InvalidInput("pad_factor must be >= 1".into()));
    }
    if !(dt.is_finite() && dt > 0.0) {
        return Err(SpectralError::InvalidInput(format!("sample interval must be positive, got {dt}")));
    }
    let n = series.len();
    let n_padded = n * pad_factor;
    let w = window.coefficients(n);
    let mut buf: Vec<Complex<f64>> = vec![Complex::new(0.0, 0.0); n_padded];
    for ((b, x), w) in buf.iter_mut().zip(series).zip(&w) {
        b.re = x * w;
    }
    FftPlanner::new().plan_fft_forward(n_padded).process(&mut buf);
    let bins = n_padded / 2 + 1;
    let bin_width = 1.0 / (n_padded as f64 * dt);
    Ok(Spectrum {
        frequencies: (0..bins).map(|k| k as f64 * bin_width).collect(),
        magnitudes: buf[..bins].iter().map(|c| c.norm()).collect(),
        bin_width,
        n_samples: n,
        n_padded,
        window,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Peak {
    /// Refined frequency, Hz.
    pub frequency: f64,
    /// Refined magnitude.
    pub magnitude: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PeakSearch {
    /// Peaks ranked by decreasing magnitude.
    pub peaks: Vec<Peak>,
    /// Set when fewer than the requested number of peaks exist.
    pub fewer_than_requested: bool,
}

/// Largest local maxima of `spec`, refined by a parabola through the
/// log-magnitudes of the three bins around each maximum.
///
/// The DC bin is never reported.  Peaks closer than `min_separation` Hz to a
/// larger one are dropped.
pub fn find_peaks(spec: &Spectrum, n_peaks: usize, min_separation: f64) -> Result<PeakSearch> {
    if n_peaks == 0 {
        return Err(SpectralError::InvalidInput("n_peaks must be >= 1".into()));
    }
    if !(min_separation >= 0.0) {
        return Err(SpectralError::InvalidInput(format!("min_separation must be >= 0, got {min_separation}")));
    }
    let m = &spec.magnitudes;
    let log = |v: f64| v.max(f64::MIN_POSITIVE).ln();
    let mut candidates: Vec<Peak> = (1..m.len().saturating_sub(1))
        .filter(|&k| m[k] > 0.0 && m[k] > m[k - 1] && m[k] >= m[k + 1])
        .map(|k| {
            let (a, b, c) = (log(m[k - 1]), log(m[k]), log(m[k + 1]));
            let curv = a - 2.0 * b + c;
            let p = if curv < 0.0 { (0.5 * (a - c) / curv).clamp(-0.5, 0.5) } else { 0.0 };
            Peak {
                frequency: (k as f64 + p) * spec.bin_width,
                magnitude: (b - 0.25 * (a - c) * p).exp(),
            }
        })
        .collect();
    candidates.sort_by(|x, y| y.magnitude.total_cmp(&x.magnitude));
    let mut peaks: Vec<Peak> = Vec::with_capacity(n_peaks);
    for c in candidates {
        if peaks.len() == n_peaks {
            break;
        }
        if peaks.iter().all(|p| (p.frequency - c.frequency).abs() >= min_separation) {
            peaks.push(c);
        }
    }
    Ok(PeakSearch { fewer_than_requested: peaks.len() < n_peaks, peaks })
}

/// Rectangular resonator family.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ModeFamily {
    /// 2D transverse magnetic: `m, n >= 1`.
    Tm2d,
    /// 2D transverse electric: `m + n >= 1`.
    Te2d,
    /// 3D box: at most one index zero.
    Cavity3d,
}

impl ModeFamily {
    pub fn dim(self) -> usize {
        match self {
            ModeFamily::Tm2d | ModeFamily::Te2d => 2,
            ModeFamily::Cavity3d => 3,
        }
    }

    fn check(self, idx: &[u32]) -> Result<()> {
        if idx.len() != self.dim() {
            return Err(SpectralError::InvalidModeIndices(format!(
                "{self:?} needs {} indices, got {}",
                self.dim(),
                idx.len()
            )));
        }
        let zeros = idx.iter().filter(|&&i| i == 0).count();
        let ok = match self {
            ModeFamily::Tm2d => zeros == 0,
            ModeFamily::Te2d => zeros < 2,
            ModeFamily::Cavity3d => zeros < 2,
        };
        if ok {
            Ok(())
        } else {
            Err(SpectralError::InvalidModeIndices(format!("{idx:?} is not a {self:?} mode")))
        }
    }
}

/// Resonant frequency `c / (2 sqrt(eps_r mu_r)) · sqrt(Σ (m_i / a_i)²)` of a
/// rectangular PEC resonator with side lengths `dimensions` (m).
pub fn analytic_resonance(
    family: ModeFamily,
    dimensions: &[f64],
    indices: &[u32],
    eps_r: f64,
    mu_r: f64,
) -> Result<f64> {
    family.check(indices)?;
    if dimensions.len() != indices.len() || dimensions.iter().any(|a| !(a.is_finite() && *a > 0.0)) {
        return Err(SpectralError::InvalidInput(format!("bad cavity dimensions {dimensions:?}")));
    }
    if !(eps_r > 0.0 && mu_r > 0.0 && eps_r.is_finite() && mu_r.is_finite()) {
        return Err(SpectralError::InvalidInput(format!("bad medium eps_r={eps_r}, mu_r={mu_r}")));
    }
    let sum: f64 = dimensions.iter().zip(indices).map(|(a, &m)| (m as f64 / a).powi(2)).sum();
    Ok(C0 / (2.0 * (eps_r * mu_r).sqrt()) * sum.sqrt())
}

/// One analytic resonance.  For 2D families `indices[2]` is unused.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CavityMode {
    pub family: ModeFamily,
    pub indices: [u32; 3],
    pub frequency: f64,
}

impl CavityMode {
    pub fn new(family: ModeFamily, dimensions: &[f64], indices: &[u32], eps_r: f64, mu_r: f64) -> Result<Self> {
        let frequency = analytic_resonance(family, dimensions, indices, eps_r, mu_r)?;
        let mut idx = [0; 3];
        idx[..indices.len()].copy_from_slice(indices);
        Ok(Self { family, indices: idx, frequency })
    }

    pub fn label(&self) -> String {
        let i = self.indices;
        match self.family.dim() {
            2 => format!("({},{})", i[0], i[1]),
            _ => format!("({},{},{})", i[0], i[1], i[2]),
        }
    }
}

/// All valid modes of `family` up to `f_max` Hz, sorted by frequency.
pub fn enumerate_modes(
    family: ModeFamily,
    dimensions: &[f64],
    eps_r: f64,
    mu_r: f64,
    f_max: f64,
) -> Result<Vec<CavityMode>> {
    let dim = family.dim();
    if dimensions.len() != dim {
        return Err(SpectralError::InvalidInput(format!("{family:?} needs {dim} dimensions")));
    }
    let k = 2.0 * (eps_r * mu_r).sqrt() * f_max / C0;
    let limits: Vec<u32> = dimensions.iter().map(|a| (k * a).floor() as u32).collect();
    let mut out = Vec::new();
    let p_max = if dim == 3 { limits[2] } else { 0 };
    for m in 0..=limits[0] {
        for n in 0..=limits[1] {
            for p in 0..=p_max {
                let idx = [m, n, p];
                if family.check(&idx[..dim]).is_err() {
                    continue;
                }
                let mode = CavityMode::new(family, dimensions, &idx[..dim], eps_r, mu_r)?;
                if mode.frequency <= f_max {
                    out.push(mode);
                }
            }
        }
    }
    out.sort_by(|a, b| a.frequency.total_cmp(&b.frequency).then(a.indices.cmp(&b.indices)));
    Ok(out)
}

/// Modes sharing one frequency (within a relative tolerance).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModeGroup {
    pub frequency: f64,
    pub modes: Vec<CavityMode>,
}

impl ModeGroup {
    /// First mode of the group, used to label it.
    pub fn representative(&self) -> CavityMode {
        self.modes[0]
    }
}

/// Collect modes whose frequencies agree within `rel_tol` into groups.
pub fn group_degenerate(modes: &[CavityMode], rel_tol: f64) -> Vec<ModeGroup> {
    let mut sorted = modes.to_vec();
    sorted.sort_by(|a, b| a.frequency.total_cmp(&b.frequency));
    let mut groups: Vec<ModeGroup> = Vec::new();
    for m in sorted {
        match groups.last_mut() {
            Some(g) if (m.frequency - g.frequency).abs() <= rel_tol * g.frequency => g.modes.push(m),
            _ => groups.push(ModeGroup { frequency: m.frequency, modes: vec![m] }),
        }
    }
    groups
}

/// One analytic mode and the peak matched to it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResonanceEntry {
    pub mode: CavityMode,
    /// Measured frequency, Hz; `None` when no peak was within the window.
    pub measured: Option<f64>,
    /// `|f_ref - f_meas| / f_ref`.
    pub rel_error: Option<f64>,
}

impl ResonanceEntry {
    pub fn is_matched(&self) -> bool {
        self.measured.is_some()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResonanceReport {
    pub entries: Vec<ResonanceEntry>,
    /// Spectral bin width the peaks were measured with, Hz.
    pub bin_width: Option<f64>,
}

#[derive(Serialize)]
struct ReportRow {
    m: u32,
    n: u32,
    p: Option<u32>,
    f_ref_hz: f64,
    f_meas_hz: Option<f64>,
    rel_error: Option<f64>,
}

impl ResonanceReport {
    pub fn unmatched(&self) -> impl Iterator<Item = &ResonanceEntry> {
        self.entries.iter().filter(|e| !e.is_matched())
    }

    /// CSV with columns `m,n,p,f_ref_hz,f_meas_hz,rel_error`; unmatched
    /// modes and the `p` of 2D modes are left empty.
    pub fn write_csv(&self, path: impl AsRef<Path>) -> std::io::Result<()> {
        let rows: Vec<ReportRow> = self
            .entries
            .iter()
            .map(|e| ReportRow {
                m: e.mode.indices[0],
                n: e.mode.indices[1],
                p: (e.mode.family.dim() == 3).then_some(e.mode.indices[2]),
                f_ref_hz: e.mode.frequency,
                f_meas_hz: e.measured,
                rel_error: e.rel_error,
            })
            .collect();
        crate::output::write_csv_with_header(
            path.as_ref(),
            &["m", "n", "p", "f_ref_hz", "f_meas_hz", "rel_error"],
            &rows,
        )
    }

    pub fn write_json(&self, path: impl AsRef<Path>) -> std::io::Result<()> {
        crate::output::write_json(path.as_ref(), self)
    }
}

/// Relative error `|f_ref - f_meas| / f_ref`.
pub fn relative_error(f_ref: f64, f_meas: f64) -> f64 {
    (f_ref - f_meas).abs() / f_ref
}

/// Pair analytic modes with measured peak frequencies.
///
/// Candidate pairs within [`MATCH_WINDOW`] of the analytic frequency are
/// taken greedily in order of increasing relative distance, so every mode
/// and every peak is used at most once.
pub fn match_and_score(peaks: &[f64], modes: &[CavityMode]) -> Result<ResonanceReport> {
    if modes.is_empty() {
        return Err(SpectralError::InvalidInput("at least one analytic mode is required".into()));
    }
    let mut pairs: Vec<(f64, usize, usize)> = Vec::new();
    for (mi, m) in modes.iter().enumerate() {
        for (pi, &f) in peaks.iter().enumerate() {
            let re = relative_error(m.frequency, f);
            if re <= MATCH_WINDOW {
                pairs.push((re, mi, pi));
            }
        }
    }
    pairs.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
    let mut mode_peak: Vec<Option<usize>> = vec![None; modes.len()];
    let mut peak_used = vec![false; peaks.len()];
    for (_, mi, pi) in pairs {
        if mode_peak[mi].is_none() && !peak_used[pi] {
            mode_peak[mi] = Some(pi);
            peak_used[pi] = true;
        }
    }
    let entries = modes
        .iter()
        .zip(mode_peak)
        .map(|(m, p)| {
            let measured = p.map(|i| peaks[i]);
            ResonanceEntry { mode: *m, measured, rel_error: measured.map(|f| relative_error(m.frequency, f)) }
        })
        .collect();
    Ok(ResonanceReport { entries, bin_width: None })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn tone(f: f64, dt: f64, n: usize, amp: f64, phase: f64) -> Vec<f64> {
        (0..n).map(|i| amp * (2.0 * PI * f * i as f64 * dt + phase).sin()).collect()
    }

    #[test]
    fn too_short_series_is_rejected() {
        assert_eq!(spectrum(&[0.0; 15], 1.0, 1, Window::Hann), Err(SpectralError::SeriesTooShort { len: 15 }));
        assert!(spectrum(&[0.0; 16], 1.0, 0, Window::Hann).is_err());
    }

    #[test]
    fn zero_series_has_zero_spectrum() {
        let s = spectrum(&[0.0; 64], 1e-3, 4, Window::Hann).unwrap();
        assert!(s.magnitudes.iter().all(|&m| m == 0.0));
        assert_eq!(s.frequencies.len(), 64 * 4 / 2 + 1);
        assert!(s.frequencies.windows(2).all(|w| w[1] > w[0]));
        let found = find_peaks(&s, 1, 0.0).unwrap();
        assert!(found.peaks.is_empty() && found.fewer_than_requested);
    }

    #[test]
    fn sinusoid_peak_within_one_bin() {
        let dt = 1e-3;
        let f0 = 37.3;
        let s = spectrum(&tone(f0, dt, 1000, 1.0, 0.3), dt, 1, Window::Hann).unwrap();
        let k = (1..s.magnitudes.len()).max_by(|&a, &b| s.magnitudes[a].total_cmp(&s.magnitudes[b])).unwrap();
        assert!((s.frequencies[k] - f0).abs() <= s.bin_width);
    }

    #[test]
    fn two_tones_give_two_peaks() {
        let dt = 1e-3;
        let n = 2000;
        let series: Vec<f64> = tone(50.0, dt, n, 1.0, 0.0).iter().zip(tone(60.0, dt, n, 0.5, 1.0)).map(|(a, b)| a + b).collect();
        let s = spectrum(&series, dt, 8, Window::Hann).unwrap();
        let found = find_peaks(&s, 2, 2.0).unwrap();
        assert!(!found.fewer_than_requested);
        let mut f: Vec<f64> = found.peaks.iter().map(|p| p.frequency).collect();
        f.sort_by(f64::total_cmp);
        assert!((f[0] - 50.0).abs() < 0.05 && (f[1] - 60.0).abs() < 0.05, "{f:?}");
    }

    #[test]
    fn parseval_holds() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for (n, pad) in [(100, 1), (101, 3), (256, 8)] {
            let x: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
            for window in [Window::Rectangular, Window::Hann] {
                let s = spectrum(&x, 0.1, pad, window).unwrap();
                let w = window.coefficients(n);
                let time: f64 = x.iter().zip(&w).map(|(a, b)| (a * b).powi(2)).sum();
                assert!((s.energy() - time).abs() / time < 1e-12, "n={n} pad={pad}");
            }
        }
    }

    #[test]
    fn refinement_within_tenth_of_a_bin() {
        let mut rng = ChaCha8Rng::seed_from_u64(2024);
        let dt = 1e-3;
        let n = 1024;
        for _ in 0..100 {
            let f0 = rng.gen_range(20.0..450.0);
            let phase = rng.gen_range(0.0..2.0 * PI);
            let s = spectrum(&tone(f0, dt, n, 1.0, phase), dt, DEFAULT_PAD_FACTOR, Window::Hann).unwrap();
            let found = find_peaks(&s, 1, 0.0).unwrap();
            let err = (found.peaks[0].frequency - f0).abs();
            assert!(err < 0.1 * s.bin_width, "f0={f0}: err {} bins", err / s.bin_width);
        }
    }

    #[test]
    fn monotone_spectrum_has_no_peaks() {
        let s = Spectrum {
            frequencies: (0..10).map(f64::from).collect(),
            magnitudes: (0..10).map(|k| 10.0 - k as f64).collect(),
            bin_width: 1.0,
            n_samples: 18,
            n_padded: 18,
            window: Window::Rectangular,
        };
        let found = find_peaks(&s, 3, 0.0).unwrap();
        assert!(found.peaks.is_empty());
        assert!(found.fewer_than_requested);
    }

    #[test]
    fn close_peaks_merge() {
        let mags = vec![0.0, 1.0, 5.0, 1.0, 5.0, 1.0, 0.0, 0.0];
        let s = Spectrum {
            frequencies: (0..8).map(f64::from).collect(),
            magnitudes: mags,
            bin_width: 1.0,
            n_samples: 14,
            n_padded: 14,
            window: Window::Rectangular,
        };
        assert_eq!(find_peaks(&s, 2, 0.0).unwrap().peaks.len(), 2);
        let merged = find_peaks(&s, 2, 3.0).unwrap();
        assert_eq!(merged.peaks.len(), 1);
        assert!(merged.fewer_than_requested);
    }

    #[test]
    fn resonance_examples() {
        let tm11 = analytic_resonance(ModeFamily::Tm2d, &[1.0, 2.0], &[1, 1], 1.0, 1.0).unwrap();
        assert!((tm11 - C0 / 2.0 * 1.25f64.sqrt()).abs() < 1e-6);
        assert!((tm11 - 1.6760e8).abs() / 1.6760e8 < 1e-4);
        let f101 = analytic_resonance(ModeFamily::Cavity3d, &[1.0; 3], &[1, 0, 1], 1.0, 1.0).unwrap();
        assert!((f101 - 2.1199e8).abs() / 2.1199e8 < 1e-4);
        let f011 = analytic_resonance(ModeFamily::Cavity3d, &[1.0; 3], &[0, 1, 1], 1.0, 1.0).unwrap();
        assert_eq!(f101, f011);
        let diel = analytic_resonance(ModeFamily::Cavity3d, &[1.0; 3], &[1, 0, 1], 4.0, 1.0).unwrap();
        assert!((diel - f101 / 2.0).abs() < 1e-6);
    }

    #[test]
    fn invalid_mode_indices() {
        let bad = [
            (ModeFamily::Tm2d, vec![1, 0]),
            (ModeFamily::Te2d, vec![0, 0]),
            (ModeFamily::Cavity3d, vec![1, 0, 0]),
            (ModeFamily::Cavity3d, vec![1, 1]),
        ];
        for (fam, idx) in bad {
            let dims = vec![1.0; idx.len()];
            assert!(matches!(
                analytic_resonance(fam, &dims, &idx, 1.0, 1.0),
                Err(SpectralError::InvalidModeIndices(_))
            ));
        }
        assert!(analytic_resonance(ModeFamily::Te2d, &[1.0, 2.0], &[0, 1], 1.0, 1.0).is_ok());
    }

    #[test]
    fn enumeration_and_grouping() {
        let modes = enumerate_modes(ModeFamily::Cavity3d, &[1.0; 3], 1.0, 1.0, 2.7e8).unwrap();
        let groups = group_degenerate(&modes, 1e-9);
        // (1,1,0) triple, then (1,1,1) single.
        assert_eq!(groups[0].modes.len(), 3);
        assert_eq!(groups[1].modes.len(), 1);
        assert_eq!(groups[1].representative().indices, [1, 1, 1]);
        let te = enumerate_modes(ModeFamily::Te2d, &[1.0, 2.0], 1.0, 1.0, 2e8).unwrap();
        let labels: Vec<String> = te.iter().map(CavityMode::label).collect();
        // (0,2) and (1,0) are degenerate on the 1 x 2 box.
        assert_eq!(labels[..3], ["(0,1)", "(0,2)", "(1,0)"]);
    }

    fn mode(idx: [u32; 2]) -> CavityMode {
        CavityMode::new(ModeFamily::Tm2d, &[1.0, 2.0], &idx, 1.0, 1.0).unwrap()
    }

    #[test]
    fn matching_examples() {
        let modes = [mode([1, 1]), mode([1, 2])];
        let exact: Vec<f64> = modes.iter().map(|m| m.frequency).collect();
        let r = match_and_score(&exact, &modes).unwrap();
        assert!(r.entries.iter().all(|e| e.rel_error == Some(0.0)));

        let r = match_and_score(&[1.01 * modes[0].frequency], &modes[..1]).unwrap();
        assert!((r.entries[0].rel_error.unwrap() - 0.01).abs() < 1e-12);

        let cube = |i: &[u32]| CavityMode::new(ModeFamily::Cavity3d, &[1.0; 3], i, 1.0, 1.0).unwrap();
        let pair = [cube(&[1, 0, 1]), cube(&[0, 1, 1])];
        let r = match_and_score(&[pair[0].frequency * 1.001], &pair).unwrap();
        assert_eq!(r.entries.iter().filter(|e| e.is_matched()).count(), 1);
        assert_eq!(r.unmatched().count(), 1);

        let r = match_and_score(&[modes[0].frequency * 1.2], &modes[..1]).unwrap();
        assert!(!r.entries[0].is_matched());
        assert!(match_and_score(&[1.0], &[]).is_err());
    }

    #[test]
    fn relative_error_is_scale_invariant() {
        let dt = 2e-11;
        let n = 4000;
        let modes = [mode([1, 1]), mode([1, 2])];
        let base: Vec<f64> = tone(modes[0].frequency * 1.003, dt, n, 1.0, 0.2)
            .iter()
            .zip(tone(modes[1].frequency * 0.998, dt, n, 0.7, 1.1))
            .map(|(a, b)| a + b)
            .collect();
        let report = |scale: f64| {
            let x: Vec<f64> = base.iter().map(|v| v * scale).collect();
            let s = spectrum(&x, dt, DEFAULT_PAD_FACTOR, Window::Hann).unwrap();
            let peaks: Vec<f64> = find_peaks(&s, 4, 0.0).unwrap().peaks.iter().map(|p| p.frequency).collect();
            match_and_score(&peaks, &modes).unwrap()
        };
        let r1 = report(1.0);
        for scale in [-3.0, 1e-9, 1e7] {
            let r = report(scale);
            for (a, b) in r1.entries.iter().zip(&r.entries) {
                let (a, b) = (a.rel_error.unwrap(), b.rel_error.unwrap());
                assert!((a - b).abs() <= 1e-12 * a.max(1e-6), "scale {scale}: {a} vs {b}");
            }
        }
    }

    #[test]
    fn report_csv_layout() {
        let modes = [mode([1, 1]), mode([1, 2])];
        let r = match_and_score(&[modes[0].frequency], &modes).unwrap();
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("r.csv");
        r.write_csv(&path).unwrap();
        let text = std::fs::read_to_string(&path).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], "m,n,p,f_ref_hz,f_meas_hz,rel_error");
        assert!(lines[1].starts_with("1,1,,"));
        assert!(lines[2].ends_with(",,"));
        r.write_json(dir.path().join("r.json")).unwrap();
    }
}
