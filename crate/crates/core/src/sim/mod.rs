//! Synthetic SiPM waveforms: single pulses ("good"), pile-up double pulses
//! ("ugly") and uniform random frames ("noise"), digitized to 12 bits.

mod dataset;
mod pulse;

use rand::Rng;
use rand_distr::{Distribution, Normal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

pub use dataset::{Dataset, DatasetFormat, DATASET_VERSION};
pub use pulse::{add_pulse, double_exp, PulseParams};

use crate::bnn::{RawSample, MAX_RAW};
use crate::error::{Error, Result};
use crate::seed::stream_rng;

/// Ground truth of a simulated frame.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TruthLabel {
    Good,
    Ugly,
    Noise,
}

impl TruthLabel {
    pub fn index(self) -> usize {
        match self {
            TruthLabel::Good => 0,
            TruthLabel::Ugly => 1,
            TruthLabel::Noise => 2,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            TruthLabel::Good => "good",
            TruthLabel::Ugly => "ugly",
            TruthLabel::Noise => "noise",
        }
    }

    pub fn from_name(s: &str) -> Option<Self> {
        match s {
            "good" => Some(TruthLabel::Good),
            "ugly" => Some(TruthLabel::Ugly),
            "noise" => Some(TruthLabel::Noise),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Waveform {
    pub samples: Vec<RawSample>,
    pub label: TruthLabel,
}

/// A closed real interval `[lo, hi]`, drawn from uniformly.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(from = "[f64; 2]", into = "[f64; 2]")]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
}

impl Interval {
    pub const fn new(lo: f64, hi: f64) -> Self {
        Interval { lo, hi }
    }

    fn check(&self, field: &str) -> Result<()> {
        if !(self.lo.is_finite() && self.hi.is_finite() && self.lo <= self.hi) {
            return Err(Error::config(
                field,
                format!("empty interval [{}, {}]", self.lo, self.hi),
            ));
        }
        Ok(())
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        self.lo + (self.hi - self.lo) * rng.random::<f64>()
    }
}

impl From<[f64; 2]> for Interval {
    fn from(v: [f64; 2]) -> Self {
        Interval::new(v[0], v[1])
    }
}

impl From<Interval> for [f64; 2] {
    fn from(v: Interval) -> Self {
        [v.lo, v.hi]
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SimConfig {
    pub frame_len: usize,
    pub baseline: f64,
    pub noise_sigma: f64,
    pub amplitude_range: Interval,
    pub tau_rise_range: Interval,
    pub tau_fall_range: Interval,
    pub t0_range: Interval,
    pub pileup_gap_range: Interval,
    pub rng_seed: u64,
}

impl Default for SimConfig {
    fn default() -> Self {
        SimConfig {
            frame_len: 128,
            baseline: 200.0,
            noise_sigma: 8.0,
            amplitude_range: Interval::new(300.0, 3500.0),
            tau_rise_range: Interval::new(1.5, 3.0),
            tau_fall_range: Interval::new(15.0, 30.0),
            t0_range: Interval::new(10.0, 40.0),
            pileup_gap_range: Interval::new(4.0, 50.0),
            rng_seed: 0,
        }
    }
}

impl SimConfig {
    pub fn validate(&self) -> Result<()> {
        if self.frame_len == 0 {
            return Err(Error::config("sim.frame_len", "must be >= 1"));
        }
        if !(self.baseline.is_finite()) {
            return Err(Error::config("sim.baseline", "must be finite"));
        }
        if !(self.noise_sigma >= 0.0 && self.noise_sigma.is_finite()) {
            return Err(Error::config("sim.noise_sigma", "must be >= 0"));
        }
        self.amplitude_range.check("sim.amplitude_range")?;
        self.tau_rise_range.check("sim.tau_rise_range")?;
        self.tau_fall_range.check("sim.tau_fall_range")?;
        self.t0_range.check("sim.t0_range")?;
        self.pileup_gap_range.check("sim.pileup_gap_range")?;
        if self.amplitude_range.lo <= 0.0 {
            return Err(Error::config(
                "sim.amplitude_range",
                "amplitudes must be > 0",
            ));
        }
        if self.tau_rise_range.lo <= 0.0 || self.tau_rise_range.hi >= self.tau_fall_range.lo {
            return Err(Error::config(
                "sim.tau_rise_range",
                "need 0 < tau_rise < tau_fall for every draw",
            ));
        }
        if self.t0_range.lo < 0.0 || self.pileup_gap_range.lo < 0.0 {
            return Err(Error::config("sim.t0_range", "onsets must be >= 0"));
        }
        if self.t0_range.hi + self.pileup_gap_range.hi >= self.frame_len as f64 {
            return Err(Error::config(
                "sim.pileup_gap_range",
                "second pulse onset can fall outside the frame",
            ));
        }
        Ok(())
    }

    fn noise(&self) -> Normal<f64> {
        Normal::new(0.0, self.noise_sigma).expect("noise_sigma validated")
    }
}

/// Pulses of a good frame: exactly one.
pub fn draw_good_pulses<R: Rng + ?Sized>(cfg: &SimConfig, rng: &mut R) -> Vec<PulseParams> {
    let amplitude = cfg.amplitude_range.sample(rng);
    let t0 = cfg.t0_range.sample(rng);
    let tau_rise = cfg.tau_rise_range.sample(rng);
    let tau_fall = cfg.tau_fall_range.sample(rng);
    vec![PulseParams {
        amplitude,
        t0,
        tau_rise,
        tau_fall,
    }]
}

/// Pulses of an ugly frame: exactly two, sharing the pulse shape, the second
/// delayed by a pile-up gap and with an independent amplitude.
pub fn draw_ugly_pulses<R: Rng + ?Sized>(cfg: &SimConfig, rng: &mut R) -> Vec<PulseParams> {
    let first = draw_good_pulses(cfg, rng)[0];
    let gap = cfg.pileup_gap_range.sample(rng);
    let amplitude = cfg.amplitude_range.sample(rng);
    let second = PulseParams {
        amplitude,
        t0: first.t0 + gap,
        ..first
    };
    vec![first, second]
}

/// Baseline plus pulses plus Gaussian noise, rounded half up and clipped.
pub fn render<R: Rng + ?Sized>(
    cfg: &SimConfig,
    pulses: &[PulseParams],
    rng: &mut R,
) -> Vec<RawSample> {
    let mut buf = vec![cfg.baseline; cfg.frame_len];
    for p in pulses {
        add_pulse(&mut buf, p);
    }
    let noise = cfg.noise();
    buf.iter()
        .map(|&v| digitize(v + noise.sample(rng)))
        .collect()
}

#[inline]
pub fn digitize(v: f64) -> RawSample {
    let r = (v + 0.5).floor().clamp(0.0, MAX_RAW as f64);
    RawSample::new_unchecked(r as u16)
}

pub fn gen_good<R: Rng + ?Sized>(cfg: &SimConfig, rng: &mut R) -> Waveform {
    let pulses = draw_good_pulses(cfg, rng);
    Waveform {
        samples: render(cfg, &pulses, rng),
        label: TruthLabel::Good,
    }
}

pub fn gen_ugly<R: Rng + ?Sized>(cfg: &SimConfig, rng: &mut R) -> Waveform {
    let pulses = draw_ugly_pulses(cfg, rng);
    Waveform {
        samples: render(cfg, &pulses, rng),
        label: TruthLabel::Ugly,
    }
}

/// Every sample independently uniform over the full ADC range.
pub fn gen_noise<R: Rng + ?Sized>(cfg: &SimConfig, rng: &mut R) -> Waveform {
    Waveform {
        samples: (0..cfg.frame_len)
            .map(|_| RawSample::new_unchecked(rng.random_range(0..=MAX_RAW)))
            .collect(),
        label: TruthLabel::Noise,
    }
}

/// Frame counts per label; frames are laid out good, then ugly, then noise.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct BatchCounts {
    pub good: usize,
    pub ugly: usize,
    pub noise: usize,
}

impl BatchCounts {
    pub fn new(good: usize, ugly: usize, noise: usize) -> Self {
        BatchCounts { good, ugly, noise }
    }

    pub fn total(&self) -> usize {
        self.good + self.ugly + self.noise
    }

    pub fn label_at(&self, index: usize) -> TruthLabel {
        if index < self.good {
            TruthLabel::Good
        } else if index < self.good + self.ugly {
            TruthLabel::Ugly
        } else {
            TruthLabel::Noise
        }
    }
}

/// Frame `index` of the batch rooted at `seed`; depends on nothing else.
pub fn gen_frame(cfg: &SimConfig, counts: BatchCounts, seed: u64, index: usize) -> Waveform {
    let mut rng = stream_rng(seed, index as u64);
    match counts.label_at(index) {
        TruthLabel::Good => gen_good(cfg, &mut rng),
        TruthLabel::Ugly => gen_ugly(cfg, &mut rng),
        TruthLabel::Noise => gen_noise(cfg, &mut rng),
    }
}

/// Labeled batch from `cfg.rng_seed`, generated in parallel on the current
/// rayon pool. Content is independent of the pool size.
pub fn gen_batch(
    cfg: &SimConfig,
    n_good: usize,
    n_ugly: usize,
    n_noise: usize,
) -> Result<Vec<Waveform>> {
    gen_batch_seeded(cfg, BatchCounts::new(n_good, n_ugly, n_noise), cfg.rng_seed)
}

pub fn gen_batch_seeded(cfg: &SimConfig, counts: BatchCounts, seed: u64) -> Result<Vec<Waveform>> {
    cfg.validate()?;
    Ok((0..counts.total())
        .into_par_iter()
        .map(|i| gen_frame(cfg, counts, seed, i))
        .collect())
}

/// Serial variant of [`gen_batch_seeded`] producing the same frames, for
/// callers that already parallelize at a coarser level.
pub fn gen_batch_serial(cfg: &SimConfig, counts: BatchCounts, seed: u64) -> Vec<Waveform> {
    (0..counts.total())
        .map(|i| gen_frame(cfg, counts, seed, i))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bnn::quantize_12_to_7;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn rng(seed: u64) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(seed)
    }

    #[test]
    fn default_config_is_valid() {
        SimConfig::default().validate().unwrap();
    }

    #[test]
    fn invalid_configs_rejected() {
        let bad = [
            SimConfig {
                noise_sigma: -1.0,
                ..Default::default()
            },
            SimConfig {
                tau_rise_range: Interval::new(1.0, 20.0),
                ..Default::default()
            },
            SimConfig {
                amplitude_range: Interval::new(10.0, 5.0),
                ..Default::default()
            },
            SimConfig {
                pileup_gap_range: Interval::new(4.0, 100.0),
                ..Default::default()
            },
        ];
        for c in bad {
            assert!(c.validate().is_err(), "{c:?}");
        }
    }

    #[test]
    fn flat_frame_without_pulse_or_noise() {
        let cfg = SimConfig {
            noise_sigma: 0.0,
            amplitude_range: Interval::new(1e-9, 1e-9),
            ..SimConfig::default()
        };
        let w = gen_good(&cfg, &mut rng(1));
        assert!(w.samples.iter().all(|s| s.get() == 200));
        assert_eq!(w.label, TruthLabel::Good);
    }

    #[test]
    fn generators_are_deterministic() {
        let cfg = SimConfig::default();
        assert_eq!(gen_good(&cfg, &mut rng(5)), gen_good(&cfg, &mut rng(5)));
        assert_eq!(gen_ugly(&cfg, &mut rng(5)), gen_ugly(&cfg, &mut rng(5)));
        assert_eq!(gen_noise(&cfg, &mut rng(5)), gen_noise(&cfg, &mut rng(5)));
        assert_ne!(gen_good(&cfg, &mut rng(5)), gen_good(&cfg, &mut rng(6)));
    }

    #[test]
    fn pre_pulse_region_sits_at_baseline() {
        let cfg = SimConfig::default();
        let mut r = rng(7);
        let n_frames = 1000;
        let pre = cfg.t0_range.lo as usize;
        let mut sum = 0.0;
        for _ in 0..n_frames {
            let w = gen_good(&cfg, &mut r);
            sum += w.samples[..pre].iter().map(|s| s.get() as f64).sum::<f64>();
        }
        let n = (n_frames * pre) as f64;
        let mean = sum / n;
        let tol = 3.0 * cfg.noise_sigma / n.sqrt();
        assert!((mean - cfg.baseline).abs() <= tol, "mean {mean} tol {tol}");
    }

    fn count_peaks(samples: &[RawSample], floor: u16) -> usize {
        let v: Vec<u16> = samples.iter().map(|s| s.get()).collect();
        (1..v.len() - 1)
            .filter(|&i| v[i] > floor && v[i] > v[i - 1] && v[i] >= v[i + 1])
            .count()
    }

    #[test]
    fn ugly_frames_show_two_separated_maxima() {
        let cfg = SimConfig {
            noise_sigma: 0.0,
            tau_rise_range: Interval::new(0.2, 0.3),
            tau_fall_range: Interval::new(1.0, 2.0),
            pileup_gap_range: Interval::new(50.0, 50.0),
            ..SimConfig::default()
        };
        cfg.validate().unwrap();
        let mut r = rng(3);
        for _ in 0..100 {
            let w = gen_ugly(&cfg, &mut r);
            assert_eq!(count_peaks(&w.samples, 250), 2);
            let g = gen_good(&cfg, &mut r);
            assert_eq!(count_peaks(&g.samples, 250), 1);
        }
    }

    #[test]
    fn ugly_degenerates_to_single_pulse_without_second_amplitude() {
        let cfg = SimConfig {
            noise_sigma: 0.0,
            ..SimConfig::default()
        };
        let mut r = rng(4);
        let pulses = draw_ugly_pulses(&cfg, &mut r);
        let single = render(&cfg, &pulses[..1], &mut rng(0));
        let mut tiny = pulses.clone();
        tiny[1].amplitude = 1e-9;
        assert_eq!(render(&cfg, &tiny, &mut rng(0)), single);
    }

    #[test]
    fn label_integrity() {
        let cfg = SimConfig::default();
        let mut r = rng(8);
        for _ in 0..200 {
            assert_eq!(draw_good_pulses(&cfg, &mut r).len(), 1);
            let u = draw_ugly_pulses(&cfg, &mut r);
            assert_eq!(u.len(), 2);
            let gap = u[1].t0 - u[0].t0;
            assert!((cfg.pileup_gap_range.lo..=cfg.pileup_gap_range.hi).contains(&gap));
            for p in &u {
                p.validate(Some(cfg.frame_len)).unwrap();
            }
        }
    }

    #[test]
    fn noise_frames_are_uniform() {
        let cfg = SimConfig::default();
        let mut r = rng(9);
        let mut sum = 0.0;
        let mut n = 0.0;
        for _ in 0..1000 {
            let w = gen_noise(&cfg, &mut r);
            assert_eq!(w.label, TruthLabel::Noise);
            for s in &w.samples {
                sum += s.get() as f64;
                n += 1.0;
            }
        }
        assert!((sum / n - 2047.5).abs() <= 40.0);
    }

    #[test]
    fn every_sample_in_range_and_quantizable() {
        let cfg = SimConfig {
            amplitude_range: Interval::new(3000.0, 6000.0),
            noise_sigma: 50.0,
            ..SimConfig::default()
        };
        let batch = gen_batch_seeded(&cfg, BatchCounts::new(50, 50, 50), 1).unwrap();
        assert_eq!(batch.len(), 150);
        for w in &batch {
            assert_eq!(w.samples.len(), 128);
            for s in &w.samples {
                assert!(s.get() <= 4095);
                assert!(quantize_12_to_7(*s).get() <= 127);
            }
        }
    }

    #[test]
    fn batch_layout_and_empty_batch() {
        let cfg = SimConfig::default();
        let b = gen_batch(&cfg, 200, 200, 0).unwrap();
        assert_eq!(b.len(), 400);
        assert_eq!(
            b.iter().filter(|w| w.label == TruthLabel::Good).count(),
            200
        );
        assert!(b[..200].iter().all(|w| w.label == TruthLabel::Good));
        assert!(gen_batch(&cfg, 0, 0, 0).unwrap().is_empty());
    }

    #[test]
    fn batch_independent_of_worker_count() {
        let cfg = SimConfig {
            rng_seed: 1234,
            ..SimConfig::default()
        };
        let counts = BatchCounts::new(30, 30, 30);
        let serial = gen_batch_serial(&cfg, counts, cfg.rng_seed);
        for workers in [1, 3, 8] {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(workers)
                .build()
                .unwrap();
            let par = pool.install(|| gen_batch(&cfg, 30, 30, 30).unwrap());
            assert_eq!(par, serial);
        }
    }
}
