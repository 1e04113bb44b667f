use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Shape of one double-exponential SiPM pulse. Times are in samples.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PulseParams {
    /// Observable pulse height above baseline, ADC counts.
    pub amplitude: f64,
    pub t0: f64,
    pub tau_rise: f64,
    pub tau_fall: f64,
}

impl PulseParams {
    pub fn new(amplitude: f64, t0: f64, tau_rise: f64, tau_fall: f64) -> Result<Self> {
        let p = PulseParams {
            amplitude,
            t0,
            tau_rise,
            tau_fall,
        };
        p.validate(None)?;
        Ok(p)
    }

    /// Checks the shape invariants, and `t0` against the frame when given.
    pub fn validate(&self, frame_len: Option<usize>) -> Result<()> {
        if !(self.amplitude > 0.0 && self.amplitude.is_finite()) {
            return Err(Error::config("amplitude", "must be > 0"));
        }
        if !(self.tau_rise > 0.0 && self.tau_rise < self.tau_fall && self.tau_fall.is_finite()) {
            return Err(Error::config("tau", "need 0 < tau_rise < tau_fall"));
        }
        if !(self.t0 >= 0.0 && self.t0.is_finite()) {
            return Err(Error::config("t0", "must be >= 0"));
        }
        if let Some(len) = frame_len {
            if self.t0 >= len as f64 {
                return Err(Error::config("t0", format!("must be < frame length {len}")));
            }
        }
        Ok(())
    }

    /// Time after onset at which the unnormalized shape peaks.
    pub fn peak_delay(&self) -> f64 {
        let (r, f) = (self.tau_rise, self.tau_fall);
        r * f * (f / r).ln() / (f - r)
    }

    /// Scale factor that makes the pulse maximum equal `amplitude`.
    pub fn norm(&self) -> f64 {
        let tp = self.peak_delay();
        let raw_peak = (-tp / self.tau_fall).exp() - (-tp / self.tau_rise).exp();
        self.amplitude / raw_peak
    }
}

/// Peak-normalized double exponential, zero before onset.
pub fn double_exp(t: f64, p: &PulseParams) -> f64 {
    if t < p.t0 {
        return 0.0;
    }
    let dt = t - p.t0;
    p.norm() * ((-dt / p.tau_fall).exp() - (-dt / p.tau_rise).exp())
}

/// Adds `p` sampled at integer times `0..buf.len()` into `buf`.
///
/// Uses the geometric recurrence of the exponentials instead of calling
/// `exp` per sample.
pub fn add_pulse(buf: &mut [f64], p: &PulseParams) {
    let start = p.t0.ceil().max(0.0) as usize;
    if start >= buf.len() {
        return;
    }
    let dt0 = start as f64 - p.t0;
    let norm = p.norm();
    let mut ef = (-dt0 / p.tau_fall).exp();
    let mut er = (-dt0 / p.tau_rise).exp();
    let rf = (-1.0 / p.tau_fall).exp();
    let rr = (-1.0 / p.tau_rise).exp();
    for v in &mut buf[start..] {
        *v += norm * (ef - er);
        ef *= rf;
        er *= rr;
    }
}
