//! On-disk datasets.
//!
//! Text form (`lutnet-dataset` v1):
//!
//! ```text
//! # lutnet-dataset v1
//! # seed 42
//! # counts good=200 ugly=200 noise=0
//! # config {"frame_len":128,...}
//! good,201,199,...
//! ```
//!
//! One record per line: the label followed by `frame_len` integer samples.
//!
//! Binary form, all integers little-endian:
//!
//! ```text
//! magic "LNDS" | version u16 | frame_len u16 | frames u32 | seed u64
//! | good u32 | ugly u32 | noise u32 | config_len u32 | config JSON
//! | per frame: label u8 (0 good, 1 ugly, 2 noise), frame_len x u16
//! ```

use std::fmt::Write as _;
use std::path::Path;

use super::{BatchCounts, SimConfig, TruthLabel, Waveform};
use crate::bnn::RawSample;
use crate::error::{Error, Result};

pub const DATASET_VERSION: u16 = 1;
const TEXT_TAG: &str = "# lutnet-dataset v1";
const MAGIC: &[u8; 4] = b"LNDS";

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DatasetFormat {
    Text,
    Binary,
}

impl DatasetFormat {
    /// `.bin` selects binary, anything else text.
    pub fn for_path(path: &Path) -> Self {
        match path.extension().and_then(|e| e.to_str()) {
            Some("bin") => DatasetFormat::Binary,
            _ => DatasetFormat::Text,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    pub config: SimConfig,
    pub seed: u64,
    pub frames: Vec<Waveform>,
}

impl Dataset {
    pub fn counts(&self) -> BatchCounts {
        let mut c = BatchCounts::default();
        for f in &self.frames {
            match f.label {
                TruthLabel::Good => c.good += 1,
                TruthLabel::Ugly => c.ugly += 1,
                TruthLabel::Noise => c.noise += 1,
            }
        }
        c
    }

    pub fn to_text(&self) -> String {
        let c = self.counts();
        let mut out = String::new();
        writeln!(out, "{TEXT_TAG}").unwrap();
        writeln!(out, "# seed {}", self.seed).unwrap();
        writeln!(
            out,
            "# counts good={} ugly={} noise={}",
            c.good, c.ugly, c.noise
        )
        .unwrap();
        writeln!(
            out,
            "# config {}",
            serde_json::to_string(&self.config).unwrap()
        )
        .unwrap();
        for f in &self.frames {
            out.push_str(f.label.name());
            for s in &f.samples {
                write!(out, ",{}", s.get()).unwrap();
            }
            out.push('\n');
        }
        out
    }

    pub fn from_text(text: &str) -> Result<Self> {
        let err =
            |line: usize, msg: String| Error::format("dataset", format!("line {line}: {msg}"));
        let mut lines = text.lines().enumerate().map(|(i, l)| (i + 1, l));
        match lines.next() {
            Some((_, l)) if l.trim_end() == TEXT_TAG => {}
            _ => {
                return Err(Error::format(
                    "dataset",
                    format!("missing header {TEXT_TAG:?}"),
                ))
            }
        }
        let mut seed = None;
        let mut config = None;
        let mut declared = None;
        let mut frames = Vec::new();
        for (n, line) in lines {
            if let Some(rest) = line.strip_prefix("# ") {
                if let Some(v) = rest.strip_prefix("seed ") {
                    seed = Some(v.trim().parse::<u64>().map_err(|e| err(n, e.to_string()))?);
                } else if let Some(v) = rest.strip_prefix("config ") {
                    config = Some(
                        serde_json::from_str::<SimConfig>(v).map_err(|e| err(n, e.to_string()))?,
                    );
                } else if let Some(v) = rest.strip_prefix("counts ") {
                    declared = Some(parse_counts(v).ok_or_else(|| err(n, "bad counts".into()))?);
                }
                continue;
            }
            if line.trim().is_empty() {
                continue;
            }
            let cfg: &SimConfig = config
                .as_ref()
                .ok_or_else(|| err(n, "record before config header".into()))?;
            let mut fields = line.split(',');
            let label = fields.next().unwrap_or_default();
            let label = TruthLabel::from_name(label.trim())
                .ok_or_else(|| err(n, format!("unknown label {label:?}")))?;
            let samples = fields
                .map(|f| {
                    let v: i64 = f
                        .trim()
                        .parse()
                        .map_err(|_| err(n, format!("bad sample {f:?}")))?;
                    RawSample::from_i64(v).map_err(|e| err(n, e.to_string()))
                })
                .collect::<Result<Vec<_>>>()?;
            if samples.len() != cfg.frame_len {
                return Err(err(
                    n,
                    format!("{} samples, expected {}", samples.len(), cfg.frame_len),
                ));
            }
            frames.push(Waveform { samples, label });
        }
        let ds = Dataset {
            config: config.ok_or_else(|| Error::format("dataset", "missing config header"))?,
            seed: seed.ok_or_else(|| Error::format("dataset", "missing seed header"))?,
            frames,
        };
        if let Some(c) = declared {
            if c != ds.counts() {
                return Err(Error::format("dataset", "record counts differ from header"));
            }
        }
        Ok(ds)
    }

    pub fn to_binary(&self) -> Vec<u8> {
        let c = self.counts();
        let config = serde_json::to_vec(&self.config).unwrap();
        let frame_len = self.config.frame_len;
        let mut out =
            Vec::with_capacity(36 + config.len() + self.frames.len() * (1 + 2 * frame_len));
        out.extend_from_slice(MAGIC);
        out.extend_from_slice(&DATASET_VERSION.to_le_bytes());
        out.extend_from_slice(&(frame_len as u16).to_le_bytes());
        out.extend_from_slice(&(self.frames.len() as u32).to_le_bytes());
        out.extend_from_slice(&self.seed.to_le_bytes());
        for n in [c.good, c.ugly, c.noise] {
            out.extend_from_slice(&(n as u32).to_le_bytes());
        }
        out.extend_from_slice(&(config.len() as u32).to_le_bytes());
        out.extend_from_slice(&config);
        for f in &self.frames {
            out.push(f.label.index() as u8);
            for s in &f.samples {
                out.extend_from_slice(&s.get().to_le_bytes());
            }
        }
        out
    }

    pub fn from_binary(bytes: &[u8]) -> Result<Self> {
        let mut r = Reader { bytes, pos: 0 };
        if r.take(4)? != MAGIC {
            return Err(Error::format("dataset", "bad magic"));
        }
        let version = r.u16()?;
        if version != DATASET_VERSION {
            return Err(Error::format(
                "dataset",
                format!("unsupported version {version}"),
            ));
        }
        let frame_len = r.u16()? as usize;
        let n_frames = r.u32()? as usize;
        let seed = r.u64()?;
        let declared = BatchCounts::new(r.u32()? as usize, r.u32()? as usize, r.u32()? as usize);
        let config_len = r.u32()? as usize;
        let config: SimConfig = serde_json::from_slice(r.take(config_len)?)
            .map_err(|e| Error::format("dataset", e.to_string()))?;
        if config.frame_len != frame_len {
            return Err(Error::format("dataset", "frame_len differs from config"));
        }
        let mut frames = Vec::with_capacity(n_frames);
        for _ in 0..n_frames {
            let label = match r.take(1)?[0] {
                0 => TruthLabel::Good,
                1 => TruthLabel::Ugly,
                2 => TruthLabel::Noise,
                other => return Err(Error::format("dataset", format!("bad label byte {other}"))),
            };
            let samples = (0..frame_len)
                .map(|_| RawSample::new(r.u16()?))
                .collect::<Result<Vec<_>>>()?;
            frames.push(Waveform { samples, label });
        }
        if r.pos != bytes.len() {
            return Err(Error::format("dataset", "trailing bytes"));
        }
        let ds = Dataset {
            config,
            seed,
            frames,
        };
        if ds.counts() != declared {
            return Err(Error::format("dataset", "record counts differ from header"));
        }
        Ok(ds)
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        match DatasetFormat::for_path(path) {
            DatasetFormat::Text => std::fs::write(path, self.to_text())?,
            DatasetFormat::Binary => std::fs::write(path, self.to_binary())?,
        }
        Ok(())
    }

    /// Loads either format, detected from the leading bytes.
    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let bytes = std::fs::read(path)?;
        if bytes.starts_with(MAGIC) {
            Dataset::from_binary(&bytes)
        } else {
            let text = String::from_utf8(bytes)
                .map_err(|_| Error::format("dataset", "neither binary nor UTF-8 text"))?;
            Dataset::from_text(&text)
        }
    }
}

fn parse_counts(s: &str) -> Option<BatchCounts> {
    let mut c = BatchCounts::default();
    for part in s.split_whitespace() {
        let (k, v) = part.split_once('=')?;
        let v: usize = v.parse().ok()?;
        match k {
            "good" => c.good = v,
            "ugly" => c.ugly = v,
            "noise" => c.noise = v,
            _ => return None,
        }
    }
    Some(c)
}

struct Reader<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> Reader<'a> {
    fn take(&mut self, n: usize) -> Result<&'a [u8]> {
        let end = self
            .pos
            .checked_add(n)
            .filter(|&e| e <= self.bytes.len())
            .ok_or_else(|| Error::format("dataset", "truncated file"))?;
        let s = &self.bytes[self.pos..end];
        self.pos = end;
        Ok(s)
    }

    fn u16(&mut self) -> Result<u16> {
        Ok(u16::from_le_bytes(self.take(2)?.try_into().unwrap()))
    }

    fn u32(&mut self) -> Result<u32> {
        Ok(u32::from_le_bytes(self.take(4)?.try_into().unwrap()))
    }

    fn u64(&mut self) -> Result<u64> {
        Ok(u64::from_le_bytes(self.take(8)?.try_into().unwrap()))
    }
}
