use std::fmt::Write as _;
use std::path::Path;

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::types::WeightCode;
use crate::error::{Error, Result};

/// Layer widths of a feed-forward network.
///
/// Hidden widths are powers of two so that every layer's adder trees are
/// balanced.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct NetworkShape {
    input_len: usize,
    hidden: Vec<usize>,
    output_len: usize,
}

/// Which operation table a layer's weights select from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum LayerKind {
    /// 7-bit integer inputs, Block/Pass/Incr/Neg operations.
    First,
    /// 2-bit neuron inputs, CAM lookup.
    Cam,
}

impl LayerKind {
    /// Largest value one summand can take.
    pub fn input_max(self) -> u32 {
        match self {
            LayerKind::First => super::types::MAX_INPUT as u32,
            LayerKind::Cam => super::types::MAX_NEURON as u32,
        }
    }
}

/// One fully connected layer within the flat weight vector.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct LayerSpec {
    pub index: usize,
    pub kind: LayerKind,
    pub inputs: usize,
    pub outputs: usize,
    /// Offset of this layer's first weight in the genome.
    pub offset: usize,
}

impl LayerSpec {
    pub fn weight_count(&self) -> usize {
        self.inputs * self.outputs
    }

    /// Flat genome index of the connection `src -> dst`.
    #[inline]
    pub fn weight_index(&self, dst: usize, src: usize) -> usize {
        self.offset + dst * self.inputs + src
    }
}

impl NetworkShape {
    pub fn new(input_len: usize, hidden: Vec<usize>, output_len: usize) -> Result<Self> {
        let shape = NetworkShape {
            input_len,
            hidden,
            output_len,
        };
        shape.validate()?;
        Ok(shape)
    }

    fn validate(&self) -> Result<()> {
        if self.input_len == 0 {
            return Err(Error::InvalidShape("input_len must be >= 1".into()));
        }
        if self.output_len == 0 {
            return Err(Error::InvalidShape("output_len must be >= 1".into()));
        }
        if self.hidden.is_empty() {
            return Err(Error::InvalidShape(
                "at least one hidden layer is required".into(),
            ));
        }
        if let Some(w) = self.hidden.iter().find(|w| !w.is_power_of_two()) {
            return Err(Error::InvalidShape(format!(
                "hidden width {w} is not a power of two"
            )));
        }
        Ok(())
    }

    pub fn input_len(&self) -> usize {
        self.input_len
    }

    pub fn hidden(&self) -> &[usize] {
        &self.hidden
    }

    pub fn output_len(&self) -> usize {
        self.output_len
    }

    /// Widths including input and output, e.g. `[128, 32, 32, 2]`.
    pub fn widths(&self) -> Vec<usize> {
        let mut w = Vec::with_capacity(self.hidden.len() + 2);
        w.push(self.input_len);
        w.extend_from_slice(&self.hidden);
        w.push(self.output_len);
        w
    }

    pub fn layers(&self) -> Vec<LayerSpec> {
        let widths = self.widths();
        let mut offset = 0;
        widths
            .windows(2)
            .enumerate()
            .map(|(index, pair)| {
                let spec = LayerSpec {
                    index,
                    kind: if index == 0 {
                        LayerKind::First
                    } else {
                        LayerKind::Cam
                    },
                    inputs: pair[0],
                    outputs: pair[1],
                    offset,
                };
                offset += spec.weight_count();
                spec
            })
            .collect()
    }

    pub fn total_weights(&self) -> usize {
        self.widths().windows(2).map(|p| p[0] * p[1]).sum()
    }
}

impl std::fmt::Display for NetworkShape {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let widths: Vec<String> = self.widths().iter().map(|w| w.to_string()).collect();
        f.write_str(&widths.join("-"))
    }
}

impl std::str::FromStr for NetworkShape {
    type Err = Error;

    /// Parses the dash form, e.g. `128-32-32-2`.
    fn from_str(s: &str) -> Result<Self> {
        let widths = s
            .split('-')
            .map(|p| p.trim().parse::<usize>())
            .collect::<std::result::Result<Vec<_>, _>>()
            .map_err(|e| Error::InvalidShape(format!("{s:?}: {e}")))?;
        if widths.len() < 3 {
            return Err(Error::InvalidShape(format!(
                "{s:?}: need input, at least one hidden layer and output"
            )));
        }
        NetworkShape::new(
            widths[0],
            widths[1..widths.len() - 1].to_vec(),
            widths[widths.len() - 1],
        )
    }
}

/// Flat weight vector plus the shape it belongs to.
///
/// Weights are laid out layer by layer; within a layer, destination neuron
/// major and source neuron minor (see [`LayerSpec::weight_index`]).
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Genome {
    shape: NetworkShape,
    weights: Vec<WeightCode>,
}

/// Version of the weight layout written into genome files.
pub const GENOME_LAYOUT_VERSION: u32 = 1;
const GENOME_FORMAT_TAG: &str = "lutnet-genome";
const GENOME_LAYOUT_NAME: &str = "layer-major/destination-major/source-minor";

impl Genome {
    pub fn new(shape: NetworkShape, weights: Vec<WeightCode>) -> Result<Self> {
        if weights.len() != shape.total_weights() {
            return Err(Error::ShapeMismatch {
                expected: format!("{} weights for shape {shape}", shape.total_weights()),
                actual: format!("{} weights", weights.len()),
            });
        }
        Ok(Genome { shape, weights })
    }

    pub fn filled(shape: NetworkShape, code: WeightCode) -> Self {
        let weights = vec![code; shape.total_weights()];
        Genome { shape, weights }
    }

    pub fn random<R: Rng + ?Sized>(shape: NetworkShape, rng: &mut R) -> Self {
        let weights = (0..shape.total_weights())
            .map(|_| WeightCode::ALL[rng.random_range(0..4)])
            .collect();
        Genome { shape, weights }
    }

    pub fn shape(&self) -> &NetworkShape {
        &self.shape
    }

    pub fn weights(&self) -> &[WeightCode] {
        &self.weights
    }

    pub fn weights_mut(&mut self) -> &mut [WeightCode] {
        &mut self.weights
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    /// Weights of one layer, `outputs` rows of `inputs` codes.
    pub fn layer_weights(&self, layer: &LayerSpec) -> &[WeightCode] {
        &self.weights[layer.offset..layer.offset + layer.weight_count()]
    }

    pub fn nonzero_weight_count(&self) -> usize {
        self.weights.iter().filter(|w| !w.is_block()).count()
    }

    pub fn nonzero_fraction(&self) -> f64 {
        self.nonzero_weight_count() as f64 / self.weights.len() as f64
    }

    pub fn weight_digits(&self) -> String {
        self.weights.iter().map(|w| w.to_digit()).collect()
    }

    pub fn from_digits(shape: NetworkShape, digits: &str) -> Result<Self> {
        let weights = digits
            .chars()
            .map(WeightCode::from_digit)
            .collect::<Result<Vec<_>>>()?;
        Genome::new(shape, weights)
    }

    /// Serializes to the versioned genome text format.
    pub fn to_text(&self) -> String {
        let hidden: Vec<String> = self.shape.hidden.iter().map(|h| h.to_string()).collect();
        let mut out = String::new();
        writeln!(out, "format = \"{GENOME_FORMAT_TAG}\"").unwrap();
        writeln!(out, "layout_version = {GENOME_LAYOUT_VERSION}").unwrap();
        writeln!(out, "layout = \"{GENOME_LAYOUT_NAME}\"").unwrap();
        writeln!(out, "input_len = {}", self.shape.input_len).unwrap();
        writeln!(out, "hidden = [{}]", hidden.join(", ")).unwrap();
        writeln!(out, "output_len = {}", self.shape.output_len).unwrap();
        writeln!(out, "nonzero = {}", self.nonzero_weight_count()).unwrap();
        writeln!(out, "weights = \"{}\"", self.weight_digits()).unwrap();
        out
    }

    pub fn from_text(text: &str) -> Result<Self> {
        #[derive(Deserialize)]
        #[serde(deny_unknown_fields)]
        struct GenomeFile {
            format: String,
            layout_version: u32,
            #[allow(dead_code)]
            layout: Option<String>,
            input_len: usize,
            hidden: Vec<usize>,
            output_len: usize,
            nonzero: Option<usize>,
            weights: String,
        }
        let file: GenomeFile =
            toml::from_str(text).map_err(|e| Error::format("genome", e.to_string()))?;
        if file.format != GENOME_FORMAT_TAG {
            return Err(Error::format(
                "genome",
                format!("unknown format tag {:?}", file.format),
            ));
        }
        if file.layout_version != GENOME_LAYOUT_VERSION {
            return Err(Error::format(
                "genome",
                format!("unsupported layout version {}", file.layout_version),
            ));
        }
        let shape = NetworkShape::new(file.input_len, file.hidden, file.output_len)?;
        let genome = Genome::from_digits(shape, file.weights.trim())?;
        if let Some(n) = file.nonzero {
            if n != genome.nonzero_weight_count() {
                return Err(Error::format(
                    "genome",
                    format!(
                        "nonzero = {n} but weights contain {}",
                        genome.nonzero_weight_count()
                    ),
                ));
            }
        }
        Ok(genome)
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        std::fs::write(path, self.to_text())?;
        Ok(())
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        Genome::from_text(&std::fs::read_to_string(path)?)
    }
}
