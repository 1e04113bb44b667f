use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use crate::bnn::ops::INCR_SHIFT;
use crate::bnn::{
    adder_depth, thresholds_for, Genome, LayerKind, LayerSpec, CAM_TABLE, INPUT_BITS, MAX_INPUT,
    NEURON_BITS,
};
use crate::error::{Error, Result};

/// Bumped whenever the emitted text changes for the same genome.
pub const EMITTER_VERSION: u32 = 1;
pub const PACKAGE_NAME: &str = "lutnet_pkg";
const LINE_WIDTH: usize = 96;
const WEIGHTS_PER_LINE: usize = 32;

/// Generated VHDL sources plus the structural facts a caller usually wants.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EmittedDesign {
    pub name: String,
    pub package_text: String,
    pub entity_text: String,
    pub input_port_bits: usize,
    pub output_port_bits: usize,
    /// Deepest adder tree of each layer.
    pub adder_tree_depths: Vec<u32>,
}

impl EmittedDesign {
    pub fn package_file_name(&self) -> String {
        format!("{}_pkg.vhd", self.name)
    }

    pub fn entity_file_name(&self) -> String {
        format!("{}.vhd", self.name)
    }

    /// Writes `<name>_pkg.vhd` and `<name>.vhd` into `dir`.
    pub fn write_to(&self, dir: impl AsRef<Path>) -> Result<(PathBuf, PathBuf)> {
        let dir = dir.as_ref();
        std::fs::create_dir_all(dir)?;
        let pkg = dir.join(self.package_file_name());
        let ent = dir.join(self.entity_file_name());
        std::fs::write(&pkg, &self.package_text)?;
        std::fs::write(&ent, &self.entity_text)?;
        Ok((pkg, ent))
    }
}

fn header() -> String {
    format!("-- Generated by lutnet VHDL emitter v{EMITTER_VERSION}. Do not edit.\n")
}

/// The shared package: types, the CAM table and the three LUT functions.
pub fn emit_package() -> String {
    let mut s = header();
    s.push_str(
        "library ieee;\n\
         use ieee.std_logic_1164.all;\n\
         use ieee.numeric_std.all;\n\n",
    );
    writeln!(s, "package {PACKAGE_NAME} is").unwrap();
    s.push_str(
        "  subtype weight_t is natural range 0 to 3;\n\
         \x20 subtype neuron_t is natural range 0 to 3;\n",
    );
    writeln!(s, "  subtype sample_t is natural range 0 to {MAX_INPUT};").unwrap();
    s.push_str(
        "\n  type weight_vector is array (natural range <>) of weight_t;\n\
         \x20 type neuron_vector is array (natural range <>) of neuron_t;\n\
         \x20 type sample_vector is array (natural range <>) of sample_t;\n\
         \x20 type threshold_t is array (1 to 3) of natural;\n\
         \x20 type threshold_vector is array (natural range <>) of threshold_t;\n\
         \x20 type cam_row_t is array (0 to 3) of neuron_t;\n\
         \x20 type cam_table_t is array (0 to 3) of cam_row_t;\n\n",
    );
    writeln!(s, "  constant MAX_SAMPLE : natural := {MAX_INPUT};").unwrap();
    writeln!(s, "  constant INCR_SHIFT : natural := {INCR_SHIFT};").unwrap();
    s.push_str("\n  -- 2-bit multiplication, indexed (weight)(value)\n");
    s.push_str("  constant CAM_TABLE : cam_table_t := (\n");
    let names = ["block", "pass", "incr", "neg"];
    for (w, row) in CAM_TABLE.iter().enumerate() {
        let sep = if w + 1 < CAM_TABLE.len() { "," } else { " " };
        writeln!(
            s,
            "    ({}, {}, {}, {}){sep}  -- {}",
            row[0], row[1], row[2], row[3], names[w]
        )
        .unwrap();
    }
    s.push_str("  );\n\n");
    s.push_str(
        "  function cam(w : weight_t; x : neuron_t) return neuron_t;\n\
         \x20 function first_op(w : weight_t; x : sample_t) return sample_t;\n\
         \x20 function act(s : natural; t : threshold_t) return neuron_t;\n",
    );
    writeln!(s, "end package {PACKAGE_NAME};\n").unwrap();

    writeln!(s, "package body {PACKAGE_NAME} is").unwrap();
    s.push_str(
        "  function cam(w : weight_t; x : neuron_t) return neuron_t is\n\
         \x20 begin\n\
         \x20   return CAM_TABLE(w)(x);\n\
         \x20 end function cam;\n\n\
         \x20 -- first layer: block, pass, saturating shift, 7-bit complement\n\
         \x20 function first_op(w : weight_t; x : sample_t) return sample_t is\n\
         \x20 begin\n\
         \x20   case w is\n\
         \x20     when 0 => return 0;\n\
         \x20     when 1 => return x;\n\
         \x20     when 2 =>\n\
         \x20       if x * 2 ** INCR_SHIFT > MAX_SAMPLE then\n\
         \x20         return MAX_SAMPLE;\n\
         \x20       else\n\
         \x20         return x * 2 ** INCR_SHIFT;\n\
         \x20       end if;\n\
         \x20     when others => return MAX_SAMPLE - x;\n\
         \x20   end case;\n\
         \x20 end function first_op;\n\n\
         \x20 -- thresholds are inclusive on the upper bin\n\
         \x20 function act(s : natural; t : threshold_t) return neuron_t is\n\
         \x20 begin\n\
         \x20   if s >= t(3) then\n\
         \x20     return 3;\n\
         \x20   elsif s >= t(2) then\n\
         \x20     return 2;\n\
         \x20   elsif s >= t(1) then\n\
         \x20     return 1;\n\
         \x20   else\n\
         \x20     return 0;\n\
         \x20   end if;\n\
         \x20 end function act;\n",
    );
    writeln!(s, "end package body {PACKAGE_NAME};").unwrap();
    s
}

/// Checks `name` is a basic VHDL identifier.
pub fn validate_entity_name(name: &str) -> Result<()> {
    let ok = name.chars().next().is_some_and(|c| c.is_ascii_alphabetic())
        && name.chars().all(|c| c.is_ascii_alphanumeric() || c == '_')
        && !name.ends_with('_')
        && !name.contains("__");
    if ok {
        Ok(())
    } else {
        Err(Error::config(
            "name",
            format!("{name:?} is not a VHDL identifier"),
        ))
    }
}

/// Balanced, fully parenthesized sum of `leaves`.
pub(crate) fn balanced_expr(leaves: &[String]) -> String {
    match leaves.len() {
        0 => "0".to_string(),
        1 => leaves[0].clone(),
        n => {
            let mid = n.div_ceil(2);
            format!(
                "({} + {})",
                balanced_expr(&leaves[..mid]),
                balanced_expr(&leaves[mid..])
            )
        }
    }
}

/// Breaks an assignment after `+` operators to keep lines near `LINE_WIDTH`.
fn wrap_assignment(lhs: &str, rhs: &str) -> String {
    let indent = "      ";
    let mut out = String::new();
    let mut line = format!("  {lhs} <= ");
    let pieces: Vec<&str> = rhs.split(" + ").collect();
    for (i, piece) in pieces.iter().enumerate() {
        let last = i + 1 == pieces.len();
        let tail = if last { ";" } else { " +" };
        if line.trim().len() > 2 && line.len() + piece.len() + tail.len() > LINE_WIDTH {
            out.push_str(line.trim_end());
            out.push('\n');
            line = indent.to_string();
        }
        line.push_str(piece);
        line.push_str(tail);
        if !last {
            line.push(' ');
        }
    }
    out.push_str(&line);
    out.push('\n');
    out
}

fn layer_nonzero(genome: &Genome, layer: &LayerSpec, dst: usize) -> Vec<usize> {
    let w = genome.layer_weights(layer);
    (0..layer.inputs)
        .filter(|&s| !w[dst * layer.inputs + s].is_block())
        .collect()
}

/// Emits the combinatorial entity for `genome`.
pub fn emit_entity(genome: &Genome, name: &str) -> Result<EmittedDesign> {
    validate_entity_name(name)?;
    let shape = genome.shape();
    let layers = shape.layers();
    let n_layers = layers.len();
    let input_port_bits = shape.input_len() * INPUT_BITS;
    let output_port_bits = shape.output_len() * NEURON_BITS;

    let mut s = header();
    writeln!(
        s,
        "-- Network {shape}, {} of {} weights nonzero.",
        genome.nonzero_weight_count(),
        genome.len()
    )
    .unwrap();
    s.push_str(
        "library ieee;\n\
         use ieee.std_logic_1164.all;\n\
         use ieee.numeric_std.all;\n",
    );
    writeln!(s, "use work.{PACKAGE_NAME}.all;\n").unwrap();
    writeln!(s, "entity {name} is").unwrap();
    s.push_str("  port (\n");
    writeln!(
        s,
        "    x_in  : in  std_logic_vector({} downto 0);",
        input_port_bits - 1
    )
    .unwrap();
    writeln!(
        s,
        "    y_out : out std_logic_vector({} downto 0)",
        output_port_bits - 1
    )
    .unwrap();
    s.push_str("  );\n");
    writeln!(s, "end entity {name};\n").unwrap();
    writeln!(s, "architecture comb of {name} is").unwrap();

    let mut depths = Vec::with_capacity(n_layers);
    for layer in &layers {
        let k = layer.index + 1;
        let kind = match layer.kind {
            LayerKind::First => "integer operations",
            LayerKind::Cam => "CAM multiplication",
        };
        writeln!(
            s,
            "  -- layer {k}: {} -> {}, {kind}",
            layer.inputs, layer.outputs
        )
        .unwrap();
        let w = genome.layer_weights(layer);
        writeln!(
            s,
            "  constant L{k}_W : weight_vector(0 to {}) := (",
            w.len() - 1
        )
        .unwrap();
        for (i, chunk) in w.chunks(WEIGHTS_PER_LINE).enumerate() {
            let digits: Vec<String> = chunk.iter().map(|c| c.code().to_string()).collect();
            let sep = if (i + 1) * WEIGHTS_PER_LINE < w.len() {
                ","
            } else {
                ""
            };
            writeln!(s, "    {}{sep}", digits.join(", ")).unwrap();
        }
        s.push_str("  );\n");
        writeln!(
            s,
            "  constant L{k}_T : threshold_vector(0 to {}) := (",
            layer.outputs - 1
        )
        .unwrap();
        let mut layer_depth = 0;
        for dst in 0..layer.outputs {
            let nz = layer_nonzero(genome, layer, dst).len();
            layer_depth = layer_depth.max(adder_depth(nz));
            let t = thresholds_for(nz, layer.kind.input_max());
            let sep = if dst + 1 < layer.outputs { "," } else { "" };
            writeln!(s, "    ({}, {}, {}){sep}", t.t1(), t.t2(), t.t3()).unwrap();
        }
        s.push_str("  );\n");
        let sum_max = layer.inputs as u64 * layer.kind.input_max() as u64;
        writeln!(s, "  subtype sum{k}_t is natural range 0 to {sum_max};").unwrap();
        writeln!(
            s,
            "  type sum{k}_vector is array (0 to {}) of sum{k}_t;",
            layer.outputs - 1
        )
        .unwrap();
        writeln!(s, "  signal s{k} : sum{k}_vector;").unwrap();
        writeln!(
            s,
            "  signal n{k} : neuron_vector(0 to {});\n",
            layer.outputs - 1
        )
        .unwrap();
        depths.push(layer_depth);
    }
    writeln!(
        s,
        "  signal x_s : sample_vector(0 to {});",
        shape.input_len() - 1
    )
    .unwrap();
    s.push_str("begin\n");
    writeln!(
        s,
        "  unpack : for i in 0 to {} generate",
        shape.input_len() - 1
    )
    .unwrap();
    writeln!(
        s,
        "    x_s(i) <= to_integer(unsigned(x_in({b} * i + {} downto {b} * i)));",
        INPUT_BITS - 1,
        b = INPUT_BITS
    )
    .unwrap();
    s.push_str("  end generate unpack;\n");

    for layer in &layers {
        let k = layer.index + 1;
        writeln!(s, "\n  -- layer {k}").unwrap();
        for dst in 0..layer.outputs {
            let srcs = layer_nonzero(genome, layer, dst);
            let leaves: Vec<String> = srcs
                .iter()
                .map(|&src| {
                    let widx = dst * layer.inputs + src;
                    match layer.kind {
                        LayerKind::First => format!("first_op(L{k}_W({widx}), x_s({src}))"),
                        LayerKind::Cam => format!("cam(L{k}_W({widx}), n{}({src}))", k - 1),
                    }
                })
                .collect();
            s.push_str(&wrap_assignment(
                &format!("s{k}({dst})"),
                &balanced_expr(&leaves),
            ));
            if srcs.is_empty() {
                writeln!(s, "  n{k}({dst}) <= 0;").unwrap();
            } else {
                writeln!(s, "  n{k}({dst}) <= act(s{k}({dst}), L{k}_T({dst}));").unwrap();
            }
        }
    }

    writeln!(
        s,
        "\n  pack : for j in 0 to {} generate",
        shape.output_len() - 1
    )
    .unwrap();
    writeln!(
        s,
        "    y_out({b} * j + {} downto {b} * j) <= std_logic_vector(to_unsigned(n{n_layers}(j), {b}));",
        NEURON_BITS - 1,
        b = NEURON_BITS
    )
    .unwrap();
    s.push_str("  end generate pack;\n");
    writeln!(s, "end architecture comb;").unwrap();

    Ok(EmittedDesign {
        name: name.to_string(),
        package_text: emit_package(),
        entity_text: s,
        input_port_bits,
        output_port_bits,
        adder_tree_depths: depths,
    })
}

/// Identifiers and idioms that imply registers or clocked processes.
pub const CLOCKED_DENY_LIST: &[&str] = &[
    "rising_edge",
    "falling_edge",
    "'event",
    "process",
    "clk",
    "clock",
    "register",
    "wait",
    "after",
];

/// Deny-list hits in `text`, ignoring comments.
pub fn clocked_constructs(text: &str) -> Vec<&'static str> {
    let code: String = text
        .lines()
        .map(|l| l.split("--").next().unwrap_or(""))
        .collect::<Vec<_>>()
        .join("\n")
        .to_ascii_lowercase();
    let words: Vec<&str> = code
        .split(|c: char| !(c.is_ascii_alphanumeric() || c == '_' || c == '\''))
        .collect();
    CLOCKED_DENY_LIST
        .iter()
        .copied()
        .filter(|bad| {
            if bad.starts_with('\'') {
                code.contains(bad)
            } else {
                words.contains(bad)
            }
        })
        .collect()
}
