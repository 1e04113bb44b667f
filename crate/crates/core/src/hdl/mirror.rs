//! Reads emitted VHDL back into a dataflow graph and evaluates it.
//!
//! The parser understands exactly the subset the emitter writes: constant
//! aggregates, indexed signal assignments built from `+`, `first_op`, `cam`
//! and `act` calls, and the port declarations. Anything else in an
//! assignment is an error, so a malformed netlist cannot silently evaluate.

use std::collections::HashMap;

use super::emit::EmittedDesign;
use crate::bnn::{InputSample, NeuronValue, INPUT_BITS};
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    Ident(String),
    Int(u64),
    Punct(&'static str),
}

fn tokenize(text: &str) -> Result<Vec<Tok>> {
    let mut toks = Vec::new();
    for line in text.lines() {
        let code = line.split("--").next().unwrap_or("");
        let b = code.as_bytes();
        let mut i = 0;
        while i < b.len() {
            let c = b[i] as char;
            if c.is_ascii_whitespace() {
                i += 1;
            } else if c.is_ascii_alphabetic() {
                let start = i;
                while i < b.len() && (b[i].is_ascii_alphanumeric() || b[i] == b'_') {
                    i += 1;
                }
                toks.push(Tok::Ident(code[start..i].to_ascii_lowercase()));
            } else if c.is_ascii_digit() {
                let start = i;
                while i < b.len() && b[i].is_ascii_digit() {
                    i += 1;
                }
                let v = code[start..i]
                    .parse()
                    .map_err(|_| Error::Netlist(format!("bad integer {}", &code[start..i])))?;
                toks.push(Tok::Int(v));
            } else {
                let two = code.get(i..i + 2).unwrap_or("");
                let p: &'static str = match two {
                    "<=" => "<=",
                    ":=" => ":=",
                    "=>" => "=>",
                    "**" => "**",
                    _ => match c {
                        '(' => "(",
                        ')' => ")",
                        ',' => ",",
                        ';' => ";",
                        ':' => ":",
                        '+' => "+",
                        '-' => "-",
                        '*' => "*",
                        '.' => ".",
                        '<' => "<",
                        '>' => ">",
                        '=' => "=",
                        '\'' => "'",
                        _ => return Err(Error::Netlist(format!("unexpected character {c:?}"))),
                    },
                };
                i += p.len();
                toks.push(Tok::Punct(p));
            }
        }
    }
    Ok(toks)
}

/// Splits on `;`, `is` and `begin` at parenthesis depth zero.
fn statements(toks: &[Tok]) -> Vec<&[Tok]> {
    let mut out = Vec::new();
    let mut depth = 0i32;
    let mut start = 0;
    for (i, t) in toks.iter().enumerate() {
        match t {
            Tok::Punct("(") => depth += 1,
            Tok::Punct(")") => depth -= 1,
            Tok::Punct(";") if depth == 0 => {
                out.push(&toks[start..i]);
                start = i + 1;
            }
            Tok::Ident(kw) if depth == 0 && (kw == "is" || kw == "begin") => {
                out.push(&toks[start..i]);
                start = i + 1;
            }
            _ => {}
        }
    }
    out
}

/// Nested aggregate of integers.
#[derive(Debug, Clone, PartialEq)]
enum Agg {
    Int(u64),
    List(Vec<Agg>),
}

struct Cursor<'a> {
    toks: &'a [Tok],
    pos: usize,
}

impl<'a> Cursor<'a> {
    fn new(toks: &'a [Tok]) -> Self {
        Cursor { toks, pos: 0 }
    }

    fn peek(&self) -> Option<&'a Tok> {
        self.toks.get(self.pos)
    }

    fn next(&mut self) -> Result<&'a Tok> {
        let t = self
            .toks
            .get(self.pos)
            .ok_or_else(|| Error::Netlist("unexpected end of statement".into()))?;
        self.pos += 1;
        Ok(t)
    }

    fn punct(&mut self, p: &str) -> Result<()> {
        match self.next()? {
            Tok::Punct(q) if *q == p => Ok(()),
            t => Err(Error::Netlist(format!("expected {p:?}, found {t:?}"))),
        }
    }

    fn ident(&mut self) -> Result<&'a str> {
        match self.next()? {
            Tok::Ident(s) => Ok(s),
            t => Err(Error::Netlist(format!("expected identifier, found {t:?}"))),
        }
    }

    fn int(&mut self) -> Result<u64> {
        match self.next()? {
            Tok::Int(v) => Ok(*v),
            t => Err(Error::Netlist(format!("expected integer, found {t:?}"))),
        }
    }

    fn done(&self) -> Result<()> {
        match self.peek() {
            None => Ok(()),
            Some(t) => Err(Error::Netlist(format!("trailing token {t:?}"))),
        }
    }

    fn aggregate(&mut self) -> Result<Agg> {
        if self.peek() == Some(&Tok::Punct("(")) {
            self.next()?;
            let mut items = vec![self.aggregate()?];
            while self.peek() == Some(&Tok::Punct(",")) {
                self.next()?;
                items.push(self.aggregate()?);
            }
            self.punct(")")?;
            Ok(Agg::List(items))
        } else {
            Ok(Agg::Int(self.int()?))
        }
    }

    /// `name(index)`
    fn indexed(&mut self) -> Result<(&'a str, usize)> {
        let name = self.ident()?;
        self.punct("(")?;
        let idx = self.int()? as usize;
        self.punct(")")?;
        Ok((name, idx))
    }
}

fn ints(agg: &Agg) -> Result<Vec<u64>> {
    match agg {
        Agg::List(items) => items
            .iter()
            .map(|a| match a {
                Agg::Int(v) => Ok(*v),
                Agg::List(_) => Err(Error::Netlist("expected flat aggregate".into())),
            })
            .collect(),
        Agg::Int(v) => Ok(vec![*v]),
    }
}

/// Operand reference of a LUT node.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Operand {
    Input(usize),
    Node(usize),
}

/// One vertex of the mirrored netlist.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Node {
    Const(u32),
    FirstOp { weight: u8, src: Operand },
    Cam { weight: u8, src: Operand },
    Add(usize, usize),
    Act { sum: usize, thresholds: [u32; 3] },
}

/// Counts of each node kind.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct NodeCounts {
    pub first_ops: usize,
    pub cams: usize,
    pub adders: usize,
    pub comparators: usize,
}

/// The emitted design as an evaluable graph.
#[derive(Debug, Clone)]
pub struct NetlistMirror {
    nodes: Vec<Node>,
    /// Adders between each node and the LUT outputs of its own layer.
    depth: Vec<u32>,
    input_len: usize,
    /// Output node of every neuron, per layer.
    layers: Vec<Vec<usize>>,
    /// Adder depth of every neuron's sum, per layer.
    neuron_depths: Vec<Vec<u32>>,
    output_port_bits: usize,
    cam_table: [[u32; 4]; 4],
    max_sample: u32,
    incr_shift: u32,
}

struct PackageFacts {
    cam_table: [[u32; 4]; 4],
    max_sample: u32,
    incr_shift: u32,
}

fn parse_package(text: &str) -> Result<PackageFacts> {
    let toks = tokenize(text)?;
    let mut cam = None;
    let mut max_sample = None;
    let mut incr_shift = None;
    for st in statements(&toks) {
        let mut c = Cursor::new(st);
        if c.peek() != Some(&Tok::Ident("constant".into())) {
            continue;
        }
        c.next()?;
        let name = c.ident()?;
        while c.peek().is_some() && c.peek() != Some(&Tok::Punct(":=")) {
            c.next()?;
        }
        c.punct(":=")?;
        let agg = c.aggregate()?;
        c.done()?;
        match name {
            "cam_table" => {
                let Agg::List(rows) = agg else {
                    return Err(Error::Netlist("CAM_TABLE is not a table".into()));
                };
                if rows.len() != 4 {
                    return Err(Error::Netlist("CAM_TABLE needs 4 rows".into()));
                }
                let mut t = [[0u32; 4]; 4];
                for (w, row) in rows.iter().enumerate() {
                    let vals = ints(row)?;
                    if vals.len() != 4 || vals.iter().any(|&v| v > 3) {
                        return Err(Error::Netlist(
                            "CAM_TABLE rows need 4 values in 0..=3".into(),
                        ));
                    }
                    for (x, v) in vals.into_iter().enumerate() {
                        t[w][x] = v as u32;
                    }
                }
                cam = Some(t);
            }
            "max_sample" => max_sample = Some(ints(&agg)?[0] as u32),
            "incr_shift" => incr_shift = Some(ints(&agg)?[0] as u32),
            _ => {}
        }
    }
    Ok(PackageFacts {
        cam_table: cam.ok_or_else(|| Error::Netlist("package lacks CAM_TABLE".into()))?,
        max_sample: max_sample.ok_or_else(|| Error::Netlist("package lacks MAX_SAMPLE".into()))?,
        incr_shift: incr_shift.ok_or_else(|| Error::Netlist("package lacks INCR_SHIFT".into()))?,
    })
}

/// Parses `name(k)` style layer prefixes such as `l2_w`, `s3`, `n1`.
fn layer_of(name: &str, prefix: char, suffix: &str) -> Option<usize> {
    name.strip_prefix(prefix)?
        .strip_suffix(suffix)?
        .parse()
        .ok()
}

struct Builder {
    nodes: Vec<Node>,
    depth: Vec<u32>,
    weights: HashMap<usize, Vec<u8>>,
    thresholds: HashMap<usize, Vec<[u32; 3]>>,
    sums: HashMap<(usize, usize), usize>,
    neurons: HashMap<(usize, usize), usize>,
    sum_depth: HashMap<(usize, usize), u32>,
    input_len: usize,
}

impl Builder {
    fn push(&mut self, node: Node, depth: u32) -> usize {
        self.nodes.push(node);
        self.depth.push(depth);
        self.nodes.len() - 1
    }

    fn weight(&self, layer: usize, idx: usize) -> Result<u8> {
        self.weights
            .get(&layer)
            .and_then(|w| w.get(idx))
            .copied()
            .ok_or_else(|| Error::Netlist(format!("L{layer}_W({idx}) is not declared")))
    }

    /// expr := primary ('+' primary)*
    fn expr(&mut self, c: &mut Cursor, layer: usize) -> Result<usize> {
        let mut acc = self.primary(c, layer)?;
        while c.peek() == Some(&Tok::Punct("+")) {
            c.next()?;
            let rhs = self.primary(c, layer)?;
            let d = self.depth[acc].max(self.depth[rhs]) + 1;
            acc = self.push(Node::Add(acc, rhs), d);
        }
        Ok(acc)
    }

    fn primary(&mut self, c: &mut Cursor, layer: usize) -> Result<usize> {
        match c.next()? {
            Tok::Punct("(") => {
                let e = self.expr(c, layer)?;
                c.punct(")")?;
                Ok(e)
            }
            Tok::Int(v) => Ok(self.push(Node::Const(*v as u32), 0)),
            Tok::Ident(f) if f == "first_op" || f == "cam" => {
                c.punct("(")?;
                let (wname, widx) = c.indexed()?;
                let wl = layer_of(wname, 'l', "_w")
                    .ok_or_else(|| Error::Netlist(format!("{wname} is not a weight constant")))?;
                if wl != layer {
                    return Err(Error::Netlist(format!("layer {layer} reads L{wl}_W")));
                }
                let weight = self.weight(wl, widx)?;
                c.punct(",")?;
                let (sname, sidx) = c.indexed()?;
                c.punct(")")?;
                let src = if f == "first_op" {
                    if sname != "x_s" || layer != 1 {
                        return Err(Error::Netlist(format!(
                            "first_op on {sname} in layer {layer}"
                        )));
                    }
                    if sidx >= self.input_len {
                        return Err(Error::Netlist(format!("x_s({sidx}) out of range")));
                    }
                    Operand::Input(sidx)
                } else {
                    let sl = layer_of(sname, 'n', "")
                        .ok_or_else(|| Error::Netlist(format!("cam on {sname}")))?;
                    if sl + 1 != layer {
                        return Err(Error::Netlist(format!("layer {layer} reads n{sl}")));
                    }
                    let n = *self.neurons.get(&(sl, sidx)).ok_or_else(|| {
                        Error::Netlist(format!("{sname}({sidx}) read before assignment"))
                    })?;
                    Operand::Node(n)
                };
                let node = if f == "first_op" {
                    Node::FirstOp { weight, src }
                } else {
                    Node::Cam { weight, src }
                };
                Ok(self.push(node, 0))
            }
            t => Err(Error::Netlist(format!("unexpected {t:?} in expression"))),
        }
    }
}

impl NetlistMirror {
    pub fn from_design(design: &EmittedDesign) -> Result<Self> {
        Self::parse(&design.package_text, &design.entity_text)
    }

    pub fn parse(package_text: &str, entity_text: &str) -> Result<Self> {
        let pkg = parse_package(package_text)?;
        let toks = tokenize(entity_text)?;

        let port = |name: &str| -> Result<usize> {
            let pat = [Tok::Ident(name.into()), Tok::Punct(":")];
            let at = toks
                .windows(2)
                .position(|w| w == pat)
                .ok_or_else(|| Error::Netlist(format!("port {name} not found")))?;
            let mut c = Cursor::new(&toks[at + 2..]);
            c.ident()?;
            if c.ident()? != "std_logic_vector" {
                return Err(Error::Netlist(format!(
                    "port {name} is not a std_logic_vector"
                )));
            }
            c.punct("(")?;
            let hi = c.int()? as usize;
            if c.ident()? != "downto" || c.int()? != 0 {
                return Err(Error::Netlist(format!("port {name} must be (N downto 0)")));
            }
            Ok(hi + 1)
        };
        let in_bits = port("x_in")?;
        let output_port_bits = port("y_out")?;
        if in_bits % INPUT_BITS != 0 {
            return Err(Error::Netlist(format!(
                "x_in width {in_bits} is not a multiple of {INPUT_BITS}"
            )));
        }

        let mut b = Builder {
            nodes: Vec::new(),
            depth: Vec::new(),
            weights: HashMap::new(),
            thresholds: HashMap::new(),
            sums: HashMap::new(),
            neurons: HashMap::new(),
            sum_depth: HashMap::new(),
            input_len: in_bits / INPUT_BITS,
        };

        for st in statements(&toks) {
            let mut c = Cursor::new(st);
            match c.peek() {
                Some(Tok::Ident(kw)) if kw == "constant" => {
                    c.next()?;
                    let name = c.ident()?.to_string();
                    while c.peek().is_some() && c.peek() != Some(&Tok::Punct(":=")) {
                        c.next()?;
                    }
                    c.punct(":=")?;
                    let agg = c.aggregate()?;
                    c.done()?;
                    if let Some(k) = layer_of(&name, 'l', "_w") {
                        let w = ints(&agg)?;
                        if w.iter().any(|&v| v > 3) {
                            return Err(Error::Netlist(format!("{name} holds a code above 3")));
                        }
                        b.weights
                            .insert(k, w.into_iter().map(|v| v as u8).collect());
                    } else if let Some(k) = layer_of(&name, 'l', "_t") {
                        let Agg::List(rows) = agg else {
                            return Err(Error::Netlist(format!("{name} is not a list")));
                        };
                        let mut ts = Vec::with_capacity(rows.len());
                        for r in &rows {
                            let v = ints(r)?;
                            if v.len() != 3 {
                                return Err(Error::Netlist(format!(
                                    "{name} rows need 3 thresholds"
                                )));
                            }
                            ts.push([v[0] as u32, v[1] as u32, v[2] as u32]);
                        }
                        b.thresholds.insert(k, ts);
                    }
                }
                Some(Tok::Ident(_))
                    if st.get(1) == Some(&Tok::Punct("("))
                        && st.get(4) == Some(&Tok::Punct("<=")) =>
                {
                    let (name, idx) = c.indexed()?;
                    c.punct("<=")?;
                    if let Some(k) = layer_of(name, 's', "") {
                        let node = b.expr(&mut c, k)?;
                        c.done()?;
                        if b.sums.insert((k, idx), node).is_some() {
                            return Err(Error::Netlist(format!("{name}({idx}) assigned twice")));
                        }
                        b.sum_depth.insert((k, idx), b.depth[node]);
                    } else if let Some(k) = layer_of(name, 'n', "") {
                        let node = if c.peek() == Some(&Tok::Int(0)) {
                            c.next()?;
                            b.push(Node::Const(0), 0)
                        } else {
                            if c.ident()? != "act" {
                                return Err(Error::Netlist(format!(
                                    "{name}({idx}) is not act(...)"
                                )));
                            }
                            c.punct("(")?;
                            let (sname, sidx) = c.indexed()?;
                            c.punct(",")?;
                            let (tname, tidx) = c.indexed()?;
                            c.punct(")")?;
                            if (sname, sidx) != (format!("s{k}").as_str(), idx)
                                || layer_of(tname, 'l', "_t") != Some(k)
                            {
                                return Err(Error::Netlist(format!(
                                    "{name}({idx}) reads {sname}({sidx})"
                                )));
                            }
                            let sum = *b.sums.get(&(k, sidx)).ok_or_else(|| {
                                Error::Netlist(format!("{sname}({sidx}) read before assignment"))
                            })?;
                            let thresholds =
                                *b.thresholds.get(&k).and_then(|t| t.get(tidx)).ok_or_else(
                                    || Error::Netlist(format!("{tname}({tidx}) missing")),
                                )?;
                            let d = b.depth[sum];
                            b.push(Node::Act { sum, thresholds }, d)
                        };
                        c.done()?;
                        if b.neurons.insert((k, idx), node).is_some() {
                            return Err(Error::Netlist(format!("{name}({idx}) assigned twice")));
                        }
                    } else {
                        return Err(Error::Netlist(format!("unknown signal {name}")));
                    }
                }
                _ => {}
            }
        }

        let n_layers = b.neurons.keys().map(|&(k, _)| k).max().unwrap_or(0);
        if n_layers == 0 {
            return Err(Error::Netlist("no neurons found".into()));
        }
        let mut layers = Vec::with_capacity(n_layers);
        let mut neuron_depths = Vec::with_capacity(n_layers);
        for k in 1..=n_layers {
            let width = b.neurons.keys().filter(|&&(l, _)| l == k).count();
            let mut ids = Vec::with_capacity(width);
            let mut depths = Vec::with_capacity(width);
            for j in 0..width {
                let id = *b
                    .neurons
                    .get(&(k, j))
                    .ok_or_else(|| Error::Netlist(format!("n{k}({j}) missing")))?;
                ids.push(id);
                depths.push(b.sum_depth.get(&(k, j)).copied().unwrap_or(0));
            }
            layers.push(ids);
            neuron_depths.push(depths);
        }
        if layers.last().map(Vec::len).unwrap_or(0) * 2 != output_port_bits {
            return Err(Error::Netlist(
                "y_out width does not match the last layer".into(),
            ));
        }

        Ok(NetlistMirror {
            nodes: b.nodes,
            depth: b.depth,
            input_len: b.input_len,
            layers,
            neuron_depths,
            output_port_bits,
            cam_table: pkg.cam_table,
            max_sample: pkg.max_sample,
            incr_shift: pkg.incr_shift,
        })
    }

    pub fn input_len(&self) -> usize {
        self.input_len
    }

    pub fn output_port_bits(&self) -> usize {
        self.output_port_bits
    }

    pub fn layer_widths(&self) -> Vec<usize> {
        self.layers.iter().map(Vec::len).collect()
    }

    pub fn neuron_depths(&self) -> &[Vec<u32>] {
        &self.neuron_depths
    }

    /// Deepest adder chain in each layer.
    pub fn layer_depths(&self) -> Vec<u32> {
        self.neuron_depths
            .iter()
            .map(|l| l.iter().copied().max().unwrap_or(0))
            .collect()
    }

    pub fn node_counts(&self) -> NodeCounts {
        let mut n = NodeCounts::default();
        for node in &self.nodes {
            match node {
                Node::FirstOp { .. } => n.first_ops += 1,
                Node::Cam { .. } => n.cams += 1,
                Node::Add(..) => n.adders += 1,
                Node::Act { .. } => n.comparators += 3,
                Node::Const(_) => {}
            }
        }
        n
    }

    pub fn nodes(&self) -> &[Node] {
        &self.nodes
    }

    /// Adders between node `id` and the LUT outputs of its layer.
    pub fn depth_of(&self, id: usize) -> u32 {
        self.depth[id]
    }

    pub fn evaluate(&self, input: &[InputSample]) -> Result<Vec<NeuronValue>> {
        if input.len() != self.input_len {
            return Err(Error::ShapeMismatch {
                expected: format!("{} inputs", self.input_len),
                actual: format!("{} inputs", input.len()),
            });
        }
        let x = |op: Operand, vals: &[u32]| match op {
            Operand::Input(i) => input[i].get() as u32,
            Operand::Node(n) => vals[n],
        };
        let mut vals = vec![0u32; self.nodes.len()];
        for (i, node) in self.nodes.iter().enumerate() {
            vals[i] = match *node {
                Node::Const(v) => v,
                Node::FirstOp { weight, src } => {
                    let v = x(src, &vals);
                    match weight {
                        0 => 0,
                        1 => v,
                        2 => (v << self.incr_shift).min(self.max_sample),
                        _ => self.max_sample - v,
                    }
                }
                Node::Cam { weight, src } => {
                    self.cam_table[weight as usize][x(src, &vals) as usize]
                }
                Node::Add(a, b) => vals[a] + vals[b],
                Node::Act {
                    sum,
                    thresholds: [t1, t2, t3],
                } => {
                    let s = vals[sum];
                    if s >= t3 {
                        3
                    } else if s >= t2 {
                        2
                    } else if s >= t1 {
                        1
                    } else {
                        0
                    }
                }
            };
        }
        let last = self.layers.last().expect("at least one layer");
        last.iter()
            .map(|&id| NeuronValue::new(vals[id] as u8))
            .collect()
    }
}

/// Parses `design` and evaluates it on one input vector.
pub fn mirror_evaluate(design: &EmittedDesign, input: &[InputSample]) -> Result<Vec<NeuronValue>> {
    NetlistMirror::from_design(design)?.evaluate(input)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bnn::{forward, Genome, NetworkShape, WeightCode};
    use crate::hdl::emit_entity;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn inputs(rng: &mut ChaCha8Rng, n: usize) -> Vec<InputSample> {
        (0..n)
            .map(|_| InputSample::new(rng.random_range(0..=127)).unwrap())
            .collect()
    }

    #[test]
    fn mirror_matches_forward_on_random_genomes() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for shape in ["8-4-2", "16-8-4-2", "5-1-3", "128-32-32-2"] {
            let shape: NetworkShape = shape.parse().unwrap();
            for _ in 0..3 {
                let g = Genome::random(shape.clone(), &mut rng);
                let d = emit_entity(&g, "dut").unwrap();
                let m = NetlistMirror::from_design(&d).unwrap();
                assert_eq!(m.layer_depths(), d.adder_tree_depths);
                for _ in 0..20 {
                    let x = inputs(&mut rng, shape.input_len());
                    assert_eq!(m.evaluate(&x).unwrap(), forward(&g, &x).unwrap());
                }
            }
        }
    }

    #[test]
    fn node_counts_follow_nonzero_weights() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let shape: NetworkShape = "16-8-2".parse().unwrap();
        let g = Genome::random(shape.clone(), &mut rng);
        let m = NetlistMirror::from_design(&emit_entity(&g, "dut").unwrap()).unwrap();
        let n = m.node_counts();
        let layers = shape.layers();
        let nz = |l: usize| {
            g.layer_weights(&layers[l])
                .iter()
                .filter(|w| !w.is_block())
                .count()
        };
        assert_eq!(n.first_ops, nz(0));
        assert_eq!(n.cams, nz(1));
        assert_eq!(n.first_ops + n.cams, g.nonzero_weight_count());
    }

    #[test]
    fn tampered_netlist_is_caught() {
        let g = Genome::filled("4-2-2".parse().unwrap(), WeightCode::Pass);
        let d = emit_entity(&g, "dut").unwrap();
        let x: Vec<InputSample> = [127, 127, 127, 127]
            .map(|v| InputSample::new(v).unwrap())
            .to_vec();
        let good = mirror_evaluate(&d, &x).unwrap();
        assert_eq!(good, forward(&g, &x).unwrap());

        let mut bad = d.clone();
        bad.entity_text = bad.entity_text.replacen("act(s2(0)", "act(s2(1)", 1);
        assert!(NetlistMirror::from_design(&bad).is_err());

        let mut bad = d.clone();
        bad.entity_text = bad.entity_text.replace("x_s(3)", "x_s(9)");
        assert!(NetlistMirror::from_design(&bad).is_err());

        let mut bad = d.clone();
        bad.package_text = bad.package_text.replace("(3, 2, 1, 0)", "(3, 2, 1)");
        assert!(NetlistMirror::from_design(&bad).is_err());
    }

    #[test]
    fn wrong_input_length_rejected() {
        let g = Genome::filled("4-2-2".parse().unwrap(), WeightCode::Pass);
        let d = emit_entity(&g, "dut").unwrap();
        assert!(mirror_evaluate(&d, &[InputSample::new(1).unwrap()]).is_err());
    }
}
