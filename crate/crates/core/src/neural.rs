//! Small dense feed-forward networks with exact reverse-mode gradients and
//! Adam, used as the DQN Q-network and the DDPG actor/critic.
//!
//! Weights are stored row-major, `output_width × input_width`, in `f64`.

use std::fmt::Write as _;

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum NeuralError {
    #[error("layer widths do not chain: layer {layer} expects {expected} inputs, previous layer gives {actual}")]
    WidthMismatch {
        layer: usize,
        expected: usize,
        actual: usize,
    },
    #[error("input has {actual} entries, network expects {expected}")]
    InputWidth { expected: usize, actual: usize },
    #[error("shape mismatch: {0}")]
    Shape(String),
    #[error("non-finite gradient in layer {layer}")]
    NonFiniteGradient { layer: usize },
    #[error("network needs at least one layer")]
    Empty,
    #[error("checkpoint line {line}: {message}")]
    Checkpoint { line: usize, message: String },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Activation {
    Relu,
    Tanh,
    Identity,
}

impl Activation {
    fn apply(self, z: f64) -> f64 {
        match self {
            Activation::Relu => z.max(0.0),
            Activation::Tanh => z.tanh(),
            Activation::Identity => z,
        }
    }

    // derivative expressed through pre-activation z and output a
    fn derivative(self, z: f64, a: f64) -> f64 {
        match self {
            Activation::Relu => {
                if z > 0.0 {
                    1.0
                } else {
                    0.0
                }
            }
            Activation::Tanh => 1.0 - a * a,
            Activation::Identity => 1.0,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Activation::Relu => "relu",
            Activation::Tanh => "tanh",
            Activation::Identity => "identity",
        }
    }

    pub fn from_name(s: &str) -> Option<Self> {
        match s {
            "relu" => Some(Activation::Relu),
            "tanh" => Some(Activation::Tanh),
            "identity" => Some(Activation::Identity),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct LayerSpec {
    pub input_width: usize,
    pub output_width: usize,
    pub activation: Activation,
}

impl LayerSpec {
    pub const fn new(input_width: usize, output_width: usize, activation: Activation) -> Self {
        Self {
            input_width,
            output_width,
            activation,
        }
    }
}

/// Builds the spec chain `input → hidden… → output`: ReLU on every hidden
/// layer, `output_activation` on the last.
pub fn mlp_specs(
    input: usize,
    hidden: &[usize],
    output: usize,
    output_activation: Activation,
) -> Vec<LayerSpec> {
    let mut widths = Vec::with_capacity(hidden.len() + 2);
    widths.push(input);
    widths.extend_from_slice(hidden);
    widths.push(output);
    let last = widths.len() - 2;
    widths
        .windows(2)
        .enumerate()
        .map(|(i, w)| {
            let act = if i == last {
                output_activation
            } else {
                Activation::Relu
            };
            LayerSpec::new(w[0], w[1], act)
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct Layer {
    pub spec: LayerSpec,
    pub weights: Vec<f64>,
    pub bias: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
struct Moments {
    m_w: Vec<f64>,
    v_w: Vec<f64>,
    m_b: Vec<f64>,
    v_b: Vec<f64>,
}

/// Layer parameters together with their Adam accumulators.
#[derive(Debug, Clone, PartialEq)]
pub struct Network {
    layers: Vec<Layer>,
    moments: Vec<Moments>,
    adam_steps: u64,
    seed: u64,
}

/// Per-layer inputs and pre-activations recorded by [`Network::forward`].
#[derive(Debug, Clone)]
pub struct ForwardCache {
    inputs: Vec<Vec<f64>>,
    pre: Vec<Vec<f64>>,
    outputs: Vec<Vec<f64>>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LayerGradient {
    pub weights: Vec<f64>,
    pub bias: Vec<f64>,
}

/// Gradients with the same shapes as a network's parameters.
#[derive(Debug, Clone, PartialEq)]
pub struct Gradients {
    pub layers: Vec<LayerGradient>,
}

impl Gradients {
    pub fn zeros_like(net: &Network) -> Self {
        Self {
            layers: net
                .layers
                .iter()
                .map(|l| LayerGradient {
                    weights: vec![0.0; l.weights.len()],
                    bias: vec![0.0; l.bias.len()],
                })
                .collect(),
        }
    }

    /// `self += scale · other`
    pub fn add_scaled(&mut self, other: &Gradients, scale: f64) {
        for (a, b) in self.layers.iter_mut().zip(&other.layers) {
            for (x, y) in a.weights.iter_mut().zip(&b.weights) {
                *x += scale * y;
            }
            for (x, y) in a.bias.iter_mut().zip(&b.bias) {
                *x += scale * y;
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AdamConfig {
    pub learning_rate: f64,
    pub beta1: f64,
    pub beta2: f64,
    pub epsilon: f64,
}

impl AdamConfig {
    pub const fn with_rate(learning_rate: f64) -> Self {
        Self {
            learning_rate,
            beta1: 0.9,
            beta2: 0.999,
            epsilon: 1e-8,
        }
    }
}

/// Whether an Adam step lowers (loss) or raises (policy objective) the scalar
/// whose gradient is supplied.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    Descent,
    Ascent,
}

impl Network {
    /// Glorot-uniform weights, zero biases, deterministic per seed.
    pub fn init(specs: &[LayerSpec], seed: u64) -> Result<Self, NeuralError> {
        check_chain(specs)?;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let layers = specs
            .iter()
            .map(|&spec| {
                let bound = (6.0 / (spec.input_width + spec.output_width) as f64).sqrt();
                let weights = (0..spec.input_width * spec.output_width)
                    .map(|_| rng.random_range(-bound..=bound))
                    .collect();
                Layer {
                    spec,
                    weights,
                    bias: vec![0.0; spec.output_width],
                }
            })
            .collect();
        Ok(Self::from_layers(layers, seed))
    }

    /// Wraps explicit layers; Adam state starts fresh.
    pub fn from_layers(layers: Vec<Layer>, seed: u64) -> Self {
        let moments = layers
            .iter()
            .map(|l| Moments {
                m_w: vec![0.0; l.weights.len()],
                v_w: vec![0.0; l.weights.len()],
                m_b: vec![0.0; l.bias.len()],
                v_b: vec![0.0; l.bias.len()],
            })
            .collect();
        Self {
            layers,
            moments,
            adam_steps: 0,
            seed,
        }
    }

    pub fn layers(&self) -> &[Layer] {
        &self.layers
    }

    pub fn layers_mut(&mut self) -> &mut [Layer] {
        &mut self.layers
    }

    pub fn specs(&self) -> Vec<LayerSpec> {
        self.layers.iter().map(|l| l.spec).collect()
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn adam_steps(&self) -> u64 {
        self.adam_steps
    }

    pub fn input_width(&self) -> usize {
        self.layers[0].spec.input_width
    }

    pub fn output_width(&self) -> usize {
        self.layers[self.layers.len() - 1].spec.output_width
    }

    pub fn forward(&self, input: &[f64]) -> Result<(Vec<f64>, ForwardCache), NeuralError> {
        self.check_input(input)?;
        let mut cache = ForwardCache {
            inputs: Vec::with_capacity(self.layers.len()),
            pre: Vec::with_capacity(self.layers.len()),
            outputs: Vec::with_capacity(self.layers.len()),
        };
        let mut x = input.to_vec();
        for layer in &self.layers {
            let z = affine(layer, &x);
            let a: Vec<f64> = z.iter().map(|&v| layer.spec.activation.apply(v)).collect();
            cache.inputs.push(x);
            cache.pre.push(z);
            cache.outputs.push(a.clone());
            x = a;
        }
        Ok((x, cache))
    }

    /// Forward pass without keeping a cache.
    pub fn predict(&self, input: &[f64]) -> Result<Vec<f64>, NeuralError> {
        self.check_input(input)?;
        let mut x = input.to_vec();
        for layer in &self.layers {
            x = affine(layer, &x)
                .into_iter()
                .map(|v| layer.spec.activation.apply(v))
                .collect();
        }
        Ok(x)
    }

    /// Reverse pass. `output_gradient` is ∂L/∂output; returns the parameter
    /// gradients and ∂L/∂input.
    pub fn backward(
        &self,
        cache: &ForwardCache,
        output_gradient: &[f64],
    ) -> Result<(Gradients, Vec<f64>), NeuralError> {
        if cache.pre.len() != self.layers.len() {
            return Err(NeuralError::Shape(format!(
                "cache has {} layers, network has {}",
                cache.pre.len(),
                self.layers.len()
            )));
        }
        if output_gradient.len() != self.output_width() {
            return Err(NeuralError::Shape(format!(
                "output gradient has {} entries, network outputs {}",
                output_gradient.len(),
                self.output_width()
            )));
        }
        let mut grads = Vec::with_capacity(self.layers.len());
        let mut upstream = output_gradient.to_vec();
        for (i, layer) in self.layers.iter().enumerate().rev() {
            let (n_in, n_out) = (layer.spec.input_width, layer.spec.output_width);
            let input = &cache.inputs[i];
            let delta: Vec<f64> = (0..n_out)
                .map(|o| {
                    upstream[o]
                        * layer
                            .spec
                            .activation
                            .derivative(cache.pre[i][o], cache.outputs[i][o])
                })
                .collect();
            let mut gw = vec![0.0; n_in * n_out];
            let mut gx = vec![0.0; n_in];
            for o in 0..n_out {
                let d = delta[o];
                if d == 0.0 {
                    continue;
                }
                let row = &layer.weights[o * n_in..(o + 1) * n_in];
                let grow = &mut gw[o * n_in..(o + 1) * n_in];
                for j in 0..n_in {
                    grow[j] = d * input[j];
                    gx[j] += d * row[j];
                }
            }
            grads.push(LayerGradient {
                weights: gw,
                bias: delta,
            });
            upstream = gx;
        }
        grads.reverse();
        Ok((Gradients { layers: grads }, upstream))
    }

    /// One bias-corrected Adam update.
    pub fn adam_step(
        &mut self,
        grads: &Gradients,
        cfg: &AdamConfig,
        direction: Direction,
    ) -> Result<(), NeuralError> {
        self.check_gradient_shape(grads)?;
        for (i, g) in grads.layers.iter().enumerate() {
            if g.weights.iter().chain(&g.bias).any(|v| !v.is_finite()) {
                return Err(NeuralError::NonFiniteGradient { layer: i });
            }
        }
        self.adam_steps += 1;
        let t = self.adam_steps as i32;
        let c1 = 1.0 - cfg.beta1.powi(t);
        let c2 = 1.0 - cfg.beta2.powi(t);
        let sign = match direction {
            Direction::Descent => -1.0,
            Direction::Ascent => 1.0,
        };
        let update = |p: &mut [f64], m: &mut [f64], v: &mut [f64], g: &[f64]| {
            for j in 0..p.len() {
                m[j] = cfg.beta1 * m[j] + (1.0 - cfg.beta1) * g[j];
                v[j] = cfg.beta2 * v[j] + (1.0 - cfg.beta2) * g[j] * g[j];
                let m_hat = m[j] / c1;
                let v_hat = v[j] / c2;
                p[j] += sign * cfg.learning_rate * m_hat / (v_hat.sqrt() + cfg.epsilon);
            }
        };
        for ((layer, mom), g) in self
            .layers
            .iter_mut()
            .zip(&mut self.moments)
            .zip(&grads.layers)
        {
            update(&mut layer.weights, &mut mom.m_w, &mut mom.v_w, &g.weights);
            update(&mut layer.bias, &mut mom.m_b, &mut mom.v_b, &g.bias);
        }
        Ok(())
    }

    /// `self ← τ·source + (1−τ)·self` over all parameters. Adam state is untouched.
    pub fn soft_update(&mut self, source: &Network, tau: f64) -> Result<(), NeuralError> {
        if self.specs() != source.specs() {
            return Err(NeuralError::Shape(
                "soft update between different architectures".into(),
            ));
        }
        if !(tau > 0.0 && tau <= 1.0) {
            return Err(NeuralError::Shape(format!(
                "soft update rate {tau} outside (0, 1]"
            )));
        }
        for (t, s) in self.layers.iter_mut().zip(&source.layers) {
            for (a, b) in t.weights.iter_mut().zip(&s.weights) {
                *a = tau * b + (1.0 - tau) * *a;
            }
            for (a, b) in t.bias.iter_mut().zip(&s.bias) {
                *a = tau * b + (1.0 - tau) * *a;
            }
        }
        Ok(())
    }

    /// Serializes parameters as a named block of the checkpoint text format.
    pub fn write_block(&self, name: &str, out: &mut String) {
        let _ = writeln!(out, "network {name}");
        let _ = writeln!(out, "seed {}", self.seed);
        let _ = writeln!(out, "layers {}", self.layers.len());
        for l in &self.layers {
            let _ = writeln!(
                out,
                "layer {} {} {}",
                l.spec.input_width,
                l.spec.output_width,
                l.spec.activation.name()
            );
        }
        for l in &self.layers {
            for row in l.weights.chunks(l.spec.input_width) {
                let _ = writeln!(out, "w {}", join_f64(row));
            }
            let _ = writeln!(out, "b {}", join_f64(&l.bias));
        }
        let _ = writeln!(out, "end");
    }

    /// Parses one block written by [`Network::write_block`], returning its name.
    pub(crate) fn read_block(lines: &mut LineReader<'_>) -> Result<(String, Network), NeuralError> {
        let name = lines.expect_keyword("network")?.to_string();
        let seed = lines.expect_keyword("seed")?;
        let seed: u64 = seed
            .parse()
            .map_err(|_| lines.error(format!("bad seed '{seed}'")))?;
        let count = lines.expect_keyword("layers")?;
        let count: usize = count
            .parse()
            .map_err(|_| lines.error(format!("bad layer count '{count}'")))?;
        let mut specs = Vec::with_capacity(count);
        for _ in 0..count {
            let rest = lines.expect_keyword("layer")?;
            let parts: Vec<&str> = rest.split_whitespace().collect();
            let spec = match parts.as_slice() {
                [i, o, a] => {
                    let i = i.parse().ok();
                    let o = o.parse().ok();
                    let a = Activation::from_name(a);
                    match (i, o, a) {
                        (Some(i), Some(o), Some(a)) => LayerSpec::new(i, o, a),
                        _ => return Err(lines.error(format!("bad layer spec '{rest}'"))),
                    }
                }
                _ => return Err(lines.error(format!("bad layer spec '{rest}'"))),
            };
            specs.push(spec);
        }
        check_chain(&specs)?;
        let mut layers = Vec::with_capacity(count);
        for spec in specs {
            let mut weights = Vec::with_capacity(spec.input_width * spec.output_width);
            for _ in 0..spec.output_width {
                let row = lines.expect_keyword("w")?;
                let row = lines.parse_row(row, spec.input_width)?;
                weights.extend(row);
            }
            let bias = lines.expect_keyword("b")?;
            let bias = lines.parse_row(bias, spec.output_width)?;
            layers.push(Layer {
                spec,
                weights,
                bias,
            });
        }
        lines.expect_keyword("end")?;
        Ok((name, Network::from_layers(layers, seed)))
    }

    fn check_input(&self, input: &[f64]) -> Result<(), NeuralError> {
        if input.len() != self.input_width() {
            return Err(NeuralError::InputWidth {
                expected: self.input_width(),
                actual: input.len(),
            });
        }
        Ok(())
    }

    fn check_gradient_shape(&self, grads: &Gradients) -> Result<(), NeuralError> {
        let ok =
            grads.layers.len() == self.layers.len()
                && grads.layers.iter().zip(&self.layers).all(|(g, l)| {
                    g.weights.len() == l.weights.len() && g.bias.len() == l.bias.len()
                });
        if ok {
            Ok(())
        } else {
            Err(NeuralError::Shape(
                "gradient shapes do not match the network".into(),
            ))
        }
    }
}

fn affine(layer: &Layer, x: &[f64]) -> Vec<f64> {
    let n_in = layer.spec.input_width;
    layer
        .weights
        .chunks_exact(n_in)
        .zip(&layer.bias)
        .map(|(row, b)| row.iter().zip(x).map(|(w, v)| w * v).sum::<f64>() + b)
        .collect()
}

fn check_chain(specs: &[LayerSpec]) -> Result<(), NeuralError> {
    if specs.is_empty() {
        return Err(NeuralError::Empty);
    }
    for (i, s) in specs.iter().enumerate() {
        if s.input_width == 0 || s.output_width == 0 {
            return Err(NeuralError::Shape(format!("layer {i} has a zero width")));
        }
        if i > 0 && specs[i - 1].output_width != s.input_width {
            return Err(NeuralError::WidthMismatch {
                layer: i,
                expected: s.input_width,
                actual: specs[i - 1].output_width,
            });
        }
    }
    Ok(())
}

/// Header line opening every checkpoint file.
pub const CHECKPOINT_FORMAT: &str = "irs-uav-checkpoint 1";

/// A checkpoint file: free-form `meta key value` lines followed by named
/// network blocks.
#[derive(Debug, Clone, PartialEq)]
pub struct Checkpoint {
    pub meta: Vec<(String, String)>,
    pub networks: Vec<(String, Network)>,
}

impl Checkpoint {
    pub fn meta(&self, key: &str) -> Option<&str> {
        self.meta
            .iter()
            .find(|(k, _)| k == key)
            .map(|(_, v)| v.as_str())
    }

    pub fn network(&self, name: &str) -> Option<&Network> {
        self.networks
            .iter()
            .find(|(n, _)| n == name)
            .map(|(_, net)| net)
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "{CHECKPOINT_FORMAT}");
        for (k, v) in &self.meta {
            let _ = writeln!(out, "meta {k} {v}");
        }
        for (name, net) in &self.networks {
            net.write_block(name, &mut out);
        }
        out
    }

    pub fn parse(text: &str) -> Result<Self, NeuralError> {
        let mut lines = LineReader::new(text);
        match lines.next_line() {
            Some(CHECKPOINT_FORMAT) => {}
            Some(other) => {
                return Err(lines.error(format!("unsupported checkpoint header '{other}'")))
            }
            None => return Err(lines.error("empty checkpoint".into())),
        }
        let mut meta = Vec::new();
        while lines.peek_keyword() == Some("meta") {
            let rest = lines.expect_keyword("meta")?;
            let (k, v) = rest.split_once(' ').unwrap_or((rest, ""));
            meta.push((k.to_string(), v.trim().to_string()));
        }
        let mut networks = Vec::new();
        while lines.has_more() {
            networks.push(Network::read_block(&mut lines)?);
        }
        Ok(Self { meta, networks })
    }
}

// 17 significant digits round-trip every f64 exactly
fn join_f64(values: &[f64]) -> String {
    values
        .iter()
        .map(|v| format!("{v:.16e}"))
        .collect::<Vec<_>>()
        .join(" ")
}

/// Line cursor with 1-based line numbers for error messages. Blank lines are skipped.
pub(crate) struct LineReader<'a> {
    lines: std::iter::Peekable<std::iter::Enumerate<std::str::Lines<'a>>>,
    line: usize,
}

impl<'a> LineReader<'a> {
    pub(crate) fn new(text: &'a str) -> Self {
        Self {
            lines: text.lines().enumerate().peekable(),
            line: 0,
        }
    }

    pub(crate) fn next_line(&mut self) -> Option<&'a str> {
        for (i, l) in self.lines.by_ref() {
            if !l.trim().is_empty() {
                self.line = i + 1;
                return Some(l.trim());
            }
        }
        None
    }

    pub(crate) fn has_more(&mut self) -> bool {
        while let Some((_, l)) = self.lines.peek() {
            if l.trim().is_empty() {
                self.lines.next();
            } else {
                return true;
            }
        }
        false
    }

    pub(crate) fn peek_keyword(&mut self) -> Option<&'a str> {
        if !self.has_more() {
            return None;
        }
        self.lines
            .peek()
            .map(|(_, l)| l.trim().split(' ').next().unwrap_or(""))
    }

    pub(crate) fn expect_keyword(&mut self, keyword: &str) -> Result<&'a str, NeuralError> {
        let Some(line) = self.next_line() else {
            return Err(self.error(format!("unexpected end of file, expected '{keyword}'")));
        };
        let (head, rest) = line.split_once(' ').unwrap_or((line, ""));
        if head != keyword {
            return Err(self.error(format!("expected '{keyword}', found '{head}'")));
        }
        Ok(rest.trim())
    }

    fn parse_row(&self, text: &str, width: usize) -> Result<Vec<f64>, NeuralError> {
        let row: Vec<f64> = text
            .split_whitespace()
            .map(|t| t.parse::<f64>())
            .collect::<Result<_, _>>()
            .map_err(|e| self.error(format!("bad number: {e}")))?;
        if row.len() != width {
            return Err(self.error(format!("expected {width} values, found {}", row.len())));
        }
        Ok(row)
    }

    pub(crate) fn error(&self, message: String) -> NeuralError {
        NeuralError::Checkpoint {
            line: self.line,
            message,
        }
    }
}
