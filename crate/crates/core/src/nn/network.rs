use super::layer::Layer;
use super::tensor::{check_shape, BoundedTensor, Tensor};
use super::NnError;

/// Validated layer stack. Shapes are checked once at construction; the
/// output is a vector.
#[derive(Debug, Clone, PartialEq)]
pub struct Network {
    input_shape: Vec<usize>,
    layers: Vec<Layer>,
    /// `shapes[k]` is the input shape of layer `k`; the last entry is the output shape.
    shapes: Vec<Vec<usize>>,
}

impl Network {
    pub fn new(input_shape: Vec<usize>, layers: Vec<Layer>) -> Result<Self, NnError> {
        check_shape(&input_shape)?;
        let mut shapes = vec![input_shape.clone()];
        for (k, layer) in layers.iter().enumerate() {
            if matches!(layer, Layer::Softmax) && k + 1 != layers.len() {
                return Err(NnError::Shape(format!(
                    "softmax is only allowed as the last layer, found at layer {k}"
                )));
            }
            let next = layer
                .output_shape(shapes.last().unwrap())
                .map_err(|e| NnError::Shape(format!("layer {k} ({}): {e}", layer.name())))?;
            shapes.push(next);
        }
        let out = shapes.last().unwrap();
        if out.len() != 1 {
            return Err(NnError::Shape(format!(
                "network output must be a vector, got shape {out:?}"
            )));
        }
        Ok(Network {
            input_shape,
            layers,
            shapes,
        })
    }

    /// A network that ignores its input and returns `values` exactly: a
    /// zero-weight dense layer whose bias is `values`.
    pub fn constant(input_shape: Vec<usize>, values: &[f64]) -> Result<Self, NnError> {
        let width: usize = check_shape(&input_shape)?;
        let mut layers = Vec::new();
        if input_shape.len() != 1 {
            layers.push(Layer::Flatten);
        }
        layers.push(Layer::Dense {
            in_features: width,
            out_features: values.len(),
            weights: vec![0.0; width * values.len()],
            bias: values.to_vec(),
        });
        Network::new(input_shape, layers)
    }

    pub fn input_shape(&self) -> &[usize] {
        &self.input_shape
    }

    pub fn layers(&self) -> &[Layer] {
        &self.layers
    }

    pub fn output_size(&self) -> usize {
        self.shapes.last().unwrap()[0]
    }

    /// Input shape of layer `k`.
    pub(crate) fn layer_input_shape(&self, k: usize) -> &[usize] {
        &self.shapes[k]
    }

    fn check_input(&self, shape: &[usize]) -> Result<(), NnError> {
        if shape != self.input_shape.as_slice() {
            return Err(NnError::Shape(format!(
                "network expects input shape {:?}, got {shape:?}",
                self.input_shape
            )));
        }
        Ok(())
    }

    pub fn forward(&self, x: &Tensor) -> Result<Tensor, NnError> {
        self.check_input(x.shape())?;
        let mut cur = x.data().to_vec();
        for (k, layer) in self.layers.iter().enumerate() {
            cur = layer.forward(&self.shapes[k], &cur);
        }
        Ok(Tensor::from_parts(self.shapes.last().unwrap().clone(), cur))
    }

    /// Interval bound propagation: the result contains `forward(x')` for every
    /// `x'` in `bx`.
    pub fn forward_ibp(&self, bx: &BoundedTensor) -> Result<BoundedTensor, NnError> {
        self.check_input(bx.shape())?;
        let mut lo = bx.lower().data().to_vec();
        let mut hi = bx.upper().data().to_vec();
        for (k, layer) in self.layers.iter().enumerate() {
            (lo, hi) = layer.forward_ibp(&self.shapes[k], &lo, &hi);
        }
        Ok(BoundedTensor::from_parts(
            self.shapes.last().unwrap().clone(),
            lo,
            hi,
        ))
    }

    pub(crate) fn into_layers(self) -> Vec<Layer> {
        self.layers
    }
}
