use super::NnError;

/// Dense row-major tensor of rank 1 to 4, one sample, no batch axis.
#[derive(Debug, Clone, PartialEq)]
pub struct Tensor {
    shape: Vec<usize>,
    data: Vec<f64>,
}

pub const MAX_RANK: usize = 4;

pub(crate) fn check_shape(shape: &[usize]) -> Result<usize, NnError> {
    if shape.is_empty() || shape.len() > MAX_RANK {
        return Err(NnError::Shape(format!(
            "rank must be 1..={MAX_RANK}, got shape {shape:?}"
        )));
    }
    if shape.contains(&0) {
        return Err(NnError::Shape(format!("zero-sized dimension in {shape:?}")));
    }
    Ok(shape.iter().product())
}

impl Tensor {
    pub fn new(shape: Vec<usize>, data: Vec<f64>) -> Result<Self, NnError> {
        let len = check_shape(&shape)?;
        if len != data.len() {
            return Err(NnError::Shape(format!(
                "shape {shape:?} needs {len} values, got {}",
                data.len()
            )));
        }
        if let Some(i) = data.iter().position(|v| !v.is_finite()) {
            return Err(NnError::NonFinite(format!("tensor entry {i} is {}", data[i])));
        }
        Ok(Tensor { shape, data })
    }

    /// Rank-1 tensor.
    pub fn vector(data: Vec<f64>) -> Result<Self, NnError> {
        Self::new(vec![data.len()], data)
    }

    pub fn zeros(shape: Vec<usize>) -> Result<Self, NnError> {
        let len = check_shape(&shape)?;
        Ok(Tensor {
            shape,
            data: vec![0.0; len],
        })
    }

    pub fn shape(&self) -> &[usize] {
        &self.shape
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    pub fn len(&self) -> usize {
        self.data.len()
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    pub fn into_data(self) -> Vec<f64> {
        self.data
    }

    /// Index of the largest entry; the first one on ties.
    pub fn argmax(&self) -> usize {
        let mut best = 0;
        for (i, &v) in self.data.iter().enumerate() {
            if v > self.data[best] {
                best = i;
            }
        }
        best
    }

    pub(crate) fn from_parts(shape: Vec<usize>, data: Vec<f64>) -> Self {
        debug_assert_eq!(shape.iter().product::<usize>(), data.len());
        Tensor { shape, data }
    }
}

/// Element-wise lower and upper tensors of one shape.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundedTensor {
    lower: Tensor,
    upper: Tensor,
}

impl BoundedTensor {
    pub fn new(lower: Tensor, upper: Tensor) -> Result<Self, NnError> {
        if lower.shape != upper.shape {
            return Err(NnError::Shape(format!(
                "bound shapes differ: {:?} vs {:?}",
                lower.shape, upper.shape
            )));
        }
        if let Some(i) = (0..lower.len()).find(|&i| lower.data[i] > upper.data[i]) {
            return Err(NnError::InvertedBounds {
                index: i,
                lower: lower.data[i],
                upper: upper.data[i],
            });
        }
        Ok(BoundedTensor { lower, upper })
    }

    /// Degenerate box `[x, x]`.
    pub fn point(x: Tensor) -> Self {
        BoundedTensor {
            lower: x.clone(),
            upper: x,
        }
    }

    pub fn lower(&self) -> &Tensor {
        &self.lower
    }

    pub fn upper(&self) -> &Tensor {
        &self.upper
    }

    pub fn shape(&self) -> &[usize] {
        &self.lower.shape
    }

    pub fn len(&self) -> usize {
        self.lower.len()
    }

    pub fn is_empty(&self) -> bool {
        self.lower.is_empty()
    }

    /// `x` lies in the box, each side relaxed by `tol`.
    pub fn contains(&self, x: &Tensor, tol: f64) -> bool {
        x.shape == self.lower.shape
            && x.data
                .iter()
                .zip(self.lower.data.iter().zip(&self.upper.data))
                .all(|(&v, (&l, &u))| l - tol <= v && v <= u + tol)
    }

    pub fn is_subset_of(&self, other: &BoundedTensor) -> bool {
        self.shape() == other.shape()
            && (0..self.len()).all(|i| {
                other.lower.data[i] <= self.lower.data[i] && self.upper.data[i] <= other.upper.data[i]
            })
    }

    pub(crate) fn from_parts(shape: Vec<usize>, lower: Vec<f64>, upper: Vec<f64>) -> Self {
        BoundedTensor {
            lower: Tensor::from_parts(shape.clone(), lower),
            upper: Tensor::from_parts(shape, upper),
        }
    }
}

/// The `l_inf` ball of radius `eps` around `x`, clipped to `[lo, hi]`.
pub fn epsilon_ball(x: &Tensor, eps: f64, domain: (f64, f64)) -> Result<BoundedTensor, NnError> {
    let (lo, hi) = domain;
    if !(lo <= hi) || !lo.is_finite() || !hi.is_finite() {
        return Err(NnError::Domain(format!("invalid input domain [{lo}, {hi}]")));
    }
    if !(eps >= 0.0) || !eps.is_finite() {
        return Err(NnError::Domain(format!("eps must be finite and >= 0, got {eps}")));
    }
    let lower: Vec<f64> = x.data.iter().map(|&v| (v - eps).max(lo)).collect();
    let upper: Vec<f64> = x.data.iter().map(|&v| (v + eps).min(hi)).collect();
    if let Some(i) = (0..lower.len()).find(|&i| lower[i] > upper[i]) {
        return Err(NnError::Domain(format!(
            "input entry {i} = {} lies farther than eps from [{lo}, {hi}]",
            x.data[i]
        )));
    }
    Ok(BoundedTensor::from_parts(x.shape.clone(), lower, upper))
}
