use crate::analysis::Axis;
use crate::error::{Error, Result};
use crate::fem::Space;

/// Coefficients of an assembled 1-form: a function when `space` is primal,
/// a cofunction when it is dual.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseVector {
    values: Vec<f64>,
    space: Space,
}

impl DenseVector {
    pub fn new(space: Space, values: Vec<f64>) -> Result<Self> {
        if values.len() != space.dim() {
            return Err(Error::Shape {
                expected: space.dim(),
                actual: values.len(),
            });
        }
        Ok(DenseVector { values, space })
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn space(&self) -> Space {
        self.space
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn is_cofunction(&self) -> bool {
        self.space.is_dual()
    }
}

/// Assembled 2-form. Rows index argument 0, columns argument 1; the spaces
/// are those of the arguments.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseMatrix {
    values: Vec<f64>,
    row_space: Space,
    col_space: Space,
}

impl DenseMatrix {
    pub fn new(row_space: Space, col_space: Space, values: Vec<f64>) -> Result<Self> {
        let expected = row_space.dim() * col_space.dim();
        if values.len() != expected {
            return Err(Error::Shape {
                expected,
                actual: values.len(),
            });
        }
        Ok(DenseMatrix {
            values,
            row_space,
            col_space,
        })
    }

    pub fn from_fn(row_space: Space, col_space: Space, f: impl Fn(usize, usize) -> f64) -> Self {
        let (r, c) = (row_space.dim(), col_space.dim());
        let values = (0..r * c).map(|k| f(k / c, k % c)).collect();
        DenseMatrix {
            values,
            row_space,
            col_space,
        }
    }

    pub fn rows(&self) -> usize {
        self.row_space.dim()
    }

    pub fn cols(&self) -> usize {
        self.col_space.dim()
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.rows(), self.cols())
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.values[i * self.cols() + j]
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.values[i * self.cols()..(i + 1) * self.cols()]
    }

    /// Row-major entries.
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn row_space(&self) -> Space {
        self.row_space
    }

    pub fn col_space(&self) -> Space {
        self.col_space
    }

    /// Dense product `self · rhs`; the inner spaces must be dual to each other.
    pub fn matmul(&self, rhs: &DenseMatrix) -> Result<DenseMatrix> {
        if self.col_space.dual() != rhs.row_space {
            return Err(Error::Contract(format!(
                "cannot multiply a matrix over columns {} by one over rows {}",
                self.col_space, rhs.row_space
            )));
        }
        let n = self.cols();
        Ok(DenseMatrix::from_fn(self.row_space, rhs.col_space, |i, j| {
            (0..n).map(|k| self.get(i, k) * rhs.get(k, j)).sum()
        }))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum AssembledTensor {
    Scalar(f64),
    Vector(DenseVector),
    Matrix(DenseMatrix),
}

impl AssembledTensor {
    pub fn kind(&self) -> &'static str {
        match self {
            AssembledTensor::Scalar(_) => "scalar",
            AssembledTensor::Vector(_) => "vector",
            AssembledTensor::Matrix(_) => "matrix",
        }
    }

    pub fn shape(&self) -> Vec<usize> {
        match self {
            AssembledTensor::Scalar(_) => vec![],
            AssembledTensor::Vector(v) => vec![v.len()],
            AssembledTensor::Matrix(m) => vec![m.rows(), m.cols()],
        }
    }

    /// Entries in row-major order.
    pub fn values(&self) -> &[f64] {
        match self {
            AssembledTensor::Scalar(s) => std::slice::from_ref(s),
            AssembledTensor::Vector(v) => v.values(),
            AssembledTensor::Matrix(m) => m.values(),
        }
    }

    pub fn as_scalar(&self) -> Option<f64> {
        match self {
            AssembledTensor::Scalar(s) => Some(*s),
            _ => None,
        }
    }

    pub fn into_vector(self) -> Option<DenseVector> {
        match self {
            AssembledTensor::Vector(v) => Some(v),
            _ => None,
        }
    }

    pub fn into_matrix(self) -> Option<DenseMatrix> {
        match self {
            AssembledTensor::Matrix(m) => Some(m),
            _ => None,
        }
    }

    /// Largest absolute entry-wise difference, or `None` when kinds, shapes
    /// or spaces differ.
    pub fn max_abs_diff(&self, other: &AssembledTensor) -> Option<f64> {
        let same_layout = match (self, other) {
            (AssembledTensor::Scalar(_), AssembledTensor::Scalar(_)) => true,
            (AssembledTensor::Vector(a), AssembledTensor::Vector(b)) => a.space == b.space,
            (AssembledTensor::Matrix(a), AssembledTensor::Matrix(b)) => {
                a.row_space == b.row_space && a.col_space == b.col_space
            }
            _ => false,
        };
        same_layout.then(|| {
            self.values()
                .iter()
                .zip(other.values())
                .map(|(a, b)| (a - b).abs())
                .fold(0.0, f64::max)
        })
    }
}

/// Contracts the last (highest-numbered) axis of `tensor` with `operand`.
///
/// A vector pairs with an operand from the space it is dual to and yields a
/// scalar; a matrix takes an operand from its column space and yields a
/// vector valued in the dual of its row space.
pub fn apply(tensor: &AssembledTensor, operand: &DenseVector) -> Result<AssembledTensor> {
    match tensor {
        AssembledTensor::Scalar(_) => Err(Error::Arity("a scalar takes no operand".into())),
        AssembledTensor::Vector(h) => {
            if operand.space != h.space.dual() {
                return Err(Error::SpaceMismatch(format!(
                    "a vector in {} pairs with {}, not {}",
                    h.space,
                    h.space.dual(),
                    operand.space
                )));
            }
            Ok(AssembledTensor::Scalar(
                h.values.iter().zip(&operand.values).map(|(a, b)| a * b).sum(),
            ))
        }
        AssembledTensor::Matrix(m) => {
            if operand.space != m.col_space {
                return Err(Error::SpaceMismatch(format!(
                    "matrix columns range over {}, operand lives in {}",
                    m.col_space, operand.space
                )));
            }
            let values = (0..m.rows())
                .map(|i| m.row(i).iter().zip(&operand.values).map(|(a, b)| a * b).sum())
                .collect();
            Ok(AssembledTensor::Vector(DenseVector {
                values,
                space: m.row_space.dual(),
            }))
        }
    }
}

pub fn transpose(m: &DenseMatrix) -> DenseMatrix {
    DenseMatrix::from_fn(m.col_space, m.row_space, |i, j| m.get(j, i))
}

/// Intermediate tensor of any rank with labelled axes, stored row-major in
/// axis order.
#[derive(Debug, Clone, PartialEq)]
pub(crate) struct LabeledTensor {
    pub(crate) axes: Vec<Axis>,
    pub(crate) data: Vec<f64>,
}

fn for_each_index(dims: &[usize], mut f: impl FnMut(&[usize])) {
    if dims.contains(&0) {
        return;
    }
    let mut idx = vec![0; dims.len()];
    loop {
        f(&idx);
        let mut k = dims.len();
        loop {
            if k == 0 {
                return;
            }
            k -= 1;
            idx[k] += 1;
            if idx[k] < dims[k] {
                break;
            }
            idx[k] = 0;
        }
    }
}

pub(crate) fn index_tuples(dims: &[usize], f: impl FnMut(&[usize])) {
    for_each_index(dims, f)
}

impl LabeledTensor {
    pub(crate) fn zeros(axes: Vec<Axis>) -> Self {
        let len = axes.iter().map(|a| a.space.dim()).product();
        LabeledTensor {
            axes,
            data: vec![0.0; len],
        }
    }

    pub(crate) fn dims(&self) -> Vec<usize> {
        self.axes.iter().map(|a| a.space.dim()).collect()
    }

    fn strides(&self) -> Vec<usize> {
        let dims = self.dims();
        let mut s = vec![1; dims.len()];
        for k in (0..dims.len().saturating_sub(1)).rev() {
            s[k] = s[k + 1] * dims[k + 1];
        }
        s
    }

    pub(crate) fn offset(&self, idx: &[usize]) -> usize {
        idx.iter().zip(self.strides()).map(|(i, s)| i * s).sum()
    }

    /// Reorders axes by `(number, temporary)`.
    pub(crate) fn sorted(self) -> Self {
        let mut order: Vec<usize> = (0..self.axes.len()).collect();
        order.sort_by_key(|&k| (self.axes[k].number, self.axes[k].temporary));
        if order.iter().enumerate().all(|(i, &k)| i == k) {
            return self;
        }
        let axes: Vec<Axis> = order.iter().map(|&k| self.axes[k]).collect();
        let mut out = LabeledTensor::zeros(axes);
        let strides = self.strides();
        let dims = out.dims();
        let mut pos = 0;
        for_each_index(&dims, |idx| {
            let src: usize = idx.iter().zip(&order).map(|(i, &k)| i * strides[k]).sum();
            out.data[pos] = self.data[src];
            pos += 1;
        });
        out
    }

    /// Sums temporary axis `number` of `self` against axis 0 of `inner`.
    pub(crate) fn contract(&self, inner: &LabeledTensor, number: u32) -> Result<Self> {
        let p = self
            .axes
            .iter()
            .position(|a| a.temporary && a.number == number)
            .ok_or_else(|| Error::Contract(format!("no temporary axis #{number}")))?;
        let q = inner
            .axes
            .iter()
            .position(|a| !a.temporary && a.number == 0)
            .ok_or_else(|| Error::Contract("inner tensor has no axis #0".into()))?;
        let (a, b) = (self.axes[p], inner.axes[q]);
        if a.space.dual() != b.space {
            return Err(Error::Contract(format!(
                "axis over {} cannot contract with axis over {}",
                a.space, b.space
            )));
        }
        let outer_rest: Vec<usize> = (0..self.axes.len()).filter(|&k| k != p).collect();
        let inner_rest: Vec<usize> = (0..inner.axes.len()).filter(|&k| k != q).collect();
        let axes: Vec<Axis> = outer_rest
            .iter()
            .map(|&k| self.axes[k])
            .chain(inner_rest.iter().map(|&k| inner.axes[k]))
            .collect();
        let mut out = LabeledTensor::zeros(axes);
        let (so, si) = (self.strides(), inner.strides());
        let n = a.space.dim();
        let split = outer_rest.len();
        let dims = out.dims();
        let mut pos = 0;
        for_each_index(&dims, |idx| {
            let base_o: usize = idx[..split].iter().zip(&outer_rest).map(|(i, &k)| i * so[k]).sum();
            let base_i: usize = idx[split..].iter().zip(&inner_rest).map(|(i, &k)| i * si[k]).sum();
            out.data[pos] = (0..n)
                .map(|m| self.data[base_o + m * so[p]] * inner.data[base_i + m * si[q]])
                .sum();
            pos += 1;
        });
        Ok(out.sorted())
    }

    pub(crate) fn swap01(mut self) -> Self {
        for a in &mut self.axes {
            a.number = crate::analysis::swap01(a.number);
        }
        self.sorted()
    }

    pub(crate) fn into_assembled(self) -> Result<AssembledTensor> {
        match self.axes.as_slice() {
            [] => Ok(AssembledTensor::Scalar(self.data[0])),
            [a] => Ok(AssembledTensor::Vector(DenseVector {
                space: a.space.dual(),
                values: self.data,
            })),
            [a, b] => Ok(AssembledTensor::Matrix(DenseMatrix {
                row_space: a.space,
                col_space: b.space,
                values: self.data,
            })),
            axes => Err(Error::Arity(format!(
                "a {}-form cannot be assembled into a dense scalar, vector or matrix",
                axes.len()
            ))),
        }
    }
}
