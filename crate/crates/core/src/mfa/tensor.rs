use crate::{Error, Result};
use rand::Rng;

/// `h × w × depth` feature map, depth-contiguous per pixel.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureTensor {
    height: usize,
    width: usize,
    depth: usize,
    data: Vec<f64>,
}

impl FeatureTensor {
    pub fn new(height: usize, width: usize, depth: usize, data: Vec<f64>) -> Result<Self> {
        if height == 0 || width == 0 || depth == 0 {
            return Err(Error::InvalidDimensions(format!(
                "feature dims must be positive, got {height}x{width}x{depth}"
            )));
        }
        if data.len() != height * width * depth {
            return Err(Error::LengthMismatch {
                expected: height * width * depth,
                actual: data.len(),
            });
        }
        if let Some(i) = data.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite(i));
        }
        Ok(Self {
            height,
            width,
            depth,
            data,
        })
    }

    pub fn zeros(height: usize, width: usize, depth: usize) -> Self {
        Self {
            height,
            width,
            depth,
            data: vec![0.0; height * width * depth],
        }
    }

    pub fn from_fn(
        height: usize,
        width: usize,
        depth: usize,
        mut f: impl FnMut(usize, usize, usize) -> f64,
    ) -> Result<Self> {
        let mut data = Vec::with_capacity(height * width * depth);
        for i in 0..height {
            for j in 0..width {
                for d in 0..depth {
                    data.push(f(i, j, d));
                }
            }
        }
        Self::new(height, width, depth, data)
    }

    pub fn random(
        height: usize,
        width: usize,
        depth: usize,
        lo: f64,
        hi: f64,
        rng: &mut impl Rng,
    ) -> Self {
        let data = (0..height * width * depth)
            .map(|_| rng.random_range(lo..hi))
            .collect();
        Self {
            height,
            width,
            depth,
            data,
        }
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn depth(&self) -> usize {
        self.depth
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    pub fn data_mut(&mut self) -> &mut [f64] {
        &mut self.data
    }

    pub fn into_data(self) -> Vec<f64> {
        self.data
    }

    #[inline]
    pub fn pixel(&self, i: usize, j: usize) -> &[f64] {
        let o = (i * self.width + j) * self.depth;
        &self.data[o..o + self.depth]
    }

    #[inline]
    pub fn pixel_mut(&mut self, i: usize, j: usize) -> &mut [f64] {
        let o = (i * self.width + j) * self.depth;
        &mut self.data[o..o + self.depth]
    }

    pub fn same_spatial(&self, other: &FeatureTensor) -> bool {
        self.height == other.height && self.width == other.width
    }

    /// Channels `[from, to)`.
    pub fn channels(&self, from: usize, to: usize) -> Result<Self> {
        if from >= to || to > self.depth {
            return Err(Error::InvalidArgument(format!(
                "channel range {from}..{to} invalid for depth {}",
                self.depth
            )));
        }
        let data = self
            .data
            .chunks_exact(self.depth)
            .flat_map(|px| px[from..to].iter().copied())
            .collect();
        Ok(Self {
            height: self.height,
            width: self.width,
            depth: to - from,
            data,
        })
    }

    /// Concatenates along depth: `self` first.
    pub fn concat_depth(&self, other: &FeatureTensor) -> Result<Self> {
        if !self.same_spatial(other) {
            return Err(Error::DimensionMismatch(format!(
                "{}x{} vs {}x{}",
                self.height, self.width, other.height, other.width
            )));
        }
        let mut data = Vec::with_capacity(self.data.len() + other.data.len());
        for (a, b) in self
            .data
            .chunks_exact(self.depth)
            .zip(other.data.chunks_exact(other.depth))
        {
            data.extend_from_slice(a);
            data.extend_from_slice(b);
        }
        Ok(Self {
            height: self.height,
            width: self.width,
            depth: self.depth + other.depth,
            data,
        })
    }

    /// One row-major plane per channel.
    pub fn channel_plane(&self, d: usize) -> Vec<f64> {
        self.data.chunks_exact(self.depth).map(|px| px[d]).collect()
    }

    pub(crate) fn add_assign(&mut self, other: &FeatureTensor) {
        for (a, b) in self.data.iter_mut().zip(&other.data) {
            *a += b;
        }
    }
}

/// Dense row-major matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl Matrix {
    pub fn new(rows: usize, cols: usize, data: Vec<f64>) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(Error::InvalidDimensions(format!("matrix {rows}x{cols}")));
        }
        if data.len() != rows * cols {
            return Err(Error::LengthMismatch {
                expected: rows * cols,
                actual: data.len(),
            });
        }
        if let Some(i) = data.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite(i));
        }
        Ok(Self { rows, cols, data })
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![0.0; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.data[i * n + i] = 1.0;
        }
        m
    }

    pub fn random(rows: usize, cols: usize, lo: f64, hi: f64, rng: &mut impl Rng) -> Self {
        Self {
            rows,
            cols,
            data: (0..rows * cols).map(|_| rng.random_range(lo..hi)).collect(),
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    pub fn data_mut(&mut self) -> &mut [f64] {
        &mut self.data
    }

    #[inline]
    pub fn get(&self, r: usize, c: usize) -> f64 {
        self.data[r * self.cols + c]
    }

    /// `out = x · self` for a row vector `x` of length `rows`.
    #[inline]
    pub fn left_mul_into(&self, x: &[f64], out: &mut [f64]) {
        out.fill(0.0);
        for (r, &xr) in x.iter().enumerate() {
            let row = &self.data[r * self.cols..(r + 1) * self.cols];
            for (o, &m) in out.iter_mut().zip(row) {
                *o += xr * m;
            }
        }
    }

    /// `self += xᵀ g` (outer-product accumulation).
    #[inline]
    pub(crate) fn add_outer(&mut self, x: &[f64], g: &[f64]) {
        for (r, &xr) in x.iter().enumerate() {
            let row = &mut self.data[r * self.cols..(r + 1) * self.cols];
            for (m, &gc) in row.iter_mut().zip(g) {
                *m += xr * gc;
            }
        }
    }

    /// `out += g · selfᵀ` for a row vector `g` of length `cols`.
    #[inline]
    pub(crate) fn add_mul_transpose(&self, g: &[f64], out: &mut [f64]) {
        for (r, o) in out.iter_mut().enumerate() {
            let row = &self.data[r * self.cols..(r + 1) * self.cols];
            *o += row.iter().zip(g).map(|(m, gc)| m * gc).sum::<f64>();
        }
    }
}
