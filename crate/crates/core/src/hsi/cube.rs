use crate::{Error, Result};

/// An `H × W × C` radiance cube stored band-sequentially: each band is a full
/// row-major plane, and planes follow one another.
#[derive(Debug, Clone, PartialEq)]
pub struct HyperCube {
    height: usize,
    width: usize,
    channels: usize,
    data: Vec<f32>,
    wavelengths: Option<Vec<f32>>,
}

impl HyperCube {
    pub fn new(
        height: usize,
        width: usize,
        channels: usize,
        data: Vec<f32>,
        wavelengths: Option<Vec<f32>>,
    ) -> Result<Self> {
        if height == 0 || width == 0 || channels == 0 {
            return Err(Error::InvalidDimensions(format!(
                "cube dims must be positive, got {height}x{width}x{channels}"
            )));
        }
        let expected = height * width * channels;
        if data.len() != expected {
            return Err(Error::LengthMismatch {
                expected,
                actual: data.len(),
            });
        }
        if let Some(i) = data.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite(i));
        }
        if let Some(wl) = &wavelengths {
            validate_wavelengths(wl, channels)?;
        }
        Ok(Self {
            height,
            width,
            channels,
            data,
            wavelengths,
        })
    }

    /// A cube with every sample equal to `value`.
    pub fn constant(height: usize, width: usize, channels: usize, value: f32) -> Result<Self> {
        Self::new(
            height,
            width,
            channels,
            vec![value; height * width * channels],
            None,
        )
    }

    /// Builds a cube by evaluating `f(band, row, col)` at every sample.
    pub fn from_fn(
        height: usize,
        width: usize,
        channels: usize,
        mut f: impl FnMut(usize, usize, usize) -> f32,
    ) -> Result<Self> {
        let mut data = Vec::with_capacity(height * width * channels);
        for b in 0..channels {
            for i in 0..height {
                for j in 0..width {
                    data.push(f(b, i, j));
                }
            }
        }
        Self::new(height, width, channels, data, None)
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn channels(&self) -> usize {
        self.channels
    }

    pub fn plane_len(&self) -> usize {
        self.height * self.width
    }

    pub fn data(&self) -> &[f32] {
        &self.data
    }

    pub fn into_data(self) -> Vec<f32> {
        self.data
    }

    pub fn wavelengths(&self) -> Option<&[f32]> {
        self.wavelengths.as_deref()
    }

    pub fn with_wavelengths(mut self, wavelengths: Option<Vec<f32>>) -> Result<Self> {
        if let Some(wl) = &wavelengths {
            validate_wavelengths(wl, self.channels)?;
        }
        self.wavelengths = wavelengths;
        Ok(self)
    }

    pub fn band(&self, b: usize) -> &[f32] {
        let n = self.plane_len();
        &self.data[b * n..(b + 1) * n]
    }

    pub fn bands(&self) -> impl Iterator<Item = &[f32]> {
        self.data.chunks_exact(self.plane_len())
    }

    #[inline]
    pub fn get(&self, b: usize, i: usize, j: usize) -> f32 {
        self.data[b * self.plane_len() + i * self.width + j]
    }

    /// Spectrum at pixel `(i, j)`.
    pub fn spectrum(&self, i: usize, j: usize) -> SpectralVector {
        let n = self.plane_len();
        let off = i * self.width + j;
        SpectralVector(
            (0..self.channels)
                .map(|b| self.data[b * n + off] as f64)
                .collect(),
        )
    }

    /// Writes the spectrum at pixel `(i, j)` into `out` without allocating.
    #[inline]
    pub fn spectrum_into(&self, i: usize, j: usize, out: &mut [f64]) {
        let n = self.plane_len();
        let off = i * self.width + j;
        for (b, o) in out.iter_mut().enumerate() {
            *o = self.data[b * n + off] as f64;
        }
    }

    /// Rotates every band by 90° counter-clockwise: output `(i, j)` takes
    /// input `(j, W-1-i)`.
    pub fn rotate90(&self) -> Self {
        let (h, w) = (self.height, self.width);
        let mut data = Vec::with_capacity(self.data.len());
        for band in self.bands() {
            for i in 0..w {
                for j in 0..h {
                    data.push(band[j * w + (w - 1 - i)]);
                }
            }
        }
        Self {
            height: w,
            width: h,
            channels: self.channels,
            data,
            wavelengths: self.wavelengths.clone(),
        }
    }

    /// Transposes the cube into pixel-interleaved order (`C` values per pixel).
    pub fn to_interleaved(&self) -> Vec<f32> {
        let n = self.plane_len();
        let c = self.channels;
        let mut out = vec![0.0; self.data.len()];
        for (b, band) in self.bands().enumerate() {
            for p in 0..n {
                out[p * c + b] = band[p];
            }
        }
        out
    }
}

fn validate_wavelengths(wl: &[f32], channels: usize) -> Result<()> {
    if wl.len() != channels {
        return Err(Error::LengthMismatch {
            expected: channels,
            actual: wl.len(),
        });
    }
    if let Some(i) = wl.iter().position(|v| !v.is_finite()) {
        return Err(Error::NonFinite(i));
    }
    if let Some(i) = wl.windows(2).position(|p| p[1] <= p[0]) {
        return Err(Error::NonIncreasingWavelengths(i + 1));
    }
    Ok(())
}

/// Per-band values at a single pixel.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralVector(pub Vec<f64>);

impl SpectralVector {
    pub fn new(components: Vec<f64>) -> Result<Self> {
        if let Some(i) = components.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite(i));
        }
        Ok(Self(components))
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn norm(&self) -> f64 {
        self.0.iter().map(|v| v * v).sum::<f64>().sqrt()
    }
}

impl From<Vec<f64>> for SpectralVector {
    fn from(v: Vec<f64>) -> Self {
        Self(v)
    }
}
