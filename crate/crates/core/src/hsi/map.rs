use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum MapKind {
    Raw,
    Normalized,
    Binary,
}

impl MapKind {
    pub fn code(self) -> u8 {
        match self {
            MapKind::Raw => 0,
            MapKind::Normalized => 1,
            MapKind::Binary => 2,
        }
    }

    pub fn from_code(code: u8) -> Option<Self> {
        match code {
            0 => Some(MapKind::Raw),
            1 => Some(MapKind::Normalized),
            2 => Some(MapKind::Binary),
            _ => None,
        }
    }
}

/// A single-channel row-major map: saliency, edge or ground truth.
#[derive(Debug, Clone, PartialEq)]
pub struct Map2D {
    height: usize,
    width: usize,
    values: Vec<f32>,
    kind: MapKind,
}

impl Map2D {
    pub fn new(height: usize, width: usize, values: Vec<f32>, kind: MapKind) -> Result<Self> {
        if height == 0 || width == 0 {
            return Err(Error::InvalidDimensions(format!(
                "map dims must be positive, got {height}x{width}"
            )));
        }
        if values.len() != height * width {
            return Err(Error::LengthMismatch {
                expected: height * width,
                actual: values.len(),
            });
        }
        for (i, &v) in values.iter().enumerate() {
            if !v.is_finite() {
                return Err(Error::NonFinite(i));
            }
            let ok = match kind {
                MapKind::Raw => true,
                MapKind::Normalized => (0.0..=1.0).contains(&v),
                MapKind::Binary => v == 0.0 || v == 1.0,
            };
            if !ok {
                return Err(Error::OutOfRange {
                    index: i,
                    value: v as f64,
                });
            }
        }
        Ok(Self {
            height,
            width,
            values,
            kind,
        })
    }

    pub fn raw(height: usize, width: usize, values: Vec<f32>) -> Result<Self> {
        Self::new(height, width, values, MapKind::Raw)
    }

    pub fn normalized(height: usize, width: usize, values: Vec<f32>) -> Result<Self> {
        Self::new(height, width, values, MapKind::Normalized)
    }

    pub fn binary(height: usize, width: usize, values: Vec<f32>) -> Result<Self> {
        Self::new(height, width, values, MapKind::Binary)
    }

    pub fn zeros(height: usize, width: usize, kind: MapKind) -> Result<Self> {
        Self::new(height, width, vec![0.0; height * width], kind)
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn values(&self) -> &[f32] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f32> {
        self.values
    }

    pub fn kind(&self) -> MapKind {
        self.kind
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f32 {
        self.values[i * self.width + j]
    }

    pub fn same_dims(&self, other: &Map2D) -> bool {
        self.height == other.height && self.width == other.width
    }

    /// Re-tags the map, validating the new kind's value constraints.
    pub fn with_kind(self, kind: MapKind) -> Result<Self> {
        Self::new(self.height, self.width, self.values, kind)
    }

    pub fn min_max(&self) -> (f32, f32) {
        self.values
            .iter()
            .fold((f32::INFINITY, f32::NEG_INFINITY), |(lo, hi), &v| {
                (lo.min(v), hi.max(v))
            })
    }

    pub fn mean(&self) -> f64 {
        self.values.iter().map(|&v| v as f64).sum::<f64>() / self.values.len() as f64
    }

    /// Counter-clockwise rotation, matching [`HyperCube::rotate90`](crate::HyperCube::rotate90).
    pub fn rotate90(&self) -> Self {
        let (h, w) = (self.height, self.width);
        let mut values = Vec::with_capacity(self.values.len());
        for i in 0..w {
            for j in 0..h {
                values.push(self.values[j * w + (w - 1 - i)]);
            }
        }
        Self {
            height: w,
            width: h,
            values,
            kind: self.kind,
        }
    }
}

/// Min-max rescale to `[0, 1]`. A constant map becomes all zeros.
pub fn normalize_map(map: &Map2D) -> Map2D {
    let (lo, hi) = map.min_max();
    let values = if hi > lo {
        let (lo, range) = (lo as f64, hi as f64 - lo as f64);
        map.values
            .iter()
            .map(|&v| (((v as f64 - lo) / range) as f32).clamp(0.0, 1.0))
            .collect()
    } else {
        vec![0.0; map.len()]
    };
    Map2D {
        height: map.height,
        width: map.width,
        values,
        kind: MapKind::Normalized,
    }
}
