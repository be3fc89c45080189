use nalgebra::DMatrix;

use crate::hilbert::{C64, ZERO};

/// Row-compressed copy of a dense matrix for repeated matrix-vector products.
#[derive(Debug, Clone)]
pub(crate) struct CompressedRows {
    starts: Vec<usize>,
    cols: Vec<usize>,
    vals: Vec<C64>,
}

impl CompressedRows {
    pub fn from_dense(m: &DMatrix<C64>) -> Self {
        let mut starts = Vec::with_capacity(m.nrows() + 1);
        let mut cols = Vec::new();
        let mut vals = Vec::new();
        starts.push(0);
        for i in 0..m.nrows() {
            for j in 0..m.ncols() {
                let v = m[(i, j)];
                if v != ZERO {
                    cols.push(j);
                    vals.push(v);
                }
            }
            starts.push(cols.len());
        }
        Self { starts, cols, vals }
    }

    pub fn apply(&self, x: &[C64], y: &mut [C64]) {
        for (i, out) in y.iter_mut().enumerate() {
            let mut acc = ZERO;
            for k in self.starts[i]..self.starts[i + 1] {
                acc += self.vals[k] * x[self.cols[k]];
            }
            *out = acc;
        }
    }
}
