//! Product-form basis inverse.
//!
//! `B⁻¹ = E_k⁻¹ ⋯ E_1⁻¹` where each eta matrix replaces one column of the
//! identity. Reinversion starts from the all-logical basis, so the same file
//! serves both the factorization and the per-pivot updates.

const DROP_TOL: f64 = 1e-14;

#[derive(Debug, Clone, Default)]
pub(crate) struct EtaFile {
    rows: Vec<usize>,
    pivots: Vec<f64>,
    starts: Vec<usize>,
    idx: Vec<usize>,
    val: Vec<f64>,
}

impl EtaFile {
    pub fn new() -> Self {
        EtaFile {
            starts: vec![0],
            ..Default::default()
        }
    }

    pub fn clear(&mut self) {
        self.rows.clear();
        self.pivots.clear();
        self.starts.clear();
        self.starts.push(0);
        self.idx.clear();
        self.val.clear();
    }

    /// Appends the eta for a pivot on `row` with transformed column `column = B⁻¹a_q`.
    pub fn push(&mut self, row: usize, column: &[f64]) {
        self.rows.push(row);
        self.pivots.push(column[row]);
        for (i, &v) in column.iter().enumerate() {
            if i != row && v.abs() > DROP_TOL {
                self.idx.push(i);
                self.val.push(v);
            }
        }
        self.starts.push(self.idx.len());
    }

    /// `x ← B⁻¹ x`
    pub fn ftran(&self, x: &mut [f64]) {
        for k in 0..self.rows.len() {
            let r = self.rows[k];
            let xr = x[r];
            if xr == 0.0 {
                continue;
            }
            let xr = xr / self.pivots[k];
            x[r] = xr;
            for p in self.starts[k]..self.starts[k + 1] {
                x[self.idx[p]] -= self.val[p] * xr;
            }
        }
    }

    /// `y ← B⁻ᵀ y`
    pub fn btran(&self, y: &mut [f64]) {
        for k in (0..self.rows.len()).rev() {
            let r = self.rows[k];
            let mut s = y[r];
            for p in self.starts[k]..self.starts[k + 1] {
                s -= self.val[p] * y[self.idx[p]];
            }
            y[r] = s / self.pivots[k];
        }
    }
}
