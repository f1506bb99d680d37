//! Dense non-negative matrix factorization by multiplicative updates.
//!
//! Factorizes a non-negative `M ≈ WH` under the Frobenius objective. W
//! columns are the feature heatmaps, H columns the compressed representation
//! of each sample. The update rules keep both factors non-negative and never
//! increase the objective.

use ndarray::{Array1, Array2, ArrayView1, ArrayView2};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Guards denominators against exact zeros on sparse inputs.
const DENOM_EPS: f64 = 1e-12;

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct NmfOptions {
    pub max_iter: usize,
    /// Relative objective-decrease threshold that stops iteration.
    pub tol: f64,
    pub seed: u64,
}

impl Default for NmfOptions {
    fn default() -> Self {
        NmfOptions {
            max_iter: 500,
            tol: 1e-4,
            seed: 0,
        }
    }
}

/// A fitted factorization. Columns of `w` have unit L1 norm (the scale is
/// folded into `h`), and components are ordered by decreasing total usage.
#[derive(Debug, Clone, PartialEq)]
pub struct FactorModel {
    /// `features × k`.
    pub w: Array2<f64>,
    /// `k × samples`.
    pub h: Array2<f64>,
    pub k: usize,
    /// Frobenius objective at init and after each iteration.
    pub objective_trace: Vec<f64>,
    pub seed: u64,
    /// True when the input matrix was all zeros.
    pub degenerate: bool,
}

impl FactorModel {
    pub fn features(&self) -> usize {
        self.w.nrows()
    }

    pub fn samples(&self) -> usize {
        self.h.ncols()
    }
}

fn frobenius(m: &ArrayView2<f64>) -> f64 {
    m.iter().map(|v| v * v).sum::<f64>().sqrt()
}

fn objective(m: &ArrayView2<f64>, w: &Array2<f64>, h: &Array2<f64>) -> f64 {
    let diff = m - &w.dot(h);
    frobenius(&diff.view())
}

fn validate_nonnegative(m: &ArrayView2<f64>) -> Result<()> {
    for ((row, col), &value) in m.indexed_iter() {
        if !(value >= 0.0) {
            return Err(Error::NegativeEntry { row, col, value });
        }
    }
    Ok(())
}

/// Seeded uniform init scaled to the data: entries in `(0, 1] · √(mean/k)`.
/// W is filled row-major first, then H.
pub fn initial_factors(
    rows: usize,
    cols: usize,
    k: usize,
    data_mean: f64,
    seed: u64,
) -> (Array2<f64>, Array2<f64>) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let scale = (data_mean / k as f64).sqrt().max(f64::MIN_POSITIVE);
    let mut draw = |len: usize| -> Vec<f64> {
        (0..len).map(|_| (1.0 - rng.random::<f64>()) * scale).collect()
    };
    let w = Array2::from_shape_vec((rows, k), draw(rows * k)).expect("shape");
    let h = Array2::from_shape_vec((k, cols), draw(k * cols)).expect("shape");
    (w, h)
}

/// The raw multiplicative-update loop from explicit starting factors.
///
/// Each iteration updates H then W:
///   H ← H ∘ (WᵀM) ⊘ (WᵀWH + ε)
///   W ← W ∘ (MHᵀ) ⊘ (WHHᵀ + ε)
/// Returns the factors and the objective trace (init value plus one entry
/// per iteration). No normalization or reordering is applied.
pub fn fit_from(
    m: &ArrayView2<f64>,
    w0: Array2<f64>,
    h0: Array2<f64>,
    opts: &NmfOptions,
) -> (Array2<f64>, Array2<f64>, Vec<f64>) {
    let mut w = w0;
    let mut h = h0;
    let mut trace = Vec::with_capacity(opts.max_iter + 1);
    trace.push(objective(m, &w, &h));

    for _ in 0..opts.max_iter {
        let wt_m = w.t().dot(m);
        let wt_w_h = w.t().dot(&w).dot(&h);
        ndarray::Zip::from(&mut h).and(&wt_m).and(&wt_w_h).for_each(|h, &n, &d| {
            *h *= n / (d + DENOM_EPS);
        });

        let m_ht = m.dot(&h.t());
        let w_h_ht = w.dot(&h.dot(&h.t()));
        ndarray::Zip::from(&mut w).and(&m_ht).and(&w_h_ht).for_each(|w, &n, &d| {
            *w *= n / (d + DENOM_EPS);
        });

        let obj = objective(m, &w, &h);
        let prev = *trace.last().unwrap();
        trace.push(obj);
        if prev > 0.0 && (prev - obj) / prev < opts.tol {
            break;
        }
    }
    (w, h, trace)
}

/// L1-normalizes W columns (scale folded into H rows) and orders components
/// by decreasing H row sum, ties broken by the first non-zero W cell, then
/// by original index.
fn finalize(w: &mut Array2<f64>, h: &mut Array2<f64>) {
    let k = w.ncols();
    for c in 0..k {
        let norm = w.column(c).sum();
        if norm > 0.0 {
            w.column_mut(c).mapv_inplace(|v| v / norm);
            h.row_mut(c).mapv_inplace(|v| v * norm);
        }
    }

    let mut order: Vec<usize> = (0..k).collect();
    let usage: Vec<f64> = (0..k).map(|c| h.row(c).sum()).collect();
    let first_nonzero: Vec<usize> = (0..k)
        .map(|c| w.column(c).iter().position(|&v| v > 0.0).unwrap_or(usize::MAX))
        .collect();
    order.sort_by(|&a, &b| {
        usage[b]
            .total_cmp(&usage[a])
            .then(first_nonzero[a].cmp(&first_nonzero[b]))
            .then(a.cmp(&b))
    });

    let mut w_sorted = Array2::zeros(w.dim());
    let mut h_sorted = Array2::zeros(h.dim());
    for (dst, &src) in order.iter().enumerate() {
        w_sorted.column_mut(dst).assign(&w.column(src));
        h_sorted.row_mut(dst).assign(&h.row(src));
    }
    *w = w_sorted;
    *h = h_sorted;
}

/// Factorizes a non-negative `features × samples` matrix into k components.
///
/// Deterministic: the same `(m, k, opts)` produce a bit-identical model. An
/// all-zero input yields zero factors flagged `degenerate`.
pub fn nmf_fit(m: &ArrayView2<f64>, k: usize, opts: &NmfOptions) -> Result<FactorModel> {
    let (rows, cols) = m.dim();
    let max_k = rows.min(cols);
    if k == 0 || k > max_k {
        return Err(Error::ComponentCountOutOfRange { k, max: max_k });
    }
    validate_nonnegative(m)?;

    let total: f64 = m.sum();
    if total == 0.0 {
        return Ok(FactorModel {
            w: Array2::zeros((rows, k)),
            h: Array2::zeros((k, cols)),
            k,
            objective_trace: vec![0.0],
            seed: opts.seed,
            degenerate: true,
        });
    }

    let mean = total / (rows * cols) as f64;
    let (w0, h0) = initial_factors(rows, cols, k, mean, opts.seed);
    let (mut w, mut h, trace) = fit_from(m, w0, h0, opts);
    finalize(&mut w, &mut h);

    Ok(FactorModel {
        w,
        h,
        k,
        objective_trace: trace,
        seed: opts.seed,
        degenerate: false,
    })
}

/// Projects a new sample onto a fitted model: holds W fixed and runs the H
/// update on a single column until convergence. The zero vector maps to the
/// zero representation.
pub fn nmf_transform(model: &FactorModel, x: &ArrayView1<f64>) -> Result<Array1<f64>> {
    if x.len() != model.features() {
        return Err(Error::DimensionMismatch {
            expected: format!("{} features", model.features()),
            got: format!("{}", x.len()),
        });
    }
    for (i, &v) in x.iter().enumerate() {
        if !(v >= 0.0) {
            return Err(Error::NegativeEntry { row: i, col: 0, value: v });
        }
    }
    let total = x.sum();
    if total == 0.0 || model.degenerate {
        return Ok(Array1::zeros(model.k));
    }

    const TRANSFORM_MAX_ITER: usize = 20_000;
    const TRANSFORM_TOL: f64 = 1e-13;

    let w = &model.w;
    let wt_x = w.t().dot(x);
    let wt_w = w.t().dot(w);
    let mut h = Array1::from_elem(model.k, total / model.k as f64);
    for _ in 0..TRANSFORM_MAX_ITER {
        let denom = wt_w.dot(&h);
        let mut max_rel = 0.0f64;
        ndarray::Zip::from(&mut h).and(&wt_x).and(&denom).for_each(|h, &n, &d| {
            let next = *h * n / (d + DENOM_EPS);
            let rel = (next - *h).abs() / h.abs().max(f64::MIN_POSITIVE);
            if rel > max_rel {
                max_rel = rel;
            }
            *h = next;
        });
        if max_rel < TRANSFORM_TOL {
            break;
        }
    }
    Ok(h)
}

/// `‖M − WH‖_F` for a fitted model against a data matrix.
pub fn reconstruction_error(model: &FactorModel, m: &ArrayView2<f64>) -> Result<f64> {
    if m.dim() != (model.features(), model.samples()) {
        return Err(Error::DimensionMismatch {
            expected: format!("{}×{}", model.features(), model.samples()),
            got: format!("{}×{}", m.nrows(), m.ncols()),
        });
    }
    Ok(objective(&m.view(), &model.w, &model.h))
}
