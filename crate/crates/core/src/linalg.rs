//! Exact sparse rational matrices and Hermitian eigensolvers.
//!
//! [`RatMat`] carries Gaussian-rational entries plus an overall symbolic
//! (1/sqrt2)^p scale, so ranks and products of lift operators stay exact.
//! Floating-point spectra go through nalgebra's symmetric eigensolver up to a
//! dimension cap, with a Lanczos fallback for the k lowest eigenvalues above
//! it.

use crate::error::{Error, Result};
use crate::scalar::Coeff;
use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use std::collections::BTreeMap;

/// Sparse matrix with exact entries and overall scale (1/sqrt2)^scale_pow.
///
/// Even powers are folded into the entries on construction and after
/// multiplication, so `scale_pow` is always 0 or 1.
#[derive(Clone, Debug, PartialEq)]
pub struct RatMat {
    pub rows: usize,
    pub cols: usize,
    entries: BTreeMap<(usize, usize), Coeff>,
    scale_pow: u8,
}

impl RatMat {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        RatMat {
            rows,
            cols,
            entries: BTreeMap::new(),
            scale_pow: 0,
        }
    }

    pub fn scale_pow(&self) -> u8 {
        self.scale_pow
    }

    /// Multiply the symbolic scale by (1/sqrt2)^pow, folding even powers.
    pub fn with_extra_scale(mut self, pow: u32) -> Self {
        let total = self.scale_pow as u32 + pow;
        let halvings = total / 2;
        self.scale_pow = (total % 2) as u8;
        if halvings > 0 {
            let half = Coeff::from_ratio(1, 1i64 << halvings.min(62));
            debug_assert!(halvings <= 62);
            for v in self.entries.values_mut() {
                *v = &*v * &half;
            }
        }
        self
    }

    pub fn add_entry(&mut self, r: usize, c: usize, v: Coeff) {
        debug_assert!(r < self.rows && c < self.cols);
        if v.is_zero() {
            return;
        }
        let slot = self.entries.entry((r, c)).or_insert_with(Coeff::zero);
        *slot += v;
        if slot.is_zero() {
            self.entries.remove(&(r, c));
        }
    }

    pub fn get(&self, r: usize, c: usize) -> Coeff {
        self.entries.get(&(r, c)).cloned().unwrap_or_else(Coeff::zero)
    }

    pub fn nnz(&self) -> usize {
        self.entries.len()
    }

    pub fn iter(&self) -> impl Iterator<Item = (usize, usize, &Coeff)> {
        self.entries.iter().map(|(&(r, c), v)| (r, c, v))
    }

    pub fn is_zero(&self) -> bool {
        self.entries.is_empty()
    }

    /// Largest entry magnitude, ignoring the symbolic scale.
    pub fn max_abs(&self) -> f64 {
        self.entries
            .values()
            .map(|v| v.abs_f64())
            .fold(0.0, f64::max)
    }

    pub fn conj_transpose(&self) -> RatMat {
        let mut out = RatMat::zeros(self.cols, self.rows);
        out.scale_pow = self.scale_pow;
        for (&(r, c), v) in &self.entries {
            out.entries.insert((c, r), v.conj());
        }
        out
    }

    pub fn mul(&self, rhs: &RatMat) -> Result<RatMat> {
        if self.cols != rhs.rows {
            return Err(Error::DimensionMismatch {
                expected: self.cols,
                got: rhs.rows,
            });
        }
        // Bucket rhs by row for the sparse product.
        let mut rhs_rows: Vec<Vec<(usize, &Coeff)>> = vec![Vec::new(); rhs.rows];
        for (&(r, c), v) in &rhs.entries {
            rhs_rows[r].push((c, v));
        }
        let mut out = RatMat::zeros(self.rows, rhs.cols);
        for (&(r, k), a) in &self.entries {
            for &(c, b) in &rhs_rows[k] {
                out.add_entry(r, c, a * b);
            }
        }
        debug_assert_eq!(out.scale_pow, 0);
        Ok(out.with_extra_scale(self.scale_pow as u32 + rhs.scale_pow as u32))
    }

    pub fn add(&self, rhs: &RatMat) -> Result<RatMat> {
        if self.rows != rhs.rows || self.cols != rhs.cols {
            return Err(Error::DimensionMismatch {
                expected: self.rows,
                got: rhs.rows,
            });
        }
        if self.scale_pow != rhs.scale_pow && !self.is_zero() && !rhs.is_zero() {
            return Err(Error::ExactUnavailable(
                "cannot add matrices with mismatched sqrt2 scales".into(),
            ));
        }
        let mut out = self.clone();
        if out.is_zero() {
            out.scale_pow = rhs.scale_pow;
        }
        for (&(r, c), v) in &rhs.entries {
            out.add_entry(r, c, v.clone());
        }
        Ok(out)
    }

    /// Exact rank over the rationals by sparse Gaussian elimination.
    ///
    /// Pivot rows are chosen by fill-in heuristic (fewest nonzeros); the
    /// symbolic scale is irrelevant to rank.
    pub fn rank(&self) -> usize {
        let mut rows: Vec<BTreeMap<usize, Coeff>> = Vec::new();
        {
            let mut by_row: BTreeMap<usize, BTreeMap<usize, Coeff>> = BTreeMap::new();
            for (&(r, c), v) in &self.entries {
                by_row.entry(r).or_default().insert(c, v.clone());
            }
            rows.extend(by_row.into_values());
        }
        let mut rank = 0;
        while !rows.is_empty() {
            // Shortest remaining row as pivot.
            let pi = rows
                .iter()
                .enumerate()
                .min_by_key(|(_, r)| r.len())
                .map(|(i, _)| i)
                .unwrap();
            let pivot_row = rows.swap_remove(pi);
            let (&pc, pv) = pivot_row.iter().next().unwrap();
            rank += 1;
            let mut survivors = Vec::with_capacity(rows.len());
            for mut row in rows {
                if let Some(rv) = row.remove(&pc) {
                    // row -= (rv / pv) * pivot_row
                    let factor = &rv * &invert(pv);
                    for (&c, v) in &pivot_row {
                        if c == pc {
                            continue;
                        }
                        let delta = -(&factor * v);
                        let slot = row.entry(c).or_insert_with(Coeff::zero);
                        *slot += delta;
                        if slot.is_zero() {
                            row.remove(&c);
                        }
                    }
                }
                if !row.is_empty() {
                    survivors.push(row);
                }
            }
            rows = survivors;
        }
        rank
    }

    /// Dense complex matrix with the symbolic scale applied numerically.
    pub fn to_dense(&self) -> DMatrix<Complex64> {
        let scale = if self.scale_pow == 1 {
            std::f64::consts::FRAC_1_SQRT_2
        } else {
            1.0
        };
        let mut m = DMatrix::zeros(self.rows, self.cols);
        for (&(r, c), v) in &self.entries {
            m[(r, c)] = v.to_c64() * scale;
        }
        m
    }
}

fn invert(c: &Coeff) -> Coeff {
    let norm = &c.re * &c.re + &c.im * &c.im;
    Coeff::from_parts(&c.re / &norm, -(&c.im / &norm))
}

/// Symmetry residual max |M - M†| entrywise.
pub fn hermiticity_residual(m: &DMatrix<Complex64>) -> f64 {
    let n = m.nrows();
    let mut res: f64 = 0.0;
    for r in 0..n {
        for c in r..n {
            res = res.max((m[(r, c)] - m[(c, r)].conj()).norm());
        }
    }
    res
}

/// Ascending eigenvalues of a Hermitian matrix (dense path).
///
/// Rejects inputs whose symmetry residual exceeds 1e-12 relative to the
/// largest entry.
pub fn hermitian_spectrum(m: &DMatrix<Complex64>) -> Result<Vec<f64>> {
    if m.nrows() != m.ncols() {
        return Err(Error::DimensionMismatch {
            expected: m.nrows(),
            got: m.ncols(),
        });
    }
    if m.nrows() == 0 {
        return Ok(Vec::new());
    }
    let scale = m.iter().map(|z| z.norm()).fold(0.0, f64::max).max(1.0);
    let residual = hermiticity_residual(m);
    if residual > 1e-12 * scale {
        return Err(Error::NonHermitian { residual });
    }
    // Symmetrize to wash out representation noise before factorizing.
    let h = (m + m.adjoint()) * Complex64::new(0.5, 0.0);
    let eig = h.symmetric_eigen();
    let mut vals: Vec<f64> = eig.eigenvalues.iter().copied().collect();
    vals.sort_by(|a, b| a.partial_cmp(b).unwrap());
    Ok(vals)
}

/// Eigenvalues plus eigenvectors, ascending.
pub fn hermitian_eigen(m: &DMatrix<Complex64>) -> Result<(Vec<f64>, DMatrix<Complex64>)> {
    if m.nrows() == 0 {
        return Ok((Vec::new(), DMatrix::zeros(0, 0)));
    }
    let scale = m.iter().map(|z| z.norm()).fold(0.0, f64::max).max(1.0);
    let residual = hermiticity_residual(m);
    if residual > 1e-12 * scale {
        return Err(Error::NonHermitian { residual });
    }
    let h = (m + m.adjoint()) * Complex64::new(0.5, 0.0);
    let eig = h.symmetric_eigen();
    let mut order: Vec<usize> = (0..eig.eigenvalues.len()).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].partial_cmp(&eig.eigenvalues[b]).unwrap());
    let vals: Vec<f64> = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let vecs = DMatrix::from_fn(m.nrows(), order.len(), |r, c| eig.eigenvectors[(r, order[c])]);
    Ok((vals, vecs))
}

/// Lanczos with full reorthogonalization: the k smallest eigenvalues of a
/// Hermitian operator given only its matvec.
pub fn lanczos_smallest<F>(dim: usize, k: usize, matvec: F) -> Result<Vec<f64>>
where
    F: Fn(&DVector<Complex64>) -> DVector<Complex64>,
{
    if dim == 0 || k == 0 {
        return Ok(Vec::new());
    }
    let want = k.min(dim);
    // Ritz buffer: a handful of extra vectors sharpens the low end.
    let krylov = (want + 8).min(dim).max(2.min(dim));
    let max_iter = (4 * krylov).min(dim).max(krylov);

    let mut basis: Vec<DVector<Complex64>> = Vec::with_capacity(max_iter);
    let mut alphas: Vec<f64> = Vec::new();
    let mut betas: Vec<f64> = Vec::new();

    // Deterministic pseudo-random start vector.
    let mut v = DVector::from_fn(dim, |i, _| {
        let x = ((i as u64).wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407) >> 33)
            as f64
            / (1u64 << 31) as f64;
        Complex64::new(x - 0.5, 0.0)
    });
    let n0 = v.norm();
    if n0 == 0.0 {
        return Err(Error::EigenFailure);
    }
    v /= Complex64::new(n0, 0.0);

    for _ in 0..max_iter {
        let mut w = matvec(&v);
        if w.len() != dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                got: w.len(),
            });
        }
        let alpha = v.dotc(&w).re;
        alphas.push(alpha);
        basis.push(v.clone());
        // Full reorthogonalization, twice for stability.
        for _ in 0..2 {
            for b in &basis {
                let proj = b.dotc(&w);
                w -= b * proj;
            }
        }
        let beta = w.norm();
        if beta < 1e-12 || basis.len() == dim {
            break;
        }
        betas.push(beta);
        v = w / Complex64::new(beta, 0.0);
    }

    let t = alphas.len();
    let mut tri = DMatrix::<Complex64>::zeros(t, t);
    for i in 0..t {
        tri[(i, i)] = Complex64::new(alphas[i], 0.0);
        if i + 1 < t {
            tri[(i, i + 1)] = Complex64::new(betas[i], 0.0);
            tri[(i + 1, i)] = Complex64::new(betas[i], 0.0);
        }
    }
    let mut ritz = hermitian_spectrum(&tri)?;
    ritz.truncate(want);
    Ok(ritz)
}
