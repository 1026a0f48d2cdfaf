//! Eigendecomposition of a real state matrix in the biorthonormal form
//! `V Uᵀ = I`, modal projections and participation factors.
//!
//! Scaling: each right eigenvector has unit Euclidean norm and its
//! largest-magnitude entry (first one on ties) is real and positive. Left
//! eigenvectors are the rows of `V⁻¹`, so `uᵢᵀ vⱼ = δᵢⱼ` with a plain
//! transpose. Modes are ordered by descending real part, ties by descending
//! imaginary part. Conjugate partners are exact conjugates of each other.

mod schur;

use nalgebra::{DMatrix, DVector};
use serde::Serialize;

use crate::error::{ModalError, Result};
use crate::linalg::{complexify, dot_t, C64};

/// Default tolerance for the decomposition: pair detection, residual checks
/// and the defectiveness threshold.
pub const DEFAULT_TOL: f64 = 1e-8;

/// How a mode relates to the rest of the spectrum of a real matrix.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ModeGroup {
    /// A real eigenvalue.
    Real(usize),
    /// A conjugate pair; the first index carries the positive imaginary part.
    Pair(usize, usize),
}

/// Eigenvalues with right (`V`) and left (`U`) eigenvectors, `V Uᵀ = I`.
#[derive(Debug, Clone, PartialEq)]
pub struct EigenBasis {
    lambdas: DVector<C64>,
    v: DMatrix<C64>,
    u: DMatrix<C64>,
    groups: Vec<ModeGroup>,
    partner: Vec<Option<usize>>,
    overlaps: Vec<f64>,
    degenerate: Vec<Vec<usize>>,
    residuals: SpectralResiduals,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SpectralResiduals {
    /// `maxᵢ ‖A vᵢ − λᵢ vᵢ‖ / (‖A‖_F ‖vᵢ‖)`
    pub right: f64,
    /// `maxᵢ ‖uᵢᵀ A − λᵢ uᵢᵀ‖ / (‖A‖_F ‖uᵢ‖)`
    pub left: f64,
    /// `‖V Uᵀ − I‖_F`
    pub biorthogonality: f64,
}

impl EigenBasis {
    pub fn len(&self) -> usize {
        self.lambdas.len()
    }

    pub fn is_empty(&self) -> bool {
        self.lambdas.is_empty()
    }

    pub fn lambdas(&self) -> &DVector<C64> {
        &self.lambdas
    }

    pub fn lambda(&self, i: usize) -> C64 {
        self.lambdas[i]
    }

    /// Right eigenvectors as columns.
    pub fn right(&self) -> &DMatrix<C64> {
        &self.v
    }

    /// Left eigenvectors as columns (`uᵢᵀ A = λᵢ uᵢᵀ`).
    pub fn left(&self) -> &DMatrix<C64> {
        &self.u
    }

    pub fn right_vector(&self, i: usize) -> DVector<C64> {
        self.v.column(i).into_owned()
    }

    pub fn left_vector(&self, i: usize) -> DVector<C64> {
        self.u.column(i).into_owned()
    }

    pub fn groups(&self) -> &[ModeGroup] {
        &self.groups
    }

    /// Index of the conjugate partner of mode `i`, if it is complex.
    pub fn partner(&self, i: usize) -> Option<usize> {
        self.partner[i]
    }

    /// `|ûᵢᵀ v̂ᵢ|` for unit-norm eigenvectors before the biorthonormal
    /// rescaling: the reciprocal condition number of each eigenvalue.
    pub fn overlaps(&self) -> &[f64] {
        &self.overlaps
    }

    /// Clusters of numerically repeated eigenvalues. Modal quantities inside
    /// a cluster depend on the chosen eigenspace basis.
    pub fn degenerate_clusters(&self) -> &[Vec<usize>] {
        &self.degenerate
    }

    pub fn residuals(&self) -> SpectralResiduals {
        self.residuals
    }

    /// `z̄ᵢ = v̄ᵢ (ūᵢᵀ x)`, the share of the state living in mode `i`.
    pub fn modal_projection(&self, x: &DVector<f64>, i: usize) -> Result<DVector<C64>> {
        self.check_state(x)?;
        self.check_mode(i)?;
        Ok(self.project(&complexify(x), i))
    }

    /// All modal projections as columns; they sum to `x`.
    pub fn modal_projections(&self, x: &DVector<f64>) -> Result<DMatrix<C64>> {
        self.check_state(x)?;
        let xc = complexify(x);
        let mut z = DMatrix::zeros(self.len(), self.len());
        for i in 0..self.len() {
            z.set_column(i, &self.project(&xc, i));
        }
        Ok(z)
    }

    pub(crate) fn project(&self, x: &DVector<C64>, i: usize) -> DVector<C64> {
        let amplitude = dot_t(&self.left_vector(i), x);
        self.v.column(i) * amplitude
    }

    /// Participation factors `p_ki = ūᵢ[k] · v̄ᵢ[k]`; column `i` sums to one.
    pub fn participation_matrix(&self) -> DMatrix<C64> {
        self.u.component_mul(&self.v)
    }

    pub(crate) fn check_state(&self, x: &DVector<f64>) -> Result<()> {
        if x.len() != self.len() {
            return Err(ModalError::DimensionMismatch(format!(
                "state has {} entries, basis has {} modes",
                x.len(),
                self.len()
            )));
        }
        if x.iter().any(|v| !v.is_finite()) {
            return Err(ModalError::non_finite("state x"));
        }
        Ok(())
    }

    fn check_mode(&self, i: usize) -> Result<()> {
        if i >= self.len() {
            return Err(ModalError::InvalidInput(format!("mode {i} out of range for {} modes", self.len())));
        }
        Ok(())
    }
}

/// Decomposes a real square matrix into a biorthonormal eigenbasis.
///
/// Fails with [`ModalError::DefectiveMatrix`] when a unit left/right
/// eigenvector pair is nearly orthogonal (`|ûᵢᵀv̂ᵢ| < tol`), i.e. the matrix
/// is at or near a Jordan block and has no usable modal expansion.
pub fn decompose(a: &DMatrix<f64>, tol: f64) -> Result<EigenBasis> {
    if !a.is_square() || a.nrows() == 0 {
        return Err(ModalError::DimensionMismatch(format!("state matrix is {}x{}", a.nrows(), a.ncols())));
    }
    if a.iter().any(|v| !v.is_finite()) {
        return Err(ModalError::non_finite("state matrix A"));
    }
    if !(tol > 0.0) {
        return Err(ModalError::InvalidInput(format!("tolerance must be positive, got {tol}")));
    }
    let n = a.nrows();
    let raw = schur::real_eigen(a)?;

    // Unpack into complex modes; `mate` links the two halves of a pair.
    let mut lambdas = Vec::with_capacity(n);
    let mut vectors: Vec<DVector<C64>> = Vec::with_capacity(n);
    let mut mate: Vec<Option<usize>> = vec![None; n];
    let mut k = 0;
    while k < n {
        if raw.imag[k] > 0.0 && k + 1 < n {
            let lam = C64::new(raw.real[k], raw.imag[k]);
            let v = DVector::from_fn(n, |r, _| C64::new(raw.vecs[(r, k)], raw.vecs[(r, k + 1)]));
            let v = normalize_right(v);
            lambdas.push(lam);
            lambdas.push(lam.conj());
            vectors.push(v.map(|c| c.conj()));
            vectors.insert(k, v);
            mate[k] = Some(k + 1);
            mate[k + 1] = Some(k);
            k += 2;
        } else {
            lambdas.push(C64::new(raw.real[k], 0.0));
            vectors.push(normalize_right(DVector::from_fn(n, |r, _| C64::new(raw.vecs[(r, k)], 0.0))));
            k += 1;
        }
    }

    // Descending real part, ties by descending imaginary part.
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| {
        lambdas[j].re.total_cmp(&lambdas[i].re).then(lambdas[j].im.total_cmp(&lambdas[i].im))
    });
    let mut position = vec![0; n];
    for (new, &old) in order.iter().enumerate() {
        position[old] = new;
    }
    let lambdas = DVector::from_iterator(n, order.iter().map(|&i| lambdas[i]));
    let mut v = DMatrix::zeros(n, n);
    for (new, &old) in order.iter().enumerate() {
        v.set_column(new, &vectors[old]);
    }
    let partner: Vec<Option<usize>> = order.iter().map(|&old| mate[old].map(|m| position[m])).collect();

    let inv = v.clone().lu().try_inverse().ok_or(ModalError::DefectiveMatrix { mode: 0, overlap: 0.0, tol })?;

    // Raw overlaps of unit vectors: rows of V⁻¹ satisfy uᵢᵀvᵢ = 1, so the
    // unit-normalized overlap is 1/‖uᵢ‖.
    let mut overlaps = Vec::with_capacity(n);
    for i in 0..n {
        let norm = inv.row(i).norm();
        let overlap = if norm.is_finite() && norm > 0.0 { 1.0 / norm } else { 0.0 };
        if overlap < tol {
            return Err(ModalError::DefectiveMatrix { mode: i, overlap, tol });
        }
        overlaps.push(overlap);
    }

    let mut u = inv.transpose();
    for i in 0..n {
        match partner[i] {
            Some(j) if i < j => {
                let avg = (u.column(i) + u.column(j).map(|c| c.conj())) * C64::new(0.5, 0.0);
                let ui = rescale_left(avg, &v.column(i).into_owned());
                u.set_column(j, &ui.map(|c| c.conj()));
                u.set_column(i, &ui);
            }
            Some(_) => {}
            None => {
                let real = u.column(i).map(|c| C64::new(c.re, 0.0));
                let ui = rescale_left(real, &v.column(i).into_owned());
                u.set_column(i, &ui);
            }
        }
    }

    let mut groups = Vec::new();
    for i in 0..n {
        match partner[i] {
            None => groups.push(ModeGroup::Real(i)),
            Some(j) if i < j => {
                if lambdas[i].im > 0.0 {
                    groups.push(ModeGroup::Pair(i, j));
                } else {
                    groups.push(ModeGroup::Pair(j, i));
                }
            }
            Some(_) => {}
        }
    }

    let degenerate = clusters(&lambdas, tol);
    let residuals = residuals(a, &lambdas, &v, &u);
    let scale_ok = |r: f64| r <= tol;
    if !scale_ok(residuals.right) || !scale_ok(residuals.left) || residuals.biorthogonality > n as f64 * tol {
        return Err(ModalError::Numerical(format!(
            "eigenbasis residuals too large (right {:.2e}, left {:.2e}, biorthogonality {:.2e})",
            residuals.right, residuals.left, residuals.biorthogonality
        )));
    }

    Ok(EigenBasis { lambdas, v, u, groups, partner, overlaps, degenerate, residuals })
}

fn normalize_right(v: DVector<C64>) -> DVector<C64> {
    let mut best = 0;
    let mut best_mag = -1.0;
    for (k, c) in v.iter().enumerate() {
        let mag = c.norm();
        if mag > best_mag {
            best_mag = mag;
            best = k;
        }
    }
    let norm = v.norm();
    if norm == 0.0 {
        return v;
    }
    // Rotate the dominant entry onto the positive real axis, then unit norm.
    let phase = v[best] / C64::new(v[best].norm(), 0.0);
    let scale = phase.conj() / C64::new(norm, 0.0);
    let mut out = v * scale;
    out[best] = C64::new(out[best].re, 0.0);
    out
}

fn rescale_left(u: DVector<C64>, v: &DVector<C64>) -> DVector<C64> {
    let s = dot_t(&u, v);
    u / s
}

fn clusters(lambdas: &DVector<C64>, tol: f64) -> Vec<Vec<usize>> {
    let n = lambdas.len();
    let mut seen = vec![false; n];
    let mut out = Vec::new();
    for i in 0..n {
        if seen[i] {
            continue;
        }
        let members: Vec<usize> = (i..n)
            .filter(|&j| (lambdas[i] - lambdas[j]).norm() <= tol * (1.0 + lambdas[i].norm()))
            .collect();
        if members.len() > 1 {
            for &j in &members {
                seen[j] = true;
            }
            out.push(members);
        }
    }
    out
}

fn residuals(a: &DMatrix<f64>, lambdas: &DVector<C64>, v: &DMatrix<C64>, u: &DMatrix<C64>) -> SpectralResiduals {
    let n = a.nrows();
    let ac = a.map(|x| C64::new(x, 0.0));
    let a_norm = a.norm().max(f64::MIN_POSITIVE);
    let av = &ac * v;
    let uta = u.transpose() * &ac;
    let mut right: f64 = 0.0;
    let mut left: f64 = 0.0;
    for i in 0..n {
        let vi = v.column(i);
        let ri = (av.column(i) - vi * lambdas[i]).norm() / (a_norm * vi.norm());
        let ui = u.column(i);
        let li = (uta.row(i).transpose() - ui * lambdas[i]).norm() / (a_norm * ui.norm());
        right = right.max(ri);
        left = left.max(li);
    }
    let biorthogonality = (v * u.transpose() - DMatrix::<C64>::identity(n, n)).norm();
    SpectralResiduals { right, left, biorthogonality }
}
