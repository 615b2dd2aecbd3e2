//! Incoherent average over thermally occupied spin-0 motional modes.
//!
//! Every ensemble member starts in `|0,0>` times one motional mode, so with
//! `H = U diag(lambda) U^T` the averaged spin coherences are
//!
//! ```text
//! rho_ij(t) = sum_kl exp(-i (lambda_k - lambda_l) t) A^ij_kl B_kl,
//! A^ij = U_i^T U_j,  B = U_0^T diag(P) U_0,
//! ```
//!
//! where `U_i` is the row block of spin `i`. With `M = A o B` this is
//! `c^T M c + s^T M s + i (c^T M s - s^T M c)` for `c = cos(lambda t)`,
//! `s = sin(lambda t)`.

use faer::{Mat, MatRef};
use num_complex::Complex64;
use super::spectrum::{chunked_product, product, validate_times, EvolutionResult, SpinMotionState, Spectrum};
use crate::error::{Error, Result};
use crate::trajectory::PopulationTrajectory;

/// Thermal ensemble sharing one eigendecomposition.
#[derive(Debug, Clone)]
pub struct ThermalEnsemble<'a> {
    spectrum: &'a Spectrum,
    weights: Vec<f64>,
    b: Mat<f64>,
}

impl<'a> ThermalEnsemble<'a> {
    /// `weights` are the member probabilities over the basis; they are
    /// renormalised to sum to one.
    pub fn new(spectrum: &'a Spectrum, weights: &[f64]) -> Result<Self> {
        let n = spectrum.n_modes();
        if weights.len() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: weights.len(),
            });
        }
        if weights.iter().any(|w| !(w.is_finite() && *w >= 0.0)) {
            return Err(Error::input("ensemble weights must be finite and nonnegative"));
        }
        let total: f64 = weights.iter().sum();
        if total <= 0.0 {
            return Err(Error::input("ensemble weights sum to zero"));
        }
        let weights: Vec<f64> = weights.iter().map(|w| w / total).collect();
        let d = spectrum.dim();
        let u = spectrum.eigenvectors.as_ref();
        let scaled = Mat::from_fn(n, d, |i, k| weights[i].sqrt() * u[(i, k)]);
        let b = product(scaled.transpose(), scaled.as_ref());
        Ok(Self { spectrum, weights, b })
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    fn block(&self, i: usize) -> MatRef<'_, f64> {
        let n = self.spectrum.n_modes();
        self.spectrum
            .eigenvectors
            .as_ref()
            .submatrix(i * n, 0, n, self.spectrum.dim())
    }

    /// `M^ij = (U_i^T U_j) o B`.
    fn weighted_overlap(&self, i: usize, j: usize) -> Mat<f64> {
        let mut m = product(self.block(i).transpose(), self.block(j));
        let d = m.nrows();
        for c in 0..d {
            let bc = self.b.col_as_slice(c);
            for (x, y) in m.col_as_slice_mut(c).iter_mut().zip(bc) {
                *x *= y;
            }
        }
        m
    }

    /// Ensemble-averaged coherence `rho_ij` at each time (seconds).
    pub fn coherence(&self, i: usize, j: usize, times: &[f64]) -> Result<Vec<Complex64>> {
        if i > 2 || j > 2 {
            return Err(Error::input(format!("spin block index out of range: ({i}, {j})")));
        }
        validate_times(times)?;
        let m = self.weighted_overlap(i, j);
        let (cos, sin) = self.spectrum.phase_tables(times);
        let mc = chunked_product(m.as_ref(), &cos);
        let ms = chunked_product(m.as_ref(), &sin);
        let out = times
            .iter()
            .enumerate()
            .map(|(t, &time)| {
                if time == 0.0 {
                    let v = if i == 0 && j == 0 { 1.0 } else { 0.0 };
                    return Complex64::new(v, 0.0);
                }
                let (c, s) = (cos.col_as_slice(t), sin.col_as_slice(t));
                let (mc, ms) = (mc.col_as_slice(t), ms.col_as_slice(t));
                let mut re = 0.0;
                let mut im = 0.0;
                for k in 0..c.len() {
                    re += c[k] * mc[k] + s[k] * ms[k];
                    im += c[k] * ms[k] - s[k] * mc[k];
                }
                Complex64::new(re, if i == j { 0.0 } else { im })
            })
            .collect();
        Ok(out)
    }

    /// Thermally averaged spin populations.
    pub fn populations(&self, times: &[f64]) -> Result<PopulationTrajectory> {
        let series: Vec<Vec<f64>> = (0..3)
            .map(|j| Ok(self.coherence(j, j, times)?.iter().map(|z| z.re).collect()))
            .collect::<Result<_>>()?;
        let rows: Vec<[f64; 3]> = (0..times.len()).map(|t| [series[0][t], series[1][t], series[2][t]]).collect();
        Ok(PopulationTrajectory::from_rows(times.to_vec(), &rows))
    }

    /// Full 3x3 block of spin coherences at each time.
    pub fn coherences(&self, times: &[f64]) -> Result<Vec<[[Complex64; 3]; 3]>> {
        let mut out = vec![[[Complex64::new(0.0, 0.0); 3]; 3]; times.len()];
        for i in 0..3 {
            for j in i..3 {
                let v = self.coherence(i, j, times)?;
                for (t, z) in v.into_iter().enumerate() {
                    out[t][i][j] = z;
                    out[t][j][i] = z.conj();
                }
            }
        }
        Ok(out)
    }

    /// Evolution of one member, by direct propagation.
    pub fn member(&self, mode: usize, times: &[f64]) -> Result<EvolutionResult> {
        let n = self.spectrum.n_modes();
        if mode >= n {
            return Err(Error::input(format!("member {mode} outside basis of {n} modes")));
        }
        self.spectrum.evolve(&SpinMotionState::spin0_mode(n, mode), times, false)
    }

    /// Weighted sum of directly propagated members; a slow cross-check of
    /// [`Self::populations`].
    pub fn populations_by_members(&self, times: &[f64]) -> Result<PopulationTrajectory> {
        let mut rows = vec![[0.0; 3]; times.len()];
        for (m, &w) in self.weights.iter().enumerate() {
            if w == 0.0 {
                continue;
            }
            let r = self.member(m, times)?;
            for (acc, p) in rows.iter_mut().zip(&r.populations) {
                for j in 0..3 {
                    acc[j] += w * p[j];
                }
            }
        }
        Ok(PopulationTrajectory::from_rows(times.to_vec(), &rows))
    }
}
