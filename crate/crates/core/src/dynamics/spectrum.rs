use dyn_stack::{MemBuffer, MemStack};
use faer::linalg::evd::{self, ComputeEigenvectors};
use faer::linalg::matmul::matmul;
use faer::diag::Diag;
use faer::{Accum, Mat, MatRef, Par};
use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::hamiltonian::HamiltonianMatrix;
use crate::error::{Error, Result};

/// Columns per block in batched products; fixed so that results do not
/// depend on the worker count.
pub(crate) const TIME_CHUNK: usize = 16;

/// Sequential symmetric eigendecomposition, eigenvalues ascending.
pub fn symmetric_eigen(a: MatRef<'_, f64>) -> Result<(Vec<f64>, Mat<f64>)> {
    let n = a.nrows();
    if a.ncols() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: a.ncols(),
        });
    }
    let mut u = Mat::<f64>::zeros(n, n);
    let mut s = Diag::<f64>::zeros(n);
    let par = Par::Seq;
    let mut mem = MemBuffer::new(evd::self_adjoint_evd_scratch::<f64>(
        n,
        ComputeEigenvectors::Yes,
        par,
        Default::default(),
    ));
    evd::self_adjoint_evd(
        a,
        s.as_mut(),
        Some(u.as_mut()),
        par,
        MemStack::new(&mut mem),
        Default::default(),
    )
    .map_err(|e| Error::numeric(format!("eigendecomposition failed: {e:?}")))?;
    let values: Vec<f64> = (0..n).map(|i| s.column_vector()[i]).collect();
    if values.iter().any(|v| !v.is_finite()) {
        return Err(Error::numeric("eigendecomposition produced non-finite eigenvalues"));
    }
    Ok((values, u))
}

/// `lhs * rhs` computed in fixed column blocks of `rhs`, each block
/// sequential, blocks distributed over the rayon pool.
pub(crate) fn chunked_product(lhs: MatRef<'_, f64>, rhs: &Mat<f64>) -> Mat<f64> {
    let cols = rhs.ncols();
    let blocks: Vec<Mat<f64>> = (0..cols.div_ceil(TIME_CHUNK))
        .into_par_iter()
        .map(|b| {
            let start = b * TIME_CHUNK;
            let width = TIME_CHUNK.min(cols - start);
            let mut out = Mat::<f64>::zeros(lhs.nrows(), width);
            matmul(
                out.as_mut(),
                Accum::Replace,
                lhs,
                rhs.as_ref().submatrix(0, start, rhs.nrows(), width),
                1.0,
                Par::Seq,
            );
            out
        })
        .collect();
    let mut out = Mat::<f64>::zeros(lhs.nrows(), cols);
    for (b, block) in blocks.iter().enumerate() {
        let start = b * TIME_CHUNK;
        for j in 0..block.ncols() {
            out.col_as_slice_mut(start + j).copy_from_slice(block.col_as_slice(j));
        }
    }
    out
}

/// Plain sequential product.
pub(crate) fn product(lhs: MatRef<'_, f64>, rhs: MatRef<'_, f64>) -> Mat<f64> {
    let mut out = Mat::<f64>::zeros(lhs.nrows(), rhs.ncols());
    matmul(out.as_mut(), Accum::Replace, lhs, rhs, 1.0, Par::Seq);
    out
}

/// Pure state over the three spin blocks.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpinMotionState {
    /// Coefficients `[c0, c1, c2]`, each over the basis.
    pub blocks: [Vec<Complex64>; 3],
    /// Time in seconds.
    pub time: f64,
}

impl SpinMotionState {
    pub fn new(blocks: [Vec<Complex64>; 3], time: f64) -> Result<Self> {
        let n = blocks[0].len();
        for b in &blocks[1..] {
            if b.len() != n {
                return Err(Error::DimensionMismatch {
                    expected: n,
                    found: b.len(),
                });
            }
        }
        let state = Self { blocks, time };
        let norm = state.norm_squared();
        if (norm - 1.0).abs() > 1e-9 {
            return Err(Error::input(format!("state norm squared is {norm}, expected 1")));
        }
        Ok(state)
    }

    /// Member of the spin-0 block occupying a single mode.
    pub fn spin0_mode(n_modes: usize, mode: usize) -> Self {
        let mut c0 = vec![Complex64::new(0.0, 0.0); n_modes];
        c0[mode] = Complex64::new(1.0, 0.0);
        Self {
            blocks: [c0, vec![Complex64::new(0.0, 0.0); n_modes], vec![Complex64::new(0.0, 0.0); n_modes]],
            time: 0.0,
        }
    }

    pub fn n_modes(&self) -> usize {
        self.blocks[0].len()
    }

    pub fn populations(&self) -> [f64; 3] {
        self.blocks.clone().map(|b| b.iter().map(|c| c.norm_sqr()).sum())
    }

    pub fn norm_squared(&self) -> f64 {
        self.populations().iter().sum()
    }

    fn flatten(&self) -> Vec<Complex64> {
        self.blocks.iter().flatten().copied().collect()
    }

    fn from_flat(v: &[Complex64], n: usize, time: f64) -> Self {
        Self {
            blocks: [v[..n].to_vec(), v[n..2 * n].to_vec(), v[2 * n..].to_vec()],
            time,
        }
    }
}

/// Spin populations on a time grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvolutionResult {
    /// Times in seconds.
    pub times: Vec<f64>,
    /// `(N0, N1, N2)` at each time.
    pub populations: Vec<[f64; 3]>,
    pub snapshots: Option<Vec<SpinMotionState>>,
}

impl EvolutionResult {
    /// Largest deviation of the population sum from one.
    pub fn max_norm_error(&self) -> f64 {
        self.populations
            .iter()
            .map(|p| (p.iter().sum::<f64>() - 1.0).abs())
            .fold(0.0, f64::max)
    }
}

/// Eigendecomposition `H = U diag(lambda) U^T`.
#[derive(Debug, Clone)]
pub struct Spectrum {
    pub eigenvalues: Vec<f64>,
    pub eigenvectors: Mat<f64>,
    n_modes: usize,
    omega_bar: f64,
}

pub(crate) fn validate_times(times: &[f64]) -> Result<()> {
    for w in times.windows(2) {
        if w[1] < w[0] {
            return Err(Error::input("time grid must be sorted ascending"));
        }
    }
    if let Some(t) = times.iter().find(|t| !(t.is_finite() && **t >= 0.0)) {
        return Err(Error::input(format!("times must be finite and nonnegative, got {t}")));
    }
    Ok(())
}

impl Spectrum {
    pub fn new(h: &HamiltonianMatrix) -> Result<Self> {
        let (eigenvalues, eigenvectors) = symmetric_eigen(h.matrix().as_ref())?;
        Ok(Self {
            eigenvalues,
            eigenvectors,
            n_modes: h.n_modes(),
            omega_bar: h.omega_bar,
        })
    }

    pub fn n_modes(&self) -> usize {
        self.n_modes
    }

    pub fn dim(&self) -> usize {
        3 * self.n_modes
    }

    pub fn omega_bar(&self) -> f64 {
        self.omega_bar
    }

    /// Phase tables `cos(lambda_k t)` and `sin(lambda_k t)`, one column per
    /// time in seconds.
    pub(crate) fn phase_tables(&self, times: &[f64]) -> (Mat<f64>, Mat<f64>) {
        let d = self.dim();
        let mut c = Mat::<f64>::zeros(d, times.len());
        let mut s = Mat::<f64>::zeros(d, times.len());
        for (j, &t) in times.iter().enumerate() {
            let tau = t * self.omega_bar;
            for k in 0..d {
                let (sin, cos) = (self.eigenvalues[k] * tau).sin_cos();
                c[(k, j)] = cos;
                s[(k, j)] = sin;
            }
        }
        (c, s)
    }

    /// Propagates `initial` to every time (seconds) by
    /// `c(t) = U exp(-i lambda t) U^T c(0)`.
    pub fn evolve(&self, initial: &SpinMotionState, times: &[f64], keep_states: bool) -> Result<EvolutionResult> {
        if initial.n_modes() != self.n_modes {
            return Err(Error::DimensionMismatch {
                expected: self.n_modes,
                found: initial.n_modes(),
            });
        }
        let norm = initial.norm_squared();
        if (norm - 1.0).abs() > 1e-9 {
            return Err(Error::input(format!("initial state norm squared is {norm}, expected 1")));
        }
        validate_times(times)?;
        let d = self.dim();
        let n = self.n_modes;
        let u = self.eigenvectors.as_ref();
        let flat = initial.flatten();
        let re = Mat::from_fn(d, 1, |i, _| flat[i].re);
        let im = Mat::from_fn(d, 1, |i, _| flat[i].im);
        let w_re = product(u.transpose(), re.as_ref());
        let w_im = product(u.transpose(), im.as_ref());

        // exp(-i lambda t) w, split into real and imaginary parts
        let (cos, sin) = self.phase_tables(times);
        let nt = times.len();
        let mut x_re = Mat::<f64>::zeros(d, nt);
        let mut x_im = Mat::<f64>::zeros(d, nt);
        for j in 0..nt {
            for k in 0..d {
                let (c, s) = (cos[(k, j)], sin[(k, j)]);
                let (a, b) = (w_re[(k, 0)], w_im[(k, 0)]);
                x_re[(k, j)] = c * a + s * b;
                x_im[(k, j)] = c * b - s * a;
            }
        }
        let y_re = chunked_product(u, &x_re);
        let y_im = chunked_product(u, &x_im);

        let mut populations = Vec::with_capacity(nt);
        let mut snapshots = keep_states.then(Vec::new);
        for (j, &t) in times.iter().enumerate() {
            if t == 0.0 {
                populations.push(initial.populations());
                if let Some(s) = snapshots.as_mut() {
                    s.push(SpinMotionState {
                        time: 0.0,
                        ..initial.clone()
                    });
                }
                continue;
            }
            let (yr, yi) = (y_re.col_as_slice(j), y_im.col_as_slice(j));
            let mut p = [0.0; 3];
            for (block, pb) in p.iter_mut().enumerate() {
                *pb = (block * n..(block + 1) * n).map(|i| yr[i] * yr[i] + yi[i] * yi[i]).sum();
            }
            populations.push(p);
            if let Some(s) = snapshots.as_mut() {
                let v: Vec<Complex64> = (0..d).map(|i| Complex64::new(yr[i], yi[i])).collect();
                s.push(SpinMotionState::from_flat(&v, n, t));
            }
        }
        Ok(EvolutionResult {
            times: times.to_vec(),
            populations,
            snapshots,
        })
    }
}

/// Diagonalises `H` and propagates `initial`.
pub fn evolve(h: &HamiltonianMatrix, initial: &SpinMotionState, times: &[f64]) -> Result<EvolutionResult> {
    Spectrum::new(h)?.evolve(initial, times, false)
}

/// Lowest eigenvector of the spin-0 block, placed in `c0`, with its largest
/// component made positive.
pub fn groundstate_initial(h: &HamiltonianMatrix) -> Result<SpinMotionState> {
    let block = h.spin0_block();
    let (values, vectors) = symmetric_eigen(block.as_ref())?;
    let n = h.n_modes();
    if values.is_empty() {
        return Err(Error::input("empty basis"));
    }
    let mut v: Vec<f64> = (0..n).map(|i| vectors[(i, 0)]).collect();
    let pivot = v
        .iter()
        .enumerate()
        .fold((0, 0.0f64), |acc, (i, x)| if x.abs() > acc.1 { (i, x.abs()) } else { acc })
        .0;
    if v[pivot] < 0.0 {
        v.iter_mut().for_each(|x| *x = -*x);
    }
    let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    let zero = vec![Complex64::new(0.0, 0.0); n];
    Ok(SpinMotionState {
        blocks: [v.iter().map(|x| Complex64::new(x / norm, 0.0)).collect(), zero.clone(), zero],
        time: 0.0,
    })
}

/// Ground-state energy of the spin-0 block.
pub fn groundstate_energy(h: &HamiltonianMatrix) -> Result<f64> {
    let (values, _) = symmetric_eigen(h.spin0_block().as_ref())?;
    values.first().copied().ok_or_else(|| Error::input("empty basis"))
}
