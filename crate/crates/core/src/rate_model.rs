//! Incoherent three-state rate equations for the pair-state populations,
//! rate ratios from the spin couplings, and a one-parameter least-squares
//! fit.

use std::io::{Read, Write};

use faer::Mat;
use rand::Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::dynamics::symmetric_eigen;
use crate::error::{Error, Result};
use crate::spin_channels::{CouplingTable, ScatteringLengths, RB85_UNCERTAINTIES};
use crate::trajectory::PopulationTrajectory;

/// Default `gamma01 / gamma12` derived from the rubidium-85 couplings.
pub const DEFAULT_RATIO: f64 = 2.34;

/// Transition rates, 1/s.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RateParams {
    pub gamma01: f64,
    pub gamma12: f64,
    /// Direct `|0,0> <-> S|2,-2>` rate; zero unless explicitly enabled.
    pub gamma02: f64,
}

impl RateParams {
    pub fn new(gamma01: f64, gamma12: f64) -> Result<Self> {
        let p = Self {
            gamma01,
            gamma12,
            gamma02: 0.0,
        };
        p.validate()?;
        Ok(p)
    }

    /// `gamma01 = ratio * gamma12`.
    pub fn from_ratio(gamma12: f64, ratio: f64) -> Result<Self> {
        Self::new(ratio * gamma12, gamma12)
    }

    pub fn with_gamma02(mut self, gamma02: f64) -> Result<Self> {
        self.gamma02 = gamma02;
        self.validate()?;
        Ok(self)
    }

    pub fn validate(&self) -> Result<()> {
        for (name, g) in [("gamma01", self.gamma01), ("gamma12", self.gamma12), ("gamma02", self.gamma02)] {
            if !(g.is_finite() && g >= 0.0) {
                return Err(Error::input(format!("{name} must be finite and nonnegative, got {g}")));
            }
        }
        Ok(())
    }

    /// Generator `G` of `dP/dt = G P`; symmetric with zero column sums.
    pub fn generator(&self) -> [[f64; 3]; 3] {
        let (a, b, c) = (self.gamma01, self.gamma12, self.gamma02);
        [[-a - c, a, c], [a, -a - b, b], [c, b, -b - c]]
    }
}

/// Rate ratios from the coupling matrix elements between pair states.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RateRatios {
    /// `gamma01 / gamma12`.
    pub r01_12: Option<f64>,
    /// `gamma02 / gamma01`.
    pub r02_01: Option<f64>,
    /// `gamma02 / gamma12`.
    pub r02_12: Option<f64>,
}

impl RateRatios {
    pub fn is_degenerate(&self) -> bool {
        self.r01_12.is_none() || self.r02_01.is_none() || self.r02_12.is_none()
    }
}

/// Summary of a sampled ratio distribution.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SampledRatio {
    pub mean: f64,
    pub std_dev: f64,
    pub p16: f64,
    pub median: f64,
    pub p84: f64,
}

/// Ratios propagated through scattering-length uncertainties.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RatioUncertainty {
    pub samples: usize,
    pub r01_12: SampledRatio,
    pub r02_01: SampledRatio,
    pub r02_12: SampledRatio,
}

fn ratio(num: f64, den: f64) -> Option<f64> {
    (den != 0.0).then(|| num / den)
}

/// Squared matrix elements `(|01|^2, |12|^2, |02|^2)` in the symmetrised basis.
fn squared_elements(table: &CouplingTable) -> (f64, f64, f64) {
    let e01 = 2.0 * table.g00_1m1 * table.g00_1m1;
    let e12 = 4.0 * table.g1m1_2m2 * table.g1m1_2m2;
    let e02 = 2.0 * table.g00_2m2 * table.g00_2m2;
    (e01, e12, e02)
}

/// `((sqrt2 g00_1m1)^2 / (2 g1m1_2m2)^2, (sqrt2 g00_2m2)^2 / (sqrt2 g00_1m1)^2,
/// (sqrt2 g00_2m2)^2 / (2 g1m1_2m2)^2)`; a zero denominator yields `None`.
pub fn rate_ratios(table: &CouplingTable) -> RateRatios {
    let (e01, e12, e02) = squared_elements(table);
    RateRatios {
        r01_12: ratio(e01, e12),
        r02_01: ratio(e02, e01),
        r02_12: ratio(e02, e12),
    }
}

fn summarize(mut v: Vec<f64>) -> SampledRatio {
    let n = v.len() as f64;
    let mean = v.iter().sum::<f64>() / n;
    let var = v.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0).max(1.0);
    v.sort_by(f64::total_cmp);
    let q = |p: f64| v[((p * (v.len() - 1) as f64).round() as usize).min(v.len() - 1)];
    SampledRatio {
        mean,
        std_dev: var.sqrt(),
        p16: q(0.16),
        median: q(0.5),
        p84: q(0.84),
    }
}

/// Propagates Gaussian scattering-length uncertainties `sigma` into the
/// ratios by sampling. Draws with a vanishing denominator are skipped.
pub fn rate_ratio_uncertainty<R: Rng + ?Sized>(
    lengths: &ScatteringLengths,
    sigma: [f64; 3],
    samples: usize,
    rng: &mut R,
) -> Result<RatioUncertainty> {
    if samples < 2 {
        return Err(Error::input("ratio sampling needs at least two samples"));
    }
    let normals = lengths
        .as_array()
        .iter()
        .zip(sigma)
        .map(|(&a, s)| Normal::new(a, s).map_err(|e| Error::input(format!("invalid uncertainty {s}: {e}"))))
        .collect::<Result<Vec<_>>>()?;
    let mut out = [Vec::with_capacity(samples), Vec::with_capacity(samples), Vec::with_capacity(samples)];
    for _ in 0..samples {
        let g = [normals[0].sample(rng), normals[1].sample(rng), normals[2].sample(rng)];
        let r = rate_ratios(&CouplingTable::from_channel_couplings(g));
        if let (Some(a), Some(b), Some(c)) = (r.r01_12, r.r02_01, r.r02_12) {
            out[0].push(a);
            out[1].push(b);
            out[2].push(c);
        }
    }
    if out[0].len() < 2 {
        return Err(Error::numeric("every ratio sample was degenerate"));
    }
    let [a, b, c] = out;
    Ok(RatioUncertainty {
        samples: a.len(),
        r01_12: summarize(a),
        r02_01: summarize(b),
        r02_12: summarize(c),
    })
}

/// Sampled uncertainty at the rubidium-85 central values and error bars.
pub fn rb85_ratio_uncertainty<R: Rng + ?Sized>(samples: usize, rng: &mut R) -> Result<RatioUncertainty> {
    rate_ratio_uncertainty(&ScatteringLengths::rb85(), RB85_UNCERTAINTIES, samples, rng)
}

fn validate_initial(initial: [f64; 3]) -> Result<()> {
    if initial.iter().any(|p| !p.is_finite()) {
        return Err(Error::input("initial populations must be finite"));
    }
    Ok(())
}

/// Eigendecomposition of the rate generator, reused across time points.
struct Propagator {
    values: [f64; 3],
    vectors: Mat<f64>,
}

impl Propagator {
    fn new(params: &RateParams) -> Result<Self> {
        let g = params.generator();
        let m = Mat::from_fn(3, 3, |i, j| g[i][j]);
        let (values, vectors) = symmetric_eigen(m.as_ref())?;
        Ok(Self {
            values: [values[0], values[1], values[2]],
            vectors,
        })
    }

    fn apply(&self, initial: &[f64; 3], t: f64) -> [f64; 3] {
        if t == 0.0 {
            return *initial;
        }
        let v = &self.vectors;
        let proj: [f64; 3] = std::array::from_fn(|k| (0..3).map(|i| v[(i, k)] * initial[i]).sum::<f64>());
        let decay: [f64; 3] = std::array::from_fn(|k| (self.values[k] * t).exp() * proj[k]);
        std::array::from_fn(|i| (0..3).map(|k| v[(i, k)] * decay[k]).sum())
    }
}

/// Exact solution of the rate equations on a time grid (seconds).
pub fn solve_rate_equations(params: &RateParams, initial: [f64; 3], times: &[f64]) -> Result<PopulationTrajectory> {
    params.validate()?;
    validate_initial(initial)?;
    if times.windows(2).any(|w| w[1] < w[0]) {
        return Err(Error::input("time grid must be sorted ascending"));
    }
    let prop = Propagator::new(params)?;
    let rows: Vec<[f64; 3]> = times.iter().map(|&t| prop.apply(&initial, t)).collect();
    Ok(PopulationTrajectory::from_rows(times.to_vec(), &rows))
}

/// Options for [`fit_rate`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FitOptions {
    /// Model initial state; `None` uses the first data row.
    pub initial: Option<[f64; 3]>,
    /// Inverse-variance weighting when standard errors are present.
    pub weighted: bool,
    /// `gamma02 / gamma12`; zero by default.
    pub gamma02_ratio: f64,
    /// Points in the logarithmic scan.
    pub scan_points: usize,
    /// Relative tolerance of the golden-section refinement.
    pub tolerance: f64,
}

impl Default for FitOptions {
    fn default() -> Self {
        Self {
            initial: Some([1.0, 0.0, 0.0]),
            weighted: false,
            gamma02_ratio: 0.0,
            scan_points: 241,
            tolerance: 1e-12,
        }
    }
}

/// Result of a one-parameter rate fit.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RateFit {
    pub gamma12: f64,
    pub gamma01: f64,
    /// Weighted sum of squared residuals over all three series.
    pub residual: f64,
    pub model: PopulationTrajectory,
    /// Every data point was identical.
    pub degenerate: bool,
    pub evaluations: usize,
}

struct Objective<'a> {
    data: &'a PopulationTrajectory,
    initial: [f64; 3],
    ratio: f64,
    gamma02_ratio: f64,
    weights: Option<[Vec<f64>; 3]>,
    evaluations: std::cell::Cell<usize>,
}

impl Objective<'_> {
    fn params(&self, gamma12: f64) -> Result<RateParams> {
        RateParams::from_ratio(gamma12, self.ratio)?.with_gamma02(self.gamma02_ratio * gamma12)
    }

    fn eval(&self, gamma12: f64) -> Result<f64> {
        self.evaluations.set(self.evaluations.get() + 1);
        let model = solve_rate_equations(&self.params(gamma12)?, self.initial, &self.data.times)?;
        let mut sse = 0.0;
        for (s, (d, m)) in self.data.series().iter().zip(model.series()).enumerate() {
            for i in 0..d.len() {
                let w = self.weights.as_ref().map_or(1.0, |w| w[s][i]);
                sse += w * (d[i] - m[i]).powi(2);
            }
        }
        Ok(sse)
    }
}

fn golden_section(f: &Objective<'_>, mut a: f64, mut b: f64, tol: f64) -> Result<(f64, f64)> {
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = b - inv_phi * (b - a);
    let mut d = a + inv_phi * (b - a);
    let mut fc = f.eval(c)?;
    let mut fd = f.eval(d)?;
    for _ in 0..400 {
        if (b - a).abs() <= tol * (a.abs() + b.abs()).max(f64::MIN_POSITIVE) {
            break;
        }
        if fc <= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = f.eval(c)?;
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = f.eval(d)?;
        }
    }
    if (b - a).abs() > 1e3 * tol * (a.abs() + b.abs()) {
        return Err(Error::NoConvergence(format!(
            "golden-section search stalled with bracket [{a}, {b}]"
        )));
    }
    let x = 0.5 * (a + b);
    Ok((x, f.eval(x)?))
}

fn scan_grid(times: &[f64], points: usize) -> Result<Vec<f64>> {
    let positive: Vec<f64> = times.iter().copied().filter(|t| *t > 0.0).collect();
    let (t_min, t_max) = match (positive.first(), positive.last()) {
        (Some(a), Some(b)) => (*a, *b),
        _ => return Err(Error::input("rate fit needs at least one positive time")),
    };
    let lo = (1e-4 / t_max).ln();
    let hi = (1e4 / t_min).ln();
    let points = points.max(3);
    Ok((0..points)
        .map(|i| (lo + (hi - lo) * i as f64 / (points - 1) as f64).exp())
        .collect())
}

fn inverse_variance(data: &PopulationTrajectory) -> Result<[Vec<f64>; 3]> {
    let se = data
        .stderr
        .as_ref()
        .ok_or_else(|| Error::input("weighted fit needs standard errors"))?;
    let mut out: [Vec<f64>; 3] = Default::default();
    for (s, v) in se.iter().enumerate() {
        for (i, e) in v.iter().enumerate() {
            if !(e.is_finite() && *e > 0.0) {
                return Err(Error::input(format!(
                    "standard error at row {i} of series {s} must be positive, got {e}"
                )));
            }
            out[s].push(1.0 / (e * e));
        }
    }
    Ok(out)
}

fn check_data(data: &PopulationTrajectory) -> Result<()> {
    if data.len() < 2 {
        return Err(Error::input("rate fit needs at least two time points"));
    }
    for s in data.series() {
        if s.len() != data.len() || s.iter().any(|x| !x.is_finite()) {
            return Err(Error::input("population series must be finite and aligned with the time grid"));
        }
    }
    if data.times.windows(2).any(|w| w[1] < w[0]) {
        return Err(Error::input("time grid must be sorted ascending"));
    }
    Ok(())
}

fn build_objective<'a>(data: &'a PopulationTrajectory, ratio: f64, options: &FitOptions) -> Result<Objective<'a>> {
    check_data(data)?;
    if !(ratio.is_finite() && ratio > 0.0) {
        return Err(Error::input(format!("rate ratio must be positive, got {ratio}")));
    }
    Ok(Objective {
        data,
        initial: options.initial.unwrap_or_else(|| data.row(0)),
        ratio,
        gamma02_ratio: options.gamma02_ratio,
        weights: if options.weighted { Some(inverse_variance(data)?) } else { None },
        evaluations: std::cell::Cell::new(0),
    })
}

fn finish(obj: &Objective<'_>, gamma12: f64, residual: f64, degenerate: bool) -> Result<RateFit> {
    let params = obj.params(gamma12)?;
    Ok(RateFit {
        gamma12,
        gamma01: params.gamma01,
        residual,
        model: solve_rate_equations(&params, obj.initial, &obj.data.times)?,
        degenerate,
        evaluations: obj.evaluations.get(),
    })
}

fn is_constant(data: &PopulationTrajectory) -> bool {
    data.series().iter().all(|s| s.iter().all(|x| *x == s[0]))
}

/// Least-squares `gamma12` with `gamma01 = ratio * gamma12`, fitted jointly
/// to all three series: a logarithmic scan followed by golden-section
/// refinement around the best scan point.
pub fn fit_rate(data: &PopulationTrajectory, ratio: f64, options: &FitOptions) -> Result<RateFit> {
    let obj = build_objective(data, ratio, options)?;
    let degenerate = is_constant(data);
    let f0 = obj.eval(0.0)?;
    let grid = scan_grid(&data.times, options.scan_points)?;
    let values = grid.iter().map(|&g| obj.eval(g)).collect::<Result<Vec<_>>>()?;
    let (best, f_best) = values
        .iter()
        .enumerate()
        .fold((0, f64::INFINITY), |acc, (i, &v)| if v < acc.1 { (i, v) } else { acc });
    if f0 <= f_best {
        return finish(&obj, 0.0, f0, degenerate);
    }
    if best + 1 == grid.len() {
        return Err(Error::NoConvergence(format!(
            "objective still decreasing at the scan limit gamma12 = {}",
            grid[best]
        )));
    }
    let lo = if best == 0 { 0.0 } else { grid[best - 1] };
    let hi = grid[best + 1];
    let (g, r) = golden_section(&obj, lo, hi, options.tolerance)?;
    finish(&obj, g, r, degenerate)
}

/// Same objective as [`fit_rate`], minimised by repeatedly zooming a uniform
/// grid instead of golden-section refinement.
pub fn fit_rate_by_scan(data: &PopulationTrajectory, ratio: f64, options: &FitOptions) -> Result<RateFit> {
    let obj = build_objective(data, ratio, options)?;
    let grid = scan_grid(&data.times, options.scan_points)?;
    let values = grid.iter().map(|&g| obj.eval(g)).collect::<Result<Vec<_>>>()?;
    let best = values
        .iter()
        .enumerate()
        .fold((0, f64::INFINITY), |acc, (i, &v)| if v < acc.1 { (i, v) } else { acc })
        .0;
    let mut lo = if best == 0 { 0.0 } else { grid[best - 1] };
    let mut hi = grid[(best + 1).min(grid.len() - 1)];
    for _ in 0..200 {
        if hi - lo <= options.tolerance * hi {
            break;
        }
        let pts: Vec<f64> = (0..=20).map(|i| lo + (hi - lo) * i as f64 / 20.0).collect();
        let vals = pts.iter().map(|&g| obj.eval(g)).collect::<Result<Vec<_>>>()?;
        let k = vals
            .iter()
            .enumerate()
            .fold((0, f64::INFINITY), |acc, (i, &v)| if v < acc.1 { (i, v) } else { acc })
            .0;
        lo = pts[k.saturating_sub(1)];
        hi = pts[(k + 1).min(20)];
    }
    let g = 0.5 * (lo + hi);
    let r = obj.eval(g)?;
    finish(&obj, g, r, is_constant(data))
}

/// Optional rescaling applied on ingestion.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Normalization {
    #[default]
    None,
    /// Divide every row by the population total of the first row.
    InitialTotal,
}

fn column_index(headers: &csv::StringRecord, name: &str) -> Option<usize> {
    headers.iter().position(|h| h.trim() == name)
}

fn parse_field(record: &csv::StringRecord, idx: usize, name: &str, line: u64) -> Result<f64> {
    let raw = record.get(idx).unwrap_or("").trim();
    raw.parse::<f64>().map_err(|_| Error::Parse {
        line,
        column: name.to_string(),
        message: format!("cannot parse {raw:?} as a number"),
    })
}

fn csv_error(e: csv::Error) -> Error {
    let line = e.position().map_or(0, |p| p.line());
    Error::Parse {
        line,
        column: String::new(),
        message: e.to_string(),
    }
}

/// Reads a trajectory with columns `time_s, p00, p1m1, p2m2` and optional
/// `se00, se1m1, se2m2`.
pub fn read_trajectory_csv<R: Read>(reader: R, normalization: Normalization) -> Result<PopulationTrajectory> {
    let mut rdr = csv::ReaderBuilder::new().has_headers(true).trim(csv::Trim::All).from_reader(reader);
    let headers = rdr.headers().map_err(csv_error)?.clone();
    let required = ["time_s", "p00", "p1m1", "p2m2"];
    let mut idx = [0usize; 4];
    for (slot, name) in idx.iter_mut().zip(required) {
        *slot = column_index(&headers, name).ok_or_else(|| Error::Parse {
            line: 1,
            column: name.to_string(),
            message: "missing required column".into(),
        })?;
    }
    let se_names = ["se00", "se1m1", "se2m2"];
    let se_idx: Vec<Option<usize>> = se_names.iter().map(|n| column_index(&headers, n)).collect();
    let has_se = match se_idx.iter().filter(|x| x.is_some()).count() {
        0 => false,
        3 => true,
        _ => {
            return Err(Error::Parse {
                line: 1,
                column: "se00/se1m1/se2m2".into(),
                message: "standard-error columns must be given together".into(),
            })
        }
    };
    let mut times = Vec::new();
    let mut rows = Vec::new();
    let mut se: [Vec<f64>; 3] = Default::default();
    for record in rdr.records() {
        let record = record.map_err(csv_error)?;
        let line = record.position().map_or(0, |p| p.line());
        let t = parse_field(&record, idx[0], "time_s", line)?;
        let row = [
            parse_field(&record, idx[1], "p00", line)?,
            parse_field(&record, idx[2], "p1m1", line)?,
            parse_field(&record, idx[3], "p2m2", line)?,
        ];
        if has_se {
            for (s, (i, name)) in se_idx.iter().zip(se_names).enumerate() {
                se[s].push(parse_field(&record, i.unwrap_or_default(), name, line)?);
            }
        }
        times.push(t);
        rows.push(row);
    }
    if rows.is_empty() {
        return Err(Error::Parse {
            line: 1,
            column: String::new(),
            message: "no data rows".into(),
        });
    }
    if normalization == Normalization::InitialTotal {
        let total: f64 = rows[0].iter().sum();
        if total <= 0.0 {
            return Err(Error::input("cannot normalise: first row sums to zero"));
        }
        for r in rows.iter_mut() {
            r.iter_mut().for_each(|x| *x /= total);
        }
        for s in se.iter_mut() {
            s.iter_mut().for_each(|x| *x /= total);
        }
    }
    let mut traj = PopulationTrajectory::from_rows(times, &rows);
    traj.stderr = has_se.then_some(se);
    Ok(traj)
}

/// Writes `time_s, p00, p1m1, p2m2` (plus standard errors when present).
pub fn write_trajectory_csv<W: Write>(writer: W, traj: &PopulationTrajectory) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    let mut header = vec!["time_s", "p00", "p1m1", "p2m2"];
    if traj.stderr.is_some() {
        header.extend(["se00", "se1m1", "se2m2"]);
    }
    w.write_record(&header).map_err(csv_error)?;
    for i in 0..traj.len() {
        let mut rec = vec![traj.times[i].to_string()];
        rec.extend(traj.row(i).iter().map(|x| x.to_string()));
        if let Some(se) = &traj.stderr {
            rec.extend(se.iter().map(|s| s[i].to_string()));
        }
        w.write_record(&rec).map_err(csv_error)?;
    }
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::units::UnitSystem;

    #[test]
    fn rubidium_ratios() {
        let t = crate::spin_channels::coupling_table(&ScatteringLengths::rb85(), &UnitSystem::ScatteringLength).unwrap();
        let r = rate_ratios(&t);
        assert!((r.r01_12.unwrap() - 2.34).abs() < 0.01);
        assert!((r.r02_01.unwrap() - 0.04).abs() < 0.01);
        assert!((r.r02_12.unwrap() - 0.09).abs() < 0.01);
    }

    #[test]
    fn balanced_table_has_unit_ratio() {
        let mut t = CouplingTable::zero();
        t.g1m1_2m2 = 1.0;
        t.g00_1m1 = 2f64.sqrt();
        assert!((rate_ratios(&t).r01_12.unwrap() - 1.0).abs() < 1e-15);
        assert!(rate_ratios(&CouplingTable::zero()).is_degenerate());
    }

    #[test]
    fn stationary_and_two_state_limits() {
        let p = RateParams::new(2.34, 1.0).unwrap();
        let third = 1.0 / 3.0;
        let tr = solve_rate_equations(&p, [third; 3], &[0.0, 1.0, 10.0]).unwrap();
        for i in 0..3 {
            for x in tr.row(i) {
                assert!((x - third).abs() < 1e-14);
            }
        }
        let p = RateParams::new(1.5, 0.0).unwrap();
        let t = 0.4;
        let tr = solve_rate_equations(&p, [1.0, 0.0, 0.0], &[t]).unwrap();
        let expected = 0.5 * (1.0 + (-2.0 * 1.5 * t).exp());
        assert!((tr.p00[0] - expected).abs() < 1e-14);
        assert!(tr.p2m2[0].abs() < 1e-15);
        assert!(RateParams::new(-1.0, 1.0).is_err());
    }

    #[test]
    fn constant_data_fits_zero_rate() {
        let data = PopulationTrajectory::from_rows(vec![0.0, 1.0, 2.0], &[[1.0, 0.0, 0.0]; 3]);
        let fit = fit_rate(&data, DEFAULT_RATIO, &FitOptions::default()).unwrap();
        assert_eq!(fit.gamma12, 0.0);
        assert!(fit.degenerate);
    }

    #[test]
    fn csv_round_trip_and_errors() {
        let data = "time_s,p00,p1m1,p2m2\n0,1,0,0\n0.5,0.6,0.3,0.1\n";
        let t = read_trajectory_csv(data.as_bytes(), Normalization::None).unwrap();
        assert_eq!(t.len(), 2);
        let mut buf = Vec::new();
        write_trajectory_csv(&mut buf, &t).unwrap();
        let back = read_trajectory_csv(buf.as_slice(), Normalization::None).unwrap();
        assert_eq!(back, t);
        let bad = "time_s,p00,p1m1,p2m2\n0,1,0,0\n0.5,x,0.3,0.1\n";
        let err = read_trajectory_csv(bad.as_bytes(), Normalization::None).unwrap_err();
        match err {
            Error::Parse { line, column, .. } => {
                assert_eq!(line, 3);
                assert_eq!(column, "p00");
            }
            other => panic!("unexpected {other:?}"),
        }
        let missing = "time_s,p00,p2m2\n0,1,0\n";
        assert!(read_trajectory_csv(missing.as_bytes(), Normalization::None).is_err());
    }

    #[test]
    fn normalisation_scales_by_first_total() {
        let data = "time_s,p00,p1m1,p2m2\n0,0.64,0,0\n1,0.32,0.32,0\n";
        let t = read_trajectory_csv(data.as_bytes(), Normalization::InitialTotal).unwrap();
        assert_eq!(t.row(0), [1.0, 0.0, 0.0]);
        assert_eq!(t.row(1), [0.5, 0.5, 0.0]);
    }
}
