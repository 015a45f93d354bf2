//! Dense symmetric eigenvalues and spectral quantile functions.
//!
//! A [`StepFunction`] is a nondecreasing step function on `[0, 1]` whose
//! breakpoints are exact rationals sharing one denominator, so L1 distances
//! merge breakpoints without rounding.

use std::fmt::Write as _;

use nalgebra::DMatrix;
use num_integer::Integer;
use num_rational::Ratio;

use crate::complex::Complex;
use crate::error::{Error, Result};

pub const DEFAULT_TOL: f64 = 1e-10;

/// Eigenvalues of a symmetric matrix in ascending order.
pub fn eigenvalues_sym(m: &DMatrix<f64>, tol: f64) -> Result<Vec<f64>> {
    if m.nrows() != m.ncols() {
        return Err(Error::InvalidArgument("matrix is not square".into()));
    }
    crate::check_budget(m.nrows())?;
    let scale = m.iter().fold(1.0f64, |a, x| a.max(x.abs()));
    let mut asym = 0.0f64;
    for i in 0..m.nrows() {
        for j in 0..i {
            asym = asym.max((m[(i, j)] - m[(j, i)]).abs());
        }
    }
    if asym > tol * scale {
        return Err(Error::NotSymmetric(asym));
    }
    if m.nrows() == 0 {
        return Ok(Vec::new());
    }
    let mut v: Vec<f64> = m.clone().symmetric_eigenvalues().iter().copied().collect();
    v.sort_by(f64::total_cmp);
    Ok(v)
}

pub fn eigenvalues_int(m: &DMatrix<i64>) -> Result<Vec<f64>> {
    eigenvalues_sym(&m.map(|x| x as f64), DEFAULT_TOL)
}

/// Same as [`StepFunction::from_eigenvalues`].
pub fn quantile_function(spectrum: &[f64]) -> Result<StepFunction> {
    StepFunction::from_eigenvalues(spectrum)
}

/// Quantile function of the top-dimensional down Laplacian spectrum.
pub fn top_quantile(k: &Complex) -> Result<StepFunction> {
    quantile_function(&eigenvalues_int(&k.down_laplacian(k.dim())?)?)
}

/// Largest `|M v - lambda v|` over all eigenpairs, relative to the largest entry of `M`.
pub fn max_residual(m: &DMatrix<f64>) -> f64 {
    let eig = m.clone().symmetric_eigen();
    let scale = m.iter().fold(1.0f64, |a, x| a.max(x.abs()));
    let mut worst = 0.0f64;
    for (k, &lam) in eig.eigenvalues.iter().enumerate() {
        let v = eig.eigenvectors.column(k);
        let r = m * v - v * lam;
        worst = worst.max(r.norm() / scale);
    }
    worst
}

#[derive(Clone, Debug, PartialEq)]
pub struct StepFunction {
    den: u128,
    cuts: Vec<u128>,
    values: Vec<f64>,
}

impl StepFunction {
    /// Steps given as `(length numerator, value)` over the common
    /// denominator `den`. Lengths must sum to `den`. Zero-length steps are
    /// dropped and equal neighbours merged.
    pub fn from_steps(den: u128, steps: &[(u128, f64)]) -> Result<Self> {
        if den == 0 {
            return Err(Error::InvalidArgument("zero denominator".into()));
        }
        let mut cuts = vec![0u128];
        let mut values: Vec<f64> = Vec::new();
        for &(len, v) in steps {
            if !v.is_finite() {
                return Err(Error::InvalidArgument("non-finite step value".into()));
            }
            if len == 0 {
                continue;
            }
            let end = cuts.last().unwrap().checked_add(len).ok_or(Error::Overflow)?;
            if values.last() == Some(&v) {
                *cuts.last_mut().unwrap() = end;
            } else {
                values.push(v);
                cuts.push(end);
            }
        }
        if *cuts.last().unwrap() != den || values.is_empty() {
            return Err(Error::InvalidArgument("step lengths do not cover [0, 1]".into()));
        }
        Ok(StepFunction { den, cuts, values })
    }

    /// Spectral quantile function: the j-th smallest of N values on
    /// `[(j-1)/N, j/N)`.
    pub fn from_eigenvalues(vals: &[f64]) -> Result<Self> {
        let mut v = vals.to_vec();
        v.sort_by(f64::total_cmp);
        let steps: Vec<(u128, f64)> = v.into_iter().map(|x| (1, x)).collect();
        StepFunction::from_steps(steps.len() as u128, &steps)
    }

    pub fn denominator(&self) -> u128 {
        self.den
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Steps as `(left, right, value)` with exact endpoints.
    pub fn steps(&self) -> impl Iterator<Item = (Ratio<u128>, Ratio<u128>, f64)> + '_ {
        (0..self.values.len()).map(move |k| {
            (
                Ratio::new(self.cuts[k], self.den),
                Ratio::new(self.cuts[k + 1], self.den),
                self.values[k],
            )
        })
    }

    pub fn lengths(&self) -> impl Iterator<Item = Ratio<u128>> + '_ {
        self.cuts.windows(2).map(move |w| Ratio::new(w[1] - w[0], self.den))
    }

    pub fn eval(&self, x: f64) -> f64 {
        let t = x * self.den as f64;
        let k = self.cuts[1..].partition_point(|&c| (c as f64) <= t);
        self.values[k.min(self.values.len() - 1)]
    }

    pub fn is_nondecreasing(&self) -> bool {
        self.values.windows(2).all(|w| w[0] <= w[1])
    }

    /// `x -> c - f(1 - x)`.
    pub fn reflect(&self, c: f64) -> StepFunction {
        let steps: Vec<(u128, f64)> = (0..self.values.len())
            .rev()
            .map(|k| (self.cuts[k + 1] - self.cuts[k], c - self.values[k]))
            .collect();
        StepFunction::from_steps(self.den, &steps).expect("reflection preserves coverage")
    }

    pub fn integral(&self) -> f64 {
        let mut s = 0.0;
        for k in 0..self.values.len() {
            s += self.values[k] * (self.cuts[k + 1] - self.cuts[k]) as f64;
        }
        s / self.den as f64
    }

    /// `x_left,x_right,value` rows.
    pub fn to_csv(&self) -> String {
        let mut s = String::from("x_left,x_right,value\n");
        for (l, r, v) in self.steps() {
            let _ = writeln!(s, "{},{},{}", fmt_f(ratio_f64(l)), fmt_f(ratio_f64(r)), fmt_f(v));
        }
        s
    }

    fn rescaled(&self, den: u128) -> Result<Vec<u128>> {
        let f = den / self.den;
        self.cuts.iter().map(|&c| c.checked_mul(f).ok_or(Error::Overflow)).collect()
    }
}

pub fn ratio_f64(r: Ratio<u128>) -> f64 {
    *r.numer() as f64 / *r.denom() as f64
}

/// Fixed-precision formatting without negative zero.
pub fn fmt_f(x: f64) -> String {
    let s = format!("{x:.12}");
    if s.trim_start_matches('-').chars().all(|c| c == '0' || c == '.') {
        s.trim_start_matches('-').to_string()
    } else {
        s
    }
}

/// Exact-breakpoint L1 distance on `[0, 1]`.
pub fn l1_distance(f: &StepFunction, g: &StepFunction) -> Result<f64> {
    let den = f.den.lcm(&g.den);
    let a = f.rescaled(den)?;
    let b = g.rescaled(den)?;
    let (mut i, mut j) = (0usize, 0usize);
    let mut pos = 0u128;
    let mut acc = 0.0f64;
    while pos < den {
        let next = a[i + 1].min(b[j + 1]);
        acc += (f.values[i] - g.values[j]).abs() * (next - pos) as f64;
        pos = next;
        if a[i + 1] == pos && i + 1 < f.values.len() {
            i += 1;
        }
        if b[j + 1] == pos && j + 1 < g.values.len() {
            j += 1;
        }
    }
    Ok(acc / den as f64)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct WielandtReport {
    pub lhs: f64,
    pub rhs: f64,
    pub holds: bool,
}

/// Compare the quantile-function distance of `L + E` and `L` with the
/// normalized entrywise 1-norm of `E`.
pub fn wielandt_check(l: &DMatrix<f64>, e: &DMatrix<f64>) -> Result<WielandtReport> {
    if l.shape() != e.shape() {
        return Err(Error::InvalidArgument("shape mismatch".into()));
    }
    let n = l.nrows();
    let a = StepFunction::from_eigenvalues(&eigenvalues_sym(&(l + e), DEFAULT_TOL)?)?;
    let b = StepFunction::from_eigenvalues(&eigenvalues_sym(l, DEFAULT_TOL)?)?;
    let lhs = l1_distance(&a, &b)?;
    let rhs = e.iter().map(|x| x.abs()).sum::<f64>() / n as f64;
    Ok(WielandtReport { lhs, rhs, holds: lhs <= rhs + 1e-9 })
}
