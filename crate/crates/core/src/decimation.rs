//! Spectral decimation for the Schreier graph model of iterated cone
//! subdivisions: the renormalization map, the polynomials it is
//! semi-conjugate to, eigenvalue multiplicities and the limiting spectral
//! quantile functions.
//!
//! The two-parameter family is `Xi_n(mu, lambda) = lambda sum_k rho(a^k) + rho(b) - mu I`.

use nalgebra::DMatrix;
use num_integer::binomial;
use num_rational::Ratio;

use crate::error::{Error, Result};
use crate::schreier::{alpha as letter_alpha, xi_matrix};
use crate::spectral::StepFunction;

const SINGULAR_EPS: f64 = 1e-12;

fn check_d(d: usize) -> Result<()> {
    if d < 2 {
        return Err(Error::Unsupported(format!("d = {d}; use the sine law for d = 1")));
    }
    Ok(())
}

pub fn alpha_poly(d: usize, mu: f64, l: f64) -> f64 {
    let d = d as f64;
    (mu + l) * (l * (d - 1.0) - mu) + 1.0 - l
}

/// `mu - (d-1) lambda - 1`.
pub fn l_factor(d: usize, mu: f64, l: f64) -> f64 {
    mu - (d as f64 - 1.0) * l - 1.0
}

/// `mu^2 - (d-1) lambda^2 - (d-2) lambda mu - 1`.
pub fn phi(d: usize, mu: f64, l: f64) -> f64 {
    let d = d as f64;
    mu * mu - (d - 1.0) * l * l - (d - 2.0) * l * mu - 1.0
}

/// Renormalization map `(mu, lambda) -> (mu', lambda')` in factored form.
pub fn renormalize(d: usize, mu: f64, l: f64) -> Result<(f64, f64)> {
    let df = d as f64;
    let den = ((df - 1.0) * l - mu + 1.0) * ((df - 1.0) * l * l + (df - 2.0) * l * mu - l - mu * mu + 1.0);
    if den.abs() < SINGULAR_EPS {
        return Err(Error::Singular(format!("d={d}, mu={mu}, lambda={l}")));
    }
    let num_mu = df * l * l * ((df - 1.0) * l * l + (df - 2.0) * l * mu - mu * mu + mu);
    let num_l = l * l * (l + mu - 1.0);
    Ok((mu + num_mu / den, num_l / den))
}

/// The same map in the form produced by the Schur complement.
pub fn renormalize_unfactored(d: usize, mu: f64, l: f64) -> Result<(f64, f64)> {
    let df = d as f64;
    let a = alpha_poly(d, mu, l);
    let den = a * (a + (df + 1.0) * l);
    if den.abs() < SINGULAR_EPS {
        return Err(Error::Singular(format!("d={d}, mu={mu}, lambda={l}")));
    }
    let c = l * l / den;
    let mu2 = mu + c * ((a + df * l) * df * (mu + l) - df * l);
    let l2 = -c * (a + l - df * l * (mu + l));
    Ok((mu2, l2))
}

/// `(mu^2 - 1 - (d-1) lambda mu - d lambda^2) / lambda`.
pub fn psi(d: usize, mu: f64, l: f64) -> Result<f64> {
    if l.abs() < SINGULAR_EPS {
        return Err(Error::Singular("lambda = 0".into()));
    }
    let df = d as f64;
    Ok((mu * mu - 1.0 - (df - 1.0) * l * mu - df * l * l) / l)
}

/// `z^2 - (d-1) z - (d+1)`.
pub fn f_poly(d: usize, z: f64) -> f64 {
    let df = d as f64;
    z * z - (df - 1.0) * z - (df + 1.0)
}

/// `z (d+3-z)`, the conjugate of [`f_poly`] under `z -> d+1-z`.
pub fn f_laplacian(d: usize, z: f64) -> f64 {
    z * (d as f64 + 3.0 - z)
}

/// `|psi(F(p)) - f(psi(p))|`.
pub fn semiconjugacy_residual(d: usize, mu: f64, l: f64) -> Result<f64> {
    let (m2, l2) = renormalize(d, mu, l)?;
    Ok((psi(d, m2, l2)? - f_poly(d, psi(d, mu, l)?)).abs())
}

pub fn det_x0(d: usize, mu: f64, l: f64) -> f64 {
    let e = binomial(d + 1, 2) as i32 - (d as i32 + 1);
    let s = mu + l;
    l_factor(d, mu, l)
        * (mu + l + 1.0)
        * (phi(d, mu, l) + l).powi(d as i32)
        * (s * s - 1.0).powi(e)
}

fn cycle_matrix(d: usize) -> DMatrix<f64> {
    let mut p = DMatrix::<f64>::zeros(d + 1, d + 1);
    for x in 1..=d as u8 + 1 {
        p[(letter_alpha(d, x) as usize - 1, x as usize - 1)] = 1.0;
    }
    p
}

/// The `d(d+1)`-order upper left block of `Xi_2(mu, lambda)`.
pub fn x0_matrix(d: usize, mu: f64, l: f64) -> DMatrix<f64> {
    let m = d + 1;
    let a = cycle_matrix(d);
    let mut x = DMatrix::<f64>::zeros(d * m, d * m);
    let mut pw = DMatrix::<f64>::identity(m, m);
    for j in 1..=d {
        pw = &a * &pw;
        for c in 1..=d {
            let mut block = DMatrix::<f64>::identity(m, m) * l;
            if c == d + 1 - j {
                block += &pw;
            }
            if c == j {
                block -= DMatrix::<f64>::identity(m, m) * (mu + l);
            }
            x.view_mut(((j - 1) * m, (c - 1) * m), (m, m)).copy_from(&block);
        }
    }
    x
}

pub fn det_x0_explicit(d: usize, mu: f64, l: f64) -> f64 {
    x0_matrix(d, mu, l).determinant()
}

/// Returns `(det(mu I + lambda sum_{i=1..d} a^i), (mu + d lambda)(mu - lambda)^d)`.
pub fn det_circulant(d: usize, mu: f64, l: f64) -> (f64, f64) {
    let a = cycle_matrix(d);
    let mut sum = DMatrix::<f64>::zeros(d + 1, d + 1);
    let mut pw = DMatrix::<f64>::identity(d + 1, d + 1);
    for _ in 0..d {
        pw = &a * &pw;
        sum += &pw;
    }
    let lhs = (DMatrix::<f64>::identity(d + 1, d + 1) * mu + sum * l).determinant();
    (lhs, (mu + d as f64 * l) * (mu - l).powi(d as i32))
}

#[derive(Clone, Copy, Debug)]
pub struct RecursionReport {
    pub lhs: f64,
    pub rhs: f64,
    pub rel_err: f64,
}

/// Compares `det(Xi_n - mu)` with `det X0^((d+1)^(n-2)) det Xi_{n-1}(mu', lambda')`.
pub fn recursion_check(d: usize, n: usize, mu: f64) -> Result<RecursionReport> {
    check_d(d)?;
    if n < 2 {
        return Err(Error::InvalidArgument("recursion needs n >= 2".into()));
    }
    let lhs = xi_matrix(d, n, mu, 1.0)?.determinant();
    let (m2, l2) = renormalize(d, mu, 1.0)?;
    let power = (d + 1).pow(n as u32 - 2) as i32;
    let rhs = det_x0(d, mu, 1.0).powi(power) * xi_matrix(d, n - 1, m2, l2)?.determinant();
    let rel_err = (lhs - rhs).abs() / lhs.abs().max(1.0);
    Ok(RecursionReport { lhs, rhs, rel_err })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Multiplicities {
    pub d: usize,
    pub n: usize,
    /// `alpha[k-1]` is the exponent of `A_k` paired with level k, `k = 1..=n`.
    pub alpha: Vec<u128>,
    /// `beta[k-1]`, with `beta[0] = 0`.
    pub beta: Vec<u128>,
    /// `sigma[k-1]`, zero for `k <= 2`.
    pub sigma: Vec<u128>,
    pub c_d: i64,
}

fn pow(d: usize, e: usize) -> Result<u128> {
    (d as u128 + 1).checked_pow(e as u32).ok_or(Error::Overflow)
}

/// Closed forms for the multiplicity exponents up to level `n`.
pub fn multiplicities(d: usize, n: usize) -> Result<Multiplicities> {
    check_d(d)?;
    if n == 0 {
        return Err(Error::InvalidArgument("n must be at least 1".into()));
    }
    let mut alpha = vec![d as u128];
    let mut beta = vec![0u128];
    let mut sigma = vec![0u128];
    for k in 2..=n {
        let b = (d as u128 - 1) * (pow(d, k - 1)? - 1) / 2;
        beta.push(b);
        alpha.push(b + d as u128);
        sigma.push(pow(d, k - 2)? - 1);
    }
    let c_d = binomial(d + 1, 2) as i64 - (d as i64 + 1);
    Ok(Multiplicities { d, n, alpha, beta, sigma, c_d })
}

/// The same exponents from their recursions, with sigma summed directly
/// over the preimage tree.
pub fn multiplicities_by_recursion(d: usize, n: usize) -> Result<Multiplicities> {
    check_d(d)?;
    let c_d = binomial(d + 1, 2) as i64 - (d as i64 + 1);
    let c = c_d as u128;
    let mut alpha = vec![d as u128];
    let mut beta = vec![0u128];
    let mut sigma = vec![0u128];
    for k in 2..=n {
        let mut s = 0u128;
        for j in 1..=k.saturating_sub(2) {
            s += (1u128 << (j - 1)) * alpha[k - 1 - j - 1];
        }
        for j in 1..=k.saturating_sub(3) {
            s += (1u128 << (j - 1)) * beta[k - 1 - j - 1];
        }
        sigma.push(s);
        let p = pow(d, k - 2)?;
        alpha.push(c * p + s + alpha[k - 2] + 1);
        beta.push((c + 1) * p + beta[k - 2]);
    }
    Ok(Multiplicities { d, n, alpha, beta, sigma, c_d })
}

/// `(1 + sum 2^(k-1) alpha_{n+1-k} + sum 2^(k-2) beta_{n+2-k}, (d+1)^n)`.
pub fn degree_identity(m: &Multiplicities) -> Result<(u128, u128)> {
    let n = m.n;
    let mut total = 1u128;
    for k in 1..=n {
        total += (1u128 << (k - 1)) * m.alpha[n - k];
    }
    for k in 2..=n {
        total += (1u128 << (k - 2)) * m.beta[n + 1 - k];
    }
    Ok((total, pow(m.d, n)?))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Family {
    /// Preimages of 0 under `f_poly`.
    A,
    /// Preimages of -2 under `f_poly`.
    B,
    /// Preimages of d+1 under `f_laplacian`.
    P,
    /// Preimages of d+3 under `f_laplacian`.
    Q,
}

#[derive(Clone, Debug)]
pub struct PreimageTree {
    pub family: Family,
    pub d: usize,
    /// `levels[i]` holds the `2^i` values of depth `i`, ascending.
    pub levels: Vec<Vec<f64>>,
}

fn preimages(family: Family, d: usize, theta: f64) -> Result<[f64; 2]> {
    let df = d as f64;
    match family {
        Family::A | Family::B => {
            let disc = (df - 1.0).powi(2) + 4.0 * (df + 1.0 + theta);
            if disc < 0.0 {
                return Err(Error::Invariant(format!("complex preimage of {theta}")));
            }
            let r1 = ((df - 1.0) + disc.sqrt()) / 2.0;
            Ok([-(df + 1.0 + theta) / r1, r1])
        }
        Family::P | Family::Q => {
            let disc = (df + 3.0).powi(2) - 4.0 * theta;
            if disc < 0.0 {
                return Err(Error::Invariant(format!("complex preimage of {theta}")));
            }
            let r1 = ((df + 3.0) + disc.sqrt()) / 2.0;
            Ok([theta / r1, r1])
        }
    }
}

pub fn preimage_tree(family: Family, d: usize, depth: usize) -> Result<PreimageTree> {
    check_d(d)?;
    let root = match family {
        Family::A => 0.0,
        Family::B => -2.0,
        Family::P => d as f64 + 1.0,
        Family::Q => d as f64 + 3.0,
    };
    let mut levels = vec![vec![root]];
    for _ in 0..depth {
        let mut next = Vec::with_capacity(2 * levels.last().unwrap().len());
        for &t in levels.last().unwrap() {
            next.extend(preimages(family, d, t)?);
        }
        next.sort_by(f64::total_cmp);
        levels.push(next);
    }
    Ok(PreimageTree { family, d, levels })
}

/// Distinct adjacency eigenvalues of the level-n Schreier graph with their
/// multiplicities, ascending.
pub fn predicted_spectrum_adjacency(d: usize, n: usize) -> Result<Vec<(f64, u128)>> {
    let m = multiplicities(d, n)?;
    let a = preimage_tree(Family::A, d, n - 1)?;
    let b = preimage_tree(Family::B, d, n.saturating_sub(2))?;
    let mut out = vec![(d as f64 + 1.0, 1u128)];
    for i in 0..n {
        out.extend(a.levels[i].iter().map(|&v| (v, m.alpha[n - i - 1])));
    }
    for i in 0..n.saturating_sub(1) {
        out.extend(b.levels[i].iter().map(|&v| (v, m.beta[n - i - 1])));
    }
    out.sort_by(|x, y| x.0.total_cmp(&y.0));
    let total: u128 = out.iter().map(|p| p.1).sum();
    if total != pow(d, n)? {
        return Err(Error::Invariant(format!("multiplicities sum to {total}")));
    }
    Ok(out)
}

#[derive(Clone, Debug)]
pub struct LimitStep {
    pub value: f64,
    pub depth: usize,
    pub family: Family,
    pub length: Ratio<u128>,
}

#[derive(Clone, Debug)]
pub struct LimitQuantile {
    /// Steps of depth at most the truncation depth with their exact lengths, ascending.
    pub steps: Vec<LimitStep>,
    /// Mass of the omitted steps, `(2/(d+1))^(depth+1)`.
    pub tail: Ratio<u128>,
    /// The steps rescaled to cover `[0, 1]`.
    pub normalized: StepFunction,
}

impl LimitQuantile {
    pub fn tail_mass(&self) -> f64 {
        crate::spectral::ratio_f64(self.tail)
    }

    pub fn covered_mass(&self) -> Ratio<u128> {
        self.steps.iter().map(|s| s.length).fold(Ratio::new(0, 1), |a, b| a + b)
    }
}

fn limit_from(d: usize, depth: usize, lo: Family, hi: Family) -> Result<LimitQuantile> {
    check_d(d)?;
    let m = depth + 1;
    let big = pow(d, m)?;
    let two = 1u128.checked_shl(m as u32).filter(|_| m < 127).ok_or(Error::Overflow)?;
    let den = (big - two).checked_mul(2).ok_or(Error::Overflow)?;
    let mut steps = Vec::new();
    for fam in [lo, hi] {
        let tree = preimage_tree(fam, d, depth)?;
        for (i, level) in tree.levels.iter().enumerate() {
            let length = Ratio::new(d as u128 - 1, 2 * pow(d, i + 1)?);
            steps.extend(level.iter().map(|&value| LimitStep { value, depth: i, family: fam, length }));
        }
    }
    steps.sort_by(|a, b| a.value.total_cmp(&b.value));
    let scaled: Vec<(u128, f64)> = steps
        .iter()
        .map(|s| Ok(((d as u128 - 1) * pow(d, m - s.depth - 1)?, s.value)))
        .collect::<Result<_>>()?;
    let normalized = StepFunction::from_steps(den, &scaled)?;
    let tail = Ratio::new(two, big);
    Ok(LimitQuantile { steps, tail, normalized })
}

/// Truncated limit of the top Laplacian quantile functions of `cd^n` of the
/// d-simplex.
pub fn limit_quantile_cd(d: usize, depth: usize) -> Result<LimitQuantile> {
    limit_from(d, depth, Family::P, Family::Q)
}

/// Truncated limit of the adjacency quantile functions of the Schreier graphs.
pub fn adjacency_limit(d: usize, depth: usize) -> Result<LimitQuantile> {
    limit_from(d, depth, Family::A, Family::B)
}

/// The Laplacian limit obtained by reflecting the adjacency limit.
pub fn laplacian_from_adjacency_limit(d: usize, depth: usize) -> Result<StepFunction> {
    Ok(adjacency_limit(d, depth)?.normalized.reflect(d as f64 + 1.0))
}

/// Smallest gap between distinct limit values of depth at most `depth`.
pub fn min_gap(d: usize, depth: usize) -> Result<f64> {
    let q = limit_quantile_cd(d, depth)?;
    Ok(q.steps.windows(2).map(|w| w[1].value - w[0].value).fold(f64::INFINITY, f64::min))
}

/// Limit law for paths, `4 sin^2(pi x / 2)`.
pub fn sine_law(x: f64) -> f64 {
    4.0 * (std::f64::consts::PI * x / 2.0).sin().powi(2)
}

/// The sine law averaged over `samples` equal cells.
pub fn limit_quantile_1d(samples: usize) -> Result<StepFunction> {
    if samples == 0 {
        return Err(Error::InvalidArgument("samples must be positive".into()));
    }
    let pi = std::f64::consts::PI;
    let h = 1.0 / samples as f64;
    let steps: Vec<(u128, f64)> = (0..samples)
        .map(|j| {
            let (a, b) = (j as f64 * h, (j + 1) as f64 * h);
            (1, 2.0 - 2.0 * ((pi * b).sin() - (pi * a).sin()) / (pi * h))
        })
        .collect();
    StepFunction::from_steps(samples as u128, &steps)
}
