//! Entropy–energy ratios: Dirichlet forms, log-Sobolev ratios for `∂`, `ℌ`
//! and `ℌ⁺`, numerical constant search and the two-point family
//! `μ_p = p δ_1 + (1 - p) δ_0`.
//!
//! Searches report the best ratio found, a lower bound on the optimal
//! constant. They never certify that an inequality holds.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::diffops::{d_norms, h_vector, Support, Variant};
use crate::error::{Error, Result};
use crate::scalar::Real;
use crate::space::{ExactLaw, Measure, ProductSpace};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Operator {
    /// Conditional standard deviation.
    D,
    /// Coordinate oscillation.
    H,
    /// Positive part of the oscillation.
    HPlus,
}

/// `E |∂f|^2`.
pub fn dirichlet_form<T: Real>(law: &ExactLaw<T>, f: &[T]) -> Result<T> {
    let d = d_norms(f, law)?;
    Ok(law.expectation(&d.iter().map(|&v| v * v).collect::<Vec<_>>()))
}

/// `Γ(f)^2` at every configuration (zero off the support).
pub fn energy_density<T: Real>(law: &ExactLaw<T>, f: &[T], op: Operator) -> Result<Vec<T>> {
    if f.len() != law.len() {
        return Err(Error::DimensionMismatch { expected: law.len(), found: f.len() });
    }
    match op {
        Operator::D => Ok(d_norms(f, law)?.iter().map(|&v| v * v).collect()),
        Operator::H | Operator::HPlus => {
            let variant = if op == Operator::H { Variant::Osc } else { Variant::Plus };
            let sup = Support::of_law(law);
            let space = law.space();
            (0..law.len())
                .map(|idx| {
                    if law.probs()[idx] <= T::zero() {
                        return Ok(T::zero());
                    }
                    let h = h_vector(f, &sup, &space.point_of(idx), variant)?;
                    Ok(h.iter().map(|&v| v * v).sum())
                })
                .collect()
        }
    }
}

/// `Ent(f^2) / (2 E Γ(f)^2)`; `+∞` when the energy vanishes but the entropy
/// does not.
pub fn lsi_ratio<T: Real>(law: &ExactLaw<T>, f: &[T], op: Operator) -> Result<T> {
    if f.len() != law.len() {
        return Err(Error::DimensionMismatch { expected: law.len(), found: f.len() });
    }
    let on_support: Vec<T> = law.support_indices().into_iter().map(|i| f[i]).collect();
    let lo = on_support.iter().copied().fold(T::infinity(), T::min);
    let hi = on_support.iter().copied().fold(T::neg_infinity(), T::max);
    if !(hi > lo) {
        return Err(Error::UndefinedRatio);
    }
    let sq: Vec<T> = f.iter().map(|&v| v * v).collect();
    let ent = law.entropy(&sq)?;
    let energy = law.expectation(&energy_density(law, f, op)?);
    if energy > T::zero() {
        Ok(ent / (T::of(2.0) * energy))
    } else if ent > T::zero() {
        Ok(T::infinity())
    } else {
        Ok(T::zero())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LsiReport<T> {
    pub operator: Operator,
    /// Best ratio found: a lower bound on the optimal constant.
    pub ratio: T,
    pub witness: Vec<T>,
    pub starts: usize,
    pub iterations: usize,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SearchOptions {
    pub starts: usize,
    pub seed: u64,
    /// Cap on pattern-search passes per start.
    pub max_passes: usize,
}

impl Default for SearchOptions {
    fn default() -> Self {
        Self { starts: 16, seed: 0x15e, max_passes: 400 }
    }
}

/// Multi-start pattern search over the function table.
///
/// Free variables are the values at configurations whose coordinates all lie
/// in the marginal supports. Each start runs coordinate moves of size `h`,
/// halving `h` after a pass without improvement.
pub fn lsi_constant_search<T: Real>(law: &ExactLaw<T>, op: Operator, opts: &SearchOptions) -> Result<LsiReport<T>> {
    if opts.starts == 0 {
        return Err(Error::Domain("at least one start is needed".into()));
    }
    let space = law.space();
    let free: Vec<usize> = (0..law.len())
        .filter(|&idx| {
            space
                .point_of(idx)
                .iter()
                .enumerate()
                .all(|(i, a)| law.supports()[i].contains(a))
        })
        .collect();
    if law.support_indices().len() < 2 {
        return Ok(LsiReport { operator: op, ratio: T::zero(), witness: vec![T::one(); law.len()], starts: opts.starts, iterations: 0 });
    }
    let support = law.support_indices();
    let results: Vec<(T, Vec<T>, usize)> = (0..opts.starts)
        .into_par_iter()
        .map(|s| {
            let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
            rng.set_stream(s as u64);
            let mut f = vec![T::zero(); law.len()];
            for &j in &free {
                f[j] = T::of(0.5 + rng.random::<f64>());
            }
            // the first starts are bumps at single support points
            if s < support.len() && s < opts.starts / 2 {
                for &j in &free {
                    f[j] = T::of(0.05);
                }
                f[support[s]] = T::one();
            }
            pattern_search(law, op, &free, f, opts.max_passes)
        })
        .collect::<Result<_>>()?;
    let mut best = (T::neg_infinity(), Vec::new(), 0usize);
    let mut iterations = 0;
    for (r, f, it) in results {
        iterations += it;
        if r > best.0 {
            best = (r, f, it);
        }
    }
    Ok(LsiReport { operator: op, ratio: best.0.max(T::zero()), witness: best.1, starts: opts.starts, iterations })
}

fn score<T: Real>(law: &ExactLaw<T>, f: &[T], op: Operator) -> Result<T> {
    match lsi_ratio(law, f, op) {
        Ok(r) => Ok(r),
        Err(Error::UndefinedRatio) => Ok(T::neg_infinity()),
        Err(e) => Err(e),
    }
}

fn pattern_search<T: Real>(law: &ExactLaw<T>, op: Operator, free: &[usize], mut f: Vec<T>, max_passes: usize) -> Result<(T, Vec<T>, usize)> {
    let mut best = score(law, &f, op)?;
    let mut h = T::of(0.25);
    let floor = T::of(1e-9).max(T::of(64.0) * T::epsilon());
    let mut passes = 0;
    while passes < max_passes && h > floor && best.is_finite() {
        passes += 1;
        let mut improved = false;
        for &j in free {
            for dir in [T::one(), -T::one()] {
                let old = f[j];
                f[j] = old + dir * h;
                let r = score(law, &f, op)?;
                if r > best * (T::one() + T::of(1e-12)) || (r > best && best <= T::zero()) {
                    best = r;
                    improved = true;
                    break;
                }
                f[j] = old;
            }
        }
        // keep the table on a fixed scale; the ratio is scale invariant
        let norm = free.iter().map(|&j| f[j] * f[j]).sum::<T>().sqrt();
        if norm > T::zero() {
            let c = T::of_usize(free.len()).sqrt() / norm;
            for &j in free {
                f[j] *= c;
            }
        }
        if !improved {
            h *= T::of(0.5);
        }
    }
    Ok((best, f, passes))
}

/// Largest `Ent(f^2) / (2 E|ℌf|^2)` over `trials` random functions.
pub fn verify_h_lsi_product<T: Real>(measure: &Measure<T>, trials: usize, seed: u64, cap: usize) -> Result<(T, Vec<T>)> {
    if !measure.is_product() {
        return Err(Error::NotProduct);
    }
    let law = measure.law(cap)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let fs: Vec<Vec<T>> = (0..trials).map(|t| random_function(&mut rng, law.len(), t)).collect();
    let ratios: Vec<T> = fs
        .par_iter()
        .map(|f| score(&law, f, Operator::H))
        .collect::<Result<_>>()?;
    let (k, best) = ratios
        .iter()
        .enumerate()
        .fold((0, T::neg_infinity()), |(k, b), (j, &r)| if r > b { (j, r) } else { (k, b) });
    Ok((best.max(T::zero()), fs.get(k).cloned().unwrap_or_default()))
}

/// Random test functions of a few shapes: uniform, heavy-tailed, near
/// indicators and sign-changing.
pub fn random_function<T: Real, R: Rng + ?Sized>(rng: &mut R, len: usize, trial: usize) -> Vec<T> {
    (0..len)
        .map(|_| {
            let u: f64 = rng.random();
            T::of(match trial % 4 {
                0 => u,
                1 => (8.0 * u).exp(),
                2 => {
                    if u < 0.2 {
                        1.0
                    } else {
                        1e-3 * u
                    }
                }
                _ => 2.0 * u - 1.0,
            })
        })
        .collect()
}

/// `μ_p` on `{0, 1}`.
pub fn two_point_measure<T: Real>(p: T) -> Result<Measure<T>> {
    if !(p > T::zero() && p < T::one()) {
        return Err(Error::Domain(format!("two-point mass {p} must lie in (0, 1)")));
    }
    Measure::product(ProductSpace::binary(1), vec![vec![T::one() - p, p]])
}

/// Best constant on `μ_p` by one-dimensional search over `u = f(1)/f(0) > 0`
/// (a sign change only increases the energy).
pub fn two_point_constant(p: f64, op: Operator) -> Result<f64> {
    let law = two_point_measure(p)?.law(4)?;
    let ratio = |s: f64| score(&law, &[1.0, s.exp()], op).unwrap_or(f64::NEG_INFINITY);
    // coarse grid in log u, then golden-section refinement around the best cell
    let (lo, hi, steps) = (-40.0, 40.0, 4000);
    let dx = (hi - lo) / steps as f64;
    let best = (0..=steps)
        .map(|k| lo + k as f64 * dx)
        .fold((lo, f64::NEG_INFINITY), |(bs, bv), s| {
            let v = ratio(s);
            if v > bv {
                (s, v)
            } else {
                (bs, bv)
            }
        });
    let (mut a, mut b) = (best.0 - dx, best.0 + dx);
    let g = (5f64.sqrt() - 1.0) / 2.0;
    for _ in 0..200 {
        let c = b - g * (b - a);
        let d = a + g * (b - a);
        if ratio(c) > ratio(d) {
            b = d;
        } else {
            a = c;
        }
    }
    Ok(ratio(0.5 * (a + b)).max(best.1))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Psi2Row {
    pub p: f64,
    pub sigma2: f64,
    /// `E exp((f - Ef)^2 / (16 e^2 σ_p^2))` for `f(x) = x`.
    pub psi2_expectation: f64,
    /// `max_{1 <= q <= q_max} ||f - Ef||_q / sqrt(q)`.
    pub moment_sup: f64,
    /// `σ_p^2 / (p (1 - p) log(1/p))`.
    pub trend_ratio: f64,
}

/// The sub-Gaussian blow-up along `p`, with `σ_p^2` supplied per `p`.
pub fn psi2_blowup_study(grid: &[(f64, f64)], q_max: usize) -> Result<Vec<Psi2Row>> {
    grid.iter()
        .map(|&(p, sigma2)| {
            if !(sigma2 > 0.0) || !sigma2.is_finite() {
                return Err(Error::Degenerate(format!("σ² = {sigma2} at p = {p}")));
            }
            let law = two_point_measure(p)?.law(4)?;
            let scale = 16.0 * std::f64::consts::E.powi(2) * sigma2;
            let psi2_expectation = (1.0 - p) * (p * p / scale).exp() + p * ((1.0 - p).powi(2) / scale).exp();
            let f = [0.0, 1.0];
            let moment_sup = (1..=q_max.max(1))
                .map(|q| law.lp_norm(&f, q as f64, true).map(|v| v / (q as f64).sqrt()))
                .try_fold(0.0f64, |m, v| v.map(|v| m.max(v)))?;
            Ok(Psi2Row {
                p,
                sigma2,
                psi2_expectation,
                moment_sup,
                trend_ratio: sigma2 / (p * (1.0 - p) * (1.0 / p).ln()),
            })
        })
        .collect()
}
