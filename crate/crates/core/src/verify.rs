//! Exact and sampled checks of tail bounds, moment chains and the
//! difference-operator lemmas, plus the regression corpus and suite.

use std::io::Write;

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use statrs::distribution::{Beta, ContinuousCDF};

use crate::bounds::{bound_boolean, bound_general, Regime, TailBound};
use crate::diffops::{d_norms, h_tensor, h_vector, norm_profile, tensor_op, Observable, ProfileMode, Support, Variant};
use crate::error::{Error, Result};
use crate::funcs::{fourier_transform, FunctionSpec, Summation};
use crate::lsi::{lsi_constant_search, lsi_ratio, random_function, two_point_measure, Operator, SearchOptions};
use crate::models::{build_coloring, build_ergm, build_ising, chi_square, glauber_sample, histogram, subgraph_count, ChiSquare, ErgmSpec, Graph, IsingSpec, Motif};
use crate::scalar::{euclid, Real};
use crate::space::{ExactLaw, Measure, ProductSpace, DEFAULT_CAP};
use crate::tensors::{enumerate_partitions, hs_norm, op_norm, partition_norm, DenseTensor, OpNormOptions};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Side {
    /// `P(|f - Ef| >= t)`.
    TwoSided,
    /// `P(f - Ef >= t)`.
    Upper,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "snake_case")]
pub enum TailMode {
    Exact,
    /// `level` is the one-sided confidence of the Clopper–Pearson upper limit.
    MonteCarlo { samples: usize, seed: u64, level: f64 },
}

impl TailMode {
    pub fn monte_carlo(samples: usize, seed: u64) -> Self {
        TailMode::MonteCarlo { samples, seed, level: 0.999 }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TailCurve<T> {
    pub label: String,
    pub side: Side,
    pub grid: Vec<T>,
    pub probability: Vec<T>,
    /// Equal to `probability` in exact mode.
    pub upper_limit: Vec<T>,
    pub mean: T,
    pub samples: Option<usize>,
    pub counts: Option<Vec<u64>>,
}

fn deviation<T: Real>(v: T, mean: T, side: Side) -> T {
    match side {
        Side::TwoSided => (v - mean).abs(),
        Side::Upper => v - mean,
    }
}

/// Rounding in `Ef` must not hide atoms sitting exactly at `t`.
fn exceeds<T: Real>(dev: T, t: T) -> bool {
    dev >= t - T::of(1e-12) * t.abs().max(T::one())
}

fn validate_grid<T: Real>(grid: &[T]) -> Result<()> {
    if grid.is_empty() || grid.iter().any(|t| !t.is_finite()) {
        return Err(Error::Domain("t-grid must be nonempty and finite".into()));
    }
    if grid.windows(2).any(|w| w[1] < w[0]) {
        return Err(Error::Domain("t-grid must be nondecreasing".into()));
    }
    Ok(())
}

/// One-sided upper Clopper–Pearson limit for `k` successes in `m` trials.
pub fn clopper_pearson_upper(k: u64, m: u64, level: f64) -> Result<f64> {
    if m == 0 || k > m || !(level > 0.0 && level < 1.0) {
        return Err(Error::Domain(format!("invalid binomial data k = {k}, m = {m}, level = {level}")));
    }
    if k == m {
        return Ok(1.0);
    }
    let beta = Beta::new(k as f64 + 1.0, (m - k) as f64).map_err(|e| Error::Degenerate(e.to_string()))?;
    Ok(beta.inverse_cdf(level))
}

pub fn tail_curve<T: Real, F: Observable<T> + ?Sized>(
    measure: &Measure<T>,
    f: &F,
    grid: &[T],
    mode: TailMode,
    side: Side,
    cap: usize,
) -> Result<TailCurve<T>> {
    validate_grid(grid)?;
    match mode {
        TailMode::Exact => {
            let law = measure.law(cap)?;
            let space = law.space();
            let support = law.support_indices();
            let values: Vec<(T, T)> = support.iter().map(|&i| (law.probs()[i], f.value(space, &space.point_of(i)))).collect();
            let mean: T = values.iter().map(|&(p, v)| p * v).sum();
            let probability: Vec<T> = grid
                .iter()
                .map(|&t| {
                    let mass: T = values.iter().filter(|&&(_, v)| exceeds(deviation(v, mean, side), t)).map(|&(p, _)| p).sum();
                    mass.min(T::one())
                })
                .collect();
            Ok(TailCurve {
                label: "exact".into(),
                side,
                grid: grid.to_vec(),
                upper_limit: probability.clone(),
                probability,
                mean,
                samples: None,
                counts: None,
            })
        }
        TailMode::MonteCarlo { samples, seed, level } => {
            if samples == 0 {
                return Err(Error::Degenerate("no samples".into()));
            }
            let points = crate::diffops::draw(measure, samples, seed)?;
            let space = measure.space();
            let values: Vec<T> = points.iter().map(|p| f.value(space, p)).collect();
            let mean = values.iter().copied().sum::<T>() / T::of_usize(samples);
            let counts: Vec<u64> = grid
                .iter()
                .map(|&t| values.iter().filter(|&&v| exceeds(deviation(v, mean, side), t)).count() as u64)
                .collect();
            let m = samples as u64;
            let probability = counts.iter().map(|&k| T::of(k as f64 / m as f64)).collect();
            let upper_limit = counts
                .iter()
                .map(|&k| clopper_pearson_upper(k, m, level).map(T::of))
                .collect::<Result<_>>()?;
            Ok(TailCurve {
                label: format!("mc(samples={samples},seed={seed})"),
                side,
                grid: grid.to_vec(),
                probability,
                upper_limit,
                mean,
                samples: Some(samples),
                counts: Some(counts),
            })
        }
    }
}

/// A bound evaluated on a grid.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoundCurve<T> {
    pub name: String,
    pub one_sided: bool,
    pub grid: Vec<T>,
    pub clipped: Vec<T>,
}

impl<T: Real> BoundCurve<T> {
    pub fn of(bound: &TailBound<T>, grid: &[T]) -> Self {
        Self {
            name: bound.name.clone(),
            one_sided: bound.one_sided,
            grid: grid.to_vec(),
            clipped: bound.curve(grid).into_iter().map(|e| e.clipped).collect(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DominationReport<T> {
    pub bound: String,
    pub curve: String,
    pub dominated: bool,
    /// Grid points where the upper limit exceeds the bound.
    pub violations: Vec<T>,
    /// `bound - upper limit` per grid point.
    pub margins: Vec<T>,
    /// Smallest bound value on the grid; below 1 means the check bites.
    pub min_bound: T,
}

impl<T: Real> DominationReport<T> {
    pub fn non_vacuous(&self) -> bool {
        self.min_bound < T::one()
    }
}

pub fn check_domination<T: Real>(curve: &TailCurve<T>, bound: &BoundCurve<T>) -> Result<DominationReport<T>> {
    if curve.grid != bound.grid {
        return Err(Error::GridMismatch);
    }
    if curve.side == Side::TwoSided && bound.one_sided {
        return Err(Error::Domain("a one-sided bound cannot dominate a two-sided tail".into()));
    }
    let margins: Vec<T> = bound.clipped.iter().zip(&curve.upper_limit).map(|(&b, &u)| b - u).collect();
    let violations: Vec<T> = curve.grid.iter().zip(&margins).filter(|(_, &m)| m < T::zero()).map(|(&t, _)| t).collect();
    Ok(DominationReport {
        bound: bound.name.clone(),
        curve: curve.label.clone(),
        dominated: violations.is_empty(),
        violations,
        margins,
        min_bound: bound.clipped.iter().copied().fold(T::infinity(), T::min),
    })
}

/// Largest factor by which the bound constant can shrink before the curve
/// crosses it: `min_t C log(P / tail(t)) / x(t)` over grid points with a
/// positive tail and a finite positive exponent `x(t)`.
pub fn safety_factor<T: Real>(curve: &TailCurve<T>, bound: &TailBound<T>) -> Option<T> {
    curve
        .grid
        .iter()
        .zip(&curve.upper_limit)
        .filter_map(|(&t, &tail)| {
            let (x, _) = bound.exponent(t);
            (t > T::zero() && tail > T::zero() && x > T::zero() && x.is_finite())
                .then(|| bound.constant * (bound.prefactor / tail).ln() / x)
        })
        .reduce(T::min)
}

/// `√e / (2(√e - 1))`, the constant of the independent moment chain.
pub fn kappa<T: Real>() -> T {
    let se = T::E().sqrt();
    se / (T::of(2.0) * (se - T::one()))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MomentRow<T> {
    pub p: T,
    pub lhs: T,
    pub rhs: T,
    /// `(2σ^2(p - 3/2))^{1/2} ||∂f||_p`, for the LSI regime.
    pub d_rhs: Option<T>,
    pub holds: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MomentChainReport<T> {
    pub kappa: T,
    pub gamma: Vec<T>,
    pub rows: Vec<MomentRow<T>>,
    pub violations: usize,
    /// Largest `lhs / rhs`.
    pub worst_ratio: T,
}

/// Relative slack on the right-hand side for floating point only.
const CHAIN_SLACK: f64 = 1e-9;

/// `||f - Ef||_p` against the chain `Σ_{j<d} c_p^{j/2} E|ℌ^{(j)}f|_op +
/// c_p^{d/2} max |ℌ^{(d)}f|_op` with `c_p = 8κp` (independent) or
/// `2σ^2(p - 3/2)` (∂-LSI). Iterative operator norms sit on the right, where
/// lower bounds keep the check sound.
pub fn check_moment_chain<T: Real>(
    measure: &Measure<T>,
    f: &[T],
    regime: &Regime<T>,
    p_grid: &[T],
    opts: &OpNormOptions,
    cap: usize,
) -> Result<MomentChainReport<T>> {
    let d = regime.d();
    if p_grid.iter().any(|&p| !(p >= T::of(2.0))) {
        return Err(Error::Domain("moment chain needs p >= 2".into()));
    }
    if let Regime::Dlsi { sigma2, .. } = regime {
        if !(*sigma2 > T::zero()) {
            return Err(Error::Degenerate(format!("σ² = {sigma2} must be positive")));
        }
    }
    let law = measure.law(cap)?;
    let profile = norm_profile(f, measure, d, ProfileMode::Exact, opts, cap)?;
    let dn = match regime {
        Regime::Dlsi { .. } => Some(d_norms(f, &law)?),
        Regime::Independent { .. } => None,
    };
    let k = kappa::<T>();
    let slack = T::of(CHAIN_SLACK);
    let mut rows = Vec::with_capacity(p_grid.len());
    for &p in p_grid {
        let lhs = law.lp_norm(f, p, true)?;
        let c = match regime {
            Regime::Independent { .. } => T::of(8.0) * k * p,
            Regime::Dlsi { sigma2, .. } => T::of(2.0) * *sigma2 * (p - T::of(1.5)),
        };
        let rhs: T = (1..=d).map(|j| c.powf(T::of_usize(j) / T::of(2.0)) * profile.gamma(j)).sum();
        let d_rhs = match &dn {
            Some(dn) => Some(c.sqrt() * law.lp_norm(dn, p, false)?),
            None => None,
        };
        let ok = |r: T| lhs <= r * (T::one() + slack) + T::of(1e-12);
        let holds = ok(rhs) && d_rhs.map_or(true, ok);
        rows.push(MomentRow { p, lhs, rhs, d_rhs, holds });
    }
    let violations = rows.iter().filter(|r| !r.holds).count();
    let worst_ratio = rows
        .iter()
        .map(|r| if r.rhs > T::zero() { r.lhs / r.rhs } else if r.lhs > T::zero() { T::infinity() } else { T::zero() })
        .fold(T::zero(), T::max);
    Ok(MomentChainReport { kappa: k, gamma: profile.gamma, rows, violations, worst_ratio })
}

/// Spectral norm of a symmetric matrix from its eigenvalues.
fn symmetric_op_norm<T: Real>(t: &DenseTensor<T>) -> T {
    let n = t.shape()[0];
    let m = DMatrix::from_fn(n, n, |i, j| t.get(&[i, j]).to64());
    T::of(m.symmetric_eigen().eigenvalues.amax())
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RecursionReport<T> {
    pub d: usize,
    pub points: usize,
    /// Largest `lhs - rhs` over checked points.
    pub worst_margin: T,
    pub violations: usize,
}

/// `|ℌ⁺ |ℌ^{(d-1)} f|_op (x)| <= |ℌ^{(d)} f(x)|_op` at every support point,
/// for `d` in `{2, 3}`. Levels of order one and two are computed exactly; the
/// order-three right side is an iterative lower bound, covered by `slack`.
pub fn check_recursion_lemma<T: Real>(
    measure: &Measure<T>,
    f: &[T],
    d: usize,
    slack: T,
    opts: &OpNormOptions,
    cap: usize,
) -> Result<RecursionReport<T>> {
    if !(d == 2 || d == 3) {
        return Err(Error::Domain(format!("recursion check covers d = 2, 3, got {d}")));
    }
    let law = measure.law(cap)?;
    let sup = Support::of_law(&law);
    let space = law.space();
    let g: Vec<T> = (0..law.len())
        .into_par_iter()
        .map(|idx| {
            let p = space.point_of(idx);
            if d == 2 {
                Ok(euclid(&h_vector(f, &sup, &p, Variant::Osc)?))
            } else {
                Ok(symmetric_op_norm(&h_tensor(f, &sup, &p, 2, cap)?))
            }
        })
        .collect::<Result<_>>()?;
    let margins: Vec<T> = law
        .support_indices()
        .into_par_iter()
        .map(|idx| {
            let p = space.point_of(idx);
            let lhs = euclid(&h_vector(&g, &sup, &p, Variant::Plus)?);
            let top = h_tensor(f, &sup, &p, d, cap)?;
            let rhs = if d == 2 { symmetric_op_norm(&top) } else { tensor_op(&top, opts)? };
            Ok(lhs - rhs)
        })
        .collect::<Result<_>>()?;
    Ok(RecursionReport {
        d,
        points: margins.len(),
        worst_margin: margins.iter().copied().fold(T::neg_infinity(), T::max),
        violations: margins.iter().filter(|&&m| m > slack).count(),
    })
}

fn binomial(n: usize, k: usize) -> f64 {
    (0..k).fold(1.0, |acc, j| acc * (n - j) as f64 / (j + 1) as f64)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct UstatEntryReport<T> {
    pub n: usize,
    pub d: usize,
    pub k: usize,
    pub kernel_bound: T,
    /// `C(d, k) 2^k B n^{d-k}`.
    pub bound: T,
    pub max_entry: T,
    pub holds: bool,
}

/// Every entry of `ℌ^{(k)} f` for a U-statistic on `alphabet^n`, all
/// configurations.
pub fn check_ustat_entry_bound<T: Real>(spec: &FunctionSpec<T>, n: usize, k: usize, cap: usize) -> Result<UstatEntryReport<T>> {
    let FunctionSpec::Ustat { order, alphabet, .. } = spec else {
        return Err(Error::InvalidFunction("entry bound needs a U-statistic".into()));
    };
    let d = *order;
    if k == 0 || k > d || n < d {
        return Err(Error::OrderTooLarge { k, max: d.min(n) });
    }
    let space = ProductSpace::uniform(n, alphabet)?;
    spec.validate(&space)?;
    let count = space.checked_count(cap)?;
    let table = spec.tabulate(&space, cap)?;
    let sup = Support::full(&space);
    let entries: Vec<T> = (0..count)
        .into_par_iter()
        .map(|idx| {
            let t = h_tensor(&table, &sup, &space.point_of(idx), k, cap)?;
            Ok(t.data().iter().copied().fold(T::zero(), T::max))
        })
        .collect::<Result<_>>()?;
    let b = spec.ustat_bound().unwrap_or_else(T::zero);
    let bound = T::of(binomial(d, k) * 2f64.powi(k as i32)) * b * T::of_usize(n).powi((d - k) as i32);
    let max_entry = entries.into_iter().fold(T::zero(), T::max);
    Ok(UstatEntryReport { n, d, k, kernel_bound: b, bound, max_entry, holds: max_entry <= bound * (T::one() + T::of(1e-12)) })
}

/// Symmetric kernel on `alphabet^2` with values uniform in `[-1, 1]`.
pub fn random_symmetric_kernel<R: Rng + ?Sized>(rng: &mut R, alphabet: &[f64], summation: Summation) -> FunctionSpec<f64> {
    let m = alphabet.len();
    let mut kernel = vec![0.0; m * m];
    for a in 0..m {
        for b in a..m {
            let v = rng.random_range(-1.0..=1.0);
            kernel[a * m + b] = v;
            kernel[b * m + a] = v;
        }
    }
    FunctionSpec::Ustat { order: 2, alphabet: alphabet.to_vec(), kernel, summation }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SupLemmaReport<T> {
    pub points: usize,
    /// Largest `lhs - rhs`.
    pub worst_margin: T,
    pub holds: bool,
}

/// `|ℌ⁺ g(x)| <= max_f |ℌ⁺ |f| (x)|` for `g = max_f |f|`, at every support
/// point. Functions are tables over the whole space.
pub fn check_sup_lemma<T: Real>(family: &[Vec<T>], measure: &Measure<T>, cap: usize) -> Result<SupLemmaReport<T>> {
    if family.is_empty() {
        return Err(Error::Domain("empty family".into()));
    }
    let law = measure.law(cap)?;
    let len = law.len();
    if family.iter().any(|f| f.len() != len) {
        return Err(Error::DimensionMismatch { expected: len, found: family.iter().map(Vec::len).find(|&l| l != len).unwrap_or(0) });
    }
    let abs: Vec<Vec<T>> = family.iter().map(|f| f.iter().map(|v| v.abs()).collect()).collect();
    let g: Vec<T> = (0..len).map(|i| abs.iter().map(|f| f[i]).fold(T::zero(), T::max)).collect();
    let sup = Support::of_law(&law);
    let space = law.space();
    let margins: Vec<T> = law
        .support_indices()
        .into_par_iter()
        .map(|idx| {
            let p = space.point_of(idx);
            let lhs = euclid(&h_vector(&g, &sup, &p, Variant::Plus)?);
            let rhs = abs
                .iter()
                .map(|f| h_vector(f, &sup, &p, Variant::Plus).map(|v| euclid(&v)))
                .try_fold(T::zero(), |m, v| v.map(|v| m.max(v)))?;
            Ok(lhs - rhs)
        })
        .collect::<Result<_>>()?;
    let worst_margin = margins.iter().copied().fold(T::neg_infinity(), T::max);
    Ok(SupLemmaReport { points: margins.len(), worst_margin, holds: worst_margin <= T::of(1e-12) })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BooleanReport {
    pub degree: usize,
    pub weights: Vec<f64>,
    /// `|Σ_j W_j - E f^2|`.
    pub parseval_error: f64,
    pub domination: DominationReport<f64>,
}

/// Exact tail of a function on the uniform hypercube against the
/// Fourier-weight bound.
pub fn check_boolean(table: &[f64], n: usize) -> Result<BooleanReport> {
    let measure = Measure::rademacher(n);
    let spectrum = fourier_transform(measure.space(), table)?;
    let degree = spectrum.degree(1e-12).max(1);
    let weights: Vec<f64> = (1..=degree).map(|j| spectrum.weight(j)).collect();
    let second = table.iter().map(|v| v * v).sum::<f64>() / table.len() as f64;
    let parseval_error = ((0..=n).map(|j| spectrum.weight(j)).sum::<f64>() - second).abs();
    let bound = bound_boolean(&weights, degree)?;
    let grid = with_atoms(&default_grid(&bound, 0.01, 64)?, &measure.law(DEFAULT_CAP)?, table, Side::TwoSided);
    let curve = tail_curve(&measure, table, &grid, TailMode::Exact, Side::TwoSided, DEFAULT_CAP)?;
    let domination = check_domination(&curve, &BoundCurve::of(&bound, &grid))?;
    Ok(BooleanReport { degree, weights, parseval_error, domination })
}

/// Random multilinear function of degree at most `d` on `{±1}^n`,
/// tabulated.
pub fn random_low_degree<R: Rng + ?Sized>(rng: &mut R, n: usize, d: usize) -> Vec<f64> {
    let coefficients: Vec<(u32, f64)> = (0u32..1 << n)
        .filter(|s| s.count_ones() as usize <= d)
        .map(|s| (s, rng.random_range(-1.0..=1.0)))
        .collect();
    let space = ProductSpace::<f64>::hypercube(n);
    (0..1usize << n)
        .map(|idx| {
            let x = space.values_of(&space.point_of(idx));
            coefficients
                .iter()
                .map(|&(s, c)| c * (0..n).filter(|&i| s >> i & 1 == 1).map(|i| x[i]).product::<f64>())
                .sum()
        })
        .collect()
}

/// `points + 1` equally spaced values from 0 to the `level` quantile of the
/// bound.
pub fn default_grid<T: Real>(bound: &TailBound<T>, level: T, points: usize) -> Result<Vec<T>> {
    let hi = bound
        .quantile(level)
        .ok_or_else(|| Error::Degenerate("every level of the bound vanishes".into()))?;
    Ok((0..=points).map(|j| hi * T::of_usize(j) / T::of_usize(points)).collect())
}

/// `grid` merged with the nonnegative values of `|f - Ef|` (or `f - Ef`) on
/// the support. An exact tail only jumps at these values, so domination on
/// the merged grid implies domination for every `t` up to its end.
pub fn with_atoms<T: Real>(grid: &[T], law: &ExactLaw<T>, f: &[T], side: Side) -> Vec<T> {
    let mean = law.expectation(f);
    let hi = grid.last().copied().unwrap_or_else(T::zero);
    let mut out: Vec<T> = grid.to_vec();
    out.extend(
        law.support_indices()
            .into_iter()
            .map(|i| deviation(f[i], mean, side))
            .filter(|&v| v > T::zero() && v <= hi),
    );
    out.sort_by(|a, b| a.partial_cmp(b).expect("finite grid"));
    out.dedup();
    out
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct IndicatorRow {
    pub sigma2: f64,
    pub mass: f64,
    /// `Ent(1_A) / (2 E|∂1_A|^2)` on the two-point measure.
    pub ratio: f64,
    /// `μ(A) log(1/μ(A)) / (2 μ(A)(1 - μ(A)))`.
    pub closed_form: f64,
}

/// First `μ(A) = 10^{-m}` where the indicator's ∂-LSI ratio exceeds
/// `sigma2`.
pub fn indicator_blowup(sigma2: f64) -> Result<IndicatorRow> {
    for m in 1..300 {
        let mass = 10f64.powi(-m);
        let law = two_point_measure(mass)?.law(DEFAULT_CAP)?;
        let ratio = lsi_ratio(&law, &[0.0, 1.0], Operator::D)?;
        if ratio > sigma2 {
            let closed_form = mass * (1.0 / mass).ln() / (2.0 * mass * (1.0 - mass));
            return Ok(IndicatorRow { sigma2, mass, ratio, closed_form });
        }
    }
    Err(Error::Degenerate(format!("no mass above 1e-300 exceeds σ² = {sigma2}")))
}

/// Lower estimate of the ∂-LSI constant: pattern search on small laws, plus
/// random functions and single-point bumps.
pub fn estimate_dlsi_constant(law: &ExactLaw<f64>, seed: u64) -> Result<f64> {
    let mut best: f64 = 0.0;
    if law.len() <= 128 {
        let opts = SearchOptions { starts: 4, seed, max_passes: 40 };
        best = lsi_constant_search(law, Operator::D, &opts)?.ratio;
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut candidates: Vec<Vec<f64>> = (0..64).map(|t| random_function(&mut rng, law.len(), t)).collect();
    for idx in law.support_indices() {
        let mut f = vec![1e-3; law.len()];
        f[idx] = 1.0;
        candidates.push(f);
    }
    let ratios: Vec<Option<f64>> = candidates
        .par_iter()
        .map(|f| match lsi_ratio(law, f, Operator::D) {
            Ok(r) => Ok(Some(r)),
            Err(Error::UndefinedRatio) => Ok(None),
            Err(e) => Err(e),
        })
        .collect::<Result<_>>()?;
    for r in ratios.into_iter().flatten() {
        best = best.max(r);
    }
    if !best.is_finite() || best <= 0.0 {
        return Err(Error::Degenerate(format!("∂-LSI estimate {best} is unusable")));
    }
    Ok(best)
}

/// One (model, function) pair of the regression corpus.
#[derive(Clone, Debug)]
pub struct CorpusEntry {
    pub name: String,
    pub measure: Measure<f64>,
    pub function: Vec<f64>,
    pub regime: Regime<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CorpusResult {
    pub name: String,
    pub regime: Regime<f64>,
    pub gamma: Vec<f64>,
    pub dominated: bool,
    pub violations: Vec<f64>,
    pub min_bound: f64,
    pub non_vacuous: bool,
    pub safety_factor: Option<f64>,
    /// The bound with its constant shrunk by 1.01 times the safety factor
    /// must be violated.
    pub negative_control_violated: bool,
}

impl CorpusResult {
    pub fn passed(&self) -> bool {
        self.dominated && self.non_vacuous && self.negative_control_violated
    }
}

fn table_of(space: &ProductSpace<f64>, f: impl Fn(&[f64]) -> f64) -> Result<Vec<f64>> {
    FunctionSpec::from_fn(space, DEFAULT_CAP, f)?.tabulate(space, DEFAULT_CAP)
}

fn dlsi_entry(name: &str, measure: Measure<f64>, function: Vec<f64>, d: usize, seed: u64) -> Result<CorpusEntry> {
    let sigma2 = estimate_dlsi_constant(&measure.law(DEFAULT_CAP)?, seed)?;
    Ok(CorpusEntry { name: name.into(), measure, function, regime: Regime::Dlsi { sigma2, d } })
}

fn independent_entry(name: &str, measure: Measure<f64>, function: Vec<f64>, d: usize) -> CorpusEntry {
    CorpusEntry { name: name.into(), measure, function, regime: Regime::Independent { d } }
}

/// Products, Ising models under the row-sum condition, proper colorings of a
/// triangle and small ERGMs, each with an enumerable space.
pub fn corpus(seed: u64) -> Result<Vec<CorpusEntry>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::new();

    let r2 = Measure::rademacher(2);
    out.push(independent_entry("rademacher2_x1x2", r2.clone(), table_of(r2.space(), |x| x[0] * x[1])?, 2));

    let r6 = Measure::rademacher(6);
    out.push(independent_entry("rademacher6_sum", r6.clone(), table_of(r6.space(), |x| x.iter().sum())?, 1));

    let r4 = Measure::rademacher(4);
    let mut a = vec![vec![0.0; 4]; 4];
    for i in 0..4 {
        for j in i + 1..4 {
            let v = rng.random_range(-1.0..=1.0);
            a[i][j] = v;
            a[j][i] = v;
        }
    }
    let quad = FunctionSpec::Quadform { matrix: a }.tabulate(r4.space(), DEFAULT_CAP)?;
    out.push(independent_entry("rademacher4_quadform", r4.clone(), quad, 2));

    let b5 = Measure::product(ProductSpace::binary(5), vec![vec![0.7, 0.3]; 5])?;
    out.push(independent_entry("bernoulli5_sum", b5.clone(), table_of(b5.space(), |x| x.iter().sum())?, 1));

    let t3 = Measure::product(
        ProductSpace::uniform(3, &[0.0, 1.0, 2.0])?,
        vec![vec![0.5, 0.3, 0.2], vec![0.2, 0.2, 0.6], vec![0.1, 0.6, 0.3]],
    )?;
    let random_table: Vec<f64> = (0..27).map(|_| rng.random_range(0.0..=1.0)).collect();
    out.push(independent_entry("ternary3_random_table", t3, random_table, 2));

    let r5 = Measure::rademacher(5);
    out.push(independent_entry("rademacher5_majority", r5.clone(), table_of(r5.space(), |x| x.iter().sum::<f64>().signum())?, 1));

    // cycle couplings with row sums 0.8
    let n = 6;
    let mut j = vec![vec![0.0; n]; n];
    for i in 0..n {
        j[i][(i + 1) % n] = 0.4;
        j[(i + 1) % n][i] = 0.4;
    }
    let ising = IsingSpec::new(j, vec![0.1; n])?;
    let (m, report) = build_ising(&ising)?;
    debug_assert!(report.condition_holds);
    let f = table_of(m.space(), |x| x.iter().sum())?;
    out.push(dlsi_entry("ising6_cycle_magnetization", m, f, 1, seed ^ 1)?);

    let (m, _) = build_ising(&IsingSpec::curie_weiss(8, 0.5))?;
    let f = table_of(m.space(), |x| {
        let mut s = 0.0;
        for i in 0..x.len() {
            for k in i + 1..x.len() {
                s += x[i] * x[k];
            }
        }
        s / x.len() as f64
    })?;
    out.push(dlsi_entry("curie_weiss8_pair_energy", m, f, 2, seed ^ 2)?);

    let (m, _) = build_ising(&IsingSpec::new(
        vec![vec![0.0, 0.3, 0.0, 0.2], vec![0.3, 0.0, 0.4, 0.0], vec![0.0, 0.4, 0.0, 0.3], vec![0.2, 0.0, 0.3, 0.0]],
        vec![0.5, -0.2, 0.0, 0.3],
    )?)?;
    let f = table_of(m.space(), |x| x[0] * x[1] + x[2] - x[3])?;
    out.push(dlsi_entry("ising4_field_mixed", m, f, 2, seed ^ 3)?);

    let (m, report) = build_coloring::<f64>(&Graph::complete(3), 5)?;
    debug_assert!(report.condition_holds);
    let f = table_of(m.space(), |x| x.iter().filter(|&&c| c == 0.0).count() as f64)?;
    out.push(dlsi_entry("coloring_triangle_k5_color0", m, f, 1, seed ^ 4)?);

    let spec = ErgmSpec::edge_triangle(4, 0.2, 0.1);
    let (m, report) = build_ergm(&spec)?;
    debug_assert!(report.condition_holds);
    let f = table_of(m.space(), |x| x.iter().sum())?;
    out.push(dlsi_entry("ergm4_edges", m.clone(), f, 1, seed ^ 5)?);
    let f = table_of(m.space(), |x| subgraph_count(&Motif::triangle(), 4, x))?;
    out.push(dlsi_entry("ergm4_triangles", m, f, 3, seed ^ 6)?);

    let (m, _) = build_ergm(&ErgmSpec::edge_triangle(5, -0.3, 0.05))?;
    let f = table_of(m.space(), |x| x.iter().sum())?;
    out.push(dlsi_entry("ergm5_edges", m, f, 1, seed ^ 7)?);

    Ok(out)
}

pub fn run_corpus_entry(entry: &CorpusEntry, opts: &OpNormOptions) -> Result<CorpusResult> {
    let d = entry.regime.d();
    let profile = norm_profile(&entry.function, &entry.measure, d, ProfileMode::Exact, opts, DEFAULT_CAP)?;
    let bound = bound_general(&profile, &entry.regime)?;
    let law = entry.measure.law(DEFAULT_CAP)?;
    let grid = with_atoms(&default_grid(&bound, 0.01, 80)?, &law, &entry.function, Side::TwoSided);
    let curve = tail_curve(&entry.measure, &entry.function, &grid, TailMode::Exact, Side::TwoSided, DEFAULT_CAP)?;
    let report = check_domination(&curve, &BoundCurve::of(&bound, &grid))?;
    let safety = safety_factor(&curve, &bound);
    let negative_control_violated = match safety {
        Some(s) => !check_domination(&curve, &BoundCurve::of(&bound.shrunk(s * 1.01), &grid))?.dominated,
        None => false,
    };
    Ok(CorpusResult {
        name: entry.name.clone(),
        regime: entry.regime,
        gamma: profile.gamma,
        non_vacuous: report.non_vacuous(),
        dominated: report.dominated,
        violations: report.violations,
        min_bound: report.min_bound,
        safety_factor: safety,
        negative_control_violated,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrialSummary {
    pub trials: usize,
    pub violations: usize,
    /// Largest observed `lhs - rhs` or `lhs / rhs`, per check.
    pub worst: f64,
}

/// Random bounded tables on `{±1}^n`, `n <= 4`, `d <= 3`, over `p = 2..=20`.
pub fn moment_chain_trials(trials: usize, seed: u64) -> Result<TrialSummary> {
    let p_grid: Vec<f64> = (2..=20).map(f64::from).collect();
    let reports: Vec<MomentChainReport<f64>> = (0..trials)
        .into_par_iter()
        .map(|t| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(t as u64);
            let d = 1 + t % 3;
            let n = d + rng.random_range(0..=4 - d);
            let measure = Measure::rademacher(n);
            let f: Vec<f64> = (0..1usize << n).map(|_| rng.random_range(-1.0..=1.0)).collect();
            check_moment_chain(&measure, &f, &Regime::Independent { d }, &p_grid, &OpNormOptions::default(), DEFAULT_CAP)
        })
        .collect::<Result<_>>()?;
    Ok(TrialSummary {
        trials,
        violations: reports.iter().map(|r| r.violations).sum(),
        worst: reports.iter().map(|r| r.worst_ratio).fold(0.0, f64::max),
    })
}

/// Random product measure on `n` coordinates with alphabets of size
/// `2..=max_alphabet` and strictly positive marginals.
pub fn random_product<R: Rng + ?Sized>(rng: &mut R, n: usize, max_alphabet: usize) -> Result<Measure<f64>> {
    let alphabets: Vec<Vec<f64>> = (0..n)
        .map(|_| {
            let m = rng.random_range(2..=max_alphabet);
            (0..m).map(|a| a as f64).collect()
        })
        .collect();
    let marginals = alphabets
        .iter()
        .map(|a| {
            let w: Vec<f64> = a.iter().map(|_| rng.random_range(0.05..1.0)).collect();
            let s: f64 = w.iter().sum();
            w.into_iter().map(|x| x / s).collect()
        })
        .collect();
    Measure::product(ProductSpace::new(alphabets)?, marginals)
}

/// Random tables on random products, `n <= 6`, alternating `d = 2` and `d = 3`.
pub fn recursion_trials(trials: usize, seed: u64) -> Result<TrialSummary> {
    let reports: Vec<RecursionReport<f64>> = (0..trials)
        .into_par_iter()
        .map(|t| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(t as u64);
            let d = 2 + t % 2;
            let n = rng.random_range(d..=if d == 2 { 6 } else { 5 });
            let measure = random_product(&mut rng, n, if n <= 4 { 3 } else { 2 })?;
            let len = measure.space().checked_count(DEFAULT_CAP)?;
            let f = random_function(&mut rng, len, t / 2);
            let slack = if d == 2 { 1e-9 } else { 1e-6 };
            check_recursion_lemma(&measure, &f, d, slack, &OpNormOptions::fast(), DEFAULT_CAP)
        })
        .collect::<Result<_>>()?;
    Ok(TrialSummary {
        trials,
        violations: reports.iter().map(|r| r.violations).sum(),
        worst: reports.iter().map(|r| r.worst_margin).fold(f64::NEG_INFINITY, f64::max),
    })
}

/// Largest `Ent(f^2)/(2E|ℌf|^2)` over random functions on random products
/// with alphabets of size at most 4 and `n <= 4`.
pub fn h_lsi_trials(trials: usize, seed: u64) -> Result<TrialSummary> {
    let ratios: Vec<f64> = (0..trials)
        .into_par_iter()
        .map(|t| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(t as u64);
            let n = rng.random_range(1..=4);
            let measure = random_product(&mut rng, n, 4)?;
            let law = measure.law(DEFAULT_CAP)?;
            let f = random_function(&mut rng, law.len(), t);
            match lsi_ratio(&law, &f, Operator::H) {
                Ok(r) => Ok(r),
                Err(Error::UndefinedRatio) => Ok(0.0),
                Err(e) => Err(e),
            }
        })
        .collect::<Result<_>>()?;
    let worst = ratios.iter().copied().fold(0.0, f64::max);
    Ok(TrialSummary { trials, violations: ratios.iter().filter(|&&r| r > 1.0 + 1e-9).count(), worst })
}

/// U-statistic entry bound over random symmetric kernels, `d = 2`,
/// `n in {4, 5, 6}`, `k in {1, 2}`.
pub fn ustat_entry_trials(kernels: usize, seed: u64, summation: Summation) -> Result<Vec<UstatEntryReport<f64>>> {
    let jobs: Vec<(usize, usize, usize)> = (0..kernels)
        .flat_map(|s| [4usize, 5, 6].into_iter().flat_map(move |n| [1usize, 2].into_iter().map(move |k| (s, n, k))))
        .collect();
    jobs.into_par_iter()
        .map(|(s, n, k)| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(s as u64);
            let alphabet: Vec<f64> = if s % 2 == 0 { vec![-1.0, 1.0] } else { vec![0.0, 1.0, 2.0] };
            let spec = random_symmetric_kernel(&mut rng, &alphabet, summation);
            check_ustat_entry_bound(&spec, n, k, DEFAULT_CAP)
        })
        .collect()
}

/// Random linear families on `{±1}^3`.
pub fn sup_lemma_trials(trials: usize, seed: u64) -> Result<TrialSummary> {
    let measure = Measure::rademacher(3);
    let space = measure.space().clone();
    let reports: Vec<SupLemmaReport<f64>> = (0..trials)
        .into_par_iter()
        .map(|t| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(t as u64);
            let size = rng.random_range(1..=5);
            let family: Vec<Vec<f64>> = (0..size)
                .map(|_| {
                    let c: Vec<f64> = (0..4).map(|_| rng.random_range(-1.0..=1.0)).collect();
                    table_of(&space, |x| c[0] + c[1] * x[0] + c[2] * x[1] + c[3] * x[2])
                })
                .collect::<Result<_>>()?;
            check_sup_lemma(&family, &measure, DEFAULT_CAP)
        })
        .collect::<Result<_>>()?;
    Ok(TrialSummary {
        trials,
        violations: reports.iter().filter(|r| !r.holds).count(),
        worst: reports.iter().map(|r| r.worst_margin).fold(f64::NEG_INFINITY, f64::max),
    })
}

/// Random degree-`<= 3` functions on `{±1}^8`.
pub fn boolean_trials(trials: usize, seed: u64) -> Result<Vec<BooleanReport>> {
    (0..trials)
        .into_par_iter()
        .map(|t| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(t as u64);
            let d = 1 + t % 3;
            check_boolean(&random_low_degree(&mut rng, 8, d), 8)
        })
        .collect()
}

/// `op <= ||A||_I <= HS` over every partition of random tensors with
/// `d <= 4`, `n <= 5`; returns the largest violation of either side.
pub fn tensor_sandwich_trials(trials: usize, seed: u64, slack: f64) -> Result<TrialSummary> {
    let worst: Vec<f64> = (0..trials)
        .into_par_iter()
        .map(|t| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(t as u64);
            let d = 2 + t % 3;
            let n = rng.random_range(2..=if d == 4 { 4 } else { 5 });
            let a = DenseTensor::from_fn(vec![n; d], |_| rng.random_range(-1.0..=1.0));
            let opts = OpNormOptions { seed: seed ^ t as u64, ..OpNormOptions::default() };
            let op = op_norm(&a, &opts)?.value;
            let hs = hs_norm(&a);
            let mut w = f64::NEG_INFINITY;
            for p in enumerate_partitions(d)? {
                let v = partition_norm(&a, &p, &opts)?;
                w = w.max(op - v).max(v - hs);
            }
            Ok(w)
        })
        .collect::<Result<_>>()?;
    Ok(TrialSummary {
        trials,
        violations: worst.iter().filter(|&&w| w > slack).count(),
        worst: worst.iter().copied().fold(f64::NEG_INFINITY, f64::max),
    })
}

/// Glauber samples from a fixed 4-spin Ising model against its exact law.
pub fn ising_sampler_check(samples: usize, seed: u64) -> Result<ChiSquare> {
    let spec = IsingSpec::new(
        vec![vec![0.0, 0.3, 0.0, 0.2], vec![0.3, 0.0, 0.25, 0.0], vec![0.0, 0.25, 0.0, 0.3], vec![0.2, 0.0, 0.3, 0.0]],
        vec![0.2, 0.0, -0.1, 0.0],
    )?;
    let (m, _) = build_ising(&spec)?;
    let draws = glauber_sample(&m, samples, 1000, 1, seed)?;
    chi_square(&histogram(m.space(), &draws)?, &m.probabilities(DEFAULT_CAP)?)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct EdgeFrequency {
    pub frequency: f64,
    pub std_error: f64,
    /// `|frequency - 1/2| / std_error`.
    pub z: f64,
}

/// Edge density of Glauber samples from the `β = 0` ERGM on `n` vertices.
pub fn ergm_null_edge_frequency(n: usize, samples: usize, seed: u64) -> Result<EdgeFrequency> {
    let spec = ErgmSpec::edge_triangle(n, 0.0, 0.0);
    let (m, _) = build_ergm(&spec)?;
    let draws = glauber_sample(&m, samples, 100, 1, seed)?;
    let edges = spec.edge_count();
    let ones: usize = draws.iter().map(|s| s.iter().filter(|&&a| a == 1).count()).sum();
    let total = (samples * edges) as f64;
    let frequency = ones as f64 / total;
    let std_error = (0.25 / total).sqrt();
    Ok(EdgeFrequency { frequency, std_error, z: (frequency - 0.5).abs() / std_error })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Coverage {
    pub p: f64,
    pub trials: usize,
    pub level: f64,
    pub simulated: f64,
    /// `Σ_k Bin(m, p)(k) 1{upper(k) >= p}`.
    pub exact: f64,
}

/// Coverage of the upper limit on Bernoulli(`p`) streams of length `trials`.
pub fn clopper_pearson_coverage(p: f64, trials: usize, level: f64, replications: usize, seed: u64) -> Result<Coverage> {
    let m = trials as u64;
    let upper: Vec<f64> = (0..=m).map(|k| clopper_pearson_upper(k, m, level)).collect::<Result<_>>()?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let covered = (0..replications)
        .filter(|_| {
            let k = (0..trials).filter(|_| rng.random::<f64>() < p).count();
            upper[k] >= p
        })
        .count();
    let ln_pmf = |k: u64| {
        let (kf, mf) = (k as f64, m as f64);
        ln_gamma(mf + 1.0) - ln_gamma(kf + 1.0) - ln_gamma(mf - kf + 1.0) + kf * p.ln() + (mf - kf) * (1.0 - p).ln()
    };
    let exact = (0..=m).filter(|&k| upper[k as usize] >= p).map(|k| ln_pmf(k).exp()).sum();
    Ok(Coverage { p, trials, level, simulated: covered as f64 / replications as f64, exact })
}

fn ln_gamma(x: f64) -> f64 {
    statrs::function::gamma::ln_gamma(x)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SuiteCheck {
    pub name: String,
    pub passed: bool,
    /// Informational checks are reported but do not affect the verdict.
    pub gating: bool,
    pub detail: serde_json::Value,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SuiteReport {
    pub seed: u64,
    pub passed: bool,
    pub checks: Vec<SuiteCheck>,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SuiteOptions {
    pub seed: u64,
    /// Multiplies every trial count; 1.0 is the full corpus.
    pub scale: f64,
}

impl Default for SuiteOptions {
    fn default() -> Self {
        Self { seed: 2024, scale: 1.0 }
    }
}

fn check<T: Serialize>(name: &str, passed: bool, gating: bool, detail: &T) -> Result<SuiteCheck> {
    Ok(SuiteCheck { name: name.into(), passed, gating, detail: serde_json::to_value(detail)? })
}

/// The full property corpus. Deterministic given the seed.
pub fn run_suite(opts: &SuiteOptions) -> Result<SuiteReport> {
    let seed = opts.seed;
    let n = |base: usize| ((base as f64 * opts.scale).ceil() as usize).max(1);
    let mut checks = Vec::new();

    let chain = moment_chain_trials(n(100), seed)?;
    checks.push(check("moment_chain", chain.violations == 0, true, &chain)?);

    let entries = corpus(seed)?;
    let results: Vec<CorpusResult> = entries
        .par_iter()
        .map(|e| run_corpus_entry(e, &OpNormOptions::default()))
        .collect::<Result<_>>()?;
    let ok = results.len() >= 10 && results.iter().all(CorpusResult::passed);
    checks.push(check("tail_domination_corpus", ok, true, &results)?);

    let rec = recursion_trials(n(200), seed)?;
    checks.push(check("recursion_lemma", rec.violations == 0, true, &rec)?);

    let lsi = h_lsi_trials(n(1000), seed)?;
    checks.push(check("h_lsi_product", lsi.violations == 0, true, &lsi)?);

    let rows: Vec<IndicatorRow> = [1.0, 10.0, 100.0].iter().map(|&s| indicator_blowup(s)).collect::<Result<_>>()?;
    checks.push(check("indicator_lsi_blowup", rows.iter().all(|r| r.ratio > r.sigma2), true, &rows)?);

    let boolean = boolean_trials(n(50), seed)?;
    let ok = boolean.iter().all(|b| b.domination.dominated && b.parseval_error <= 1e-10);
    let summary = TrialSummary {
        trials: boolean.len(),
        violations: boolean.iter().filter(|b| !b.domination.dominated).count(),
        worst: boolean.iter().map(|b| b.parseval_error).fold(0.0, f64::max),
    };
    checks.push(check("boolean_fourier", ok, true, &summary)?);

    let unordered = ustat_entry_trials(n(10), seed, Summation::Unordered)?;
    checks.push(check("ustat_entry_bound_unordered", unordered.iter().all(|r| r.holds), true, &ustat_summary(&unordered))?);
    let ordered = ustat_entry_trials(n(10), seed, Summation::Ordered)?;
    checks.push(check("ustat_entry_bound_ordered", ordered.iter().all(|r| r.holds), false, &ustat_summary(&ordered))?);

    let sup = sup_lemma_trials(n(50), seed)?;
    checks.push(check("sup_lemma", sup.violations == 0, true, &sup)?);

    let tensors = tensor_sandwich_trials(n(500), seed, 1e-6)?;
    checks.push(check("tensor_sandwich", tensors.violations == 0, true, &tensors)?);

    let chi = ising_sampler_check(100_000, seed)?;
    checks.push(check("ising_glauber_chi_square", chi.p_value > 0.01, true, &chi)?);
    let edge = ergm_null_edge_frequency(4, 20_000, seed)?;
    checks.push(check("ergm_null_edge_frequency", edge.z <= 3.0, true, &edge)?);

    let passed = checks.iter().filter(|c| c.gating).all(|c| c.passed);
    Ok(SuiteReport { seed, passed, checks })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct UstatSummary {
    pub checks: usize,
    pub failures: usize,
    /// Largest `max_entry / bound`.
    pub worst_ratio: f64,
}

pub fn ustat_summary(reports: &[UstatEntryReport<f64>]) -> UstatSummary {
    UstatSummary {
        checks: reports.len(),
        failures: reports.iter().filter(|r| !r.holds).count(),
        worst_ratio: reports
            .iter()
            .filter(|r| r.bound > 0.0)
            .map(|r| r.max_entry / r.bound)
            .fold(0.0, f64::max),
    }
}

impl SuiteReport {
    pub fn write_json<W: Write>(&self, mut w: W) -> Result<()> {
        serde_json::to_writer_pretty(&mut w, self)?;
        writeln!(w)?;
        Ok(())
    }

    /// `check,passed,gating`.
    pub fn write_csv<W: Write>(&self, mut w: W) -> Result<()> {
        writeln!(w, "check,passed,gating")?;
        for c in &self.checks {
            writeln!(w, "{},{},{}", c.name, c.passed, c.gating)?;
        }
        Ok(())
    }
}
