//! Multilevel tail bounds `t ↦ min(1, P·exp(-(1/C) min_k (t/γ_k)^{2/k}))`
//! and the moment-to-tail converter.

use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::diffops::NormProfile;
use crate::error::{Error, Result};
use crate::funcs::{gradient_tensor, FunctionSpec};
use crate::scalar::Real;
use crate::space::ExactLaw;
use crate::tensors::{enumerate_partitions, hs_norm, op_norm, partition_norm, DenseTensor, OpNormOptions, Partition};

/// One term `(t/scale)^{2/order}` of the exponent.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Level<T> {
    pub order: usize,
    pub scale: T,
    pub label: String,
}

impl<T: Real> Level<T> {
    pub fn new(order: usize, scale: T) -> Self {
        Self { order, scale, label: format!("k={order}") }
    }

    pub fn labeled(order: usize, scale: T, label: impl Into<String>) -> Self {
        Self { order, scale, label: label.into() }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TailBound<T> {
    pub name: String,
    pub levels: Vec<Level<T>>,
    pub constant: T,
    pub prefactor: T,
    /// Bounds `P(f - Ef >= t)` only.
    pub one_sided: bool,
    /// False when a constant is a user choice rather than a proven value.
    pub certified: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Evaluation<T> {
    pub raw: T,
    pub clipped: T,
    /// Index of the level attaining the minimum.
    pub active: Option<usize>,
}

impl<T: Real> TailBound<T> {
    pub fn new(name: impl Into<String>, levels: Vec<Level<T>>, constant: T) -> Result<Self> {
        if !(constant > T::zero()) || !constant.is_finite() {
            return Err(Error::Domain(format!("bound constant must be positive, got {constant}")));
        }
        if levels.iter().any(|l| l.order == 0 || !(l.scale >= T::zero())) {
            return Err(Error::Domain("levels need a positive order and a nonnegative scale".into()));
        }
        Ok(Self { name: name.into(), levels, constant, prefactor: T::of(2.0), one_sided: false, certified: true })
    }

    /// `min_k (t/γ_k)^{2/k}` over levels with `γ_k > 0`, `+∞` when none.
    pub fn exponent(&self, t: T) -> (T, Option<usize>) {
        let mut best = (T::infinity(), None);
        for (j, l) in self.levels.iter().enumerate() {
            if l.scale > T::zero() {
                let v = (t / l.scale).powf(T::of(2.0) / T::of_usize(l.order));
                if v < best.0 {
                    best = (v, Some(j));
                }
            }
        }
        best
    }

    pub fn evaluate(&self, t: T) -> Evaluation<T> {
        if t <= T::zero() {
            return Evaluation { raw: self.prefactor, clipped: self.prefactor.min(T::one()), active: None };
        }
        let (e, active) = self.exponent(t);
        let raw = self.prefactor * (-e / self.constant).exp();
        Evaluation { raw, clipped: raw.min(T::one()).max(T::zero()), active }
    }

    pub fn curve(&self, grid: &[T]) -> Vec<Evaluation<T>> {
        grid.iter().map(|&t| self.evaluate(t)).collect()
    }

    /// The same bound with the constant divided by `factor`.
    pub fn shrunk(&self, factor: T) -> Self {
        Self { constant: self.constant / factor, ..self.clone() }
    }

    /// `t, raw_bound, clipped_bound, active_level`, 17 significant digits.
    pub fn write_csv<W: Write>(&self, grid: &[T], mut w: W) -> Result<()> {
        writeln!(w, "t,raw_bound,clipped_bound,active_level")?;
        for (&t, e) in grid.iter().zip(self.curve(grid)) {
            let label = e.active.map(|j| self.levels[j].label.as_str()).unwrap_or("");
            writeln!(w, "{:.16e},{:.16e},{:.16e},{}", t.to64(), e.raw.to64(), e.clipped.to64(), label)?;
        }
        Ok(())
    }

    /// Smallest `t` on a doubling-then-bisection search with clipped bound at
    /// most `level`; `None` when every level vanishes.
    pub fn quantile(&self, level: T) -> Option<T> {
        if !self.levels.iter().any(|l| l.scale > T::zero()) {
            return None;
        }
        let mut hi = T::one();
        while self.evaluate(hi).clipped > level {
            hi *= T::of(2.0);
            if !hi.is_finite() {
                return None;
            }
        }
        let mut lo = T::zero();
        for _ in 0..200 {
            let mid = (lo + hi) / T::of(2.0);
            if self.evaluate(mid).clipped > level {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        Some(hi)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "regime", rename_all = "snake_case")]
pub enum Regime<T> {
    Independent { d: usize },
    Dlsi { sigma2: T, d: usize },
}

impl<T: Real> Regime<T> {
    pub fn d(&self) -> usize {
        match *self {
            Regime::Independent { d } | Regime::Dlsi { d, .. } => d,
        }
    }

    /// `217 d^2` or `15 σ^2 d^2`.
    pub fn constant(&self) -> Result<T> {
        let d2 = T::of_usize(self.d() * self.d());
        match *self {
            Regime::Independent { .. } => Ok(T::of(217.0) * d2),
            Regime::Dlsi { sigma2, .. } => {
                if !(sigma2 > T::zero()) {
                    return Err(Error::Degenerate(format!("σ² = {sigma2} must be positive")));
                }
                Ok(T::of(15.0) * sigma2 * d2)
            }
        }
    }

    fn with_d(&self, d: usize) -> Self {
        match *self {
            Regime::Independent { .. } => Regime::Independent { d },
            Regime::Dlsi { sigma2, .. } => Regime::Dlsi { sigma2, d },
        }
    }
}

fn regime_name<T: Real>(r: &Regime<T>) -> &'static str {
    match r {
        Regime::Independent { .. } => "independent",
        Regime::Dlsi { .. } => "dlsi",
    }
}

/// Levels `(k, γ_k)` from a difference-operator norm profile.
pub fn bound_general<T: Real>(profile: &NormProfile<T>, regime: &Regime<T>) -> Result<TailBound<T>> {
    if profile.d != regime.d() {
        return Err(Error::DimensionMismatch { expected: regime.d(), found: profile.d });
    }
    let levels = profile.gamma.iter().enumerate().map(|(k, &g)| Level::new(k + 1, g)).collect();
    TailBound::new(format!("general_{}", regime_name(regime)), levels, regime.constant()?)
}

/// Upper deviations of `sup_f |f|` from `E W_j` (`j < d`) and `||W_d||_∞`.
pub fn bound_suprema<T: Real>(expected_w: &[T], wd_sup: T, regime: &Regime<T>) -> Result<TailBound<T>> {
    let d = regime.d();
    if expected_w.len() + 1 != d {
        return Err(Error::DimensionMismatch { expected: d - 1, found: expected_w.len() });
    }
    let mut levels: Vec<Level<T>> = expected_w.iter().enumerate().map(|(j, &w)| Level::new(j + 1, w)).collect();
    levels.push(Level::new(d, wd_sup));
    let mut b = TailBound::new(format!("suprema_{}", regime_name(regime)), levels, regime.constant()?)?;
    b.one_sided = true;
    Ok(b)
}

/// `t^2 / (15 σ^2 n sup c(f)^2)` for suprema of sums with bounded summands.
pub fn bound_suprema_of_sums<T: Real>(sigma2: T, n: usize, c_sup: T) -> Result<TailBound<T>> {
    let regime = Regime::Dlsi { sigma2, d: 1 };
    let scale = T::of_usize(n).sqrt() * c_sup;
    let mut b = TailBound::new("suprema_of_sums", vec![Level::new(1, scale)], regime.constant()?)?;
    b.one_sided = true;
    Ok(b)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ChaosVariant {
    /// Upper tail from `E W_k`.
    Upper,
    /// Two-sided tail from `E W̃_k`.
    TwoSided,
}

/// Chaos bound with support in `[a, b]^n`.
///
/// The upper variant has `C = 2e^2 σ^2 (b-a)^2 d^2` and levels `E W_k`. The
/// two-sided variant converts the moment chain
/// `Σ_j (2(b-a)^2 p)^{j/2} E W̃_j` with [`moment_to_tail`].
pub fn bound_chaos<T: Real>(expected: &[T], sigma2: T, a: T, b: T, variant: ChaosVariant) -> Result<TailBound<T>> {
    if !(b > a) {
        return Err(Error::Domain(format!("support interval [{a}, {b}] is empty")));
    }
    let d = expected.len();
    if d == 0 {
        return Err(Error::Domain("chaos order must be positive".into()));
    }
    let w2 = (b - a) * (b - a);
    match variant {
        ChaosVariant::Upper => {
            if !(sigma2 > T::zero()) {
                return Err(Error::Degenerate(format!("σ² = {sigma2} must be positive")));
            }
            let e2 = T::E() * T::E();
            let c = T::of(2.0) * e2 * sigma2 * w2 * T::of_usize(d * d);
            let levels = expected.iter().enumerate().map(|(k, &w)| Level::new(k + 1, w)).collect();
            let mut bound = TailBound::new("chaos_upper", levels, c)?;
            bound.one_sided = true;
            Ok(bound)
        }
        ChaosVariant::TwoSided => {
            let coefficients = expected
                .iter()
                .enumerate()
                .map(|(j, &w)| (T::of(2.0) * w2).powf(T::of_usize(j + 1) / T::of(2.0)) * w)
                .collect();
            let mut bound = moment_to_tail(&MomentProfile { coefficients, shift: T::zero() })?;
            bound.name = "chaos_two_sided".into();
            Ok(bound)
        }
    }
}

/// Order-2 chaos: `C = 60 (b-a)^2 σ^2` with levels `T_1, T_2`.
pub fn bound_chaos_d2<T: Real>(t1: T, t2: T, sigma2: T, a: T, b: T) -> Result<TailBound<T>> {
    if !(b > a) {
        return Err(Error::Domain(format!("support interval [{a}, {b}] is empty")));
    }
    if !(sigma2 > T::zero()) {
        return Err(Error::Degenerate(format!("σ² = {sigma2} must be positive")));
    }
    let c = T::of(60.0) * (b - a) * (b - a) * sigma2;
    let mut bound = TailBound::new("chaos_d2", vec![Level::labeled(1, t1, "T1"), Level::labeled(2, t2, "T2")], c)?;
    bound.one_sided = true;
    Ok(bound)
}

/// Boolean functions on the uniform hypercube from Fourier weights:
/// `exp(1 - min_j (t/(d e W_j^{1/2}))^{2/j})`.
pub fn bound_boolean<T: Real>(weights: &[T], d: usize) -> Result<TailBound<T>> {
    if weights.iter().any(|&w| w < T::zero()) {
        return Err(Error::Domain("Fourier weights must be nonnegative".into()));
    }
    if !weights.iter().any(|&w| w > T::zero()) {
        return Err(Error::Degenerate("all Fourier weights vanish".into()));
    }
    let de = T::of_usize(d) * T::E();
    let levels = weights
        .iter()
        .enumerate()
        .take(d)
        .map(|(j, &w)| Level::new(j + 1, de * w.sqrt()))
        .collect();
    let mut b = TailBound::new("boolean", levels, T::one())?;
    b.prefactor = T::E();
    Ok(b)
}

fn binomial(n: usize, k: usize) -> f64 {
    (0..k).fold(1.0, |acc, j| acc * (n - j) as f64 / (j + 1) as f64)
}

/// U-statistics of order `d` with kernel bound `B`.
///
/// Plain form: bound on `P(|f - Ef| >= t)` with `γ_k = B C(d,k) 2^k n^{d-k/2}`.
/// Normalized form: bound on `P(n^{1/2-d} |f - Ef| >= B t)` with exponent
/// `min(t^2, n^{1-1/d} t^{2/d}) / (4C)`.
pub fn bound_ustat<T: Real>(b: T, n: usize, regime: &Regime<T>, normalized: bool) -> Result<TailBound<T>> {
    let d = regime.d();
    if d == 0 || n <= d {
        return Err(Error::Domain(format!("U-statistics need n > d >= 1, got n = {n}, d = {d}")));
    }
    if !(b > T::zero()) {
        return Err(Error::Domain("kernel bound must be positive".into()));
    }
    let c = regime.constant()?;
    let nn = T::of_usize(n);
    if normalized {
        let levels = vec![
            Level::new(1, T::one()),
            Level::new(d, nn.powf(-(T::of_usize(d) - T::one()) / T::of(2.0))),
        ];
        return TailBound::new("ustat_normalized", levels, T::of(4.0) * c);
    }
    let levels = (1..=d)
        .map(|k| {
            let g = b * T::of(binomial(d, k)) * T::of(2f64.powi(k as i32)) * nn.powf(T::of_usize(d) - T::of_usize(k) / T::of(2.0));
            Level::new(k, g)
        })
        .collect();
    TailBound::new("ustat", levels, c)
}

/// `||E ∇^{(k)} f||_I` for one `(k, I)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PartitionNormEntry<T> {
    pub k: usize,
    pub partition: Partition,
    pub norm: T,
}

/// Every `||E ∇^{(k)} f||_I`, `k <= d`, `I` a partition of `[k]`.
pub fn polynomial_norms<T: Real>(spec: &FunctionSpec<T>, law: &ExactLaw<T>, opts: &OpNormOptions) -> Result<Vec<PartitionNormEntry<T>>> {
    let d = spec.as_poly(law.n()).map(|c| c.len()).unwrap_or(0);
    let mut out = Vec::new();
    for k in 1..=d {
        let g = gradient_tensor(spec, k, law)?;
        for partition in enumerate_partitions(k)? {
            let norm = partition_norm(&g.expected, &partition, opts)?;
            out.push(PartitionNormEntry { k, partition, norm });
        }
    }
    Ok(out)
}

/// Levels `(|I|, σ^k ||E ∇^{(k)} f||_I)`. Without `c_user` the constant is
/// `15 σ^2 d^2` and the bound is marked uncertified.
pub fn bound_polynomial<T: Real>(norms: &[PartitionNormEntry<T>], d: usize, sigma2: T, c_user: Option<T>) -> Result<TailBound<T>> {
    if !(sigma2 > T::zero()) {
        return Err(Error::Degenerate(format!("σ² = {sigma2} must be positive")));
    }
    for k in 1..=d {
        for p in enumerate_partitions(k)? {
            if !norms.iter().any(|e| e.k == k && e.partition == p) {
                return Err(Error::Domain(format!("missing norm for k = {k}, partition {:?}", p.blocks)));
            }
        }
    }
    let sigma = sigma2.sqrt();
    let levels = norms
        .iter()
        .filter(|e| e.k <= d)
        .map(|e| Level::labeled(e.partition.len(), sigma.powi(e.k as i32) * e.norm, format!("k={} I={:?}", e.k, e.partition.blocks)))
        .collect();
    let certified = c_user.is_some();
    let c = c_user.unwrap_or(T::of(15.0) * sigma2 * T::of_usize(d * d));
    let mut b = TailBound::new("polynomial", levels, c)?;
    b.certified = certified;
    Ok(b)
}

/// Triangle counts in an ERGM: exponent
/// `min(t^2/max(C_S2 n^4, C_E n^3, n^3), t/max(sqrt(2n), 2 C_E n), t^{2/3}/2) / C(β)`.
pub fn ergm_triangle_bound<T: Real>(n: usize, c_s2: T, c_e: T, c_beta: T) -> Result<TailBound<T>> {
    let nn = T::of_usize(n);
    let quad = (c_s2 * nn.powi(4)).max(c_e * nn.powi(3)).max(nn.powi(3));
    let lin = (T::of(2.0) * nn).sqrt().max(T::of(2.0) * c_e * nn);
    let levels = vec![
        Level::labeled(1, quad.sqrt(), "gaussian"),
        Level::labeled(2, lin, "exponential"),
        Level::labeled(3, T::of(2.0).powf(T::of(1.5)), "cubic"),
    ];
    let mut b = TailBound::new("ergm_triangles", levels, c_beta)?;
    b.certified = false;
    Ok(b)
}

/// `||f - Ef||_p <= Σ_k C_k (p - s)^{k/2}` for `p >= 2`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MomentProfile<T> {
    pub coefficients: Vec<T>,
    pub shift: T,
}

impl<T: Real> MomentProfile<T> {
    pub fn at(&self, p: T) -> T {
        self.coefficients
            .iter()
            .enumerate()
            .map(|(k, &c)| c * (p - self.shift).powf(T::of_usize(k + 1) / T::of(2.0)))
            .sum()
    }
}

/// Exponent `min(log 2/(2-s), 1) min_k (t/(L e C_k))^{2/k}` with `L` the
/// number of positive coefficients.
pub fn moment_to_tail<T: Real>(profile: &MomentProfile<T>) -> Result<TailBound<T>> {
    let s = profile.shift;
    if !(s >= T::zero() && s < T::of(2.0)) {
        return Err(Error::Domain(format!("shift {s} must lie in [0, 2)")));
    }
    let l = profile.coefficients.iter().filter(|&&c| c > T::zero()).count();
    if l == 0 {
        return Err(Error::Degenerate("all moment coefficients vanish".into()));
    }
    let factor = (T::LN_2() / (T::of(2.0) - s)).min(T::one());
    let le = T::of_usize(l) * T::E();
    let levels = profile
        .coefficients
        .iter()
        .enumerate()
        .map(|(k, &c)| Level::new(k + 1, le * c.max(T::zero())))
        .collect();
    TailBound::new("moment_to_tail", levels, T::one() / factor)
}

/// Quadratic forms `x^T A x` with `|X_i| <= M`: levels `4M|A|_HS` and
/// `8M^2 |A^abs|_op` with the order-2 constant of the regime.
pub fn hanson_wright<T: Real>(a: &[Vec<T>], m: T, regime: &Regime<T>, opts: &OpNormOptions) -> Result<TailBound<T>> {
    let mat = DenseTensor::from_matrix(a)?;
    let n = a.len();
    for i in 0..n {
        if a[i][i] != T::zero() {
            return Err(Error::Domain("matrix has a nonzero diagonal".into()));
        }
    }
    if !(m > T::zero()) {
        return Err(Error::Domain("bound M must be positive".into()));
    }
    let hs = hs_norm(&mat);
    let abs = mat.abs();
    let abs_op = if abs.data().iter().all(|&v| v == T::zero()) { T::zero() } else { op_norm(&abs, opts)?.value };
    let levels = vec![
        Level::labeled(1, T::of(4.0) * m * hs, "hs"),
        Level::labeled(2, T::of(8.0) * m * m * abs_op, "abs_op"),
    ];
    TailBound::new("hanson_wright", levels, regime.with_d(2).constant()?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::diffops::Provenance;
    use approx::assert_abs_diff_eq;

    fn profile(gamma: Vec<f64>) -> NormProfile<f64> {
        NormProfile { d: gamma.len(), gamma, provenance: Provenance::Exact }
    }

    #[test]
    fn general_examples() {
        let b = bound_general(&profile(vec![0.0, 0.0]), &Regime::Independent { d: 2 }).unwrap();
        assert_eq!(b.evaluate(0.0).clipped, 1.0);
        assert_eq!(b.evaluate(0.5).clipped, 0.0);
        let b = bound_general(&profile(vec![1.0, 2.0]), &Regime::Dlsi { sigma2: 1.0, d: 2 }).unwrap();
        assert_eq!(b.constant, 60.0);
        let e = b.evaluate(6.0);
        assert_abs_diff_eq!(e.raw, 2.0 * (-0.05f64).exp(), epsilon = 1e-15);
        assert_eq!(e.clipped, 1.0);
        assert_eq!(e.active, Some(1));
        assert!(bound_general(&profile(vec![1.0]), &Regime::Dlsi { sigma2: 0.0, d: 1 }).is_err());
        assert!(bound_general(&profile(vec![1.0]), &Regime::Independent { d: 2 }).is_err());
    }

    #[test]
    fn suprema_examples() {
        let b = bound_suprema(&[1.0], 1.0, &Regime::Dlsi { sigma2: 1.0, d: 2 }).unwrap();
        assert!(b.one_sided);
        let t = 60f64.sqrt();
        // (t/1)^2 = 60 and (t/1)^1 = sqrt 60: the second level is active
        let e = b.evaluate(t);
        assert_abs_diff_eq!(e.raw, 2.0 * (-(60f64.sqrt()) / 60.0).exp(), epsilon = 1e-15);
        let s = bound_suprema_of_sums(2.0, 10, 0.5).unwrap();
        let t: f64 = 3.0;
        assert_abs_diff_eq!(s.evaluate(t).raw, 2.0 * (-t * t / (15.0 * 2.0 * 10.0 * 0.25)).exp(), epsilon = 1e-15);
    }

    #[test]
    fn chaos_examples() {
        let b = bound_chaos(&[1.0, 1.0], 1.0, -1.0, 1.0, ChaosVariant::Upper).unwrap();
        let e2 = std::f64::consts::E.powi(2);
        assert_abs_diff_eq!(b.constant, 32.0 * e2, epsilon = 1e-12);
        assert_abs_diff_eq!(b.constant, 236.4, epsilon = 0.05);
        let c = bound_chaos_d2(1.0, 1.0, 1.0, -1.0, 1.0).unwrap();
        assert_eq!(c.constant, 240.0);
        assert!(bound_chaos(&[1.0], 1.0, 1.0, 1.0, ChaosVariant::Upper).is_err());
        let two = bound_chaos(&[1.0, 0.5], 1.0, 0.0, 1.0, ChaosVariant::TwoSided).unwrap();
        // C_1 = sqrt 2, C_2 = 2 * 0.5; L = 2
        assert_abs_diff_eq!(two.levels[0].scale, 2.0 * std::f64::consts::E * 2f64.sqrt(), epsilon = 1e-12);
        assert_abs_diff_eq!(two.levels[1].scale, 2.0 * std::f64::consts::E, epsilon = 1e-12);
    }

    #[test]
    fn boolean_examples() {
        let e = std::f64::consts::E;
        let parity = bound_boolean(&[0.0, 1.0], 2).unwrap();
        assert_abs_diff_eq!(parity.evaluate(2.0 * e).raw, 1.0, epsilon = 1e-12);
        let dict = bound_boolean(&[1.0], 1).unwrap();
        assert_abs_diff_eq!(dict.evaluate(e).raw, 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(dict.evaluate(2.0 * e).raw, (-3.0f64).exp(), epsilon = 1e-15);
        assert_eq!(dict.evaluate(0.0).raw, e);
        assert_eq!(dict.evaluate(0.0).clipped, 1.0);
        assert!(bound_boolean(&[0.0, 0.0], 2).is_err());
    }

    #[test]
    fn ustat_examples() {
        let b = bound_ustat(1.0, 4, &Regime::Independent { d: 1 }, false).unwrap();
        assert_abs_diff_eq!(b.levels[0].scale, 2.0 * 2.0, epsilon = 1e-12);
        let b = bound_ustat(1.0, 4, &Regime::Independent { d: 2 }, false).unwrap();
        assert_abs_diff_eq!(b.levels[0].scale, 32.0, epsilon = 1e-12);
        assert_abs_diff_eq!(b.levels[1].scale, 16.0, epsilon = 1e-12);
        assert!(bound_ustat(1.0, 2, &Regime::Independent { d: 2 }, false).is_err());
        for n in [4usize, 16, 64] {
            for d in [2usize, 3] {
                let b = bound_ustat(1.0, n, &Regime::Independent { d }, true).unwrap();
                let c = 4.0 * 217.0 * (d * d) as f64;
                for t in [0.1, 0.5, 0.9 * (n as f64).sqrt()] {
                    let expect = (t * t).min((n as f64).powf(1.0 - 1.0 / d as f64) * t.powf(2.0 / d as f64));
                    let expect = 2.0 * (-expect / c).exp();
                    assert_abs_diff_eq!(b.evaluate(t).raw, expect, epsilon = 1e-12);
                    // t < sqrt n: the Gaussian level is active
                    assert_eq!(b.evaluate(t).active, Some(0));
                }
            }
        }
    }

    #[test]
    fn moment_to_tail_examples() {
        let b = moment_to_tail(&MomentProfile { coefficients: vec![1.0], shift: 0.0 }).unwrap();
        assert_abs_diff_eq!(1.0 / b.constant, 2f64.ln() / 2.0, epsilon = 1e-15);
        assert_abs_diff_eq!(b.evaluate(std::f64::consts::E).raw, 2.0 * (-(2f64.ln()) / 2.0).exp(), epsilon = 1e-15);
        let b = moment_to_tail(&MomentProfile { coefficients: vec![1.0, 0.0], shift: 1.5 }).unwrap();
        assert_eq!(b.constant, 1.0);
        assert!(moment_to_tail(&MomentProfile { coefficients: vec![0.0], shift: 0.0 }).is_err());
        assert!(moment_to_tail(&MomentProfile { coefficients: vec![1.0], shift: 2.0 }).is_err());
    }

    #[test]
    fn hanson_wright_examples() {
        let a = vec![vec![0.0, 0.5], vec![0.5, 0.0]];
        let b = hanson_wright(&a, 1.0, &Regime::Independent { d: 2 }, &OpNormOptions::default()).unwrap();
        assert_eq!(b.constant, 868.0);
        assert_abs_diff_eq!(b.levels[0].scale, 4.0 / 2f64.sqrt(), epsilon = 1e-12);
        assert_abs_diff_eq!(b.levels[1].scale, 8.0 * 0.5, epsilon = 1e-9);
        let zero = hanson_wright(&[vec![0.0, 0.0], vec![0.0, 0.0]], 1.0, &Regime::Independent { d: 2 }, &OpNormOptions::default()).unwrap();
        assert_eq!(zero.evaluate(0.1).clipped, 0.0);
        assert!(hanson_wright(&[vec![1.0]], 1.0, &Regime::Independent { d: 2 }, &OpNormOptions::default()).is_err());
        // same as the general bound with the precursor scales
        let g = bound_general(&profile(vec![b.levels[0].scale, b.levels[1].scale]), &Regime::Independent { d: 2 }).unwrap();
        for t in [0.0, 0.5, 3.0, 40.0, 400.0] {
            assert_abs_diff_eq!(g.evaluate(t).raw, b.evaluate(t).raw, epsilon = 1e-12);
        }
    }

    #[test]
    fn polynomial_reduces_to_hanson_wright_shape() {
        use crate::space::{Measure, DEFAULT_CAP};
        let a = vec![vec![0.0, 0.3, -0.2], vec![0.3, 0.0, 0.6], vec![-0.2, 0.6, 0.0]];
        let q = FunctionSpec::Quadform { matrix: a.clone() };
        let law = Measure::rademacher(3).law(DEFAULT_CAP).unwrap();
        let norms = polynomial_norms(&q, &law, &OpNormOptions::default()).unwrap();
        assert_eq!(norms.len(), 1 + 2);
        let sigma2 = 1.5;
        let b = bound_polynomial(&norms, 2, sigma2, Some(10.0)).unwrap();
        assert!(b.certified);
        let m = DenseTensor::from_matrix(&a).unwrap().scale(2.0);
        let hs = hs_norm(&m);
        let op = op_norm(&m, &OpNormOptions::default()).unwrap().value;
        for t in [0.3f64, 1.0, 5.0, 50.0] {
            let e = (t * t / (sigma2 * sigma2 * hs * hs)).min(t / (sigma2 * op));
            assert_abs_diff_eq!(b.evaluate(t).raw, 2.0 * (-e / 10.0).exp(), epsilon = 1e-9);
        }
        let d = bound_polynomial(&norms, 2, sigma2, None).unwrap();
        assert!(!d.certified);
        assert_eq!(d.constant, 15.0 * sigma2 * 4.0);
        assert!(bound_polynomial(&norms[..2], 2, sigma2, None).is_err());
    }

    #[test]
    fn ergm_triangle_levels() {
        let b = ergm_triangle_bound(10, 0.1, 0.5, 3.0).unwrap();
        assert_abs_diff_eq!(b.levels[0].scale, (1000f64).sqrt(), epsilon = 1e-9);
        assert_abs_diff_eq!(b.levels[1].scale, 10.0, epsilon = 1e-12);
        let t: f64 = 27.0;
        let e = (t * t / 1000.0).min(t / 10.0).min(t.powf(2.0 / 3.0) / 2.0);
        assert_abs_diff_eq!(b.evaluate(t).raw, 2.0 * (-e / 3.0).exp(), epsilon = 1e-12);
    }

    #[test]
    fn csv_format() {
        let b = bound_general(&profile(vec![1.0]), &Regime::Independent { d: 1 }).unwrap();
        let mut out = Vec::new();
        b.write_csv(&[0.0, 1.0], &mut out).unwrap();
        let s = String::from_utf8(out).unwrap();
        let lines: Vec<&str> = s.lines().collect();
        assert_eq!(lines[0], "t,raw_bound,clipped_bound,active_level");
        assert_eq!(lines[1], "0.0000000000000000e0,2.0000000000000000e0,1.0000000000000000e0,");
        assert!(lines[2].ends_with(",k=1"));
    }

    proptest::proptest! {
        #[test]
        fn bounds_are_monotone(g in proptest::collection::vec(0.0f64..5.0, 3), bump in 0.0f64..2.0, k in 0usize..3) {
            let b = bound_general(&profile(g.clone()), &Regime::Dlsi { sigma2: 0.7, d: 3 }).unwrap();
            let mut g2 = g.clone();
            g2[k] += bump;
            let b2 = bound_general(&profile(g2), &Regime::Dlsi { sigma2: 0.7, d: 3 }).unwrap();
            let mut prev = 1.0;
            for j in 0..200 {
                let t = j as f64 * 0.5;
                let v = b.evaluate(t).clipped;
                proptest::prop_assert!(v <= prev + 1e-15);
                proptest::prop_assert!(b2.evaluate(t).clipped >= v - 1e-15);
                prev = v;
            }
            proptest::prop_assert_eq!(b.evaluate(0.0).clipped, 1.0);
            if g.iter().any(|&x| x > 0.0) {
                proptest::prop_assert!(b.evaluate(1e9).clipped < 1e-6);
            }
        }
    }
}
