//! Finite product spaces, measures on them and exact integral functionals.
//!
//! Configurations are handled internally as *points*: one alphabet index per
//! coordinate. The flat index of a point is its position in lexicographic
//! order, first coordinate most significant, alphabets in their declared order.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::models::{ErgmSpec, IsingSpec};
use crate::scalar::Real;

/// Default cap on the number of configurations summed exactly.
pub const DEFAULT_CAP: usize = 1 << 24;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProductSpace<T> {
    alphabets: Vec<Vec<T>>,
}

impl<T: Real> ProductSpace<T> {
    pub fn new(alphabets: Vec<Vec<T>>) -> Result<Self> {
        for (i, a) in alphabets.iter().enumerate() {
            if a.is_empty() {
                return Err(Error::Domain(format!("alphabet {i} is empty")));
            }
            if a.iter().any(|v| !v.is_finite()) {
                return Err(Error::Domain(format!("alphabet {i} has a non-finite value")));
            }
            for (j, x) in a.iter().enumerate() {
                if a[..j].contains(x) {
                    return Err(Error::Domain(format!("alphabet {i} repeats the value {x}")));
                }
            }
        }
        Ok(Self { alphabets })
    }

    /// `{-1, +1}^n`.
    pub fn hypercube(n: usize) -> Self {
        Self { alphabets: vec![vec![-T::one(), T::one()]; n] }
    }

    /// `{0, 1}^n`.
    pub fn binary(n: usize) -> Self {
        Self { alphabets: vec![vec![T::zero(), T::one()]; n] }
    }

    pub fn uniform(n: usize, alphabet: &[T]) -> Result<Self> {
        Self::new(vec![alphabet.to_vec(); n])
    }

    pub fn n(&self) -> usize {
        self.alphabets.len()
    }

    pub fn alphabet(&self, i: usize) -> &[T] {
        &self.alphabets[i]
    }

    pub fn alphabets(&self) -> &[Vec<T>] {
        &self.alphabets
    }

    pub fn size(&self, i: usize) -> usize {
        self.alphabets[i].len()
    }

    /// Total number of configurations (saturating).
    pub fn count(&self) -> u128 {
        self.alphabets
            .iter()
            .fold(1u128, |acc, a| acc.saturating_mul(a.len() as u128))
    }

    /// Number of configurations, or an error when it exceeds `cap`.
    pub fn checked_count(&self, cap: usize) -> Result<usize> {
        let count = self.count();
        if count > cap as u128 {
            return Err(Error::EnumerationTooLarge { count, cap });
        }
        Ok(count as usize)
    }

    pub fn strides(&self) -> Vec<usize> {
        let n = self.n();
        let mut strides = vec![1usize; n];
        for i in (0..n.saturating_sub(1)).rev() {
            strides[i] = strides[i + 1].saturating_mul(self.size(i + 1));
        }
        strides
    }

    pub fn index_of(&self, point: &[usize]) -> usize {
        point
            .iter()
            .zip(&self.alphabets)
            .fold(0usize, |acc, (&p, a)| acc * a.len() + p)
    }

    pub fn point_of(&self, mut index: usize) -> Vec<usize> {
        let mut point = vec![0; self.n()];
        for i in (0..self.n()).rev() {
            let s = self.size(i);
            point[i] = index % s;
            index /= s;
        }
        point
    }

    pub fn values_of(&self, point: &[usize]) -> Vec<T> {
        point.iter().zip(&self.alphabets).map(|(&p, a)| a[p]).collect()
    }

    /// Alphabet indices of a configuration given by values.
    pub fn locate(&self, values: &[T]) -> Result<Vec<usize>> {
        if values.len() != self.n() {
            return Err(Error::DimensionMismatch { expected: self.n(), found: values.len() });
        }
        values
            .iter()
            .zip(&self.alphabets)
            .enumerate()
            .map(|(i, (v, a))| {
                a.iter()
                    .position(|x| x == v)
                    .ok_or_else(|| Error::Domain(format!("value {v} not in alphabet {i}")))
            })
            .collect()
    }

    pub fn is_hypercube(&self) -> bool {
        self.hypercube_violation().is_none()
    }

    pub(crate) fn hypercube_violation(&self) -> Option<usize> {
        self.alphabets.iter().position(|a| {
            !(a.len() == 2 && a.contains(&T::one()) && a.contains(&(-T::one())))
        })
    }
}

/// A point of the product space, by value.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Configuration<T> {
    pub values: Vec<T>,
}

/// All configurations in lexicographic order.
pub fn enumerate<T: Real>(space: &ProductSpace<T>, cap: usize) -> Result<Vec<Configuration<T>>> {
    let count = space.checked_count(cap)?;
    Ok((0..count)
        .map(|idx| Configuration { values: space.values_of(&space.point_of(idx)) })
        .collect())
}

/// Log-weight of a Gibbs measure.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum Potential<T> {
    /// One log-weight per configuration, lexicographic order.
    Table { log_weights: Vec<T> },
    Ising(IsingSpec<T>),
    Ergm(ErgmSpec<T>),
}

impl<T: Real> Potential<T> {
    pub fn log_weight(&self, space: &ProductSpace<T>, point: &[usize]) -> T {
        match self {
            Potential::Table { log_weights } => log_weights[space.index_of(point)],
            Potential::Ising(spec) => spec.log_weight(&space.values_of(point)),
            Potential::Ergm(spec) => spec.log_weight(&space.values_of(point)),
        }
    }

    /// Log-weights of `point` with coordinate `i` set to each alphabet value,
    /// up to an additive constant.
    pub fn conditional_logits(&self, space: &ProductSpace<T>, point: &[usize], i: usize) -> Vec<T> {
        match self {
            Potential::Ising(spec) => {
                let values = space.values_of(point);
                let local = spec.local_field(&values, i);
                space.alphabet(i).iter().map(|&s| s * local).collect()
            }
            _ => {
                let mut p = point.to_vec();
                (0..space.size(i))
                    .map(|a| {
                        p[i] = a;
                        self.log_weight(space, &p)
                    })
                    .collect()
            }
        }
    }

    fn validate(&self, space: &ProductSpace<T>) -> Result<()> {
        match self {
            Potential::Table { log_weights } => {
                let count = space.checked_count(DEFAULT_CAP)?;
                if log_weights.len() != count {
                    return Err(Error::DimensionMismatch { expected: count, found: log_weights.len() });
                }
                if log_weights.iter().any(|w| !w.is_finite()) {
                    return Err(Error::InvalidMeasure("non-finite log-weight".into()));
                }
            }
            Potential::Ising(spec) => {
                spec.validate()?;
                if spec.n() != space.n() {
                    return Err(Error::DimensionMismatch { expected: space.n(), found: spec.n() });
                }
            }
            Potential::Ergm(spec) => {
                spec.validate()?;
                if spec.edge_count() != space.n() {
                    return Err(Error::DimensionMismatch {
                        expected: space.n(),
                        found: spec.edge_count(),
                    });
                }
            }
        }
        Ok(())
    }
}

/// Normalized softmax of log-weights.
pub(crate) fn softmax<T: Real>(logits: &[T]) -> Vec<T> {
    let m = logits.iter().copied().fold(T::neg_infinity(), T::max);
    let w: Vec<T> = logits.iter().map(|&l| (l - m).exp()).collect();
    let z: T = w.iter().copied().sum();
    w.into_iter().map(|x| x / z).collect()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum MeasureKind<T> {
    /// Probability of every configuration.
    Exact { table: Vec<T> },
    /// Per-coordinate probability tables.
    Product { marginals: Vec<Vec<T>> },
    Gibbs { potential: Potential<T> },
}

/// On-disk form of a measure.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct MeasureDoc<T> {
    pub n: usize,
    pub alphabets: Vec<Vec<T>>,
    pub measure: MeasureKind<T>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "MeasureDoc<T>", into = "MeasureDoc<T>")]
#[serde(bound(serialize = "T: Real", deserialize = "T: Real"))]
pub struct Measure<T: Real> {
    space: ProductSpace<T>,
    kind: MeasureKind<T>,
}

impl<T: Real> TryFrom<MeasureDoc<T>> for Measure<T> {
    type Error = Error;

    fn try_from(doc: MeasureDoc<T>) -> Result<Self> {
        if doc.n != doc.alphabets.len() {
            return Err(Error::DimensionMismatch { expected: doc.n, found: doc.alphabets.len() });
        }
        Measure::new(ProductSpace::new(doc.alphabets)?, doc.measure)
    }
}

impl<T: Real> From<Measure<T>> for MeasureDoc<T> {
    fn from(m: Measure<T>) -> Self {
        MeasureDoc { n: m.space.n(), alphabets: m.space.alphabets, measure: m.kind }
    }
}

fn table_tolerance<T: Real>() -> T {
    T::of(1e-12).max(T::of(1e3) * T::epsilon())
}

fn check_probabilities<T: Real>(p: &[T], what: &str) -> Result<()> {
    if p.iter().any(|&x| !(x >= T::zero()) || !x.is_finite()) {
        return Err(Error::InvalidMeasure(format!("{what} has a negative or non-finite entry")));
    }
    let total: T = p.iter().copied().sum();
    if (total - T::one()).abs() > table_tolerance::<T>() {
        return Err(Error::InvalidMeasure(format!("{what} sums to {total}, not 1")));
    }
    Ok(())
}

impl<T: Real> Measure<T> {
    pub fn new(space: ProductSpace<T>, kind: MeasureKind<T>) -> Result<Self> {
        match &kind {
            MeasureKind::Exact { table } => {
                let count = space.checked_count(DEFAULT_CAP)?;
                if table.len() != count {
                    return Err(Error::DimensionMismatch { expected: count, found: table.len() });
                }
                check_probabilities(table, "probability table")?;
            }
            MeasureKind::Product { marginals } => {
                if marginals.len() != space.n() {
                    return Err(Error::DimensionMismatch { expected: space.n(), found: marginals.len() });
                }
                for (i, m) in marginals.iter().enumerate() {
                    if m.len() != space.size(i) {
                        return Err(Error::DimensionMismatch { expected: space.size(i), found: m.len() });
                    }
                    check_probabilities(m, &format!("marginal {i}"))?;
                }
            }
            MeasureKind::Gibbs { potential } => potential.validate(&space)?,
        }
        Ok(Self { space, kind })
    }

    pub fn exact(space: ProductSpace<T>, table: Vec<T>) -> Result<Self> {
        Self::new(space, MeasureKind::Exact { table })
    }

    pub fn product(space: ProductSpace<T>, marginals: Vec<Vec<T>>) -> Result<Self> {
        Self::new(space, MeasureKind::Product { marginals })
    }

    pub fn gibbs(space: ProductSpace<T>, potential: Potential<T>) -> Result<Self> {
        Self::new(space, MeasureKind::Gibbs { potential })
    }

    /// Uniform product measure.
    pub fn uniform(space: ProductSpace<T>) -> Self {
        let marginals = space
            .alphabets()
            .iter()
            .map(|a| vec![T::one() / T::of_usize(a.len()); a.len()])
            .collect();
        Self { space, kind: MeasureKind::Product { marginals } }
    }

    /// Independent Rademacher signs.
    pub fn rademacher(n: usize) -> Self {
        Self::uniform(ProductSpace::hypercube(n))
    }

    pub fn space(&self) -> &ProductSpace<T> {
        &self.space
    }

    pub fn kind(&self) -> &MeasureKind<T> {
        &self.kind
    }

    pub fn n(&self) -> usize {
        self.space.n()
    }

    pub fn is_product(&self) -> bool {
        matches!(self.kind, MeasureKind::Product { .. })
    }

    /// Joint probability of every configuration.
    pub fn probabilities(&self, cap: usize) -> Result<Vec<T>> {
        let count = self.space.checked_count(cap)?;
        Ok(match &self.kind {
            MeasureKind::Exact { table } => table.clone(),
            MeasureKind::Product { marginals } => (0..count)
                .map(|idx| {
                    self.space
                        .point_of(idx)
                        .iter()
                        .zip(marginals)
                        .map(|(&p, m)| m[p])
                        .fold(T::one(), |a, b| a * b)
                })
                .collect(),
            MeasureKind::Gibbs { potential } => {
                let logits: Vec<T> = (0..count)
                    .map(|idx| potential.log_weight(&self.space, &self.space.point_of(idx)))
                    .collect();
                softmax(&logits)
            }
        })
    }

    /// Conditional law of coordinate `i` given the other coordinates of `point`.
    pub fn conditional(&self, point: &[usize], i: usize) -> Result<Vec<T>> {
        if i >= self.n() {
            return Err(Error::Domain(format!("coordinate {i} out of range")));
        }
        match &self.kind {
            MeasureKind::Product { marginals } => Ok(marginals[i].clone()),
            MeasureKind::Gibbs { potential } => {
                Ok(softmax(&potential.conditional_logits(&self.space, point, i)))
            }
            MeasureKind::Exact { table } => {
                let mut p = point.to_vec();
                let weights: Vec<T> = (0..self.space.size(i))
                    .map(|a| {
                        p[i] = a;
                        table[self.space.index_of(&p)]
                    })
                    .collect();
                normalize_section(weights, i)
            }
        }
    }

    /// Marginal law of coordinate `i`.
    pub fn marginal(&self, i: usize, cap: usize) -> Result<Vec<T>> {
        match &self.kind {
            MeasureKind::Product { marginals } => Ok(marginals[i].clone()),
            _ => {
                let probs = self.probabilities(cap)?;
                let mut m = vec![T::zero(); self.space.size(i)];
                for (idx, &p) in probs.iter().enumerate() {
                    m[self.space.point_of(idx)[i]] += p;
                }
                Ok(m)
            }
        }
    }

    /// Per-coordinate support: alphabet indices of positive marginal mass.
    /// Gibbs measures charge every declared value.
    pub fn supports(&self, cap: usize) -> Result<Vec<Vec<usize>>> {
        match &self.kind {
            MeasureKind::Gibbs { .. } => {
                Ok((0..self.n()).map(|i| (0..self.space.size(i)).collect()).collect())
            }
            _ => (0..self.n())
                .map(|i| {
                    let m = self.marginal(i, cap)?;
                    Ok(positive_indices(&m))
                })
                .collect(),
        }
    }

    /// Enumerates the measure into an [`ExactLaw`].
    pub fn law(&self, cap: usize) -> Result<ExactLaw<T>> {
        let probs = self.probabilities(cap)?;
        let supports = match &self.kind {
            MeasureKind::Product { marginals } => marginals.iter().map(|m| positive_indices(m)).collect(),
            MeasureKind::Gibbs { .. } => (0..self.n()).map(|i| (0..self.space.size(i)).collect()).collect(),
            MeasureKind::Exact { .. } => {
                let mut mass = self.space.alphabets().iter().map(|a| vec![T::zero(); a.len()]).collect::<Vec<_>>();
                for (idx, &p) in probs.iter().enumerate() {
                    for (i, &a) in self.space.point_of(idx).iter().enumerate() {
                        mass[i][a] += p;
                    }
                }
                mass.iter().map(|m| positive_indices(m)).collect()
            }
        };
        Ok(ExactLaw { measure: self.clone(), probs, supports })
    }

    /// One independent draw; `None` for Gibbs measures (use Glauber dynamics).
    pub fn sample_iid<R: Rng + ?Sized>(&self, rng: &mut R) -> Option<Vec<usize>> {
        match &self.kind {
            MeasureKind::Product { marginals } => {
                Some(marginals.iter().map(|m| sample_index(m, rng)).collect())
            }
            MeasureKind::Exact { table } => Some(self.space.point_of(sample_index(table, rng))),
            MeasureKind::Gibbs { .. } => None,
        }
    }
}

fn normalize_section<T: Real>(weights: Vec<T>, i: usize) -> Result<Vec<T>> {
    let z: T = weights.iter().copied().sum();
    if z <= T::zero() {
        return Err(Error::UndefinedConditional { coordinate: i });
    }
    Ok(weights.into_iter().map(|w| w / z).collect())
}

fn positive_indices<T: Real>(m: &[T]) -> Vec<usize> {
    m.iter()
        .enumerate()
        .filter(|(_, &p)| p > T::zero())
        .map(|(a, _)| a)
        .collect()
}

/// Inverse-CDF draw from a probability vector.
pub(crate) fn sample_index<T: Real, R: Rng + ?Sized>(probs: &[T], rng: &mut R) -> usize {
    let u: f64 = rng.random();
    let mut acc = 0.0;
    let mut last = 0;
    for (a, &p) in probs.iter().enumerate() {
        let p = p.to64();
        if p > 0.0 {
            last = a;
            acc += p;
            if u < acc {
                return a;
            }
        }
    }
    last
}

/// A measure enumerated over the whole space, with marginal supports.
#[derive(Clone, Debug)]
pub struct ExactLaw<T: Real> {
    measure: Measure<T>,
    probs: Vec<T>,
    supports: Vec<Vec<usize>>,
}

impl<T: Real> ExactLaw<T> {
    pub fn measure(&self) -> &Measure<T> {
        &self.measure
    }

    pub fn space(&self) -> &ProductSpace<T> {
        &self.measure.space
    }

    pub fn n(&self) -> usize {
        self.measure.n()
    }

    pub fn probs(&self) -> &[T] {
        &self.probs
    }

    pub fn len(&self) -> usize {
        self.probs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.probs.is_empty()
    }

    pub fn supports(&self) -> &[Vec<usize>] {
        &self.supports
    }

    /// Flat indices of configurations with positive mass.
    pub fn support_indices(&self) -> Vec<usize> {
        positive_indices(&self.probs)
    }

    pub fn expectation(&self, f: &[T]) -> T {
        self.probs
            .iter()
            .zip(f)
            .filter(|(&p, _)| p > T::zero())
            .map(|(&p, &v)| p * v)
            .sum()
    }

    /// Conditional law of coordinate `i` at the flat index `idx`.
    pub fn conditional_at(&self, idx: usize, i: usize) -> Result<Vec<T>> {
        match &self.measure.kind {
            MeasureKind::Product { marginals } => Ok(marginals[i].clone()),
            _ => {
                let space = self.space();
                let stride = space.strides()[i];
                let own = space.point_of(idx)[i];
                let base = idx - own * stride;
                let weights = (0..space.size(i)).map(|a| self.probs[base + a * stride]).collect();
                normalize_section(weights, i)
            }
        }
    }

    /// `E g log g - (E g) log(E g)`, with `0 log 0 = 0`.
    pub fn entropy(&self, g: &[T]) -> Result<T> {
        self.check_len(g)?;
        let mut mean = T::zero();
        let mut mlogm = T::zero();
        for (&p, &v) in self.probs.iter().zip(g) {
            if p > T::zero() {
                if v < T::zero() {
                    return Err(Error::Domain(format!("negative value {v} on the support")));
                }
                mean += p * v;
                mlogm += p * v.xlogx();
            }
        }
        Ok((mlogm - mean.xlogx()).max(T::zero()))
    }

    /// `(E |f - c E f|^p)^{1/p}` with `c = 1` when centered.
    pub fn lp_norm(&self, f: &[T], p: T, centered: bool) -> Result<T> {
        self.check_len(f)?;
        if !(p >= T::one()) {
            return Err(Error::Domain(format!("L^p norm needs p >= 1, got {p}")));
        }
        let shift = if centered { self.expectation(f) } else { T::zero() };
        // Scale by the maximum deviation for stability at large p.
        let dev: Vec<T> = f.iter().map(|&v| (v - shift).abs()).collect();
        let scale = self
            .probs
            .iter()
            .zip(&dev)
            .filter(|(&q, _)| q > T::zero())
            .map(|(_, &d)| d)
            .fold(T::zero(), T::max);
        if scale == T::zero() {
            return Ok(T::zero());
        }
        let moment: T = self
            .probs
            .iter()
            .zip(&dev)
            .filter(|(&q, _)| q > T::zero())
            .map(|(&q, &d)| q * (d / scale).powf(p))
            .sum();
        Ok(scale * moment.powf(T::one() / p))
    }

    fn check_len(&self, f: &[T]) -> Result<()> {
        if f.len() != self.probs.len() {
            return Err(Error::DimensionMismatch { expected: self.probs.len(), found: f.len() });
        }
        Ok(())
    }
}

/// Monte Carlo estimate with a delta-method standard error.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Estimate<T> {
    pub value: T,
    pub std_error: T,
}

/// L^p norm from i.i.d. draws of `f(X)`.
pub fn lp_norm_mc<T: Real>(draws: &[T], p: T, centered: bool) -> Result<Estimate<T>> {
    if !(p >= T::one()) {
        return Err(Error::Domain(format!("L^p norm needs p >= 1, got {p}")));
    }
    if draws.is_empty() {
        return Err(Error::Degenerate("no samples".into()));
    }
    let m = T::of_usize(draws.len());
    let shift = if centered { draws.iter().copied().sum::<T>() / m } else { T::zero() };
    let powers: Vec<T> = draws.iter().map(|&v| (v - shift).abs().powf(p)).collect();
    let mean = powers.iter().copied().sum::<T>() / m;
    let var = powers.iter().map(|&x| (x - mean) * (x - mean)).sum::<T>() / m;
    let se_moment = (var / m).sqrt();
    let value = mean.powf(T::one() / p);
    let std_error = if mean > T::zero() {
        se_moment * value / (p * mean)
    } else {
        T::zero()
    };
    Ok(Estimate { value, std_error })
}
