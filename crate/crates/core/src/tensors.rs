//! Dense tensors and their norms: Hilbert–Schmidt, operator (spectral) norm
//! and the partition norms interpolating between the two.
//!
//! Operator norms of order three and higher are computed by alternating
//! maximization: with all but one vector fixed, the optimal remaining vector is
//! the normalized contraction of the tensor against the others. Every returned
//! value is attained by the returned unit vectors, so it is a certified lower
//! bound on the true norm.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::{euclid, Real};

/// Row-major dense tensor with an arbitrary shape.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DenseTensor<T> {
    shape: Vec<usize>,
    data: Vec<T>,
}

impl<T: Real> DenseTensor<T> {
    pub fn new(shape: Vec<usize>, data: Vec<T>) -> Result<Self> {
        let size: usize = shape.iter().product();
        if size != data.len() {
            return Err(Error::DimensionMismatch { expected: size, found: data.len() });
        }
        if data.iter().any(|x| !x.is_finite()) {
            return Err(Error::Domain("tensor has non-finite entries".into()));
        }
        Ok(Self { shape, data })
    }

    pub fn zeros(shape: Vec<usize>) -> Self {
        let size = shape.iter().product();
        Self { shape, data: vec![T::zero(); size] }
    }

    /// Order-`order` tensor with `n` entries per axis.
    pub fn cubic(order: usize, n: usize) -> Self {
        Self::zeros(vec![n; order])
    }

    pub fn from_fn(shape: Vec<usize>, mut f: impl FnMut(&[usize]) -> T) -> Self {
        let mut t = Self::zeros(shape);
        let mut idx = vec![0; t.order()];
        for k in 0..t.data.len() {
            t.unravel_into(k, &mut idx);
            t.data[k] = f(&idx);
        }
        t
    }

    pub fn from_matrix(rows: &[Vec<T>]) -> Result<Self> {
        let m = rows.len();
        let n = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != n) {
            return Err(Error::Domain("ragged matrix".into()));
        }
        Self::new(vec![m, n], rows.iter().flatten().copied().collect())
    }

    pub fn order(&self) -> usize {
        self.shape.len()
    }

    pub fn shape(&self) -> &[usize] {
        &self.shape
    }

    pub fn data(&self) -> &[T] {
        &self.data
    }

    pub fn data_mut(&mut self) -> &mut [T] {
        &mut self.data
    }

    pub fn len(&self) -> usize {
        self.data.len()
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    pub fn offset(&self, idx: &[usize]) -> usize {
        idx.iter().zip(&self.shape).fold(0, |acc, (&i, &s)| acc * s + i)
    }

    pub(crate) fn unravel_into(&self, mut k: usize, idx: &mut [usize]) {
        for a in (0..self.order()).rev() {
            idx[a] = k % self.shape[a];
            k /= self.shape[a];
        }
    }

    pub fn get(&self, idx: &[usize]) -> T {
        self.data[self.offset(idx)]
    }

    pub fn set(&mut self, idx: &[usize], v: T) {
        let o = self.offset(idx);
        self.data[o] = v;
    }

    pub fn map(&self, f: impl Fn(T) -> T) -> Self {
        Self { shape: self.shape.clone(), data: self.data.iter().map(|&x| f(x)).collect() }
    }

    pub fn abs(&self) -> Self {
        self.map(T::abs)
    }

    pub fn scale(&self, c: T) -> Self {
        self.map(|x| x * c)
    }

    pub fn is_nonnegative(&self) -> bool {
        self.data.iter().all(|&x| x >= T::zero())
    }

    /// Invariant under every permutation of the axes (cubic tensors only).
    pub fn is_symmetric(&self, tol: T) -> bool {
        let d = self.order();
        if self.shape.windows(2).any(|w| w[0] != w[1]) {
            return false;
        }
        let mut idx = vec![0; d];
        for k in 0..self.data.len() {
            self.unravel_into(k, &mut idx);
            for a in 0..d.saturating_sub(1) {
                let mut swapped = idx.clone();
                swapped.swap(a, a + 1);
                if (self.data[k] - self.get(&swapped)).abs() > tol {
                    return false;
                }
            }
        }
        true
    }

    /// True if every entry with a repeated index vanishes.
    pub fn vanishes_on_diagonal(&self) -> bool {
        let mut idx = vec![0; self.order()];
        (0..self.data.len()).all(|k| {
            self.unravel_into(k, &mut idx);
            !has_repeat(&idx) || self.data[k] == T::zero()
        })
    }

    /// Contracts every axis except `skip` against the given vectors.
    pub fn contract_except(&self, vectors: &[Vec<T>], skip: usize) -> Vec<T> {
        let mut out = vec![T::zero(); self.shape[skip]];
        let mut idx = vec![0; self.order()];
        for (k, &a) in self.data.iter().enumerate() {
            if a == T::zero() {
                continue;
            }
            self.unravel_into(k, &mut idx);
            let mut w = a;
            for (axis, v) in vectors.iter().enumerate() {
                if axis != skip {
                    w *= v[idx[axis]];
                }
            }
            out[idx[skip]] += w;
        }
        out
    }

    /// `<v^1 ⊗ ... ⊗ v^d, A>`.
    pub fn contract_all(&self, vectors: &[Vec<T>]) -> T {
        let partial = self.contract_except(vectors, 0);
        partial.iter().zip(&vectors[0]).map(|(&a, &b)| a * b).sum()
    }

    /// Reorders the axes: axis `a` of the result is axis `perm[a]` of `self`.
    pub fn permute_axes(&self, perm: &[usize]) -> Self {
        let shape: Vec<usize> = perm.iter().map(|&a| self.shape[a]).collect();
        let mut src = vec![0; self.order()];
        Self::from_fn(shape, |idx| {
            for (a, &p) in perm.iter().enumerate() {
                src[p] = idx[a];
            }
            self.get(&src)
        })
    }

    /// Same data, new shape with equal total size.
    pub fn reshape(&self, shape: Vec<usize>) -> Result<Self> {
        Self::new(shape, self.data.clone())
    }
}

pub(crate) fn has_repeat(idx: &[usize]) -> bool {
    idx.iter().enumerate().any(|(a, x)| idx[..a].contains(x))
}

pub fn hs_norm<T: Real>(a: &DenseTensor<T>) -> T {
    euclid(a.data())
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct OpNormOptions {
    pub restarts: usize,
    pub tol: f64,
    pub max_iter: usize,
    pub seed: u64,
}

impl Default for OpNormOptions {
    fn default() -> Self {
        Self { restarts: 32, tol: 1e-10, max_iter: 10_000, seed: 0x5eed }
    }
}

impl OpNormOptions {
    /// Fewer restarts, for repeated evaluation on nonnegative difference tensors.
    pub fn fast() -> Self {
        Self { restarts: 4, ..Self::default() }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct OpNormResult<T> {
    pub value: T,
    /// Unit maximizers, one per axis.
    pub vectors: Vec<Vec<T>>,
    /// False when no start reached the tolerance within the iteration cap;
    /// the value is then the best found so far.
    pub converged: bool,
}

fn normalized<T: Real>(mut v: Vec<T>) -> (Vec<T>, T) {
    let len = euclid(&v);
    if len > T::zero() {
        v.iter_mut().for_each(|x| *x /= len);
    }
    (v, len)
}

fn unit_basis<T: Real>(n: usize) -> Vec<T> {
    let mut v = vec![T::zero(); n];
    if n > 0 {
        v[0] = T::one();
    }
    v
}

/// Operator norm `sup <v^1 ⊗ ... ⊗ v^d, A>` over unit vectors.
pub fn op_norm<T: Real>(a: &DenseTensor<T>, opts: &OpNormOptions) -> Result<OpNormResult<T>> {
    if opts.restarts == 0 {
        return Err(Error::Domain("op_norm needs at least one restart".into()));
    }
    match a.order() {
        0 => {
            let value = a.data().first().copied().unwrap_or_else(T::zero).abs();
            return Ok(OpNormResult { value, vectors: vec![], converged: true });
        }
        1 => {
            let (v, len) = normalized(a.data().to_vec());
            let v = if len > T::zero() { v } else { unit_basis(a.shape()[0]) };
            return Ok(OpNormResult { value: len, vectors: vec![v], converged: true });
        }
        _ => {}
    }
    if a.data().iter().all(|&x| x == T::zero()) {
        let vectors = a.shape().iter().map(|&n| unit_basis(n)).collect();
        return Ok(OpNormResult { value: T::zero(), vectors, converged: true });
    }

    let nonneg = a.is_nonnegative();
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let mut best: Option<OpNormResult<T>> = None;
    let mut any_converged = false;

    for start in 0..opts.restarts {
        let init: Vec<Vec<T>> = if start == 0 && nonneg {
            a.shape()
                .iter()
                .map(|&n| vec![T::one() / T::of_usize(n).sqrt(); n])
                .collect()
        } else if start == 0 {
            slice_start(a)
        } else {
            a.shape()
                .iter()
                .map(|&n| {
                    let v: Vec<T> = (0..n)
                        .map(|_| {
                            let g: f64 = StandardNormal.sample(&mut rng);
                            T::of(g)
                        })
                        .collect();
                    normalized(v).0
                })
                .collect()
        };
        let (vectors, value, converged) = alternate(a, init, opts);
        any_converged |= converged;
        if best.as_ref().is_none_or(|b| value > b.value) {
            best = Some(OpNormResult { value, vectors, converged });
        }
    }

    let mut best = best.expect("at least one restart");
    if nonneg {
        // Entrywise absolute values never decrease the contraction of a
        // nonnegative tensor.
        let vectors: Vec<Vec<T>> = best.vectors.iter().map(|v| v.iter().map(|x| x.abs()).collect()).collect();
        let value = a.contract_all(&vectors);
        if value >= best.value {
            best.value = value;
        }
        best.vectors = vectors;
    }
    best.converged = any_converged;
    Ok(best)
}

/// Deterministic start: for each axis the normalized row of largest norm
/// of the corresponding unfolding.
fn slice_start<T: Real>(a: &DenseTensor<T>) -> Vec<Vec<T>> {
    let d = a.order();
    let mut vectors: Vec<Vec<T>> = a.shape().iter().map(|&n| vec![T::zero(); n]).collect();
    let max_at = a
        .data()
        .iter()
        .enumerate()
        .max_by(|x, y| x.1.abs().partial_cmp(&y.1.abs()).unwrap())
        .map(|(k, _)| k)
        .unwrap_or(0);
    let mut idx = vec![0; d];
    a.unravel_into(max_at, &mut idx);
    for (axis, v) in vectors.iter_mut().enumerate() {
        v[idx[axis]] = T::one();
    }
    vectors
}

fn alternate<T: Real>(a: &DenseTensor<T>, mut vectors: Vec<Vec<T>>, opts: &OpNormOptions) -> (Vec<Vec<T>>, T, bool) {
    let d = a.order();
    let tol = T::of(opts.tol).max(T::of(8.0) * T::epsilon());
    let mut value = a.contract_all(&vectors);
    for _ in 0..opts.max_iter {
        let mut len = T::zero();
        for axis in 0..d {
            let (v, l) = normalized(a.contract_except(&vectors, axis));
            if l == T::zero() {
                // Degenerate start: every contraction vanishes.
                return (vectors, value.max(T::zero()), true);
            }
            vectors[axis] = v;
            len = l;
        }
        let improvement = len - value;
        value = len;
        if improvement.abs() <= tol * value.max(T::one()) {
            return (vectors, value, true);
        }
    }
    (vectors, value, false)
}

/// Set partition of `{0, .., d-1}`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Partition {
    pub blocks: Vec<Vec<usize>>,
}

impl Partition {
    pub fn new(mut blocks: Vec<Vec<usize>>, d: usize) -> Result<Self> {
        let mut seen = vec![false; d];
        for b in &blocks {
            if b.is_empty() {
                return Err(Error::Domain("empty partition block".into()));
            }
            for &x in b {
                if x >= d || seen[x] {
                    return Err(Error::Domain(format!("element {x} repeated or out of range")));
                }
                seen[x] = true;
            }
        }
        if seen.iter().any(|s| !s) {
            return Err(Error::Domain("blocks do not cover every axis".into()));
        }
        for b in &mut blocks {
            b.sort_unstable();
        }
        blocks.sort();
        Ok(Self { blocks })
    }

    pub fn singletons(d: usize) -> Self {
        Self { blocks: (0..d).map(|i| vec![i]).collect() }
    }

    pub fn whole(d: usize) -> Self {
        Self { blocks: vec![(0..d).collect()] }
    }

    pub fn len(&self) -> usize {
        self.blocks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.blocks.is_empty()
    }

    pub fn order(&self) -> usize {
        self.blocks.iter().map(Vec::len).sum()
    }
}

/// Every set partition of `{0, .., d-1}`, via restricted growth strings.
pub fn enumerate_partitions(d: usize) -> Result<Vec<Partition>> {
    const MAX: usize = 6;
    if d > MAX {
        return Err(Error::OrderTooLarge { k: d, max: MAX });
    }
    if d == 0 {
        return Ok(vec![Partition { blocks: vec![] }]);
    }
    let mut out = Vec::new();
    let mut rgs = vec![0usize; d];
    loop {
        let nblocks = rgs.iter().max().unwrap() + 1;
        let mut blocks = vec![Vec::new(); nblocks];
        for (i, &b) in rgs.iter().enumerate() {
            blocks[b].push(i);
        }
        out.push(Partition { blocks });
        // next restricted growth string
        let mut i = d - 1;
        loop {
            if i == 0 {
                return Ok(out);
            }
            let prefix_max = rgs[..i].iter().copied().max().unwrap();
            if rgs[i] <= prefix_max {
                rgs[i] += 1;
                for x in &mut rgs[i + 1..] {
                    *x = 0;
                }
                break;
            }
            i -= 1;
        }
    }
}

/// Partition norm: supremum of the contraction against one unit vector per
/// block of `partition`, each living on the flattened block axes.
pub fn partition_norm<T: Real>(a: &DenseTensor<T>, partition: &Partition, opts: &OpNormOptions) -> Result<T> {
    if partition.order() != a.order() {
        return Err(Error::DimensionMismatch { expected: a.order(), found: partition.order() });
    }
    Partition::new(partition.blocks.clone(), a.order())?;
    let perm: Vec<usize> = partition.blocks.iter().flatten().copied().collect();
    let permuted = a.permute_axes(&perm);
    let shape: Vec<usize> = partition
        .blocks
        .iter()
        .map(|b| b.iter().map(|&axis| a.shape()[axis]).product())
        .collect();
    let flat = permuted.reshape(shape)?;
    Ok(op_norm(&flat, opts)?.value)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn opts() -> OpNormOptions {
        OpNormOptions::default()
    }

    #[test]
    fn hs_examples() {
        let id = DenseTensor::from_matrix(&[vec![1.0f64, 0.0], vec![0.0, 1.0]]).unwrap();
        assert_abs_diff_eq!(hs_norm(&id), 2f64.sqrt(), epsilon = 1e-15);
        assert_eq!(hs_norm(&DenseTensor::<f64>::cubic(3, 2)), 0.0);
        let ones = DenseTensor::from_fn(vec![2, 2, 2], |_| 1.0f64);
        assert_abs_diff_eq!(hs_norm(&ones), 8f64.sqrt(), epsilon = 1e-15);
    }

    #[test]
    fn op_examples() {
        let id = DenseTensor::from_matrix(&[vec![1.0f64, 0.0], vec![0.0, 1.0]]).unwrap();
        assert_abs_diff_eq!(op_norm(&id, &opts()).unwrap().value, 1.0, epsilon = 1e-10);
        let swap = DenseTensor::from_matrix(&[vec![0.0f64, 1.0], vec![1.0, 0.0]]).unwrap();
        assert_abs_diff_eq!(op_norm(&swap, &opts()).unwrap().value, 1.0, epsilon = 1e-10);
        let (u, v, w) = ([1.0f64, 2.0], [0.5, -1.0, 3.0], [2.0, 2.0]);
        let r1 = DenseTensor::from_fn(vec![2, 3, 2], |i| u[i[0]] * v[i[1]] * w[i[2]]);
        let expect = euclid(&u) * euclid(&v) * euclid(&w);
        assert_abs_diff_eq!(op_norm(&r1, &opts()).unwrap().value, expect, epsilon = 1e-9);
    }

    #[test]
    fn op_norm_rejects_zero_restarts() {
        let id = DenseTensor::from_matrix(&[vec![1.0f64]]).unwrap();
        let o = OpNormOptions { restarts: 0, ..opts() };
        assert!(op_norm(&id, &o).is_err());
    }

    #[test]
    fn nonnegative_maximizers_are_nonnegative() {
        let a = DenseTensor::from_fn(vec![3, 3, 3], |i| ((i[0] + 2 * i[1] + i[2]) % 4) as f64);
        let r = op_norm(&a, &opts()).unwrap();
        assert!(r.vectors.iter().flatten().all(|&x| x >= 0.0));
        assert_abs_diff_eq!(a.contract_all(&r.vectors), r.value, epsilon = 1e-12);
    }

    #[test]
    fn partition_counts_are_bell_numbers() {
        let counts: Vec<usize> = (1..=6).map(|d| enumerate_partitions(d).unwrap().len()).collect();
        assert_eq!(counts, vec![1, 2, 5, 15, 52, 203]);
        assert!(enumerate_partitions(7).is_err());
        let p3 = enumerate_partitions(3).unwrap();
        for (i, p) in p3.iter().enumerate() {
            assert!(Partition::new(p.blocks.clone(), 3).is_ok());
            assert!(!p3[..i].contains(p));
        }
    }

    #[test]
    fn partition_norm_extremes() {
        let a = DenseTensor::from_fn(vec![3, 3, 3], |i| (i[0] as f64 - 1.0) * (i[1] as f64 + 0.5) - i[2] as f64 * 0.3);
        let hs = partition_norm(&a, &Partition::whole(3), &opts()).unwrap();
        assert_abs_diff_eq!(hs, hs_norm(&a), epsilon = 1e-12);
        let op = partition_norm(&a, &Partition::singletons(3), &opts()).unwrap();
        assert_abs_diff_eq!(op, op_norm(&a, &opts()).unwrap().value, epsilon = 1e-12);
    }

    #[test]
    fn invalid_partitions_rejected() {
        assert!(Partition::new(vec![vec![0], vec![0, 1]], 2).is_err());
        assert!(Partition::new(vec![vec![0]], 2).is_err());
        let a = DenseTensor::<f64>::cubic(2, 2);
        assert!(partition_norm(&a, &Partition::singletons(3), &opts()).is_err());
    }

    #[test]
    fn symmetry_and_diagonal_checks() {
        let a = DenseTensor::from_fn(vec![3, 3], |i| if i[0] == i[1] { 0.0 } else { (i[0] + i[1]) as f64 });
        assert!(a.is_symmetric(0.0));
        assert!(a.vanishes_on_diagonal());
        let b = DenseTensor::from_fn(vec![2, 2], |i| i[0] as f64);
        assert!(!b.is_symmetric(0.0));
    }

    #[test]
    fn works_in_f32() {
        let id = DenseTensor::from_matrix(&[vec![3.0f32, 0.0], vec![0.0, 1.0]]).unwrap();
        assert!((op_norm(&id, &opts()).unwrap().value - 3.0).abs() < 1e-5);
    }
}
