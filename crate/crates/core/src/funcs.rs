//! Evaluable functions of a configuration, Fourier–Walsh analysis on the
//! hypercube and formal derivative tensors of multilinear polynomials.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::{euclid, Real};
use crate::space::{ExactLaw, ProductSpace};
use crate::tensors::{has_repeat, op_norm, DenseTensor, OpNormOptions};

/// How the U-statistic sums over index tuples.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Summation {
    /// Ordered tuples of distinct indices.
    #[default]
    Ordered,
    /// Increasing tuples `i_1 < ... < i_d`.
    Unordered,
}

/// Norm on the coefficient space of a vector-valued chaos.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum VectorNorm {
    L2,
    Linf,
}

impl VectorNorm {
    pub fn apply<T: Real>(self, v: &[T]) -> T {
        match self {
            VectorNorm::L2 => euclid(v),
            VectorNorm::Linf => v.iter().fold(T::zero(), |m, x| m.max(x.abs())),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ChaosTerm<T> {
    /// A set of `order` distinct coordinates.
    pub subset: Vec<usize>,
    pub coefficient: Vec<T>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum FunctionSpec<T> {
    /// One value per configuration, lexicographic order.
    Table { values: Vec<T> },
    /// `sum_k sum_{distinct i} a^k_{i_1..i_k} x_{i_1} ... x_{i_k}`; the
    /// `k`-th entry of `coefficients` is the symmetric order-`k` tensor.
    Poly { coefficients: Vec<DenseTensor<T>> },
    /// `x^T A x` for symmetric `A` with zero diagonal.
    Quadform { matrix: Vec<Vec<T>> },
    /// `sum h(x_{i_1}, .., x_{i_d})` over distinct index tuples; `kernel` is
    /// indexed by positions in `alphabet`, lexicographically.
    Ustat {
        order: usize,
        alphabet: Vec<T>,
        kernel: Vec<T>,
        #[serde(default)]
        summation: Summation,
    },
    /// `max_j |f_j(x)|`.
    Sup { family: Vec<FunctionSpec<T>> },
    /// `|| sum_I x_I t_I ||` over `order`-subsets `I`.
    Chaos { order: usize, terms: Vec<ChaosTerm<T>>, norm: VectorNorm },
}

fn invalid<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::InvalidFunction(msg.into()))
}

impl<T: Real> FunctionSpec<T> {
    pub fn table(values: Vec<T>) -> Self {
        FunctionSpec::Table { values }
    }

    /// Tabulates an arbitrary closure of the configuration values.
    pub fn from_fn(space: &ProductSpace<T>, cap: usize, f: impl Fn(&[T]) -> T) -> Result<Self> {
        let count = space.checked_count(cap)?;
        Ok(FunctionSpec::Table {
            values: (0..count).map(|idx| f(&space.values_of(&space.point_of(idx)))).collect(),
        })
    }

    /// Sum of the coordinates.
    pub fn sum(n: usize) -> Self {
        let a = DenseTensor::from_fn(vec![n], |_| T::one());
        FunctionSpec::Poly { coefficients: vec![a] }
    }

    pub fn validate(&self, space: &ProductSpace<T>) -> Result<()> {
        let n = space.n();
        match self {
            FunctionSpec::Table { values } => {
                let count = space.checked_count(usize::MAX)?;
                if values.len() != count {
                    return Err(Error::DimensionMismatch { expected: count, found: values.len() });
                }
            }
            FunctionSpec::Poly { coefficients } => {
                for (k0, a) in coefficients.iter().enumerate() {
                    let k = k0 + 1;
                    if a.order() != k || a.shape().iter().any(|&s| s != n) {
                        return invalid(format!("coefficient {k} must be an order-{k} tensor over {n} coordinates"));
                    }
                    if !a.is_symmetric(T::of(1e-12)) {
                        return invalid(format!("coefficient tensor of order {k} is not symmetric"));
                    }
                    if !a.vanishes_on_diagonal() {
                        return invalid(format!("coefficient tensor of order {k} is nonzero on the diagonal"));
                    }
                }
            }
            FunctionSpec::Quadform { matrix } => {
                if matrix.len() != n || matrix.iter().any(|r| r.len() != n) {
                    return Err(Error::DimensionMismatch { expected: n, found: matrix.len() });
                }
                for i in 0..n {
                    if matrix[i][i] != T::zero() {
                        return invalid("quadratic form has a nonzero diagonal");
                    }
                    for j in 0..i {
                        if (matrix[i][j] - matrix[j][i]).abs() > T::of(1e-12) {
                            return invalid("quadratic form is not symmetric");
                        }
                    }
                }
            }
            FunctionSpec::Ustat { order, alphabet, kernel, .. } => {
                let d = *order;
                if d == 0 || d > n {
                    return invalid(format!("U-statistic order {d} must lie in 1..={n}"));
                }
                let m = alphabet.len();
                if kernel.len() != m.pow(d as u32) {
                    return Err(Error::DimensionMismatch { expected: m.pow(d as u32), found: kernel.len() });
                }
                for i in 0..n {
                    if space.alphabet(i).iter().any(|v| !alphabet.contains(v)) {
                        return invalid(format!("coordinate {i} takes values outside the kernel alphabet"));
                    }
                }
                let k = DenseTensor::new(vec![m; d], kernel.clone())?;
                if !k.is_symmetric(T::of(1e-12)) {
                    return invalid("U-statistic kernel is not symmetric");
                }
            }
            FunctionSpec::Sup { family } => {
                if family.is_empty() {
                    return invalid("empty supremum family");
                }
                for f in family {
                    f.validate(space)?;
                }
            }
            FunctionSpec::Chaos { order, terms, .. } => {
                let dim = terms.first().map_or(0, |t| t.coefficient.len());
                for t in terms {
                    if t.subset.len() != *order || has_repeat(&t.subset) || t.subset.iter().any(|&i| i >= n) {
                        return invalid(format!("chaos subset {:?} is not an {order}-subset of the coordinates", t.subset));
                    }
                    if t.coefficient.len() != dim {
                        return Err(Error::DimensionMismatch { expected: dim, found: t.coefficient.len() });
                    }
                }
            }
        }
        Ok(())
    }

    /// Value at a configuration given by values.
    pub fn evaluate(&self, space: &ProductSpace<T>, values: &[T]) -> Result<T> {
        if values.len() != space.n() {
            return Err(Error::DimensionMismatch { expected: space.n(), found: values.len() });
        }
        match self {
            FunctionSpec::Table { values: table } => {
                let point = space.locate(values)?;
                table
                    .get(space.index_of(&point))
                    .copied()
                    .ok_or(Error::DimensionMismatch { expected: space.index_of(&point) + 1, found: table.len() })
            }
            FunctionSpec::Sup { family } => family
                .iter()
                .map(|f| f.evaluate(space, values).map(T::abs))
                .try_fold(T::zero(), |m, v| v.map(|v| m.max(v))),
            _ => self.evaluate_values(values),
        }
    }

    /// Value at a point (alphabet indices). Assumes a validated spec.
    pub fn eval_point(&self, space: &ProductSpace<T>, point: &[usize]) -> T {
        match self {
            FunctionSpec::Table { values } => values[space.index_of(point)],
            FunctionSpec::Sup { family } => family
                .iter()
                .map(|f| f.eval_point(space, point).abs())
                .fold(T::zero(), T::max),
            _ => self
                .evaluate_values(&space.values_of(point))
                .expect("validated function spec"),
        }
    }

    fn evaluate_values(&self, x: &[T]) -> Result<T> {
        Ok(match self {
            FunctionSpec::Poly { coefficients } => coefficients.iter().map(|a| multilinear_form(a, x)).sum(),
            FunctionSpec::Quadform { matrix } => {
                let mut s = T::zero();
                for (i, row) in matrix.iter().enumerate() {
                    for (j, &a) in row.iter().enumerate() {
                        s += a * x[i] * x[j];
                    }
                }
                s
            }
            FunctionSpec::Ustat { order, alphabet, kernel, summation } => {
                let pos: Vec<usize> = x
                    .iter()
                    .map(|v| alphabet.iter().position(|a| a == v))
                    .collect::<Option<_>>()
                    .ok_or_else(|| Error::Domain("value outside the kernel alphabet".into()))?;
                ustat_value(*order, alphabet.len(), kernel, *summation, &pos)
            }
            FunctionSpec::Chaos { terms, norm, .. } => {
                let dim = terms.first().map_or(0, |t| t.coefficient.len());
                let mut acc = vec![T::zero(); dim];
                for t in terms {
                    let xi: T = t.subset.iter().map(|&i| x[i]).fold(T::one(), |a, b| a * b);
                    for (a, &c) in acc.iter_mut().zip(&t.coefficient) {
                        *a += xi * c;
                    }
                }
                norm.apply(&acc)
            }
            FunctionSpec::Table { .. } | FunctionSpec::Sup { .. } => {
                return Err(Error::InvalidFunction("needs the product space".into()))
            }
        })
    }

    /// Values over every configuration, lexicographic order.
    pub fn tabulate(&self, space: &ProductSpace<T>, cap: usize) -> Result<Vec<T>> {
        let count = space.checked_count(cap)?;
        self.validate(space)?;
        if let FunctionSpec::Table { values } = self {
            return Ok(values.clone());
        }
        Ok((0..count).map(|idx| self.eval_point(space, &space.point_of(idx))).collect())
    }

    /// `max |h|` of a U-statistic kernel.
    pub fn ustat_bound(&self) -> Option<T> {
        match self {
            FunctionSpec::Ustat { kernel, .. } => Some(kernel.iter().fold(T::zero(), |m, h| m.max(h.abs()))),
            _ => None,
        }
    }

    /// This function as multilinear coefficient tensors, when it is polynomial.
    pub fn as_poly(&self, n: usize) -> Option<Vec<DenseTensor<T>>> {
        match self {
            FunctionSpec::Poly { coefficients } => Some(coefficients.clone()),
            FunctionSpec::Quadform { matrix } => {
                let a2 = DenseTensor::from_fn(vec![n, n], |i| matrix[i[0]][i[1]]);
                Some(vec![DenseTensor::cubic(1, n), a2])
            }
            _ => None,
        }
    }
}

fn multilinear_form<T: Real>(a: &DenseTensor<T>, x: &[T]) -> T {
    let mut idx = vec![0; a.order()];
    let mut s = T::zero();
    for (k, &c) in a.data().iter().enumerate() {
        if c == T::zero() {
            continue;
        }
        a.unravel_into(k, &mut idx);
        s += idx.iter().fold(c, |acc, &i| acc * x[i]);
    }
    s
}

fn ustat_value<T: Real>(d: usize, m: usize, kernel: &[T], summation: Summation, pos: &[usize]) -> T {
    let n = pos.len();
    let mut tuple = vec![0usize; d];
    let mut total = T::zero();
    // odometer over [n]^d, keeping distinct (or increasing) tuples
    loop {
        let keep = match summation {
            Summation::Ordered => !has_repeat(&tuple),
            Summation::Unordered => tuple.windows(2).all(|w| w[0] < w[1]),
        };
        if keep {
            let offset = tuple.iter().fold(0, |acc, &i| acc * m + pos[i]);
            total += kernel[offset];
        }
        let mut a = d;
        loop {
            if a == 0 {
                return total;
            }
            a -= 1;
            tuple[a] += 1;
            if tuple[a] < n {
                break;
            }
            tuple[a] = 0;
        }
    }
}

/// Fourier–Walsh coefficients of a function on `{-1, +1}^n`.
///
/// Coefficients are indexed by bit masks: bit `i` of the mask is set when
/// coordinate `i` belongs to the subset.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FourierSpectrum<T> {
    pub n: usize,
    pub coefficients: Vec<T>,
    /// `weights[j]` is the squared Fourier mass at level `j`.
    pub weights: Vec<T>,
}

impl<T: Real> FourierSpectrum<T> {
    pub fn coefficient(&self, subset: &[usize]) -> T {
        self.coefficients[subset.iter().fold(0usize, |m, &i| m | (1 << i))]
    }

    pub fn weight(&self, j: usize) -> T {
        self.weights.get(j).copied().unwrap_or_else(T::zero)
    }

    /// Largest level carrying nonzero weight (above `tol`).
    pub fn degree(&self, tol: T) -> usize {
        self.weights.iter().rposition(|&w| w > tol).unwrap_or(0)
    }

    /// Function values back in the lexicographic order of `space`.
    pub fn reconstruct(&self, space: &ProductSpace<T>) -> Vec<T> {
        let mut g = self.coefficients.clone();
        walsh_hadamard(&mut g);
        (0..g.len())
            .map(|idx| g[minus_mask(space, &space.point_of(idx))])
            .collect()
    }
}

fn minus_mask<T: Real>(space: &ProductSpace<T>, point: &[usize]) -> usize {
    point
        .iter()
        .enumerate()
        .filter(|(i, &p)| space.alphabet(*i)[p] < T::zero())
        .fold(0, |m, (i, _)| m | (1 << i))
}

/// In-place unnormalized Walsh–Hadamard transform.
fn walsh_hadamard<T: Real>(v: &mut [T]) {
    let mut h = 1;
    while h < v.len() {
        for block in (0..v.len()).step_by(2 * h) {
            for k in block..block + h {
                let (a, b) = (v[k], v[k + h]);
                v[k] = a + b;
                v[k + h] = a - b;
            }
        }
        h *= 2;
    }
}

/// `f_S = 2^{-n} sum_x f(x) x_S` for every subset `S`.
pub fn fourier_transform<T: Real>(space: &ProductSpace<T>, table: &[T]) -> Result<FourierSpectrum<T>> {
    const MAX_N: usize = 20;
    let n = space.n();
    if n > MAX_N {
        return Err(Error::OrderTooLarge { k: n, max: MAX_N });
    }
    if let Some(i) = space.hypercube_violation() {
        return Err(Error::NotHypercube(i));
    }
    let size = 1usize << n;
    if table.len() != size {
        return Err(Error::DimensionMismatch { expected: size, found: table.len() });
    }
    let mut g = vec![T::zero(); size];
    for (idx, &v) in table.iter().enumerate() {
        g[minus_mask(space, &space.point_of(idx))] = v;
    }
    walsh_hadamard(&mut g);
    let scale = T::one() / T::of_usize(size);
    g.iter_mut().for_each(|c| *c *= scale);
    let mut weights = vec![T::zero(); n + 1];
    for (mask, &c) in g.iter().enumerate() {
        weights[mask.count_ones() as usize] += c * c;
    }
    Ok(FourierSpectrum { n, coefficients: g, weights })
}

/// Order-`k` derivative tensor of a multilinear polynomial, pointwise and in
/// expectation.
#[derive(Clone, Debug)]
pub struct GradientTensor<T> {
    pub order: usize,
    pub expected: DenseTensor<T>,
    coefficients: Vec<DenseTensor<T>>,
    n: usize,
}

impl<T: Real> GradientTensor<T> {
    /// `∇^{(k)} f(x)`.
    pub fn at(&self, x: &[T]) -> DenseTensor<T> {
        gradient_at(&self.coefficients, self.n, self.order, x)
    }
}

fn falling(m: usize, k: usize) -> usize {
    (m - k + 1..=m).product()
}

fn gradient_at<T: Real>(coefficients: &[DenseTensor<T>], n: usize, k: usize, x: &[T]) -> DenseTensor<T> {
    let mut out = DenseTensor::cubic(k, n);
    for (m0, a) in coefficients.iter().enumerate() {
        let m = m0 + 1;
        if m < k {
            continue;
        }
        // each ordered (J, R) split of a symmetric coefficient appears m!/(m-k)! times
        let mult = T::of_usize(falling(m, k));
        let mut idx = vec![0; m];
        for (off, &c) in a.data().iter().enumerate() {
            if c == T::zero() {
                continue;
            }
            a.unravel_into(off, &mut idx);
            let w = idx[k..].iter().fold(c * mult, |acc, &i| acc * x[i]);
            let o = out.offset(&idx[..k]);
            out.data_mut()[o] += w;
        }
    }
    out
}

/// `E ∇^{(k)} f` under `law`, with a pointwise evaluator.
pub fn gradient_tensor<T: Real>(spec: &FunctionSpec<T>, k: usize, law: &ExactLaw<T>) -> Result<GradientTensor<T>> {
    let n = law.n();
    let coefficients = spec
        .as_poly(n)
        .ok_or_else(|| Error::InvalidFunction("gradient tensors need a multilinear polynomial".into()))?;
    spec.validate(law.space())?;
    let d = coefficients.len();
    if k == 0 || k > d {
        return Err(Error::OrderTooLarge { k, max: d });
    }
    let mut expected = DenseTensor::cubic(k, n);
    let space = law.space();
    for idx in law.support_indices() {
        let p = law.probs()[idx];
        let g = gradient_at(&coefficients, n, k, &space.values_of(&space.point_of(idx)));
        for (e, &v) in expected.data_mut().iter_mut().zip(g.data()) {
            *e += p * v;
        }
    }
    Ok(GradientTensor { order: k, expected, coefficients, n })
}

/// Coefficient tensor of the derivative structure of a single-element chaos:
/// entry `(i_1..i_k, j)` is the `j`-th component of
/// `sum_{I disjoint from i} x_I t_{I ∪ i}`, zero on repeated indices.
fn chaos_derivative<T: Real>(order: usize, terms: &[ChaosTerm<T>], n: usize, x: &[T], k: usize) -> DenseTensor<T> {
    let dim = terms.first().map_or(0, |t| t.coefficient.len());
    let mut shape = vec![n; k];
    shape.push(dim);
    let mut g = DenseTensor::zeros(shape);
    let mut pick = vec![0usize; k];
    for t in terms {
        // every ordered k-tuple of distinct positions within the subset
        let s = &t.subset;
        let mut stack = vec![0usize; k];
        loop {
            if !has_repeat(&stack) {
                for (a, &p) in stack.iter().enumerate() {
                    pick[a] = s[p];
                }
                let rest: T = (0..order)
                    .filter(|p| !stack.contains(p))
                    .fold(T::one(), |acc, p| acc * x[s[p]]);
                let mut idx = pick.clone();
                idx.push(0);
                for (j, &c) in t.coefficient.iter().enumerate() {
                    idx[k] = j;
                    let o = g.offset(&idx);
                    g.data_mut()[o] += rest * c;
                }
            }
            let mut a = k;
            loop {
                if a == 0 {
                    break;
                }
                a -= 1;
                stack[a] += 1;
                if stack[a] < order {
                    break;
                }
                stack[a] = 0;
                if a == 0 {
                    a = usize::MAX;
                    break;
                }
            }
            if a == usize::MAX || k == 0 {
                break;
            }
        }
    }
    g
}

/// Chaos level quantities at a configuration: `(W_k, W̃_k)` for a
/// single-coefficient family.
pub fn chaos_levels<T: Real>(spec: &FunctionSpec<T>, x: &[T], k: usize, opts: &OpNormOptions) -> Result<(T, T)> {
    let FunctionSpec::Chaos { order, terms, norm } = spec else {
        return Err(Error::InvalidFunction("chaos levels need a chaos spec".into()));
    };
    if k == 0 || k > *order {
        return Err(Error::OrderTooLarge { k, max: *order });
    }
    let n = x.len();
    let g = chaos_derivative(*order, terms, n, x, k);
    let dim = g.shape()[k];
    let block = g.len() / dim.max(1);
    let component = |j: usize| {
        DenseTensor::from_fn(vec![n; k], |idx| {
            let mut full = idx.to_vec();
            full.push(j);
            g.get(&full)
        })
    };
    let w = match norm {
        // dual ball of l2 is the l2 ball: one more tensor axis
        VectorNorm::L2 => op_norm(&g, opts)?.value,
        // dual ball of l-infinity is the l1 ball: extreme points are ±e_j
        VectorNorm::Linf => (0..dim)
            .map(|j| op_norm(&component(j), opts).map(|r| r.value))
            .try_fold(T::zero(), |m, v| v.map(|v| m.max(v)))?,
    };
    let norms: Vec<T> = (0..block).map(|b| norm.apply(&g.data()[b * dim..(b + 1) * dim])).collect();
    let tilde = op_norm(&DenseTensor::new(vec![n; k], norms)?, opts)?.value;
    Ok((w, tilde))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::space::{Measure, DEFAULT_CAP};
    use approx::assert_abs_diff_eq;

    #[test]
    fn evaluate_examples() {
        let s = ProductSpace::<f64>::hypercube(2);
        let q = FunctionSpec::Quadform { matrix: vec![vec![0.0, 0.5], vec![0.5, 0.0]] };
        assert_abs_diff_eq!(q.evaluate(&s, &[1.0, 1.0]).unwrap(), 1.0);
        let s3 = ProductSpace::<f64>::hypercube(3);
        let u = FunctionSpec::Ustat { order: 2, alphabet: vec![-1.0, 1.0], kernel: vec![1.0; 4], summation: Summation::Ordered };
        assert_abs_diff_eq!(u.evaluate(&s3, &[1.0, -1.0, 1.0]).unwrap(), 6.0);
        let s1 = ProductSpace::<f64>::hypercube(1);
        let x1 = FunctionSpec::Poly { coefficients: vec![DenseTensor::new(vec![1], vec![1.0]).unwrap()] };
        let neg = FunctionSpec::Poly { coefficients: vec![DenseTensor::new(vec![1], vec![-1.0]).unwrap()] };
        let sup = FunctionSpec::Sup { family: vec![x1, neg] };
        assert_abs_diff_eq!(sup.evaluate(&s1, &[-1.0]).unwrap(), 1.0);
        assert!(q.evaluate(&s, &[1.0]).is_err());
    }

    #[test]
    fn unordered_ustat_is_ordered_over_factorial() {
        let s = ProductSpace::<f64>::uniform(4, &[0.0, 1.0, 2.0]).unwrap();
        let kernel: Vec<f64> = (0..9).map(|k| ((k / 3) as f64 - 1.0) * ((k % 3) as f64 - 1.0) + 0.25).collect();
        let mk = |summation| FunctionSpec::Ustat { order: 2, alphabet: vec![0.0, 1.0, 2.0], kernel: kernel.clone(), summation };
        let a = mk(Summation::Ordered).tabulate(&s, DEFAULT_CAP).unwrap();
        let b = mk(Summation::Unordered).tabulate(&s, DEFAULT_CAP).unwrap();
        for (x, y) in a.iter().zip(&b) {
            assert_abs_diff_eq!(*x, 2.0 * y, epsilon = 1e-12);
        }
    }

    #[test]
    fn validation_catches_bad_specs() {
        let s = ProductSpace::<f64>::hypercube(2);
        let q = FunctionSpec::Quadform { matrix: vec![vec![1.0, 0.5], vec![0.5, 0.0]] };
        assert!(q.validate(&s).is_err());
        let asym = DenseTensor::from_matrix(&[vec![0.0, 1.0], vec![2.0, 0.0]]).unwrap();
        let p = FunctionSpec::Poly { coefficients: vec![DenseTensor::cubic(1, 2), asym] };
        assert!(p.validate(&s).is_err());
        assert!(FunctionSpec::table(vec![1.0; 3]).validate(&s).is_err());
    }

    fn table_of(s: &ProductSpace<f64>, f: impl Fn(&[f64]) -> f64) -> Vec<f64> {
        FunctionSpec::from_fn(s, DEFAULT_CAP, f).unwrap().tabulate(s, DEFAULT_CAP).unwrap()
    }

    #[test]
    fn fourier_examples() {
        let s = ProductSpace::<f64>::hypercube(3);
        let dict = fourier_transform(&s, &table_of(&s, |x| x[0])).unwrap();
        assert_abs_diff_eq!(dict.weights[1], 1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(dict.weights.iter().sum::<f64>(), 1.0, epsilon = 1e-15);
        let parity = fourier_transform(&s, &table_of(&s, |x| x[0] * x[1] * x[2])).unwrap();
        assert_abs_diff_eq!(parity.weights[3], 1.0, epsilon = 1e-15);
        let maj = fourier_transform(&s, &table_of(&s, |x| (x[0] + x[1] + x[2]).signum())).unwrap();
        let expect = [0.0, 0.75, 0.0, 0.25];
        for (w, e) in maj.weights.iter().zip(expect) {
            assert_abs_diff_eq!(*w, e, epsilon = 1e-15);
        }
        assert_abs_diff_eq!(maj.coefficient(&[0, 1, 2]), -0.5, epsilon = 1e-15);
    }

    #[test]
    fn fourier_rejects_non_cube() {
        let s = ProductSpace::<f64>::binary(2);
        assert!(matches!(fourier_transform(&s, &[0.0; 4]), Err(Error::NotHypercube(0))));
    }

    #[test]
    fn gradient_examples() {
        let law = Measure::<f64>::rademacher(3).law(DEFAULT_CAP).unwrap();
        let v = DenseTensor::new(vec![3], vec![1.0, -2.0, 0.5]).unwrap();
        let lin = FunctionSpec::Poly { coefficients: vec![v.clone()] };
        let g = gradient_tensor(&lin, 1, &law).unwrap();
        assert_eq!(g.expected, v);
        assert_eq!(g.at(&[1.0, 1.0, -1.0]), v);

        let a = vec![vec![0.0, 0.3, -0.2], vec![0.3, 0.0, 0.7], vec![-0.2, 0.7, 0.0]];
        let q = FunctionSpec::Quadform { matrix: a.clone() };
        let g2 = gradient_tensor(&q, 2, &law).unwrap();
        for i in 0..3 {
            for j in 0..3 {
                assert_abs_diff_eq!(g2.expected.get(&[i, j]), 2.0 * a[i][j], epsilon = 1e-15);
            }
        }
        let g1 = gradient_tensor(&q, 1, &law).unwrap();
        assert!(g1.expected.data().iter().all(|x| x.abs() < 1e-15));
        assert!(matches!(gradient_tensor(&q, 3, &law), Err(Error::OrderTooLarge { .. })));
    }

    #[test]
    fn gradient_matches_finite_differences() {
        // multilinear: d/dx_i f = (f(x_i = 1) - f(x_i = -1)) / 2 exactly
        let n = 4;
        let a3 = DenseTensor::from_fn(vec![n; 3], |i| {
            if has_repeat(i) { 0.0 } else { (i[0] + i[1] + i[2]) as f64 * 0.1 - 0.35 }
        });
        let a2 = DenseTensor::from_fn(vec![n; 2], |i| if i[0] == i[1] { 0.0 } else { (i[0] * i[1]) as f64 * 0.2 });
        let a1 = DenseTensor::new(vec![n], vec![0.1, -0.4, 0.0, 1.0]).unwrap();
        let f = FunctionSpec::Poly { coefficients: vec![a1, a2, a3] };
        let s = ProductSpace::<f64>::hypercube(n);
        let law = Measure::rademacher(n).law(DEFAULT_CAP).unwrap();
        let g = gradient_tensor(&f, 1, &law).unwrap();
        let x = [0.3, -0.7, 1.1, 0.2];
        let grad = g.at(&x);
        for i in 0..n {
            let mut up = x;
            let mut dn = x;
            up[i] = 1.0;
            dn[i] = -1.0;
            let fd = (f.evaluate_values(&up).unwrap() - f.evaluate_values(&dn).unwrap()) / 2.0;
            assert_abs_diff_eq!(grad.get(&[i]), fd, epsilon = 1e-12);
        }
        assert!(f.validate(&s).is_ok());
    }

    #[test]
    fn chaos_value_and_levels() {
        let s = ProductSpace::<f64>::hypercube(3);
        let terms = vec![
            ChaosTerm { subset: vec![0, 1], coefficient: vec![1.0, 0.0] },
            ChaosTerm { subset: vec![1, 2], coefficient: vec![0.0, 2.0] },
        ];
        let c = FunctionSpec::Chaos { order: 2, terms, norm: VectorNorm::L2 };
        assert!(c.validate(&s).is_ok());
        // x = (1, 1, -1): (1, -2) has length sqrt 5
        assert_abs_diff_eq!(c.evaluate(&s, &[1.0, 1.0, -1.0]).unwrap(), 5f64.sqrt(), epsilon = 1e-15);
        let (w2, wt2) = chaos_levels(&c, &[1.0, 1.0, -1.0], 2, &OpNormOptions::default()).unwrap();
        assert!(w2 <= wt2 + 1e-9);
        assert!(w2 > 0.0);
    }

    proptest::proptest! {
        #[test]
        fn parseval_and_reconstruction(raw in proptest::collection::vec(-3.0f64..3.0, 64)) {
            let s = ProductSpace::<f64>::hypercube(6);
            let law = Measure::rademacher(6).law(DEFAULT_CAP).unwrap();
            let spec = fourier_transform(&s, &raw).unwrap();
            let sq: Vec<f64> = raw.iter().map(|v| v * v).collect();
            proptest::prop_assert!((spec.weights.iter().sum::<f64>() - law.expectation(&sq)).abs() < 1e-10);
            for (a, b) in spec.reconstruct(&s).iter().zip(&raw) {
                proptest::prop_assert!((a - b).abs() < 1e-10);
            }
        }

        #[test]
        fn poly_matches_tabulated_and_has_bounded_degree(c in proptest::collection::vec(-1.0f64..1.0, 5 * 5)) {
            let n = 5;
            let a2 = DenseTensor::from_fn(vec![n, n], |i| {
                if i[0] == i[1] { 0.0 } else { c[i[0].min(i[1]) * n + i[0].max(i[1])] }
            });
            let a1 = DenseTensor::from_fn(vec![n], |i| c[i[0] * n + i[0]]);
            let f = FunctionSpec::Poly { coefficients: vec![a1, a2] };
            let s = ProductSpace::<f64>::hypercube(n);
            let table = f.tabulate(&s, DEFAULT_CAP).unwrap();
            for (idx, v) in table.iter().enumerate() {
                let x = s.values_of(&s.point_of(idx));
                proptest::prop_assert!((f.evaluate(&s, &x).unwrap() - v).abs() < 1e-10);
            }
            let spec = fourier_transform(&s, &table).unwrap();
            for j in 3..=n {
                proptest::prop_assert!(spec.weights[j] < 1e-20);
            }
        }
    }
}
