//! Difference operators: coordinate oscillations `ℌ`, their one-sided parts
//! `ℌ⁺` and `ℌ⁻`, iterated difference tensors `ℌ^{(k)}` and the conditional
//! standard deviation `∂`.
//!
//! Suprema over resampled coordinates range over the marginal support of the
//! measure; for Gibbs measures that is the whole declared alphabet.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::funcs::FunctionSpec;
use crate::models::glauber_sample;
use crate::scalar::{euclid, Real};
use crate::space::{ExactLaw, Measure, ProductSpace};
use crate::tensors::{op_norm, DenseTensor, OpNormOptions};

/// Anything evaluable at a point (alphabet indices).
pub trait Observable<T: Real>: Sync {
    fn value(&self, space: &ProductSpace<T>, point: &[usize]) -> T;
}

/// A table over the whole space in lexicographic order.
impl<T: Real> Observable<T> for [T] {
    fn value(&self, space: &ProductSpace<T>, point: &[usize]) -> T {
        self[space.index_of(point)]
    }
}

impl<T: Real> Observable<T> for Vec<T> {
    fn value(&self, space: &ProductSpace<T>, point: &[usize]) -> T {
        self[space.index_of(point)]
    }
}

impl<T: Real> Observable<T> for FunctionSpec<T> {
    fn value(&self, space: &ProductSpace<T>, point: &[usize]) -> T {
        self.eval_point(space, point)
    }
}

/// A space together with the per-coordinate values that resampling ranges over.
#[derive(Clone, Debug)]
pub struct Support<T> {
    pub space: ProductSpace<T>,
    pub values: Vec<Vec<usize>>,
}

impl<T: Real> Support<T> {
    pub fn of(measure: &Measure<T>, cap: usize) -> Result<Self> {
        Ok(Self { space: measure.space().clone(), values: measure.supports(cap)? })
    }

    pub fn of_law(law: &ExactLaw<T>) -> Self {
        Self { space: law.space().clone(), values: law.supports().to_vec() }
    }

    /// Every declared value is resampled.
    pub fn full(space: &ProductSpace<T>) -> Self {
        let values = (0..space.n()).map(|i| (0..space.size(i)).collect()).collect();
        Self { space: space.clone(), values }
    }

    pub fn n(&self) -> usize {
        self.space.n()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Variant {
    /// `max |f(x_{i^c}, a) - f(x_{i^c}, b)|` over support values `a, b`.
    Osc,
    /// `max_a (f(x) - f(x_{i^c}, a))_+`.
    Plus,
    /// `max_a (f(x_{i^c}, a) - f(x))_+`.
    Minus,
}

fn section_range<T: Real, F: Observable<T> + ?Sized>(f: &F, sup: &Support<T>, point: &[usize], i: usize) -> (T, T) {
    let mut p = point.to_vec();
    let mut lo = T::infinity();
    let mut hi = T::neg_infinity();
    for &a in &sup.values[i] {
        p[i] = a;
        let v = f.value(&sup.space, &p);
        lo = lo.min(v);
        hi = hi.max(v);
    }
    (lo, hi)
}

pub fn h_component<T: Real, F: Observable<T> + ?Sized>(
    f: &F,
    sup: &Support<T>,
    point: &[usize],
    i: usize,
    variant: Variant,
) -> Result<T> {
    if i >= sup.n() || point.len() != sup.n() {
        return Err(Error::Domain(format!("coordinate {i} or point of length {} out of range", point.len())));
    }
    if sup.values[i].is_empty() {
        return Ok(T::zero());
    }
    let (lo, hi) = section_range(f, sup, point, i);
    Ok(match variant {
        Variant::Osc => hi - lo,
        Variant::Plus => (f.value(&sup.space, point) - lo).max(T::zero()),
        Variant::Minus => (hi - f.value(&sup.space, point)).max(T::zero()),
    })
}

/// `(ℌ_1 f(x), .., ℌ_n f(x))` for one variant.
pub fn h_vector<T: Real, F: Observable<T> + ?Sized>(f: &F, sup: &Support<T>, point: &[usize], variant: Variant) -> Result<Vec<T>> {
    (0..sup.n()).map(|i| h_component(f, sup, point, i, variant)).collect()
}

/// Largest `|Σ_{S ⊆ [k]} (-1)^{|S|} f(..)|` over support pairs at coordinates
/// `idx`, coordinates in `S` taking the second value of their pair.
fn difference_entry<T: Real, F: Observable<T> + ?Sized>(f: &F, sup: &Support<T>, point: &[usize], idx: &[usize]) -> T {
    let k = idx.len();
    let sizes: Vec<usize> = idx.iter().map(|&i| sup.values[i].len()).collect();
    if sizes.iter().any(|&s| s < 2) {
        return T::zero();
    }
    // f on the subcube spanned by the supports of the chosen coordinates
    let total: usize = sizes.iter().product();
    let mut sub = Vec::with_capacity(total);
    let mut p = point.to_vec();
    let mut c = vec![0usize; k];
    for _ in 0..total {
        for (s, &i) in idx.iter().enumerate() {
            p[i] = sup.values[i][c[s]];
        }
        sub.push(f.value(&sup.space, &p));
        bump(&mut c, &sizes);
    }
    let mut strides = vec![1usize; k];
    for s in (0..k.saturating_sub(1)).rev() {
        strides[s] = strides[s + 1] * sizes[s + 1];
    }
    // ordered pairs a < b per coordinate; swapping a pair only flips the sign
    let pairs: Vec<Vec<(usize, usize)>> = sizes
        .iter()
        .map(|&m| (0..m).flat_map(|a| (a + 1..m).map(move |b| (a, b))).collect())
        .collect();
    let pair_sizes: Vec<usize> = pairs.iter().map(Vec::len).collect();
    let combos: usize = pair_sizes.iter().product();
    let mut pc = vec![0usize; k];
    let mut best = T::zero();
    for _ in 0..combos {
        let mut sum = T::zero();
        for mask in 0..(1usize << k) {
            let mut off = 0;
            for s in 0..k {
                let (a, b) = pairs[s][pc[s]];
                off += strides[s] * if mask >> s & 1 == 1 { b } else { a };
            }
            if mask.count_ones() % 2 == 0 {
                sum += sub[off];
            } else {
                sum -= sub[off];
            }
        }
        best = best.max(sum.abs());
        bump(&mut pc, &pair_sizes);
    }
    best
}

fn bump(c: &mut [usize], sizes: &[usize]) {
    for s in (0..c.len()).rev() {
        c[s] += 1;
        if c[s] < sizes[s] {
            return;
        }
        c[s] = 0;
    }
}

/// `ℌ^{(k)} f(x)`: symmetric, zero on the generalized diagonal.
pub fn h_tensor<T: Real, F: Observable<T> + ?Sized>(f: &F, sup: &Support<T>, point: &[usize], k: usize, cap: usize) -> Result<DenseTensor<T>> {
    let n = sup.n();
    if k == 0 || k > n {
        return Err(Error::OrderTooLarge { k, max: n });
    }
    let widest = sup.values.iter().map(Vec::len).max().unwrap_or(0) as u128;
    let work = widest.pow(2 * k as u32);
    if work > cap as u128 {
        return Err(Error::EnumerationTooLarge { count: work, cap });
    }
    let mut t = DenseTensor::cubic(k, n);
    let mut idx: Vec<usize> = (0..k).collect();
    loop {
        let v = difference_entry(f, sup, point, &idx);
        if v != T::zero() {
            for perm in permutations(&idx) {
                t.set(&perm, v);
            }
        }
        // next increasing k-subset
        let mut s = k;
        loop {
            if s == 0 {
                return Ok(t);
            }
            s -= 1;
            if idx[s] < n - k + s {
                idx[s] += 1;
                for r in s + 1..k {
                    idx[r] = idx[r - 1] + 1;
                }
                break;
            }
        }
    }
}

fn permutations(v: &[usize]) -> Vec<Vec<usize>> {
    if v.len() <= 1 {
        return vec![v.to_vec()];
    }
    let mut out = Vec::new();
    for i in 0..v.len() {
        let mut rest = v.to_vec();
        let head = rest.remove(i);
        for mut tail in permutations(&rest) {
            tail.insert(0, head);
            out.push(tail);
        }
    }
    out
}

/// `|T|_op` with the closed forms for orders 1 and 0.
pub fn tensor_op<T: Real>(t: &DenseTensor<T>, opts: &OpNormOptions) -> Result<T> {
    match t.order() {
        0 => Ok(t.data()[0].abs()),
        1 => Ok(euclid(t.data())),
        _ => {
            if t.data().iter().all(|&v| v == T::zero()) {
                Ok(T::zero())
            } else {
                Ok(op_norm(t, opts)?.value)
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DVector<T> {
    pub components: Vec<T>,
    pub norm: T,
}

/// `∂_i f(x)`: standard deviation of `f(x_{i^c}, ·)` under `μ(· | x_{i^c})`.
pub fn d_operator<T: Real, F: Observable<T> + ?Sized>(f: &F, measure: &Measure<T>, point: &[usize]) -> Result<DVector<T>> {
    let space = measure.space();
    let mut p = point.to_vec();
    let components = (0..space.n())
        .map(|i| {
            let cond = measure.conditional(point, i)?;
            Ok(conditional_std(f, space, &mut p, i, &cond))
        })
        .collect::<Result<Vec<T>>>()?;
    let norm = euclid(&components);
    Ok(DVector { components, norm })
}

fn conditional_std<T: Real, F: Observable<T> + ?Sized>(f: &F, space: &ProductSpace<T>, p: &mut [usize], i: usize, cond: &[T]) -> T {
    let own = p[i];
    let mut vals = Vec::with_capacity(cond.len());
    for a in 0..cond.len() {
        p[i] = a;
        vals.push(if cond[a] > T::zero() { f.value(space, p) } else { T::zero() });
    }
    p[i] = own;
    let mean: T = cond.iter().zip(&vals).map(|(&q, &v)| q * v).sum();
    let var: T = cond.iter().zip(&vals).map(|(&q, &v)| q * (v - mean) * (v - mean)).sum();
    var.max(T::zero()).sqrt()
}

/// `|∂f|(x)` at every configuration of an enumerated law (zero off the support).
pub fn d_norms<T: Real, F: Observable<T> + ?Sized>(f: &F, law: &ExactLaw<T>) -> Result<Vec<T>> {
    let space = law.space();
    (0..law.len())
        .into_par_iter()
        .map(|idx| {
            if law.probs()[idx] <= T::zero() {
                return Ok(T::zero());
            }
            let mut p = space.point_of(idx);
            let mut s = T::zero();
            for i in 0..space.n() {
                let cond = law.conditional_at(idx, i)?;
                let sd = conditional_std(f, space, &mut p, i, &cond);
                s += sd * sd;
            }
            Ok(s.sqrt())
        })
        .collect()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Provenance<T> {
    Exact,
    /// Levels below `d` are sample means with standard errors; the top level
    /// is a maximum over sampled points and only a lower estimate of the
    /// essential supremum.
    MonteCarlo { samples: usize, std_errors: Vec<T>, top_is_lower_estimate: bool },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NormProfile<T> {
    pub d: usize,
    /// `gamma[k-1]`: `E|ℌ^{(k)} f|_op` for `k < d` and `max |ℌ^{(d)} f|_op`.
    pub gamma: Vec<T>,
    pub provenance: Provenance<T>,
}

impl<T: Real> NormProfile<T> {
    pub fn gamma(&self, k: usize) -> T {
        self.gamma[k - 1]
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "snake_case")]
pub enum ProfileMode {
    Exact,
    MonteCarlo { samples: usize, seed: u64 },
}

/// `|ℌ^{(k)} f(x)|_op` for `k = 1..=d` at one point.
pub fn level_norms<T: Real, F: Observable<T> + ?Sized>(
    f: &F,
    sup: &Support<T>,
    point: &[usize],
    d: usize,
    opts: &OpNormOptions,
    cap: usize,
) -> Result<Vec<T>> {
    (1..=d)
        .map(|k| tensor_op(&h_tensor(f, sup, point, k, cap)?, opts))
        .collect()
}

pub fn norm_profile<T: Real, F: Observable<T> + ?Sized>(
    f: &F,
    measure: &Measure<T>,
    d: usize,
    mode: ProfileMode,
    opts: &OpNormOptions,
    cap: usize,
) -> Result<NormProfile<T>> {
    if d == 0 {
        return Err(Error::Domain("profile order must be positive".into()));
    }
    match mode {
        ProfileMode::Exact => {
            let law = measure.law(cap)?;
            let sup = Support::of_law(&law);
            let rows: Vec<(T, Vec<T>)> = law
                .support_indices()
                .into_par_iter()
                .map(|idx| {
                    let point = law.space().point_of(idx);
                    Ok((law.probs()[idx], level_norms(f, &sup, &point, d, opts, cap)?))
                })
                .collect::<Result<_>>()?;
            let mut gamma = vec![T::zero(); d];
            for (p, levels) in &rows {
                for k in 0..d - 1 {
                    gamma[k] += *p * levels[k];
                }
                gamma[d - 1] = gamma[d - 1].max(levels[d - 1]);
            }
            Ok(NormProfile { d, gamma, provenance: Provenance::Exact })
        }
        ProfileMode::MonteCarlo { samples, seed } => {
            if samples == 0 {
                return Err(Error::Degenerate("no samples".into()));
            }
            let points = draw(measure, samples, seed)?;
            let sup = Support::of(measure, cap)?;
            let rows: Vec<Vec<T>> = points
                .par_iter()
                .map(|p| level_norms(f, &sup, p, d, opts, cap))
                .collect::<Result<_>>()?;
            let m = T::of_usize(samples);
            let mut gamma = vec![T::zero(); d];
            let mut std_errors = vec![T::zero(); d];
            for k in 0..d - 1 {
                let mean = rows.iter().map(|r| r[k]).sum::<T>() / m;
                let var = rows.iter().map(|r| (r[k] - mean) * (r[k] - mean)).sum::<T>() / m;
                gamma[k] = mean;
                std_errors[k] = (var / m).sqrt();
            }
            gamma[d - 1] = rows.iter().map(|r| r[d - 1]).fold(T::zero(), T::max);
            Ok(NormProfile {
                d,
                gamma,
                provenance: Provenance::MonteCarlo { samples, std_errors, top_is_lower_estimate: true },
            })
        }
    }
}

/// `samples` points from the measure: i.i.d. when possible, otherwise one
/// Glauber sweep apart after a burn-in.
pub fn draw<T: Real>(measure: &Measure<T>, samples: usize, seed: u64) -> Result<Vec<Vec<usize>>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    if measure.is_gibbs() {
        glauber_sample(measure, samples, 100, 1, seed)
    } else {
        Ok((0..samples)
            .map(|_| measure.sample_iid(&mut rng).expect("explicit measure"))
            .collect())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::space::DEFAULT_CAP;
    use approx::assert_abs_diff_eq;

    fn x1x2() -> (Measure<f64>, Vec<f64>) {
        let m = Measure::rademacher(2);
        let f = FunctionSpec::from_fn(m.space(), DEFAULT_CAP, |x| x[0] * x[1])
            .unwrap()
            .tabulate(m.space(), DEFAULT_CAP)
            .unwrap();
        (m, f)
    }

    #[test]
    fn component_examples() {
        let (m, f) = x1x2();
        let sup = Support::of(&m, DEFAULT_CAP).unwrap();
        for idx in 0..4 {
            let p = m.space().point_of(idx);
            assert_eq!(h_component(&f[..], &sup, &p, 0, Variant::Osc).unwrap(), 2.0);
        }
        let c = vec![3.0; 4];
        for v in [Variant::Osc, Variant::Plus, Variant::Minus] {
            assert_eq!(h_component(&c, &sup, &[0, 1], 1, v).unwrap(), 0.0);
        }
        let one = Measure::rademacher(1);
        let sup1 = Support::of(&one, DEFAULT_CAP).unwrap();
        let x = vec![-1.0, 1.0];
        assert_eq!(h_component(&x, &sup1, &[1], 0, Variant::Plus).unwrap(), 2.0);
        assert_eq!(h_component(&x, &sup1, &[1], 0, Variant::Minus).unwrap(), 0.0);
    }

    #[test]
    fn tensor_examples() {
        let (m, f) = x1x2();
        let sup = Support::of(&m, DEFAULT_CAP).unwrap();
        let t = h_tensor(&f, &sup, &[0, 0], 2, DEFAULT_CAP).unwrap();
        assert_eq!(t.get(&[0, 1]), 4.0);
        assert_eq!(t.get(&[1, 0]), 4.0);
        assert_eq!(t.get(&[0, 0]), 0.0);

        let m3 = Measure::rademacher(3);
        let sum = FunctionSpec::<f64>::sum(3);
        let sup3 = Support::of(&m3, DEFAULT_CAP).unwrap();
        let t2 = h_tensor(&sum, &sup3, &[0, 1, 0], 2, DEFAULT_CAP).unwrap();
        assert!(t2.data().iter().all(|&v| v == 0.0));
        let t1 = h_tensor(&sum, &sup3, &[0, 1, 0], 1, DEFAULT_CAP).unwrap();
        assert_eq!(t1.data(), &h_vector(&sum, &sup3, &[0, 1, 0], Variant::Osc).unwrap()[..]);
    }

    #[test]
    fn d_operator_examples() {
        let m = Measure::rademacher(2);
        let f = FunctionSpec::from_fn(m.space(), DEFAULT_CAP, |x: &[f64]| x[0]).unwrap();
        let dv = d_operator(&f, &m, &[0, 1]).unwrap();
        assert_abs_diff_eq!(dv.components[0], 1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(dv.components[1], 0.0);
        let p: f64 = 0.3;
        let b = Measure::product(ProductSpace::binary(1), vec![vec![1.0 - p, p]]).unwrap();
        let dv = d_operator(&vec![0.0, 1.0], &b, &[0]).unwrap();
        assert_abs_diff_eq!(dv.components[0], (p * (1.0 - p)).sqrt(), epsilon = 1e-15);
        let c = d_operator(&vec![2.0, 2.0], &b, &[1]).unwrap();
        assert_eq!(c.norm, 0.0);
    }

    #[test]
    fn profile_examples() {
        let (m, f) = x1x2();
        let prof = norm_profile(&f, &m, 2, ProfileMode::Exact, &OpNormOptions::default(), DEFAULT_CAP).unwrap();
        assert_abs_diff_eq!(prof.gamma(1), 8f64.sqrt(), epsilon = 1e-12);
        assert_abs_diff_eq!(prof.gamma(2), 4.0, epsilon = 1e-9);
        let c = vec![1.0; 4];
        let prof = norm_profile(&c, &m, 2, ProfileMode::Exact, &OpNormOptions::default(), DEFAULT_CAP).unwrap();
        assert_eq!(prof.gamma, vec![0.0, 0.0]);
        let mc = norm_profile(&f, &m, 2, ProfileMode::MonteCarlo { samples: 200, seed: 3 }, &OpNormOptions::fast(), DEFAULT_CAP).unwrap();
        assert_abs_diff_eq!(mc.gamma(1), 8f64.sqrt(), epsilon = 1e-9);
        assert!(matches!(mc.provenance, Provenance::MonteCarlo { top_is_lower_estimate: true, .. }));
    }

    #[test]
    fn quadratic_form_profile_within_precursor_scales() {
        let a = vec![
            vec![0.0, 0.5, -0.25, 0.1],
            vec![0.5, 0.0, 0.3, 0.0],
            vec![-0.25, 0.3, 0.0, 0.7],
            vec![0.1, 0.0, 0.7, 0.0],
        ];
        let q = FunctionSpec::Quadform { matrix: a.clone() };
        let m = Measure::rademacher(4);
        let prof = norm_profile(&q, &m, 2, ProfileMode::Exact, &OpNormOptions::default(), DEFAULT_CAP).unwrap();
        let hs = a.iter().flatten().map(|v| v * v).sum::<f64>().sqrt();
        let abs = DenseTensor::from_matrix(&a).unwrap().abs();
        let abs_op = op_norm(&abs, &OpNormOptions::default()).unwrap().value;
        assert!(prof.gamma(1) <= 4.0 * hs + 1e-9);
        assert!(prof.gamma(2) <= 8.0 * abs_op + 1e-9);
    }

    #[test]
    fn gibbs_support_is_full_alphabet() {
        let spec = crate::models::IsingSpec::curie_weiss(3, 0.5);
        let (m, _) = crate::models::build_ising(&spec).unwrap();
        let sup = Support::of(&m, DEFAULT_CAP).unwrap();
        assert!(sup.values.iter().all(|v| v == &vec![0, 1]));
    }

    proptest::proptest! {
        #[test]
        fn operator_relations(raw in proptest::collection::vec(-2.0f64..2.0, 27), w in proptest::collection::vec(0.05f64..1.0, 9)) {
            let space = ProductSpace::uniform(3, &[0.0, 1.0, 2.0]).unwrap();
            let marg: Vec<Vec<f64>> = w.chunks(3).map(|c| { let s: f64 = c.iter().sum(); c.iter().map(|x| x / s).collect() }).collect();
            let m = Measure::product(space.clone(), marg).unwrap();
            let sup = Support::of(&m, DEFAULT_CAP).unwrap();
            for idx in 0..27 {
                let p = space.point_of(idx);
                let osc = h_vector(&raw, &sup, &p, Variant::Osc).unwrap();
                let plus = h_vector(&raw, &sup, &p, Variant::Plus).unwrap();
                let d = d_operator(&raw, &m, &p).unwrap();
                proptest::prop_assert!(d.norm <= euclid(&osc) + 1e-12);
                for i in 0..3 {
                    proptest::prop_assert!(plus[i] <= osc[i] + 1e-12);
                    let mut q = p.clone();
                    let best = (0..3).map(|a| { q[i] = a; h_component(&raw, &sup, &q, i, Variant::Plus).unwrap() }).fold(0.0, f64::max);
                    proptest::prop_assert!((best - osc[i]).abs() < 1e-12);
                }
                // entries ignore the values of their own coordinates
                let t = h_tensor(&raw, &sup, &p, 2, DEFAULT_CAP).unwrap();
                let mut q = p.clone();
                q[0] = (q[0] + 1) % 3;
                q[1] = (q[1] + 2) % 3;
                let t2 = h_tensor(&raw, &sup, &q, 2, DEFAULT_CAP).unwrap();
                proptest::prop_assert_eq!(t.get(&[0, 1]), t2.get(&[0, 1]));
                proptest::prop_assert!(t.is_symmetric(0.0) && t.vanishes_on_diagonal());
            }
        }

        #[test]
        fn double_integral_form_of_d(raw in proptest::collection::vec(-2.0f64..2.0, 8), w in proptest::collection::vec(0.05f64..1.0, 6)) {
            let marg: Vec<Vec<f64>> = w.chunks(2).map(|c| vec![c[0] / (c[0] + c[1]), c[1] / (c[0] + c[1])]).collect();
            let m = Measure::product(ProductSpace::hypercube(3), marg.clone()).unwrap();
            let space = m.space().clone();
            for idx in 0..8 {
                let p = space.point_of(idx);
                let d = d_operator(&raw, &m, &p).unwrap();
                for i in 0..3 {
                    let mut q = p.clone();
                    let mut dbl = 0.0;
                    for a in 0..2 {
                        for b in 0..2 {
                            q[i] = a;
                            let fa = raw.value(&space, &q);
                            q[i] = b;
                            let fb = raw.value(&space, &q);
                            dbl += marg[i][a] * marg[i][b] * (fa - fb).powi(2);
                        }
                    }
                    proptest::prop_assert!((2.0 * d.components[i].powi(2) - dbl).abs() < 1e-12);
                }
            }
        }
    }
}
