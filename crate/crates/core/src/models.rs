//! Weakly dependent Gibbs models and a Glauber-dynamics sampler.

use std::io::{Read, Write};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use statrs::distribution::{ChiSquared, ContinuousCDF};

use crate::error::{Error, Result};
use crate::space::{sample_index, Measure, MeasureKind, Potential, ProductSpace, DEFAULT_CAP};
use crate::scalar::Real;

/// `π(σ) ∝ exp(½ σᵀJσ + hᵀσ)` on `{-1, +1}^n`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct IsingSpec<T> {
    pub coupling: Vec<Vec<T>>,
    pub field: Vec<T>,
}

impl<T: Real> IsingSpec<T> {
    pub fn new(coupling: Vec<Vec<T>>, field: Vec<T>) -> Result<Self> {
        let spec = Self { coupling, field };
        spec.validate()?;
        Ok(spec)
    }

    /// Curie–Weiss model: `J_ij = β/n` off the diagonal, no field.
    pub fn curie_weiss(n: usize, beta: T) -> Self {
        let c = beta / T::of_usize(n);
        let coupling = (0..n)
            .map(|i| (0..n).map(|j| if i == j { T::zero() } else { c }).collect())
            .collect();
        Self { coupling, field: vec![T::zero(); n] }
    }

    pub fn n(&self) -> usize {
        self.field.len()
    }

    pub fn validate(&self) -> Result<()> {
        let n = self.n();
        if self.coupling.len() != n || self.coupling.iter().any(|r| r.len() != n) {
            return Err(Error::InvalidModel(format!("coupling must be {n}x{n}")));
        }
        for i in 0..n {
            if self.coupling[i][i] != T::zero() {
                return Err(Error::InvalidModel("coupling has a nonzero diagonal".into()));
            }
            for j in 0..i {
                if self.coupling[i][j] != self.coupling[j][i] {
                    return Err(Error::InvalidModel(format!("coupling is not symmetric at ({i}, {j})")));
                }
            }
        }
        if self.coupling.iter().flatten().chain(&self.field).any(|v| !v.is_finite()) {
            return Err(Error::InvalidModel("non-finite parameter".into()));
        }
        Ok(())
    }

    pub fn log_weight(&self, s: &[T]) -> T {
        let mut w = T::zero();
        for (i, row) in self.coupling.iter().enumerate() {
            let inner: T = row.iter().zip(s).map(|(&j, &x)| j * x).sum();
            w += s[i] * (T::of(0.5) * inner + self.field[i]);
        }
        w
    }

    /// `Σ_j J_ij σ_j + h_i`; the conditional log-odds of `σ_i` per unit.
    pub fn local_field(&self, s: &[T], i: usize) -> T {
        self.coupling[i].iter().zip(s).map(|(&j, &x)| j * x).sum::<T>() + self.field[i]
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct IsingReport {
    pub max_row_sum: f64,
    /// `1 - max_i Σ_j |J_ij|`.
    pub alpha: f64,
    /// `max_i |h_i|`.
    pub alpha_tilde: f64,
    /// Row-sum condition `max_i Σ_j |J_ij| < 1`.
    pub condition_holds: bool,
}

pub fn build_ising<T: Real>(spec: &IsingSpec<T>) -> Result<(Measure<T>, IsingReport)> {
    spec.validate()?;
    let max_row_sum = spec
        .coupling
        .iter()
        .map(|r| r.iter().map(|v| v.abs().to64()).sum::<f64>())
        .fold(0.0, f64::max);
    let alpha_tilde = spec.field.iter().map(|h| h.abs().to64()).fold(0.0, f64::max);
    let report = IsingReport {
        max_row_sum,
        alpha: 1.0 - max_row_sum,
        alpha_tilde,
        condition_holds: max_row_sum < 1.0,
    };
    let measure = Measure::gibbs(ProductSpace::hypercube(spec.n()), Potential::Ising(spec.clone()))?;
    Ok((measure, report))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Graph {
    pub n: usize,
    pub edges: Vec<(usize, usize)>,
}

impl Graph {
    pub fn new(n: usize, edges: Vec<(usize, usize)>) -> Result<Self> {
        let g = Self { n, edges };
        g.validate()?;
        Ok(g)
    }

    pub fn validate(&self) -> Result<()> {
        for (k, &(u, v)) in self.edges.iter().enumerate() {
            if u >= self.n || v >= self.n || u == v {
                return Err(Error::InvalidModel(format!("edge ({u}, {v}) is not a simple edge on {} vertices", self.n)));
            }
            if self.edges[..k].iter().any(|&(a, b)| (a, b) == (u, v) || (a, b) == (v, u)) {
                return Err(Error::InvalidModel(format!("duplicate edge ({u}, {v})")));
            }
        }
        Ok(())
    }

    pub fn complete(n: usize) -> Self {
        let edges = (0..n).flat_map(|u| (u + 1..n).map(move |v| (u, v))).collect();
        Self { n, edges }
    }

    pub fn path(n: usize) -> Self {
        Self { n, edges: (1..n).map(|v| (v - 1, v)).collect() }
    }

    pub fn cycle(n: usize) -> Self {
        let mut g = Self::path(n);
        if n > 2 {
            g.edges.push((n - 1, 0));
        }
        g
    }

    pub fn degree(&self, v: usize) -> usize {
        self.edges.iter().filter(|&&(a, b)| a == v || b == v).count()
    }

    pub fn max_degree(&self) -> usize {
        (0..self.n).map(|v| self.degree(v)).max().unwrap_or(0)
    }

    fn has_edge(&self, u: usize, v: usize) -> bool {
        self.edges.iter().any(|&(a, b)| (a, b) == (u, v) || (a, b) == (v, u))
    }

    fn is_connected(&self) -> bool {
        if self.n == 0 {
            return true;
        }
        let mut seen = vec![false; self.n];
        let mut stack = vec![0];
        seen[0] = true;
        while let Some(u) = stack.pop() {
            for v in 0..self.n {
                if !seen[v] && self.has_edge(u, v) {
                    seen[v] = true;
                    stack.push(v);
                }
            }
        }
        seen.into_iter().all(|s| s)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ColoringReport {
    pub max_degree: usize,
    pub colors: usize,
    /// `k >= 2Δ + 1`.
    pub condition_holds: bool,
    pub proper_colorings: usize,
}

/// Uniform measure on the proper `k`-colorings of `graph`; colors are the
/// values `0, 1, .., k-1`.
pub fn build_coloring<T: Real>(graph: &Graph, k: usize) -> Result<(Measure<T>, ColoringReport)> {
    graph.validate()?;
    if k == 0 {
        return Err(Error::NoProperColoring);
    }
    let colors: Vec<T> = (0..k).map(T::of_usize).collect();
    let space = ProductSpace::uniform(graph.n, &colors)?;
    let count = space.checked_count(DEFAULT_CAP)?;
    let proper: Vec<bool> = (0..count)
        .map(|idx| {
            let p = space.point_of(idx);
            graph.edges.iter().all(|&(u, v)| p[u] != p[v])
        })
        .collect();
    let total = proper.iter().filter(|&&b| b).count();
    if total == 0 {
        return Err(Error::NoProperColoring);
    }
    let mass = T::one() / T::of_usize(total);
    let table = proper.iter().map(|&b| if b { mass } else { T::zero() }).collect();
    let max_degree = graph.max_degree();
    let report = ColoringReport {
        max_degree,
        colors: k,
        condition_holds: k > 2 * max_degree,
        proper_colorings: total,
    };
    Ok((Measure::exact(space, table)?, report))
}

/// A small simple graph counted as a subgraph of the edge configuration.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Motif {
    pub vertices: usize,
    pub edges: Vec<(usize, usize)>,
}

impl Motif {
    pub fn edge() -> Self {
        Self { vertices: 2, edges: vec![(0, 1)] }
    }

    pub fn triangle() -> Self {
        Self { vertices: 3, edges: vec![(0, 1), (1, 2), (0, 2)] }
    }

    /// Two edges sharing a vertex.
    pub fn two_star() -> Self {
        Self { vertices: 3, edges: vec![(0, 1), (0, 2)] }
    }

    fn graph(&self) -> Graph {
        Graph { n: self.vertices, edges: self.edges.clone() }
    }

    /// Number of automorphisms.
    pub fn automorphisms(&self) -> usize {
        let g = self.graph();
        injections(self.vertices, self.vertices)
            .filter(|phi| self.edges.iter().all(|&(a, b)| g.has_edge(phi[a], phi[b])))
            .count()
    }
}

/// Every injective map `[m] -> [n]`, as a vector of images.
fn injections(m: usize, n: usize) -> impl Iterator<Item = Vec<usize>> {
    let mut stack: Vec<usize> = Vec::with_capacity(m);
    let mut next = 0usize;
    let mut done = m > n;
    std::iter::from_fn(move || {
        if done {
            return None;
        }
        loop {
            if stack.len() == m {
                let out = stack.clone();
                // backtrack for the next call
                match stack.pop() {
                    Some(v) => next = v + 1,
                    None => done = true,
                }
                return Some(out);
            }
            if next >= n {
                match stack.pop() {
                    Some(v) => next = v + 1,
                    None => {
                        done = true;
                        return None;
                    }
                }
                continue;
            }
            if stack.contains(&next) {
                next += 1;
                continue;
            }
            stack.push(next);
            next = 0;
        }
    })
}

/// Flat index of the edge `{u, v}`, pairs `(u < v)` in lexicographic order.
pub fn edge_index(n: usize, u: usize, v: usize) -> usize {
    let (u, v) = if u < v { (u, v) } else { (v, u) };
    u * n - u * (u + 1) / 2 + (v - u - 1)
}

/// Copies of `motif` in the graph on `n` vertices whose edge indicators are
/// `x`: labeled injective embeddings divided by the automorphism count.
pub fn subgraph_count<T: Real>(motif: &Motif, n: usize, x: &[T]) -> T {
    let aut = motif.automorphisms();
    let mut total = T::zero();
    for phi in injections(motif.vertices, n) {
        total += motif
            .edges
            .iter()
            .fold(T::one(), |acc, &(a, b)| acc * x[edge_index(n, phi[a], phi[b])]);
    }
    total / T::of_usize(aut)
}

/// Exponential random graph model on `n` labeled vertices.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ErgmSpec<T> {
    pub n: usize,
    /// The first motif must be the single edge.
    pub motifs: Vec<Motif>,
    pub betas: Vec<T>,
}

impl<T: Real> ErgmSpec<T> {
    /// Edge and triangle terms.
    pub fn edge_triangle(n: usize, beta_edge: T, beta_triangle: T) -> Self {
        Self { n, motifs: vec![Motif::edge(), Motif::triangle()], betas: vec![beta_edge, beta_triangle] }
    }

    pub fn validate(&self) -> Result<()> {
        if self.n < 2 {
            return Err(Error::InvalidModel("an ERGM needs at least two vertices".into()));
        }
        if self.motifs.len() != self.betas.len() {
            return Err(Error::InvalidModel("one parameter per motif".into()));
        }
        if self.motifs.first() != Some(&Motif::edge()) {
            return Err(Error::InvalidModel("the first motif must be a single edge".into()));
        }
        for m in &self.motifs {
            let g = m.graph();
            g.validate()?;
            if m.edges.is_empty() || !g.is_connected() {
                return Err(Error::InvalidModel(format!("motif {:?} is not connected", m.edges)));
            }
        }
        if self.betas.iter().any(|b| !b.is_finite()) {
            return Err(Error::InvalidModel("non-finite parameter".into()));
        }
        Ok(())
    }

    pub fn edge_count(&self) -> usize {
        self.n * (self.n - 1) / 2
    }

    /// `Σ_i β_i n^{2-|V_i|} N_{G_i}(x)`.
    pub fn log_weight(&self, x: &[T]) -> T {
        let n = T::of_usize(self.n);
        self.motifs
            .iter()
            .zip(&self.betas)
            .filter(|(_, &b)| b != T::zero())
            .map(|(m, &b)| b * n.powi(2 - m.vertices as i32) * subgraph_count(m, self.n, x))
            .sum()
    }

    /// `Φ'_{|β|}(1) = Σ_i |β_i| |E_i| (|E_i| - 1)`.
    pub fn phi_prime(&self) -> f64 {
        self.motifs
            .iter()
            .zip(&self.betas)
            .map(|(m, b)| {
                let e = m.edges.len() as f64;
                b.abs().to64() * e * (e - 1.0)
            })
            .sum()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ErgmReport {
    pub phi_prime: f64,
    /// `½ Φ'_{|β|}(1) < 1`.
    pub condition_holds: bool,
}

pub fn build_ergm<T: Real>(spec: &ErgmSpec<T>) -> Result<(Measure<T>, ErgmReport)> {
    spec.validate()?;
    let phi_prime = spec.phi_prime();
    let report = ErgmReport { phi_prime, condition_holds: 0.5 * phi_prime < 1.0 };
    let measure = Measure::gibbs(ProductSpace::binary(spec.edge_count()), Potential::Ergm(spec.clone()))?;
    Ok((measure, report))
}

/// Systematic-scan heat-bath chain: each sweep resamples coordinates
/// `0, 1, .., n-1` in order from their exact single-site conditionals.
#[derive(Clone, Debug)]
pub struct GlauberChain<T: Real> {
    measure: Measure<T>,
    state: Vec<usize>,
    rng: ChaCha8Rng,
    steps: u64,
}

impl<T: Real> GlauberChain<T> {
    /// Starts from an i.i.d. draw for explicit measures and a uniform point
    /// for Gibbs measures.
    pub fn new(measure: Measure<T>, seed: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let space = measure.space();
        let state = measure
            .sample_iid(&mut rng)
            .unwrap_or_else(|| (0..space.n()).map(|i| rng.random_range(0..space.size(i))).collect());
        Self { measure, state, rng, steps: 0 }
    }

    pub fn with_state(measure: Measure<T>, state: Vec<usize>, seed: u64) -> Result<Self> {
        if state.len() != measure.n() {
            return Err(Error::DimensionMismatch { expected: measure.n(), found: state.len() });
        }
        Ok(Self { measure, state, rng: ChaCha8Rng::seed_from_u64(seed), steps: 0 })
    }

    pub fn state(&self) -> &[usize] {
        &self.state
    }

    pub fn steps(&self) -> u64 {
        self.steps
    }

    pub fn step(&mut self, i: usize) -> Result<()> {
        let cond = self.measure.conditional(&self.state, i)?;
        self.state[i] = sample_index(&cond, &mut self.rng);
        self.steps += 1;
        Ok(())
    }

    pub fn sweep(&mut self) -> Result<()> {
        (0..self.state.len()).try_for_each(|i| self.step(i))
    }
}

/// Runs `burn_in` sweeps, then `sweeps` further sweeps, emitting the state
/// after every `thinning`-th one.
pub fn glauber_sample<T: Real>(
    measure: &Measure<T>,
    sweeps: usize,
    burn_in: usize,
    thinning: usize,
    seed: u64,
) -> Result<Vec<Vec<usize>>> {
    if sweeps == 0 || thinning == 0 {
        return Err(Error::Domain("sweeps and thinning must be positive".into()));
    }
    let mut chain = GlauberChain::new(measure.clone(), seed);
    for _ in 0..burn_in {
        chain.sweep()?;
    }
    let mut out = Vec::with_capacity(sweeps / thinning);
    for s in 1..=sweeps {
        chain.sweep()?;
        if s % thinning == 0 {
            out.push(chain.state().to_vec());
        }
    }
    Ok(out)
}

/// One systematic sweep applied to a distribution over the whole space.
pub fn sweep_distribution<T: Real>(measure: &Measure<T>, dist: &[T]) -> Result<Vec<T>> {
    let space = measure.space();
    let count = space.checked_count(DEFAULT_CAP)?;
    if dist.len() != count {
        return Err(Error::DimensionMismatch { expected: count, found: dist.len() });
    }
    let strides = space.strides();
    let mut cur = dist.to_vec();
    for i in 0..space.n() {
        let mut next = vec![T::zero(); count];
        for idx in 0..count {
            let point = space.point_of(idx);
            let own = point[i];
            if own != 0 {
                continue;
            }
            // `idx` is the base of the section along coordinate `i`
            let section: T = (0..space.size(i)).map(|a| cur[idx + a * strides[i]]).sum();
            if section == T::zero() {
                continue;
            }
            let cond = match measure.conditional(&point, i) {
                Ok(c) => c,
                Err(Error::UndefinedConditional { .. }) => {
                    return Err(Error::Domain("distribution charges a null section".into()))
                }
                Err(e) => return Err(e),
            };
            for (a, &c) in cond.iter().enumerate() {
                next[idx + a * strides[i]] = section * c;
            }
        }
        cur = next;
    }
    Ok(cur)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ChiSquare {
    pub statistic: f64,
    pub dof: usize,
    pub p_value: f64,
}

/// Pearson goodness of fit of `counts` against `probs`, over bins of
/// positive probability.
pub fn chi_square<T: Real>(counts: &[u64], probs: &[T]) -> Result<ChiSquare> {
    if counts.len() != probs.len() {
        return Err(Error::DimensionMismatch { expected: probs.len(), found: counts.len() });
    }
    let total: u64 = counts.iter().sum();
    let mut statistic = 0.0;
    let mut bins = 0usize;
    for (&c, p) in counts.iter().zip(probs) {
        let p = p.to64();
        if p > 0.0 {
            let e = p * total as f64;
            statistic += (c as f64 - e).powi(2) / e;
            bins += 1;
        } else if c > 0 {
            return Ok(ChiSquare { statistic: f64::INFINITY, dof: bins.max(1), p_value: 0.0 });
        }
    }
    if bins < 2 || total == 0 {
        return Err(Error::Degenerate("chi-square needs two bins and some counts".into()));
    }
    let dof = bins - 1;
    let dist = ChiSquared::new(dof as f64).map_err(|e| Error::Degenerate(e.to_string()))?;
    Ok(ChiSquare { statistic, dof, p_value: 1.0 - dist.cdf(statistic) })
}

/// Histogram of sampled points over the flat index range.
pub fn histogram<T: Real>(space: &ProductSpace<T>, samples: &[Vec<usize>]) -> Result<Vec<u64>> {
    let mut h = vec![0u64; space.checked_count(DEFAULT_CAP)?];
    for s in samples {
        h[space.index_of(s)] += 1;
    }
    Ok(h)
}

/// One configuration per row, coordinate values separated by commas.
pub fn write_samples_csv<T: Real, W: Write>(space: &ProductSpace<T>, samples: &[Vec<usize>], mut w: W) -> Result<()> {
    let header: Vec<String> = (0..space.n()).map(|i| format!("x{i}")).collect();
    writeln!(w, "{}", header.join(","))?;
    for s in samples {
        let row: Vec<String> = space.values_of(s).iter().map(|v| v.to_string()).collect();
        writeln!(w, "{}", row.join(","))?;
    }
    Ok(())
}

pub const SAMPLE_MAGIC: &[u8; 8] = b"CONCSAMP";

/// Binary layout: magic, `n` and sample count as little-endian `u64`, then
/// one `u8` alphabet index per coordinate.
pub fn write_samples_binary<W: Write>(n: usize, samples: &[Vec<usize>], mut w: W) -> Result<()> {
    w.write_all(SAMPLE_MAGIC)?;
    w.write_all(&(n as u64).to_le_bytes())?;
    w.write_all(&(samples.len() as u64).to_le_bytes())?;
    let mut buf = Vec::with_capacity(n * samples.len());
    for s in samples {
        if s.len() != n {
            return Err(Error::DimensionMismatch { expected: n, found: s.len() });
        }
        for &a in s {
            buf.push(u8::try_from(a).map_err(|_| Error::Domain(format!("alphabet index {a} exceeds u8")))?);
        }
    }
    w.write_all(&buf)?;
    Ok(())
}

pub fn read_samples_binary<R: Read>(mut r: R) -> Result<(usize, Vec<Vec<usize>>)> {
    let mut magic = [0u8; 8];
    r.read_exact(&mut magic)?;
    if &magic != SAMPLE_MAGIC {
        return Err(Error::Domain("missing CONCSAMP header".into()));
    }
    let mut word = [0u8; 8];
    r.read_exact(&mut word)?;
    let n = u64::from_le_bytes(word) as usize;
    r.read_exact(&mut word)?;
    let count = u64::from_le_bytes(word) as usize;
    let mut buf = vec![0u8; n * count];
    r.read_exact(&mut buf)?;
    let samples = if n == 0 {
        vec![Vec::new(); count]
    } else {
        buf.chunks(n).map(|c| c.iter().map(|&b| b as usize).collect()).collect()
    };
    Ok((n, samples))
}

impl<T: Real> Measure<T> {
    /// Whether this is a Gibbs measure (sampled by Glauber dynamics).
    pub fn is_gibbs(&self) -> bool {
        matches!(self.kind(), MeasureKind::Gibbs { .. })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn zero_ising_is_uniform() {
        let spec = IsingSpec::<f64>::new(vec![vec![0.0; 3]; 3], vec![0.0; 3]).unwrap();
        let (m, report) = build_ising(&spec).unwrap();
        assert!(report.condition_holds);
        for p in m.probabilities(DEFAULT_CAP).unwrap() {
            assert_abs_diff_eq!(p, 0.125, epsilon = 1e-15);
        }
    }

    #[test]
    fn two_site_ising_table() {
        let spec = IsingSpec::<f64>::new(vec![vec![0.0, 0.3], vec![0.3, 0.0]], vec![0.0; 2]).unwrap();
        let (m, _) = build_ising(&spec).unwrap();
        let p = m.probabilities(DEFAULT_CAP).unwrap();
        let z = 2.0 * 0.3f64.exp() + 2.0 * (-0.3f64).exp();
        let expect = [0.3f64.exp() / z, (-0.3f64).exp() / z, (-0.3f64).exp() / z, 0.3f64.exp() / z];
        for (a, b) in p.iter().zip(expect) {
            assert_abs_diff_eq!(*a, b, epsilon = 1e-15);
        }
        // conditionals from the table agree with the Gibbs form
        let exact = Measure::exact(m.space().clone(), p).unwrap();
        for idx in 0..4 {
            let pt = m.space().point_of(idx);
            for i in 0..2 {
                let a = m.conditional(&pt, i).unwrap();
                let b = exact.conditional(&pt, i).unwrap();
                assert_abs_diff_eq!(a[0], b[0], epsilon = 1e-14);
            }
        }
    }

    #[test]
    fn asymmetric_coupling_rejected() {
        assert!(IsingSpec::<f64>::new(vec![vec![0.0, 0.3], vec![0.2, 0.0]], vec![0.0; 2]).is_err());
    }

    #[test]
    fn curie_weiss_condition() {
        for (beta, ok) in [(0.9, true), (1.2, true), (1.3, false)] {
            let (_, r) = build_ising(&IsingSpec::<f64>::curie_weiss(5, beta)).unwrap();
            // row sum β(n-1)/n
            assert_abs_diff_eq!(r.max_row_sum, beta * 4.0 / 5.0, epsilon = 1e-12);
            assert_eq!(r.condition_holds, ok);
        }
    }

    #[test]
    fn coloring_counts() {
        let (m, r) = build_coloring::<f64>(&Graph::complete(3), 3).unwrap();
        assert_eq!(r.proper_colorings, 6);
        assert!(m.probabilities(DEFAULT_CAP).unwrap().iter().all(|&p| p == 0.0 || (p - 1.0 / 6.0).abs() < 1e-15));
        let (_, r) = build_coloring::<f64>(&Graph::path(3), 2).unwrap();
        assert_eq!(r.proper_colorings, 2);
        let (m, r) = build_coloring::<f64>(&Graph::new(3, vec![]).unwrap(), 2).unwrap();
        assert_eq!(r.proper_colorings, 8);
        assert!(r.condition_holds);
        assert!(m.probabilities(DEFAULT_CAP).unwrap().iter().all(|&p| (p - 0.125).abs() < 1e-15));
        assert!(matches!(build_coloring::<f64>(&Graph::complete(3), 2), Err(Error::NoProperColoring)));
    }

    #[test]
    fn automorphisms_and_edge_index() {
        assert_eq!(Motif::edge().automorphisms(), 2);
        assert_eq!(Motif::triangle().automorphisms(), 6);
        assert_eq!(Motif::two_star().automorphisms(), 2);
        let n = 5;
        let mut k = 0;
        for u in 0..n {
            for v in u + 1..n {
                assert_eq!(edge_index(n, u, v), k);
                assert_eq!(edge_index(n, v, u), k);
                k += 1;
            }
        }
        assert_eq!(injections(2, 3).count(), 6);
        assert_eq!(injections(3, 2).count(), 0);
    }

    fn brute_triangles(n: usize, x: &[f64]) -> f64 {
        let mut c = 0.0;
        for a in 0..n {
            for b in a + 1..n {
                for d in b + 1..n {
                    c += x[edge_index(n, a, b)] * x[edge_index(n, b, d)] * x[edge_index(n, a, d)];
                }
            }
        }
        c
    }

    fn brute_two_stars(n: usize, x: &[f64]) -> f64 {
        // centre v with an unordered pair of neighbours
        let mut c = 0.0;
        for v in 0..n {
            for a in 0..n {
                for b in a + 1..n {
                    if a != v && b != v {
                        c += x[edge_index(n, v, a)] * x[edge_index(n, v, b)];
                    }
                }
            }
        }
        c
    }

    #[test]
    fn ergm_phi_and_validation() {
        let s = ErgmSpec::<f64>::edge_triangle(4, 0.5, 0.2);
        assert_abs_diff_eq!(s.phi_prime(), 1.2, epsilon = 1e-15);
        assert_abs_diff_eq!(ErgmSpec::<f64>::edge_triangle(4, -3.0, 0.0).phi_prime(), 0.0);
        let (_, r) = build_ergm(&ErgmSpec::<f64>::edge_triangle(4, 0.0, 0.4)).unwrap();
        assert!(!r.condition_holds);
        let bad = ErgmSpec::<f64> {
            n: 4,
            motifs: vec![Motif::edge(), Motif { vertices: 4, edges: vec![(0, 1), (2, 3)] }],
            betas: vec![0.0, 0.1],
        };
        assert!(bad.validate().is_err());
    }

    #[test]
    fn null_ergm_is_uniform() {
        let (m, _) = build_ergm(&ErgmSpec::<f64>::edge_triangle(4, 0.0, 0.0)).unwrap();
        assert!(m.probabilities(DEFAULT_CAP).unwrap().iter().all(|&p| (p - 1.0 / 64.0).abs() < 1e-15));
    }

    #[test]
    fn sweep_leaves_target_invariant() {
        let spec = IsingSpec::<f64>::new(
            vec![vec![0.0, 0.2, -0.1], vec![0.2, 0.0, 0.3], vec![-0.1, 0.3, 0.0]],
            vec![0.1, -0.2, 0.05],
        )
        .unwrap();
        let (m, _) = build_ising(&spec).unwrap();
        let p = m.probabilities(DEFAULT_CAP).unwrap();
        let q = sweep_distribution(&m, &p).unwrap();
        for (a, b) in p.iter().zip(&q) {
            assert_abs_diff_eq!(*a, b, epsilon = 1e-12);
        }
        let (c, _) = build_coloring::<f64>(&Graph::cycle(4), 3).unwrap();
        let p = c.probabilities(DEFAULT_CAP).unwrap();
        let q = sweep_distribution(&c, &p).unwrap();
        for (a, b) in p.iter().zip(&q) {
            assert_abs_diff_eq!(*a, b, epsilon = 1e-12);
        }
    }

    #[test]
    fn product_glauber_matches_marginals_and_is_deterministic() {
        let m = Measure::product(ProductSpace::<f64>::binary(2), vec![vec![0.3, 0.7], vec![0.5, 0.5]]).unwrap();
        let a = glauber_sample(&m, 20_000, 1, 1, 7).unwrap();
        let b = glauber_sample(&m, 20_000, 1, 1, 7).unwrap();
        assert_eq!(a, b);
        let ones = a.iter().filter(|s| s[0] == 1).count() as f64 / a.len() as f64;
        assert!((ones - 0.7).abs() < 4.0 * (0.21f64 / 20_000.0).sqrt());
        let h = histogram(m.space(), &a).unwrap();
        assert!(chi_square(&h, &m.probabilities(DEFAULT_CAP).unwrap()).unwrap().p_value > 1e-4);
    }

    #[test]
    fn binary_round_trip() {
        let samples = vec![vec![0, 1, 2], vec![2, 2, 0]];
        let mut buf = Vec::new();
        write_samples_binary(3, &samples, &mut buf).unwrap();
        assert_eq!(&buf[..8], b"CONCSAMP");
        assert_eq!(buf.len(), 8 + 16 + 6);
        let (n, back) = read_samples_binary(&buf[..]).unwrap();
        assert_eq!(n, 3);
        assert_eq!(back, samples);
        assert!(read_samples_binary(&b"NOTMAGIC"[..]).is_err());
        let mut csv = Vec::new();
        write_samples_csv(&ProductSpace::<f64>::hypercube(3), &[vec![0, 1, 1]], &mut csv).unwrap();
        assert_eq!(String::from_utf8(csv).unwrap(), "x0,x1,x2\n-1,1,1\n");
    }

    proptest::proptest! {
        #[test]
        fn subgraph_counts_match_brute_force(n in 3usize..=7, bits in proptest::collection::vec(proptest::bool::ANY, 21)) {
            let e = n * (n - 1) / 2;
            let x: Vec<f64> = bits[..e].iter().map(|&b| if b { 1.0 } else { 0.0 }).collect();
            proptest::prop_assert_eq!(subgraph_count(&Motif::triangle(), n, &x), brute_triangles(n, &x));
            proptest::prop_assert_eq!(subgraph_count(&Motif::two_star(), n, &x), brute_two_stars(n, &x));
            proptest::prop_assert_eq!(subgraph_count(&Motif::edge(), n, &x), x.iter().sum::<f64>());
        }
    }
}
