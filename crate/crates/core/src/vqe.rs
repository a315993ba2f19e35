//! Jordan-Wigner transforms, commuting-group decompositions, and a
//! statevector VQE loop.
//!
//! Pauli strings are stored in symplectic form: a pair of bit masks (x, z)
//! denoting the operator ∏_q X_q^{x_q} Z_q^{z_q} (X to the left of Z on each
//! qubit); Y_q = i X_q Z_q, with the phase absorbed into coefficients.

use crate::error::{Error, Result};
use crate::fock::FockState;
use crate::graph::Graph;
use crate::operators::{Factor, FermionOperator};
use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde_json::json;
use std::collections::BTreeMap;
use std::fmt;

/// A Pauli string in symplectic (x, z) mask form.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct PauliString {
    pub x: u64,
    pub z: u64,
}

impl PauliString {
    pub const IDENTITY: PauliString = PauliString { x: 0, z: 0 };

    /// Strings commute iff the symplectic form x1·z2 + z1·x2 vanishes mod 2.
    pub fn commutes(self, other: PauliString) -> bool {
        ((self.x & other.z).count_ones() + (self.z & other.x).count_ones()) % 2 == 0
    }

    /// P² = (−1)^{|x∧z|} I.
    fn square_sign(self) -> f64 {
        if (self.x & self.z).count_ones() % 2 == 0 {
            1.0
        } else {
            -1.0
        }
    }

    /// Apply to a computational basis index: X^x Z^z |b⟩ = (−1)^{z·b}|b ⊕ x⟩.
    pub fn apply_basis(self, b: u64) -> (u64, f64) {
        let sign = if (self.z & b).count_ones() % 2 == 0 {
            1.0
        } else {
            -1.0
        };
        (b ^ self.x, sign)
    }

    fn label(self, m: usize) -> String {
        let mut s = String::new();
        for q in 0..m {
            let xb = self.x >> q & 1 == 1;
            let zb = self.z >> q & 1 == 1;
            let p = match (xb, zb) {
                (false, false) => continue,
                (true, false) => 'X',
                (false, true) => 'Z',
                (true, true) => 'Y',
            };
            if !s.is_empty() {
                s.push(' ');
            }
            s.push(p);
            s.push_str(&q.to_string());
        }
        if s.is_empty() {
            s.push('I');
        }
        s
    }
}

/// A complex combination of Pauli strings on `m` qubits.
#[derive(Clone, Debug, PartialEq)]
pub struct QubitOperator {
    pub m: usize,
    terms: BTreeMap<PauliString, Complex64>,
}

const MERGE_TOL: f64 = 1e-14;

impl QubitOperator {
    pub fn zero(m: usize) -> Self {
        QubitOperator {
            m,
            terms: BTreeMap::new(),
        }
    }

    pub fn identity(m: usize) -> Self {
        let mut op = Self::zero(m);
        op.terms.insert(PauliString::IDENTITY, Complex64::new(1.0, 0.0));
        op
    }

    /// Add `coeff` times the string, merging duplicates. Note that the
    /// coefficient convention includes the i per Y factor (Y = iXZ).
    pub fn add_string(&mut self, coeff: Complex64, s: PauliString) {
        let slot = self.terms.entry(s).or_insert(Complex64::new(0.0, 0.0));
        *slot += coeff;
        if slot.norm() <= MERGE_TOL {
            self.terms.remove(&s);
        }
    }

    pub fn terms(&self) -> impl Iterator<Item = (&PauliString, &Complex64)> {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn add(&self, rhs: &Self) -> Self {
        let mut out = self.clone();
        for (&s, &c) in &rhs.terms {
            out.add_string(c, s);
        }
        out
    }

    pub fn scaled(&self, c: Complex64) -> Self {
        let mut out = Self::zero(self.m);
        for (&s, &v) in &self.terms {
            out.add_string(v * c, s);
        }
        out
    }

    /// String product with the X/Z reordering sign:
    /// (X^a Z^b)(X^c Z^d) = (−1)^{b·c} X^{a⊕c} Z^{b⊕d}.
    pub fn mul(&self, rhs: &Self) -> Self {
        let mut out = Self::zero(self.m);
        for (&s1, &c1) in &self.terms {
            for (&s2, &c2) in &rhs.terms {
                let sign = if (s1.z & s2.x).count_ones() % 2 == 0 {
                    1.0
                } else {
                    -1.0
                };
                out.add_string(
                    c1 * c2 * sign,
                    PauliString {
                        x: s1.x ^ s2.x,
                        z: s1.z ^ s2.z,
                    },
                );
            }
        }
        out
    }

    /// The sum is Hermitian iff every term individually satisfies
    /// conj(c) · (−1)^{|x∧z|} = c (strings are linearly independent).
    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.terms
            .iter()
            .all(|(&s, &c)| (c.conj() * s.square_sign() - c).norm() <= tol)
    }

    /// Dense 2^m matrix (for verification on small m).
    pub fn matrix(&self) -> DMatrix<Complex64> {
        let dim = 1usize << self.m;
        let mut out = DMatrix::zeros(dim, dim);
        for (&s, &c) in &self.terms {
            for b in 0..dim as u64 {
                let (b2, sign) = s.apply_basis(b);
                out[(b2 as usize, b as usize)] += c * sign;
            }
        }
        out
    }

    /// Apply to a statevector.
    pub fn apply(&self, v: &DVector<Complex64>) -> DVector<Complex64> {
        let mut out = DVector::zeros(v.len());
        for (&s, &c) in &self.terms {
            for b in 0..v.len() as u64 {
                let amp = v[b as usize];
                if amp != Complex64::new(0.0, 0.0) {
                    let (b2, sign) = s.apply_basis(b);
                    out[b2 as usize] += c * sign * amp;
                }
            }
        }
        out
    }

    pub fn expectation(&self, v: &DVector<Complex64>) -> Complex64 {
        v.dotc(&self.apply(v))
    }

    pub fn labels(&self) -> Vec<String> {
        self.terms.keys().map(|s| s.label(self.m)).collect()
    }
}

impl fmt::Display for QubitOperator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (&s, &c) in &self.terms {
            writeln!(f, "{c} {}", s.label(self.m))?;
        }
        Ok(())
    }
}

fn check_cap(m: usize) -> Result<()> {
    if m > crate::STATEVECTOR_CAP {
        return Err(Error::CapExceeded {
            m,
            cap: crate::STATEVECTOR_CAP,
        });
    }
    Ok(())
}

/// Jordan-Wigner image of a single ladder operator:
/// a_i† ↦ ½(X_i − iY_i) Z_{<i}, a_i its adjoint.
fn jw_factor(f: Factor, m: usize) -> QubitOperator {
    let low = (1u64 << f.mode) - 1;
    let e = 1u64 << f.mode;
    let mut op = QubitOperator::zero(m);
    // X_i Z⃗ and X_i Z_i Z⃗; the −iY branch contributes +XZ for creation
    // and −XZ for annihilation.
    let sign = if f.create { 1.0 } else { -1.0 };
    op.add_string(Complex64::new(0.5, 0.0), PauliString { x: e, z: low });
    op.add_string(Complex64::new(0.5 * sign, 0.0), PauliString { x: e, z: low | e });
    op
}

/// Exact Jordan-Wigner transform; spectrum-preserving on the full 2^m space.
pub fn jordan_wigner(op: &FermionOperator) -> Result<QubitOperator> {
    check_cap(op.m)?;
    let mut out = QubitOperator::zero(op.m);
    let scale = op.scale();
    for (factors, coeff) in op.terms() {
        let mut term = QubitOperator::identity(op.m).scaled(coeff.to_c64() * scale);
        for &f in factors {
            term = term.mul(&jw_factor(f, op.m));
        }
        out = out.add(&term);
    }
    Ok(out)
}

/// An operator kept as a list of factored top-level terms (the paper's
/// counting unit) alongside nothing else; sum them for the full operator.
#[derive(Clone, Debug)]
pub struct FactoredQubitOperator {
    pub m: usize,
    pub factors: Vec<QubitOperator>,
}

impl FactoredQubitOperator {
    pub fn total(&self) -> QubitOperator {
        self.factors
            .iter()
            .fold(QubitOperator::zero(self.m), |a, b| a.add(b))
    }

    pub fn num_factors(&self) -> usize {
        self.factors.len()
    }
}

use crate::graph::neighbor_projector;

/// B̂ = Σ_i X_i Z⃗_i P̂_i: one factored term per vertex.
pub fn jw_dirac(g: &Graph) -> Result<FactoredQubitOperator> {
    check_cap(g.n)?;
    let mut factors = Vec::with_capacity(g.n);
    for i in 0..g.n {
        let ladder = FermionOperator::creation(i, g.n)
            .add(&FermionOperator::annihilation(i, g.n))?;
        let fermi = ladder.compose(&neighbor_projector(g, i)?)?;
        factors.push(jordan_wigner(&fermi)?);
    }
    Ok(FactoredQubitOperator { m: g.n, factors })
}

/// Δ̂ in the form of the dressed-hopping sum: one factored term per ordered
/// edge plus one projector term per vertex, 2|E| + n ≤ n(d+1) in total.
pub fn jw_laplacian(g: &Graph) -> Result<FactoredQubitOperator> {
    check_cap(g.n)?;
    let mut factors = Vec::new();
    for &(u, v) in g.edges() {
        for (i, j) in [(u, v), (v, u)] {
            let mut hop = FermionOperator::zero(g.n);
            hop.add_term(
                crate::scalar::Coeff::one(),
                &[Factor::creation(i), Factor::annihilation(j)],
            )?;
            let fermi = neighbor_projector(g, i)?
                .compose(&hop)?
                .compose(&neighbor_projector(g, j)?)?;
            factors.push(jordan_wigner(&fermi)?);
        }
    }
    for i in 0..g.n {
        factors.push(jordan_wigner(&neighbor_projector(g, i)?)?);
    }
    Ok(FactoredQubitOperator { m: g.n, factors })
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum GroupingStrategy {
    /// One group per factored top-level term.
    PerTerm,
    /// Greedy coloring of the string anticommutation graph, highest degree
    /// first with lowest-index tie-breaking.
    GreedyColoring,
}

fn verify_group(op: &QubitOperator) -> Result<()> {
    let strings: Vec<PauliString> = op.terms.keys().copied().collect();
    for (a, &s1) in strings.iter().enumerate() {
        for &s2 in &strings[a + 1..] {
            if !s1.commutes(s2) {
                return Err(Error::NonCommutingGroup);
            }
        }
    }
    Ok(())
}

/// Partition into mutually commuting groups. Every returned group is
/// verified pairwise.
pub fn commuting_groups(
    op: &FactoredQubitOperator,
    strategy: GroupingStrategy,
) -> Result<Vec<QubitOperator>> {
    match strategy {
        GroupingStrategy::PerTerm => {
            let groups: Vec<QubitOperator> = op
                .factors
                .iter()
                .filter(|f| !f.is_zero())
                .cloned()
                .collect();
            for g in &groups {
                verify_group(g)?;
            }
            Ok(groups)
        }
        GroupingStrategy::GreedyColoring => {
            let total = op.total();
            let strings: Vec<(PauliString, Complex64)> =
                total.terms.iter().map(|(&s, &c)| (s, c)).collect();
            let k = strings.len();
            let mut adj = vec![Vec::new(); k];
            for a in 0..k {
                for b in a + 1..k {
                    if !strings[a].0.commutes(strings[b].0) {
                        adj[a].push(b);
                        adj[b].push(a);
                    }
                }
            }
            let mut order: Vec<usize> = (0..k).collect();
            order.sort_by_key(|&i| (std::cmp::Reverse(adj[i].len()), i));
            let mut color = vec![usize::MAX; k];
            let mut num_colors = 0;
            for &i in &order {
                let mut used = vec![false; num_colors];
                for &j in &adj[i] {
                    if color[j] != usize::MAX {
                        used[color[j]] = true;
                    }
                }
                let c = (0..num_colors).find(|&c| !used[c]).unwrap_or_else(|| {
                    num_colors += 1;
                    num_colors - 1
                });
                color[i] = c;
            }
            let mut groups = vec![QubitOperator::zero(op.m); num_colors];
            for (i, &(s, c)) in strings.iter().enumerate() {
                groups[color[i]].add_string(c, s);
            }
            for g in &groups {
                verify_group(g)?;
            }
            Ok(groups)
        }
    }
}

/// A layered product ansatz ∏_layers ∏_j exp(i t_{layer,j} H_j) with
/// mutually commuting Hermitian groups.
#[derive(Clone, Debug)]
pub struct AnsatzSpec {
    pub m: usize,
    pub groups: Vec<QubitOperator>,
    pub layers: usize,
}

impl AnsatzSpec {
    pub fn new(m: usize, groups: Vec<QubitOperator>, layers: usize) -> Result<Self> {
        check_cap(m)?;
        for g in &groups {
            if g.m != m {
                return Err(Error::DimensionMismatch {
                    expected: m,
                    got: g.m,
                });
            }
            if !g.is_hermitian(1e-10) {
                return Err(Error::Invalid(
                    "ansatz group generators must be Hermitian".into(),
                ));
            }
            verify_group(g)?;
        }
        Ok(AnsatzSpec { m, groups, layers })
    }

    pub fn num_params(&self) -> usize {
        self.layers * self.groups.len()
    }

    /// The documented JSON surface for reproducibility.
    pub fn to_json(&self, params: &[f64], seed: u64) -> serde_json::Value {
        json!({
            "groups": self.groups.iter().map(|g| g.labels()).collect::<Vec<_>>(),
            "layers": self.layers,
            "params": params,
            "seed": seed,
        })
    }
}

/// exp(i t c P)|v⟩ for one Hermitian term Q = cP with Q² = ω² I:
/// cos(tω)|v⟩ + i sin(tω)/ω Q|v⟩.
fn apply_term_rotation(
    v: &mut DVector<Complex64>,
    s: PauliString,
    c: Complex64,
    t: f64,
) {
    let omega2 = (c * c * s.square_sign()).re;
    let omega = omega2.max(0.0).sqrt();
    if omega <= 1e-300 {
        return;
    }
    let cos = (t * omega).cos();
    let isin = Complex64::new(0.0, (t * omega).sin() / omega);
    let mut out = v.map(|a| a * cos);
    for b in 0..v.len() as u64 {
        let amp = v[b as usize];
        if amp != Complex64::new(0.0, 0.0) {
            let (b2, sign) = s.apply_basis(b);
            out[b2 as usize] += isin * c * sign * amp;
        }
    }
    *v = out;
}

/// Exact statevector of the ansatz applied to a computational basis state.
pub fn ansatz_state(
    spec: &AnsatzSpec,
    initial: FockState,
    params: &[f64],
) -> Result<DVector<Complex64>> {
    if initial.m != spec.m {
        return Err(Error::ModeMismatch {
            expected: spec.m,
            got: initial.m,
        });
    }
    if params.len() != spec.num_params() {
        return Err(Error::DimensionMismatch {
            expected: spec.num_params(),
            got: params.len(),
        });
    }
    let dim = 1usize << spec.m;
    let mut v = DVector::zeros(dim);
    v[initial.word as usize] = Complex64::new(1.0, 0.0);
    for layer in 0..spec.layers {
        for (j, group) in spec.groups.iter().enumerate() {
            let t = params[layer * spec.groups.len() + j];
            // Commuting terms: the group exponential factorizes exactly.
            for (&s, &c) in &group.terms {
                apply_term_rotation(&mut v, s, c, t);
            }
        }
    }
    let norm = v.norm();
    if (norm - 1.0).abs() > 1e-12 {
        return Err(Error::Invalid(format!(
            "ansatz lost normalization: |v| = {norm}"
        )));
    }
    Ok(v)
}

/// Result of a VQE run.
#[derive(Clone, Debug)]
pub struct VqeResult {
    pub energy: f64,
    pub params: Vec<f64>,
    /// Best-so-far energy after each sweep (non-increasing).
    pub trace: Vec<f64>,
    pub restart: usize,
}

const GOLDEN: f64 = 0.618033988749895;

fn golden_section<F: Fn(f64) -> f64>(f: &F, mut a: f64, mut b: f64, iters: usize) -> (f64, f64) {
    let mut c = b - GOLDEN * (b - a);
    let mut d = a + GOLDEN * (b - a);
    let mut fc = f(c);
    let mut fd = f(d);
    for _ in 0..iters {
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - GOLDEN * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + GOLDEN * (b - a);
            fd = f(d);
        }
    }
    let x = (a + b) / 2.0;
    (x, f(x))
}

fn descend(
    spec: &AnsatzSpec,
    h: &QubitOperator,
    initial: FockState,
    params: &mut Vec<f64>,
) -> Result<Vec<f64>> {
    let energy_of = |p: &[f64]| -> Result<f64> {
        let v = ansatz_state(spec, initial, p)?;
        Ok(h.expectation(&v).re)
    };
    let mut best = energy_of(params)?;
    let mut trace = vec![best];
    let max_sweeps = 60;
    for _ in 0..max_sweeps {
        let before = best;
        for k in 0..params.len() {
            let current = params[k];
            let line = |t: f64| {
                let mut p = params.clone();
                p[k] = t;
                energy_of(&p).unwrap_or(f64::INFINITY)
            };
            let (t, e) = golden_section(
                &line,
                current - std::f64::consts::PI,
                current + std::f64::consts::PI,
                40,
            );
            if e < best - 1e-14 {
                params[k] = t;
                best = e;
            }
        }
        trace.push(best);
        if before - best < 1e-10 {
            break;
        }
    }
    Ok(trace)
}

/// Coordinate-descent VQE with parallel random restarts. Deterministic
/// given the seed; ties between restarts break toward the lowest index.
pub fn vqe_run(
    spec: &AnsatzSpec,
    h: &QubitOperator,
    initial: FockState,
    restarts: usize,
    seed: u64,
) -> Result<VqeResult> {
    check_cap(spec.m)?;
    if h.m != spec.m {
        return Err(Error::DimensionMismatch {
            expected: spec.m,
            got: h.m,
        });
    }
    let runs: Vec<Result<VqeResult>> = (0..restarts.max(1))
        .into_par_iter()
        .map(|r| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(r as u64);
            let mut params: Vec<f64> = if r == 0 {
                vec![0.0; spec.num_params()]
            } else {
                (0..spec.num_params())
                    .map(|_| rng.gen_range(-std::f64::consts::PI..std::f64::consts::PI))
                    .collect()
            };
            let trace = descend(spec, h, initial, &mut params)?;
            Ok(VqeResult {
                energy: *trace.last().unwrap(),
                params,
                trace,
                restart: r,
            })
        })
        .collect();
    let mut best: Option<VqeResult> = None;
    for run in runs {
        let run = run?;
        let better = match &best {
            None => true,
            Some(b) => run.energy < b.energy - 1e-15,
        };
        if better {
            best = Some(run);
        }
    }
    Ok(best.unwrap())
}

/// Lowest-index basis state of sector l in the independence space of `g`.
pub fn sector_initial_state(g: &Graph, l: usize) -> Result<FockState> {
    let space = crate::graph::independence_space(g)?;
    let basis = space.sector_basis(l)?;
    basis
        .first()
        .copied()
        .ok_or(Error::EmptySector { l })
}

/// The default number-preserving ansatz for the hard-core model: one
/// projector-dressed hopping group per edge (preserving the independence
/// subspace) plus one single-qubit {Z_i} phase group per vertex.
pub fn default_hardcore_ansatz(g: &Graph, layers: usize) -> Result<AnsatzSpec> {
    let mut groups = Vec::new();
    for &(u, v) in g.edges() {
        let mut hop = FermionOperator::zero(g.n);
        hop.add_term(
            crate::scalar::Coeff::one(),
            &[Factor::creation(u), Factor::annihilation(v)],
        )?;
        let one_way = neighbor_projector(g, u)?
            .compose(&hop)?
            .compose(&neighbor_projector(g, v)?)?;
        let dressed = one_way.add(&one_way.adjoint())?;
        let q = jordan_wigner(&dressed)?;
        if !q.is_zero() {
            groups.push(q);
        }
    }
    for i in 0..g.n {
        let mut z = QubitOperator::zero(g.n);
        z.add_string(
            Complex64::new(1.0, 0.0),
            PauliString {
                x: 0,
                z: 1 << i,
            },
        );
        groups.push(z);
    }
    AnsatzSpec::new(g.n, groups, layers)
}
