//! Hardness-reduction constructions: dual-rail encoding of qubit systems
//! into fermions, the Pauli-to-fermion map, penalty terms, SUSY lifts of
//! arbitrary Hamiltonians, and quantum k-SAT complexes.
//!
//! Mode layout: site 0 (the auxiliary site of the lifts) occupies modes
//! (0, 1); site i occupies modes (2i, 2i+1). The a-mode of a site is the
//! even index, the b-mode the odd one.

use crate::complex::CochainComplex;
use crate::error::{Error, Result};
use crate::fock::{ConstraintSet, FockState, GradedSpace};
use crate::operators::{Factor, FermionOperator};
use crate::scalar::{parse_rational, rat_to_f64, Coeff};
use nalgebra::DMatrix;
use num::bigint::BigInt;
use num::rational::BigRational;
use num::{One, Signed, Zero};
use num_complex::Complex64;
use std::collections::BTreeMap;
use std::fmt;

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum PauliAxis {
    X,
    Y,
    Z,
}

#[derive(Clone, Debug, PartialEq)]
pub struct PauliTerm {
    pub coeff: BigRational,
    /// Qubit index to Pauli axis; empty map is the identity term.
    pub ops: BTreeMap<usize, PauliAxis>,
}

/// A real linear combination of Pauli strings on `n` qubits.
#[derive(Clone, Debug, PartialEq)]
pub struct PauliHamiltonian {
    pub n: usize,
    pub terms: Vec<PauliTerm>,
}

impl PauliHamiltonian {
    pub fn zero(n: usize) -> Self {
        PauliHamiltonian {
            n,
            terms: Vec::new(),
        }
    }

    pub fn identity(n: usize) -> Self {
        PauliHamiltonian {
            n,
            terms: vec![PauliTerm {
                coeff: BigRational::one(),
                ops: BTreeMap::new(),
            }],
        }
    }

    pub fn add_term(&mut self, coeff: BigRational, ops: &[(usize, PauliAxis)]) -> Result<()> {
        let mut map = BTreeMap::new();
        for &(q, ax) in ops {
            if q >= self.n {
                return Err(Error::Invalid(format!(
                    "qubit {q} out of range for {} qubits",
                    self.n
                )));
            }
            if map.insert(q, ax).is_some() {
                return Err(Error::Invalid(format!(
                    "qubit {q} repeated within one Pauli string"
                )));
            }
        }
        self.terms.push(PauliTerm { coeff, ops: map });
        Ok(())
    }

    pub fn sum(&self, rhs: &Self) -> Result<Self> {
        if self.n != rhs.n {
            return Err(Error::DimensionMismatch {
                expected: self.n,
                got: rhs.n,
            });
        }
        let mut out = self.clone();
        out.terms.extend(rhs.terms.iter().cloned());
        Ok(out)
    }

    /// Max string support across terms.
    pub fn locality(&self) -> usize {
        self.terms.iter().map(|t| t.ops.len()).max().unwrap_or(0)
    }

    /// Σ |coefficients|, an upper bound on the operator norm.
    pub fn norm1(&self) -> BigRational {
        self.terms
            .iter()
            .map(|t| t.coeff.abs())
            .fold(BigRational::zero(), |a, b| a + b)
    }

    /// Penalty strength the lift proofs require: 1 + ⌈Σ|coefficients|⌉.
    pub fn default_penalty(&self) -> BigRational {
        BigRational::from_integer(BigInt::one() + self.norm1().ceil().to_integer())
    }

    /// Dense 2^n matrix in the computational basis (qubit q ↔ bit q).
    pub fn matrix(&self) -> DMatrix<Complex64> {
        let dim = 1usize << self.n;
        let mut m = DMatrix::zeros(dim, dim);
        for term in &self.terms {
            let c = rat_to_f64(&term.coeff);
            for col in 0..dim {
                let mut row = col;
                let mut amp = Complex64::new(c, 0.0);
                for (&q, &ax) in &term.ops {
                    let bit = row >> q & 1;
                    match ax {
                        PauliAxis::X => row ^= 1 << q,
                        PauliAxis::Y => {
                            row ^= 1 << q;
                            amp *= if bit == 0 {
                                Complex64::new(0.0, 1.0)
                            } else {
                                Complex64::new(0.0, -1.0)
                            };
                        }
                        PauliAxis::Z => {
                            if bit == 1 {
                                amp = -amp;
                            }
                        }
                    }
                }
                m[(row, col)] += amp;
            }
        }
        m
    }

    pub fn spectrum(&self) -> Result<Vec<f64>> {
        crate::linalg::hermitian_spectrum(&self.matrix())
    }

    /// Parse the Pauli file format: one term per line, `coef P q [P q ...]`
    /// with P ∈ {X, Y, Z}, or `coef I`; `#` comments. Qubit count is the
    /// larger of `min_qubits` and 1 + the highest index seen.
    pub fn parse(text: &str, min_qubits: usize, path: &str) -> Result<Self> {
        let mut raw_terms: Vec<(BigRational, Vec<(usize, PauliAxis)>)> = Vec::new();
        let mut max_q = 0usize;
        for (ln, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let err = |msg: String| Error::Parse {
                path: path.to_string(),
                line: ln + 1,
                msg,
            };
            let mut toks = line.split_whitespace();
            let coef_tok = toks.next().unwrap();
            let coeff = parse_rational(coef_tok)
                .ok_or_else(|| err(format!("invalid coefficient `{coef_tok}`")))?;
            let rest: Vec<&str> = toks.collect();
            if rest.len() == 1 && (rest[0] == "I" || rest[0] == "i") {
                raw_terms.push((coeff, Vec::new()));
                continue;
            }
            if rest.len() % 2 != 0 {
                return Err(err("expected pairs `P q` after the coefficient".into()));
            }
            let mut ops = Vec::new();
            for pair in rest.chunks(2) {
                let ax = match pair[0] {
                    "X" | "x" => PauliAxis::X,
                    "Y" | "y" => PauliAxis::Y,
                    "Z" | "z" => PauliAxis::Z,
                    other => return Err(err(format!("unknown Pauli `{other}`"))),
                };
                let q: usize = pair[1]
                    .parse()
                    .map_err(|_| err(format!("invalid qubit index `{}`", pair[1])))?;
                max_q = max_q.max(q + 1);
                ops.push((q, ax));
            }
            raw_terms.push((coeff, ops));
        }
        let n = min_qubits.max(max_q).max(1);
        let mut h = PauliHamiltonian::zero(n);
        for (coeff, ops) in raw_terms {
            h.add_term(coeff, &ops)?;
        }
        Ok(h)
    }
}

impl fmt::Display for PauliHamiltonian {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for t in &self.terms {
            if t.ops.is_empty() {
                writeln!(f, "{} I", t.coeff)?;
                continue;
            }
            write!(f, "{}", t.coeff)?;
            for (&q, &ax) in &t.ops {
                let p = match ax {
                    PauliAxis::X => "X",
                    PauliAxis::Y => "Y",
                    PauliAxis::Z => "Z",
                };
                write!(f, " {p} {q}")?;
            }
            writeln!(f)?;
        }
        Ok(())
    }
}

/// a-mode index of `site` (b-mode is one above).
pub fn a_mode(site: usize) -> usize {
    2 * site
}

pub fn b_mode(site: usize) -> usize {
    2 * site + 1
}

/// Dual-rail image of an n-bit computational basis state on 2n modes:
/// bit 0 occupies the site's a-mode, bit 1 its b-mode.
pub fn dualrail_encode(bits: u32, n: usize) -> FockState {
    let mut word = 0u32;
    for q in 0..n {
        let bit = bits >> q & 1;
        word |= 1 << (2 * q + bit as usize);
    }
    FockState::new(word, 2 * n)
}

fn site_bilinear(
    op: &mut FermionOperator,
    coeff: Coeff,
    create: usize,
    annihilate: usize,
) -> Result<()> {
    op.add_term(
        coeff,
        &[Factor::creation(create), Factor::annihilation(annihilate)],
    )
}

/// Fermionic image of one Pauli on `site`: σ⁺ → a†b, σ⁻ → b†a, σ^z → n_a − n_b.
fn pauli_site_operator(ax: PauliAxis, site: usize, m: usize) -> Result<FermionOperator> {
    let (a, b) = (a_mode(site), b_mode(site));
    let mut op = FermionOperator::zero(m);
    match ax {
        PauliAxis::X => {
            site_bilinear(&mut op, Coeff::one(), a, b)?;
            site_bilinear(&mut op, Coeff::one(), b, a)?;
        }
        PauliAxis::Y => {
            site_bilinear(&mut op, -Coeff::i(), a, b)?;
            site_bilinear(&mut op, Coeff::i(), b, a)?;
        }
        PauliAxis::Z => {
            site_bilinear(&mut op, Coeff::one(), a, a)?;
            site_bilinear(&mut op, -Coeff::one(), b, b)?;
        }
    }
    Ok(op)
}

fn pauli_to_fermion_at(h: &PauliHamiltonian, m: usize, site_offset: usize) -> Result<FermionOperator> {
    let mut out = FermionOperator::zero(m);
    for term in &h.terms {
        let mut prod = FermionOperator::identity(m)
            .scaled(&Coeff::from_parts(term.coeff.clone(), BigRational::zero()));
        for (&q, &ax) in &term.ops {
            prod = prod.compose(&pauli_site_operator(ax, q + site_offset, m)?)?;
        }
        out = out.add(&prod)?;
    }
    Ok(out)
}

/// Grading-0 fermionic image of a Pauli Hamiltonian on 2n modes.
pub fn pauli_to_fermion(h: &PauliHamiltonian) -> Result<FermionOperator> {
    pauli_to_fermion_at(h, 2 * h.n, 0)
}

fn penalty_at(
    sites: std::ops::Range<usize>,
    j: &BigRational,
    m: usize,
) -> Result<FermionOperator> {
    // n_a n_b + (n_a - 1)(n_b - 1) = 2 n_a n_b - n_a - n_b + 1.
    let jc = Coeff::from_parts(j.clone(), BigRational::zero());
    let mut out = FermionOperator::zero(m);
    for site in sites {
        let (a, b) = (a_mode(site), b_mode(site));
        let mut site_op = FermionOperator::identity(m);
        site_op = site_op.add(
            &FermionOperator::number(a, m)
                .compose(&FermionOperator::number(b, m))?
                .scaled(&Coeff::from_int(2)),
        )?;
        site_op = site_op.sub(&FermionOperator::number(a, m))?;
        site_op = site_op.sub(&FermionOperator::number(b, m))?;
        out = out.add(&site_op.scaled(&jc))?;
    }
    Ok(out)
}

/// B_pen = J Σ_i [n_a n_b + (n_a − 1)(n_b − 1)] over n sites on 2n modes;
/// zero exactly on dual-rail states.
pub fn penalty(n: usize, j: &BigRational) -> Result<FermionOperator> {
    if !j.is_positive() {
        return Err(Error::Invalid("penalty strength J must be positive".into()));
    }
    penalty_at(0..n, j, 2 * n)
}

fn lift_mode_count(n: usize) -> Result<usize> {
    let m = 2 * (n + 1);
    let cap = crate::mode_cap();
    if m > cap {
        return Err(Error::CapExceeded { m, cap });
    }
    Ok(m)
}

/// Supercharge (1/√2)(a₀† + b₀†) B with the symbolic scale attached.
fn aux_lift(b: &FermionOperator, m: usize) -> Result<FermionOperator> {
    let aux = FermionOperator::creation(0, m).add(&FermionOperator::creation(1, m))?;
    Ok(aux.compose(b)?.with_extra_sqrt2_inv(1))
}

/// Penalty-variant SUSY lift: unconstrained space on 2(n+1) modes with
/// d = (1/√2)(a₀† + b₀†)(Â + B_pen).
pub fn susy_lift(h: &PauliHamiltonian, j: &BigRational) -> Result<CochainComplex> {
    if !j.is_positive() {
        return Err(Error::Invalid("penalty strength J must be positive".into()));
    }
    let m = lift_mode_count(h.n)?;
    let b = pauli_to_fermion_at(h, m, 1)?.add(&penalty_at(1..h.n + 1, j, m)?)?;
    let d = aux_lift(&b, m)?;
    CochainComplex::new(GradedSpace::unconstrained(m)?, d)
}

/// Hard-core-variant lift: forbid double occupancy on qubit sites, leave the
/// auxiliary site free, and drop the penalty. Returns the complex and the
/// distinguished level l = n + 2 whose Laplacian spectrum squares spec(A).
pub fn constrained_lift(h: &PauliHamiltonian) -> Result<(CochainComplex, usize)> {
    let m = lift_mode_count(h.n)?;
    let forbidden: Vec<Vec<usize>> = (1..=h.n).map(|i| vec![a_mode(i), b_mode(i)]).collect();
    let space = GradedSpace::new(m, ConstraintSet::new(forbidden, m)?)?;
    let d = aux_lift(&pauli_to_fermion_at(h, m, 1)?, m)?;
    Ok((CochainComplex::new(space, d)?, h.n + 2))
}

/// Max entrywise deviation of Π² from Π.
pub fn projector_residual(p: &PauliHamiltonian) -> f64 {
    let m = p.matrix();
    let sq = &m * &m;
    let mut res: f64 = 0.0;
    for r in 0..m.nrows() {
        for c in 0..m.ncols() {
            res = res.max((sq[(r, c)] - m[(r, c)]).norm());
        }
    }
    res
}

/// Quantum k-SAT complex: the constrained lift of Σ_S Π_S after checking
/// each input is a projector (Π² = Π within 1e-10).
pub fn ksat_complex(projectors: &[PauliHamiltonian]) -> Result<(CochainComplex, usize)> {
    let n = projectors.iter().map(|p| p.n).max().unwrap_or(1);
    let mut total = PauliHamiltonian::zero(n);
    for p in projectors {
        let residual = projector_residual(p);
        if residual > 1e-10 {
            return Err(Error::NotProjector { residual });
        }
        let mut padded = p.clone();
        padded.n = n;
        total = total.sum(&padded)?;
    }
    constrained_lift(&total)
}

/// Compare sorted spec(Δ^l) with the sorted squares of spec(A).
pub fn verify_squared_spectrum(
    h: &PauliHamiltonian,
    c: &CochainComplex,
    l: usize,
    tol: f64,
) -> Result<(bool, f64)> {
    let lap_spec = c.sector_spectrum(l)?;
    let qubit_dim = 1usize << h.n;
    if lap_spec.len() != qubit_dim {
        return Err(Error::DimensionMismatch {
            expected: qubit_dim,
            got: lap_spec.len(),
        });
    }
    let mut squares: Vec<f64> = h.spectrum()?.iter().map(|e| e * e).collect();
    squares.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let deviation = lap_spec
        .iter()
        .zip(&squares)
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max);
    Ok((deviation <= tol, deviation))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::complex::BettiMethod;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn dualrail_examples() {
        // |0⟩: a-mode of the site occupied.
        assert_eq!(dualrail_encode(0b0, 1).word, 0b01);
        assert_eq!(dualrail_encode(0b1, 1).word, 0b10);
        // |01⟩ (qubit 0 = 1, qubit 1 = 0): b of site 0, a of site 1.
        let s = dualrail_encode(0b01, 2);
        assert_eq!(s.word, 0b0110);
        assert_eq!(s.fermion_number(), 2);
    }

    #[test]
    fn pauli_map_single_site() {
        let mut z = PauliHamiltonian::zero(1);
        z.add_term(BigRational::one(), &[(0, PauliAxis::Z)]).unwrap();
        let mut expect = FermionOperator::number(0, 2)
            .sub(&FermionOperator::number(1, 2))
            .unwrap();
        assert_eq!(pauli_to_fermion(&z).unwrap(), expect);

        let mut x = PauliHamiltonian::zero(1);
        x.add_term(BigRational::one(), &[(0, PauliAxis::X)]).unwrap();
        expect = FermionOperator::zero(2);
        expect
            .add_term(
                Coeff::one(),
                &[Factor::creation(0), Factor::annihilation(1)],
            )
            .unwrap();
        expect
            .add_term(
                Coeff::one(),
                &[Factor::creation(1), Factor::annihilation(0)],
            )
            .unwrap();
        assert_eq!(pauli_to_fermion(&x).unwrap(), expect);
    }

    fn random_pauli(n: usize, terms: usize, rng: &mut ChaCha8Rng) -> PauliHamiltonian {
        let mut h = PauliHamiltonian::zero(n);
        for _ in 0..terms {
            let support = rng.gen_range(1..=2.min(n));
            let mut qs: Vec<usize> = (0..n).collect();
            let mut ops = Vec::new();
            for k in 0..support {
                let j = rng.gen_range(k..n);
                qs.swap(k, j);
                let ax = match rng.gen_range(0..3) {
                    0 => PauliAxis::X,
                    1 => PauliAxis::Y,
                    _ => PauliAxis::Z,
                };
                ops.push((qs[k], ax));
            }
            let coeff = BigRational::new(BigInt::from(rng.gen_range(-4i64..=4)), BigInt::from(2));
            h.add_term(coeff, &ops).unwrap();
        }
        h
    }

    #[test]
    fn dualrail_faithfulness() {
        // Matrix elements between encoded basis states reproduce the qubit
        // matrix exactly.
        let mut rng = ChaCha8Rng::seed_from_u64(23);
        for _ in 0..5 {
            let n = 2;
            let h = random_pauli(n, 4, &mut rng);
            let qubit = h.matrix();
            let op = pauli_to_fermion(&h).unwrap();
            let dim = 1usize << n;
            for col in 0..dim {
                let out = op.apply(dualrail_encode(col as u32, n)).unwrap();
                for row in 0..dim {
                    let got = out
                        .get(&dualrail_encode(row as u32, n))
                        .map(|c| c.to_c64())
                        .unwrap_or_default();
                    let want = qubit[(row, col)];
                    assert!(
                        (got - want).norm() < 1e-10,
                        "entry ({row}, {col}): {got} vs {want}"
                    );
                }
            }
        }
    }

    #[test]
    fn penalty_site_values() {
        let j = BigRational::from_integer(BigInt::from(3));
        let p = penalty(1, &j).unwrap();
        let check = |word: u32, expect: i64| {
            let s = FockState::new(word, 2);
            let out = p.apply(s).unwrap();
            let got = out.get(&s).cloned().unwrap_or_else(Coeff::zero);
            assert_eq!(got, Coeff::from_int(expect), "word {word:b}");
        };
        check(0b01, 0); // (1, 0)
        check(0b11, 3); // (1, 1)
        check(0b00, 3); // (0, 0)
    }

    #[test]
    fn susy_lift_dualrail_zero_modes() {
        // A = 0: every dual-rail state is annihilated by both d and d†.
        let h = PauliHamiltonian::zero(2);
        let c = susy_lift(&h, &BigRational::one()).unwrap();
        // Encoded state of |10⟩ shifted past the auxiliary site.
        let enc = dualrail_encode(0b10, 2);
        let lifted = FockState::new(enc.word << 2, 6);
        let l = lifted.fermion_number();
        let idx = c.space().sector_index(l, lifted).unwrap().unwrap();
        let dim = c.space().sector_dim(l).unwrap();
        let mut v = vec![Complex64::default(); dim];
        v[idx] = Complex64::new(1.0, 0.0);
        assert_eq!(c.ground_state_check(l, &v).unwrap(), (0.0, 0.0));
    }

    #[test]
    fn susy_lift_z_lowest_eigenvalues() {
        let mut h = PauliHamiltonian::zero(1);
        h.add_term(BigRational::one(), &[(0, PauliAxis::Z)]).unwrap();
        let c = susy_lift(&h, &BigRational::from_integer(BigInt::from(10))).unwrap();
        let mut all = Vec::new();
        for l in 0..=4 {
            all.extend(c.sector_spectrum(l).unwrap());
        }
        all.sort_by(|a, b| a.partial_cmp(b).unwrap());
        assert_eq!(all.len(), 16);
        // The dual-rail block contributes {1, 1} (squares of ±1), repeated
        // over the 4 auxiliary-site configurations; the rest sit at J² = 100.
        for e in &all[..8] {
            assert!((e - 1.0).abs() < 1e-10, "{all:?}");
        }
        for e in &all[8..] {
            assert!((e - 100.0).abs() < 1e-8, "{all:?}");
        }
    }

    #[test]
    fn susy_lift_squared_spectrum_property() {
        let mut rng = ChaCha8Rng::seed_from_u64(31);
        let h = random_pauli(3, 4, &mut rng);
        let c = susy_lift(&h, &h.default_penalty()).unwrap();
        // spectrum(H) = spectrum(B)² as multisets, B = d + d†.
        let b = c.dirac().unwrap();
        let mut squared: Vec<f64> = crate::linalg::hermitian_spectrum(&b)
            .unwrap()
            .iter()
            .map(|e| e * e)
            .collect();
        squared.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let mut union = Vec::new();
        for l in 0..=c.m() {
            union.extend(c.sector_spectrum(l).unwrap());
        }
        union.sort_by(|a, b| a.partial_cmp(b).unwrap());
        assert_eq!(squared.len(), union.len());
        for (a, b) in squared.iter().zip(&union) {
            assert!((a - b).abs() < 1e-7, "{a} vs {b}");
        }
    }

    #[test]
    fn constrained_lift_z() {
        let mut h = PauliHamiltonian::zero(1);
        h.add_term(BigRational::one(), &[(0, PauliAxis::Z)]).unwrap();
        let (c, l) = constrained_lift(&h).unwrap();
        assert_eq!(l, 3);
        assert_eq!(c.space().sector_dim(3).unwrap(), 2);
        let spec = c.sector_spectrum(3).unwrap();
        for e in spec {
            assert!((e - 1.0).abs() < 1e-12);
        }
        let (ok, dev) = verify_squared_spectrum(&h, &c, l, 1e-10).unwrap();
        assert!(ok, "deviation {dev}");
    }

    #[test]
    fn constrained_lift_extremes() {
        let zero = PauliHamiltonian::zero(2);
        let (c, l) = constrained_lift(&zero).unwrap();
        assert_eq!(c.space().sector_dim(l).unwrap(), 4);
        assert_eq!(c.betti(l, BettiMethod::ExactRank).unwrap(), 4);

        let (c, l) = constrained_lift(&PauliHamiltonian::identity(2)).unwrap();
        assert_eq!(c.betti(l, BettiMethod::ExactRank).unwrap(), 0);
        let spec = c.sector_spectrum(l).unwrap();
        for e in spec {
            assert!((e - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn constrained_lift_kernel_multiplicity() {
        // β_{n+2} equals the 0-eigenvalue multiplicity of A.
        let mut h = PauliHamiltonian::zero(2);
        // A = (I - Z0 Z1)/... use Z0 Z1 itself: eigenvalues ±1, no kernel.
        h.add_term(BigRational::one(), &[(0, PauliAxis::Z), (1, PauliAxis::Z)])
            .unwrap();
        let (c, l) = constrained_lift(&h).unwrap();
        assert_eq!(c.betti(l, BettiMethod::ExactRank).unwrap(), 0);

        // A = Z0 + Z1: kernel spanned by |01⟩, |10⟩.
        let mut h2 = PauliHamiltonian::zero(2);
        h2.add_term(BigRational::one(), &[(0, PauliAxis::Z)]).unwrap();
        h2.add_term(BigRational::one(), &[(1, PauliAxis::Z)]).unwrap();
        let (c2, l2) = constrained_lift(&h2).unwrap();
        assert_eq!(c2.betti(l2, BettiMethod::ExactRank).unwrap(), 2);
    }

    #[test]
    fn ksat_examples() {
        // |1⟩⟨1| = (I - Z)/2.
        let mut p1 = PauliHamiltonian::zero(1);
        p1.add_term(BigRational::new(BigInt::one(), BigInt::from(2)), &[])
            .unwrap();
        p1.add_term(
            BigRational::new(BigInt::from(-1), BigInt::from(2)),
            &[(0, PauliAxis::Z)],
        )
        .unwrap();
        assert!(projector_residual(&p1) < 1e-14);
        let (c, l) = ksat_complex(std::slice::from_ref(&p1)).unwrap();
        assert_eq!(c.betti(l, BettiMethod::ExactRank).unwrap(), 1);

        // Adding |0⟩⟨0| makes the sum the identity: unsatisfiable.
        let mut p0 = PauliHamiltonian::zero(1);
        p0.add_term(BigRational::new(BigInt::one(), BigInt::from(2)), &[])
            .unwrap();
        p0.add_term(
            BigRational::new(BigInt::one(), BigInt::from(2)),
            &[(0, PauliAxis::Z)],
        )
        .unwrap();
        let (c2, l2) = ksat_complex(&[p1.clone(), p0]).unwrap();
        assert_eq!(c2.betti(l2, BettiMethod::ExactRank).unwrap(), 0);
        let spec = c2.sector_spectrum(l2).unwrap();
        assert!((spec[0] - 1.0).abs() < 1e-12);

        // Empty list: top level is all kernel.
        let (c3, l3) = ksat_complex(&[]).unwrap();
        assert_eq!(
            c3.betti(l3, BettiMethod::ExactRank).unwrap(),
            c3.space().sector_dim(l3).unwrap()
        );

        // Non-projector input rejected.
        let mut bad = PauliHamiltonian::zero(1);
        bad.add_term(BigRational::from_integer(BigInt::from(2)), &[(0, PauliAxis::Z)])
            .unwrap();
        assert!(matches!(
            ksat_complex(&[bad]),
            Err(Error::NotProjector { .. })
        ));
    }

    #[test]
    fn squared_spectrum_random_and_negative_control() {
        let mut rng = ChaCha8Rng::seed_from_u64(41);
        let h = random_pauli(4, 5, &mut rng);
        let (c, l) = constrained_lift(&h).unwrap();
        let (ok, dev) = verify_squared_spectrum(&h, &c, l, 1e-8).unwrap();
        assert!(ok, "deviation {dev}");

        // Verifying against a different Hamiltonian must fail.
        let mut shifted = h.clone();
        shifted.add_term(BigRational::from_integer(BigInt::from(3)), &[]).unwrap();
        let (ok, _) = verify_squared_spectrum(&shifted, &c, l, 1e-8).unwrap();
        assert!(!ok);
    }

    #[test]
    fn penalty_gap_bound() {
        // Eigenvectors outside the dual-rail sector have |B| ≥ J − ‖A‖₁.
        let mut h = PauliHamiltonian::zero(1);
        h.add_term(BigRational::new(BigInt::one(), BigInt::from(2)), &[(0, PauliAxis::X)])
            .unwrap();
        let j = BigRational::from_integer(BigInt::from(5));
        let m = 2;
        let b = pauli_to_fermion(&h)
            .unwrap()
            .add(&penalty(1, &j).unwrap())
            .unwrap();
        let space = GradedSpace::unconstrained(m).unwrap();
        // Non-dual-rail states are the l=0 and l=2 sectors.
        for l in [0usize, 2] {
            let mat = b.sector_matrix(&space, l).unwrap().to_dense();
            let spec = crate::linalg::hermitian_spectrum(&mat).unwrap();
            for e in spec {
                assert!(e.abs() >= 5.0 - 0.5 - 1e-12, "sector {l}: {e}");
            }
        }
    }

    #[test]
    fn pauli_parse_round_trip() {
        let text = "0.5 Z 0 Z 1\n-1/4 X 2\n2 I\n";
        let h = PauliHamiltonian::parse(text, 0, "h.txt").unwrap();
        assert_eq!(h.n, 3);
        assert_eq!(h.terms.len(), 3);
        assert_eq!(h.terms[0].coeff, BigRational::new(BigInt::one(), BigInt::from(2)));
        let round = PauliHamiltonian::parse(&h.to_string(), 0, "h.txt").unwrap();
        assert_eq!(h, round);

        let err = PauliHamiltonian::parse("1 Q 0\n", 0, "h.txt").unwrap_err();
        match err {
            Error::Parse { line, .. } => assert_eq!(line, 1),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn lifts_are_graded_and_nilpotent() {
        // CochainComplex construction already verifies; exercise both paths.
        let mut h = PauliHamiltonian::zero(2);
        h.add_term(BigRational::one(), &[(0, PauliAxis::X), (1, PauliAxis::Y)])
            .unwrap();
        let c = susy_lift(&h, &h.default_penalty()).unwrap();
        assert_eq!(c.coboundary().sqrt2_inv_pow(), 1);
        let (c2, _) = constrained_lift(&h).unwrap();
        assert_eq!(c2.coboundary().sqrt2_inv_pow(), 1);
    }
}
