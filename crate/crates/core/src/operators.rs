//! Fermionic operator algebra.
//!
//! Operators are sums of signed creation/annihilation monomials kept in a
//! canonical normal-ordered form: creations in descending mode order, then
//! annihilations in ascending mode order. Products are rewritten with the
//! canonical anticommutation relations, so composition, adjoints, and sector
//! matrices are exact for rational coefficients.

use crate::error::{Error, Result};
use crate::fock::{apply_mode, FockState, GradedSpace, ModeApplication, ModeOp};
use crate::linalg::RatMat;
use crate::scalar::Coeff;
use std::collections::{BTreeMap, HashMap};
use std::fmt;

/// One creation (`create = true`) or annihilation factor at a mode.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct Factor {
    pub mode: usize,
    pub create: bool,
}

impl Factor {
    pub fn creation(mode: usize) -> Self {
        Factor { mode, create: true }
    }
    pub fn annihilation(mode: usize) -> Self {
        Factor { mode, create: false }
    }
}

/// Grading of an operator: definite fermion number or inhomogeneous.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Grading {
    Homogeneous(i64),
    Inhomogeneous,
}

/// A sum of canonical monomials over `m` modes, with an overall symbolic
/// (1/sqrt2)^`sqrt2_inv_pow` scale (always folded to 0 or 1).
#[derive(Clone, Debug, PartialEq)]
pub struct FermionOperator {
    pub m: usize,
    terms: BTreeMap<Vec<Factor>, Coeff>,
    sqrt2_inv_pow: u8,
}

/// Rewrite a monomial into canonical normal order.
///
/// Returns the resulting canonical terms with their signs folded into the
/// coefficients. The CAR rewrite `a_i a_j^dag = delta_ij - a_j^dag a_i`
/// can branch, hence the worklist.
fn normal_order(factors: Vec<Factor>, coeff: Coeff) -> Vec<(Vec<Factor>, Coeff)> {
    let mut done = Vec::new();
    let mut work = vec![(factors, coeff)];
    'outer: while let Some((mut fs, c)) = work.pop() {
        if c.is_zero() {
            continue;
        }
        let mut k = 0;
        while k + 1 < fs.len() {
            let (x, y) = (fs[k], fs[k + 1]);
            match (x.create, y.create) {
                (false, true) => {
                    if x.mode == y.mode {
                        // a a† = 1 - a† a
                        let mut contracted = fs.clone();
                        contracted.drain(k..k + 2);
                        work.push((contracted, c.clone()));
                    }
                    fs.swap(k, k + 1);
                    work.push((fs, -c));
                    continue 'outer;
                }
                (true, true) if x.mode <= y.mode => {
                    if x.mode == y.mode {
                        continue 'outer; // (a†)² = 0
                    }
                    fs.swap(k, k + 1);
                    work.push((fs, -c));
                    continue 'outer;
                }
                (false, false) if x.mode >= y.mode => {
                    if x.mode == y.mode {
                        continue 'outer; // a² = 0
                    }
                    fs.swap(k, k + 1);
                    work.push((fs, -c));
                    continue 'outer;
                }
                _ => k += 1,
            }
        }
        done.push((fs, c));
    }
    done
}

impl FermionOperator {
    pub fn zero(m: usize) -> Self {
        FermionOperator {
            m,
            terms: BTreeMap::new(),
            sqrt2_inv_pow: 0,
        }
    }

    pub fn identity(m: usize) -> Self {
        let mut op = Self::zero(m);
        op.terms.insert(Vec::new(), Coeff::one());
        op
    }

    pub fn creation(i: usize, m: usize) -> Self {
        let mut op = Self::zero(m);
        op.terms.insert(vec![Factor::creation(i)], Coeff::one());
        op
    }

    pub fn annihilation(i: usize, m: usize) -> Self {
        let mut op = Self::zero(m);
        op.terms.insert(vec![Factor::annihilation(i)], Coeff::one());
        op
    }

    /// Number operator `a_i^dag a_i`.
    pub fn number(i: usize, m: usize) -> Self {
        let mut op = Self::zero(m);
        op.terms.insert(
            vec![Factor::creation(i), Factor::annihilation(i)],
            Coeff::one(),
        );
        op
    }

    /// Add `coeff` times the monomial `factors` (left-to-right product),
    /// normal ordering as needed.
    pub fn add_term(&mut self, coeff: Coeff, factors: &[Factor]) -> Result<()> {
        for f in factors {
            if f.mode >= self.m {
                return Err(Error::ModeOutOfRange {
                    i: f.mode,
                    m: self.m,
                });
            }
        }
        for (fs, c) in normal_order(factors.to_vec(), coeff) {
            let vanished = {
                let slot = self.terms.entry(fs.clone()).or_insert_with(Coeff::zero);
                *slot += c;
                slot.is_zero()
            };
            if vanished {
                self.terms.remove(&fs);
            }
        }
        Ok(())
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Vec<Factor>, &Coeff)> {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn sqrt2_inv_pow(&self) -> u8 {
        self.sqrt2_inv_pow
    }

    /// Numerical value of the symbolic scale.
    pub fn scale(&self) -> f64 {
        if self.sqrt2_inv_pow == 1 {
            std::f64::consts::FRAC_1_SQRT_2
        } else {
            1.0
        }
    }

    /// Multiply the symbolic scale by (1/sqrt2)^pow, folding even powers
    /// into the rational coefficients.
    pub fn with_extra_sqrt2_inv(mut self, pow: u32) -> Self {
        let total = self.sqrt2_inv_pow as u32 + pow;
        let halvings = total / 2;
        self.sqrt2_inv_pow = (total % 2) as u8;
        if halvings > 0 {
            debug_assert!(halvings <= 62);
            let half = Coeff::from_ratio(1, 1i64 << halvings.min(62));
            for v in self.terms.values_mut() {
                *v = &*v * &half;
            }
        }
        self
    }

    pub fn scaled(&self, c: &Coeff) -> Self {
        let mut out = self.clone();
        if c.is_zero() {
            return Self::zero(self.m);
        }
        for v in out.terms.values_mut() {
            *v = &*v * c;
        }
        out
    }

    pub fn add(&self, rhs: &Self) -> Result<Self> {
        if self.m != rhs.m {
            return Err(Error::ModeMismatch {
                expected: self.m,
                got: rhs.m,
            });
        }
        if self.is_zero() {
            return Ok(rhs.clone());
        }
        if rhs.is_zero() {
            return Ok(self.clone());
        }
        if self.sqrt2_inv_pow != rhs.sqrt2_inv_pow {
            return Err(Error::ExactUnavailable(
                "cannot add operators with mismatched sqrt2 scales".into(),
            ));
        }
        let mut out = self.clone();
        for (fs, c) in &rhs.terms {
            let slot = out.terms.entry(fs.clone()).or_insert_with(Coeff::zero);
            *slot += c.clone();
        }
        out.terms.retain(|_, v| !v.is_zero());
        Ok(out)
    }

    pub fn sub(&self, rhs: &Self) -> Result<Self> {
        self.add(&rhs.scaled(&Coeff::from_int(-1)))
    }

    /// Hermitian adjoint: conjugate coefficients, reverse factors, flip
    /// creation flags. Canonical in, canonical out.
    pub fn adjoint(&self) -> Self {
        let mut out = Self::zero(self.m);
        out.sqrt2_inv_pow = self.sqrt2_inv_pow;
        for (fs, c) in &self.terms {
            let rev: Vec<Factor> = fs
                .iter()
                .rev()
                .map(|f| Factor {
                    mode: f.mode,
                    create: !f.create,
                })
                .collect();
            // Reversal of a canonical list is canonical again.
            out.terms.insert(rev, c.conj());
        }
        out
    }

    /// Operator product: `compose(a, b)` acts as `a` after `b`.
    pub fn compose(&self, rhs: &Self) -> Result<Self> {
        if self.m != rhs.m {
            return Err(Error::ModeMismatch {
                expected: self.m,
                got: rhs.m,
            });
        }
        let mut out = Self::zero(self.m);
        for (fa, ca) in &self.terms {
            for (fb, cb) in &rhs.terms {
                let mut fs = fa.clone();
                fs.extend_from_slice(fb);
                out.add_term(ca * cb, &fs)?;
            }
        }
        Ok(out.with_extra_sqrt2_inv(self.sqrt2_inv_pow as u32 + rhs.sqrt2_inv_pow as u32))
    }

    pub fn anticommutator(&self, rhs: &Self) -> Result<Self> {
        self.compose(rhs)?.add(&rhs.compose(self)?)
    }

    pub fn grading(&self) -> Grading {
        let mut f = None;
        for fs in self.terms.keys() {
            let creations = fs.iter().filter(|x| x.create).count() as i64;
            let g = 2 * creations - fs.len() as i64;
            match f {
                None => f = Some(g),
                Some(prev) if prev != g => return Grading::Inhomogeneous,
                _ => {}
            }
        }
        Grading::Homogeneous(f.unwrap_or(0))
    }

    /// Number of distinct modes touched by the widest term.
    pub fn locality(&self) -> usize {
        self.terms
            .keys()
            .map(|fs| {
                let mut modes: Vec<usize> = fs.iter().map(|f| f.mode).collect();
                modes.sort_unstable();
                modes.dedup();
                modes.len()
            })
            .max()
            .unwrap_or(0)
    }

    /// Exact signed application to a basis state; the symbolic scale is not
    /// applied (query it via [`FermionOperator::scale`]).
    pub fn apply(&self, s: FockState) -> Result<HashMap<FockState, Coeff>> {
        if s.m != self.m {
            return Err(Error::ModeMismatch {
                expected: self.m,
                got: s.m,
            });
        }
        let mut out: HashMap<FockState, Coeff> = HashMap::new();
        'term: for (fs, c) in &self.terms {
            let mut state = s;
            let mut sign = 1i8;
            for f in fs.iter().rev() {
                let kind = if f.create {
                    ModeOp::Create
                } else {
                    ModeOp::Annihilate
                };
                match apply_mode(kind, f.mode, state)? {
                    ModeApplication::Zero => continue 'term,
                    ModeApplication::State { sign: sg, state: st } => {
                        sign *= sg;
                        state = st;
                    }
                }
            }
            let amp = if sign < 0 {
                -(c.clone())
            } else {
                c.clone()
            };
            let slot = out.entry(state).or_insert_with(Coeff::zero);
            *slot += amp;
        }
        out.retain(|_, v| !v.is_zero());
        Ok(out)
    }

    /// Matrix of the operator from V^l to V^{l+f} in the sector bases of
    /// `space`, with out-of-space targets projected out. The symbolic scale
    /// carries over to the matrix.
    pub fn sector_matrix(&self, space: &GradedSpace, l: usize) -> Result<RatMat> {
        if space.m != self.m {
            return Err(Error::ModeMismatch {
                expected: self.m,
                got: space.m,
            });
        }
        let f = match self.grading() {
            Grading::Homogeneous(f) => f,
            Grading::Inhomogeneous => return Err(Error::Inhomogeneous),
        };
        let src = space.sector_basis(l)?;
        let tgt_l = l as i64 + f;
        if tgt_l < 0 || tgt_l > space.m as i64 {
            return Err(Error::SectorOutOfRange {
                l: tgt_l.unsigned_abs() as usize,
                m: space.m,
            });
        }
        let tgt_l = tgt_l as usize;
        let rows = space.sector_dim(tgt_l)?;
        let mut mat = RatMat::zeros(rows, src.len());
        for (col, &s) in src.iter().enumerate() {
            for (t, amp) in self.apply(s)? {
                if let Some(row) = space.sector_index(tgt_l, t)? {
                    mat.add_entry(row, col, amp);
                }
            }
        }
        Ok(mat.with_extra_scale(self.sqrt2_inv_pow as u32))
    }

    /// Max absolute entry of d² across all sectors; exactly zero iff the
    /// restriction of d² to the space vanishes.
    pub fn nilpotency_residual(&self, space: &GradedSpace) -> Result<f64> {
        if self.is_zero() {
            return Ok(0.0);
        }
        match self.grading() {
            Grading::Homogeneous(1) => {}
            Grading::Homogeneous(f) => {
                return Err(Error::Invalid(format!(
                    "supercharge must have grading +1, got {f}"
                )))
            }
            Grading::Inhomogeneous => return Err(Error::Inhomogeneous),
        }
        let mut residual: f64 = 0.0;
        for l in 0..space.m.saturating_sub(1) {
            if space.sector_dim(l)? == 0 {
                continue;
            }
            let m_l = self.sector_matrix(space, l)?;
            let m_next = self.sector_matrix(space, l + 1)?;
            let sq = m_next.mul(&m_l)?;
            residual = residual.max(sq.max_abs());
        }
        Ok(residual)
    }

    /// Parse the one-term-per-line text format: `coef [+i] [-j] ...`.
    pub fn parse(text: &str, m: usize, path: &str) -> Result<Self> {
        let mut op = Self::zero(m);
        for (ln, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let mut parts = line.split_whitespace();
            let coef_str = parts.next().unwrap();
            let coeff = Coeff::parse(coef_str).ok_or_else(|| Error::Parse {
                path: path.to_string(),
                line: ln + 1,
                msg: format!("invalid coefficient `{coef_str}`"),
            })?;
            let mut factors = Vec::new();
            for tok in parts {
                let (create, idx) = match tok.as_bytes().first() {
                    Some(b'+') => (true, &tok[1..]),
                    Some(b'-') => (false, &tok[1..]),
                    _ => {
                        return Err(Error::Parse {
                            path: path.to_string(),
                            line: ln + 1,
                            msg: format!("factor `{tok}` must start with + or -"),
                        })
                    }
                };
                let mode: usize = idx.parse().map_err(|_| Error::Parse {
                    path: path.to_string(),
                    line: ln + 1,
                    msg: format!("invalid mode index `{idx}`"),
                })?;
                if mode >= m {
                    return Err(Error::Parse {
                        path: path.to_string(),
                        line: ln + 1,
                        msg: format!("mode {mode} out of range for {m} modes"),
                    });
                }
                factors.push(Factor {
                    mode,
                    create,
                });
            }
            op.add_term(coeff, &factors)
                .map_err(|e| Error::Parse {
                    path: path.to_string(),
                    line: ln + 1,
                    msg: e.to_string(),
                })?;
        }
        Ok(op)
    }
}

impl fmt::Display for FermionOperator {
    /// The text serialization format: one canonical term per line.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return writeln!(f, "0");
        }
        for (fs, c) in &self.terms {
            write!(f, "{c}")?;
            for fac in fs {
                write!(
                    f,
                    " {}{}",
                    if fac.create { '+' } else { '-' },
                    fac.mode
                )?;
            }
            writeln!(f)?;
        }
        Ok(())
    }
}
