//! Constrained fermionic Fock spaces.
//!
//! States are occupancy bit-words over `m` modes (bit `i` set means mode `i`
//! is occupied). A [`GradedSpace`] is a subset of the full Fock space cut out
//! by forbidden occupancy monomials, graded by fermion number.

use crate::error::{Error, Result};
use rand::Rng;
use std::collections::HashMap;
use std::sync::{Arc, Mutex};

/// Occupancy configuration of `m` fermionic modes.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug, PartialOrd, Ord)]
pub struct FockState {
    pub word: u32,
    pub m: usize,
}

impl FockState {
    pub fn new(word: u32, m: usize) -> Self {
        debug_assert!(m == 32 || word < (1u32 << m));
        FockState { word, m }
    }

    pub fn vacuum(m: usize) -> Self {
        FockState { word: 0, m }
    }

    /// Build a state from the list of occupied mode indices.
    pub fn from_modes(modes: &[usize], m: usize) -> Self {
        let mut word = 0u32;
        for &i in modes {
            word |= 1 << i;
        }
        FockState { word, m }
    }

    /// Fermion number: population count of the occupancy word.
    pub fn fermion_number(&self) -> usize {
        self.word.count_ones() as usize
    }

    pub fn occupied(&self, i: usize) -> bool {
        self.word >> i & 1 == 1
    }

    /// `|n_{m-1} ... n_1 n_0>` written with mode 0 leftmost, e.g. `|110>`.
    pub fn ket(&self) -> String {
        let mut s = String::with_capacity(self.m + 2);
        s.push('|');
        for i in 0..self.m {
            s.push(if self.occupied(i) { '1' } else { '0' });
        }
        s.push('>');
        s
    }
}

/// Result of applying a single creation or annihilation operator.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum ModeApplication {
    Zero,
    State { sign: i8, state: FockState },
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum ModeOp {
    Create,
    Annihilate,
}

/// Apply `a_i^dag` or `a_i` to a basis state.
///
/// The Jordan-Wigner sign convention counts occupied modes strictly below
/// `i`; creation on an occupied mode and annihilation on an empty one give
/// zero.
pub fn apply_mode(kind: ModeOp, i: usize, s: FockState) -> Result<ModeApplication> {
    if i >= s.m {
        return Err(Error::ModeOutOfRange { i, m: s.m });
    }
    let occupied = s.occupied(i);
    match kind {
        ModeOp::Create if occupied => return Ok(ModeApplication::Zero),
        ModeOp::Annihilate if !occupied => return Ok(ModeApplication::Zero),
        _ => {}
    }
    let below = (s.word & ((1u32 << i) - 1)).count_ones();
    let sign = if below % 2 == 0 { 1 } else { -1 };
    Ok(ModeApplication::State {
        sign,
        state: FockState::new(s.word ^ (1 << i), s.m),
    })
}

/// Forbidden occupancy monomials: each set `S` encodes `prod_{i in S} n_i = 0`.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ConstraintSet {
    forbidden: Vec<u32>,
}

impl ConstraintSet {
    pub fn none() -> Self {
        ConstraintSet::default()
    }

    pub fn new(forbidden: Vec<Vec<usize>>, m: usize) -> Result<Self> {
        if forbidden.len() > m * m {
            return Err(Error::Invalid(format!(
                "constraint list of length {} exceeds m^2 = {}",
                forbidden.len(),
                m * m
            )));
        }
        let mut masks = Vec::with_capacity(forbidden.len());
        for set in forbidden {
            let mut mask = 0u32;
            for i in set {
                if i >= m {
                    return Err(Error::ModeOutOfRange { i, m });
                }
                mask |= 1 << i;
            }
            masks.push(mask);
        }
        Ok(ConstraintSet { forbidden: masks })
    }

    pub fn satisfied(&self, word: u32) -> bool {
        self.forbidden.iter().all(|&mask| word & mask != mask)
    }

    pub fn is_empty(&self) -> bool {
        self.forbidden.is_empty()
    }

    /// Forbidden sets as index lists (for serialization).
    pub fn sets(&self) -> Vec<Vec<usize>> {
        self.forbidden
            .iter()
            .map(|&mask| (0..32).filter(|&i| mask >> i & 1 == 1).collect())
            .collect()
    }
}

/// A constraint-satisfying subset of Fock space graded by fermion number.
///
/// Sector bases are built lazily and cached; the cache insert is idempotent
/// so concurrent fills are safe.
#[derive(Debug)]
pub struct GradedSpace {
    pub m: usize,
    constraints: ConstraintSet,
    cap: usize,
    sector_cache: Mutex<HashMap<usize, Arc<Vec<FockState>>>>,
}

impl GradedSpace {
    pub fn new(m: usize, constraints: ConstraintSet) -> Result<Self> {
        Self::with_cap(m, constraints, crate::mode_cap())
    }

    pub fn with_cap(m: usize, constraints: ConstraintSet, cap: usize) -> Result<Self> {
        if m > cap || m > 32 {
            return Err(Error::CapExceeded { m, cap: cap.min(32) });
        }
        Ok(GradedSpace {
            m,
            constraints,
            cap,
            sector_cache: Mutex::new(HashMap::new()),
        })
    }

    pub fn unconstrained(m: usize) -> Result<Self> {
        Self::new(m, ConstraintSet::none())
    }

    pub fn constraints(&self) -> &ConstraintSet {
        &self.constraints
    }

    pub fn cap(&self) -> usize {
        self.cap
    }

    /// Membership check: no forbidden monomial fully occupied.
    pub fn member(&self, s: FockState) -> Result<bool> {
        if s.m != self.m {
            return Err(Error::ModeMismatch {
                expected: self.m,
                got: s.m,
            });
        }
        Ok(self.constraints.satisfied(s.word))
    }

    /// Ordered basis of the fermion-number-`l` sector (ascending word value).
    pub fn sector_basis(&self, l: usize) -> Result<Arc<Vec<FockState>>> {
        if l > self.m {
            return Err(Error::SectorOutOfRange { l, m: self.m });
        }
        if let Some(b) = self.sector_cache.lock().unwrap().get(&l) {
            return Ok(Arc::clone(b));
        }
        let mut basis = Vec::new();
        // Iterate Hamming-weight-l words in ascending order (Gosper's hack).
        if l == 0 {
            if self.constraints.satisfied(0) {
                basis.push(FockState::vacuum(self.m));
            }
        } else if l <= self.m {
            let limit: u64 = 1u64 << self.m;
            let mut word: u64 = (1u64 << l) - 1;
            while word < limit {
                if self.constraints.satisfied(word as u32) {
                    basis.push(FockState::new(word as u32, self.m));
                }
                let c = word & word.wrapping_neg();
                let r = word + c;
                word = (((r ^ word) >> 2) / c) | r;
            }
        }
        let arc = Arc::new(basis);
        let mut cache = self.sector_cache.lock().unwrap();
        Ok(Arc::clone(cache.entry(l).or_insert(arc)))
    }

    pub fn sector_dim(&self, l: usize) -> Result<usize> {
        Ok(self.sector_basis(l)?.len())
    }

    /// Dimensions of all sectors `0..=m`.
    pub fn dims(&self) -> Result<Vec<usize>> {
        (0..=self.m).map(|l| self.sector_dim(l)).collect()
    }

    /// Position of a state inside its sector basis, if it belongs to it.
    pub fn sector_index(&self, l: usize, s: FockState) -> Result<Option<usize>> {
        let basis = self.sector_basis(l)?;
        Ok(basis.binary_search_by_key(&s.word, |b| b.word).ok())
    }

    /// Default rejection-sampling budget: 64 * ceil(2^m / dim V^l).
    pub fn default_max_tries(&self, l: usize) -> Result<usize> {
        let dim = self.sector_dim(l)?;
        if dim == 0 {
            return Err(Error::EmptySector { l });
        }
        let total = 1usize << self.m;
        Ok((64 * total.div_ceil(dim)).min(1 << 24))
    }

    /// Uniform sample from the sector-`l` basis by rejection over
    /// Hamming-weight-`l` words.
    pub fn sample_sector<R: Rng>(
        &self,
        l: usize,
        rng: &mut R,
        max_tries: usize,
    ) -> Result<FockState> {
        if l > self.m {
            return Err(Error::SectorOutOfRange { l, m: self.m });
        }
        if self.sector_dim(l)? == 0 {
            return Err(Error::EmptySector { l });
        }
        for _ in 0..max_tries {
            let s = random_weight_l_state(self.m, l, rng);
            if self.constraints.satisfied(s.word) {
                return Ok(s);
            }
        }
        Err(Error::SamplerExhausted { l, tries: max_tries })
    }
}

/// Uniform random occupancy word of Hamming weight `l` (Fisher-Yates prefix).
pub fn random_weight_l_state<R: Rng>(m: usize, l: usize, rng: &mut R) -> FockState {
    let mut modes: Vec<usize> = (0..m).collect();
    let mut word = 0u32;
    for k in 0..l {
        let j = rng.gen_range(k..m);
        modes.swap(k, j);
        word |= 1 << modes[k];
    }
    FockState::new(word, m)
}
