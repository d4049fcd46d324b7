use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

/// Largest number of outcomes a sector may hold to be enumerated.
pub const ENUMERATION_CAP: u128 = 10_000_000;

/// A detection pattern: occupation number of each output mode.
///
/// Outcomes order by total first, then by their *mode list* (the sorted
/// list of occupied modes with repetition) ascending. Within a sector this is
/// descending lexicographic order on occupations: `(2,0) < (1,1) < (0,2)`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Outcome {
    occupations: Vec<u8>,
    total: usize,
}

impl Outcome {
    pub fn new(occupations: Vec<u8>) -> Self {
        let total = occupations.iter().map(|&x| usize::from(x)).sum();
        Self { occupations, total }
    }

    /// Outcome on `modes` modes with one particle per entry of `mode_list`.
    pub fn from_modes(modes: usize, mode_list: &[usize]) -> Result<Self> {
        let mut occ = vec![0u8; modes];
        for &m in mode_list {
            let slot = occ.get_mut(m).ok_or(Error::IndexOutOfRange { index: m, len: modes })?;
            *slot = slot
                .checked_add(1)
                .ok_or_else(|| Error::InvalidParameter("occupation exceeds 255".into()))?;
        }
        Ok(Self::new(occ))
    }

    pub fn occupations(&self) -> &[u8] {
        &self.occupations
    }

    pub fn modes(&self) -> usize {
        self.occupations.len()
    }

    pub fn total(&self) -> usize {
        self.total
    }

    /// Each mode `i` repeated `x_i` times, ascending.
    pub fn mode_list(&self) -> Vec<usize> {
        let mut list = Vec::with_capacity(self.total);
        for (i, &x) in self.occupations.iter().enumerate() {
            list.extend(std::iter::repeat_n(i, usize::from(x)));
        }
        list
    }

    pub fn is_binary(&self) -> bool {
        self.occupations.iter().all(|&x| x <= 1)
    }

    pub fn is_collision_free(&self) -> bool {
        self.is_binary()
    }

    /// `x! = prod_i x_i!`.
    pub fn factorial_product(&self) -> f64 {
        self.occupations
            .iter()
            .map(|&x| (1..=u32::from(x)).map(f64::from).product::<f64>())
            .product()
    }

    /// Gather relabeling: mode `j` of the result is mode `perm[j]` of `self`.
    /// Matches [`Interferometer::permute_columns`](crate::kernels::Interferometer::permute_columns).
    pub fn permuted(&self, perm: &[usize]) -> Self {
        Self::new(perm.iter().map(|&p| self.occupations[p]).collect())
    }
}

impl Ord for Outcome {
    fn cmp(&self, other: &Self) -> Ordering {
        self.total
            .cmp(&other.total)
            .then_with(|| other.occupations.cmp(&self.occupations))
    }
}

impl PartialOrd for Outcome {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Comma-separated occupations, e.g. `0,2,0,1`.
impl fmt::Display for Outcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, x) in self.occupations.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{x}")?;
        }
        Ok(())
    }
}

impl FromStr for Outcome {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if s.is_empty() {
            return Ok(Self::new(Vec::new()));
        }
        s.split(',')
            .map(|t| {
                t.trim()
                    .parse::<u8>()
                    .map_err(|e| Error::Parse(format!("bad occupation {t:?}: {e}")))
            })
            .collect::<Result<Vec<_>>>()
            .map(Self::new)
    }
}

/// Particle statistics of a sector.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Statistics {
    Bosonic,
    Fermionic,
}

/// All outcomes with a fixed number of particles on a fixed number of modes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Sector {
    pub modes: usize,
    pub particles: usize,
    pub statistics: Statistics,
}

pub(crate) fn binomial(n: u128, k: u128) -> Option<u128> {
    if k > n {
        return Some(0);
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        // acc * (n - i) / (i + 1) stays integral at every step.
        acc = acc.checked_mul(n - i)? / (i + 1);
    }
    Some(acc)
}

impl Sector {
    pub fn bosonic(modes: usize, particles: usize) -> Self {
        Self {
            modes,
            particles,
            statistics: Statistics::Bosonic,
        }
    }

    pub fn fermionic(modes: usize, particles: usize) -> Self {
        Self {
            modes,
            particles,
            statistics: Statistics::Fermionic,
        }
    }

    /// `C(N+M-1, N)` for bosons, `C(M, N)` for fermions; `None` on overflow.
    pub fn cardinality(&self) -> Option<u128> {
        let (m, n) = (self.modes as u128, self.particles as u128);
        match self.statistics {
            Statistics::Bosonic if m == 0 => Some(u128::from(n == 0)),
            Statistics::Bosonic => binomial(n + m - 1, n),
            Statistics::Fermionic => binomial(m, n),
        }
    }

    /// Cardinality as a float, usable for sectors far beyond `u128`.
    pub fn ln_cardinality(&self) -> f64 {
        let (m, n) = (self.modes as f64, self.particles as f64);
        match self.statistics {
            Statistics::Bosonic => ln_binomial(n + m - 1.0, n),
            Statistics::Fermionic => ln_binomial(m, n),
        }
    }

    pub fn check(&self, x: &Outcome) -> Result<()> {
        let fail = |reason: String| Error::OutsideSector {
            outcome: x.to_string(),
            reason,
        };
        if x.modes() != self.modes {
            return Err(fail(format!("{} modes, sector has {}", x.modes(), self.modes)));
        }
        if x.total() != self.particles {
            return Err(fail(format!("{} particles, sector has {}", x.total(), self.particles)));
        }
        if self.statistics == Statistics::Fermionic && !x.is_binary() {
            return Err(fail("fermionic outcome with multiple occupation".into()));
        }
        Ok(())
    }

    pub fn contains(&self, x: &Outcome) -> bool {
        self.check(x).is_ok()
    }

    /// Refuse sectors above [`ENUMERATION_CAP`].
    pub fn check_enumerable(&self, cap: u128) -> Result<u128> {
        match self.cardinality() {
            Some(c) if c <= cap => Ok(c),
            Some(c) => Err(Error::EnumerationCap { cardinality: c, cap }),
            None => Err(Error::EnumerationCap {
                cardinality: u128::MAX,
                cap,
            }),
        }
    }

    /// Every outcome of the sector exactly once, in ascending [`Outcome`] order.
    pub fn enumerate(&self) -> Result<SectorIter> {
        self.check_enumerable(ENUMERATION_CAP)?;
        Ok(SectorIter::new(*self))
    }

    /// Position of `x` in [`Self::enumerate`] order.
    pub fn rank(&self, x: &Outcome) -> Result<u128> {
        self.check(x)?;
        let list = x.mode_list();
        let m = self.modes as u128;
        let n = self.particles;
        // Count outcomes whose mode list is lexicographically smaller.
        let mut rank: u128 = 0;
        let mut lo: usize = 0;
        for (pos, &c) in list.iter().enumerate() {
            let remaining = (n - pos - 1) as u128;
            for smaller in lo..c {
                let count = match self.statistics {
                    // Remaining entries drawn with repetition from [smaller, m).
                    Statistics::Bosonic => binomial(remaining + m - smaller as u128 - 1, remaining),
                    // Remaining entries strictly increasing from (smaller, m).
                    Statistics::Fermionic => binomial(m - smaller as u128 - 1, remaining),
                }
                .ok_or(Error::EnumerationCap {
                    cardinality: u128::MAX,
                    cap: u128::MAX,
                })?;
                rank += count;
            }
            lo = match self.statistics {
                Statistics::Bosonic => c,
                Statistics::Fermionic => c + 1,
            };
        }
        Ok(rank)
    }
}

pub(crate) fn ln_binomial(n: f64, k: f64) -> f64 {
    if k < 0.0 || k > n {
        return f64::NEG_INFINITY;
    }
    let k = k.min(n - k);
    let mut acc = 0.0;
    let mut i = 0.0;
    while i < k {
        acc += ((n - i) / (i + 1.0)).ln();
        i += 1.0;
    }
    acc
}

/// Iterator over a sector's outcomes via next-combination on mode lists.
pub struct SectorIter {
    sector: Sector,
    list: Vec<usize>,
    done: bool,
}

impl SectorIter {
    fn new(sector: Sector) -> Self {
        let n = sector.particles;
        let list: Vec<usize> = match sector.statistics {
            Statistics::Bosonic => vec![0; n],
            Statistics::Fermionic => (0..n).collect(),
        };
        let empty = match sector.statistics {
            Statistics::Bosonic => sector.modes == 0 && n > 0,
            Statistics::Fermionic => n > sector.modes,
        };
        Self {
            sector,
            list,
            done: empty,
        }
    }

    fn advance(&mut self) {
        let m = self.sector.modes;
        let n = self.list.len();
        match self.sector.statistics {
            Statistics::Bosonic => match (0..n).rev().find(|&p| self.list[p] + 1 < m) {
                Some(p) => {
                    let v = self.list[p] + 1;
                    self.list[p..].fill(v);
                }
                None => self.done = true,
            },
            Statistics::Fermionic => match (0..n).rev().find(|&p| self.list[p] < m - n + p) {
                Some(p) => {
                    self.list[p] += 1;
                    for q in p + 1..n {
                        self.list[q] = self.list[q - 1] + 1;
                    }
                }
                None => self.done = true,
            },
        }
    }
}

impl Iterator for SectorIter {
    type Item = Outcome;

    fn next(&mut self) -> Option<Outcome> {
        if self.done {
            return None;
        }
        let out = Outcome::from_modes(self.sector.modes, &self.list).expect("indices in range");
        self.advance();
        Some(out)
    }
}
