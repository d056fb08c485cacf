//! CAS determinant spaces at fixed M_S.
//!
//! A determinant is a pair of occupation bitstrings; bit `p` of `alpha` (`beta`)
//! is set when spatial orbital `p` holds a spin-up (spin-down) electron. Spin
//! orbitals are ordered with every alpha orbital before every beta orbital,
//! which fixes all fermionic signs in the crate.
//!
//! Strings of one spin are ordered by increasing integer value of their
//! bitstring; their position is the combinatorial-number-system rank, so no
//! hash map is needed. A determinant's position in a [`CasSpace`] is
//! `i_alpha * n_beta_strings + i_beta`.

use std::fmt;

use crate::error::{CasqError, Result};

pub const MAX_ORBITALS: usize = 64;

/// Spin of a single electron.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
pub enum Spin {
    Alpha,
    Beta,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Determinant {
    pub alpha: u64,
    pub beta: u64,
}

impl Determinant {
    pub fn new(alpha: u64, beta: u64) -> Self {
        Determinant { alpha, beta }
    }

    pub fn n_elec(&self) -> u32 {
        self.alpha.count_ones() + self.beta.count_ones()
    }

    pub fn ms2(&self) -> i32 {
        self.alpha.count_ones() as i32 - self.beta.count_ones() as i32
    }

    pub fn string(&self, spin: Spin) -> u64 {
        match spin {
            Spin::Alpha => self.alpha,
            Spin::Beta => self.beta,
        }
    }

    fn with_string(&self, spin: Spin, bits: u64) -> Self {
        match spin {
            Spin::Alpha => Determinant::new(bits, self.beta),
            Spin::Beta => Determinant::new(self.alpha, bits),
        }
    }

    /// Number of occupied spin orbitals preceding `(orb, spin)` in the
    /// alpha-then-beta ordering.
    fn occupied_before(&self, orb: usize, spin: Spin) -> u32 {
        let below = low_mask(orb);
        match spin {
            Spin::Alpha => (self.alpha & below).count_ones(),
            Spin::Beta => self.alpha.count_ones() + (self.beta & below).count_ones(),
        }
    }

    /// `a_{orb,spin} |self>` as (determinant, sign), or `None` if empty.
    pub fn annihilate(&self, orb: usize, spin: Spin) -> Option<(Determinant, f64)> {
        let bit = 1u64 << orb;
        let s = self.string(spin);
        if s & bit == 0 {
            return None;
        }
        let sign = parity_sign(self.occupied_before(orb, spin));
        Some((self.with_string(spin, s & !bit), sign))
    }

    /// `a†_{orb,spin} |self>` as (determinant, sign), or `None` if occupied.
    pub fn create(&self, orb: usize, spin: Spin) -> Option<(Determinant, f64)> {
        let bit = 1u64 << orb;
        let s = self.string(spin);
        if s & bit != 0 {
            return None;
        }
        let sign = parity_sign(self.occupied_before(orb, spin));
        Some((self.with_string(spin, s | bit), sign))
    }

    /// `a†_{to,spin_to} a_{from,spin_from} |self>`.
    pub fn excite(
        &self,
        from: usize,
        spin_from: Spin,
        to: usize,
        spin_to: Spin,
    ) -> Option<(Determinant, f64)> {
        let (d1, s1) = self.annihilate(from, spin_from)?;
        let (d2, s2) = d1.create(to, spin_to)?;
        Some((d2, s1 * s2))
    }

    /// Render as per-orbital "2"/"u"/"d"/"0" characters separated by spaces.
    pub fn render(&self, n_orb: usize) -> String {
        let mut out = String::with_capacity(2 * n_orb);
        for p in 0..n_orb {
            if p > 0 {
                out.push(' ');
            }
            let a = self.alpha >> p & 1 == 1;
            let b = self.beta >> p & 1 == 1;
            out.push(match (a, b) {
                (true, true) => '2',
                (true, false) => 'u',
                (false, true) => 'd',
                (false, false) => '0',
            });
        }
        out
    }

    /// Swap spin labels on every singly occupied orbital.
    pub fn spin_flipped(&self) -> Determinant {
        let doubly = self.alpha & self.beta;
        let a_only = self.alpha & !self.beta;
        let b_only = self.beta & !self.alpha;
        Determinant::new(doubly | b_only, doubly | a_only)
    }
}

impl fmt::Display for Determinant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let n = (64 - (self.alpha | self.beta).leading_zeros()) as usize;
        f.write_str(&self.render(n.max(1)))
    }
}

#[inline]
pub(crate) fn low_mask(orb: usize) -> u64 {
    if orb >= 64 {
        u64::MAX
    } else {
        (1u64 << orb) - 1
    }
}

#[inline]
pub(crate) fn parity_sign(n: u32) -> f64 {
    if n & 1 == 0 {
        1.0
    } else {
        -1.0
    }
}

/// Sign of `a†_to a_from` acting within a single spin string: (-1) to the
/// number of occupied orbitals strictly between `from` and `to`.
#[inline]
pub fn excitation_sign(bits: u64, from: usize, to: usize) -> f64 {
    if from == to {
        return 1.0;
    }
    let (lo, hi) = if from < to { (from, to) } else { (to, from) };
    let between = bits & low_mask(hi) & !low_mask(lo + 1);
    parity_sign(between.count_ones())
}

/// Pascal's triangle up to `MAX_ORBITALS`.
#[derive(Debug, Clone)]
struct Binomials {
    table: Vec<Vec<u64>>,
}

impl Binomials {
    fn new(n_max: usize) -> Self {
        let mut table = vec![vec![0u64; n_max + 2]; n_max + 2];
        for n in 0..=n_max + 1 {
            table[n][0] = 1;
            for k in 1..=n {
                table[n][k] = table[n - 1][k - 1].saturating_add(table[n - 1][k]);
            }
        }
        Binomials { table }
    }

    #[inline]
    fn get(&self, n: usize, k: usize) -> u64 {
        if k > n {
            0
        } else {
            self.table[n][k]
        }
    }
}

/// Binomial coefficient C(n, k) as an exact u128.
pub fn binomial(n: u64, k: u64) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc * (n - i) as u128 / (i + 1) as u128;
    }
    acc
}

/// Every occupation string of `n_elec` electrons in `n_orb` orbitals.
#[derive(Debug, Clone)]
pub struct StringSpace {
    n_orb: usize,
    n_elec: usize,
    strings: Vec<u64>,
    binom: Binomials,
}

impl StringSpace {
    pub fn new(n_orb: usize, n_elec: usize) -> Self {
        let binom = Binomials::new(n_orb);
        let count = binom.get(n_orb, n_elec) as usize;
        let mut strings = Vec::with_capacity(count);
        if n_elec <= n_orb {
            if n_elec == 0 {
                strings.push(0);
            } else {
                // Gosper's hack walks fixed-popcount bitstrings in increasing order.
                let mut s: u64 = low_mask(n_elec);
                let limit = if n_orb >= 64 { u64::MAX } else { 1u64 << n_orb };
                loop {
                    strings.push(s);
                    let c = s & s.wrapping_neg();
                    let r = s.wrapping_add(c);
                    if r == 0 {
                        break;
                    }
                    s = (((r ^ s) >> 2) / c) | r;
                    if n_orb < 64 && s >= limit {
                        break;
                    }
                }
            }
        }
        debug_assert_eq!(strings.len(), count);
        StringSpace {
            n_orb,
            n_elec,
            strings,
            binom,
        }
    }

    pub fn len(&self) -> usize {
        self.strings.len()
    }

    pub fn is_empty(&self) -> bool {
        self.strings.is_empty()
    }

    pub fn n_elec(&self) -> usize {
        self.n_elec
    }

    pub fn n_orb(&self) -> usize {
        self.n_orb
    }

    pub fn strings(&self) -> &[u64] {
        &self.strings
    }

    #[inline]
    pub fn get(&self, i: usize) -> u64 {
        self.strings[i]
    }

    /// Position of `bits` in the string list; assumes the popcount matches.
    #[inline]
    pub fn rank(&self, bits: u64) -> usize {
        let mut r = 0u64;
        let mut b = bits;
        let mut k = 1;
        while b != 0 {
            let pos = b.trailing_zeros() as usize;
            r += self.binom.get(pos, k);
            k += 1;
            b &= b - 1;
        }
        r as usize
    }

    /// Checked lookup.
    pub fn index_of(&self, bits: u64) -> Option<usize> {
        if bits.count_ones() as usize != self.n_elec || (self.n_orb < 64 && bits >> self.n_orb != 0)
        {
            return None;
        }
        Some(self.rank(bits))
    }

    /// Single replacements `a†_p a_q` (including `p == q`) of every string.
    pub fn single_replacements(&self) -> Vec<Vec<StringExcitation>> {
        let n = self.n_orb;
        self.strings
            .iter()
            .map(|&s| {
                let mut list = Vec::with_capacity(self.n_elec * (n - self.n_elec + 1));
                for q in occupied(s) {
                    let removed = s & !(1u64 << q);
                    for p in 0..n {
                        if removed >> p & 1 == 1 {
                            continue;
                        }
                        let t = removed | (1u64 << p);
                        list.push(StringExcitation {
                            target: self.rank(t) as u32,
                            create: p as u8,
                            annihilate: q as u8,
                            sign: excitation_sign(s, q, p),
                        });
                    }
                }
                list
            })
            .collect()
    }
}

/// `<target| a†_create a_annihilate |source> = sign`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StringExcitation {
    pub target: u32,
    pub create: u8,
    pub annihilate: u8,
    pub sign: f64,
}

/// Iterator over set-bit positions.
pub fn occupied(bits: u64) -> impl Iterator<Item = usize> {
    let mut b = bits;
    std::iter::from_fn(move || {
        if b == 0 {
            None
        } else {
            let p = b.trailing_zeros() as usize;
            b &= b - 1;
            Some(p)
        }
    })
}

/// Number of alpha and beta electrons for a CAS(n_elec, n_orb) block at `ms2`.
pub fn electron_split(n_elec: usize, n_orb: usize, ms2: i32) -> Result<(usize, usize)> {
    if n_orb == 0 || n_orb > MAX_ORBITALS {
        return Err(CasqError::InvalidSpace(format!(
            "n_orb = {n_orb} outside 1..={MAX_ORBITALS}"
        )));
    }
    if n_elec > 2 * n_orb {
        return Err(CasqError::InvalidSpace(format!(
            "{n_elec} electrons do not fit in {n_orb} orbitals"
        )));
    }
    if (n_elec as i64 - ms2 as i64).rem_euclid(2) != 0 {
        return Err(CasqError::InvalidSpace(format!(
            "parity mismatch: n_elec = {n_elec}, ms2 = {ms2}"
        )));
    }
    if ms2.unsigned_abs() as usize > n_elec {
        return Err(CasqError::InvalidSpace(format!(
            "|ms2| = {} exceeds n_elec = {n_elec}",
            ms2.abs()
        )));
    }
    let n_alpha = (n_elec as i64 + ms2 as i64) / 2;
    let n_beta = (n_elec as i64 - ms2 as i64) / 2;
    if n_alpha as usize > n_orb || n_beta as usize > n_orb {
        return Err(CasqError::InvalidSpace(format!(
            "ms2 = {ms2} infeasible for {n_elec} electrons in {n_orb} orbitals"
        )));
    }
    Ok((n_alpha as usize, n_beta as usize))
}

/// Number of determinants in CAS(n_elec, n_orb) at `ms2`, without enumeration.
pub fn count_determinants(n_elec: usize, n_orb: usize, ms2: i32) -> Result<u128> {
    let (na, nb) = electron_split(n_elec, n_orb, ms2)?;
    Ok(binomial(n_orb as u64, na as u64) * binomial(n_orb as u64, nb as u64))
}

/// Determinant basis of CAS(n_elec, n_orb) at fixed 2·M_S.
#[derive(Debug, Clone)]
pub struct CasSpace {
    n_elec: usize,
    n_orb: usize,
    ms2: i32,
    alpha: StringSpace,
    beta: StringSpace,
}

impl CasSpace {
    pub fn new(n_elec: usize, n_orb: usize, ms2: i32) -> Result<Self> {
        let (na, nb) = electron_split(n_elec, n_orb, ms2)?;
        let total = count_determinants(n_elec, n_orb, ms2)?;
        if total > (usize::MAX / 16) as u128 {
            return Err(CasqError::InvalidSpace(format!(
                "{total} determinants cannot be addressed"
            )));
        }
        Ok(CasSpace {
            n_elec,
            n_orb,
            ms2,
            alpha: StringSpace::new(n_orb, na),
            beta: StringSpace::new(n_orb, nb),
        })
    }

    pub fn n_elec(&self) -> usize {
        self.n_elec
    }

    pub fn n_orb(&self) -> usize {
        self.n_orb
    }

    pub fn ms2(&self) -> i32 {
        self.ms2
    }

    pub fn alpha_strings(&self) -> &StringSpace {
        &self.alpha
    }

    pub fn beta_strings(&self) -> &StringSpace {
        &self.beta
    }

    pub fn len(&self) -> usize {
        self.alpha.len() * self.beta.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    #[inline]
    pub fn det(&self, k: usize) -> Determinant {
        let nb = self.beta.len();
        Determinant::new(self.alpha.get(k / nb), self.beta.get(k % nb))
    }

    /// Position of `d`, or `None` if it does not belong to this space.
    #[inline]
    pub fn index(&self, d: &Determinant) -> Option<usize> {
        let ia = self.alpha.index_of(d.alpha)?;
        let ib = self.beta.index_of(d.beta)?;
        Some(ia * self.beta.len() + ib)
    }

    pub fn dets(&self) -> impl Iterator<Item = Determinant> + '_ {
        (0..self.len()).map(move |k| self.det(k))
    }

    /// The space reached by lowering M_S by one unit, if it exists.
    pub fn lowered(&self) -> Result<CasSpace> {
        CasSpace::new(self.n_elec, self.n_orb, self.ms2 - 2)
    }

    pub fn raised(&self) -> Result<CasSpace> {
        CasSpace::new(self.n_elec, self.n_orb, self.ms2 + 2)
    }

    pub fn with_ms2(&self, ms2: i32) -> Result<CasSpace> {
        CasSpace::new(self.n_elec, self.n_orb, ms2)
    }
}

/// Enumerate CAS(n_elec, n_orb) at `ms2`.
pub fn enumerate_cas(n_elec: usize, n_orb: usize, ms2: i32) -> Result<CasSpace> {
    CasSpace::new(n_elec, n_orb, ms2)
}

/// Number of electrons that must be moved to turn `d1` into `d2`.
pub fn excitation_degree(d1: &Determinant, d2: &Determinant) -> u32 {
    ((d1.alpha ^ d2.alpha).count_ones() + (d1.beta ^ d2.beta).count_ones()) / 2
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SingleExcitation {
    pub det: Determinant,
    pub sign: f64,
    pub from: usize,
    pub to: usize,
    pub spin: Spin,
}

/// Every single excitation of `d` within `n_orb` orbitals (same spin, from != to).
pub fn connected_singles(d: &Determinant, n_orb: usize) -> Vec<SingleExcitation> {
    let mut out = Vec::new();
    for spin in [Spin::Alpha, Spin::Beta] {
        let s = d.string(spin);
        for from in occupied(s) {
            for to in 0..n_orb {
                if s >> to & 1 == 1 {
                    continue;
                }
                let t = (s & !(1u64 << from)) | (1u64 << to);
                out.push(SingleExcitation {
                    det: d.with_string(spin, t),
                    sign: excitation_sign(s, from, to),
                    from,
                    to,
                    spin,
                });
            }
        }
    }
    out
}
