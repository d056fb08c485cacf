//! Direct CI sigma vector, `σ = H c`, driven by alpha/beta string lists.
//!
//! With `k_pq = h_pq − ½ Σ_r (pr|rq)` the Hamiltonian is
//! `Σ k_pq E_pq + ½ Σ (pq|rs) E_pq E_rs + E_core`. The same-spin pieces are
//! folded into sparse string Hamiltonians; the opposite-spin piece
//! `Σ (pq|rs) E^α_pq E^β_rs` is applied on the fly. Every output row (one alpha
//! string) is produced by a single task in a fixed order, so results do not
//! depend on the number of worker threads.

use crate::detspace::{CasSpace, StringSpace};
use crate::error::{CasqError, Result};
use crate::ingest::IntegralSet;
use crate::par;

/// Compressed single-replacement lists `<J| a†_p a_q |I>` for every string I.
#[derive(Debug, Clone)]
struct ReplacementTable {
    offsets: Vec<usize>,
    target: Vec<u32>,
    /// Index `q * n + p` of the operator `E_qp` that maps J back onto I.
    op: Vec<u32>,
    sign: Vec<f64>,
}

impl ReplacementTable {
    fn new(strings: &StringSpace) -> Self {
        let n = strings.n_orb();
        let lists = strings.single_replacements();
        let mut offsets = Vec::with_capacity(lists.len() + 1);
        let total: usize = lists.iter().map(Vec::len).sum();
        let mut target = Vec::with_capacity(total);
        let mut op = Vec::with_capacity(total);
        let mut sign = Vec::with_capacity(total);
        offsets.push(0);
        for list in lists {
            for e in list {
                target.push(e.target);
                op.push((e.annihilate as usize * n + e.create as usize) as u32);
                sign.push(e.sign);
            }
            offsets.push(target.len());
        }
        ReplacementTable {
            offsets,
            target,
            op,
            sign,
        }
    }

    #[inline]
    fn range(&self, i: usize) -> std::ops::Range<usize> {
        self.offsets[i]..self.offsets[i + 1]
    }
}

/// Sparse rows of a one-spin string Hamiltonian.
#[derive(Debug, Clone)]
struct StringHamiltonian {
    offsets: Vec<usize>,
    col: Vec<u32>,
    val: Vec<f64>,
}

impl StringHamiltonian {
    fn new(table: &ReplacementTable, n_strings: usize, k: &[f64], eri: &[f64], n: usize) -> Self {
        let nn = n * n;
        let mut offsets = vec![0];
        let mut col = Vec::new();
        let mut val = Vec::new();
        let mut scratch = vec![0.0f64; n_strings];
        let mut touched: Vec<u32> = Vec::new();
        let mut mark = vec![false; n_strings];
        for i in 0..n_strings {
            for a in table.range(i) {
                let j = table.target[a] as usize;
                let op1 = table.op[a] as usize;
                let s1 = table.sign[a];
                if !mark[j] {
                    mark[j] = true;
                    touched.push(j as u32);
                }
                scratch[j] += k[op1] * s1;
                for b in table.range(j) {
                    let kk = table.target[b] as usize;
                    let op2 = table.op[b] as usize;
                    if !mark[kk] {
                        mark[kk] = true;
                        touched.push(kk as u32);
                    }
                    scratch[kk] += 0.5 * eri[op1 * nn + op2] * s1 * table.sign[b];
                }
            }
            touched.sort_unstable();
            for &t in &touched {
                let t = t as usize;
                if scratch[t] != 0.0 {
                    col.push(t as u32);
                    val.push(scratch[t]);
                }
                scratch[t] = 0.0;
                mark[t] = false;
            }
            touched.clear();
            offsets.push(col.len());
        }
        StringHamiltonian { offsets, col, val }
    }

    #[inline]
    fn row(&self, i: usize) -> impl Iterator<Item = (usize, f64)> + '_ {
        let r = self.offsets[i]..self.offsets[i + 1];
        self.col[r.clone()]
            .iter()
            .zip(&self.val[r])
            .map(|(&c, &v)| (c as usize, v))
    }
}

/// Precomputed tables for repeated sigma builds on one space and integral set.
#[derive(Debug, Clone)]
pub struct SigmaEngine {
    n_orb: usize,
    n_alpha: usize,
    n_beta: usize,
    alpha: ReplacementTable,
    beta: ReplacementTable,
    alpha_ham: StringHamiltonian,
    beta_ham: StringHamiltonian,
    /// `(pq|rs)` at `(p n + q) n² + r n + s`.
    eri: Vec<f64>,
    core: f64,
}

impl SigmaEngine {
    pub fn new(space: &CasSpace, ints: &IntegralSet) -> Self {
        let n = space.n_orb();
        assert_eq!(n, ints.n_orb(), "integral set and space disagree on n_orb");
        let eri = ints.g2_raw().to_vec();
        let mut k = vec![0.0; n * n];
        for p in 0..n {
            for q in 0..n {
                let mut v = ints.h(p, q);
                for r in 0..n {
                    v -= 0.5 * ints.g2(p, r, r, q);
                }
                k[p * n + q] = v;
            }
        }
        let alpha = ReplacementTable::new(space.alpha_strings());
        let beta = ReplacementTable::new(space.beta_strings());
        let alpha_ham = StringHamiltonian::new(&alpha, space.alpha_strings().len(), &k, &eri, n);
        let beta_ham = StringHamiltonian::new(&beta, space.beta_strings().len(), &k, &eri, n);
        SigmaEngine {
            n_orb: n,
            n_alpha: space.alpha_strings().len(),
            n_beta: space.beta_strings().len(),
            alpha,
            beta,
            alpha_ham,
            beta_ham,
            eri,
            core: ints.core_energy,
        }
    }

    pub fn dim(&self) -> usize {
        self.n_alpha * self.n_beta
    }

    /// `y = H x`.
    pub fn apply(&self, x: &[f64], y: &mut [f64], parallel: bool) {
        let nb = self.n_beta;
        let nn = self.n_orb * self.n_orb;
        assert_eq!(x.len(), self.dim());
        assert_eq!(y.len(), self.dim());
        if nb == 0 {
            return;
        }
        par::for_each_chunk_mut(y, nb, parallel, |ia, out| {
            let own = &x[ia * nb..(ia + 1) * nb];
            for (o, c) in out.iter_mut().zip(own) {
                *o = self.core * c;
            }
            // alpha-alpha
            for (ka, v) in self.alpha_ham.row(ia) {
                super::axpy(v, &x[ka * nb..(ka + 1) * nb], out);
            }
            // beta-beta
            for (ib, o) in out.iter_mut().enumerate() {
                let mut acc = 0.0;
                for (kb, v) in self.beta_ham.row(ib) {
                    acc += v * own[kb];
                }
                *o += acc;
            }
            // alpha-beta
            for a in self.alpha.range(ia) {
                let ja = self.alpha.target[a] as usize;
                let s1 = self.alpha.sign[a];
                let eri_row = &self.eri[self.alpha.op[a] as usize * nn..][..nn];
                let row = &x[ja * nb..(ja + 1) * nb];
                for (ib, o) in out.iter_mut().enumerate() {
                    let mut acc = 0.0;
                    for b in self.beta.range(ib) {
                        acc += self.beta.sign[b]
                            * eri_row[self.beta.op[b] as usize]
                            * row[self.beta.target[b] as usize];
                    }
                    *o += s1 * acc;
                }
            }
        });
    }
}

fn check_dim(space: &CasSpace, v: &[f64]) -> Result<()> {
    if v.len() != space.len() {
        return Err(CasqError::Dimension {
            expected: space.len(),
            got: v.len(),
        });
    }
    Ok(())
}

/// `H v` over `space`, parallel when the `parallel` feature is enabled.
pub fn sigma(space: &CasSpace, ints: &IntegralSet, v: &[f64]) -> Result<Vec<f64>> {
    check_dim(space, v)?;
    let mut out = vec![0.0; v.len()];
    SigmaEngine::new(space, ints).apply(v, &mut out, par::DEFAULT_PARALLEL);
    Ok(out)
}

/// `H v` on the calling thread only.
pub fn sigma_sequential(space: &CasSpace, ints: &IntegralSet, v: &[f64]) -> Result<Vec<f64>> {
    check_dim(space, v)?;
    let mut out = vec![0.0; v.len()];
    SigmaEngine::new(space, ints).apply(v, &mut out, false);
    Ok(out)
}
