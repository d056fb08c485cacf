//! Slater–Condon matrix elements.

use nalgebra::DMatrix;

use super::davidson::LinearOperator;
use super::sigma::SigmaEngine;
use crate::detspace::{excitation_degree, occupied, CasSpace, Determinant, Spin};
use crate::ingest::IntegralSet;
use crate::par;

/// `<d|H|d>` including the core energy.
pub fn diagonal_energy(d: &Determinant, ints: &IntegralSet) -> f64 {
    let mut e = ints.core_energy;
    let alpha: Vec<usize> = occupied(d.alpha).collect();
    let beta: Vec<usize> = occupied(d.beta).collect();
    for &p in alpha.iter().chain(&beta) {
        e += ints.h(p, p);
    }
    for same in [&alpha, &beta] {
        for (i, &p) in same.iter().enumerate() {
            for &q in &same[..i] {
                e += ints.g2(p, p, q, q) - ints.g2(p, q, q, p);
            }
        }
    }
    for &p in &alpha {
        for &q in &beta {
            e += ints.g2(p, p, q, q);
        }
    }
    e
}

fn spin_orbitals(bits: u64, spin: Spin) -> impl Iterator<Item = (usize, Spin)> {
    occupied(bits).map(move |p| (p, spin))
}

/// `<mn|pq>` over spin orbitals, physicist notation.
fn antisym(
    ints: &IntegralSet,
    m: (usize, Spin),
    n: (usize, Spin),
    p: (usize, Spin),
    q: (usize, Spin),
) -> f64 {
    let direct = if m.1 == p.1 && n.1 == q.1 {
        ints.g2(m.0, p.0, n.0, q.0)
    } else {
        0.0
    };
    let exchange = if m.1 == q.1 && n.1 == p.1 {
        ints.g2(m.0, q.0, n.0, p.0)
    } else {
        0.0
    };
    direct - exchange
}

/// `<d1|H|d2>` by the Slater–Condon rules; zero beyond double excitations.
pub fn hamiltonian_element(d1: &Determinant, d2: &Determinant, ints: &IntegralSet) -> f64 {
    match excitation_degree(d1, d2) {
        0 => diagonal_energy(d1, ints),
        1 => {
            let spin = if d1.alpha != d2.alpha {
                Spin::Alpha
            } else {
                Spin::Beta
            };
            let s1 = d1.string(spin);
            let s2 = d2.string(spin);
            let m = (s1 & !s2).trailing_zeros() as usize;
            let p = (s2 & !s1).trailing_zeros() as usize;
            let (_, sign) = d2
                .excite(p, spin, m, spin)
                .expect("single excitation between determinants");
            let mut v = ints.h(m, p);
            for (n, ns) in spin_orbitals(d1.alpha & d2.alpha, Spin::Alpha)
                .chain(spin_orbitals(d1.beta & d2.beta, Spin::Beta))
            {
                v += ints.g2(m, p, n, n);
                if ns == spin {
                    v -= ints.g2(m, n, n, p);
                }
            }
            sign * v
        }
        2 => {
            let holes: Vec<(usize, Spin)> = spin_orbitals(d1.alpha & !d2.alpha, Spin::Alpha)
                .chain(spin_orbitals(d1.beta & !d2.beta, Spin::Beta))
                .collect();
            let parts: Vec<(usize, Spin)> = spin_orbitals(d2.alpha & !d1.alpha, Spin::Alpha)
                .chain(spin_orbitals(d2.beta & !d1.beta, Spin::Beta))
                .collect();
            let (m, n) = (holes[0], holes[1]);
            let (p, q) = (parts[0], parts[1]);
            // a†_m a†_n a_q a_p |d2> = sign |d1>
            let step =
                |d: Option<(Determinant, f64)>,
                 f: &dyn Fn(&Determinant) -> Option<(Determinant, f64)>| {
                    d.and_then(|(det, s)| f(&det).map(|(d2, s2)| (d2, s * s2)))
                };
            let r = step(Some((*d2, 1.0)), &|d| d.annihilate(p.0, p.1));
            let r = step(r, &|d| d.annihilate(q.0, q.1));
            let r = step(r, &|d| d.create(n.0, n.1));
            let r = step(r, &|d| d.create(m.0, m.1));
            let (det, sign) = r.expect("double excitation between determinants");
            debug_assert_eq!(det, *d1);
            sign * antisym(ints, m, n, p, q)
        }
        _ => 0.0,
    }
}

/// The CASCI Hamiltonian of one determinant space as a [`LinearOperator`].
pub struct HamiltonianOperator<'a> {
    pub space: &'a CasSpace,
    pub ints: &'a IntegralSet,
    engine: SigmaEngine,
    parallel: bool,
}

impl<'a> HamiltonianOperator<'a> {
    pub fn new(space: &'a CasSpace, ints: &'a IntegralSet) -> Self {
        HamiltonianOperator {
            space,
            ints,
            engine: SigmaEngine::new(space, ints),
            parallel: par::DEFAULT_PARALLEL,
        }
    }

    pub fn sequential(mut self) -> Self {
        self.parallel = false;
        self
    }

    pub fn engine(&self) -> &SigmaEngine {
        &self.engine
    }
}

impl LinearOperator for HamiltonianOperator<'_> {
    fn dim(&self) -> usize {
        self.space.len()
    }

    fn apply(&self, x: &[f64], y: &mut [f64]) {
        self.engine.apply(x, y, self.parallel);
    }

    fn diagonal(&self) -> Vec<f64> {
        par::map_range(self.space.len(), self.parallel, |k| {
            diagonal_energy(&self.space.det(k), self.ints)
        })
    }

    fn subspace_matrix(&self, idx: &[usize]) -> DMatrix<f64> {
        let dets: Vec<Determinant> = idx.iter().map(|&k| self.space.det(k)).collect();
        let n = dets.len();
        let rows = par::map_range(n, self.parallel, |i| {
            (0..n)
                .map(|j| hamiltonian_element(&dets[i], &dets[j], self.ints))
                .collect::<Vec<f64>>()
        });
        DMatrix::from_fn(n, n, |i, j| rows[i][j])
    }
}
