//! Seeded model integral sets for tests, benchmarks and demos.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::IntegralSet;

/// A reproducible integral set with a molecule-like structure: spread orbital
/// energies, weak one-electron coupling, and a positive semidefinite
/// two-electron tensor built as a sum of squares.
pub fn random_integrals(n_orb: usize, seed: u64) -> IntegralSet {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = n_orb;
    let mut ints = IntegralSet::zeros(n);
    for p in 0..n {
        let eps = -1.0 + 2.0 * p as f64 / n.max(1) as f64 + 0.1 * rng.gen_range(-1.0..1.0);
        ints.set_h(p, p, eps);
        for q in 0..p {
            ints.set_h(p, q, 0.05 * rng.gen_range(-1.0..1.0));
        }
    }
    let n_aux = n + 2;
    let npair = n * (n + 1) / 2;
    let mut b = vec![vec![0.0f64; npair]; n_aux];
    for (aux, row) in b.iter_mut().enumerate() {
        let scale = 0.6 / (1.0 + aux as f64).sqrt();
        for (pq, v) in row.iter_mut().enumerate() {
            let diag = is_diagonal_pair(pq);
            *v = if diag {
                scale * rng.gen_range(0.5..1.0)
            } else {
                0.2 * scale * rng.gen_range(-1.0..1.0)
            };
        }
    }
    for p in 0..n {
        for q in 0..=p {
            let pq = p * (p + 1) / 2 + q;
            for r in 0..n {
                for s in 0..=r {
                    let rs = r * (r + 1) / 2 + s;
                    if rs > pq {
                        continue;
                    }
                    let v: f64 = b.iter().map(|row| row[pq] * row[rs]).sum();
                    ints.set_g2(p, q, r, s, v);
                }
            }
        }
    }
    ints.core_energy = rng.gen_range(-2.0..-1.0);
    ints
}

fn is_diagonal_pair(pq: usize) -> bool {
    // triangular index pq = p(p+1)/2 + q is diagonal when q == p
    let p = ((((8 * pq + 1) as f64).sqrt() - 1.0) / 2.0).floor() as usize;
    pq == p * (p + 1) / 2 + p
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reproducible_and_symmetric() {
        let a = random_integrals(5, 3);
        let b = random_integrals(5, 3);
        assert_eq!(a, b);
        assert_ne!(a, random_integrals(5, 4));
        assert_eq!(a.symmetry_residual(), 0.0);
    }
}
