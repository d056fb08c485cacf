//! Independent reference implementations shared by the integration tests.
#![allow(dead_code)]

use std::collections::BTreeMap;

use casq_core::casci::{solve_multiplets, DavidsonConfig, Multiplet};
use casq_core::detspace::CasSpace;
use casq_core::ingest::{
    build_ligand_field_model, IntegralSet, LigandFieldBuild, LigandFieldModel,
};
use nalgebra::{DMatrix, Matrix3, Matrix5, Vector5};
use num_complex::Complex64;

/// Gauss–Legendre nodes and weights on [-1, 1] by Newton iteration.
pub fn gauss_legendre(n: usize) -> Vec<(f64, f64)> {
    let mut out = Vec::with_capacity(n);
    for i in 0..n {
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, x);
            for k in 2..=n {
                let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
                p0 = p1;
                p1 = p2;
            }
            dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
            let dx = p1 / dp;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        out.push((x, 2.0 / ((1.0 - x * x) * dp * dp)));
    }
    out
}

/// Product quadrature on the unit sphere (Gauss–Legendre in cos θ, uniform φ).
pub fn sphere_grid(n_theta: usize, n_phi: usize) -> Vec<([f64; 3], f64)> {
    let mut pts = Vec::new();
    for (ct, wt) in gauss_legendre(n_theta) {
        let st = (1.0 - ct * ct).sqrt();
        for j in 0..n_phi {
            let phi = 2.0 * std::f64::consts::PI * j as f64 / n_phi as f64;
            pts.push((
                [st * phi.cos(), st * phi.sin(), ct],
                wt * 2.0 * std::f64::consts::PI / n_phi as f64,
            ));
        }
    }
    pts
}

/// Real d orbitals on the unit sphere as quadratic forms rᵀQr, ordered
/// (z², xz, yz, x²−y², xy) with unit norm.
pub fn d_quadratic_forms() -> [Matrix3<f64>; 5] {
    let pi = std::f64::consts::PI;
    let a = 0.25 * (5.0 / pi).sqrt();
    let b = 0.5 * (15.0 / pi).sqrt();
    let c = 0.25 * (15.0 / pi).sqrt();
    [
        Matrix3::new(-a, 0.0, 0.0, 0.0, -a, 0.0, 0.0, 0.0, 2.0 * a),
        Matrix3::new(0.0, 0.0, b / 2.0, 0.0, 0.0, 0.0, b / 2.0, 0.0, 0.0),
        Matrix3::new(0.0, 0.0, 0.0, 0.0, 0.0, b / 2.0, 0.0, b / 2.0, 0.0),
        Matrix3::new(c, 0.0, 0.0, 0.0, -c, 0.0, 0.0, 0.0, 0.0),
        Matrix3::new(0.0, b / 2.0, 0.0, b / 2.0, 0.0, 0.0, 0.0, 0.0, 0.0),
    ]
}

pub fn legendre(k: usize, x: f64) -> f64 {
    match k {
        0 => 1.0,
        2 => 0.5 * (3.0 * x * x - 1.0),
        4 => (35.0 * x.powi(4) - 30.0 * x * x + 3.0) / 8.0,
        _ => unimplemented!("only even k ≤ 4 needed"),
    }
}

/// `(pq|rs)` over real d orbitals by double sphere quadrature of
/// Σ_k F^k P_k(r̂₁·r̂₂) with F⁰ = 7C/5, F² = 49B + 7C, F⁴ = 63C/5.
pub fn d_eri_by_quadrature(b: f64, c: f64) -> Vec<f64> {
    let grid = sphere_grid(8, 12);
    let forms = d_quadratic_forms();
    let vals: Vec<[f64; 5]> = grid
        .iter()
        .map(|(r, _)| {
            let v = nalgebra::Vector3::new(r[0], r[1], r[2]);
            std::array::from_fn(|i| v.dot(&(forms[i] * v)))
        })
        .collect();
    let slater = [
        (0usize, 7.0 * c / 5.0),
        (2, 49.0 * b + 7.0 * c),
        (4, 63.0 * c / 5.0),
    ];
    let n = grid.len();
    let mut kernel = vec![0.0; n * n];
    for i in 0..n {
        for j in 0..n {
            let g = &grid[i].0;
            let h = &grid[j].0;
            let cosg = (g[0] * h[0] + g[1] * h[1] + g[2] * h[2]).clamp(-1.0, 1.0);
            kernel[i * n + j] = grid[i].1
                * grid[j].1
                * slater
                    .iter()
                    .map(|&(k, f)| f * legendre(k, cosg))
                    .sum::<f64>();
        }
    }
    let mut out = vec![0.0; 625];
    for p in 0..5 {
        for q in 0..5 {
            for r in 0..5 {
                for s in 0..5 {
                    let mut acc = 0.0;
                    for i in 0..n {
                        let left = vals[i][p] * vals[i][q];
                        if left == 0.0 {
                            continue;
                        }
                        let row = &kernel[i * n..(i + 1) * n];
                        let mut inner = 0.0;
                        for j in 0..n {
                            inner += row[j] * vals[j][r] * vals[j][s];
                        }
                        acc += left * inner;
                    }
                    out[((p * 5 + q) * 5 + r) * 5 + s] = acc;
                }
            }
        }
    }
    out
}

/// `Im <p|l_k|q>` with `l = −i r×∇`, by quadrature on the quadratic forms.
pub fn d_angular_momentum_by_quadrature() -> [DMatrix<f64>; 3] {
    let grid = sphere_grid(8, 12);
    let forms = d_quadratic_forms();
    std::array::from_fn(|k| {
        DMatrix::from_fn(5, 5, |p, q| {
            grid.iter()
                .map(|(r, w)| {
                    let v = nalgebra::Vector3::new(r[0], r[1], r[2]);
                    let grad = forms[q] * v * 2.0;
                    let torque = v.cross(&grad);
                    -w * v.dot(&(forms[p] * v)) * torque[k]
                })
                .sum()
        })
    })
}

/// Fermion creation/annihilation on occupation masks over spin orbitals
/// ordered (0α, 0β, 1α, 1β, …).
fn op_apply(mask: u128, orb: usize, create: bool) -> Option<(u128, f64)> {
    let bit = 1u128 << orb;
    if create == (mask & bit != 0) {
        return None;
    }
    let below = (mask & (bit - 1)).count_ones();
    let sign = if below.is_multiple_of(2) { 1.0 } else { -1.0 };
    Some((mask ^ bit, sign))
}

/// Apply a string of operators (rightmost first); `true` = creation.
fn apply_string(mask: u128, ops: &[(usize, bool)]) -> Option<(u128, f64)> {
    let mut m = mask;
    let mut s = 1.0;
    for &(o, c) in ops.iter().rev() {
        let (nm, ns) = op_apply(m, o, c)?;
        m = nm;
        s *= ns;
    }
    Some((m, s))
}

/// Occupation mask of determinant `k` in interleaved spin-orbital order,
/// built as a†_{first} … a†_{last}|0> in that order.
pub fn interleaved_mask(space: &CasSpace, k: usize) -> u128 {
    let d = space.det(k);
    let mut m = 0u128;
    for p in 0..space.n_orb() {
        if d.alpha >> p & 1 == 1 {
            m |= 1 << (2 * p);
        }
        if d.beta >> p & 1 == 1 {
            m |= 1 << (2 * p + 1);
        }
    }
    m
}

/// Hamiltonian over the determinants of `space` in the interleaved
/// spin-orbital convention, from second quantization term by term.
pub fn second_quantized_hamiltonian(space: &CasSpace, ints: &IntegralSet) -> DMatrix<f64> {
    let n = space.n_orb();
    let dim = space.len();
    let masks: Vec<u128> = (0..dim).map(|k| interleaved_mask(space, k)).collect();
    let index: std::collections::HashMap<u128, usize> =
        masks.iter().enumerate().map(|(i, m)| (*m, i)).collect();
    let so = |p: usize, s: usize| 2 * p + s;
    let mut h = DMatrix::zeros(dim, dim);
    for (j, &mj) in masks.iter().enumerate() {
        h[(j, j)] += ints.core_energy;
        for p in 0..n {
            for q in 0..n {
                for s in 0..2 {
                    if let Some((m, sg)) = apply_string(mj, &[(so(p, s), true), (so(q, s), false)])
                    {
                        if let Some(&i) = index.get(&m) {
                            h[(i, j)] += ints.h(p, q) * sg;
                        }
                    }
                }
                for r in 0..n {
                    for t in 0..n {
                        let v = ints.g2(p, q, r, t);
                        if v == 0.0 {
                            continue;
                        }
                        for s1 in 0..2 {
                            for s2 in 0..2 {
                                let ops = [
                                    (so(p, s1), true),
                                    (so(r, s2), true),
                                    (so(t, s2), false),
                                    (so(q, s1), false),
                                ];
                                if let Some((m, sg)) = apply_string(mj, &ops) {
                                    if let Some(&i) = index.get(&m) {
                                        h[(i, j)] += 0.5 * v * sg;
                                    }
                                }
                            }
                        }
                    }
                }
            }
        }
    }
    h
}

/// One-electron spin-orbital matrix `h ⊗ 1 + Σ_k i Z_k ⊗ s_k` over (p, α), (p, β).
pub fn one_electron_soc_hamiltonian(h: &DMatrix<f64>, z: &[DMatrix<f64>; 3]) -> DMatrix<Complex64> {
    let n = h.nrows();
    let i = Complex64::new(0.0, 1.0);
    let half = 0.5;
    // s_k in (α, β) basis
    let s: [[[Complex64; 2]; 2]; 3] = [
        [
            [Complex64::new(0.0, 0.0), Complex64::new(half, 0.0)],
            [Complex64::new(half, 0.0), Complex64::new(0.0, 0.0)],
        ],
        [
            [Complex64::new(0.0, 0.0), Complex64::new(0.0, -half)],
            [Complex64::new(0.0, half), Complex64::new(0.0, 0.0)],
        ],
        [
            [Complex64::new(half, 0.0), Complex64::new(0.0, 0.0)],
            [Complex64::new(0.0, 0.0), Complex64::new(-half, 0.0)],
        ],
    ];
    DMatrix::from_fn(2 * n, 2 * n, |a, b| {
        let (p, sa) = (a / 2, a % 2);
        let (q, sb) = (b / 2, b % 2);
        let mut v = if sa == sb {
            Complex64::new(h[(p, q)], 0.0)
        } else {
            Complex64::new(0.0, 0.0)
        };
        for k in 0..3 {
            v += i * z[k][(p, q)] * s[k][sa][sb];
        }
        v
    })
}

pub fn diagonal_model(
    diag_ev: [f64; 5],
    b: f64,
    c: f64,
    zeta: f64,
    n_elec: usize,
) -> LigandFieldModel {
    LigandFieldModel {
        v_lf: Matrix5::from_diagonal(&Vector5::from_row_slice(&diag_ev)),
        racah_b: b,
        racah_c: c,
        zeta,
        n_elec,
    }
}

pub fn tight() -> DavidsonConfig {
    DavidsonConfig {
        tol: 1e-9,
        ..DavidsonConfig::default()
    }
}

/// All multiplets of the build's default root request.
pub fn multiplets_of(build: &LigandFieldBuild) -> Vec<Multiplet> {
    let (ne, no) = build.config.cas;
    solve_multiplets(
        ne,
        no,
        &build.integrals,
        &build.config.roots_per_multiplicity,
        &tight(),
    )
    .expect("ligand-field multiplets")
}

pub fn build(model: &LigandFieldModel) -> LigandFieldBuild {
    build_ligand_field_model(model).expect("valid model")
}

pub fn roots(pairs: &[(u32, usize)]) -> BTreeMap<u32, usize> {
    pairs.iter().copied().collect()
}

/// `exp(A)` for a real antisymmetric matrix via its Taylor series (orthogonal result).
pub fn expm_antisymmetric(a: &DMatrix<f64>) -> DMatrix<f64> {
    let n = a.nrows();
    // scale and square
    let norm = a.amax() * n as f64;
    let mut squarings = 0;
    let mut scaled = a.clone();
    while norm / 2f64.powi(squarings) > 0.25 {
        squarings += 1;
    }
    scaled /= 2f64.powi(squarings);
    let mut term = DMatrix::identity(n, n);
    let mut sum = DMatrix::identity(n, n);
    for k in 1..30 {
        term = &term * &scaled / k as f64;
        sum += &term;
    }
    for _ in 0..squarings {
        sum = &sum * &sum;
    }
    sum
}
