//! Test-only oracles, kept independent of the library's reshaping and SVD code.
#![allow(dead_code)]

use gptsep::{ComplexMatrix, DensityMatrix, LabelSet, StateSpec};
use num_complex::Complex64;

/// Builds `ρ^{T_Y}` by scattering every entry of `mat` to the position the
/// labelling rule assigns it: each label in `y` switches sides, sides are
/// ordered by subsystem with `c_k` slower than `r_k` when both are present.
pub fn brute_force_transpose(mat: &ComplexMatrix, dims: &[usize], y: &LabelSet) -> ComplexMatrix {
    let n = dims.len();
    let side: usize = dims.iter().product();
    // (subsystem, is_col, on_row_side) in canonical order
    let mut row_side = Vec::new();
    let mut col_side = Vec::new();
    for k in 0..n {
        let mut mv = |is_col: bool| {
            let label: gptsep::Label = if is_col { gptsep::Label::col(k) } else { gptsep::Label::row(k) };
            let on_rows = !is_col ^ y.contains(label);
            if on_rows {
                row_side.push((k, is_col));
            } else {
                col_side.push((k, is_col));
            }
        };
        mv(true);
        mv(false);
    }
    let rows: usize = row_side.iter().map(|&(k, _)| dims[k]).product();
    let cols: usize = col_side.iter().map(|&(k, _)| dims[k]).product();
    let mut out = vec![Complex64::new(f64::NAN, 0.0); rows * cols];

    let digits = |mut x: usize| -> Vec<usize> {
        let mut d = vec![0; n];
        for k in (0..n).rev() {
            d[k] = x % dims[k];
            x /= dims[k];
        }
        d
    };
    let place = |list: &[(usize, bool)], i: &[usize], j: &[usize]| -> usize {
        list.iter().fold(0, |acc, &(k, is_col)| acc * dims[k] + if is_col { j[k] } else { i[k] })
    };
    for big_i in 0..side {
        let i = digits(big_i);
        for big_j in 0..side {
            let j = digits(big_j);
            let r = place(&row_side, &i, &j);
            let c = place(&col_side, &i, &j);
            out[r * cols + c] = mat.get(big_i, big_j);
        }
    }
    ComplexMatrix::new(rows, cols, out).expect("every slot filled exactly once")
}

/// Eigenvalues of a real symmetric matrix by cyclic Jacobi rotations.
pub fn jacobi_eigenvalues(mut a: Vec<Vec<f64>>) -> Vec<f64> {
    let n = a.len();
    let scale: f64 = a.iter().flatten().map(|x| x * x).sum::<f64>().sqrt().max(1e-300);
    for _sweep in 0..100 {
        let off: f64 = (0..n)
            .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| a[i][j] * a[i][j])
            .sum::<f64>()
            .sqrt();
        if off <= 1e-17 * scale {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                if a[p][q].abs() < 1e-300 {
                    continue;
                }
                let theta = (a[q][q] - a[p][p]) / (2.0 * a[p][q]);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for row in a.iter_mut() {
                    let (akp, akq) = (row[p], row[q]);
                    row[p] = c * akp - s * akq;
                    row[q] = s * akp + c * akq;
                }
                let (rp, rq) = (a[p].clone(), a[q].clone());
                for k in 0..n {
                    a[p][k] = c * rp[k] - s * rq[k];
                    a[q][k] = s * rp[k] + c * rq[k];
                }
            }
        }
    }
    let mut ev: Vec<f64> = (0..n).map(|i| a[i][i]).collect();
    ev.sort_by(f64::total_cmp);
    ev
}

/// Eigenvalues of a Hermitian matrix via its real embedding `[[Re, -Im], [Im, Re]]`
/// (every eigenvalue appears twice there; one copy of each is returned).
pub fn hermitian_eigenvalues_oracle(h: &ComplexMatrix) -> Vec<f64> {
    let n = h.rows();
    let mut big = vec![vec![0.0; 2 * n]; 2 * n];
    for i in 0..n {
        for j in 0..n {
            let z = h.get(i, j);
            big[i][j] = z.re;
            big[i + n][j + n] = z.re;
            big[i][j + n] = -z.im;
            big[i + n][j] = z.im;
        }
    }
    jacobi_eigenvalues(big).into_iter().step_by(2).collect()
}

/// Trace norm from the eigenvalues `±σ_i` of the Hermitian dilation `[[0, A], [A†, 0]]`.
pub fn trace_norm_oracle(a: &ComplexMatrix) -> f64 {
    let (r, c) = a.shape();
    let n = r + c;
    let mut d = vec![Complex64::new(0.0, 0.0); n * n];
    for i in 0..r {
        for j in 0..c {
            d[i * n + r + j] = a.get(i, j);
            d[(r + j) * n + i] = a.get(i, j).conj();
        }
    }
    let dil = ComplexMatrix::new(n, n, d).unwrap();
    hermitian_eigenvalues_oracle(&dil).iter().map(|x| x.abs()).sum::<f64>() / 2.0
}

pub fn random_complex(rows: usize, cols: usize, seed: u64) -> ComplexMatrix {
    // a splitmix stream, unrelated to the library's generators
    let mut state = seed.wrapping_mul(0x9E37_79B9_7F4A_7C15).wrapping_add(1);
    let mut next = || {
        state = state.wrapping_add(0x9E37_79B9_7F4A_7C15);
        let mut z = state;
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        z ^= z >> 31;
        (z >> 11) as f64 / (1u64 << 53) as f64 * 2.0 - 1.0
    };
    let data = (0..rows * cols).map(|_| Complex64::new(next(), next())).collect();
    ComplexMatrix::new(rows, cols, data).unwrap()
}

pub fn spec(text: &str) -> DensityMatrix {
    text.parse::<StateSpec>().unwrap().generate().unwrap()
}

pub fn random_state(dims: &str, rank: usize, seed: u64) -> DensityMatrix {
    spec(&format!("random:{dims},{rank},{seed}"))
}

pub fn separable_state(dims: &str, terms: usize, seed: u64) -> DensityMatrix {
    spec(&format!("separable:{dims},{terms},{seed}"))
}

/// Product of random unitaries with one factor per subsystem.
pub fn local_unitary(dims: &[usize], seed: u64) -> ComplexMatrix {
    gptsep::random_local_unitary(dims, seed).unwrap()
}

pub fn max_abs_diff(a: &ComplexMatrix, b: &ComplexMatrix) -> f64 {
    a.max_abs_diff(b).unwrap()
}
