//! Small dense-tensor helpers: Cholesky frames and g-contracted norms.

use crate::jet::{Matrix, MAX_DIM};

/// Lower Cholesky factor of the leading `n×n` block, or `None` if the
/// block is not positive definite.
pub fn cholesky(g: &Matrix, n: usize) -> Option<Matrix> {
    let mut l = [[0.0; MAX_DIM]; MAX_DIM];
    for i in 0..n {
        for j in 0..=i {
            let mut sum = g[i][j];
            for k in 0..j {
                sum -= l[i][k] * l[j][k];
            }
            if i == j {
                if !(sum > 0.0) || !sum.is_finite() {
                    return None;
                }
                l[i][i] = sum.sqrt();
            } else {
                l[i][j] = sum / l[j][j];
            }
        }
    }
    Some(l)
}

/// Orthonormal coframe `e` with `e g eᵀ = I`: rows are the frame vectors
/// expressed in coordinates. Frame components of a covariant tensor are
/// `T_(a…) = e_a^i … T_(i…)`.
pub fn orthonormal_frame(g: &Matrix, n: usize) -> Option<Matrix> {
    let l = cholesky(g, n)?;
    // invert the lower-triangular factor
    let mut inv = [[0.0; MAX_DIM]; MAX_DIM];
    for i in 0..n {
        inv[i][i] = 1.0 / l[i][i];
        for j in 0..i {
            let mut sum = 0.0;
            for k in j..i {
                sum += l[i][k] * inv[k][j];
            }
            inv[i][j] = -sum / l[i][i];
        }
    }
    Some(inv)
}

/// Inverse of a symmetric positive definite block via its Cholesky factor.
pub fn spd_inverse(g: &Matrix, n: usize) -> Option<Matrix> {
    let e = orthonormal_frame(g, n)?;
    let mut out = [[0.0; MAX_DIM]; MAX_DIM];
    for i in 0..n {
        for j in 0..n {
            out[i][j] = (0..n).map(|a| e[a][i] * e[a][j]).sum();
        }
    }
    Some(out)
}

/// Frame components of a rank-`rank` covariant tensor given by `component`,
/// flattened row-major.
pub fn frame_components(rank: usize, n: usize, frame: &Matrix, component: impl Fn(&[usize]) -> f64) -> Vec<f64> {
    let total = n.pow(rank as u32);
    let mut idx = vec![0usize; rank];
    let mut data: Vec<f64> = (0..total)
        .map(|flat| {
            unflatten(flat, n, &mut idx);
            component(&idx)
        })
        .collect();
    // contract one slot at a time: O(rank · n^(rank+1))
    for slot in 0..rank {
        let stride = n.pow((rank - 1 - slot) as u32);
        let mut next = vec![0.0; total];
        for (flat, out) in next.iter_mut().enumerate() {
            let a = (flat / stride) % n;
            let base = flat - a * stride;
            *out = (0..n).map(|i| frame[a][i] * data[base + i * stride]).sum();
        }
        data = next;
    }
    data
}

/// g-contracted norm `sqrt(T_(i…) T^(i…))` of a covariant tensor.
pub fn g_norm(rank: usize, n: usize, frame: &Matrix, component: impl Fn(&[usize]) -> f64) -> f64 {
    frame_components(rank, n, frame, component)
        .iter()
        .map(|v| v * v)
        .sum::<f64>()
        .sqrt()
}

fn unflatten(mut flat: usize, n: usize, idx: &mut [usize]) {
    for slot in (0..idx.len()).rev() {
        idx[slot] = flat % n;
        flat /= n;
    }
}

/// Mixed-index product `g^{-1} A` restricted to the leading block.
pub fn raise_first(ginv: &Matrix, a: &Matrix, n: usize) -> Matrix {
    let mut out = [[0.0; MAX_DIM]; MAX_DIM];
    for i in 0..n {
        for j in 0..n {
            out[i][j] = (0..n).map(|k| ginv[i][k] * a[k][j]).sum();
        }
    }
    out
}

pub fn mat_mul(a: &Matrix, b: &Matrix, n: usize) -> Matrix {
    let mut out = [[0.0; MAX_DIM]; MAX_DIM];
    for i in 0..n {
        for j in 0..n {
            out[i][j] = (0..n).map(|k| a[i][k] * b[k][j]).sum();
        }
    }
    out
}

pub fn trace(a: &Matrix, n: usize) -> f64 {
    (0..n).map(|i| a[i][i]).sum()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample_metric() -> Matrix {
        let mut g = [[0.0; MAX_DIM]; MAX_DIM];
        g[0] = [2.0, 0.3, 0.1, 0.0];
        g[1] = [0.3, 1.5, -0.2, 0.0];
        g[2] = [0.1, -0.2, 0.8, 0.0];
        g
    }

    #[test]
    fn frame_orthonormalises_metric() {
        let g = sample_metric();
        let e = orthonormal_frame(&g, 3).unwrap();
        for a in 0..3 {
            for b in 0..3 {
                let mut v = 0.0;
                for i in 0..3 {
                    for j in 0..3 {
                        v += e[a][i] * g[i][j] * e[b][j];
                    }
                }
                let want = if a == b { 1.0 } else { 0.0 };
                assert!((v - want).abs() < 1e-14);
            }
        }
    }

    #[test]
    fn norm_agrees_with_explicit_contraction() {
        let g = sample_metric();
        let ginv = spd_inverse(&g, 3).unwrap();
        let e = orthonormal_frame(&g, 3).unwrap();
        let t = |i: usize, j: usize, k: usize| (i as f64 + 1.0) * 0.7 - (j * k) as f64 * 0.3 + 0.1;
        let mut explicit = 0.0;
        for (i, j, k) in itertools3(3) {
            for (a, b, c) in itertools3(3) {
                explicit += t(i, j, k) * t(a, b, c) * ginv[i][a] * ginv[j][b] * ginv[k][c];
            }
        }
        let norm = g_norm(3, 3, &e, |ix| t(ix[0], ix[1], ix[2]));
        assert!((norm * norm - explicit).abs() < 1e-12 * explicit.abs().max(1.0));
    }

    #[test]
    fn indefinite_metric_rejected() {
        let mut g = sample_metric();
        g[2][2] = -1.0;
        assert!(cholesky(&g, 3).is_none());
    }

    fn itertools3(n: usize) -> impl Iterator<Item = (usize, usize, usize)> {
        (0..n).flat_map(move |i| (0..n).flat_map(move |j| (0..n).map(move |k| (i, j, k))))
    }
}
