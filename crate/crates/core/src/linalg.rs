//! Small dense helpers for 3-channel colour statistics.

use crate::scalar::Real;

pub type Mat3<T> = [[T; 3]; 3];

/// Eigen-decomposition of a symmetric 3x3 matrix by cyclic Jacobi rotations.
/// Returns eigenvalues in descending order with unit eigenvectors as the
/// matching entries of the second array.
pub fn symmetric_eigen3<T: Real>(m: &Mat3<T>) -> ([T; 3], [[T; 3]; 3]) {
    let mut a = *m;
    let mut v = identity3::<T>();
    let eps = T::epsilon();
    for _sweep in 0..64 {
        let off = a[0][1] * a[0][1] + a[0][2] * a[0][2] + a[1][2] * a[1][2];
        let diag = a[0][0] * a[0][0] + a[1][1] * a[1][1] + a[2][2] * a[2][2];
        if off <= eps * eps * diag || off == T::zero() {
            break;
        }
        for (p, q) in [(0usize, 1usize), (0, 2), (1, 2)] {
            if a[p][q] == T::zero() {
                continue;
            }
            let theta = (a[q][q] - a[p][p]) / (T::lit(2.0) * a[p][q]);
            let t = theta.signum() / (theta.abs() + (theta * theta + T::one()).sqrt());
            let c = T::one() / (t * t + T::one()).sqrt();
            let s = t * c;
            for k in 0..3 {
                let (akp, akq) = (a[k][p], a[k][q]);
                a[k][p] = c * akp - s * akq;
                a[k][q] = s * akp + c * akq;
            }
            for k in 0..3 {
                let (apk, aqk) = (a[p][k], a[q][k]);
                a[p][k] = c * apk - s * aqk;
                a[q][k] = s * apk + c * aqk;
            }
            for row in v.iter_mut() {
                let (vp, vq) = (row[p], row[q]);
                row[p] = c * vp - s * vq;
                row[q] = s * vp + c * vq;
            }
        }
    }
    let mut order = [0usize, 1, 2];
    order.sort_by(|&i, &j| a[j][j].partial_cmp(&a[i][i]).unwrap());
    let values = order.map(|i| a[i][i]);
    let vectors = order.map(|i| [v[0][i], v[1][i], v[2][i]]);
    (values, vectors)
}

pub fn identity3<T: Real>() -> Mat3<T> {
    let (o, z) = (T::one(), T::zero());
    [[o, z, z], [z, o, z], [z, z, o]]
}

pub fn dot3<T: Real>(a: &[T; 3], b: &[T; 3]) -> T {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

pub fn mat_vec3<T: Real>(m: &Mat3<T>, x: &[T; 3]) -> [T; 3] {
    [dot3(&m[0], x), dot3(&m[1], x), dot3(&m[2], x)]
}

pub fn mat_mul3<T: Real>(a: &Mat3<T>, b: &Mat3<T>) -> Mat3<T> {
    let mut out = [[T::zero(); 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            out[i][j] = (0..3).map(|k| a[i][k] * b[k][j]).sum();
        }
    }
    out
}

/// Gram matrix `M M'` of a 3xN matrix given as N column triples.
pub fn gram3<T: Real>(columns: &[[T; 3]]) -> Mat3<T> {
    let mut g = [[T::zero(); 3]; 3];
    for c in columns {
        for i in 0..3 {
            for j in 0..3 {
                g[i][j] += c[i] * c[j];
            }
        }
    }
    g
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn diagonalises_a_known_matrix() {
        let m: [[f64; 3]; 3] = [[4.0, 1.0, 0.5], [1.0, 3.0, 0.2], [0.5, 0.2, 1.0]];
        let (vals, vecs) = symmetric_eigen3(&m);
        assert!(vals[0] >= vals[1] && vals[1] >= vals[2]);
        for k in 0..3 {
            let mv = mat_vec3(&m, &vecs[k]);
            for i in 0..3 {
                assert!((mv[i] - vals[k] * vecs[k][i]).abs() < 1e-12);
            }
            assert!((dot3(&vecs[k], &vecs[k]) - 1.0).abs() < 1e-12);
        }
        let trace: f64 = vals.iter().sum();
        assert!((trace - 8.0).abs() < 1e-12);
    }

    #[test]
    fn handles_already_diagonal() {
        let m = [[1.0, 0.0, 0.0], [0.0, 5.0, 0.0], [0.0, 0.0, 2.0]];
        let (vals, vecs) = symmetric_eigen3(&m);
        assert_eq!(vals, [5.0, 2.0, 1.0]);
        assert_eq!(vecs[0], [0.0, 1.0, 0.0]);
    }
}
