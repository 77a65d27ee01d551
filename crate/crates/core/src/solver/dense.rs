//! Small dense linear algebra for basis factorization.

/// LU factorization with partial pivoting, stored in place.
pub struct Lu {
    m: usize,
    /// Row-major combined L (unit diagonal, below) and U (on and above).
    lu: Vec<f64>,
    /// Row permutation: factorized row i came from original row `perm[i]`.
    perm: Vec<usize>,
}

impl Lu {
    /// Factors a row-major `m x m` matrix. Returns `None` when singular to
    /// working precision.
    pub fn factor(mut a: Vec<f64>, m: usize) -> Option<Lu> {
        debug_assert_eq!(a.len(), m * m);
        let mut perm: Vec<usize> = (0..m).collect();
        for k in 0..m {
            // Pivot: largest magnitude in column k at or below the diagonal.
            let mut p = k;
            let mut best = a[k * m + k].abs();
            for i in (k + 1)..m {
                let v = a[i * m + k].abs();
                if v > best {
                    best = v;
                    p = i;
                }
            }
            if best < 1e-12 {
                return None;
            }
            if p != k {
                for j in 0..m {
                    a.swap(k * m + j, p * m + j);
                }
                perm.swap(k, p);
            }
            let pivot = a[k * m + k];
            for i in (k + 1)..m {
                let f = a[i * m + k] / pivot;
                a[i * m + k] = f;
                if f != 0.0 {
                    for j in (k + 1)..m {
                        a[i * m + j] -= f * a[k * m + j];
                    }
                }
            }
        }
        Some(Lu { m, lu: a, perm })
    }

    /// Solves `A x = b` in place.
    pub fn solve(&self, b: &mut [f64]) {
        let m = self.m;
        let mut x = vec![0.0; m];
        for i in 0..m {
            x[i] = b[self.perm[i]];
        }
        // Forward: L y = Pb.
        for i in 1..m {
            let mut s = x[i];
            for j in 0..i {
                s -= self.lu[i * m + j] * x[j];
            }
            x[i] = s;
        }
        // Backward: U x = y.
        for i in (0..m).rev() {
            let mut s = x[i];
            for j in (i + 1)..m {
                s -= self.lu[i * m + j] * x[j];
            }
            x[i] = s / self.lu[i * m + i];
        }
        b.copy_from_slice(&x);
    }

    /// Dense inverse, row-major.
    pub fn inverse(&self) -> Vec<f64> {
        let m = self.m;
        let mut inv = vec![0.0; m * m];
        let mut col = vec![0.0; m];
        for j in 0..m {
            col.iter_mut().for_each(|v| *v = 0.0);
            col[j] = 1.0;
            self.solve(&mut col);
            for i in 0..m {
                inv[i * m + j] = col[i];
            }
        }
        inv
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn solves_small_system() {
        // [2 1; 1 3] x = [3; 5] -> x = [0.8, 1.4]
        let lu = Lu::factor(vec![2.0, 1.0, 1.0, 3.0], 2).unwrap();
        let mut b = vec![3.0, 5.0];
        lu.solve(&mut b);
        assert!((b[0] - 0.8).abs() < 1e-12);
        assert!((b[1] - 1.4).abs() < 1e-12);
    }

    #[test]
    fn inverse_matches_identity() {
        let a = vec![4.0, 2.0, 0.5, 1.0, 3.0, -1.0, 0.0, 1.0, 2.0];
        let lu = Lu::factor(a.clone(), 3).unwrap();
        let inv = lu.inverse();
        for i in 0..3 {
            for j in 0..3 {
                let mut s = 0.0;
                for k in 0..3 {
                    s += a[i * 3 + k] * inv[k * 3 + j];
                }
                let expect = if i == j { 1.0 } else { 0.0 };
                assert!((s - expect).abs() < 1e-10, "({i},{j}) -> {s}");
            }
        }
    }

    #[test]
    fn singular_detected() {
        assert!(Lu::factor(vec![1.0, 2.0, 2.0, 4.0], 2).is_none());
    }
}
