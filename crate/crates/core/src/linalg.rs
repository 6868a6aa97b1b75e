//! Dense 4×4 LU factorization with partial pivoting.
//!
//! The only linear algebra this crate needs is determinant, solve, inverse
//! and a 1-norm condition estimate for 4×4 decoupling matrices, so a small
//! fixed-size factorization keeps the numerics fully deterministic.

/// LU factorization `P·A = L·U` of a 4×4 matrix, partial pivoting.
#[derive(Debug, Clone)]
pub struct Lu4 {
    /// Combined L (strict lower, unit diagonal implied) and U factors.
    lu: [[f64; 4]; 4],
    /// Row permutation: factored row i came from original row `perm[i]`.
    perm: [usize; 4],
    /// Determinant sign from row exchanges (±1).
    sign: f64,
    /// True when a pivot vanished exactly; the matrix is singular.
    singular: bool,
}

impl Lu4 {
    pub fn factor(a: &[[f64; 4]; 4]) -> Self {
        let mut lu = *a;
        let mut perm = [0, 1, 2, 3];
        let mut sign = 1.0;
        let mut singular = false;

        for k in 0..4 {
            // Pivot search in column k.
            let mut p = k;
            let mut best = lu[k][k].abs();
            for i in (k + 1)..4 {
                let v = lu[i][k].abs();
                if v > best {
                    best = v;
                    p = i;
                }
            }
            if p != k {
                lu.swap(k, p);
                perm.swap(k, p);
                sign = -sign;
            }
            let piv = lu[k][k];
            if piv == 0.0 {
                singular = true;
                continue;
            }
            for i in (k + 1)..4 {
                let m = lu[i][k] / piv;
                lu[i][k] = m;
                for j in (k + 1)..4 {
                    lu[i][j] -= m * lu[k][j];
                }
            }
        }

        Self {
            lu,
            perm,
            sign,
            singular,
        }
    }

    pub fn is_singular(&self) -> bool {
        self.singular
    }

    pub fn det(&self) -> f64 {
        if self.singular {
            return 0.0;
        }
        self.sign * (0..4).map(|k| self.lu[k][k]).product::<f64>()
    }

    /// Solve `A·x = b`. Returns `None` when a pivot vanished exactly.
    pub fn solve(&self, b: &[f64; 4]) -> Option<[f64; 4]> {
        if self.singular {
            return None;
        }
        // Forward substitution on permuted b.
        let mut y = [0.0; 4];
        for i in 0..4 {
            let mut acc = b[self.perm[i]];
            for j in 0..i {
                acc -= self.lu[i][j] * y[j];
            }
            y[i] = acc;
        }
        // Back substitution.
        let mut x = [0.0; 4];
        for i in (0..4).rev() {
            let mut acc = y[i];
            for j in (i + 1)..4 {
                acc -= self.lu[i][j] * x[j];
            }
            x[i] = acc / self.lu[i][i];
        }
        Some(x)
    }

    pub fn inverse(&self) -> Option<[[f64; 4]; 4]> {
        let mut inv = [[0.0; 4]; 4];
        for j in 0..4 {
            let mut e = [0.0; 4];
            e[j] = 1.0;
            let col = self.solve(&e)?;
            for i in 0..4 {
                inv[i][j] = col[i];
            }
        }
        Some(inv)
    }
}

/// Maximum absolute column sum.
pub fn norm1(a: &[[f64; 4]; 4]) -> f64 {
    (0..4)
        .map(|j| (0..4).map(|i| a[i][j].abs()).sum::<f64>())
        .fold(0.0f64, f64::max)
}

/// 1-norm condition estimate `‖A‖₁·‖A⁻¹‖₁`; infinite for exactly singular A.
pub fn cond1(a: &[[f64; 4]; 4], lu: &Lu4) -> f64 {
    match lu.inverse() {
        Some(inv) => norm1(a) * norm1(&inv),
        None => f64::INFINITY,
    }
}

/// Product of Euclidean row norms; a scale reference for determinant
/// magnitudes (Hadamard's inequality bounds |det| by this product).
pub fn row_norm_product(a: &[[f64; 4]; 4]) -> f64 {
    (0..4)
        .map(|i| (0..4).map(|j| a[i][j] * a[i][j]).sum::<f64>().sqrt())
        .product()
}

pub fn mat_vec(a: &[[f64; 4]; 4], x: &[f64; 4]) -> [f64; 4] {
    std::array::from_fn(|i| (0..4).map(|j| a[i][j] * x[j]).sum())
}
