//! Cyclic complex Jacobi for Hermitian matrices, and one-sided (Hestenes)
//! Jacobi for singular values.

use super::{inner, norm, ComplexMatrix, C64, ZERO};
use crate::error::{Error, Result};
use crate::tolerance::Tolerances;

/// Eigenvalues in ascending order with matching orthonormal eigenvector columns.
#[derive(Debug, Clone)]
pub struct Eigensystem {
    pub values: Vec<f64>,
    pub vectors: ComplexMatrix,
}

impl Eigensystem {
    pub fn vector(&self, k: usize) -> Vec<C64> {
        self.vectors.column(k)
    }

    /// `V diag(f(λ)) V†`.
    pub fn map_values(&self, f: impl Fn(f64) -> f64) -> ComplexMatrix {
        let n = self.values.len();
        let mut m = ComplexMatrix::zeros(n, n);
        for (k, &lambda) in self.values.iter().enumerate() {
            let w = f(lambda);
            if w == 0.0 {
                continue;
            }
            for i in 0..n {
                let vi = self.vectors[(i, k)] * w;
                for j in 0..n {
                    m[(i, j)] += vi * self.vectors[(j, k)].conj();
                }
            }
        }
        m
    }

    pub fn reconstruct(&self) -> ComplexMatrix {
        self.map_values(|x| x)
    }
}

pub fn hermitian_eigensystem(m: &ComplexMatrix) -> Result<Eigensystem> {
    hermitian_eigensystem_with(m, &Tolerances::DEFAULT)
}

pub fn hermitian_eigensystem_with(m: &ComplexMatrix, tol: &Tolerances) -> Result<Eigensystem> {
    if !m.is_square() {
        return Err(Error::NotSquare {
            rows: m.rows(),
            cols: m.cols(),
        });
    }
    let n = m.rows();
    if n > tol.max_dim {
        return Err(Error::DimensionTooLarge {
            dim: n,
            cap: tol.max_dim,
        });
    }
    let residual = m.hermiticity_residual();
    if residual > tol.hermiticity {
        return Err(Error::NotHermitian { residual });
    }

    // work on the exactly Hermitian part
    let mut a = m.add(&m.adjoint())?.scale_real(0.5);
    for k in 0..n {
        a[(k, k)] = C64::new(a[(k, k)].re, 0.0);
    }
    let mut v = ComplexMatrix::identity(n);
    let threshold = tol.jacobi_off_diagonal * a.frobenius_norm().max(1.0);

    let mut sweeps = 0;
    loop {
        let off = off_diagonal_norm(&a);
        if off < threshold {
            break;
        }
        if sweeps == tol.jacobi_max_sweeps {
            return Err(Error::EigenNoConvergence {
                sweeps,
                off_diagonal: off,
            });
        }
        for p in 0..n {
            for q in (p + 1)..n {
                rotate(&mut a, &mut v, p, q);
            }
        }
        sweeps += 1;
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[(i, i)].re.total_cmp(&a[(j, j)].re));
    let values = order.iter().map(|&k| a[(k, k)].re).collect();
    let columns: Vec<Vec<C64>> = order.iter().map(|&k| v.column(k)).collect();
    Ok(Eigensystem {
        values,
        vectors: ComplexMatrix::from_columns(&columns),
    })
}

fn off_diagonal_norm(a: &ComplexMatrix) -> f64 {
    let n = a.rows();
    let mut s = 0.0;
    for i in 0..n {
        for j in 0..n {
            if i != j {
                s += a[(i, j)].norm_sqr();
            }
        }
    }
    s.sqrt()
}

/// Zeroes `a[p][q]` with the unitary `U = diag-phase · Givens`, updating
/// `a ← U† a U` and `v ← v U`.
fn rotate(a: &mut ComplexMatrix, v: &mut ComplexMatrix, p: usize, q: usize) {
    let apq = a[(p, q)];
    let g = apq.norm();
    if g < f64::MIN_POSITIVE {
        return;
    }
    let phase = apq / g;
    let app = a[(p, p)].re;
    let aqq = a[(q, q)].re;
    let theta = (aqq - app) / (2.0 * g);
    let t = if theta.is_infinite() {
        0.0
    } else {
        theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt())
    };
    let c = 1.0 / (t * t + 1.0).sqrt();
    let s = t * c;
    let phase_conj = phase.conj();
    let u_pp = C64::new(c, 0.0);
    let u_pq = C64::new(s, 0.0);
    let u_qp = phase_conj * (-s);
    let u_qq = phase_conj * c;

    let n = a.rows();
    for k in 0..n {
        let akp = a[(k, p)];
        let akq = a[(k, q)];
        a[(k, p)] = akp * u_pp + akq * u_qp;
        a[(k, q)] = akp * u_pq + akq * u_qq;
    }
    for k in 0..n {
        let apk = a[(p, k)];
        let aqk = a[(q, k)];
        a[(p, k)] = u_pp.conj() * apk + u_qp.conj() * aqk;
        a[(q, k)] = u_pq.conj() * apk + u_qq.conj() * aqk;
    }
    a[(p, q)] = ZERO;
    a[(q, p)] = ZERO;
    a[(p, p)] = C64::new(a[(p, p)].re, 0.0);
    a[(q, q)] = C64::new(a[(q, q)].re, 0.0);

    for k in 0..n {
        let vkp = v[(k, p)];
        let vkq = v[(k, q)];
        v[(k, p)] = vkp * u_pp + vkq * u_qp;
        v[(k, q)] = vkp * u_pq + vkq * u_qq;
    }
}

/// Singular values in descending order.
///
/// One-sided Jacobi orthogonalizes the columns pairwise, so small singular
/// values keep high relative accuracy (unlike square roots of `M M†`
/// eigenvalues).
pub fn singular_values(m: &ComplexMatrix) -> Vec<f64> {
    // orthogonalize the columns of the taller orientation
    let work = if m.rows() >= m.cols() { m.clone() } else { m.adjoint() };
    let mut cols: Vec<Vec<C64>> = (0..work.cols()).map(|j| work.column(j)).collect();
    let k = cols.len();
    for _ in 0..100 {
        let mut rotated = false;
        for p in 0..k {
            for q in (p + 1)..k {
                let alpha = norm(&cols[p]).powi(2);
                let beta = norm(&cols[q]).powi(2);
                let gamma = inner(&cols[p], &cols[q]);
                let g = gamma.norm();
                if g <= f64::EPSILON * (alpha * beta).sqrt() || g < f64::MIN_POSITIVE {
                    continue;
                }
                rotated = true;
                let phase = gamma / g;
                let zeta = (beta - alpha) / (2.0 * g);
                let t = zeta.signum() / (zeta.abs() + (1.0 + zeta * zeta).sqrt());
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = c * t;
                for r in 0..cols[p].len() {
                    let ap = cols[p][r];
                    let bq = cols[q][r] * phase.conj();
                    cols[p][r] = ap * c - bq * s;
                    cols[q][r] = ap * s + bq * c;
                }
            }
        }
        if !rotated {
            break;
        }
    }
    let mut sv: Vec<f64> = cols.iter().map(|c| norm(c)).collect();
    sv.sort_by(|a, b| b.total_cmp(a));
    sv
}
