//! Small numerical kernels behind the decomposition: conjugate gradients,
//! grounded sparse Cholesky solves of graph Laplacians and dense projections.

use nalgebra::{DMatrix, DVector};
use nalgebra_sparse::factorization::CscCholesky;
use nalgebra_sparse::{CooMatrix, CscMatrix, CsrMatrix};

use crate::error::{Error, Result};

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

pub fn sub(a: &[f64], b: &[f64]) -> Vec<f64> {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

pub fn matvec(m: &CsrMatrix<f64>, x: &[f64]) -> Vec<f64> {
    let mut out = vec![0.0; m.nrows()];
    for (r, row) in m.row_iter().enumerate() {
        out[r] = row
            .col_indices()
            .iter()
            .zip(row.values())
            .map(|(&c, v)| v * x[c])
            .sum();
    }
    out
}

/// Conjugate gradients for a symmetric positive semidefinite operator and a
/// right-hand side in its range. Starting from zero keeps the iterates in the
/// range, so the limit is the minimum-norm solution.
pub fn conjugate_gradient(
    apply: impl Fn(&[f64]) -> Vec<f64>,
    rhs: &[f64],
    tol: f64,
    max_iter: usize,
) -> (Vec<f64>, f64) {
    let n = rhs.len();
    let scale = norm(rhs);
    let mut x = vec![0.0; n];
    if scale == 0.0 {
        return (x, 0.0);
    }
    let mut r = rhs.to_vec();
    let mut p = r.clone();
    let mut rr = dot(&r, &r);
    for _ in 0..max_iter {
        if rr.sqrt() <= tol * scale {
            break;
        }
        let ap = apply(&p);
        let pap = dot(&p, &ap);
        if pap <= 0.0 {
            break;
        }
        let alpha = rr / pap;
        for k in 0..n {
            x[k] += alpha * p[k];
            r[k] -= alpha * ap[k];
        }
        let next = dot(&r, &r);
        let beta = next / rr;
        rr = next;
        for k in 0..n {
            p[k] = r[k] + beta * p[k];
        }
    }
    let residual = norm(&sub(&apply(&x), rhs)) / scale;
    (x, residual)
}

/// Component id of every vertex of a graph.
pub fn components(vertices: usize, edges: &[(usize, usize)]) -> Vec<usize> {
    let mut parent: Vec<usize> = (0..vertices).collect();
    fn find(parent: &mut [usize], x: usize) -> usize {
        let mut r = x;
        while parent[r] != r {
            r = parent[r];
        }
        let mut y = x;
        while parent[y] != r {
            let next = parent[y];
            parent[y] = r;
            y = next;
        }
        r
    }
    for &(a, b) in edges {
        let (ra, rb) = (find(&mut parent, a), find(&mut parent, b));
        if ra != rb {
            parent[ra.max(rb)] = ra.min(rb);
        }
    }
    (0..vertices).map(|v| find(&mut parent, v)).collect()
}

/// Solves `L x = b` for a graph Laplacian on one connected component by
/// grounding its first vertex and factoring the remaining SPD block.
pub fn grounded_cholesky(
    laplacian: &CsrMatrix<f64>,
    members: &[usize],
    rhs: &[f64],
) -> Result<Vec<f64>> {
    let mut x = vec![0.0; members.len()];
    if members.len() < 2 {
        return Ok(x);
    }
    let reduced = &members[1..];
    let mut position = vec![usize::MAX; laplacian.nrows()];
    for (k, &v) in reduced.iter().enumerate() {
        position[v] = k;
    }
    let mut coo = CooMatrix::new(reduced.len(), reduced.len());
    for (k, &v) in reduced.iter().enumerate() {
        let row = laplacian.row(v);
        for (&c, &val) in row.col_indices().iter().zip(row.values()) {
            if position[c] != usize::MAX {
                coo.push(k, position[c], val);
            }
        }
    }
    let csc = CscMatrix::from(&coo);
    let factor = CscCholesky::factor(&csc).map_err(|e| Error::Numerical {
        message: format!("Cholesky factorisation of the grounded Laplacian failed: {e:?}"),
        residual: f64::NAN,
    })?;
    let b = DMatrix::from_iterator(reduced.len(), 1, reduced.iter().map(|&v| rhs[v]));
    let sol = factor.solve(&b);
    for k in 0..reduced.len() {
        x[k + 1] = sol[(k, 0)];
    }
    Ok(x)
}

/// Orthogonal projection of `w` onto the column space of `a`, with the rank
/// read off a column-pivoted QR factorisation.
pub fn project_onto_columns(a: &DMatrix<f64>, w: &DVector<f64>) -> (DVector<f64>, usize) {
    if a.ncols() == 0 || a.nrows() == 0 {
        return (DVector::zeros(w.len()), 0);
    }
    let qr = a.clone().col_piv_qr();
    let r = qr.r();
    let q = qr.q();
    let largest = r.diagonal().amax();
    let cutoff = largest * (a.nrows().max(a.ncols()) as f64) * f64::EPSILON * 64.0;
    let rank = r.diagonal().iter().take_while(|d| d.abs() > cutoff).count();
    let basis = q.columns(0, rank);
    (basis * (basis.transpose() * w), rank)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn path_laplacian(n: usize) -> CsrMatrix<f64> {
        let mut coo = CooMatrix::new(n, n);
        for k in 0..n - 1 {
            coo.push(k, k, 1.0);
            coo.push(k + 1, k + 1, 1.0);
            coo.push(k, k + 1, -1.0);
            coo.push(k + 1, k, -1.0);
        }
        CsrMatrix::from(&coo)
    }

    #[test]
    fn cg_matches_cholesky_up_to_constants() {
        let l = path_laplacian(6);
        let b = vec![1.0, -2.0, 0.5, 0.0, 1.5, -1.0];
        let (x, res) = conjugate_gradient(|v| matvec(&l, v), &b, 1e-14, 100);
        assert!(res < 1e-12);
        let members: Vec<usize> = (0..6).collect();
        let y = grounded_cholesky(&l, &members, &b).unwrap();
        let shift = x[0] - y[0];
        for k in 0..6 {
            assert!((x[k] - y[k] - shift).abs() < 1e-10);
        }
        // CG from zero stays mean-free
        assert!(x.iter().sum::<f64>().abs() < 1e-10);
    }

    #[test]
    fn projection_of_reordered_incidence() {
        // a 4-cycle and two triangles sharing vertices; the rank is 7
        let edges = [
            (0, 4),
            (1, 5),
            (2, 6),
            (3, 7),
            (0, 1),
            (0, 2),
            (0, 3),
            (1, 2),
            (1, 3),
            (2, 3),
            (4, 5),
            (4, 6),
            (4, 7),
            (5, 6),
            (5, 7),
            (6, 7),
        ];
        let mut sorted = edges.to_vec();
        sorted.sort_unstable();
        for list in [edges.to_vec(), sorted] {
            let mut a = DMatrix::zeros(list.len(), 8);
            for (r, &(x, y)) in list.iter().enumerate() {
                a[(r, x)] = -1.0;
                a[(r, y)] = 1.0;
            }
            let w = DVector::from_fn(list.len(), |r, _| (r as f64 * 0.7).sin());
            let (p, rank) = project_onto_columns(&a, &w);
            assert_eq!(rank, 7);
            // the residual is orthogonal to every column
            assert!((a.transpose() * (&w - &p)).amax() < 1e-12);
        }
    }

    #[test]
    fn component_ids() {
        assert_eq!(components(5, &[(0, 3), (3, 4)]), vec![0, 1, 2, 0, 0]);
    }

    #[test]
    fn projection_rank() {
        let a = DMatrix::from_row_slice(3, 2, &[1.0, 2.0, 1.0, 2.0, 0.0, 0.0]);
        let w = DVector::from_vec(vec![1.0, 0.0, 5.0]);
        let (p, rank) = project_onto_columns(&a, &w);
        assert_eq!(rank, 1);
        assert!((p[0] - 0.5).abs() < 1e-12 && (p[1] - 0.5).abs() < 1e-12 && p[2].abs() < 1e-12);
    }
}
