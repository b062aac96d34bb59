//! Dense linear-algebra helpers shared by the solvers.

use nalgebra::{DMatrix, DVector, SymmetricEigen};

pub type Vector = DVector<f64>;
pub type Matrix = DMatrix<f64>;

/// Largest singular value, computed by a full SVD.
pub fn spectral_norm(m: &Matrix) -> f64 {
    if m.is_empty() {
        return 0.0;
    }
    m.singular_values().iter().cloned().fold(0.0, f64::max)
}

/// Eigenvalues of a symmetric matrix in ascending order, with matching
/// eigenvectors as columns.
pub fn sorted_symmetric_eigen(m: &Matrix) -> (Vec<f64>, Matrix) {
    let eig = SymmetricEigen::new(m.clone());
    let mut order: Vec<usize> = (0..eig.eigenvalues.len()).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let values = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let vectors = Matrix::from_fn(m.nrows(), order.len(), |r, c| {
        eig.eigenvectors[(r, order[c])]
    });
    (values, vectors)
}

/// Principal square root of a symmetric positive semidefinite matrix.
/// Eigenvalues in `[-tol, 0)` are treated as zero.
pub fn psd_sqrt(m: &Matrix, tol: f64) -> Option<Matrix> {
    let eig = SymmetricEigen::new(m.clone());
    if eig.eigenvalues.iter().any(|&l| l < -tol) {
        return None;
    }
    let roots = eig.eigenvalues.map(|l| l.max(0.0).sqrt());
    let q = &eig.eigenvectors;
    Some(q * Matrix::from_diagonal(&roots) * q.transpose())
}

/// `K ⊗ I_h` acting on row-major flattened `n x h` matrices.
pub fn kron_identity(k: &Matrix, h: usize) -> Matrix {
    let (r, c) = k.shape();
    Matrix::from_fn(r * h, c * h, |i, j| {
        if i % h == j % h {
            k[(i / h, j / h)]
        } else {
            0.0
        }
    })
}

/// Row-major flattening of a matrix into a vector.
pub fn flatten_rows(m: &Matrix) -> Vector {
    let (r, c) = m.shape();
    Vector::from_fn(r * c, |i, _| m[(i / c, i % c)])
}

pub fn unflatten_rows(v: &Vector, rows: usize, cols: usize) -> Matrix {
    Matrix::from_fn(rows, cols, |i, j| v[i * cols + j])
}

pub fn max_abs(v: impl IntoIterator<Item = f64>) -> f64 {
    v.into_iter().fold(0.0, |acc, x| acc.max(x.abs()))
}

/// Maximum componentwise deviation between two equally shaped matrices.
pub fn max_deviation(a: &Matrix, b: &Matrix) -> f64 {
    assert_eq!(a.shape(), b.shape());
    max_abs(a.iter().zip(b.iter()).map(|(x, y)| x - y))
}

/// Comma-separated rows, shortest round-trip decimal representation.
pub fn matrix_to_csv(m: &Matrix) -> String {
    let mut out = String::new();
    for row in m.row_iter() {
        let cells: Vec<String> = row.iter().map(|v| format!("{v}")).collect();
        out.push_str(&cells.join(","));
        out.push('\n');
    }
    out
}

/// Parses `"1,2;3,4"` style inline matrices (rows split on `;`).
pub fn parse_inline_matrix(text: &str) -> Result<Matrix, String> {
    let rows: Vec<Vec<f64>> = text
        .split(';')
        .map(str::trim)
        .filter(|r| !r.is_empty())
        .map(|r| {
            r.split(',')
                .map(|c| c.trim().parse::<f64>().map_err(|e| format!("`{c}`: {e}")))
                .collect::<Result<Vec<_>, _>>()
        })
        .collect::<Result<_, _>>()?;
    let ncols = rows.first().map_or(0, Vec::len);
    if rows.iter().any(|r| r.len() != ncols) {
        return Err("ragged matrix rows".into());
    }
    Ok(Matrix::from_fn(rows.len(), ncols, |i, j| rows[i][j]))
}

pub fn inline_matrix(m: &Matrix) -> String {
    m.row_iter()
        .map(|r| r.iter().map(|v| format!("{v}")).collect::<Vec<_>>().join(","))
        .collect::<Vec<_>>()
        .join("; ")
}
