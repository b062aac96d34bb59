//! Mixing matrices: construction from a graph, certification of the four
//! defining properties, and the neighbor-only mixing primitive every
//! decentralized iteration is built on.

use std::fmt;

use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::linalg::{sorted_symmetric_eigen, Matrix, Vector};

/// Default certification tolerance.
pub const CERT_TOL: f64 = 1e-9;

/// Outcome of one certified property.
#[derive(Debug, Clone, PartialEq)]
pub struct PropertyCheck {
    pub passed: bool,
    pub detail: String,
}

impl PropertyCheck {
    fn new(passed: bool, detail: impl Into<String>) -> Self {
        PropertyCheck { passed, detail: detail.into() }
    }
}

/// Pass/fail for each mixing-matrix property plus the spectrum found.
#[derive(Debug, Clone, PartialEq)]
pub struct CertificationReport {
    pub decentralized: PropertyCheck,
    pub symmetric: PropertyCheck,
    pub kernel: PropertyCheck,
    pub spectral: PropertyCheck,
    /// Ascending eigenvalues (of the symmetric part when `w` is not symmetric).
    pub eigenvalues: Vec<f64>,
}

impl CertificationReport {
    pub fn all_passed(&self) -> bool {
        self.decentralized.passed && self.symmetric.passed && self.kernel.passed && self.spectral.passed
    }

    pub fn lambda_min(&self) -> f64 {
        self.eigenvalues.first().copied().unwrap_or(f64::NAN)
    }

    fn failures(&self) -> Vec<&'static str> {
        self.properties()
            .into_iter()
            .filter(|(_, c)| !c.passed)
            .map(|(name, _)| name)
            .collect()
    }

    pub fn properties(&self) -> [(&'static str, &PropertyCheck); 4] {
        [
            ("decentralized", &self.decentralized),
            ("symmetry", &self.symmetric),
            ("kernel", &self.kernel),
            ("spectral", &self.spectral),
        ]
    }
}

impl fmt::Display for CertificationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (name, check) in self.properties() {
            let verdict = if check.passed { "PASS" } else { "FAIL" };
            writeln!(f, "{name:<14} {verdict}  {}", check.detail)?;
        }
        write!(f, "overall        {}", if self.all_passed() { "PASS" } else { "FAIL" })
    }
}

/// Checks `w` against the decentralized, symmetry, kernel and spectral
/// properties relative to `g`.
///
/// The kernel property is tested as "eigenvalue 1 is simple and its
/// eigenvector is parallel to the all-ones vector", which is equivalent to
/// `ker(I - W)` being the consensus subspace for symmetric `W`.
pub fn certify_mixing(w: &Matrix, g: &Graph, tol: f64) -> Result<CertificationReport> {
    let n = g.n();
    if w.nrows() != n || w.ncols() != n {
        return Err(Error::DimensionMismatch {
            context: "mixing matrix vs graph",
            expected: n,
            found: if w.nrows() != n { w.nrows() } else { w.ncols() },
        });
    }

    let offending = (0..n)
        .flat_map(|i| (0..n).map(move |j| (i, j)))
        .find(|&(i, j)| i != j && w[(i, j)] != 0.0 && !g.has_edge(i, j));
    let decentralized = match offending {
        None => PropertyCheck::new(true, "zero outside the edge set"),
        Some((i, j)) => PropertyCheck::new(false, format!("w[{i},{j}] = {} but ({i},{j}) is not an edge", w[(i, j)])),
    };

    let asym = (0..n)
        .flat_map(|i| (0..n).map(move |j| (i, j)))
        .find(|&(i, j)| w[(i, j)] != w[(j, i)]);
    let symmetric = match asym {
        None => PropertyCheck::new(true, "W = W^T"),
        Some((i, j)) => PropertyCheck::new(false, format!("w[{i},{j}] != w[{j},{i}]")),
    };

    let sym = (w + w.transpose()) * 0.5;
    let (values, vectors) = sorted_symmetric_eigen(&sym);

    let near_one: Vec<usize> = (0..n).filter(|&k| (values[k] - 1.0).abs() <= tol).collect();
    let kernel = match near_one.as_slice() {
        [k] => {
            let v = vectors.column(*k);
            let ones_component = v.sum() / (n as f64).sqrt();
            let off = (1.0 - ones_component.abs()).max(0.0);
            if off <= tol {
                PropertyCheck::new(true, "eigenvalue 1 is simple with all-ones eigenvector")
            } else {
                PropertyCheck::new(false, format!("eigenvector of 1 deviates from all-ones by {off:e}"))
            }
        }
        [] => PropertyCheck::new(false, "1 is not an eigenvalue"),
        many => PropertyCheck::new(false, format!("eigenvalue 1 has multiplicity {}", many.len())),
    };

    let (lo, hi) = (values.first().copied().unwrap_or(0.0), values.last().copied().unwrap_or(0.0));
    let spectral = if hi <= 1.0 + tol && lo > -1.0 + tol {
        PropertyCheck::new(true, format!("spectrum in [{lo:.6}, {hi:.6}]"))
    } else {
        PropertyCheck::new(false, format!("spectrum [{lo}, {hi}] not inside (-1, 1]"))
    };

    Ok(CertificationReport { decentralized, symmetric, kernel, spectral, eigenvalues: values })
}

/// A certified mixing matrix with its sparsity pattern cached per row.
#[derive(Debug, Clone, PartialEq)]
pub struct MixingMatrix {
    w: Matrix,
    graph: Graph,
    lambda_min: f64,
    rows: Vec<Vec<(usize, f64)>>,
}

impl MixingMatrix {
    /// Certifies `w` against `g` and wraps it; fails unless every property
    /// holds.
    pub fn certified(w: Matrix, g: &Graph, tol: f64) -> Result<Self> {
        if !g.is_connected() {
            return Err(Error::Disconnected);
        }
        let report = certify_mixing(&w, g, tol)?;
        if !report.all_passed() {
            return Err(Error::Certification(report.failures().join(", ")));
        }
        let rows = (0..g.n())
            .map(|i| (0..g.n()).filter(|&j| w[(i, j)] != 0.0).map(|j| (j, w[(i, j)])).collect())
            .collect();
        Ok(MixingMatrix { lambda_min: report.lambda_min(), w, graph: g.clone(), rows })
    }

    /// `W = I - L / alpha`, valid for `alpha > lambda_max(L) / 2`.
    pub fn from_laplacian(g: &Graph, alpha: f64) -> Result<Self> {
        if !g.is_connected() {
            return Err(Error::Disconnected);
        }
        let lambda_max = g.laplacian().symmetric_eigenvalues().max();
        let bound = 0.5 * lambda_max;
        if !(alpha > bound) {
            return Err(Error::AlphaTooSmall { alpha, bound });
        }
        let w = laplacian_weights(g, alpha);
        match Self::certified(w, g, CERT_TOL) {
            Err(Error::Certification(_)) => Err(Error::AlphaTooSmall { alpha, bound }),
            other => other,
        }
    }

    /// Metropolis–Hastings weights `1 / (1 + max(deg_i, deg_j))` on edges,
    /// diagonal set so rows sum to one.
    pub fn metropolis(g: &Graph) -> Result<Self> {
        if !g.is_connected() {
            return Err(Error::Disconnected);
        }
        Self::certified(metropolis_weights(g), g, CERT_TOL).map_err(|e| match e {
            Error::Certification(msg) => {
                Error::Certification(format!("metropolis weights failed unexpectedly: {msg}"))
            }
            other => other,
        })
    }

    pub fn matrix(&self) -> &Matrix {
        &self.w
    }

    pub fn graph(&self) -> &Graph {
        &self.graph
    }

    pub fn n(&self) -> usize {
        self.graph.n()
    }

    pub fn lambda_min(&self) -> f64 {
        self.lambda_min
    }

    /// Nonzero entries `(j, w_ij)` of row `i`, ascending in `j`.
    pub fn row(&self, i: usize) -> &[(usize, f64)] {
        &self.rows[i]
    }

    /// `sum_j w_ij z_j` over the nonzero pattern of row `i`, restricted to
    /// the columns `cols` of `z`.
    fn mix_columns(
        &self,
        i: usize,
        z: &Matrix,
        cols: std::ops::Range<usize>,
        block: usize,
        on_read: &mut dyn FnMut(NeighborRead),
    ) -> Vector {
        weighted_sum(self.row(i), cols.len(), |j| {
            on_read(NeighborRead { block, reader: i, source: j });
            z.row(j).columns(cols.start, cols.len()).iter().copied().collect::<Vec<f64>>()
        })
    }
}

/// `I - L / alpha`, without any validity check.
pub fn laplacian_weights(g: &Graph, alpha: f64) -> Matrix {
    Matrix::identity(g.n(), g.n()) - g.laplacian() / alpha
}

/// Metropolis–Hastings weights, without any validity check.
pub fn metropolis_weights(g: &Graph) -> Matrix {
    let deg = g.degrees();
    let mut w = Matrix::zeros(g.n(), g.n());
    for (i, j) in g.edges() {
        let weight = 1.0 / (1.0 + deg[i].max(deg[j]) as f64);
        w[(i, j)] = weight;
        w[(j, i)] = weight;
    }
    for i in 0..g.n() {
        let off: f64 = (0..g.n()).filter(|&j| j != i).map(|j| w[(i, j)]).sum();
        w[(i, i)] = 1.0 - off;
    }
    w
}

/// `sum_j w_j * value(j)` accumulated in the order of `entries`.
///
/// Every mixing computation in the crate goes through here so that the
/// stacked and agent-local code paths produce bit-identical sums.
pub fn weighted_sum<V>(entries: &[(usize, f64)], dim: usize, mut value: impl FnMut(usize) -> V) -> Vector
where
    V: AsRef<[f64]>,
{
    let mut acc = Vector::zeros(dim);
    for &(j, wij) in entries {
        let v = value(j);
        for (a, x) in acc.iter_mut().zip(v.as_ref()) {
            *a += wij * x;
        }
    }
    acc
}

/// A read of agent `source`'s row by agent `reader` on communication block
/// `block`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct NeighborRead {
    pub block: usize,
    pub reader: usize,
    pub source: usize,
}

/// Neighbor-only application of a (possibly block-structured) mixing
/// operator to stacked agent rows.
pub trait Mixer: Sync {
    fn agents(&self) -> usize;

    /// Smallest eigenvalue of the whole operator.
    fn lambda_min(&self) -> f64;

    /// Communication graph of each block, indexed by [`NeighborRead::block`].
    fn block_graphs(&self) -> Vec<&Graph>;

    /// Row `i` of `W z`, reporting every row of `z` that is touched.
    fn mix_row(&self, i: usize, z: &Matrix, on_read: &mut dyn FnMut(NeighborRead)) -> Vector;

    /// Full product `W z` without auditing.
    fn mix(&self, z: &Matrix) -> Matrix {
        let rows: Vec<Vector> = (0..self.agents()).map(|i| self.mix_row(i, z, &mut |_| {})).collect();
        Matrix::from_fn(z.nrows(), z.ncols(), |i, c| rows[i][c])
    }
}

impl Mixer for MixingMatrix {
    fn agents(&self) -> usize {
        self.n()
    }

    fn lambda_min(&self) -> f64 {
        self.lambda_min
    }

    fn block_graphs(&self) -> Vec<&Graph> {
        vec![&self.graph]
    }

    fn mix_row(&self, i: usize, z: &Matrix, on_read: &mut dyn FnMut(NeighborRead)) -> Vector {
        self.mix_columns(i, z, 0..z.ncols(), 0, on_read)
    }
}

/// Independent mixing of the `x` columns (first `p`) by `w1` and the `y`
/// columns by `w2`.
#[derive(Debug, Clone, PartialEq)]
pub struct BlockMixing {
    pub w1: MixingMatrix,
    pub w2: MixingMatrix,
    pub p: usize,
}

impl BlockMixing {
    pub fn new(w1: MixingMatrix, w2: MixingMatrix, p: usize) -> Result<Self> {
        if w1.n() != w2.n() {
            return Err(Error::DimensionMismatch { context: "block mixing agents", expected: w1.n(), found: w2.n() });
        }
        Ok(BlockMixing { w1, w2, p })
    }
}

impl Mixer for BlockMixing {
    fn agents(&self) -> usize {
        self.w1.n()
    }

    fn lambda_min(&self) -> f64 {
        self.w1.lambda_min().min(self.w2.lambda_min())
    }

    fn block_graphs(&self) -> Vec<&Graph> {
        vec![self.w1.graph(), self.w2.graph()]
    }

    fn mix_row(&self, i: usize, z: &Matrix, on_read: &mut dyn FnMut(NeighborRead)) -> Vector {
        let x = self.w1.mix_columns(i, z, 0..self.p, 0, on_read);
        let y = self.w2.mix_columns(i, z, self.p..z.ncols(), 1, on_read);
        Vector::from_iterator(z.ncols(), x.iter().chain(y.iter()).copied())
    }
}
