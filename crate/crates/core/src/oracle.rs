//! Dense reference matrices for checking DD results. Never touches package
//! tables; limited to [`ORACLE_MAX_QUBITS`].

use num_complex::Complex64;

use crate::circuit::{Circuit, Gate};
use crate::dd::Edge;
use crate::error::{Error, Result};
use crate::package::Package;

/// 4096×4096 complex entries, about 256 MiB.
pub const ORACLE_MAX_QUBITS: usize = 12;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

fn check_cap(n: usize) -> Result<()> {
    if n > ORACLE_MAX_QUBITS {
        return Err(Error::OracleCap { qubits: n, limit: ORACLE_MAX_QUBITS });
    }
    Ok(())
}

/// Square complex matrix, row-major.
#[derive(Clone, Debug, PartialEq)]
pub struct DenseMatrix {
    dim: usize,
    entries: Vec<Complex64>,
}

impl DenseMatrix {
    pub fn zeros(dim: usize) -> DenseMatrix {
        DenseMatrix { dim, entries: vec![ZERO; dim * dim] }
    }

    pub fn identity(n: usize) -> Result<DenseMatrix> {
        check_cap(n)?;
        let dim = 1 << n;
        let mut m = DenseMatrix::zeros(dim);
        for i in 0..dim {
            m.entries[i * dim + i] = ONE;
        }
        Ok(m)
    }

    /// From row-major entries; `entries.len()` must be a square of a power of two.
    pub fn from_entries(entries: Vec<Complex64>) -> Result<DenseMatrix> {
        let dim = (entries.len() as f64).sqrt().round() as usize;
        if dim * dim != entries.len() || !dim.is_power_of_two() {
            return Err(Error::Dimension(format!("{} entries do not form a 2^n square", entries.len())));
        }
        Ok(DenseMatrix { dim, entries })
    }

    pub fn from_2x2(u: [[Complex64; 2]; 2]) -> DenseMatrix {
        DenseMatrix { dim: 2, entries: vec![u[0][0], u[0][1], u[1][0], u[1][1]] }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn qubits(&self) -> usize {
        self.dim.trailing_zeros() as usize
    }

    pub fn get(&self, row: usize, col: usize) -> Complex64 {
        self.entries[row * self.dim + col]
    }

    pub fn entries(&self) -> &[Complex64] {
        &self.entries
    }

    pub fn column(&self, col: usize) -> Vec<Complex64> {
        (0..self.dim).map(|r| self.get(r, col)).collect()
    }

    /// `self · other`, skipping zero entries of `self`.
    pub fn mul(&self, other: &DenseMatrix) -> Result<DenseMatrix> {
        if self.dim != other.dim {
            return Err(Error::Dimension(format!("{} vs {}", self.dim, other.dim)));
        }
        let d = self.dim;
        let mut out = DenseMatrix::zeros(d);
        for i in 0..d {
            let row = &mut out.entries[i * d..(i + 1) * d];
            for k in 0..d {
                let a = self.entries[i * d + k];
                if a == ZERO {
                    continue;
                }
                for (o, b) in row.iter_mut().zip(&other.entries[k * d..(k + 1) * d]) {
                    *o += a * b;
                }
            }
        }
        Ok(out)
    }

    /// `self ⊗ other`; `self` indexes the high bits.
    pub fn kron(&self, other: &DenseMatrix) -> DenseMatrix {
        let (da, db) = (self.dim, other.dim);
        let d = da * db;
        let mut out = DenseMatrix::zeros(d);
        for ra in 0..da {
            for ca in 0..da {
                let a = self.get(ra, ca);
                if a == ZERO {
                    continue;
                }
                for rb in 0..db {
                    for cb in 0..db {
                        out.entries[(ra * db + rb) * d + ca * db + cb] = a * other.get(rb, cb);
                    }
                }
            }
        }
        out
    }

    pub fn adjoint(&self) -> DenseMatrix {
        let d = self.dim;
        let mut out = DenseMatrix::zeros(d);
        for r in 0..d {
            for c in 0..d {
                out.entries[c * d + r] = self.get(r, c).conj();
            }
        }
        out
    }

    /// Largest entrywise distance and where it occurs.
    pub fn max_deviation(&self, other: &DenseMatrix) -> Result<(f64, (usize, usize))> {
        if self.dim != other.dim {
            return Err(Error::Dimension(format!("{} vs {}", self.dim, other.dim)));
        }
        let mut worst = (0.0, (0, 0));
        for (i, (a, b)) in self.entries.iter().zip(&other.entries).enumerate() {
            let d = (a - b).norm();
            if d > worst.0 || d.is_nan() {
                worst = (d, (i / self.dim, i % self.dim));
            }
        }
        Ok(worst)
    }
}

/// The full `2^n` operator of one gate: Kronecker products with identities
/// for uncontrolled gates, direct block placement for controlled ones.
pub fn gate_matrix(gate: &Gate, n: usize) -> Result<DenseMatrix> {
    check_cap(n)?;
    if gate.target >= n || gate.control.is_some_and(|c| c >= n || c == gate.target) {
        return Err(Error::Contract(format!("gate {gate} does not fit {n} qubits")));
    }
    let u = gate.kind.matrix();
    let t = n - 1 - gate.target;
    match gate.control {
        None => {
            let above = DenseMatrix::identity(gate.target)?;
            let below = DenseMatrix::identity(t)?;
            Ok(above.kron(&DenseMatrix::from_2x2(u)).kron(&below))
        }
        Some(c) => {
            let cb = n - 1 - c;
            let dim = 1usize << n;
            let mut m = DenseMatrix::zeros(dim);
            for col in 0..dim {
                if (col >> cb) & 1 == 0 {
                    m.entries[col * dim + col] = ONE;
                    continue;
                }
                let b_in = (col >> t) & 1;
                for b_out in 0..2 {
                    let row = (col & !(1 << t)) | (b_out << t);
                    m.entries[row * dim + col] = u[b_out][b_in];
                }
            }
            Ok(m)
        }
    }
}

/// `G_k ⋯ G_1` for the circuit's gates, in the convention of
/// [`Package::build_functionality`].
pub fn dense_from_circuit(c: &Circuit) -> Result<DenseMatrix> {
    let n = c.qubits();
    let mut acc = DenseMatrix::identity(n)?;
    for g in c.gates() {
        acc = gate_matrix(g, n)?.mul(&acc)?;
    }
    Ok(acc)
}

/// Outcome of comparing a DD against a dense reference.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Comparison {
    pub max_deviation: f64,
    /// `(row, col)` of the largest deviation; `col` is 0 for vectors.
    pub worst: (usize, usize),
    pub tolerance: f64,
    pub passed: bool,
}

impl Comparison {
    fn new(max_deviation: f64, worst: (usize, usize), tolerance: f64) -> Comparison {
        Comparison {
            max_deviation,
            worst,
            tolerance,
            passed: max_deviation <= tolerance,
        }
    }
}

/// Extracts every entry of the matrix DD `root` and compares with `m`.
pub fn compare(p: &Package, root: Edge, m: &DenseMatrix, tol: f64) -> Result<Comparison> {
    let n = m.qubits();
    check_cap(n)?;
    let dd = DenseMatrix::from_entries(p.to_dense_matrix(root, n)?)?;
    let (dev, worst) = dd.max_deviation(m)?;
    Ok(Comparison::new(dev, worst, tol))
}

/// Compares the vector DD `root` with the amplitudes `v`.
pub fn compare_vector(p: &Package, root: Edge, v: &[Complex64], tol: f64) -> Result<Comparison> {
    if !v.len().is_power_of_two() {
        return Err(Error::Dimension(format!("vector of length {}", v.len())));
    }
    let n = v.len().trailing_zeros() as usize;
    check_cap(n)?;
    let amps = p.to_dense_vector(root, n)?;
    let mut worst = (0.0, (0, 0));
    for (i, (a, b)) in amps.iter().zip(v).enumerate() {
        let d = (a - b).norm();
        if d > worst.0 || d.is_nan() {
            worst = (d, (i, 0));
        }
    }
    Ok(Comparison::new(worst.0, worst.1, tol))
}
