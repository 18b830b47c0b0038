//! Normalized Pauli (Hilbert–Schmidt) basis and Pauli-transfer-matrix builders.
//!
//! Basis element `k` of an `n`-qubit system is the Pauli string whose base-4
//! digits (most significant = qubit 0) select I, X, Y, Z, divided by `sqrt(d)`.

use nalgebra::DMatrix;
use num_complex::Complex64 as C64;

pub type CMatrix = DMatrix<C64>;

fn single_pauli(k: usize) -> CMatrix {
    let z = C64::new(0.0, 0.0);
    let o = C64::new(1.0, 0.0);
    let i = C64::new(0.0, 1.0);
    match k {
        0 => CMatrix::from_row_slice(2, 2, &[o, z, z, o]),
        1 => CMatrix::from_row_slice(2, 2, &[z, o, o, z]),
        2 => CMatrix::from_row_slice(2, 2, &[z, -i, i, z]),
        3 => CMatrix::from_row_slice(2, 2, &[o, z, z, -o]),
        _ => unreachable!("pauli index"),
    }
}

pub fn kron(a: &CMatrix, b: &CMatrix) -> CMatrix {
    a.kronecker(b)
}

/// Number of qubits for a superoperator dimension `d²` (must be a power of 4).
pub fn qubits_for_superop_dim(dim: usize) -> Option<usize> {
    let mut n = 0;
    let mut v = 1;
    while v < dim {
        v *= 4;
        n += 1;
    }
    (v == dim).then_some(n)
}

/// Unnormalized Pauli string for basis index `k` on `n` qubits.
pub fn pauli_string(n: usize, k: usize) -> CMatrix {
    let mut out = CMatrix::from_element(1, 1, C64::new(1.0, 0.0));
    for q in 0..n {
        let digit = (k / 4usize.pow((n - 1 - q) as u32)) % 4;
        out = kron(&out, &single_pauli(digit));
    }
    out
}

pub fn pauli_label(n: usize, k: usize) -> String {
    (0..n)
        .map(|q| ['I', 'X', 'Y', 'Z'][(k / 4usize.pow((n - 1 - q) as u32)) % 4])
        .collect()
}

/// All unnormalized Pauli strings on `n` qubits, in basis order.
pub fn pauli_strings(n: usize) -> Vec<CMatrix> {
    (0..4usize.pow(n as u32)).map(|k| pauli_string(n, k)).collect()
}

/// Coordinates of an operator in the normalized Pauli basis (real part).
pub fn operator_to_vec(op: &CMatrix, paulis: &[CMatrix]) -> Vec<f64> {
    let d = op.nrows() as f64;
    paulis.iter().map(|p| (p * op).trace().re / d.sqrt()).collect()
}

/// Pauli transfer matrix of the superoperator `ρ ↦ f(ρ)`.
pub fn ptm_of_map(n: usize, f: impl Fn(&CMatrix) -> CMatrix) -> DMatrix<f64> {
    let paulis = pauli_strings(n);
    let d = 2usize.pow(n as u32) as f64;
    let dim = paulis.len();
    let mut out = DMatrix::zeros(dim, dim);
    for (b, pb) in paulis.iter().enumerate() {
        let image = f(pb);
        for (a, pa) in paulis.iter().enumerate() {
            out[(a, b)] = (pa * &image).trace().re / d;
        }
    }
    out
}

/// PTM of unitary conjugation `ρ ↦ U ρ U†`.
pub fn unitary_ptm(u: &CMatrix) -> DMatrix<f64> {
    let n = qubits_for_superop_dim(u.nrows() * u.nrows()).expect("qubit unitary");
    let ud = u.adjoint();
    ptm_of_map(n, |p| u * p * &ud)
}

/// PTM of the elementary Hamiltonian generator `ρ ↦ -i[P, ρ]` for Pauli string `k`.
///
/// `exp(h * H_k)` is the PTM of `exp(-i h P_k)`.
pub fn hamiltonian_generator(n: usize, k: usize) -> DMatrix<f64> {
    let p = pauli_string(n, k);
    let mi = C64::new(0.0, -1.0);
    ptm_of_map(n, |rho| (&p * rho - rho * &p) * mi)
}

/// `exp(-i θ/2 σ)` for a single-qubit Pauli index.
pub fn rotation(k: usize, theta: f64) -> CMatrix {
    let (c, s) = ((theta / 2.0).cos(), (theta / 2.0).sin());
    let id = single_pauli(0);
    let p = single_pauli(k);
    id * C64::new(c, 0.0) + p * C64::new(0.0, -s)
}

pub fn identity(d: usize) -> CMatrix {
    CMatrix::identity(d, d)
}

fn pauli_digit(n: usize, k: usize, q: usize) -> usize {
    (k / 4usize.pow((n - 1 - q) as u32)) % 4
}

/// Qubits a PTM acts on non-trivially. A qubit is idle when the PTM factors as
/// (rest) ⊗ identity on it, up to `tol` absolute.
pub fn qubit_support(ptm: &DMatrix<f64>, tol: f64) -> Vec<usize> {
    let Some(n) = qubits_for_superop_dim(ptm.nrows()) else {
        return Vec::new();
    };
    let dim = ptm.nrows();
    (0..n)
        .filter(|&q| {
            let stride = 4usize.pow((n - 1 - q) as u32);
            let idle = (0..dim).all(|i| {
                (0..dim).all(|j| {
                    let (di, dj) = (pauli_digit(n, i, q), pauli_digit(n, j, q));
                    if di != dj {
                        ptm[(i, j)].abs() <= tol
                    } else {
                        (ptm[(i, j)] - ptm[(i - di * stride, j - dj * stride)]).abs() <= tol
                    }
                })
            });
            !idle
        })
        .collect()
}

/// Normalized-Pauli coordinates of the projector onto computational basis state `idx`.
pub fn basis_projector_vec(n: usize, idx: usize) -> Vec<f64> {
    let d = 2usize.pow(n as u32);
    let mut proj = CMatrix::zeros(d, d);
    proj[(idx, idx)] = C64::new(1.0, 0.0);
    operator_to_vec(&proj, &pauli_strings(n))
}
