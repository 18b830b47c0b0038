//! Bundled target gate sets and fiducial lists.
//!
//! XYI: idle plus π/2 X and Y rotations on one qubit, `|0⟩` prep, computational
//! measurement. XYCPHASE: π/2 X and Y rotations on each of two qubits plus a
//! controlled-Z, `|00⟩` prep, computational measurement.

use std::f64::consts::FRAC_PI_2;

use nalgebra::DVector;

use crate::basis::{basis_projector_vec, identity, kron, rotation, unitary_ptm, CMatrix};
use crate::model::{Circuit, GateSet};
use num_complex::Complex64 as C64;

/// Zero out round-off so bundled targets are exact where they should be.
fn chop(m: nalgebra::DMatrix<f64>) -> nalgebra::DMatrix<f64> {
    m.map(|x| if x.abs() < 1e-14 { 0.0 } else { x })
}

fn spam(n: usize) -> (DVector<f64>, Vec<DVector<f64>>) {
    let d = 2usize.pow(n as u32);
    let prep = DVector::from_vec(basis_projector_vec(n, 0));
    let effects = (0..d).map(|i| DVector::from_vec(basis_projector_vec(n, i))).collect();
    (prep, effects)
}

/// The single-qubit XYI target (`Gi`, `Gx`, `Gy`).
pub fn xyi() -> GateSet {
    let (prep, effects) = spam(1);
    let gates = vec![
        ("Gi".to_string(), chop(unitary_ptm(&identity(2)))),
        ("Gx".to_string(), chop(unitary_ptm(&rotation(1, FRAC_PI_2)))),
        ("Gy".to_string(), chop(unitary_ptm(&rotation(2, FRAC_PI_2)))),
    ];
    GateSet::new(gates, prep, effects).expect("valid XYI target")
}

fn cphase() -> CMatrix {
    let mut u = CMatrix::identity(4, 4);
    u[(3, 3)] = C64::new(-1.0, 0.0);
    u
}

/// The two-qubit XYCPHASE target (`Gxi`, `Gyi`, `Gix`, `Giy`, `Gcphase`).
///
/// In `Gxi` the X rotation acts on qubit 0, the left tensor factor.
pub fn xycphase() -> GateSet {
    let (prep, effects) = spam(2);
    let id = identity(2);
    let x = rotation(1, FRAC_PI_2);
    let y = rotation(2, FRAC_PI_2);
    let gates = vec![
        ("Gxi".to_string(), chop(unitary_ptm(&kron(&x, &id)))),
        ("Gyi".to_string(), chop(unitary_ptm(&kron(&y, &id)))),
        ("Gix".to_string(), chop(unitary_ptm(&kron(&id, &x)))),
        ("Giy".to_string(), chop(unitary_ptm(&kron(&id, &y)))),
        ("Gcphase".to_string(), chop(unitary_ptm(&cphase()))),
    ];
    GateSet::new(gates, prep, effects).expect("valid XYCPHASE target")
}

fn circuits(list: &[&[&str]]) -> Vec<Circuit> {
    list.iter().map(|c| Circuit::new(c.iter().copied())).collect()
}

/// `{∅, Gx, Gy, GxGx, GxGxGx, GyGyGy}`, used for both prep and measurement.
pub fn xyi_fiducials() -> Vec<Circuit> {
    circuits(&[&[], &["Gx"], &["Gy"], &["Gx", "Gx"], &["Gx", "Gx", "Gx"], &["Gy", "Gy", "Gy"]])
}

/// Products of `{∅, X, Y, XX}` on each qubit (16 fiducials).
pub fn xycphase_fiducials() -> Vec<Circuit> {
    let q0 = [vec![], vec!["Gxi"], vec!["Gyi"], vec!["Gxi", "Gxi"]];
    let q1 = [vec![], vec!["Gix"], vec!["Giy"], vec!["Gix", "Gix"]];
    let mut out = Vec::new();
    for a in &q0 {
        for b in &q1 {
            out.push(Circuit::new(a.iter().chain(b.iter()).copied()));
        }
    }
    out
}

/// The bare germ set: one germ per gate.
pub fn bare_germs(gs: &GateSet) -> Vec<Circuit> {
    gs.labels().iter().map(|l| Circuit::new([l.as_str()])).collect()
}
