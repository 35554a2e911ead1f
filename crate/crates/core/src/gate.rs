//! One- and two-qubit gates as explicit unitaries.
//!
//! Local index convention for a two-qubit matrix acting on `targets = [a, b]`:
//! bit 0 of the row/column index is qubit `a`, bit 1 is qubit `b`.

use std::f64::consts::FRAC_1_SQRT_2;

use crate::error::{Error, Result};
use crate::C64;

pub type Mat2 = [[C64; 2]; 2];
pub type Mat4 = [[C64; 4]; 4];

/// Tolerance on `‖U U† − I‖_max` for a matrix to count as unitary.
pub const UNITARITY_TOL: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum GateLabel {
    Hadamard,
    Phase,
    Cnot,
    /// Element of the enumerated two-qubit Clifford table.
    Clifford(u16),
    /// A two-qubit gate dressed with coherent noise.
    Noisy,
    Custom,
}

#[derive(Clone, Debug, PartialEq)]
pub enum GateOp {
    One {
        target: usize,
        matrix: Mat2,
        label: GateLabel,
    },
    Two {
        targets: [usize; 2],
        matrix: Mat4,
        label: GateLabel,
    },
}

const ZERO: C64 = C64::new(0.0, 0.0);
const ONE: C64 = C64::new(1.0, 0.0);

impl GateOp {
    pub fn one(target: usize, matrix: Mat2, label: GateLabel) -> Result<Self> {
        check_unitary(&to_vec2(&matrix), 2)?;
        Ok(GateOp::One {
            target,
            matrix,
            label,
        })
    }

    pub fn two(targets: [usize; 2], matrix: Mat4, label: GateLabel) -> Result<Self> {
        if targets[0] == targets[1] {
            return Err(Error::Index(format!(
                "two-qubit gate targets must be distinct, got {targets:?}"
            )));
        }
        check_unitary(&to_vec4(&matrix), 4)?;
        Ok(GateOp::Two {
            targets,
            matrix,
            label,
        })
    }

    pub fn hadamard(target: usize) -> Self {
        let h = C64::new(FRAC_1_SQRT_2, 0.0);
        GateOp::One {
            target,
            matrix: [[h, h], [h, -h]],
            label: GateLabel::Hadamard,
        }
    }

    pub fn phase(target: usize) -> Self {
        GateOp::One {
            target,
            matrix: [[ONE, ZERO], [ZERO, C64::i()]],
            label: GateLabel::Phase,
        }
    }

    /// CNOT with the given control and target.
    pub fn cnot(control: usize, target: usize) -> Self {
        // bit 0 = control, bit 1 = target: swap |01> (index 1) and |11> (index 3)
        let mut m = [[ZERO; 4]; 4];
        m[0][0] = ONE;
        m[2][2] = ONE;
        m[3][1] = ONE;
        m[1][3] = ONE;
        GateOp::Two {
            targets: [control, target],
            matrix: m,
            label: GateLabel::Cnot,
        }
    }

    pub fn targets(&self) -> &[usize] {
        match self {
            GateOp::One { target, .. } => std::slice::from_ref(target),
            GateOp::Two { targets, .. } => targets,
        }
    }

    pub fn label(&self) -> GateLabel {
        match self {
            GateOp::One { label, .. } | GateOp::Two { label, .. } => *label,
        }
    }

    /// Same matrix, new targets.
    pub fn retarget(self, new_targets: &[usize]) -> Result<Self> {
        match (self, new_targets) {
            (GateOp::One { matrix, label, .. }, &[t]) => Ok(GateOp::One {
                target: t,
                matrix,
                label,
            }),
            (GateOp::Two { matrix, label, .. }, &[a, b]) if a != b => Ok(GateOp::Two {
                targets: [a, b],
                matrix,
                label,
            }),
            (_, t) => Err(Error::Index(format!("cannot retarget gate onto {t:?}"))),
        }
    }

    /// The gate as a 4×4 matrix on its own two-qubit support, lifting
    /// one-qubit gates as `U ⊗ I` (acting on local bit 0).
    pub fn as_two_qubit(&self) -> Mat4 {
        match self {
            GateOp::Two { matrix, .. } => *matrix,
            GateOp::One { matrix, .. } => kron_lo(matrix),
        }
    }

    /// Dense matrix, row-major, of dimension 2 or 4.
    pub fn dense(&self) -> Vec<Vec<C64>> {
        match self {
            GateOp::One { matrix, .. } => to_vec2(matrix),
            GateOp::Two { matrix, .. } => to_vec4(matrix),
        }
    }
}

/// `U` acting on local bit 0 of a two-qubit space.
pub fn kron_lo(u: &Mat2) -> Mat4 {
    let mut m = [[ZERO; 4]; 4];
    for hi in 0..2 {
        for r in 0..2 {
            for c in 0..2 {
                m[hi * 2 + r][hi * 2 + c] = u[r][c];
            }
        }
    }
    m
}

/// `U` acting on local bit 1 of a two-qubit space.
pub fn kron_hi(u: &Mat2) -> Mat4 {
    let mut m = [[ZERO; 4]; 4];
    for lo in 0..2 {
        for r in 0..2 {
            for c in 0..2 {
                m[r * 2 + lo][c * 2 + lo] = u[r][c];
            }
        }
    }
    m
}

pub fn mat4_mul(a: &Mat4, b: &Mat4) -> Mat4 {
    let mut out = [[ZERO; 4]; 4];
    for i in 0..4 {
        for k in 0..4 {
            let aik = a[i][k];
            if aik == ZERO {
                continue;
            }
            for j in 0..4 {
                out[i][j] += aik * b[k][j];
            }
        }
    }
    out
}

pub fn mat4_adjoint(a: &Mat4) -> Mat4 {
    let mut out = [[ZERO; 4]; 4];
    for i in 0..4 {
        for j in 0..4 {
            out[i][j] = a[j][i].conj();
        }
    }
    out
}

pub fn mat4_identity() -> Mat4 {
    let mut m = [[ZERO; 4]; 4];
    for (i, row) in m.iter_mut().enumerate() {
        row[i] = ONE;
    }
    m
}

/// Largest entry-wise deviation `max |a_ij − b_ij|`.
pub fn mat4_distance(a: &Mat4, b: &Mat4) -> f64 {
    let mut d: f64 = 0.0;
    for i in 0..4 {
        for j in 0..4 {
            d = d.max((a[i][j] - b[i][j]).norm());
        }
    }
    d
}

fn to_vec2(m: &Mat2) -> Vec<Vec<C64>> {
    m.iter().map(|r| r.to_vec()).collect()
}

fn to_vec4(m: &Mat4) -> Vec<Vec<C64>> {
    m.iter().map(|r| r.to_vec()).collect()
}

/// Maximum entry of `|U U† − I|`.
pub fn unitarity_defect(m: &[Vec<C64>]) -> f64 {
    let dim = m.len();
    let mut worst: f64 = 0.0;
    for i in 0..dim {
        for j in 0..dim {
            let mut acc = ZERO;
            for k in 0..dim {
                acc += m[i][k] * m[j][k].conj();
            }
            if i == j {
                acc -= ONE;
            }
            worst = worst.max(acc.norm());
        }
    }
    worst
}

fn check_unitary(m: &[Vec<C64>], dim: usize) -> Result<()> {
    debug_assert_eq!(m.len(), dim);
    let defect = unitarity_defect(m);
    if defect > UNITARITY_TOL {
        return Err(Error::Validation(format!(
            "gate matrix is not unitary (max |UU† − I| = {defect:.3e})"
        )));
    }
    Ok(())
}
