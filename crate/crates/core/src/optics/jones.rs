//! 2×2 Jones matrices acting on the (H, V) amplitudes of a single path.
//!
//! Wave-plate conventions used throughout the crate:
//!
//! ```text
//! HWP(θ) = [[cos 2θ,  sin 2θ],
//!           [sin 2θ, -cos 2θ]]
//! QWP(θ) = R(θ) · diag(1, i) · R(-θ),   R(θ) = [[cos θ, -sin θ], [sin θ, cos θ]]
//! ```

use std::ops::Mul;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Maximum tolerated ‖U†U − I‖_max for a matrix to count as unitary.
pub const UNITARY_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct JonesMatrix {
    m: [[Complex64; 2]; 2],
}

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

impl JonesMatrix {
    /// Builds a matrix, rejecting anything that is not unitary to [`UNITARY_TOL`].
    pub fn new(m: [[Complex64; 2]; 2]) -> Result<Self> {
        let j = Self { m };
        let defect = j.unitarity_defect();
        if defect <= UNITARY_TOL {
            Ok(j)
        } else {
            Err(Error::InvalidElement(format!(
                "Jones matrix is not unitary (defect {defect:.3e})"
            )))
        }
    }

    pub(crate) fn from_raw(m: [[Complex64; 2]; 2]) -> Self {
        Self { m }
    }

    pub fn identity() -> Self {
        Self::from_raw([[ONE, ZERO], [ZERO, ONE]])
    }

    /// Real rotation of the polarization plane by `theta`.
    pub fn rotation(theta: f64) -> Self {
        let (s, c) = theta.sin_cos();
        Self::from_raw([
            [Complex64::new(c, 0.0), Complex64::new(-s, 0.0)],
            [Complex64::new(s, 0.0), Complex64::new(c, 0.0)],
        ])
    }

    /// Half-wave plate with its fast axis at `theta` from H.
    pub fn half_wave_plate(theta: f64) -> Self {
        let (s, c) = (2.0 * theta).sin_cos();
        Self::from_raw([
            [Complex64::new(c, 0.0), Complex64::new(s, 0.0)],
            [Complex64::new(s, 0.0), Complex64::new(-c, 0.0)],
        ])
    }

    /// Quarter-wave plate with its fast axis at `theta` from H.
    pub fn quarter_wave_plate(theta: f64) -> Self {
        let retarder = Self::from_raw([[ONE, ZERO], [ZERO, Complex64::i()]]);
        Self::rotation(theta) * retarder * Self::rotation(-theta)
    }

    pub fn entry(&self, row: usize, col: usize) -> Complex64 {
        self.m[row][col]
    }

    pub fn adjoint(&self) -> Self {
        let m = &self.m;
        Self::from_raw([[m[0][0].conj(), m[1][0].conj()], [m[0][1].conj(), m[1][1].conj()]])
    }

    /// ‖U†U − I‖_max.
    pub fn unitarity_defect(&self) -> f64 {
        let p = self.adjoint() * *self;
        let mut worst: f64 = 0.0;
        for r in 0..2 {
            for c in 0..2 {
                let target = if r == c { ONE } else { ZERO };
                worst = worst.max((p.m[r][c] - target).norm());
            }
        }
        worst
    }

    pub fn apply(&self, h: Complex64, v: Complex64) -> (Complex64, Complex64) {
        (self.m[0][0] * h + self.m[0][1] * v, self.m[1][0] * h + self.m[1][1] * v)
    }

    /// Largest element-wise distance after removing the best global phase.
    pub fn distance_up_to_phase(&self, other: &Self) -> f64 {
        // Align phases on the largest entry of `other`.
        let (mut br, mut bc) = (0, 0);
        for r in 0..2 {
            for c in 0..2 {
                if other.m[r][c].norm() > other.m[br][bc].norm() {
                    br = r;
                    bc = c;
                }
            }
        }
        let a = self.m[br][bc];
        let b = other.m[br][bc];
        let phase = if a.norm() > 0.0 && b.norm() > 0.0 {
            (b / a) / (b / a).norm()
        } else {
            ONE
        };
        let mut worst: f64 = 0.0;
        for r in 0..2 {
            for c in 0..2 {
                worst = worst.max((self.m[r][c] * phase - other.m[r][c]).norm());
            }
        }
        worst
    }
}

impl Mul for JonesMatrix {
    type Output = JonesMatrix;

    fn mul(self, rhs: JonesMatrix) -> JonesMatrix {
        let a = &self.m;
        let b = &rhs.m;
        let mut out = [[ZERO; 2]; 2];
        for (r, row) in out.iter_mut().enumerate() {
            for (c, cell) in row.iter_mut().enumerate() {
                *cell = a[r][0] * b[0][c] + a[r][1] * b[1][c];
            }
        }
        JonesMatrix::from_raw(out)
    }
}
