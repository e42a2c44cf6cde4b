//! Faithful 4x4 complex-matrix representation of the spacetime algebra.
//!
//! The basis vectors map onto the standard Dirac matrices in the Dirac
//! representation (block-diagonal `g0`, off-diagonal `g_i` built from the
//! Pauli matrices). The representation serves as an independent oracle
//! for the Clifford kernel, and carries the analytic free-particle spinor
//! evolution used to validate the integrator.
//!
//! The column correspondence: an even spinor `psi` maps to the Dirac
//! column read off the leading column of its representing matrix (the
//! minimal left ideal picked by the idempotent `(1 + g0)/2`). On that
//! column, right multiplication by `g2 g1` acts as the complex unit and
//! left multiplication by an odd element `a` acts as `psi -> a psi g0`.

use std::ops::{Add, Mul, Sub};
use std::sync::LazyLock;

use num_complex::Complex64;

use crate::algebra::{EvenElement, FourVector, Multivector, BLADE_COUNT, EVEN_BLADES, METRIC};

/// Failures of the matrix layer.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum MatrixRepError {
    #[error("momentum is off the mass shell: p.p = {p_sq}, m^2 = {m_sq}")]
    OffMassShell { p_sq: f64, m_sq: f64 },
    #[error("mass must be positive, got {0}")]
    NonPositiveMass(f64),
}

/// Dense 4x4 complex matrix.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Mat4c(pub [[Complex64; 4]; 4]);

const C_ZERO: Complex64 = Complex64::new(0.0, 0.0);
const C_ONE: Complex64 = Complex64::new(1.0, 0.0);
const C_I: Complex64 = Complex64::new(0.0, 1.0);

impl Mat4c {
    pub fn zero() -> Self {
        Mat4c([[C_ZERO; 4]; 4])
    }

    pub fn identity() -> Self {
        let mut m = Self::zero();
        for k in 0..4 {
            m.0[k][k] = C_ONE;
        }
        m
    }

    pub fn scale(&self, s: Complex64) -> Self {
        let mut out = *self;
        for row in out.0.iter_mut() {
            for v in row.iter_mut() {
                *v *= s;
            }
        }
        out
    }

    /// Conjugate transpose.
    pub fn adjoint(&self) -> Self {
        let mut out = Self::zero();
        for r in 0..4 {
            for c in 0..4 {
                out.0[r][c] = self.0[c][r].conj();
            }
        }
        out
    }

    pub fn trace(&self) -> Complex64 {
        (0..4).map(|k| self.0[k][k]).sum()
    }

    pub fn col(&self, j: usize) -> [Complex64; 4] {
        [self.0[0][j], self.0[1][j], self.0[2][j], self.0[3][j]]
    }

    pub fn max_abs_diff(&self, rhs: &Mat4c) -> f64 {
        let mut worst = 0.0_f64;
        for r in 0..4 {
            for c in 0..4 {
                worst = worst.max((self.0[r][c] - rhs.0[r][c]).norm());
            }
        }
        worst
    }

    pub fn mul_col(&self, v: &[Complex64; 4]) -> [Complex64; 4] {
        let mut out = [C_ZERO; 4];
        for r in 0..4 {
            for c in 0..4 {
                out[r] += self.0[r][c] * v[c];
            }
        }
        out
    }
}

impl Add for Mat4c {
    type Output = Mat4c;
    fn add(self, rhs: Mat4c) -> Mat4c {
        let mut out = self;
        for r in 0..4 {
            for c in 0..4 {
                out.0[r][c] += rhs.0[r][c];
            }
        }
        out
    }
}

impl Sub for Mat4c {
    type Output = Mat4c;
    fn sub(self, rhs: Mat4c) -> Mat4c {
        let mut out = self;
        for r in 0..4 {
            for c in 0..4 {
                out.0[r][c] -= rhs.0[r][c];
            }
        }
        out
    }
}

impl Mul for Mat4c {
    type Output = Mat4c;
    fn mul(self, rhs: Mat4c) -> Mat4c {
        let mut out = Mat4c::zero();
        for r in 0..4 {
            for k in 0..4 {
                let a = self.0[r][k];
                if a == C_ZERO {
                    continue;
                }
                for c in 0..4 {
                    out.0[r][c] += a * rhs.0[k][c];
                }
            }
        }
        out
    }
}

fn pauli(i: usize) -> [[Complex64; 2]; 2] {
    match i {
        1 => [[C_ZERO, C_ONE], [C_ONE, C_ZERO]],
        2 => [[C_ZERO, -C_I], [C_I, C_ZERO]],
        3 => [[C_ONE, C_ZERO], [C_ZERO, -C_ONE]],
        _ => panic!("Pauli index out of range: {i}"),
    }
}

/// Dirac matrix for the basis vector `g_mu`: `g0` is `diag(1,1,-1,-1)`,
/// `g_i` has `-sigma_i` and `sigma_i` off-diagonal blocks.
pub fn gamma_matrix(mu: usize) -> Mat4c {
    assert!(mu < 4, "gamma index out of range: {mu}");
    let mut m = Mat4c::zero();
    if mu == 0 {
        m.0[0][0] = C_ONE;
        m.0[1][1] = C_ONE;
        m.0[2][2] = -C_ONE;
        m.0[3][3] = -C_ONE;
    } else {
        let s = pauli(mu);
        for r in 0..2 {
            for c in 0..2 {
                m.0[r][c + 2] = -s[r][c];
                m.0[r + 2][c] = s[r][c];
            }
        }
    }
    m
}

/// Index-raised Dirac matrix `g^mu = eta^{mu mu} g_mu`.
pub fn gamma_matrix_upper(mu: usize) -> Mat4c {
    gamma_matrix(mu).scale(Complex64::new(METRIC[mu], 0.0))
}

/// Representing matrices for all 16 basis blades, factors in increasing
/// index order.
static BLADE_MATS: LazyLock<[Mat4c; BLADE_COUNT]> = LazyLock::new(|| {
    let mut mats = [Mat4c::zero(); BLADE_COUNT];
    for (mask, slot) in mats.iter_mut().enumerate() {
        let mut m = Mat4c::identity();
        for i in 0..4 {
            if mask & (1 << i) != 0 {
                m = m * gamma_matrix(i);
            }
        }
        *slot = m;
    }
    mats
});

/// Linear extension of blade -> matrix product; an algebra homomorphism.
pub fn mv_to_matrix(a: &Multivector) -> Mat4c {
    let mut out = Mat4c::zero();
    for (mask, &c) in a.coeffs.iter().enumerate() {
        if c == 0.0 {
            continue;
        }
        out = out + BLADE_MATS[mask].scale(Complex64::new(c, 0.0));
    }
    out
}

/// Classical Dirac spinor column.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DiracColumn(pub [Complex64; 4]);

impl DiracColumn {
    /// Adjoint row `zbar = z^dagger g0`.
    pub fn bar(&self) -> [Complex64; 4] {
        let g0 = gamma_matrix(0);
        let mut out = [C_ZERO; 4];
        for c in 0..4 {
            for r in 0..4 {
                out[c] += self.0[r].conj() * g0.0[r][c];
            }
        }
        out
    }

    /// Sesquilinear form `zbar M z`.
    pub fn bilinear(&self, m: &Mat4c) -> Complex64 {
        let bar = self.bar();
        let mz = m.mul_col(&self.0);
        (0..4).map(|k| bar[k] * mz[k]).sum()
    }

    /// Lorentz scalar `zbar z`.
    pub fn norm_scalar(&self) -> Complex64 {
        self.bilinear(&Mat4c::identity())
    }

    /// Current components `v^mu = zbar g^mu z`; real up to round-off.
    pub fn vector_current(&self) -> FourVector {
        let mut v = [0.0; 4];
        for (mu, slot) in v.iter_mut().enumerate() {
            let b = self.bilinear(&gamma_matrix_upper(mu));
            debug_assert!(b.im.abs() <= 1e-12 * (1.0 + b.re.abs()));
            *slot = b.re;
        }
        FourVector(v)
    }

    pub fn max_abs_diff(&self, rhs: &DiracColumn) -> f64 {
        (0..4).fold(0.0_f64, |acc, k| acc.max((self.0[k] - rhs.0[k]).norm()))
    }
}

/// Even spinor to Dirac column: the leading column of the representing
/// matrix.
pub fn spinor_to_column(psi: &EvenElement) -> DiracColumn {
    DiracColumn(mv_to_matrix(&psi.mv()).col(0))
}

/// Real 8x8 change of basis from even coefficients to the stacked
/// (re, im) pairs of the leading column, with its inverse.
struct ColumnBasis {
    inverse: [[f64; 8]; 8],
}

static COLUMN_BASIS: LazyLock<ColumnBasis> = LazyLock::new(|| {
    let mut fwd = [[0.0_f64; 8]; 8];
    for (k, &mask) in EVEN_BLADES.iter().enumerate() {
        let col = BLADE_MATS[mask].col(0);
        for r in 0..4 {
            fwd[2 * r][k] = col[r].re;
            fwd[2 * r + 1][k] = col[r].im;
        }
    }
    ColumnBasis {
        inverse: invert8(fwd),
    }
});

/// Gauss-Jordan with partial pivoting; the basis matrix has entries in
/// {-1, 0, 1} and is perfectly conditioned.
fn invert8(mut a: [[f64; 8]; 8]) -> [[f64; 8]; 8] {
    let mut inv = [[0.0_f64; 8]; 8];
    for (k, row) in inv.iter_mut().enumerate() {
        row[k] = 1.0;
    }
    for col in 0..8 {
        let pivot = (col..8)
            .max_by(|&r1, &r2| a[r1][col].abs().total_cmp(&a[r2][col].abs()))
            .unwrap();
        assert!(a[pivot][col].abs() > 1e-12, "column basis is singular");
        a.swap(col, pivot);
        inv.swap(col, pivot);
        let d = a[col][col];
        for c in 0..8 {
            a[col][c] /= d;
            inv[col][c] /= d;
        }
        for r in 0..8 {
            if r == col {
                continue;
            }
            let f = a[r][col];
            if f == 0.0 {
                continue;
            }
            for c in 0..8 {
                a[r][c] -= f * a[col][c];
                inv[r][c] -= f * inv[col][c];
            }
        }
    }
    inv
}

/// Dirac column back to the even spinor; exact inverse of
/// [`spinor_to_column`].
pub fn column_to_spinor(z: &DiracColumn) -> EvenElement {
    let mut rhs = [0.0_f64; 8];
    for r in 0..4 {
        rhs[2 * r] = z.0[r].re;
        rhs[2 * r + 1] = z.0[r].im;
    }
    let inv = &COLUMN_BASIS.inverse;
    let mut coeffs = [0.0_f64; 8];
    for (k, c) in coeffs.iter_mut().enumerate() {
        *c = (0..8).map(|j| inv[k][j] * rhs[j]).sum();
    }
    EvenElement::from_coeffs(coeffs)
}

/// Slash contraction `p_mu g^mu = p^mu g_mu`.
pub fn momentum_slash(p: &FourVector) -> Mat4c {
    let mut out = Mat4c::zero();
    for mu in 0..4 {
        out = out + gamma_matrix(mu).scale(Complex64::new(p.0[mu], 0.0));
    }
    out
}

/// Analytic free evolution of the spinor column:
/// `z(tau) = [cos(m tau) - i slash(p)/m * sin(m tau)] z(0)`,
/// valid on the mass shell `p.p = m^2`.
pub fn analytic_column_evolution(
    z0: &DiracColumn,
    p: &FourVector,
    m: f64,
    tau: f64,
) -> Result<DiracColumn, MatrixRepError> {
    if m <= 0.0 {
        return Err(MatrixRepError::NonPositiveMass(m));
    }
    let p_sq = p.norm_sq();
    let m_sq = m * m;
    if (p_sq - m_sq).abs() > 1e-9 * m_sq {
        return Err(MatrixRepError::OffMassShell { p_sq, m_sq });
    }
    let u = Mat4c::identity().scale(Complex64::new((m * tau).cos(), 0.0))
        - momentum_slash(p).scale(C_I * ((m * tau).sin() / m));
    Ok(DiracColumn(u.mul_col(&z0.0)))
}
