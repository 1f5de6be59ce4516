//! Truncated Fock-space operators on the three-mode product space.
//!
//! The tensor ordering is fixed to `a1 ⊗ a2 ⊗ b` everywhere: the basis state
//! `|n1, n2, nb⟩` sits at flat index `(n1 · N2 + n2) · Nb + nb`.

use num_complex::Complex64 as C64;

use crate::error::{Error, Result};
use crate::sparse::CsrMatrix;

/// Fock cutoffs of the two cavity modes and the mechanical mode. A cutoff
/// `N` keeps the levels `0..N`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct ModeDims {
    n1: usize,
    n2: usize,
    nb: usize,
}

impl ModeDims {
    pub fn new(n1: usize, n2: usize, nb: usize) -> Result<Self> {
        for (name, n) in [("n1", n1), ("n2", n2), ("nb", nb)] {
            if n < 2 {
                return Err(Error::dims(format!("cutoff {name} = {n} must be at least 2")));
            }
        }
        Ok(Self { n1, n2, nb })
    }

    pub fn n1(&self) -> usize {
        self.n1
    }

    pub fn n2(&self) -> usize {
        self.n2
    }

    pub fn nb(&self) -> usize {
        self.nb
    }

    pub fn cutoff(&self, mode: Mode) -> usize {
        match mode {
            Mode::A1 => self.n1,
            Mode::A2 => self.n2,
            Mode::B => self.nb,
        }
    }

    /// Total Hilbert-space dimension `n1 · n2 · nb`.
    pub fn total(&self) -> usize {
        self.n1 * self.n2 * self.nb
    }

    pub fn index(&self, n1: usize, n2: usize, nb: usize) -> usize {
        debug_assert!(n1 < self.n1 && n2 < self.n2 && nb < self.nb);
        (n1 * self.n2 + n2) * self.nb + nb
    }

    /// Inverse of [`ModeDims::index`].
    pub fn occupations(&self, index: usize) -> (usize, usize, usize) {
        let nb = index % self.nb;
        let rest = index / self.nb;
        (rest / self.n2, rest % self.n2, nb)
    }

    /// Every cutoff doubled.
    pub fn doubled(&self) -> Self {
        Self {
            n1: 2 * self.n1,
            n2: 2 * self.n2,
            nb: 2 * self.nb,
        }
    }
}

impl std::fmt::Display for ModeDims {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}x{}x{}", self.n1, self.n2, self.nb)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Mode {
    A1,
    A2,
    B,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Ladder {
    Lower,
    Raise,
}

/// Single-mode ladder matrix on `n` levels: `⟨k−1|a|k⟩ = √k`.
pub fn ladder(n: usize, kind: Ladder) -> Result<CsrMatrix> {
    if n < 2 {
        return Err(Error::dims(format!("ladder cutoff {n} must be at least 2")));
    }
    let lower = CsrMatrix::from_triplets(
        n,
        n,
        (1..n).map(|k| (k - 1, k, C64::new((k as f64).sqrt(), 0.0))).collect(),
    );
    Ok(match kind {
        Ladder::Lower => lower,
        Ladder::Raise => lower.adjoint(),
    })
}

/// Single-mode number operator `diag(0, 1, …, n−1)`.
pub fn number(n: usize) -> Result<CsrMatrix> {
    if n < 2 {
        return Err(Error::dims(format!("number-operator cutoff {n} must be at least 2")));
    }
    let diag: Vec<C64> = (0..n).map(|k| C64::new(k as f64, 0.0)).collect();
    Ok(CsrMatrix::from_diagonal(&diag))
}

/// Sparse operator on the full three-mode space.
#[derive(Debug, Clone, PartialEq)]
pub struct QOperator {
    dims: ModeDims,
    data: CsrMatrix,
    hermitian: bool,
}

/// Tolerance for accepting a Hermitian flag.
pub const HERMITIAN_TOL: f64 = 1e-12;

impl QOperator {
    pub fn from_matrix(dims: ModeDims, data: CsrMatrix) -> Result<Self> {
        let d = dims.total();
        if data.shape() != (d, d) {
            return Err(Error::dims(format!(
                "matrix shape {:?} does not match {dims} (D = {d})",
                data.shape()
            )));
        }
        Ok(Self {
            dims,
            data,
            hermitian: false,
        })
    }

    pub fn identity(dims: ModeDims) -> Self {
        Self {
            dims,
            data: CsrMatrix::identity(dims.total()),
            hermitian: true,
        }
    }

    pub fn zero(dims: ModeDims) -> Self {
        let d = dims.total();
        Self {
            dims,
            data: CsrMatrix::zeros(d, d),
            hermitian: true,
        }
    }

    pub fn dims(&self) -> ModeDims {
        self.dims
    }

    pub fn matrix(&self) -> &CsrMatrix {
        &self.data
    }

    pub fn into_matrix(self) -> CsrMatrix {
        self.data
    }

    /// The propagated hint. Use [`QOperator::hermiticity_error`] for the check.
    pub fn is_flagged_hermitian(&self) -> bool {
        self.hermitian
    }

    pub fn get(&self, row: usize, col: usize) -> C64 {
        self.data.get(row, col)
    }

    /// `⟨bra| A |ket⟩` for basis states given as occupation triples.
    pub fn element(&self, bra: (usize, usize, usize), ket: (usize, usize, usize)) -> C64 {
        let i = self.dims.index(bra.0, bra.1, bra.2);
        let j = self.dims.index(ket.0, ket.1, ket.2);
        self.data.get(i, j)
    }

    /// `‖A − A†‖_max`.
    pub fn hermiticity_error(&self) -> f64 {
        self.data.sub(&self.data.adjoint()).max_abs()
    }

    /// Sets the Hermitian flag after checking it holds to [`HERMITIAN_TOL`].
    pub fn verified_hermitian(mut self) -> Result<Self> {
        let err = self.hermiticity_error();
        if err >= HERMITIAN_TOL {
            return Err(Error::InvalidParameter {
                field: "operator",
                reason: format!("not Hermitian: ‖A − A†‖_max = {err:e}"),
            });
        }
        self.hermitian = true;
        Ok(self)
    }

    fn check_dims(&self, other: &Self) -> Result<()> {
        if self.dims != other.dims {
            return Err(Error::dims(format!(
                "operand dims {} and {} differ",
                self.dims, other.dims
            )));
        }
        Ok(())
    }

    pub fn adjoint(&self) -> Self {
        Self {
            dims: self.dims,
            data: self.data.adjoint(),
            hermitian: self.hermitian,
        }
    }

    pub fn product(&self, rhs: &Self) -> Result<Self> {
        self.check_dims(rhs)?;
        Ok(Self {
            dims: self.dims,
            data: self.data.matmul(&rhs.data),
            hermitian: false,
        })
    }

    pub fn sum(&self, rhs: &Self) -> Result<Self> {
        self.check_dims(rhs)?;
        Ok(Self {
            dims: self.dims,
            data: self.data.add(&rhs.data),
            hermitian: self.hermitian && rhs.hermitian,
        })
    }

    pub fn difference(&self, rhs: &Self) -> Result<Self> {
        self.sum(&rhs.scale(C64::new(-1.0, 0.0)))
    }

    pub fn scale(&self, s: C64) -> Self {
        Self {
            dims: self.dims,
            data: self.data.scale(s),
            hermitian: self.hermitian && s.im == 0.0,
        }
    }

    pub fn scale_real(&self, s: f64) -> Self {
        self.scale(C64::new(s, 0.0))
    }

    /// `[A, B] = AB − BA`.
    pub fn commutator(&self, rhs: &Self) -> Result<Self> {
        self.product(rhs)?.difference(&rhs.product(self)?)
    }
}

/// `I ⊗ … ⊗ op ⊗ … ⊗ I` with `op` placed on `mode`.
pub fn embed_mode(op: &CsrMatrix, mode: Mode, dims: ModeDims) -> Result<QOperator> {
    let n = dims.cutoff(mode);
    if op.shape() != (n, n) {
        return Err(Error::dims(format!(
            "single-mode operator of shape {:?} does not match cutoff {n} of {mode:?}",
            op.shape()
        )));
    }
    let id = |n| CsrMatrix::identity(n);
    let data = match mode {
        Mode::A1 => op.kron(&id(dims.n2)).kron(&id(dims.nb)),
        Mode::A2 => id(dims.n1).kron(op).kron(&id(dims.nb)),
        Mode::B => id(dims.n1).kron(&id(dims.n2)).kron(op),
    };
    QOperator::from_matrix(dims, data)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Combiner {
    /// Left-to-right product of all operands.
    Product,
    Sum,
    /// Adjoint of the single operand.
    Adjoint,
    /// The single operand times a complex scalar.
    ScalarMultiple(C64),
}

/// Combines operators. All operands must share the same dims.
pub fn compose(ops: &[QOperator], combiner: Combiner) -> Result<QOperator> {
    let (first, rest) = ops
        .split_first()
        .ok_or_else(|| Error::dims("compose needs at least one operand"))?;
    for op in rest {
        first.check_dims(op)?;
    }
    match combiner {
        Combiner::Product => rest.iter().try_fold(first.clone(), |acc, op| acc.product(op)),
        Combiner::Sum => rest.iter().try_fold(first.clone(), |acc, op| acc.sum(op)),
        Combiner::Adjoint | Combiner::ScalarMultiple(_) if !rest.is_empty() => Err(Error::dims(
            format!("{combiner:?} takes one operand, got {}", ops.len()),
        )),
        Combiner::Adjoint => Ok(first.adjoint()),
        Combiner::ScalarMultiple(s) => Ok(first.scale(s)),
    }
}

/// The ladder and number operators of all three modes on one space.
#[derive(Debug, Clone)]
pub struct ModeOperators {
    pub dims: ModeDims,
    pub a1: QOperator,
    pub a2: QOperator,
    pub b: QOperator,
    pub n1: QOperator,
    pub n2: QOperator,
    pub nb: QOperator,
}

impl ModeOperators {
    pub fn new(dims: ModeDims) -> Result<Self> {
        let lower = |mode| embed_mode(&ladder(dims.cutoff(mode), Ladder::Lower)?, mode, dims);
        let num = |mode| {
            embed_mode(&number(dims.cutoff(mode))?, mode, dims)?.verified_hermitian()
        };
        Ok(Self {
            dims,
            a1: lower(Mode::A1)?,
            a2: lower(Mode::A2)?,
            b: lower(Mode::B)?,
            n1: num(Mode::A1)?,
            n2: num(Mode::A2)?,
            nb: num(Mode::B)?,
        })
    }

    pub fn lowering(&self, mode: Mode) -> &QOperator {
        match mode {
            Mode::A1 => &self.a1,
            Mode::A2 => &self.a2,
            Mode::B => &self.b,
        }
    }

    pub fn number(&self, mode: Mode) -> &QOperator {
        match mode {
            Mode::A1 => &self.n1,
            Mode::A2 => &self.n2,
            Mode::B => &self.nb,
        }
    }
}
