//! Liouvillian superoperator, direct steady-state solve, and steady-state
//! observables.
//!
//! Density matrices are vectorised column by column: `ρ[i, j]` lives at
//! `i + D·j`, so `vec(AρB) = (Bᵀ ⊗ A) vec(ρ)`.

use std::sync::OnceLock;

use faer::linalg::solvers::Solve;
use faer::sparse::{SparseColMat, Triplet};
use faer::{Mat, Side};
use num_complex::Complex64 as C64;

use crate::error::{Error, Result};
use crate::fock::{ModeDims, QOperator};
use crate::model::CollapseOp;
use crate::sparse::CsrMatrix;

/// Maximum `‖L(ρ_ss)‖_max` accepted from the steady-state solve.
pub const RESIDUAL_TOL: f64 = 1e-10;
pub const HERMITICITY_TOL: f64 = 1e-10;
pub const TRACE_TOL: f64 = 1e-10;
/// Smallest eigenvalue tolerated as round-off.
pub const POSITIVITY_TOL: f64 = -1e-8;
/// Mean photon numbers at or below this are treated as zero.
pub const PHOTON_FLOOR: f64 = 1e-30;

const ZERO: C64 = C64 { re: 0.0, im: 0.0 };
const ONE: C64 = C64 { re: 1.0, im: 0.0 };

/// The generator `ρ ↦ −i[H, ρ] + Σ r (LρL† − ½{L†L, ρ})` as a sparse
/// `D² × D²` matrix.
#[derive(Debug)]
pub struct Liouvillian {
    dims: ModeDims,
    matrix: CsrMatrix,
    blocks: OnceLock<Blocks>,
}

/// Connected components of the Liouvillian's sparsity graph. The generator
/// never couples two different components, so each can be handled alone.
#[derive(Debug)]
struct Blocks {
    label: Vec<usize>,
    count: usize,
}

impl Clone for Liouvillian {
    fn clone(&self) -> Self {
        Self {
            dims: self.dims,
            matrix: self.matrix.clone(),
            blocks: OnceLock::new(),
        }
    }
}

pub fn build_liouvillian(h: &QOperator, collapse: &[CollapseOp]) -> Result<Liouvillian> {
    let dims = h.dims();
    let d = dims.total();
    let mut heff = h.clone();
    for c in collapse {
        if c.operator.dims() != dims {
            return Err(Error::InvalidDimension(format!(
                "collapse operator on {} but Hamiltonian on {dims}",
                c.operator.dims()
            )));
        }
        let ldl = c.operator.adjoint().product(&c.operator)?;
        heff = heff.sum(&ldl.scale(C64::new(0.0, -0.5 * c.rate)))?;
    }
    let id = CsrMatrix::identity(d);
    let heff = heff.matrix();
    let mut t = Vec::new();
    // −i H_eff ρ + i ρ H_eff†
    id.kron_into(heff, C64::new(0.0, -1.0), &mut t);
    heff.conj().kron_into(&id, C64::new(0.0, 1.0), &mut t);
    // r L ρ L†
    for c in collapse {
        let l = c.operator.matrix();
        l.conj().kron_into(l, C64::new(c.rate, 0.0), &mut t);
    }
    Ok(Liouvillian {
        dims,
        matrix: CsrMatrix::from_triplets(d * d, d * d, t),
        blocks: OnceLock::new(),
    })
}

impl Liouvillian {
    pub fn dims(&self) -> ModeDims {
        self.dims
    }

    pub fn matrix(&self) -> &CsrMatrix {
        &self.matrix
    }

    /// `L(ρ)` as a dense matrix.
    pub fn apply(&self, rho: &Mat<C64>) -> Result<Mat<C64>> {
        let d = self.dims.total();
        if rho.nrows() != d || rho.ncols() != d {
            return Err(Error::InvalidDimension(format!(
                "operand is {}x{}, Liouvillian acts on {d}x{d}",
                rho.nrows(),
                rho.ncols()
            )));
        }
        Ok(unvec(&self.matrix.mul_vec(&vec_of(rho)), d))
    }

    /// `‖L(ρ)‖_max`.
    pub fn residual(&self, rho: &DensityMatrix) -> Result<f64> {
        let out = self.matrix.mul_vec(&rho.to_vec());
        Ok(out.iter().map(|v| v.norm()).fold(0.0, f64::max))
    }

    /// Largest entry of `vec(I)ᵀ L`, which vanishes for a trace-preserving
    /// generator.
    pub fn trace_defect(&self) -> f64 {
        let d = self.dims.total();
        let mut col_sums = vec![ZERO; d * d];
        for i in 0..d {
            let (cols, vals) = self.matrix.row(i + d * i);
            for (&c, &v) in cols.iter().zip(vals) {
                col_sums[c] += v;
            }
        }
        col_sums.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }

    fn blocks(&self) -> &Blocks {
        self.blocks.get_or_init(|| {
            let n = self.matrix.nrows();
            let mut parent: Vec<usize> = (0..n).collect();
            fn find(parent: &mut [usize], mut x: usize) -> usize {
                while parent[x] != x {
                    parent[x] = parent[parent[x]];
                    x = parent[x];
                }
                x
            }
            for (i, j, _) in self.matrix.iter() {
                let (ri, rj) = (find(&mut parent, i), find(&mut parent, j));
                if ri != rj {
                    parent[ri.max(rj)] = ri.min(rj);
                }
            }
            let mut label = vec![usize::MAX; n];
            let mut count = 0;
            for i in 0..n {
                let r = find(&mut parent, i);
                if label[r] == usize::MAX {
                    label[r] = count;
                    count += 1;
                }
                label[i] = label[r];
            }
            Blocks { label, count }
        })
    }

    /// Number of decoupled blocks of the generator.
    pub fn block_count(&self) -> usize {
        self.blocks().count
    }

    /// The generator restricted to every block that touches `seeds`.
    pub fn restrict(&self, seeds: impl IntoIterator<Item = usize>) -> Restriction {
        let blocks = self.blocks();
        let mut keep = vec![false; blocks.count];
        for s in seeds {
            keep[blocks.label[s]] = true;
        }
        let indices: Vec<usize> = (0..self.matrix.nrows())
            .filter(|&i| keep[blocks.label[i]])
            .collect();
        let matrix = self.matrix.select(&indices, &indices);
        Restriction { indices, matrix }
    }
}

/// A closed subset of vectorised indices and the generator acting on it.
#[derive(Debug, Clone)]
pub struct Restriction {
    pub indices: Vec<usize>,
    pub matrix: CsrMatrix,
}

impl Restriction {
    pub fn gather(&self, full: &[C64]) -> Vec<C64> {
        self.indices.iter().map(|&i| full[i]).collect()
    }

    pub fn scatter(&self, part: &[C64], len: usize) -> Vec<C64> {
        let mut out = vec![ZERO; len];
        for (&i, &v) in self.indices.iter().zip(part) {
            out[i] = v;
        }
        out
    }
}

/// Hermitian, unit-trace, positive state on the full three-mode space.
#[derive(Debug, Clone)]
pub struct DensityMatrix {
    dims: ModeDims,
    data: Mat<C64>,
}

/// Measured deviations from the density-matrix invariants.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Invariants {
    /// `‖ρ − ρ†‖_max`
    pub hermiticity: f64,
    /// `|Tr ρ − 1|`
    pub trace_error: f64,
    pub min_eigenvalue: f64,
}

impl Invariants {
    pub fn is_physical(&self) -> bool {
        self.hermiticity < HERMITICITY_TOL
            && self.trace_error < TRACE_TOL
            && self.min_eigenvalue >= POSITIVITY_TOL
    }
}

impl DensityMatrix {
    /// Wraps a matrix after a shape check. Physicality is not enforced here;
    /// see [`DensityMatrix::invariants`].
    pub fn from_matrix(dims: ModeDims, data: Mat<C64>) -> Result<Self> {
        let d = dims.total();
        if data.nrows() != d || data.ncols() != d {
            return Err(Error::InvalidDimension(format!(
                "density matrix is {}x{}, expected {d}x{d}",
                data.nrows(),
                data.ncols()
            )));
        }
        Ok(Self { dims, data })
    }

    pub fn from_vec(dims: ModeDims, v: &[C64]) -> Result<Self> {
        let d = dims.total();
        if v.len() != d * d {
            return Err(Error::InvalidDimension(format!(
                "vector of length {} cannot hold a {d}x{d} matrix",
                v.len()
            )));
        }
        Ok(Self {
            dims,
            data: unvec(v, d),
        })
    }

    pub fn basis_state(dims: ModeDims, n1: usize, n2: usize, nb: usize) -> Self {
        let d = dims.total();
        let mut data = Mat::<C64>::zeros(d, d);
        let i = dims.index(n1, n2, nb);
        data[(i, i)] = ONE;
        Self { dims, data }
    }

    pub fn vacuum(dims: ModeDims) -> Self {
        Self::basis_state(dims, 0, 0, 0)
    }

    /// `|ψ⟩⟨ψ|` for a normalised or unnormalised state vector.
    pub fn from_pure_state(dims: ModeDims, psi: &[C64]) -> Result<Self> {
        let d = dims.total();
        if psi.len() != d {
            return Err(Error::InvalidDimension(format!(
                "state vector has length {}, expected {d}",
                psi.len()
            )));
        }
        let norm: f64 = psi.iter().map(|c| c.norm_sqr()).sum();
        let data = Mat::from_fn(d, d, |i, j| psi[i] * psi[j].conj() / norm);
        Ok(Self { dims, data })
    }

    /// `ρ1 ⊗ ρ2 ⊗ ρb` from single-mode matrices sized to the cutoffs.
    pub fn product(dims: ModeDims, a1: &Mat<C64>, a2: &Mat<C64>, b: &Mat<C64>) -> Result<Self> {
        for (m, n) in [(a1, dims.n1()), (a2, dims.n2()), (b, dims.nb())] {
            if m.nrows() != n || m.ncols() != n {
                return Err(Error::InvalidDimension(format!(
                    "single-mode factor is {}x{}, cutoff is {n}",
                    m.nrows(),
                    m.ncols()
                )));
            }
        }
        let d = dims.total();
        let data = Mat::from_fn(d, d, |i, j| {
            let (p1, p2, pb) = dims.occupations(i);
            let (q1, q2, qb) = dims.occupations(j);
            a1[(p1, q1)] * a2[(p2, q2)] * b[(pb, qb)]
        });
        Ok(Self { dims, data })
    }

    pub fn dims(&self) -> ModeDims {
        self.dims
    }

    pub fn data(&self) -> &Mat<C64> {
        &self.data
    }

    pub fn to_vec(&self) -> Vec<C64> {
        vec_of(&self.data)
    }

    pub fn trace(&self) -> C64 {
        (0..self.data.nrows()).map(|i| self.data[(i, i)]).sum()
    }

    pub fn population(&self, n1: usize, n2: usize, nb: usize) -> f64 {
        let i = self.dims.index(n1, n2, nb);
        self.data[(i, i)].re
    }

    pub fn hermiticity_error(&self) -> f64 {
        let d = self.data.nrows();
        let mut worst: f64 = 0.0;
        for j in 0..d {
            for i in 0..=j {
                worst = worst.max((self.data[(i, j)] - self.data[(j, i)].conj()).norm());
            }
        }
        worst
    }

    pub fn min_eigenvalue(&self) -> f64 {
        hermitian_eigenvalues(&self.hermitized_data())
            .into_iter()
            .fold(f64::INFINITY, f64::min)
    }

    pub fn invariants(&self) -> Invariants {
        Invariants {
            hermiticity: self.hermiticity_error(),
            trace_error: (self.trace() - ONE).norm(),
            min_eigenvalue: self.min_eigenvalue(),
        }
    }

    fn hermitized_data(&self) -> Mat<C64> {
        let d = self.data.nrows();
        Mat::from_fn(d, d, |i, j| (self.data[(i, j)] + self.data[(j, i)].conj()) * 0.5)
    }

    /// `(ρ + ρ†)/2` rescaled to unit trace.
    pub fn hermitized_normalized(&self) -> Self {
        let mut data = self.hermitized_data();
        let tr = (0..data.nrows()).map(|i| data[(i, i)].re).sum::<f64>();
        let d = data.nrows();
        for j in 0..d {
            for i in 0..d {
                data[(i, j)] /= tr;
            }
        }
        Self { dims: self.dims, data }
    }

    /// Reduced state of one mode.
    pub fn reduced(&self, mode: crate::fock::Mode) -> Mat<C64> {
        let n = self.dims.cutoff(mode);
        let d = self.dims.total();
        let pick = |(a, b, c): (usize, usize, usize)| match mode {
            crate::fock::Mode::A1 => (a, (b, c)),
            crate::fock::Mode::A2 => (b, (a, c)),
            crate::fock::Mode::B => (c, (a, b)),
        };
        let mut out = Mat::<C64>::zeros(n, n);
        for j in 0..d {
            let (kj, rest_j) = pick(self.dims.occupations(j));
            for i in 0..d {
                let (ki, rest_i) = pick(self.dims.occupations(i));
                if rest_i == rest_j {
                    out[(ki, kj)] += self.data[(i, j)];
                }
            }
        }
        out
    }

    /// `½ Σ |λ_k(ρ − σ)|`.
    pub fn trace_distance(&self, other: &Self) -> Result<f64> {
        if self.dims != other.dims {
            return Err(Error::InvalidDimension(format!(
                "states on {} and {}",
                self.dims, other.dims
            )));
        }
        let d = self.dims.total();
        let diff = Mat::from_fn(d, d, |i, j| {
            let a = self.data[(i, j)] - other.data[(i, j)];
            let b = (self.data[(j, i)] - other.data[(j, i)]).conj();
            (a + b) * 0.5
        });
        Ok(0.5 * hermitian_eigenvalues(&diff).iter().map(|l| l.abs()).sum::<f64>())
    }
}

fn hermitian_eigenvalues(m: &Mat<C64>) -> Vec<f64> {
    m.self_adjoint_eigenvalues(Side::Lower)
        .expect("Hermitian eigensolver converges")
}

fn vec_of(m: &Mat<C64>) -> Vec<C64> {
    let d = m.nrows();
    let mut v = Vec::with_capacity(d * m.ncols());
    for j in 0..m.ncols() {
        for i in 0..d {
            v.push(m[(i, j)]);
        }
    }
    v
}

fn unvec(v: &[C64], d: usize) -> Mat<C64> {
    Mat::from_fn(d, d, |i, j| v[i + d * j])
}

/// Unique stationary state of `L`, found by a direct sparse LU solve on the
/// block holding the density-matrix diagonal, with one equation replaced by
/// `Tr ρ = 1`.
pub fn steady_state(l: &Liouvillian) -> Result<DensityMatrix> {
    let dims = l.dims;
    let d = dims.total();
    let blocks = l.blocks();
    let diag_label = blocks.label[0];
    if let Some(i) = (1..d).find(|&i| blocks.label[i + d * i] != diag_label) {
        return Err(Error::NoUniqueSteadyState(format!(
            "populations of basis states 0 and {i} evolve in decoupled blocks"
        )));
    }
    let block = l.restrict([0]);
    let n = block.indices.len();
    // Positions of the diagonal entries inside the block; vacuum is first.
    let diag_pos: Vec<usize> = block
        .indices
        .iter()
        .enumerate()
        .filter(|&(_, &k)| k % d == k / d)
        .map(|(p, _)| p)
        .collect();
    let pinned = diag_pos[0];

    let mut t: Vec<(usize, usize, C64)> = block
        .matrix
        .iter()
        .filter(|&(r, _, _)| r != pinned)
        .collect();
    t.extend(diag_pos.iter().map(|&p| (pinned, p, ONE)));
    let system = CsrMatrix::from_triplets(n, n, t);

    let faer_triplets: Vec<Triplet<usize, usize, C64>> = system
        .iter()
        .map(|(row, col, val)| Triplet { row, col, val })
        .collect();
    let sparse = SparseColMat::<usize, C64>::try_new_from_triplets(n, n, &faer_triplets)
        .map_err(|e| Error::NoUniqueSteadyState(format!("sparse assembly failed: {e:?}")))?;
    let lu = sparse
        .sp_lu()
        .map_err(|e| Error::NoUniqueSteadyState(format!("LU factorisation failed: {e:?}")))?;

    let mut rhs = vec![ZERO; n];
    rhs[pinned] = ONE;
    let mut x = lu_solve(&lu, &rhs);
    // Two rounds of iterative refinement.
    for _ in 0..2 {
        let ax = system.mul_vec(&x);
        let r: Vec<C64> = rhs.iter().zip(&ax).map(|(b, a)| b - a).collect();
        let dx = lu_solve(&lu, &r);
        x.iter_mut().zip(&dx).for_each(|(xi, di)| *xi += di);
    }
    if x.iter().any(|v| !v.re.is_finite() || !v.im.is_finite()) {
        return Err(Error::NoUniqueSteadyState(
            "singular stationary system".to_string(),
        ));
    }

    let rho = DensityMatrix::from_vec(dims, &block.scatter(&x, d * d))?.hermitized_normalized();
    let residual = l.residual(&rho)?;
    if !(residual < RESIDUAL_TOL) {
        return Err(Error::NoUniqueSteadyState(format!(
            "residual ‖L(ρ)‖ = {residual:e} exceeds {RESIDUAL_TOL:e}"
        )));
    }
    Ok(rho)
}

fn lu_solve(lu: &faer::sparse::linalg::solvers::Lu<usize, C64>, rhs: &[C64]) -> Vec<C64> {
    let mut b = Mat::from_fn(rhs.len(), 1, |i, _| rhs[i]);
    lu.solve_in_place(b.as_mut());
    (0..rhs.len()).map(|i| b[(i, 0)]).collect()
}

/// `Tr[Aρ]`.
pub fn expectation(a: &QOperator, rho: &DensityMatrix) -> Result<C64> {
    if a.dims() != rho.dims {
        return Err(Error::InvalidDimension(format!(
            "operator on {} but state on {}",
            a.dims(),
            rho.dims
        )));
    }
    Ok(a.matrix().iter().map(|(i, j, v)| v * rho.data[(j, i)]).sum())
}

/// `⟨a1†a1⟩` and `⟨a1†a1†a1a1⟩`, read off the diagonal in the Fock basis.
pub fn photon_moments(rho: &DensityMatrix) -> (f64, f64) {
    let dims = rho.dims;
    (0..dims.total()).fold((0.0, 0.0), |(n, nn), i| {
        let k = dims.occupations(i).0 as f64;
        let p = rho.data[(i, i)].re;
        (n + k * p, nn + k * (k - 1.0) * p)
    })
}

/// Mean occupations `(⟨n1⟩, ⟨n2⟩, ⟨nb⟩)`.
pub fn occupations(rho: &DensityMatrix) -> (f64, f64, f64) {
    let dims = rho.dims;
    (0..dims.total()).fold((0.0, 0.0, 0.0), |acc, i| {
        let (a, b, c) = dims.occupations(i);
        let p = rho.data[(i, i)].re;
        (acc.0 + a as f64 * p, acc.1 + b as f64 * p, acc.2 + c as f64 * p)
    })
}

/// Equal-time second-order correlation of mode a1,
/// `⟨a1†a1†a1a1⟩ / ⟨a1†a1⟩²`.
pub fn g2_zero(rho: &DensityMatrix) -> Result<f64> {
    let (n, nn) = photon_moments(rho);
    if !(n > PHOTON_FLOOR) {
        return Err(Error::UndefinedCorrelation(n));
    }
    Ok((nn / (n * n)).max(0.0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fock::{Mode, ModeOperators};
    use crate::model::{build_collapse_ops, build_hamiltonian, SystemParams};
    use crate::states;

    fn dims(n1: usize, n2: usize, nb: usize) -> ModeDims {
        ModeDims::new(n1, n2, nb).unwrap()
    }

    fn liouvillian(p: &SystemParams) -> Liouvillian {
        build_liouvillian(&build_hamiltonian(p).unwrap(), &build_collapse_ops(p).unwrap()).unwrap()
    }

    #[test]
    fn single_mode_decay() {
        // a1 with two levels, other modes idle.
        let d = dims(2, 2, 2);
        let ops = ModeOperators::new(d).unwrap();
        let kappa = 0.7;
        let l = build_liouvillian(
            &QOperator::zero(d),
            &[CollapseOp::new(ops.a1.clone(), kappa).unwrap()],
        )
        .unwrap();
        let rho = DensityMatrix::basis_state(d, 1, 0, 0);
        let out = l.apply(rho.data()).unwrap();
        let (g, e) = (d.index(0, 0, 0), d.index(1, 0, 0));
        assert!((out[(g, g)] - C64::new(kappa, 0.0)).norm() < 1e-15);
        assert!((out[(e, e)] - C64::new(-kappa, 0.0)).norm() < 1e-15);
        let others: f64 = (0..8)
            .flat_map(|i| (0..8).map(move |j| (i, j)))
            .filter(|&ij| ij != (g, g) && ij != (e, e))
            .map(|(i, j)| out[(i, j)].norm())
            .sum();
        assert_eq!(others, 0.0);
    }

    #[test]
    fn trace_is_preserved() {
        let p = SystemParams {
            n_th: 0.3,
            gamma_p: 0.02,
            dims: dims(3, 3, 3),
            ..SystemParams::default()
        };
        assert!(liouvillian(&p).trace_defect() < 1e-10);
    }

    #[test]
    fn hermiticity_is_preserved() {
        let p = SystemParams {
            n_th: 0.3,
            dims: dims(3, 2, 3),
            drive: 0.3,
            ..SystemParams::default()
        };
        let l = liouvillian(&p);
        let d = p.dims.total();
        let psi: Vec<C64> = (0..d).map(|k| C64::new(k as f64 * 0.1, 0.3 - k as f64 * 0.05)).collect();
        let rho = DensityMatrix::from_pure_state(p.dims, &psi).unwrap();
        let out = DensityMatrix::from_matrix(p.dims, l.apply(rho.data()).unwrap()).unwrap();
        assert!(out.hermiticity_error() < 1e-14);
    }

    #[test]
    fn undriven_decays_to_vacuum() {
        let p = SystemParams {
            drive: 0.0,
            dims: dims(3, 3, 3),
            ..SystemParams::default()
        };
        let rho = steady_state(&liouvillian(&p)).unwrap();
        assert!((rho.population(0, 0, 0) - 1.0).abs() < 1e-12);
        assert!(matches!(g2_zero(&rho), Err(Error::UndefinedCorrelation(_))));
    }

    #[test]
    fn isolated_mechanics_has_no_unique_state() {
        let p = SystemParams {
            gamma: 0.0,
            coupling: 0.0,
            dims: dims(2, 2, 2),
            ..SystemParams::default()
        };
        assert!(matches!(
            steady_state(&liouvillian(&p)),
            Err(Error::NoUniqueSteadyState(_))
        ));
    }

    #[test]
    fn linear_cavity_photon_number() {
        let p = SystemParams {
            kerr: 0.0,
            coupling: 0.0,
            delta: 0.3,
            drive: 0.01,
            ..SystemParams::default()
        };
        let rho = steady_state(&liouvillian(&p)).unwrap();
        let expected = p.drive.powi(2) / (p.delta.powi(2) + 0.25);
        let (n, _) = photon_moments(&rho);
        assert!((n / expected - 1.0).abs() < 1e-3);
    }

    #[test]
    fn thermal_mechanics_detailed_balance() {
        let p = SystemParams {
            drive: 0.0,
            coupling: 0.0,
            n_th: 0.5,
            gamma: 0.1,
            dims: dims(2, 2, 24),
            ..SystemParams::default()
        };
        let rho = steady_state(&liouvillian(&p)).unwrap();
        let (_, _, nb) = occupations(&rho);
        assert!((nb - 0.5).abs() < 1e-6, "{nb}");
        let marginal = rho.reduced(Mode::B);
        let r = 0.5 / 1.5;
        for k in 1..6 {
            let ratio = marginal[(k, k)].re / marginal[(k - 1, k - 1)].re;
            assert!((ratio - r).abs() < 1e-9);
        }
    }

    #[test]
    fn expectation_basics() {
        let d = dims(3, 2, 4);
        let ops = ModeOperators::new(d).unwrap();
        let vac = DensityMatrix::vacuum(d);
        assert_eq!(expectation(&QOperator::identity(d), &vac).unwrap(), ONE);
        assert_eq!(expectation(&ops.n1, &vac).unwrap(), ZERO);
        let thermal = DensityMatrix::product(
            dims(3, 2, 40),
            &states::fock(3, 0),
            &states::fock(2, 0),
            &states::thermal(40, 0.5),
        )
        .unwrap();
        let nb = ModeOperators::new(thermal.dims()).unwrap().nb;
        let v = expectation(&nb, &thermal).unwrap();
        assert!((v.re - 0.5).abs() < 1e-6 && v.im.abs() < 1e-10);
        assert!(expectation(&nb, &vac).is_err());
    }

    #[test]
    fn g2_reference_states() {
        let n = 24;
        let other = states::fock(2, 0);
        let coherent = DensityMatrix::product(
            dims(n, 2, 2),
            &states::coherent(n, C64::new(0.4, 0.2)),
            &other,
            &other,
        )
        .unwrap();
        assert!((g2_zero(&coherent).unwrap() - 1.0).abs() < 1e-8);

        let single = DensityMatrix::basis_state(dims(3, 2, 2), 1, 0, 0);
        assert_eq!(g2_zero(&single).unwrap(), 0.0);

        let chaotic =
            DensityMatrix::product(dims(60, 2, 2), &states::thermal(60, 0.3), &other, &other)
                .unwrap();
        assert!((g2_zero(&chaotic).unwrap() - 2.0).abs() < 1e-8);
    }

    #[test]
    fn restriction_recovers_full_action() {
        let p = SystemParams {
            dims: dims(3, 3, 3),
            ..SystemParams::default()
        };
        let l = liouvillian(&p);
        assert!(l.block_count() > 1);
        let block = l.restrict([0]);
        let rho = steady_state(&l).unwrap();
        let full = l.matrix().mul_vec(&rho.to_vec());
        let part = block.matrix.mul_vec(&block.gather(&rho.to_vec()));
        let back = block.scatter(&part, full.len());
        for (a, b) in full.iter().zip(&back) {
            assert!((a - b).norm() < 1e-15);
        }
    }

    #[test]
    fn trace_distance_of_orthogonal_states() {
        let d = dims(2, 2, 2);
        let a = DensityMatrix::basis_state(d, 0, 0, 0);
        let b = DensityMatrix::basis_state(d, 1, 0, 0);
        assert!((a.trace_distance(&b).unwrap() - 1.0).abs() < 1e-14);
        assert!(a.trace_distance(&a).unwrap() < 1e-15);
    }
}
