//! Time evolution under a Liouvillian and the delayed intensity
//! correlation g²(τ) via the quantum regression theorem.

use num_complex::Complex64 as C64;

use crate::error::{Error, Result};
use crate::liouville::{photon_moments, DensityMatrix, Liouvillian, Restriction, PHOTON_FLOOR};
use crate::ode::{self, Tolerances};

pub const DEFAULT_TAU_MAX: f64 = 20.0;
pub const DEFAULT_TAU_POINTS: usize = 200;

/// `n` evenly spaced points on `[0, tau_max]`.
pub fn uniform_grid(tau_max: f64, n: usize) -> Result<Vec<f64>> {
    if !(tau_max.is_finite() && tau_max > 0.0) {
        return Err(Error::InvalidParameter {
            field: "tau_max",
            reason: format!("{tau_max} must be positive"),
        });
    }
    if n < 2 {
        return Err(Error::InvalidParameter {
            field: "tau_points",
            reason: format!("{n} points cannot span an interval"),
        });
    }
    Ok((0..n).map(|k| tau_max * k as f64 / (n - 1) as f64).collect())
}

pub fn default_tau_grid() -> Vec<f64> {
    uniform_grid(DEFAULT_TAU_MAX, DEFAULT_TAU_POINTS).expect("default grid is valid")
}

#[derive(Debug, Clone, PartialEq)]
pub struct CorrelationSeries {
    pub tau_grid: Vec<f64>,
    pub values: Vec<f64>,
    /// Largest `Tr ρ_c(τ) / ⟨n1⟩` seen along the propagation.
    pub max_weight_ratio: f64,
}

impl CorrelationSeries {
    /// The conditional weight never exceeded its initial value beyond 10⁻⁶.
    pub fn weight_bound_holds(&self) -> bool {
        self.max_weight_ratio <= 1.0 + 1e-6
    }
}

/// The generator restricted to the blocks that the nonzero entries of `v`
/// touch.
fn restrict_to_support(l: &Liouvillian, v: &[C64]) -> Restriction {
    l.restrict(v.iter().enumerate().filter(|(_, c)| **c != C64::default()).map(|(i, _)| i))
}

fn check_dims(l: &Liouvillian, rho: &DensityMatrix) -> Result<()> {
    if l.dims() != rho.dims() {
        return Err(Error::InvalidDimension(format!(
            "state on {} but Liouvillian on {}",
            rho.dims(),
            l.dims()
        )));
    }
    Ok(())
}

/// `ρ(t)` for each time in the non-decreasing list `times`.
pub fn evolve_grid(l: &Liouvillian, rho0: &DensityMatrix, times: &[f64]) -> Result<Vec<DensityMatrix>> {
    check_dims(l, rho0)?;
    let full = rho0.to_vec();
    let block = restrict_to_support(l, &full);
    let len = full.len();
    let mut out = Vec::with_capacity(times.len());
    let mut failure = None;
    ode::integrate(
        |y, dy| block.matrix.mul_vec_into(y, dy),
        &block.gather(&full),
        times,
        Tolerances::default(),
        |_, y| match DensityMatrix::from_vec(rho0.dims(), &block.scatter(y, len)) {
            Ok(r) => out.push(r),
            Err(e) => failure = Some(e),
        },
    )?;
    match failure {
        Some(e) => Err(e),
        None => Ok(out),
    }
}

/// `ρ(t)` from `ρ̇ = L(ρ)`, `ρ(0) = rho0`.
pub fn evolve(l: &Liouvillian, rho0: &DensityMatrix, t: f64) -> Result<DensityMatrix> {
    if t == 0.0 {
        check_dims(l, rho0)?;
        return Ok(rho0.clone());
    }
    Ok(evolve_grid(l, rho0, &[t])?.remove(0))
}

/// `g²(τ) = Tr[n1 ρ_c(τ)] / ⟨n1⟩²` with `ρ_c(0) = a1 ρ_ss a1†` evolved
/// under `L`. The conditional operator is propagated divided by the
/// constant `⟨n1⟩`, which leaves the evolution unchanged since it is
/// linear, and is never renormalised along the way.
pub fn g2_tau(l: &Liouvillian, rho_ss: &DensityMatrix, tau_grid: &[f64]) -> Result<CorrelationSeries> {
    check_dims(l, rho_ss)?;
    if tau_grid.first() != Some(&0.0) {
        return Err(Error::InvalidParameter {
            field: "tau_grid",
            reason: "must start at 0".into(),
        });
    }
    if tau_grid.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::InvalidParameter {
            field: "tau_grid",
            reason: "must be strictly increasing".into(),
        });
    }
    let (mean, _) = photon_moments(rho_ss);
    if !(mean > PHOTON_FLOOR) {
        return Err(Error::UndefinedCorrelation(mean));
    }

    let dims = rho_ss.dims();
    let d = dims.total();
    let rho = rho_ss.data();
    // (a1 ρ a1†)[i, j] = √(n1_i + 1)(n1_j + 1) ρ[i + s, j + s] where s
    // raises n1 by one.
    let stride = dims.n2() * dims.nb();
    let mut cond = vec![C64::default(); d * d];
    for j in 0..d {
        let nj = dims.occupations(j).0;
        if nj + 1 >= dims.n1() {
            continue;
        }
        for i in 0..d {
            let ni = dims.occupations(i).0;
            if ni + 1 >= dims.n1() {
                continue;
            }
            let w = (((ni + 1) * (nj + 1)) as f64).sqrt();
            cond[i + d * j] = rho[(i + stride, j + stride)] * (w / mean);
        }
    }

    let block = restrict_to_support(l, &cond);
    // Where the diagonal entries sit inside the block, with their n1.
    let diag: Vec<(usize, f64)> = block
        .indices
        .iter()
        .enumerate()
        .filter(|(_, &k)| k % d == k / d)
        .map(|(p, &k)| (p, dims.occupations(k % d).0 as f64))
        .collect();

    let mut values = vec![0.0; tau_grid.len()];
    let mut max_weight = 0.0_f64;
    ode::integrate(
        |y, dy| block.matrix.mul_vec_into(y, dy),
        &block.gather(&cond),
        tau_grid,
        Tolerances::default(),
        |k, y| {
            let (num, tr) = diag
                .iter()
                .fold((0.0, 0.0), |(n, t), &(p, n1)| (n + n1 * y[p].re, t + y[p].re));
            values[k] = (num / mean).max(0.0);
            max_weight = max_weight.max(tr);
        },
    )?;
    Ok(CorrelationSeries {
        tau_grid: tau_grid.to_vec(),
        values,
        max_weight_ratio: max_weight,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fock::{ModeDims, ModeOperators, QOperator};
    use crate::liouville::{build_liouvillian, g2_zero, steady_state};
    use crate::model::{build_collapse_ops, build_hamiltonian, CollapseOp, SystemParams};

    fn liouvillian(p: &SystemParams) -> Liouvillian {
        build_liouvillian(&build_hamiltonian(p).unwrap(), &build_collapse_ops(p).unwrap()).unwrap()
    }

    #[test]
    fn grids() {
        let g = default_tau_grid();
        assert_eq!(g.len(), 200);
        assert_eq!(g[0], 0.0);
        assert_eq!(*g.last().unwrap(), 20.0);
        assert!(uniform_grid(1.0, 1).is_err());
        assert!(uniform_grid(-1.0, 5).is_err());
    }

    #[test]
    fn zero_time_is_identity() {
        let p = SystemParams {
            dims: ModeDims::new(2, 2, 2).unwrap(),
            ..SystemParams::default()
        };
        let rho = DensityMatrix::basis_state(p.dims, 1, 0, 1);
        let out = evolve(&liouvillian(&p), &rho, 0.0).unwrap();
        assert_eq!(out.data(), rho.data());
    }

    #[test]
    fn cavity_population_decays_exponentially() {
        let dims = ModeDims::new(2, 2, 2).unwrap();
        let ops = ModeOperators::new(dims).unwrap();
        let kappa = 1.0;
        let l = build_liouvillian(&QOperator::zero(dims), &[CollapseOp::new(ops.a1, kappa).unwrap()]).unwrap();
        let rho0 = DensityMatrix::basis_state(dims, 1, 0, 0);
        let times = [0.5, 1.0, 2.5, 7.0];
        let states = evolve_grid(&l, &rho0, &times).unwrap();
        for (t, r) in times.iter().zip(states) {
            assert!((r.population(1, 0, 0) - (-kappa * t).exp()).abs() < 1e-6);
        }
    }

    #[test]
    fn correlation_at_zero_delay_matches_steady_state() {
        let p = SystemParams {
            dims: ModeDims::new(3, 3, 3).unwrap(),
            ..SystemParams::default()
        };
        let l = liouvillian(&p);
        let ss = steady_state(&l).unwrap();
        let s = g2_tau(&l, &ss, &uniform_grid(2.0, 5).unwrap()).unwrap();
        let g0 = g2_zero(&ss).unwrap();
        assert!((s.values[0] / g0 - 1.0).abs() < 1e-6);
        assert!(s.weight_bound_holds());
    }

    #[test]
    fn rejects_bad_grids() {
        let p = SystemParams {
            dims: ModeDims::new(2, 2, 2).unwrap(),
            ..SystemParams::default()
        };
        let l = liouvillian(&p);
        let ss = steady_state(&l).unwrap();
        assert!(g2_tau(&l, &ss, &[0.5, 1.0]).is_err());
        assert!(g2_tau(&l, &ss, &[0.0, 1.0, 1.0]).is_err());
    }
}
