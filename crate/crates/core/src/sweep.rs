//! Order-preserving map over independent parameter points, data-parallel
//! when the `parallel` feature is on.

use crate::error::Result;
use crate::liouville::{build_liouvillian, g2_zero, occupations, steady_state};
use crate::model::{build_collapse_ops, build_hamiltonian, SystemParams};

/// Applies `f` to every item, keeping input order.
pub fn map<T, R, F>(items: &[T], f: F) -> Vec<R>
where
    T: Sync,
    R: Send,
    F: Fn(&T) -> R + Sync + Send,
{
    #[cfg(feature = "parallel")]
    {
        use rayon::prelude::*;
        items.par_iter().map(f).collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        map_sequential(items, f)
    }
}

pub fn map_sequential<T, R, F>(items: &[T], f: F) -> Vec<R>
where
    F: Fn(&T) -> R,
{
    items.iter().map(f).collect()
}

/// Steady-state observables of one parameter point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PointSummary {
    pub g2: f64,
    pub n1: f64,
    pub n2: f64,
    pub nb: f64,
    pub residual: f64,
}

pub fn solve_point(p: &SystemParams) -> Result<PointSummary> {
    let l = build_liouvillian(&build_hamiltonian(p)?, &build_collapse_ops(p)?)?;
    let rho = steady_state(&l)?;
    let (n1, n2, nb) = occupations(&rho);
    Ok(PointSummary {
        g2: g2_zero(&rho)?,
        n1,
        n2,
        nb,
        residual: l.residual(&rho)?,
    })
}
