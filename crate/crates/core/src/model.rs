//! The driven three-mode optomechanical model in the frame where the
//! coupling is the resonant mixing `g(a1† a2 b + a1 a2† b†)`.
//!
//! All rates are in units of the shared cavity decay rate κ.

use log::warn;
use num_complex::Complex64 as C64;

use crate::analytics::{optimal_conditions, Branch};
use crate::error::{Error, Result};
use crate::fock::{ModeDims, ModeOperators, QOperator};

/// Which rate multiplies the thermal mechanical dissipator.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum MechanicalBath {
    /// The mechanical damping γ.
    #[default]
    Gamma,
    /// The cavity decay κ, as the mechanical dissipator is literally printed
    /// in some versions of the model. Kept for comparison runs only.
    LegacyKappa,
}

/// Drive strengths above this fraction of κ leave the weak-drive regime.
pub const WEAK_DRIVE_RATIO: f64 = 0.1;

pub const DEFAULT_DRIVE: f64 = 0.01;
pub const DEFAULT_GAMMA: f64 = 0.001;
pub const DEFAULT_CAVITY_CUTOFF: usize = 4;
pub const DEFAULT_MECHANICAL_CUTOFF: usize = 6;
/// Mechanical cutoff used whenever thermal phonons are present.
pub const THERMAL_MECHANICAL_CUTOFF: usize = 10;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SystemParams {
    /// Cavity detuning Δ.
    pub delta: f64,
    /// Kerr strength U, shared by both cavity modes.
    pub kerr: f64,
    /// Three-mode coupling g.
    pub coupling: f64,
    /// Cavity decay κ (both modes).
    pub kappa: f64,
    /// Mechanical damping γ.
    pub gamma: f64,
    /// Drive Ω on mode a1.
    pub drive: f64,
    /// Thermal phonon number of the mechanical bath.
    pub n_th: f64,
    /// Pure-dephasing rate of both cavity modes.
    pub gamma_p: f64,
    pub dims: ModeDims,
    pub bath: MechanicalBath,
}

impl Default for SystemParams {
    /// The g = κ optimum (plus branch) at T = 0 with the documented defaults.
    fn default() -> Self {
        let opt = optimal_conditions(1.0, 1.0, Branch::Plus)
            .expect("g = κ lies above the κ/√2 threshold");
        Self {
            delta: opt.delta_opt,
            kerr: opt.u_opt,
            coupling: 1.0,
            kappa: 1.0,
            gamma: DEFAULT_GAMMA,
            drive: DEFAULT_DRIVE,
            n_th: 0.0,
            gamma_p: 0.0,
            dims: ModeDims::new(
                DEFAULT_CAVITY_CUTOFF,
                DEFAULT_CAVITY_CUTOFF,
                DEFAULT_MECHANICAL_CUTOFF,
            )
            .expect("default cutoffs are valid"),
            bath: MechanicalBath::Gamma,
        }
    }
}

impl SystemParams {
    /// Checks the rate invariants. A drive beyond the weak-drive regime is
    /// logged, not rejected.
    pub fn validate(&self) -> Result<()> {
        let fields: [(&'static str, f64); 8] = [
            ("delta", self.delta),
            ("kerr", self.kerr),
            ("coupling", self.coupling),
            ("kappa", self.kappa),
            ("gamma", self.gamma),
            ("drive", self.drive),
            ("n_th", self.n_th),
            ("gamma_p", self.gamma_p),
        ];
        for (field, v) in fields {
            if !v.is_finite() {
                return Err(Error::InvalidParameter {
                    field,
                    reason: format!("{v} is not finite"),
                });
            }
        }
        if self.kappa <= 0.0 {
            return Err(Error::InvalidParameter {
                field: "kappa",
                reason: format!("{} must be positive", self.kappa),
            });
        }
        for (field, v) in [
            ("gamma", self.gamma),
            ("drive", self.drive),
            ("n_th", self.n_th),
            ("gamma_p", self.gamma_p),
        ] {
            if v < 0.0 {
                return Err(Error::InvalidParameter {
                    field,
                    reason: format!("{v} must be non-negative"),
                });
            }
        }
        if !self.is_weak_drive() {
            warn!(
                "drive Ω = {} exceeds the weak-drive regime (Ω ≤ {}κ)",
                self.drive, WEAK_DRIVE_RATIO
            );
        }
        Ok(())
    }

    pub fn is_weak_drive(&self) -> bool {
        self.drive <= WEAK_DRIVE_RATIO * self.kappa
    }

    /// Rate multiplying the mechanical dissipator.
    pub fn mechanical_rate(&self) -> f64 {
        match self.bath {
            MechanicalBath::Gamma => self.gamma,
            MechanicalBath::LegacyKappa => self.kappa,
        }
    }
}

/// A Lindblad jump operator `L` with the rate `r` of `r·(LρL† − ½{L†L, ρ})`.
#[derive(Debug, Clone)]
pub struct CollapseOp {
    pub operator: QOperator,
    pub rate: f64,
}

impl CollapseOp {
    pub fn new(operator: QOperator, rate: f64) -> Result<Self> {
        if !(rate > 0.0 && rate.is_finite()) {
            return Err(Error::InvalidParameter {
                field: "rate",
                reason: format!("collapse rate {rate} must be positive"),
            });
        }
        Ok(Self { operator, rate })
    }
}

/// `a† a† a a` for a lowering operator.
fn kerr_term(a: &QOperator) -> Result<QOperator> {
    let ad = a.adjoint();
    ad.product(&ad)?.product(a)?.product(a)
}

/// The coupling term `a1† a2 b + a1 a2† b†` without its prefactor.
pub fn mixing_term(ops: &ModeOperators) -> Result<QOperator> {
    let forward = ops.a1.adjoint().product(&ops.a2)?.product(&ops.b)?;
    forward.sum(&forward.adjoint())
}

fn hermitian_part(p: &SystemParams, ops: &ModeOperators) -> Result<QOperator> {
    let detuning = ops.n1.sum(&ops.n2)?.scale_real(p.delta);
    let kerr = kerr_term(&ops.a1)?
        .sum(&kerr_term(&ops.a2)?)?
        .scale_real(p.kerr);
    let mixing = mixing_term(ops)?.scale_real(p.coupling);
    let drive = ops.a1.sum(&ops.a1.adjoint())?.scale_real(p.drive);
    detuning.sum(&kerr)?.sum(&mixing)?.sum(&drive)
}

/// `H = Δ(n1 + n2) + U(a1†²a1² + a2†²a2²) + g(a1†a2b + a1a2†b†) + Ω(a1† + a1)`.
pub fn build_hamiltonian(p: &SystemParams) -> Result<QOperator> {
    build_hamiltonian_with(p, &ModeOperators::new(p.dims)?)
}

pub fn build_hamiltonian_with(p: &SystemParams, ops: &ModeOperators) -> Result<QOperator> {
    p.validate()?;
    check_ops(p, ops)?;
    hermitian_part(p, ops)?.verified_hermitian()
}

/// `H' = H − (i/2)(κ n1 + κ n2 + γ nb)`, the no-jump generator of the
/// amplitude equations.
pub fn build_effective_hamiltonian(p: &SystemParams) -> Result<QOperator> {
    let ops = ModeOperators::new(p.dims)?;
    p.validate()?;
    let loss = ops
        .n1
        .sum(&ops.n2)?
        .scale_real(p.kappa)
        .sum(&ops.nb.scale_real(p.mechanical_rate()))?;
    hermitian_part(p, &ops)?.sum(&loss.scale(C64::new(0.0, -0.5)))
}

/// Jump operators in the fixed order `(a1, κ)`, `(a2, κ)`, `(b, γ(n_th+1))`,
/// `(b†, γ n_th)`, `(n1, γ_p)`, `(n2, γ_p)`. Zero-rate entries are dropped.
pub fn build_collapse_ops(p: &SystemParams) -> Result<Vec<CollapseOp>> {
    build_collapse_ops_with(p, &ModeOperators::new(p.dims)?)
}

pub fn build_collapse_ops_with(p: &SystemParams, ops: &ModeOperators) -> Result<Vec<CollapseOp>> {
    p.validate()?;
    check_ops(p, ops)?;
    let mech = p.mechanical_rate();
    let candidates = [
        (ops.a1.clone(), p.kappa),
        (ops.a2.clone(), p.kappa),
        (ops.b.clone(), mech * (p.n_th + 1.0)),
        (ops.b.adjoint(), mech * p.n_th),
        (ops.n1.clone(), p.gamma_p),
        (ops.n2.clone(), p.gamma_p),
    ];
    candidates
        .into_iter()
        .filter(|(_, rate)| *rate > 0.0)
        .map(|(op, rate)| CollapseOp::new(op, rate))
        .collect()
}

fn check_ops(p: &SystemParams, ops: &ModeOperators) -> Result<()> {
    if ops.dims != p.dims {
        return Err(Error::InvalidDimension(format!(
            "operators built for {} but parameters use {}",
            ops.dims, p.dims
        )));
    }
    Ok(())
}
