//! Closed-form optimal antibunching conditions, the truncated amplitude
//! model, and the determinant condition behind the optimum.
//!
//! The amplitude model keeps the six lowest states of the weakly driven
//! system, `|000⟩, |100⟩, |011⟩, |200⟩, |111⟩, |022⟩` (labels are
//! `n1 n2 nb`), with `c000` held at 1.

use faer::Mat;
use num_complex::Complex64 as C64;

use crate::error::{Error, NoRealOptimum, Result};
use crate::model::SystemParams;
use crate::ode::{self, Tolerances};

const SQRT2: f64 = std::f64::consts::SQRT_2;

/// Sign of the detuning solution.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Branch {
    #[default]
    Plus,
    Minus,
}

impl Branch {
    pub fn sign(self) -> f64 {
        match self {
            Branch::Plus => 1.0,
            Branch::Minus => -1.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OptimalPoint {
    pub delta_opt: f64,
    pub u_opt: f64,
    pub branch: Branch,
}

/// `(Δ, U)` at which the two-photon amplitude `c200` vanishes for γ = 0:
///
/// `Δ = ±½ √(2√(g²(5g² + 2κ²)) − 4g² − κ²)`,
/// `U = Δ(4Δ² + 2g² + 5κ²) / (2(2g² − κ²))`.
///
/// Real solutions exist only for `|g| > κ/√2`.
pub fn optimal_conditions(g: f64, kappa: f64, branch: Branch) -> Result<OptimalPoint> {
    if !(kappa.is_finite() && kappa > 0.0) {
        return Err(Error::InvalidParameter {
            field: "kappa",
            reason: format!("{kappa} must be positive"),
        });
    }
    if !g.is_finite() {
        return Err(Error::InvalidParameter {
            field: "coupling",
            reason: format!("{g} is not finite"),
        });
    }
    let g2 = g * g;
    let k2 = kappa * kappa;
    let gap = 2.0 * g2 - k2;
    if gap.abs() <= 1e-12 * k2 {
        return Err(Error::NoRealSolution(NoRealOptimum::VanishingDenominator));
    }
    let radicand = 2.0 * (g2 * (5.0 * g2 + 2.0 * k2)).sqrt() - 4.0 * g2 - k2;
    if radicand < 0.0 {
        return Err(Error::NoRealSolution(NoRealOptimum::NegativeRadicand { radicand }));
    }
    let delta = branch.sign() * 0.5 * radicand.sqrt();
    let u = delta * (4.0 * delta * delta + 2.0 * g2 + 5.0 * k2) / (2.0 * gap);
    Ok(OptimalPoint {
        delta_opt: delta,
        u_opt: u,
        branch,
    })
}

/// Amplitudes of the truncated ansatz.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AmplitudeState {
    pub c000: C64,
    pub c100: C64,
    pub c011: C64,
    pub c200: C64,
    pub c111: C64,
    pub c022: C64,
}

impl AmplitudeState {
    pub fn vacuum() -> Self {
        Self::from_array([C64::new(1.0, 0.0), C64::default(), C64::default(), C64::default(), C64::default(), C64::default()])
    }

    /// Order: c000, c100, c011, c200, c111, c022.
    pub fn to_array(self) -> [C64; 6] {
        [self.c000, self.c100, self.c011, self.c200, self.c111, self.c022]
    }

    pub fn from_array(c: [C64; 6]) -> Self {
        Self {
            c000: c[0],
            c100: c[1],
            c011: c[2],
            c200: c[3],
            c111: c[4],
            c022: c[5],
        }
    }

    pub fn norm_sqr(&self) -> f64 {
        self.to_array().iter().map(|c| c.norm_sqr()).sum()
    }

    pub fn normalized(&self) -> Self {
        let n = self.norm_sqr().sqrt();
        Self::from_array(self.to_array().map(|c| c / n))
    }

    /// Whether each excitation tier is smaller than the one below by at
    /// least a factor `10 Ω/κ`. Diagnostic only.
    pub fn hierarchy_holds(&self, drive: f64, kappa: f64) -> bool {
        let bound = 10.0 * drive / kappa;
        let one = self.c100.norm().max(self.c011.norm());
        let two = self.c200.norm().max(self.c111.norm()).max(self.c022.norm());
        one <= bound * self.c000.norm() && two <= bound * one
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        self.to_array()
            .iter()
            .zip(other.to_array())
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }
}

/// Coefficient matrix of `i ċ = M c + Ω e₁` on `(c100, c011, c200, c111, c022)`.
fn amplitude_matrix(p: &SystemParams) -> [[C64; 5]; 5] {
    let (d, u, g, k, gm, w) = (p.delta, p.kerr, p.coupling, p.kappa, p.mechanical_rate(), p.drive);
    let c = |re: f64, im: f64| C64::new(re, im);
    let z = C64::default();
    [
        [c(d, -k / 2.0), c(g, 0.0), c(SQRT2 * w, 0.0), z, z],
        [c(g, 0.0), c(d, -(k + gm) / 2.0), z, c(w, 0.0), z],
        [c(SQRT2 * w, 0.0), z, c(2.0 * (d + u), -k), c(SQRT2 * g, 0.0), z],
        [z, c(w, 0.0), c(SQRT2 * g, 0.0), c(2.0 * d, -k - gm / 2.0), c(2.0 * g, 0.0)],
        [z, z, z, c(2.0 * g, 0.0), c(2.0 * (d + u), -(k + gm))],
    ]
}

/// `i · dc/dt` for every amplitude; the `c000` slot is zero because `c000`
/// is held fixed.
pub fn amplitude_rhs(state: &AmplitudeState, p: &SystemParams) -> AmplitudeState {
    let m = amplitude_matrix(p);
    let c = state.to_array();
    let x = [c[1], c[2], c[3], c[4], c[5]];
    let mut out = [C64::default(); 6];
    for (r, row) in m.iter().enumerate() {
        out[r + 1] = row.iter().zip(&x).map(|(a, b)| a * b).sum();
    }
    out[1] += state.c000 * p.drive;
    AmplitudeState::from_array(out)
}

/// Stationary amplitudes from the direct 5×5 solve with `c000 = 1`.
pub fn amplitude_steady_state(p: &SystemParams) -> Result<AmplitudeState> {
    p.validate()?;
    let m = amplitude_matrix(p);
    let a = Mat::from_fn(5, 5, |i, j| m[i][j]);
    let mut rhs = Mat::<C64>::zeros(5, 1);
    rhs[(0, 0)] = C64::new(-p.drive, 0.0);
    let x = {
        use faer::linalg::solvers::Solve;
        a.partial_piv_lu().solve(&rhs)
    };
    let scale = m.iter().flatten().map(|v| v.norm()).fold(0.0, f64::max);
    let mut worst = 0.0_f64;
    for i in 0..5 {
        let ax: C64 = (0..5).map(|j| m[i][j] * x[(j, 0)]).sum();
        worst = worst.max((ax - rhs[(i, 0)]).norm());
    }
    let finite = (0..5).all(|i| x[(i, 0)].re.is_finite() && x[(i, 0)].im.is_finite());
    if !finite || worst > 1e-9 * scale.max(p.drive) {
        return Err(Error::DegenerateParameters(format!(
            "singular amplitude system at Δ = {}, U = {}, g = {}",
            p.delta, p.kerr, p.coupling
        )));
    }
    Ok(AmplitudeState {
        c000: C64::new(1.0, 0.0),
        c100: x[(0, 0)],
        c011: x[(1, 0)],
        c200: x[(2, 0)],
        c111: x[(3, 0)],
        c022: x[(4, 0)],
    })
}

/// `g²(0)` of the (normalised) ansatz state:
/// `2|c200|² N / (|c100|² + 2|c200|² + |c111|²)²` with `N = Σ|c|²`.
pub fn g2_from_amplitudes(state: &AmplitudeState) -> Result<f64> {
    let single = state.c100.norm_sqr();
    if single == 0.0 {
        return Err(Error::UndefinedCorrelation(0.0));
    }
    let pair = 2.0 * state.c200.norm_sqr();
    let n1 = single + pair + state.c111.norm_sqr();
    Ok(pair * state.norm_sqr() / (n1 * n1))
}

/// Integrates the amplitude equations from the vacuum up to time `t`.
pub fn integrate_amplitudes(p: &SystemParams, t: f64) -> Result<AmplitudeState> {
    p.validate()?;
    let mut out = AmplitudeState::vacuum();
    let y0 = AmplitudeState::vacuum().to_array();
    ode::integrate(
        |y, dy| {
            let s = AmplitudeState::from_array([y[0], y[1], y[2], y[3], y[4], y[5]]);
            let r = amplitude_rhs(&s, p).to_array();
            for (d, v) in dy.iter_mut().zip(r) {
                *d = v * C64::new(0.0, -1.0);
            }
        },
        &y0,
        &[t],
        Tolerances { rtol: 1e-12, atol: 1e-16 },
        |_, y| out = AmplitudeState::from_array([y[0], y[1], y[2], y[3], y[4], y[5]]),
    )?;
    Ok(out)
}

/// Three-by-three system on `(c111, c022, Ω² c000)` obtained by setting
/// `c200 = 0` and eliminating the one-excitation amplitudes. The drive has
/// been divided out, so the matrix is independent of Ω.
fn determinant_matrix(delta: f64, u: f64, g: f64, kappa: f64, gamma: f64) -> [[C64; 3]; 3] {
    let a = C64::new(delta, -kappa / 2.0);
    let b = C64::new(delta, -(kappa + gamma) / 2.0);
    let den = a * b - g * g;
    let f100 = -b / den;
    let f011 = C64::new(g, 0.0) / den;
    let z = C64::default();
    [
        [C64::new(g, 0.0), z, f100],
        [a * 2.0 - C64::new(0.0, gamma / 2.0), C64::new(2.0 * g, 0.0), f011],
        [C64::new(2.0 * g, 0.0), C64::new(2.0 * (delta + u), -(kappa + gamma)), z],
    ]
}

fn det3(m: &[[C64; 3]; 3]) -> C64 {
    m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
        + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
}

/// Determinant whose vanishing admits a solution with `c200 = 0`.
pub fn determinant_condition(delta: f64, u: f64, g: f64, kappa: f64, gamma: f64) -> C64 {
    det3(&determinant_matrix(delta, u, g, kappa, gamma))
}

/// [`determinant_condition`] with every row scaled to unit Euclidean norm.
pub fn determinant_condition_normalized(delta: f64, u: f64, g: f64, kappa: f64, gamma: f64) -> C64 {
    let mut m = determinant_matrix(delta, u, g, kappa, gamma);
    for row in &mut m {
        let n = row.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt();
        if n > 0.0 {
            row.iter_mut().for_each(|v| *v /= n);
        }
    }
    det3(&m)
}

/// The determinant is affine in U; returns `U*` with `det(Δ, U*) = 0`,
/// which is complex in general.
fn kerr_root(delta: f64, g: f64, kappa: f64, gamma: f64) -> C64 {
    let a = determinant_condition(delta, 0.0, g, kappa, gamma);
    let b = determinant_condition(delta, 1.0, g, kappa, gamma) - a;
    -a / b
}

/// Root of the determinant condition found numerically on the requested
/// detuning half-line: the Δ at which the U solving `det = 0` is real.
/// Works for any γ ≥ 0.
pub fn numerical_optimum(g: f64, kappa: f64, gamma: f64, branch: Branch) -> Result<OptimalPoint> {
    for (field, v) in [("coupling", g), ("kappa", kappa), ("gamma", gamma)] {
        if !v.is_finite() {
            return Err(Error::InvalidParameter {
                field,
                reason: format!("{v} is not finite"),
            });
        }
    }
    if kappa <= 0.0 || gamma < 0.0 {
        return Err(Error::InvalidParameter {
            field: if kappa <= 0.0 { "kappa" } else { "gamma" },
            reason: "rates must be positive".into(),
        });
    }
    let s = branch.sign();
    let f = |d: f64| kerr_root(s * d, g, kappa, gamma).im;
    let reach = 4.0 * g.abs().max(kappa);
    let n = 4000;
    let step = reach / n as f64;
    let mut lo = step * 1e-3;
    let mut flo = f(lo);
    for k in 1..=n {
        let hi = k as f64 * step;
        let fhi = f(hi);
        if flo.is_finite() && fhi.is_finite() && flo.signum() != fhi.signum() {
            let (mut a, mut b, mut fa) = (lo, hi, flo);
            for _ in 0..200 {
                let m = 0.5 * (a + b);
                let fm = f(m);
                if fm.signum() == fa.signum() {
                    a = m;
                    fa = fm;
                } else {
                    b = m;
                }
                if b - a <= 1e-15 * b.max(1.0) {
                    break;
                }
            }
            let d = s * 0.5 * (a + b);
            let u = kerr_root(d, g, kappa, gamma).re;
            // Sign changes across poles of U* are not roots.
            if determinant_condition_normalized(d, u, g, kappa, gamma).norm() < 1e-8 {
                return Ok(OptimalPoint {
                    delta_opt: d,
                    u_opt: u,
                    branch,
                });
            }
        }
        lo = hi;
        flo = fhi;
    }
    Err(Error::DegenerateParameters(format!(
        "no real root of the determinant condition for g = {g}, γ = {gamma}"
    )))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fock::ModeDims;

    fn params(delta: f64, u: f64, g: f64, drive: f64, gamma: f64) -> SystemParams {
        SystemParams {
            delta,
            kerr: u,
            coupling: g,
            drive,
            gamma,
            dims: ModeDims::new(3, 3, 3).unwrap(),
            ..SystemParams::default()
        }
    }

    #[test]
    fn closed_form_at_unit_coupling() {
        let p = optimal_conditions(1.0, 1.0, Branch::Plus).unwrap();
        // Independent evaluation: radicand = 2√7 − 5.
        let d = 0.5 * (2.0 * 7f64.sqrt() - 5.0).sqrt();
        assert!((p.delta_opt - d).abs() < 1e-15);
        assert!((p.u_opt - d * (4.0 * d * d + 7.0) / 2.0).abs() < 1e-14);
        assert_eq!(p.branch, Branch::Plus);
    }

    #[test]
    fn minus_branch_mirrors_plus() {
        let p = optimal_conditions(1.7, 1.0, Branch::Plus).unwrap();
        let m = optimal_conditions(1.7, 1.0, Branch::Minus).unwrap();
        assert_eq!(m.delta_opt, -p.delta_opt);
        assert_eq!(m.u_opt, -p.u_opt);
    }

    #[test]
    fn boundary_errors_are_distinguished() {
        assert_eq!(
            optimal_conditions(std::f64::consts::FRAC_1_SQRT_2, 1.0, Branch::Plus),
            Err(Error::NoRealSolution(NoRealOptimum::VanishingDenominator))
        );
        assert!(matches!(
            optimal_conditions(0.5, 1.0, Branch::Plus),
            Err(Error::NoRealSolution(NoRealOptimum::NegativeRadicand { .. }))
        ));
        assert!(optimal_conditions(1.0, 0.0, Branch::Plus).is_err());
    }

    #[test]
    fn rhs_of_vacuum_only_seeds_single_photon() {
        let p = params(0.3, 0.5, 1.0, 0.02, 0.001);
        let r = amplitude_rhs(&AmplitudeState::vacuum(), &p);
        // i ċ100 = Ω, so ċ100 = −iΩ.
        assert_eq!(r.c100 * C64::new(0.0, -1.0), C64::new(0.0, -0.02));
        assert_eq!([r.c000, r.c011, r.c200, r.c111, r.c022], [C64::default(); 5]);
    }

    #[test]
    fn uncoupled_rhs_has_no_mixing() {
        let p = params(0.3, 0.5, 0.0, 0.02, 0.001);
        let mut s = AmplitudeState::vacuum();
        s.c000 = C64::default();
        s.c100 = C64::new(0.4, 0.1);
        let r = amplitude_rhs(&s, &p);
        assert_eq!(r.c011, C64::default());
        assert_eq!(r.c111, C64::default());
    }

    #[test]
    fn steady_state_single_photon_closed_form() {
        let p = params(0.4, 0.8, 1.3, 0.001, 0.01);
        let s = amplitude_steady_state(&p).unwrap();
        let a = C64::new(p.delta, -p.kappa / 2.0);
        let b = C64::new(p.delta, -(p.kappa + p.gamma) / 2.0);
        let c100 = -b * p.drive / (a * b - p.coupling * p.coupling);
        assert!(((s.c100 - c100) / c100).norm() < 1e-6);
        let c011 = -s.c100 * p.coupling / b;
        assert!(((s.c011 - c011) / c011).norm() < 1e-6);
        assert!(s.hierarchy_holds(p.drive, p.kappa));
    }

    #[test]
    fn steady_state_is_stationary() {
        let p = params(0.4, 0.8, 1.3, 0.01, 0.01);
        let s = amplitude_steady_state(&p).unwrap();
        let r = amplitude_rhs(&s, &p);
        assert!(r.to_array().iter().all(|v| v.norm() < 1e-15));
    }

    #[test]
    fn optimum_suppresses_two_photon_amplitude() {
        for g in [1.0, 1.5, 2.0, 2.5] {
            let o = optimal_conditions(g, 1.0, Branch::Plus).unwrap();
            let s = amplitude_steady_state(&params(o.delta_opt, o.u_opt, g, 0.001, 0.0)).unwrap();
            assert!(s.c200.norm() / s.c100.norm_sqr() < 1e-3);
        }
    }

    #[test]
    fn linear_cavity_amplitudes_are_poissonian() {
        let p = params(0.2, 0.0, 0.0, 0.001, 0.001);
        let s = amplitude_steady_state(&p).unwrap();
        assert_eq!(s.c011, C64::default());
        assert_eq!(s.c111, C64::default());
        assert_eq!(s.c022, C64::default());
        let ratio = s.c200.norm() / (s.c100.norm_sqr() / SQRT2);
        assert!((ratio - 1.0).abs() < 1e-5);
        assert!((g2_from_amplitudes(&s).unwrap() - 1.0).abs() < 1e-5);
    }

    #[test]
    fn g2_of_hand_built_states() {
        let mut s = AmplitudeState::vacuum();
        s.c100 = C64::new(1e-3, 0.0);
        assert_eq!(g2_from_amplitudes(&s).unwrap(), 0.0);
        s.c200 = C64::new(1e-6 / SQRT2, 0.0);
        assert!((g2_from_amplitudes(&s).unwrap() - 1.0).abs() < 1e-5);
        assert!(matches!(
            g2_from_amplitudes(&AmplitudeState::vacuum()),
            Err(Error::UndefinedCorrelation(_))
        ));
    }

    #[test]
    fn determinant_vanishes_at_closed_form() {
        for g in [1.0, 1.5, 2.0, 2.5] {
            for branch in [Branch::Plus, Branch::Minus] {
                let o = optimal_conditions(g, 1.0, branch).unwrap();
                let d = determinant_condition_normalized(o.delta_opt, o.u_opt, g, 1.0, 0.0);
                assert!(d.norm() < 1e-10, "g = {g}: {d}");
            }
        }
    }

    #[test]
    fn determinant_regression_value() {
        let d = determinant_condition_normalized(0.0, 0.0, 1.0, 1.0, 0.0);
        assert!(d.norm() > 1e-3);
        assert!((d - C64::new(0.0, 0.2098)).norm() < 1e-4, "{d}");
        let raw = determinant_condition(0.0, 0.0, 1.0, 1.0, 0.0);
        assert!((raw - C64::new(0.0, 1.2)).norm() < 1e-12, "{raw}");
    }

    #[test]
    fn numerical_root_matches_closed_form() {
        for g in [1.0, 1.5, 2.0, 2.5] {
            for branch in [Branch::Plus, Branch::Minus] {
                let exact = optimal_conditions(g, 1.0, branch).unwrap();
                let num = numerical_optimum(g, 1.0, 0.0, branch).unwrap();
                assert!((num.delta_opt - exact.delta_opt).abs() < 1e-6);
                assert!((num.u_opt - exact.u_opt).abs() < 1e-6);
            }
        }
    }

    #[test]
    fn numerical_root_with_mechanical_loss() {
        let o = numerical_optimum(2.0, 1.0, 0.01, Branch::Plus).unwrap();
        let d = determinant_condition_normalized(o.delta_opt, o.u_opt, 2.0, 1.0, 0.01);
        assert!(d.norm() < 1e-8);
        let exact = optimal_conditions(2.0, 1.0, Branch::Plus).unwrap();
        assert!((o.delta_opt - exact.delta_opt).abs() < 0.05);
    }

    #[test]
    fn amplitude_ode_relaxes_to_steady_state() {
        let o = optimal_conditions(1.5, 1.0, Branch::Plus).unwrap();
        let p = params(o.delta_opt, o.u_opt, 1.5, 0.01, 0.001);
        let late = integrate_amplitudes(&p, 50.0).unwrap();
        let ss = amplitude_steady_state(&p).unwrap();
        assert!(late.max_abs_diff(&ss) < 1e-8);
    }
}
