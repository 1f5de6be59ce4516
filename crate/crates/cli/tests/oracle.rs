//! The box-preconditioned iterative solver used for large cutoffs must
//! reproduce the direct solve where both fit in memory.

mod support;

use blockade::{build_collapse_ops, build_hamiltonian, build_liouvillian, g2_zero, steady_state, ModeDims, SystemParams};

fn check(outer: ModeDims, inner: ModeDims) {
    let p = SystemParams {
        dims: outer,
        ..SystemParams::default()
    };
    let l = build_liouvillian(&build_hamiltonian(&p).unwrap(), &build_collapse_ops(&p).unwrap()).unwrap();
    let direct = steady_state(&l).unwrap();
    let sol = support::box_preconditioned_steady_state(&l, inner).unwrap();
    let dist = sol.rho.trace_distance(&direct).unwrap();
    let (a, b) = (g2_zero(&sol.rho).unwrap(), g2_zero(&direct).unwrap());
    eprintln!(
        "{outer} ({} unknowns) in {inner} ({}): {} iterations, residual {:e}, distance {dist:e}, g² {a} vs {b}",
        sol.unknowns, sol.box_unknowns, sol.iterations, sol.linear_residual
    );
    assert!(l.residual(&sol.rho).unwrap() < 1e-10);
    assert!(dist < 1e-10);
    assert!((a / b - 1.0).abs() < 1e-8);
}

#[test]
fn iterative_solver_matches_direct_solve() {
    check(ModeDims::new(6, 6, 9).unwrap(), ModeDims::new(5, 5, 8).unwrap());
}

#[test]
fn box_covering_everything_is_a_direct_solve() {
    let d = ModeDims::new(3, 3, 4).unwrap();
    check(d, d);
}
