//! Symmetrized perturbation determinant: closed form, finite-difference
//! convergence and the kernel dimension probe.

use std::f64::consts::{FRAC_PI_2, FRAC_PI_4};

use bdmaps::discrete_check::{
    convergence_study, decaying_count, discretize, kernel_dimension_probe, sym_det_closed_form, sym_det_target,
};
use bdmaps::ode::{BoundaryAngles, Potential};
use bdmaps::Complex64 as C;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let v0 = Potential::zero(1.0);
    let (base, primed) = (BoundaryAngles::new(FRAC_PI_2, FRAC_PI_2), BoundaryAngles::new(FRAC_PI_4, FRAC_PI_4));
    let z = C::new(-9.0, 0.0);
    println!("closed form {:.10}", sym_det_closed_form(&v0, z, &base, &primed, 1e-10)?);
    println!("Λ form      {:.10}", sym_det_target(&v0, z, &base, &primed, 1e-10)?);

    let pot = Potential::cosine(1.0, 1.0, 1.0, 0.0);
    let (b, p) = (BoundaryAngles::new(0.5, 1.2), BoundaryAngles::new(2.0, 0.9));
    let study = convergence_study(&pot, -10.0, &b, &p, &[100, 200, 400, 800], 1e-10)?;
    println!("target {:.10}", study.target);
    for row in &study.rows {
        println!("  n = {:>4}: {:.10} (error {:.2e})", row.n, row.value, row.error);
    }
    println!("fitted order {:?}", study.order);

    let primed = BoundaryAngles::new(FRAC_PI_4, 1.1);
    for (name, base) in [
        ("Dirichlet-Dirichlet", BoundaryAngles::dirichlet()),
        ("Dirichlet-Neumann", BoundaryAngles::new(0.0, FRAC_PI_2)),
        ("Robin-Robin", BoundaryAngles::new(FRAC_PI_2, 2.0)),
    ] {
        let probe = |n| kernel_dimension_probe(&discretize(&v0, &base, n)?, &discretize(&v0, &primed, n)?, -4.0, 3);
        let (coarse, fine) = (probe(100)?, probe(200)?);
        println!("{name}: singular values {fine:?}, decaying {}", decaying_count(&coarse, &fine, 4.0));
    }
    Ok(())
}
