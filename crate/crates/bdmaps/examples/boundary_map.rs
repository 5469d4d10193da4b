//! Boundary data maps between two sets of separated boundary conditions.

use std::f64::consts::FRAC_PI_2;

use bdmaps::boundary_maps::{char_det, herglotz_check, lambda_det, lambda_map};
use bdmaps::ode::{BoundaryAngles, Potential};
use bdmaps::Complex64 as C;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let tol = 1e-10;
    let (dir, neu) = (BoundaryAngles::dirichlet(), BoundaryAngles::neumann());

    // Dirichlet-to-Neumann map for V = 0 at z = -1 against cosh/sinh
    let v0 = Potential::zero(1.0);
    let m = lambda_map(&v0, C::new(-1.0, 0.0), &dir, &neu, tol)?;
    let (c, s) = (1f64.cosh(), 1f64.sinh());
    println!("DtN map: {:?}", m.entries().map(|e| e.re));
    println!("closed form: [{:.12}, {:.12}, {:.12}, {:.12}]", -c / s, 1.0 / s, 1.0 / s, -c / s);

    let pot = Potential::cosine(1.0, 1.0, 1.0, 0.0);
    let from = BoundaryAngles::new(0.3, 2.0);
    let to = BoundaryAngles::new(FRAC_PI_2, 0.9);
    for z in [C::new(-10.0, 0.0), C::new(5.0, 2.0), C::new(40.0, 0.5)] {
        let d = lambda_det(&pot, z, &from, &to, tol)?;
        let ratio = char_det(&pot, z, &to, tol)?.value / char_det(&pot, z, &from, tol)?.value;
        println!("z = {z}: det = {d:.10}, F_to/F_from = {:.10}", ratio.value());
        if z.im > 0.0 {
            println!("  min eigenvalue of Im(ΛS) = {:.4e}", herglotz_check(&pot, z, &from, &to, tol)?);
        }
    }
    Ok(())
}
