//! Fundamental system at x = R and the boundary-normalized pair u±.

use bdmaps::ode::{l2_inner, propagate_fundamental, u_plus_minus, wronskian, BoundaryAngles, Potential};
use bdmaps::Complex64 as C;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let pot = Potential::cosine(1.0, 1.0, 1.0, 0.0);
    let z = C::new(-4.0, 1.0);

    let f = propagate_fundamental(&pot, z, 1e-10)?;
    let [th, thp, ph, php] = f.unscaled();
    println!("theta(R) = {th:.10}, theta'(R) = {thp:.10}");
    println!("phi(R)   = {ph:.10}, phi'(R)   = {php:.10}");
    println!("Wronskian defect {:.2e}", f.wronskian_defect());

    let angles = BoundaryAngles::new(0.4, 1.3);
    let (up, um) = u_plus_minus(&pot, z, &angles, 1e-10)?;
    for x in [0.0, 0.5, 1.0] {
        println!("W(u+, u-)({x}) = {:.10}", wronskian(&up, &um, x)?);
    }
    println!("<u+, u+> = {:.10}", l2_inner(&up, &up)?);
    Ok(())
}
