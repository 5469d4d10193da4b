//! Lowest eigenvalues for a few boundary conditions with their residuals.

use bdmaps::ode::{BoundaryAngles, Potential};
use bdmaps::spectral::eigenvalues;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let pot = Potential::cosine(1.0, 1.0, 1.0, 0.0);
    for (name, angles) in [
        ("Dirichlet", BoundaryAngles::dirichlet()),
        ("Neumann", BoundaryAngles::neumann()),
        ("Robin (0.5, 1.2)", BoundaryAngles::new(0.5, 1.2)),
    ] {
        let list = eigenvalues(&pot, &angles, 6, 1e-10)?;
        let res = list.residuals(1e-10)?;
        println!("{name}");
        for (k, (l, r)) in list.values.iter().zip(&res).enumerate() {
            println!("  λ_{k} = {l:>16.10}   residual {r:.1e}");
        }
    }
    Ok(())
}
