//! Resolvent of the primed operator as the base resolvent plus a finite-rank
//! correction, compared with a direct solve.

use std::f64::consts::PI;

use bdmaps::ode::{BoundaryAngles, Potential};
use bdmaps::resolvents::{apply_resolvent, krein_regime, krein_resolvent, lambda_derivative_identity};
use bdmaps::Complex64 as C;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let pot = Potential::cosine(1.0, 1.0, 1.0, 0.0);
    let base = BoundaryAngles::new(0.6, 1.9);
    let f = |x: f64| C::new((PI * x).sin(), 0.0);
    for primed in [BoundaryAngles::new(2.1, 0.8), BoundaryAngles::new(2.1, 1.9), BoundaryAngles::new(0.6, 0.8)] {
        let z = C::new(20.0, 5.0);
        let got = krein_resolvent(&pot, z, &base, &primed, &f, 1e-10)?;
        let want = apply_resolvent(&pot, z, &primed, &f, 1e-10)?;
        let mut sup = 0.0f64;
        for (i, &x) in want.grid.iter().enumerate() {
            if let Some(j) = got.node_index(x) {
                sup = sup.max((got.at(j).0 - want.at(i).0).norm());
            }
        }
        println!("{:?}: sup |Krein - direct| = {sup:.2e}", krein_regime(&base, &primed));
    }
    let r = lambda_derivative_identity(&pot, C::new(-20.0, 0.0), &base, &BoundaryAngles::new(2.1, 0.8), 5e-3, 1e-10)?;
    println!("derivative identity residual at z = -20: {r:.2e}");
    Ok(())
}
