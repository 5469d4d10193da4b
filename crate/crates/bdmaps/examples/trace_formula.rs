//! Trace of a resolvent difference from eigenvalue sums against the
//! logarithmic derivative of the characteristic determinant ratio.

use bdmaps::ode::{BoundaryAngles, Potential};
use bdmaps::resolvents::krein_correction_trace;
use bdmaps::spectral::{log_det_derivative, trace_resolvent_diff};
use bdmaps::Complex64 as C;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let pot = Potential::cosine(1.0, 1.0, 1.0, 0.0);
    let (base, primed) = (BoundaryAngles::dirichlet(), BoundaryAngles::new(0.8, 2.1));
    for z in [C::new(-3.0, 0.0), C::new(-6.0, 0.0), C::new(3.0, 4.0)] {
        let sum = trace_resolvent_diff(&pot, &base, &primed, z, 100, 1e-6)?;
        let der = log_det_derivative(&pot, &base, &primed, z, 1e-2, 1e-10)?;
        let krein = krein_correction_trace(&pot, z, &base, &primed, 1e-10)?;
        println!("z = {z}");
        println!("  eigenvalue sum   {:.10} (tail bound {:.1e})", sum.value, sum.tail_bound);
        println!("  -d/dz ln det Λ   {:.10} (error {:.1e})", der.value, der.error);
        println!("  Krein correction {:.10}", krein);
    }
    Ok(())
}
