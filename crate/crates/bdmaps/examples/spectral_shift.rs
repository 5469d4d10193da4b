//! Spectral shift function on a grid, checked against eigenvalue counting.

use bdmaps::ode::{BoundaryAngles, Potential};
use bdmaps::spectral::{spectral_shift, ssf_counting_oracle, DEFAULT_EPS};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let pot = Potential::cosine(1.0, 1.0, 1.0, 0.0);
    let (base, primed) = (BoundaryAngles::new(0.4, 1.9), BoundaryAngles::new(2.3, 0.7));
    let grid: Vec<f64> = (0..25).map(|i| -15.0 + 5.0 * i as f64).collect();
    let s = spectral_shift(&pot, &base, &primed, &grid, &DEFAULT_EPS, 1e-10)?;
    println!("breakpoints {:?}", s.breakpoints.iter().map(|b| format!("{b:.4}")).collect::<Vec<_>>());
    println!("{:>10} {:>4} {:>8} {:>10}", "λ", "ξ", "count", "raw");
    for smp in &s.samples {
        let count = ssf_counting_oracle(&pot, &base, &primed, smp.lambda, 1e-10)?;
        println!("{:>10.3} {:>4} {:>8} {:>10.6}", smp.lambda, smp.xi, count, smp.raw);
    }
    println!("excluded {:?}, max residual {:.1e}", s.excluded, s.max_residual);
    Ok(())
}
