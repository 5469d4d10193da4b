//! Negative fractional powers of a positive-type matrix by quadrature and the
//! finite-dimensional trace formula.

use bdmaps::positive_type::{
    default_t_grid, frac_power_neg, positive_type_diagnostics, random_hermitian_pd, random_positive_type,
    semigroup_check, spectral_oracle_power, sqrt_op, trace_formula_sides, DenseMatrix, QuadConfig,
};
use bdmaps::Complex64 as C;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let q = QuadConfig::default();

    let h = random_hermitian_pd(5, 0.2, 5.0, &mut rng);
    for alpha in [0.25, 0.5, 1.0, 1.5] {
        let p = frac_power_neg(&h, C::new(alpha, 0.0), &q)?;
        let o = spectral_oracle_power(&h, C::new(-alpha, 0.0))?;
        println!("α = {alpha}: |quadrature - eigendecomposition| = {:.2e}", (p - o).norm());
    }

    let a = random_positive_type(4, &mut rng);
    let d = positive_type_diagnostics(&a, &default_t_grid(&a)?)?;
    println!("non-normal sample: {d:?}");
    println!("semigroup defect {:.2e}", semigroup_check(&a, C::new(0.3, 0.2), C::new(0.4, -0.2))?);

    let j = DenseMatrix::from_row_slice(2, 2, &[2.0, 1.0, 0.0, 2.0].map(|x| C::new(x, 0.0)));
    println!("sqrt of a Jordan block:\n{:.10}", sqrt_op(&j)?.map(|c| c.re));

    let a0 = random_hermitian_pd(4, 0.5, 3.0, &mut rng);
    let (lhs, rhs) = trace_formula_sides(&a, &a0, -1.0, 1e-3)?;
    println!("trace formula: {lhs:.8} vs {rhs:.8}");
    Ok(())
}
