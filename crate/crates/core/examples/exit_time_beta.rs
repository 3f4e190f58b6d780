//! Mean exit times from balls and the walk dimension fitted from them:
//! about 2 on a path, about log 5 / log 2 on the gasket.
//!
//!     cargo run --release --example exit_time_beta

use mmd_extension::cli::run::central_vertex;
use mmd_extension::dirichlet::mean_exit_time;
use mmd_extension::hke::beta_fit;
use mmd_extension::mmspace::{CatalogSpec, Space};

fn main() -> mmd_extension::Result<()> {
    let p = Space::from_catalog(&CatalogSpec::path(64))?;
    let b = p.ball(32, 8.0)?.to_set(p.len());
    let tau = mean_exit_time(&p, &b)?;
    println!("path(64): E τ from B(32, 8) = {:.3} at the center", tau[32]);

    let radii = [4.0, 6.0, 8.0, 12.0, 16.0, 24.0, 32.0];
    let fit = beta_fit(&p, &radii, &[32])?;
    println!("path(64): β = {:.4} (r² {:.5})", fit.beta, fit.r_squared);

    let g = Space::from_catalog(&CatalogSpec::gasket(6))?;
    let fit = beta_fit(&g, &radii, &[central_vertex(&g)])?;
    println!("gasket(6): β = {:.4} (r² {:.5}), log 5 / log 2 = {:.4}", fit.beta, fit.r_squared, 5f64.log2());
    for (r, t) in &fit.points {
        println!("    r = {r:>4}: E τ = {t:.2}");
    }
    Ok(())
}
