//! Boundary Poincaré constants `sup Var / E · 1/Ψ(r)` on the half-grid at
//! two refinements; the maxima per radius should agree.
//!
//!     cargo run --example poincare

use mmd_extension::dirichlet::poincare_constant;
use mmd_extension::domains::DomainSpec;
use mmd_extension::family::boundary_sample;
use mmd_extension::mmspace::{CatalogSpec, ScaleFunction, Space};

fn main() -> mmd_extension::Result<()> {
    let psi = ScaleFunction::diffusive();
    for n in [33i64, 65] {
        let spec = CatalogSpec::grid(n, n);
        let s = Space::from_catalog(&spec)?;
        let dom = DomainSpec::HalfGrid.build(&spec, &s)?;
        let h = (n - 1) as f64 / 32.0;
        print!("grid {n}:");
        for r in [4.0, 8.0] {
            let mut worst = 0.0f64;
            for x in boundary_sample(&dom, 4) {
                let vb = s.ball_within(x, r * h, &dom.u)?;
                let eb = s.ball_within(x, 2.0 * r * h, &dom.u)?;
                worst = worst.max(poincare_constant(&s, &vb, &eb, &psi)?);
            }
            print!("  r = {r}/32: {worst:.4}");
        }
        println!();
    }
    Ok(())
}
