//! Heat kernel on the gasket: on-diagonal bounds against `m(B(x, Ψ⁻¹(t)))`,
//! near-diagonal lower bounds, and the reflected/ambient ratio deep inside
//! a half-grid.
//!
//!     cargo run --release --example heat_kernel

use mmd_extension::cli::run::central_vertex;
use mmd_extension::dirichlet::heat_kernel;
use mmd_extension::domains::DomainSpec;
use mmd_extension::hke::{deep_interior_ratios, default_window, hke_profile, reflected_space, time_grid};
use mmd_extension::mmspace::{CatalogSpec, ScaleFunction, Space};

fn main() -> mmd_extension::Result<()> {
    let g = Space::from_catalog(&CatalogSpec::gasket(4))?;
    let k = heat_kernel(&g, 1.0)?;
    println!("gasket(4): p_1(0, 0) = {:.5}, row mass at 0 = {:.12}", k.get(0, 0), k.row_mass(&g, 0));

    let psi = ScaleFunction::new(1.0, 5f64.ln() / 2f64.ln())?;
    let window = default_window(&g, &psi);
    let grid = time_grid(window, 8);
    let xs = vec![0, g.len() / 3, central_vertex(&g)];
    let prof = hke_profile(&g, &psi, &grid, &xs, window, 0.25)?;
    println!(
        "window [{:.3}, {:.3}]: c_low {:.4}, c_high {:.4}, envelope {:.3}, near pairs {}/{}",
        prof.window.0,
        prof.window.1,
        prof.c_low,
        prof.c_high,
        prof.envelope_ratio(),
        prof.near_ok,
        prof.near_pairs
    );
    println!("off-diagonal decay slope {:.4} (r² {:.3})", prof.decay_slope, prof.decay_r2);

    let spec = CatalogSpec::grid(33, 33);
    let s = Space::from_catalog(&spec)?;
    let dom = DomainSpec::HalfGrid.build(&spec, &s)?;
    let (rs, map) = reflected_space(&s, &dom)?;
    let top = 28 * 33 + 16;
    let ratios = deep_interior_ratios(&s, &rs, &map, &dom, &ScaleFunction::diffusive(), &[0.5, 1.0], &[top])?;
    for (t, x, r) in ratios {
        println!("deep interior t = {t}, x = {x}: reflected / ambient = {r:.6}");
    }
    Ok(())
}
