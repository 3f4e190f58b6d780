//! Boundary decomposition of a half-grid and a slit domain: `δ_U`, corkscrew
//! radii and the measured uniformity constant of a few curves.
//!
//!     cargo run --example domain_geometry

use mmd_extension::domains::{best_corkscrew, find_uniform_curve, DomainSpec};
use mmd_extension::mmspace::{CatalogSpec, Space};

fn main() -> mmd_extension::Result<()> {
    let spec = CatalogSpec::grid(33, 33);
    let s = Space::from_catalog(&spec)?;
    for d in [DomainSpec::HalfGrid, DomainSpec::Slit { length: 16 }] {
        let dom = d.build(&spec, &s)?;
        println!(
            "{d:?}: |U| = {}, |∂U| = {}, |V| = {}, diam U = {}",
            dom.u.len(),
            dom.boundary.len(),
            dom.v.len(),
            dom.diameter_u(&s)
        );
        let top = 32 * 33 + 16;
        println!("  δ_U at top middle = {}", dom.delta_u[top]);
        if let Some(&xi) = dom.boundary.as_slice().get(dom.boundary.len() / 2) {
            let (rho, z) = best_corkscrew(&s, &dom, xi, 8.0)?;
            println!("  corkscrew at ξ = {xi}, r = 8: δ_U(z) = {rho}, z = {z:?}");
        }
    }

    // Around the slit tip the best curve must bend; far from it the geodesic is fine.
    let dom = DomainSpec::Slit { length: 16 }.build(&spec, &s)?;
    let v = |x: usize, y: usize| y * 33 + x;
    for (a, b) in [((4, 28), (28, 28)), ((12, 2), (20, 2)), ((15, 0), (17, 0))] {
        let c = find_uniform_curve(&s, &dom, v(a.0, a.1), v(b.0, b.1), 4.0)?;
        println!(
            "curve {a:?} -> {b:?}: length {}, diam {}, A = {:.3}",
            c.length, c.diam, c.measured_a
        );
    }
    Ok(())
}
