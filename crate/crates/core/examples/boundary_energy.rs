//! Share of the energy of `E_Q f` carried by the boundary `∂U`, for a few
//! smooth fields across three refinements. The share decays with the mesh.
//!
//!     cargo run --release --example boundary_energy

use mmd_extension::dirichlet::partition_of_unity;
use mmd_extension::domains::DomainSpec;
use mmd_extension::extension::{boundary_energy, extend, ExtensionOperator};
use mmd_extension::family::smooth_fields;
use mmd_extension::mmspace::{CatalogSpec, Space};
use mmd_extension::reflection::build_reflection;
use mmd_extension::whitney::{build_whitney, Side};

fn main() -> mmd_extension::Result<()> {
    let eps = 1.0 / 30.0;
    let mut rows: Vec<(i64, Vec<f64>)> = Vec::new();
    for n in [17i64, 33, 65] {
        let spec = CatalogSpec::grid(n, n);
        let s = Space::from_catalog(&spec)?;
        let dom = DomainSpec::HalfGrid.build(&spec, &s)?;
        let cr = build_whitney(&s, &dom, Side::Interior, eps)?;
        let cs = build_whitney(&s, &dom, Side::Exterior, eps)?;
        let refl = build_reflection(&s, &dom, &cr, &cs, 2.0)?;
        let op = ExtensionOperator::new(&dom, &cr, &refl, &partition_of_unity(&s, &dom, &cs)?)?;
        let mut shares = Vec::new();
        // Same seed: the same continuum fields sampled on each grid.
        for (_, f) in smooth_fields(&s, 4, 3)? {
            let g = extend(&s, &op, f.values())?;
            shares.push(boundary_energy(&s, &dom, g.values())?.1);
        }
        rows.push((n, shares));
    }
    println!("{:>4} {}", "n", (0..4).map(|k| format!("{:>10}", format!("smooth_{k}"))).collect::<String>());
    for (n, shares) in &rows {
        println!("{n:>4} {}", shares.iter().map(|v| format!("{v:>10.5}")).collect::<String>());
    }
    Ok(())
}
