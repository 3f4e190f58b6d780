//! Cutoff Sobolev constants on the reflected half-grid (the closure of `U`
//! with its intrinsic metric), with capacitor potentials as cutoffs.
//!
//!     cargo run --release --example cutoff_sobolev

use mmd_extension::cli::run::central_vertex;
use mmd_extension::dirichlet::{css_check, FieldFunction};
use mmd_extension::domains::DomainSpec;
use mmd_extension::family::smooth_fields;
use mmd_extension::hke::reflected_space;
use mmd_extension::mmspace::{CatalogSpec, ScaleFunction, Space};

fn main() -> mmd_extension::Result<()> {
    let spec = CatalogSpec::grid(33, 33);
    let s = Space::from_catalog(&spec)?;
    let dom = DomainSpec::HalfGrid.build(&spec, &s)?;
    let (rs, to_ambient) = reflected_space(&s, &dom)?;
    println!("reflected space: {} vertices (ambient {})", rs.len(), s.len());
    let psi = ScaleFunction::diffusive();
    let mut family: Vec<FieldFunction> = smooth_fields(&rs, 12, 5)?.into_iter().map(|m| m.1).collect();
    family.push(FieldFunction::constant(rs.len(), 1.0));
    // One center on the boundary line, one in the middle.
    let on_boundary = to_ambient.iter().position(|&v| dom.boundary.contains(v) && v % 33 == 16).unwrap_or(0);
    for x in [on_boundary, central_vertex(&rs)] {
        for r in [4.0, 8.0] {
            let res = css_check(&rs, x, r, 2.0, &psi, &family)?;
            println!(
                "x = {x:>4} (ambient {:>4}), R = {r:>3}: C1 = {:.4}, cap = {:.4}{}",
                to_ambient[x],
                res.c1,
                res.capacity,
                if res.degenerate { " (degenerate)" } else { "" }
            );
        }
    }
    Ok(())
}
