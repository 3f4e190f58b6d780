//! Interior and exterior ε-Whitney covers of the half-grid, their validation
//! report, the Whitney graph, and a chain from a central ball.
//!
//!     cargo run --example whitney_cover

use mmd_extension::domains::DomainSpec;
use mmd_extension::mmspace::{CatalogSpec, Space};
use mmd_extension::whitney::{
    build_whitney, chain_checks, near_and_central, overlap_count, validate_whitney, whitney_graph, Side,
};

fn main() -> mmd_extension::Result<()> {
    let spec = CatalogSpec::grid(33, 33);
    let s = Space::from_catalog(&spec)?;
    let dom = DomainSpec::HalfGrid.build(&spec, &s)?;
    for side in [Side::Interior, Side::Exterior] {
        let cover = build_whitney(&s, &dom, side, 0.05)?;
        let rep = validate_whitney(&s, &cover);
        let g = whitney_graph(&s, &cover);
        println!(
            "{side:?}: {} balls, overlap {}, graph max degree {}, checks {}/{}",
            cover.len(),
            overlap_count(&s, &cover),
            g.max_degree(),
            rep.records.len() - rep.failures().count(),
            rep.records.len()
        );
        for r in rep.records.iter().take(6) {
            println!("    {:<32} {:>10.4} {}", r.check, r.measured, if r.pass { "ok" } else { "FAIL" });
        }
    }

    let cover = build_whitney(&s, &dom, Side::Interior, 0.05)?;
    let xi = 17 * 33 + 16;
    let nc = near_and_central(&s, &dom, &cover, xi, 8.0, 2.0)?;
    println!(
        "near balls of B(ξ = {xi}, 8): {}, central ball {} (covers ball: {})",
        nc.near.len(),
        nc.central,
        nc.covers_ball
    );
    let (chains, rep) = chain_checks(&s, &dom, &cover, &nc, 2.0)?;
    let longest = chains.iter().map(|c| c.length()).max().unwrap_or(0);
    println!("{} chains, longest {longest}, chain checks pass: {}", chains.len(), rep.all_pass());
    Ok(())
}
