//! Builds every catalog space, prints its size and doubling constant, and
//! round-trips one through JSON.
//!
//!     cargo run --example build_spaces

use mmd_extension::mmspace::{CatalogSpec, Space, VertexSet};

fn main() -> mmd_extension::Result<()> {
    let specs = [
        CatalogSpec::path(16),
        CatalogSpec::grid(17, 17),
        CatalogSpec::gasket(4),
        CatalogSpec::carpet(2),
    ];
    println!("{:<28} {:>6} {:>6} {:>8} {:>8} {:>8}", "space", "|X|", "|E|", "m(X)", "diam", "D0");
    for spec in &specs {
        let s = Space::from_catalog(spec)?;
        let all = VertexSet::all(s.len());
        let d = s.doubling_constant(&all, &[1.0, 2.0, 4.0, 8.0])?;
        println!(
            "{:<28} {:>6} {:>6} {:>8.1} {:>8.2} {:>8.3}",
            format!("{spec:?}").split_whitespace().next().unwrap_or(""),
            s.len(),
            s.edges().len(),
            s.total_measure(),
            s.diameter(),
            d.constant
        );
    }

    let s = Space::from_catalog(&CatalogSpec::gasket(2))?;
    let back = Space::from_json(&s.to_json()?)?;
    assert_eq!(back.len(), s.len());
    let ball = s.ball(0, 2.0)?;
    println!("gasket(2): B(0, 2) has {} vertices, measure {}", ball.members.len(), s.mass(ball.members));
    let net = s.rnet(&VertexSet::all(s.len()), 2.0, &[])?;
    println!("gasket(2): greedy 2-net {net:?}");
    Ok(())
}
