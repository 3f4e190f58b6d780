//! Negative control: near a slit tip the best uniformity constant grows as the
//! endpoints approach the slit, while for the half-grid it settles.
//!
//!     cargo run --release --example slit_control

use mmd_extension::domains::{find_uniform_curve, DomainSpec};
use mmd_extension::mmspace::{CatalogSpec, Space};

fn main() -> mmd_extension::Result<()> {
    let n = 65i64;
    let spec = CatalogSpec::grid(n, n);
    let s = Space::from_catalog(&spec)?;
    let slit = DomainSpec::Slit { length: 32 }.build(&spec, &s)?;
    let half = DomainSpec::HalfGrid.build(&spec, &s)?;
    let idx = |x: i64, y: i64| (y * n + x) as usize;
    println!("{:>4} {:>10} {:>10}", "d", "A slit", "A half");
    for d in [16i64, 8, 4, 2, 1] {
        let a = find_uniform_curve(&s, &slit, idx(32 - d, 0), idx(32 + d, 0), 1.0)?.measured_a;
        let b = find_uniform_curve(&s, &half, idx(16, 32 + d), idx(48, 32 + d), 1.0)?.measured_a;
        println!("{d:>4} {a:>10.3} {b:>10.3}");
    }
    Ok(())
}
