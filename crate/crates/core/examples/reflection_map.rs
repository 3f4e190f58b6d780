//! The reflection map from exterior to interior Whitney balls on the
//! half-grid, with its validation report.
//!
//!     cargo run --example reflection_map

use mmd_extension::domains::DomainSpec;
use mmd_extension::family::boundary_sample;
use mmd_extension::mmspace::{CatalogSpec, Space};
use mmd_extension::reflection::{build_reflection, k0, truncation_radius, validate_reflection};
use mmd_extension::whitney::{build_whitney, Side};

fn main() -> mmd_extension::Result<()> {
    let spec = CatalogSpec::grid(33, 33);
    let s = Space::from_catalog(&spec)?;
    let dom = DomainSpec::HalfGrid.build(&spec, &s)?;
    let (eps, a) = (0.1, 2.0);
    let cr = build_whitney(&s, &dom, Side::Interior, eps)?;
    let cs = build_whitney(&s, &dom, Side::Exterior, eps)?;
    let refl = build_reflection(&s, &dom, &cr, &cs, a)?;
    println!(
        "ε = {eps}, A = {a}: k0 = {:.3}, truncation radius = {:.3} (diam U = {})",
        k0(eps, a),
        truncation_radius(eps, a, dom.diameter_u(&s)),
        dom.diameter_u(&s)
    );
    println!(
        "{} of {} exterior balls mapped, {} excluded, at most {} to 1",
        refl.pairs.len(),
        cs.len(),
        refl.excluded.len(),
        refl.k_to_1(cr.len())
    );
    for &(si, ri) in refl.pairs.iter().take(5) {
        let (b, q) = (&cs.balls[si], &cr.balls[ri]);
        println!(
            "  S{si} (center {}, r {:.3}) -> R{ri} (center {}, r {:.3}), d = {}",
            b.center,
            b.radius,
            q.center,
            q.radius,
            s.distance(b.center, q.center)
        );
    }
    let samples: Vec<_> = boundary_sample(&dom, 6).into_iter().flat_map(|x| [(x, 4.0), (x, 8.0)]).collect();
    let rep = validate_reflection(&s, &dom, &refl, &cs, &cr, &samples);
    for r in &rep.records {
        if !r.check.starts_with("reflection.localization") {
            println!("    {:<32} {:>10.4} {}", r.check, r.measured, if r.pass { "ok" } else { "FAIL" });
        }
    }
    println!("all reflection checks pass: {}", rep.all_pass());
    Ok(())
}
