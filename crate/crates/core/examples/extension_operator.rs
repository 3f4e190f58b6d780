//! Builds the extension operator `E_Q` on the half-grid and evaluates its
//! scale-invariant bounds over the standard test family.
//!
//!     cargo run --example extension_operator

use mmd_extension::dirichlet::{energy, partition_checks, partition_of_unity};
use mmd_extension::domains::DomainSpec;
use mmd_extension::extension::{extend, extension_checks, ExtensionOperator};
use mmd_extension::family::{boundary_sample, smooth_fields, standard_family};
use mmd_extension::mmspace::{CatalogSpec, ScaleFunction, Space};
use mmd_extension::reflection::build_reflection;
use mmd_extension::whitney::{build_whitney, Side};

fn main() -> mmd_extension::Result<()> {
    let spec = CatalogSpec::grid(33, 33);
    let s = Space::from_catalog(&spec)?;
    let dom = DomainSpec::HalfGrid.build(&spec, &s)?;
    let psi = ScaleFunction::diffusive();
    // Small ε keeps the reflected balls' 6-dilates inside the exterior band.
    let eps = 1.0 / 30.0;
    let cr = build_whitney(&s, &dom, Side::Interior, eps)?;
    let cs = build_whitney(&s, &dom, Side::Exterior, eps)?;
    let refl = build_reflection(&s, &dom, &cr, &cs, 2.0)?;
    let part = partition_of_unity(&s, &dom, &cs)?;
    println!("partition checks pass: {}", partition_checks(&s, &cs, &part, &psi).all_pass());
    let op = ExtensionOperator::new(&dom, &cr, &refl, &part)?;
    println!("{} terms", op.terms.len());

    let (_, f) = smooth_fields(&s, 1, 7)?.remove(0);
    let ef = extend(&s, &op, f.values())?;
    println!("E(f) = {:.4} on X, E(f|U) on U = {:.4}", energy(&s, ef.values()), {
        let u: Vec<f64> = (0..s.len()).map(|x| if dom.u.contains(x) { f[x] } else { 0.0 }).collect();
        energy(&s, &u)
    });

    let family = standard_family(&s, &dom, 12, 1)?;
    let locations: Vec<_> = boundary_sample(&dom, 5).into_iter().flat_map(|x| [(x, 2.0), (x, 3.0)]).collect();
    let check = extension_checks(&s, &op, &family, &psi, &locations, 3.0)?;
    let m = check.maxima;
    println!(
        "maxima: local energy {:.4}, local L2 {:.4}, global {:.4}, variance {:.4}",
        m.local_energy, m.local_l2, m.global, m.variance
    );
    println!("checks: {} records, all pass: {}", check.report.records.len(), check.report.all_pass());
    Ok(())
}
