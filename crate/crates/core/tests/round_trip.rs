//! Serialized covers, reflection maps, partitions and operators reproduce the
//! checks of the objects they were written from.

use mmd_extension::dirichlet::{partition_checks, partition_of_unity, Partition};
use mmd_extension::domains::DomainSpec;
use mmd_extension::extension::{extend, extension_checks, ExtensionOperator};
use mmd_extension::family::{boundary_sample, standard_family};
use mmd_extension::mmspace::{CatalogSpec, ScaleFunction, Space};
use mmd_extension::reflection::{build_reflection, validate_reflection, ReflectionMap};
use mmd_extension::report::CheckReport;
use mmd_extension::whitney::{build_whitney, validate_whitney, Side, WhitneyCover};

fn same(a: &CheckReport, b: &CheckReport) {
    assert_eq!(a.records.len(), b.records.len());
    for (x, y) in a.records.iter().zip(&b.records) {
        assert_eq!(x.check, y.check);
        assert_eq!(x.pass, y.pass);
        assert!(x.measured.to_bits() == y.measured.to_bits() || (x.measured.is_nan() && y.measured.is_nan()), "{}", x.check);
    }
}

#[test]
fn pipeline_objects_round_trip() {
    let spec = CatalogSpec::grid(17, 17);
    let s = Space::from_catalog(&spec).unwrap();
    let s2 = Space::from_json(&s.to_json().unwrap()).unwrap();
    let dom = DomainSpec::HalfGrid.build(&spec, &s).unwrap();
    let psi = ScaleFunction::diffusive();
    let eps = 1.0 / 30.0;

    let cr = build_whitney(&s, &dom, Side::Interior, eps).unwrap();
    let cs = build_whitney(&s, &dom, Side::Exterior, eps).unwrap();
    let cr2 = WhitneyCover::from_json(&s2, &dom, &cr.to_json().unwrap()).unwrap();
    let cs2 = WhitneyCover::from_json(&s2, &dom, &cs.to_json().unwrap()).unwrap();
    same(&validate_whitney(&s, &cr), &validate_whitney(&s2, &cr2));
    same(&validate_whitney(&s, &cs), &validate_whitney(&s2, &cs2));

    let refl = build_reflection(&s, &dom, &cr, &cs, 2.0).unwrap();
    let refl2 = ReflectionMap::from_json(&refl.to_json().unwrap()).unwrap();
    assert_eq!(refl.pairs, refl2.pairs);
    let samples: Vec<_> = boundary_sample(&dom, 4).into_iter().map(|x| (x, 4.0)).collect();
    same(
        &validate_reflection(&s, &dom, &refl, &cs, &cr, &samples),
        &validate_reflection(&s2, &dom, &refl2, &cs2, &cr2, &samples),
    );

    let part = partition_of_unity(&s, &dom, &cs).unwrap();
    let part2 = Partition::from_json(&part.to_json().unwrap()).unwrap();
    same(&partition_checks(&s, &cs, &part, &psi), &partition_checks(&s2, &cs2, &part2, &psi));

    let op = ExtensionOperator::new(&dom, &cr, &refl, &part).unwrap();
    let op2 = ExtensionOperator::from_json(&dom, &op.to_json().unwrap()).unwrap();
    let family = standard_family(&s, &dom, 8, 4).unwrap();
    let locations: Vec<_> = boundary_sample(&dom, 3).into_iter().map(|x| (x, 2.0)).collect();
    let a = extension_checks(&s, &op, &family, &psi, &locations, 3.0).unwrap();
    let b = extension_checks(&s2, &op2, &family, &psi, &locations, 3.0).unwrap();
    same(&a.report, &b.report);
    for (_, f) in &family {
        assert_eq!(extend(&s, &op, f).unwrap(), extend(&s2, &op2, f).unwrap());
    }
}
