use curvcone::cones::{min_form, ConeFamily, FamilyKind, MinFormOptions};
use curvcone::curvop::{model_operator, ModelOperatorTag};

fn main() {
    let cyl = model_operator(ModelOperatorTag::SphereCrossLine(5)).unwrap();
    let fam = ConeFamily::new(FamilyKind::FullSO, 5).unwrap();
    let mut o = MinFormOptions::with_seed(2);
    o.starts = 1;
    let rep = min_form(&cyl, &fam, &o).unwrap();
    eprintln!("min_form: min {:.3e} conv {:.2}", rep.min_value, rep.converged_fraction);
}
