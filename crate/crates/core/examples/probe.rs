use qplate_core::qplate::{propagate_with, ConvForm, KernelMode, PropagationOptions, QPlateSpec};
use qplate_core::*;

fn rel_l2(a: &VectorField, b: &VectorField) -> f64 {
    let mut num = 0.0;
    let mut den = 0.0;
    for (x, y) in a.vx().iter().zip(b.vx().iter()) {
        num += (x - y).norm_sqr();
        den += y.norm_sqr();
    }
    for (x, y) in a.vy().iter().zip(b.vy().iter()) {
        num += (x - y).norm_sqr();
        den += y.norm_sqr();
    }
    (num / den).sqrt()
}

fn main() {
    for (dn, d) in [
        (0.0005, 130.0), (0.0005, 150.0), (0.0005, 170.0), (0.0005, 200.0),
        (0.001, 150.0), (0.002, 150.0),
    ] {
        let grid = Grid::new(64, 40.0).unwrap();
        let f = make_input_field(
            BeamSpec { lg: LgIndex::new(1, 0, 10.0).unwrap(), pol: JonesVector::circular_left() },
            grid,
        ).unwrap();
        let plate = QPlateSpec::new(1.0, 0.0);
        let m = UniaxialMedium::new(1.5, 1.5 + dn, d).unwrap();
        let opts_ir = PropagationOptions { conv_form: ConvForm::ImpulseResponse, ..Default::default() };
        let approx_ir = propagate_with(&f, &plate, &m, KernelMode::ApproxFresnel, &opts_ir).unwrap();
        let exact = propagate_with(&f, &plate, &m, KernelMode::ExactFresnel, &Default::default()).unwrap();
        println!("dn={dn} d={d}: exact_vs_ir={:.3e} E_exact={:.5}",
            rel_l2(&approx_ir, &exact), exact.energy() / f.energy());
    }
}
