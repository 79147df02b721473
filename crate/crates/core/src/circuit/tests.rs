use num_complex::Complex64;

use super::*;
use crate::interval::{BoxVector, CPoint, RealInterval};

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn fx() -> PrecisionContext {
    PrecisionContext::fixed64()
}

fn compile(src: &str) -> Circuit {
    parse_system(src).unwrap().to_circuit().unwrap()
}

#[test]
fn parse_univariate_and_evaluate() {
    let f = compile("vars: x\nx^2 - 2");
    assert_eq!(f.evaluate(&PointArithmetic, &[c(1.0, 1.0)]).unwrap(), vec![c(-2.0, 2.0)]);
    assert_eq!(f.evaluate(&PointArithmetic, &[c(1.5, 0.0)]).unwrap(), vec![c(0.25, 0.0)]);
}

#[test]
fn parse_two_outputs() {
    let f = compile("vars: x y\nx*y\nx + y");
    assert_eq!(f.n_outputs(), 2);
    let v = f.evaluate(&PointArithmetic, &[c(2.0, 0.0), c(3.0, 0.0)]).unwrap();
    assert_eq!(v, vec![c(6.0, 0.0), c(5.0, 0.0)]);
}

#[test]
fn parse_coefficient_forms() {
    let s = parse_system("vars: x y # comment\n(1.5-2i)*x^2 y + 3 * x - .5 + (i)\n-x").unwrap();
    assert_eq!(s.polys[0].len(), 4);
    assert_eq!(s.polys[0][0].coeff, c(1.5, -2.0));
    assert_eq!(s.polys[0][0].exps, vec![2, 1]);
    assert_eq!(s.polys[0][2].coeff, c(-0.5, 0.0));
    assert_eq!(s.polys[0][3].coeff, c(0.0, 1.0));
    assert_eq!(s.polys[1][0].coeff, c(-1.0, 0.0));
}

#[test]
fn parse_errors_carry_positions() {
    assert!(matches!(
        parse_system("vars: x\nx + z"),
        Err(Error::UnknownVariable { line: 2, column: 5, .. })
    ));
    assert!(matches!(
        parse_system("vars: x\nx + + 1"),
        Err(Error::Syntax { line: 2, column: 5, .. })
    ));
    assert!(matches!(parse_system("x^2"), Err(Error::Syntax { line: 1, .. })));
    assert_eq!(parse_system("vars: x\n"), Err(Error::EmptySystem));
    assert_eq!(parse_system("vars:\nx"), Err(Error::EmptySystem));
    assert!(parse_system("vars: x\n(1+2i").is_err());
}

#[test]
fn text_round_trip() {
    let src = "vars: x y\nparam: t\n(0.1-3e-20i)*x^3*y + t*y - 7\n2 x y^2 + (i)";
    let s = parse_system(src).unwrap();
    assert_eq!(parse_system(&s.to_text()).unwrap(), s);
    assert_eq!(s.n_inputs(), 3);
    // parameter is input 0
    assert_eq!(s.polys[0][1].exps, vec![1, 0, 1]);
}

#[test]
fn box_evaluation_encloses_range() {
    let f = compile("vars: x\nx^2 - 2");
    let x = ComplexBox::real(RealInterval::new(1.4, 1.5));
    let y = f.evaluate(&BoxArithmetic::new(&fx()), &[x]).unwrap();
    assert!(y[0].re.contains(&-0.04) && y[0].re.contains(&0.25));
    assert!(y[0].im.contains(&0.0));
}

#[test]
fn point_result_lies_in_singleton_box_result() {
    let f = compile("vars: x y\n(0.3+0.7i) x^3 y - 1.1 y^2 + 0.9\nx y - (2-1i)");
    let p = [c(0.37, -1.2), c(-0.81, 0.44)];
    let v = f.evaluate(&PointArithmetic, &p).unwrap();
    let boxes: Vec<ComplexBox<f64>> = p.iter().map(|&z| ComplexBox::from_complex(z)).collect();
    let b = f.evaluate(&BoxArithmetic::new(&fx()), &boxes).unwrap();
    for (z, bx) in v.iter().zip(&b) {
        assert!(bx.re.contains(&z.re) || bx.width(&fx()) > 0.0);
        assert!(bx.width(&fx()) < 1e-14);
        let err = (bx.mid(&fx()).to_complex() - z).norm();
        assert!(err < 1e-14);
    }
}

#[test]
fn derivatives_by_forward_mode() {
    let f = compile("vars: x\nx^2 - 2");
    let d = f.differentiate(&[0]).unwrap();
    assert_eq!(d.n_outputs(), 2);
    assert_eq!(d.evaluate(&PointArithmetic, &[c(3.0, 0.0)]).unwrap()[1], c(6.0, 0.0));

    let g = compile("vars: x y\nx*y");
    let d = g.differentiate(&[0, 1]).unwrap();
    let v = d.evaluate(&PointArithmetic, &[c(2.0, 0.0), c(3.0, 0.0)]).unwrap();
    assert_eq!(v, vec![c(6.0, 0.0), c(3.0, 0.0), c(2.0, 0.0)]);
}

#[test]
fn derivative_of_constant_output_is_zero() {
    let f = compile("vars: x y\n5\nx");
    let d = f.differentiate(&[0, 1]).unwrap();
    let v = d.evaluate(&PointArithmetic, &[c(2.0, 0.0), c(3.0, 0.0)]).unwrap();
    assert_eq!(&v[2..], &[c(0.0, 0.0), c(0.0, 0.0), c(1.0, 0.0), c(0.0, 0.0)]);
}

#[test]
fn differentiate_rejects_bad_index() {
    assert!(compile("vars: x\nx").differentiate(&[1]).is_err());
}

#[test]
fn specialization_binds_parameter() {
    let f = compile("vars: x\nparam: t\nx^2 - 1 - t");
    let at0 = f.specialize(c(0.0, 0.0)).unwrap();
    assert_eq!(at0.evaluate(&PointArithmetic, &[c(1.0, 0.0)]).unwrap(), vec![c(0.0, 0.0)]);

    let t = ComplexBox::real(RealInterval::new(0.0, 1.0));
    let bound = f.specialize(t).unwrap();
    let y = bound.evaluate(&BoxArithmetic::new(&fx()), &[ComplexBox::one()]).unwrap();
    assert!(RealInterval::new(-1.0, 0.0).is_subset_of(&y[0].re));

    assert_eq!(
        Circuit::new(vec![Node::Const(c(1.0, 0.0))], vec![0], 0)
            .unwrap()
            .specialize(0.0)
            .err(),
        Some(Error::NotParametric)
    );
}

#[test]
fn circuit_validation() {
    assert!(Circuit::new(vec![Node::Add(0, 0)], vec![0], 0).is_err());
    assert!(Circuit::new(vec![Node::Input(1)], vec![0], 1).is_err());
    assert!(Circuit::new(vec![Node::Input(0)], vec![1], 1).is_err());
    assert!(Circuit::new(vec![Node::Const(c(f64::NAN, 0.0))], vec![0], 0).is_err());
}

#[test]
fn dead_code_and_common_subexpressions() {
    let mut b = CircuitBuilder::new(1);
    let x = b.input(0);
    let p = b.mul(x, x);
    let q = b.mul(x, x);
    let s = b.add(p, q);
    b.output(s);
    b.output(x);
    let f = b.build().unwrap();
    let g = f.deduplicated();
    assert_eq!(g.size(), 3);
    let h = f.select_outputs(&[1]).unwrap();
    assert_eq!(h.size(), 1);
    let z = [c(0.5, -2.0)];
    assert_eq!(
        g.evaluate(&PointArithmetic, &z).unwrap(),
        f.evaluate(&PointArithmetic, &z).unwrap()
    );
}

#[test]
fn degrees() {
    let f = compile("vars: x y\nparam: t\nt*x^3*y + 1\nx + t^4");
    assert_eq!(f.output_degrees(&[1, 2]), vec![4, 1]);
}

#[test]
fn lipschitz_of_single_nodes() {
    let mut b = CircuitBuilder::new(2);
    let (x, y) = (b.input(0), b.input(1));
    let s = b.add(x, y);
    b.output(s);
    let add = b.build().unwrap();
    assert_eq!(add.lipschitz_bound(1.0).constant(), 2.0 * (1.0 + 1e-12));
    assert_eq!(add.lipschitz_bound(4.0).constant(), 8.0 * (1.0 + 1e-12));

    let mut b = CircuitBuilder::new(2);
    let (x, y) = (b.input(0), b.input(1));
    let p = b.mul(x, y);
    b.output(p);
    let mul = b.build().unwrap();
    assert_eq!(mul.lipschitz_bound(1.0).constant(), 8.0 * (1.0 + 1e-12));
}

#[test]
fn lipschitz_bound_dominates_sampled_widths() {
    let f = compile("vars: x\nx^2 - 2");
    let l = f.lipschitz_bound(4.0).constant();
    let ctx = fx();
    let u = ctx.u_prec();
    let mut seed = 12345u64;
    let mut next = || {
        seed = seed.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
        (seed >> 11) as f64 / (1u64 << 53) as f64
    };
    for _ in 0..1000 {
        let (a, b) = (2.0 * next() - 1.0, 2.0 * next() - 1.0);
        let w = next() * 0.5;
        let x = ComplexBox::new(RealInterval::new(a, a + w), RealInterval::new(b, b + w));
        let bx = BoxVector::new(vec![x.clone()]);
        let y = f.evaluate(&BoxArithmetic::new(&ctx), &[x]).unwrap();
        let wy = BoxVector::new(y).width(&ctx);
        assert!(wy <= l * (bx.width(&ctx) + u));
    }
}

#[test]
fn parametric_system_pieces() {
    let f = compile("vars: x y\nparam: t\nx^2 - 1 - t\nt*x*y - 1");
    let sys = ParametricSystem::new(f).unwrap();
    let t = c(0.5, 0.0);
    let x = [c(2.0, 0.0), c(3.0, 0.0)];
    assert_eq!(sys.eval_point(t, &x).unwrap(), vec![c(2.5, 0.0), c(2.0, 0.0)]);
    assert_eq!(
        sys.eval_point_df(t, &x).unwrap(),
        vec![c(4.0, 0.0), c(0.0, 0.0), c(1.5, 0.0), c(1.0, 0.0)]
    );
    assert_eq!(sys.eval_point_fdot(t, &x).unwrap(), vec![c(-1.0, 0.0), c(6.0, 0.0)]);

    let ctx = fx();
    let spec = sys.at_f64::<f64>(0.5);
    let xb = BoxVector::from_points(&[CPoint::new(2.0, 0.0), CPoint::new(3.0, 0.0)]);
    let df = spec.eval_df(&xb, &ctx).unwrap();
    assert!(df.get(1, 0).contains(&CPoint::new(1.5, 0.0)));
    assert!(spec.eval_fdot(&xb, &ctx).unwrap().0[1].contains(&CPoint::new(6.0, 0.0)));

    assert!(matches!(
        ParametricSystem::new(compile("vars: x\nx")),
        Err(Error::EmptySystem)
    ));
    assert!(System::new(compile("vars: x y\nx")).is_err());
}
