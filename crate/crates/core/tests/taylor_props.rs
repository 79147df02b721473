mod common;

use num_complex::Complex64;
use proptest::prelude::*;

use algpath::interval::{CPoint, ComplexBox, PrecisionContext, RealInterval};
use algpath::taylor::TaylorModel;
use common::{box_contains, Cq};

fn build(cs: &[(f64, f64, f64)], dom: &RealInterval<f64>) -> (TaylorModel<f64>, Vec<ComplexBox<f64>>) {
    let ctx = PrecisionContext::fixed64();
    let boxes: Vec<ComplexBox<f64>> = cs
        .iter()
        .map(|&(a, b, r)| ComplexBox::point(&CPoint::new(a, b)).inflate(&r, &ctx))
        .collect();
    (TaylorModel::new(boxes.clone(), dom.clone()).unwrap(), boxes)
}

fn member(cs: &[(f64, f64, f64)], picks: &[(f64, f64)]) -> Vec<Cq> {
    cs.iter()
        .zip(picks)
        .map(|(&(a, b, r), &(s, t))| Cq::from_complex(Complex64::new(a + s * r * 0.99, b + t * r * 0.99)))
        .collect()
}

fn at(c: &[Cq], eta: f64) -> Cq {
    let e = Cq::from_complex(Complex64::new(eta, 0.0));
    c.iter().rev().fold(Cq::zero(), |acc, a| acc.mul(&e).add(a))
}

proptest! {
    #[test]
    fn arithmetic_encloses_members(
        order in 1usize..4,
        h in 0.01f64..1.0,
        eta_frac in 0f64..1.0,
        seed in any::<u64>(),
    ) {
        let random_model = |k: u64| {
            let mut rng = common::Lcg(seed ^ k);
            let cs: Vec<(f64, f64, f64)> = (0..order + 2)
                .map(|_| (rng.range(-3.0, 3.0), rng.range(-3.0, 3.0), rng.range(0.0, 0.1)))
                .collect();
            let picks: Vec<(f64, f64)> = (0..order + 2).map(|_| (rng.range(-1.0, 1.0), rng.range(-1.0, 1.0))).collect();
            (cs, picks)
        };
        let ctx = PrecisionContext::fixed64();
        let dom = RealInterval::new(0.0, h);
        let (cp, pp) = random_model(1);
        let (cq, pq) = random_model(2);
        let (p, _) = build(&cp, &dom);
        let (q, _) = build(&cq, &dom);
        let (fp, fq) = (member(&cp, &pp), member(&cq, &pq));
        let eta = (eta_frac * h).min(h);
        let (vp, vq) = (at(&fp, eta), at(&fq, eta));
        let point = RealInterval::point(eta);

        prop_assert!(box_contains(&p.range(&point, &ctx).unwrap(), &vp));
        prop_assert!(box_contains(&p.range(&dom, &ctx).unwrap(), &vp));
        prop_assert!(box_contains(&p.add(&q, &ctx).unwrap().range(&point, &ctx).unwrap(), &vp.add(&vq)));
        prop_assert!(box_contains(&p.sub(&q, &ctx).unwrap().range(&point, &ctx).unwrap(), &vp.sub(&vq)));
        prop_assert!(box_contains(&p.mul(&q, &ctx).unwrap().range(&dom, &ctx).unwrap(), &vp.mul(&vq)));
        prop_assert!(box_contains(&p.squeeze(&ctx).unwrap().range(&point, &ctx).unwrap(), &vp));
        prop_assert!(box_contains(&p.eval_point(&eta, &ctx).unwrap(), &vp));
    }

}

#[test]
fn models_reject_foreign_domains() {
    let ctx = PrecisionContext::fixed64();
    let (p, _) = build(&[(1.0, 0.0, 0.0), (0.0, 0.0, 0.0), (0.0, 0.0, 0.0)], &RealInterval::new(0.0, 0.5));
    let (q, _) = build(&[(1.0, 0.0, 0.0), (0.0, 0.0, 0.0), (0.0, 0.0, 0.0)], &RealInterval::new(0.0, 0.25));
    assert!(p.add(&q, &ctx).is_err());
    assert!(p.range(&RealInterval::new(0.0, 1.0), &ctx).is_err());
}
