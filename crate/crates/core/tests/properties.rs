mod common;

use eframes::eframe::{AnalysisMap, EFrame};
use eframes::hilbert::{
    c, hermitian_bounds, inner, invert_operator, pseudoinverse, r, CMatrix, COperator, CScalar,
    CVector, DEFAULT_TOL,
};
use eframes::mapping::VectorSequence;
use eframes::neumann::neumann_corrected_dual;
use eframes::random::{complex_gaussian, gaussian_matrix, rng_for};
use proptest::prelude::*;

use common::{random_instance, random_mapping, random_sequence};

fn cvec(parts: &[(f64, f64)]) -> CVector {
    CVector::new(parts.iter().map(|&(re, im)| c(re, im)).collect()).unwrap()
}

fn pair_strategy(dim: usize) -> impl Strategy<Value = Vec<(f64, f64)>> {
    prop::collection::vec((-10.0..10.0f64, -10.0..10.0f64), dim)
}

fn close(a: CScalar, b: CScalar, tol: f64) -> bool {
    (a - b).norm() <= tol * (1.0 + a.norm().max(b.norm()))
}

fn mat_close(a: &CMatrix, b: &CMatrix, tol: f64) -> bool {
    (a - b).norm() <= tol * (1.0 + a.norm().max(b.norm()))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn inner_product_is_hermitian_and_linear_in_first(
        (u, v, w) in (1usize..7).prop_flat_map(|d| (pair_strategy(d), pair_strategy(d), pair_strategy(d))),
        a in (-3.0..3.0f64, -3.0..3.0f64),
    ) {
        let (u, v, w) = (cvec(&u), cvec(&v), cvec(&w));
        let a = c(a.0, a.1);
        prop_assert!(close(inner(&u, &v).unwrap(), inner(&v, &u).unwrap().conj(), 1e-12));
        let lhs = inner(&(&u.scale(a) + &w), &v).unwrap();
        let rhs = a * inner(&u, &v).unwrap() + inner(&w, &v).unwrap();
        prop_assert!(close(lhs, rhs, 1e-12));
        prop_assert!(inner(&u, &u).unwrap().im.abs() <= 1e-12 * (1.0 + u.norm().powi(2)));
    }

    #[test]
    fn adjoint_is_an_involution_and_moves_across_inner(seed in any::<u64>(), d in 1usize..7) {
        let mut rng = rng_for(seed, 0);
        let a = COperator::from_matrix(gaussian_matrix(&mut rng, d, d)).unwrap();
        prop_assert_eq!(a.adjoint().adjoint(), a.clone());
        let u = CVector::from_dvector(gaussian_matrix(&mut rng, d, 1).column(0).into_owned());
        let v = CVector::from_dvector(gaussian_matrix(&mut rng, d, 1).column(0).into_owned());
        let lhs = inner(&a.apply(&u).unwrap(), &v).unwrap();
        let rhs = inner(&u, &a.adjoint().apply(&v).unwrap()).unwrap();
        prop_assert!(close(lhs, rhs, 1e-12));
    }

    #[test]
    fn hermitian_bounds_sandwich_quadratic_form(seed in any::<u64>(), d in 1usize..7) {
        let mut rng = rng_for(seed, 1);
        let b = gaussian_matrix(&mut rng, d, d);
        let a = COperator::from_matrix(&b + b.adjoint()).unwrap();
        let bounds = hermitian_bounds(&a, DEFAULT_TOL).unwrap();
        let scale = bounds.lo.abs().max(bounds.hi.abs()).max(1.0);
        for _ in 0..10 {
            let f = CVector::from_dvector(gaussian_matrix(&mut rng, d, 1).column(0).into_owned());
            let q = inner(&a.apply(&f).unwrap(), &f).unwrap().re;
            let n2 = f.norm().powi(2);
            prop_assert!(bounds.lo * n2 <= q + 1e-10 * scale * n2);
            prop_assert!(q <= bounds.hi * n2 + 1e-10 * scale * n2);
        }
    }

    #[test]
    fn inverse_has_small_residual(seed in any::<u64>(), d in 1usize..7) {
        let mut rng = rng_for(seed, 2);
        let m = CMatrix::identity(d, d) * c(3.0, 0.0) + gaussian_matrix(&mut rng, d, d);
        let a = COperator::from_matrix(m).unwrap();
        if let Ok(inv) = invert_operator(&a, 1e-8) {
            let prod = a.compose(&inv).unwrap();
            prop_assert!(prod.distance(&COperator::identity(d)).unwrap() <= 1e-10);
        }
    }

    #[test]
    fn pseudoinverse_satisfies_penrose_identities(
        seed in any::<u64>(),
        rows in 1usize..6,
        cols in 1usize..8,
        rank_cut in 0usize..3,
    ) {
        let mut rng = rng_for(seed, 3);
        let k = rows.min(cols).saturating_sub(rank_cut).max(1);
        let a = gaussian_matrix(&mut rng, rows, k) * gaussian_matrix(&mut rng, k, cols);
        let p = pseudoinverse(&a, 1e-10);
        prop_assert!(mat_close(&(&a * &p * &a), &a, 1e-9));
        prop_assert!(mat_close(&(&p * &a * &p), &p, 1e-9));
        let ap = &a * &p;
        let pa = &p * &a;
        prop_assert!(mat_close(&ap, &ap.adjoint(), 1e-9));
        prop_assert!(mat_close(&pa, &pa.adjoint(), 1e-9));
    }

    #[test]
    fn mapping_round_trip_linearity_and_operator_commutation(seed in any::<u64>(), d in 1usize..5, n in 1usize..9) {
        let mut rng = rng_for(seed, 4);
        let e = random_mapping(&mut rng, n);
        let x = random_sequence(&mut rng, d, n);
        let y = random_sequence(&mut rng, d, n);
        let a = complex_gaussian(&mut rng);
        let back = e.apply_inverse(&e.apply(&x).unwrap()).unwrap();
        prop_assert!(back.max_deviation(&x).unwrap() <= 1e-9 * (1.0 + x.norm()));

        let lhs = e.apply(&x.scale(a).add(&y).unwrap()).unwrap();
        let rhs = e.apply(&x).unwrap().scale(a).add(&e.apply(&y).unwrap()).unwrap();
        prop_assert!(lhs.max_deviation(&rhs).unwrap() <= 1e-10 * (1.0 + lhs.norm()));

        let w = COperator::from_matrix(gaussian_matrix(&mut rng, d, d)).unwrap();
        let lhs = e.apply(&x.map_operator(&w).unwrap()).unwrap();
        let rhs = e.apply(&x).unwrap().map_operator(&w).unwrap();
        prop_assert!(lhs.max_deviation(&rhs).unwrap() <= 1e-10 * (1.0 + lhs.norm()));
    }

    #[test]
    fn frame_operator_factors_through_synthesis(seed in any::<u64>(), index in 0u64..1000) {
        let inst = random_instance(seed, index);
        let frame = &inst.frame;
        let mut rng = rng_for(seed, index + 10_000);
        let f = CVector::from_dvector(gaussian_matrix(&mut rng, inst.dim, 1).column(0).into_owned());
        let coeffs = frame.analysis(&f).unwrap();
        for (k, x) in frame.images().items().iter().enumerate() {
            prop_assert!(close(coeffs.entries()[k], inner(&f, x).unwrap(), 1e-12));
        }
        let via_t = frame.synthesis().apply(&coeffs).unwrap();
        let via_s = frame.frame_operator().apply(&f).unwrap();
        prop_assert!(via_t.distance(&via_s).unwrap() <= 1e-10 * (1.0 + via_s.norm()));
    }

    #[test]
    fn frame_and_controlled_inequalities(seed in any::<u64>(), index in 0u64..1000) {
        let inst = random_instance(seed, index);
        let rec = inst.frame.analyze(DEFAULT_TOL);
        let cb = inst.cf.bounds();
        let mut rng = rng_for(seed, index + 20_000);
        for _ in 0..5 {
            let f = CVector::from_dvector(gaussian_matrix(&mut rng, inst.dim, 1).column(0).into_owned());
            let n2 = f.norm().powi(2);
            let energy: f64 = inst.frame.analysis(&f).unwrap().entries().iter().map(|z| z.norm_sqr()).sum();
            let slack = 1e-10 * rec.bounds.hi * n2;
            prop_assert!(rec.bounds.lo * n2 <= energy + slack);
            prop_assert!(energy <= rec.bounds.hi * n2 + slack);

            let q = inner(&inst.cf.frame_operator().apply(&f).unwrap(), &f).unwrap().re;
            let slack = 1e-10 * cb.hi * n2;
            prop_assert!(cb.lo * n2 <= q + slack);
            prop_assert!(q <= cb.hi * n2 + slack);
        }
    }

    #[test]
    fn offset_duals_round_trip(seed in any::<u64>(), index in 0u64..1000) {
        let inst = random_instance(seed, index);
        let v = inst.cf.random_null_map(seed).unwrap();
        let phi = inst.cf.dual_offset_family(&v, DEFAULT_TOL).unwrap();
        let cert = inst.cf.verify_dual(&phi, 20, seed, 1e-9).unwrap();
        prop_assert!(cert.verdict, "residual {}", cert.max_residual);
        let back = inst.cf.extract_null_map(&phi, 1e-9).unwrap();
        prop_assert!(v.distance(&back).unwrap() <= 1e-8 * v.norm().max(1.0));
    }

    #[test]
    fn parseval_families_are_self_dual(seed in any::<u64>(), index in 0u64..1000) {
        let inst = random_instance(seed, index);
        let s_inv = invert_operator(&inst.frame.frame_operator(), 1e-12).unwrap();
        let herm = (s_inv.matrix() + s_inv.matrix().adjoint()) * c(0.5, 0.0);
        let u = COperator::from_matrix(herm).unwrap();
        let cf = eframes::controlled::ControlledEFrame::new(inst.frame.clone(), u, DEFAULT_TOL).unwrap();
        prop_assert!(cf.is_parseval(1e-9));
        let cert = cf.verify_dual(cf.psi(), 20, seed, 1e-9).unwrap();
        prop_assert!(cert.verdict);
    }
}

/// The series-corrected dual agrees with `(D T_UE*)^-1 phi` computed by a
/// dense inverse, on 50 perturbed duals with ratio at most 0.9.
#[test]
fn neumann_matches_dense_inverse() {
    let mut checked = 0;
    let mut index = 0;
    while checked < 50 {
        let inst = random_instance(0x4e75, index);
        index += 1;
        let cf = &inst.cf;
        let canonical = cf.canonical_dual().unwrap();
        let mut rng = rng_for(0x4e75, index + 5_000);
        let noise = random_sequence(&mut rng, inst.dim, inst.count);
        let size = 0.3 * canonical.norm() / noise.norm();
        let phi = canonical.add(&noise.scale(r(size))).unwrap();
        let ratio = eframes::neumann::contraction_ratio(cf, &phi).unwrap();
        if ratio > 0.9 {
            continue;
        }
        let (fixed, report) = neumann_corrected_dual(cf, &phi, 1e-14, 10_000).unwrap();
        assert!(report.converged);

        let d_e = eframes::eframe::SynthesisMap::from_sequence(&cf.mapping().apply(&phi).unwrap());
        let m = COperator::from_matrix(d_e.matrix() * cf.synthesis().matrix().adjoint()).unwrap();
        let dense = phi
            .map_operator(&invert_operator(&m, 1e-12).unwrap())
            .unwrap();
        let dev = fixed.max_deviation(&dense).unwrap();
        assert!(
            dev <= 1e-9 * dense.norm(),
            "deviation {dev} at ratio {ratio}"
        );
        checked += 1;
    }
}

#[test]
fn riesz_family_images_are_v_of_basis() {
    for i in 0..10 {
        let mut rng = rng_for(0x7e, i);
        let d = 2 + (i as usize % 4);
        let e = random_mapping(&mut rng, d);
        let v = COperator::from_matrix(
            CMatrix::identity(d, d) + gaussian_matrix(&mut rng, d, d) * c(0.3, 0.0),
        )
        .unwrap();
        let basis = VectorSequence::new(
            &(0..d)
                .map(|j| CVector::basis(d, j).unwrap())
                .collect::<Vec<_>>(),
        )
        .unwrap();
        let fam = eframes::eframe::riesz_family(&v, &e, &basis, DEFAULT_TOL).unwrap();
        let images = EFrame::new(e, fam).unwrap().images().clone();
        let expected = basis.map_operator(&v).unwrap();
        assert!(images.max_deviation(&expected).unwrap() <= 1e-10);
    }
}

#[test]
fn null_maps_are_annihilated() {
    for i in 0..20 {
        let inst = random_instance(0xa11, i);
        let v: AnalysisMap = inst.cf.random_null_map(i).unwrap();
        let tv = inst.cf.synthesis().compose_analysis(&v).unwrap();
        assert!(tv.frobenius_norm() <= 1e-10 * (1.0 + v.norm()));
    }
}
