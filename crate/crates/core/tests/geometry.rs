mod common;

use common::{assert_close, even_vertices, pp_project_bruteforce};
use l2box::geometry::{
    pp_contains, project_box, project_pp, project_sphere, ParityPolytopeSpec, SphereSpec, PP_MEMBERSHIP_TOL,
};
use proptest::prelude::*;

fn point(max_d: usize, spread: f64) -> impl Strategy<Value = Vec<f64>> {
    (2..=max_d).prop_flat_map(move |d| prop::collection::vec(-spread..1.0 + spread, d))
}

#[test]
fn oracle_reproduces_pinned_projections() {
    assert_close(&pp_project_bruteforce(&[1.0, 1.0, 1.0]), &[2.0 / 3.0; 3], 1e-9);
    assert_close(&pp_project_bruteforce(&[0.6, 0.2, 0.1]), &[0.5, 0.3, 0.2], 1e-9);
    assert_close(&pp_project_bruteforce(&[0.9, 0.1]), &[0.5, 0.5], 1e-9);
    assert_close(&pp_project_bruteforce(&[1.0, 0.0, 1.0, 0.0]), &[1.0, 0.0, 1.0, 0.0], 1e-12);
}

#[test]
fn small_dimensions() {
    assert_eq!(project_pp(&[0.7], ParityPolytopeSpec::new(1)), vec![0.0]);
    assert_close(&project_pp(&[0.9, 0.1], ParityPolytopeSpec::new(2)), &[0.5, 0.5], 1e-12);
    assert_close(&project_pp(&[0.9, 0.7], ParityPolytopeSpec::new(2)), &[0.8, 0.8], 1e-12);
}

#[test]
fn corners_on_sphere_interior_points_inside() {
    for n in 1..=8usize {
        let spec = SphereSpec::new(n);
        for v in (0u32..1 << n).map(|m| (0..n).map(|i| f64::from((m >> i) & 1)).collect::<Vec<_>>()) {
            assert_eq!(SphereSpec::offset_norm_squared(&v), spec.radius_squared());
        }
        assert!(SphereSpec::offset_norm_squared(&vec![0.3; n]) < spec.radius_squared());
    }
}

proptest! {
    #[test]
    fn matches_oracle(v in point(6, 0.5)) {
        let spec = ParityPolytopeSpec::new(v.len());
        let p = project_pp(&v, spec);
        let q = pp_project_bruteforce(&v);
        for (a, b) in p.iter().zip(&q) {
            prop_assert!((a - b).abs() < 1e-6, "{:?} vs {:?}", p, q);
        }
    }

    #[test]
    fn idempotent_and_inside(v in point(9, 1.0)) {
        let spec = ParityPolytopeSpec::new(v.len());
        let p = project_pp(&v, spec);
        prop_assert!(pp_contains(&p, spec, PP_MEMBERSHIP_TOL));
        let pp = project_pp(&p, spec);
        for (a, b) in p.iter().zip(&pp) {
            prop_assert!((a - b).abs() < 1e-9);
        }
    }

    #[test]
    fn nonexpansive((u, v) in (2usize..9).prop_flat_map(|d| (
        prop::collection::vec(-1.0..2.0f64, d),
        prop::collection::vec(-1.0..2.0f64, d),
    ))) {
        let spec = ParityPolytopeSpec::new(u.len());
        let (pu, pv) = (project_pp(&u, spec), project_pp(&v, spec));
        let d_in: f64 = u.iter().zip(&v).map(|(a, b)| (a - b).powi(2)).sum();
        let d_out: f64 = pu.iter().zip(&pv).map(|(a, b)| (a - b).powi(2)).sum();
        prop_assert!(d_out <= d_in + 1e-12);
    }

    #[test]
    fn variational_inequality(v in point(8, 1.0)) {
        let spec = ParityPolytopeSpec::new(v.len());
        let p = project_pp(&v, spec);
        for w in even_vertices(v.len()) {
            let s: f64 = v.iter().zip(&p).zip(&w).map(|((vi, pi), wi)| (vi - pi) * (wi - pi)).sum();
            prop_assert!(s <= 1e-8, "vertex {:?}: {}", w, s);
        }
    }

    /// Flipping an even number of coordinates and permuting both preserve
    /// the polytope, so the projection must commute with them.
    #[test]
    fn symmetry_equivariant(v in point(8, 0.5), flip_seed in any::<u32>(), rot in 0usize..8) {
        let d = v.len();
        let spec = ParityPolytopeSpec::new(d);
        let mut flips: Vec<bool> = (0..d).map(|i| (flip_seed >> i) & 1 == 1).collect();
        if flips.iter().filter(|&&f| f).count() % 2 == 1 {
            flips[0] = !flips[0];
        }
        let apply = |x: &[f64]| -> Vec<f64> {
            let f: Vec<f64> = x.iter().zip(&flips).map(|(&a, &fl)| if fl { 1.0 - a } else { a }).collect();
            (0..d).map(|i| f[(i + rot) % d]).collect()
        };
        let lhs = project_pp(&apply(&v), spec);
        let rhs = apply(&project_pp(&v, spec));
        for (a, b) in lhs.iter().zip(&rhs) {
            prop_assert!((a - b).abs() < 1e-9);
        }
    }

    #[test]
    fn box_projection_is_clamp(v in prop::collection::vec(-3.0..3.0f64, 1..20)) {
        let p = project_box(&v);
        for (a, b) in p.iter().zip(&v) {
            prop_assert_eq!(*a, b.clamp(0.0, 1.0));
        }
    }

    #[test]
    fn sphere_projection_lands_on_sphere(v in prop::collection::vec(-3.0..3.0f64, 1..64)) {
        let spec = SphereSpec::new(v.len());
        let p = project_sphere(&v, spec);
        let r2 = SphereSpec::offset_norm_squared(&p);
        prop_assert!((r2 - spec.radius_squared()).abs() <= 1e-9 * v.len() as f64);
    }

    /// Inside the box, the sphere is touched only at binary points.
    #[test]
    fn sphere_and_box_meet_at_corners(v in prop::collection::vec(0.0..=1.0f64, 1..64)) {
        let spec = SphereSpec::new(v.len());
        let on_sphere = (SphereSpec::offset_norm_squared(&v) - spec.radius_squared()).abs() <= 1e-12;
        let binary = v.iter().all(|&x| x == 0.0 || x == 1.0);
        prop_assert_eq!(on_sphere, binary);
    }
}
