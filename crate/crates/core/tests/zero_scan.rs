//! Zero-finder integration tests against independent oracles on the actual
//! Davenport-Heilbronn-type function (polynomial cases live in the unit
//! tests).

use dhfun::characters::CharacterGroup;
use dhfun::dh::DhSpec;
use dhfun::zeros::{find_zeros, refine_newton, winding_number, SearchRect};
use dhfun::{Complex64, Error, EvalParams};

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn q5_spec() -> DhSpec {
    DhSpec::build(&CharacterGroup::new(5).character(1)).unwrap()
}

/// Σ_{n≥2} |c_n| n^{−σ} < 1 for σ ≥ 4 forces |f − 1| < 1: no zeros there.
#[test]
fn tail_bound_excludes_zeros_right_of_4() {
    let spec = q5_spec();
    let sec_theta = 1.0 / spec.theta().cos();
    // ζ(4) − 1 bounds Σ_{n≥2} n^{−4}; every |c_n| ≤ sec θ.
    let zeta4_minus_1 = std::f64::consts::PI.powi(4) / 90.0 - 1.0;
    let bound = sec_theta * zeta4_minus_1;
    assert!(bound < 1.0, "tail bound {bound}");

    let params = EvalParams::default();
    let f = spec.evaluator(&params);
    let rect = SearchRect::new(4.0, 6.0, 0.0, 10.0);
    assert_eq!(winding_number(&f, &rect).unwrap(), 0);
    let report = find_zeros(&f, &rect, 1e-9).unwrap();
    assert!(report.zeros.is_empty());
    assert!(report.unresolved.is_empty());
}

/// Dense-grid |f| minima refined by Newton as an independent census of the
/// window [85, 86.5], compared against the winding count and the scanner.
#[test]
fn dense_grid_census_85_86_5() {
    let spec = q5_spec();
    let params = EvalParams::default();
    let f = spec.evaluator(&params);
    let rect = SearchRect::new(-1.0, 2.0, 85.0, 86.5);

    let w = winding_number(&f, &rect).unwrap();
    let report = find_zeros(&f, &rect, 1e-9).unwrap();
    assert!(report.unresolved.is_empty());

    let (nx, ny) = (46usize, 24usize);
    let mut census: Vec<Complex64> = Vec::new();
    let mut values = vec![vec![0.0f64; ny]; nx];
    let mut points = vec![vec![c(0.0, 0.0); ny]; nx];
    for i in 0..nx {
        for j in 0..ny {
            let s = c(
                rect.sigma_min + rect.width() * i as f64 / (nx - 1) as f64,
                rect.t_min + rect.height() * j as f64 / (ny - 1) as f64,
            );
            points[i][j] = s;
            values[i][j] = f(s).unwrap().norm();
        }
    }
    for i in 1..nx - 1 {
        for j in 1..ny - 1 {
            let v = values[i][j];
            let is_min = (i - 1..=i + 1).all(|a| (j - 1..=j + 1).all(|b| values[a][b] >= v));
            if is_min && v < 1.0 {
                if let Ok(rec) = refine_newton(&f, points[i][j], 1e-9) {
                    if rect.contains(rec.location)
                        && !census.iter().any(|z| (z - rec.location).norm() < 1e-6)
                    {
                        census.push(rec.location);
                    }
                }
            }
        }
    }

    assert_eq!(w as usize, census.len(), "winding vs census");
    assert_eq!(report.zeros.len(), census.len(), "scanner vs census");
    for z in &census {
        assert!(
            report.zeros.iter().any(|r| (r.location - z).norm() < 1e-7),
            "census zero {z} missing from scan"
        );
    }
}

/// Every reported zero is stable under re-refinement from perturbed seeds.
#[test]
fn zeros_stable_under_perturbed_reseeding() {
    let spec = q5_spec();
    let params = EvalParams::default();
    let f = spec.evaluator(&params);
    let rect = SearchRect::new(-1.0, 2.0, 85.0, 86.5);
    let report = find_zeros(&f, &rect, 1e-9).unwrap();
    assert!(!report.zeros.is_empty());
    for rec in &report.zeros {
        for k in 0..10 {
            let angle = 2.0 * std::f64::consts::PI * k as f64 / 10.0;
            let seed = rec.location + Complex64::from_polar(1e-4, angle);
            let again = refine_newton(&f, seed, 1e-9).unwrap();
            assert!(
                (again.location - rec.location).norm() < 1e-9,
                "reseeded zero moved: {} vs {}",
                again.location,
                rec.location
            );
        }
    }
}

/// Newton from a region where |f − 1| < 1 must fail rather than fabricate.
#[test]
fn newton_fails_away_from_zeros() {
    let spec = q5_spec();
    let params = EvalParams::default();
    let f = spec.evaluator(&params);
    match refine_newton(&f, c(4.0, 5.0), 1e-9) {
        Err(Error::NonConvergent { .. }) => {}
        Ok(rec) => {
            // If it converged it must have left the zero-free half-plane.
            assert!(rec.location.re < 4.0, "fabricated zero at {}", rec.location);
        }
        Err(e) => panic!("unexpected error {e}"),
    }
}

/// An on-critical-line zero mirrors to itself.
#[test]
fn online_zero_mirror_is_itself() {
    let spec = q5_spec();
    let params = EvalParams::default();
    let f = spec.evaluator(&params);
    let rect = SearchRect::new(-1.0, 2.0, 87.0, 88.0);
    let report = dhfun::zeros::find_zeros(&f, &rect, 1e-9).unwrap();
    let online: Vec<_> = report.zeros.iter().filter(|r| r.on_critical_line).collect();
    assert!(!online.is_empty());
    for rec in online {
        let with_mirror = dhfun::zeros::mirror_check(&spec, rec, &params, 1e-9).unwrap();
        let m = with_mirror.mirror.unwrap();
        assert!((m - rec.location).norm() < 1e-7, "{m} vs {}", rec.location);
    }
}

/// The off-line pair near t = 85.7 also has a derivative zero strictly
/// between its real parts.
#[test]
fn derivative_zero_between_85_7_pair() {
    let spec = q5_spec();
    let params = EvalParams::default();
    let f = spec.evaluator(&params);
    let rect = SearchRect::new(-1.0, 2.0, 85.5, 86.0);
    let report = dhfun::zeros::find_zeros(&f, &rect, 1e-9).unwrap();
    assert_eq!(report.zeros.len(), 2);
    let (a, b) = (report.zeros[0].location, report.zeros[1].location);
    let dz = dhfun::zeros::derivative_zero_between(&spec, (a, b), &params).unwrap();
    let (lo, hi) = if a.re < b.re {
        (a.re, b.re)
    } else {
        (b.re, a.re)
    };
    assert!(
        dz.re > lo && dz.re < hi,
        "sigma {} outside ({lo}, {hi})",
        dz.re
    );
    assert!((dz.im - a.im).abs() <= 0.05);
}

/// A degenerate "pair" on the critical line is rejected.
#[test]
fn derivative_zero_rejects_degenerate_pair() {
    let spec = q5_spec();
    let params = EvalParams::default();
    let z = c(0.5, 87.647476);
    assert!(matches!(
        dhfun::zeros::derivative_zero_between(&spec, (z, z), &params),
        Err(Error::InvalidMirrorPair(_, _))
    ));
}

/// Launching a trace from the branch point itself (a zero of f') stalls with
/// the branch flag rather than inventing a direction.
#[test]
fn trace_from_branch_point_stalls() {
    let spec = q5_spec();
    let params = EvalParams::default();

    // The derivative zero between the t = 176.7 pair is a branch point.
    let rect = SearchRect::new(-1.0, 2.0, 176.0, 177.4);
    let f = spec.evaluator(&params);
    let report = dhfun::zeros::find_zeros(&f, &rect, 1e-9).unwrap();
    let off: Vec<_> = report
        .zeros
        .iter()
        .filter(|r| (r.location.re - 0.5).abs() > 0.05)
        .collect();
    assert_eq!(off.len(), 2);
    let branch =
        dhfun::zeros::derivative_zero_between(&spec, (off[0].location, off[1].location), &params)
            .unwrap();

    // Aim the ray at whatever argument f takes there, so the seed passes the
    // on-curve precheck; the stalled trace must flag the branch point.
    let phi = spec.eval(branch, &params).unwrap().arg();
    let curve = dhfun::rays::trace_preimage(&f, branch, phi, 1e-2, &rect).unwrap();
    assert!(
        curve.start_termination == dhfun::rays::Termination::BranchPoint
            || curve.end_termination == dhfun::rays::Termination::BranchPoint,
        "terminations: {:?} / {:?}",
        curve.start_termination,
        curve.end_termination
    );
    assert!(!curve.branch_points.is_empty());
}

/// The scanner's mirror format on the classical first off-line pair.
#[test]
fn spira_pair_has_expected_shape() {
    let spec = q5_spec();
    let params = EvalParams::default();
    let f = spec.evaluator(&params);
    let rect = SearchRect::new(-1.0, 2.0, 85.5, 86.0);
    let report = find_zeros(&f, &rect, 1e-9).unwrap();
    // Exactly the two off-line zeros live in this slice.
    assert_eq!(report.zeros.len(), 2);
    let a = report.zeros[0].location;
    let b = report.zeros[1].location;
    assert!((a.im - b.im).abs() < 1e-9);
    assert!((a.re + b.re - 1.0).abs() < 1e-9);
    assert!((a.re - 0.5).abs() > 0.05);
}
