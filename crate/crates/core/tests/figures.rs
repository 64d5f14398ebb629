use cavity_memory::cli::figures::{
    self, fig3_rows, log_space, point, FIG2_CASES, FIG2_KAPPA_P_OVER_KAPPA, FIG3_CASES, FIG3_COOPERATIVITY, FIG4_CASES,
    FIG4_COOPERATIVITIES,
};
use cavity_memory::metrics::quadrature_delta;
use cavity_memory::params::{ParamSet, Profile};
use cavity_memory::spectral::Quadrature;
use rayon::prelude::*;

fn figure_points() -> Vec<ParamSet> {
    let n = figures::DEFAULT_POINTS;
    let mut out = Vec::new();
    for case in &FIG2_CASES {
        out.extend(
            log_space(1.0, 100.0, n)
                .into_iter()
                .map(|c| point(c, 1.0, FIG2_KAPPA_P_OVER_KAPPA, Profile::Gaussian, case)),
        );
    }
    for profile in [Profile::Gaussian, Profile::Lorentzian] {
        for case in &FIG3_CASES {
            out.extend(log_space(0.01, 0.5, n).into_iter().map(|x| point(FIG3_COOPERATIVITY, 1.0, x, profile, case)));
        }
    }
    for c in FIG4_COOPERATIVITIES {
        for case in &FIG4_CASES {
            out.extend(
                log_space(0.1, 10.0, n)
                    .into_iter()
                    .map(|r| point(c, r, FIG2_KAPPA_P_OVER_KAPPA, Profile::Gaussian, case)),
            );
        }
    }
    out
}

#[test]
fn doubling_nodes_leaves_every_figure_point_converged() {
    let q = Quadrature::default();
    let points = figure_points();
    assert_eq!(points.len(), 183 + 366 + 549);
    let worst = points
        .par_iter()
        .map(|p| {
            let (c, pulse) = p.validate().unwrap();
            quadrature_delta(&c, &pulse, &q).unwrap()
        })
        .reduce(|| 0.0, f64::max);
    assert!(worst < 1e-10, "largest [h] change under doubling: {worst:e}");
}

#[test]
fn narrowest_fig3_pulse_is_nearly_perfect_for_both_profiles() {
    let rows = fig3_rows(&Quadrature::default(), figures::DEFAULT_POINTS).unwrap();
    for r in rows.iter().filter(|r| r.kappa_p_over_kappa == 0.01) {
        assert!(r.f_qm > 0.99, "{:?} {}: {}", r.profile, r.case, r.f_qm);
    }
}
