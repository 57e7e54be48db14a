//! One line per acceptance criterion. Exits non-zero when a criterion fails
//! unexpectedly or a known failure starts passing.

mod common;

use std::f64::consts::E;
use std::time::Instant;

use common::*;
use nsframes::config::Analysis;
use nsframes::family::{analysis_window, translate_frame_bounds, GeneratorFamily};
use nsframes::operator::{
    biorthogonality_check, dual_commutation_check, dual_frame_bounds, independence_test, shift_operator_check,
    CanonicalDual,
};
use nsframes::oracle::{discretized_frame_bounds, Grid};
use nsframes::report::{run, Command};
use nsframes::systems::{reciprocal_step_bounds, reciprocal_step_family, wavelet_diagnostics};
use nsframes::FrameError;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Criteria that cannot hold for a faithful implementation; each is
/// explained in the decisions log and still reported.
const KNOWN_FAILURES: &[u32] = &[5];

type Check = std::result::Result<String, String>;
type Criterion = (u32, &'static str, fn() -> Check);

fn ensure(ok: bool, detail: String) -> Check {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn criterion_1() -> Check {
    let out = run(&fixture_config("two_window_gabor.toml"), Command::Gabor).map_err(|e| e.to_string())?;
    let b = out.report.bounds.ok_or("no bounds block")?;
    let err = (b.alpha - 6.5).abs().max((b.beta - 26.0).abs());
    ensure(err <= 1e-9, format!("bounds ({}, {}), error {err:e}", b.alpha, b.beta))
}

fn criterion_2() -> Check {
    let r = run(&fixture_config("tiling.toml"), Command::Analyze).map_err(|e| e.to_string())?.report;
    let d = r.density.ok_or("no density")?;
    let b = r.bounds.ok_or("no bounds")?;
    let note = r.discrepancies.iter().any(|n| n.claim == "parseval");
    let first = d.ess_range == [4.0, 4.0]
        && (b.alpha - 2.0).abs() <= 1e-12
        && (b.beta - 2.0).abs() <= 1e-12
        && b.tight
        && !b.parseval
        && note;
    let n = run(&fixture_config("tiling_normalized.toml"), Command::Analyze).map_err(|e| e.to_string())?.report;
    let nb = n.bounds.ok_or("no bounds")?;
    let second = (nb.alpha - 1.0).abs() <= 1e-12 && (nb.beta - 1.0).abs() <= 1e-12 && nb.parseval;
    ensure(
        first && second,
        format!(
            "G range {:?}, bounds ({}, {}), parseval {}, note {}; normalized ({}, {}), parseval {}",
            d.ess_range, b.alpha, b.beta, b.parseval, note, nb.alpha, nb.beta, nb.parseval
        ),
    )
}

fn criterion_3() -> Check {
    let fam = two_window_family();
    let rel = |n: usize| -> std::result::Result<f64, String> {
        let o = discretized_frame_bounds(&fam, &Grid::new(0.0, 1.0, n).map_err(|e| e.to_string())?)
            .map_err(|e| e.to_string())?;
        Ok(((o.min_eig - 6.5) / 6.5).abs().max(((o.max_eig - 26.0) / 26.0).abs()))
    };
    let (coarse, fine) = (rel(1024)?, rel(4096)?);
    ensure(fine <= 0.02 && fine <= coarse, format!("relative error {coarse:e} at N=1024, {fine:e} at N=4096"))
}

fn criterion_4() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let mut commutation: f64 = 0.0;
    let mut dual_of_dual: f64 = 0.0;
    let mut bound_dev: f64 = 0.0;
    for (name, fam) in frame_fixtures() {
        let dual = CanonicalDual::new(&fam).map_err(|e| format!("{name}: {e}"))?;
        for (idx, g) in fam.section_generators(1) {
            for n in -2..=2 {
                commutation = commutation.max(dual_commutation_check(&fam, n, idx).map_err(|e| e.to_string())?);
            }
            let back = dual.dual_of_dual(idx).ok_or("missing generator")?;
            for _ in 0..1000 {
                let x = rng.gen_range(-4.0..4.0);
                dual_of_dual = dual_of_dual.max((back.eval(x) - g.eval(x)).norm());
            }
        }
        let d = dual_frame_bounds(&fam).map_err(|e| e.to_string())?;
        let b = translate_frame_bounds(&fam).map_err(|e| e.to_string())?;
        bound_dev =
            bound_dev.max((d.extremized.lower - 1.0 / b.upper).abs()).max((d.extremized.upper - 1.0 / b.lower).abs());
    }
    ensure(
        commutation <= 1e-8 && dual_of_dual <= 1e-10 && bound_dev <= 1e-6,
        format!("commutation {commutation:e}, dual of dual {dual_of_dual:e}, dual bounds deviation {bound_dev:e}"),
    )
}

fn criterion_5() -> Check {
    let mut cfg = fixture_config("two_window_gabor.toml");
    cfg.finite_section.sections = Some(vec![[4, 4], [8, 8], [16, 16]]);
    cfg.finite_section.test_functions = 5;
    let r = run(&cfg, Command::FiniteSection).map_err(|e| e.to_string())?.report;
    let fs = r.finite_section.ok_or("no sweep")?;
    let err_at = |s: usize| fs.rows.iter().find(|x| x.s == s).and_then(|x| x.max_coeff_err).unwrap_or(f64::NAN);
    let (e4, e16) = (err_at(4), err_at(16));
    let bounded = fs.summary.iter().all(|s| s.bounded);
    let sups: Vec<String> = fs
        .summary
        .iter()
        .map(|s| format!("{}: sup {:.3e} vs final {:.3e}", s.j, s.observed_sup, s.final_value))
        .collect();
    ensure(
        e16 <= 1e-2 && e16 < e4 && bounded,
        format!("coefficient error {e4:.3e} at (4,4), {e16:.3e} at (16,16); {}", sups.join(", ")),
    )
}

fn criterion_6() -> Check {
    let (s, t) = (2, 1);
    let mut parts = Vec::new();
    let mut ok = true;
    for (name, fam) in [("shannon", shannon()), ("tiling", tiling(2.0))] {
        let dev = biorthogonality_check(&fam, s, t).map_err(|e| e.to_string())?;
        let ind = independence_test(&fam, s, t).map_err(|e| e.to_string())?;
        ok &= dev <= 1e-9 && ind.is_independent;
        parts.push(format!("{name} deviation {dev:.1e} rank {}/{}", ind.rank, ind.dim));
    }
    let dup = duplicated();
    let dev = biorthogonality_check(&dup, s, t).map_err(|e| e.to_string())?;
    let ind = independence_test(&dup, s, t).map_err(|e| e.to_string())?;
    // one duplicated generator, repeated at each of the 2s+1 translates
    let duplicates = 2 * s + 1;
    let ill_posed = matches!(shift_operator_check(&dup, s, t), Err(FrameError::IllPosedOperator(_)));
    ok &= dev >= 0.4 && ind.deficiency == duplicates && ill_posed;
    parts.push(format!(
        "duplicated deviation {dev:.3}, deficiency {} of {duplicates} duplicates, ill-posed {ill_posed}",
        ind.deficiency
    ));
    ensure(ok, parts.join("; "))
}

fn criterion_7() -> Check {
    let mut worst: f64 = 0.0;
    for fam in [shannon(), tiling(2.0), tiling(2f64.sqrt())] {
        for (s, t) in [(2, 1), (3, 2)] {
            worst = worst.max(shift_operator_check(&fam, s, t).map_err(|e| e.to_string())?);
        }
    }
    ensure(worst <= 1e-8, format!("largest residual {worst:e}"))
}

fn criterion_8() -> Check {
    let fam = tiling(2.0);
    let r = reciprocal_step_bounds(&fam).map_err(|e| e.to_string())?;
    let err = (r.bounds.lower - 8.0).abs().max((r.bounds.upper - 8.0).abs());
    let rfam: GeneratorFamily = reciprocal_step_family(&fam).map_err(|e| e.to_string())?;
    let (lo, hi) = analysis_window(&fam).map_err(|e| e.to_string())?;
    let o = discretized_frame_bounds(&rfam, &Grid::new(lo, hi, 1024).map_err(|e| e.to_string())?)
        .map_err(|e| e.to_string())?;
    let oracle = ((o.min_eig - 8.0) / 8.0).abs().max(((o.max_eig - 8.0) / 8.0).abs());
    let mut cfg = fixture_config("two_window_gabor.toml");
    cfg.analyses = Some(vec![Analysis::Rescaling]);
    let warned =
        run(&cfg, Command::Gabor).map_err(|e| e.to_string())?.report.warnings.iter().any(|w| w.contains("λ > 1"));
    ensure(
        err <= 1e-9 && oracle <= 0.02 && warned,
        format!(
            "bounds ({}, {}), oracle relative error {oracle:e}, λ > 1 warning {warned}",
            r.bounds.lower, r.bounds.upper
        ),
    )
}

fn criterion_9() -> Check {
    let p = dyadic_wavelet();
    let wide = wavelet_diagnostics(&p, 0.5, 60.0, None).map_err(|e| e.to_string())?;
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let mut worst: f64 = 0.0;
    for _ in 0..100 {
        let g = rng.gen_range(0.6..20.0);
        worst = worst.max((wide.eval(E * g) - wide.eval(g) / E).abs());
    }
    let gap = wavelet_diagnostics(&p, 2.0, E, None).map_err(|e| e.to_string())?;
    let measure_err = (gap.zero_set_measure - (E - 2.0)).abs();
    let caveat = gap.warnings.iter().any(|w| w.contains("no global lower frame bound"));
    ensure(
        worst <= 1e-10 && measure_err <= 1e-9 && gap.sup == 0.0 && caveat,
        format!(
            "self-similarity {worst:e}, zero set measure {} (error {measure_err:e}), caveat {caveat}",
            gap.zero_set_measure
        ),
    )
}

fn main() {
    let criteria: [Criterion; 9] = [
        (1, "two-window Gabor bounds", criterion_1),
        (2, "half-step tiling and its Parseval claim", criterion_2),
        (3, "discretized oracle agreement", criterion_3),
        (4, "canonical dual", criterion_4),
        (5, "finite-section convergence", criterion_5),
        (6, "Riesz and biorthogonality", criterion_6),
        (7, "shift-operator equivalence", criterion_7),
        (8, "reciprocal-step rescaling", criterion_8),
        (9, "wavelet diagnostics", criterion_9),
    ];
    let start = Instant::now();
    let mut unexpected = 0;
    for (k, name, check) in criteria {
        let t = Instant::now();
        let result = check();
        let known = KNOWN_FAILURES.contains(&k);
        let (tag, detail) = match (&result, known) {
            (Ok(d), false) => ("PASS", d),
            (Ok(d), true) => {
                unexpected += 1;
                ("PASS (listed as a known failure)", d)
            }
            (Err(d), true) => ("FAIL (known)", d),
            (Err(d), false) => {
                unexpected += 1;
                ("FAIL", d)
            }
        };
        println!("criterion {k} [{name}]: {tag} in {:.2}s: {detail}", t.elapsed().as_secs_f64());
    }
    println!("acceptance finished in {:.1}s, {unexpected} unexpected", start.elapsed().as_secs_f64());
    if unexpected > 0 {
        std::process::exit(1);
    }
}
