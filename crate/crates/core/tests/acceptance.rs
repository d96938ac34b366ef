//! Acceptance criteria, one PASS/FAIL line each. Exits non-zero if any fails.

use std::io::Write;
use std::path::PathBuf;
use std::time::{Duration, Instant};

use fsa_core::asymptotics::{
    convergence_verdict, limsup_inv_norm, limsup_kappa, limsup_norm, limsup_pseudospectrum, GridSpec, NRange,
    QuantityKind, Settings, Verdict,
};
use fsa_core::catalog;
use fsa_core::expression::SectionIndex;
use fsa_core::format::ExperimentConfig;
use fsa_core::indicators::{stab_composed, stab_h, stab_shifted, IndicatorKind};
use fsa_core::matrix::{FiniteMatrix, Interval};
use fsa_core::parallel::Parallelism;
use fsa_core::scalar::{real, ExtReal, C64};
use fsa_core::spectral::estimators::{anchored_columns, operator_norm_estimate, windowed_lower_norm};
use fsa_core::spectral::norms::{inv_norm, kappa, mu, op_norm};
use fsa_core::spectral::pseudo::{pseudo_grid_matrix, GridBox, Resolution};
use fsa_core::spectral::sets::{hausdorff_distance, PointSet};
use fsa_core::{Exponent, FSExpression};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Check = std::result::Result<String, String>;

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> std::result::Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol
}

fn fin(v: ExtReal) -> f64 {
    v.finite().unwrap_or(f64::INFINITY)
}

fn configs_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../configs")
}

fn load(name: &str) -> ExperimentConfig {
    let path = configs_dir().join(name);
    let text = std::fs::read_to_string(&path).unwrap_or_else(|e| panic!("{}: {e}", path.display()));
    ExperimentConfig::from_json_str(&text).unwrap_or_else(|e| panic!("{name}: {e}"))
}

fn bundled() -> Vec<(String, ExperimentConfig)> {
    let mut names: Vec<String> = std::fs::read_dir(configs_dir())
        .expect("configs directory")
        .filter_map(|e| e.ok())
        .map(|e| e.file_name().to_string_lossy().into_owned())
        .filter(|n| n.ends_with(".json"))
        .collect();
    names.sort();
    names.into_iter().map(|n| (n.clone(), load(&n))).collect()
}

fn section(e: &FSExpression, n: u64) -> FiniteMatrix {
    e.finite_section(SectionIndex::new(n).unwrap()).unwrap()
}

fn settings() -> Settings {
    Settings { tol: 1e-9, m_max: 200, parallelism: Parallelism::Parallel }
}

/// Eigenvalue-free spectrum sample: real grid points where the smallest
/// singular value is at most one grid step.
fn sampled_real_spectrum(m: &FiniteMatrix, lo: f64, hi: f64, step: f64) -> PointSet {
    let nx = ((hi - lo) / step).round() as usize + 1;
    let bbox = GridBox::new(lo, hi, 0.0, 0.0).unwrap();
    let g = pseudo_grid_matrix(m, Exponent::Two, bbox, Resolution { nx, ny: 1 }, &[step], Parallelism::Sequential)
        .unwrap();
    g.sublevel_points(step)
}

fn criterion_1() -> Check {
    let start = Instant::now();
    let e = catalog::block_flip(0.3);
    let step = 0.01;
    for n in 2..=20u64 {
        let m = section(&e, n);
        let inv = fin(inv_norm(&m, Exponent::Two).unwrap());
        let k = fin(kappa(&m, Exponent::Two).unwrap());
        let (want_inv, spec): (f64, &[f64]) =
            if n % 2 == 0 { (1.0 / 0.7, &[-0.7, 1.0, 1.3]) } else { (10.0 / 3.0, &[-0.7, 0.3, 1.0, 1.3]) };
        ensure(close(inv, want_inv, 1e-9), || format!("n={n}: ‖F⁻¹‖ = {inv}, want {want_inv}"))?;
        ensure(close(k, 1.3 * want_inv, 1e-9), || format!("n={n}: κ = {k}, want {}", 1.3 * want_inv))?;
        let pts = sampled_real_spectrum(&m, -1.5, 2.0, step);
        let d = hausdorff_distance(&pts, &PointSet::from_reals(spec)).unwrap();
        ensure(d <= 2.0 * step, || format!("n={n}: sampled spectrum is {d} from {spec:?}"))?;
    }
    let t = start.elapsed();
    ensure(t < Duration::from_secs(5), || format!("took {t:?}"))?;
    Ok(format!("inverse norms, condition numbers and spectra for n = 2..20 in {:.2?}", t))
}

fn criterion_2() -> Check {
    let start = Instant::now();
    let e = catalog::kappa_a();
    let n_de = catalog::de_norm();
    for n in 2..=20u64 {
        let v = op_norm(&section(&e, n), Exponent::Two);
        let want = if n % 2 == 0 { n_de } else { 4.0 };
        ensure(close(v, want, 1e-9), || format!("n={n}: ‖Aₙ‖ = {v}, want {want}"))?;
    }
    let range = NRange::new(2, 20).unwrap();
    let s = settings();
    let k = limsup_kappa(&e, range, &s).map_err(|e| e.to_string())?;
    for (&n, &v) in &k.sequence_samples {
        if n % 2 == 1 {
            ensure(close(fin(v), 16.0, 1e-9), || format!("κ(A_{n}) = {v}"))?;
        }
    }
    ensure(close(fin(k.sequence_limsup), 16.0, 1e-9), || format!("limsup κ = {}", k.sequence_limsup))?;
    let norms = limsup_norm(&e, range, &s).map_err(|e| e.to_string())?;
    let invs = limsup_inv_norm(&e, range, &s).map_err(|e| e.to_string())?;
    let bounds = k.kappa.clone().unwrap();
    ensure(close(fin(norms.indicator_max.unwrap()), 4.0, 1e-9), || "max ‖B‖ ≠ 4".into())?;
    ensure(close(fin(invs.indicator_max.unwrap()), 4.0, 1e-9), || "max ‖B⁻¹‖ ≠ 4".into())?;
    ensure(close(fin(bounds.lower), 4.0 * n_de, 1e-9), || format!("max κ(B) = {}", bounds.lower))?;
    ensure(bounds.lower_is_strict && fin(bounds.lower) < fin(k.sequence_limsup), || "first inequality not strict".into())?;
    let de = FiniteMatrix::from_fn(Interval::new(0, 1).unwrap(), Interval::new(0, 1).unwrap(), |i, j| {
        real(catalog::DE_BLOCK[i as usize][j as usize])
    });
    let two = op_norm(&de, Exponent::Two);
    let frob = de.data().norm();
    ensure(3.0 < two && two <= frob && frob < 3.25, || format!("3 < {two} <= {frob} < 13/4 fails"))?;
    let t = start.elapsed();
    ensure(t < Duration::from_secs(10), || format!("took {t:?}"))?;
    Ok(format!("max κ(B) = 4N = {:.6} < limsup κ = 16 = 4·4; ‖DE‖₂ = {two:.6} in {t:.2?}", 4.0 * n_de))
}

fn criterion_3() -> Check {
    let e = catalog::kappa_b();
    let n_de = catalog::de_norm();
    let k = limsup_kappa(&e, NRange::new(2, 20).unwrap(), &settings()).map_err(|e| e.to_string())?;
    for (&n, &v) in &k.sequence_samples {
        ensure(close(fin(v), 4.0 * n_de, 1e-9), || format!("κ(A_{n}) = {v}, want 4N"))?;
    }
    let b = k.kappa.unwrap();
    ensure(close(fin(b.upper), 16.0, 1e-9), || format!("upper bound {}", b.upper))?;
    ensure(b.upper_is_strict && fin(k.sequence_limsup) < fin(b.upper), || "second inequality not strict".into())?;
    Ok(format!("κ(Aₙ) = 4N = {:.6} for n = 2..20 < upper bound 16", 4.0 * n_de))
}

fn criterion_4() -> Check {
    let mut line = Vec::new();
    for (file, mu, convergent) in [
        ("blockflip01.json", 0.1, false),
        ("blockflip03.json", 0.3, false),
        ("blockflip049.json", 0.49, false),
        ("blockflip05.json", 0.5, true),
        ("blockflip07.json", 0.7, true),
        ("blockflip09.json", 0.9, true),
    ] {
        let c = load(file);
        let s = Settings { tol: c.tol, m_max: c.m_max, parallelism: Parallelism::Sequential };
        let v = convergence_verdict(&c.expression, QuantityKind::InvNorm, &s, None).map_err(|e| e.to_string())?;
        let ok = if convergent { v.verdict.is_convergent() } else { v.verdict.is_divergent() };
        ensure(ok, || format!("mu = {mu}: {:?}", v.verdict))?;
        line.push(format!("{mu}:{}", if convergent { "C" } else { "D" }));
    }
    Ok(line.join(" "))
}

fn criterion_5() -> Check {
    let c = load("shiftedflip.json");
    for n in 2..=20u64 {
        let v = fin(inv_norm(&section(&c.expression, n), Exponent::Two).unwrap());
        ensure(close(v, 1.0, 1e-9), || format!("n={n}: ‖Aₙ⁻¹‖ = {v}"))?;
    }
    let s = Settings { parallelism: Parallelism::Parallel, ..settings() };
    let v = convergence_verdict(&c.expression, QuantityKind::InvNorm, &s, None).map_err(|e| e.to_string())?;
    ensure(v.verdict.is_convergent(), || format!("inverse norms: {:?}", v.verdict))?;
    let pseudo = c.pseudo.as_ref().unwrap();
    let a = limsup_pseudospectrum(&c.expression, 0.05, &pseudo.grid, NRange::new(2, 20).unwrap(), Parallelism::Parallel)
        .map_err(|e| e.to_string())?;
    let d = a.summary.sequence_residue_distances.get("0-1").copied().unwrap_or(ExtReal::Finite(0.0));
    ensure(d > ExtReal::Finite(0.8), || format!("even/odd distance {d}"))?;
    ensure(!a.summary.sequence_converges, || "sampled pseudospectra flagged as convergent".into())?;
    Ok(format!("‖Aₙ⁻¹‖ = 1 for n = 2..20, d_H(even, odd Sp_0.05) = {d}"))
}

fn criterion_6() -> Check {
    let mut worst_scalar: f64 = 0.0;
    let mut worst_cells: f64 = 0.0;
    for (name, c) in bundled() {
        let c = c.with_overrides(Some(40), None).map_err(|e| e.to_string())?;
        let s = Settings { tol: c.tol, m_max: c.m_max.min(200), parallelism: Parallelism::Parallel };
        for r in [limsup_norm(&c.expression, c.n_range, &s), limsup_inv_norm(&c.expression, c.n_range, &s)] {
            let r = r.map_err(|e| format!("{name}: {e}"))?;
            let d = r.discrepancy.unwrap_or(ExtReal::Infinite);
            ensure(d <= ExtReal::Finite(1e-6), || {
                format!("{name} {:?}: sequence {} vs indicators {:?}", r.quantity, r.sequence_limsup, r.indicator_max)
            })?;
            worst_scalar = worst_scalar.max(fin(d));
        }
        if let Some(p) = &c.pseudo {
            ensure(p.grid.resolution == Resolution { nx: 201, ny: 201 }, || format!("{name}: grid is not 201x201"))?;
            for &eps in &p.epsilons {
                let a = limsup_pseudospectrum(&c.expression, eps, &p.grid, c.n_range, Parallelism::Parallel)
                    .map_err(|e| format!("{name}: {e}"))?;
                let sm = &a.summary;
                ensure(sm.consistent, || {
                    format!("{name} ε={eps}: d_H = {} > {} ({} vs {} points)", sm.discrepancy, sm.tolerance,
                        sm.sequence_limsup_points, sm.indicator_union_points)
                })?;
                worst_cells = worst_cells.max(fin(sm.discrepancy) / sm.cell_diagonal);
            }
        }
    }
    Ok(format!("max scalar discrepancy {worst_scalar:.2e}; max set discrepancy {worst_cells:.2} cell diagonals"))
}

fn example_expressions() -> Vec<(String, FSExpression)> {
    bundled().into_iter().map(|(n, c)| (n, c.expression)).collect()
}

fn random_band(rng: &mut ChaCha8Rng, n: i64) -> FiniteMatrix {
    let w = Interval::new(0, n - 1).unwrap();
    let mut entries = std::collections::HashMap::new();
    for i in 0..n {
        for j in (i - 2).max(0)..=(i + 2).min(n - 1) {
            let z = C64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0));
            entries.insert((i, j), if i == j { z + 6.0 } else { z });
        }
    }
    FiniteMatrix::from_fn(w, w, |i, j| entries.get(&(i, j)).copied().unwrap_or_default())
}

fn criterion_7() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let examples = example_expressions();

    // window norms grow, tall-window lower norms shrink
    for (name, e) in &examples {
        let set = stab_composed(e).map_err(|x| x.to_string())?;
        for ind in &set.members {
            let cap = operator_norm_estimate(&ind.op, 1e-9, 200).value;
            let (mut prev_norm, mut prev_nu) = (0.0, f64::INFINITY);
            for m in 1..=24 {
                let cols = anchored_columns(ind.op.domain(), m);
                let v = op_norm(&ind.op.materialize(cols, cols), Exponent::Two);
                let nu = windowed_lower_norm(&ind.op, m);
                ensure(v >= prev_norm - 1e-12 && ExtReal::Finite(v) <= ExtReal::Finite(fin(cap) + 1e-9), || {
                    format!("{name} {}: window norm {v} after {prev_norm}", ind.label())
                })?;
                ensure(nu <= prev_nu + 1e-12, || format!("{name} {}: ν_{m} = {nu} > {prev_nu}", ind.label()))?;
                prev_norm = v;
                prev_nu = nu;
            }
        }
    }

    // μ against an explicit dense inverse
    for k in 0..50 {
        let m = random_band(&mut rng, 8);
        let inv = m.data().clone().try_inverse().ok_or("random window is singular")?;
        let s = nalgebra::linalg::SVD::new(inv, false, false).singular_values.max();
        let want = 1.0 / s;
        let got = mu(&m, Exponent::Two).unwrap();
        ensure((got - want).abs() <= 1e-9 * (1.0 + op_norm(&m, Exponent::Two)), || {
            format!("sample {k}: μ = {got}, dense inverse gives {want}")
        })?;
    }

    // nesting in ε and the Lipschitz bound
    let flip = section(&catalog::block_flip(0.3), 7);
    let bbox = GridBox::new(-1.5, 2.0, -1.0, 1.0).unwrap();
    let g = pseudo_grid_matrix(&flip, Exponent::Two, bbox, Resolution { nx: 36, ny: 21 }, &[], Parallelism::Parallel)
        .map_err(|e| e.to_string())?;
    let eps = [0.01, 0.05, 0.1, 0.3, 0.6];
    for w in eps.windows(2) {
        let (a, b) = (g.sublevel(w[0]), g.sublevel(w[1]));
        ensure(a.iter().zip(&b).all(|(&x, &y)| !x || y), || format!("Sp_{} ⊄ Sp_{}", w[0], w[1]))?;
    }
    for _ in 0..200 {
        let (i, j) = (rng.random_range(0..36), rng.random_range(0..21));
        let (k, l) = (rng.random_range(0..36), rng.random_range(0..21));
        let (z, w) = (g.lambda(i, j), g.lambda(k, l));
        let a = mu(&flip.shift_diagonal(z), Exponent::Two).unwrap();
        let b = mu(&flip.shift_diagonal(w), Exponent::Two).unwrap();
        ensure((a - b).abs() <= (z - w).norm() + 1e-12, || format!("|μ({z}) − μ({w})| = {}", (a - b).abs()))?;
    }

    // λ-shift route independence and subsequence inclusion
    for (name, e) in &examples {
        let set = stab_composed(e).map_err(|x| x.to_string())?;
        for _ in 0..10 {
            let lambda = C64::new(rng.random_range(-2.0..2.0), rng.random_range(-2.0..2.0));
            let direct = stab_composed(&e.minus_lambda(lambda).unwrap()).unwrap();
            ensure(direct.approx_eq(&stab_shifted(&set, lambda), 1e-12), || format!("{name}: λ = {lambda}"))?;
        }
        let rho = set.modulus;
        for r in 0..2 * rho {
            let fine = stab_h(e, 2 * rho, r).unwrap();
            let coarse = stab_h(e, rho, r % rho).unwrap();
            ensure(fine.is_subset_of(&coarse) && coarse.is_subset_of(&set), || format!("{name}: residue {r}"))?;
        }
    }

    // convergence of pseudospectra implies convergence of inverse norms
    let mut falsified = false;
    for (name, c) in bundled() {
        let Some(p) = &c.pseudo else { continue };
        let s = Settings { tol: c.tol, m_max: c.m_max, parallelism: Parallelism::Parallel };
        let inv = convergence_verdict(&c.expression, QuantityKind::InvNorm, &s, None).map_err(|e| e.to_string())?;
        for &epsilon in &p.epsilons {
            let grid = GridSpec { window: p.grid.window.min(40), ..p.grid };
            let ps = convergence_verdict(&c.expression, QuantityKind::PseudoSet { epsilon }, &s, Some(&grid))
                .map_err(|e| e.to_string())?;
            if ps.verdict.is_convergent() {
                ensure(inv.verdict.is_convergent(), || format!("{name}: Sp_ε converges, inverse norms do not"))?;
            }
            if name == "shiftedflip.json" {
                falsified = inv.verdict.is_convergent() && matches!(ps.verdict, Verdict::Divergent { .. });
            }
        }
    }
    ensure(falsified, || "shifted flip does not separate the two notions".into())?;
    Ok("window monotonicity, 50 dense-inverse samples, nesting, Lipschitz, λ-shift, inclusion, Sp_ε ⇒ inverse norms"
        .into())
}

fn criterion_8() -> Check {
    let c = load("laurent_shift.json");
    let r = limsup_inv_norm(&c.expression, c.n_range, &settings()).map_err(|e| e.to_string())?;
    ensure(r.sequence_samples.values().all(|v| *v == ExtReal::Infinite), || "a finite section is invertible".into())?;
    ensure(r.stable == Some(false), || format!("stable = {:?}", r.stable))?;
    let culprits: Vec<_> = r.indicator_side.iter().filter(|e| e.estimate.value == ExtReal::Infinite).collect();
    ensure(!culprits.is_empty() && culprits.iter().all(|e| e.kind != IndicatorKind::Center), || {
        "instability not traced to a corner indicator".into()
    })?;
    let labels: Vec<String> = culprits.iter().map(|e| e.label.clone()).collect();
    Ok(format!("‖Aₙ⁻¹‖ = ∞ for n = {}..{}; non-invertible: {}", c.n_range.start, c.n_range.end, labels.join(", ")))
}

fn main() {
    let criteria: [(&str, fn() -> Check); 8] = [
        ("block flip table", criterion_1),
        ("strict lower condition-number bound", criterion_2),
        ("strict upper condition-number bound", criterion_3),
        ("convergence boundary in mu", criterion_4),
        ("shifted flip", criterion_5),
        ("sequence side equals indicator side", criterion_6),
        ("property suites", criterion_7),
        ("instability of the shift", criterion_8),
    ];
    let mut failed = 0;
    let mut out = std::io::stdout();
    for (k, (name, f)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let result = std::panic::catch_unwind(f).unwrap_or_else(|p| {
            Err(p.downcast_ref::<String>().cloned().or(p.downcast_ref::<&str>().map(|s| s.to_string())).unwrap_or_default())
        });
        let t = start.elapsed();
        match result {
            Ok(msg) => writeln!(out, "PASS criterion {} ({name}): {msg} [{t:.2?}]", k + 1),
            Err(msg) => {
                failed += 1;
                writeln!(out, "FAIL criterion {} ({name}): {msg} [{t:.2?}]", k + 1)
            }
        }
        .unwrap();
    }
    writeln!(out, "{} of {} criteria passed", criteria.len() - failed, criteria.len()).unwrap();
    if failed > 0 {
        std::process::exit(1);
    }
}
