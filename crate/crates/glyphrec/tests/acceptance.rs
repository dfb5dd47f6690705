//! Acceptance criteria, one PASS/FAIL line each. Runs as a plain binary so
//! the lines appear in `cargo test` output.

use std::path::Path;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use glyphrec::config::{KernelKind, PipelineConfig, SynthSpec};
use glyphrec::container;
use glyphrec::pipeline::{self, Prediction, TrainedModels};
use glyphrec::synth::synth_glyphs;
use glyphrec_core::ensemble::{fuse_weighted, ExpertDecision, FusionWeights, VoteMode, PUBLISHED_WEIGHTS};
use glyphrec_core::features::{extract_all, region_runs};
use glyphrec_core::mlp::{MlpConfig, MlpModel, SoftScores};
use glyphrec_core::svm::{kkt_violations, train_binary_traced, Kernel, DEFAULT_TOL};
use glyphrec_core::{BinaryImage, FeatureKind, NUM_CLASSES};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;

fn check(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn within(elapsed: Duration, limit: Duration) -> Result<(), String> {
    check(elapsed < limit, || format!("took {elapsed:.2?}, limit {limit:?}"))
}

// 1 ---------------------------------------------------------------------

fn brute_runs(grid: &[Vec<bool>]) -> [usize; 4] {
    let h = grid.len() as i64;
    let w = grid[0].len() as i64;
    let on = |r: i64, c: i64| r >= 0 && c >= 0 && r < h && c < w && grid[r as usize][c as usize];
    // longest run along the ray starting at (r, c) in direction (dr, dc)
    let line = |mut r: i64, mut c: i64, dr: i64, dc: i64| {
        let (mut best, mut cur) = (0, 0);
        while r >= -1 && c >= -1 && r <= h && c <= w {
            if on(r, c) {
                cur += 1;
                best = best.max(cur);
            } else {
                cur = 0;
            }
            r += dr;
            c += dc;
        }
        best
    };
    let rows = (0..h).map(|r| line(r, 0, 0, 1)).sum();
    let cols = (0..w).map(|c| line(0, c, 1, 0)).sum();
    // diagonals start on the top row or the left column
    let diag = (0..w).map(|c| line(0, c, 1, 1)).sum::<usize>() + (1..h).map(|r| line(r, 0, 1, 1)).sum::<usize>();
    let anti = (0..w).map(|c| line(0, c, 1, -1)).sum::<usize>() + (1..h).map(|r| line(r, w - 1, 1, -1)).sum::<usize>();
    [rows, cols, diag, anti]
}

fn criterion_1() -> Outcome {
    let start = Instant::now();
    const BARS: [[u8; 6]; 6] = [
        [1, 0, 1, 1, 1, 1],
        [1, 0, 0, 1, 1, 0],
        [1, 0, 0, 1, 1, 0],
        [1, 0, 0, 0, 1, 0],
        [0, 1, 0, 0, 1, 0],
        [0, 0, 1, 1, 0, 0],
    ];
    let img = BinaryImage::from_rows(&BARS).map_err(|e| e.to_string())?;
    let runs = region_runs(&img, 0..6, 0..6);
    check(runs.row == 12, || format!("printed grid row sum {} != 12", runs.row))?;

    let mut rng = ChaCha8Rng::seed_from_u64(1);
    for trial in 0..200 {
        let (h, w) = (rng.gen_range(1..=10), rng.gen_range(1..=10));
        let density = rng.gen_range(0.1..0.9);
        let grid: Vec<Vec<bool>> = (0..h).map(|_| (0..w).map(|_| rng.gen_bool(density)).collect()).collect();
        let rows: Vec<Vec<u8>> = grid.iter().map(|r| r.iter().map(|&b| u8::from(b)).collect()).collect();
        let img = BinaryImage::from_rows(&rows).map_err(|e| e.to_string())?;
        let got = region_runs(&img, 0..h, 0..w);
        let want = brute_runs(&grid);
        check([got.row, got.col, got.diag, got.anti_diag] == want, || {
            format!("grid {trial} ({h}×{w}): {got:?} vs brute force {want:?}")
        })?;
    }
    within(start.elapsed(), Duration::from_secs(1))?;
    Ok(format!("printed grid sum 12; 200 random grids agree ({:.0?})", start.elapsed()))
}

// 2 ---------------------------------------------------------------------

fn criterion_2() -> Outcome {
    let start = Instant::now();
    let data = synth_glyphs(10, 10, 0.02, 2).map_err(|e| e.to_string())?;
    for (i, img) in data.images.iter().enumerate() {
        let bin = pipeline::preprocess(img).map_err(|e| e.to_string())?;
        let feats = extract_all(&bin).map_err(|e| e.to_string())?;
        let want = [
            (FeatureKind::ChainHistogram, 200),
            (FeatureKind::Shadow, 24),
            (FeatureKind::ViewBased, 44),
            (FeatureKind::LongestRun, 100),
        ];
        for (f, (kind, dim)) in feats.iter().zip(want) {
            check(f.kind() == kind && f.values().len() == dim, || {
                format!("glyph {i}: {} has {} values", f.kind(), f.values().len())
            })?;
        }
        for f in &feats[1..3] {
            check(f.values().iter().all(|v| (0.0..=1.0).contains(v)), || {
                format!("glyph {i}: {} value outside [0, 1]", f.kind())
            })?;
        }
    }
    within(start.elapsed(), Duration::from_secs(5))?;
    Ok(format!("100 glyphs give 200/24/44/100 values, shadow and view in [0,1] ({:.0?})", start.elapsed()))
}

// 3 ---------------------------------------------------------------------

fn block(m: &mut MlpModel, b: usize) -> &mut Vec<f64> {
    match b {
        0 => &mut m.w1,
        1 => &mut m.b1,
        2 => &mut m.w2,
        _ => &mut m.b2,
    }
}

fn criterion_3() -> Outcome {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let h = 1e-5;
    let mut worst: f64 = 0.0;
    for trial in 0..100 {
        let cfg = MlpConfig {
            seed: rng.gen(),
            ..MlpConfig::new(rng.gen_range(5..=30), rng.gen_range(3..=10))
        };
        let mut model = MlpModel::init(cfg.clone()).map_err(|e| e.to_string())?;
        // spread weights beyond the initial range so hidden units are not all linear
        for w in model.w1.iter_mut().chain(model.w2.iter_mut()) {
            *w *= 2.0;
        }
        let x: Vec<f64> = (0..cfg.input_dim).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let mut target = vec![0.0; cfg.output_dim];
        target[rng.gen_range(0..cfg.output_dim)] = 1.0;
        let grad = model.gradient(&x, &target).map_err(|e| e.to_string())?;
        let analytic: Vec<f64> = [&grad.w1, &grad.b1, &grad.w2, &grad.b2].into_iter().flatten().copied().collect();
        let mut numeric = Vec::with_capacity(analytic.len());
        for b in 0..4 {
            for k in 0..block(&mut model, b).len() {
                let orig = block(&mut model, b)[k];
                block(&mut model, b)[k] = orig + h;
                let up = model.loss(&x, &target).map_err(|e| e.to_string())?;
                block(&mut model, b)[k] = orig - h;
                let down = model.loss(&x, &target).map_err(|e| e.to_string())?;
                block(&mut model, b)[k] = orig;
                numeric.push((up - down) / (2.0 * h));
            }
        }
        let diff: f64 = analytic.iter().zip(&numeric).map(|(a, n)| (a - n).powi(2)).sum::<f64>().sqrt();
        let norm: f64 = analytic.iter().map(|a| a * a).sum::<f64>().sqrt() + numeric.iter().map(|n| n * n).sum::<f64>().sqrt();
        let rel = diff / norm.max(f64::MIN_POSITIVE);
        worst = worst.max(rel);
        check(rel < 1e-4, || format!("configuration {trial}: relative error {rel:e}"))?;
    }
    within(start.elapsed(), Duration::from_secs(30))?;
    Ok(format!("100 configurations, worst relative error {worst:.1e} ({:.0?})", start.elapsed()))
}

// 4 ---------------------------------------------------------------------

fn blobs(rng: &mut ChaCha8Rng, per_class: usize) -> Vec<(Vec<f64>, usize)> {
    let centers = [[0.0, 0.0], [2.0, 0.5], [0.8, 2.0]];
    let mut out = Vec::new();
    for (label, c) in centers.iter().enumerate() {
        for _ in 0..per_class {
            out.push((vec![c[0] + rng.gen_range(-1.0..1.0), c[1] + rng.gen_range(-1.0..1.0)], label));
        }
    }
    out
}

fn criterion_4() -> Outcome {
    let start = Instant::now();
    let two = [(vec![1.0], 1i8), (vec![-1.0], -1i8)];
    let (model, info) = train_binary_traced(&two, Kernel::Linear, 10.0, DEFAULT_TOL).map_err(|e| e.to_string())?;
    check(model.bias.abs() < 1e-6, || format!("bias {}", model.bias))?;
    for x in [-3.0, -1.0, -0.25, 0.0, 0.5, 2.0] {
        let f = model.decision(&[x]).map_err(|e| e.to_string())?;
        check((f - x).abs() < 1e-6, || format!("f({x}) = {f}"))?;
    }
    let mut audited = vec![(two.to_vec(), Kernel::Linear, 10.0, info.alphas, model)];

    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let data = blobs(&mut rng, 30);
    let kernels = [Kernel::Linear, Kernel::Rbf { sigma: 0.8 }, Kernel::Poly { degree: 3 }];
    for kernel in kernels {
        for c in [0.5, 10.0] {
            let mut problems: Vec<Vec<(Vec<f64>, i8)>> = Vec::new();
            for cls in 0..3 {
                problems.push(data.iter().map(|(x, l)| (x.clone(), if *l == cls { 1 } else { -1 })).collect());
            }
            for (a, b) in [(0, 1), (0, 2), (1, 2)] {
                problems.push(
                    data.iter()
                        .filter(|(_, l)| *l == a || *l == b)
                        .map(|(x, l)| (x.clone(), if *l == a { 1 } else { -1 }))
                        .collect(),
                );
            }
            for p in problems {
                let (m, info) = train_binary_traced(&p, kernel, c, DEFAULT_TOL).map_err(|e| e.to_string())?;
                audited.push((p, kernel, c, info.alphas, m));
            }
        }
    }
    for (i, (data, kernel, c, alphas, model)) in audited.iter().enumerate() {
        let bad = kkt_violations(data, alphas, model, 1e-3);
        check(bad.is_empty(), || format!("machine {i} ({kernel:?}, C={c}): KKT violated at {bad:?}"))?;
        let eq: f64 = data.iter().zip(alphas).map(|((_, y), a)| f64::from(*y) * a).sum();
        check(eq.abs() < 1e-8, || format!("machine {i}: |Σ αy| = {:e}", eq.abs()))?;
    }
    within(start.elapsed(), Duration::from_secs(5))?;
    Ok(format!(
        "f(x)=x recovered; KKT and Σαy=0 hold on {} machines ({:.0?})",
        audited.len(),
        start.elapsed()
    ))
}

// 5 ---------------------------------------------------------------------

fn one_hot(kind: FeatureKind, label: usize) -> ExpertDecision {
    let mut s = vec![0.0; NUM_CLASSES];
    s[label] = 1.0;
    ExpertDecision::new(kind, SoftScores(s))
}

fn criterion_5() -> Outcome {
    let start = Instant::now();
    let sum: f64 = PUBLISHED_WEIGHTS.iter().sum();
    check(format!("{sum:.3}") == "1.000" && (sum - 1.0).abs() < 1e-12, || format!("weights sum to {sum}"))?;
    check(PUBLISHED_WEIGHTS == [0.316, 0.303, 0.241, 0.140], || "preset differs from published values".into())?;
    let (a, b) = (3, 8);
    let decisions: Vec<ExpertDecision> = FeatureKind::ALL
        .iter()
        .zip([a, a, b, b])
        .map(|(&k, l)| one_hot(k, l))
        .collect();
    let fused = fuse_weighted(&decisions, &FusionWeights::published(), VoteMode::BinaryVotes);
    check((fused.combined[a] - 0.619).abs() < 1e-12, || format!("A scored {}", fused.combined[a]))?;
    check((fused.combined[b] - 0.381).abs() < 1e-12, || format!("B scored {}", fused.combined[b]))?;
    check(fused.top1 == Some(a), || format!("winner {:?}", fused.top1))?;
    within(start.elapsed(), Duration::from_secs(1))?;
    Ok(format!(
        "preset sums to {sum:.3}; (A,A,B,B) gives {:.3} vs {:.3}",
        fused.combined[a], fused.combined[b]
    ))
}

// 6–9 share pipeline runs ------------------------------------------------

fn synthetic_config(out: &Path) -> PipelineConfig {
    let mut cfg = PipelineConfig {
        seed: 2024,
        output_dir: out.to_path_buf(),
        ..PipelineConfig::default()
    };
    // 80 per class: 50 train, 10 selection, 20 test
    cfg.dataset.synth = Some(SynthSpec {
        classes: 10,
        per_class: 80,
        noise: 0.02,
    });
    cfg.split.train_fraction = 0.625;
    cfg.split.selection_fraction = 0.125;
    cfg.svm.kernel = KernelKind::Rbf;
    cfg.svm.c = 10.0;
    cfg
}

struct Run {
    output: pipeline::RunOutput,
    elapsed: Duration,
}

fn run(out: &Path) -> Result<Run, String> {
    let start = Instant::now();
    let output = pipeline::run_pipeline(&synthetic_config(out)).map_err(|e| e.to_string())?;
    Ok(Run {
        output,
        elapsed: start.elapsed(),
    })
}

fn test_top1(run: &Run, name: &str) -> Result<f64, String> {
    run.output
        .report
        .classifier(name)
        .map(|c| c.test.top1)
        .ok_or_else(|| format!("report lacks {name}"))
}

fn criterion_6(run: &Run) -> Outcome {
    let r = &run.output.report;
    for split in ["test", "training"] {
        let pick = |name: &str| {
            r.classifier(name)
                .map(|c| if split == "test" { c.test.clone() } else { c.training.clone() })
                .ok_or_else(|| format!("report lacks {name}"))
        };
        let experts: Vec<f64> = FeatureKind::ALL
            .iter()
            .map(|k| pick(&pipeline::expert_name(*k)).map(|m| m.top1))
            .collect::<Result<_, _>>()?;
        let best = experts.iter().copied().fold(0.0, f64::max);
        let oracle = pick(pipeline::ANY_NAME)?.oracle.ok_or("any-vote lacks oracle accuracy")?;
        let unanimous = pick(pipeline::UNANIMOUS_NAME)?.top1;
        check(oracle >= best && best >= unanimous, || {
            format!("{split}: oracle {oracle} / best expert {best} / unanimous {unanimous}")
        })?;
        let weighted = pick(pipeline::WEIGHTED_NAME)?;
        check(weighted.top5 >= weighted.top1, || format!("{split}: weighted top-5 below top-1"))?;
        for c in &r.classifiers {
            let m = if split == "test" { &c.test } else { &c.training };
            check(m.top5 >= m.top1, || format!("{split}: {} top-5 below top-1", c.name))?;
        }
    }
    let t = |n: &str| r.classifier(n).map_or(f64::NAN, |c| c.test.top1);
    Ok(format!(
        "test: oracle {:.3} >= best expert >= unanimous {:.3}; top-5 >= top-1 everywhere",
        r.classifier(pipeline::ANY_NAME).and_then(|c| c.test.oracle).unwrap_or(f64::NAN),
        t(pipeline::UNANIMOUS_NAME)
    ))
}

fn criterion_7(run: &Run) -> Outcome {
    let r = &run.output.report;
    let svm = test_top1(run, pipeline::SVM_NAME)?;
    let weighted = test_top1(run, pipeline::WEIGHTED_NAME)?;
    let weakest = FeatureKind::ALL
        .iter()
        .map(|k| test_top1(run, &pipeline::expert_name(*k)))
        .collect::<Result<Vec<_>, _>>()?
        .into_iter()
        .fold(1.0, f64::min);
    let svm_cls = r.classifier(pipeline::SVM_NAME).ok_or("no svm row")?;
    check(svm_cls.test.samples == 200 && svm_cls.training.samples == 500, || {
        format!("split sizes {} test / {} train", svm_cls.test.samples, svm_cls.training.samples)
    })?;
    check(run.output.models.svm.as_ref().is_some_and(|m| m.dim == 368), || "svm is not on concatenated features".into())?;
    check(svm >= 0.90, || format!("svm test top-1 {svm}"))?;
    check(weighted >= 0.85, || format!("weighted ensemble test top-1 {weighted}"))?;
    check(weighted >= weakest, || format!("weighted {weighted} below weakest expert {weakest}"))?;
    within(run.elapsed, Duration::from_secs(300))?;
    Ok(format!(
        "svm {svm:.3}, weighted {weighted:.3}, weakest expert {weakest:.3}, run {:.1?}",
        run.elapsed
    ))
}

fn dir_files(dir: &Path) -> Vec<(String, Vec<u8>)> {
    let mut out = Vec::new();
    let mut stack = vec![dir.to_path_buf()];
    while let Some(d) = stack.pop() {
        for e in std::fs::read_dir(&d).into_iter().flatten().flatten() {
            let p = e.path();
            if p.is_dir() {
                stack.push(p);
            } else {
                let rel = p.strip_prefix(dir).unwrap().to_string_lossy().into_owned();
                out.push((rel, std::fs::read(&p).unwrap_or_default()));
            }
        }
    }
    out.sort();
    out
}

fn criterion_8(first: &Path, second: &Path) -> Outcome {
    run(second)?;
    let (a, b) = (dir_files(first), dir_files(second));
    let names = |v: &[(String, Vec<u8>)]| v.iter().map(|(n, _)| n.clone()).collect::<Vec<_>>();
    check(names(&a) == names(&b), || "runs wrote different file sets".into())?;
    let mut compared = 0;
    for ((name, x), (_, y)) in a.iter().zip(&b) {
        if name == pipeline::TIMINGS_JSON {
            continue;
        }
        check(x == y, || format!("{name} differs between runs"))?;
        compared += 1;
    }
    check(compared >= 12, || format!("only {compared} artifacts compared"))?;
    Ok(format!("{compared} model and report files byte-identical across two runs"))
}

fn same_bits(a: &[f64], b: &[f64]) -> bool {
    a.len() == b.len() && a.iter().zip(b).all(|(x, y)| x.to_bits() == y.to_bits())
}

fn same_prediction(models: &TrainedModels, a: &Prediction, b: &Prediction) -> bool {
    let experts = match (&a.experts, &b.experts) {
        (Some(x), Some(y)) => {
            let fusion = models.fusion.expect("fusion present");
            x.iter().zip(y).all(|(p, q)| p.label == q.label && same_bits(p.scores.values(), q.scores.values()))
                && same_bits(
                    &fuse_weighted(x, &fusion.weights, fusion.mode).combined,
                    &fuse_weighted(y, &fusion.weights, fusion.mode).combined,
                )
        }
        (None, None) => true,
        _ => false,
    };
    let svm = match (&a.svm, &b.svm) {
        (Some(x), Some(y)) => x.label == y.label && same_bits(&x.scores, &y.scores) && same_bits(&x.margins, &y.margins),
        (None, None) => true,
        _ => false,
    };
    experts && svm
}

fn criterion_9(run: &Run, dir: &Path) -> Outcome {
    let start = Instant::now();
    let loaded = TrainedModels::load(&pipeline::models_dir(dir)).map_err(|e| e.to_string())?;
    let original = &run.output.models;
    check(&loaded == original, || "loaded models differ from trained models".into())?;
    // every payload also survives an in-memory encode/decode cycle
    for (name, bytes) in original.encode().map_err(|e| e.to_string())? {
        let back = container::decode(&bytes).map_err(|e| e.to_string())?;
        check(container::encode(&back).map_err(|e| e.to_string())? == bytes, || format!("{name} re-encodes differently"))?;
    }
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    for i in 0..1000 {
        let raw: [glyphrec_core::FeatureVector; 4] = FeatureKind::ALL.map(|k| {
            let values = (0..k.dimension()).map(|_| rng.gen_range(-0.2..1.2)).collect();
            glyphrec_core::FeatureVector::new(k, values).expect("dimension")
        });
        let a = original.predict(&raw).map_err(|e| e.to_string())?;
        let b = loaded.predict(&raw).map_err(|e| e.to_string())?;
        check(same_prediction(original, &a, &b), || format!("input {i}: predictions differ"))?;
    }
    Ok(format!("1000 random inputs predict bit-identically after reload ({:.0?})", start.elapsed()))
}

fn main() -> ExitCode {
    let mut failures = 0;
    let mut emit = |n: u32, outcome: Outcome| match outcome {
        Ok(detail) => println!("criterion {n}: PASS - {detail}"),
        Err(detail) => {
            failures += 1;
            println!("criterion {n}: FAIL - {detail}");
        }
    };
    emit(1, criterion_1());
    emit(2, criterion_2());
    emit(3, criterion_3());
    emit(4, criterion_4());
    emit(5, criterion_5());

    let tmp = tempfile::tempdir().expect("temporary directory");
    let (first, second) = (tmp.path().join("run-a"), tmp.path().join("run-b"));
    match run(&first) {
        Ok(r) => {
            emit(6, criterion_6(&r));
            emit(7, criterion_7(&r));
            emit(8, criterion_8(&first, &second));
            emit(9, criterion_9(&r, &first));
        }
        Err(e) => {
            for n in 6..=9 {
                emit(n, Err(format!("pipeline failed: {e}")));
            }
        }
    }
    if failures == 0 {
        println!("acceptance: all 9 criteria passed");
        ExitCode::SUCCESS
    } else {
        println!("acceptance: {failures} criteria failed");
        ExitCode::FAILURE
    }
}
