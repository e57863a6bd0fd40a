use std::io::Write;
use std::path::{Path, PathBuf};

use nesy_verify::circuit::write_circuit;
use nesy_verify::compile::{build_sum_circuit, compile, sum_leaf};
use nesy_verify::logic::{parse_dimacs, parse_formula, wmc_brute, Formula, VarId, VariablePool, WeightMap};
use nesy_verify::nn::{load_weights, network_to_json, Network, Tensor, TrainConfig};
use nesy_verify::reduction::{check_cases, random_cases, two_variable_cases};
use nesy_verify::verifier::{
    dataset_to_json, load_dataset, load_system, verify_dataset, BindingRef, CallRef, DatasetMode, InputRef, Manifest,
    NetworkRef, SymbolicMethod, VerificationReport, VerifyOptions, MANIFEST_FORMAT,
};

use crate::args::*;
use crate::bench::{bench_addition, growth_ratio, relaxed_eps_spread, to_csv, BenchConfig, BenchMethod};
use crate::digits::{addition_samples, synthetic_classifier, synthetic_digits, synthetic_split, train_classifier};
use crate::error::{input_err, read_text, require_file, write_file, CliError, CliResult};
use crate::idx::{encode_images, encode_labels, labelled, read_idx};

/// Brute-force self-check limit for `compile`.
pub const SELF_CHECK_VARS: usize = 20;

/// Tolerance for exact bounds inside relaxed ones.
pub const CONTAINMENT_TOL: f64 = 1e-12;

fn out_err(e: std::io::Error) -> CliError {
    CliError::input(format!("writing output: {e}"))
}

pub fn run(cli: Cli, out: &mut dyn Write) -> CliResult<()> {
    match cli.command {
        Command::Compile(a) => cmd_compile(&a, out),
        Command::Verify(a) => cmd_verify(&a, out),
        Command::BenchAddition(a) => cmd_bench_addition(&a, out),
        Command::EmajsatCheck(a) => cmd_emajsat_check(&a, out),
        Command::Train(a) => cmd_train(&a, out),
        Command::SetupAddition(a) => cmd_setup_addition(&a, out),
    }
}

fn read_formula(path: &Path) -> CliResult<(Formula, VariablePool)> {
    let text = read_text(path)?;
    let parsed = if path.extension().is_some_and(|e| e == "cnf") {
        parse_dimacs(&text).map_err(input_err)
    } else {
        parse_formula(&text).map_err(input_err)
    };
    parsed.map_err(|e| CliError::input(format!("{}: {e}", path.display())))
}

/// Named variables first, then the rest in first-appearance order.
fn branching_order(f: &Formula, pool: &VariablePool, names: Option<&[String]>) -> CliResult<Vec<VarId>> {
    let mut order = Vec::new();
    for name in names.unwrap_or_default() {
        let v = pool.get(name).ok_or_else(|| CliError::input(format!("--order names unknown variable `{name}`")))?;
        if order.contains(&v) {
            return Err(CliError::input(format!("--order lists `{name}` twice")));
        }
        order.push(v);
    }
    for v in f.vars_in_order().into_iter().chain(pool.ids()) {
        if !order.contains(&v) {
            order.push(v);
        }
    }
    Ok(order)
}

pub fn cmd_compile(a: &CompileArgs, out: &mut dyn Write) -> CliResult<()> {
    let (f, pool) = read_formula(&a.formula)?;
    let order = branching_order(&f, &pool, a.order.as_deref())?;
    let dnnf = compile(&f, &order).map_err(input_err)?.smooth();
    let circuit = dnnf.to_arith_circuit().map_err(input_err)?;
    let n = pool.len();
    let name = |i: usize| pool.name(VarId(i as u32)).unwrap_or("?").to_string();

    let mut text = String::new();
    for i in 0..n {
        text.push_str(&format!("# leaf {i} = {}\n", name(i)));
    }
    text.push_str(&write_circuit(&circuit));
    let path = a.out.clone().unwrap_or_else(|| a.formula.with_extension("ac"));
    write_file(&path, text)?;

    writeln!(out, "variables: {n}").map_err(out_err)?;
    writeln!(out, "d-DNNF nodes: {}", dnnf.size()).map_err(out_err)?;
    writeln!(
        out,
        "circuit: {} nodes, {} edges, {} leaves",
        circuit.len(),
        circuit.num_edges(),
        circuit.num_leaves()
    )
    .map_err(out_err)?;
    writeln!(out, "models: {}", dnnf.model_count()).map_err(out_err)?;
    if dnnf.model_count() == 0 {
        eprintln!("warning: formula is unsatisfiable; the circuit evaluates to 0");
    }
    if n <= SELF_CHECK_VARS {
        let half = vec![0.5; n];
        let got = circuit.eval(&half).map_err(input_err)?[0];
        let want = wmc_brute(&f, &WeightMap::new(half).map_err(input_err)?).map_err(input_err)?;
        writeln!(out, "WMC(0.5-weights) = {got}").map_err(out_err)?;
        if (got - want).abs() > 1e-12 {
            return Err(CliError::property(format!(
                "self-check failed: circuit gives {got}, enumeration gives {want}"
            )));
        }
    }
    writeln!(out, "wrote {}", path.display()).map_err(out_err)?;
    Ok(())
}

fn check_eps(eps: &[f64]) -> CliResult<()> {
    match eps.iter().find(|e| !(e.is_finite() && **e >= 0.0)) {
        Some(e) => Err(CliError::input(format!("--eps values must be finite and >= 0, got {e}"))),
        None => Ok(()),
    }
}

/// Every exact bound inside its relaxed counterpart, up to [`CONTAINMENT_TOL`].
pub fn exact_within_relaxed(exact: &VerificationReport, relaxed: &VerificationReport) -> bool {
    exact.samples.iter().zip(&relaxed.samples).all(|(e, r)| {
        e.bounds.is_empty()
            || r.bounds.is_empty()
            || e.bounds.iter().zip(&r.bounds).all(|(e, r)| {
                r.lo() - CONTAINMENT_TOL <= e.lo() && e.hi() <= r.hi() + CONTAINMENT_TOL
            })
    })
}

fn fmt_opt(x: Option<f64>) -> String {
    x.map_or_else(|| "-".into(), |v| format!("{v:.6}"))
}

pub fn cmd_verify(a: &VerifyArgs, out: &mut dyn Write) -> CliResult<()> {
    check_eps(&a.eps)?;
    require_file(&a.manifest)?;
    require_file(&a.dataset)?;
    let (sys, mode) = load_system(&a.manifest).map_err(input_err)?;
    let samples = load_dataset(&a.dataset, sys.inputs()).map_err(input_err)?;
    if samples.is_empty() {
        return Err(CliError::input(format!("{}: dataset is empty", a.dataset.display())));
    }
    let opts = |method| VerifyOptions { method, threads: a.threads, timeout_s: a.timeout_s };

    let mut header = "eps,robustness_pct,mean_runtime_s,mean_lower,mean_upper".to_string();
    if a.exact_symbolic {
        header.push_str(",exact_robustness_pct,exact_mean_runtime_s,exact_mean_lower,exact_mean_upper");
    }
    writeln!(out, "{header}").map_err(out_err)?;
    let mut summary = vec![header];
    let mut contained = true;
    for &eps in &a.eps {
        let relaxed = verify_dataset(&sys, &samples, eps, &mode, &opts(SymbolicMethod::Relaxed)).map_err(input_err)?;
        let g = &relaxed.aggregates;
        let mut row = format!(
            "{eps:e},{:.2},{},{},{}",
            100.0 * g.robustness,
            fmt_opt(g.mean_runtime_s),
            fmt_opt(g.mean_lower),
            fmt_opt(g.mean_upper)
        );
        if let Some(dir) = &a.out {
            write_file(&dir.join(format!("relaxed_eps{eps:e}.json")), relaxed.to_json())?;
            write_file(&dir.join(format!("relaxed_eps{eps:e}.csv")), relaxed.to_csv())?;
        }
        if a.exact_symbolic {
            let exact = verify_dataset(&sys, &samples, eps, &mode, &opts(SymbolicMethod::Polynomial)).map_err(input_err)?;
            let g = &exact.aggregates;
            row.push_str(&format!(
                ",{:.2},{},{},{}",
                100.0 * g.robustness,
                fmt_opt(g.mean_runtime_s),
                fmt_opt(g.mean_lower),
                fmt_opt(g.mean_upper)
            ));
            contained &= exact_within_relaxed(&exact, &relaxed);
            if let Some(dir) = &a.out {
                write_file(&dir.join(format!("exact_eps{eps:e}.json")), exact.to_json())?;
                write_file(&dir.join(format!("exact_eps{eps:e}.csv")), exact.to_csv())?;
            }
        }
        writeln!(out, "{row}").map_err(out_err)?;
        summary.push(row);
    }
    if let Some(dir) = &a.out {
        write_file(&dir.join("summary.csv"), summary.join("\n") + "\n")?;
    }
    if !contained {
        return Err(CliError::property("exact bounds escaped the relaxed bounds"));
    }
    Ok(())
}

/// The digit network and image pool for addition commands.
pub fn digit_source(src: &DigitSource, seed: u64, out: &mut dyn Write) -> CliResult<(Network, Vec<(Tensor, usize)>)> {
    let pool = match (&src.images, &src.labels) {
        (Some(i), Some(l)) => {
            let (img, lab) = read_idx(i, l)?;
            labelled(&img, &lab)
        }
        _ => synthetic_split(0, 1000, seed).1,
    };
    let net = match &src.weights {
        Some(w) => {
            require_file(w)?;
            load_weights(w).map_err(input_err)?
        }
        None => {
            let (trained, _) = synthetic_classifier(seed)?;
            writeln!(
                out,
                "# trained synthetic digit classifier: held-out accuracy {:.4}",
                trained.held_out_accuracy
            )
            .map_err(out_err)?;
            trained.network
        }
    };
    if net.output_size() != 10 {
        return Err(CliError::input(format!(
            "digit network has {} outputs, expected 10",
            net.output_size()
        )));
    }
    if pool.is_empty() {
        return Err(CliError::input("digit image pool is empty"));
    }
    Ok((net, pool))
}

pub fn cmd_bench_addition(a: &BenchArgs, out: &mut dyn Write) -> CliResult<()> {
    let eps = a.eps.clone().unwrap_or_else(crate::bench::default_eps_grid);
    check_eps(&eps)?;
    if let Some(&d) = a.digits.iter().find(|&&d| d == 0 || d > nesy_verify::compile::MAX_SUM_DIGITS) {
        return Err(CliError::input(format!(
            "--digits values must be in 1..={}, got {d}",
            nesy_verify::compile::MAX_SUM_DIGITS
        )));
    }
    let (net, pool) = digit_source(&a.source, a.seed, out)?;
    let cfg = BenchConfig {
        digits: a.digits.clone(),
        eps,
        samples: a.samples,
        seed: a.seed,
        timeout_s: Some(a.timeout_s),
        threads: Some(a.threads),
        repeats: a.repeats,
    };
    let rows = bench_addition(&net, &pool, &cfg)?;
    let csv = to_csv(&rows, true);
    write!(out, "{csv}").map_err(out_err)?;
    if let Some(p) = &a.out {
        write_file(p, &csv)?;
    }
    for r in rows.iter().filter(|r| r.error.is_some()) {
        writeln!(out, "# digits {} {}: {}", r.digits, r.method.as_str(), r.error.as_deref().unwrap_or("")).map_err(out_err)?;
    }
    for m in [BenchMethod::Relaxed, BenchMethod::Exact] {
        if let Some(g) = growth_ratio(&rows, m) {
            writeln!(out, "# {} runtime growth per digit: {g:.3}x", m.as_str()).map_err(out_err)?;
        }
    }
    if let Some(s) = relaxed_eps_spread(&rows) {
        writeln!(out, "# relaxed runtime spread across eps: {s:.3}x").map_err(out_err)?;
    }
    Ok(())
}

pub fn cmd_emajsat_check(a: &EmajsatArgs, out: &mut dyn Write) -> CliResult<()> {
    if a.max_n == 0 || a.max_m == 0 {
        return Err(CliError::input("--max-n and --max-m must be at least 1"));
    }
    if a.max_n + a.max_m > nesy_verify::compile::MAX_COMPILE_VARS {
        return Err(CliError::input(format!(
            "--max-n + --max-m must not exceed {}",
            nesy_verify::compile::MAX_COMPILE_VARS
        )));
    }
    let random = check_cases(&random_cases(a.count, a.max_n, a.max_m, a.seed)).map_err(input_err)?;
    let sweep = check_cases(&two_variable_cases()).map_err(input_err)?;
    writeln!(out, "{}/{} agree", random.agree, random.total).map_err(out_err)?;
    writeln!(out, "two-variable sweep: {}/{} agree", sweep.agree, sweep.total).map_err(out_err)?;
    if random.all_agree() && sweep.all_agree() {
        Ok(())
    } else {
        Err(CliError::property(format!(
            "disagreements: random cases {:?}, sweep cases {:?}",
            random.disagreements, sweep.disagreements
        )))
    }
}

fn idx_pair(images: &Option<PathBuf>, labels: &Option<PathBuf>) -> CliResult<Option<Vec<(Tensor, usize)>>> {
    match (images, labels) {
        (Some(i), Some(l)) => {
            let (img, lab) = read_idx(i, l)?;
            Ok(Some(labelled(&img, &lab)))
        }
        _ => Ok(None),
    }
}

pub fn cmd_train(a: &TrainArgs, out: &mut dyn Write) -> CliResult<()> {
    let (syn_train, syn_test) = synthetic_split(3000, 1000, a.seed);
    let train = idx_pair(&a.images, &a.labels)?.unwrap_or(syn_train);
    let test = idx_pair(&a.test_images, &a.test_labels)?.unwrap_or(syn_test);
    let cfg = TrainConfig {
        learning_rate: a.learning_rate,
        epochs: a.epochs,
        batch_size: a.batch_size,
        seed: a.seed,
    };
    let t = train_classifier(&train, &test, &a.hidden, &cfg)?;
    write_file(&a.out, network_to_json(&t.network))?;
    writeln!(out, "train accuracy: {:.4}", t.train_accuracy).map_err(out_err)?;
    writeln!(out, "held-out accuracy: {:.4}", t.held_out_accuracy).map_err(out_err)?;
    writeln!(out, "wrote {}", a.out.display()).map_err(out_err)?;
    Ok(())
}

/// Manifest for `digits` calls of one digit network over a sum circuit.
pub fn addition_manifest(digits: usize, input_shape: &[usize], circuit: &str, weights: &str) -> Manifest {
    let name = |d: usize| format!("digit{d}");
    Manifest {
        format: MANIFEST_FORMAT.into(),
        circuit: circuit.into(),
        networks: vec![NetworkRef { name: "digit".into(), weights: weights.into() }],
        inputs: (0..digits)
            .map(|d| InputRef { name: name(d), shape: input_shape.to_vec(), domain: (0.0, 1.0) })
            .collect(),
        calls: (0..digits).map(|d| CallRef { network: "digit".into(), input: name(d) }).collect(),
        bindings: (0..digits)
            .flat_map(|d| {
                (0..10).map(move |c| BindingRef {
                    leaf: sum_leaf(10, d, c),
                    call: Some(d),
                    output: Some(c),
                    constant: None,
                })
            })
            .collect(),
        query: DatasetMode::Argmax,
    }
}

pub fn cmd_setup_addition(a: &SetupArgs, out: &mut dyn Write) -> CliResult<()> {
    let circuit = build_sum_circuit(a.digits, 10).map_err(input_err)?;
    let dir = &a.out;
    if a.source.images.is_none() {
        let (img, lab) = synthetic_digits(1000, a.seed.wrapping_mul(2) + 1);
        write_file(&dir.join("test-images.idx"), encode_images(&img))?;
        write_file(&dir.join("test-labels.idx"), encode_labels(&lab))?;
    }
    let (net, pool) = digit_source(&a.source, a.seed, out)?;
    let circuit_name = format!("sum{}.ac", a.digits);
    write_file(&dir.join(&circuit_name), write_circuit(&circuit))?;
    write_file(&dir.join("digit.json"), network_to_json(&net))?;
    let manifest = addition_manifest(a.digits, net.input_shape(), &circuit_name, "digit.json");
    write_file(&dir.join("system.toml"), manifest.to_toml())?;
    let samples = addition_samples(&pool, a.digits, a.samples, a.seed);
    write_file(&dir.join("dataset.json"), dataset_to_json(&samples))?;
    writeln!(out, "wrote {} ({} samples)", dir.display(), samples.len()).map_err(out_err)?;
    Ok(())
}
