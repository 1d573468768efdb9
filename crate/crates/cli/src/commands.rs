//! One function per subcommand. Each returns the artifacts to write; nothing
//! here touches the filesystem.

use serde::Serialize;
use serde_json::{json, Value};
use sparsedisc::dictionary::{best_v_term, OracleNorm, OracleTarget};
use sparsedisc::discretization::{
    empirical_min_m, one_sided_check, rip_delta, success_probability, universal_check, CheckMode,
    CheckOptions, SweepEntry, TrialSpec,
};
use sparsedisc::entropy::{entropy_numbers, generate_cloud, q_v_reference};
use sparsedisc::linalg::{CVector, C64};
use sparsedisc::lowerbound::{min_m_threshold, sine_failure_certificate};
use sparsedisc::recovery::{
    block_greedy, lebesgue_report, ls_universal, wiener_instance, womp_run, LebesgueConfig,
    WienerSpec, WompConfig,
};
use sparsedisc::rng::{self, complex_gaussian, random_support, AUX_STREAM_BASE};
use sparsedisc::sampling::{draw_points, sample_matrix};
use sparsedisc::{Dictionary, Domain, PointSet, Quadrature};

use crate::config::{Command, ExperimentConfig};
use crate::error::CliError;

/// Residual and coefficient error below which a target counts as recovered.
const RECOVERY_TOLERANCE: f64 = 1e-8;

pub struct Artifact {
    pub name: String,
    pub contents: Vec<u8>,
}

impl Artifact {
    fn json(name: &str, value: &impl Serialize) -> Self {
        let mut contents = serde_json::to_vec_pretty(value).expect("results serialize");
        contents.push(b'\n');
        Artifact {
            name: name.into(),
            contents,
        }
    }

    fn text(name: &str, text: String) -> Self {
        Artifact {
            name: name.into(),
            contents: text.into_bytes(),
        }
    }
}

fn csv_artifact<R: AsRef<[u8]>>(name: &str, header: &[&str], rows: impl IntoIterator<Item = Vec<R>>) -> Artifact {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header).expect("in-memory write");
    for row in rows {
        w.write_record(row).expect("in-memory write");
    }
    Artifact {
        name: name.into(),
        contents: w.into_inner().expect("in-memory flush"),
    }
}

pub struct RunContext {
    pub seed: u64,
    pub cap: u128,
}

pub fn execute(cfg: &ExperimentConfig, ctx: &RunContext) -> Result<Vec<Artifact>, CliError> {
    match cfg.command {
        Command::DiscretizeCheck => discretize_check(cfg, ctx),
        Command::SweepM => sweep_m(cfg, ctx),
        Command::Rip => rip(cfg, ctx),
        Command::Recover => recover(cfg, ctx),
        Command::Lebesgue => lebesgue(cfg, ctx),
        Command::LsUniversal => ls_universal_cmd(cfg, ctx),
        Command::BlockGreedy => block_greedy_cmd(cfg, ctx),
        Command::Lowerbound => lowerbound(cfg, ctx),
        Command::Entropy => entropy(cfg, ctx),
    }
}

fn header(cfg: &ExperimentConfig, dict: Option<&Dictionary>, ctx: &RunContext) -> serde_json::Map<String, Value> {
    let mut m = serde_json::Map::new();
    m.insert("command".into(), json!(cfg.command.name()));
    if let Some(d) = dict {
        m.insert("dictionary".into(), json!(d.descriptor()));
        m.insert("N".into(), json!(d.len()));
    }
    m.insert("seed".into(), json!(ctx.seed));
    m
}

fn points(cfg: &ExperimentConfig, domain: Domain, ctx: &RunContext) -> Result<PointSet, CliError> {
    let m = cfg.sampling.as_ref().and_then(|s| s.m).expect("validated");
    Ok(draw_points(m, domain, cfg.sampling_mode(), ctx.seed)?)
}

fn check_options(cfg: &ExperimentConfig, ctx: &RunContext) -> CheckOptions {
    CheckOptions {
        cap: ctx.cap,
        mode: match cfg.params.randomized_samples {
            Some(samples) => CheckMode::Randomized {
                samples,
                seed: ctx.seed,
            },
            None => CheckMode::Exhaustive,
        },
        record_limit: cfg.params.record_limit.unwrap_or(0),
    }
}

fn quadrature(cfg: &ExperimentConfig, domain: &Domain) -> Quadrature {
    cfg.params
        .quadrature
        .map(Quadrature::new)
        .unwrap_or_else(|| Quadrature::default_for(domain))
}

fn discretize_check(cfg: &ExperimentConfig, ctx: &RunContext) -> Result<Vec<Artifact>, CliError> {
    let dict = cfg.build_dictionary()?;
    let xi = points(cfg, dict.domain(), ctx)?;
    let p = &cfg.params;
    let cert = universal_check(
        &dict,
        p.v.expect("validated"),
        &xi,
        p.c1.unwrap_or(0.5),
        p.c2.unwrap_or(1.5),
        &check_options(cfg, ctx),
    )?;
    let mut out = header(cfg, Some(&dict), ctx);
    out.insert("m".into(), json!(xi.len()));
    out.insert(
        "summary".into(),
        json!({"holds": cert.holds(), "C1_global": cert.c1_global, "C2_global": cert.c2_global}),
    );
    out.insert("certificate".into(), serde_json::to_value(&cert).expect("serializable"));
    Ok(vec![
        Artifact::json("result.json", &out),
        Artifact::text("points.csv", xi.to_csv()),
    ])
}

fn sweep_m(cfg: &ExperimentConfig, ctx: &RunContext) -> Result<Vec<Artifact>, CliError> {
    let dict = cfg.build_dictionary()?;
    let p = &cfg.params;
    let spec = TrialSpec {
        v: p.v.expect("validated"),
        c1: p.c1.unwrap_or(0.5),
        c2: p.c2.unwrap_or(1.5),
        trials: p.trials.unwrap_or(100),
        seed: ctx.seed,
        cap: ctx.cap,
    };
    let mut entries: Vec<SweepEntry> = Vec::new();
    if let Some(ms) = cfg.sampling.as_ref().and_then(|s| s.m_sweep.as_ref()) {
        for &m in ms {
            entries.push(success_probability(&dict, m, &spec)?);
        }
    }
    let min_m = match p.target {
        Some(target) => {
            let r = empirical_min_m(&dict, &spec, target, p.max_m.unwrap_or(4096))?;
            entries.extend(r.sweep.iter().copied());
            Some(r)
        }
        None => None,
    };
    entries.sort_by_key(|e| e.m);
    entries.dedup_by_key(|e| e.m);
    let mut out = header(cfg, Some(&dict), ctx);
    out.insert("v".into(), json!(spec.v));
    out.insert("C1".into(), json!(spec.c1));
    out.insert("C2".into(), json!(spec.c2));
    out.insert("sweep".into(), serde_json::to_value(&entries).expect("serializable"));
    if let Some(r) = &min_m {
        out.insert("summary".into(), json!({"m_hat": r.m_hat, "target": r.target}));
    }
    let rows = entries.iter().map(|e| {
        vec![
            e.m.to_string(),
            e.trials.to_string(),
            e.successes.to_string(),
            format!("{:e}", e.estimate),
            format!("{:e}", e.low),
            format!("{:e}", e.high),
        ]
    });
    Ok(vec![
        Artifact::json("result.json", &out),
        csv_artifact("sweep.csv", &["m", "trials", "successes", "estimate", "low", "high"], rows),
    ])
}

fn rip(cfg: &ExperimentConfig, ctx: &RunContext) -> Result<Vec<Artifact>, CliError> {
    let dict = cfg.build_dictionary()?;
    let xi = points(cfg, dict.domain(), ctx)?;
    let v = cfg.params.v.expect("validated");
    let system = sample_matrix(&dict, &xi)?.normalized(dict.is_orthonormal());
    let report = rip_delta(&system, v, ctx.cap)?;
    let cert = universal_check(&dict, v, &xi, 0.5, 1.5, &check_options(cfg, ctx))?;
    let from_cert = (1.0 - cert.c1_global).max(cert.c2_global - 1.0);
    let mut out = header(cfg, Some(&dict), ctx);
    out.insert("m".into(), json!(xi.len()));
    out.insert(
        "summary".into(),
        json!({
            "delta": report.delta,
            "delta_from_certificate": from_cert,
            "difference": (report.delta - from_cert).abs(),
        }),
    );
    out.insert("rip".into(), serde_json::to_value(&report).expect("serializable"));
    Ok(vec![Artifact::json("result.json", &out)])
}

/// Random `v`-sparse coefficient vector for target `i`.
fn sparse_target(n: usize, v: usize, seed: u64, i: u64) -> (Vec<usize>, Vec<C64>) {
    let mut r = rng::stream(seed, AUX_STREAM_BASE + i);
    let support = random_support(&mut r, n, v);
    let values = support.iter().map(|_| complex_gaussian(&mut r)).collect();
    (support, values)
}

/// Dense coefficients of unit `L₂` norm for the perturbation of target `i`.
fn perturbation(dict: &Dictionary, seed: u64, i: u64) -> Vec<C64> {
    let mut r = rng::stream(seed, 2 * AUX_STREAM_BASE + i);
    let c: Vec<C64> = (0..dict.len()).map(|_| complex_gaussian(&mut r)).collect();
    let cv = CVector::from_vec(c.clone());
    let norm = (cv.adjoint() * dict.full_gram() * &cv)[(0, 0)].re.sqrt();
    c.into_iter().map(|z| z / norm).collect()
}

fn continuous_coeff_error(dict: &Dictionary, truth: &[C64], approx: &[C64]) -> f64 {
    let idx: Vec<usize> = (0..dict.len())
        .filter(|&i| truth[i] != C64::new(0.0, 0.0) || approx[i] != C64::new(0.0, 0.0))
        .collect();
    if idx.is_empty() {
        return 0.0;
    }
    let diff = CVector::from_iterator(idx.len(), idx.iter().map(|&i| truth[i] - approx[i]));
    (diff.adjoint() * dict.gram(&idx) * &diff)[(0, 0)].re.max(0.0).sqrt()
}

fn recover(cfg: &ExperimentConfig, ctx: &RunContext) -> Result<Vec<Artifact>, CliError> {
    let dict = cfg.build_dictionary()?;
    let n = dict.len();
    let xi = points(cfg, dict.domain(), ctx)?;
    let p = &cfg.params;
    let (v, c) = (p.v.expect("validated"), p.c.expect("validated"));
    let certificate = match p.u {
        Some(u) => Some(universal_check(&dict, u, &xi, 0.5, 1.5, &check_options(cfg, ctx))?),
        None => None,
    };
    let phi = sample_matrix(&dict, &xi)?;
    let wcfg = WompConfig {
        weakness: p.t.unwrap_or(1.0),
        max_iterations: c * v,
        ..WompConfig::default()
    };
    let mut rows = Vec::new();
    let mut records = Vec::new();
    let mut first_trace = None;
    let (mut recovered, mut worst) = (0usize, 0.0f64);
    let targets = p.targets.unwrap_or(10);
    for i in 0..targets {
        let (support, values) = sparse_target(n, v, ctx.seed, i as u64);
        let mut truth = vec![C64::new(0.0, 0.0); n];
        for (&s, &a) in support.iter().zip(&values) {
            truth[s] = a;
        }
        let y = phi.apply(&truth);
        let trace = womp_run(&phi, &y, &wcfg)?;
        let approx = trace.approximant(n)?.to_dense(n);
        let err = continuous_coeff_error(&dict, &truth, &approx);
        let ok = trace.final_residual() <= RECOVERY_TOLERANCE && err <= RECOVERY_TOLERANCE.sqrt();
        recovered += usize::from(ok);
        worst = worst.max(err);
        rows.push(vec![
            i.to_string(),
            join(&support),
            join(&trace.selected),
            trace.iterations().to_string(),
            format!("{:e}", trace.final_residual()),
            format!("{err:e}"),
            ok.to_string(),
        ]);
        records.push(json!({
            "target": i,
            "support": support,
            "selected": trace.selected,
            "residual_norms": trace.residual_norms,
            "continuous_error": err,
            "recovered": ok,
        }));
        if first_trace.is_none() {
            first_trace = Some(trace);
        }
    }
    let mut out = header(cfg, Some(&dict), ctx);
    out.insert("m".into(), json!(xi.len()));
    out.insert("v".into(), json!(v));
    out.insert("c".into(), json!(c));
    out.insert(
        "summary".into(),
        json!({"recovered": recovered, "targets": targets, "max_continuous_error": worst}),
    );
    if let Some(cert) = certificate {
        out.insert("certificate".into(), serde_json::to_value(&cert).expect("serializable"));
    }
    out.insert("targets".into(), Value::Array(records));
    let mut arts = vec![
        Artifact::json("result.json", &out),
        csv_artifact(
            "recover.csv",
            &["target", "support", "selected", "iterations", "residual", "continuous_error", "recovered"],
            rows,
        ),
    ];
    if let Some(t) = first_trace {
        arts.push(Artifact::text("trace_0.csv", t.to_csv()));
    }
    Ok(arts)
}

fn join(idx: &[usize]) -> String {
    idx.iter().map(usize::to_string).collect::<Vec<_>>().join(" ")
}

/// `f₀ = Σ_{i∈J} a_i φ_i + δ·g` with `g` a unit-norm dictionary combination.
fn perturbed_target<'a>(
    dict: &'a Dictionary,
    support: &'a [usize],
    values: &'a [C64],
    pert: &'a [C64],
    delta: f64,
) -> impl Fn(&[f64]) -> C64 + Sync + 'a {
    move |x: &[f64]| {
        let s: C64 = support.iter().zip(values).map(|(&i, a)| a * dict.eval(i, x)).sum();
        let g: C64 = pert.iter().enumerate().map(|(i, a)| a * dict.eval(i, x)).sum();
        s + g * delta
    }
}

fn lebesgue(cfg: &ExperimentConfig, ctx: &RunContext) -> Result<Vec<Artifact>, CliError> {
    let dict = cfg.build_dictionary()?;
    let n = dict.len();
    let xi = points(cfg, dict.domain(), ctx)?;
    let p = &cfg.params;
    let (v, c) = (p.v.expect("validated"), p.c.expect("validated"));
    let lcfg = LebesgueConfig {
        weakness: p.t.unwrap_or(1.0),
        quadrature: quadrature(cfg, &dict.domain()),
        sup_reference: false,
        cap: ctx.cap,
    };
    let deltas = p.deltas.clone().unwrap_or_else(|| vec![1e-6, 1e-3, 1e-1]);
    let mut rows = Vec::new();
    let mut worst = 0.0f64;
    for i in 0..p.targets.unwrap_or(10) {
        let (support, values) = sparse_target(n, v, ctx.seed, i as u64);
        let pert = perturbation(&dict, ctx.seed, i as u64);
        for &delta in &deltas {
            let f0 = perturbed_target(&dict, &support, &values, &pert, delta);
            let rep = lebesgue_report(&f0, &dict, &xi, v, c, &lcfg)?;
            worst = worst.max(rep.ratio_discrete);
            rows.push(vec![
                i.to_string(),
                format!("{delta:e}"),
                format!("{:e}", rep.residual_discrete),
                format!("{:e}", rep.sigma_discrete),
                format!("{:e}", rep.ratio_discrete),
                format!("{:e}", rep.residual_continuous),
            ]);
        }
    }
    let mut out = header(cfg, Some(&dict), ctx);
    out.insert("m".into(), json!(xi.len()));
    out.insert("v".into(), json!(v));
    out.insert("c".into(), json!(c));
    out.insert("summary".into(), json!({"max_ratio_discrete": worst, "cases": rows.len()}));
    Ok(vec![
        Artifact::json("result.json", &out),
        csv_artifact(
            "lebesgue.csv",
            &["target", "delta", "residual_discrete", "sigma_discrete", "ratio_discrete", "residual_continuous"],
            rows,
        ),
    ])
}

fn ls_universal_cmd(cfg: &ExperimentConfig, ctx: &RunContext) -> Result<Vec<Artifact>, CliError> {
    let dict = cfg.build_dictionary()?;
    let n = dict.len();
    let xi = points(cfg, dict.domain(), ctx)?;
    let p = &cfg.params;
    let v = p.v.expect("validated");
    let quad = quadrature(cfg, &dict.domain());
    let deltas = p.deltas.clone().unwrap_or_else(|| vec![0.0]);
    let mut rows = Vec::new();
    let mut worst = 0.0f64;
    for i in 0..p.targets.unwrap_or(5) {
        let (support, values) = sparse_target(n, v, ctx.seed, i as u64);
        let pert = perturbation(&dict, ctx.seed, i as u64);
        for &delta in &deltas {
            let f = perturbed_target(&dict, &support, &values, &pert, delta);
            let res = ls_universal(&f, &dict, v, &xi, &quad, ctx.cap)?;
            let sigma = best_v_term(OracleTarget::Function(&f), v, &dict, OracleNorm::ContinuousL2(&quad), ctx.cap)?;
            worst = worst.max(res.continuous_error);
            rows.push(vec![
                i.to_string(),
                format!("{delta:e}"),
                join(res.approximant.support()),
                format!("{:e}", res.continuous_error),
                format!("{:e}", res.discrete_error),
                format!("{:e}", res.mixed_error),
                format!("{:e}", sigma.error),
            ]);
        }
    }
    let mut out = header(cfg, Some(&dict), ctx);
    out.insert("m".into(), json!(xi.len()));
    out.insert("v".into(), json!(v));
    out.insert("summary".into(), json!({"max_continuous_error": worst, "cases": rows.len()}));
    Ok(vec![
        Artifact::json("result.json", &out),
        csv_artifact(
            "ls_universal.csv",
            &["target", "delta", "support", "continuous_error", "discrete_error", "mixed_error", "sigma_continuous"],
            rows,
        ),
    ])
}

fn block_greedy_cmd(cfg: &ExperimentConfig, ctx: &RunContext) -> Result<Vec<Artifact>, CliError> {
    let p = &cfg.params;
    let w = p.wiener.as_ref().expect("validated");
    let spec = WienerSpec {
        dim: w.d.unwrap_or(1),
        grid: w.big_m.unwrap_or(1023),
        a: w.a.unwrap_or(0.5),
        b: w.b.unwrap_or(0.0),
        dense_blocks: w.dense_blocks.unwrap_or(4),
        sparse_blocks: w.sparse_blocks.clone().unwrap_or_default(),
        fill: w.fill.unwrap_or(1.0),
    };
    let beta = p.beta.unwrap_or(spec.a / 2.0);
    let inst = wiener_instance(&spec, ctx.seed)?;
    let xi = points(cfg, Domain::torus(spec.dim), ctx)?;
    let mut rows = Vec::new();
    let mut results = Vec::new();
    let mut max_ratio = 0.0f64;
    for &nn in p.n_values.as_ref().expect("validated") {
        let r = block_greedy(&inst, nn, beta, &xi)?;
        max_ratio = max_ratio.max(r.term_ratio());
        rows.push(vec![
            nn.to_string(),
            r.terms.to_string(),
            format!("{:e}", r.term_ratio()),
            format!("{:e}", r.error_mixed),
        ]);
        results.push(json!({
            "n": r.n,
            "terms": r.terms,
            "term_ratio": r.term_ratio(),
            "error_mixed": r.error_mixed,
            "steps": r.steps,
        }));
    }
    let mut out = header(cfg, None, ctx);
    out.insert("instance".into(), serde_json::to_value(&spec).expect("serializable"));
    out.insert("nonzeros".into(), json!(inst.coefficients.len()));
    out.insert("beta".into(), json!(beta));
    out.insert("m".into(), json!(xi.len()));
    out.insert("summary".into(), json!({"max_term_ratio": max_ratio}));
    out.insert("runs".into(), Value::Array(results));
    Ok(vec![
        Artifact::json("result.json", &out),
        csv_artifact("block_greedy.csv", &["n", "terms", "term_ratio", "error_mixed"], rows),
    ])
}

fn lowerbound(cfg: &ExperimentConfig, ctx: &RunContext) -> Result<Vec<Artifact>, CliError> {
    let dict = cfg.build_dictionary()?;
    let xi = points(cfg, dict.domain(), ctx)?;
    let spec = cfg.dictionary.as_ref().expect("validated");
    let scale = spec.scale.unwrap_or(std::f64::consts::SQRT_2);
    let c1 = cfg.params.c1.unwrap_or(0.5);
    let n = dict.len() as u64;
    let cert = sine_failure_certificate(&xi, n, c1, scale)?;
    let check = one_sided_check(&dict, 1, &xi, c1, &CheckOptions { cap: ctx.cap, ..CheckOptions::default() })?;
    if cert.is_some() && check.holds() {
        return Err(sparsedisc::Error::InternalInconsistency(
            "failure certificate contradicts the one-sided check".into(),
        )
        .into());
    }
    let mut out = header(cfg, Some(&dict), ctx);
    out.insert("m".into(), json!(xi.len()));
    out.insert(
        "summary".into(),
        json!({
            "certificate": cert.is_some(),
            "one_sided_holds": check.holds(),
            "one_sided_C1_global": check.c1_global,
            "m_threshold": min_m_threshold(n, c1, scale)?,
        }),
    );
    out.insert("failure_certificate".into(), serde_json::to_value(&cert).expect("serializable"));
    Ok(vec![
        Artifact::json("result.json", &out),
        Artifact::text("points.csv", xi.to_csv()),
    ])
}

fn entropy(cfg: &ExperimentConfig, ctx: &RunContext) -> Result<Vec<Artifact>, CliError> {
    let dict = cfg.build_dictionary()?;
    let p = &cfg.params;
    let v = p.v.expect("validated");
    let lp = p.p.unwrap_or(2.0);
    let k_max = p.k_max.unwrap_or(10);
    let grid = Quadrature::new(p.quadrature.unwrap_or(256));
    let cloud = generate_cloud(&dict, v, lp, p.members.unwrap_or(2000), ctx.seed, &grid)?;
    let est = entropy_numbers(&cloud, k_max)?;
    let mut out = header(cfg, Some(&dict), ctx);
    out.insert("v".into(), json!(v));
    out.insert("p".into(), json!(lp));
    out.insert(
        "summary".into(),
        json!({
            "slope": est.loglog_slope(4, k_max),
            "q_v_reference": q_v_reference(dict.uniform_bound(), v, dict.len()),
        }),
    );
    out.insert("estimate".into(), serde_json::to_value(&est).expect("serializable"));
    Ok(vec![
        Artifact::json("result.json", &out),
        Artifact::text("entropy.csv", est.to_csv()),
    ])
}
