use std::collections::BTreeMap;
use std::fs;
use std::io::Read;
use std::path::Path;

use bellhide_core::bellcode::{parity_class_size, BellString, Parity};
use bellhide_core::dense::{self, DenseOperator};
use bellhide_core::locc::{self, BuiltinStrategy, DEFAULT_STRATEGY_SEED};
use bellhide_core::multibit;
use bellhide_core::povmopt::{self, BellDiagonalPovm, Number, SecurityCertificate};
use bellhide_core::prep::{self, AverageMode, PrepPath, PrepSample};
use bellhide_core::rational::{parse_rational, pow2, to_f64, Rational, RationalRecord};
use bellhide_core::states::{hiding_state, recurrence_state, werner_form};
use bellhide_core::tolerance::{ENTRY_TOL, PPT_TOL};
use serde::Serialize;
use serde_json::{json, Map, Value};

use crate::error::CliError;
use crate::output::{Report, Table};
use crate::{AverageChoice, CertifyMode, PathChoice, StateMethod};

type Res<T> = Result<T, CliError>;

fn rat(r: &Rational) -> Value {
    serde_json::to_value(RationalRecord::from(r)).expect("rational record serializes")
}

fn val<T: Serialize>(v: &T) -> Res<Value> {
    Ok(serde_json::to_value(v)?)
}

fn config(pairs: &[(&str, Value)]) -> Map<String, Value> {
    pairs.iter().map(|(k, v)| (k.to_string(), v.clone())).collect()
}

fn report(command: &'static str, config: Map<String, Value>, result: Value, table: Table) -> Report {
    Report { command, config, result, table, stream: false, summary: None, failures: Vec::new() }
}

fn usage<T>(msg: impl Into<String>) -> Res<T> {
    Err(CliError::Usage(msg.into()))
}

fn require_seed(seed: Option<u64>, what: &str) -> Res<u64> {
    match seed {
        Some(s) => Ok(s),
        None => usage(format!("--seed is required for {what}")),
    }
}

pub fn states(n: usize, bit: u8, method: StateMethod) -> Res<Report> {
    let state = match method {
        StateMethod::Direct => hiding_state(n, bit)?,
        StateMethod::Recurrence => recurrence_state(n, bit)?,
    };
    let werner = werner_form(n, bit)?;
    let record = state.to_record(Some(bit));
    let mut table = Table::new(&["string", "num", "den"]);
    for w in &record.weights {
        table.push(vec![json!(w.string), w.num.clone(), w.den.clone()]);
    }
    let result = json!({
        "state": val(&record)?,
        "support": state.support_len(),
        "werner": {
            "identity_coeff": rat(&werner.identity_coeff),
            "h_coeff": rat(&werner.h_coeff),
        },
    });
    let method = match method {
        StateMethod::Direct => "direct",
        StateMethod::Recurrence => "recurrence",
    };
    Ok(report("states", config(&[("n", json!(n)), ("bit", json!(bit)), ("method", json!(method))]), result, table))
}

fn number(x: &Number) -> Value {
    match x {
        Number::Exact(r) => rat(r),
        Number::Float(f) => json!(f),
    }
}

pub fn certify(n_max: usize, mode: CertifyMode) -> Res<Report> {
    if n_max == 0 {
        return usage("--n-max must be at least 1");
    }
    let mut columns = vec!["n", "method", "delta", "lp_optimum_minus_1", "lp_minimum_minus_1", "gap", "tight"];
    if mode == CertifyMode::Both {
        columns.push("agrees");
    }
    let mut table = Table::new(&columns);
    let mut certs: Vec<SecurityCertificate> = Vec::new();
    let mut failures = Vec::new();
    for n in 1..=n_max {
        let mut pair = Vec::new();
        if mode != CertifyMode::Full {
            pair.push(povmopt::optimize_reduced(n)?);
        }
        if mode != CertifyMode::Reduced {
            pair.push(povmopt::optimize(n)?);
        }
        let agrees = pair.len() == 2
            && (pair[0].lp_optimum_minus_1.to_f64() - pair[1].lp_optimum_minus_1.to_f64()).abs() <= 1e-9
            && (pair[0].lp_minimum_minus_1.to_f64() - pair[1].lp_minimum_minus_1.to_f64()).abs() <= 1e-9;
        if mode == CertifyMode::Both && !agrees {
            failures.push(format!("reduced and full LP disagree at n = {n}"));
        }
        for c in pair {
            if !c.within_bound(1e-9) {
                failures.push(format!("LP optimum exceeds delta at n = {n}"));
            }
            let mut row = vec![
                json!(c.n),
                val(&c.solver.method)?,
                rat(&c.delta),
                number(&c.lp_optimum_minus_1),
                number(&c.lp_minimum_minus_1),
                json!(c.gap()),
                val(&c.tight)?,
            ];
            if mode == CertifyMode::Both {
                row.push(json!(agrees));
            }
            table.push(row);
            certs.push(c);
        }
    }
    let mode_name = match mode {
        CertifyMode::Reduced => "reduced",
        CertifyMode::Full => "full",
        CertifyMode::Both => "both",
    };
    let result = json!({ "certificates": val(&certs)?, "all_within_bound": failures.is_empty() });
    let mut r = report("certify", config(&[("n_max", json!(n_max)), ("mode", json!(mode_name))]), result, table);
    r.failures = failures;
    Ok(r)
}

pub fn attack(strategy: &str, n: usize, prior: &str, seed: Option<u64>) -> Res<Report> {
    let prior = parse_rational(prior)?;
    let (strategies, seed_used) = if strategy == "all" {
        let seed = seed.unwrap_or(DEFAULT_STRATEGY_SEED);
        let list = locc::built_in_strategies()
            .into_iter()
            .map(|s| match s {
                BuiltinStrategy::SeededIndependent(_) => BuiltinStrategy::SeededIndependent(seed),
                other => other,
            })
            .collect::<Vec<_>>();
        (list, Some(seed))
    } else {
        if strategy == "seeded-independent" {
            require_seed(seed, "seeded-independent")?;
        }
        (vec![BuiltinStrategy::parse(strategy, seed)?], seed)
    };
    let mut table = Table::new(&[
        "strategy",
        "n",
        "prior",
        "mutual_info_bits",
        "bound_bits",
        "satisfied",
        "guess_info_bits",
        "guess_success",
    ]);
    let mut reports = Vec::new();
    let mut failures = Vec::new();
    for s in &strategies {
        let r = locc::mutual_information(s, n, &prior)?;
        if !r.satisfied {
            failures.push(format!("{} exceeds the information bound", r.strategy));
        }
        if r.guess_info_bits > r.mutual_info_bits + 1e-12 {
            failures.push(format!("{} guess carries more information than its transcript", r.strategy));
        }
        table.push(vec![
            json!(r.strategy),
            json!(r.n),
            rat(&r.prior),
            json!(r.mutual_info_bits),
            json!(r.bound_bits),
            json!(r.satisfied),
            json!(r.guess_info_bits),
            rat(&r.guess_success),
        ]);
        reports.push(r);
    }
    let result = json!({ "reports": reports.iter().map(|r| {
        let mut v = val(r).expect("report serializes");
        v["prior"] = rat(&r.prior);
        v["guess_success"] = rat(&r.guess_success);
        v
    }).collect::<Vec<_>>() });
    let cfg = config(&[
        ("strategy", json!(strategy)),
        ("n", json!(n)),
        ("prior", rat(&prior)),
        ("seed", json!(seed_used)),
    ]);
    let mut r = report("attack", cfg, result, table);
    r.failures = failures;
    Ok(r)
}

fn path_name(p: PrepPath) -> &'static str {
    match p {
        PrepPath::Recursive => "recursive",
        PrepPath::ParityDraw => "parity-draw",
        PrepPath::Clifford => "clifford",
    }
}

pub fn prep(n: usize, bit: u8, samples: usize, seed: Option<u64>, path: PathChoice, trace: bool) -> Res<Report> {
    let seed = require_seed(seed, "prep")?;
    if bit > 1 {
        return usage(format!("--bit must be 0 or 1, got {bit}"));
    }
    let path = match (path, bit) {
        (PathChoice::Auto, 1) | (PathChoice::Recursive, 1) => PrepPath::Recursive,
        (PathChoice::Auto, _) | (PathChoice::ParityDraw, 0) => PrepPath::ParityDraw,
        (PathChoice::Clifford, 0) => PrepPath::Clifford,
        (p, b) => return usage(format!("path {p:?} does not prepare bit {b}").to_lowercase()),
    };
    let mut columns = vec!["bit", "string", "ebits", "seed", "index", "path"];
    if trace {
        columns.push("coin_trace");
    }
    if path == PrepPath::Clifford {
        columns.push("stabilizers");
    }
    let mut table = Table::new(&columns);
    let mut rng = prep::rng_from_seed(seed);
    let expected_ebits = if path == PrepPath::Recursive { 1 } else { 0 };
    let (mut ebits_total, mut ebits_ok, mut parity_ok, mut unlocked) = (0u64, true, true, 0usize);
    let mut counts: BTreeMap<BellString, usize> = BTreeMap::new();
    for index in 0..samples {
        let s: PrepSample = match path {
            PrepPath::Clifford => prep::sample_clifford_with(n, &mut rng)?,
            _ => prep::sample_recursive_with(n, bit, &mut rng)?,
        };
        ebits_total += s.ebits as u64;
        ebits_ok &= s.ebits == expected_ebits;
        parity_ok &= Parity::of(&s.string).bit() == bit;
        if locc::bell_unlock(&s.string) == bit {
            unlocked += 1;
        }
        *counts.entry(s.string).or_insert(0) += 1;
        let mut row = vec![json!(s.bit), json!(s.string), json!(s.ebits), json!(seed), json!(index), json!(path_name(s.path))];
        if trace {
            row.push(val(&s.coin_trace)?);
        }
        if let Some((alice, bob)) = &s.stabilizer_pair {
            row.push(json!([val(alice)?, val(bob)?]));
        }
        table.push(row);
    }
    let exact = if n <= 6 && path != PrepPath::Clifford {
        Some(prep::sampler_distribution(n, bit)? == hiding_state(n, bit)?)
    } else {
        None
    };
    let tv = empirical_distance(n, bit, samples, &counts);
    let mut failures = Vec::new();
    if !ebits_ok {
        failures.push("a sample consumed an unexpected number of ebits".to_string());
    }
    if !parity_ok || unlocked != samples {
        failures.push("a sample has the wrong singlet parity".to_string());
    }
    if exact == Some(false) {
        failures.push("sampler distribution differs from the hiding state".to_string());
    }
    let summary = json!({
        "samples": samples,
        "path": path_name(path),
        "ebits_total": ebits_total,
        "ebits_per_sample": expected_ebits,
        "ebits_ok": ebits_ok,
        "parity_ok": parity_ok,
        "unlocked_correct": unlocked,
        "exact_distribution_matches": exact,
        "distinct_strings": counts.len(),
        "empirical_tv_distance": tv,
    });
    let cfg = config(&[
        ("n", json!(n)),
        ("bit", json!(bit)),
        ("samples", json!(samples)),
        ("seed", json!(seed)),
        ("path", json!(path_name(path))),
        ("trace", json!(trace)),
    ]);
    let mut r = report("prep", cfg, Value::Null, table);
    r.result = json!({ "samples": r.table.rows.len() });
    r.stream = true;
    r.summary = Some(summary);
    r.failures = failures;
    Ok(r)
}

/// Total variation distance between sample frequencies and the uniform
/// distribution on the parity class.
fn empirical_distance(n: usize, bit: u8, samples: usize, counts: &BTreeMap<BellString, usize>) -> Option<f64> {
    if samples == 0 {
        return None;
    }
    let class = parity_class_size(n, Parity::from_bit(bit)) as f64;
    let w = 1.0 / class;
    let total = samples as f64;
    let mut seen_in_class = 0.0;
    let mut sum = 0.0;
    for (s, c) in counts {
        let f = *c as f64 / total;
        if Parity::of(s).bit() == bit {
            seen_in_class += 1.0;
            sum += (f - w).abs();
        } else {
            sum += f;
        }
    }
    sum += (class - seen_in_class) * w;
    Some(0.5 * sum)
}

pub fn verify_clifford(n: usize, mode: Option<AverageChoice>, samples: usize, seed: Option<u64>) -> Res<Report> {
    let mode = match mode {
        Some(AverageChoice::Exact) => AverageMode::Exact,
        Some(AverageChoice::Sampled) => AverageMode::Sampled,
        None if n <= prep::ENUMERATION_CAP => AverageMode::Exact,
        None => AverageMode::Sampled,
    };
    if mode == AverageMode::Sampled {
        require_seed(seed, "sampled verification")?;
    }
    let rep = prep::verify_clifford_average(n, mode, samples, seed)?;
    let mut table = Table::new(&["n", "mode", "samples", "seed", "distinct_states", "trace_distance"]);
    table.push(vec![
        json!(rep.n),
        val(&rep.mode)?,
        json!(rep.samples),
        json!(rep.seed),
        json!(rep.distinct_states),
        json!(rep.trace_distance),
    ]);
    let mut failures = Vec::new();
    if mode == AverageMode::Exact && rep.trace_distance > 1e-10 {
        failures.push(format!("exact Clifford average is {} away from the target", rep.trace_distance));
    }
    let cfg = config(&[
        ("n", json!(n)),
        ("mode", val(&mode)?),
        ("samples", json!(if mode == AverageMode::Sampled { Some(samples) } else { None })),
        ("seed", json!(if mode == AverageMode::Sampled { seed } else { None })),
    ]);
    let mut r = report("verify-clifford", cfg, val(&rep)?, table);
    r.failures = failures;
    Ok(r)
}

/// Bell strings with an optional expected bit, read from prep JSON lines,
/// CSV with a `string` column, or one string per line.
fn read_strings(text: &str) -> Res<Vec<(BellString, Option<u8>)>> {
    let lines: Vec<&str> = text.lines().map(str::trim).filter(|l| !l.is_empty() && !l.starts_with('#')).collect();
    let Some(first) = lines.first() else {
        return Ok(Vec::new());
    };
    let parse = |s: &str| s.parse::<BellString>().map_err(CliError::from);
    if first.starts_with('{') {
        let mut out = Vec::new();
        for l in &lines {
            let v: Value = serde_json::from_str(l)?;
            if let Some(s) = v.get("string").and_then(Value::as_str) {
                let bit = v.get("bit").and_then(Value::as_u64).map(|b| b as u8);
                out.push((parse(s)?, bit));
            }
        }
        return Ok(out);
    }
    if first.contains(',') {
        let body = lines.join("\n");
        let mut rdr = csv::Reader::from_reader(body.as_bytes());
        let headers = rdr.headers()?.clone();
        let Some(si) = headers.iter().position(|h| h == "string") else {
            return usage("CSV input needs a 'string' column");
        };
        let bi = headers.iter().position(|h| h == "bit");
        let mut out = Vec::new();
        for rec in rdr.records() {
            let rec = rec?;
            let bit = match bi.and_then(|i| rec.get(i)).filter(|b| !b.is_empty()) {
                Some(b) => Some(b.parse::<u8>().map_err(|_| CliError::Usage(format!("bad bit {b:?}")))?),
                None => None,
            };
            out.push((parse(&rec[si])?, bit));
        }
        return Ok(out);
    }
    lines.iter().map(|l| Ok((parse(l)?, None))).collect()
}

pub fn unlock(input: &Path) -> Res<Report> {
    let text = if input == Path::new("-") {
        let mut s = String::new();
        std::io::stdin().read_to_string(&mut s)?;
        s
    } else {
        fs::read_to_string(input)?
    };
    let strings = read_strings(&text)?;
    let mut table = Table::new(&["index", "string", "unlocked", "expected", "correct"]);
    let (mut checked, mut correct) = (0usize, 0usize);
    let mut bits = Vec::with_capacity(strings.len());
    for (i, (s, expected)) in strings.iter().enumerate() {
        let b = locc::bell_unlock(s);
        bits.push(b);
        let ok = expected.map(|e| e == b);
        if let Some(ok) = ok {
            checked += 1;
            correct += ok as usize;
        }
        table.push(vec![json!(i), json!(s), json!(b), json!(expected), json!(ok)]);
    }
    let summary = json!({ "count": strings.len(), "checked": checked, "correct": correct });
    let mut r = report("unlock", config(&[("input", json!(input.display().to_string()))]), json!({ "bits": bits }), table);
    if correct != checked {
        r.failures.push(format!("{} of {checked} strings unlocked to the wrong bit", checked - correct));
    }
    r.summary = Some(summary);
    Ok(r)
}

fn parse_bits(s: &str) -> Res<Vec<u8>> {
    s.chars()
        .filter(|c| !matches!(c, ',' | ' '))
        .map(|c| match c {
            '0' => Ok(0),
            '1' => Ok(1),
            other => usage(format!("--bits may only contain 0 and 1, found {other:?}")),
        })
        .collect()
}

pub fn multibit(k: usize, epsilon: f64, bits: Option<&str>, n: Option<usize>, seed: Option<u64>) -> Res<Report> {
    let estimate = multibit::block_size_estimate(k, epsilon)?;
    let required = multibit::required_block_size(k, epsilon)?;
    let n_used = n.unwrap_or(required);
    let bits = bits.map(parse_bits).transpose()?;
    if let Some(b) = &bits {
        if b.len() != k {
            return usage(format!("--bits has {} entries but --k is {k}", b.len()));
        }
    }
    if seed.is_some() && bits.is_none() {
        return usage("--seed needs --bits to sample an encoding");
    }
    let mut result = json!({
        "k": k,
        "epsilon": epsilon,
        "estimate": estimate,
        "n_required": required,
        "n": n_used,
    });
    let mut unlocked_text = Value::Null;
    let mut round_trip = Value::Null;
    let mut failures = Vec::new();
    if let Some(b) = &bits {
        let enc = match seed {
            Some(s) => multibit::encode_sampled(b, n_used, &mut prep::rng_from_seed(s))?,
            None => multibit::encode(b, n_used)?,
        };
        result["encoding"] = val(&enc.to_record())?;
        if seed.is_some() {
            let got = multibit::unlock_all(&enc)?;
            let ok = &got == b;
            if !ok {
                failures.push("unlocked bits differ from the encoded bits".to_string());
            }
            unlocked_text = json!(got.iter().map(|x| x.to_string()).collect::<String>());
            result["unlocked"] = val(&got)?;
            result["round_trip"] = json!(ok);
            round_trip = json!(ok);
        }
    }
    let mut table = Table::new(&["k", "epsilon", "estimate", "n_required", "n", "bits", "unlocked", "round_trip"]);
    table.push(vec![
        json!(k),
        json!(epsilon),
        json!(estimate),
        json!(required),
        json!(n_used),
        json!(bits.as_ref().map(|b| b.iter().map(|x| x.to_string()).collect::<String>())),
        unlocked_text,
        round_trip,
    ]);
    let cfg = config(&[
        ("k", json!(k)),
        ("epsilon", json!(epsilon)),
        ("bits", json!(bits)),
        ("n", json!(n)),
        ("seed", json!(seed)),
    ]);
    let mut r = report("multibit", cfg, result, table);
    r.failures = failures;
    Ok(r)
}

struct Check {
    name: String,
    value: f64,
    bound: f64,
    relation: &'static str,
    tol: f64,
}

impl Check {
    fn pass(&self) -> bool {
        match self.relation {
            "ge" => self.value >= self.bound - self.tol,
            "le" => self.value <= self.bound + self.tol,
            _ => (self.value - self.bound).abs() <= self.tol,
        }
    }
}

fn check(name: impl Into<String>, value: f64, relation: &'static str, bound: f64, tol: f64) -> Check {
    Check { name: name.into(), value, bound, relation, tol }
}

pub fn oracle(n: usize, dump: Option<&Path>) -> Res<Report> {
    if n == 0 {
        return usage("--n must be at least 1");
    }
    let mut checks = Vec::new();
    let mut rhos = Vec::new();
    let two_n = 2f64.powi(n as i32);
    let four_n = two_n * two_n;
    for bit in 0..=1u8 {
        let state = hiding_state(n, bit)?;
        let rho = dense::realize(&state)?;
        checks.push(check(format!("trace_rho{bit}"), rho.trace().re, "eq", 1.0, ENTRY_TOL));
        let werner = dense::realize_werner(&werner_form(n, bit)?)?;
        checks.push(check(format!("werner_rho{bit}"), rho.max_abs_diff(&werner), "eq", 0.0, ENTRY_TOL));
        let rec = dense::realize(&recurrence_state(n, bit)?)?;
        checks.push(check(format!("recurrence_rho{bit}"), rho.max_abs_diff(&rec), "eq", 0.0, ENTRY_TOL));
        let pt_min = dense::min_eigenvalue(&dense::partial_transpose(&rho))?;
        let expected = if bit == 0 { 1.0 / (four_n + two_n) } else { -1.0 / two_n };
        checks.push(check(format!("pt_min_eig_rho{bit}"), pt_min, "eq", expected, PPT_TOL));
        rhos.push(rho);
    }
    checks.push(check("trace_distance_rho0_rho1", dense::trace_distance(&rhos[0], &rhos[1])?, "eq", 1.0, PPT_TOL));
    let cert = povmopt::optimize_reduced(n)?;
    let profile: Vec<Rational> = cert
        .witness_by_n11
        .iter()
        .map(|x| match x {
            Number::Exact(r) => r.clone(),
            Number::Float(f) => Rational::from_float(*f).expect("finite witness"),
        })
        .collect();
    let povm = BellDiagonalPovm::from_profile(n, &profile)?;
    let m0 = dense::realize_diagonal(n, &povm.coefficients_f64())?;
    let m1 = DenseOperator::identity(n)?.sub(&m0)?;
    for (name, m) in [("witness_pt_min_eig_m0", &m0), ("witness_pt_min_eig_m1", &m1)] {
        checks.push(check(name, dense::min_eigenvalue(&dense::partial_transpose(m))?, "ge", 0.0, PPT_TOL));
    }
    let adv = dense::trace_pair(&m0, &rhos[0])? + dense::trace_pair(&m1, &rhos[1])? - 1.0;
    checks.push(check("witness_advantage", adv, "eq", cert.lp_optimum_minus_1.to_f64(), PPT_TOL));
    checks.push(check("witness_within_delta", adv, "le", to_f64(&(Rational::from_integer(2.into()) / pow2(n as u32))), PPT_TOL));
    if let Some(path) = dump {
        let doc = json!({ "n": n, "rho0": rhos[0].to_dump(), "rho1": rhos[1].to_dump() });
        crate::output::write_bytes(Some(path), format!("{doc}\n").as_bytes())?;
    }
    let mut table = Table::new(&["check", "value", "relation", "bound", "tolerance", "pass"]);
    let mut result = Vec::new();
    let mut failures = Vec::new();
    for c in &checks {
        let pass = c.pass();
        if !pass {
            failures.push(format!("{} = {} (expected {} {})", c.name, c.value, c.relation, c.bound));
        }
        table.push(vec![json!(c.name), json!(c.value), json!(c.relation), json!(c.bound), json!(c.tol), json!(pass)]);
        result.push(json!({
            "check": c.name, "value": c.value, "relation": c.relation,
            "bound": c.bound, "tolerance": c.tol, "pass": pass,
        }));
    }
    let cfg = config(&[("n", json!(n)), ("dump", json!(dump.map(|p| p.display().to_string())))]);
    let mut r = report("oracle", cfg, json!({ "checks": result }), table);
    r.failures = failures;
    Ok(r)
}
