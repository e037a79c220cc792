//! End-to-end acceptance suite. Runs without the libtest harness so every
//! criterion prints exactly one PASS/FAIL line; exits non-zero on any failure.

mod common;

use std::collections::BTreeMap;
use std::path::Path;
use std::process::Command;
use std::time::{Duration, Instant};

use rand::rngs::StdRng;
use rand::seq::{IteratorRandom, SliceRandom};
use rand::{Rng, SeedableRng};

use common::{corpus, oracle_cfg, random_program, rules, stored_cf_next, full_cfg, GenConfig};
use tggflow::csp::{solve_csp, Adornment, Arg, ConstraintRegistry, Slot};
use tggflow::engine::{
    backward_transform, check_consistency, forward_transform, operationalize, Direction,
};
use tggflow::graph::{TripleModel, Value};
use tggflow::minijava::{normalize, parse_program, unparse_program};

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn forward_text(text: &str) -> Result<TripleModel, String> {
    let (rs, reg) = rules();
    let ast = parse_program(text).map_err(|e| e.to_string())?;
    forward_transform(ast, &rs, &reg)
        .map(|t| t.triple)
        .map_err(|e| e.to_string())
}

/// A solved step rendered as `name(args) => result`, where bound arguments are
/// quoted values and free arguments are variable names.
fn render_step(args: &[Arg], adornment: &Adornment, name: &str, values: &[Value]) -> String {
    let shown: Vec<String> = args
        .iter()
        .zip(values)
        .enumerate()
        .map(|(i, (a, v))| match (a, adornment.is_free(i)) {
            (Arg::Var(var), true) => var.clone(),
            _ => format!("\"{}\"", v.as_str().unwrap_or_default()),
        })
        .collect();
    let result = match args.iter().enumerate().find(|(i, _)| adornment.is_free(*i)) {
        Some((i, Arg::Var(var))) => format!("{var} = \"{}\"", values[i].as_str().unwrap_or_default()),
        _ => "true".to_string(),
    };
    format!("{name}({}) => {result}", shown.join(", "))
}

fn csp_trace() -> Outcome {
    let (rs, reg) = rules();
    let rule = rs.rule("AssignmentWithExpRule").ok_or("rule missing")?;
    let op = operationalize(rule, Direction::Forward, &reg).map_err(|e| e.to_string())?;
    let bindings: BTreeMap<String, Value> = [
        ("lhs.value", "a"),
        ("rhs.value", "+"),
        ("operandL.value", "b"),
        ("operandR.value", "3"),
        ("role", "body"),
    ]
    .into_iter()
    .map(|(k, v)| (k.to_string(), Value::from(v)))
    .chain([("pos".to_string(), Value::Int(0))])
    .collect();

    let started = Instant::now();
    let solution = solve_csp(&op.plan, &bindings).map_err(|e| e.to_string())?;
    let elapsed = started.elapsed();

    let lines: Vec<String> = op
        .plan
        .steps
        .iter()
        .zip(&solution.trace)
        .map(|(step, solved)| render_step(&step.instance.args, &step.adornment, &solved.constraint, &solved.values))
        .collect();
    let expected = [
        r#"isAnIdentifier("a") => true"#,
        r#"concatWithOperatorSymbol("+", "b", "3", temp1) => temp1 = "b + 3""#,
        r#"concat("=", "a", "b + 3", temp2) => temp2 = "a = b + 3""#,
        r#"addSuffix("a = b + 3", ";", declStm.txt) => declStm.txt = "a = b + 3;""#,
    ];
    ensure(lines == expected, || format!("trace was {lines:#?}"))?;
    ensure(
        solution.bindings.get("declStm.txt") == Some(&Value::from("a = b + 3;")),
        || "declStm.txt not bound".into(),
    )?;
    ensure(elapsed < Duration::from_millis(1), || format!("solve took {elapsed:?}"))?;
    Ok(format!("4 steps, solved in {elapsed:?}"))
}

fn method_rule() -> Outcome {
    let t = forward_text("void m() { }")?;
    let txt = |ty: &str| -> Vec<String> {
        t.target
            .nodes()
            .filter(|n| n.ty == ty)
            .filter_map(|n| n.str_attr("txt").map(str::to_string))
            .collect()
    };
    ensure(txt("Method") == ["m()"], || format!("Method.txt = {:?}", txt("Method")))?;
    ensure(txt("Exit") == ["Exit"], || format!("Exit.txt = {:?}", txt("Exit")))?;
    ensure(t.corr_count() == 2, || format!("{} corr links", t.corr_count()))?;
    Ok("Method.txt=\"m()\", Exit.txt=\"Exit\", 2 corr links".into())
}

fn guard_constraint() -> Outcome {
    let (rs, reg) = rules();
    let ast = parse_program("void m() { int a = b + 3; }").map_err(|e| e.to_string())?;
    let result = forward_transform(ast, &rs, &reg).map_err(|e| e.to_string())?;
    let applied: Vec<&str> = result.trace.iter().map(|r| r.rule.as_str()).collect();
    ensure(!applied.contains(&"AssignmentWithExpRule"), || format!("applied {applied:?}"))?;
    ensure(applied.contains(&"DeclarationRule"), || format!("applied {applied:?}"))?;
    let decl = result.triple.target.nodes().find(|n| n.ty == "SimpleStmt").ok_or("no statement")?;
    ensure(decl.str_attr("txt") == Some("int a = b + 3;"), || format!("txt = {:?}", decl.str_attr("txt")))?;

    // The assignment CSP itself refuses "int a" as a left-hand side.
    let op = operationalize(rs.rule("AssignmentWithExpRule").unwrap(), Direction::Forward, &reg)
        .map_err(|e| e.to_string())?;
    let bindings: BTreeMap<String, Value> = [
        ("lhs.value", "int a"),
        ("rhs.value", "+"),
        ("operandL.value", "b"),
        ("operandR.value", "3"),
        ("role", "body"),
    ]
    .into_iter()
    .map(|(k, v)| (k.to_string(), Value::from(v)))
    .chain([("pos".to_string(), Value::Int(0))])
    .collect();
    ensure(solve_csp(&op.plan, &bindings).is_err(), || "CSP accepted `int a`".into())?;
    Ok(format!("applied {applied:?}"))
}

fn round_trip() -> Outcome {
    let (rs, reg) = rules();
    let programs = corpus();
    ensure(programs.len() >= 25, || format!("only {} corpus programs", programs.len()))?;
    let started = Instant::now();
    for (name, text) in &programs {
        let ast = parse_program(text).map_err(|e| format!("{name}: {e}"))?;
        let fwd = forward_transform(ast, &rs, &reg).map_err(|e| format!("{name}: {e}"))?;
        let back = backward_transform(fwd.triple.target, &rs, &reg).map_err(|e| format!("{name}: {e}"))?;
        let printed = unparse_program(&back.triple.source).map_err(|e| format!("{name}: {e}"))?;
        let expected = normalize(text).map_err(|e| format!("{name}: {e}"))?;
        ensure(printed == expected, || format!("{name}: got\n{printed}\nexpected\n{expected}"))?;
    }
    let elapsed = started.elapsed();
    ensure(elapsed < Duration::from_secs(5), || format!("corpus took {elapsed:?}"))?;
    Ok(format!("{} programs in {elapsed:?}", programs.len()))
}

fn cfg_oracle() -> Outcome {
    let mut rng = StdRng::seed_from_u64(0x5eed);
    let config = GenConfig {
        max_statements: 6,
        max_depth: 2,
    };
    let count = 250;
    for i in 0..count {
        let text = random_program(&mut rng, &config);
        let t = forward_text(&text).map_err(|e| format!("program {i}: {e}\n{text}"))?;
        let oracle = oracle_cfg(&t.source);
        let stored = stored_cf_next(&t);
        ensure(stored == oracle.next, || {
            format!("program {i} cfNext\n{text}\ngot {stored:?}\nexpected {:?}", oracle.next)
        })?;
        let full = full_cfg(&t);
        ensure(full == oracle.full, || {
            format!("program {i} full CFG\n{text}\ngot {full:?}\nexpected {:?}", oracle.full)
        })?;
    }
    Ok(format!("{count} generated programs match"))
}

fn mutate(base: &TripleModel, kind: usize, rng: &mut StdRng) -> Option<TripleModel> {
    let mut t = base.clone();
    match kind {
        0 => {
            let in_target = rng.gen_bool(0.5);
            let g = if in_target { &mut t.target } else { &mut t.source };
            let (id, attr, value) = g
                .nodes()
                .flat_map(|n| n.attrs.iter().map(move |(k, v)| (n.id, k.clone(), v.clone())))
                .choose(rng)?;
            let edited = match value {
                Value::Str(s) => Value::Str(format!("{s}_x")),
                Value::Int(i) => Value::Int(i + 1),
            };
            g.set_attr(id, &attr, edited).ok()?;
        }
        1 => {
            let edge = t.target.edges().filter(|e| e.ty == "cfNext").choose(rng)?.clone();
            let other = t
                .target
                .nodes()
                .filter(|n| !matches!(n.ty.as_str(), "Method" | "Seq") && n.id != edge.target)
                .map(|n| n.id)
                .choose(rng)?;
            t.target.remove_edge(edge.id).ok()?;
            t.target.add_edge("cfNext", edge.source, other, None).ok()?;
        }
        _ => {
            let id = t.corrs().map(|c| c.id).choose(rng)?;
            t.remove_corr(id).ok()?;
        }
    }
    Some(t)
}

fn consistency_check() -> Outcome {
    let (rs, reg) = rules();
    let mut rng = StdRng::seed_from_u64(7);
    let mut bases = Vec::new();
    for (name, text) in corpus() {
        let t = forward_text(&text).map_err(|e| format!("{name}: {e}"))?;
        let report = check_consistency(&t, &rs, &reg).map_err(|e| format!("{name}: {e}"))?;
        ensure(report.consistent, || format!("{name}: forward result rejected: {:?}", report.unmarked()))?;
        bases.push((name, t));
    }
    let mut mutated = [0usize; 3];
    for round in 0..2 {
        for (name, base) in &bases {
            for (kind, count) in mutated.iter_mut().enumerate() {
                let Some(m) = mutate(base, kind, &mut rng) else { continue };
                *count += 1;
                let rejected = match check_consistency(&m, &rs, &reg) {
                    Ok(report) => !report.consistent,
                    Err(_) => true,
                };
                let what = ["attribute edit", "cfNext retarget", "corr deletion"][kind];
                ensure(rejected, || format!("{name}: {what} (round {round}) was accepted"))?;
            }
        }
    }
    let total: usize = mutated.iter().sum();
    ensure(total >= 100, || format!("only {total} mutations"))?;
    Ok(format!(
        "{} forward triples accepted; {total} mutations rejected ({} attribute, {} cfNext, {} corr)",
        bases.len(),
        mutated[0],
        mutated[1],
        mutated[2]
    ))
}

fn word(rng: &mut StdRng, alphabet: &[u8], len: std::ops::RangeInclusive<usize>) -> String {
    let n = rng.gen_range(len);
    (0..n).map(|_| *alphabet.choose(rng).unwrap() as char).collect()
}

fn identifier(rng: &mut StdRng) -> String {
    let head = word(rng, b"abcdefghijklmnopqrstuvwxyz_ABCXYZ", 1..=1);
    head + &word(rng, b"abcxyz_019", 0..=6)
}

fn operand(rng: &mut StdRng) -> String {
    if rng.gen_bool(0.5) {
        identifier(rng)
    } else {
        rng.gen_range(0..10_000).to_string()
    }
}

/// A satisfied argument tuple for `constraint` built from separator-free parts.
fn satisfied_tuple(constraint: &str, rng: &mut StdRng) -> Vec<Value> {
    let s = |x: &str| Value::from(x);
    match constraint {
        "eq" => {
            let v = if rng.gen_bool(0.5) {
                Value::Int(rng.gen_range(-1000..1000))
            } else {
                Value::from(word(rng, b"abc xyz=;+", 0..=8))
            };
            vec![v.clone(), v]
        }
        "concat" => {
            let sep = ["=", "+", ":", "->"].choose(rng).unwrap().to_string();
            let (l, r) = (operand(rng), operand(rng));
            let whole = format!("{l} {sep} {r}");
            vec![s(&sep), s(&l), s(&r), s(&whole)]
        }
        "addSuffix" => {
            let base = word(rng, b"abc xyz=;+()", 0..=10);
            let suffix = word(rng, b";()!", 0..=3);
            vec![s(&base), s(&suffix), s(&format!("{base}{suffix}"))]
        }
        "isAnIdentifier" => vec![s(&identifier(rng))],
        "concatWithOperatorSymbol" => {
            let op = ["+", "-", "*", "/", "<", "<=", ">", ">=", "==", "!=", "&&", "||"]
                .choose(rng)
                .unwrap()
                .to_string();
            let (l, r) = (operand(rng), operand(rng));
            let whole = format!("{l} {op} {r}");
            vec![s(&op), s(&l), s(&r), s(&whole)]
        }
        other => panic!("no generator for {other}"),
    }
}

fn constraint_modes() -> Outcome {
    let registry = ConstraintRegistry::with_builtins();
    let mut rng = StdRng::seed_from_u64(42);
    let names = ["eq", "concat", "addSuffix", "isAnIdentifier", "concatWithOperatorSymbol"];
    let mut modes = 0;
    for name in names {
        let def = registry.get(name).ok_or_else(|| format!("{name} not registered"))?;
        for adornment in def.allowed() {
            modes += 1;
            for trial in 0..1000 {
                let tuple = satisfied_tuple(name, &mut rng);
                let args: Vec<Option<Value>> = tuple
                    .iter()
                    .zip(adornment.slots())
                    .map(|(v, slot)| (*slot == Slot::Bound).then(|| v.clone()))
                    .collect();
                let out = def
                    .eval(adornment, &args)
                    .ok_or_else(|| format!("{name}[{adornment}] trial {trial}: no result for {tuple:?}"))?;
                ensure(def.check(&out), || format!("{name}[{adornment}]: {out:?} fails the check"))?;
                ensure(out == tuple, || format!("{name}[{adornment}]: recovered {out:?} from {tuple:?}"))?;
            }
        }
    }
    Ok(format!("{modes} adornments x 1000 trials"))
}

fn run_cli(args: &[&str]) -> Result<(i32, Vec<u8>), String> {
    let out = Command::new(env!("CARGO_BIN_EXE_tggflow"))
        .args(args)
        .output()
        .map_err(|e| e.to_string())?;
    Ok((out.status.code().unwrap_or(-1), out.stdout))
}

fn cli_determinism() -> Outcome {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let work = dir.path();
    let path = |p: &Path| p.to_string_lossy().into_owned();
    let mut runs = 0;
    for (name, _) in corpus() {
        let input = path(&common::corpus_dir().join(&name));
        let ast = path(&work.join("ast.json"));
        let triple = path(&work.join("forward.json"));
        let dot = path(&work.join("forward.dot"));
        let commands: Vec<Vec<String>> = vec![
            vec!["parse".into(), input.clone()],
            vec!["forward".into(), input.clone(), "--dot".into(), dot.clone()],
            vec!["roundtrip".into(), input.clone()],
            vec!["unparse".into(), ast.clone()],
            vec!["backward".into(), triple.clone()],
            vec!["check".into(), triple.clone()],
        ];
        // Inputs for the commands that read JSON.
        let (c, _) = run_cli(&["parse", &input, "-o", &ast])?;
        ensure(c == 0, || format!("{name}: parse exited {c}"))?;
        let (c, _) = run_cli(&["forward", &input, "-o", &triple])?;
        ensure(c == 0, || format!("{name}: forward exited {c}"))?;
        for cmd in &commands {
            let args: Vec<&str> = cmd.iter().map(String::as_str).collect();
            let (c1, o1) = run_cli(&args)?;
            let dot1 = std::fs::read(&dot).unwrap_or_default();
            let (c2, o2) = run_cli(&args)?;
            let dot2 = std::fs::read(&dot).unwrap_or_default();
            ensure(c1 == 0 && c2 == 0, || format!("{name}: {} exited {c1}/{c2}", cmd[0]))?;
            ensure(o1 == o2 && dot1 == dot2, || format!("{name}: {} output differs between runs", cmd[0]))?;
            runs += 1;
        }
    }
    Ok(format!("{runs} commands byte-identical across two runs"))
}

fn main() {
    let criteria: [Criterion; 8] = [
        ("csp trace reproduction", csp_trace),
        ("MethodRule semantics", method_rule),
        ("guard constraint", guard_constraint),
        ("corpus round trip", round_trip),
        ("cfg oracle equivalence", cfg_oracle),
        ("consistency check", consistency_check),
        ("constraint bidirectionality", constraint_modes),
        ("cli determinism", cli_determinism),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        match run() {
            Ok(detail) => println!("PASS {} {name}: {detail}", i + 1),
            Err(detail) => {
                failed += 1;
                println!("FAIL {} {name}: {detail}", i + 1);
            }
        }
    }
    println!("{} of {} acceptance criteria passed", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
