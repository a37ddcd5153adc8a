use std::fmt::Write as _;
use std::path::Path;

use serde_json::{json, Value};
use sprox_core::interval::{self, fmt_q, parse_q, LadderVariant, PLMap, Q};
use sprox_core::natsets::{classify_window_with, ClassifyOptions, NatRule, WindowSet};
use sprox_core::recipe::{override_positions, random_binary};
use sprox_core::relations::{agreement_lengths, close_set, pair_profile};
use sprox_core::rotation::{self, BottomStart};
use sprox_core::subshifts::{
    circular_code_check, flower_graph, forbidden_to_vertex, golden_mean, verify_synchronizing, CodedGenerator,
    SftSpec, VertexShift,
};
use sprox_core::substitution::{four_letter_example, ColumnCertificate, CoincidenceCertificate, ConstantLength, PairClass, Substitution};
use sprox_core::witnesses::{self, BlockPair, ParameterStream, SyncPreset};
use sprox_core::{Alphabet, Exec, SymbolStream, Word};

use crate::report::Report;
use crate::{
    AnalyzeSubstitution, CheckCircular, ClassifySet, CliError, Cmd, ConstructWitness, IntervalTrace, RotationExample,
    SftInfo, VerifyPair,
};

type Res<T> = Result<T, CliError>;

pub const DEFAULT_PAIR_HORIZON: u64 = 19683;
pub const DEFAULT_SPREAD_HORIZON: u64 = 1 << 16;
pub const MAX_CODING_LEN: usize = 8;

pub fn execute(cmd: &Cmd, seed: u64) -> Res<Report> {
    match cmd {
        Cmd::AnalyzeSubstitution(a) => analyze_substitution(a),
        Cmd::VerifyPair(a) => verify_pair(a, seed),
        Cmd::ConstructWitness(a) => construct_witness(a, seed),
        Cmd::CheckCircular(a) => check_circular(a),
        Cmd::ClassifySet(a) => classify_set(a),
        Cmd::SftInfo(a) => sft_info(a),
        Cmd::IntervalTrace(a) => interval_trace(a),
        Cmd::RotationExample(a) => rotation_example(a),
    }
}

fn to_json<T: serde::Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("serializable")
}

fn flip(x: &SymbolStream, n: u64) -> char {
    if x.at(n) == 0 {
        '1'
    } else {
        '0'
    }
}

/// Random `η` and an `η'` forced to differ from it at index 0.
fn parameter_pair(seed: u64) -> Res<(ParameterStream, ParameterStream)> {
    let eta = random_binary(seed);
    let eta2 = override_positions(&random_binary(seed.wrapping_add(1)), &[(0, flip(&eta, 0))])?;
    Ok((ParameterStream::new(eta)?, ParameterStream::new(eta2)?))
}

fn load_graph(path: Option<&Path>) -> Res<(VertexShift, Value)> {
    let Some(path) = path else {
        return Ok((golden_mean(), json!("golden-mean")));
    };
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Usage(format!("cannot read graph {}: {e}", path.display())))?;
    if text.lines().any(|l| l.trim_start().starts_with("alphabet:")) {
        let spec: SftSpec = text.parse()?;
        Ok((forbidden_to_vertex(&spec)?, json!({ "sft": spec.to_string() })))
    } else {
        let g = VertexShift::from_adjacency(&text)?;
        Ok((g.clone(), json!({ "adjacency": g.to_adjacency() })))
    }
}

fn analyze_substitution(a: &AnalyzeSubstitution) -> Res<Report> {
    let tau = Substitution::parse(&a.rules)?;
    let k = tau.alphabet().len() as u32;
    let bound = a.depth.max((k - 1) * (k - 1) + 1);
    let primitivity = tau.is_primitive(bound);
    let constant = tau.constant_length();
    let mut report_lines = vec![format!(
        "primitive: {}{}",
        if primitivity.primitive { "yes" } else { "no" },
        primitivity.depth.map(|d| format!(" (power {d})")).unwrap_or_default()
    )];
    let mut checks = Vec::new();
    let verdicts = if let ConstantLength::Constant { p } = constant {
        let coincidence = tau.coincidence_certificate(a.depth)?;
        let column = tau.column_number_estimate(a.depth)?;
        let pairs = tau.pair_reachability()?;
        report_lines.push(format!("constant length {p}"));
        match &coincidence {
            Some(c) => {
                report_lines.push(format!("coincidence {c}"));
                checks.push(("coincidence certificate replays", CoincidenceCertificate::new(&tau, c.t(), c.i(), c.e()).is_ok()));
            }
            None => report_lines.push(format!("no coincidence up to depth {}", a.depth)),
        }
        report_lines.push(format!(
            "column number estimate {} at depth {}{}",
            column.estimate,
            column.depth,
            if column.exact { " (exact)" } else { "" }
        ));
        if let Some(ColumnCertificate::ExclusivePair { u, v }) = column.certificate {
            let excl = pairs.get(u, v).is_some_and(|e| e.class == PairClass::Exclusive);
            checks.push(("exclusive-pair certificate is exclusive", excl));
        }
        checks.push(("column estimate within alphabet size", column.estimate >= 1 && column.estimate <= k as usize));
        for e in &pairs.entries {
            let reach: Vec<String> = e.reachable.iter().map(|n| format!("{}{}", n.u, n.v)).collect();
            report_lines.push(format!("{{{},{}}}: {:?} reaching [{}]", e.u, e.v, e.class, reach.join(", ")).to_lowercase());
        }
        json!({
            "constant_length": constant,
            "primitivity": primitivity,
            "coincidence": coincidence.map(|c| json!({ "t": c.t(), "i": c.i(), "e": c.e().to_string(), "display": c.to_string() })),
            "column_number": column,
            "pairs": pairs,
        })
    } else {
        report_lines.push("varying image lengths: column analysis skipped".into());
        json!({ "constant_length": constant, "primitivity": primitivity })
    };
    let mut r = Report::new(
        "analyze-substitution",
        json!({ "rules": tau.to_string(), "depth": a.depth }),
        json!({ "depth": a.depth, "primitivity_bound": bound }),
        verdicts,
    );
    for l in report_lines {
        r = r.line(l);
    }
    for (n, h) in checks {
        r = r.check(n, h);
    }
    Ok(r)
}

fn parse_levels(s: Option<&str>) -> Res<Vec<u64>> {
    let s = s.unwrap_or("1,2,4,8");
    s.split(',')
        .map(|t| t.trim().parse::<u64>().map_err(|e| CliError::Usage(format!("bad epsilon level {t:?}: {e}"))))
        .collect()
}

/// `x, y` agree on every `[3^k, 2·3^k)` and differ everywhere on `[2·3^k, 3^{k+1})` for `3^{k+1} ≤ horizon + 1`.
pub fn triadic_pattern(x: &SymbolStream, y: &SymbolStream, horizon: u64) -> Vec<(u64, bool, bool)> {
    let mut out = Vec::new();
    let mut p = 1u64;
    let mut k = 0;
    while 3 * p <= horizon + 1 {
        let agree = (p..2 * p).all(|n| x.at(n) == y.at(n));
        let differ = (2 * p..3 * p).all(|n| x.at(n) != y.at(n));
        out.push((k, agree, differ));
        p *= 3;
        k += 1;
    }
    out
}

fn pair_construction_name(name: &str) -> &str {
    match name {
        "ex55-fixed-points" => "substitution-fixed-points",
        other => other,
    }
}

fn verify_pair(a: &VerifyPair, seed: u64) -> Res<Report> {
    let levels = parse_levels(a.epsilon_levels.as_deref())?;
    let mut checks: Vec<(String, bool)> = Vec::new();
    let mut extra = json!(null);
    let construction = pair_construction_name(&a.construction);
    let (x, y, default_h) = match construction {
        "substitution-fixed-points" => {
            let tau = match &a.rules {
                Some(r) => Substitution::parse(r)?,
                None => four_letter_example(),
            };
            let letters: Vec<char> = a.letters.as_deref().unwrap_or("a,b").split(',').filter_map(|t| t.trim().chars().next()).collect();
            let [l1, l2] = letters[..] else {
                return Err(CliError::Usage("--letters needs exactly two letters".into()));
            };
            (tau.fixed_point_stream(l1)?, tau.fixed_point_stream(l2)?, DEFAULT_PAIR_HORIZON)
        }
        "base-scrambled" => {
            let (e1, e2) = parameter_pair(seed)?;
            (witnesses::base_scrambled(&e1), witnesses::base_scrambled(&e2), DEFAULT_PAIR_HORIZON)
        }
        "spread" => {
            let (e1, e2) = parameter_pair(seed)?;
            let x = witnesses::spread_embed(&witnesses::base_scrambled(&e1))?;
            let y = witnesses::spread_embed(&witnesses::base_scrambled(&e2))?;
            (x, y, DEFAULT_SPREAD_HORIZON)
        }
        "quartic" => {
            let x = random_binary(seed);
            let y = override_positions(&random_binary(seed.wrapping_add(1)), &[(7, flip(&x, 7))])?;
            (witnesses::quartic_spread(&x)?, witnesses::quartic_spread(&y)?, DEFAULT_SPREAD_HORIZON)
        }
        "golden-blocks" => {
            let bp = witnesses::derive_sft_blocks(&golden_mean(), &Alphabet::binary().word("0")?)?;
            let (e1, e2) = parameter_pair(seed)?;
            let x = witnesses::block_concat(&bp, &witnesses::base_scrambled(&e1))?;
            let y = witnesses::block_concat(&bp, &witnesses::base_scrambled(&e2))?;
            (x, y, DEFAULT_PAIR_HORIZON)
        }
        other => return Err(CliError::Usage(format!("unknown pair construction {other:?}"))),
    };
    let h = a.horizon.unwrap_or(default_h);
    let verdict = pair_profile(&x, &y, h, &levels)?;
    match construction {
        "substitution-fixed-points" => {
            checks.push(("proximal evidence".into(), verdict.proximal_evidence));
            checks.push(("far set thick at every level".into(), verdict.levels.iter().all(|l| l.far_thick.growing)));
            checks.push(("close set not syndetic".into(), !verdict.sprox_evidence));
            if a.rules.is_none() && a.letters.is_none() {
                let pat = triadic_pattern(&x, &y, h);
                checks.push(("agree on [3^k, 2·3^k), differ on [2·3^k, 3^(k+1))".into(), pat.iter().all(|&(_, s, d)| s && d)));
                extra = json!(pat.iter().map(|&(k, s, d)| json!({ "k": k, "agree": s, "differ": d })).collect::<Vec<_>>());
            }
        }
        "spread" => {
            for &m in &levels {
                let past = 1u64 << (m + 1).min(63);
                if past < h {
                    let gap = sprox_core::natsets::gap_profile(&close_set(&x, &y, h, m).shifted(past)).max_gap;
                    checks.push((format!("close gap past 2^{} at m={m} is at most m+2", m + 1), gap <= m + 2));
                }
            }
            if h > 1 << 12 {
                let far = close_set(&x, &y, h, *levels.last().unwrap()).complement();
                checks.push(("far set meets (2^12, horizon]".into(), far.members().iter().any(|&n| n > 1 << 12)));
            }
        }
        "quartic" => {
            let far = close_set(&x, &y, h, 1).complement();
            let run = far.longest_run().map_or(0, |r| r.len);
            if h + 1 >= 1 << 16 {
                checks.push(("far run of length at least 3·4^7".into(), run >= 3 << 14));
            }
            extra = json!({ "longest_far_run": run });
        }
        _ => {
            checks.push(("proximal evidence".into(), verdict.proximal_evidence));
            checks.push(("non-asymptotic evidence".into(), verdict.non_asymptotic_evidence));
        }
    }
    let cap = *levels.last().unwrap();
    let agree = agreement_lengths(Exec::default(), &x, &y, h, cap);
    let mut csv = String::from("n,agreement_length\n");
    for (n, k) in agree.iter().enumerate() {
        writeln!(csv, "{n},{k}").unwrap();
    }
    let mut r = Report::new(
        "verify-pair",
        json!({ "construction": construction, "seed": seed, "x": x, "y": y }),
        json!({ "horizon": h, "epsilon_levels": levels }),
        json!({ "pair": verdict, "details": extra }),
    )
    .line(format!("horizon {h}, levels {levels:?}"))
    .line(format!(
        "proximal evidence {}, sprox evidence {}, non-asymptotic evidence {}",
        verdict.proximal_evidence, verdict.sprox_evidence, verdict.non_asymptotic_evidence
    ));
    for l in &verdict.levels {
        r = r.line(format!(
            "m={}: close max gap {}, far longest run {}, close syndetic {}, far growing {}",
            l.m,
            l.close.max_gap,
            l.far.longest_run,
            l.close_syndetic.is_syndetic(),
            l.far_thick.growing
        ));
    }
    for (n, h) in checks {
        r = r.check(&n, h);
    }
    Ok(r.with_series(csv))
}

fn construct_witness(a: &ConstructWitness, seed: u64) -> Res<Report> {
    if a.length == 0 {
        return Err(CliError::Usage("--length must be positive".into()));
    }
    let mut extra = json!(null);
    let mut checks = Vec::new();
    let stream = match a.construction.as_str() {
        "base-scrambled" => witnesses::base_scrambled(&ParameterStream::new(random_binary(seed))?),
        "spread" => witnesses::spread_embed(&witnesses::base_scrambled(&ParameterStream::new(random_binary(seed))?))?,
        "geometric" => witnesses::geometric_blocks(&random_binary(seed))?,
        "quartic" => witnesses::quartic_spread(&random_binary(seed))?,
        "sft-blocks" | "sync-blocks" => {
            let (g, graph) = load_graph(a.graph.as_deref())?;
            let bp = if a.construction == "sft-blocks" {
                let w = g.alphabet().word(a.word.as_deref().unwrap_or("0"))?;
                witnesses::derive_sft_blocks(&g, &w)?
            } else {
                let s = g.alphabet().word(a.word.as_deref().unwrap_or("1"))?;
                witnesses::synchronizing_blocks(&g, &s, a.depth, &SyncPreset::Plain)?
            };
            let xi = witnesses::base_scrambled(&ParameterStream::new(random_binary(seed))?);
            let prefix = witnesses::block_concat_witness(&bp, &xi, a.length)?;
            checks.push(("prefix lies in the language", g.language_contains(&prefix)));
            extra = json!({ "graph": graph, "b": bp.b.to_string(), "c": bp.c.to_string() });
            let bp = BlockPair::unchecked(bp.b.clone(), bp.c.clone())?;
            witnesses::block_concat(&bp, &xi)?
        }
        "fixed-point" => {
            let rules = a.rules.as_deref().ok_or_else(|| CliError::Usage("fixed-point needs --rules".into()))?;
            let tau = Substitution::parse(rules)?;
            let letter = a.letter.unwrap_or_else(|| tau.alphabet().symbol(0));
            tau.fixed_point_stream(letter)?
        }
        other => return Err(CliError::Usage(format!("unknown witness construction {other:?}"))),
    };
    let prefix: Word = stream.prefix(a.length);
    let replay = stream.recipe().build().map(|s| s.prefix(a.length) == prefix).unwrap_or(false);
    let mut csv = String::from("n,symbol\n");
    for (n, c) in prefix.to_string().chars().enumerate() {
        writeln!(csv, "{n},{c}").unwrap();
    }
    let shown: String = prefix.to_string().chars().take(64).collect();
    let mut r = Report::new(
        "construct-witness",
        json!({ "construction": a.construction, "seed": seed, "stream": stream }),
        json!({ "length": a.length }),
        json!({ "prefix": prefix.to_string(), "details": extra }),
    )
    .line(format!("{} prefix of length {}: {shown}…", a.construction, a.length))
    .check("recipe replays to the same prefix", replay);
    for (n, h) in checks {
        r = r.check(n, h);
    }
    Ok(r.with_series(csv))
}

fn check_circular(a: &CheckCircular) -> Res<Report> {
    let (gen, claimed, recipe) = match (&a.family, &a.words) {
        (Some(f), None) if f == "padded-even" || f == "ex49" => {
            if a.n == 0 {
                return Err(CliError::Usage("--n must be at least 1".into()));
            }
            (witnesses::coded_family(a.n)?, true, json!({ "family": "padded-even", "n": a.n }))
        }
        (Some(f), None) => return Err(CliError::Usage(format!("unknown family {f:?}"))),
        (None, Some(ws)) => {
            let words: Vec<&str> = ws.split(',').map(str::trim).filter(|w| !w.is_empty()).collect();
            (CodedGenerator::from_strs(&Alphabet::binary(), &words)?, false, json!({ "words": words }))
        }
        _ => return Err(CliError::Usage("give exactly one of --family or --words".into())),
    };
    let verdict = circular_code_check(&gen, a.test_length)?;
    let flower = flower_graph(&gen)?;
    let period = flower.graph_period()?;
    let words: Vec<String> = gen.words().iter().map(Word::to_string).collect();
    let mut r = Report::new(
        "check-circular",
        recipe,
        json!({ "test_length": a.test_length }),
        json!({ "words": words, "circular": verdict, "flower_period": period }),
    )
    .line(format!("words {}", words.join(", ")))
    .line(format!("circular up to length {}: {}", a.test_length, verdict.circular))
    .line(format!("flower graph period {}", period.period));
    if let Some(c) = &verdict.counterexample {
        r = r.line(format!("counterexample p={:?} s={:?} xs={:?} ys={:?}", c.p, c.s, c.xs, c.ys));
    }
    if claimed {
        r = r.check("family is circular", verdict.circular).check("flower period is even", period.period % 2 == 0);
    }
    Ok(r)
}

fn classify_set(a: &ClassifySet) -> Res<Report> {
    let rule: NatRule = a.rule.parse()?;
    let set = WindowSet::from_rule(&rule, a.horizon);
    let opts = ClassifyOptions { max_depth: a.max_depth, max_piecewise_gap: a.max_piecewise_gap };
    let c = classify_window_with(&set, opts)?;
    let mut csv = String::from("n,member\n");
    for n in 0..=a.horizon {
        writeln!(csv, "{n},{}", u8::from(set.contains(n))).unwrap();
    }
    Ok(Report::new(
        "classify-set",
        json!({ "rule": rule.to_string() }),
        json!({ "horizon": a.horizon }),
        to_json(&c),
    )
    .line(format!("rule {rule} on [0, {}]", a.horizon))
    .line(format!("syndetic: {}", c.syndetic.is_syndetic()))
    .line(format!("thick (growing runs): {}", c.thick.growing))
    .line(format!("max gap {}, longest run {}", c.profile.max_gap, c.profile.longest_run))
    .with_series(csv))
}

fn sft_info(a: &SftInfo) -> Res<Report> {
    let (g, source) = match (&a.graph, &a.forbidden) {
        (Some(p), None) => load_graph(Some(p))?,
        (None, Some(f)) => {
            let words: Vec<&str> = f.split(',').map(str::trim).filter(|w| !w.is_empty()).collect();
            let spec = SftSpec::from_strs(&a.alphabet, &words)?;
            (forbidden_to_vertex(&spec)?, json!({ "sft": spec.to_string() }))
        }
        _ => return Err(CliError::Usage("give exactly one of --graph or --forbidden".into())),
    };
    let trans = g.is_transitive();
    let period = if trans.transitive { Some(g.graph_period()?) } else { None };
    let mut r_lines = vec![
        format!("{} vertices, {} edges", g.vertex_count(), g.edge_count()),
        format!("transitive: {}", trans.transitive),
    ];
    if let Some(p) = period {
        r_lines.push(format!("period {}, mixing {}", p.period, p.mixing));
    }
    let sync = match &a.sync_word {
        Some(s) => {
            let v = verify_synchronizing(&g, &g.alphabet().word(s)?, a.depth)?;
            r_lines.push(format!("{s} synchronizing up to depth {}: {}", a.depth, v.synchronizing));
            Some(v)
        }
        None => None,
    };
    let mut checks = Vec::new();
    let blocks = match &a.cycle_word {
        Some(w) => {
            let bp = witnesses::derive_sft_blocks(&g, &g.alphabet().word(w)?)?;
            let bb = Word::concat(&[bp.b.clone(), bp.b.clone()])?;
            let bc = Word::concat(&[bp.b.clone(), bp.c.clone()])?;
            let cb = Word::concat(&[bp.c.clone(), bp.b.clone()])?;
            let cc = Word::concat(&[bp.c.clone(), bp.c.clone()])?;
            checks.push(("block pair concatenations admissible", [bb, bc, cb, cc].iter().all(|w| g.language_contains(w))));
            r_lines.push(format!("blocks B={} C={}", bp.b, bp.c));
            Some(json!({ "b": bp.b.to_string(), "c": bp.c.to_string() }))
        }
        None => None,
    };
    let mut r = Report::new(
        "sft-info",
        json!({ "shift": source, "sync_word": a.sync_word, "cycle_word": a.cycle_word }),
        json!({ "depth": a.depth }),
        json!({
            "vertices": g.vertex_count(),
            "edges": g.edge_count(),
            "transitivity": trans,
            "period": period,
            "synchronizing": sync,
            "blocks": blocks,
        }),
    );
    for l in r_lines {
        r = r.line(l);
    }
    for (n, h) in checks {
        r = r.check(n, h);
    }
    Ok(r)
}

fn interval_trace(a: &IntervalTrace) -> Res<Report> {
    let f: PLMap = match &a.map {
        Some(m) => m.parse()?,
        None => PLMap::tent(),
    };
    let alpha = Alphabet::binary().word(&a.coding)?;
    if alpha.is_empty() || alpha.len() > MAX_CODING_LEN {
        return Err(CliError::Usage(format!("--coding must have 1..={MAX_CODING_LEN} symbols")));
    }
    let depth = a.depth.unwrap_or(alpha.len() + 1);
    let variant = match a.variant.as_str() {
        "positive-zero" => LadderVariant::PositiveZero,
        "fixed-points" => {
            let list = a.fixed_points.as_deref().ok_or_else(|| CliError::Usage("fixed-points needs --fixed-points".into()))?;
            let fixed_points = list.split(',').map(parse_q).collect::<sprox_core::Result<Vec<Q>>>()?;
            LadderVariant::FixedPoints { fixed_points }
        }
        other => return Err(CliError::Usage(format!("unknown ladder variant {other:?}"))),
    };
    let ladder = interval::build_ladder(&f, depth, variant)?;
    let schedule = interval::coding_schedule(&ladder, &alpha)?;
    let refinement = interval::trace_point(&f, &schedule)?;
    let k0 = refinement.k0().clone();
    let b = k0.midpoint();
    let trace = interval::verify_trace(&f, &b, &schedule, a.extra_horizon, depth)?;
    let sound = refinement.ks.iter().zip(&schedule.intervals).all(|(k, j)| j.contains(k))
        && refinement.ks.windows(2).all(|w| f.covers(&w[0], &w[1]));
    let fixed: Vec<String> = f.fixed_points().iter().map(ToString::to_string).collect();
    let levels: Vec<String> = ladder.levels.iter().map(ToString::to_string).collect();
    let mut r = Report::new(
        "interval-trace",
        json!({ "map": f.to_string(), "coding": a.coding, "variant": ladder.variant }),
        json!({ "ladder_depth": depth, "scheduled": schedule.len(), "extra_horizon": a.extra_horizon }),
        json!({
            "fixed_points": fixed,
            "ladder": {
                "levels": levels,
                "k": ladder.k,
                "k1": ladder.k1,
                "h": ladder.h,
                "epsilon": fmt_q(&ladder.epsilon),
            },
            "schedule_h_positions": schedule.h_positions(),
            "k0": k0,
            "trace": trace,
        }),
    )
    .line(format!("map {f}; fixed points {}", fixed.join(", ")))
    .line(format!("ladder L_2..L_{depth}: {}; k1 = {}; H = {}, {}", levels.join(" "), ladder.k1, ladder.h[0], ladder.h[1]))
    .line(format!("schedule of {} intervals; K0 = {k0}; b = {}", schedule.len(), fmt_q(&b)))
    .line(format!("epsilon {}", fmt_q(&ladder.epsilon)))
    .check("every scheduled membership holds", true)
    .check("refinement is sound", sound);
    for lv in &trace.levels {
        r = r.check(&format!("hole of {{j : f^j(b) < 1/{}}} within schedule excursion", lv.n), lv.hole_within_excursion);
    }
    Ok(r.with_series(trace.orbit_csv()))
}

fn rotation_example(a: &RotationExample) -> Res<Report> {
    let start: BottomStart = a.start.parse()?;
    let horizon = a.horizon.unwrap_or(rotation::milestone(40));
    let alpha = a.alpha.unwrap_or_else(rotation::default_alpha);
    let milestones = rotation::milestone_check(a.n_max)?;
    let profile = rotation::pair_distance_profile(alpha, horizon, start, a.epsilon)?;
    let dist_ok = profile
        .milestones
        .iter()
        .all(|m| m.angles_equal && (m.distance - 1.0 / m.n as f64).abs() < 1e-12);
    Ok(Report::new(
        "rotation-example",
        json!({ "alpha": alpha, "start": start, "epsilon": a.epsilon }),
        json!({ "n_max": a.n_max, "horizon": horizon }),
        json!({ "milestones": milestones, "distance": profile }),
    )
    .line(format!("milestones hold for n ≤ {}: {}", a.n_max, milestones.iter().all(|m| m.holds)))
    .line(format!("{} milestone distances equal 1/n", profile.milestones.len()))
    .line(format!(
        "holes after milestones: {:?}",
        profile.holes_after_milestones.iter().map(|h| h.len).collect::<Vec<_>>()
    ))
    .check("milestone equalities", milestones.iter().all(|m| m.holds))
    .check("milestone distance equals the height 1/n", dist_ok)
    .check("closeness holes grow", profile.holes_growing)
    .with_series(profile.series_csv()))
}
