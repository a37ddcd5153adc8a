//! Acceptance gate: one PASS/FAIL line per criterion.

use std::collections::BTreeSet;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use sprox_cli::{run, stable_json};
use sprox_core::interval::{self, q, LadderVariant, PLMap, RatInterval, Q};
use sprox_core::natsets::gap_profile;
use sprox_core::recipe::{override_positions, random_binary};
use sprox_core::relations::{close_set, translate_mod};
use sprox_core::rotation::{self, BottomStart};
use sprox_core::subshifts::{circular_code_check, flower_graph, forbidden_to_vertex, SftSpec};
use sprox_core::substitution::{binary_coincidence_example, four_letter_example, ColumnCertificate, PairClass, Substitution};
use sprox_core::witnesses::{self, BlockPair, ParameterStream};
use sprox_core::{Alphabet, SymbolStream, Word};

type Outcome = Result<String, String>;

fn ensure(cond: bool, msg: impl Into<String>) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg.into())
    }
}

fn flip(x: &SymbolStream, n: u64) -> char {
    if x.at(n) == 0 {
        '1'
    } else {
        '0'
    }
}

fn criterion_1() -> Outcome {
    let t = Instant::now();
    let tau = four_letter_example();
    let prim = tau.is_primitive(4);
    ensure(prim.primitive && prim.depth.is_some_and(|d| d <= 4), format!("primitivity {prim:?}"))?;
    let pairs = tau.pair_reachability().map_err(|e| e.to_string())?;
    let want: BTreeSet<(char, char)> = [('a', 'c'), ('b', 'd')].into();
    for (u, v) in [('b', 'd'), ('a', 'c')] {
        let e = pairs.get(u, v).ok_or("missing pair")?;
        let got: BTreeSet<(char, char)> = e.reachable.iter().map(|n| (n.u, n.v)).collect();
        ensure(e.class == PairClass::Exclusive && got == want, format!("{{{u},{v}}}: {:?} {got:?}", e.class))?;
    }
    ensure(pairs.get('a', 'b').unwrap().class == PairClass::Neither, "{a,b} should be neither")?;
    let col = tau.column_number_estimate(5).map_err(|e| e.to_string())?;
    ensure(col.estimate == 2 && col.exact && col.certificate.is_some(), format!("column {col:?}"))?;
    let x = tau.fixed_point_stream('a').map_err(|e| e.to_string())?;
    let y = tau.fixed_point_stream('b').map_err(|e| e.to_string())?;
    let h = 3u64.pow(9);
    let close = close_set(&x, &y, h, 1);
    let mut p = 1u64;
    for k in 0..=8 {
        ensure((p..2 * p).all(|n| close.contains(n)), format!("agreement fails on [3^{k}, 2·3^{k})"))?;
        ensure((2 * p..3 * p).all(|n| !close.contains(n)), format!("disagreement fails on [2·3^{k}, 3^{})", k + 1))?;
        p *= 3;
    }
    let el = t.elapsed();
    ensure(el < Duration::from_secs(10), format!("runtime {el:?} ≥ 10 s"))?;
    Ok(format!("primitive at power {}, column number 2, blocks k ≤ 8 exact, {el:.2?}", prim.depth.unwrap()))
}

fn criterion_2() -> Outcome {
    let tau = binary_coincidence_example();
    let c = tau.coincidence_certificate(3).map_err(|e| e.to_string())?.ok_or("no coincidence found")?;
    ensure((c.t(), c.i(), c.e()) == (1, 1, '0'), format!("certificate {c}"))?;
    let col = tau.column_number_estimate(3).map_err(|e| e.to_string())?;
    ensure(col.estimate == 1 && col.certificate == Some(ColumnCertificate::Coincidence), format!("column {col:?}"))?;
    Ok(format!("certificate {c}, column number 1"))
}

fn criterion_3() -> Outcome {
    let h = 1u64 << 16;
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for trial in 0..20 {
        let eta = random_binary(rng.gen());
        let eta2 = override_positions(&random_binary(rng.gen()), &[(0, flip(&eta, 0))]).unwrap();
        let x = witnesses::spread_embed(&witnesses::base_scrambled(&ParameterStream::new(eta).unwrap())).unwrap();
        let y = witnesses::spread_embed(&witnesses::base_scrambled(&ParameterStream::new(eta2).unwrap())).unwrap();
        for m in 1..=8u64 {
            let close = close_set(&x, &y, h, m);
            let gap = gap_profile(&close.shifted(1 << (m + 1))).max_gap;
            ensure(gap <= m + 2, format!("trial {trial}, m={m}: gap {gap} > {}", m + 2))?;
            ensure(
                close.complement().members().iter().any(|&n| n > 1 << 12),
                format!("trial {trial}, m={m}: far set empty beyond 2^12"),
            )?;
        }
    }
    Ok("20 pairs, m ≤ 8: gap ≤ m+2 past 2^(m+1); far set meets (2^12, 2^16]".into())
}

fn criterion_4() -> Outcome {
    let h = 4u64.pow(8);
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let mut shortest = u64::MAX;
    for trial in 0..10 {
        let x = random_binary(rng.gen());
        let y = override_positions(&random_binary(rng.gen()), &[(7, flip(&x, 7))]).unwrap();
        let zx = witnesses::quartic_spread(&x).unwrap();
        let zy = witnesses::quartic_spread(&y).unwrap();
        let run = close_set(&zx, &zy, h, 1).complement().longest_run().map_or(0, |r| r.len);
        ensure(run >= 3 * 4u64.pow(7), format!("trial {trial}: far run {run}"))?;
        shortest = shortest.min(run);
    }
    Ok(format!("10 pairs, shortest longest far run {shortest} ≥ {}", 3 * 4u64.pow(7)))
}

fn criterion_5() -> Outcome {
    let gen = witnesses::coded_family(4).map_err(|e| e.to_string())?;
    let v = circular_code_check(&gen, 60).map_err(|e| e.to_string())?;
    ensure(v.circular && v.counterexample.is_none(), format!("{v:?}"))?;
    let mut periods = Vec::new();
    for n in 1..=4 {
        let p = flower_graph(&witnesses::coded_family(n).unwrap()).unwrap().graph_period().map_err(|e| e.to_string())?;
        ensure(p.period % 2 == 0, format!("n={n}: period {}", p.period))?;
        periods.push(p.period);
    }
    Ok(format!("circular at length 60; flower periods {periods:?}"))
}

fn criterion_6() -> Outcome {
    let spec = SftSpec::from_strs("01", &["11"]).map_err(|e| e.to_string())?;
    let g = forbidden_to_vertex(&spec).map_err(|e| e.to_string())?;
    ensure(g.is_transitive().transitive, "not transitive")?;
    let p = g.graph_period().map_err(|e| e.to_string())?;
    ensure(p.period == 1 && p.mixing, format!("{p:?}"))?;
    let bp = witnesses::derive_sft_blocks(&g, &Alphabet::binary().word("0").unwrap()).map_err(|e| e.to_string())?;
    BlockPair::new(bp.b.clone(), bp.c.clone(), g.clone()).map_err(|e| e.to_string())?;
    let xi = witnesses::base_scrambled(&ParameterStream::new(random_binary(6)).unwrap());
    let w = witnesses::block_concat_witness(&bp, &xi, 1 << 12).map_err(|e| e.to_string())?;
    ensure(w.len() == 1 << 12, "wrong length")?;
    ensure(spec.admits(w.symbols()), "forbidden factor present")?;
    ensure(g.language_contains(&w), "prefix not in the language")?;
    let s = w.symbols();
    for len in 1..=2 * bp.b.len() {
        for i in 0..=s.len() - len {
            let f = Word::from_symbols(w.alphabet(), s[i..i + len].to_vec()).unwrap();
            ensure(g.language_contains(&f), format!("factor at {i} of length {len}"))?;
        }
    }
    Ok(format!("period 1, B={} C={}, 4096-prefix admissible", bp.b, bp.c))
}

fn criterion_7() -> Outcome {
    let t = Instant::now();
    let f = PLMap::tent();
    let fps: Vec<String> = f.fixed_points().iter().map(ToString::to_string).collect();
    ensure(fps == ["0", "2/3"], format!("fixed points {fps:?}"))?;
    let ladder = interval::build_ladder(&f, 5, LadderVariant::PositiveZero).map_err(|e| e.to_string())?;
    ladder.verify().map_err(|e| e.to_string())?;
    let sep = ladder.h[0].dist(&ladder.h[1]);
    let third = q(1, 3);
    let mut starts: Vec<(String, Q)> = Vec::new();
    for bits in 0..16u32 {
        let a: String = (0..4).map(|i| if bits >> (3 - i) & 1 == 1 { '1' } else { '0' }).collect();
        let alpha = Alphabet::binary().word(&a).unwrap();
        let s = interval::coding_schedule(&ladder, &alpha).map_err(|e| e.to_string())?;
        let r = interval::trace_point(&f, &s).map_err(|e| e.to_string())?;
        let b = r.k0().midpoint();
        let rep = interval::verify_trace(&f, &b, &s, 0, 5).map_err(|e| format!("{a}: {e}"))?;
        let lv = rep.levels.iter().find(|l| l.n == 3).ok_or("no level 3")?;
        ensure(lv.profile.longest_hole <= s.excursion(&third), format!("{a}: hole beyond excursion"))?;
        starts.push((a, b));
    }
    for (a, b) in &starts {
        for (a2, b2) in &starts {
            if a.as_bytes()[0] != a2.as_bytes()[0] {
                let d = if b > b2 { b - b2 } else { b2 - b };
                ensure(d >= sep, format!("{a} vs {a2}: separation below dist(H0, H1)"))?;
            }
        }
    }
    let el = t.elapsed();
    ensure(el < Duration::from_secs(30), format!("runtime {el:?} ≥ 30 s"))?;
    Ok(format!("16 codings traced, separation ≥ {}, {el:.2?}", interval::fmt_q(&sep)))
}

fn criterion_8() -> Outcome {
    let ms = rotation::milestone_check(50).map_err(|e| e.to_string())?;
    ensure(ms.len() == 50 && ms.iter().all(|m| m.holds), "milestone equality fails")?;
    let p = rotation::pair_distance_profile(rotation::default_alpha(), rotation::milestone(40), BottomStart::Origin, 0.1)
        .map_err(|e| e.to_string())?;
    for m in &p.milestones {
        ensure(m.n % 2 == 0 && m.angles_equal && m.height == q(1, m.n as i64), format!("n={}: not exact", m.n))?;
        ensure((m.distance - 1.0 / m.n as f64).abs() <= 1e-12, format!("n={}: distance {}", m.n, m.distance))?;
    }
    ensure(p.holes_growing, format!("holes {:?}", p.holes_after_milestones))?;
    let lens: Vec<u64> = p.holes_after_milestones.iter().map(|h| h.len).collect();
    Ok(format!("50 milestones exact; {} even distances = 1/n; holes {}..{}", p.milestones.len(), lens[0], lens[lens.len() - 1]))
}

/// Column pairs of `τ^k(u), τ^k(v)` for `k ≤ depth`, by direct expansion.
fn brute_reach(tau: &Substitution, u: usize, v: usize, depth: u32) -> BTreeSet<(u8, u8)> {
    let a = tau.alphabet();
    let mut out = BTreeSet::new();
    for k in 0..=depth {
        let wu = tau.apply_power(&Word::from_symbols(a, vec![u as u8]).unwrap(), k).unwrap();
        let wv = tau.apply_power(&Word::from_symbols(a, vec![v as u8]).unwrap(), k).unwrap();
        for (&x, &y) in wu.symbols().iter().zip(wv.symbols()) {
            out.insert((x.min(y), x.max(y)));
        }
    }
    out
}

fn rational_eval(bp: &[(i64, i64)], d: i64, x: i64) -> Q {
    // breakpoints and values are multiples of 1/d; x is a grid index
    let i = bp.windows(2).position(|w| w[0].0 <= x && x <= w[1].0).unwrap();
    let ((t0, v0), (t1, v1)) = (bp[i], bp[i + 1]);
    q(v0, d) + q(v1 - v0, 1) * q(x - t0, t1 - t0) / q(d, 1)
}

fn criterion_9() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    for trial in 0..50 {
        let k = rng.gen_range(2..=4usize);
        let p = rng.gen_range(2..=3usize);
        let a = Alphabet::digits(k).unwrap();
        let images: Vec<Word> = (0..k)
            .map(|_| Word::from_symbols(&a, (0..p).map(|_| rng.gen_range(0..k) as u8).collect()).unwrap())
            .collect();
        let tau = Substitution::new(a.clone(), images).unwrap();
        let report = tau.pair_reachability().map_err(|e| e.to_string())?;
        let depth = (k * (k + 1) / 2).max(4) as u32;
        let reach = |u: usize, v: usize| brute_reach(&tau, u, v, depth);
        let exclusive = |pair: &(u8, u8)| reach(pair.0 as usize, pair.1 as usize).iter().all(|(x, y)| x != y);
        for u in 0..k {
            for v in u + 1..k {
                let r = reach(u, v);
                let distinct: BTreeSet<(char, char)> =
                    r.iter().filter(|(x, y)| x != y).map(|&(x, y)| (a.symbol(x), a.symbol(y))).collect();
                let reaches_equal = r.iter().any(|(x, y)| x == y);
                let reaches_excl = r.iter().any(|pr| pr.0 != pr.1 && exclusive(pr));
                let class = match (reaches_equal, reaches_excl) {
                    (false, _) => PairClass::Exclusive,
                    (true, false) => PairClass::Attractive,
                    (true, true) => PairClass::Neither,
                };
                let e = report.get(a.symbol(u as u8), a.symbol(v as u8)).unwrap();
                let got: BTreeSet<(char, char)> = e.reachable.iter().map(|n| (n.u, n.v)).collect();
                ensure(got == distinct && e.class == class && e.reaches_equal.is_some() == reaches_equal,
                    format!("substitution trial {trial} ({tau}): pair {u},{v}"))?;
            }
        }
    }
    let d = 1000i64;
    for trial in 0..100 {
        let mut ts: BTreeSet<i64> = (0..rng.gen_range(1..6)).map(|_| rng.gen_range(1..d)).collect();
        ts.insert(0);
        ts.insert(d);
        let bp: Vec<(i64, i64)> = ts.into_iter().map(|t| (t, rng.gen_range(0..=d))).collect();
        let f = PLMap::new(bp.iter().map(|&(t, _)| q(t, d)).collect(), bp.iter().map(|&(_, v)| q(v, d)).collect()).unwrap();
        let (k0, k1) = { let (a, b) = (rng.gen_range(0..=d), rng.gen_range(0..=d)); (a.min(b), a.max(b)) };
        let (l0, l1) = { let (a, b) = (rng.gen_range(0..=d), rng.gen_range(0..=d)); (a.min(b), a.max(b)) };
        let kk = RatInterval::new(q(k0, d), q(k1, d)).unwrap();
        let ll = RatInterval::new(q(l0, d), q(l1, d)).unwrap();
        let samples: Vec<Q> = (k0..=k1).map(|x| rational_eval(&bp, d, x)).collect();
        let lo = samples.iter().min().unwrap();
        let hi = samples.iter().max().unwrap();
        let oracle = lo <= ll.lo() && ll.hi() <= hi;
        ensure(f.covers(&kk, &ll) == oracle, format!("covers trial {trial}: {f} {kk} {ll}"))?;
    }
    for trial in 0..100u64 {
        let x = random_binary(rng.gen());
        let pos: u64 = rng.gen_range(0..200);
        let y = override_positions(&x, &[(pos, flip(&x, pos))]).unwrap();
        let y = override_positions(&y, &[(pos + 1 + rng.gen_range(0..50), '1')]).unwrap();
        let z = random_binary(rng.gen());
        let (xz, yz) = (translate_mod(&x, &z).unwrap(), translate_mod(&y, &z).unwrap());
        ensure(x.first_difference(&y, 400) == xz.first_difference(&yz, 400), format!("translation trial {trial}"))?;
        ensure(x.first_difference(&y, 400) == Some(pos), format!("translation trial {trial}: setup"))?;
    }
    Ok("50 substitutions, 100 covering checks, 100 translations agree".into())
}

fn cli_commands() -> Vec<Vec<&'static str>> {
    vec![
        vec!["analyze-substitution", "--rules", "a->aab;b->bad;c->ccd;d->dcb", "--depth", "5"],
        vec!["verify-pair", "--construction", "substitution-fixed-points", "--horizon", "19683"],
        vec!["verify-pair", "--construction", "spread", "--horizon", "8192", "--seed", "7"],
        vec!["construct-witness", "--construction", "sft-blocks", "--length", "512"],
        vec!["check-circular", "--family", "padded-even", "--n", "3", "--test-length", "60"],
        vec!["classify-set", "--rule", "triadic-blocks", "--horizon", "2000"],
        vec!["sft-info", "--forbidden", "11", "--sync-word", "1", "--cycle-word", "0"],
        vec!["interval-trace", "--coding", "0110"],
        vec!["rotation-example", "--n-max", "20"],
    ]
}

fn criterion_10() -> Outcome {
    let cmds = cli_commands();
    for c in &cmds {
        let argv = || std::iter::once("sprox".to_string()).chain(c.iter().map(|s| s.to_string()));
        let (a, b) = (run(argv()), run(argv()));
        ensure(a.code == 0 && b.code == 0, format!("{}: exit {} / {}: {}", c[0], a.code, b.code, a.stderr))?;
        let (ra, rb) = (a.report.unwrap(), b.report.unwrap());
        ensure(stable_json(&ra) == stable_json(&rb), format!("{}: JSON differs between runs", c[0]))?;
    }
    Ok(format!("{} invocations over 8 subcommands replay byte-identically", cmds.len()))
}

type Criterion = (&'static str, fn() -> Outcome);

fn main() {
    let criteria: [Criterion; 10] = [
        ("four-letter substitution suite", criterion_1),
        ("binary coincidence", criterion_2),
        ("spread-embedded pairs", criterion_3),
        ("quartic-spread far runs", criterion_4),
        ("coded family circularity", criterion_5),
        ("golden-mean pipeline", criterion_6),
        ("tent-map interval suite", criterion_7),
        ("rotation example", criterion_8),
        ("cross-module oracles", criterion_9),
        ("CLI determinism", criterion_10),
    ];
    let mut failed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        match f() {
            Ok(detail) => println!("criterion {:>2} PASS  {name}: {detail}", i + 1),
            Err(why) => {
                failed += 1;
                println!("criterion {:>2} FAIL  {name}: {why}", i + 1);
            }
        }
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
