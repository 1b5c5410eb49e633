//! One PASS/FAIL line per acceptance criterion. The long templates (5) run
//! only with `B2SCOPE_EXTENDED=1`; otherwise that line reads SKIP.

use std::collections::{BTreeMap, HashSet};
use std::time::{Duration, Instant};

use b2scope_core::equations::{b2_system, satisfies};
use b2scope_core::markov::Chain;
use b2scope_core::orbits::{equivalence_classes, orbit_of};
use b2scope_core::runner::{analyze_all, analyze_class, ResultTable};
use b2scope_core::solve::{sample_solution, solution_directions, solution_from_bases};
use b2scope_core::template::{builtin_template, diamond_propeller, FractalTemplate, BUILTIN_NAMES};
use b2scope_core::wordspace::{check_b2_direct, mass, Assignment, MassDistribution, Word};
use num_rational::BigRational;
use num_traits::{One, Zero};
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

/// Wall-clock bounds per table.
const SG_LIMIT: Duration = Duration::from_secs(60);
const SG3_LIMIT: Duration = Duration::from_secs(30 * 60);
const VICSEK_LIMIT: Duration = Duration::from_secs(15 * 60);
const PENTAGASKET_LIMIT: Duration = Duration::from_secs(30 * 60);
/// Classes sampled per long template for the oracle comparison.
const ORACLE_SAMPLES: usize = 1000;
/// Random weight vectors per class for the reduction check.
const WEIGHT_SAMPLES: usize = 5;
const CHECK_DEPTH: usize = 4;
const SEED: u64 = 2024;

struct Report {
    failures: usize,
}

impl Report {
    fn line(&mut self, id: u32, title: &str, outcome: Result<String, String>) {
        match outcome {
            Ok(detail) => println!("PASS {id:>2} {title}: {detail}"),
            Err(detail) => {
                self.failures += 1;
                println!("FAIL {id:>2} {title}: {detail}");
            }
        }
    }
}

fn hist(pairs: &[(usize, u64)]) -> BTreeMap<usize, u64> {
    pairs.iter().copied().collect()
}

fn jobs() -> usize {
    std::thread::available_parallelism().map_or(1, |n| n.get())
}

fn table_check(
    name: &str,
    classes: usize,
    expected: &[(usize, u64)],
    limit: Option<Duration>,
) -> (Result<String, String>, Option<ResultTable>) {
    let t = builtin_template(name).unwrap();
    let start = Instant::now();
    let table = match analyze_all(&t, jobs(), None) {
        Ok(table) => table,
        Err(e) => return (Err(e.to_string()), None),
    };
    let took = start.elapsed();
    let summary = format!(
        "{} classes, {:?} over {} IFS in {:.2?}",
        table.class_count, table.histogram, table.total_ifs, took
    );
    let ok = table.class_count == classes
        && table.histogram == hist(expected)
        && table.total_ifs == t.total_assignments()
        && limit.is_none_or(|l| took <= l);
    (
        if ok {
            Ok(summary)
        } else {
            Err(format!(
                "{summary}; expected {classes} classes, {:?}",
                hist(expected)
            ))
        },
        Some(table),
    )
}

fn count(t: &FractalTemplate, a: &str) -> usize {
    let a = Assignment::parse(t, a).unwrap();
    analyze_class(t, &a, 1).unwrap().free_parameters
}

fn worked_examples() -> Result<String, String> {
    let sg = builtin_template("sg").unwrap();
    let sg3 = builtin_template("sg3").unwrap();
    let mut got = vec![
        ("sg r0,r1,r2", count(&sg, "r0,r1,r2"), 0),
        ("sg r0,r0,f1", count(&sg, "r0,r0,f1"), 1),
        ("sg r0,r0,r0", count(&sg, "r0,r0,r0"), 2),
        ("sg3 canonical", count(&sg3, "r0,r0,r0,r0,r0,r0"), 0),
        ("sg3 r0,r2,r2,r0,r0,r1", count(&sg3, "r0,r2,r2,r0,r0,r1"), 1),
    ];
    for (n, label) in [(4, "propeller 4"), (5, "propeller 5")] {
        let t = diamond_propeller(n).unwrap();
        got.push((
            label,
            analyze_class(&t, &t.canonical_assignment(), 1)
                .unwrap()
                .free_parameters,
            1,
        ));
    }
    let bad: Vec<String> = got
        .iter()
        .filter(|(_, k, e)| k != e)
        .map(|(l, k, e)| format!("{l}: {k} (expected {e})"))
        .collect();
    if bad.is_empty() {
        Ok(got
            .iter()
            .map(|(l, k, _)| format!("{l}={k}"))
            .collect::<Vec<_>>()
            .join(", "))
    } else {
        Err(bad.join("; "))
    }
}

fn sampled_oracle(name: &str, rng: &mut StdRng) -> Result<usize, String> {
    let t = builtin_template(name).unwrap();
    let mut seen = HashSet::new();
    let mut warnings = 0;
    while seen.len() < ORACLE_SAMPLES {
        let elems = (0..t.n())
            .map(|_| rng.gen_range(0..t.group.len()))
            .collect();
        let orbit = orbit_of(&t, &Assignment::new(&t, elems).unwrap());
        if !seen.insert(orbit.representative.clone()) {
            continue;
        }
        let r = analyze_class(&t, &orbit.representative, orbit.size).map_err(|e| e.to_string())?;
        warnings += r.warning as usize;
    }
    Ok(warnings)
}

fn random_weights(n: usize, rng: &mut StdRng) -> MassDistribution {
    let raw: Vec<u32> = (0..n).map(|_| rng.gen_range(1..20)).collect();
    let total: u32 = raw.iter().sum();
    MassDistribution::new(
        raw.iter()
            .map(|&x| BigRational::new(x.into(), total.into()))
            .collect(),
    )
    .unwrap()
}

fn reduction_soundness(rng: &mut StdRng) -> Result<String, String> {
    let t = builtin_template("sg").unwrap();
    let mut checked = 0;
    let mut satisfied = 0;
    for class in equivalence_classes(&t) {
        let a = &class.representative;
        let sys = b2_system(&t, a).unwrap();
        let dirs = solution_directions(&sys);
        let mut candidates: Vec<MassDistribution> = (0..WEIGHT_SAMPLES)
            .map(|_| random_weights(t.n(), rng))
            .collect();
        // points of the solution family, so both sides of the equivalence occur
        for _ in 0..WEIGHT_SAMPLES {
            let bases: Vec<BigRational> = dirs
                .iter()
                .map(|_| BigRational::new(rng.gen_range(1..8).into(), 4.into()))
                .collect();
            candidates.push(solution_from_bases(&dirs, &bases, t.n()));
        }
        for m in &candidates {
            let algebraic = satisfies(&sys, m);
            let direct = check_b2_direct(&t, a, m, CHECK_DEPTH).pass;
            if algebraic != direct {
                return Err(format!(
                    "{} with {m}: system {algebraic}, direct {direct}",
                    a.encode(&t)
                ));
            }
            checked += 1;
            satisfied += algebraic as usize;
        }
        let k = analyze_class(&t, a, class.size).unwrap().free_parameters;
        if k >= 1 {
            let m = sample_solution(&sys);
            if m.is_homogeneous() || !check_b2_direct(&t, a, &m, CHECK_DEPTH).pass {
                return Err(format!("sample {m} for {} fails", a.encode(&t)));
            }
        }
    }
    Ok(format!("{checked} weight vectors agree ({satisfied} satisfying), samples pass at depth {CHECK_DEPTH}"))
}

fn green_identity(rng: &mut StdRng) -> Result<String, String> {
    let mut words = 0;
    for name in ["sg", "sg3"] {
        let t = builtin_template(name).unwrap();
        let a = t.canonical_assignment();
        for _ in 0..WEIGHT_SAMPLES {
            let m = random_weights(t.n(), rng);
            let chain = Chain::new(&t, &a, &m);
            for len in 0..=CHECK_DEPTH {
                for w in Word::all(t.n(), len) {
                    if chain.green(&Word::empty(), &w) != mass(&m, &w) {
                        return Err(format!("{name} {m}: g(∅,{}) ≠ m", w.render(t.n())));
                    }
                    words += 1;
                    if len < CHECK_DEPTH {
                        let mut row = BigRational::zero();
                        for u in b2scope_core::wordspace::equivalence_class(&t, &a, &w) {
                            for l in 0..t.n() {
                                row += chain.transition(&w, &u.child(l));
                            }
                        }
                        if !row.is_one() {
                            return Err(format!(
                                "{name} {m}: row {} sums to {row}",
                                w.render(t.n())
                            ));
                        }
                    }
                }
            }
        }
    }
    Ok(format!(
        "{words} Green values exact, transition rows sum to 1"
    ))
}

fn orbit_laws(tables: &BTreeMap<&str, ResultTable>) -> Result<String, String> {
    for name in BUILTIN_NAMES {
        let t = builtin_template(name).unwrap();
        let total: u64 = equivalence_classes(&t).iter().map(|c| c.size as u64).sum();
        if total != t.total_assignments() {
            return Err(format!("{name}: orbit sizes sum to {total}"));
        }
    }
    let sg = builtin_template("sg").unwrap();
    for class in equivalence_classes(&sg) {
        let k = analyze_class(&sg, &class.representative, class.size)
            .unwrap()
            .free_parameters;
        for m in orbit_of(&sg, &class.representative).members.unwrap() {
            if analyze_class(&sg, &m, class.size).unwrap().free_parameters != k {
                return Err(format!(
                    "count varies on the orbit of {}",
                    class.representative.encode(&sg)
                ));
            }
        }
    }
    for (name, reference) in tables {
        let t = builtin_template(name).unwrap();
        let want = reference.to_json().unwrap();
        for j in [1, 2, jobs().max(4)] {
            let got = analyze_all(&t, j, None).unwrap().to_json().unwrap();
            if got != want {
                return Err(format!("{name}: output differs with {j} jobs"));
            }
        }
    }
    Ok(format!(
        "partition exact on all templates, sg orbits uniform, identical output for jobs 1, 2, {}",
        jobs().max(4)
    ))
}

fn main() {
    let mut report = Report { failures: 0 };
    let mut rng = StdRng::seed_from_u64(SEED);
    let mut tables = BTreeMap::new();

    let cases: [(u32, &str, usize, &[(usize, u64)], Duration); 4] = [
        (1, "sg", 44, &[(0, 194), (1, 21), (2, 1)], SG_LIMIT),
        (2, "sg3", 7860, &[(0, 46257), (1, 399)], SG3_LIMIT),
        (
            3,
            "vicsek",
            4360,
            &[(0, 20544), (1, 10112), (2, 2048), (3, 64)],
            VICSEK_LIMIT,
        ),
        (
            4,
            "pentagasket",
            10104,
            &[(0, 88025), (1, 11875), (2, 100)],
            PENTAGASKET_LIMIT,
        ),
    ];
    for (id, name, classes, expected, limit) in cases {
        let (outcome, table) = table_check(name, classes, expected, Some(limit));
        report.line(id, &format!("{name} table"), outcome);
        if let Some(table) = table {
            tables.insert(name, table);
        }
    }

    if std::env::var("B2SCOPE_EXTENDED").as_deref() == Ok("1") {
        let (filled, table) =
            table_check("pentagasket-filled", 100220, &[(0, 999995), (1, 5)], None);
        let filled = match (filled, table) {
            (Ok(s), Some(t)) if t.class_histogram.get(&1) == Some(&1) => Ok(s),
            (Ok(s), _) => Err(format!("{s}; expected a single one-parameter class")),
            (e, _) => e,
        };
        let (hexa, _) = table_check(
            "hexagasket",
            250010,
            &[
                (0, 2599398),
                (1, 361007),
                (2, 24075),
                (3, 1452),
                (4, 51),
                (5, 1),
            ],
            None,
        );
        let outcome = match (filled, hexa) {
            (Ok(a), Ok(b)) => Ok(format!("pentagasket-filled {a}; hexagasket {b}")),
            (a, b) => Err(format!(
                "pentagasket-filled {}; hexagasket {}",
                a.unwrap_or_else(|e| e),
                b.map_or_else(|e| e, |s| format!("ok ({s})"))
            )),
        };
        report.line(5, "extended tables", outcome);
    } else {
        println!("SKIP  5 extended tables: set B2SCOPE_EXTENDED=1");
    }

    let counts: Vec<(&str, usize)> = BUILTIN_NAMES
        .iter()
        .map(|n| (*n, builtin_template(n).unwrap().equation_count()))
        .collect();
    let want = [3, 9, 4, 5, 25, 6];
    let got: Vec<usize> = counts.iter().map(|c| c.1).collect();
    let detail = format!("{counts:?}");
    report.line(
        6,
        "equation counts",
        if got == want { Ok(detail) } else { Err(detail) },
    );

    report.line(7, "worked examples", worked_examples());

    let oracle = (|| {
        let warnings: usize = tables.values().map(|t| t.warnings).sum();
        let classes: usize = tables.values().map(|t| t.class_count).sum();
        let mut sampled = 0;
        let mut sample_warnings = 0;
        for name in ["pentagasket-filled", "hexagasket"] {
            sample_warnings += sampled_oracle(name, &mut rng)?;
            sampled += ORACLE_SAMPLES;
        }
        if tables.len() < 4 || warnings + sample_warnings > 0 {
            return Err(format!("{warnings} + {sample_warnings} warnings"));
        }
        Ok(format!(
            "{classes} classes exhaustively and {sampled} sampled agree, no warnings"
        ))
    })();
    report.line(8, "oracle agreement", oracle);

    report.line(9, "reduction soundness", reduction_soundness(&mut rng));
    report.line(10, "green identity", green_identity(&mut rng));
    report.line(11, "orbit laws", orbit_laws(&tables));

    if report.failures > 0 {
        eprintln!("{} criteria failed", report.failures);
        std::process::exit(1);
    }
}
