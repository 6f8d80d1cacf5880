use std::fs::File;
use std::io::{self, BufReader, BufWriter, Write};

use coexist_core::asymptotics::{
    crossover_ranges, td_exponents, td_secondary_factor, throughput_factor,
};
use coexist_core::experiments::{
    run_concentration_sweep, run_factor_curve, run_tracking_sweep, sidecar_path, tracking_defaults,
    write_csv, write_json, Aggregate, ConcentrationSpec, Engine, EquivalenceSpec, Statistic,
    SweepSpec,
};
use coexist_core::rates::{primary_alone, secondary_alone, sim_rates, ub_rates};
use coexist_core::scheduler::{optimal_exponents, schedule_with_counts};
use coexist_core::{
    ActivationExponents, AsymptoticConfig, CoexistenceLevel, Error, NetworkInstance, Rational,
    Result, Scalar, Scenario, Strategy, StreamKey, SystemParams, Verdict,
};
use serde::Serialize;

use crate::args::{
    ConcentrateArgs, CrossoverArgs, CurveArgs, EngineArg, ScenarioArgs, StatArg, SweepArgs,
    TheoryArgs,
};

fn level_or_natural(
    scenario: Scenario,
    level: Option<CoexistenceLevel>,
) -> Result<CoexistenceLevel> {
    let level = level.unwrap_or(scenario.natural_level());
    level.check(scenario)?;
    Ok(level)
}

fn csv_to_stdout<T: Serialize>(rows: &[T]) -> Result<()> {
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(io::stdout().lock());
    for row in rows {
        w.serialize(row)?;
    }
    w.flush()?;
    Ok(())
}

fn print_aggregates(to: &mut dyn Write, aggregates: &[Aggregate]) -> Result<()> {
    writeln!(
        to,
        "{:>10}  {:>6}  {:>9}  {:>9}  {:>9}",
        "n", "trials", "mean", "median", "stddev"
    )?;
    for a in aggregates {
        writeln!(
            to,
            "{:>10}  {:>6}  {:>9.5}  {:>9.5}  {:>9.5}",
            a.n, a.trials, a.mean, a.median, a.stddev
        )?;
    }
    Ok(())
}

// fail before a long run rather than after it
fn check_writable(path: Option<&std::path::PathBuf>) -> Result<()> {
    if let Some(p) = path {
        File::create(p)
            .map_err(|e| io::Error::new(e.kind(), format!("cannot write {}: {e}", p.display())))?;
    }
    Ok(())
}

fn report_written(paths: &[std::path::PathBuf], rows: usize) {
    let rest: Vec<String> = paths[1..].iter().map(|p| p.display().to_string()).collect();
    println!(
        "wrote {rows} rows to {} (also {})",
        paths[0].display(),
        rest.join(", ")
    );
}

pub fn theory(a: &TheoryArgs) -> Result<()> {
    let level = level_or_natural(a.scenario, a.level)?;
    let cfg = AsymptoticConfig::new(a.scenario, level, a.f, a.alpha, a.gamma)?;
    let r = throughput_factor(&cfg)?;
    let e = optimal_exponents(
        a.scenario,
        level,
        a.f.to_f64(),
        a.alpha.to_f64(),
        a.gamma.to_f64(),
    )?;
    let td = td_exponents(a.scenario, a.f, a.alpha)?;
    let td_factor = td_secondary_factor(a.f)?;
    let beats = r.feasible && r.factor > td_factor;
    if a.csv {
        println!("scenario,level,f,alpha,gamma,factor,factor_exact,feasible,alpha_bar,beta,td_factor,beats_td");
        println!(
            "{},{},{},{},{},{},{},{},{},{},{},{}",
            a.scenario,
            level,
            a.f,
            a.alpha,
            a.gamma,
            r.factor.to_f64(),
            r.factor,
            r.feasible,
            e.alpha_bar,
            e.beta,
            td_factor,
            beats
        );
        return Ok(());
    }
    println!(
        "scenario {}, level {level}, f = {}, alpha = {}, gamma = {}",
        a.scenario, a.f, a.alpha, a.gamma
    );
    println!("factor: {} = {}", r.factor, r.factor.to_f64());
    println!("feasible: {}", if r.feasible { "yes" } else { "no" });
    println!(
        "optimal exponents: alpha_bar = {}, beta = {}",
        e.alpha_bar, e.beta
    );
    println!("time division, primary: {}", td.primary);
    println!("time division, secondary: {}", td.secondary);
    println!("time-division factor: {td_factor}");
    println!("beats time division: {}", if beats { "yes" } else { "no" });
    Ok(())
}

fn ranges_text(
    scenario: Scenario,
    level: CoexistenceLevel,
    alpha: Rational,
    gamma: Rational,
) -> Result<String> {
    match crossover_ranges(scenario, level, alpha, gamma) {
        Ok(r) if r.is_empty() => Ok("none".into()),
        Ok(r) => Ok(r
            .iter()
            .map(|i| i.to_string())
            .collect::<Vec<_>>()
            .join(" ∪ ")),
        Err(Error::Refused(why)) => Ok(format!("unavailable ({why})")),
        Err(e) => Err(e),
    }
}

pub fn crossover(a: &CrossoverArgs) -> Result<()> {
    let levels = match a.level {
        Some(l) => {
            l.check(a.scenario)?;
            vec![l]
        }
        None if a.scenario == Scenario::DD => vec![CoexistenceLevel::PureInterference],
        None => {
            // the pure level never beats time division outside dd
            let mut ls: Vec<_> = a
                .scenario
                .levels()
                .into_iter()
                .filter(|&l| l != CoexistenceLevel::PureInterference)
                .collect();
            ls.sort_by_key(|&l| l != CoexistenceLevel::Symmetric);
            ls
        }
    };
    if let [only] = levels[..] {
        println!("{}", ranges_text(a.scenario, only, a.alpha, a.gamma)?);
        return Ok(());
    }
    let parts = levels
        .iter()
        .map(|&l| {
            Ok(format!(
                "{l}: {}",
                ranges_text(a.scenario, l, a.alpha, a.gamma)?
            ))
        })
        .collect::<Result<Vec<_>>>()?;
    println!("{}", parts.join("; "));
    Ok(())
}

pub fn curve(a: &CurveArgs) -> Result<()> {
    check_writable(a.out.as_ref())?;
    let table = run_factor_curve(a.scenario, a.level, a.alpha, a.gamma, a.f_step)?;
    let crossings: Vec<String> = table
        .crossovers
        .iter()
        .map(|c| match &c.unavailable {
            Some(why) => format!("{}: unavailable ({why})", c.level),
            None if c.ranges.is_empty() => format!("{}: none", c.level),
            None => format!("{}: {}", c.level, c.ranges.join(" ∪ ")),
        })
        .collect();
    match &a.out {
        Some(path) => {
            let paths = table.write(path)?;
            for c in &crossings {
                println!("{c}");
            }
            report_written(&paths, table.rows.len());
        }
        None => {
            csv_to_stdout(&table.rows)?;
            for c in &crossings {
                eprintln!("{c}");
            }
        }
    }
    Ok(())
}

pub fn sweep(a: &SweepArgs) -> Result<()> {
    let (default_level, defaults) = tracking_defaults(a.scenario, a.alpha);
    let level = a.level.unwrap_or(default_level);
    let beta = a.beta.unwrap_or(if level == CoexistenceLevel::Symmetric {
        0.5
    } else {
        1.0
    });
    let mut spec = SweepSpec::new(a.scenario, a.alpha, a.n.clone(), a.trials, a.seed);
    spec.level = level;
    spec.exponents = ActivationExponents::new(a.alpha_bar.unwrap_or(defaults.alpha_bar), beta)?;
    (spec.power, spec.noise) = a.power.linear_powers();
    spec.engine = match a.engine {
        EngineArg::Aggregate => Engine::Aggregate,
        EngineArg::Full => Engine::Full,
    };
    spec.budget = a.budget;
    check_writable(a.out.as_ref())?;
    let result = run_tracking_sweep(&spec)?;
    match &a.out {
        Some(path) => {
            let paths = result.write(path)?;
            println!(
                "ratio actual/intermediate, {} {}",
                spec.scenario, spec.level
            );
            print_aggregates(&mut io::stdout().lock(), &result.aggregates)?;
            report_written(&paths, result.rows.len());
        }
        None => {
            csv_to_stdout(&result.rows)?;
            print_aggregates(&mut io::stderr().lock(), &result.aggregates)?;
        }
    }
    Ok(())
}

pub fn concentrate(a: &ConcentrateArgs) -> Result<()> {
    let stat = match a.stat {
        StatArg::Max => Statistic::Max,
        StatArg::LowerSum => Statistic::LowerSum,
    };
    let mut spec = ConcentrationSpec::new(a.model, stat, a.n.clone(), a.trials, a.seed);
    spec.f_exponent = a.f_exp;
    spec.budget = a.budget;
    check_writable(a.out.as_ref())?;
    let result = run_concentration_sweep(&spec)?;
    match &a.out {
        Some(path) => {
            let paths = result.write(path)?;
            println!("ratio to concentration value, {}", spec.model);
            print_aggregates(&mut io::stdout().lock(), &result.aggregates)?;
            report_written(&paths, result.rows.len());
        }
        None => {
            csv_to_stdout(&result.rows)?;
            print_aggregates(&mut io::stderr().lock(), &result.aggregates)?;
        }
    }
    Ok(())
}

#[derive(Serialize)]
struct ScenarioRow {
    scenario: Scenario,
    level: CoexistenceLevel,
    n: usize,
    k: usize,
    primary_count: usize,
    secondary_count: usize,
    primary_alone: f64,
    secondary_alone: f64,
    required_primary: f64,
    li_primary: f64,
    li_secondary: f64,
    jo_primary: Option<f64>,
    jo_secondary: Option<f64>,
    jo_feasible: Option<bool>,
    ub_primary: Option<f64>,
    ub_secondary: Option<f64>,
}

#[derive(Serialize)]
struct ScenarioSidecar<'a> {
    kind: &'static str,
    seed: Option<u64>,
    f: f64,
    model: String,
    power: f64,
    noise: f64,
    row: &'a ScenarioRow,
}

pub fn scenario(a: &ScenarioArgs) -> Result<()> {
    let level = level_or_natural(a.scenario, a.level)?;
    if !(0.0..=1.0).contains(&a.f) {
        return Err(Error::Domain(format!(
            "protection factor must lie in [0, 1], got {}",
            a.f
        )));
    }
    check_writable(a.out.as_ref())?;
    check_writable(a.dump_instance.as_ref())?;
    let inst = match &a.instance {
        Some(path) => NetworkInstance::load(BufReader::new(File::open(path)?))?,
        None => {
            let n = a.n.expect("clap requires n without an instance");
            let (power, noise) = a.power.linear_powers();
            let k = match a.k {
                Some(k) => k,
                None => SystemParams::new(n, a.alpha, power, noise, a.model)?.k(),
            };
            let params = SystemParams::with_users(n, k, power, noise, a.model)?;
            let seed = a.seed.expect("clap requires a seed without an instance");
            NetworkInstance::generate(&params, StreamKey::new(seed).child(0))?
        }
    };
    if let Some(path) = &a.dump_instance {
        let mut w = BufWriter::new(File::create(path)?);
        inst.dump(&mut w)?;
        w.flush()?;
    }
    let counts = match a.counts {
        Some(c) => c,
        None => {
            let mut eq = EquivalenceSpec::new(inst.n(), inst.k(), a.scenario, level, a.f, 1, 0);
            eq.model = inst.model;
            eq.resolved_counts()?
        }
    };
    let li = schedule_with_counts(
        &inst,
        a.scenario,
        level,
        Strategy::LeastInterference,
        counts,
    )?;
    let li_rates = sim_rates(&inst, &li, a.scenario)?;
    let p_alone = primary_alone(&inst, a.scenario.primary)?;
    let mut row = ScenarioRow {
        scenario: a.scenario,
        level,
        n: inst.n(),
        k: inst.k(),
        primary_count: li.primary.active_count(),
        secondary_count: li.secondary.active_count(),
        primary_alone: p_alone,
        secondary_alone: secondary_alone(&inst, a.scenario.secondary)?,
        required_primary: a.f * p_alone,
        li_primary: li_rates.primary,
        li_secondary: li_rates.secondary,
        jo_primary: None,
        jo_secondary: None,
        jo_feasible: None,
        ub_primary: None,
        ub_secondary: None,
    };
    if a.oracle {
        let jo = schedule_with_counts(
            &inst,
            a.scenario,
            level,
            Strategy::JointOptimization { protection: a.f },
            counts,
        )?;
        let jo_rates = sim_rates(&inst, &jo, a.scenario)?;
        let ub = ub_rates(&inst, &jo, a.scenario)?;
        row.jo_primary = Some(jo_rates.primary);
        row.jo_secondary = Some(jo_rates.secondary);
        row.jo_feasible = Some(jo.oracle == Some(Verdict::Feasible));
        row.ub_primary = Some(ub.primary);
        row.ub_secondary = Some(ub.secondary);
    }
    csv_to_stdout(std::slice::from_ref(&row))?;
    if let Some(path) = &a.out {
        write_csv(path, std::slice::from_ref(&row))?;
        let sidecar = sidecar_path(path);
        write_json(
            &sidecar,
            &ScenarioSidecar {
                kind: "scenario",
                seed: a.seed,
                f: a.f,
                model: inst.model.to_string(),
                power: inst.power,
                noise: inst.noise,
                row: &row,
            },
        )?;
        eprintln!(
            "wrote 1 row to {} (also {})",
            path.display(),
            sidecar.display()
        );
    }
    Ok(())
}
