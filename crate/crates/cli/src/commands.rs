use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use anyhow::{bail, Context, Result};
use serde_json::{json, Value};

use ptsp_core::analysis::{
    census_params, census_report, compare_pair, hull_pairs, hull_report, lp_bound_table, run_suite, solve_atsp,
    verify_chain, verify_closure, verify_local_hull, ClosureKind, HullFamily, PropositionReport, Strategy,
    SuiteOptions, Verdict,
};
use ptsp_core::formulations::{BuildOptions, FamilyId, FormulationId};
use ptsp_core::instance::{GenMode, Instance};
use ptsp_core::params::{d_mtz, BVec, Family, Param};
use ptsp_core::point::XPoint;
use ptsp_core::projection::membership;
use ptsp_core::separation::{
    separate_circuit, separate_cut, separate_dbar, separate_dl_lifted, CircuitRhs, CutRhs, DlMode,
};
use ptsp_core::{ArcSpace, Rat};

use crate::{Command, Common, FamilyArg, InstanceArgs, Oracle, Outcome};

fn read_json(path: &Path) -> Result<Value> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))
}

fn emit(common: &Common, v: &Value) -> Result<()> {
    if let Some(p) = &common.json_out {
        fs::write(p, serde_json::to_string_pretty(v)? + "\n").with_context(|| format!("writing {}", p.display()))?;
    }
    Ok(())
}

fn opts(common: &Common) -> BuildOptions {
    BuildOptions::pruned().with_cap(common.cap)
}

fn family(f: FamilyArg) -> Family {
    match f {
        FamilyArg::Mtz => Family::Mtz,
        FamilyArg::Dl => Family::Dl,
        FamilyArg::Scf => Family::Scf,
    }
}

fn default_param(family: Family, space: &ArcSpace) -> Param {
    match family {
        Family::Mtz | Family::Dl => Param::D(d_mtz(space)),
        Family::Scf => Param::B(BVec::uniform(space)),
    }
}

fn load_param(path: Option<&PathBuf>, family: Family, space: &ArcSpace) -> Result<Param> {
    match path {
        Some(p) => Ok(Param::from_json(&read_json(p)?, space)?),
        None => Ok(default_param(family, space)),
    }
}

/// Parses `a,b,...`; a `Q-` prefix keeps the auxiliary variables. Parametric ids take
/// the next parameter file in order, or the default parameter when none is left.
fn parse_ids(list: &str, params: &[PathBuf], space: &ArcSpace) -> Result<Vec<FormulationId>> {
    let mut files = params.iter();
    let mut out = Vec::new();
    for raw in list.split(',').map(str::trim).filter(|s| !s.is_empty()) {
        let (name, extended) = match raw.get(..2) {
            Some(p) if p.eq_ignore_ascii_case("q-") => (&raw[2..], true),
            _ => (raw, false),
        };
        let fam: FamilyId = name.parse()?;
        out.push(match fam.param_family() {
            Some(pf) => FormulationId::parametric(fam, load_param(files.next(), pf, space)?, extended)?,
            None if extended => bail!("{fam} has no extended form"),
            None => FormulationId::fixed(fam)?,
        });
    }
    if out.is_empty() {
        bail!("no formulation given");
    }
    if files.next().is_some() {
        bail!("more parameter files than parametric formulations");
    }
    Ok(out)
}

fn load_instance(common: &Common, args: &InstanceArgs) -> Result<Instance> {
    match &args.instance {
        Some(p) => Ok(Instance::read(p)?),
        None => {
            let mode: GenMode = args.mode.parse()?;
            Ok(Instance::generate(common.n, common.seed, mode)?)
        }
    }
}

fn read_x(path: &Path, space: &ArcSpace) -> Result<XPoint> {
    Ok(XPoint::from_json(&read_json(path)?, space)?)
}

fn outcome(refuted: bool) -> Outcome {
    if refuted {
        Outcome::Refuted
    } else {
        Outcome::Ok
    }
}

fn reports_json(reps: &[PropositionReport]) -> Value {
    Value::Array(reps.iter().map(PropositionReport::to_json).collect())
}

fn any_refuted(reps: &[PropositionReport]) -> bool {
    reps.iter().any(|r| r.verdict == Verdict::Refuted)
}

/// Table line without the runtime, so the output is reproducible.
fn table_line(r: &PropositionReport) -> String {
    let passed = r.checks.iter().filter(|c| c.passed).count();
    let mut s = format!(
        "{:<28} n={:<2} {:<9} {:>3}/{:<3} checks",
        r.id,
        r.n,
        r.verdict,
        passed,
        r.checks.len()
    );
    if let Some(reason) = &r.reason {
        s.push_str(&format!("  ({reason})"));
    }
    s
}

pub fn run(cmd: Command) -> Result<Outcome> {
    match cmd {
        Command::Build {
            common,
            formulations,
            param_file,
            no_prune,
        } => {
            let space = ArcSpace::new(common.n)?;
            let params: Vec<PathBuf> = param_file.into_iter().collect();
            let ids = parse_ids(&formulations, &params, &space)?;
            let [id] = ids.as_slice() else {
                bail!("build takes exactly one formulation");
            };
            let o = BuildOptions {
                prune: !no_prune,
                ..opts(&common)
            };
            let sys = id.build(&space, &o)?;
            let v = json!({ "formulation": id.to_json(), "system": sys.to_json() });
            println!("{}", serde_json::to_string_pretty(&v)?);
            emit(&common, &v)?;
            Ok(Outcome::Ok)
        }
        Command::Bound {
            common,
            instance,
            formulations,
            param_file,
        } => {
            let inst = load_instance(&common, &instance)?;
            let space = ArcSpace::new(inst.n())?;
            let ids = parse_ids(&formulations, &param_file, &space)?;
            let table = lp_bound_table(&inst, &ids, &opts(&common))?;
            print!("{}", table.to_text());
            emit(&common, &serde_json::to_value(&table)?)?;
            Ok(outcome(!table.monotone()))
        }
        Command::Member {
            common,
            formulations,
            param_file,
            x,
        } => {
            let space = ArcSpace::new(common.n)?;
            let params: Vec<PathBuf> = param_file.into_iter().collect();
            let ids = parse_ids(&formulations, &params, &space)?;
            let [id] = ids.as_slice() else {
                bail!("member takes exactly one formulation");
            };
            let rep = membership(id, &read_x(&x, &space)?, &opts(&common))?;
            let v = serde_json::to_value(&rep)?;
            println!("{id}: {}", if rep.member { "member" } else { "not a member" });
            println!("{}", serde_json::to_string_pretty(&v["certificate"])?);
            emit(&common, &v)?;
            Ok(Outcome::Ok)
        }
        Command::Separate {
            common,
            oracle,
            param_file,
            x,
        } => {
            let space = ArcSpace::new(common.n)?;
            let point = || -> Result<XPoint> {
                match &x {
                    Some(p) => read_x(p, &space),
                    None => bail!("--x is required for this oracle"),
                }
            };
            let d = |p: &Option<PathBuf>| -> Result<Option<Param>> {
                p.as_ref().map(|f| load_param(Some(f), Family::Mtz, &space)).transpose()
            };
            let v = match oracle {
                Oracle::Dbar => {
                    let p = load_param(param_file.as_ref(), Family::Mtz, &space)?;
                    let dv = p.as_d().context("dbar needs a d parameter")?;
                    match separate_dbar(dv)? {
                        Some((c, s)) => json!({ "cycle": c, "sum": s, "violation": &s - &Rat::one() }),
                        None => Value::Null,
                    }
                }
                Oracle::Circuit => {
                    let p = d(&param_file)?;
                    let rhs = match &p {
                        Some(p) => CircuitRhs::Param(p.as_d().context("circuit needs a d parameter")?),
                        None => CircuitRhs::Unit,
                    };
                    serde_json::to_value(separate_circuit(&point()?, rhs)?)?
                }
                Oracle::Cut => {
                    let p = param_file
                        .as_ref()
                        .map(|f| load_param(Some(f), Family::Scf, &space))
                        .transpose()?;
                    let rhs = match &p {
                        Some(p) => CutRhs::Param(p.as_b().context("cut needs a b parameter")?),
                        None => CutRhs::Unit,
                    };
                    serde_json::to_value(separate_cut(&point()?, rhs)?)?
                }
                Oracle::Dl => {
                    let p = d(&param_file)?;
                    let mode = match &p {
                        Some(p) => DlMode::Param(p.as_d().context("dl needs a d parameter")?),
                        None => DlMode::VertexDl,
                    };
                    serde_json::to_value(separate_dl_lifted(&point()?, mode)?)?
                }
                Oracle::DlVmtz => serde_json::to_value(separate_dl_lifted(&point()?, DlMode::VertexMtz)?)?,
            };
            if v.is_null() {
                println!("no violated row");
            } else {
                println!("{}", serde_json::to_string_pretty(&v)?);
            }
            emit(&common, &v)?;
            Ok(Outcome::Ok)
        }
        Command::Facets {
            common,
            family: fam,
            param_file,
        } => {
            let space = ArcSpace::new(common.n)?;
            let fam = family(fam);
            let params = match &param_file {
                Some(p) => vec![("given", load_param(Some(p), fam, &space)?)],
                None => census_params(fam, &space, common.seed)?,
            };
            let rep = census_report(fam, &params, &space)?;
            print!("{}", rep.to_text());
            emit(&common, &rep.to_json())?;
            Ok(outcome(rep.verdict == Verdict::Refuted))
        }
        Command::Compare {
            common,
            formulations,
            param_file,
        } => {
            let space = ArcSpace::new(common.n)?;
            let ids = parse_ids(&formulations, &param_file, &space)?;
            let [a, b] = ids.as_slice() else {
                bail!("compare takes exactly two formulations");
            };
            let cmp = compare_pair(a, b, &space, &opts(&common))?;
            let v = json!({
                "first": a.to_json(),
                "second": b.to_json(),
                "relation": cmp.relation,
                "first_only": cmp.first_only.as_ref().map(XPoint::to_json),
                "second_only": cmp.second_only.as_ref().map(XPoint::to_json),
                "rechecked": cmp.rechecked,
            });
            println!("{a} vs {b}: {}", v["relation"].as_str().unwrap_or_default());
            for (label, p) in [("in first only", &cmp.first_only), ("in second only", &cmp.second_only)] {
                if let Some(p) = p {
                    println!("  {label}: {}", p.to_json());
                }
            }
            println!("  witnesses rechecked: {}", cmp.rechecked);
            emit(&common, &v)?;
            Ok(outcome(!cmp.rechecked))
        }
        Command::Closures {
            common,
            samples,
            probes,
            with_ef,
        } => {
            let space = ArcSpace::new(common.n)?;
            let mut reps = Vec::new();
            for kind in ClosureKind::ALL {
                reps.push(verify_closure(kind, &space, samples, probes, common.seed, with_ef)?);
            }
            reps.extend(verify_chain(&space)?);
            for r in &reps {
                print!("{}", r.to_text());
            }
            emit(&common, &reports_json(&reps))?;
            Ok(outcome(any_refuted(&reps)))
        }
        Command::Hull {
            common,
            family: fam,
            dij,
            dji,
            pairs,
        } => {
            let hf = match fam {
                FamilyArg::Mtz => HullFamily::Mtz,
                FamilyArg::Dl => HullFamily::Dl,
                FamilyArg::Scf => bail!("local hulls are defined for mtz and dl"),
            };
            let rep = match (dij, dji) {
                (Some(a), Some(b)) => {
                    let a: Rat = a.parse().map_err(|e| anyhow::anyhow!("--dij: {e}"))?;
                    let b: Rat = b.parse().map_err(|e| anyhow::anyhow!("--dji: {e}"))?;
                    verify_local_hull(hf, &a, &b)?
                }
                (None, None) => hull_report(hf, &hull_pairs(pairs, common.seed))?,
                _ => bail!("give both --dij and --dji, or neither"),
            };
            print!("{}", rep.to_text());
            emit(&common, &rep.to_json())?;
            Ok(outcome(rep.verdict == Verdict::Refuted))
        }
        Command::Solve {
            common,
            instance,
            formulations,
            param_file,
            strategy,
        } => {
            let inst = load_instance(&common, &instance)?;
            let space = ArcSpace::new(inst.n())?;
            let params: Vec<PathBuf> = param_file.into_iter().collect();
            let ids = parse_ids(&formulations, &params, &space)?;
            let [id] = ids.as_slice() else {
                bail!("solve takes exactly one formulation");
            };
            let strategy: Strategy = strategy.parse()?;
            let r = solve_atsp(&inst, id, strategy, &opts(&common))?;
            let tour: Vec<String> = r.tour.iter().map(usize::to_string).collect();
            println!("instance {} ({strategy} over {id})", inst.name);
            println!("tour  {}", tour.join(" "));
            println!("value {}", r.value);
            println!("nodes {}  lps {}", r.nodes, r.lps);
            emit(
                &common,
                &json!({ "instance": inst.name, "formulation": id.to_json(), "result": r }),
            )?;
            Ok(Outcome::Ok)
        }
        Command::VerifyPaper {
            common,
            samples,
            instances,
            verbose,
        } => {
            let started = Instant::now();
            let mut o = SuiteOptions::new(common.n, common.seed);
            o.samples = samples;
            o.instances = instances;
            let mut reps = run_suite(&o)?;
            for r in &mut reps {
                r.runtime_ms = 0;
            }
            for r in &reps {
                if verbose {
                    print!("{}", r.to_text());
                } else {
                    println!("{}", table_line(r));
                }
            }
            let refuted = reps.iter().filter(|r| r.verdict == Verdict::Refuted).count();
            println!("{} reports, {refuted} refuted", reps.len());
            eprintln!("finished in {:.1}s", started.elapsed().as_secs_f64());
            emit(&common, &json!({ "options": o, "reports": reports_json(&reps) }))?;
            Ok(outcome(refuted > 0))
        }
    }
}
