//! Command-line front end: runs the analysis pipeline on an intersection
//! array or a concrete graph and renders text and JSON reports.

mod args;
pub mod json;
mod text;

use std::io::Write;
use std::path::Path;

use anyhow::{anyhow, bail, Context, Result};
use drg_core::array::format_rational;
use drg_core::duality::{
    aw_parameters, classical_parameters, classical_qpoly, dual_structure, krein_parameters, qpoly_orderings_direct,
    spectral_feasibility, QPolyStructure,
};
use drg_core::graph::{
    balanced_set_check, bose_mesner, build_family, check_drg, parse_edge_list, subconstituent, verify_identities,
    DrgWitness, Family, Graph,
};
use drg_core::tmodules::{decompose, verify_relations, verify_tridiagonal_pair, DecomposeOptions};
use drg_core::{intersection_numbers, spectral_data, verify_orthogonality, IntersectionArray, Rational, ResidualReport, Tolerance};
use serde_json::{json, Map, Value};

pub use args::{ArrayArgs, Cli, Command, CommonArgs, FamilyName, GraphArgs};
pub use json::{emit_json, to_json_string, SCHEMA_VERSION};

use json::{matrix, num, nums};
use text::{fmt_f, fmt_list};

/// Whether the run produced a finding that sets exit code 2.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Status {
    Ok,
    Finding,
}

#[derive(Clone, Debug)]
pub struct Outcome {
    pub report: Value,
    pub text: String,
    pub status: Status,
}

impl Outcome {
    pub fn exit_code(&self) -> u8 {
        match self.status {
            Status::Ok => 0,
            Status::Finding => 2,
        }
    }
}

struct Builder {
    report: Map<String, Value>,
    text: String,
    status: Status,
    tol: Tolerance,
}

impl Builder {
    fn new(common: &CommonArgs, command: &str) -> Result<Self> {
        let eps = common.tolerance;
        if !(eps.is_finite() && eps > 0.0) {
            bail!("tolerance must be a positive finite number, got {eps}");
        }
        let mut report = Map::new();
        report.insert("schema".into(), json!(SCHEMA_VERSION));
        report.insert("command".into(), json!(command));
        report.insert("tolerance".into(), num(eps));
        report.insert("seed".into(), json!(common.seed));
        Ok(Self {
            report,
            text: format!("tolerance {eps:e}, seed {}\n", common.seed),
            status: Status::Ok,
            tol: Tolerance::new(eps),
        })
    }

    fn line(&mut self, s: impl AsRef<str>) {
        self.text.push_str(s.as_ref());
        self.text.push('\n');
    }

    fn set(&mut self, key: &str, v: Value) {
        self.report.insert(key.into(), v);
    }

    fn finding(&mut self) {
        self.status = Status::Finding;
    }

    fn finish(self) -> Outcome {
        Outcome {
            report: Value::Object(self.report),
            text: self.text,
            status: self.status,
        }
    }
}

fn rationals(xs: &[Rational]) -> Value {
    Value::Array(xs.iter().map(|x| json!(format_rational(x))).collect())
}

fn residuals_json(r: &ResidualReport) -> Value {
    let entries: Vec<Value> = r
        .entries
        .iter()
        .map(|e| {
            json!({
                "name": e.name,
                "max_abs": num(e.max_abs),
                "frobenius": num(e.frobenius),
                "passed": e.passed,
            })
        })
        .collect();
    json!({
        "tolerance": num(r.tolerance),
        "count": r.entries.len(),
        "all_pass": r.all_pass(),
        "max_residual": num(r.max()),
        "failures": r.failures().map(|e| e.name.clone()).collect::<Vec<_>>(),
        "entries": entries,
    })
}

fn residual_line(b: &mut Builder, what: &str, r: &ResidualReport) {
    let failed = r.failures().count();
    if failed == 0 {
        b.line(format!("{what}: {} residuals pass, max {:.3e}", r.entries.len(), r.max()));
    } else {
        b.line(format!("{what}: {failed} of {} residuals fail", r.entries.len()));
        for e in r.failures().take(10) {
            b.line(format!("  FAIL {} (max {:.3e})", e.name, e.max_abs));
        }
    }
}

/// Array-level analysis shared by both subcommands. Returns the
/// Q-polynomial structures found.
fn analyse_array(b: &mut Builder, ia: &IntersectionArray, classical: bool) -> Result<Vec<QPolyStructure>> {
    let tol = b.tol;
    let d = ia.diameter();
    let p = intersection_numbers(ia);
    let p_table: Vec<Value> = (0..=d)
        .map(|h| {
            Value::Array(
                (0..=d)
                    .map(|i| Value::Array((0..=d).map(|j| json!(format_rational(p.get(h, i, j)))).collect()))
                    .collect(),
            )
        })
        .collect();
    b.set(
        "array",
        json!({
            "text": ia.to_string(),
            "diameter": d,
            "b": rationals(&(0..=d).map(|i| ia.b(i).clone()).collect::<Vec<_>>()),
            "a": rationals(&(0..=d).map(|i| ia.a(i).clone()).collect::<Vec<_>>()),
            "c": rationals(&(0..=d).map(|i| ia.c(i).clone()).collect::<Vec<_>>()),
            "valencies": rationals(ia.valencies()),
            "order": format_rational(ia.order()),
            "intersection_numbers": p_table,
        }),
    );
    b.line(format!("array {{{ia}}}: D = {d}, n = {}", ia.order()));

    let sp = spectral_data(ia, &tol)?;
    let orth = verify_orthogonality(&sp);
    b.set(
        "spectral",
        json!({
            "tolerance": num(tol.eps),
            "theta": nums(&sp.theta),
            "m": nums(&sp.m),
            "cosines": matrix(&sp.u),
            "orthogonality_residual": num(orth.max()),
        }),
    );
    b.line(format!("eigenvalues θ = {}", fmt_list(&sp.theta)));
    b.line(format!("multiplicities m = {}", fmt_list(&sp.m)));

    let feas = spectral_feasibility(ia, &sp, &tol)?;
    let checks: Vec<Value> = feas
        .checks
        .iter()
        .map(|c| json!({"name": c.name, "passed": c.passed, "witness": c.witness}))
        .collect();
    b.set("feasibility", json!({"tolerance": num(tol.eps), "feasible": feas.feasible(), "checks": checks}));
    if feas.feasible() {
        b.line("feasibility: all checks pass");
    } else {
        b.finding();
        for c in feas.failed() {
            b.line(format!("infeasible: {} ({})", c.name, c.witness));
        }
    }

    let natural: Vec<usize> = (0..=d).collect();
    let krein = krein_parameters(ia, &sp, &natural)?;
    b.set(
        "krein",
        json!({
            "tolerance": num(tol.eps),
            "ordering": natural,
            "q": krein.to_nested().iter().map(|t| matrix(t)).collect::<Vec<_>>(),
            "condition": krein.krein_condition(&tol),
            "invariant_residual": num(krein.invariants.max_residual()),
        }),
    );

    let qps = qpoly_orderings_direct(ia, &sp, &tol)?;
    let mut list = Vec::new();
    b.line(format!("Q-polynomial orderings: {}", qps.len()));
    for qp in &qps {
        let ds = dual_structure(ia, &sp, qp, &tol)?;
        let td = &ds.td;
        let aw = aw_parameters(ia, qp, td, &tol)?;
        list.push(json!({
            "tolerance": num(tol.eps),
            "ordering": qp.perm,
            "theta": nums(&qp.theta),
            "theta_star": nums(&qp.theta_star),
            "dual_array": {"b": nums(&qp.dual.b), "a": nums(&qp.dual.a), "c": nums(&qp.dual.c)},
            "beta": num(td.beta),
            "gamma": num(td.gamma),
            "gamma_star": num(td.gamma_star),
            "rho": num(td.rho),
            "rho_star": num(td.rho_star),
            "omega": num(aw.omega),
            "eta": num(aw.eta),
            "eta_star": num(aw.eta_star),
            "duality_residual": num(ds.aw_duality_residual),
            "dual_checks_residual": num(ds.max_residual()),
        }));
        b.line(format!("  ordering {:?}: θ* = {}", qp.perm, fmt_list(&qp.theta_star)));
        b.line(format!(
            "    β = {}, γ = {}, γ* = {}, ϱ = {}, ϱ* = {}, ω = {}, η = {}, η* = {}",
            fmt_f(td.beta),
            fmt_f(td.gamma),
            fmt_f(td.gamma_star),
            fmt_f(td.rho),
            fmt_f(td.rho_star),
            fmt_f(aw.omega),
            fmt_f(aw.eta),
            fmt_f(aw.eta_star)
        ));
    }
    b.set("qpoly", Value::Array(list));

    if classical {
        let found = classical_parameters(ia);
        let mut list = Vec::new();
        if found.is_empty() {
            b.line("classical parameters: none");
        }
        for cp in &found {
            let mut entry = json!({
                "d": cp.d,
                "b": cp.b,
                "alpha": format_rational(&cp.alpha),
                "sigma": format_rational(&cp.sigma),
            });
            b.line(format!("classical parameters (D, b, α, σ) = ({}, {}, {}, {})", cp.d, cp.b, cp.alpha, cp.sigma));
            match classical_qpoly(ia, cp, &sp, &tol) {
                Ok(cq) => {
                    entry["qpoly"] = json!({
                        "tolerance": num(tol.eps),
                        "theta": num(cq.theta),
                        "eigenvalue_order": nums(&cq.eigenvalue_order),
                        "ordering": cq.structure.perm,
                        "direct_agrees": cq.direct_agrees,
                    });
                    b.line(format!("  eigenvalue order {}", fmt_list(&cq.eigenvalue_order)));
                }
                Err(e) => {
                    entry["qpoly_error"] = json!(e.to_string());
                    b.line(format!("  no Q-polynomial structure: {e}"));
                    b.finding();
                }
            }
            list.push(entry);
        }
        b.set("classical", Value::Array(list));
    }
    Ok(qps)
}

pub fn cmd_array(args: &ArrayArgs) -> Result<Outcome> {
    let mut b = Builder::new(&args.common, "array")?;
    b.set("input", json!({"array": args.array, "classical": args.common.classical}));
    let ia = drg_core::parse_array(&args.array).with_context(|| format!("cannot parse array '{}'", args.array))?;
    analyse_array(&mut b, &ia, args.common.classical)?;
    Ok(b.finish())
}

fn family_of(args: &GraphArgs, name: FamilyName) -> Result<Family> {
    let need = |v: Option<usize>, flag: &str| v.ok_or_else(|| anyhow!("--family {name:?} requires --{flag}"));
    Ok(match name {
        FamilyName::Hypercube => Family::Hypercube { d: need(args.d, "d")? },
        FamilyName::Hamming => Family::Hamming {
            d: need(args.d, "d")?,
            q: need(args.q, "q")?,
        },
        FamilyName::Johnson => Family::Johnson {
            n: need(args.n, "n")?,
            k: need(args.k, "k")?,
        },
        FamilyName::Cycle => Family::Cycle { n: need(args.n, "n")? },
    })
}

fn load_graph(args: &GraphArgs) -> Result<(Graph, Value)> {
    if let Some(name) = args.family {
        let f = family_of(args, name)?;
        let g = build_family(f).with_context(|| format!("cannot build {}", f.name()))?;
        return Ok((g, json!({"family": f.normalized().name()})));
    }
    let path = args.edges.as_ref().ok_or_else(|| anyhow!("give an edge-list path or --family"))?;
    let text = std::fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))?;
    let g = parse_edge_list(&text).with_context(|| format!("invalid edge list {}", path.display()))?;
    Ok((g, json!({"edges": path.display().to_string()})))
}

fn witness_json(w: &DrgWitness) -> Value {
    json!({
        "y": w.y,
        "z": w.z,
        "h": w.h,
        "i": w.i,
        "j": w.j,
        "count": w.count,
        "reference": [w.reference.0, w.reference.1],
        "reference_count": w.reference_count,
    })
}

pub fn cmd_graph(args: &GraphArgs) -> Result<Outcome> {
    let mut b = Builder::new(&args.common, "graph")?;
    let (g, mut source) = load_graph(args)?;
    source["base_vertex"] = json!(args.base_vertex);
    source["modules"] = json!(args.modules);
    source["verify_identities"] = json!(args.verify_identities);
    source["balanced_set"] = json!(args.balanced_set);
    source["classical"] = json!(args.common.classical);
    b.set("input", source);
    let tol = b.tol;
    let n = g.n();
    let check = check_drg(&g);
    let mut info = json!({
        "n": n,
        "edges": g.edge_count(),
        "diameter": g.diameter(),
        "distance_regular": check.is_regular(),
    });
    b.line(format!("graph: n = {n}, {} edges, diameter {}", g.edge_count(), g.diameter()));
    if let Some(w) = check.witness() {
        info["witness"] = witness_json(w);
        b.set("graph", info);
        b.line(format!(
            "not distance-regular: (y, z) = ({}, {}) at distance {} has |Γ_{}(y) ∩ Γ_{}(z)| = {}, but ({}, {}) has {}",
            w.y, w.z, w.h, w.i, w.j, w.count, w.reference.0, w.reference.1, w.reference_count
        ));
        b.finding();
        return Ok(b.finish());
    }
    b.set("graph", info);
    let ia = check.array().expect("regular graphs have an array")?;
    let qps = analyse_array(&mut b, &ia, args.common.classical)?;

    let x = args.base_vertex;
    if x >= n {
        bail!("base vertex {x} is out of range for {n} vertices");
    }
    let natural = bose_mesner(&g, &ia, &tol)?;
    let alg = match qps.first() {
        Some(qp) => natural.reordered(&qp.perm)?,
        None => natural,
    };
    let sub = subconstituent(&g, &alg, x, &tol)?;

    if args.verify_identities {
        let mut r = ResidualReport::new(&tol);
        r.extend_prefixed("", alg.residuals.clone());
        r.extend_prefixed("", sub.residuals.clone());
        r.extend_prefixed("", verify_identities(&alg, &sub, &tol)?);
        let mut v = residuals_json(&r);
        v["ordering"] = json!(alg.ordering);
        b.set("identities", v);
        residual_line(&mut b, "identities", &r);
        if !r.all_pass() {
            b.finding();
        }
    }

    if args.balanced_set {
        if qps.is_empty() {
            b.set(
                "balanced_set",
                json!({"tolerance": num(tol.eps), "applicable": false, "reason": "no Q-polynomial ordering"}),
            );
            b.line("balanced set: not applicable, no Q-polynomial ordering");
        } else {
            let rep = balanced_set_check(&g, &alg, 1, &tol);
            let mut v = json!({
                "tolerance": num(tol.eps),
                "idempotent": alg.ordering[1],
                "theta_star": nums(&rep.theta_star),
                "applicable": rep.applicable,
                "holds": rep.holds(),
                "max_residual": num(rep.max_residual),
                "weak_residual": num(rep.weak_residual),
            });
            if let Some(w) = &rep.witness {
                v["witness"] = json!({"y": w.y, "z": w.z, "h": w.h, "i": w.i, "j": w.j, "residual": num(w.residual)});
            }
            if let Some((y, z, r)) = rep.weak_witness {
                v["weak_witness"] = json!({"y": y, "z": z, "residual": num(r)});
            }
            b.set("balanced_set", v);
            if rep.holds() {
                b.line(format!("balanced set: holds, max residual {:.3e}", rep.max_residual));
            } else {
                b.line(format!("balanced set: fails, max residual {:.3e}", rep.max_residual));
                b.finding();
            }
        }
    }

    if args.modules {
        if qps.is_empty() {
            b.set("modules", json!({"skipped": "no Q-polynomial ordering"}));
            b.line("modules: skipped, no Q-polynomial ordering");
        } else {
            modules_section(&mut b, &alg, &sub, args.common.seed)?;
        }
    }
    Ok(b.finish())
}

fn modules_section(
    b: &mut Builder,
    alg: &drg_core::graph::GraphAlgebra,
    sub: &drg_core::graph::Subconstituent,
    seed: u64,
) -> Result<()> {
    let tol = b.tol;
    let opts = DecomposeOptions { seed, ..Default::default() };
    let dec = decompose(alg, sub, &opts, &tol)?;
    let mut all_pairs = true;
    let modules: Vec<Value> = dec
        .modules
        .iter()
        .map(|m| {
            let rec = verify_tridiagonal_pair(alg, sub, &m.basis, seed, &tol);
            all_pairs &= rec.is_tridiagonal_pair();
            json!({
                "dim": m.dim(),
                "endpoint": m.endpoint,
                "dual_endpoint": m.dual_endpoint,
                "diameter": m.diameter,
                "dual_diameter": m.dual_diameter,
                "shell_dims": m.shell_dims,
                "dual_shell_dims": m.dual_shell_dims,
                "thin": m.thin,
                "tridiagonal_pair": rec.is_tridiagonal_pair(),
                "leonard": rec.leonard,
                "irreducible": rec.irreducible,
                "max_residual": num(rec.residuals.max()),
            })
        })
        .collect();
    let groups: Vec<Value> = dec
        .groups
        .iter()
        .map(|g| {
            json!({
                "endpoint": g.invariants.endpoint,
                "dual_endpoint": g.invariants.dual_endpoint,
                "diameter": g.invariants.diameter,
                "shell_dims": g.invariants.shell_dims,
                "dim": g.dim,
                "count": g.count,
            })
        })
        .collect();
    let rel = verify_relations(alg, sub, &tol)?;
    b.set(
        "modules",
        json!({
            "tolerance": num(tol.eps),
            "seed": seed,
            "ordering": alg.ordering,
            "total_dim": dec.total_dim(),
            "commutant_dim": dec.commutant_dim,
            "grouping": dec.grouping,
            "groups": groups,
            "modules": modules,
            "all_tridiagonal_pairs": all_pairs,
            "residuals": residuals_json(&dec.residuals),
            "relations": residuals_json(&rel.residuals),
        }),
    );
    b.line(format!(
        "modules: {} irreducible, Σ dim = {}, commutant dimension {}",
        dec.modules.len(),
        dec.total_dim(),
        dec.commutant_dim
    ));
    for g in &dec.groups {
        b.line(format!(
            "  {} × dim {} (endpoint {}, dual endpoint {}, diameter {}, shells {:?}) [{}]",
            g.count, g.dim, g.invariants.endpoint, g.invariants.dual_endpoint, g.invariants.diameter, g.invariants.shell_dims, dec.grouping
        ));
    }
    b.line(format!(
        "tridiagonal pairs: {}",
        if all_pairs { "every module passes" } else { "some module fails" }
    ));
    residual_line(b, "decomposition", &dec.residuals);
    residual_line(b, "relations", &rel.residuals);
    if !all_pairs || !dec.residuals.all_pass() || !rel.residuals.all_pass() {
        b.finding();
    }
    Ok(())
}

pub fn run(cli: &Cli) -> Result<Outcome> {
    match &cli.command {
        Command::Array(a) => cmd_array(a),
        Command::Graph(g) => cmd_graph(g),
    }
}

fn json_path(cli: &Cli) -> Option<&Path> {
    match &cli.command {
        Command::Array(a) => a.common.json.as_deref(),
        Command::Graph(g) => g.common.json.as_deref(),
    }
}

/// Runs the command, prints the text report, writes JSON if requested and
/// returns the process exit code.
pub fn execute(cli: &Cli, out: &mut impl Write, err: &mut impl Write) -> u8 {
    let outcome = match run(cli) {
        Ok(o) => o,
        Err(e) => {
            let _ = writeln!(err, "error: {e:#}");
            return 1;
        }
    };
    let _ = out.write_all(outcome.text.as_bytes());
    if let Some(path) = json_path(cli) {
        if let Err(e) = emit_json(&outcome.report, path) {
            let _ = writeln!(err, "error: cannot write {}: {e}", path.display());
            return 1;
        }
    }
    outcome.exit_code()
}
