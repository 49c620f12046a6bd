use std::path::Path;

use coupler_core::circuit::{
    theory_couplings, truncation_spurious_scale_with, Circuit, CircuitParams, DEFAULT_DELTA,
};
use coupler_core::gadget::{verify_gadget, GadgetKind, GadgetSpec};
use coupler_core::parity::{
    compile, roundtrip_validate, unit_cell_layout, LogicalProblem, RoundTripReport,
};
use coupler_core::robustness::{
    correctability_bound, three_body_tolerance_with, Analyzer, CriticalSigma, TripleSet, YieldPoint,
};
use coupler_core::spin::{
    enumerate_spectrum_with, parse_hamiltonian, simulated_anneal, write_hamiltonian,
    AnnealSchedule, IsingHamiltonian,
};
use coupler_core::Exec;
use serde::de::DeserializeOwned;
use serde_json::{json, Value};

use crate::args::*;
use crate::output::{to_json, Cell, Output, Table};
use crate::CliError;

pub struct Ctx {
    pub exec: Exec,
}

fn required<T: Copy>(v: Option<T>, field: &str) -> Result<T, CliError> {
    v.ok_or_else(|| CliError::Usage(format!("{field}: required")))
}

fn unused<T>(v: &Option<T>, field: &str, why: &str) -> Result<(), CliError> {
    match v {
        Some(_) => Err(CliError::Usage(format!("{field}: {why}"))),
        None => Ok(()),
    }
}

fn read_json<T: DeserializeOwned>(path: &Path, field: &str) -> Result<T, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Usage(format!("{field}: {}: {e}", path.display())))?;
    serde_json::from_str(&text)
        .map_err(|e| CliError::Usage(format!("{field}: {}: {e}", path.display())))
}

fn read_hamiltonian(path: &Path) -> Result<IsingHamiltonian, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Usage(format!("hamiltonian: {}: {e}", path.display())))?;
    parse_hamiltonian(&text).map_err(|e| CliError::Usage(format!("hamiltonian: {e}")))
}

fn with_fields(mut v: Value, extra: Value) -> Value {
    if let (Value::Object(o), Value::Object(e)) = (&mut v, extra) {
        o.extend(e);
    }
    v
}

impl GadgetArgs {
    /// Fill defaults in place and build the spec.
    pub fn resolve(&mut self) -> Result<GadgetSpec, CliError> {
        match *self.kind.get_or_insert(Kind::NLocal) {
            Kind::NLocal => {
                unused(&self.j, "J", "only used with --kind three-local")?;
                unused(&self.f, "f", "only used with --kind symmetric")?;
                let n = required(self.n, "N")?;
                let j_a = *self.j_a.get_or_insert(1.0);
                let q_0 = *self.q_0.get_or_insert(0.5 * j_a);
                let j_n = required(self.j_n, "JN")?;
                Ok(GadgetSpec::n_local(n, j_a, q_0, j_n))
            }
            Kind::ThreeLocal => {
                unused(&self.j_a, "Ja", "three-local sets J_a = 2J; use --J")?;
                unused(&self.q_0, "q0", "three-local fixes the ancilla bias")?;
                unused(&self.f, "f", "only used with --kind symmetric")?;
                if self.n.is_some_and(|n| n != 3) {
                    return Err(CliError::Usage("N: three-local requires N = 3".into()));
                }
                let j = *self.j.get_or_insert(1.0);
                let j_n = required(self.j_n, "JN")?;
                Ok(GadgetSpec::three_local(j, j_n))
            }
            Kind::Symmetric => {
                unused(&self.j, "J", "only used with --kind three-local")?;
                unused(&self.j_n, "JN", "symmetric gadgets take --f")?;
                let n = required(self.n, "N")?;
                let j_a = *self.j_a.get_or_insert(1.0);
                let q_0 = *self.q_0.get_or_insert(0.5 * j_a);
                let f = self
                    .f
                    .clone()
                    .ok_or_else(|| CliError::Usage("f: required".into()))?;
                Ok(GadgetSpec::symmetric(n, f, j_a, q_0))
            }
        }
    }

    fn is_empty(&self) -> bool {
        self.kind.is_none()
            && self.n.is_none()
            && self.j_a.is_none()
            && self.q_0.is_none()
            && self.j_n.is_none()
            && self.j.is_none()
            && self.f.is_none()
    }
}

pub fn gadget_verify(cmd: &mut GadgetCmd, _: &Ctx) -> Result<Output, CliError> {
    let spec = cmd.gadget.resolve()?;
    let h = spec.build()?;
    let report = verify_gadget(&h, &spec)?;
    let passed = report.passes(spec.j_a.abs());
    let mut table = Table::new([
        "logical", "n_up", "energy", "target", "residual", "ancilla", "counting_ok",
    ]);
    for s in &report.sectors {
        table.push(vec![
            s.logical.clone().into(),
            s.n_up.into(),
            s.energy.into(),
            s.target.into(),
            s.residual.into(),
            s.ancilla.clone().into(),
            s.counting_ok.into(),
        ]);
    }
    let json = with_fields(to_json(&report), json!({"spec": to_json(&spec), "passed": passed}));
    Ok(Output::json(json).with_table(table).passed(passed))
}

pub fn gadget_build(cmd: &mut GadgetCmd, _: &Ctx) -> Result<Output, CliError> {
    let spec = cmd.gadget.resolve()?;
    let h = spec.build()?;
    let terms: Vec<_> = h.terms().collect();
    let mut table = Table::new(["support", "weight"]);
    for t in &terms {
        let support: Vec<String> = t.support.iter().map(|i| i.to_string()).collect();
        table.push(vec![support.join(" ").into(), t.weight.into()]);
    }
    let json = to_json(&json!({
        "spec": spec,
        "spins": h.n(),
        "logical": spec.logical_indices(),
        "ancilla": spec.ancilla_indices(),
        "constant": h.constant(),
        "terms": terms,
    }));
    Ok(Output::json(json).with_table(table).with_text(write_hamiltonian(&h)))
}

fn per_loop(v: &Option<Vec<f64>>, default: f64, n: usize, field: &str) -> Result<Vec<f64>, CliError> {
    match v.as_deref() {
        None => Ok(vec![default; n]),
        Some([x]) => Ok(vec![*x; n]),
        Some(xs) if xs.len() == n => Ok(xs.to_vec()),
        Some(xs) => Err(CliError::Usage(format!(
            "{field}: {} values for {n} loops",
            xs.len()
        ))),
    }
}

impl CircuitCmd {
    fn params(&mut self) -> Result<CircuitParams, CliError> {
        if let Some(path) = self.circuit.clone() {
            for (set, field) in [
                (self.n.is_some(), "n"),
                (self.l_c.is_some(), "Lc"),
                (self.l.is_some(), "L"),
                (self.m.is_some(), "M"),
                (self.e_c.is_some(), "Ec"),
                (self.e.is_some(), "E"),
                (self.phi_cx.is_some(), "phi-cx"),
            ] {
                if set {
                    return Err(CliError::Usage(format!("{field}: conflicts with --circuit")));
                }
            }
            let p: CircuitParams = read_json(&path, "circuit")?;
            p.validate()?;
            return Ok(p);
        }
        let longest = [&self.l, &self.m, &self.e]
            .iter()
            .filter_map(|v| v.as_ref().map(Vec::len))
            .max()
            .unwrap_or(1);
        let n = match self.n {
            Some(n) => n,
            None if longest > 1 => longest,
            None => return Err(CliError::Usage("n: required".into())),
        };
        self.n = Some(n);
        let l = per_loop(&self.l, 1.0, n, "L")?;
        let m = per_loop(&self.m, 0.1, n, "M")?;
        let e = per_loop(&self.e, 1.0, n, "E")?;
        let p = CircuitParams {
            l_c: *self.l_c.get_or_insert(1.0),
            l: l.clone(),
            m: m.clone(),
            e_c: *self.e_c.get_or_insert(1.0),
            e: e.clone(),
            phi_cx: *self.phi_cx.get_or_insert(0.0),
        };
        self.l = Some(l);
        self.m = Some(m);
        self.e = Some(e);
        p.validate()?;
        Ok(p)
    }
}

pub fn circuit_couplings(cmd: &mut CircuitCmd, _: &Ctx) -> Result<Output, CliError> {
    let p = cmd.params()?;
    let delta = *cmd.delta.get_or_insert(DEFAULT_DELTA);
    let three_body = *cmd.three_body.get_or_insert(false);
    let circuit = Circuit::new(p.clone())?;
    let (phi_c0, _) = circuit.operating_point()?;
    let j = circuit.effective_couplings(delta)?;
    let theory = theory_couplings(&p, phi_c0);
    let n = p.n();
    let mut table = Table::new(std::iter::once("circuit".to_string()).chain((0..n).map(|i| i.to_string())));
    let rows: Vec<Vec<f64>> = j.rows().map(<[f64]>::to_vec).collect();
    for (i, row) in rows.iter().enumerate() {
        let mut cells = vec![Cell::from(i)];
        cells.extend(row.iter().map(|&v| Cell::from(v)));
        table.push(cells);
    }
    let mut json = json!({
        "params": p,
        "delta": delta,
        "phi_c0": phi_c0,
        "couplings": rows,
        "mean": j.mean_off_diagonal(),
        "theory_mean": theory.mean_off_diagonal(),
    });
    if three_body {
        let (e2, e3) = truncation_spurious_scale_with(&p, delta)?;
        json = with_fields(json, json!({"E2": e2, "E3": e3}));
    }
    Ok(Output::json(to_json(&json)).with_table(table))
}

pub fn three_body_tolerance(cmd: &mut ThreeBodyCmd, _: &Ctx) -> Result<Output, CliError> {
    let spec = cmd.gadget.resolve()?;
    let sign = *cmd.sign.get_or_insert(Sign::Both);
    let triples = match *cmd.triples.get_or_insert(TripleSetArg::All) {
        TripleSetArg::All => TripleSet::All,
        TripleSetArg::NoAncillaTriples => TripleSet::NoAncillaTriples,
        TripleSetArg::LogicalOnly => TripleSet::LogicalOnly,
    };
    let mut table = Table::new(["sign", "tolerance"]);
    let mut json = json!({"spec": spec, "triples": triples});
    for (name, same, wanted) in [
        ("same", true, sign != Sign::Opposite),
        ("opposite", false, sign != Sign::Same),
    ] {
        if wanted {
            let t = three_body_tolerance_with(&spec, same, triples)?;
            table.push(vec![name.into(), t.into()]);
            json[name] = json!(t);
        }
    }
    Ok(Output::json(to_json(&json)).with_table(table))
}

fn sampling(s: &mut Sampling, default_samples: usize) -> Result<(u64, usize, bool), CliError> {
    let seed = required(s.seed, "seed")?;
    let samples = *s.samples.get_or_insert(default_samples);
    if samples == 0 {
        return Err(CliError::Usage("samples: must be ≥ 1".into()));
    }
    let correct = *s.mode.get_or_insert(Mode::Corrected) == Mode::Corrected;
    Ok((seed, samples, correct))
}

fn mismatch_analyzer(spec: &GadgetSpec) -> Result<Analyzer, CliError> {
    if spec.kind == GadgetKind::ThreeLocal {
        return Err(CliError::Usage(
            "kind: mismatch analysis needs an n-local or symmetric gadget".into(),
        ));
    }
    Ok(Analyzer::new(spec)?)
}

pub fn yield_sim(cmd: &mut YieldCmd, ctx: &Ctx) -> Result<Output, CliError> {
    let spec = cmd.gadget.resolve()?;
    let (seed, samples, correct) = sampling(&mut cmd.sampling, 1000)?;
    let grid = match &cmd.sigma {
        Some(g) => {
            unused(&cmd.sigma_max, "sigma-max", "conflicts with --sigma")?;
            unused(&cmd.steps, "steps", "conflicts with --sigma")?;
            g.clone()
        }
        None => {
            let max = *cmd.sigma_max.get_or_insert(0.05);
            let steps = *cmd.steps.get_or_insert(10);
            if steps == 0 {
                return Err(CliError::Usage("steps: must be ≥ 1".into()));
            }
            (0..=steps).map(|k| max * k as f64 / steps as f64).collect()
        }
    };
    let points = mismatch_analyzer(&spec)?.yield_curve(&grid, samples, seed, correct, ctx.exec)?;
    let mut table = Table::new(YieldPoint::COLUMNS);
    for p in &points {
        table.push(vec![
            p.sigma.into(),
            p.samples.into(),
            p.passes.into(),
            p.yield_fraction.into(),
            p.ci_low.into(),
            p.ci_high.into(),
        ]);
    }
    let json = to_json(&json!({"spec": spec, "points": points}));
    Ok(Output::json(json).with_table(table))
}

pub fn critical_sigma(cmd: &mut CriticalCmd, ctx: &Ctx) -> Result<Output, CliError> {
    let spec = cmd.gadget.resolve()?;
    let (seed, samples, correct) = sampling(&mut cmd.sampling, 1000)?;
    let sigmas = mismatch_analyzer(&spec)?.critical_sigmas(samples, seed, correct, ctx.exec)?;
    let mut table = Table::new(["sample", "critical_sigma", "crossed"]);
    for (k, s) in sigmas.iter().enumerate() {
        let crossed = matches!(s, CriticalSigma::Crossing(_));
        table.push(vec![k.into(), s.value().into(), crossed.into()]);
    }
    let mut values: Vec<f64> = sigmas.iter().map(|s| s.value()).collect();
    values.sort_by(f64::total_cmp);
    let median = if values.len() % 2 == 1 {
        values[values.len() / 2]
    } else {
        0.5 * (values[values.len() / 2 - 1] + values[values.len() / 2])
    };
    let bound = match spec.kind {
        GadgetKind::NLocal => Some(correctability_bound(spec.n, spec.j_a, spec.q_0, spec.j_n)?),
        _ => None,
    };
    let json = to_json(&json!({
        "spec": spec,
        "min": values[0],
        "median": median,
        "mean": values.iter().sum::<f64>() / values.len() as f64,
        "max": values[values.len() - 1],
        "uncrossed": sigmas.iter().filter(|s| matches!(s, CriticalSigma::AtLeastOne)).count(),
        "bound": bound,
        "critical_sigmas": sigmas,
    }));
    Ok(Output::json(json).with_table(table))
}

pub fn bound(cmd: &mut GadgetCmd, _: &Ctx) -> Result<Output, CliError> {
    let spec = cmd.gadget.resolve()?;
    if spec.kind != GadgetKind::NLocal {
        return Err(CliError::Usage("kind: the bound is defined for n-local gadgets".into()));
    }
    let b = correctability_bound(spec.n, spec.j_a, spec.q_0, spec.j_n)?;
    let mut table = Table::new(["bound"]);
    table.push(vec![b.into()]);
    Ok(Output::json(to_json(&json!({"spec": spec, "bound": b}))).with_table(table))
}

fn problem(path: &Option<std::path::PathBuf>) -> Result<LogicalProblem, CliError> {
    let path = path
        .as_ref()
        .ok_or_else(|| CliError::Usage("problem: required".into()))?;
    let p: LogicalProblem = read_json(path, "problem")?;
    p.validate()?;
    Ok(p)
}

pub fn lhz_compile(cmd: &mut LhzCompileCmd, _: &Ctx) -> Result<Output, CliError> {
    let p = problem(&cmd.problem)?;
    let c = *cmd.c.get_or_insert(p.default_constraint());
    let (map, h) = compile(&p, c)?;
    let layout = unit_cell_layout(&map);
    let mut table = Table::new(["spin", "i", "j", "row", "column", "field"]);
    for (k, &(i, j)) in map.labels.iter().enumerate() {
        let (row, col) = map.position(k);
        table.push(vec![k.into(), i.into(), j.into(), row.into(), col.into(), map.fields[k].into()]);
    }
    let text = write_hamiltonian(&h);
    let json = to_json(&json!({
        "embedding": map,
        "layout": layout,
        "hamiltonian": text,
    }));
    Ok(Output::json(json).with_table(table).with_text(text))
}

pub fn lhz_validate(cmd: &mut LhzValidateCmd, ctx: &Ctx) -> Result<Output, CliError> {
    let problems: Vec<LogicalProblem> = match (cmd.problem.is_some(), cmd.random_m) {
        (true, Some(_)) => return Err(CliError::Usage("random-M: conflicts with --problem".into())),
        (true, None) => {
            unused(&cmd.instances, "instances", "only used with --random-M")?;
            unused(&cmd.seed, "seed", "only used with --random-M")?;
            vec![problem(&cmd.problem)?]
        }
        (false, Some(m)) => {
            let seed = required(cmd.seed, "seed")?;
            let count = *cmd.instances.get_or_insert(100);
            (0..count as u64)
                .map(|k| LogicalProblem::random_dyadic(m, seed, k))
                .collect::<Result<_, _>>()?
        }
        (false, None) => return Err(CliError::Usage("problem: required (or --random-M)".into())),
    };
    let c = cmd.c;
    let reports: Vec<RoundTripReport> = ctx
        .exec
        .map_range(problems.len(), |k| {
            let p = &problems[k];
            roundtrip_validate(p, c.unwrap_or_else(|| p.default_constraint()))
        })
        .into_iter()
        .collect::<Result<_, _>>()?;
    let mut table = Table::new([
        "instance",
        "M",
        "C",
        "valid_sector_size",
        "embedded_ground_states",
        "ground_states_valid",
        "ground_sets_match",
        "max_offset_deviation",
        "passed",
    ]);
    for (k, r) in reports.iter().enumerate() {
        table.push(vec![
            k.into(),
            r.m.into(),
            r.c.into(),
            r.valid_sector_size.into(),
            r.embedded_ground_states.into(),
            r.ground_states_valid.into(),
            r.ground_sets_match.into(),
            r.max_offset_deviation.into(),
            r.passed.into(),
        ]);
    }
    let passed = reports.iter().filter(|r| r.passed).count();
    let ok = passed == reports.len();
    let json = to_json(&json!({
        "instances": reports.len(),
        "passed": passed,
        "all_passed": ok,
        "reports": reports,
    }));
    Ok(Output::json(json).with_table(table).passed(ok))
}

pub fn anneal(cmd: &mut AnnealCmd, ctx: &Ctx) -> Result<Output, CliError> {
    let path = cmd
        .hamiltonian
        .clone()
        .ok_or_else(|| CliError::Usage("hamiltonian: required".into()))?;
    let h = read_hamiltonian(&path)?;
    let seed = required(cmd.seed, "seed")?;
    let scale = if h.max_abs_weight() > 0.0 { h.max_abs_weight() } else { 1.0 };
    let t_hot = *cmd.t_hot.get_or_insert(2.0 * scale);
    let t_cold = *cmd.t_cold.get_or_insert(0.01 * scale);
    let steps = *cmd.steps.get_or_insert(50);
    let sweeps = *cmd.sweeps.get_or_insert(20);
    let restarts = *cmd.restarts.get_or_insert(1);
    if restarts == 0 {
        return Err(CliError::Usage("restarts: must be ≥ 1".into()));
    }
    let schedules: Vec<AnnealSchedule> = (0..restarts as u64)
        .map(|r| AnnealSchedule::geometric(t_hot, t_cold, steps, sweeps, seed.wrapping_add(r)))
        .collect::<Result<_, _>>()?;
    let runs = ctx.exec.map_range(restarts, |r| simulated_anneal(&h, &schedules[r]));
    let best = runs
        .iter()
        .enumerate()
        .min_by(|a, b| a.1 .1.total_cmp(&b.1 .1).then(a.0.cmp(&b.0)))
        .map(|(k, _)| k)
        .unwrap_or(0);
    let mut table = Table::new(["restart", "energy", "config"]);
    for (r, (c, e)) in runs.iter().enumerate() {
        table.push(vec![r.into(), (*e).into(), c.arrows().into()]);
    }
    let (config, energy) = &runs[best];
    let json = to_json(&json!({
        "energy": energy,
        "config": config.arrows(),
        "spins": config.spins(),
        "best_restart": best,
        "energies": runs.iter().map(|r| r.1).collect::<Vec<_>>(),
    }));
    Ok(Output::json(json).with_table(table))
}

pub fn spectrum(cmd: &mut SpectrumCmd, ctx: &Ctx) -> Result<Output, CliError> {
    let h = match &cmd.hamiltonian {
        Some(path) => {
            if !cmd.gadget.is_empty() {
                return Err(CliError::Usage("hamiltonian: conflicts with the gadget flags".into()));
            }
            read_hamiltonian(path)?
        }
        None => cmd.gadget.resolve()?.build()?,
    };
    let s = enumerate_spectrum_with(&h, ctx.exec)?;
    let levels = cmd.levels.unwrap_or(s.len()).min(s.len());
    let mut table = Table::new(["rank", "bits", "config", "energy"]);
    let mut rows = Vec::with_capacity(levels);
    for (rank, (c, e)) in s.entries().take(levels).enumerate() {
        let bits = c.bits().unwrap_or(0) as usize;
        table.push(vec![rank.into(), bits.into(), c.arrows().into(), e.into()]);
        rows.push(json!({"rank": rank, "bits": bits, "config": c.arrows(), "energy": e}));
    }
    let json = to_json(&json!({
        "spins": h.n(),
        "ground_energy": s.ground_energy(),
        "levels": rows,
    }));
    Ok(Output::json(json).with_table(table))
}
