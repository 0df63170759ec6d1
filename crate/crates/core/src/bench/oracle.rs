use std::collections::HashMap;
use std::io::Write;

use crate::cuts::{CutPool, PoolOwner};
use crate::error::{Error, Result};
use crate::milp::{enumerate_milp_with, solve_milp, SolverOptions, Status};
use crate::model::Model;
use crate::stage::assemble_stage;

const KEY_SCALE: f64 = 1e6;

fn key(x: &[f64]) -> Vec<i64> {
    x.iter().map(|v| (v * KEY_SCALE).round() as i64).collect()
}

/// Exact cost-to-go values by backward recursion with lattice enumeration.
///
/// Values are exact when every state is fixed by the integer variables of
/// its stage (integer states, or states that an equality ties to integers
/// and the incoming state).
pub struct Oracle<'a> {
    model: &'a Model,
    opts: SolverOptions,
    cap: usize,
    evaluations: usize,
    ctg_memo: HashMap<(usize, usize, Vec<i64>), f64>,
    ectg_memo: HashMap<(usize, Vec<i64>), f64>,
}

impl<'a> Oracle<'a> {
    /// `cap` bounds the number of stage enumerations.
    pub fn new(model: &'a Model, opts: SolverOptions, cap: usize) -> Self {
        Self {
            model,
            opts,
            cap,
            evaluations: 0,
            ctg_memo: HashMap::new(),
            ectg_memo: HashMap::new(),
        }
    }

    pub fn evaluations(&self) -> usize {
        self.evaluations
    }

    /// Expected cost-to-go after stage `t` at outgoing state `x`.
    pub fn expected_ctg(&mut self, t: usize, x: &[f64]) -> Result<f64> {
        if t >= self.model.horizon() {
            return Ok(0.0);
        }
        let k = (t, key(x));
        if let Some(&v) = self.ectg_memo.get(&k) {
            return Ok(v);
        }
        let mut total = 0.0;
        for s in self.model.scenarios.stage(t + 1).to_vec() {
            total += s.probability * self.ctg(t + 1, s.payload, x)?;
        }
        self.ectg_memo.insert(k, total);
        Ok(total)
    }

    /// Optimal value of the stage-`t` problem for `payload` at `incoming`.
    pub fn ctg(&mut self, t: usize, payload: usize, incoming: &[f64]) -> Result<f64> {
        let k = (t, payload, key(incoming));
        if let Some(&v) = self.ctg_memo.get(&k) {
            return Ok(v);
        }
        self.evaluations += 1;
        if self.evaluations > self.cap {
            return Err(Error::EnumerationCapExceeded {
                needed: self.evaluations as f64,
                cap: self.cap,
            });
        }
        let template = self.model.template(t);
        let pool = CutPool::new(PoolOwner::Stage(t), 0.0);
        let asm = assemble_stage(template, payload, Some(incoming), &pool)?;
        let opts = self.opts;
        let state_vars = template.state_vars.clone();
        let sol = enumerate_milp_with(&asm.problem, &opts, |x| {
            let state: Vec<f64> = state_vars.iter().map(|&j| x[j]).collect();
            self.expected_ctg(t, &state)
        })?;
        if sol.status != Status::Optimal {
            return Err(Error::OracleFailure(format!(
                "stage {t} payload {payload} at {incoming:?} is {:?}",
                sol.status
            )));
        }
        self.ctg_memo.insert(k, sol.objective);
        Ok(sol.objective)
    }

    /// Optimal value of the whole problem.
    pub fn root_value(&mut self) -> Result<f64> {
        let payload = self.model.scenarios.stage(1)[0].payload;
        let init = self.model.initial_state.clone();
        self.ctg(1, payload, &init)
    }

    /// Minimum over first-stage states on `points` of the first-stage cost
    /// with the state pinned plus the expected cost-to-go. Returns the value
    /// and the minimizing state.
    pub fn root_value_on_points(&mut self, points: &[Vec<f64>]) -> Result<(f64, Vec<f64>)> {
        let template = self.model.template(1);
        let payload = self.model.scenarios.stage(1)[0].payload;
        let pool = CutPool::new(PoolOwner::Stage(1), 0.0);
        let base = assemble_stage(template, payload, Some(&self.model.initial_state), &pool)?.problem;
        let mut best: Option<(f64, Vec<f64>)> = None;
        for x in points {
            let mut p = base.clone();
            for (&j, &v) in template.state_vars.iter().zip(x) {
                p.lower[j] = v;
                p.upper[j] = v;
            }
            let sol = solve_milp(&p, &self.opts)?;
            if sol.status != Status::Optimal {
                continue;
            }
            let value = sol.objective + self.expected_ctg(1, x)?;
            if best.as_ref().map_or(true, |(b, _)| value < *b - 1e-12) {
                best = Some((value, x.clone()));
            }
        }
        best.ok_or_else(|| Error::OracleFailure("no feasible first-stage grid point".into()))
    }
}

/// Cartesian grid with the given spacing over a box, ends included.
pub fn grid_points(lower: &[f64], upper: &[f64], spacing: f64) -> Vec<Vec<f64>> {
    let axes: Vec<Vec<f64>> = lower
        .iter()
        .zip(upper)
        .map(|(&l, &u)| {
            let steps = ((u - l) / spacing + 1e-9).floor() as usize;
            (0..=steps).map(|i| l + i as f64 * spacing).collect()
        })
        .collect();
    let mut out = vec![Vec::new()];
    for axis in &axes {
        out = out
            .into_iter()
            .flat_map(|prefix| {
                axis.iter().map(move |&v| {
                    let mut p = prefix.clone();
                    p.push(v);
                    p
                })
            })
            .collect();
    }
    out
}

/// Expected cost-to-go values at sampled states of one stage.
#[derive(Debug, Clone, PartialEq)]
pub struct OracleTable {
    pub stage: usize,
    pub points: Vec<(Vec<f64>, f64)>,
    /// False when the states are not all determined by integer variables.
    pub exact: bool,
}

/// Oracle values of the expected cost-to-go of each stage at the given
/// states; `samples[t - 1]` holds the states for stage `t`.
pub fn exact_expected_ctg(
    model: &Model,
    samples: &[Vec<Vec<f64>>],
    opts: &SolverOptions,
    cap: usize,
) -> Result<Vec<OracleTable>> {
    let mut oracle = Oracle::new(model, *opts, cap);
    let mut tables = Vec::with_capacity(samples.len());
    for (i, states) in samples.iter().enumerate() {
        let stage = i + 1;
        let exact = states
            .iter()
            .all(|x| x.iter().all(|v| (v - v.round()).abs() < 1e-9));
        let mut points = Vec::with_capacity(states.len());
        for x in states {
            points.push((x.clone(), oracle.expected_ctg(stage, x)?));
        }
        tables.push(OracleTable { stage, points, exact });
    }
    Ok(tables)
}

/// Writes `x1,..,xd,value` rows.
pub fn write_grid_csv<W: Write>(out: W, table: &OracleTable) -> std::io::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    let d = table.points.first().map_or(0, |(x, _)| x.len());
    let mut header: Vec<String> = (1..=d).map(|k| format!("x{k}")).collect();
    header.push("value".into());
    w.write_record(&header)?;
    for (x, v) in &table.points {
        let mut rec: Vec<String> = x.iter().map(|c| c.to_string()).collect();
        rec.push(v.to_string());
        w.write_record(&rec)?;
    }
    w.flush()
}
