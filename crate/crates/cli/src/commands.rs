use std::path::Path;

use otable_core::factory::{
    check_onesided, check_twosided, combine_tables, default_threshold, noisy_tables, reduce_batch, CheckConfig,
    CombineSpec,
};
use otable_core::kernel::random::haar_state;
use otable_core::kernel::PureState;
use otable_core::mpc::{
    bit_commit, bit_reveal, compile_circuit, equivocation_rates, eval_circuit, ns_box_sample, ot_1of2, BooleanCircuit,
    NsMode, RevealDecision, TablePool,
};
use otable_core::protocols::{
    generate_batch, AdversaryStrategy, BatchSpec, NoiseModel, OneTimeTable, Party, ProtocolKind,
};
use otable_core::qhe::{run_scheme1, table_bound, table_count, CliffordTCircuit};
use otable_core::security::{endpoint_scan, f_envelope, tradeoff_scan};
use otable_core::seed::{child_seed, stream_rng};
use rand::Rng;
use serde_json::{json, Value};

use crate::io;
use crate::{parse_bits, BoxMode, CliError, Command, Protocol, QheInput, Result, Sides};

pub const TRANSCRIPT_SCHEMA: &str = "schema/transcript.schema.json";

const ENVELOPE_GRID: [f64; 5] = [0.0, 0.01, 0.05, 0.1, 0.2];

fn protocol_kind(p: Protocol) -> ProtocolKind {
    match p {
        Protocol::Nland => ProtocolKind::Nland,
        Protocol::Nland3 => ProtocolKind::Nland3,
        Protocol::Nland2 => ProtocolKind::Nland2,
    }
}

/// Strategy by name for `role`; `keep` feeds `declare_failure`.
pub fn strategy(name: &str, role: Party, keep: &[String]) -> Result<AdversaryStrategy> {
    let s = match name {
        "honest" => AdversaryStrategy::honest(role),
        "honest_but_curious" | "curious" => AdversaryStrategy::curious(role),
        "fixed_measurement" => AdversaryStrategy::bob_fixed_zx(),
        "custom_sigma" => AdversaryStrategy::bob_forced_x(),
        "entangled_input" => AdversaryStrategy::alice_entangled(),
        "distinguisher" => AdversaryStrategy::alice_distinguisher(),
        "declare_failure" => {
            let patterns = keep
                .iter()
                .map(|k| match parse_bits(k)?.as_slice() {
                    &[a, b] => Ok([a, b]),
                    _ => Err(CliError::Usage(format!("keep pattern {k:?} needs two bits"))),
                })
                .collect::<Result<Vec<_>>>()?;
            AdversaryStrategy::declare_failure(patterns)
        }
        _ => return Err(CliError::Usage(format!("unknown strategy {name}"))),
    };
    if s.role != role {
        return Err(CliError::Usage(format!("{name} is not a {role:?} strategy")));
    }
    Ok(s)
}

fn abort_or_ok(aborted: bool) -> &'static str {
    if aborted {
        "abort"
    } else {
        "ok"
    }
}

fn correct_pool(n: usize, seed: u64) -> Result<TablePool> {
    let mut rng = stream_rng(seed, 1);
    Ok(TablePool::new(
        (0..n as u64).map(|i| OneTimeTable::random_correct(i, &mut rng)).collect(),
    )?)
}

pub fn dispatch(cmd: &Command) -> Result<Value> {
    let common = cmd.common();
    let (seed, dir) = (common.seed, common.out_dir.as_path());
    match cmd {
        Command::GenTables {
            protocol,
            n,
            adversary_a,
            adversary_b,
            alice_fraction,
            bob_fraction,
            eps_noise,
            eps_fail,
            keep,
            ..
        } => {
            let kind = protocol_kind(*protocol);
            let alice = strategy(adversary_a, Party::Alice, keep)?;
            let bob = strategy(adversary_b, Party::Bob, keep)?;
            alice.validate(kind, Party::Alice)?;
            bob.validate(kind, Party::Bob)?;
            let spec = BatchSpec {
                protocol: kind,
                alice,
                bob,
                alice_fraction: *alice_fraction,
                bob_fraction: *bob_fraction,
                noise: NoiseModel::new(*eps_noise, *eps_fail)?,
                size: *n,
                seed,
            };
            let batch = generate_batch(&spec)?;
            let header = format!(
                "otable transcripts v1 schema={TRANSCRIPT_SCHEMA} protocol={} seed={seed} runs={n}",
                kind.name()
            );
            io::write_jsonl(&dir.join("transcripts.jsonl"), &header, &batch.transcripts)?;
            io::write_views(dir, &batch.tables)?;
            let guesses: Vec<_> = batch.transcripts.iter().flat_map(|t| t.guesses.iter()).collect();
            let right = guesses.iter().filter(|g| g.correct()).count();
            Ok(json!({
                "command": "gen-tables",
                "outcome": "ok",
                "protocol": kind.name(),
                "seed": seed,
                "runs": n,
                "tables": batch.tables.len(),
                "failed": batch.failed.len(),
                "cheated": batch.cheated.len(),
                "errors": batch.error_count(),
                "guesses": guesses.len(),
                "correct_guesses": right,
            }))
        }
        Command::Check {
            batch,
            mode,
            k,
            k_a,
            threshold,
            expected_rate,
            ..
        } => {
            let tables = io::read_batch(batch)?;
            let threshold = threshold.unwrap_or_else(|| default_threshold(*expected_rate, *k));
            let outcome = match mode {
                Sides::OneSided => check_onesided(&tables, &CheckConfig::one_sided(*k, threshold, seed))?,
                Sides::TwoSided => {
                    check_twosided(&tables, &CheckConfig::two_sided(k_a.unwrap_or(*k), *k, threshold, seed))?
                }
            };
            io::write_views(dir, &outcome.passed)?;
            Ok(json!({
                "command": "check",
                "outcome": abort_or_ok(outcome.aborted),
                "seed": seed,
                "tables_in": tables.len(),
                "tables_out": outcome.passed.len(),
                "initiator": outcome.initiator,
                "failures": outcome.failures,
                "estimate": outcome.estimate,
                "interval": outcome.interval,
                "checks": outcome.checks,
            }))
        }
        Command::Combine { batch, k, .. } => {
            let tables = io::read_batch(batch)?;
            let spec = CombineSpec::by_bob_input(&tables, *k)?;
            let out = combine_tables(&tables, &spec)?;
            io::write_views(dir, &out)?;
            Ok(json!({
                "command": "combine",
                "outcome": "ok",
                "k": k,
                "tables_in": tables.len(),
                "tables_out": out.len(),
                "groups": spec.groups,
            }))
        }
        Command::ErrorReduce {
            batch,
            synthetic,
            inject_rate,
            q,
            ..
        } => {
            let tables = match (batch, synthetic) {
                (Some(b), _) => io::read_batch(b)?,
                (None, Some(n)) => {
                    if !(0.0..=1.0).contains(inject_rate) {
                        return Err(CliError::Usage(format!("inject-rate {inject_rate} outside [0, 1]")));
                    }
                    noisy_tables(*n, *inject_rate, &mut stream_rng(seed, 1))
                }
                (None, None) => return Err(CliError::Usage("give --batch or --synthetic".into())),
            };
            let input_errors = tables.iter().filter(|t| !t.is_correct()).count();
            let r = reduce_batch(&tables, *q, child_seed(seed, 2))?;
            io::write_views(dir, &r.accepted)?;
            Ok(json!({
                "command": "error-reduce",
                "outcome": "ok",
                "q": q,
                "tables_in": tables.len(),
                "input_errors": input_errors,
                "accepted": r.accepted.len(),
                "rejected": r.rejected,
                "aux_used": r.aux_used,
                "residual_error_rate": r.residual_error_rate,
            }))
        }
        Command::EvalCircuit {
            circuit,
            alice,
            bob,
            batch,
            ..
        } => {
            let c = BooleanCircuit::parse(&io::read_text(circuit)?)?;
            let plan = compile_circuit(&c);
            let mut pool = match batch {
                Some(b) => TablePool::new(io::read_batch(b)?)?,
                None => correct_pool(plan.table_budget, seed)?,
            };
            let (a, b) = (parse_bits(alice)?, parse_bits(bob)?);
            let run = eval_circuit(&plan, &a, &b, &mut pool)?;
            let outputs_for = |p: Party| -> Vec<Value> {
                c.outputs
                    .iter()
                    .zip(&run.outputs)
                    .filter(|((_, r), _)| r.receives(p))
                    .map(|((w, _), v)| json!({ "wire": c.names[*w], "value": v }))
                    .collect()
            };
            io::write_json(
                &dir.join(io::ALICE_FILE),
                &json!({ "party": "alice", "inputs": a, "received": run.alice_received(), "outputs": outputs_for(Party::Alice) }),
            )?;
            io::write_json(
                &dir.join(io::BOB_FILE),
                &json!({ "party": "bob", "inputs": b, "received": run.bob_received(), "outputs": outputs_for(Party::Bob) }),
            )?;
            Ok(json!({
                "command": "eval-circuit",
                "outcome": "ok",
                "seed": seed,
                "outputs": run.outputs,
                "expected": c.evaluate(&a, &b)?,
                "tables_used": run.tables_used,
                "table_budget": plan.table_budget,
            }))
        }
        Command::Ot { m0, m1, choice, .. } => {
            let run = ot_1of2(*m0, *m1, *choice, &mut correct_pool(1, seed)?)?;
            Ok(json!({
                "command": "ot",
                "outcome": "ok",
                "seed": seed,
                "output": run.output,
                "alice_received": run.alice_transcript(),
                "bob_received": run.bob_transcript(),
            }))
        }
        Command::Commit {
            bit,
            bob_inputs,
            m,
            flip,
            enumerate,
            ..
        } => {
            if *enumerate {
                let rates = equivocation_rates(*m, *bit, seed)?;
                let best = rates.iter().copied().fold(0.0, f64::max);
                return Ok(json!({
                    "command": "commit",
                    "outcome": "ok",
                    "m": m,
                    "bit": bit,
                    "equivocation_rates": rates,
                    "max_nonzero_rate": rates.iter().skip(1).copied().fold(0.0, f64::max),
                    "max_rate": best,
                }));
            }
            let inputs = match bob_inputs {
                Some(s) => parse_bits(s)?,
                None => {
                    let mut rng = stream_rng(seed, 0);
                    loop {
                        let v: Vec<bool> = (0..*m).map(|_| rng.random()).collect();
                        if v.iter().any(|&b| b) || *m == 0 {
                            break v;
                        }
                    }
                }
            };
            let st = bit_commit(*bit, &inputs, &mut correct_pool(inputs.len(), seed)?)?;
            let pattern = match flip {
                Some(f) => parse_bits(f)?,
                None => vec![false; st.m],
            };
            if pattern.len() != st.m {
                return Err(CliError::Usage(format!("flip has {} bits, commitment has {}", pattern.len(), st.m)));
            }
            let revealed: Vec<bool> = st.alice_shares.iter().zip(&pattern).map(|(s, f)| s ^ f).collect();
            let decision = bit_reveal(&st, &revealed)?;
            let (outcome, opened) = match decision {
                RevealDecision::Bit(v) => ("ok", Some(v)),
                RevealDecision::CheatDetected => ("abort", None),
            };
            Ok(json!({
                "command": "commit",
                "outcome": outcome,
                "seed": seed,
                "bit": bit,
                "m": st.m,
                "opened": opened,
                "equivocated": opened == Some(!*bit),
                "bob_received": st.alice_msgs,
                "revealed": revealed,
            }))
        }
        Command::NsBox { e, mode, samples, .. } => {
            let mode = match mode {
                BoxMode::OneSided => NsMode::OneSided,
                BoxMode::Symmetric => NsMode::Symmetric,
            };
            let mut pool = correct_pool(*samples, seed)?;
            let mut rng = stream_rng(seed, 2);
            let (mut win, mut a1, mut b1) = (0usize, 0usize, 0usize);
            for _ in 0..*samples {
                let (a, b): (bool, bool) = (rng.random(), rng.random());
                let s = ns_box_sample(a, b, *e, mode, &mut pool, &mut rng)?;
                win += ((s.a_out ^ s.b_out) == (a & b)) as usize;
                a1 += s.a_out as usize;
                b1 += s.b_out as usize;
            }
            let n = (*samples).max(1) as f64;
            Ok(json!({
                "command": "ns-box",
                "outcome": "ok",
                "seed": seed,
                "e": e,
                "samples": samples,
                "p_win": win as f64 / n,
                "target_p_win": 0.5 * (1.0 + e),
                "p_a_one": a1 as f64 / n,
                "p_b_one": b1 as f64 / n,
            }))
        }
        Command::HolevoScan {
            samples,
            ancilla,
            out,
            endpoint,
            max_delta,
            ..
        } => {
            let scan = if *endpoint {
                endpoint_scan(*samples, *ancilla, *max_delta, seed)?
            } else {
                tradeoff_scan(*samples, *ancilla, seed)?
            };
            let path = out.clone().unwrap_or_else(|| dir.join("scan.csv"));
            io::write_scan_csv(&path, &scan.points)?;
            let env = f_envelope(&scan.points, &ENVELOPE_GRID);
            Ok(json!({
                "command": "holevo-scan",
                "outcome": "ok",
                "seed": seed,
                "samples": samples,
                "ancilla": ancilla,
                "endpoint": endpoint,
                "max_sum": scan.max_sum,
                "argmax_seed": scan.argmax.map(|p| p.seed),
                "envelope": env,
            }))
        }
        Command::Qhe { circuit, input, .. } => qhe(circuit, *input, seed, dir),
    }
}

fn qhe(path: &Path, input: QheInput, seed: u64, dir: &Path) -> Result<Value> {
    let c = CliffordTCircuit::parse(&io::read_text(path)?)?;
    let psi = match input {
        QheInput::Zero => PureState::zero(c.n)?,
        QheInput::Haar => haar_state(c.n, &mut stream_rng(seed, 0)),
    };
    let r = c.t_count();
    let mut pool = correct_pool(table_count(c.n, r), seed)?;
    let run = run_scheme1(&c, &psi, &mut pool, &mut stream_rng(seed, 2))?;
    let fidelity = run.output.fidelity(&c.simulate(&psi)?)?;
    let audit = run.audit_bob_view();
    io::write_jsonl(
        &dir.join("qhe_transcript.jsonl"),
        &format!("otable qhe messages v1 seed={seed} qubits={} t_count={r}", c.n),
        &run.transcript,
    )?;
    Ok(json!({
        "command": "qhe",
        "outcome": "ok",
        "seed": seed,
        "qubits": c.n,
        "gates": c.gates.len(),
        "t_count": r,
        "fidelity": fidelity,
        "tables_used": run.tables_used,
        "table_bound": table_bound(c.n, r),
        "variables": run.variables,
        "bob_view_audit": audit.map_or_else(|e| e.to_string(), |_| "ok".into()),
    }))
}
