use std::fs;
use std::path::Path;

use causalkit::boxes::{
    chsh_value, deterministic_boxes, facet_test, is_nonsignalling, local_membership, marginal_game_win,
    random_nonsignalling, worst_facet, ConditionalBox, LP_TOL,
};
use causalkit::causal_rac::{
    dpi_grid_agreement, hgr_condition_check, quantum_boundary_check, signalling_sum_check, table_rows,
    two_round_dpi_check, CausalRacParams,
};
use causalkit::entropy::{chain_block_entropy, max_entropy_bound, ChainSpec, OscillatorPair};
use causalkit::info_causality::{pyramid_monte_carlo, scan_rows, success_probability_exact};
use causalkit::localization::{
    convergence_metrics, cross_commutator_magnitude, cross_commutator_quadrature, CoarseGrainConfig,
};
use causalkit::process::cj::{identity_channel_choi, random_channel};
use causalkit::process::ctc::{deutsch_fixed_point, grandfather_unitary, swap_unitary};
use causalkit::process::ocb::{ocb_game, ocb_process};
use causalkit::process::separability::{causal_separability_with, Method, Separability, DEFAULT_TOL};
use causalkit::process::switch::switch_discriminate;
use causalkit::process::validity::validate_process;
use causalkit::process::{
    maximally_mixed_process, operator_entries, operator_from_json, ordered_process, ordered_process_b_first,
    ProcessMatrix, SystemDims,
};
use causalkit::quantum_chsh::{boosted_chsh, compensated_chsh, tsirelson_value, BoostScenario};
use causalkit::rng::stream_rng;
use causalkit::{Operator, Pauli, PureState};
use rayon::prelude::*;
use serde_json::json;

use crate::cli::*;
use crate::report::{num, Report};

#[derive(Debug)]
pub enum Failure {
    /// Bad arguments or unreadable files.
    Usage(String),
    /// Input or parameters rejected by a check; an artifact may still be written.
    Validation(String, Option<Box<Report>>),
}

impl From<causalkit::Error> for Failure {
    fn from(e: causalkit::Error) -> Self {
        Failure::Validation(e.to_string(), None)
    }
}

type Outcome = Result<Report, Failure>;

const BOX_TOL: f64 = 1e-9;
const CTC_TOL: f64 = 1e-12;
const SWITCH_TOL: f64 = 1e-9;

fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| Failure::Usage(format!("cannot read {}: {e}", path.display())))
}

pub fn run(cmd: &Command, g: &GlobalOpts) -> Outcome {
    match cmd {
        Command::Chsh { tsirelson } => chsh(*tsirelson),
        Command::Boxes(c) => boxes(c, g),
        Command::Ic(c) => ic(c, g),
        Command::Process(c) => process(c, g),
        Command::Crac(c) => crac(c),
        Command::Wigner { xi, chi } => wigner(*xi, *chi),
        Command::Entropy(c) => entropy(c),
        Command::Localize(c) => localize(c),
        Command::Ctc { circuit, input, max_iter } => ctc(*circuit, *input, *max_iter, g),
        Command::Switch { a, b, target } => switch(*a, *b, *target, g),
    }
}

fn chsh(tsirelson: bool) -> Outcome {
    if tsirelson {
        return Ok(Report::scalar("chsh", num(tsirelson_value())));
    }
    let classical = deterministic_boxes().iter().map(|b| chsh_value(b).abs()).fold(0.0, f64::max);
    let mut r = Report::new(&["strategy", "chsh"]);
    r.push(vec![json!("deterministic"), num(classical)]);
    r.push(vec![json!("singlet"), num(tsirelson_value())]);
    r.push(vec![json!("pr_box"), num(chsh_value(&ConditionalBox::pr_box()))]);
    Ok(r)
}

fn preset_box(preset: BoxPreset, e: f64) -> Result<ConditionalBox, Failure> {
    Ok(match preset {
        BoxPreset::Pr => ConditionalBox::pr_box(),
        BoxPreset::Uniform => ConditionalBox::uniform(),
        BoxPreset::Isotropic => ConditionalBox::isotropic(e)?,
        BoxPreset::Deterministic => ConditionalBox::deterministic([0, 0], [0, 0]),
    })
}

fn load_box(path: &Path) -> Result<ConditionalBox, Failure> {
    serde_json::from_str(&read(path)?).map_err(|e| Failure::Validation(format!("invalid box: {e}"), None))
}

fn boxes(cmd: &BoxesCmd, g: &GlobalOpts) -> Outcome {
    match cmd {
        BoxesCmd::Nonsignalling(src) => {
            let bx = match &src.input {
                Some(p) => load_box(p)?,
                None => preset_box(src.preset, src.e)?,
            };
            let rep = is_nonsignalling(&bx, g.tol.unwrap_or(BOX_TOL));
            let mut r = Report::new(&["nonsignalling", "worst_violation", "symmetric_marginal_violation", "chsh"]);
            r.push(vec![
                json!(rep.nonsignalling),
                num(rep.worst_violation),
                num(rep.symmetric_marginal_violation),
                num(chsh_value(&bx)),
            ]);
            Ok(r)
        }
        BoxesCmd::Polytope { samples, source } => {
            let tol = g.tol.unwrap_or(LP_TOL);
            let boxes: Vec<ConditionalBox> = match (&source.input, source.preset) {
                (Some(p), _) => vec![load_box(p)?],
                (None, Some(preset)) => vec![preset_box(preset, source.e)?],
                (None, None) => {
                    let mut rng = stream_rng(g.seed, 0);
                    (0..*samples).map(|_| random_nonsignalling(&mut rng)).collect()
                }
            };
            let rows = boxes
                .par_iter()
                .map(|bx| -> Result<Vec<serde_json::Value>, Failure> {
                    let lp = local_membership(bx)?.is_inside();
                    let facets = facet_test(bx, tol);
                    Ok(vec![json!(lp), json!(facets), json!(lp == facets), num(worst_facet(bx).1)])
                })
                .collect::<Result<Vec<_>, _>>()?;
            let mut r = Report::new(&["index", "lp_inside", "facets_inside", "agree", "max_chsh"]);
            for (i, mut row) in rows.into_iter().enumerate() {
                row.insert(0, json!(i));
                r.push(row);
            }
            Ok(r)
        }
        BoxesCmd::Game { p } => {
            let table = ConditionalBox::marginal_game_table(*p)?;
            let mut r = Report::new(&["p", "table_nonsignalling", "table_chsh", "pr_relabeled_win"]);
            let relabeled = ConditionalBox::pr_variant((1, 1), true);
            r.push(vec![
                num(*p),
                json!(is_nonsignalling(&table, BOX_TOL).nonsignalling),
                num(chsh_value(&table)),
                num(marginal_game_win(&relabeled)),
            ]);
            Ok(r)
        }
    }
}

fn ic(cmd: &IcCmd, g: &GlobalOpts) -> Outcome {
    match cmd {
        IcCmd::Rac { n, e, trials } => {
            let mc = pyramid_monte_carlo(*n, *e, *trials, g.seed)?;
            let exact = success_probability_exact(*e, *n);
            let mut r = Report::new(&["n", "E", "trials", "successes", "rate", "P_exact", "sigma"]);
            r.push(vec![json!(n), num(*e), json!(mc.trials), json!(mc.successes), num(mc.rate()), num(exact), num(mc.sigma(exact))]);
            Ok(r)
        }
        IcCmd::Scan { e, n_max } => {
            if !(-1.0..=1.0).contains(e) {
                return Err(causalkit::Error::InvalidParameter(format!("bias {e} outside [-1,1]")).into());
            }
            let mut r = Report::new(&["n", "E", "I_exact", "I_lower_bound", "P_k"]);
            for row in scan_rows(*e, *n_max) {
                r.push(vec![json!(row.n), num(row.e), num(row.i_exact), num(row.i_lower_bound), num(row.p_k)]);
            }
            Ok(r)
        }
    }
}

fn wire(forward: bool) -> ProcessMatrix {
    let half = Operator::identity(&[2]).scaled(0.5);
    let choi = identity_channel_choi(2);
    if forward {
        ordered_process(&half, &choi, 2).expect("identity wire is a channel")
    } else {
        ordered_process_b_first(&half, &choi, 2).expect("identity wire is a channel")
    }
}

fn preset_process(p: ProcessPreset) -> ProcessMatrix {
    match p {
        ProcessPreset::Ocb => ocb_process(),
        ProcessPreset::Mixed => maximally_mixed_process(SystemDims::qubits()),
        ProcessPreset::Ab => wire(true),
        ProcessPreset::Ba => wire(false),
        ProcessPreset::Mixture => wire(true).mix(&wire(false), 0.5).expect("same dims"),
    }
}

fn load_operator(src: &ProcessSource) -> Result<(Operator, SystemDims), Failure> {
    match &src.input {
        Some(p) => Ok(operator_from_json(&read(p)?)?),
        None => {
            let w = preset_process(src.preset);
            Ok((w.operator().clone(), w.dims()))
        }
    }
}

fn load_process(src: &ProcessSource) -> Result<ProcessMatrix, Failure> {
    let (op, dims) = load_operator(src)?;
    Ok(ProcessMatrix::new(op, dims)?)
}

fn matrix_report(op: &Operator) -> Report {
    let mut r = Report::new(&["row", "col", "re", "im"]);
    for (i, row) in operator_entries(op).iter().enumerate() {
        for (j, [re, im]) in row.iter().enumerate() {
            r.push(vec![json!(i), json!(j), num(*re), num(*im)]);
        }
    }
    r
}

fn process(cmd: &ProcessCmd, g: &GlobalOpts) -> Outcome {
    match cmd {
        ProcessCmd::Validate(src) => {
            let (op, dims) = load_operator(src)?;
            let rep = validate_process(&op, dims)?;
            let mut r = Report::new(&["check", "residual", "passed"]);
            for c in &rep.checks {
                r.push(vec![json!(c.name), num(c.residual), json!(c.passed)]);
            }
            let r = r.with_detail(&rep);
            if rep.valid {
                Ok(r)
            } else {
                Err(Failure::Validation(format!("invalid process matrix: {}", rep.summary()), Some(Box::new(r))))
            }
        }
        ProcessCmd::OcbGame(src) => Ok(Report::scalar("p_success", num(ocb_game(&load_process(src)?)?))),
        ProcessCmd::Separability { source, max_iter, method } => {
            let w = load_process(source)?;
            let method = match method {
                MethodArg::DouglasRachford => Method::DouglasRachford,
                MethodArg::Dykstra => Method::Dykstra,
            };
            let res = causal_separability_with(&w, g.tol.unwrap_or(DEFAULT_TOL), *max_iter, method)?;
            let reconstruction = match &res {
                Separability::Separable { a_before_b, b_before_a, .. } => {
                    num((a_before_b + b_before_a).max_abs_diff(w.operator()))
                }
                Separability::NoFeasiblePoint { .. } => serde_json::Value::Null,
            };
            let verdict = if res.is_separable() { "separable" } else { "no_feasible_point" };
            let mut r = Report::new(&["verdict", "residual", "iterations", "reconstruction_error"]);
            r.push(vec![json!(verdict), num(res.residual()), json!(res.iterations()), reconstruction]);
            Ok(r.with_detail(&res))
        }
        ProcessCmd::Ordered { order } => {
            let mut rng = stream_rng(g.seed, 0);
            let rho = random_channel(1, 2, &mut rng).operator().clone().with_dims(vec![2])?;
            let choi = random_channel(2, 2, &mut rng).operator().transpose();
            let w = match order {
                OrderArg::Ab => ordered_process(&rho, &choi, 2)?,
                OrderArg::Ba => ordered_process_b_first(&rho, &choi, 2)?,
            };
            Ok(matrix_report(w.operator()).with_detail(&w))
        }
    }
}

fn crac(cmd: &CracCmd) -> Outcome {
    match cmd {
        CracCmd::Table { n, e1, e2 } => {
            let params = CausalRacParams::new(*n, *e1, *e2)?;
            let mut r = Report::new(&["n", "k", "E1", "E2", "p_term", "P_n", "I_n", "lower", "upper"]);
            for t in table_rows(&params) {
                r.push(vec![
                    json!(t.n),
                    json!(t.k),
                    num(t.e1),
                    num(t.e2),
                    num(t.p_term),
                    num(t.p_n),
                    num(t.i_n),
                    num(t.lower),
                    num(t.upper),
                ]);
            }
            Ok(r)
        }
        CracCmd::Bounds { e1, e2, n_max } => {
            let b = quantum_boundary_check(*e1, *e2, *n_max)?;
            let s = signalling_sum_check(*e1, *e2)?;
            let mut r = Report::new(&[
                "E1",
                "E2",
                "squared_sum",
                "quantum",
                "max_efficiency",
                "first_violation",
                "information_sum",
                "signalling_sum_satisfied",
            ]);
            r.push(vec![
                num(*e1),
                num(*e2),
                num(b.squared_sum),
                json!(b.quantum),
                num(b.max_efficiency),
                json!(b.first_violation),
                num(s.information_sum),
                json!(s.satisfied),
            ]);
            Ok(r)
        }
        CracCmd::Hgr { e1, e2 } => {
            let h = hgr_condition_check(*e1, *e2)?;
            let mut r = Report::new(&["E1", "E2", "rho1", "rho2", "squared_sum", "plain_sum", "quantum", "causally_separable"]);
            r.push(vec![
                num(*e1),
                num(*e2),
                num(h.rho1),
                num(h.rho2),
                num(h.squared_sum),
                num(h.plain_sum),
                json!(h.quantum),
                json!(h.causally_separable),
            ]);
            Ok(r)
        }
        CracCmd::Dpi { step, e1a, e2a, e1b, e2b } => {
            if let (Some(e1a), Some(e2a), Some(e1b), Some(e2b)) = (e1a, e2a, e1b, e2b) {
                let d = two_round_dpi_check(*e1a, *e2a, *e1b, *e2b)?;
                let mut r = Report::new(&["information_conditions", "quantum_second_round"]);
                r.push(vec![json!(d.information_conditions()), json!(d.quantum_second_round)]);
                return Ok(r.with_detail(&d));
            }
            if !(*step > 0.0 && *step <= 1.0) {
                return Err(Failure::Usage(format!("step {step} must lie in (0, 1]")));
            }
            let s = dpi_grid_agreement(*step)?;
            let mut r = Report::new(&["step", "points", "pointwise_disagreements", "uniform_disagreements"]);
            r.push(vec![num(*step), json!(s.points), json!(s.pointwise_disagreements), json!(s.uniform_disagreements)]);
            Ok(r)
        }
    }
}

fn wigner(xi: f64, chi: f64) -> Outcome {
    let s = BoostScenario::new(xi, chi)?;
    let mut r = Report::new(&["xi", "chi", "delta", "boosted_chsh", "compensated_chsh"]);
    r.push(vec![num(s.xi), num(s.chi), num(s.delta), num(boosted_chsh(s.delta)), num(compensated_chsh(s.delta))]);
    Ok(r)
}

fn unit(bits: bool) -> (&'static str, f64) {
    if bits {
        ("entropy_bits", std::f64::consts::LN_2)
    } else {
        ("entropy_nats", 1.0)
    }
}

fn entropy(cmd: &EntropyCmd) -> Outcome {
    match cmd {
        EntropyCmd::Pair { k0, k1, bits } => {
            let pair = OscillatorPair::new(*k0, *k1)?;
            let (col, div) = unit(*bits);
            let mut r = Report::new(&["k0", "k1", "xi", col]);
            r.push(vec![num(*k0), num(*k1), num(pair.xi), num(pair.entropy() / div)]);
            Ok(r)
        }
        EntropyCmd::Chain { n, k0, k1, block_size, bits } => {
            let sizes: Vec<usize> = match block_size {
                Some(s) => vec![*s],
                None => (1..*n).collect(),
            };
            let values = sizes
                .par_iter()
                .map(|&s| chain_block_entropy(&ChainSpec::leading(*n, *k0, *k1, s)?))
                .collect::<causalkit::Result<Vec<f64>>>()?;
            if values.is_empty() {
                return Err(causalkit::Error::InvalidParameter(format!("chain of {n} sites has no proper block")).into());
            }
            let (col, div) = unit(*bits);
            let mut r = Report::new(&["N", "block_size", "k0", "k1", col]);
            for (s, v) in sizes.iter().zip(values) {
                r.push(vec![json!(n), json!(s), num(*k0), num(*k1), num(v / div)]);
            }
            Ok(r)
        }
        EntropyCmd::Bound { m, n, bits } => {
            let (col, div) = unit(*bits);
            let mut r = Report::new(&["m", "n", col]);
            r.push(vec![json!(m), json!(n), num(max_entropy_bound(*m, *n)? / div)]);
            Ok(r)
        }
    }
}

fn localize(cmd: &LocalizeCmd) -> Outcome {
    match cmd {
        LocalizeCmd::Converge { eps_m } => {
            let metrics = eps_m
                .par_iter()
                .map(|&em| convergence_metrics(em, 1.0))
                .collect::<causalkit::Result<Vec<_>>>()?;
            let mut r = Report::new(&["eps_m", "sup_f_minus", "l2_dist_f_plus"]);
            for m in &metrics {
                r.push(vec![num(m.eps_m), num(m.sup_f_minus), num(m.l2_dist_f_plus)]);
            }
            Ok(r)
        }
        LocalizeCmd::Commutator { epsilon, m, d, j, k } => {
            let cfg = CoarseGrainConfig::new(*epsilon, *m, *d)?;
            let closed = cross_commutator_magnitude(&cfg, *j, *k);
            let quad = cross_commutator_quadrature(&cfg, *j, *k)?;
            let mut r = Report::new(&["epsilon", "d", "j", "k", "closed_form", "quadrature"]);
            r.push(vec![num(*epsilon), num(*d), json!(j), json!(k), num(closed), num(quad)]);
            Ok(r)
        }
    }
}

fn ctc(circuit: Circuit, input: InputState, max_iter: usize, g: &GlobalOpts) -> Outcome {
    let u = match circuit {
        Circuit::Identity => Operator::identity(&[2, 2]),
        Circuit::Swap => swap_unitary(),
        Circuit::Grandfather => grandfather_unitary(),
    };
    let rho_in = match input {
        InputState::Zero => PureState::basis(0, &[2]).projector(),
        InputState::One => PureState::basis(1, &[2]).projector(),
        InputState::Plus => Operator::from_real_rows(2, &[0.5, 0.5, 0.5, 0.5])?,
        InputState::Mixed => Operator::identity(&[2]).scaled(0.5),
    };
    let fp = deutsch_fixed_point(&u, &rho_in, g.tol.unwrap_or(CTC_TOL), max_iter)?;
    let mut r = matrix_report(&fp.rho);
    r = r.with_detail(&fp);
    Ok(r)
}

fn pauli(p: PauliArg) -> Pauli {
    match p {
        PauliArg::I => Pauli::I,
        PauliArg::X => Pauli::X,
        PauliArg::Y => Pauli::Y,
        PauliArg::Z => Pauli::Z,
    }
}

fn switch(a: Option<PauliArg>, b: Option<PauliArg>, target: u8, g: &GlobalOpts) -> Outcome {
    let pairs: Vec<(Pauli, Pauli)> = match (a, b) {
        (Some(a), Some(b)) => vec![(pauli(a), pauli(b))],
        _ => Pauli::ALL.iter().flat_map(|&a| Pauli::ALL.iter().map(move |&b| (a, b))).collect(),
    };
    let psi = PureState::basis(usize::from(target), &[2]);
    let tol = g.tol.unwrap_or(SWITCH_TOL);
    let mut r = Report::new(&["a", "b", "relation", "p_plus"]);
    for (a, b) in pairs {
        let out = switch_discriminate(&Operator::pauli(a), &Operator::pauli(b), &psi, tol)?;
        let relation = serde_json::to_value(out.relation).expect("enum");
        r.push(vec![json!(a.label().to_string()), json!(b.label().to_string()), relation, num(out.p_plus)]);
    }
    Ok(r)
}
