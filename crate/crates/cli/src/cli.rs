use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(name = "causalkit", version, about = "Nonlocal boxes, process matrices, causal games and oscillator entropy")]
pub struct Cli {
    #[command(flatten)]
    pub global: GlobalOpts,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct GlobalOpts {
    /// Seed for every random stream.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, global = true, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
    /// Write the artifact here instead of standard output.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Numerical tolerance; each command documents its default.
    #[arg(long, global = true)]
    pub tol: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// CHSH values of the classical, quantum and PR strategies.
    Chsh {
        /// Print only the singlet value with the optimal observables.
        #[arg(long)]
        tsirelson: bool,
    },
    /// Conditional boxes and the local polytope.
    #[command(subcommand)]
    Boxes(BoxesCmd),
    /// Information causality with the pyramid random access code.
    #[command(subcommand)]
    Ic(IcCmd),
    /// Process matrices and the causal game.
    #[command(subcommand)]
    Process(ProcessCmd),
    /// The causal random access code game.
    #[command(subcommand)]
    Crac(CracCmd),
    /// Wigner rotation and the boosted CHSH value.
    Wigner {
        /// Particle rapidity.
        #[arg(long, default_value_t = 1.0, allow_negative_numbers = true)]
        xi: f64,
        /// Observer rapidity.
        #[arg(long, default_value_t = 1.0, allow_negative_numbers = true)]
        chi: f64,
    },
    /// Entanglement entropy of coupled oscillators.
    #[command(subcommand)]
    Entropy(EntropyCmd),
    /// Coarse-grained localization schemes.
    #[command(subcommand)]
    Localize(LocalizeCmd),
    /// Deutsch fixed point of a two-qubit circuit.
    Ctc {
        #[arg(long, value_enum, default_value_t = Circuit::Grandfather)]
        circuit: Circuit,
        /// Input state of the chronology-respecting qubit.
        #[arg(long, value_enum, default_value_t = InputState::Zero)]
        input: InputState,
        /// Iteration cap.
        #[arg(long, default_value_t = causalkit::process::ctc::DEFAULT_MAX_ITER)]
        max_iter: usize,
    },
    /// Quantum switch discrimination of commuting and anticommuting unitaries.
    Switch {
        /// First Pauli; all 16 ordered pairs are run when omitted.
        #[arg(long, requires = "b")]
        a: Option<PauliArg>,
        /// Second Pauli.
        #[arg(long, requires = "a")]
        b: Option<PauliArg>,
        /// Computational basis state of the target qubit.
        #[arg(long, default_value_t = 0, value_parser = clap::value_parser!(u8).range(0..2))]
        target: u8,
    },
}

#[derive(Debug, Subcommand)]
pub enum BoxesCmd {
    /// Non-signalling check of a box.
    Nonsignalling(BoxSource),
    /// LP membership in the local polytope against the CHSH facets.
    Polytope {
        /// Number of random non-signalling boxes, used when no box is given.
        #[arg(long, default_value_t = 1000)]
        samples: usize,
        #[command(flatten)]
        source: OptionalBoxSource,
    },
    /// Winning probability of the marginal game.
    Game {
        /// Probability of outcome 1 in the winning table.
        #[arg(long, default_value_t = 0.5)]
        p: f64,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum BoxPreset {
    Pr,
    Uniform,
    Isotropic,
    Deterministic,
}

#[derive(Debug, Args)]
pub struct BoxSource {
    /// JSON box with keys "p" and "labels".
    #[arg(long, conflicts_with = "preset")]
    pub input: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = BoxPreset::Pr)]
    pub preset: BoxPreset,
    /// Bias of the isotropic preset.
    #[arg(long, default_value_t = 1.0 / std::f64::consts::SQRT_2, allow_negative_numbers = true)]
    pub e: f64,
}

#[derive(Debug, Args)]
pub struct OptionalBoxSource {
    /// JSON box with keys "p" and "labels".
    #[arg(long, conflicts_with = "preset")]
    pub input: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub preset: Option<BoxPreset>,
    /// Bias of the isotropic preset.
    #[arg(long, default_value_t = 1.0 / std::f64::consts::SQRT_2, allow_negative_numbers = true)]
    pub e: f64,
}

#[derive(Debug, Subcommand)]
pub enum IcCmd {
    /// Monte Carlo of the pyramid protocol on 2ⁿ bits.
    Rac {
        #[arg(long, default_value_t = 3)]
        n: u32,
        /// Box bias.
        #[arg(long, default_value_t = 1.0 / std::f64::consts::SQRT_2, allow_negative_numbers = true)]
        e: f64,
        #[arg(long, default_value_t = 10_000)]
        trials: u64,
    },
    /// Exact efficiency and its lower bound for n = 1..n_max.
    Scan {
        #[arg(long, default_value_t = 1.0 / std::f64::consts::SQRT_2, allow_negative_numbers = true)]
        e: f64,
        #[arg(long, default_value_t = 12)]
        n_max: u32,
    },
}

#[derive(Debug, Subcommand)]
pub enum ProcessCmd {
    /// Validity conditions of a process matrix; exits 2 when invalid.
    Validate(ProcessSource),
    /// Success probability of the causal game with the standard instruments.
    OcbGame(ProcessSource),
    /// Search for a decomposition into the two fixed orders.
    Separability {
        #[command(flatten)]
        source: ProcessSource,
        #[arg(long, default_value_t = causalkit::process::separability::DEFAULT_MAX_ITER)]
        max_iter: usize,
        #[arg(long, value_enum, default_value_t = MethodArg::DouglasRachford)]
        method: MethodArg,
    },
    /// A random ordered process from a seeded state and channel.
    Ordered {
        #[arg(long, value_enum, default_value_t = OrderArg::Ab)]
        order: OrderArg,
    },
}

#[derive(Debug, Args)]
pub struct ProcessSource {
    /// JSON process with keys "dims" and "entries".
    #[arg(long, conflicts_with = "preset")]
    pub input: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = ProcessPreset::Ocb)]
    pub preset: ProcessPreset,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ProcessPreset {
    /// The process with a causal-inequality violation.
    Ocb,
    /// The maximally mixed process.
    Mixed,
    /// Identity wire from Alice to Bob.
    Ab,
    /// Identity wire from Bob to Alice.
    Ba,
    /// Equal mixture of both wires.
    Mixture,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum OrderArg {
    Ab,
    Ba,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum MethodArg {
    DouglasRachford,
    Dykstra,
}

#[derive(Debug, Subcommand)]
pub enum CracCmd {
    /// Term probabilities, game value and efficiency bounds.
    Table {
        #[arg(long, default_value_t = 4)]
        n: u32,
        #[arg(long, default_value_t = 0.8)]
        e1: f64,
        #[arg(long, default_value_t = 0.8)]
        e2: f64,
    },
    /// Quantum boundary and single-round signalling sum.
    Bounds {
        #[arg(long, default_value_t = 0.8)]
        e1: f64,
        #[arg(long, default_value_t = 0.8)]
        e2: f64,
        #[arg(long, default_value_t = 20)]
        n_max: u32,
    },
    /// Maximal-correlation conditions.
    Hgr {
        #[arg(long, default_value_t = 0.8)]
        e1: f64,
        #[arg(long, default_value_t = 0.8)]
        e2: f64,
    },
    /// Two-round data-processing conditions against the quantum flag.
    Dpi {
        /// Grid step on [0, 1]; ignored when all four biases are given.
        #[arg(long, default_value_t = 0.1)]
        step: f64,
        #[arg(long, requires_all = ["e2a", "e1b", "e2b"])]
        e1a: Option<f64>,
        #[arg(long)]
        e2a: Option<f64>,
        #[arg(long)]
        e1b: Option<f64>,
        #[arg(long)]
        e2b: Option<f64>,
    },
}

#[derive(Debug, Subcommand)]
pub enum EntropyCmd {
    /// Two coupled oscillators.
    Pair {
        #[arg(long, default_value_t = 1.0)]
        k0: f64,
        #[arg(long, default_value_t = 1.0)]
        k1: f64,
        /// Report bits instead of nats.
        #[arg(long)]
        bits: bool,
    },
    /// Leading block of an open chain; all block sizes when omitted.
    Chain {
        #[arg(long = "sites", default_value_t = 10)]
        n: usize,
        #[arg(long, default_value_t = 1.0)]
        k0: f64,
        #[arg(long, default_value_t = 1.0)]
        k1: f64,
        #[arg(long)]
        block_size: Option<usize>,
        /// Report bits instead of nats.
        #[arg(long)]
        bits: bool,
    },
    /// Maximal entropy of n sites with m levels each.
    Bound {
        #[arg(long)]
        m: u64,
        #[arg(long)]
        n: u64,
        /// Report bits instead of nats.
        #[arg(long)]
        bits: bool,
    },
}

#[derive(Debug, Subcommand)]
pub enum LocalizeCmd {
    /// Convergence metrics of the smeared functions.
    Converge {
        /// Resolutions in units of the Compton wavelength.
        #[arg(long, value_delimiter = ',', default_value = "1,2,5,20")]
        eps_m: Vec<f64>,
    },
    /// Commutator overlap of two coarse-grained cells.
    Commutator {
        #[arg(long, default_value_t = 0.1)]
        epsilon: f64,
        #[arg(long, default_value_t = 1.0)]
        m: f64,
        /// Cell spacing.
        #[arg(long, default_value_t = 1.0)]
        d: f64,
        #[arg(long, default_value_t = 0, allow_negative_numbers = true)]
        j: i64,
        #[arg(long, default_value_t = 1, allow_negative_numbers = true)]
        k: i64,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Circuit {
    Identity,
    Swap,
    Grandfather,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum InputState {
    Zero,
    One,
    Plus,
    Mixed,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum PauliArg {
    I,
    X,
    Y,
    Z,
}
