use chamber_core::{AtomicKind, PresetId, Suite};
use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Parser, Debug)]
#[command(name = "chamber", version, about = "Exact and asymptotic counts of reflectable walks in the type-B Weyl chamber")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Exact confined counts by dynamic programming and/or the reflection sum.
    Count(CountArgs),
    /// Closed-form asymptotic estimates.
    Asym(AsymArgs),
    /// Exact counts against asymptotic estimates over a grid, with a decay fit.
    Compare(CompareArgs),
    /// Exact count, specialised asymptotic formula and ratio for a named model.
    Preset(PresetArgs),
    /// Run verification suites; exits 0 only if every check passes.
    Verify(VerifyArgs),
}

#[derive(Args, Debug)]
pub struct ModelArgs {
    /// Take the step model (and default endpoints) from a preset.
    #[arg(long, conflicts_with_all = ["kind", "weights"])]
    pub preset: Option<PresetId>,
    /// Atomic step set.
    #[arg(long, value_enum)]
    pub kind: Option<KindArg>,
    /// Dimension (number of walkers).
    #[arg(long)]
    pub k: usize,
    /// Weights w_0,w_1,...,w_d of the composite-step polynomial, e.g. 0,1 or 1/2,0,1/2.
    #[arg(long, value_delimiter = ',')]
    pub weights: Option<Vec<String>>,
    /// Start point, strictly increasing positive coordinates.
    #[arg(long, value_delimiter = ',')]
    pub u: Option<Vec<i64>>,
    /// End point; omit for walks with a free endpoint.
    #[arg(long, value_delimiter = ',')]
    pub v: Option<Vec<i64>>,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum KindArg {
    Axis,
    Diagonal,
}

impl From<KindArg> for AtomicKind {
    fn from(k: KindArg) -> Self {
        match k {
            KindArg::Axis => AtomicKind::Axis,
            KindArg::Diagonal => AtomicKind::Diagonal,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Method {
    Dp,
    Reflection,
    Both,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum OnOff {
    On,
    Off,
}

/// A list of lengths: `N`, `A..B` (inclusive) or `A:B:STEP`.
#[derive(Clone, Debug)]
pub struct Lengths(pub Vec<usize>);

impl std::str::FromStr for Lengths {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let num = |t: &str| t.trim().parse::<usize>().map_err(|_| format!("not a length: {t:?}"));
        let out: Vec<usize> = if let Some((a, b)) = s.split_once("..") {
            (num(a)?..=num(b)?).collect()
        } else if s.contains(':') {
            let parts: Vec<&str> = s.split(':').collect();
            let [a, b, step] = parts[..] else {
                return Err(format!("expected START:STOP:STEP, got {s:?}"));
            };
            let step = num(step)?;
            if step == 0 {
                return Err("step must be positive".into());
            }
            (num(a)?..=num(b)?).step_by(step).collect()
        } else {
            vec![num(s)?]
        };
        if out.is_empty() {
            return Err(format!("empty range {s:?}"));
        }
        Ok(Lengths(out))
    }
}

#[derive(Args, Debug)]
pub struct CountArgs {
    #[command(flatten)]
    pub model: ModelArgs,
    /// Number of composite steps: N, A..B or A:B:STEP.
    #[arg(long)]
    pub n: Lengths,
    #[arg(long, value_enum, default_value = "dp")]
    pub method: Method,
    #[arg(long, value_enum, default_value = "json")]
    pub format: Format,
    /// Refuse instances whose estimated state count exceeds this.
    #[arg(long)]
    pub state_budget: Option<u64>,
}

#[derive(Args, Debug)]
pub struct AsymArgs {
    #[command(flatten)]
    pub model: ModelArgs,
    #[arg(long)]
    pub n: Lengths,
    /// Multiply fixed-endpoint estimates by the printed second-order factor 1 + 1/(nΛ).
    #[arg(long, value_enum, default_value = "off")]
    pub correction: OnOff,
}

#[derive(Args, Debug)]
pub struct CompareArgs {
    #[command(flatten)]
    pub model: ModelArgs,
    /// Lengths to compare: START:STOP:STEP (or N, A..B).
    #[arg(long)]
    pub grid: Lengths,
    #[arg(long, value_enum, default_value = "json")]
    pub format: Format,
    #[arg(long)]
    pub state_budget: Option<u64>,
}

#[derive(Args, Debug)]
pub struct PresetArgs {
    /// One of: lock-step-fixed, watermelon, lock-step-free, star, random-turns-fixed,
    /// random-turns-free, tangled-isolated, tangled-no-isolated.
    pub name: PresetId,
    #[arg(long)]
    pub k: usize,
    /// Preset length parameter (the half-length for watermelons).
    #[arg(long)]
    pub n: Lengths,
    #[arg(long, value_delimiter = ',')]
    pub u: Option<Vec<i64>>,
    #[arg(long, value_delimiter = ',')]
    pub v: Option<Vec<i64>>,
    #[arg(long, value_enum, default_value = "off")]
    pub correction: OnOff,
    #[arg(long)]
    pub state_budget: Option<u64>,
}

#[derive(Args, Debug)]
pub struct VerifyArgs {
    /// Comma-separated suites; defaults to all of them.
    #[arg(long, value_delimiter = ',')]
    pub suite: Option<Vec<Suite>>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Include passing checks in the report, not only failures.
    #[arg(long)]
    pub full: bool,
}
