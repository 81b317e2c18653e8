use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::str::FromStr;

use clap::{Args, Parser, Subcommand};

use ccf_siso::codes::{alpha_max, min_distance, rm_code, LinearCode};
use ccf_siso::gtg::{build_ccf_model, conditioned_model, flatten};
use ccf_siso::scc::{
    monte_carlo, ops_per_bit, parse_config, parse_snr_list, write_csv, MixtureSpec, SimConfig,
};
use ccf_siso::siso::{
    brute_force_siso, ccf_decode_rm1, ccf_op_count_recursion, dual_decode, DecodeResult, Ring,
};
use ccf_siso::trellis::{bcjr_siso, syndrome_trellis};

#[derive(Parser)]
#[command(
    name = "ccf-siso",
    version,
    about = "Optimal SISO decoding of Reed-Muller and extended Hamming codes on conditionally cycle-free generalized Tanner graphs"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Print n, k, minimum distance and the interleaver-gain exponent of a code
    CodeInfo {
        /// rm:<r>,<m> or eh:<m>
        #[arg(long, value_parser = CodeSelector::from_str)]
        code: CodeSelector,
    },
    /// Forest test of the RM(1,m) model before and after conditioning
    GtgCheck {
        #[arg(long, short)]
        m: usize,
        /// Print the conditioned graph's adjacency list
        #[arg(long)]
        dump: bool,
    },
    /// Decode a soft-input file
    ///
    /// The input file holds one real per line: the metric difference
    /// λ = −ln p(1) + ln p(0), so positive values favour bit 0.
    Decode {
        /// rm:<r>,<m> or eh:<m>
        #[arg(long, value_parser = CodeSelector::from_str)]
        code: CodeSelector,
        /// min, minstar or sumprod
        #[arg(long, value_parser = Ring::from_str, default_value = "minstar")]
        ring: Ring,
        /// Soft-input file (one metric difference per line)
        #[arg(long)]
        input: PathBuf,
    },
    /// Measured operation counts of the RM(1,m) decoder
    CountOps {
        #[arg(long, short)]
        m: usize,
    },
    /// Decoder operation counts for RM(1,3) … RM(1,8)
    Table1 {
        /// Re-derive every row and cross-check decoder outputs against enumeration
        #[arg(long, hide = true)]
        verify: bool,
    },
    /// Outer-decoder operations per information bit for the four mixtures
    Table2,
    /// Monte-Carlo BER/CER sweep, written as CSV
    Simulate(SimulateArgs),
}

#[derive(Args)]
struct SimulateArgs {
    /// Key = value configuration file; flags override its entries
    config: Option<PathBuf>,
    /// 8/9, 9/10, 11/12, 16/17 or custom:<m>:<count>,...
    #[arg(long)]
    mixture: Option<String>,
    /// Comma-separated Eb/N0 values in dB
    #[arg(long, allow_hyphen_values = true)]
    snr: Option<String>,
    /// Decoding iterations per block [default: 10]
    #[arg(long)]
    iters: Option<usize>,
    /// Noise and message seed [default: 1]
    #[arg(long)]
    seed: Option<u64>,
    /// Channel decoder semiring: min, minstar or sumprod [default: minstar]
    #[arg(long, value_parser = Ring::from_str)]
    ring: Option<Ring>,
    /// Block budget per Eb/N0 point [default: 1000]
    #[arg(long)]
    max_blocks: Option<u64>,
    /// Stop a point after this many bit errors, 0 to disable [default: 100]
    #[arg(long)]
    min_errors: Option<u64>,
    /// Worker threads (results do not depend on this)
    #[arg(long, env = "CCF_SISO_THREADS")]
    threads: Option<usize>,
    /// Write CSV here instead of standard output
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum CodeSelector {
    Rm { r: usize, m: usize },
    ExtendedHamming { m: usize },
}

impl FromStr for CodeSelector {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let bad = || format!("expected rm:<r>,<m> or eh:<m>, got {s:?}");
        if let Some(rest) = s.strip_prefix("rm:") {
            let (r, m) = rest.split_once(',').ok_or_else(bad)?;
            let r = r.trim().parse().map_err(|_| bad())?;
            let m = m.trim().parse().map_err(|_| bad())?;
            if r > m || !(1..=12).contains(&m) {
                return Err(format!("RM({r},{m}) needs r ≤ m ≤ 12"));
            }
            Ok(CodeSelector::Rm { r, m })
        } else if let Some(m) = s.strip_prefix("eh:") {
            let m: usize = m.trim().parse().map_err(|_| bad())?;
            if !(3..=12).contains(&m) {
                return Err(format!("extended Hamming length 2^{m} needs 3 ≤ m ≤ 12"));
            }
            Ok(CodeSelector::ExtendedHamming { m })
        } else {
            Err(bad())
        }
    }
}

impl CodeSelector {
    fn build(self) -> ccf_siso::Result<LinearCode> {
        match self {
            CodeSelector::Rm { r, m } => rm_code(r, m),
            CodeSelector::ExtendedHamming { m } => rm_code(m - 2, m),
        }
    }

    fn name(self) -> String {
        match self {
            CodeSelector::Rm { r, m } => format!("RM({r},{m})"),
            CodeSelector::ExtendedHamming { m } => format!("extended Hamming RM({},{m})", m - 2),
        }
    }
}

type CmdResult = Result<String, String>;

fn code_info(sel: CodeSelector) -> CmdResult {
    let code = sel.build().map_err(|e| e.to_string())?;
    let mut out = format!("code: {}\nn={} k={}", sel.name(), code.n(), code.k());
    match min_distance(&code) {
        Ok(Some(d)) => {
            let _ = write!(out, " d={d}\nalpha_max={}", alpha_max(d as u32));
        }
        Ok(None) => out.push_str(" d=undefined"),
        Err(_) => out.push_str(" d=not computed (too large)"),
    }
    out.push('\n');
    Ok(out)
}

fn gtg_check(m: usize, dump: bool) -> CmdResult {
    let model = build_ccf_model(m).map_err(|e| e.to_string())?;
    let g = flatten(&model);
    let verdict = |forest: bool| if forest { "forest" } else { "cyclic" };
    let conditioned =
        conditioned_model(&model, &vec![0; model.degree()]).map_err(|e| e.to_string())?;
    let mut out = format!(
        "RM(1,{m}): {} variables ({} hidden), {} checks, {} edges\n",
        g.num_variables(),
        model.degree(),
        g.num_checks(),
        g.num_edges()
    );
    let _ = writeln!(out, "unconditioned: {}", verdict(g.is_cycle_free()));
    let _ = writeln!(
        out,
        "conditioned: {} (degree {}, {} rounds)",
        verdict(conditioned.is_cycle_free()),
        model.degree(),
        1u64 << model.degree()
    );
    if dump {
        out.push_str(&conditioned.dump());
    }
    Ok(out)
}

fn read_soft_vector(path: &Path) -> Result<Vec<f64>, String> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| format!("cannot read {}: {e}", path.display()))?;
    text.lines()
        .enumerate()
        .map(|(i, l)| (i, l.split('#').next().unwrap().trim()))
        .filter(|(_, l)| !l.is_empty())
        .map(|(i, l)| {
            l.parse::<f64>()
                .ok()
                .filter(|x| x.is_finite())
                .ok_or_else(|| format!("{}:{}: not a finite number: {l:?}", path.display(), i + 1))
        })
        .collect()
}

fn decode(sel: CodeSelector, ring: Ring, input: &Path) -> CmdResult {
    let soft = read_soft_vector(input)?;
    let (method, result) = match sel {
        CodeSelector::Rm { r: 1, m } if m >= 2 => ("ccf", ccf_decode_rm1(m, &soft, ring)),
        CodeSelector::ExtendedHamming { m } => ("dual", dual_decode(m, &soft, ring)),
        other => {
            let code = other.build().map_err(|e| e.to_string())?;
            if code.k() <= 16 {
                ("enumeration", brute_force_siso(&code, &soft, ring))
            } else {
                let t = syndrome_trellis(&code).map_err(|e| e.to_string())?;
                ("bcjr", bcjr_siso(&t, &soft, ring))
            }
        }
    };
    let result: DecodeResult = result.map_err(|e| e.to_string())?;
    let mut out = format!(
        "code: {}\ndecoder: {method}\nring: {ring}\nadditions: {}\ncomparisons: {}\n",
        sel.name(),
        result.ops.additions,
        result.ops.comparisons
    );
    out.push_str("bit\tinput\tapp\textrinsic\tdecision\n");
    for (i, ((l, a), e)) in soft
        .iter()
        .zip(result.app.iter())
        .zip(result.extrinsic.iter())
        .enumerate()
    {
        let _ = writeln!(out, "{i}\t{l:.6}\t{a:.6}\t{e:.6}\t{}", (*a < 0.0) as u8);
    }
    Ok(out)
}

fn count_ops(m: usize) -> CmdResult {
    if !(2..=20).contains(&m) {
        return Err(format!("m must be in 2..=20, got {m}"));
    }
    let measured = ccf_decode_rm1(m, &vec![0.0; 1 << m], Ring::MinSum)
        .map_err(|e| e.to_string())?
        .ops;
    let closed = ccf_op_count_recursion(m);
    Ok(format!(
        "RM(1,{m}): {} additions, {} comparisons (recursion: {}, {})\n",
        measured.additions, measured.comparisons, closed.additions, closed.comparisons
    ))
}

fn table1(verify: bool) -> CmdResult {
    let mut out = String::from("code        n    additions  comparisons\n");
    for m in 3..=8 {
        let ops = ccf_decode_rm1(m, &vec![0.0; 1 << m], Ring::MinSum)
            .map_err(|e| e.to_string())?
            .ops;
        let _ = writeln!(
            out,
            "RM(1,{m})  {:>5}  {:>9}  {:>11}",
            1 << m,
            ops.additions,
            ops.comparisons
        );
        if verify {
            verify_row(m, ops)?;
        }
    }
    if verify {
        out.push_str("verified: counts match the recursion; outputs match enumeration for m ≤ 5\n");
    }
    Ok(out)
}

fn verify_row(m: usize, ops: ccf_siso::siso::OpCount) -> Result<(), String> {
    if ops != ccf_op_count_recursion(m) {
        return Err(format!(
            "RM(1,{m}): measured counts differ from the recursion"
        ));
    }
    if m > 5 {
        return Ok(());
    }
    let code = rm_code(1, m).map_err(|e| e.to_string())?;
    let input: Vec<f64> = (0..1 << m)
        .map(|i| ((i * 37 % 23) as f64 - 11.0) / 4.0)
        .collect();
    for ring in Ring::ALL {
        let a = ccf_decode_rm1(m, &input, ring).map_err(|e| e.to_string())?;
        let b = brute_force_siso(&code, &input, ring).map_err(|e| e.to_string())?;
        if a.app.max_abs_diff(&b.app) > 1e-9 {
            return Err(format!(
                "RM(1,{m}) {ring}: decoder disagrees with enumeration"
            ));
        }
    }
    Ok(())
}

fn table2() -> CmdResult {
    let mut out = String::from("rate    K     N     adds/bit  compares/bit\n");
    for name in MixtureSpec::CANONICAL {
        let spec = MixtureSpec::canonical(name).expect("canonical mixture");
        let (a, c) = ops_per_bit(&spec).map_err(|e| e.to_string())?;
        let _ = writeln!(
            out,
            "{name:<6}  {:<4}  {:<4}  {a:>8.1}  {c:>12.1}",
            spec.k(),
            spec.n()
        );
    }
    Ok(out)
}

fn simulate(args: &SimulateArgs) -> CmdResult {
    let mut config = match &args.config {
        Some(path) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| format!("cannot read {}: {e}", path.display()))?;
            parse_config(&text).map_err(|e| format!("{}: {e}", path.display()))?
        }
        None => {
            let mixture = args.mixture.as_deref().unwrap_or("8/9");
            let spec = mixture.parse::<MixtureSpec>().map_err(|e| e.to_string())?;
            let snr = args
                .snr
                .as_deref()
                .ok_or("simulate needs a config file or --snr")?;
            SimConfig::new(spec, parse_snr_list(snr).map_err(|e| e.to_string())?)
        }
    };
    if let Some(m) = &args.mixture {
        config.mixture = m.parse().map_err(|e: ccf_siso::Error| e.to_string())?;
    }
    if let Some(s) = &args.snr {
        config.ebn0_db = parse_snr_list(s).map_err(|e| e.to_string())?;
    }
    if let Some(i) = args.iters {
        config.iterations = i;
    }
    if let Some(s) = args.seed {
        config.seed = s;
    }
    if let Some(r) = args.ring {
        config.ring = r;
    }
    if let Some(b) = args.max_blocks {
        config.max_blocks = b;
    }
    if let Some(e) = args.min_errors {
        config.min_bit_errors = e;
    }
    config.validate().map_err(|e| e.to_string())?;

    let threads = args.threads.unwrap_or(0);
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| e.to_string())?;
    let records = pool
        .install(|| monte_carlo(&config))
        .map_err(|e| e.to_string())?;
    let csv = write_csv(&records);
    match &args.out {
        Some(path) => {
            std::fs::write(path, &csv)
                .map_err(|e| format!("cannot write {}: {e}", path.display()))?;
            Ok(String::new())
        }
        None => Ok(csv),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::CodeInfo { code } => code_info(*code),
        Command::GtgCheck { m, dump } => gtg_check(*m, *dump),
        Command::Decode { code, ring, input } => decode(*code, *ring, input),
        Command::CountOps { m } => count_ops(*m),
        Command::Table1 { verify } => table1(*verify),
        Command::Table2 => table2(),
        Command::Simulate(args) => simulate(args),
    };
    match result {
        Ok(text) => {
            print!("{text}");
            ExitCode::SUCCESS
        }
        Err(msg) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
    }
}
