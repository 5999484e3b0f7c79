//! `nihao` — command-line front end for the neighbor-discovery toolkit.

mod output;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use nihao_core::discovery::{worst_case_latency, SweepMode};
use nihao_core::format::{group_names, schedule_from_toml, schedule_to_toml, sim_from_toml};
use nihao_core::metrics::{
    closed_form_row, measured_report, plan_asymmetric, ClosedFormParams, Plan,
};
use nihao_core::oracle::search_min_active;
use nihao_core::protocols::{
    choose_for_dc, generate, parse_shorthand, BeaconMode, ProtocolKind, ProtocolParams,
};
use nihao_core::sim::{cdf, pair_sweep_cdf, run_testbed, Cdf, EventKind};
use nihao_core::{frac, Frac, Schedule};
use num_traits::ToPrimitive;
use output::{dec, fr, opt, print_metrics, Format};
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

/// Neighbor-discovery toolkit: schedule generation, exact latency sweeps,
/// metric tables, deployment planning, simulation, and the optimal
/// Listen-Listen search.
///
/// Numeric output: exact quantities print as integers or fractions `p/q`;
/// derived real numbers use fixed 6-decimal notation. Duty cycles and
/// alpha accept either form (`0.05` or `1/20`).
#[derive(Parser)]
#[command(name = "nihao", version, max_term_width = 100)]
struct Cli {
    /// Output format for results printed to stdout.
    #[arg(long, global = true, value_enum, default_value = "text")]
    format: Format,
    #[command(subcommand)]
    cmd: Cmd,
}

/// Tick-grid options shared by commands that build schedules on the fly.
#[derive(Args, Clone, Copy)]
struct Grid {
    /// Ticks per slot (the slot subdivision S).
    #[arg(long, default_value_t = 10_000)]
    ticks_per_slot: u64,
    /// Beacon length in ticks (B < S).
    #[arg(long, default_value_t = 1)]
    beacon_ticks: u64,
    /// Put a second beacon at the end of every talking slot.
    #[arg(long)]
    startend: bool,
}

impl Grid {
    fn mode(&self) -> BeaconMode {
        if self.startend {
            BeaconMode::StartEnd
        } else {
            BeaconMode::Start
        }
    }

    fn alpha(&self) -> Frac {
        frac(self.beacon_ticks as i128, self.ticks_per_slot as i128)
    }
}

#[derive(Subcommand)]
enum Cmd {
    /// Generate a schedule and write it as a TOML document.
    Gen {
        /// Protocol shorthand, e.g. `snihao:4`, `gnihao:11:22`, `disco:37:43`,
        /// `searchlight:40:striped`.
        #[arg(long, conflicts_with = "kind")]
        protocol: Option<String>,
        /// Protocol family; picks parameters nearest to `--dc`.
        #[arg(long, requires = "dc")]
        kind: Option<String>,
        /// Target duty cycle for `--kind` (e.g. `0.05` or `1/20`).
        #[arg(long)]
        dc: Option<String>,
        /// Talk/listen budget ratio n/m (required for `--kind gnihao`).
        #[arg(long)]
        gamma: Option<String>,
        #[command(flatten)]
        grid: Grid,
        /// Output file (stdout when omitted).
        #[arg(long, short)]
        out: Option<PathBuf>,
    },
    /// Metric reports for schedules or protocol shorthands.
    Metrics {
        /// Schedule files or protocol shorthands (at least one).
        #[arg(required = true)]
        input: Vec<String>,
        /// Beacon fraction alpha for closed-form rows (default matches the
        /// tick grid: beacon-ticks / ticks-per-slot).
        #[arg(long)]
        alpha: Option<String>,
        /// Measure the actual schedule (runs the exact worst-case sweep)
        /// instead of printing the closed-form row.
        #[arg(long)]
        measured: bool,
        /// Skip the latency sweep in measured mode.
        #[arg(long)]
        no_latency: bool,
        #[command(flatten)]
        grid: Grid,
    },
    /// The closed-form comparison table.
    Table {
        /// Protocol kinds (`uconnect`) or full shorthands (`disco:37:43`);
        /// also accepts `blinddate:S` and `lloptimal:N` reference rows.
        /// Defaults to every family that needs only `--dc`.
        #[arg(long)]
        protocol: Vec<String>,
        /// Target duty cycle used to pick parameters for bare kinds.
        #[arg(long)]
        dc: Option<String>,
        /// Beacon fraction alpha (default 27/500 = 0.054).
        #[arg(long, default_value = "27/500")]
        alpha: String,
        /// Talk/listen ratio for a bare `gnihao` entry.
        #[arg(long)]
        gamma: Option<String>,
    },
    /// Exact worst-case discovery latency between two schedules.
    Latency {
        /// First schedule: file or shorthand.
        #[arg(long)]
        a: String,
        /// Second schedule: file or shorthand.
        #[arg(long)]
        b: String,
        /// Which direction's worst case to headline: `bi`, `ab`, or `ba`.
        #[arg(long, default_value = "bi")]
        mode: String,
        /// Offset sweep: `critical` (exact, default) or `exhaustive[:STEP]`.
        #[arg(long, default_value = "critical")]
        sweep: String,
        /// Print the per-offset records instead of the summary.
        #[arg(long, conflicts_with = "cdf")]
        records: bool,
        /// Print the span-weighted latency CDF instead of the summary.
        #[arg(long)]
        cdf: bool,
        #[command(flatten)]
        grid: Grid,
    },
    /// Plan an asymmetric deployment from per-class duty-cycle targets.
    Plan {
        /// Duty-cycle target per class (repeat the flag; `0.01` or `1/100`).
        #[arg(long, required = true)]
        dc: Vec<String>,
        /// Beacon fraction alpha (default 27/500 = 0.054).
        #[arg(long, default_value = "27/500")]
        alpha: String,
    },
    /// Run the deterministic multi-node testbed from a TOML config.
    Simulate {
        /// Testbed configuration file.
        config: PathBuf,
        /// Directory for events.csv and per-group CDF files.
        #[arg(long, short)]
        out: Option<PathBuf>,
    },
    /// Brute-force minimal awake-slot count for a Listen-Listen period.
    Oracle {
        /// Period length in slots.
        #[arg(long)]
        period: u64,
        /// Occurrences of every rotation that must land in awake slots.
        #[arg(long, default_value_t = 1)]
        overlaps: u64,
        /// Raise the default search cap on the period length.
        #[arg(long)]
        cap: Option<u64>,
    },
}

fn main() {
    // Die quietly when the read end of a pipe goes away (`nihao ... | head`).
    #[cfg(unix)]
    unsafe {
        libc::signal(libc::SIGPIPE, libc::SIG_DFL);
    }
    if let Err(e) = run() {
        eprintln!("error: {e:#}");
        std::process::exit(1);
    }
}

fn run() -> Result<()> {
    let cli = Cli::parse();
    let format = cli.format;
    match cli.cmd {
        Cmd::Gen { protocol, kind, dc, gamma, grid, out } => {
            let params = resolve_params(protocol.as_deref(), kind.as_deref(), dc.as_deref(), gamma.as_deref(), &grid)?;
            let schedule = generate(&params, grid.mode(), grid.ticks_per_slot, grid.beacon_ticks)?;
            let text = schedule_to_toml(&schedule)?;
            match out {
                Some(path) => {
                    std::fs::write(&path, text).with_context(|| format!("writing {}", path.display()))?;
                }
                None => print!("{text}"),
            }
            Ok(())
        }
        Cmd::Metrics { input, alpha, measured, no_latency, grid } => {
            let alpha = match alpha {
                Some(a) => parse_frac(&a)?,
                None => grid.alpha(),
            };
            let mut rows = Vec::new();
            for item in &input {
                if measured {
                    let schedule = load_schedule(item, &grid)?;
                    let sweep = if no_latency {
                        None
                    } else {
                        Some(worst_case_latency(&schedule, &schedule, SweepMode::Critical)?)
                    };
                    rows.push(measured_report(&schedule, sweep.as_ref()));
                } else {
                    rows.push(closed_form_row(closed_form_params(item, &grid)?, alpha));
                }
            }
            print_metrics(&rows, format);
            Ok(())
        }
        Cmd::Table { protocol, dc, alpha, gamma } => {
            let alpha = parse_frac(&alpha)?;
            let dc = dc.map(|d| parse_frac(&d)).transpose()?;
            let gamma = gamma.map(|g| parse_frac(&g)).transpose()?;
            let explicit = !protocol.is_empty();
            let list = if explicit {
                protocol
            } else {
                let mut base = vec![
                    "quorum".to_string(),
                    "disco".into(),
                    "uconnect".into(),
                    "searchlight".into(),
                    "snihao".into(),
                    "bnihao".into(),
                ];
                if gamma.is_some() {
                    base.push("gnihao".into());
                }
                base
            };
            let mut rows = Vec::new();
            for entry in &list {
                match table_entry(entry, dc, alpha, gamma) {
                    Ok(params) => rows.push(closed_form_row(params, alpha)),
                    // In the default table an out-of-reach family is noted
                    // and skipped; a family the user asked for still fails.
                    Err(e) if !explicit => eprintln!("note: {entry}: {e:#}"),
                    Err(e) => return Err(e),
                }
            }
            print_metrics(&rows, format);
            Ok(())
        }
        Cmd::Latency { a, b, mode, sweep, records, cdf: want_cdf, grid } => {
            let sa = load_schedule(&a, &grid)?;
            let sb = load_schedule(&b, &grid)?;
            let sweep_mode = parse_sweep(&sweep)?;
            let result = worst_case_latency(&sa, &sb, sweep_mode)?;
            if records {
                print_records(&result, format);
            } else if want_cdf {
                print_cdf(&pair_sweep_cdf(&result), format);
            } else {
                print_sweep_summary(&a, &b, &mode, &result, format)?;
            }
            Ok(())
        }
        Cmd::Plan { dc, alpha } => {
            let alpha = parse_frac(&alpha)?;
            let targets: Vec<Frac> = dc.iter().map(|d| parse_frac(d)).collect::<Result<_>>()?;
            let plan = plan_asymmetric(&targets, alpha)?;
            print_plan(&plan, format);
            Ok(())
        }
        Cmd::Simulate { config, out } => {
            let text = std::fs::read_to_string(&config)
                .with_context(|| format!("reading {}", config.display()))?;
            let cfg = sim_from_toml(&text)?;
            let log = run_testbed(&cfg)?;
            let out_dir = out.unwrap_or_else(|| PathBuf::from("sim_out"));
            std::fs::create_dir_all(&out_dir)
                .with_context(|| format!("creating {}", out_dir.display()))?;
            let mut files = vec![write_events(&out_dir, &log)?];
            let groups = group_names(&cfg.nodes);
            files.push(write_cdf_file(&out_dir, "all", cdf(&log, &cfg, None, None))?);
            for (i, ga) in groups.iter().enumerate() {
                for gb in &groups[i..] {
                    let name = format!("{ga}__{gb}");
                    files.push(write_cdf_file(
                        &out_dir,
                        &name,
                        cdf(&log, &cfg, Some(ga.as_str()), Some(gb.as_str())),
                    )?);
                }
            }
            print_sim_summary(&cfg, &log, &files, format);
            Ok(())
        }
        Cmd::Oracle { period, overlaps, cap } => {
            let result = search_min_active(period, overlaps, cap)?;
            let bound = overlaps * period;
            let ksq = result.k_min * result.k_min;
            match format {
                Format::Text => {
                    println!(
                        "period = {period} slots, overlaps required = {overlaps}\nk_min = {} awake slots\nwitness = {:?}\nsubsets checked = {}\nbound check: k_min^2 = {ksq} >= overlaps*period = {bound} :: {}",
                        result.k_min,
                        result.witness,
                        result.subsets_checked,
                        if ksq >= bound { "ok" } else { "VIOLATED" }
                    );
                }
                Format::Csv => {
                    println!("period,overlaps,k_min,witness,subsets_checked,bound_ok");
                    println!(
                        "{period},{overlaps},{},{},{},{}",
                        result.k_min,
                        result
                            .witness
                            .iter()
                            .map(u64::to_string)
                            .collect::<Vec<_>>()
                            .join(" "),
                        result.subsets_checked,
                        ksq >= bound
                    );
                }
                Format::Structured => {
                    let mut t = toml::Table::new();
                    t.insert("period".into(), (period as i64).into());
                    t.insert("overlaps".into(), (overlaps as i64).into());
                    t.insert("k_min".into(), (result.k_min as i64).into());
                    t.insert(
                        "witness".into(),
                        toml::Value::Array(
                            result.witness.iter().map(|&w| (w as i64).into()).collect(),
                        ),
                    );
                    t.insert("subsets_checked".into(), (result.subsets_checked as i64).into());
                    t.insert("bound_ok".into(), (ksq >= bound).into());
                    print!("{}", toml::to_string_pretty(&t)?);
                }
            }
            Ok(())
        }
    }
}

/// Parse `p/q`, a decimal like `0.054`, or a bare integer, exactly.
fn parse_frac(s: &str) -> Result<Frac> {
    let s = s.trim();
    if let Some((n, d)) = s.split_once('/') {
        let n: i128 = n.trim().parse().with_context(|| format!("bad fraction {s:?}"))?;
        let d: i128 = d.trim().parse().with_context(|| format!("bad fraction {s:?}"))?;
        if d == 0 {
            bail!("zero denominator in {s:?}");
        }
        return Ok(frac(n, d));
    }
    if let Some((int, fracpart)) = s.split_once('.') {
        if fracpart.is_empty() || !fracpart.bytes().all(|b| b.is_ascii_digit()) {
            bail!("bad decimal {s:?}");
        }
        let negative = int.starts_with('-');
        let int_abs: i128 = match int.trim_start_matches(['-', '+']) {
            "" => 0,
            digits => digits.parse().with_context(|| format!("bad decimal {s:?}"))?,
        };
        let scale = 10i128
            .checked_pow(fracpart.len() as u32)
            .ok_or_else(|| anyhow!("too many decimal places in {s:?}"))?;
        let fp: i128 = fracpart.parse().with_context(|| format!("bad decimal {s:?}"))?;
        let magnitude = int_abs * scale + fp;
        return Ok(frac(if negative { -magnitude } else { magnitude }, scale));
    }
    Ok(frac(
        s.parse::<i128>().with_context(|| format!("bad number {s:?}"))?,
        1,
    ))
}

fn parse_kind(name: &str) -> Result<ProtocolKind> {
    Ok(match name {
        "quorum" => ProtocolKind::Quorum,
        "disco" => ProtocolKind::Disco,
        "uconnect" => ProtocolKind::UConnect,
        "searchlight" => ProtocolKind::SearchLight,
        "snihao" => ProtocolKind::SNihao,
        "gnihao" => ProtocolKind::GNihao,
        "bnihao" => ProtocolKind::BNihao,
        other => bail!("unknown protocol kind {other:?}"),
    })
}

fn resolve_params(
    protocol: Option<&str>,
    kind: Option<&str>,
    dc: Option<&str>,
    gamma: Option<&str>,
    grid: &Grid,
) -> Result<ProtocolParams> {
    match (protocol, kind) {
        (Some(short), _) => Ok(parse_shorthand(short)?),
        (None, Some(kind)) => {
            let dc = parse_frac(dc.expect("clap enforces --dc with --kind"))?;
            let gamma = gamma.map(parse_frac).transpose()?;
            Ok(choose_for_dc(parse_kind(kind)?, dc, grid.alpha(), gamma)?)
        }
        (None, None) => bail!("pass --protocol SHORTHAND or --kind FAMILY --dc TARGET"),
    }
}

/// A positional input is a schedule file if it exists on disk; otherwise it
/// is treated as a protocol shorthand on the command's tick grid.
fn load_schedule(input: &str, grid: &Grid) -> Result<Schedule> {
    if Path::new(input).exists() {
        let text = std::fs::read_to_string(input).with_context(|| format!("reading {input}"))?;
        return Ok(schedule_from_toml(&text)?);
    }
    let params = parse_shorthand(input)
        .map_err(|e| anyhow!("{input:?} is neither a file nor a shorthand: {e}"))?;
    Ok(generate(&params, grid.mode(), grid.ticks_per_slot, grid.beacon_ticks)?)
}

/// Closed-form rows need construction parameters: take them from the
/// shorthand, or from the provenance line of a generated schedule file.
fn closed_form_params(input: &str, _grid: &Grid) -> Result<ClosedFormParams> {
    let spec = if Path::new(input).exists() {
        let text = std::fs::read_to_string(input).with_context(|| format!("reading {input}"))?;
        let schedule = schedule_from_toml(&text)?;
        let prov = schedule
            .provenance()
            .ok_or_else(|| anyhow!("{input}: no provenance; closed-form rows need a protocol shorthand"))?;
        prov.split_whitespace().next().unwrap_or_default().to_string()
    } else {
        input.to_string()
    };
    reference_row(&spec).map_or_else(|| Ok(ClosedFormParams::Protocol(parse_shorthand(&spec)?)), Ok)
}

/// `blinddate:S` and `lloptimal:N` reference rows (not generatable).
fn reference_row(spec: &str) -> Option<ClosedFormParams> {
    let (name, arg) = spec.split_once(':')?;
    let v: u64 = arg.parse().ok()?;
    match name {
        "blinddate" => Some(ClosedFormParams::BlindDate { s: v }),
        "lloptimal" => Some(ClosedFormParams::LLOptimal { n: v }),
        _ => None,
    }
}

fn table_entry(
    entry: &str,
    dc: Option<Frac>,
    alpha: Frac,
    gamma: Option<Frac>,
) -> Result<ClosedFormParams> {
    if let Some(reference) = reference_row(entry) {
        return Ok(reference);
    }
    if entry.contains(':') {
        return Ok(ClosedFormParams::Protocol(parse_shorthand(entry)?));
    }
    let kind = parse_kind(entry)?;
    let dc = dc.ok_or_else(|| anyhow!("bare kind {entry:?} needs --dc to pick parameters"))?;
    Ok(ClosedFormParams::Protocol(choose_for_dc(kind, dc, alpha, gamma)?))
}

fn parse_sweep(s: &str) -> Result<SweepMode> {
    if s == "critical" {
        return Ok(SweepMode::Critical);
    }
    if s == "exhaustive" {
        return Ok(SweepMode::Exhaustive { step_ticks: 1 });
    }
    if let Some(step) = s.strip_prefix("exhaustive:") {
        let step_ticks: u64 = step.parse().with_context(|| format!("bad sweep step {step:?}"))?;
        if step_ticks == 0 {
            bail!("sweep step must be positive");
        }
        return Ok(SweepMode::Exhaustive { step_ticks });
    }
    bail!("sweep must be critical or exhaustive[:STEP], got {s:?}")
}

struct DirectionStats {
    worst: Option<u64>,
    covered: Frac,
}

fn direction_stats(
    result: &nihao_core::discovery::OffsetSweepResult,
    pick: impl Fn(&nihao_core::discovery::OffsetRecord) -> Option<u64>,
) -> DirectionStats {
    let g = result.offset_period_ticks as i128;
    let mut covered_span = 0i128;
    let mut worst = Some(0u64);
    for r in &result.records {
        match pick(r) {
            Some(b) => {
                covered_span += r.span_ticks as i128;
                worst = worst.map(|w| w.max(b));
            }
            None => worst = None,
        }
    }
    DirectionStats {
        worst,
        covered: frac(covered_span, g),
    }
}

fn print_sweep_summary(
    a: &str,
    b: &str,
    mode: &str,
    result: &nihao_core::discovery::OffsetSweepResult,
    format: Format,
) -> Result<()> {
    let ab = direction_stats(result, |r| r.bound_ab_slots);
    let ba = direction_stats(result, |r| r.bound_ba_slots);
    let bi = direction_stats(result, |r| r.bound_bi_slots);
    let (headline, label) = match mode {
        "bi" => (&bi, "bidirectional"),
        "ab" => (&ab, "a->b"),
        "ba" => (&ba, "b->a"),
        other => bail!("mode must be bi, ab, or ba, got {other:?}"),
    };
    let sweep_name = match result.mode {
        SweepMode::Critical => "critical".to_string(),
        SweepMode::Exhaustive { step_ticks } => format!("exhaustive:{step_ticks}"),
    };
    match format {
        Format::Text => {
            println!("pair: {a}  vs  {b}");
            println!(
                "sweep: {sweep_name} ({} offsets over {} ticks, hyperperiod {} ticks)",
                result.records.len(),
                result.offset_period_ticks,
                result.hyperperiod_ticks
            );
            println!("coverage (bidirectional) = {} ({})", fr(result.coverage), dec(result.coverage));
            println!(
                "worst case a->b = {} slots (covered {})",
                opt(&ab.worst, u64::to_string),
                fr(ab.covered)
            );
            println!(
                "worst case b->a = {} slots (covered {})",
                opt(&ba.worst, u64::to_string),
                fr(ba.covered)
            );
            println!(
                "worst case bidirectional = {} slots",
                opt(&bi.worst, u64::to_string)
            );
            println!(
                "headline ({label}) = {} slots",
                opt(&headline.worst, u64::to_string)
            );
            if result.worst_case_slots.is_none() {
                if let Some(w) = result.worst_covered_slots {
                    println!("note: not every offset discovers; worst covered offset needs {w} slots");
                }
            }
        }
        Format::Csv => {
            println!("a,b,sweep,offsets,offset_period_ticks,hyperperiod_ticks,coverage,worst_ab,worst_ba,worst_bi,headline_mode,headline_slots");
            println!(
                "{a},{b},{sweep_name},{},{},{},{},{},{},{},{label},{}",
                result.records.len(),
                result.offset_period_ticks,
                result.hyperperiod_ticks,
                dec(result.coverage),
                opt(&ab.worst, u64::to_string),
                opt(&ba.worst, u64::to_string),
                opt(&bi.worst, u64::to_string),
                opt(&headline.worst, u64::to_string),
            );
        }
        Format::Structured => {
            let mut t = toml::Table::new();
            t.insert("a".into(), a.into());
            t.insert("b".into(), b.into());
            t.insert("sweep".into(), sweep_name.into());
            t.insert("offsets".into(), (result.records.len() as i64).into());
            t.insert(
                "offset_period_ticks".into(),
                (result.offset_period_ticks as i64).into(),
            );
            t.insert("hyperperiod_ticks".into(), (result.hyperperiod_ticks as i64).into());
            t.insert("coverage".into(), fr(result.coverage).into());
            if let Some(w) = ab.worst {
                t.insert("worst_ab_slots".into(), (w as i64).into());
            }
            if let Some(w) = ba.worst {
                t.insert("worst_ba_slots".into(), (w as i64).into());
            }
            if let Some(w) = bi.worst {
                t.insert("worst_bi_slots".into(), (w as i64).into());
            }
            t.insert("headline_mode".into(), label.into());
            if let Some(w) = headline.worst {
                t.insert("headline_slots".into(), (w as i64).into());
            }
            print!("{}", toml::to_string_pretty(&t)?);
        }
    }
    Ok(())
}

fn print_records(result: &nihao_core::discovery::OffsetSweepResult, format: Format) {
    let header = "offset_ticks,span_ticks,first_ab_ticks,first_ba_ticks,first_bi_ticks,bound_ab_slots,bound_ba_slots,bound_bi_slots";
    let row = |r: &nihao_core::discovery::OffsetRecord| {
        format!(
            "{},{},{},{},{},{},{},{}",
            r.offset,
            r.span_ticks,
            opt(&r.first_uni_ab, u64::to_string),
            opt(&r.first_uni_ba, u64::to_string),
            opt(&r.first_bi, u64::to_string),
            opt(&r.bound_ab_slots, u64::to_string),
            opt(&r.bound_ba_slots, u64::to_string),
            opt(&r.bound_bi_slots, u64::to_string),
        )
    };
    match format {
        Format::Text | Format::Csv => {
            println!("{header}");
            for r in &result.records {
                println!("{}", row(r));
            }
        }
        Format::Structured => {
            let mut arr = Vec::new();
            for r in &result.records {
                let mut t = toml::Table::new();
                t.insert("offset_ticks".into(), (r.offset as i64).into());
                t.insert("span_ticks".into(), (r.span_ticks as i64).into());
                let mut put = |k: &str, v: Option<u64>| {
                    if let Some(v) = v {
                        t.insert(k.into(), (v as i64).into());
                    }
                };
                put("first_ab_ticks", r.first_uni_ab);
                put("first_ba_ticks", r.first_uni_ba);
                put("first_bi_ticks", r.first_bi);
                put("bound_ab_slots", r.bound_ab_slots);
                put("bound_ba_slots", r.bound_ba_slots);
                put("bound_bi_slots", r.bound_bi_slots);
                arr.push(toml::Value::Table(t));
            }
            let mut doc = toml::Table::new();
            doc.insert("offset".into(), toml::Value::Array(arr));
            print!("{}", toml::to_string_pretty(&doc).expect("toml"));
        }
    }
}

fn cdf_csv(curve: &Cdf) -> String {
    let mut out = String::from("latency_slots,fraction\n");
    for &(x, f) in &curve.points {
        let _ = writeln!(out, "{x},{}", dec(f));
    }
    out
}

fn print_cdf(curve: &Cdf, format: Format) {
    match format {
        Format::Text => {
            println!(
                "pairs: {} of {} discovered",
                curve.pairs_discovered, curve.pairs_total
            );
            for &(x, f) in &curve.points {
                println!("<= {x} slots: {} ({})", fr(f), dec(f));
            }
        }
        Format::Csv => print!("{}", cdf_csv(curve)),
        Format::Structured => {
            let mut t = toml::Table::new();
            t.insert("pairs_total".into(), (curve.pairs_total as i64).into());
            t.insert(
                "pairs_discovered".into(),
                (curve.pairs_discovered as i64).into(),
            );
            t.insert(
                "points".into(),
                toml::Value::Array(
                    curve
                        .points
                        .iter()
                        .map(|&(x, f)| {
                            toml::Value::Array(vec![x.into(), fr(f).into()])
                        })
                        .collect(),
                ),
            );
            print!("{}", toml::to_string_pretty(&t).expect("toml"));
        }
    }
}

fn print_plan(plan: &Plan, format: Format) {
    match format {
        Format::Text => {
            println!("classes: {}", plan.n.len());
            for i in 0..plan.n.len() {
                println!(
                    "  class {}: dc target = {} ({}), n = {}, gamma = {}, dc achieved = {} ({})",
                    i + 1,
                    fr(plan.dc_requested[i]),
                    dec(plan.dc_requested[i]),
                    plan.n[i],
                    fr(plan.gammas[i]),
                    fr(plan.dc_achieved[i]),
                    dec(plan.dc_achieved[i]),
                );
            }
            println!("shared listen block m = {}", plan.m);
            println!(
                "gamma product = {} ({})",
                fr(plan.gamma_product),
                dec(plan.gamma_product)
            );
            println!(
                "worst pairwise latency bound = {} slots",
                plan.latency_bound_slots
            );
        }
        Format::Csv => {
            println!("class,dc_target,n,gamma,dc_achieved,m,gamma_product,latency_bound_slots");
            for i in 0..plan.n.len() {
                println!(
                    "{},{},{},{},{},{},{},{}",
                    i + 1,
                    fr(plan.dc_requested[i]),
                    plan.n[i],
                    fr(plan.gammas[i]),
                    fr(plan.dc_achieved[i]),
                    plan.m,
                    dec(plan.gamma_product),
                    plan.latency_bound_slots
                );
            }
        }
        Format::Structured => {
            let mut t = toml::Table::new();
            t.insert("m".into(), (plan.m as i64).into());
            t.insert(
                "n".into(),
                toml::Value::Array(plan.n.iter().map(|&v| (v as i64).into()).collect()),
            );
            t.insert(
                "gammas".into(),
                toml::Value::Array(plan.gammas.iter().map(|&g| fr(g).into()).collect()),
            );
            t.insert("gamma_product".into(), fr(plan.gamma_product).into());
            t.insert(
                "gamma_product_decimal".into(),
                plan.gamma_product.to_f64().unwrap_or(f64::NAN).into(),
            );
            t.insert(
                "dc_requested".into(),
                toml::Value::Array(plan.dc_requested.iter().map(|&d| fr(d).into()).collect()),
            );
            t.insert(
                "dc_achieved".into(),
                toml::Value::Array(plan.dc_achieved.iter().map(|&d| fr(d).into()).collect()),
            );
            t.insert(
                "latency_bound_slots".into(),
                (plan.latency_bound_slots as i64).into(),
            );
            print!("{}", toml::to_string_pretty(&t).expect("toml"));
        }
    }
}

fn write_events(dir: &Path, log: &nihao_core::sim::DiscoveryLog) -> Result<PathBuf> {
    let mut out = String::from("listener,talker,tick,kind\n");
    for e in &log.events {
        let kind = match e.kind {
            EventKind::Unidirectional => "uni",
            EventKind::Bidirectional => "bi",
        };
        let _ = writeln!(out, "{},{},{},{kind}", e.listener, e.talker, e.tick);
    }
    let path = dir.join("events.csv");
    std::fs::write(&path, out).with_context(|| format!("writing {}", path.display()))?;
    Ok(path)
}

fn write_cdf_file(dir: &Path, name: &str, curve: Cdf) -> Result<PathBuf> {
    let path = dir.join(format!("cdf_{name}.csv"));
    std::fs::write(&path, cdf_csv(&curve)).with_context(|| format!("writing {}", path.display()))?;
    Ok(path)
}

fn print_sim_summary(
    cfg: &nihao_core::sim::SimConfig,
    log: &nihao_core::sim::DiscoveryLog,
    files: &[PathBuf],
    format: Format,
) {
    let n = cfg.nodes.len() as u64;
    let pairs = n * (n - 1) / 2;
    let discovered = log.first_bi.len() as u64;
    match format {
        Format::Text => {
            println!(
                "nodes = {n}, duration = {} slots ({} ticks/slot), seed = {}",
                cfg.duration_slots, cfg.ticks_per_slot, cfg.master_seed
            );
            println!(
                "transmissions = {}, collided = {}",
                log.transmissions, log.collisions
            );
            println!(
                "bidirectional pairs discovered = {discovered} / {pairs}"
            );
            if let Some(last) = log.events.last() {
                println!("last event at tick {}", last.tick);
            }
            for f in files {
                println!("wrote {}", f.display());
            }
        }
        Format::Csv => {
            println!("nodes,duration_slots,ticks_per_slot,seed,transmissions,collisions,pairs_total,pairs_discovered");
            println!(
                "{n},{},{},{},{},{},{pairs},{discovered}",
                cfg.duration_slots,
                cfg.ticks_per_slot,
                cfg.master_seed,
                log.transmissions,
                log.collisions
            );
        }
        Format::Structured => {
            let mut t = toml::Table::new();
            t.insert("nodes".into(), (n as i64).into());
            t.insert("duration_slots".into(), (cfg.duration_slots as i64).into());
            t.insert("ticks_per_slot".into(), (cfg.ticks_per_slot as i64).into());
            t.insert("seed".into(), (cfg.master_seed as i64).into());
            t.insert("transmissions".into(), (log.transmissions as i64).into());
            t.insert("collisions".into(), (log.collisions as i64).into());
            t.insert("pairs_total".into(), (pairs as i64).into());
            t.insert("pairs_discovered".into(), (discovered as i64).into());
            t.insert(
                "files".into(),
                toml::Value::Array(
                    files
                        .iter()
                        .map(|f| f.display().to_string().into())
                        .collect(),
                ),
            );
            print!("{}", toml::to_string_pretty(&t).expect("toml"));
        }
    }
}
