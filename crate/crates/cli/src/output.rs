//! Shared output formatting: text, CSV, structured (TOML).
//!
//! Exact rationals print as `p/q` (or a bare integer); derived reals print
//! with fixed 6-decimal notation.

use clap::ValueEnum;
use nihao_core::metrics::{MetricsReport, MetricsSource};
use nihao_core::Frac;
use num_traits::ToPrimitive;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    /// Human-readable lines.
    Text,
    /// Comma-separated values with a header row.
    Csv,
    /// TOML-structured text.
    Structured,
}

/// Exact rational as `p/q` (bare integer when the denominator is 1).
pub fn fr(x: Frac) -> String {
    x.to_string()
}

/// Fixed 6-decimal rendering of a rational.
pub fn dec(x: Frac) -> String {
    format!("{:.6}", x.to_f64().expect("metric fits f64"))
}

pub fn dec_f(x: f64) -> String {
    format!("{x:.6}")
}

pub fn opt<T, F: Fn(&T) -> String>(v: &Option<T>, f: F) -> String {
    match v {
        Some(x) => f(x),
        None => "-".into(),
    }
}

fn toml_frac(x: Frac) -> toml::Value {
    toml::Value::String(fr(x))
}

/// CSV header for metric rows.
pub const METRICS_HEADER: &str = "label,source,alpha,period_slots,n_listen,n_beacon,n_common,\
dc,dc_decimal,latency_slots,big_lambda,lambda,eta,cor,gamma,balance";

pub fn metrics_csv_row(r: &MetricsReport) -> String {
    let source = match r.source {
        MetricsSource::ClosedForm => "closed-form",
        MetricsSource::Measured => "measured",
    };
    [
        r.label.clone(),
        source.into(),
        fr(r.alpha),
        fr(r.period_slots),
        fr(r.n_listen),
        fr(r.n_beacon),
        fr(r.n_common),
        fr(r.dc),
        dec(r.dc),
        opt(&r.latency_slots, |x| fr(*x)),
        opt(&r.big_lambda, |x| fr(*x)),
        opt(&r.lambda, |x| dec_f(*x)),
        fr(r.eta),
        fr(r.cor),
        opt(&r.gamma, |x| fr(*x)),
        opt(&r.balance, |x| fr(*x)),
    ]
    .join(",")
}

pub fn metrics_text(r: &MetricsReport) -> String {
    let source = match r.source {
        MetricsSource::ClosedForm => "closed-form",
        MetricsSource::Measured => "measured",
    };
    let mut out = format!("{} ({source}, alpha = {})\n", r.label, fr(r.alpha));
    out += &format!(
        "  period T         = {} slots\n  listens N_L      = {}\n  beacons N_B      = {}\n  common  N_c      = {}\n",
        fr(r.period_slots),
        fr(r.n_listen),
        fr(r.n_beacon),
        fr(r.n_common)
    );
    out += &format!("  duty cycle       = {} ({})\n", fr(r.dc), dec(r.dc));
    out += &format!(
        "  worst latency L  = {} slots\n",
        opt(&r.latency_slots, |x| fr(*x))
    );
    out += &format!(
        "  energy Lambda    = {}\n  norm latency lam = {}\n",
        opt(&r.big_lambda, |x| format!("{} ({})", fr(*x), dec(*x))),
        opt(&r.lambda, |x| dec_f(*x))
    );
    out += &format!(
        "  efficiency eta   = {}\n  overhead COR     = {}\n  ratio gamma      = {}\n  balance A        = {}",
        fr(r.eta),
        fr(r.cor),
        opt(&r.gamma, |x| fr(*x)),
        opt(&r.balance, |x| format!("{} ({})", fr(*x), dec(*x)))
    );
    out
}

pub fn metrics_toml(r: &MetricsReport) -> toml::Value {
    let mut t = toml::Table::new();
    t.insert("label".into(), toml::Value::String(r.label.clone()));
    t.insert(
        "source".into(),
        toml::Value::String(
            match r.source {
                MetricsSource::ClosedForm => "closed-form",
                MetricsSource::Measured => "measured",
            }
            .into(),
        ),
    );
    t.insert("alpha".into(), toml_frac(r.alpha));
    t.insert("period_slots".into(), toml_frac(r.period_slots));
    t.insert("n_listen".into(), toml_frac(r.n_listen));
    t.insert("n_beacon".into(), toml_frac(r.n_beacon));
    t.insert("n_common".into(), toml_frac(r.n_common));
    t.insert("dc".into(), toml_frac(r.dc));
    t.insert(
        "dc_decimal".into(),
        toml::Value::Float(r.dc.to_f64().unwrap_or(f64::NAN)),
    );
    if let Some(x) = r.latency_slots {
        t.insert("latency_slots".into(), toml_frac(x));
    }
    if let Some(x) = r.big_lambda {
        t.insert("big_lambda".into(), toml_frac(x));
    }
    if let Some(x) = r.lambda {
        t.insert("lambda".into(), toml::Value::Float(x));
    }
    t.insert("eta".into(), toml_frac(r.eta));
    t.insert("cor".into(), toml_frac(r.cor));
    if let Some(x) = r.gamma {
        t.insert("gamma".into(), toml_frac(x));
    }
    if let Some(x) = r.balance {
        t.insert("balance".into(), toml_frac(x));
    }
    toml::Value::Table(t)
}

/// Print a block of metric rows in the chosen format.
pub fn print_metrics(rows: &[MetricsReport], format: Format) {
    match format {
        Format::Text => {
            for (i, r) in rows.iter().enumerate() {
                if i > 0 {
                    println!();
                }
                println!("{}", metrics_text(r));
            }
        }
        Format::Csv => {
            println!("{METRICS_HEADER}");
            for r in rows {
                println!("{}", metrics_csv_row(r));
            }
        }
        Format::Structured => {
            let arr = toml::Value::Array(rows.iter().map(metrics_toml).collect());
            let mut doc = toml::Table::new();
            doc.insert("report".into(), arr);
            print!("{}", toml::to_string_pretty(&doc).expect("toml"));
        }
    }
}
