//! Output payloads for every subcommand, in the three supported renderings.
//!
//! JSON shapes are stable and validated against the schemas shipped under
//! `docs/schema/`; exact rationals always appear as `{"num": <decimal
//! string>, "exp": <int>}` and big integers as decimal strings, never as
//! floats. CSV is RFC 4180 with a mandatory header row and CRLF line ends.

use serde::Serialize;

use kbonacci::dyadic::Dyadic;
use kbonacci::fractal::CoveringEntry;
use kbonacci::probability::FreqEntry;

/// One exact rational `num / 2^exp` in wire form.
#[derive(Debug, Clone, Serialize)]
pub struct WireDyadic {
    pub num: String,
    pub exp: u32,
}

impl From<&Dyadic> for WireDyadic {
    fn from(d: &Dyadic) -> Self {
        Self {
            num: d.num().to_string(),
            exp: d.exp(),
        }
    }
}

/// One row of a return-count distribution.
#[derive(Debug, Clone, Serialize)]
pub struct ProbEntry {
    pub i: usize,
    pub num: String,
    pub exp: u32,
}

impl ProbEntry {
    pub fn new(i: usize, d: &Dyadic) -> Self {
        Self {
            i,
            num: d.num().to_string(),
            exp: d.exp(),
        }
    }
}

/// `probs` payload: closed form vs oracle, row by row.
#[derive(Debug, Serialize)]
pub struct ProbsReport {
    pub k: usize,
    pub init: Vec<i64>,
    pub target: String,
    pub prefix_len: usize,
    pub exact: Vec<ProbEntry>,
    pub bruteforce: Vec<ProbEntry>,
    pub tail: WireDyadic,
    pub agree: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

impl ProbsReport {
    pub fn to_csv(&self) -> String {
        let mut out = String::from("i,exact_num,exact_exp,brute_num,brute_exp,agree\r\n");
        for (e, b) in self.exact.iter().zip(&self.bruteforce) {
            let row_agree = e.num == b.num && e.exp == b.exp;
            out.push_str(&format!(
                "{},{},{},{},{},{}\r\n",
                e.i, e.num, e.exp, b.num, b.exp, row_agree
            ));
        }
        out
    }

    pub fn to_table(&self) -> String {
        let mut out = format!(
            "k = {}, init = {:?}, target = {}, prefix = {}\n",
            self.k, self.init, self.target, self.prefix_len
        );
        out.push_str(&format!(
            "{:>4}  {:>18}  {:>18}  agree\n",
            "i", "exact", "bruteforce"
        ));
        for (e, b) in self.exact.iter().zip(&self.bruteforce) {
            let row_agree = e.num == b.num && e.exp == b.exp;
            out.push_str(&format!(
                "{:>4}  {:>18}  {:>18}  {}\n",
                e.i,
                format!("{}/2^{}", e.num, e.exp),
                format!("{}/2^{}", b.num, b.exp),
                row_agree
            ));
        }
        out.push_str(&format!("tail (more than i_max): {}/2^{}\n", self.tail.num, self.tail.exp));
        if let Some(note) = &self.note {
            out.push_str(&format!("note: {note}\n"));
        }
        out.push_str(&format!("agree: {}\n", self.agree));
        out
    }
}

/// `walk --target ...` payload: the characterization check on one word.
#[derive(Debug, Serialize)]
pub struct CheckReport {
    pub n: usize,
    pub predicted: Vec<usize>,
    pub actual: Vec<usize>,
    pub agree: bool,
}

impl CheckReport {
    pub fn to_table(&self) -> String {
        format!(
            "word length: {}\npredicted visit times: {:?}\nactual visit times:    {:?}\nagree: {}\n",
            self.n, self.predicted, self.actual, self.agree
        )
    }
}

/// `dimension` payload for the covering-profile modes.
#[derive(Debug, Serialize)]
pub struct DimensionReport {
    /// `zero_set` or `f1_set`.
    pub mode: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub k: Option<usize>,
    pub m_max: usize,
    pub entries: Vec<CoveringEntry>,
    pub fitted_slope: f64,
    pub r_squared: f64,
    /// The dimension the slope should recover.
    pub target: f64,
    pub absolute_error: f64,
    pub moran_root: f64,
    pub moran_absolute_error: f64,
    pub agree: bool,
}

impl DimensionReport {
    pub fn to_table(&self) -> String {
        format!(
            "mode: {}\nm_max: {}\nfitted slope: {:.6}\nr^2: {:.6}\ntarget: {:.6}\nabsolute error: {:.2e}\nMoran root: {:.12}\nMoran absolute error: {:.2e}\nagree: {}\n",
            self.mode,
            self.m_max,
            self.fitted_slope,
            self.r_squared,
            self.target,
            self.absolute_error,
            self.moran_root,
            self.moran_absolute_error,
            self.agree
        )
    }
}

/// `dimension --ratios ...` payload: plain Moran solve.
#[derive(Debug, Serialize)]
pub struct MoranReport {
    pub mode: String,
    pub ratios: Vec<f64>,
    pub tolerance: f64,
    pub moran_root: f64,
}

impl MoranReport {
    pub fn to_csv(&self) -> String {
        let mut out = String::from("key,value\r\n");
        for r in &self.ratios {
            out.push_str(&format!("ratio,{r}\r\n"));
        }
        out.push_str(&format!("moran_root,{}\r\n", self.moran_root));
        out
    }

    pub fn to_table(&self) -> String {
        format!(
            "ratios: {:?}\ntolerance: {:e}\nMoran root: {:.12}\n",
            self.ratios, self.tolerance, self.moran_root
        )
    }
}

/// One Monte Carlo tally with its exact reference, when a closed form
/// covers it.
#[derive(Debug, Serialize)]
pub struct McEntry {
    pub index: usize,
    pub hits: u64,
    pub freq: f64,
    pub std_err: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub exact: Option<WireDyadic>,
    /// `(freq - exact) / sqrt(exact (1 - exact) / trials)`; absent without
    /// a closed form.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub z: Option<f64>,
}

impl McEntry {
    pub fn new(e: &FreqEntry, exact: Option<&Dyadic>, trials: u64) -> Self {
        let (exact_wire, z) = match exact {
            Some(d) => {
                let p = d.to_f64();
                let se = (p * (1.0 - p) / trials as f64).sqrt();
                (Some(WireDyadic::from(d)), Some((e.freq - p) / se))
            }
            None => (None, None),
        };
        Self {
            index: e.index,
            hits: e.hits,
            freq: e.freq,
            std_err: e.std_err,
            exact: exact_wire,
            z,
        }
    }
}

/// `montecarlo` payload.
#[derive(Debug, Serialize)]
pub struct MonteCarloCliReport {
    pub k: usize,
    pub init: Vec<i64>,
    pub target: String,
    pub horizon: usize,
    pub trials: u64,
    pub seed: u64,
    /// Visit-count tallies (index = number of visits within the horizon).
    pub counts: Vec<McEntry>,
    /// Per-step visit tallies (index = step, 1-based).
    pub steps: Vec<McEntry>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub max_abs_z: Option<f64>,
    pub agree: bool,
}

impl MonteCarloCliReport {
    pub fn to_csv(&self) -> String {
        let mut out =
            String::from("kind,index,hits,freq,std_err,exact_num,exact_exp,z\r\n");
        for (kind, entries) in [("count", &self.counts), ("step", &self.steps)] {
            for e in entries {
                let (num, exp, z) = match (&e.exact, e.z) {
                    (Some(d), Some(z)) => (d.num.clone(), d.exp.to_string(), z.to_string()),
                    _ => (String::new(), String::new(), String::new()),
                };
                out.push_str(&format!(
                    "{kind},{},{},{},{},{num},{exp},{z}\r\n",
                    e.index, e.hits, e.freq, e.std_err
                ));
            }
        }
        out
    }

    pub fn to_table(&self) -> String {
        let mut out = format!(
            "k = {}, init = {:?}, target = {}, horizon = {}, trials = {}, seed = {}\n",
            self.k, self.init, self.target, self.horizon, self.trials, self.seed
        );
        out.push_str("visit counts:\n");
        out.push_str(&format!(
            "{:>6}  {:>9}  {:>10}  {:>10}  {:>14}  {:>8}\n",
            "count", "hits", "freq", "std_err", "exact", "z"
        ));
        for e in &self.counts {
            let exact = e
                .exact
                .as_ref()
                .map(|d| format!("{}/2^{}", d.num, d.exp))
                .unwrap_or_default();
            let z = e.z.map(|z| format!("{z:+.3}")).unwrap_or_default();
            out.push_str(&format!(
                "{:>6}  {:>9}  {:>10.6}  {:>10.6}  {:>14}  {:>8}\n",
                e.index, e.hits, e.freq, e.std_err, exact, z
            ));
        }
        if let Some(z) = self.max_abs_z {
            out.push_str(&format!("max |z|: {z:.3}\n"));
        }
        out.push_str(&format!("agree: {}\n", self.agree));
        out
    }
}

/// One named check inside `verify`.
#[derive(Debug, Serialize)]
pub struct VerifyCheck {
    pub name: String,
    pub pass: bool,
    pub detail: String,
}

/// `verify` payload: the one-shot oracle-equivalence suite.
#[derive(Debug, Serialize)]
pub struct VerifyReport {
    pub checks: Vec<VerifyCheck>,
    pub pass: bool,
}

impl VerifyReport {
    pub fn to_csv(&self) -> String {
        let mut out = String::from("name,pass,detail\r\n");
        for c in &self.checks {
            out.push_str(&format!(
                "{},{},{}\r\n",
                csv_escape(&c.name),
                c.pass,
                csv_escape(&c.detail)
            ));
        }
        out
    }

    pub fn to_table(&self) -> String {
        let mut out = String::new();
        for c in &self.checks {
            let tag = if c.pass { "[PASS]" } else { "[FAIL]" };
            if c.detail.is_empty() {
                out.push_str(&format!("{tag} {}\n", c.name));
            } else {
                out.push_str(&format!("{tag} {}: {}\n", c.name, c.detail));
            }
        }
        out.push_str(&format!(
            "verify: {}\n",
            if self.pass { "all checks passed" } else { "FAILED" }
        ));
        out
    }
}

/// RFC 4180: quote fields containing commas, quotes, or line breaks.
fn csv_escape(field: &str) -> String {
    if field.contains([',', '"', '\n', '\r']) {
        format!("\"{}\"", field.replace('"', "\"\""))
    } else {
        field.to_string()
    }
}
