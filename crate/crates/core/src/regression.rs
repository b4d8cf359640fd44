//! Factor models of F1 against party control of the House, Senate and
//! Presidency, fitted by ordinary least squares.

use std::collections::BTreeMap;
use std::io::Read;

use serde::{Deserialize, Serialize};
use statrs::function::beta::beta_reg;

use crate::congress::{Chamber, Party};
use crate::error::{Error, Result};
use crate::linalg::DenseMatrix;

/// Which party controlled each branch during one Congress.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ControlRecord {
    pub congress: u32,
    pub house_majority: Party,
    pub senate_majority: Party,
    pub president_party: Party,
}

impl ControlRecord {
    pub fn majority(&self, chamber: Chamber) -> Party {
        match chamber {
            Chamber::House => self.house_majority,
            Chamber::Senate => self.senate_majority,
        }
    }

    /// Whether the House and Senate majorities differ.
    pub fn chambers_differ(&self) -> bool {
        self.house_majority != self.senate_majority
    }

    /// Whether the President's party differs from `chamber`'s majority.
    pub fn president_differs(&self, chamber: Chamber) -> bool {
        self.president_party != self.majority(chamber)
    }
}

/// Reads `congress,house_majority,senate_majority,president_party`.
pub fn read_control_records<R: Read>(reader: R) -> Result<Vec<ControlRecord>> {
    let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).comment(Some(b'#')).from_reader(reader);
    let mut out = Vec::new();
    for rec in rdr.deserialize::<RawControl>() {
        let raw = rec?;
        let party = |s: &str| {
            s.parse::<Party>().map_err(|message| Error::Parse { line: 0, message: format!("congress {}: {message}", raw.congress) })
        };
        out.push(ControlRecord {
            congress: raw.congress,
            house_majority: party(&raw.house_majority)?,
            senate_majority: party(&raw.senate_majority)?,
            president_party: party(&raw.president_party)?,
        });
    }
    Ok(out)
}

#[derive(Deserialize)]
struct RawControl {
    congress: u32,
    house_majority: String,
    senate_majority: String,
    president_party: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Model {
    /// `F ~ H * S * P`: three main effects, three two-way and one three-way
    /// interaction.
    FullThreeFactor,
    /// Agreement of the other chamber and the Presidency with `chamber`'s
    /// majority, with their interaction.
    Agreement(Chamber),
}

impl Model {
    pub fn name(&self) -> String {
        match self {
            Model::FullThreeFactor => "full-three-factor".into(),
            Model::Agreement(c) => format!("agreement-two-factor ({c})"),
        }
    }
}

#[derive(Debug, Clone)]
pub struct Design {
    pub terms: Vec<String>,
    pub x: DenseMatrix,
    pub y: Vec<f64>,
    pub congresses: Vec<u32>,
}

fn rep(p: Party) -> f64 {
    if p == Party::Republican { 1.0 } else { 0.0 }
}

fn flag(b: bool) -> f64 {
    if b { 1.0 } else { 0.0 }
}

/// Treatment-coded design. Democrat is the reference level of each party
/// factor; "same party" is the reference level of each agreement factor.
/// A column that is constant over the sample is an error.
pub fn build_design(records: &[ControlRecord], response: &BTreeMap<u32, f64>, model: Model) -> Result<Design> {
    let d = design_matrix(records, response, model)?;
    if d.x.rows() > 0 {
        for (j, term) in d.terms.iter().enumerate().skip(1) {
            let col = d.x.column(j);
            if col.iter().all(|v| *v == col[0]) {
                return Err(Error::RankDeficient { column: term.clone() });
            }
        }
    }
    Ok(d)
}

/// [`build_design`] without the constant-column check, for fits that drop
/// aliased columns.
pub fn design_matrix(records: &[ControlRecord], response: &BTreeMap<u32, f64>, model: Model) -> Result<Design> {
    let by_congress: BTreeMap<u32, &ControlRecord> = records.iter().map(|r| (r.congress, r)).collect();
    let terms: Vec<String> = match model {
        Model::FullThreeFactor => ["(Intercept)", "H", "S", "P", "H:S", "H:P", "S:P", "H:S:P"]
            .map(String::from)
            .to_vec(),
        Model::Agreement(Chamber::House) => ["(Intercept)", "S'", "P'", "S':P'"].map(String::from).to_vec(),
        Model::Agreement(Chamber::Senate) => ["(Intercept)", "H'", "P'", "H':P'"].map(String::from).to_vec(),
    };
    let mut rows = Vec::with_capacity(response.len());
    let mut y = Vec::with_capacity(response.len());
    let mut congresses = Vec::with_capacity(response.len());
    for (&congress, &f) in response {
        let r = by_congress.get(&congress).ok_or(Error::MissingControl(congress))?;
        let row = match model {
            Model::FullThreeFactor => {
                let (h, s, p) = (rep(r.house_majority), rep(r.senate_majority), rep(r.president_party));
                vec![1.0, h, s, p, h * s, h * p, s * p, h * s * p]
            }
            Model::Agreement(chamber) => {
                let a = flag(r.chambers_differ());
                let b = flag(r.president_differs(chamber));
                vec![1.0, a, b, a * b]
            }
        };
        rows.push(row);
        y.push(f);
        congresses.push(congress);
    }
    let x = DenseMatrix::from_rows(&rows);
    Ok(Design { terms, x, y, congresses })
}

/// What to do with a design column that is a linear combination of the
/// columns before it.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Aliasing {
    #[default]
    Reject,
    /// Drop the column and report it, as R's `lm` does.
    Drop,
}

#[derive(Debug, Clone, Serialize)]
pub struct OlsFit {
    pub terms: Vec<String>,
    pub estimates: Vec<f64>,
    pub std_errors: Vec<f64>,
    pub t_values: Vec<f64>,
    pub p_values: Vec<f64>,
    pub df_residual: usize,
    pub residual_std_error: f64,
    pub residuals: Vec<f64>,
    /// Terms dropped as linearly dependent on earlier terms.
    pub aliased: Vec<String>,
}

/// Relative tolerance for declaring a column aliased.
const ALIAS_TOLERANCE: f64 = 1e-7;

pub fn ols_fit(x: &DenseMatrix, y: &[f64], terms: &[String]) -> Result<OlsFit> {
    ols_fit_with(x, y, terms, Aliasing::Reject)
}

/// Least squares via Householder QR, with standard errors from
/// `s^2 (X'X)^-1` and two-sided t-test p-values.
pub fn ols_fit_with(x: &DenseMatrix, y: &[f64], terms: &[String], aliasing: Aliasing) -> Result<OlsFit> {
    let (n, p) = (x.rows(), x.cols());
    if y.len() != n {
        return Err(Error::LengthMismatch { left: n, right: y.len() });
    }
    if terms.len() != p {
        return Err(Error::LengthMismatch { left: p, right: terms.len() });
    }
    if x.iter().chain(y.iter().copied()).any(|v| !v.is_finite()) {
        return Err(Error::NonFinite);
    }

    let mut a = x.clone();
    let mut qty = y.to_vec();
    let mut kept = Vec::new();
    let mut aliased = Vec::new();
    let col_norms: Vec<f64> = (0..p).map(|j| norm(&x.column(j))).collect();
    for j in 0..p {
        let r = kept.len();
        let tail: Vec<f64> = (r..n).map(|i| a[(i, j)]).collect();
        let tail_norm = norm(&tail);
        if r >= n || tail_norm <= ALIAS_TOLERANCE * col_norms[j] || col_norms[j] == 0.0 {
            match aliasing {
                Aliasing::Reject => return Err(Error::RankDeficient { column: terms[j].clone() }),
                Aliasing::Drop => {
                    aliased.push(terms[j].clone());
                    continue;
                }
            }
        }
        // reflector v with H = I - 2 v v^T / (v^T v) mapping tail to -sign * |tail| e1
        let alpha = if tail[0] >= 0.0 { -tail_norm } else { tail_norm };
        let mut v = tail;
        v[0] -= alpha;
        let vtv: f64 = v.iter().map(|e| e * e).sum();
        for k in j..p {
            let dot: f64 = (r..n).map(|i| v[i - r] * a[(i, k)]).sum();
            let f = 2.0 * dot / vtv;
            for i in r..n {
                a[(i, k)] -= f * v[i - r];
            }
        }
        let dot: f64 = (r..n).map(|i| v[i - r] * qty[i]).sum();
        let f = 2.0 * dot / vtv;
        for i in r..n {
            qty[i] -= f * v[i - r];
        }
        kept.push(j);
    }

    let k = kept.len();
    if n <= k {
        return Err(Error::TooFewObservations { needed: k + 1, got: n });
    }
    // R is k x k: row i, column kept[c]
    let rm = |i: usize, c: usize| a[(i, kept[c])];
    let mut beta = vec![0.0; k];
    for i in (0..k).rev() {
        let s: f64 = (i + 1..k).map(|c| rm(i, c) * beta[c]).sum();
        beta[i] = (qty[i] - s) / rm(i, i);
    }
    // R^-1, upper triangular
    let mut rinv = DenseMatrix::zeros(k, k);
    for c in 0..k {
        rinv[(c, c)] = 1.0 / rm(c, c);
        for i in (0..c).rev() {
            let s: f64 = (i + 1..=c).map(|m| rm(i, m) * rinv[(m, c)]).sum();
            rinv[(i, c)] = -s / rm(i, i);
        }
    }

    let fitted_coefs: Vec<(usize, f64)> = kept.iter().copied().zip(beta.iter().copied()).collect();
    let residuals: Vec<f64> = (0..n)
        .map(|i| y[i] - fitted_coefs.iter().map(|&(j, b)| x[(i, j)] * b).sum::<f64>())
        .collect();
    let df = n - k;
    let rss: f64 = residuals.iter().map(|r| r * r).sum();
    let s2 = rss / df as f64;

    let mut estimates = Vec::with_capacity(k);
    let mut std_errors = Vec::with_capacity(k);
    let mut t_values = Vec::with_capacity(k);
    let mut p_values = Vec::with_capacity(k);
    for (c, &b) in beta.iter().enumerate() {
        // diag of R^-1 R^-T
        let v: f64 = (c..k).map(|m| rinv[(c, m)].powi(2)).sum();
        let se = (s2 * v).sqrt();
        let (t, pv) = if se > 0.0 {
            let t = b / se;
            (t, two_sided_p(t, df as f64))
        } else if b == 0.0 {
            (0.0, 1.0)
        } else {
            (b.signum() * f64::INFINITY, 0.0)
        };
        estimates.push(b);
        std_errors.push(se);
        t_values.push(t);
        p_values.push(pv);
    }
    Ok(OlsFit {
        terms: kept.iter().map(|&j| terms[j].clone()).collect(),
        estimates,
        std_errors,
        t_values,
        p_values,
        df_residual: df,
        residual_std_error: s2.sqrt(),
        residuals,
        aliased,
    })
}

fn norm(v: &[f64]) -> f64 {
    v.iter().map(|e| e * e).sum::<f64>().sqrt()
}

/// Student t CDF through the regularised incomplete beta function.
pub fn student_t_cdf(t: f64, df: f64) -> f64 {
    if t.is_infinite() {
        return if t > 0.0 { 1.0 } else { 0.0 };
    }
    let tail = 0.5 * beta_reg(df / 2.0, 0.5, df / (df + t * t));
    if t >= 0.0 { 1.0 - tail } else { tail }
}

/// `P(|T| >= |t|)` for `T ~ t(df)`.
pub fn two_sided_p(t: f64, df: f64) -> f64 {
    if t.is_infinite() {
        return 0.0;
    }
    beta_reg(df / 2.0, 0.5, df / (df + t * t)).clamp(0.0, 1.0)
}

#[derive(Debug, Clone, Serialize)]
pub struct TermSignificance {
    pub term: String,
    pub estimate: f64,
    pub se: f64,
    pub t: f64,
    pub p: f64,
    pub significant: bool,
}

/// Flags each term with `p < level`.
pub fn significance_report(fit: &OlsFit, level: f64) -> Vec<TermSignificance> {
    (0..fit.terms.len())
        .map(|i| TermSignificance {
            term: fit.terms[i].clone(),
            estimate: fit.estimates[i],
            se: fit.std_errors[i],
            t: fit.t_values[i],
            p: fit.p_values[i],
            significant: fit.p_values[i] < level,
        })
        .collect()
}
