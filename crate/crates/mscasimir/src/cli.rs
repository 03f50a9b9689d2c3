//! Command implementations behind the `mscasimir` binary. Each returns a JSON envelope and an exit code.

use std::collections::BTreeMap;
use std::path::PathBuf;

use nalgebra::DMatrix;
use serde::Serialize;
use serde_json::{json, Value};

use crate::cartan::{catalog, find_spec, CartanLabel, CartanSubsetSpec, ChiPoint, PairKind};
use crate::coords;
use crate::csmodels;
use crate::error::{Error, Result};
use crate::json;
use crate::liealg::Signature;
use crate::radial::{self, k_l_matrices, radial_casimir, Bimodule, RootSpaces};
use crate::rootspace::DecompositionOptions;
use crate::scalar::{c, C64};
use crate::verify;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    Json,
    Text,
}

#[derive(Clone, Debug, Serialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum BimoduleSpec {
    Scalar { alpha: f64, beta: f64 },
    Trivial,
    Spinor { alpha: f64, beta: f64 },
    Custom { path: PathBuf },
}

/// Resolved settings of one run; embedded in every report.
#[derive(Clone, Debug, Serialize)]
pub struct RunConfig {
    pub p: usize,
    pub q: usize,
    /// `None` for the four-point pair, `Some(p)` for the defect pair of dimension p.
    pub defect: Option<usize>,
    pub cartan: Option<String>,
    pub bimodule: Option<BimoduleSpec>,
    pub seed: u64,
    /// Recognized keys: `cluster_gap`, `verify`.
    pub tolerances: BTreeMap<String, f64>,
    pub format: OutputFormat,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig { p: 3, q: 0, defect: None, cartan: None, bimodule: None, seed: 0, tolerances: BTreeMap::new(), format: OutputFormat::Json }
    }
}

impl RunConfig {
    pub fn signature(&self) -> Result<Signature> {
        Signature::new(self.p, self.q)
    }

    pub fn pair(&self) -> PairKind {
        match self.defect {
            Some(p_defect) => PairKind::Defect { p_defect },
            None => PairKind::FourPoint,
        }
    }

    pub fn options(&self) -> Result<DecompositionOptions> {
        let mut opts = DecompositionOptions { seed: self.seed, ..Default::default() };
        for (k, v) in &self.tolerances {
            match k.as_str() {
                "cluster_gap" => opts.cluster_gap = *v,
                "verify" => opts.verify_tol = *v,
                other => return Err(Error::Validation(format!("unknown tolerance key {other:?} (expected cluster_gap or verify)"))),
            }
        }
        Ok(opts)
    }

    /// The selected Cartan subset, defaulting to the fundamental one of the pair.
    pub fn spec(&self) -> Result<CartanSubsetSpec> {
        let sig = self.signature()?;
        let label = match &self.cartan {
            Some(s) => CartanLabel::parse(s).ok_or_else(|| Error::Validation(format!("unknown Cartan label {s:?}")))?,
            None => match (self.defect, sig.q) {
                (Some(_), _) => CartanLabel::DefectFund,
                (None, 0) => CartanLabel::Euclid,
                (None, _) => CartanLabel::Empty,
            },
        };
        find_spec(sig, self.pair(), label)
    }

    fn to_json(&self) -> Value {
        serde_json::to_value(self).expect("config serializes")
    }
}

/// Output text plus process exit code.
pub struct Outcome {
    pub output: String,
    pub code: i32,
}

fn render(cfg: &RunConfig, v: &Value) -> String {
    match cfg.format {
        OutputFormat::Json => json::to_string(v) + "\n",
        OutputFormat::Text => {
            let mut out = String::new();
            flatten("", v, &mut out);
            out
        }
    }
}

fn flatten(prefix: &str, v: &Value, out: &mut String) {
    match v {
        Value::Object(m) => {
            for (k, x) in m {
                let p = if prefix.is_empty() { k.clone() } else { format!("{prefix}.{k}") };
                flatten(&p, x, out);
            }
        }
        Value::Array(a) if a.iter().any(|x| x.is_object() || x.is_array()) => {
            for (i, x) in a.iter().enumerate() {
                flatten(&format!("{prefix}[{i}]"), x, out);
            }
        }
        Value::Number(n) if n.is_f64() => out.push_str(&format!("{prefix} = {}\n", json::fmt_f64(n.as_f64().unwrap_or(f64::NAN)))),
        other => out.push_str(&format!("{prefix} = {other}\n")),
    }
}

/// Runs a command body, mapping errors to `{"error": …}` with exit 2 or 3.
pub fn execute(kind: &str, cfg: &RunConfig, body: impl FnOnce() -> Result<(Value, i32)>) -> Outcome {
    match body() {
        Ok((payload, code)) => Outcome { output: render(cfg, &json::envelope(kind, cfg.to_json(), payload)), code },
        Err(e) => {
            let payload = json!({"error": e.to_string()});
            Outcome { output: render(cfg, &json::envelope(kind, cfg.to_json(), payload)), code: e.exit_code() }
        }
    }
}

fn rootdata_payload(spec: &CartanSubsetSpec, opts: DecompositionOptions) -> Result<Value> {
    let (alg, dec) = spec.decompose_with(opts)?;
    let info = dec.classify();
    let roots: Vec<Value> = dec
        .roots
        .iter()
        .map(|r| {
            json!({
                "coords": r.coords.as_ref().map(|v| v.iter().map(json::rational).collect::<Vec<_>>()),
                "functional": json::c64_vec(&r.functional),
                "multiplicity": r.multiplicity,
                "positive": r.positive,
                "basis": r.basis.iter().map(|e| json::element_c64(&alg, e, 1e-12)).collect::<Vec<_>>(),
            })
        })
        .collect();
    Ok(json!({
        "spec": spec.to_json(),
        "root_system": info,
        "roots": roots,
        "zero_space": {
            "dim": dec.zero_dim(),
            "cprime_dim": dec.zero_odd.len(),
            "mprime_dim": dec.zero_even.len(),
            "mprime_basis": dec.zero_even.iter().map(|e| json::element_c64(&alg, e, 1e-12)).collect::<Vec<_>>(),
        },
        "gram": json::cmat(&dec.gram),
    }))
}

pub fn cmd_rootdata(cfg: &RunConfig) -> Outcome {
    execute("rootdata", cfg, || {
        let spec = cfg.spec()?;
        Ok((rootdata_payload(&spec, cfg.options()?)?, 0))
    })
}

/// The catalog for the pair, with Ad(t) = εφ residuals for the operative and stated ε tables.
pub fn cmd_cartan(cfg: &RunConfig) -> Outcome {
    execute("cartan", cfg, || {
        let sig = cfg.signature()?;
        let specs = match &cfg.cartan {
            Some(_) => vec![cfg.spec()?],
            None => catalog(sig, cfg.pair())?,
        };
        let mut out = Vec::new();
        for spec in &specs {
            let (_, dec) = spec.decompose_with(cfg.options()?)?;
            let operative = radial::epsilon_check(spec, &spec.epsilon, cfg.seed)?;
            let stated = match &spec.epsilon_stated {
                Some(t) => Some(radial::epsilon_check(spec, t, cfg.seed)?),
                None => None,
            };
            out.push(json!({
                "spec": spec.to_json(),
                "root_system": dec.classify(),
                "epsilon_check": operative,
                "epsilon_stated_check": stated,
            }));
        }
        Ok((json!({"count": specs.len(), "specs": out}), 0))
    })
}

fn load_custom(path: &PathBuf) -> Result<(usize, BTreeMap<String, DMatrix<C64>>, BTreeMap<String, DMatrix<C64>>)> {
    let text = std::fs::read_to_string(path)?;
    let v: Value = serde_json::from_str(&text)?;
    let dim = v.get("dim").and_then(Value::as_u64).ok_or_else(|| Error::Validation("custom bimodule needs an integer \"dim\"".into()))? as usize;
    let side = |key: &str| -> Result<BTreeMap<String, DMatrix<C64>>> {
        let mut m = BTreeMap::new();
        if let Some(obj) = v.get(key) {
            let obj = obj.as_object().ok_or_else(|| Error::Validation(format!("\"{key}\" must map generator labels to matrices")))?;
            for (k, x) in obj {
                let mat = json::parse_cmat(x).ok_or_else(|| Error::Validation(format!("{key}.{k}: not a matrix")))?;
                m.insert(k.clone(), mat);
            }
        }
        Ok(m)
    };
    Ok((dim, side("left")?, side("right")?))
}

pub fn cmd_radial(cfg: &RunConfig) -> Outcome {
    execute("radial", cfg, || {
        let bm = cfg.bimodule.clone().unwrap_or(BimoduleSpec::Trivial);
        let spec = match bm {
            BimoduleSpec::Spinor { .. } => {
                if (cfg.p, cfg.q, cfg.defect) != (3, 0, None) {
                    return Err(Error::Validation("the spinor bimodule is defined for p = 3, q = 0".into()));
                }
                csmodels::spinor_spec()?
            }
            _ => cfg.spec()?,
        };
        let (alg, dec) = spec.decompose_with(cfg.options()?)?;
        let rs = RootSpaces::<C64>::from_decomposition(&spec, alg, &dec)?;
        let w = match &bm {
            BimoduleSpec::Scalar { alpha, beta } => Bimodule::scalar(&rs.alg, c(*alpha, 0.0), c(*beta, 0.0)),
            BimoduleSpec::Trivial => Bimodule::trivial(&rs.alg),
            BimoduleSpec::Spinor { alpha, beta } => Bimodule::spinor(&rs.alg, c(*alpha, 0.0), c(*beta, 0.0))?,
            BimoduleSpec::Custom { path } => {
                let (dim, l, r) = load_custom(path)?;
                Bimodule::custom(&rs.alg, dim, &l, &r)?
            }
        };
        let axioms = w.axiom_residual(&rs.alg, &rs.sigma);
        if axioms > 1e-9 {
            return Err(Error::Validation(format!("bimodule axioms fail with residual {axioms:e}")));
        }
        let op = radial_casimir(&rs, &w)?;
        let tables: Vec<Value> = k_l_matrices(&rs, &w)?
            .iter()
            .map(|(root, pm)| {
                json!({
                    "root": root.iter().map(json::rational).collect::<Vec<_>>(),
                    "k": json::cmat(&pm.k),
                    "l": json::cmat(&pm.l),
                })
            })
            .collect();
        Ok((json!({"spec": spec.to_json(), "operator": op.to_json(), "potentials": tables, "bimodule_axiom_residual": json::f(axioms)}), 0))
    })
}

/// Runs the named suites (all when empty); exit 2 when any case fails.
pub fn cmd_verify(cfg: &RunConfig, suites: &[String]) -> Outcome {
    execute("verify", cfg, || {
        let names: Vec<String> = if suites.is_empty() { verify::SUITES.iter().map(|s| s.to_string()).collect() } else { suites.to_vec() };
        let mut reports = Vec::new();
        let mut passed = true;
        for s in &names {
            let r = verify::run(s, cfg.seed)?;
            passed &= r.passed();
            reports.push(r.to_json());
        }
        Ok((json!({"passed": passed, "suites": reports}), if passed { 0 } else { 2 }))
    })
}

/// Parses "re,im" or "re".
pub fn parse_complex(s: &str) -> Result<C64> {
    let parts: Vec<&str> = s.split(',').map(str::trim).collect();
    let num = |x: &str| x.parse::<f64>().map_err(|_| Error::Validation(format!("not a number: {x:?}")));
    match parts.as_slice() {
        [re] => Ok(c(num(re)?, 0.0)),
        [re, im] => Ok(c(num(re)?, num(im)?)),
        _ => Err(Error::Validation(format!("expected re,im but got {s:?}"))),
    }
}

pub fn cmd_coords_classify(cfg: &RunConfig, chi1: C64, chi2: C64) -> Outcome {
    execute("coords.classify", cfg, || {
        let pt = ChiPoint::new(chi1, chi2);
        let rep = coords::classify_causal(&pt)?;
        let red = coords::weyl_reduce(&pt)?;
        let word: Vec<String> = red.word.iter().map(|g| g.to_string()).collect();
        Ok((
            json!({
                "region": rep.region.to_string(),
                "causal": rep.causal,
                "u": json::c64(rep.u),
                "v": json::c64(rep.v),
                "z": json::c64(rep.z),
                "zbar": json::c64(rep.zbar),
                "representative": json::c64_vec(&rep.representative.chi),
                "reduction_word": word,
            }),
            0,
        ))
    })
}

/// Cross-ratios of (0, ∞, g·0, g·∞) from the corner entries and from η-pairings.
pub fn cmd_coords_uv(cfg: &RunConfig, matrix: &PathBuf) -> Outcome {
    execute("coords.uv", cfg, || {
        let text = std::fs::read_to_string(matrix)?;
        let v: Value = serde_json::from_str(&text)?;
        let g = json::parse_cmat(v.get("matrix").unwrap_or(&v)).ok_or_else(|| Error::Validation("expected a square matrix".into()))?;
        let n = g.nrows();
        if g.ncols() != n || n < cfg.q + 5 {
            return Err(Error::Dimension(format!("{}×{} matrix does not fit so(p+1,{}+1) with p ≥ 3", n, g.ncols(), cfg.q)));
        }
        let sig = Signature::new(n - 2 - cfg.q, cfg.q)?;
        let eta = crate::liealg::Algebra::new(sig).eta_matrix::<f64>().map(|x| c(x, 0.0));
        let orth = (g.transpose() * &eta * &g - &eta).iter().fold(0.0f64, |m, z| m.max(z.norm()));
        if orth > 1e-9 {
            return Err(Error::Validation(format!("matrix is not in O(p+1,q+1): residual {orth:e}")));
        }
        let corners = coords::cross_ratios_from_corners(&g)?;
        let pairing = coords::cross_ratios(sig, &coords::configuration(sig, &g), 1e-12)?;
        let agree = (corners.0 - pairing.0).norm().max((corners.1 - pairing.1).norm());
        Ok((
            json!({
                "signature": {"p": sig.p, "q": sig.q},
                "u": json::c64(corners.0),
                "v": json::c64(corners.1),
                "u_pairing": json::c64(pairing.0),
                "v_pairing": json::c64(pairing.1),
                "agreement": json::f(agree),
                "discriminant": json::c64(coords::discriminant(corners.0, corners.1)),
            }),
            0,
        ))
    })
}
