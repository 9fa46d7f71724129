//! Input assembly and the classify / oracle / named-check pipelines.

use std::collections::BTreeSet;
use std::fs;
use std::path::PathBuf;

use num_complex::Complex64;
use thiserror::Error;
use treeshift::classify::{
    generalized_optimal_constant_matrix, optimal_constant_matrix, quasinormal_matrix,
};
use treeshift::corpus;
use treeshift::measures::AtomMap;
use treeshift::oracle::{
    op_norm, vnorm_sq, MatrixOperator, OracleError, Restriction, Tolerances,
};
use treeshift::{
    binary_shift, branch_shift, chain_shift, classify, comb_shift, geometric_path_shift,
    strict_interior_vertices, BranchParams, ChainParams, CombParams, Extended, Family,
    FamilyError, Scalar, ScopeKind, Vertex, WeightedShift,
};

use crate::report::{
    self, classify_doc, extended_string, AgreementDoc, CheckDoc, ClassifierSideDoc, ClassifyDoc,
    OracleDoc, ScopeDoc, VectorEntryDoc, WitnessDumpDoc,
};
use crate::spec_format::{parse_number, parse_tree_spec, ParseError};

/// Test vectors sampled per quasinormality check.
const N_RANDOM: usize = 32;
/// Test vectors sampled per transported check (each costs a grid pass).
const N_RANDOM_GENERALIZED: usize = 8;
/// Draws behind a named check.
const CHECK_INSTANCES: u64 = 10;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error("cannot read `{path}`: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
    #[error(transparent)]
    Family(#[from] FamilyError),
    #[error(transparent)]
    Oracle(#[from] OracleError),
}

impl CliError {
    /// 2 = the input itself is unusable (syntax or constraint violations);
    /// 3 = the computation failed (dimension cap, eigensolver).
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) | CliError::Parse(_) | CliError::Io { .. } | CliError::Family(_) => 2,
            CliError::Oracle(_) => 3,
        }
    }
}

/// A fully-resolved generator request.
pub struct FamilyRequest {
    pub family: Family,
    pub depth: usize,
    pub c: Option<Scalar>,
    pub q: Option<Scalar>,
}

pub enum Input {
    File(PathBuf),
    Family(FamilyRequest),
}

fn usage(msg: impl Into<String>) -> CliError {
    CliError::Usage(msg.into())
}

/// Builds the shift plus a one-line echo of where it came from.
pub fn build_shift(input: &Input) -> Result<(WeightedShift, String), CliError> {
    match input {
        Input::File(path) => {
            let text = fs::read_to_string(path).map_err(|source| CliError::Io {
                path: path.display().to_string(),
                source,
            })?;
            Ok((parse_tree_spec(&text)?, format!("file:{}", path.display())))
        }
        Input::Family(req) => family_shift(req),
    }
}

fn family_shift(req: &FamilyRequest) -> Result<(WeightedShift, String), CliError> {
    let d = req.depth;
    let reject = |flag: &str, given: bool| -> Result<(), CliError> {
        if given {
            Err(usage(format!("--{flag} does not apply to family {}", req.family)))
        } else {
            Ok(())
        }
    };
    let min_depth = |min: usize| -> Result<(), CliError> {
        if d < min {
            Err(usage(format!("family {} needs --depth >= {min}", req.family)))
        } else {
            Ok(())
        }
    };
    match req.family {
        Family::Binary => {
            reject("c", req.c.is_some())?;
            reject("q", req.q.is_some())?;
            min_depth(2)?;
            Ok((binary_shift(d), format!("family:eunb depth={d}")))
        }
        Family::Comb => {
            min_depth(2)?;
            let c = req.c.clone().unwrap_or_else(|| Scalar::int(4));
            let (params, echo) = match &req.q {
                Some(q) => {
                    let params = CombParams {
                        chain: ChainParams::constant(d, &c)?,
                        q_sq: vec![q.clone() * q.clone(); d],
                        unbounded: false,
                    };
                    (params, format!("family:fig1 depth={d} c={c} q={q}"))
                }
                None if c == Scalar::int(4) => {
                    (CombParams::growing(d)?, format!("family:fig1 depth={d} c=4"))
                }
                None => {
                    // Tooth weight q² = 1/(c−1) makes the root ratio
                    // (1 + q²)/q² equal the chain ratio c exactly.
                    if c <= Scalar::one() {
                        return Err(usage(format!(
                            "family fig1 needs --c > 1 when --q is not given, got {c}"
                        )));
                    }
                    let q_sq = Scalar::one() / (c.clone() - Scalar::one());
                    let params = CombParams {
                        chain: ChainParams::constant(d, &c)?,
                        q_sq: vec![q_sq; d],
                        unbounded: false,
                    };
                    (params, format!("family:fig1 depth={d} c={c}"))
                }
            };
            Ok((comb_shift(&params, d)?, echo))
        }
        Family::Chain => {
            reject("q", req.q.is_some())?;
            min_depth(2)?;
            let c = req.c.clone().unwrap_or_else(|| Scalar::int(4));
            let params = ChainParams::constant(d, &c)?;
            Ok((chain_shift(&params, d)?, format!("family:fig2 depth={d} c={c}")))
        }
        Family::Branch => {
            min_depth(2)?;
            let c = req.c.clone().unwrap_or_else(|| Scalar::int(2));
            let g = req.q.clone().unwrap_or_else(Scalar::one);
            let params = BranchParams::constant(d, &c, &(g.clone() * g.clone()))?;
            Ok((
                branch_shift(&params, d)?,
                format!("family:fig3 depth={d} c={c} q={g}"),
            ))
        }
        Family::Path => {
            reject("c", req.c.is_some())?;
            min_depth(1)?;
            let q = req.q.clone().unwrap_or_else(Scalar::one);
            Ok((
                geometric_path_shift(&q, d)?,
                format!("family:path depth={d} q={q}"),
            ))
        }
    }
}

/// `id` or `q:VALUE` into a spectral map.
pub fn parse_map(token: &str) -> Result<AtomMap, CliError> {
    if token == "id" {
        return Ok(AtomMap::identity());
    }
    if let Some(v) = token.strip_prefix("q:") {
        let q = parse_number(v)
            .ok_or_else(|| usage(format!("malformed number `{v}` in map `{token}`")))?;
        return AtomMap::sqrt_scale(q).map_err(|e| usage(e.to_string()));
    }
    Err(usage(format!("bad map `{token}` (expected `id` or `q:VALUE`)")))
}

pub fn classify_report(input: &Input, kind: ScopeKind) -> Result<ClassifyDoc, CliError> {
    let (s, echo) = build_shift(input)?;
    let r = classify(&s, kind);
    Ok(classify_doc(echo, &s, &r))
}

pub struct OracleOutcome {
    pub doc: OracleDoc,
    pub disagreement: bool,
}

/// Oracle-vs-classifier comparison scope: the oracle only sees the literal
/// finite tree, so its "interior" is the strict one (children and
/// grandchildren present) and the classifier side reads the same raw norms.
fn oracle_scope(s: &WeightedShift, kind: ScopeKind) -> BTreeSet<Vertex> {
    match kind {
        ScopeKind::Full => s.tree().vertices().collect(),
        ScopeKind::Interior => strict_interior_vertices(s),
    }
}

fn extended_agree(oracle: &Extended, classifier: &Extended) -> bool {
    match (oracle.as_finite(), classifier.as_finite()) {
        (None, None) => true,
        (Some(a), Some(b)) => {
            let (a, b) = (a.to_f64(), b.to_f64());
            (a - b).abs() <= 1e-6 * b.abs().max(1.0)
        }
        _ => false,
    }
}

pub fn oracle_report(
    input: &Input,
    kind: ScopeKind,
    maps: Option<(String, String)>,
    seed: u64,
) -> Result<OracleOutcome, CliError> {
    let (s, echo) = build_shift(input)?;
    let op = MatrixOperator::from_shift(&s, Tolerances::default())?;
    let scope = oracle_scope(&s, kind);
    let restrict = match kind {
        ScopeKind::Full => None,
        ScopeKind::Interior => Some(op.restriction(scope.iter().map(|v| v.index()))),
    };

    let q = op.check_quasinormal(restrict.as_ref(), N_RANDOM, seed);
    let oc = op.optimal_constant(restrict.as_ref())?;
    let (pv_qn, pv_qn_witness) = quasinormal_matrix(&s, &scope);
    let pv_c = optimal_constant_matrix(&s, &scope);

    let qn_agree = q.verdict == Some(pv_qn);
    let c_agree = extended_agree(&oc.value, &pv_c.value);

    let intertwiner = if oc.value.is_infinite() {
        None
    } else {
        Some(op.build_intertwiner(restrict.as_ref())?)
    };

    let mut gen_doc = None;
    let mut gen_agree = None;
    if let Some((phi_token, psi_token)) = &maps {
        let phi = parse_map(phi_token)?;
        let psi = parse_map(psi_token)?;
        let g = op.check_generalized(&phi, &psi, restrict.as_ref(), N_RANDOM_GENERALIZED, seed)?;
        let gc = op.generalized_optimal_constant(&phi, &psi, restrict.as_ref())?;
        let pv_gc = generalized_optimal_constant_matrix(&s, &phi, &psi, &scope);
        let faces_agree =
            g.conditions_ok[0] == g.conditions_ok[1] && g.conditions_ok[1] == g.conditions_ok[2];
        gen_agree = Some(faces_agree && extended_agree(&gc.value, &pv_gc.value));
        gen_doc = Some(report::generalized_doc(
            phi_token.clone(),
            psi_token.clone(),
            &g,
            &gc,
            &pv_gc.value,
        ));
    }

    let all = qn_agree && c_agree && gen_agree.unwrap_or(true);
    let witness_dump = if all {
        None
    } else {
        let mut reasons = Vec::new();
        if !qn_agree {
            reasons.push(format!(
                "quasinormality: oracle says {}, per-vertex criteria say {}",
                report_verdict(q.verdict),
                pv_qn
            ));
        }
        if !c_agree {
            reasons.push(format!(
                "optimal constant: oracle {} vs per-vertex {}",
                extended_string(&oc.value),
                extended_string(&pv_c.value)
            ));
        }
        if gen_agree == Some(false) {
            reasons.push("transported conditions disagree across faces or constants".to_string());
        }
        let prefer = pv_qn_witness.map(|(u, _)| u).or(pv_c.witness);
        Some(witness_dump(&s, &op, &scope, prefer, reasons.join("; ")))
    };

    let doc = OracleDoc {
        input: echo,
        scope: ScopeDoc {
            kind: report::scope_kind_string(kind),
            vertices: scope.iter().map(|&v| s.tree().label(v).to_string()).collect(),
        },
        dim: op.dim,
        fragile: op.fragile,
        op_norm: op.op_norm(),
        polar_factor_residual: op.polar_residual(),
        quasinormal: report::quasinormal_doc(&q),
        c_opt: extended_string(&oc.value),
        c_opt_witness_atom: oc.witness_atom,
        classifier: ClassifierSideDoc {
            quasinormal: pv_qn,
            c_opt: extended_string(&pv_c.value),
            fragile: classify::fragile(&s),
        },
        intertwiner: intertwiner.as_ref().map(report::intertwiner_doc),
        generalized: gen_doc,
        agreement: AgreementDoc {
            quasinormal: qn_agree,
            c_opt: c_agree,
            generalized: gen_agree,
            all,
        },
        witness_dump,
    };
    Ok(OracleOutcome {
        doc,
        disagreement: !all,
    })
}

fn report_verdict(v: Option<bool>) -> String {
    match v {
        Some(b) => b.to_string(),
        None => "contradictory".to_string(),
    }
}

/// The minimized disagreement witness: a single basis vector — the
/// classifier's witness vertex when it has one, otherwise the in-scope basis
/// vector with the largest per-atom gap between modulus and image mass —
/// together with both measures on the atom grid.
fn witness_dump(
    s: &WeightedShift,
    op: &MatrixOperator,
    scope: &BTreeSet<Vertex>,
    prefer: Option<Vertex>,
    reason: String,
) -> WitnessDumpDoc {
    let basis = |v: Vertex| -> Vec<Complex64> {
        let mut f = vec![Complex64::new(0.0, 0.0); op.dim];
        f[v.index()] = Complex64::new(1.0, 0.0);
        f
    };
    let discrepancy = |v: Vertex| -> f64 {
        let ma = op.measure_pair(&basis(v));
        ma.modulus_mass
            .iter()
            .zip(&ma.image_mass)
            .map(|(m, i)| (m - i).abs())
            .fold(0.0, f64::max)
    };
    let pick = prefer
        .or_else(|| {
            scope
                .iter()
                .copied()
                .max_by(|&u, &v| discrepancy(u).total_cmp(&discrepancy(v)))
        })
        .unwrap_or_else(|| s.tree().root());
    let ma = op.measure_pair(&basis(pick));
    WitnessDumpDoc {
        reason,
        vector: vec![VectorEntryDoc {
            vertex: s.tree().label(pick).to_string(),
            re: 1.0,
            im: 0.0,
        }],
        atom_norm_sq: ma.locations_sq,
        modulus_mass: ma.modulus_mass,
        image_mass: ma.image_mass,
    }
}

/// Named built-in verifications. `izonp` confirms on sampled instances that
/// a map isometric on a vector need not be a contraction: every draw sends
/// the first basis vector to a unit vector yet has operator norm
/// strictly above 1.
pub fn named_check(name: &str, seed: u64) -> Result<CheckDoc, CliError> {
    match name {
        "izonp" => {
            let mut min_norm = f64::INFINITY;
            let mut max_defect: f64 = 0.0;
            for i in 0..CHECK_INSTANCES {
                let t = corpus::isometric_but_expanding(seed + i);
                let defect = (vnorm_sq(&t.column(0)).sqrt() - 1.0).abs();
                max_defect = max_defect.max(defect);
                min_norm = min_norm.min(op_norm(&t).map_err(OracleError::from)?);
            }
            Ok(CheckDoc {
                check: "izonp".to_string(),
                instances: CHECK_INSTANCES as usize,
                holds: max_defect <= 1e-9 && min_norm > 1.0 + 1e-6,
                min_operator_norm: min_norm,
                max_isometry_defect: max_defect,
            })
        }
        other => Err(usage(format!("unknown check `{other}` (available: izonp)"))),
    }
}

/// Restriction helper shared with tests: the strict-interior coordinates.
pub fn strict_restriction(s: &WeightedShift, op: &MatrixOperator) -> Restriction {
    op.restriction(strict_interior_vertices(s).iter().map(|v| v.index()))
}
