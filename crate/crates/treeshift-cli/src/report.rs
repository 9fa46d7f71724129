//! Report documents: JSON and text renderings of classifier and oracle
//! output. Struct field order is fixed and every map is ordered, so
//! identical inputs and seeds produce byte-identical reports.

use serde::Serialize;
use treeshift::classify::{ClassificationReport, ScopeKind, Trivalent};
use treeshift::oracle::{GeneralizedOracle, Intertwiner, OracleConstant, QuasinormalOracle};
use treeshift::{Extended, Scalar, Vertex, WeightedShift};

/// `p/q` for exact values, 17 significant digits for floats.
pub fn scalar_string(s: &Scalar) -> String {
    if s.is_exact() {
        s.to_string()
    } else {
        s.to_decimal_string()
    }
}

/// Finite values as [`scalar_string`], infinity as `"inf"`.
pub fn extended_string(x: &Extended) -> String {
    match x.as_finite() {
        Some(s) => scalar_string(s),
        None => "inf".to_string(),
    }
}

fn trivalent_json(t: Trivalent) -> serde_json::Value {
    match t {
        Trivalent::True => serde_json::Value::Bool(true),
        Trivalent::False => serde_json::Value::Bool(false),
        Trivalent::Unknown => serde_json::Value::String("unknown".to_string()),
    }
}

fn label(s: &WeightedShift, v: Vertex) -> String {
    s.tree().label(v).to_string()
}

#[derive(Serialize)]
pub struct ScopeDoc {
    pub kind: String,
    pub vertices: Vec<String>,
}

#[derive(Serialize)]
pub struct WitnessDoc {
    /// Violating `(parent, child)` pair when not quasinormal.
    pub quasinormal: Option<[String; 2]>,
    /// Vertex attaining the optimal constant.
    pub c_opt: Option<String>,
    /// Vertex whose modulus measure escapes the image measure.
    pub abc3: Option<String>,
    /// Vertex violating (or leaving undecided) the hyponormality bound.
    pub hyponormal: Option<String>,
}

#[derive(Serialize)]
pub struct ClassifyDoc {
    pub input: String,
    pub scope: ScopeDoc,
    pub quasinormal: bool,
    pub weakly_quasinormal: bool,
    pub c_opt: String,
    pub abc3: bool,
    pub hyponormal: serde_json::Value,
    pub witnesses: WitnessDoc,
    pub boundary_vertices: Vec<String>,
    pub zero_on_scope: bool,
    pub norm_bound: String,
    pub unbounded_family: bool,
    pub fragile: bool,
}

pub fn classify_doc(input: String, s: &WeightedShift, r: &ClassificationReport) -> ClassifyDoc {
    ClassifyDoc {
        input,
        scope: ScopeDoc {
            kind: scope_kind_string(r.scope_kind),
            vertices: r.scope.iter().map(|&v| label(s, v)).collect(),
        },
        quasinormal: r.quasinormal,
        weakly_quasinormal: r.weakly_quasinormal,
        c_opt: extended_string(&r.optimal_constant),
        abc3: r.modulus_ac,
        hyponormal: trivalent_json(r.hyponormal),
        witnesses: WitnessDoc {
            quasinormal: r
                .quasinormal_witness
                .map(|(u, v)| [label(s, u), label(s, v)]),
            c_opt: r.optimal_constant_witness.map(|v| label(s, v)),
            abc3: r.modulus_ac_witness.map(|v| label(s, v)),
            hyponormal: r.hyponormal_witness.map(|v| label(s, v)),
        },
        boundary_vertices: r.excluded.iter().map(|&v| label(s, v)).collect(),
        zero_on_scope: r.zero_on_scope,
        norm_bound: scalar_string(&r.norm_bound),
        unbounded_family: r.unbounded_family,
        fragile: r.fragile,
    }
}

pub fn scope_kind_string(kind: ScopeKind) -> String {
    match kind {
        ScopeKind::Interior => "interior".to_string(),
        ScopeKind::Full => "full".to_string(),
    }
}

#[derive(Serialize)]
pub struct QuasinormalDoc {
    pub commutation_residual: f64,
    pub commutation_ok: bool,
    pub measure_residual: f64,
    pub measures_equal: bool,
    pub ac_defect: f64,
    pub image_ac_modulus: bool,
    pub verdict: Option<bool>,
}

pub fn quasinormal_doc(q: &QuasinormalOracle) -> QuasinormalDoc {
    QuasinormalDoc {
        commutation_residual: q.commutation_residual,
        commutation_ok: q.commutation_ok,
        measure_residual: q.measure_residual,
        measures_equal: q.measures_equal,
        ac_defect: q.ac_defect,
        image_ac_modulus: q.image_ac_modulus,
        verdict: q.verdict,
    }
}

#[derive(Serialize)]
pub struct IntertwinerDoc {
    pub factor_residual: f64,
    pub atom_commutation_residual: f64,
    pub norm: f64,
    pub range_residual: f64,
    pub polar_residual: f64,
}

pub fn intertwiner_doc(t: &Intertwiner) -> IntertwinerDoc {
    IntertwinerDoc {
        factor_residual: t.factor_residual,
        atom_commutation_residual: t.atom_commutation_residual,
        norm: t.norm,
        range_residual: t.range_residual,
        polar_residual: t.polar_residual,
    }
}

#[derive(Serialize)]
pub struct GeneralizedDoc {
    pub phi: String,
    pub psi: String,
    pub intertwining_residual: f64,
    pub function_commutation_residual: f64,
    pub block_exchange_residual: f64,
    pub conditions_ok: [bool; 3],
    pub measure_residual: f64,
    pub measures_equal: bool,
    pub modulus_ac_image: bool,
    pub density_sup: String,
    pub verdict: Option<bool>,
    pub c_opt: String,
    pub c_opt_classifier: String,
}

pub fn generalized_doc(
    phi: String,
    psi: String,
    g: &GeneralizedOracle,
    c: &OracleConstant,
    classifier_c: &Extended,
) -> GeneralizedDoc {
    GeneralizedDoc {
        phi,
        psi,
        intertwining_residual: g.intertwining_residual,
        function_commutation_residual: g.function_commutation_residual,
        block_exchange_residual: g.block_exchange_residual,
        conditions_ok: g.conditions_ok,
        measure_residual: g.measure_residual,
        measures_equal: g.measures_equal,
        modulus_ac_image: g.modulus_ac_image,
        density_sup: extended_string(&g.density_sup),
        verdict: g.verdict,
        c_opt: extended_string(&c.value),
        c_opt_classifier: extended_string(classifier_c),
    }
}

#[derive(Serialize)]
pub struct ClassifierSideDoc {
    pub quasinormal: bool,
    pub c_opt: String,
    /// Some norm gap sits within 10× the comparison tolerance, so the
    /// per-vertex verdicts could flip under perturbation. A disagreement on a
    /// fragile input is a tolerance artifact, not a bug in either side.
    pub fragile: bool,
}

#[derive(Serialize)]
pub struct AgreementDoc {
    pub quasinormal: bool,
    pub c_opt: bool,
    pub generalized: Option<bool>,
    pub all: bool,
}

#[derive(Serialize)]
pub struct VectorEntryDoc {
    pub vertex: String,
    pub re: f64,
    pub im: f64,
}

#[derive(Serialize)]
pub struct WitnessDumpDoc {
    pub reason: String,
    /// Nonzero amplitudes of the minimized witness vector.
    pub vector: Vec<VectorEntryDoc>,
    /// Squared atom locations of `|A|`, ascending.
    pub atom_norm_sq: Vec<f64>,
    /// Modulus-measure mass of the witness vector per atom.
    pub modulus_mass: Vec<f64>,
    /// Image-measure mass of the witness vector per atom.
    pub image_mass: Vec<f64>,
}

#[derive(Serialize)]
pub struct OracleDoc {
    pub input: String,
    pub scope: ScopeDoc,
    pub dim: usize,
    pub fragile: bool,
    pub op_norm: f64,
    pub polar_factor_residual: f64,
    pub quasinormal: QuasinormalDoc,
    pub c_opt: String,
    pub c_opt_witness_atom: Option<usize>,
    pub classifier: ClassifierSideDoc,
    pub intertwiner: Option<IntertwinerDoc>,
    pub generalized: Option<GeneralizedDoc>,
    pub agreement: AgreementDoc,
    pub witness_dump: Option<WitnessDumpDoc>,
}

#[derive(Serialize)]
pub struct CheckDoc {
    pub check: String,
    pub instances: usize,
    pub holds: bool,
    pub min_operator_norm: f64,
    pub max_isometry_defect: f64,
}

pub fn to_json(doc: &impl Serialize) -> String {
    let mut out = serde_json::to_string_pretty(doc).expect("report serialization");
    out.push('\n');
    out
}

fn verdict_string(v: Option<bool>) -> &'static str {
    match v {
        Some(true) => "true",
        Some(false) => "false",
        None => "contradictory",
    }
}

fn push_witness(line: &mut String, witness: &Option<String>) {
    if let Some(w) = witness {
        line.push_str(&format!(" (witness: {w})"));
    }
}

pub fn classify_text(doc: &ClassifyDoc) -> String {
    let mut out = String::new();
    out.push_str(&format!("input: {}\n", doc.input));
    out.push_str(&format!(
        "scope: {} ({} vertices, {} excluded)\n",
        doc.scope.kind,
        doc.scope.vertices.len(),
        doc.boundary_vertices.len()
    ));
    let mut line = format!("quasinormal: {}", doc.quasinormal);
    if let Some([u, v]) = &doc.witnesses.quasinormal {
        line.push_str(&format!(" (witness: {u} -> {v})"));
    }
    out.push_str(&line);
    out.push('\n');
    out.push_str(&format!("weakly quasinormal: {}\n", doc.weakly_quasinormal));
    let mut line = format!("c_opt: {}", doc.c_opt);
    push_witness(&mut line, &doc.witnesses.c_opt);
    out.push_str(&line);
    out.push('\n');
    let mut line = format!("abc3: {}", doc.abc3);
    push_witness(&mut line, &doc.witnesses.abc3);
    out.push_str(&line);
    out.push('\n');
    let hypo = match &doc.hyponormal {
        serde_json::Value::Bool(b) => b.to_string(),
        other => other.as_str().unwrap_or("unknown").to_string(),
    };
    let mut line = format!("hyponormal: {hypo}");
    push_witness(&mut line, &doc.witnesses.hyponormal);
    out.push_str(&line);
    out.push('\n');
    out.push_str(&format!("zero on scope: {}\n", doc.zero_on_scope));
    out.push_str(&format!("norm bound: {}\n", doc.norm_bound));
    out.push_str(&format!("unbounded family: {}\n", doc.unbounded_family));
    out.push_str(&format!("fragile: {}\n", doc.fragile));
    out
}

pub fn oracle_text(doc: &OracleDoc) -> String {
    let mut out = String::new();
    out.push_str(&format!("input: {}\n", doc.input));
    out.push_str(&format!(
        "scope: {} ({} of {} coordinates)\n",
        doc.scope.kind,
        doc.scope.vertices.len(),
        doc.dim
    ));
    out.push_str(&format!("fragile: {}\n", doc.fragile));
    out.push_str(&format!("op norm: {:.16e}\n", doc.op_norm));
    out.push_str(&format!(
        "polar factor residual: {:.3e}\n",
        doc.polar_factor_residual
    ));
    let q = &doc.quasinormal;
    out.push_str(&format!(
        "quasinormal verdict: {} (commutation {:.3e}, measures {:.3e}, ac defect {:.3e})\n",
        verdict_string(q.verdict),
        q.commutation_residual,
        q.measure_residual,
        q.ac_defect
    ));
    let mut line = format!("c_opt: {}", doc.c_opt);
    if let Some(k) = doc.c_opt_witness_atom {
        line.push_str(&format!(" (atom {k})"));
    }
    out.push_str(&line);
    out.push('\n');
    out.push_str(&format!(
        "classifier: quasinormal {}, c_opt {}, fragile {}\n",
        doc.classifier.quasinormal, doc.classifier.c_opt, doc.classifier.fragile
    ));
    if let Some(t) = &doc.intertwiner {
        out.push_str(&format!(
            "intertwiner: norm {:.16e} (factor {:.3e}, atoms {:.3e}, range {:.3e}, polar {:.3e})\n",
            t.norm, t.factor_residual, t.atom_commutation_residual, t.range_residual, t.polar_residual
        ));
    }
    if let Some(g) = &doc.generalized {
        out.push_str(&format!(
            "generalized ({}, {}): conditions [{}, {}, {}], verdict {}, c_opt {} vs classifier {}\n",
            g.phi,
            g.psi,
            g.conditions_ok[0],
            g.conditions_ok[1],
            g.conditions_ok[2],
            verdict_string(g.verdict),
            g.c_opt,
            g.c_opt_classifier
        ));
    }
    let a = &doc.agreement;
    let mut line = format!("agreement: quasinormal {}, c_opt {}", a.quasinormal, a.c_opt);
    if let Some(g) = a.generalized {
        line.push_str(&format!(", generalized {g}"));
    }
    line.push_str(&format!(" -> all {}", a.all));
    out.push_str(&line);
    out.push('\n');
    if let Some(d) = &doc.witness_dump {
        out.push_str(&format!("witness dump: {}\n", d.reason));
        for e in &d.vector {
            out.push_str(&format!("  f[{}] = {} + {}i\n", e.vertex, e.re, e.im));
        }
        for (k, loc) in d.atom_norm_sq.iter().enumerate() {
            out.push_str(&format!(
                "  atom {k} (|A|^2 = {:.6e}): modulus mass {:.6e}, image mass {:.6e}\n",
                loc, d.modulus_mass[k], d.image_mass[k]
            ));
        }
    }
    out
}

pub fn check_text(doc: &CheckDoc) -> String {
    format!(
        "check: {}\ninstances: {}\nholds: {}\nmin operator norm: {:.16e}\nmax isometry defect: {:.3e}\n",
        doc.check, doc.instances, doc.holds, doc.min_operator_norm, doc.max_isometry_defect
    )
}
