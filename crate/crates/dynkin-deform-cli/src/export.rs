//! Text and JSON renderings of equation systems, with parsers for both.

use anyhow::{anyhow, bail, Context, Result};
use dynkin_deform::deform::EquationSystem;
use dynkin_deform::poly::{parse_poly, parse_scalar, parse_var, Poly};
use dynkin_deform::PathBasis;
use serde_json::{json, Value};

/// One polynomial per line, grouped by vertex under `#` comment headers.
/// Trivial equations are kept as `0` so line positions match basis order.
pub fn system_text(pb: &PathBasis, sys: &EquationSystem) -> String {
    let mut s = format!(
        "# type {} strategy {} pins {} substituted {} equations {} nontrivial {}\n",
        sys.dynkin,
        sys.strategy,
        sys.pins,
        sys.substituted,
        sys.num_equations(),
        sys.num_nontrivial()
    );
    for v in &sys.vertices {
        s.push_str(&format!("# vertex {} equations {}\n", v.vertex, v.equations.len()));
        for (b, p) in &v.equations {
            s.push_str(&format!("# {}\n{}\n", pb.name(*b), p));
        }
    }
    s
}

/// Polynomials of a text export in file order.
pub fn parse_system_text(text: &str) -> Result<Vec<Poly>> {
    text.lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty() && !l.starts_with('#'))
        .map(|(i, l)| parse_poly(l).with_context(|| format!("line {}", i + 1)))
        .collect()
}

fn poly_json(p: &Poly) -> Value {
    let terms: Vec<Value> = p
        .terms()
        .iter()
        .map(|(m, c)| {
            let vars: Vec<Value> = m.0.iter().map(|(v, e)| json!([v.to_string(), e])).collect();
            json!({ "coefficient": c.to_string(), "monomial": vars })
        })
        .collect();
    json!({ "text": p.to_string(), "terms": terms })
}

fn poly_from_json(v: &Value) -> Result<Poly> {
    let terms = v["terms"].as_array().ok_or_else(|| anyhow!("missing terms"))?;
    let mut out = Poly::zero();
    for t in terms {
        let c = parse_scalar(t["coefficient"].as_str().ok_or_else(|| anyhow!("missing coefficient"))?)?;
        let mut term = Poly::constant(c);
        for f in t["monomial"].as_array().ok_or_else(|| anyhow!("missing monomial"))? {
            let var = parse_var(f[0].as_str().ok_or_else(|| anyhow!("bad variable"))?)?;
            let e = f[1].as_u64().ok_or_else(|| anyhow!("bad exponent"))? as u32;
            term = term.mul(&Poly::var(var).pow(e));
        }
        out = out.add(&term);
    }
    Ok(out)
}

/// JSON document with explicit monomial lists; keys are emitted sorted.
pub fn system_json(pb: &PathBasis, sys: &EquationSystem) -> String {
    let equations: Vec<Value> = sys
        .vertices
        .iter()
        .flat_map(|v| v.equations.iter().map(move |(b, p)| (v.vertex, *b, p)))
        .map(|(vertex, b, p)| json!({ "vertex": vertex, "path": pb.name(b), "polynomial": poly_json(p) }))
        .collect();
    let doc = json!({
        "type": sys.dynkin.to_string(),
        "strategy": sys.strategy.to_string(),
        "pins": sys.pins,
        "substituted": sys.substituted,
        "equations": equations,
    });
    let mut s = serde_json::to_string_pretty(&doc).expect("values serialize");
    s.push('\n');
    s
}

/// Polynomials of a JSON export in file order.
pub fn parse_system_json(text: &str) -> Result<Vec<Poly>> {
    let doc: Value = serde_json::from_str(text)?;
    let Some(eqs) = doc["equations"].as_array() else { bail!("missing equations") };
    eqs.iter().map(|e| poly_from_json(&e["polynomial"])).collect()
}

/// Polynomials of a system in export order.
pub fn system_polys(sys: &EquationSystem) -> Vec<Poly> {
    sys.vertices.iter().flat_map(|v| v.equations.iter().map(|(_, p)| p.clone())).collect()
}
