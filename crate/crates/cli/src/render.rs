//! Output formatting shared by the commands.

use grauert::catalog::{Catalog, LabelTemplate, Slot};
use serde_json::Value;

/// Rounds to 12 significant digits so reruns print identical text.
pub fn round12(x: f64) -> f64 {
    if !x.is_finite() || x == 0.0 {
        return x;
    }
    format!("{x:.11e}").parse().unwrap_or(x)
}

pub fn fmt_f64(x: f64) -> String {
    let r = round12(x);
    if r == 0.0 {
        return "0".into();
    }
    if r.is_finite() && (r.abs() < 1e-4 || r.abs() >= 1e12) {
        format!("{r:e}")
    } else {
        r.to_string()
    }
}

/// Rounds every non-integral number in a JSON tree.
pub fn round_json(v: &mut Value) {
    match v {
        Value::Number(n) if n.is_f64() => {
            if let Some(r) = n.as_f64().map(round12).and_then(serde_json::Number::from_f64) {
                *n = r;
            }
        }
        Value::Array(a) => a.iter_mut().for_each(round_json),
        Value::Object(o) => o.values_mut().for_each(round_json),
        _ => {}
    }
}

/// `key,value` rows for a flat JSON object; nested values are written as JSON.
pub fn object_csv(v: &Value) -> String {
    let mut out = String::from("key,value\n");
    if let Value::Object(o) = v {
        for (k, x) in o {
            let cell = match x {
                Value::String(s) => s.clone(),
                other => other.to_string(),
            };
            out.push_str(&format!("{k},{}\n", csv_cell(&cell)));
        }
    }
    out
}

pub fn csv_cell(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

/// The envelope of a table row written with the row's own variables,
/// e.g. `AIII:p={2p},q={2q}` becomes `SU(2p,2q)/S(U2pxU2q)`.
///
/// A parameter-free envelope that heads its own table row is written
/// with that row's heading.
pub fn symbolic_envelope(catalog: &Catalog, t: &LabelTemplate) -> String {
    if t.params.is_empty() {
        if let Some(row) = catalog.paper_table().iter().find(|r| r.templates.len() == 1 && &r.templates[0] == t) {
            return row.space.clone();
        }
    }
    let template = catalog.display_template(t.label);
    let mut out = String::new();
    let mut rest = template;
    while let Some(start) = rest.find('{') {
        out.push_str(&rest[..start]);
        let Some(end) = rest[start..].find('}').map(|e| start + e) else {
            break;
        };
        let slot = &rest[start + 1..end];
        let name = slot.chars().last().unwrap_or('n');
        let coef: u32 = slot[..slot.len() - name.len_utf8()].parse().unwrap_or(1);
        match t.params.iter().find(|(c, _)| *c == name).map(|(_, s)| s) {
            Some(Slot::Lit(v)) => out.push_str(&(coef * v).to_string()),
            Some(Slot::Var { coef: c, var }) => match coef * c {
                1 => out.push(*var),
                k => out.push_str(&format!("{k}{var}")),
            },
            None => out.push(name),
        }
        rest = &rest[end + 1..];
    }
    out.push_str(rest);
    out
}

/// One line per row: right-aligned row number, heading, verdict cell.
pub fn table_text(rows: &[(u32, String, String)]) -> String {
    let width = rows.iter().map(|r| r.1.len()).max().unwrap_or(0).max("space".len());
    let mut out = format!("{:>3}  {:<width$}  verdict\n", "row", "space");
    for (n, space, verdict) in rows {
        out.push_str(&format!("{n:>3}  {space:<width$}  {verdict}\n"));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn twelve_digits() {
        assert_eq!(fmt_f64(0.1 + 0.2), "0.3");
        assert_eq!(fmt_f64(std::f64::consts::PI), "3.14159265359");
        assert_eq!(fmt_f64(1.0 / 3.0 * 1e-7), "3.33333333333e-8");
        assert_eq!(fmt_f64(-2.0), "-2");
    }

    #[test]
    fn envelope_cells() {
        let cat = Catalog::builtin();
        let t = |s: &str| s.parse::<LabelTemplate>().unwrap();
        assert_eq!(symbolic_envelope(cat, &t("AIII:p={2p},q={2q}")), "SU(2p,2q)/S(U2pxU2q)");
        assert_eq!(symbolic_envelope(cat, &t("BDI:p={p},q=2")), "SO0(p,2)/SO(p)xSO(2)");
        assert_eq!(symbolic_envelope(cat, &t("EIII")), "(e6(-14), so(10)+R)");
    }
}
