use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use super::Certificate;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ReportFormat {
    #[default]
    Json,
    Text,
}

/// Pretty JSON with sorted keys and without `generated_at`, so two runs with
/// the same options give byte-identical output.
pub fn canonical_json(cert: &Certificate) -> String {
    let mut value = serde_json::to_value(cert).expect("certificate serializes");
    if let Some(obj) = value.as_object_mut() {
        obj.remove("generated_at");
    }
    // serde_json's default map is a BTreeMap, so keys come out sorted
    let mut s = serde_json::to_string_pretty(&value).expect("value serializes");
    s.push('\n');
    s
}

pub fn emit_report(cert: &Certificate, format: ReportFormat) -> String {
    match format {
        ReportFormat::Json => canonical_json(cert),
        ReportFormat::Text => text_report(cert),
    }
}

fn text_report(cert: &Certificate) -> String {
    let mut s = String::new();
    let c = &cert.contradiction;
    let _ = writeln!(s, "Padovan numbers that are concatenations of three repdigits");
    let _ = writeln!(s, "certificate version {}", cert.version);
    let _ = writeln!(s);
    let _ = writeln!(s, "solutions with n <= {}: {}", c.search_ceiling, cert.solutions.len());
    for sol in &cert.solutions {
        let pats: Vec<String> = sol.patterns.iter().map(|p| p.to_string()).collect();
        let _ = writeln!(s, "  P_{:<4} = {:<8} {}", sol.n, sol.value, pats.join(", "));
    }
    let b = &cert.binet_checks;
    let _ = writeln!(s);
    let _ = writeln!(
        s,
        "Binet error checked on {}..={}: failures {:?}",
        b.n_min, b.n_max, b.binet_error_failures
    );
    let _ = writeln!(s, "growth bracket failures: {:?}", b.growth_bracket_failures);
    let bc = &cert.bound_chain;
    let held = bc.checks.iter().filter(|k| k.holds).count();
    let _ = writeln!(
        s,
        "bound chain ({:?}): {held}/{} checks hold, X0 = {}",
        bc.mode,
        bc.checks.len(),
        bc.x0
    );
    let _ = writeln!(s);
    for r in &cert.reduction_rounds {
        let sign = r.lambda3_sign.map(|x| format!(" sign {x:?}")).unwrap_or_default();
        let used: Vec<String> = r
            .candidates
            .iter()
            .filter(|u| u.combos_reduced > 0)
            .map(|u| format!("q{}", u.index))
            .collect();
        let _ = writeln!(
            s,
            "round {}{sign}: {} combos, bound {}, convergents {}, fallbacks {}",
            r.round,
            r.combos,
            r.max_y,
            used.join(" "),
            r.fallbacks
        );
    }
    let _ = writeln!(s);
    let _ = writeln!(
        s,
        "reduced bound n <= {}, hypothesis n >= {}, search ceiling {}",
        c.reduced_bound, c.hypothesis_n_at_least, c.search_ceiling
    );
    let _ = writeln!(s, "proof complete: {}", c.proof_complete);
    s
}
