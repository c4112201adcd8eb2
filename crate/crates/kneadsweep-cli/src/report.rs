//! Output formatting: equilibrium reports, ratio tables, map samples.

use kneadsweep::models::{EquilibriumReport, ModelSpec};
use serde_json::json;

/// |sigma| below this flags the spectrum as neutral in the report.
const NEUTRAL_TOL: f64 = 1e-6;

fn opt(v: Option<f64>) -> String {
    match v {
        Some(x) => format!("{x:.6}"),
        None => "n/a".into(),
    }
}

fn neutral_flags(r: &EquilibriumReport) -> Vec<&'static str> {
    let mut flags = Vec::new();
    if matches!(r.sigma1, Some(s) if s.abs() < NEUTRAL_TOL) {
        flags.push("NSF");
    }
    if matches!(r.sigma2, Some(s) if s.abs() < NEUTRAL_TOL) {
        flags.push("NDSF");
    }
    flags
}

pub fn equilibria_text(name: &str, m: &ModelSpec, reports: &[EquilibriumReport]) -> String {
    let mut s = format!("model {name}  a={}  b={}\n", m.a, m.b);
    for r in reports {
        let [x, y, z] = r.location;
        s.push_str(&format!("\nequilibrium ({x}, {y}, {z})\n"));
        let eigs: Vec<String> = r
            .eigenvalues
            .iter()
            .map(|e| format!("{:.6} {} {:.6}i", e.re, if e.im < 0.0 { "-" } else { "+" }, e.im.abs()))
            .collect();
        s.push_str(&format!("  eigenvalues  {}\n", eigs.join(", ")));
        s.push_str(&format!("  class        {:?}\n", r.topo_class));
        s.push_str(&format!(
            "  lambda={}  rho={}  omega={}\n",
            opt(r.lambda),
            opt(r.rho),
            opt(r.omega)
        ));
        s.push_str(&format!(
            "  nu={}  sigma1={}  sigma2={}\n",
            opt(r.nu),
            opt(r.sigma1),
            opt(r.sigma2)
        ));
        let flags = neutral_flags(r);
        if !flags.is_empty() {
            s.push_str(&format!("  neutral      {}\n", flags.join(" ")));
        }
    }
    s
}

pub fn equilibria_json(name: &str, m: &ModelSpec, reports: &[EquilibriumReport]) -> String {
    let eq: Vec<_> = reports
        .iter()
        .map(|r| {
            let eigs: Vec<[f64; 2]> = r.eigenvalues.iter().map(|e| [e.re, e.im]).collect();
            let flags = neutral_flags(r);
            json!({
                "location": r.location,
                "eigenvalues": eigs,
                "class": format!("{:?}", r.topo_class),
                "lambda": r.lambda,
                "rho": r.rho,
                "omega": r.omega,
                "nu": r.nu,
                "sigma1": r.sigma1,
                "sigma2": r.sigma2,
                "nsf": flags.contains(&"NSF"),
                "ndsf": flags.contains(&"NDSF"),
            })
        })
        .collect();
    let doc = json!({
        "model": name,
        "a": m.a,
        "b": m.b,
        "equilibria": eq,
    });
    serde_json::to_string_pretty(&doc).expect("json value is always serializable")
}

/// CSV of consecutive interval ratios; the distance column runs one entry
/// short of the width column, so the last row leaves it blank.
pub fn ratios_csv(width_ratios: &[f64], spacing_ratios: &[f64], target: f64) -> String {
    let mut s = String::from("n,width_ratio,distance_ratio,target\n");
    for (k, w) in width_ratios.iter().enumerate() {
        let d = spacing_ratios
            .get(k)
            .map(|d| format!("{d:.12}"))
            .unwrap_or_default();
        s.push_str(&format!("{},{w:.12},{d},{target:.12}\n", k + 1));
    }
    s
}

pub fn map1d_csv(samples: &[(f64, f64)]) -> String {
    let mut s = String::from("z,f\n");
    for (z, f) in samples {
        s.push_str(&format!("{z:.12e},{f:.12e}\n"));
    }
    s
}
