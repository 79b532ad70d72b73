//! Report rendering: human tables (default), `--json`, `--csv`. Every
//! rational value prints as an exact fraction that re-parses to an equal
//! value, and all row orders are deterministic.

use drinfeld_heights::algebra::{Factorization, LogUnits, Place, Poly, RatFunc};
use drinfeld_heights::drinfeld::ResidueModule;
use drinfeld_heights::equidist::AverageRow;
use drinfeld_heights::heights::{GlobalHeight, TorsionStatus};
use drinfeld_heights::schinzel::Frontier;
use drinfeld_heights::siegel::SiegelScan;

pub enum Format {
    Human,
    Json,
    Csv,
}

pub fn height_report(
    format: &Format,
    beta: &RatFunc,
    g: &GlobalHeight,
    naive: Option<&[LogUnits]>,
) {
    match format {
        Format::Json => {
            let naive: Option<Vec<String>> =
                naive.map(|s| s.iter().map(|x| x.to_string()).collect());
            let doc = serde_json::json!({
                "beta": beta.to_string(),
                "global": g,
                "naive_convergents": naive,
            });
            println!("{}", serde_json::to_string_pretty(&doc).unwrap());
        }
        Format::Csv => {
            println!("place,value,certified,escape_index,iterations,precision_retries");
            for h in &g.locals {
                println!(
                    "{},{},{},{},{},{}",
                    h.place,
                    h.value,
                    h.certified,
                    h.escape_index.map(|n| n.to_string()).unwrap_or_default(),
                    h.iterations,
                    h.precision_retries
                );
            }
        }
        Format::Human => {
            println!("beta = {beta}");
            match &g.torsion_order {
                Some(q) => println!("torsion point of order {q}; canonical height 0 (certified)"),
                None => {
                    println!(
                        "canonical height = {} ({})",
                        g.value,
                        if g.certified { "certified" } else { "NOT certified" }
                    );
                    println!("{:<16} {:>10} {:>10} {:>7} {:>6} {:>7}  note", "place", "value", "certified", "escape", "iters", "retries");
                    for h in &g.locals {
                        println!(
                            "{:<16} {:>10} {:>10} {:>7} {:>6} {:>7}  {}",
                            h.place.to_string(),
                            h.value.to_string(),
                            h.certified,
                            h.escape_index.map(|n| n.to_string()).unwrap_or_default(),
                            h.iterations,
                            h.precision_retries,
                            h.note.as_deref().unwrap_or("")
                        );
                    }
                }
            }
            if let Some(seq) = naive {
                let parts: Vec<String> = seq.iter().map(|x| x.to_string()).collect();
                println!("naive convergents h(phi_t^k(beta))/q^(dk): {}", parts.join(", "));
            }
        }
    }
}

pub fn torsion_report(format: &Format, beta: &RatFunc, status: &TorsionStatus) {
    let (kind, order) = match status {
        TorsionStatus::Order(q) => ("torsion", Some(q.to_string())),
        TorsionStatus::NotTorsion => ("not-torsion", None),
        TorsionStatus::Undecided => ("undecided", None),
    };
    match format {
        Format::Json => {
            let doc = serde_json::json!({
                "beta": beta.to_string(),
                "status": kind,
                "order": order,
            });
            println!("{}", serde_json::to_string_pretty(&doc).unwrap());
        }
        Format::Csv => {
            println!("beta,status,order");
            println!("{beta},{kind},{}", order.unwrap_or_default());
        }
        Format::Human => match status {
            TorsionStatus::Order(q) => println!("{beta} is torsion with order {q}"),
            TorsionStatus::NotTorsion => {
                println!("{beta} is not torsion (certified positive canonical height)")
            }
            TorsionStatus::Undecided => println!("undecided within the configured budgets"),
        },
    }
}

pub fn average_report(format: &Format, rows: &[AverageRow]) {
    match format {
        Format::Json => {
            println!("{}", serde_json::to_string_pretty(rows).unwrap());
        }
        Format::Csv => {
            println!("Q,place,average,target,gap");
            for r in rows {
                println!("{},{},{},{},{}", r.q_poly, r.place, r.average, r.target, r.gap);
            }
        }
        Format::Human => {
            println!(
                "{:<18} {:<12} {:>14} {:>10} {:>14}",
                "Q", "place", "average", "target", "gap"
            );
            for r in rows {
                println!(
                    "{:<18} {:<12} {:>14} {:>10} {:>14}{}",
                    r.q_poly.to_string(),
                    r.place.to_string(),
                    r.average.to_string(),
                    r.target.to_string(),
                    r.gap.to_string(),
                    if r.target_certified { "" } else { "  (target uncertified)" }
                );
            }
        }
    }
}

pub fn siegel_report(format: &Format, scan: &SiegelScan) {
    match format {
        Format::Json => {
            println!("{}", serde_json::to_string_pretty(scan).unwrap());
        }
        Format::Csv => {
            println!("degree,hits");
            for (deg, hits) in &scan.per_degree {
                println!("{deg},{hits}");
            }
        }
        Format::Human => {
            println!("S-integral hits: {}", if scan.hits.is_empty() { "(none)".into() } else { scan.hits.join(", ") });
            println!("per-degree hit counts:");
            for (deg, hits) in &scan.per_degree {
                println!("  deg {deg}: {hits}");
            }
            match scan.max_hit_degree {
                Some(d) => println!("largest hit degree observed: {d} (empirical; no proven bound)"),
                None => println!("no hits in the scanned range"),
            }
        }
    }
}

/// Separator emitted before the normalized-module rerun of a scan.
pub fn normalized_marker(format: &Format, gamma: &RatFunc) {
    match format {
        Format::Json => {
            println!("{}", serde_json::json!({ "normalized_gamma": gamma.to_string() }));
        }
        Format::Csv | Format::Human => {
            println!("# normalized module scan (psi = gamma^-1 phi gamma, gamma = {gamma}, point gamma^-1 beta)");
        }
    }
}

pub fn schinzel_report(format: &Format, frontier: &Frontier) {
    match format {
        Format::Json => {
            // one PrimitiveHit record per line
            for row in &frontier.rows {
                if let Some(hit) = &row.first_hit {
                    println!("{}", serde_json::to_string(hit).unwrap());
                }
            }
        }
        Format::Csv => {
            println!("Q,first_place,residue_order,logq_abs_phi_Q");
            for row in &frontier.rows {
                match &row.first_hit {
                    Some(hit) => println!(
                        "{},{},{},{}",
                        row.q_poly, hit.place, hit.residue_order, hit.evidence.q_log
                    ),
                    None => println!("{},,,", row.q_poly),
                }
            }
        }
        Format::Human => {
            println!("{:<18} {:<20} {}", "Q", "first primitive place", "evidence logq|phi_Q(beta)|_v");
            for row in &frontier.rows {
                match &row.first_hit {
                    Some(hit) => println!(
                        "{:<18} {:<20} {}",
                        row.q_poly.to_string(),
                        hit.place.to_string(),
                        hit.evidence.q_log
                    ),
                    None => println!("{:<18} {:<20}", row.q_poly.to_string(), "(none found)"),
                }
            }
            println!("empirical N = {}", frontier.empirical_n);
        }
    }
}

pub fn reduce_report(format: &Format, place: &Place, rm: &ResidueModule) {
    let coeffs: Vec<String> = rm.coeffs().iter().map(|c| c.to_string()).collect();
    match format {
        Format::Json => {
            let doc = serde_json::json!({
                "place": place.to_string(),
                "residue_degree": rm.residue_field().ext_degree(),
                "phi_t_bar": coeffs,
            });
            println!("{}", serde_json::to_string_pretty(&doc).unwrap());
        }
        Format::Csv => {
            println!("place,residue_degree,phi_t_bar");
            println!("{place},{},{}", rm.residue_field().ext_degree(), coeffs.join(";"));
        }
        Format::Human => {
            println!(
                "reduction at ({place}): residue field F_{}, phi_t-bar coefficients [{}]",
                rm.residue_field().size(),
                coeffs.join(", ")
            );
        }
    }
}

pub fn factor_report(format: &Format, poly: &Poly, fac: &Factorization) {
    match format {
        Format::Json => {
            let factors: Vec<serde_json::Value> = fac
                .factors
                .iter()
                .map(|(p, m)| serde_json::json!({"factor": p.to_string(), "multiplicity": m}))
                .collect();
            let doc = serde_json::json!({
                "input": poly.to_string(),
                "lead": fac.lead.to_string(),
                "factors": factors,
            });
            println!("{}", serde_json::to_string_pretty(&doc).unwrap());
        }
        Format::Csv => {
            println!("factor,multiplicity");
            for (p, m) in &fac.factors {
                println!("{p},{m}");
            }
        }
        Format::Human => {
            let parts: Vec<String> = fac
                .factors
                .iter()
                .map(|(p, m)| {
                    if *m == 1 {
                        format!("({p})")
                    } else {
                        format!("({p})^{m}")
                    }
                })
                .collect();
            let lead = if fac.lead.is_one() {
                String::new()
            } else {
                format!("{} * ", fac.lead)
            };
            println!("{poly} = {lead}{}", parts.join(" * "));
        }
    }
}
