//! The 48-hour case study: nine end-users in three areas, electricity
//! halved between hours 17 and 34, with full and with limited media access.
//!
//! ```sh
//! cargo run --example case_study -- results/case-study
//! ```

use socio_grid_sim::scenario_io::{
    builtin_case_study, write_comparison, write_results, CaseStudyVariant,
};
use socio_grid_sim::simulate;

fn main() -> socio_grid_sim::Result<()> {
    let out = std::env::args()
        .nth(1)
        .unwrap_or_else(|| "results/case-study".into());

    let full = simulate(&builtin_case_study(CaseStudyVariant::FullAccess))?;
    let limited = simulate(&builtin_case_study(CaseStudyVariant::LimitedAccess))?;

    println!("hour  S_full  S_limited");
    for (k, t) in full.times().iter().enumerate() {
        let (a, b) = (full.mean_satisfaction()[k], limited.mean_satisfaction()[k]);
        println!("{t:>4}  {a:.4}  {b:.4}");
    }

    write_results(&full, format!("{out}/full"))?;
    write_results(&limited, format!("{out}/limited"))?;
    write_comparison(
        format!("{out}/comparison.csv"),
        &[("full", &full), ("limited", &limited)],
    )?;
    println!("results in {out}/");
    Ok(())
}
