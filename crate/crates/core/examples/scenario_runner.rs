//! Running a CSV scenario in-process, as the `maxmul` binary does.

use maxmul::cli::{run, Scenario, ScenarioConfig};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut cfg = ScenarioConfig::parse(
        "# admissible ranges on a small grid\n\
         alpha = 0.75, 1, 1.5\n\
         beta = 0, 1, 1.5\n\
         exponent = const:2\n",
    )?;
    cfg.set("alpha_dim", "0.5")?;
    print!("{}", run(Scenario::RangeTable, &cfg)?.csv);

    let report = run(Scenario::Verify, &ScenarioConfig::default())?;
    let failed = report.csv.lines().filter(|l| l.contains(",fail,")).count();
    println!("verify: {} checks, {failed} failed", report.csv.lines().count() - 1);
    Ok(())
}
