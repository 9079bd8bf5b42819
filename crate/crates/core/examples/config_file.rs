//! Drive an experiment from a TOML file, with individual settings overridden
//! in code the way command-line flags override the file.

use coded_shuffle::experiment::{cmd_simulate, ExperimentConfig, Sweep};
use coded_shuffle::Result;

const CONFIG: &str = r#"
scheme = "flcd"
nodes = 12
load = 5
seed = 3
format = "markdown"
"#;

fn main() -> Result<()> {
    let file = ExperimentConfig::from_toml(CONFIG)?;
    let flags = ExperimentConfig {
        load: Some(Sweep(vec![4])),
        ..Default::default()
    };
    let (comparison, report) = cmd_simulate(&flags.or(file))?;
    print!("{report}");
    assert!(comparison.exact());
    Ok(())
}
