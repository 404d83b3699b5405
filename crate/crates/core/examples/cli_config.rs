// Driving the command harness from a TOML configuration with command-line
// style overrides, as the `pdsplit` binary does.

use std::path::Path;

use pdsplit::harness::{execute, Command};

const CONFIG: &str = r#"
seed = 1

[toy]
kind = "forward"
iterations = 500
lambda = 3.0

[validate]
algorithm = "vu"
tau = 0.1
sigma = [0.1]
norms_sq = [8.0]
"#;

pub fn run_example_in(dir: &Path) -> Result<(), Box<dyn std::error::Error>> {
    std::fs::create_dir_all(dir)?;
    let config = dir.join("experiment.toml");
    std::fs::write(&config, CONFIG)?;

    let mut out = Vec::new();
    let mut err = Vec::new();
    let overrides = vec![("out".to_string(), dir.join("toy").display().to_string())];
    let code = execute(Command::Toy, Some(&config), &overrides, &mut out, &mut err);
    println!("toy exited with {code}\n{}", String::from_utf8_lossy(&out));

    out.clear();
    let code = execute(Command::Validate, Some(&config), &[], &mut out, &mut err);
    println!(
        "validate exited with {code}\n{}",
        String::from_utf8_lossy(&out)
    );

    // λ below η + 1 is refused before any iteration runs
    out.clear();
    err.clear();
    let bad = vec![
        ("lambda".to_string(), "1.5".to_string()),
        overrides[0].clone(),
    ];
    let code = execute(Command::Toy, Some(&config), &bad, &mut out, &mut err);
    print!(
        "refused toy exited with {code}: {}",
        String::from_utf8_lossy(&err)
    );
    if code != 4 {
        return Err(format!("expected exit code 4, got {code}").into());
    }
    Ok(())
}

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    run_example_in(&std::env::temp_dir().join("pdsplit-cli-example"))
}

#[allow(dead_code)]
fn main() {
    if let Err(e) = run_example_in(Path::new("out/cli-example")) {
        eprintln!("error: {e}");
        std::process::exit(1);
    }
}
