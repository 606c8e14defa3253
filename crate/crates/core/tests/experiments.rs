use wom_core::config::{load_experiment, parse_experiment};
use wom_core::dpa::{ModelParams, StateVector};
use wom_core::export::{sweep_records_csv, write_outputs, Provenance};
use wom_core::network::{generate_small_world, influential_degree, save_graph, Graph};
use wom_core::stochastic::stochastic_oracle;
use wom_core::sweep::{run_sweep, ExperimentResult, NetworkSpec};
use wom_core::Error;

const SMALL: &str = r#"
[sweep]
factor = "theta"
values = [0.0, 0.5, 1.0]
outputs = ["steady_state", "profit"]
replicates = 2
dt = 0.05

[sweep.base]
horizon = 10.0

[sweep.network]
kind = "small-world"
n = 20
k = 4
p = 0.1
"#;

fn in_pool<T: Send>(threads: usize, f: impl FnOnce() -> T + Send) -> T {
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .unwrap()
        .install(f)
}

#[test]
fn sweep_output_does_not_depend_on_thread_count() {
    let exp = parse_experiment(SMALL).unwrap();
    let csv = |threads| {
        in_pool(threads, || {
            let r = run_sweep(&exp.sweep).unwrap();
            sweep_records_csv(&r, &Provenance::new())
        })
    };
    assert_eq!(csv(1), csv(3));
}

#[test]
fn oracle_does_not_depend_on_thread_count() {
    let g = Graph::complete(4);
    let d = influential_degree(&g);
    let params = ModelParams { horizon: 1.0, ..Default::default() };
    let s0 = StateVector::uniform(4, 0.5, 0.1).unwrap();
    let run = |threads| in_pool(threads, || stochastic_oracle(&s0, &params, &g, &d, 0.05, 5000, 3));
    assert_eq!(run(1).unwrap(), run(4).unwrap());
}

#[test]
fn file_networks_resolve_next_to_the_config() {
    let dir = tempfile::tempdir().unwrap();
    let g = generate_small_world(20, 4, 0.1, 5).unwrap();
    save_graph(&g, dir.path().join("g.txt")).unwrap();
    let text = r#"
[sweep]
factor = "alpha"
values = [0.5]
outputs = ["steady_state"]
dt = 0.05

[sweep.base]
horizon = 5.0

[sweep.network]
kind = "file"
path = "g.txt"
"#;
    let path = dir.path().join("exp.toml");
    std::fs::write(&path, text).unwrap();
    let exp = load_experiment(&path).unwrap();
    assert_eq!(
        exp.sweep.network,
        NetworkSpec::File { path: dir.path().join("g.txt") }
    );
    let ExperimentResult::Sweep(r) = exp.run().unwrap() else {
        panic!("expected a plain sweep");
    };
    assert_eq!(r.records[0].realizations, 1);
}

#[test]
fn bad_values_are_reported() {
    let text = SMALL.replace("values = [0.0, 0.5, 1.0]", "values = [0.0, 1.5]");
    let exp = parse_experiment(&text);
    assert!(matches!(exp, Err(Error::Parameter(_)) | Err(Error::Config(_))));
}

#[test]
fn manifest_hashes_match_the_files() {
    let dir = tempfile::tempdir().unwrap();
    let files = vec![("a.csv".to_string(), "x\n1\n".to_string())];
    let m = write_outputs(dir.path(), &files).unwrap();
    assert_eq!(m.outputs[0].bytes, 4);
    // sha256 of "x\n1\n", computed with coreutils sha256sum.
    assert_eq!(
        m.outputs[0].sha256,
        "daff832f802000e645771a60983c76c963f6ee602a6230e45237bd360e91cc1a"
    );
    let manifest = std::fs::read_to_string(dir.path().join("manifest.json")).unwrap();
    assert!(manifest.contains("a.csv"));
}
