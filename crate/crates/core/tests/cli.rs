use std::path::PathBuf;
use std::process::{Command, Output};

const BIN: &str = env!("CARGO_BIN_EXE_susyhom");

struct Fixtures {
    dir: PathBuf,
}

impl Fixtures {
    fn new(tag: &str) -> Self {
        let dir = std::env::temp_dir().join(format!("susyhom-cli-{tag}-{}", std::process::id()));
        std::fs::create_dir_all(&dir).unwrap();
        Fixtures { dir }
    }

    fn file(&self, name: &str, contents: &str) -> String {
        let path = self.dir.join(name);
        std::fs::write(&path, contents).unwrap();
        path.to_str().unwrap().to_string()
    }
}

impl Drop for Fixtures {
    fn drop(&mut self) {
        let _ = std::fs::remove_dir_all(&self.dir);
    }
}

fn run(args: &[&str]) -> Output {
    Command::new(BIN).args(args).output().unwrap()
}

fn json_of(out: &Output) -> serde_json::Value {
    serde_json::from_slice(&out.stdout).unwrap()
}

const C6: &str = "6\n0 1\n1 2\n2 3\n3 4\n4 5\n5 0\n";
const K3: &str = "3\n0 1\n1 2\n2 0\n";

#[test]
fn witten_k3() {
    let fx = Fixtures::new("witten");
    let k3 = fx.file("k3.edges", K3);
    let out = run(&["witten", "--graph", &k3]);
    assert_eq!(out.status.code(), Some(0));
    let v = json_of(&out);
    assert_eq!(v["witten"], -2);
    assert_eq!(v["consistent"], true);
}

#[test]
fn betti_c6_level2() {
    let fx = Fixtures::new("betti");
    let c6 = fx.file("c6.edges", C6);
    for method in ["exact", "spectral"] {
        let out = run(&[
            "betti", "--graph", &c6, "--complex", "independence", "--level", "2", "--method",
            method,
        ]);
        assert_eq!(out.status.code(), Some(0));
        assert_eq!(json_of(&out)["betti"], 2);
    }
}

#[test]
fn qbne_c6_near_two_ninths() {
    let fx = Fixtures::new("qbne");
    let c6 = fx.file("c6.edges", C6);
    let args = [
        "qbne", "--graph", &c6, "--level", "2", "--b", "1e-6", "--delta", "0.1", "--eps", "0.05",
        "--mu", "0.9", "--seed", "7",
    ];
    let out = run(&args);
    assert_eq!(out.status.code(), Some(0));
    let v = json_of(&out);
    let chi = v["chi"].as_f64().unwrap();
    assert!((chi - 2.0 / 9.0).abs() < 0.05, "chi = {chi}");
    assert_eq!(v["N"], 600);

    // Identical argv produces byte-identical output.
    let again = run(&args);
    assert_eq!(out.stdout, again.stdout);

    // Enumeration is exact.
    let mut enum_args = args.to_vec();
    enum_args.push("--enumerate");
    let v = json_of(&run(&enum_args));
    assert!((v["chi"].as_f64().unwrap() - 2.0 / 9.0).abs() < 1e-12);
}

#[test]
fn tda_square_cloud() {
    let fx = Fixtures::new("tda");
    let pts = fx.file("sq.csv", "0,0\n1,0\n1,1\n0,1\n");
    let out = run(&[
        "tda", "--points", &pts, "--eps", "1.0,1.5", "--max-level", "1",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let rows = json_of(&out)["rows"].clone();
    // At scale 1.0 the square is a hollow cycle; at 1.5 the diagonals fill it.
    assert_eq!(rows[0]["betti"], 1);
    assert_eq!(rows[1]["betti"], 1);
    assert_eq!(rows[3]["betti"], 0);
}

#[test]
fn check_passes_on_c6() {
    let fx = Fixtures::new("check");
    let c6 = fx.file("c6.edges", C6);
    let out = run(&["check", "--graph", &c6]);
    assert_eq!(out.status.code(), Some(0));
    let v = json_of(&out);
    assert_eq!(v["ok"], true);
    assert!(v["checks"].as_array().unwrap().len() >= 5);
}

#[test]
fn reduce_constrained_verifies() {
    let fx = Fixtures::new("reduce");
    let h = fx.file("h.pauli", "1 Z 0\n0.5 X 0\n");
    let out = run(&[
        "reduce", "--hamiltonian", &h, "--variant", "constrained", "--verify-squares",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let v = json_of(&out);
    assert_eq!(v["verified"], true);
    assert_eq!(v["sector"], 3);
}

#[test]
fn vqe_p2_ground_state() {
    let fx = Fixtures::new("vqe");
    let p2 = fx.file("p2.edges", "2\n0 1\n");
    let out = run(&[
        "vqe", "--graph", &p2, "--sector", "1", "--layers", "1", "--seed", "7",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let v = json_of(&out);
    assert!(v["energy"].as_f64().unwrap() <= 1e-4);
}

#[test]
fn exit_codes() {
    let fx = Fixtures::new("exit");
    // Input errors exit 1, with a line-numbered message.
    let bad = fx.file("bad.edges", "2\n0 5\n");
    let out = run(&["witten", "--graph", &bad]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains(":2:"));

    let out = run(&["witten", "--graph", "/nonexistent/g.edges"]);
    assert_eq!(out.status.code(), Some(1));

    let out = run(&["--definitely-not-a-flag"]);
    assert_eq!(out.status.code(), Some(1));

    // Precondition failures exit 2: empty sector.
    let p2 = fx.file("p2.edges", "2\n0 1\n");
    let out = run(&[
        "qbne", "--graph", &p2, "--level", "2", "--b", "1e-6", "--delta", "0.1", "--eps", "0.1",
        "--mu", "0.9", "--seed", "1",
    ]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn table_format() {
    let fx = Fixtures::new("table");
    let k3 = fx.file("k3.edges", K3);
    let out = run(&["witten", "--graph", &k3, "--format", "table"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.lines().any(|l| l.starts_with("witten") && l.contains("-2")));
}
