use std::fs;
use std::io::{BufRead, BufReader};
use std::path::{Path, PathBuf};
use std::process::{Child, Command, Stdio};

use reqwest::blocking::Client;
use serde_json::{json, Value};

fn fixtures() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../fixtures")
}

struct Server {
    child: Child,
    base: String,
}

impl Drop for Server {
    fn drop(&mut self) {
        let _ = self.child.kill();
        let _ = self.child.wait();
    }
}

fn serve(descriptor: &Path, table: &Path, registry: &Path) -> Server {
    let mut child = Command::new(env!("CARGO_BIN_EXE_ontopop"))
        .args(["serve", "--port", "0", "--descriptor"])
        .arg(descriptor)
        .arg("--table")
        .arg(table)
        .arg("--registry")
        .arg(registry)
        .stdout(Stdio::piped())
        .spawn()
        .unwrap();
    let mut line = String::new();
    BufReader::new(child.stdout.take().unwrap()).read_line(&mut line).unwrap();
    let base = line.trim().strip_prefix("listening on ").expect("listening line").to_string();
    Server { child, base }
}

fn copy_into(dir: &Path, rel: &str, name: &str) -> PathBuf {
    let to = dir.join(name);
    fs::copy(fixtures().join(rel), &to).unwrap();
    to
}

#[test]
fn editing_session() {
    let dir = tempfile::tempdir().unwrap();
    let table = copy_into(dir.path(), "cell_nucleation/mixed_table.csv", "table.csv");
    let registry = copy_into(dir.path(), "cell_nucleation/registry.json", "registry.json");
    let s = serve(&fixtures().join("cell_nucleation/descriptor.json"), &table, &registry);
    let http = Client::new();
    let get = |path: &str| http.get(format!("{}{path}", s.base)).send().unwrap();

    assert_eq!(get("/health").json::<Value>().unwrap()["status"], "ok");

    let t: Value = get("/template").json().unwrap();
    assert_eq!(t["statuses"][4][0][0]["status"], "Unknown");
    assert_eq!(t["descriptor"]["columns"][1]["name"], "Nucleation");

    let c: Value = get("/complete?column=Nucleation&q=mono").json().unwrap();
    assert_eq!(c, json!([{"iri": "http://purl.org/obo/owl/PATO#PATO_0001407", "label": "mononucleate"}]));
    assert_eq!(get("/complete?column=Nope&q=x").status(), 404);
    assert_eq!(get("/complete?column=Nucleation").status(), 400);

    let post = |path: &str, body: Value| http.post(format!("{}{path}", s.base)).json(&body).send().unwrap();
    let edit: Value = post("/cells", json!({"row": 4, "column": "Cell type", "text": "epithelial cell"})).json().unwrap();
    assert_eq!(edit["statuses"][0]["status"], "Resolved");
    assert_eq!(edit["statuses"][0]["iri"], "http://purl.org/obo/owl/CL#CL_0000066");
    assert_eq!(post("/cells", json!({"row": 99, "column": "Cell type", "text": "x"})).status(), 400);
    assert_eq!(post("/cells", json!({"row": 0, "column": "Nope", "text": "x"})).status(), 404);
    assert_eq!(post("/cells", json!({"row": 0})).status().as_u16() / 100, 4);

    let v: Value = post("/validate", json!({})).json().unwrap();
    assert_eq!(v["issues"], json!([]));

    let export = get("/export/csv");
    assert!(export.headers()["content-type"].to_str().unwrap().starts_with("text/csv"));
    let csv = export.text().unwrap();
    assert!(csv.contains("epithelial cell"));
    assert_eq!(fs::read_to_string(&table).unwrap(), csv);
}

#[test]
fn expand_matches_cli() {
    let dir = tempfile::tempdir().unwrap();
    let kupo = fixtures().join("kupo");
    let read = |f: &str| fs::read_to_string(kupo.join(f)).unwrap();

    let cli_registry = copy_into(dir.path(), "kupo/registry.json", "cli_registry.json");
    let out = dir.path().join("out");
    let status = Command::new(env!("CARGO_BIN_EXE_ontopop"))
        .arg("expand")
        .arg("--descriptor").arg(kupo.join("descriptor.json"))
        .arg("--table").arg(kupo.join("table.csv"))
        .arg("--pattern").arg(kupo.join("anatomy.oppl"))
        .arg("--pattern").arg(kupo.join("processes.oppl"))
        .arg("--binding").arg(kupo.join("binding.json"))
        .arg("--registry").arg(&cli_registry)
        .arg("--out").arg(&out)
        .status()
        .unwrap();
    assert!(status.success());

    let table = copy_into(dir.path(), "kupo/table.csv", "table.csv");
    let registry = copy_into(dir.path(), "kupo/registry.json", "registry.json");
    let s = serve(&kupo.join("descriptor.json"), &table, &registry);
    let http = Client::new();
    let binding: Value = serde_json::from_str(&read("binding.json")).unwrap();
    let body = json!({"patterns": [read("anatomy.oppl"), read("processes.oppl")], "binding": binding});
    let r: Value = http.post(format!("{}/expand", s.base)).json(&body).send().unwrap().json().unwrap();
    assert_eq!(r["manchester"], fs::read_to_string(out.join("ontology.omn")).unwrap());
    assert_eq!(r["functional"], fs::read_to_string(out.join("ontology.ofn")).unwrap());
    assert_eq!(r["reportCsv"], fs::read_to_string(out.join("report.csv")).unwrap());
    assert_eq!(fs::read_to_string(&registry).unwrap(), fs::read_to_string(&cli_registry).unwrap());

    let stray = json!({"patterns": ["?cell:CLASS, ?x:CLASS BEGIN ADD ?cell SubClassOf ?x END;"], "binding": {"?cell": "Cell type"}});
    let bad = http.post(format!("{}/expand", s.base)).json(&stray).send().unwrap();
    assert_eq!(bad.status(), 409);
    let v: Value = bad.json().unwrap();
    assert!(!v["violations"].as_array().unwrap().is_empty());

    let syntax = json!({"patterns": ["?cell:CLASS BEGIN"], "binding": {"cell": "Cell type"}});
    assert_eq!(http.post(format!("{}/expand", s.base)).json(&syntax).send().unwrap().status(), 400);
}
