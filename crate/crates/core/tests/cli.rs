use std::process::{Command, Output};

fn qbeck(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qbeck"))
        .args(args)
        .env_remove("QBECK_ENUM_CAP")
        .env_remove("QBECK_DP_CAP")
        .env_remove("QBECK_GF2_CAP")
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

#[test]
fn expand_outputs() {
    let o = qbeck(&["expand", "quot([poch(5,5)^4],[poch(1,1)])", "--order", "4"]);
    assert!(o.status.success());
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["coeffs"], serde_json::json!(["1", "1", "2", "3", "5"]));
    assert_eq!(v["ring"], "rational");

    let o = qbeck(&["expand", "A", "--order", "0", "--output", "text"]);
    assert_eq!(stdout(&o).trim(), "1");
    let o = qbeck(&["expand", "R1", "--order", "3", "--output", "text"]);
    assert_eq!(stdout(&o).trim(), "0 1 1 1");
    let o = qbeck(&["expand", "1/2 + zeta", "--order", "1", "--ring", "cyclo"]);
    assert!(stdout(&o).contains(r#""(1/2, 1, 0, 0)""#), "{}", stdout(&o));
}

#[test]
fn exit_code_contract() {
    assert_eq!(qbeck(&["verify", "--id", "T1.a", "--order", "200"]).status.code(), Some(0));
    let o = qbeck(&["verify", "--id", "NOPE"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("NOPE"));
    assert_eq!(qbeck(&["expand", "poch(", "--order", "3"]).status.code(), Some(2));
    assert_eq!(qbeck(&["stats", "--n", "61", "--mod", "5"]).status.code(), Some(2));
    assert_eq!(qbeck(&["frobnicate"]).status.code(), Some(2));
    // conjectured target for (1,4) is far from what the data show
    let o = qbeck(&[
        "density", "--stat", "momega", "--i", "1", "--j", "4", "--upto", "300", "--assert-conjectures",
    ]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn verify_machine_output() {
    let o = qbeck(&["verify", "--id", "L2.2.a", "--id", "C5.3", "--order", "40", "--json"]);
    assert!(o.status.success());
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    let ids: Vec<&str> = v.as_array().unwrap().iter().map(|r| r["id"].as_str().unwrap()).collect();
    assert_eq!(ids, ["L2.2.a", "C5.3"]);
    assert!(v[0]["passed"].as_bool().unwrap());

    let o = qbeck(&["verify", "--id", "T2", "--order", "20", "--csv"]);
    let text = stdout(&o);
    assert!(text.starts_with("id,order,passed,first_mismatch,elapsed_ms,error\n"));
    assert!(text.contains("T2,20,true,"));
}

#[test]
fn stats_csv_round_trips() {
    let o = qbeck(&["stats", "--n", "4", "--mod", "5"]);
    assert!(o.status.success());
    let text = stdout(&o);
    let table = qbeck::partitions::StatTable::read_csv(text.as_bytes()).unwrap();
    assert_eq!(table, qbeck::partitions::stat_table(4, 5).unwrap());
    let nt: Vec<String> = (0..5).map(|m| table.nt[m][4].to_string()).collect();
    assert_eq!(nt, ["2", "2", "4", "1", "3"]);

    let o = qbeck(&["stats", "--n", "30", "--mod", "5", "--method", "gf"]);
    let fast = qbeck::partitions::StatTable::read_csv(stdout(&o).as_bytes()).unwrap();
    assert_eq!(fast, qbeck::partitions::stat_table(30, 5).unwrap());
    assert_eq!(qbeck(&["stats", "--n", "10", "--mod", "7", "--method", "gf"]).status.code(), Some(2));
}

#[test]
fn caps_come_from_environment() {
    let o = Command::new(env!("CARGO_BIN_EXE_qbeck"))
        .args(["stats", "--n", "62", "--mod", "5"])
        .env("QBECK_ENUM_CAP", "10")
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("budget 10"));
    let o = Command::new(env!("CARGO_BIN_EXE_qbeck"))
        .args(["density", "--stat", "nt", "--i", "0", "--j", "1", "--upto", "200"])
        .env("QBECK_GF2_CAP", "100")
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn density_csv_columns() {
    let o = qbeck(&["density", "--stat", "nt", "--i", "1", "--j", "3", "--upto", "200", "--stride", "100", "--csv"]);
    assert!(o.status.success());
    let text = stdout(&o);
    let mut lines = text.lines();
    assert_eq!(
        lines.next().unwrap(),
        "statistic,i,j,modulus,upto,matches,density,density_decimal,target,target_decimal,forced_ok"
    );
    let rows: Vec<&str> = lines.collect();
    assert_eq!(rows.len(), 2);
    assert!(rows[1].starts_with("nt,1,3,2,200,"));
    assert!(rows[1].contains(",1/2,0.500000,true"));
}
