//! Acceptance criterion 5: the streaming bound. A generated million-record
//! stream runs through `streamcra run`; the evaluator must keep at most
//! |Q| live tokens and |Q|·|X| stored values, with throughput reported
//! (no pass/fail threshold on speed).

use std::io::Write;
use std::process::Command;

fn bin() -> &'static str {
    env!("CARGO_BIN_EXE_streamcra")
}

#[test]
fn acceptance_5_streaming_bound_on_a_million_records() {
    let dir = tempfile::tempdir().unwrap();
    let machine_path = dir.path().join("blockmax.cra.json");
    let machine_text = streamcra::fixtures::block_max_machine()
        .canonicalize()
        .to_json_string();
    std::fs::write(&machine_path, &machine_text).unwrap();

    // one million records: 250k blocks of (a,1)(a,2)(a,3)(#,0)
    let stream_path = dir.path().join("stream.jsonl");
    {
        let f = std::fs::File::create(&stream_path).unwrap();
        let mut w = std::io::BufWriter::new(f);
        for _ in 0..250_000 {
            writeln!(
                w,
                "{{\"tag\":\"a\",\"value\":1}}\n{{\"tag\":\"a\",\"value\":2}}\n{{\"tag\":\"a\",\"value\":3}}\n{{\"tag\":\"#\",\"value\":0}}"
            )
            .unwrap();
        }
    }

    let output = Command::new(bin())
        .arg("run")
        .arg(&machine_path)
        .arg("--input")
        .arg(&stream_path)
        .arg("--stats")
        .output()
        .unwrap();
    assert!(
        output.status.success(),
        "run failed: {}",
        String::from_utf8_lossy(&output.stderr)
    );
    let report: serde_json::Value = serde_json::from_slice(&output.stdout).unwrap();
    assert_eq!(report["output"], serde_json::json!(6));
    let stats = &report["stats"];
    assert_eq!(stats["items"], serde_json::json!(1_000_000));
    let live = stats["max_live_tokens"].as_u64().unwrap();
    let stored = stats["max_stored_values"].as_u64().unwrap();
    let q = stats["token_bound"].as_u64().unwrap();
    let qx = stats["value_bound"].as_u64().unwrap();
    assert!(live <= q, "live tokens {live} exceed |Q| = {q}");
    assert!(stored <= qx, "stored values {stored} exceed |Q|·|X| = {qx}");
    let throughput = report["timings"]["items_per_sec"].as_f64().unwrap();
    println!(
        "ACCEPTANCE 5 (streaming bound): PASS \
         (10^6 records, live {live} ≤ {q}, stored {stored} ≤ {qx}, \
         {throughput:.0} items/s reported)"
    );
}
