use std::io::{BufRead, BufReader, Read, Write};
use std::net::TcpStream;
use std::path::Path;
use std::process::{Command, Stdio};

fn rdfforge() -> Command {
    Command::new(env!("CARGO_BIN_EXE_rdfforge"))
}

fn fixture(name: &str) -> String {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../fixtures").join(name).display().to_string()
}

/// Raw HTTP/1.1 GET; returns the status line and body.
fn http_get(addr: &str, path: &str) -> (String, String) {
    let mut stream = TcpStream::connect(addr).unwrap();
    write!(stream, "GET {path} HTTP/1.1\r\nHost: {addr}\r\nConnection: close\r\n\r\n").unwrap();
    let mut response = String::new();
    stream.read_to_string(&mut response).unwrap();
    let (head, body) = response.split_once("\r\n\r\n").unwrap();
    (head.lines().next().unwrap().to_string(), body.to_string())
}

#[test]
fn serve_answers_on_an_ephemeral_port() {
    let dir = tempfile::tempdir().unwrap();
    let db = dir.path().join("pb.db");
    let status = rdfforge().args(["generate", &fixture("persons_books.ttl"), "--db", db.to_str().unwrap()]).status().unwrap();
    assert!(status.success());

    let mut child = rdfforge()
        .args(["serve", "--db", db.to_str().unwrap(), "--port", "0"])
        .stderr(Stdio::piped())
        .spawn()
        .unwrap();
    let mut lines = BufReader::new(child.stderr.take().unwrap()).lines();
    let addr = loop {
        let line = lines.next().expect("server exited before listening").unwrap();
        if let Some(rest) = line.split("listening on http://").nth(1) {
            break rest.trim().to_string();
        }
    };
    let (status_line, body) = http_get(&addr, "/person?limit=1");
    child.kill().unwrap();
    child.wait().unwrap();
    assert!(status_line.contains("200"), "{status_line}");
    let people: serde_json::Value = serde_json::from_str(body.trim()).unwrap_or_else(|e| panic!("{e}: {body:?}"));
    assert_eq!(people.as_array().unwrap().len(), 1);
}

#[test]
fn serve_rejects_a_database_without_resource_ids() {
    let dir = tempfile::tempdir().unwrap();
    let db = dir.path().join("plain.db");
    rusqlite::Connection::open(&db).unwrap().execute_batch("CREATE TABLE t (id INTEGER PRIMARY KEY);").unwrap();
    let out = rdfforge().args(["serve", "--db", db.to_str().unwrap(), "--port", "0"]).output().unwrap();
    assert_eq!(out.status.code(), Some(1));
}
