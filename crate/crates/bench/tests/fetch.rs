use std::io::{BufRead, BufReader, Write};
use std::net::TcpListener;
use std::thread;

use flate2::write::GzEncoder;
use flate2::Compression;
use mpkrylov_bench::{fetch_matrix, FetchError};

const MTX: &str = "%%MatrixMarket matrix coordinate real general\n2 2 2\n1 1 1.0\n2 2 2.0\n";

fn archive(entries: &[(&str, &str)]) -> Vec<u8> {
    let mut builder = tar::Builder::new(GzEncoder::new(Vec::new(), Compression::default()));
    for (path, body) in entries {
        let mut h = tar::Header::new_gnu();
        h.set_size(body.len() as u64);
        h.set_mode(0o644);
        h.set_cksum();
        builder.append_data(&mut h, path, body.as_bytes()).unwrap();
    }
    builder.into_inner().unwrap().finish().unwrap()
}

/// Serves `requests` HTTP requests, answering each with `status` and
/// `body`; returns the base URL and a handle yielding the request paths.
fn serve(status: u16, body: Vec<u8>, requests: usize) -> (String, thread::JoinHandle<Vec<String>>) {
    let listener = TcpListener::bind("127.0.0.1:0").unwrap();
    let base = format!("http://{}/MM", listener.local_addr().unwrap());
    let handle = thread::spawn(move || {
        let mut paths = Vec::new();
        for _ in 0..requests {
            let (mut stream, _) = listener.accept().unwrap();
            let mut reader = BufReader::new(stream.try_clone().unwrap());
            let mut line = String::new();
            reader.read_line(&mut line).unwrap();
            paths.push(line.split_whitespace().nth(1).unwrap_or_default().to_string());
            loop {
                let mut h = String::new();
                reader.read_line(&mut h).unwrap();
                if h == "\r\n" || h.is_empty() {
                    break;
                }
            }
            write!(
                stream,
                "HTTP/1.1 {status} X\r\nContent-Length: {}\r\nConnection: close\r\n\r\n",
                body.len()
            )
            .unwrap();
            stream.write_all(&body).unwrap();
        }
        paths
    });
    (base, handle)
}

#[test]
fn downloads_extracts_and_caches() {
    let (base, server) = serve(200, archive(&[("mcfe/README", "x"), ("mcfe/mcfe.mtx", MTX)]), 1);
    let dir = tempfile::tempdir().unwrap();
    let path = fetch_matrix("mcfe", &base, dir.path()).unwrap();
    assert_eq!(path, dir.path().join("mcfe.mtx"));
    assert_eq!(std::fs::read_to_string(&path).unwrap(), MTX);
    assert_eq!(server.join().unwrap(), vec!["/MM/HB/mcfe.tar.gz".to_string()]);

    // the server is gone: a second call must be served from the cache
    let again = fetch_matrix("mcfe", "http://127.0.0.1:1/MM", dir.path()).unwrap();
    assert_eq!(again, path);
}

#[test]
fn explicit_group_is_used_in_the_url() {
    let (base, server) = serve(200, archive(&[("x/other.mtx", MTX)]), 1);
    let dir = tempfile::tempdir().unwrap();
    fetch_matrix("Grp/other", &base, dir.path()).unwrap();
    assert_eq!(server.join().unwrap(), vec!["/MM/Grp/other.tar.gz".to_string()]);
}

#[test]
fn http_error_names_the_url() {
    let (base, _server) = serve(404, b"nope".to_vec(), 1);
    let dir = tempfile::tempdir().unwrap();
    let err = fetch_matrix("dwg961b", &base, dir.path()).unwrap_err();
    assert!(matches!(err, FetchError::Http { .. }), "{err}");
    assert!(err.to_string().contains("/MM/Bai/dwg961b.tar.gz"), "{err}");
    assert!(!dir.path().join("dwg961b.mtx").exists());
}

#[test]
fn archive_without_the_matrix_is_rejected() {
    let (base, _server) = serve(200, archive(&[("mcfe/README", "x")]), 1);
    let dir = tempfile::tempdir().unwrap();
    let err = fetch_matrix("mcfe", &base, dir.path()).unwrap_err();
    assert!(matches!(err, FetchError::MissingEntry { .. }), "{err}");
}

#[test]
fn unparsable_matrix_is_not_cached() {
    let (base, _server) = serve(200, archive(&[("mcfe/mcfe.mtx", "garbage\n")]), 1);
    let dir = tempfile::tempdir().unwrap();
    let err = fetch_matrix("mcfe", &base, dir.path()).unwrap_err();
    assert!(matches!(err, FetchError::Parse { .. }), "{err}");
    assert!(!dir.path().join("mcfe.mtx").exists());
}
