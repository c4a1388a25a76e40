//! In-process Go module proxy serving canned `@v/list` and `@v/*.zip`
//! responses over HTTP on a loopback port.

use std::collections::{BTreeMap, HashMap};
use std::io::{Cursor, Write};
use std::sync::{Arc, Mutex};
use std::thread::JoinHandle;

use axum::body::Body;
use axum::extract::State;
use axum::http::{StatusCode, Uri};
use axum::response::Response;
use axum::Router;
use tokio::sync::oneshot;
use zip::write::SimpleFileOptions;

#[derive(Default)]
struct Shared {
    routes: Mutex<HashMap<String, Vec<u8>>>,
    versions: Mutex<BTreeMap<String, Vec<String>>>,
    hits: Mutex<HashMap<String, usize>>,
}

pub struct StubProxy {
    url: String,
    shared: Arc<Shared>,
    shutdown: Option<oneshot::Sender<()>>,
    thread: Option<JoinHandle<()>>,
}

async fn serve(State(shared): State<Arc<Shared>>, uri: Uri) -> Response {
    let path = uri.path().to_string();
    *shared.hits.lock().unwrap().entry(path.clone()).or_default() += 1;
    let body = shared.routes.lock().unwrap().get(&path).cloned();
    match body {
        Some(bytes) => Response::new(Body::from(bytes)),
        None => Response::builder()
            .status(StatusCode::NOT_FOUND)
            .body(Body::from("not found"))
            .unwrap(),
    }
}

/// Proxy case-escaping, restated here so tests do not lean on the code
/// under test.
fn escape(path: &str) -> String {
    path.chars()
        .flat_map(|c| {
            if c.is_ascii_uppercase() {
                vec!['!', c.to_ascii_lowercase()]
            } else {
                vec![c]
            }
        })
        .collect()
}

impl StubProxy {
    pub fn start() -> Self {
        let listener = std::net::TcpListener::bind("127.0.0.1:0").expect("bind loopback");
        listener.set_nonblocking(true).unwrap();
        let url = format!("http://{}", listener.local_addr().unwrap());
        let shared = Arc::new(Shared::default());
        let (tx, rx) = oneshot::channel::<()>();
        let app = Router::new().fallback(serve).with_state(shared.clone());
        let thread = std::thread::spawn(move || {
            let rt = tokio::runtime::Builder::new_multi_thread()
                .worker_threads(2)
                .enable_io()
                .build()
                .unwrap();
            rt.block_on(async move {
                let listener = tokio::net::TcpListener::from_std(listener).unwrap();
                axum::serve(listener, app)
                    .with_graceful_shutdown(async {
                        let _ = rx.await;
                    })
                    .await
                    .unwrap();
            });
        });
        StubProxy {
            url,
            shared,
            shutdown: Some(tx),
            thread: Some(thread),
        }
    }

    pub fn url(&self) -> &str {
        &self.url
    }

    /// Serves `body` at the given URL path (leading `/` included).
    pub fn add_raw(&self, path: &str, body: Vec<u8>) {
        self.shared
            .routes
            .lock()
            .unwrap()
            .insert(path.to_string(), body);
    }

    /// Publishes `module@version` with the given `(relative path, content)`
    /// files, updating the module's version list.
    pub fn add_module(&self, module: &str, version: &str, files: &[(&str, &str)]) {
        let escaped = escape(module);
        self.add_raw(
            &format!("/{escaped}/@v/{}.zip", escape(version)),
            module_zip(module, version, files),
        );
        let mut versions = self.shared.versions.lock().unwrap();
        let list = versions.entry(escaped.clone()).or_default();
        list.push(version.to_string());
        let body = list.iter().map(|v| format!("{v}\n")).collect::<String>();
        drop(versions);
        self.add_raw(&format!("/{escaped}/@v/list"), body.into_bytes());
    }

    pub fn hits(&self, path: &str) -> usize {
        self.shared
            .hits
            .lock()
            .unwrap()
            .get(path)
            .copied()
            .unwrap_or(0)
    }

    pub fn total_hits(&self) -> usize {
        self.shared.hits.lock().unwrap().values().sum()
    }
}

impl Drop for StubProxy {
    fn drop(&mut self) {
        if let Some(tx) = self.shutdown.take() {
            let _ = tx.send(());
        }
        if let Some(thread) = self.thread.take() {
            let _ = thread.join();
        }
    }
}

/// A zip holding exactly the given entries, names taken verbatim.
pub fn raw_zip(entries: &[(&str, &[u8])]) -> Vec<u8> {
    let mut writer = zip::ZipWriter::new(Cursor::new(Vec::new()));
    for (name, content) in entries {
        writer
            .start_file(*name, SimpleFileOptions::default())
            .unwrap();
        writer.write_all(content).unwrap();
    }
    writer.finish().unwrap().into_inner()
}

/// A module zip in proxy layout: every file under `module@version/`.
pub fn module_zip(module: &str, version: &str, files: &[(&str, &str)]) -> Vec<u8> {
    let named: Vec<(String, &[u8])> = files
        .iter()
        .map(|(p, c)| (format!("{module}@{version}/{p}"), c.as_bytes()))
        .collect();
    let refs: Vec<(&str, &[u8])> = named.iter().map(|(n, c)| (n.as_str(), *c)).collect();
    raw_zip(&refs)
}
