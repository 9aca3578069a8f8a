//! Drives the HTTP API in-process: upload, review a cluster, read the
//! spectrum. With `--serve` it then listens on 127.0.0.1:7878.

use axum::body::Body;
use axum::http::Request;
use axum::Router;
use http_body_util::BodyExt;
use rpys::service::{router, serve, AppState, ServiceConfig};
use rpys::synthetic;
use serde_json::Value;
use tower::ServiceExt;

async fn call(app: &Router, method: &str, uri: &str) -> Value {
    let req = Request::builder().method(method).uri(uri).body(Body::empty()).unwrap();
    let res = app.clone().oneshot(req).await.unwrap();
    let status = res.status();
    let body: Value = serde_json::from_slice(&res.into_body().collect().await.unwrap().to_bytes()).unwrap();
    println!("{method} {uri} -> {status}");
    body
}

#[tokio::main]
async fn main() -> Result<(), Box<dyn std::error::Error>> {
    let state = AppState::new(ServiceConfig::default());
    let id = state.add_corpus(synthetic::garfield_like(), None, None)?;
    let app = router(state.clone());

    let clusters = call(&app, "GET", &format!("/corpus/{id}/clusters?per_page=3")).await;
    println!("  {} proposals, first three:", clusters["total"]);
    for c in clusters["items"].as_array().unwrap() {
        println!("  {} {}", c["cluster_id"], c["variant_raws"]);
    }

    let before = call(&app, "GET", &format!("/corpus/{id}/spectrum?min_share=0")).await;
    let verdict = call(&app, "POST", &format!("/corpus/{id}/clusters/1972-1:accept")).await;
    println!("  revision {} changed {}", verdict["revision"], verdict["changed"]);
    let after = call(&app, "GET", &format!("/corpus/{id}/spectrum?min_share=0")).await;
    println!("  keys {} -> {}", before["n_keys"], after["n_keys"]);

    let top = call(&app, "GET", &format!("/corpus/{id}/top-crs?year=1972&limit=2")).await;
    for k in top["keys"].as_array().unwrap() {
        println!("  {} x {}", k["occurrences"], k["representative"]["raw"]);
    }

    if std::env::args().any(|a| a == "--serve") {
        let addr = "127.0.0.1:7878".parse()?;
        println!("serving corpus {id} on http://{addr} (ctrl-c to stop)");
        serve(state, addr).await?;
    }
    Ok(())
}
