// Drives the HTTP service in-process: upload, analyze, build a cube and
// query it the way the dashboard's slicer does.

use std::error::Error;
use std::sync::Arc;

use axum::body::Body;
use axum::http::Request;
use http_body_util::BodyExt;
use kpiforge::api::router;
use kpiforge::bundled::ACADEMIC_CSV;
use kpiforge::workspace::Workspace;
use serde_json::{json, Value};
use tower::ServiceExt;

async fn call(app: &axum::Router, method: &str, uri: &str, body: String) -> Result<Value, Box<dyn Error>> {
    let resp = app.clone().oneshot(Request::builder().method(method).uri(uri).body(Body::from(body))?).await?;
    let status = resp.status();
    let value: Value = serde_json::from_slice(&resp.into_body().collect().await?.to_bytes())?;
    println!("{method} {uri} -> {status}");
    Ok(value)
}

pub fn run_example() -> Result<(), Box<dyn Error>> {
    let dir = tempfile::tempdir()?;
    let app = router(Arc::new(Workspace::open(dir.path())?));
    tokio::runtime::Runtime::new()?.block_on(async {
        let ds = call(&app, "POST", "/datasets?name=academic", ACADEMIC_CSV.to_owned()).await?;
        let id = ds["id"].as_str().ok_or("no id")?;

        let run = call(&app, "POST", "/analyses", json!({ "dataset_id": id }).to_string()).await?;
        let retained: Vec<&str> = run["condensed"]["retained"]
            .as_array()
            .ok_or("no condensed list")?
            .iter()
            .filter_map(|k| k["name"].as_str())
            .collect();
        println!("retained KPIs: {}", retained.join(", "));

        let body = json!({ "dataset_id": id, "dimensions": ["Course", "State"], "measures": ["CGPA"] });
        let cube = call(&app, "POST", "/cube", body.to_string()).await?;
        let cube_id = cube["cube_id"].as_str().ok_or("no cube id")?;

        let uri = format!("/cube/{cube_id}/aggregate?measure=CGPA&group_by=State&filters=Course:M.Tech");
        let agg = call(&app, "GET", &uri, String::new()).await?;
        for row in agg["rows"].as_array().ok_or("no rows")? {
            println!("  {:<18} n={}", row["group"].as_str().unwrap_or(""), row["count"]);
        }
        Ok(())
    })
}

fn main() {
    run_example().unwrap();
}
