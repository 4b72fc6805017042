use std::sync::Arc;
use std::time::{Duration, Instant};

use reqwest::{Client, StatusCode};
use roomsim::api::{serve, ApiConfig};
use roomsim::orchestrator::Orchestrator;
use serde_json::Value;
use tokio::sync::oneshot;

use super::*;

pub struct Server {
    pub base: String,
    pub client: Client,
    shutdown: Option<oneshot::Sender<()>>,
    task: Option<tokio::task::JoinHandle<()>>,
}

impl Server {
    pub async fn start(orchestrator: Orchestrator) -> Server {
        let listener = tokio::net::TcpListener::bind("127.0.0.1:0").await.unwrap();
        let base = format!("http://{}", listener.local_addr().unwrap());
        let (tx, rx) = oneshot::channel::<()>();
        let orchestrator = Arc::new(orchestrator);
        let task = tokio::spawn(async move {
            serve(listener, orchestrator, &ApiConfig::default(), async {
                let _ = rx.await;
            })
            .await
            .unwrap();
        });
        Server {
            base,
            client: Client::new(),
            shutdown: Some(tx),
            task: Some(task),
        }
    }

    pub async fn stop(mut self) {
        let _ = self.shutdown.take().unwrap().send(());
        self.task.take().unwrap().await.unwrap();
    }

    pub fn url(&self, path: &str) -> String {
        format!("{}{}", self.base, path)
    }

    pub async fn post(&self, path: &str, body: Option<Value>) -> (StatusCode, Value) {
        let mut req = self.client.post(self.url(path));
        if let Some(body) = body {
            req = req.json(&body);
        }
        let resp = req.send().await.unwrap();
        let status = resp.status();
        let text = resp.text().await.unwrap();
        (status, serde_json::from_str(&text).unwrap_or(Value::Null))
    }

    pub async fn post_raw(&self, path: &str, body: &'static str) -> (StatusCode, Value) {
        let resp = self
            .client
            .post(self.url(path))
            .header("content-type", "application/json")
            .body(body)
            .send()
            .await
            .unwrap();
        (resp.status(), resp.json().await.unwrap_or(Value::Null))
    }

    pub async fn get(&self, path: &str) -> (StatusCode, Value) {
        let resp = self.client.get(self.url(path)).send().await.unwrap();
        (resp.status(), resp.json().await.unwrap_or(Value::Null))
    }

    pub async fn get_bytes(&self, path: &str) -> (StatusCode, Vec<u8>) {
        let resp = self.client.get(self.url(path)).send().await.unwrap();
        (resp.status(), resp.bytes().await.unwrap().to_vec())
    }

    pub async fn put(&self, path: &str, body: String) -> (StatusCode, Value) {
        let resp = self.client.put(self.url(path)).body(body).send().await.unwrap();
        (resp.status(), resp.json().await.unwrap_or(Value::Null))
    }

    pub async fn create(&self) -> String {
        let (status, body) = self.post("/simulations", None).await;
        assert_eq!(status, StatusCode::CREATED);
        body["id"].as_str().unwrap().to_string()
    }

    pub async fn upload_all(&self, id: &str) {
        for (kind, body) in [
            ("idf", REFERENCE_IDF.to_string()),
            ("weather", mild_epw()),
            ("occupancy", occupancy_csv("2023-05-01", 7, 10)),
        ] {
            let (status, err) = self.put(&format!("/simulations/{id}/input/{kind}"), body).await;
            assert_eq!(status, StatusCode::NO_CONTENT, "{kind}: {err}");
        }
    }

    pub async fn configured(&self) -> String {
        let id = self.create().await;
        self.upload_all(&id).await;
        let (status, body) = self
            .post(&format!("/simulations/{id}/parameters"), Some(parameters_json("2023-05-02", "2023-05-02")))
            .await;
        assert_eq!(status, StatusCode::OK, "{body}");
        id
    }

    pub async fn poll_done(&self, id: &str) -> Value {
        let deadline = Instant::now() + Duration::from_secs(30);
        loop {
            let (status, body) = self.get(&format!("/simulations/{id}/status")).await;
            assert_eq!(status, StatusCode::OK);
            match body["status"].as_str().unwrap() {
                "done" | "failed" => return body,
                _ if Instant::now() > deadline => panic!("timed out: {body}"),
                _ => tokio::time::sleep(Duration::from_millis(20)).await,
            }
        }
    }

    pub async fn poll_series(&self, id: &str) -> Value {
        let deadline = Instant::now() + Duration::from_secs(30);
        loop {
            let (status, body) = self.get(&format!("/series/{id}")).await;
            assert_eq!(status, StatusCode::OK);
            if body["status"] == "done" {
                return body;
            }
            assert!(Instant::now() < deadline, "timed out: {body}");
            tokio::time::sleep(Duration::from_millis(20)).await;
        }
    }
}
