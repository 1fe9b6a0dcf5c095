//! Acceptance suite. Runs every criterion, prints one PASS/FAIL line per
//! criterion and exits non-zero if any failed.
//!
//!     cargo test -p socialbroker-server --test acceptance

use std::process::ExitCode;
use std::time::{Duration, Instant};

use rand::seq::{IndexedRandom, SliceRandom};
use rand::Rng;
use serde_json::{json, Value};

use socialbroker_core::fixture::{org, report_requirement, report_taxonomy, PARTNER_NETWORK};
use socialbroker_core::snapshot::{load_str, parse_records};
use socialbroker_core::{
    broker_query, parse_social_requirement, BrokerRequest, Distance, Key, ParseError, Record, RecordKind,
    ScoreValue, SocialRequirement,
};
use socialbroker_server::{bind, serve_with_shutdown, ServerConfig};
use socialbroker_testkit::api_call;
use socialbroker_testkit::fixtures::{build_graph, random_graph, random_key, random_requirement, random_triple, rng};
use socialbroker_testkit::oracle::{brute_betweenness, brute_broker, degrees, floyd_warshall};

type Outcome = Result<String, String>;

macro_rules! ensure {
    ($cond:expr, $($fmt:tt)+) => {
        match $cond {
            true => {}
            false => return Err(format!($($fmt)+)),
        }
    };
}

fn within(started: Instant, budget: Duration) -> Result<(), String> {
    let took = started.elapsed();
    if took > budget {
        Err(format!("took {took:?}, budget {budget:?}"))
    } else {
        Ok(())
    }
}

/// A live server on an ephemeral port, backed by a snapshot in a temp dir.
struct Live {
    base: String,
    client: reqwest::Client,
    stop: tokio::sync::oneshot::Sender<()>,
    task: tokio::task::JoinHandle<Result<(), socialbroker_server::ServerError>>,
}

impl Live {
    async fn start(config: &ServerConfig) -> Self {
        let (listener, state) = bind(config).await.expect("bind");
        let base = format!("http://{}", listener.local_addr().unwrap());
        let (stop, rx) = tokio::sync::oneshot::channel::<()>();
        let task = tokio::spawn(serve_with_shutdown(listener, state, async {
            let _ = rx.await;
        }));
        Self { base, client: reqwest::Client::new(), stop, task }
    }

    async fn post(&self, path: &str, body: &Value) -> (u16, Value) {
        let resp = self.client.post(format!("{}{path}", self.base)).json(body).send().await.unwrap();
        let status = resp.status().as_u16();
        (status, resp.json().await.unwrap_or(Value::Null))
    }

    async fn post_text(&self, path: &str, body: &Value) -> (u16, String) {
        let resp = self.client.post(format!("{}{path}", self.base)).json(body).send().await.unwrap();
        (resp.status().as_u16(), resp.text().await.unwrap())
    }

    async fn dump(&self) -> String {
        self.client.get(format!("{}/snapshot", self.base)).send().await.unwrap().text().await.unwrap()
    }

    async fn stop(self) {
        let _ = self.stop.send(());
        self.task.await.unwrap().expect("clean shutdown");
    }
}

fn partner_query(social: &str) -> Value {
    json!({
        "consumer": org('A'),
        "service": report_requirement(),
        "social": social,
    })
}

/// Replays records through the API, dependencies first. Returns the
/// number of non-201 replies.
async fn replay(live: &Live, mut records: Vec<Record>) -> usize {
    records.sort_by_key(|r| r.kind().stage());
    let mut failures = 0;
    for r in &records {
        let (path, body) = api_call(r);
        if live.post(&path, &body).await.0 != 201 {
            failures += 1;
        }
    }
    failures
}

fn fixture_records() -> Vec<Record> {
    parse_records(PARTNER_NETWORK).unwrap().into_iter().map(|(_, r)| r).collect()
}

async fn criterion_1() -> Outcome {
    let dir = tempfile::tempdir().unwrap();
    let started = Instant::now();
    let live = Live::start(&ServerConfig::new("127.0.0.1:0", dir.path().join("s.jsonl"))).await;
    ensure!(replay(&live, fixture_records()).await == 0, "fixture rejected by the API");
    let (status, body) = live.post("/broker/query", &partner_query("within_hops(consumer,2)")).await;
    live.stop().await;
    within(started, Duration::from_secs(1))?;

    ensure!(status == 200, "status {status}");
    let providers = body["providers"].as_array().ok_or("no providers array")?;
    let rows: Vec<(u64, String, Value)> = providers
        .iter()
        .map(|p| {
            (
                p["rank"].as_u64().unwrap_or(0),
                p["business"]["business_key"].as_str().unwrap_or("").to_string(),
                p["scores"][0]["value"].clone(),
            )
        })
        .collect();
    let expected = vec![
        (1, org('H').to_string(), json!(1.0)),
        (2, org('F').to_string(), json!(2.0)),
    ];
    ensure!(rows == expected, "got {rows:?}");
    ensure!(body["excluded_count"] == 1, "excluded_count {}", body["excluded_count"]);
    ensure!(
        !providers.iter().any(|p| p["business"]["business_key"] == org('J').to_string()),
        "J present"
    );
    Ok(format!("H rank 1 hops 1, F rank 2 hops 2, J excluded, {:?}", started.elapsed()))
}

async fn criterion_2() -> Outcome {
    let dir = tempfile::tempdir().unwrap();
    let live = Live::start(&ServerConfig::new("127.0.0.1:0", dir.path().join("s.jsonl"))).await;
    replay(&live, fixture_records()).await;

    let mut nowhere = partner_query("");
    nowhere["service"] = json!({"categories": [{"tmodel_key": report_taxonomy(), "key_value": "no-such-category"}]});
    let (s1, b1) = live.post("/broker/query", &nowhere).await;
    let (s2, b2) = live.post("/broker/query", &partner_query("min_degree(999)")).await;
    live.stop().await;

    ensure!(s1 == 200 && b1["providers"] == json!([]), "unknown category: {s1} {b1}");
    ensure!(s2 == 200 && b2["providers"] == json!([]), "min_degree(999): {s2} {b2}");
    Ok(format!(
        "unknown category excluded {}, min_degree(999) excluded {}",
        b1["excluded_count"], b2["excluded_count"]
    ))
}

fn criterion_3() -> Outcome {
    let started = Instant::now();
    let mut btw_checked = 0;
    for seed in 0..50u64 {
        let mut r = rng(3_000 + seed);
        // Every other graph is kept small enough for path enumeration.
        let cap = if seed % 2 == 0 { 20 } else { 12 };
        let (n, edges) = random_graph(&mut r, cap);
        let (g, keys) = build_graph(&mut r, n, &edges);

        let fw = floyd_warshall(n, &edges);
        for i in 0..n {
            for j in 0..n {
                let want = fw[i][j].map_or(Distance::Unreachable, Distance::Hops);
                let got = g.hop_distance(&keys[i], &keys[j]).map_err(|e| e.to_string())?;
                ensure!(got == want, "seed {seed}: hop {i}->{j} {got} vs {want}");
            }
        }

        let deg_sum: usize = keys.iter().map(|k| g.degree(k).unwrap()).sum();
        ensure!(deg_sum == 2 * g.edge_count(), "seed {seed}: handshake {deg_sum} vs {}", g.edge_count());
        ensure!(
            keys.iter().map(|k| g.degree(k).unwrap()).collect::<Vec<_>>() == degrees(n, &edges),
            "seed {seed}: degree sequence"
        );

        if n <= 12 {
            btw_checked += 1;
            let reference = brute_betweenness(n, &edges);
            for (i, k) in keys.iter().enumerate() {
                let got = g.betweenness(k).unwrap();
                ensure!((got - reference[i]).abs() <= 1e-9, "seed {seed} node {i}: {got} vs {}", reference[i]);
            }
        }
    }
    within(started, Duration::from_secs(30))?;
    Ok(format!("50 graphs, betweenness enumerated on {btw_checked}, {:?}", started.elapsed()))
}

fn request_for(triple: &socialbroker_testkit::fixtures::Triple, social: SocialRequirement) -> BrokerRequest {
    BrokerRequest {
        consumer: triple.consumer.clone(),
        service_req: triple.service_req.clone(),
        social_req: social,
    }
}

fn criterion_4() -> Outcome {
    let started = Instant::now();
    let mut answered = 0;
    for seed in 0..100u64 {
        let triple = random_triple(4_000 + seed, 20);
        let stores = triple.stores();
        let got = broker_query(&stores.registry, &stores.graph, &request_for(&triple, triple.social_req.clone()))
            .map_err(|e| format!("seed {seed}: {e}"))?;
        let (expected, excluded) = brute_broker(
            &stores.registry,
            &stores.graph,
            &triple.consumer,
            &triple.service_req,
            &triple.social_req,
        )
        .ok_or(format!("seed {seed}: consumer missing"))?;

        ensure!(got.excluded_count == excluded, "seed {seed}: excluded {} vs {excluded}", got.excluded_count);
        let got_rows: Vec<(usize, &Key)> = got.providers.iter().map(|p| (p.rank, &p.provider.business_key)).collect();
        let want_rows: Vec<(usize, &Key)> = expected.iter().map(|e| (e.rank, &e.provider)).collect();
        ensure!(got_rows == want_rows, "seed {seed}: {got_rows:?} vs {want_rows:?}");
        for (p, e) in got.providers.iter().zip(&expected) {
            let services: Vec<&Key> = p.matched_services.iter().map(|s| &s.service_key).collect();
            ensure!(services == e.services.iter().collect::<Vec<_>>(), "seed {seed}: services differ");
        }
        if !got.providers.is_empty() {
            answered += 1;
        }
    }
    within(started, Duration::from_secs(30))?;
    Ok(format!("100 triples, {answered} non-empty, {:?}", started.elapsed()))
}

fn criterion_5() -> Outcome {
    let mut pairs = 0;
    for seed in 0..100u64 {
        let triple = random_triple(4_000 + seed, 20);
        let stores = triple.stores();
        let social = SocialRequirement::new(triple.social_req.constraints.clone(), vec![]);
        let got = broker_query(&stores.registry, &stores.graph, &request_for(&triple, social))
            .map_err(|e| e.to_string())?;
        for w in got.providers.windows(2) {
            let (a, b) = (w[0].scores.0[0].value, w[1].scores.0[0].value);
            let ordered = match (a, b) {
                (ScoreValue::Finite(x), ScoreValue::Finite(y)) => x <= y,
                (_, ScoreValue::Unreachable) => true,
                (ScoreValue::Unreachable, ScoreValue::Finite(_)) => false,
            };
            ensure!(ordered, "seed {seed}: {a:?} listed before {b:?}");
            pairs += 1;
        }
    }
    Ok(format!("{pairs} adjacent pairs ordered by hops"))
}

fn criterion_6() -> Outcome {
    // Fixture: every permutation of the record lines gives the same bytes.
    let mut r = rng(6_000);
    let request = BrokerRequest {
        consumer: org('A'),
        service_req: report_requirement(),
        social_req: parse_social_requirement("within_hops(consumer,2)").unwrap(),
    };
    let base = load_str(PARTNER_NETWORK).map_err(|e| e.to_string())?;
    let expected = broker_query(&base.registry, &base.graph, &request).unwrap().to_json();
    let mut lines: Vec<&str> = PARTNER_NETWORK.lines().collect();
    for i in 0..20 {
        lines.shuffle(&mut r);
        let s = load_str(&lines.join("\n")).map_err(|e| e.to_string())?;
        let got = broker_query(&s.registry, &s.graph, &request).unwrap().to_json();
        ensure!(got == expected, "fixture permutation {i} differs");
    }

    for seed in 0..100u64 {
        let triple = random_triple(4_000 + seed, 20);
        let request = request_for(&triple, triple.social_req.clone());
        let base = triple.stores();
        let expected = broker_query(&base.registry, &base.graph, &request).unwrap().to_json();
        for _ in 0..3 {
            let s = triple.shuffled_stores(&mut r);
            let got = broker_query(&s.registry, &s.graph, &request).unwrap().to_json();
            ensure!(got == expected, "triple {seed}: permuted records change the response");
        }
    }
    Ok("20 fixture and 300 triple permutations byte-identical".into())
}

fn criterion_7() -> Outcome {
    let started = Instant::now();
    let mut r = rng(7_000);
    let anchors: Vec<Key> = (0..6).map(|_| random_key(&mut r)).collect();
    for i in 0..500 {
        let req = random_requirement(&mut r, &anchors);
        let text = req.serialize();
        let back = parse_social_requirement(&text).map_err(|e| format!("#{i} {text:?}: {e}"))?;
        ensure!(back == req, "#{i}: {text:?} re-parsed differently");
    }

    let probes = [
        "(", ")", ",", "AND", "RANK", "RANK BY", "within_hops", "within_hops(", "within_hops(consumer",
        "within_hops(consumer,", "within_hops(consumer 2)", "within_hops(consumer,x)", "within_hops(2, consumer)",
        "min_degree()", "min_degree(1,2)", "min_degree(1) AND AND min_degree(2)", "min_degree(1) AND",
        "RANK BY hops", "RANK BY hops()", "RANK BY hops(consumer) up", "RANK BY degree,", "\"",
        "connected_to(\"b0000000\")", "consumer", "degree", "min_degree(1) RANK BY degree RANK BY degree",
        "@", "min_degree(1)x", "collaborated_with(consumer", "within_hops((consumer, 1)", "ÿ",
    ];
    for p in probes {
        match std::panic::catch_unwind(|| parse_social_requirement(p)) {
            Ok(Err(ParseError::Syntax { position, .. })) => {
                ensure!(position <= p.len(), "{p:?}: position {position} past end")
            }
            Ok(other) => return Err(format!("{p:?} gave {other:?}")),
            Err(_) => return Err(format!("{p:?} panicked")),
        }
    }
    within(started, Duration::from_secs(5))?;
    Ok(format!("500 round-trips, {} probes positioned, {:?}", probes.len(), started.elapsed()))
}

/// One random mutation. Mostly valid, with duplicates, dangling references
/// and malformed bodies mixed in.
fn random_mutation(r: &mut impl Rng, known: &Known) -> (String, Value) {
    let pick = |r: &mut dyn rand::RngCore, v: &[Key]| -> Key {
        v.choose(r).cloned().unwrap_or_else(|| Key::from_u128(0xdead))
    };
    let fresh = random_key(r);
    match r.random_range(0..10) {
        0 => ("/registry/tmodels".into(), json!({"tmodel_key": fresh, "name": format!("taxonomy {}", known.tmodels.len())})),
        1 | 2 => {
            let mut body = json!({"business_key": fresh, "name": format!("Organization {fresh}")});
            if !known.tmodels.is_empty() && r.random_bool(0.5) {
                body["categories"] = json!([{"tmodel_key": pick(r, &known.tmodels), "key_value": "sector"}]);
            }
            ("/registry/businesses".into(), body)
        }
        3 | 4 => {
            let owner = pick(r, &known.businesses);
            let mut body = json!({"service_key": fresh, "name": "reporting", "description": "Quarterly Report"});
            if !known.tmodels.is_empty() {
                body["categories"] = json!([{"tmodel_key": pick(r, &known.tmodels), "key_value": "report"}]);
            }
            (format!("/registry/businesses/{owner}/services"), body)
        }
        5 => {
            let svc = pick(r, &known.services);
            let tms: Vec<Key> = known.tmodels.iter().take(2).cloned().collect();
            (
                format!("/registry/services/{svc}/bindings"),
                json!({"binding_key": fresh, "access_point": "https://svc.example/api", "tmodel_keys": tms}),
            )
        }
        6 => {
            // Join an existing business to the graph, or add a fresh actor.
            let id = if r.random_bool(0.6) { pick(r, &known.businesses) } else { fresh };
            ("/graph/actors".into(), json!({"id": id}))
        }
        7 | 8 => {
            let a = pick(r, &known.actors);
            let b = pick(r, &known.actors);
            ("/graph/edges".into(), json!({"a": a, "b": b, "weight": r.random_range(1..5) as f64}))
        }
        _ => match r.random_range(0..3) {
            0 => ("/registry/businesses".into(), json!({"business_key": pick(r, &known.businesses), "name": "dup"})),
            1 => ("/registry/businesses".into(), json!({"business_key": "not-a-key", "name": "bad"})),
            _ => ("/graph/edges".into(), json!({"a": fresh, "b": pick(r, &known.actors)})),
        },
    }
}

#[derive(Default)]
struct Known {
    tmodels: Vec<Key>,
    businesses: Vec<Key>,
    services: Vec<Key>,
    actors: Vec<Key>,
}

impl Known {
    fn note(&mut self, path: &str, body: &Value) {
        let key = |field: &str| Key::parse(body[field].as_str().unwrap()).unwrap();
        match path {
            "/registry/tmodels" => self.tmodels.push(key("tmodel_key")),
            "/registry/businesses" => self.businesses.push(key("business_key")),
            "/graph/actors" => self.actors.push(key("id")),
            p if p.ends_with("/services") => self.services.push(key("service_key")),
            _ => {}
        }
    }
}

async fn criterion_8() -> Outcome {
    let dir = tempfile::tempdir().unwrap();
    let config = ServerConfig::new("127.0.0.1:0", dir.path().join("snapshot.jsonl"));
    let started = Instant::now();

    let live = Live::start(&config).await;
    let mut r = rng(8_000);
    let mut known = Known::default();
    let (mut ok, mut rejected) = (0, 0);
    for _ in 0..200 {
        let (path, body) = random_mutation(&mut r, &known);
        let (status, text) = live.post_text(&path, &body).await;
        match status {
            201 => {
                ok += 1;
                known.note(&path, &body);
            }
            400 | 404 | 409 => rejected += 1,
            other => return Err(format!("{path}: unexpected {other}: {text}")),
        }
    }
    let before = live.dump().await;
    live.stop().await;

    let live = Live::start(&config).await;
    let after = live.dump().await;
    live.stop().await;
    within(started, Duration::from_secs(10))?;

    ensure!(before == after, "dump changed across restart");
    let counts = load_str(&after).map_err(|e| e.to_string())?.counts();
    ensure!(counts.get(RecordKind::Business) > 0 && counts.get(RecordKind::Edge) > 0, "mutations too thin: {counts}");
    Ok(format!("{ok} applied, {rejected} rejected, {counts}, {:?}", started.elapsed()))
}

fn main() -> ExitCode {
    let runtime = tokio::runtime::Builder::new_multi_thread().enable_all().build().unwrap();
    let results: Vec<(&str, Outcome)> = vec![
        ("1 partner network end to end", runtime.block_on(criterion_1())),
        ("2 empty results are success", runtime.block_on(criterion_2())),
        ("3 graph metrics match oracles", criterion_3()),
        ("4 broker matches brute-force oracle", criterion_4()),
        ("5 default ranking is hop-monotone", criterion_5()),
        ("6 record order independence", criterion_6()),
        ("7 requirement parser round-trip", criterion_7()),
        ("8 snapshot survives restart", runtime.block_on(criterion_8())),
    ];
    let mut failed = 0;
    for (name, outcome) in &results {
        match outcome {
            Ok(detail) => println!("PASS  criterion {name}: {detail}"),
            Err(why) => {
                failed += 1;
                println!("FAIL  criterion {name}: {why}");
            }
        }
    }
    println!("{} of {} criteria passed", results.len() - failed, results.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
